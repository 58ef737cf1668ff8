//! Built-in computations for BP⟨n⟩ at a prime p and height n ≥ -1.
//!
//! Generator bidegrees (degree, Adams weight): λ_j = (2p^j - 1, 1),
//! μ = (2, 0), t = (-2, 0), ε_i = (2p^i - 1, -1), σv_i = (2p^i - 1, 1),
//! ∂ = (-1, 1) and v_{n+1} = (2p^{n+1} - 2, 0).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraPresentation, Element, GeneratorSpec, Monomial, Trigrade, Window};
use crate::engine::{
    no_room_report, DifferentialRule, DifferentialShift, EngineError, NoRoomCandidate, RunResult, SpectralSequence,
};
use crate::linalg::{cokernel_basis, is_prime, kernel_basis, FpMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("PRECONDITION: {0}")]
    Precondition(String),
    #[error("WINDOW_TOO_SMALL: window must contain degrees [{0}, {1}]")]
    WindowTooSmall(i64, i64),
    #[error("DIMENSION_MISMATCH: {0}")]
    DimensionMismatch(String),
    #[error("unexpected class {label} at ({degree}, {weight})")]
    UnexpectedClass { label: String, degree: i64, weight: i64 },
    #[error("result disagrees with the closed form: {0}")]
    FormulaMismatch(String),
    #[error("NO_ROOM_FAILED: {0} candidate differentials")]
    NoRoomFailed(usize),
}

impl InstanceError {
    pub fn is_window_error(&self) -> bool {
        matches!(
            self,
            InstanceError::WindowTooSmall(..)
                | InstanceError::Engine(EngineError::WindowTooSmall { .. })
                | InstanceError::Engine(EngineError::Algebra(AlgebraError::InfiniteWindow(_)))
                | InstanceError::Engine(EngineError::Algebra(AlgebraError::LimitExceeded(_)))
                | InstanceError::Algebra(AlgebraError::InfiniteWindow(_))
                | InstanceError::Algebra(AlgebraError::LimitExceeded(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisClass {
    pub label: String,
    pub degree: i64,
    pub adams_weight: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub piece: Option<String>,
}

impl BasisClass {
    pub fn new(label: impl Into<String>, degree: i64, adams_weight: i64) -> Self {
        Self {
            label: label.into(),
            degree,
            adams_weight,
            filtration: None,
            piece: None,
        }
    }

    fn with_filtration(mut self, f: i64) -> Self {
        self.filtration = Some(f);
        self
    }

    fn with_piece(mut self, piece: &str) -> Self {
        self.piece = Some(piece.to_string());
        self
    }

    pub fn bidegree(&self) -> (i64, i64) {
        (self.degree, self.adams_weight)
    }
}

/// A labeled list of classes with bidegrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigradedBasis {
    pub p: u32,
    pub n: i32,
    pub window: Window,
    pub classes: Vec<BasisClass>,
}

impl BigradedBasis {
    pub fn new(p: u32, n: i32, window: Window, classes: Vec<BasisClass>) -> Self {
        Self { p, n, window, classes }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn find(&self, label: &str) -> Option<&BasisClass> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// Number of classes in each Adams weight, lowest weight first.
    pub fn row_counts(&self) -> BTreeMap<i64, usize> {
        let mut rows = BTreeMap::new();
        for c in &self.classes {
            *rows.entry(c.adams_weight).or_insert(0) += 1;
        }
        rows
    }

    pub fn degree_span(&self) -> Option<(i64, i64)> {
        let lo = self.classes.iter().map(|c| c.degree).min()?;
        let hi = self.classes.iter().map(|c| c.degree).max()?;
        Some((lo, hi))
    }

    /// The multiset of bidegrees, sorted.
    pub fn bidegrees(&self) -> Vec<(i64, i64)> {
        let mut v: Vec<_> = self.classes.iter().map(BasisClass::bidegree).collect();
        v.sort_unstable();
        v
    }

    fn sort(&mut self) {
        self.classes
            .sort_by(|a, b| (a.degree, a.adams_weight, &a.label).cmp(&(b.degree, b.adams_weight, &b.label)));
    }
}

fn pow(p: u32, k: u32) -> i64 {
    (p as i64).pow(k)
}

fn validate(p: u32, n: i32) -> Result<(), InstanceError> {
    if !is_prime(p) {
        return Err(InstanceError::InvalidParameters(format!("{p} is not prime")));
    }
    if n < -1 {
        return Err(InstanceError::InvalidParameters(format!("height {n} is below -1")));
    }
    let top = (n + 2) as u32;
    if (p as i64).checked_pow(top + 1).is_none_or(|x| x > 1 << 40) {
        return Err(InstanceError::InvalidParameters(format!("p^{} is too large", top + 1)));
    }
    Ok(())
}

/// Number of λ generators, `n + 1`.
fn rank(n: i32) -> u32 {
    (n + 1) as u32
}

fn indexed(name: &str, i: impl std::fmt::Display) -> String {
    let s = i.to_string();
    if s.chars().count() == 1 {
        format!("{name}_{s}")
    } else {
        format!("{name}_{{{s}}}")
    }
}

fn power(name: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{{{e}}}"),
    }
}

fn or_one(s: String) -> String {
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn lambda_degree(p: u32, j: u32) -> i64 {
    2 * pow(p, j) - 1
}

/// Sum of |λ_j| over the bits of `mask` (bit j-1 for λ_j).
fn lambda_set_degree(p: u32, mask: u32) -> i64 {
    (1..=32).filter(|j| mask & (1 << (j - 1)) != 0).map(|j| lambda_degree(p, j)).sum()
}

fn lambda_set_label(mask: u32, count: u32) -> String {
    (1..=count).filter(|j| mask & (1 << (j - 1)) != 0).map(|j| indexed("λ", j)).collect()
}

/// Label for `λ_T Ξ_{j,d}` with factors sorted by index.
fn xi_label(j: u32, d: i64, mask: u32, count: u32) -> String {
    let mut s = String::new();
    for i in 1..=count {
        if i == j {
            s.push_str(&format!("Ξ_{{{j},{d}}}"));
        } else if mask & (1 << (i - 1)) != 0 {
            s.push_str(&indexed("λ", i));
        }
    }
    s
}

fn xi_degree(p: u32, j: u32, d: i64) -> i64 {
    2 * pow(p, j) - 1 - 2 * d * pow(p, j - 1)
}

fn boundary_label(label: &str) -> String {
    if label == "1" {
        "∂".into()
    } else {
        format!("∂{label}")
    }
}

/// Closed-form dimension of mod (p, v_1, ..., v_{n+1}) syntomic cohomology.
pub fn syntomic_dimension(p: u32, n: i32) -> u64 {
    let k = rank(n);
    if n == -1 {
        return 2;
    }
    (1u64 << (n + 2)) + (1u64 << n) * k as u64 * (p as u64 - 1)
}

/// Degrees in which syntomic cohomology is concentrated.
pub fn degree_range(p: u32, n: i32) -> (i64, i64) {
    let top: i64 = (1..=rank(n)).map(|i| 2 * pow(p, i)).sum();
    (-1, top - n as i64 - 1)
}

fn thh_algebra(p: u32, n: i32) -> Result<AlgebraPresentation, InstanceError> {
    let big = pow(p, rank(n));
    let mut gens: Vec<GeneratorSpec> = (1..=rank(n))
        .map(|j| GeneratorSpec::exterior(indexed("λ", j), lambda_degree(p, j), 1))
        .collect();
    gens.push(GeneratorSpec::polynomial(power("μ", big), 2 * big, 0));
    Ok(AlgebraPresentation::new(p, gens)?)
}

/// Basis of Λ(λ_1, ..., λ_{n+1}) ⊗ F_p[μ^{p^{n+1}}] in a window.
pub fn thh_bpn_page(p: u32, n: i32, window: &Window) -> Result<BigradedBasis, InstanceError> {
    validate(p, n)?;
    let alg = thh_algebra(p, n)?;
    let k = rank(n);
    let big = pow(p, k);
    let classes = alg
        .basis_in_window(window)?
        .iter()
        .map(|m| {
            let mask = (0..k).filter(|&i| m.exponent(i as usize) == 1).fold(0, |a, i| a | (1 << i));
            let label = or_one(lambda_set_label(mask, k) + &power("μ", big * m.exponent(k as usize)));
            let (d, w) = alg.monomial_bidegree(m);
            BasisClass::new(label, d, w)
        })
        .collect();
    Ok(BigradedBasis::new(p, n, *window, classes))
}

/// The page carrying `d(μ^{p^i}) = σv_i`.
pub fn hochschild_may_page(p: u32, i: u32) -> u32 {
    if i == 0 {
        2
    } else {
        (2 * pow(p, i) - 2) as u32
    }
}

/// Generators `[σv_0..σv_n, m_0..m_n, μ^{p^{n+1}}]` with `m_j = μ^{p^j}`
/// truncated below p, so that `F_p[μ]` is the tensor product of the factors.
pub fn hochschild_may_sequence(p: u32, n: i32) -> Result<SpectralSequence, InstanceError> {
    validate(p, n)?;
    let k = rank(n);
    let mut gens = Vec::new();
    for i in 0..k {
        gens.push(
            GeneratorSpec::exterior(indexed("σv", i), 2 * pow(p, i) - 1, 1)
                .with_filtration(hochschild_may_page(p, i) as i64),
        );
    }
    for j in 0..k {
        gens.push(GeneratorSpec::polynomial(power("μ", pow(p, j)), 2 * pow(p, j), 0).truncated(p));
    }
    gens.push(GeneratorSpec::polynomial(power("μ", pow(p, k)), 2 * pow(p, k), 0));
    let alg = AlgebraPresentation::new(p, gens)?;
    let pages: BTreeSet<u32> = (0..k).map(|i| hochschild_may_page(p, i)).collect();
    let r_max = pages.iter().copied().max().unwrap_or(1);
    let mut ss = SpectralSequence::new(alg.clone(), DifferentialShift::bockstein(), r_max);
    for page in pages {
        let mut rule = DifferentialRule::new(page);
        for i in (0..k).filter(|&i| hochschild_may_page(p, i) == page) {
            let image = Element::from_monomial(alg.one().with_exponent(i as usize, 1), 1, p);
            rule = rule.with_action((k + i) as usize, 1, image);
        }
        ss.add_rule(rule)?;
    }
    Ok(ss)
}

#[derive(Debug, Clone)]
pub struct HochschildMay {
    pub basis: BigradedBasis,
    pub run: RunResult,
    /// For each i, whether σv_i μ^{(p-1)p^i} represents a nonzero E∞ class.
    pub detection: Vec<bool>,
}

fn hochschild_may_label(p: u32, n: i32, m: &Monomial) -> String {
    let k = rank(n);
    let mut s: String = (0..k).filter(|&i| m.exponent(i as usize) == 1).map(|i| indexed("σv", i)).collect();
    let mu: i64 = (0..=k).map(|j| m.exponent((k + j) as usize) * pow(p, j)).sum();
    s.push_str(&power("μ", mu));
    or_one(s)
}

pub fn hochschild_may(p: u32, n: i32, window: &Window) -> Result<HochschildMay, InstanceError> {
    let ss = hochschild_may_sequence(p, n)?;
    let run = ss.run(window)?;
    let alg = ss.algebra();
    let k = rank(n);
    let mut classes: Vec<BasisClass> = run
        .e_infinity
        .classes()
        .iter()
        .map(|c| {
            BasisClass::new(hochschild_may_label(p, n, &c.leading), c.trigrade.degree, c.trigrade.weight)
                .with_filtration(c.trigrade.filtration)
        })
        .collect();
    classes.sort_by_key(|c| (c.degree, c.adams_weight));
    let detection = (0..k)
        .map(|i| {
            let m = alg
                .one()
                .with_exponent(i as usize, 1)
                .with_exponent((k + i) as usize, p as i64 - 1);
            run.e_infinity
                .class_of(&Element::from_monomial(m, 1, p), alg)
                .is_some_and(|v| v.iter().any(|&x| x != 0))
        })
        .collect();
    Ok(HochschildMay {
        basis: BigradedBasis::new(p, n, *window, classes),
        run,
        detection,
    })
}

/// A monomial map between two corners, `None` meaning zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerMap {
    pub images: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
pub struct Corner {
    pub algebra: AlgebraPresentation,
    pub monomials: Vec<Monomial>,
    pub basis: BigradedBasis,
}

impl Corner {
    fn position(&self, m: &Monomial) -> Option<usize> {
        self.monomials.iter().position(|x| x == m)
    }
}

/// THH with its ε-extension, its μ-inverted analogue, and the two F_p rows,
/// with localization (horizontal) and reduction (vertical) maps.
#[derive(Debug, Clone)]
pub struct HodgeTateSquare {
    pub top_left: Corner,
    pub top_right: Corner,
    pub bottom_left: Corner,
    pub bottom_right: Corner,
    pub top: CornerMap,
    pub bottom: CornerMap,
    pub left: CornerMap,
    pub right: CornerMap,
    pub commutes: bool,
}

fn epsilon_label(i: u32) -> String {
    indexed("ε", i)
}

fn corner(
    p: u32,
    n: i32,
    gens: Vec<GeneratorSpec>,
    window: &Window,
    label: impl Fn(&Monomial) -> String,
) -> Result<Corner, InstanceError> {
    let algebra = AlgebraPresentation::new(p, gens)?;
    let monomials = algebra.basis_in_window(window)?;
    let classes = monomials
        .iter()
        .map(|m| {
            let (d, w) = algebra.monomial_bidegree(m);
            BasisClass::new(label(m), d, w)
        })
        .collect();
    Ok(Corner {
        algebra,
        monomials,
        basis: BigradedBasis::new(p, n, *window, classes),
    })
}

fn top_corner(p: u32, n: i32, window: &Window, periodic: bool) -> Result<Corner, InstanceError> {
    let k = rank(n);
    let big = pow(p, k);
    let mut gens: Vec<GeneratorSpec> = (1..=k)
        .map(|j| GeneratorSpec::exterior(indexed("λ", j), lambda_degree(p, j), 1))
        .collect();
    let m = if periodic {
        GeneratorSpec::laurent(power("μ", big), 2 * big, 0)
    } else {
        GeneratorSpec::polynomial(power("μ", big), 2 * big, 0)
    };
    gens.push(m);
    gens.push(GeneratorSpec::exterior(epsilon_label(k), 2 * big - 1, -1));
    corner(p, n, gens, window, |m| {
        let mask = (0..k).filter(|&i| m.exponent(i as usize) == 1).fold(0, |a, i| a | (1 << i));
        or_one(
            lambda_set_label(mask, k)
                + &power("μ", big * m.exponent(k as usize))
                + &power(&epsilon_label(k), m.exponent(k as usize + 1)),
        )
    })
}

fn bottom_corner(p: u32, n: i32, window: &Window, periodic: bool) -> Result<Corner, InstanceError> {
    let k = rank(n);
    let mut gens = vec![if periodic {
        GeneratorSpec::laurent("μ", 2, 0)
    } else {
        GeneratorSpec::polynomial("μ", 2, 0)
    }];
    for i in 0..=k {
        gens.push(GeneratorSpec::exterior(epsilon_label(i), 2 * pow(p, i) - 1, -1));
    }
    corner(p, n, gens, window, |m| {
        let mut s = power("μ", m.exponent(0));
        for i in 0..=k {
            s += &power(&epsilon_label(i), m.exponent(i as usize + 1));
        }
        or_one(s)
    })
}

fn reduction(source: &Corner, target: &Corner, k: u32, big: i64) -> CornerMap {
    let width = target.algebra.len();
    CornerMap {
        images: source
            .monomials
            .iter()
            .map(|m| {
                if (0..k as usize).any(|i| m.exponent(i) != 0) {
                    return None;
                }
                let mut e = vec![0; width];
                e[0] = big * m.exponent(k as usize);
                e[k as usize + 1] = m.exponent(k as usize + 1);
                target.position(&Monomial::new(e))
            })
            .collect(),
    }
}

fn inclusion(source: &Corner, target: &Corner) -> CornerMap {
    CornerMap {
        images: source.monomials.iter().map(|m| target.position(m)).collect(),
    }
}

pub fn hodge_tate_square(p: u32, n: i32, window: &Window) -> Result<HodgeTateSquare, InstanceError> {
    validate(p, n)?;
    let k = rank(n);
    let big = pow(p, k);
    let top_left = top_corner(p, n, window, false)?;
    let top_right = top_corner(p, n, window, true)?;
    let bottom_left = bottom_corner(p, n, window, false)?;
    let bottom_right = bottom_corner(p, n, window, true)?;
    let top = inclusion(&top_left, &top_right);
    let bottom = inclusion(&bottom_left, &bottom_right);
    let left = reduction(&top_left, &bottom_left, k, big);
    let right = reduction(&top_right, &bottom_right, k, big);
    let commutes = (0..top_left.monomials.len()).all(|i| {
        let via_top = top.images[i].and_then(|j| right.images[j]);
        let via_left = left.images[i].and_then(|j| bottom.images[j]);
        via_top == via_left
    });
    Ok(HodgeTateSquare {
        top_left,
        top_right,
        bottom_left,
        bottom_right,
        top,
        bottom,
        left,
        right,
        commutes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpComparison {
    pub pass: bool,
    pub injective_mod_lambda: bool,
    pub image: Vec<BasisClass>,
    pub expected_image: Vec<BasisClass>,
}

/// Checks that THH(BP⟨n⟩; F_p)⟨ε_{n+1}⟩ → THH(F_p)⟨ε_0..ε_{n+1}⟩ is injective
/// modulo the λ's, with image spanned by μ^{kp^{n+1}} ε_{n+1}^e.
pub fn fp_comparison_check(p: u32, n: i32, window: &Window) -> Result<FpComparison, InstanceError> {
    let sq = hodge_tate_square(p, n, window)?;
    let k = rank(n);
    let big = pow(p, k);
    let hit: Vec<usize> = sq.left.images.iter().flatten().copied().collect();
    let distinct: BTreeSet<usize> = hit.iter().copied().collect();
    let lambda_free = sq
        .top_left
        .monomials
        .iter()
        .filter(|m| (0..k as usize).all(|i| m.exponent(i) == 0))
        .count();
    let injective_mod_lambda = distinct.len() == hit.len() && hit.len() == lambda_free;
    let image: Vec<BasisClass> = distinct.iter().map(|&j| sq.bottom_left.basis.classes[j].clone()).collect();
    let expected_image: Vec<BasisClass> = sq
        .bottom_left
        .monomials
        .iter()
        .zip(&sq.bottom_left.basis.classes)
        .filter(|(m, _)| {
            m.exponent(0) % big == 0 && (0..k as usize).all(|i| m.exponent(i + 1) == 0)
        })
        .map(|(_, c)| c.clone())
        .collect();
    Ok(FpComparison {
        pass: injective_mod_lambda && image == expected_image,
        injective_mod_lambda,
        image,
        expected_image,
    })
}

/// Indices of the generators `[λ_1..λ_{n+1}, μ^{p^{n+1}}, ε_{n+1}, t]`.
#[derive(Debug, Clone, Copy)]
struct TateIndex {
    k: u32,
    m: usize,
    eps: usize,
    t: usize,
}

fn tate_index(n: i32) -> TateIndex {
    let k = rank(n);
    TateIndex {
        k,
        m: k as usize,
        eps: k as usize + 1,
        t: k as usize + 2,
    }
}

/// The t-Bockstein spectral sequence; `periodic` selects TP (t invertible)
/// over TC⁻.
pub fn tate_sequence(p: u32, n: i32, periodic: bool, r_max: u32) -> Result<SpectralSequence, InstanceError> {
    validate(p, n)?;
    let ix = tate_index(n);
    let big = pow(p, ix.k);
    let mut gens: Vec<GeneratorSpec> = (1..=ix.k)
        .map(|j| GeneratorSpec::exterior(indexed("λ", j), lambda_degree(p, j), 1))
        .collect();
    gens.push(GeneratorSpec::polynomial(power("μ", big), 2 * big, 0));
    gens.push(GeneratorSpec::exterior(epsilon_label(ix.k), 2 * big - 1, -1));
    gens.push(if periodic {
        GeneratorSpec::laurent("t", -2, 0).with_filtration(1)
    } else {
        GeneratorSpec::polynomial("t", -2, 0).with_filtration(1)
    });
    let alg = AlgebraPresentation::new(p, gens)?;
    let mut ss = SpectralSequence::new(alg.clone(), DifferentialShift::bockstein(), r_max);
    let tm = alg.one().with_exponent(ix.t, 1).with_exponent(ix.m, 1);
    ss.add_rule(DifferentialRule::new(1).with_action(ix.eps, 1, Element::from_monomial(tm, 1, p)))?;
    for m in 1..=ix.k {
        let unit = pow(p, m - 1);
        let target = alg
            .one()
            .with_exponent(ix.t, pow(p, m) + unit)
            .with_exponent(m as usize - 1, 1);
        ss.add_rule(DifferentialRule::new(pow(p, m) as u32).with_action(ix.t, unit, Element::from_monomial(target, 1, p)))?;
    }
    Ok(ss)
}

/// Filtration box holding every expected E∞ class with degree in `[a, b]`.
fn tate_report_window(p: u32, n: i32, window: &Window, periodic: bool) -> Window {
    let big = pow(p, rank(n));
    let total: i64 = (1..=rank(n)).map(|j| lambda_degree(p, j)).sum();
    let (a, b) = window.degree;
    let lo = if periodic { (-b).div_euclid(2) - 1 - big } else { 0 };
    let hi = (total - a).div_euclid(2) + 2 + big;
    Window {
        degree: window.degree,
        weight: window.weight,
        filtration: Some((lo, hi)),
    }
}

/// Exponent data of a class of the t-Bockstein pages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct TateMonomial {
    mask: u32,
    m: i64,
    eps: i64,
    t: i64,
}

fn tate_monomial(ix: TateIndex, m: &Monomial) -> TateMonomial {
    TateMonomial {
        mask: (0..ix.k).filter(|&i| m.exponent(i as usize) == 1).fold(0, |a, i| a | (1 << i)),
        m: m.exponent(ix.m),
        eps: m.exponent(ix.eps),
        t: m.exponent(ix.t),
    }
}

fn tate_label(p: u32, ix: TateIndex, x: TateMonomial) -> String {
    let big = pow(p, ix.k);
    or_one(
        lambda_set_label(x.mask, ix.k)
            + &power("μ", big * x.m)
            + &power(&epsilon_label(ix.k), x.eps)
            + &power("t", x.t),
    )
}

#[derive(Debug, Clone)]
pub struct TateComputation {
    pub basis: BigradedBasis,
    pub run: RunResult,
}

fn tate_run(p: u32, n: i32, window: &Window, periodic: bool) -> Result<(TateComputation, Vec<TateMonomial>), InstanceError> {
    validate(p, n)?;
    let report = tate_report_window(p, n, window, periodic);
    let (flo, fhi) = report.filtration.expect("set above");
    let r_max = (fhi - flo).max(1) as u32;
    let ss = tate_sequence(p, n, periodic, r_max)?;
    let run = ss.run(&report)?;
    let ix = tate_index(n);
    let mut rows: Vec<(BasisClass, TateMonomial)> = run
        .e_infinity
        .classes()
        .iter()
        .map(|c| {
            let x = tate_monomial(ix, &c.leading);
            (
                BasisClass::new(tate_label(p, ix, x), c.trigrade.degree, c.trigrade.weight)
                    .with_filtration(c.trigrade.filtration),
                x,
            )
        })
        .collect();
    rows.sort_by_key(|a| (a.0.degree, a.0.adams_weight, a.1));
    let (classes, data): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok((
        TateComputation {
            basis: BigradedBasis::new(p, n, report, classes),
            run,
        },
        data,
    ))
}

/// E∞ of the periodic t-Bockstein spectral sequence.
pub fn tp_page(p: u32, n: i32, window: &Window) -> Result<TateComputation, InstanceError> {
    Ok(tate_run(p, n, window, true)?.0)
}

/// Pieces of the TC⁻ E∞ page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NygaardDecomposition {
    pub a00: Vec<BasisClass>,
    pub mu: Vec<BasisClass>,
    pub xi: Vec<BasisClass>,
    pub t: Vec<BasisClass>,
}

impl NygaardDecomposition {
    /// The two conventions for naming the Ξ- and t-pieces.
    pub fn labelings() -> serde_json::Value {
        serde_json::json!([
            {"A00": "A00", "A01": "mu", "A10": "t", "A11": "xi"},
            {"A00": "A00", "A01": "mu", "A10": "xi", "A11": "t"}
        ])
    }

    pub fn len(&self) -> usize {
        self.a00.len() + self.mu.len() + self.xi.len() + self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Role of a TC⁻ E∞ class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    A00 { mask: u32 },
    Mu { mask: u32, k: i64 },
    T { mask: u32, k: i64 },
    Xi { j: u32, d: i64, mask: u32 },
}

impl Piece {
    fn name(self) -> &'static str {
        match self {
            Piece::A00 { .. } => "A00",
            Piece::Mu { .. } => "mu",
            Piece::T { .. } => "t",
            Piece::Xi { .. } => "xi",
        }
    }
}

fn classify(p: u32, ix: TateIndex, x: TateMonomial) -> Option<Piece> {
    let big = pow(p, ix.k);
    if x.eps != 0 || (x.m != 0 && x.t != 0) {
        return None;
    }
    if x.m > 0 {
        return Some(Piece::Mu { mask: x.mask, k: x.m });
    }
    if x.t == 0 {
        return Some(Piece::A00 { mask: x.mask });
    }
    if x.t % big == 0 {
        return Some(Piece::T { mask: x.mask, k: x.t / big });
    }
    // t^{d p^{j-1}} λ_j with 0 < d < p and λ_j the lowest-index λ that the
    // t-exponent's p-adic valuation allows
    let mut v = 0;
    let mut rest = x.t;
    while rest % p as i64 == 0 {
        rest /= p as i64;
        v += 1;
    }
    let j = v + 1;
    if rest >= p as i64 || j > ix.k || x.mask & (1 << (j - 1)) == 0 {
        return None;
    }
    Some(Piece::Xi {
        j,
        d: rest,
        mask: x.mask & !(1 << (j - 1)),
    })
}

fn piece_label(p: u32, ix: TateIndex, piece: Piece) -> String {
    let big = pow(p, ix.k);
    match piece {
        Piece::A00 { mask } => or_one(lambda_set_label(mask, ix.k)),
        Piece::Mu { mask, k } => lambda_set_label(mask, ix.k) + &power("μ", k * big),
        Piece::T { mask, k } => lambda_set_label(mask, ix.k) + &power("t", k * big),
        Piece::Xi { j, d, mask } => xi_label(j, d, mask, ix.k),
    }
}

#[derive(Debug, Clone)]
pub struct TcMinus {
    pub computation: TateComputation,
    pub decomposition: NygaardDecomposition,
    pieces: Vec<Piece>,
}

pub fn tc_minus_page(p: u32, n: i32, window: &Window) -> Result<TcMinus, InstanceError> {
    let (mut computation, data) = tate_run(p, n, window, false)?;
    let ix = tate_index(n);
    let mut decomposition = NygaardDecomposition {
        a00: vec![],
        mu: vec![],
        xi: vec![],
        t: vec![],
    };
    let mut pieces = Vec::new();
    for (class, x) in computation.basis.classes.iter_mut().zip(&data) {
        let piece = classify(p, ix, *x).ok_or_else(|| InstanceError::UnexpectedClass {
            label: class.label.clone(),
            degree: class.degree,
            weight: class.adams_weight,
        })?;
        class.label = piece_label(p, ix, piece);
        class.piece = Some(piece.name().to_string());
        match piece {
            Piece::A00 { .. } => decomposition.a00.push(class.clone()),
            Piece::Mu { .. } => decomposition.mu.push(class.clone()),
            Piece::T { .. } => decomposition.t.push(class.clone()),
            Piece::Xi { .. } => decomposition.xi.push(class.clone()),
        }
        pieces.push(piece);
    }
    Ok(TcMinus {
        computation,
        decomposition,
        pieces,
    })
}

/// `can` and `φ` from TC⁻ E∞ to TP E∞, one matrix pair per bidegree.
#[derive(Debug, Clone)]
pub struct CanPhi {
    pub bidegrees: Vec<(i64, i64)>,
    pub sources: Vec<Vec<BasisClass>>,
    pub targets: Vec<Vec<BasisClass>>,
    pub can: Vec<FpMatrix>,
    pub phi: Vec<FpMatrix>,
    pub tc_minus: TcMinus,
    pub tp: TateComputation,
}

/// TP classes keyed by (λ set, t-exponent), after checking they all have
/// that shape.
fn tp_classes(p: u32, n: i32, tp: &TateComputation, data: &[TateMonomial]) -> Result<BTreeMap<(u32, i64), usize>, InstanceError> {
    let ix = tate_index(n);
    let big = pow(p, ix.k);
    let mut out = BTreeMap::new();
    for (i, (c, x)) in tp.basis.classes.iter().zip(data).enumerate() {
        if x.m != 0 || x.eps != 0 || x.t % big != 0 {
            return Err(InstanceError::UnexpectedClass {
                label: c.label.clone(),
                degree: c.degree,
                weight: c.adams_weight,
            });
        }
        out.insert((x.mask, x.t), i);
    }
    Ok(out)
}

pub fn can_phi_matrices(p: u32, n: i32, window: &Window) -> Result<CanPhi, InstanceError> {
    let tc_minus = tc_minus_page(p, n, window)?;
    let (tp, tp_data) = tate_run(p, n, window, true)?;
    let tp_index = tp_classes(p, n, &tp, &tp_data)?;
    let big = pow(p, rank(n));

    let mut cells: BTreeMap<(i64, i64), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, c) in tc_minus.computation.basis.classes.iter().enumerate() {
        cells.entry(c.bidegree()).or_default().0.push(i);
    }
    for (i, c) in tp.basis.classes.iter().enumerate() {
        cells.entry(c.bidegree()).or_default().1.push(i);
    }
    let mut out = CanPhi {
        bidegrees: vec![],
        sources: vec![],
        targets: vec![],
        can: vec![],
        phi: vec![],
        tc_minus: tc_minus.clone(),
        tp: tp.clone(),
    };
    for (bideg, (src, tgt)) in cells {
        let mut can = FpMatrix::zeros(p, tgt.len(), src.len())?;
        let mut phi = FpMatrix::zeros(p, tgt.len(), src.len())?;
        let row_of = |key: (u32, i64), label: &str| -> Result<usize, InstanceError> {
            tp_index
                .get(&key)
                .and_then(|i| tgt.iter().position(|x| x == i))
                .ok_or_else(|| InstanceError::DimensionMismatch(format!("no TP class for the image of {label} at {bideg:?}")))
        };
        for (col, &i) in src.iter().enumerate() {
            let label = &tc_minus.computation.basis.classes[i].label;
            match tc_minus.pieces[i] {
                Piece::A00 { mask } => {
                    let row = row_of((mask, 0), label)?;
                    can.set(row, col, 1);
                    phi.set(row, col, 1);
                }
                Piece::T { mask, k } => can.set(row_of((mask, k * big), label)?, col, 1),
                Piece::Mu { mask, k } => phi.set(row_of((mask, -k * big), label)?, col, 1),
                Piece::Xi { .. } => {}
            }
        }
        out.bidegrees.push(bideg);
        out.sources.push(src.iter().map(|&i| tc_minus.computation.basis.classes[i].clone()).collect());
        out.targets.push(tgt.iter().map(|&i| tp.basis.classes[i].clone()).collect());
        out.can.push(can);
        out.phi.push(phi);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Syntomic {
    pub basis: BigradedBasis,
    /// Kernel of can − φ, tagged with Nygaard pieces.
    pub kernel: Vec<BasisClass>,
    /// Cokernel of can − φ, before the ∂ shift.
    pub cokernel: Vec<BasisClass>,
    pub decomposition: NygaardDecomposition,
}

/// The syntomic basis predicted by the closed form.
pub fn syntomic_formula(p: u32, n: i32) -> Vec<BasisClass> {
    let k = rank(n);
    let mut out = Vec::new();
    for mask in 0..(1u32 << k) {
        let d = lambda_set_degree(p, mask);
        let w = mask.count_ones() as i64;
        let label = or_one(lambda_set_label(mask, k));
        out.push(BasisClass::new(label.clone(), d, w));
        out.push(BasisClass::new(boundary_label(&label), d - 1, w + 1));
    }
    for j in 1..=k {
        for d in 1..p as i64 {
            for mask in (0..(1u32 << k)).filter(|m| m & (1 << (j - 1)) == 0) {
                out.push(BasisClass::new(
                    xi_label(j, d, mask, k),
                    xi_degree(p, j, d) + lambda_set_degree(p, mask),
                    1 + mask.count_ones() as i64,
                ));
            }
        }
    }
    out
}

pub fn syntomic(p: u32, n: i32, window: &Window) -> Result<Syntomic, InstanceError> {
    validate(p, n)?;
    let (lo, hi) = degree_range(p, n);
    if window.degree.0 > lo || window.degree.1 < hi {
        return Err(InstanceError::WindowTooSmall(lo, hi));
    }
    let compute = Window {
        degree: (window.degree.0, window.degree.1 + 1),
        weight: window.weight.map(|(a, b)| (a - 1, b)),
        filtration: None,
    };
    let cp = can_phi_matrices(p, n, &compute)?;
    let mut kernel = Vec::new();
    let mut cokernel = Vec::new();
    let mut classes = Vec::new();
    for (i, &(d, w)) in cp.bidegrees.iter().enumerate() {
        let diff = cp.can[i].sub(&cp.phi[i])?;
        for v in kernel_basis(&diff) {
            let lead = v.iter().position(|&x| x != 0).expect("kernel vectors are nonzero");
            let c = &cp.sources[i][lead];
            kernel.push(c.clone());
            if window.degree.0 <= d && d <= window.degree.1 {
                let piece = c.piece.clone().unwrap_or_default();
                classes.push(BasisClass::new(c.label.clone(), d, w).with_piece(&piece));
            }
        }
        for &row in &cokernel_basis(&diff).representatives {
            let c = &cp.targets[i][row];
            cokernel.push(c.clone());
            let label = if c.filtration == Some(0) {
                c.label.clone()
            } else {
                return Err(InstanceError::UnexpectedClass {
                    label: c.label.clone(),
                    degree: c.degree,
                    weight: c.adams_weight,
                });
            };
            if window.degree.0 < d && d - 1 <= window.degree.1 {
                classes.push(BasisClass::new(boundary_label(&label), d - 1, w + 1).with_piece("∂A00"));
            }
        }
    }
    let mut basis = BigradedBasis::new(p, n, *window, classes);
    basis.sort();

    let mut expected: Vec<(String, i64, i64)> = syntomic_formula(p, n)
        .into_iter()
        .filter(|c| window.weight.is_none_or(|(a, b)| a <= c.adams_weight && c.adams_weight <= b))
        .map(|c| (c.label, c.degree, c.adams_weight))
        .collect();
    let mut found: Vec<(String, i64, i64)> = basis
        .classes
        .iter()
        .map(|c| (c.label.clone(), c.degree, c.adams_weight))
        .collect();
    expected.sort();
    found.sort();
    if expected != found {
        let missing: Vec<_> = expected.iter().filter(|x| !found.contains(x)).collect();
        let extra: Vec<_> = found.iter().filter(|x| !expected.contains(x)).collect();
        return Err(InstanceError::FormulaMismatch(format!("missing {missing:?}, unexpected {extra:?}")));
    }
    Ok(Syntomic {
        basis,
        kernel,
        cokernel,
        decomposition: cp.tc_minus.decomposition,
    })
}

/// Smallest window on which `syntomic` is defined.
pub fn syntomic_window(p: u32, n: i32) -> Window {
    let (lo, hi) = degree_range(p, n);
    Window::degrees(lo, hi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapWitness {
    pub source: String,
    pub k: i64,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub p: u32,
    pub n: i32,
    pub pass: bool,
    /// Candidates out of the Adams weight 1 generators Ξ_{j,d}.
    pub witnesses: Vec<GapWitness>,
    /// Candidates out of the unit. These are listed but never block a pass,
    /// since the unit is a permanent cycle of a multiplicative spectral
    /// sequence; they only occur at n = -1, where |v_0| = 0.
    pub unit_candidates: Vec<GapWitness>,
    /// Candidates when every class is treated as a source.
    pub all_sources: Vec<GapWitness>,
}

fn gap_scan(classes: &[BasisClass], sources: &[&BasisClass], period: i64) -> Vec<GapWitness> {
    let mut out = Vec::new();
    for g in sources {
        let mut k = 1;
        loop {
            let degree = g.degree - 1 - k * period;
            if degree < -1 || (period == 0 && k > 1) {
                break;
            }
            for h in classes.iter().filter(|h| h.degree == degree && h.adams_weight == g.adams_weight + 1) {
                out.push(GapWitness {
                    source: g.label.clone(),
                    k,
                    target: h.label.clone(),
                });
            }
            k += 1;
        }
    }
    out
}

/// Looks for room for v_{n+1}-Bockstein differentials out of the syntomic
/// module generators.
pub fn vn1_bockstein_gap_check(p: u32, n: i32) -> Result<GapReport, InstanceError> {
    validate(p, n)?;
    let classes = syntomic_formula(p, n);
    let period = 2 * pow(p, rank(n)) - 2;
    let generators: Vec<&BasisClass> = classes
        .iter()
        .filter(|c| c.label.starts_with("Ξ") && c.adams_weight == 1)
        .collect();
    let unit: Vec<&BasisClass> = classes.iter().filter(|c| c.label == "1").collect();
    let everything: Vec<&BasisClass> = classes.iter().collect();
    let witnesses = gap_scan(&classes, &generators, period);
    let unit_candidates = gap_scan(&classes, &unit, period);
    let all_sources = gap_scan(&classes, &everything, period);
    Ok(GapReport {
        p,
        n,
        pass: witnesses.is_empty(),
        witnesses,
        unit_candidates,
        all_sources,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotivicReport {
    pub p: u32,
    pub pass: bool,
    pub weights_in_range: bool,
    /// (source, page, target) collisions of degree residues mod |v_3|.
    pub residue_witnesses: Vec<(String, u32, String)>,
    pub window_witnesses: Vec<NoRoomCandidate>,
}

fn require_bp2_prime(p: u32) -> Result<(), InstanceError> {
    validate(p, 2)?;
    if p < 5 {
        return Err(InstanceError::Precondition(format!("BP⟨2⟩ computations require p ≥ 5, got {p}")));
    }
    Ok(())
}

pub fn v3_degree(p: u32) -> i64 {
    2 * pow(p, 3) - 2
}

/// Certifies that no motivic differential d_r (r ≥ 2) can connect classes of
/// the v_3-periodic extension of the (p, 2) syntomic basis.
pub fn motivic_no_room(p: u32) -> Result<MotivicReport, InstanceError> {
    require_bp2_prime(p)?;
    let classes = syntomic_formula(p, 2);
    let v = v3_degree(p);
    let weights_in_range = classes.iter().all(|c| (0..=4).contains(&c.adams_weight));
    let mut residue_witnesses = Vec::new();
    for g in &classes {
        for r in 2..=4u32 {
            for h in &classes {
                if h.adams_weight == g.adams_weight + r as i64 && (g.degree - 1 - h.degree).rem_euclid(v) == 0 {
                    residue_witnesses.push((g.label.clone(), r, h.label.clone()));
                }
            }
        }
    }
    let hi = degree_range(p, 2).1;
    let mut occupied = BTreeSet::new();
    for g in &classes {
        let mut d = g.degree;
        while d <= hi + 2 * v {
            occupied.insert(Trigrade::new(d, g.adams_weight, 0));
            d += v;
        }
    }
    let occupied: Vec<Trigrade> = occupied.into_iter().collect();
    let window_witnesses = no_room_report(&occupied, &DifferentialShift::motivic(), 2..=4);
    Ok(MotivicReport {
        p,
        pass: weights_in_range && residue_witnesses.is_empty() && window_witnesses.is_empty(),
        weights_in_range,
        residue_witnesses,
        window_witnesses,
    })
}

#[derive(Debug, Clone)]
pub struct TcBp2 {
    pub basis: BigradedBasis,
    pub dimensions: Vec<(i64, usize)>,
    pub no_room: MotivicReport,
}

fn v3_label(k: i64, g: &str) -> String {
    let v = power("v_3", k);
    match (v.is_empty(), g) {
        (true, _) => g.to_string(),
        (false, "1") => v,
        (false, _) => v + g,
    }
}

/// TC(BP⟨2⟩)/(p, v_1, v_2) as the free F_p[v_3]-module on the syntomic basis.
pub fn tc_bp2(p: u32, window: &Window) -> Result<TcBp2, InstanceError> {
    let no_room = motivic_no_room(p)?;
    if !no_room.pass {
        return Err(InstanceError::NoRoomFailed(
            no_room.residue_witnesses.len() + no_room.window_witnesses.len(),
        ));
    }
    let v = v3_degree(p);
    let (lo, hi) = window.degree;
    let mut classes = Vec::new();
    for g in syntomic_formula(p, 2) {
        let mut k = 0;
        while g.degree + k * v <= hi {
            let d = g.degree + k * v;
            if d >= lo && window.weight.is_none_or(|(a, b)| a <= g.adams_weight && g.adams_weight <= b) {
                classes.push(BasisClass::new(v3_label(k, &g.label), d, g.adams_weight));
            }
            k += 1;
        }
    }
    let mut basis = BigradedBasis::new(p, 2, *window, classes);
    basis.sort();
    let dimensions = (lo..=hi)
        .map(|s| (s, basis.classes.iter().filter(|c| c.degree == s).count()))
        .collect();
    Ok(TcBp2 {
        basis,
        dimensions,
        no_room,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRow {
    pub degree: i64,
    pub tc: usize,
    pub k: usize,
    pub v3_inverted: usize,
}

/// Degrees where K(BP⟨2⟩)/(p, v_1, v_2) gains a class over TC.
pub fn k_bp2_corrections(p: u32) -> [i64; 3] {
    [2 * p as i64 - 3, 2 * pow(p, 2) - 3, 2 * pow(p, 2) + 2 * p as i64 - 4]
}

pub fn k_bp2(p: u32, window: &Window) -> Result<Vec<KRow>, InstanceError> {
    let tc = tc_bp2(p, window)?;
    let v = v3_degree(p);
    let generators = syntomic_formula(p, 2);
    let corrections = k_bp2_corrections(p);
    Ok(tc
        .dimensions
        .iter()
        .map(|&(s, dim)| {
            let k = if s < 0 {
                0
            } else if corrections.contains(&s) {
                dim + 1
            } else {
                dim
            };
            let v3_inverted = generators.iter().filter(|g| (s - g.degree).rem_euclid(v) == 0).count();
            KRow {
                degree: s,
                tc: dim,
                k,
                v3_inverted,
            }
        })
        .collect())
}
