//! Monomial-basis model of bigraded-commutative F_p-algebras.
//!
//! An algebra is a tensor product of exterior, (optionally truncated)
//! polynomial and Laurent factors on named generators. Each generator carries
//! a topological degree, an Adams weight and a filtration index; all three are
//! additive over exponent vectors.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{is_prime, reduce};

static ENUMERATION_LIMIT: AtomicUsize = AtomicUsize::new(4_000_000);

/// Caps the number of monomials a single window enumeration may produce.
pub fn set_enumeration_limit(limit: usize) {
    ENUMERATION_LIMIT.store(limit, AtomicOrdering::Relaxed);
}

pub fn enumeration_limit() -> usize {
    ENUMERATION_LIMIT.load(AtomicOrdering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("generator {name:?}: {reason}")]
    InvalidGenerator { name: String, reason: String },
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("INFINITE_WINDOW: exponent of {0:?} is unbounded by the window")]
    InfiniteWindow(String),
    #[error("WINDOW_LIMIT: enumeration exceeds {0} monomials")]
    LimitExceeded(usize),
    #[error("monomial has {got} exponents but the algebra has {expected} generators")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Exterior,
    Polynomial,
    Laurent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKind,
    pub degree: i64,
    pub adams_weight: i64,
    #[serde(default)]
    pub filtration: i64,
    /// Exponents must stay strictly below this bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, kind: GeneratorKind, degree: i64, adams_weight: i64) -> Self {
        Self {
            name: name.into(),
            kind,
            degree,
            adams_weight,
            filtration: 0,
            truncation: None,
        }
    }

    pub fn exterior(name: impl Into<String>, degree: i64, adams_weight: i64) -> Self {
        Self::new(name, GeneratorKind::Exterior, degree, adams_weight)
    }

    pub fn polynomial(name: impl Into<String>, degree: i64, adams_weight: i64) -> Self {
        Self::new(name, GeneratorKind::Polynomial, degree, adams_weight)
    }

    pub fn laurent(name: impl Into<String>, degree: i64, adams_weight: i64) -> Self {
        Self::new(name, GeneratorKind::Laurent, degree, adams_weight)
    }

    pub fn with_filtration(mut self, filtration: i64) -> Self {
        self.filtration = filtration;
        self
    }

    pub fn truncated(mut self, bound: u32) -> Self {
        self.truncation = Some(bound);
        self
    }

    fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// (degree, Adams weight, filtration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trigrade {
    pub degree: i64,
    pub weight: i64,
    pub filtration: i64,
}

impl Trigrade {
    pub const fn new(degree: i64, weight: i64, filtration: i64) -> Self {
        Self {
            degree,
            weight,
            filtration,
        }
    }

    pub fn bidegree(self) -> (i64, i64) {
        (self.degree, self.weight)
    }
}

impl fmt::Display for Trigrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.degree, self.weight, self.filtration)
    }
}

/// A finite box of degrees, with optional Adams-weight and filtration bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub degree: (i64, i64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<(i64, i64)>,
}

impl Window {
    pub fn degrees(lo: i64, hi: i64) -> Self {
        Self {
            degree: (lo, hi),
            weight: None,
            filtration: None,
        }
    }

    pub fn with_weight(mut self, lo: i64, hi: i64) -> Self {
        self.weight = Some((lo, hi));
        self
    }

    pub fn with_filtration(mut self, lo: i64, hi: i64) -> Self {
        self.filtration = Some((lo, hi));
        self
    }

    pub fn contains(&self, t: Trigrade) -> bool {
        let inside = |b: Option<(i64, i64)>, x: i64| b.is_none_or(|(lo, hi)| lo <= x && x <= hi);
        (self.degree.0..=self.degree.1).contains(&t.degree)
            && inside(self.weight, t.weight)
            && inside(self.filtration, t.filtration)
    }

    /// Whether `other` lies inside `self` in every bounded coordinate.
    pub fn encloses(&self, other: &Window) -> bool {
        let within = |outer: Option<(i64, i64)>, inner: Option<(i64, i64)>| match (outer, inner) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, b)), Some((c, d))) => a <= c && d <= b,
        };
        within(Some(self.degree), Some(other.degree))
            && within(self.weight, other.weight)
            && within(self.filtration, other.filtration)
    }

    /// Grows every bounded coordinate by the given margins on both sides.
    pub fn expanded(&self, degree: i64, weight: i64, filtration: i64) -> Self {
        Self {
            degree: (self.degree.0 - degree, self.degree.1 + degree),
            weight: self.weight.map(|(a, b)| (a - weight, b + weight)),
            filtration: self.filtration.map(|(a, b)| (a - filtration, b + filtration)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.degree.0 > self.degree.1
            || self.weight.is_some_and(|(a, b)| a > b)
            || self.filtration.is_some_and(|(a, b)| a > b)
    }
}

/// Exponent vector aligned with an algebra's generator list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(Vec<i64>);

impl Monomial {
    pub fn new(exponents: Vec<i64>) -> Self {
        Self(exponents)
    }

    pub fn one(generators: usize) -> Self {
        Self(vec![0; generators])
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn exponent(&self, generator: usize) -> i64 {
        self.0[generator]
    }

    pub fn with_exponent(&self, generator: usize, exponent: i64) -> Self {
        let mut e = self.0.clone();
        e[generator] = exponent;
        Self(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// An F_p-linear combination of monomials; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_monomial(m: Monomial, coefficient: i64, p: u32) -> Self {
        let mut e = Self::zero();
        e.add_term(m, coefficient, p);
        e
    }

    pub fn add_term(&mut self, m: Monomial, coefficient: i64, p: u32) {
        let c = reduce(coefficient, p);
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let v = (*slot.get() + c) % p;
                if v == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = v;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, scale: i64, p: u32) {
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c as i64 * scale, p);
        }
    }

    pub fn scaled(&self, scale: i64, p: u32) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, scale, p);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    p: u32,
    generators: Vec<GeneratorSpec>,
}

impl AlgebraPresentation {
    pub fn new(p: u32, generators: Vec<GeneratorSpec>) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
            let invalid = |reason: &str| AlgebraError::InvalidGenerator {
                name: g.name.clone(),
                reason: reason.to_string(),
            };
            if p != 2 {
                match g.kind {
                    GeneratorKind::Exterior if !g.is_odd() => {
                        return Err(invalid("exterior generators must have odd degree"))
                    }
                    GeneratorKind::Polynomial | GeneratorKind::Laurent if g.is_odd() => {
                        return Err(invalid("polynomial and laurent generators must have even degree"))
                    }
                    _ => {}
                }
            }
            if g.kind == GeneratorKind::Laurent && g.degree == 0 {
                return Err(invalid("laurent generators must have nonzero degree"));
            }
            if g.kind == GeneratorKind::Laurent && g.truncation.is_some() {
                return Err(invalid("laurent generators cannot be truncated"));
            }
            if g.truncation == Some(0) {
                return Err(invalid("truncation bound must be at least 1"));
            }
        }
        Ok(Self { p, generators })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.len())
    }

    /// The monomial `name^exponent`.
    pub fn power(&self, name: &str, exponent: i64) -> Result<Monomial, AlgebraError> {
        let i = self.index_of(name)?;
        Ok(self.one().with_exponent(i, exponent))
    }

    /// Builds a monomial from `(name, exponent)` pairs.
    pub fn monomial(&self, factors: &[(&str, i64)]) -> Result<Monomial, AlgebraError> {
        let mut e = vec![0; self.len()];
        for &(name, exp) in factors {
            e[self.index_of(name)?] += exp;
        }
        Ok(Monomial::new(e))
    }

    pub fn is_valid(&self, m: &Monomial) -> bool {
        m.0.len() == self.len()
            && m.0.iter().zip(&self.generators).all(|(&e, g)| {
                let kind_ok = match g.kind {
                    GeneratorKind::Exterior => e == 0 || e == 1,
                    GeneratorKind::Polynomial => e >= 0,
                    GeneratorKind::Laurent => true,
                };
                kind_ok && g.truncation.is_none_or(|t| e < t as i64)
            })
    }

    pub fn monomial_bidegree(&self, m: &Monomial) -> (i64, i64) {
        let t = self.trigrade(m);
        (t.degree, t.weight)
    }

    pub fn trigrade(&self, m: &Monomial) -> Trigrade {
        let mut t = Trigrade::new(0, 0, 0);
        for (&e, g) in m.0.iter().zip(&self.generators) {
            t.degree += e * g.degree;
            t.weight += e * g.adams_weight;
            t.filtration += e * g.filtration;
        }
        t
    }

    pub fn degree(&self, m: &Monomial) -> i64 {
        m.0.iter().zip(&self.generators).map(|(&e, g)| e * g.degree).sum()
    }

    /// Graded-commutative product. The sign counts the transpositions of
    /// odd-degree factors needed to sort the concatenation `a · b` into
    /// generator order.
    pub fn multiply(&self, a: &Monomial, b: &Monomial) -> Element {
        match self.product(a, b) {
            Some((m, negative)) => Element::from_monomial(m, if negative { -1 } else { 1 }, self.p),
            None => Element::zero(),
        }
    }

    /// The merged monomial and whether the Koszul sign is negative, or `None`
    /// when the product vanishes.
    pub fn product(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut out = Vec::with_capacity(self.len());
        for ((&x, &y), g) in a.0.iter().zip(&b.0).zip(&self.generators) {
            let e = x + y;
            if g.kind == GeneratorKind::Exterior && e > 1 {
                return None;
            }
            if g.truncation.is_some_and(|t| e >= t as i64) {
                return None;
            }
            out.push(e);
        }
        let mut odd_in_a_after = 0i64;
        let mut sign = 0i64;
        for i in (0..self.len()).rev() {
            if self.generators[i].is_odd() {
                sign += b.0[i].rem_euclid(2) * odd_in_a_after;
                odd_in_a_after += a.0[i].rem_euclid(2);
            }
        }
        Some((Monomial(out), sign % 2 == 1))
    }

    pub fn multiply_elements(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                if let Some((m, neg)) = self.product(x, y) {
                    let c = cx as i64 * cy as i64 * if neg { -1 } else { 1 };
                    out.add_term(m, c, self.p);
                }
            }
        }
        out
    }

    /// Canonical order: degree, then Adams weight, then filtration, then
    /// exponent vectors lexicographically in generator order.
    pub fn canonical_cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.trigrade(a)
            .cmp(&self.trigrade(b))
            .then_with(|| a.0.cmp(&b.0))
    }

    /// Generic label such as `λ_1t^{-3}`; the unit is `1`.
    pub fn label(&self, m: &Monomial) -> String {
        let mut s = String::new();
        for (&e, g) in m.0.iter().zip(&self.generators) {
            match e {
                0 => {}
                1 => s.push_str(&g.name),
                _ => s.push_str(&format!("{}^{{{}}}", g.name, e)),
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// Every monomial inside the window, in canonical order.
    pub fn basis_in_window(&self, window: &Window) -> Result<Vec<Monomial>, AlgebraError> {
        let Some(ranges) = self.exponent_ranges(window)? else {
            return Ok(Vec::new());
        };
        let functionals = self.functionals(window);
        // suffix extremes of each functional over generators i..
        let n = self.len();
        let mut suffix: Vec<Vec<(i64, i64)>> = vec![vec![(0, 0); functionals.len()]; n + 1];
        for i in (0..n).rev() {
            for (k, (coeffs, _, _)) in functionals.iter().enumerate() {
                let (a, b) = (coeffs[i] * ranges[i].0, coeffs[i] * ranges[i].1);
                suffix[i][k] = (suffix[i + 1][k].0 + a.min(b), suffix[i + 1][k].1 + a.max(b));
            }
        }
        let limit = enumeration_limit();
        let mut out = Vec::new();
        let mut cur = vec![0i64; n];
        let mut sums = vec![0i64; functionals.len()];
        self.enumerate(0, &ranges, &functionals, &suffix, &mut cur, &mut sums, &mut out, limit)?;
        out.sort_by(|a, b| self.canonical_cmp(a, b));
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        i: usize,
        ranges: &[(i64, i64)],
        functionals: &[(Vec<i64>, i64, i64)],
        suffix: &[Vec<(i64, i64)>],
        cur: &mut Vec<i64>,
        sums: &mut Vec<i64>,
        out: &mut Vec<Monomial>,
        limit: usize,
    ) -> Result<(), AlgebraError> {
        for (k, (_, lo, hi)) in functionals.iter().enumerate() {
            if sums[k] + suffix[i][k].0 > *hi || sums[k] + suffix[i][k].1 < *lo {
                return Ok(());
            }
        }
        if i == ranges.len() {
            if out.len() >= limit {
                return Err(AlgebraError::LimitExceeded(limit));
            }
            out.push(Monomial(cur.clone()));
            return Ok(());
        }
        for e in ranges[i].0..=ranges[i].1 {
            cur[i] = e;
            for (k, (coeffs, _, _)) in functionals.iter().enumerate() {
                sums[k] += coeffs[i] * e;
            }
            self.enumerate(i + 1, ranges, functionals, suffix, cur, sums, out, limit)?;
            for (k, (coeffs, _, _)) in functionals.iter().enumerate() {
                sums[k] -= coeffs[i] * e;
            }
        }
        cur[i] = 0;
        Ok(())
    }

    fn functionals(&self, window: &Window) -> Vec<(Vec<i64>, i64, i64)> {
        let mut f = vec![(
            self.generators.iter().map(|g| g.degree).collect(),
            window.degree.0,
            window.degree.1,
        )];
        if let Some((lo, hi)) = window.weight {
            f.push((self.generators.iter().map(|g| g.adams_weight).collect(), lo, hi));
        }
        if let Some((lo, hi)) = window.filtration {
            f.push((self.generators.iter().map(|g| g.filtration).collect(), lo, hi));
        }
        f
    }

    /// Per-generator exponent ranges implied by the window, by interval
    /// propagation over the bounded functionals. `Ok(None)` means the window
    /// is infeasible.
    fn exponent_ranges(&self, window: &Window) -> Result<Option<Vec<(i64, i64)>>, AlgebraError> {
        type Bound = (Option<i64>, Option<i64>);
        let mut ranges: Vec<Bound> = self
            .generators
            .iter()
            .map(|g| {
                let hi = g.truncation.map(|t| t as i64 - 1);
                match g.kind {
                    GeneratorKind::Exterior => (Some(0), Some(1)),
                    GeneratorKind::Polynomial => (Some(0), hi),
                    GeneratorKind::Laurent => (None, None),
                }
            })
            .collect();
        let functionals = self.functionals(window);
        let term_range = |c: i64, (lo, hi): Bound| -> Bound {
            if c == 0 {
                return (Some(0), Some(0));
            }
            let a = lo.map(|x| x * c);
            let b = hi.map(|x| x * c);
            if c > 0 {
                (a, b)
            } else {
                (b, a)
            }
        };
        for _ in 0..64 {
            let mut changed = false;
            for (coeffs, lo, hi) in &functionals {
                for i in 0..self.len() {
                    let c = coeffs[i];
                    if c == 0 {
                        continue;
                    }
                    let mut rest_min = Some(0i64);
                    let mut rest_max = Some(0i64);
                    for j in (0..self.len()).filter(|&j| j != i) {
                        let (a, b) = term_range(coeffs[j], ranges[j]);
                        rest_min = rest_min.zip(a).map(|(x, y)| x + y);
                        rest_max = rest_max.zip(b).map(|(x, y)| x + y);
                    }
                    // c * e in [lo - rest_max, hi - rest_min]
                    let t_lo = rest_max.map(|m| lo - m);
                    let t_hi = rest_min.map(|m| hi - m);
                    let (e_lo, e_hi) = if c > 0 {
                        (t_lo.map(|x| div_ceil(x, c)), t_hi.map(|x| div_floor(x, c)))
                    } else {
                        (t_hi.map(|x| div_ceil(x, c)), t_lo.map(|x| div_floor(x, c)))
                    };
                    let r = &mut ranges[i];
                    if let Some(x) = e_lo {
                        if r.0.is_none_or(|cur| x > cur) {
                            r.0 = Some(x);
                            changed = true;
                        }
                    }
                    if let Some(x) = e_hi {
                        if r.1.is_none_or(|cur| x < cur) {
                            r.1 = Some(x);
                            changed = true;
                        }
                    }
                    if let (Some(a), Some(b)) = *r {
                        if a > b {
                            return Ok(None);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        ranges
            .iter()
            .zip(&self.generators)
            .map(|(r, g)| match *r {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(AlgebraError::InfiniteWindow(g.name.clone())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b) - if b < 0 && a.rem_euclid(b) != 0 { 1 } else { 0 }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}
