//! Trigraded spectral sequences driven by symbolic differential rules.
//!
//! A page stores, per trigrade cell, the ambient E_1 monomials, the span of
//! all boundaries created so far, and canonical cycle representatives modulo
//! those boundaries. A rule assigns `d_r` on powers of single generators; the
//! engine closes it under the signed Leibniz rule and applies it to the
//! representatives at chain level.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraPresentation, Element, GeneratorKind, Monomial, Trigrade, Window};
use crate::linalg::{homology_basis, Echelon, FpMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("BIDEGREE_MISMATCH: page {page} image of {source_label} sits at {found}, expected {expected}")]
    BidegreeMismatch {
        page: u32,
        source_label: String,
        expected: Trigrade,
        found: Trigrade,
    },
    #[error("page {0} already carries a rule")]
    DuplicatePage(u32),
    #[error("rule on page {page} is invalid: {reason}")]
    InvalidRule { page: u32, reason: String },
    #[error("WINDOW_TOO_SMALL: page {page} differential at {cell} leaves the computation window; enlarge the window")]
    WindowTooSmall { page: u32, cell: Trigrade },
    #[error("page {page}: image of a class at {source_cell} is not a cycle modulo boundaries")]
    InconsistentRule { page: u32, source_cell: Trigrade },
    #[error("page {page}: dimension bookkeeping failed")]
    Bookkeeping { page: u32 },
    #[error("COMPOSITION_NONZERO: d_{page} squared is nonzero at {cell}")]
    CompositionNonzero { page: u32, cell: Trigrade },
}

/// Affine dependence of a differential's tridegree change on the page `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialShift {
    pub degree: i64,
    pub weight: i64,
    #[serde(default)]
    pub weight_per_page: i64,
    #[serde(default)]
    pub filtration: i64,
    #[serde(default)]
    pub filtration_per_page: i64,
}

impl DifferentialShift {
    /// `d_r : (n, s, f) -> (n - 1, s + 1, f + r)`.
    pub const fn bockstein() -> Self {
        Self {
            degree: -1,
            weight: 1,
            weight_per_page: 0,
            filtration: 0,
            filtration_per_page: 1,
        }
    }

    /// `d_r : (n, s) -> (n - 1, s + r)`.
    pub const fn motivic() -> Self {
        Self {
            degree: -1,
            weight: 0,
            weight_per_page: 1,
            filtration: 0,
            filtration_per_page: 0,
        }
    }

    pub fn delta(&self, r: u32) -> Trigrade {
        let r = r as i64;
        Trigrade::new(
            self.degree,
            self.weight + self.weight_per_page * r,
            self.filtration + self.filtration_per_page * r,
        )
    }

    pub fn target(&self, t: Trigrade, r: u32) -> Trigrade {
        let d = self.delta(r);
        Trigrade::new(t.degree + d.degree, t.weight + d.weight, t.filtration + d.filtration)
    }

    pub fn source(&self, t: Trigrade, r: u32) -> Trigrade {
        let d = self.delta(r);
        Trigrade::new(t.degree - d.degree, t.weight - d.weight, t.filtration - d.filtration)
    }
}

/// `d(g^unit) = image`, extended to `d(g^e) = q g^{e - unit} image` with
/// `q = floor(e / unit)` for every exponent `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorAction {
    pub generator: usize,
    pub unit: i64,
    pub image: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialRule {
    pub page: u32,
    pub actions: Vec<FactorAction>,
}

impl DifferentialRule {
    pub fn new(page: u32) -> Self {
        Self {
            page,
            actions: Vec::new(),
        }
    }

    pub fn with_action(mut self, generator: usize, unit: i64, image: Element) -> Self {
        self.actions.push(FactorAction { generator, unit, image });
        self
    }
}

#[derive(Debug, Clone)]
pub struct SpectralSequence {
    algebra: AlgebraPresentation,
    shift: DifferentialShift,
    rules: Vec<DifferentialRule>,
    r_max: u32,
}

impl SpectralSequence {
    pub fn new(algebra: AlgebraPresentation, shift: DifferentialShift, r_max: u32) -> Self {
        Self {
            algebra,
            shift,
            rules: Vec::new(),
            r_max,
        }
    }

    pub fn algebra(&self) -> &AlgebraPresentation {
        &self.algebra
    }

    pub fn shift(&self) -> DifferentialShift {
        self.shift
    }

    pub fn rules(&self) -> &[DifferentialRule] {
        &self.rules
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    /// Registers a rule after checking that every image has the tridegree its
    /// source prescribes.
    pub fn add_rule(&mut self, rule: DifferentialRule) -> Result<(), EngineError> {
        if rule.page == 0 {
            return Err(EngineError::InvalidRule {
                page: 0,
                reason: "pages start at 1".into(),
            });
        }
        if self.rules.iter().any(|r| r.page == rule.page) {
            return Err(EngineError::DuplicatePage(rule.page));
        }
        for action in &rule.actions {
            let Some(g) = self.algebra.generators().get(action.generator) else {
                return Err(EngineError::InvalidRule {
                    page: rule.page,
                    reason: format!("generator index {} out of range", action.generator),
                });
            };
            if action.unit < 1 || (g.kind == GeneratorKind::Exterior && action.unit != 1) {
                return Err(EngineError::InvalidRule {
                    page: rule.page,
                    reason: format!("unit {} is not allowed for {}", action.unit, g.name),
                });
            }
            if rule.actions.iter().filter(|a| a.generator == action.generator).count() > 1 {
                return Err(EngineError::InvalidRule {
                    page: rule.page,
                    reason: format!("{} is matched twice", g.name),
                });
            }
            let source = self.algebra.one().with_exponent(action.generator, action.unit);
            let expected = self.shift.target(self.algebra.trigrade(&source), rule.page);
            for (m, _) in action.image.terms() {
                if !self.algebra.is_valid(m) {
                    return Err(EngineError::InvalidRule {
                        page: rule.page,
                        reason: format!("image term {} is not a basis monomial", self.algebra.label(m)),
                    });
                }
                let found = self.algebra.trigrade(m);
                if found != expected {
                    return Err(EngineError::BidegreeMismatch {
                        page: rule.page,
                        source_label: self.algebra.label(&source),
                        expected,
                        found,
                    });
                }
            }
        }
        let pos = self.rules.partition_point(|r| r.page < rule.page);
        self.rules.insert(pos, rule);
        Ok(())
    }

    pub fn rule_on_page(&self, page: u32) -> Option<&DifferentialRule> {
        self.rules.iter().find(|r| r.page == page)
    }

    /// Chain-level `d` of a monomial under `rule`, via
    /// `d(x y) = d(x) y + (-1)^{|x|} x d(y)` across generator factors.
    pub fn apply_rule(&self, rule: &DifferentialRule, m: &Monomial) -> Element {
        let alg = &self.algebra;
        let p = alg.prime();
        let mut out = Element::zero();
        for action in &rule.actions {
            let i = action.generator;
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let q = e.div_euclid(action.unit);
            if q.rem_euclid(p as i64) == 0 {
                continue;
            }
            let mut prefix = alg.one();
            let mut rest = alg.one();
            for j in 0..alg.len() {
                match j.cmp(&i) {
                    std::cmp::Ordering::Less => prefix = prefix.with_exponent(j, m.exponent(j)),
                    std::cmp::Ordering::Equal => rest = rest.with_exponent(j, e - action.unit),
                    std::cmp::Ordering::Greater => rest = rest.with_exponent(j, m.exponent(j)),
                }
            }
            let sign = if alg.degree(&prefix).rem_euclid(2) == 1 { -1 } else { 1 };
            let left = Element::from_monomial(prefix, 1, p);
            let right = Element::from_monomial(rest, 1, p);
            let term = alg.multiply_elements(&alg.multiply_elements(&left, &action.image), &right);
            out.add_scaled(&term, q * sign, p);
        }
        out
    }

    pub fn apply_rule_element(&self, rule: &DifferentialRule, x: &Element) -> Element {
        let p = self.algebra.prime();
        let mut out = Element::zero();
        for (m, c) in x.terms() {
            out.add_scaled(&self.apply_rule(rule, m), c as i64, p);
        }
        out
    }

    /// The E_1 page on a window.
    pub fn initial_page(&self, window: &Window) -> Result<Page, EngineError> {
        let p = self.algebra.prime();
        let mut ambients: BTreeMap<Trigrade, Vec<Monomial>> = BTreeMap::new();
        for m in self.algebra.basis_in_window(window)? {
            ambients.entry(self.algebra.trigrade(&m)).or_default().push(m);
        }
        let cells = ambients
            .into_iter()
            .map(|(t, ambient)| {
                let dim = ambient.len();
                let reps: Vec<Vec<u32>> = (0..dim)
                    .map(|i| {
                        let mut v = vec![0; dim];
                        v[i] = 1;
                        v
                    })
                    .collect();
                (t, Cell::new(p, ambient, Echelon::new(p, dim), reps))
            })
            .collect();
        Ok(Page {
            r: 1,
            p,
            window: *window,
            cells,
            matrices: BTreeMap::new(),
        })
    }

    /// Runs on an explicit computation window, reporting on `report`.
    pub fn run_in_window(&self, computation: &Window, report: &Window) -> Result<RunResult, EngineError> {
        if !computation.encloses(report) {
            return Err(EngineError::WindowTooSmall {
                page: 1,
                cell: Trigrade::new(report.degree.0, 0, 0),
            });
        }
        let mut runner = Runner {
            ss: self,
            tainted: BTreeSet::new(),
            outside: HashMap::new(),
        };
        let mut page = self.initial_page(computation)?;
        let mut log = Vec::new();
        let mut turns = Vec::new();
        let mut last_nonzero = 0;
        for rule in &self.rules {
            page.r = rule.page;
            let (next, _, entries, summary) = runner.turn(&page, rule)?;
            if let Some(cell) = report_cell_tainted(&runner.tainted, report) {
                return Err(EngineError::WindowTooSmall { page: rule.page, cell });
            }
            if entries.iter().any(|e| e.rank > 0) {
                last_nonzero = rule.page;
            }
            log.extend(entries.into_iter().filter(|e| report.contains(e.source) || report.contains(e.target)));
            turns.push(summary);
            page = next;
        }
        let last_rule = self.rules.last().map_or(0, |r| r.page);
        page.r = last_rule.max(self.r_max) + 1;
        let e_infinity = page.restricted(report);
        let cells: Vec<Trigrade> = e_infinity.cells.iter().filter(|(_, c)| c.dimension() > 0).map(|(t, _)| *t).collect();
        let no_room = no_room_report(&cells, &self.shift, last_rule + 1..=self.r_max);
        Ok(RunResult {
            e_infinity,
            log,
            turns,
            collapse_page: last_nonzero + 1,
            no_room,
            computation_window: *computation,
            report_window: *report,
        })
    }

    /// Runs with a computation window grown from `report` by the total
    /// distance differentials can travel.
    pub fn run(&self, report: &Window) -> Result<RunResult, EngineError> {
        self.run_in_window(&self.closure(report), report)
    }

    pub fn closure(&self, report: &Window) -> Window {
        let (mut dd, mut dw, mut df) = (0, 0, 0);
        for rule in &self.rules {
            let d = self.shift.delta(rule.page);
            dd += d.degree.abs();
            dw += d.weight.abs();
            df += d.filtration.abs();
        }
        report.expanded(dd + 1, dw + 1, df + 1)
    }
}

fn report_cell_tainted(tainted: &BTreeSet<Trigrade>, report: &Window) -> Option<Trigrade> {
    tainted.iter().copied().find(|t| report.contains(*t))
}

/// One trigrade of a page.
#[derive(Debug, Clone)]
pub struct Cell {
    ambient: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    boundaries: Echelon,
    reps: Vec<Vec<u32>>,
    classes: Echelon,
}

impl Cell {
    fn new(p: u32, ambient: Vec<Monomial>, boundaries: Echelon, reps: Vec<Vec<u32>>) -> Self {
        let index = ambient.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = ambient.len();
        let mut canonical = Echelon::new(p, dim);
        for v in reps {
            canonical.insert(boundaries.reduce(v));
        }
        let reps = canonical.rows().to_vec();
        let classes = Echelon::from_vectors(p, dim, reps.iter().cloned());
        Self {
            ambient,
            index,
            boundaries,
            reps,
            classes,
        }
    }

    pub fn ambient(&self) -> &[Monomial] {
        &self.ambient
    }

    pub fn dimension(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Vec<u32>] {
        &self.reps
    }

    pub fn leading(&self, k: usize) -> &Monomial {
        let pivot = self.reps[k].iter().position(|&x| x != 0).expect("representatives are nonzero");
        &self.ambient[pivot]
    }

    fn element(&self, v: &[u32], p: u32) -> Element {
        let mut e = Element::zero();
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                e.add_term(self.ambient[i].clone(), c as i64, p);
            }
        }
        e
    }

    fn vector(&self, x: &Element) -> Option<Vec<u32>> {
        let mut v = vec![0u32; self.ambient.len()];
        for (m, c) in x.terms() {
            v[*self.index.get(m)?] = c;
        }
        Some(v)
    }

    /// Coordinates of an ambient vector on the representatives, if it lies in
    /// their span modulo boundaries.
    fn project(&self, v: Vec<u32>) -> Option<Vec<u32>> {
        self.classes.coordinates(&self.boundaries.reduce(v))
    }

    fn lift(&self, coords: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.ambient.len()];
        for (&c, rep) in coords.iter().zip(&self.reps) {
            if c == 0 {
                continue;
            }
            for (x, &r) in out.iter_mut().zip(rep) {
                *x = ((*x as u64 + c as u64 * r as u64) % p as u64) as u32;
            }
        }
        out
    }
}

/// A surviving class, named by the leading monomial of its representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageClass {
    pub trigrade: Trigrade,
    pub leading: Monomial,
    pub representative: Element,
}

#[derive(Debug, Clone)]
pub struct Page {
    pub r: u32,
    p: u32,
    pub window: Window,
    cells: BTreeMap<Trigrade, Cell>,
    /// `d_r` from each source trigrade, filled in while the page is turned.
    pub matrices: BTreeMap<Trigrade, FpMatrix>,
}

impl Page {
    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn cells(&self) -> &BTreeMap<Trigrade, Cell> {
        &self.cells
    }

    pub fn dimension(&self) -> usize {
        self.cells.values().map(Cell::dimension).sum()
    }

    pub fn dimension_at(&self, t: Trigrade) -> usize {
        self.cells.get(&t).map_or(0, Cell::dimension)
    }

    pub fn classes(&self) -> Vec<PageClass> {
        let mut out = Vec::new();
        for (t, cell) in &self.cells {
            for k in 0..cell.dimension() {
                out.push(PageClass {
                    trigrade: *t,
                    leading: cell.leading(k).clone(),
                    representative: cell.element(&cell.reps[k], self.p),
                });
            }
        }
        out
    }

    /// Coordinates of a homogeneous chain-level element on the classes of its
    /// cell, or `None` if it is not a cycle modulo boundaries here.
    pub fn class_of(&self, x: &Element, alg: &AlgebraPresentation) -> Option<Vec<u32>> {
        let t = alg.trigrade(x.terms().next()?.0);
        if x.terms().any(|(m, _)| alg.trigrade(m) != t) {
            return None;
        }
        let cell = self.cells.get(&t)?;
        cell.project(cell.vector(x)?)
    }

    pub fn restricted(&self, window: &Window) -> Page {
        Page {
            r: self.r,
            p: self.p,
            window: *window,
            cells: self
                .cells
                .iter()
                .filter(|(t, _)| window.contains(**t))
                .map(|(t, c)| (*t, c.clone()))
                .collect(),
            matrices: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub page: u32,
    pub source: Trigrade,
    pub target: Trigrade,
    pub rank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnSummary {
    pub page: u32,
    pub dimension_before: usize,
    pub dimension_after: usize,
    pub rank_sum: usize,
    /// False when an edge cell needed the tolerant homology path.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub e_infinity: Page,
    pub log: Vec<LogEntry>,
    pub turns: Vec<TurnSummary>,
    /// One more than the last page with a nonzero differential.
    pub collapse_page: u32,
    pub no_room: Vec<NoRoomCandidate>,
    pub computation_window: Window,
    pub report_window: Window,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NoRoomCandidate {
    pub page: u32,
    pub source: Trigrade,
    pub target: Trigrade,
}

/// Every `(r, source, target)` with occupied source and target under the shift.
pub fn no_room_report(
    occupied: &[Trigrade],
    shift: &DifferentialShift,
    pages: std::ops::RangeInclusive<u32>,
) -> Vec<NoRoomCandidate> {
    let set: BTreeSet<Trigrade> = occupied.iter().copied().collect();
    let mut out = Vec::new();
    for r in pages {
        for &s in &set {
            let t = shift.target(s, r);
            if set.contains(&t) {
                out.push(NoRoomCandidate { page: r, source: s, target: t });
            }
        }
    }
    out
}

/// `d_r` matrices of `rule` on `page`, keyed by source trigrade, ignoring
/// targets outside the page window.
pub fn leibniz_extend(
    ss: &SpectralSequence,
    rule: &DifferentialRule,
    page: &Page,
) -> Result<BTreeMap<Trigrade, FpMatrix>, EngineError> {
    let mut runner = Runner {
        ss,
        tainted: BTreeSet::new(),
        outside: HashMap::new(),
    };
    Ok(runner.matrices(page, rule, true)?.0)
}

struct Runner<'a> {
    ss: &'a SpectralSequence,
    tainted: BTreeSet<Trigrade>,
    outside: HashMap<Trigrade, bool>,
}

impl Runner<'_> {
    fn occupied_outside(&mut self, t: Trigrade) -> bool {
        if let Some(&b) = self.outside.get(&t) {
            return b;
        }
        let w = Window::degrees(t.degree, t.degree)
            .with_weight(t.weight, t.weight)
            .with_filtration(t.filtration, t.filtration);
        let b = self.ss.algebra.basis_in_window(&w).map_or(true, |v| !v.is_empty());
        self.outside.insert(t, b);
        b
    }

    /// Matrices of `d_r` and the set of cells touched by the window edge.
    #[allow(clippy::type_complexity)]
    fn matrices(
        &mut self,
        page: &Page,
        rule: &DifferentialRule,
        strict: bool,
    ) -> Result<(BTreeMap<Trigrade, FpMatrix>, BTreeSet<Trigrade>), EngineError> {
        let ss = self.ss;
        let p = page.p;
        let r = rule.page;
        let mut cache: HashMap<Monomial, Element> = HashMap::new();
        let mut matrices = BTreeMap::new();
        let mut edge = BTreeSet::new();
        for (&s, cell) in &page.cells {
            if cell.dimension() == 0 {
                continue;
            }
            let source = ss.shift.source(s, r);
            if !page.window.contains(source) && self.occupied_outside(source) {
                edge.insert(s);
            }
            let t = ss.shift.target(s, r);
            let images: Vec<Element> = cell
                .reps
                .iter()
                .map(|rep| {
                    let mut d = Element::zero();
                    for (i, &c) in rep.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        let m = &cell.ambient[i];
                        let dm = cache.entry(m.clone()).or_insert_with(|| ss.apply_rule(rule, m));
                        d.add_scaled(dm, c as i64, p);
                    }
                    d
                })
                .collect();
            if images.iter().all(Element::is_zero) {
                continue;
            }
            let Some(target) = page.cells.get(&t).filter(|_| page.window.contains(t)) else {
                if !page.window.contains(t) {
                    edge.insert(s);
                    continue;
                }
                return Err(EngineError::InconsistentRule { page: r, source_cell: s });
            };
            let tolerant = !strict || self.tainted.contains(&s) || self.tainted.contains(&t);
            let mut columns = Vec::with_capacity(images.len());
            for img in &images {
                let projected = target.vector(img).and_then(|v| target.project(v));
                match projected {
                    Some(c) => columns.push(c),
                    None if tolerant => columns.push(vec![0; target.dimension()]),
                    None => return Err(EngineError::InconsistentRule { page: r, source_cell: s }),
                }
            }
            let m = FpMatrix::from_columns(p, target.dimension(), &columns)?;
            if !m.is_zero() {
                matrices.insert(s, m);
            }
        }
        Ok((matrices, edge))
    }

    #[allow(clippy::type_complexity)]
    fn turn(
        &mut self,
        page: &Page,
        rule: &DifferentialRule,
    ) -> Result<(Page, BTreeMap<Trigrade, FpMatrix>, Vec<LogEntry>, TurnSummary), EngineError> {
        let ss = self.ss;
        let p = page.p;
        let r = rule.page;
        let (matrices, edge) = self.matrices(page, rule, true)?;

        let before = self.tainted.clone();
        let mut tainted = before.clone();
        tainted.extend(edge.iter().copied());
        for &s in matrices.keys() {
            let t = ss.shift.target(s, r);
            if before.contains(&s) || before.contains(&t) {
                tainted.insert(s);
                tainted.insert(t);
            }
        }

        let mut log = Vec::new();
        let mut rank_sum = 0;
        for (&s, m) in &matrices {
            let rank = m.rank();
            rank_sum += rank;
            log.push(LogEntry {
                page: r,
                source: s,
                target: ss.shift.target(s, r),
                rank,
            });
        }

        let mut exact = true;
        let mut cells = BTreeMap::new();
        for (&c, cell) in &page.cells {
            let k = cell.dimension();
            let source = ss.shift.source(c, r);
            let d_in = matrices
                .get(&source)
                .cloned()
                .unwrap_or_else(|| FpMatrix::zeros(p, k, 0).expect("prime"));
            let target = ss.shift.target(c, r);
            let d_out = matrices.get(&c).cloned().unwrap_or_else(|| {
                let rows = page.cells.get(&target).map_or(0, Cell::dimension);
                FpMatrix::zeros(p, rows, k).expect("prime")
            });
            let homology = match homology_basis(&d_in, &d_out) {
                Ok(h) => h,
                Err(LinalgError::CompositionNonzero { .. }) if tainted.contains(&c) => {
                    exact = false;
                    homology_basis(&FpMatrix::zeros(p, k, 0)?, &d_out)?
                }
                Err(LinalgError::CompositionNonzero { .. }) => {
                    return Err(EngineError::CompositionNonzero { page: r, cell: c })
                }
                Err(e) => return Err(e.into()),
            };
            let mut boundaries = cell.boundaries.clone();
            for j in 0..d_in.cols() {
                boundaries.insert(cell.lift(&d_in.column(j), p));
            }
            let reps: Vec<Vec<u32>> = homology.basis.iter().map(|h| cell.lift(h, p)).collect();
            cells.insert(c, Cell::new(p, cell.ambient.clone(), boundaries, reps));
        }
        self.tainted = tainted;

        let dimension_before = page.dimension();
        let next = Page {
            r: r + 1,
            p,
            window: page.window,
            cells,
            matrices: BTreeMap::new(),
        };
        let dimension_after = next.dimension();
        if exact && dimension_after + 2 * rank_sum != dimension_before {
            return Err(EngineError::Bookkeeping { page: r });
        }
        Ok((
            next,
            matrices,
            log,
            TurnSummary {
                page: r,
                dimension_before,
                dimension_after,
                rank_sum,
                exact,
            },
        ))
    }
}

/// Runs every rule in order on `window` and returns each page with its
/// differential matrices attached, followed by the final page.
pub fn pages(ss: &SpectralSequence, window: &Window) -> Result<Vec<Page>, EngineError> {
    let mut runner = Runner {
        ss,
        tainted: BTreeSet::new(),
        outside: HashMap::new(),
    };
    let mut page = ss.initial_page(window)?;
    let mut out = Vec::new();
    for rule in &ss.rules {
        page.r = rule.page;
        let (next, matrices, _, _) = runner.turn(&page, rule)?;
        page.matrices = matrices;
        out.push(page);
        page = next;
    }
    out.push(page);
    Ok(out)
}
