//! Dense linear algebra over the prime field F_p.
//!
//! Matrices are small (a handful of rows per trigrade in every computation this
//! crate performs), so everything is a dense row-major `Vec<u32>` with eager
//! reduction mod p. All choices of basis are made from reduced row echelon
//! pivot structure, which keeps every output reproducible.

use std::fmt;

use thiserror::Error;

/// Errors raised by the linear algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("COMPOSITION_NONZERO: d_out * d_in has {nonzero} nonzero entries")]
    CompositionNonzero { nonzero: usize },
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduces a signed integer into `[0, p)`.
#[inline]
pub fn reduce(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Multiplicative inverse of a nonzero residue.
pub fn inverse(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

/// A matrix over F_p with entries stored reduced in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    pub fn identity(p: u32, n: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix from signed row data, reducing every entry mod p.
    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(p, rows.len(), cols)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                m.data[i * cols + j] = reduce(x, p);
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(p, rows, columns.len())?;
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LinalgError::Shape(format!(
                    "column {j} has {} entries, expected {rows}",
                    col.len()
                )));
            }
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u32) {
        self.data[row * self.cols + col] = value % self.p;
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self {
            p: self.p,
            rows: self.cols,
            cols: self.rows,
            data: vec![0; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows || self.p != other.p {
            return Err(LinalgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p as u64;
        let mut out = Self::zeros(self.p, self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let p = self.p as u64;
        (0..self.rows)
            .map(|i| {
                let s: u64 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    /// Element-wise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols || self.p != other.p {
            return Err(LinalgError::Shape("subtraction of differently shaped matrices".into()));
        }
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(&other.data) {
            *x = (*x + self.p - y) % self.p;
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form and the strictly increasing list of pivot columns.
pub fn rref(m: &FpMatrix) -> (FpMatrix, Vec<usize>) {
    let p = m.p as u64;
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(pivot) = (row..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        a.swap_rows(row, pivot);
        let inv = inverse(a.get(row, col), m.p) as u64;
        for j in col..a.cols {
            let idx = row * a.cols + j;
            a.data[idx] = (a.data[idx] as u64 * inv % p) as u32;
        }
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a.get(r, col) as u64;
            if factor == 0 {
                continue;
            }
            for j in col..a.cols {
                let sub = factor * a.get(row, j) as u64 % p;
                let idx = r * a.cols + j;
                a.data[idx] = ((a.data[idx] as u64 + p - sub) % p) as u32;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// A basis of the null space `{v : m v = 0}`, one vector per free column in
/// increasing column order, each with a 1 in its free column.
pub fn kernel_basis(m: &FpMatrix) -> Vec<Vec<u32>> {
    let (r, pivots) = rref(m);
    let p = m.p;
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u32; m.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                let x = r.get(i, free);
                v[pc] = (p - x) % p;
            }
            v
        })
        .collect()
}

/// Cokernel of `m : F_p^cols -> F_p^rows`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cokernel {
    /// Codomain coordinates whose standard basis vectors represent the cokernel.
    pub representatives: Vec<usize>,
    /// `representatives.len() x rows`; sends a codomain vector to its class.
    pub projection: FpMatrix,
}

pub fn cokernel_basis(m: &FpMatrix) -> Cokernel {
    let image = Echelon::from_vectors(m.p, m.rows, (0..m.cols).map(|j| m.column(j)));
    let representatives: Vec<usize> = (0..m.rows).filter(|&i| !image.is_pivot(i)).collect();
    let mut projection = FpMatrix::zeros(m.p, representatives.len(), m.rows).expect("prime checked");
    for i in 0..m.rows {
        let mut e = vec![0u32; m.rows];
        e[i] = 1;
        let reduced = image.reduce(e);
        for (k, &rep) in representatives.iter().enumerate() {
            projection.set(k, i, reduced[rep]);
        }
    }
    Cokernel {
        representatives,
        projection,
    }
}

/// `ker(d_out) / im(d_in)` with a chosen basis of cycle representatives.
#[derive(Debug, Clone)]
pub struct Homology {
    boundaries: Echelon,
    classes: Echelon,
    /// Cycle representatives, reduced modulo the boundaries.
    pub basis: Vec<Vec<u32>>,
}

impl Homology {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a cycle in terms of `basis`, or `None` if `v` is not a
    /// cycle of the form (combination of basis) + boundary.
    pub fn project(&self, v: &[u32]) -> Option<Vec<u32>> {
        let reduced = self.boundaries.reduce(v.to_vec());
        self.classes.coordinates(&reduced)
    }
}

pub fn homology_basis(d_in: &FpMatrix, d_out: &FpMatrix) -> Result<Homology, LinalgError> {
    if d_in.rows != d_out.cols || d_in.p != d_out.p {
        return Err(LinalgError::Shape(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    let composite = d_out.mul(d_in)?;
    if !composite.is_zero() {
        let nonzero = composite.data.iter().filter(|&&x| x != 0).count();
        return Err(LinalgError::CompositionNonzero { nonzero });
    }
    let dim = d_in.rows;
    let boundaries = Echelon::from_vectors(d_in.p, dim, (0..d_in.cols).map(|j| d_in.column(j)));
    let mut classes = Echelon::new(d_in.p, dim);
    let mut basis = Vec::new();
    for z in kernel_basis(d_out) {
        let z = boundaries.reduce(z);
        if classes.insert(z.clone()) {
            basis.push(z);
        }
    }
    Ok(Homology {
        boundaries,
        classes,
        basis,
    })
}

/// An incrementally built row echelon basis of a subspace of F_p^dim.
///
/// Rows are kept fully reduced: every stored row has a leading 1 and zeros in
/// all other rows' pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    p: u32,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    /// For every stored row, the combination of inserted vectors it equals.
    origin: Vec<Vec<u32>>,
    inserted: usize,
}

impl Echelon {
    pub fn new(p: u32, dim: usize) -> Self {
        Self {
            p,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
            origin: Vec::new(),
            inserted: 0,
        }
    }

    pub fn from_vectors(p: u32, dim: usize, vectors: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut e = Self::new(p, dim);
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains(&col)
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Eliminates all pivot columns from `v`.
    pub fn reduce(&self, mut v: Vec<u32>) -> Vec<u32> {
        self.reduce_tracking(&mut v, None);
        v
    }

    fn reduce_tracking(&self, v: &mut [u32], mut track: Option<&mut Vec<u32>>) {
        let p = self.p as u64;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let factor = v[pc] as u64;
            if factor == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = ((*x as u64 + p - factor * r as u64 % p) % p) as u32;
            }
            if let Some(t) = track.as_deref_mut() {
                let idx = self.pivots.iter().position(|&c| c == pc).unwrap();
                for (x, &o) in t.iter_mut().zip(&self.origin[idx]) {
                    *x = ((*x as u64 + p - factor * o as u64 % p) % p) as u32;
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v.to_vec()).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.dim, "vector length must match ambient dimension");
        let p = self.p as u64;
        let index = self.inserted;
        self.inserted += 1;
        for o in &mut self.origin {
            o.push(0);
        }
        let mut v: Vec<u32> = v.into_iter().map(|x| x % self.p).collect();
        let mut track = vec![0u32; self.inserted];
        track[index] = 1;
        self.reduce_tracking(&mut v, Some(&mut track));
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inverse(v[pc], self.p) as u64;
        for x in v.iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        for x in track.iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        // clear the new pivot from existing rows
        for (row, origin) in self.rows.iter_mut().zip(self.origin.iter_mut()) {
            let factor = row[pc] as u64;
            if factor == 0 {
                continue;
            }
            for (x, &r) in row.iter_mut().zip(&v) {
                *x = ((*x as u64 + p - factor * r as u64 % p) % p) as u32;
            }
            for (x, &t) in origin.iter_mut().zip(&track) {
                *x = ((*x as u64 + p - factor * t as u64 % p) % p) as u32;
            }
        }
        let pos = self.pivots.partition_point(|&c| c < pc);
        self.pivots.insert(pos, pc);
        self.rows.insert(pos, v);
        self.origin.insert(pos, track);
        true
    }

    /// Coordinates of `v` with respect to the inserted vectors that raised the
    /// rank (in insertion order), or `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let p = self.p as u64;
        let mut combo = vec![0u32; self.inserted];
        let mut rest = v.to_vec();
        for (i, (row, &pc)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let factor = rest[pc] as u64;
            if factor == 0 {
                continue;
            }
            for (x, &r) in rest.iter_mut().zip(row) {
                *x = ((*x as u64 + p - factor * r as u64 % p) % p) as u32;
            }
            for (x, &o) in combo.iter_mut().zip(&self.origin[i]) {
                *x = ((*x as u64 + factor * o as u64) % p) as u32;
            }
        }
        if rest.iter().any(|&x| x != 0) {
            return None;
        }
        // restrict to the inserted vectors that were independent, in insertion order
        let independent = self.independent_insertions();
        Some(independent.iter().map(|&k| combo[k]).collect())
    }

    fn independent_insertions(&self) -> Vec<usize> {
        // an insertion is independent iff it appears with nonzero weight in
        // the origin of some row after elimination; track by replaying
        let mut used = vec![false; self.inserted];
        for o in &self.origin {
            for (k, &x) in o.iter().enumerate() {
                if x != 0 {
                    used[k] = true;
                }
            }
        }
        (0..self.inserted).filter(|&k| used[k]).collect()
    }
}
