//! Exact integer and rational linear algebra: Hermite and Smith normal forms,
//! saturated subspaces with canonical bases, and projected lattices.
//!
//! Conventions used throughout the crate: vectors are `Vec<Int>`/`Vec<Rat>`,
//! matrices act on column vectors, and a list of vectors (generators, basis)
//! is stored as the rows of a matrix.

use crate::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_rat(a: &[Int], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

pub fn int_to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntMatrix[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&v| Int::from(v)));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_int_rows(rows: &[Vec<Int>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Int {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Int) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Int] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.at(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut m = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut s = Int::zero();
                for k in 0..self.cols {
                    s += self.at(r, k) * other.at(k, c);
                }
                m.set(r, c, s);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_vec_rat(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|r| dot_int_rat(self.row(r), v)).collect()
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.at(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &Int) {
        for c in 0..self.cols {
            let v = self.at(dst, c) + f * self.at(src, c);
            self.set(dst, c, v);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// col[dst] += f * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, f: &Int) {
        for r in 0..self.rows {
            let v = self.at(r, dst) + f * self.at(r, src);
            self.set(r, dst, v);
        }
    }
}

/// Dense rational matrix, row major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RatMatrix[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?}", self.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        RatMatrix { rows: r, cols: c, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.at(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut m = RatMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut s = Rat::zero();
                for k in 0..self.cols {
                    s += self.at(r, k) * other.at(k, c);
                }
                m.set(r, c, s);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|r| dot_rat(self.row(r), v)).collect()
    }

    /// Reduced row echelon form; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for pc in 0..self.cols {
            if pr >= self.rows {
                break;
            }
            let Some(nz) = (pr..self.rows).find(|&r| !self.at(r, pc).is_zero()) else {
                continue;
            };
            self.data_swap_rows(pr, nz);
            let inv = self.at(pr, pc).recip();
            for c in 0..self.cols {
                let v = self.at(pr, c) * &inv;
                self.set(pr, c, v);
            }
            for r in 0..self.rows {
                if r != pr && !self.at(r, pc).is_zero() {
                    let f = self.at(r, pc).clone();
                    for c in 0..self.cols {
                        let v = self.at(r, c) - &f * self.at(pr, c);
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        pivots
    }

    fn data_swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for p in 0..n {
            let Some(nz) = (p..n).find(|&r| !m.at(r, p).is_zero()) else {
                return Rat::zero();
            };
            if nz != p {
                m.data_swap_rows(p, nz);
                det = -det;
            }
            let pivot = m.at(p, p).clone();
            det *= &pivot;
            for r in p + 1..n {
                if !m.at(r, p).is_zero() {
                    let f = m.at(r, p) / &pivot;
                    for c in p..n {
                        let v = m.at(r, c) - &f * m.at(p, c);
                        m.set(r, c, v);
                    }
                }
            }
        }
        det
    }

    /// Unique solution of `self * x = b`; `None` if inconsistent or if the
    /// solution is not unique.
    pub fn solve_unique(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        if pivots.len() < self.cols {
            return None; // underdetermined
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, Rat::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut inv = RatMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.at(r, n + c).clone());
            }
        }
        Some(inv)
    }
}

/// Row-style Hermite normal form.  Returns `(h, u)` with `h = u * m`,
/// `u` unimodular, pivot entries positive, entries above each pivot reduced
/// into `[0, pivot)`, zero rows at the bottom.  The result is the canonical
/// representative of the row span: any two row-equivalent matrices produce
/// bit-identical `h`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.nrows());
    let rows = m.nrows();
    let cols = m.ncols();
    let mut pr = 0;
    for pc in 0..cols {
        if pr >= rows {
            break;
        }
        if (pr..rows).all(|r| h.at(r, pc).is_zero()) {
            continue;
        }
        // euclidean elimination below the pivot row
        loop {
            let mut best: Option<usize> = None;
            for r in pr..rows {
                if !h.at(r, pc).is_zero()
                    && best.map_or(true, |b| h.at(r, pc).abs() < h.at(b, pc).abs())
                {
                    best = Some(r);
                }
            }
            let b = best.unwrap();
            h.swap_rows(pr, b);
            u.swap_rows(pr, b);
            let mut done = true;
            let pivot = h.at(pr, pc).clone();
            for r in pr + 1..rows {
                if !h.at(r, pc).is_zero() {
                    let q = h.at(r, pc).div_floor(&pivot);
                    let f = -q;
                    h.add_row_multiple(r, pr, &f);
                    u.add_row_multiple(r, pr, &f);
                    if !h.at(r, pc).is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h.at(pr, pc).is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        let pivot = h.at(pr, pc).clone();
        for r in 0..pr {
            let q = h.at(r, pc).div_floor(&pivot);
            if !q.is_zero() {
                let f = -q;
                h.add_row_multiple(r, pr, &f);
                u.add_row_multiple(r, pr, &f);
            }
        }
        pr += 1;
    }
    (h, u)
}

/// Smith normal form.  Returns `(d, p, q)` with `d = p * m * q`, `p`, `q`
/// unimodular, `d` diagonal with nonnegative entries and `d[i] | d[i+1]`.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut a = m.clone();
    let mut p = IntMatrix::identity(m.nrows());
    let mut q = IntMatrix::identity(m.ncols());
    let n = m.nrows().min(m.ncols());
    for t in 0..n {
        'place: loop {
            // smallest nonzero entry of the trailing submatrix into (t, t)
            let mut best: Option<(usize, usize)> = None;
            for r in t..a.nrows() {
                for c in t..a.ncols() {
                    if !a.at(r, c).is_zero()
                        && best.map_or(true, |(br, bc)| a.at(r, c).abs() < a.at(br, bc).abs())
                    {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else {
                break 'place; // trailing submatrix is zero
            };
            a.swap_rows(t, br);
            p.swap_rows(t, br);
            a.swap_cols(t, bc);
            q.swap_cols(t, bc);
            let pivot = a.at(t, t).clone();
            let mut clean = true;
            for r in t + 1..a.nrows() {
                if !a.at(r, t).is_zero() {
                    let f = -a.at(r, t).div_floor(&pivot);
                    a.add_row_multiple(r, t, &f);
                    p.add_row_multiple(r, t, &f);
                    if !a.at(r, t).is_zero() {
                        clean = false;
                    }
                }
            }
            for c in t + 1..a.ncols() {
                if !a.at(t, c).is_zero() {
                    let f = -a.at(t, c).div_floor(&pivot);
                    a.add_col_multiple(c, t, &f);
                    q.add_col_multiple(c, t, &f);
                    if !a.at(t, c).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'place;
            }
            // divisibility: pivot must divide every trailing entry
            let pivot = a.at(t, t).clone();
            for r in t + 1..a.nrows() {
                for c in t + 1..a.ncols() {
                    if !a.at(r, c).mod_floor(&pivot).is_zero() {
                        let one = Int::one();
                        a.add_row_multiple(t, r, &one);
                        p.add_row_multiple(t, r, &one);
                        continue 'place;
                    }
                }
            }
            break 'place;
        }
        if a.at(t, t).is_negative() {
            a.negate_row(t);
            p.negate_row(t);
        }
    }
    (a, p, q)
}

/// Primitive generator of the ray through a nonzero integer vector: divide by
/// the gcd of the entries, keeping orientation.
pub fn primitive(v: &[Int]) -> Result<Vec<Int>> {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Primitive integer generator of the ray through a nonzero rational vector.
pub fn primitive_of_rat(v: &[Rat]) -> Result<Vec<Int>> {
    let mut denom = Int::one();
    for x in v {
        denom = denom.lcm(x.denom());
    }
    let ints: Vec<Int> = v
        .iter()
        .map(|x| x.numer() * (&denom / x.denom()))
        .collect();
    primitive(&ints)
}

/// Saturated integer basis of the kernel `{ x : m x = 0 }`, rows in canonical
/// Hermite form.
pub fn kernel_saturated(m: &IntMatrix) -> IntMatrix {
    let (d, _p, q) = snf(m);
    let n = m.ncols();
    let mut rank = 0;
    for t in 0..m.nrows().min(n) {
        if !d.at(t, t).is_zero() {
            rank += 1;
        }
    }
    if rank == n {
        return IntMatrix::zeros(0, n);
    }
    // kernel = span of the last n - rank columns of q
    let mut rows = Vec::new();
    for c in rank..n {
        rows.push((0..n).map(|r| q.at(r, c).clone()).collect::<Vec<_>>());
    }
    let (h, _) = hnf(&IntMatrix::from_int_rows(&rows));
    // q is unimodular, so the kernel rows are independent and h has no zero rows
    debug_assert!((0..h.nrows()).all(|r| h.row(r).iter().any(|x| !x.is_zero())));
    h
}

/// LLL-reduced basis of the lattice generated by the rows, which must be
/// independent.  Exact rational Gram-Schmidt with the 3/4 Lovász condition;
/// fully deterministic so downstream decompositions stay reproducible.
pub fn lll_reduce(m: &IntMatrix) -> IntMatrix {
    let n = m.nrows();
    if n <= 1 {
        return m.clone();
    }
    let mut b = m.row_vecs();
    // orthogonalization of the current rows: returns (b*, mu, |b*|^2)
    let gso = |b: &[Vec<Int>]| {
        let mut star: Vec<Vec<Rat>> = Vec::with_capacity(n);
        let mut mu = vec![vec![Rat::zero(); n]; n];
        let mut norm = vec![Rat::zero(); n];
        for i in 0..n {
            let mut v = int_to_rat_vec(&b[i]);
            for j in 0..i {
                let m_ij = dot_int_rat(&b[i], &star[j]) / &norm[j];
                for (x, s) in v.iter_mut().zip(&star[j]) {
                    *x -= &m_ij * s;
                }
                mu[i][j] = m_ij;
            }
            norm[i] = dot_rat(&v, &v);
            debug_assert!(!norm[i].is_zero(), "lll_reduce needs independent rows");
            star.push(v);
        }
        (star, mu, norm)
    };
    let lovasz = rat(3, 4);
    let mut k = 1;
    while k < n {
        let (star, _, norm) = gso(&b);
        for j in (0..k).rev() {
            let m_kj = dot_int_rat(&b[k], &star[j]) / &norm[j];
            let r = m_kj.round().to_integer();
            if !r.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
            }
        }
        let (_, mu, norm) = gso(&b);
        let m2 = &mu[k][k - 1] * &mu[k][k - 1];
        if norm[k] >= (&lovasz - m2) * &norm[k - 1] {
            k += 1;
        } else {
            b.swap(k - 1, k);
            k = k.saturating_sub(1).max(1);
        }
    }
    IntMatrix::from_int_rows(&b)
}

/// A rational linear subspace of `Q^ambient`, stored as the saturated lattice
/// `L ∩ Z^ambient` in canonical Hermite form.  Construction always saturates,
/// so equal subspaces compare equal bit for bit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: IntMatrix, // dim x ambient, canonical HNF rows, saturated
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: IntMatrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: IntMatrix::identity(ambient) }
    }

    /// Span of the given rational rows, saturated.
    pub fn from_rows(ambient: usize, rows: &[Vec<Rat>]) -> Self {
        let mut int_rows = Vec::new();
        for row in rows {
            assert_eq!(row.len(), ambient, "generator has wrong length");
            if row.iter().all(|x| x.is_zero()) {
                continue;
            }
            int_rows.push(primitive_of_rat(row).expect("nonzero row"));
        }
        if int_rows.is_empty() {
            return Subspace::zero(ambient);
        }
        let m = IntMatrix::from_int_rows(&int_rows);
        // saturate: the row span equals the kernel of its own kernel
        let basis = kernel_saturated(&kernel_saturated(&m));
        Subspace { ambient, basis }
    }

    pub fn from_int_rows(ambient: usize, rows: &[Vec<Int>]) -> Self {
        let rat_rows: Vec<Vec<Rat>> = rows.iter().map(|r| int_to_rat_vec(r)).collect();
        Subspace::from_rows(ambient, &rat_rows)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Canonical saturated basis, one lattice basis vector of `L ∩ Z^d` per row.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Subspace::from_int_rows(self.ambient, &rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        // L1 ∩ L2 = annihilator of (ann L1 + ann L2)
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.coords(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        (0..other.basis.nrows())
            .all(|r| self.contains_vector(&int_to_rat_vec(other.basis.row(r))))
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v ∉ L`.
    pub fn coords(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        if self.dim() == 0 {
            return if v.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
        }
        self.basis.to_rat().transpose().solve_unique(v)
    }

    /// The annihilator `{ φ : <φ, x> = 0 for all x ∈ L }` in dual coordinates.
    pub fn annihilator(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient);
        }
        let basis = kernel_saturated(&self.basis);
        Subspace { ambient: self.ambient, basis }
    }

    pub fn projected_lattice(&self) -> ProjectedLattice {
        projected_lattice(self)
    }
}

/// Data of the projection `V -> V/L` with its lattice structure: `proj` maps
/// `x` to the coordinate vector of its class in a basis of `Λ/(Λ∩L)`, and the
/// rows of `section` are integer representatives of that basis (so
/// `proj * section^T = identity` and `proj` kills `L`).
#[derive(Clone, Debug)]
pub struct ProjectedLattice {
    pub ell: usize,
    pub q: usize,
    pub proj: IntMatrix,    // q x d
    pub section: IntMatrix, // q x d, rows are lifts
}

pub fn projected_lattice(l: &Subspace) -> ProjectedLattice {
    let d = l.ambient();
    let ell = l.dim();
    let q = d - ell;
    if ell == 0 {
        return ProjectedLattice {
            ell,
            q,
            proj: IntMatrix::identity(d),
            section: IntMatrix::identity(d),
        };
    }
    if q == 0 {
        return ProjectedLattice {
            ell,
            q,
            proj: IntMatrix::zeros(0, d),
            section: IntMatrix::zeros(0, d),
        };
    }
    // d_mat = p * basis * qm with d_mat = [I 0]; rows of qm^{-1} form a basis
    // of Z^d whose first `ell` rows span L ∩ Z^d
    let (d_mat, _p, qm) = snf(l.basis());
    for t in 0..ell {
        debug_assert!(d_mat.at(t, t).is_one(), "saturated basis must have unit invariant factors");
    }
    let qinv = qm
        .to_rat()
        .inverse()
        .expect("unimodular matrix is invertible");
    let mut section_rows = Vec::new();
    for r in ell..d {
        let row: Vec<Int> = (0..d)
            .map(|c| {
                let v = qinv.at(r, c);
                debug_assert!(v.is_integer(), "inverse of unimodular matrix is integral");
                v.to_integer()
            })
            .collect();
        section_rows.push(row);
    }
    // coordinates in the qinv-row basis are x * qm (row convention), so the
    // class coordinates are the last q columns of qm, transposed
    let mut proj_rows = Vec::new();
    for c in ell..d {
        proj_rows.push((0..d).map(|r| qm.at(r, c).clone()).collect::<Vec<_>>());
    }
    ProjectedLattice {
        ell,
        q,
        proj: IntMatrix::from_int_rows(&proj_rows),
        section: IntMatrix::from_int_rows(&section_rows),
    }
}
