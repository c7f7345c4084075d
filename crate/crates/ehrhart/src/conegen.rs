//! Cone decompositions and truncated Laurent expansions of intermediate
//! generating functions of shifted simplicial cones.
//!
//! Two decompositions feed the series computation.  `adapt_to_subspace`
//! rewrites a full-dimensional simplicial cone as a signed sum of cells, each
//! having a face that spans the subspace `L`.  `unimodularize` is a signed
//! Barvinok decomposition into cones that are unimodular for a given lattice.
//! Both produce half-open cells and satisfy exact pointwise indicator
//! identities: the half-open flags are induced by one generic reference
//! vector `y` (a cell facet is open iff `y` lies strictly on its negative
//! side), which makes every exchange step an exact partition with no
//! lower-dimensional correction terms.
//!
//! `cell_series` expands `M^L(s(b), cell) = e^{-<ξ,s(b)>} S^L(s(b)+cell)` at
//! `ξ = t(ℓ+ερ)` as a bivariate Laurent series in `(t, ε)` whose coefficients
//! are step polynomials in the parameter `b`: the lattice sum over slices
//! factorizes over the transverse generators into Bernoulli-type factors
//! `e^{δx}/(1-e^x)` with fractional-part arguments `δ`, and the slice
//! integral contributes `|det| Π (-1/<ξ,w>)` over the `L`-part.

use crate::exactlin::{
    dot_rat, int_to_rat_vec, primitive_of_rat, projected_lattice, rat_int, Int, IntMatrix, Rat,
    RatMatrix, Subspace,
};
use crate::steppoly::{frac, rat_pow, LinearFormQ, QuasiPolynomial};
use crate::{Error, Result};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;

pub(crate) const GENERIC_PRIMES: [i64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// A simplicial cone with a half-open flag and an orientation sign per
/// generator: `x = Σ t_i g_i` lies in the cone iff `t_i > 0` where the flag
/// is open and `t_i ≥ 0` where it is closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOpenSimplicialCone {
    gens: IntMatrix, // r x d rows
    open: Vec<bool>,
    sign: i32,
}

impl HalfOpenSimplicialCone {
    /// Build from generator rows, primitivizing each ray.
    pub fn new(gens: &IntMatrix, open: Vec<bool>, sign: i32) -> Result<Self> {
        let mut rows = Vec::with_capacity(gens.nrows());
        for i in 0..gens.nrows() {
            rows.push(crate::exactlin::primitive(gens.row(i))?);
        }
        HalfOpenSimplicialCone::from_rows_unnormalized(IntMatrix::from_int_rows(&rows), open, sign)
    }

    /// Build keeping the generator rows exactly as given (used when the rays
    /// must stay on points of a non-standard lattice).
    pub fn from_rows_unnormalized(gens: IntMatrix, open: Vec<bool>, sign: i32) -> Result<Self> {
        if open.len() != gens.nrows() {
            return Err(Error::InvalidInput("one half-open flag per generator".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidInput("cone sign must be ±1".into()));
        }
        if gens.nrows() > gens.ncols() || gens.to_rat().rank() != gens.nrows() {
            return Err(Error::InvalidInput("cone generators must be independent".into()));
        }
        Ok(HalfOpenSimplicialCone { gens, open, sign })
    }

    /// Closed cone with positive sign.
    pub fn closed(gens: &IntMatrix) -> Result<Self> {
        let n = gens.nrows();
        HalfOpenSimplicialCone::new(gens, vec![false; n], 1)
    }

    pub fn gens(&self) -> &IntMatrix {
        &self.gens
    }

    pub fn open_flags(&self) -> &[bool] {
        &self.open
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.gens.nrows()
    }

    pub fn ambient(&self) -> usize {
        self.gens.ncols()
    }

    /// Exact membership with the half-open flags (ignores the sign).
    pub fn contains(&self, x: &[Rat]) -> bool {
        let coords = self
            .gens
            .to_rat()
            .transpose()
            .solve_unique(x);
        match coords {
            None => false,
            Some(c) => c
                .iter()
                .zip(&self.open)
                .all(|(t, &o)| if o { t.is_positive() } else { !t.is_negative() }),
        }
    }

    pub fn signed_membership(&self, x: &[Rat]) -> i32 {
        if self.contains(x) {
            self.sign
        } else {
            0
        }
    }
}

/// A vertex as an affine map of the parameters: `s(b) = mat·b (+ constant)`.
#[derive(Clone, Debug)]
pub struct AffineShift {
    pub mat: RatMatrix, // d x N
    pub constant: Option<Vec<Rat>>,
}

impl AffineShift {
    pub fn linear(mat: RatMatrix) -> Self {
        AffineShift { mat, constant: None }
    }

    /// A fixed point, presented over `n_params` unused parameters.
    pub fn fixed(point: Vec<Rat>, n_params: usize) -> Self {
        AffineShift {
            mat: RatMatrix::zeros(point.len(), n_params),
            constant: Some(point),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.mat.ncols()
    }

    pub fn eval(&self, b: &[Rat]) -> Vec<Rat> {
        let mut v = self.mat.mul_vec(b);
        if let Some(c) = &self.constant {
            for (x, y) in v.iter_mut().zip(c) {
                *x += y;
            }
        }
        v
    }
}

/// One cell of an `L`-adapted decomposition: the first block of generators
/// spans `L` exactly, the rest project to independent vectors of `V/L`.  The
/// transverse rows may be rational: after the quotient-space unimodular
/// refinement they are the lifts of the quotient generators into the cell,
/// which is what the series pairing needs.
#[derive(Clone, Debug)]
pub struct AdaptedCell {
    pub sign: i32,
    pub l_rows: IntMatrix, // ell x d
    pub l_open: Vec<bool>,
    pub l_det: Rat, // |det| of the L-part in the basis of Λ∩L
    pub trans_rows: RatMatrix, // q x d
    pub trans_open: Vec<bool>,
}

impl AdaptedCell {
    pub fn ambient(&self) -> usize {
        self.l_rows.ncols()
    }

    pub fn ell(&self) -> usize {
        self.l_rows.nrows()
    }

    pub fn q(&self) -> usize {
        self.trans_rows.nrows()
    }

    /// Exact membership with the half-open flags, L-part first.
    pub fn contains(&self, x: &[Rat]) -> bool {
        let mut rows = Vec::with_capacity(self.ambient());
        rows.extend(self.l_rows.to_rat().row_vecs());
        rows.extend(self.trans_rows.row_vecs());
        let coords = RatMatrix::from_rows(&rows).transpose().solve_unique(x);
        let flags = self.l_open.iter().chain(&self.trans_open);
        match coords {
            None => false,
            Some(c) => c
                .iter()
                .zip(flags)
                .all(|(t, &o)| if o { t.is_positive() } else { !t.is_negative() }),
        }
    }

    pub fn signed_membership(&self, x: &[Rat]) -> i32 {
        if self.contains(x) {
            self.sign
        } else {
            0
        }
    }
}

fn sgn(r: &Rat) -> i32 {
    if r.is_negative() {
        -1
    } else {
        1
    }
}

// working representation during exchange cascades
#[derive(Clone)]
struct WorkCell {
    gens: Vec<Vec<Int>>,
    open: Vec<bool>,
    sign: i32,
    locked: Vec<bool>,
}

fn coords_in(gens: &[Vec<Int>], v: &[Rat]) -> Option<Vec<Rat>> {
    let rows: Vec<Vec<Rat>> = gens.iter().map(|g| int_to_rat_vec(g)).collect();
    RatMatrix::from_rows(&rows).transpose().solve_unique(v)
}

// flags induced by the reference vector y: facet i open iff the i-th
// coordinate of y is negative; None when some coordinate vanishes (y is not
// generic for this basis)
fn flags_from_y(gens: &[Vec<Int>], y: &[Rat]) -> Option<Vec<bool>> {
    let c = coords_in(gens, y)?;
    let mut flags = Vec::with_capacity(c.len());
    for t in &c {
        if t.is_zero() {
            return None;
        }
        flags.push(t.is_negative());
    }
    Some(flags)
}

// insert w into the cell basis by the signed exchange identity, skipping
// locked slots; flags of every child are re-read from y.  Returns None when y
// fails to be generic for a child basis.
fn exchange_insert(
    cell: &WorkCell,
    w: &[Rat],
    y: &[Rat],
    lock_inserted: bool,
) -> Option<Vec<WorkCell>> {
    let alpha_full = coords_in(&cell.gens, w).expect("cell basis spans the space");
    let mut alpha: Vec<Rat> = alpha_full
        .iter()
        .zip(&cell.locked)
        .map(|(a, &lk)| if lk { Rat::zero() } else { a.clone() })
        .collect();
    debug_assert!(
        alpha.iter().any(|a| !a.is_zero()),
        "inserted vector already lies in the locked span"
    );
    // remove the locked components of w so the exchange never touches them
    let mut w_red: Vec<Rat> = w.to_vec();
    for (j, lk) in cell.locked.iter().enumerate() {
        if *lk && !alpha_full[j].is_zero() {
            for (x, g) in w_red.iter_mut().zip(&cell.gens[j]) {
                *x -= &alpha_full[j] * Rat::from_integer(g.clone());
            }
        }
    }
    if alpha.iter().all(|a| !a.is_positive()) {
        for x in w_red.iter_mut() {
            *x = -x.clone();
        }
        for a in alpha.iter_mut() {
            *a = -a.clone();
        }
    }
    let w_prim = primitive_of_rat(&w_red).expect("reduced vector is nonzero");
    // rescaling w keeps the signs of the coordinates
    let mut children = Vec::new();
    for (j, a) in alpha.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mut gens = cell.gens.clone();
        gens[j] = w_prim.clone();
        let open = flags_from_y(&gens, y)?;
        let mut locked = cell.locked.clone();
        if lock_inserted {
            locked[j] = true;
        }
        children.push(WorkCell { gens, open, sign: cell.sign * sgn(a), locked });
    }
    Some(children)
}

// reference vector for a given retry round: y = Σ s_i r^{i-1} g_i with
// s_i = -1 on open facets, +1 on closed ones, so y realizes the input flags
fn reference_vector(gens: &[Vec<Int>], open: &[bool], r: i64) -> Vec<Rat> {
    let d = gens[0].len();
    let mut y = vec![Rat::zero(); d];
    let mut pw = Rat::one();
    let rr = rat_int(r);
    for (g, &o) in gens.iter().zip(open) {
        let s = if o { -pw.clone() } else { pw.clone() };
        for (yi, gi) in y.iter_mut().zip(g) {
            *yi += &s * Rat::from_integer(gi.clone());
        }
        pw *= &rr;
    }
    y
}

/// Decompose a full-dimensional simplicial cone into signed half-open cells
/// each having a face that spans `L`.  The construction inserts the Hermite
/// basis of `Λ∩L` one vector at a time by the signed exchange identity,
/// zeroing the coordinates at already-inserted slots first; every produced
/// cell is full-dimensional, so the lower-dimensional remainder list is
/// always empty (it is kept in the signature for the contract).
pub fn adapt_to_subspace(
    c: &HalfOpenSimplicialCone,
    l: &Subspace,
) -> Result<(Vec<AdaptedCell>, Vec<HalfOpenSimplicialCone>)> {
    let d = c.ambient();
    if c.dim() != d {
        return Err(Error::InvalidInput(
            "adapt_to_subspace needs a full-dimensional cone".into(),
        ));
    }
    if l.ambient() != d {
        return Err(Error::InvalidInput("subspace ambient mismatch".into()));
    }
    let ell = l.dim();
    if ell == 0 {
        let cell = AdaptedCell {
            sign: c.sign(),
            l_rows: IntMatrix::zeros(0, d),
            l_open: Vec::new(),
            l_det: Rat::one(),
            trans_rows: c.gens().to_rat(),
            trans_open: c.open_flags().to_vec(),
        };
        return Ok((vec![cell], Vec::new()));
    }
    let w_rows = l.basis().row_vecs();
    let gens0 = c.gens().row_vecs();
    let mut final_cells: Option<Vec<WorkCell>> = None;
    'retry: for r in GENERIC_PRIMES {
        let y = reference_vector(&gens0, c.open_flags(), r);
        let mut cells = vec![WorkCell {
            gens: gens0.clone(),
            open: c.open_flags().to_vec(),
            sign: c.sign(),
            locked: vec![false; d],
        }];
        for w in &w_rows {
            let wq = int_to_rat_vec(w);
            let mut next = Vec::new();
            for cell in &cells {
                match exchange_insert(cell, &wq, &y, true) {
                    Some(mut ch) => next.append(&mut ch),
                    None => continue 'retry,
                }
            }
            cells = next;
        }
        final_cells = Some(cells);
        break;
    }
    let cells = final_cells.ok_or(Error::DegenerateDirection)?;
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut l_rows = Vec::new();
        let mut l_open = Vec::new();
        let mut trans_rows = Vec::new();
        let mut trans_open = Vec::new();
        for j in 0..d {
            if cell.locked[j] {
                l_rows.push(cell.gens[j].clone());
                l_open.push(cell.open[j]);
            } else {
                trans_rows.push(int_to_rat_vec(&cell.gens[j]));
                trans_open.push(cell.open[j]);
            }
        }
        debug_assert_eq!(l_rows.len(), ell);
        let mut coord_rows = Vec::with_capacity(ell);
        for w in &l_rows {
            coord_rows.push(
                l.coords(&int_to_rat_vec(w))
                    .expect("locked generators lie in L"),
            );
        }
        let l_det = if ell == 0 {
            Rat::one()
        } else {
            RatMatrix::from_rows(&coord_rows).det().abs()
        };
        debug_assert!(!l_det.is_zero(), "L-part spans L");
        out.push(AdaptedCell {
            sign: cell.sign,
            l_rows: IntMatrix::from_int_rows(&l_rows),
            l_open,
            l_det,
            trans_rows: RatMatrix::from_rows(&trans_rows),
            trans_open,
        });
    }
    Ok((out, Vec::new()))
}

/// Index of a cone's generators with respect to a lattice basis, together
/// with the generator rows rescaled to their first lattice point.
fn lattice_coords(
    gens: &IntMatrix,
    lattice: &IntMatrix,
) -> Result<Vec<Vec<Int>>> {
    let lat_t = lattice.to_rat().transpose();
    let mut rows = Vec::with_capacity(gens.nrows());
    for i in 0..gens.nrows() {
        let sol = lat_t
            .solve_unique(&int_to_rat_vec(gens.row(i)))
            .ok_or_else(|| {
                Error::InvalidInput("cone generator outside the span of the lattice".into())
            })?;
        rows.push(primitive_of_rat(&sol)?);
    }
    Ok(rows)
}

/// Signed half-open Barvinok decomposition into cones unimodular with
/// respect to the given lattice (full-rank basis rows).  Exact pointwise
/// identity; the index `|det|` in lattice coordinates strictly decreases
/// along the recursion, leaves have index 1.  Output generators sit on their
/// rays' first lattice points.
pub fn unimodularize(
    c: &HalfOpenSimplicialCone,
    lattice: &IntMatrix,
) -> Result<Vec<HalfOpenSimplicialCone>> {
    let r = c.dim();
    if r != lattice.nrows() {
        return Err(Error::InvalidInput(
            "unimodularize needs a cone of full dimension in the lattice span".into(),
        ));
    }
    let a_rows = lattice_coords(c.gens(), lattice)?;
    'retry: for prime in GENERIC_PRIMES {
        let y = reference_vector(&a_rows, c.open_flags(), prime);
        let root = WorkCell {
            gens: a_rows.clone(),
            open: c.open_flags().to_vec(),
            sign: c.sign(),
            locked: vec![false; r],
        };
        let mut work = vec![root];
        let mut leaves = Vec::new();
        while let Some(cell) = work.pop() {
            let det = RatMatrix::from_rows(
                &cell.gens.iter().map(|g| int_to_rat_vec(g)).collect::<Vec<_>>(),
            )
            .det();
            let index = det.abs();
            debug_assert!(!index.is_zero());
            if index == Rat::one() {
                leaves.push(cell);
                continue;
            }
            let z = shortest_insertable_vector(&cell.gens)?;
            match exchange_insert(&cell, &int_to_rat_vec(&z), &y, false) {
                Some(mut ch) => work.append(&mut ch),
                None => continue 'retry,
            }
        }
        // convert back to ambient coordinates
        let mut out = Vec::with_capacity(leaves.len());
        for leaf in leaves {
            let mut rows = Vec::with_capacity(r);
            for g in &leaf.gens {
                let mut v = vec![Int::zero(); lattice.ncols()];
                for (coef, li) in g.iter().zip(0..lattice.nrows()) {
                    for (x, entry) in v.iter_mut().zip(lattice.row(li)) {
                        *x += coef * entry;
                    }
                }
                rows.push(v);
            }
            out.push(HalfOpenSimplicialCone::from_rows_unnormalized(
                IntMatrix::from_int_rows(&rows),
                leaf.open,
                leaf.sign,
            )?);
        }
        return Ok(out);
    }
    Err(Error::DegenerateDirection)
}

// nonzero lattice vector z = Σ α_i g_i with every |α_i| < 1; exists whenever
// the index exceeds 1 by Minkowski's theorem.  The coefficient vectors α with
// z integer form the lattice spanned by the rows of U⁻¹, so LLL-reduce
// det·U⁻¹ and search small combinations of the reduced rows, widening the box
// until a candidate appears; ties resolve by (max |α_i|, z) to stay
// deterministic.
fn shortest_insertable_vector(gens: &[Vec<Int>]) -> Result<Vec<Int>> {
    let r = gens.len();
    let u = IntMatrix::from_int_rows(gens);
    let urat = u.to_rat();
    let det = urat.det();
    let inv = urat.inverse().expect("independent generators");
    let mut w_rows = Vec::with_capacity(r);
    for i in 0..r {
        let row: Vec<Int> = (0..r)
            .map(|j| {
                let x = inv.at(i, j) * &det;
                debug_assert!(x.is_integer());
                x.to_integer()
            })
            .collect();
        w_rows.push(row);
    }
    let reduced = crate::exactlin::lll_reduce(&IntMatrix::from_int_rows(&w_rows));
    let det_int = det.to_integer();
    let det_abs = det_int.abs();
    let mut c_max = 1i64;
    while c_max <= 1024 {
        let mut best: Option<(Int, Vec<Int>)> = None;
        let mut c = vec![-c_max; r];
        'scan: loop {
            if c.iter().any(|&x| x != 0) {
                let mut w = vec![Int::zero(); r];
                for (ci, row) in c.iter().zip(0..r) {
                    for (x, y) in w.iter_mut().zip(reduced.row(row)) {
                        *x += y * ci;
                    }
                }
                let sup = w.iter().map(|x| x.abs()).max().unwrap();
                if sup < det_abs {
                    // z = (w · U) / det is integral by construction
                    let mut z = vec![Int::zero(); u.ncols()];
                    for (wi, row) in w.iter().zip(0..r) {
                        for (x, y) in z.iter_mut().zip(u.row(row)) {
                            *x += y * wi;
                        }
                    }
                    for x in z.iter_mut() {
                        debug_assert!((&*x % &det_int).is_zero());
                        *x = &*x / &det_int;
                    }
                    let better = match &best {
                        None => true,
                        Some((bs, bz)) => sup < *bs || (sup == *bs && z < *bz),
                    };
                    if better {
                        best = Some((sup, z));
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == r {
                    break 'scan;
                }
                if c[k] < c_max {
                    c[k] += 1;
                    break;
                }
                c[k] = -c_max;
                k += 1;
            }
        }
        if let Some((_, z)) = best {
            return Ok(z);
        }
        c_max *= 2;
    }
    Err(Error::ResourceBound(
        "no insertable vector in the reduced search box".into(),
    ))
}

/// Outcome of restating an intermediate-sum problem on a lower-dimensional
/// cone inside its linear span.
#[derive(Clone, Debug)]
pub enum LowerDimReduction {
    /// The slices have dimension below `dim L`, or the coset condition fails
    /// for every parameter: the intermediate sum is identically zero.
    Zero,
    Reduced(ReducedProblem),
}

/// The restated problem: everything is expressed in the lattice coordinates
/// of `W = lin(c)`, and the original sum equals
/// `e^{<ξ, prefactor>}` times the intermediate sum of the sub-problem.
#[derive(Clone, Debug)]
pub struct ReducedProblem {
    pub cone: HalfOpenSimplicialCone, // full-dimensional in the sub-space
    pub shift: AffineShift,           // in sub-coordinates
    pub subspace: Subspace,           // L in sub-coordinates
    pub embedding: IntMatrix,         // rows: lattice basis of Λ∩W inside V
    pub prefactor: Vec<Rat>,          // constant lattice translate in V
}

/// Restate `S^L(s(b) + c)` for a cone of dimension `r < d`.  Returns `Zero`
/// when `L ⊄ lin(c)` (every slice is lower-dimensional) or when the affine
/// span misses the lattice cosets for all parameters; errors with
/// `NonUniformCosetCondition` when the coset condition depends on `b`.
pub fn reduce_lower_dim(
    c: &HalfOpenSimplicialCone,
    shift: &AffineShift,
    l: &Subspace,
) -> Result<LowerDimReduction> {
    let d = c.ambient();
    if c.dim() >= d {
        return Err(Error::InvalidInput(
            "reduce_lower_dim expects a lower-dimensional cone".into(),
        ));
    }
    let w = Subspace::from_int_rows(d, &c.gens().row_vecs());
    if !w.contains(l) {
        return Ok(LowerDimReduction::Zero);
    }
    let r = w.dim();
    let bw = w.basis().clone();
    // coset condition: the class of s(b) in V/W must be a lattice point
    let pl = projected_lattice(&w);
    let proj = pl.proj.to_rat();
    let lin = proj.mul(&shift.mat);
    for i in 0..lin.nrows() {
        for j in 0..lin.ncols() {
            if !lin.at(i, j).is_zero() {
                return Err(Error::NonUniformCosetCondition);
            }
        }
    }
    let u = match &shift.constant {
        Some(cst) => proj.mul_vec(cst),
        None => vec![Rat::zero(); pl.q],
    };
    if u.iter().any(|x| !x.is_integer()) {
        return Ok(LowerDimReduction::Zero);
    }
    // integer lift of the class: prefactor λ0 with proj(λ0) = u
    let mut lambda0 = vec![Rat::zero(); d];
    for (i, ui) in u.iter().enumerate() {
        for (x, wi) in lambda0.iter_mut().zip(pl.section.row(i)) {
            *x += ui * Rat::from_integer(wi.clone());
        }
    }
    // sub-coordinates: solve rows of B_W for each datum
    let bw_t = bw.to_rat().transpose();
    let to_sub = |v: &[Rat]| -> Vec<Rat> {
        bw_t.solve_unique(v).expect("vector lies in W")
    };
    let mut cone_rows = Vec::with_capacity(c.dim());
    for i in 0..c.dim() {
        let sc = to_sub(&int_to_rat_vec(c.gens().row(i)));
        // generators are points of Λ∩W, so their coordinates in the
        // saturated basis are integers
        cone_rows.push(
            sc.iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    x.to_integer()
                })
                .collect::<Vec<Int>>(),
        );
    }
    let sub_cone = HalfOpenSimplicialCone::from_rows_unnormalized(
        IntMatrix::from_int_rows(&cone_rows),
        c.open_flags().to_vec(),
        c.sign(),
    )?;
    let mut sub_l_rows = Vec::new();
    for i in 0..l.basis().nrows() {
        sub_l_rows.push(to_sub(&int_to_rat_vec(l.basis().row(i))));
    }
    let sub_l = Subspace::from_rows(r, &sub_l_rows);
    // shift: s(b) - λ0 lies in W for every b; express it there
    let mut sub_mat_rows = Vec::with_capacity(r);
    let shift_cols = shift.mat.ncols();
    let mut cols = Vec::with_capacity(shift_cols);
    for j in 0..shift_cols {
        let col: Vec<Rat> = (0..d).map(|i| shift.mat.at(i, j).clone()).collect();
        cols.push(to_sub(&col));
    }
    for i in 0..r {
        sub_mat_rows.push((0..shift_cols).map(|j| cols[j][i].clone()).collect::<Vec<_>>());
    }
    let sub_const = {
        let mut cst = shift
            .constant
            .clone()
            .unwrap_or_else(|| vec![Rat::zero(); d]);
        for (x, l0) in cst.iter_mut().zip(&lambda0) {
            *x -= l0;
        }
        to_sub(&cst)
    };
    Ok(LowerDimReduction::Reduced(ReducedProblem {
        cone: sub_cone,
        shift: AffineShift { mat: RatMatrix::from_rows(&sub_mat_rows), constant: Some(sub_const) },
        subspace: sub_l,
        embedding: bw,
        prefactor: lambda0,
    }))
}

/// Truncated bivariate Laurent series in `(t, ε)` with step-polynomial
/// coefficients; `t` tracks the `ξ`-homogeneity degree, `ε` the genericity
/// regularization of the evaluation direction.
#[derive(Clone, Debug)]
pub struct BiLaurentSeries {
    n: usize,
    t_min: i64,
    t_max: i64,
    e_max: i64,
    coeffs: BTreeMap<(i64, i64), QuasiPolynomial>,
}

impl BiLaurentSeries {
    pub fn zero(n: usize, t_min: i64, t_max: i64, e_max: i64) -> Self {
        BiLaurentSeries { n, t_min, t_max, e_max, coeffs: BTreeMap::new() }
    }

    pub fn one(n: usize, t_min: i64, t_max: i64, e_max: i64) -> Self {
        let mut s = Self::zero(n, t_min, t_max, e_max);
        s.add_coeff(0, 0, &QuasiPolynomial::one(n));
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> (i64, i64, i64) {
        (self.t_min, self.t_max, self.e_max)
    }

    pub fn coeff(&self, t: i64, e: i64) -> QuasiPolynomial {
        self.coeffs
            .get(&(t, e))
            .cloned()
            .unwrap_or_else(|| QuasiPolynomial::zero(self.n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &QuasiPolynomial)> {
        self.coeffs.iter()
    }

    pub fn add_coeff(&mut self, t: i64, e: i64, qp: &QuasiPolynomial) {
        if t < self.t_min || t > self.t_max || e.abs() > self.e_max || qp.is_zero() {
            return;
        }
        let entry = self
            .coeffs
            .entry((t, e))
            .or_insert_with(|| QuasiPolynomial::zero(self.n));
        *entry = entry.add(qp);
        if entry.is_zero() {
            self.coeffs.remove(&(t, e));
        }
    }

    pub fn add(&self, other: &BiLaurentSeries) -> BiLaurentSeries {
        assert_eq!(self.window(), other.window(), "series windows must agree");
        let mut out = self.clone();
        for ((t, e), qp) in &other.coeffs {
            out.add_coeff(*t, *e, qp);
        }
        out
    }

    pub fn mul(&self, other: &BiLaurentSeries) -> BiLaurentSeries {
        assert_eq!(self.window(), other.window(), "series windows must agree");
        let mut out = BiLaurentSeries::zero(self.n, self.t_min, self.t_max, self.e_max);
        for ((t1, e1), q1) in &self.coeffs {
            for ((t2, e2), q2) in &other.coeffs {
                let t = t1 + t2;
                let e = e1 + e2;
                if t < self.t_min || t > self.t_max || e.abs() > self.e_max {
                    continue;
                }
                out.add_coeff(t, e, &q1.mul(q2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> BiLaurentSeries {
        let mut out = BiLaurentSeries::zero(self.n, self.t_min, self.t_max, self.e_max);
        for ((t, e), qp) in &self.coeffs {
            out.add_coeff(*t, *e, &qp.scale(c));
        }
        out
    }
}

fn binom(n: u64, k: u64) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut v = Rat::one();
    for i in 0..k {
        v *= Rat::new((n - i).into(), (i + 1).into());
    }
    v
}

/// Bernoulli numbers `B_0..B_n` with `B_1 = -1/2`.
fn bernoulli_numbers(n: usize) -> Vec<Rat> {
    let mut b = vec![Rat::zero(); n + 1];
    b[0] = Rat::one();
    for m in 1..=n {
        let mut s = Rat::zero();
        for (j, bj) in b.iter().enumerate().take(m) {
            s += binom((m + 1) as u64, j as u64) * bj;
        }
        b[m] = -s / Rat::from_integer(Int::from((m + 1) as i64));
    }
    b
}

// window shared by every series of one computation
fn series_window(d: usize, m_max: usize) -> (i64, i64, i64) {
    (-(d as i64), (m_max + d) as i64, d as i64)
}

// ε-expansion of 1/(a + εr): a ≠ 0 gives Σ (-r)^j/a^{j+1} ε^j, a = 0 gives
// the single term ε^{-1}/r
fn inv_linear(a: &Rat, r: &Rat, e_max: i64) -> Vec<(i64, Rat)> {
    if a.is_zero() {
        vec![(-1, r.recip())]
    } else {
        let mut out = Vec::new();
        let ratio = -(r / a);
        let mut cur = a.recip();
        for j in 0..=e_max {
            out.push((j, cur.clone()));
            cur *= &ratio;
        }
        out
    }
}

fn pairing(ell: &[Rat], rho: &[Rat], g: &[Rat]) -> Result<(Rat, Rat)> {
    let a = dot_rat(ell, g);
    let r = dot_rat(rho, g);
    if a.is_zero() && r.is_zero() {
        return Err(Error::DegenerateDirection);
    }
    Ok((a, r))
}

// factor -1/<ξ, w> for an L-part generator, ξ = t(ℓ+ερ)
fn l_part_factor(
    a: &Rat,
    r: &Rat,
    n: usize,
    window: (i64, i64, i64),
) -> BiLaurentSeries {
    let mut s = BiLaurentSeries::zero(n, window.0, window.1, window.2);
    for (e, c) in inv_linear(a, r, window.2) {
        s.add_coeff(-1, e, &QuasiPolynomial::constant(n, -c));
    }
    s
}

// factor e^{δx}/(1-e^x) = -Σ_n B_n(δ)/n! x^{n-1} for a transverse generator,
// x = t(a+εr), δ a step polynomial
fn transverse_factor(
    a: &Rat,
    r: &Rat,
    delta: &QuasiPolynomial,
    n: usize,
    window: (i64, i64, i64),
) -> BiLaurentSeries {
    let (_, t_max, e_max) = window;
    let mut s = BiLaurentSeries::zero(n, window.0, t_max, e_max);
    let n_top = (t_max + 1) as usize; // need B_n for n-1 ≤ t_max
    let bnum = bernoulli_numbers(n_top);
    let mut delta_pows = Vec::with_capacity(n_top + 1);
    delta_pows.push(QuasiPolynomial::one(n));
    for _ in 0..n_top {
        delta_pows.push(delta_pows.last().unwrap().mul(delta));
    }
    // n = 0 term: -1/x
    for (e, c) in inv_linear(a, r, e_max) {
        s.add_coeff(-1, e, &QuasiPolynomial::constant(n, -c));
    }
    let mut factorial = Rat::one();
    for nn in 1..=n_top {
        factorial *= Rat::from_integer(Int::from(nn as i64));
        // B_nn(δ) = Σ_k C(nn,k) B_k δ^{nn-k}
        let mut bpoly = QuasiPolynomial::zero(n);
        for k in 0..=nn {
            let c = binom(nn as u64, k as u64) * &bnum[k];
            if !c.is_zero() {
                bpoly = bpoly.add(&delta_pows[nn - k].scale(&c));
            }
        }
        let coeff_base = bpoly.scale(&(-factorial.clone().recip()));
        // x^{nn-1} = t^{nn-1} Σ_i C(nn-1,i) a^{nn-1-i} r^i ε^i
        let t_ord = (nn - 1) as i64;
        if t_ord > t_max {
            break;
        }
        for i in 0..=(nn - 1).min(e_max as usize) {
            let c = binom((nn - 1) as u64, i as u64)
                * rat_pow(a, (nn - 1 - i) as u32)
                * rat_pow(r, i as u32);
            if !c.is_zero() {
                s.add_coeff(t_ord, i as i64, &coeff_base.scale(&c));
            }
        }
    }
    s
}

/// Expansion of `e^{t<ℓ+ερ, s(b)>}` where `p = <ℓ, s(b)>` and `r = <ρ, s(b)>`
/// are the paired vertex coordinates as degree-one quasi-polynomials.
pub fn vertex_exponential_series(
    p: &QuasiPolynomial,
    r: &QuasiPolynomial,
    d: usize,
    m_max: usize,
) -> BiLaurentSeries {
    let n = p.n();
    let window = series_window(d, m_max);
    let (_, t_max, e_max) = window;
    let mut p_pows = vec![QuasiPolynomial::one(n)];
    let mut r_pows = vec![QuasiPolynomial::one(n)];
    for _ in 0..t_max {
        p_pows.push(p_pows.last().unwrap().mul(p));
        r_pows.push(r_pows.last().unwrap().mul(r));
    }
    let mut s = BiLaurentSeries::zero(n, window.0, t_max, e_max);
    let mut factorial = Rat::one();
    for t in 0..=t_max as usize {
        if t > 0 {
            factorial *= Rat::from_integer(Int::from(t as i64));
        }
        for i in 0..=t.min(e_max as usize) {
            let c = binom(t as u64, i as u64) / &factorial;
            s.add_coeff(
                t as i64,
                i as i64,
                &p_pows[t - i].mul(&r_pows[i]).scale(&c),
            );
        }
    }
    s
}

// the map x ↦ coordinates of proj_{V/L}(x) in the basis given by the
// projected transverse generators; its rows are the dual forms whose
// fractional parts enter the series factors
fn sigma_map(cell: &AdaptedCell, l: &Subspace) -> Result<RatMatrix> {
    let q = cell.q();
    if q == 0 {
        return Ok(RatMatrix::zeros(0, cell.ambient()));
    }
    let pl = projected_lattice(l);
    let proj = pl.proj.to_rat();
    // rows of p are the projections of the transverse generators; they must
    // form a lattice basis of the quotient for the factor formula to apply
    let mut p_rows = Vec::with_capacity(q);
    for i in 0..q {
        let pr = proj.mul_vec(cell.trans_rows.row(i));
        if pr.iter().any(|x| !x.is_integer()) {
            return Err(Error::InvalidInput(
                "transverse generators must project into the quotient lattice".into(),
            ));
        }
        p_rows.push(pr);
    }
    let p = RatMatrix::from_rows(&p_rows);
    if p.det().abs() != Rat::one() {
        return Err(Error::InvalidInput(
            "transverse part is not unimodular for the projected lattice".into(),
        ));
    }
    Ok(p.transpose().inverse().expect("unimodular basis").mul(&proj))
}

// δ for one transverse generator: {−σ(b)} on a closed facet, 1−{σ(b)} on an
// open one; integer constant offsets drop out of the fractional part, other
// constant offsets are only allowed when the linear part vanishes
fn delta_qp(
    sigma_lin: &[Rat],
    sigma_const: &Rat,
    open: bool,
    n: usize,
) -> Result<QuasiPolynomial> {
    let lin_zero = sigma_lin.iter().all(|x| x.is_zero());
    if lin_zero {
        let v = if open {
            Rat::one() - frac(sigma_const)
        } else {
            frac(&-sigma_const.clone())
        };
        return Ok(QuasiPolynomial::constant(n, v));
    }
    if !sigma_const.is_integer() {
        return Err(Error::InvalidInput(
            "fractional parts of affine arguments with non-integer offsets are not supported"
                .into(),
        ));
    }
    if open {
        let form = LinearFormQ::new(sigma_lin);
        Ok(QuasiPolynomial::one(n).sub(&QuasiPolynomial::step_form(&form)))
    } else {
        let neg: Vec<Rat> = sigma_lin.iter().map(|x| -x.clone()).collect();
        Ok(QuasiPolynomial::step_form(&LinearFormQ::new(&neg)))
    }
}

/// Series of one adapted cell with unimodular transverse part: the product
/// of the `L`-part volume factors, the transverse Bernoulli factors, and the
/// cached lattice normalization, carrying the cell's sign.
pub fn cell_series(
    cell: &AdaptedCell,
    shift: &AffineShift,
    ell: &[Rat],
    rho: &[Rat],
    m_max: usize,
) -> Result<BiLaurentSeries> {
    let d = cell.ambient();
    assert_eq!(shift.dim(), d, "shift dimension mismatch");
    assert_eq!(ell.len(), d);
    assert_eq!(rho.len(), d);
    let n = shift.n_params();
    let window = series_window(d, m_max);
    let l = Subspace::from_int_rows(d, &cell.l_rows.row_vecs());
    let smap = sigma_map(cell, &l)?;
    let mut acc = BiLaurentSeries::one(n, window.0, window.1, window.2);
    acc = acc.scale(&cell.l_det);
    for i in 0..cell.ell() {
        let g = int_to_rat_vec(cell.l_rows.row(i));
        let (a, r) = pairing(ell, rho, &g)?;
        acc = acc.mul(&l_part_factor(&a, &r, n, window));
    }
    if cell.q() > 0 {
        // σ(b) = smap · s(b), one row per transverse generator
        let sig_lin = smap.mul(&shift.mat);
        let sig_const: Vec<Rat> = match &shift.constant {
            Some(c) => smap.mul_vec(c),
            None => vec![Rat::zero(); cell.q()],
        };
        for j in 0..cell.q() {
            let g = cell.trans_rows.row(j).to_vec();
            let (a, r) = pairing(ell, rho, &g)?;
            let delta = delta_qp(sig_lin.row(j), &sig_const[j], cell.trans_open[j], n)?;
            acc = acc.mul(&transverse_factor(&a, &r, &delta, n, window));
        }
    }
    if cell.sign < 0 {
        acc = acc.scale(&-Rat::one());
    }
    Ok(acc)
}

/// Full pipeline for a full-dimensional simplicial cone: adapt to `L`,
/// unimodularize each cell's transverse part in the quotient, lift, and sum
/// the signed cell series.  Result: the expansion of `M^L(s(b), c)` at
/// `ξ = t(ℓ+ερ)`.
pub fn cone_intermediate_series(
    c: &HalfOpenSimplicialCone,
    shift: &AffineShift,
    l: &Subspace,
    ell: &[Rat],
    rho: &[Rat],
    m_max: usize,
) -> Result<BiLaurentSeries> {
    let cells = adapted_unimodular_cells(c, l)?;
    let d = c.ambient();
    let n = shift.n_params();
    let window = series_window(d, m_max);
    let mut acc = BiLaurentSeries::zero(n, window.0, window.1, window.2);
    for cell in &cells {
        acc = acc.add(&cell_series(cell, shift, ell, rho, m_max)?);
    }
    Ok(acc)
}

/// Adapted cells with unimodular transverse parts (the shared front end of
/// `cone_intermediate_series` and `collect_psi`).
pub fn adapted_unimodular_cells(
    c: &HalfOpenSimplicialCone,
    l: &Subspace,
) -> Result<Vec<AdaptedCell>> {
    let d = c.ambient();
    if c.dim() != d {
        return Err(Error::InvalidInput(
            "cone_intermediate_series needs a full-dimensional cone; use reduce_lower_dim first"
                .into(),
        ));
    }
    let (cells, lower) = adapt_to_subspace(c, l)?;
    debug_assert!(lower.is_empty());
    let pl = projected_lattice(l);
    let proj = pl.proj.to_rat();
    let mut out = Vec::new();
    for cell in cells {
        let q = cell.q();
        if q == 0 {
            out.push(cell);
            continue;
        }
        // transverse generators in quotient coordinates (integral here: the
        // adaptation produces integer generators)
        let mut qrows = Vec::with_capacity(q);
        for i in 0..q {
            let pr = proj.mul_vec(cell.trans_rows.row(i));
            qrows.push(
                pr.iter()
                    .map(|x| {
                        debug_assert!(x.is_integer());
                        x.to_integer()
                    })
                    .collect::<Vec<Int>>(),
            );
        }
        let qcone = HalfOpenSimplicialCone::new(
            &IntMatrix::from_int_rows(&qrows),
            cell.trans_open.clone(),
            1,
        )?;
        let leaves = unimodularize(&qcone, &IntMatrix::identity(pl.q))?;
        // section of the quotient determined by the cell: λ(proj(g_j)) = g_j
        let p = RatMatrix::from_rows(
            &qrows.iter().map(|r| int_to_rat_vec(r)).collect::<Vec<_>>(),
        );
        let lift = cell
            .trans_rows
            .transpose()
            .mul(&p.transpose().inverse().expect("independent projections"));
        for leaf in leaves {
            let mut trans_rows = Vec::with_capacity(q);
            for i in 0..q {
                let gbar = int_to_rat_vec(leaf.gens().row(i));
                trans_rows.push(lift.mul_vec(&gbar));
            }
            out.push(AdaptedCell {
                sign: cell.sign * leaf.sign(),
                l_rows: cell.l_rows.clone(),
                l_open: cell.l_open.clone(),
                l_det: cell.l_det.clone(),
                trans_rows: RatMatrix::from_rows(&trans_rows),
                trans_open: leaf.open_flags().to_vec(),
            });
        }
    }
    Ok(out)
}

/// The set `Ψ^L_c ⊂ Λ*∩L^⊥` of dual generators whose fractional parts can
/// appear in the series factors of the decomposition of `c` adapted to `L`
/// (before composing with a shift).
pub fn collect_psi(c: &HalfOpenSimplicialCone, l: &Subspace) -> Result<Vec<LinearFormQ>> {
    let cells = adapted_unimodular_cells(c, l)?;
    let mut set = std::collections::BTreeSet::new();
    for cell in &cells {
        if cell.q() == 0 {
            continue;
        }
        let smap = sigma_map(cell, l)?;
        for j in 0..cell.q() {
            set.insert(LinearFormQ::new(smap.row(j)));
        }
    }
    Ok(set.into_iter().collect())
}
