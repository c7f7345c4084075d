//! Chambers and vertices of parametric polytopes `p(b) = {x : <μ_j, x> ≤ b_j}`
//! and the assembly, via Brion's decomposition into vertex cones, of the
//! intermediate Ehrhart quasi-polynomial on a chamber together with its two
//! patched approximations.
//!
//! On a chamber τ the vertices of `p(b)` are the points `s_B(b)`, one per
//! basis subset `B` in a fixed combinatorial list, and each depends linearly
//! on `b`.  For a weight term `<ℓ,x>^m/m!` the sum `S^L(p(b), h)` is read off
//! as the `t^m ε^0` coefficient of `Σ_B M^L(s_B(b), c_B)(ξ) e^{<ξ, s_B(b)>}`
//! at `ξ = t(ℓ+ερ)`; all coefficients of negative order in `t` or `ε` must
//! cancel across the vertex sum, which is asserted at runtime by sampling
//! inside the chamber.

use crate::conegen::{
    cone_intermediate_series, vertex_exponential_series, AffineShift, BiLaurentSeries,
    HalfOpenSimplicialCone, GENERIC_PRIMES,
};
use crate::exactlin::{
    dot_rat, int_to_rat_vec, kernel_saturated, primitive_of_rat, rat_int, snf, Int, IntMatrix,
    Rat, RatMatrix, Subspace,
};
use crate::patchwork::{family_from_polytope_faces, patching_rho, rho_cone_closed_form};
use crate::steppoly::{LinearFormQ, QuasiPolynomial};
use crate::{Error, Result};
use num::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// The fixed normal data of a family of polytopes `p(b) = {x : <μ_j,x> ≤ b_j}`
/// indexed by the parameter `b ∈ R^N`.
#[derive(Clone, Debug)]
pub struct ParametricPolytope {
    mu: IntMatrix, // N x d
}

impl ParametricPolytope {
    /// Validates that every `p(b)` is bounded: the rows of `μ` must generate
    /// the whole dual space as a cone, which is checked exactly through the
    /// extreme rays of the recession cone.
    pub fn new(mu: IntMatrix) -> Result<Self> {
        let d = mu.ncols();
        let n = mu.nrows();
        if d == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        if n > 24 {
            return Err(Error::ResourceBound(format!("{n} constraints exceed the supported size")));
        }
        if mu.to_rat().rank() != d {
            return Err(Error::InvalidInput(
                "the linear forms must span the dual space".into(),
            ));
        }
        // recession direction v ≠ 0 with μv ≤ 0 would make p(b) unbounded; if
        // one exists, one exists on a ray cut out by d−1 of the forms
        let ray_masks: Vec<u32> = if d == 1 {
            vec![0]
        } else {
            (0u32..(1 << n)).filter(|m| m.count_ones() as usize == d - 1).collect()
        };
        for mask in ray_masks {
            let rows: Vec<Vec<Int>> = (0..n)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| mu.row(j).to_vec())
                .collect();
            let ker = if rows.is_empty() {
                IntMatrix::identity(d)
            } else {
                kernel_saturated(&IntMatrix::from_int_rows(&rows))
            };
            if ker.nrows() != 1 {
                continue;
            }
            let v = ker.row(0);
            let mv = mu.mul_vec(v);
            if mv.iter().all(|x| !x.is_positive()) || mv.iter().all(|x| !x.is_negative()) {
                return Err(Error::InvalidInput(
                    "p(b) is unbounded: the linear forms do not generate the dual space as a cone"
                        .into(),
                ));
            }
        }
        Ok(ParametricPolytope { mu })
    }

    pub fn mu(&self) -> &IntMatrix {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.mu.ncols()
    }

    pub fn n_params(&self) -> usize {
        self.mu.nrows()
    }
}

/// A subset `B` of constraint indices cutting out one vertex: `s_B(b)` is the
/// solution of `<μ_j, s> = b_j, j ∈ B`, linear in `b`, and `c_B` is the cone
/// of feasible directions `{x : <μ_j, x> ≤ 0, j ∈ B}`.
#[derive(Clone, Debug)]
pub struct BasisSubset {
    indices: Vec<usize>,
    vertex: RatMatrix, // d x N, columns outside B are zero
    cone: HalfOpenSimplicialCone,
}

impl BasisSubset {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn vertex_map(&self) -> &RatMatrix {
        &self.vertex
    }

    pub fn cone(&self) -> &HalfOpenSimplicialCone {
        &self.cone
    }

    pub fn vertex_at(&self, b: &[Rat]) -> Vec<Rat> {
        self.vertex.mul_vec(b)
    }
}

/// All basis subsets: the `d`-subsets of constraints with invertible `μ_B`,
/// each with its vertex map and cone of feasible directions.
pub fn enumerate_bases(pp: &ParametricPolytope) -> Vec<BasisSubset> {
    let d = pp.dim();
    let n = pp.n_params();
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == d)
        .map(|m| (0..n).filter(|j| m >> j & 1 == 1).collect())
        .collect();
    subsets.sort();
    let mut out = Vec::new();
    for indices in subsets {
        let rows: Vec<Vec<Rat>> = indices
            .iter()
            .map(|&j| int_to_rat_vec(pp.mu.row(j)))
            .collect();
        let mu_b = RatMatrix::from_rows(&rows);
        let inv = match mu_b.inverse() {
            Some(m) => m,
            None => continue,
        };
        // vertex map: column j_pos of the inverse lands in column j of s_B
        let mut vertex = RatMatrix::zeros(d, n);
        for (pos, &j) in indices.iter().enumerate() {
            for i in 0..d {
                vertex.set(i, j, inv.at(i, pos).clone());
            }
        }
        // cone generators: negated dual basis of (μ_j, j ∈ B)
        let mut gens = Vec::with_capacity(d);
        for pos in 0..d {
            let col: Vec<Rat> = (0..d).map(|i| -inv.at(i, pos).clone()).collect();
            gens.push(primitive_of_rat(&col).expect("dual basis vectors are nonzero"));
        }
        let cone = HalfOpenSimplicialCone::closed(&IntMatrix::from_int_rows(&gens))
            .expect("dual basis generators are independent");
        out.push(BasisSubset { indices, vertex, cone });
    }
    out
}

/// A chamber, represented by the bases whose vertices are active on it plus
/// an interior sample point.
#[derive(Clone, Debug)]
pub struct Chamber {
    bases: Vec<BasisSubset>,
    sample: Vec<Rat>,
    sets: BTreeSet<Vec<usize>>,
}

impl Chamber {
    pub fn bases(&self) -> &[BasisSubset] {
        &self.bases
    }

    pub fn sample(&self) -> &[Rat] {
        &self.sample
    }

    pub fn basis_index_sets(&self) -> &BTreeSet<Vec<usize>> {
        &self.sets
    }

    pub fn index_lists(&self) -> Vec<Vec<usize>> {
        self.bases.iter().map(|b| b.indices.to_vec()).collect()
    }
}

// slack vector of one basis at b: b_k - <μ_k, s_B(b)> for k ∉ B
fn slacks(pp: &ParametricPolytope, bs: &BasisSubset, b: &[Rat]) -> Vec<Rat> {
    let s = bs.vertex_at(b);
    (0..pp.n_params())
        .filter(|k| !bs.indices.contains(k))
        .map(|k| b[k].clone() - dot_rat(&int_to_rat_vec(pp.mu.row(k)), &s))
        .collect()
}

// the set of feasible bases at b, or None when some slack vanishes
fn basis_signature(
    pp: &ParametricPolytope,
    all: &[BasisSubset],
    b: &[Rat],
) -> Option<BTreeSet<Vec<usize>>> {
    let mut sig = BTreeSet::new();
    for bs in all {
        let sl = slacks(pp, bs, b);
        if sl.iter().any(|x| x.is_zero()) {
            return None;
        }
        if sl.iter().all(|x| x.is_positive()) {
            sig.insert(bs.indices.to_vec());
        }
    }
    Some(sig)
}

/// The chamber containing the given interior point.
pub fn chamber_of(pp: &ParametricPolytope, b: &[Rat]) -> Result<Chamber> {
    if b.len() != pp.n_params() {
        return Err(Error::InvalidInput("parameter vector length mismatch".into()));
    }
    let all = enumerate_bases(pp);
    let sig = basis_signature(pp, &all, b).ok_or(Error::OnWall)?;
    if sig.is_empty() {
        return Err(Error::EmptyChamber);
    }
    let bases: Vec<BasisSubset> = all
        .into_iter()
        .filter(|bs| sig.contains(bs.indices.as_slice()))
        .collect();
    Ok(Chamber { bases, sample: b.to_vec(), sets: sig })
}

/// Deterministic rational points in the open chamber: perturbations of the
/// sample scaled by assorted positive rationals, with membership re-checked
/// exactly.  Used for the runtime cancellation assertions and by tests that
/// compare quasi-polynomials on a chamber.
pub fn chamber_samples(
    pp: &ParametricPolytope,
    tau: &Chamber,
    count: usize,
    salt: u64,
) -> Vec<Vec<Rat>> {
    let n = pp.n_params();
    let all = enumerate_bases(pp);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a2b_c0de ^ salt);
    let mut out = vec![tau.sample.clone()];
    let mut attempts = 0;
    while out.len() < count && attempts < 200 * count {
        attempts += 1;
        let delta: Vec<Rat> = (0..n)
            .map(|_| {
                let num: i64 = rng.gen_range(-9..=9);
                let den: i64 = if rng.gen_bool(0.4) { 1 } else { rng.gen_range(2..=8) };
                Rat::new(num.into(), den.into())
            })
            .collect();
        let mut shrink = Rat::one();
        let mut found = None;
        for _ in 0..60 {
            let b: Vec<Rat> = tau
                .sample
                .iter()
                .zip(&delta)
                .map(|(s, d)| s + d * &shrink)
                .collect();
            if basis_signature(pp, &all, &b).as_ref() == Some(&tau.sets) {
                found = Some(b);
                break;
            }
            shrink /= rat_int(2);
        }
        if let Some(b) = found {
            let num: i64 = rng.gen_range(1..=12);
            let den: i64 = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(2..=6) };
            let scale = Rat::new(num.into(), den.into());
            out.push(b.iter().map(|x| x * &scale).collect());
        }
    }
    out
}

/// A weight `h(x) = Σ c_i <ℓ_i, x>^{m_i} / m_i!`.
#[derive(Clone, Debug)]
pub struct Weight {
    dim: usize,
    terms: Vec<(Rat, LinearFormQ, u32)>,
}

impl Weight {
    pub fn new(dim: usize, terms: Vec<(Rat, LinearFormQ, u32)>) -> Result<Self> {
        for (_, form, _) in &terms {
            if form.n() != dim {
                return Err(Error::InvalidInput("weight form dimension mismatch".into()));
            }
        }
        Ok(Weight { dim, terms })
    }

    /// The constant weight `h = 1`.
    pub fn unit(dim: usize) -> Self {
        Weight { dim, terms: vec![(Rat::one(), LinearFormQ::zero(dim), 0)] }
    }

    /// A single power `<ℓ, x>^m / m!`.
    pub fn power(form: LinearFormQ, m: u32) -> Self {
        Weight { dim: form.n(), terms: vec![(Rat::one(), form, m)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Rat, LinearFormQ, u32)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, _, m)| *m).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (c, form, m) in &self.terms {
            let mut pw = Rat::one();
            let base = form.eval(x);
            let mut fact = Rat::one();
            for i in 0..*m {
                pw *= &base;
                fact *= rat_int(i as i64 + 1);
            }
            acc += c * pw / fact;
        }
        acc
    }
}

// <v, s_B(b)> as a linear quasi-polynomial in b
fn paired_vertex_qp(vertex: &RatMatrix, v: &[Rat]) -> QuasiPolynomial {
    let n = vertex.ncols();
    let coords: Vec<Rat> = (0..n)
        .map(|j| (0..vertex.nrows()).map(|i| vertex.at(i, j) * &v[i]).sum())
        .collect();
    QuasiPolynomial::poly_form(&LinearFormQ::new(&coords))
}

fn rho_vector(d: usize, prime: i64) -> Vec<Rat> {
    let mut v = Vec::with_capacity(d);
    let mut cur = Rat::one();
    for _ in 0..d {
        v.push(cur.clone());
        cur *= rat_int(prime);
    }
    v
}

// Brion vertex sum for one weight term at ξ = t(ℓ+ερ), retrying the
// auxiliary direction ρ over a fixed prime sequence on degeneracy
fn term_vertex_sum(
    bases: &[BasisSubset],
    l: &Subspace,
    ell: &[Rat],
    m: usize,
    d: usize,
    n: usize,
) -> Result<BiLaurentSeries> {
    'retry: for &p in GENERIC_PRIMES.iter() {
        let rho = rho_vector(d, p);
        let mut acc = BiLaurentSeries::zero(n, -(d as i64), (m + d) as i64, d as i64);
        for bs in bases {
            let shift = AffineShift::linear(bs.vertex.clone());
            match cone_intermediate_series(&bs.cone, &shift, l, ell, &rho, m) {
                Ok(ser) => {
                    let pq = paired_vertex_qp(&bs.vertex, ell);
                    let rq = paired_vertex_qp(&bs.vertex, &rho);
                    let x = vertex_exponential_series(&pq, &rq, d, m);
                    acc = acc.add(&ser.mul(&x));
                }
                Err(Error::DegenerateDirection) => continue 'retry,
                Err(e) => return Err(e),
            }
        }
        return Ok(acc);
    }
    Err(Error::DegenerateDirection)
}

fn vanishes_on(qp: &QuasiPolynomial, samples: &[Vec<Rat>]) -> bool {
    qp.is_zero() || samples.iter().all(|b| qp.eval(b).is_zero())
}

// assert the cancellation guaranteed by polynomiality of the vertex sum,
// then read off the t^m ε^0 coefficient
fn extract_checked(
    acc: &BiLaurentSeries,
    m: usize,
    d: usize,
    samples: &[Vec<Rat>],
) -> Result<QuasiPolynomial> {
    let di = d as i64;
    for t in -di..=(m as i64) {
        for e in -di..=-1 {
            if !vanishes_on(&acc.coeff(t, e), samples) {
                return Err(Error::ResidueCancellationFailure);
            }
        }
    }
    for t in -di..=-1 {
        if !vanishes_on(&acc.coeff(t, 0), samples) {
            return Err(Error::ResidueCancellationFailure);
        }
    }
    Ok(acc.coeff(m as i64, 0))
}

/// The intermediate Ehrhart quasi-polynomial `E^L(μ,h,τ)` with
/// `S^L(p(b), h) = E^L(b)` for every `b` in the closure of the chamber.
pub fn intermediate_ehrhart_qp(
    pp: &ParametricPolytope,
    tau: &Chamber,
    l: &Subspace,
    h: &Weight,
) -> Result<QuasiPolynomial> {
    let d = pp.dim();
    let n = pp.n_params();
    if l.ambient() != d || h.dim() != d {
        return Err(Error::InvalidInput("subspace or weight dimension mismatch".into()));
    }
    let samples = chamber_samples(pp, tau, 24, 7);
    let mut result = QuasiPolynomial::zero(n);
    for (c, form, m) in h.terms() {
        let acc = term_vertex_sum(&tau.bases, l, &form.coords(), *m as usize, d, n)?;
        let qp = extract_checked(&acc, *m as usize, d, &samples)?;
        result = result.add(&qp.scale(c));
    }
    Ok(result)
}

/// The Barvinok-patched quasi-polynomial: the patched sum over the family of
/// face subspaces of codimension ≤ k, with Möbius patching weights.
pub fn barvinok_patched_qp(
    pp: &ParametricPolytope,
    tau: &Chamber,
    k: usize,
    h: &Weight,
) -> Result<QuasiPolynomial> {
    let d = pp.dim();
    if k > d {
        return Err(Error::InvalidInput(format!("codimension bound k={k} exceeds d={d}")));
    }
    let family = family_from_polytope_faces(&pp.mu, &tau.index_lists(), k)?;
    let rho = patching_rho(&family);
    let mut result = QuasiPolynomial::zero(pp.n_params());
    for (l, w) in &rho {
        if w.is_zero() {
            continue;
        }
        let e = intermediate_ehrhart_qp(pp, tau, l, h)?;
        result = result.add(&e.scale(w));
    }
    Ok(result)
}

/// The cone-by-cone patched quasi-polynomial: each vertex cone is patched
/// separately over its own face subspaces, with closed-form weights.
pub fn cone_by_cone_qp(
    pp: &ParametricPolytope,
    tau: &Chamber,
    k: usize,
    h: &Weight,
) -> Result<QuasiPolynomial> {
    let d = pp.dim();
    let n = pp.n_params();
    if k > d {
        return Err(Error::InvalidInput(format!("codimension bound k={k} exceeds d={d}")));
    }
    let samples = chamber_samples(pp, tau, 24, 11);
    let mut result = QuasiPolynomial::zero(n);
    for (c, form, m) in h.terms() {
        let ell = form.coords();
        let mm = *m as usize;
        let mut found = None;
        for &p in GENERIC_PRIMES.iter() {
            let rho = rho_vector(d, p);
            let mut acc = BiLaurentSeries::zero(n, -(d as i64), (mm + d) as i64, d as i64);
            let mut ok = true;
            'vertices: for bs in &tau.bases {
                let shift = AffineShift::linear(bs.vertex.clone());
                let mut patched =
                    BiLaurentSeries::zero(n, -(d as i64), (mm + d) as i64, d as i64);
                for mask in 0u32..(1 << d) {
                    let card = mask.count_ones() as usize;
                    if card + k < d {
                        continue;
                    }
                    let w = rho_cone_closed_form(d, k, card)?;
                    if w.is_zero() {
                        continue;
                    }
                    let rows: Vec<Vec<Int>> = (0..d)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| bs.cone.gens().row(i).to_vec())
                        .collect();
                    let l_i = Subspace::from_int_rows(d, &rows);
                    match cone_intermediate_series(&bs.cone, &shift, &l_i, &ell, &rho, mm) {
                        Ok(s) => patched = patched.add(&s.scale(&w)),
                        Err(Error::DegenerateDirection) => {
                            ok = false;
                            break 'vertices;
                        }
                        Err(e) => return Err(e),
                    }
                }
                let pq = paired_vertex_qp(&bs.vertex, &ell);
                let rq = paired_vertex_qp(&bs.vertex, &rho);
                acc = acc.add(&patched.mul(&vertex_exponential_series(&pq, &rq, d, mm)));
            }
            if ok {
                found = Some(acc);
                break;
            }
        }
        let acc = found.ok_or(Error::DegenerateDirection)?;
        let qp = extract_checked(&acc, mm, d, &samples)?;
        result = result.add(&qp.scale(c));
    }
    Ok(result)
}

/// Choice of approximation for a dilation computation.
#[derive(Clone, Debug)]
pub enum DilationVariant {
    Exact(Subspace),
    Barvinok(usize),
    ConeByCone(usize),
}

/// Specialize a chamber quasi-polynomial along the ray `b = t·b₀`, giving a
/// one-variable quasi-polynomial valid for all rational `t ≥ 0`.
pub fn dilation_qp(
    pp: &ParametricPolytope,
    tau: &Chamber,
    b0: &[Rat],
    variant: &DilationVariant,
    h: &Weight,
) -> Result<QuasiPolynomial> {
    if b0.len() != pp.n_params() {
        return Err(Error::InvalidInput("parameter vector length mismatch".into()));
    }
    for bs in &tau.bases {
        if slacks(pp, bs, b0).iter().any(|x| x.is_negative()) {
            return Err(Error::InvalidInput(
                "dilation base point lies outside the chamber closure".into(),
            ));
        }
    }
    let qp = match variant {
        DilationVariant::Exact(l) => intermediate_ehrhart_qp(pp, tau, l, h)?,
        DilationVariant::Barvinok(k) => barvinok_patched_qp(pp, tau, *k, h)?,
        DilationVariant::ConeByCone(k) => cone_by_cone_qp(pp, tau, *k, h)?,
    };
    let mut t = RatMatrix::zeros(pp.n_params(), 1);
    for (j, v) in b0.iter().enumerate() {
        t.set(j, 0, v.clone());
    }
    Ok(qp.specialize(&t))
}

/// Support parameters of a Minkowski linear system: `b^i_j` is the maximum of
/// `<μ_j, x>` over the vertices of the i-th polytope.  Each `p(b^i)` is
/// required to reproduce exactly the given vertex set.
pub fn minkowski_support(
    vertex_lists: &[Vec<Vec<Rat>>],
    pp: &ParametricPolytope,
) -> Result<Vec<Vec<Rat>>> {
    let bases = enumerate_bases(pp);
    let mut out = Vec::with_capacity(vertex_lists.len());
    for list in vertex_lists {
        if list.is_empty() {
            return Err(Error::InvalidInput("empty vertex list".into()));
        }
        let mut b = Vec::with_capacity(pp.n_params());
        for j in 0..pp.n_params() {
            let row = int_to_rat_vec(pp.mu.row(j));
            let m = list
                .iter()
                .map(|v| dot_rat(&row, v))
                .max()
                .expect("nonempty list");
            b.push(m);
        }
        // conv(list) ⊆ p(b) holds by construction, and the two are equal
        // exactly when every vertex of p(b) is one of the given points, so
        // the validity check is a subset test on the reconstructed vertices
        let given: BTreeSet<Vec<Rat>> = list.iter().cloned().collect();
        for bs in &bases {
            if slacks(pp, bs, &b).iter().all(|x| !x.is_negative())
                && !given.contains(&bs.vertex_at(&b))
            {
                return Err(Error::NormalsInsufficient);
            }
        }
        out.push(b);
    }
    Ok(out)
}

/// Restate a partition polytope `{y ≥ 0 : Σ y_j φ_j = λ}` as a parametric
/// polytope on the kernel of `Φ`, returning the parameter vector whose
/// translate carries one onto the other.
pub fn partition_to_parametric(
    phi: &IntMatrix,
    lambda: &[Rat],
) -> Result<(ParametricPolytope, Vec<Rat>)> {
    let n = phi.ncols();
    if lambda.len() != phi.nrows() {
        return Err(Error::InvalidInput("right-hand side length mismatch".into()));
    }
    if phi.to_rat().rank() != phi.nrows() {
        return Err(Error::InvalidInput("Φ must have full row rank".into()));
    }
    let ker = kernel_saturated(phi);
    let d = ker.nrows();
    if d == 0 {
        return Err(Error::InvalidInput("Φ has trivial kernel".into()));
    }
    // μ_j is the restriction of -y_j to the kernel, in lattice coordinates
    let mut mu = IntMatrix::zeros(n, d);
    for j in 0..n {
        for i in 0..d {
            mu.set(j, i, -ker.at(i, j).clone());
        }
    }
    let pp = ParametricPolytope::new(mu).map_err(|_| {
        Error::InvalidInput("Φ must generate a full-dimensional pointed cone".into())
    })?;
    // integer solution of Φ b = λ through the Smith form Φ = P⁻¹ D Q⁻¹
    let (dm, p, q) = snf(phi);
    let rhs = p.to_rat().mul_vec(lambda);
    let mut u = vec![Rat::zero(); n];
    for i in 0..phi.nrows() {
        let di = dm.at(i, i);
        debug_assert!(!di.is_zero(), "full row rank gives nonzero diagonal entries");
        let ui = &rhs[i] / Rat::from_integer(di.clone());
        if !ui.is_integer() {
            return Err(Error::InvalidInput(
                "λ is not in the lattice generated by the columns of Φ".into(),
            ));
        }
        u[i] = ui;
    }
    let b = q.to_rat().mul_vec(&u);
    Ok((pp, b))
}
