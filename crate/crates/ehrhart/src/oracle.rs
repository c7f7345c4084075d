//! Brute-force reference values for `S^L(p, h)` at desk scale: enumerate the
//! projected lattice, slice the polytope by exact halfspace intersection, and
//! integrate over each slice with the simplex closed form.  Shares only the
//! arithmetic types with the decomposition pipeline, so agreement between the
//! two routes is meaningful evidence.

use crate::conegen::HalfOpenSimplicialCone;
use crate::exactlin::{dot_rat, int_to_rat_vec, kernel_saturated, IntMatrix, Rat, RatMatrix, Subspace};
use crate::parametric::Weight;
use crate::steppoly::LinearFormQ;
use crate::{Error, Result};
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// A bounded polytope as a vertex list, with the halfspace description kept
/// alongside when it is known (slicing needs it; integration of a simplex or
/// a polygon does not).
#[derive(Clone, Debug)]
pub struct VPolytope {
    d: usize,
    vertices: Vec<Vec<Rat>>,
    hrep: Option<(Vec<Vec<Rat>>, Vec<Rat>)>,
}

impl VPolytope {
    pub fn from_vertices(vertices: &[Vec<Rat>]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("vertex list must be nonempty".into()));
        }
        let d = vertices[0].len();
        if vertices.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidInput("vertices of mixed dimension".into()));
        }
        Ok(VPolytope { d, vertices: vertices.to_vec(), hrep: None })
    }

    pub fn from_h(mu: &IntMatrix, b: &[Rat]) -> Result<Self> {
        let rows: Vec<Vec<Rat>> = (0..mu.nrows()).map(|j| int_to_rat_vec(mu.row(j))).collect();
        from_h_rational(&rows, b, mu.ncols())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        // advance the rightmost index that can still move
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// vertex enumeration over d-subsets of constraints, with an exact
// boundedness check on the recession cone
fn from_h_rational(rows: &[Vec<Rat>], rhs: &[Rat], d: usize) -> Result<VPolytope> {
    let n = rows.len();
    if rhs.len() != n {
        return Err(Error::InvalidInput("right-hand side length mismatch".into()));
    }
    if n > 64 {
        return Err(Error::ResourceBound(format!("{n} constraints exceed the oracle scale")));
    }
    let a = RatMatrix::from_rows(rows);
    if a.rank() != d {
        return Err(Error::InvalidInput(
            "the constraint system must have full rank to describe a bounded set".into(),
        ));
    }
    let sub_size = if d == 0 { 0 } else { d - 1 };
    for c in combinations(n, sub_size) {
        let picked: Vec<Vec<Rat>> = c.iter().map(|&j| rows[j].clone()).collect();
        let ker = if picked.is_empty() {
            IntMatrix::identity(d)
        } else {
            kernel_of_rational(&picked)
        };
        if ker.nrows() != 1 {
            continue;
        }
        let v = int_to_rat_vec(ker.row(0));
        let av: Vec<Rat> = rows.iter().map(|r| dot_rat(r, &v)).collect();
        if av.iter().all(|x| !x.is_positive()) || av.iter().all(|x| !x.is_negative()) {
            return Err(Error::InvalidInput(
                "the constraint system describes an unbounded set".into(),
            ));
        }
    }
    let mut verts = BTreeSet::new();
    for c in combinations(n, d) {
        let m = RatMatrix::from_rows(&c.iter().map(|&j| rows[j].clone()).collect::<Vec<_>>());
        let b_sub: Vec<Rat> = c.iter().map(|&j| rhs[j].clone()).collect();
        let x = match m.solve_unique(&b_sub) {
            Some(x) => x,
            None => continue,
        };
        if rows.iter().zip(rhs).all(|(r, bj)| dot_rat(r, &x) <= *bj) {
            verts.insert(x);
        }
    }
    Ok(VPolytope {
        d,
        vertices: verts.into_iter().collect(),
        hrep: Some((rows.to_vec(), rhs.to_vec())),
    })
}

// saturated integer kernel of a rational row span, via clearing denominators
fn kernel_of_rational(rows: &[Vec<Rat>]) -> IntMatrix {
    let int_rows: Vec<Vec<crate::exactlin::Int>> = rows
        .iter()
        .map(|r| {
            let lcm = r.iter().fold(crate::exactlin::Int::one(), |acc, x| {
                num::Integer::lcm(&acc, x.denom())
            });
            r.iter()
                .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    kernel_saturated(&IntMatrix::from_int_rows(&int_rows))
}

/// Facet description of a simplex from its `d+1` affinely independent
/// vertices: one primitive integer normal per opposite vertex, oriented so
/// the simplex satisfies `<μ_j, x> ≤ b_j`.
pub fn simplex_hrep(vertices: &[Vec<Rat>]) -> Result<(IntMatrix, Vec<Rat>)> {
    if vertices.is_empty() {
        return Err(Error::InvalidInput("vertex list must be nonempty".into()));
    }
    let d = vertices[0].len();
    if vertices.len() != d + 1 {
        return Err(Error::InvalidInput("a d-simplex needs d+1 vertices".into()));
    }
    if affine_dim(vertices) != d {
        return Err(Error::InvalidInput("simplex vertices are affinely dependent".into()));
    }
    let mut mu_rows = Vec::with_capacity(d + 1);
    let mut b = Vec::with_capacity(d + 1);
    for e in 0..=d {
        let facet: Vec<&Vec<Rat>> = (0..=d).filter(|&i| i != e).map(|i| &vertices[i]).collect();
        let diffs: Vec<Vec<Rat>> = facet[1..]
            .iter()
            .map(|v| v.iter().zip(facet[0]).map(|(a, b)| a - b).collect())
            .collect();
        let ker = kernel_of_rational(&diffs);
        debug_assert_eq!(ker.nrows(), 1, "facet differences span a hyperplane");
        let mut phi = ker.row(0).to_vec();
        let mut c = dot_rat(&int_to_rat_vec(&phi), facet[0]);
        let at_e = dot_rat(&int_to_rat_vec(&phi), &vertices[e]);
        debug_assert!(at_e != c, "excluded vertex cannot lie on its facet");
        if at_e > c {
            for x in &mut phi {
                *x = -x.clone();
            }
            c = -c;
        }
        mu_rows.push(phi);
        b.push(c);
    }
    Ok((IntMatrix::from_int_rows(&mu_rows), b))
}

fn affine_dim(vertices: &[Vec<Rat>]) -> usize {
    if vertices.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Rat>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    RatMatrix::from_rows(&diffs).rank()
}

fn factorial(n: u32) -> Rat {
    let mut f = Rat::one();
    for i in 1..=n {
        f *= Rat::from_integer(i.into());
    }
    f
}

// complete homogeneous symmetric polynomial h_m of the given values
fn hom_sym(vals: &[Rat], m: u32) -> Rat {
    let mut h = vec![Rat::zero(); m as usize + 1];
    h[0] = Rat::one();
    for v in vals {
        for j in 1..=m as usize {
            let inc = v * &h[j - 1];
            h[j] += inc;
        }
    }
    h[m as usize].clone()
}

// ∫_Δ <ℓ,x>^m / m! dx = |det(v_i − v_0)| · h_m(<ℓ,v_0>..<ℓ,v_k>) / (k+m)!
fn simplex_integral(simplex: &[Vec<Rat>], ell: &[Rat], m: u32) -> Rat {
    let k = simplex.len() - 1;
    let diffs: Vec<Vec<Rat>> = simplex[1..]
        .iter()
        .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| a - b).collect())
        .collect();
    let det = RatMatrix::from_rows(&diffs).det();
    let vals: Vec<Rat> = simplex.iter().map(|v| dot_rat(ell, v)).collect();
    let num = if det.is_negative() { -det } else { det };
    num * hom_sym(&vals, m) / factorial(k as u32 + m)
}

// triangulation of a k-face by coning its first vertex over the facets that
// avoid it; exact because every supporting hyperplane subset of the face's
// vertices of affine dimension k−1 is a facet
fn triangulate_face(
    vertices: &[Vec<Rat>],
    rows: &[Vec<Rat>],
    rhs: &[Rat],
    face: &[usize],
    k: usize,
) -> Vec<Vec<usize>> {
    if face.len() == k + 1 {
        return vec![face.to_vec()];
    }
    let v0 = face[0];
    let on = |j: usize, v: usize| dot_rat(&rows[j], &vertices[v]) == rhs[j];
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for j in 0..rows.len() {
        if on(j, v0) {
            continue;
        }
        let sub: Vec<usize> = face.iter().copied().filter(|&v| on(j, v)).collect();
        if sub.is_empty() {
            continue;
        }
        let pts: Vec<Vec<Rat>> = sub.iter().map(|&v| vertices[v].clone()).collect();
        if affine_dim(&pts) + 1 != k {
            continue;
        }
        if !seen.insert(sub.clone()) {
            continue;
        }
        for s in triangulate_face(vertices, rows, rhs, &sub, k - 1) {
            let mut simplex = vec![v0];
            simplex.extend(s);
            out.push(simplex);
        }
    }
    out
}

// convex-position polygon order around the centroid, by exact pseudo-angle
fn polygon_order(vertices: &[Vec<Rat>]) -> Vec<usize> {
    let n = Rat::from_integer((vertices.len() as i64).into());
    let cx: Rat = vertices.iter().map(|v| v[0].clone()).sum::<Rat>() / &n;
    let cy: Rat = vertices.iter().map(|v| v[1].clone()).sum::<Rat>() / &n;
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let half = |i: usize| {
        let y = &vertices[i][1] - &cy;
        let x = &vertices[i][0] - &cx;
        usize::from(!(y.is_positive() || (y.is_zero() && x.is_positive())))
    };
    idx.sort_by(|&a, &b| {
        half(a).cmp(&half(b)).then_with(|| {
            let ax = &vertices[a][0] - &cx;
            let ay = &vertices[a][1] - &cy;
            let bx = &vertices[b][0] - &cx;
            let by = &vertices[b][1] - &cy;
            (&bx * &ay).cmp(&(&ax * &by))
        })
    });
    idx
}

fn triangulate(p: &VPolytope) -> Result<Vec<Vec<Vec<Rat>>>> {
    let d = p.d;
    let verts = &p.vertices;
    if verts.len() == d + 1 {
        return Ok(vec![verts.clone()]);
    }
    if d == 1 {
        let lo = verts.iter().min().unwrap().clone();
        let hi = verts.iter().max().unwrap().clone();
        return Ok(vec![vec![lo, hi]]);
    }
    if let Some((rows, rhs)) = &p.hrep {
        let face: Vec<usize> = (0..verts.len()).collect();
        return Ok(triangulate_face(verts, rows, rhs, &face, d)
            .into_iter()
            .map(|s| s.into_iter().map(|i| verts[i].clone()).collect())
            .collect());
    }
    if d == 2 {
        let order = polygon_order(verts);
        let fan: Vec<Vec<Vec<Rat>>> = (1..order.len() - 1)
            .map(|i| {
                vec![
                    verts[order[0]].clone(),
                    verts[order[i]].clone(),
                    verts[order[i + 1]].clone(),
                ]
            })
            .collect();
        return Ok(fan);
    }
    Err(Error::InvalidInput(
        "triangulation beyond a simplex or a polygon needs the halfspace description".into(),
    ))
}

fn integrate_power(p: &VPolytope, ell: &[Rat], m: u32) -> Result<Rat> {
    if p.vertices.is_empty() || affine_dim(&p.vertices) < p.d {
        return Ok(Rat::zero());
    }
    let mut acc = Rat::zero();
    for simplex in triangulate(p)? {
        acc += simplex_integral(&simplex, ell, m);
    }
    Ok(acc)
}

/// `∫_p <ℓ,x>^m / m! dx` in the lattice-normalized measure; `0` for empty or
/// lower-dimensional `p`.
pub fn integrate_polytope(p: &VPolytope, ell: &LinearFormQ, m: u32) -> Result<Rat> {
    integrate_power(p, &ell.coords(), m)
}

/// `∫_p h dx` for a full weight.
pub fn integrate_weight(p: &VPolytope, h: &Weight) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (c, form, m) in h.terms() {
        acc += c * integrate_power(p, &form.coords(), *m)?;
    }
    Ok(acc)
}

// ∫ (a0 + <lin, t>)^m / m! over the slice, by binomial expansion
fn integrate_affine_power(p: &VPolytope, a0: &Rat, lin: &[Rat], m: u32) -> Result<Rat> {
    let mut acc = Rat::zero();
    let mut outer = Rat::one();
    for j in (0..=m).rev() {
        // outer = a0^{m-j} / (m-j)!
        acc += &outer * integrate_power(p, lin, j)?;
        let step = m - j + 1;
        outer = outer * a0 / Rat::from_integer(step.into());
    }
    Ok(acc)
}

fn int_bounds(vals: &[Rat]) -> (i64, i64) {
    let lo = vals.iter().min().unwrap().ceil().to_integer();
    let hi = vals.iter().max().unwrap().floor().to_integer();
    (lo.to_i64().unwrap_or(i64::MIN / 4), hi.to_i64().unwrap_or(i64::MAX / 4))
}

const ENUM_BOUND: i128 = 1_000_000;

// odometer over the integer box [lo_i, hi_i], guarded by the global bound
fn integer_box(bounds: &[(i64, i64)]) -> Result<Vec<Vec<i64>>> {
    let mut total: i128 = 1;
    for (lo, hi) in bounds {
        if hi < lo {
            return Ok(Vec::new());
        }
        total = total.saturating_mul((hi - lo + 1) as i128);
        if total > ENUM_BOUND {
            return Err(Error::ResourceBound(format!(
                "enumeration of {total} lattice points exceeds the oracle bound"
            )));
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<i64> = bounds.iter().map(|(lo, _)| *lo).collect();
    loop {
        out.push(cur.clone());
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] < bounds[i].1 {
                cur[i] += 1;
                for j in i + 1..bounds.len() {
                    cur[j] = bounds[j].0;
                }
                break;
            }
        }
    }
}

/// The intermediate sum `S^L(p, h)`: over classes `y` of the projected
/// lattice, the integrals of `h` over the slices `p ∩ (y+L)` in the measure
/// normalized by `Λ∩L`.  For `L = {0}` this is the weighted lattice point
/// count; for `L = V` the integral.
pub fn brute_intermediate_sum(p: &VPolytope, l: &Subspace, h: &Weight) -> Result<Rat> {
    let d = p.d;
    if l.ambient() != d || h.dim() != d {
        return Err(Error::InvalidInput("subspace or weight dimension mismatch".into()));
    }
    if p.vertices.is_empty() {
        return Ok(Rat::zero());
    }
    let ell = l.dim();
    if ell == d {
        return integrate_weight(p, h);
    }
    let (rows, rhs) = p
        .hrep
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("slicing needs the halfspace description".into()))?;
    if ell == 0 {
        let bounds: Vec<(i64, i64)> = (0..d)
            .map(|i| int_bounds(&p.vertices.iter().map(|v| v[i].clone()).collect::<Vec<_>>()))
            .collect();
        let mut acc = Rat::zero();
        for pt in integer_box(&bounds)? {
            let x: Vec<Rat> = pt.iter().map(|&c| Rat::from_integer(c.into())).collect();
            if rows.iter().zip(rhs).all(|(r, bj)| dot_rat(r, &x) <= *bj) {
                acc += h.eval(&x);
            }
        }
        return Ok(acc);
    }
    let pl = l.projected_lattice();
    let bl = l.basis();
    // quotient coordinates of the vertices bound the classes that can meet p
    let bounds: Vec<(i64, i64)> = (0..pl.q)
        .map(|i| {
            let row = int_to_rat_vec(pl.proj.row(i));
            int_bounds(&p.vertices.iter().map(|v| dot_rat(&row, v)).collect::<Vec<_>>())
        })
        .collect();
    let mut acc = Rat::zero();
    for y in integer_box(&bounds)? {
        // slice parametrized by x = section^T y + basis^T t
        let mut sy = vec![Rat::zero(); d];
        for (i, &yi) in y.iter().enumerate() {
            for c in 0..d {
                sy[c] += Rat::from_integer(yi.into()) * Rat::from_integer(pl.section.at(i, c).clone());
            }
        }
        let t_rows: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| (0..ell).map(|i| dot_rat(&int_to_rat_vec(bl.row(i)), r)).collect())
            .collect();
        let t_rhs: Vec<Rat> = rows.iter().zip(rhs).map(|(r, bj)| bj - dot_rat(r, &sy)).collect();
        let slice = from_h_rational(&t_rows, &t_rhs, ell)?;
        for (c, form, m) in h.terms() {
            let coords = form.coords();
            let a0 = dot_rat(&coords, &sy);
            let lin: Vec<Rat> = (0..ell)
                .map(|i| dot_rat(&int_to_rat_vec(bl.row(i)), &coords))
                .collect();
            acc += c * integrate_affine_power(&slice, &a0, &lin, *m)?;
        }
    }
    Ok(acc)
}

// membership in a half-open simplicial cone, solved locally from the
// generator coordinates
fn cone_member(cone: &HalfOpenSimplicialCone, x: &[Rat]) -> bool {
    match cone.gens().to_rat().transpose().solve_unique(x) {
        None => false,
        Some(t) => t
            .iter()
            .zip(cone.open_flags())
            .all(|(ti, &o)| if o { ti.is_positive() } else { !ti.is_negative() }),
    }
}

/// True iff the signed indicator sum of the cells matches the signed
/// indicator of the target at every sample point.
pub fn indicator_check(
    cells: &[HalfOpenSimplicialCone],
    target: &HalfOpenSimplicialCone,
    points: &[Vec<Rat>],
) -> bool {
    points.iter().all(|x| {
        let total: i32 = cells
            .iter()
            .map(|c| if cone_member(c, x) { c.sign() } else { 0 })
            .sum();
        let want = if cone_member(target, x) { target.sign() } else { 0 };
        total == want
    })
}
