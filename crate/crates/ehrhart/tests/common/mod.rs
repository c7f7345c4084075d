// shared fixtures for the integration suites: the worked examples with their
// closed-form quasi-polynomials, and seeded random instance generators
#![allow(dead_code)]

use ehrhart::exactlin::{rat, rat_int, IntMatrix, Rat, Subspace};
use ehrhart::oracle::simplex_hrep;
use ehrhart::parametric::{chamber_of, Chamber, ParametricPolytope};
use ehrhart::steppoly::{LinearFormQ, QuasiPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type QP = QuasiPolynomial;

pub fn rv(xs: &[i64]) -> Vec<Rat> {
    xs.iter().map(|&x| rat_int(x)).collect()
}

pub fn poly(coords: &[Rat]) -> QP {
    QP::poly_form(&LinearFormQ::new(coords))
}

pub fn step(coords: &[Rat]) -> QP {
    QP::step_form(&LinearFormQ::new(coords))
}

pub fn pp(rows: &[Vec<i64>]) -> ParametricPolytope {
    ParametricPolytope::new(IntMatrix::from_rows(rows)).unwrap()
}

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ salt)
}

pub fn quadrilateral() -> ParametricPolytope {
    pp(&[vec![-1, 0], vec![0, -1], vec![1, 1], vec![-1, 1]])
}

// exact count of the quadrilateral family on the chamber of (0,0,5,3),
// written out degree by degree in the four parameters
pub fn quad_e2() -> QP {
    let b1 = rv(&[1, 0, 0, 0]);
    let b2 = rv(&[0, 1, 0, 0]);
    let b3 = rv(&[0, 0, 1, 0]);
    let b4 = rv(&[0, 0, 0, 1]);
    QP::zero(4)
        .add(&poly(&b1).mul(&poly(&b1)).scale(&rat(-1, 2)))
        .add(&poly(&b2).mul(&poly(&b2)).scale(&rat(1, 2)))
        .add(&poly(&b3).mul(&poly(&b3)).scale(&rat(1, 4)))
        .add(&poly(&b4).mul(&poly(&b4)).scale(&rat(-1, 4)))
        .add(&poly(&b1).mul(&poly(&b2)))
        .add(&poly(&b1).mul(&poly(&b4)))
        .add(&poly(&b2).mul(&poly(&b3)))
        .add(&poly(&b3).mul(&poly(&b4)).scale(&rat(1, 2)))
}

pub fn quad_e1() -> QP {
    let b1 = rv(&[1, 0, 0, 0]);
    let b2 = rv(&[0, 1, 0, 0]);
    let b3 = rv(&[0, 0, 1, 0]);
    let b4 = rv(&[0, 0, 0, 1]);
    let (s1, s2, s3, s4) = (step(&b1), step(&b2), step(&b3), step(&b4));
    let c1 = QP::constant(4, rat(1, 2)).add(&s1).sub(&s2).sub(&s4);
    let c2 = QP::constant(4, rat(3, 2)).sub(&s1).sub(&s2).sub(&s3);
    let c3 = QP::one(4)
        .sub(&s2)
        .sub(&s3.scale(&rat(1, 2)))
        .sub(&s4.scale(&rat(1, 2)));
    let c4 = QP::constant(4, rat(1, 2))
        .sub(&s1)
        .sub(&s3.scale(&rat(1, 2)))
        .add(&s4.scale(&rat(1, 2)));
    c1.mul(&poly(&b1))
        .add(&c2.mul(&poly(&b2)))
        .add(&c3.mul(&poly(&b3)))
        .add(&c4.mul(&poly(&b4)))
}

pub fn quad_e0() -> QP {
    let s1 = step(&rv(&[1, 0, 0, 0]));
    let s2 = step(&rv(&[0, 1, 0, 0]));
    let s3 = step(&rv(&[0, 0, 1, 0]));
    let s4 = step(&rv(&[0, 0, 0, 1]));
    let s34 = step(&[rat_int(0), rat_int(0), rat(1, 2), rat(1, 2)]);
    QP::one(4)
        .sub(&s1.scale(&rat(1, 2)))
        .sub(&s2.scale(&rat(3, 2)))
        .sub(&s3)
        .sub(&s4.scale(&rat(1, 2)))
        .sub(&s1.mul(&s1).scale(&rat(1, 2)))
        .add(&s2.mul(&s2).scale(&rat(1, 2)))
        .sub(&s4.mul(&s4).scale(&rat(1, 2)))
        .sub(&s34.mul(&s34))
        .add(&s1.mul(&s2))
        .add(&s1.mul(&s4))
        .add(&s2.mul(&s3))
        .add(&s3.mul(&s34))
        .add(&s4.mul(&s34))
}

pub fn quad_vert_e1() -> QP {
    let b1 = rv(&[1, 0, 0, 0]);
    let b2 = rv(&[0, 1, 0, 0]);
    let b4 = rv(&[0, 0, 0, 1]);
    let s1 = step(&b1);
    poly(&b1)
        .scale(&rat(-1, 2))
        .add(&poly(&b2).scale(&rat(1, 2)))
        .add(&poly(&b4).scale(&rat(1, 2)))
        .add(&s1.mul(&poly(&b1)))
        .sub(&s1.mul(&poly(&b2)))
        .sub(&s1.mul(&poly(&b4)))
}

pub fn quad_vert_e0() -> QP {
    let s1 = step(&rv(&[1, 0, 0, 0]));
    let s23 = step(&rv(&[0, 1, 1, 0]));
    let s34 = step(&[rat_int(0), rat_int(0), rat(1, 2), rat(-1, 2)]);
    s1.scale(&rat(1, 2))
        .add(&s23.scale(&rat(1, 2)))
        .sub(&s34)
        .sub(&s1.mul(&s1).scale(&rat(1, 2)))
        .sub(&s23.mul(&s23).scale(&rat(1, 2)))
        .add(&s34.mul(&s34))
}

// triangle with vertices (1,1), (1,2), (2,2): x1 >= 1, x2 <= 2, x1 <= x2
pub fn triangle() -> (ParametricPolytope, Vec<Rat>) {
    (pp(&[vec![-1, 0], vec![0, 1], vec![1, -1]]), rv(&[-1, 2, 0]))
}

fn triangle_common_t() -> QP {
    // t^2/2 + (3/2 - {-t} - {2t}) t
    let t = poly(&rv(&[1]));
    let sm = step(&rv(&[-1]));
    let s2 = step(&rv(&[2]));
    t.mul(&t).scale(&rat(1, 2)).add(
        &QP::constant(1, rat(3, 2)).sub(&sm).sub(&s2).mul(&t),
    )
}

pub fn triangle_exact_t() -> QP {
    let sm = step(&rv(&[-1]));
    let s2 = step(&rv(&[2]));
    triangle_common_t()
        .add(&s2.mul(&s2).scale(&rat(1, 2)))
        .add(&sm.mul(&sm).scale(&rat(1, 2)))
        .add(&s2.mul(&sm))
        .sub(&sm.scale(&rat(3, 2)))
        .sub(&s2.scale(&rat(3, 2)))
        .add(&QP::one(1))
}

pub fn triangle_cbc_k1_t() -> QP {
    let sm = step(&rv(&[-1]));
    let s2 = step(&rv(&[2]));
    triangle_common_t()
        .add(&QP::constant(1, rat(1, 4)))
        .sub(&sm.scale(&rat(1, 2)))
        .sub(&s2.scale(&rat(1, 2)))
        .add(&sm.mul(&sm).scale(&rat(1, 2)))
        .add(&s2.mul(&s2).scale(&rat(1, 2)))
}

pub fn triangle_barvinok_k1_t() -> QP {
    let s1 = step(&rv(&[1]));
    triangle_common_t()
        .sub(&s1.mul(&s1).scale(&rat(1, 2)))
        .add(&s1.scale(&rat(1, 2)))
}

pub fn hexagon() -> ParametricPolytope {
    pp(&[
        vec![1, 0],
        vec![1, 1],
        vec![-1, 1],
        vec![-1, 0],
        vec![-1, -1],
        vec![1, -1],
    ])
}

// support parameters of the two generating triangles of the hexagon system
pub fn hex_b1() -> Vec<Rat> {
    vec![rat_int(0), rat_int(0), rat_int(1), rat(1, 2), rat_int(1), rat_int(0)]
}

pub fn hex_b2() -> Vec<Rat> {
    rv(&[1, 2, 0, 0, 0, 2])
}

// closed forms in the two Minkowski coefficients (t1, t2)
pub fn hex_e2() -> QP {
    let t1 = poly(&rv(&[1, 0]));
    let t2 = poly(&rv(&[0, 1]));
    t1.mul(&t1)
        .scale(&rat(1, 4))
        .add(&t1.mul(&t2).scale(&rat_int(2)))
        .add(&t2.mul(&t2))
}

pub fn hex_e1() -> QP {
    let t1 = poly(&rv(&[1, 0]));
    let t2 = poly(&rv(&[0, 1]));
    let sh = step(&[rat(1, 2), rat_int(0)]);
    let s2 = step(&rv(&[0, 2]));
    let su = step(&rv(&[1, 0]));
    let sv = step(&rv(&[0, 1]));
    QP::one(2)
        .sub(&sh)
        .sub(&s2)
        .mul(&t1)
        .add(&QP::constant(2, rat_int(2)).sub(&su.scale(&rat_int(2))).sub(&sv.scale(&rat_int(2))).mul(&t2))
}

pub fn hex_e0() -> QP {
    let su = step(&rv(&[1, 0]));
    let sv = step(&rv(&[0, 1]));
    let sh = step(&[rat(1, 2), rat_int(0)]);
    let s2 = step(&rv(&[0, 2]));
    let shv = step(&[rat(1, 2), rat_int(1)]);
    QP::one(2)
        .sub(&sv.mul(&sv))
        .sub(&s2.mul(&s2))
        .add(&su.mul(&sh).scale(&rat_int(2)))
        .add(&shv.mul(&su).scale(&rat_int(2)))
        .sub(&sh.mul(&sh))
        .sub(&shv.mul(&shv).scale(&rat_int(2)))
        .sub(&su)
        .sub(&s2)
        .sub(&su.mul(&su))
        .add(&s2.mul(&shv).scale(&rat_int(2)))
        .add(&sv.mul(&s2).scale(&rat_int(2)))
}

pub fn hex_l1() -> QP {
    let t1 = poly(&rv(&[1, 0]));
    let t2 = poly(&rv(&[0, 1]));
    let sh = step(&[rat(1, 2), rat_int(0)]);
    let sv = step(&rv(&[0, 1]));
    QP::constant(2, rat(1, 2))
        .sub(&sh)
        .mul(&t1)
        .add(&QP::one(2).sub(&sv.scale(&rat_int(2))).mul(&t2))
}

pub fn hex_l0() -> QP {
    let sv = step(&rv(&[0, 1]));
    let sh = step(&[rat(1, 2), rat_int(0)]);
    let sp = step(&[rat(-1, 2), rat_int(1)]);
    let sm = step(&[rat(1, 2), rat_int(-1)]);
    QP::zero(2)
        .sub(&sp)
        .sub(&sm)
        .add(&sv)
        .add(&sm.mul(&sm))
        .add(&sh)
        .sub(&sh.mul(&sh))
        .sub(&sv.mul(&sv))
        .add(&sp.mul(&sp))
}

// lattice 4-simplex whose integer dilations have polynomial counting data
pub fn simplex4_vertices() -> Vec<Vec<Rat>> {
    [
        [4i64, 6, 4, 3],
        [5, 7, 9, 1],
        [5, 7, 3, 7],
        [6, 8, 3, 9],
        [2, 1, 8, 0],
    ]
    .iter()
    .map(|v| rv(&v[..]))
    .collect()
}

pub fn polytope_from_vertices(
    vertices: &[Vec<Rat>],
) -> (ParametricPolytope, Vec<Rat>, Chamber) {
    let (mu, b) = simplex_hrep(vertices).unwrap();
    let p = ParametricPolytope::new(mu).unwrap();
    let tau = chamber_of(&p, &b).unwrap();
    (p, b, tau)
}

pub fn random_rat(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// Random full-dimensional rational simplex in dimension `d` with nonempty
/// interior, as a parametric polytope plus the chamber of its own parameters.
pub fn random_simplex(
    d: usize,
    rng: &mut ChaCha8Rng,
) -> (ParametricPolytope, Vec<Rat>, Chamber) {
    random_simplex_sized(d, 6, 3, rng)
}

// smaller numerators and denominators keep vertex-cone determinants low,
// which is what controls the cost of the signed decomposition
pub fn random_simplex_sized(
    d: usize,
    num: i64,
    den: i64,
    rng: &mut ChaCha8Rng,
) -> (ParametricPolytope, Vec<Rat>, Chamber) {
    loop {
        let vertices: Vec<Vec<Rat>> = (0..=d)
            .map(|_| (0..d).map(|_| random_rat(rng, num, den)).collect())
            .collect();
        let Ok((mu, b)) = simplex_hrep(&vertices) else { continue };
        let Ok(p) = ParametricPolytope::new(mu) else { continue };
        let Ok(tau) = chamber_of(&p, &b) else { continue };
        return (p, b, tau);
    }
}

/// Random bounded parametric polytope with `0` interior at the returned `b`.
pub fn random_polytope(
    d: usize,
    extra_rows: usize,
    rng: &mut ChaCha8Rng,
) -> (ParametricPolytope, Vec<Rat>, Chamber) {
    loop {
        let n = d + 1 + extra_rows;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let Ok(p) = ParametricPolytope::new(IntMatrix::from_rows(&rows)) else {
            continue;
        };
        let b: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(1..=8), rng.gen_range(1..=2))).collect();
        let Ok(tau) = chamber_of(&p, &b) else { continue };
        return (p, b, tau);
    }
}

/// Random rational subspace of the requested dimension.
pub fn random_subspace(d: usize, dim: usize, rng: &mut ChaCha8Rng) -> Subspace {
    loop {
        let rows: Vec<Vec<Rat>> = (0..dim)
            .map(|_| (0..d).map(|_| random_rat(rng, 3, 2)).collect())
            .collect();
        let l = Subspace::from_rows(d, &rows);
        if l.dim() == dim {
            return l;
        }
    }
}

fn factorial(k: usize) -> Rat {
    (1..=k).fold(Rat::from_integer(1.into()), |a, x| {
        a * Rat::from_integer(x.into())
    })
}

// unordered block-size multisets with every part >= n_min and total <= total_max
fn block_types(n_min: usize, total_max: usize, max_part: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for first in (n_min..=max_part.min(total_max)).rev() {
        for mut rest in block_types(n_min, total_max - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

// number of subpartitions of a j-element set with the given block sizes
fn subpartition_count(j: usize, sizes: &[usize]) -> Rat {
    let total: usize = sizes.iter().sum();
    let mut c = factorial(j) / factorial(j - total);
    for &s in sizes {
        c /= factorial(s);
    }
    let mut mult = std::collections::BTreeMap::new();
    for &s in sizes {
        *mult.entry(s).or_insert(0usize) += 1;
    }
    for (_, m) in mult {
        c /= factorial(m);
    }
    c
}

/// Mobius number `mu(empty, single block of size N)` of the poset of
/// subpartitions of an N-element set into blocks of size at least `n_min`,
/// computed by the defining recursion.  The interval below a subpartition is
/// a product of one interval per block, so `mu` of a multi-block element is
/// the product of the single-block values.
pub fn subpartition_mobius(n_min: usize, big_n: usize) -> Rat {
    let mut single = vec![Rat::from_integer(0.into()); big_n + 1];
    for j in n_min..=big_n {
        let mut below = Rat::from_integer(0.into());
        for ty in block_types(n_min, j, j) {
            if ty.as_slice() == [j] {
                continue;
            }
            let mut mu = subpartition_count(j, &ty);
            for &s in &ty {
                mu *= &single[s];
            }
            below += mu;
        }
        single[j] = -below;
    }
    single[big_n].clone()
}
