mod common;

use common::{random_subspace, rng};
use ehrhart::exactlin::{rat_int, IntMatrix, Rat, Subspace};
use ehrhart::patchwork::{
    close_under_sum, family_from_cone_faces, family_from_polytope_faces, mobius_series_ln,
    patch_indicator_sum, patching_rho, rho_cone_closed_form, sigma_simplex, SubspaceFamily,
};
use num::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;

fn is_perp(l: &Subspace, x: &[Rat]) -> bool {
    let basis = l.basis();
    (0..basis.nrows()).all(|i| {
        basis
            .row(i)
            .iter()
            .zip(x)
            .map(|(a, b)| Rat::from_integer(a.clone()) * b)
            .sum::<Rat>()
            .is_zero()
    })
}

fn union_indicator(fam: &SubspaceFamily, x: &[Rat]) -> Rat {
    if fam.iter().any(|l| is_perp(l, x)) {
        Rat::one()
    } else {
        Rat::zero()
    }
}

#[test]
fn rho_solves_the_dual_indicator_identity() {
    let mut r = rng(21);
    for case in 0..30 {
        let d = 2 + case % 2;
        let members: Vec<Subspace> = (0..r.gen_range(1..=3))
            .map(|_| random_subspace(d, 1 + r.gen_range(0..d.min(2)), &mut r))
            .collect();
        let fam = close_under_sum(d, &members).unwrap();
        let rho = patching_rho(&fam);
        // points perpendicular to some member, plus generic points
        let mut points: Vec<Vec<Rat>> = Vec::new();
        for l in fam.iter() {
            let ann = l.annihilator();
            for _ in 0..5 {
                let mut x = vec![Rat::zero(); d];
                for i in 0..ann.basis().nrows() {
                    let c = common::random_rat(&mut r, 3, 2);
                    for (xj, aj) in x.iter_mut().zip(ann.basis().row(i)) {
                        *xj += Rat::from_integer(aj.clone()) * &c;
                    }
                }
                points.push(x);
            }
        }
        for _ in 0..10 {
            points.push((0..d).map(|_| common::random_rat(&mut r, 4, 3)).collect());
        }
        for x in &points {
            assert_eq!(
                patch_indicator_sum(&rho, x),
                union_indicator(&fam, x),
                "family of {} members at {x:?}",
                fam.len()
            );
        }
    }
}

#[test]
fn closed_form_matches_the_recursion_on_cone_families() {
    // identity cones up to d = 5, plus random simplicial cones in d = 3
    for d in 1..=5 {
        for k in 0..=d {
            let fam = family_from_cone_faces(&IntMatrix::identity(d), k).unwrap();
            let rho = patching_rho(&fam);
            for (l, value) in &rho {
                let card = l.dim();
                assert_eq!(
                    value,
                    &rho_cone_closed_form(d, k, card).unwrap(),
                    "d={d} k={k} |I|={card}"
                );
            }
        }
    }
    let mut r = rng(22);
    for _ in 0..10 {
        let rows: Vec<Vec<i64>> = (0..3)
            .map(|_| (0..3).map(|_| r.gen_range(-4..=4)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows);
        if m.to_rat().rank() != 3 {
            continue;
        }
        for k in 0..=3 {
            let fam = family_from_cone_faces(&m, k).unwrap();
            let rho = patching_rho(&fam);
            for (l, value) in &rho {
                assert_eq!(value, &rho_cone_closed_form(3, k, l.dim()).unwrap());
            }
        }
    }
}

// faces of the standard d-simplex through a vertex subset span the
// differences of the subset; the family of spans of faces of codimension
// <= k realizes the subpartition patching values
fn simplex_face_spans(d: usize, min_vertices: usize) -> BTreeMap<Vec<usize>, Subspace> {
    let mut verts = vec![vec![Rat::zero(); d]];
    for i in 0..d {
        let mut e = vec![Rat::zero(); d];
        e[i] = Rat::one();
        verts.push(e);
    }
    let mut spans = BTreeMap::new();
    for mask in 1u32..(1 << (d + 1)) {
        let s: Vec<usize> = (0..=d).filter(|i| mask >> i & 1 == 1).collect();
        if s.len() < min_vertices {
            continue;
        }
        let rows: Vec<Vec<Rat>> = s[1..]
            .iter()
            .map(|&i| {
                verts[i]
                    .iter()
                    .zip(&verts[s[0]])
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        spans.insert(s, Subspace::from_rows(d, &rows));
    }
    spans
}

#[test]
fn simplex_patching_values_match_sigma() {
    for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        let spans = simplex_face_spans(d, d - k + 1);
        let members: Vec<Subspace> = spans.values().cloned().collect();
        let fam = close_under_sum(d, &members).unwrap();
        let rho = patching_rho(&fam);
        for (s, l) in &spans {
            assert_eq!(
                rho[l],
                sigma_simplex(d, k, &[s.len()]).unwrap(),
                "d={d} k={k} block {s:?}"
            );
        }
        // members produced only by sums of spans of disjoint faces
        for (l, value) in &rho {
            if spans.values().any(|x| x == l) {
                continue;
            }
            let pairs: Vec<(usize, usize)> = spans
                .iter()
                .flat_map(|(s1, l1)| {
                    spans.iter().filter_map(move |(s2, l2)| {
                        (s1 < s2 && s1.iter().all(|i| !s2.contains(i)) && &l1.sum(l2) == l)
                            .then_some((s1.len(), s2.len()))
                    })
                })
                .collect();
            let (n1, n2) = pairs[0];
            assert_eq!(value, &sigma_simplex(d, k, &[n1, n2]).unwrap());
        }
    }
}

#[test]
fn subpartition_mobius_matches_the_generating_series() {
    for n_min in 3..=6usize {
        let series = mobius_series_ln(n_min, 12);
        let mut fact = Rat::one();
        for big_n in 1..=12usize {
            fact *= Rat::from_integer(big_n.into());
            let from_series = &series[big_n] * &fact;
            if big_n == 1 {
                // ln of the truncated exponential is z + O(z^n_min)
                assert!(from_series.is_one());
            } else if big_n < n_min {
                assert!(from_series.is_zero());
            } else {
                assert_eq!(from_series, common::subpartition_mobius(n_min, big_n));
            }
        }
    }
}

#[test]
fn polytope_face_family_collapses_at_full_codimension() {
    // once the zero subspace joins the family, it absorbs all the patching
    let quad = IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1], vec![1, 1], vec![-1, 1]]);
    let bases = vec![vec![0usize, 1], vec![0, 3], vec![1, 2], vec![2, 3]];
    let fam = family_from_polytope_faces(&quad, &bases, 2).unwrap();
    let rho = patching_rho(&fam);
    for (l, value) in &rho {
        let expected = if l.dim() == 0 { rat_int(1) } else { rat_int(0) };
        assert_eq!(value, &expected);
    }
    let fam1 = family_from_polytope_faces(&quad, &bases, 1).unwrap();
    let rho1 = patching_rho(&fam1);
    assert_eq!(rho1.len(), 5);
    assert_eq!(rho1[&Subspace::full(2)], rat_int(-3));
    for (l, value) in &rho1 {
        if l.dim() == 1 {
            assert_eq!(value, &rat_int(1));
        }
    }
}
