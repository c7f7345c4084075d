mod common;

use common::{random_rat, random_simplex, rng, rv};
use ehrhart::exactlin::{rat, rat_int, IntMatrix, Rat, Subspace};
use ehrhart::oracle::{brute_intermediate_sum, VPolytope};
use ehrhart::parametric::{
    barvinok_patched_qp, chamber_of, chamber_samples, cone_by_cone_qp, dilation_qp,
    intermediate_ehrhart_qp, minkowski_support, partition_to_parametric, DilationVariant, Weight,
};
use ehrhart::steppoly::LinearFormQ;
use ehrhart::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_weight(d: usize, max_m: u32, r: &mut ChaCha8Rng) -> Weight {
    match r.gen_range(0..=max_m) {
        0 => Weight::unit(d),
        m => {
            let coords: Vec<Rat> = (0..d).map(|_| random_rat(r, 2, 1)).collect();
            Weight::power(LinearFormQ::new(&coords), m)
        }
    }
}

#[test]
fn full_codimension_patching_reproduces_the_exact_count() {
    let mut r = rng(51);
    for case in 0..6 {
        let d = 2 + case % 2;
        let (pp, _, tau) = common::random_simplex_sized(d, 4, 2, &mut r);
        let h = random_weight(d, 2, &mut r);
        let exact = intermediate_ehrhart_qp(&pp, &tau, &Subspace::from_rows(d, &[]), &h).unwrap();
        let bv = barvinok_patched_qp(&pp, &tau, d, &h).unwrap();
        let cbc = cone_by_cone_qp(&pp, &tau, d, &h).unwrap();
        for b in chamber_samples(&pp, &tau, 8, 300 + case as u64) {
            let want = exact.eval(&b);
            assert_eq!(bv.eval(&b), want, "Barvinok k=d at {b:?}");
            assert_eq!(cbc.eval(&b), want, "cone-by-cone k=d at {b:?}");
        }
    }
}

#[test]
fn zero_codimension_patching_is_the_integral() {
    let mut r = rng(52);
    for case in 0..6 {
        let d = 2 + case % 2;
        let (pp, _, tau) = random_simplex(d, &mut r);
        let h = random_weight(d, 2, &mut r);
        let integral = intermediate_ehrhart_qp(&pp, &tau, &Subspace::full(d), &h).unwrap();
        let bv = barvinok_patched_qp(&pp, &tau, 0, &h).unwrap();
        let cbc = cone_by_cone_qp(&pp, &tau, 0, &h).unwrap();
        for b in chamber_samples(&pp, &tau, 8, 400 + case as u64) {
            let want = integral.eval(&b);
            assert_eq!(bv.eval(&b), want, "Barvinok k=0 at {b:?}");
            assert_eq!(cbc.eval(&b), want, "cone-by-cone k=0 at {b:?}");
        }
    }
}

#[test]
fn dilation_specializes_the_chamber_qp() {
    let mut r = rng(53);
    for case in 0..6 {
        let d = 2 + case % 2;
        let (pp, b, tau) = random_simplex(d, &mut r);
        let variant = match case % 3 {
            0 => DilationVariant::Exact(Subspace::from_rows(d, &[])),
            1 => DilationVariant::Barvinok(1),
            _ => DilationVariant::ConeByCone(1),
        };
        let full = match &variant {
            DilationVariant::Exact(l) => intermediate_ehrhart_qp(&pp, &tau, l, &Weight::unit(d)),
            DilationVariant::Barvinok(k) => barvinok_patched_qp(&pp, &tau, *k, &Weight::unit(d)),
            DilationVariant::ConeByCone(k) => cone_by_cone_qp(&pp, &tau, *k, &Weight::unit(d)),
        }
        .unwrap();
        let dil = dilation_qp(&pp, &tau, &b, &variant, &Weight::unit(d)).unwrap();
        for _ in 0..30 {
            let t = rat(r.gen_range(1..=40), r.gen_range(1..=8));
            let scaled: Vec<Rat> = b.iter().map(|v| v * &t).collect();
            assert_eq!(dil.eval(&[t.clone()]), full.eval(&scaled), "at t={t}");
        }
        let outside: Vec<Rat> = b.iter().map(|v| -v).collect();
        assert!(matches!(
            dilation_qp(&pp, &tau, &outside, &variant, &Weight::unit(d)),
            Err(Error::InvalidInput(_))
        ));
    }
}

#[test]
fn exact_qp_evaluates_to_the_brute_sum() {
    let mut r = rng(54);
    for case in 0..6 {
        let (pp, b, tau) = common::random_polytope(2, case % 3, &mut r);
        for l_dim in 0..=2usize {
            let l = common::random_subspace(2, l_dim, &mut r);
            let h = random_weight(2, 2, &mut r);
            let qp = intermediate_ehrhart_qp(&pp, &tau, &l, &h).unwrap();
            for sample in chamber_samples(&pp, &tau, 4, 500 + case as u64) {
                let p = VPolytope::from_h(pp.mu(), &sample).unwrap();
                assert_eq!(
                    qp.eval(&sample),
                    brute_intermediate_sum(&p, &l, &h).unwrap(),
                    "dim L = {l_dim} at {sample:?} (chamber of {b:?})"
                );
            }
        }
    }
}

#[test]
fn pipeline_is_linear_in_the_weight() {
    let mut r = rng(55);
    for _ in 0..4 {
        let d = 2;
        let (pp, _, tau) = random_simplex(d, &mut r);
        let l = common::random_subspace(d, r.gen_range(0..=d), &mut r);
        let f1 = LinearFormQ::new(&[rat_int(1), rat_int(2)]);
        let f2 = LinearFormQ::new(&[rat_int(1), rat_int(-1)]);
        let (c1, c2) = (random_rat(&mut r, 3, 2), random_rat(&mut r, 3, 2));
        let h1 = Weight::power(f1.clone(), 1);
        let h2 = Weight::power(f2.clone(), 2);
        let combined = Weight::new(d, vec![(c1.clone(), f1, 1), (c2.clone(), f2, 2)]).unwrap();
        let e1 = intermediate_ehrhart_qp(&pp, &tau, &l, &h1).unwrap();
        let e2 = intermediate_ehrhart_qp(&pp, &tau, &l, &h2).unwrap();
        let ec = intermediate_ehrhart_qp(&pp, &tau, &l, &combined).unwrap();
        assert_eq!(ec, e1.scale(&c1).add(&e2.scale(&c2)));
    }
}

#[test]
fn chamber_membership_is_stable_across_samples() {
    let mut r = rng(56);
    for case in 0..8 {
        let d = 2 + case % 2;
        let (pp, _, tau) = common::random_polytope(d, case % 2, &mut r);
        for sample in chamber_samples(&pp, &tau, 6, 600 + case as u64) {
            let again = chamber_of(&pp, &sample).unwrap();
            assert_eq!(again.basis_index_sets(), tau.basis_index_sets());
            for bs in tau.bases() {
                let v = bs.vertex_at(&sample);
                for j in 0..pp.mu().nrows() {
                    let lhs: Rat = pp
                        .mu()
                        .row(j)
                        .iter()
                        .zip(&v)
                        .map(|(a, x)| Rat::from_integer(a.clone()) * x)
                        .sum();
                    if bs.indices().contains(&j) {
                        assert_eq!(lhs, sample[j], "basis row must be tight");
                    } else {
                        assert!(lhs < sample[j], "non-basis row must be slack");
                    }
                }
            }
        }
    }
}

#[test]
fn minkowski_support_validates_the_normal_fan() {
    let quad = common::quadrilateral();
    // a triangle whose normals the quadrilateral rows can describe
    let tri = vec![rv(&[0, 0]), rv(&[1, 0]), rv(&[0, 1])];
    let b = minkowski_support(&[tri.clone()], &quad).unwrap();
    assert_eq!(b, vec![rv(&[0, 0, 1, 1])]);
    // and one they cannot: the reconstruction grows an extra vertex
    let bad = vec![rv(&[0, 0]), rv(&[2, 1]), rv(&[1, 2])];
    assert!(matches!(
        minkowski_support(&[bad], &quad),
        Err(Error::NormalsInsufficient)
    ));
    // interior points never change the support values
    let mut padded = tri;
    padded.push(vec![rat(1, 4), rat(1, 4)]);
    let b2 = minkowski_support(&[padded], &quad).unwrap();
    assert_eq!(b, b2);
}

#[test]
fn partition_polytopes_count_their_solutions() {
    let knap = |lambda: i64, weights: &[i64]| -> i64 {
        // nonnegative integer solutions of Σ w_i y_i = lambda
        let mut count = 0;
        let mut stack = vec![(0usize, lambda)];
        while let Some((i, rest)) = stack.pop() {
            if i + 1 == weights.len() {
                if rest % weights[i] == 0 && rest >= 0 {
                    count += 1;
                }
                continue;
            }
            let mut used = 0;
            while used <= rest {
                stack.push((i + 1, rest - used));
                used += weights[i];
            }
        }
        count
    };
    for weights in [vec![1i64, 2], vec![1, 2, 3], vec![2, 3]] {
        let phi = IntMatrix::from_rows(&[weights.clone()]);
        for lambda in 0i64..=12 {
            let (pp, b) = partition_to_parametric(&phi, &[rat_int(lambda)]).unwrap();
            let p = VPolytope::from_h(pp.mu(), &b).unwrap();
            let got = brute_intermediate_sum(
                &p,
                &Subspace::from_rows(pp.dim(), &[]),
                &Weight::unit(pp.dim()),
            )
            .unwrap();
            assert_eq!(
                got,
                rat_int(knap(lambda, &weights)),
                "weights {weights:?} lambda {lambda}"
            );
        }
    }
}
