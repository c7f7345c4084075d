//! Sum-closed families of rational subspaces and their patching functions.
//!
//! A patching function assigns an integer `ρ(L)` to each member of a
//! sum-closed family `𝓛` so that `Σ_L ρ(L)·[x ∈ L^⊥] = [x ∈ ⋃_L L^⊥]` holds
//! pointwise in the dual.  It is computed by Möbius inversion on the family
//! ordered by inclusion with an adjoined bottom element; closed forms for
//! face-span families of simplicial cones and for subpartition families of
//! simplices are provided as cross-checked fast paths.

use crate::exactlin::{kernel_saturated, IntMatrix, Rat, Subspace};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A finite family of subspaces of a common ambient space, closed under
/// pairwise sum, ordered by inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceFamily {
    ambient: usize,
    members: BTreeSet<Subspace>,
}

impl SubspaceFamily {
    /// Wrap an already sum-closed set, checking closure.
    pub fn new(ambient: usize, members: BTreeSet<Subspace>) -> Result<Self> {
        for l in &members {
            if l.ambient() != ambient {
                return Err(Error::InvalidInput(
                    "family members must share an ambient dimension".into(),
                ));
            }
        }
        for a in &members {
            for b in &members {
                if !members.contains(&a.sum(b)) {
                    return Err(Error::InvalidInput(
                        "subspace family is not closed under sum".into(),
                    ));
                }
            }
        }
        Ok(SubspaceFamily { ambient, members })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, l: &Subspace) -> bool {
        self.members.contains(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subspace> {
        self.members.iter()
    }
}

/// Smallest sum-closed family containing the given subspaces.
pub fn close_under_sum(ambient: usize, list: &[Subspace]) -> Result<SubspaceFamily> {
    for l in list {
        if l.ambient() != ambient {
            return Err(Error::InvalidInput(
                "family members must share an ambient dimension".into(),
            ));
        }
    }
    let mut members: BTreeSet<Subspace> = list.iter().cloned().collect();
    loop {
        let mut fresh = Vec::new();
        for a in &members {
            for b in &members {
                let s = a.sum(b);
                if !members.contains(&s) {
                    fresh.push(s);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        members.extend(fresh);
    }
    Ok(SubspaceFamily { ambient, members })
}

/// The patching function `ρ(L) = −μ(0̂, L)` of a sum-closed family, by the
/// Möbius recursion `ρ(L) = 1 − Σ_{M ∈ 𝓛, M ⊊ L} ρ(M)` in increasing
/// dimension order.
pub fn patching_rho(fam: &SubspaceFamily) -> BTreeMap<Subspace, Rat> {
    let mut by_dim: Vec<&Subspace> = fam.members.iter().collect();
    by_dim.sort_by_key(|l| l.dim());
    let mut rho: BTreeMap<Subspace, Rat> = BTreeMap::new();
    for l in by_dim {
        let mut v = Rat::one();
        for (m, r) in &rho {
            if m != l && l.contains(m) {
                v -= r;
            }
        }
        rho.insert(l.clone(), v);
    }
    rho
}

fn binomial(n: u64, k: u64) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut v = Rat::one();
    for i in 0..k {
        v *= Rat::new((n - i).into(), (i + 1).into());
    }
    v
}

/// Closed form for the patching function of the face-span family
/// `{L_I : |I| ≥ d−k}` of a simplicial cone in dimension `d`:
/// `ρ(L_I) = (−1)^{|I|−d+k}·C(|I|−1, d−k−1)`, a function of `|I|` alone.
pub fn rho_cone_closed_form(d: usize, k: usize, card_i: usize) -> Result<Rat> {
    if k > d || card_i > d || card_i + k < d {
        return Err(Error::InvalidInput(format!(
            "rho_cone_closed_form needs 0 ≤ k ≤ d and d−k ≤ |I| ≤ d, got d={d} k={k} |I|={card_i}"
        )));
    }
    let low = d - k;
    if low == 0 {
        // the family contains {0}; everything above it patches to zero
        return Ok(if card_i == 0 { Rat::one() } else { Rat::zero() });
    }
    let sign = if (card_i - low) % 2 == 0 { Rat::one() } else { -Rat::one() };
    Ok(sign * binomial((card_i - 1) as u64, (low - 1) as u64))
}

// truncated power series with rational coefficients, index = degree
fn series_mul(a: &[Rat], b: &[Rat], order: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

// ln of a series with constant term 1, truncated
fn series_ln(t: &[Rat], order: usize) -> Vec<Rat> {
    debug_assert!(t[0].is_one());
    let mut u = t.to_vec();
    u[0] = Rat::zero(); // t = 1 + u
    let mut out = vec![Rat::zero(); order + 1];
    let mut upow = vec![Rat::zero(); order + 1];
    upow[0] = Rat::one();
    for j in 1..=order {
        upow = series_mul(&upow, &u, order);
        let sign = if j % 2 == 1 { Rat::one() } else { -Rat::one() };
        let f = sign / Rat::from_integer(j.into());
        for (o, c) in out.iter_mut().zip(&upow) {
            *o += c * &f;
        }
    }
    out
}

// exp of a series with constant term 0, truncated
fn series_exp(f: &[Rat], order: usize) -> Vec<Rat> {
    debug_assert!(f[0].is_zero());
    let mut out = vec![Rat::zero(); order + 1];
    out[0] = Rat::one();
    let mut fpow = vec![Rat::zero(); order + 1];
    fpow[0] = Rat::one();
    let mut factorial = Rat::one();
    for j in 1..=order {
        fpow = series_mul(&fpow, f, order);
        factorial *= Rat::from_integer(j.into());
        for (o, c) in out.iter_mut().zip(&fpow) {
            *o += c / &factorial;
        }
    }
    out
}

/// `Σ_{p=0}^{top} z^p/p!`, the truncated exponential, to the given order.
fn truncated_exponential(top: usize, order: usize) -> Vec<Rat> {
    let mut t = vec![Rat::zero(); order + 1];
    let mut factorial = Rat::one();
    for p in 0..=top.min(order) {
        if p > 0 {
            factorial *= Rat::from_integer(p.into());
        }
        t[p] = Rat::one() / &factorial;
    }
    t
}

/// Single-block value `σ_{d,k}(m) = m!·[z^m](−ln Σ_{p=0}^{d−k} z^p/p!)`.
fn sigma_single(d: usize, k: usize, m: usize) -> Rat {
    let t = truncated_exponential(d - k, m);
    let ln_t = series_ln(&t, m);
    let mut factorial = Rat::one();
    for j in 2..=m {
        factorial *= Rat::from_integer(j.into());
    }
    -ln_t[m].clone() * factorial
}

/// Patching value of the subpartition with the given block sizes in the
/// simplex family `Π(d+1, d−k+1)`: `σ(n₁..n_r) = (−1)^{r−1} Π σ(n_i)`.
pub fn sigma_simplex(d: usize, k: usize, block_sizes: &[usize]) -> Result<Rat> {
    if k + 1 > d {
        return Err(Error::InvalidInput(format!(
            "sigma_simplex needs k ≤ d−1, got d={d} k={k}"
        )));
    }
    let min_block = d - k + 1;
    let total: usize = block_sizes.iter().sum();
    if block_sizes.is_empty()
        || total > d + 1
        || block_sizes.iter().any(|&n| n < min_block)
    {
        return Err(Error::InvalidInput(format!(
            "block sizes {block_sizes:?} are not a subpartition of {{1..{}}} with blocks ≥ {min_block}",
            d + 1
        )));
    }
    let mut v = if block_sizes.len() % 2 == 1 { Rat::one() } else { -Rat::one() };
    for &n in block_sizes {
        v *= sigma_single(d, k, n);
    }
    Ok(v)
}

/// Möbius number `μ_N(n) = N!·[z^N] ln Σ_{p=0}^{n−1} z^p/p!` of the
/// subpartition poset `Π(N, n)`; exposed for the series consistency check.
pub fn mobius_series_ln(n: usize, order: usize) -> Vec<Rat> {
    series_ln(&truncated_exponential(n - 1, order), order)
}

/// Exponentiate a constant-term-zero series; exposed with
/// [`mobius_series_ln`] for the generating-series identity test.
pub fn series_exp_public(f: &[Rat], order: usize) -> Vec<Rat> {
    series_exp(f, order)
}

/// The face-span family `{span of generators indexed by I : |I| ≥ d−k}` of a
/// full-dimensional simplicial cone, used by the cone-by-cone variant.  It is
/// already closed under sum since `L_{I₁} + L_{I₂} = L_{I₁ ∪ I₂}`.
pub fn family_from_cone_faces(gens: &IntMatrix, k: usize) -> Result<SubspaceFamily> {
    let d = gens.ncols();
    if gens.nrows() != d {
        return Err(Error::InvalidInput(
            "cone-by-cone families need a full-dimensional simplicial cone".into(),
        ));
    }
    if k > d {
        return Err(Error::InvalidInput(format!("k must be at most d, got k={k} d={d}")));
    }
    let rows = gens.row_vecs();
    let mut members = BTreeSet::new();
    for mask in 0u32..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        if idx.len() + k < d {
            continue;
        }
        let sel: Vec<Vec<crate::exactlin::Int>> =
            idx.iter().map(|&i| rows[i].clone()).collect();
        members.insert(Subspace::from_int_rows(d, &sel));
    }
    SubspaceFamily::new(d, members)
}

/// The Barvinok-style family of a simple parametric polytope on a chamber:
/// spans parallel to the faces of codimension ≤ k are `∩_{j∈J} ker μ_j` for
/// wall subsets `J ⊆ B`, `|J| ≤ k`, `B` ranging over the chamber's vertex
/// bases; then close under sum.
pub fn family_from_polytope_faces(
    mu: &IntMatrix,
    bases: &[Vec<usize>],
    k: usize,
) -> Result<SubspaceFamily> {
    let d = mu.ncols();
    let mut seed = vec![Subspace::full(d)];
    let mut seen_subsets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for b in bases {
        for mask in 0u32..(1 << b.len()) {
            let j: Vec<usize> = (0..b.len()).filter(|i| mask >> i & 1 == 1).map(|i| b[i]).collect();
            if j.is_empty() || j.len() > k || !seen_subsets.insert(j.clone()) {
                continue;
            }
            let sel: Vec<Vec<crate::exactlin::Int>> =
                j.iter().map(|&jj| mu.row(jj).to_vec()).collect();
            let ker = kernel_saturated(&IntMatrix::from_int_rows(&sel));
            seed.push(Subspace::from_int_rows(d, &ker.row_vecs()));
        }
    }
    close_under_sum(d, &seed)
}

/// Evaluate `Σ_L ρ(L)·[x ⊥ L]` at a dual point; used by the indicator tests.
pub fn patch_indicator_sum(rho: &BTreeMap<Subspace, Rat>, x: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (l, r) in rho {
        let basis = l.basis();
        let perp = (0..basis.nrows()).all(|i| {
            basis
                .row(i)
                .iter()
                .zip(x)
                .map(|(a, b)| Rat::from_integer(a.clone()) * b)
                .sum::<Rat>()
                .is_zero()
        });
        if perp {
            s += r;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat_int, Rat};

    fn line(ambient: usize, coords: &[i64]) -> Subspace {
        Subspace::from_rows(
            ambient,
            &[coords.iter().map(|&c| rat_int(c)).collect::<Vec<Rat>>()],
        )
    }

    #[test]
    fn closure_of_two_lines() {
        let fam = close_under_sum(2, &[line(2, &[1, 0]), line(2, &[0, 1])]).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.contains(&Subspace::full(2)));
    }

    #[test]
    fn rho_single_subspace() {
        let fam = close_under_sum(3, &[line(3, &[1, 2, 3])]).unwrap();
        let rho = patching_rho(&fam);
        assert_eq!(rho.values().cloned().collect::<Vec<_>>(), vec![rat_int(1)]);
    }

    #[test]
    fn rho_two_lines_and_plane() {
        let fam = close_under_sum(2, &[line(2, &[1, 0]), line(2, &[0, 1])]).unwrap();
        let rho = patching_rho(&fam);
        assert_eq!(rho[&line(2, &[1, 0])], rat_int(1));
        assert_eq!(rho[&line(2, &[0, 1])], rat_int(1));
        assert_eq!(rho[&Subspace::full(2)], rat_int(-1));
    }

    #[test]
    fn rho_tetrahedron_family() {
        // edge directions of the tetrahedron 0, e1, e2, e3
        let edges = [
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, -1, 0],
            vec![1, 0, -1],
            vec![0, 1, -1],
        ];
        let lines: Vec<Subspace> = edges.iter().map(|e| line(3, e)).collect();
        let fam = close_under_sum(3, &lines).unwrap();
        assert_eq!(fam.len(), 14);
        let rho = patching_rho(&fam);
        for l in &lines {
            assert_eq!(rho[l], rat_int(1));
        }
        assert_eq!(rho[&Subspace::full(3)], rat_int(6));
        let mut facet_count = 0;
        let mut opp_count = 0;
        for (l, r) in &rho {
            if l.dim() == 2 {
                if *r == rat_int(-2) {
                    facet_count += 1;
                } else if *r == rat_int(-1) {
                    opp_count += 1;
                } else {
                    panic!("unexpected plane value {r}");
                }
            }
        }
        assert_eq!((facet_count, opp_count), (4, 3));
    }

    #[test]
    fn cone_closed_form_examples() {
        assert_eq!(rho_cone_closed_form(3, 1, 2).unwrap(), rat_int(1));
        assert_eq!(rho_cone_closed_form(3, 1, 3).unwrap(), rat_int(-2));
        assert_eq!(rho_cone_closed_form(2, 1, 1).unwrap(), rat_int(1));
        assert_eq!(rho_cone_closed_form(2, 1, 2).unwrap(), rat_int(-1));
        for d in 1..=5 {
            for k in 0..=d {
                assert_eq!(rho_cone_closed_form(d, k, d - k).unwrap(), rat_int(1));
            }
        }
        assert!(rho_cone_closed_form(3, 1, 1).is_err());
    }

    #[test]
    fn sigma_values_for_d3_k2() {
        assert_eq!(sigma_simplex(3, 2, &[2]).unwrap(), rat_int(1));
        assert_eq!(sigma_simplex(3, 2, &[3]).unwrap(), rat_int(-2));
        assert_eq!(sigma_simplex(3, 2, &[4]).unwrap(), rat_int(6));
        assert_eq!(sigma_simplex(3, 2, &[2, 2]).unwrap(), rat_int(-1));
        assert!(sigma_simplex(3, 2, &[1]).is_err());
        assert!(sigma_simplex(3, 3, &[2]).is_err());
    }

    #[test]
    fn cone_family_counts() {
        let gens = IntMatrix::identity(3);
        let fam = family_from_cone_faces(&gens, 3).unwrap();
        assert_eq!(fam.len(), 8); // all face spans including {0}
        let fam1 = family_from_cone_faces(&gens, 1).unwrap();
        assert_eq!(fam1.len(), 4); // three planes and V
        let fam0 = family_from_cone_faces(&gens, 0).unwrap();
        assert_eq!(fam0.len(), 1);
        let rho0 = patching_rho(&fam0);
        assert_eq!(rho0[&Subspace::full(3)], rat_int(1));
    }

    #[test]
    fn bjorner_lovasz_low_order() {
        let n = 3;
        let f = mobius_series_ln(n, 6);
        let back = series_exp_public(&f, 6);
        let t = truncated_exponential(n - 1, 6);
        assert_eq!(back, t);
    }
}
