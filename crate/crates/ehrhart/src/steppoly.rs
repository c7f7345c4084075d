//! Multivariate step polynomials: finite sums
//! `c · Π {<η_i, b>}^{e_i} · Π <θ_j, b>^{f_j}`
//! where `{x} = x - ⌊x⌋ ∈ [0,1)` is the right-continuous fractional part and
//! the `η`, `θ` are rational linear forms in the parameters `b ∈ Q^N`.
//!
//! Terms are kept in a canonical form (forms split into a primitive integer
//! direction and a rational scale, poly scales absorbed into the coefficient,
//! factor lists sorted, terms merged), so structural equality is meaningful
//! and serialization round-trips bit for bit.

use crate::exactlin::{primitive_of_rat, Int, Rat, RatMatrix};
use crate::{Error, Result};
use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

/// Right-continuous fractional part, `{x} = x - ⌊x⌋ ∈ [0,1)`.
pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

pub fn rat_pow(r: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Parse a rational from a string like `-3/4` or `5`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Schema(format!("invalid rational literal {s:?}"));
    let (num_str, den_str) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let numer: Int = num_str.trim().parse().map_err(|_| bad())?;
    let denom: Int = match den_str {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => Int::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

/// Format a rational as `p/q`, omitting the denominator when it is 1.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A rational linear form on parameter space, stored as a primitive integer
/// direction (first nonzero entry positive) times a rational scale.  The zero
/// form has scale 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LinearFormQ {
    prim: Vec<Int>,
    scale: Rat,
}

impl LinearFormQ {
    pub fn new(coords: &[Rat]) -> Self {
        if coords.iter().all(|x| x.is_zero()) {
            return LinearFormQ { prim: vec![Int::zero(); coords.len()], scale: Rat::zero() };
        }
        let mut prim = primitive_of_rat(coords).expect("nonzero form");
        let lead = prim.iter().position(|x| !x.is_zero()).unwrap();
        if prim[lead].is_negative() {
            for x in prim.iter_mut() {
                *x = -x.clone();
            }
        }
        let scale = &coords[lead] / Rat::from_integer(prim[lead].clone());
        LinearFormQ { prim, scale }
    }

    pub fn zero(n: usize) -> Self {
        LinearFormQ { prim: vec![Int::zero(); n], scale: Rat::zero() }
    }

    pub fn n(&self) -> usize {
        self.prim.len()
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    pub fn coords(&self) -> Vec<Rat> {
        self.prim
            .iter()
            .map(|x| Rat::from_integer(x.clone()) * &self.scale)
            .collect()
    }

    pub fn eval(&self, b: &[Rat]) -> Rat {
        assert_eq!(b.len(), self.n(), "parameter count mismatch");
        let mut s = Rat::zero();
        for (p, x) in self.prim.iter().zip(b) {
            s += Rat::from_integer(p.clone()) * x;
        }
        s * &self.scale
    }

    fn with_unit_scale(&self) -> (LinearFormQ, Rat) {
        (
            LinearFormQ { prim: self.prim.clone(), scale: Rat::one() },
            self.scale.clone(),
        )
    }
}

type FactorList = Vec<(LinearFormQ, u32)>;
type TermKey = (FactorList, FactorList); // (step factors, poly factors)

fn merge_factors(mut fs: FactorList) -> FactorList {
    fs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: FactorList = Vec::with_capacity(fs.len());
    for (form, e) in fs {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some((last, le)) if *last == form => *le += e,
            _ => out.push((form, e)),
        }
    }
    out
}

/// A step polynomial in `N` rational parameters.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuasiPolynomial {
    n: usize,
    terms: BTreeMap<TermKey, Rat>,
}

impl QuasiPolynomial {
    pub fn zero(n: usize) -> Self {
        QuasiPolynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        let mut qp = Self::zero(n);
        qp.add_term(Vec::new(), Vec::new(), c);
        qp
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rat::one())
    }

    /// The linear polynomial `<η, b>`.
    pub fn poly_form(form: &LinearFormQ) -> Self {
        let mut qp = Self::zero(form.n());
        if !form.is_zero() {
            qp.add_term(Vec::new(), vec![(form.clone(), 1)], Rat::one());
        }
        qp
    }

    /// The fractional part `{<η, b>}`; the zero form gives `{0} = 0`.
    pub fn step_form(form: &LinearFormQ) -> Self {
        let mut qp = Self::zero(form.n());
        if !form.is_zero() {
            qp.add_term(vec![(form.clone(), 1)], Vec::new(), Rat::one());
        }
        qp
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rat)> {
        self.terms.iter()
    }

    /// Insert one term, canonicalizing: poly scales move into the
    /// coefficient, factor lists are sorted and merged, zero terms vanish.
    pub fn add_term(&mut self, step: FactorList, poly: FactorList, mut coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let mut step_list = Vec::with_capacity(step.len());
        for (form, e) in step {
            debug_assert_eq!(form.n(), self.n);
            if e == 0 {
                continue;
            }
            if form.is_zero() {
                return; // factor {0}^e = 0 kills the term
            }
            step_list.push((form, e));
        }
        let mut poly_list = Vec::with_capacity(poly.len());
        for (form, e) in poly {
            debug_assert_eq!(form.n(), self.n);
            if e == 0 {
                continue;
            }
            if form.is_zero() {
                return; // factor <0, b>^e = 0 kills the term
            }
            let (unit, scale) = form.with_unit_scale();
            coeff *= rat_pow(&scale, e);
            poly_list.push((unit, e));
        }
        let key = (merge_factors(step_list), merge_factors(poly_list));
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &QuasiPolynomial) -> QuasiPolynomial {
        assert_eq!(self.n, other.n, "parameter count mismatch");
        let mut out = self.clone();
        for ((step, poly), c) in &other.terms {
            out.add_term(step.clone(), poly.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> QuasiPolynomial {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, other: &QuasiPolynomial) -> QuasiPolynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> QuasiPolynomial {
        if c.is_zero() {
            return QuasiPolynomial::zero(self.n);
        }
        let mut out = QuasiPolynomial::zero(self.n);
        for (key, v) in &self.terms {
            out.terms.insert(key.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &QuasiPolynomial) -> QuasiPolynomial {
        assert_eq!(self.n, other.n, "parameter count mismatch");
        let mut out = QuasiPolynomial::zero(self.n);
        for ((s1, p1), c1) in &self.terms {
            for ((s2, p2), c2) in &other.terms {
                let mut step = s1.clone();
                step.extend(s2.iter().cloned());
                let mut poly = p1.clone();
                poly.extend(p2.iter().cloned());
                out.add_term(step, poly, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> QuasiPolynomial {
        let mut acc = QuasiPolynomial::one(self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, b: &[Rat]) -> Rat {
        assert_eq!(b.len(), self.n, "parameter count mismatch");
        let mut total = Rat::zero();
        for ((step, poly), c) in &self.terms {
            let mut v = c.clone();
            for (form, e) in step {
                v *= rat_pow(&frac(&form.eval(b)), *e);
            }
            for (form, e) in poly {
                v *= rat_pow(&form.eval(b), *e);
            }
            total += v;
        }
        total
    }

    /// `(polynomial degree, step degree, total degree)`, each the maximum over
    /// terms; the zero polynomial reports `(0, 0, 0)`.
    pub fn degrees(&self) -> (u32, u32, u32) {
        let mut pd = 0;
        let mut sd = 0;
        let mut td = 0;
        for ((step, poly), _) in &self.terms {
            let s: u32 = step.iter().map(|(_, e)| e).sum();
            let p: u32 = poly.iter().map(|(_, e)| e).sum();
            pd = pd.max(p);
            sd = sd.max(s);
            td = td.max(s + p);
        }
        (pd, sd, td)
    }

    /// The sum of the terms whose polynomial degree is exactly `r`.
    pub fn poly_degree_part(&self, r: u32) -> QuasiPolynomial {
        let mut out = QuasiPolynomial::zero(self.n);
        for ((step, poly), c) in &self.terms {
            let p: u32 = poly.iter().map(|(_, e)| e).sum();
            if p == r {
                out.terms.insert((step.clone(), poly.clone()), c.clone());
            }
        }
        out
    }

    /// Substitute `b = T b'` where `T` has one column per new parameter.
    pub fn specialize(&self, t: &RatMatrix) -> QuasiPolynomial {
        assert_eq!(t.nrows(), self.n, "parameter map has wrong domain");
        let tt = t.transpose();
        let n_new = t.ncols();
        let map_form = |form: &LinearFormQ| LinearFormQ::new(&tt.mul_vec(&form.coords()));
        let mut out = QuasiPolynomial::zero(n_new);
        for ((step, poly), c) in &self.terms {
            let step_new: FactorList =
                step.iter().map(|(f, e)| (map_form(f), *e)).collect();
            let poly_new: FactorList =
                poly.iter().map(|(f, e)| (map_form(f), *e)).collect();
            out.add_term(step_new, poly_new, c.clone());
        }
        out
    }

    fn step_forms(&self) -> Vec<&LinearFormQ> {
        let mut v = Vec::new();
        for ((step, _), _) in &self.terms {
            for (f, _) in step {
                v.push(f);
            }
        }
        v
    }

    /// Deterministic sample points: integer points, points on a grid fine
    /// enough to refine every step form's alcove pattern, and pseudo-random
    /// rationals whose denominators are coprime to every step denominator.
    fn sample_points(&self, other: &QuasiPolynomial, samples: usize) -> Vec<Vec<Rat>> {
        let n = self.n.max(1);
        let mut denom_lcm = Int::one();
        let mut numer_max = Int::one();
        for f in self.step_forms().into_iter().chain(other.step_forms()) {
            for c in f.coords() {
                denom_lcm = num::integer::lcm(denom_lcm.clone(), c.denom().clone());
                let a = c.numer().abs();
                if a > numer_max {
                    numer_max = a;
                }
            }
        }
        let grid = (&denom_lcm * &numer_max * Int::from(2))
            .to_i128()
            .unwrap_or(1_000_000)
            .clamp(1, 1_000_000);
        let coprime_denoms: Vec<i128> = [1i128, 2, 3, 5, 7, 11, 13, 17, 19, 23]
            .into_iter()
            .filter(|&q| num::integer::gcd(Int::from(q), denom_lcm.clone()).is_one())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e17_ab1e ^ (self.n as u64));
        let mut pts = Vec::with_capacity(samples);
        let n_int = samples / 4 + 1;
        let n_grid = samples / 2 + 1;
        for i in 0..samples.max(3) {
            let mut p = Vec::with_capacity(self.n);
            for _ in 0..n {
                let x = if i < n_int {
                    Rat::from_integer(Int::from(rng.gen_range(-3i64..=3)))
                } else if i < n_int + n_grid {
                    let z = rng.gen_range(-3 * grid..=3 * grid);
                    Rat::new(Int::from(z), Int::from(grid))
                } else {
                    let q = coprime_denoms[rng.gen_range(0..coprime_denoms.len())];
                    let z = rng.gen_range(-6 * q..=6 * q);
                    Rat::new(Int::from(z), Int::from(q))
                };
                p.push(x);
            }
            p.truncate(self.n);
            pts.push(p);
        }
        pts
    }

    /// Semi-decision of equality as functions: structural equality is
    /// accepted immediately; otherwise at least `samples` deterministic
    /// points are compared exactly.  A `false` answer is always sound.
    pub fn equivalent(&self, other: &QuasiPolynomial, samples: usize) -> bool {
        assert_eq!(self.n, other.n, "parameter count mismatch");
        if self == other {
            return true;
        }
        for p in self.sample_points(other, samples) {
            if self.eval(&p) != other.eval(&p) {
                return false;
            }
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let form_json = |f: &LinearFormQ, e: u32| {
            serde_json::json!([
                f.coords().iter().map(format_rat).collect::<Vec<_>>(),
                e
            ])
        };
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|((step, poly), c)| {
                serde_json::json!({
                    "coeff": format_rat(c),
                    "step": step.iter().map(|(f, e)| form_json(f, *e)).collect::<Vec<_>>(),
                    "poly": poly.iter().map(|(f, e)| form_json(f, *e)).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "N": self.n, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QuasiPolynomial> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Schema("quasi-polynomial must be an object".into()))?;
        let n = obj
            .get("N")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Schema("missing integer field N".into()))? as usize;
        let terms = obj
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Schema("missing array field terms".into()))?;
        let parse_factors = |v: &serde_json::Value, n: usize| -> Result<FactorList> {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Schema("factor list must be an array".into()))?;
            let mut out = Vec::with_capacity(arr.len());
            for f in arr {
                let pair = f
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Schema("factor must be [coords, exponent]".into()))?;
                let coords_json = pair[0]
                    .as_array()
                    .ok_or_else(|| Error::Schema("form coordinates must be an array".into()))?;
                if coords_json.len() != n {
                    return Err(Error::Schema(format!(
                        "form has {} coordinates, expected {}",
                        coords_json.len(),
                        n
                    )));
                }
                let mut coords = Vec::with_capacity(n);
                for c in coords_json {
                    let s = c
                        .as_str()
                        .ok_or_else(|| Error::Schema("rationals must be strings".into()))?;
                    coords.push(parse_rat(s)?);
                }
                let e = pair[1]
                    .as_u64()
                    .ok_or_else(|| Error::Schema("exponent must be a nonnegative integer".into()))?;
                out.push((LinearFormQ::new(&coords), e as u32));
            }
            Ok(out)
        };
        let mut qp = QuasiPolynomial::zero(n);
        for t in terms {
            let tobj = t
                .as_object()
                .ok_or_else(|| Error::Schema("term must be an object".into()))?;
            let coeff = parse_rat(
                tobj.get("coeff")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Schema("missing string field coeff".into()))?,
            )?;
            let step = match tobj.get("step") {
                Some(v) => parse_factors(v, n)?,
                None => Vec::new(),
            };
            let poly = match tobj.get("poly") {
                Some(v) => parse_factors(v, n)?,
                None => Vec::new(),
            };
            qp.add_term(step, poly, coeff);
        }
        Ok(qp)
    }
}

fn fmt_form(f: &LinearFormQ, vars: &[String]) -> String {
    let coords = f.coords();
    let mut parts = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let var = &vars[i];
        let piece = if c.is_one() {
            var.clone()
        } else if *c == -Rat::one() {
            format!("-{var}")
        } else {
            format!("{}*{var}", format_rat(c))
        };
        if parts.is_empty() {
            parts.push(piece);
        } else if piece.starts_with('-') {
            parts.push(format!("- {}", &piece[1..]));
        } else {
            parts.push(format!("+ {piece}"));
        }
    }
    parts.join(" ")
}

impl fmt::Display for QuasiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vars: Vec<String> = if self.n == 1 {
            vec!["t".to_string()]
        } else {
            (1..=self.n).map(|i| format!("b{i}")).collect()
        };
        let mut first = true;
        for ((step, poly), c) in &self.terms {
            let mut factors = Vec::new();
            for (form, e) in poly {
                let base = format!("({})", fmt_form(form, &vars));
                factors.push(if *e == 1 { base } else { format!("{base}^{e}") });
            }
            for (form, e) in step {
                let base = format!("{{{}}}", fmt_form(form, &vars));
                factors.push(if *e == 1 { base } else { format!("{base}^{e}") });
            }
            let mut c = c.clone();
            let neg = c.is_negative();
            if neg {
                c = -c;
            }
            let mut body = if factors.is_empty() {
                format_rat(&c)
            } else if c.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", format_rat(&c), factors.join("*"))
            };
            if first {
                if neg {
                    body = format!("-{body}");
                }
                write!(f, "{body}")?;
                first = false;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

pub fn qp_add(f: &QuasiPolynomial, g: &QuasiPolynomial) -> QuasiPolynomial {
    f.add(g)
}

pub fn qp_mul(f: &QuasiPolynomial, g: &QuasiPolynomial) -> QuasiPolynomial {
    f.mul(g)
}

pub fn qp_eval(f: &QuasiPolynomial, b: &[Rat]) -> Rat {
    f.eval(b)
}

pub fn qp_degrees(f: &QuasiPolynomial) -> (u32, u32, u32) {
    f.degrees()
}

pub fn qp_specialize(f: &QuasiPolynomial, t: &RatMatrix) -> QuasiPolynomial {
    f.specialize(t)
}

pub fn qp_equivalent(f: &QuasiPolynomial, g: &QuasiPolynomial, samples: usize) -> bool {
    f.equivalent(g, samples)
}

pub fn qp_to_json(f: &QuasiPolynomial) -> serde_json::Value {
    f.to_json()
}

pub fn qp_from_json(v: &serde_json::Value) -> Result<QuasiPolynomial> {
    QuasiPolynomial::from_json(v)
}

/// Convenience: the form `<coords, b>` from i64 numerator/denominator pairs is
/// overkill in tests; this builds a form from plain rationals.
pub fn form(coords: &[Rat]) -> LinearFormQ {
    LinearFormQ::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat, rat_int};

    fn e(n: usize, i: usize) -> LinearFormQ {
        let mut c = vec![Rat::zero(); n];
        c[i] = Rat::one();
        LinearFormQ::new(&c)
    }

    #[test]
    fn frac_is_right_continuous() {
        assert_eq!(frac(&rat(-3, 10)), rat(7, 10));
        assert_eq!(frac(&rat_int(2)), rat_int(0));
        assert_eq!(frac(&rat(7, 2)), rat(1, 2));
    }

    #[test]
    fn step_complement_collapses() {
        // {b1} + (1 - {b1}) = 1 structurally
        let s = QuasiPolynomial::step_form(&e(2, 0));
        let sum = s.add(&QuasiPolynomial::one(2).sub(&s));
        assert_eq!(sum, QuasiPolynomial::one(2));
    }

    #[test]
    fn degrees_examples() {
        let b = QuasiPolynomial::poly_form(&e(1, 0));
        let s = QuasiPolynomial::step_form(&e(1, 0));
        let f = b.pow(3).mul(&s);
        assert_eq!(f.degrees(), (3, 1, 4));
        assert_eq!(QuasiPolynomial::constant(1, rat_int(5)).degrees(), (0, 0, 0));
        assert_eq!(QuasiPolynomial::zero(1).degrees(), (0, 0, 0));
    }

    #[test]
    fn interval_count_formula() {
        // number of integers in [-b2, b1] as a step polynomial:
        // b1 + b2 + 1 - {b1} - {b2}
        let b1 = QuasiPolynomial::poly_form(&e(2, 0));
        let b2 = QuasiPolynomial::poly_form(&e(2, 1));
        let f = b1
            .add(&b2)
            .add(&QuasiPolynomial::one(2))
            .sub(&QuasiPolynomial::step_form(&e(2, 0)))
            .sub(&QuasiPolynomial::step_form(&e(2, 1)));
        assert_eq!(f.eval(&[rat(1, 2), rat(7, 10)]), rat_int(1));
        assert_eq!(f.eval(&[rat_int(3), rat_int(2)]), rat_int(6));
    }

    #[test]
    fn specialize_scales_the_form() {
        let s = QuasiPolynomial::step_form(&e(2, 0));
        let t = RatMatrix::from_rows(&[vec![rat(1, 2)], vec![rat_int(0)]]);
        let g = s.specialize(&t);
        assert_eq!(g, QuasiPolynomial::step_form(&form(&[rat(1, 2)])));
        assert_eq!(g.eval(&[rat_int(3)]), rat(1, 2));
    }

    #[test]
    fn equivalence_is_sound_for_different() {
        // {b1} and 1 - {-b1} agree except at integers
        let s = QuasiPolynomial::step_form(&e(1, 0));
        let t = QuasiPolynomial::one(1)
            .sub(&QuasiPolynomial::step_form(&form(&[rat_int(-1)])));
        assert!(!s.equivalent(&t, 64));
        // and a true identity is accepted
        let u = QuasiPolynomial::step_form(&e(1, 0))
            .add(&QuasiPolynomial::one(1))
            .sub(&QuasiPolynomial::step_form(&e(1, 0)));
        assert!(u.equivalent(&QuasiPolynomial::one(1), 64));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut f = QuasiPolynomial::zero(2);
        f.add_term(
            vec![(form(&[rat(1, 2), rat(1, 2)]), 2)],
            vec![(form(&[rat_int(3), rat_int(0)]), 1)],
            rat(-7, 3),
        );
        f.add_term(Vec::new(), Vec::new(), rat_int(1));
        let j = f.to_json();
        let g = QuasiPolynomial::from_json(&j).unwrap();
        assert_eq!(f, g);
        assert_eq!(j, g.to_json());
        assert_eq!(serde_json::to_string(&j).unwrap(), serde_json::to_string(&g.to_json()).unwrap());
    }

    #[test]
    fn scale_absorption_canonicalizes_poly_factors() {
        // <(2,0), b> and 2*<(1,0), b> are the same term
        let mut f = QuasiPolynomial::zero(2);
        f.add_term(Vec::new(), vec![(form(&[rat_int(2), rat_int(0)]), 1)], rat_int(1));
        let mut g = QuasiPolynomial::zero(2);
        g.add_term(Vec::new(), vec![(form(&[rat_int(1), rat_int(0)]), 1)], rat_int(2));
        assert_eq!(f, g);
    }

    #[test]
    fn display_is_readable() {
        let f = QuasiPolynomial::poly_form(&e(1, 0))
            .pow(2)
            .scale(&rat(3, 2))
            .sub(&QuasiPolynomial::step_form(&form(&[rat(1, 2)])));
        let s = format!("{f}");
        assert!(s.contains("3/2*(t)^2"), "got {s}");
        assert!(s.contains("{1/2*t}"), "got {s}");
    }
}
