//! Polyvectors and the shifted Schouten bracket.
//!
//! Weight-`j` polyvectors are represented inside the free algebra on the
//! `pv_` duals: `j` dual factors with an algebra coefficient.  The bracket
//! is the unique biderivation extending the pairing `[pv_x, x] = 1` with
//! all other generator brackets zero.  Its internal signs are not
//! transcribed from anywhere; they are forced by the two Leibniz rules
//!
//! ```text
//! [a, b c] = [a, b] c + (-1)^{(|a|+e)|b|} b [a, c]
//! [a b, c] = a [b, c] + (-1)^{|b|(|c|+e)} [a, c] b        e = n + 1
//! ```
//!
//! together with antisymmetry `[a,b] = -(-1)^{(|a|+e)(|b|+e)}[b,a]`, and
//! are cross-checked against an independent closed-form implementation in
//! the `check` module.

use std::collections::BTreeMap;

use crate::algebra::Algebra;
use crate::element::{mul, Element, Monomial};
use crate::error::{Error, Result};
use crate::gens::{GenId, Generators, Kind};
use crate::q::{q_int, q_ratio};

fn mono_from_sorted(ids: &[GenId]) -> Monomial {
    let mut out: Vec<(GenId, u32)> = Vec::new();
    for &id in ids {
        match out.last_mut() {
            Some(last) if last.0 == id => last.1 += 1,
            _ => out.push((id, 1)),
        }
    }
    Monomial(out)
}

fn parity_sum(g: &Generators, ids: &[GenId]) -> bool {
    ids.iter().map(|&id| g.total_deg(id)).sum::<i64>().rem_euclid(2) == 1
}

/// Bracket of two generators; `None` for zero.
fn pairing(g: &Generators, a: GenId, b: GenId) -> Option<bool> {
    let eps = (g.shift() + 1).rem_euclid(2) == 1;
    match (g.kind(a), g.kind(b)) {
        (Kind::Poly, Kind::Algebra) if g.base_index(a) == g.base_index(b) => Some(false),
        (Kind::Algebra, Kind::Poly) if g.base_index(a) == g.base_index(b) => {
            // antisymmetry: [x, pv_x] = -(-1)^{(|x|+e)(|pv|+e)} [pv_x, x]
            let sa = g.odd(a) ^ eps;
            let sb = g.odd(b) ^ eps;
            Some(!(sa && sb))
        }
        _ => None,
    }
}

fn bracket_seq(g: &Generators, u: &[GenId], v: &[GenId]) -> Element {
    if u.is_empty() || v.is_empty() {
        return Element::zero();
    }
    let eps = (g.shift() + 1).rem_euclid(2) == 1;
    if u.len() == 1 {
        if v.len() == 1 {
            return match pairing(g, u[0], v[0]) {
                None => Element::zero(),
                Some(neg) => Element::constant(if neg { q_int(-1) } else { q_int(1) }),
            };
        }
        // [g, v0 v'] = [g, v0] v' + (-1)^{(|g|+e)|v0|} v0 [g, v']
        let head = bracket_seq(g, u, &v[..1]);
        let mut out = Element::zero();
        if !head.is_zero() {
            out = out.add(&mul(g, &head, &Element::term(mono_from_sorted(&v[1..]), q_int(1))));
        }
        let tail = bracket_seq(g, u, &v[1..]);
        if !tail.is_zero() {
            let sign = (g.odd(u[0]) ^ eps) && g.odd(v[0]);
            let t = mul(g, &Element::term(mono_from_sorted(&v[..1]), q_int(1)), &tail);
            out = out.add(&if sign { t.neg() } else { t });
        }
        out
    } else {
        // [u0 u', v] = u0 [u', v] + (-1)^{|u'|(|v|+e)} [u0, v] u'
        let mut out = Element::zero();
        let rest = bracket_seq(g, &u[1..], v);
        if !rest.is_zero() {
            out = out.add(&mul(g, &Element::term(mono_from_sorted(&u[..1]), q_int(1)), &rest));
        }
        let head = bracket_seq(g, &u[..1], v);
        if !head.is_zero() {
            let sign = parity_sum(g, &u[1..]) && (parity_sum(g, v) ^ eps);
            let t = mul(g, &head, &Element::term(mono_from_sorted(&u[1..]), q_int(1)));
            out = out.add(&if sign { t.neg() } else { t });
        }
        out
    }
}

/// The shifted Schouten bracket.  Inputs must be polyvector-elements
/// (algebra and `pv_` factors only).
pub fn schouten(g: &Generators, a: &Element, b: &Element) -> Result<Element> {
    a.check_kinds(g, &[Kind::Algebra, Kind::Poly])
        .map_err(|_| Error::Precondition("bracket inputs must be polyvector-elements".into()))?;
    b.check_kinds(g, &[Kind::Algebra, Kind::Poly])
        .map_err(|_| Error::Precondition("bracket inputs must be polyvector-elements".into()))?;
    let mut out = Element::zero();
    for (ma, ca) in a.terms() {
        let ua = ma.expand();
        for (mb, cb) in b.terms() {
            let t = bracket_seq(g, &ua, &mb.expand());
            if !t.is_zero() {
                out = out.add(&t.scale(&(ca * cb)));
            }
        }
    }
    // weight filtration: [F^i, F^j] lands in F^{i+j-1}
    #[cfg(debug_assertions)]
    {
        if !a.is_zero() && !b.is_zero() && !out.is_zero() {
            let wa = a.terms().map(|(m, _)| m.pv_weight(g)).min().unwrap();
            let wb = b.terms().map(|(m, _)| m.pv_weight(g)).min().unwrap();
            let wmin = (wa + wb).saturating_sub(1);
            debug_assert!(
                out.terms().all(|(m, _)| m.pv_weight(g) >= wmin),
                "bracket broke the weight filtration"
            );
        }
    }
    Ok(out)
}

/// `[lifted differential, v]` — the internal differential acting on
/// polyvector-elements.
pub fn delta_bracket(alg: &Algebra, v: &Element) -> Result<Element> {
    schouten(alg.gens(), &alg.lifted_differential(), v)
}

/// A Poisson-structure candidate modulo weight `trunc`: the sum of
/// homogeneous components of weights `2 <= i < trunc`, each of total
/// cochain degree `n + 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poisson {
    element: Element,
    trunc: u32,
}

impl Poisson {
    pub fn new(alg: &Algebra, element: Element, trunc: u32) -> Result<Self> {
        let g = alg.gens();
        if trunc < 3 {
            return Err(Error::Precondition(format!(
                "weight truncation must be at least 3, got {trunc}"
            )));
        }
        element.check_kinds(g, &[Kind::Algebra, Kind::Poly])?;
        let n = g.shift();
        for (m, _) in element.terms() {
            let w = m.pv_weight(g);
            if w < 2 || w >= trunc {
                return Err(Error::Precondition(format!(
                    "term `{}` has weight {w}, outside 2..{trunc}",
                    crate::element::mono_string(g, m)
                )));
            }
            let d = m.total_deg(g);
            if d != n + 2 {
                return Err(Error::Inhomogeneous(format!(
                    "term `{}` has total degree {d}, expected {}",
                    crate::element::mono_string(g, m),
                    n + 2
                )));
            }
        }
        Ok(Poisson { element, trunc })
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn component(&self, g: &Generators, i: u32) -> Element {
        self.element.weight_part(g, i)
    }

    /// Weights at which the structure has a nonzero component.
    pub fn weights(&self, g: &Generators) -> Vec<u32> {
        let mut ws: Vec<u32> = self.element.terms().map(|(m, _)| m.pv_weight(g)).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }
}

/// Restrict to weights strictly below `trunc`.
pub fn truncate_weight(g: &Generators, e: &Element, trunc: u32) -> Element {
    e.filter(|m| m.pv_weight(g) < trunc)
}

/// Maurer-Cartan defect `kappa(pi) = [delta, pi] + 1/2 [pi, pi]`, reduced
/// modulo weight `trunc` (only those components are determined by the
/// truncated input).
pub fn mc_defect(alg: &Algebra, pi: &Poisson) -> Result<Element> {
    let g = alg.gens();
    let lin = delta_bracket(alg, pi.element())?;
    let sq = schouten(g, pi.element(), pi.element())?;
    Ok(truncate_weight(g, &lin.add(&sq.scale(&q_ratio(1, 2))), pi.trunc()))
}

/// `delta_pi(v) = [delta + pi, v]` (not truncated; callers filter).
pub fn poisson_differential(alg: &Algebra, pi: &Poisson, v: &Element) -> Result<Element> {
    let tot = alg.lifted_differential().add(pi.element());
    schouten(alg.gens(), &tot, v)
}

/// Tangent direction at a Poisson candidate.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub base: Poisson,
    pub dir: Element,
}

/// The canonical tangent vector `sigma(pi) = sum (i-1) pi_i`.
pub fn sigma(g: &Generators, pi: &Poisson) -> TangentVector {
    let mut dir = Element::zero();
    for w in pi.weights(g) {
        dir = dir.add(&pi.component(g, w).scale(&q_int(w as i64 - 1)));
    }
    TangentVector { base: pi.clone(), dir }
}

/// Substitution map sending each `dx_a` to `[pi, x_a]`; extends to the
/// graded algebra map used throughout the compatibility calculus.
pub fn sharp_subs(alg: &Algebra, pi: &Element) -> Result<BTreeMap<GenId, Element>> {
    let g = alg.gens();
    let mut subs = BTreeMap::new();
    for i in 0..g.len() {
        let x = Element::gen(g.id(Kind::Algebra, i));
        subs.insert(g.id(Kind::Form, i), schouten(g, pi, &x)?);
    }
    Ok(subs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::oracle_schouten;
    use crate::gens::GeneratorSpec;
    use proptest::prelude::*;

    fn mixed(shift: i64) -> Generators {
        Generators::new(
            vec![
                GeneratorSpec::new("x", 0, 0, 1),
                GeneratorSpec::new("xi", 0, 1, 1),
                GeneratorSpec::new("u", 1, 0, 1),
                GeneratorSpec::new("th", 1, 2, 1),
                GeneratorSpec::new("v", 2, 0, 1),
            ],
            shift,
        )
        .unwrap()
    }

    /// All polyvector-monomials (algebra and dual factors) with at most
    /// `max_len` factors.
    fn mono_pool(g: &Generators, max_len: u32) -> Vec<Element> {
        let ids: Vec<GenId> = g
            .iter_ids(Kind::Algebra)
            .chain(g.iter_ids(Kind::Poly))
            .collect();
        let mut pool = vec![Monomial::one()];
        let mut frontier = vec![Monomial::one()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for m in &frontier {
                let start = m.0.last().map(|&(id, _)| id).unwrap_or(GenId(0));
                for &id in ids.iter().filter(|&&id| id >= start) {
                    if let Some((ext, neg)) = crate::element::mono_mul(g, m, &Monomial::gen(id)) {
                        assert!(!neg);
                        next.push(ext);
                    }
                }
            }
            pool.extend(next.iter().cloned());
            frontier = next;
        }
        pool.into_iter().map(|m| Element::term(m, q_int(1))).collect()
    }

    #[test]
    fn pairing_goldens() {
        for n in -1..3 {
            let g = mixed(n);
            let eps = (n + 1).rem_euclid(2) == 1;
            for i in 0..g.len() {
                let x = Element::gen(g.id(Kind::Algebra, i));
                let p = Element::gen(g.id(Kind::Poly, i));
                assert_eq!(schouten(&g, &p, &x).unwrap(), Element::one(), "[pv, x] = 1");
                let sx = g.odd(g.id(Kind::Algebra, i)) ^ eps;
                let sp = g.odd(g.id(Kind::Poly, i)) ^ eps;
                let expect = if sx && sp { Element::one() } else { Element::one().neg() };
                assert_eq!(schouten(&g, &x, &p).unwrap(), expect, "antisymmetric pairing");
            }
        }
    }

    #[test]
    fn production_matches_oracle_exhaustively() {
        for n in [-1i64, 0, 1, 2] {
            let g = mixed(n);
            let pool = mono_pool(&g, 2);
            for a in &pool {
                for b in &pool {
                    let lhs = schouten(&g, a, b).unwrap();
                    let rhs = oracle_schouten(&g, a, b);
                    assert_eq!(
                        lhs,
                        rhs,
                        "bracket mismatch at n={n}: [{}, {}]",
                        crate::element::element_string(&g, a),
                        crate::element::element_string(&g, b)
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_form_factors() {
        let g = mixed(0);
        let dx = Element::gen(g.id(Kind::Form, 0));
        assert!(schouten(&g, &dx, &Element::one()).is_err());
    }

    fn exp_vec() -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(0u32..3, 15)
    }

    fn poly_mono(g: &Generators, exps: &[u32]) -> Monomial {
        let mut factors = Vec::new();
        for (k, &e) in exps.iter().enumerate() {
            let id = GenId(k as u32);
            if g.kind(id) == Kind::Form {
                continue;
            }
            let e = if g.odd(id) { e.min(1) } else { e };
            if e > 0 {
                factors.push((id, e));
            }
        }
        Monomial(factors)
    }

    fn one_term(m: &Monomial) -> Element {
        Element::term(m.clone(), q_int(1))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_oracle_on_deep_monomials(ea in exp_vec(), eb in exp_vec(), n in -1i64..3) {
            let g = mixed(n);
            let a = one_term(&poly_mono(&g, &ea));
            let b = one_term(&poly_mono(&g, &eb));
            prop_assert_eq!(schouten(&g, &a, &b).unwrap(), oracle_schouten(&g, &a, &b));
        }

        /// [a,b] = -(-1)^{(|a|+e)(|b|+e)} [b,a]
        #[test]
        fn antisymmetry(ea in exp_vec(), eb in exp_vec(), n in -1i64..3) {
            let g = mixed(n);
            let eps = (n + 1).rem_euclid(2) == 1;
            let ma = poly_mono(&g, &ea);
            let mb = poly_mono(&g, &eb);
            let (a, b) = (one_term(&ma), one_term(&mb));
            let ab = schouten(&g, &a, &b).unwrap();
            let mut ba = schouten(&g, &b, &a).unwrap().neg();
            if (ma.parity(&g) ^ eps) && (mb.parity(&g) ^ eps) {
                ba = ba.neg();
            }
            prop_assert_eq!(ab, ba);
        }

        /// [a,[b,c]] = [[a,b],c] + (-1)^{(|a|+e)(|b|+e)} [b,[a,c]]
        #[test]
        fn jacobi(ea in exp_vec(), eb in exp_vec(), ec in exp_vec(), n in -1i64..3) {
            let g = mixed(n);
            let eps = (n + 1).rem_euclid(2) == 1;
            let ma = poly_mono(&g, &ea);
            let mb = poly_mono(&g, &eb);
            let (a, b) = (one_term(&ma), one_term(&mb));
            let c = one_term(&poly_mono(&g, &ec));
            let lhs = schouten(&g, &a, &schouten(&g, &b, &c).unwrap()).unwrap();
            let r1 = schouten(&g, &schouten(&g, &a, &b).unwrap(), &c).unwrap();
            let mut r2 = schouten(&g, &b, &schouten(&g, &a, &c).unwrap()).unwrap();
            if (ma.parity(&g) ^ eps) && (mb.parity(&g) ^ eps) {
                r2 = r2.neg();
            }
            prop_assert_eq!(lhs, r1.add(&r2));
        }

        /// [a, bc] = [a,b] c + (-1)^{(|a|+e)|b|} b [a,c]
        #[test]
        fn leibniz(ea in exp_vec(), eb in exp_vec(), ec in exp_vec(), n in -1i64..3) {
            let g = mixed(n);
            let eps = (n + 1).rem_euclid(2) == 1;
            let ma = poly_mono(&g, &ea);
            let mb = poly_mono(&g, &eb);
            let (a, b) = (one_term(&ma), one_term(&mb));
            let c = one_term(&poly_mono(&g, &ec));
            let lhs = schouten(&g, &a, &mul(&g, &b, &c)).unwrap();
            let r1 = mul(&g, &schouten(&g, &a, &b).unwrap(), &c);
            let mut r2 = mul(&g, &b, &schouten(&g, &a, &c).unwrap());
            if (ma.parity(&g) ^ eps) && mb.parity(&g) {
                r2 = r2.neg();
            }
            prop_assert_eq!(lhs, r1.add(&r2));
        }

        /// Bracket degree: |[a,b]| = |a| + |b| - (n+1), weight wa+wb-1.
        #[test]
        fn bracket_degrees(ea in exp_vec(), eb in exp_vec(), n in -1i64..3) {
            let g = mixed(n);
            let ma = poly_mono(&g, &ea);
            let mb = poly_mono(&g, &eb);
            let out = schouten(&g, &one_term(&ma), &one_term(&mb)).unwrap();
            let da = ma.total_deg(&g);
            let db = mb.total_deg(&g);
            let wa = ma.pv_weight(&g);
            let wb = mb.pv_weight(&g);
            for (m, _) in out.terms() {
                prop_assert_eq!(m.total_deg(&g), da + db - (n + 1));
                prop_assert_eq!(m.pv_weight(&g), wa + wb - 1);
            }
        }
    }
}
