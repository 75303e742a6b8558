//! Independent verification routines.
//!
//! Everything in this module recomputes results from scratch using only the
//! graded kernel (`element`, `gens`, `derivation`): the bracket here is a
//! closed-form double sum with its own sign bookkeeping, not the recursive
//! Leibniz peeling of `polyvector::schouten`, and the certificate checkers
//! below go through these routines only.  Agreement between the two code
//! paths is itself a tested invariant.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::Algebra;
use crate::derivation::{substitute, Derivation};
use crate::element::{mul, Element, Monomial};
use crate::error::Result;
use crate::gens::{GenId, Generators, Kind};
use crate::q::{q_int, q_ratio, Q};

/// Brute-force normalization of a flat generator sequence by bubble sort,
/// counting odd-odd transpositions.  `None` when an odd generator repeats.
pub fn bubble_normalize(g: &Generators, ids: &[GenId]) -> Option<(Monomial, bool)> {
    let mut v = ids.to_vec();
    let mut neg = false;
    loop {
        let mut swapped = false;
        for k in 0..v.len().saturating_sub(1) {
            if v[k] > v[k + 1] {
                if g.odd(v[k]) && g.odd(v[k + 1]) {
                    neg = !neg;
                }
                v.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    for k in 0..v.len().saturating_sub(1) {
        if v[k] == v[k + 1] && g.odd(v[k]) {
            return None;
        }
    }
    let mut factors: Vec<(GenId, u32)> = Vec::new();
    for id in v {
        match factors.last_mut() {
            Some(last) if last.0 == id => last.1 += 1,
            _ => factors.push((id, 1)),
        }
    }
    Some((Monomial(factors), neg))
}

fn parity_slice(g: &Generators, ids: &[GenId]) -> i64 {
    ids.iter().map(|&id| g.total_deg(id)).sum::<i64>().rem_euclid(2)
}

fn elem_of_slice(g: &Generators, ids: &[GenId]) -> Element {
    match bubble_normalize(g, ids) {
        None => Element::zero(),
        Some((m, neg)) => Element::term(m, if neg { q_int(-1) } else { q_int(1) }),
    }
}

fn oracle_pairing(g: &Generators, a: GenId, b: GenId) -> Option<bool> {
    let eps = (g.shift() + 1).rem_euclid(2);
    match (g.kind(a), g.kind(b)) {
        (Kind::Poly, Kind::Algebra) if g.base_index(a) == g.base_index(b) => Some(false),
        (Kind::Algebra, Kind::Poly) if g.base_index(a) == g.base_index(b) => {
            let s = (g.total_deg(a) + eps) * (g.total_deg(b) + eps) + 1;
            Some(s.rem_euclid(2) == 1)
        }
        _ => None,
    }
}

/// Closed-form Schouten bracket:
/// `[u, v] = sum_{i,j} (-1)^{|u_{>i}|(|v|+e) + (|u_i|+e)|v_{<j}|}
///           u_{<i} v_{<j} <u_i, v_j> v_{>j} u_{>i}`.
pub fn oracle_schouten(g: &Generators, a: &Element, b: &Element) -> Element {
    let eps = (g.shift() + 1).rem_euclid(2);
    let mut out = Element::zero();
    for (ma, ca) in a.terms() {
        let u = ma.expand();
        for (mb, cb) in b.terms() {
            let v = mb.expand();
            let v_parity = parity_slice(g, &v);
            for i in 0..u.len() {
                for j in 0..v.len() {
                    let Some(pair_neg) = oracle_pairing(g, u[i], v[j]) else {
                        continue;
                    };
                    let s = parity_slice(g, &u[i + 1..]) * ((v_parity + eps).rem_euclid(2))
                        + ((g.total_deg(u[i]) + eps).rem_euclid(2)) * parity_slice(g, &v[..j]);
                    let mut t = elem_of_slice(g, &u[..i]);
                    t = mul(g, &t, &elem_of_slice(g, &v[..j]));
                    t = mul(g, &t, &elem_of_slice(g, &v[j + 1..]));
                    t = mul(g, &t, &elem_of_slice(g, &u[i + 1..]));
                    let mut c = ca * cb;
                    if pair_neg {
                        c = -c;
                    }
                    if s.rem_euclid(2) == 1 {
                        c = -c;
                    }
                    out = out.add(&t.scale(&c));
                }
            }
        }
    }
    out
}

/// Lifted internal differential, rebuilt from the raw generator values.
pub fn oracle_lifted_differential(alg: &Algebra) -> Element {
    let g = alg.gens();
    let mut out = Element::zero();
    for i in 0..g.len() {
        let coeff = alg.total_value(i);
        if !coeff.is_zero() {
            out = out.add(&mul(g, &coeff, &Element::gen(g.id(Kind::Poly, i))));
        }
    }
    out
}

/// MC defect via the oracle bracket, reduced below the weight truncation.
pub fn oracle_mc_defect(alg: &Algebra, pi: &Element, trunc: u32) -> Element {
    let g = alg.gens();
    let hat = oracle_lifted_differential(alg);
    let out = oracle_schouten(g, &hat, pi)
        .add(&oracle_schouten(g, pi, pi).scale(&q_ratio(1, 2)));
    out.filter(|m| m.pv_weight(g) < trunc)
}

/// `mu(omega, pi)` recomputed: walk each form monomial and multiply factor
/// images directly (dx -> oracle bracket `[pi, x]`).
pub fn oracle_mu(alg: &Algebra, omega: &Element, pi: &Element) -> Element {
    let g = alg.gens();
    let mut out = Element::zero();
    for (m, c) in omega.terms() {
        let mut acc = Element::constant(c.clone());
        for &(id, exp) in &m.0 {
            let img = match g.kind(id) {
                Kind::Form => {
                    let x = Element::gen(g.id(Kind::Algebra, g.base_index(id)));
                    oracle_schouten(g, pi, &x)
                }
                _ => Element::gen(id),
            };
            for _ in 0..exp {
                acc = mul(g, &acc, &img);
                if acc.is_zero() {
                    break;
                }
            }
            if acc.is_zero() {
                break;
            }
        }
        out = out.add(&acc);
    }
    out
}

/// `sigma(pi) = sum_w (w - 1) pi_w`.
pub fn oracle_sigma(g: &Generators, pi: &Element) -> Element {
    let mut out = Element::zero();
    for (m, c) in pi.terms() {
        let w = m.pv_weight(g) as i64;
        out.add_term(m.clone(), c * q_int(w - 1));
    }
    out
}

/// Re-verify a compatibility certificate:
/// `mu(omega, pi) - sigma(pi) = [delta + pi, h]` modulo weight `trunc`.
pub fn verify_compat(
    alg: &Algebra,
    omega: &Element,
    pi: &Element,
    h: &Element,
    trunc: u32,
) -> bool {
    let g = alg.gens();
    let lhs = oracle_mu(alg, omega, pi).sub(&oracle_sigma(g, pi));
    let field = oracle_lifted_differential(alg).add(pi);
    let rhs = oracle_schouten(g, &field, h);
    lhs.sub(&rhs).filter(|m| m.pv_weight(g) < trunc).is_zero()
}

/// Re-verify closedness `D omega = 0` below the Hodge truncation, with the
/// de Rham rules rebuilt locally.
pub fn verify_closed(alg: &Algebra, omega: &Element, trunc: u32) -> Result<bool> {
    let g = alg.gens();
    let mut d = Derivation::new("check-d", true, &[Kind::Algebra, Kind::Form]);
    for i in 0..g.len() {
        d.set(g.id(Kind::Algebra, i), Element::gen(g.id(Kind::Form, i)));
        d.set(g.id(Kind::Form, i), Element::zero());
    }
    let mut internal = Derivation::new("check-delta-bar", true, &[Kind::Algebra, Kind::Form]);
    for i in 0..g.len() {
        let tot = alg.total_value(i);
        internal.set(g.id(Kind::Algebra, i), tot.clone());
        internal.set(g.id(Kind::Form, i), d.apply(g, &tot)?.neg());
    }
    let defect = d.apply(g, omega)?.add(&internal.apply(g, omega)?);
    Ok(defect.filter(|m| m.form_deg(g) < trunc).is_zero())
}

/// Re-verify an unsolvability certificate: the functional must annihilate
/// `[delta, m]` for every monomial `m` of the domain (images recomputed
/// with the closed-form bracket).
pub fn verify_unsolvability(
    alg: &Algebra,
    domain: &[Monomial],
    functional: &[(Monomial, Q)],
) -> bool {
    let g = alg.gens();
    let hat = oracle_lifted_differential(alg);
    for m in domain {
        let img = oracle_schouten(g, &hat, &Element::term(m.clone(), q_int(1)));
        let pairing: Q = functional
            .iter()
            .map(|(mm, c)| c * img.coeff(mm))
            .fold(Q::from_integer(0.into()), |a, b| a + b);
        if !pairing.is_zero() {
            return false;
        }
    }
    true
}

/// Re-verify that two substitution tables are mutually inverse modulo the
/// polynomial-weight quotient: composing must fix every `dx_a` and `pv_a`.
pub fn verify_inverse_substitutions(
    g: &Generators,
    fwd: &BTreeMap<GenId, Element>,
    inv: &BTreeMap<GenId, Element>,
    poly_weight_cap: u32,
) -> bool {
    let reduce = |e: &Element| crate::element::reduce_poly_weight(g, e, poly_weight_cap);
    for (&id, img) in fwd {
        let back = reduce(&substitute(g, &reduce(img), inv));
        if back != Element::gen(id) {
            return false;
        }
    }
    for (&id, img) in inv {
        let back = reduce(&substitute(g, &reduce(img), fwd));
        if back != Element::gen(id) {
            return false;
        }
    }
    true
}

/// Scale a rational polynomial in `t` given as coefficient vector.
fn poly_scale(p: &[Element], c: &Q) -> Vec<Element> {
    p.iter().map(|e| e.scale(c)).collect()
}

fn poly_add(a: &[Element], b: &[Element]) -> Vec<Element> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(Element::zero);
            let y = b.get(k).cloned().unwrap_or_else(Element::zero);
            x.add(&y)
        })
        .collect()
}

/// Bracket of two `t`-polynomials with values in polyvectors (oracle side).
fn poly_bracket(g: &Generators, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out = vec![Element::zero(); (a.len() + b.len()).saturating_sub(1).max(1)];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let t = oracle_schouten(g, x, y);
            out[i + j] = out[i + j].add(&t);
        }
    }
    out
}

/// Re-verify a gauge path `P(t) + lambda dt`:
/// * `kappa(P(t)) = 0` identically in `t` (modulo the weight truncation);
/// * `dP/dt = [delta + P(t), lambda]` coefficient-wise;
/// * endpoints match the claimed structures.
pub fn verify_gauge_path(
    alg: &Algebra,
    path: &[Element],
    lambda: &Element,
    start: &Element,
    end: &Element,
    trunc: u32,
) -> bool {
    let g = alg.gens();
    if path.is_empty() {
        return false;
    }
    let cut = |e: &Element| e.filter(|m| m.pv_weight(g) < trunc);
    // endpoints: P(0) = start, P(1) = end
    if cut(&path[0].sub(start)) != Element::zero() {
        return false;
    }
    let mut at_one = Element::zero();
    for e in path {
        at_one = at_one.add(e);
    }
    if cut(&at_one.sub(end)) != Element::zero() {
        return false;
    }
    // kappa(P(t)) = 0 for all t
    let hat = oracle_lifted_differential(alg);
    let lin = poly_bracket(g, &[hat.clone()], path);
    let sq = poly_bracket(g, path, path);
    let kappa_t = poly_add(&lin, &poly_scale(&sq, &q_ratio(1, 2)));
    if kappa_t.iter().any(|e| !cut(e).is_zero()) {
        return false;
    }
    // flow equation: (k+1) p_{k+1} = [delta + P, lambda]_k
    let field = poly_add(&[hat], path);
    let rhs = poly_bracket(g, &field, &[lambda.clone()]);
    for k in 0..path.len().max(rhs.len()) {
        let dp = path
            .get(k + 1)
            .map(|e| e.scale(&q_int(k as i64 + 1)))
            .unwrap_or_else(Element::zero);
        let r = rhs.get(k).cloned().unwrap_or_else(Element::zero);
        if !cut(&dp.sub(&r)).is_zero() {
            return false;
        }
    }
    true
}

/// Re-verify an incompatibility functional: it must annihilate the image
/// of `[delta + pi, -]` on the domain (recomputed with the closed-form
/// bracket and truncated below `trunc`), and the pairing against the
/// defect `mu(omega, pi) - sigma(pi)` is checked by the caller.
pub fn verify_unsolvability_twisted(
    alg: &Algebra,
    pi: &Element,
    trunc: u32,
    domain: &[Monomial],
    functional: &[(Monomial, Q)],
) -> bool {
    let g = alg.gens();
    let field = oracle_lifted_differential(alg).add(pi);
    for m in domain {
        let img = oracle_schouten(g, &field, &Element::term(m.clone(), q_int(1)))
            .filter(|mm| mm.pv_weight(g) < trunc);
        let pairing: Q = functional
            .iter()
            .map(|(mm, c)| c * img.coeff(mm))
            .fold(Q::from_integer(0.into()), |a, b| a + b);
        if !pairing.is_zero() {
            return false;
        }
    }
    true
}
