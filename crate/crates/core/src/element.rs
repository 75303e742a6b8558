//! Sparse elements of free graded-commutative algebras.
//!
//! A monomial is a sorted list of `(generator, exponent)` pairs; odd
//! generators never carry an exponent above 1 (their squares vanish).
//! Elements are finite rational linear combinations of monomials kept in a
//! `BTreeMap`, so iteration order — and with it every serialization and
//! every pivot choice downstream — is deterministic.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gens::{GenId, Generators, Kind};
use crate::q::{q_int, Q};

/// Normalized monomial: factors sorted by generator id, exponents >= 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<(GenId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn gen(id: GenId) -> Self {
        Monomial(vec![(id, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree_sum(&self, f: impl Fn(GenId) -> i64) -> i64 {
        self.0.iter().map(|&(id, e)| e as i64 * f(id)).sum()
    }

    pub fn total_deg(&self, g: &Generators) -> i64 {
        self.degree_sum(|id| g.total_deg(id))
    }

    pub fn chain_deg(&self, g: &Generators) -> i64 {
        self.degree_sum(|id| g.chain_deg(id))
    }

    pub fn cochain_deg(&self, g: &Generators) -> i64 {
        self.degree_sum(|id| g.cochain_deg(id))
    }

    /// Number of one-form factors (the form degree p).
    pub fn form_deg(&self, g: &Generators) -> u32 {
        self.0
            .iter()
            .map(|&(id, e)| if g.kind(id) == Kind::Form { e } else { 0 })
            .sum()
    }

    /// Number of polyvector-dual factors (the weight).
    pub fn pv_weight(&self, g: &Generators) -> u32 {
        self.0
            .iter()
            .map(|&(id, e)| if g.kind(id) == Kind::Poly { e } else { 0 })
            .sum()
    }

    /// Auxiliary polynomial weight: algebra factors only.
    pub fn poly_weight(&self, g: &Generators) -> u32 {
        self.0.iter().map(|&(id, e)| e * g.poly_weight(id)).sum()
    }

    pub fn parity(&self, g: &Generators) -> bool {
        self.total_deg(g).rem_euclid(2) == 1
    }

    /// Expand to a flat sequence of generator ids (repeats explicit).
    pub fn expand(&self) -> Vec<GenId> {
        let mut out = Vec::new();
        for &(id, e) in &self.0 {
            for _ in 0..e {
                out.push(id);
            }
        }
        out
    }
}

/// Multiply two normalized monomials; `None` means the product vanishes
/// (an odd generator squared).  The boolean is the Koszul sign: `true`
/// for a negative sign.
pub fn mono_mul(g: &Generators, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
    let mut out: Vec<(GenId, u32)> = Vec::with_capacity(a.0.len() + b.0.len());
    let mut neg = false;
    // odd copies of `a` not yet emitted; factors of `b` jump over them
    let mut odd_rem: u32 = a.0.iter().map(|&(id, e)| if g.odd(id) { e } else { 0 }).sum();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let take_a = match (a.0.get(i), b.0.get(j)) {
            (Some(&(ia, _)), Some(&(ib, _))) => ia <= ib,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let (id, e) = if take_a {
            let f = a.0[i];
            i += 1;
            if g.odd(f.0) {
                odd_rem -= f.1;
            }
            f
        } else {
            let f = b.0[j];
            j += 1;
            if g.odd(f.0) && (f.1 * odd_rem) % 2 == 1 {
                neg = !neg;
            }
            f
        };
        match out.last_mut() {
            Some(last) if last.0 == id => {
                last.1 += e;
                if g.odd(id) {
                    return None;
                }
            }
            _ => {
                if g.odd(id) && e > 1 {
                    return None;
                }
                out.push((id, e));
            }
        }
    }
    Some((Monomial(out), neg))
}

/// Sparse element.  The zero element has no terms; stored coefficients are
/// never zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Element {
    terms: BTreeMap<Monomial, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Element::term(Monomial::one(), q_int(1))
    }

    pub fn constant(c: Q) -> Self {
        Element::term(Monomial::one(), c)
    }

    pub fn gen(id: GenId) -> Self {
        Element::term(Monomial::gen(id), q_int(1))
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element { terms }
    }

    /// Build from an arbitrary factor sequence (any order, repeats allowed).
    pub fn from_factors(g: &Generators, c: Q, factors: &[(GenId, u32)]) -> Self {
        let mut acc = Element::constant(c);
        for &(id, e) in factors {
            for _ in 0..e {
                acc = mul(g, &acc, &Element::gen(id));
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(|| q_int(0))
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        self.scale(&q_int(-1))
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(m, q)| (m.clone(), q * c)).collect() }
    }

    /// Keep only terms passing the predicate.
    pub fn filter(&self, mut pred: impl FnMut(&Monomial) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Component of the given polyvector weight.
    pub fn weight_part(&self, g: &Generators, w: u32) -> Element {
        self.filter(|m| m.pv_weight(g) == w)
    }

    /// Component of the given form degree.
    pub fn form_part(&self, g: &Generators, p: u32) -> Element {
        self.filter(|m| m.form_deg(g) == p)
    }

    /// Largest polyvector weight present (0 for the zero element).
    pub fn max_pv_weight(&self, g: &Generators) -> u32 {
        self.terms.keys().map(|m| m.pv_weight(g)).max().unwrap_or(0)
    }

    pub fn max_form_deg(&self, g: &Generators) -> u32 {
        self.terms.keys().map(|m| m.form_deg(g)).max().unwrap_or(0)
    }

    pub fn max_poly_weight(&self, g: &Generators) -> u32 {
        self.terms.keys().map(|m| m.poly_weight(g)).max().unwrap_or(0)
    }

    /// Total cochain degree if homogeneous; `Ok(None)` for zero.
    pub fn homogeneous_deg(&self, g: &Generators) -> Result<Option<i64>> {
        let mut deg = None;
        for (m, _) in self.terms() {
            let d = m.total_deg(g);
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => {
                    return Err(Error::Inhomogeneous(format!(
                        "mixes total degrees {prev} and {d} (at `{}`)",
                        mono_string(g, m)
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Check that every monomial consists of the allowed kinds only.
    pub fn check_kinds(&self, g: &Generators, allowed: &[Kind]) -> Result<()> {
        for (m, _) in self.terms() {
            for &(id, _) in &m.0 {
                if !allowed.contains(&g.kind(id)) {
                    return Err(Error::InvalidSpec(format!(
                        "factor `{}` of kind {:?} is not allowed here",
                        g.token(id),
                        g.kind(id)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Exact product (no truncation of any kind).
pub fn mul(g: &Generators, a: &Element, b: &Element) -> Element {
    mul_impl(g, a, b, None)
}

/// Product in the quotient by monomials of polynomial weight above `cap`.
/// Only sound where an honest quotient is intended (the polynomial-weight
/// ideal is multiplicative but not stable under brackets), which is why the
/// exact [`mul`] is the default everywhere else.
pub fn mul_trunc(g: &Generators, a: &Element, b: &Element, cap: u32) -> Element {
    mul_impl(g, a, b, Some(cap))
}

fn mul_impl(g: &Generators, a: &Element, b: &Element, cap: Option<u32>) -> Element {
    let mut out = Element::zero();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            if let Some((m, neg)) = mono_mul(g, ma, mb) {
                if let Some(cap) = cap {
                    if m.poly_weight(g) > cap {
                        continue;
                    }
                }
                let c = if neg { -(ca * cb) } else { ca * cb };
                out.add_term(m, c);
            }
        }
    }
    out
}

/// Drop monomials of polynomial weight above `cap` (explicit quotient map).
pub fn reduce_poly_weight(g: &Generators, e: &Element, cap: u32) -> Element {
    e.filter(|m| m.poly_weight(g) <= cap)
}

fn coeff_string(c: &Q) -> String {
    c.to_string()
}

pub fn mono_string(g: &Generators, m: &Monomial) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    m.0.iter()
        .map(|&(id, e)| {
            if e == 1 {
                g.token(id)
            } else {
                format!("{}^{}", g.token(id), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical textual form, e.g. `3/2 * pv_x*pv_y + x^2 - dx_y`.
/// This is the only serialization of elements; the CLI parser accepts it.
pub fn element_string(g: &Generators, e: &Element) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&coeff_string(&abs));
        } else if abs.is_one() {
            out.push_str(&mono_string(g, m));
        } else {
            out.push_str(&coeff_string(&abs));
            out.push_str(" * ");
            out.push_str(&mono_string(g, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::bubble_normalize;
    use crate::gens::GeneratorSpec;
    use crate::q::{q_int, q_ratio};
    use proptest::prelude::*;

    // Mixed-parity table: x even deg 0, xi odd deg 1, u odd deg -1,
    // th odd deg 1 (different bidegree than xi), v even deg -2.
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

    fn mono_from_exps(g: &Generators, exps: &[u32]) -> Monomial {
        let mut factors = Vec::new();
        for (k, &e) in exps.iter().enumerate() {
            let id = GenId(k as u32);
            let e = if g.odd(id) { e.min(1) } else { e };
            if e > 0 {
                factors.push((id, e));
            }
        }
        Monomial(factors)
    }

    fn exp_vec(len: usize) -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(0u32..3, len)
    }

    #[test]
    fn degree_table_consequences() {
        let g = mixed(1); // n = 1
        let x = GenId(0);
        let xi = GenId(1);
        assert_eq!(g.total_deg(x), 0);
        assert!(!g.odd(x));
        assert_eq!(g.total_deg(xi), 1);
        assert!(g.odd(xi));
        // forms: base + 1
        assert_eq!(g.total_deg(g.id(Kind::Form, 0)), 1);
        assert_eq!(g.total_deg(g.id(Kind::Form, 1)), 2);
        // duals: chain + n + 1 - cochain
        assert_eq!(g.total_deg(g.id(Kind::Poly, 0)), 2);
        assert_eq!(g.total_deg(g.id(Kind::Poly, 1)), 1);
        assert_eq!(g.total_deg(g.id(Kind::Poly, 2)), 3);
    }

    #[test]
    fn odd_squares_vanish_and_dxi_squares_do_not() {
        let g = mixed(0);
        let xi = Element::gen(GenId(1));
        assert!(mul(&g, &xi, &xi).is_zero());
        // d(xi) has even total degree, so it squares freely
        let dxi = Element::gen(g.id(Kind::Form, 1));
        let sq = mul(&g, &dxi, &dxi);
        assert_eq!(sq.num_terms(), 1);
        assert_eq!(sq.max_form_deg(&g), 2);
    }

    #[test]
    fn string_round_formatting() {
        let g = mixed(0);
        let x = GenId(0);
        let xi = GenId(1);
        let e = Element::term(Monomial(vec![(x, 2)]), q_int(1))
            .add(&Element::term(Monomial(vec![(x, 1), (xi, 1)]), q_ratio(-3, 2)));
        assert_eq!(element_string(&g, &e), "-3/2 * x*xi + x^2");
        assert_eq!(element_string(&g, &Element::zero()), "0");
        assert_eq!(element_string(&g, &Element::constant(q_ratio(-1, 3))), "-1/3");
        let pv = Element::term(
            Monomial(vec![(g.id(Kind::Poly, 0), 1), (g.id(Kind::Poly, 1), 1)]),
            q_ratio(3, 2),
        );
        assert_eq!(element_string(&g, &pv), "3/2 * pv_x*pv_xi");
    }

    #[test]
    fn homogeneous_deg_flags_mixed_terms() {
        let g = mixed(0);
        let e = Element::gen(GenId(0)).add(&Element::gen(GenId(1)));
        assert!(e.homogeneous_deg(&g).is_err());
        let f = Element::gen(GenId(1)).add(&Element::gen(GenId(3)));
        assert_eq!(f.homogeneous_deg(&g).unwrap(), Some(1));
    }

    proptest! {
        /// The fast merge in `mono_mul` agrees with brute-force bubble
        /// sorting of the concatenated factor sequence, sign included.
        #[test]
        fn mono_mul_matches_bubble_sort(ea in exp_vec(15), eb in exp_vec(15), n in -1i64..3) {
            let g = mixed(n);
            let a = mono_from_exps(&g, &ea);
            let b = mono_from_exps(&g, &eb);
            let mut flat = a.expand();
            flat.extend(b.expand());
            let expected = bubble_normalize(&g, &flat);
            prop_assert_eq!(mono_mul(&g, &a, &b), expected);
        }

        /// Koszul commutativity: a*b = (-1)^{|a||b|} b*a.
        #[test]
        fn mul_graded_commutative(ea in exp_vec(15), eb in exp_vec(15), n in -1i64..3) {
            let g = mixed(n);
            let ma = mono_from_exps(&g, &ea);
            let mb = mono_from_exps(&g, &eb);
            let a = Element::term(ma.clone(), q_int(1));
            let b = Element::term(mb.clone(), q_int(1));
            let ab = mul(&g, &a, &b);
            let mut ba = mul(&g, &b, &a);
            if ma.parity(&g) && mb.parity(&g) {
                ba = ba.neg();
            }
            prop_assert_eq!(ab, ba);
        }

        /// Associativity of the normalized product.
        #[test]
        fn mul_associative(ea in exp_vec(15), eb in exp_vec(15), ec in exp_vec(15)) {
            let g = mixed(0);
            let a = Element::term(mono_from_exps(&g, &ea), q_ratio(1, 2));
            let b = Element::term(mono_from_exps(&g, &eb), q_int(3));
            let c = Element::term(mono_from_exps(&g, &ec), q_int(-1));
            let left = mul(&g, &mul(&g, &a, &b), &c);
            let right = mul(&g, &a, &mul(&g, &b, &c));
            prop_assert_eq!(left, right);
        }

        /// Total degree is additive under multiplication.
        #[test]
        fn mul_degree_additive(ea in exp_vec(15), eb in exp_vec(15), n in -1i64..3) {
            let g = mixed(n);
            let a = mono_from_exps(&g, &ea);
            let b = mono_from_exps(&g, &eb);
            if let Some((m, _)) = mono_mul(&g, &a, &b) {
                prop_assert_eq!(m.total_deg(&g), a.total_deg(&g) + b.total_deg(&g));
                prop_assert_eq!(m.pv_weight(&g), a.pv_weight(&g) + b.pv_weight(&g));
                prop_assert_eq!(m.form_deg(&g), a.form_deg(&g) + b.form_deg(&g));
            }
        }
    }
}
