//! Generic graded Leibniz machinery.
//!
//! Everything that "acts like a derivation" in the workbench is funneled
//! through [`derivation_over`]: an operator `N` determined by a graded
//! algebra homomorphism `phi` (given on generators) and generator values
//! `N(g)`, extended by
//!
//! ```text
//! N(u v) = N(u) phi(v) + (-1)^{|N| |u|} phi(u) N(v)
//! ```
//!
//! Ordinary derivations are the case `phi = id`; the contraction and
//! `nu`-style operators of the compatibility calculus use a nontrivial
//! `phi`.  Keeping one engine means the Koszul bookkeeping lives in exactly
//! one function.

use std::collections::BTreeMap;

use crate::element::{mul, Element, Monomial};
use crate::error::{Error, Result};
use crate::gens::{GenId, Generators, Kind};

/// Apply the graded homomorphism determined by `subs` on generators.
/// Generators without an entry map to themselves.  The caller must provide
/// parity-preserving images; this is checked in debug builds.
pub fn substitute(g: &Generators, e: &Element, subs: &BTreeMap<GenId, Element>) -> Element {
    #[cfg(debug_assertions)]
    for (id, img) in subs {
        for (m, _) in img.terms() {
            debug_assert_eq!(
                m.parity(g),
                g.odd(*id),
                "substitution image of {} is not parity-preserving",
                g.token(*id)
            );
        }
    }
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let mut acc = Element::constant(c.clone());
        for &(id, exp) in &m.0 {
            match subs.get(&id) {
                None => acc = mul(g, &acc, &Element::term(Monomial(vec![(id, exp)]), crate::q::q_int(1))),
                Some(img) => {
                    for _ in 0..exp {
                        acc = mul(g, &acc, img);
                    }
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

/// Derivation over the homomorphism `phi` (see module docs).  `values`
/// gives `N(g)`; generators whose kind is not in `scope` are annihilated.
/// A factor whose kind is in scope but has no value entry is an error.
pub fn derivation_over(
    g: &Generators,
    e: &Element,
    phi: &BTreeMap<GenId, Element>,
    values: &BTreeMap<GenId, Element>,
    scope: &[Kind],
    odd_operator: bool,
) -> Result<Element> {
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let factors = &m.0;
        for pos in 0..factors.len() {
            let (id, exp) = factors[pos];
            if !scope.contains(&g.kind(id)) {
                continue;
            }
            let val = values
                .get(&id)
                .ok_or_else(|| Error::MissingDerivationValue(g.token(id)))?;
            if val.is_zero() {
                continue;
            }
            // prefix parity: factors strictly before `pos`
            let prefix_parity: i64 =
                factors[..pos].iter().map(|&(i2, e2)| e2 as i64 * g.total_deg(i2)).sum();
            let prefix = Element::term(Monomial(factors[..pos].to_vec()), c.clone());
            let prefix = substitute(g, &prefix, phi);
            for j in 0..exp {
                // term: phi(prefix) phi(g)^j N(g) g^{exp-1-j} suffix
                let sign_odd = odd_operator
                    && (prefix_parity + j as i64 * g.total_deg(id)).rem_euclid(2) == 1;
                let mut t = prefix.clone();
                if j > 0 {
                    let gj = substitute(
                        g,
                        &Element::term(Monomial(vec![(id, j)]), crate::q::q_int(1)),
                        phi,
                    );
                    t = mul(g, &t, &gj);
                }
                t = mul(g, &t, val);
                let mut tail: Vec<(GenId, u32)> = Vec::new();
                if exp - 1 - j > 0 {
                    tail.push((id, exp - 1 - j));
                }
                tail.extend_from_slice(&factors[pos + 1..]);
                let suffix = substitute(
                    g,
                    &Element::term(Monomial(tail), crate::q::q_int(1)),
                    phi,
                );
                t = mul(g, &t, &suffix);
                if sign_odd {
                    t = t.neg();
                }
                out = out.add(&t);
            }
        }
    }
    Ok(out)
}

/// A named derivation rule: generator values plus operator parity.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub label: String,
    pub odd: bool,
    scope: Vec<Kind>,
    values: BTreeMap<GenId, Element>,
}

impl Derivation {
    pub fn new(label: &str, odd: bool, scope: &[Kind]) -> Self {
        Derivation { label: label.to_string(), odd, scope: scope.to_vec(), values: BTreeMap::new() }
    }

    pub fn set(&mut self, id: GenId, value: Element) {
        self.values.insert(id, value);
    }

    pub fn value(&self, id: GenId) -> Option<&Element> {
        self.values.get(&id)
    }

    pub fn scope(&self) -> &[Kind] {
        &self.scope
    }

    pub fn apply(&self, g: &Generators, e: &Element) -> Result<Element> {
        derivation_over(g, e, &BTreeMap::new(), &self.values, &self.scope, self.odd)
    }
}
