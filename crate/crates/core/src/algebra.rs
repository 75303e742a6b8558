//! Validated graded algebra specifications.
//!
//! An [`Algebra`] is a free graded-commutative algebra on declared
//! generators together with a chain differential `delta` (chain degree -1)
//! and, in the stacky case, a cochain differential `partial` (cochain
//! degree +1) with `partial delta + delta partial = 0`.  Construction
//! validates every axiom exactly and reports the first offending
//! generator/monomial.

use crate::derivation::Derivation;
use crate::element::{mul, mono_string, Element};
use crate::error::{Error, Result};
use crate::gens::{Generators, Kind};
use crate::q::q_int;

#[derive(Clone, Debug)]
pub struct Algebra {
    gens: Generators,
    delta: Vec<Element>,
    partial: Vec<Element>,
    stacky: bool,
}

impl Algebra {
    pub fn new(gens: Generators, delta: Vec<Element>, partial: Option<Vec<Element>>) -> Result<Self> {
        let m = gens.len();
        if delta.len() != m {
            return Err(Error::InvalidSpec(format!(
                "expected {m} delta values, got {}",
                delta.len()
            )));
        }
        let stacky = partial.is_some();
        let partial = partial.unwrap_or_else(|| vec![Element::zero(); m]);
        if partial.len() != m {
            return Err(Error::InvalidSpec(format!(
                "expected {m} partial values, got {}",
                partial.len()
            )));
        }
        let alg = Algebra { gens, delta, partial, stacky };
        alg.validate()?;
        Ok(alg)
    }

    pub fn plain(gens: Generators, delta: Vec<Element>) -> Result<Self> {
        Algebra::new(gens, delta, None)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.gens;
        for i in 0..g.len() {
            let spec = g.base_spec(g.id(Kind::Algebra, i));
            let name = spec.name.clone();
            for (value, label, dc, ds) in [
                (&self.delta[i], "delta", -1i64, 0i64),
                (&self.partial[i], "partial", 0, 1),
            ] {
                value.check_kinds(g, &[Kind::Algebra]).map_err(|_| {
                    Error::InvalidSpec(format!(
                        "{label}({name}) must be an algebra element (no dx_/pv_ factors)"
                    ))
                })?;
                for (mono, _) in value.terms() {
                    let (c, s) = (mono.chain_deg(g), mono.cochain_deg(g));
                    if c != spec.chain + dc || s != spec.cochain + ds {
                        return Err(Error::InvalidSpec(format!(
                            "{label}({name}) has term `{}` of bidegree ({c}, {s}), expected ({}, {})",
                            mono_string(g, mono),
                            spec.chain + dc,
                            spec.cochain + ds
                        )));
                    }
                }
            }
        }
        // delta^2 = 0, partial^2 = 0, anticommutation — all on generators.
        let dr = self.delta_rule();
        let pr = self.partial_rule();
        for i in 0..g.len() {
            let name = &g.base_spec(g.id(Kind::Algebra, i)).name;
            let dd = dr.apply(g, &self.delta[i])?;
            if !dd.is_zero() {
                return Err(Error::InvalidSpec(format!(
                    "delta^2({name}) = {} != 0",
                    crate::element::element_string(g, &dd)
                )));
            }
            if self.stacky {
                let pp = pr.apply(g, &self.partial[i])?;
                if !pp.is_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "partial^2({name}) = {} != 0",
                        crate::element::element_string(g, &pp)
                    )));
                }
                let mixed = dr.apply(g, &self.partial[i])?.add(&pr.apply(g, &self.delta[i])?);
                if !mixed.is_zero() {
                    return Err(Error::InvalidSpec(format!(
                        "(partial delta + delta partial)({name}) = {} != 0",
                        crate::element::element_string(g, &mixed)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn gens(&self) -> &Generators {
        &self.gens
    }

    pub fn is_stacky(&self) -> bool {
        self.stacky
    }

    pub fn shift(&self) -> i64 {
        self.gens.shift()
    }

    pub fn delta_value(&self, base: usize) -> &Element {
        &self.delta[base]
    }

    pub fn partial_value(&self, base: usize) -> &Element {
        &self.partial[base]
    }

    /// `delta + partial` on a generator (the total internal differential).
    pub fn total_value(&self, base: usize) -> Element {
        self.delta[base].add(&self.partial[base])
    }

    /// The chain differential as a derivation on algebra factors.
    pub fn delta_rule(&self) -> Derivation {
        let g = &self.gens;
        let mut d = Derivation::new("delta", true, &[Kind::Algebra]);
        for i in 0..g.len() {
            d.set(g.id(Kind::Algebra, i), self.delta[i].clone());
        }
        d
    }

    /// The cochain differential as a derivation on algebra factors.
    pub fn partial_rule(&self) -> Derivation {
        let g = &self.gens;
        let mut d = Derivation::new("partial", true, &[Kind::Algebra]);
        for i in 0..g.len() {
            d.set(g.id(Kind::Algebra, i), self.partial[i].clone());
        }
        d
    }

    /// `delta + partial` as one derivation on algebra factors.
    pub fn total_rule(&self) -> Derivation {
        let g = &self.gens;
        let mut d = Derivation::new("delta+partial", true, &[Kind::Algebra]);
        for i in 0..g.len() {
            d.set(g.id(Kind::Algebra, i), self.total_value(i));
        }
        d
    }

    /// The universal derivation `d: x -> dx`, `d(dx) = 0`.
    pub fn d_rule(&self) -> Derivation {
        let g = &self.gens;
        let mut d = Derivation::new("d", true, &[Kind::Algebra, Kind::Form]);
        for i in 0..g.len() {
            d.set(g.id(Kind::Algebra, i), Element::gen(g.id(Kind::Form, i)));
            d.set(g.id(Kind::Form, i), Element::zero());
        }
        d
    }

    /// Internal differential extended to forms so that it anticommutes with
    /// `d`: on generators `x -> (delta+partial)(x)`,
    /// `dx -> -d((delta+partial)(x))`.  Together with `d` this makes the
    /// total de Rham differential square to zero with no extra signs.
    pub fn internal_form_rule(&self) -> Result<Derivation> {
        let g = &self.gens;
        let d = self.d_rule();
        let mut r = Derivation::new("delta-on-forms", true, &[Kind::Algebra, Kind::Form]);
        for i in 0..g.len() {
            let tot = self.total_value(i);
            r.set(g.id(Kind::Algebra, i), tot.clone());
            r.set(g.id(Kind::Form, i), d.apply(g, &tot)?.neg());
        }
        Ok(r)
    }

    /// The lifted differential `sum (delta+partial)(x_a) pv_a`, the
    /// degree-(n+2) polyvector whose bracket action is the internal
    /// differential.
    pub fn lifted_differential(&self) -> Element {
        let g = &self.gens;
        let mut out = Element::zero();
        for i in 0..g.len() {
            let coeff = self.total_value(i);
            if coeff.is_zero() {
                continue;
            }
            let pv = Element::term(crate::element::Monomial::gen(g.id(Kind::Poly, i)), q_int(1));
            out = out.add(&mul(g, &coeff, &pv));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::oracle_schouten;
    use crate::element::Monomial;
    use crate::gens::{GenId, GeneratorSpec};
    use crate::polyvector::{delta_bracket, schouten};
    use proptest::prelude::*;

    /// Q[y, x, xi] with |x| = -2, |xi| = -1, delta x = xi: contractible pair
    /// plus a degree-0 spectator.
    fn line(shift: i64) -> Algebra {
        let g = Generators::new(
            vec![
                GeneratorSpec::chain_gen("y", 0),
                GeneratorSpec::chain_gen("x", 2),
                GeneratorSpec::chain_gen("xi", 1),
            ],
            shift,
        )
        .unwrap();
        let xi = Element::gen(g.id(Kind::Algebra, 2));
        Algebra::plain(g, vec![Element::zero(), xi, Element::zero()]).unwrap()
    }

    #[test]
    fn rejects_wrong_degree_value() {
        let g = Generators::new(
            vec![GeneratorSpec::chain_gen("x", 2), GeneratorSpec::chain_gen("y", 0)],
            0,
        )
        .unwrap();
        // delta x = y has chain degree -2, not -1
        let y = Element::gen(g.id(Kind::Algebra, 1));
        let err = Algebra::plain(g, vec![y, Element::zero()]).unwrap_err();
        assert!(err.to_string().contains("delta"), "got: {err}");
    }

    #[test]
    fn rejects_non_square_zero() {
        let g = Generators::new(
            vec![
                GeneratorSpec::chain_gen("a", 2),
                GeneratorSpec::chain_gen("b", 1),
                GeneratorSpec::chain_gen("c", 0),
            ],
            0,
        )
        .unwrap();
        let b = Element::gen(g.id(Kind::Algebra, 1));
        let c = Element::gen(g.id(Kind::Algebra, 2));
        // delta a = b, delta b = c: delta^2 a = c != 0
        let err = Algebra::plain(g, vec![b, c, Element::zero()]).unwrap_err();
        assert!(err.to_string().contains("delta^2"), "got: {err}");
    }

    #[test]
    fn lifted_differential_bracket_is_delta() {
        let alg = line(0);
        let g = alg.gens();
        // check on a few hand-picked algebra elements
        let y = Element::gen(g.id(Kind::Algebra, 0));
        let x = Element::gen(g.id(Kind::Algebra, 1));
        let xi = Element::gen(g.id(Kind::Algebra, 2));
        let f = mul(g, &mul(g, &x, &x), &xi).add(&mul(g, &y, &x).scale(&crate::q::q_ratio(5, 3)));
        let lhs = delta_bracket(&alg, &f).unwrap();
        let rhs = alg.delta_rule().apply(g, &f).unwrap();
        assert_eq!(lhs, rhs);
        // and nilpotence of the lifted field under the bracket
        let hat = alg.lifted_differential();
        assert!(schouten(g, &hat, &hat).unwrap().is_zero());
        assert_eq!(oracle_schouten(g, &hat, &hat), Element::zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// [delta-hat, f] = delta(f) for every algebra element.
        #[test]
        fn delta_bracket_matches_rule(
            exps in prop::collection::vec(prop::collection::vec(0u32..3, 3), 1..3),
            n in -1i64..3,
        ) {
            let alg = line(n);
            let g = alg.gens();
            let mut f = Element::zero();
            for (t, e) in exps.iter().enumerate() {
                let mut factors = Vec::new();
                for (k, &exp) in e.iter().enumerate() {
                    let id = GenId(k as u32);
                    let exp = if g.odd(id) { exp.min(1) } else { exp };
                    if exp > 0 {
                        factors.push((id, exp));
                    }
                }
                f.add_term(Monomial(factors), crate::q::q_int(t as i64 + 1));
            }
            let lhs = delta_bracket(&alg, &f).unwrap();
            let rhs = alg.delta_rule().apply(g, &f).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
