//! Kaehler differentials and the completed de Rham complex.
//!
//! `Omega^p` is the free module on `p`-fold products of the `dx_` symbols.
//! The total de Rham differential is `D = d + delta_bar`, where `delta_bar`
//! is the internal differential extended to forms by
//! `delta_bar(dx) = -d(delta x)` so that `d delta_bar + delta_bar d = 0`
//! and `D^2 = 0` hold on the nose.

use crate::algebra::Algebra;
use crate::element::{mono_string, Element, Monomial};
use crate::error::{Error, Result};
use crate::gens::{GenId, Generators, Kind};

/// Module generators of `Omega^p`: the `p`-fold products of one-form
/// symbols (no coefficients), in canonical order.
pub fn kaehler_basis(g: &Generators, p: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let ids: Vec<GenId> = g.iter_ids(Kind::Form).collect();
    let mut stack: Vec<(usize, u32, Vec<(GenId, u32)>)> = vec![(0, p, Vec::new())];
    while let Some((i, left, cur)) = stack.pop() {
        if left == 0 {
            out.push(Monomial(cur));
            continue;
        }
        if i >= ids.len() {
            continue;
        }
        let max = if g.odd(ids[i]) { 1.min(left) } else { left };
        // emit larger exponents last so the DFS yields ascending order
        for e in (0..=max).rev() {
            let mut next = cur.clone();
            if e > 0 {
                next.push((ids[i], e));
            }
            stack.push((i + 1, left - e, next));
        }
    }
    out.sort();
    out
}

/// The de Rham differential `d`.
pub fn de_rham_d(alg: &Algebra, e: &Element) -> Result<Element> {
    alg.d_rule().apply(alg.gens(), e)
}

/// The total differential `D = d + delta_bar` on form-elements.
pub fn de_rham_total(alg: &Algebra, e: &Element) -> Result<Element> {
    let d = de_rham_d(alg, e)?;
    let internal = alg.internal_form_rule()?.apply(alg.gens(), e)?;
    Ok(d.add(&internal))
}

/// A pre-symplectic candidate modulo Hodge filtration `trunc`: components
/// of form degrees `2 <= p < trunc`, each of total cochain degree `n + 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreSymplectic {
    element: Element,
    trunc: u32,
}

impl PreSymplectic {
    pub fn new(alg: &Algebra, element: Element, trunc: u32) -> Result<Self> {
        let g = alg.gens();
        if trunc < 3 {
            return Err(Error::Precondition(format!(
                "Hodge truncation must be at least 3, got {trunc}"
            )));
        }
        element.check_kinds(g, &[Kind::Algebra, Kind::Form])?;
        let n = g.shift();
        for (m, _) in element.terms() {
            let p = m.form_deg(g);
            if p < 2 || p >= trunc {
                return Err(Error::Precondition(format!(
                    "term `{}` has form degree {p}, outside 2..{trunc}",
                    mono_string(g, m)
                )));
            }
            let d = m.total_deg(g);
            if d != n + 2 {
                return Err(Error::Inhomogeneous(format!(
                    "term `{}` has total degree {d}, expected {}",
                    mono_string(g, m),
                    n + 2
                )));
            }
        }
        Ok(PreSymplectic { element, trunc })
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn component(&self, g: &Generators, p: u32) -> Element {
        self.element.form_part(g, p)
    }
}

/// Result of the closedness check: either closed modulo the truncation or
/// the first offending form degree with a witness term.
#[derive(Clone, Debug)]
pub struct ClosednessReport {
    pub closed: bool,
    pub failure: Option<(u32, String)>,
}

/// Check `D omega = 0` modulo the Hodge truncation.
pub fn is_closed_pre_symplectic(alg: &Algebra, omega: &PreSymplectic) -> Result<ClosednessReport> {
    let g = alg.gens();
    let defect = de_rham_total(alg, omega.element())?;
    let defect = defect.filter(|m| m.form_deg(g) < omega.trunc());
    if defect.is_zero() {
        return Ok(ClosednessReport { closed: true, failure: None });
    }
    let (worst, coeff) = defect
        .terms()
        .min_by_key(|(m, _)| (m.form_deg(g), (*m).clone()))
        .map(|(m, c)| (m.clone(), c.clone()))
        .unwrap();
    Ok(ClosednessReport {
        closed: false,
        failure: Some((
            worst.form_deg(g),
            format!("{} * {}", coeff, mono_string(g, &worst)),
        )),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::element::{element_string, mono_string, mul};
    use crate::gens::{GeneratorSpec, Kind};
    use crate::q::q_int;
    use proptest::prelude::*;

    fn plane() -> Algebra {
        let g = Generators::new(
            vec![GeneratorSpec::chain_gen("x", 0), GeneratorSpec::chain_gen("y", 0)],
            0,
        )
        .unwrap();
        Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap()
    }

    fn odd_line(shift: i64) -> Algebra {
        // |x| = 0 even, |xi| = 1 odd (cochain), delta = 0
        let g = Generators::new(
            vec![GeneratorSpec::new("x", 0, 0, 1), GeneratorSpec::new("xi", 0, 1, 1)],
            shift,
        )
        .unwrap();
        Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap()
    }

    #[test]
    fn kaehler_basis_goldens() {
        let plane = plane();
        let g = plane.gens();
        let two: Vec<String> =
            kaehler_basis(g, 2).iter().map(|m| mono_string(g, m)).collect();
        // dx*dy is odd-squared away for even generators? no: dx odd, so
        // dx^2 = 0; only the mixed product survives.
        assert_eq!(two, vec!["dx_x*dx_y"]);

        let line = odd_line(0);
        let g = line.gens();
        let two: Vec<String> =
            kaehler_basis(g, 2).iter().map(|m| mono_string(g, m)).collect();
        // dxi is even (|xi| odd), so dxi^2 survives alongside dx*dxi
        assert_eq!(two, vec!["dx_x*dx_xi", "dx_xi^2"]);
    }

    #[test]
    fn de_rham_d_squares_to_zero_on_samples() {
        let alg = odd_line(1);
        let g = alg.gens();
        let x = Element::gen(g.id(Kind::Algebra, 0));
        let dx = Element::gen(g.id(Kind::Form, 0));
        let dxi = Element::gen(g.id(Kind::Form, 1));
        let omega = mul(g, &mul(g, &x, &x), &mul(g, &dxi, &dxi))
            .add(&mul(g, &x, &dx).scale(&crate::q::q_ratio(2, 7)));
        let d1 = de_rham_d(&alg, &omega).unwrap();
        let d2 = de_rham_d(&alg, &d1).unwrap();
        assert!(d2.is_zero(), "d^2 = {}", element_string(g, &d2));
    }

    /// The acyclic pair: |x| = -2, |xi| = -1, delta x = xi.
    fn contractible(shift: i64) -> Algebra {
        let g = Generators::new(
            vec![GeneratorSpec::chain_gen("x", 2), GeneratorSpec::chain_gen("xi", 1)],
            shift,
        )
        .unwrap();
        let xi = Element::gen(g.id(Kind::Algebra, 1));
        Algebra::plain(g, vec![xi, Element::zero()]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// The total differential D = d + internal part squares to zero on
        /// arbitrary form-elements of an algebra with nonzero delta.
        #[test]
        fn de_rham_total_squares_to_zero(
            exps in prop::collection::vec(prop::collection::vec(0u32..3, 4), 1..3),
            n in -1i64..3,
        ) {
            let alg = contractible(n);
            let g = alg.gens();
            let mut omega = Element::zero();
            for (t, e) in exps.iter().enumerate() {
                let mut factors = Vec::new();
                for (k, &exp) in e.iter().enumerate() {
                    let id = crate::gens::GenId(k as u32);
                    if g.kind(id) == Kind::Poly {
                        continue;
                    }
                    let exp = if g.odd(id) { exp.min(1) } else { exp };
                    if exp > 0 {
                        factors.push((id, exp));
                    }
                }
                omega.add_term(crate::element::Monomial(factors), q_int(t as i64 + 1));
            }
            let d1 = de_rham_total(&alg, &omega).unwrap();
            let d2 = de_rham_total(&alg, &d1).unwrap();
            prop_assert_eq!(d2, Element::zero());
        }
    }
}
