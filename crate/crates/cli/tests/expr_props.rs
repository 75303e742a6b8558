//! Property tests for the expression grammar and the document normal form.

use std::collections::BTreeMap;

use proptest::prelude::*;
use workbench_cli::{doc, expr};
use workbench_core::element::{element_string, Element};
use workbench_core::gens::{GeneratorSpec, Generators, Kind};
use workbench_core::q::q_ratio;
use workbench_core::Algebra;

/// Mixed-parity fixture: an even weight-1 generator, an odd one, and a
/// chain-direction generator with `delta u = -xi`.
fn alg() -> Algebra {
    let g = Generators::new(
        vec![
            GeneratorSpec::new("x", 0, 0, 1),
            GeneratorSpec::new("xi", 0, 1, 1),
            GeneratorSpec::new("u", 1, 1, 1),
        ],
        1,
    )
    .unwrap();
    let xi = Element::gen(g.id(Kind::Algebra, 1));
    Algebra::plain(g, vec![Element::zero(), Element::zero(), xi.neg()]).unwrap()
}

/// One additive term: a rational coefficient and factor triples
/// `(kind, generator index, exponent)`.
type TermSpec = (i64, i64, Vec<(usize, usize, u32)>);

fn term_strategy() -> impl Strategy<Value = TermSpec> {
    (
        -6i64..=6,
        1i64..=4,
        prop::collection::vec(((0usize..3), (0usize..3), (1u32..=2)), 0..4),
    )
}

fn element_of(a: &Algebra, terms: &[TermSpec]) -> Element {
    let g = a.gens();
    let kinds = [Kind::Algebra, Kind::Form, Kind::Poly];
    let mut e = Element::zero();
    for (num, den, factors) in terms {
        let fs: Vec<_> = factors
            .iter()
            .map(|&(k, i, p)| (g.id(kinds[k], i), p))
            .collect();
        e = e.add(&Element::from_factors(g, q_ratio(*num, *den), &fs));
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// The canonical printer and the parser are mutually inverse on
    /// arbitrary elements, including collapsing odd squares and folding
    /// repeated monomials.
    #[test]
    fn canonical_strings_reparse(terms in prop::collection::vec(term_strategy(), 0..5)) {
        let a = alg();
        let e = element_of(&a, &terms);
        let text = element_string(a.gens(), &e);
        let parsed = expr::parse(&text).unwrap();
        let back = expr::eval_element(&parsed, &a, &BTreeMap::new()).unwrap();
        prop_assert_eq!(back, e);
    }

    /// The parser never panics; every rejection is a located diagnostic.
    #[test]
    fn parser_returns_located_errors(text in "[-+*^()a-z0-9/_ ]{0,48}") {
        if let Err(err) = expr::parse(&text) {
            let msg = err.to_string();
            prop_assert!(
                msg.contains(':'),
                "diagnostic without a line:column location: {}", msg
            );
        }
    }

    /// Serialization is a normal form: parse then serialize is a fixed
    /// point, and the round trip preserves every evaluated element.
    #[test]
    fn document_serialization_is_a_fixed_point(
        terms in prop::collection::vec(term_strategy(), 0..4),
        trunc in 1u32..=6,
        mpw in 1u32..=4,
    ) {
        let a = alg();
        let e = element_of(&a, &terms);
        let text = format!(
            "workbench-document 1\n\n\
             [algebra]\n\
             generator x chain 0 cochain 0 weight 1\n\
             generator xi chain 0 cochain 1 weight 1\n\
             generator u chain 1 cochain 1 weight 1\n\
             delta u = -xi\n\n\
             [problem]\n\
             shift = 1\n\
             truncation = {trunc}\n\
             max_poly_weight = {mpw}\n\
             element pi = {}\n",
            element_string(a.gens(), &e),
        );
        let doc1 = doc::parse_document(&text).unwrap();
        let canon = doc::serialize(&doc1);
        let doc2 = doc::parse_document(&canon).unwrap();
        prop_assert_eq!(doc::serialize(&doc2), canon.clone());
        prop_assert_eq!(doc2.elements.get("pi"), doc1.elements.get("pi"));
        prop_assert_eq!(doc2.truncation, trunc);
        prop_assert_eq!(doc2.max_poly_weight, mpw);
    }
}
