//! Verb dispatch: every command resolves its arguments from the document,
//! runs the corresponding solver, re-verifies any certificate with the
//! closed-form checkers, and assembles the report tree.
//!
//! Exit codes: 0 for a positive verdict, 1 for a definite mathematical
//! negative (non-vanishing defect or obstruction, blocked compatibility,
//! degenerate anchor, inequivalent gauges), 2 for input errors and failed
//! preconditions, 3 when a search hit its resource caps without a verdict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Map, Value};

use workbench_core::basis::{enumerate, Piece};
use workbench_core::check;
use workbench_core::compat::{
    compat_check, mu, nondeg_check, CompatCertificate, CompatOutcome, IdentityCheck,
    NondegOutcome,
};
use workbench_core::derham::PreSymplectic;
use workbench_core::element::element_string;
use workbench_core::gens::Kind;
use workbench_core::mc::{
    gauge_equivalent, lift_step, obstruction_class, piece_basis, piece_cohomology, GaugeOutcome,
    SolveOutcome,
};
use workbench_core::polyvector::{mc_defect, schouten, sigma, Poisson};
use num_traits::Zero;
use workbench_core::q::{q_int, q_ratio, Q};
use workbench_core::stacky::{chevalley_eilenberg, cochain_bound, shifted_poisson_bg};
use workbench_core::{Algebra, Element, Error, Monomial, Result};

use crate::doc::WorkbenchDocument;
use crate::report::{elem, envelope, functional_string, Outcome};

pub const VERBS: &[&str] = &[
    "bracket",
    "mc-check",
    "obstruction",
    "lift",
    "gauge",
    "mu",
    "sigma",
    "key-identity",
    "compat-check",
    "nondeg",
    "poisson-to-symplectic",
    "symplectic-to-poisson",
    "ce-build",
    "casimir",
    "cohomology",
];

pub struct Invocation {
    pub verb: String,
    pub doc: WorkbenchDocument,
    pub truncation: u32,
    pub max_poly_weight: u32,
    pub seed: Option<u64>,
    pub cap: usize,
}

pub fn run(inv: &Invocation) -> Result<Outcome> {
    match inv.verb.as_str() {
        "bracket" => bracket_verb(inv),
        "mc-check" => mc_check_verb(inv),
        "obstruction" => obstruction_verb(inv),
        "lift" => lift_verb(inv),
        "gauge" => gauge_verb(inv),
        "mu" => mu_verb(inv),
        "sigma" => sigma_verb(inv),
        "key-identity" => key_identity_verb(inv),
        "compat-check" => compat_check_verb(inv),
        "nondeg" => nondeg_verb(inv),
        "poisson-to-symplectic" => poisson_to_symplectic_verb(inv),
        "symplectic-to-poisson" => symplectic_to_poisson_verb(inv),
        "ce-build" => ce_build_verb(inv),
        "casimir" => casimir_verb(inv),
        "cohomology" => cohomology_verb(inv),
        other => Err(Error::Unsupported(format!(
            "unknown verb `{other}`; known verbs: {}",
            VERBS.join(", ")
        ))),
    }
}

// ---------------------------------------------------------------------
// argument plumbing

fn arg_element(inv: &Invocation, key: &str) -> Result<Element> {
    inv.doc
        .args
        .get(key)
        .or_else(|| inv.doc.elements.get(key))
        .cloned()
        .ok_or_else(|| {
            Error::Precondition(format!(
                "missing argument `{key}`: add `arg {key} = ...` to [command] \
                 or an element named `{key}` to [problem]"
            ))
        })
}

fn constant_of(e: &Element) -> Option<Q> {
    if e.is_zero() {
        return Some(q_int(0));
    }
    let mut it = e.terms();
    let (m, c) = it.next()?;
    if it.next().is_some() || !m.is_one() {
        return None;
    }
    Some(c.clone())
}

fn arg_int<T: TryFrom<i64>>(inv: &Invocation, key: &str, default: T) -> Result<T> {
    let Some(e) = inv.doc.args.get(key) else {
        return Ok(default);
    };
    let bad = || {
        Error::Precondition(format!(
            "argument `{key}` must be an integer constant"
        ))
    };
    let q = constant_of(e).ok_or_else(bad)?;
    if !q.is_integer() {
        return Err(bad());
    }
    let n: i64 = q.to_integer().try_into().map_err(|_| bad())?;
    T::try_from(n).map_err(|_| bad())
}

/// The invocation echo shared by every report: the resolved algebra, the
/// caps, and the canonical form of each consumed argument.
fn inputs_value(inv: &Invocation, args: &[(&str, Value)]) -> Value {
    let g = inv.doc.algebra.gens();
    let gens: Vec<Value> = (0..g.len())
        .map(|i| {
            let spec = g.base_spec(g.id(Kind::Algebra, i));
            let mut m = Map::new();
            m.insert("name".into(), Value::from(spec.name.clone()));
            m.insert("chain".into(), Value::from(spec.chain));
            m.insert("cochain".into(), Value::from(spec.cochain));
            m.insert("weight".into(), Value::from(spec.poly_weight));
            m.insert("delta".into(), elem(g, inv.doc.algebra.delta_value(i)));
            if inv.doc.algebra.is_stacky() {
                m.insert("partial".into(), elem(g, inv.doc.algebra.partial_value(i)));
            }
            Value::Object(m)
        })
        .collect();
    let lie = match &inv.doc.lie {
        Some(l) => json!({
            "basis": l.spec.names(),
            "dimension": l.spec.dim(),
        }),
        None => Value::Null,
    };
    let mut arg_map = Map::new();
    for (k, v) in args {
        arg_map.insert((*k).into(), v.clone());
    }
    json!({
        "algebra": {
            "generators": gens,
            "shift": g.shift(),
            "stacky": inv.doc.algebra.is_stacky(),
        },
        "lie": lie,
        "truncation": inv.truncation,
        "maxPolyWeight": inv.max_poly_weight,
        "basisCap": inv.cap,
        "arguments": Value::Object(arg_map),
    })
}

fn degree_value(alg: &Algebra, e: &Element) -> Value {
    match e.homogeneous_deg(alg.gens()) {
        Ok(Some(d)) => Value::from(d),
        _ => Value::Null,
    }
}

fn identity_value(alg: &Algebra, check: &IdentityCheck) -> Value {
    let g = alg.gens();
    match &check.mismatch {
        None => json!({"exact": check.exact}),
        Some((m, l, r)) => json!({
            "exact": check.exact,
            "mismatch": {
                "monomial": element_string(g, &Element::term(m.clone(), q_int(1))),
                "lhs": l.to_string(),
                "rhs": r.to_string(),
            },
        }),
    }
}

fn pair_with(functional: &[(Monomial, Q)], e: &Element) -> Q {
    functional
        .iter()
        .map(|(m, c)| c * e.coeff(m))
        .fold(q_int(0), |a, b| a + b)
}

fn certificate_value(alg: &Algebra, cert: &CompatCertificate) -> Value {
    let g = alg.gens();
    json!({
        "omega": elem(g, &cert.omega),
        "pi": elem(g, &cert.pi),
        "homotopy": elem(g, &cert.h),
        "truncation": cert.trunc,
        "verified": true,
    })
}

// ---------------------------------------------------------------------
// the verbs

fn bracket_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let a = arg_element(inv, "a")?;
    let b = arg_element(inv, "b")?;
    let value = schouten(g, &a, &b)?;
    if value != check::oracle_schouten(g, &a, &b) {
        return Err(Error::Internal(
            "bracket disagrees with the closed-form oracle".into(),
        ));
    }
    let result = json!({
        "value": elem(g, &value),
        "degree": degree_value(alg, &value),
        "oracleChecked": true,
    });
    let inputs = inputs_value(inv, &[("a", elem(g, &a)), ("b", elem(g, &b))]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn mu_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let omega = arg_element(inv, "omega")?;
    let pi = arg_element(inv, "pi")?;
    let value = mu(alg, &omega, &pi)?;
    if value != check::oracle_mu(alg, &omega, &pi) {
        return Err(Error::Internal("mu disagrees with the closed-form oracle".into()));
    }
    let result = json!({
        "value": elem(g, &value),
        "degree": degree_value(alg, &value),
        "oracleChecked": true,
    });
    let inputs = inputs_value(inv, &[("omega", elem(g, &omega)), ("pi", elem(g, &pi))]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn sigma_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let pi_el = arg_element(inv, "pi")?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let tv = sigma(g, &pi);
    if tv.dir != check::oracle_sigma(g, &pi_el) {
        return Err(Error::Internal("sigma disagrees with the closed-form oracle".into()));
    }
    let result = json!({
        "base": elem(g, tv.base.element()),
        "direction": elem(g, &tv.dir),
        "oracleChecked": true,
    });
    let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn mc_check_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let pi_el = arg_element(inv, "pi")?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let defect = mc_defect(alg, &pi)?;
    if defect != check::oracle_mc_defect(alg, &pi_el, inv.truncation) {
        return Err(Error::Internal(
            "the defect disagrees with the closed-form oracle".into(),
        ));
    }
    let satisfied = defect.is_zero();
    let result = json!({
        "defect": elem(g, &defect),
        "satisfied": satisfied,
        "oracleChecked": true,
    });
    let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
    Ok(Outcome {
        report: envelope(&inv.verb, if satisfied { "ok" } else { "negative" }, inputs, result),
        exit: if satisfied { 0 } else { 1 },
    })
}

fn obstruction_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let pi_el = arg_element(inv, "pi")?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let ob = obstruction_class(alg, &pi)?;
    let vanishes = ob.class.is_zero();
    let result = json!({
        "weight": ob.weight,
        "class": elem(g, &ob.class),
        "cocycleChecked": ob.cocycle_checked,
        "vanishes": vanishes,
    });
    let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
    Ok(Outcome {
        report: envelope(&inv.verb, if vanishes { "ok" } else { "negative" }, inputs, result),
        exit: if vanishes { 0 } else { 1 },
    })
}

fn lift_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let pi_el = arg_element(inv, "pi")?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let report = lift_step(alg, &pi, inv.max_poly_weight, inv.cap)?;
    let ob = json!({
        "weight": report.obstruction.weight,
        "class": elem(g, &report.obstruction.class),
        "cocycleChecked": report.obstruction.cocycle_checked,
    });
    match (&report.outcome, &report.lifted) {
        (SolveOutcome::Solution(x), Some(lifted)) => {
            let defect = check::oracle_mc_defect(alg, lifted.element(), lifted.trunc());
            if !defect.is_zero() {
                return Err(Error::Internal(
                    "lifted structure fails the re-checked equation".into(),
                ));
            }
            let result = json!({
                "obstruction": ob,
                "outcome": "lifted",
                "correction": elem(g, x),
                "lifted": elem(g, lifted.element()),
                "liftedTruncation": lifted.trunc(),
                "recheckedDefect": "0",
            });
            let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
            Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
        }
        (SolveOutcome::Obstructed { functional, pairing, conclusive }, _) => {
            let w = report.obstruction.weight;
            let domain = piece_basis(g, w, g.shift() + 2, inv.max_poly_weight, inv.cap)?;
            if !check::verify_unsolvability(alg, &domain, functional) {
                return Err(Error::Internal(
                    "unsolvability functional fails re-verification".into(),
                ));
            }
            if pair_with(functional, &report.obstruction.class.neg()) != *pairing
                || pairing.is_zero()
            {
                return Err(Error::Internal(
                    "obstruction pairing fails re-verification".into(),
                ));
            }
            let result = json!({
                "obstruction": ob,
                "outcome": "obstructed",
                "witness": {
                    "functional": functional_string(g, functional),
                    "pairing": pairing.to_string(),
                    "conclusive": conclusive,
                    "verified": true,
                },
            });
            let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
            Ok(Outcome { report: envelope(&inv.verb, "negative", inputs, result), exit: 1 })
        }
        (SolveOutcome::Solution(_), None) => {
            Err(Error::Internal("solver reported a solution without a lift".into()))
        }
    }
}

fn gauge_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let a_el = arg_element(inv, "a")?;
    let b_el = arg_element(inv, "b")?;
    let a = Poisson::new(alg, a_el.clone(), inv.truncation)?;
    let b = Poisson::new(alg, b_el.clone(), inv.truncation)?;
    let inputs = inputs_value(inv, &[("a", elem(g, &a_el)), ("b", elem(g, &b_el))]);
    match gauge_equivalent(alg, &a, &b, inv.max_poly_weight, inv.cap)? {
        GaugeOutcome::Equivalent { chain } => {
            let cut = |e: &Element| e.filter(|m| m.pv_weight(g) < inv.truncation);
            let mut current = a_el.clone();
            let mut homotopies = Vec::new();
            for h in &chain {
                let end = h.end();
                if !check::verify_gauge_path(
                    alg,
                    &h.path,
                    &h.lambda,
                    &current,
                    &end,
                    inv.truncation,
                ) {
                    return Err(Error::Internal(
                        "a gauge homotopy fails re-verification".into(),
                    ));
                }
                homotopies.push(json!({
                    "lambda": elem(g, &h.lambda),
                    "start": elem(g, &current),
                    "end": elem(g, &end),
                    "pathLength": h.path.len(),
                    "verified": true,
                }));
                current = end;
            }
            if !cut(&current.sub(&b_el)).is_zero() {
                return Err(Error::Internal(
                    "the verified chain does not reach the target".into(),
                ));
            }
            let result = json!({
                "equivalent": true,
                "homotopies": homotopies,
            });
            Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
        }
        GaugeOutcome::Distinct { weight, functional, pairing, conclusive } => {
            let result = json!({
                "equivalent": false,
                "witness": {
                    "weight": weight,
                    "functional": functional_string(g, &functional),
                    "pairing": pairing.to_string(),
                    "conclusive": conclusive,
                },
            });
            Ok(Outcome { report: envelope(&inv.verb, "negative", inputs, result), exit: 1 })
        }
    }
}

fn random_combo(rng: &mut ChaCha20Rng, monos: &[Monomial]) -> Element {
    let mut e = Element::zero();
    for m in monos {
        if rng.gen_bool(0.5) {
            continue;
        }
        let num = rng.gen_range(-3i64..=3);
        if num == 0 {
            continue;
        }
        let den = rng.gen_range(1i64..=2);
        e.add_term(m.clone(), q_ratio(num, den));
    }
    e
}

fn key_identity_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let trunc = inv.truncation;
    let mut pairs: Vec<(Element, Element)> = Vec::new();
    let mut input_args: Vec<(&str, Value)> = Vec::new();
    if let Some(seed) = inv.seed {
        let samples: u32 = arg_int(inv, "samples", 8u32)?;
        input_args.push(("seed", Value::from(seed)));
        input_args.push(("samples", Value::from(samples)));
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = g.shift();
        let mut pv_pieces: Vec<Vec<Monomial>> = Vec::new();
        for w in 2..trunc {
            pv_pieces.push(piece_basis(g, w, n + 2, inv.max_poly_weight, inv.cap)?);
        }
        let mut form_pieces: Vec<Vec<Monomial>> = Vec::new();
        for p in 1..=2u32 {
            for d in [n + 1, n + 2] {
                form_pieces
                    .push(enumerate(g, &Piece::forms(p, d, inv.max_poly_weight), inv.cap)?);
            }
        }
        for _ in 0..samples {
            let mut pi = Element::zero();
            for piece in &pv_pieces {
                pi = pi.add(&random_combo(&mut rng, piece));
            }
            let mut omega = Element::zero();
            for piece in &form_pieces {
                omega = omega.add(&random_combo(&mut rng, piece));
            }
            pairs.push((omega, pi));
        }
    } else {
        let omega = arg_element(inv, "omega")?;
        let pi = arg_element(inv, "pi")?;
        pairs.push((omega, pi));
    }
    let mut checks = Vec::new();
    let mut all_exact = true;
    for (omega, pi) in &pairs {
        let report = workbench_core::compat::key_identity_check(alg, omega, pi, trunc)?;
        all_exact &= report.bracket_identity.exact && report.differential_identity.exact;
        let defect = check::oracle_mc_defect(alg, pi, trunc);
        checks.push(json!({
            "omega": elem(g, omega),
            "pi": elem(g, pi),
            "maurerCartan": defect.is_zero(),
            "bracketIdentity": identity_value(alg, &report.bracket_identity),
            "differentialIdentity": identity_value(alg, &report.differential_identity),
        }));
    }
    if inv.seed.is_none() {
        let (omega, pi) = &pairs[0];
        input_args.push(("omega", elem(g, omega)));
        input_args.push(("pi", elem(g, pi)));
    }
    let result = json!({
        "samples": pairs.len(),
        "allExact": all_exact,
        "checks": checks,
    });
    let inputs = inputs_value(inv, &input_args);
    Ok(Outcome {
        report: envelope(&inv.verb, if all_exact { "ok" } else { "negative" }, inputs, result),
        exit: if all_exact { 0 } else { 1 },
    })
}

fn compat_check_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let omega_el = arg_element(inv, "omega")?;
    let pi_el = arg_element(inv, "pi")?;
    let omega = PreSymplectic::new(alg, omega_el.clone(), inv.truncation)?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let inputs = inputs_value(inv, &[("omega", elem(g, &omega_el)), ("pi", elem(g, &pi_el))]);
    match compat_check(alg, &omega, &pi, inv.max_poly_weight, inv.cap)? {
        CompatOutcome::Certified(cert) => {
            if !cert.verify(alg) {
                return Err(Error::Internal(
                    "compatibility certificate fails re-verification".into(),
                ));
            }
            let result = json!({
                "compatible": true,
                "certificate": certificate_value(alg, &cert),
            });
            Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
        }
        CompatOutcome::Blocked { weight, class, functional, pairing, conclusive } => {
            let defect = check::oracle_mu(alg, &omega_el, &pi_el)
                .sub(&check::oracle_sigma(g, &pi_el))
                .filter(|m| m.pv_weight(g) < inv.truncation);
            if pair_with(&functional, &defect) != pairing || pairing.is_zero() {
                return Err(Error::Internal(
                    "blocking pairing fails re-verification".into(),
                ));
            }
            let result = json!({
                "compatible": false,
                "witness": {
                    "weight": weight,
                    "class": elem(g, &class),
                    "functional": functional_string(g, &functional),
                    "pairing": pairing.to_string(),
                    "conclusive": conclusive,
                },
            });
            Ok(Outcome { report: envelope(&inv.verb, "negative", inputs, result), exit: 1 })
        }
    }
}

fn nondeg_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let pi_el = arg_element(inv, "pi")?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
    match nondeg_check(alg, &pi, inv.max_poly_weight, inv.cap)? {
        NondegOutcome::Invertible(cert) => {
            if !check::verify_inverse_substitutions(g, &cert.forward, &cert.inverse, cert.poly_cap)
            {
                return Err(Error::Internal(
                    "inverse substitutions fail re-verification".into(),
                ));
            }
            let rows = |m: &Vec<Vec<Element>>| -> Value {
                Value::Array(
                    m.iter()
                        .map(|row| {
                            Value::Array(row.iter().map(|e| elem(g, e)).collect())
                        })
                        .collect(),
                )
            };
            let result = json!({
                "outcome": "invertible",
                "matrix": rows(&cert.matrix),
                "inverseMatrix": rows(&cert.inverse_matrix),
                "polyWeightCap": cert.poly_cap,
                "verified": true,
            });
            Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
        }
        NondegOutcome::ConeAcyclic(pieces) => {
            let result = json!({
                "outcome": "coneAcyclic",
                "cone": pieces
                    .iter()
                    .map(|p| json!({"degree": p.degree, "dim": p.dim, "betti": p.betti}))
                    .collect::<Vec<_>>(),
            });
            Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
        }
        NondegOutcome::Degenerate { witness } => {
            let result = json!({ "outcome": "degenerate", "witness": witness });
            Ok(Outcome { report: envelope(&inv.verb, "negative", inputs, result), exit: 1 })
        }
        NondegOutcome::Inconclusive { detail } => {
            let result = json!({ "outcome": "inconclusive", "detail": detail });
            Ok(Outcome { report: envelope(&inv.verb, "inconclusive", inputs, result), exit: 3 })
        }
    }
}

fn poisson_to_symplectic_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let pi_el = arg_element(inv, "pi")?;
    let pi = Poisson::new(alg, pi_el.clone(), inv.truncation)?;
    let (omega, cert) =
        workbench_core::compat::poisson_to_symplectic(alg, &pi, inv.max_poly_weight, inv.cap)?;
    if !cert.verify(alg) {
        return Err(Error::Internal(
            "compatibility certificate fails re-verification".into(),
        ));
    }
    if !check::verify_closed(alg, omega.element(), omega.trunc())? {
        return Err(Error::Internal("constructed form fails the closedness re-check".into()));
    }
    let result = json!({
        "omega": elem(g, omega.element()),
        "formTruncation": omega.trunc(),
        "closed": true,
        "certificate": certificate_value(alg, &cert),
    });
    let inputs = inputs_value(inv, &[("pi", elem(g, &pi_el))]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn symplectic_to_poisson_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let g = alg.gens();
    let omega_el = arg_element(inv, "omega")?;
    let omega = PreSymplectic::new(alg, omega_el.clone(), inv.truncation)?;
    let (pi, cert) =
        workbench_core::compat::symplectic_to_poisson(alg, &omega, inv.max_poly_weight, inv.cap)?;
    if !cert.verify(alg) {
        return Err(Error::Internal(
            "compatibility certificate fails re-verification".into(),
        ));
    }
    if !check::oracle_mc_defect(alg, pi.element(), pi.trunc()).is_zero() {
        return Err(Error::Internal("constructed structure fails the re-checked equation".into()));
    }
    let result = json!({
        "pi": elem(g, pi.element()),
        "truncation": pi.trunc(),
        "maurerCartan": true,
        "certificate": certificate_value(alg, &cert),
    });
    let inputs = inputs_value(inv, &[("omega", elem(g, &omega_el))]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn lie_part<'a>(inv: &'a Invocation, verb: &str) -> Result<&'a crate::doc::LiePart> {
    inv.doc.lie.as_ref().ok_or_else(|| {
        Error::Precondition(format!("the {verb} verb needs a [lie] section in the document"))
    })
}

fn generator_table(alg: &Algebra) -> Value {
    let g = alg.gens();
    Value::Array(
        (0..g.len())
            .map(|i| {
                let id = g.id(Kind::Algebra, i);
                let spec = g.base_spec(id);
                json!({
                    "name": spec.name,
                    "chain": spec.chain,
                    "cochain": spec.cochain,
                    "weight": spec.poly_weight,
                    "odd": g.odd(id),
                    "delta": element_string(g, alg.delta_value(i)),
                    "partial": element_string(g, alg.partial_value(i)),
                })
            })
            .collect(),
    )
}

fn ce_build_verb(inv: &Invocation) -> Result<Outcome> {
    let lie = lie_part(inv, "ce-build")?;
    let base = &inv.doc.algebra;
    let ext = chevalley_eilenberg(base, &lie.spec, &lie.action, base.shift())?;
    let result = json!({
        "shift": ext.shift(),
        "stacky": ext.is_stacky(),
        "generators": generator_table(&ext),
        "differentialsValidated": true,
    });
    let inputs = inputs_value(inv, &[]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn casimir_verb(inv: &Invocation) -> Result<Outcome> {
    let lie = lie_part(inv, "casimir")?;
    let base = &inv.doc.algebra;
    let report = shifted_poisson_bg(base, &lie.spec, &lie.action, inv.max_poly_weight, inv.cap)?;
    let ge = report.algebra.gens();
    let bound = cochain_bound(ge, inv.max_poly_weight).ok();
    let result = json!({
        "dimension": report.dim(),
        "basis": report
            .basis
            .iter()
            .map(|e| elem(ge, e))
            .collect::<Vec<_>>(),
        "extendedGenerators": generator_table(&report.algebra),
        "cochainBound": bound.map(Value::from).unwrap_or(Value::Null),
        "routesAgree": true,
    });
    let inputs = inputs_value(inv, &[]);
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}

fn cohomology_verb(inv: &Invocation) -> Result<Outcome> {
    let alg = &inv.doc.algebra;
    let n = alg.shift();
    let min_w: u32 = arg_int(inv, "min_weight", 2u32)?;
    let max_w: u32 = arg_int(inv, "max_weight", inv.truncation.saturating_sub(1).max(2))?;
    let min_d: i64 = arg_int(inv, "min_degree", n + 1)?;
    let max_d: i64 = arg_int(inv, "max_degree", n + 3)?;
    if min_w > max_w || min_d > max_d {
        return Err(Error::Precondition("empty weight or degree range".into()));
    }
    let mut rows = Vec::new();
    for w in min_w..=max_w {
        for d in min_d..=max_d {
            let piece = piece_cohomology(alg, w, d, inv.max_poly_weight, inv.cap)?;
            rows.push(json!({
                "weight": piece.weight,
                "degree": piece.degree,
                "dim": piece.dim,
                "cycles": piece.cycles,
                "boundaries": piece.boundaries,
                "betti": piece.betti(),
            }));
        }
    }
    let result = json!({ "pieces": rows });
    let inputs = inputs_value(
        inv,
        &[
            ("min_weight", Value::from(min_w)),
            ("max_weight", Value::from(max_w)),
            ("min_degree", Value::from(min_d)),
            ("max_degree", Value::from(max_d)),
        ],
    );
    Ok(Outcome { report: envelope(&inv.verb, "ok", inputs, result), exit: 0 })
}
