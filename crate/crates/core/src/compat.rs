//! The contraction calculus relating de Rham and polyvector data.
//!
//! The central objects are the algebra map `mu(-, pi)` sending `dx_a` to
//! `[pi, x_a]`, its derivation companion `nu(-, pi, b)` sending `dx_a` to
//! `[b, x_a]`, and the weight vector `sigma(pi)`.  A closed form `omega`
//! and a Maurer-Cartan polyvector `pi` are *compatible* when
//! `mu(omega, pi) - sigma(pi)` is exact for the twisted differential
//! `[delta + pi, -]`; the witness `h` is kept as an explicit certificate.
//!
//! On top of the calculus this module provides:
//!
//! * the two key identities tying `mu`, `nu`, the de Rham differentials
//!   and the Maurer-Cartan defect together ([`key_identity_check`]);
//! * chain-level compatibility certificates ([`compat_check`]);
//! * non-degeneracy certificates for the weight-2 anchor map
//!   ([`nondeg_check`]), with an explicit inverse modulo the
//!   polynomial-weight cap whenever one exists;
//! * the finite tangent cones whose acyclicity makes the weight tower of
//!   compatible pairs unobstructed ([`tangent_cone_report`]);
//! * the two constructive conversions [`poisson_to_symplectic`] and
//!   [`symplectic_to_poisson`], each returning a re-verified certificate;
//! * the scaling action transporting certificates ([`scaled_certificate`]).
//!
//! Every solver result is re-checked by the independent routines in
//! [`crate::check`] before it is returned.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::algebra::Algebra;
use crate::basis::{enumerate, Piece};
use crate::check;
use crate::derham::{de_rham_d, de_rham_total, is_closed_pre_symplectic, PreSymplectic};
use crate::derivation::{derivation_over, substitute};
use crate::element::{mono_string, reduce_poly_weight, Element, Monomial};
use crate::error::{Error, Result};
use crate::gens::{GenId, Generators, Kind};
use crate::linalg::QMatrix;
use crate::mc::{piece_basis, pw_homogeneous};
use crate::polyvector::{
    delta_bracket, mc_defect, schouten, sharp_subs, sigma, truncate_weight, Poisson,
};
use crate::q::{q_int, q_ratio, Q};

/// Split an element into total-degree-homogeneous components.
fn by_total_degree(g: &Generators, e: &Element) -> BTreeMap<i64, Element> {
    let mut out: BTreeMap<i64, Element> = BTreeMap::new();
    for (m, c) in e.terms() {
        out.entry(m.total_deg(g))
            .or_insert_with(Element::zero)
            .add_term(m.clone(), c.clone());
    }
    out
}

/// The multiplicative contraction `mu(omega, pi)`: the algebra map fixing
/// coefficients and sending each one-form symbol `dx_a` to `[pi, x_a]`.
pub fn mu(alg: &Algebra, omega: &Element, pi: &Element) -> Result<Element> {
    let g = alg.gens();
    omega.check_kinds(g, &[Kind::Algebra, Kind::Form])?;
    pi.check_kinds(g, &[Kind::Algebra, Kind::Poly])?;
    let subs = sharp_subs(alg, pi)?;
    Ok(substitute(g, omega, &subs))
}

/// Shared engine for `nu` and plain contraction: the derivation over the
/// substitution `phi` whose value on `dx_a` is `[b, x_a]`.  The operator
/// parity for a homogeneous direction of total degree `d` is `d + n`;
/// inhomogeneous directions are handled by linearity.
fn contraction_over(
    alg: &Algebra,
    phi: &BTreeMap<GenId, Element>,
    omega: &Element,
    b: &Element,
) -> Result<Element> {
    let g = alg.gens();
    omega.check_kinds(g, &[Kind::Algebra, Kind::Form])?;
    b.check_kinds(g, &[Kind::Algebra, Kind::Poly])?;
    let mut out = Element::zero();
    for (deg, comp) in by_total_degree(g, b) {
        let mut values = BTreeMap::new();
        for i in 0..g.len() {
            let x = Element::gen(g.id(Kind::Algebra, i));
            values.insert(g.id(Kind::Form, i), schouten(g, &comp, &x)?);
        }
        let odd = (deg + alg.shift()).rem_euclid(2) == 1;
        out = out.add(&derivation_over(g, omega, phi, &values, &[Kind::Form], odd)?);
    }
    Ok(out)
}

/// The derivation `nu(omega, pi, b)` over the algebra map `mu(-, pi)`,
/// sending `dx_a` to `[b, x_a]`.  It vanishes on zero-forms and is the
/// linear term of `mu(omega, pi + b eps)` for a square-zero parameter.
pub fn nu(alg: &Algebra, omega: &Element, pi: &Element, b: &Element) -> Result<Element> {
    let phi = sharp_subs(alg, pi)?;
    contraction_over(alg, &phi, omega, b)
}

/// Plain contraction of a polyvector direction into a form: the derivation
/// over the identity sending `dx_a` to `[b, x_a]`.  For a weight-one `b`
/// this is the classical interior product.
pub fn contract(alg: &Algebra, b: &Element, omega: &Element) -> Result<Element> {
    contraction_over(alg, &BTreeMap::new(), omega, b)
}

/// Outcome of comparing two sides of an identity: exact, or the first
/// differing monomial with both coefficients.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub exact: bool,
    pub mismatch: Option<(Monomial, Q, Q)>,
}

fn compare_sides(g: &Generators, lhs: &Element, rhs: &Element, trunc: u32) -> IdentityCheck {
    let cut = |e: &Element| e.filter(|m| m.pv_weight(g) < trunc);
    let l = cut(lhs);
    let r = cut(rhs);
    let diff = l.sub(&r);
    let first = diff.terms().next().map(|(m, _)| m.clone());
    match first {
        None => IdentityCheck { exact: true, mismatch: None },
        Some(m) => {
            let (cl, cr) = (l.coeff(&m), r.coeff(&m));
            IdentityCheck { exact: false, mismatch: Some((m, cl, cr)) }
        }
    }
}

/// Both key identities of the calculus, evaluated below the weight
/// truncation for an arbitrary (not necessarily Maurer-Cartan) `pi`:
///
/// * `[pi, mu(omega, pi)] = mu(d omega, pi) + 1/2 nu(omega, pi, [pi, pi])`
/// * `[delta + pi, mu(omega, pi)] = mu(D omega, pi) + nu(omega, pi, kappa(pi))`
///
/// where `D = d + internal differential` and `kappa(pi)` is the full
/// Maurer-Cartan defect.
#[derive(Clone, Debug)]
pub struct KeyIdentityReport {
    pub bracket_identity: IdentityCheck,
    pub differential_identity: IdentityCheck,
}

pub fn key_identity_check(
    alg: &Algebra,
    omega: &Element,
    pi: &Element,
    trunc: u32,
) -> Result<KeyIdentityReport> {
    let g = alg.gens();
    let m = mu(alg, omega, pi)?;
    let sq = schouten(g, pi, pi)?;

    let lhs1 = schouten(g, pi, &m)?;
    let rhs1 = mu(alg, &de_rham_d(alg, omega)?, pi)?
        .add(&nu(alg, omega, pi, &sq)?.scale(&q_ratio(1, 2)));

    let twisted = alg.lifted_differential().add(pi);
    let lhs2 = schouten(g, &twisted, &m)?;
    let kappa = delta_bracket(alg, pi)?.add(&sq.scale(&q_ratio(1, 2)));
    let rhs2 = mu(alg, &de_rham_total(alg, omega)?, pi)?.add(&nu(alg, omega, pi, &kappa)?);

    Ok(KeyIdentityReport {
        bracket_identity: compare_sides(g, &lhs1, &rhs1, trunc),
        differential_identity: compare_sides(g, &lhs2, &rhs2, trunc),
    })
}

/// A chain-level compatibility certificate: `mu(omega, pi) - sigma(pi)`
/// equals `[delta + pi, h]` below the truncation weight.
#[derive(Clone, Debug)]
pub struct CompatCertificate {
    pub omega: Element,
    pub pi: Element,
    pub h: Element,
    pub trunc: u32,
}

impl CompatCertificate {
    /// Re-verify the defining equation with the independent checker.
    pub fn verify(&self, alg: &Algebra) -> bool {
        check::verify_compat(alg, &self.omega, &self.pi, &self.h, self.trunc)
    }
}

/// Outcome of a compatibility check: a certificate, or the blocking class
/// with a linear-functional witness.  `conclusive` is set only when the
/// witness proves incompatibility outright (first obstructed weight, with
/// a polynomial-weight-homogeneous differential and in-cap data); otherwise
/// the failure is relative to the search caps.
#[derive(Clone, Debug)]
pub enum CompatOutcome {
    Certified(CompatCertificate),
    Blocked {
        weight: u32,
        class: Element,
        functional: Vec<(Monomial, Q)>,
        pairing: Q,
        conclusive: bool,
    },
}

/// Stacked codomain bookkeeping for joint linear solves over several
/// graded blocks at once.
struct Stack {
    index: Vec<BTreeMap<Monomial, usize>>,
    offsets: Vec<usize>,
    rows: usize,
}

struct StackBuilder {
    sets: Vec<BTreeSet<Monomial>>,
}

impl StackBuilder {
    fn new(blocks: usize) -> Self {
        StackBuilder { sets: vec![BTreeSet::new(); blocks] }
    }

    fn add(&mut self, block: usize, e: &Element) {
        for (m, _) in e.terms() {
            self.sets[block].insert(m.clone());
        }
    }

    fn freeze(self) -> Stack {
        let mut index = Vec::new();
        let mut offsets = Vec::new();
        let mut rows = 0;
        for set in self.sets {
            offsets.push(rows);
            rows += set.len();
            index.push(set.into_iter().zip(0..).map(|(m, i)| (m, i)).collect());
        }
        Stack { index, offsets, rows }
    }
}

impl Stack {
    /// Expand one element per block into a stacked coordinate vector.
    fn vector(&self, parts: &[&Element]) -> Result<Vec<Q>> {
        let mut v = vec![q_int(0); self.rows];
        for (block, e) in parts.iter().enumerate() {
            for (m, c) in e.terms() {
                let i = self.index[block].get(m).ok_or_else(|| {
                    Error::Internal(format!("monomial outside stacked codomain block {block}"))
                })?;
                v[self.offsets[block] + i] = c.clone();
            }
        }
        Ok(v)
    }

    /// Recover (block, monomial, coefficient) triples from a functional.
    fn unpack(&self, phi: &[Q]) -> Vec<(usize, Monomial, Q)> {
        let mut out = Vec::new();
        for (block, map) in self.index.iter().enumerate() {
            for (m, i) in map {
                let c = &phi[self.offsets[block] + i];
                if !c.is_zero() {
                    out.push((block, m.clone(), c.clone()));
                }
            }
        }
        out
    }
}

fn pair_functional(functional: &[(Monomial, Q)], e: &Element) -> Q {
    functional
        .iter()
        .map(|(m, c)| c * e.coeff(m))
        .fold(q_int(0), |a, b| a + b)
}

/// Decide compatibility of `(omega, pi)` at the common truncation by one
/// joint exact solve for the homotopy `h` over all weights at once.
pub fn compat_check(
    alg: &Algebra,
    omega: &PreSymplectic,
    pi: &Poisson,
    poly_cap: u32,
    cap: usize,
) -> Result<CompatOutcome> {
    let g = alg.gens();
    let trunc = omega.trunc().min(pi.trunc());
    let n = alg.shift();

    let defect = mc_defect(alg, pi)?;
    let defect = truncate_weight(g, &defect, trunc);
    if !defect.is_zero() {
        return Err(Error::Precondition(
            "compatibility requires a Maurer-Cartan polyvector below the truncation".into(),
        ));
    }
    let closed = is_closed_pre_symplectic(alg, omega)?;
    if !closed.closed {
        return Err(Error::Precondition(format!(
            "compatibility requires a closed form; defect at form degree {}: {}",
            closed.failure.as_ref().unwrap().0,
            closed.failure.as_ref().unwrap().1
        )));
    }

    let rhs = truncate_weight(
        g,
        &mu(alg, omega.element(), pi.element())?.sub(&sigma(g, pi).dir),
        trunc,
    );

    // domain: h-pieces of degree n+1 for every weight 2..trunc-1
    let mut domain: Vec<Monomial> = Vec::new();
    for w in 2..trunc {
        domain.extend(piece_basis(g, w, n + 1, poly_cap, cap)?);
    }
    let twisted = alg.lifted_differential().add(pi.element());
    let images: Vec<Element> = domain
        .iter()
        .map(|m| {
            schouten(g, &twisted, &Element::term(m.clone(), q_int(1)))
                .map(|e| truncate_weight(g, &e, trunc))
        })
        .collect::<Result<_>>()?;

    let mut sb = StackBuilder::new(1);
    sb.add(0, &rhs);
    for img in &images {
        sb.add(0, img);
    }
    let stack = sb.freeze();
    let cols: Vec<Vec<Q>> = images.iter().map(|e| stack.vector(&[e])).collect::<Result<_>>()?;
    let mat = QMatrix::from_columns(stack.rows, cols);
    let b = stack.vector(&[&rhs])?;

    match mat.solve(&b) {
        Ok(x) => {
            let mut h = Element::zero();
            for (m, c) in domain.iter().zip(x) {
                if !c.is_zero() {
                    h.add_term(m.clone(), c);
                }
            }
            let cert = CompatCertificate {
                omega: omega.element().clone(),
                pi: pi.element().clone(),
                h,
                trunc,
            };
            if !cert.verify(alg) {
                return Err(Error::Internal(
                    "compatibility solution failed independent re-verification".into(),
                ));
            }
            Ok(CompatOutcome::Certified(cert))
        }
        Err(phi) => {
            let functional: Vec<(Monomial, Q)> = stack
                .unpack(&phi)
                .into_iter()
                .map(|(_, m, c)| (m, c))
                .collect();
            if !check::verify_unsolvability_twisted(alg, pi.element(), trunc, &domain, &functional)
            {
                return Err(Error::Internal(
                    "incompatibility functional failed independent re-verification".into(),
                ));
            }
            let pairing = pair_functional(&functional, &rhs);
            if pairing.is_zero() {
                return Err(Error::Internal(
                    "incompatibility functional does not separate the defect".into(),
                ));
            }
            let weight = functional
                .iter()
                .map(|(m, _)| m.pv_weight(g))
                .min()
                .unwrap_or(2);
            let class = rhs.weight_part(g, weight);

            // the witness is absolute only at the first possible weight,
            // where no lower-weight homotopy choice can interfere
            let w2: Vec<(Monomial, Q)> = functional
                .iter()
                .filter(|(m, _)| m.pv_weight(g) == 2)
                .cloned()
                .collect();
            let rhs2 = rhs.weight_part(g, 2);
            let domain2 = piece_basis(g, 2, n + 1, poly_cap, cap)?;
            let conclusive = weight == 2
                && !pair_functional(&w2, &rhs2).is_zero()
                && pw_homogeneous(alg)
                && rhs2.max_poly_weight(g) <= poly_cap
                && check::verify_unsolvability(alg, &domain2, &w2);

            Ok(CompatOutcome::Blocked { weight, class, functional, pairing, conclusive })
        }
    }
}

/// Extract the matrix of a weight-one polyvector family: entry `(b, a)` is
/// the coefficient element of `pv_b` in `values[a]`.  Canonical monomial
/// order keeps the single `pv` factor rightmost, so no sign is incurred.
fn weight_one_matrix(g: &Generators, values: &[Element]) -> Result<Vec<Vec<Element>>> {
    let m = g.len();
    let mut out = vec![vec![Element::zero(); values.len()]; m];
    for (a, v) in values.iter().enumerate() {
        for (mono, c) in v.terms() {
            let mut coeff_factors = Vec::new();
            let mut pv_base: Option<usize> = None;
            for &(id, exp) in &mono.0 {
                match g.kind(id) {
                    Kind::Poly if exp == 1 && pv_base.is_none() => {
                        pv_base = Some(g.base_index(id));
                    }
                    Kind::Algebra => coeff_factors.push((id, exp)),
                    _ => {
                        return Err(Error::Internal(format!(
                            "not a weight-one polyvector term: {}",
                            mono_string(g, mono)
                        )))
                    }
                }
            }
            let b = pv_base.ok_or_else(|| {
                Error::Internal("weight-one polyvector term without pv factor".into())
            })?;
            out[b][a].add_term(Monomial(coeff_factors), c.clone());
        }
    }
    Ok(out)
}

/// Extract the matrix of a one-form family: entry `(b, a)` is the
/// coefficient element of `dx_b` in `values[a]`.
fn one_form_matrix(g: &Generators, values: &[Element]) -> Result<Vec<Vec<Element>>> {
    let m = g.len();
    let mut out = vec![vec![Element::zero(); values.len()]; m];
    for (a, v) in values.iter().enumerate() {
        for (mono, c) in v.terms() {
            let mut coeff_factors = Vec::new();
            let mut form_base: Option<usize> = None;
            for &(id, exp) in &mono.0 {
                match g.kind(id) {
                    Kind::Form if exp == 1 && form_base.is_none() => {
                        form_base = Some(g.base_index(id));
                    }
                    Kind::Algebra => coeff_factors.push((id, exp)),
                    _ => {
                        return Err(Error::Internal(format!(
                            "not a one-form term: {}",
                            mono_string(g, mono)
                        )))
                    }
                }
            }
            let b = form_base
                .ok_or_else(|| Error::Internal("one-form term without dx factor".into()))?;
            out[b][a].add_term(Monomial(coeff_factors), c.clone());
        }
    }
    Ok(out)
}

/// A certified invertibility datum for an anchor map: the forward
/// substitutions, the inverse substitutions modulo the polynomial-weight
/// cap, and the matrices of both for display.
#[derive(Clone, Debug)]
pub struct NondegCertificate {
    pub forward: BTreeMap<GenId, Element>,
    pub inverse: BTreeMap<GenId, Element>,
    pub matrix: Vec<Vec<Element>>,
    pub inverse_matrix: Vec<Vec<Element>>,
    pub poly_cap: u32,
}

/// Ranks of one degree of a mapping-cone complex used as a fallback
/// non-degeneracy certificate.
#[derive(Clone, Debug)]
pub struct ConeRankPiece {
    pub degree: i64,
    pub dim: usize,
    pub betti: i64,
}

/// Outcome of a non-degeneracy check.
#[derive(Clone, Debug)]
pub enum NondegOutcome {
    /// Explicit two-sided inverse modulo the polynomial-weight cap,
    /// verified by substitution round trips.
    Invertible(NondegCertificate),
    /// No strict inverse, but the mapping cone of the anchor is exact in
    /// every enumerated degree below the caps.
    ConeAcyclic(Vec<ConeRankPiece>),
    /// The mapping cone has homology inside the enumerated range.
    Degenerate { witness: String },
    /// Neither route produced a verdict within the caps.
    Inconclusive { detail: String },
}

/// Solve for substitutions inverse to `fwd` modulo the polynomial-weight
/// cap: `fwd` maps each source generator to an element of the partner
/// kind, and the unknowns are images for the partner generators.  Both
/// round-trip families are imposed jointly, so a solution is always a
/// certified two-sided inverse.
fn invert_substitutions(
    g: &Generators,
    fwd: &BTreeMap<GenId, Element>,
    unknown_kind: Kind,
    unknown_piece: impl Fn(i64) -> Piece,
    poly_cap: u32,
    cap: usize,
) -> Result<Option<BTreeMap<GenId, Element>>> {
    let reduce = |e: &Element| reduce_poly_weight(g, e, poly_cap);
    // the round trips are linear in the unknowns only when every forward
    // image is linear in the partner generators
    for img in fwd.values() {
        for (m, _) in img.terms() {
            let partners: u32 = m
                .0
                .iter()
                .filter(|(id, _)| g.kind(*id) == unknown_kind)
                .map(|&(_, e)| e)
                .sum();
            if partners != 1 {
                return Err(Error::Precondition(
                    "anchor images must be linear in the partner generators".into(),
                ));
            }
        }
    }
    // unknowns: for each partner generator, coefficients over its piece
    let mut slots: Vec<(GenId, Vec<Monomial>)> = Vec::new();
    for i in 0..g.len() {
        let id = g.id(unknown_kind, i);
        let basis = enumerate(g, &unknown_piece(g.total_deg(id)), cap)?;
        slots.push((id, basis));
    }

    // residual of the two round-trip families as affine functions of the
    // unknowns: evaluate at the zero assignment and at unit assignments
    let eval = |assign: &BTreeMap<GenId, Element>| -> Result<Vec<Element>> {
        let mut residuals = Vec::new();
        for (&src, img) in fwd {
            let through = reduce(&substitute(g, &reduce(img), assign));
            residuals.push(through.sub(&Element::gen(src)));
        }
        for (id, _) in &slots {
            let image = assign.get(id).cloned().unwrap_or_else(Element::zero);
            let through = reduce(&substitute(g, &image, fwd));
            residuals.push(through.sub(&Element::gen(*id)));
        }
        Ok(residuals)
    };

    let zero_assign: BTreeMap<GenId, Element> =
        slots.iter().map(|(id, _)| (*id, Element::zero())).collect();
    let base = eval(&zero_assign)?;

    let mut columns: Vec<Vec<Element>> = Vec::new();
    for (id, basis) in &slots {
        for m in basis {
            let mut assign = zero_assign.clone();
            assign.insert(*id, Element::term(m.clone(), q_int(1)));
            let shifted = eval(&assign)?;
            columns.push(
                shifted
                    .iter()
                    .zip(&base)
                    .map(|(s, b)| s.sub(b))
                    .collect(),
            );
        }
    }

    let mut sb = StackBuilder::new(base.len());
    for (i, e) in base.iter().enumerate() {
        sb.add(i, e);
    }
    for col in &columns {
        for (i, e) in col.iter().enumerate() {
            sb.add(i, e);
        }
    }
    let stack = sb.freeze();
    let cols_q: Vec<Vec<Q>> = columns
        .iter()
        .map(|col| stack.vector(&col.iter().collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let rhs = stack
        .vector(&base.iter().collect::<Vec<_>>())?
        .iter()
        .map(|c| -c)
        .collect::<Vec<Q>>();
    let mat = QMatrix::from_columns(stack.rows, cols_q);
    match mat.solve(&rhs) {
        Err(_) => Ok(None),
        Ok(x) => {
            let mut assign = zero_assign;
            let mut k = 0;
            for (id, basis) in &slots {
                let mut img = Element::zero();
                for m in basis {
                    if !x[k].is_zero() {
                        img.add_term(m.clone(), x[k].clone());
                    }
                    k += 1;
                }
                assign.insert(*id, img);
            }
            Ok(Some(assign))
        }
    }
}

/// Betti numbers of the cone of a degree-preserving map `f` between two
/// complexes presented by bases per total degree.
struct ConeInput {
    /// per degree: (domain basis, codomain basis)
    degrees: Vec<i64>,
    domain: BTreeMap<i64, Vec<Monomial>>,
    codomain: BTreeMap<i64, Vec<Monomial>>,
}

fn element_vector(basis: &[Monomial], e: &Element) -> Result<Vec<Q>> {
    let mut v = vec![q_int(0); basis.len()];
    for (m, c) in e.terms() {
        match basis.binary_search(m) {
            Ok(i) => v[i] = c.clone(),
            Err(_) => {
                return Err(Error::Internal("image outside enumerated piece".into()));
            }
        }
    }
    Ok(v)
}

fn cone_betti(
    input: &ConeInput,
    dom_d: impl Fn(&Monomial) -> Result<Element>,
    cod_d: impl Fn(&Monomial) -> Result<Element>,
    f: impl Fn(&Monomial) -> Result<Element>,
) -> Result<Vec<ConeRankPiece>> {
    let empty: Vec<Monomial> = Vec::new();
    let dom = |d: i64| input.domain.get(&d).unwrap_or(&empty);
    let cod = |d: i64| input.codomain.get(&d).unwrap_or(&empty);
    // cone^d = domain^{d+1} (+) codomain^d, differential
    // (x, y) -> (-d x, f x + d y)
    let lo = input.degrees.iter().min().copied().unwrap_or(0) - 2;
    let hi = input.degrees.iter().max().copied().unwrap_or(0) + 1;
    let dim = |d: i64| dom(d + 1).len() + cod(d).len();
    let matrix = |d: i64| -> Result<QMatrix> {
        let rows = dim(d + 1);
        let mut cols: Vec<Vec<Q>> = Vec::new();
        let (dn, cn) = (dom(d + 2).len(), cod(d + 1).len());
        for m in dom(d + 1) {
            let dx = dom_d(m)?.neg();
            let fx = f(m)?;
            let mut v = element_vector(dom(d + 2), &dx)?;
            v.extend(element_vector(cod(d + 1), &fx)?);
            debug_assert_eq!(v.len(), dn + cn);
            cols.push(v);
        }
        for m in cod(d) {
            let dy = cod_d(m)?;
            let mut v = vec![q_int(0); dn];
            v.extend(element_vector(cod(d + 1), &dy)?);
            cols.push(v);
        }
        Ok(QMatrix::from_columns(rows, cols))
    };
    let mut mats: BTreeMap<i64, QMatrix> = BTreeMap::new();
    for d in lo..=hi {
        mats.insert(d, matrix(d)?);
    }
    for d in lo..hi {
        let square = mats[&(d + 1)].mul(&mats[&d]);
        if !square.is_zero() {
            return Err(Error::Precondition(
                "cone differential does not square to zero (the comparison map is not a chain map)"
                    .into(),
            ));
        }
    }
    let ranks: BTreeMap<i64, usize> =
        mats.iter().map(|(d, m)| (*d, m.rank())).collect();
    let mut out = Vec::new();
    for d in lo..=hi {
        let dimension = dim(d);
        if dimension == 0 {
            continue;
        }
        let below = *ranks.get(&(d - 1)).unwrap_or(&0);
        let here = *ranks.get(&d).unwrap_or(&0);
        out.push(ConeRankPiece {
            degree: d,
            dim: dimension,
            betti: dimension as i64 - here as i64 - below as i64,
        });
    }
    Ok(out)
}

/// Certify (non-)degeneracy of the weight-2 anchor `dx_a -> [pi_2, x_a]`.
pub fn nondeg_check(
    alg: &Algebra,
    pi: &Poisson,
    poly_cap: u32,
    cap: usize,
) -> Result<NondegOutcome> {
    let g = alg.gens();
    let pi2 = pi.element().weight_part(g, 2);
    if pi2.is_zero() {
        if g.is_empty() {
            return Ok(NondegOutcome::Invertible(NondegCertificate {
                forward: BTreeMap::new(),
                inverse: BTreeMap::new(),
                matrix: Vec::new(),
                inverse_matrix: Vec::new(),
                poly_cap,
            }));
        }
        return Ok(NondegOutcome::Degenerate {
            witness: "weight-2 component is zero".into(),
        });
    }
    let fwd = sharp_subs(alg, &pi2)?;
    let fwd_values: Vec<Element> = (0..g.len())
        .map(|i| fwd[&g.id(Kind::Form, i)].clone())
        .collect();
    let matrix = weight_one_matrix(g, &fwd_values)?;

    let inv = invert_substitutions(
        g,
        &fwd,
        Kind::Poly,
        |deg| Piece::forms(1, deg, poly_cap),
        poly_cap,
        cap,
    )?;
    if let Some(inverse) = inv {
        if !check::verify_inverse_substitutions(g, &fwd, &inverse, poly_cap) {
            return Err(Error::Internal(
                "anchor inverse failed independent round-trip verification".into(),
            ));
        }
        let inv_values: Vec<Element> = (0..g.len())
            .map(|i| inverse[&g.id(Kind::Poly, i)].clone())
            .collect();
        let inverse_matrix = one_form_matrix(g, &inv_values)?;
        return Ok(NondegOutcome::Invertible(NondegCertificate {
            forward: fwd,
            inverse,
            matrix,
            inverse_matrix,
            poly_cap,
        }));
    }

    // fallback: exactness of the cone of the anchor map per degree
    let mut degrees: BTreeSet<i64> = BTreeSet::new();
    for i in 0..g.len() {
        degrees.insert(g.total_deg(g.id(Kind::Form, i)));
        degrees.insert(g.total_deg(g.id(Kind::Poly, i)));
    }
    let span: Vec<i64> = degrees.iter().copied().collect();
    let lo = span.iter().min().copied().unwrap_or(0) - 1;
    let hi = span.iter().max().copied().unwrap_or(0) + 2;
    let mut domain = BTreeMap::new();
    let mut codomain = BTreeMap::new();
    let mut all_degrees = Vec::new();
    for d in lo..=hi {
        let forms = enumerate(g, &Piece::forms(1, d, poly_cap), cap)?;
        let polys = enumerate(g, &Piece::polyvectors(1, d, poly_cap), cap)?;
        if !forms.is_empty() || !polys.is_empty() {
            all_degrees.push(d);
        }
        domain.insert(d, forms);
        codomain.insert(d, polys);
    }
    let input = ConeInput { degrees: all_degrees, domain, codomain };
    let hat = alg.lifted_differential();
    let reduce = |e: Element| reduce_poly_weight(g, &e, poly_cap);
    let pieces = match cone_betti(
        &input,
        |m| {
            let e = Element::term(m.clone(), q_int(1));
            Ok(reduce(de_rham_total(alg, &e)?.sub(&de_rham_d(alg, &e)?)))
        },
        |m| Ok(reduce(schouten(g, &hat, &Element::term(m.clone(), q_int(1)))?)),
        |m| Ok(reduce(substitute(g, &Element::term(m.clone(), q_int(1)), &fwd))),
    ) {
        Ok(pieces) => pieces,
        Err(Error::Precondition(detail)) => {
            return Ok(NondegOutcome::Inconclusive { detail });
        }
        Err(e) => return Err(e),
    };
    if pieces.iter().all(|p| p.betti == 0) {
        if pieces.is_empty() {
            return Ok(NondegOutcome::Inconclusive {
                detail: "no enumerable pieces below the caps".into(),
            });
        }
        return Ok(NondegOutcome::ConeAcyclic(pieces));
    }
    let worst = pieces.iter().find(|p| p.betti != 0).unwrap();
    Ok(NondegOutcome::Degenerate {
        witness: format!(
            "anchor cone has homology of rank {} in degree {} (polynomial weight <= {})",
            worst.betti, worst.degree, poly_cap
        ),
    })
}

/// One polynomial-weight piece of the weight-`p` tangent cone: the
/// dimensions of the polyvector piece per total degree and the Betti
/// numbers of the cone of `nu(omega_2, pi_2, -) - (p-1)`.
#[derive(Clone, Debug)]
pub struct TangentConePiece {
    pub poly_weight: u32,
    pub degrees: Vec<i64>,
    pub dims: Vec<usize>,
    pub cone: Vec<ConeRankPiece>,
    pub acyclic: bool,
}

/// Acyclicity report for the tangent cones controlling the weight tower
/// over a compatible pair.
#[derive(Clone, Debug)]
pub struct TangentConeReport {
    pub p: u32,
    pub pieces: Vec<TangentConePiece>,
    pub all_acyclic: bool,
}

/// Enumerate weight-`pv_weight` polyvector monomials of exact polynomial
/// weight, grouped by total degree.
fn weight_pw_basis(
    g: &Generators,
    pv_weight: u32,
    poly_weight: u32,
    cap: usize,
) -> Result<BTreeMap<i64, Vec<Monomial>>> {
    let ids: Vec<GenId> = g
        .iter_ids(Kind::Algebra)
        .chain(g.iter_ids(Kind::Poly))
        .collect();
    for &id in &ids {
        if g.kind(id) == Kind::Algebra && !g.odd(id) && g.poly_weight(id) == 0 {
            return Err(Error::Unsupported(format!(
                "even generator {} of polynomial weight 0 makes pieces infinite",
                g.token(id)
            )));
        }
    }
    let mut out: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
    let mut count = 0usize;
    let mut stack: Vec<(usize, u32, u32, Vec<(GenId, u32)>)> =
        vec![(0, pv_weight, poly_weight, Vec::new())];
    while let Some((i, pv_left, pw_left, cur)) = stack.pop() {
        if i == ids.len() {
            if pv_left == 0 && pw_left == 0 {
                count += 1;
                if count > cap {
                    return Err(Error::BasisCapExceeded {
                        piece: format!("weight {pv_weight} polynomial weight {poly_weight}"),
                        size: count,
                        cap,
                    });
                }
                let m = Monomial(cur);
                out.entry(m.total_deg(g)).or_default().push(m);
            }
            continue;
        }
        let id = ids[i];
        let is_pv = g.kind(id) == Kind::Poly;
        let unit_pw = if is_pv { 0 } else { g.poly_weight(id) };
        let budget = if is_pv { pv_left } else if unit_pw > 0 { pw_left / unit_pw } else { u32::MAX };
        let max = if g.odd(id) { budget.min(1) } else { budget.min(64) };
        for e in (0..=max).rev() {
            let mut next = cur.clone();
            if e > 0 {
                next.push((id, e));
            }
            let pv_next = if is_pv { pv_left - e } else { pv_left };
            let pw_next = pw_left - e * unit_pw;
            stack.push((i + 1, pv_next, pw_next, next));
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    Ok(out)
}

/// Build the cone report for `nu(omega_2, pi_2, -) - (p-1)` acting on the
/// weight-`p` polyvector pieces of exact polynomial weight `0..=poly_cap`.
/// Pieces are compared in the associated graded of the polynomial-weight
/// filtration, so the piece operator is the weight-preserving part of the
/// full one.
pub fn tangent_cone_report(
    alg: &Algebra,
    omega2: &Element,
    pi2: &Element,
    p: u32,
    poly_cap: u32,
    cap: usize,
) -> Result<TangentConeReport> {
    let g = alg.gens();
    if !pw_homogeneous(alg) {
        return Err(Error::Unsupported(
            "piecewise tangent cones need a polynomial-weight homogeneous differential".into(),
        ));
    }
    let hat = alg.lifted_differential();
    let mut pieces = Vec::new();
    for k in 0..=poly_cap {
        let by_deg = weight_pw_basis(g, p, k, cap)?;
        if by_deg.is_empty() {
            continue;
        }
        let degrees: Vec<i64> = by_deg.keys().copied().collect();
        let dims: Vec<usize> = degrees.iter().map(|d| by_deg[d].len()).collect();
        let input = ConeInput {
            degrees: degrees.clone(),
            domain: by_deg.clone(),
            codomain: by_deg.clone(),
        };
        let project =
            |e: Element| e.filter(|m| m.pv_weight(g) == p && m.poly_weight(g) == k);
        let diff = |m: &Monomial| -> Result<Element> {
            Ok(project(schouten(g, &hat, &Element::term(m.clone(), q_int(1)))?))
        };
        let op = |m: &Monomial| -> Result<Element> {
            let e = Element::term(m.clone(), q_int(1));
            let raw = nu(alg, omega2, pi2, &e)?.sub(&e.scale(&q_int(p as i64 - 1)));
            Ok(project(raw))
        };
        let cone = cone_betti(&input, &diff, &diff, &op)?;
        let acyclic = cone.iter().all(|c| c.betti == 0);
        pieces.push(TangentConePiece { poly_weight: k, degrees, dims, cone, acyclic });
    }
    let all_acyclic = pieces.iter().all(|p| p.acyclic);
    Ok(TangentConeReport { p, pieces, all_acyclic })
}

/// The weight-one identity: on generators, `nu(omega, pi, -)` equals the
/// composite of the two anchors, contraction into `omega` followed by
/// `mu(-, pi)`.
pub fn nu_anchor_identity(alg: &Algebra, omega2: &Element, pi2: &Element) -> Result<bool> {
    let g = alg.gens();
    for i in 0..g.len() {
        let b = Element::gen(g.id(Kind::Poly, i));
        let lhs = nu(alg, omega2, pi2, &b)?;
        let rhs = mu(alg, &contract(alg, &b, omega2)?, pi2)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Construct the closed form matched to a non-degenerate Maurer-Cartan
/// polyvector: solves `mu(omega, pi) - sigma(pi) = [delta + pi, h]` and
/// `D omega = 0` jointly for `(omega, h)` below the truncation, preferring
/// solutions with `h = 0` when one exists (form unknowns are pivoted
/// first).
pub fn poisson_to_symplectic(
    alg: &Algebra,
    pi: &Poisson,
    poly_cap: u32,
    cap: usize,
) -> Result<(PreSymplectic, CompatCertificate)> {
    let g = alg.gens();
    let trunc = pi.trunc();
    let n = alg.shift();

    match nondeg_check(alg, pi, poly_cap, cap)? {
        NondegOutcome::Invertible(_) | NondegOutcome::ConeAcyclic(_) => {}
        NondegOutcome::Degenerate { witness } => {
            return Err(Error::Precondition(format!(
                "conversion requires a non-degenerate polyvector: {witness}"
            )));
        }
        NondegOutcome::Inconclusive { detail } => {
            return Err(Error::Precondition(format!(
                "non-degeneracy is inconclusive below the caps: {detail}"
            )));
        }
    }
    if !mc_defect(alg, pi)?.is_zero() {
        return Err(Error::Precondition(
            "conversion requires a Maurer-Cartan polyvector below the truncation".into(),
        ));
    }

    let cut_w = |e: &Element| truncate_weight(g, e, trunc);
    let cut_f = |e: &Element| e.filter(|m| m.form_deg(g) < trunc);

    let mut form_domain: Vec<Monomial> = Vec::new();
    for p in 2..trunc {
        form_domain.extend(enumerate(g, &Piece::forms(p, n + 2, poly_cap), cap)?);
    }
    let mut h_domain: Vec<Monomial> = Vec::new();
    for w in 2..trunc {
        h_domain.extend(piece_basis(g, w, n + 1, poly_cap, cap)?);
    }
    let twisted = alg.lifted_differential().add(pi.element());

    // blocks: 0 = compatibility (polyvectors), 1 = closedness (forms)
    let mut columns: Vec<(Element, Element)> = Vec::new();
    for m in &form_domain {
        let e = Element::term(m.clone(), q_int(1));
        columns.push((cut_w(&mu(alg, &e, pi.element())?), cut_f(&de_rham_total(alg, &e)?)));
    }
    for m in &h_domain {
        let e = Element::term(m.clone(), q_int(1));
        columns.push((cut_w(&schouten(g, &twisted, &e)?).neg(), Element::zero()));
    }
    let rhs0 = cut_w(&sigma(g, pi).dir);

    let mut sb = StackBuilder::new(2);
    sb.add(0, &rhs0);
    for (c0, c1) in &columns {
        sb.add(0, c0);
        sb.add(1, c1);
    }
    let stack = sb.freeze();
    let cols: Vec<Vec<Q>> = columns
        .iter()
        .map(|(c0, c1)| stack.vector(&[c0, c1]))
        .collect::<Result<_>>()?;
    let zero = Element::zero();
    let b = stack.vector(&[&rhs0, &zero])?;
    let x = QMatrix::from_columns(stack.rows, cols).solve(&b).map_err(|_| {
        Error::Internal(
            "matched-form solve infeasible despite certified non-degeneracy".into(),
        )
    })?;

    let mut omega = Element::zero();
    let mut h = Element::zero();
    for (i, m) in form_domain.iter().enumerate() {
        if !x[i].is_zero() {
            omega.add_term(m.clone(), x[i].clone());
        }
    }
    for (j, m) in h_domain.iter().enumerate() {
        let c = &x[form_domain.len() + j];
        if !c.is_zero() {
            h.add_term(m.clone(), c.clone());
        }
    }

    let omega = PreSymplectic::new(alg, omega, trunc)?;
    if !is_closed_pre_symplectic(alg, &omega)?.closed
        || !check::verify_closed(alg, omega.element(), trunc)?
    {
        return Err(Error::Internal("matched form is not closed".into()));
    }
    let cert = CompatCertificate {
        omega: omega.element().clone(),
        pi: pi.element().clone(),
        h,
        trunc,
    };
    if !cert.verify(alg) {
        return Err(Error::Internal(
            "matched-form certificate failed independent re-verification".into(),
        ));
    }
    Ok((omega, cert))
}

/// Construct the Maurer-Cartan polyvector matched to a symplectic form:
/// the weight-2 component is the certified strict inverse of the weight-2
/// anchor, and each higher weight solves the Maurer-Cartan and
/// compatibility constraints jointly.
pub fn symplectic_to_poisson(
    alg: &Algebra,
    omega: &PreSymplectic,
    poly_cap: u32,
    cap: usize,
) -> Result<(Poisson, CompatCertificate)> {
    let g = alg.gens();
    let trunc = omega.trunc();
    let n = alg.shift();

    let closed = is_closed_pre_symplectic(alg, omega)?;
    if !closed.closed {
        return Err(Error::Precondition(format!(
            "conversion requires a closed form; defect at form degree {}: {}",
            closed.failure.as_ref().unwrap().0,
            closed.failure.as_ref().unwrap().1
        )));
    }
    let omega2 = omega.element().form_part(g, 2);

    // weight-2 anchor of the form side: pv_a -> contraction of omega_2
    let mut form_anchor = BTreeMap::new();
    for i in 0..g.len() {
        let b = Element::gen(g.id(Kind::Poly, i));
        form_anchor.insert(g.id(Kind::Poly, i), contract(alg, &b, &omega2)?);
    }
    let inverse = invert_substitutions(
        g,
        &form_anchor,
        Kind::Form,
        |deg| Piece::polyvectors(1, deg, poly_cap),
        poly_cap,
        cap,
    )?
    .ok_or_else(|| {
        Error::Precondition("the weight-2 form anchor is not invertible below the caps".into())
    })?;
    if !check::verify_inverse_substitutions(g, &form_anchor, &inverse, poly_cap) {
        return Err(Error::Internal(
            "form-anchor inverse failed independent round-trip verification".into(),
        ));
    }

    // reconstruct pi_2 from its anchor: solve [pi_2, x_a] = inverse(dx_a)
    let pi2_basis = piece_basis(g, 2, n + 2, poly_cap, cap)?;
    let reduce = |e: &Element| reduce_poly_weight(g, e, poly_cap);
    let targets: Vec<Element> = (0..g.len())
        .map(|i| inverse[&g.id(Kind::Form, i)].clone())
        .collect();
    let mut sb = StackBuilder::new(g.len());
    let mut col_elems: Vec<Vec<Element>> = Vec::new();
    for m in &pi2_basis {
        let e = Element::term(m.clone(), q_int(1));
        let mut per_gen = Vec::new();
        for i in 0..g.len() {
            let x = Element::gen(g.id(Kind::Algebra, i));
            per_gen.push(reduce(&schouten(g, &e, &x)?));
        }
        col_elems.push(per_gen);
    }
    for (i, t) in targets.iter().enumerate() {
        sb.add(i, t);
    }
    for col in &col_elems {
        for (i, e) in col.iter().enumerate() {
            sb.add(i, e);
        }
    }
    let stack = sb.freeze();
    let cols: Vec<Vec<Q>> = col_elems
        .iter()
        .map(|col| stack.vector(&col.iter().collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let b = stack.vector(&targets.iter().collect::<Vec<_>>())?;
    let x = QMatrix::from_columns(stack.rows, cols).solve(&b).map_err(|_| {
        Error::Internal("anchor inverse is not realized by a weight-2 polyvector".into())
    })?;
    let mut pi_elem = Element::zero();
    for (m, c) in pi2_basis.iter().zip(x) {
        if !c.is_zero() {
            pi_elem.add_term(m.clone(), c);
        }
    }

    // weight tower: at each weight solve jointly for (pi_w, h_w)
    let mut h = Element::zero();
    let hat = alg.lifted_differential();
    for w in 2..trunc {
        let cut = |e: &Element| e.filter(|m| m.pv_weight(g) == w);
        let current = Poisson::new(alg, pi_elem.clone(), w + 1)?;
        let kappa_defect = cut(&mc_defect(alg, &current)?);
        let twisted = hat.add(&pi_elem);
        let compat_defect = cut(
            &mu(alg, omega.element(), &pi_elem)?
                .sub(&sigma(g, &current).dir)
                .sub(&schouten(g, &twisted, &h)?),
        );
        if kappa_defect.is_zero() && compat_defect.is_zero() {
            continue;
        }
        let pi_dom = if w > 2 { piece_basis(g, w, n + 2, poly_cap, cap)? } else { Vec::new() };
        let h_dom = piece_basis(g, w, n + 1, poly_cap, cap)?;
        // blocks: 0 = Maurer-Cartan (degree n+3), 1 = compatibility (n+2)
        let mut columns: Vec<(Element, Element)> = Vec::new();
        for m in &pi_dom {
            let e = Element::term(m.clone(), q_int(1));
            let mc_col = cut(&schouten(g, &hat, &e)?);
            let compat_col = cut(
                &nu(alg, omega.element(), &pi_elem, &e)?
                    .sub(&e.scale(&q_int(w as i64 - 1))),
            );
            columns.push((mc_col, compat_col));
        }
        for m in &h_dom {
            let e = Element::term(m.clone(), q_int(1));
            columns.push((Element::zero(), cut(&schouten(g, &twisted, &e)?).neg()));
        }
        let rhs = (kappa_defect.neg(), compat_defect.neg());
        let mut sb = StackBuilder::new(2);
        sb.add(0, &rhs.0);
        sb.add(1, &rhs.1);
        for (c0, c1) in &columns {
            sb.add(0, c0);
            sb.add(1, c1);
        }
        let stack = sb.freeze();
        let cols: Vec<Vec<Q>> = columns
            .iter()
            .map(|(c0, c1)| stack.vector(&[c0, c1]))
            .collect::<Result<_>>()?;
        let b = stack.vector(&[&rhs.0, &rhs.1])?;
        let x = QMatrix::from_columns(stack.rows, cols).solve(&b).map_err(|_| {
            Error::Internal(format!(
                "weight-{w} tower solve infeasible despite an invertible anchor"
            ))
        })?;
        for (i, m) in pi_dom.iter().enumerate() {
            if !x[i].is_zero() {
                pi_elem.add_term(m.clone(), x[i].clone());
            }
        }
        for (j, m) in h_dom.iter().enumerate() {
            let c = &x[pi_dom.len() + j];
            if !c.is_zero() {
                h.add_term(m.clone(), c.clone());
            }
        }
    }

    let pi = Poisson::new(alg, pi_elem, trunc)?;
    if !mc_defect(alg, &pi)?.is_zero() {
        return Err(Error::Internal("matched polyvector violates Maurer-Cartan".into()));
    }
    let cert = CompatCertificate {
        omega: omega.element().clone(),
        pi: pi.element().clone(),
        h,
        trunc,
    };
    if !cert.verify(alg) {
        return Err(Error::Internal(
            "matched-polyvector certificate failed independent re-verification".into(),
        ));
    }
    Ok((pi, cert))
}

/// Transport a certificate along the scaling action: `omega` scales by
/// `lambda`, while weight-`i` polyvector components scale by
/// `lambda^(1-i)`.
pub fn scaled_certificate(
    g: &Generators,
    cert: &CompatCertificate,
    lambda: &Q,
) -> CompatCertificate {
    let scale_weights = |e: &Element| {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let w = m.pv_weight(g) as i64;
            let mut factor = q_int(1);
            if w >= 1 {
                for _ in 0..(w - 1) {
                    factor = factor / lambda.clone();
                }
            }
            out.add_term(m.clone(), c * factor);
        }
        out
    };
    CompatCertificate {
        omega: cert.omega.scale(lambda),
        pi: scale_weights(&cert.pi),
        h: scale_weights(&cert.h),
        trunc: cert.trunc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::element_string;
    use crate::gens::GeneratorSpec;
    use crate::mc::gauge_flow;

    fn classical() -> Algebra {
        let g = Generators::new(
            vec![GeneratorSpec::new("x", 0, 0, 1), GeneratorSpec::new("y", 0, 0, 1)],
            0,
        )
        .unwrap();
        Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap()
    }

    /// Q[x, xi] with |x| = 0 and |xi| = n (cochain for n >= 0, chain for
    /// n = -1), trivial differential.
    fn cotangent(n: i64) -> Algebra {
        let xi = match n {
            -1 => GeneratorSpec::new("xi", 1, 0, 1),
            k => GeneratorSpec::new("xi", 0, k, 1),
        };
        let g = Generators::new(vec![GeneratorSpec::new("x", 0, 0, 1), xi], n).unwrap();
        Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap()
    }

    fn xyxi() -> Algebra {
        let g = Generators::new(
            vec![
                GeneratorSpec::new("x", 0, 0, 1),
                GeneratorSpec::new("y", 0, 0, 1),
                GeneratorSpec::new("xi", 0, 1, 1),
            ],
            1,
        )
        .unwrap();
        Algebra::plain(g, vec![Element::zero(); 3]).unwrap()
    }

    fn gen_e(g: &Generators, kind: Kind, i: usize) -> Element {
        Element::gen(g.id(kind, i))
    }

    fn product(g: &Generators, parts: &[&Element]) -> Element {
        parts.iter().fold(Element::one(), |acc, p| mul_ref(g, &acc, p))
    }

    fn mul_ref(g: &Generators, a: &Element, b: &Element) -> Element {
        crate::element::mul(g, a, b)
    }

    #[test]
    fn mu_fixes_functions_and_contracts_one_forms() {
        let alg = classical();
        let g = alg.gens();
        let (x, y) = (gen_e(g, Kind::Algebra, 0), gen_e(g, Kind::Algebra, 1));
        let pi = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let f = product(g, &[&x, &x, &y]);
        assert_eq!(mu(&alg, &f, &pi).unwrap(), f);
        let df = de_rham_d(&alg, &f).unwrap();
        assert_eq!(mu(&alg, &df, &pi).unwrap(), schouten(g, &pi, &f).unwrap());
    }

    #[test]
    fn mu_orientation_pin() {
        // the convention: contracting dx*dy into pv_x*pv_y returns the
        // same polyvector with coefficient +1
        let alg = classical();
        let g = alg.gens();
        let pi = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        assert_eq!(mu(&alg, &omega, &pi).unwrap(), pi);
    }

    #[test]
    fn mu_respects_the_weight_filtration() {
        let alg = xyxi();
        let g = alg.gens();
        let pi = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 2)]);
        for p in 1..=3u32 {
            for m in crate::derham::kaehler_basis(g, p) {
                let img = mu(&alg, &Element::term(m, q_int(1)), &pi).unwrap();
                if !img.is_zero() {
                    assert!(img.terms().all(|(mm, _)| mm.pv_weight(g) >= p));
                }
            }
        }
    }

    #[test]
    fn nu_vanishes_on_functions_and_contracts_exact_forms() {
        let alg = classical();
        let g = alg.gens();
        let (x, y) = (gen_e(g, Kind::Algebra, 0), gen_e(g, Kind::Algebra, 1));
        let pi = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let b = product(g, &[&x, &gen_e(g, Kind::Poly, 1), &gen_e(g, Kind::Poly, 0)]);
        let f = product(g, &[&x, &y, &y]);
        assert!(nu(&alg, &f, &pi, &b).unwrap().is_zero());
        let df = de_rham_d(&alg, &f).unwrap();
        assert_eq!(nu(&alg, &df, &pi, &b).unwrap(), schouten(g, &b, &f).unwrap());
    }

    /// Exact extraction of the linear-in-`t` coefficient of a polynomial
    /// family of elements, via a Vandermonde solve.
    fn linear_coefficient(evals: &[Element]) -> Element {
        let n = evals.len();
        let mut v = QMatrix::zero(n, n);
        for t in 0..n {
            for k in 0..n {
                v.set(t, k, q_int((t as i64).pow(k as u32)));
            }
        }
        let inv = v.invert().expect("vandermonde");
        let mut out = Element::zero();
        for j in 0..n {
            out = out.add(&evals[j].scale(inv.get(1, j)));
        }
        out
    }

    #[test]
    fn nu_is_the_dual_number_coefficient_of_mu() {
        let alg = xyxi();
        let g = alg.gens();
        let (x, y) = (gen_e(g, Kind::Algebra, 0), gen_e(g, Kind::Algebra, 1));
        let (dx, dy, dxi) =
            (gen_e(g, Kind::Form, 0), gen_e(g, Kind::Form, 1), gen_e(g, Kind::Form, 2));
        let (px, py, pxi) =
            (gen_e(g, Kind::Poly, 0), gen_e(g, Kind::Poly, 1), gen_e(g, Kind::Poly, 2));
        let pi = product(g, &[&px, &pxi]).add(&product(g, &[&x, &py, &pxi]));
        let b = product(g, &[&y, &px, &pxi])
            .add(&product(g, &[&x, &x, &py, &pxi]));
        let omegas = [
            product(g, &[&dx, &dy]),
            product(g, &[&x, &dx, &dxi]),
            product(g, &[&dx, &dy, &dxi]),
            product(g, &[&y, &dy]).add(&product(g, &[&dx, &dy, &dxi]).scale(&q_ratio(2, 3))),
        ];
        for omega in &omegas {
            let evals: Vec<Element> = (0..=4)
                .map(|t| {
                    let shifted = pi.add(&b.scale(&q_int(t)));
                    mu(&alg, omega, &shifted).unwrap()
                })
                .collect();
            assert_eq!(
                linear_coefficient(&evals),
                nu(&alg, omega, &pi, &b).unwrap(),
                "dual-number expansion mismatch for {}",
                element_string(g, omega)
            );
        }
    }

    #[test]
    fn key_identities_hold_for_non_mc_structures() {
        let alg = xyxi();
        let g = alg.gens();
        let (x, y) = (gen_e(g, Kind::Algebra, 0), gen_e(g, Kind::Algebra, 1));
        let xi = gen_e(g, Kind::Algebra, 2);
        let (dx, dy, dxi) =
            (gen_e(g, Kind::Form, 0), gen_e(g, Kind::Form, 1), gen_e(g, Kind::Form, 2));
        let (px, py, pxi) =
            (gen_e(g, Kind::Poly, 0), gen_e(g, Kind::Poly, 1), gen_e(g, Kind::Poly, 2));
        let pis = [
            product(g, &[&px, &pxi]),
            product(g, &[&px, &pxi]).add(&product(g, &[&x, &x, &py, &pxi])),
            product(g, &[&y, &px, &pxi]).sub(&product(g, &[&x, &py, &pxi]).scale(&q_ratio(1, 2))),
        ];
        let omegas = [
            x.clone(),
            product(g, &[&xi, &dx]),
            product(g, &[&dx, &dy]),
            product(g, &[&x, &dx, &dy, &dxi]),
            product(g, &[&dx, &dxi]).add(&product(g, &[&y, &dy, &dxi])),
        ];
        for pi in &pis {
            // none of these are Maurer-Cartan: the identities must not care
            for omega in &omegas {
                let report = key_identity_check(&alg, omega, pi, 10).unwrap();
                assert!(
                    report.bracket_identity.exact,
                    "bracket identity failed at {:?}",
                    report.bracket_identity.mismatch
                );
                assert!(
                    report.differential_identity.exact,
                    "differential identity failed at {:?}",
                    report.differential_identity.mismatch
                );
            }
        }
    }

    #[test]
    fn compat_certifies_the_classical_pair_with_zero_homotopy() {
        let alg = classical();
        let g = alg.gens();
        let pi = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        let pi = Poisson::new(&alg, pi, 4).unwrap();
        let omega = PreSymplectic::new(&alg, omega, 4).unwrap();
        match compat_check(&alg, &omega, &pi, 3, 10_000).unwrap() {
            CompatOutcome::Certified(cert) => {
                assert!(cert.h.is_zero());
                assert!(cert.verify(&alg));
            }
            CompatOutcome::Blocked { .. } => panic!("classical pair must be compatible"),
        }
        // trivial pair
        let zero_pi = Poisson::new(&alg, Element::zero(), 4).unwrap();
        let zero_omega = PreSymplectic::new(&alg, Element::zero(), 4).unwrap();
        match compat_check(&alg, &zero_omega, &zero_pi, 3, 10_000).unwrap() {
            CompatOutcome::Certified(cert) => assert!(cert.h.is_zero()),
            _ => panic!("zero pair must be compatible"),
        }
    }

    #[test]
    fn doubled_form_is_blocked_with_class_pi() {
        let alg = classical();
        let g = alg.gens();
        let pi_e = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)])
            .scale(&q_int(2));
        let pi = Poisson::new(&alg, pi_e.clone(), 4).unwrap();
        let omega = PreSymplectic::new(&alg, omega, 4).unwrap();
        match compat_check(&alg, &omega, &pi, 3, 10_000).unwrap() {
            CompatOutcome::Blocked { weight, class, pairing, conclusive, .. } => {
                assert_eq!(weight, 2);
                assert_eq!(class, pi_e, "mu(2 omega, pi) - sigma(pi) = pi");
                assert!(!pairing.is_zero());
                assert!(conclusive);
            }
            CompatOutcome::Certified(_) => panic!("scaled pair cannot be compatible"),
        }
    }

    #[test]
    fn mc_precondition_reported_distinctly() {
        // an obstructed (non-MC) candidate from the chain family
        let g = Generators::new(
            vec![GeneratorSpec::chain_gen("x", 2), GeneratorSpec::chain_gen("xi", 1)],
            0,
        )
        .unwrap();
        let alg = Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap();
        let g = alg.gens();
        let u = product(
            g,
            &[
                &gen_e(g, Kind::Algebra, 0),
                &gen_e(g, Kind::Algebra, 1),
                &gen_e(g, Kind::Poly, 0),
                &gen_e(g, Kind::Poly, 1),
            ],
        );
        let v = product(g, &[&gen_e(g, Kind::Algebra, 0), &gen_e(g, Kind::Poly, 1), &gen_e(g, Kind::Poly, 1)]);
        let pi = Poisson::new(&alg, u.add(&v), 4).unwrap();
        assert!(!mc_defect(&alg, &pi).unwrap().is_zero());
        let omega = PreSymplectic::new(&alg, Element::zero(), 4).unwrap();
        match compat_check(&alg, &omega, &pi, 3, 10_000) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("Maurer-Cartan")),
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn nondeg_cotangent_is_a_signed_permutation() {
        let alg = cotangent(1);
        let g = alg.gens();
        let pi = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let pi = Poisson::new(&alg, pi, 4).unwrap();
        match nondeg_check(&alg, &pi, 3, 10_000).unwrap() {
            NondegOutcome::Invertible(cert) => {
                for (b, row) in cert.matrix.iter().enumerate() {
                    for (a, entry) in row.iter().enumerate() {
                        if a == b {
                            assert!(entry.is_zero());
                        } else {
                            let c = entry.coeff(&Monomial::one());
                            assert_eq!(c.clone() * c, q_int(1), "entry must be a sign");
                        }
                    }
                }
                assert!(check::verify_inverse_substitutions(
                    g,
                    &cert.forward,
                    &cert.inverse,
                    cert.poly_cap
                ));
            }
            other => panic!("cotangent anchor must be invertible, got {other:?}"),
        }
    }

    #[test]
    fn nondeg_zero_is_degenerate() {
        let alg = classical();
        let pi = Poisson::new(&alg, Element::zero(), 4).unwrap();
        match nondeg_check(&alg, &pi, 3, 10_000).unwrap() {
            NondegOutcome::Degenerate { .. } => {}
            other => panic!("zero polyvector must be degenerate, got {other:?}"),
        }
    }

    #[test]
    fn nondeg_series_inverse_with_function_entries() {
        // |x| = 1, |y| = 2, shift 3: pv_y has even degree 2, so the
        // correction term x*pv_y^2 survives
        let g = Generators::new(
            vec![GeneratorSpec::new("x", 0, 1, 1), GeneratorSpec::new("y", 0, 2, 1)],
            3,
        )
        .unwrap();
        let alg = Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap();
        let g = alg.gens();
        let (x, px, py) =
            (gen_e(g, Kind::Algebra, 0), gen_e(g, Kind::Poly, 0), gen_e(g, Kind::Poly, 1));
        // anchor matrix [[0, 1], [-1, x]] up to sign conventions
        let pi = product(g, &[&px, &py]).add(&product(g, &[&x, &py, &py]).scale(&q_ratio(1, 2)));
        assert_eq!(pi.num_terms(), 2, "the correction term must survive");
        let pi = Poisson::new(&alg, pi, 4).unwrap();
        match nondeg_check(&alg, &pi, 4, 10_000).unwrap() {
            NondegOutcome::Invertible(cert) => {
                let nonconstant = cert
                    .inverse_matrix
                    .iter()
                    .flatten()
                    .any(|e| e.terms().any(|(m, _)| !m.is_one()));
                assert!(nonconstant, "inverse must pick up function entries");
                assert!(check::verify_inverse_substitutions(
                    g,
                    &cert.forward,
                    &cert.inverse,
                    cert.poly_cap
                ));
            }
            other => panic!("expected invertible anchor, got {other:?}"),
        }
    }

    #[test]
    fn nondeg_multiplication_by_x_is_degenerate() {
        let alg = classical();
        let g = alg.gens();
        let (x, px, py) =
            (gen_e(g, Kind::Algebra, 0), gen_e(g, Kind::Poly, 0), gen_e(g, Kind::Poly, 1));
        let pi = Poisson::new(&alg, product(g, &[&x, &px, &py]), 4).unwrap();
        match nondeg_check(&alg, &pi, 3, 10_000).unwrap() {
            NondegOutcome::Degenerate { witness } => {
                assert!(witness.contains("cone"), "witness: {witness}");
            }
            other => panic!("x * pv_x * pv_y must be degenerate, got {other:?}"),
        }
    }

    #[test]
    fn nondeg_cone_route_certifies_contractible_case() {
        // delta x = xi contracts the algebra; any nonzero anchor between
        // the two acyclic complexes is a quasi-isomorphism even though it
        // has no strict inverse
        let g = Generators::new(
            vec![GeneratorSpec::chain_gen("x", 2), GeneratorSpec::chain_gen("xi", 1)],
            0,
        )
        .unwrap();
        let xi = Element::gen(g.id(Kind::Algebra, 1));
        let alg = Algebra::plain(g, vec![xi, Element::zero()]).unwrap();
        let g = alg.gens();
        let pi = product(
            g,
            &[
                &gen_e(g, Kind::Algebra, 0),
                &gen_e(g, Kind::Algebra, 1),
                &gen_e(g, Kind::Poly, 0),
                &gen_e(g, Kind::Poly, 1),
            ],
        );
        let pi = Poisson::new(&alg, pi, 4).unwrap();
        assert!(mc_defect(&alg, &pi).unwrap().is_zero(), "the flat instance is Maurer-Cartan");
        match nondeg_check(&alg, &pi, 3, 10_000).unwrap() {
            NondegOutcome::ConeAcyclic(pieces) => {
                assert!(!pieces.is_empty());
                assert!(pieces.iter().all(|p| p.betti == 0));
            }
            other => panic!("expected the cone certificate, got {other:?}"),
        }
    }

    #[test]
    fn tangent_cones_acyclic_for_corpus_pairs() {
        let alg = classical();
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega2 = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        for p in [1, 2] {
            let report = tangent_cone_report(&alg, &omega2, &pi2, p, 3, 10_000).unwrap();
            assert!(report.all_acyclic, "tangent cone fails at weight {p}");
            assert!(!report.pieces.is_empty());
        }
        // odd polyvector generators cap the weight at two, so higher
        // reports are vacuous here
        for p in [3, 4] {
            let report = tangent_cone_report(&alg, &omega2, &pi2, p, 3, 10_000).unwrap();
            assert!(report.all_acyclic);
            assert!(report.pieces.is_empty());
        }
        // even polyvector generators populate every weight
        let alg = odd_cotangent();
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega2 = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        for p in [2, 3, 4] {
            let report = tangent_cone_report(&alg, &omega2, &pi2, p, 3, 10_000).unwrap();
            assert!(report.all_acyclic, "tangent cone fails at weight {p}");
            assert!(!report.pieces.is_empty(), "weight-{p} pieces must be populated");
        }
    }

    #[test]
    fn tangent_cone_with_zero_pi_and_nonzero_omega() {
        let alg = classical();
        let g = alg.gens();
        let omega2 = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        // nu vanishes, the operator is -(p-1) id: invertible for p != 1
        let report = tangent_cone_report(&alg, &omega2, &Element::zero(), 3, 3, 10_000).unwrap();
        assert!(report.all_acyclic);
    }

    #[test]
    fn nu_anchor_identity_on_corpus_pairs() {
        let alg = classical();
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega2 = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        assert!(nu_anchor_identity(&alg, &omega2, &pi2).unwrap());
        let alg = cotangent(2);
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let omega2 = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
        assert!(nu_anchor_identity(&alg, &omega2, &pi2).unwrap());
    }

    #[test]
    fn conversion_round_trips_on_cotangent_families() {
        for n in [-1i64, 0, 1, 2] {
            let alg = cotangent(n);
            let g = alg.gens();
            let pi_e = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
            let pi = Poisson::new(&alg, pi_e.clone(), 4).unwrap();
            let (omega, cert) = poisson_to_symplectic(&alg, &pi, 3, 10_000).unwrap();
            assert!(cert.h.is_zero(), "cotangent pairs need no homotopy (n = {n})");
            assert!(cert.verify(&alg));
            let expected = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)]);
            let got = omega.element().clone();
            assert!(
                got == expected || got == expected.neg(),
                "omega must be ±dx*dxi, got {} (n = {n})",
                element_string(g, &got)
            );
            let (back, cert2) = symplectic_to_poisson(&alg, &omega, 3, 10_000).unwrap();
            assert_eq!(back.element(), &pi_e, "round trip must return pi (n = {n})");
            assert!(cert2.verify(&alg));
        }
    }

    #[test]
    fn conversion_round_trip_classical_two_dim() {
        let g = Generators::new(
            vec![
                GeneratorSpec::new("x1", 0, 0, 1),
                GeneratorSpec::new("y1", 0, 0, 1),
                GeneratorSpec::new("x2", 0, 0, 1),
                GeneratorSpec::new("y2", 0, 0, 1),
            ],
            0,
        )
        .unwrap();
        let alg = Algebra::plain(g, vec![Element::zero(); 4]).unwrap();
        let g = alg.gens();
        let omega_e = product(g, &[&gen_e(g, Kind::Form, 0), &gen_e(g, Kind::Form, 1)])
            .add(&product(g, &[&gen_e(g, Kind::Form, 2), &gen_e(g, Kind::Form, 3)]));
        let omega = PreSymplectic::new(&alg, omega_e.clone(), 4).unwrap();
        let (pi, cert) = symplectic_to_poisson(&alg, &omega, 2, 10_000).unwrap();
        assert!(cert.verify(&alg));
        assert_eq!(pi.element().num_terms(), 2, "block inverse has two terms");
        let (omega_back, cert2) = poisson_to_symplectic(&alg, &pi, 2, 10_000).unwrap();
        assert_eq!(omega_back.element(), &omega_e);
        assert!(cert2.verify(&alg));
    }

    /// Odd cotangent pair: |x| = 1, |xi| = 3, shift 4.  Here `pv_xi` is
    /// even, so the gauge direction `x * pv_xi^2` is a nonzero weight-2
    /// element of gauge degree 5.
    fn odd_cotangent() -> Algebra {
        let g = Generators::new(
            vec![GeneratorSpec::new("x", 0, 1, 1), GeneratorSpec::new("xi", 0, 3, 1)],
            4,
        )
        .unwrap();
        Algebra::plain(g, vec![Element::zero(), Element::zero()]).unwrap()
    }

    #[test]
    fn conversion_follows_gauge_perturbations() {
        // perturb the cotangent structure by an exact weight-3 piece and
        // check the matched form keeps its weight-2 component
        let alg = odd_cotangent();
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let base = Poisson::new(&alg, pi2.clone(), 4).unwrap();
        let lambda = product(g, &[&gen_e(g, Kind::Algebra, 0), &gen_e(g, Kind::Poly, 1), &gen_e(g, Kind::Poly, 1)]);
        let (_, perturbed) = gauge_flow(&alg, &base, &lambda).unwrap();
        assert_ne!(perturbed.element(), &pi2, "the flow must move the structure");
        assert!(mc_defect(&alg, &perturbed).unwrap().is_zero());
        let (omega_base, _) = poisson_to_symplectic(&alg, &base, 3, 10_000).unwrap();
        let (omega_pert, cert) = poisson_to_symplectic(&alg, &perturbed, 3, 10_000).unwrap();
        assert!(cert.verify(&alg));
        assert_eq!(
            omega_pert.element().form_part(g, 2),
            omega_base.element().form_part(g, 2),
            "weight-2 component is gauge invariant"
        );
    }

    #[test]
    fn scaling_transports_certificates() {
        let alg = odd_cotangent();
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        let base = Poisson::new(&alg, pi2, 4).unwrap();
        let lambda = product(g, &[&gen_e(g, Kind::Algebra, 0), &gen_e(g, Kind::Poly, 1), &gen_e(g, Kind::Poly, 1)]);
        let (_, perturbed) = gauge_flow(&alg, &base, &lambda).unwrap();
        let (_, cert) = poisson_to_symplectic(&alg, &perturbed, 3, 10_000).unwrap();
        for lam in [q_int(2), q_ratio(-3, 2), q_int(1)] {
            let scaled = scaled_certificate(g, &cert, &lam);
            assert!(scaled.verify(&alg), "scaled certificate fails at {lam}");
            let scaled_pi = Poisson::new(&alg, scaled.pi.clone(), 4).unwrap();
            assert!(mc_defect(&alg, &scaled_pi).unwrap().is_zero());
        }
    }

    #[test]
    fn gr_mu_is_an_isomorphism_per_piece_for_nondegenerate_pi() {
        let alg = classical();
        let g = alg.gens();
        let pi2 = product(g, &[&gen_e(g, Kind::Poly, 0), &gen_e(g, Kind::Poly, 1)]);
        for p in [1u32, 2] {
            for pw in 0..=3u32 {
                let forms = weight_pw_form_basis(g, p, pw);
                if forms.is_empty() {
                    continue;
                }
                let polys = weight_pw_basis(g, p, pw, 10_000).unwrap();
                let flat: Vec<Monomial> =
                    polys.values().flat_map(|v| v.iter().cloned()).collect();
                assert_eq!(forms.len(), flat.len(), "piece dims must match");
                let mut sorted = flat.clone();
                sorted.sort();
                let cols: Vec<Vec<Q>> = forms
                    .iter()
                    .map(|m| {
                        let img = mu(&alg, &Element::term(m.clone(), q_int(1)), &pi2).unwrap();
                        element_vector(&sorted, &img).unwrap()
                    })
                    .collect();
                let mat = QMatrix::from_columns(sorted.len(), cols);
                assert_eq!(mat.rank(), sorted.len(), "gr mu must be invertible");
            }
        }
    }

    /// Form monomials of exact form degree and exact polynomial weight
    /// (test-local enumeration; even pw-0 generators are absent here).
    fn weight_pw_form_basis(g: &Generators, p: u32, pw: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let coeffs = enumerate(g, &Piece::coefficients(pw), 100_000).unwrap();
        for c in coeffs {
            if c.poly_weight(g) != pw {
                continue;
            }
            for f in crate::derham::kaehler_basis(g, p) {
                let mut factors = c.0.clone();
                factors.extend(f.0.iter().cloned());
                out.push(Monomial(factors));
            }
        }
        out.sort();
        out
    }

}
