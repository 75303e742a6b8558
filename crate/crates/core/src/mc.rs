//! Maurer–Cartan towers: obstruction classes, weight-by-weight lifting and
//! gauge equivalence of truncated Poisson structures.
//!
//! Everything here reduces to exact linear algebra over the rationals in
//! finite graded pieces.  Solvers return either an explicit solution or a
//! *certificate of unsolvability*: a linear functional that annihilates the
//! image of the relevant differential but not the right-hand side.  Each
//! certificate is re-verified through the independent implementations in
//! [`crate::check`] before it is handed out.

use std::collections::BTreeSet;

use crate::algebra::Algebra;
use crate::basis::{enumerate, Piece};
use crate::check;
use crate::element::{Element, Monomial};
use crate::error::{Error, Result};
use crate::gens::{Generators, Kind};
use crate::linalg::QMatrix;
use crate::polyvector::{
    mc_defect, schouten, truncate_weight, Poisson,
};
use crate::q::{q_int, q_ratio, Q};
use num_traits::Zero;

/// `[delta, -]` restricted to a finite list of domain monomials, as an
/// explicit matrix.  The codomain basis is the union of all monomials
/// occurring in the images and in the extra elements supplied (so that
/// right-hand sides can always be expressed).
pub struct BracketMap {
    pub domain: Vec<Monomial>,
    pub codomain: Vec<Monomial>,
    pub matrix: QMatrix,
}

/// Monomial basis of the polyvector piece of the given weight and total
/// degree with coefficient polynomial weight at most `poly_cap`.
pub fn piece_basis(
    g: &Generators,
    weight: u32,
    total_deg: i64,
    poly_cap: u32,
    cap: usize,
) -> Result<Vec<Monomial>> {
    enumerate(g, &Piece::polyvectors(weight, total_deg, poly_cap), cap)
}

pub fn bracket_map(alg: &Algebra, domain: &[Monomial], extra: &[&Element]) -> Result<BracketMap> {
    let g = alg.gens();
    let hat = alg.lifted_differential();
    let mut images = Vec::with_capacity(domain.len());
    let mut codomain_set: BTreeSet<Monomial> = BTreeSet::new();
    for m in domain {
        let img = schouten(g, &hat, &Element::term(m.clone(), q_int(1)))?;
        for (mm, _) in img.terms() {
            codomain_set.insert(mm.clone());
        }
        images.push(img);
    }
    for e in extra {
        for (mm, _) in e.terms() {
            codomain_set.insert(mm.clone());
        }
    }
    let codomain: Vec<Monomial> = codomain_set.into_iter().collect();
    let index = |m: &Monomial| codomain.binary_search(m).expect("codomain closed");
    let mut cols = Vec::with_capacity(domain.len());
    for img in &images {
        let mut col = vec![Q::from_integer(0.into()); codomain.len()];
        for (mm, c) in img.terms() {
            col[index(mm)] = c.clone();
        }
        cols.push(col);
    }
    Ok(BracketMap {
        domain: domain.to_vec(),
        codomain: codomain.clone(),
        matrix: QMatrix::from_columns(codomain.len(), cols),
    })
}

fn to_vector(e: &Element, codomain: &[Monomial]) -> Result<Vec<Q>> {
    let mut v = vec![Q::from_integer(0.into()); codomain.len()];
    for (m, c) in e.terms() {
        let i = codomain
            .binary_search(m)
            .map_err(|_| Error::Internal("element outside codomain".into()))?;
        v[i] = c.clone();
    }
    Ok(v)
}

/// Outcome of a linear solve in a graded piece.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solution(Element),
    /// No solution with coefficients of polynomial weight within the cap.
    /// `functional` pairs to zero with every image of the differential and
    /// to `pairing != 0` with the right-hand side.  When `conclusive` is
    /// set, the differential is weight-homogeneous and the certificate
    /// rules out solutions of arbitrary polynomial weight as well.
    Obstructed {
        functional: Vec<(Monomial, Q)>,
        pairing: Q,
        conclusive: bool,
    },
}

/// True when every internal differential value is homogeneous of the same
/// polynomial weight as its generator; graded pieces are then stable under
/// the differential and capped certificates are absolute.
pub fn pw_homogeneous(alg: &Algebra) -> bool {
    let g = alg.gens();
    (0..g.len()).all(|i| {
        let target = g.poly_weight(g.id(Kind::Algebra, i));
        alg.total_value(i)
            .terms()
            .all(|(m, _)| m.poly_weight(g) == target)
    })
}

/// Solve `[delta, x] = rhs` for `x` in the (weight, degree) piece with
/// polynomial weight at most `poly_cap`.
pub fn solve_bracket_equation(
    alg: &Algebra,
    weight: u32,
    degree: i64,
    poly_cap: u32,
    cap: usize,
    rhs: &Element,
) -> Result<SolveOutcome> {
    let g = alg.gens();
    let domain = piece_basis(g, weight, degree, poly_cap, cap)?;
    let map = bracket_map(alg, &domain, &[rhs])?;
    let b = to_vector(rhs, &map.codomain)?;
    match map.matrix.solve(&b) {
        Ok(x) => {
            let mut sol = Element::zero();
            for (j, m) in map.domain.iter().enumerate() {
                if !x[j].is_zero() {
                    sol.add_term(m.clone(), x[j].clone());
                }
            }
            // re-verify through the independent bracket
            let hat = check::oracle_lifted_differential(alg);
            if check::oracle_schouten(g, &hat, &sol).sub(rhs) != Element::zero() {
                return Err(Error::Internal("solution failed oracle re-verification".into()));
            }
            Ok(SolveOutcome::Solution(sol))
        }
        Err(phi) => {
            let functional: Vec<(Monomial, Q)> = map
                .codomain
                .iter()
                .cloned()
                .zip(phi.iter().cloned())
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let pairing: Q = functional
                .iter()
                .map(|(m, c)| c * rhs.coeff(m))
                .fold(Q::from_integer(0.into()), |a, b| a + b);
            if pairing.is_zero() {
                return Err(Error::Internal("vacuous unsolvability certificate".into()));
            }
            if !check::verify_unsolvability(alg, &map.domain, &functional) {
                return Err(Error::Internal("certificate failed oracle re-verification".into()));
            }
            let conclusive =
                pw_homogeneous(alg) && rhs.max_poly_weight(g) <= poly_cap;
            Ok(SolveOutcome::Obstructed { functional, pairing, conclusive })
        }
    }
}

/// The obstruction class of a truncated Maurer–Cartan structure: with
/// `kappa(pi) = 0` below the truncation `W`, the next defect component is
/// `o = 1/2 [pi, pi]_W`, and `[delta, o] = 0` identically.
pub struct ObstructionClass {
    pub weight: u32,
    pub class: Element,
    pub cocycle_checked: bool,
}

pub fn obstruction_class(alg: &Algebra, pi: &Poisson) -> Result<ObstructionClass> {
    let g = alg.gens();
    if !mc_defect(alg, pi)?.is_zero() {
        return Err(Error::Precondition(
            "structure does not satisfy the Maurer-Cartan equation below its truncation".into(),
        ));
    }
    let w = pi.trunc();
    let sq = schouten(g, pi.element(), pi.element())?;
    let class = sq.scale(&q_ratio(1, 2)).weight_part(g, w);
    // cocycle property, checked exactly through both bracket implementations
    let lin = crate::polyvector::delta_bracket(alg, &class)?;
    let hat = check::oracle_lifted_differential(alg);
    let lin2 = check::oracle_schouten(g, &hat, &class);
    if !lin.is_zero() || !lin2.is_zero() {
        return Err(Error::Internal("obstruction class is not a cocycle".into()));
    }
    Ok(ObstructionClass { weight: w, class, cocycle_checked: true })
}

/// One step of the lifting tower: try to extend `pi` (Maurer–Cartan below
/// weight `W`) by a weight-`W` correction killing the obstruction.
pub struct LiftReport {
    pub obstruction: ObstructionClass,
    pub outcome: SolveOutcome,
    /// The extended structure, truncated at `W + 1`, when lifting succeeds.
    pub lifted: Option<Poisson>,
}

pub fn lift_step(alg: &Algebra, pi: &Poisson, poly_cap: u32, cap: usize) -> Result<LiftReport> {
    let g = alg.gens();
    let ob = obstruction_class(alg, pi)?;
    let outcome = solve_bracket_equation(
        alg,
        ob.weight,
        g.shift() + 2,
        poly_cap,
        cap,
        &ob.class.neg(),
    )?;
    let lifted = match &outcome {
        SolveOutcome::Solution(x) => {
            let ext = Poisson::new(alg, pi.element().add(x), pi.trunc() + 1)?;
            if !mc_defect(alg, &ext)?.is_zero() {
                return Err(Error::Internal("lift failed the extended MC equation".into()));
            }
            Some(ext)
        }
        SolveOutcome::Obstructed { .. } => None,
    };
    Ok(LiftReport { obstruction: ob, outcome, lifted })
}

/// A polynomial gauge path `P(t) + lambda dt` with `P(t) = sum path[k] t^k`:
/// `P` solves `dP/dt = [delta + P, lambda]` with `P(0)` the starting
/// structure, modulo the weight truncation.
#[derive(Clone, Debug)]
pub struct GaugeHomotopy {
    pub path: Vec<Element>,
    pub lambda: Element,
    pub trunc: u32,
}

impl GaugeHomotopy {
    pub fn start(&self) -> Element {
        self.path.first().cloned().unwrap_or_else(Element::zero)
    }

    pub fn end(&self) -> Element {
        let mut out = Element::zero();
        for e in &self.path {
            out = out.add(e);
        }
        out
    }
}

/// Integrate the gauge flow generated by `lambda` from `start`.  `lambda`
/// must be a polyvector-element of total degree `n + 1` concentrated in
/// weights at least 2; the flow then raises weight and the path is a
/// polynomial in `t` of degree at most the truncation.
pub fn gauge_flow(
    alg: &Algebra,
    start: &Poisson,
    lambda: &Element,
) -> Result<(GaugeHomotopy, Poisson)> {
    let g = alg.gens();
    let w = start.trunc();
    lambda.check_kinds(g, &[Kind::Algebra, Kind::Poly])?;
    if let Some(d) = lambda.homogeneous_deg(g)? {
        if d != g.shift() + 1 {
            return Err(Error::Precondition(format!(
                "gauge generator must have total degree {}, got {d}",
                g.shift() + 1
            )));
        }
    }
    if lambda.terms().any(|(m, _)| m.pv_weight(g) < 2) {
        return Err(Error::Precondition(
            "gauge generator must lie in filtration weight at least 2".into(),
        ));
    }
    let lambda = truncate_weight(g, lambda, w);
    let hat = alg.lifted_differential();
    let mut path = vec![start.element().clone()];
    loop {
        let k = path.len() - 1;
        let mut next = schouten(g, &path[k], &lambda)?;
        if k == 0 {
            next = next.add(&schouten(g, &hat, &lambda)?);
        }
        let next = truncate_weight(g, &next, w).scale(&q_ratio(1, k as i64 + 1));
        if next.is_zero() {
            break;
        }
        if path.len() > w as usize + 2 {
            return Err(Error::Internal("gauge flow failed to terminate".into()));
        }
        path.push(next);
    }
    let homotopy = GaugeHomotopy { path, lambda: lambda.clone(), trunc: w };
    let end = Poisson::new(alg, homotopy.end(), w)?;
    if !check::verify_gauge_path(
        alg,
        &homotopy.path,
        &homotopy.lambda,
        start.element(),
        end.element(),
        w,
    ) {
        return Err(Error::Internal("gauge path failed oracle re-verification".into()));
    }
    Ok((homotopy, end))
}

/// Basis of the kernel of `[delta, -]` on a graded piece, as elements.
pub fn kernel_basis(
    alg: &Algebra,
    weight: u32,
    degree: i64,
    poly_cap: u32,
    cap: usize,
) -> Result<Vec<Element>> {
    let basis = piece_basis(alg.gens(), weight, degree, poly_cap, cap)?;
    let map = bracket_map(alg, &basis, &[])?;
    Ok(map
        .matrix
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut e = Element::zero();
            for (j, m) in basis.iter().enumerate() {
                if !v[j].is_zero() {
                    e.add_term(m.clone(), v[j].clone());
                }
            }
            e
        })
        .collect())
}

/// Outcome of a gauge-equivalence test.
pub enum GaugeOutcome {
    /// A chain of verified homotopies carrying `a` onto `b`.
    Equivalent { chain: Vec<GaugeHomotopy> },
    /// The structures differ at `weight` by a class that no gauge in the
    /// search slice removes.  At weight 2 the difference class is a gauge
    /// invariant and a conclusive certificate settles inequivalence; at
    /// higher weights the verdict is relative to lower-weight choices.
    Distinct {
        weight: u32,
        functional: Vec<(Monomial, Q)>,
        pairing: Q,
        conclusive: bool,
    },
}

/// Attempt to clear the weight-`w` difference using a flow generated in
/// weight `w - 1` by a kernel element (which leaves weights `< w` fixed and
/// acts on weight `w` through `[P, -]`), combined with an exact weight-`w`
/// gauge.  Returns the kernel generator to flow by, if the joint system is
/// solvable.
fn kernel_gauge_step(
    alg: &Algebra,
    current: &Poisson,
    diff: &Element,
    w: u32,
    poly_cap: u32,
    cap: usize,
) -> Result<Option<Element>> {
    let g = alg.gens();
    let lam_basis = piece_basis(g, w, g.shift() + 1, poly_cap, cap)?;
    let kern = kernel_basis(alg, w - 1, g.shift() + 1, poly_cap, cap)?;
    if kern.is_empty() {
        return Ok(None);
    }
    let hat = alg.lifted_differential();
    let mut images: Vec<Element> = Vec::new();
    for m in &lam_basis {
        images.push(schouten(g, &hat, &Element::term(m.clone(), q_int(1)))?);
    }
    for k in &kern {
        images.push(schouten(g, current.element(), k)?.weight_part(g, w));
    }
    let mut codomain_set: BTreeSet<Monomial> = BTreeSet::new();
    for e in images.iter().chain(std::iter::once(diff)) {
        for (m, _) in e.terms() {
            codomain_set.insert(m.clone());
        }
    }
    let codomain: Vec<Monomial> = codomain_set.into_iter().collect();
    let cols: Vec<Vec<Q>> = images
        .iter()
        .map(|e| {
            let mut col = vec![Q::from_integer(0.into()); codomain.len()];
            for (m, c) in e.terms() {
                col[codomain.binary_search(m).expect("closed")] = c.clone();
            }
            col
        })
        .collect();
    let matrix = QMatrix::from_columns(codomain.len(), cols);
    let b = to_vector(diff, &codomain)?;
    match matrix.solve(&b) {
        Err(_) => Ok(None),
        Ok(sol) => {
            let mut kappa = Element::zero();
            for (j, k) in kern.iter().enumerate() {
                let c = &sol[lam_basis.len() + j];
                if !c.is_zero() {
                    kappa = kappa.add(&k.scale(c));
                }
            }
            Ok(Some(kappa))
        }
    }
}

/// Decide gauge equivalence weight by weight.  Both structures must share
/// the same truncation and satisfy the Maurer–Cartan equation.
pub fn gauge_equivalent(
    alg: &Algebra,
    a: &Poisson,
    b: &Poisson,
    poly_cap: u32,
    cap: usize,
) -> Result<GaugeOutcome> {
    let g = alg.gens();
    if a.trunc() != b.trunc() {
        return Err(Error::Precondition("truncations differ".into()));
    }
    for (label, s) in [("first", a), ("second", b)] {
        if !mc_defect(alg, s)?.is_zero() {
            return Err(Error::Precondition(format!(
                "{label} structure does not satisfy the Maurer-Cartan equation"
            )));
        }
    }
    let w = a.trunc();
    let mut current = a.clone();
    let mut chain = Vec::new();
    for weight in 2..w {
        let mut diff = b.element().sub(current.element()).weight_part(g, weight);
        if diff.is_zero() {
            continue;
        }
        // weight w - 1 kernel flows act on weight w without disturbing
        // anything below; try them when the exact solve fails
        let mut attempt =
            solve_bracket_equation(alg, weight, g.shift() + 1, poly_cap, cap, &diff)?;
        if matches!(attempt, SolveOutcome::Obstructed { .. }) && weight >= 3 {
            if let Some(kappa) = kernel_gauge_step(alg, &current, &diff, weight, poly_cap, cap)? {
                if !kappa.is_zero() {
                    let (homotopy, end) = gauge_flow(alg, &current, &kappa)?;
                    chain.push(homotopy);
                    current = end;
                    diff = b.element().sub(current.element()).weight_part(g, weight);
                }
                if diff.is_zero() {
                    continue;
                }
                attempt =
                    solve_bracket_equation(alg, weight, g.shift() + 1, poly_cap, cap, &diff)?;
            }
        }
        match attempt {
            SolveOutcome::Solution(lambda) => {
                let (homotopy, end) = gauge_flow(alg, &current, &lambda)?;
                chain.push(homotopy);
                current = end;
            }
            SolveOutcome::Obstructed { functional, pairing, conclusive } => {
                return Ok(GaugeOutcome::Distinct {
                    weight,
                    functional,
                    pairing,
                    conclusive: conclusive && weight == 2,
                });
            }
        }
    }
    if current.element() != b.element() {
        return Err(Error::Internal("gauge recursion left a residue".into()));
    }
    Ok(GaugeOutcome::Equivalent { chain })
}

/// Dimensions of a graded piece of the weight-graded complex: the
/// cohomology of `[delta, -]` in (weight, degree), with coefficients of
/// polynomial weight at most `poly_cap`.
pub struct PieceCohomology {
    pub weight: u32,
    pub degree: i64,
    pub dim: usize,
    pub cycles: usize,
    pub boundaries: usize,
}

impl PieceCohomology {
    pub fn betti(&self) -> usize {
        self.cycles - self.boundaries
    }
}

pub fn piece_cohomology(
    alg: &Algebra,
    weight: u32,
    degree: i64,
    poly_cap: u32,
    cap: usize,
) -> Result<PieceCohomology> {
    let g = alg.gens();
    let here = piece_basis(g, weight, degree, poly_cap, cap)?;
    let below = piece_basis(g, weight, degree - 1, poly_cap, cap)?;
    let out_map = bracket_map(alg, &here, &[])?;
    let in_map = bracket_map(alg, &below, &[])?;
    let dim = here.len();
    let rank_out = out_map.matrix.rank();
    let rank_in = in_map.matrix.rank();
    Ok(PieceCohomology {
        weight,
        degree,
        dim,
        cycles: dim - rank_out,
        boundaries: rank_in,
    })
}
