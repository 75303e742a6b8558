//! Finite bases of graded pieces.
//!
//! Pieces are cut out by polyvector weight / form degree / total degree
//! with algebra coefficients bounded by the auxiliary polynomial weight.
//! Enumeration is deterministic (canonical monomial order) and guarded by
//! a size cap.

use crate::element::Monomial;
use crate::error::{Error, Result};
use crate::gens::{GenId, Generators, Kind};

pub const DEFAULT_BASIS_CAP: usize = 20_000;

/// Cap from `WORKBENCH_BASIS_CAP`, falling back to the default.
pub fn basis_cap_from_env() -> usize {
    std::env::var("WORKBENCH_BASIS_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_BASIS_CAP)
}

/// Description of a graded piece to enumerate.
#[derive(Clone, Debug)]
pub struct Piece {
    /// Exact number of `pv_` factors, if polyvector duals are allowed.
    pub pv_weight: Option<u32>,
    /// Exact number of one-form factors, if one-forms are allowed.
    pub form_deg: Option<u32>,
    /// Exact total cochain degree, if constrained.
    pub total_deg: Option<i64>,
    /// Bound on the polynomial weight of the algebra part.
    pub poly_weight_cap: u32,
}

impl Piece {
    pub fn polyvectors(weight: u32, total_deg: i64, poly_weight_cap: u32) -> Self {
        Piece {
            pv_weight: Some(weight),
            form_deg: None,
            total_deg: Some(total_deg),
            poly_weight_cap,
        }
    }

    pub fn forms(p: u32, total_deg: i64, poly_weight_cap: u32) -> Self {
        Piece { pv_weight: None, form_deg: Some(p), total_deg: Some(total_deg), poly_weight_cap }
    }

    pub fn coefficients(poly_weight_cap: u32) -> Self {
        Piece { pv_weight: None, form_deg: None, total_deg: None, poly_weight_cap }
    }

    fn describe(&self) -> String {
        format!(
            "piece(pv={:?}, form={:?}, deg={:?}, pw<={})",
            self.pv_weight, self.form_deg, self.total_deg, self.poly_weight_cap
        )
    }
}

/// Enumerate the monomial basis of a piece in canonical order.
pub fn enumerate(g: &Generators, piece: &Piece, cap: usize) -> Result<Vec<Monomial>> {
    let mut ids: Vec<GenId> = g.iter_ids(Kind::Algebra).collect();
    if piece.form_deg.is_some() {
        ids.extend(g.iter_ids(Kind::Form));
    }
    if piece.pv_weight.is_some() {
        ids.extend(g.iter_ids(Kind::Poly));
    }
    for &id in &ids {
        if g.kind(id) == Kind::Algebra && !g.odd(id) && g.poly_weight(id) == 0 {
            return Err(Error::Unsupported(format!(
                "even generator `{}` has polynomial weight 0; pieces over it are infinite-dimensional",
                g.token(id)
            )));
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<(GenId, u32)> = Vec::new();
    enum_rec(
        g,
        piece,
        &ids,
        0,
        piece.poly_weight_cap,
        piece.form_deg.unwrap_or(0),
        piece.pv_weight.unwrap_or(0),
        &mut cur,
        &mut out,
        cap,
    )?;
    out.retain(|m| match piece.total_deg {
        Some(d) => m.total_deg(g) == d,
        None => true,
    });
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enum_rec(
    g: &Generators,
    piece: &Piece,
    ids: &[GenId],
    i: usize,
    pw_left: u32,
    form_left: u32,
    pv_left: u32,
    cur: &mut Vec<(GenId, u32)>,
    out: &mut Vec<Monomial>,
    cap: usize,
) -> Result<()> {
    if i == ids.len() {
        if form_left == 0 && pv_left == 0 {
            if out.len() >= cap {
                return Err(Error::BasisCapExceeded {
                    piece: piece.describe(),
                    size: out.len() + 1,
                    cap,
                });
            }
            out.push(Monomial(cur.clone()));
        }
        return Ok(());
    }
    let id = ids[i];
    let budget = match g.kind(id) {
        Kind::Algebra => {
            let pw = g.poly_weight(id);
            if pw == 0 {
                1 // odd generator of weight 0: exponent at most 1 anyway
            } else {
                pw_left / pw
            }
        }
        Kind::Form => form_left,
        Kind::Poly => pv_left,
    };
    let max_e = if g.odd(id) { budget.min(1) } else { budget };
    for e in 0..=max_e {
        if e > 0 {
            cur.push((id, e));
        }
        let (pw2, f2, pv2) = match g.kind(id) {
            Kind::Algebra => (pw_left - e * g.poly_weight(id), form_left, pv_left),
            Kind::Form => (pw_left, form_left - e, pv_left),
            Kind::Poly => (pw_left, form_left, pv_left - e),
        };
        enum_rec(g, piece, ids, i + 1, pw2, f2, pv2, cur, out, cap)?;
        if e > 0 {
            cur.pop();
        }
    }
    Ok(())
}
