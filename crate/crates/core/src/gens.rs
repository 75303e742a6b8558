//! Generator tables for free graded-commutative algebras.
//!
//! This is the single place where the sign and degree conventions live.
//! Every generator `x` declared by the user carries a bidegree
//! `(chain, cochain)` with both components non-negative.  Two derived
//! generators exist for each `x` and are never declared independently:
//!
//! * the one-form `dx` with the same bidegree as `x`, plus form degree 1;
//! * the polyvector dual `pv_x` with bidegree `(-(chain + n + 1), -cochain)`
//!   where `n` is the shift the table was built for.
//!
//! The **total cochain degree** of a generator is
//! `cochain - chain + formdeg`, additive over monomial factors, and the
//! Koszul parity of every symbol is the parity of its total cochain degree.
//! Consequences worth spelling out once:
//!
//! * `x` has total degree `cochain - chain`; for a plain chain algebra this
//!   is `-chain`, the homological convention.
//! * `dx` has total degree `cochain - chain + 1`, so the parity of a
//!   one-form is opposite to its base generator (`d xi * d xi != 0` when
//!   `xi` is odd).
//! * `pv_x` has total degree `chain + n + 1 - cochain`; a product of `j`
//!   duals with an algebra coefficient `a` has total degree
//!   `j(n+1) + sum(chain of bases) - chain(a)` in the plain case, matching
//!   the degree contract for weight-`j` polyvectors.
//!
//! Odd generators square to zero; even generators have free exponents.
//! The global order of generators is declaration order within each kind,
//! with algebra generators first, then one-forms, then polyvector duals.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Identifier of a generator inside a [`Generators`] table.
///
/// Ids are assigned as `kind * m + base` where `m` is the number of declared
/// generators, so the derived ordering is the global monomial order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GenId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Kind {
    Algebra,
    Form,
    Poly,
}

impl Kind {
    pub fn index(self) -> u32 {
        match self {
            Kind::Algebra => 0,
            Kind::Form => 1,
            Kind::Poly => 2,
        }
    }
}

/// A declared algebra generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub name: String,
    pub chain: i64,
    pub cochain: i64,
    /// Auxiliary positive grading used only for finite truncations.
    pub poly_weight: u32,
}

impl GeneratorSpec {
    pub fn new(name: &str, chain: i64, cochain: i64, poly_weight: u32) -> Self {
        GeneratorSpec { name: name.to_string(), chain, cochain, poly_weight }
    }

    /// Plain chain-degree generator of polynomial weight 1.
    pub fn chain_gen(name: &str, chain: i64) -> Self {
        GeneratorSpec::new(name, chain, 0, 1)
    }
}

/// Generator table of a free graded-commutative algebra together with the
/// shift `n` its polyvector duals were built for.
#[derive(Clone, Debug)]
pub struct Generators {
    base: Vec<GeneratorSpec>,
    shift: i64,
    by_name: BTreeMap<String, u32>,
    // cached per id (3m entries)
    total: Vec<i64>,
    chain: Vec<i64>,
    cochain: Vec<i64>,
    odd: Vec<bool>,
}

impl Generators {
    pub fn new(base: Vec<GeneratorSpec>, shift: i64) -> Result<Self> {
        let mut by_name = BTreeMap::new();
        for (i, g) in base.iter().enumerate() {
            if g.name.is_empty()
                || !g.name.chars().next().unwrap().is_ascii_alphabetic()
                || !g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::InvalidSpec(format!(
                    "generator name `{}` is not a valid identifier",
                    g.name
                )));
            }
            if g.chain < 0 || g.cochain < 0 {
                return Err(Error::InvalidSpec(format!(
                    "generator `{}` has negative bidegree ({}, {})",
                    g.name, g.chain, g.cochain
                )));
            }
            if by_name.insert(g.name.clone(), i as u32).is_some() {
                return Err(Error::InvalidSpec(format!("duplicate generator `{}`", g.name)));
            }
        }
        let m = base.len();
        let mut total = vec![0i64; 3 * m];
        let mut chain = vec![0i64; 3 * m];
        let mut cochain = vec![0i64; 3 * m];
        let mut odd = vec![false; 3 * m];
        for (i, g) in base.iter().enumerate() {
            // algebra generator
            chain[i] = g.chain;
            cochain[i] = g.cochain;
            total[i] = g.cochain - g.chain;
            // one-form: same bidegree, form degree contributes 1 to the total
            chain[m + i] = g.chain;
            cochain[m + i] = g.cochain;
            total[m + i] = g.cochain - g.chain + 1;
            // polyvector dual
            chain[2 * m + i] = -(g.chain + shift + 1);
            cochain[2 * m + i] = -g.cochain;
            total[2 * m + i] = g.chain + shift + 1 - g.cochain;
            for k in 0..3 {
                odd[k * m + i] = total[k * m + i].rem_euclid(2) == 1;
            }
        }
        Ok(Generators { base, shift, by_name, total, chain, cochain, odd })
    }

    /// Number of declared algebra generators.
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// The shift `n` the polyvector duals were graded for.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn id(&self, kind: Kind, base: usize) -> GenId {
        debug_assert!(base < self.base.len());
        GenId(kind.index() * self.base.len() as u32 + base as u32)
    }

    pub fn kind(&self, id: GenId) -> Kind {
        match id.0 as usize / self.base.len() {
            0 => Kind::Algebra,
            1 => Kind::Form,
            _ => Kind::Poly,
        }
    }

    pub fn base_index(&self, id: GenId) -> usize {
        id.0 as usize % self.base.len()
    }

    pub fn base_spec(&self, id: GenId) -> &GeneratorSpec {
        &self.base[self.base_index(id)]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).map(|&i| i as usize)
    }

    /// Resolve a surface token: `name`, `dx_name` or `pv_name`.
    pub fn lookup_token(&self, token: &str) -> Option<GenId> {
        if let Some(rest) = token.strip_prefix("dx_") {
            if let Some(i) = self.lookup(rest) {
                return Some(self.id(Kind::Form, i));
            }
        }
        if let Some(rest) = token.strip_prefix("pv_") {
            if let Some(i) = self.lookup(rest) {
                return Some(self.id(Kind::Poly, i));
            }
        }
        self.lookup(token).map(|i| self.id(Kind::Algebra, i))
    }

    /// Canonical surface token of a generator.
    pub fn token(&self, id: GenId) -> String {
        let name = &self.base_spec(id).name;
        match self.kind(id) {
            Kind::Algebra => name.clone(),
            Kind::Form => format!("dx_{name}"),
            Kind::Poly => format!("pv_{name}"),
        }
    }

    pub fn odd(&self, id: GenId) -> bool {
        self.odd[id.0 as usize]
    }

    /// Total cochain degree of the generator (parity = Koszul parity).
    pub fn total_deg(&self, id: GenId) -> i64 {
        self.total[id.0 as usize]
    }

    pub fn chain_deg(&self, id: GenId) -> i64 {
        self.chain[id.0 as usize]
    }

    pub fn cochain_deg(&self, id: GenId) -> i64 {
        self.cochain[id.0 as usize]
    }

    pub fn form_deg(&self, id: GenId) -> i64 {
        if self.kind(id) == Kind::Form {
            1
        } else {
            0
        }
    }

    pub fn poly_weight(&self, id: GenId) -> u32 {
        if self.kind(id) == Kind::Algebra {
            self.base_spec(id).poly_weight
        } else {
            0
        }
    }

    pub fn iter_ids(&self, kind: Kind) -> impl Iterator<Item = GenId> + '_ {
        (0..self.base.len()).map(move |i| self.id(kind, i))
    }
}
