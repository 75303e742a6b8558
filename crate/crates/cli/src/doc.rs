//! The workbench document format: a line-oriented declarative file naming
//! an algebra, an optional Lie datum, a problem, and an optional command.
//!
//! ```text
//! workbench-document 1
//!
//! [algebra]
//! generator x chain 0 cochain 0 weight 1
//! delta x = 0
//!
//! [lie]
//! basis e f h
//! bracket e f = h
//! action e x = 1
//!
//! [problem]
//! shift = 0
//! truncation = 4
//! max_poly_weight = 3
//! element pi = pv_x*pv_y
//!
//! [command]
//! verb = mc-check
//! arg pi = pi
//! ```
//!
//! `#` starts a comment.  Sections may appear in any order; each at most
//! once.  Unspecified differentials, brackets and actions default to zero.
//! [`serialize`] emits the canonical normal form: fixed section order,
//! declaration-order generators, explicit `delta` lines, brackets listed
//! for `i < j` with nonzero value only, elements and command arguments in
//! name order, all elements in canonical textual form.  Parsing its own
//! output reproduces the same document byte for byte.

use std::collections::BTreeMap;

use workbench_core::algebra::Algebra;
use workbench_core::element::element_string;
use workbench_core::gens::{Generators, GeneratorSpec};
use num_traits::Zero;
use workbench_core::q::{q_int, Q};
use workbench_core::stacky::{LieAction, LieAlgebraSpec};
use workbench_core::{Element, Error, Result};

use crate::expr::{self, Pos};

/// Optional Lie datum: a finite-dimensional Lie algebra with an action on
/// the base algebra by derivations.
#[derive(Clone, Debug)]
pub struct LiePart {
    pub spec: LieAlgebraSpec,
    pub action: LieAction,
}

/// A fully resolved document: the algebra is built and validated, every
/// element is evaluated.
#[derive(Clone, Debug)]
pub struct WorkbenchDocument {
    pub algebra: Algebra,
    pub lie: Option<LiePart>,
    pub elements: BTreeMap<String, Element>,
    pub truncation: u32,
    pub max_poly_weight: u32,
    pub verb: Option<String>,
    pub args: BTreeMap<String, Element>,
}

const HEADER: &str = "workbench-document 1";
pub const DEFAULT_TRUNCATION: u32 = 4;
pub const DEFAULT_MAX_POLY_WEIGHT: u32 = 3;

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

/// Words of a line with their 1-based column positions.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Split a directive line at its `=`: head words, RHS text and RHS column.
fn split_eq(ln: usize, line: &str) -> Result<(Vec<(usize, &str)>, &str, usize)> {
    match line.find('=') {
        Some(i) => Ok((words(&line[..i]), &line[i + 1..], i + 2)),
        None => Err(err_at(ln, 1, "expected `=` in this directive")),
    }
}

fn ident_ok(name: &str) -> bool {
    !name.is_empty()
        && name.chars().next().unwrap().is_ascii_alphabetic()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_fresh_name(ln: usize, col: usize, name: &str, role: &str) -> Result<()> {
    if !ident_ok(name) {
        return Err(err_at(ln, col, format!("{role} `{name}` is not a valid identifier")));
    }
    if name == "d" || name == "del" {
        return Err(err_at(ln, col, format!("{role} `{name}` collides with a reserved word")));
    }
    if name.starts_with("dx_") || name.starts_with("pv_") {
        return Err(err_at(
            ln,
            col,
            format!("{role} `{name}` collides with the dx_/pv_ token prefixes"),
        ));
    }
    Ok(())
}

fn parse_int<T: std::str::FromStr>(ln: usize, col: usize, text: &str, what: &str) -> Result<T> {
    text.parse()
        .map_err(|_| err_at(ln, col, format!("{what} must be an integer, found `{text}`")))
}

fn parse_rhs_element(
    ln: usize,
    rhs: &str,
    rhs_col: usize,
    alg: &Algebra,
    env: &BTreeMap<String, Element>,
    allow_differentials: bool,
) -> Result<Element> {
    let tree = expr::parse_at(rhs, Pos { line: ln, col: rhs_col })?;
    if !allow_differentials {
        if let Some(p) = tree.uses_differentials() {
            return Err(err_at(
                p.line,
                p.col,
                "d(...)/del(...) are not allowed in this definition",
            ));
        }
    }
    expr::eval_element(&tree, alg, env)
}

struct Section {
    header_line: usize,
    lines: Vec<(usize, String)>,
}

/// Parse a document from text.  All diagnostics carry line/column
/// positions into the original text.
pub fn parse_document(text: &str) -> Result<WorkbenchDocument> {
    // split into sections, dropping comments
    let mut sections: BTreeMap<&'static str, Section> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if !saw_header {
            if trimmed != HEADER {
                return Err(err_at(
                    ln,
                    1,
                    format!("the first line must be `{HEADER}`, found `{trimmed}`"),
                ));
            }
            saw_header = true;
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let key = match name {
                "algebra" => "algebra",
                "lie" => "lie",
                "problem" => "problem",
                "command" => "command",
                other => {
                    return Err(err_at(ln, 1, format!("unknown section `[{other}]`")));
                }
            };
            if sections.contains_key(key) {
                return Err(err_at(ln, 1, format!("duplicate section `[{key}]`")));
            }
            sections.insert(key, Section { header_line: ln, lines: Vec::new() });
            current = Some(key);
            continue;
        }
        match current {
            Some(key) => sections.get_mut(key).unwrap().lines.push((ln, line.to_string())),
            None => {
                return Err(err_at(ln, 1, "directives must appear inside a section"));
            }
        }
    }
    if !saw_header {
        return Err(err_at(1, 1, format!("empty document; the first line must be `{HEADER}`")));
    }
    let algebra_section = sections
        .remove("algebra")
        .ok_or_else(|| Error::InvalidSpec("the document has no [algebra] section".into()))?;
    let lie_section = sections.remove("lie");
    let problem_section = sections.remove("problem");
    let command_section = sections.remove("command");

    // problem scalars first: the shift is needed to grade the generators
    let mut shift = 0i64;
    let mut truncation = DEFAULT_TRUNCATION;
    let mut max_poly_weight = DEFAULT_MAX_POLY_WEIGHT;
    let mut element_lines: Vec<(usize, String)> = Vec::new();
    if let Some(sec) = &problem_section {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (ln, line) in &sec.lines {
            let ws = words(line);
            let (col0, head) = ws[0];
            match head {
                "shift" | "truncation" | "max_poly_weight" => {
                    if let Some(prev) = seen.insert(head, *ln) {
                        let _ = prev;
                        return Err(err_at(*ln, col0, format!("duplicate `{head}` directive")));
                    }
                    let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
                    if lhs.len() != 1 {
                        return Err(err_at(*ln, col0, format!("`{head}` takes no operands")));
                    }
                    let value = rhs.trim();
                    match head {
                        "shift" => shift = parse_int(*ln, rhs_col, value, "shift")?,
                        "truncation" => {
                            truncation = parse_int(*ln, rhs_col, value, "truncation")?
                        }
                        _ => {
                            max_poly_weight =
                                parse_int(*ln, rhs_col, value, "max_poly_weight")?
                        }
                    }
                }
                "element" => element_lines.push((*ln, line.clone())),
                other => {
                    return Err(err_at(
                        *ln,
                        col0,
                        format!("unknown directive `{other}` in [problem]"),
                    ));
                }
            }
        }
    }

    // algebra: generators, then differentials
    let mut specs: Vec<GeneratorSpec> = Vec::new();
    let mut delta_lines: Vec<(usize, String)> = Vec::new();
    let mut partial_lines: Vec<(usize, String)> = Vec::new();
    for (ln, line) in &algebra_section.lines {
        let ws = words(line);
        let (col0, head) = ws[0];
        match head {
            "generator" => {
                // generator NAME chain INT cochain INT weight INT
                if ws.len() != 8 || ws[2].1 != "chain" || ws[4].1 != "cochain" || ws[6].1 != "weight"
                {
                    return Err(err_at(
                        *ln,
                        col0,
                        "expected `generator NAME chain INT cochain INT weight INT`",
                    ));
                }
                let (ncol, name) = ws[1];
                check_fresh_name(*ln, ncol, name, "generator name")?;
                let chain: i64 = parse_int(*ln, ws[3].0, ws[3].1, "chain degree")?;
                let cochain: i64 = parse_int(*ln, ws[5].0, ws[5].1, "cochain degree")?;
                let weight: u32 = parse_int(*ln, ws[7].0, ws[7].1, "polynomial weight")?;
                specs.push(GeneratorSpec::new(name, chain, cochain, weight));
            }
            "delta" => delta_lines.push((*ln, line.clone())),
            "partial" => partial_lines.push((*ln, line.clone())),
            other => {
                return Err(err_at(
                    *ln,
                    col0,
                    format!("unknown directive `{other}` in [algebra]"),
                ));
            }
        }
    }
    let gens = Generators::new(specs, shift).map_err(|e| located(&e, algebra_section.header_line))?;
    let m = gens.len();
    let scaffold = Algebra::plain(gens.clone(), vec![Element::zero(); m])
        .map_err(|e| located(&e, algebra_section.header_line))?;
    let empty_env = BTreeMap::new();
    let mut delta = vec![Element::zero(); m];
    let mut partial = vec![Element::zero(); m];
    let mut any_partial = false;
    for (kind, lines, store) in [
        ("delta", &delta_lines, &mut delta),
        ("partial", &partial_lines, &mut partial),
    ] {
        let mut seen = vec![false; m];
        for (ln, line) in lines {
            let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
            if lhs.len() != 2 {
                return Err(err_at(*ln, lhs[0].0, format!("expected `{kind} NAME = expr`")));
            }
            let (ncol, name) = lhs[1];
            let i = gens.lookup(name).ok_or_else(|| {
                err_at(*ln, ncol, format!("`{name}` is not a declared generator"))
            })?;
            if seen[i] {
                return Err(err_at(*ln, ncol, format!("duplicate `{kind}` for `{name}`")));
            }
            seen[i] = true;
            store[i] = parse_rhs_element(*ln, rhs, rhs_col, &scaffold, &empty_env, false)?;
            if kind == "partial" {
                any_partial = true;
            }
        }
    }
    let algebra = Algebra::new(gens, delta, if any_partial { Some(partial) } else { None })
        .map_err(|e| located(&e, algebra_section.header_line))?;

    // lie section
    let lie = match lie_section {
        None => None,
        Some(sec) => Some(parse_lie(&sec, &algebra)?),
    };

    // problem elements, in file order so later ones may reference earlier
    let g = algebra.gens();
    let mut elements: BTreeMap<String, Element> = BTreeMap::new();
    for (ln, line) in &element_lines {
        let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
        if lhs.len() != 2 {
            return Err(err_at(*ln, lhs[0].0, "expected `element NAME = expr`"));
        }
        let (ncol, name) = lhs[1];
        check_fresh_name(*ln, ncol, name, "element name")?;
        if g.lookup_token(name).is_some() {
            return Err(err_at(
                *ln,
                ncol,
                format!("element name `{name}` collides with a generator"),
            ));
        }
        if elements.contains_key(name) {
            return Err(err_at(*ln, ncol, format!("duplicate element `{name}`")));
        }
        let value = parse_rhs_element(*ln, rhs, rhs_col, &algebra, &elements, true)?;
        elements.insert(name.to_string(), value);
    }

    // command section
    let mut verb = None;
    let mut args: BTreeMap<String, Element> = BTreeMap::new();
    if let Some(sec) = &command_section {
        for (ln, line) in &sec.lines {
            let ws = words(line);
            let (col0, head) = ws[0];
            match head {
                "verb" => {
                    if verb.is_some() {
                        return Err(err_at(*ln, col0, "duplicate `verb` directive"));
                    }
                    let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
                    if lhs.len() != 1 {
                        return Err(err_at(*ln, col0, "`verb` takes no operands"));
                    }
                    let value = rhs.trim();
                    if value.is_empty()
                        || !value.chars().all(|c| c.is_ascii_lowercase() || c == '-')
                    {
                        return Err(err_at(
                            *ln,
                            rhs_col,
                            format!("`{value}` is not a verb name"),
                        ));
                    }
                    verb = Some(value.to_string());
                }
                "arg" => {
                    let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
                    if lhs.len() != 2 {
                        return Err(err_at(*ln, col0, "expected `arg KEY = expr`"));
                    }
                    let (kcol, key) = lhs[1];
                    if !ident_ok(key) {
                        return Err(err_at(
                            *ln,
                            kcol,
                            format!("argument key `{key}` is not a valid identifier"),
                        ));
                    }
                    if args.contains_key(key) {
                        return Err(err_at(*ln, kcol, format!("duplicate argument `{key}`")));
                    }
                    let value = parse_rhs_element(*ln, rhs, rhs_col, &algebra, &elements, true)?;
                    args.insert(key.to_string(), value);
                }
                other => {
                    return Err(err_at(
                        *ln,
                        col0,
                        format!("unknown directive `{other}` in [command]"),
                    ));
                }
            }
        }
    }

    Ok(WorkbenchDocument {
        algebra,
        lie,
        elements,
        truncation,
        max_poly_weight,
        verb,
        args,
    })
}

/// Attach the section position to a semantic error from the core builders
/// while keeping its machine-readable code.
fn located(e: &Error, header_line: usize) -> Error {
    match e {
        Error::InvalidSpec(msg) => {
            Error::InvalidSpec(format!("section starting at line {header_line}: {msg}"))
        }
        Error::Precondition(msg) => {
            Error::Precondition(format!("section starting at line {header_line}: {msg}"))
        }
        other => other.clone(),
    }
}

fn parse_lie(sec: &Section, base: &Algebra) -> Result<LiePart> {
    let g = base.gens();
    let mut names: Vec<String> = Vec::new();
    let mut basis_seen = false;
    let mut bracket_lines: Vec<(usize, String)> = Vec::new();
    let mut action_lines: Vec<(usize, String)> = Vec::new();
    for (ln, line) in &sec.lines {
        let ws = words(line);
        let (col0, head) = ws[0];
        match head {
            "basis" => {
                if basis_seen {
                    return Err(err_at(*ln, col0, "duplicate `basis` directive"));
                }
                basis_seen = true;
                if ws.len() < 2 {
                    return Err(err_at(*ln, col0, "`basis` needs at least one name"));
                }
                for &(col, name) in &ws[1..] {
                    check_fresh_name(*ln, col, name, "basis name")?;
                    if names.iter().any(|n| n == name) {
                        return Err(err_at(*ln, col, format!("duplicate basis name `{name}`")));
                    }
                    names.push(name.to_string());
                }
            }
            "bracket" => bracket_lines.push((*ln, line.clone())),
            "action" => action_lines.push((*ln, line.clone())),
            other => {
                return Err(err_at(*ln, col0, format!("unknown directive `{other}` in [lie]")));
            }
        }
    }
    if !basis_seen {
        return Err(Error::InvalidSpec(format!(
            "[lie] section starting at line {} has no `basis` directive",
            sec.header_line
        )));
    }
    let m = names.len();
    let mut c = vec![vec![vec![q_int(0); m]; m]; m];
    let mut fixed = vec![vec![false; m]; m];
    for (ln, line) in &bracket_lines {
        let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
        if lhs.len() != 3 {
            return Err(err_at(*ln, lhs[0].0, "expected `bracket A B = expr`"));
        }
        let mut idx = [0usize; 2];
        for (slot, &(col, name)) in lhs[1..].iter().enumerate() {
            idx[slot] = names.iter().position(|n| n == name).ok_or_else(|| {
                err_at(*ln, col, format!("`{name}` is not a basis name"))
            })?;
        }
        let [i, j] = idx;
        if fixed[i][j] {
            return Err(err_at(
                *ln,
                lhs[1].0,
                format!(
                    "the bracket of ({}, {}) is already determined",
                    names[i], names[j]
                ),
            ));
        }
        let tree = expr::parse_at(rhs, Pos { line: *ln, col: rhs_col })?;
        let v = expr::eval_vector(&tree, &names)?;
        if i == j {
            if v.iter().any(|q| !q.is_zero()) {
                return Err(err_at(
                    *ln,
                    lhs[1].0,
                    format!("the bracket of {} with itself must be zero", names[i]),
                ));
            }
            fixed[i][j] = true;
            continue;
        }
        for (k, q) in v.into_iter().enumerate() {
            c[i][j][k] = q.clone();
            c[j][i][k] = -q;
        }
        fixed[i][j] = true;
        fixed[j][i] = true;
    }
    let spec = LieAlgebraSpec::new(names.clone(), c).map_err(|e| located(&e, sec.header_line))?;

    let mut images = vec![vec![Element::zero(); g.len()]; m];
    let empty_env = BTreeMap::new();
    let mut given = vec![vec![false; g.len()]; m];
    for (ln, line) in &action_lines {
        let (lhs, rhs, rhs_col) = split_eq(*ln, line)?;
        if lhs.len() != 3 {
            return Err(err_at(*ln, lhs[0].0, "expected `action LIE GEN = expr`"));
        }
        let (lcol, lname) = lhs[1];
        let i = names
            .iter()
            .position(|n| n == lname)
            .ok_or_else(|| err_at(*ln, lcol, format!("`{lname}` is not a basis name")))?;
        let (gcol, gname) = lhs[2];
        let b = g
            .lookup(gname)
            .ok_or_else(|| err_at(*ln, gcol, format!("`{gname}` is not a declared generator")))?;
        if given[i][b] {
            return Err(err_at(
                *ln,
                lcol,
                format!("duplicate action of {lname} on {gname}"),
            ));
        }
        given[i][b] = true;
        images[i][b] = parse_rhs_element(*ln, rhs, rhs_col, base, &empty_env, false)?;
    }
    let action =
        LieAction::new(base, &spec, images).map_err(|e| located(&e, sec.header_line))?;
    Ok(LiePart { spec, action })
}

/// Canonical linear-combination string over basis names, mirroring the
/// conventions of the element form.
fn linear_string(names: &[String], v: &[Q]) -> String {
    let mut out = String::new();
    let mut first = true;
    for (k, q) in v.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let neg = q < &q_int(0);
        let abs = if neg { -q.clone() } else { q.clone() };
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if abs == q_int(1) {
            out.push_str(&names[k]);
        } else {
            out.push_str(&format!("{abs} * {}", names[k]));
        }
    }
    if first {
        out.push('0');
    }
    out
}

/// Emit the canonical normal form of a document.
pub fn serialize(doc: &WorkbenchDocument) -> String {
    let g = doc.algebra.gens();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push_str("\n\n[algebra]\n");
    for i in 0..g.len() {
        let spec = g.base_spec(g.id(workbench_core::Kind::Algebra, i));
        out.push_str(&format!(
            "generator {} chain {} cochain {} weight {}\n",
            spec.name, spec.chain, spec.cochain, spec.poly_weight
        ));
    }
    for i in 0..g.len() {
        let name = &g.base_spec(g.id(workbench_core::Kind::Algebra, i)).name;
        out.push_str(&format!(
            "delta {name} = {}\n",
            element_string(g, doc.algebra.delta_value(i))
        ));
    }
    if doc.algebra.is_stacky() {
        for i in 0..g.len() {
            let name = &g.base_spec(g.id(workbench_core::Kind::Algebra, i)).name;
            out.push_str(&format!(
                "partial {name} = {}\n",
                element_string(g, doc.algebra.partial_value(i))
            ));
        }
    }
    if let Some(lie) = &doc.lie {
        let names = lie.spec.names();
        out.push_str("\n[lie]\n");
        out.push_str(&format!("basis {}\n", names.join(" ")));
        let m = names.len();
        for i in 0..m {
            for j in (i + 1)..m {
                let v: Vec<Q> = (0..m).map(|k| lie.spec.constant(i, j, k).clone()).collect();
                if v.iter().any(|q| !q.is_zero()) {
                    out.push_str(&format!(
                        "bracket {} {} = {}\n",
                        names[i],
                        names[j],
                        linear_string(names, &v)
                    ));
                }
            }
        }
        for i in 0..m {
            for b in 0..g.len() {
                let img = lie.action.image(i, b);
                if !img.is_zero() {
                    out.push_str(&format!(
                        "action {} {} = {}\n",
                        names[i],
                        g.base_spec(g.id(workbench_core::Kind::Algebra, b)).name,
                        element_string(g, img)
                    ));
                }
            }
        }
    }
    out.push_str("\n[problem]\n");
    out.push_str(&format!("shift = {}\n", g.shift()));
    out.push_str(&format!("truncation = {}\n", doc.truncation));
    out.push_str(&format!("max_poly_weight = {}\n", doc.max_poly_weight));
    for (name, e) in &doc.elements {
        out.push_str(&format!("element {name} = {}\n", element_string(g, e)));
    }
    if doc.verb.is_some() || !doc.args.is_empty() {
        out.push_str("\n[command]\n");
        if let Some(v) = &doc.verb {
            out.push_str(&format!("verb = {v}\n"));
        }
        for (key, e) in &doc.args {
            out.push_str(&format!("arg {key} = {}\n", element_string(g, e)));
        }
    }
    out
}
