//! The line-oriented workspace file.
//!
//! ```text
//! # comments run to the end of the line
//! group A { free_rank = 1, torsion = [2] }
//! endo d
//!   group = A
//!   matrix = [[2, 0], [0, 1]]
//! quasi h
//!   group = A
//!   pairs = [[[2, 1], [1, 0]]]
//! ring R kind=pre generators=[d] identity=true
//! ```
//!
//! A block starts with `group|endo|quasi|ring <name>`; its keys follow either
//! on the header line (`key=value` tokens or a `{ key = value, ... }` body) or
//! on the lines below as `key = value`. Relations take a `group` and exactly
//! one of `matrix`, `pairs`, `constant` (onto the span of the listed
//! vectors), `scalar` or `identity = true`; an optional `kat = [..]` adds a
//! constant summand onto the span of the listed vectors.

use std::collections::BTreeMap;
use std::fmt;

use crate::group::{FgAbGroup, Subgroup};
use crate::lattice::{Int, Vector};
use crate::prering::{RingKind, RingPresentation};
use crate::relation::{BiRelation, Kind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclaredKind {
    Endo,
    Quasi,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedRelation {
    pub group: String,
    pub declared: DeclaredKind,
    pub relation: BiRelation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedRing {
    pub group: String,
    pub generators: Vec<String>,
    pub ring: RingPresentation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Workspace {
    pub groups: BTreeMap<String, FgAbGroup>,
    pub relations: BTreeMap<String, NamedRelation>,
    pub rings: BTreeMap<String, NamedRing>,
    pub source_path: Option<String>,
}

/// A bracketed literal: an integer or a list of literals.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Literal {
    Int(Int),
    List(Vec<Literal>),
}

fn parse_literal(text: &str) -> Result<Literal, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let lit = literal_at(&chars, &mut pos)?;
    skip_space(&chars, &mut pos);
    if pos != chars.len() {
        return Err(format!("unexpected `{}` after value", chars[pos..].iter().collect::<String>()));
    }
    Ok(lit)
}

fn skip_space(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn literal_at(chars: &[char], pos: &mut usize) -> Result<Literal, String> {
    skip_space(chars, pos);
    match chars.get(*pos) {
        Some('[') => {
            *pos += 1;
            let mut items = Vec::new();
            skip_space(chars, pos);
            if chars.get(*pos) == Some(&']') {
                *pos += 1;
                return Ok(Literal::List(items));
            }
            loop {
                items.push(literal_at(chars, pos)?);
                skip_space(chars, pos);
                match chars.get(*pos) {
                    Some(',') => *pos += 1,
                    Some(']') => {
                        *pos += 1;
                        return Ok(Literal::List(items));
                    }
                    Some(c) => return Err(format!("expected `,` or `]`, found `{c}`")),
                    None => return Err("unclosed `[`".into()),
                }
            }
        }
        Some(_) => {
            let start = *pos;
            if matches!(chars[*pos], '-' | '+') {
                *pos += 1;
            }
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let token: String = chars[start..*pos].iter().collect();
            token.parse().map(Literal::Int).map_err(|_| format!("malformed integer `{token}`"))
        }
        None => Err("missing value".into()),
    }
}

/// Parses `[a, b, ...]` as an integer vector.
pub fn parse_vector(text: &str) -> Result<Vector, String> {
    as_vector(&parse_literal(text)?)
}

/// Parses `[[..], [..], ...]` as a list of integer vectors.
pub fn parse_vectors(text: &str) -> Result<Vec<Vector>, String> {
    as_vectors(&parse_literal(text)?)
}

fn as_vector(lit: &Literal) -> Result<Vector, String> {
    match lit {
        Literal::List(items) => items
            .iter()
            .map(|x| match x {
                Literal::Int(v) => Ok(v.clone()),
                Literal::List(_) => Err("malformed vector: nested list where an integer was expected".to_string()),
            })
            .collect(),
        Literal::Int(_) => Err("malformed vector: expected `[...]`".into()),
    }
}

fn as_vectors(lit: &Literal) -> Result<Vec<Vector>, String> {
    match lit {
        Literal::List(items) => items.iter().map(as_vector).collect(),
        Literal::Int(_) => Err("malformed vector list: expected `[[...], ...]`".into()),
    }
}

fn as_pairs(lit: &Literal) -> Result<Vec<(Vector, Vector)>, String> {
    match lit {
        Literal::List(items) => items
            .iter()
            .map(|p| match as_vectors(p)?.as_slice() {
                [a, b] => Ok((a.clone(), b.clone())),
                _ => Err("malformed pair: expected `[[a...], [b...]]`".to_string()),
            })
            .collect(),
        Literal::Int(_) => Err("malformed pair list".into()),
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Splits `text` at top-level occurrences of `sep` (outside brackets).
fn split_top(text: &str, sep: impl Fn(char) -> bool) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if depth == 0 && sep(c) {
            if !cur.trim().is_empty() {
                out.push(cur.trim().to_string());
            }
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

#[derive(Debug)]
struct Block {
    keyword: String,
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

fn push_entry(block: &mut Block, item: &str, line: usize, diags: &mut Vec<Diagnostic>) {
    match item.split_once('=') {
        Some((k, v)) if is_name(k.trim()) => block.entries.push((k.trim().to_string(), v.trim().to_string(), line)),
        _ => diags.push(Diagnostic { line, message: format!("expected `key = value`, found `{item}`") }),
    }
}

fn read_blocks(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.splitn(3, char::is_whitespace);
        let first = words.next().unwrap_or("");
        let is_entry = content[first.len()..].trim_start().starts_with('=');
        if matches!(first, "group" | "endo" | "quasi" | "ring") && !is_entry {
            let name = words.next().unwrap_or("").trim();
            let rest = words.next().unwrap_or("").trim();
            let (name, rest) = match name.split_once('{') {
                Some((n, r)) => (n.trim(), format!("{{{r} {rest}")),
                None => (name, rest.to_string()),
            };
            if !is_name(name) {
                diags.push(Diagnostic { line, message: format!("expected a name after `{first}`, found `{name}`") });
                continue;
            }
            let mut block = Block { keyword: first.into(), name: name.into(), line, entries: Vec::new() };
            let rest = rest.trim();
            if let Some(body) = rest.strip_prefix('{') {
                match body.trim_end().strip_suffix('}') {
                    Some(inner) => {
                        for item in split_top(inner, |c| c == ',') {
                            push_entry(&mut block, &item, line, diags);
                        }
                    }
                    None => diags.push(Diagnostic { line, message: "unclosed `{`".into() }),
                }
            } else {
                for item in split_top(rest, char::is_whitespace) {
                    push_entry(&mut block, &item, line, diags);
                }
            }
            blocks.push(block);
        } else {
            match blocks.last_mut() {
                Some(block) => push_entry(block, content, line, diags),
                None => diags.push(Diagnostic { line, message: format!("`{content}` appears before any block") }),
            }
        }
    }
    blocks
}

struct Entries<'a> {
    block: &'a Block,
    used: Vec<bool>,
}

impl<'a> Entries<'a> {
    fn new(block: &'a Block) -> Self {
        Entries { block, used: vec![false; block.entries.len()] }
    }

    fn take(&mut self, key: &str, diags: &mut Vec<Diagnostic>) -> Option<(&'a str, usize)> {
        let mut found = None;
        for (i, (k, v, line)) in self.block.entries.iter().enumerate() {
            if k == key {
                if found.is_some() {
                    diags.push(Diagnostic { line: *line, message: format!("duplicate key `{key}`") });
                } else {
                    found = Some((v.as_str(), *line));
                }
                self.used[i] = true;
            }
        }
        found
    }

    fn finish(self, diags: &mut Vec<Diagnostic>) {
        for ((k, _, line), used) in self.block.entries.iter().zip(self.used) {
            if !used {
                diags.push(Diagnostic { line: *line, message: format!("unknown key `{k}` in {}", self.block.keyword) });
            }
        }
    }
}

fn located<T>(r: Result<T, String>, line: usize, diags: &mut Vec<Diagnostic>) -> Option<T> {
    r.map_err(|message| diags.push(Diagnostic { line, message })).ok()
}

fn parse_group(block: &Block, diags: &mut Vec<Diagnostic>) -> Option<FgAbGroup> {
    let mut e = Entries::new(block);
    let free = e.take("free_rank", diags);
    let torsion = e.take("torsion", diags);
    e.finish(diags);
    let rank = match free {
        Some((v, line)) => located(v.parse::<usize>().map_err(|_| format!("malformed free rank `{v}`")), line, diags)?,
        None => 0,
    };
    let factors = match torsion {
        Some((v, line)) => located(parse_vector(v), line, diags)?,
        None => Vec::new(),
    };
    located(FgAbGroup::from_factors(rank, factors).map_err(|e| e.to_string()), block.line, diags)
}

fn parse_relation(block: &Block, ws: &Workspace, diags: &mut Vec<Diagnostic>) -> Option<NamedRelation> {
    let mut e = Entries::new(block);
    let group = e.take("group", diags);
    let forms: Vec<(&str, Option<(&str, usize)>)> = ["matrix", "pairs", "constant", "scalar", "identity"]
        .into_iter()
        .map(|k| (k, e.take(k, diags)))
        .collect();
    let kat = e.take("kat", diags);
    e.finish(diags);
    let Some((group_name, gline)) = group else {
        diags.push(Diagnostic { line: block.line, message: format!("relation `{}` needs `group = <name>`", block.name) });
        return None;
    };
    let Some(a) = ws.groups.get(group_name) else {
        diags.push(Diagnostic { line: gline, message: format!("unknown group `{group_name}`") });
        return None;
    };
    let given: Vec<_> = forms.iter().filter_map(|(k, v)| v.map(|v| (*k, v))).collect();
    let [(form, (value, line))] = given.as_slice() else {
        diags.push(Diagnostic {
            line: block.line,
            message: format!("relation `{}` needs exactly one of matrix, pairs, constant, scalar, identity", block.name),
        });
        return None;
    };
    let line = *line;
    let built = match *form {
        "matrix" => located(parse_vectors(value), line, diags)
            .and_then(|m| located(BiRelation::from_matrix(a, &m).map_err(|e| e.to_string()), line, diags)),
        "pairs" => located(parse_literal(value).and_then(|l| as_pairs(&l)), line, diags)
            .and_then(|p| located(BiRelation::from_graph(a, &p).map_err(|e| e.to_string()), line, diags)),
        "constant" => located(parse_vectors(value), line, diags)
            .and_then(|v| located(Subgroup::generated(a, &v).map_err(|e| e.to_string()), line, diags))
            .and_then(|b| located(BiRelation::constant_to_subgroup(a, &b).map_err(|e| e.to_string()), line, diags)),
        "scalar" => located(value.parse::<i64>().map_err(|_| format!("malformed scalar `{value}`")), line, diags)
            .map(|k| BiRelation::scalar(a, k)),
        _ => match *value {
            "true" => Some(BiRelation::identity(a)),
            other => {
                diags.push(Diagnostic { line, message: format!("`identity` takes `true`, found `{other}`") });
                None
            }
        },
    }?;
    let rel = match kat {
        Some((value, line)) => {
            let b = located(parse_vectors(value), line, diags)
                .and_then(|v| located(Subgroup::generated(a, &v).map_err(|e| e.to_string()), line, diags))?;
            let c = located(BiRelation::constant_to_subgroup(a, &b).map_err(|e| e.to_string()), line, diags)?;
            located(built.add(&c).map_err(|e| e.to_string()), line, diags)?
        }
        None => built,
    };
    let declared = if block.keyword == "endo" { DeclaredKind::Endo } else { DeclaredKind::Quasi };
    let ok = match declared {
        DeclaredKind::Endo => rel.kind() == Kind::Endogeny,
        DeclaredKind::Quasi => rel.kind() != Kind::Neither,
    };
    if !ok {
        diags.push(Diagnostic {
            line: block.line,
            message: format!("`{}` is declared {} but is {}", block.name, block.keyword, rel.kind()),
        });
        return None;
    }
    Some(NamedRelation { group: group_name.to_string(), declared, relation: rel })
}

fn parse_ring(block: &Block, ws: &Workspace, diags: &mut Vec<Diagnostic>) -> Option<NamedRing> {
    let mut e = Entries::new(block);
    let kind = e.take("kind", diags);
    let gens = e.take("generators", diags);
    let identity = e.take("identity", diags);
    e.finish(diags);
    let kind = match kind {
        Some(("pre", _)) | None => RingKind::PreRing,
        Some(("near", _)) => RingKind::NearRing,
        Some((other, line)) => {
            diags.push(Diagnostic { line, message: format!("ring kind must be `pre` or `near`, found `{other}`") });
            return None;
        }
    };
    let identity = match identity {
        Some(("true", _)) | None => true,
        Some(("false", _)) => false,
        Some((other, line)) => {
            diags.push(Diagnostic { line, message: format!("`identity` takes true or false, found `{other}`") });
            return None;
        }
    };
    let Some((gens, gline)) = gens else {
        diags.push(Diagnostic { line: block.line, message: format!("ring `{}` needs `generators = [..]`", block.name) });
        return None;
    };
    let Some(inner) = gens.trim().strip_prefix('[').and_then(|g| g.strip_suffix(']')) else {
        diags.push(Diagnostic { line: gline, message: format!("malformed generator list `{gens}`") });
        return None;
    };
    let names: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let mut rels = Vec::new();
    let mut group: Option<&str> = None;
    for n in &names {
        let Some(r) = ws.relations.get(n) else {
            diags.push(Diagnostic { line: gline, message: format!("unknown relation `{n}`") });
            return None;
        };
        if group.is_some_and(|g| g != r.group) {
            diags.push(Diagnostic { line: gline, message: format!("generators of `{}` live in different groups", block.name) });
            return None;
        }
        group = Some(&r.group);
        rels.push(r.relation.clone());
    }
    let Some(group) = group else {
        diags.push(Diagnostic { line: gline, message: format!("ring `{}` has no generators", block.name) });
        return None;
    };
    let ring = located(
        RingPresentation::new(&ws.groups[group], rels, kind, identity).map_err(|e| e.to_string()),
        block.line,
        diags,
    )?;
    Some(NamedRing { group: group.to_string(), generators: names, ring })
}

/// Parses and resolves a workspace. Blocks are resolved in file order, so a
/// reference must follow its target.
pub fn parse_workspace(text: &str) -> Result<Workspace, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let blocks = read_blocks(text, &mut diags);
    let mut ws = Workspace::default();
    for block in &blocks {
        let taken = match block.keyword.as_str() {
            "group" => ws.groups.contains_key(&block.name),
            "ring" => ws.rings.contains_key(&block.name),
            _ => ws.relations.contains_key(&block.name),
        };
        if taken {
            diags.push(Diagnostic { line: block.line, message: format!("duplicate name `{}`", block.name) });
            continue;
        }
        match block.keyword.as_str() {
            "group" => {
                if let Some(g) = parse_group(block, &mut diags) {
                    ws.groups.insert(block.name.clone(), g);
                }
            }
            "ring" => {
                if let Some(r) = parse_ring(block, &ws, &mut diags) {
                    ws.rings.insert(block.name.clone(), r);
                }
            }
            _ => {
                if let Some(r) = parse_relation(block, &ws, &mut diags) {
                    ws.relations.insert(block.name.clone(), r);
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(ws)
    } else {
        diags.sort_by_key(|d| d.line);
        Err(diags)
    }
}

fn show_vector(v: &[Int]) -> String {
    format!("[{}]", v.iter().map(Int::to_string).collect::<Vec<_>>().join(", "))
}

/// Writes every relation by its canonical generator pairs.
pub fn serialize_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (name, g) in &ws.groups {
        out += &format!(
            "group {name} {{ free_rank = {}, torsion = {} }}\n",
            g.free_rank(),
            show_vector(g.torsion_factors())
        );
    }
    for (name, r) in &ws.relations {
        let keyword = match r.declared {
            DeclaredKind::Endo => "endo",
            DeclaredKind::Quasi => "quasi",
        };
        let pairs: Vec<String> =
            r.relation.generator_pairs().iter().map(|(a, b)| format!("[{}, {}]", show_vector(a), show_vector(b))).collect();
        out += &format!("{keyword} {name}\n  group = {}\n  pairs = [{}]\n", r.group, pairs.join(", "));
    }
    for (name, r) in &ws.rings {
        let kind = match r.ring.kind() {
            RingKind::PreRing => "pre",
            RingKind::NearRing => "near",
        };
        out += &format!(
            "ring {name} kind={kind} generators=[{}] identity={}\n",
            r.generators.join(", "),
            r.ring.identity_included()
        );
    }
    out
}

impl Workspace {
    /// The group a name refers to: a group, or the group of a relation or ring.
    pub fn group_of(&self, name: &str) -> Option<&FgAbGroup> {
        self.groups
            .get(name)
            .or_else(|| self.relations.get(name).map(|r| &self.groups[&r.group]))
            .or_else(|| self.rings.get(name).map(|r| &self.groups[&r.group]))
    }

    /// Relations named directly, or the generators of a named ring.
    pub fn relations_named(&self, name: &str) -> Option<Vec<BiRelation>> {
        self.relations
            .get(name)
            .map(|r| vec![r.relation.clone()])
            .or_else(|| self.rings.get(name).map(|r| r.ring.generators().to_vec()))
    }
}
