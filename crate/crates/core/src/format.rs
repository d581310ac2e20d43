//! Shared text formats.
//!
//! Trees are declared one item per line: `vertex <id>` and
//! `edge <id> <v1> <v2> <len>` with rational lengths `num/den`. Comments
//! start with `#`. Measures extend a tree with `atom <point> <mass>` and
//! `density <edge> <mass>` lines; maps with `vmap <v> <v'>` and
//! `emap <e> <e'> <t:y> ...` lines (identity pieces may be omitted);
//! actions with `backend pl|symbolic`, `rank <m>` and `gen <name> <word>`
//! or `gen <name> <mapfile>` lines. Point specs are `v:<id>` or
//! `e:<id>:<num>/<den>`; bare tokens name vertices.

use std::collections::BTreeMap;

use crate::action::{FGAction, PlAction, SymAction};
use crate::dynamics::{PLBijection, PLHomeo};
use crate::measure::TreeMeasure;
use crate::subdendrite::SubDendrite;
use crate::symbolic::FreeModel;
use crate::tree::{Dendrite, EdgeId, Point, VertexId};
use crate::words::Word;
use crate::{Error, Rational, Result};

/// A dendrite with user-facing vertex and edge names.
#[derive(Clone, Debug)]
pub struct NamedTree {
    pub tree: Dendrite,
    vnames: Vec<String>,
    enames: Vec<String>,
    vids: BTreeMap<String, VertexId>,
    eids: BTreeMap<String, EdgeId>,
}

impl NamedTree {
    /// Wraps a bare dendrite with its numeric names.
    pub fn from_tree(tree: Dendrite) -> NamedTree {
        let mut vnames = Vec::new();
        let mut vids = BTreeMap::new();
        for v in tree.vertices() {
            let name = format!("v{}", v.0);
            vids.insert(name.clone(), v);
            vnames.push(name);
        }
        let mut enames = Vec::new();
        let mut eids = BTreeMap::new();
        for e in tree.edge_ids() {
            let name = format!("e{}", e.0);
            eids.insert(name.clone(), e);
            enames.push(name);
        }
        // names indexed by id order requires contiguous ids; fall back to
        // lookup through the maps otherwise
        NamedTree { tree, vnames, enames, vids, eids }
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vids.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.eids.get(name).copied()
    }

    pub fn vertex_name(&self, v: VertexId) -> String {
        self.vids
            .iter()
            .find(|(_, id)| **id == v)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| format!("v{}", v.0))
    }

    pub fn edge_name(&self, e: EdgeId) -> String {
        self.eids
            .iter()
            .find(|(_, id)| **id == e)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| format!("e{}", e.0))
    }

    pub fn point_display(&self, p: &Point) -> String {
        match p {
            Point::Vertex(v) => format!("v:{}", self.vertex_name(*v)),
            Point::Interior(e, t) => format!("e:{}:{}", self.edge_name(*e), rational_str(t)),
        }
    }

    pub fn subdendrite_display(&self, s: &SubDendrite) -> String {
        let verts: Vec<String> = s.full_vertices().map(|v| self.vertex_name(v)).collect();
        let edges: Vec<String> = s.full_edges().map(|e| self.edge_name(e)).collect();
        let parts: Vec<String> = s
            .partials()
            .map(|(e, a, b)| format!("{}[{},{}]", self.edge_name(e), rational_str(&a), rational_str(&b)))
            .collect();
        format!(
            "verts:{};edges:{};part:{}",
            verts.join(","),
            edges.join(","),
            parts.join(",")
        )
    }

    /// Parses `v:<id>`, `e:<id>:<t>`, or a bare vertex name.
    pub fn parse_point(&self, spec: &str) -> Result<Point> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: msg.into(),
            token: spec.into(),
        };
        if let Some(rest) = spec.strip_prefix("v:") {
            let v = self.vertex_id(rest).ok_or_else(|| bad("unknown vertex"))?;
            return Ok(Point::Vertex(v));
        }
        if let Some(rest) = spec.strip_prefix("e:") {
            let (ename, t) = rest
                .rsplit_once(':')
                .ok_or_else(|| bad("expected e:<id>:<num>/<den>"))?;
            let e = self.edge_id(ename).ok_or_else(|| bad("unknown edge"))?;
            let t = parse_rational(t).ok_or_else(|| bad("bad parameter"))?;
            return self.tree.point_on(e, t);
        }
        let v = self.vertex_id(spec).ok_or_else(|| bad("unknown vertex"))?;
        Ok(Point::Vertex(v))
    }

    /// Parses a comma- or whitespace-separated list of point specs.
    pub fn parse_points(&self, spec: &str) -> Result<Vec<Point>> {
        spec.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| self.parse_point(tok))
            .collect()
    }
}

pub fn rational_str(v: &Rational) -> String {
    use num_traits::One;
    if v.denom().is_one() {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    use num_bigint::BigInt;
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn perr(line: usize, msg: impl Into<String>, token: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
        token: token.into(),
    }
}

/// Parses the tree text format.
pub fn parse_tree(text: &str) -> Result<NamedTree> {
    let mut vnames: Vec<String> = Vec::new();
    let mut vids: BTreeMap<String, VertexId> = BTreeMap::new();
    let mut enames: Vec<String> = Vec::new();
    let mut eids: BTreeMap<String, EdgeId> = BTreeMap::new();
    let mut edges: Vec<(EdgeId, VertexId, VertexId, Rational)> = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks.as_slice() {
            ["vertex", name] => {
                if vids.contains_key(*name) {
                    return Err(perr(line, "duplicate vertex", *name));
                }
                let id = VertexId(vnames.len() as u32);
                vids.insert((*name).into(), id);
                vnames.push((*name).into());
            }
            ["edge", name, a, b, len] => {
                if eids.contains_key(*name) {
                    return Err(perr(line, "duplicate edge", *name));
                }
                let va = *vids
                    .get(*a)
                    .ok_or_else(|| perr(line, "unknown vertex", *a))?;
                let vb = *vids
                    .get(*b)
                    .ok_or_else(|| perr(line, "unknown vertex", *b))?;
                let l = parse_rational(len).ok_or_else(|| perr(line, "bad length", *len))?;
                let id = EdgeId(enames.len() as u32);
                eids.insert((*name).into(), id);
                enames.push((*name).into());
                edges.push((id, va, vb, l));
            }
            [kw, ..] => return Err(perr(line, "unknown declaration", *kw)),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    let tree = Dendrite::new((0..vnames.len() as u32).map(VertexId), edges)
        .map_err(|e| perr(0, format!("invalid tree: {e}"), ""))?;
    Ok(NamedTree { tree, vnames, enames, vids, eids })
}

/// Serializes a named tree back to the text format.
pub fn serialize_tree(t: &NamedTree) -> String {
    let mut out = String::new();
    for name in &t.vnames {
        out.push_str(&format!("vertex {name}\n"));
    }
    for name in &t.enames {
        let e = t.eids[name];
        let edge = t.tree.edge(e).unwrap();
        out.push_str(&format!(
            "edge {name} {} {} {}\n",
            t.vertex_name(edge.ends.0),
            t.vertex_name(edge.ends.1),
            rational_str(&edge.length)
        ));
    }
    out
}

/// Parses the measure format against a loaded tree.
pub fn parse_measure(text: &str, t: &NamedTree) -> Result<TreeMeasure> {
    let mut atoms: Vec<(Point, Rational)> = Vec::new();
    let mut densities: Vec<(EdgeId, Rational)> = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks.as_slice() {
            ["atom", spec, mass] => {
                let p = t.parse_point(spec)?;
                let m = parse_rational(mass).ok_or_else(|| perr(line, "bad mass", *mass))?;
                atoms.push((p, m));
            }
            ["density", ename, mass] => {
                let e = t
                    .edge_id(ename)
                    .ok_or_else(|| perr(line, "unknown edge", *ename))?;
                let m = parse_rational(mass).ok_or_else(|| perr(line, "bad mass", *mass))?;
                densities.push((e, m));
            }
            [kw, ..] => return Err(perr(line, "unknown declaration", *kw)),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    TreeMeasure::new(&t.tree, atoms, densities)
}

/// Parses the map format against a loaded tree.
pub fn parse_map(text: &str, t: &NamedTree) -> Result<PLHomeo> {
    let mut vmap: Vec<(VertexId, VertexId)> = Vec::new();
    let mut emaps: Vec<(EdgeId, PLBijection)> = Vec::new();
    let mut declared: Vec<(usize, EdgeId, EdgeId)> = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks.as_slice() {
            ["vmap", a, b] => {
                let va = t
                    .vertex_id(a)
                    .ok_or_else(|| perr(line, "unknown vertex", *a))?;
                let vb = t
                    .vertex_id(b)
                    .ok_or_else(|| perr(line, "unknown vertex", *b))?;
                vmap.push((va, vb));
            }
            ["emap", e, target, rest @ ..] => {
                let ee = t
                    .edge_id(e)
                    .ok_or_else(|| perr(line, "unknown edge", *e))?;
                let te = t
                    .edge_id(target)
                    .ok_or_else(|| perr(line, "unknown target edge", *target))?;
                declared.push((line, ee, te));
                let mut pts = Vec::new();
                for tok in rest {
                    let (x, y) = tok
                        .split_once(':')
                        .ok_or_else(|| perr(line, "expected t:y", *tok))?;
                    let x = parse_rational(x).ok_or_else(|| perr(line, "bad breakpoint", *tok))?;
                    let y = parse_rational(y).ok_or_else(|| perr(line, "bad breakpoint", *tok))?;
                    pts.push((x, y));
                }
                let pl = PLBijection::new(pts)
                    .map_err(|err| perr(line, format!("bad edge map: {err}"), *e))?;
                emaps.push((ee, pl));
            }
            [kw, ..] => return Err(perr(line, "unknown declaration", *kw)),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    let g = PLHomeo::new(t.tree.clone(), vmap, emaps)?;
    for (line, e, te) in declared {
        if g.edge_image(e).0 != te {
            return Err(perr(
                line,
                "declared target contradicts the vertex map",
                t.edge_name(e),
            ));
        }
    }
    Ok(g)
}

/// Serializes a homeomorphism; identity pieces are omitted.
pub fn serialize_map(g: &PLHomeo, t: &NamedTree) -> String {
    let mut out = String::new();
    for (a, b) in g.vertex_pairs() {
        if a != b {
            out.push_str(&format!("vmap {} {}\n", t.vertex_name(a), t.vertex_name(b)));
        }
    }
    for e in g.domain().edge_ids() {
        let (f, pl) = g.edge_image(e);
        if e == f && *pl == PLBijection::identity() {
            continue;
        }
        let bps: Vec<String> = pl
            .breakpoints()
            .iter()
            .map(|(x, y)| format!("{}:{}", rational_str(x), rational_str(y)))
            .collect();
        out.push_str(&format!(
            "emap {} {} {}\n",
            t.edge_name(e),
            t.edge_name(f),
            bps.join(" ")
        ));
    }
    out
}

/// Parses the action format. PL actions need the ambient tree; generator
/// map files are resolved through the `load` callback.
pub fn parse_action(
    text: &str,
    tree: Option<&NamedTree>,
    load: &dyn Fn(&str) -> Result<String>,
) -> Result<FGAction> {
    let mut backend: Option<&str> = None;
    let mut rank: Option<u8> = None;
    let mut raw_gens: Vec<(usize, String, String)> = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks.as_slice() {
            ["backend", kind] => backend = Some(*kind),
            ["rank", m] => {
                rank = Some(
                    m.parse()
                        .map_err(|_| perr(line, "bad rank", *m))?,
                )
            }
            ["gen", name, body] => raw_gens.push((line, (*name).into(), (*body).into())),
            [kw, ..] => return Err(perr(line, "unknown declaration", *kw)),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    match backend {
        Some("symbolic") => {
            let rank = rank.ok_or_else(|| perr(0, "symbolic actions need a rank", ""))?;
            let model = FreeModel::new(rank)?;
            let mut gens = Vec::new();
            for (line, name, body) in raw_gens {
                let w = Word::parse(&body)
                    .map_err(|e| perr(line, format!("bad word: {e}"), body.clone()))?;
                model.check_word(&w)?;
                gens.push((name, w));
            }
            if gens.is_empty() {
                return Err(perr(0, "action needs at least one generator", ""));
            }
            Ok(FGAction::Symbolic(SymAction { model, gens }))
        }
        Some("pl") => {
            let t = tree.ok_or_else(|| perr(0, "pl actions need a tree", ""))?;
            let mut gens = Vec::new();
            for (line, name, body) in raw_gens {
                let text = load(&body)
                    .map_err(|e| perr(line, format!("cannot load map: {e}"), body.clone()))?;
                let g = parse_map(&text, t)?;
                gens.push((name, g));
            }
            if gens.is_empty() {
                return Err(perr(0, "action needs at least one generator", ""));
            }
            Ok(FGAction::Pl(PlAction { domain: t.tree.clone(), gens }))
        }
        Some(other) => Err(perr(0, "unknown backend", other)),
        None => Err(perr(0, "missing backend declaration", "")),
    }
}
