//! Piecewise-linear homeomorphisms of finite metric trees and their
//! dynamics: exact fixed sets, austro-boreal arcs, and the tectonic
//! decomposition into translation-like open pieces and a fixed kernel.
//!
//! A [`PLHomeo`] is a tree automorphism of a designated subdivision together
//! with a strictly monotone piecewise-linear bijection per edge. Everything
//! about such a map is decidable: fixed sets are finite unions of points and
//! closed intervals with rational endpoints.

use std::collections::{BTreeMap, BTreeSet};

use crate::measure::TreeMeasure;
use crate::subdendrite::{arc, Arc, SubDendrite};
use crate::tree::{Dendrite, EdgeId, Point, Subdivision, VertexId};
use crate::{rat_one, rat_zero, Error, Rational, Result};

/// Strictly monotone piecewise-linear bijection of the unit interval,
/// stored as its breakpoints. Endpoints map onto {0, 1}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PLBijection {
    pts: Vec<(Rational, Rational)>,
}

impl PLBijection {
    pub fn new(pts: Vec<(Rational, Rational)>) -> Result<Self> {
        if pts.len() < 2 {
            return Err(Error::invalid("a PL bijection needs at least two breakpoints"));
        }
        if pts[0].0 != rat_zero() || pts[pts.len() - 1].0 != rat_one() {
            return Err(Error::invalid("breakpoint abscissas must span [0,1]"));
        }
        for w in pts.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::invalid("breakpoint abscissas must increase strictly"));
            }
        }
        let inc = pts[0].1 < pts[pts.len() - 1].1;
        for w in pts.windows(2) {
            let ok = if inc { w[0].1 < w[1].1 } else { w[0].1 > w[1].1 };
            if !ok {
                return Err(Error::invalid("breakpoint values must be strictly monotone"));
            }
        }
        let (y0, y1) = (pts[0].1.clone(), pts[pts.len() - 1].1.clone());
        let span_ok = (y0 == rat_zero() && y1 == rat_one()) || (y0 == rat_one() && y1 == rat_zero());
        if !span_ok {
            return Err(Error::invalid("breakpoint values must span {0,1}"));
        }
        Ok(PLBijection { pts: Self::drop_collinear(pts) })
    }

    // canonical form: no breakpoint lies on the segment of its neighbors,
    // so equal functions are structurally equal
    fn drop_collinear(pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(pts.len());
        for p in pts {
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let lhs = (b.1.clone() - &a.1) * (p.0.clone() - &a.0);
                let rhs = (p.1.clone() - &a.1) * (b.0.clone() - &a.0);
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        out
    }

    pub fn identity() -> Self {
        PLBijection {
            pts: vec![(rat_zero(), rat_zero()), (rat_one(), rat_one())],
        }
    }

    /// The orientation-reversing linear map t -> 1 - t.
    pub fn reversal() -> Self {
        PLBijection {
            pts: vec![(rat_zero(), rat_one()), (rat_one(), rat_zero())],
        }
    }

    pub fn is_increasing(&self) -> bool {
        self.pts[0].1 < self.pts[self.pts.len() - 1].1
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.pts
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        debug_assert!(*t >= rat_zero() && *t <= rat_one());
        for w in self.pts.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if t >= x0 && t <= x1 {
                let slope = (y1.clone() - y0) / (x1.clone() - x0);
                return y0.clone() + slope * (t.clone() - x0);
            }
        }
        unreachable!("parameter inside [0,1]");
    }

    pub fn inverse(&self) -> Self {
        let mut pts: Vec<(Rational, Rational)> =
            self.pts.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        PLBijection { pts: Self::drop_collinear(pts) }
    }

    /// Function composition `self` after `inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let inner_inv = inner.inverse();
        let mut xs: Vec<Rational> = inner.pts.iter().map(|(x, _)| x.clone()).collect();
        for (x, _) in &self.pts {
            xs.push(inner_inv.eval(x));
        }
        xs.sort();
        xs.dedup();
        let pts: Vec<(Rational, Rational)> = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&inner.eval(&x));
                (x, y)
            })
            .collect();
        PLBijection { pts: Self::drop_collinear(pts) }
    }

    /// Maximal closed intervals (possibly degenerate) where eval(t) = t.
    pub fn fixed_intervals(&self) -> Vec<(Rational, Rational)> {
        let mut out: Vec<(Rational, Rational)> = Vec::new();
        for w in self.pts.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if y0 == x0 && y1 == x1 {
                out.push((x0.clone(), x1.clone()));
                continue;
            }
            let slope = (y1.clone() - y0) / (x1.clone() - x0);
            if slope == rat_one() {
                continue; // parallel to the diagonal, off it
            }
            let t = (y0.clone() - slope.clone() * x0) / (rat_one() - slope);
            if t >= *x0 && t <= *x1 {
                out.push((t.clone(), t));
            }
        }
        out.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (a, b) in out {
            match merged.last_mut() {
                Some((_, hi)) if a <= *hi => {
                    if b > *hi {
                        *hi = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        merged
    }
}

/// A closed subset of the dendrite: finitely many vertices and closed edge
/// intervals, in canonical form. Unlike [`SubDendrite`] it need not be
/// connected; fixed-point sets live here.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ClosedSet {
    verts: BTreeSet<VertexId>,
    ivals: BTreeMap<EdgeId, Vec<(Rational, Rational)>>,
}

impl ClosedSet {
    pub fn empty() -> Self {
        ClosedSet::default()
    }

    pub fn from_pieces(
        d: &Dendrite,
        verts: impl IntoIterator<Item = VertexId>,
        intervals: impl IntoIterator<Item = (EdgeId, Rational, Rational)>,
    ) -> Result<Self> {
        let mut s = ClosedSet {
            verts: verts.into_iter().collect(),
            ivals: BTreeMap::new(),
        };
        for (e, a, b) in intervals {
            if a > b || a < rat_zero() || b > rat_one() {
                return Err(Error::invalid(format!("bad interval [{a},{b}] on {e}")));
            }
            s.ivals.entry(e).or_default().push((a, b));
        }
        s.canonicalize(d)?;
        Ok(s)
    }

    fn canonicalize(&mut self, d: &Dendrite) -> Result<()> {
        let mut cleaned: BTreeMap<EdgeId, Vec<(Rational, Rational)>> = BTreeMap::new();
        for (e, list) in std::mem::take(&mut self.ivals) {
            let edge = d
                .edge(e)
                .ok_or_else(|| Error::PointNotFound(format!("{e}")))?;
            let mut list = list;
            list.sort();
            let mut merged: Vec<(Rational, Rational)> = Vec::new();
            for (a, b) in list {
                match merged.last_mut() {
                    Some((_, hi)) if a <= *hi => {
                        if b > *hi {
                            *hi = b;
                        }
                    }
                    _ => merged.push((a, b)),
                }
            }
            let mut kept: Vec<(Rational, Rational)> = Vec::new();
            for (a, b) in merged {
                if a == b {
                    if a == rat_zero() {
                        self.verts.insert(edge.ends.0);
                    } else if a == rat_one() {
                        self.verts.insert(edge.ends.1);
                    } else {
                        kept.push((a, b));
                    }
                    continue;
                }
                if a == rat_zero() {
                    self.verts.insert(edge.ends.0);
                }
                if b == rat_one() {
                    self.verts.insert(edge.ends.1);
                }
                kept.push((a, b));
            }
            if !kept.is_empty() {
                cleaned.insert(e, kept);
            }
        }
        self.ivals = cleaned;
        for v in &self.verts {
            if !d.has_vertex(*v) {
                return Err(Error::PointNotFound(format!("{v}")));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty() && self.ivals.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.verts.iter().copied()
    }

    pub fn intervals(&self) -> impl Iterator<Item = (EdgeId, Rational, Rational)> + '_ {
        self.ivals
            .iter()
            .flat_map(|(e, list)| list.iter().map(|(a, b)| (*e, a.clone(), b.clone())))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => self.verts.contains(v),
            Point::Interior(e, t) => self
                .ivals
                .get(e)
                .map(|list| list.iter().any(|(a, b)| a <= t && t <= b))
                .unwrap_or(false),
        }
    }

    pub fn union(&self, d: &Dendrite, other: &Self) -> Self {
        let mut s = self.clone();
        s.verts.extend(other.verts.iter().copied());
        for (e, list) in &other.ivals {
            s.ivals.entry(*e).or_default().extend(list.iter().cloned());
        }
        s.canonicalize(d).expect("union of valid closed sets");
        s
    }

    pub fn intersect(&self, d: &Dendrite, other: &Self) -> Self {
        let mut verts: BTreeSet<VertexId> =
            self.verts.intersection(&other.verts).copied().collect();
        let mut ivals: BTreeMap<EdgeId, Vec<(Rational, Rational)>> = BTreeMap::new();
        // vertex-versus-interval touches are captured by canonical form:
        // an interval reaching an edge end lists the end vertex
        for (e, list) in &self.ivals {
            if let Some(other_list) = other.ivals.get(e) {
                let mut pieces = Vec::new();
                for (a, b) in list {
                    for (c, dd) in other_list {
                        let lo = a.clone().max(c.clone());
                        let hi = b.clone().min(dd.clone());
                        if lo <= hi {
                            pieces.push((lo, hi));
                        }
                    }
                }
                if !pieces.is_empty() {
                    ivals.insert(*e, pieces);
                }
            }
        }
        // one side's vertex lying inside the other's interval
        for (a, b) in [(self, other), (other, self)] {
            for v in &a.verts {
                if b.contains(&Point::Vertex(*v)) {
                    verts.insert(*v);
                }
            }
        }
        let mut s = ClosedSet { verts, ivals };
        s.canonicalize(d).expect("intersection of valid closed sets");
        s
    }

    pub fn intersect_subdendrite(&self, d: &Dendrite, s: &SubDendrite) -> ClosedSet {
        let mut other = ClosedSet {
            verts: s.full_vertices().collect(),
            ivals: BTreeMap::new(),
        };
        for e in s.full_edges() {
            other.ivals.insert(e, vec![(rat_zero(), rat_one())]);
        }
        for (e, a, b) in s.partials() {
            other.ivals.entry(e).or_default().push((a, b));
        }
        self.intersect(d, &other)
    }

    /// Connected components, each as a sub-dendrite.
    pub fn components(&self, d: &Dendrite) -> Vec<SubDendrite> {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        enum Node {
            V(VertexId),
            I(EdgeId, usize),
        }
        let mut nodes: Vec<Node> = self.verts.iter().map(|v| Node::V(*v)).collect();
        for (e, list) in &self.ivals {
            for i in 0..list.len() {
                nodes.push(Node::I(*e, i));
            }
        }
        if nodes.is_empty() {
            return Vec::new();
        }
        let index: BTreeMap<Node, usize> =
            nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut uf: Vec<usize> = (0..nodes.len()).collect();
        fn find(uf: &mut Vec<usize>, i: usize) -> usize {
            if uf[i] != i {
                let r = find(uf, uf[i]);
                uf[i] = r;
            }
            uf[i]
        }
        for (e, list) in &self.ivals {
            let ends = d.edge(*e).unwrap().ends;
            for (i, (a, b)) in list.iter().enumerate() {
                if *a == rat_zero() {
                    let (x, y) = (find(&mut uf, index[&Node::I(*e, i)]), find(&mut uf, index[&Node::V(ends.0)]));
                    uf[x] = y;
                }
                if *b == rat_one() {
                    let (x, y) = (find(&mut uf, index[&Node::I(*e, i)]), find(&mut uf, index[&Node::V(ends.1)]));
                    uf[x] = y;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Node>> = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            groups.entry(find(&mut uf, i)).or_default().push(*n);
        }
        groups
            .into_values()
            .map(|group| {
                let mut verts: Vec<VertexId> = Vec::new();
                let mut intervals: Vec<(EdgeId, Rational, Rational)> = Vec::new();
                for n in group {
                    match n {
                        Node::V(v) => verts.push(v),
                        Node::I(e, i) => {
                            let (a, b) = self.ivals[&e][i].clone();
                            intervals.push((e, a, b));
                        }
                    }
                }
                SubDendrite::from_pieces(d, verts, [], intervals)
                    .expect("closed-set component is connected")
            })
            .collect()
    }

    pub fn is_connected(&self, d: &Dendrite) -> bool {
        self.components(d).len() <= 1
    }

    /// Maps the set into a subdivision of the same tree.
    pub fn map_to_subdivision(&self, sub: &Subdivision) -> ClosedSet {
        let verts: BTreeSet<VertexId> = self.verts.clone();
        let mut ivals: BTreeMap<EdgeId, Vec<(Rational, Rational)>> = BTreeMap::new();
        for (e, list) in &self.ivals {
            for (a, b) in list {
                for (lo, hi, se) in sub.segments_of(*e) {
                    let x = a.clone().max(lo.clone());
                    let y = b.clone().min(hi.clone());
                    if x > y {
                        continue;
                    }
                    let w = hi.clone() - lo.clone();
                    ivals
                        .entry(se)
                        .or_default()
                        .push(((x - lo.clone()) / w.clone(), (y - lo) / w));
                }
            }
        }
        let mut s = ClosedSet { verts, ivals };
        s.canonicalize(&sub.tree).expect("mapped closed set is valid");
        s
    }
}

/// A piecewise-linear self-homeomorphism of a finite metric tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PLHomeo {
    domain: Dendrite,
    vmap: BTreeMap<VertexId, VertexId>,
    emaps: BTreeMap<EdgeId, (EdgeId, PLBijection)>,
}

impl PLHomeo {
    /// Builds a homeomorphism from a (possibly partial) vertex bijection and
    /// per-edge overrides; omitted vertices map to themselves and omitted
    /// edges carry the induced linear map.
    pub fn new(
        domain: Dendrite,
        vmap: impl IntoIterator<Item = (VertexId, VertexId)>,
        emaps: impl IntoIterator<Item = (EdgeId, PLBijection)>,
    ) -> Result<Self> {
        let mut vm: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for (a, b) in vmap {
            if !domain.has_vertex(a) || !domain.has_vertex(b) {
                return Err(Error::PointNotFound(format!("{a} -> {b}")));
            }
            if vm.insert(a, b).is_some() {
                return Err(Error::invalid(format!("duplicate vertex image for {a}")));
            }
        }
        for v in domain.vertices() {
            vm.entry(v).or_insert(v);
        }
        let image: BTreeSet<VertexId> = vm.values().copied().collect();
        if image.len() != domain.vertex_count() {
            return Err(Error::invalid("vertex map is not a bijection"));
        }
        let overrides: BTreeMap<EdgeId, PLBijection> = emaps.into_iter().collect();
        let mut em: BTreeMap<EdgeId, (EdgeId, PLBijection)> = BTreeMap::new();
        for e in domain.edge_ids() {
            let (u, v) = domain.edge(e).unwrap().ends;
            let (iu, iv) = (vm[&u], vm[&v]);
            let target = domain.edge_between(iu, iv).ok_or_else(|| {
                Error::invalid(format!("vertex map does not preserve adjacency at {e}"))
            })?;
            let stored = domain.edge(target).unwrap().ends;
            let needs_increasing = stored.0 == iu;
            let pl = match overrides.get(&e) {
                Some(pl) => pl.clone(),
                None => {
                    if needs_increasing {
                        PLBijection::identity()
                    } else {
                        PLBijection::reversal()
                    }
                }
            };
            if pl.is_increasing() != needs_increasing {
                return Err(Error::invalid(format!(
                    "edge map orientation on {e} contradicts the vertex map"
                )));
            }
            em.insert(e, (target, pl));
        }
        Ok(PLHomeo {
            domain,
            vmap: vm,
            emaps: em,
        })
    }

    pub fn identity(domain: Dendrite) -> Self {
        PLHomeo::new(domain, [], []).expect("identity is always valid")
    }

    pub fn from_automorphism(
        domain: Dendrite,
        vmap: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        PLHomeo::new(domain, vmap, [])
    }

    pub fn domain(&self) -> &Dendrite {
        &self.domain
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vmap[&v]
    }

    pub fn vertex_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.vmap.iter().map(|(a, b)| (*a, *b)).collect()
    }

    pub fn edge_image(&self, e: EdgeId) -> (EdgeId, &PLBijection) {
        let (f, pl) = &self.emaps[&e];
        (*f, pl)
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Vertex(v) => {
                let w = self
                    .vmap
                    .get(v)
                    .ok_or_else(|| Error::PointNotFound(format!("{v}")))?;
                Ok(Point::Vertex(*w))
            }
            Point::Interior(e, t) => {
                let (f, pl) = self
                    .emaps
                    .get(e)
                    .ok_or_else(|| Error::PointNotFound(format!("{e}")))?;
                self.domain.point_on(*f, pl.eval(t))
            }
        }
    }

    /// Transports a direction germ (edge, far endpoint) at a vertex.
    pub fn apply_germ(&self, germ: (EdgeId, VertexId)) -> (EdgeId, VertexId) {
        let (f, _) = &self.emaps[&germ.0];
        (*f, self.vmap[&germ.1])
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(
                "composition needs a common subdivision".into(),
            ));
        }
        let vmap: BTreeMap<VertexId, VertexId> = other
            .vmap
            .iter()
            .map(|(v, w)| (*v, self.vmap[w]))
            .collect();
        let mut emaps: BTreeMap<EdgeId, (EdgeId, PLBijection)> = BTreeMap::new();
        for (e, (f, pl1)) in &other.emaps {
            let (g, pl2) = &self.emaps[f];
            emaps.insert(*e, (*g, pl2.compose(pl1)));
        }
        Ok(PLHomeo {
            domain: self.domain.clone(),
            vmap,
            emaps,
        })
    }

    pub fn inverse(&self) -> Self {
        let vmap: BTreeMap<VertexId, VertexId> =
            self.vmap.iter().map(|(v, w)| (*w, *v)).collect();
        let emaps: BTreeMap<EdgeId, (EdgeId, PLBijection)> = self
            .emaps
            .iter()
            .map(|(e, (f, pl))| (*f, (*e, pl.inverse())))
            .collect();
        PLHomeo {
            domain: self.domain.clone(),
            vmap,
            emaps,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vmap.iter().all(|(v, w)| v == w)
            && self
                .emaps
                .iter()
                .all(|(e, (f, pl))| e == f && *pl == PLBijection::identity())
    }

    /// Smallest positive power equal to the identity, up to `cap`.
    pub fn order(&self, cap: u32) -> Option<u32> {
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc.is_identity() {
                return Some(k);
            }
            acc = self.compose(&acc).expect("same domain");
        }
        None
    }

    pub fn image_subdendrite(&self, s: &SubDendrite) -> SubDendrite {
        let verts: Vec<VertexId> = s.full_vertices().map(|v| self.vmap[&v]).collect();
        let full: Vec<EdgeId> = s.full_edges().map(|e| self.emaps[&e].0).collect();
        let mut intervals: Vec<(EdgeId, Rational, Rational)> = Vec::new();
        for (e, a, b) in s.partials() {
            let (f, pl) = &self.emaps[&e];
            let (x, y) = (pl.eval(&a), pl.eval(&b));
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            intervals.push((*f, lo, hi));
        }
        SubDendrite::from_pieces(&self.domain, verts, full, intervals)
            .expect("homeomorphic image of a connected set")
    }

    pub fn image_closed(&self, s: &ClosedSet) -> ClosedSet {
        let verts: Vec<VertexId> = s.vertices().map(|v| self.vmap[&v]).collect();
        let mut intervals: Vec<(EdgeId, Rational, Rational)> = Vec::new();
        for (e, a, b) in s.intervals() {
            let (f, pl) = &self.emaps[&e];
            let (x, y) = (pl.eval(&a), pl.eval(&b));
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            intervals.push((*f, lo, hi));
        }
        ClosedSet::from_pieces(&self.domain, verts, intervals)
            .expect("homeomorphic image of a closed set")
    }

    /// Pushforward of a measure. Defined when every edge map is linear, so
    /// uniform densities stay uniform.
    pub fn pushforward(&self, m: &TreeMeasure) -> Result<TreeMeasure> {
        for (e, (_, pl)) in &self.emaps {
            if pl.breakpoints().len() != 2 {
                return Err(Error::Unsupported(format!(
                    "pushforward needs linear edge maps; {e} has breakpoints"
                )));
            }
        }
        let atoms: Vec<(Point, Rational)> = m
            .atoms()
            .map(|(p, mass)| Ok((self.apply(p)?, mass.clone())))
            .collect::<Result<_>>()?;
        let densities: Vec<(EdgeId, Rational)> = m
            .densities()
            .map(|(e, mass)| (self.emaps[&e].0, mass.clone()))
            .collect();
        TreeMeasure::new(&self.domain, atoms, densities)
    }

    /// Exact solution set of g(x) = x.
    pub fn fixed_set(&self) -> ClosedSet {
        let verts: Vec<VertexId> = self
            .vmap
            .iter()
            .filter(|(v, w)| v == w)
            .map(|(v, _)| *v)
            .collect();
        let mut intervals: Vec<(EdgeId, Rational, Rational)> = Vec::new();
        for (e, (f, pl)) in &self.emaps {
            if e != f {
                continue;
            }
            for (a, b) in pl.fixed_intervals() {
                intervals.push((*e, a, b));
            }
        }
        ClosedSet::from_pieces(&self.domain, verts, intervals)
            .expect("fixed pieces are valid")
    }
}

/// All arcs whose endpoints are fixed and whose interior is free of fixed
/// points. Sorted by endpoints.
pub fn austro_boreal_arcs(g: &PLHomeo) -> Result<Vec<Arc>> {
    let d = g.domain();
    let fix = g.fixed_set();
    if fix.is_empty() {
        return Ok(Vec::new());
    }
    // refine so the fixed set becomes vertices plus whole edges
    let cuts: Vec<Point> = fix
        .intervals()
        .flat_map(|(e, a, b)| [Point::Interior(e, a), Point::Interior(e, b)])
        .filter(|p| d.contains_point(p))
        .collect();
    let sub = d.subdivide(&cuts);
    let fs = fix.map_to_subdivision(&sub);
    let st = &sub.tree;
    let fixed_vert: BTreeSet<VertexId> = fs.vertices().collect();
    let fixed_edge: BTreeSet<EdgeId> = fs
        .intervals()
        .map(|(e, a, b)| {
            debug_assert!(a == rat_zero() && b == rat_one(), "cuts cover interval ends");
            e
        })
        .collect();
    // components of the complement, keyed by representative edge
    let free_edges: Vec<EdgeId> = st
        .edge_ids()
        .filter(|e| !fixed_edge.contains(e))
        .collect();
    let index: BTreeMap<EdgeId, usize> =
        free_edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut uf: Vec<usize> = (0..free_edges.len()).collect();
    fn find(uf: &mut Vec<usize>, i: usize) -> usize {
        if uf[i] != i {
            let r = find(uf, uf[i]);
            uf[i] = r;
        }
        uf[i]
    }
    for v in st.vertices() {
        if fixed_vert.contains(&v) {
            continue;
        }
        let incident: Vec<EdgeId> = st
            .neighbors(v)
            .iter()
            .map(|(e, _)| *e)
            .filter(|e| !fixed_edge.contains(e))
            .collect();
        for w in incident.windows(2) {
            let (x, y) = (find(&mut uf, index[&w[0]]), find(&mut uf, index[&w[1]]));
            uf[x] = y;
        }
    }
    let mut boundary: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
    for e in &free_edges {
        let root = find(&mut uf, index[e]);
        let (u, v) = st.edge(*e).unwrap().ends;
        for w in [u, v] {
            if fixed_vert.contains(&w) {
                boundary.entry(root).or_default().insert(w);
            }
        }
    }
    let mut arcs: Vec<Arc> = Vec::new();
    let mut seen: BTreeSet<(Point, Point)> = BTreeSet::new();
    for (_, bnd) in boundary {
        let bnd: Vec<VertexId> = bnd.into_iter().collect();
        for i in 0..bnd.len() {
            for j in (i + 1)..bnd.len() {
                let (x, y) = (Point::Vertex(bnd[i]), Point::Vertex(bnd[j]));
                let a = arc(st, &x, &y)?;
                let inside = fs.intersect_subdendrite(st, &a.carrier);
                let only_ends = inside.intervals().count() == 0
                    && inside.vertices().collect::<BTreeSet<_>>()
                        == BTreeSet::from([bnd[i], bnd[j]]);
                if only_ends {
                    let (ox, oy) = (sub.to_orig(&x), sub.to_orig(&y));
                    let key = if ox <= oy {
                        (ox.clone(), oy.clone())
                    } else {
                        (oy.clone(), ox.clone())
                    };
                    if seen.insert(key.clone()) {
                        arcs.push(arc(d, &key.0, &key.1)?);
                    }
                }
            }
        }
    }
    arcs.sort_by_key(|p| (p.a.clone(), p.b.clone()));
    Ok(arcs)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FixVerdict {
    ConnectedFix,
    HasAustroBoreal,
}

impl std::fmt::Display for FixVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FixVerdict::ConnectedFix => write!(f, "ConnectedFix"),
            FixVerdict::HasAustroBoreal => write!(f, "HasAustroBoreal"),
        }
    }
}

/// Exactly one of: the fixed set is connected, or some austro-boreal arc
/// exists.
pub fn fix_dichotomy(g: &PLHomeo) -> Result<FixVerdict> {
    let fix = g.fixed_set();
    if fix.is_connected(g.domain()) {
        Ok(FixVerdict::ConnectedFix)
    } else {
        Ok(FixVerdict::HasAustroBoreal)
    }
}

/// One translation-like open piece of the decomposition.
#[derive(Clone, Debug)]
pub struct OpenPiece {
    pub arc: Arc,
    /// Closure of the open component around the arc.
    pub closure: SubDendrite,
    pub boundary: (Point, Point),
    /// A compact fundamental segment on the arc whose translates cover the
    /// open piece of the arc.
    pub fundamental: (Point, Point),
}

#[derive(Clone, Debug)]
pub struct KernelComponent {
    pub set: SubDendrite,
    pub fixed: ClosedSet,
}

#[derive(Clone, Debug)]
pub struct TectonicDecomposition {
    pub pieces: Vec<OpenPiece>,
    pub kernel: Vec<KernelComponent>,
}

/// Splits the dendrite into the open pieces around austro-boreal arcs and
/// the closed kernel on which the map has connected fixed sets.
pub fn tectonic(g: &PLHomeo) -> Result<TectonicDecomposition> {
    let d = g.domain();
    let arcs = austro_boreal_arcs(g)?;
    let fix = g.fixed_set();
    let cuts: Vec<Point> = arcs
        .iter()
        .flat_map(|a| [a.a.clone(), a.b.clone()])
        .filter(|p| matches!(p, Point::Interior(..)))
        .collect();
    let sub = d.subdivide(&cuts);
    let st = &sub.tree;
    let mut covered_edges: BTreeSet<EdgeId> = BTreeSet::new();
    let mut covered_verts: BTreeSet<VertexId> = BTreeSet::new();
    let mut pieces: Vec<OpenPiece> = Vec::new();
    for a in &arcs {
        let (x, y) = (sub.to_sub(&a.a), sub.to_sub(&a.b));
        let (vx, vy) = match (&x, &y) {
            (Point::Vertex(vx), Point::Vertex(vy)) => (*vx, *vy),
            _ => unreachable!("arc endpoints were cut to vertices"),
        };
        // edges of the component of the complement of {x, y} that contains
        // the arc interior: flood from the arc's first edge
        let arc_sub = arc(st, &x, &y)?;
        let seed = arc_sub
            .carrier
            .full_edges()
            .next()
            .expect("non-degenerate arc has an edge");
        let mut comp_edges: BTreeSet<EdgeId> = BTreeSet::from([seed]);
        let mut frontier = vec![seed];
        while let Some(e) = frontier.pop() {
            let (u, v) = st.edge(e).unwrap().ends;
            for w in [u, v] {
                if w == vx || w == vy {
                    continue;
                }
                for (e2, _) in st.neighbors(w) {
                    if comp_edges.insert(*e2) {
                        frontier.push(*e2);
                    }
                }
            }
        }
        let mut comp_verts: BTreeSet<VertexId> = BTreeSet::new();
        for e in &comp_edges {
            let (u, v) = st.edge(*e).unwrap().ends;
            comp_verts.insert(u);
            comp_verts.insert(v);
        }
        covered_edges.extend(comp_edges.iter().copied());
        covered_verts.extend(comp_verts.iter().filter(|w| **w != vx && **w != vy));
        let closure_sub = SubDendrite::from_pieces(
            st,
            comp_verts.iter().copied(),
            comp_edges.iter().copied(),
            [],
        )
        .expect("component closure is connected");
        let closure = subdendrite_to_orig(&sub, &closure_sub);
        let p0 = a.midpoint(d)?;
        let p1 = g.apply(&p0)?;
        debug_assert_ne!(p0, p1, "austro-boreal interior moves");
        pieces.push(OpenPiece {
            arc: a.clone(),
            closure,
            boundary: (a.a.clone(), a.b.clone()),
            fundamental: (p0, p1),
        });
    }
    // kernel: everything not covered by an open piece
    let rem_edges: Vec<EdgeId> = st
        .edge_ids()
        .filter(|e| !covered_edges.contains(e))
        .collect();
    let rem_verts: Vec<VertexId> = st
        .vertices()
        .filter(|v| !covered_verts.contains(v))
        .collect();
    let index: BTreeMap<VertexId, usize> =
        rem_verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut uf: Vec<usize> = (0..rem_verts.len()).collect();
    fn find(uf: &mut Vec<usize>, i: usize) -> usize {
        if uf[i] != i {
            let r = find(uf, uf[i]);
            uf[i] = r;
        }
        uf[i]
    }
    for e in &rem_edges {
        let (u, v) = st.edge(*e).unwrap().ends;
        let (x, y) = (find(&mut uf, index[&u]), find(&mut uf, index[&v]));
        uf[x] = y;
    }
    let mut groups: BTreeMap<usize, (Vec<VertexId>, Vec<EdgeId>)> = BTreeMap::new();
    for v in &rem_verts {
        groups.entry(find(&mut uf, index[v])).or_default().0.push(*v);
    }
    for e in &rem_edges {
        let (u, _) = st.edge(*e).unwrap().ends;
        groups.entry(find(&mut uf, index[&u])).or_default().1.push(*e);
    }
    let mut kernel: Vec<KernelComponent> = Vec::new();
    for (_, (vs, es)) in groups {
        let comp_sub = SubDendrite::from_pieces(st, vs, es, [])
            .expect("kernel component is connected");
        let set = subdendrite_to_orig(&sub, &comp_sub);
        let fixed = fix.intersect_subdendrite(d, &set);
        kernel.push(KernelComponent { set, fixed });
    }
    kernel.sort_by_key(|k| k.set.some_point());
    Ok(TectonicDecomposition { pieces, kernel })
}

/// Maps a sub-dendrite expressed in subdivision coordinates back to the
/// original tree.
pub fn subdendrite_to_orig(sub: &Subdivision, s: &SubDendrite) -> SubDendrite {
    let d = &sub.original;
    let mut verts: Vec<VertexId> = Vec::new();
    let mut intervals: Vec<(EdgeId, Rational, Rational)> = Vec::new();
    for v in s.full_vertices() {
        match sub.to_orig(&Point::Vertex(v)) {
            Point::Vertex(w) => verts.push(w),
            Point::Interior(e, t) => intervals.push((e, t.clone(), t)),
        }
    }
    for se in s.full_edges() {
        let (e, lo, hi) = orig_span_of(sub, se);
        intervals.push((e, lo, hi));
    }
    for (se, a, b) in s.partials() {
        let (e, lo, hi) = orig_span_of(sub, se);
        let w = hi.clone() - lo.clone();
        intervals.push((e, lo.clone() + a * w.clone(), lo + b * w));
    }
    SubDendrite::from_pieces(d, verts, [], intervals)
        .expect("mapped subset stays connected")
}

fn orig_span_of(sub: &Subdivision, se: EdgeId) -> (EdgeId, Rational, Rational) {
    for e in sub.original.edge_ids() {
        for (lo, hi, s) in sub.segments_of(e) {
            if s == se {
                return (e, lo, hi);
            }
        }
    }
    unreachable!("every subdivision edge descends from an original edge");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn tripod() -> Dendrite {
        Dendrite::new(
            (0..4).map(VertexId),
            vec![
                (EdgeId(0), VertexId(0), VertexId(1), rat(1, 1)),
                (EdgeId(1), VertexId(0), VertexId(2), rat(1, 1)),
                (EdgeId(2), VertexId(0), VertexId(3), rat(1, 1)),
            ],
        )
        .unwrap()
    }

    fn single_edge() -> Dendrite {
        Dendrite::new(
            (0..2).map(VertexId),
            vec![(EdgeId(0), VertexId(0), VertexId(1), rat(1, 1))],
        )
        .unwrap()
    }

    fn rotation(d: &Dendrite) -> PLHomeo {
        PLHomeo::from_automorphism(
            d.clone(),
            [
                (VertexId(1), VertexId(2)),
                (VertexId(2), VertexId(3)),
                (VertexId(3), VertexId(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pl_bijection_algebra() {
        let f = PLBijection::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 2), rat(1, 4)),
            (rat(1, 1), rat(1, 1)),
        ])
        .unwrap();
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 4));
        assert_eq!(f.eval(&rat(3, 4)), rat(5, 8));
        let inv = f.inverse();
        assert_eq!(inv.eval(&rat(1, 4)), rat(1, 2));
        let id = f.compose(&inv);
        assert_eq!(id.eval(&rat(1, 3)), rat(1, 3));
        assert_eq!(id.eval(&rat(9, 10)), rat(9, 10));
        let r = PLBijection::reversal();
        assert!(!r.is_increasing());
        assert_eq!(r.compose(&r), PLBijection::identity().compose(&PLBijection::identity()));
    }

    #[test]
    fn pl_fixed_intervals() {
        // diagonal on [1/3, 2/3], strictly below before, strictly above after
        let f = PLBijection::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 6), rat(1, 12)),
            (rat(1, 3), rat(1, 3)),
            (rat(2, 3), rat(2, 3)),
            (rat(5, 6), rat(11, 12)),
            (rat(1, 1), rat(1, 1)),
        ])
        .unwrap();
        let fix = f.fixed_intervals();
        assert_eq!(
            fix,
            vec![
                (rat(0, 1), rat(0, 1)),
                (rat(1, 3), rat(2, 3)),
                (rat(1, 1), rat(1, 1))
            ]
        );
        let r = PLBijection::reversal();
        assert_eq!(r.fixed_intervals(), vec![(rat(1, 2), rat(1, 2))]);
    }

    #[test]
    fn rotation_dynamics() {
        let d = tripod();
        let g = rotation(&d);
        assert_eq!(
            g.apply(&Point::Vertex(VertexId(1))).unwrap(),
            Point::Vertex(VertexId(2))
        );
        assert_eq!(
            g.apply(&Point::Interior(EdgeId(0), rat(1, 3))).unwrap(),
            Point::Interior(EdgeId(1), rat(1, 3))
        );
        assert_eq!(g.order(5), Some(3));
        let gi = g.compose(&g.inverse()).unwrap();
        assert!(gi.is_identity());
        let fix = g.fixed_set();
        assert_eq!(fix.vertices().collect::<Vec<_>>(), vec![VertexId(0)]);
        assert_eq!(fix.intervals().count(), 0);
        assert_eq!(fix_dichotomy(&g).unwrap(), FixVerdict::ConnectedFix);
        assert!(austro_boreal_arcs(&g).unwrap().is_empty());
    }

    #[test]
    fn identity_tectonics() {
        let d = tripod();
        let g = PLHomeo::identity(d.clone());
        let t = tectonic(&g).unwrap();
        assert!(t.pieces.is_empty());
        assert_eq!(t.kernel.len(), 1);
        assert_eq!(t.kernel[0].set, SubDendrite::whole(&d));
        assert!(t.kernel[0].fixed.is_connected(&d));
    }

    #[test]
    fn translation_on_an_edge() {
        let d = single_edge();
        // f(t) > t strictly inside: one austro-boreal arc, the whole edge
        let f = PLBijection::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 2), rat(3, 4)),
            (rat(1, 1), rat(1, 1)),
        ])
        .unwrap();
        let g = PLHomeo::new(d.clone(), [], [(EdgeId(0), f)]).unwrap();
        let fix = g.fixed_set();
        assert_eq!(fix.vertices().count(), 2);
        assert_eq!(fix.intervals().count(), 0);
        assert!(!fix.is_connected(&d));
        assert_eq!(fix_dichotomy(&g).unwrap(), FixVerdict::HasAustroBoreal);
        let arcs = austro_boreal_arcs(&g).unwrap();
        assert_eq!(arcs.len(), 1);
        assert_eq!(arcs[0].length(&d), rat(1, 1));
        // orbits move strictly toward the attracting end
        let p = Point::Interior(EdgeId(0), rat(1, 10));
        let gp = g.apply(&p).unwrap();
        let ggp = g.apply(&gp).unwrap();
        match (&gp, &ggp) {
            (Point::Interior(_, t1), Point::Interior(_, t2)) => {
                assert!(rat(1, 10) < *t1 && t1 < t2);
            }
            _ => panic!("interior orbits stay interior"),
        }
    }

    #[test]
    fn interior_fixed_block_gives_two_arcs() {
        let d = single_edge();
        let f = PLBijection::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 6), rat(1, 12)),
            (rat(1, 3), rat(1, 3)),
            (rat(2, 3), rat(2, 3)),
            (rat(5, 6), rat(11, 12)),
            (rat(1, 1), rat(1, 1)),
        ])
        .unwrap();
        let g = PLHomeo::new(d.clone(), [], [(EdgeId(0), f)]).unwrap();
        let arcs = austro_boreal_arcs(&g).unwrap();
        assert_eq!(arcs.len(), 2);
        let t = tectonic(&g).unwrap();
        assert_eq!(t.pieces.len(), 2);
        assert_eq!(t.kernel.len(), 3);
        for k in &t.kernel {
            assert!(!k.fixed.is_empty());
            assert!(k.fixed.is_connected(&d));
            // the kernel component is invariant
            assert_eq!(g.image_subdendrite(&k.set), k.set);
        }
    }

    #[test]
    fn h_tree_rung_translation() {
        // rung v0-v1, leaves v2,v3 at v0 and v4,v5 at v1
        let d = Dendrite::new(
            (0..6).map(VertexId),
            vec![
                (EdgeId(0), VertexId(0), VertexId(1), rat(1, 1)),
                (EdgeId(1), VertexId(0), VertexId(2), rat(1, 1)),
                (EdgeId(2), VertexId(0), VertexId(3), rat(1, 1)),
                (EdgeId(3), VertexId(1), VertexId(4), rat(1, 1)),
                (EdgeId(4), VertexId(1), VertexId(5), rat(1, 1)),
            ],
        )
        .unwrap();
        let f = PLBijection::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 2), rat(2, 3)),
            (rat(1, 1), rat(1, 1)),
        ])
        .unwrap();
        let g = PLHomeo::new(d.clone(), [], [(EdgeId(0), f)]).unwrap();
        let arcs = austro_boreal_arcs(&g).unwrap();
        assert_eq!(arcs.len(), 1, "only the rung is austro-boreal");
        assert_eq!(arcs[0].a, Point::Vertex(VertexId(0)));
        assert_eq!(arcs[0].b, Point::Vertex(VertexId(1)));
        let t = tectonic(&g).unwrap();
        assert_eq!(t.pieces.len(), 1);
        // the open piece around the rung is the rung edge itself
        let rung = SubDendrite::from_pieces(&d, [VertexId(0), VertexId(1)], [EdgeId(0)], [])
            .unwrap();
        assert_eq!(t.pieces[0].closure, rung);
        // the kernel is the union of the four closed leaf edges; the two
        // edges at each rung end share a fixed endpoint, so it has two
        // connected components
        assert_eq!(t.kernel.len(), 2);
        let kernel_union: BTreeSet<EdgeId> = t
            .kernel
            .iter()
            .flat_map(|k| k.set.full_edges())
            .collect();
        assert_eq!(
            kernel_union,
            BTreeSet::from([EdgeId(1), EdgeId(2), EdgeId(3), EdgeId(4)])
        );
        for k in &t.kernel {
            assert_eq!(g.image_subdendrite(&k.set), k.set);
            assert!(k.fixed.is_connected(&d));
        }
    }

    #[test]
    fn pushforward_and_median_equivariance() {
        use crate::measure::{measure_median, TreeMeasure};
        let d = tripod();
        let g = rotation(&d);
        let m = TreeMeasure::new(
            &d,
            [(Point::Vertex(VertexId(1)), rat(1, 2))],
            [(EdgeId(1), rat(1, 4)), (EdgeId(2), rat(1, 4))],
        )
        .unwrap();
        let gm = g.pushforward(&m).unwrap();
        let med: Vec<Point> = measure_median(&d, &m).unwrap().into_iter().collect();
        let med_img: BTreeSet<Point> = med.iter().map(|p| g.apply(p).unwrap()).collect();
        let med_push = measure_median(&d, &gm).unwrap();
        assert_eq!(med_img, med_push);
    }

    #[test]
    fn compose_requires_same_domain() {
        let a = PLHomeo::identity(tripod());
        let b = PLHomeo::identity(single_edge());
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn finite_order_fixes_a_point() {
        let d = tripod();
        let g = rotation(&d);
        assert!(g.order(10).is_some());
        assert!(!g.fixed_set().is_empty());
    }
}
