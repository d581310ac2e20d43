//! Closed connected subsets of a finite dendrite in canonical form, and the
//! order/arc/hull/component toolkit built on them.
//!
//! A [`SubDendrite`] stores full vertices, full edges and at most one closed
//! partial interval per edge. Canonical form: a partial interval equal to the
//! whole edge becomes a full edge, interval endpoints lying on vertices are
//! absorbed into the vertex set, and full edges list both endpoints. Two
//! values represent the same subset iff they are structurally equal.

use std::collections::{BTreeMap, BTreeSet};

use crate::tree::{Dendrite, EdgeId, Point, VertexId};
use crate::{rat_one, rat_zero, Error, Rational, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubDendrite {
    verts: BTreeSet<VertexId>,
    full: BTreeSet<EdgeId>,
    part: BTreeMap<EdgeId, (Rational, Rational)>,
}

/// One direction at a point: the component of the complement of `base`
/// entered through `edge` toward the endpoint `toward`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DirectionGerm {
    pub base: Point,
    pub edge: EdgeId,
    pub toward: VertexId,
}

impl std::fmt::Display for DirectionGerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}>{}", self.edge, self.toward)
    }
}

/// The unique arc between two points, with its carrier set and an ordered
/// edge-interval traversal from `a` to `b`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    pub a: Point,
    pub b: Point,
    pub carrier: SubDendrite,
    legs: Vec<(EdgeId, Rational, Rational)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SquareTag {
    Triple012,
    Triple123,
}

impl std::fmt::Display for SquareTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SquareTag::Triple012 => write!(f, "012"),
            SquareTag::Triple123 => write!(f, "123"),
        }
    }
}

impl SubDendrite {
    /// The subset consisting of a single point.
    pub fn point(d: &Dendrite, p: &Point) -> Result<Self> {
        if !d.contains_point(p) {
            return Err(Error::PointNotFound(format!("{p}")));
        }
        let mut s = SubDendrite {
            verts: BTreeSet::new(),
            full: BTreeSet::new(),
            part: BTreeMap::new(),
        };
        match p {
            Point::Vertex(v) => {
                s.verts.insert(*v);
            }
            Point::Interior(e, t) => {
                s.part.insert(*e, (t.clone(), t.clone()));
            }
        }
        Ok(s)
    }

    /// The whole dendrite as a subset.
    pub fn whole(d: &Dendrite) -> Self {
        SubDendrite {
            verts: d.vertices().collect(),
            full: d.edge_ids().collect(),
            part: BTreeMap::new(),
        }
    }

    /// Assembles a subset from raw pieces, canonicalizes, and validates
    /// non-emptiness and connectedness.
    pub fn from_pieces(
        d: &Dendrite,
        verts: impl IntoIterator<Item = VertexId>,
        full: impl IntoIterator<Item = EdgeId>,
        intervals: impl IntoIterator<Item = (EdgeId, Rational, Rational)>,
    ) -> Result<Self> {
        let mut s = SubDendrite {
            verts: verts.into_iter().collect(),
            full: full.into_iter().collect(),
            part: BTreeMap::new(),
        };
        let mut per_edge: BTreeMap<EdgeId, Vec<(Rational, Rational)>> = BTreeMap::new();
        for (e, lo, hi) in intervals {
            if lo > hi || lo < rat_zero() || hi > rat_one() {
                return Err(Error::invalid(format!("bad interval [{lo},{hi}] on {e}")));
            }
            per_edge.entry(e).or_default().push((lo, hi));
        }
        for (e, mut list) in per_edge {
            // the union of traces on one edge must stay a single interval
            list.sort();
            let (lo, mut hi) = list[0].clone();
            for (a, b) in list.into_iter().skip(1) {
                if a > hi {
                    return Err(Error::invalid(format!("disconnected trace on edge {e}")));
                }
                if b > hi {
                    hi = b;
                }
            }
            s.part.insert(e, (lo, hi));
        }
        s.canonicalize(d)?;
        if s.is_empty() {
            return Err(Error::Empty("empty subset".into()));
        }
        if !s.is_connected(d) {
            return Err(Error::invalid("subset is not connected"));
        }
        Ok(s)
    }

    fn canonicalize(&mut self, d: &Dendrite) -> Result<()> {
        let mut to_full = Vec::new();
        let mut to_drop = Vec::new();
        for (e, (a, b)) in &self.part {
            let edge = d
                .edge(*e)
                .ok_or_else(|| Error::PointNotFound(format!("{e}")))?;
            if self.full.contains(e) {
                to_drop.push(*e);
                continue;
            }
            if *a == rat_zero() && *b == rat_one() {
                to_full.push(*e);
                continue;
            }
            if a == b {
                if *a == rat_zero() {
                    self.verts.insert(edge.ends.0);
                    to_drop.push(*e);
                } else if *a == rat_one() {
                    self.verts.insert(edge.ends.1);
                    to_drop.push(*e);
                }
                continue;
            }
            if *a == rat_zero() {
                self.verts.insert(edge.ends.0);
            }
            if *b == rat_one() {
                self.verts.insert(edge.ends.1);
            }
        }
        for e in to_drop {
            self.part.remove(&e);
        }
        for e in to_full {
            self.part.remove(&e);
            self.full.insert(e);
        }
        for e in &self.full {
            let edge = d
                .edge(*e)
                .ok_or_else(|| Error::PointNotFound(format!("{e}")))?;
            self.verts.insert(edge.ends.0);
            self.verts.insert(edge.ends.1);
        }
        for v in &self.verts {
            if !d.has_vertex(*v) {
                return Err(Error::PointNotFound(format!("{v}")));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty() && self.full.is_empty() && self.part.is_empty()
    }

    pub fn full_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.verts.iter().copied()
    }

    pub fn full_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.full.iter().copied()
    }

    pub fn partials(&self) -> impl Iterator<Item = (EdgeId, Rational, Rational)> + '_ {
        self.part.iter().map(|(e, (a, b))| (*e, a.clone(), b.clone()))
    }

    /// Point-set trace on the closed edge `e`, as a closed subinterval.
    pub fn trace(&self, d: &Dendrite, e: EdgeId) -> Option<(Rational, Rational)> {
        if self.full.contains(&e) {
            return Some((rat_zero(), rat_one()));
        }
        if let Some((a, b)) = self.part.get(&e) {
            return Some((a.clone(), b.clone()));
        }
        let edge = d.edge(e)?;
        let has_src = self.verts.contains(&edge.ends.0);
        let has_tgt = self.verts.contains(&edge.ends.1);
        debug_assert!(
            !(has_src && has_tgt),
            "adjacent vertices force a full edge in a connected set"
        );
        if has_src {
            Some((rat_zero(), rat_zero()))
        } else if has_tgt {
            Some((rat_one(), rat_one()))
        } else {
            None
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => self.verts.contains(v),
            Point::Interior(e, t) => {
                self.full.contains(e)
                    || self
                        .part
                        .get(e)
                        .map(|(a, b)| a <= t && t <= b)
                        .unwrap_or(false)
            }
        }
    }

    /// Number of directions at `p` within the subset.
    pub fn order_within(&self, d: &Dendrite, p: &Point) -> usize {
        if !self.contains(p) {
            return 0;
        }
        match p {
            Point::Vertex(v) => {
                let mut n = 0;
                for (e, _) in d.neighbors(*v) {
                    if let Some((a, b)) = self.trace(d, *e) {
                        let forward = d.edge(*e).unwrap().ends.0 == *v;
                        let has_dir = if forward {
                            a == rat_zero() && b > rat_zero()
                        } else {
                            b == rat_one() && a < rat_one()
                        };
                        if has_dir {
                            n += 1;
                        }
                    }
                }
                n
            }
            Point::Interior(e, t) => {
                let (a, b) = self.trace(d, *e).unwrap();
                usize::from(*t > a) + usize::from(*t < b)
            }
        }
    }

    /// Points with at most one direction within the subset.
    pub fn extremities(&self, d: &Dendrite) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for v in &self.verts {
            if self.order_within(d, &Point::Vertex(*v)) <= 1 {
                out.push(Point::Vertex(*v));
            }
        }
        for (e, (a, b)) in &self.part {
            for t in [a, b] {
                if *t > rat_zero() && *t < rat_one() {
                    let p = Point::Interior(*e, t.clone());
                    if self.order_within(d, &p) <= 1 && !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// True when every point of the subset has at most two directions in it.
    pub fn is_arc_like(&self, d: &Dendrite) -> bool {
        self.verts
            .iter()
            .all(|v| self.order_within(d, &Point::Vertex(*v)) <= 2)
    }

    /// The point, when the subset is a singleton.
    pub fn the_point(&self) -> Option<Point> {
        if self.full.is_empty() && self.part.is_empty() && self.verts.len() == 1 {
            return Some(Point::Vertex(*self.verts.iter().next().unwrap()));
        }
        if self.verts.is_empty() && self.full.is_empty() && self.part.len() == 1 {
            let (e, (a, b)) = self.part.iter().next().unwrap();
            if a == b {
                return Some(Point::Interior(*e, a.clone()));
            }
        }
        None
    }

    /// A canonical representative point.
    pub fn some_point(&self) -> Point {
        if let Some(v) = self.verts.iter().next() {
            return Point::Vertex(*v);
        }
        let (e, (a, _)) = self.part.iter().next().expect("subset is non-empty");
        Point::Interior(*e, a.clone())
    }

    fn is_connected(&self, d: &Dendrite) -> bool {
        // nodes: vertices, full edges, partial intervals; link pieces that
        // share a point
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
        enum Node {
            V(VertexId),
            E(EdgeId),
            P(EdgeId),
        }
        let mut nodes: Vec<Node> = Vec::new();
        nodes.extend(self.verts.iter().map(|v| Node::V(*v)));
        nodes.extend(self.full.iter().map(|e| Node::E(*e)));
        nodes.extend(self.part.keys().map(|e| Node::P(*e)));
        if nodes.len() <= 1 {
            return true;
        }
        let index: BTreeMap<Node, usize> =
            nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        fn find(uf: &mut Vec<usize>, i: usize) -> usize {
            if uf[i] != i {
                let r = find(uf, uf[i]);
                uf[i] = r;
            }
            uf[i]
        }
        let mut uf: Vec<usize> = (0..nodes.len()).collect();
        let join = |uf: &mut Vec<usize>, a: Node, b: Node| {
            let (x, y) = (find(uf, index[&a]), find(uf, index[&b]));
            uf[x] = y;
        };
        for e in &self.full {
            let ends = d.edge(*e).unwrap().ends;
            join(&mut uf, Node::E(*e), Node::V(ends.0));
            join(&mut uf, Node::E(*e), Node::V(ends.1));
        }
        for (e, (a, b)) in &self.part {
            let ends = d.edge(*e).unwrap().ends;
            if *a == rat_zero() {
                join(&mut uf, Node::P(*e), Node::V(ends.0));
            }
            if *b == rat_one() {
                join(&mut uf, Node::P(*e), Node::V(ends.1));
            }
        }
        let root = find(&mut uf, 0);
        (1..nodes.len()).all(|i| find(&mut uf, i) == root)
    }

    /// Exact intersection; `None` when empty. The intersection of two closed
    /// connected subsets of a dendrite is connected.
    pub fn intersect(&self, d: &Dendrite, other: &Self) -> Option<Self> {
        let mut verts: BTreeSet<VertexId> =
            self.verts.intersection(&other.verts).copied().collect();
        let mut full: BTreeSet<EdgeId> = BTreeSet::new();
        let mut part: BTreeMap<EdgeId, (Rational, Rational)> = BTreeMap::new();
        let edges: BTreeSet<EdgeId> = self
            .full
            .iter()
            .chain(self.part.keys())
            .chain(other.full.iter())
            .chain(other.part.keys())
            .copied()
            .collect();
        for e in edges {
            let (t1, t2) = match (self.trace(d, e), other.trace(d, e)) {
                (Some(a), Some(b)) => (a, b),
                _ => continue,
            };
            let lo = t1.0.max(t2.0);
            let hi = t1.1.min(t2.1);
            if lo > hi {
                continue;
            }
            let ends = d.edge(e).unwrap().ends;
            if lo == rat_zero() && hi == rat_one() {
                full.insert(e);
                verts.insert(ends.0);
                verts.insert(ends.1);
            } else if lo == hi {
                if lo == rat_zero() {
                    verts.insert(ends.0);
                } else if lo == rat_one() {
                    verts.insert(ends.1);
                } else {
                    part.insert(e, (lo, hi));
                }
            } else {
                if lo == rat_zero() {
                    verts.insert(ends.0);
                }
                if hi == rat_one() {
                    verts.insert(ends.1);
                }
                part.insert(e, (lo, hi));
            }
        }
        let s = SubDendrite { verts, full, part };
        if s.is_empty() {
            return None;
        }
        debug_assert!(s.is_connected(d), "intersection of connected sets");
        Some(s)
    }

    /// Union of two overlapping connected subsets (the caller guarantees the
    /// union is connected; this is asserted).
    pub fn union_connected(&self, d: &Dendrite, other: &Self) -> Self {
        let mut s = self.clone();
        s.verts.extend(other.verts.iter().copied());
        s.full.extend(other.full.iter().copied());
        for (e, (a, b)) in &other.part {
            if s.full.contains(e) {
                continue;
            }
            match s.part.get_mut(e) {
                None => {
                    s.part.insert(*e, (a.clone(), b.clone()));
                }
                Some((lo, hi)) => {
                    assert!(
                        !(a > hi || *lo > *b),
                        "union traces must overlap on {e}"
                    );
                    if a < lo {
                        *lo = a.clone();
                    }
                    if b > hi {
                        *hi = b.clone();
                    }
                }
            }
        }
        s.canonicalize(d).expect("union of valid subsets");
        debug_assert!(s.is_connected(d));
        s
    }

    /// Image of the subset in a subdivision of the same dendrite.
    pub fn map_to_subdivision(&self, sub: &crate::tree::Subdivision) -> SubDendrite {
        let mut verts: BTreeSet<VertexId> = self.verts.clone();
        let mut full: BTreeSet<EdgeId> = BTreeSet::new();
        let mut part: BTreeMap<EdgeId, (Rational, Rational)> = BTreeMap::new();
        let mut handle = |e: EdgeId, a: Rational, b: Rational| {
            for (lo, hi, se) in sub.segments_of(e) {
                let x = a.clone().max(lo.clone());
                let y = b.clone().min(hi.clone());
                if x > y {
                    continue;
                }
                let w = hi.clone() - lo.clone();
                let la = (x - lo.clone()) / w.clone();
                let lb = (y - lo.clone()) / w;
                let ends = sub.tree.edge(se).unwrap().ends;
                if la == rat_zero() && lb == rat_one() {
                    full.insert(se);
                    verts.insert(ends.0);
                    verts.insert(ends.1);
                } else if la == lb {
                    if la == rat_zero() {
                        verts.insert(ends.0);
                    } else if la == rat_one() {
                        verts.insert(ends.1);
                    } else {
                        part.insert(se, (la, lb));
                    }
                } else {
                    if la == rat_zero() {
                        verts.insert(ends.0);
                    }
                    if lb == rat_one() {
                        verts.insert(ends.1);
                    }
                    part.insert(se, (la, lb));
                }
            }
        };
        for e in &self.full {
            handle(*e, rat_zero(), rat_one());
        }
        for (e, (a, b)) in &self.part {
            handle(*e, a.clone(), b.clone());
        }
        SubDendrite { verts, full, part }
    }

    /// Vertices, partial endpoints and midpoints of contained edges: a
    /// subdivision-scale sample of the subset.
    pub fn sample_points(&self, d: &Dendrite) -> Vec<Point> {
        let mut pts: Vec<Point> = self.verts.iter().map(|v| Point::Vertex(*v)).collect();
        for e in &self.full {
            pts.push(Point::Interior(*e, crate::rat(1, 2)));
        }
        for (e, (a, b)) in &self.part {
            for t in [a.clone(), (a.clone() + b) / crate::rat(2, 1), b.clone()] {
                let p = d.point_on(*e, t).unwrap();
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        pts.sort();
        pts.dedup();
        pts
    }
}

/// The unique arc between two points of the dendrite.
pub fn arc(d: &Dendrite, x: &Point, y: &Point) -> Result<Arc> {
    if !d.contains_point(x) {
        return Err(Error::PointNotFound(format!("{x}")));
    }
    if !d.contains_point(y) {
        return Err(Error::PointNotFound(format!("{y}")));
    }
    if x == y {
        return Ok(Arc {
            a: x.clone(),
            b: y.clone(),
            carrier: SubDendrite::point(d, x)?,
            legs: Vec::new(),
        });
    }
    if let (Point::Interior(e, s), Point::Interior(f, t)) = (x, y) {
        if e == f {
            let (lo, hi) = if s < t {
                (s.clone(), t.clone())
            } else {
                (t.clone(), s.clone())
            };
            let carrier = SubDendrite::from_pieces(d, [], [], [(*e, lo, hi)])?;
            return Ok(Arc {
                a: x.clone(),
                b: y.clone(),
                carrier,
                legs: vec![(*e, s.clone(), t.clone())],
            });
        }
    }
    // gate: the vertex through which the arc leaves the point's edge,
    // plus the partial leg on that edge (ordered from the point outwards)
    let anchor = |p: &Point| -> VertexId {
        match p {
            Point::Vertex(v) => *v,
            Point::Interior(e, _) => d.edge(*e).unwrap().ends.0,
        }
    };
    let gate = |p: &Point, far: &Point| -> (VertexId, Option<(EdgeId, Rational, Rational)>) {
        match p {
            Point::Vertex(v) => (*v, None),
            Point::Interior(e, t) => {
                let (u, v) = d.edge(*e).unwrap().ends;
                // far lies on the v-side of this edge iff the path from u to
                // its anchor passes through v
                let a = anchor(far);
                let far_on_v_side = if a == u {
                    false
                } else if a == v {
                    true
                } else {
                    d.vertex_path(u, a).contains(&v)
                };
                if far_on_v_side {
                    (v, Some((*e, t.clone(), rat_one())))
                } else {
                    (u, Some((*e, t.clone(), rat_zero())))
                }
            }
        }
    };
    let (gx, leg_x) = gate(x, y);
    let (gy, leg_y) = gate(y, x);
    let path = d.vertex_path(gx, gy);
    let full: Vec<EdgeId> = d.path_edges(gx, gy).into_iter().map(|(e, _)| e).collect();
    let mut intervals: Vec<(EdgeId, Rational, Rational)> = Vec::new();
    let mut legs: Vec<(EdgeId, Rational, Rational)> = Vec::new();
    if let Some((e, from, to)) = &leg_x {
        legs.push((*e, from.clone(), to.clone()));
        let (lo, hi) = if from < to {
            (from.clone(), to.clone())
        } else {
            (to.clone(), from.clone())
        };
        intervals.push((*e, lo, hi));
    }
    for (e, forward) in d.path_edges(gx, gy) {
        legs.push(if forward {
            (e, rat_zero(), rat_one())
        } else {
            (e, rat_one(), rat_zero())
        });
    }
    if let Some((e, to, from)) = &leg_y {
        // the stored leg runs from y outwards; the arc traverses it inwards
        legs.push((*e, from.clone(), to.clone()));
        let (lo, hi) = if from < to {
            (from.clone(), to.clone())
        } else {
            (to.clone(), from.clone())
        };
        intervals.push((*e, lo, hi));
    }
    let carrier = SubDendrite::from_pieces(d, path, full, intervals)?;
    Ok(Arc {
        a: x.clone(),
        b: y.clone(),
        carrier,
        legs,
    })
}

impl Arc {
    pub fn length(&self, d: &Dendrite) -> Rational {
        self.legs
            .iter()
            .map(|(e, from, to)| {
                let len = &d.edge(*e).unwrap().length;
                let span = if from < to { to - from } else { from - to };
                span * len
            })
            .sum()
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// The point at arc-length `s` from endpoint `a`.
    pub fn point_at(&self, d: &Dendrite, s: &Rational) -> Result<Point> {
        if *s < rat_zero() {
            return Err(Error::invalid("negative arc parameter"));
        }
        if *s == rat_zero() {
            return Ok(self.a.clone());
        }
        let mut rest = s.clone();
        for (e, from, to) in &self.legs {
            let len = &d.edge(*e).unwrap().length;
            let span = if from < to { to - from } else { from - to };
            let leg_len = span * len;
            if rest <= leg_len {
                let frac = rest / len;
                let t = if from < to { from + frac } else { from - frac };
                return d.point_on(*e, t);
            }
            rest -= leg_len;
        }
        if rest == rat_zero() {
            return Ok(self.b.clone());
        }
        Err(Error::invalid("arc parameter exceeds length"))
    }

    pub fn midpoint(&self, d: &Dendrite) -> Result<Point> {
        let half = self.length(d) / crate::rat(2, 1);
        self.point_at(d, &half)
    }
}

/// Smallest closed connected superset of a non-empty set of points.
pub fn hull(d: &Dendrite, points: &[Point]) -> Result<SubDendrite> {
    let first = points
        .first()
        .ok_or_else(|| Error::Empty("hull of empty point set".into()))?;
    let mut acc = SubDendrite::point(d, first)?;
    for p in &points[1..] {
        let a = arc(d, first, p)?;
        acc = acc.union_connected(d, &a.carrier);
    }
    Ok(acc)
}

/// Closures of the connected components of the complement of `p`, each
/// tagged with its direction germ at `p`, sorted by germ.
pub fn components_minus(d: &Dendrite, p: &Point) -> Result<Vec<(DirectionGerm, SubDendrite)>> {
    if !d.contains_point(p) {
        return Err(Error::PointNotFound(format!("{p}")));
    }
    let mut out = Vec::new();
    match p {
        Point::Vertex(v) => {
            for (e, w) in d.neighbors(*v).to_vec() {
                let mut verts: BTreeSet<VertexId> = BTreeSet::from([*v, w]);
                let mut full: BTreeSet<EdgeId> = BTreeSet::from([e]);
                let mut stack = vec![w];
                while let Some(cur) = stack.pop() {
                    for (e2, w2) in d.neighbors(cur) {
                        if *w2 == *v || full.contains(e2) {
                            continue;
                        }
                        full.insert(*e2);
                        if verts.insert(*w2) {
                            stack.push(*w2);
                        }
                    }
                }
                let germ = DirectionGerm {
                    base: p.clone(),
                    edge: e,
                    toward: w,
                };
                let s = SubDendrite {
                    verts,
                    full,
                    part: BTreeMap::new(),
                };
                out.push((germ, s));
            }
        }
        Point::Interior(e, t) => {
            let (u, v) = d.edge(*e).unwrap().ends;
            for (end, side) in [(u, (rat_zero(), t.clone())), (v, (t.clone(), rat_one()))] {
                let mut verts: BTreeSet<VertexId> = BTreeSet::from([end]);
                let mut full: BTreeSet<EdgeId> = BTreeSet::new();
                let mut stack = vec![end];
                while let Some(cur) = stack.pop() {
                    for (e2, w2) in d.neighbors(cur) {
                        if *e2 == *e || full.contains(e2) {
                            continue;
                        }
                        full.insert(*e2);
                        if verts.insert(*w2) {
                            stack.push(*w2);
                        }
                    }
                }
                let mut part = BTreeMap::new();
                part.insert(*e, side);
                let germ = DirectionGerm {
                    base: p.clone(),
                    edge: *e,
                    toward: end,
                };
                let mut s = SubDendrite { verts, full, part };
                s.canonicalize(d).expect("component pieces are valid");
                out.push((germ, s));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// The closure of the component of the complement of `s` containing `t`.
pub fn u_side(d: &Dendrite, s: &Point, t: &Point) -> Result<SubDendrite> {
    if s == t {
        return Err(Error::invalid("u_side requires two distinct points"));
    }
    for (_, comp) in components_minus(d, s)? {
        if comp.contains(t) {
            return Ok(comp);
        }
    }
    Err(Error::PointNotFound(format!("{t}")))
}

/// The germ at `s` of the component containing `t`.
pub fn germ_toward(d: &Dendrite, s: &Point, t: &Point) -> Result<DirectionGerm> {
    if s == t {
        return Err(Error::invalid("no germ toward the base point"));
    }
    for (germ, comp) in components_minus(d, s)? {
        if comp.contains(t) {
            return Ok(germ);
        }
    }
    Err(Error::PointNotFound(format!("{t}")))
}

/// The unique point common to the three pairwise arcs.
pub fn median(d: &Dendrite, p: &Point, q: &Point, r: &Point) -> Result<Point> {
    let pq = arc(d, p, q)?.carrier;
    let qr = arc(d, q, r)?.carrier;
    let rp = arc(d, r, p)?.carrier;
    let m = pq
        .intersect(d, &qr)
        .and_then(|s| s.intersect(d, &rp))
        .ok_or_else(|| Error::Internal("pairwise arcs always meet".into()))?;
    m.the_point()
        .ok_or_else(|| Error::Internal("median is a single point".into()))
}

/// Exact intersection of a family; `None` encodes the empty set.
pub fn helly_intersection(d: &Dendrite, family: &[SubDendrite]) -> Result<Option<SubDendrite>> {
    let (first, rest) = family
        .split_first()
        .ok_or_else(|| Error::Empty("empty family".into()))?;
    let mut acc = first.clone();
    for s in rest {
        match acc.intersect(d, s) {
            Some(next) => acc = next,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// Given four closed connected sets with cyclically non-empty pairwise
/// intersections, finds a consecutive triple with common intersection.
/// Ties break to the lower tag.
pub fn square_reduction(d: &Dendrite, z: &[SubDendrite; 4]) -> Result<(SquareTag, Point)> {
    for i in 0..4 {
        let j = (i + 1) % 4;
        if z[i].intersect(d, &z[j]).is_none() {
            return Err(Error::invalid(format!(
                "cyclic precondition fails: z{i} and z{j} are disjoint"
            )));
        }
    }
    if let Some(w) = z[0]
        .intersect(d, &z[1])
        .and_then(|s| s.intersect(d, &z[2]))
    {
        return Ok((SquareTag::Triple012, w.some_point()));
    }
    if let Some(w) = z[1]
        .intersect(d, &z[2])
        .and_then(|s| s.intersect(d, &z[3]))
    {
        return Ok((SquareTag::Triple123, w.some_point()));
    }
    Err(Error::Internal(
        "a cyclically intersecting square admits a consecutive triple".into(),
    ))
}

/// The unique point of `y` lying on every arc from `p` into `y`;
/// equals `p` when `p` is in `y`.
pub fn first_point_retraction(d: &Dendrite, y: &SubDendrite, p: &Point) -> Result<Point> {
    if y.contains(p) {
        return Ok(p.clone());
    }
    let y0 = y.some_point();
    let a = arc(d, p, &y0)?;
    let c = a
        .carrier
        .intersect(d, y)
        .ok_or_else(|| Error::Internal("arc into the set meets it".into()))?;
    if let Some(pt) = c.the_point() {
        return Ok(pt);
    }
    let mut best: Option<(Rational, Point)> = None;
    for q in c.extremities(d) {
        let dist = d.distance(p, &q)?;
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, q));
        }
    }
    Ok(best.expect("intersection has extremities").1)
}

/// Exact distance from a point to a closed connected subset.
pub fn distance_to_set(d: &Dendrite, p: &Point, s: &SubDendrite) -> Result<Rational> {
    let r = first_point_retraction(d, s, p)?;
    d.distance(p, &r)
}

/// Exact Hausdorff distance between two closed connected subsets.
pub fn hausdorff(d: &Dendrite, s: &SubDendrite, t: &SubDendrite) -> Result<Rational> {
    Ok(directed_hausdorff(d, s, t)?.max(directed_hausdorff(d, t, s)?))
}

fn directed_hausdorff(d: &Dendrite, s: &SubDendrite, t: &SubDendrite) -> Result<Rational> {
    let mut best = rat_zero();
    let consider = |val: Rational, best: &mut Rational| {
        if val > *best {
            *best = val;
        }
    };
    for v in s.full_vertices() {
        consider(distance_to_set(d, &Point::Vertex(v), t)?, &mut best);
    }
    // per edge segment of s, maximize the piecewise-linear distance function
    let mut segments: Vec<(EdgeId, Rational, Rational)> = Vec::new();
    for e in s.full_edges() {
        segments.push((e, rat_zero(), rat_one()));
    }
    for (e, a, b) in s.partials() {
        segments.push((e, a, b));
    }
    for (e, lo, hi) in segments {
        let edge = d.edge(e).unwrap();
        let len = edge.length.clone();
        let (u, v) = edge.ends;
        // the distance from (e, t) to the target is the minimum of the
        // in-edge route (a V shape around the target trace, a max of lines)
        // and the two routes through the endpoints (single lines)
        let in_trace = t.trace(d, e);
        let du = distance_to_set(d, &Point::Vertex(u), t)?;
        let dv = distance_to_set(d, &Point::Vertex(v), t)?;
        let route_u = (len.clone(), du);
        let route_v = (-len.clone(), dv + &len);
        let mut lines: Vec<(Rational, Rational)> = vec![route_u.clone(), route_v.clone()];
        let mut candidates: Vec<Rational> = vec![lo.clone(), hi.clone()];
        if let Some((c, dd)) = &in_trace {
            lines.push((-len.clone(), c.clone() * &len));
            lines.push((len.clone(), -dd.clone() * &len));
            lines.push((rat_zero(), rat_zero()));
            candidates.push(c.clone());
            candidates.push(dd.clone());
        }
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (m1, b1) = &lines[i];
                let (m2, b2) = &lines[j];
                if m1 != m2 {
                    let x = (b2.clone() - b1) / (m1.clone() - m2);
                    candidates.push(x);
                }
            }
        }
        let eval_line = |l: &(Rational, Rational), t0: &Rational| l.0.clone() * t0 + &l.1;
        for t0 in candidates {
            if t0 < lo || t0 > hi {
                continue;
            }
            let mut val = eval_line(&route_u, &t0).min(eval_line(&route_v, &t0));
            if let Some((c, dd)) = &in_trace {
                let inside = rat_zero()
                    .max((c.clone() - &t0) * &len)
                    .max((t0.clone() - dd) * &len);
                val = val.min(inside);
            }
            consider(val, &mut best);
        }
    }
    Ok(best)
}

/// Closures of the connected components of the complement of a closed
/// connected subset.
pub fn complement_closures(d: &Dendrite, s: &SubDendrite) -> Vec<SubDendrite> {
    let cuts: Vec<Point> = s
        .partials()
        .flat_map(|(e, a, b)| [Point::Interior(e, a), Point::Interior(e, b)])
        .filter(|p| d.contains_point(p))
        .collect();
    let sub = d.subdivide(&cuts);
    let st = &sub.tree;
    let ss = s.map_to_subdivision(&sub);
    let covered_edges: BTreeSet<EdgeId> = ss.full_edges().collect();
    let covered_verts: BTreeSet<VertexId> = ss.full_vertices().collect();
    debug_assert_eq!(ss.partials().count(), 0, "cut traces are whole edges");
    let free_edges: Vec<EdgeId> = st
        .edge_ids()
        .filter(|e| !covered_edges.contains(e))
        .collect();
    if free_edges.is_empty() {
        return Vec::new();
    }
    let index: BTreeMap<EdgeId, usize> =
        free_edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    fn find(uf: &mut Vec<usize>, i: usize) -> usize {
        if uf[i] != i {
            let r = find(uf, uf[i]);
            uf[i] = r;
        }
        uf[i]
    }
    let mut uf: Vec<usize> = (0..free_edges.len()).collect();
    for v in st.vertices() {
        if covered_verts.contains(&v) {
            continue;
        }
        let incident: Vec<EdgeId> = st
            .neighbors(v)
            .iter()
            .map(|(e, _)| *e)
            .filter(|e| !covered_edges.contains(e))
            .collect();
        for w in incident.windows(2) {
            let (x, y) = (find(&mut uf, index[&w[0]]), find(&mut uf, index[&w[1]]));
            uf[x] = y;
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for e in &free_edges {
        groups.entry(find(&mut uf, index[e])).or_default().push(*e);
    }
    groups
        .into_values()
        .map(|edges| {
            let mut verts: BTreeSet<VertexId> = BTreeSet::new();
            for e in &edges {
                let (u, v) = st.edge(*e).unwrap().ends;
                verts.insert(u);
                verts.insert(v);
            }
            let comp = SubDendrite::from_pieces(st, verts, edges, [])
                .expect("complement component closure is connected");
            crate::dynamics::subdendrite_to_orig(&sub, &comp)
        })
        .collect()
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_points(d: &Dendrite, a: &[Point], b: &[Point]) -> Result<Rational> {
    let dir = |xs: &[Point], ys: &[Point]| -> Result<Rational> {
        let mut worst = rat_zero();
        for x in xs {
            let mut best: Option<Rational> = None;
            for y in ys {
                let dd = d.distance(x, y)?;
                if best.as_ref().is_none_or(|b| dd < *b) {
                    best = Some(dd);
                }
            }
            let best = best.ok_or_else(|| Error::Empty("empty point set".into()))?;
            if best > worst {
                worst = best;
            }
        }
        Ok(worst)
    };
    Ok(dir(a, b)?.max(dir(b, a)?))
}
