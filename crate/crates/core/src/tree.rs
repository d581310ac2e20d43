//! Finite metric trees: the finite model of a dendrite.
//!
//! A [`Dendrite`] is a connected acyclic graph with strictly positive
//! rational edge lengths. Points are either vertices or interior edge
//! points with a rational parameter in the open unit interval; boundary
//! parameters canonicalize to vertices, so point equality is structural.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::{rat_one, rat_zero, Error, Rational, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub ends: (VertexId, VertexId),
    pub length: Rational,
}

/// A point of the dendrite: a vertex, or an interior edge point with
/// parameter strictly between 0 and 1 measured from the stored source.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Point {
    Vertex(VertexId),
    Interior(EdgeId, Rational),
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "{v}"),
            Point::Interior(e, t) => write!(f, "{e}@{t}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dendrite {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>,
}

impl Dendrite {
    /// Builds and validates a finite metric tree.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId, Rational)>,
    ) -> Result<Self> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(Error::Empty("dendrite needs at least one vertex".into()));
        }
        let mut emap: BTreeMap<EdgeId, Edge> = BTreeMap::new();
        for (id, a, b, len) in edges {
            if emap.contains_key(&id) {
                return Err(Error::invalid(format!("duplicate edge id {id}")));
            }
            if a == b {
                return Err(Error::invalid(format!("loop edge {id} at {a}")));
            }
            if !vertices.contains(&a) || !vertices.contains(&b) {
                return Err(Error::invalid(format!("edge {id} references unknown vertex")));
            }
            if len <= rat_zero() {
                return Err(Error::invalid(format!("edge {id} has non-positive length")));
            }
            emap.insert(id, Edge { ends: (a, b), length: len });
        }
        if emap.len() + 1 != vertices.len() {
            return Err(Error::invalid(format!(
                "not a tree: {} vertices, {} edges",
                vertices.len(),
                emap.len()
            )));
        }
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
            vertices.iter().map(|v| (*v, Vec::new())).collect();
        for (id, e) in &emap {
            adj.get_mut(&e.ends.0).unwrap().push((*id, e.ends.1));
            adj.get_mut(&e.ends.1).unwrap().push((*id, e.ends.0));
        }
        for nbrs in adj.values_mut() {
            nbrs.sort();
        }
        let d = Dendrite { vertices, edges: emap, adj };
        // connectivity; with |E| = |V| - 1 this also rules out cycles
        let start = *d.vertices.iter().next().unwrap();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            for (_, w) in &d.adj[&v] {
                if seen.insert(*w) {
                    queue.push_back(*w);
                }
            }
        }
        if seen.len() != d.vertices.len() {
            return Err(Error::invalid("graph is not connected"));
        }
        Ok(d)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Incident edges of `v`, sorted by edge id, paired with the far endpoint.
    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        self.adj.get(&v).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn max_vertex_id(&self) -> u32 {
        self.vertices.iter().map(|v| v.0).max().unwrap_or(0)
    }

    pub fn max_edge_id(&self) -> u32 {
        self.edges.keys().map(|e| e.0).max().unwrap_or(0)
    }

    /// Canonical point on edge `e`; boundary parameters become vertices.
    pub fn point_on(&self, e: EdgeId, t: Rational) -> Result<Point> {
        let edge = self
            .edge(e)
            .ok_or_else(|| Error::PointNotFound(format!("{e}")))?;
        if t < rat_zero() || t > rat_one() {
            return Err(Error::invalid(format!("parameter {t} outside [0,1]")));
        }
        Ok(if t == rat_zero() {
            Point::Vertex(edge.ends.0)
        } else if t == rat_one() {
            Point::Vertex(edge.ends.1)
        } else {
            Point::Interior(e, t)
        })
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => self.vertices.contains(v),
            Point::Interior(e, t) => {
                self.edges.contains_key(e) && *t > rat_zero() && *t < rat_one()
            }
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if self.contains_point(p) {
            Ok(())
        } else {
            Err(Error::PointNotFound(format!("{p}")))
        }
    }

    /// Number of connected components of the complement of `p`.
    pub fn order_of_point(&self, p: &Point) -> Result<usize> {
        self.check_point(p)?;
        Ok(match p {
            Point::Vertex(v) => self.degree(*v),
            Point::Interior(..) => 2,
        })
    }

    /// Points of order 1.
    pub fn ends(&self) -> Vec<Point> {
        self.vertices
            .iter()
            .filter(|v| self.degree(**v) == 1)
            .map(|v| Point::Vertex(*v))
            .collect()
    }

    /// Points of order at least 3 (always vertices in the finite model).
    pub fn branch_points(&self) -> Vec<Point> {
        self.vertices
            .iter()
            .filter(|v| self.degree(**v) >= 3)
            .map(|v| Point::Vertex(*v))
            .collect()
    }

    pub fn leaf_vertices(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .copied()
            .filter(|v| self.degree(*v) == 1)
            .collect()
    }

    /// Vertex sequence of the unique path from `a` to `b`, inclusive.
    pub fn vertex_path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        if a == b {
            return vec![a];
        }
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut queue = VecDeque::from([a]);
        parent.insert(a, a);
        'bfs: while let Some(v) = queue.pop_front() {
            for (_, w) in &self.adj[&v] {
                if !parent.contains_key(w) {
                    parent.insert(*w, v);
                    if *w == b {
                        break 'bfs;
                    }
                    queue.push_back(*w);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[&cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Edges along the path from `a` to `b`, each tagged with whether it is
    /// traversed from stored source to stored target.
    pub fn path_edges(&self, a: VertexId, b: VertexId) -> Vec<(EdgeId, bool)> {
        let path = self.vertex_path(a, b);
        path.windows(2)
            .map(|w| {
                let (u, v) = (w[0], w[1]);
                let (eid, _) = self.adj[&u]
                    .iter()
                    .find(|(_, far)| *far == v)
                    .expect("path step must be an edge");
                let forward = self.edges[eid].ends.0 == u;
                (*eid, forward)
            })
            .collect()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adj
            .get(&a)?
            .iter()
            .find(|(_, far)| *far == b)
            .map(|(e, _)| *e)
    }

    pub fn vertex_distance(&self, a: VertexId, b: VertexId) -> Rational {
        self.path_edges(a, b)
            .iter()
            .map(|(e, _)| self.edges[e].length.clone())
            .sum()
    }

    /// Exact metric distance between two points.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<Rational> {
        self.check_point(p)?;
        self.check_point(q)?;
        if p == q {
            return Ok(rat_zero());
        }
        if let (Point::Interior(e, s), Point::Interior(f, t)) = (p, q) {
            if e == f {
                let len = &self.edges[e].length;
                let d = if s > t { s - t } else { t - s };
                return Ok(d * len);
            }
        }
        let gates = |pt: &Point| -> Vec<(VertexId, Rational)> {
            match pt {
                Point::Vertex(v) => vec![(*v, rat_zero())],
                Point::Interior(e, t) => {
                    let edge = &self.edges[e];
                    vec![
                        (edge.ends.0, t.clone() * &edge.length),
                        (edge.ends.1, (rat_one() - t) * &edge.length),
                    ]
                }
            }
        };
        let mut best: Option<Rational> = None;
        for (gu, du) in gates(p) {
            for (gv, dv) in gates(q) {
                let total = du.clone() + self.vertex_distance(gu, gv) + dv;
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
        Ok(best.unwrap())
    }

    /// The first step at vertex `x` toward the point `p`: the incident edge
    /// and the far endpoint on the side of `p`. `None` when `p == x`.
    pub fn direction_from(&self, x: VertexId, p: &Point) -> Result<Option<(EdgeId, VertexId)>> {
        self.check_point(p)?;
        match p {
            Point::Vertex(v) => {
                if *v == x {
                    return Ok(None);
                }
                let path = self.vertex_path(x, *v);
                let next = path[1];
                Ok(Some((self.edge_between(x, next).unwrap(), next)))
            }
            Point::Interior(e, _) => {
                let edge = &self.edges[e];
                let (u, v) = edge.ends;
                if u == x {
                    return Ok(Some((*e, v)));
                }
                if v == x {
                    return Ok(Some((*e, u)));
                }
                // the path from x reaches the nearer endpoint first, so the
                // first step toward u is the first step toward the edge
                let path = self.vertex_path(x, u);
                let next = path[1];
                Ok(Some((self.edge_between(x, next).unwrap(), next)))
            }
        }
    }

    /// Refines the tree at the given interior points.
    pub fn subdivide(&self, cuts: &[Point]) -> Subdivision {
        let mut by_edge: BTreeMap<EdgeId, BTreeSet<Rational>> = BTreeMap::new();
        for c in cuts {
            if let Point::Interior(e, t) = c {
                if *t > rat_zero() && *t < rat_one() {
                    by_edge.entry(*e).or_default().insert(t.clone());
                }
            }
        }
        let mut next_v = self.max_vertex_id() + 1;
        let mut next_e = self.max_edge_id() + 1;
        let mut verts: Vec<VertexId> = self.vertices.iter().copied().collect();
        let mut edges: Vec<(EdgeId, VertexId, VertexId, Rational)> = Vec::new();
        let mut segments: BTreeMap<EdgeId, Vec<(Rational, Rational, EdgeId, bool)>> =
            BTreeMap::new();
        let mut cut_vertex: BTreeMap<(EdgeId, Rational), VertexId> = BTreeMap::new();

        for (id, edge) in &self.edges {
            match by_edge.get(id) {
                None => {
                    edges.push((*id, edge.ends.0, edge.ends.1, edge.length.clone()));
                    segments.insert(*id, vec![(rat_zero(), rat_one(), *id, true)]);
                }
                Some(ts) => {
                    let mut params = vec![rat_zero()];
                    params.extend(ts.iter().cloned());
                    params.push(rat_one());
                    let mut seg = Vec::new();
                    let mut prev_vertex = edge.ends.0;
                    for w in params.windows(2) {
                        let (lo, hi) = (w[0].clone(), w[1].clone());
                        let far = if hi == rat_one() {
                            edge.ends.1
                        } else {
                            let nv = VertexId(next_v);
                            next_v += 1;
                            verts.push(nv);
                            cut_vertex.insert((*id, hi.clone()), nv);
                            nv
                        };
                        let ne = EdgeId(next_e);
                        next_e += 1;
                        let len = (hi.clone() - lo.clone()) * &edge.length;
                        edges.push((ne, prev_vertex, far, len));
                        seg.push((lo, hi, ne, true));
                        prev_vertex = far;
                    }
                    segments.insert(*id, seg);
                }
            }
        }
        let tree = Dendrite::new(verts, edges).expect("subdivision preserves tree structure");
        Subdivision { original: self.clone(), tree, segments, cut_vertex }
    }

    /// Merges through degree-2 vertices; returns the suppressed tree (kept
    /// vertices retain their ids) and, per new edge, the original chain.
    pub fn suppress(&self) -> Suppressed {
        let keep: BTreeSet<VertexId> = self
            .vertices
            .iter()
            .copied()
            .filter(|v| self.degree(*v) != 2)
            .collect();
        if keep.is_empty() {
            // a tree always has leaves; only the single-vertex tree has no
            // degree != 2 vertices ruled out here
            unreachable!("a finite tree has vertices of degree != 2");
        }
        let mut visited: BTreeSet<EdgeId> = BTreeSet::new();
        let mut edges: Vec<(EdgeId, VertexId, VertexId, Rational)> = Vec::new();
        let mut chains: BTreeMap<EdgeId, Vec<(EdgeId, bool)>> = BTreeMap::new();
        let mut next_e = 0u32;
        for v in &keep {
            for (e0, w0) in self.neighbors(*v).to_vec() {
                if visited.contains(&e0) {
                    continue;
                }
                let mut chain = Vec::new();
                let mut len = rat_zero();
                let mut prev = *v;
                let mut cur_edge = e0;
                let mut cur = w0;
                loop {
                    visited.insert(cur_edge);
                    let forward = self.edges[&cur_edge].ends.0 == prev;
                    chain.push((cur_edge, forward));
                    len += self.edges[&cur_edge].length.clone();
                    if keep.contains(&cur) {
                        break;
                    }
                    let (ne, nw) = self.adj[&cur]
                        .iter()
                        .copied()
                        .find(|(e, _)| *e != cur_edge)
                        .expect("degree-2 chain continues");
                    prev = cur;
                    cur_edge = ne;
                    cur = nw;
                }
                let id = EdgeId(next_e);
                next_e += 1;
                edges.push((id, *v, cur, len));
                chains.insert(id, chain);
            }
        }
        let tree = Dendrite::new(keep.iter().copied(), edges)
            .expect("suppression preserves tree structure");
        Suppressed { tree, chains }
    }

    /// Canonical form string: equal iff the trees are isomorphic as metric
    /// trees (centroid-rooted, children sorted, lengths embedded).
    pub fn canonical_code(&self) -> String {
        if self.vertices.len() == 1 {
            return "C()".into();
        }
        let centroids = self.centroids();
        match centroids.as_slice() {
            [c] => format!("C{}", self.rooted_code(*c, None)),
            [c1, c2] => {
                let e = self.edge_between(*c1, *c2).expect("centroids are adjacent");
                let a = self.rooted_code(*c1, Some(*c2));
                let b = self.rooted_code(*c2, Some(*c1));
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                format!("B{}[{x},{y}]", self.edges[&e].length)
            }
            _ => unreachable!("a tree has one or two centroids"),
        }
    }

    fn rooted_code(&self, v: VertexId, parent: Option<VertexId>) -> String {
        let mut tokens: Vec<String> = self
            .neighbors(v)
            .iter()
            .filter(|(_, w)| Some(*w) != parent)
            .map(|(e, w)| format!("{}|{}", self.edges[e].length, self.rooted_code(*w, Some(v))))
            .collect();
        tokens.sort();
        format!("({})", tokens.join(","))
    }

    /// Tree centroids: the one or two vertices minimizing the maximal
    /// component size of their complement (by vertex count).
    pub fn centroids(&self) -> Vec<VertexId> {
        let n = self.vertices.len();
        if n == 1 {
            return vec![*self.vertices.iter().next().unwrap()];
        }
        let root = *self.vertices.iter().next().unwrap();
        // iterative post-order subtree sizes
        let mut order = Vec::with_capacity(n);
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut stack = vec![root];
        parent.insert(root, root);
        while let Some(v) = stack.pop() {
            order.push(v);
            for (_, w) in &self.adj[&v] {
                if !parent.contains_key(w) {
                    parent.insert(*w, v);
                    stack.push(*w);
                }
            }
        }
        let mut size: BTreeMap<VertexId, usize> =
            self.vertices.iter().map(|v| (*v, 1usize)).collect();
        for v in order.iter().rev() {
            if *v != root {
                *size.get_mut(&parent[v]).unwrap() += size[v];
            }
        }
        let mut best = usize::MAX;
        let mut arg: Vec<VertexId> = Vec::new();
        for v in &self.vertices {
            let mut worst = n - size[v];
            for (_, w) in &self.adj[v] {
                if parent[w] == *v && *w != root {
                    worst = worst.max(size[w]);
                }
            }
            match worst.cmp(&best) {
                std::cmp::Ordering::Less => {
                    best = worst;
                    arg = vec![*v];
                }
                std::cmp::Ordering::Equal => arg.push(*v),
                std::cmp::Ordering::Greater => {}
            }
        }
        arg.sort();
        arg
    }
}

/// A refinement of a dendrite at finitely many interior points, with exact
/// coordinate maps in both directions.
pub struct Subdivision {
    pub original: Dendrite,
    pub tree: Dendrite,
    // original edge -> ordered segments (lo, hi, sub edge, forward)
    segments: BTreeMap<EdgeId, Vec<(Rational, Rational, EdgeId, bool)>>,
    cut_vertex: BTreeMap<(EdgeId, Rational), VertexId>,
}

impl Subdivision {
    pub fn to_sub(&self, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => Point::Vertex(*v),
            Point::Interior(e, t) => {
                if let Some(v) = self.cut_vertex.get(&(*e, t.clone())) {
                    return Point::Vertex(*v);
                }
                for (lo, hi, se, _) in &self.segments[e] {
                    if t > lo && t < hi {
                        let local = (t.clone() - lo) / (hi.clone() - lo);
                        return Point::Interior(*se, local);
                    }
                }
                unreachable!("interior parameter lies in some segment");
            }
        }
    }

    pub fn to_orig(&self, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => {
                if self.original.has_vertex(*v) {
                    return Point::Vertex(*v);
                }
                for ((e, t), nv) in &self.cut_vertex {
                    if nv == v {
                        return Point::Interior(*e, t.clone());
                    }
                }
                unreachable!("subdivision vertex maps back");
            }
            Point::Interior(se, local) => {
                for (orig, segs) in &self.segments {
                    for (lo, hi, sub_e, _) in segs {
                        if sub_e == se {
                            let t = lo.clone() + local.clone() * (hi.clone() - lo);
                            return self
                                .original
                                .point_on(*orig, t)
                                .expect("mapped parameter is valid");
                        }
                    }
                }
                unreachable!("subdivision edge maps back");
            }
        }
    }

    /// Segments of an original edge as (lo, hi, sub edge id).
    pub fn segments_of(&self, e: EdgeId) -> Vec<(Rational, Rational, EdgeId)> {
        self.segments
            .get(&e)
            .map(|v| v.iter().map(|(a, b, s, _)| (a.clone(), b.clone(), *s)).collect())
            .unwrap_or_default()
    }
}

/// Result of degree-2 suppression.
pub struct Suppressed {
    pub tree: Dendrite,
    /// New edge id -> chain of original edges with traversal orientation.
    pub chains: BTreeMap<EdgeId, Vec<(EdgeId, bool)>>,
}
