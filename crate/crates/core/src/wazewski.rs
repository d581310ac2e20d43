//! Depth-truncated universal dendrites with homogeneous branch order,
//! complete invariants for tuples of end stand-ins, and the correspondence
//! between finite dendrites and their combinatorial trees.
//!
//! The truncation generator starts from a single edge and, at every step,
//! splits each spine edge produced by the previous step at its midpoint and
//! attaches `n - 2` fresh leaf edges there, so every branch vertex has
//! order exactly `n`. Leaves of the truncation stand in for ends.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::subdendrite::{arc, hull, SubDendrite};
use crate::tree::{Dendrite, EdgeId, Point, VertexId};
use crate::{rat, rat_one, Error, Rational, Result};

/// Branch order of the truncation; the infinite-order dendrite is modelled
/// by an explicit finite cap recorded here.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BranchOrder {
    Finite(u32),
    InfiniteCapped(u32),
}

impl BranchOrder {
    pub fn value(&self) -> u32 {
        match self {
            BranchOrder::Finite(n) | BranchOrder::InfiniteCapped(n) => *n,
        }
    }
}

impl std::fmt::Display for BranchOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchOrder::Finite(n) => write!(f, "{n}"),
            BranchOrder::InfiniteCapped(n) => write!(f, "inf(cap={n})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedWazewski {
    pub order: BranchOrder,
    pub depth: u32,
    pub tree: Dendrite,
    /// Construction generation of each vertex.
    pub level: BTreeMap<VertexId, u32>,
}

/// Canonical code of a labeled tuple hull; equal codes characterize tuples
/// in the same orbit of the full homeomorphism group of the truncation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TupleCode(pub String);

impl std::fmt::Display for TupleCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic truncation generator.
pub fn generate(order: BranchOrder, depth: u32) -> Result<TruncatedWazewski> {
    let n = order.value();
    if n < 3 {
        return Err(Error::invalid(format!("branch order {n} is below 3")));
    }
    let mut verts: Vec<VertexId> = vec![VertexId(0), VertexId(1)];
    let mut level: BTreeMap<VertexId, u32> = BTreeMap::from([(VertexId(0), 0), (VertexId(1), 0)]);
    let mut edges: BTreeMap<EdgeId, (VertexId, VertexId, Rational)> = BTreeMap::new();
    edges.insert(EdgeId(0), (VertexId(0), VertexId(1), rat_one()));
    let mut spine: Vec<EdgeId> = vec![EdgeId(0)];
    let mut next_v = 2u32;
    let mut next_e = 1u32;
    for gen in 1..=depth {
        let mut new_spine = Vec::new();
        for se in std::mem::take(&mut spine) {
            let (a, b, len) = edges.remove(&se).expect("spine edge exists");
            let half = len / rat(2, 1);
            let mid = VertexId(next_v);
            next_v += 1;
            verts.push(mid);
            level.insert(mid, gen);
            let left = EdgeId(next_e);
            next_e += 1;
            let right = EdgeId(next_e);
            next_e += 1;
            edges.insert(left, (a, mid, half.clone()));
            edges.insert(right, (mid, b, half.clone()));
            new_spine.push(left);
            new_spine.push(right);
            for _ in 0..(n - 2) {
                let tip = VertexId(next_v);
                next_v += 1;
                verts.push(tip);
                level.insert(tip, gen);
                let te = EdgeId(next_e);
                next_e += 1;
                edges.insert(te, (mid, tip, half.clone()));
            }
        }
        spine = new_spine;
    }
    let tree = Dendrite::new(
        verts,
        edges.into_iter().map(|(id, (a, b, l))| (id, a, b, l)),
    )?;
    Ok(TruncatedWazewski { order, depth, tree, level })
}

/// Closed-form leaf count of the generator.
pub fn expected_leaf_count(n: u32, depth: u32) -> u64 {
    2 + (n as u64 - 2) * ((1u64 << depth) - 1)
}

/// Closed-form branch-vertex count of the generator.
pub fn expected_branch_count(depth: u32) -> u64 {
    (1u64 << depth) - 1
}

impl TruncatedWazewski {
    /// Leaf vertices, the stand-ins for ends.
    pub fn leaves(&self) -> Vec<Point> {
        self.tree.ends()
    }
}

// --- labeled combinatorial trees -------------------------------------------

/// A small combinatorial tree with optional position labels, used for
/// canonical codes of suppressed hulls.
#[derive(Clone, Debug)]
pub(crate) struct NodeTree {
    pub adj: BTreeMap<VertexId, Vec<VertexId>>,
    pub labels: BTreeMap<VertexId, BTreeSet<usize>>,
}

impl NodeTree {
    fn label_token(&self, v: &VertexId) -> String {
        match self.labels.get(v) {
            None => String::new(),
            Some(set) if set.is_empty() => String::new(),
            Some(set) => {
                let inner: Vec<String> = set.iter().map(|i| (i + 1).to_string()).collect();
                format!("[{}]", inner.join(","))
            }
        }
    }

    fn rooted(&self, v: VertexId, parent: Option<VertexId>) -> String {
        let mut toks: Vec<String> = self.adj[&v]
            .iter()
            .filter(|w| Some(**w) != parent)
            .map(|w| self.rooted(*w, Some(v)))
            .collect();
        toks.sort();
        format!("({}{})", self.label_token(&v), toks.concat())
    }

    fn centroids(&self) -> Vec<VertexId> {
        let n = self.adj.len();
        if n == 0 {
            return Vec::new();
        }
        let root = *self.adj.keys().next().unwrap();
        let mut order = Vec::new();
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::from([(root, root)]);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            for w in &self.adj[&v] {
                if !parent.contains_key(w) {
                    parent.insert(*w, v);
                    stack.push(*w);
                }
            }
        }
        let mut size: BTreeMap<VertexId, usize> = self.adj.keys().map(|v| (*v, 1)).collect();
        for v in order.iter().rev() {
            if *v != root {
                *size.get_mut(&parent[v]).unwrap() += size[v];
            }
        }
        let mut best = usize::MAX;
        let mut arg = Vec::new();
        for v in self.adj.keys() {
            let mut worst = n - size[v];
            for w in &self.adj[v] {
                if parent.get(w) == Some(v) {
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
        arg
    }

    /// Canonical form: centroid-rooted, children sorted by code.
    pub fn canonical_code(&self) -> String {
        match self.centroids().as_slice() {
            [] => "()".into(),
            [c] => format!("C{}", self.rooted(*c, None)),
            [c1, c2] => {
                let a = self.rooted(*c1, Some(*c2));
                let b = self.rooted(*c2, Some(*c1));
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                format!("B[{x},{y}]")
            }
            _ => unreachable!("a tree has at most two centroids"),
        }
    }
}

/// Suppresses the degree-two vertices of a hull consisting of whole
/// vertices and edges, carrying the labels along.
pub(crate) fn suppressed_node_tree(
    d: &Dendrite,
    h: &SubDendrite,
    labels: &BTreeMap<Point, BTreeSet<usize>>,
) -> NodeTree {
    debug_assert_eq!(h.partials().count(), 0, "hull of vertices has no partial edges");
    let verts: BTreeSet<VertexId> = h.full_vertices().collect();
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
        verts.iter().map(|v| (*v, Vec::new())).collect();
    for e in h.full_edges() {
        let (a, b) = d.edge(e).unwrap().ends;
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    let nodes: BTreeSet<VertexId> = verts
        .iter()
        .copied()
        .filter(|v| adj[v].len() != 2)
        .collect();
    let mut node_adj: BTreeMap<VertexId, Vec<VertexId>> =
        nodes.iter().map(|v| (*v, Vec::new())).collect();
    for n in &nodes {
        for start in adj[n].clone() {
            let mut prev = *n;
            let mut cur = start;
            while !nodes.contains(&cur) {
                let next = *adj[&cur].iter().find(|w| **w != prev).unwrap();
                prev = cur;
                cur = next;
            }
            node_adj.get_mut(n).unwrap().push(cur);
        }
    }
    let mut node_labels: BTreeMap<VertexId, BTreeSet<usize>> = BTreeMap::new();
    for (p, set) in labels {
        if let Point::Vertex(v) = p {
            debug_assert!(nodes.contains(v), "labeled points survive suppression");
            node_labels.insert(*v, set.clone());
        }
    }
    NodeTree { adj: node_adj, labels: node_labels }
}

/// Canonical code of an ordered tuple of leaves; equal entries collapse to
/// a single node carrying both position labels.
pub fn tuple_code(x: &TruncatedWazewski, ends: &[Point]) -> Result<TupleCode> {
    if ends.is_empty() {
        return Err(Error::Empty("tuple of ends is empty".into()));
    }
    let d = &x.tree;
    let mut labels: BTreeMap<Point, BTreeSet<usize>> = BTreeMap::new();
    for (i, p) in ends.iter().enumerate() {
        let leaf = matches!(p, Point::Vertex(v) if d.degree(*v) == 1);
        if !leaf {
            return Err(Error::invalid(format!("tuple entry {p} is not a leaf")));
        }
        labels.entry(p.clone()).or_default().insert(i);
    }
    let distinct: Vec<Point> = labels.keys().cloned().collect();
    let h = hull(d, &distinct)?;
    let nt = suppressed_node_tree(d, &h, &labels);
    Ok(TupleCode(nt.canonical_code()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct OrbitSummary {
    pub order: BranchOrder,
    pub depth: u32,
    pub tuple_len: usize,
    pub class_count: usize,
    /// Code to first ordered tuple realizing it, in enumeration order.
    pub representatives: BTreeMap<TupleCode, Vec<Point>>,
    pub exhaustive: bool,
    /// Set when an exhaustive run hit the work cap and stopped early.
    pub truncated: bool,
}

const ORBIT_WORK_CAP: u64 = 50_000_000;

/// Counts distinct tuple codes over ordered tuples of distinct leaves.
pub fn orbit_count(x: &TruncatedWazewski, tuple_len: usize, mode: OrbitMode) -> Result<OrbitSummary> {
    if tuple_len == 0 {
        return Err(Error::invalid("tuple length must be positive"));
    }
    let d = &x.tree;
    let leaves: Vec<Point> = x.leaves();
    if leaves.len() < tuple_len {
        return Err(Error::invalid(format!(
            "only {} leaves for tuples of length {tuple_len}",
            leaves.len()
        )));
    }
    let mut reps: BTreeMap<TupleCode, Vec<Point>> = BTreeMap::new();
    let mut truncated = false;
    match mode {
        OrbitMode::Exhaustive => {
            let mut work: u64 = 0;
            let mut subset: Vec<usize> = (0..tuple_len).collect();
            'outer: loop {
                let chosen: Vec<Point> = subset.iter().map(|i| leaves[*i].clone()).collect();
                let labels: BTreeMap<Point, BTreeSet<usize>> = chosen
                    .iter()
                    .enumerate()
                    .map(|(slot, p)| (p.clone(), BTreeSet::from([slot])))
                    .collect();
                let h = hull(d, &chosen)?;
                let base = suppressed_node_tree(d, &h, &labels);
                let slot_node: BTreeMap<usize, VertexId> = chosen
                    .iter()
                    .enumerate()
                    .map(|(slot, p)| match p {
                        Point::Vertex(v) => (slot, *v),
                        Point::Interior(..) => unreachable!("leaves are vertices"),
                    })
                    .collect();
                let mut perm: Vec<usize> = (0..tuple_len).collect();
                loop {
                    // position i of the tuple holds the leaf in slot perm[i]
                    let mut nt = base.clone();
                    nt.labels.clear();
                    for (pos, slot) in perm.iter().enumerate() {
                        nt.labels
                            .entry(slot_node[slot])
                            .or_default()
                            .insert(pos);
                    }
                    let code = TupleCode(nt.canonical_code());
                    reps.entry(code).or_insert_with(|| {
                        perm.iter().map(|slot| chosen[*slot].clone()).collect()
                    });
                    work += 1;
                    if work > ORBIT_WORK_CAP {
                        truncated = true;
                        break 'outer;
                    }
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
                if !next_combination(&mut subset, leaves.len()) {
                    break;
                }
            }
        }
        OrbitMode::Sample { count, seed } => {
            use rand::SeedableRng;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            for _ in 0..count {
                let mut pool: Vec<Point> = leaves.clone();
                pool.shuffle(&mut rng);
                let tuple: Vec<Point> = pool.into_iter().take(tuple_len).collect();
                let code = tuple_code(x, &tuple)?;
                reps.entry(code).or_insert(tuple);
            }
        }
    }
    Ok(OrbitSummary {
        order: x.order,
        depth: x.depth,
        tuple_len,
        class_count: reps.len(),
        representatives: reps,
        exhaustive: matches!(mode, OrbitMode::Exhaustive),
        truncated,
    })
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - i) {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// The closure of the component of the complement of two distinct points
/// that contains the interior of the arc between them, materialized as a
/// tree with the two points marked.
#[derive(Clone, Debug)]
pub struct OpenSub {
    pub tree: Dendrite,
    pub x: Point,
    pub y: Point,
    /// The same set, as a subset of the ambient truncation.
    pub closure: SubDendrite,
}

pub fn open_subdendrite(x: &TruncatedWazewski, a: &Point, b: &Point) -> Result<OpenSub> {
    let d = &x.tree;
    if a == b {
        return Err(Error::invalid("the two marked points must differ"));
    }
    if !d.contains_point(a) || !d.contains_point(b) {
        return Err(Error::PointNotFound(format!("{a} or {b}")));
    }
    let cuts: Vec<Point> = [a, b]
        .into_iter()
        .filter(|p| matches!(p, Point::Interior(..)))
        .cloned()
        .collect();
    let sub = d.subdivide(&cuts);
    let st = &sub.tree;
    let (sa, sb) = (sub.to_sub(a), sub.to_sub(b));
    let (va, vb) = match (&sa, &sb) {
        (Point::Vertex(va), Point::Vertex(vb)) => (*va, *vb),
        _ => unreachable!("cut points become vertices"),
    };
    let arc_ab = arc(st, &sa, &sb)?;
    let seed = arc_ab
        .carrier
        .full_edges()
        .next()
        .expect("distinct points span an edge after refinement");
    let mut comp_edges: BTreeSet<EdgeId> = BTreeSet::from([seed]);
    let mut frontier = vec![seed];
    while let Some(e) = frontier.pop() {
        let (u, v) = st.edge(e).unwrap().ends;
        for w in [u, v] {
            if w == va || w == vb {
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
    let closure_sub = SubDendrite::from_pieces(
        st,
        comp_verts.iter().copied(),
        comp_edges.iter().copied(),
        [],
    )?;
    let closure = crate::dynamics::subdendrite_to_orig(&sub, &closure_sub);
    let tree = Dendrite::new(
        comp_verts.iter().copied(),
        comp_edges
            .iter()
            .map(|e| {
                let edge = st.edge(*e).unwrap();
                (*e, edge.ends.0, edge.ends.1, edge.length.clone())
            })
            .collect::<Vec<_>>(),
    )?;
    Ok(OpenSub { tree, x: sa, y: sb, closure })
}

/// The combinatorial tree of a finite dendrite: nodes are the leaves and
/// branch points, and two nodes are adjacent exactly when no branch point
/// separates them. Edge lengths are the metric path lengths, so the result
/// is the metric realization at the same time.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub tree: Dendrite,
    /// New edge id -> original path, as (edge, traversed forward).
    pub realization: BTreeMap<EdgeId, Vec<(EdgeId, bool)>>,
}

pub fn tree_correspondence(d: &Dendrite) -> Result<Correspondence> {
    let nodes: Vec<VertexId> = d.vertices().filter(|v| d.degree(*v) != 2).collect();
    debug_assert!(!nodes.is_empty());
    if nodes.len() == 1 {
        let tree = Dendrite::new(nodes.clone(), [])?;
        return Ok(Correspondence { tree, realization: BTreeMap::new() });
    }
    let node_set: BTreeSet<VertexId> = nodes.iter().copied().collect();
    let mut edges: Vec<(EdgeId, VertexId, VertexId, Rational)> = Vec::new();
    let mut realization: BTreeMap<EdgeId, Vec<(EdgeId, bool)>> = BTreeMap::new();
    let mut next = 0u32;
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let path = d.vertex_path(nodes[i], nodes[j]);
            let interior_clear = path[1..path.len() - 1]
                .iter()
                .all(|v| !node_set.contains(v));
            if interior_clear {
                let id = EdgeId(next);
                next += 1;
                let len = d.vertex_distance(nodes[i], nodes[j]);
                edges.push((id, nodes[i], nodes[j], len));
                realization.insert(id, d.path_edges(nodes[i], nodes[j]));
            }
        }
    }
    let tree = Dendrite::new(nodes, edges)?;
    Ok(Correspondence { tree, realization })
}

/// Code of the degree-two suppression, ignoring metric lengths.
pub fn combinatorial_code(d: &Dendrite) -> String {
    let s = d.suppress();
    let whole = SubDendrite::whole(&s.tree);
    let nt = suppressed_node_tree(&s.tree, &whole, &BTreeMap::new());
    nt.canonical_code()
}
