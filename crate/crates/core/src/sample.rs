//! Seeded random generators for trees, points, subsets, measures and
//! piecewise-linear maps. Used by the property suites and the benchmarks;
//! everything is deterministic in the seed.

use std::collections::BTreeMap;

use rand::prelude::*;

use crate::dynamics::{PLBijection, PLHomeo};
use crate::measure::TreeMeasure;
use crate::subdendrite::{hull, SubDendrite};
use crate::tree::{Dendrite, EdgeId, Point, VertexId};
use crate::{rat, rat_zero, Rational};

const LENGTH_POOL: [(i64, i64); 6] = [(1, 1), (1, 2), (1, 3), (2, 1), (3, 2), (2, 3)];

/// A random tree on `n` vertices: vertex `i` attaches to a random earlier
/// vertex with a length from a small rational pool.
pub fn random_tree(rng: &mut StdRng, n: usize) -> Dendrite {
    let n = n.max(1);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        let (num, den) = LENGTH_POOL[rng.gen_range(0..LENGTH_POOL.len())];
        edges.push((
            EdgeId(i as u32 - 1),
            VertexId(parent as u32),
            VertexId(i as u32),
            rat(num, den),
        ));
    }
    Dendrite::new((0..n as u32).map(VertexId), edges).expect("attachment trees are valid")
}

/// A random point: a vertex or an interior point with a small-denominator
/// parameter.
pub fn random_point(rng: &mut StdRng, d: &Dendrite) -> Point {
    let verts: Vec<VertexId> = d.vertices().collect();
    if d.edge_count() == 0 || rng.gen_bool(0.4) {
        Point::Vertex(verts[rng.gen_range(0..verts.len())])
    } else {
        let edges: Vec<EdgeId> = d.edge_ids().collect();
        let e = edges[rng.gen_range(0..edges.len())];
        let den = rng.gen_range(2..8);
        let num = rng.gen_range(1..den);
        Point::Interior(e, rat(num, den))
    }
}

/// A random closed connected subset: the hull of a few random points.
pub fn random_subdendrite(rng: &mut StdRng, d: &Dendrite) -> SubDendrite {
    let k = rng.gen_range(1..=4);
    let pts: Vec<Point> = (0..k).map(|_| random_point(rng, d)).collect();
    hull(d, &pts).expect("hull of points in the tree")
}

/// A random probability measure: a few atoms and a few densities with a
/// common small denominator.
pub fn random_measure(rng: &mut StdRng, d: &Dendrite) -> TreeMeasure {
    let parts = rng.gen_range(1..=4usize);
    let weights: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=4i64)).collect();
    let total: i64 = weights.iter().sum();
    let mut atoms: Vec<(Point, Rational)> = Vec::new();
    let mut densities: Vec<(EdgeId, Rational)> = Vec::new();
    let edges: Vec<EdgeId> = d.edge_ids().collect();
    for w in weights {
        let mass = rat(w, total);
        if !edges.is_empty() && rng.gen_bool(0.5) {
            densities.push((edges[rng.gen_range(0..edges.len())], mass));
        } else {
            atoms.push((random_point(rng, d), mass));
        }
    }
    TreeMeasure::new(d, atoms, densities).expect("weights sum to one")
}

/// A random atomless measure: densities only.
pub fn random_atomless_measure(rng: &mut StdRng, d: &Dendrite) -> TreeMeasure {
    let edges: Vec<EdgeId> = d.edge_ids().collect();
    assert!(!edges.is_empty(), "atomless measures need an edge");
    let parts = rng.gen_range(1..=edges.len().min(4));
    let weights: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=4i64)).collect();
    let total: i64 = weights.iter().sum();
    let densities: Vec<(EdgeId, Rational)> = weights
        .into_iter()
        .map(|w| (edges[rng.gen_range(0..edges.len())], rat(w, total)))
        .collect();
    TreeMeasure::new(d, [], densities).expect("weights sum to one")
}

/// A strictly increasing random PL bijection of the unit interval, with an
/// optional diagonal (pointwise fixed) middle segment.
pub fn random_pl_bijection(rng: &mut StdRng, allow_fixed_block: bool) -> PLBijection {
    if allow_fixed_block && rng.gen_bool(0.3) {
        // fixed block [1/3, 2/3] with strict motion outside
        let up = rng.gen_bool(0.5);
        let (lo, hi) = if up { (rat(1, 4), rat(11, 12)) } else { (rat(1, 12), rat(3, 4)) };
        return PLBijection::new(vec![
            (rat_zero(), rat_zero()),
            (rat(1, 6), lo.clone() * rat(1, 2) + rat(1, 12) * rat(0, 1)),
            (rat(1, 3), rat(1, 3)),
            (rat(2, 3), rat(2, 3)),
            (rat(5, 6), hi),
            (rat(1, 1), rat(1, 1)),
        ])
        .unwrap_or_else(|_| PLBijection::identity());
    }
    let k = rng.gen_range(0..3);
    let mut xs: Vec<Rational> = vec![rat_zero(), rat(1, 1)];
    let mut ys: Vec<Rational> = vec![rat_zero(), rat(1, 1)];
    for _ in 0..k {
        let den = rng.gen_range(3..9);
        xs.push(rat(rng.gen_range(1..den), den));
        let den = rng.gen_range(3..9);
        ys.push(rat(rng.gen_range(1..den), den));
    }
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();
    let n = xs.len().min(ys.len());
    let pts: Vec<(Rational, Rational)> = xs.into_iter().take(n).zip(ys.into_iter().take(n)).collect();
    PLBijection::new(pts).unwrap_or_else(|_| PLBijection::identity())
}

/// A tree built from `copies` identical branches glued at a center, with
/// the automorphism rotating the branches. Branch shapes are random chains
/// with random hanging edges.
pub fn rotated_star(rng: &mut StdRng, copies: usize, branch_size: usize) -> (Dendrite, PLHomeo) {
    let copies = copies.max(2);
    let branch_size = branch_size.max(1);
    // branch shape: parent index within the branch (0 is the branch root)
    let shape: Vec<usize> = (0..branch_size)
        .map(|i| if i == 0 { 0 } else { rng.gen_range(0..i) })
        .collect();
    let lengths: Vec<(i64, i64)> = (0..branch_size)
        .map(|_| LENGTH_POOL[rng.gen_range(0..LENGTH_POOL.len())])
        .collect();
    let center = VertexId(0);
    let mut verts = vec![center];
    let mut edges = Vec::new();
    let vid = |copy: usize, node: usize| VertexId((copy * branch_size + node) as u32 + 1);
    let mut next_e = 0u32;
    for c in 0..copies {
        for (i, parent) in shape.iter().enumerate() {
            let v = vid(c, i);
            verts.push(v);
            let p = if i == 0 { center } else { vid(c, *parent) };
            let (num, den) = lengths[i];
            edges.push((EdgeId(next_e), p, v, rat(num, den)));
            next_e += 1;
        }
    }
    let d = Dendrite::new(verts, edges).expect("glued star is a tree");
    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::from([(center, center)]);
    for c in 0..copies {
        for i in 0..branch_size {
            vmap.insert(vid(c, i), vid((c + 1) % copies, i));
        }
    }
    let g = PLHomeo::from_automorphism(d.clone(), vmap).expect("rotation preserves adjacency");
    (d, g)
}

/// A random PL self-homeomorphism of a random tree: either a rotation of a
/// symmetric star composed with random edge reparametrizations, or random
/// reparametrizations over the identity vertex map.
pub fn random_pl_homeo(rng: &mut StdRng, max_branch: usize) -> PLHomeo {
    if rng.gen_bool(0.5) {
        let copies = rng.gen_range(2..=3);
        let size = rng.gen_range(1..=max_branch.max(1));
        let (d, rot) = rotated_star(rng, copies, size);
        // compose with random reparametrizations along the rotation
        let maps: Vec<(EdgeId, PLBijection)> = d
            .edge_ids()
            .map(|e| {
                let (target, _) = rot.edge_image(e);
                let stored = d.edge(target).unwrap().ends;
                let (u, _) = d.edge(e).unwrap().ends;
                let forward = stored.0 == rot.vertex_image(u);
                let pl = random_pl_bijection(rng, false);
                let pl = if forward { pl } else { compose_reversal(&pl) };
                (e, pl)
            })
            .collect();
        PLHomeo::new(d, rot.vertex_pairs(), maps).expect("reparametrized rotation")
    } else {
        let n = rng.gen_range(2..=(3 * max_branch.max(1) + 2));
        let d = random_tree(rng, n);
        let maps: Vec<(EdgeId, PLBijection)> = d
            .edge_ids()
            .map(|e| (e, random_pl_bijection(rng, true)))
            .collect();
        PLHomeo::new(d, [], maps).expect("identity vertex map with reparametrizations")
    }
}

fn compose_reversal(pl: &PLBijection) -> PLBijection {
    PLBijection::reversal().compose(pl)
}

/// A subdivision automorphism together with its tree, for equivariance
/// tests: either a rotated star or the identity on a random tree.
pub fn random_automorphism(rng: &mut StdRng, max_branch: usize) -> (Dendrite, PLHomeo) {
    if rng.gen_bool(0.7) {
        let copies = rng.gen_range(2..=4);
        let size = rng.gen_range(1..=max_branch.max(1));
        rotated_star(rng, copies, size)
    } else {
        let n = rng.gen_range(2..=(2 * max_branch.max(1) + 2));
        let d = random_tree(rng, n);
        let id = PLHomeo::identity(d.clone());
        (d, id)
    }
}
