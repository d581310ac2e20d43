//! Property suites backed by independent brute-force oracles on common
//! subdivisions.

use std::collections::BTreeSet;

use rand::prelude::*;

use dendrite_core::cocycle::{
    alpha, cocycle_identity_check, lp_norm, nonvanishing_check, omega, omega_by_coboundary,
    LpExponent, LpNorm,
};
use dendrite_core::dynamics::{austro_boreal_arcs, fix_dichotomy, tectonic, FixVerdict};
use dendrite_core::measure::measure_median;
use dendrite_core::sample;
use dendrite_core::subdendrite::{
    arc, components_minus, hausdorff, hausdorff_points, helly_intersection, hull, median, u_side,
    SubDendrite,
};
use dendrite_core::tree::{EdgeId, Point, Subdivision, VertexId};
use dendrite_core::wazewski::{generate, orbit_count, tree_correspondence, BranchOrder, OrbitMode};
use dendrite_core::{rat, Rational};

/// Graph-level subset of a subdivision: vertices plus whole edges.
#[derive(PartialEq, Eq, Debug, Clone)]
struct GraphSet {
    verts: BTreeSet<VertexId>,
    edges: BTreeSet<EdgeId>,
}

fn to_graph_set(s: &SubDendrite, sub: &Subdivision) -> GraphSet {
    let mapped = s.map_to_subdivision(sub);
    assert_eq!(
        mapped.partials().count(),
        0,
        "cut points must cover all partial interval endpoints"
    );
    GraphSet {
        verts: mapped.full_vertices().collect(),
        edges: mapped.full_edges().collect(),
    }
}

/// Independent hull oracle: union of graph paths from the first point.
fn hull_oracle(sub: &Subdivision, points: &[Point]) -> GraphSet {
    let vs: Vec<VertexId> = points
        .iter()
        .map(|p| match sub.to_sub(p) {
            Point::Vertex(v) => v,
            Point::Interior(..) => panic!("oracle points must be cut"),
        })
        .collect();
    let mut verts = BTreeSet::from([vs[0]]);
    let mut edges = BTreeSet::new();
    for v in &vs[1..] {
        verts.extend(sub.tree.vertex_path(vs[0], *v));
        edges.extend(sub.tree.path_edges(vs[0], *v).into_iter().map(|(e, _)| e));
    }
    GraphSet { verts, edges }
}

fn subdivision_cuts(sets: &[SubDendrite], extra: &[Point]) -> Vec<Point> {
    let mut cuts: Vec<Point> = Vec::new();
    for s in sets {
        for (e, a, b) in s.partials() {
            cuts.push(Point::Interior(e, a));
            cuts.push(Point::Interior(e, b));
        }
    }
    cuts.extend(extra.iter().cloned());
    cuts.retain(|p| matches!(p, Point::Interior(..)));
    cuts
}

#[test]
fn hull_matches_graph_oracle() {
    let mut rng = StdRng::seed_from_u64(101);
    for _ in 0..150 {
        let n = rng.gen_range(2..12);
        let d = sample::random_tree(&mut rng, n);
        let k = rng.gen_range(1..5);
        let pts: Vec<Point> = (0..k).map(|_| sample::random_point(&mut rng, &d)).collect();
        let h = hull(&d, &pts).unwrap();
        let cuts = subdivision_cuts(std::slice::from_ref(&h), &pts);
        let sub = d.subdivide(&cuts);
        assert_eq!(to_graph_set(&h, &sub), hull_oracle(&sub, &pts));
    }
}

#[test]
fn arc_carrier_is_hull_of_endpoints() {
    let mut rng = StdRng::seed_from_u64(102);
    for _ in 0..120 {
        let n = rng.gen_range(2..12);
        let d = sample::random_tree(&mut rng, n);
        let x = sample::random_point(&mut rng, &d);
        let y = sample::random_point(&mut rng, &d);
        let a = arc(&d, &x, &y).unwrap();
        let h = hull(&d, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(a.carrier, h);
        // median of collinear points sits on the arc
        let m = median(&d, &x, &y, &x).unwrap();
        assert!(a.carrier.contains(&m));
    }
}

#[test]
fn helly_matches_pointwise_oracle() {
    let mut rng = StdRng::seed_from_u64(103);
    let mut nontrivial = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..10);
        let d = sample::random_tree(&mut rng, n);
        let k = rng.gen_range(2..6);
        let family: Vec<SubDendrite> =
            (0..k).map(|_| sample::random_subdendrite(&mut rng, &d)).collect();
        let got = helly_intersection(&d, &family).unwrap();
        // oracle: pointwise intersection over a common subdivision
        let cuts = subdivision_cuts(&family, &[]);
        let sub = d.subdivide(&cuts);
        let mapped: Vec<GraphSet> = family.iter().map(|s| to_graph_set(s, &sub)).collect();
        let mut verts = mapped[0].verts.clone();
        let mut edges = mapped[0].edges.clone();
        for m in &mapped[1..] {
            verts = verts.intersection(&m.verts).copied().collect();
            edges = edges.intersection(&m.edges).copied().collect();
        }
        match got {
            None => assert!(verts.is_empty() && edges.is_empty()),
            Some(s) => {
                nontrivial += 1;
                assert_eq!(to_graph_set(&s, &sub), GraphSet { verts, edges });
            }
        }
        // the Helly property itself: pairwise non-empty forces non-empty
        let pairwise = (0..family.len()).all(|i| {
            (0..family.len()).all(|j| family[i].intersect(&d, &family[j]).is_some())
        });
        if pairwise {
            assert!(
                helly_intersection(&d, &family).unwrap().is_some(),
                "pairwise intersecting family has a common point"
            );
        }
    }
    assert!(nontrivial > 50, "the sample must exercise non-empty cases");
}

#[test]
fn end_separation_property() {
    let mut rng = StdRng::seed_from_u64(104);
    for _ in 0..100 {
        let n = rng.gen_range(2..12);
        let d = sample::random_tree(&mut rng, n);
        let c = sample::random_subdendrite(&mut rng, &d);
        let sample_pts = c.sample_points(&d);
        let h = hull(&d, &sample_pts).unwrap();
        for x in d.ends() {
            if h.contains(&x) {
                assert!(c.contains(&x), "an end in the hull lies in the set");
            }
        }
    }
}

#[test]
fn hull_is_hausdorff_continuous_at_subdivision_scale() {
    let mut rng = StdRng::seed_from_u64(105);
    for _ in 0..80 {
        let n = rng.gen_range(2..10);
        let d = sample::random_tree(&mut rng, n);
        let ka = rng.gen_range(1..4);
        let kb = rng.gen_range(1..4);
        let a: Vec<Point> = (0..ka).map(|_| sample::random_point(&mut rng, &d)).collect();
        let b: Vec<Point> = (0..kb).map(|_| sample::random_point(&mut rng, &d)).collect();
        let ha = hull(&d, &a).unwrap();
        let hb = hull(&d, &b).unwrap();
        let dh_sets = hausdorff(&d, &ha, &hb).unwrap();
        let dh_pts = hausdorff_points(&d, &a, &b).unwrap();
        let max_len: Rational = d
            .edge_ids()
            .map(|e| d.edge(e).unwrap().length.clone())
            .max()
            .unwrap();
        assert!(
            dh_sets <= dh_pts.clone() + max_len,
            "hull continuity violated: {dh_sets} vs {dh_pts}"
        );
    }
}

#[test]
fn retraction_minimizes_distance_to_the_set() {
    use dendrite_core::subdendrite::{distance_to_set, first_point_retraction};
    let mut rng = StdRng::seed_from_u64(114);
    for _ in 0..120 {
        let n = rng.gen_range(2..12);
        let d = sample::random_tree(&mut rng, n);
        let y = sample::random_subdendrite(&mut rng, &d);
        let p = sample::random_point(&mut rng, &d);
        let r = first_point_retraction(&d, &y, &p).unwrap();
        assert!(y.contains(&r));
        let dist = d.distance(&p, &r).unwrap();
        assert_eq!(dist, distance_to_set(&d, &p, &y).unwrap());
        // argmin over a subdivision-scale sample of the target
        for q in y.sample_points(&d) {
            assert!(
                d.distance(&p, &q).unwrap() >= dist,
                "retraction must minimize the distance"
            );
        }
        // every arc from p into the set passes through the retraction
        for q in y.sample_points(&d).into_iter().take(4) {
            let a = arc(&d, &p, &q).unwrap();
            assert!(a.carrier.contains(&r));
        }
    }
}

#[test]
fn components_partition_the_complement() {
    let mut rng = StdRng::seed_from_u64(106);
    for _ in 0..100 {
        let n = rng.gen_range(2..10);
        let d = sample::random_tree(&mut rng, n);
        let p = sample::random_point(&mut rng, &d);
        let comps = components_minus(&d, &p).unwrap();
        assert_eq!(comps.len(), d.order_of_point(&p).unwrap());
        // closures pairwise intersect exactly at the base point
        for i in 0..comps.len() {
            for j in (i + 1)..comps.len() {
                let m = comps[i].1.intersect(&d, &comps[j].1).unwrap();
                assert_eq!(m.the_point(), Some(p.clone()));
            }
        }
        // union covers everything
        let mut acc = comps[0].1.clone();
        for (_, c) in &comps[1..] {
            acc = acc.union_connected(&d, c);
        }
        assert_eq!(acc, SubDendrite::whole(&d));
        // nested monotonicity of u-sides along an arc
        if let Some((_, comp)) = comps.first() {
            let t = comp.extremities(&d).into_iter().find(|t| *t != p);
            if let Some(t) = t {
                let a = arc(&d, &p, &t).unwrap();
                let mid = a.midpoint(&d).unwrap();
                if mid != p && mid != t {
                    let outer = u_side(&d, &p, &t).unwrap();
                    let inner = u_side(&d, &mid, &t).unwrap();
                    assert_eq!(inner.intersect(&d, &outer), Some(inner.clone()));
                }
            }
        }
    }
}

#[test]
fn measure_median_equivariance_and_cases() {
    let mut rng = StdRng::seed_from_u64(107);
    for _ in 0..120 {
        let (d, g) = sample::random_automorphism(&mut rng, 4);
        let m = sample::random_measure(&mut rng, &d);
        let med = measure_median(&d, &m).unwrap();
        assert!(med.len() == 1 || med.len() == 2);
        let pushed = g.pushforward(&m).unwrap();
        let med_pushed = measure_median(&d, &pushed).unwrap();
        let med_mapped: BTreeSet<Point> =
            med.iter().map(|p| g.apply(p).unwrap()).collect();
        assert_eq!(med_pushed, med_mapped, "median commutes with the action");
    }
}

#[test]
fn balanced_set_hull_is_an_arc() {
    use dendrite_core::measure::half_points;
    let mut rng = StdRng::seed_from_u64(116);
    let mut nonempty = 0;
    for _ in 0..150 {
        let n = rng.gen_range(2..10);
        let d = sample::random_tree(&mut rng, n);
        let m = sample::random_atomless_measure(&mut rng, &d);
        if let Some(h) = half_points(&d, &m).unwrap() {
            nonempty += 1;
            assert!(h.is_arc_like(&d), "the balanced set must lie in an arc");
            assert!(h.extremities(&d).len() <= 2);
        }
    }
    assert!(nonempty > 10, "the sample must exercise the balanced case");
}

#[test]
fn cocycle_laws_on_random_trees() {
    let mut rng = StdRng::seed_from_u64(108);
    for _ in 0..150 {
        let n = rng.gen_range(3..10);
        let d = sample::random_tree(&mut rng, n);
        let p = sample::random_point(&mut rng, &d);
        let q = sample::random_point(&mut rng, &d);
        let r = sample::random_point(&mut rng, &d);
        let w = omega(&d, &p, &q, &r).unwrap();
        // the coboundary route agrees entrywise
        assert_eq!(w, omega_by_coboundary(&d, &p, &q, &r).unwrap());
        // alternation
        assert_eq!(w.negate(), omega(&d, &q, &p, &r).unwrap());
        // support size and boundedness
        let support = w.support_size();
        assert!(support == 0 || support == 2 || support == 6);
        match lp_norm(&w, &LpExponent::Infinity).unwrap() {
            LpNorm::Exact(v) => assert!(v <= rat(1, 1)),
            _ => panic!("sup norms are exact"),
        }
        // support 6 exactly when the triple spans a tripod
        let in_common_arc = arc(&d, &p, &q).unwrap().carrier.contains(&r)
            || arc(&d, &q, &r).unwrap().carrier.contains(&p)
            || arc(&d, &r, &p).unwrap().carrier.contains(&q);
        assert_eq!(support == 6, !in_common_arc);
        // full-bundle nonvanishing iff pairwise distinct
        let distinct = p != q && q != r && p != r;
        assert_eq!(nonvanishing_check(&d, &p, &q, &r).unwrap(), distinct);
        // alpha vanishes off the open arc
        let a = alpha(&d, &p, &p).unwrap();
        assert!(a.is_zero());
    }
    // cocycle identity on random 4-tuples
    let mut rng = StdRng::seed_from_u64(109);
    for _ in 0..80 {
        let n = rng.gen_range(3..9);
        let d = sample::random_tree(&mut rng, n);
        let pts: Vec<Point> = (0..4).map(|_| sample::random_point(&mut rng, &d)).collect();
        assert!(cocycle_identity_check(&d, &pts[0], &pts[1], &pts[2], &pts[3]).unwrap());
    }
}

#[test]
fn cocycle_equivariance_under_automorphisms() {
    let mut rng = StdRng::seed_from_u64(110);
    for _ in 0..60 {
        let (d, g) = sample::random_automorphism(&mut rng, 3);
        let p = sample::random_point(&mut rng, &d);
        let q = sample::random_point(&mut rng, &d);
        let r = sample::random_point(&mut rng, &d);
        let w = omega(&d, &p, &q, &r).unwrap();
        let moved = omega(
            &d,
            &g.apply(&p).unwrap(),
            &g.apply(&q).unwrap(),
            &g.apply(&r).unwrap(),
        )
        .unwrap();
        assert_eq!(moved, w.transport(&g));
    }
}

#[test]
fn fixed_sets_match_a_pointwise_grid_oracle() {
    let mut rng = StdRng::seed_from_u64(115);
    for _ in 0..80 {
        let g = sample::random_pl_homeo(&mut rng, 3);
        let d = g.domain().clone();
        let fix = g.fixed_set();
        for v in d.vertices() {
            let p = Point::Vertex(v);
            assert_eq!(fix.contains(&p), g.apply(&p).unwrap() == p);
        }
        for e in d.edge_ids() {
            for j in 1..16 {
                let p = Point::Interior(e, rat(j, 16));
                assert_eq!(
                    fix.contains(&p),
                    g.apply(&p).unwrap() == p,
                    "fixed-set membership must agree with the map at {p}"
                );
            }
        }
    }
}

#[test]
fn dynamics_suite_on_random_homeos() {
    let mut rng = StdRng::seed_from_u64(111);
    for _ in 0..120 {
        let g = sample::random_pl_homeo(&mut rng, 4);
        let d = g.domain().clone();
        let fix = g.fixed_set();
        assert!(!fix.is_empty(), "every homeomorphism fixes a point");
        let verdict = fix_dichotomy(&g).unwrap();
        let arcs = austro_boreal_arcs(&g).unwrap();
        match verdict {
            FixVerdict::ConnectedFix => assert!(arcs.is_empty()),
            FixVerdict::HasAustroBoreal => assert!(!arcs.is_empty()),
        }
        // arcs are invariant, with free interiors and fixed endpoints
        for a in &arcs {
            assert!(fix.contains(&a.a) && fix.contains(&a.b));
            let mid = a.midpoint(&d).unwrap();
            assert!(!fix.contains(&mid));
            let img = g.image_subdendrite(&a.carrier);
            assert_eq!(img, a.carrier);
        }
        let t = tectonic(&g).unwrap();
        // pieces have pairwise disjoint interiors: closures meet at most in
        // boundary points
        for i in 0..t.pieces.len() {
            for j in (i + 1)..t.pieces.len() {
                let meet = t.pieces[i].closure.intersect(&d, &t.pieces[j].closure);
                if let Some(m) = meet {
                    let bi = [&t.pieces[i].boundary.0, &t.pieces[i].boundary.1];
                    for p in m.sample_points(&d) {
                        assert!(bi.contains(&&p));
                    }
                }
            }
        }
        // kernel components are invariant with connected non-empty fixed sets
        for k in &t.kernel {
            assert_eq!(g.image_subdendrite(&k.set), k.set);
            assert!(!k.fixed.is_empty());
            assert!(k.fixed.is_connected(&d));
        }
        // the pieces and the kernel cover the tree
        for p in SubDendrite::whole(&d).sample_points(&d) {
            let in_piece = t.pieces.iter().any(|o| o.closure.contains(&p));
            let in_kernel = t.kernel.iter().any(|k| k.set.contains(&p));
            assert!(in_piece || in_kernel, "point {p} uncovered");
        }
        // on austro-boreal interiors, orbits are strictly monotone
        for piece in &t.pieces {
            let (from, to) = &piece.fundamental;
            assert_ne!(from, to);
            let d1 = d.distance(&piece.arc.a, from).unwrap();
            let d2 = d.distance(&piece.arc.a, &g.apply(from).unwrap()).unwrap();
            let d3 = d
                .distance(&piece.arc.a, &g.apply(&g.apply(from).unwrap()).unwrap())
                .unwrap();
            assert!(d1 != d2 && d2 != d3, "orbit moves along the arc");
            assert!((d1 < d2) == (d2 < d3), "orbit moves monotonically");
        }
    }
}

#[test]
fn finite_order_elements_fix_points_on_invariant_arcs() {
    let mut rng = StdRng::seed_from_u64(112);
    for _ in 0..40 {
        let size = rng.gen_range(1..4);
        let copies = rng.gen_range(2..4);
        let (d, g) = sample::rotated_star(&mut rng, copies, size);
        let order = g.order(40).expect("rotations have finite order");
        assert!(order >= 1);
        assert!(!g.fixed_set().is_empty());
        // on every invariant arc the induced map fixes a point: the fixed
        // set meets every invariant arc through the center
        let fix = g.fixed_set();
        let center = Point::Vertex(d.vertices().next().unwrap());
        assert!(fix.contains(&center));
    }
}

#[test]
fn orbit_counts_stabilize_in_depth() {
    for n in [3u32, 4] {
        for p in [2usize, 3] {
            let shallow = generate(BranchOrder::Finite(n), p as u32).unwrap();
            let deeper = generate(BranchOrder::Finite(n), p as u32 + 1).unwrap();
            let a = orbit_count(&shallow, p, OrbitMode::Exhaustive).unwrap();
            let b = orbit_count(&deeper, p, OrbitMode::Exhaustive).unwrap();
            assert_eq!(
                a.class_count, b.class_count,
                "orbit counts must stabilize for depth >= tuple length"
            );
        }
    }
}

#[test]
fn text_formats_roundtrip_random_objects() {
    use dendrite_core::format::{parse_map, parse_tree, serialize_map, serialize_tree, NamedTree};
    let mut rng = StdRng::seed_from_u64(117);
    for _ in 0..60 {
        let n = rng.gen_range(2..12);
        let d = sample::random_tree(&mut rng, n);
        let named = NamedTree::from_tree(d.clone());
        let text = serialize_tree(&named);
        let back = parse_tree(&text).unwrap();
        assert_eq!(
            back.tree.canonical_code(),
            d.canonical_code(),
            "tree text round-trip"
        );
        assert_eq!(serialize_tree(&back), text, "serialization is stable");
    }
    for _ in 0..40 {
        let g = sample::random_pl_homeo(&mut rng, 3);
        let named = NamedTree::from_tree(g.domain().clone());
        let text = serialize_map(&g, &named);
        let back = parse_map(&text, &named).unwrap();
        assert_eq!(back, g, "map text round-trip");
    }
}

#[test]
fn correspondence_roundtrip_random() {
    let mut rng = StdRng::seed_from_u64(113);
    for _ in 0..100 {
        let n = rng.gen_range(2..14);
        let d = sample::random_tree(&mut rng, n);
        let c = tree_correspondence(&d).unwrap();
        assert_eq!(
            c.tree.canonical_code(),
            d.suppress().tree.canonical_code(),
            "realization matches the suppression"
        );
        // realization paths partition the original edges
        let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
        for path in c.realization.values() {
            for (e, _) in path {
                assert!(seen.insert(*e), "each original edge appears once");
            }
        }
        if c.tree.edge_count() > 0 {
            assert_eq!(seen.len(), d.edge_count());
        }
    }
}
