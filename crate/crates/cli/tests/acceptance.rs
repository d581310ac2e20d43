//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the exercised counts. Run with `cargo test -p dendrite-cli --test
//! acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::prelude::*;

use dendrite_core::action::{
    find_free_pair, free_pair_relations, proximality_push, FGAction, FreePairOutcome, SymAction,
};
use dendrite_core::cocycle::{
    cocycle_identity_check, lp_norm, omega, omega_by_coboundary, LpExponent, LpNorm,
};
use dendrite_core::dynamics::{austro_boreal_arcs, fix_dichotomy, tectonic, FixVerdict};
use dendrite_core::measure::measure_median;
use dendrite_core::sample;
use dendrite_core::subdendrite::{arc, helly_intersection, SubDendrite};
use dendrite_core::symbolic::{FreeModel, SymMeasure};
use dendrite_core::tree::{EdgeId, Point, Subdivision, VertexId};
use dendrite_core::wazewski::{generate, orbit_count, tree_correspondence, BranchOrder, OrbitMode};
use dendrite_core::words::{PeriodicEnd, Word};
use dendrite_core::rat;

fn graph_parts(s: &SubDendrite, sub: &Subdivision) -> (BTreeSet<VertexId>, BTreeSet<EdgeId>) {
    let mapped = s.map_to_subdivision(sub);
    assert_eq!(mapped.partials().count(), 0);
    (
        mapped.full_vertices().collect(),
        mapped.full_edges().collect(),
    )
}

fn family_cuts(family: &[SubDendrite]) -> Vec<Point> {
    family
        .iter()
        .flat_map(|s| {
            s.partials()
                .flat_map(|(e, a, b)| [Point::Interior(e, a), Point::Interior(e, b)])
        })
        .collect()
}

/// Criterion 1: Helly oracle equivalence on 1000 random trees.
#[test]
fn criterion_1_helly_oracle() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(20_001);
    let mut checked = 0;
    for case in 0..1000 {
        let n = rng.gen_range(2..=14);
        let d = sample::random_tree(&mut rng, n);
        let k = rng.gen_range(2..=6);
        // draw until the family pairwise intersects; after a few misses,
        // thread every member through a common point
        let mut family: Vec<SubDendrite> = Vec::new();
        'draw: for attempt in 0..20 {
            let cand: Vec<SubDendrite> =
                (0..k).map(|_| sample::random_subdendrite(&mut rng, &d)).collect();
            let pairwise = (0..k).all(|i| {
                (0..k).all(|j| cand[i].intersect(&d, &cand[j]).is_some())
            });
            if pairwise {
                family = cand;
                break 'draw;
            }
            if attempt == 19 {
                let common = sample::random_point(&mut rng, &d);
                family = cand
                    .into_iter()
                    .map(|s| {
                        let a = arc(&d, &s.some_point(), &common).unwrap();
                        s.union_connected(&d, &a.carrier)
                    })
                    .collect();
            }
        }
        let got = helly_intersection(&d, &family).unwrap();
        let s = got.unwrap_or_else(|| {
            panic!("case {case}: pairwise-intersecting family with empty intersection")
        });
        // brute-force pointwise intersection over a common subdivision
        let sub = d.subdivide(&family_cuts(&family));
        let mut verts: Option<BTreeSet<VertexId>> = None;
        let mut edges: Option<BTreeSet<EdgeId>> = None;
        for m in &family {
            let (v, e) = graph_parts(m, &sub);
            verts = Some(match verts {
                None => v,
                Some(prev) => prev.intersection(&v).copied().collect(),
            });
            edges = Some(match edges {
                None => e,
                Some(prev) => prev.intersection(&e).copied().collect(),
            });
        }
        let (gv, ge) = graph_parts(&s, &sub);
        assert_eq!(gv, verts.unwrap(), "case {case}: vertex parts differ");
        assert_eq!(ge, edges.unwrap(), "case {case}: edge parts differ");
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "criterion 1 exceeded 30 s: {elapsed:?}");
    println!(
        "criterion 1: PASS - helly equals the brute-force intersection on {checked} families ({elapsed:?})"
    );
}

/// Criterion 2: measure-median equivariance on 300 random triples.
#[test]
fn criterion_2_measure_median_equivariance() {
    let mut rng = StdRng::seed_from_u64(20_002);
    for case in 0..300 {
        let (d, g) = sample::random_automorphism(&mut rng, 4);
        let m = sample::random_measure(&mut rng, &d);
        let med = measure_median(&d, &m).unwrap();
        assert!(
            med.len() == 1 || med.len() == 2,
            "case {case}: cardinality {}",
            med.len()
        );
        let pushed = g.pushforward(&m).unwrap();
        let lhs = measure_median(&d, &pushed).unwrap();
        let rhs: BTreeSet<Point> = med.iter().map(|p| g.apply(p).unwrap()).collect();
        assert_eq!(lhs, rhs, "case {case}: equivariance broke");
    }
    println!("criterion 2: PASS - measure-median commutes with 300 automorphisms exactly");
}

/// Criterion 3: cocycle laws on 500 random triples and 200 quadruples.
#[test]
fn criterion_3_cocycle_laws() {
    let mut rng = StdRng::seed_from_u64(20_003);
    for case in 0..500 {
        let n = rng.gen_range(3..=12);
        let d = sample::random_tree(&mut rng, n);
        let p = sample::random_point(&mut rng, &d);
        let q = sample::random_point(&mut rng, &d);
        let r = sample::random_point(&mut rng, &d);
        let w = omega(&d, &p, &q, &r).unwrap();
        assert_eq!(
            w,
            omega_by_coboundary(&d, &p, &q, &r).unwrap(),
            "case {case}: coboundary route disagrees"
        );
        let l1 = match lp_norm(&w, &LpExponent::Finite(rat(1, 1))).unwrap() {
            LpNorm::Exact(v) => v,
            _ => unreachable!(),
        };
        assert!(
            l1 == rat(0, 1) || l1 == rat(2, 1) || l1 == rat(6, 1),
            "case {case}: l1 norm {l1}"
        );
        let linf = match lp_norm(&w, &LpExponent::Infinity).unwrap() {
            LpNorm::Exact(v) => v,
            _ => unreachable!(),
        };
        assert!(linf <= rat(1, 1), "case {case}: sup norm {linf}");
        let in_common_arc = arc(&d, &p, &q).unwrap().carrier.contains(&r)
            || arc(&d, &q, &r).unwrap().carrier.contains(&p)
            || arc(&d, &r, &p).unwrap().carrier.contains(&q);
        assert_eq!(
            l1 == rat(6, 1),
            !in_common_arc,
            "case {case}: six entries iff the triple spans a tripod"
        );
    }
    let mut rng = StdRng::seed_from_u64(20_004);
    for case in 0..200 {
        let n = rng.gen_range(3..=10);
        let d = sample::random_tree(&mut rng, n);
        let pts: Vec<Point> = (0..4).map(|_| sample::random_point(&mut rng, &d)).collect();
        assert!(
            cocycle_identity_check(&d, &pts[0], &pts[1], &pts[2], &pts[3]).unwrap(),
            "case {case}: cocycle identity broke"
        );
    }
    println!("criterion 3: PASS - cocycle laws hold on 500 triples and 200 quadruples");
}

/// Criterion 4: dynamics suite on 300 random PL homeomorphisms.
#[test]
fn criterion_4_dynamics_suite() {
    let mut rng = StdRng::seed_from_u64(20_005);
    for case in 0..300 {
        let g = sample::random_pl_homeo(&mut rng, 4);
        let d = g.domain().clone();
        let fix = g.fixed_set();
        assert!(!fix.is_empty(), "case {case}: empty fixed set");
        let arcs = austro_boreal_arcs(&g).unwrap();
        match fix_dichotomy(&g).unwrap() {
            FixVerdict::ConnectedFix => {
                assert!(arcs.is_empty(), "case {case}: connected fix with arcs")
            }
            FixVerdict::HasAustroBoreal => {
                assert!(!arcs.is_empty(), "case {case}: split fix without arcs")
            }
        }
        let t = tectonic(&g).unwrap();
        // the closed pieces cover the tree
        for p in SubDendrite::whole(&d).sample_points(&d) {
            let covered = t.pieces.iter().any(|o| o.closure.contains(&p))
                || t.kernel.iter().any(|k| k.set.contains(&p));
            assert!(covered, "case {case}: point {p} uncovered");
        }
        // open pieces are pairwise disjoint: closures meet only in boundary
        for i in 0..t.pieces.len() {
            for j in (i + 1)..t.pieces.len() {
                if let Some(m) = t.pieces[i].closure.intersect(&d, &t.pieces[j].closure) {
                    let bi = [&t.pieces[i].boundary.0, &t.pieces[i].boundary.1];
                    for p in m.sample_points(&d) {
                        assert!(bi.contains(&&p), "case {case}: interiors overlap at {p}");
                    }
                }
            }
        }
        for k in &t.kernel {
            assert_eq!(
                g.image_subdendrite(&k.set),
                k.set,
                "case {case}: kernel component moves"
            );
            assert!(!k.fixed.is_empty(), "case {case}: kernel without fixed points");
            assert!(
                k.fixed.is_connected(&d),
                "case {case}: disconnected kernel fixed set"
            );
        }
    }
    println!("criterion 4: PASS - fixed sets, dichotomy and tectonics verified on 300 maps");
}

/// Criterion 5: tuple-orbit counts on the order-3 and order-4 truncations.
#[test]
fn criterion_5_orbit_counts() {
    let start = Instant::now();
    let expected = [
        (3u32, 3u32, 3usize, 1usize),
        (3, 4, 3, 1),
        (4, 3, 3, 1),
        (4, 4, 3, 1),
        (3, 3, 4, 3),
        (3, 4, 4, 3),
        (4, 3, 4, 4),
        (4, 4, 4, 4),
    ];
    for (n, k, p, want) in expected {
        let t = generate(BranchOrder::Finite(n), k).unwrap();
        let got = orbit_count(&t, p, OrbitMode::Exhaustive).unwrap();
        assert!(!got.truncated, "({n},{k},{p}) hit the work cap");
        assert_eq!(
            got.class_count, want,
            "orbit count ({n},{k},{p}) = {} but expected {want}",
            got.class_count
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 5 exceeded 60 s: {elapsed:?}");
    println!(
        "criterion 5: PASS - triples are transitive and quadruples split 3/4 ways, stable in depth ({elapsed:?})"
    );
}

/// Criterion 6: the free-pair pipeline on the rank-2 symbolic action.
#[test]
fn criterion_6_free_pair_pipeline() {
    let action = FGAction::Symbolic(SymAction {
        model: FreeModel::new(2).unwrap(),
        gens: vec![
            ("a".into(), Word::parse("a").unwrap()),
            ("b".into(), Word::parse("b").unwrap()),
        ],
    });
    let cert = match find_free_pair(&action, 4).unwrap() {
        FreePairOutcome::Certified(c) => *c,
        FreePairOutcome::Failure { stage } => panic!("pipeline failed at {stage}"),
    };
    assert!(dendrite_core::action::verify_pingpong(&action, &cert).unwrap());
    let (checked, relations) = free_pair_relations(&action, &cert, 6).unwrap();
    // all nonempty reduced words of length <= 6 in the pair: 4 * 3^(k-1)
    // per length k, 1456 in total (not counting the identity)
    assert_eq!(checked, 1456);
    assert!(checked > 4 * 243, "covers the stated word budget");
    assert_eq!(relations, 0, "a relation would break freeness");
    println!(
        "criterion 6: PASS - certificate found at depth 4, verified, {checked} words move the basepoint"
    );
}

/// Criterion 7: measure pushing toward an end on the rank-2 model.
#[test]
fn criterion_7_proximality_demo() {
    let action = FGAction::Symbolic(SymAction {
        model: FreeModel::new(2).unwrap(),
        gens: vec![
            ("a".into(), Word::parse("a").unwrap()),
            ("b".into(), Word::parse("b").unwrap()),
        ],
    });
    let target = PeriodicEnd::new(Word::identity(), Word::parse("a").unwrap()).unwrap();
    let rep = proximality_push(&action, &SymMeasure::CylinderUniform, &target, 8, 64).unwrap();
    assert!(rep.completed, "push failed: {:?}", rep.failure);
    assert_eq!(rep.steps.len(), 8);
    let first_success = rep
        .steps
        .iter()
        .position(|s| s.mass >= rat(99, 100))
        .expect("the mass reaches 99/100 within 8 steps");
    for w in rep.steps[first_success..].windows(2) {
        assert!(
            w[1].mass >= w[0].mass,
            "masses decreased after the first success: {} then {}",
            w[0].mass,
            w[1].mass
        );
    }
    assert!(rep.steps.last().unwrap().mass >= rat(99, 100));
    println!(
        "criterion 7: PASS - pushed mass reaches {} by step 8, monotone from step {}",
        rep.steps.last().unwrap().mass,
        first_success + 1
    );
}

/// Criterion 8: tree correspondence round-trip on 200 random dendrites.
#[test]
fn criterion_8_correspondence_roundtrip() {
    let mut rng = StdRng::seed_from_u64(20_008);
    for case in 0..200 {
        let n = rng.gen_range(2..=14);
        let d = sample::random_tree(&mut rng, n);
        let c = tree_correspondence(&d).unwrap();
        assert_eq!(
            c.tree.canonical_code(),
            d.suppress().tree.canonical_code(),
            "case {case}: realization does not match the suppressed input"
        );
    }
    println!("criterion 8: PASS - correspondence round-trips on 200 random dendrites");
}

/// Criterion 9: repeated CLI runs are byte-identical on every subcommand.
#[test]
fn criterion_9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_dendrite");
    let fixture = |name: &str| format!("tests/fixtures/{name}");
    let cases: Vec<Vec<String>> = vec![
        vec![
            "helly".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--set".into(),
            "v:l1,v:c".into(),
            "--set".into(),
            "v:l2,v:c".into(),
        ],
        vec![
            "hull".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--points".into(),
            "v:l1,e:e2:1/2".into(),
        ],
        vec![
            "median".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--p".into(),
            "v:l1".into(),
            "--q".into(),
            "v:l2".into(),
            "--r".into(),
            "v:l3".into(),
        ],
        vec![
            "measure-median".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--measure".into(),
            fixture("legs.measure"),
        ],
        vec![
            "jordan-center".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--points".into(),
            "v:l1,v:l2,v:l3".into(),
        ],
        vec![
            "cocycle".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--p".into(),
            "l1".into(),
            "--q".into(),
            "l2".into(),
            "--r".into(),
            "l3".into(),
        ],
        vec![
            "fix".into(),
            "--tree".into(),
            fixture("tripod.tree"),
            "--map".into(),
            fixture("rotate.map"),
        ],
        vec![
            "tectonic".into(),
            "--tree".into(),
            fixture("htree.tree"),
            "--map".into(),
            fixture("rungshift.map"),
        ],
        vec!["wazewski".into(), "--n".into(), "3".into(), "--k".into(), "2".into()],
        vec![
            "tuple-orbits".into(),
            "--n".into(),
            "3".into(),
            "--k".into(),
            "2".into(),
            "--p".into(),
            "4".into(),
        ],
        vec![
            "tree-correspondence".into(),
            "--tree".into(),
            fixture("path.tree"),
        ],
        vec![
            "pingpong".into(),
            "--action".into(),
            fixture("rank2.action"),
            "--depth".into(),
            "4".into(),
        ],
        vec![
            "proximality".into(),
            "--action".into(),
            fixture("rank2.action"),
            "--target".into(),
            "a".into(),
            "--steps".into(),
            "4".into(),
        ],
        vec![
            "move-off".into(),
            "--action".into(),
            fixture("rank2.action"),
            "--set".into(),
            "cyl:a".into(),
        ],
        vec![
            "elementarity".into(),
            "--action".into(),
            fixture("rank2.action"),
            "--depth".into(),
            "5".into(),
        ],
    ];
    for args in &cases {
        let run = || {
            let out = std::process::Command::new(bin)
                .args(args)
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "subcommand {:?} failed: {}",
                args,
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let first = run();
        let second = run();
        assert_eq!(first, second, "subcommand {:?} is not deterministic", args);
        assert!(!first.is_empty());
    }
    println!(
        "criterion 9: PASS - {} subcommand invocations repeated byte-identically",
        cases.len()
    );
}
