//! Batch front-end: loads trees, measures, maps and actions from text
//! files, runs one operation, and prints a deterministic report.
//!
//! Reports echo the command and a digest of every input file, then emit
//! stable tab-separated machine lines followed by a one-line summary.
//! Mathematical failure verdicts (an exhausted search, say) are report
//! content; only malformed inputs exit non-zero.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dendrite_core::action::{
    elementarity_certificate, find_free_pair, free_pair_relations, move_off, proximality_push,
    ActionSet, ElementarityVerdict, FGAction, FreePairOutcome,
};
use dendrite_core::cocycle::{lp_norm, omega, LpExponent, LpNorm};
use dendrite_core::dynamics::{austro_boreal_arcs, fix_dichotomy, tectonic};
use dendrite_core::format::{
    parse_action, parse_map, parse_measure, parse_tree, rational_str, serialize_tree, NamedTree,
};
use dendrite_core::measure::{jordan_center, measure_median};
use dendrite_core::subdendrite::{helly_intersection, hull, median, SubDendrite};
use dendrite_core::symbolic::{SymGerm, SymMeasure, SymPoint, SymRegion, SymSet};
use dendrite_core::wazewski::{
    generate, orbit_count, tree_correspondence, BranchOrder, OrbitMode, TruncatedWazewski,
};
use dendrite_core::words::{PeriodicEnd, Word};
use dendrite_core::{rat, Error, Result};

#[derive(Parser)]
#[command(name = "dendrite", disable_version_flag = true)]
#[command(about = "Exact computations on finite and symbolic dendrites")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Intersection of a family of sub-dendrites given as point hulls.
    Helly {
        #[arg(long)]
        tree: PathBuf,
        /// Point list whose hull is one family member; repeatable.
        #[arg(long = "set", required = true)]
        sets: Vec<String>,
    },
    /// Hull of a point list.
    Hull {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        points: String,
    },
    /// Median of three points.
    Median {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        r: String,
    },
    /// One or two points canonically attached to a measure.
    MeasureMedian {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        measure: PathBuf,
    },
    /// Classical center of the suppressed hull of a point list.
    JordanCenter {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        points: String,
    },
    /// The alternating two-cocycle of a triple, with norms.
    Cocycle {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        r: String,
        /// Append approximate decimal columns.
        #[arg(long)]
        approx: bool,
    },
    /// Fixed set, dichotomy verdict and austro-boreal arcs of a map.
    Fix {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Tectonic decomposition of a map.
    Tectonic {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Emit a truncated universal dendrite in the tree format.
    Wazewski {
        /// Branch order, or `inf` for the capped infinite-order model.
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: u32,
        /// Branch cap standing in for infinite order.
        #[arg(long, default_value_t = 6)]
        cap: u32,
    },
    /// Count orbit classes of ordered tuples of distinct leaves.
    TupleOrbits {
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: usize,
        /// `exhaustive` or `sample`.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        cap: u32,
    },
    /// The combinatorial tree of a finite dendrite, with a round-trip check.
    TreeCorrespondence {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Search for a certified free pair.
    Pingpong {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Word length bound for the relation scan.
        #[arg(long, default_value_t = 6)]
        relations: usize,
    },
    /// Push a measure toward a target end.
    Proximality {
        #[arg(long)]
        action: PathBuf,
        /// Target end: `<rep>` or `<head>:<rep>`.
        #[arg(long)]
        target: String,
        /// Initial measure: `uniform` (cylinder-uniform) or `dirac:<word>`.
        #[arg(long, default_value = "uniform")]
        measure: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long)]
        approx: bool,
    },
    /// Find a group element moving a set off itself.
    MoveOff {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Elementarity certificate search.
    Elementarity {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::default();
    match run(cli, &mut report) {
        Ok(()) => {
            print!("{}", report.render());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[derive(Default)]
struct Report {
    header: Vec<String>,
    lines: Vec<String>,
    summary: String,
}

impl Report {
    fn echo(&mut self, text: String) {
        self.header.push(text);
    }

    fn input(&mut self, path: &Path, bytes: &str) {
        self.header.push(format!(
            "# input {} fnv64:{:016x}",
            path.display(),
            fnv64(bytes.as_bytes())
        ));
    }

    fn line(&mut self, text: String) {
        self.lines.push(text);
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            out.push_str(h);
            out.push('\n');
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&format!("# summary: {}\n", self.summary));
        out
    }
}

fn fnv64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_tree(path: &Path, report: &mut Report) -> Result<NamedTree> {
    let text = read_file(path)?;
    report.input(path, &text);
    parse_tree(&text)
}

fn load_action(path: &Path, tree: Option<&NamedTree>, report: &mut Report) -> Result<FGAction> {
    let text = read_file(path)?;
    report.input(path, &text);
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_action(&text, tree, &|rel: &str| read_file(&dir.join(rel)))
}

fn parse_branch_order(n: &str, cap: u32) -> Result<BranchOrder> {
    if n == "inf" {
        Ok(BranchOrder::InfiniteCapped(cap))
    } else {
        let v: u32 = n
            .parse()
            .map_err(|_| Error::invalid(format!("bad branch order {n}")))?;
        Ok(BranchOrder::Finite(v))
    }
}

fn parse_end_spec(spec: &str) -> Result<PeriodicEnd> {
    let (head, rep) = match spec.split_once(':') {
        Some((h, r)) => (Word::parse(h)?, Word::parse(r)?),
        None => (Word::identity(), Word::parse(spec)?),
    };
    PeriodicEnd::new(head, rep)
}

/// Symbolic set spec: comma-separated `cyl:<word>` and `v:<word>` tokens.
fn parse_sym_set(spec: &str) -> Result<SymSet> {
    let mut regions = Vec::new();
    for tok in spec.split(',').filter(|t| !t.is_empty()) {
        if let Some(w) = tok.strip_prefix("cyl:") {
            let w = Word::parse(w)?;
            if w.is_empty() {
                return Err(Error::invalid("cylinder of the empty prefix is everything"));
            }
            let last = w.last().unwrap();
            regions.push(SymRegion::CoSide {
                base: SymPoint::Vertex(w),
                excluded: SymGerm::AtVertex(last.inverse()),
            });
        } else if let Some(w) = tok.strip_prefix("v:") {
            regions.push(SymRegion::One(SymPoint::Vertex(Word::parse(w)?)));
        } else {
            return Err(Error::invalid(format!("unknown set token {tok}")));
        }
    }
    if regions.is_empty() {
        return Err(Error::Empty("empty set spec".into()));
    }
    Ok(SymSet { regions })
}

fn germ_display(
    t: &NamedTree,
    germ: (dendrite_core::tree::EdgeId, dendrite_core::tree::VertexId),
) -> String {
    format!("{}>{}", t.edge_name(germ.0), t.vertex_name(germ.1))
}

fn wazewski_named(order: BranchOrder, depth: u32) -> Result<(TruncatedWazewski, NamedTree)> {
    let tw = generate(order, depth)?;
    let named = NamedTree::from_tree(tw.tree.clone());
    Ok((tw, named))
}

fn run(cli: Cli, report: &mut Report) -> Result<()> {
    match cli.cmd {
        Cmd::Helly { tree, sets } => {
            report.echo(format!(
                "# dendrite helly --tree {} {}",
                tree.display(),
                sets.iter()
                    .map(|s| format!("--set {s}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            let t = load_tree(&tree, report)?;
            let family: Vec<SubDendrite> = sets
                .iter()
                .map(|spec| {
                    let pts = t.parse_points(spec)?;
                    hull(&t.tree, &pts)
                })
                .collect::<Result<_>>()?;
            match helly_intersection(&t.tree, &family)? {
                Some(s) => {
                    report.line(format!("helly\tnonempty\t{}", t.subdendrite_display(&s)));
                    report.summary = "the family has a common point".into();
                }
                None => {
                    report.line("helly\tempty".into());
                    report.summary = "the family has empty intersection".into();
                }
            }
        }
        Cmd::Hull { tree, points } => {
            report.echo(format!(
                "# dendrite hull --tree {} --points {points}",
                tree.display()
            ));
            let t = load_tree(&tree, report)?;
            let pts = t.parse_points(&points)?;
            let h = hull(&t.tree, &pts)?;
            report.line(format!("hull\t{}", t.subdendrite_display(&h)));
            report.summary = format!("hull of {} point(s)", pts.len());
        }
        Cmd::Median { tree, p, q, r } => {
            report.echo(format!(
                "# dendrite median --tree {} --p {p} --q {q} --r {r}",
                tree.display()
            ));
            let t = load_tree(&tree, report)?;
            let m = median(
                &t.tree,
                &t.parse_point(&p)?,
                &t.parse_point(&q)?,
                &t.parse_point(&r)?,
            )?;
            report.line(format!("median\t{}", t.point_display(&m)));
            report.summary = "median computed".into();
        }
        Cmd::MeasureMedian { tree, measure } => {
            report.echo(format!(
                "# dendrite measure-median --tree {} --measure {}",
                tree.display(),
                measure.display()
            ));
            let t = load_tree(&tree, report)?;
            let text = read_file(&measure)?;
            report.input(&measure, &text);
            let m = parse_measure(&text, &t)?;
            let med = measure_median(&t.tree, &m)?;
            let parts: Vec<String> = med.iter().map(|p| t.point_display(p)).collect();
            report.line(format!("measure-median\t{}", parts.join("\t")));
            report.summary = format!("{} median point(s)", med.len());
        }
        Cmd::JordanCenter { tree, points } => {
            report.echo(format!(
                "# dendrite jordan-center --tree {} --points {points}",
                tree.display()
            ));
            let t = load_tree(&tree, report)?;
            let pts = t.parse_points(&points)?;
            let c = jordan_center(&t.tree, &pts)?;
            let parts: Vec<String> = c.iter().map(|p| t.point_display(p)).collect();
            report.line(format!("jordan-center\t{}", parts.join("\t")));
            report.summary = format!("{} center point(s)", c.len());
        }
        Cmd::Cocycle {
            tree,
            p,
            q,
            r,
            approx,
        } => {
            report.echo(format!(
                "# dendrite cocycle --tree {} --p {p} --q {q} --r {r}",
                tree.display()
            ));
            let t = load_tree(&tree, report)?;
            let w = omega(
                &t.tree,
                &t.parse_point(&p)?,
                &t.parse_point(&q)?,
                &t.parse_point(&r)?,
            )?;
            for ((base, g1, g2), v) in w.stored_entries() {
                report.line(format!(
                    "entry\t{}\t{}\t{}\t{}",
                    t.vertex_name(*base),
                    germ_display(&t, *g1),
                    germ_display(&t, *g2),
                    rational_str(v)
                ));
            }
            let l1 = lp_norm(&w, &LpExponent::Finite(rat(1, 1)))?;
            let l2 = lp_norm(&w, &LpExponent::Finite(rat(2, 1)))?;
            let linf = lp_norm(&w, &LpExponent::Infinity)?;
            let norm_line = |name: &str, n: &LpNorm| -> String {
                let exact = match n {
                    LpNorm::Exact(v) => rational_str(v),
                    LpNorm::Root { power_sum, degree } => {
                        format!("{}^(1/{})", rational_str(power_sum), rational_str(degree))
                    }
                };
                if approx {
                    format!("{name}\t{exact}\t{:.6}", n.approx())
                } else {
                    format!("{name}\t{exact}")
                }
            };
            report.line(norm_line("l1", &l1));
            report.line(norm_line("l2", &l2));
            report.line(norm_line("linf", &linf));
            report.line(format!("support\t{}", w.support_size()));
            report.summary = format!("cocycle support {}", w.support_size());
        }
        Cmd::Fix { tree, map } => {
            report.echo(format!(
                "# dendrite fix --tree {} --map {}",
                tree.display(),
                map.display()
            ));
            let t = load_tree(&tree, report)?;
            let text = read_file(&map)?;
            report.input(&map, &text);
            let g = parse_map(&text, &t)?;
            let fix = g.fixed_set();
            for v in fix.vertices() {
                report.line(format!("fixed-vertex\tv:{}", t.vertex_name(v)));
            }
            for (e, a, b) in fix.intervals() {
                report.line(format!(
                    "fixed-interval\t{}\t{}\t{}",
                    t.edge_name(e),
                    rational_str(&a),
                    rational_str(&b)
                ));
            }
            let verdict = fix_dichotomy(&g)?;
            report.line(format!("verdict\t{verdict}"));
            for a in austro_boreal_arcs(&g)? {
                report.line(format!(
                    "ab-arc\t{}\t{}",
                    t.point_display(&a.a),
                    t.point_display(&a.b)
                ));
            }
            report.summary = format!("fixed set computed; {verdict}");
        }
        Cmd::Tectonic { tree, map } => {
            report.echo(format!(
                "# dendrite tectonic --tree {} --map {}",
                tree.display(),
                map.display()
            ));
            let t = load_tree(&tree, report)?;
            let text = read_file(&map)?;
            report.input(&map, &text);
            let g = parse_map(&text, &t)?;
            let dec = tectonic(&g)?;
            for (i, piece) in dec.pieces.iter().enumerate() {
                report.line(format!(
                    "piece\t{i}\tarc\t{}\t{}",
                    t.point_display(&piece.arc.a),
                    t.point_display(&piece.arc.b)
                ));
                report.line(format!(
                    "piece-closure\t{i}\t{}",
                    t.subdendrite_display(&piece.closure)
                ));
                report.line(format!(
                    "piece-fundamental\t{i}\t{}\t{}",
                    t.point_display(&piece.fundamental.0),
                    t.point_display(&piece.fundamental.1)
                ));
            }
            for (i, k) in dec.kernel.iter().enumerate() {
                let fixed: Vec<String> = k
                    .fixed
                    .vertices()
                    .map(|v| format!("v:{}", t.vertex_name(v)))
                    .chain(k.fixed.intervals().map(|(e, a, b)| {
                        format!(
                            "{}[{},{}]",
                            t.edge_name(e),
                            rational_str(&a),
                            rational_str(&b)
                        )
                    }))
                    .collect();
                report.line(format!(
                    "kernel\t{i}\t{}\tfixed:{}",
                    t.subdendrite_display(&k.set),
                    fixed.join(",")
                ));
            }
            report.summary = format!(
                "{} translation piece(s), {} kernel component(s)",
                dec.pieces.len(),
                dec.kernel.len()
            );
        }
        Cmd::Wazewski { n, k, cap } => {
            report.echo(format!("# dendrite wazewski --n {n} --k {k}"));
            let order = parse_branch_order(&n, cap)?;
            let (tw, named) = wazewski_named(order, k)?;
            report.line(format!(
                "# meta order={} depth={} leaves={} branch={}",
                tw.order,
                tw.depth,
                tw.leaves().len(),
                tw.tree.branch_points().len()
            ));
            for line in serialize_tree(&named).lines() {
                report.line(line.to_string());
            }
            report.summary = format!("truncation with {} vertices", tw.tree.vertex_count());
        }
        Cmd::TupleOrbits {
            n,
            k,
            p,
            mode,
            seed,
            samples,
            cap,
        } => {
            report.echo(format!("# dendrite tuple-orbits --n {n} --k {k} --p {p}"));
            let order = parse_branch_order(&n, cap)?;
            let (tw, named) = wazewski_named(order, k)?;
            let mode = match mode.as_str() {
                "exhaustive" => OrbitMode::Exhaustive,
                "sample" => OrbitMode::Sample {
                    count: samples,
                    seed,
                },
                other => return Err(Error::invalid(format!("unknown mode {other}"))),
            };
            let summary = orbit_count(&tw, p, mode)?;
            report.line(format!("orbits\t{n}\t{k}\t{p}\t{}", summary.class_count));
            for (code, tuple) in &summary.representatives {
                let parts: Vec<String> =
                    tuple.iter().map(|pt| named.point_display(pt)).collect();
                report.line(format!("code\t{n}\t{k}\t{p}\t{}\t{}", parts.join(","), code));
            }
            if summary.truncated {
                report.line("truncated\ttrue".into());
            }
            report.summary = format!(
                "{} orbit class(es), {}",
                summary.class_count,
                if summary.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                }
            );
        }
        Cmd::TreeCorrespondence { tree } => {
            report.echo(format!(
                "# dendrite tree-correspondence --tree {}",
                tree.display()
            ));
            let t = load_tree(&tree, report)?;
            let c = tree_correspondence(&t.tree)?;
            for v in c.tree.vertices() {
                report.line(format!("node\tv:{}", t.vertex_name(v)));
            }
            for e in c.tree.edge_ids() {
                let edge = c.tree.edge(e).unwrap();
                report.line(format!(
                    "tedge\tv:{}\tv:{}\t{}",
                    t.vertex_name(edge.ends.0),
                    t.vertex_name(edge.ends.1),
                    rational_str(&edge.length)
                ));
            }
            let ok = c.tree.canonical_code() == t.tree.suppress().tree.canonical_code();
            report.line(format!("roundtrip\t{}", if ok { "ok" } else { "mismatch" }));
            report.summary = format!(
                "{} node(s), {} edge(s)",
                c.tree.vertex_count(),
                c.tree.edge_count()
            );
        }
        Cmd::Pingpong {
            action,
            tree,
            depth,
            relations,
        } => {
            report.echo(format!(
                "# dendrite pingpong --action {} --depth {depth}",
                action.display()
            ));
            let named = match &tree {
                Some(path) => Some(load_tree(path, report)?),
                None => None,
            };
            let act = load_action(&action, named.as_ref(), report)?;
            let names = act.gen_names();
            match find_free_pair(&act, depth)? {
                FreePairOutcome::Certified(cert) => {
                    report.line("result\tcertified".into());
                    report.line(format!("a\t{}", cert.a.display(&names)));
                    report.line(format!("b\t{}", cert.b.display(&names)));
                    report.line(format!("A-\t{}", cert.a_minus));
                    report.line(format!("A+\t{}", cert.a_plus));
                    report.line(format!("B-\t{}", cert.b_minus));
                    report.line(format!("B+\t{}", cert.b_plus));
                    report.line("verified\ttrue".into());
                    let (checked, bad) = free_pair_relations(&act, &cert, relations)?;
                    report.line(format!("relations-checked\t{checked}"));
                    report.line(format!("relations\t{bad}"));
                    report.summary =
                        format!("free pair certified; {checked} words checked, {bad} relations");
                }
                FreePairOutcome::Failure { stage } => {
                    report.line(format!("result\tfailure\t{stage}"));
                    report.summary = format!("no certificate: {stage}");
                }
            }
        }
        Cmd::Proximality {
            action,
            target,
            measure,
            steps,
            depth,
            approx,
        } => {
            report.echo(format!(
                "# dendrite proximality --action {} --target {target} --steps {steps}",
                action.display()
            ));
            let act = load_action(&action, None, report)?;
            let target = parse_end_spec(&target)?;
            let m = match measure.as_str() {
                "uniform" => SymMeasure::CylinderUniform,
                spec => match spec.strip_prefix("dirac:") {
                    Some(w) => SymMeasure::dirac_vertex(Word::parse(w)?),
                    None => return Err(Error::invalid(format!("unknown measure {spec}"))),
                },
            };
            let rep = proximality_push(&act, &m, &target, steps, depth)?;
            let names = act.gen_names();
            for s in &rep.steps {
                let mass = rational_str(&s.mass);
                if approx {
                    report.line(format!(
                        "step\t{}\t{}\t{}\t{:.6}",
                        s.step,
                        s.word.display(&names),
                        mass,
                        dendrite_core::rat_approx(&s.mass)
                    ));
                } else {
                    report.line(format!(
                        "step\t{}\t{}\t{}",
                        s.step,
                        s.word.display(&names),
                        mass
                    ));
                }
            }
            report.line(format!("completed\t{}", rep.completed));
            if let Some(f) = &rep.failure {
                report.line(format!("failure\t{f}"));
            }
            let reached = rep
                .steps
                .last()
                .map(|s| s.mass >= rat(99, 100))
                .unwrap_or(false);
            report.line(format!("reached-99/100\t{reached}"));
            report.summary = format!(
                "{} step(s), target-side mass {}",
                rep.steps.len(),
                rep.steps
                    .last()
                    .map(|s| rational_str(&s.mass))
                    .unwrap_or_else(|| "none".into())
            );
        }
        Cmd::MoveOff {
            action,
            tree,
            set,
            depth,
        } => {
            report.echo(format!(
                "# dendrite move-off --action {} --set {set} --depth {depth}",
                action.display()
            ));
            let named = match &tree {
                Some(path) => Some(load_tree(path, report)?),
                None => None,
            };
            let act = load_action(&action, named.as_ref(), report)?;
            let target = match &act {
                FGAction::Symbolic(_) => ActionSet::Sym(parse_sym_set(&set)?),
                FGAction::Pl(a) => {
                    let named = named
                        .as_ref()
                        .ok_or_else(|| Error::invalid("pl actions need --tree"))?;
                    let pts = named.parse_points(&set)?;
                    ActionSet::Pl(hull(&a.domain, &pts)?)
                }
            };
            match move_off(&act, &target, depth)? {
                Some(w) => {
                    let names = act.gen_names();
                    report.line(format!("word\t{}", w.display(&names)));
                    report.summary = "moving element found".into();
                }
                None => {
                    report.line("result\tfailure".into());
                    report.summary = format!("no moving element up to length {depth}");
                }
            }
        }
        Cmd::Elementarity {
            action,
            tree,
            depth,
        } => {
            report.echo(format!(
                "# dendrite elementarity --action {} --depth {depth}",
                action.display()
            ));
            let named = match &tree {
                Some(path) => Some(load_tree(path, report)?),
                None => None,
            };
            let act = load_action(&action, named.as_ref(), report)?;
            let verdict = elementarity_certificate(&act, depth)?;
            match (&verdict, &named) {
                (ElementarityVerdict::FixedPoint(dendrite_core::action::ActionPoint::Pl(p)), Some(t)) => {
                    report.line(format!("verdict\tFixedPoint\t{}", t.point_display(p)));
                }
                _ => report.line(format!("verdict\t{verdict}")),
            }
            report.summary = match verdict {
                ElementarityVerdict::FixedPoint(_) => "a common fixed point exists".into(),
                ElementarityVerdict::InvariantPair(..) => "an invariant pair exists".into(),
                ElementarityVerdict::FiniteOrbit(o) => {
                    format!("a finite orbit of size {} exists", o.len())
                }
                ElementarityVerdict::Unknown => {
                    "no certificate found within the search depth".into()
                }
            };
        }
    }
    Ok(())
}
