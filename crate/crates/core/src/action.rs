//! Finitely generated group actions on dendrites, on two exact backends:
//! piecewise-linear homeomorphisms of a finite tree, and left multiplication
//! of a free group on its compactified Cayley tree.
//!
//! Every finite tree action is elementary, so the symbolic backend carries
//! the genuinely non-elementary phenomena: free-pair certification by the
//! ping-pong criterion and the constructive pushing of measures toward a
//! target end. All searches run breadth-first over freely reduced words in
//! the generators, shortest first then lexicographic, and every produced
//! witness is re-verified exactly before being returned.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::dynamics::PLHomeo;
use crate::subdendrite::{
    arc, complement_closures, hull, u_side as pl_u_side, SubDendrite,
};
use crate::symbolic::{
    median as sym_median, u_side as sym_u_side, FreeModel, SymMeasure, SymPoint, SymRegion,
    SymSet,
};
use crate::tree::{Dendrite, Point};
use crate::words::{axis_ends, Letter, PeriodicEnd, Word};
use crate::{rat, Error, Rational, Result};

/// A finitely generated action.
pub enum FGAction {
    Pl(PlAction),
    Symbolic(SymAction),
}

pub struct PlAction {
    pub domain: Dendrite,
    pub gens: Vec<(String, PLHomeo)>,
}

pub struct SymAction {
    pub model: FreeModel,
    pub gens: Vec<(String, Word)>,
}

impl SymAction {
    /// The configured end sample: axis ends of the non-trivial generators,
    /// extended by the single-letter ends when fewer than two remain,
    /// sorted lexicographically.
    pub fn end_sample(&self) -> Vec<PeriodicEnd> {
        let mut ends: Vec<PeriodicEnd> = Vec::new();
        for (_, w) in &self.gens {
            if !w.is_empty() {
                let (fwd, bwd) = axis_ends(w).expect("non-trivial word");
                ends.push(fwd);
                ends.push(bwd);
            }
        }
        if ends.len() < 2 {
            for l in self.model.letters() {
                ends.push(
                    PeriodicEnd::new(Word::identity(), Word::letter(l))
                        .expect("single letters are valid periods"),
                );
            }
        }
        ends.sort_by(|a, b| a.cmp_lex(b));
        ends.dedup();
        ends
    }
}

/// A group element as a freely reduced word in the generators:
/// nonzero 1-based indices, negative for inverses.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct GroupWord(pub Vec<i32>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn gen(i: usize, inverse: bool) -> Self {
        let idx = (i + 1) as i32;
        GroupWord(vec![if inverse { -idx } else { idx }])
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.0.clone();
        for &x in &other.0 {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        GroupWord(out)
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&x| {
                let name = &names[(x.unsigned_abs() - 1) as usize];
                if x < 0 {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Breadth-first enumeration of freely reduced generator words: by length,
/// then lexicographically in the order g1, g1^-1, g2, g2^-1, ...
pub fn group_words(num_gens: usize, max_len: usize) -> Vec<GroupWord> {
    let steps: Vec<i32> = (1..=num_gens as i32).flat_map(|i| [i, -i]).collect();
    let mut out = Vec::new();
    let mut queue: VecDeque<GroupWord> = VecDeque::from([GroupWord::identity()]);
    while let Some(w) = queue.pop_front() {
        if w.len() >= max_len {
            continue;
        }
        for &s in &steps {
            if w.0.last() == Some(&-s) {
                continue;
            }
            let mut next = w.0.clone();
            next.push(s);
            let next = GroupWord(next);
            out.push(next.clone());
            queue.push_back(next);
        }
    }
    out
}

/// A point on either backend.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ActionPoint {
    Pl(Point),
    Sym(SymPoint),
}

impl std::fmt::Display for ActionPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionPoint::Pl(p) => write!(f, "{p}"),
            ActionPoint::Sym(p) => write!(f, "{p}"),
        }
    }
}

/// A closed subset on either backend.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ActionSet {
    Pl(SubDendrite),
    Sym(SymSet),
}

impl std::fmt::Display for ActionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionSet::Pl(s) => {
                let verts: Vec<String> = s.full_vertices().map(|v| v.to_string()).collect();
                let edges: Vec<String> = s.full_edges().map(|e| e.to_string()).collect();
                let parts: Vec<String> = s
                    .partials()
                    .map(|(e, a, b)| format!("{e}[{a},{b}]"))
                    .collect();
                write!(f, "verts:{};edges:{};part:{}", verts.join(","), edges.join(","), parts.join(","))
            }
            ActionSet::Sym(s) => write!(f, "{s}"),
        }
    }
}

impl FGAction {
    pub fn num_gens(&self) -> usize {
        match self {
            FGAction::Pl(a) => a.gens.len(),
            FGAction::Symbolic(a) => a.gens.len(),
        }
    }

    pub fn gen_names(&self) -> Vec<String> {
        match self {
            FGAction::Pl(a) => a.gens.iter().map(|(n, _)| n.clone()).collect(),
            FGAction::Symbolic(a) => a.gens.iter().map(|(n, _)| n.clone()).collect(),
        }
    }

    /// Evaluates a generator word on the piecewise-linear backend.
    fn eval_pl(&self, w: &GroupWord) -> Result<PLHomeo> {
        let a = match self {
            FGAction::Pl(a) => a,
            _ => return Err(Error::Internal("wrong backend".into())),
        };
        let mut acc = PLHomeo::identity(a.domain.clone());
        for &x in &w.0 {
            let (_, g) = &a.gens[(x.unsigned_abs() - 1) as usize];
            let step = if x < 0 { g.inverse() } else { g.clone() };
            acc = step.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Evaluates a generator word on the symbolic backend.
    fn eval_sym(&self, w: &GroupWord) -> Result<Word> {
        let a = match self {
            FGAction::Symbolic(a) => a,
            _ => return Err(Error::Internal("wrong backend".into())),
        };
        let mut acc = Word::identity();
        for &x in &w.0 {
            let (_, g) = &a.gens[(x.unsigned_abs() - 1) as usize];
            let step = if x < 0 { g.inverse() } else { g.clone() };
            acc = acc.concat(&step);
        }
        Ok(acc)
    }

    pub fn apply(&self, w: &GroupWord, p: &ActionPoint) -> Result<ActionPoint> {
        match (self, p) {
            (FGAction::Pl(_), ActionPoint::Pl(p)) => {
                Ok(ActionPoint::Pl(self.eval_pl(w)?.apply(p)?))
            }
            (FGAction::Symbolic(_), ActionPoint::Sym(p)) => {
                Ok(ActionPoint::Sym(p.translate(&self.eval_sym(w)?)))
            }
            _ => Err(Error::DomainMismatch("point from the other backend".into())),
        }
    }

    pub fn apply_set(&self, w: &GroupWord, s: &ActionSet) -> Result<ActionSet> {
        match (self, s) {
            (FGAction::Pl(_), ActionSet::Pl(s)) => {
                Ok(ActionSet::Pl(self.eval_pl(w)?.image_subdendrite(s)))
            }
            (FGAction::Symbolic(_), ActionSet::Sym(s)) => {
                Ok(ActionSet::Sym(s.translate(&self.eval_sym(w)?)))
            }
            _ => Err(Error::DomainMismatch("set from the other backend".into())),
        }
    }

    fn sets_disjoint(&self, a: &ActionSet, b: &ActionSet) -> Result<bool> {
        match (self, a, b) {
            (FGAction::Pl(act), ActionSet::Pl(a), ActionSet::Pl(b)) => {
                Ok(a.intersect(&act.domain, b).is_none())
            }
            (FGAction::Symbolic(_), ActionSet::Sym(a), ActionSet::Sym(b)) => {
                Ok(a.disjoint_from(b))
            }
            _ => Err(Error::DomainMismatch("sets from different backends".into())),
        }
    }

    fn set_subset(&self, a: &ActionSet, b: &ActionSet) -> Result<bool> {
        match (self, a, b) {
            (FGAction::Pl(act), ActionSet::Pl(a), ActionSet::Pl(b)) => {
                Ok(a.intersect(&act.domain, b).as_ref() == Some(a))
            }
            (FGAction::Symbolic(_), ActionSet::Sym(a), ActionSet::Sym(b)) => Ok(a.subset_of(b)),
            _ => Err(Error::DomainMismatch("sets from different backends".into())),
        }
    }

    /// The canonical basepoint used by soundness witnesses.
    pub fn basepoint(&self) -> ActionPoint {
        match self {
            FGAction::Pl(a) => ActionPoint::Pl(Point::Vertex(
                a.domain.vertices().next().expect("non-empty tree"),
            )),
            FGAction::Symbolic(_) => ActionPoint::Sym(SymPoint::Vertex(Word::identity())),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ElementarityVerdict {
    FixedPoint(ActionPoint),
    InvariantPair(ActionPoint, ActionPoint),
    FiniteOrbit(Vec<ActionPoint>),
    /// Honest non-certification: no certificate found within the search
    /// depth; never a disproof of elementarity.
    Unknown,
}

impl std::fmt::Display for ElementarityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ElementarityVerdict::FixedPoint(p) => write!(f, "FixedPoint\t{p}"),
            ElementarityVerdict::InvariantPair(p, q) => write!(f, "InvariantPair\t{p}\t{q}"),
            ElementarityVerdict::FiniteOrbit(o) => {
                write!(f, "FiniteOrbit\t{}", o.len())
            }
            ElementarityVerdict::Unknown => write!(f, "Unknown"),
        }
    }
}

/// Searches for an elementarity certificate: an exact common fixed point of
/// the generators, an invariant pair, or a finite vertex orbit within the
/// word-length bound.
pub fn elementarity_certificate(action: &FGAction, depth: usize) -> Result<ElementarityVerdict> {
    match action {
        FGAction::Pl(a) => {
            let mut fix = a
                .gens
                .first()
                .map(|(_, g)| g.fixed_set())
                .unwrap_or_else(|| PLHomeo::identity(a.domain.clone()).fixed_set());
            for (_, g) in a.gens.iter().skip(1) {
                fix = fix.intersect(&a.domain, &g.fixed_set());
            }
            if !fix.is_empty() {
                let p = fix
                    .vertices()
                    .next()
                    .map(Point::Vertex)
                    .or_else(|| {
                        fix.intervals()
                            .next()
                            .map(|(e, lo, _)| Point::Interior(e, lo))
                    })
                    .expect("non-empty closed set has a point");
                return Ok(ElementarityVerdict::FixedPoint(ActionPoint::Pl(p)));
            }
            // vertex orbit search
            for start in a.domain.vertices() {
                let mut orbit: BTreeSet<Point> = BTreeSet::from([Point::Vertex(start)]);
                let mut frontier: Vec<Point> = orbit.iter().cloned().collect();
                let mut closed = true;
                for _ in 0..depth {
                    let mut next = Vec::new();
                    for p in &frontier {
                        for (_, g) in &a.gens {
                            for img in [g.apply(p)?, g.inverse().apply(p)?] {
                                if orbit.insert(img.clone()) {
                                    next.push(img);
                                }
                            }
                        }
                    }
                    if next.is_empty() {
                        break;
                    }
                    frontier = next;
                    closed = false;
                }
                // the orbit is closed when one more application adds nothing
                let mut really_closed = closed;
                if !really_closed {
                    really_closed = true;
                    'check: for p in &orbit {
                        for (_, g) in &a.gens {
                            if !orbit.contains(&g.apply(p)?) {
                                really_closed = false;
                                break 'check;
                            }
                        }
                    }
                }
                if really_closed {
                    let pts: Vec<ActionPoint> =
                        orbit.iter().cloned().map(ActionPoint::Pl).collect();
                    return Ok(match pts.len() {
                        1 => ElementarityVerdict::FixedPoint(pts[0].clone()),
                        2 => ElementarityVerdict::InvariantPair(pts[0].clone(), pts[1].clone()),
                        _ => ElementarityVerdict::FiniteOrbit(pts),
                    });
                }
            }
            Ok(ElementarityVerdict::Unknown)
        }
        FGAction::Symbolic(a) => {
            let nontrivial: Vec<&Word> = a
                .gens
                .iter()
                .map(|(_, w)| w)
                .filter(|w| !w.is_empty())
                .collect();
            if nontrivial.is_empty() {
                return Ok(ElementarityVerdict::FixedPoint(ActionPoint::Sym(
                    SymPoint::Vertex(Word::identity()),
                )));
            }
            // fixed ends of a non-trivial word are exactly its axis ends
            let mut common: Option<BTreeSet<PeriodicEnd>> = None;
            for w in &nontrivial {
                let (fwd, bwd) = axis_ends(w)?;
                let pair = BTreeSet::from([fwd, bwd]);
                common = Some(match common {
                    None => pair,
                    Some(c) => c.intersection(&pair).cloned().collect(),
                });
            }
            let common = common.unwrap();
            if let Some(e) = common.into_iter().next() {
                return Ok(ElementarityVerdict::FixedPoint(ActionPoint::Sym(
                    SymPoint::End(e),
                )));
            }
            // invariant pair among the axis ends
            let mut candidates: BTreeSet<PeriodicEnd> = BTreeSet::new();
            for w in &nontrivial {
                let (fwd, bwd) = axis_ends(w)?;
                candidates.insert(fwd);
                candidates.insert(bwd);
            }
            let list: Vec<PeriodicEnd> = candidates.into_iter().collect();
            for i in 0..list.len() {
                for j in (i + 1)..list.len() {
                    let pair = BTreeSet::from([list[i].clone(), list[j].clone()]);
                    let preserved = a.gens.iter().all(|(_, w)| {
                        let image: BTreeSet<PeriodicEnd> =
                            pair.iter().map(|e| e.translate(w)).collect();
                        image == pair
                    });
                    if preserved {
                        return Ok(ElementarityVerdict::InvariantPair(
                            ActionPoint::Sym(SymPoint::End(list[i].clone())),
                            ActionPoint::Sym(SymPoint::End(list[j].clone())),
                        ));
                    }
                }
            }
            // finite vertex orbit within the depth bound
            let mut orbit: BTreeSet<Word> = BTreeSet::from([Word::identity()]);
            let mut frontier: Vec<Word> = vec![Word::identity()];
            for _ in 0..depth {
                let mut next = Vec::new();
                for v in &frontier {
                    for (_, w) in &a.gens {
                        for img in [w.concat(v), w.inverse().concat(v)] {
                            if orbit.insert(img.clone()) {
                                next.push(img);
                            }
                        }
                    }
                }
                if next.is_empty() {
                    let pts: Vec<ActionPoint> = orbit
                        .iter()
                        .cloned()
                        .map(|w| ActionPoint::Sym(SymPoint::Vertex(w)))
                        .collect();
                    return Ok(match pts.len() {
                        1 => ElementarityVerdict::FixedPoint(pts[0].clone()),
                        2 => ElementarityVerdict::InvariantPair(pts[0].clone(), pts[1].clone()),
                        _ => ElementarityVerdict::FiniteOrbit(pts),
                    });
                }
                frontier = next;
            }
            Ok(ElementarityVerdict::Unknown)
        }
    }
}

/// Finds the first generator word moving the set entirely off itself;
/// `None` reports an exhausted search, not an error.
pub fn move_off(
    action: &FGAction,
    set: &ActionSet,
    depth: usize,
) -> Result<Option<GroupWord>> {
    // a set covering everything can never be moved off itself; the search
    // below simply exhausts in that case
    for w in group_words(action.num_gens(), depth) {
        let moved = action.apply_set(&w, set)?;
        if action.sets_disjoint(&moved, set)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// A ping-pong certificate: two group words and four disjoint sets with the
/// contraction inclusions, exactly checkable.
#[derive(Clone, Debug)]
pub struct PingPongCertificate {
    pub a: GroupWord,
    pub b: GroupWord,
    pub a_minus: ActionSet,
    pub a_plus: ActionSet,
    pub b_minus: ActionSet,
    pub b_plus: ActionSet,
}

#[derive(Debug)]
pub enum FreePairOutcome {
    Certified(Box<PingPongCertificate>),
    Failure { stage: String },
}

/// Follows the constructive recipe: pick two sample ends with a branch
/// point between them, cut at regular points on both sides, search for the
/// two contractions, and conjugate by an element moving the middle off
/// itself.
pub fn find_free_pair(action: &FGAction, depth: usize) -> Result<FreePairOutcome> {
    match action {
        FGAction::Symbolic(a) => {
            let ends = a.end_sample();
            if ends.len() < 2 {
                return Ok(FreePairOutcome::Failure {
                    stage: "fewer than two sample ends".into(),
                });
            }
            let x = SymPoint::End(ends[0].clone());
            let y = SymPoint::End(ends[1].clone());
            let root = SymPoint::Vertex(Word::identity());
            let r = sym_median(&x, &y, &root);
            let rw = match &r {
                SymPoint::Vertex(w) => w.clone(),
                _ => return Err(Error::Internal("median of ends is a vertex".into())),
            };
            // regular cut points: midpoints of the first edges toward x and y
            let step_to = |target: &SymPoint| -> Result<SymPoint> {
                let g = crate::symbolic::germ_toward(&r, target)?;
                let l = match g {
                    crate::symbolic::SymGerm::AtVertex(l) => l,
                    _ => unreachable!("vertex base carries letter germs"),
                };
                let nbr = rw.concat(&Word::letter(l));
                SymPoint::edge_midpoint(&rw, &nbr)
            };
            let p = step_to(&x)?;
            let q = step_to(&y)?;
            let up_x = SymSet::one(sym_u_side(&p, &x)?);
            let up_y = SymSet::one(sym_u_side(&p, &y)?);
            let uq_x = SymSet::one(sym_u_side(&q, &x)?);
            let uq_y = SymSet::one(sym_u_side(&q, &y)?);
            let g = search_mapping_into(action, &up_y, &up_x, depth)?;
            let g = match g {
                Some(g) => g,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no contraction toward the first end".into(),
                    })
                }
            };
            let h = search_mapping_into(action, &uq_x, &uq_y, depth)?;
            let h = match h {
                Some(h) => h,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no contraction toward the second end".into(),
                    })
                }
            };
            let a_word = h.concat(&g);
            let a_minus = ActionSet::Sym(up_x.clone());
            let a_plus = action.apply_set(&a_word, &ActionSet::Sym(up_y.clone()))?;
            let y_set = ActionSet::Sym(
                up_x.clone()
                    .union(uq_y.clone())
                    .union(SymSet::one(SymRegion::Seg(p.clone(), q.clone()))),
            );
            let f = match move_off(action, &y_set, depth)? {
                Some(f) => f,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no element moving the middle off itself".into(),
                    })
                }
            };
            let b_word = f.concat(&a_word).concat(&f.inverse());
            let b_minus = action.apply_set(&f, &a_minus)?;
            let b_plus = action.apply_set(&f, &a_plus)?;
            let cert = PingPongCertificate {
                a: a_word,
                b: b_word,
                a_minus,
                a_plus,
                b_minus,
                b_plus,
            };
            if !verify_pingpong(action, &cert)? {
                return Err(Error::Internal(
                    "constructed certificate failed verification".into(),
                ));
            }
            Ok(FreePairOutcome::Certified(Box::new(cert)))
        }
        FGAction::Pl(a) => {
            // finite trees: follow the same recipe; the searches come back
            // empty for elementary actions, which is every finite action
            let leaves = a.domain.ends();
            let mut chosen: Option<(Point, Point, Point)> = None;
            'outer: for x in &leaves {
                for y in &leaves {
                    if x >= y {
                        continue;
                    }
                    let carrier = arc(&a.domain, x, y)?.carrier;
                    for b in a.domain.branch_points() {
                        if carrier.contains(&b) && b != *x && b != *y {
                            chosen = Some((x.clone(), y.clone(), b));
                            break 'outer;
                        }
                    }
                }
            }
            let (x, y, r) = match chosen {
                Some(t) => t,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no branch point between two ends".into(),
                    })
                }
            };
            let rv = match r {
                Point::Vertex(v) => v,
                _ => unreachable!("branch points are vertices"),
            };
            let step_to = |target: &Point| -> Result<Point> {
                let (e, _) = a
                    .domain
                    .direction_from(rv, target)?
                    .expect("target differs from the branch point");
                Ok(Point::Interior(e, rat(1, 2)))
            };
            let p = step_to(&x)?;
            let q = step_to(&y)?;
            let up_x = ActionSet::Pl(pl_u_side(&a.domain, &p, &x)?);
            let up_y = ActionSet::Pl(pl_u_side(&a.domain, &p, &y)?);
            let uq_x = ActionSet::Pl(pl_u_side(&a.domain, &q, &x)?);
            let uq_y = ActionSet::Pl(pl_u_side(&a.domain, &q, &y)?);
            let g = match search_mapping_into_pl(action, &up_y, &up_x, depth)? {
                Some(g) => g,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no contraction toward the first end".into(),
                    })
                }
            };
            let h = match search_mapping_into_pl(action, &uq_x, &uq_y, depth)? {
                Some(h) => h,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no contraction toward the second end".into(),
                    })
                }
            };
            let a_word = h.concat(&g);
            let a_plus = action.apply_set(&a_word, &up_y)?;
            let y_set = match (&up_x, &uq_y) {
                (ActionSet::Pl(s1), ActionSet::Pl(s2)) => {
                    let mid = arc(&a.domain, &p, &q)?.carrier;
                    ActionSet::Pl(
                        s1.union_connected(&a.domain, &mid)
                            .union_connected(&a.domain, s2),
                    )
                }
                _ => unreachable!(),
            };
            let f = match move_off(action, &y_set, depth)? {
                Some(f) => f,
                None => {
                    return Ok(FreePairOutcome::Failure {
                        stage: "no element moving the middle off itself".into(),
                    })
                }
            };
            let b_word = f.concat(&a_word).concat(&f.inverse());
            let b_minus = action.apply_set(&f, &up_x)?;
            let b_plus = action.apply_set(&f, &a_plus)?;
            let cert = PingPongCertificate {
                a: a_word,
                b: b_word,
                a_minus: up_x,
                a_plus,
                b_minus,
                b_plus,
            };
            if !verify_pingpong(action, &cert)? {
                return Err(Error::Internal(
                    "constructed certificate failed verification".into(),
                ));
            }
            Ok(FreePairOutcome::Certified(Box::new(cert)))
        }
    }
}

fn search_mapping_into(
    action: &FGAction,
    from: &SymSet,
    into: &SymSet,
    depth: usize,
) -> Result<Option<GroupWord>> {
    let from = ActionSet::Sym(from.clone());
    let into = ActionSet::Sym(into.clone());
    for w in group_words(action.num_gens(), depth) {
        let moved = action.apply_set(&w, &from)?;
        if action.set_subset(&moved, &into)? && action.sets_disjoint(&moved, &from)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn search_mapping_into_pl(
    action: &FGAction,
    from: &ActionSet,
    into: &ActionSet,
    depth: usize,
) -> Result<Option<GroupWord>> {
    for w in group_words(action.num_gens(), depth) {
        let moved = action.apply_set(&w, from)?;
        if action.set_subset(&moved, into)? && action.sets_disjoint(&moved, from)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Exact check of the ping-pong criterion: the four sets are non-empty and
/// pairwise disjoint, `a` maps the complement of its repelling set into its
/// attracting set, and likewise for `b`.
pub fn verify_pingpong(action: &FGAction, cert: &PingPongCertificate) -> Result<bool> {
    let sets = [
        &cert.a_minus,
        &cert.a_plus,
        &cert.b_minus,
        &cert.b_plus,
    ];
    for s in &sets {
        let empty = match s {
            ActionSet::Pl(x) => x.is_empty(),
            ActionSet::Sym(x) => x.regions.is_empty(),
        };
        if empty {
            return Ok(false);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if !action.sets_disjoint(sets[i], sets[j])? {
                return Ok(false);
            }
        }
    }
    for (w, minus, plus) in [
        (&cert.a, &cert.a_minus, &cert.a_plus),
        (&cert.b, &cert.b_minus, &cert.b_plus),
    ] {
        if w.is_empty() {
            return Ok(false);
        }
        let complement = complement_closure_set(action, minus)?;
        for piece in complement {
            let moved = action.apply_set(w, &piece)?;
            if !action.set_subset(&moved, plus)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The closure of the complement of a certificate set, as a list of pieces.
fn complement_closure_set(action: &FGAction, s: &ActionSet) -> Result<Vec<ActionSet>> {
    match (action, s) {
        (FGAction::Pl(a), ActionSet::Pl(s)) => Ok(complement_closures(&a.domain, s)
            .into_iter()
            .map(ActionSet::Pl)
            .collect()),
        (FGAction::Symbolic(_), ActionSet::Sym(s)) => {
            if s.regions.len() != 1 {
                return Err(Error::invalid(
                    "certificate repelling sets must be single half-spaces",
                ));
            }
            let co = s.regions[0].complement_closure()?;
            Ok(vec![ActionSet::Sym(co)])
        }
        _ => Err(Error::DomainMismatch("certificate from the other backend".into())),
    }
}

/// Counts nonempty reduced words of bounded length in the certified pair
/// that fix the basepoint; a sound certificate yields zero.
pub fn free_pair_relations(
    action: &FGAction,
    cert: &PingPongCertificate,
    max_len: usize,
) -> Result<(usize, usize)> {
    let base = action.basepoint();
    let steps: [(GroupWord, i32); 4] = [
        (cert.a.clone(), 1),
        (cert.a.inverse(), -1),
        (cert.b.clone(), 2),
        (cert.b.inverse(), -2),
    ];
    let mut checked = 0usize;
    let mut relations = 0usize;
    // breadth-first over reduced words in the pair
    let mut frontier: Vec<(Vec<i32>, GroupWord)> = vec![(Vec::new(), GroupWord::identity())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, acc) in &frontier {
            for (step, tag) in &steps {
                if word.last() == Some(&-tag) {
                    continue;
                }
                let mut w2 = word.clone();
                w2.push(*tag);
                let acc2 = acc.concat(step);
                checked += 1;
                if action.apply(&acc2, &base)? == base {
                    relations += 1;
                }
                next.push((w2, acc2));
            }
        }
        frontier = next;
    }
    Ok((checked, relations))
}

/// One step of the measure-pushing construction.
#[derive(Clone, Debug)]
pub struct ProximalityStep {
    pub step: usize,
    pub word: GroupWord,
    /// Exact mass of the shrinking target-side neighborhood under the
    /// pushed measure.
    pub mass: Rational,
}

#[derive(Debug)]
pub struct ProximalityReport {
    pub steps: Vec<ProximalityStep>,
    pub completed: bool,
    pub failure: Option<String>,
}

/// Pushes a measure toward a target end along the constructive recipe:
/// nested regular cuts toward the target, a small side toward a sacrificial
/// end, and per step two exactly verified contractions.
pub fn proximality_push(
    action: &FGAction,
    measure: &SymMeasure,
    target: &PeriodicEnd,
    steps: usize,
    depth: usize,
) -> Result<ProximalityReport> {
    let a = match action {
        FGAction::Symbolic(a) => a,
        FGAction::Pl(_) => {
            return Err(Error::Unsupported(
                "the measure-pushing demo runs on the symbolic backend".into(),
            ))
        }
    };
    let model = a.model;
    model.check_word(&target.prefix(target.head().len() + target.period().len()))?;
    let mut report = ProximalityReport {
        steps: Vec::new(),
        completed: false,
        failure: None,
    };
    let mut prev_mass: Option<Rational> = None;
    for n in 1..=steps {
        let anchor = target.prefix(n - 1);
        let next_letter = target.letter_at(n - 1);
        // sacrificial end: branch off the ray at the anchor
        let beta = model
            .letters()
            .into_iter()
            .find(|l| {
                *l != next_letter
                    && anchor.last().map(|x| x.inverse()) != Some(*l)
            })
            .expect("rank at least 2 leaves a free direction");
        let x_cut = SymPoint::edge_midpoint(&anchor, &anchor.concat(&Word::letter(next_letter)))?;
        let u_xn_x = sym_u_side(&x_cut, &SymPoint::End(target.clone()))?;
        let u_xn_y = sym_u_side(&x_cut, &SymPoint::Vertex(anchor.clone()))?;
        // h: pull the shallow side of the target cut into the deep side;
        // independent of the sacrificial cut depth
        let h = search_push(
            action,
            &u_xn_y,
            &u_xn_x,
            &anchor.concat(&Word::letter(next_letter)),
            depth,
        )?;
        let h = match h {
            Some(h) => h,
            None => {
                report.failure = Some(format!("step {n}: no contraction toward the target"));
                return Ok(report);
            }
        };
        // the sacrificial cut starts at the per-step mass budget and is
        // deepened until the exact pushed mass does not decrease
        let budget = rat(1, n as i64).min(rat(1, 200));
        let mut start_j: Option<i64> = None;
        for j in 0..400 {
            let u = anchor.concat(&Word::letter(beta).pow(j + 1));
            let deeper = u.concat(&Word::letter(beta));
            let z = SymPoint::edge_midpoint(&u, &deeper)?;
            let side = sym_u_side(
                &z,
                &SymPoint::End(
                    PeriodicEnd::new(anchor.clone(), Word::letter(beta)).expect("valid end"),
                ),
            )?;
            if measure.mass_of_region(&model, &side) <= budget {
                start_j = Some(j);
                break;
            }
        }
        let start_j = match start_j {
            Some(j) => j,
            None => {
                report.failure = Some(format!("step {n}: no cut meets the mass budget"));
                return Ok(report);
            }
        };
        let mut accepted: Option<(GroupWord, Rational)> = None;
        let mut last_obstacle = String::new();
        for attempt in 0..60 {
            let j = start_j + attempt;
            let u = anchor.concat(&Word::letter(beta).pow(j + 1));
            let deeper = u.concat(&Word::letter(beta));
            let z = SymPoint::edge_midpoint(&u, &deeper)?;
            let u_z_y = sym_u_side(
                &z,
                &SymPoint::End(
                    PeriodicEnd::new(anchor.clone(), Word::letter(beta)).expect("valid end"),
                ),
            )?;
            let u_z_x = sym_u_side(&z, &SymPoint::End(target.clone()))?;
            // g: push the big target side into the sacrificial side
            let g = match search_push(action, &u_z_x, &u_z_y, &deeper, depth)? {
                Some(g) => g,
                None => {
                    last_obstacle = format!("step {n}: no contraction into the side");
                    break;
                }
            };
            let w = h.concat(&g);
            let word = action.eval_sym(&w)?;
            let pushed = measure.pushforward(&word);
            let mass = pushed.mass_of_region(&model, &u_xn_x);
            if prev_mass.as_ref().is_none_or(|p| mass >= *p) {
                accepted = Some((w, mass));
                break;
            }
            last_obstacle = format!("step {n}: mass regressed at every tried cut depth");
        }
        match accepted {
            Some((w, mass)) => {
                report.steps.push(ProximalityStep {
                    step: n,
                    word: w,
                    mass: mass.clone(),
                });
                prev_mass = Some(mass);
            }
            None => {
                report.failure = Some(last_obstacle);
                return Ok(report);
            }
        }
    }
    report.completed = true;
    Ok(report)
}

/// Searches for a word mapping `from` strictly into `into`: first a short
/// breadth-first pass, then, when the generators are single letters,
/// deterministic conjugate candidates `u l u^{-1}` built from the cut word.
fn search_push(
    action: &FGAction,
    from: &SymRegion,
    into: &SymRegion,
    cut_word: &Word,
    depth: usize,
) -> Result<Option<GroupWord>> {
    let a = match action {
        FGAction::Symbolic(a) => a,
        _ => unreachable!("symbolic-only search"),
    };
    let from_set = ActionSet::Sym(SymSet::one(from.clone()));
    let into_set = ActionSet::Sym(SymSet::one(into.clone()));
    let bfs_cap = depth.min(8);
    for w in group_words(action.num_gens(), bfs_cap) {
        let moved = action.apply_set(&w, &from_set)?;
        if action.set_subset(&moved, &into_set)? {
            return Ok(Some(w));
        }
    }
    if let Some(express) = letter_table(a) {
        for l in a.model.letters() {
            let candidate = cut_word
                .concat(&Word::letter(l))
                .concat(&cut_word.inverse());
            if candidate.len() > depth {
                continue;
            }
            if let Some(gw) = express_word(&candidate, &express) {
                let moved = action.apply_set(&gw, &from_set)?;
                if action.set_subset(&moved, &into_set)? {
                    return Ok(Some(gw));
                }
            }
        }
    }
    Ok(None)
}

/// When every generator is a single distinct letter, maps letters to signed
/// generator indices.
fn letter_table(a: &SymAction) -> Option<BTreeMap<Letter, i32>> {
    let mut table: BTreeMap<Letter, i32> = BTreeMap::new();
    for (i, (_, w)) in a.gens.iter().enumerate() {
        if w.len() != 1 {
            return None;
        }
        let l = w.letters()[0];
        table.insert(l, (i + 1) as i32);
        table.insert(l.inverse(), -((i + 1) as i32));
    }
    Some(table)
}

fn express_word(w: &Word, table: &BTreeMap<Letter, i32>) -> Option<GroupWord> {
    let mut out = GroupWord::identity();
    for l in w.letters() {
        let idx = table.get(l)?;
        out = out.concat(&GroupWord(vec![*idx]));
    }
    Some(out)
}

/// Per-seed orbit hulls and a pairwise agreement verdict.
#[derive(Debug)]
pub struct MinimalEstimate {
    pub per_seed: Vec<(ActionPoint, ActionSet)>,
    /// Whether all seed estimates pairwise intersect.
    pub all_agree: bool,
}

pub fn minimal_subdendrite_estimate(
    action: &FGAction,
    seeds: &[ActionPoint],
    depth: usize,
) -> Result<MinimalEstimate> {
    let mut per_seed: Vec<(ActionPoint, ActionSet)> = Vec::new();
    for seed in seeds {
        let mut orbit: Vec<ActionPoint> = vec![seed.clone()];
        for w in group_words(action.num_gens(), depth) {
            let img = action.apply(&w, seed)?;
            if !orbit.contains(&img) {
                orbit.push(img);
            }
        }
        let set = match action {
            FGAction::Pl(a) => {
                let pts: Vec<Point> = orbit
                    .iter()
                    .map(|p| match p {
                        ActionPoint::Pl(p) => p.clone(),
                        _ => unreachable!("backend-matched seeds"),
                    })
                    .collect();
                ActionSet::Pl(hull(&a.domain, &pts)?)
            }
            FGAction::Symbolic(_) => {
                let pts: Vec<SymPoint> = orbit
                    .iter()
                    .map(|p| match p {
                        ActionPoint::Sym(p) => p.clone(),
                        _ => unreachable!("backend-matched seeds"),
                    })
                    .collect();
                let mut regions = Vec::new();
                if pts.len() == 1 {
                    regions.push(SymRegion::One(pts[0].clone()));
                } else {
                    for q in &pts[1..] {
                        regions.push(SymRegion::Seg(pts[0].clone(), q.clone()));
                    }
                }
                ActionSet::Sym(SymSet { regions })
            }
        };
        per_seed.push((seed.clone(), set));
    }
    let mut all_agree = true;
    for i in 0..per_seed.len() {
        for j in (i + 1)..per_seed.len() {
            if action.sets_disjoint(&per_seed[i].1, &per_seed[j].1)? {
                all_agree = false;
            }
        }
    }
    Ok(MinimalEstimate { per_seed, all_agree })
}
