//! The symbolic dendrite: the end compactification of the Cayley tree of a
//! free group, with exact arithmetic on points, half-space regions and
//! measures.
//!
//! Points are reduced words (vertices), edge points with a rational
//! parameter, and eventually periodic ends. Left multiplication acts
//! exactly on all of them. Closed subsets are finite unions of three kinds
//! of regions: a co-side (the complement of one open component of a
//! point's complement, together with the point), an arc between two
//! points, and a single point. Cylinders over a reduced prefix are the
//! co-sides based at the prefix vertex excluding the parent direction.

use std::collections::BTreeMap;

use crate::words::{Letter, PeriodicEnd, Word};
use crate::{rat, rat_one, rat_zero, Error, Rational, Result};

/// The ambient model: a free group of the given rank acting on its tree.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FreeModel {
    pub rank: u8,
}

impl FreeModel {
    pub fn new(rank: u8) -> Result<Self> {
        if rank < 2 {
            return Err(Error::invalid("the symbolic model needs rank at least 2"));
        }
        Ok(FreeModel { rank })
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for g in 0..self.rank {
            out.push(Letter::new(g, false));
            out.push(Letter::new(g, true));
        }
        out.sort();
        out
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        for l in w.letters() {
            if l.gen >= self.rank {
                return Err(Error::invalid(format!("letter {l} outside rank {}", self.rank)));
            }
        }
        Ok(())
    }
}

/// A point of the compactified tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SymPoint {
    Vertex(Word),
    /// Interior point of the edge from `base` to `base . letter`, where the
    /// extension is reduced (the base is the endpoint nearer the root).
    EdgePoint { base: Word, letter: Letter, t: Rational },
    End(PeriodicEnd),
}

impl std::fmt::Display for SymPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymPoint::Vertex(w) => write!(f, "{w}"),
            SymPoint::EdgePoint { base, letter, t } => write!(f, "{base}-{letter}@{t}"),
            SymPoint::End(e) => write!(f, "{e}"),
        }
    }
}

impl SymPoint {
    /// Canonical edge point; boundary parameters become vertices.
    pub fn on_edge(base: Word, letter: Letter, t: Rational) -> Result<SymPoint> {
        if base.last() == Some(letter.inverse()) {
            return Err(Error::invalid("edge letter must extend the base reducedly"));
        }
        if t < rat_zero() || t > rat_one() {
            return Err(Error::invalid(format!("parameter {t} outside [0,1]")));
        }
        Ok(if t == rat_zero() {
            SymPoint::Vertex(base)
        } else if t == rat_one() {
            SymPoint::Vertex(base.concat(&Word::letter(letter)))
        } else {
            SymPoint::EdgePoint { base, letter, t }
        })
    }

    /// Midpoint of the edge between two adjacent vertices.
    pub fn edge_midpoint(u: &Word, v: &Word) -> Result<SymPoint> {
        let (base, far) = if u.len() < v.len() { (u, v) } else { (v, u) };
        let diff = base.inverse().concat(far);
        if diff.len() != 1 {
            return Err(Error::invalid("vertices are not adjacent"));
        }
        SymPoint::on_edge(base.clone(), diff.letters()[0], rat(1, 2))
    }

    /// Left translation by a group element.
    pub fn translate(&self, g: &Word) -> SymPoint {
        match self {
            SymPoint::Vertex(w) => SymPoint::Vertex(g.concat(w)),
            SymPoint::EdgePoint { base, letter, t } => {
                let u = g.concat(base);
                let v = u.concat(&Word::letter(*letter));
                if u.len() < v.len() {
                    SymPoint::EdgePoint { base: u, letter: *letter, t: t.clone() }
                } else {
                    SymPoint::EdgePoint {
                        base: v,
                        letter: letter.inverse(),
                        t: rat_one() - t,
                    }
                }
            }
            SymPoint::End(e) => SymPoint::End(e.translate(g)),
        }
    }

    /// Depth from the root, ordered lexicographically as (integer part,
    /// fractional part); ends are deepest.
    fn depth_key(&self) -> (usize, Rational) {
        match self {
            SymPoint::Vertex(w) => (w.len(), rat_zero()),
            SymPoint::EdgePoint { base, t, .. } => (base.len(), t.clone()),
            SymPoint::End(_) => (usize::MAX, rat_zero()),
        }
    }

    /// The letter of the root path at position `i`, if the point reaches
    /// that deep (the partial edge letter counts as its position).
    fn stream(&self, i: usize) -> Option<Letter> {
        match self {
            SymPoint::Vertex(w) => w.letters().get(i).copied(),
            SymPoint::EdgePoint { base, letter, .. } => {
                if i < base.len() {
                    Some(base.letters()[i])
                } else if i == base.len() {
                    Some(*letter)
                } else {
                    None
                }
            }
            SymPoint::End(e) => Some(e.letter_at(i)),
        }
    }

    fn stream_len(&self) -> Option<usize> {
        match self {
            SymPoint::Vertex(w) => Some(w.len()),
            SymPoint::EdgePoint { base, .. } => Some(base.len() + 1),
            SymPoint::End(_) => None,
        }
    }

    /// Resolves an end into a vertex deep enough for meets against points
    /// of bounded depth.
    fn materialize(&self, depth: usize) -> SymPoint {
        match self {
            SymPoint::End(e) => SymPoint::Vertex(e.prefix(depth)),
            other => other.clone(),
        }
    }
}

/// The deepest common point of the root paths to `a` and `b`.
pub fn meet(a: &SymPoint, b: &SymPoint) -> SymPoint {
    if a == b {
        return a.clone();
    }
    // ends reduce to deep enough vertices
    if let (SymPoint::End(ea), SymPoint::End(eb)) = (a, b) {
        let bound = ea.head().len()
            + eb.head().len()
            + ea.period().len() * eb.period().len()
            + 2;
        let mut i = 0;
        while i < bound && ea.letter_at(i) == eb.letter_at(i) {
            i += 1;
        }
        return SymPoint::Vertex(ea.prefix(i));
    }
    if matches!(a, SymPoint::End(_)) {
        let d = b.stream_len().unwrap() + 2;
        return meet(&a.materialize(d), b);
    }
    if matches!(b, SymPoint::End(_)) {
        let d = a.stream_len().unwrap() + 2;
        return meet(a, &b.materialize(d));
    }
    // both finite: same-edge case first
    if let (
        SymPoint::EdgePoint { base: b1, letter: s1, t: t1 },
        SymPoint::EdgePoint { base: b2, letter: s2, t: t2 },
    ) = (a, b)
    {
        if b1 == b2 && s1 == s2 {
            let t = t1.clone().min(t2.clone());
            return SymPoint::EdgePoint { base: b1.clone(), letter: *s1, t };
        }
    }
    let la = a.stream_len().unwrap();
    let lb = b.stream_len().unwrap();
    let mut i = 0;
    while i < la && i < lb && a.stream(i) == b.stream(i) {
        i += 1;
    }
    if i == la && i == lb {
        // identical letter paths: the one with the partial last letter is
        // the shallower point and hence the meet
        return if a.depth_key() <= b.depth_key() {
            a.clone()
        } else {
            b.clone()
        };
    }
    // one path exhausted inside the other: the shallower point is the meet
    if i == la {
        return a.clone();
    }
    if i == lb {
        return b.clone();
    }
    // genuine divergence at slot i: the meet is the vertex of the common
    // prefix (a partial edge letter that diverges contributes nothing)
    let prefix = Word::new((0..i).map(|j| a.stream(j).unwrap()));
    SymPoint::Vertex(prefix)
}

/// The median of three points: the deepest of the pairwise meets.
pub fn median(a: &SymPoint, b: &SymPoint, c: &SymPoint) -> SymPoint {
    let m1 = meet(a, b);
    let m2 = meet(b, c);
    let m3 = meet(a, c);
    let mut best = m1;
    for m in [m2, m3] {
        if m.depth_key() > best.depth_key() {
            best = m;
        }
    }
    best
}

/// Whether `q` lies on the arc between `a` and `b`.
pub fn on_arc(q: &SymPoint, a: &SymPoint, b: &SymPoint) -> bool {
    median(a, q, b) == *q
}

/// A direction at a point of the symbolic tree.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SymGerm {
    /// At a vertex: the letter of the outgoing edge.
    AtVertex(Letter),
    /// At an edge point: toward the deep endpoint (true) or the base (false).
    AtEdge(bool),
}

impl std::fmt::Display for SymGerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymGerm::AtVertex(l) => write!(f, "{l}"),
            SymGerm::AtEdge(true) => write!(f, ">"),
            SymGerm::AtEdge(false) => write!(f, "<"),
        }
    }
}

/// The direction at `p` pointing toward `q`; `q` must differ from `p`.
pub fn germ_toward(p: &SymPoint, q: &SymPoint) -> Result<SymGerm> {
    if p == q {
        return Err(Error::invalid("no direction toward the base point"));
    }
    match p {
        SymPoint::Vertex(w) => {
            let m = meet(p, q);
            if m == *p {
                // q hangs below w: the next letter of q's root path
                let l = q
                    .stream(w.len())
                    .expect("a deeper point continues the path");
                Ok(SymGerm::AtVertex(l))
            } else {
                // q is reached through the parent of w
                let last = w
                    .last()
                    .ok_or_else(|| Error::Internal("the root has every point below it".into()))?;
                Ok(SymGerm::AtVertex(last.inverse()))
            }
        }
        SymPoint::EdgePoint { base, letter, t } => {
            // deep side iff q sits deeper on the same edge, or its root path
            // runs through the base and continues with the edge letter
            if let SymPoint::EdgePoint { base: b2, letter: s2, t: t2 } = q {
                if b2 == base && s2 == letter {
                    return Ok(SymGerm::AtEdge(t2 > t));
                }
            }
            let base_v = SymPoint::Vertex(base.clone());
            let deep = meet(q, &base_v) == base_v && q.stream(base.len()) == Some(*letter);
            Ok(SymGerm::AtEdge(deep))
        }
        SymPoint::End(_) => Err(Error::invalid("ends have a single direction")),
    }
}

/// One closed region of the symbolic dendrite.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SymRegion {
    /// Everything except the open component of the complement of `base` in
    /// the direction `excluded`; contains `base`.
    CoSide { base: SymPoint, excluded: SymGerm },
    /// The arc between two points.
    Seg(SymPoint, SymPoint),
    One(SymPoint),
}

impl std::fmt::Display for SymRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymRegion::CoSide { base, excluded } => write!(f, "coside({base};!{excluded})"),
            SymRegion::Seg(a, b) => write!(f, "arc({a},{b})"),
            SymRegion::One(p) => write!(f, "point({p})"),
        }
    }
}

impl SymRegion {
    /// The co-side at `s` whose retained directions are those of `t`:
    /// the closure of the component of the complement of `s` containing `t`
    /// is the co-side excluding every other germ only when `s` has exactly
    /// two directions; in general this is the set of points not separated
    /// from `t` by `s`, which is what u-side means on an edge point. For a
    /// vertex base the honest u-side is not a single co-side; see
    /// [`u_side`].
    pub fn coside(base: SymPoint, excluded: SymGerm) -> SymRegion {
        SymRegion::CoSide { base, excluded }
    }

    pub fn contains(&self, q: &SymPoint) -> bool {
        match self {
            SymRegion::CoSide { base, excluded } => {
                q == base || germ_toward(base, q).map(|g| g != *excluded).unwrap_or(false)
            }
            SymRegion::Seg(a, b) => on_arc(q, a, b),
            SymRegion::One(p) => q == p,
        }
    }

    pub fn translate(&self, g: &Word) -> SymRegion {
        match self {
            SymRegion::CoSide { base, excluded } => {
                let new_base = base.translate(g);
                let excluded = match (base, excluded) {
                    (SymPoint::Vertex(_), SymGerm::AtVertex(l)) => SymGerm::AtVertex(*l),
                    (SymPoint::EdgePoint { base: b, letter, .. }, SymGerm::AtEdge(deep)) => {
                        // the canonical base may flip under translation
                        let u = g.concat(b);
                        let v = u.concat(&Word::letter(*letter));
                        if u.len() < v.len() {
                            SymGerm::AtEdge(*deep)
                        } else {
                            SymGerm::AtEdge(!*deep)
                        }
                    }
                    _ => unreachable!("germ kind matches base kind"),
                };
                SymRegion::CoSide { base: new_base, excluded }
            }
            SymRegion::Seg(a, b) => SymRegion::Seg(a.translate(g), b.translate(g)),
            SymRegion::One(p) => SymRegion::One(p.translate(g)),
        }
    }

    /// Exact emptiness of the pairwise intersection.
    pub fn disjoint(&self, other: &SymRegion) -> bool {
        use SymRegion::*;
        match (self, other) {
            (CoSide { base: p1, .. }, CoSide { base: p2, .. }) => {
                !self.contains(p2) && !other.contains(p1)
            }
            (CoSide { .. }, Seg(a, b)) => !self.contains(a) && !self.contains(b),
            (Seg(a, b), CoSide { .. }) => !other.contains(a) && !other.contains(b),
            (Seg(a, b), Seg(c, d)) => {
                let proj = median(a, b, c);
                !on_arc(&proj, c, d)
            }
            (One(p), r) => !r.contains(p),
            (r, One(p)) => !r.contains(p),
        }
    }

    /// Exact containment between single regions.
    pub fn subset_of(&self, other: &SymRegion) -> bool {
        use SymRegion::*;
        match (self, other) {
            (One(p), r) => r.contains(p),
            (Seg(a, b), r @ CoSide { .. }) => r.contains(a) && r.contains(b),
            (Seg(a, b), r @ Seg(..)) => r.contains(a) && r.contains(b),
            (Seg(a, b), One(p)) => a == b && a == p,
            (CoSide { base: p1, excluded: e1 }, CoSide { base: p2, excluded: e2 }) => {
                if p1 == p2 {
                    e1 == e2
                } else {
                    other.contains(p1) && !self.contains(p2)
                }
            }
            (CoSide { .. }, _) => false,
        }
    }

    /// Closure of the excluded component: the complementary side.
    pub fn complement_closure(&self) -> Result<SymSet> {
        match self {
            SymRegion::CoSide { base, excluded } => {
                let (adjacent, back) = match (base, excluded) {
                    (SymPoint::Vertex(w), SymGerm::AtVertex(l)) => {
                        let v = w.concat(&Word::letter(*l));
                        let back_germ = germ_toward(&SymPoint::Vertex(v.clone()), base)?;
                        (SymPoint::Vertex(v), back_germ)
                    }
                    (SymPoint::EdgePoint { base: b, letter, .. }, SymGerm::AtEdge(deep)) => {
                        let v = if *deep {
                            b.concat(&Word::letter(*letter))
                        } else {
                            b.clone()
                        };
                        let vp = SymPoint::Vertex(v);
                        let back_germ = germ_toward(&vp, base)?;
                        (vp, back_germ)
                    }
                    _ => unreachable!("germ kind matches base kind"),
                };
                Ok(SymSet {
                    regions: vec![
                        SymRegion::Seg(base.clone(), adjacent.clone()),
                        SymRegion::CoSide { base: adjacent, excluded: back },
                    ],
                })
            }
            _ => Err(Error::invalid("complement closure applies to co-sides")),
        }
    }
}

/// The closure of the component of the complement of an edge point `s`
/// containing `t`, as a single region.
pub fn u_side(s: &SymPoint, t: &SymPoint) -> Result<SymRegion> {
    match s {
        SymPoint::EdgePoint { .. } => {
            let toward = germ_toward(s, t)?;
            let excluded = match toward {
                SymGerm::AtEdge(d) => SymGerm::AtEdge(!d),
                _ => unreachable!("edge points carry edge germs"),
            };
            Ok(SymRegion::CoSide { base: s.clone(), excluded })
        }
        _ => Err(Error::invalid(
            "u-side as a single region needs a regular (edge) point",
        )),
    }
}

/// A finite union of regions.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SymSet {
    pub regions: Vec<SymRegion>,
}

impl std::fmt::Display for SymSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.regions.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl SymSet {
    pub fn one(r: SymRegion) -> Self {
        SymSet { regions: vec![r] }
    }

    pub fn union(mut self, other: SymSet) -> Self {
        self.regions.extend(other.regions);
        self
    }

    pub fn contains(&self, q: &SymPoint) -> bool {
        self.regions.iter().any(|r| r.contains(q))
    }

    pub fn translate(&self, g: &Word) -> SymSet {
        SymSet {
            regions: self.regions.iter().map(|r| r.translate(g)).collect(),
        }
    }

    pub fn disjoint_from(&self, other: &SymSet) -> bool {
        self.regions
            .iter()
            .all(|r| other.regions.iter().all(|s| r.disjoint(s)))
    }

    /// Region-wise containment: every region of `self` fits inside a single
    /// region of `other`. Sufficient for containment, not necessary; all
    /// certification paths only accept, never reject, on this test.
    pub fn subset_of(&self, other: &SymSet) -> bool {
        self.regions
            .iter()
            .all(|r| other.regions.iter().any(|s| r.subset_of(s)))
    }
}

/// Exact measures on the symbolic dendrite.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SymMeasure {
    /// Finitely many vertex atoms with total mass one.
    VertexAtoms(BTreeMap<Word, Rational>),
    /// The self-similar measure on ends giving every cylinder over a
    /// reduced word of length k the mass (1/2m) (1/(2m-1))^{k-1}.
    CylinderUniform,
    /// A pushforward of a base measure by a group element.
    Translated { word: Word, base: Box<SymMeasure> },
}

impl SymMeasure {
    pub fn dirac_vertex(w: Word) -> SymMeasure {
        SymMeasure::VertexAtoms(BTreeMap::from([(w, rat_one())]))
    }

    pub fn atoms(atoms: impl IntoIterator<Item = (Word, Rational)>) -> Result<SymMeasure> {
        let map: BTreeMap<Word, Rational> = atoms.into_iter().collect();
        let total: Rational = map.values().cloned().sum();
        if total != rat_one() {
            return Err(Error::invalid(format!("total mass is {total}, not 1")));
        }
        if map.values().any(|m| *m <= rat_zero()) {
            return Err(Error::invalid("atom masses must be positive"));
        }
        Ok(SymMeasure::VertexAtoms(map))
    }

    pub fn pushforward(&self, g: &Word) -> SymMeasure {
        match self {
            SymMeasure::VertexAtoms(map) => SymMeasure::VertexAtoms(
                map.iter().map(|(w, m)| (g.concat(w), m.clone())).collect(),
            ),
            other => SymMeasure::Translated {
                word: g.clone(),
                base: Box::new(other.clone()),
            },
        }
    }

    /// Mass of the ends passing through the open component at `base` in the
    /// germ direction, under the cylinder-uniform measure.
    fn cylinder_component_mass(model: &FreeModel, base: &SymPoint, germ: &SymGerm) -> Rational {
        let m2 = rat(2 * model.rank as i64, 1);
        let q = rat(2 * model.rank as i64 - 1, 1);
        let cyl = |k: usize| -> Rational {
            // (1/2m) (1/(2m-1))^{k-1}
            let mut out = rat_one() / m2.clone();
            for _ in 1..k {
                out /= q.clone();
            }
            out
        };
        match (base, germ) {
            (SymPoint::Vertex(w), SymGerm::AtVertex(l)) => {
                let child = w.concat(&Word::letter(*l));
                if child.len() > w.len() {
                    cyl(child.len())
                } else {
                    rat_one() - cyl(w.len())
                }
            }
            (SymPoint::EdgePoint { base, .. }, SymGerm::AtEdge(deep)) => {
                let deep_mass = cyl(base.len() + 1);
                if *deep {
                    deep_mass
                } else {
                    rat_one() - deep_mass
                }
            }
            _ => unreachable!("germ kind matches base kind"),
        }
    }

    /// Exact mass of a single region.
    pub fn mass_of_region(&self, model: &FreeModel, r: &SymRegion) -> Rational {
        match self {
            SymMeasure::VertexAtoms(map) => map
                .iter()
                .filter(|(w, _)| r.contains(&SymPoint::Vertex((*w).clone())))
                .map(|(_, m)| m.clone())
                .sum(),
            SymMeasure::CylinderUniform => match r {
                SymRegion::CoSide { base, excluded } => {
                    rat_one() - Self::cylinder_component_mass(model, base, excluded)
                }
                SymRegion::Seg(..) | SymRegion::One(_) => rat_zero(),
            },
            SymMeasure::Translated { word, base } => {
                base.mass_of_region(model, &r.translate(&word.inverse()))
            }
        }
    }
}
