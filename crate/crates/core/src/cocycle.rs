//! The direction bundle over branch points and the bounded two-cocycle.
//!
//! For points `p, q` the function `alpha(p, q)` assigns, to every branch
//! point `x` with direction pair `(c, c')`, the value +1 when `p` lies in
//! `c` and `q` in `c'` (distinct), -1 with the roles swapped, 0 otherwise.
//! The cocycle `omega(p, q, r)` is its homogeneous coboundary
//! `alpha(p,q) + alpha(q,r) + alpha(r,p)`; it vanishes away from the median
//! of the triple and carries exactly six nonzero entries when the triple
//! spans a tripod, two when it lies on an arc with pairwise distinct
//! points, and none otherwise.

use std::collections::BTreeMap;

use crate::subdendrite::median;
use crate::tree::{Dendrite, EdgeId, Point, VertexId};
use crate::{rat_one, rat_zero, Error, Rational, Result};

/// A direction at a vertex: the incident edge and its far endpoint.
pub type Germ = (EdgeId, VertexId);

/// An ordered pair of distinct directions at a branch point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct BranchDirectionPair {
    pub base: VertexId,
    pub first: Germ,
    pub second: Germ,
}

/// Sparse rational-valued function on ordered direction pairs over branch
/// points, alternating in the pair. Only germ-ordered entries are stored;
/// the swapped entry is reconstructed by sign.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CocycleValue {
    entries: BTreeMap<(VertexId, Germ, Germ), Rational>,
}

impl CocycleValue {
    pub fn zero() -> Self {
        CocycleValue::default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `val` at the ordered pair, respecting the alternation.
    pub fn add(&mut self, base: VertexId, first: Germ, second: Germ, val: Rational) {
        debug_assert_ne!(first, second, "direction pairs are distinct");
        if val == rat_zero() {
            return;
        }
        let (key, signed) = if first < second {
            ((base, first, second), val)
        } else {
            ((base, second, first), -val)
        };
        let entry = self.entries.entry(key).or_insert_with(rat_zero);
        *entry += signed;
        if *entry == rat_zero() {
            self.entries.remove(&key);
        }
    }

    /// Value at an ordered direction pair.
    pub fn get(&self, base: VertexId, first: Germ, second: Germ) -> Rational {
        if first < second {
            self.entries
                .get(&(base, first, second))
                .cloned()
                .unwrap_or_else(rat_zero)
        } else {
            -self
                .entries
                .get(&(base, second, first))
                .cloned()
                .unwrap_or_else(rat_zero)
        }
    }

    /// Germ-ordered stored entries.
    pub fn stored_entries(&self) -> impl Iterator<Item = (&(VertexId, Germ, Germ), &Rational)> {
        self.entries.iter()
    }

    /// Full support over ordered pairs, both orientations.
    pub fn support(&self) -> Vec<(BranchDirectionPair, Rational)> {
        let mut out = Vec::new();
        for ((base, g1, g2), v) in &self.entries {
            out.push((
                BranchDirectionPair {
                    base: *base,
                    first: *g1,
                    second: *g2,
                },
                v.clone(),
            ));
            out.push((
                BranchDirectionPair {
                    base: *base,
                    first: *g2,
                    second: *g1,
                },
                -v.clone(),
            ));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn support_size(&self) -> usize {
        2 * self.entries.len()
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((base, g1, g2), v) in &other.entries {
            out.add(*base, *g1, *g2, v.clone());
        }
        out
    }

    pub fn negate(&self) -> Self {
        CocycleValue {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, -v.clone()))
                .collect(),
        }
    }

    /// Transport along a homeomorphism of the underlying tree.
    pub fn transport(&self, g: &crate::dynamics::PLHomeo) -> Self {
        let mut out = CocycleValue::zero();
        for ((base, g1, g2), v) in &self.entries {
            out.add(
                g.vertex_image(*base),
                g.apply_germ(*g1),
                g.apply_germ(*g2),
                v.clone(),
            );
        }
        out
    }
}

fn germ_at(d: &Dendrite, x: VertexId, p: &Point) -> Result<Option<Germ>> {
    d.direction_from(x, p)
}

/// The alternating one-variable-pair function on the direction bundle,
/// materialized over every branch point.
pub fn alpha(d: &Dendrite, p: &Point, q: &Point) -> Result<CocycleValue> {
    let mut out = CocycleValue::zero();
    for b in d.branch_points() {
        let x = match b {
            Point::Vertex(v) => v,
            Point::Interior(..) => unreachable!("branch points are vertices"),
        };
        let (gp, gq) = (germ_at(d, x, p)?, germ_at(d, x, q)?);
        if let (Some(gp), Some(gq)) = (gp, gq) {
            if gp != gq {
                out.add(x, gp, gq, rat_one());
            }
        }
    }
    Ok(out)
}

/// The coboundary `alpha(p,q) + alpha(q,r) + alpha(r,p)`, evaluated directly
/// at the median of the triple (where all of its support lives).
pub fn omega(d: &Dendrite, p: &Point, q: &Point, r: &Point) -> Result<CocycleValue> {
    let mut out = CocycleValue::zero();
    let m = median(d, p, q, r)?;
    let x = match m {
        Point::Vertex(v) if d.degree(v) >= 3 => v,
        _ => return Ok(out),
    };
    for (a, b) in [(p, q), (q, r), (r, p)] {
        let (ga, gb) = (germ_at(d, x, a)?, germ_at(d, x, b)?);
        if let (Some(ga), Some(gb)) = (ga, gb) {
            if ga != gb {
                out.add(x, ga, gb, rat_one());
            }
        }
    }
    Ok(out)
}

/// The coboundary route: `alpha(p,q) + alpha(q,r) + alpha(r,p)` summed over
/// the whole bundle. Used as the independent check of [`omega`].
pub fn omega_by_coboundary(d: &Dendrite, p: &Point, q: &Point, r: &Point) -> Result<CocycleValue> {
    Ok(alpha(d, p, q)?.sum(&alpha(d, q, r)?).sum(&alpha(d, r, p)?))
}

/// Entries of the coboundary at the median over the full bundle, including
/// regular median points. The base point is returned alongside the germ
/// pair; entries at the swapped pair are implied by alternation.
pub fn omega_full_bundle(
    d: &Dendrite,
    p: &Point,
    q: &Point,
    r: &Point,
) -> Result<Vec<(Point, Germ, Germ, Rational)>> {
    let m = median(d, p, q, r)?;
    // germ of a point seen from the median, vertex or interior base alike
    let germ_from_median = |target: &Point| -> Result<Option<Germ>> {
        if target == &m {
            return Ok(None);
        }
        match &m {
            Point::Vertex(v) => germ_at(d, *v, target),
            Point::Interior(e, t) => {
                let (u, v) = d.edge(*e).unwrap().ends;
                // decide the side of the cut the target lies on
                let side_u = match target {
                    Point::Interior(f, s) if f == e => s < t,
                    Point::Vertex(w) if *w == u => true,
                    Point::Vertex(w) if *w == v => false,
                    other => {
                        let anchor = match other {
                            Point::Vertex(w) => *w,
                            Point::Interior(f, _) => d.edge(*f).unwrap().ends.0,
                        };
                        !d.vertex_path(u, anchor).contains(&v)
                    }
                };
                Ok(Some(if side_u { (*e, u) } else { (*e, v) }))
            }
        }
    };
    let mut acc: BTreeMap<(Germ, Germ), Rational> = BTreeMap::new();
    for (a, b) in [(p, q), (q, r), (r, p)] {
        let (ga, gb) = (germ_from_median(a)?, germ_from_median(b)?);
        if let (Some(ga), Some(gb)) = (ga, gb) {
            if ga == gb {
                continue;
            }
            let (key, val) = if ga < gb {
                ((ga, gb), rat_one())
            } else {
                ((gb, ga), -rat_one())
            };
            let entry = acc.entry(key).or_insert_with(rat_zero);
            *entry += val;
            if *entry == rat_zero() {
                acc.remove(&key);
            }
        }
    }
    let mut out = Vec::new();
    for ((g1, g2), v) in acc {
        out.push((m.clone(), g1, g2, v.clone()));
        out.push((m.clone(), g2, g1, -v));
    }
    Ok(out)
}

/// Verifies the homogeneous cocycle identity
/// `omega(q,r,s) - omega(p,r,s) + omega(p,q,s) - omega(p,q,r) = 0` entrywise.
pub fn cocycle_identity_check(
    d: &Dendrite,
    p: &Point,
    q: &Point,
    r: &Point,
    s: &Point,
) -> Result<bool> {
    let total = omega(d, q, r, s)?
        .sum(&omega(d, p, r, s)?.negate())
        .sum(&omega(d, p, q, s)?)
        .sum(&omega(d, p, q, r)?.negate());
    Ok(total.is_zero())
}

/// True iff the coboundary of the triple is nonzero over the full bundle,
/// which happens exactly when the three points are pairwise distinct.
pub fn nonvanishing_check(d: &Dendrite, p: &Point, q: &Point, r: &Point) -> Result<bool> {
    Ok(!omega_full_bundle(d, p, q, r)?.is_empty())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LpExponent {
    Finite(Rational),
    Infinity,
}

/// An exactly represented p-norm: either a rational value, or the p-th root
/// of an exactly computed rational power sum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LpNorm {
    Exact(Rational),
    Root { power_sum: Rational, degree: Rational },
}

impl LpNorm {
    pub fn approx(&self) -> f64 {
        match self {
            LpNorm::Exact(v) => rational_to_f64(v),
            LpNorm::Root { power_sum, degree } => {
                rational_to_f64(power_sum).powf(1.0 / rational_to_f64(degree))
            }
        }
    }
}

fn rational_to_f64(v: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

fn is_integer(v: &Rational) -> bool {
    use num_traits::One;
    v.denom().is_one()
}

/// The p-norm of a sparse cocycle value over its full support. Exact for
/// p in {1, infinity}; for other exponents the rational power sum is
/// returned with the norm as its p-th root. Non-integer exponents require
/// entries in {-1, 0, 1} (which covers every coboundary of a triple).
pub fn lp_norm(v: &CocycleValue, p: &LpExponent) -> Result<LpNorm> {
    let abs = |x: &Rational| if *x < rat_zero() { -x.clone() } else { x.clone() };
    match p {
        LpExponent::Infinity => Ok(LpNorm::Exact(
            v.stored_entries()
                .map(|(_, val)| abs(val))
                .max()
                .unwrap_or_else(rat_zero),
        )),
        LpExponent::Finite(p) => {
            if *p < rat_one() {
                return Err(Error::invalid(format!("exponent {p} is below 1")));
            }
            if v.is_zero() {
                return Ok(LpNorm::Exact(rat_zero()));
            }
            if *p == rat_one() {
                let sum: Rational = v.support().iter().map(|(_, val)| abs(val)).sum();
                return Ok(LpNorm::Exact(sum));
            }
            if is_integer(p) {
                use num_traits::ToPrimitive;
                let k = p.numer().to_u32().ok_or_else(|| {
                    Error::invalid("integer exponent too large".to_string())
                })?;
                let mut sum = rat_zero();
                for (_, val) in v.support() {
                    let a = abs(&val);
                    let mut pow = rat_one();
                    for _ in 0..k {
                        pow *= &a;
                    }
                    sum += pow;
                }
                return Ok(LpNorm::Root {
                    power_sum: sum,
                    degree: p.clone(),
                });
            }
            let unit = v
                .stored_entries()
                .all(|(_, val)| abs(val) == rat_one());
            if !unit {
                return Err(Error::Unsupported(
                    "non-integer exponents need entries in {-1, 0, 1}".into(),
                ));
            }
            Ok(LpNorm::Root {
                power_sum: Rational::from_integer(num_bigint::BigInt::from(
                    v.support_size() as u64,
                )),
                degree: p.clone(),
            })
        }
    }
}
