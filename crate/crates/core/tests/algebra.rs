//! Generative tests of the algebraic layers: free-group words, periodic
//! ends, piecewise-linear bijections, and the rational text round-trip.

use proptest::prelude::*;

use dendrite_core::dynamics::PLBijection;
use dendrite_core::format::{parse_rational, rational_str};
use dendrite_core::words::{axis_ends, Letter, PeriodicEnd, Word};
use dendrite_core::{rat, rat_one, rat_zero, Rational};

fn letter_strategy() -> impl Strategy<Value = Letter> {
    (0u8..3, any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv))
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter_strategy(), 0..max_len).prop_map(Word::new)
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn words_reduce_and_invert(u in word_strategy(12), v in word_strategy(12)) {
        let w = u.concat(&v);
        // no adjacent inverse pairs survive
        prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
        prop_assert_eq!(u.concat(&u.inverse()), Word::identity());
        prop_assert_eq!(w.inverse(), v.inverse().concat(&u.inverse()));
        // the word metric is a metric on vertices
        prop_assert_eq!(u.distance(&v), v.distance(&u));
        prop_assert_eq!(u.distance(&u), 0);
    }

    #[test]
    fn conjugation_decomposition_reassembles(w in word_strategy(12)) {
        let (u, c) = w.cyclic_decomposition();
        prop_assert_eq!(u.concat(&c).concat(&u.inverse()), w);
        if !c.is_empty() {
            // the core is cyclically reduced
            prop_assert!(c.first().unwrap() != c.last().unwrap().inverse() || c.len() == 1);
        }
    }

    #[test]
    fn axis_ends_are_fixed_by_the_element(w in word_strategy(8)) {
        prop_assume!(!w.is_empty());
        let (fwd, bwd) = axis_ends(&w).unwrap();
        prop_assert_eq!(fwd.translate(&w), fwd.clone());
        prop_assert_eq!(bwd.translate(&w), bwd.clone());
        prop_assert_ne!(fwd, bwd);
    }

    #[test]
    fn periodic_ends_canonicalize_representations(
        head in word_strategy(6),
        rep in word_strategy(5),
        shift in 0usize..4,
        pump in 1usize..3,
    ) {
        prop_assume!(!rep.is_empty());
        let canonical = match PeriodicEnd::new(head.clone(), rep.clone()) {
            Ok(e) => e,
            Err(_) => return Ok(()), // the period collapses; nothing to test
        };
        // pumping the period or shifting head letters into it describes the
        // same end and must normalize identically
        let pumped = PeriodicEnd::new(head.clone(), rep.pow(pump as i64)).unwrap();
        prop_assert_eq!(&canonical, &pumped);
        let mut head2 = head.clone();
        let mut rep2: Vec<Letter> = rep.letters().to_vec();
        for _ in 0..shift {
            let first = rep2.remove(0);
            rep2.push(first);
            head2 = head2.concat(&Word::letter(first));
        }
        let shifted = PeriodicEnd::new(head2, Word::new(rep2)).unwrap();
        prop_assert_eq!(&canonical, &shifted);
        // prefixes of the canonical form are reduced
        let p = canonical.prefix(10);
        prop_assert_eq!(p.len(), 10);
    }

    #[test]
    fn rationals_roundtrip_through_text(v in rational_strategy()) {
        let s = rational_str(&v);
        prop_assert_eq!(parse_rational(&s), Some(v));
    }

    #[test]
    fn pl_bijections_form_a_group(
        x1 in 1i64..11, y1 in 1i64..11,
        x2 in 1i64..11, y2 in 1i64..11,
        t_num in 0i64..12,
    ) {
        let mk = |x: i64, y: i64| {
            PLBijection::new(vec![
                (rat_zero(), rat_zero()),
                (rat(x, 12), rat(y, 12)),
                (rat_one(), rat_one()),
            ])
            .unwrap()
        };
        let f = mk(x1, y1);
        let g = mk(x2, y2);
        let t = rat(t_num, 12);
        prop_assert_eq!(f.compose(&f.inverse()), PLBijection::identity());
        prop_assert_eq!(f.inverse().inverse(), f.clone());
        // composition evaluates pointwise
        prop_assert_eq!(f.compose(&g).eval(&t), f.eval(&g.eval(&t)));
        // monotonicity is preserved under composition with the reversal
        let r = PLBijection::reversal();
        prop_assert!(!r.compose(&f).is_increasing());
        prop_assert!(r.compose(&r.compose(&f)).is_increasing());
    }
}
