//! Reduced-word arithmetic for finitely generated free groups, together
//! with eventually periodic infinite reduced words standing for ends of the
//! Cayley tree.
//!
//! Letters print as `a`, `b`, `c`, ... with uppercase for inverses.

use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter {
    pub gen: u8,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u8, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn parse(c: char) -> Result<Self> {
        if c.is_ascii_lowercase() {
            Ok(Letter::new(c as u8 - b'a', false))
        } else if c.is_ascii_uppercase() {
            Ok(Letter::new(c as u8 - b'A', true))
        } else {
            Err(Error::invalid(format!("not a letter: {c}")))
        }
    }
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let base = if self.inv { b'A' } else { b'a' };
        write!(f, "{}", (base + self.gen) as char)
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Builds a word, cancelling adjacent inverse pairs.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "1" || s == "e" {
            return Ok(Word::identity());
        }
        let letters: Vec<Letter> = s.chars().map(Letter::parse).collect::<Result<_>>()?;
        Ok(Word::new(letters))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.concat(&base);
        }
        acc
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.letters
            .iter()
            .zip(other.letters.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word {
            letters: self.letters[..n.min(self.letters.len())].to_vec(),
        }
    }

    /// Word metric distance between two vertices of the Cayley tree.
    pub fn distance(&self, other: &Word) -> usize {
        let cp = self.common_prefix_len(other);
        (self.len() - cp) + (other.len() - cp)
    }

    /// Whether `m` lies on the tree geodesic from `self` to `other`.
    pub fn between(&self, m: &Word, other: &Word) -> bool {
        self.distance(m) + m.distance(other) == self.distance(other)
    }

    /// Conjugation decomposition w = u c u^{-1} with c cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut m = 0;
        while 2 * (m + 1) <= n
            && self.letters[m] == self.letters[n - 1 - m].inverse()
        {
            m += 1;
        }
        let u = Word { letters: self.letters[..m].to_vec() };
        let c = Word { letters: self.letters[m..n - m].to_vec() };
        (u, c)
    }

    /// Shortest word v with self = v^k.
    pub fn primitive_root(&self) -> Word {
        let n = self.letters.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (0..n).all(|i| self.letters[i] == self.letters[i % p]) {
                return Word { letters: self.letters[..p].to_vec() };
            }
        }
        Word::identity()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// An eventually periodic infinite reduced word `head . rep^infinity`, in a
/// canonical form: the period is primitive and cyclically reduced, the
/// junction is reduced, and the head is shortest possible.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PeriodicEnd {
    head: Word,
    rep: Vec<Letter>,
}

impl PeriodicEnd {
    pub fn new(head: Word, rep: Word) -> Result<Self> {
        if rep.is_empty() {
            return Err(Error::invalid("empty period"));
        }
        let mut head = head;
        let mut rep: Vec<Letter> = rep.letters().to_vec();
        // cyclically reduce the period, absorbing conjugators into the head
        loop {
            if rep.len() >= 2 && rep[0] == rep[rep.len() - 1].inverse() {
                let x = rep.remove(0);
                rep.pop();
                head = head.concat(&Word::letter(x));
                if rep.is_empty() {
                    return Err(Error::invalid("period collapses to the identity"));
                }
                continue;
            }
            break;
        }
        // primitive root
        let rep_word = Word { letters: rep.clone() };
        let prim = rep_word.primitive_root();
        let mut rep: Vec<Letter> = prim.letters().to_vec();
        // normalize the junction and minimize the head
        loop {
            if let Some(last) = head.last() {
                if last == rep[0].inverse() {
                    // u x . (x^{-1} r')^inf = u . (r' x^{-1})^inf
                    let mut ls = head.letters().to_vec();
                    ls.pop();
                    head = Word { letters: ls };
                    rep.rotate_left(1);
                    continue;
                }
                if last == rep[rep.len() - 1] {
                    // u x . (r' x)^inf = u . (x r')^inf
                    let mut ls = head.letters().to_vec();
                    ls.pop();
                    head = Word { letters: ls };
                    rep.rotate_right(1);
                    continue;
                }
            }
            break;
        }
        Ok(PeriodicEnd { head, rep })
    }

    pub fn head(&self) -> &Word {
        &self.head
    }

    pub fn period(&self) -> Word {
        Word { letters: self.rep.clone() }
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        if i < self.head.len() {
            self.head.letters()[i]
        } else {
            self.rep[(i - self.head.len()) % self.rep.len()]
        }
    }

    /// The first `n` letters as a reduced word (it is already reduced).
    pub fn prefix(&self, n: usize) -> Word {
        Word {
            letters: (0..n).map(|i| self.letter_at(i)).collect(),
        }
    }

    /// Left translation by a group element.
    pub fn translate(&self, w: &Word) -> PeriodicEnd {
        PeriodicEnd::new(w.concat(&self.head), self.period())
            .expect("translating an end keeps a non-trivial period")
    }

    /// Lexicographic comparison of the underlying infinite words.
    pub fn cmp_lex(&self, other: &PeriodicEnd) -> std::cmp::Ordering {
        if self == other {
            return std::cmp::Ordering::Equal;
        }
        let bound =
            self.head.len() + other.head.len() + self.rep.len() * other.rep.len() + 1;
        for i in 0..bound {
            let c = self.letter_at(i).cmp(&other.letter_at(i));
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        unreachable!("distinct periodic ends diverge within the bound");
    }

    /// Whether the vertex `w` lies on the ray from the root to this end,
    /// i.e. is a prefix of the infinite word.
    pub fn passes_through(&self, w: &Word) -> bool {
        self.prefix(w.len()) == *w
    }
}

impl std::fmt::Display for PeriodicEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})*", self.head, self.period())
    }
}

/// Attracting and repelling ends of a non-trivial element acting on the
/// Cayley tree: `w = u c u^{-1}` translates along its axis toward
/// `u c^inf` and away from `u c^{-inf}`.
pub fn axis_ends(w: &Word) -> Result<(PeriodicEnd, PeriodicEnd)> {
    if w.is_empty() {
        return Err(Error::invalid("the identity has no axis"));
    }
    let (u, c) = w.cyclic_decomposition();
    let fwd = PeriodicEnd::new(u.clone(), c.clone())?;
    let bwd = PeriodicEnd::new(u, c.inverse())?;
    Ok((fwd, bwd))
}
