//! Freely reduced words over an unbounded, integer-indexed alphabet.
//!
//! A [`Word`] is stored as a run-length list of syllables `(generator, exponent)`
//! with nonzero exponents and distinct neighbouring generators, so `b^4000`
//! costs one syllable. Comparison, hashing and ordering all act on this
//! canonical form, which coincides with the freely reduced letter sequence.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A basis element of a free group, identified by its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator(pub u32);

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: u32, inverse: bool) -> Self {
        Letter {
            gen: Generator(gen),
            inverse,
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    // b < b^-1 < c < c^-1 < ...
    fn key(self) -> (u32, bool) {
        (self.gen.0, self.inverse)
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    syllables: Vec<(Generator, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn gen(g: u32) -> Self {
        Word::syllable(g, 1)
    }

    pub fn syllable(g: u32, exp: i64) -> Self {
        let mut w = Word::identity();
        w.push(Generator(g), exp);
        w
    }

    /// Free reduction of an arbitrary sequence of signed generators.
    pub fn reduce<I>(letters: I) -> Self
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut w = Word::identity();
        for l in letters {
            w.push(l.gen, l.sign());
        }
        w
    }

    /// Free reduction of a sequence of `(generator, exponent)` pairs.
    pub fn from_syllables<I>(syllables: I) -> Self
    where
        I: IntoIterator<Item = (u32, i64)>,
    {
        let mut w = Word::identity();
        for (g, e) in syllables {
            w.push(Generator(g), e);
        }
        w
    }

    fn push(&mut self, g: Generator, exp: i64) {
        if exp == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some((last, e)) if *last == g => {
                *e += exp;
                if *e == 0 {
                    self.syllables.pop();
                }
            }
            _ => self.syllables.push((g, exp)),
        }
    }

    pub fn syllables(&self) -> &[(Generator, i64)] {
        &self.syllables
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + '_ {
        self.syllables.iter().flat_map(|&(g, e)| {
            let l = Letter {
                gen: g,
                inverse: e < 0,
            };
            std::iter::repeat_n(l, e.unsigned_abs() as usize)
        })
    }

    pub fn to_letters(&self) -> Vec<Letter> {
        self.letters().collect()
    }

    pub fn first_letter(&self) -> Option<Letter> {
        self.syllables.first().map(|&(g, e)| Letter {
            gen: g,
            inverse: e < 0,
        })
    }

    pub fn last_letter(&self) -> Option<Letter> {
        self.syllables.last().map(|&(g, e)| Letter {
            gen: g,
            inverse: e < 0,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters of the reduced form.
    pub fn len(&self) -> usize {
        self.syllables
            .iter()
            .map(|&(_, e)| e.unsigned_abs() as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// Largest generator index occurring in the word.
    pub fn max_generator(&self) -> Option<u32> {
        self.syllables.iter().map(|(g, _)| g.0).max()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.syllables {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// `s^-1 * self * s`
    pub fn conjugate(&self, s: &Word) -> Word {
        s.inverse().mul(self).mul(s)
    }

    /// `self^-1 * other^-1 * self * other`
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    pub fn commutes_with(&self, other: &Word) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn pow(&self, k: i64) -> Word {
        if k == 0 || self.is_identity() {
            return Word::identity();
        }
        if k < 0 {
            return self.inverse().pow(-k);
        }
        let (conj, core) = self.cyclic_reduction();
        let mut powered = Word::identity();
        for _ in 0..k {
            for &(g, e) in &core.syllables {
                powered.push(g, e);
            }
        }
        conj.mul(&powered).mul(&conj.inverse())
    }

    /// Splits `self = conj * core * conj^-1` with `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let letters = self.to_letters();
        if letters.is_empty() {
            return (Word::identity(), Word::identity());
        }
        let (mut i, mut j) = (0usize, letters.len() - 1);
        while i < j && letters[i] == letters[j].inv() {
            i += 1;
            j -= 1;
        }
        let conj = Word::reduce(letters[..i].iter().copied());
        let core = Word::reduce(letters[i..=j].iter().copied());
        (conj, core)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first_letter(), self.last_letter()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inv(),
            _ => true,
        }
    }

    /// Per-generator exponent sums.
    pub fn exponent_vector(&self) -> ExponentVector {
        let mut sums = BTreeMap::new();
        for &(g, e) in &self.syllables {
            *sums.entry(g).or_insert(0) += e;
        }
        sums.retain(|_, e| *e != 0);
        ExponentVector(sums)
    }

    /// Membership in the derived subgroup of the ambient free group.
    pub fn is_in_derived(&self) -> bool {
        self.exponent_vector().is_zero()
    }

    pub fn exponent_sum(&self, g: u32) -> i64 {
        self.syllables
            .iter()
            .filter(|(h, _)| h.0 == g)
            .map(|&(_, e)| e)
            .sum()
    }

    /// Image under the homomorphism sending generator `g` to `image(g)`.
    pub fn substitute<F>(&self, mut image: F) -> Word
    where
        F: FnMut(Generator) -> Word,
    {
        let mut out = Word::identity();
        for &(g, e) in &self.syllables {
            let img = image(g).pow(e);
            for &(h, f) in &img.syllables {
                out.push(h, f);
            }
        }
        out
    }

    /// Renumbers generators by adding `offset` to each index.
    pub fn shift(&self, offset: u32) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .map(|&(g, e)| (Generator(g.0 + offset), e))
                .collect(),
        }
    }

    /// The maximal `k` and the non-power `root` with `self = root^k`.
    ///
    /// Cyclically reduces, then tries every divisor of the cyclic length from
    /// the smallest up; the first period that tiles the core is primitive.
    pub fn primitive_root(&self) -> Result<(Word, u64)> {
        if self.is_identity() {
            return Err(Error::Undefined(
                "the identity has no primitive root".into(),
            ));
        }
        let (conj, core) = self.cyclic_reduction();
        let letters = core.to_letters();
        let n = letters.len();
        for d in (1..=n).filter(|d| n % d == 0) {
            if (d..n).all(|i| letters[i] == letters[i % d]) {
                let root = Word::reduce(letters[..d].iter().copied());
                let root = conj.mul(&root).mul(&conj.inverse());
                return Ok((root, (n / d) as u64));
            }
        }
        unreachable!("d = n always tiles")
    }

    /// Some `s` with `s^-1 * self * s == other`, if the two are conjugate.
    pub fn conjugator_to(&self, other: &Word) -> Option<Word> {
        let (t, c) = self.cyclic_reduction();
        let (t2, c2) = other.cyclic_reduction();
        if c.len() != c2.len() {
            return None;
        }
        if c.is_identity() {
            return Some(Word::identity());
        }
        let a = c.to_letters();
        let b = c2.to_letters();
        let n = a.len();
        // c = P Q and c2 = Q P = P^-1 c P for |P| = p
        let p = (0..n).find(|&p| (0..n).all(|i| b[i] == a[(i + p) % n]))?;
        let prefix = Word::reduce(a[..p].iter().copied());
        Some(t.mul(&prefix).mul(&t2.inverse()))
    }

    pub fn is_conjugate_to(&self, other: &Word) -> bool {
        self.conjugator_to(other).is_some()
    }

    /// Canonical representative of `root` up to inversion.
    pub fn canonical_up_to_inverse(&self) -> Word {
        let inv = self.inverse();
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }
}

impl Ord for Word {
    /// Shortlex on reduced letter sequences.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.letters()
                .map(Letter::key)
                .cmp(other.letters().map(Letter::key))
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    format!("g{}", g.0)
                } else {
                    format!("g{}^{}", g.0, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Exponent sums per generator; only nonzero entries are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentVector(pub BTreeMap<Generator, i64>);

impl ExponentVector {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, g: u32) -> i64 {
        self.0.get(&Generator(g)).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        let mut sums = self.0.clone();
        for (g, e) in &other.0 {
            *sums.entry(*g).or_insert(0) += e;
        }
        sums.retain(|_, e| *e != 0);
        ExponentVector(sums)
    }

    /// Dense form over generators `0..rank`.
    pub fn dense(&self, rank: usize) -> Vec<i64> {
        (0..rank as u32).map(|g| self.get(g)).collect()
    }
}

/// Left-normed commutator `[[..[w1, w2], w3].., wn]`.
pub fn left_normed_commutator(ws: &[Word]) -> Result<Word> {
    if ws.len() < 2 {
        return Err(Error::InvalidArity {
            expected: "at least 2".into(),
            got: ws.len(),
        });
    }
    let mut acc = ws[0].clone();
    for w in &ws[1..] {
        acc = acc.commutator(w);
    }
    Ok(acc)
}

/// All reduced words of length at most `radius` over generators `0..rank`,
/// in shortlex order.
pub fn free_ball(rank: u32, radius: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (0..rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut ball = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            let last = w.last_letter();
            for &l in &letters {
                if last == Some(l.inv()) {
                    continue;
                }
                next.push(w.mul(&Word::reduce([l])));
            }
        }
        ball.extend(next.iter().cloned());
        layer = next;
    }
    ball
}

/// Elements of the radius ball of `F_rank` commuting with `w`.
pub fn ball_centralizer_in(rank: u32, w: &Word, radius: usize) -> Result<Vec<Word>> {
    if w.is_identity() {
        return Err(Error::Precondition(
            "centralizer of the identity is the whole group".into(),
        ));
    }
    Ok(free_ball(rank, radius)
        .into_iter()
        .filter(|x| x.commutes_with(w))
        .collect())
}

/// Ball centralizer in the free group of rank `max(2, highest index + 1)`.
pub fn ball_centralizer(w: &Word, radius: usize) -> Result<Vec<Word>> {
    let rank = w.max_generator().map_or(2, |g| (g + 1).max(2));
    ball_centralizer_in(rank, w, radius)
}

/// The powers `root^j` of length at most `radius`, shortlex-sorted.
pub fn root_powers_in_ball(w: &Word, radius: usize) -> Result<Vec<Word>> {
    let (root, _) = w.primitive_root()?;
    let mut powers = vec![Word::identity()];
    // |root^j| grows strictly with |j|
    for j in 1.. {
        let p = root.pow(j);
        if p.len() > radius {
            break;
        }
        powers.push(p.inverse());
        powers.push(p);
    }
    powers.sort();
    Ok(powers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Word {
        Word::gen(0)
    }
    fn c() -> Word {
        Word::gen(1)
    }

    #[test]
    fn reduce_cancels() {
        let w = Word::reduce([
            Letter::new(0, false),
            Letter::new(0, true),
            Letter::new(1, false),
        ]);
        assert_eq!(w, c());
        assert_eq!(Word::reduce([]), Word::identity());
        let w = Word::reduce([
            Letter::new(0, false),
            Letter::new(1, false),
            Letter::new(1, true),
            Letter::new(0, false),
        ]);
        assert_eq!(w, b().pow(2));
    }

    #[test]
    fn basic_products() {
        assert!(b().mul(&b().inverse()).is_identity());
        assert_eq!(b().mul(&c()).inverse(), c().inverse().mul(&b().inverse()));
        assert_eq!(b().conjugate(&c()), c().inverse().mul(&b()).mul(&c()));
    }

    #[test]
    fn commutators() {
        let c2 = c().pow(2);
        assert_eq!(
            b().commutator(&c2),
            Word::from_syllables([(0, -1), (1, -2), (0, 1), (1, 2)])
        );
        assert!(b().commutator(&b().pow(3)).is_identity());
        // a = g0, b = g1 here
        let a = Word::gen(0);
        let bb = Word::gen(1);
        assert_eq!(a.commutator(&a.mul(&bb)), a.commutator(&bb));
    }

    #[test]
    fn left_normed() {
        assert_eq!(
            left_normed_commutator(&[b(), c()]).unwrap(),
            b().commutator(&c())
        );
        assert_eq!(
            left_normed_commutator(&[b(), c(), b()]).unwrap(),
            b().commutator(&c()).commutator(&b())
        );
        assert!(left_normed_commutator(&[b(), b(), c()])
            .unwrap()
            .is_identity());
        assert!(matches!(
            left_normed_commutator(&[b()]),
            Err(Error::InvalidArity { .. })
        ));
    }

    #[test]
    fn exponent_vectors() {
        let comm = b().commutator(&c());
        assert!(comm.exponent_vector().is_zero());
        assert!(comm.is_in_derived());
        let b2 = b().pow(2);
        assert_eq!(b2.exponent_vector().get(0), 2);
        assert!(!b2.is_in_derived());
        let w = b().mul(&c()).mul(&b().inverse()).mul(&c());
        assert_eq!(w.exponent_vector().dense(2), vec![0, 2]);
        assert!(!w.is_in_derived());
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(b().pow(4).primitive_root().unwrap(), (b(), 4));
        let bc = b().mul(&c());
        assert_eq!(bc.primitive_root().unwrap(), (bc.clone(), 1));
        let conj = b().mul(&c()).mul(&b().inverse());
        let sq = b().mul(&c().pow(2)).mul(&b().inverse());
        assert_eq!(conj.pow(2), sq);
        assert_eq!(sq.primitive_root().unwrap(), (conj, 2));
        assert!(Word::identity().primitive_root().is_err());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(free_ball(2, 1).len(), 5);
        assert_eq!(free_ball(2, 2).len(), 17);
        assert_eq!(free_ball(2, 3).len(), 53);
    }

    #[test]
    fn centralizers_in_small_balls() {
        let mut got = ball_centralizer(&b(), 2).unwrap();
        got.sort();
        let mut want = vec![
            Word::identity(),
            b(),
            b().inverse(),
            b().pow(2),
            b().pow(-2),
        ];
        want.sort();
        assert_eq!(got, want);

        let comm = b().commutator(&c());
        assert_eq!(ball_centralizer(&comm, 1).unwrap(), vec![Word::identity()]);

        let mut got = ball_centralizer(&b().pow(2), 1).unwrap();
        got.sort();
        assert_eq!(got, vec![Word::identity(), b(), b().inverse()]);
    }

    #[test]
    fn conjugators() {
        let w = b().mul(&c()).mul(&c());
        let s = c().mul(&b().inverse());
        let v = w.conjugate(&s);
        let found = w.conjugator_to(&v).unwrap();
        assert_eq!(w.conjugate(&found), v);
        assert!(b().conjugator_to(&c()).is_none());
    }

    #[test]
    fn big_powers_stay_compact() {
        let w = b().pow(4000);
        assert_eq!(w.syllables().len(), 1);
        assert_eq!(w.len(), 4000);
        assert!(w.mul(&b().pow(-4000)).is_identity());
    }

    #[test]
    fn root_powers_of_a_conjugate() {
        let w = b().conjugate(&c());
        let powers = root_powers_in_ball(&w, 4).unwrap();
        assert_eq!(powers.len(), 5);
        assert!(powers.contains(&b().pow(2).conjugate(&c())));
        let centralizer = ball_centralizer(&w, 4).unwrap();
        assert_eq!(centralizer, powers);
    }
}
