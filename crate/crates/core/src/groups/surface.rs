//! Closed orientable surface groups `<x1,y1,..,xg,yg | [x1,y1]...[xg,yg]>`
//! with Dehn's algorithm as the word problem.

use crate::error::{Error, Result};
use crate::freewords::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    orientable: bool,
    genus: usize,
    relator: Word,
    // every cyclic permutation of the relator and of its inverse
    rotations: Vec<Vec<Letter>>,
}

impl Surface {
    pub fn new(orientable: bool, genus: usize) -> Self {
        let relator = if orientable {
            (0..genus as u32)
                .map(|i| Word::gen(2 * i).commutator(&Word::gen(2 * i + 1)))
                .fold(Word::identity(), |acc, c| acc.mul(&c))
        } else {
            (0..genus as u32)
                .map(|i| Word::syllable(i, 2))
                .fold(Word::identity(), |acc, c| acc.mul(&c))
        };
        let mut rotations = Vec::new();
        for r in [relator.to_letters(), relator.inverse().to_letters()] {
            let n = r.len();
            for shift in 0..n {
                rotations.push((0..n).map(|i| r[(i + shift) % n]).collect());
            }
        }
        Surface {
            orientable,
            genus,
            relator,
            rotations,
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn orientable(&self) -> bool {
        self.orientable
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn rank(&self) -> u32 {
        if self.orientable {
            2 * self.genus as u32
        } else {
            self.genus as u32
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        if self.orientable {
            (1..=self.genus)
                .flat_map(|i| [format!("x{i}"), format!("y{i}")])
                .collect()
        } else {
            (1..=self.genus).map(|i| format!("x{i}")).collect()
        }
    }

    pub(crate) fn supported(&self) -> Result<()> {
        if self.orientable && self.genus >= 2 {
            Ok(())
        } else {
            Err(Error::NotImplemented(format!(
                "Dehn's algorithm for {} surface of genus {}",
                if self.orientable {
                    "orientable"
                } else {
                    "non-orientable"
                },
                self.genus
            )))
        }
    }

    /// One Dehn step on a reduced letter sequence: finds a subword that is
    /// more than half of a relator rotation and swaps in the inverse of the
    /// shorter complement.
    fn dehn_step(&self, letters: &[Letter]) -> Option<Vec<Letter>> {
        let rel_len = self.relator.len();
        for start in 0..letters.len() {
            for rot in &self.rotations {
                let common = letters[start..]
                    .iter()
                    .zip(rot)
                    .take_while(|(a, b)| a == b)
                    .count();
                if 2 * common > rel_len {
                    let mut out = letters[..start].to_vec();
                    out.extend(rot[common..].iter().rev().map(|l| l.inv()));
                    out.extend_from_slice(&letters[start + common..]);
                    return Some(out);
                }
            }
        }
        None
    }

    /// Dehn-irreducible representative of `w`; never longer than `w`.
    pub fn dehn_reduce(&self, w: &Word) -> Result<Word> {
        self.supported()?;
        let mut current = w.clone();
        while let Some(next) = self.dehn_step(&current.to_letters()) {
            current = Word::reduce(next);
        }
        Ok(current)
    }

    /// Decides whether `w` is the identity: linear Dehn reduction followed by
    /// cyclic reduction and Dehn steps on every cyclic rotation.
    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        let mut current = self.dehn_reduce(w)?;
        loop {
            if current.is_identity() {
                return Ok(true);
            }
            let (_, core) = current.cyclic_reduction();
            let letters = core.to_letters();
            let n = letters.len();
            let mut advanced = None;
            for shift in 0..n {
                let rotated: Vec<Letter> = (0..n).map(|i| letters[(i + shift) % n]).collect();
                if let Some(next) = self.dehn_step(&rotated) {
                    advanced = Some(Word::reduce(next));
                    break;
                }
            }
            match advanced {
                Some(next) => current = self.dehn_reduce(&next)?,
                None => return Ok(false),
            }
        }
    }
}
