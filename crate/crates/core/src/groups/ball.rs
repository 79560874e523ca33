use std::collections::{HashMap, HashSet};

use super::{Element, Group};
use crate::error::{Error, Result};

/// A generating set closed under inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    elements: Vec<Element>,
}

impl GeneratingSet {
    /// Validates `U = U^-1`.
    pub fn new(group: &Group, elements: Vec<Element>) -> Result<Self> {
        for x in &elements {
            let xi = group.inv(x)?;
            let mut found = false;
            for y in &elements {
                if group.equal(&xi, y)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Precondition(format!(
                    "generating set is not closed under inverses: missing {}",
                    group.format(&xi)
                )));
            }
        }
        Ok(GeneratingSet { elements })
    }

    /// Appends missing inverses, each right after its element; drops the
    /// identity and duplicates.
    pub fn symmetric_closure(group: &Group, elements: Vec<Element>) -> Result<Self> {
        let mut set = ElementSet::new(group);
        let mut out = Vec::new();
        for x in elements {
            if group.is_identity(&x)? {
                continue;
            }
            let xi = group.inv(&x)?;
            if set.insert(&x)? {
                out.push(x);
            }
            if set.insert(&xi)? {
                out.push(xi);
            }
        }
        Ok(GeneratingSet { elements: out })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Deduplicating set of elements under group equality.
///
/// Canonical groups hash elements directly; surface groups bucket by the
/// abelianization and compare within a bucket with the Dehn test.
pub struct ElementSet<'g> {
    group: &'g Group,
    store: Store,
}

enum Store {
    Hashed(HashSet<Element>),
    Bucketed(HashMap<Vec<i64>, Vec<Element>>),
    Linear(Vec<Element>),
}

fn abelian_key(group: &Group, x: &Element) -> Option<Vec<i64>> {
    match (group, x) {
        (Group::Surface(s), Element::Word(w)) => Some(w.exponent_vector().dense(s.rank() as usize)),
        _ => None,
    }
}

impl<'g> ElementSet<'g> {
    pub fn new(group: &'g Group) -> Self {
        let store = if group.is_canonical() {
            Store::Hashed(HashSet::new())
        } else if matches!(group, Group::Surface(_)) {
            Store::Bucketed(HashMap::new())
        } else {
            Store::Linear(Vec::new())
        };
        ElementSet { group, store }
    }

    /// Inserts `x`; returns false if an equal element was already present.
    pub fn insert(&mut self, x: &Element) -> Result<bool> {
        let group = self.group;
        match &mut self.store {
            Store::Hashed(set) => Ok(set.insert(x.clone())),
            Store::Bucketed(map) => {
                let key = abelian_key(group, x).ok_or_else(|| group.mismatch())?;
                let bucket = map.entry(key).or_default();
                for y in bucket.iter() {
                    if group.equal(x, y)? {
                        return Ok(false);
                    }
                }
                bucket.push(x.clone());
                Ok(true)
            }
            Store::Linear(items) => {
                for y in items.iter() {
                    if group.equal(x, y)? {
                        return Ok(false);
                    }
                }
                items.push(x.clone());
                Ok(true)
            }
        }
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        match &self.store {
            Store::Hashed(set) => Ok(set.contains(x)),
            Store::Bucketed(map) => {
                let key = abelian_key(self.group, x).ok_or_else(|| self.group.mismatch())?;
                match map.get(&key) {
                    Some(bucket) => {
                        for y in bucket {
                            if self.group.equal(x, y)? {
                                return Ok(true);
                            }
                        }
                        Ok(false)
                    }
                    None => Ok(false),
                }
            }
            Store::Linear(items) => {
                for y in items {
                    if self.group.equal(x, y)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

/// A Cayley ball: elements in breadth-first discovery order.
#[derive(Debug, Clone)]
pub struct Ball {
    pub elements: Vec<Element>,
    /// Word length over the generating set of each element.
    pub lengths: Vec<usize>,
    /// True when the ball is the whole group.
    pub complete: bool,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

impl Group {
    /// All products of at most `radius` elements of `u`, deduplicated by
    /// equality and listed in breadth-first order.
    pub fn ball(&self, u: &GeneratingSet, radius: usize) -> Result<Ball> {
        if radius > 0 && self.contains_rational() {
            return Err(Error::UnsupportedEnumeration(format!(
                "balls in {self} are not finite under rational generators"
            )));
        }
        let mut seen = ElementSet::new(self);
        let id = self.identity();
        seen.insert(&id)?;
        let mut elements = vec![id.clone()];
        let mut lengths = vec![0];
        let mut frontier = vec![id];
        for step in 1..=radius {
            let mut next = Vec::new();
            for x in &frontier {
                for g in u.elements() {
                    let y = self.mul(x, g)?;
                    if seen.insert(&y)? {
                        next.push(y);
                    }
                }
            }
            for y in &next {
                elements.push(y.clone());
                lengths.push(step);
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let mut complete = true;
        'outer: for x in &frontier {
            for g in u.elements() {
                if !seen.contains(&self.mul(x, g)?)? {
                    complete = false;
                    break 'outer;
                }
            }
        }
        Ok(Ball {
            elements,
            lengths,
            complete,
        })
    }

    /// Shortest nonempty decomposition `target = u_0 u_1 ... u_t` over `u`
    /// found by breadth-first search within `radius` steps.
    pub fn decompose(
        &self,
        u: &GeneratingSet,
        target: &Element,
        radius: usize,
    ) -> Result<Option<Vec<Element>>> {
        for g in u.elements() {
            if self.equal(g, target)? {
                return Ok(Some(vec![g.clone()]));
            }
        }
        let mut seen = ElementSet::new(self);
        let mut nodes: Vec<(Element, usize, usize)> = Vec::new(); // (value, parent, generator)
        let mut frontier = Vec::new();
        for (k, g) in u.elements().iter().enumerate() {
            if seen.insert(g)? {
                nodes.push((g.clone(), usize::MAX, k));
                frontier.push(nodes.len() - 1);
            }
        }
        for _ in 2..=radius {
            let mut next = Vec::new();
            for &idx in &frontier {
                for (k, g) in u.elements().iter().enumerate() {
                    let y = self.mul(&nodes[idx].0, g)?;
                    if self.equal(&y, target)? {
                        let mut path = vec![g.clone()];
                        let mut cur = idx;
                        while cur != usize::MAX {
                            path.push(u.elements()[nodes[cur].2].clone());
                            cur = nodes[cur].1;
                        }
                        path.reverse();
                        return Ok(Some(path));
                    }
                    if seen.insert(&y)? {
                        nodes.push((y, idx, k));
                        next.push(nodes.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Word;

    #[test]
    fn free_group_balls() {
        let f = Group::free(&["b", "c"]);
        let u = f.default_generating_set().unwrap();
        assert_eq!(u.len(), 4);
        assert_eq!(f.ball(&u, 1).unwrap().len(), 5);
        let b2 = f.ball(&u, 2).unwrap();
        assert_eq!(b2.len(), 17);
        assert!(!b2.complete);
    }

    #[test]
    fn cyclic_ball_is_whole_group() {
        let z6 = Group::cyclic("g", 6).unwrap();
        let u = z6.default_generating_set().unwrap();
        let ball = z6.ball(&u, 6).unwrap();
        assert_eq!(ball.len(), 6);
        assert!(ball.complete);
        assert!(z6.ball(&u, 3).unwrap().complete);
        assert!(!z6.ball(&u, 2).unwrap().complete);
    }

    #[test]
    fn rational_balls_are_unsupported() {
        let q = Group::rational(1);
        let u = q.default_generating_set().unwrap();
        assert!(matches!(
            q.ball(&u, 1),
            Err(Error::UnsupportedEnumeration(_))
        ));
        assert_eq!(q.ball(&u, 0).unwrap().len(), 1);
    }

    #[test]
    fn generating_sets_must_be_symmetric() {
        let f = Group::free(&["b", "c"]);
        let b = Element::Word(Word::gen(0));
        assert!(GeneratingSet::new(&f, vec![b.clone()]).is_err());
        let bi = f.inv(&b).unwrap();
        assert!(GeneratingSet::new(&f, vec![b, bi]).is_ok());
    }

    #[test]
    fn geodesic_decomposition() {
        let f = Group::free(&["b", "c"]);
        let u = f.default_generating_set().unwrap();
        let target = Element::Word(Word::gen(0).mul(&Word::gen(1)));
        let path = f.decompose(&u, &target, 3).unwrap().unwrap();
        assert_eq!(path.len(), 2);
        let id = f.identity();
        let path = f.decompose(&u, &id, 3).unwrap().unwrap();
        assert_eq!(path.len(), 2);
        let far = Element::Word(Word::syllable(0, 5));
        assert!(f.decompose(&u, &far, 3).unwrap().is_none());
    }
}
