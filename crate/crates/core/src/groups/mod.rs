//! Concrete groups with decidable word problem and a uniform arithmetic
//! contract: free groups, finite cyclic and symmetric groups, direct and
//! semidirect products, free products, rational vector groups and closed
//! orientable surface groups.

mod ball;
mod surface;

pub use ball::{Ball, ElementSet, GeneratingSet};
pub use surface::Surface;

use std::collections::HashSet;
use std::fmt;

use num::integer::Integer;
use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::freewords::{Generator, Word};

/// An element of some [`Group`]. The variant must match the group kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Free and surface groups.
    Word(Word),
    /// Finite cyclic groups.
    Residue(u64),
    /// Symmetric groups: image of each point, 0-based.
    Perm(Vec<u32>),
    /// Direct products.
    Tuple(Vec<Element>),
    /// Semidirect products `F ⋊ <a>_n`: `(w, a^e)`.
    Semi(Word, u64),
    /// Free products: alternating nontrivial syllables `(factor, element)`.
    Syllables(Vec<(usize, Element)>),
    /// Rational vector groups, written additively.
    Vector(Vec<BigRational>),
}

/// `F(base) ⋊ <acting>_order`, the action given by images of the base generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semidirect {
    base: Vec<String>,
    acting: String,
    order: u64,
    // action_powers[e][g] = α^e(g)
    action_powers: Vec<Vec<Word>>,
}

impl Semidirect {
    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn acting_name(&self) -> &str {
        &self.acting
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `α^e(w)`
    pub fn act(&self, e: u64, w: &Word) -> Word {
        let images = &self.action_powers[(e % self.order) as usize];
        w.substitute(|g| images[g.0 as usize].clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    Free { names: Vec<String> },
    Cyclic { name: String, order: u64 },
    Symmetric { degree: usize },
    Direct(Vec<Group>),
    Semidirect(Semidirect),
    FreeProduct(Vec<Group>),
    Rational { names: Vec<String> },
    Surface(Surface),
}

fn check_unique_names(group: &Group) -> Result<()> {
    let mut seen = HashSet::new();
    for (name, _) in group.generators() {
        if !seen.insert(name.clone()) {
            return Err(Error::InvalidGroup(format!(
                "generator name {name} is used twice"
            )));
        }
    }
    Ok(())
}

impl Group {
    pub fn free<S: AsRef<str>>(names: &[S]) -> Group {
        Group::Free {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    pub fn cyclic(name: &str, order: u64) -> Result<Group> {
        if order == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        Ok(Group::Cyclic {
            name: name.to_string(),
            order,
        })
    }

    pub fn symmetric(degree: usize) -> Result<Group> {
        if degree == 0 {
            return Err(Error::InvalidGroup("symmetric group of degree 0".into()));
        }
        Ok(Group::Symmetric { degree })
    }

    pub fn rational(dim: usize) -> Group {
        Group::Rational {
            names: (1..=dim).map(|i| format!("q{i}")).collect(),
        }
    }

    pub fn surface(orientable: bool, genus: usize) -> Group {
        Group::Surface(Surface::new(orientable, genus))
    }

    pub fn direct(factors: Vec<Group>) -> Result<Group> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("empty direct product".into()));
        }
        let g = Group::Direct(factors);
        check_unique_names(&g)?;
        Ok(g)
    }

    /// Validates that the action extends to an automorphism whose order
    /// divides `order`, i.e. `α^order` fixes every base generator.
    pub fn semidirect<S: AsRef<str>>(
        base: &[S],
        acting: &str,
        order: u64,
        action: Vec<Word>,
    ) -> Result<Group> {
        if order == 0 {
            return Err(Error::InvalidGroup("acting group of order 0".into()));
        }
        if action.len() != base.len() {
            return Err(Error::InvalidGroup(format!(
                "action lists {} images for {} generators",
                action.len(),
                base.len()
            )));
        }
        let rank = base.len() as u32;
        if action
            .iter()
            .any(|w| w.max_generator().is_some_and(|g| g >= rank))
        {
            return Err(Error::InvalidGroup(
                "action image uses an unknown generator".into(),
            ));
        }
        let identity: Vec<Word> = (0..rank).map(Word::gen).collect();
        let mut powers = vec![identity.clone()];
        let mut current = identity.clone();
        for _ in 1..=order {
            current = current
                .iter()
                .map(|w| w.substitute(|g| action[g.0 as usize].clone()))
                .collect();
            powers.push(current.clone());
        }
        if powers.pop() != Some(identity) {
            return Err(Error::InvalidGroup(format!(
                "action does not have order dividing {order}"
            )));
        }
        let g = Group::Semidirect(Semidirect {
            base: base.iter().map(|s| s.as_ref().to_string()).collect(),
            acting: acting.to_string(),
            order,
            action_powers: powers,
        });
        check_unique_names(&g)?;
        Ok(g)
    }

    /// Factors must be nontrivial free, cyclic or symmetric groups.
    pub fn free_product(factors: Vec<Group>) -> Result<Group> {
        if factors.len() < 2 {
            return Err(Error::InvalidGroup(
                "a free product needs at least two factors".into(),
            ));
        }
        for f in &factors {
            match f {
                Group::Free { names } if !names.is_empty() => {}
                Group::Cyclic { order, .. } if *order > 1 => {}
                Group::Symmetric { degree } if *degree > 1 => {}
                _ => return Err(Error::InvalidGroup(format!("unsupported free factor {f}"))),
            }
        }
        let g = Group::FreeProduct(factors);
        check_unique_names(&g)?;
        Ok(g)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Group::Free { .. } => "free group",
            Group::Cyclic { .. } => "cyclic group",
            Group::Symmetric { .. } => "symmetric group",
            Group::Direct(_) => "direct product",
            Group::Semidirect(_) => "semidirect product",
            Group::FreeProduct(_) => "free product",
            Group::Rational { .. } => "rational vector group",
            Group::Surface(_) => "surface group",
        }
    }

    fn mismatch(&self) -> Error {
        Error::TypeMismatch(self.to_string())
    }

    pub fn identity(&self) -> Element {
        match self {
            Group::Free { .. } | Group::Surface(_) => Element::Word(Word::identity()),
            Group::Cyclic { .. } => Element::Residue(0),
            Group::Symmetric { degree } => Element::Perm((0..*degree as u32).collect()),
            Group::Direct(fs) => Element::Tuple(fs.iter().map(Group::identity).collect()),
            Group::Semidirect(_) => Element::Semi(Word::identity(), 0),
            Group::FreeProduct(_) => Element::Syllables(Vec::new()),
            Group::Rational { names } => Element::Vector(vec![BigRational::zero(); names.len()]),
        }
    }

    /// Whether `x` is a well-formed element of this group.
    pub fn contains(&self, x: &Element) -> bool {
        match (self, x) {
            (Group::Free { names }, Element::Word(w)) => {
                w.max_generator().is_none_or(|g| (g as usize) < names.len())
            }
            (Group::Surface(s), Element::Word(w)) => w.max_generator().is_none_or(|g| g < s.rank()),
            (Group::Cyclic { order, .. }, Element::Residue(r)) => r < order,
            (Group::Symmetric { degree }, Element::Perm(p)) => {
                p.len() == *degree && {
                    let mut seen = vec![false; *degree];
                    p.iter().all(|&i| {
                        (i as usize) < *degree && !std::mem::replace(&mut seen[i as usize], true)
                    })
                }
            }
            (Group::Direct(fs), Element::Tuple(xs)) => {
                fs.len() == xs.len() && fs.iter().zip(xs).all(|(f, x)| f.contains(x))
            }
            (Group::Semidirect(sd), Element::Semi(w, e)) => {
                *e < sd.order
                    && w.max_generator()
                        .is_none_or(|g| (g as usize) < sd.base.len())
            }
            (Group::FreeProduct(fs), Element::Syllables(syl)) => {
                syl.iter().all(|(f, x)| {
                    *f < fs.len() && fs[*f].contains(x) && !fs[*f].is_identity_unchecked(x)
                }) && syl.windows(2).all(|p| p[0].0 != p[1].0)
            }
            (Group::Rational { names }, Element::Vector(v)) => v.len() == names.len(),
            _ => false,
        }
    }

    fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(self.mismatch())
        }
    }

    // identity test for canonical kinds, used while validating syllables
    fn is_identity_unchecked(&self, x: &Element) -> bool {
        *x == self.identity()
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        match (self, x, y) {
            (Group::Free { .. }, Element::Word(a), Element::Word(b)) => Ok(Element::Word(a.mul(b))),
            (Group::Surface(s), Element::Word(a), Element::Word(b)) => {
                Ok(Element::Word(s.dehn_reduce(&a.mul(b))?))
            }
            (Group::Cyclic { order, .. }, Element::Residue(a), Element::Residue(b)) => {
                Ok(Element::Residue((a + b) % order))
            }
            (Group::Symmetric { degree }, Element::Perm(a), Element::Perm(b))
                if a.len() == *degree && b.len() == *degree =>
            {
                // apply a first, then b
                Ok(Element::Perm(a.iter().map(|&i| b[i as usize]).collect()))
            }
            (Group::Direct(fs), Element::Tuple(a), Element::Tuple(b))
                if a.len() == fs.len() && b.len() == fs.len() =>
            {
                let parts = fs
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(f, (p, q))| f.mul(p, q))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Element::Tuple(parts))
            }
            (Group::Semidirect(sd), Element::Semi(w1, e1), Element::Semi(w2, e2)) => {
                let w = w1.mul(&sd.act(*e1, w2));
                Ok(Element::Semi(w, (e1 + e2) % sd.order))
            }
            (Group::FreeProduct(fs), Element::Syllables(a), Element::Syllables(b)) => {
                let mut out = a.clone();
                for (f, e) in b {
                    push_syllable(fs, &mut out, *f, e.clone())?;
                }
                Ok(Element::Syllables(out))
            }
            (Group::Rational { names }, Element::Vector(a), Element::Vector(b))
                if a.len() == names.len() && b.len() == names.len() =>
            {
                Ok(Element::Vector(
                    a.iter().zip(b).map(|(p, q)| p + q).collect(),
                ))
            }
            _ => Err(self.mismatch()),
        }
    }

    pub fn inv(&self, x: &Element) -> Result<Element> {
        match (self, x) {
            (Group::Free { .. } | Group::Surface(_), Element::Word(w)) => {
                if let Group::Surface(s) = self {
                    s.supported()?;
                }
                Ok(Element::Word(w.inverse()))
            }
            (Group::Cyclic { order, .. }, Element::Residue(r)) => {
                Ok(Element::Residue((order - r % order) % order))
            }
            (Group::Symmetric { .. }, Element::Perm(p)) => {
                let mut inv = vec![0u32; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j as usize] = i as u32;
                }
                Ok(Element::Perm(inv))
            }
            (Group::Direct(fs), Element::Tuple(xs)) if xs.len() == fs.len() => Ok(Element::Tuple(
                fs.iter()
                    .zip(xs)
                    .map(|(f, x)| f.inv(x))
                    .collect::<Result<Vec<_>>>()?,
            )),
            (Group::Semidirect(sd), Element::Semi(w, e)) => {
                let back = (sd.order - e % sd.order) % sd.order;
                Ok(Element::Semi(sd.act(back, &w.inverse()), back))
            }
            (Group::FreeProduct(fs), Element::Syllables(syl)) => Ok(Element::Syllables(
                syl.iter()
                    .rev()
                    .map(|(f, e)| Ok((*f, fs[*f].inv(e)?)))
                    .collect::<Result<Vec<_>>>()?,
            )),
            (Group::Rational { .. }, Element::Vector(v)) => {
                Ok(Element::Vector(v.iter().map(|q| -q).collect()))
            }
            _ => Err(self.mismatch()),
        }
    }

    /// Decides `x == y` in the group.
    pub fn equal(&self, x: &Element, y: &Element) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        match self {
            Group::Surface(s) => match (x, y) {
                (Element::Word(a), Element::Word(b)) => s.is_trivial(&a.mul(&b.inverse())),
                _ => Err(self.mismatch()),
            },
            Group::Direct(fs) if !self.is_canonical() => match (x, y) {
                (Element::Tuple(a), Element::Tuple(b)) => {
                    for ((f, p), q) in fs.iter().zip(a).zip(b) {
                        if !f.equal(p, q)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                _ => Err(self.mismatch()),
            },
            _ => Ok(x == y),
        }
    }

    pub fn is_identity(&self, x: &Element) -> Result<bool> {
        self.equal(x, &self.identity())
    }

    /// True when structural equality of elements coincides with group equality.
    pub fn is_canonical(&self) -> bool {
        match self {
            Group::Surface(_) => false,
            Group::Direct(fs) => fs.iter().all(Group::is_canonical),
            _ => true,
        }
    }

    pub fn power(&self, x: &Element, k: i64) -> Result<Element> {
        self.check(x)?;
        match (self, x) {
            (Group::Free { .. }, Element::Word(w)) => return Ok(Element::Word(w.pow(k))),
            (Group::Cyclic { order, .. }, Element::Residue(r)) => {
                let n = *order as i128;
                let v = ((*r as i128) * (k as i128)).rem_euclid(n);
                return Ok(Element::Residue(v as u64));
            }
            (Group::Rational { .. }, Element::Vector(v)) => {
                let k = BigRational::from_integer(BigInt::from(k));
                return Ok(Element::Vector(v.iter().map(|q| q * &k).collect()));
            }
            _ => {}
        }
        let (mut base, mut e) = if k < 0 {
            (self.inv(x)?, k.unsigned_abs())
        } else {
            (x.clone(), k as u64)
        };
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// `x^-1 y^-1 x y`
    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        let xi = self.inv(x)?;
        let yi = self.inv(y)?;
        self.mul(&self.mul(&self.mul(&xi, &yi)?, x)?, y)
    }

    /// `s^-1 x s`
    pub fn conjugate(&self, x: &Element, s: &Element) -> Result<Element> {
        self.mul(&self.mul(&self.inv(s)?, x)?, s)
    }

    pub fn commute(&self, x: &Element, y: &Element) -> Result<bool> {
        self.is_identity(&self.commutator(x, y)?)
    }

    /// Product of `images[g]^e` over the syllables of `w`.
    pub fn eval_word(&self, w: &Word, images: &[Element]) -> Result<Element> {
        let mut acc = self.identity();
        for &(Generator(g), e) in w.syllables() {
            let img = images.get(g as usize).ok_or_else(|| Error::InvalidArity {
                expected: format!("more than {g} images"),
                got: images.len(),
            })?;
            acc = self.mul(&acc, &self.power(img, e)?)?;
        }
        Ok(acc)
    }

    /// Named generators, in declaration order.
    pub fn generators(&self) -> Vec<(String, Element)> {
        match self {
            Group::Free { names } => names
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), Element::Word(Word::gen(i as u32))))
                .collect(),
            Group::Surface(s) => s
                .generator_names()
                .into_iter()
                .enumerate()
                .map(|(i, n)| (n, Element::Word(Word::gen(i as u32))))
                .collect(),
            Group::Cyclic { name, order } => {
                vec![(name.clone(), Element::Residue(1 % order))]
            }
            Group::Symmetric { degree } => (1..*degree)
                .map(|i| (format!("s{i}"), transposition(*degree, i - 1, i)))
                .collect(),
            Group::Direct(fs) => {
                let mut out = Vec::new();
                for (k, f) in fs.iter().enumerate() {
                    for (name, g) in f.generators() {
                        let mut parts: Vec<Element> = fs.iter().map(Group::identity).collect();
                        parts[k] = g;
                        out.push((name, Element::Tuple(parts)));
                    }
                }
                out
            }
            Group::Semidirect(sd) => {
                let mut out: Vec<(String, Element)> = sd
                    .base
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), Element::Semi(Word::gen(i as u32), 0)))
                    .collect();
                out.push((
                    sd.acting.clone(),
                    Element::Semi(Word::identity(), 1 % sd.order),
                ));
                out
            }
            Group::FreeProduct(fs) => {
                let mut out = Vec::new();
                for (k, f) in fs.iter().enumerate() {
                    for (name, g) in f.generators() {
                        let syl = if f.is_identity_unchecked(&g) {
                            Vec::new()
                        } else {
                            vec![(k, g)]
                        };
                        out.push((name, Element::Syllables(syl)));
                    }
                }
                out
            }
            Group::Rational { names } => names
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let mut v = vec![BigRational::zero(); names.len()];
                    v[i] = BigRational::one();
                    (n.clone(), Element::Vector(v))
                })
                .collect(),
        }
    }

    pub fn generator(&self, name: &str) -> Option<Element> {
        self.generators()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    /// The declared generators together with their inverses.
    pub fn default_generating_set(&self) -> Result<GeneratingSet> {
        let gens: Vec<Element> = self.generators().into_iter().map(|(_, g)| g).collect();
        GeneratingSet::symmetric_closure(self, gens)
    }

    pub fn contains_rational(&self) -> bool {
        match self {
            Group::Rational { .. } => true,
            Group::Direct(fs) | Group::FreeProduct(fs) => fs.iter().any(Group::contains_rational),
            _ => false,
        }
    }

    /// Order of `x`, or `None` for elements of infinite order.
    pub fn element_order(&self, x: &Element) -> Result<Option<u64>> {
        self.check(x)?;
        Ok(match (self, x) {
            (Group::Free { .. }, Element::Word(w)) => w.is_identity().then_some(1),
            (Group::Surface(s), Element::Word(w)) => s.is_trivial(w)?.then_some(1),
            (Group::Cyclic { order, .. }, Element::Residue(r)) => Some(order / order.gcd(r)),
            (Group::Symmetric { .. }, Element::Perm(p)) => {
                let mut seen = vec![false; p.len()];
                let mut ord = 1u64;
                for start in 0..p.len() {
                    let mut len = 0u64;
                    let mut i = start;
                    while !seen[i] {
                        seen[i] = true;
                        i = p[i] as usize;
                        len += 1;
                    }
                    if len > 0 {
                        ord = ord.lcm(&len);
                    }
                }
                Some(ord)
            }
            (Group::Direct(fs), Element::Tuple(xs)) => {
                let mut ord = 1u64;
                for (f, x) in fs.iter().zip(xs) {
                    match f.element_order(x)? {
                        Some(o) => ord = ord.lcm(&o),
                        None => return Ok(None),
                    }
                }
                Some(ord)
            }
            (Group::Semidirect(sd), Element::Semi(w, e)) => {
                if *e == 0 {
                    w.is_identity().then_some(1)
                } else {
                    let cycle = sd.order / sd.order.gcd(e);
                    match self.power(x, cycle as i64)? {
                        Element::Semi(v, 0) if v.is_identity() => Some(cycle),
                        _ => None,
                    }
                }
            }
            (Group::FreeProduct(fs), Element::Syllables(syl)) => {
                // finite order iff conjugate into a factor
                let mut lo = 0usize;
                let mut hi = syl.len();
                let mut core: Vec<(usize, Element)> = syl.clone();
                while hi - lo >= 2 && core[lo].0 == core[hi - 1].0 {
                    let f = core[lo].0;
                    let merged = fs[f].mul(&core[hi - 1].1, &core[lo].1)?;
                    if fs[f].is_identity_unchecked(&merged) {
                        lo += 1;
                        hi -= 1;
                    } else {
                        core[lo].1 = merged;
                        hi -= 1;
                        break;
                    }
                }
                match hi - lo {
                    0 => Some(1),
                    1 => fs[core[lo].0].element_order(&core[lo].1)?,
                    _ => None,
                }
            }
            (Group::Rational { .. }, Element::Vector(v)) => {
                v.iter().all(Zero::is_zero).then_some(1)
            }
            _ => return Err(self.mismatch()),
        })
    }

    /// Renders an element in the textual element syntax; the output parses
    /// back to an equal element.
    pub fn format(&self, x: &Element) -> String {
        match (self, x) {
            (Group::Free { names }, Element::Word(w)) => {
                format_word(w, |g| names[g as usize].clone())
            }
            (Group::Surface(s), Element::Word(w)) => {
                let names = s.generator_names();
                format_word(w, |g| names[g as usize].clone())
            }
            (Group::Cyclic { name, .. }, Element::Residue(r)) => match r {
                0 => "1".into(),
                1 => name.clone(),
                _ => format!("{name}^{r}"),
            },
            (Group::Symmetric { .. }, Element::Perm(p)) => {
                format_word(&adjacent_transposition_word(p), |g| format!("s{}", g + 1))
            }
            (Group::Direct(fs), Element::Tuple(xs)) => {
                let parts: Vec<String> = fs.iter().zip(xs).map(|(f, x)| f.format(x)).collect();
                format!("({})", parts.join(","))
            }
            (Group::Semidirect(sd), Element::Semi(w, e)) => {
                let base = format_word(w, |g| sd.base[g as usize].clone());
                let acting = match e {
                    0 => "1".to_string(),
                    1 => sd.acting.clone(),
                    _ => format!("{}^{e}", sd.acting),
                };
                format!("({base},{acting})")
            }
            (Group::FreeProduct(fs), Element::Syllables(syl)) => {
                if syl.is_empty() {
                    return "1".into();
                }
                syl.iter()
                    .map(|(f, e)| {
                        let s = fs[*f].format(e);
                        if s.contains('*') {
                            format!("({s})")
                        } else {
                            s
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            }
            (Group::Rational { names }, Element::Vector(v)) => {
                let parts: Vec<String> = names
                    .iter()
                    .zip(v)
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(n, q)| {
                        if q.is_one() {
                            n.clone()
                        } else if q.is_integer() {
                            format!("{n}^{}", q.numer())
                        } else {
                            format!("{n}^({}/{})", q.numer(), q.denom())
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join("*")
                }
            }
            _ => format!("<{x:?} not in {self}>"),
        }
    }

    /// Scales a rational-vector generator, for exponents like `q1^(2/3)`.
    pub fn rational_power(&self, x: &Element, q: &BigRational) -> Result<Element> {
        match (self, x) {
            (Group::Rational { .. }, Element::Vector(v)) => {
                Ok(Element::Vector(v.iter().map(|c| c * q).collect()))
            }
            (Group::Direct(fs), Element::Tuple(xs)) => {
                let mut parts = Vec::with_capacity(xs.len());
                for (f, x) in fs.iter().zip(xs) {
                    if f.is_identity(x)? {
                        parts.push(x.clone());
                    } else {
                        parts.push(f.rational_power(x, q)?);
                    }
                }
                Ok(Element::Tuple(parts))
            }
            _ => {
                if q.is_integer() {
                    let k: i64 = q
                        .numer()
                        .try_into()
                        .map_err(|_| Error::Undefined("exponent out of range".into()))?;
                    self.power(x, k)
                } else {
                    Err(Error::Undefined(format!(
                        "fractional power in a {}",
                        self.kind_name()
                    )))
                }
            }
        }
    }
}

fn push_syllable(
    factors: &[Group],
    out: &mut Vec<(usize, Element)>,
    f: usize,
    e: Element,
) -> Result<()> {
    match out.last() {
        Some((lf, le)) if *lf == f => {
            let merged = factors[f].mul(le, &e)?;
            out.pop();
            if !factors[f].is_identity(&merged)? {
                out.push((f, merged));
            }
        }
        _ => {
            if !factors[f].is_identity(&e)? {
                out.push((f, e));
            }
        }
    }
    Ok(())
}

pub fn transposition(degree: usize, i: usize, j: usize) -> Element {
    let mut p: Vec<u32> = (0..degree as u32).collect();
    p.swap(i, j);
    Element::Perm(p)
}

// bubble-sort decomposition: generator k is the transposition (k, k+1)
fn adjacent_transposition_word(p: &[u32]) -> Word {
    let mut arr: Vec<u32> = p.to_vec();
    let mut swaps = Vec::new();
    let n = arr.len();
    for pass in 0..n {
        for k in 0..n.saturating_sub(1 + pass) {
            if arr[k] > arr[k + 1] {
                arr.swap(k, k + 1);
                swaps.push(k as u32);
            }
        }
    }
    // each position swap left-multiplies by s_k, so s_m ... s_1 p = id
    // and p = s_1 ... s_m (every s_k is an involution)
    Word::from_syllables(swaps.into_iter().map(|k| (k, 1)))
}

/// Renders a word with the given generator names, `1` for the identity.
pub fn format_word<F>(w: &Word, name: F) -> String
where
    F: Fn(u32) -> String,
{
    if w.is_identity() {
        return "1".into();
    }
    w.syllables()
        .iter()
        .map(|&(g, e)| {
            if e == 1 {
                name(g.0)
            } else {
                format!("{}^{}", name(g.0), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Group {
    /// The group description syntax accepted by the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Free { names } => write!(f, "free({})", names.join(",")),
            Group::Cyclic { name, order } => write!(f, "cyclic({name},{order})"),
            Group::Symmetric { degree } => write!(f, "symmetric({degree})"),
            Group::Rational { names } => write!(f, "rational({})", names.len()),
            Group::Surface(s) => write!(
                f,
                "surface({}, genus={})",
                if s.orientable() {
                    "orientable"
                } else {
                    "nonorientable"
                },
                s.genus()
            ),
            Group::Direct(fs) | Group::FreeProduct(fs) => {
                let head = if matches!(self, Group::Direct(_)) {
                    "direct"
                } else {
                    "freeproduct"
                };
                let parts: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
                write!(f, "{head}({})", parts.join(", "))
            }
            Group::Semidirect(sd) => {
                let action: Vec<String> = sd
                    .base
                    .iter()
                    .zip(&sd.action_powers[1 % sd.action_powers.len()])
                    .map(|(n, w)| {
                        format!("{n}->{}", format_word(w, |g| sd.base[g as usize].clone()))
                    })
                    .collect();
                write!(
                    f,
                    "semidirect(free({}), cyclic({},{}), action{{{}}})",
                    sd.base.join(","),
                    sd.acting,
                    sd.order,
                    action.join(", ")
                )
            }
        }
    }
}

/// Projects away the rational (divisible) factors of a direct product.
pub fn quotient_group(g: &Group) -> Result<Group> {
    match g {
        Group::Direct(fs) if fs.iter().any(|f| matches!(f, Group::Rational { .. })) => {
            let rest: Vec<Group> = fs
                .iter()
                .filter(|f| !matches!(f, Group::Rational { .. }))
                .cloned()
                .collect();
            match rest.len() {
                0 => Err(Error::Precondition("quotient by Q is trivial".into())),
                1 => Ok(rest.into_iter().next().unwrap()),
                _ => Group::direct(rest),
            }
        }
        _ => Err(Error::Precondition(format!(
            "{g} has no designated rational factor Q"
        ))),
    }
}

/// Image of `x` in `G/Q` where `Q` is the product of the rational factors.
pub fn quotient_by_q(g: &Group, x: &Element) -> Result<Element> {
    let fs = match g {
        Group::Direct(fs) => fs,
        _ => return Err(Error::Precondition(format!("{g} has no designated Q"))),
    };
    quotient_group(g)?;
    match x {
        Element::Tuple(xs) if xs.len() == fs.len() => {
            let rest: Vec<Element> = fs
                .iter()
                .zip(xs)
                .filter(|(f, _)| !matches!(f, Group::Rational { .. }))
                .map(|(_, x)| x.clone())
                .collect();
            if rest.len() == 1 {
                Ok(rest.into_iter().next().unwrap())
            } else {
                Ok(Element::Tuple(rest))
            }
        }
        _ => Err(g.mismatch()),
    }
}

/// The `Q` component(s) of `x`, concatenated.
pub fn q_component(g: &Group, x: &Element) -> Result<Vec<BigRational>> {
    match (g, x) {
        (Group::Direct(fs), Element::Tuple(xs)) if xs.len() == fs.len() => {
            let mut out = Vec::new();
            for (f, x) in fs.iter().zip(xs) {
                if let (Group::Rational { .. }, Element::Vector(v)) = (f, x) {
                    out.extend(v.iter().cloned());
                }
            }
            Ok(out)
        }
        _ => Err(Error::Precondition(format!("{g} has no designated Q"))),
    }
}

/// Inverse of [`quotient_by_q`] on a section: attaches `q` as the rational part.
pub fn lift_with_q(g: &Group, k: &Element, q: &[BigRational]) -> Result<Element> {
    let fs = match g {
        Group::Direct(fs) => fs,
        _ => return Err(Error::Precondition(format!("{g} has no designated Q"))),
    };
    let non_q = fs
        .iter()
        .filter(|f| !matches!(f, Group::Rational { .. }))
        .count();
    let mut ks: Vec<Element> = if non_q == 1 {
        vec![k.clone()]
    } else {
        match k {
            Element::Tuple(parts) => parts.clone(),
            _ => return Err(g.mismatch()),
        }
    };
    ks.reverse();
    let mut q_iter = q.iter().cloned();
    let mut parts = Vec::with_capacity(fs.len());
    for f in fs {
        match f {
            Group::Rational { names } => {
                let v: Vec<BigRational> = (0..names.len())
                    .map(|_| q_iter.next().unwrap_or_else(BigRational::zero))
                    .collect();
                parts.push(Element::Vector(v));
            }
            _ => parts.push(ks.pop().ok_or_else(|| g.mismatch())?),
        }
    }
    let x = Element::Tuple(parts);
    g.check(&x)?;
    Ok(x)
}

/// The natural map from a free product onto the direct product of its
/// factors; its kernel is the cartesian subgroup.
pub fn free_product_projection(g: &Group, x: &Element) -> Result<Element> {
    match (g, x) {
        (Group::FreeProduct(fs), Element::Syllables(syl)) => {
            let mut parts: Vec<Element> = fs.iter().map(Group::identity).collect();
            for (f, e) in syl {
                let factor = fs.get(*f).ok_or_else(|| g.mismatch())?;
                parts[*f] = factor.mul(&parts[*f], e)?;
            }
            Ok(Element::Tuple(parts))
        }
        _ => Err(Error::Precondition(format!("{g} is not a free product"))),
    }
}

/// The direct product of the factors of a free product.
pub fn factor_product(g: &Group) -> Result<Group> {
    match g {
        Group::FreeProduct(fs) => Group::direct(fs.clone()),
        _ => Err(Error::Precondition(format!("{g} is not a free product"))),
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero_vector(v: &[BigRational]) -> bool {
    v.iter().all(|q| q.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_one() -> Group {
        Group::semidirect(
            &["b", "c"],
            "a",
            2,
            vec![Word::gen(0).inverse(), Word::gen(1)],
        )
        .unwrap()
    }

    fn pair(w: Word, e: u64) -> Element {
        Element::Semi(w, e)
    }

    #[test]
    fn example_one_identities() {
        let h = example_one();
        let b = Word::gen(0);
        let x = pair(b.clone(), 1);
        assert_eq!(h.power(&x, 2).unwrap(), h.identity());
        assert_eq!(h.mul(&x, &x).unwrap(), pair(Word::identity(), 0));
        let comm = h.commutator(&x, &pair(b.pow(2), 0)).unwrap();
        assert_eq!(comm, pair(b.pow(4), 0));
        // computed under [x,y] = x^-1 y^-1 x y
        let c2 = Word::syllable(1, 2);
        let comm = h.commutator(&x, &pair(c2.clone(), 0)).unwrap();
        assert_eq!(comm, pair(b.inverse().commutator(&c2), 0));
    }

    #[test]
    fn semidirect_rejects_bad_action() {
        // b -> c, c -> b c has infinite order
        let err = Group::semidirect(
            &["b", "c"],
            "a",
            2,
            vec![Word::gen(1), Word::gen(0).mul(&Word::gen(1))],
        );
        assert!(matches!(err, Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn free_product_arithmetic() {
        let g = Group::free_product(vec![
            Group::cyclic("s", 2).unwrap(),
            Group::cyclic("t", 3).unwrap(),
        ])
        .unwrap();
        let s = g.generator("s").unwrap();
        let t = g.generator("t").unwrap();
        assert!(g.is_identity(&g.mul(&s, &s).unwrap()).unwrap());
        let st = g.mul(&s, &t).unwrap();
        assert_eq!(g.element_order(&st).unwrap(), None);
        assert_eq!(g.element_order(&t).unwrap(), Some(3));
        let conj = g.conjugate(&t, &st).unwrap();
        assert_eq!(g.element_order(&conj).unwrap(), Some(3));
    }

    #[test]
    fn powers() {
        let z3 = Group::cyclic("s", 3).unwrap();
        let s = z3.generator("s").unwrap();
        assert_eq!(z3.power(&s, 4).unwrap(), s);
        let q = Group::rational(1);
        let x = Element::Vector(vec![rational(2, 3)]);
        assert_eq!(
            q.power(&x, -1).unwrap(),
            Element::Vector(vec![rational(-2, 3)])
        );
        assert_eq!(q.power(&x, 0).unwrap(), q.identity());
    }

    #[test]
    fn cross_group_operands() {
        let f = Group::free(&["b", "c"]);
        assert!(matches!(
            f.mul(&Element::Residue(1), &f.identity()),
            Err(Error::TypeMismatch(_))
        ));
    }

    #[test]
    fn symmetric_orders_and_formatting() {
        let s3 = Group::symmetric(3).unwrap();
        let s1 = s3.generator("s1").unwrap();
        let s2 = s3.generator("s2").unwrap();
        let r = s3.mul(&s1, &s2).unwrap();
        assert_eq!(s3.element_order(&r).unwrap(), Some(3));
        assert_eq!(s3.element_order(&s1).unwrap(), Some(2));
        assert_eq!(s3.format(&r), "s1*s2");
    }

    #[test]
    fn quotient_projection() {
        let h = Group::direct(vec![example_one(), Group::rational(1)]).unwrap();
        let x = Element::Tuple(vec![
            pair(Word::gen(0), 1),
            Element::Vector(vec![rational(2, 3)]),
        ]);
        assert_eq!(quotient_by_q(&h, &x).unwrap(), pair(Word::gen(0), 1));
        assert_eq!(
            quotient_by_q(&h, &h.identity()).unwrap(),
            example_one().identity()
        );
        let y = h.mul(&x, &x).unwrap();
        let k = example_one();
        assert_eq!(
            quotient_by_q(&h, &y).unwrap(),
            k.mul(
                &quotient_by_q(&h, &x).unwrap(),
                &quotient_by_q(&h, &x).unwrap()
            )
            .unwrap()
        );
        assert!(quotient_by_q(&example_one(), &k.identity()).is_err());
        assert_eq!(
            lift_with_q(&h, &pair(Word::gen(0), 1), &[rational(2, 3)]).unwrap(),
            x
        );
    }
}
