//! Laws, verbal subgroups sampled with generation witnesses, and the
//! hypothesis checks built on them.

use num::integer::Integer;
use rayon::prelude::*;
use serde_json::json;

use crate::eqsys::{Item, MixedWord, VarId};
use crate::error::{Error, Result};
use crate::freewords::{left_normed_commutator, Word};
use crate::groups::{
    factor_product, free_product_projection, Element, ElementSet, GeneratingSet, Group,
};
use crate::parse::parse_indexed_word;

/// A word `I(t1,...,tr)`; generator `k` of the word stands for `t{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawWord {
    word: Word,
    arity: usize,
}

impl LawWord {
    pub fn new(word: Word, arity: usize) -> Result<Self> {
        if let Some(g) = word.max_generator() {
            if g as usize >= arity {
                return Err(Error::InvalidArity {
                    expected: format!("letters among t1..t{arity}"),
                    got: g as usize + 1,
                });
            }
        }
        Ok(LawWord { word, arity })
    }

    /// `t^n`
    pub fn power(n: i64) -> Self {
        LawWord {
            word: Word::syllable(0, n),
            arity: 1,
        }
    }

    /// Parses a word over `t1, t2, ...`; a bare `t` means `t1`.
    pub fn parse(text: &str) -> Result<Self> {
        let (word, arity) = parse_indexed_word(text, 't')?;
        LawWord::new(word, arity)
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_trivial(&self) -> bool {
        self.word.is_identity()
    }

    pub fn evaluate(&self, group: &Group, tuple: &[Element]) -> Result<Element> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidArity {
                expected: self.arity.to_string(),
                got: tuple.len(),
            });
        }
        group.eval_word(&self.word, tuple)
    }

    /// `d` with `I(<x>) = <x^d>` in an infinite cyclic group: the gcd of
    /// the exponent sums of the letters.
    pub fn cyclic_exponent(&self) -> u64 {
        (0..self.arity as u32)
            .map(|g| self.word.exponent_sum(g).unsigned_abs())
            .fold(0, |a, b| a.gcd(&b))
    }

    /// A tuple on which the law fails, if any.
    pub fn counterexample(
        &self,
        group: &Group,
        elements: &[Element],
    ) -> Result<Option<Vec<Element>>> {
        for idx in tuples(elements.len(), self.arity) {
            let t: Vec<Element> = idx.iter().map(|&i| elements[i].clone()).collect();
            if !group.is_identity(&self.evaluate(group, &t)?)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }
}

impl std::fmt::Display for LawWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = crate::groups::format_word(&self.word, |g| format!("t{}", g + 1));
        f.write_str(&s)
    }
}

/// The left-normed commutator of the laws after renaming them apart.
pub fn build_free_product_law(laws: &[LawWord]) -> Result<LawWord> {
    if laws.len() < 2 {
        return Err(Error::Precondition(
            "a free-product law needs at least two factor laws".into(),
        ));
    }
    let mut offset = 0u32;
    let mut parts = Vec::with_capacity(laws.len());
    for law in laws {
        parts.push(law.word.shift(offset));
        offset += law.arity as u32;
    }
    LawWord::new(left_normed_commutator(&parts)?, offset as usize)
}

/// All index tuples of the given arity over `0..n`, lexicographic.
fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if arity == 0 {
        1
    } else {
        n.checked_pow(arity as u32).unwrap_or(0)
    };
    (0..total).map(move |mut k| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = k % n.max(1);
            k /= n.max(1);
        }
        t
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTerm {
    pub tuple: Vec<Element>,
    pub sign: i8,
}

/// `element = prod I(tuple)^sign` over the terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub element: Element,
    pub terms: Vec<WitnessTerm>,
}

impl Witness {
    pub fn single(group: &Group, law: &LawWord, tuple: Vec<Element>, sign: i8) -> Result<Self> {
        let v = law.evaluate(group, &tuple)?;
        let element = if sign < 0 { group.inv(&v)? } else { v };
        Ok(Witness {
            element,
            terms: vec![WitnessTerm { tuple, sign }],
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, group: &Group, law: &LawWord) -> Result<Element> {
        let mut acc = group.identity();
        for t in &self.terms {
            let v = law.evaluate(group, &t.tuple)?;
            acc = group.mul(&acc, &group.power(&v, t.sign as i64)?)?;
        }
        Ok(acc)
    }

    pub fn verify(&self, group: &Group, law: &LawWord) -> Result<bool> {
        group.equal(&self.evaluate(group, law)?, &self.element)
    }

    pub fn inverse(&self, group: &Group) -> Result<Witness> {
        Ok(Witness {
            element: group.inv(&self.element)?,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|t| WitnessTerm {
                    tuple: t.tuple.clone(),
                    sign: -t.sign,
                })
                .collect(),
        })
    }

    pub fn to_json(&self, group: &Group, law: &LawWord) -> serde_json::Value {
        json!({
            "element": group.format(&self.element),
            "expression": self.terms.iter().map(|t| {
                let args: Vec<String> = t.tuple.iter().map(|x| group.format(x)).collect();
                format!("{law}({})^{}", args.join(", "), t.sign)
            }).collect::<Vec<_>>(),
        })
    }
}

/// Finds a witness whose element equals `x` or `x^-1`, returning one for `x`.
pub fn find_witness(group: &Group, witnesses: &[Witness], x: &Element) -> Result<Option<Witness>> {
    for w in witnesses {
        if group.equal(&w.element, x)? {
            return Ok(Some(w.clone()));
        }
    }
    let xi = group.inv(x)?;
    for w in witnesses {
        if group.equal(&w.element, &xi)? {
            return Ok(Some(w.inverse(group)?));
        }
    }
    Ok(None)
}

fn verify_table(group: &Group, law: &LawWord, witnesses: &[Witness]) -> Result<()> {
    for w in witnesses {
        if !w.verify(group, law)? {
            return Err(Error::Verification(format!(
                "witness for {} does not evaluate to it",
                group.format(&w.element)
            )));
        }
    }
    Ok(())
}

/// Products of at most `length` law values and their inverses over tuples
/// from `ball(U, radius)`, each with a witness; ordered by witness length
/// and then by ball order. The identity comes first with the empty witness.
pub fn verbal_ball(
    group: &Group,
    law: &LawWord,
    u: &GeneratingSet,
    radius: usize,
    length: usize,
) -> Result<Vec<Witness>> {
    let ball = group.ball(u, radius)?;
    let idx: Vec<Vec<usize>> = tuples(ball.len(), law.arity).collect();
    let values: Vec<Result<Element>> = idx
        .par_iter()
        .map(|t| {
            let tuple: Vec<Element> = t.iter().map(|&i| ball.elements[i].clone()).collect();
            law.evaluate(group, &tuple)
        })
        .collect();

    let mut seen = ElementSet::new(group);
    let id = group.identity();
    seen.insert(&id)?;
    let mut out = vec![Witness {
        element: id,
        terms: Vec::new(),
    }];
    if length == 0 {
        return Ok(out);
    }
    let mut singles = Vec::new();
    for (t, v) in idx.iter().zip(values) {
        let v = v?;
        let tuple: Vec<Element> = t.iter().map(|&i| ball.elements[i].clone()).collect();
        for (x, sign) in [(v.clone(), 1i8), (group.inv(&v)?, -1)] {
            if seen.insert(&x)? {
                singles.push(Witness {
                    element: x,
                    terms: vec![WitnessTerm {
                        tuple: tuple.clone(),
                        sign,
                    }],
                });
            }
        }
    }
    out.extend(singles.iter().cloned());
    let mut frontier = singles.clone();
    for _ in 2..=length {
        let mut next = Vec::new();
        for w in &frontier {
            for s in &singles {
                let x = group.mul(&w.element, &s.element)?;
                if seen.insert(&x)? {
                    let mut terms = w.terms.clone();
                    terms.extend(s.terms.iter().cloned());
                    next.push(Witness { element: x, terms });
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    verify_table(group, law, &out)?;
    Ok(out)
}

/// A one-unknown word `E(x, constants)` with constants from a verbal
/// subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EWordTemplate {
    word: MixedWord,
}

impl EWordTemplate {
    pub fn new(word: MixedWord) -> Result<Self> {
        if word
            .items()
            .iter()
            .any(|it| matches!(it, Item::Var(v, _) if v.0 != 0))
        {
            return Err(Error::VariableMismatch(
                "templates use the single unknown ?x".into(),
            ));
        }
        Ok(EWordTemplate { word })
    }

    pub fn parse(text: &str, group: &Group) -> Result<Self> {
        let mut vars = vec!["x".to_string()];
        let w = crate::parse::parse_mixed(text, group, &mut vars)?;
        if vars.len() > 1 {
            return Err(Error::VariableMismatch(format!(
                "templates use the single unknown ?x, found ?{}",
                vars[1]
            )));
        }
        EWordTemplate::new(w)
    }

    pub fn word(&self) -> &MixedWord {
        &self.word
    }

    /// `E(w)`: the template with `x` replaced by `w`.
    pub fn instantiate(&self, group: &Group, w: &MixedWord) -> Result<MixedWord> {
        self.word.substitute(group, std::slice::from_ref(w))
    }

    /// `E(u)` for a group element `u`.
    pub fn value(&self, group: &Group, u: &Element) -> Result<Element> {
        self.word.evaluate(group, std::slice::from_ref(u))
    }

    pub fn format(&self, group: &Group) -> String {
        self.word.format(group, &["x".to_string()])
    }
}

/// Decides `E in I(<x>) . I(H)^(<x> * I(H))`: every constant must be
/// witnessed; killing them leaves `x^e`, which must lie in `<x^d>`.
pub fn e_word_membership(
    group: &Group,
    template: &EWordTemplate,
    law: &LawWord,
    witnesses: &[Witness],
) -> Result<bool> {
    verify_table(group, law, witnesses)?;
    for c in template.word.constants() {
        if find_witness(group, witnesses, c)?.is_none() {
            return Err(Error::Unwitnessed(format!(
                "constant {} of {} has no witness",
                group.format(c),
                template.format(group)
            )));
        }
    }
    let e = template
        .word
        .kill_constants()
        .exponent_sum(VarId(0).0 as u32);
    let d = law.cyclic_exponent() as i64;
    Ok(if d == 0 { e == 0 } else { e % d == 0 })
}

/// The center to compare a ball-centralizer against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Center {
    Trivial,
    /// The group is abelian.
    Whole,
    Elements(Vec<Element>),
}

#[derive(Debug, Clone)]
pub struct CentralizerReport {
    pub witnesses: Vec<Witness>,
    pub centralizer: Vec<Element>,
    pub center_in_ball: Vec<Element>,
    pub ball_size: usize,
    pub pass: bool,
}

impl CentralizerReport {
    pub fn to_json(&self, group: &Group, law: &LawWord) -> serde_json::Value {
        json!({
            "witnesses": self.witnesses.iter().map(|w| w.to_json(group, law)).collect::<Vec<_>>(),
            "centralizer": self.centralizer.iter().map(|x| group.format(x)).collect::<Vec<_>>(),
            "center_in_ball": self.center_in_ball.iter().map(|x| group.format(x)).collect::<Vec<_>>(),
            "ball_size": self.ball_size,
            "pass": self.pass,
        })
    }
}

/// Elements of `ball(U, radius)` commuting with every `f`.
pub fn common_ball_centralizer(
    group: &Group,
    fs: &[Element],
    u: &GeneratingSet,
    radius: usize,
) -> Result<(Vec<Element>, usize)> {
    let ball = group.ball(u, radius)?;
    let mut out = Vec::new();
    for x in &ball.elements {
        let mut all = true;
        for f in fs {
            if !group.commute(f, x)? {
                all = false;
                break;
            }
        }
        if all {
            out.push(x.clone());
        }
    }
    Ok((out, ball.len()))
}

/// Checks that the common centralizer of witnessed `fs` within the ball is
/// exactly the declared center within the ball.
pub fn check_common_centralizer(
    group: &Group,
    law: &LawWord,
    fs: &[Element],
    witnesses: &[Witness],
    u: &GeneratingSet,
    radius: usize,
    center: &Center,
) -> Result<CentralizerReport> {
    verify_table(group, law, witnesses)?;
    let mut used = Vec::new();
    for f in fs {
        used.push(
            find_witness(group, witnesses, f)?
                .ok_or_else(|| Error::Unwitnessed(format!("{} has no witness", group.format(f))))?,
        );
    }
    let (centralizer, ball_size) = common_ball_centralizer(group, fs, u, radius)?;
    let ball = group.ball(u, radius)?;
    let center_in_ball: Vec<Element> = match center {
        Center::Trivial => vec![group.identity()],
        Center::Whole => ball.elements.clone(),
        Center::Elements(zs) => {
            let mut set = ElementSet::new(group);
            for z in zs {
                set.insert(z)?;
            }
            let mut v = Vec::new();
            for x in &ball.elements {
                if set.contains(x)? {
                    v.push(x.clone());
                }
            }
            v
        }
    };
    let pass = same_set(group, &centralizer, &center_in_ball)?;
    Ok(CentralizerReport {
        witnesses: used,
        centralizer,
        center_in_ball,
        ball_size,
        pass,
    })
}

fn same_set(group: &Group, a: &[Element], b: &[Element]) -> Result<bool> {
    let mut sa = ElementSet::new(group);
    for x in a {
        sa.insert(x)?;
    }
    let mut sb = ElementSet::new(group);
    for x in b {
        sb.insert(x)?;
    }
    for x in a {
        if !sb.contains(x)? {
            return Ok(false);
        }
    }
    for x in b {
        if !sa.contains(x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The law `t^e` with `e` the exponent of a finite factor.
pub fn default_factor_law(g: &Group) -> Result<LawWord> {
    match g {
        Group::Cyclic { order, .. } => Ok(LawWord::power(*order as i64)),
        Group::Symmetric { degree } => {
            let e = (1..=*degree as i64).fold(1i64, |a, b| a.lcm(&b));
            Ok(LawWord::power(e))
        }
        _ => Err(Error::Precondition(format!(
            "{g} satisfies no nontrivial law of the supported kinds"
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct FreeProductReport {
    pub group: Group,
    pub law: LawWord,
    pub f1: Witness,
    pub f2: Witness,
    pub commutator_nontrivial: bool,
    pub in_cartesian: bool,
    pub centralizer: Vec<Element>,
    pub ball_size: usize,
    pub witnesses_searched: usize,
}

impl FreeProductReport {
    pub fn pass(&self) -> bool {
        self.commutator_nontrivial && self.in_cartesian && self.centralizer.len() == 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = &self.group;
        json!({
            "group": g.to_string(),
            "law": self.law.to_string(),
            "f1": self.f1.to_json(g, &self.law),
            "f2": self.f2.to_json(g, &self.law),
            "commutator_nontrivial": self.commutator_nontrivial,
            "in_cartesian_subgroup": self.in_cartesian,
            "common_ball_centralizer": self.centralizer.iter().map(|x| g.format(x)).collect::<Vec<_>>(),
            "ball_size": self.ball_size,
            "witnesses_searched": self.witnesses_searched,
            "pass": self.pass(),
        })
    }
}

/// Searches the verbal subgroup of the free-product law for a
/// non-commuting pair in the cartesian subgroup whose common centralizer in
/// the ball is trivial. Two factors of order 2 (the infinite dihedral
/// group) are rejected.
pub fn check_free_product(
    factors: &[Group],
    laws: Option<&[LawWord]>,
    radius: usize,
    length: usize,
) -> Result<FreeProductReport> {
    if factors.len() == 2
        && factors
            .iter()
            .all(|f| matches!(f, Group::Cyclic { order: 2, .. }))
    {
        return Err(Error::Precondition(
            "Z2*Z2 is the infinite dihedral group D_inf, which is excluded".into(),
        ));
    }
    let group = Group::free_product(factors.to_vec())?;
    let laws: Vec<LawWord> = match laws {
        Some(ls) => {
            if ls.len() != factors.len() {
                return Err(Error::InvalidArity {
                    expected: factors.len().to_string(),
                    got: ls.len(),
                });
            }
            ls.to_vec()
        }
        None => factors
            .iter()
            .map(default_factor_law)
            .collect::<Result<_>>()?,
    };
    let law = build_free_product_law(&laws)?;
    let u = group.default_generating_set()?;
    let witnesses = verbal_ball(&group, &law, &u, radius, length)?;
    let ball = group.ball(&u, radius)?;
    let target = factor_product(&group)?;
    let cartesian =
        |x: &Element| -> Result<bool> { target.is_identity(&free_product_projection(&group, x)?) };
    let candidates: Vec<&Witness> = witnesses
        .iter()
        .filter(|w| !group.is_identity(&w.element).unwrap_or(true))
        .collect();
    for (i, w1) in candidates.iter().enumerate() {
        for w2 in &candidates[i + 1..] {
            if group.commute(&w1.element, &w2.element)? {
                continue;
            }
            let mut centralizer = Vec::new();
            for x in &ball.elements {
                if group.commute(&w1.element, x)? && group.commute(&w2.element, x)? {
                    centralizer.push(x.clone());
                }
            }
            if centralizer.len() != 1 {
                continue;
            }
            let in_cartesian = cartesian(&w1.element)? && cartesian(&w2.element)?;
            return Ok(FreeProductReport {
                group: group.clone(),
                law,
                f1: (*w1).clone(),
                f2: (*w2).clone(),
                commutator_nontrivial: true,
                in_cartesian,
                centralizer,
                ball_size: ball.len(),
                witnesses_searched: witnesses.len(),
            });
        }
    }
    Err(Error::NotFound(format!(
        "no non-commuting pair with trivial common centralizer among {} witnessed elements",
        witnesses.len()
    )))
}
