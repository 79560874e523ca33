//! Replacing verbal constants by law words in fresh unknowns, and
//! collapsing a system to one equation with a candidate Lee word.

use serde_json::json;

use crate::eqsys::{Equation, EquationSystem, Item, MixedWord, VarId};
use crate::error::{Error, Result};
use crate::freewords::Word;
use crate::groups::{Element, Group};
use crate::parse::parse_indexed_word;
use crate::verbal::{find_witness, LawWord, Witness};

/// A word `L(z1,...,zm)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeeCandidate {
    word: Word,
    arity: usize,
}

impl LeeCandidate {
    pub fn new(word: Word, arity: usize) -> Result<Self> {
        if let Some(g) = word.max_generator() {
            if g as usize >= arity {
                return Err(Error::InvalidArity {
                    expected: format!("letters among z1..z{arity}"),
                    got: g as usize + 1,
                });
            }
        }
        Ok(LeeCandidate { word, arity })
    }

    /// Parses a word over `z1, z2, ...`; the arity defaults to the largest
    /// index used.
    pub fn parse(text: &str, arity: Option<usize>) -> Result<Self> {
        let (word, used) = parse_indexed_word(text, 'z')?;
        LeeCandidate::new(word, arity.unwrap_or(used))
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `L(v_1,...,v_m)` in a free group.
    pub fn evaluate_free(&self, tuple: &[Word]) -> Result<Word> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidArity {
                expected: self.arity.to_string(),
                got: tuple.len(),
            });
        }
        Ok(self.word.substitute(|g| tuple[g.0 as usize].clone()))
    }
}

impl std::fmt::Display for LeeCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = crate::groups::format_word(&self.word, |g| format!("z{}", g + 1));
        f.write_str(&s)
    }
}

/// One replaced constant `h` and the unknowns of its law word `t(y) = h`.
#[derive(Debug, Clone)]
pub struct WitnessBlock {
    pub element: Element,
    pub witness: Witness,
    pub vars: Vec<VarId>,
    /// True for elements added only to make the witnessed set non-cyclic.
    pub augmentation: bool,
}

#[derive(Debug, Clone)]
pub struct SmlS1 {
    pub system: EquationSystem,
    pub blocks: Vec<WitnessBlock>,
    pub original_vars: usize,
    pub original_equations: usize,
}

impl SmlS1 {
    /// Values of the fresh unknowns taken from the witness tuples.
    pub fn witness_values(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for t in &b.witness.terms {
                out.extend(t.tuple.iter().cloned());
            }
        }
        out
    }

    /// Extends a solution of the input system by the witness tuples.
    pub fn extend(&self, assignment: &[Element]) -> Vec<Element> {
        let mut a = assignment.to_vec();
        a.extend(self.witness_values());
        a
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = &self.system.group;
        json!({
            "equations": self.system.equations.iter().map(|e| self.system.format_equation(e)).collect::<Vec<_>>(),
            "blocks": self.blocks.iter().map(|b| json!({
                "element": g.format(&b.element),
                "unknowns": b.vars.iter().map(|v| self.system.variables[v.0].clone()).collect::<Vec<_>>(),
                "augmentation": b.augmentation,
            })).collect::<Vec<_>>(),
        })
    }
}

/// True when the elements certainly do not lie in one cyclic subgroup:
/// some pair fails to commute, or (in a free group) two nontrivial ones
/// have different primitive roots.
pub fn certainly_noncyclic(group: &Group, xs: &[Element]) -> Result<bool> {
    for (i, x) in xs.iter().enumerate() {
        for y in &xs[i + 1..] {
            if !group.commute(x, y)? {
                return Ok(true);
            }
        }
    }
    if let Group::Free { .. } = group {
        let mut root: Option<Word> = None;
        for x in xs {
            if let Element::Word(w) = x {
                if w.is_identity() {
                    continue;
                }
                let r = w.primitive_root()?.0.canonical_up_to_inverse();
                match &root {
                    Some(r0) if *r0 != r => return Ok(true),
                    None => root = Some(r),
                    _ => {}
                }
            }
        }
    }
    Ok(false)
}

fn law_word_in(
    group: &Group,
    law: &LawWord,
    witness: &Witness,
    first_var: usize,
) -> Result<MixedWord> {
    let mut w = MixedWord::identity();
    let mut next = first_var;
    for t in &witness.terms {
        let vars: Vec<MixedWord> = (0..law.arity())
            .map(|k| MixedWord::var(VarId(next + k)))
            .collect();
        next += law.arity();
        let value = MixedWord::from_var_word(law.word()).substitute(group, &vars)?;
        w = w.mul(group, &value.pow(group, t.sign as i64)?)?;
    }
    Ok(w)
}

/// Replaces every constant `h` of the left-hand sides by `t(y)` read off
/// its witness and adds `t(y) = h`. When the witnessed elements might
/// generate a cyclic subgroup, two elements from `augment` are added so
/// that they do not.
pub fn build_sml_s1(
    sys: &EquationSystem,
    law: &LawWord,
    witnesses: &[Witness],
    augment: &[Witness],
) -> Result<SmlS1> {
    let g = &sys.group;
    for w in witnesses.iter().chain(augment) {
        if !w.verify(g, law)? {
            return Err(Error::Verification(format!(
                "witness for {} does not evaluate to it",
                g.format(&w.element)
            )));
        }
    }
    let mut out = sys.clone();
    let mut blocks: Vec<WitnessBlock> = Vec::new();

    let add_block = |out: &mut EquationSystem,
                     blocks: &mut Vec<WitnessBlock>,
                     witness: Witness,
                     augmentation: bool|
     -> Result<usize> {
        let start = out.variables.len();
        let count = witness.terms.len() * law.arity();
        for _ in 0..count {
            let name = out.fresh_name("y");
            out.variables.push(name);
        }
        blocks.push(WitnessBlock {
            element: witness.element.clone(),
            vars: (start..start + count).map(VarId).collect(),
            witness,
            augmentation,
        });
        Ok(blocks.len() - 1)
    };

    for i in 0..sys.equations.len() {
        let mut items = Vec::new();
        for it in sys.equations[i].lhs.items() {
            match it {
                Item::Var(v, e) => items.push(Item::Var(*v, *e)),
                Item::Const(h) => {
                    let mut existing = None;
                    for (k, b) in blocks.iter().enumerate() {
                        if g.equal(&b.element, h)? {
                            existing = Some((k, 1));
                            break;
                        }
                        if g.equal(&g.inv(&b.element)?, h)? {
                            existing = Some((k, -1));
                            break;
                        }
                    }
                    let (k, sign) = match existing {
                        Some(found) => found,
                        None => {
                            let w = find_witness(g, witnesses, h)?.ok_or_else(|| {
                                Error::Unwitnessed(format!(
                                    "constant {} has no witness",
                                    g.format(h)
                                ))
                            })?;
                            (add_block(&mut out, &mut blocks, w, false)?, 1)
                        }
                    };
                    let b = &blocks[k];
                    let t = law_word_in(g, law, &b.witness, b.vars[0].0)?.pow(g, sign)?;
                    items.extend(t.items().iter().cloned());
                }
            }
        }
        out.equations[i].lhs = MixedWord::from_items(g, items)?;
    }

    let elements: Vec<Element> = blocks.iter().map(|b| b.element.clone()).collect();
    if !certainly_noncyclic(g, &elements)? {
        let mut chosen = None;
        'search: for (i, a) in augment.iter().enumerate() {
            for b in &augment[i + 1..] {
                let mut xs = elements.clone();
                xs.push(a.element.clone());
                xs.push(b.element.clone());
                if certainly_noncyclic(g, &xs)? {
                    chosen = Some((a.clone(), b.clone()));
                    break 'search;
                }
            }
        }
        let (a, b) = chosen.ok_or_else(|| {
            Error::NotFound("no augmentation makes the witnessed elements non-cyclic".into())
        })?;
        add_block(&mut out, &mut blocks, a, true)?;
        add_block(&mut out, &mut blocks, b, true)?;
    }

    for b in &blocks {
        let lhs = if b.vars.is_empty() {
            MixedWord::identity()
        } else {
            law_word_in(g, law, &b.witness, b.vars[0].0)?
        };
        out.equations.push(Equation {
            lhs,
            rhs: b.element.clone(),
        });
    }
    out.validate()?;
    Ok(SmlS1 {
        system: out,
        blocks,
        original_vars: sys.num_vars(),
        original_equations: sys.equations.len(),
    })
}

/// `L(u_1,...,u_N) = L(f_1,...,f_N)` for the equations `u_i = f_i`.
pub fn lee_collapse(sys: &EquationSystem, lee: &LeeCandidate) -> Result<Equation> {
    let n = sys.equations.len();
    if lee.arity() != n {
        return Err(Error::InvalidArity {
            expected: n.to_string(),
            got: lee.arity(),
        });
    }
    let g = &sys.group;
    let lhs_images: Vec<MixedWord> = sys.equations.iter().map(|e| e.lhs.clone()).collect();
    let rhs_images: Vec<Element> = sys.equations.iter().map(|e| e.rhs.clone()).collect();
    Ok(Equation {
        lhs: MixedWord::from_var_word(lee.word()).substitute(g, &lhs_images)?,
        rhs: g.eval_word(lee.word(), &rhs_images)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_element, parse_system};

    fn f2() -> Group {
        Group::free(&["b", "c"])
    }

    fn witness(g: &Group, law: &LawWord, s: &str) -> Witness {
        Witness::single(g, law, vec![parse_element(s, g).unwrap()], 1).unwrap()
    }

    #[test]
    fn square_constant_becomes_square_unknown() {
        let g = f2();
        let law = LawWord::power(2);
        let sys = parse_system("?x*b^2 = c", Some(&g)).unwrap();
        let table = vec![witness(&g, &law, "b")];
        let augment = vec![witness(&g, &law, "c"), witness(&g, &law, "b c")];
        let s1 = build_sml_s1(&sys, &law, &table, &augment).unwrap();
        let lines: Vec<String> = s1
            .system
            .equations
            .iter()
            .map(|e| s1.system.format_equation(e))
            .collect();
        assert_eq!(lines[0], "?x*?y1^2 = c");
        assert_eq!(lines[1], "?y1^2 = b^2");
        assert!(!s1.blocks[0].augmentation);
        assert!(s1.blocks[1..].iter().all(|b| b.augmentation));
        let x = parse_element("c b^-2", &g).unwrap();
        assert!(s1.system.is_solution(&s1.extend(&[x])).unwrap());
    }

    #[test]
    fn constant_free_system_gets_only_augmentation() {
        let g = f2();
        let law = LawWord::power(2);
        let sys = parse_system("?x^2 = b^2", Some(&g)).unwrap();
        let augment = vec![witness(&g, &law, "b"), witness(&g, &law, "c")];
        let s1 = build_sml_s1(&sys, &law, &[], &augment).unwrap();
        assert_eq!(s1.system.equations.len(), 3);
        assert!(s1.blocks.iter().all(|b| b.augmentation));
        assert!(matches!(
            build_sml_s1(&sys, &law, &[], &augment[..1]),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn independent_squares_need_no_augmentation() {
        let g = f2();
        let law = LawWord::power(2);
        let sys = parse_system("?x*b^2*?x^-1*c^2 = 1", Some(&g)).unwrap();
        let table = vec![witness(&g, &law, "b"), witness(&g, &law, "c")];
        let s1 = build_sml_s1(&sys, &law, &table, &[]).unwrap();
        assert_eq!(s1.blocks.len(), 2);
        assert_eq!(s1.system.equations.len(), 3);
        assert!(matches!(
            build_sml_s1(&sys, &law, &table[..1], &[]),
            Err(Error::Unwitnessed(_))
        ));
    }

    #[test]
    fn collapse_with_commutator() {
        let g = f2();
        let sys = parse_system("?x = b\n?y = c", Some(&g)).unwrap();
        let lee = LeeCandidate::parse("[z1, z2]", None).unwrap();
        let eq = lee_collapse(&sys, &lee).unwrap();
        assert_eq!(eq.rhs, parse_element("[b, c]", &g).unwrap());
        let one = LeeCandidate::parse("z1", None).unwrap();
        let single = parse_system("?x^2 = b^2", Some(&g)).unwrap();
        assert_eq!(lee_collapse(&single, &one).unwrap(), single.equations[0]);
        assert!(lee_collapse(&single, &lee).is_err());
    }
}
