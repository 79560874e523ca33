//! Equations over a group, coefficient elimination, exponent matrices and
//! reduction to diagonal form through the two word-level moves
//! `w_i -> w_i w_j^±1` and `x_i -> x_i x_j^±1`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::freewords::Word;
use crate::groups::{format_word, Element, Group};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    Var(VarId, i64),
    Const(Element),
}

/// A word mixing unknowns and group constants. Adjacent powers of the same
/// unknown are merged, adjacent constants are multiplied, identity
/// constants are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MixedWord {
    items: Vec<Item>,
}

impl MixedWord {
    pub fn identity() -> Self {
        MixedWord::default()
    }

    pub fn var(v: VarId) -> Self {
        MixedWord::var_power(v, 1)
    }

    pub fn var_power(v: VarId, exp: i64) -> Self {
        if exp == 0 {
            MixedWord::identity()
        } else {
            MixedWord {
                items: vec![Item::Var(v, exp)],
            }
        }
    }

    pub fn constant(group: &Group, x: Element) -> Result<Self> {
        let mut w = MixedWord::identity();
        w.push(group, Item::Const(x))?;
        Ok(w)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn is_identity(&self) -> bool {
        self.items.is_empty()
    }

    fn push(&mut self, group: &Group, item: Item) -> Result<()> {
        match item {
            Item::Var(_, 0) => {}
            Item::Var(v, e) => match self.items.last_mut() {
                Some(Item::Var(u, f)) if *u == v => {
                    *f += e;
                    if *f == 0 {
                        self.items.pop();
                    }
                }
                _ => self.items.push(Item::Var(v, e)),
            },
            Item::Const(x) => {
                if !group.contains(&x) {
                    return Err(Error::TypeMismatch(group.to_string()));
                }
                match self.items.last() {
                    Some(Item::Const(y)) => {
                        let p = group.mul(y, &x)?;
                        self.items.pop();
                        if !group.is_identity(&p)? {
                            self.items.push(Item::Const(p));
                        }
                    }
                    _ => {
                        if !group.is_identity(&x)? {
                            self.items.push(Item::Const(x));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_items<I>(group: &Group, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = Item>,
    {
        let mut w = MixedWord::identity();
        for it in items {
            w.push(group, it)?;
        }
        Ok(w)
    }

    pub fn mul(&self, group: &Group, other: &MixedWord) -> Result<MixedWord> {
        let mut w = self.clone();
        for it in &other.items {
            w.push(group, it.clone())?;
        }
        Ok(w)
    }

    pub fn inverse(&self, group: &Group) -> Result<MixedWord> {
        let mut w = MixedWord::identity();
        for it in self.items.iter().rev() {
            let inv = match it {
                Item::Var(v, e) => Item::Var(*v, -e),
                Item::Const(x) => Item::Const(group.inv(x)?),
            };
            w.push(group, inv)?;
        }
        Ok(w)
    }

    pub fn pow(&self, group: &Group, k: i64) -> Result<MixedWord> {
        let base = if k < 0 {
            self.inverse(group)?
        } else {
            self.clone()
        };
        let mut w = MixedWord::identity();
        for _ in 0..k.unsigned_abs() {
            w = w.mul(group, &base)?;
        }
        Ok(w)
    }

    /// `self^-1 other^-1 self other`
    pub fn commutator(&self, group: &Group, other: &MixedWord) -> Result<MixedWord> {
        self.inverse(group)?
            .mul(group, &other.inverse(group)?)?
            .mul(group, self)?
            .mul(group, other)
    }

    /// Value under the assignment `x_v = assignment[v]`.
    pub fn evaluate(&self, group: &Group, assignment: &[Element]) -> Result<Element> {
        let mut acc = group.identity();
        for it in &self.items {
            let factor = match it {
                Item::Var(v, e) => {
                    let x = assignment.get(v.0).ok_or_else(|| {
                        Error::VariableMismatch(format!("no value for variable {}", v.0))
                    })?;
                    group.power(x, *e)?
                }
                Item::Const(x) => x.clone(),
            };
            acc = group.mul(&acc, &factor)?;
        }
        Ok(acc)
    }

    /// Replaces every unknown `x_v` by `images[v]`.
    pub fn substitute(&self, group: &Group, images: &[MixedWord]) -> Result<MixedWord> {
        let mut w = MixedWord::identity();
        for it in &self.items {
            match it {
                Item::Var(v, e) => {
                    let img = images.get(v.0).ok_or_else(|| {
                        Error::VariableMismatch(format!("no image for variable {}", v.0))
                    })?;
                    w = w.mul(group, &img.pow(group, *e)?)?;
                }
                Item::Const(x) => w.push(group, Item::Const(x.clone()))?,
            }
        }
        Ok(w)
    }

    /// Renumbers unknowns.
    pub fn rename_vars<F>(&self, group: &Group, f: F) -> Result<MixedWord>
    where
        F: Fn(VarId) -> VarId,
    {
        MixedWord::from_items(
            group,
            self.items.iter().map(|it| match it {
                Item::Var(v, e) => Item::Var(f(*v), *e),
                Item::Const(x) => Item::Const(x.clone()),
            }),
        )
    }

    pub fn has_constants(&self) -> bool {
        self.items.iter().any(|it| matches!(it, Item::Const(_)))
    }

    pub fn constants(&self) -> impl Iterator<Item = &Element> {
        self.items.iter().filter_map(|it| match it {
            Item::Const(x) => Some(x),
            _ => None,
        })
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.items
            .iter()
            .filter_map(|it| match it {
                Item::Var(v, _) => Some(*v),
                _ => None,
            })
            .max()
    }

    /// The word in the free group on the unknowns, if there are no constants.
    pub fn as_var_word(&self) -> Option<Word> {
        let mut syllables = Vec::with_capacity(self.items.len());
        for it in &self.items {
            match it {
                Item::Var(v, e) => syllables.push((v.0 as u32, *e)),
                Item::Const(_) => return None,
            }
        }
        Some(Word::from_syllables(syllables))
    }

    pub fn from_var_word(w: &Word) -> MixedWord {
        MixedWord {
            items: w
                .syllables()
                .iter()
                .map(|&(g, e)| Item::Var(VarId(g.0 as usize), e))
                .collect(),
        }
    }

    /// Image under the projection that kills every constant.
    pub fn kill_constants(&self) -> Word {
        Word::from_syllables(self.items.iter().filter_map(|it| match it {
            Item::Var(v, e) => Some((v.0 as u32, *e)),
            Item::Const(_) => None,
        }))
    }

    pub fn format(&self, group: &Group, var_names: &[String]) -> String {
        if self.items.is_empty() {
            return "1".into();
        }
        self.items
            .iter()
            .map(|it| match it {
                Item::Var(v, e) => {
                    let name = var_names
                        .get(v.0)
                        .cloned()
                        .unwrap_or_else(|| format!("v{}", v.0));
                    if *e == 1 {
                        format!("?{name}")
                    } else {
                        format!("?{name}^{e}")
                    }
                }
                Item::Const(x) => {
                    let s = group.format(x);
                    if s.contains('*') && !s.starts_with('(') {
                        format!("({s})")
                    } else {
                        s
                    }
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: MixedWord,
    pub rhs: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub group: Group,
    pub variables: Vec<String>,
    pub equations: Vec<Equation>,
}

pub type Assignment = Vec<Element>;

impl EquationSystem {
    pub fn new(group: Group, variables: Vec<String>, equations: Vec<Equation>) -> Result<Self> {
        let sys = EquationSystem {
            group,
            variables,
            equations,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        for eq in &self.equations {
            if let Some(v) = eq.lhs.max_var() {
                if v.0 >= self.variables.len() {
                    return Err(Error::VariableMismatch(format!(
                        "variable {} is not declared",
                        v.0
                    )));
                }
            }
            if !self.group.contains(&eq.rhs) {
                return Err(Error::TypeMismatch(self.group.to_string()));
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn has_constants(&self) -> bool {
        self.equations.iter().any(|e| e.lhs.has_constants())
    }

    fn check_assignment(&self, assignment: &[Element]) -> Result<()> {
        if assignment.len() != self.variables.len() {
            return Err(Error::VariableMismatch(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.variables.len()
            )));
        }
        Ok(())
    }

    /// Whether each equation holds under the assignment.
    pub fn evaluate(&self, assignment: &[Element]) -> Result<Vec<bool>> {
        self.check_assignment(assignment)?;
        self.equations
            .iter()
            .map(|eq| {
                let value = eq.lhs.evaluate(&self.group, assignment)?;
                self.group.equal(&value, &eq.rhs)
            })
            .collect()
    }

    pub fn is_solution(&self, assignment: &[Element]) -> Result<bool> {
        Ok(self.evaluate(assignment)?.into_iter().all(|b| b))
    }

    pub fn format_equation(&self, eq: &Equation) -> String {
        format!(
            "{} = {}",
            eq.lhs.format(&self.group, &self.variables),
            self.group.format(&eq.rhs)
        )
    }

    pub fn format_assignment(&self, assignment: &[Element]) -> Vec<(String, String)> {
        self.variables
            .iter()
            .zip(assignment)
            .map(|(n, x)| (n.clone(), self.group.format(x)))
            .collect()
    }

    /// A variable name not yet used, `prefix1`, `prefix2`, ...
    pub fn fresh_name(&self, prefix: &str) -> String {
        (1..)
            .map(|i| format!("{prefix}{i}"))
            .find(|n| !self.variables.contains(n))
            .unwrap()
    }

    fn lhs_words(&self) -> Result<Vec<Word>> {
        self.equations
            .iter()
            .map(|eq| {
                eq.lhs.as_var_word().ok_or_else(|| {
                    Error::Precondition("left-hand sides must be coefficient-free".into())
                })
            })
            .collect()
    }
}

/// Replaces each distinct constant (identified with its inverse) by a fresh
/// unknown `z` and appends the equation `z = h`.
pub fn eliminate_coefficients(sys: &EquationSystem) -> Result<EquationSystem> {
    let group = &sys.group;
    let mut out = sys.clone();
    let mut classes: Vec<(Element, VarId)> = Vec::new();
    for (i, eq) in sys.equations.iter().enumerate() {
        let mut items = Vec::with_capacity(eq.lhs.items().len());
        for it in eq.lhs.items() {
            match it {
                Item::Var(v, e) => items.push(Item::Var(*v, *e)),
                Item::Const(h) => {
                    let mut found = None;
                    for (c, z) in &classes {
                        if group.equal(h, c)? {
                            found = Some(Item::Var(*z, 1));
                            break;
                        }
                        if group.equal(&group.inv(h)?, c)? {
                            found = Some(Item::Var(*z, -1));
                            break;
                        }
                    }
                    let item = match found {
                        Some(item) => item,
                        None => {
                            let z = VarId(out.variables.len());
                            let name = out.fresh_name("z");
                            out.variables.push(name);
                            classes.push((h.clone(), z));
                            Item::Var(z, 1)
                        }
                    };
                    items.push(item);
                }
            }
        }
        out.equations[i].lhs = MixedWord::from_items(group, items)?;
    }
    for (h, z) in classes {
        out.equations.push(Equation {
            lhs: MixedWord::var(z),
            rhs: h,
        });
    }
    Ok(out)
}

/// Entry `(i, k)` is the exponent sum of unknown `k` in equation `i`.
pub fn exponent_matrix(sys: &EquationSystem) -> Result<Vec<Vec<i64>>> {
    let n = sys.num_vars();
    Ok(sys
        .lhs_words()?
        .iter()
        .map(|w| w.exponent_vector().dense(n))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// `w_target -> w_target w_source^sign`, `h_target -> h_target h_source^sign`
    Row {
        target: usize,
        source: usize,
        sign: i8,
    },
    /// `x_target -> x_target x_source^sign`
    Var {
        target: usize,
        source: usize,
        sign: i8,
    },
    /// `x_var -> x_var^-1`
    Invert { var: usize },
}

/// Ordered record of the moves taking a system to its diagonal form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionLog {
    pub moves: Vec<Move>,
}

pub fn apply_move(sys: &mut EquationSystem, mv: Move) -> Result<()> {
    let group = sys.group.clone();
    let n = sys.num_vars();
    let m = sys.equations.len();
    match mv {
        Move::Row {
            target,
            source,
            sign,
        } => {
            if target >= m || source >= m || target == source {
                return Err(Error::Precondition(format!("invalid row move {mv:?}")));
            }
            let src = sys.equations[source].clone();
            let lhs = src.lhs.pow(&group, sign as i64)?;
            let rhs = group.power(&src.rhs, sign as i64)?;
            let eq = &mut sys.equations[target];
            eq.lhs = eq.lhs.mul(&group, &lhs)?;
            eq.rhs = group.mul(&eq.rhs, &rhs)?;
        }
        Move::Var {
            target,
            source,
            sign,
        } => {
            if target >= n || source >= n || target == source {
                return Err(Error::Precondition(format!("invalid variable move {mv:?}")));
            }
            let mut images: Vec<MixedWord> = (0..n).map(|v| MixedWord::var(VarId(v))).collect();
            images[target] = MixedWord::var(VarId(target))
                .mul(&group, &MixedWord::var_power(VarId(source), sign as i64))?;
            for eq in &mut sys.equations {
                eq.lhs = eq.lhs.substitute(&group, &images)?;
            }
        }
        Move::Invert { var } => {
            if var >= n {
                return Err(Error::Precondition(format!("invalid inversion {mv:?}")));
            }
            let mut images: Vec<MixedWord> = (0..n).map(|v| MixedWord::var(VarId(v))).collect();
            images[var] = MixedWord::var_power(VarId(var), -1);
            for eq in &mut sys.equations {
                eq.lhs = eq.lhs.substitute(&group, &images)?;
            }
        }
    }
    Ok(())
}

impl SubstitutionLog {
    pub fn replay(&self, sys: &EquationSystem) -> Result<EquationSystem> {
        let mut out = sys.clone();
        for mv in &self.moves {
            apply_move(&mut out, *mv)?;
        }
        Ok(out)
    }

    /// Carries a solution of the original system to one of the reduced system.
    pub fn map_forward(&self, group: &Group, assignment: &[Element]) -> Result<Assignment> {
        let mut a = assignment.to_vec();
        for mv in &self.moves {
            match *mv {
                Move::Row { .. } => {}
                Move::Var {
                    target,
                    source,
                    sign,
                } => {
                    check_index(&a, target.max(source))?;
                    let s = group.power(&a[source], -(sign as i64))?;
                    a[target] = group.mul(&a[target], &s)?;
                }
                Move::Invert { var } => {
                    check_index(&a, var)?;
                    a[var] = group.inv(&a[var])?;
                }
            }
        }
        Ok(a)
    }

    /// Carries a solution of the reduced system back to the original system.
    pub fn map_back(&self, group: &Group, assignment: &[Element]) -> Result<Assignment> {
        let mut a = assignment.to_vec();
        for mv in self.moves.iter().rev() {
            match *mv {
                Move::Row { .. } => {}
                Move::Var {
                    target,
                    source,
                    sign,
                } => {
                    check_index(&a, target.max(source))?;
                    let s = group.power(&a[source], sign as i64)?;
                    a[target] = group.mul(&a[target], &s)?;
                }
                Move::Invert { var } => {
                    check_index(&a, var)?;
                    a[var] = group.inv(&a[var])?;
                }
            }
        }
        Ok(a)
    }
}

fn check_index(a: &[Element], idx: usize) -> Result<()> {
    if idx < a.len() {
        Ok(())
    } else {
        Err(Error::VariableMismatch(format!(
            "assignment has {} values, move needs index {idx}",
            a.len()
        )))
    }
}

/// `x_var^multiplicity * tail = h` for the equation at `equation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Head {
    pub equation: usize,
    pub var: VarId,
    pub multiplicity: u64,
    pub tail: Word,
}

/// `word = h`, with `word` in the derived subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureEquation {
    pub equation: usize,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    /// The reduced system; equation indices below refer to it.
    pub system: EquationSystem,
    pub heads: Vec<Head>,
    pub pure: Vec<PureEquation>,
}

impl DiagonalForm {
    pub fn to_json(&self) -> serde_json::Value {
        let sys = &self.system;
        let var_name = |g: u32| format!("?{}", sys.variables[g as usize]);
        json!({
            "group": sys.group.to_string(),
            "variables": sys.variables,
            "heads": self.heads.iter().map(|h| json!({
                "equation": h.equation,
                "variable": sys.variables[h.var.0],
                "multiplicity": h.multiplicity,
                "tail": format_word(&h.tail, var_name),
                "rhs": sys.group.format(&sys.equations[h.equation].rhs),
            })).collect::<Vec<_>>(),
            "pure": self.pure.iter().map(|p| json!({
                "equation": p.equation,
                "word": format_word(&p.word, var_name),
                "rhs": sys.group.format(&sys.equations[p.equation].rhs),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Minimal-pivot Euclidean diagonalization of the exponent matrix, carried
/// out on the words themselves so that the log replays exactly.
pub fn reduce_to_diagonal(sys: &EquationSystem) -> Result<(DiagonalForm, SubstitutionLog)> {
    let mut work = sys.clone();
    let mut matrix = exponent_matrix(&work)?;
    let rows = matrix.len();
    let cols = work.num_vars();
    let mut log = SubstitutionLog::default();
    let mut row_active = vec![true; rows];
    let mut col_active = vec![true; cols];
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    let record = |work: &mut EquationSystem,
                  matrix: &mut Vec<Vec<i64>>,
                  log: &mut SubstitutionLog,
                  mv: Move|
     -> Result<()> {
        apply_move(work, mv)?;
        match mv {
            Move::Row {
                target,
                source,
                sign,
            } => {
                let src = matrix[source].clone();
                for (t, s) in matrix[target].iter_mut().zip(src) {
                    *t += sign as i64 * s;
                }
            }
            Move::Var {
                target,
                source,
                sign,
            } => {
                for row in matrix.iter_mut() {
                    row[source] += sign as i64 * row[target];
                }
            }
            Move::Invert { var } => {
                for row in matrix.iter_mut() {
                    row[var] = -row[var];
                }
            }
        }
        log.moves.push(mv);
        Ok(())
    };

    loop {
        let pivot = (0..rows)
            .filter(|&i| row_active[i])
            .flat_map(|i| (0..cols).map(move |k| (i, k)))
            .filter(|&(i, k)| col_active[k] && matrix[i][k] != 0)
            .min_by_key(|&(i, k)| (matrix[i][k].abs(), i, k));
        let Some((pi, pk)) = pivot else { break };
        let p = matrix[pi][pk];

        for r in (0..rows).filter(|&r| r != pi && row_active[r]) {
            let q = matrix[r][pk] / p;
            let sign = -q.signum() as i8;
            for _ in 0..q.abs() {
                record(
                    &mut work,
                    &mut matrix,
                    &mut log,
                    Move::Row {
                        target: r,
                        source: pi,
                        sign,
                    },
                )?;
            }
        }
        for c in (0..cols).filter(|&c| c != pk && col_active[c]) {
            let q = matrix[pi][c] / p;
            let sign = -q.signum() as i8;
            for _ in 0..q.abs() {
                record(
                    &mut work,
                    &mut matrix,
                    &mut log,
                    Move::Var {
                        target: pk,
                        source: c,
                        sign,
                    },
                )?;
            }
        }

        let column_clear = (0..rows).all(|r| r == pi || !row_active[r] || matrix[r][pk] == 0);
        let row_clear = (0..cols).all(|c| c == pk || !col_active[c] || matrix[pi][c] == 0);
        if column_clear && row_clear {
            if p < 0 {
                record(&mut work, &mut matrix, &mut log, Move::Invert { var: pk })?;
            }
            row_active[pi] = false;
            col_active[pk] = false;
            pivots.push((pi, pk));
        }
    }

    let words = work.lhs_words()?;
    let mut heads = Vec::new();
    for &(i, k) in &pivots {
        let m = matrix[i][k];
        debug_assert!(m > 0);
        let tail = Word::syllable(k as u32, -m).mul(&words[i]);
        heads.push(Head {
            equation: i,
            var: VarId(k),
            multiplicity: m as u64,
            tail,
        });
    }
    heads.sort_by_key(|h| h.equation);
    let pure = (0..rows)
        .filter(|i| !pivots.iter().any(|&(pi, _)| pi == *i))
        .map(|i| PureEquation {
            equation: i,
            word: words[i].clone(),
        })
        .collect();
    Ok((
        DiagonalForm {
            system: work,
            heads,
            pure,
        },
        log,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z6() -> Group {
        Group::cyclic("g", 6).unwrap()
    }

    fn var_word(syl: &[(u32, i64)]) -> MixedWord {
        MixedWord::from_var_word(&Word::from_syllables(syl.iter().copied()))
    }

    fn system(group: Group, nvars: usize, eqs: Vec<(MixedWord, Element)>) -> EquationSystem {
        EquationSystem::new(
            group,
            (1..=nvars).map(|i| format!("x{i}")).collect(),
            eqs.into_iter()
                .map(|(lhs, rhs)| Equation { lhs, rhs })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn exponent_matrices() {
        let g = z6();
        let h = Element::Residue(1);
        let s = system(g.clone(), 2, vec![(var_word(&[(0, 1), (1, 1)]), h.clone())]);
        assert_eq!(exponent_matrix(&s).unwrap(), vec![vec![1, 1]]);
        let s = system(g.clone(), 1, vec![(var_word(&[(0, 2)]), h.clone())]);
        assert_eq!(exponent_matrix(&s).unwrap(), vec![vec![2]]);
        let s = system(
            g,
            2,
            vec![
                (var_word(&[(0, 2), (1, 2)]), h.clone()),
                (var_word(&[(0, 1), (1, 1)]), h),
            ],
        );
        assert_eq!(exponent_matrix(&s).unwrap(), vec![vec![2, 2], vec![1, 1]]);
    }

    #[test]
    fn already_diagonal_is_unchanged() {
        let s = system(z6(), 1, vec![(var_word(&[(0, 2)]), Element::Residue(4))]);
        let (d, log) = reduce_to_diagonal(&s).unwrap();
        assert!(log.moves.is_empty());
        assert_eq!(d.system, s);
        assert_eq!(d.heads.len(), 1);
        assert_eq!(d.heads[0].multiplicity, 2);
        assert!(d.heads[0].tail.is_identity());
    }

    #[test]
    fn product_of_two_unknowns() {
        let s = system(
            z6(),
            2,
            vec![(var_word(&[(0, 1), (1, 1)]), Element::Residue(1))],
        );
        let (d, log) = reduce_to_diagonal(&s).unwrap();
        assert_eq!(
            log.moves,
            vec![Move::Var {
                target: 0,
                source: 1,
                sign: -1
            }]
        );
        assert_eq!(d.heads.len(), 1);
        assert_eq!(d.heads[0].var, VarId(0));
        assert!(d.heads[0].tail.is_identity());
        assert_eq!(log.replay(&s).unwrap(), d.system);
    }

    #[test]
    fn negative_pivot_is_inverted() {
        let s = system(z6(), 1, vec![(var_word(&[(0, -3)]), Element::Residue(3))]);
        let (d, log) = reduce_to_diagonal(&s).unwrap();
        assert_eq!(log.moves, vec![Move::Invert { var: 0 }]);
        assert_eq!(d.heads[0].multiplicity, 3);
    }

    #[test]
    fn map_forward_substitution() {
        let g = z6();
        let log = SubstitutionLog {
            moves: vec![Move::Var {
                target: 0,
                source: 1,
                sign: -1,
            }],
        };
        let a = vec![Element::Residue(2), Element::Residue(3)];
        let f = log.map_forward(&g, &a).unwrap();
        assert_eq!(f, vec![Element::Residue(5), Element::Residue(3)]);
        assert_eq!(log.map_back(&g, &f).unwrap(), a);
        assert_eq!(SubstitutionLog::default().map_forward(&g, &a).unwrap(), a);
        assert!(matches!(
            log.map_forward(&g, &a[..1]),
            Err(Error::VariableMismatch(_))
        ));
    }

    #[test]
    fn coefficient_free_elimination_is_identity() {
        let s = system(z6(), 1, vec![(var_word(&[(0, 2)]), Element::Residue(4))]);
        assert_eq!(eliminate_coefficients(&s).unwrap(), s);
    }

    #[test]
    fn coefficients_are_shared_with_inverses() {
        let g = Group::free(&["b", "c"]);
        let h1 = Element::Word(Word::gen(0));
        let h2 = Element::Word(Word::gen(1));
        let x = MixedWord::var(VarId(0));
        let y = MixedWord::var(VarId(1));
        let xn = MixedWord::var_power(VarId(0), 5);
        let lhs = x
            .mul(&g, &y)
            .unwrap()
            .mul(&g, &MixedWord::constant(&g, h1.clone()).unwrap())
            .unwrap()
            .mul(
                &g,
                &xn.commutator(&g, &MixedWord::constant(&g, h2.clone()).unwrap())
                    .unwrap(),
            )
            .unwrap()
            .mul(&g, &y.inverse(&g).unwrap())
            .unwrap();
        let s = system(g.clone(), 2, vec![(lhs, g.identity())]);
        let out = eliminate_coefficients(&s).unwrap();
        assert_eq!(out.variables, vec!["x1", "x2", "z1", "z2"]);
        assert_eq!(out.equations.len(), 3);
        let z = MixedWord::var(VarId(2));
        let t = MixedWord::var(VarId(3));
        let expected = x
            .mul(&g, &y)
            .unwrap()
            .mul(&g, &z)
            .unwrap()
            .mul(&g, &xn.commutator(&g, &t.inverse(&g).unwrap()).unwrap())
            .unwrap()
            .mul(&g, &y.inverse(&g).unwrap())
            .unwrap();
        assert_eq!(out.equations[0].lhs, expected);
        assert_eq!(out.equations[1].rhs, h1);
        // the first occurrence of the class is h2^-1
        assert_eq!(out.equations[2].rhs, g.inv(&h2).unwrap());
    }
}
