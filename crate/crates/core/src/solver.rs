//! Bounded brute-force search for solutions inside Cayley balls.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::eqsys::{Assignment, DiagonalForm, Equation, EquationSystem, Item, MixedWord};
use crate::error::{Error, Result};
use crate::groups::{quotient_by_q, quotient_group, Ball, Element, GeneratingSet, Group};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub solutions: Vec<Assignment>,
    pub radius: usize,
    /// True when the ball is the whole group, so the list is the full
    /// solution set.
    pub exhaustive: bool,
    pub ball_size: usize,
    pub elapsed_ms: u128,
}

impl SearchReport {
    pub fn to_json(&self, sys: &EquationSystem) -> serde_json::Value {
        json!({
            "solutions": self.solutions.iter().map(|a| {
                sys.format_assignment(a)
                    .into_iter()
                    .map(|(k, v)| (k, serde_json::Value::String(v)))
                    .collect::<serde_json::Map<_, _>>()
            }).collect::<Vec<_>>(),
            "radius": self.radius,
            "exhaustive": self.exhaustive,
            "ball_size": self.ball_size,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

/// All assignments with every value in `ball(U, radius)` that satisfy the
/// system, ordered by total word length and then by ball position.
pub fn solve_bounded(
    sys: &EquationSystem,
    u: &GeneratingSet,
    radius: usize,
) -> Result<SearchReport> {
    let start = Instant::now();
    sys.validate()?;
    let ball = sys.group.ball(u, radius)?;
    let solutions = solve_in_ball(sys, &ball)?;
    Ok(SearchReport {
        solutions,
        radius,
        exhaustive: ball.complete,
        ball_size: ball.len(),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Solutions with values drawn from a precomputed ball.
pub fn solve_in_ball(sys: &EquationSystem, ball: &Ball) -> Result<Vec<Assignment>> {
    let group = &sys.group;
    let n = sys.num_vars();
    // equations grouped by the last unknown they mention, so each one is
    // checked as soon as its unknowns are fixed
    let mut stages: Vec<Vec<&Equation>> = vec![Vec::new(); n + 1];
    for eq in &sys.equations {
        let stage = eq.lhs.max_var().map_or(0, |v| v.0 + 1);
        stages[stage].push(eq);
    }
    for eq in &stages[0] {
        if !group.equal(&eq.lhs.evaluate(group, &[])?, &eq.rhs)? {
            return Ok(Vec::new());
        }
    }
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let size = ball.len();
    let per_first: Vec<Result<Vec<Vec<usize>>>> = (0..size)
        .into_par_iter()
        .map(|first| {
            let mut found = Vec::new();
            let mut idx = vec![first];
            let mut values = vec![ball.elements[first].clone()];
            search(group, ball, &stages, n, &mut idx, &mut values, &mut found)?;
            Ok(found)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_first {
        all.extend(r?);
    }
    all.sort_by_key(|idx| {
        (
            idx.iter().map(|&i| ball.lengths[i]).sum::<usize>(),
            idx.clone(),
        )
    });
    Ok(all
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| ball.elements[i].clone()).collect())
        .collect())
}

fn stage_holds(group: &Group, eqs: &[&Equation], values: &[Element]) -> Result<bool> {
    for eq in eqs {
        if !group.equal(&eq.lhs.evaluate(group, values)?, &eq.rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn search(
    group: &Group,
    ball: &Ball,
    stages: &[Vec<&Equation>],
    n: usize,
    idx: &mut Vec<usize>,
    values: &mut Vec<Element>,
    found: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if !stage_holds(group, &stages[idx.len()], values)? {
        return Ok(());
    }
    if idx.len() == n {
        found.push(idx.clone());
        return Ok(());
    }
    for (i, x) in ball.elements.iter().enumerate() {
        idx.push(i);
        values.push(x.clone());
        search(group, ball, stages, n, idx, values, found)?;
        idx.pop();
        values.pop();
    }
    Ok(())
}

/// The system with every constant replaced by its image in `G/Q`.
pub fn project_system(sys: &EquationSystem) -> Result<EquationSystem> {
    let g = &sys.group;
    let k = quotient_group(g)?;
    let mut equations = Vec::with_capacity(sys.equations.len());
    for eq in &sys.equations {
        let items = eq
            .lhs
            .items()
            .iter()
            .map(|it| match it {
                Item::Var(v, e) => Ok(Item::Var(*v, *e)),
                Item::Const(x) => Ok(Item::Const(quotient_by_q(g, x)?)),
            })
            .collect::<Result<Vec<_>>>()?;
        equations.push(Equation {
            lhs: MixedWord::from_items(&k, items)?,
            rhs: quotient_by_q(g, &eq.rhs)?,
        });
    }
    EquationSystem::new(k, sys.variables.clone(), equations)
}

/// Projects a generating set of `G` to `G/Q`.
pub fn project_generating_set(g: &Group, u: &GeneratingSet) -> Result<GeneratingSet> {
    let k = quotient_group(g)?;
    let xs = u
        .elements()
        .iter()
        .map(|x| quotient_by_q(g, x))
        .collect::<Result<Vec<_>>>()?;
    GeneratingSet::symmetric_closure(&k, xs)
}

/// Solves the image of the system in `G/Q`; `u` may be given over `G` or
/// over `G/Q`.
pub fn solve_modulo_q(
    sys: &EquationSystem,
    u: &GeneratingSet,
    radius: usize,
) -> Result<SearchReport> {
    let projected = project_system(sys)?;
    let k = &projected.group;
    let u_k = if u.elements().iter().all(|x| k.contains(x)) {
        u.clone()
    } else {
        project_generating_set(&sys.group, u)?
    };
    solve_bounded(&projected, &u_k, radius)
}

/// True iff the bounded search returns exactly `expected`; with a rational
/// factor the comparison is made in `G/Q`.
pub fn unique_in_ball(
    sys: &EquationSystem,
    u: &GeneratingSet,
    radius: usize,
    expected: &[Element],
) -> Result<bool> {
    if expected.len() != sys.num_vars() {
        return Err(Error::VariableMismatch(format!(
            "expected assignment has {} values for {} unknowns",
            expected.len(),
            sys.num_vars()
        )));
    }
    let (report, group, expected) = if sys.group.contains_rational() {
        let projected: Vec<Element> = expected
            .iter()
            .map(|x| quotient_by_q(&sys.group, x))
            .collect::<Result<_>>()?;
        (
            solve_modulo_q(sys, u, radius)?,
            quotient_group(&sys.group)?,
            projected,
        )
    } else {
        (
            solve_bounded(sys, u, radius)?,
            sys.group.clone(),
            expected.to_vec(),
        )
    };
    if report.solutions.len() != 1 {
        return Ok(false);
    }
    for (x, y) in report.solutions[0].iter().zip(&expected) {
        if !group.equal(x, y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For a diagonal form over a finite abelian group whose pure equations
/// have identity right-hand sides: solves each head `x^m = h` on its own in
/// `ball` and sets every other unknown to the identity. Returns `None` when
/// some head has no root in the ball. The result is checked against the
/// system before it is returned.
pub fn abelian_head_solution(form: &DiagonalForm, ball: &Ball) -> Result<Option<Assignment>> {
    let sys = &form.system;
    let g = &sys.group;
    for p in &form.pure {
        if !g.is_identity(&sys.equations[p.equation].rhs)? {
            return Err(Error::Precondition(
                "pure equations must have identity right-hand sides".into(),
            ));
        }
    }
    let mut a = vec![g.identity(); sys.num_vars()];
    for h in &form.heads {
        let rhs = &sys.equations[h.equation].rhs;
        let mut root = None;
        for x in &ball.elements {
            if g.equal(&g.power(x, h.multiplicity as i64)?, rhs)? {
                root = Some(x.clone());
                break;
            }
        }
        match root {
            Some(x) => a[h.var.0] = x,
            None => return Ok(None),
        }
    }
    if !sys.is_solution(&a)? {
        return Err(Error::Verification(
            "head-wise solution fails the diagonal system".into(),
        ));
    }
    Ok(Some(a))
}
