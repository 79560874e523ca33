//! The equation `x1^p x2^p ... xm^p = f` solved by `x_i = s_i^(m_i)` with
//! `p m_i = 1 (mod ord s_i)`.

use num::integer::Integer;
use serde_json::json;

use crate::eqsys::{Assignment, Equation, EquationSystem, MixedWord, VarId};
use crate::error::{Error, Result};
use crate::groups::{Element, GeneratingSet, Group};

#[derive(Debug, Clone)]
pub struct Observation {
    pub p: u64,
    pub orders: Vec<u64>,
    pub exponents: Vec<u64>,
    pub decomposition: Vec<Element>,
    /// One equation in unknowns `x1..xm`.
    pub system: EquationSystem,
    pub assignment: Assignment,
}

impl Observation {
    pub fn equation(&self) -> &Equation {
        &self.system.equations[0]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = &self.system.group;
        json!({
            "p": self.p,
            "orders": self.orders,
            "exponents": self.exponents,
            "decomposition": self.decomposition.iter().map(|s| g.format(s)).collect::<Vec<_>>(),
            "equation": self.system.format_equation(self.equation()),
            "assignment": self.system.format_assignment(&self.assignment)
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect::<serde_json::Map<_, _>>(),
        })
    }
}

/// Inverse of `p` modulo `n`; `p` must be coprime to `n`.
fn inverse_mod(p: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let e = (p as i64).extended_gcd(&(n as i64));
    (e.x.rem_euclid(n as i64)) as u64
}

pub fn observation_equation(
    group: &Group,
    f: &Element,
    decomposition: &[Element],
) -> Result<Observation> {
    if decomposition.is_empty() {
        return Err(Error::Precondition("empty decomposition".into()));
    }
    let mut product = group.identity();
    let mut orders = Vec::with_capacity(decomposition.len());
    for s in decomposition {
        product = group.mul(&product, s)?;
        let ord = group.element_order(s)?.ok_or_else(|| {
            Error::Precondition(format!("{} has infinite order", group.format(s)))
        })?;
        orders.push(ord);
    }
    if !group.equal(&product, f)? {
        return Err(Error::Precondition(format!(
            "decomposition multiplies to {}, not {}",
            group.format(&product),
            group.format(f)
        )));
    }
    let p = (2u64..)
        .find(|p| orders.iter().all(|o| p.gcd(o) == 1))
        .expect("some integer is coprime to finitely many orders");
    let exponents: Vec<u64> = orders
        .iter()
        .map(|&o| inverse_mod(p % o.max(1), o))
        .collect();
    let m = decomposition.len();
    let variables: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    let mut lhs = MixedWord::identity();
    for i in 0..m {
        lhs = lhs.mul(group, &MixedWord::var_power(VarId(i), p as i64))?;
    }
    let system = EquationSystem::new(
        group.clone(),
        variables,
        vec![Equation {
            lhs,
            rhs: f.clone(),
        }],
    )?;
    let assignment = decomposition
        .iter()
        .zip(&exponents)
        .map(|(s, &e)| group.power(s, e as i64))
        .collect::<Result<Vec<_>>>()?;
    if !system.is_solution(&assignment)? {
        return Err(Error::Verification(
            "observation assignment does not satisfy its equation".into(),
        ));
    }
    Ok(Observation {
        p,
        orders,
        exponents,
        decomposition: decomposition.to_vec(),
        system,
        assignment,
    })
}

/// Decomposes `f` over `u` by breadth-first search, then builds the
/// observation equation.
pub fn observation_for(
    group: &Group,
    f: &Element,
    u: &GeneratingSet,
    radius: usize,
) -> Result<Observation> {
    let decomposition = group.decompose(u, f, radius)?.ok_or_else(|| {
        Error::NotFound(format!(
            "{} is not a product of at most {radius} generators",
            group.format(f)
        ))
    })?;
    observation_equation(group, f, &decomposition)
}
