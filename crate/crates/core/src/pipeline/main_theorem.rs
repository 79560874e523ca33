//! The chain `S -> S1 -> S2 -> solve -> correct` for systems
//! `w_i(x) = h_i` over a group with a generating set `U`, templates
//! `E_{u,k}` for each `u` in `U`, and an optional divisible factor `Q`.

use std::time::Instant;

use num::{BigRational, Zero};
use serde_json::json;

use crate::eqsys::{
    reduce_to_diagonal, Assignment, DiagonalForm, Equation, EquationSystem, MixedWord, VarId,
};
use crate::error::{Error, Result};
use crate::groups::{
    is_zero_vector, lift_with_q, q_component, quotient_by_q, quotient_group, Element,
    GeneratingSet, Group,
};
use crate::solver::{project_generating_set, solve_bounded, solve_modulo_q};
use crate::verbal::{e_word_membership, EWordTemplate, LawWord, Witness};

/// `S1`: every right-hand side is an element of `U`.
#[derive(Debug, Clone)]
pub struct MainS1 {
    pub system: EquationSystem,
    /// `h_i = u_{i,0} u_{i,1} ... u_{i,t_i}` for each input equation.
    pub decompositions: Vec<Vec<Element>>,
    /// The fresh unknowns `y_{i,1..t_i}` of each input equation.
    pub y_vars: Vec<Vec<VarId>>,
    pub original_vars: usize,
}

impl MainS1 {
    /// Extends a solution of `S` by `y_{i,j} = u_{i,j}`.
    pub fn extend(&self, assignment: &[Element]) -> Assignment {
        let mut a = assignment.to_vec();
        for d in &self.decompositions {
            a.extend(d[1..].iter().cloned());
        }
        a
    }

    pub fn restrict(&self, assignment: &[Element]) -> Assignment {
        assignment[..self.original_vars].to_vec()
    }
}

/// Decomposes `h` over `U`; with a rational factor the decomposition is
/// of the image in `G/Q`, lifted back with zero `Q`-parts.
fn decompose_mod_q(
    g: &Group,
    u: &GeneratingSet,
    h: &Element,
    radius: usize,
) -> Result<Option<Vec<Element>>> {
    if !g.contains_rational() {
        return g.decompose(u, h, radius);
    }
    let k = quotient_group(g)?;
    let u_k = project_generating_set(g, u)?;
    let d = k.decompose(&u_k, &quotient_by_q(g, h)?, radius)?;
    d.map(|d| d.iter().map(|x| lift_with_q(g, x, &[])).collect())
        .transpose()
}

/// Rewrites `w_i(x) = h_i` as `w_i(x) y_{i,t}^-1 ... y_{i,1}^-1 = u_{i,0}`
/// together with `y_{i,j} = u_{i,j}`, using shortest decompositions of
/// `h_i` over `U` found by breadth-first search. With a rational factor the
/// decomposition holds modulo `Q` only.
pub fn build_main_s1(sys: &EquationSystem, u: &GeneratingSet, radius: usize) -> Result<MainS1> {
    let g = &sys.group;
    let mut out = EquationSystem::new(g.clone(), sys.variables.clone(), Vec::new())?;
    let mut decompositions = Vec::new();
    let mut y_vars = Vec::new();
    let mut extra = Vec::new();
    for (i, eq) in sys.equations.iter().enumerate() {
        let d = decompose_mod_q(g, u, &eq.rhs, radius)?.ok_or_else(|| {
            Error::NotFound(format!(
                "{} is not a product of at most {radius} elements of U",
                g.format(&eq.rhs)
            ))
        })?;
        let mut ys = Vec::new();
        let mut lhs = eq.lhs.clone();
        for (j, u_j) in d.iter().enumerate().skip(1) {
            let name = format!("y{}_{}", i + 1, j);
            let name = if out.variables.contains(&name) {
                out.fresh_name(&format!("y{}_", i + 1))
            } else {
                name
            };
            out.variables.push(name);
            let y = VarId(out.variables.len() - 1);
            ys.push(y);
            extra.push(Equation {
                lhs: MixedWord::var(y),
                rhs: u_j.clone(),
            });
        }
        for &y in ys.iter().rev() {
            lhs = lhs.mul(g, &MixedWord::var_power(y, -1))?;
        }
        out.equations.push(Equation {
            lhs,
            rhs: d[0].clone(),
        });
        decompositions.push(d);
        y_vars.push(ys);
    }
    out.equations.extend(extra);
    out.validate()?;
    Ok(MainS1 {
        system: out,
        decompositions,
        y_vars,
        original_vars: sys.num_vars(),
    })
}

/// Templates `E_{u,k}` for the elements `u` of `U`, with the law and the
/// witnesses for their constants.
#[derive(Debug, Clone)]
pub struct TemplateTable {
    pub law: LawWord,
    pub witnesses: Vec<Witness>,
    pub entries: Vec<(Element, Vec<EWordTemplate>)>,
}

impl TemplateTable {
    pub fn templates_for(&self, group: &Group, u: &Element) -> Result<&[EWordTemplate]> {
        for (v, ts) in &self.entries {
            if group.equal(u, v)? {
                return Ok(ts);
            }
        }
        Err(Error::NotFound(format!(
            "no templates for {}",
            group.format(u)
        )))
    }

    /// Checks every template with [`e_word_membership`].
    pub fn validate(&self, group: &Group) -> Result<()> {
        for (u, ts) in &self.entries {
            if ts.is_empty() {
                return Err(Error::Precondition(format!(
                    "empty template set for {}",
                    group.format(u)
                )));
            }
            for t in ts {
                if !e_word_membership(group, t, &self.law, &self.witnesses)? {
                    return Err(Error::Precondition(format!(
                        "template {} for {} is not in the required subgroup",
                        t.format(group),
                        group.format(u)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Replaces each equation `w = u` by `E(w) = E(u)` for every template `E`
/// of `u`.
pub fn build_main_s2(s1: &EquationSystem, table: &TemplateTable) -> Result<EquationSystem> {
    let g = &s1.group;
    table.validate(g)?;
    let mut equations = Vec::new();
    for eq in &s1.equations {
        let ts = table.templates_for(g, &eq.rhs)?;
        if ts.is_empty() {
            return Err(Error::Precondition(format!(
                "empty template set for {}",
                g.format(&eq.rhs)
            )));
        }
        for t in ts {
            equations.push(Equation {
                lhs: t.instantiate(g, &eq.lhs)?,
                rhs: t.value(g, &eq.rhs)?,
            });
        }
    }
    EquationSystem::new(g.clone(), s1.variables.clone(), equations)
}

/// `q_i = h_i^-1 w_i(x)` for each equation; the non-`Q` part must vanish.
pub fn residues(sys: &EquationSystem, assignment: &[Element]) -> Result<Vec<Vec<BigRational>>> {
    let g = &sys.group;
    let k = quotient_group(g)?;
    let mut out = Vec::with_capacity(sys.equations.len());
    for eq in &sys.equations {
        let q = g.mul(&g.inv(&eq.rhs)?, &eq.lhs.evaluate(g, assignment)?)?;
        if !k.is_identity(&quotient_by_q(g, &q)?)? {
            return Err(Error::Verification(format!(
                "{} is not satisfied modulo Q",
                sys.format_equation(eq)
            )));
        }
        out.push(q_component(g, &q)?);
    }
    Ok(out)
}

/// Divides each head residue by its multiplicity and shifts the head
/// unknown by the inverse root: `x_k <- r^-1 x_k` with `r^m = q`. Residues
/// on pure equations must be trivial.
pub fn q_correct(
    form: &DiagonalForm,
    found: &[Element],
    residues: &[Vec<BigRational>],
) -> Result<Assignment> {
    let sys = &form.system;
    let g = &sys.group;
    if residues.len() != sys.equations.len() {
        return Err(Error::InvalidArity {
            expected: sys.equations.len().to_string(),
            got: residues.len(),
        });
    }
    for p in &form.pure {
        if !is_zero_vector(&residues[p.equation]) {
            return Err(Error::QuotientViolation(format!(
                "pure equation {} has nontrivial residue",
                sys.format_equation(&sys.equations[p.equation])
            )));
        }
    }
    let k = quotient_group(g)?;
    let mut a = found.to_vec();
    for h in &form.heads {
        let q = &residues[h.equation];
        if is_zero_vector(q) {
            continue;
        }
        let m = BigRational::from_integer(h.multiplicity.into());
        let r_inv: Vec<BigRational> = q.iter().map(|c| -(c / &m)).collect();
        let shift = lift_with_q(g, &k.identity(), &r_inv)?;
        a[h.var.0] = g.mul(&shift, &a[h.var.0])?;
    }
    if !sys.is_solution(&a)? {
        return Err(Error::Verification(
            "corrected assignment does not satisfy the diagonal system".into(),
        ));
    }
    Ok(a)
}

#[derive(Debug, Clone)]
pub struct RoundTripConfig {
    pub generating_set: GeneratingSet,
    pub templates: TemplateTable,
    pub radius: usize,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub name: &'static str,
    pub detail: String,
    /// Which implication between the systems this stage certifies.
    pub certifies: String,
}

#[derive(Debug, Clone)]
pub struct RoundTripReport {
    pub stages: Vec<Stage>,
    pub diagonal: DiagonalForm,
    pub s1: MainS1,
    pub s2: EquationSystem,
    pub s2_solutions: usize,
    pub exhaustive: bool,
    pub residues: Vec<Vec<BigRational>>,
    /// Solution of the diagonal system after the `Q` correction.
    pub corrected: Assignment,
    /// Solution of the input system.
    pub solution: Assignment,
    pub elapsed_ms: u128,
}

impl RoundTripReport {
    pub fn to_json(&self, sys: &EquationSystem) -> serde_json::Value {
        let stages: Vec<_> = self
            .stages
            .iter()
            .map(|s| json!({"stage": s.name, "detail": s.detail, "certifies": s.certifies}))
            .collect();
        let assignment = |a: &[Element]| -> serde_json::Value {
            sys.format_assignment(a)
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect::<serde_json::Map<_, _>>()
                .into()
        };
        json!({
            "stages": stages,
            "diagonal_form": self.diagonal.to_json(),
            "s1": self.s1.system.equations.iter().map(|e| self.s1.system.format_equation(e)).collect::<Vec<_>>(),
            "s2": self.s2.equations.iter().map(|e| self.s2.format_equation(e)).collect::<Vec<_>>(),
            "s2_solutions_in_ball": self.s2_solutions,
            "exhaustive": self.exhaustive,
            "residues": self.residues.iter().map(|q| q.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "solution": assignment(&self.solution),
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

/// Runs the whole chain and returns a verified solution of `sys`.
pub fn run_main_theorem_round_trip(
    sys: &EquationSystem,
    config: &RoundTripConfig,
) -> Result<RoundTripReport> {
    let start = Instant::now();
    let g = &sys.group;
    let with_q = g.contains_rational();
    let mut stages = Vec::new();

    let (form, log) = reduce_to_diagonal(sys)?;
    stages.push(Stage {
        name: "reduce",
        detail: format!(
            "{} moves, {} heads, {} pure equations",
            log.moves.len(),
            form.heads.len(),
            form.pure.len()
        ),
        certifies: "S and its diagonal form are equivalent (invertible substitutions)".into(),
    });

    let s1 = build_main_s1(&form.system, &config.generating_set, config.radius)?;
    stages.push(Stage {
        name: "s1",
        detail: format!(
            "{} equations, {} fresh unknowns",
            s1.system.equations.len(),
            s1.system.num_vars() - s1.original_vars
        ),
        certifies: "S1 is solvable iff the diagonal form is (extension and restriction)".into(),
    });

    let s2 = build_main_s2(&s1.system, &config.templates)?;
    stages.push(Stage {
        name: "s2",
        detail: format!("{} equations", s2.equations.len()),
        certifies:
            "every solution of S1 solves S2; the converse is only checked on the solutions found"
                .into(),
    });

    let report = if with_q {
        solve_modulo_q(&s2, &config.generating_set, config.radius)?
    } else {
        solve_bounded(&s2, &config.generating_set, config.radius)?
    };
    stages.push(Stage {
        name: "solve",
        detail: format!(
            "{} solutions of S2{} within radius {} (ball of {})",
            report.solutions.len(),
            if with_q { " modulo Q" } else { "" },
            config.radius,
            report.ball_size
        ),
        certifies: if report.solutions.len() == 1 {
            format!("unique within radius {}", config.radius)
        } else {
            format!("not unique within radius {}", config.radius)
        },
    });

    let zero: Vec<BigRational> = Vec::new();
    let mut chosen = None;
    for candidate in &report.solutions {
        let lifted: Assignment = if with_q {
            candidate
                .iter()
                .map(|x| lift_with_q(g, x, &zero))
                .collect::<Result<_>>()?
        } else {
            candidate.clone()
        };
        let x = s1.restrict(&lifted);
        let res = if with_q {
            match residues(&form.system, &x) {
                Ok(r) => r,
                Err(Error::Verification(_)) => continue,
                Err(e) => return Err(e),
            }
        } else if form.system.is_solution(&x)? {
            vec![Vec::new(); form.system.equations.len()]
        } else {
            continue;
        };
        chosen = Some((x, res));
        break;
    }
    let (found, res) = chosen.ok_or_else(|| {
        Error::NotFound(format!(
            "no solution of S2 within radius {} solves the diagonal system",
            config.radius
        ))
    })?;

    let corrected = if with_q {
        let c = q_correct(&form, &found, &res)?;
        stages.push(Stage {
            name: "q_correct",
            detail: format!(
                "nonzero residues on {} equations",
                res.iter()
                    .filter(|q| q.iter().any(|c| !c.is_zero()))
                    .count()
            ),
            certifies: "corrected assignment solves the diagonal form exactly".into(),
        });
        c
    } else {
        found
    };

    let solution = log.map_back(g, &corrected)?;
    if !sys.is_solution(&solution)? {
        return Err(Error::Verification(
            "round-trip assignment does not satisfy the input system".into(),
        ));
    }
    stages.push(Stage {
        name: "map_back",
        detail: format!("{} moves undone", log.moves.len()),
        certifies: "final assignment solves S exactly (checked by evaluation)".into(),
    });

    Ok(RoundTripReport {
        stages,
        diagonal: form,
        s1,
        s2,
        s2_solutions: report.solutions.len(),
        exhaustive: report.exhaustive,
        residues: res,
        corrected,
        solution,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::rational;
    use crate::parse::{parse_element, parse_group, parse_system};

    const H: &str = "semidirect(free(b,c), cyclic(a,2), action{b->b^-1, c->c})";

    fn example_u(g: &Group) -> GeneratingSet {
        let xs = ["(b,a)", "(c,a)", "(c^-1,a)", "(1,a)"]
            .iter()
            .map(|s| parse_element(s, g).unwrap())
            .collect();
        GeneratingSet::new(g, xs).unwrap()
    }

    fn example_table(g: &Group) -> TemplateTable {
        let law = LawWord::power(2);
        let witnesses = vec![
            Witness::single(g, &law, vec![parse_element("b", g).unwrap()], 1).unwrap(),
            Witness::single(g, &law, vec![parse_element("c", g).unwrap()], 1).unwrap(),
        ];
        let t = |s: &str| EWordTemplate::parse(s, g).unwrap();
        let full = vec![t("?x^2"), t("[?x, b^2]"), t("[?x, c^2]")];
        let short = vec![t("?x^2"), t("[?x, b^2]")];
        let entries = vec![
            (parse_element("(b,a)", g).unwrap(), full.clone()),
            (parse_element("(c,a)", g).unwrap(), short.clone()),
            (parse_element("(c^-1,a)", g).unwrap(), short),
            (parse_element("(1,a)", g).unwrap(), full),
        ];
        TemplateTable {
            law,
            witnesses,
            entries,
        }
    }

    #[test]
    fn rhs_in_u_needs_no_fresh_unknowns() {
        let g = parse_group(H).unwrap();
        let sys = parse_system("?x = (b,a)", Some(&g)).unwrap();
        let s1 = build_main_s1(&sys, &example_u(&g), 3).unwrap();
        assert_eq!(s1.system, sys);
    }

    #[test]
    fn two_letter_rhs_adds_one_unknown() {
        let g = parse_group(H).unwrap();
        let sys = parse_system("?x = (b,a)*(c,a)", Some(&g)).unwrap();
        let s1 = build_main_s1(&sys, &example_u(&g), 3).unwrap();
        assert_eq!(s1.system.equations.len(), 2);
        assert_eq!(s1.system.variables, vec!["x", "y1_1"]);
        let x = parse_element("(b,a)*(c,a)", &g).unwrap();
        assert!(s1.system.is_solution(&s1.extend(&[x])).unwrap());
        let far = parse_system("?x = b^9", Some(&g)).unwrap();
        assert!(matches!(
            build_main_s1(&far, &example_u(&g), 3),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn templates_give_the_three_equations() {
        let g = parse_group(H).unwrap();
        let sys = parse_system("?x = (b,a)", Some(&g)).unwrap();
        let s2 = build_main_s2(&sys, &example_table(&g)).unwrap();
        let lines: Vec<String> = s2.equations.iter().map(|e| s2.format_equation(e)).collect();
        assert_eq!(
            lines,
            vec![
                "?x^2 = (1,1)",
                "?x^-1*(b^-2,1)*?x*(b^2,1) = (b^4,1)",
                "?x^-1*(c^-2,1)*?x*(c^2,1) = (b*c^-2*b^-1*c^2,1)",
            ]
        );
        let mut empty = example_table(&g);
        empty.entries[0].1.clear();
        assert!(build_main_s2(&sys, &empty).is_err());
    }

    #[test]
    fn square_template_on_y() {
        let g = parse_group(H).unwrap();
        let sys = parse_system("?y = (c,a)", Some(&g)).unwrap();
        let s2 = build_main_s2(&sys, &example_table(&g)).unwrap();
        assert_eq!(s2.format_equation(&s2.equations[0]), "?y^2 = (c^2,1)");
    }

    #[test]
    fn round_trip_without_q() {
        let g = parse_group(H).unwrap();
        let sys = parse_system("?x = (b,a)", Some(&g)).unwrap();
        let config = RoundTripConfig {
            generating_set: example_u(&g),
            templates: example_table(&g),
            radius: 3,
        };
        let r = run_main_theorem_round_trip(&sys, &config).unwrap();
        assert_eq!(r.solution, vec![parse_element("(b,a)", &g).unwrap()]);
        assert_eq!(r.s2_solutions, 1);
    }

    #[test]
    fn q_correction_divides_residues() {
        let g = parse_group(&format!("direct({H}, rational(1))")).unwrap();
        let sys = parse_system("?x^2 = q1^(2/3)", Some(&g)).unwrap();
        let (form, _) = reduce_to_diagonal(&sys).unwrap();
        let found = vec![g.identity()];
        let res = residues(&form.system, &found).unwrap();
        assert_eq!(res, vec![vec![rational(-2, 3)]]);
        let fixed = q_correct(&form, &found, &res).unwrap();
        assert_eq!(fixed, vec![parse_element("q1^(1/3)", &g).unwrap()]);
        let unchanged = q_correct(&form, &fixed, &[vec![rational(0, 1)]]).unwrap();
        assert_eq!(unchanged, fixed);
    }

    #[test]
    fn pure_residue_is_a_violation() {
        let g = parse_group("direct(free(b,c), rational(1))").unwrap();
        let sys = parse_system("[?x, ?y] = q1", Some(&g)).unwrap();
        let (form, _) = reduce_to_diagonal(&sys).unwrap();
        assert_eq!(form.pure.len(), 1);
        let found = vec![g.identity(), g.identity()];
        let res = vec![vec![rational(1, 1)]];
        assert!(matches!(
            q_correct(&form, &found, &res),
            Err(Error::QuotientViolation(_))
        ));
    }

    #[test]
    fn round_trip_with_q_part_on_the_rhs() {
        let g = parse_group(&format!("direct({H}, rational(1))")).unwrap();
        let sys = parse_system("?x^2 * ?y = (b,a) * q1^(5/7)", Some(&g)).unwrap();
        let config = RoundTripConfig {
            generating_set: example_u(&g),
            templates: example_table(&g),
            radius: 3,
        };
        let r = run_main_theorem_round_trip(&sys, &config).unwrap();
        assert!(sys.is_solution(&r.solution).unwrap());
    }
}
