//! Verification drivers and the report format shared by the command line
//! and the acceptance tests.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eqsys::{Equation, EquationSystem, MixedWord, VarId};
use crate::error::{Error, Result};
use crate::freewords::Word;
use crate::groups::{transposition, Element, GeneratingSet, Group, Surface};
use crate::parse::{parse_element, parse_group};
use crate::pipeline::{
    build_main_s2, check_lee_properties, observation_for, run_main_theorem_round_trip,
    LeeCandidate, RoundTripConfig, TemplateTable,
};
use crate::solver::solve_bounded;
use crate::verbal::{check_free_product, EWordTemplate, LawWord, Witness};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// What the check reproduces.
    pub location: String,
    pub status: Status,
    pub details: Value,
    pub elapsed_ms: u128,
}

impl CheckReport {
    fn timed<F>(name: &str, location: &str, f: F) -> CheckReport
    where
        F: FnOnce() -> Result<(bool, Value)>,
    {
        let start = Instant::now();
        let (status, details) = match f() {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e) => (Status::Error, json!({ "error": e.to_string() })),
        };
        CheckReport {
            name: name.to_string(),
            location: location.to_string(),
            status,
            details,
            elapsed_ms: start.elapsed().as_millis(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    !reports.is_empty() && reports.iter().all(CheckReport::passed)
}

/// Reports as JSON with the timings removed, for determinism checks.
pub fn without_timings(reports: &[CheckReport]) -> Value {
    let mut v = serde_json::to_value(reports).expect("reports serialize");
    strip_timings(&mut v);
    v
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

pub const SEMIDIRECT_EXAMPLE: &str = "semidirect(free(b,c), cyclic(a,2), action{b->b^-1, c->c})";

/// The group `F(b,c) x| <a>_2`, its generating set `U`, and the template
/// table for the law `t^2`.
pub struct SemidirectExample {
    pub group: Group,
    pub generating_set: GeneratingSet,
    pub templates: TemplateTable,
}

pub fn semidirect_example() -> Result<SemidirectExample> {
    semidirect_example_over(parse_group(SEMIDIRECT_EXAMPLE)?)
}

/// The same setup inside a larger group containing the example's
/// generator names, such as a direct product with a rational factor.
pub fn semidirect_example_over(group: Group) -> Result<SemidirectExample> {
    let el = |s: &str| parse_element(s, &group);
    let u: Vec<Element> = ["(b,a)", "(c,a)", "(c^-1,a)", "(1,a)"]
        .iter()
        .map(|s| el(s))
        .collect::<Result<_>>()?;
    let generating_set = GeneratingSet::new(&group, u.clone())?;
    let law = LawWord::power(2);
    let witnesses = vec![
        Witness::single(&group, &law, vec![el("b")?], 1)?,
        Witness::single(&group, &law, vec![el("c")?], 1)?,
    ];
    let t = |s: &str| EWordTemplate::parse(s, &group);
    let full = vec![t("?x^2")?, t("[?x, b^2]")?, t("[?x, c^2]")?];
    let short = vec![t("?x^2")?, t("[?x, b^2]")?];
    let entries = vec![
        (u[0].clone(), full.clone()),
        (u[1].clone(), short.clone()),
        (u[2].clone(), short),
        (u[3].clone(), full),
    ];
    Ok(SemidirectExample {
        group,
        generating_set,
        templates: TemplateTable {
            law,
            witnesses,
            entries,
        },
    })
}

/// The template system `{E(x) = E(u)}` for one `u` of the example.
pub fn template_system(ex: &SemidirectExample, u: &Element) -> Result<EquationSystem> {
    let single = EquationSystem::new(
        ex.group.clone(),
        vec!["x".into()],
        vec![Equation {
            lhs: MixedWord::var(VarId(0)),
            rhs: u.clone(),
        }],
    )?;
    build_main_s2(&single, &ex.templates)
}

fn uniqueness_details(
    ex: &SemidirectExample,
    targets: &[&str],
    radius: usize,
) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut systems = Vec::new();
    for s in targets {
        let u = parse_element(s, &ex.group)?;
        let sys = template_system(ex, &u)?;
        let report = solve_bounded(&sys, &ex.generating_set, radius)?;
        let unique = report.solutions == vec![vec![u.clone()]];
        ok &= unique;
        systems.push(json!({
            "target": s,
            "system": sys.equations.iter().map(|e| sys.format_equation(e)).collect::<Vec<_>>(),
            "search": report.to_json(&sys),
            "unique_within_radius": unique,
        }));
    }
    Ok((ok, json!({ "radius": radius, "systems": systems })))
}

/// Unique solvability of the template systems of the semidirect example
/// within the given radius.
pub fn example1(radius: usize) -> Vec<CheckReport> {
    let ex = match semidirect_example() {
        Ok(ex) => ex,
        Err(e) => {
            return vec![CheckReport::timed(
                "example1",
                "semidirect example setup",
                || Err(e),
            )]
        }
    };
    let groups: [(&str, &str, &[&str]); 3] = [
        (
            "example1/(b,a)",
            "semidirect example, system for (b,a)",
            &["(b,a)"],
        ),
        (
            "example1/(c,a),(c^-1,a)",
            "semidirect example, systems for (c,a) and (c^-1,a)",
            &["(c,a)", "(c^-1,a)"],
        ),
        (
            "example1/(1,a)",
            "semidirect example, system for (1,a)",
            &["(1,a)"],
        ),
    ];
    groups
        .iter()
        .map(|(name, loc, targets)| {
            CheckReport::timed(name, loc, || uniqueness_details(&ex, targets, radius))
        })
        .collect()
}

/// Observation equations for seeded targets in a group generated by
/// finite-order elements.
pub fn observation(
    group: &Group,
    generators: &GeneratingSet,
    targets: &[Element],
    radius: usize,
) -> CheckReport {
    CheckReport::timed(
        "observation",
        "observation equation x1^p...xm^p = f",
        || {
            let mut ok = true;
            let mut cases = Vec::new();
            for f in targets {
                let obs = observation_for(group, f, generators, radius)?;
                let coprime = obs.orders.iter().all(|&o| num::integer::gcd(o, obs.p) == 1);
                let verified = obs.system.is_solution(&obs.assignment)?;
                ok &= coprime && verified && obs.p >= 2;
                let mut case = obs.to_json();
                case["coprime"] = json!(coprime);
                case["verified"] = json!(verified);
                cases.push(case);
            }
            Ok((ok, json!({ "group": group.to_string(), "cases": cases })))
        },
    )
}

/// `S3` with all three transpositions as generators.
pub fn symmetric3_transpositions() -> Result<(Group, GeneratingSet)> {
    let g = Group::symmetric(3)?;
    let u = GeneratingSet::new(
        &g,
        vec![
            transposition(3, 0, 1),
            transposition(3, 1, 2),
            transposition(3, 0, 2),
        ],
    )?;
    Ok((g, u))
}

/// All elements of a finite group, in ball order.
pub fn finite_elements(group: &Group) -> Result<Vec<Element>> {
    let u = group.default_generating_set()?;
    for radius in 1..=64 {
        let b = group.ball(&u, radius)?;
        if b.complete {
            return Ok(b.elements);
        }
    }
    Err(Error::Precondition(format!(
        "{group} is not small and finite"
    )))
}

/// `count` seeded elements of a finite group.
pub fn seeded_elements(group: &Group, count: usize, seed: u64) -> Result<Vec<Element>> {
    let all = finite_elements(group)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| all.choose(&mut rng).expect("group is nonempty").clone())
        .collect())
}

pub fn lee(word: &str, radius: usize) -> Vec<CheckReport> {
    let start = Instant::now();
    let result = LeeCandidate::parse(word, None).and_then(|l| check_lee_properties(&l, radius));
    let elapsed = start.elapsed().as_millis();
    match result {
        Ok(r) => {
            let details = r.to_json();
            vec![
                CheckReport {
                    name: "lee/L1".into(),
                    location: "Lee property L1: equal values force simultaneous conjugacy".into(),
                    status: if r.l1_total == 0 {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    details: json!({
                        "candidate": details["candidate"],
                        "radius": radius,
                        "pairs_checked": r.l1_pairs_checked,
                        "counterexamples": details["l1_counterexamples"],
                        "total": r.l1_total,
                        "conjugator_search_radius": r.conjugator_search_radius,
                    }),
                    elapsed_ms: elapsed,
                },
                CheckReport {
                    name: "lee/L2".into(),
                    location: "Lee property L2: trivial exactly on cyclic tuples".into(),
                    status: if r.l2_total == 0 {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    details: json!({
                        "candidate": details["candidate"],
                        "radius": radius,
                        "tuples": r.tuples,
                        "counterexamples": details["l2_counterexamples"],
                        "total": r.l2_total,
                    }),
                    elapsed_ms: elapsed,
                },
            ]
        }
        Err(e) => vec![CheckReport {
            name: "lee".into(),
            location: "Lee properties L1 and L2".into(),
            status: Status::Error,
            details: json!({ "error": e.to_string() }),
            elapsed_ms: elapsed,
        }],
    }
}

/// Parses factor names such as `z2`, `z3`, `s3`, or full descriptions.
pub fn parse_factors(spec: &str) -> Result<Vec<Group>> {
    let names = ["g", "h", "k", "m", "n", "p", "r", "u", "v", "w"];
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            let name = names
                .get(i)
                .copied()
                .ok_or_else(|| Error::Precondition("at most ten factors".into()))?;
            let lower = s.to_ascii_lowercase();
            if let Some(n) = lower.strip_prefix('z').and_then(|n| n.parse::<u64>().ok()) {
                Group::cyclic(name, n)
            } else if let Some(n) = lower
                .strip_prefix('s')
                .and_then(|n| n.parse::<usize>().ok())
            {
                Group::symmetric(n)
            } else {
                parse_group(s)
            }
        })
        .collect()
}

pub fn free_product(factors: &[Group], radius: usize) -> CheckReport {
    let names: Vec<String> = factors.iter().map(Group::to_string).collect();
    CheckReport::timed(
        "freeproduct",
        "free product of finite groups with a non-commuting pair in the verbal subgroup",
        || {
            let r = check_free_product(factors, None, radius, 1)?;
            let mut d = r.to_json();
            d["factors"] = json!(names);
            Ok((r.pass(), d))
        },
    )
}

fn random_word(rng: &mut ChaCha8Rng, rank: u32, len: usize) -> Word {
    let mut w = Word::identity();
    while w.len() < len {
        let g = rng.gen_range(0..rank);
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        w = w.mul(&Word::syllable(g, e));
    }
    w
}

/// Dehn's algorithm on an orientable surface group: relator conjugates
/// vanish, irreducible words survive, and sampled commuting pairs have a
/// common root.
pub fn surface(genus: usize, samples: usize, seed: u64) -> Vec<CheckReport> {
    let s = Surface::new(true, genus);
    let group = Group::surface(true, genus);
    let rank = s.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fmt = |w: &Word| group.format(&Element::Word(w.clone()));
    let mut out = Vec::new();

    out.push(CheckReport::timed(
        "surface/relator",
        "relator, cyclic permutations and inverses are trivial",
        || {
            let letters = s.relator().to_letters();
            let n = letters.len();
            let mut words = Vec::new();
            for shift in 0..n {
                let rot = Word::reduce((0..n).map(|i| letters[(i + shift) % n]));
                words.push(rot.inverse());
                words.push(rot);
            }
            let mut ok = true;
            for w in &words {
                ok &= s.dehn_reduce(w)?.is_identity();
            }
            Ok((
                ok,
                json!({ "relator": fmt(s.relator()), "words_checked": words.len() }),
            ))
        },
    ));

    let conj_seed: u64 = rng.gen();
    out.push(CheckReport::timed(
        "surface/conjugates",
        "products of conjugates of the relator reduce to the identity",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(conj_seed);
            let mut ok = true;
            let mut cases = Vec::new();
            for _ in 0..samples {
                let mut w = Word::identity();
                for _ in 0..rng.gen_range(1..=3) {
                    let len = rng.gen_range(0..=4);
                    let c = random_word(&mut rng, rank, len);
                    let r = if rng.gen_bool(0.5) {
                        s.relator().clone()
                    } else {
                        s.relator().inverse()
                    };
                    w = w.mul(&r.conjugate(&c));
                }
                let reduced = s.dehn_reduce(&w)?;
                ok &= reduced.is_identity();
                cases.push(json!({ "word": fmt(&w), "reduces_to": fmt(&reduced) }));
            }
            Ok((ok, json!({ "samples": cases })))
        },
    ));

    let irr_seed: u64 = rng.gen();
    out.push(CheckReport::timed(
        "surface/irreducible",
        "Dehn-irreducible nonempty words are nontrivial",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(irr_seed);
            let mut ok = true;
            let mut cases = Vec::new();
            while cases.len() < samples {
                let len = rng.gen_range(1..=6);
                let w = random_word(&mut rng, rank, len);
                if s.dehn_reduce(&w)? != w {
                    continue;
                }
                let trivial = s.is_trivial(&w)?;
                ok &= !trivial;
                cases.push(json!({ "word": fmt(&w), "trivial": trivial }));
            }
            Ok((ok, json!({ "samples": cases })))
        },
    ));

    let pair_seed: u64 = rng.gen();
    out.push(CheckReport::timed(
        "surface/commuting",
        "commuting nontrivial pairs from the radius-4 ball have a common root",
        || surface_commuting(&group, samples, pair_seed),
    ));
    out
}

const ROOT_EXPONENT: i64 = 4;

fn surface_commuting(group: &Group, samples: usize, seed: u64) -> Result<(bool, Value)> {
    let u = group.default_generating_set()?;
    let small = group.ball(&u, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // sampled elements of length at most 4: products of two ball-2 elements,
    // together with squares of ball-2 elements so that commuting pairs occur
    let mut bigs = Vec::new();
    for _ in 0..samples {
        let x = small.elements.choose(&mut rng).expect("nonempty").clone();
        let y = small.elements.choose(&mut rng).expect("nonempty").clone();
        bigs.push(group.mul(&x, &y)?);
        let z = small.elements.choose(&mut rng).expect("nonempty").clone();
        bigs.push(group.power(&z, 2)?);
    }
    let mut pairs_tested = 0;
    let mut commuting = Vec::new();
    let mut counterexamples = Vec::new();
    for g in &bigs {
        if group.is_identity(g)? {
            continue;
        }
        for h in &small.elements {
            if group.is_identity(h)? {
                continue;
            }
            pairs_tested += 1;
            if !group.commute(g, h)? {
                continue;
            }
            let root = common_root(group, &small.elements, g, h)?;
            match &root {
                Some((r, i, j)) => commuting.push(json!({
                    "g": group.format(g),
                    "h": group.format(h),
                    "root": group.format(r),
                    "exponents": [i, j],
                })),
                None => counterexamples.push(json!({
                    "g": group.format(g),
                    "h": group.format(h),
                })),
            }
        }
    }
    Ok((
        counterexamples.is_empty() && !commuting.is_empty(),
        json!({
            "pairs_tested": pairs_tested,
            "commuting_pairs": commuting.len(),
            "examples": commuting.iter().take(10).cloned().collect::<Vec<_>>(),
            "counterexamples": counterexamples,
            "root_search": { "radius": 2, "max_exponent": ROOT_EXPONENT },
        }),
    ))
}

/// An `r` from `candidates` with `g = r^i`, `h = r^j`, `|i|,|j| <= 4`.
fn common_root(
    group: &Group,
    candidates: &[Element],
    g: &Element,
    h: &Element,
) -> Result<Option<(Element, i64, i64)>> {
    for r in candidates {
        if group.is_identity(r)? {
            continue;
        }
        let mut i_found = None;
        let mut j_found = None;
        for k in -ROOT_EXPONENT..=ROOT_EXPONENT {
            if k == 0 {
                continue;
            }
            let p = group.power(r, k)?;
            if i_found.is_none() && group.equal(&p, g)? {
                i_found = Some(k);
            }
            if j_found.is_none() && group.equal(&p, h)? {
                j_found = Some(k);
            }
        }
        if let (Some(i), Some(j)) = (i_found, j_found) {
            return Ok(Some((r.clone(), i, j)));
        }
    }
    Ok(None)
}

/// Round-trip configuration in text form, as read from a TOML file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundTripSpec {
    pub radius: usize,
    pub law: String,
    pub generating_set: Vec<String>,
    #[serde(default)]
    pub witness: Vec<WitnessSpec>,
    #[serde(default)]
    pub templates: Vec<TemplateSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSpec {
    /// Law arguments of a single law value.
    pub tuple: Vec<String>,
    #[serde(default = "plus_one")]
    pub sign: i8,
}

fn plus_one() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSpec {
    pub u: String,
    pub words: Vec<String>,
}

impl RoundTripSpec {
    pub fn build(&self, group: &Group) -> Result<RoundTripConfig> {
        let law = LawWord::parse(&self.law)?;
        let us = self
            .generating_set
            .iter()
            .map(|s| parse_element(s, group))
            .collect::<Result<Vec<_>>>()?;
        let generating_set = GeneratingSet::new(group, us)?;
        let witnesses = self
            .witness
            .iter()
            .map(|w| {
                let tuple = w
                    .tuple
                    .iter()
                    .map(|s| parse_element(s, group))
                    .collect::<Result<Vec<_>>>()?;
                Witness::single(group, &law, tuple, w.sign)
            })
            .collect::<Result<Vec<_>>>()?;
        let entries = self
            .templates
            .iter()
            .map(|t| {
                let u = parse_element(&t.u, group)?;
                let ws = t
                    .words
                    .iter()
                    .map(|s| EWordTemplate::parse(s, group))
                    .collect::<Result<Vec<_>>>()?;
                Ok((u, ws))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RoundTripConfig {
            generating_set,
            templates: TemplateTable {
                law,
                witnesses,
                entries,
            },
            radius: self.radius,
        })
    }
}

pub fn roundtrip(sys: &EquationSystem, config: &RoundTripConfig) -> CheckReport {
    CheckReport::timed(
        "roundtrip",
        "reduce, S1, S2, bounded solve, Q correction, map back",
        || {
            let r = run_main_theorem_round_trip(sys, config)?;
            Ok((sys.is_solution(&r.solution)?, r.to_json(sys)))
        },
    )
}
