//! Acceptance criteria. Runs as a plain binary so that each criterion
//! prints exactly one line; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gew_core::eqsys::{
    eliminate_coefficients, reduce_to_diagonal, Equation, EquationSystem, Item, MixedWord, VarId,
};
use gew_core::freewords::{ball_centralizer, root_powers_in_ball, Word};
use gew_core::groups::{
    free_product_projection, lift_with_q, q_component, quotient_group, Element, Group,
};
use gew_core::parse::{parse_element, parse_group, parse_system};
use gew_core::pipeline::{
    ball_conjugator, check_lee_properties, run_main_theorem_round_trip, simultaneous_conjugator,
    LeeCandidate, RoundTripConfig,
};
use gew_core::solver::solve_bounded;
use gew_core::suite::{
    self, finite_elements, semidirect_example, semidirect_example_over, symmetric3_transpositions,
    SEMIDIRECT_EXAMPLE,
};
use gew_core::verbal::check_free_product;
use gew_core::{Error, Result};

const SEED: u64 = 0x5eed_0001;

type Outcome = Result<std::result::Result<String, String>>;

fn pass(detail: impl Into<String>) -> Outcome {
    Ok(Ok(detail.into()))
}

fn fail(detail: impl Into<String>) -> Outcome {
    Ok(Err(detail.into()))
}

fn example_identities() -> Outcome {
    let g = parse_group(SEMIDIRECT_EXAMPLE)?;
    let el = |s: &str| parse_element(s, &g);
    let ba = el("(b,a)")?;
    let square = g.power(&ba, 2)?;
    let comm = g.commutator(&ba, &el("(b^2,1)")?)?;
    let ok1 = g.equal(&square, &el("(1,1)")?)?;
    let ok2 = g.equal(&comm, &el("(b^4,1)")?)?;
    let detail = format!(
        "(b,a)^2 = {}, [(b,a),(b^2,1)] = {}",
        g.format(&square),
        g.format(&comm)
    );
    if ok1 && ok2 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn example_uniqueness() -> Outcome {
    let reports = suite::example1(3);
    let lines: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {:?}", r.name, r.status))
        .collect();
    if suite::all_passed(&reports) {
        pass(lines.join("; "))
    } else {
        fail(lines.join("; "))
    }
}

/// `w = w1 b^k w2` with `alpha(w1) = w2^-1`, for some split of `w`.
fn matches_family(g: &Group, w: &Word) -> bool {
    let Group::Semidirect(s) = g else {
        return false;
    };
    let letters = w.to_letters();
    let n = letters.len();
    for i in 0..=n {
        for j in i..=n {
            if letters[i..j].iter().any(|l| l.gen.0 != 0) {
                break;
            }
            let w1 = Word::reduce(letters[..i].iter().copied());
            let w2 = Word::reduce(letters[j..].iter().copied());
            if s.act(1, &w1) == w2.inverse() {
                return true;
            }
        }
    }
    false
}

fn square_family() -> Outcome {
    let ex = semidirect_example()?;
    let g = &ex.group;
    let sys = parse_system("?x^2 = (1,1)", Some(g))?;
    let report = solve_bounded(&sys, &ex.generating_set, 2)?;
    // every element of the ball is tested directly
    let ball = g.ball(&ex.generating_set, 2)?;
    let mut scanned = BTreeSet::new();
    for x in &ball.elements {
        if g.is_identity(&g.power(x, 2)?)? {
            scanned.insert(x.clone());
        }
    }
    let found: BTreeSet<Element> = report.solutions.iter().map(|a| a[0].clone()).collect();
    if found != scanned || found.len() != report.solutions.len() {
        return fail("search result differs from a direct scan of the ball");
    }
    let mut bad = Vec::new();
    for a in &report.solutions {
        let ok = match &a[0] {
            Element::Semi(w, 0) => w.is_identity(),
            Element::Semi(w, 1) => matches_family(g, w),
            _ => false,
        };
        if !ok {
            bad.push(g.format(&a[0]));
        }
    }
    let detail = format!(
        "{} solutions in a ball of {}, {} outside the family",
        report.solutions.len(),
        report.ball_size,
        bad.len()
    );
    if bad.is_empty() && !report.solutions.is_empty() {
        pass(detail)
    } else {
        fail(format!("{detail}: {bad:?}"))
    }
}

fn random_lhs(rng: &mut ChaCha8Rng, vars: usize) -> Vec<Item> {
    let len = rng.gen_range(1..=4);
    (0..len)
        .map(|_| {
            let mut e = 0;
            while e == 0 {
                e = rng.gen_range(-3..=3);
            }
            Item::Var(VarId(rng.gen_range(0..vars)), e)
        })
        .collect()
}

fn all_assignments(elements: &[Element], n: usize) -> Vec<Vec<Element>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|a| {
                elements.iter().map(move |x| {
                    let mut b = a.clone();
                    b.push(x.clone());
                    b
                })
            })
            .collect();
    }
    out
}

fn brute_force(sys: &EquationSystem, elements: &[Element]) -> Result<Vec<Vec<Element>>> {
    let mut out = Vec::new();
    for a in all_assignments(elements, sys.num_vars()) {
        if sys.is_solution(&a)? {
            out.push(a);
        }
    }
    Ok(out)
}

fn reduction_equivalence() -> Outcome {
    let groups = [Group::symmetric(3)?, Group::cyclic("g", 6)?];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    let mut solvable = 0;
    for k in 0..120 {
        let g = &groups[k % 2];
        let elements = finite_elements(g)?;
        let vars = rng.gen_range(1..=3);
        let eqs = rng.gen_range(1..=3);
        let mut equations = Vec::new();
        for _ in 0..eqs {
            let lhs = MixedWord::from_items(g, random_lhs(&mut rng, vars))?;
            // right-hand sides from a random assignment keep most systems solvable
            let rhs = if rng.gen_bool(0.8) {
                let a: Vec<Element> = (0..vars)
                    .map(|_| elements[rng.gen_range(0..elements.len())].clone())
                    .collect();
                lhs.evaluate(g, &a)?
            } else {
                elements[rng.gen_range(0..elements.len())].clone()
            };
            equations.push(Equation { lhs, rhs });
        }
        let names = (1..=vars).map(|i| format!("x{i}")).collect();
        let sys = EquationSystem::new(g.clone(), names, equations)?;
        let (form, log) = reduce_to_diagonal(&sys)?;
        for h in &form.heads {
            if !h.tail.exponent_vector().is_zero() {
                return fail(format!("system {k}: tail with nonzero exponent sums"));
            }
        }
        let original: BTreeSet<Vec<Element>> = brute_force(&sys, &elements)?.into_iter().collect();
        let reduced: BTreeSet<Vec<Element>> =
            brute_force(&form.system, &elements)?.into_iter().collect();
        let forward: BTreeSet<Vec<Element>> = original
            .iter()
            .map(|a| log.map_forward(g, a))
            .collect::<Result<_>>()?;
        let back: BTreeSet<Vec<Element>> = reduced
            .iter()
            .map(|a| log.map_back(g, a))
            .collect::<Result<_>>()?;
        if forward != reduced || back != original {
            return fail(format!("system {k}: solution sets differ"));
        }
        checked += 1;
        solvable += usize::from(!original.is_empty());
    }
    pass(format!(
        "{checked} systems over S3 and Z6, {solvable} solvable"
    ))
}

fn coefficient_elimination() -> Outcome {
    let g = Group::symmetric(3)?;
    let elements = finite_elements(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut checked = 0;
    let mut solvable = 0;
    let mut eliminated = 0;
    for k in 0..60 {
        let vars = rng.gen_range(1..=2);
        let eqs = rng.gen_range(1..=2);
        let mut equations = Vec::new();
        for _ in 0..eqs {
            let mut items = random_lhs(&mut rng, vars);
            for _ in 0..rng.gen_range(1..=2) {
                let at = rng.gen_range(0..=items.len());
                let c = elements[rng.gen_range(0..elements.len())].clone();
                items.insert(at, Item::Const(c));
            }
            let lhs = MixedWord::from_items(&g, items)?;
            let rhs = elements[rng.gen_range(0..elements.len())].clone();
            equations.push(Equation { lhs, rhs });
        }
        let names = (1..=vars).map(|i| format!("x{i}")).collect();
        let sys = EquationSystem::new(g.clone(), names, equations)?;
        let out = eliminate_coefficients(&sys)?;
        if out.has_constants() {
            return fail(format!("system {k}: constants survive elimination"));
        }
        let n = sys.num_vars();
        let extra = out.num_vars() - n;
        eliminated += extra;
        let appended = &out.equations[out.equations.len() - extra..];
        let input: BTreeSet<Vec<Element>> = brute_force(&sys, &elements)?.into_iter().collect();
        let output = brute_force(&out, &elements)?;
        let restricted: BTreeSet<Vec<Element>> = output.iter().map(|a| a[..n].to_vec()).collect();
        if restricted != input || input.is_empty() != output.is_empty() {
            return fail(format!("system {k}: restriction differs"));
        }
        for a in &input {
            let mut b = a.clone();
            b.extend(appended.iter().map(|e| e.rhs.clone()));
            if !out.is_solution(&b)? {
                return fail(format!("system {k}: extension does not solve the output"));
            }
        }
        checked += 1;
        solvable += usize::from(!input.is_empty());
    }
    pass(format!(
        "{checked} systems over S3, {solvable} solvable, {eliminated} constants eliminated"
    ))
}

fn free_centralizers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut checked = 0;
    while checked < 60 {
        let len = rng.gen_range(1..=6);
        let w = Word::reduce(
            (0..len)
                .map(|_| gew_core::freewords::Letter::new(rng.gen_range(0..2), rng.gen_bool(0.5))),
        );
        if w.is_identity() {
            continue;
        }
        let c: BTreeSet<Word> = ball_centralizer(&w, 4)?.into_iter().collect();
        let r: BTreeSet<Word> = root_powers_in_ball(&w, 4)?.into_iter().collect();
        if c != r {
            return fail(format!("centralizer of {w:?} differs from root powers"));
        }
        checked += 1;
    }
    pass(format!("{checked} words, ball radius 4"))
}

fn lee_checker() -> Outcome {
    let lee = LeeCandidate::parse("[z1, z2]", None)?;
    let r = check_lee_properties(&lee, 2)?;
    let a = Word::gen(0);
    let b = Word::gen(1);
    let (v, w) = (vec![a.clone(), b.clone()], vec![a.clone(), a.mul(&b)]);
    let named = lee.evaluate_free(&v)? == lee.evaluate_free(&w)?
        && simultaneous_conjugator(&v, &w).is_none()
        && ball_conjugator(&v, &w, 2, 6).is_none();
    let detail = format!(
        "{} tuples, L2 violations {}, L1 counterexamples {} (kept {})",
        r.tuples,
        r.l2_total,
        r.l1_total,
        r.l1_counterexamples.len()
    );
    if r.l2_total == 0 && !r.l1_counterexamples.is_empty() && named {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn observation_builder() -> Outcome {
    let (g, u) = symmetric3_transpositions()?;
    let targets = suite::seeded_elements(&g, 24, SEED + 3)?;
    let report = suite::observation(&g, &u, &targets, 6);
    let detail = format!("{} targets over S3", targets.len());
    if report.passed() {
        pass(detail)
    } else {
        fail(format!("{detail}: {}", report.details))
    }
}

fn free_products() -> Outcome {
    let mut parts = Vec::new();
    for spec in ["z2,z3", "z2,z2,z2"] {
        let fs = suite::parse_factors(spec)?;
        let r = check_free_product(&fs, None, 4, 1)?;
        let g = &r.group;
        let (x, y) = (r.f1.evaluate(g, &r.law)?, r.f2.evaluate(g, &r.law)?);
        let comm = !g.is_identity(&g.commutator(&x, &y)?)?;
        let target = gew_core::groups::factor_product(g)?;
        let cartesian = target.is_identity(&free_product_projection(g, &x)?)?
            && target.is_identity(&free_product_projection(g, &y)?)?;
        if !(r.pass() && comm && cartesian && r.f1.verify(g, &r.law)? && r.f2.verify(g, &r.law)?) {
            return fail(format!("{spec}: {}", r.to_json()));
        }
        parts.push(format!(
            "{spec}: [f1,f2] = {}",
            g.format(&g.commutator(&x, &y)?)
        ));
    }
    match check_free_product(&suite::parse_factors("z2,z2")?, None, 4, 1) {
        Err(Error::Precondition(_)) | Err(Error::InvalidGroup(_)) => {}
        other => return fail(format!("Z2*Z2 not rejected: {:?}", other.map(|r| r.pass()))),
    }
    parts.push("Z2*Z2 rejected".into());
    pass(parts.join("; "))
}

fn surface_checks() -> Outcome {
    let reports = suite::surface(2, 20, SEED + 4);
    let lines: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {:?}", r.name, r.status))
        .collect();
    if suite::all_passed(&reports) {
        pass(lines.join("; "))
    } else {
        let details: Vec<String> = reports
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.details.to_string())
            .collect();
        fail(format!("{}: {}", lines.join("; "), details.join(" | ")))
    }
}

fn round_trip() -> Outcome {
    let ex = semidirect_example()?;
    let config = |ex: &suite::SemidirectExample| RoundTripConfig {
        generating_set: ex.generating_set.clone(),
        templates: ex.templates.clone(),
        radius: 3,
    };
    let mut parts = Vec::new();
    for text in ["?x = (b,a)", "?x * ?y = (b,a)*(c,a)"] {
        let sys = parse_system(text, Some(&ex.group))?;
        let r = run_main_theorem_round_trip(&sys, &config(&ex))?;
        if !sys.is_solution(&r.solution)? {
            return fail(format!("{text}: round trip did not solve the system"));
        }
        parts.push(format!("{text} solved"));
    }

    let gq = parse_group(&format!("direct({SEMIDIRECT_EXAMPLE}, rational(1))"))?;
    let exq = semidirect_example_over(gq.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-20..=20);
    }
    let q = BigRational::new(num.into(), rng.gen_range(1..=12i64).into());
    let m = 2i64;
    let k = quotient_group(&gq)?;
    let rhs = lift_with_q(&gq, &k.identity(), std::slice::from_ref(&q))?;
    let sys = EquationSystem::new(
        gq.clone(),
        vec!["x".into()],
        vec![Equation {
            lhs: MixedWord::var_power(VarId(0), m),
            rhs,
        }],
    )?;
    let r = run_main_theorem_round_trip(&sys, &config(&exq))?;
    let shift = q_component(&gq, &r.corrected[0])?;
    let found_q = q_component(&gq, &r.solution[0])?;
    let exact = shift[0].clone() * BigRational::from_integer(m.into()) == q
        && found_q == shift
        && sys.is_solution(&r.solution)?;
    let detail = format!("Q residue {q} on x^{m}: x = {}", gq.format(&r.solution[0]));
    if exact {
        parts.push(detail);
        pass(parts.join("; "))
    } else {
        fail(detail)
    }
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("semidirect example identities", 1, example_identities),
        (
            "template systems unique within radius 3",
            60,
            example_uniqueness,
        ),
        (
            "solution family of x^2 = (1,1) at radius 2",
            10,
            square_family,
        ),
        (
            "reduction equivalence on random systems",
            120,
            reduction_equivalence,
        ),
        ("coefficient elimination", 60, coefficient_elimination),
        ("free-group centralizers", 60, free_centralizers),
        ("Lee checker on [z1,z2] at radius 2", 120, lee_checker),
        ("observation builder on S3", 10, observation_builder),
        ("free products of finite groups", 120, free_products),
        ("surface group of genus 2", 180, surface_checks),
        ("round trip with and without Q", 60, round_trip),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok(Ok(d)) => (within, d),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let time = format!("{:.2}s of {limit}s", elapsed.as_secs_f64());
        println!(
            "criterion {:>2} {}: {name} [{time}] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        failures += usize::from(!ok);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
