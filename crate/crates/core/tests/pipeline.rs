use gew_core::groups::Group;
use gew_core::parse::{parse_element, parse_group, parse_system};
use gew_core::pipeline::{build_sml_s1, lee_collapse, LeeCandidate};
use gew_core::suite::{self, RoundTripSpec, TemplateSpec, WitnessSpec, SEMIDIRECT_EXAMPLE};
use gew_core::verbal::{LawWord, Witness};

fn example_spec() -> RoundTripSpec {
    let words = |ws: &[&str]| ws.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let full = words(&["?x^2", "[?x, b^2]", "[?x, c^2]"]);
    let short = words(&["?x^2", "[?x, b^2]"]);
    RoundTripSpec {
        radius: 3,
        law: "t^2".into(),
        generating_set: words(&["(b,a)", "(c,a)", "(c^-1,a)", "(1,a)"]),
        witness: vec![
            WitnessSpec {
                tuple: vec!["b".into()],
                sign: 1,
            },
            WitnessSpec {
                tuple: vec!["c".into()],
                sign: 1,
            },
        ],
        templates: vec![
            TemplateSpec {
                u: "(b,a)".into(),
                words: full.clone(),
            },
            TemplateSpec {
                u: "(c,a)".into(),
                words: short.clone(),
            },
            TemplateSpec {
                u: "(c^-1,a)".into(),
                words: short,
            },
            TemplateSpec {
                u: "(1,a)".into(),
                words: full,
            },
        ],
    }
}

#[test]
fn round_trip_through_a_text_config() {
    let g = parse_group(SEMIDIRECT_EXAMPLE).unwrap();
    let config = example_spec().build(&g).unwrap();
    let sys = parse_system("?x * ?y^-1 = (b,a)*(c,a)", Some(&g)).unwrap();
    let r = suite::roundtrip(&sys, &config);
    assert!(r.passed(), "{}", r.details);
    let stages: Vec<&str> = r.details["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["stage"].as_str().unwrap())
        .collect();
    assert_eq!(stages, ["reduce", "s1", "s2", "solve", "map_back"]);
}

#[test]
fn bad_template_is_an_error() {
    let g = parse_group(SEMIDIRECT_EXAMPLE).unwrap();
    let mut spec = example_spec();
    spec.templates[0].words.push("?x * ?y".into());
    assert!(spec.build(&g).is_err());
    let mut spec = example_spec();
    spec.witness[0].tuple = vec!["b".into(), "c".into()];
    assert!(spec.build(&g).is_err());
}

#[test]
fn witnessed_constants_then_lee_collapse() {
    let g = Group::free(&["b", "c"]);
    let law = LawWord::parse("t^2").unwrap();
    let el = |s: &str| parse_element(s, &g).unwrap();
    let witnesses = vec![
        Witness::single(&g, &law, vec![el("b")], 1).unwrap(),
        Witness::single(&g, &law, vec![el("c")], 1).unwrap(),
    ];
    let sys = parse_system("?x * b^2 = c^2\n?y * c^-2 = b", Some(&g)).unwrap();
    let s1 = build_sml_s1(&sys, &law, &witnesses, &[]).unwrap();
    assert!(!s1.system.has_constants() || s1.system.num_vars() > sys.num_vars());
    let x = el("c^2*b^-2");
    let y = el("b*c^2");
    assert!(sys.is_solution(&[x.clone(), y.clone()]).unwrap());
    assert!(s1
        .system
        .is_solution(&s1.extend(&[x.clone(), y.clone()]))
        .unwrap());

    let lee = LeeCandidate::parse("[z1, z2]", None).unwrap();
    let collapsed = lee_collapse(&sys, &lee).unwrap();
    let value = collapsed.lhs.evaluate(&g, &[x, y]).unwrap();
    assert!(g.equal(&value, &collapsed.rhs).unwrap());
}
