use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conditional_space() -> ParameterSpace {
    SpaceBuilder::new()
        .categorical("mode", ["on", "off"], "off")
        .real("ratio", 0.1, 0.9, 0.5, false)
        .integer("child", 1, 10, 5, false)
        .condition("child", "mode", ["on"])
        .build()
        .unwrap()
}

#[test]
fn parses_single_categorical() {
    let space = parse_pcs("restart {luby,geometric} [luby]").unwrap();
    assert_eq!(space.len(), 1);
    let d = space.default_configuration().unwrap();
    assert_eq!(space.render_value(0, &d.values[0]), "luby");
}

#[test]
fn parses_conditional_space() {
    let text = "ratio [0.1,0.9] [0.5]\nchild [1,10] [5] i\nchild | mode in {on}\nmode {on,off} [off]";
    let space = parse_pcs(text).unwrap();
    assert_eq!(space.len(), 3);
    let d = space.default_configuration().unwrap();
    assert!(!space.is_active(&d, "child").unwrap());
    assert_eq!(d.values[space.param_index("child").unwrap()], Value::Inactive);
}

#[test]
fn forbidden_point_is_never_sampled() {
    let space = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .categorical("b", ["0", "1"], "0")
        .forbid([("a", "1"), ("b", "1")])
        .build()
        .unwrap();
    // Exhaustive enumeration of the discrete space confirms exclusion.
    let all = space.enumerate(100).unwrap();
    assert_eq!(all.len(), 3);
    assert!(all
        .iter()
        .all(|c| !(c.values[0] == Value::Cat(1) && c.values[1] == Value::Cat(1))));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let c = space.sample_uniform(&mut rng).unwrap();
        assert!(!(c.values[0] == Value::Cat(1) && c.values[1] == Value::Cat(1)));
    }
}

#[test]
fn serialize_round_trips() {
    let simple = parse_pcs("restart {luby,geometric} [luby]").unwrap();
    assert_eq!(parse_pcs(&serialize_pcs(&simple)).unwrap(), simple);

    let five = SpaceBuilder::new()
        .categorical("mode", ["on", "off"], "off")
        .integer("depth", 1, 64, 8, true)
        .real("ratio", 0.1, 0.9, 0.25, false)
        .real("decay", 0.001, 1.0, 0.05, true)
        .categorical("heur", ["a", "b", "c"], "b")
        .condition("depth", "mode", ["on"])
        .condition("heur", "mode", ["on"])
        .forbid([("mode", "on"), ("heur", "c")])
        .build()
        .unwrap();
    assert_eq!(parse_pcs(&serialize_pcs(&five)).unwrap(), five);
}

#[test]
fn empty_forbidden_serializes_without_section() {
    let space = parse_pcs("restart {luby,geometric} [luby]").unwrap();
    let text = serialize_pcs(&space);
    assert!(!text.contains('}') || !text.contains('='));
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn default_configuration_examples() {
    let space = parse_pcs("restart {luby,geometric} [luby]").unwrap();
    let d = space.default_configuration().unwrap();
    assert_eq!(d.values[0], Value::Cat(0));

    let cond = conditional_space();
    let d = cond.default_configuration().unwrap();
    assert_eq!(d.values[cond.param_index("child").unwrap()], Value::Inactive);
    assert_eq!(d.values[cond.param_index("ratio").unwrap()], Value::Real(0.5));
}

#[test]
fn default_forbidden_is_a_space_error() {
    let err = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .forbid([("a", "0")])
        .build()
        .unwrap_err();
    assert!(matches!(err, Error::InvalidSpace(_)));
}

#[test]
fn activity_rules() {
    let space = conditional_space();
    let d = space.default_configuration().unwrap();
    assert!(space.is_active(&d, "ratio").unwrap());
    assert!(!space.is_active(&d, "child").unwrap());
    assert!(space.is_active(&d, "mode").unwrap());
    assert!(space.is_active(&d, "nope").is_err());
}

#[test]
fn transitive_deactivation() {
    let space = SpaceBuilder::new()
        .categorical("mode", ["on", "off"], "off")
        .categorical("child", ["1", "2", "3"], "3")
        .categorical("grandchild", ["x", "y"], "x")
        .condition("child", "mode", ["on"])
        .condition("grandchild", "child", ["3"])
        .build()
        .unwrap();
    let d = space.default_configuration().unwrap();
    // mode=off deactivates child, which transitively deactivates grandchild
    // even though child's (latent) value would satisfy the clause.
    assert!(!space.is_active(&d, "child").unwrap());
    assert!(!space.is_active(&d, "grandchild").unwrap());

    let mode = space.param_index("mode").unwrap();
    let on = space.set_value(&d, mode, Value::Cat(0));
    assert!(space.is_active(&on, "child").unwrap());
    assert!(space.is_active(&on, "grandchild").unwrap());
}

#[test]
fn validate_reports_violations() {
    let space = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .categorical("b", ["0", "1"], "0")
        .real("r", 0.0, 1.0, 0.5, false)
        .forbid([("a", "1"), ("b", "1")])
        .build()
        .unwrap();
    let d = space.default_configuration().unwrap();
    assert!(space.validate(&d).is_empty());

    let mut bad = d.clone();
    bad.values[0] = Value::Cat(1);
    bad.values[1] = Value::Cat(1);
    assert_eq!(space.validate(&bad), vec![Violation::Forbidden { clause: 0 }]);

    let mut high = d.clone();
    high.values[2] = Value::Real(1.5);
    assert_eq!(
        space.validate(&high),
        vec![Violation::OutOfDomain { param: "r".into() }]
    );
}

#[test]
fn validate_flags_non_canonical_inactive() {
    let space = conditional_space();
    let d = space.default_configuration().unwrap();
    let mut bad = d.clone();
    bad.values[space.param_index("child").unwrap()] = Value::Int(5);
    assert_eq!(
        space.validate(&bad),
        vec![Violation::NonCanonicalInactive {
            param: "child".into()
        }]
    );
}

#[test]
fn sampling_is_uniform_within_3_sigma() {
    let space = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .build()
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 10_000;
    let ones = (0..n)
        .filter(|_| space.sample_uniform(&mut rng).unwrap().values[0] == Value::Cat(1))
        .count() as f64;
    // Binomial bound: sigma = sqrt(n * 0.25) = 50.
    assert!((ones - 5_000.0).abs() <= 150.0, "ones = {ones}");
}

#[test]
fn fully_forbidden_space_errors_on_sample() {
    // A space whose default is forbidden cannot even be constructed.
    let err = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .forbid([("a", "0")])
        .forbid([("a", "1")])
        .build()
        .unwrap_err();
    assert!(matches!(err, Error::InvalidSpace(_)));

    // Exhausting the rejection budget needs a pathological space injected
    // past construction-time validation.
    let mut space = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .build()
        .unwrap();
    space.push_forbidden_unchecked(ForbiddenClause {
        assignments: vec![(0, Value::Cat(0))],
    });
    space.push_forbidden_unchecked(ForbiddenClause {
        assignments: vec![(0, Value::Cat(1))],
    });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert!(matches!(
        space.sample_uniform(&mut rng).unwrap_err(),
        Error::SpaceTooConstrained(_)
    ));
}

#[test]
fn conditional_child_sampled_iff_parent_on() {
    let space = conditional_space();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mode = space.param_index("mode").unwrap();
    let child = space.param_index("child").unwrap();
    for _ in 0..2_000 {
        let c = space.sample_uniform(&mut rng).unwrap();
        let parent_on = c.values[mode] == Value::Cat(0);
        assert_eq!(parent_on, !c.values[child].is_inactive());
    }
}

#[test]
fn discretize_linear_grid() {
    let space = SpaceBuilder::new()
        .real("r", 0.0, 1.0, 0.5, false)
        .build()
        .unwrap();
    let d = space.discretize(5).unwrap();
    let Domain::Categorical(vs) = &d.params()[0].domain else {
        panic!()
    };
    assert_eq!(vs, &["0", "0.25", "0.5", "0.75", "1"]);
}

#[test]
fn discretize_dedupes_integers() {
    let space = SpaceBuilder::new()
        .integer("i", 1, 3, 2, false)
        .build()
        .unwrap();
    let d = space.discretize(7).unwrap();
    let Domain::Categorical(vs) = &d.params()[0].domain else {
        panic!()
    };
    assert_eq!(vs, &["1", "2", "3"]);
}

#[test]
fn discretize_log_grid_has_equal_ratios() {
    let space = SpaceBuilder::new()
        .real("r", 0.01, 100.0, 1.0, true)
        .build()
        .unwrap();
    let d = space.discretize(5).unwrap();
    let Domain::Categorical(vs) = &d.params()[0].domain else {
        panic!()
    };
    let points: Vec<f64> = vs.iter().map(|v| v.parse().unwrap()).collect();
    // Log spacing: successive ratios all equal 10 (within float error).
    for w in points.windows(2) {
        assert!((w[1] / w[0] - 10.0).abs() < 1e-9, "{points:?}");
    }
    assert!((points[0] - 0.01).abs() < 1e-12);
    assert!((points[4] - 100.0).abs() < 1e-9);
}

#[test]
fn discretize_injects_default() {
    let space = SpaceBuilder::new()
        .real("r", 0.0, 1.0, 0.33, false)
        .build()
        .unwrap();
    let d = space.discretize(5).unwrap();
    let Domain::Categorical(vs) = &d.params()[0].domain else {
        panic!()
    };
    assert!(vs.contains(&"0.33".to_string()), "{vs:?}");
    assert_eq!(vs.len(), 5);
    // Default preservation: same active values as the original default.
    let orig = space.default_configuration().unwrap();
    let disc = d.default_configuration().unwrap();
    assert_eq!(
        d.render_value(0, &disc.values[0]),
        space.render_value(0, &orig.values[0])
    );
}

#[test]
fn neighbors_of_three_value_categorical() {
    let space = SpaceBuilder::new()
        .categorical("a", ["0", "1", "2"], "0")
        .build()
        .unwrap();
    let d = space.default_configuration().unwrap();
    let ns = space.neighbors(&d);
    assert_eq!(ns.len(), 2);
    assert!(ns.iter().any(|c| c.values[0] == Value::Cat(1)));
    assert!(ns.iter().any(|c| c.values[0] == Value::Cat(2)));
}

#[test]
fn neighbors_reactivate_children_at_defaults() {
    let space = SpaceBuilder::new()
        .categorical("mode", ["on", "off"], "off")
        .categorical("child", ["1", "2", "3"], "2")
        .condition("child", "mode", ["on"])
        .build()
        .unwrap();
    let d = space.default_configuration().unwrap();
    // Hand enumeration: flipping mode off->on is the only move; child enters
    // at its default value "2".
    let ns = space.neighbors(&d);
    assert_eq!(ns.len(), 1);
    let mode = space.param_index("mode").unwrap();
    let child = space.param_index("child").unwrap();
    assert_eq!(ns[0].values[mode], Value::Cat(0));
    assert_eq!(space.render_value(child, &ns[0].values[child]), "2");
}

#[test]
fn neighbors_exclude_forbidden() {
    let space = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .categorical("b", ["0", "1"], "1")
        .forbid([("a", "1"), ("b", "1")])
        .build()
        .unwrap();
    let d = space.default_configuration().unwrap();
    for n in space.neighbors(&d) {
        assert!(space.is_valid(&n));
    }
    // a=0,b=1: flipping a to 1 hits the forbidden pair, so only b moves.
    assert_eq!(space.neighbors(&d).len(), 1);
}

#[test]
fn canonical_equality_ignores_latent_values() {
    let space = conditional_space();
    let d = space.default_configuration().unwrap();
    let child = space.param_index("child").unwrap();
    let mut other_raw: Vec<Value> = d.values.clone();
    other_raw[child] = Value::Int(9); // latent value, overwritten by canonicalization
    let other = space.canonicalize(other_raw);
    assert_eq!(d, other);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_pcs("ok {a,b} [a]\nbroken {a,b [a]").unwrap_err();
    match err {
        Error::PcsSyntax { line, .. } => assert_eq!(line, 2),
        other => panic!("unexpected error {other:?}"),
    }

    let err = parse_pcs("child | missing in {on}\nchild {a,b} [a]").unwrap_err();
    assert!(matches!(err, Error::PcsSyntax { line: 1, .. }));

    let err = parse_pcs("p {a,b} [c]").unwrap_err();
    assert!(matches!(err, Error::PcsSyntax { line: 1, .. }));
}

#[test]
fn cyclic_conditions_rejected() {
    let err = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .categorical("b", ["0", "1"], "0")
        .condition("a", "b", ["0"])
        .condition("b", "a", ["0"])
        .build()
        .unwrap_err();
    assert!(matches!(err, Error::InvalidSpace(_)));
}

#[test]
fn forbidden_with_unknown_parameter_rejected() {
    let err = parse_pcs("a {0,1} [0]\n{zz=1}").unwrap_err();
    assert!(matches!(err, Error::PcsSyntax { line: 2, .. }));
}

#[test]
fn parse_assignment_round_trip() {
    let space = conditional_space();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let c = space.sample_uniform(&mut rng).unwrap();
        let text = c.canonical_string(&space);
        let back = space.parse_assignment(&text).unwrap();
        assert_eq!(c, back, "round-trip of '{text}'");
    }
}

#[test]
fn condition_depth_and_numeric_parents() {
    let chain = SpaceBuilder::new()
        .categorical("a", ["0", "1"], "0")
        .categorical("b", ["0", "1"], "0")
        .categorical("c", ["0", "1"], "0")
        .condition("b", "a", ["1"])
        .condition("c", "b", ["1"])
        .build()
        .unwrap();
    assert_eq!(chain.condition_depth(), 3);
    assert!(!chain.has_numeric_condition_parent());

    let numeric = SpaceBuilder::new()
        .integer("n", 0, 5, 0, false)
        .categorical("x", ["0", "1"], "0")
        .condition("x", "n", ["3"])
        .build()
        .unwrap();
    assert!(numeric.has_numeric_condition_parent());
    assert_eq!(numeric.condition_depth(), 2);
}
