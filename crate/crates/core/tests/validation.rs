mod support;

use pddl21::ground::GroundAtom;
use pddl21::simple_sem::Failure;
use pddl21::syntax::parse_plan;
use pddl21::Time;

use support::{instance, run_fixture, validate, value, EPS};

#[test]
fn jug_pour_moves_the_contents() {
    let (i, v, t) = run_fixture("jug", "jug-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    let x = &t.final_state().numeric;
    // j2 holds its 4 plus the 6 poured from j1.
    assert_eq!(value(&i, x, "(amount j1)"), Some(0.0));
    assert_eq!(value(&i, x, "(amount j2)"), Some(4.0 + 6.0));
}

#[test]
fn jug_overflow_is_inapplicable() {
    let i = instance("jug-domain.pddl", "jug-problem.pddl");
    // j1 has room 8 - 6 = 2 < 4.
    let (v, _) = validate(&i, &parse_plan("(pour j2 j1)").unwrap(), EPS);
    match v.failure {
        Some(Failure::Inapplicable { unsatisfied, .. }) => {
            assert_eq!(unsatisfied, ["(>= (- (capacity j1) (amount j1)) (amount j2))"])
        }
        f => panic!("{f:?}"),
    }
}

#[test]
fn boiling_duration_is_computed() {
    let (i, v, t) = run_fixture("boil", "boil-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    assert_eq!(value(&i, &t.final_state().numeric, "(temperature pan1)"), Some(100.0));
    let i = instance("boil-domain.pddl", "boil-problem.pddl");
    // (100 - 20) / 2 = 40, so 39 violates the duration constraint.
    let (v, _) = validate(&i, &parse_plan("1: (heat-water pan1) [39]").unwrap(), EPS);
    match v.failure {
        Some(Failure::Inapplicable { culprit, unsatisfied, .. }) => {
            assert!(culprit.action.ends_with("[start]"));
            assert_eq!(unsatisfied.len(), 1);
            assert!(unsatisfied[0].contains("39"), "{unsatisfied:?}");
        }
        f => panic!("{f:?}"),
    }
}

#[test]
fn bounded_heating_is_discrete() {
    let (i, v, t) = run_fixture("heat-bounded", "heat-bounded-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    assert_eq!(value(&i, &t.final_state().numeric, "(temperature pan1)"), Some(20.0 + 2.0 * 20.0));
}

#[test]
fn rover_needs_a_recharge() {
    let (_, v, _) = run_fixture("rover", "rover-plan.txt", EPS);
    match v.failure {
        // energy 5 < travel 3 * use rate 2
        Some(Failure::Inapplicable { time, .. }) => assert_eq!(time, Time::from_integer(1)),
        f => panic!("{f:?}"),
    }
    let (i, v, t) = run_fixture("rover", "rover-recharge-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    assert_eq!(value(&i, &t.final_state().numeric, "(energy r1)"), Some(5.0 + 5.0 * 4.0 - 3.0 * 2.0));
}

#[test]
fn egg_reads_the_changing_temperature() {
    let (_, v, _) = run_fixture("egg", "egg-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    let (_, v, _) = run_fixture("egg", "egg-plan-early.txt", EPS);
    match v.failure {
        Some(Failure::Inapplicable { time, .. }) => assert_eq!(time, Time::from_integer(30)),
        f => panic!("{f:?}"),
    }
}

#[test]
fn load_truck_completes() {
    let (_, v, t) = run_fixture("load-truck", "load-truck-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    let last = t.final_state();
    assert_eq!(last.time, Time::new(5001, 1000));
    assert!(last.visible_atoms().any(|a| a == &GroundAtom::new("in", vec!["o1".into(), "t1".into()])));
}

#[test]
fn sequential_interference_is_fine() {
    let (_, v, _) = run_fixture("interference", "interference-plan-sequential.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
}

#[test]
fn plans_start_after_zero() {
    let i = instance("vehicle-domain.pddl", "vehicle-problem.pddl");
    let plan = parse_plan("0: (drive car paris berlin full half)").unwrap();
    let (v, _) = validate(&i, &plan, EPS);
    assert!(matches!(v.failure, Some(Failure::NonPositiveTime { .. })), "{:?}", v.failure);
}

#[test]
fn overlapping_invariants_hold() {
    let (_, v, t) = run_fixture("overlap", "overlap-plan.txt", EPS);
    assert!(v.valid, "{:?}", v.failure);
    let times: Vec<Time> = t.happenings.iter().map(|h| h.time).collect();
    let n = Time::from_integer;
    assert_eq!(times, [n(1), Time::new(5, 2), n(4), n(5), n(6), Time::new(17, 2), n(11)]);
}

#[test]
fn refuel_in_the_wrong_place_breaks_the_invariant() {
    let i = instance("flight-domain.pddl", "flight-problem.pddl");
    // Refuelling at 8 comes after the tank runs dry at 7.
    let (v, _) = validate(&i, &parse_plan("1: (fly plane london rome) [8]\n8: (midair-refuel plane)").unwrap(), EPS);
    match v.failure {
        Some(Failure::InvariantViolated { from, to, crossing: Some(c), .. }) => {
            // Happenings 1, 8 and 9 put a monitor at 4.5.
            assert_eq!((from, to), (Time::new(9, 2), Time::from_integer(8)));
            assert!((c - 7.0).abs() <= EPS);
        }
        f => panic!("{f:?}"),
    }
}
