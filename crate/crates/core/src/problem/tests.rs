use super::*;
use crate::cobot::reference::{w3_problem, w3_workflow};
use crate::workflow::{ActionIndexMap, ActionNode, Property, PropertyValue, Relationship, Workflow};

struct SetKey {
    name: &'static str,
    key: &'static str,
    value: i64,
}

impl MetaInformationAppender for SetKey {
    fn name(&self) -> &str {
        self.name
    }
    fn description(&self) -> &str {
        "test appender"
    }
    fn property_keys(&self) -> Vec<String> {
        vec![self.key.into()]
    }
    fn append(&self, w: &Workflow) -> Result<Workflow, PluginError> {
        let mut out = w.clone();
        for a in &mut out.actions {
            a.properties.upsert(Property::new(self.key, self.value)?);
        }
        Ok(out)
    }
}

struct Breaker;

impl MetaInformationAppender for Breaker {
    fn name(&self) -> &str {
        "breaker"
    }
    fn description(&self) -> &str {
        "adds a dangling successor"
    }
    fn append(&self, w: &Workflow) -> Result<Workflow, PluginError> {
        let mut out = w.clone();
        out.relationships.push(Relationship::successor("a1", "ghost"));
        Ok(out)
    }
}

/// Writes a real gene per action as property `Speed`.
struct SpeedManipulator;

impl WorkflowManipulator for SpeedManipulator {
    fn name(&self) -> &str {
        "speed"
    }
    fn description(&self) -> &str {
        "per-action speed factor"
    }
    fn encoding_spec(&self, map: &ActionIndexMap) -> SubEncodingSpec {
        SubEncodingSpec::real("speed", vec![(0.5, 2.0); map.len()])
    }
    fn manipulate(&self, w: &mut Workflow, map: &ActionIndexMap, value: &SubValue) -> Result<(), PluginError> {
        let SubValue::Real(v) = value else {
            return Err(PluginError::Encoding("expected reals".into()));
        };
        for (i, id) in map.iter() {
            w.upsert_property(id, Property::new("Speed", v[i])?)?;
        }
        Ok(())
    }
}

/// Reorders the successor chain according to a permutation.
struct OrderManipulator;

impl WorkflowManipulator for OrderManipulator {
    fn name(&self) -> &str {
        "order"
    }
    fn description(&self) -> &str {
        "execution order"
    }
    fn encoding_spec(&self, map: &ActionIndexMap) -> SubEncodingSpec {
        SubEncodingSpec::permutation("order", map.len())
    }
    fn manipulate(&self, w: &mut Workflow, map: &ActionIndexMap, value: &SubValue) -> Result<(), PluginError> {
        let SubValue::Permutation(p) = value else {
            return Err(PluginError::Encoding("expected a permutation".into()));
        };
        w.relationships.retain(|r| r.kind != crate::workflow::RelationKind::Successor);
        for pair in p.windows(2) {
            w.relationships.push(Relationship::successor(
                map.id(pair[0]).unwrap(),
                map.id(pair[1]).unwrap(),
            ));
        }
        Ok(())
    }
}

struct TotalSpeed {
    maximize: bool,
}

impl PrimitiveFitnessCalculator for TotalSpeed {
    fn objective_spec(&self) -> ObjectiveSpec {
        if self.maximize {
            ObjectiveSpec::maximize("total_speed")
        } else {
            ObjectiveSpec::minimize("total_speed")
        }
    }
    fn check_precondition(&self, w: &Workflow) -> bool {
        w.actions.iter().all(|a| a.properties.get("Speed").is_some())
    }
    fn calculate(&self, w: &Workflow, _: &ActionIndexMap) -> Result<f64, PluginError> {
        Ok(w.actions
            .iter()
            .filter_map(|a| a.properties.get("Speed")?.value.as_real())
            .sum())
    }
}

/// Position of the first action in the execution order.
struct FirstIndex;

impl PrimitiveFitnessCalculator for FirstIndex {
    fn objective_spec(&self) -> ObjectiveSpec {
        ObjectiveSpec::minimize("first_index")
    }
    fn check_precondition(&self, _: &Workflow) -> bool {
        true
    }
    fn calculate(&self, w: &Workflow, map: &ActionIndexMap) -> Result<f64, PluginError> {
        let order = w.execution_order()?;
        Ok(map.index_of(&order[0]).unwrap() as f64)
    }
}

struct PairCalc(&'static str, usize);

impl ComplexFitnessCalculator for PairCalc {
    fn name(&self) -> &str {
        self.0
    }
    fn objective_specs(&self) -> Vec<ObjectiveSpec> {
        vec![
            ObjectiveSpec::minimize(format!("{}_a", self.0)),
            ObjectiveSpec::minimize(format!("{}_b", self.0)),
        ]
    }
    fn check_precondition(&self, _: &Workflow) -> bool {
        true
    }
    fn calculate(&self, _: &Workflow, _: &ActionIndexMap) -> Result<Vec<f64>, PluginError> {
        Ok(vec![1.0; self.1])
    }
}

fn mixed_problem() -> AssembledProblem {
    let registry = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_manipulator(OrderManipulator)
        .with_primitive(TotalSpeed { maximize: true })
        .with_primitive(FirstIndex);
    assemble(w3_workflow(), registry).unwrap()
}

#[test]
fn no_appenders_leave_base_untouched() {
    let registry = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_primitive(TotalSpeed { maximize: false })
        .with_primitive(FirstIndex);
    let p = assemble(w3_workflow(), registry).unwrap();
    assert_eq!(p.base_workflow, w3_workflow());
    assert_eq!(p.index_map.ids(), ["a1", "a2", "a3"]);
}

#[test]
fn same_key_appenders_last_writer_wins_with_lint() {
    let registry = PluginRegistry::new()
        .with_appender(SetKey {
            name: "first",
            key: "Shift",
            value: 1,
        })
        .with_appender(SetKey {
            name: "second",
            key: "Shift",
            value: 2,
        })
        .with_manipulator(SpeedManipulator)
        .with_primitive(TotalSpeed { maximize: false })
        .with_primitive(FirstIndex);
    let p = assemble(w3_workflow(), registry).unwrap();
    for a in &p.base_workflow.actions {
        assert_eq!(a.properties.get("Shift").unwrap().value, PropertyValue::Int(2));
        assert_eq!(a.properties.len(), 1);
    }
    assert_eq!(p.lints.len(), 1);
    assert!(p.lints[0].contains("first, second") && p.lints[0].contains("Shift"));
}

#[test]
fn appender_producing_invalid_workflow_is_named() {
    let registry = PluginRegistry::new()
        .with_appender(Breaker)
        .with_manipulator(SpeedManipulator)
        .with_primitive(TotalSpeed { maximize: false })
        .with_primitive(FirstIndex);
    match assemble(w3_workflow(), registry) {
        Err(AssemblyError::Appender { name, .. }) => assert_eq!(name, "breaker"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn registry_invariants() {
    let no_manip = PluginRegistry::new().with_primitive(FirstIndex).with_primitive(TotalSpeed { maximize: false });
    assert!(matches!(assemble(w3_workflow(), no_manip), Err(AssemblyError::Registry(_))));
    let one_objective = PluginRegistry::new().with_manipulator(SpeedManipulator).with_primitive(FirstIndex);
    assert!(matches!(assemble(w3_workflow(), one_objective), Err(AssemblyError::Registry(_))));
    let dup = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_primitive(FirstIndex)
        .with_primitive(FirstIndex);
    assert!(matches!(
        assemble(w3_workflow(), dup),
        Err(AssemblyError::DuplicateObjective(n)) if n == "first_index"
    ));
    let dup_encoding = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_manipulator(SpeedManipulator)
        .with_primitive(FirstIndex)
        .with_primitive(TotalSpeed { maximize: false });
    assert!(matches!(assemble(w3_workflow(), dup_encoding), Err(AssemblyError::Encoding(_))));
    let mut bad = w3_workflow();
    bad.relationships.push(Relationship::successor("a3", "a1"));
    assert!(matches!(
        assemble(bad, PluginRegistry::new().with_manipulator(SpeedManipulator).with_primitive(FirstIndex).with_primitive(TotalSpeed { maximize: false })),
        Err(AssemblyError::InvalidBase(_))
    ));
}

#[test]
fn objective_order_complex_first_then_primitive() {
    let registry = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_primitive(FirstIndex)
        .with_complex(PairCalc("x", 2))
        .with_primitive(TotalSpeed { maximize: false })
        .with_complex(PairCalc("y", 2));
    let names = |p: &AssembledProblem| p.objectives.iter().map(|o| o.name.clone()).collect::<Vec<_>>();
    let p = assemble(w3_workflow(), registry.clone()).unwrap();
    assert_eq!(names(&p), ["x_a", "x_b", "y_a", "y_b", "first_index", "total_speed"]);
    assert_eq!(names(&assemble(w3_workflow(), registry).unwrap()), names(&p));
}

#[test]
fn complex_calculator_arity_is_checked() {
    let registry = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_complex(PairCalc("x", 3));
    let p = assemble(w3_workflow(), registry).unwrap();
    let g = Genotype(vec![SubValue::Real(vec![1.0; 3])]);
    assert!(matches!(p.evaluate(&g), Err(EvaluationError::Arity { expected: 2, found: 3, .. })));
}

#[test]
fn maximized_objectives_are_negated_internally() {
    let p = mixed_problem();
    let g = Genotype(vec![SubValue::Real(vec![1.0, 1.5, 2.0]), SubValue::Permutation(vec![2, 0, 1])]);
    let v = p.evaluate(&g).unwrap();
    assert_eq!(v.values, [-4.5, 2.0]);
    assert_eq!(p.report(&v), [4.5, 2.0]);
    let inf = ObjectiveVector::infeasible(2, 1);
    assert_eq!(p.report(&inf), [f64::NEG_INFINITY, f64::INFINITY]);
}

#[test]
fn decode_applies_manipulators_in_order_and_keeps_base() {
    let p = mixed_problem();
    let before = p.base_workflow.clone();
    let g = Genotype(vec![SubValue::Real(vec![0.5, 0.5, 0.5]), SubValue::Permutation(vec![1, 2, 0])]);
    for _ in 0..3 {
        let w = p.decode(&g).unwrap();
        assert_eq!(w.execution_order().unwrap(), ["a2", "a3", "a1"]);
    }
    assert_eq!(p.base_workflow, before);
    assert_eq!(p.evaluate(&g).unwrap(), p.evaluate(&g).unwrap());
}

#[test]
fn decode_rejects_mismatched_genotype() {
    let p = w3_problem();
    let short = Genotype::from_bit_str("10").unwrap();
    match p.decode(&short) {
        Err(EvaluationError::Encoding(v)) => assert_eq!(
            v,
            [GenotypeViolation::Length {
                part: "cobot_utilization".into(),
                expected: 3,
                found: 2
            }]
        ),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn w3_bits_101_flag_indices_0_and_2() {
    let p = w3_problem();
    let w = p.decode(&Genotype::from_bit_str("101").unwrap()).unwrap();
    let flagged: Vec<_> = w
        .actions
        .iter()
        .filter(|a| a.properties.get("IsCobotUtilized").unwrap().value == PropertyValue::Bool(true))
        .map(|a| p.index_map.index_of(&a.id).unwrap())
        .collect();
    assert_eq!(flagged, [0, 2]);
    assert_eq!(p.evaluate(&Genotype::from_bit_str("000").unwrap()).unwrap().values, [45.0, 6.0]);
    assert_eq!(p.evaluate(&Genotype::from_bit_str("111").unwrap()).unwrap().values, [95.0, 0.0]);
    assert_eq!(p.evaluate(&Genotype::from_bit_str("100").unwrap()).unwrap().values, [60.0, 3.0]);
}

#[test]
fn genotype_validation() {
    let spec = MultiEncodingSpec::new(vec![
        SubEncodingSpec::binary("b", 2),
        SubEncodingSpec::real("r", vec![(0.0, 1.0)]),
        SubEncodingSpec::permutation("p", 3),
    ])
    .unwrap();
    let good = Genotype(vec![
        SubValue::Binary(vec![true, false]),
        SubValue::Real(vec![0.25]),
        SubValue::Permutation(vec![2, 0, 1]),
    ]);
    assert_eq!(validate_genotype(&spec, &good), Ok(()));

    let bad = Genotype(vec![
        SubValue::Binary(vec![true, false]),
        SubValue::Real(vec![1.5]),
        SubValue::Permutation(vec![0, 0, 2]),
    ]);
    let v = validate_genotype(&spec, &bad).unwrap_err();
    assert_eq!(v.len(), 2);
    assert_eq!(v[0].to_string(), "sub-encoding 'r' dimension 0: value 1.5 outside bounds [0, 1]");
    assert_eq!(v[1].to_string(), "sub-encoding 'p': not a permutation");

    let wrong = Genotype(vec![SubValue::Real(vec![0.5, 0.5])]);
    let v = validate_genotype(&spec, &wrong).unwrap_err();
    assert!(matches!(v[0], GenotypeViolation::Arity { expected: 3, found: 1 }));
    assert!(matches!(v[1], GenotypeViolation::Kind { .. }));
    assert!(validate_genotype(&spec, &Genotype(vec![
        SubValue::Binary(vec![true, false]),
        SubValue::Real(vec![0.5]),
        SubValue::Permutation(vec![0, 1, 3]),
    ])).is_err());
}

#[test]
fn encoding_spec_invariants() {
    assert!(MultiEncodingSpec::new(vec![SubEncodingSpec::binary("b", 0)]).is_err());
    assert!(MultiEncodingSpec::new(vec![SubEncodingSpec::real("r", vec![(1.0, 1.0)])]).is_err());
    assert!(MultiEncodingSpec::new(vec![SubEncodingSpec::binary("x", 1), SubEncodingSpec::permutation("x", 2)]).is_err());
}

#[test]
fn composite_actions_are_enumerated_uniformly() {
    let mut w = Workflow::new("c");
    let mut c = ActionNode::new("c1", "group");
    c.children = vec!["a1".into()];
    w.actions = vec![c, ActionNode::new("a1", "leaf")];
    let registry = PluginRegistry::new()
        .with_manipulator(SpeedManipulator)
        .with_primitive(TotalSpeed { maximize: false })
        .with_primitive(FirstIndex);
    let p = assemble(w, registry).unwrap();
    assert_eq!(p.encoding.total_length(), 2);
}
