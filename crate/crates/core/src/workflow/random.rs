//! Seeded generator of valid workflows, used for round-trip testing.

use rand::seq::SliceRandom;
use rand::Rng;

use super::model::{ActionNode, AssetNode, Branch, DecisionNode, Property, PropertySet, PropertyValue, RelationKind, Relationship, Workflow};

const TEXT_PIECES: &[&str] = &[
    "bolt", "M6", " ", "a&b", "<tag>", "\"quoted\"", "it's", "tab\there", "line\nbreak", "cr\r", "Überprüfung", "ネジ",
    "  padded  ", "x>y",
];

fn text(rng: &mut impl Rng) -> String {
    let n = rng.random_range(0..4);
    (0..n).map(|_| TEXT_PIECES[rng.random_range(0..TEXT_PIECES.len())]).collect()
}

fn value(rng: &mut impl Rng) -> PropertyValue {
    match rng.random_range(0..4) {
        0 => PropertyValue::String(text(rng)),
        1 => PropertyValue::Int(rng.random_range(i64::MIN..=i64::MAX) >> rng.random_range(0..63)),
        2 => {
            let mantissa: f64 = rng.random_range(-1.0..1.0);
            PropertyValue::Real(mantissa * 10f64.powi(rng.random_range(-12..13)))
        }
        _ => PropertyValue::Bool(rng.random_bool(0.5)),
    }
}

fn properties(rng: &mut impl Rng) -> PropertySet {
    let mut set = PropertySet::default();
    let count = rng.random_range(0..4);
    for k in 0..count {
        set.upsert(Property::new(format!("P{k}_{}", rng.random_range(0..100)), value(rng)).expect("finite value, non-empty key"));
    }
    set
}

/// Appends one to three sibling actions (and their subtrees) in pre-order. Returns the sibling ids.
fn actions(rng: &mut impl Rng, out: &mut Vec<ActionNode>, budget: &mut usize, depth: usize) -> Vec<String> {
    let mut roots = Vec::new();
    let siblings = rng.random_range(1..=3);
    for _ in 0..siblings {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        let id = format!("a{}", out.len() + 1);
        let mut node = ActionNode::new(id.clone(), text(rng));
        node.properties = properties(rng);
        let slot = out.len();
        out.push(node);
        if depth > 0 && rng.random_bool(0.3) {
            let children = actions(rng, out, budget, depth - 1);
            out[slot].children = children;
        }
        roots.push(id);
    }
    roots
}

/// A structurally valid workflow with up to `max_actions` actions, plus
/// assets, decisions and relationships of every kind.
pub fn random_workflow(rng: &mut impl Rng, max_actions: usize) -> Workflow {
    let mut wf = Workflow::new(text(rng));
    let mut budget = max_actions.max(1);
    while budget > 0 && rng.random_bool(0.8) || wf.actions.is_empty() {
        actions(rng, &mut wf.actions, &mut budget, 2);
        if budget == 0 {
            break;
        }
    }
    let action_ids: Vec<String> = wf.actions.iter().map(|a| a.id.clone()).collect();

    for k in 0..rng.random_range(0..3) {
        let mut asset = AssetNode::new(format!("s{}", k + 1), text(rng));
        asset.properties = properties(rng);
        wf.assets.push(asset);
    }
    for k in 0..rng.random_range(0..3) {
        let mut d = DecisionNode::new(format!("d{}", k + 1), text(rng));
        d.properties = properties(rng);
        for _ in 0..rng.random_range(1..=3) {
            d.branches.push(Branch {
                condition: text(rng),
                target: action_ids[rng.random_range(0..action_ids.len())].clone(),
            });
        }
        wf.decisions.push(d);
    }

    // successor edges follow a random topological order, so they cannot form a cycle
    let mut flow: Vec<String> = action_ids.iter().chain(wf.decisions.iter().map(|d| &d.id)).cloned().collect();
    flow.shuffle(rng);
    let is_decision = |id: &str| id.starts_with('d');
    let mut rels: Vec<Relationship> = Vec::new();
    for i in 0..flow.len() {
        for j in (i + 1)..flow.len() {
            if rng.random_bool(0.25) && !(is_decision(&flow[i]) && is_decision(&flow[j])) {
                rels.push(Relationship::successor(flow[i].clone(), flow[j].clone()));
            }
        }
    }
    for asset in &wf.assets {
        for a in &action_ids {
            if rng.random_bool(0.2) {
                let kind = if rng.random_bool(0.5) { RelationKind::Includes } else { RelationKind::Produces };
                let (from, to) = if rng.random_bool(0.5) { (a, &asset.id) } else { (&asset.id, a) };
                rels.push(Relationship::new(kind, from.clone(), to.clone()));
            }
        }
    }
    for d in &wf.decisions {
        if let Some(b) = d.branches.first() {
            rels.push(Relationship::new(RelationKind::Branch, d.id.clone(), b.target.clone()));
        }
    }
    rels.shuffle(rng);
    wf.relationships = rels;
    debug_assert!(wf.validate().is_ok(), "{:?}", wf.violations());
    wf
}
