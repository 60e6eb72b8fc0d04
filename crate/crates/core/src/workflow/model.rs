use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::WorkflowError;

/// Scalar type tag of a [`PropertyValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    String,
    Int,
    Real,
    Bool,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::String => "string",
            ValueType::Int => "int",
            ValueType::Real => "real",
            ValueType::Bool => "bool",
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValueType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "string" => Ok(ValueType::String),
            "int" => Ok(ValueType::Int),
            "real" => Ok(ValueType::Real),
            "bool" => Ok(ValueType::Bool),
            other => Err(format!("unknown property type '{other}'")),
        }
    }
}

/// A typed scalar. Reals must be finite.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    String(String),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl PropertyValue {
    pub fn value_type(&self) -> ValueType {
        match self {
            PropertyValue::String(_) => ValueType::String,
            PropertyValue::Int(_) => ValueType::Int,
            PropertyValue::Real(_) => ValueType::Real,
            PropertyValue::Bool(_) => ValueType::Bool,
        }
    }

    /// Parses `text` strictly as `ty`; no coercion between types.
    pub fn parse(ty: ValueType, text: &str) -> Result<Self, String> {
        match ty {
            ValueType::String => Ok(PropertyValue::String(text.to_owned())),
            ValueType::Int => text
                .parse::<i64>()
                .map(PropertyValue::Int)
                .map_err(|_| format!("'{text}' is not a valid int")),
            ValueType::Real => {
                let trimmed_ok = !text.is_empty() && text.trim() == text;
                match text.parse::<f64>() {
                    Ok(v) if trimmed_ok && v.is_finite() => Ok(PropertyValue::Real(v)),
                    _ => Err(format!("'{text}' is not a finite real")),
                }
            }
            ValueType::Bool => match text {
                "true" => Ok(PropertyValue::Bool(true)),
                "false" => Ok(PropertyValue::Bool(false)),
                _ => Err(format!("'{text}' is not a valid bool (expected true|false)")),
            },
        }
    }

    /// Canonical text form; `parse(value_type(), to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        match self {
            PropertyValue::String(s) => s.clone(),
            PropertyValue::Int(i) => i.to_string(),
            // Display for f64 is the shortest representation that round-trips.
            PropertyValue::Real(r) => r.to_string(),
            PropertyValue::Bool(b) => b.to_string(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            PropertyValue::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            PropertyValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            PropertyValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PropertyValue::String(s) => Some(s),
            _ => None,
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            PropertyValue::Real(r) if !r.is_finite() => Err(format!("real value {r} is not finite")),
            PropertyValue::String(s) => check_text(s),
            _ => Ok(()),
        }
    }
}

impl From<f64> for PropertyValue {
    fn from(v: f64) -> Self {
        PropertyValue::Real(v)
    }
}

impl From<i64> for PropertyValue {
    fn from(v: i64) -> Self {
        PropertyValue::Int(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(v: bool) -> Self {
        PropertyValue::Bool(v)
    }
}

impl From<&str> for PropertyValue {
    fn from(v: &str) -> Self {
        PropertyValue::String(v.to_owned())
    }
}

/// Generic key/value annotation attached to an action, asset or decision.
#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub key: String,
    pub value: PropertyValue,
}

impl Property {
    pub fn new(key: impl Into<String>, value: impl Into<PropertyValue>) -> Result<Self, WorkflowError> {
        let property = Property {
            key: key.into(),
            value: value.into(),
        };
        property.check()?;
        Ok(property)
    }

    /// Builds a property from its textual form, failing when `text` does not parse as `ty`.
    pub fn from_text(key: impl Into<String>, ty: ValueType, text: &str) -> Result<Self, WorkflowError> {
        let key = key.into();
        let value = PropertyValue::parse(ty, text).map_err(|message| WorkflowError::PropertyType {
            key: key.clone(),
            message,
        })?;
        Property::new(key, value)
    }

    pub fn value_type(&self) -> ValueType {
        self.value.value_type()
    }

    fn check(&self) -> Result<(), WorkflowError> {
        let err = |message: String| WorkflowError::PropertyType {
            key: self.key.clone(),
            message,
        };
        if self.key.is_empty() {
            return Err(err("property key must not be empty".into()));
        }
        check_text(&self.key).map_err(err)?;
        self.value.check().map_err(err)
    }
}

/// Ordered property list with unique keys.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertySet(Vec<Property>);

impl PropertySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&Property> {
        self.0.iter().find(|p| p.key == key)
    }

    /// Replaces the property with the same key in place, or appends it.
    pub fn upsert(&mut self, property: Property) {
        match self.0.iter_mut().find(|p| p.key == property.key) {
            Some(slot) => *slot = property,
            None => self.0.push(property),
        }
    }

    pub fn remove(&mut self, key: &str) -> Option<Property> {
        let pos = self.0.iter().position(|p| p.key == key)?;
        Some(self.0.remove(pos))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Property> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends without the uniqueness check. Parsers use this so that
    /// duplicates surface in validation instead of being silently merged.
    pub(crate) fn push_raw(&mut self, property: Property) {
        self.0.push(property);
    }
}

impl<'a> IntoIterator for &'a PropertySet {
    type Item = &'a Property;
    type IntoIter = std::slice::Iter<'a, Property>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FromIterator<Property> for PropertySet {
    fn from_iter<I: IntoIterator<Item = Property>>(iter: I) -> Self {
        let mut set = PropertySet::new();
        for p in iter {
            set.upsert(p);
        }
        set
    }
}

/// A task (grab, move, screw, ...). Composite actions list their children by id.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionNode {
    pub id: String,
    pub name: String,
    pub properties: PropertySet,
    pub children: Vec<String>,
}

impl ActionNode {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        ActionNode {
            id: id.into(),
            name: name.into(),
            properties: PropertySet::new(),
            children: Vec::new(),
        }
    }

    pub fn is_composite(&self) -> bool {
        !self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssetNode {
    pub id: String,
    pub name: String,
    pub properties: PropertySet,
}

impl AssetNode {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        AssetNode {
            id: id.into(),
            name: name.into(),
            properties: PropertySet::new(),
        }
    }
}

/// One guarded outgoing path of a decision. The condition is opaque text.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub condition: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionNode {
    pub id: String,
    pub name: String,
    pub properties: PropertySet,
    pub branches: Vec<Branch>,
}

impl DecisionNode {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        DecisionNode {
            id: id.into(),
            name: name.into(),
            properties: PropertySet::new(),
            branches: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Successor,
    Includes,
    Produces,
    Branch,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Successor => "successor",
            RelationKind::Includes => "includes",
            RelationKind::Produces => "produces",
            RelationKind::Branch => "branch",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "successor" => Ok(RelationKind::Successor),
            "includes" => Ok(RelationKind::Includes),
            "produces" => Ok(RelationKind::Produces),
            "branch" => Ok(RelationKind::Branch),
            other => Err(format!("unknown relationship kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relationship {
    pub kind: RelationKind,
    pub from: String,
    pub to: String,
}

impl Relationship {
    pub fn new(kind: RelationKind, from: impl Into<String>, to: impl Into<String>) -> Self {
        Relationship {
            kind,
            from: from.into(),
            to: to.into(),
        }
    }

    pub fn successor(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self::new(RelationKind::Successor, from, to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Action,
    Asset,
    Decision,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Action => "action",
            ElementKind::Asset => "asset",
            ElementKind::Decision => "decision",
        })
    }
}

/// A single broken invariant found by [`Workflow::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyId,
    DuplicateId(String),
    DuplicatePropertyKey { element: String, key: String },
    InvalidProperty { element: String, key: String, message: String },
    InvalidText { context: String, message: String },
    DanglingReference { context: String, id: String },
    MultipleParents { child: String },
    CompositionCycle(Vec<String>),
    HierarchyOrder { expected: Vec<String> },
    DecisionWithoutBranches(String),
    InvalidEndpoints { kind: RelationKind, from: String, to: String },
    DuplicateRelationship { kind: RelationKind, from: String, to: String },
    SuccessorCycle(Vec<String>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyId => write!(f, "element with empty id"),
            Violation::DuplicateId(id) => write!(f, "duplicate id '{id}'"),
            Violation::DuplicatePropertyKey { element, key } => {
                write!(f, "element '{element}' has duplicate property key '{key}'")
            }
            Violation::InvalidProperty { element, key, message } => {
                write!(f, "element '{element}' property '{key}': {message}")
            }
            Violation::InvalidText { context, message } => write!(f, "{context}: {message}"),
            Violation::DanglingReference { context, id } => {
                write!(f, "{context} references undeclared id '{id}'")
            }
            Violation::MultipleParents { child } => {
                write!(f, "action '{child}' is a child of more than one composite")
            }
            Violation::CompositionCycle(ids) => {
                write!(f, "composite actions form a cycle: {}", ids.join(", "))
            }
            Violation::HierarchyOrder { expected } => write!(
                f,
                "actions are not stored in pre-order of the composition hierarchy (expected {})",
                expected.join(", ")
            ),
            Violation::DecisionWithoutBranches(id) => write!(f, "decision '{id}' has no branches"),
            Violation::InvalidEndpoints { kind, from, to } => {
                write!(f, "{kind} relationship '{from}' -> '{to}' connects incompatible elements")
            }
            Violation::DuplicateRelationship { kind, from, to } => {
                write!(f, "duplicate {kind} relationship '{from}' -> '{to}'")
            }
            Violation::SuccessorCycle(ids) => write!(f, "successor cycle through: {}", ids.join(", ")),
        }
    }
}

/// Attributed workflow graph: actions, assets and decisions connected by typed relationships.
///
/// `actions` holds every action, composite or leaf, in document order (a
/// composite precedes its children).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workflow {
    pub name: String,
    pub actions: Vec<ActionNode>,
    pub assets: Vec<AssetNode>,
    pub decisions: Vec<DecisionNode>,
    pub relationships: Vec<Relationship>,
}

impl Workflow {
    pub fn new(name: impl Into<String>) -> Self {
        Workflow {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn element_kind(&self, id: &str) -> Option<ElementKind> {
        if self.actions.iter().any(|a| a.id == id) {
            Some(ElementKind::Action)
        } else if self.assets.iter().any(|a| a.id == id) {
            Some(ElementKind::Asset)
        } else if self.decisions.iter().any(|d| d.id == id) {
            Some(ElementKind::Decision)
        } else {
            None
        }
    }

    pub fn action(&self, id: &str) -> Option<&ActionNode> {
        self.actions.iter().find(|a| a.id == id)
    }

    pub fn action_mut(&mut self, id: &str) -> Option<&mut ActionNode> {
        self.actions.iter_mut().find(|a| a.id == id)
    }

    pub fn asset(&self, id: &str) -> Option<&AssetNode> {
        self.assets.iter().find(|a| a.id == id)
    }

    pub fn decision(&self, id: &str) -> Option<&DecisionNode> {
        self.decisions.iter().find(|d| d.id == id)
    }

    /// Actions without children.
    pub fn leaf_actions(&self) -> impl Iterator<Item = &ActionNode> {
        self.actions.iter().filter(|a| !a.is_composite())
    }

    pub fn properties(&self, id: &str) -> Option<&PropertySet> {
        if let Some(a) = self.action(id) {
            return Some(&a.properties);
        }
        if let Some(a) = self.asset(id) {
            return Some(&a.properties);
        }
        self.decision(id).map(|d| &d.properties)
    }

    fn properties_mut(&mut self, id: &str) -> Option<&mut PropertySet> {
        if let Some(a) = self.actions.iter_mut().find(|a| a.id == id) {
            return Some(&mut a.properties);
        }
        if let Some(a) = self.assets.iter_mut().find(|a| a.id == id) {
            return Some(&mut a.properties);
        }
        self.decisions.iter_mut().find(|d| d.id == id).map(|d| &mut d.properties)
    }

    /// Looks up a property. A missing key is `Ok(None)`; a missing element is an error.
    pub fn get_property(&self, element_id: &str, key: &str) -> Result<Option<&Property>, WorkflowError> {
        self.properties(element_id)
            .map(|props| props.get(key))
            .ok_or_else(|| WorkflowError::UnknownElement(element_id.to_owned()))
    }

    /// Returns a copy of the workflow with `property` upserted on `element_id`.
    pub fn set_property(&self, element_id: &str, property: Property) -> Result<Workflow, WorkflowError> {
        let mut updated = self.clone();
        updated.upsert_property(element_id, property)?;
        Ok(updated)
    }

    /// In-place variant of [`Workflow::set_property`], for callers that own a private copy.
    pub fn upsert_property(&mut self, element_id: &str, property: Property) -> Result<(), WorkflowError> {
        property.check()?;
        let props = self
            .properties_mut(element_id)
            .ok_or_else(|| WorkflowError::UnknownElement(element_id.to_owned()))?;
        props.upsert(property);
        Ok(())
    }

    /// Direct successors of `id` in relationship order.
    pub fn successors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.relationships
            .iter()
            .filter(move |r| r.kind == RelationKind::Successor && r.from == id)
            .map(|r| r.to.as_str())
    }

    pub fn predecessors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.relationships
            .iter()
            .filter(move |r| r.kind == RelationKind::Successor && r.to == id)
            .map(|r| r.from.as_str())
    }

    /// A topological order of actions and decisions under the Successor
    /// relation. Ties are broken by document order (actions, then decisions).
    pub fn execution_order(&self) -> Result<Vec<String>, WorkflowError> {
        let (graph, nodes) = self.successor_graph();
        let cycles = successor_cycles(&graph, &nodes);
        if !cycles.is_empty() {
            return Err(WorkflowError::Validation(
                cycles.into_iter().map(Violation::SuccessorCycle).collect(),
            ));
        }
        let mut indegree: Vec<usize> = graph
            .node_indices()
            .map(|n| graph.neighbors_directed(n, petgraph::Direction::Incoming).count())
            .collect();
        let mut ready: std::collections::BTreeSet<usize> =
            (0..nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(next) = ready.pop_first() {
            order.push(nodes[next].clone());
            for succ in graph.neighbors(NodeIndex::new(next)) {
                indegree[succ.index()] -= 1;
                if indegree[succ.index()] == 0 {
                    ready.insert(succ.index());
                }
            }
        }
        Ok(order)
    }

    fn successor_graph(&self) -> (DiGraph<(), ()>, Vec<String>) {
        let nodes: Vec<String> = self
            .actions
            .iter()
            .map(|a| a.id.clone())
            .chain(self.decisions.iter().map(|d| d.id.clone()))
            .collect();
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut graph = DiGraph::with_capacity(nodes.len(), self.relationships.len());
        for _ in &nodes {
            graph.add_node(());
        }
        for rel in self.relationships.iter().filter(|r| r.kind == RelationKind::Successor) {
            if let (Some(&a), Some(&b)) = (index.get(rel.from.as_str()), index.get(rel.to.as_str())) {
                graph.update_edge(NodeIndex::new(a), NodeIndex::new(b), ());
            }
        }
        (graph, nodes)
    }

    /// Checks every structural invariant and reports all violations at once.
    pub fn validate(&self) -> Result<(), WorkflowError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(WorkflowError::Validation(violations))
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(message) = check_text(&self.name) {
            out.push(Violation::InvalidText {
                context: "workflow name".into(),
                message,
            });
        }

        let mut kinds: HashMap<&str, ElementKind> = HashMap::new();
        let elements = self
            .actions
            .iter()
            .map(|a| (a.id.as_str(), a.name.as_str(), &a.properties, ElementKind::Action))
            .chain(
                self.assets
                    .iter()
                    .map(|a| (a.id.as_str(), a.name.as_str(), &a.properties, ElementKind::Asset)),
            )
            .chain(
                self.decisions
                    .iter()
                    .map(|d| (d.id.as_str(), d.name.as_str(), &d.properties, ElementKind::Decision)),
            );
        for (id, name, props, kind) in elements {
            if id.is_empty() {
                out.push(Violation::EmptyId);
            }
            for (what, text) in [("id", id), ("name", name)] {
                if let Err(message) = check_text(text) {
                    out.push(Violation::InvalidText {
                        context: format!("{kind} '{id}' {what}"),
                        message,
                    });
                }
            }
            if kinds.insert(id, kind).is_some() {
                out.push(Violation::DuplicateId(id.to_owned()));
            }
            let mut seen = HashSet::new();
            for p in props {
                if !seen.insert(p.key.as_str()) {
                    out.push(Violation::DuplicatePropertyKey {
                        element: id.to_owned(),
                        key: p.key.clone(),
                    });
                }
                if let Err(WorkflowError::PropertyType { key, message }) = p.check() {
                    out.push(Violation::InvalidProperty {
                        element: id.to_owned(),
                        key,
                        message,
                    });
                }
            }
        }

        self.check_hierarchy(&kinds, &mut out);

        for d in &self.decisions {
            if d.branches.is_empty() {
                out.push(Violation::DecisionWithoutBranches(d.id.clone()));
            }
            for b in &d.branches {
                if let Err(message) = check_text(&b.condition) {
                    out.push(Violation::InvalidText {
                        context: format!("decision '{}' branch condition", d.id),
                        message,
                    });
                }
                if !kinds.contains_key(b.target.as_str()) {
                    out.push(Violation::DanglingReference {
                        context: format!("branch of decision '{}'", d.id),
                        id: b.target.clone(),
                    });
                }
            }
        }

        let mut triples = HashSet::new();
        for rel in &self.relationships {
            let from = kinds.get(rel.from.as_str()).copied();
            let to = kinds.get(rel.to.as_str()).copied();
            for (endpoint, kind) in [(&rel.from, from), (&rel.to, to)] {
                if kind.is_none() {
                    out.push(Violation::DanglingReference {
                        context: format!("{} relationship '{}' -> '{}'", rel.kind, rel.from, rel.to),
                        id: endpoint.clone(),
                    });
                }
            }
            if let (Some(from), Some(to)) = (from, to) {
                if !endpoints_allowed(rel.kind, from, to) {
                    out.push(Violation::InvalidEndpoints {
                        kind: rel.kind,
                        from: rel.from.clone(),
                        to: rel.to.clone(),
                    });
                }
            }
            if !triples.insert(rel) {
                out.push(Violation::DuplicateRelationship {
                    kind: rel.kind,
                    from: rel.from.clone(),
                    to: rel.to.clone(),
                });
            }
        }

        let (graph, nodes) = self.successor_graph();
        out.extend(successor_cycles(&graph, &nodes).into_iter().map(Violation::SuccessorCycle));
        out
    }

    fn check_hierarchy(&self, kinds: &HashMap<&str, ElementKind>, out: &mut Vec<Violation>) {
        let mut parent_count: HashMap<&str, usize> = HashMap::new();
        for a in &self.actions {
            for child in &a.children {
                match kinds.get(child.as_str()) {
                    Some(ElementKind::Action) => *parent_count.entry(child.as_str()).or_default() += 1,
                    _ => out.push(Violation::DanglingReference {
                        context: format!("children of action '{}'", a.id),
                        id: child.clone(),
                    }),
                }
            }
        }
        let mut multi: Vec<&str> = parent_count.iter().filter(|(_, &n)| n > 1).map(|(c, _)| *c).collect();
        multi.sort_unstable();
        for child in &multi {
            out.push(Violation::MultipleParents {
                child: (*child).to_owned(),
            });
        }
        if !multi.is_empty() {
            return;
        }

        let by_id: HashMap<&str, &ActionNode> = self.actions.iter().map(|a| (a.id.as_str(), a)).collect();
        let mut visited: HashSet<&str> = HashSet::new();
        let mut preorder: Vec<String> = Vec::with_capacity(self.actions.len());
        for root in self.actions.iter().filter(|a| !parent_count.contains_key(a.id.as_str())) {
            let mut stack = vec![root.id.as_str()];
            while let Some(id) = stack.pop() {
                if !visited.insert(id) {
                    continue;
                }
                preorder.push(id.to_owned());
                if let Some(node) = by_id.get(id) {
                    for child in node.children.iter().rev() {
                        if by_id.contains_key(child.as_str()) {
                            stack.push(child);
                        }
                    }
                }
            }
        }
        let unreachable: Vec<String> = self
            .actions
            .iter()
            .filter(|a| !visited.contains(a.id.as_str()))
            .map(|a| a.id.clone())
            .collect();
        if !unreachable.is_empty() {
            out.push(Violation::CompositionCycle(unreachable));
            return;
        }
        let stored: Vec<&str> = self.actions.iter().map(|a| a.id.as_str()).collect();
        if preorder.len() == stored.len() && preorder.iter().map(String::as_str).ne(stored.iter().copied()) {
            out.push(Violation::HierarchyOrder { expected: preorder });
        }
    }
}

fn endpoints_allowed(kind: RelationKind, from: ElementKind, to: ElementKind) -> bool {
    use ElementKind::*;
    match kind {
        RelationKind::Successor => matches!((from, to), (Action, Action) | (Action, Decision) | (Decision, Action)),
        RelationKind::Includes | RelationKind::Produces => matches!((from, to), (Action, Asset) | (Asset, Action)),
        RelationKind::Branch => from == Decision && matches!(to, Action | Decision),
    }
}

/// Strongly connected components that form a cycle, each as a sorted id list.
fn successor_cycles(graph: &DiGraph<(), ()>, nodes: &[String]) -> Vec<Vec<String>> {
    let mut cycles: Vec<Vec<String>> = tarjan_scc(graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut ids: Vec<String> = scc.iter().map(|n| nodes[n.index()].clone()).collect();
            ids.sort();
            ids
        })
        .collect();
    cycles.sort();
    cycles
}

/// Rejects characters that XML 1.0 cannot carry.
fn check_text(s: &str) -> Result<(), String> {
    match s
        .chars()
        .find(|&c| (c < '\u{20}' && !matches!(c, '\t' | '\n' | '\r')) || matches!(c, '\u{FFFE}' | '\u{FFFF}'))
    {
        Some(c) => Err(format!("contains character U+{:04X} not representable in XML", c as u32)),
        None => Ok(()),
    }
}

/// Stable bijection between the original enumeration order of actions and their ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionIndexMap {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl ActionIndexMap {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, index: usize) -> Option<&str> {
        self.ids.get(index).map(String::as_str)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str)> {
        self.ids.iter().enumerate().map(|(i, id)| (i, id.as_str()))
    }
}

/// Assigns indices 0..n-1 to all actions (composites before their children) in document order.
pub fn enumerate_actions(workflow: &Workflow) -> ActionIndexMap {
    let ids: Vec<String> = workflow.actions.iter().map(|a| a.id.clone()).collect();
    let lookup = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    ActionIndexMap { ids, lookup }
}
