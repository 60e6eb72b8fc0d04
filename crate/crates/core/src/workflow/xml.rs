//! Reading and writing the workflow XML format.
//!
//! ```text
//! <workflow name="...">
//!   <actions>
//!     <action id="..." name="...">
//!       <property key="..." type="string|int|real|bool" value="..."/>
//!       <action .../>                 composite children
//!     </action>
//!   </actions>
//!   <assets> <asset id="..." name="...">properties</asset> </assets>
//!   <decisions>
//!     <decision id="..." name="..."> properties <branch condition="..." target="..."/> </decision>
//!   </decisions>
//!   <relationships>
//!     <relationship kind="successor|includes|produces|branch" from="..." to="..."/>
//!   </relationships>
//! </workflow>
//! ```
//!
//! The writer is canonical: two-space indentation, attributes in the order
//! shown, empty elements self-closed, `\n` line endings.

use std::fmt::Write as _;

use roxmltree::{Document, Node};

use super::model::*;
use super::WorkflowError;

/// Parses and validates a workflow document.
pub fn parse_workflow(xml_text: &str) -> Result<Workflow, WorkflowError> {
    let doc = Document::parse(xml_text).map_err(|e| {
        let pos = e.pos();
        WorkflowError::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    let reader = Reader { doc: &doc };
    let workflow = reader.workflow(doc.root_element())?;
    workflow.validate()?;
    Ok(workflow)
}

struct Reader<'a, 'input> {
    doc: &'a Document<'input>,
}

impl<'a, 'input> Reader<'a, 'input> {
    fn schema_error(&self, node: Node, message: impl Into<String>) -> WorkflowError {
        let pos = self.doc.text_pos_at(node.range().start);
        WorkflowError::Schema {
            line: pos.row,
            column: pos.col,
            message: message.into(),
        }
    }

    /// Checks the attribute set and returns the values of `required` in order.
    fn attrs<'n>(&self, node: Node<'n, 'input>, required: &[&str]) -> Result<Vec<&'n str>, WorkflowError> {
        for attr in node.attributes() {
            if attr.namespace().is_some() || !required.contains(&attr.name()) {
                return Err(self.schema_error(
                    node,
                    format!("unknown attribute '{}' on <{}>", attr.name(), node.tag_name().name()),
                ));
            }
        }
        required
            .iter()
            .map(|name| {
                node.attribute(*name).ok_or_else(|| {
                    self.schema_error(
                        node,
                        format!("<{}> is missing attribute '{name}'", node.tag_name().name()),
                    )
                })
            })
            .collect()
    }

    /// Element children, rejecting stray text. Comments and processing instructions are skipped.
    fn elements<'n>(&self, node: Node<'n, 'input>) -> Result<Vec<Node<'n, 'input>>, WorkflowError> {
        let mut out = Vec::new();
        for child in node.children() {
            if child.is_element() {
                if child.tag_name().namespace().is_some() {
                    return Err(self.schema_error(child, "namespaced elements are not part of the format"));
                }
                out.push(child);
            } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
                return Err(self.schema_error(
                    child,
                    format!("unexpected text inside <{}>", node.tag_name().name()),
                ));
            }
        }
        Ok(out)
    }

    fn unexpected(&self, child: Node, parent: &str) -> WorkflowError {
        self.schema_error(
            child,
            format!("unknown element <{}> inside <{parent}>", child.tag_name().name()),
        )
    }

    fn workflow(&self, root: Node<'a, 'input>) -> Result<Workflow, WorkflowError> {
        if root.tag_name().name() != "workflow" || root.tag_name().namespace().is_some() {
            return Err(self.schema_error(
                root,
                format!("root element must be <workflow>, found <{}>", root.tag_name().name()),
            ));
        }
        let [name] = self.attrs(root, &["name"])?[..] else {
            unreachable!()
        };
        let mut workflow = Workflow::new(name);
        let mut seen: Vec<&str> = Vec::new();
        for section in self.elements(root)? {
            let tag = section.tag_name().name();
            if !matches!(tag, "actions" | "assets" | "decisions" | "relationships") {
                return Err(self.unexpected(section, "workflow"));
            }
            if seen.contains(&tag) {
                return Err(self.schema_error(section, format!("section <{tag}> appears more than once")));
            }
            seen.push(tag);
            self.attrs(section, &[])?;
            for item in self.elements(section)? {
                match (tag, item.tag_name().name()) {
                    ("actions", "action") => self.action(item, &mut workflow.actions)?,
                    ("assets", "asset") => workflow.assets.push(self.asset(item)?),
                    ("decisions", "decision") => workflow.decisions.push(self.decision(item)?),
                    ("relationships", "relationship") => workflow.relationships.push(self.relationship(item)?),
                    _ => return Err(self.unexpected(item, tag)),
                }
            }
        }
        Ok(workflow)
    }

    /// Appends `node` and then its nested actions (pre-order) to `out`.
    fn action(&self, node: Node<'a, 'input>, out: &mut Vec<ActionNode>) -> Result<(), WorkflowError> {
        let [id, name] = self.attrs(node, &["id", "name"])?[..] else {
            unreachable!()
        };
        let slot = out.len();
        out.push(ActionNode::new(id, name));
        for child in self.elements(node)? {
            match child.tag_name().name() {
                "property" => {
                    let p = self.property(child)?;
                    out[slot].properties.push_raw(p);
                }
                "action" => {
                    let child_id = child.attribute("id").unwrap_or_default().to_owned();
                    self.action(child, out)?;
                    out[slot].children.push(child_id);
                }
                _ => return Err(self.unexpected(child, "action")),
            }
        }
        Ok(())
    }

    fn asset(&self, node: Node<'a, 'input>) -> Result<AssetNode, WorkflowError> {
        let [id, name] = self.attrs(node, &["id", "name"])?[..] else {
            unreachable!()
        };
        let mut asset = AssetNode::new(id, name);
        for child in self.elements(node)? {
            match child.tag_name().name() {
                "property" => asset.properties.push_raw(self.property(child)?),
                _ => return Err(self.unexpected(child, "asset")),
            }
        }
        Ok(asset)
    }

    fn decision(&self, node: Node<'a, 'input>) -> Result<DecisionNode, WorkflowError> {
        let [id, name] = self.attrs(node, &["id", "name"])?[..] else {
            unreachable!()
        };
        let mut decision = DecisionNode::new(id, name);
        for child in self.elements(node)? {
            match child.tag_name().name() {
                "property" => decision.properties.push_raw(self.property(child)?),
                "branch" => {
                    let [condition, target] = self.attrs(child, &["condition", "target"])?[..] else {
                        unreachable!()
                    };
                    self.elements(child)?.first().map_or(Ok(()), |n| Err(self.unexpected(*n, "branch")))?;
                    decision.branches.push(Branch {
                        condition: condition.to_owned(),
                        target: target.to_owned(),
                    });
                }
                _ => return Err(self.unexpected(child, "decision")),
            }
        }
        Ok(decision)
    }

    fn property(&self, node: Node<'a, 'input>) -> Result<Property, WorkflowError> {
        let [key, ty, value] = self.attrs(node, &["key", "type", "value"])?[..] else {
            unreachable!()
        };
        self.elements(node)?
            .first()
            .map_or(Ok(()), |n| Err(self.unexpected(*n, "property")))?;
        let ty: ValueType = ty.parse().map_err(|m: String| self.schema_error(node, m))?;
        let pos = self.doc.text_pos_at(node.range().start);
        Property::from_text(key, ty, value).map_err(|e| match e {
            WorkflowError::PropertyType { key, message } => WorkflowError::Schema {
                line: pos.row,
                column: pos.col,
                message: format!("property '{key}': {message}"),
            },
            other => other,
        })
    }

    fn relationship(&self, node: Node<'a, 'input>) -> Result<Relationship, WorkflowError> {
        let [kind, from, to] = self.attrs(node, &["kind", "from", "to"])?[..] else {
            unreachable!()
        };
        self.elements(node)?
            .first()
            .map_or(Ok(()), |n| Err(self.unexpected(*n, "relationship")))?;
        let kind: RelationKind = kind.parse().map_err(|m: String| self.schema_error(node, m))?;
        Ok(Relationship::new(kind, from, to))
    }
}

/// Canonical serialization. Deterministic for a given workflow.
pub fn serialize_workflow(workflow: &Workflow) -> String {
    let mut out = String::with_capacity(256 + 128 * workflow.actions.len());
    let _ = writeln!(out, "<workflow name=\"{}\">", escape(&workflow.name));

    let by_id: std::collections::HashMap<&str, &ActionNode> =
        workflow.actions.iter().map(|a| (a.id.as_str(), a)).collect();
    let nested: std::collections::HashSet<&str> = workflow
        .actions
        .iter()
        .flat_map(|a| a.children.iter().map(String::as_str))
        .collect();
    open_section(&mut out, "actions", workflow.actions.is_empty());
    for root in workflow.actions.iter().filter(|a| !nested.contains(a.id.as_str())) {
        write_action(&mut out, root, &by_id, 2);
    }
    close_section(&mut out, "actions", workflow.actions.is_empty());

    open_section(&mut out, "assets", workflow.assets.is_empty());
    for asset in &workflow.assets {
        let head = format!("asset id=\"{}\" name=\"{}\"", escape(&asset.id), escape(&asset.name));
        if asset.properties.is_empty() {
            let _ = writeln!(out, "    <{head}/>");
        } else {
            let _ = writeln!(out, "    <{head}>");
            write_properties(&mut out, &asset.properties, 3);
            out.push_str("    </asset>\n");
        }
    }
    close_section(&mut out, "assets", workflow.assets.is_empty());

    open_section(&mut out, "decisions", workflow.decisions.is_empty());
    for decision in &workflow.decisions {
        let head = format!(
            "decision id=\"{}\" name=\"{}\"",
            escape(&decision.id),
            escape(&decision.name)
        );
        if decision.properties.is_empty() && decision.branches.is_empty() {
            let _ = writeln!(out, "    <{head}/>");
            continue;
        }
        let _ = writeln!(out, "    <{head}>");
        write_properties(&mut out, &decision.properties, 3);
        for b in &decision.branches {
            let _ = writeln!(
                out,
                "      <branch condition=\"{}\" target=\"{}\"/>",
                escape(&b.condition),
                escape(&b.target)
            );
        }
        out.push_str("    </decision>\n");
    }
    close_section(&mut out, "decisions", workflow.decisions.is_empty());

    open_section(&mut out, "relationships", workflow.relationships.is_empty());
    for rel in &workflow.relationships {
        let _ = writeln!(
            out,
            "    <relationship kind=\"{}\" from=\"{}\" to=\"{}\"/>",
            rel.kind,
            escape(&rel.from),
            escape(&rel.to)
        );
    }
    close_section(&mut out, "relationships", workflow.relationships.is_empty());

    out.push_str("</workflow>\n");
    out
}

fn open_section(out: &mut String, tag: &str, empty: bool) {
    if empty {
        let _ = writeln!(out, "  <{tag}/>");
    } else {
        let _ = writeln!(out, "  <{tag}>");
    }
}

fn close_section(out: &mut String, tag: &str, empty: bool) {
    if !empty {
        let _ = writeln!(out, "  </{tag}>");
    }
}

fn write_action(
    out: &mut String,
    action: &ActionNode,
    by_id: &std::collections::HashMap<&str, &ActionNode>,
    depth: usize,
) {
    let pad = "  ".repeat(depth);
    let head = format!("action id=\"{}\" name=\"{}\"", escape(&action.id), escape(&action.name));
    if action.properties.is_empty() && action.children.is_empty() {
        let _ = writeln!(out, "{pad}<{head}/>");
        return;
    }
    let _ = writeln!(out, "{pad}<{head}>");
    write_properties(out, &action.properties, depth + 1);
    for child in &action.children {
        if let Some(node) = by_id.get(child.as_str()) {
            write_action(out, node, by_id, depth + 1);
        }
    }
    let _ = writeln!(out, "{pad}</action>");
}

fn write_properties(out: &mut String, props: &PropertySet, depth: usize) {
    let pad = "  ".repeat(depth);
    for p in props {
        let _ = writeln!(
            out,
            "{pad}<property key=\"{}\" type=\"{}\" value=\"{}\"/>",
            escape(&p.key),
            p.value_type(),
            escape(&p.value.to_text())
        );
    }
}

/// Attribute-value escaping. Whitespace control characters become character
/// references so attribute normalization on read does not alter them.
fn escape(s: &str) -> std::borrow::Cow<'_, str> {
    if !s.contains(['&', '<', '>', '"', '\'', '\n', '\r', '\t']) {
        return std::borrow::Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    std::borrow::Cow::Owned(out)
}
