//! Reader and writer for the small RDF/XML dialect used by test ontologies.
//!
//! The dialect is a tree of `rdf:Description` elements. A description is
//! named by a `Person` attribute (top-level people) or an `ID` attribute.
//! Any other element is a leaf property, and `<ns:name>Value</ns:name>`
//! becomes the concept `name:Value`. Namespace prefixes are dropped.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::concept::ConceptId;
use crate::tree::{OntologyTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("malformed document: {0}")]
    MalformedXml(String),
    #[error("concept {0} appears more than once")]
    DuplicateConcept(String),
    #[error("document contains no concepts")]
    EmptyDocument,
    #[error("invalid concept token: {0}")]
    InvalidConcept(String),
    #[error("token {0:?} cannot be written as a leaf property")]
    UnserializableToken(String),
    #[error("not a forest: {0}")]
    NotAForest(#[from] TreeError),
}

const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const FOAF_NS: &str = "http://xmlns.com/foaf/0.1/";

enum Frame {
    Envelope,
    Description(ConceptId),
    Leaf { name: String, text: String },
}

fn malformed(msg: impl Into<String>) -> RdfError {
    RdfError::MalformedXml(msg.into())
}

fn local_name(raw: &[u8]) -> Result<String, RdfError> {
    let name = std::str::from_utf8(raw).map_err(|e| malformed(e.to_string()))?;
    Ok(name.rsplit(':').next().unwrap_or(name).to_string())
}

fn description_id(start: &BytesStart<'_>) -> Result<String, RdfError> {
    for attr in start.attributes() {
        let attr = attr.map_err(|e| malformed(e.to_string()))?;
        let key = local_name(attr.key.as_ref())?;
        if key == "Person" || key == "ID" {
            let value = attr.unescape_value().map_err(|e| malformed(e.to_string()))?;
            return Ok(value.into_owned());
        }
    }
    Err(malformed("Description without a Person or ID attribute"))
}

struct Builder {
    tree: OntologyTree,
    seen: BTreeSet<ConceptId>,
}

impl Builder {
    fn concept(&mut self, token: String) -> Result<ConceptId, RdfError> {
        let id = ConceptId::new(token.clone()).map_err(|e| RdfError::InvalidConcept(e.to_string()))?;
        if !self.seen.insert(id.clone()) {
            return Err(RdfError::DuplicateConcept(token));
        }
        self.tree.add_node(id.clone());
        Ok(id)
    }

    fn attach(&mut self, stack: &[Frame], child: &ConceptId) {
        if let Some(Frame::Description(parent)) = stack.last() {
            self.tree.add_edge(parent.clone(), child.clone());
        }
    }
}

pub fn parse_rdf(text: &str) -> Result<OntologyTree, RdfError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut stack: Vec<Frame> = Vec::new();
    let mut builder = Builder {
        tree: OntologyTree::new(),
        seen: BTreeSet::new(),
    };
    let mut saw_envelope = false;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| malformed(format!("at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(ref start) | Event::Empty(ref start) if stack.is_empty() => {
                if saw_envelope {
                    return Err(malformed("more than one root element"));
                }
                if local_name(start.name().as_ref())? != "RDF" {
                    return Err(malformed("root element must be rdf:RDF"));
                }
                saw_envelope = true;
                if matches!(event, Event::Start(_)) {
                    stack.push(Frame::Envelope);
                }
            }
            Event::Start(ref start) | Event::Empty(ref start) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = local_name(start.name().as_ref())?;
                if matches!(stack.last(), Some(Frame::Leaf { .. })) {
                    return Err(malformed(format!("element <{name}> nested inside a property")));
                }
                if name == "Description" {
                    let id = builder.concept(description_id(start)?)?;
                    builder.attach(&stack, &id);
                    if !is_empty {
                        stack.push(Frame::Description(id));
                    }
                } else {
                    if !matches!(stack.last(), Some(Frame::Description(_))) {
                        return Err(malformed(format!("property <{name}> outside a Description")));
                    }
                    if is_empty {
                        return Err(malformed(format!("property <{name}> has no value")));
                    }
                    stack.push(Frame::Leaf {
                        name,
                        text: String::new(),
                    });
                }
            }
            Event::Text(t) => {
                let content = t.unescape().map_err(|e| malformed(e.to_string()))?;
                match stack.last_mut() {
                    Some(Frame::Leaf { text, .. }) => text.push_str(&content),
                    _ if content.trim().is_empty() => {}
                    _ => return Err(malformed(format!("unexpected text {content:?}"))),
                }
            }
            Event::CData(c) => match stack.last_mut() {
                Some(Frame::Leaf { text, .. }) => {
                    text.push_str(std::str::from_utf8(&c).map_err(|e| malformed(e.to_string()))?)
                }
                _ => return Err(malformed("unexpected CDATA")),
            },
            Event::End(_) => match stack.pop() {
                Some(Frame::Leaf { name, text }) => {
                    let value = text.trim();
                    if value.is_empty() {
                        return Err(malformed(format!("property <{name}> has no value")));
                    }
                    let id = builder.concept(format!("{name}:{value}"))?;
                    builder.attach(&stack, &id);
                }
                Some(_) => {}
                None => return Err(malformed("unbalanced end tag")),
            },
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if !stack.is_empty() {
        return Err(malformed("unexpected end of document"));
    }
    if builder.tree.is_empty() {
        return Err(RdfError::EmptyDocument);
    }
    Ok(builder.tree)
}

fn is_xml_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Splits a leaf token into element name and text, if it can be written.
fn leaf_parts(token: &str) -> Option<(&str, &str)> {
    let (name, value) = token.split_once(':')?;
    let trimmed = value.trim() == value && !value.is_empty();
    (is_xml_name(name) && trimmed).then_some((name, value))
}

fn write_node(tree: &OntologyTree, node: &ConceptId, depth: usize, root: bool, out: &mut String) -> Result<(), RdfError> {
    let indent = "  ".repeat(depth);
    let children = tree.children(node.as_str());
    if children.is_empty() && !root {
        let (name, value) =
            leaf_parts(node.as_str()).ok_or_else(|| RdfError::UnserializableToken(node.to_string()))?;
        let _ = writeln!(out, "{indent}<{name}>{}</{name}>", escape(value));
        return Ok(());
    }
    let attr = if root { "foaf:Person" } else { "rdf:ID" };
    if children.is_empty() {
        let _ = writeln!(out, "{indent}<rdf:Description {attr}=\"{}\"/>", escape(node.as_str()));
        return Ok(());
    }
    let _ = writeln!(out, "{indent}<rdf:Description {attr}=\"{}\">", escape(node.as_str()));
    for child in children {
        write_node(tree, child, depth + 1, false, out)?;
    }
    let _ = writeln!(out, "{indent}</rdf:Description>");
    Ok(())
}

/// Writes a forest with two-space indentation and children in token order.
pub fn write_rdf(tree: &OntologyTree) -> Result<String, RdfError> {
    tree.validate()?;
    let mut out = String::new();
    let _ = writeln!(out, "<rdf:RDF xmlns:rdf=\"{RDF_NS}\" xmlns:foaf=\"{FOAF_NS}\">");
    for root in tree.roots() {
        write_node(tree, &root, 1, true, &mut out)?;
    }
    out.push_str("</rdf:RDF>\n");
    Ok(out)
}
