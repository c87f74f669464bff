//! Well-typing: arities agree, components are in range, names are declared.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Axiom, Component, ConceptExpr, RelationExpr, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "code")]
pub enum TypeErrorKind {
    ArityMismatch { left: usize, right: usize },
    ComponentOutOfRange { index: usize, arity: usize },
    ComponentNameMismatch { name: String, index: usize },
    UnknownConcept { name: String },
    UnknownRelation { name: String },
    /// A relation name used as a concept or vice versa.
    WrongKind { name: String },
    BadTopArity { n: usize },
    FdTooFewSources { count: usize },
    FdDuplicateComponent { index: usize },
    IdEmpty,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TypeErrorKind::*;
        match self {
            ArityMismatch { left, right } => write!(f, "arity mismatch: {left} vs {right}"),
            ComponentOutOfRange { index, arity } => {
                write!(f, "component {index} out of range for arity {arity}")
            }
            ComponentNameMismatch { name, index } => {
                write!(f, "component {index} is not named `{name}` in the relations in scope")
            }
            UnknownConcept { name } => write!(f, "undeclared concept `{name}`"),
            UnknownRelation { name } => write!(f, "undeclared relation `{name}`"),
            WrongKind { name } => write!(f, "`{name}` is declared with the other kind (concept vs relation)"),
            BadTopArity { n } => write!(f, "⊤{n} needs n ≥ 2"),
            FdTooFewSources { count } => write!(f, "fd needs at least 2 source components, got {count}"),
            FdDuplicateComponent { index } => write!(f, "fd mentions component {index} twice"),
            IdEmpty => f.write_str("id needs at least one relation"),
        }
    }
}

impl TypeErrorKind {
    pub fn code(&self) -> &'static str {
        use TypeErrorKind::*;
        match self {
            ArityMismatch { .. } => "arity-mismatch",
            ComponentOutOfRange { .. } => "component-out-of-range",
            ComponentNameMismatch { .. } => "component-name-mismatch",
            UnknownConcept { .. } => "unknown-concept",
            UnknownRelation { .. } => "unknown-relation",
            WrongKind { .. } => "wrong-kind",
            BadTopArity { .. } => "bad-top-arity",
            FdTooFewSources { .. } => "fd-too-few-sources",
            FdDuplicateComponent { .. } => "fd-duplicate-component",
            IdEmpty => "id-empty",
        }
    }
}

/// A typing error with the path from the checked root to the offending
/// subexpression, e.g. `rhs/arg/left`. The root is the empty path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub path: Vec<String>,
}

impl TypeError {
    pub fn path_str(&self) -> String {
        if self.path.is_empty() {
            "root".into()
        } else {
            self.path.join("/")
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.kind, self.path_str())
    }
}

struct Checker<'a> {
    sig: &'a Signature,
    path: Vec<String>,
    errors: Vec<TypeError>,
}

impl<'a> Checker<'a> {
    fn err(&mut self, kind: TypeErrorKind) {
        self.errors.push(TypeError { kind, path: self.path.clone() });
    }

    fn at<T>(&mut self, step: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(step.to_string());
        let out = f(self);
        self.path.pop();
        out
    }

    fn concept(&mut self, c: &ConceptExpr) {
        match c {
            ConceptExpr::Top => {}
            ConceptExpr::Atomic(a) => {
                if !self.sig.concepts.contains(a) {
                    if self.sig.relations.contains_key(a) {
                        self.err(TypeErrorKind::WrongKind { name: a.clone() });
                    } else {
                        self.err(TypeErrorKind::UnknownConcept { name: a.clone() });
                    }
                }
            }
            ConceptExpr::Not(x) => self.at("arg", |s| s.concept(x)),
            ConceptExpr::And(x, y) => {
                self.at("left", |s| s.concept(x));
                self.at("right", |s| s.concept(y));
            }
            ConceptExpr::Exists(i, r) | ConceptExpr::AtMost(_, i, r) => {
                let n = self.at("rel", |s| s.relation(r));
                if let Some(n) = n {
                    self.component(i, n, r);
                }
            }
        }
    }

    fn component(&mut self, i: &Component, n: usize, scope: &RelationExpr) {
        if i.index == 0 || i.index > n {
            self.err(TypeErrorKind::ComponentOutOfRange { index: i.index, arity: n });
            return;
        }
        if let Some(name) = &i.name {
            let mut anchors = Vec::new();
            relational_anchors(scope, &mut anchors);
            let named: Vec<_> = anchors
                .iter()
                .filter_map(|p| self.sig.relations.get(*p))
                .filter(|rs| rs.components.iter().any(Option::is_some))
                .collect();
            if !named.is_empty() && !named.iter().any(|rs| rs.position(name) == Some(i.index)) {
                self.err(TypeErrorKind::ComponentNameMismatch { name: name.clone(), index: i.index });
            }
        }
    }

    /// Returns the arity when it is well defined.
    fn relation(&mut self, r: &RelationExpr) -> Option<usize> {
        match r {
            RelationExpr::Top(n) => {
                if *n < 2 {
                    self.err(TypeErrorKind::BadTopArity { n: *n });
                    None
                } else {
                    Some(*n)
                }
            }
            RelationExpr::Atomic(p) => match self.sig.relations.get(p) {
                Some(rs) => Some(rs.arity),
                None => {
                    if self.sig.concepts.contains(p) {
                        self.err(TypeErrorKind::WrongKind { name: p.clone() });
                    } else {
                        self.err(TypeErrorKind::UnknownRelation { name: p.clone() });
                    }
                    None
                }
            },
            RelationExpr::Select { component, arity, concept } => {
                self.at("concept", |s| s.concept(concept));
                if *arity < 2 {
                    self.err(TypeErrorKind::BadTopArity { n: *arity });
                    return None;
                }
                if component.index == 0 || component.index > *arity {
                    self.err(TypeErrorKind::ComponentOutOfRange { index: component.index, arity: *arity });
                }
                Some(*arity)
            }
            RelationExpr::Not(x) => self.at("arg", |s| s.relation(x)),
            RelationExpr::And(x, y) => {
                let a = self.at("left", |s| s.relation(x));
                let b = self.at("right", |s| s.relation(y));
                match (a, b) {
                    (Some(a), Some(b)) if a != b => {
                        self.err(TypeErrorKind::ArityMismatch { left: a, right: b });
                        None
                    }
                    (a, b) => a.or(b),
                }
            }
        }
    }

    fn relation_component(&mut self, rel: &str, i: &Component) -> Option<usize> {
        let Some(rs) = self.sig.relations.get(rel) else {
            if self.sig.concepts.contains(rel) {
                self.err(TypeErrorKind::WrongKind { name: rel.to_string() });
            } else {
                self.err(TypeErrorKind::UnknownRelation { name: rel.to_string() });
            }
            return None;
        };
        self.component(i, rs.arity, &RelationExpr::Atomic(rel.to_string()));
        Some(rs.arity)
    }

    fn axiom(&mut self, ax: &Axiom) {
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                self.at("lhs", |s| s.concept(lhs));
                self.at("rhs", |s| s.concept(rhs));
            }
            Axiom::RelationIncl { lhs, rhs } => {
                let a = self.at("lhs", |s| s.relation(lhs));
                let b = self.at("rhs", |s| s.relation(rhs));
                if let (Some(a), Some(b)) = (a, b) {
                    if a != b {
                        self.err(TypeErrorKind::ArityMismatch { left: a, right: b });
                    }
                }
            }
            Axiom::Id { concept, parts } => {
                self.at("concept", |s| s.concept(&ConceptExpr::Atomic(concept.clone())));
                if parts.is_empty() {
                    self.err(TypeErrorKind::IdEmpty);
                }
                for (k, (i, rel)) in parts.iter().enumerate() {
                    self.at(&format!("part[{k}]"), |s| s.relation_component(rel, i));
                }
            }
            Axiom::Fd { relation, sources, target } => {
                if sources.len() < 2 {
                    self.err(TypeErrorKind::FdTooFewSources { count: sources.len() });
                }
                let mut seen = std::collections::BTreeSet::new();
                for (k, i) in sources.iter().chain(std::iter::once(target)).enumerate() {
                    let step = if k < sources.len() { format!("source[{k}]") } else { "target".into() };
                    self.at(&step, |s| {
                        s.relation_component(relation, i);
                        if !seen.insert(i.index) {
                            s.err(TypeErrorKind::FdDuplicateComponent { index: i.index });
                        }
                    });
                }
            }
        }
    }
}

fn relational_anchors<'a>(r: &'a RelationExpr, out: &mut Vec<&'a str>) {
    match r {
        RelationExpr::Atomic(p) => out.push(p),
        RelationExpr::Top(_) | RelationExpr::Select { .. } => {}
        RelationExpr::Not(x) => relational_anchors(x, out),
        RelationExpr::And(x, y) => {
            relational_anchors(x, out);
            relational_anchors(y, out);
        }
    }
}

pub fn check_concept(c: &ConceptExpr, sig: &Signature) -> Vec<TypeError> {
    let mut ch = Checker { sig, path: Vec::new(), errors: Vec::new() };
    ch.concept(c);
    ch.errors
}

pub fn check_relation(r: &RelationExpr, sig: &Signature) -> Vec<TypeError> {
    let mut ch = Checker { sig, path: Vec::new(), errors: Vec::new() };
    ch.relation(r);
    ch.errors
}

pub fn check_axiom(ax: &Axiom, sig: &Signature) -> Vec<TypeError> {
    let mut ch = Checker { sig, path: Vec::new(), errors: Vec::new() };
    ch.axiom(ax);
    ch.errors
}

/// Arity of a well-typed relation expression.
pub fn relation_arity(r: &RelationExpr, sig: &Signature) -> Option<usize> {
    let mut ch = Checker { sig, path: Vec::new(), errors: Vec::new() };
    let n = ch.relation(r);
    if ch.errors.is_empty() {
        n
    } else {
        None
    }
}
