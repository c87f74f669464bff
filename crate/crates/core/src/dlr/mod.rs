//! Abstract syntax of DLR_ifd: concepts, n-ary relations, inclusion axioms
//! and the identification / functional dependency assertions.
//!
//! Only core constructors are stored. Abbreviations (⊥, ⊔, ⇒, ≥, ∀, short
//! selections) live in [`ext`] and are expanded on construction, so every
//! axiom has a single stored normal form.

pub mod ext;
pub mod render;
pub mod text;
pub mod typing;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::value::ValueDomain;

pub use ext::{expand_concept, expand_relation, resugar_concept, resugar_relation, ExpandError, ExtConcept, ExtRelation};
pub use typing::{check_axiom, check_concept, check_relation, relation_arity, TypeError, TypeErrorKind};

/// A component (argument position) of a relation: a 1-based index, with the
/// component's name when it has one. The index is canonical; the name is
/// kept for display and serialization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Component {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Component {
    pub fn idx(index: usize) -> Self {
        Component { index, name: None }
    }

    pub fn named(index: usize, name: impl Into<String>) -> Self {
        Component { index, name: Some(name.into()) }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => f.write_str(n),
            None => write!(f, "{}", self.index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConceptExpr {
    /// ⊤₁
    Top,
    Atomic(String),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    /// ∃[i]R
    Exists(Component, Box<RelationExpr>),
    /// (≤ k [i]R)
    AtMost(u32, Component, Box<RelationExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationExpr {
    /// ⊤ₙ, n ≥ 2
    Top(usize),
    Atomic(String),
    /// ($i/n : C)
    Select { component: Component, arity: usize, concept: Box<ConceptExpr> },
    /// Difference with respect to ⊤ₙ.
    Not(Box<RelationExpr>),
    And(Box<RelationExpr>, Box<RelationExpr>),
}

impl ConceptExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    pub fn and(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(a), Box::new(b))
    }

    pub fn exists(c: Component, r: RelationExpr) -> Self {
        ConceptExpr::Exists(c, Box::new(r))
    }

    pub fn at_most(k: u32, c: Component, r: RelationExpr) -> Self {
        ConceptExpr::AtMost(k, c, Box::new(r))
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction(items: impl IntoIterator<Item = ConceptExpr>) -> Option<Self> {
        items.into_iter().reduce(ConceptExpr::and)
    }

    /// Collect atomic concept and relation names occurring in the expression.
    pub fn collect_names(&self, concepts: &mut BTreeSet<String>, relations: &mut BTreeSet<String>) {
        match self {
            ConceptExpr::Top => {}
            ConceptExpr::Atomic(a) => {
                concepts.insert(a.clone());
            }
            ConceptExpr::Not(c) => c.collect_names(concepts, relations),
            ConceptExpr::And(a, b) => {
                a.collect_names(concepts, relations);
                b.collect_names(concepts, relations);
            }
            ConceptExpr::Exists(_, r) | ConceptExpr::AtMost(_, _, r) => r.collect_names(concepts, relations),
        }
    }
}

impl RelationExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        RelationExpr::Atomic(name.into())
    }

    pub fn select(component: Component, arity: usize, concept: ConceptExpr) -> Self {
        RelationExpr::Select { component, arity, concept: Box::new(concept) }
    }

    pub fn not(r: RelationExpr) -> Self {
        RelationExpr::Not(Box::new(r))
    }

    pub fn and(a: RelationExpr, b: RelationExpr) -> Self {
        RelationExpr::And(Box::new(a), Box::new(b))
    }

    pub fn conjunction(items: impl IntoIterator<Item = RelationExpr>) -> Option<Self> {
        items.into_iter().reduce(RelationExpr::and)
    }

    pub fn collect_names(&self, concepts: &mut BTreeSet<String>, relations: &mut BTreeSet<String>) {
        match self {
            RelationExpr::Top(_) => {}
            RelationExpr::Atomic(p) => {
                relations.insert(p.clone());
            }
            RelationExpr::Select { concept, .. } => concept.collect_names(concepts, relations),
            RelationExpr::Not(r) => r.collect_names(concepts, relations),
            RelationExpr::And(a, b) => {
                a.collect_names(concepts, relations);
                b.collect_names(concepts, relations);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Axiom {
    ConceptIncl { lhs: ConceptExpr, rhs: ConceptExpr },
    RelationIncl { lhs: RelationExpr, rhs: RelationExpr },
    /// (id C [i₁]R₁, …, [i_h]R_h)
    Id { concept: String, parts: Vec<(Component, String)> },
    /// (fd R i₁, …, i_h → j), h ≥ 2
    Fd { relation: String, sources: Vec<Component>, target: Component },
}

impl Axiom {
    pub fn concept_incl(lhs: ConceptExpr, rhs: ConceptExpr) -> Self {
        Axiom::ConceptIncl { lhs, rhs }
    }

    pub fn relation_incl(lhs: RelationExpr, rhs: RelationExpr) -> Self {
        Axiom::RelationIncl { lhs, rhs }
    }

    pub fn collect_names(&self, concepts: &mut BTreeSet<String>, relations: &mut BTreeSet<String>) {
        match self {
            Axiom::ConceptIncl { lhs, rhs } => {
                lhs.collect_names(concepts, relations);
                rhs.collect_names(concepts, relations);
            }
            Axiom::RelationIncl { lhs, rhs } => {
                lhs.collect_names(concepts, relations);
                rhs.collect_names(concepts, relations);
            }
            Axiom::Id { concept, parts } => {
                concepts.insert(concept.clone());
                relations.extend(parts.iter().map(|(_, r)| r.clone()));
            }
            Axiom::Fd { relation, .. } => {
                relations.insert(relation.clone());
            }
        }
    }
}

/// Arity and optional component names of an atomic relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationSig {
    pub arity: usize,
    pub components: Vec<Option<String>>,
}

impl RelationSig {
    pub fn unnamed(arity: usize) -> Self {
        RelationSig { arity, components: vec![None; arity] }
    }

    pub fn named(names: Vec<Option<String>>) -> Self {
        RelationSig { arity: names.len(), components: names }
    }

    /// 1-based index of the component with this name.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.as_deref() == Some(name)).map(|i| i + 1)
    }

    /// Component `i` carrying its declared name, if any.
    pub fn component(&self, i: usize) -> Component {
        Component { index: i, name: self.components.get(i.wrapping_sub(1)).cloned().flatten() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("name `{0}` is already declared")]
    Duplicate(String),
    #[error("relation `{0}` has arity {1}; relations need arity at least 2")]
    BadArity(String, usize),
    #[error("relation `{0}` declares {1} component names for arity {2}")]
    ComponentCount(String, usize, usize),
    #[error("value domain attached to `{0}`, which is not a declared concept")]
    DomainWithoutConcept(String),
}

/// Atomic concepts, atomic relations and value domains. Concept and
/// relation names share one namespace; a value domain annotates a declared
/// concept and fixes its extension to the elements carrying a conforming
/// literal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub relations: BTreeMap<String, RelationSig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub value_domains: BTreeMap<String, ValueDomain>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.concepts.contains(name) || self.relations.contains_key(name)
    }

    pub fn add_concept(&mut self, name: impl Into<String>) -> Result<(), SignatureError> {
        let name = name.into();
        if self.contains(&name) {
            return Err(SignatureError::Duplicate(name));
        }
        self.concepts.insert(name);
        Ok(())
    }

    pub fn add_relation(&mut self, name: impl Into<String>, sig: RelationSig) -> Result<(), SignatureError> {
        let name = name.into();
        if self.contains(&name) {
            return Err(SignatureError::Duplicate(name));
        }
        if sig.arity < 2 {
            return Err(SignatureError::BadArity(name, sig.arity));
        }
        if sig.components.len() != sig.arity {
            return Err(SignatureError::ComponentCount(name, sig.components.len(), sig.arity));
        }
        self.relations.insert(name, sig);
        Ok(())
    }

    pub fn add_value_domain(&mut self, concept: impl Into<String>, dom: ValueDomain) -> Result<(), SignatureError> {
        let concept = concept.into();
        if !self.concepts.contains(&concept) {
            return Err(SignatureError::DomainWithoutConcept(concept));
        }
        self.value_domains.insert(concept, dom);
        Ok(())
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.relations.get(relation).map(|r| r.arity)
    }

    /// All arities of declared relations, ascending.
    pub fn arities(&self) -> BTreeSet<usize> {
        self.relations.values().map(|r| r.arity).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.relations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("axiom {index} is ill-typed: {errors:?}")]
pub struct IllTypedAxiom {
    pub index: usize,
    pub errors: Vec<TypeError>,
}

/// A finite, ordered list of axioms over a signature. Order is kept for
/// deterministic serialization; it has no semantic weight.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
}

impl KnowledgeBase {
    pub fn new(signature: Signature) -> Self {
        KnowledgeBase { signature, axioms: Vec::new() }
    }

    /// Build a knowledge base, checking every axiom.
    pub fn with_axioms(signature: Signature, axioms: Vec<Axiom>) -> Result<Self, IllTypedAxiom> {
        let mut kb = KnowledgeBase::new(signature);
        for ax in axioms {
            kb.push(ax)?;
        }
        Ok(kb)
    }

    /// Append a well-typed axiom. Exact duplicates are not stored twice; the
    /// index of the stored copy is returned either way.
    pub fn push(&mut self, ax: Axiom) -> Result<usize, IllTypedAxiom> {
        let errors = check_axiom(&ax, &self.signature);
        if !errors.is_empty() {
            return Err(IllTypedAxiom { index: self.axioms.len(), errors });
        }
        if let Some(i) = self.axioms.iter().position(|a| a == &ax) {
            return Ok(i);
        }
        self.axioms.push(ax);
        Ok(self.axioms.len() - 1)
    }

    /// Check every stored axiom against the signature.
    pub fn check(&self) -> Vec<(usize, TypeError)> {
        self.axioms
            .iter()
            .enumerate()
            .flat_map(|(i, ax)| check_axiom(ax, &self.signature).into_iter().map(move |e| (i, e)))
            .collect()
    }
}

/// The part of the signature actually occurring in the axioms. Declared but
/// unused names are dropped (callers may warn about them).
pub fn signature_of(kb: &KnowledgeBase) -> Signature {
    let mut concepts = BTreeSet::new();
    let mut relations = BTreeSet::new();
    for ax in &kb.axioms {
        ax.collect_names(&mut concepts, &mut relations);
    }
    let mut sig = Signature::new();
    for c in concepts {
        if let Some(dom) = kb.signature.value_domains.get(&c) {
            sig.value_domains.insert(c.clone(), dom.clone());
        }
        sig.concepts.insert(c);
    }
    for r in relations {
        let rs = kb.signature.relations.get(&r).cloned().unwrap_or_else(|| RelationSig::unnamed(2));
        sig.relations.insert(r, rs);
    }
    sig
}
