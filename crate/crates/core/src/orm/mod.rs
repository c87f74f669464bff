//! ORM2 models: object and value types, fact types with named or indexed
//! roles, subtyping, and the graphical constraints.

pub mod inventory;
pub mod parser;
pub mod serialize;
pub mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diag::Span;
use crate::value::{Restriction, ValueDomain};

pub use inventory::{constraint_inventory, construct_rule, Construct, RuleKey};
pub use parser::parse_orm;
pub use serialize::serialize_orm;
pub use validate::{join_columns, validate_model};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Role {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub player: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Derivation {
    #[default]
    None,
    Derived,
    /// Derived and stored; the 1-based role holding the computed result.
    DerivedAndStored(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactType {
    pub name: String,
    /// Surface reading; carries no meaning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<String>,
    pub roles: Vec<Role>,
    #[serde(default)]
    pub derivation: Derivation,
}

impl FactType {
    pub fn arity(&self) -> usize {
        self.roles.len()
    }

    /// Role name as used in the logic: the explicit name, else `r{i}`.
    pub fn role_name(&self, i: usize) -> String {
        match &self.roles[i - 1].name {
            Some(n) => n.clone(),
            None => format!("r{i}"),
        }
    }

    /// Resolve a role reference: an explicit name first, then the
    /// positional form `r{i}`.
    pub fn role_index(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.roles.iter().position(|r| r.name.as_deref() == Some(name)) {
            return Some(i + 1);
        }
        let i: usize = name.strip_prefix('r')?.parse().ok()?;
        (1..=self.arity()).contains(&i).then_some(i)
    }

    pub fn player(&self, i: usize) -> &str {
        &self.roles[i - 1].player
    }
}

/// A role written as `fact.role`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoleRef {
    pub fact: String,
    pub role: String,
}

impl RoleRef {
    pub fn new(fact: impl Into<String>, role: impl Into<String>) -> Self {
        RoleRef { fact: fact.into(), role: role.into() }
    }
}

impl fmt::Display for RoleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.fact, self.role)
    }
}

/// Operand of subset, equality and exclusion: a single role or a whole
/// fact type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoleOrFact {
    Role(RoleRef),
    Fact(String),
}

impl fmt::Display for RoleOrFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleOrFact::Role(r) => write!(f, "{r}"),
            RoleOrFact::Fact(n) => f.write_str(n),
        }
    }
}

/// Two roles whose facts are joined on a common player; the pair denotes
/// the projection of the join on these two roles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoinPair(pub RoleRef, pub RoleRef);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingKind {
    Irreflexive,
    Asymmetric,
    Antisymmetric,
    Symmetric,
    Intransitive,
    Acyclic,
}

impl RingKind {
    pub const ALL: [RingKind; 6] = [
        RingKind::Irreflexive,
        RingKind::Asymmetric,
        RingKind::Antisymmetric,
        RingKind::Symmetric,
        RingKind::Intransitive,
        RingKind::Acyclic,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            RingKind::Irreflexive => "irreflexive",
            RingKind::Asymmetric => "asymmetric",
            RingKind::Antisymmetric => "antisymmetric",
            RingKind::Symmetric => "symmetric",
            RingKind::Intransitive => "intransitive",
            RingKind::Acyclic => "acyclic",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrmConstraint {
    Mandatory { player: String, role: RoleRef },
    DisjunctiveMandatory { player: String, roles: Vec<RoleRef> },
    /// Internal uniqueness over the named roles of one fact type.
    Uniqueness { fact: String, roles: Vec<String> },
    /// `roles` are the identifying roles; the identified object plays the
    /// other role of each (binary) fact type.
    ExternalUniqueness { target: Option<String>, roles: Vec<RoleRef> },
    Frequency { player: String, role: RoleRef, min: u32, max: Option<u32> },
    MultiRoleFrequency { fact: String, roles: Vec<String>, min: u32, max: Option<u32> },
    Cover { sup: String, subs: Vec<String> },
    Disjoint { sup: String, subs: Vec<String> },
    Subset { sub: RoleOrFact, sup: RoleOrFact },
    Equal { left: RoleOrFact, right: RoleOrFact },
    Exclude { items: Vec<RoleOrFact> },
    JoinSubset { sub: JoinPair, sup: JoinPair },
    JoinEqual { left: JoinPair, right: JoinPair },
    JoinExclude { left: JoinPair, right: JoinPair },
    Objectify { fact: String, as_type: String },
    RoleValue { role: RoleRef, values: Restriction },
    Ring { ring: RingKind, fact: String, roles: (String, String) },
    /// Every instance of `player` takes part in the fact type at `role`
    /// together with every combination of the other positions.
    Participation { player: String, role: RoleRef },
    /// Preferred reference scheme: `object` is identified 1:1 by `value`.
    Reference { object: String, value: String },
}

impl OrmConstraint {
    pub fn keyword(&self) -> &'static str {
        use OrmConstraint::*;
        match self {
            Mandatory { .. } | DisjunctiveMandatory { .. } => "mandatory",
            Uniqueness { .. } => "unique",
            ExternalUniqueness { .. } => "external-unique",
            Frequency { .. } => "frequency",
            MultiRoleFrequency { .. } => "multirole-frequency",
            Cover { .. } => "cover",
            Disjoint { .. } => "disjoint",
            Subset { .. } => "subset",
            Equal { .. } => "equal",
            Exclude { .. } => "exclude",
            JoinSubset { .. } => "join-subset",
            JoinEqual { .. } => "join-equal",
            JoinExclude { .. } => "join-exclude",
            Objectify { .. } => "objectify",
            RoleValue { .. } => "rolevalue",
            Ring { .. } => "ring",
            Participation { .. } => "participates",
            Reference { .. } => "reference",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Object,
    Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubtypeLink {
    pub sub: String,
    pub sup: String,
}

/// Source positions of the parsed constructs. Ignored by equality, so a
/// re-parsed model equals the original.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SourceMap {
    pub types: BTreeMap<String, Span>,
    pub facts: BTreeMap<String, Span>,
    pub roles: BTreeMap<(String, usize), Span>,
    pub subtypes: BTreeMap<(String, String), Span>,
    pub constraints: Vec<Span>,
    /// Names and role references inside constraint `k`, keyed by `(k, text)`.
    pub refs: BTreeMap<(usize, String), Span>,
}

impl PartialEq for SourceMap {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for SourceMap {}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrmModel {
    pub object_types: BTreeSet<String>,
    pub value_types: BTreeMap<String, ValueDomain>,
    pub fact_types: BTreeMap<String, FactType>,
    pub subtype_links: BTreeSet<SubtypeLink>,
    pub constraints: Vec<OrmConstraint>,
    #[serde(skip)]
    pub source: SourceMap,
}

impl OrmModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.object_types.is_empty()
            && self.value_types.is_empty()
            && self.fact_types.is_empty()
            && self.subtype_links.is_empty()
            && self.constraints.is_empty()
    }

    /// Types introduced by objectification, with their fact types.
    pub fn objectified(&self) -> BTreeMap<&str, &str> {
        self.constraints
            .iter()
            .filter_map(|c| match c {
                OrmConstraint::Objectify { fact, as_type } => Some((as_type.as_str(), fact.as_str())),
                _ => None,
            })
            .collect()
    }

    pub fn objectification_of(&self, fact: &str) -> Option<&str> {
        self.constraints.iter().find_map(|c| match c {
            OrmConstraint::Objectify { fact: f, as_type } if f == fact => Some(as_type.as_str()),
            _ => None,
        })
    }

    /// Kind of a declared type; objectified fact types count as objects.
    pub fn type_kind(&self, name: &str) -> Option<TypeKind> {
        if self.object_types.contains(name) || self.objectified().contains_key(name) {
            Some(TypeKind::Object)
        } else if self.value_types.contains_key(name) {
            Some(TypeKind::Value)
        } else {
            None
        }
    }

    pub fn is_type(&self, name: &str) -> bool {
        self.type_kind(name).is_some()
    }

    /// Object types, objectified types included, sorted.
    pub fn all_object_types(&self) -> BTreeSet<String> {
        let mut s = self.object_types.clone();
        s.extend(self.objectified().keys().map(|k| k.to_string()));
        s
    }

    pub fn fact(&self, name: &str) -> Option<&FactType> {
        self.fact_types.get(name)
    }

    /// Resolve `fact.role` to the fact type and a 1-based index.
    pub fn resolve(&self, r: &RoleRef) -> Option<(&FactType, usize)> {
        let f = self.fact_types.get(&r.fact)?;
        Some((f, f.role_index(&r.role)?))
    }

    pub fn player_of(&self, r: &RoleRef) -> Option<&str> {
        self.resolve(r).map(|(f, i)| f.player(i))
    }

    /// Direct supertypes of `t`.
    pub fn supertypes(&self, t: &str) -> Vec<&str> {
        self.subtype_links.iter().filter(|l| l.sub == t).map(|l| l.sup.as_str()).collect()
    }

    /// `t` and all its transitive supertypes.
    pub fn ancestors(&self, t: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![t.to_string()];
        while let Some(x) = stack.pop() {
            if out.insert(x.clone()) {
                stack.extend(self.supertypes(&x).into_iter().map(String::from));
            }
        }
        out
    }

    /// Name of the hidden binary fact type a reference scheme lowers to:
    /// `{object}Has{value}`, made unique against every name in the model.
    pub fn reference_fact_name(&self, object: &str, value: &str) -> String {
        let base = format!("{object}Has{value}");
        let taken = |n: &str| self.is_type(n) || self.fact_types.contains_key(n) || self.role_names().contains(n);
        if !taken(&base) {
            return base;
        }
        (2..).map(|k| format!("{base}{k}")).find(|n| !taken(n)).expect("unbounded counter")
    }

    /// Every explicit role name in the model.
    pub fn role_names(&self) -> BTreeSet<String> {
        self.fact_types.values().flat_map(|f| f.roles.iter().filter_map(|r| r.name.clone())).collect()
    }

    /// Every name in use: types, fact types, role names.
    pub fn names(&self) -> BTreeSet<String> {
        let mut s = self.all_object_types();
        s.extend(self.value_types.keys().cloned());
        s.extend(self.fact_types.keys().cloned());
        s.extend(self.role_names());
        s
    }

    pub fn constraint_span(&self, k: usize) -> Span {
        self.source.constraints.get(k).copied().unwrap_or_default()
    }

    /// Fact types after lowering reference schemes to hidden binary facts
    /// `(object, value)` with default role names.
    pub fn reference_facts(&self) -> Vec<(usize, FactType)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(k, c)| match c {
                OrmConstraint::Reference { object, value } => Some((
                    k,
                    FactType {
                        name: self.reference_fact_name(object, value),
                        reading: None,
                        roles: vec![
                            Role { name: None, player: object.clone() },
                            Role { name: None, player: value.clone() },
                        ],
                        derivation: Derivation::None,
                    },
                )),
                _ => None,
            })
            .collect()
    }
}
