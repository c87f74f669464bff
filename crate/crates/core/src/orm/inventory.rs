//! Classification of model constructs by the mapping rule that translates
//! them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{Derivation, OrmConstraint, OrmModel, RoleOrFact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKey {
    /// Mapping rule 1..=33.
    Rule(u8),
    /// Reference scheme, lowered to a hidden binary fact type.
    Reference,
    /// Ring constraints and multi-role frequency: no translation exists.
    Rejected,
}

impl fmt::Display for RuleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKey::Rule(n) => write!(f, "nr.{n}"),
            RuleKey::Reference => f.write_str("ref"),
            RuleKey::Rejected => f.write_str("rejected:§4"),
        }
    }
}

impl Serialize for RuleKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A translatable unit of a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "name")]
pub enum Construct {
    ObjectType(String),
    ValueType(String),
    Subtype(String, String),
    Fact(String),
    /// Index into `OrmModel::constraints`.
    Constraint(usize),
}

impl Construct {
    pub fn describe(&self, m: &OrmModel) -> String {
        match self {
            Construct::ObjectType(n) => format!("object {n}"),
            Construct::ValueType(n) => format!("value {n}"),
            Construct::Subtype(a, b) => format!("subtype {a} of {b}"),
            Construct::Fact(n) => format!("fact {n}"),
            Construct::Constraint(k) => super::serialize::constraint_text(&m.constraints[*k]),
        }
    }
}

/// Every construct of `m`: object types, value types, subtype links, fact
/// types, then constraints in declaration order.
pub fn constructs(m: &OrmModel) -> Vec<Construct> {
    let mut v: Vec<Construct> = m.object_types.iter().cloned().map(Construct::ObjectType).collect();
    v.extend(m.value_types.keys().cloned().map(Construct::ValueType));
    v.extend(m.subtype_links.iter().map(|l| Construct::Subtype(l.sub.clone(), l.sup.clone())));
    v.extend(m.fact_types.keys().cloned().map(Construct::Fact));
    v.extend((0..m.constraints.len()).map(Construct::Constraint));
    v
}

fn single_role_unique(m: &OrmModel, fact: &str, i: usize) -> bool {
    let f = &m.fact_types[fact];
    m.constraints.iter().any(|c| match c {
        OrmConstraint::Uniqueness { fact: g, roles } => {
            g == fact && roles.len() == 1 && f.role_index(&roles[0]) == Some(i)
        }
        _ => false,
    })
}

/// Whether a cover and a disjointness constraint over the same subtypes
/// of the same supertype both occur.
fn partition_pair(m: &OrmModel, sup: &str, subs: &[String], cover: bool) -> bool {
    let mut want = subs.to_vec();
    want.sort();
    m.constraints.iter().any(|c| {
        let (s, xs) = match (c, cover) {
            (OrmConstraint::Disjoint { sup, subs }, true) | (OrmConstraint::Cover { sup, subs }, false) => (sup, subs),
            _ => return false,
        };
        let mut xs = xs.clone();
        xs.sort();
        s == sup && xs == want
    })
}

fn arity_of(m: &OrmModel, x: &RoleOrFact) -> usize {
    match x {
        RoleOrFact::Role(r) => m.fact(&r.fact).map_or(0, |f| f.arity()),
        RoleOrFact::Fact(f) => m.fact(f).map_or(0, |f| f.arity()),
    }
}

/// The rule a construct translates under. Assumes `m` validates.
pub fn construct_rule(m: &OrmModel, c: &Construct) -> RuleKey {
    use OrmConstraint::*;
    let rule = |n: u8| RuleKey::Rule(n);
    match c {
        Construct::ObjectType(_) => rule(1),
        Construct::ValueType(n) => rule(if m.value_types[n].restriction.is_some() { 7 } else { 2 }),
        Construct::Subtype(..) => rule(17),
        Construct::Fact(n) => {
            let f = &m.fact_types[n];
            match f.derivation {
                Derivation::Derived => rule(31),
                Derivation::DerivedAndStored(_) => rule(32),
                Derivation::None => rule(match f.arity() {
                    1 => 3,
                    2 => 4,
                    _ => 5,
                }),
            }
        }
        Construct::Constraint(k) => match &m.constraints[*k] {
            Mandatory { .. } => rule(8),
            DisjunctiveMandatory { .. } => rule(9),
            Participation { .. } => rule(6),
            Uniqueness { fact, roles } => {
                let f = &m.fact_types[fact];
                let n = f.arity();
                if roles.len() == 1 {
                    let i = f.role_index(&roles[0]).unwrap_or(1);
                    if n == 2 && single_role_unique(m, fact, 3 - i) {
                        rule(11)
                    } else {
                        rule(10)
                    }
                } else if roles.len() == n {
                    rule(12)
                } else {
                    rule(13)
                }
            }
            ExternalUniqueness { .. } => rule(14),
            Frequency { min, max, .. } => {
                if Some(*min) == *max || max.is_none() || *min == 1 {
                    rule(15)
                } else {
                    rule(16)
                }
            }
            MultiRoleFrequency { .. } | Ring { .. } => RuleKey::Rejected,
            Cover { sup, subs } => rule(if partition_pair(m, sup, subs, true) { 20 } else { 18 }),
            Disjoint { sup, subs } => rule(if partition_pair(m, sup, subs, false) { 20 } else { 19 }),
            Subset { sub, .. } => rule(if matches!(sub, RoleOrFact::Role(_)) { 21 } else { 22 }),
            Equal { left, .. } => rule(if matches!(left, RoleOrFact::Role(_)) { 23 } else { 24 }),
            Exclude { items } => rule(if matches!(items.first(), Some(RoleOrFact::Role(_))) { 25 } else { 26 }),
            JoinSubset { .. } => rule(27),
            JoinEqual { .. } => rule(28),
            JoinExclude { .. } => rule(29),
            Objectify { .. } => rule(30),
            RoleValue { .. } => rule(33),
            Reference { .. } => RuleKey::Reference,
        },
    }
}

/// Highest arity among the facts an operand list touches; role subset and
/// equality are exact only at arity 2.
pub fn operand_arity(m: &OrmModel, xs: &[&RoleOrFact]) -> usize {
    xs.iter().map(|x| arity_of(m, x)).max().unwrap_or(0)
}

/// Count of constructs per rule. Every rule key is present, zero or not,
/// and the counts sum to the number of constructs.
pub fn constraint_inventory(m: &OrmModel) -> BTreeMap<RuleKey, usize> {
    let mut inv: BTreeMap<RuleKey, usize> = (1..=33).map(|n| (RuleKey::Rule(n), 0)).collect();
    inv.insert(RuleKey::Reference, 0);
    inv.insert(RuleKey::Rejected, 0);
    for c in constructs(m) {
        *inv.entry(construct_rule(m, &c)).or_default() += 1;
    }
    inv
}
