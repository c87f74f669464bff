//! Canonical text form of ORM models.

use std::fmt::Write;

use super::{Derivation, FactType, JoinPair, OrmConstraint, OrmModel, RoleOrFact};

fn label(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn jpair(p: &JoinPair) -> String {
    format!("({}, {})", p.0, p.1)
}

fn bounds(min: u32, max: Option<u32>) -> String {
    match max {
        Some(b) if b == min => format!("exactly {min}"),
        Some(b) => format!("{min}..{b}"),
        None => format!("{min}..*"),
    }
}

pub fn fact_text(f: &FactType) -> String {
    let mut s = String::new();
    match f.derivation {
        Derivation::None => {}
        Derivation::Derived => s.push_str("derived "),
        Derivation::DerivedAndStored(k) => write!(s, "derived-stored ({k}) ").unwrap(),
    }
    write!(s, "fact {}", f.name).unwrap();
    if let Some(r) = &f.reading {
        write!(s, " {}", label(r)).unwrap();
    }
    let roles: Vec<String> = f
        .roles
        .iter()
        .map(|r| match &r.name {
            Some(n) => format!("{n}: {}", r.player),
            None => r.player.clone(),
        })
        .collect();
    write!(s, " ({});", roles.join(", ")).unwrap();
    s
}

/// One constraint as a statement, including the terminating `;`.
pub fn constraint_text(c: &OrmConstraint) -> String {
    use OrmConstraint::*;
    let body = match c {
        Mandatory { player, role } => format!("mandatory {player} in {role}"),
        Participation { player, role } => format!("participates {player} in {role}"),
        DisjunctiveMandatory { player, roles } => format!("mandatory {player} in {}", join(roles, " or ")),
        Uniqueness { fact, roles } => format!("unique {fact}({})", roles.join(", ")),
        ExternalUniqueness { target, roles } => match target {
            Some(t) => format!("external-unique {t} by {}", join(roles, ", ")),
            None => format!("external-unique {}", join(roles, ", ")),
        },
        Frequency { player, role, min, max } => format!("frequency {player} in {role} : {}", bounds(*min, *max)),
        MultiRoleFrequency { fact, roles, min, max } => {
            format!("multirole-frequency {fact}({}) : {}", roles.join(", "), bounds(*min, *max))
        }
        Cover { sup, subs } => format!("cover {sup} by {}", subs.join(", ")),
        Disjoint { sup, subs } => format!("disjoint {sup} by {}", subs.join(", ")),
        Subset { sub, sup } => format!("subset {sub} of {sup}"),
        Equal { left, right } => format!("equal {left} and {right}"),
        Exclude { items } => format!("exclude {}", join::<RoleOrFact>(items, ", ")),
        JoinSubset { sub, sup } => format!("join-subset {} of {}", jpair(sub), jpair(sup)),
        JoinEqual { left, right } => format!("join-equal {} and {}", jpair(left), jpair(right)),
        JoinExclude { left, right } => format!("join-exclude {} and {}", jpair(left), jpair(right)),
        Objectify { fact, as_type } => format!("objectify {fact} as {as_type}"),
        RoleValue { role, values } => format!("rolevalue {role} : {values}"),
        Ring { ring, fact, roles } => format!("ring {} on {fact}({}, {})", ring.keyword(), roles.0, roles.1),
        Reference { object, value } => format!("reference {object} by {value}"),
    };
    body + ";"
}

/// Canonical form: object types, value types, subtype links and fact
/// types, each sorted by name, then constraints in their original order.
/// One statement per line.
pub fn serialize_orm(m: &OrmModel) -> String {
    let mut out = String::new();
    for t in &m.object_types {
        writeln!(out, "object {t};").unwrap();
    }
    for (t, d) in &m.value_types {
        writeln!(out, "value {t}: {d};").unwrap();
    }
    for l in &m.subtype_links {
        writeln!(out, "subtype {} of {};", l.sub, l.sup).unwrap();
    }
    for f in m.fact_types.values() {
        writeln!(out, "{}", fact_text(f)).unwrap();
    }
    for c in &m.constraints {
        writeln!(out, "{}", constraint_text(c)).unwrap();
    }
    out
}
