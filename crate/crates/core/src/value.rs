//! Concrete value domains and literals carried by value-typed elements.

use std::collections::BTreeSet;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Built-in concrete domain of a value type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseType {
    String,
    Integer,
    Date,
}

impl BaseType {
    pub fn keyword(self) -> &'static str {
        match self {
            BaseType::String => "string",
            BaseType::Integer => "integer",
            BaseType::Date => "date",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "string" => Some(BaseType::String),
            "integer" => Some(BaseType::Integer),
            "date" => Some(BaseType::Date),
            _ => None,
        }
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A value. Equality is exact: strings byte-wise, integers numerically,
/// dates by calendar day.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Literal {
    Str(String),
    Int(i64),
    Date(NaiveDate),
}

impl Literal {
    pub fn base(&self) -> BaseType {
        match self {
            Literal::Str(_) => BaseType::String,
            Literal::Int(_) => BaseType::Integer,
            Literal::Date(_) => BaseType::Date,
        }
    }

    /// Reinterpret a literal written in source text for the given base type.
    /// Dates are written as quoted `YYYY-MM-DD` strings.
    pub fn coerce(self, base: BaseType) -> Result<Literal, String> {
        match (base, self) {
            (BaseType::String, l @ Literal::Str(_)) => Ok(l),
            (BaseType::Integer, l @ Literal::Int(_)) => Ok(l),
            (BaseType::Date, l @ Literal::Date(_)) => Ok(l),
            (BaseType::Date, Literal::Str(s)) => parse_date(&s)
                .map(Literal::Date)
                .ok_or_else(|| format!("`{s}` is not a date (expected YYYY-MM-DD)")),
            (base, l) => Err(format!("literal {l} does not belong to domain {base}")),
        }
    }
}

/// Strict `YYYY-MM-DD`.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

/// Quote a string with single quotes, escaping `'` and `\`.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => f.write_str(&quote(s)),
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Date(d) => write!(f, "'{}'", d.format("%Y-%m-%d")),
        }
    }
}

/// Restriction of a value domain to specific values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Restriction {
    Enumeration(Vec<Literal>),
    Range { lower: Literal, upper: Literal },
}

impl Restriction {
    pub fn admits(&self, lit: &Literal) -> bool {
        match self {
            Restriction::Enumeration(vs) => vs.contains(lit),
            Restriction::Range { lower, upper } => {
                lit.base() == lower.base() && lower <= lit && lit <= upper
            }
        }
    }

    /// Check the restriction against a base type: literals distinct and
    /// conforming, ranges only over ordered domains with lower <= upper.
    pub fn check(&self, base: BaseType) -> Result<(), String> {
        match self {
            Restriction::Enumeration(vs) => {
                if vs.is_empty() {
                    return Err("empty value enumeration".into());
                }
                let mut seen = BTreeSet::new();
                for v in vs {
                    if v.base() != base {
                        return Err(format!("literal {v} does not belong to domain {base}"));
                    }
                    if !seen.insert(v) {
                        return Err(format!("duplicate literal {v}"));
                    }
                }
                Ok(())
            }
            Restriction::Range { lower, upper } => {
                if base == BaseType::String {
                    return Err("ranges are only allowed over integer and date domains".into());
                }
                if lower.base() != base || upper.base() != base {
                    return Err(format!("range bounds do not belong to domain {base}"));
                }
                if lower > upper {
                    return Err(format!("empty range {lower}..{upper}"));
                }
                Ok(())
            }
        }
    }

    /// Whether every literal admitted by `self` is admitted by `other`.
    pub fn within(&self, other: &Restriction) -> bool {
        match (self, other) {
            (Restriction::Enumeration(vs), _) => vs.iter().all(|v| other.admits(v)),
            (Restriction::Range { lower, upper }, Restriction::Range { .. }) => {
                other.admits(lower) && other.admits(upper)
            }
            // integer ranges against enumerations: compare member by member
            (Restriction::Range { lower: Literal::Int(lo), upper: Literal::Int(hi) }, _) => {
                (*lo..=*hi).all(|i| other.admits(&Literal::Int(i)))
            }
            (Restriction::Range { .. }, Restriction::Enumeration(_)) => false,
        }
    }

    /// Up to `cap` admitted literals for a bounded literal pool: every
    /// enumerated value, or the first `cap` values of a range.
    pub fn representatives(&self, cap: usize) -> Vec<Literal> {
        match self {
            Restriction::Enumeration(vs) => vs.clone(),
            Restriction::Range { lower, upper } => {
                let mut v = Vec::new();
                let mut cur = Some(lower.clone());
                while let Some(c) = cur {
                    if v.len() >= cap || &c > upper {
                        break;
                    }
                    cur = successor(&c);
                    v.push(c);
                }
                v
            }
        }
    }
}

fn successor(l: &Literal) -> Option<Literal> {
    match l {
        Literal::Int(i) => i.checked_add(1).map(Literal::Int),
        Literal::Date(d) => d.succ_opt().map(Literal::Date),
        Literal::Str(_) => None,
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::Enumeration(vs) => {
                f.write_str("{")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Restriction::Range { lower, upper } => write!(f, "{lower}..{upper}"),
        }
    }
}

/// The concrete domain of a value type, optionally restricted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValueDomain {
    pub base: BaseType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<Restriction>,
}

impl ValueDomain {
    pub fn new(base: BaseType) -> Self {
        ValueDomain { base, restriction: None }
    }

    pub fn restricted(base: BaseType, restriction: Restriction) -> Self {
        ValueDomain { base, restriction: Some(restriction) }
    }

    pub fn conforms(&self, lit: &Literal) -> bool {
        lit.base() == self.base && self.restriction.as_ref().map_or(true, |r| r.admits(lit))
    }

    pub fn check(&self) -> Result<(), String> {
        match &self.restriction {
            Some(r) => r.check(self.base),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ValueDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if let Some(r) = &self.restriction {
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

/// Build the finite literal pool used by bounded search: admitted literals
/// of every restriction (ranges cut to `cap` values) plus `cap` fresh
/// literals per base type that occurs unrestricted, so that up to `cap`
/// elements can carry distinct values. Sorted and duplicate-free.
pub fn literal_pool<'a>(domains: impl IntoIterator<Item = &'a ValueDomain>, cap: usize) -> Vec<Literal> {
    let mut pool = BTreeSet::new();
    let mut open = BTreeSet::new();
    for dom in domains {
        match &dom.restriction {
            Some(r) => pool.extend(r.representatives(cap)),
            None => {
                open.insert(dom.base);
            }
        }
    }
    for base in open {
        for _ in 0..cap {
            let fresh = fresh_literal(base, &pool);
            pool.insert(fresh);
        }
    }
    pool.into_iter().collect()
}

fn fresh_literal(base: BaseType, taken: &BTreeSet<Literal>) -> Literal {
    match base {
        BaseType::String => {
            let mut n = 0usize;
            loop {
                let cand = Literal::Str(format!("v{n}"));
                if !taken.contains(&cand) {
                    return cand;
                }
                n += 1;
            }
        }
        BaseType::Integer => {
            let max = taken
                .iter()
                .filter_map(|l| match l {
                    Literal::Int(i) => Some(*i),
                    _ => None,
                })
                .max();
            Literal::Int(max.map_or(0, |m| m.saturating_add(1)))
        }
        BaseType::Date => {
            let max = taken
                .iter()
                .filter_map(|l| match l {
                    Literal::Date(d) => Some(*d),
                    _ => None,
                })
                .max();
            let epoch = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
            Literal::Date(max.and_then(|d| d.succ_opt()).unwrap_or(epoch))
        }
    }
}
