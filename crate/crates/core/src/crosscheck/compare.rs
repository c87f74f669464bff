//! Bounded comparison of a model with its translation: satisfiability of
//! the whole model and nonemptiness of each object type, searched on both
//! sides up to the same domain size.

use std::fmt::Write;

use serde::Serialize;

use super::{orm_satisfiable_bounded, orm_type_satisfiable_bounded, OrmInterpretation};
use crate::orm::inventory::{constructs, operand_arity};
use crate::orm::{Construct, Derivation, OrmConstraint, OrmModel, RoleOrFact, RoleRef};
use crate::semantics::{concept_satisfiable_bounded, kb_satisfiable_bounded, InvariantViolation, SatResult, SearchConfig, TopMode};
use crate::translate::{translate, TranslateError, TranslateOptions, TranslationReport};
use crate::dlr::ConceptExpr;

/// A construct whose two readings are not claimed to coincide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Approximation {
    pub construct: Construct,
    pub text: String,
    pub reason: String,
}

fn mandatory_on(m: &OrmModel, player: &str, role: &RoleRef) -> bool {
    let ancestors = m.ancestors(player);
    m.constraints.iter().any(|c| match c {
        OrmConstraint::Mandatory { player: p, role: r } => r == role && ancestors.contains(p),
        _ => false,
    })
}

/// Constructs outside the exact fragment under the given translation
/// options and ⊤ semantics.
pub fn approximations(m: &OrmModel, report: &TranslationReport, top: TopMode) -> Vec<Approximation> {
    use OrmConstraint::*;
    let reified = |f: &str| report.reified_facts.contains(f);
    let fact_of = |x: &RoleOrFact| match x {
        RoleOrFact::Role(r) => r.fact.clone(),
        RoleOrFact::Fact(f) => f.clone(),
    };
    let mut out = Vec::new();
    for c in constructs(m) {
        let reason: Option<String> = match &c {
            Construct::Fact(f) if m.fact_types[f].derivation == Derivation::Derived => {
                Some("derived fact type has no axioms".into())
            }
            Construct::Constraint(k) => match &m.constraints[*k] {
                Participation { role, .. } if reified(&role.fact) => Some("participation in a reified fact type".into()),
                Participation { .. } if top == TopMode::Enumerated => Some("∀ is weaker under enumerated ⊤".into()),
                RoleValue { .. } => Some("the constraint's formula is implied by typing; the axioms are not".into()),
                Frequency { player, role, min, max } => {
                    let lower = *min > 1 || max.is_none() || Some(*min) == *max;
                    (lower && !report.options.fol_faithful && !mandatory_on(m, player, role))
                        .then(|| "lower bound applies to non-participants".into())
                }
                Subset { sub, sup } | Equal { left: sub, right: sup } => {
                    if matches!(sub, RoleOrFact::Role(_)) {
                        (operand_arity(m, &[sub, sup]) > 2).then(|| "role comparison beyond arity 2".into())
                    } else {
                        (reified(&fact_of(sub)) || reified(&fact_of(sup))).then(|| "reified operand".into())
                    }
                }
                Exclude { items } => {
                    let facts = matches!(items.first(), Some(RoleOrFact::Fact(_)));
                    (facts && items.iter().any(|x| reified(&fact_of(x)))).then(|| "reified operand".into())
                }
                ExternalUniqueness { roles, .. } if roles.iter().any(|r| reified(&r.fact)) => {
                    Some("reified fact type in scope".into())
                }
                JoinSubset { .. } | JoinEqual { .. } | JoinExclude { .. } => Some("join constraint".into()),
                Ring { .. } | MultiRoleFrequency { .. } => Some("no translation".into()),
                _ => None,
            },
            _ => None,
        };
        if let Some(reason) = reason {
            out.push(Approximation { text: c.describe(m), construct: c, reason });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum SideVerdict {
    Sat { domain_size: usize, witness: String },
    NoModelUpTo { max_domain: usize },
    TooLarge { domain_size: usize, size: u64, ceiling: u64 },
}

impl SideVerdict {
    pub fn from_result<I: ToString>(r: SatResult<I>, d: impl Fn(&I) -> usize) -> Self {
        match r {
            SatResult::Sat(w) => SideVerdict::Sat { domain_size: d(&w.interpretation), witness: w.interpretation.to_string() },
            SatResult::NoModelUpTo { max_domain } => SideVerdict::NoModelUpTo { max_domain },
            SatResult::TooLarge { domain_size, size, ceiling } => SideVerdict::TooLarge { domain_size, size, ceiling },
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SideVerdict::Sat { .. })
    }

    pub fn summary(&self) -> String {
        match self {
            SideVerdict::Sat { domain_size, .. } => format!("sat (d={domain_size})"),
            SideVerdict::NoModelUpTo { max_domain } => format!("no model up to {max_domain}"),
            SideVerdict::TooLarge { domain_size, .. } => format!("too large at d={domain_size}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    /// The object type required nonempty; `None` for the whole model.
    pub subject: Option<String>,
    pub orm: SideVerdict,
    pub kb: SideVerdict,
    /// Both sides found a model, or neither did. Undecided when either
    /// side hit the ceiling.
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossConfig {
    pub max_domain: usize,
    pub top_mode: TopMode,
    pub ceiling: u64,
    pub options: TranslateOptions,
}

impl CrossConfig {
    pub fn new(max_domain: usize) -> Self {
        CrossConfig {
            max_domain,
            top_mode: TopMode::Enumerated,
            ceiling: crate::semantics::search::DEFAULT_CEILING,
            options: TranslateOptions::default(),
        }
    }

    fn search(&self) -> SearchConfig {
        let mut s = SearchConfig::new(self.max_domain).with_top(self.top_mode);
        s.ceiling = self.ceiling;
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossReport {
    pub max_domain: usize,
    pub top_mode: TopMode,
    pub options: TranslateOptions,
    /// No approximations: disagreement would contradict the translation.
    pub exact: bool,
    pub approximations: Vec<Approximation>,
    pub comparisons: Vec<Comparison>,
}

impl CrossReport {
    pub fn divergences(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| c.agree == Some(false))
    }

    pub fn all_agree(&self) -> bool {
        self.comparisons.iter().all(|c| c.agree == Some(true))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let top = match self.top_mode {
            TopMode::FullProduct => "full",
            TopMode::Enumerated => "enumerated",
        };
        let _ = writeln!(out, "crosscheck up to d={} (⊤: {top})", self.max_domain);
        let _ = writeln!(out, "fragment: {}", if self.exact { "exact" } else { "approximate" });
        for a in &self.approximations {
            let _ = writeln!(out, "  approximate: {} ({})", a.text, a.reason);
        }
        for c in &self.comparisons {
            let subject = c.subject.as_deref().unwrap_or("(model)");
            let status = match c.agree {
                Some(true) => "agree",
                Some(false) => "DIVERGE",
                None => "undecided",
            };
            let _ = writeln!(out, "{status:9} {subject}: orm {}, kb {}", c.orm.summary(), c.kb.summary());
            if c.agree == Some(false) {
                for (side, v) in [("orm", &c.orm), ("kb", &c.kb)] {
                    if let SideVerdict::Sat { witness, .. } = v {
                        let _ = writeln!(out, "  {side} witness:");
                        for line in witness.lines() {
                            let _ = writeln!(out, "    {line}");
                        }
                    }
                }
            }
        }
        let n = self.comparisons.len();
        let agreeing = self.comparisons.iter().filter(|c| c.agree == Some(true)).count();
        let _ = writeln!(out, "{agreeing}/{n} agree");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrossError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}

fn agree(a: &SideVerdict, b: &SideVerdict) -> Option<bool> {
    match (a, b) {
        (SideVerdict::TooLarge { .. }, _) | (_, SideVerdict::TooLarge { .. }) => None,
        _ => Some(a.is_sat() == b.is_sat()),
    }
}

/// Search the model and its translation for models up to
/// `cfg.max_domain` elements: once unconstrained, then once per object
/// type required nonempty.
pub fn cross_check(m: &OrmModel, cfg: &CrossConfig) -> Result<CrossReport, CrossError> {
    let (kb, report) = translate(m, cfg.options)?;
    let approximations = approximations(m, &report, cfg.top_mode);
    let scfg = cfg.search();
    let orm_d = |i: &OrmInterpretation| i.domain_size;
    let kb_d = |i: &crate::semantics::Interpretation| i.domain_size;

    let mut comparisons = Vec::new();
    let orm = SideVerdict::from_result(orm_satisfiable_bounded(m, &scfg)?, orm_d);
    let kbv = SideVerdict::from_result(kb_satisfiable_bounded(&kb, &scfg)?, kb_d);
    comparisons.push(Comparison { subject: None, agree: agree(&orm, &kbv), orm, kb: kbv });
    for t in m.all_object_types() {
        let orm = SideVerdict::from_result(orm_type_satisfiable_bounded(m, &t, &scfg)?, orm_d);
        let q = ConceptExpr::atomic(t.clone());
        let kbv = SideVerdict::from_result(concept_satisfiable_bounded(&kb, &q, &scfg)?, kb_d);
        comparisons.push(Comparison { subject: Some(t), agree: agree(&orm, &kbv), orm, kb: kbv });
    }
    Ok(CrossReport {
        max_domain: scfg.max_domain,
        top_mode: cfg.top_mode,
        options: cfg.options,
        exact: approximations.is_empty(),
        approximations,
        comparisons,
    })
}

