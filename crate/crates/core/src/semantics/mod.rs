//! Finite interpretations of DLR_ifd and direct set-level evaluation.

pub mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::dlr::{Axiom, Component, ConceptExpr, KnowledgeBase, RelationExpr, Signature};
use crate::value::Literal;

pub use search::{
    concept_satisfiable_bounded, kb_satisfiable_bounded, InvariantViolation, ReportMode, SatResult, SearchConfig,
    TopMode, Witness,
};

pub type Tuple = Vec<usize>;

/// Extension of an atomic relation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    pub arity: usize,
    pub tuples: BTreeSet<Tuple>,
}

/// A finite interpretation over Δ = {0, …, d−1}. An arity missing from
/// `tops` stands for ⊤ₙ = Δⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub domain_size: usize,
    pub concepts: BTreeMap<String, BTreeSet<usize>>,
    pub relations: BTreeMap<String, Extension>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tops: BTreeMap<usize, BTreeSet<Tuple>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<usize, Literal>,
}

/// All tuples of Δⁿ in lexicographic order.
pub fn all_tuples(d: usize, n: usize) -> impl Iterator<Item = Tuple> {
    let total = d.checked_pow(n as u32).unwrap_or(0);
    (0..total).map(move |mut k| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = k % d;
            k /= d;
        }
        t
    })
}

impl Interpretation {
    /// Empty extensions for every name of the signature, ⊤ₙ = Δⁿ.
    pub fn empty(sig: &Signature, d: usize) -> Self {
        Interpretation {
            domain_size: d,
            concepts: sig.concepts.iter().map(|c| (c.clone(), BTreeSet::new())).collect(),
            relations: sig
                .relations
                .iter()
                .map(|(r, rs)| (r.clone(), Extension { arity: rs.arity, tuples: BTreeSet::new() }))
                .collect(),
            tops: BTreeMap::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        (0..self.domain_size).collect()
    }

    pub fn top(&self, n: usize) -> BTreeSet<Tuple> {
        match self.tops.get(&n) {
            Some(t) => t.clone(),
            None => all_tuples(self.domain_size, n).collect(),
        }
    }

    fn in_top(&self, t: &[usize]) -> bool {
        match self.tops.get(&t.len()) {
            Some(ts) => ts.contains(t),
            None => t.iter().all(|&x| x < self.domain_size),
        }
    }

    /// Structural conditions: d ≥ 1, extensions inside Δ, each Pᴵ ⊆ ⊤ₙ,
    /// each ⊤ₙ ⊆ Δⁿ, literals injective.
    pub fn check_structure(&self) -> Result<(), String> {
        if self.domain_size == 0 {
            return Err("empty domain".into());
        }
        let d = self.domain_size;
        for (c, ext) in &self.concepts {
            if ext.iter().any(|&x| x >= d) {
                return Err(format!("{c} has an element outside Δ"));
            }
        }
        for (n, ts) in &self.tops {
            if ts.iter().any(|t| t.len() != *n || t.iter().any(|&x| x >= d)) {
                return Err(format!("⊤{n} is not a subset of Δ^{n}"));
            }
        }
        for (p, ext) in &self.relations {
            for t in &ext.tuples {
                if t.len() != ext.arity {
                    return Err(format!("{p} has a tuple of the wrong arity"));
                }
                if !self.in_top(t) {
                    return Err(format!("{p} has a tuple outside ⊤{}", ext.arity));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (e, l) in &self.values {
            if *e >= d {
                return Err(format!("value attached to element {e} outside Δ"));
            }
            if !seen.insert(l) {
                return Err(format!("literal {l} carried by two elements"));
            }
        }
        Ok(())
    }

    /// Deterministic text block: domain size, then extensions sorted by
    /// name then tuple order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "domain {}", self.domain_size);
        for (c, ext) in &self.concepts {
            let items: Vec<String> = ext.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{c} = {{{}}}", items.join(", "));
        }
        for (p, ext) in &self.relations {
            let items: Vec<String> = ext.tuples.iter().map(|t| tuple_text(t)).collect();
            let _ = writeln!(out, "{p} = {{{}}}", items.join(", "));
        }
        for (n, ts) in &self.tops {
            let items: Vec<String> = ts.iter().map(|t| tuple_text(t)).collect();
            let _ = writeln!(out, "⊤{n} = {{{}}}", items.join(", "));
        }
        for (e, l) in &self.values {
            let _ = writeln!(out, "value {e} = {l}");
        }
        out
    }
}

pub fn tuple_text(t: &[usize]) -> String {
    let items: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", items.join(","))
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Arity of a relation expression read off the interpretation.
fn arity_in(i: &Interpretation, r: &RelationExpr) -> usize {
    match r {
        RelationExpr::Top(n) => *n,
        RelationExpr::Atomic(p) => i
            .relations
            .get(p)
            .map(|e| e.arity)
            .unwrap_or_else(|| panic!("relation `{p}` has no extension in the interpretation")),
        RelationExpr::Select { arity, .. } => *arity,
        RelationExpr::Not(x) => arity_in(i, x),
        RelationExpr::And(x, _) => arity_in(i, x),
    }
}

pub fn eval_concept(i: &Interpretation, c: &ConceptExpr) -> BTreeSet<usize> {
    match c {
        ConceptExpr::Top => i.domain(),
        ConceptExpr::Atomic(a) => i.concepts.get(a).cloned().unwrap_or_default(),
        ConceptExpr::Not(x) => {
            let inner = eval_concept(i, x);
            i.domain().difference(&inner).copied().collect()
        }
        ConceptExpr::And(x, y) => {
            let a = eval_concept(i, x);
            let b = eval_concept(i, y);
            a.intersection(&b).copied().collect()
        }
        ConceptExpr::Exists(comp, r) => {
            let k = comp.index - 1;
            eval_relation(i, r).iter().map(|t| t[k]).collect()
        }
        ConceptExpr::AtMost(n, comp, r) => {
            let k = comp.index - 1;
            let mut counts = vec![0u64; i.domain_size];
            for t in eval_relation(i, r) {
                counts[t[k]] += 1;
            }
            (0..i.domain_size).filter(|&x| counts[x] <= *n as u64).collect()
        }
    }
}

pub fn eval_relation(i: &Interpretation, r: &RelationExpr) -> BTreeSet<Tuple> {
    match r {
        RelationExpr::Top(n) => i.top(*n),
        RelationExpr::Atomic(p) => i.relations.get(p).map(|e| e.tuples.clone()).unwrap_or_default(),
        RelationExpr::Select { component, arity, concept } => {
            let cs = eval_concept(i, concept);
            i.top(*arity).into_iter().filter(|t| cs.contains(&t[component.index - 1])).collect()
        }
        RelationExpr::Not(x) => {
            let inner = eval_relation(i, x);
            i.top(arity_in(i, x)).difference(&inner).cloned().collect()
        }
        RelationExpr::And(x, y) => {
            let a = eval_relation(i, x);
            let b = eval_relation(i, y);
            a.intersection(&b).cloned().collect()
        }
    }
}

fn tuples_of<'a>(i: &'a Interpretation, rel: &str) -> impl Iterator<Item = &'a Tuple> {
    i.relations.get(rel).into_iter().flat_map(|e| e.tuples.iter())
}

/// Whether `a` and `b` are linked through `rel` at component `c`: some
/// tuple with `a` at `c` and some tuple with `b` at `c` agree elsewhere.
fn linked(i: &Interpretation, rel: &str, c: &Component, a: usize, b: usize) -> bool {
    let k = c.index - 1;
    let ext = match i.relations.get(rel) {
        Some(e) => &e.tuples,
        None => return false,
    };
    ext.iter().filter(|t| t[k] == a).any(|t| {
        let mut s = t.clone();
        s[k] = b;
        ext.contains(&s)
    })
}

pub fn satisfies_axiom(i: &Interpretation, ax: &Axiom) -> bool {
    match ax {
        Axiom::ConceptIncl { lhs, rhs } => eval_concept(i, lhs).is_subset(&eval_concept(i, rhs)),
        Axiom::RelationIncl { lhs, rhs } => eval_relation(i, lhs).is_subset(&eval_relation(i, rhs)),
        Axiom::Id { concept, parts } => {
            let cs: Vec<usize> = i.concepts.get(concept).map(|s| s.iter().copied().collect()).unwrap_or_default();
            for (x, &a) in cs.iter().enumerate() {
                for &b in &cs[x + 1..] {
                    if parts.iter().all(|(c, rel)| linked(i, rel, c, a, b)) {
                        return false;
                    }
                }
            }
            true
        }
        Axiom::Fd { relation, sources, target } => {
            let ts: Vec<&Tuple> = tuples_of(i, relation).collect();
            let j = target.index - 1;
            for (x, t) in ts.iter().enumerate() {
                for s in &ts[x + 1..] {
                    if sources.iter().all(|c| t[c.index - 1] == s[c.index - 1]) && t[j] != s[j] {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Structure, value-domain annotations and every axiom. Returns the first
/// failure as text.
pub fn check_kb_model(i: &Interpretation, kb: &KnowledgeBase) -> Result<(), String> {
    i.check_structure()?;
    for (c, dom) in &kb.signature.value_domains {
        let want: BTreeSet<usize> =
            i.values.iter().filter(|(_, l)| dom.conforms(l)).map(|(e, _)| *e).collect();
        let got = i.concepts.get(c).cloned().unwrap_or_default();
        if want != got {
            return Err(format!("extension of value concept {c} differs from its conforming elements"));
        }
    }
    for (k, ax) in kb.axioms.iter().enumerate() {
        if !satisfies_axiom(i, ax) {
            return Err(format!("axiom {k} is violated: {}", crate::dlr::render::axiom_dl(ax)));
        }
    }
    Ok(())
}

pub fn satisfies_kb(i: &Interpretation, kb: &KnowledgeBase) -> bool {
    check_kb_model(i, kb).is_ok()
}
