//! Bounded satisfiability for knowledge bases.
//!
//! For each domain size d = 1, 2, …, max_domain the knowledge base is
//! grounded over Δ = {0..d−1} into CNF and handed to a SAT solver. The first
//! satisfiable d yields the witness, minimised lexicographically over the
//! primary variables in this order (false before true):
//!
//! 1. atomic concepts by name, then element;
//! 2. atomic relations by name, then tuples in lexicographic order;
//! 3. in enumerated-⊤ mode, ⊤ₙ by ascending n, then tuples;
//! 4. element-to-literal assignments, by element then pool position.
//!
//! Every witness is re-checked with the direct evaluator before it is
//! returned.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{all_tuples, check_kb_model, eval_concept, Extension, Interpretation, Tuple};
use crate::dlr::typing::{check_concept, relation_arity};
use crate::dlr::{Axiom, ConceptExpr, KnowledgeBase, RelationExpr, TypeError};
use crate::sat::{Bit, Encoder, Model};
use crate::value::{literal_pool, Literal};

pub const DEFAULT_CEILING: u64 = 100_000_000;
pub const DEFAULT_COUNT_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopMode {
    /// ⊤ₙ = Δⁿ.
    FullProduct,
    /// ⊤ₙ ranges over all subsets of Δⁿ containing the relations.
    Enumerated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportMode {
    WitnessOnly,
    /// Also count the models at the witness's domain size, projected on the
    /// primary variables.
    CountModels,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_domain: usize,
    pub top_mode: TopMode,
    pub report: ReportMode,
    /// Largest grounded instance, in literal occurrences, before giving up.
    pub ceiling: u64,
    pub count_limit: u64,
}

impl SearchConfig {
    pub fn new(max_domain: usize) -> Self {
        SearchConfig {
            max_domain: max_domain.max(1),
            top_mode: TopMode::FullProduct,
            report: ReportMode::WitnessOnly,
            ceiling: DEFAULT_CEILING,
            count_limit: DEFAULT_COUNT_LIMIT,
        }
    }

    pub fn with_top(mut self, m: TopMode) -> Self {
        self.top_mode = m;
        self
    }

    pub fn counting(mut self) -> Self {
        self.report = ReportMode::CountModels;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelCount {
    pub count: u64,
    /// The count stopped at the configured limit.
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness<I> {
    pub interpretation: I,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_count: Option<ModelCount>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum SatResult<I = Interpretation> {
    Sat(Witness<I>),
    /// No model with at most this many elements. Not a proof of
    /// unsatisfiability.
    NoModelUpTo { max_domain: usize },
    TooLarge { domain_size: usize, size: u64, ceiling: u64 },
}

impl<I> SatResult<I> {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn witness(&self) -> Option<&I> {
        match self {
            SatResult::Sat(w) => Some(&w.interpretation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantViolation {
    #[error("query concept is ill-typed: {0:?}")]
    IllTyped(Vec<TypeError>),
    #[error("internal error: solver witness rejected by the evaluator: {0}")]
    WitnessRejected(String),
}

pub fn kb_satisfiable_bounded(kb: &KnowledgeBase, cfg: &SearchConfig) -> Result<SatResult, InvariantViolation> {
    search(kb, None, cfg)
}

/// As [`kb_satisfiable_bounded`], but the witness must also give `c` a
/// nonempty extension.
pub fn concept_satisfiable_bounded(
    kb: &KnowledgeBase,
    c: &ConceptExpr,
    cfg: &SearchConfig,
) -> Result<SatResult, InvariantViolation> {
    let errs = check_concept(c, &kb.signature);
    if !errs.is_empty() {
        return Err(InvariantViolation::IllTyped(errs));
    }
    search(kb, Some(c), cfg)
}

fn search(kb: &KnowledgeBase, query: Option<&ConceptExpr>, cfg: &SearchConfig) -> Result<SatResult, InvariantViolation> {
    for d in 1..=cfg.max_domain.max(1) {
        let mut enc = Encoder::new(cfg.ceiling);
        let g = match Grounding::build(&mut enc, kb, query, d, cfg.top_mode) {
            Ok(g) => g,
            Err(size) => return Ok(SatResult::TooLarge { domain_size: d, size, ceiling: cfg.ceiling }),
        };
        let Some(model) = enc.solve_lexmin(&g.primaries) else { continue };
        let interp = g.decode(&model);
        check_kb_model(&interp, kb).map_err(InvariantViolation::WitnessRejected)?;
        if let Some(c) = query {
            if eval_concept(&interp, c).is_empty() {
                return Err(InvariantViolation::WitnessRejected("query concept is empty in the witness".into()));
            }
        }
        let model_count = match cfg.report {
            ReportMode::WitnessOnly => None,
            ReportMode::CountModels => {
                let (count, capped) = enc.count_models(&g.primaries, cfg.count_limit);
                Some(ModelCount { count, capped })
            }
        };
        return Ok(SatResult::Sat(Witness { interpretation: interp, model_count }));
    }
    Ok(SatResult::NoModelUpTo { max_domain: cfg.max_domain.max(1) })
}

pub(crate) fn tuple_index(t: &[usize], d: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * d + x)
}

struct Grounding<'a> {
    kb: &'a KnowledgeBase,
    d: usize,
    mode: TopMode,
    concepts: BTreeMap<&'a str, Vec<Bit>>,
    relations: BTreeMap<&'a str, Vec<Bit>>,
    tops: BTreeMap<usize, Vec<Bit>>,
    pool: Vec<Literal>,
    vals: Vec<Vec<Bit>>,
    primaries: Vec<Bit>,
    cmemo: HashMap<(*const ConceptExpr, usize), Bit>,
    rmemo: HashMap<(*const RelationExpr, usize), Bit>,
    arity: HashMap<*const RelationExpr, usize>,
}

fn collect_arities_c(c: &ConceptExpr, out: &mut BTreeSet<usize>) {
    match c {
        ConceptExpr::Top | ConceptExpr::Atomic(_) => {}
        ConceptExpr::Not(x) => collect_arities_c(x, out),
        ConceptExpr::And(x, y) => {
            collect_arities_c(x, out);
            collect_arities_c(y, out);
        }
        ConceptExpr::Exists(_, r) | ConceptExpr::AtMost(_, _, r) => collect_arities_r(r, out),
    }
}

fn collect_arities_r(r: &RelationExpr, out: &mut BTreeSet<usize>) {
    match r {
        RelationExpr::Top(n) => {
            out.insert(*n);
        }
        RelationExpr::Atomic(_) => {}
        RelationExpr::Select { arity, concept, .. } => {
            out.insert(*arity);
            collect_arities_c(concept, out);
        }
        RelationExpr::Not(x) => collect_arities_r(x, out),
        RelationExpr::And(x, y) => {
            collect_arities_r(x, out);
            collect_arities_r(y, out);
        }
    }
}

impl<'a> Grounding<'a> {
    /// Ground `kb` (and the nonemptiness of `query`) over a domain of size
    /// `d`. Fails with the instance size when it passes the ceiling.
    fn build(
        enc: &mut Encoder,
        kb: &'a KnowledgeBase,
        query: Option<&ConceptExpr>,
        d: usize,
        mode: TopMode,
    ) -> Result<Self, u64> {
        let sig = &kb.signature;
        let mut g = Grounding {
            kb,
            d,
            mode,
            concepts: BTreeMap::new(),
            relations: BTreeMap::new(),
            tops: BTreeMap::new(),
            pool: Vec::new(),
            vals: Vec::new(),
            primaries: Vec::new(),
            cmemo: HashMap::new(),
            rmemo: HashMap::new(),
            arity: HashMap::new(),
        };

        // element-to-literal assignment
        if !sig.value_domains.is_empty() {
            g.pool = literal_pool(sig.value_domains.values(), d);
            g.vals = (0..d).map(|_| (0..g.pool.len()).map(|_| enc.fresh()).collect()).collect();
            for e in 0..d {
                enc.assert_at_most_one(&g.vals[e]);
            }
            for l in 0..g.pool.len() {
                let col: Vec<Bit> = (0..d).map(|e| g.vals[e][l]).collect();
                enc.assert_at_most_one(&col);
            }
        }

        for c in &sig.concepts {
            let bits = match sig.value_domains.get(c) {
                Some(dom) => (0..d)
                    .map(|e| {
                        let conf: Vec<Bit> = g
                            .pool
                            .iter()
                            .enumerate()
                            .filter(|(_, l)| dom.conforms(l))
                            .map(|(k, _)| g.vals[e][k])
                            .collect();
                        enc.or(conf)
                    })
                    .collect(),
                None => (0..d).map(|_| enc.fresh()).collect(),
            };
            g.concepts.insert(c, bits);
        }

        let mut arities: BTreeSet<usize> = sig.arities();
        for ax in &kb.axioms {
            match ax {
                Axiom::ConceptIncl { lhs, rhs } => {
                    collect_arities_c(lhs, &mut arities);
                    collect_arities_c(rhs, &mut arities);
                }
                Axiom::RelationIncl { lhs, rhs } => {
                    collect_arities_r(lhs, &mut arities);
                    collect_arities_r(rhs, &mut arities);
                }
                Axiom::Id { .. } | Axiom::Fd { .. } => {}
            }
        }
        if let Some(q) = query {
            collect_arities_c(q, &mut arities);
        }
        for &n in &arities {
            let size = d.pow(n as u32);
            let bits = match mode {
                TopMode::FullProduct => vec![Bit::TRUE; size],
                TopMode::Enumerated => (0..size).map(|_| enc.fresh()).collect(),
            };
            g.tops.insert(n, bits);
        }

        for (p, rs) in &sig.relations {
            let bits: Vec<Bit> = (0..d.pow(rs.arity as u32)).map(|_| enc.fresh()).collect();
            let top = g.tops[&rs.arity].clone();
            for (b, t) in bits.iter().zip(top) {
                enc.add_clause(&[b.negate(), t]);
            }
            g.relations.insert(p, bits);
        }

        for bits in g.concepts.values() {
            g.primaries.extend(bits);
        }
        for bits in g.relations.values() {
            g.primaries.extend(bits);
        }
        if mode == TopMode::Enumerated {
            for bits in g.tops.values() {
                g.primaries.extend(bits);
            }
        }
        for row in &g.vals {
            g.primaries.extend(row);
        }
        enc.check_ceiling().map_err(|o| o.size)?;

        for ax in &kb.axioms {
            g.axiom(enc, ax);
            enc.check_ceiling().map_err(|o| o.size)?;
        }
        if let Some(q) = query {
            let some: Vec<Bit> = (0..d).map(|e| g.concept(enc, q, e)).collect();
            let b = enc.or(some);
            enc.assert(b);
            enc.check_ceiling().map_err(|o| o.size)?;
        }
        Ok(g)
    }

    fn rel_arity(&mut self, r: &RelationExpr) -> usize {
        let key = r as *const _;
        if let Some(n) = self.arity.get(&key) {
            return *n;
        }
        let n = relation_arity(r, &self.kb.signature).expect("well-typed relation");
        self.arity.insert(key, n);
        n
    }

    fn tuples(&self, n: usize) -> impl Iterator<Item = Tuple> {
        all_tuples(self.d, n)
    }

    /// Tuples of arity `n` with `e` at 0-based position `k`.
    fn tuples_at(&self, n: usize, k: usize, e: usize) -> impl Iterator<Item = Tuple> {
        self.tuples(n - 1).map(move |mut t| {
            t.insert(k, e);
            t
        })
    }

    fn concept(&mut self, enc: &mut Encoder, c: &ConceptExpr, e: usize) -> Bit {
        let key = (c as *const _, e);
        if let Some(b) = self.cmemo.get(&key) {
            return *b;
        }
        let b = match c {
            ConceptExpr::Top => Bit::TRUE,
            ConceptExpr::Atomic(a) => self.concepts[a.as_str()][e],
            ConceptExpr::Not(x) => self.concept(enc, x, e).negate(),
            ConceptExpr::And(x, y) => {
                let a = self.concept(enc, x, e);
                let b = self.concept(enc, y, e);
                enc.and([a, b])
            }
            ConceptExpr::Exists(i, r) => {
                let n = self.rel_arity(r);
                let ts: Vec<Tuple> = self.tuples_at(n, i.index - 1, e).collect();
                let bits: Vec<Bit> = ts.iter().map(|t| self.relation(enc, r, t)).collect();
                enc.or(bits)
            }
            ConceptExpr::AtMost(k, i, r) => {
                let n = self.rel_arity(r);
                let ts: Vec<Tuple> = self.tuples_at(n, i.index - 1, e).collect();
                let bits: Vec<Bit> = ts.iter().map(|t| self.relation(enc, r, t)).collect();
                enc.at_most(*k, &bits)
            }
        };
        self.cmemo.insert(key, b);
        b
    }

    fn top_bit(&self, t: &[usize]) -> Bit {
        match self.mode {
            TopMode::FullProduct => Bit::TRUE,
            TopMode::Enumerated => self.tops[&t.len()][tuple_index(t, self.d)],
        }
    }

    fn relation(&mut self, enc: &mut Encoder, r: &RelationExpr, t: &[usize]) -> Bit {
        let key = (r as *const _, tuple_index(t, self.d));
        if let Some(b) = self.rmemo.get(&key) {
            return *b;
        }
        let b = match r {
            RelationExpr::Top(_) => self.top_bit(t),
            RelationExpr::Atomic(p) => self.relations[p.as_str()][tuple_index(t, self.d)],
            RelationExpr::Select { component, concept, .. } => {
                let top = self.top_bit(t);
                let c = self.concept(enc, concept, t[component.index - 1]);
                enc.and([top, c])
            }
            RelationExpr::Not(x) => {
                let top = self.top_bit(t);
                let inner = self.relation(enc, x, t);
                enc.and([top, inner.negate()])
            }
            RelationExpr::And(x, y) => {
                let a = self.relation(enc, x, t);
                let b = self.relation(enc, y, t);
                enc.and([a, b])
            }
        };
        self.rmemo.insert(key, b);
        b
    }

    fn axiom(&mut self, enc: &mut Encoder, ax: &Axiom) {
        let d = self.d;
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                for e in 0..d {
                    let l = self.concept(enc, lhs, e);
                    let r = self.concept(enc, rhs, e);
                    enc.add_clause(&[l.negate(), r]);
                }
            }
            Axiom::RelationIncl { lhs, rhs } => {
                let n = self.rel_arity(lhs);
                for t in self.tuples(n).collect::<Vec<_>>() {
                    let l = self.relation(enc, lhs, &t);
                    let r = self.relation(enc, rhs, &t);
                    enc.add_clause(&[l.negate(), r]);
                }
            }
            Axiom::Id { concept, parts } => {
                let cbits = self.concepts[concept.as_str()].clone();
                for a in 0..d {
                    for b in a + 1..d {
                        let mut conj = vec![cbits[a], cbits[b]];
                        for (comp, rel) in parts {
                            let bits = &self.relations[rel.as_str()];
                            let n = self.kb.signature.relations[rel].arity;
                            let k = comp.index - 1;
                            let mut links = Vec::new();
                            for w in all_tuples(d, n - 1) {
                                let mut t = w.clone();
                                t.insert(k, a);
                                let mut s = w;
                                s.insert(k, b);
                                let (x, y) = (bits[tuple_index(&t, d)], bits[tuple_index(&s, d)]);
                                links.push(enc.and([x, y]));
                            }
                            conj.push(enc.or(links));
                        }
                        let all = enc.and(conj);
                        enc.assert(all.negate());
                    }
                }
            }
            Axiom::Fd { relation, sources, target } => {
                let bits = self.relations[relation.as_str()].clone();
                let n = self.kb.signature.relations[relation].arity;
                let src: Vec<usize> = sources.iter().map(|c| c.index - 1).collect();
                let j = target.index - 1;
                let ts: Vec<Tuple> = self.tuples(n).collect();
                for (x, t) in ts.iter().enumerate() {
                    for s in &ts[x + 1..] {
                        if t[j] != s[j] && src.iter().all(|&k| t[k] == s[k]) {
                            let (p, q) = (bits[tuple_index(t, d)], bits[tuple_index(s, d)]);
                            enc.add_clause(&[p.negate(), q.negate()]);
                        }
                    }
                }
            }
        }
    }

    fn decode(&self, m: &Model) -> Interpretation {
        let d = self.d;
        let mut i = Interpretation::empty(&self.kb.signature, d);
        for (c, bits) in &self.concepts {
            i.concepts.insert(c.to_string(), (0..d).filter(|&e| m.value(bits[e])).collect());
        }
        for (p, bits) in &self.relations {
            let n = self.kb.signature.relations[*p].arity;
            let tuples = all_tuples(d, n).zip(bits).filter(|(_, b)| m.value(**b)).map(|(t, _)| t).collect();
            i.relations.insert(p.to_string(), Extension { arity: n, tuples });
        }
        if self.mode == TopMode::Enumerated {
            for (n, bits) in &self.tops {
                i.tops.insert(*n, all_tuples(d, *n).zip(bits).filter(|(_, b)| m.value(**b)).map(|(t, _)| t).collect());
            }
        }
        for (e, row) in self.vals.iter().enumerate() {
            if let Some(k) = row.iter().position(|b| m.value(*b)) {
                i.values.insert(e, self.pool[k].clone());
            }
        }
        i
    }
}
