//! ORM model to DLR_ifd knowledge base, one mapping rule per construct.
//!
//! Translation runs in two passes. The first fixes the signature: user
//! symbols, reified fact types with their component relations, and every
//! auxiliary symbol. The second emits axioms construct by construct in
//! the order of [`constructs`].

mod report;

use std::collections::{BTreeMap, BTreeSet};

pub use report::{Rejection, RejectionError, RejectionReason, ReportEntry, TranslateError, TranslationReport};

use crate::diag::has_errors;
use crate::dlr::ext::{expand_concept, ExtComponent, ExtConcept, ExtRelation};
use crate::dlr::{Axiom, Component, ConceptExpr, KnowledgeBase, RelationExpr, RelationSig, Signature};
use crate::orm::inventory::{constructs, construct_rule, Construct, RuleKey};
use crate::orm::{Derivation, FactType, JoinPair, OrmConstraint, OrmModel, RoleOrFact, RoleRef};
use crate::value::{BaseType, ValueDomain};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TranslateOptions {
    /// Reify every stored fact type of arity >= 2.
    pub reify: bool,
    /// Report untranslatable constructs instead of failing.
    pub partial: bool,
    /// Make frequency lower bounds conditional on participation.
    pub fol_faithful: bool,
}

/// `base′` if free in `sig`, else `base′2`, `base′3`, ….
pub fn fresh_symbol(base: &str, sig: &Signature) -> String {
    let first = format!("{base}′");
    if !sig.contains(&first) {
        return first;
    }
    (2..).map(|k| format!("{base}′{k}")).find(|n| !sig.contains(n)).expect("unbounded counter")
}

/// Base name of a unary fact type's filler: its reading when that is a
/// plain identifier, else the fact type's name.
fn filler_base(f: &FactType) -> &str {
    match f.reading.as_deref() {
        Some(r) if r.starts_with(|c: char| c.is_alphabetic()) && r.chars().all(|c| c.is_alphanumeric() || c == '_') => r,
        _ => &f.name,
    }
}

/// How the roles of a reified fact type are represented.
#[derive(Clone, Debug)]
struct Reified {
    concept: String,
    /// Binary component relation per role.
    comps: Vec<String>,
}

struct Translator<'a> {
    m: &'a OrmModel,
    opts: TranslateOptions,
    kb: KnowledgeBase,
    reified: BTreeMap<String, Reified>,
    /// Fact types after lowering reference schemes.
    facts: BTreeMap<String, FactType>,
    hidden: BTreeMap<usize, String>,
    fillers: BTreeMap<String, String>,
    fresh: BTreeMap<Construct, Vec<String>>,
}

fn c_and(items: impl IntoIterator<Item = ExtConcept>) -> ExtConcept {
    items.into_iter().reduce(ExtConcept::and).unwrap_or(ExtConcept::Top)
}

fn c_or(items: impl IntoIterator<Item = ExtConcept>) -> ExtConcept {
    items.into_iter().reduce(ExtConcept::or).unwrap_or(ExtConcept::Bottom)
}

fn ext_comp(c: &Component) -> ExtComponent {
    ExtComponent::from(c)
}

fn lift(r: &RelationExpr) -> ExtRelation {
    crate::dlr::ext::lift_relation(r)
}

impl<'a> Translator<'a> {
    fn new(m: &'a OrmModel, opts: TranslateOptions) -> Self {
        let mut facts = m.fact_types.clone();
        let mut hidden = BTreeMap::new();
        for (k, f) in m.reference_facts() {
            hidden.insert(k, f.name.clone());
            facts.insert(f.name.clone(), f);
        }
        Translator {
            m,
            opts,
            kb: KnowledgeBase::default(),
            reified: BTreeMap::new(),
            facts,
            hidden,
            fillers: BTreeMap::new(),
            fresh: BTreeMap::new(),
        }
    }

    fn sig(&self) -> &Signature {
        &self.kb.signature
    }

    fn fact(&self, name: &str) -> &FactType {
        &self.facts[name]
    }

    fn role_index(&self, r: &RoleRef) -> usize {
        self.fact(&r.fact).role_index(&r.role).expect("validated role reference")
    }

    fn wants_reification(&self, f: &FactType) -> bool {
        if f.derivation != Derivation::None || f.arity() < 2 || !self.m.fact_types.contains_key(&f.name) {
            return false;
        }
        if self.opts.reify || self.m.objectification_of(&f.name).is_some() {
            return true;
        }
        self.m.constraints.iter().any(|c| match c {
            OrmConstraint::Uniqueness { fact, roles } => fact == &f.name && roles.len() >= 2 && roles.len() < f.arity(),
            _ => false,
        })
    }

    fn declare(&mut self) {
        let m = self.m;
        let wanted: Vec<String> =
            self.facts.values().filter(|f| self.wants_reification(f)).map(|f| f.name.clone()).collect();
        let sig = &mut self.kb.signature;
        for t in m.all_object_types() {
            sig.add_concept(t).expect("validated names");
        }
        for (t, d) in &m.value_types {
            sig.add_concept(t.clone()).expect("validated names");
            sig.add_value_domain(t.clone(), d.clone()).expect("declared");
        }
        for f in self.facts.values() {
            if wanted.contains(&f.name) {
                if m.objectification_of(&f.name).is_none() {
                    sig.add_concept(f.name.clone()).expect("validated names");
                }
                continue;
            }
            let mut names: Vec<Option<String>> = (1..=f.arity()).map(|i| Some(f.role_name(i))).collect();
            if f.arity() == 1 {
                names.push((names[0].as_deref() != Some("r2")).then(|| "r2".to_string()));
            }
            sig.add_relation(f.name.clone(), RelationSig::named(names)).expect("validated names");
        }
        // auxiliary symbols, in construct order
        for c in constructs(m) {
            let mut made = Vec::new();
            match &c {
                Construct::Fact(n) if wanted.contains(n) && m.objectification_of(n).is_none() => {
                    made = self.reify(n);
                }
                Construct::Fact(n) if self.facts[n].arity() == 1 && self.facts[n].derivation == Derivation::None => {
                    let filler = fresh_symbol(filler_base(&self.facts[n]), self.sig());
                    let sig = &mut self.kb.signature;
                    sig.add_concept(filler.clone()).expect("fresh");
                    sig.add_value_domain(filler.clone(), ValueDomain::new(BaseType::String)).expect("declared");
                    self.fillers.insert(n.clone(), filler.clone());
                    made.push(filler);
                }
                Construct::Constraint(k) => match &m.constraints[*k] {
                    OrmConstraint::Objectify { fact, .. } => made = self.reify(fact),
                    OrmConstraint::ExternalUniqueness { target: None, roles } if self.common_target(roles).is_none() => {
                        let f = self.fact(&roles[0].fact);
                        let base = f.player(3 - self.role_index(&roles[0])).to_string();
                        let p = fresh_symbol(&base, self.sig());
                        self.kb.signature.add_concept(p.clone()).expect("fresh");
                        made.push(p);
                    }
                    OrmConstraint::RoleValue { role, values } => {
                        let player = self.m.player_of(role).expect("validated").to_string();
                        let base = self.m.value_types[&player].base;
                        let sub = fresh_symbol(&player, self.sig());
                        let sig = &mut self.kb.signature;
                        sig.add_concept(sub.clone()).expect("fresh");
                        sig.add_value_domain(sub.clone(), ValueDomain::restricted(base, values.clone())).expect("declared");
                        made.push(sub);
                    }
                    _ => {}
                },
                _ => {}
            }
            if !made.is_empty() {
                self.fresh.insert(c, made);
            }
        }
    }

    fn reify(&mut self, fact: &str) -> Vec<String> {
        let f = self.facts[fact].clone();
        let concept = self.m.objectification_of(fact).unwrap_or(fact).to_string();
        let mut comps = Vec::new();
        for i in 1..=f.arity() {
            let base = f.role_name(i);
            let name = if self.sig().contains(&base) { fresh_symbol(&base, self.sig()) } else { base };
            self.kb.signature.add_relation(name.clone(), RelationSig::unnamed(2)).expect("fresh");
            comps.push(name);
        }
        self.reified.insert(fact.to_string(), Reified { concept, comps: comps.clone() });
        comps
    }

    /// The type an external uniqueness identifies: the common player of
    /// the identified roles, or their first common supertype by name.
    fn common_target(&self, roles: &[RoleRef]) -> Option<String> {
        let mut common: Option<BTreeSet<String>> = None;
        for r in roles {
            let f = self.fact(&r.fact);
            let other = f.player(3 - self.role_index(r));
            let anc = self.m.ancestors(other);
            common = Some(match common {
                None => anc,
                Some(c) => c.intersection(&anc).cloned().collect(),
            });
        }
        let common = common?;
        let first = self.fact(&roles[0].fact);
        let direct = first.player(3 - self.role_index(&roles[0]));
        if common.contains(direct) {
            return Some(direct.to_string());
        }
        common.into_iter().next()
    }

    /// The relation and component standing for role `i` of `fact`: the
    /// fact's own component, or for a reified fact type the second
    /// component of its role relation restricted to the reified concept.
    fn proj(&self, fact: &str, i: usize) -> (Component, RelationExpr) {
        match self.reified.get(fact) {
            None => (self.sig().relations[fact].component(i), RelationExpr::atomic(fact)),
            Some(r) => (
                Component::idx(2),
                RelationExpr::and(
                    RelationExpr::atomic(r.comps[i - 1].clone()),
                    RelationExpr::select(Component::idx(1), 2, ConceptExpr::atomic(r.concept.clone())),
                ),
            ),
        }
    }

    fn proj_ref(&self, r: &RoleRef) -> (Component, RelationExpr) {
        self.proj(&r.fact, self.role_index(r))
    }

    fn exists(&self, r: &RoleRef) -> ExtConcept {
        let (c, rel) = self.proj_ref(r);
        ExtConcept::exists(ext_comp(&c), lift(&rel))
    }

    fn player_of(&self, r: &RoleRef) -> String {
        let f = self.fact(&r.fact);
        f.player(self.role_index(r)).to_string()
    }

    fn expand(&self, e: &ExtConcept) -> ConceptExpr {
        expand_concept(e, self.sig()).expect("translator builds expandable shapes")
    }

    fn push(&mut self, ax: Axiom, out: &mut Vec<usize>) -> Result<(), TranslateError> {
        let i = self.kb.push(ax).map_err(|e| TranslateError::Internal(e.to_string()))?;
        if !out.contains(&i) {
            out.push(i);
        }
        Ok(())
    }

    fn incl(&mut self, lhs: ExtConcept, rhs: ExtConcept, out: &mut Vec<usize>) -> Result<(), TranslateError> {
        let ax = Axiom::concept_incl(self.expand(&lhs), self.expand(&rhs));
        self.push(ax, out)
    }

    /// Typing of a stored fact type: `F ⊑ (r1:C1) ⊓ … ⊓ (rn:Cn)`, with the
    /// filler at position 2 for unary fact types.
    fn typing(&mut self, f: &FactType, out: &mut Vec<usize>) -> Result<(), TranslateError> {
        let rs = self.sig().relations[&f.name].clone();
        let mut players: Vec<String> = f.roles.iter().map(|r| r.player.clone()).collect();
        if let Some(filler) = self.fillers.get(&f.name) {
            players.push(filler.clone());
        }
        let sels = players
            .iter()
            .enumerate()
            .map(|(i, p)| RelationExpr::select(rs.component(i + 1), rs.arity, ConceptExpr::atomic(p.clone())));
        let rhs = RelationExpr::conjunction(sels).expect("arity >= 1");
        self.push(Axiom::relation_incl(RelationExpr::atomic(f.name.clone()), rhs), out)
    }

    /// The reified block: `R ⊑ ⊓ᵢ ∃[1]rᵢ ⊓ (≤1[1]rᵢ) ⊓ ∀[1](rᵢ ⇒ (2:Cᵢ))`
    /// plus identification of `R` by all its components.
    fn reified_block(&mut self, fact: &str, out: &mut Vec<usize>) -> Result<(), TranslateError> {
        let r = self.reified[fact].clone();
        let f = self.fact(fact).clone();
        let one = ExtComponent::idx(1);
        let mut parts = Vec::new();
        for (i, comp) in r.comps.iter().enumerate() {
            let rel = ExtRelation::atomic(comp.clone());
            parts.push(ExtConcept::exists(one.clone(), rel.clone()));
            parts.push(ExtConcept::at_most(1, one.clone(), rel.clone()));
            let typed = ExtRelation::sel(ExtComponent::idx(2), None, ExtConcept::atomic(f.player(i + 1)));
            parts.push(ExtConcept::forall(one.clone(), ExtRelation::implies(rel, typed)));
        }
        self.incl(ExtConcept::atomic(r.concept.clone()), c_and(parts), out)?;
        self.identify(fact, &(1..=f.arity()).collect::<Vec<_>>(), out)
    }

    fn identify(&mut self, fact: &str, roles: &[usize], out: &mut Vec<usize>) -> Result<(), TranslateError> {
        let r = &self.reified[fact];
        let parts = roles.iter().map(|i| (Component::idx(1), r.comps[i - 1].clone())).collect();
        let ax = Axiom::Id { concept: r.concept.clone(), parts };
        self.push(ax, out)
    }

    fn entry(&mut self, c: &Construct, report: &mut TranslationReport) -> Result<(), TranslateError> {
        let rule = construct_rule(self.m, c);
        if rule == RuleKey::Rejected {
            return Ok(());
        }
        let mut axioms = Vec::new();
        let mut notes = Vec::new();
        match c {
            Construct::ObjectType(_) => {}
            Construct::ValueType(t) => self.value_type(t, &mut axioms)?,
            Construct::Subtype(sub, sup) => {
                self.incl(ExtConcept::atomic(sub.clone()), ExtConcept::atomic(sup.clone()), &mut axioms)?
            }
            Construct::Fact(n) => self.fact_entry(n, &mut axioms, &mut notes)?,
            Construct::Constraint(k) => self.constraint(*k, &mut axioms, &mut notes)?,
        }
        report.entries.push(ReportEntry {
            construct: c.clone(),
            text: c.describe(self.m),
            rule,
            axioms,
            fresh: self.fresh.get(c).cloned().unwrap_or_default(),
            notes,
        });
        Ok(())
    }

    /// `C ⊑ ∀[ri](F ⇒ (rj:T))` for every stored binary fact type where
    /// `T` plays role `j` and `C` the other role.
    fn value_type(&mut self, t: &str, out: &mut Vec<usize>) -> Result<(), TranslateError> {
        let binaries: Vec<FactType> = self
            .m
            .fact_types
            .values()
            .filter(|f| f.arity() == 2 && f.derivation == Derivation::None && !self.reified.contains_key(&f.name))
            .cloned()
            .collect();
        for f in binaries {
            for j in 1..=2 {
                if f.player(j) != t {
                    continue;
                }
                let i = 3 - j;
                let rs = self.sig().relations[&f.name].clone();
                let typed = ExtRelation::sel(ext_comp(&rs.component(j)), None, ExtConcept::atomic(t));
                let body = ExtRelation::implies(ExtRelation::atomic(f.name.clone()), typed);
                let rhs = ExtConcept::forall(ext_comp(&rs.component(i)), body);
                self.incl(ExtConcept::atomic(f.player(i)), rhs, out)?;
            }
        }
        Ok(())
    }

    fn fact_entry(&mut self, n: &str, out: &mut Vec<usize>, notes: &mut Vec<String>) -> Result<(), TranslateError> {
        let f = self.fact(n).clone();
        match f.derivation {
            Derivation::Derived => notes.push("derived fact type: no axioms".into()),
            Derivation::DerivedAndStored(k) => {
                self.typing(&f, out)?;
                let rs = self.sig().relations[n].clone();
                let sources = (1..=f.arity()).filter(|&i| i != k).map(|i| rs.component(i)).collect();
                self.push(Axiom::Fd { relation: n.to_string(), sources, target: rs.component(k) }, out)?;
                let typed = ExtRelation::sel(ext_comp(&rs.component(k)), None, ExtConcept::atomic(f.player(k)));
                let rhs = ExtConcept::forall(
                    ext_comp(&rs.component(1)),
                    ExtRelation::implies(ExtRelation::atomic(n), typed),
                );
                self.incl(ExtConcept::atomic(f.player(1)), rhs, out)?;
            }
            Derivation::None if self.reified.contains_key(n) => {
                if let Some(o) = self.m.objectification_of(n) {
                    notes.push(format!("reified as `{o}` by objectification"));
                } else {
                    self.reified_block(n, out)?;
                    notes.push(format!("reified as concept `{n}`"));
                }
            }
            Derivation::None => self.typing(&f, out)?,
        }
        Ok(())
    }

    fn note_reified<'r>(&self, notes: &mut Vec<String>, facts: impl IntoIterator<Item = &'r str>) {
        let rs: BTreeSet<&str> = facts.into_iter().filter(|f| self.reified.contains_key(*f)).collect();
        for f in rs {
            notes.push(format!("rewritten over the role relations of reified `{f}`"));
        }
    }

    fn frequency(&mut self, player: &str, role: &RoleRef, min: u32, max: Option<u32>, out: &mut Vec<usize>, notes: &mut Vec<String>) -> Result<(), TranslateError> {
        let (c, rel) = self.proj_ref(role);
        let (c, rel) = (ext_comp(&c), lift(&rel));
        let lower = (min > 1 || max.is_none() || Some(min) == max)
            .then(|| ExtConcept::at_least(min, c.clone(), rel.clone()));
        let upper = max.map(|b| ExtConcept::at_most(b, c.clone(), rel.clone()));
        let rhs = c_and(lower.iter().cloned().chain(upper));
        let mut lhs = ExtConcept::atomic(player);
        if self.opts.fol_faithful && lower.is_some() {
            lhs = ExtConcept::and(lhs, ExtConcept::exists(c, rel));
            notes.push("lower bound conditional on participation".into());
        }
        self.incl(lhs, rhs, out)
    }

    fn operand(&self, x: &RoleOrFact) -> ExtConcept {
        match x {
            RoleOrFact::Role(r) => self.exists(r),
            RoleOrFact::Fact(_) => unreachable!("role operand expected"),
        }
    }

    /// Relation for a whole fact type, or `None` when it is reified.
    fn fact_relation(&self, x: &RoleOrFact) -> Option<RelationExpr> {
        match x {
            RoleOrFact::Fact(f) if !self.reified.contains_key(f) => Some(RelationExpr::atomic(f.clone())),
            _ => None,
        }
    }

    /// Role-by-role projections of a fact-level comparison; used when an
    /// operand is reified and the fact types cannot be compared directly.
    fn fact_projections(&self, a: &str, b: &str) -> Vec<(ExtConcept, ExtConcept)> {
        (1..=self.fact(a).arity())
            .map(|i| {
                let (ca, ra) = self.proj(a, i);
                let (cb, rb) = self.proj(b, i);
                (
                    ExtConcept::exists(ext_comp(&ca), lift(&ra)),
                    ExtConcept::exists(ext_comp(&cb), lift(&rb)),
                )
            })
            .collect()
    }

    fn fact_name(x: &RoleOrFact) -> &str {
        match x {
            RoleOrFact::Role(r) => &r.fact,
            RoleOrFact::Fact(f) => f,
        }
    }

    /// `sub ⊑ sup` between operands of a subset or one half of an equality.
    fn subset(&mut self, sub: &RoleOrFact, sup: &RoleOrFact, out: &mut Vec<usize>, notes: &mut Vec<String>) -> Result<(), TranslateError> {
        if let RoleOrFact::Role(_) = sub {
            return self.incl(self.operand(sub), self.operand(sup), out);
        }
        match (self.fact_relation(sub), self.fact_relation(sup)) {
            (Some(a), Some(b)) => self.push(Axiom::relation_incl(a, b), out),
            _ => {
                notes.push("reified operand: compared role by role only".into());
                for (a, b) in self.fact_projections(Self::fact_name(sub), Self::fact_name(sup)) {
                    self.incl(a, b, out)?;
                }
                Ok(())
            }
        }
    }

    fn exclude(&mut self, a: &RoleOrFact, b: &RoleOrFact, out: &mut Vec<usize>, notes: &mut Vec<String>) -> Result<(), TranslateError> {
        if let RoleOrFact::Role(_) = a {
            return self.incl(self.operand(a), ExtConcept::not(self.operand(b)), out);
        }
        match (self.fact_relation(a), self.fact_relation(b)) {
            (Some(x), Some(y)) => self.push(Axiom::relation_incl(x, RelationExpr::not(y)), out),
            _ => {
                notes.push("reified operand: fact exclusion not expressible, no axiom".into());
                Ok(())
            }
        }
    }

    fn join_concept(&self, p: &JoinPair) -> ExtConcept {
        ExtConcept::and(self.exists(&p.0), self.exists(&p.1))
    }

    fn constraint(&mut self, k: usize, out: &mut Vec<usize>, notes: &mut Vec<String>) -> Result<(), TranslateError> {
        use OrmConstraint::*;
        let con = self.m.constraints[k].clone();
        match &con {
            Mandatory { player, role } => {
                self.note_reified(notes, [role.fact.as_str()]);
                self.incl(ExtConcept::atomic(player.clone()), self.exists(role), out)?;
            }
            Participation { player, role } => {
                self.note_reified(notes, [role.fact.as_str()]);
                let (c, rel) = self.proj_ref(role);
                self.incl(ExtConcept::atomic(player.clone()), ExtConcept::forall(ext_comp(&c), lift(&rel)), out)?;
            }
            DisjunctiveMandatory { player, roles } => {
                self.note_reified(notes, roles.iter().map(|r| r.fact.as_str()));
                let rhs = c_or(roles.iter().map(|r| self.exists(r)));
                self.incl(ExtConcept::atomic(player.clone()), rhs, out)?;
            }
            Uniqueness { fact, roles } => {
                let f = self.fact(fact).clone();
                let idx: Vec<usize> = roles.iter().map(|r| f.role_index(r).expect("validated")).collect();
                if idx.len() == 1 {
                    self.note_reified(notes, [fact.as_str()]);
                    let (c, rel) = self.proj(fact, idx[0]);
                    let rhs = ExtConcept::at_most(1, ext_comp(&c), lift(&rel));
                    self.incl(ExtConcept::atomic(f.player(idx[0])), rhs, out)?;
                } else if self.reified.contains_key(fact) {
                    let mut sorted = idx.clone();
                    sorted.sort_unstable();
                    self.identify(fact, &sorted, out)?;
                } else {
                    notes.push("spans every role: holds by set semantics of the relation, no axiom".into());
                }
            }
            ExternalUniqueness { target, roles } => {
                if roles.iter().any(|r| self.reified.contains_key(&r.fact)) {
                    notes.push("reified fact type in scope: identification not expressible, no axiom".into());
                    return Ok(());
                }
                let placeholder = self.fresh.get(&Construct::Constraint(k)).and_then(|v| v.first().cloned());
                let concept = match (target, &placeholder) {
                    (Some(t), _) => t.clone(),
                    (None, Some(p)) => p.clone(),
                    (None, None) => self.common_target(roles).expect("target found in first pass"),
                };
                let mut parts = Vec::new();
                for r in roles {
                    let i = self.role_index(r);
                    let rs = &self.sig().relations[&r.fact];
                    parts.push((rs.component(3 - i), r.fact.clone()));
                }
                if placeholder.is_some() {
                    for (c, rel) in parts.clone() {
                        let lhs = ExtConcept::exists(ext_comp(&c), ExtRelation::atomic(rel));
                        self.incl(lhs, ExtConcept::atomic(concept.clone()), out)?;
                    }
                }
                self.push(Axiom::Id { concept, parts }, out)?;
            }
            Frequency { player, role, min, max } => {
                self.note_reified(notes, [role.fact.as_str()]);
                self.frequency(player, role, *min, *max, out, notes)?;
            }
            MultiRoleFrequency { .. } | Ring { .. } => unreachable!("rejected constructs have no entry"),
            Cover { sup, subs } => {
                let rhs = c_or(subs.iter().map(|s| ExtConcept::atomic(s.clone())));
                self.incl(ExtConcept::atomic(sup.clone()), rhs, out)?;
            }
            Disjoint { sup, subs } => {
                for (i, d) in subs.iter().enumerate() {
                    if i + 1 < subs.len() {
                        let rest = c_and(subs[i + 1..].iter().map(|e| ExtConcept::not(ExtConcept::atomic(e.clone()))));
                        self.incl(ExtConcept::atomic(d.clone()), rest, out)?;
                    }
                    self.incl(ExtConcept::atomic(d.clone()), ExtConcept::atomic(sup.clone()), out)?;
                }
            }
            Subset { sub, sup } => {
                self.note_reified(notes, [Self::fact_name(sub), Self::fact_name(sup)]);
                self.subset(sub, sup, out, notes)?;
            }
            Equal { left, right } => {
                self.note_reified(notes, [Self::fact_name(left), Self::fact_name(right)]);
                self.subset(left, right, out, notes)?;
                self.subset(right, left, out, notes)?;
            }
            Exclude { items } => {
                self.note_reified(notes, items.iter().map(Self::fact_name));
                if items.len() > 2 {
                    notes.push("emitted as pairwise exclusions".into());
                }
                for i in 0..items.len() {
                    for j in i + 1..items.len() {
                        self.exclude(&items[i], &items[j], out, notes)?;
                    }
                }
                notes.dedup();
            }
            JoinSubset { sub, sup } => {
                let (l, r) = (self.join_concept(sub), self.join_concept(sup));
                self.incl(l, r, out)?;
            }
            JoinEqual { left, right } => {
                let (l, r) = (self.join_concept(left), self.join_concept(right));
                self.incl(l.clone(), r.clone(), out)?;
                self.incl(r, l, out)?;
            }
            JoinExclude { left, right } => {
                let (l, r) = (self.join_concept(left), self.join_concept(right));
                self.incl(l, ExtConcept::not(r), out)?;
            }
            Objectify { fact, as_type } => {
                self.reified_block(fact, out)?;
                notes.push(format!("`{fact}` reified as concept `{as_type}`"));
            }
            RoleValue { role, .. } => {
                self.note_reified(notes, [role.fact.as_str()]);
                let sub = self.fresh[&Construct::Constraint(k)][0].clone();
                let player = self.player_of(role);
                self.incl(ExtConcept::atomic(sub.clone()), ExtConcept::atomic(player), out)?;
                let (c, rel) = self.proj_ref(role);
                self.incl(ExtConcept::atomic(sub), ExtConcept::forall(ext_comp(&c), lift(&rel)), out)?;
            }
            Reference { .. } => {
                let h = self.hidden[&k].clone();
                let f = self.fact(&h).clone();
                notes.push(format!("lowered to fact type `{h}`"));
                self.typing(&f, out)?;
                let r1 = RoleRef::new(h.clone(), "r1");
                let r2 = RoleRef::new(h.clone(), "r2");
                self.incl(ExtConcept::atomic(f.player(1)), self.exists(&r1), out)?;
                for (i, r) in [(1, &r1), (2, &r2)] {
                    let (c, rel) = self.proj_ref(r);
                    let rhs = ExtConcept::at_most(1, ext_comp(&c), lift(&rel));
                    self.incl(ExtConcept::atomic(f.player(i)), rhs, out)?;
                }
            }
        }
        Ok(())
    }
}

fn rejections(m: &OrmModel) -> Vec<Rejection> {
    m.constraints
        .iter()
        .enumerate()
        .filter_map(|(k, c)| {
            let reason = match c {
                OrmConstraint::Ring { .. } => RejectionReason::RingConstraint,
                OrmConstraint::MultiRoleFrequency { .. } => RejectionReason::MultiRoleFrequency,
                _ => return None,
            };
            Some(Rejection::new(k, crate::orm::serialize::constraint_text(c), reason, m.constraint_span(k)))
        })
        .collect()
}

/// Translate a validated model.
pub fn translate(m: &OrmModel, opts: TranslateOptions) -> Result<(KnowledgeBase, TranslationReport), TranslateError> {
    let diags = crate::orm::validate_model(m);
    if has_errors(&diags) {
        return Err(TranslateError::Invalid(diags.into_iter().filter(|d| d.is_error()).collect()));
    }
    let rejected = rejections(m);
    if !rejected.is_empty() && !opts.partial {
        return Err(TranslateError::Rejected(RejectionError { rejections: rejected }));
    }
    let mut t = Translator::new(m, opts);
    t.declare();
    let mut report = TranslationReport { options: opts, rejections: rejected, ..Default::default() };
    for c in constructs(m) {
        t.entry(&c, &mut report)?;
    }
    report.reified_facts = t.reified.keys().cloned().collect();
    Ok((t.kb, report))
}

/// The report [`translate`] would produce. Rejections are listed rather
/// than raised.
pub fn explain(m: &OrmModel, opts: TranslateOptions) -> Result<TranslationReport, TranslateError> {
    translate(m, TranslateOptions { partial: true, ..opts }).map(|(_, r)| r)
}

#[cfg(test)]
mod tests;
