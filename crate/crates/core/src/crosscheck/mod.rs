//! First-order semantics of ORM models, checked directly on finite
//! populations, and the bounded comparison with the translated knowledge
//! base.

mod compare;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

pub use compare::{approximations, cross_check, Approximation, Comparison, CrossConfig, CrossError, CrossReport, SideVerdict};
pub use search::{orm_satisfiable_bounded, orm_type_satisfiable_bounded};

use crate::orm::inventory::constructs;
use crate::orm::{join_columns, Construct, FactType, JoinPair, OrmConstraint, OrmModel, RingKind, RoleOrFact, RoleRef};
use crate::semantics::{all_tuples, tuple_text, Tuple};
use crate::value::Literal;

/// A population of an ORM model over Δ = {0, …, d−1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrmInterpretation {
    pub domain_size: usize,
    /// Object, objectified and value types.
    pub types: BTreeMap<String, BTreeSet<usize>>,
    /// Fact types, hidden reference fact types included.
    pub facts: BTreeMap<String, BTreeSet<Tuple>>,
    /// Per objectified fact type, the tuple each instance stands for.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objectified: BTreeMap<String, BTreeMap<usize, Tuple>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<usize, Literal>,
}

/// Fact types of `m` with reference schemes lowered.
pub fn all_facts(m: &OrmModel) -> BTreeMap<String, FactType> {
    let mut out = m.fact_types.clone();
    out.extend(m.reference_facts().into_iter().map(|(_, f)| (f.name.clone(), f)));
    out
}

fn all_types(m: &OrmModel) -> BTreeSet<String> {
    let mut s = m.all_object_types();
    s.extend(m.value_types.keys().cloned());
    s
}

impl OrmInterpretation {
    pub fn empty(m: &OrmModel, d: usize) -> Self {
        OrmInterpretation {
            domain_size: d,
            types: all_types(m).into_iter().map(|t| (t, BTreeSet::new())).collect(),
            facts: all_facts(m).into_keys().map(|f| (f, BTreeSet::new())).collect(),
            objectified: m.objectified().values().map(|f| (f.to_string(), BTreeMap::new())).collect(),
            values: BTreeMap::new(),
        }
    }

    /// Elements inside Δ, tuple arities as declared, literals injective.
    pub fn check_structure(&self, m: &OrmModel) -> Result<(), String> {
        let d = self.domain_size;
        if d == 0 {
            return Err("empty domain".into());
        }
        for (t, ext) in &self.types {
            if ext.iter().any(|&x| x >= d) {
                return Err(format!("{t} has an element outside Δ"));
            }
        }
        let facts = all_facts(m);
        for (f, ts) in &self.facts {
            let n = facts.get(f).map(|f| f.arity()).ok_or_else(|| format!("unknown fact type {f}"))?;
            if ts.iter().any(|t| t.len() != n || t.iter().any(|&x| x >= d)) {
                return Err(format!("{f} has a malformed tuple"));
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

    fn ty(&self, t: &str) -> &BTreeSet<usize> {
        static EMPTY: BTreeSet<usize> = BTreeSet::new();
        self.types.get(t).unwrap_or(&EMPTY)
    }

    fn tuples(&self, f: &str) -> &BTreeSet<Tuple> {
        static EMPTY: BTreeSet<Tuple> = BTreeSet::new();
        self.facts.get(f).unwrap_or(&EMPTY)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "domain {}", self.domain_size);
        for (t, ext) in &self.types {
            let items: Vec<String> = ext.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{t} = {{{}}}", items.join(", "));
        }
        for (f, ts) in &self.facts {
            let items: Vec<String> = ts.iter().map(|t| tuple_text(t)).collect();
            let _ = writeln!(out, "{f} = {{{}}}", items.join(", "));
        }
        for (f, link) in &self.objectified {
            for (e, t) in link {
                let _ = writeln!(out, "{e} objectifies {f}{}", tuple_text(t));
            }
        }
        for (e, l) in &self.values {
            let _ = writeln!(out, "value {e} = {l}");
        }
        out
    }
}

impl fmt::Display for OrmInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `None` when the construct's formula holds, else a falsifying assignment.
pub type Verdict = Option<String>;

struct Eval<'a> {
    i: &'a OrmInterpretation,
    m: &'a OrmModel,
    facts: BTreeMap<String, FactType>,
    hidden: BTreeMap<usize, String>,
}

type Check = Result<(), String>;

fn fail<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

impl<'a> Eval<'a> {
    fn new(i: &'a OrmInterpretation, m: &'a OrmModel) -> Self {
        let hidden = m.reference_facts().into_iter().map(|(k, f)| (k, f.name)).collect();
        Eval { i, m, facts: all_facts(m), hidden }
    }

    fn role(&self, r: &RoleRef) -> (&str, usize) {
        let f = &self.facts[&r.fact];
        (f.name.as_str(), f.role_index(&r.role).expect("validated role"))
    }

    /// Elements playing role `i` of `f`.
    fn proj(&self, f: &str, i: usize) -> BTreeSet<usize> {
        self.i.tuples(f).iter().map(|t| t[i - 1]).collect()
    }

    fn typing(&self, f: &FactType) -> Check {
        for t in self.i.tuples(&f.name) {
            for (k, &x) in t.iter().enumerate() {
                if !self.i.ty(f.player(k + 1)).contains(&x) {
                    return fail(format!("{}{}: {x} is not a {}", f.name, tuple_text(t), f.player(k + 1)));
                }
            }
        }
        Ok(())
    }

    fn value_type(&self, t: &str) -> Check {
        let dom = &self.m.value_types[t];
        for e in 0..self.i.domain_size {
            let conforms = self.i.values.get(&e).is_some_and(|l| dom.conforms(l));
            match (self.i.ty(t).contains(&e), conforms) {
                (true, false) => return fail(format!("{e} ∈ {t} carries no conforming value")),
                (false, true) => return fail(format!("{e} carries {} but is not in {t}", self.i.values[&e])),
                _ => {}
            }
        }
        Ok(())
    }

    fn functional(&self, f: &str, sources: &[usize], target: usize) -> Check {
        let ts: Vec<&Tuple> = self.i.tuples(f).iter().collect();
        for (a, t) in ts.iter().enumerate() {
            for s in &ts[a + 1..] {
                if sources.iter().all(|&k| t[k - 1] == s[k - 1]) && t[target - 1] != s[target - 1] {
                    return fail(format!("{f}{} and {f}{}", tuple_text(t), tuple_text(s)));
                }
            }
        }
        Ok(())
    }

    fn fact(&self, n: &str) -> Check {
        let f = &self.facts[n];
        self.typing(f)?;
        if let crate::orm::Derivation::DerivedAndStored(k) = f.derivation {
            let sources: Vec<usize> = (1..=f.arity()).filter(|&i| i != k).collect();
            self.functional(n, &sources, k)?;
        }
        Ok(())
    }

    fn count_at(&self, f: &str, i: usize, x: usize) -> usize {
        self.i.tuples(f).iter().filter(|t| t[i - 1] == x).count()
    }

    /// Role inclusion. For fact types of equal arity n > 2 the component
    /// after the compared role is existential and the remaining ones are
    /// carried over position by position; otherwise projections compare.
    fn role_subset(&self, a: &RoleRef, b: &RoleRef) -> Check {
        let (fa, ia) = self.role(a);
        let (fb, ib) = self.role(b);
        let (na, nb) = (self.facts[fa].arity(), self.facts[fb].arity());
        if na > 2 && na == nb {
            let (wa, wb) = (rest_positions(na, ia), rest_positions(nb, ib));
            for t in self.i.tuples(fa) {
                let found = self.i.tuples(fb).iter().any(|s| {
                    s[ib - 1] == t[ia - 1] && wa.iter().zip(&wb).all(|(&p, &q)| t[p - 1] == s[q - 1])
                });
                if !found {
                    return fail(format!("{fa}{} has no counterpart in {fb}", tuple_text(t)));
                }
            }
            return Ok(());
        }
        let pb = self.proj(fb, ib);
        match self.proj(fa, ia).into_iter().find(|x| !pb.contains(x)) {
            Some(x) => fail(format!("{x} plays {a} but not {b}")),
            None => Ok(()),
        }
    }

    fn subset(&self, sub: &RoleOrFact, sup: &RoleOrFact) -> Check {
        match (sub, sup) {
            (RoleOrFact::Role(a), RoleOrFact::Role(b)) => self.role_subset(a, b),
            (RoleOrFact::Fact(a), RoleOrFact::Fact(b)) => {
                let tb = self.i.tuples(b);
                match self.i.tuples(a).iter().find(|t| !tb.contains(*t)) {
                    Some(t) => fail(format!("{a}{} is not in {b}", tuple_text(t))),
                    None => Ok(()),
                }
            }
            _ => unreachable!("validated operands"),
        }
    }

    fn exclude(&self, a: &RoleOrFact, b: &RoleOrFact) -> Check {
        match (a, b) {
            (RoleOrFact::Role(x), RoleOrFact::Role(y)) => {
                let (fa, ia) = self.role(x);
                let (fb, ib) = self.role(y);
                let pb = self.proj(fb, ib);
                match self.proj(fa, ia).into_iter().find(|e| pb.contains(e)) {
                    Some(e) => fail(format!("{e} plays both {x} and {y}")),
                    None => Ok(()),
                }
            }
            (RoleOrFact::Fact(x), RoleOrFact::Fact(y)) => {
                let ty = self.i.tuples(y);
                match self.i.tuples(x).iter().find(|t| ty.contains(*t)) {
                    Some(t) => fail(format!("{} is in both {x} and {y}", tuple_text(t))),
                    None => Ok(()),
                }
            }
            _ => unreachable!("validated operands"),
        }
    }

    fn join(&self, p: &JoinPair) -> BTreeSet<(usize, usize)> {
        join_pairs(self.m, &self.facts, p, |f| self.i.tuples(f).iter().cloned().collect())
    }

    fn ring(&self, kind: RingKind, f: &str, a: usize, b: usize) -> Check {
        let pairs: BTreeSet<(usize, usize)> = self.i.tuples(f).iter().map(|t| (t[a - 1], t[b - 1])).collect();
        ring_violation(kind, &pairs).map_or(Ok(()), Err)
    }

    fn constraint(&self, k: usize) -> Check {
        use OrmConstraint::*;
        match &self.m.constraints[k] {
            Mandatory { player, role } => {
                let (f, i) = self.role(role);
                let plays = self.proj(f, i);
                match self.i.ty(player).iter().find(|x| !plays.contains(x)) {
                    Some(x) => fail(format!("{x} ∈ {player} does not play {role}")),
                    None => Ok(()),
                }
            }
            Participation { player, role } => {
                let (f, i) = self.role(role);
                let n = self.facts[f].arity();
                for &x in self.i.ty(player) {
                    for mut z in all_tuples(self.i.domain_size, n - 1) {
                        z.insert(i - 1, x);
                        if !self.i.tuples(f).contains(&z) {
                            return fail(format!("{x} ∈ {player} but {f}{} is missing", tuple_text(&z)));
                        }
                    }
                }
                Ok(())
            }
            DisjunctiveMandatory { player, roles } => {
                let plays: BTreeSet<usize> = roles
                    .iter()
                    .flat_map(|r| {
                        let (f, i) = self.role(r);
                        self.proj(f, i)
                    })
                    .collect();
                match self.i.ty(player).iter().find(|x| !plays.contains(x)) {
                    Some(x) => fail(format!("{x} ∈ {player} plays none of the roles")),
                    None => Ok(()),
                }
            }
            Uniqueness { fact, roles } => {
                let f = &self.facts[fact];
                let s: Vec<usize> = roles.iter().map(|r| f.role_index(r).expect("validated")).collect();
                let all: Vec<usize> = (1..=f.arity()).collect();
                for target in all.iter().filter(|j| !s.contains(j)) {
                    self.functional(fact, &s, *target)?;
                }
                Ok(())
            }
            ExternalUniqueness { roles, .. } => {
                let sides: Vec<(&str, usize)> = roles.iter().map(|r| self.role(r)).collect();
                // identifying values reachable from x through each fact type
                let by = |x: usize, (f, i): (&str, usize)| -> BTreeSet<usize> {
                    self.i.tuples(f).iter().filter(|t| t[2 - i] == x).map(|t| t[i - 1]).collect()
                };
                for x1 in 0..self.i.domain_size {
                    for x2 in x1 + 1..self.i.domain_size {
                        let shared = sides.iter().all(|&side| !by(x1, side).is_disjoint(&by(x2, side)));
                        if shared {
                            return fail(format!("{x1} and {x2} share every identifying value"));
                        }
                    }
                }
                Ok(())
            }
            Frequency { player, role, min, max } => {
                let (f, i) = self.role(role);
                for &x in self.i.ty(player) {
                    let c = self.count_at(f, i, x);
                    if (c > 0 && c < *min as usize) || max.is_some_and(|b| c > b as usize) {
                        return fail(format!("{x} plays {role} {c} times"));
                    }
                }
                Ok(())
            }
            MultiRoleFrequency { fact, roles, min, max } => {
                let f = &self.facts[fact];
                let s: Vec<usize> = roles.iter().map(|r| f.role_index(r).expect("validated")).collect();
                let mut groups: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
                for t in self.i.tuples(fact) {
                    *groups.entry(s.iter().map(|&k| t[k - 1]).collect()).or_default() += 1;
                }
                match groups.iter().find(|(_, &c)| c < *min as usize || max.is_some_and(|b| c > b as usize)) {
                    Some((g, c)) => fail(format!("{}: {c} tuples", tuple_text(g))),
                    None => Ok(()),
                }
            }
            Cover { sup, subs } => match self.i.ty(sup).iter().find(|x| !subs.iter().any(|s| self.i.ty(s).contains(x))) {
                Some(x) => fail(format!("{x} ∈ {sup} is in no subtype")),
                None => Ok(()),
            },
            Disjoint { sup, subs } => {
                for (a, s) in subs.iter().enumerate() {
                    if let Some(x) = self.i.ty(s).iter().find(|x| !self.i.ty(sup).contains(x)) {
                        return fail(format!("{x} ∈ {s} but not {sup}"));
                    }
                    for t in &subs[a + 1..] {
                        if let Some(x) = self.i.ty(s).intersection(self.i.ty(t)).next() {
                            return fail(format!("{x} ∈ {s} ∩ {t}"));
                        }
                    }
                }
                Ok(())
            }
            Subset { sub, sup } => self.subset(sub, sup),
            Equal { left, right } => {
                self.subset(left, right)?;
                self.subset(right, left)
            }
            Exclude { items } => {
                for (a, x) in items.iter().enumerate() {
                    for y in &items[a + 1..] {
                        self.exclude(x, y)?;
                    }
                }
                Ok(())
            }
            JoinSubset { sub, sup } => included(&self.join(sub), &self.join(sup)),
            JoinEqual { left, right } => {
                let (l, r) = (self.join(left), self.join(right));
                included(&l, &r)?;
                included(&r, &l)
            }
            JoinExclude { left, right } => match self.join(left).intersection(&self.join(right)).next() {
                Some((x, y)) => fail(format!("({x},{y}) is in both joins")),
                None => Ok(()),
            },
            Objectify { fact, as_type } => {
                let empty = BTreeMap::new();
                let link = self.i.objectified.get(fact).unwrap_or(&empty);
                let keys: BTreeSet<usize> = link.keys().copied().collect();
                if &keys != self.i.ty(as_type) {
                    return fail(format!("{as_type} differs from the objectified instances"));
                }
                let image: BTreeSet<&Tuple> = link.values().collect();
                if image.len() != link.len() {
                    return fail(format!("two instances of {as_type} share a tuple"));
                }
                if image.into_iter().cloned().collect::<BTreeSet<_>>() != *self.i.tuples(fact) {
                    return fail(format!("{as_type} does not cover {fact} exactly"));
                }
                Ok(())
            }
            RoleValue { role, values } => {
                let (f, i) = self.role(role);
                let ft = &self.facts[f];
                for t in self.i.tuples(f) {
                    let x = t[i - 1];
                    if self.i.values.get(&x).is_some_and(|l| values.admits(l)) {
                        for (k, &y) in t.iter().enumerate() {
                            if !self.i.ty(ft.player(k + 1)).contains(&y) {
                                return fail(format!("{f}{}: {y} is not a {}", tuple_text(t), ft.player(k + 1)));
                            }
                        }
                    }
                }
                Ok(())
            }
            Ring { ring, fact, roles } => {
                let f = &self.facts[fact];
                let a = f.role_index(&roles.0).expect("validated");
                let b = f.role_index(&roles.1).expect("validated");
                self.ring(*ring, fact, a, b)
            }
            Reference { object, value } => {
                let h = &self.hidden[&k];
                self.typing(&self.facts[h])?;
                for &x in self.i.ty(object) {
                    let c = self.count_at(h, 1, x);
                    if c != 1 {
                        return fail(format!("{x} ∈ {object} has {c} {value} values"));
                    }
                }
                for v in 0..self.i.domain_size {
                    if self.count_at(h, 2, v) > 1 {
                        return fail(format!("{v} identifies two {object} instances"));
                    }
                }
                Ok(())
            }
        }
    }

    fn construct(&self, c: &Construct) -> Check {
        match c {
            Construct::ObjectType(_) => Ok(()),
            Construct::ValueType(t) => self.value_type(t),
            Construct::Subtype(sub, sup) => match self.i.ty(sub).iter().find(|x| !self.i.ty(sup).contains(x)) {
                Some(x) => fail(format!("{x} ∈ {sub} but not {sup}")),
                None => Ok(()),
            },
            Construct::Fact(n) => self.fact(n),
            Construct::Constraint(k) => self.constraint(*k),
        }
    }
}

/// Positions of an n-tuple other than `i` and the one after it (cyclically).
fn rest_positions(n: usize, i: usize) -> Vec<usize> {
    let y = i % n + 1;
    (1..=n).filter(|&k| k != i && k != y).collect()
}

fn included(a: &BTreeSet<(usize, usize)>, b: &BTreeSet<(usize, usize)>) -> Check {
    match a.difference(b).next() {
        Some((x, y)) => fail(format!("({x},{y}) is missing on the right")),
        None => Ok(()),
    }
}

/// The projection of a join pair onto its two referenced roles: pairs
/// `(t[a], s[b])` over tuples joined on the column pair of
/// [`join_columns`], or the two columns of one tuple within a single
/// fact type.
pub(crate) fn join_pairs(
    m: &OrmModel,
    facts: &BTreeMap<String, FactType>,
    p: &JoinPair,
    tuples: impl Fn(&str) -> Vec<Tuple>,
) -> BTreeSet<(usize, usize)> {
    let ia = facts[&p.0.fact].role_index(&p.0.role).expect("validated");
    let ib = facts[&p.1.fact].role_index(&p.1.role).expect("validated");
    match join_columns(m, p).expect("validated join") {
        None => tuples(&p.0.fact).iter().map(|t| (t[ia - 1], t[ib - 1])).collect(),
        Some((fa, ka, fb, kb)) => {
            let (ta, tb) = (tuples(&fa), tuples(&fb));
            let mut out = BTreeSet::new();
            for t in &ta {
                for s in &tb {
                    if t[ka - 1] == s[kb - 1] {
                        out.insert((t[ia - 1], s[ib - 1]));
                    }
                }
            }
            out
        }
    }
}

/// First violation of a ring property by a binary relation.
pub fn ring_violation(kind: RingKind, pairs: &BTreeSet<(usize, usize)>) -> Option<String> {
    let has = |x: usize, y: usize| pairs.contains(&(x, y));
    match kind {
        RingKind::Irreflexive => pairs.iter().find(|(x, y)| x == y).map(|(x, _)| format!("({x},{x})")),
        RingKind::Asymmetric => pairs.iter().find(|&&(x, y)| has(y, x)).map(|(x, y)| format!("({x},{y}) and ({y},{x})")),
        RingKind::Antisymmetric => {
            pairs.iter().find(|&&(x, y)| x != y && has(y, x)).map(|(x, y)| format!("({x},{y}) and ({y},{x})"))
        }
        RingKind::Symmetric => pairs.iter().find(|&&(x, y)| !has(y, x)).map(|(x, y)| format!("({x},{y}) without ({y},{x})")),
        RingKind::Intransitive => {
            for &(x, y) in pairs {
                for &(y2, z) in pairs {
                    if y == y2 && has(x, z) {
                        return Some(format!("({x},{y}), ({y},{z}) and ({x},{z})"));
                    }
                }
            }
            None
        }
        RingKind::Acyclic => {
            let mut reach = pairs.clone();
            loop {
                let next: BTreeSet<(usize, usize)> = reach
                    .iter()
                    .flat_map(|&(x, y)| pairs.iter().filter(move |(a, _)| *a == y).map(move |&(_, z)| (x, z)))
                    .collect();
                let before = reach.len();
                reach.extend(next);
                if reach.len() == before {
                    break;
                }
            }
            reach.iter().find(|(x, y)| x == y).map(|(x, _)| format!("cycle through {x}"))
        }
    }
}

/// Per-construct verdicts: every construct of `m` maps to `None` when its
/// formula holds in `i`, else to a falsifying assignment.
pub fn orm_verdicts(i: &OrmInterpretation, m: &OrmModel) -> BTreeMap<Construct, Verdict> {
    let ev = Eval::new(i, m);
    constructs(m).into_iter().map(|c| {
        let v = ev.construct(&c).err();
        (c, v)
    }).collect()
}

pub fn satisfies_orm(i: &OrmInterpretation, m: &OrmModel) -> bool {
    check_orm_model(i, m).is_ok()
}

/// As [`satisfies_orm`], naming the first failure.
pub fn check_orm_model(i: &OrmInterpretation, m: &OrmModel) -> Result<(), String> {
    i.check_structure(m)?;
    let ev = Eval::new(i, m);
    for c in constructs(m) {
        if let Err(e) = ev.construct(&c) {
            return Err(format!("{}: {e}", c.describe(m)));
        }
    }
    Ok(())
}
