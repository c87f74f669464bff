//! Structural validation of ORM models.

use std::collections::{BTreeMap, BTreeSet};

use super::{Derivation, JoinPair, OrmConstraint, OrmModel, RoleOrFact, RoleRef, TypeKind};
use crate::diag::{sort_diagnostics, Diagnostic, Span};

/// Columns joined by a join pair: `(fact_a, col_a, fact_b, col_b)` with
/// 1-based indices, or `None` when both roles lie in one fact type.
pub type JoinColumns = Option<(String, usize, String, usize)>;

/// Resolve the join of a pair: the first pair of non-projected roles, in
/// role order, whose players coincide. Pairs within one fact type need
/// no join.
pub fn join_columns(m: &OrmModel, p: &JoinPair) -> Result<JoinColumns, ()> {
    let (fa, ia) = m.resolve(&p.0).ok_or(())?;
    let (fb, ib) = m.resolve(&p.1).ok_or(())?;
    if fa.name == fb.name {
        return if ia != ib { Ok(None) } else { Err(()) };
    }
    for k in (1..=fa.arity()).filter(|&k| k != ia) {
        for l in (1..=fb.arity()).filter(|&l| l != ib) {
            if fa.player(k) == fb.player(l) {
                return Ok(Some((fa.name.clone(), k, fb.name.clone(), l)));
            }
        }
    }
    Err(())
}

struct Checker<'a> {
    m: &'a OrmModel,
    out: Vec<Diagnostic>,
    k: usize,
}

impl<'a> Checker<'a> {
    fn span_of(&self, text: &str) -> Span {
        self.m
            .source
            .refs
            .get(&(self.k, text.to_string()))
            .copied()
            .unwrap_or_else(|| self.m.constraint_span(self.k))
    }

    fn error(&mut self, code: &str, msg: String, span: Span) {
        self.out.push(Diagnostic::error(code, msg, span));
    }

    fn ty(&mut self, name: &str) -> Option<TypeKind> {
        let kind = self.m.type_kind(name);
        if kind.is_none() {
            let s = self.span_of(name);
            self.error("unknown-type", format!("unknown type `{name}`"), s);
        }
        kind
    }

    fn fact(&mut self, name: &str) -> Option<usize> {
        match self.m.fact(name) {
            Some(f) => Some(f.arity()),
            None => {
                let s = self.span_of(name);
                self.error("unknown-fact", format!("unknown fact type `{name}`"), s);
                None
            }
        }
    }

    fn role_in(&mut self, fact: &str, role: &str, text: &str) -> Option<usize> {
        let f = self.m.fact(fact);
        match f {
            None => {
                let s = self.span_of(text);
                self.error("unknown-fact", format!("unknown fact type `{fact}`"), s);
                None
            }
            Some(f) => match f.role_index(role) {
                Some(i) => Some(i),
                None => {
                    let s = self.span_of(text);
                    self.error("unknown-role", format!("fact type `{fact}` has no role `{role}`"), s);
                    None
                }
            },
        }
    }

    fn role(&mut self, r: &RoleRef) -> Option<usize> {
        self.role_in(&r.fact, &r.role, &r.to_string())
    }

    /// `player` must be the role's player or one of its subtypes.
    fn plays(&mut self, player: &str, r: &RoleRef) {
        let Some(actual) = self.m.player_of(r) else { return };
        if self.m.is_type(player) && !self.m.ancestors(player).contains(actual) {
            let s = self.span_of(player);
            self.error("player-mismatch", format!("`{player}` does not play role {r} (played by `{actual}`)"), s);
        }
    }

    fn bounds(&mut self, min: u32, max: Option<u32>) {
        if min < 1 || max.is_some_and(|b| b < min) {
            let s = self.m.constraint_span(self.k);
            let hi = max.map_or("*".to_string(), |b| b.to_string());
            self.error("bad-frequency", format!("frequency bounds {min}..{hi} need 1 <= min <= max"), s);
        }
    }

    fn operand(&mut self, x: &RoleOrFact) -> Option<(bool, usize)> {
        match x {
            RoleOrFact::Role(r) => self.role(r).map(|_| (true, 2)),
            RoleOrFact::Fact(f) => self.fact(f).map(|n| (false, n)),
        }
    }

    fn operands(&mut self, xs: &[&RoleOrFact]) {
        let got: Vec<_> = xs.iter().map(|x| self.operand(x)).collect();
        let Some(got) = got.into_iter().collect::<Option<Vec<_>>>() else { return };
        let s = self.m.constraint_span(self.k);
        if got.iter().any(|g| g.0 != got[0].0) {
            self.error("mixed-operands", "cannot compare a role with a whole fact type".into(), s);
        } else if !got[0].0 && got.iter().any(|g| g.1 != got[0].1) {
            self.error("arity-mismatch", "fact types compared here must have equal arity".into(), s);
        }
    }

    fn join(&mut self, p: &JoinPair) {
        let ok = self.role(&p.0).is_some() & self.role(&p.1).is_some();
        if ok && join_columns(self.m, p).is_err() {
            let s = self.m.constraint_span(self.k);
            self.error(
                "join-no-common-player",
                format!("no common player type to join {} and {}", p.0, p.1),
                s,
            );
        }
    }
}

/// Errors and warnings for `m`, sorted by source position and code.
pub fn validate_model(m: &OrmModel) -> Vec<Diagnostic> {
    let mut c = Checker { m, out: Vec::new(), k: usize::MAX };
    check_names(&mut c);
    check_types(&mut c);
    check_facts(&mut c);
    for (k, con) in m.constraints.iter().enumerate() {
        c.k = k;
        check_constraint(&mut c, con);
    }
    check_unused(&mut c);
    let mut out = c.out;
    sort_diagnostics(&mut out);
    out
}

fn type_span(m: &OrmModel, n: &str) -> Span {
    m.source.types.get(n).copied().unwrap_or_default()
}

fn check_names(c: &mut Checker) {
    let m = c.m;
    let mut seen: BTreeMap<String, &str> = BTreeMap::new();
    let mut clash = |c: &mut Checker, name: &str, what: &'static str, span: Span| {
        if let Some(prev) = seen.insert(name.to_string(), what) {
            c.error("duplicate-name", format!("{what} `{name}` reuses the name of a {prev}"), span);
        }
    };
    for t in &m.object_types {
        clash(c, t, "object type", type_span(m, t));
    }
    for t in m.value_types.keys() {
        clash(c, t, "value type", type_span(m, t));
    }
    for (t, f) in m.objectified() {
        let k = m
            .constraints
            .iter()
            .position(|x| matches!(x, OrmConstraint::Objectify { fact, .. } if fact == f))
            .unwrap_or(0);
        clash(c, t, "objectified type", m.constraint_span(k));
    }
    for f in m.fact_types.keys() {
        clash(c, f, "fact type", m.source.facts.get(f).copied().unwrap_or_default());
    }
    for f in m.fact_types.values() {
        for (i, r) in f.roles.iter().enumerate() {
            let Some(n) = &r.name else { continue };
            // writing the positional default explicitly is not a claim on the name
            if *n == format!("r{}", i + 1) {
                continue;
            }
            let span = m.source.roles.get(&(f.name.clone(), i + 1)).copied().unwrap_or_default();
            clash(c, n, "role", span);
        }
    }
}

fn check_types(c: &mut Checker) {
    let m = c.m;
    for (n, d) in &m.value_types {
        if let Err(e) = d.check() {
            c.error("bad-value", format!("value type `{n}`: {e}"), type_span(m, n));
        }
    }
    for l in &m.subtype_links {
        let span = m.source.subtypes.get(&(l.sub.clone(), l.sup.clone())).copied().unwrap_or_default();
        let ks = m.type_kind(&l.sub);
        let kp = m.type_kind(&l.sup);
        for (n, k) in [(&l.sub, ks), (&l.sup, kp)] {
            if k.is_none() {
                c.error("unknown-type", format!("unknown type `{n}`"), span);
            }
        }
        if let (Some(a), Some(b)) = (ks, kp) {
            if a != b {
                c.error("mixed-subtype", format!("`{}` and `{}` mix object and value types", l.sub, l.sup), span);
            }
        }
        if l.sub == l.sup || m.supertypes(&l.sup).iter().any(|s| m.ancestors(s).contains(&l.sub)) {
            c.error("subtype-cycle", format!("subtyping `{}` of `{}` closes a cycle", l.sub, l.sup), span);
        }
    }
}

fn check_facts(c: &mut Checker) {
    let m = c.m;
    for f in m.fact_types.values() {
        let fspan = m.source.facts.get(&f.name).copied().unwrap_or_default();
        if f.roles.is_empty() {
            c.error("arity-mismatch", format!("fact type `{}` has no roles", f.name), fspan);
        }
        let mut names = BTreeSet::new();
        for (i, r) in f.roles.iter().enumerate() {
            let span = m.source.roles.get(&(f.name.clone(), i + 1)).copied().unwrap_or(fspan);
            if !m.is_type(&r.player) {
                c.error("unknown-type", format!("unknown type `{}`", r.player), span);
            }
            if let Some(n) = &r.name {
                if !names.insert(n) {
                    c.error("duplicate-name", format!("role `{n}` appears twice in `{}`", f.name), span);
                }
            }
        }
        if let Derivation::DerivedAndStored(k) = f.derivation {
            if f.arity() < 3 || k < 2 || k > f.arity() {
                c.error(
                    "bad-derivation",
                    format!("derived-stored `{}` needs arity >= 3 and a result role in 2..={}", f.name, f.arity()),
                    fspan,
                );
            }
        }
    }
}

fn check_constraint(c: &mut Checker, con: &OrmConstraint) {
    let m = c.m;
    let span = m.constraint_span(c.k);
    match con {
        OrmConstraint::Mandatory { player, role } | OrmConstraint::Participation { player, role } => {
            c.ty(player);
            if c.role(role).is_some() {
                c.plays(player, role);
            }
        }
        OrmConstraint::DisjunctiveMandatory { player, roles } => {
            c.ty(player);
            for r in roles {
                if c.role(r).is_some() {
                    c.plays(player, r);
                }
            }
            if roles.len() < 2 {
                c.error("arity-mismatch", "disjunctive mandatory needs at least two roles".into(), span);
            }
        }
        OrmConstraint::Uniqueness { fact, roles } => {
            let Some(n) = c.fact(fact) else { return };
            let mut seen = BTreeSet::new();
            for r in roles {
                if let Some(i) = c.role_in(fact, r, r) {
                    if !seen.insert(i) {
                        let s = c.span_of(r);
                        c.error("duplicate-role", format!("role `{r}` listed twice"), s);
                    }
                }
            }
            if roles.is_empty() {
                c.error("arity-mismatch", "uniqueness over no roles".into(), span);
            } else if n >= 3 && seen.len() + 1 < n {
                c.out.push(Diagnostic::warning(
                    "non-elementary-uniqueness",
                    format!(
                        "uniqueness on `{fact}` spans {} of {n} roles; an elementary fact type needs at least {}",
                        seen.len(),
                        n - 1
                    ),
                    span,
                ));
            }
        }
        OrmConstraint::ExternalUniqueness { target, roles } => {
            let mut facts = BTreeSet::new();
            for r in roles {
                let Some(i) = c.role(r) else { continue };
                let f = m.fact(&r.fact).expect("resolved");
                if f.arity() != 2 {
                    let s = c.span_of(&r.to_string());
                    c.error("arity-mismatch", format!("external uniqueness needs binary fact types; `{}` is not", f.name), s);
                    continue;
                }
                if !facts.insert(&r.fact) {
                    c.error("duplicate-role", format!("fact type `{}` used twice", r.fact), span);
                }
                if let Some(t) = target {
                    let other = f.player(3 - i);
                    if m.is_type(t) && !m.ancestors(other).contains(t) {
                        let s = c.span_of(t);
                        c.error("player-mismatch", format!("`{other}` is not a subtype of `{t}`"), s);
                    }
                }
            }
            if let Some(t) = target {
                c.ty(t);
            }
            if roles.len() < 2 {
                c.error("arity-mismatch", "external uniqueness needs at least two roles".into(), span);
            }
        }
        OrmConstraint::Frequency { player, role, min, max } => {
            c.ty(player);
            if c.role(role).is_some() {
                c.plays(player, role);
            }
            c.bounds(*min, *max);
        }
        OrmConstraint::MultiRoleFrequency { fact, roles, min, max } => {
            if c.fact(fact).is_some() {
                for r in roles {
                    c.role_in(fact, r, r);
                }
            }
            if roles.len() < 2 {
                c.error("arity-mismatch", "multi-role frequency needs at least two roles".into(), span);
            }
            c.bounds(*min, *max);
        }
        OrmConstraint::Cover { sup, subs } | OrmConstraint::Disjoint { sup, subs } => {
            c.ty(sup);
            for s in subs {
                if c.ty(s).is_some() && m.is_type(sup) && (s == sup || !m.ancestors(s).contains(sup)) {
                    let sp = c.span_of(s);
                    c.error("not-subtype", format!("`{s}` is not a proper subtype of `{sup}`"), sp);
                }
            }
            let need = if matches!(con, OrmConstraint::Disjoint { .. }) { 2 } else { 1 };
            if subs.len() < need {
                c.error("arity-mismatch", format!("`{}` needs at least {need} subtypes", con.keyword()), span);
            }
        }
        OrmConstraint::Subset { sub: a, sup: b } | OrmConstraint::Equal { left: a, right: b } => c.operands(&[a, b]),
        OrmConstraint::Exclude { items } => {
            c.operands(&items.iter().collect::<Vec<_>>());
            if items.len() < 2 {
                c.error("arity-mismatch", "exclusion needs at least two operands".into(), span);
            }
        }
        OrmConstraint::JoinSubset { sub: a, sup: b }
        | OrmConstraint::JoinEqual { left: a, right: b }
        | OrmConstraint::JoinExclude { left: a, right: b } => {
            c.join(a);
            c.join(b);
        }
        OrmConstraint::Objectify { fact, .. } => {
            let Some(f) = m.fact(fact) else {
                c.fact(fact);
                return;
            };
            if f.arity() < 2 || f.derivation != Derivation::None {
                let s = c.span_of(fact);
                c.error("not-objectifiable", format!("`{fact}` must be a stored fact type of arity >= 2"), s);
            }
            let twice = m.constraints[..c.k]
                .iter()
                .any(|x| matches!(x, OrmConstraint::Objectify { fact: g, .. } if g == fact));
            if twice {
                c.error("duplicate-name", format!("`{fact}` is objectified twice"), span);
            }
        }
        OrmConstraint::RoleValue { role, values } => {
            if c.role(role).is_none() {
                return;
            }
            let player = m.player_of(role).expect("resolved");
            match m.value_types.get(player) {
                None => {
                    let s = c.span_of(&role.to_string());
                    c.error("bad-value", format!("role {role} is played by non-value type `{player}`"), s);
                }
                Some(d) => {
                    if let Err(e) = values.check(d.base) {
                        c.error("bad-value", format!("role {role}: {e}"), span);
                    }
                }
            }
        }
        OrmConstraint::Ring { fact, roles, .. } => {
            let (Some(i), Some(j)) = (c.role_in(fact, &roles.0, &roles.0), c.role_in(fact, &roles.1, &roles.1))
            else {
                return;
            };
            let f = m.fact(fact).expect("resolved");
            if i == j {
                c.error("duplicate-role", "a ring constraint needs two distinct roles".into(), span);
            } else if m.ancestors(f.player(i)).is_disjoint(&m.ancestors(f.player(j))) {
                c.error(
                    "player-mismatch",
                    format!("roles `{}` and `{}` have incompatible players", roles.0, roles.1),
                    span,
                );
            }
        }
        OrmConstraint::Reference { object, value } => {
            if c.ty(object).is_some_and(|k| k != TypeKind::Object) {
                let s = c.span_of(object);
                c.error("player-mismatch", format!("`{object}` must be an object type"), s);
            }
            if c.ty(value).is_some_and(|k| k != TypeKind::Value) {
                let s = c.span_of(value);
                c.error("player-mismatch", format!("`{value}` must be a value type"), s);
            }
            let twice = m.constraints[..c.k]
                .iter()
                .any(|x| matches!(x, OrmConstraint::Reference { object: o, .. } if o == object));
            if twice {
                c.error("duplicate-name", format!("`{object}` has two reference schemes"), span);
            }
        }
    }
}

fn check_unused(c: &mut Checker) {
    let m = c.m;
    let mut used: BTreeSet<&str> = BTreeSet::new();
    for f in m.fact_types.values() {
        used.extend(f.roles.iter().map(|r| r.player.as_str()));
    }
    for l in &m.subtype_links {
        used.insert(&l.sub);
        used.insert(&l.sup);
    }
    for con in &m.constraints {
        match con {
            OrmConstraint::Reference { object, value } => {
                used.insert(object);
                used.insert(value);
            }
            OrmConstraint::Objectify { as_type, .. } => {
                used.insert(as_type);
            }
            _ => {}
        }
    }
    for t in m.object_types.iter().chain(m.value_types.keys()) {
        if !used.contains(t.as_str()) {
            c.out.push(Diagnostic::warning("unused-type", format!("type `{t}` plays no role"), type_span(m, t)));
        }
    }
}
