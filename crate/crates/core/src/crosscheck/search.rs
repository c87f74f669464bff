//! Bounded satisfiability of ORM models, grounded to CNF the same way as
//! knowledge bases. Witnesses are lexicographically least over types by
//! name then element, fact types by name then tuple, objectification links,
//! then literal assignments.

use std::collections::{BTreeMap, BTreeSet};

use super::{all_facts, all_types, check_orm_model, OrmInterpretation};
use crate::orm::{join_columns, Derivation, FactType, JoinPair, OrmConstraint, OrmModel, RingKind, RoleOrFact, RoleRef};
use crate::sat::{Bit, Encoder, Model};
use crate::semantics::search::tuple_index;
use crate::semantics::{all_tuples, InvariantViolation, SatResult, SearchConfig, Tuple, Witness};
use crate::semantics::search::ModelCount;
use crate::value::{literal_pool, Literal};

pub fn orm_satisfiable_bounded(m: &OrmModel, cfg: &SearchConfig) -> Result<SatResult<OrmInterpretation>, InvariantViolation> {
    search(m, None, cfg)
}

/// As [`orm_satisfiable_bounded`] with the population of `ty` nonempty.
pub fn orm_type_satisfiable_bounded(
    m: &OrmModel,
    ty: &str,
    cfg: &SearchConfig,
) -> Result<SatResult<OrmInterpretation>, InvariantViolation> {
    search(m, Some(ty), cfg)
}

fn search(m: &OrmModel, query: Option<&str>, cfg: &SearchConfig) -> Result<SatResult<OrmInterpretation>, InvariantViolation> {
    for d in 1..=cfg.max_domain.max(1) {
        let mut enc = Encoder::new(cfg.ceiling);
        let g = match Grounding::build(&mut enc, m, query, d) {
            Ok(g) => g,
            Err(size) => return Ok(SatResult::TooLarge { domain_size: d, size, ceiling: cfg.ceiling }),
        };
        let Some(model) = enc.solve_lexmin(&g.primaries) else { continue };
        let interp = g.decode(&model);
        check_orm_model(&interp, m).map_err(InvariantViolation::WitnessRejected)?;
        if let Some(t) = query {
            if interp.types[t].is_empty() {
                return Err(InvariantViolation::WitnessRejected(format!("{t} is empty in the witness")));
            }
        }
        let model_count = match cfg.report {
            crate::semantics::ReportMode::WitnessOnly => None,
            crate::semantics::ReportMode::CountModels => {
                let (count, capped) = enc.count_models(&g.primaries, cfg.count_limit);
                Some(ModelCount { count, capped })
            }
        };
        return Ok(SatResult::Sat(Witness { interpretation: interp, model_count }));
    }
    Ok(SatResult::NoModelUpTo { max_domain: cfg.max_domain.max(1) })
}

struct Grounding<'a> {
    m: &'a OrmModel,
    d: usize,
    facts: BTreeMap<String, FactType>,
    hidden: BTreeMap<usize, String>,
    types: BTreeMap<String, Vec<Bit>>,
    rels: BTreeMap<String, Vec<Bit>>,
    /// Objectified fact → element → tuple index.
    links: BTreeMap<String, Vec<Vec<Bit>>>,
    pool: Vec<Literal>,
    vals: Vec<Vec<Bit>>,
    primaries: Vec<Bit>,
}

impl<'a> Grounding<'a> {
    fn build(enc: &mut Encoder, m: &'a OrmModel, query: Option<&str>, d: usize) -> Result<Self, u64> {
        let mut g = Grounding {
            m,
            d,
            facts: all_facts(m),
            hidden: m.reference_facts().into_iter().map(|(k, f)| (k, f.name)).collect(),
            types: BTreeMap::new(),
            rels: BTreeMap::new(),
            links: BTreeMap::new(),
            pool: Vec::new(),
            vals: Vec::new(),
            primaries: Vec::new(),
        };
        if !m.value_types.is_empty() {
            g.pool = literal_pool(m.value_types.values(), d);
            g.vals = (0..d).map(|_| (0..g.pool.len()).map(|_| enc.fresh()).collect()).collect();
            for e in 0..d {
                enc.assert_at_most_one(&g.vals[e]);
            }
            for l in 0..g.pool.len() {
                let col: Vec<Bit> = (0..d).map(|e| g.vals[e][l]).collect();
                enc.assert_at_most_one(&col);
            }
        }
        for (f, ft) in &g.facts {
            let bits = (0..d.pow(ft.arity() as u32)).map(|_| enc.fresh()).collect();
            g.rels.insert(f.clone(), bits);
        }
        let objectified = m.objectified();
        for f in objectified.values() {
            let n = g.facts[*f].arity();
            let rows: Vec<Vec<Bit>> = (0..d).map(|_| (0..d.pow(n as u32)).map(|_| enc.fresh()).collect()).collect();
            g.links.insert(f.to_string(), rows);
        }
        for t in all_types(m) {
            let bits = if let Some(dom) = m.value_types.get(&t) {
                (0..d)
                    .map(|e| {
                        let conf: Vec<Bit> =
                            g.pool.iter().enumerate().filter(|(_, l)| dom.conforms(l)).map(|(k, _)| g.vals[e][k]).collect();
                        enc.or(conf)
                    })
                    .collect()
            } else if let Some(f) = objectified.get(t.as_str()) {
                let rows = g.links[*f].clone();
                rows.into_iter().map(|row| enc.or(row)).collect()
            } else {
                (0..d).map(|_| enc.fresh()).collect()
            };
            g.types.insert(t, bits);
        }

        for (t, bits) in &g.types {
            if !m.value_types.contains_key(t) && !objectified.contains_key(t.as_str()) {
                g.primaries.extend(bits);
            }
        }
        for bits in g.rels.values() {
            g.primaries.extend(bits);
        }
        for rows in g.links.values() {
            for row in rows {
                g.primaries.extend(row);
            }
        }
        for row in &g.vals {
            g.primaries.extend(row);
        }
        enc.check_ceiling().map_err(|o| o.size)?;

        for ft in g.facts.clone().values() {
            g.typing(enc, ft);
            if let Derivation::DerivedAndStored(k) = ft.derivation {
                let src: Vec<usize> = (1..=ft.arity()).filter(|&i| i != k).collect();
                g.functional(enc, &ft.name, &src, k);
            }
        }
        for l in m.subtype_links.iter() {
            for e in 0..d {
                let (a, b) = (g.types[&l.sub][e], g.types[&l.sup][e]);
                enc.add_clause(&[a.negate(), b]);
            }
        }
        enc.check_ceiling().map_err(|o| o.size)?;
        for k in 0..m.constraints.len() {
            g.constraint(enc, k);
            enc.check_ceiling().map_err(|o| o.size)?;
        }
        if let Some(t) = query {
            let b = enc.or(g.types[t].clone());
            enc.assert(b);
        }
        Ok(g)
    }

    fn arity(&self, f: &str) -> usize {
        self.facts[f].arity()
    }

    fn bit(&self, f: &str, t: &[usize]) -> Bit {
        self.rels[f][tuple_index(t, self.d)]
    }

    fn role(&self, r: &RoleRef) -> (String, usize) {
        let f = &self.facts[&r.fact];
        (f.name.clone(), f.role_index(&r.role).expect("validated role"))
    }

    /// Tuples of `f` with `x` at 1-based position `i`.
    fn tuples_at(&self, f: &str, i: usize, x: usize) -> Vec<Tuple> {
        all_tuples(self.d, self.arity(f) - 1)
            .map(|mut t| {
                t.insert(i - 1, x);
                t
            })
            .collect()
    }

    fn bits_at(&self, f: &str, i: usize, x: usize) -> Vec<Bit> {
        self.tuples_at(f, i, x).iter().map(|t| self.bit(f, t)).collect()
    }

    /// `x` plays role `i` of `f`.
    fn plays(&self, enc: &mut Encoder, f: &str, i: usize, x: usize) -> Bit {
        let bits = self.bits_at(f, i, x);
        enc.or(bits)
    }

    fn typing(&self, enc: &mut Encoder, ft: &FactType) {
        for t in all_tuples(self.d, ft.arity()) {
            let b = self.bit(&ft.name, &t);
            for (k, &x) in t.iter().enumerate() {
                enc.add_clause(&[b.negate(), self.types[ft.player(k + 1)][x]]);
            }
        }
    }

    fn functional(&self, enc: &mut Encoder, f: &str, src: &[usize], target: usize) {
        let ts: Vec<Tuple> = all_tuples(self.d, self.arity(f)).collect();
        for (a, t) in ts.iter().enumerate() {
            for s in &ts[a + 1..] {
                if t[target - 1] != s[target - 1] && src.iter().all(|&k| t[k - 1] == s[k - 1]) {
                    enc.add_clause(&[self.bit(f, t).negate(), self.bit(f, s).negate()]);
                }
            }
        }
    }

    /// Per element, whether it occurs in the projection of a role or, for
    /// fact types of equal arity above 2, the carried-over tuple variant.
    fn role_subset(&self, enc: &mut Encoder, a: &RoleRef, b: &RoleRef) {
        let (fa, ia) = self.role(a);
        let (fb, ib) = self.role(b);
        let (na, nb) = (self.arity(&fa), self.arity(&fb));
        if na > 2 && na == nb {
            let (wa, wb) = (super::rest_positions(na, ia), super::rest_positions(nb, ib));
            for t in all_tuples(self.d, na) {
                let cands: Vec<Bit> = all_tuples(self.d, nb)
                    .filter(|s| s[ib - 1] == t[ia - 1] && wa.iter().zip(&wb).all(|(&p, &q)| t[p - 1] == s[q - 1]))
                    .map(|s| self.bit(&fb, &s))
                    .collect();
                let some = enc.or(cands);
                enc.add_clause(&[self.bit(&fa, &t).negate(), some]);
            }
            return;
        }
        for x in 0..self.d {
            let p = self.plays(enc, &fa, ia, x);
            let q = self.plays(enc, &fb, ib, x);
            enc.add_clause(&[p.negate(), q]);
        }
    }

    fn subset(&self, enc: &mut Encoder, sub: &RoleOrFact, sup: &RoleOrFact) {
        match (sub, sup) {
            (RoleOrFact::Role(a), RoleOrFact::Role(b)) => self.role_subset(enc, a, b),
            (RoleOrFact::Fact(a), RoleOrFact::Fact(b)) => {
                for t in all_tuples(self.d, self.arity(a)) {
                    enc.add_clause(&[self.bit(a, &t).negate(), self.bit(b, &t)]);
                }
            }
            _ => unreachable!("validated operands"),
        }
    }

    fn exclude(&self, enc: &mut Encoder, a: &RoleOrFact, b: &RoleOrFact) {
        match (a, b) {
            (RoleOrFact::Role(x), RoleOrFact::Role(y)) => {
                let (fa, ia) = self.role(x);
                let (fb, ib) = self.role(y);
                for e in 0..self.d {
                    let p = self.plays(enc, &fa, ia, e);
                    let q = self.plays(enc, &fb, ib, e);
                    enc.add_clause(&[p.negate(), q.negate()]);
                }
            }
            (RoleOrFact::Fact(x), RoleOrFact::Fact(y)) => {
                for t in all_tuples(self.d, self.arity(x)) {
                    enc.add_clause(&[self.bit(x, &t).negate(), self.bit(y, &t).negate()]);
                }
            }
            _ => unreachable!("validated operands"),
        }
    }

    /// Bits for the pairs of a join projection, indexed by `x * d + y`.
    fn join(&self, enc: &mut Encoder, p: &JoinPair) -> Vec<Bit> {
        let d = self.d;
        let (fa, ia) = self.role(&p.0);
        let (_, ib) = self.role(&p.1);
        let mut witnesses: Vec<Vec<Bit>> = vec![Vec::new(); d * d];
        match join_columns(self.m, p).expect("validated join") {
            None => {
                for t in all_tuples(d, self.arity(&fa)) {
                    witnesses[t[ia - 1] * d + t[ib - 1]].push(self.bit(&fa, &t));
                }
            }
            Some((ja, ka, jb, kb)) => {
                for t in all_tuples(d, self.arity(&ja)) {
                    for s in all_tuples(d, self.arity(&jb)) {
                        if t[ka - 1] == s[kb - 1] {
                            let both = enc.and([self.bit(&ja, &t), self.bit(&jb, &s)]);
                            witnesses[t[ia - 1] * d + s[ib - 1]].push(both);
                        }
                    }
                }
            }
        }
        witnesses.into_iter().map(|w| enc.or(w)).collect()
    }

    fn ring(&self, enc: &mut Encoder, kind: RingKind, f: &str, a: usize, b: usize) {
        let d = self.d;
        let mut w: Vec<Vec<Bit>> = vec![Vec::new(); d * d];
        for t in all_tuples(d, self.arity(f)) {
            w[t[a - 1] * d + t[b - 1]].push(self.bit(f, &t));
        }
        let p: Vec<Bit> = w.into_iter().map(|x| enc.or(x)).collect();
        let at = |x: usize, y: usize| p[x * d + y];
        match kind {
            RingKind::Irreflexive => (0..d).for_each(|x| enc.add_clause(&[at(x, x).negate()])),
            RingKind::Asymmetric | RingKind::Antisymmetric => {
                for x in 0..d {
                    for y in 0..d {
                        if kind == RingKind::Asymmetric || x != y {
                            enc.add_clause(&[at(x, y).negate(), at(y, x).negate()]);
                        }
                    }
                }
            }
            RingKind::Symmetric => {
                for x in 0..d {
                    for y in 0..d {
                        enc.add_clause(&[at(x, y).negate(), at(y, x)]);
                    }
                }
            }
            RingKind::Intransitive => {
                for x in 0..d {
                    for y in 0..d {
                        for z in 0..d {
                            enc.add_clause(&[at(x, y).negate(), at(y, z).negate(), at(x, z).negate()]);
                        }
                    }
                }
            }
            RingKind::Acyclic => {
                // any transitive superset of the relation with an empty diagonal
                let reach: Vec<Bit> = (0..d * d).map(|_| enc.fresh()).collect();
                for x in 0..d {
                    for y in 0..d {
                        enc.add_clause(&[at(x, y).negate(), reach[x * d + y]]);
                        for z in 0..d {
                            enc.add_clause(&[reach[x * d + y].negate(), at(y, z).negate(), reach[x * d + z]]);
                        }
                    }
                    enc.add_clause(&[reach[x * d + x].negate()]);
                }
            }
        }
    }

    fn constraint(&self, enc: &mut Encoder, k: usize) {
        use OrmConstraint::*;
        let d = self.d;
        match &self.m.constraints[k] {
            Mandatory { player, role } => {
                let (f, i) = self.role(role);
                for x in 0..d {
                    let p = self.plays(enc, &f, i, x);
                    enc.add_clause(&[self.types[player][x].negate(), p]);
                }
            }
            Participation { player, role } => {
                let (f, i) = self.role(role);
                for x in 0..d {
                    for b in self.bits_at(&f, i, x) {
                        enc.add_clause(&[self.types[player][x].negate(), b]);
                    }
                }
            }
            DisjunctiveMandatory { player, roles } => {
                for x in 0..d {
                    let mut any: Vec<Bit> = Vec::new();
                    for r in roles {
                        let (f, i) = self.role(r);
                        any.extend(self.bits_at(&f, i, x));
                    }
                    let p = enc.or(any);
                    enc.add_clause(&[self.types[player][x].negate(), p]);
                }
            }
            Uniqueness { fact, roles } => {
                let f = &self.facts[fact];
                let s: Vec<usize> = roles.iter().map(|r| f.role_index(r).expect("validated")).collect();
                let ts: Vec<Tuple> = all_tuples(d, f.arity()).collect();
                for (a, t) in ts.iter().enumerate() {
                    for u in &ts[a + 1..] {
                        if s.iter().all(|&j| t[j - 1] == u[j - 1]) {
                            enc.add_clause(&[self.bit(fact, t).negate(), self.bit(fact, u).negate()]);
                        }
                    }
                }
            }
            ExternalUniqueness { roles, .. } => {
                let sides: Vec<(String, usize)> = roles.iter().map(|r| self.role(r)).collect();
                let pair = |x: usize, y: usize, i: usize| if i == 1 { vec![y, x] } else { vec![x, y] };
                for x1 in 0..d {
                    for x2 in x1 + 1..d {
                        let mut all = Vec::new();
                        for (f, i) in &sides {
                            let shared: Vec<Bit> = (0..d)
                                .map(|y| enc.and([self.bit(f, &pair(x1, y, *i)), self.bit(f, &pair(x2, y, *i))]))
                                .collect();
                            all.push(enc.or(shared));
                        }
                        let b = enc.and(all);
                        enc.assert(b.negate());
                    }
                }
            }
            Frequency { player, role, min, max } => {
                let (f, i) = self.role(role);
                for x in 0..d {
                    let bits = self.bits_at(&f, i, x);
                    let c = self.types[player][x];
                    if *min > 1 {
                        let part = enc.or(bits.clone());
                        let lo = enc.at_least(*min, &bits);
                        enc.add_clause(&[c.negate(), part.negate(), lo]);
                    }
                    if let Some(b) = max {
                        let hi = enc.at_most(*b, &bits);
                        enc.add_clause(&[c.negate(), hi]);
                    }
                }
            }
            MultiRoleFrequency { fact, roles, min, max } => {
                let f = &self.facts[fact];
                let s: Vec<usize> = roles.iter().map(|r| f.role_index(r).expect("validated")).collect();
                let mut groups: BTreeMap<Vec<usize>, Vec<Bit>> = BTreeMap::new();
                for t in all_tuples(d, f.arity()) {
                    groups.entry(s.iter().map(|&j| t[j - 1]).collect()).or_default().push(self.bit(fact, &t));
                }
                for bits in groups.into_values() {
                    let some = enc.or(bits.clone());
                    if *min > 1 {
                        let lo = enc.at_least(*min, &bits);
                        enc.add_clause(&[some.negate(), lo]);
                    }
                    if let Some(b) = max {
                        let hi = enc.at_most(*b, &bits);
                        enc.assert(hi);
                    }
                }
            }
            Cover { sup, subs } => {
                for x in 0..d {
                    let mut clause = vec![self.types[sup][x].negate()];
                    clause.extend(subs.iter().map(|s| self.types[s][x]));
                    enc.add_clause(&clause);
                }
            }
            Disjoint { sup, subs } => {
                for x in 0..d {
                    for (a, s) in subs.iter().enumerate() {
                        enc.add_clause(&[self.types[s][x].negate(), self.types[sup][x]]);
                        for t in &subs[a + 1..] {
                            enc.add_clause(&[self.types[s][x].negate(), self.types[t][x].negate()]);
                        }
                    }
                }
            }
            Subset { sub, sup } => self.subset(enc, sub, sup),
            Equal { left, right } => {
                self.subset(enc, left, right);
                self.subset(enc, right, left);
            }
            Exclude { items } => {
                for (a, x) in items.iter().enumerate() {
                    for y in &items[a + 1..] {
                        self.exclude(enc, x, y);
                    }
                }
            }
            JoinSubset { sub, sup } => {
                let (l, r) = (self.join(enc, sub), self.join(enc, sup));
                l.iter().zip(&r).for_each(|(a, b)| enc.add_clause(&[a.negate(), *b]));
            }
            JoinEqual { left, right } => {
                let (l, r) = (self.join(enc, left), self.join(enc, right));
                for (a, b) in l.iter().zip(&r) {
                    enc.add_clause(&[a.negate(), *b]);
                    enc.add_clause(&[b.negate(), *a]);
                }
            }
            JoinExclude { left, right } => {
                let (l, r) = (self.join(enc, left), self.join(enc, right));
                l.iter().zip(&r).for_each(|(a, b)| enc.add_clause(&[a.negate(), b.negate()]));
            }
            Objectify { fact, .. } => {
                let rows = &self.links[fact];
                let n = d.pow(self.arity(fact) as u32);
                for row in rows {
                    enc.assert_at_most_one(row);
                    for (ti, &l) in row.iter().enumerate() {
                        enc.add_clause(&[l.negate(), self.rels[fact][ti]]);
                    }
                }
                for ti in 0..n {
                    let col: Vec<Bit> = rows.iter().map(|r| r[ti]).collect();
                    enc.assert_at_most_one(&col);
                    let mut clause = vec![self.rels[fact][ti].negate()];
                    clause.extend(col);
                    enc.add_clause(&clause);
                }
            }
            RoleValue { role, values } => {
                let (f, i) = self.role(role);
                let ft = self.facts[&f].clone();
                let lits: Vec<usize> = self.pool.iter().enumerate().filter(|(_, l)| values.admits(l)).map(|(k, _)| k).collect();
                for t in all_tuples(d, ft.arity()) {
                    let x = t[i - 1];
                    let has = enc.or(lits.iter().map(|&k| self.vals[x][k]).collect::<Vec<_>>());
                    for (j, &y) in t.iter().enumerate() {
                        enc.add_clause(&[has.negate(), self.bit(&f, &t).negate(), self.types[ft.player(j + 1)][y]]);
                    }
                }
            }
            Ring { ring, fact, roles } => {
                let f = &self.facts[fact];
                let a = f.role_index(&roles.0).expect("validated");
                let b = f.role_index(&roles.1).expect("validated");
                self.ring(enc, *ring, fact, a, b);
            }
            Reference { object, .. } => {
                let h = &self.hidden[&k];
                for x in 0..d {
                    let own = self.bits_at(&h, 1, x);
                    let p = enc.or(own.clone());
                    enc.add_clause(&[self.types[object][x].negate(), p]);
                    let one = enc.at_most(1, &own);
                    enc.assert(one);
                    let by = self.bits_at(&h, 2, x);
                    let one = enc.at_most(1, &by);
                    enc.assert(one);
                }
            }
        }
    }

    fn decode(&self, model: &Model) -> OrmInterpretation {
        let d = self.d;
        let mut i = OrmInterpretation::empty(self.m, d);
        for (t, bits) in &self.types {
            i.types.insert(t.clone(), (0..d).filter(|&e| model.value(bits[e])).collect());
        }
        for (f, bits) in &self.rels {
            let n = self.arity(f);
            let ts: BTreeSet<Tuple> = all_tuples(d, n).zip(bits).filter(|(_, b)| model.value(**b)).map(|(t, _)| t).collect();
            i.facts.insert(f.clone(), ts);
        }
        for (f, rows) in &self.links {
            let n = self.arity(f);
            let mut link = BTreeMap::new();
            for (e, row) in rows.iter().enumerate() {
                if let Some((t, _)) = all_tuples(d, n).zip(row).find(|(_, b)| model.value(**b)) {
                    link.insert(e, t);
                }
            }
            i.objectified.insert(f.clone(), link);
        }
        for (e, row) in self.vals.iter().enumerate() {
            if let Some(k) = row.iter().position(|b| model.value(*b)) {
                i.values.insert(e, self.pool[k].clone());
            }
        }
        i
    }
}
