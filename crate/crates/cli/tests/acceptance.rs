//! Acceptance criteria 1–7, one pass/fail line each.
//!
//! Run with `cargo test -p orm2dlr-cli --test acceptance -- --nocapture`
//! to see the lines; they are also written straight to stdout so a plain
//! `cargo test` run shows them.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use orm2dlr_core::dlr::ext::ExtComponent;
use orm2dlr_core::dlr::text::{parse_kb, serialize_kb};
use orm2dlr_core::dlr::{expand_concept, expand_relation, ExtConcept as X, ExtRelation as XR};
use orm2dlr_core::semantics::{eval_concept, eval_relation, satisfies_axiom, Extension, Interpretation};
use orm2dlr_core::{parse_orm, serialize_orm, Axiom, Component, ConceptExpr, RelationExpr, RelationSig, Signature};
use serde_json::Value;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn json(r: &Run) -> Result<Value, String> {
    serde_json::from_str(&r.stdout).map_err(|e| format!("not JSON ({e}): {}", r.stderr))
}

fn ok(args: &[&str]) -> Result<Run, String> {
    let r = run(args);
    ensure!(r.status == 0, "{args:?} exited {}: {}", r.status, r.stderr);
    Ok(r)
}

// 1 ---------------------------------------------------------------------

const ADMIT: &str = "PatientIsAdmittedToHospitalAtDateDate";

fn figure_one() -> Check {
    let start = Instant::now();
    let fig1 = model("fig1.orm");
    let v = json(&ok(&["translate", "--format", "json", p(&fig1)])?)?;
    let dl: Vec<&str> = v["axioms"].as_array().unwrap().iter().map(|a| a["dl"].as_str().unwrap()).collect();
    let want = [
        format!("{ADMIT} ⊑ (r1:Patient) ⊓ (haspatients:Hospital) ⊓ (r3:Date)"),
        format!("Hospital ⊑ ∃[haspatients]{ADMIT}"),
    ];
    ensure!(dl == want, "prefix axioms: {dl:?}");
    golden("fig1.kb", &ok(&["translate", p(&fig1)])?.stdout)?;

    let v = json(&ok(&["translate", "--format", "json", "--reify", p(&fig1)])?)?;
    let dl: Vec<&str> = v["axioms"].as_array().unwrap().iter().map(|a| a["dl"].as_str().unwrap()).collect();
    let block: Vec<String> = [("r1", "Patient"), ("haspatients", "Hospital"), ("r3", "Date")]
        .iter()
        .map(|(r, c)| format!("∃[1]{r} ⊓ (≤1[1]{r}) ⊓ ∀[1]({r} ⇒ (2:{c}))"))
        .collect();
    let want = [
        format!("{ADMIT} ⊑ {}", block.join(" ⊓ ")),
        format!("(id {ADMIT} [1]r1, [1]haspatients, [1]r3)"),
        format!("Hospital ⊑ ∃[2](haspatients ⊓ (1:{ADMIT}))"),
    ];
    ensure!(dl == want, "reified axioms: {dl:?}");
    golden("fig1.reify.kb", &ok(&["translate", "--reify", p(&fig1)])?.stdout)?;

    let took = start.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("prefix and reified forms match, {took:.0?}"))
}

// 2 ---------------------------------------------------------------------

fn every_rule() -> Check {
    let mut no_axioms = Vec::new();
    for n in 1..=33 {
        let name = format!("rule_{n:02}");
        let path = model(&format!("{name}.orm"));
        golden(&format!("{name}.kb"), &ok(&["translate", p(&path)])?.stdout)?;
        let v = json(&ok(&["explain", "--json", p(&path)])?)?;
        let rule = format!("nr.{n}");
        let entries: Vec<&Value> =
            v["report"]["entries"].as_array().unwrap().iter().filter(|e| e["rule"] == rule.as_str()).collect();
        ensure!(!entries.is_empty(), "{name}: explain attributes nothing to {rule}");
        if entries.iter().all(|e| e["axioms"].as_array().unwrap().is_empty()) {
            no_axioms.push(n);
        }
    }
    // derived fact types produce no axioms
    ensure!(no_axioms.contains(&31), "nr.31 emitted axioms");
    Ok(format!("33/33 rules translated and attributed; axiom-free: {no_axioms:?}"))
}

// 3 ---------------------------------------------------------------------

fn crosscheck_corpus() -> Check {
    let start = Instant::now();
    let (mut exact, mut approx, mut comparisons) = (0, Vec::new(), 0);
    for m in models() {
        let name = stem(&m);
        if rejected(&name) {
            continue;
        }
        let mut report = Value::Null;
        for top in ["enum", "full"] {
            let v = json(&ok(&["crosscheck", "--json", "--top", top, p(&m)])?)?;
            report = v["report"].clone();
            if report["exact"] == true {
                break;
            }
        }
        let rows = report["comparisons"].as_array().unwrap();
        if report["exact"] == true {
            exact += 1;
            comparisons += rows.len();
            for c in rows {
                ensure!(c["agree"] == true, "{name}: {} diverges: {c}", c["subject"]);
            }
        } else {
            approx.push(name);
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(300), "took {took:?}");
    ensure!(exact > 0, "no exact model in the corpus");
    Ok(format!("{exact} exact models, {comparisons} comparisons agree; approximate: {approx:?}; {took:.1?}"))
}

// 4 ---------------------------------------------------------------------

fn verdict<'a>(report: &'a Value, subject: &str) -> Result<(&'a Value, &'a Value), String> {
    let c = report["comparisons"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["subject"] == subject)
        .ok_or_else(|| format!("no comparison for {subject}"))?;
    Ok((&c["orm"], &c["kb"]))
}

fn no_model_up_to(v: &Value, d: u64) -> bool {
    v["verdict"] == "no-model-up-to" && v["max_domain"] == d
}

fn small_sat(v: &Value) -> bool {
    v["verdict"] == "sat" && v["domain_size"].as_u64().is_some_and(|d| d <= 2)
}

fn contradictions() -> Check {
    for (file, subject) in [("contradiction_disjoint.orm", "Hybrid"), ("contradiction_frequency.orm", "Parent")] {
        let v = json(&ok(&["crosscheck", "--json", "--max-domain", "3", p(&model(file))])?)?;
        let (orm, kb) = verdict(&v["report"], subject)?;
        ensure!(no_model_up_to(orm, 3) && no_model_up_to(kb, 3), "{file} {subject}: orm {orm}, kb {kb}");
    }
    let v = json(&ok(&["sat", "--json", "--concept", "C", p(&model("contradiction_frequency.kb"))])?)?;
    ensure!(no_model_up_to(&v["result"], 3), "contradiction_frequency.kb: {}", v["result"]);

    let v = json(&ok(&["sat", "--json", "--concept", "C", p(&model("control_frequency.kb"))])?)?;
    let r = &v["result"];
    ensure!(r["verdict"] == "sat" && r["interpretation"]["domain_size"].as_u64() <= Some(2), "control kb: {r}");
    let v = json(&ok(&["crosscheck", "--json", p(&model("control_disjoint.orm"))])?)?;
    for c in v["report"]["comparisons"].as_array().unwrap() {
        ensure!(small_sat(&c["orm"]) && small_sat(&c["kb"]), "control_disjoint: {c}");
    }
    Ok("contradictions have no model up to 3 on both sides; controls have witnesses at d ≤ 2".into())
}

// 5 ---------------------------------------------------------------------

type Tuple = Vec<usize>;

/// Direct set-theoretic reading of the abbreviated syntax, without going
/// through expansion.
struct Oracle<'a> {
    i: &'a Interpretation,
}

impl Oracle<'_> {
    fn domain(&self) -> BTreeSet<usize> {
        (0..self.i.domain_size).collect()
    }

    fn top2(&self) -> BTreeSet<Tuple> {
        match self.i.tops.get(&2) {
            Some(t) => t.clone(),
            None => {
                let d = self.i.domain_size;
                (0..d).flat_map(|x| (0..d).map(move |y| vec![x, y])).collect()
            }
        }
    }

    fn at(c: &ExtComponent) -> usize {
        c.index.unwrap() - 1
    }

    fn concept(&self, e: &X) -> BTreeSet<usize> {
        let dom = self.domain();
        match e {
            X::Top => dom,
            X::Bottom => BTreeSet::new(),
            X::Atomic(a) => self.i.concepts[a].clone(),
            X::Not(c) => dom.difference(&self.concept(c)).copied().collect(),
            X::And(a, b) => self.concept(a).intersection(&self.concept(b)).copied().collect(),
            X::Or(a, b) => self.concept(a).union(&self.concept(b)).copied().collect(),
            X::Implies(a, b) => {
                let (a, b) = (self.concept(a), self.concept(b));
                dom.into_iter().filter(|x| !a.contains(x) || b.contains(x)).collect()
            }
            X::Exists(c, r) => self.relation(r).iter().map(|t| t[Self::at(c)]).collect(),
            X::Forall(c, r) => {
                let (k, r, top) = (Self::at(c), self.relation(r), self.top2());
                dom.into_iter().filter(|&x| top.iter().all(|t| t[k] != x || r.contains(t))).collect()
            }
            X::AtMost(n, c, r) => self.count(c, r, |m| m <= *n as usize),
            X::AtLeast(n, c, r) => self.count(c, r, |m| m >= *n as usize),
        }
    }

    fn count(&self, c: &ExtComponent, r: &XR, keep: impl Fn(usize) -> bool) -> BTreeSet<usize> {
        let (k, r) = (Self::at(c), self.relation(r));
        self.domain().into_iter().filter(|&x| keep(r.iter().filter(|t| t[k] == x).count())).collect()
    }

    fn relation(&self, e: &XR) -> BTreeSet<Tuple> {
        let top = self.top2();
        match e {
            XR::Top(_) => top,
            XR::Atomic(p) => self.i.relations[p].tuples.clone(),
            XR::Select { component, concept, .. } => {
                let (k, c) = (Self::at(component), self.concept(concept));
                top.into_iter().filter(|t| c.contains(&t[k])).collect()
            }
            XR::Not(r) => top.difference(&self.relation(r)).cloned().collect(),
            XR::And(a, b) => self.relation(a).intersection(&self.relation(b)).cloned().collect(),
            XR::Or(a, b) => self.relation(a).union(&self.relation(b)).cloned().collect(),
            XR::Implies(a, b) => {
                let (a, b) = (self.relation(a), self.relation(b));
                top.into_iter().filter(|t| !a.contains(t) || b.contains(t)).collect()
            }
        }
    }
}

fn i1() -> ExtComponent {
    ExtComponent::idx(1)
}

fn i2() -> ExtComponent {
    ExtComponent::idx(2)
}

fn ext_relations() -> Vec<XR> {
    let p = || XR::atomic("P");
    let sel = |k: usize, c: &str| XR::sel(ExtComponent::idx(k), Some(2), X::atomic(c));
    // short selections take their arity from P
    let short = |k: usize, c: &str| XR::sel(ExtComponent::idx(k), None, X::atomic(c));
    vec![
        p(),
        XR::Top(2),
        XR::not(p()),
        XR::not(XR::not(p())),
        sel(1, "A"),
        sel(2, "B"),
        XR::sel(i2(), Some(2), X::not(X::atomic("A"))),
        XR::and(p(), short(2, "A")),
        XR::or(p(), short(1, "B")),
        XR::implies(p(), sel(2, "A")),
        XR::not(XR::and(p(), sel(1, "B"))),
        XR::or(XR::not(p()), XR::not(sel(2, "B"))),
    ]
}

fn ext_concepts() -> Vec<X> {
    let (a, b) = (|| X::atomic("A"), || X::atomic("B"));
    let mut out = vec![
        X::Top,
        X::Bottom,
        a(),
        X::not(a()),
        X::not(X::not(b())),
        X::and(a(), b()),
        X::or(a(), b()),
        X::implies(a(), b()),
        X::implies(X::or(a(), b()), X::not(a())),
        X::not(X::or(X::not(a()), b())),
    ];
    for r in ext_relations() {
        for c in [i1(), i2()] {
            out.push(X::exists(c.clone(), r.clone()));
            out.push(X::forall(c.clone(), r.clone()));
            out.push(X::not(X::forall(c.clone(), r.clone())));
            for k in 1..=2 {
                out.push(X::at_least(k, c.clone(), r.clone()));
            }
            for k in 0..=1 {
                out.push(X::at_most(k, c.clone(), r.clone()));
            }
        }
        out.push(X::or(X::exists(i1(), r.clone()), a()));
        out.push(X::implies(X::forall(i2(), r.clone()), b()));
    }
    out
}

fn subsets<T: Clone + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0..1u32 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, x)| x.clone()).collect())
        .collect()
}

fn pairs(d: usize) -> Vec<Tuple> {
    (0..d).flat_map(|x| (0..d).map(move |y| vec![x, y])).collect()
}

fn ab_signature() -> Signature {
    let mut sig = Signature::new();
    sig.add_concept("A").unwrap();
    sig.add_concept("B").unwrap();
    sig.add_relation("P", RelationSig::unnamed(2)).unwrap();
    sig
}

/// Every interpretation of A, B and P over d elements, under ⊤₂ = Δ² and
/// under every ⊤₂ with P ⊆ ⊤₂ ⊆ Δ².
fn ab_interpretations(sig: &Signature, d: usize) -> Vec<Interpretation> {
    let dom: Vec<usize> = (0..d).collect();
    let all = pairs(d);
    let mut out = Vec::new();
    for a in subsets(&dom) {
        for b in subsets(&dom) {
            for p in subsets(&all) {
                let mut i = Interpretation::empty(sig, d);
                i.concepts.insert("A".into(), a.clone());
                i.concepts.insert("B".into(), b.clone());
                i.relations.insert("P".into(), Extension { arity: 2, tuples: p.clone() });
                out.push(i.clone());
                let rest: Vec<Tuple> = all.iter().filter(|t| !p.contains(*t)).cloned().collect();
                for extra in subsets(&rest) {
                    let mut j = i.clone();
                    j.tops.insert(2, p.union(&extra).cloned().collect());
                    out.push(j);
                }
            }
        }
    }
    out
}

fn abbreviations_and_negation() -> Result<String, String> {
    let sig = ab_signature();
    let concepts: Vec<(X, ConceptExpr)> = ext_concepts()
        .into_iter()
        .map(|e| expand_concept(&e, &sig).map(|c| (e.clone(), c)).map_err(|x| format!("{e:?}: {x}")))
        .collect::<Result<_, _>>()?;
    let relations: Vec<(XR, RelationExpr)> = ext_relations()
        .into_iter()
        .map(|e| expand_relation(&e, &sig, Some(2)).map(|c| (e.clone(), c)).map_err(|x| format!("{e:?}: {x}")))
        .collect::<Result<_, _>>()?;
    let (mut checked, mut restricted) = (0usize, 0usize);
    for d in 1..=2 {
        for i in ab_interpretations(&sig, d) {
            let o = Oracle { i: &i };
            for (e, c) in &concepts {
                ensure!(eval_concept(&i, c) == o.concept(e), "{e:?} at d={d}: {}", i.to_text());
                checked += 1;
            }
            for (e, r) in &relations {
                ensure!(eval_relation(&i, r) == o.relation(e), "{e:?} at d={d}: {}", i.to_text());
                checked += 1;
            }
            // negation is difference from ⊤₂, which is not always Δ²
            let p = &i.relations["P"].tuples;
            let neg = eval_relation(&i, &RelationExpr::not(RelationExpr::atomic("P")));
            let diff: BTreeSet<Tuple> = o.top2().difference(p).cloned().collect();
            ensure!(neg == diff, "¬P at d={d}: {}", i.to_text());
            let full: BTreeSet<Tuple> = pairs(d).into_iter().filter(|t| !p.contains(t)).collect();
            if neg != full {
                restricted += 1;
            }
        }
    }
    ensure!(restricted > 0, "no interpretation separates ⊤₂ from Δ²");
    Ok(format!("{checked} evaluations"))
}

fn qualified_roles() -> Result<String, String> {
    let sig = ab_signature();
    let sel = |k, c: ConceptExpr| RelationExpr::select(Component::idx(k), 2, c);
    let p = || RelationExpr::atomic("P");
    let a = || ConceptExpr::atomic("A");
    let some = |k, other, c| ConceptExpr::exists(Component::idx(k), RelationExpr::and(p(), sel(other, c)));
    let all = |k, other| ConceptExpr::not(some(k, other, ConceptExpr::not(a())));
    let encodings = [some(1, 2, a()), some(2, 1, a()), all(1, 2), all(2, 1)];
    let mut checked = 0;
    for d in 1..=2 {
        for i in ab_interpretations(&sig, d) {
            let pr = &i.relations["P"].tuples;
            let ca = &i.concepts["A"];
            let dom = i.domain();
            let has = |x, y| pr.contains(&vec![x, y]);
            let want = [
                dom.iter().copied().filter(|&x| dom.iter().any(|&y| has(x, y) && ca.contains(&y))).collect::<BTreeSet<_>>(),
                dom.iter().copied().filter(|&y| dom.iter().any(|&x| has(x, y) && ca.contains(&x))).collect(),
                dom.iter().copied().filter(|&x| dom.iter().all(|&y| !has(x, y) || ca.contains(&y))).collect(),
                dom.iter().copied().filter(|&y| dom.iter().all(|&x| !has(x, y) || ca.contains(&x))).collect(),
            ];
            for (c, w) in encodings.iter().zip(&want) {
                ensure!(&eval_concept(&i, c) == w, "{c:?} at d={d}: {}", i.to_text());
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} evaluations"))
}

/// Two distinct members of the concept agree on every part.
fn id_violated(i: &Interpretation, concept: &str, parts: &[(usize, &str)]) -> bool {
    let members = &i.concepts[concept];
    let ts = |r: &str| i.relations[r].tuples.clone();
    members.iter().any(|&a| {
        members.iter().any(|&b| {
            a != b
                && parts.iter().all(|&(k, r)| {
                    let rel = ts(r);
                    rel.iter().any(|t| {
                        t[k] == a
                            && rel.iter().any(|s| {
                                s[k] == b && (0..t.len()).all(|m| m == k || t[m] == s[m])
                            })
                    })
                })
        })
    })
}

fn id_exhaustive() -> Result<String, String> {
    let mut sig = Signature::new();
    sig.add_concept("A").unwrap();
    sig.add_relation("P", RelationSig::unnamed(2)).unwrap();
    let cases: [&[(usize, &str)]; 3] = [&[(0, "P")], &[(1, "P")], &[(0, "P"), (1, "P")]];
    let axioms: Vec<Axiom> = cases
        .iter()
        .map(|parts| Axiom::Id {
            concept: "A".into(),
            parts: parts.iter().map(|&(k, r)| (Component::idx(k + 1), r.to_string())).collect(),
        })
        .collect();
    let mut checked = 0;
    for d in 1..=3 {
        let dom: Vec<usize> = (0..d).collect();
        for a in subsets(&dom) {
            for p in subsets(&pairs(d)) {
                let mut i = Interpretation::empty(&sig, d);
                i.concepts.insert("A".into(), a.clone());
                i.relations.insert("P".into(), Extension { arity: 2, tuples: p });
                for (ax, parts) in axioms.iter().zip(cases) {
                    ensure!(satisfies_axiom(&i, ax) == !id_violated(&i, "A", parts), "{ax:?}: {}", i.to_text());
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} id checks"))
}

fn fd_violated(rel: &BTreeSet<Tuple>, sources: &[usize], target: usize) -> bool {
    rel.iter().any(|t| rel.iter().any(|s| sources.iter().all(|&k| t[k] == s[k]) && t[target] != s[target]))
}

fn fd_exhaustive() -> Result<String, String> {
    let mut sig = Signature::new();
    sig.add_relation("T", RelationSig::unnamed(3)).unwrap();
    let cases: [(&[usize], usize); 4] = [(&[0, 1], 2), (&[0, 2], 1), (&[1, 2], 0), (&[2, 0], 1)];
    let axioms: Vec<Axiom> = cases
        .iter()
        .map(|(src, tgt)| Axiom::Fd {
            relation: "T".into(),
            sources: src.iter().map(|&k| Component::idx(k + 1)).collect(),
            target: Component::idx(tgt + 1),
        })
        .collect();
    let mut checked = 0;
    let mut check = |d: usize, rel: BTreeSet<Tuple>| -> Result<(), String> {
        let mut i = Interpretation::empty(&sig, d);
        i.relations.insert("T".into(), Extension { arity: 3, tuples: rel });
        for (ax, (src, tgt)) in axioms.iter().zip(cases) {
            let want = !fd_violated(&i.relations["T"].tuples, src, tgt);
            ensure!(satisfies_axiom(&i, ax) == want, "{ax:?}: {}", i.to_text());
            checked += 1;
        }
        Ok(())
    };
    let triples = |d: usize| -> Vec<Tuple> {
        (0..d).flat_map(|x| (0..d).flat_map(move |y| (0..d).map(move |z| vec![x, y, z]))).collect()
    };
    for d in 1..=2 {
        for rel in subsets(&triples(d)) {
            check(d, rel)?;
        }
    }
    // at d = 3 every relation of at most three triples: any violation is
    // witnessed by two of them
    let all = triples(3);
    let n = all.len();
    check(3, BTreeSet::new())?;
    for x in 0..n {
        check(3, [all[x].clone()].into())?;
        for y in x + 1..n {
            check(3, [all[x].clone(), all[y].clone()].into())?;
            for z in y + 1..n {
                check(3, [all[x].clone(), all[y].clone(), all[z].clone()].into())?;
            }
        }
    }
    Ok(format!("{checked} fd checks"))
}

fn semantics() -> Check {
    let parts = [
        ("abbreviations", abbreviations_and_negation()?),
        ("qualified roles", qualified_roles()?),
        ("id", id_exhaustive()?),
        ("fd", fd_exhaustive()?),
    ];
    Ok(parts.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join("; "))
}

// 6 ---------------------------------------------------------------------

fn rejections() -> Check {
    let mut seen = 0;
    for m in models() {
        let name = stem(&m);
        if !rejected(&name) {
            continue;
        }
        for cmd in ["translate", "classify", "crosscheck"] {
            let r = run(&[cmd, p(&m)]);
            ensure!(r.status == 2, "{cmd} {name}: exit {}", r.status);
            ensure!(r.stderr.contains("error[rejected]") && r.stderr.contains("§4"), "{cmd} {name}: {}", r.stderr);
        }
        let dir = tempfile::tempdir().unwrap();
        let rep = dir.path().join("report.json");
        let r = run(&["translate", "--partial", "--report", p(&rep), "--format", "json", p(&m)]);
        ensure!(r.status == 0, "translate --partial {name}: exit {}: {}", r.status, r.stderr);
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
        let rej = v["rejections"].as_array().unwrap();
        ensure!(!rej.is_empty(), "{name}: partial report lists no rejection");
        seen += 1;
    }
    ensure!(seen == 2, "expected 2 rejected models, saw {seen}");
    Ok("ring and multirole refused with status 2; --partial reports them".into())
}

// 7 ---------------------------------------------------------------------

fn round_trips_and_determinism() -> Check {
    let mut models_seen = 0;
    for m in models() {
        let src = std::fs::read_to_string(&m).unwrap();
        let a = parse_orm(&src).map_err(|e| format!("{}: {e:?}", m.display()))?;
        let text = serialize_orm(&a);
        let b = parse_orm(&text).map_err(|e| format!("{}: reparse: {e:?}\n{text}", m.display()))?;
        ensure!(a == b, "{}: parse∘serialize is not the identity", m.display());
        ensure!(serialize_orm(&b) == text, "{}: serialization not idempotent", m.display());
        models_seen += 1;
    }
    let mut kbs = 0;
    for e in std::fs::read_dir(corpus().join("golden")).unwrap() {
        let path = e.unwrap().path();
        if path.extension().is_some_and(|x| x == "kb") {
            let src = std::fs::read_to_string(&path).unwrap();
            let kb = parse_kb(&src).map_err(|e| format!("{}: {e:?}", path.display()))?;
            ensure!(serialize_kb(&kb) == src, "{}: serialize∘parse differs", path.display());
            ensure!(parse_kb(&serialize_kb(&kb)).ok().as_ref() == Some(&kb), "{}: parse∘serialize differs", path.display());
            kbs += 1;
        }
    }

    let mut runs = 0;
    let mut same = |args: &[&str]| -> Result<(), String> {
        let (x, y) = (run(args), run(args));
        ensure!((x.status, &x.stdout, &x.stderr) == (y.status, &y.stdout, &y.stderr), "{args:?} is not deterministic");
        runs += 1;
        Ok(())
    };
    for m in models() {
        let m = p(&m).to_string();
        same(&["check", "--json", &m])?;
        same(&["translate", &m])?;
        same(&["translate", "--reify", "--partial", "--format", "json", &m])?;
        same(&["explain", "--json", "--partial", &m])?;
        same(&["classify", "--max-domain", "2", &m])?;
        same(&["crosscheck", "--json", "--max-domain", "2", &m])?;
    }
    for kb in ["contradiction_frequency.kb", "control_frequency.kb"] {
        same(&["sat", "--json", "--concept", "C", p(&model(kb))])?;
    }
    Ok(format!("{models_seen} models and {kbs} knowledge bases round-trip; {runs} commands repeat byte for byte"))
}

// -----------------------------------------------------------------------

#[test]
fn acceptance() {
    let criteria: [(u8, &str, fn() -> Check); 7] = [
        (1, "figure one", figure_one),
        (2, "every mapping rule", every_rule),
        (3, "cross-check agreement", crosscheck_corpus),
        (4, "contradictions", contradictions),
        (5, "semantics against brute force", semantics),
        (6, "rejections", rejections),
        (7, "round trips and determinism", round_trips_and_determinism),
    ];
    let mut results = BTreeMap::new();
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (n, title, f) in criteria {
        let r = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(e) => Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let line = match &r {
            Ok(detail) => format!("criterion {n} PASS {title}: {detail}"),
            Err(why) => format!("criterion {n} FAIL {title}: {why}"),
        };
        writeln!(out, "{line}").unwrap();
        results.insert(n, r.is_ok());
    }
    let failed: Vec<u8> = results.iter().filter(|(_, ok)| !**ok).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
