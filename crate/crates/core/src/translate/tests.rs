use super::*;
use crate::dlr::render::axiom_dl;
use crate::dlr::text::serialize_kb;
use crate::orm::{constraint_inventory, parse_orm};

const FIG1: &str = "object Patient; object Hospital; value Date: date;
fact PatientIsAdmittedToHospitalAtDateDate (r1: Patient, haspatients: Hospital, r3: Date);
mandatory Hospital in PatientIsAdmittedToHospitalAtDateDate.haspatients;
unique PatientIsAdmittedToHospitalAtDateDate(r1, haspatients, r3);";

fn run(src: &str, opts: TranslateOptions) -> (KnowledgeBase, TranslationReport) {
    translate(&parse_orm(src).unwrap(), opts).unwrap()
}

fn lines(kb: &KnowledgeBase) -> Vec<String> {
    kb.axioms.iter().map(axiom_dl).collect()
}

fn reify() -> TranslateOptions {
    TranslateOptions { reify: true, ..Default::default() }
}

#[test]
fn figure_one() {
    let (kb, rep) = run(FIG1, TranslateOptions::default());
    assert_eq!(
        lines(&kb),
        [
            "PatientIsAdmittedToHospitalAtDateDate ⊑ (r1:Patient) ⊓ (haspatients:Hospital) ⊓ (r3:Date)",
            "Hospital ⊑ ∃[haspatients]PatientIsAdmittedToHospitalAtDateDate",
        ]
    );
    assert!(rep.reified_facts.is_empty());
    assert!(rep.fresh_symbols().is_empty());
}

#[test]
fn figure_one_reified() {
    let (kb, rep) = run(FIG1, reify());
    let got = lines(&kb);
    assert_eq!(
        got[0],
        "PatientIsAdmittedToHospitalAtDateDate ⊑ ∃[1]r1 ⊓ (≤1[1]r1) ⊓ ∀[1](r1 ⇒ (2:Patient)) \
         ⊓ ∃[1]haspatients ⊓ (≤1[1]haspatients) ⊓ ∀[1](haspatients ⇒ (2:Hospital)) \
         ⊓ ∃[1]r3 ⊓ (≤1[1]r3) ⊓ ∀[1](r3 ⇒ (2:Date))"
    );
    assert_eq!(got[1], "(id PatientIsAdmittedToHospitalAtDateDate [1]r1, [1]haspatients, [1]r3)");
    assert_eq!(got[2], "Hospital ⊑ ∃[2](haspatients ⊓ (1:PatientIsAdmittedToHospitalAtDateDate))");
    assert_eq!(got.len(), 3);
    assert_eq!(rep.fresh_symbols(), ["r1", "haspatients", "r3"]);
    assert!(kb.signature.concepts.contains("PatientIsAdmittedToHospitalAtDateDate"));
}

#[test]
fn unary_gets_a_string_filler() {
    let (kb, rep) = run("object Person; fact Walks \"Walking\" (Person);", TranslateOptions::default());
    assert_eq!(lines(&kb), ["Walks ⊑ (r1:Person) ⊓ (r2:Walking′)"]);
    assert_eq!(kb.signature.value_domains["Walking′"], ValueDomain::new(BaseType::String));
    assert_eq!(rep.fresh_symbols(), ["Walking′"]);

    let (kb, _) = run("object Person; fact Walks (Person);", TranslateOptions::default());
    assert_eq!(lines(&kb), ["Walks ⊑ (r1:Person) ⊓ (r2:Walks′)"]);
}

#[test]
fn rings_are_rejected_with_citation() {
    let src = "object A; fact f (A, A); ring asymmetric on f(r1, r2); mandatory A in f.r1;";
    let m = parse_orm(src).unwrap();
    match translate(&m, TranslateOptions::default()) {
        Err(TranslateError::Rejected(e)) => {
            assert_eq!(e.rejections.len(), 1);
            assert_eq!(e.rejections[0].reason, RejectionReason::RingConstraint);
            assert!(e.to_string().contains("§4"), "{e}");
            assert!(e.to_string().starts_with("1:26: error[rejected]"), "{e}");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
    let (kb, rep) = translate(&m, TranslateOptions { partial: true, ..Default::default() }).unwrap();
    assert_eq!(rep.rejections.len(), 1);
    assert_eq!(kb.axioms.len(), 2);
}

#[test]
fn fresh_symbol_counts_up() {
    let mut sig = Signature::new();
    assert_eq!(fresh_symbol("C", &sig), "C′");
    sig.add_concept("C′").unwrap();
    assert_eq!(fresh_symbol("C", &sig), "C′2");
    sig.add_concept("C′2").unwrap();
    assert_eq!(fresh_symbol("C", &sig), "C′3");
}

#[test]
fn entries_partition_constructs_and_match_inventory() {
    let src = "object A; object B; object S; subtype S of A; value V: string; value W: integer 1..5;
        fact f (A, B); fact g (A, B); fact t (A, B, V); fact u (A); fact w (A, W);
        derived fact d (A, B); derived-stored (3) fact ds (A, B, V);
        mandatory A in f.r1 or g.r1; unique f(r1); unique f(r2); unique t(r1, r2);
        frequency A in g.r1 : 1..3; subset f of g; exclude f.r1, g.r1; objectify f as F;
        cover A by S; reference B by V; fact h (A, S); ring irreflexive on h(r1, r2);";
    let m = parse_orm(src).unwrap();
    let (kb, rep) = translate(&m, TranslateOptions { partial: true, ..Default::default() }).unwrap();
    let total = crate::orm::inventory::constructs(&m).len();
    assert_eq!(rep.entries.len() + rep.rejections.len(), total);
    let mut counted: std::collections::BTreeMap<RuleKey, usize> = Default::default();
    for e in &rep.entries {
        *counted.entry(e.rule).or_default() += 1;
    }
    *counted.entry(RuleKey::Rejected).or_default() += rep.rejections.len();
    let inv: std::collections::BTreeMap<_, _> = constraint_inventory(&m).into_iter().filter(|(_, n)| *n > 0).collect();
    assert_eq!(counted, inv);
    assert!(kb.check().is_empty());
    let user = m.names();
    for s in rep.fresh_symbols() {
        assert!(!user.contains(s), "{s} clashes with a user name");
    }
    assert_eq!(rep.reified_facts.iter().collect::<Vec<_>>(), ["f", "t"]);
}

#[test]
fn partial_uniqueness_reifies_and_identifies() {
    let (kb, rep) = run("object A; object B; fact t (A, B, A); unique t(r2, r1);", TranslateOptions::default());
    assert!(rep.reified_facts.contains("t"));
    let got = lines(&kb);
    assert_eq!(got.last().unwrap(), "(id t [1]r1, [1]r2)");
}

#[test]
fn derived_and_stored() {
    let (kb, _) = run("object A; object B; value V: string; derived-stored (2) fact ds (A, V, B);", TranslateOptions::default());
    assert_eq!(
        lines(&kb),
        [
            "ds ⊑ (r1:A) ⊓ (r2:V) ⊓ (r3:B)",
            "(fd ds r1, r3 → r2)",
            "A ⊑ ∀[r1](ds ⇒ (r2:V))",
        ]
    );
}

#[test]
fn derived_has_no_axioms() {
    let (kb, rep) = run("object A; object B; derived fact d (A, B);", TranslateOptions::default());
    assert!(kb.axioms.is_empty());
    assert!(kb.signature.relations.contains_key("d"));
    assert_eq!(rep.entries.last().unwrap().rule, RuleKey::Rule(31));
}

#[test]
fn frequency_shapes() {
    let base = "object A; object B; fact f (A, B);";
    let one = |c: &str, opts| lines(&run(&format!("{base} {c}"), opts).0).pop().unwrap();
    let d = TranslateOptions::default();
    assert_eq!(one("frequency A in f.r1 : exactly 2;", d), "A ⊑ (≥2[r1]f) ⊓ (≤2[r1]f)");
    assert_eq!(one("frequency A in f.r1 : 2..*;", d), "A ⊑ (≥2[r1]f)");
    assert_eq!(one("frequency A in f.r1 : 1..3;", d), "A ⊑ (≤3[r1]f)");
    let ff = TranslateOptions { fol_faithful: true, ..d };
    assert_eq!(one("frequency A in f.r1 : 2..*;", ff), "A ⊓ ∃[r1]f ⊑ (≥2[r1]f)");
}

#[test]
fn disjointness_is_triangular() {
    let (kb, rep) = run(
        "object C; object D1; object D2; object D3; subtype D1 of C; subtype D2 of C; subtype D3 of C;
         disjoint C by D1, D2, D3;",
        TranslateOptions::default(),
    );
    let entry = rep.entries.last().unwrap();
    let got: Vec<String> = entry.axioms.iter().map(|&i| axiom_dl(&kb.axioms[i])).collect();
    assert_eq!(got, ["D1 ⊑ ¬D2 ⊓ ¬D3", "D1 ⊑ C", "D2 ⊑ ¬D3", "D2 ⊑ C", "D3 ⊑ C"]);
    // the subtype links already emitted D_i ⊑ C
    assert_eq!(kb.axioms.len(), 5);
}

#[test]
fn external_uniqueness_placeholder() {
    let (kb, rep) = run(
        "object X; object Y; object N; fact a (X, N); fact b (Y, N); external-unique a.r2, b.r2;",
        TranslateOptions::default(),
    );
    let got = lines(&kb);
    assert_eq!(rep.fresh_symbols(), ["X′"]);
    assert_eq!(got[got.len() - 3..], ["∃[r1]a ⊑ X′", "∃[r1]b ⊑ X′", "(id X′ [r1]a, [r1]b)"].map(String::from));
}

#[test]
fn deterministic_output() {
    let a = serialize_kb(&run(FIG1, reify()).0);
    let b = serialize_kb(&run(FIG1, reify()).0);
    assert_eq!(a, b);
}
