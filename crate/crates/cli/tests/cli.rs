mod common;

use std::path::Path;

use common::*;
use jsonschema::{Draft, JSONSchema};
use serde_json::Value;

fn schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::options().with_draft(Draft::Draft7).compile(&v).expect("schema compiles")
}

fn assert_valid(name: &str, doc: &str) {
    let v: Value = serde_json::from_str(doc).unwrap_or_else(|e| panic!("{name}: not JSON: {e}\n{doc}"));
    let s = schema(name);
    let msgs: Vec<String> = match s.validate(&v) {
        Ok(()) => return,
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name} output violates its schema:\n{}\n{doc}", msgs.join("\n"));
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_statuses() {
    let r = run(&["check", p(&model("fig1.orm"))]);
    assert_eq!(r.status, 0, "{}", r.stderr);
    assert!(r.stdout.contains("ok, 6 constructs"), "{}", r.stdout);
    assert!(r.stdout.contains("  nr.8         1\n"), "{}", r.stdout);
    // rings pass the check; they are refused by translate
    assert_eq!(run(&["check", p(&model("ring.orm"))]).status, 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = write_tmp(&dir, "bad.orm", "object ;\n");
    let r = run(&["check", &bad]);
    assert_eq!(r.status, 1);
    assert!(r.stderr.contains("bad.orm:1:8: error[syntax]"), "{}", r.stderr);
    let r = run(&["check", "--json", &bad]);
    assert_eq!(r.status, 1);
    assert_valid("check", &r.stdout);
}

#[test]
fn missing_file_and_usage_errors() {
    assert_eq!(run(&["check", "/nonexistent/x.orm"]).status, 1);
    assert_eq!(run(&["translate"]).status, 1);
    assert_eq!(run(&["frobnicate"]).status, 1);
    assert_eq!(run(&["--help"]).status, 0);
    assert_eq!(run(&["sat", "--max-domain", "0", p(&model("control_frequency.kb"))]).status, 1);
}

#[test]
fn translate_figure_one() {
    let r = run(&["translate", p(&model("fig1.orm"))]);
    assert_eq!(r.status, 0);
    let axioms: Vec<&str> = r.stdout.lines().filter(|l| l.starts_with("(impl")).collect();
    assert_eq!(
        axioms,
        [
            "(impl-rel PatientIsAdmittedToHospitalAtDateDate (and (sel r1 3 Patient) (sel haspatients 3 Hospital) (sel r3 3 Date)))",
            "(impl Hospital (exists haspatients PatientIsAdmittedToHospitalAtDateDate))",
        ]
    );
}

#[test]
fn translate_empty_and_rejected() {
    let r = run(&["translate", p(&model("empty.orm"))]);
    assert_eq!((r.status, r.stdout.as_str()), (0, ""));

    let r = run(&["translate", p(&model("ring.orm"))]);
    assert_eq!(r.status, 2);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("error[rejected]") && r.stderr.contains("§4"), "{}", r.stderr);

    let r = run(&["translate", "--partial", p(&model("multirole.orm"))]);
    assert_eq!(r.status, 0, "{}", r.stderr);
}

#[test]
fn translate_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.kb");
    let rep = dir.path().join("fig1.report.json");
    let r = run(&["translate", p(&model("fig1.orm")), "--reify", "-o", p(&out), "--format", "json", "--report", p(&rep)]);
    assert_eq!(r.status, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let body = std::fs::read_to_string(&out).unwrap();
    assert_valid("translate", &body);
    assert_valid("report", &std::fs::read_to_string(&rep).unwrap());

    let text_rep = dir.path().join("fig1.report.txt");
    let r = run(&["translate", p(&model("fig1.orm")), "--report", p(&text_rep)]);
    assert_eq!(r.status, 0);
    assert!(std::fs::read_to_string(&text_rep).unwrap().starts_with("nr.1         object Hospital\n"));
}

#[test]
fn translate_then_sat_composes() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig1", "rule_13", "rule_30", "contradiction_disjoint"] {
        let kb = dir.path().join(format!("{name}.kb"));
        let r = run(&["translate", p(&model(&format!("{name}.orm"))), "-o", p(&kb)]);
        assert_eq!(r.status, 0);
        let r = run(&["sat", p(&kb), "--max-domain", "2"]);
        assert_eq!(r.status, 0, "{}", r.stderr);
        assert!(r.stdout.starts_with("sat: model of size 1"), "{}", r.stdout);
    }
    let kb = dir.path().join("c.kb");
    run(&["translate", p(&model("contradiction_disjoint.orm")), "-o", p(&kb)]);
    let r = run(&["sat", p(&kb), "--concept", "Hybrid", "--top", "enum"]);
    assert!(r.stdout.starts_with("no model with Hybrid nonempty up to 3"), "{}", r.stdout);
}

#[test]
fn sat_examples() {
    let r = run(&["sat", p(&model("contradiction_frequency.kb")), "--concept", "C"]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.starts_with("no model with C nonempty up to 3\n"), "{}", r.stdout);
    assert!(r.stdout.contains("does not prove unsatisfiability"));

    let r = run(&["sat", p(&model("control_frequency.kb")), "--concept", "C"]);
    assert!(r.stdout.starts_with("sat with C nonempty: model of size 1"), "{}", r.stdout);
    assert!(r.stdout.contains("C = {0}\n"));

    let r = run(&["sat", p(&model("control_frequency.kb")), "--concept", "D"]);
    assert_eq!(r.status, 1);
    assert!(r.stderr.contains("unknown-concept"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_tmp(&dir, "bad.kb", "(concept A)\n(impl A B)\n");
    let r = run(&["sat", &bad]);
    assert_eq!(r.status, 1);
    assert!(r.stderr.contains("bad.kb:2:"), "{}", r.stderr);

    for (kb, concept) in [("contradiction_frequency.kb", "C"), ("control_frequency.kb", "C")] {
        let r = run(&["sat", "--json", p(&model(kb)), "--concept", concept]);
        assert_valid("sat", &r.stdout);
    }
}

#[test]
fn classify_examples() {
    let r = run(&["classify", p(&model("contradiction_disjoint.orm"))]);
    assert_eq!(r.status, 0);
    let rows: Vec<&str> = r.stdout.lines().take(5).collect();
    assert_eq!(
        rows,
        [
            "type        verdict",
            "Combustion  sat (d=1)",
            "Electric    sat (d=1)",
            "Hybrid      no model up to 3",
            "Vehicle     sat (d=1)",
        ]
    );
    let r = run(&["classify", p(&model("fig1.orm"))]);
    assert!(r.stdout.contains("Hospital  sat (d=1)") && r.stdout.contains("Patient   sat (d=1)"), "{}", r.stdout);
    let r = run(&["classify", p(&model("empty.orm"))]);
    assert_eq!(r.stdout.lines().next(), Some("type  verdict"));
    assert_eq!(r.stdout.lines().count(), 2);
    assert_eq!(run(&["classify", p(&model("ring.orm"))]).status, 2);
    assert_valid("classify", &run(&["classify", "--json", p(&model("contradiction_disjoint.orm"))]).stdout);
}

#[test]
fn crosscheck_examples() {
    let r = run(&["crosscheck", p(&model("contradiction_disjoint.orm"))]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.contains("agree     Hybrid: orm no model up to 3, kb no model up to 3"), "{}", r.stdout);
    let r = run(&["crosscheck", p(&model("fig1.orm"))]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.contains("fragment: exact") && r.stdout.ends_with("3/3 agree\n"), "{}", r.stdout);
    let r = run(&["crosscheck", p(&model("approx_ternary_subset.orm"))]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.contains("fragment: approximate"));
    assert!(r.stdout.contains("approximate: subset rents.r1 of returns.r1; (role comparison beyond arity 2)"), "{}", r.stdout);
    assert_eq!(run(&["crosscheck", p(&model("ring.orm"))]).status, 2);
    for m in ["fig1.orm", "rule_30.orm", "ring.orm"] {
        let r = run(&["crosscheck", "--json", "--partial", p(&model(m))]);
        assert_valid("crosscheck", &r.stdout);
    }
}

#[test]
fn explain_examples() {
    let r = run(&["explain", p(&model("rule_13.orm"))]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.contains("nr.13        unique scored(r1, r2);\n    (id scored [1]r1, [1]r2)\n"), "{}", r.stdout);
    let r = run(&["explain", p(&model("ring.orm"))]);
    assert_eq!(r.status, 0);
    assert!(r.stdout.contains("rejected:§4  ring acyclic on parent(r1, r2);"));
    for m in ["fig1.orm", "ring.orm", "rule_14.orm", "empty.orm"] {
        assert_valid("explain", &run(&["explain", "--json", p(&model(m))]).stdout);
    }
}

#[test]
fn ceiling_from_environment() {
    let fig1 = model("fig1.orm");
    let r = run_env(&["crosscheck", p(&fig1)], &[("ORM2DLR_CEILING", "1")]);
    assert_eq!(r.status, 3, "{}", r.stdout);
    assert!(r.stdout.contains("undecided"));
    let r = run_env(&["classify", p(&fig1)], &[("ORM2DLR_CEILING", "1")]);
    assert_eq!(r.status, 3);
    let r = run_env(&["sat", p(&model("control_frequency.kb")), "--concept", "C"], &[("ORM2DLR_CEILING", "1")]);
    assert_eq!(r.status, 3);
    assert!(r.stdout.starts_with("too large"));
    // the flag wins over the environment
    let r = run_env(&["classify", p(&fig1), "--ceiling", "100000"], &[("ORM2DLR_CEILING", "1")]);
    assert_eq!(r.status, 0);
    let r = run_env(&["classify", p(&fig1)], &[("ORM2DLR_CEILING", "lots")]);
    assert_eq!(r.status, 1);
    assert!(r.stderr.contains("ORM2DLR_CEILING"));
}

#[test]
fn check_json_for_corpus() {
    for m in models() {
        let r = run(&["check", "--json", p(&m)]);
        assert_eq!(r.status, 0);
        assert_valid("check", &r.stdout);
    }
}
