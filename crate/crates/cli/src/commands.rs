use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use orm2dlr_core::crosscheck::{cross_check, CrossConfig, CrossError, SideVerdict};
use orm2dlr_core::dlr::render::axiom_dl;
use orm2dlr_core::dlr::text::{axiom_text, parse_kb, serialize_kb};
use orm2dlr_core::orm::inventory::constructs;
use orm2dlr_core::orm::parser::parse_orm_unchecked;
use orm2dlr_core::semantics::search::DEFAULT_CEILING;
use orm2dlr_core::semantics::InvariantViolation;
use orm2dlr_core::{
    concept_satisfiable_bounded, kb_satisfiable_bounded, translate, validate_model, ConceptExpr, Diagnostic,
    KnowledgeBase, OrmModel, SatResult, SearchConfig, TopMode, TranslateError, TranslateOptions, TranslationReport,
};

use crate::{Command, Format, SearchFlags, Status};

const CEILING_VAR: &str = "ORM2DLR_CEILING";
const BOUNDED_NOTE: &str = "note: bounded search; no model up to d does not prove unsatisfiability";

/// A command failure already carrying its exit status.
struct Fail(Status);

type Run = Result<Status, Fail>;

pub fn run(cmd: Command) -> Status {
    let r = match cmd {
        Command::Check { path, json } => check(&path, json),
        Command::Translate { path, opts, format, output, report } => {
            translate_cmd(&path, opts.into(), format, output.as_deref(), report.as_deref())
        }
        Command::Sat { kb, search, concept, json } => sat(&kb, &search, concept.as_deref(), json),
        Command::Classify { path, opts, search, json } => classify(&path, opts.into(), &search, json),
        Command::Crosscheck { path, opts, search, json } => crosscheck(&path, opts.into(), &search, json),
        Command::Explain { path, opts, json } => explain(&path, opts.into(), json),
    };
    r.unwrap_or_else(|Fail(s)| s)
}

fn diag_line(path: &Path, d: &Diagnostic) -> String {
    if d.span.is_known() {
        format!("{}:{d}", path.display())
    } else {
        format!("{}: {d}", path.display())
    }
}

fn report_diags(path: &Path, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}", diag_line(path, d));
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: error[io]: {e}", path.display());
        Fail(Status::Diagnostics)
    })
}

fn write_out(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| {
        eprintln!("{}: error[io]: {e}", path.display());
        Fail(Status::Diagnostics)
    })
}

fn print_json(v: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable output"));
}

/// Parse and validate; every diagnostic goes to stderr.
fn load_model(path: &Path) -> Result<OrmModel, Fail> {
    let src = read(path)?;
    let m = parse_orm_unchecked(&src).map_err(|d| {
        report_diags(path, &d);
        Fail(Status::Diagnostics)
    })?;
    let diags = validate_model(&m);
    report_diags(path, &diags);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(Fail(Status::Diagnostics));
    }
    Ok(m)
}

fn translate_or_fail(path: &Path, m: &OrmModel, opts: TranslateOptions) -> Result<(KnowledgeBase, TranslationReport), Fail> {
    translate(m, opts).map_err(|e| translate_fail(path, &e))
}

fn translate_fail(path: &Path, e: &TranslateError) -> Fail {
    report_diags(path, &e.diagnostics());
    Fail(match e {
        TranslateError::Invalid(_) => Status::Diagnostics,
        TranslateError::Rejected(_) => Status::Rejected,
        TranslateError::Internal(_) => Status::Internal,
    })
}

fn invariant_fail(e: &InvariantViolation) -> Fail {
    eprintln!("error[internal]: {e}");
    Fail(match e {
        InvariantViolation::IllTyped(_) => Status::Diagnostics,
        InvariantViolation::WitnessRejected(_) => Status::Internal,
    })
}

fn search_config(flags: &SearchFlags, default_top: TopMode) -> Result<SearchConfig, Fail> {
    let ceiling = match flags.ceiling {
        Some(c) => c,
        None => match std::env::var(CEILING_VAR) {
            Ok(v) => v.trim().parse().map_err(|_| {
                eprintln!("error[env]: {CEILING_VAR}={v} is not a nonnegative integer");
                Fail(Status::Diagnostics)
            })?,
            Err(_) => DEFAULT_CEILING,
        },
    };
    if flags.max_domain == 0 {
        eprintln!("error[args]: --max-domain must be at least 1");
        return Err(Fail(Status::Diagnostics));
    }
    let mut cfg = SearchConfig::new(flags.max_domain).with_top(flags.top.map_or(default_top, TopMode::from));
    cfg.ceiling = ceiling;
    Ok(cfg)
}

fn top_name(t: TopMode) -> &'static str {
    match t {
        TopMode::FullProduct => "full",
        TopMode::Enumerated => "enum",
    }
}

fn check(path: &Path, json: bool) -> Run {
    let src = read(path)?;
    let (model, mut diags) = match parse_orm_unchecked(&src) {
        Ok(m) => {
            let d = validate_model(&m);
            (Some(m), d)
        }
        Err(d) => (None, d),
    };
    orm2dlr_core::diag::sort_diagnostics(&mut diags);
    let ok = !diags.iter().any(Diagnostic::is_error);
    let model = model.filter(|_| ok);
    let inventory = model.as_ref().map(orm2dlr_core::orm::constraint_inventory).unwrap_or_default();
    let n = model.as_ref().map_or(0, |m| constructs(m).len());
    if json {
        print_json(&json!({
            "command": "check",
            "file": path.display().to_string(),
            "ok": ok,
            "diagnostics": diags,
            "constructs": n,
            "inventory": inventory.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        }));
    } else {
        report_diags(path, &diags);
        if ok {
            println!("{}: ok, {n} constructs", path.display());
            for (k, v) in inventory.iter().filter(|(_, v)| **v > 0) {
                println!("  {:<12} {v}", k.to_string());
            }
        }
    }
    Ok(if ok { Status::Success } else { Status::Diagnostics })
}

fn translate_cmd(path: &Path, opts: TranslateOptions, format: Format, output: Option<&Path>, report: Option<&Path>) -> Run {
    let m = load_model(path)?;
    let (kb, rep) = translate_or_fail(path, &m, opts)?;
    let text = serialize_kb(&kb);
    let body = match format {
        Format::Text => text,
        Format::Json => {
            let axioms: Vec<_> = kb
                .axioms
                .iter()
                .map(|a| json!({ "text": axiom_text(a, &kb.signature), "dl": axiom_dl(a) }))
                .collect();
            let v = json!({ "command": "translate", "options": opts, "kb": text, "axioms": axioms });
            serde_json::to_string_pretty(&v).expect("serializable output") + "\n"
        }
    };
    match output {
        Some(o) => write_out(o, &body)?,
        None => print!("{body}"),
    }
    if let Some(r) = report {
        let body = match format {
            Format::Text => report_text(&kb, &rep),
            Format::Json => serde_json::to_string_pretty(&rep).expect("serializable output") + "\n",
        };
        write_out(r, &body)?;
    }
    Ok(Status::Success)
}

fn verdict_status<I>(r: &SatResult<I>) -> Status {
    match r {
        SatResult::TooLarge { .. } => Status::Ceiling,
        _ => Status::Success,
    }
}

fn sat(path: &Path, flags: &SearchFlags, concept: Option<&str>, json: bool) -> Run {
    let cfg = search_config(flags, TopMode::FullProduct)?;
    let src = read(path)?;
    let kb = parse_kb(&src).map_err(|d| {
        report_diags(path, &d);
        Fail(Status::Diagnostics)
    })?;
    let r = match concept {
        Some(c) => {
            if !kb.signature.concepts.contains(c) {
                eprintln!("{}: error[unknown-concept]: `{c}` is not a concept of the knowledge base", path.display());
                return Err(Fail(Status::Diagnostics));
            }
            concept_satisfiable_bounded(&kb, &ConceptExpr::atomic(c), &cfg)
        }
        None => kb_satisfiable_bounded(&kb, &cfg),
    }
    .map_err(|e| invariant_fail(&e))?;
    if json {
        print_json(&json!({
            "command": "sat",
            "file": path.display().to_string(),
            "concept": concept,
            "max_domain": cfg.max_domain,
            "top": top_name(cfg.top_mode),
            "result": r,
        }));
    } else {
        let subject = concept.map_or(String::new(), |c| format!(" with {c} nonempty"));
        match &r {
            SatResult::Sat(w) => {
                println!("sat{subject}: model of size {} (⊤: {})", w.interpretation.domain_size, top_name(cfg.top_mode));
                print!("{}", w.interpretation.to_text());
            }
            SatResult::NoModelUpTo { max_domain } => println!("no model{subject} up to {max_domain}"),
            SatResult::TooLarge { domain_size, size, ceiling } => {
                println!("too large{subject}: {size} at d={domain_size} exceeds ceiling {ceiling}")
            }
        }
        println!("{BOUNDED_NOTE}");
    }
    Ok(verdict_status(&r))
}

fn classify(path: &Path, opts: TranslateOptions, flags: &SearchFlags, json: bool) -> Run {
    let cfg = search_config(flags, TopMode::Enumerated)?;
    let m = load_model(path)?;
    let (kb, _) = translate_or_fail(path, &m, opts)?;
    let mut rows = Vec::new();
    let mut status = Status::Success;
    for t in m.all_object_types() {
        let r = concept_satisfiable_bounded(&kb, &ConceptExpr::atomic(t.clone()), &cfg).map_err(|e| invariant_fail(&e))?;
        if verdict_status(&r) == Status::Ceiling {
            status = Status::Ceiling;
        }
        rows.push((t, SideVerdict::from_result(r, |i| i.domain_size)));
    }
    if json {
        let types: Vec<_> = rows.iter().map(|(t, v)| json!({ "type": t, "result": v })).collect();
        print_json(&json!({
            "command": "classify",
            "file": path.display().to_string(),
            "max_domain": cfg.max_domain,
            "top": top_name(cfg.top_mode),
            "types": types,
        }));
    } else {
        let w = rows.iter().map(|(t, _)| t.chars().count()).max().unwrap_or(0).max(4);
        println!("{:<w$}  verdict", "type");
        for (t, v) in &rows {
            println!("{t:<w$}  {}", v.summary());
        }
        println!("{BOUNDED_NOTE}");
    }
    Ok(status)
}

fn crosscheck(path: &Path, opts: TranslateOptions, flags: &SearchFlags, json: bool) -> Run {
    let scfg = search_config(flags, TopMode::Enumerated)?;
    let m = load_model(path)?;
    let cfg = CrossConfig { max_domain: scfg.max_domain, top_mode: scfg.top_mode, ceiling: scfg.ceiling, options: opts };
    let rep = cross_check(&m, &cfg).map_err(|e| match e {
        CrossError::Translate(e) => translate_fail(path, &e),
        CrossError::Invariant(e) => invariant_fail(&e),
    })?;
    if json {
        print_json(&json!({ "command": "crosscheck", "file": path.display().to_string(), "report": rep }));
    } else {
        print!("{}", rep.to_text());
    }
    if rep.comparisons.iter().any(|c| c.agree.is_none()) {
        return Ok(Status::Ceiling);
    }
    if rep.exact && rep.divergences().next().is_some() {
        eprintln!("{}: error[divergence]: the translation disagrees with the model's semantics", path.display());
        return Ok(Status::Internal);
    }
    Ok(Status::Success)
}

fn report_text(kb: &KnowledgeBase, rep: &TranslationReport) -> String {
    let mut out = String::new();
    for e in &rep.entries {
        let _ = writeln!(out, "{:<12} {}", e.rule.to_string(), e.text);
        for &i in &e.axioms {
            let _ = writeln!(out, "    {}", axiom_dl(&kb.axioms[i]));
        }
        for f in &e.fresh {
            let _ = writeln!(out, "    fresh: {f}");
        }
        for n in &e.notes {
            let _ = writeln!(out, "    note: {n}");
        }
    }
    for r in &rep.rejections {
        let _ = writeln!(out, "{:<12} {}", r.rule.to_string(), r.text);
        let _ = writeln!(out, "    {}", r.diagnostic().message);
    }
    if !rep.reified_facts.is_empty() {
        let names: Vec<&str> = rep.reified_facts.iter().map(String::as_str).collect();
        let _ = writeln!(out, "reified: {}", names.join(", "));
    }
    out
}

fn explain(path: &Path, opts: TranslateOptions, json: bool) -> Run {
    let m = load_model(path)?;
    let (kb, rep) = translate_or_fail(path, &m, TranslateOptions { partial: true, ..opts })?;
    if json {
        let axioms: Vec<String> = kb.axioms.iter().map(axiom_dl).collect();
        print_json(&json!({
            "command": "explain",
            "file": path.display().to_string(),
            "report": rep,
            "axioms": axioms,
        }));
    } else {
        print!("{}", report_text(&kb, &rep));
    }
    Ok(Status::Success)
}
