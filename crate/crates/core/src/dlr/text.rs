//! Prefix text format for knowledge bases.
//!
//! ```text
//! # declarations
//! (concept Patient)
//! (relation Admits 3 r1 haspatients r3)
//! (domain Date date)
//! # axioms, one per line
//! (impl Hospital (exists haspatients Admits))
//! (impl-rel Admits (and (sel r1 3 Patient) (sel haspatients 3 Hospital) (sel r3 3 Date)))
//! (id C (1 P) (2 Q))
//! (fd F (1 2) 3)
//! ```
//!
//! The parser also accepts the abbreviations `(bottom)`, `(or …)`,
//! `(implies A B)`, `(forall i R)`, `(atleast k i R)` and the short
//! selection `(sel i C)`; they are expanded on reading. The serializer
//! writes core constructors only.

use std::fmt::Write;

use super::ext::{expand_concept, expand_relation, infer_arity, ExtComponent, ExtConcept, ExtRelation};
use super::{Axiom, Component, ConceptExpr, KnowledgeBase, RelationExpr, RelationSig, Signature};
use crate::diag::{Diagnostic, Span};
use crate::value::{BaseType, Literal, Restriction, ValueDomain};

#[derive(Clone, Debug, PartialEq)]
enum Sx {
    Atom(String, Span),
    Str(String, Span),
    List(Vec<Sx>, Span),
}

impl Sx {
    fn span(&self) -> Span {
        match self {
            Sx::Atom(_, s) | Sx::Str(_, s) | Sx::List(_, s) => *s,
        }
    }

    fn describe(&self) -> String {
        match self {
            Sx::Atom(a, _) => format!("`{a}`"),
            Sx::Str(s, _) => format!("string '{s}'"),
            Sx::List(..) => "a list".into(),
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader { chars: src.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == '#' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<Sx>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            match self.chars.peek() {
                None => return Ok(out),
                Some(')') => {
                    return Err(Diagnostic::error("syntax", "unbalanced `)`", Span::new(self.line, self.col, 1)))
                }
                _ => out.push(self.read()?),
            }
        }
    }

    fn read(&mut self) -> Result<Sx, Diagnostic> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        match self.chars.peek().copied() {
            None => Err(Diagnostic::error("syntax", "unexpected end of input", Span::new(line, col, 0))),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(Diagnostic::error("syntax", "unclosed `(`", Span::new(line, col, 1)))
                        }
                        Some(')') => {
                            self.bump();
                            let len = if self.line == line { self.col - col } else { 1 };
                            return Ok(Sx::List(items, Span::new(line, col, len)));
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(q @ ('\'' | '"')) => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None | Some('\n') => {
                            return Err(Diagnostic::error("syntax", "unterminated string", Span::new(line, col, 1)))
                        }
                        Some('\\') => match self.bump() {
                            Some(c) => s.push(c),
                            None => {
                                return Err(Diagnostic::error(
                                    "syntax",
                                    "unterminated string",
                                    Span::new(line, col, 1),
                                ))
                            }
                        },
                        Some(c) if c == q => break,
                        Some(c) => s.push(c),
                    }
                }
                Ok(Sx::Str(s, Span::new(line, col, self.col.saturating_sub(col))))
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '#' | '\'' | '"') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sx::Atom(s, Span::new(line, col, self.col - col)))
            }
        }
    }
}

fn err(code: &str, msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error(code, msg, span)
}

fn head(items: &[Sx]) -> Option<&str> {
    match items.first() {
        Some(Sx::Atom(a, _)) => Some(a),
        _ => None,
    }
}

fn atom(sx: &Sx, what: &str) -> Result<String, Diagnostic> {
    match sx {
        Sx::Atom(a, _) => Ok(a.clone()),
        other => Err(err("syntax", format!("expected {what}, found {}", other.describe()), other.span())),
    }
}

fn uint(sx: &Sx, what: &str) -> Result<usize, Diagnostic> {
    match sx {
        Sx::Atom(a, s) => a.parse().map_err(|_| err("syntax", format!("expected {what}, found `{a}`"), *s)),
        other => Err(err("syntax", format!("expected {what}, found {}", other.describe()), other.span())),
    }
}

fn arity_check(items: &[Sx], n: usize, form: &str, span: Span) -> Result<(), Diagnostic> {
    if items.len() != n + 1 {
        Err(err("syntax", format!("`{form}` takes {n} argument(s), found {}", items.len().saturating_sub(1)), span))
    } else {
        Ok(())
    }
}

fn component(sx: &Sx) -> Result<ExtComponent, Diagnostic> {
    let a = atom(sx, "a component")?;
    Ok(match a.parse::<usize>() {
        Ok(i) => ExtComponent::idx(i),
        Err(_) => ExtComponent::named(a),
    })
}

fn concept(sx: &Sx) -> Result<ExtConcept, Diagnostic> {
    let (items, span) = match sx {
        Sx::Atom(a, _) => return Ok(ExtConcept::Atomic(a.clone())),
        Sx::Str(..) => return Err(err("syntax", "expected a concept, found a string", sx.span())),
        Sx::List(items, span) => (items, *span),
    };
    let h = head(items).ok_or_else(|| err("syntax", "expected a concept form", span))?;
    let nary = |f: fn(ExtConcept, ExtConcept) -> ExtConcept| -> Result<ExtConcept, Diagnostic> {
        if items.len() < 3 {
            return Err(err("syntax", format!("`{h}` needs at least two arguments"), span));
        }
        let mut it = items[1..].iter().map(concept);
        let first = it.next().unwrap()?;
        it.try_fold(first, |acc, x| Ok(f(acc, x?)))
    };
    Ok(match h {
        "top1" => {
            arity_check(items, 0, h, span)?;
            ExtConcept::Top
        }
        "bottom" => {
            arity_check(items, 0, h, span)?;
            ExtConcept::Bottom
        }
        "not" => {
            arity_check(items, 1, h, span)?;
            ExtConcept::not(concept(&items[1])?)
        }
        "and" => nary(ExtConcept::and)?,
        "or" => nary(ExtConcept::or)?,
        "implies" => {
            arity_check(items, 2, h, span)?;
            ExtConcept::implies(concept(&items[1])?, concept(&items[2])?)
        }
        "exists" | "forall" => {
            arity_check(items, 2, h, span)?;
            let (i, r) = (component(&items[1])?, relation(&items[2])?);
            if h == "exists" {
                ExtConcept::exists(i, r)
            } else {
                ExtConcept::forall(i, r)
            }
        }
        "atmost" | "atleast" => {
            arity_check(items, 3, h, span)?;
            let k = uint(&items[1], "a number")?;
            let k = u32::try_from(k).map_err(|_| err("syntax", "number too large", items[1].span()))?;
            let (i, r) = (component(&items[2])?, relation(&items[3])?);
            if h == "atmost" {
                ExtConcept::at_most(k, i, r)
            } else {
                ExtConcept::at_least(k, i, r)
            }
        }
        other => return Err(err("syntax", format!("unknown concept form `{other}`"), items[0].span())),
    })
}

fn relation(sx: &Sx) -> Result<ExtRelation, Diagnostic> {
    let (items, span) = match sx {
        Sx::Atom(a, _) => return Ok(ExtRelation::Atomic(a.clone())),
        Sx::Str(..) => return Err(err("syntax", "expected a relation, found a string", sx.span())),
        Sx::List(items, span) => (items, *span),
    };
    let h = head(items).ok_or_else(|| err("syntax", "expected a relation form", span))?;
    let nary = |f: fn(ExtRelation, ExtRelation) -> ExtRelation| -> Result<ExtRelation, Diagnostic> {
        if items.len() < 3 {
            return Err(err("syntax", format!("`{h}` needs at least two arguments"), span));
        }
        let mut it = items[1..].iter().map(relation);
        let first = it.next().unwrap()?;
        it.try_fold(first, |acc, x| Ok(f(acc, x?)))
    };
    Ok(match h {
        "topn" => {
            arity_check(items, 1, h, span)?;
            ExtRelation::Top(uint(&items[1], "an arity")?)
        }
        "sel" => match items.len() {
            3 => ExtRelation::sel(component(&items[1])?, None, concept(&items[2])?),
            4 => ExtRelation::sel(component(&items[1])?, Some(uint(&items[2], "an arity")?), concept(&items[3])?),
            _ => return Err(err("syntax", "`sel` takes a component, an optional arity and a concept", span)),
        },
        "not" => {
            arity_check(items, 1, h, span)?;
            ExtRelation::not(relation(&items[1])?)
        }
        "and" => nary(ExtRelation::and)?,
        "or" => nary(ExtRelation::or)?,
        "implies" => {
            arity_check(items, 2, h, span)?;
            ExtRelation::implies(relation(&items[1])?, relation(&items[2])?)
        }
        other => return Err(err("syntax", format!("unknown relation form `{other}`"), items[0].span())),
    })
}

fn literal(sx: &Sx, base: BaseType) -> Result<Literal, Diagnostic> {
    let lit = match sx {
        Sx::Str(s, _) => Literal::Str(s.clone()),
        Sx::Atom(a, span) => {
            Literal::Int(a.parse().map_err(|_| err("syntax", format!("expected a literal, found `{a}`"), *span))?)
        }
        Sx::List(_, span) => return Err(err("syntax", "expected a literal", *span)),
    };
    lit.coerce(base).map_err(|m| err("bad-literal", m, sx.span()))
}

fn domain(items: &[Sx], span: Span) -> Result<(String, ValueDomain), Diagnostic> {
    if !(3..=4).contains(&items.len()) {
        return Err(err("syntax", "`domain` takes a concept, a base type and an optional restriction", span));
    }
    let name = atom(&items[1], "a concept name")?;
    let b = atom(&items[2], "a base type")?;
    let base = BaseType::from_keyword(&b)
        .ok_or_else(|| err("syntax", format!("unknown base type `{b}`"), items[2].span()))?;
    let restriction = match items.get(3) {
        None => None,
        Some(Sx::List(r, rspan)) => match head(r) {
            Some("one-of") => Some(Restriction::Enumeration(
                r[1..].iter().map(|x| literal(x, base)).collect::<Result<_, _>>()?,
            )),
            Some("range") if r.len() == 3 => {
                Some(Restriction::Range { lower: literal(&r[1], base)?, upper: literal(&r[2], base)? })
            }
            _ => return Err(err("syntax", "expected (one-of …) or (range lo hi)", *rspan)),
        },
        Some(other) => return Err(err("syntax", "expected a restriction", other.span())),
    };
    let dom = ValueDomain { base, restriction };
    dom.check().map_err(|m| err("bad-domain", m, span))?;
    Ok((name, dom))
}

enum Pending {
    ConceptIncl(ExtConcept, ExtConcept),
    RelationIncl(ExtRelation, ExtRelation),
    Id(String, Vec<(ExtComponent, String)>),
    Fd(String, Vec<ExtComponent>, ExtComponent),
}

/// Parse the text format into a checked knowledge base.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    let forms = Reader::new(src).read_all().map_err(|d| vec![d])?;
    let mut sig = Signature::new();
    let mut pending = Vec::new();
    let mut domains = Vec::new();
    let mut diags = Vec::new();
    for f in &forms {
        if let Err(d) = top_form(f, &mut sig, &mut domains, &mut pending) {
            diags.push(d);
        }
    }
    for (name, dom, span) in domains {
        if let Err(e) = sig.add_value_domain(name, dom) {
            diags.push(err("bad-domain", e.to_string(), span));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut kb = KnowledgeBase::new(sig);
    for (p, span) in pending {
        match lower(&p, &kb.signature) {
            Ok(ax) => {
                if let Err(e) = kb.push(ax) {
                    for te in e.errors {
                        diags.push(err(te.kind.code(), format!("{} at {}", te.kind, te.path_str()), span));
                    }
                }
            }
            Err(m) => diags.push(err("bad-axiom", m, span)),
        }
    }
    if diags.is_empty() {
        Ok(kb)
    } else {
        Err(diags)
    }
}

fn top_form(
    f: &Sx,
    sig: &mut Signature,
    domains: &mut Vec<(String, ValueDomain, Span)>,
    pending: &mut Vec<(Pending, Span)>,
) -> Result<(), Diagnostic> {
    let Sx::List(items, span) = f else {
        return Err(err("syntax", format!("expected a declaration or axiom, found {}", f.describe()), f.span()));
    };
    let span = *span;
    let h = head(items).ok_or_else(|| err("syntax", "expected a declaration or axiom", span))?;
    match h {
        "concept" => {
            arity_check(items, 1, h, span)?;
            sig.add_concept(atom(&items[1], "a concept name")?).map_err(|e| err("duplicate-name", e.to_string(), span))
        }
        "relation" => {
            if items.len() < 3 {
                return Err(err("syntax", "`relation` takes a name, an arity and optional component names", span));
            }
            let name = atom(&items[1], "a relation name")?;
            let n = uint(&items[2], "an arity")?;
            let rs = if items.len() == 3 {
                RelationSig::unnamed(n)
            } else {
                let names = items[3..]
                    .iter()
                    .map(|x| atom(x, "a component name").map(|a| if a == "_" { None } else { Some(a) }))
                    .collect::<Result<Vec<_>, _>>()?;
                if names.len() != n {
                    return Err(err("syntax", format!("{} component names for arity {n}", names.len()), span));
                }
                RelationSig { arity: n, components: names }
            };
            sig.add_relation(name, rs).map_err(|e| err("bad-declaration", e.to_string(), span))
        }
        "domain" => {
            let (name, dom) = domain(items, span)?;
            domains.push((name, dom, span));
            Ok(())
        }
        "impl" => {
            arity_check(items, 2, h, span)?;
            pending.push((Pending::ConceptIncl(concept(&items[1])?, concept(&items[2])?), span));
            Ok(())
        }
        "impl-rel" => {
            arity_check(items, 2, h, span)?;
            pending.push((Pending::RelationIncl(relation(&items[1])?, relation(&items[2])?), span));
            Ok(())
        }
        "id" => {
            if items.len() < 3 {
                return Err(err("syntax", "`id` takes a concept and at least one (component relation) pair", span));
            }
            let c = atom(&items[1], "a concept name")?;
            let mut parts = Vec::new();
            for p in &items[2..] {
                match p {
                    Sx::List(pp, _) if pp.len() == 2 => parts.push((component(&pp[0])?, atom(&pp[1], "a relation")?)),
                    other => return Err(err("syntax", "expected (component relation)", other.span())),
                }
            }
            pending.push((Pending::Id(c, parts), span));
            Ok(())
        }
        "fd" => {
            arity_check(items, 3, h, span)?;
            let r = atom(&items[1], "a relation name")?;
            let Sx::List(srcs, _) = &items[2] else {
                return Err(err("syntax", "expected a list of source components", items[2].span()));
            };
            let srcs = srcs.iter().map(component).collect::<Result<Vec<_>, _>>()?;
            pending.push((Pending::Fd(r, srcs, component(&items[3])?), span));
            Ok(())
        }
        other => Err(err("syntax", format!("unknown form `{other}`"), items[0].span())),
    }
}

fn lower(p: &Pending, sig: &Signature) -> Result<Axiom, String> {
    let in_rel = |c: &ExtComponent, r: &str| {
        super::ext::resolve_component(c, &[r], sig.arity(r), sig).map_err(|e| e.to_string())
    };
    Ok(match p {
        Pending::ConceptIncl(l, r) => Axiom::concept_incl(
            expand_concept(l, sig).map_err(|e| e.to_string())?,
            expand_concept(r, sig).map_err(|e| e.to_string())?,
        ),
        Pending::RelationIncl(l, r) => {
            let ctx = infer_arity(l, sig).or_else(|| infer_arity(r, sig));
            Axiom::relation_incl(
                expand_relation(l, sig, ctx).map_err(|e| e.to_string())?,
                expand_relation(r, sig, ctx).map_err(|e| e.to_string())?,
            )
        }
        Pending::Id(c, parts) => Axiom::Id {
            concept: c.clone(),
            parts: parts.iter().map(|(i, r)| Ok((in_rel(i, r)?, r.clone()))).collect::<Result<_, String>>()?,
        },
        Pending::Fd(r, srcs, t) => Axiom::Fd {
            relation: r.clone(),
            sources: srcs.iter().map(|i| in_rel(i, r)).collect::<Result<_, _>>()?,
            target: in_rel(t, r)?,
        },
    })
}

// ---- serialization ----

struct Writer<'a> {
    sig: &'a Signature,
}

fn needs_quote(name: &str) -> bool {
    name.is_empty()
        || name.parse::<i64>().is_ok()
        || name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '#' | '\'' | '"'))
}

impl<'a> Writer<'a> {
    /// A component as a name when reading it back gives the same index.
    fn comp(&self, c: &Component, scope: &[&str], arity: Option<usize>) -> String {
        if let Some(n) = &c.name {
            if !needs_quote(n) {
                let back = super::ext::resolve_component(&ExtComponent::named(n.clone()), scope, arity, self.sig);
                if back.map(|b| b.index) == Ok(c.index) {
                    return n.clone();
                }
            }
        }
        c.index.to_string()
    }

    fn concept(&self, c: &ConceptExpr, out: &mut String) {
        match c {
            ConceptExpr::Top => out.push_str("(top1)"),
            ConceptExpr::Atomic(a) => out.push_str(a),
            ConceptExpr::Not(x) => {
                out.push_str("(not ");
                self.concept(x, out);
                out.push(')');
            }
            ConceptExpr::And(..) => {
                out.push_str("(and");
                let mut items = Vec::new();
                flatten_c(c, &mut items);
                for x in items {
                    out.push(' ');
                    self.concept(x, out);
                }
                out.push(')');
            }
            ConceptExpr::Exists(i, r) => {
                let _ = write!(out, "(exists {} ", self.scoped_comp(i, r));
                self.relation(r, out, &anchors(r));
                out.push(')');
            }
            ConceptExpr::AtMost(k, i, r) => {
                let _ = write!(out, "(atmost {k} {} ", self.scoped_comp(i, r));
                self.relation(r, out, &anchors(r));
                out.push(')');
            }
        }
    }

    fn scoped_comp(&self, i: &Component, r: &RelationExpr) -> String {
        let scope = anchors(r);
        let arity = super::typing::relation_arity(r, self.sig);
        self.comp(i, &scope, arity)
    }

    fn relation(&self, r: &RelationExpr, out: &mut String, scope: &[&str]) {
        match r {
            RelationExpr::Top(n) => {
                let _ = write!(out, "(topn {n})");
            }
            RelationExpr::Atomic(p) => out.push_str(p),
            RelationExpr::Select { component, arity, concept } => {
                let _ = write!(out, "(sel {} {arity} ", self.comp(component, scope, Some(*arity)));
                self.concept(concept, out);
                out.push(')');
            }
            RelationExpr::Not(x) => {
                out.push_str("(not ");
                self.relation(x, out, scope);
                out.push(')');
            }
            RelationExpr::And(..) => {
                out.push_str("(and");
                let mut items = Vec::new();
                flatten_r(r, &mut items);
                for x in items {
                    out.push(' ');
                    self.relation(x, out, scope);
                }
                out.push(')');
            }
        }
    }

    fn axiom(&self, ax: &Axiom, out: &mut String) {
        match ax {
            Axiom::ConceptIncl { lhs, rhs } => {
                out.push_str("(impl ");
                self.concept(lhs, out);
                out.push(' ');
                self.concept(rhs, out);
                out.push(')');
            }
            Axiom::RelationIncl { lhs, rhs } => {
                let mut scope = anchors(lhs);
                scope.extend(anchors(rhs));
                out.push_str("(impl-rel ");
                self.relation(lhs, out, &scope);
                out.push(' ');
                self.relation(rhs, out, &scope);
                out.push(')');
            }
            Axiom::Id { concept, parts } => {
                let _ = write!(out, "(id {concept}");
                for (i, r) in parts {
                    let _ = write!(out, " ({} {r})", self.comp(i, &[r.as_str()], self.sig.arity(r)));
                }
                out.push(')');
            }
            Axiom::Fd { relation, sources, target } => {
                let scope = [relation.as_str()];
                let a = self.sig.arity(relation);
                let ss: Vec<String> = sources.iter().map(|i| self.comp(i, &scope, a)).collect();
                let _ = write!(out, "(fd {relation} ({}) {})", ss.join(" "), self.comp(target, &scope, a));
            }
        }
    }
}

fn flatten_c<'a>(c: &'a ConceptExpr, out: &mut Vec<&'a ConceptExpr>) {
    match c {
        ConceptExpr::And(x, y) => {
            flatten_c(x, out);
            out.push(y);
        }
        other => out.push(other),
    }
}

fn flatten_r<'a>(r: &'a RelationExpr, out: &mut Vec<&'a RelationExpr>) {
    match r {
        RelationExpr::And(x, y) => {
            flatten_r(x, out);
            out.push(y);
        }
        other => out.push(other),
    }
}

fn anchors(r: &RelationExpr) -> Vec<&str> {
    fn go<'a>(r: &'a RelationExpr, out: &mut Vec<&'a str>) {
        match r {
            RelationExpr::Atomic(p) => out.push(p),
            RelationExpr::Not(x) => go(x, out),
            RelationExpr::And(x, y) => {
                go(x, out);
                go(y, out);
            }
            _ => {}
        }
    }
    let mut v = Vec::new();
    go(r, &mut v);
    v
}

fn literal_text(l: &Literal) -> String {
    l.to_string()
}

/// Canonical text: declarations sorted by kind then name, then one axiom
/// per line in stored order.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let sig = &kb.signature;
    let w = Writer { sig };
    let mut out = String::new();
    for c in &sig.concepts {
        let _ = writeln!(out, "(concept {c})");
    }
    for (r, rs) in &sig.relations {
        let _ = write!(out, "(relation {r} {}", rs.arity);
        if rs.components.iter().any(Option::is_some) {
            for c in &rs.components {
                let _ = write!(out, " {}", c.as_deref().unwrap_or("_"));
            }
        }
        out.push_str(")\n");
    }
    for (name, dom) in &sig.value_domains {
        let _ = write!(out, "(domain {name} {}", dom.base);
        match &dom.restriction {
            None => {}
            Some(Restriction::Enumeration(vs)) => {
                out.push_str(" (one-of");
                for v in vs {
                    let _ = write!(out, " {}", literal_text(v));
                }
                out.push(')');
            }
            Some(Restriction::Range { lower, upper }) => {
                let _ = write!(out, " (range {} {})", literal_text(lower), literal_text(upper));
            }
        }
        out.push_str(")\n");
    }
    for ax in &kb.axioms {
        w.axiom(ax, &mut out);
        out.push('\n');
    }
    out
}

/// One axiom in the prefix format.
pub fn axiom_text(ax: &Axiom, sig: &Signature) -> String {
    let mut s = String::new();
    Writer { sig }.axiom(ax, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "\
# admissions
(concept Date)
(concept Hospital)
(concept Patient)
(relation Admits 3 r1 haspatients r3)
(domain Date date)
(impl-rel Admits (and (sel r1 3 Patient) (sel haspatients 3 Hospital) (sel r3 3 Date)))
(impl Hospital (exists haspatients Admits))
";

    #[test]
    fn round_trip() {
        let kb = parse_kb(SRC).unwrap();
        assert_eq!(kb.axioms.len(), 2);
        let text = serialize_kb(&kb);
        assert_eq!(text, SRC.trim_start_matches("# admissions\n"));
        assert_eq!(parse_kb(&text).unwrap(), kb);
    }

    #[test]
    fn abbreviations_are_expanded() {
        let src = "(concept A)(relation P 2)(impl A (forall 1 (implies P (sel 2 A))))";
        let kb = parse_kb(src).unwrap();
        let text = serialize_kb(&kb);
        assert!(text.contains("(impl A (not (exists 1 (and P (not (sel 2 2 A))))))"), "{text}");
    }

    #[test]
    fn undeclared_names_are_errors() {
        let errs = parse_kb("(concept A)\n(impl A B)").unwrap_err();
        assert_eq!(errs[0].code, "unknown-concept");
        assert_eq!(errs[0].span.line, 2);
    }

    #[test]
    fn id_and_fd() {
        let src = "(concept C)\n(relation F 3)\n(relation P 2)\n(id C (1 P))\n(fd F (1 2) 3)\n";
        let kb = parse_kb(src).unwrap();
        assert_eq!(serialize_kb(&kb), src);
        assert!(parse_kb("(concept C)(relation F 3)(fd F (1) 3)").is_err());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let errs = parse_kb("(concept A)\n  (impl A").unwrap_err();
        assert_eq!((errs[0].span.line, errs[0].span.col), (2, 3));
    }
}
