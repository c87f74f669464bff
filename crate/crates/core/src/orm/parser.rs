//! Text syntax for ORM models: semicolon-terminated, keyword-led
//! statements, `#` comments to end of line.
//!
//! ```text
//! object Patient; object Hospital; value Date: date;
//! fact Admitted "is admitted to" (r1: Patient, haspatients: Hospital, r3: Date);
//! mandatory Hospital in Admitted.haspatients;
//! unique Admitted(r1, haspatients, r3);
//! ```

use super::{
    Derivation, FactType, JoinPair, OrmConstraint, OrmModel, RingKind, Role, RoleOrFact, RoleRef, SubtypeLink,
};
use crate::diag::{has_errors, sort_diagnostics, Diagnostic, Span};
use crate::value::{BaseType, Literal, Restriction, ValueDomain};

const MAX_ERRORS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Int(i64),
    /// Single-quoted literal.
    Str(String),
    /// Double-quoted reading label.
    Label(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Str(s) => format!("literal '{s}'"),
            Tok::Label(s) => format!("label \"{s}\""),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str, diags: &mut Vec<Diagnostic>) -> Vec<(Tok, Span)> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let width = |a: usize, b: usize| (b - a) as u32;
    while i < chars.len() {
        let c = chars[i];
        let start = (i, line, col);
        let span_to = |j: usize| Span::new(start.1, start.2, width(start.0, j).max(1));
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let mut j = i + 1;
        let tok = if c.is_alphabetic() || c == '_' {
            while j < chars.len()
                && (chars[j].is_alphanumeric()
                    || chars[j] == '_'
                    || (chars[j] == '-' && chars.get(j + 1).is_some_and(|d| d.is_alphabetic())))
            {
                j += 1;
            }
            Tok::Name(chars[i..j].iter().collect())
        } else if c.is_ascii_digit() || (c == '-' && chars.get(j).is_some_and(|d| d.is_ascii_digit())) {
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            match text.parse() {
                Ok(v) => Tok::Int(v),
                Err(_) => {
                    diags.push(Diagnostic::error("syntax", format!("integer `{text}` out of range"), span_to(j)));
                    Tok::Int(0)
                }
            }
        } else if c == '\'' || c == '"' {
            let mut s = String::new();
            let mut closed = false;
            while j < chars.len() && chars[j] != '\n' {
                if chars[j] == '\\' && j + 1 < chars.len() && chars[j + 1] != '\n' {
                    s.push(chars[j + 1]);
                    j += 2;
                    continue;
                }
                if chars[j] == c {
                    closed = true;
                    j += 1;
                    break;
                }
                s.push(chars[j]);
                j += 1;
            }
            if !closed {
                diags.push(Diagnostic::error("syntax", "unterminated quoted text", span_to(j)));
            }
            if c == '\'' {
                Tok::Str(s)
            } else {
                Tok::Label(s)
            }
        } else if c == '.' && chars.get(j) == Some(&'.') {
            j += 1;
            Tok::Punct("..")
        } else if let Some(p) = [";", ":", ",", ".", "(", ")", "{", "}", "*"].into_iter().find(|p| p.starts_with(c)) {
            Tok::Punct(p)
        } else {
            diags.push(Diagnostic::error("syntax", format!("unexpected character `{c}`"), span_to(j)));
            i = j;
            col += 1;
            continue;
        };
        out.push((tok, span_to(j)));
        col += width(i, j);
        i = j;
    }
    out.push((Tok::Eof, Span::new(line, col, 1)));
    out
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    model: OrmModel,
    diags: Vec<Diagnostic>,
    /// Spans of references in the statement being parsed.
    refs: Vec<(String, Span)>,
}

const KEYWORDS: &[&str] = &[
    "object", "value", "subtype", "fact", "derived", "derived-stored", "mandatory", "unique", "external-unique",
    "frequency", "multirole-frequency", "cover", "disjoint", "subset", "equal", "exclude", "join-subset",
    "join-equal", "join-exclude", "objectify", "rolevalue", "ring", "reference", "participates",
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, want: &str) -> PResult<T> {
        Err(Diagnostic::error("syntax", format!("expected {want}, found {}", self.peek().describe()), self.span()))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == w)
    }

    fn punct(&mut self, p: &str) -> PResult<()> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{p}`"))
        }
    }

    fn word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{w}`"))
        }
    }

    fn name(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Name(n) => {
                let sp = self.span();
                self.bump();
                Ok((n, sp))
            }
            _ => self.unexpected("a name"),
        }
    }

    /// A name referenced from a constraint; its span is remembered.
    fn used_name(&mut self) -> PResult<String> {
        let (n, sp) = self.name()?;
        self.refs.push((n.clone(), sp));
        Ok(n)
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(i)
            }
            _ => self.unexpected("an integer"),
        }
    }

    fn count(&mut self) -> PResult<u32> {
        let sp = self.span();
        let i = self.int()?;
        u32::try_from(i).map_err(|_| Diagnostic::error("bad-frequency", format!("count {i} out of range"), sp))
    }

    fn role_ref(&mut self) -> PResult<RoleRef> {
        let (fact, sp) = self.name()?;
        self.punct(".")?;
        let (role, end) = self.name()?;
        let r = RoleRef::new(fact, role);
        let len = if end.line == sp.line { end.col + end.len - sp.col } else { sp.len };
        self.refs.push((r.to_string(), Span::new(sp.line, sp.col, len)));
        Ok(r)
    }

    fn role_or_fact(&mut self) -> PResult<RoleOrFact> {
        let (fact, sp) = self.name()?;
        if self.is_punct(".") {
            self.bump();
            let (role, end) = self.name()?;
            let r = RoleRef::new(fact, role);
            let len = if end.line == sp.line { end.col + end.len - sp.col } else { sp.len };
            self.refs.push((r.to_string(), Span::new(sp.line, sp.col, len)));
            Ok(RoleOrFact::Role(r))
        } else {
            self.refs.push((fact.clone(), sp));
            Ok(RoleOrFact::Fact(fact))
        }
    }

    fn sep_list<T>(&mut self, min: usize, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut v = vec![item(self)?];
        while self.is_punct(",") {
            self.bump();
            v.push(item(self)?);
        }
        if v.len() < min {
            return self.unexpected("`,`");
        }
        Ok(v)
    }

    fn jpair(&mut self) -> PResult<JoinPair> {
        self.punct("(")?;
        let a = self.role_ref()?;
        self.punct(",")?;
        let b = self.role_ref()?;
        self.punct(")")?;
        Ok(JoinPair(a, b))
    }

    fn literal(&mut self) -> PResult<(Literal, Span)> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok((Literal::Str(s), sp))
            }
            Tok::Int(i) => {
                self.bump();
                Ok((Literal::Int(i), sp))
            }
            _ => self.unexpected("a literal"),
        }
    }

    /// `{lit, …}` or `lo..hi`, coerced to `base` when known.
    fn restriction(&mut self, base: Option<BaseType>) -> PResult<Restriction> {
        let coerce = |(l, sp): (Literal, Span)| -> PResult<Literal> {
            match base {
                Some(b) => l.coerce(b).map_err(|e| Diagnostic::error("bad-value", e, sp)),
                None => Ok(l),
            }
        };
        if self.is_punct("{") {
            self.bump();
            let mut vs = Vec::new();
            if !self.is_punct("}") {
                vs = self.sep_list(1, |p| p.literal())?.into_iter().map(coerce).collect::<PResult<_>>()?;
            }
            self.punct("}")?;
            Ok(Restriction::Enumeration(vs))
        } else {
            let lower = coerce(self.literal()?)?;
            self.punct("..")?;
            let upper = coerce(self.literal()?)?;
            Ok(Restriction::Range { lower, upper })
        }
    }

    fn bounds(&mut self) -> PResult<(u32, Option<u32>)> {
        if self.is_word("exactly") {
            self.bump();
            let a = self.count()?;
            return Ok((a, Some(a)));
        }
        let a = self.count()?;
        self.punct("..")?;
        if self.is_punct("*") {
            self.bump();
            Ok((a, None))
        } else {
            Ok((a, Some(self.count()?)))
        }
    }

    fn statement(&mut self) -> PResult<()> {
        let start = self.span();
        let (kw, _) = self.name()?;
        if !KEYWORDS.contains(&kw.as_str()) {
            return Err(Diagnostic::error("syntax", format!("unknown statement `{kw}`"), start));
        }
        match kw.as_str() {
            "object" => {
                let (n, sp) = self.name()?;
                self.declare_type(&n, sp);
                self.model.object_types.insert(n);
            }
            "value" => {
                let (n, sp) = self.name()?;
                self.punct(":")?;
                let (b, bsp) = self.name()?;
                let base = BaseType::from_keyword(&b)
                    .ok_or_else(|| Diagnostic::error("syntax", format!("unknown base type `{b}`"), bsp))?;
                let restriction = if self.is_punct(";") { None } else { Some(self.restriction(Some(base))?) };
                self.declare_type(&n, sp);
                self.model.value_types.insert(n, ValueDomain { base, restriction });
            }
            "subtype" => {
                let (sub, _) = self.name()?;
                self.word("of")?;
                let (sup, _) = self.name()?;
                let link = SubtypeLink { sub: sub.clone(), sup: sup.clone() };
                if !self.model.subtype_links.insert(link) {
                    self.diags.push(Diagnostic::error(
                        "duplicate-name",
                        format!("subtype link `{sub}` of `{sup}` declared twice"),
                        start,
                    ));
                }
                self.model.source.subtypes.entry((sub, sup)).or_insert(start);
            }
            "fact" => self.fact(Derivation::None)?,
            "derived" => {
                self.word("fact")?;
                self.fact(Derivation::Derived)?;
            }
            "derived-stored" => {
                self.punct("(")?;
                let sp = self.span();
                let k = self.int()?;
                self.punct(")")?;
                let k = usize::try_from(k)
                    .map_err(|_| Diagnostic::error("bad-derivation", format!("result role {k} out of range"), sp))?;
                self.word("fact")?;
                self.fact(Derivation::DerivedAndStored(k))?;
            }
            _ => {
                let c = self.constraint(&kw)?;
                self.punct(";")?;
                let k = self.model.constraints.len();
                self.model.constraints.push(c);
                self.model.source.constraints.push(start);
                for (text, sp) in self.refs.drain(..) {
                    self.model.source.refs.entry((k, text)).or_insert(sp);
                }
                return Ok(());
            }
        }
        self.punct(";")
    }

    fn declare_type(&mut self, n: &str, sp: Span) {
        if self.model.object_types.contains(n) || self.model.value_types.contains_key(n) {
            self.diags.push(Diagnostic::error("duplicate-name", format!("type `{n}` declared twice"), sp));
        } else {
            self.model.source.types.insert(n.to_string(), sp);
        }
    }

    fn fact(&mut self, derivation: Derivation) -> PResult<()> {
        let (name, sp) = self.name()?;
        let reading = match self.peek().clone() {
            Tok::Label(s) => {
                self.bump();
                Some(s)
            }
            _ => None,
        };
        self.punct("(")?;
        let roles = self.sep_list(1, |p| {
            let (a, asp) = p.name()?;
            if p.is_punct(":") {
                p.bump();
                let (player, _) = p.name()?;
                Ok((Role { name: Some(a), player }, asp))
            } else {
                Ok((Role { name: None, player: a }, asp))
            }
        })?;
        self.punct(")")?;
        if self.model.fact_types.contains_key(&name) {
            self.diags.push(Diagnostic::error("duplicate-name", format!("fact type `{name}` declared twice"), sp));
            return Ok(());
        }
        for (i, (_, rsp)) in roles.iter().enumerate() {
            self.model.source.roles.insert((name.clone(), i + 1), *rsp);
        }
        self.model.source.facts.insert(name.clone(), sp);
        let roles = roles.into_iter().map(|(r, _)| r).collect();
        self.model.fact_types.insert(name.clone(), FactType { name, reading, roles, derivation });
        Ok(())
    }

    fn constraint(&mut self, kw: &str) -> PResult<OrmConstraint> {
        use OrmConstraint::*;
        Ok(match kw {
            "mandatory" | "participates" => {
                let player = self.used_name()?;
                self.word("in")?;
                let role = self.role_ref()?;
                if kw == "participates" {
                    return Ok(Participation { player, role });
                }
                if !self.is_word("or") {
                    return Ok(Mandatory { player, role });
                }
                let mut roles = vec![role];
                while self.is_word("or") {
                    self.bump();
                    roles.push(self.role_ref()?);
                }
                DisjunctiveMandatory { player, roles }
            }
            "unique" => {
                let fact = self.used_name()?;
                self.punct("(")?;
                let roles = self.sep_list(1, |p| p.used_name())?;
                self.punct(")")?;
                Uniqueness { fact, roles }
            }
            "external-unique" => {
                let target = match &self.toks[self.pos + 1..] {
                    [(Tok::Name(by), _), ..] if by == "by" => {
                        let t = self.used_name()?;
                        self.bump();
                        Some(t)
                    }
                    _ => None,
                };
                let roles = self.sep_list(2, |p| p.role_ref())?;
                ExternalUniqueness { target, roles }
            }
            "frequency" => {
                let player = self.used_name()?;
                self.word("in")?;
                let role = self.role_ref()?;
                self.punct(":")?;
                let (min, max) = self.bounds()?;
                Frequency { player, role, min, max }
            }
            "multirole-frequency" => {
                let fact = self.used_name()?;
                self.punct("(")?;
                let roles = self.sep_list(1, |p| p.used_name())?;
                self.punct(")")?;
                self.punct(":")?;
                let (min, max) = self.bounds()?;
                MultiRoleFrequency { fact, roles, min, max }
            }
            "cover" | "disjoint" => {
                let sup = self.used_name()?;
                self.word("by")?;
                let subs = self.sep_list(1, |p| p.used_name())?;
                if kw == "cover" {
                    Cover { sup, subs }
                } else {
                    Disjoint { sup, subs }
                }
            }
            "subset" => {
                let sub = self.role_or_fact()?;
                self.word("of")?;
                let sup = self.role_or_fact()?;
                Subset { sub, sup }
            }
            "equal" => {
                let left = self.role_or_fact()?;
                self.word("and")?;
                let right = self.role_or_fact()?;
                Equal { left, right }
            }
            "exclude" => Exclude { items: self.sep_list(2, |p| p.role_or_fact())? },
            "join-subset" => {
                let sub = self.jpair()?;
                self.word("of")?;
                let sup = self.jpair()?;
                JoinSubset { sub, sup }
            }
            "join-equal" | "join-exclude" => {
                let left = self.jpair()?;
                self.word("and")?;
                let right = self.jpair()?;
                if kw == "join-equal" {
                    JoinEqual { left, right }
                } else {
                    JoinExclude { left, right }
                }
            }
            "objectify" => {
                let fact = self.used_name()?;
                self.word("as")?;
                let as_type = self.used_name()?;
                Objectify { fact, as_type }
            }
            "rolevalue" => {
                let role = self.role_ref()?;
                self.punct(":")?;
                // literals are coerced once the player's base type is known
                let values = self.restriction(None)?;
                RoleValue { role, values }
            }
            "ring" => {
                let (k, ksp) = self.name()?;
                let ring = RingKind::from_keyword(&k)
                    .ok_or_else(|| Diagnostic::error("syntax", format!("unknown ring kind `{k}`"), ksp))?;
                self.word("on")?;
                let fact = self.used_name()?;
                self.punct("(")?;
                let a = self.used_name()?;
                self.punct(",")?;
                let b = self.used_name()?;
                self.punct(")")?;
                Ring { ring, fact, roles: (a, b) }
            }
            "reference" => {
                let object = self.used_name()?;
                self.word("by")?;
                let value = self.used_name()?;
                Reference { object, value }
            }
            _ => unreachable!("keyword list and dispatch agree"),
        })
    }

    /// Skip past the next `;` after an error.
    fn recover(&mut self) {
        loop {
            match self.bump().0 {
                Tok::Punct(";") | Tok::Eof => return,
                _ => {}
            }
        }
    }
}

/// Role values are written without knowing the player; coerce them to the
/// player's base type (dates are written as quoted strings).
fn coerce_role_values(m: &mut OrmModel, diags: &mut Vec<Diagnostic>) {
    for k in 0..m.constraints.len() {
        let OrmConstraint::RoleValue { role, values } = &m.constraints[k] else { continue };
        let Some(base) = m.player_of(role).and_then(|p| m.value_types.get(p)).map(|d| d.base) else { continue };
        let fix = |l: &Literal| l.clone().coerce(base);
        let fixed = match values {
            Restriction::Enumeration(vs) => vs.iter().map(fix).collect::<Result<Vec<_>, _>>().map(Restriction::Enumeration),
            Restriction::Range { lower, upper } => {
                fix(lower).and_then(|lower| fix(upper).map(|upper| Restriction::Range { lower, upper }))
            }
        };
        match fixed {
            Ok(v) => {
                if let OrmConstraint::RoleValue { values, .. } = &mut m.constraints[k] {
                    *values = v;
                }
            }
            Err(e) => diags.push(Diagnostic::error("bad-value", e, m.constraint_span(k))),
        }
    }
}

/// Parse without structural validation. Fails only on lexical and
/// syntactic errors and duplicate declarations.
pub fn parse_orm_unchecked(src: &str) -> Result<OrmModel, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let toks = lex(src, &mut diags);
    let mut p = Parser { toks, pos: 0, model: OrmModel::new(), diags, refs: Vec::new() };
    while p.peek() != &Tok::Eof {
        if p.diags.len() >= MAX_ERRORS {
            break;
        }
        p.refs.clear();
        if let Err(d) = p.statement() {
            p.diags.push(d);
            p.recover();
        }
    }
    let mut model = p.model;
    let mut diags = p.diags;
    coerce_role_values(&mut model, &mut diags);
    diags.truncate(MAX_ERRORS);
    if has_errors(&diags) {
        sort_diagnostics(&mut diags);
        return Err(diags);
    }
    Ok(model)
}

/// Parse and validate. Warnings do not cause failure; use
/// [`super::validate_model`] on the result to see them.
pub fn parse_orm(src: &str) -> Result<OrmModel, Vec<Diagnostic>> {
    let model = parse_orm_unchecked(src)?;
    let mut diags = super::validate_model(&model);
    if has_errors(&diags) {
        diags.retain(Diagnostic::is_error);
        diags.truncate(MAX_ERRORS);
        return Err(diags);
    }
    Ok(model)
}
