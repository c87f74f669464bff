//! Human-readable DL notation. Expressions are resugared first, so stored
//! core forms print with ⊔, ⇒, ∀, ≥ and ⊥ where they apply.

use std::fmt::Write;

use super::ext::{resugar_concept, resugar_relation, ExtComponent, ExtConcept, ExtRelation};
use super::{Axiom, ConceptExpr, KnowledgeBase, RelationExpr};

fn comp(c: &ExtComponent) -> String {
    match (&c.name, c.index) {
        (Some(n), _) => n.clone(),
        (None, Some(i)) => i.to_string(),
        (None, None) => "?".into(),
    }
}

fn has_anchor(r: &ExtRelation) -> bool {
    match r {
        ExtRelation::Atomic(_) | ExtRelation::Top(_) => true,
        ExtRelation::Select { .. } => false,
        ExtRelation::Not(x) => has_anchor(x),
        ExtRelation::And(x, y) | ExtRelation::Or(x, y) | ExtRelation::Implies(x, y) => {
            has_anchor(x) || has_anchor(y)
        }
    }
}

fn concept_is_binary(c: &ExtConcept) -> bool {
    matches!(c, ExtConcept::And(..) | ExtConcept::Or(..) | ExtConcept::Implies(..))
}

fn relation_is_binary(r: &ExtRelation) -> bool {
    matches!(r, ExtRelation::And(..) | ExtRelation::Or(..) | ExtRelation::Implies(..))
}

fn paren_if(s: String, cond: bool) -> String {
    if cond {
        format!("({s})")
    } else {
        s
    }
}

fn ext_concept(c: &ExtConcept) -> String {
    use ExtConcept as E;
    match c {
        E::Top => "⊤".into(),
        E::Bottom => "⊥".into(),
        E::Atomic(a) => a.clone(),
        E::Not(x) => format!("¬{}", paren_if(ext_concept(x), concept_is_binary(x))),
        E::And(x, y) => format!(
            "{} ⊓ {}",
            paren_if(ext_concept(x), matches!(**x, E::Or(..) | E::Implies(..))),
            paren_if(ext_concept(y), concept_is_binary(y))
        ),
        E::Or(x, y) => format!(
            "{} ⊔ {}",
            paren_if(ext_concept(x), matches!(**x, E::And(..) | E::Implies(..))),
            paren_if(ext_concept(y), concept_is_binary(y))
        ),
        E::Implies(x, y) => format!(
            "{} ⇒ {}",
            paren_if(ext_concept(x), concept_is_binary(x)),
            paren_if(ext_concept(y), concept_is_binary(y))
        ),
        E::Exists(i, r) => format!("∃[{}]{}", comp(i), scoped(r)),
        E::Forall(i, r) => format!("∀[{}]{}", comp(i), scoped(r)),
        E::AtMost(k, i, r) => format!("(≤{k}[{}]{})", comp(i), scoped(r)),
        E::AtLeast(k, i, r) => format!("(≥{k}[{}]{})", comp(i), scoped(r)),
    }
}

fn scoped(r: &ExtRelation) -> String {
    paren_if(ext_relation(r, has_anchor(r)), relation_is_binary(r))
}

fn ext_relation(r: &ExtRelation, anchored: bool) -> String {
    use ExtRelation as E;
    let go = |x: &ExtRelation| ext_relation(x, anchored);
    match r {
        E::Top(n) => format!("⊤{n}"),
        E::Atomic(p) => p.clone(),
        E::Select { component, arity, concept } => match arity {
            Some(n) if !anchored => format!("({}/{n}:{})", comp(component), ext_concept(concept)),
            _ => format!("({}:{})", comp(component), ext_concept(concept)),
        },
        E::Not(x) => format!("¬{}", paren_if(go(x), relation_is_binary(x))),
        E::And(x, y) => format!(
            "{} ⊓ {}",
            paren_if(go(x), matches!(**x, E::Or(..) | E::Implies(..))),
            paren_if(go(y), relation_is_binary(y))
        ),
        E::Or(x, y) => format!(
            "{} ⊔ {}",
            paren_if(go(x), matches!(**x, E::And(..) | E::Implies(..))),
            paren_if(go(y), relation_is_binary(y))
        ),
        E::Implies(x, y) => format!(
            "{} ⇒ {}",
            paren_if(go(x), relation_is_binary(x)),
            paren_if(go(y), relation_is_binary(y))
        ),
    }
}

pub fn concept_dl(c: &ConceptExpr) -> String {
    ext_concept(&resugar_concept(c))
}

pub fn relation_dl(r: &RelationExpr) -> String {
    let e = resugar_relation(r);
    ext_relation(&e, has_anchor(&e))
}

pub fn axiom_dl(ax: &Axiom) -> String {
    match ax {
        Axiom::ConceptIncl { lhs, rhs } => format!("{} ⊑ {}", concept_dl(lhs), concept_dl(rhs)),
        Axiom::RelationIncl { lhs, rhs } => {
            let (l, r) = (resugar_relation(lhs), resugar_relation(rhs));
            let anchored = has_anchor(&l) || has_anchor(&r);
            format!("{} ⊑ {}", ext_relation(&l, anchored), ext_relation(&r, anchored))
        }
        Axiom::Id { concept, parts } => {
            let ps: Vec<String> = parts.iter().map(|(i, p)| format!("[{i}]{p}")).collect();
            format!("(id {concept} {})", ps.join(", "))
        }
        Axiom::Fd { relation, sources, target } => {
            let ss: Vec<String> = sources.iter().map(|i| i.to_string()).collect();
            format!("(fd {relation} {} → {target})", ss.join(", "))
        }
    }
}

/// One line per value-domain annotation, then one line per axiom.
pub fn kb_dl(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for (name, dom) in &kb.signature.value_domains {
        let _ = writeln!(out, "{name} : {dom}");
    }
    for ax in &kb.axioms {
        let _ = writeln!(out, "{}", axiom_dl(ax));
    }
    out
}
