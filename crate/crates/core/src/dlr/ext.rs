//! Extended syntax with the usual abbreviations, its expansion into core
//! constructors, and the inverse resugaring used for display.

use serde::{Deserialize, Serialize};

use super::{Component, ConceptExpr, RelationExpr, Signature};

/// A component reference as written: an index, a name, or both.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtComponent {
    pub index: Option<usize>,
    pub name: Option<String>,
}

impl ExtComponent {
    pub fn idx(i: usize) -> Self {
        ExtComponent { index: Some(i), name: None }
    }

    pub fn named(n: impl Into<String>) -> Self {
        ExtComponent { index: None, name: Some(n.into()) }
    }
}

impl From<&Component> for ExtComponent {
    fn from(c: &Component) -> Self {
        ExtComponent { index: Some(c.index), name: c.name.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtConcept {
    Top,
    Bottom,
    Atomic(String),
    Not(Box<ExtConcept>),
    And(Box<ExtConcept>, Box<ExtConcept>),
    Or(Box<ExtConcept>, Box<ExtConcept>),
    Implies(Box<ExtConcept>, Box<ExtConcept>),
    Exists(ExtComponent, Box<ExtRelation>),
    Forall(ExtComponent, Box<ExtRelation>),
    AtMost(u32, ExtComponent, Box<ExtRelation>),
    AtLeast(u32, ExtComponent, Box<ExtRelation>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtRelation {
    Top(usize),
    Atomic(String),
    /// `arity: None` is the short form (i : C).
    Select { component: ExtComponent, arity: Option<usize>, concept: Box<ExtConcept> },
    Not(Box<ExtRelation>),
    And(Box<ExtRelation>, Box<ExtRelation>),
    Or(Box<ExtRelation>, Box<ExtRelation>),
    Implies(Box<ExtRelation>, Box<ExtRelation>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("(≥0 …) has no expansion: it would need (≤-1 …)")]
    AtLeastZero,
    #[error("cannot infer the arity of short selection ({0}: …)")]
    AmbiguousArity(String),
    #[error("component `{0}` does not name a component of any relation in scope")]
    UnknownComponent(String),
    #[error("component `{0}` names different positions in the relations in scope")]
    AmbiguousComponent(String),
}

fn b<T>(x: T) -> Box<T> {
    Box::new(x)
}

impl ExtConcept {
    pub fn atomic(n: impl Into<String>) -> Self {
        ExtConcept::Atomic(n.into())
    }
    pub fn not(c: ExtConcept) -> Self {
        ExtConcept::Not(b(c))
    }
    pub fn and(x: ExtConcept, y: ExtConcept) -> Self {
        ExtConcept::And(b(x), b(y))
    }
    pub fn or(x: ExtConcept, y: ExtConcept) -> Self {
        ExtConcept::Or(b(x), b(y))
    }
    pub fn implies(x: ExtConcept, y: ExtConcept) -> Self {
        ExtConcept::Implies(b(x), b(y))
    }
    pub fn exists(c: ExtComponent, r: ExtRelation) -> Self {
        ExtConcept::Exists(c, b(r))
    }
    pub fn forall(c: ExtComponent, r: ExtRelation) -> Self {
        ExtConcept::Forall(c, b(r))
    }
    pub fn at_most(k: u32, c: ExtComponent, r: ExtRelation) -> Self {
        ExtConcept::AtMost(k, c, b(r))
    }
    pub fn at_least(k: u32, c: ExtComponent, r: ExtRelation) -> Self {
        ExtConcept::AtLeast(k, c, b(r))
    }
}

impl ExtRelation {
    pub fn atomic(n: impl Into<String>) -> Self {
        ExtRelation::Atomic(n.into())
    }
    pub fn sel(c: ExtComponent, arity: Option<usize>, concept: ExtConcept) -> Self {
        ExtRelation::Select { component: c, arity, concept: b(concept) }
    }
    pub fn not(r: ExtRelation) -> Self {
        ExtRelation::Not(b(r))
    }
    pub fn and(x: ExtRelation, y: ExtRelation) -> Self {
        ExtRelation::And(b(x), b(y))
    }
    pub fn or(x: ExtRelation, y: ExtRelation) -> Self {
        ExtRelation::Or(b(x), b(y))
    }
    pub fn implies(x: ExtRelation, y: ExtRelation) -> Self {
        ExtRelation::Implies(b(x), b(y))
    }
}

/// Atomic relations occurring at the relational level of `r` (not inside
/// selection concepts). They fix the arity and name the components.
fn anchors<'a>(r: &'a ExtRelation, out: &mut Vec<&'a str>) {
    match r {
        ExtRelation::Atomic(p) => out.push(p),
        ExtRelation::Top(_) | ExtRelation::Select { .. } => {}
        ExtRelation::Not(x) => anchors(x, out),
        ExtRelation::And(x, y) | ExtRelation::Or(x, y) | ExtRelation::Implies(x, y) => {
            anchors(x, out);
            anchors(y, out);
        }
    }
}

/// Arity of `r` when it can be read off without context.
pub fn infer_arity(r: &ExtRelation, sig: &Signature) -> Option<usize> {
    match r {
        ExtRelation::Top(n) => Some(*n),
        ExtRelation::Atomic(p) => sig.arity(p),
        ExtRelation::Select { arity, .. } => *arity,
        ExtRelation::Not(x) => infer_arity(x, sig),
        ExtRelation::And(x, y) | ExtRelation::Or(x, y) | ExtRelation::Implies(x, y) => {
            infer_arity(x, sig).or_else(|| infer_arity(y, sig))
        }
    }
}

/// Resolve a component against the relations in scope. Named components are
/// looked up in the anchor relations first, then among all relations of the
/// right arity in the signature.
pub fn resolve_component(
    c: &ExtComponent,
    scope: &[&str],
    arity: Option<usize>,
    sig: &Signature,
) -> Result<Component, ExpandError> {
    let name = match (&c.index, &c.name) {
        (Some(i), n) => return Ok(Component { index: *i, name: n.clone() }),
        (None, Some(n)) => n,
        (None, None) => return Err(ExpandError::UnknownComponent(String::new())),
    };
    let lookup = |rels: &mut dyn Iterator<Item = &super::RelationSig>| {
        let mut hits: Vec<usize> = rels.filter_map(|rs| rs.position(name)).collect();
        hits.sort_unstable();
        hits.dedup();
        hits
    };
    let mut hits = lookup(&mut scope.iter().filter_map(|p| sig.relations.get(*p)));
    if hits.is_empty() {
        hits = lookup(&mut sig.relations.values().filter(|rs| arity.map_or(true, |n| rs.arity == n)));
    }
    match hits.as_slice() {
        [i] => Ok(Component::named(*i, name.clone())),
        [] => Err(ExpandError::UnknownComponent(name.clone())),
        _ => Err(ExpandError::AmbiguousComponent(name.clone())),
    }
}

/// Expand a concept into core constructors.
pub fn expand_concept(e: &ExtConcept, sig: &Signature) -> Result<ConceptExpr, ExpandError> {
    use ExtConcept as E;
    Ok(match e {
        E::Top => ConceptExpr::Top,
        E::Bottom => ConceptExpr::not(ConceptExpr::Top),
        E::Atomic(a) => ConceptExpr::Atomic(a.clone()),
        E::Not(c) => ConceptExpr::not(expand_concept(c, sig)?),
        E::And(x, y) => ConceptExpr::and(expand_concept(x, sig)?, expand_concept(y, sig)?),
        E::Or(x, y) => or_c(expand_concept(x, sig)?, expand_concept(y, sig)?),
        E::Implies(x, y) => or_c(neg_c(expand_concept(x, sig)?), expand_concept(y, sig)?),
        E::Exists(c, r) => {
            let (c, r) = expand_scoped(c, r, sig)?;
            ConceptExpr::exists(c, r)
        }
        E::Forall(c, r) => {
            let (c, r) = expand_scoped(c, r, sig)?;
            ConceptExpr::not(ConceptExpr::exists(c, neg_r(r)))
        }
        E::AtMost(k, c, r) => {
            let (c, r) = expand_scoped(c, r, sig)?;
            ConceptExpr::at_most(*k, c, r)
        }
        E::AtLeast(0, ..) => return Err(ExpandError::AtLeastZero),
        E::AtLeast(k, c, r) => {
            let (c, r) = expand_scoped(c, r, sig)?;
            ConceptExpr::not(ConceptExpr::at_most(k - 1, c, r))
        }
    })
}

// Negations introduced by expansion cancel in pairs: every concept lies
// inside Δ and every relation expression inside its ⊤ₙ.
fn neg_c(x: ConceptExpr) -> ConceptExpr {
    match x {
        ConceptExpr::Not(inner) => *inner,
        x => ConceptExpr::not(x),
    }
}

fn neg_r(x: RelationExpr) -> RelationExpr {
    match x {
        RelationExpr::Not(inner) => *inner,
        x => RelationExpr::not(x),
    }
}

fn or_c(x: ConceptExpr, y: ConceptExpr) -> ConceptExpr {
    ConceptExpr::not(ConceptExpr::and(neg_c(x), neg_c(y)))
}

fn or_r(x: RelationExpr, y: RelationExpr) -> RelationExpr {
    RelationExpr::not(RelationExpr::and(neg_r(x), neg_r(y)))
}

fn expand_scoped(
    c: &ExtComponent,
    r: &ExtRelation,
    sig: &Signature,
) -> Result<(Component, RelationExpr), ExpandError> {
    let arity = infer_arity(r, sig);
    let mut scope = Vec::new();
    anchors(r, &mut scope);
    let comp = resolve_component(c, &scope, arity, sig)?;
    let rel = expand_rel_in(r, sig, arity, &scope)?;
    Ok((comp, rel))
}

/// Expand a relation. `context_arity` supplies n for short selections when
/// the expression itself does not determine it.
pub fn expand_relation(
    e: &ExtRelation,
    sig: &Signature,
    context_arity: Option<usize>,
) -> Result<RelationExpr, ExpandError> {
    let mut scope = Vec::new();
    anchors(e, &mut scope);
    let arity = infer_arity(e, sig).or(context_arity);
    expand_rel_in(e, sig, arity, &scope)
}

fn expand_rel_in(
    e: &ExtRelation,
    sig: &Signature,
    arity: Option<usize>,
    scope: &[&str],
) -> Result<RelationExpr, ExpandError> {
    use ExtRelation as E;
    let go = |x: &ExtRelation| expand_rel_in(x, sig, arity, scope);
    Ok(match e {
        E::Top(n) => RelationExpr::Top(*n),
        E::Atomic(p) => RelationExpr::Atomic(p.clone()),
        E::Select { component, arity: own, concept } => {
            let n = own.or(arity).ok_or_else(|| {
                ExpandError::AmbiguousArity(
                    component.name.clone().or(component.index.map(|i| i.to_string())).unwrap_or_default(),
                )
            })?;
            let comp = resolve_component(component, scope, Some(n), sig)?;
            RelationExpr::select(comp, n, expand_concept(concept, sig)?)
        }
        E::Not(x) => RelationExpr::not(go(x)?),
        E::And(x, y) => RelationExpr::and(go(x)?, go(y)?),
        E::Or(x, y) => or_r(go(x)?, go(y)?),
        E::Implies(x, y) => or_r(neg_r(go(x)?), go(y)?),
    })
}

/// Recover abbreviations from a core concept. Expanding the result gives
/// back the input exactly.
pub fn resugar_concept(c: &ConceptExpr) -> ExtConcept {
    use ConceptExpr as C;
    let not_c = |x: &C| !matches!(x, C::Not(_));
    match c {
        C::Top => ExtConcept::Top,
        C::Atomic(a) => ExtConcept::Atomic(a.clone()),
        C::And(x, y) => ExtConcept::and(resugar_concept(x), resugar_concept(y)),
        C::Exists(i, r) => ExtConcept::exists(i.into(), resugar_relation(r)),
        C::AtMost(k, i, r) => ExtConcept::at_most(*k, i.into(), resugar_relation(r)),
        C::Not(inner) => match inner.as_ref() {
            C::Top => ExtConcept::Bottom,
            C::And(x, y) => match (x.as_ref(), y.as_ref()) {
                (C::Not(a), C::Not(b)) if not_c(a) && not_c(b) => {
                    ExtConcept::or(resugar_concept(a), resugar_concept(b))
                }
                (a, C::Not(b)) if not_c(a) && not_c(b) => match resugar_concept(&C::not(a.clone())) {
                    t @ (ExtConcept::Or(..) | ExtConcept::Implies(..) | ExtConcept::Forall(..)) => {
                        ExtConcept::or(t, resugar_concept(b))
                    }
                    _ => ExtConcept::implies(resugar_concept(a), resugar_concept(b)),
                },
                _ => ExtConcept::not(resugar_concept(inner)),
            },
            C::Exists(i, r) => match r.as_ref() {
                RelationExpr::Not(s) if !matches!(s.as_ref(), RelationExpr::Not(_)) => {
                    ExtConcept::forall(i.into(), resugar_relation(s))
                }
                _ => match resugar_relation(&RelationExpr::not(r.as_ref().clone())) {
                    t @ (ExtRelation::Or(..) | ExtRelation::Implies(..)) => ExtConcept::forall(i.into(), t),
                    _ => ExtConcept::not(resugar_concept(inner)),
                },
            },
            C::AtMost(k, i, r) => ExtConcept::at_least(k + 1, i.into(), resugar_relation(r)),
            _ => ExtConcept::not(resugar_concept(inner)),
        },
    }
}

pub fn resugar_relation(r: &RelationExpr) -> ExtRelation {
    use RelationExpr as R;
    let not_r = |x: &R| !matches!(x, R::Not(_));
    match r {
        R::Top(n) => ExtRelation::Top(*n),
        R::Atomic(p) => ExtRelation::Atomic(p.clone()),
        R::Select { component, arity, concept } => {
            ExtRelation::sel(component.into(), Some(*arity), resugar_concept(concept))
        }
        R::And(x, y) => ExtRelation::and(resugar_relation(x), resugar_relation(y)),
        R::Not(inner) => match inner.as_ref() {
            R::And(x, y) => match (x.as_ref(), y.as_ref()) {
                (R::Not(a), R::Not(b)) if not_r(a) && not_r(b) => {
                    ExtRelation::or(resugar_relation(a), resugar_relation(b))
                }
                (a, R::Not(b)) if not_r(a) && not_r(b) => match resugar_relation(&R::not(a.clone())) {
                    t @ (ExtRelation::Or(..) | ExtRelation::Implies(..)) => ExtRelation::or(t, resugar_relation(b)),
                    _ => ExtRelation::implies(resugar_relation(a), resugar_relation(b)),
                },
                _ => ExtRelation::not(resugar_relation(inner)),
            },
            _ => ExtRelation::not(resugar_relation(inner)),
        },
    }
}

/// Lift a core concept into the extended syntax without resugaring.
pub fn lift_concept(c: &ConceptExpr) -> ExtConcept {
    use ConceptExpr as C;
    match c {
        C::Top => ExtConcept::Top,
        C::Atomic(a) => ExtConcept::Atomic(a.clone()),
        C::Not(x) => ExtConcept::not(lift_concept(x)),
        C::And(x, y) => ExtConcept::and(lift_concept(x), lift_concept(y)),
        C::Exists(i, r) => ExtConcept::exists(i.into(), lift_relation(r)),
        C::AtMost(k, i, r) => ExtConcept::at_most(*k, i.into(), lift_relation(r)),
    }
}

pub fn lift_relation(r: &RelationExpr) -> ExtRelation {
    use RelationExpr as R;
    match r {
        R::Top(n) => ExtRelation::Top(*n),
        R::Atomic(p) => ExtRelation::Atomic(p.clone()),
        R::Select { component, arity, concept } => {
            ExtRelation::sel(component.into(), Some(*arity), lift_concept(concept))
        }
        R::Not(x) => ExtRelation::not(lift_relation(x)),
        R::And(x, y) => ExtRelation::and(lift_relation(x), lift_relation(y)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlr::RelationSig;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_concept("A").unwrap();
        s.add_concept("C").unwrap();
        s.add_relation("P", RelationSig::named(vec![Some("r1".into()), Some("r2".into())])).unwrap();
        s
    }

    fn p() -> ExtRelation {
        ExtRelation::atomic("P")
    }

    #[test]
    fn forall_expands_to_negated_exists() {
        let e = ExtConcept::forall(ExtComponent::idx(1), p());
        let want = ConceptExpr::not(ConceptExpr::exists(
            Component::idx(1),
            RelationExpr::not(RelationExpr::atomic("P")),
        ));
        assert_eq!(expand_concept(&e, &sig()).unwrap(), want);
    }

    #[test]
    fn bottom_and_at_least() {
        assert_eq!(expand_concept(&ExtConcept::Bottom, &sig()).unwrap(), ConceptExpr::not(ConceptExpr::Top));
        let e = ExtConcept::at_least(2, ExtComponent::idx(1), p());
        let want = ConceptExpr::not(ConceptExpr::at_most(1, Component::idx(1), RelationExpr::atomic("P")));
        assert_eq!(expand_concept(&e, &sig()).unwrap(), want);
        let zero = ExtConcept::at_least(0, ExtComponent::idx(1), p());
        assert_eq!(expand_concept(&zero, &sig()), Err(ExpandError::AtLeastZero));
    }

    #[test]
    fn short_selection_takes_arity_from_context() {
        let e = ExtRelation::and(p(), ExtRelation::sel(ExtComponent::named("r2"), None, ExtConcept::atomic("A")));
        let got = expand_relation(&e, &sig(), None).unwrap();
        let want = RelationExpr::and(
            RelationExpr::atomic("P"),
            RelationExpr::select(Component::named(2, "r2"), 2, ConceptExpr::atomic("A")),
        );
        assert_eq!(got, want);
        let lone = ExtRelation::sel(ExtComponent::idx(1), None, ExtConcept::atomic("A"));
        assert!(matches!(expand_relation(&lone, &sig(), None), Err(ExpandError::AmbiguousArity(_))));
        assert!(expand_relation(&lone, &sig(), Some(3)).is_ok());
    }

    #[test]
    fn named_component_resolution() {
        let e = ExtConcept::exists(ExtComponent::named("r2"), p());
        assert_eq!(
            expand_concept(&e, &sig()).unwrap(),
            ConceptExpr::exists(Component::named(2, "r2"), RelationExpr::atomic("P"))
        );
        let bad = ExtConcept::exists(ExtComponent::named("zz"), p());
        assert!(matches!(expand_concept(&bad, &sig()), Err(ExpandError::UnknownComponent(_))));
    }

    #[test]
    fn resugar_recovers_abbreviations() {
        let s = sig();
        let cases = [
            ExtConcept::Bottom,
            ExtConcept::or(ExtConcept::atomic("A"), ExtConcept::atomic("C")),
            ExtConcept::implies(ExtConcept::atomic("A"), ExtConcept::atomic("C")),
            ExtConcept::or(
                ExtConcept::or(ExtConcept::atomic("A"), ExtConcept::atomic("C")),
                ExtConcept::atomic("A"),
            ),
            ExtConcept::forall(ExtComponent::idx(1), ExtRelation::implies(p(), ExtRelation::sel(ExtComponent::idx(2), Some(2), ExtConcept::atomic("A")))),
            ExtConcept::at_least(3, ExtComponent::idx(2), p()),
        ];
        for e in cases {
            let core = expand_concept(&e, &s).unwrap();
            assert_eq!(resugar_concept(&core), e);
            assert_eq!(expand_concept(&resugar_concept(&core), &s).unwrap(), core);
        }
    }
}
