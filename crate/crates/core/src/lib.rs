//! ORM2⁻ to DLR_ifd compiler core: syntax and semantics of both languages,
//! the rule-by-rule translation, and bounded model search on both sides.

pub mod diag;
pub mod sat;
pub mod semantics;
pub mod dlr;
pub mod orm;
pub mod translate;
pub mod crosscheck;
pub mod value;

pub use diag::{Diagnostic, Severity, Span};
pub use dlr::{Axiom, Component, ConceptExpr, KnowledgeBase, RelationExpr, RelationSig, Signature};
pub use value::{BaseType, Literal, Restriction, ValueDomain};
pub use orm::{parse_orm, serialize_orm, validate_model, OrmConstraint, OrmModel};
pub use translate::{explain, fresh_symbol, translate, TranslateError, TranslateOptions, TranslationReport};
pub use crosscheck::{cross_check, orm_satisfiable_bounded, satisfies_orm, CrossConfig, CrossReport, OrmInterpretation};
pub use semantics::{concept_satisfiable_bounded, kb_satisfiable_bounded, SatResult, SearchConfig, TopMode};
