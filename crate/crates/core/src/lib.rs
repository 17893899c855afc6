//! Use-case models extended with numbered NFR elicitation questions.
//!
//! The crate covers the whole elicitation loop: a line-oriented DSL for the
//! model ([`dsl`]), warnings over a parsed model ([`validate`]), answer
//! sessions with a closed category taxonomy ([`engine`]) and their file form
//! ([`persist`]), the derived reports ([`report`]) and DOT diagrams
//! ([`diagram`]).

pub mod diagnostic;
pub mod diagram;
pub mod dsl;
pub mod engine;
pub mod model;
pub mod persist;
pub mod report;
pub mod suggest;
pub mod validate;

pub use diagnostic::{Diagnostic, Location, Severity};
pub use dsl::{load_model, parse_model, parse_model_bytes, parse_model_located, serialize_model, SourceMap};
pub use engine::{start_session, AnswerDraft, ElicitedNfr, EngineError, Session, Taxonomy};
pub use suggest::{suggest_category, Suggestion};
pub use model::{auto_number_questions, NfrQuestion, QuestionId, UseCaseModel};
pub use persist::{load_session, save_session, write_atomic, LoadError};
pub use validate::{validate_model, validate_with_source};
