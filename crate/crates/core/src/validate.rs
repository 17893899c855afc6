//! Completeness warnings over a parsed model.

use std::collections::HashSet;

use crate::diagnostic::Diagnostic;
use crate::dsl::SourceMap;
use crate::model::UseCaseModel;

pub const FR_WITHOUT_NFRQ: &str = "fr-without-nfrq";
pub const UNASSOCIATED_USE_CASE: &str = "unassociated-use-case";
pub const IDLE_ACTOR: &str = "idle-actor";

/// Warnings for use cases without questions, use cases without actors and
/// actors without use cases. Ordered by declaration, then by code.
pub fn validate_model(model: &UseCaseModel) -> Vec<Diagnostic> {
    validate_with_source(model, None)
}

/// [`validate_model`] with locations taken from `source_map`, when the model
/// came from [`crate::dsl::parse_model_located`].
pub fn validate_with_source(model: &UseCaseModel, source_map: Option<&SourceMap>) -> Vec<Diagnostic> {
    let associated_actors: HashSet<&str> = model.associations.iter().map(|(a, _)| a.as_str()).collect();
    let associated_ucs: HashSet<&str> = model.associations.iter().map(|(_, u)| u.as_str()).collect();
    let questioned: HashSet<&str> = model.questions.iter().map(|q| q.use_case.as_str()).collect();

    let mut out = Vec::new();
    for (i, actor) in model.actors.iter().enumerate() {
        if !associated_actors.contains(actor.as_str()) {
            let loc = source_map.and_then(|m| m.actors.get(i).copied());
            out.push(Diagnostic::warning(
                IDLE_ACTOR,
                format!("actor \"{actor}\" is not associated with any use case"),
                loc,
            ));
        }
    }
    for (i, uc) in model.use_cases.iter().enumerate() {
        let loc = source_map.and_then(|m| m.use_cases.get(i).copied());
        if !questioned.contains(uc.as_str()) {
            out.push(Diagnostic::warning(
                FR_WITHOUT_NFRQ,
                format!("use case \"{uc}\" has no NFR question"),
                loc,
            ));
        }
        if !associated_ucs.contains(uc.as_str()) {
            out.push(Diagnostic::warning(
                UNASSOCIATED_USE_CASE,
                format!("use case \"{uc}\" has no associated actor"),
                loc,
            ));
        }
    }
    if source_map.is_some() {
        // stable: entries without a location keep their relative order
        out.sort_by(|a, b| match (a.location, b.location) {
            (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.code.cmp(&b.code)),
            _ => std::cmp::Ordering::Equal,
        });
    }
    out
}
