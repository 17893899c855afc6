//! Elicitation sessions: a model, a closed category taxonomy and the answers
//! recorded so far. Sessions are values; every change returns a new one.

use std::collections::HashSet;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostic::{has_errors, Diagnostic};
use crate::model::{NfrQuestion, QuestionId, UseCaseModel};

pub const DEFAULT_CATEGORIES: [&str; 7] = [
    "Performance",
    "Flexibility",
    "Usability",
    "Modifiability",
    "Privacy",
    "Legal issue",
    "Security",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("model has errors: {}", .0.iter().map(|d| d.message.as_str()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Diagnostic>),
    #[error("question {0} has no number; run auto-numbering first")]
    UnnumberedQuestion(usize),
    #[error("invalid taxonomy: {0}")]
    InvalidTaxonomy(String),
    #[error("unknown question {0}")]
    UnknownQuestion(String),
    #[error("question {0} is already answered; use revise_answer")]
    AlreadyAnswered(QuestionId),
    #[error("question {0} has no answer yet; use record_answer")]
    NotAnswered(QuestionId),
    #[error("answer to {0} is blank")]
    BlankAnswer(QuestionId),
    #[error("category \"{0}\" is not in the taxonomy")]
    UnknownCategory(String),
    #[error("actor \"{0}\" is not declared in the model")]
    UnknownActor(String),
    #[error("actor \"{actor}\" is not associated with use case \"{use_case}\"")]
    ActorNotAssociated { actor: String, use_case: String },
    #[error("use case \"{0}\" has no associated actor to answer for it")]
    NoAssociatedActor(String),
    #[error("question {0} is answered more than once")]
    DuplicateAnswer(QuestionId),
}

impl EngineError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::InvalidModel(_) => "invalid-model",
            EngineError::UnnumberedQuestion(_) => "unnumbered-question",
            EngineError::InvalidTaxonomy(_) => "invalid-taxonomy",
            EngineError::UnknownQuestion(_) => "unknown-question",
            EngineError::AlreadyAnswered(_) => "already-answered",
            EngineError::NotAnswered(_) => "not-answered",
            EngineError::BlankAnswer(_) => "blank-answer",
            EngineError::UnknownCategory(_) => "unknown-category",
            EngineError::UnknownActor(_) => "unknown-actor",
            EngineError::ActorNotAssociated { .. } => "actor-not-associated",
            EngineError::NoAssociatedActor(_) => "no-associated-actor",
            EngineError::DuplicateAnswer(_) => "duplicate-answer",
        }
    }
}

/// Ordered, closed set of NFR categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Taxonomy {
    categories: Vec<String>,
}

impl Taxonomy {
    pub fn new<I, S>(categories: I) -> Result<Self, EngineError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let categories: Vec<String> = categories.into_iter().map(Into::into).collect();
        if categories.is_empty() {
            return Err(EngineError::InvalidTaxonomy("no categories".into()));
        }
        let mut seen = HashSet::new();
        for c in &categories {
            if c.trim().is_empty() {
                return Err(EngineError::InvalidTaxonomy("blank category name".into()));
            }
            if !seen.insert(c.as_str()) {
                return Err(EngineError::InvalidTaxonomy(format!("category \"{c}\" is listed twice")));
            }
        }
        Ok(Self { categories })
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn contains(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }

    pub fn position(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == category)
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

impl Default for Taxonomy {
    fn default() -> Self {
        Self {
            categories: DEFAULT_CATEGORIES.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for Taxonomy {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let categories = Vec::<String>::deserialize(deserializer)?;
        Taxonomy::new(categories).map_err(serde::de::Error::custom)
    }
}

/// One stakeholder answer to one question, with its category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElicitedNfr {
    pub question_id: QuestionId,
    pub answer: String,
    pub category: String,
    pub actor: String,
    pub recorded_at: DateTime<Utc>,
}

/// Input for recording or revising an answer. `actor: None` picks the first
/// actor associated with the question's use case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerDraft {
    pub question: String,
    pub answer: String,
    pub category: String,
    pub actor: Option<String>,
}

impl AnswerDraft {
    pub fn new(question: impl Into<String>, answer: impl Into<String>, category: impl Into<String>) -> Self {
        Self {
            question: question.into(),
            answer: answer.into(),
            category: category.into(),
            actor: None,
        }
    }

    pub fn by(mut self, actor: impl Into<String>) -> Self {
        self.actor = Some(actor.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    session_id: String,
    model: UseCaseModel,
    taxonomy: Taxonomy,
    answers: Vec<ElicitedNfr>,
}

pub fn now_utc() -> DateTime<Utc> {
    Utc::now().trunc_subsecs(0)
}

fn check_model(model: &UseCaseModel) -> Result<(), EngineError> {
    let diags = model.check();
    if has_errors(&diags) {
        return Err(EngineError::InvalidModel(diags));
    }
    if let Some(i) = model.questions.iter().position(|q| !q.id.is_numbered()) {
        return Err(EngineError::UnnumberedQuestion(i));
    }
    Ok(())
}

/// Starts an empty session. The taxonomy defaults to Performance,
/// Flexibility, Usability, Modifiability, Privacy, Legal issue, Security.
pub fn start_session(model: UseCaseModel, taxonomy: Option<Taxonomy>) -> Result<Session, EngineError> {
    check_model(&model)?;
    Ok(Session {
        session_id: uuid::Uuid::new_v4().to_string(),
        model,
        taxonomy: taxonomy.unwrap_or_default(),
        answers: Vec::new(),
    })
}

impl Session {
    /// Rebuilds a session from stored parts, re-checking every invariant.
    pub fn restore(
        session_id: String,
        model: UseCaseModel,
        taxonomy: Taxonomy,
        answers: Vec<ElicitedNfr>,
    ) -> Result<Self, EngineError> {
        check_model(&model)?;
        let mut session = Session {
            session_id,
            model,
            taxonomy,
            answers: Vec::with_capacity(answers.len()),
        };
        for a in answers {
            if session.answer(a.question_id).is_some() {
                return Err(EngineError::DuplicateAnswer(a.question_id));
            }
            let draft = AnswerDraft {
                question: a.question_id.to_string(),
                answer: a.answer,
                category: a.category,
                actor: Some(a.actor),
            };
            let checked = session.check_draft(&draft, a.recorded_at)?;
            session.answers.push(checked);
        }
        Ok(session)
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn model(&self) -> &UseCaseModel {
        &self.model
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    /// Answers in recording order.
    pub fn answers(&self) -> &[ElicitedNfr] {
        &self.answers
    }

    pub fn answer(&self, id: QuestionId) -> Option<&ElicitedNfr> {
        self.answers.iter().find(|a| a.question_id == id)
    }

    /// Model questions that have no answer yet, in declaration order.
    pub fn pending_questions(&self) -> Vec<&NfrQuestion> {
        self.model
            .questions
            .iter()
            .filter(|q| self.answer(q.id).is_none())
            .collect()
    }

    fn lookup(&self, raw: &str) -> Result<&NfrQuestion, EngineError> {
        let unknown = || EngineError::UnknownQuestion(raw.to_string());
        let id: QuestionId = raw.trim().parse().map_err(|_| unknown())?;
        self.model.question(id).filter(|q| q.id.is_numbered()).ok_or_else(unknown)
    }

    fn check_draft(&self, draft: &AnswerDraft, at: DateTime<Utc>) -> Result<ElicitedNfr, EngineError> {
        let question = self.lookup(&draft.question)?;
        if draft.answer.trim().is_empty() {
            return Err(EngineError::BlankAnswer(question.id));
        }
        if !self.taxonomy.contains(&draft.category) {
            return Err(EngineError::UnknownCategory(draft.category.clone()));
        }
        let actor = match &draft.actor {
            Some(actor) => {
                if !self.model.has_actor(actor) {
                    return Err(EngineError::UnknownActor(actor.clone()));
                }
                if !self.model.is_associated(actor, &question.use_case) {
                    return Err(EngineError::ActorNotAssociated {
                        actor: actor.clone(),
                        use_case: question.use_case.clone(),
                    });
                }
                actor.clone()
            }
            None => self
                .model
                .actors_of(&question.use_case)
                .next()
                .ok_or_else(|| EngineError::NoAssociatedActor(question.use_case.clone()))?
                .to_string(),
        };
        Ok(ElicitedNfr {
            question_id: question.id,
            answer: draft.answer.clone(),
            category: draft.category.clone(),
            actor,
            recorded_at: at.trunc_subsecs(0),
        })
    }

    pub fn record_answer(&self, draft: &AnswerDraft) -> Result<Session, EngineError> {
        self.record_answer_at(draft, now_utc())
    }

    pub fn record_answer_at(&self, draft: &AnswerDraft, at: DateTime<Utc>) -> Result<Session, EngineError> {
        let id = self.lookup(&draft.question)?.id;
        if self.answer(id).is_some() {
            return Err(EngineError::AlreadyAnswered(id));
        }
        let elicited = self.check_draft(draft, at)?;
        let mut next = self.clone();
        next.answers.push(elicited);
        Ok(next)
    }

    /// Replaces an existing answer in place; its position in recording
    /// order is kept and `recorded_at` moves to `at`.
    pub fn revise_answer(&self, draft: &AnswerDraft) -> Result<Session, EngineError> {
        self.revise_answer_at(draft, now_utc())
    }

    pub fn revise_answer_at(&self, draft: &AnswerDraft, at: DateTime<Utc>) -> Result<Session, EngineError> {
        let id = self.lookup(&draft.question)?.id;
        let slot = self
            .answers
            .iter()
            .position(|a| a.question_id == id)
            .ok_or(EngineError::NotAnswered(id))?;
        let elicited = self.check_draft(draft, at)?;
        let mut next = self.clone();
        next.answers[slot] = elicited;
        Ok(next)
    }

    /// Record when unanswered, revise otherwise.
    pub fn upsert_answer_at(&self, draft: &AnswerDraft, at: DateTime<Utc>) -> Result<Session, EngineError> {
        let id = self.lookup(&draft.question)?.id;
        if self.answer(id).is_some() {
            self.revise_answer_at(draft, at)
        } else {
            self.record_answer_at(draft, at)
        }
    }

    pub fn retract_answer(&self, question: &str) -> Result<Session, EngineError> {
        let id = self.lookup(question)?.id;
        let slot = self
            .answers
            .iter()
            .position(|a| a.question_id == id)
            .ok_or(EngineError::NotAnswered(id))?;
        let mut next = self.clone();
        next.answers.remove(slot);
        Ok(next)
    }
}
