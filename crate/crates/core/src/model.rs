//! Domain types for a use-case model with attached NFR questions.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::diagnostic::Diagnostic;

const QID_PREFIX: &str = "NFRQ";

/// Identifier of an elicitation question: `NFRQ<n>` with `n >= 1`, or the
/// `NFRQ?` placeholder for questions authored without a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuestionId {
    Numbered(u32),
    Unnumbered,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed question id `{0}`: expected NFRQ<n> with n >= 1 and no leading zeros")]
pub struct MalformedQuestionId(pub String);

impl QuestionId {
    pub fn number(self) -> Option<u32> {
        match self {
            QuestionId::Numbered(n) => Some(n),
            QuestionId::Unnumbered => None,
        }
    }

    pub fn is_numbered(self) -> bool {
        matches!(self, QuestionId::Numbered(_))
    }
}

impl FromStr for QuestionId {
    type Err = MalformedQuestionId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || MalformedQuestionId(s.to_string());
        let digits = s.strip_prefix(QID_PREFIX).ok_or_else(malformed)?;
        if digits == "?" {
            return Ok(QuestionId::Unnumbered);
        }
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0')
        {
            return Err(malformed());
        }
        digits.parse::<u32>().map(QuestionId::Numbered).map_err(|_| malformed())
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuestionId::Numbered(n) => write!(f, "{QID_PREFIX}{n}"),
            QuestionId::Unnumbered => write!(f, "{QID_PREFIX}?"),
        }
    }
}

impl Serialize for QuestionId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuestionId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfrQuestion {
    pub id: QuestionId,
    pub use_case: String,
    pub text: String,
}

impl NfrQuestion {
    pub fn new(id: QuestionId, use_case: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id,
            use_case: use_case.into(),
            text: text.into(),
        }
    }
}

/// Actors, use cases (functional requirements), the associations between
/// them and the NFR questions attached to use cases. All lists keep
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UseCaseModel {
    pub name: String,
    pub actors: Vec<String>,
    pub use_cases: Vec<String>,
    pub associations: Vec<(String, String)>,
    pub questions: Vec<NfrQuestion>,
}

impl UseCaseModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn has_actor(&self, actor: &str) -> bool {
        self.actors.iter().any(|a| a == actor)
    }

    pub fn has_use_case(&self, use_case: &str) -> bool {
        self.use_cases.iter().any(|u| u == use_case)
    }

    pub fn question(&self, id: QuestionId) -> Option<&NfrQuestion> {
        self.questions.iter().find(|q| q.id == id)
    }

    pub fn is_associated(&self, actor: &str, use_case: &str) -> bool {
        self.associations
            .iter()
            .any(|(a, u)| a == actor && u == use_case)
    }

    /// Actors associated with `use_case`, in association declaration order.
    pub fn actors_of<'a>(&'a self, use_case: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.associations
            .iter()
            .filter(move |(_, u)| u == use_case)
            .map(|(a, _)| a.as_str())
    }

    pub fn questions_on<'a>(&'a self, use_case: &'a str) -> impl Iterator<Item = &'a NfrQuestion> + 'a {
        self.questions.iter().filter(move |q| q.use_case == use_case)
    }

    /// Checks the structural invariants and returns one error diagnostic per
    /// violation. The parser reports the same conditions with source
    /// locations; this is for models assembled in code or loaded from JSON.
    pub fn check(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for actor in &self.actors {
            if !seen.insert(actor.as_str()) {
                out.push(Diagnostic::error(
                    "duplicate-actor",
                    format!("actor \"{actor}\" is declared more than once"),
                    None,
                ));
            }
        }
        let mut seen = HashSet::new();
        for uc in &self.use_cases {
            if !seen.insert(uc.as_str()) {
                out.push(Diagnostic::error(
                    "duplicate-use-case",
                    format!("use case \"{uc}\" is declared more than once"),
                    None,
                ));
            }
        }
        let mut seen = HashSet::new();
        for (actor, uc) in &self.associations {
            if !self.has_actor(actor) {
                out.push(Diagnostic::error(
                    "undeclared-actor",
                    format!("association references undeclared actor \"{actor}\""),
                    None,
                ));
            }
            if !self.has_use_case(uc) {
                out.push(Diagnostic::error(
                    "undeclared-use-case",
                    format!("association references undeclared use case \"{uc}\""),
                    None,
                ));
            }
            if !seen.insert((actor.as_str(), uc.as_str())) {
                out.push(Diagnostic::error(
                    "duplicate-association",
                    format!("association \"{actor}\" -> \"{uc}\" is declared more than once"),
                    None,
                ));
            }
        }
        let mut seen = HashSet::new();
        for q in &self.questions {
            if !self.has_use_case(&q.use_case) {
                out.push(Diagnostic::error(
                    "undeclared-use-case",
                    format!("question {} targets undeclared use case \"{}\"", q.id, q.use_case),
                    None,
                ));
            }
            if q.text.trim().is_empty() {
                out.push(Diagnostic::error(
                    "empty-question-text",
                    format!("question {} has no text", q.id),
                    None,
                ));
            }
            if q.id.is_numbered() && !seen.insert(q.id) {
                out.push(Diagnostic::error(
                    "duplicate-question-id",
                    format!("question id {} is used more than once", q.id),
                    None,
                ));
            }
        }
        out
    }
}

/// Replaces every `NFRQ?` placeholder with the next number after the
/// highest numbered id, in declaration order. Numbered ids are kept.
pub fn auto_number_questions(model: &UseCaseModel) -> UseCaseModel {
    let mut next = model
        .questions
        .iter()
        .filter_map(|q| q.id.number())
        .max()
        .unwrap_or(0);
    let mut out = model.clone();
    for q in &mut out.questions {
        if q.id == QuestionId::Unnumbered {
            next += 1;
            q.id = QuestionId::Numbered(next);
        }
    }
    out
}
