//! DOT export of the extended use-case notation.
//!
//! Actors are plain labels, use cases ellipses. Each question adds a dashed
//! diamond with its id and a dashed box with its text, linked to the use
//! case by dashed edges. The categorized view adds a dashed box per answer
//! and a folder node per category that was elicited at least once.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::engine::Session;
use crate::model::UseCaseModel;

/// The style that draws the "dotted" parts of the notation.
pub const DOTTED: &str = "dashed";
pub const WRAP_WIDTH: usize = 32;

struct Shapes;

impl Shapes {
    const ACTOR: &'static str = "shape=plaintext";
    const USE_CASE: &'static str = "shape=ellipse";
    const QUESTION_ID: &'static str = "shape=diamond, style=dashed";
    const QUESTION_TEXT: &'static str = "shape=box, style=dashed";
    const ANSWER: &'static str = "shape=box, style=dashed";
    const CATEGORY: &'static str = "shape=folder, style=solid";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum View {
    #[default]
    Questions,
    Categorized,
}

impl FromStr for View {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "questions" => Ok(View::Questions),
            "categorized" => Ok(View::Categorized),
            other => Err(format!("unknown view `{other}` (expected questions or categorized)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankDir {
    #[default]
    LeftRight,
    TopBottom,
}

impl RankDir {
    fn as_str(self) -> &'static str {
        match self {
            RankDir::LeftRight => "LR",
            RankDir::TopBottom => "TB",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramOptions {
    pub view: View,
    pub include_unanswered: bool,
    pub rankdir: RankDir,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        Self {
            view: View::Questions,
            include_unanswered: true,
            rankdir: RankDir::LeftRight,
        }
    }
}

impl DiagramOptions {
    pub fn categorized() -> Self {
        Self {
            view: View::Categorized,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("the categorized view needs a session")]
    MissingSession,
}

pub fn export_diagram(
    model: &UseCaseModel,
    session: Option<&Session>,
    options: &DiagramOptions,
) -> Result<String, DiagramError> {
    match options.view {
        View::Questions => Ok(export_questions_diagram(model, options)),
        View::Categorized => {
            let session = session.ok_or(DiagramError::MissingSession)?;
            Ok(export_categorized_diagram(model, session, options))
        }
    }
}

pub fn export_questions_diagram(model: &UseCaseModel, options: &DiagramOptions) -> String {
    let mut g = Graph::new(model, options);
    g.base(model, |_| true);
    g.finish()
}

pub fn export_categorized_diagram(model: &UseCaseModel, session: &Session, options: &DiagramOptions) -> String {
    let mut g = Graph::new(model, options);
    let answered: HashSet<_> = session.answers().iter().map(|a| a.question_id).collect();
    let include_unanswered = options.include_unanswered;
    let questions = g.base(model, |q| include_unanswered || answered.contains(&q.id));

    let mut categories: Vec<&str> = Vec::new();
    for q in &model.questions {
        if let Some(a) = session.answer(q.id) {
            let answer_node = g.ids.allocate("ans", &q.id.to_string());
            g.node(&answer_node, Shapes::ANSWER, &a.answer);
            g.edge(&questions[&q.id.to_string()], &answer_node, true);
            if !categories.contains(&a.category.as_str()) {
                categories.push(&a.category);
            }
        }
    }
    // category nodes follow taxonomy order
    categories.sort_by_key(|c| session.taxonomy().position(c));
    let mut category_nodes = HashMap::new();
    for c in categories {
        let id = g.ids.allocate("cat", c);
        g.node(&id, Shapes::CATEGORY, c);
        category_nodes.insert(c.to_string(), id);
    }
    for q in &model.questions {
        if let Some(a) = session.answer(q.id) {
            let answer_node = g.ids.get("ans", &q.id.to_string());
            g.edge(&answer_node, &category_nodes[&a.category], true);
        }
    }
    g.finish()
}

#[derive(Default)]
struct IdAllocator {
    taken: HashSet<String>,
    by_key: HashMap<(String, String), String>,
}

impl IdAllocator {
    fn allocate(&mut self, prefix: &str, name: &str) -> String {
        let base = format!("{prefix}_{}", sanitize(name));
        let mut id = base.clone();
        let mut n = 2;
        while self.taken.contains(&id) {
            id = format!("{base}_{n}");
            n += 1;
        }
        self.taken.insert(id.clone());
        self.by_key.insert((prefix.to_string(), name.to_string()), id.clone());
        id
    }

    fn get(&self, prefix: &str, name: &str) -> String {
        self.by_key[&(prefix.to_string(), name.to_string())].clone()
    }
}

fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if s.is_empty() {
        "_".to_string()
    } else {
        s
    }
}

/// Greedy word wrap; words longer than `width` stay on their own line.
pub fn wrap(text: &str, width: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut current = String::new();
    for word in text.split_whitespace() {
        if !current.is_empty() && current.chars().count() + 1 + word.chars().count() > width {
            lines.push(std::mem::take(&mut current));
        }
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(word);
    }
    if !current.is_empty() || lines.is_empty() {
        lines.push(current);
    }
    lines
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' | '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn label(text: &str) -> String {
    wrap(text, WRAP_WIDTH)
        .iter()
        .map(|l| escape(l))
        .collect::<Vec<_>>()
        .join("\\n")
}

struct Graph {
    out: String,
    ids: IdAllocator,
}

impl Graph {
    fn new(model: &UseCaseModel, options: &DiagramOptions) -> Self {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(&model.name));
        let _ = writeln!(out, "  rankdir={};", options.rankdir.as_str());
        let _ = writeln!(out, "  edge [arrowhead=none];");
        Self {
            out,
            ids: IdAllocator::default(),
        }
    }

    fn node(&mut self, id: &str, attrs: &str, text: &str) {
        let _ = writeln!(self.out, "  \"{id}\" [{attrs}, label=\"{}\"];", label(text));
    }

    fn edge(&mut self, from: &str, to: &str, dotted: bool) {
        if dotted {
            let _ = writeln!(self.out, "  \"{from}\" -> \"{to}\" [style={DOTTED}];");
        } else {
            let _ = writeln!(self.out, "  \"{from}\" -> \"{to}\";");
        }
    }

    /// Actors, use cases, associations and the questions `keep` selects.
    /// Returns the question-text node id of every emitted question, keyed by
    /// question id.
    fn base(
        &mut self,
        model: &UseCaseModel,
        keep: impl Fn(&crate::model::NfrQuestion) -> bool,
    ) -> HashMap<String, String> {
        for a in &model.actors {
            let id = self.ids.allocate("actor", a);
            self.node(&id, Shapes::ACTOR, a);
        }
        for u in &model.use_cases {
            let id = self.ids.allocate("uc", u);
            self.node(&id, Shapes::USE_CASE, u);
        }
        let mut text_nodes = HashMap::new();
        let kept: Vec<_> = model.questions.iter().filter(|q| keep(q)).collect();
        for q in &kept {
            let qid = q.id.to_string();
            let diamond = self.ids.allocate("q", &qid);
            self.node(&diamond, Shapes::QUESTION_ID, &qid);
            let text = self.ids.allocate("qt", &qid);
            self.node(&text, Shapes::QUESTION_TEXT, &q.text);
            text_nodes.insert(qid, text);
        }
        for (a, u) in &model.associations {
            let (from, to) = (self.ids.get("actor", a), self.ids.get("uc", u));
            self.edge(&from, &to, false);
        }
        for q in &kept {
            let qid = q.id.to_string();
            let (uc, diamond) = (self.ids.get("uc", &q.use_case), self.ids.get("q", &qid));
            self.edge(&uc, &diamond, true);
            let text = text_nodes[&qid].clone();
            self.edge(&diamond, &text, true);
        }
        text_nodes
    }

    fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}
