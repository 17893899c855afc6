//! Reports derived from a session: the elicitation table, the FR × category
//! checklist and the coverage report, each renderable as CSV, Markdown or
//! JSON.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;

use crate::engine::Session;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElicitationRow {
    pub actor: String,
    pub use_case: String,
    pub question_no: String,
    pub question: String,
    pub answer: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChecklistMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<bool>>,
}

impl ChecklistMatrix {
    pub fn cell(&self, use_case: &str, category: &str) -> Option<bool> {
        let r = self.rows.iter().position(|x| x == use_case)?;
        let c = self.columns.iter().position(|x| x == category)?;
        Some(self.cells[r][c])
    }

    pub fn checked_count(&self) -> usize {
        self.cells.iter().flatten().filter(|&&b| b).count()
    }

    /// Categories checked for `use_case`, in column order.
    pub fn checked_in_row(&self, use_case: &str) -> Vec<&str> {
        let Some(r) = self.rows.iter().position(|x| x == use_case) else {
            return Vec::new();
        };
        self.columns
            .iter()
            .zip(&self.cells[r])
            .filter(|(_, &b)| b)
            .map(|(c, _)| c.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub frs_without_questions: Vec<String>,
    pub unanswered_questions: Vec<String>,
    pub unused_categories: Vec<String>,
    /// Distinct categories elicited per use case, in model order.
    pub per_fr_category_count: IndexMap<String, usize>,
}

/// One row per answered question, ordered by question number.
pub fn elicitation_table(session: &Session) -> Vec<ElicitationRow> {
    let model = session.model();
    let mut answers: Vec<_> = session.answers().iter().collect();
    answers.sort_by_key(|a| a.question_id.number());
    answers
        .into_iter()
        .filter_map(|a| {
            let q = model.question(a.question_id)?;
            Some(ElicitationRow {
                actor: a.actor.clone(),
                use_case: q.use_case.clone(),
                question_no: q.id.to_string(),
                question: q.text.clone(),
                answer: a.answer.clone(),
                category: a.category.clone(),
            })
        })
        .collect()
}

/// `cells[f][c]` is set when some answered question on use case `f` carries
/// category `c`. Rows follow the model, columns the taxonomy.
pub fn checklist_matrix(session: &Session) -> ChecklistMatrix {
    let model = session.model();
    let taxonomy = session.taxonomy();
    let rows = model.use_cases.clone();
    let columns = taxonomy.categories().to_vec();
    let mut cells = vec![vec![false; columns.len()]; rows.len()];
    for a in session.answers() {
        let Some(q) = model.question(a.question_id) else { continue };
        let (Some(r), Some(c)) = (
            rows.iter().position(|u| *u == q.use_case),
            taxonomy.position(&a.category),
        ) else {
            continue;
        };
        cells[r][c] = true;
    }
    ChecklistMatrix { rows, columns, cells }
}

pub fn coverage_report(session: &Session) -> CoverageReport {
    let model = session.model();
    let questioned: HashSet<&str> = model.questions.iter().map(|q| q.use_case.as_str()).collect();
    let used: HashSet<&str> = session.answers().iter().map(|a| a.category.as_str()).collect();
    let matrix = checklist_matrix(session);
    CoverageReport {
        frs_without_questions: model
            .use_cases
            .iter()
            .filter(|u| !questioned.contains(u.as_str()))
            .cloned()
            .collect(),
        unanswered_questions: session
            .pending_questions()
            .iter()
            .map(|q| q.id.to_string())
            .collect(),
        unused_categories: session
            .taxonomy()
            .categories()
            .iter()
            .filter(|c| !used.contains(c.as_str()))
            .cloned()
            .collect(),
        per_fr_category_count: matrix
            .rows
            .iter()
            .zip(&matrix.cells)
            .map(|(u, row)| (u.clone(), row.iter().filter(|&&b| b).count()))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            "json" | "structured" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv, md or json)")),
        }
    }
}

impl Format {
    pub fn content_type(self) -> &'static str {
        match self {
            Format::Csv => "text/csv; charset=utf-8",
            Format::Markdown => "text/markdown; charset=utf-8",
            Format::Json => "application/json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Table,
    Checklist,
    Coverage,
}

impl FromStr for ReportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportKind::Table),
            "checklist" => Ok(ReportKind::Checklist),
            "coverage" => Ok(ReportKind::Coverage),
            other => Err(format!("unknown report `{other}` (expected table, checklist or coverage)")),
        }
    }
}

/// Derives and renders one report. The CLI and the HTTP API both go
/// through here so their bytes agree.
pub fn render_report(session: &Session, kind: ReportKind, format: Format) -> String {
    match kind {
        ReportKind::Table => render(Artifact::Table(&elicitation_table(session)), format),
        ReportKind::Checklist => render(Artifact::Checklist(&checklist_matrix(session)), format),
        ReportKind::Coverage => render(Artifact::Coverage(&coverage_report(session)), format),
    }
}

/// Anything [`render`] can print.
#[derive(Debug, Clone, Copy)]
pub enum Artifact<'a> {
    Table(&'a [ElicitationRow]),
    Checklist(&'a ChecklistMatrix),
    Coverage(&'a CoverageReport),
}

pub const CHECK_MARK: &str = "\u{2713}";
const TABLE_MD_HEADER: [&str; 6] = [
    "Actor/ Stake holder",
    "Use Case (Functional Requirement)",
    "Question no",
    "Question for NFR",
    "Question Answer (Elicited NFR)",
    "Category of NFR",
];
const TABLE_CSV_HEADER: [&str; 6] = ["actor", "use_case", "question_no", "question", "answer", "category"];
const CHECKLIST_CORNER: &str = "NFR \u{2192} FR \u{2193}";

pub fn render(artifact: Artifact<'_>, format: Format) -> String {
    match (artifact, format) {
        (Artifact::Table(rows), Format::Json) => to_json(&rows),
        (Artifact::Checklist(m), Format::Json) => to_json(m),
        (Artifact::Coverage(c), Format::Json) => to_json(c),
        (Artifact::Table(rows), Format::Csv) => csv_text(
            TABLE_CSV_HEADER.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(row_cells).collect(),
        ),
        (Artifact::Table(rows), Format::Markdown) => markdown_table(
            &TABLE_MD_HEADER.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            &rows.iter().map(row_cells).collect::<Vec<_>>(),
        ),
        (Artifact::Checklist(m), Format::Csv) => {
            let (header, body) = checklist_grid(m, "use_case", "x");
            csv_text(header, body)
        }
        (Artifact::Checklist(m), Format::Markdown) => {
            let (header, body) = checklist_grid(m, CHECKLIST_CORNER, CHECK_MARK);
            markdown_table(&header, &body)
        }
        (Artifact::Coverage(c), Format::Csv) => coverage_csv(c),
        (Artifact::Coverage(c), Format::Markdown) => coverage_markdown(c),
    }
}

fn row_cells(r: &ElicitationRow) -> Vec<String> {
    vec![
        r.actor.clone(),
        r.use_case.clone(),
        r.question_no.clone(),
        r.question.clone(),
        r.answer.clone(),
        r.category.clone(),
    ]
}

fn checklist_grid(m: &ChecklistMatrix, corner: &str, mark: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let header = std::iter::once(corner.to_string()).chain(m.columns.iter().cloned()).collect();
    let body = m
        .rows
        .iter()
        .zip(&m.cells)
        .map(|(name, row)| {
            std::iter::once(name.clone())
                .chain(row.iter().map(|&b| if b { mark.to_string() } else { String::new() }))
                .collect()
        })
        .collect();
    (header, body)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

fn csv_text(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("input was UTF-8")
}

fn md_cell(s: &str) -> String {
    s.replace('\\', "\\\\").replace('|', "\\|").replace('\n', " ")
}

fn markdown_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let line = |cells: &[String]| {
        let mut l = String::from("|");
        for c in cells {
            l.push(' ');
            l.push_str(&md_cell(c));
            l.push_str(" |");
        }
        l
    };
    let _ = writeln!(out, "{}", line(header));
    let _ = writeln!(out, "{}", line(&vec!["---".to_string(); header.len()]));
    for r in rows {
        let _ = writeln!(out, "{}", line(r));
    }
    out
}

fn coverage_csv(c: &CoverageReport) -> String {
    let mut rows = Vec::new();
    for u in &c.frs_without_questions {
        rows.push(vec!["fr-without-questions".into(), u.clone(), String::new()]);
    }
    for q in &c.unanswered_questions {
        rows.push(vec!["unanswered-question".into(), q.clone(), String::new()]);
    }
    for cat in &c.unused_categories {
        rows.push(vec!["unused-category".into(), cat.clone(), String::new()]);
    }
    for (u, n) in &c.per_fr_category_count {
        rows.push(vec!["category-count".into(), u.clone(), n.to_string()]);
    }
    csv_text(vec!["kind".into(), "item".into(), "value".into()], rows)
}

fn coverage_markdown(c: &CoverageReport) -> String {
    let mut out = String::from("# Coverage report\n");
    let list = |out: &mut String, title: &str, items: &[String]| {
        let _ = write!(out, "\n## {title}\n\n");
        if items.is_empty() {
            out.push_str("_none_\n");
        }
        for i in items {
            let _ = writeln!(out, "- {}", md_cell(i));
        }
    };
    list(&mut out, "Use cases without questions", &c.frs_without_questions);
    list(&mut out, "Unanswered questions", &c.unanswered_questions);
    list(&mut out, "Unused categories", &c.unused_categories);
    out.push_str("\n## Categories elicited per use case\n\n");
    let rows: Vec<Vec<String>> = c
        .per_fr_category_count
        .iter()
        .map(|(u, n)| vec![u.clone(), n.to_string()])
        .collect();
    out.push_str(&markdown_table(&["Use case".into(), "Categories".into()], &rows));
    out
}
