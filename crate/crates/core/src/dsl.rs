//! The line-oriented model DSL.
//!
//! ```text
//! model "POS"
//! actor "User"
//! usecase "Search"
//! assoc "User" -> "Search"
//! question NFRQ1 on "Search": "How much time it takes to give Search result"
//! ```
//!
//! One declaration per line, `#` starts a comment line, blank lines are
//! ignored. Strings are double-quoted with `\"` and `\\` as the only escapes.
//! `NFRQ?` in place of a number leaves the id to [`auto_number_questions`].
//!
//! [`auto_number_questions`]: crate::model::auto_number_questions

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::diagnostic::{Diagnostic, Location};
use crate::model::{NfrQuestion, QuestionId, UseCaseModel};

/// Where each declaration of a parsed model came from. Indices line up with
/// the model's lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub model: Option<Location>,
    pub actors: Vec<Location>,
    pub use_cases: Vec<Location>,
    pub associations: Vec<Location>,
    pub questions: Vec<Location>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub model: UseCaseModel,
    pub source_map: SourceMap,
}

pub fn parse_model(source: &str) -> Result<UseCaseModel, Vec<Diagnostic>> {
    parse_model_located(source).map(|l| l.model)
}

/// Like [`parse_model`] but accepts arbitrary bytes; invalid UTF-8 is
/// reported at the line and column where decoding fails.
pub fn parse_model_bytes(source: &[u8]) -> Result<UseCaseModel, Vec<Diagnostic>> {
    match std::str::from_utf8(source) {
        Ok(text) => parse_model(text),
        Err(e) => {
            let valid = &source[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            // the prefix is valid UTF-8 by construction
            let column = std::str::from_utf8(&valid[line_start..])
                .map_or(1, |s| s.chars().count() + 1);
            Err(vec![Diagnostic::error(
                "invalid-utf8",
                "source is not valid UTF-8",
                Some(Location::new(line, column)),
            )])
        }
    }
}

/// Parses and then fills in `NFRQ?` placeholders. This is how model files
/// are loaded everywhere outside the parser's own tests.
pub fn load_model(source: &str) -> Result<UseCaseModel, Vec<Diagnostic>> {
    parse_model(source).map(|m| crate::model::auto_number_questions(&m))
}

pub fn parse_model_located(source: &str) -> Result<Located, Vec<Diagnostic>> {
    Parser::default().run(source)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Word(String),
    Str(String),
    Arrow,
    Colon,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Str(_) => "a string".to_string(),
            TokenKind::Arrow => "`->`".to_string(),
            TokenKind::Colon => "`:`".to_string(),
        }
    }
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            ' ' | '\t' => i += 1,
            '"' => {
                let mut value = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(Diagnostic::error(
                                "unterminated-string",
                                "string is not closed before the end of the line",
                                Some(Location::new(line_no, column)),
                            ))
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                value.push(e);
                                i += 2;
                            }
                            other => {
                                let shown = other.map_or("end of line".to_string(), |c| format!("`\\{c}`"));
                                return Err(Diagnostic::error(
                                    "invalid-escape",
                                    format!("invalid escape {shown}; only \\\" and \\\\ are allowed"),
                                    Some(Location::new(line_no, i + 1)),
                                ));
                            }
                        },
                        Some(&ch) => {
                            value.push(ch);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Str(value),
                    column,
                });
            }
            ':' => {
                tokens.push(Token {
                    kind: TokenKind::Colon,
                    column,
                });
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                tokens.push(Token {
                    kind: TokenKind::Arrow,
                    column,
                });
                i += 2;
            }
            _ => {
                let start = i;
                while i < chars.len() && !matches!(chars[i], ' ' | '\t' | '"' | ':') {
                    if chars[i] == '-' && chars.get(i + 1) == Some(&'>') {
                        break;
                    }
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Word(chars[start..i].iter().collect()),
                    column,
                });
            }
        }
    }
    Ok(tokens)
}

#[derive(Default)]
struct Parser {
    name: Option<String>,
    model: UseCaseModel,
    map: SourceMap,
    diagnostics: Vec<Diagnostic>,
    actors: HashSet<String>,
    use_cases: HashSet<String>,
    associations: HashSet<(String, String)>,
    question_ids: HashMap<u32, Location>,
    // references are resolved after the whole file is read
    pending_refs: Vec<(Location, RefKind, String)>,
}

#[derive(Clone, Copy)]
enum RefKind {
    Actor,
    UseCase,
}

/// Cursor over the tokens of one line.
struct Line<'a> {
    tokens: &'a [Token],
    pos: usize,
    line_no: usize,
    end_column: usize,
}

impl Line<'_> {
    fn location(&self) -> Location {
        let column = self.tokens.get(self.pos).map_or(self.end_column, |t| t.column);
        Location::new(self.line_no, column)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let found = self
            .tokens
            .get(self.pos)
            .map_or("end of line".to_string(), Token::describe);
        Diagnostic::error(
            "syntax-error",
            format!("expected {expected}, found {found}"),
            Some(self.location()),
        )
    }

    fn string(&mut self, what: &str) -> Result<(String, Location), Diagnostic> {
        match self.tokens.get(self.pos) {
            Some(Token {
                kind: TokenKind::Str(s),
                column,
            }) => {
                self.pos += 1;
                Ok((s.clone(), Location::new(self.line_no, *column)))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), Diagnostic> {
        match self.tokens.get(self.pos) {
            Some(t) if &t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, Location), Diagnostic> {
        match self.tokens.get(self.pos) {
            Some(Token {
                kind: TokenKind::Word(w),
                column,
            }) => {
                self.pos += 1;
                Ok((w.clone(), Location::new(self.line_no, *column)))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn finish(&self) -> Result<(), Diagnostic> {
        if self.pos < self.tokens.len() {
            Err(self.unexpected("end of line"))
        } else {
            Ok(())
        }
    }
}

impl Parser {
    fn run(mut self, source: &str) -> Result<Located, Vec<Diagnostic>> {
        let source = source.strip_prefix('\u{feff}').unwrap_or(source);
        for (idx, raw) in source.split('\n').enumerate() {
            let line_no = idx + 1;
            let text = raw.strip_suffix('\r').unwrap_or(raw);
            let trimmed = text.trim_start_matches([' ', '\t']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens = match tokenize(text, line_no) {
                Ok(t) => t,
                Err(d) => {
                    self.diagnostics.push(d);
                    continue;
                }
            };
            let mut line = Line {
                tokens: &tokens,
                pos: 0,
                line_no,
                end_column: text.chars().count() + 1,
            };
            if let Err(d) = self.declaration(&mut line) {
                self.diagnostics.push(d);
            }
        }
        self.resolve_references();
        match self.name.take() {
            None => {
                self.diagnostics.insert(
                    0,
                    Diagnostic::error(
                        "missing-model-declaration",
                        "missing model declaration",
                        Some(Location::new(1, 1)),
                    ),
                );
            }
            Some(name) => self.model.name = name,
        }
        if self.diagnostics.is_empty() {
            Ok(Located {
                model: self.model,
                source_map: self.map,
            })
        } else {
            self.diagnostics.sort_by_key(|d| d.location);
            Err(self.diagnostics)
        }
    }

    fn declaration(&mut self, line: &mut Line<'_>) -> Result<(), Diagnostic> {
        let (keyword, at) = line.word("a declaration keyword")?;
        if keyword != "model" && self.name.is_none() {
            // keep going so later lines still get checked
            self.diagnostics.push(Diagnostic::error(
                "declaration-before-model",
                format!("`{keyword}` declaration appears before the model declaration"),
                Some(at),
            ));
        }
        match keyword.as_str() {
            "model" => {
                let (name, _) = line.string("model name string")?;
                line.finish()?;
                if self.name.is_some() {
                    return Err(Diagnostic::error(
                        "duplicate-model-declaration",
                        "the model is declared more than once",
                        Some(at),
                    ));
                }
                self.name = Some(name);
                self.map.model = Some(at);
            }
            "actor" => {
                let (name, loc) = line.string("actor name string")?;
                line.finish()?;
                non_empty(&name, "actor", loc)?;
                if !self.actors.insert(name.clone()) {
                    return Err(Diagnostic::error(
                        "duplicate-actor",
                        format!("actor \"{name}\" is already declared"),
                        Some(loc),
                    ));
                }
                self.model.actors.push(name);
                self.map.actors.push(at);
            }
            "usecase" => {
                let (name, loc) = line.string("use case name string")?;
                line.finish()?;
                non_empty(&name, "use case", loc)?;
                if !self.use_cases.insert(name.clone()) {
                    return Err(Diagnostic::error(
                        "duplicate-use-case",
                        format!("use case \"{name}\" is already declared"),
                        Some(loc),
                    ));
                }
                self.model.use_cases.push(name);
                self.map.use_cases.push(at);
            }
            "assoc" => {
                let (actor, actor_loc) = line.string("actor name string")?;
                line.expect(&TokenKind::Arrow, "`->`")?;
                let (uc, uc_loc) = line.string("use case name string")?;
                line.finish()?;
                if !self.associations.insert((actor.clone(), uc.clone())) {
                    return Err(Diagnostic::error(
                        "duplicate-association",
                        format!("association \"{actor}\" -> \"{uc}\" is already declared"),
                        Some(at),
                    ));
                }
                self.pending_refs.push((actor_loc, RefKind::Actor, actor.clone()));
                self.pending_refs.push((uc_loc, RefKind::UseCase, uc.clone()));
                self.model.associations.push((actor, uc));
                self.map.associations.push(at);
            }
            "question" => {
                let (raw_id, id_loc) = line.word("question id (NFRQ<n> or NFRQ?)")?;
                let (on, on_loc) = line.word("`on`")?;
                if on != "on" {
                    return Err(Diagnostic::error(
                        "syntax-error",
                        format!("expected `on`, found `{on}`"),
                        Some(on_loc),
                    ));
                }
                let (uc, uc_loc) = line.string("use case name string")?;
                line.expect(&TokenKind::Colon, "`:`")?;
                let (text, text_loc) = line.string("question text string")?;
                line.finish()?;
                let id: QuestionId = raw_id.parse().map_err(|e: crate::model::MalformedQuestionId| {
                    Diagnostic::error("malformed-question-id", e.to_string(), Some(id_loc))
                })?;
                if text.trim().is_empty() {
                    return Err(Diagnostic::error(
                        "empty-question-text",
                        format!("question {id} has no text"),
                        Some(text_loc),
                    ));
                }
                if let QuestionId::Numbered(n) = id {
                    if let Some(first) = self.question_ids.get(&n) {
                        return Err(Diagnostic::error(
                            "duplicate-question-id",
                            format!("question id {id} is already used on line {}", first.line),
                            Some(id_loc),
                        ));
                    }
                    self.question_ids.insert(n, id_loc);
                }
                self.pending_refs.push((uc_loc, RefKind::UseCase, uc.clone()));
                self.model.questions.push(NfrQuestion::new(id, uc, text));
                self.map.questions.push(at);
            }
            other => {
                return Err(Diagnostic::error(
                    "syntax-error",
                    format!("unknown declaration `{other}`"),
                    Some(at),
                ))
            }
        }
        Ok(())
    }

    fn resolve_references(&mut self) {
        for (loc, kind, name) in std::mem::take(&mut self.pending_refs) {
            match kind {
                RefKind::Actor if !self.actors.contains(&name) => {
                    self.diagnostics.push(Diagnostic::error(
                        "undeclared-actor",
                        format!("actor \"{name}\" is not declared"),
                        Some(loc),
                    ))
                }
                RefKind::UseCase if !self.use_cases.contains(&name) => {
                    self.diagnostics.push(Diagnostic::error(
                        "undeclared-use-case",
                        format!("use case \"{name}\" is not declared"),
                        Some(loc),
                    ))
                }
                _ => {}
            }
        }
    }
}

fn non_empty(name: &str, what: &str, loc: Location) -> Result<(), Diagnostic> {
    if name.is_empty() {
        Err(Diagnostic::error(
            "empty-name",
            format!("{what} name must not be empty"),
            Some(loc),
        ))
    } else {
        Ok(())
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Canonical text: model, actors, use cases, associations, questions, one
/// declaration per line, LF endings.
pub fn serialize_model(model: &UseCaseModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", quote(&model.name));
    for actor in &model.actors {
        let _ = writeln!(out, "actor {}", quote(actor));
    }
    for uc in &model.use_cases {
        let _ = writeln!(out, "usecase {}", quote(uc));
    }
    for (actor, uc) in &model.associations {
        let _ = writeln!(out, "assoc {} -> {}", quote(actor), quote(uc));
    }
    for q in &model.questions {
        let _ = writeln!(out, "question {} on {}: {}", q.id, quote(&q.use_case), quote(&q.text));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(src: &str) -> Vec<String> {
        parse_model(src).unwrap_err().into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn parses_minimal_model() {
        let src = "model \"POS\"\nactor \"User\"\nusecase \"Search\"\nassoc \"User\" -> \"Search\"\nquestion NFRQ1 on \"Search\": \"How much time it takes to give Search result\"";
        let m = parse_model(src).unwrap();
        assert_eq!(m.name, "POS");
        assert_eq!(m.actors, ["User"]);
        assert_eq!(m.use_cases, ["Search"]);
        assert_eq!(m.associations, [("User".to_string(), "Search".to_string())]);
        assert_eq!(m.questions.len(), 1);
        assert_eq!(m.questions[0].id, QuestionId::Numbered(1));
        assert_eq!(m.questions[0].text, "How much time it takes to give Search result");
    }

    #[test]
    fn empty_input_has_no_model() {
        let diags = parse_model("").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "missing-model-declaration");
        assert_eq!(diags[0].message, "missing model declaration");
        assert_eq!(codes("# only a comment\n\n"), ["missing-model-declaration"]);
    }

    #[test]
    fn dangling_question_target() {
        let diags = parse_model("model \"m\"\nquestion NFRQ1 on \"Ghost\": \"q?\"").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "undeclared-use-case");
        assert_eq!(diags[0].location, Some(Location::new(2, 19)));
    }

    #[test]
    fn forward_references_resolve() {
        let m = parse_model("model \"m\"\nassoc \"A\" -> \"U\"\nactor \"A\"\nusecase \"U\"\n").unwrap();
        assert_eq!(m.associations.len(), 1);
    }

    #[test]
    fn duplicates_rejected() {
        assert_eq!(codes("model \"m\"\nactor \"A\"\nactor \"A\"\n"), ["duplicate-actor"]);
        assert_eq!(codes("model \"m\"\nusecase \"U\"\nusecase \"U\""), ["duplicate-use-case"]);
        assert_eq!(
            codes("model \"m\"\nusecase \"U\"\nquestion NFRQ1 on \"U\": \"a\"\nquestion NFRQ1 on \"U\": \"b\""),
            ["duplicate-question-id"]
        );
        assert_eq!(codes("model \"a\"\nmodel \"b\""), ["duplicate-model-declaration"]);
    }

    #[test]
    fn case_sensitive_names() {
        let m = parse_model("model \"m\"\nactor \"User\"\nactor \"user\"\n").unwrap();
        assert_eq!(m.actors.len(), 2);
        assert_eq!(codes("model \"m\"\nactor \"User\"\nusecase \"U\"\nassoc \"Use\" -> \"U\""), ["undeclared-actor"]);
    }

    #[test]
    fn malformed_ids() {
        for id in ["NFRQ0", "NFRQ01", "Q1", "NFRQx"] {
            let src = format!("model \"m\"\nusecase \"U\"\nquestion {id} on \"U\": \"q\"");
            assert_eq!(codes(&src), ["malformed-question-id"], "{id}");
        }
        let m = parse_model("model \"m\"\nusecase \"U\"\nquestion NFRQ? on \"U\": \"q\"").unwrap();
        assert_eq!(m.questions[0].id, QuestionId::Unnumbered);
    }

    #[test]
    fn syntax_errors_have_locations() {
        let diags = parse_model("model \"m\"\nactor User\n").unwrap_err();
        assert_eq!(diags[0].code, "syntax-error");
        assert_eq!(diags[0].location, Some(Location::new(2, 7)));
        assert_eq!(codes("model \"m\"\nactor \"A"), ["unterminated-string"]);
        assert_eq!(codes("model \"m\"\nactor \"A\\n\""), ["invalid-escape"]);
        assert_eq!(codes("model \"m\"\nfoo \"A\""), ["syntax-error"]);
        assert_eq!(codes("model \"m\"\nactor \"A\" # trailing"), ["syntax-error"]);
        assert_eq!(codes("actor \"A\"\nmodel \"m\""), ["declaration-before-model"]);
        assert_eq!(codes("model \"m\"\nusecase \"U\"\nquestion NFRQ1 on \"U\": \"  \""), ["empty-question-text"]);
        assert_eq!(codes("model \"m\"\nusecase \"\""), ["empty-name"]);
    }

    #[test]
    fn collects_every_error() {
        let diags = parse_model("model \"m\"\nactor A\nusecase \"U\"\nusecase \"U\"\nassoc \"X\" -> \"U\"").unwrap_err();
        let codes: Vec<_> = diags.iter().map(|d| d.code.as_str()).collect();
        assert_eq!(codes, ["syntax-error", "duplicate-use-case", "undeclared-actor"]);
    }

    #[test]
    fn crlf_tabs_and_comments() {
        let src = "# header\r\nmodel\t\"m\"\r\n\r\n  actor \"A\"\r\nusecase \"U\"\r\nassoc \"A\"->\"U\"\r\n";
        let m = parse_model(src).unwrap();
        assert_eq!(m.actors, ["A"]);
        assert_eq!(m.associations.len(), 1);
    }

    #[test]
    fn invalid_utf8_is_located() {
        let diags = parse_model_bytes(b"model \"m\"\nactor \"\xff\"").unwrap_err();
        assert_eq!(diags[0].code, "invalid-utf8");
        assert_eq!(diags[0].location, Some(Location::new(2, 8)));
    }

    #[test]
    fn escapes_round_trip() {
        let mut m = UseCaseModel::new("a \"quoted\" \\ name");
        m.use_cases.push("U".into());
        m.questions.push(NfrQuestion::new(QuestionId::Numbered(1), "U", "say \"hi\"?"));
        let text = serialize_model(&m);
        assert!(text.contains(r#"question NFRQ1 on "U": "say \"hi\"?""#));
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn source_map_tracks_lines() {
        let located = parse_model_located("model \"m\"\n\nusecase \"A\"\n# c\nusecase \"B\"\n").unwrap();
        assert_eq!(located.source_map.use_cases, [Location::new(3, 1), Location::new(5, 1)]);
    }
}
