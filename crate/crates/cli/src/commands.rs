use std::fs;
use std::io::{BufRead, Write};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use nfr_core::diagram::{export_diagram, DiagramOptions, RankDir, View};
use nfr_core::dsl::{parse_model_bytes, parse_model_located};
use nfr_core::engine::{start_session, AnswerDraft, Session, Taxonomy};
use nfr_core::persist::{load_session, model_ref, save_session, write_atomic};
use nfr_core::report::{render_report, Format, ReportKind};
use nfr_core::{auto_number_questions, validate_with_source, Diagnostic, UseCaseModel};

use crate::interactive;
use crate::{Cli, Command, ExitStatus, Failure, FormatArg, RankDirArg, ReportArg, ViewArg};

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus {
    let result = match cli.command {
        Command::Validate { model } => validate(&model, stderr),
        Command::Elicit {
            model,
            session,
            answers,
            interactive,
        } => elicit(
            &model,
            &session,
            answers.as_deref(),
            interactive,
            cli.taxonomy.as_deref(),
            stdin,
            stdout,
            stderr,
        ),
        Command::Report {
            kind,
            session,
            format,
            output,
        } => report(kind, &session, format, output.as_deref(), stdout),
        Command::Diagram {
            model,
            session,
            view,
            rankdir,
            hide_unanswered,
            output,
        } => diagram(&model, session.as_deref(), view, rankdir, hide_unanswered, output.as_deref(), stdout),
        Command::Serve { port, data } => serve(port, data),
    };
    match result {
        Ok(()) => ExitStatus::Success,
        Err(failure) => {
            for line in &failure.lines {
                let _ = writeln!(stderr, "{line}");
            }
            failure.status
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, &e))
}

fn diagnostics_failure(diags: &[Diagnostic]) -> Failure {
    Failure {
        status: ExitStatus::Domain,
        lines: diags.iter().map(ToString::to_string).collect(),
    }
}

/// Reads a model file, fills in `NFRQ?` ids and rejects models with errors.
pub fn read_model(path: &Path) -> Result<UseCaseModel, Failure> {
    let bytes = read(path)?;
    parse_model_bytes(&bytes)
        .map(|m| auto_number_questions(&m))
        .map_err(|d| diagnostics_failure(&d))
}

fn read_taxonomy(path: Option<&Path>) -> Result<Option<Taxonomy>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let bytes = read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::domain(format!("error invalid-taxonomy {}: not UTF-8", path.display())))?;
    let names: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    Taxonomy::new(names)
        .map(Some)
        .map_err(|e| Failure::domain(format!("error {} {}: {e}", e.code(), path.display())))
}

fn session_dir(session_path: &Path) -> PathBuf {
    match session_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Loads a session file together with the model its `model_ref` names.
pub fn read_session(path: &Path) -> Result<Session, Failure> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::domain(format!("error schema-violation {}: not UTF-8", path.display())))?;
    let reference = model_ref(&text).map_err(|e| Failure::domain(format!("error {} {}: {e}", e.code(), path.display())))?;
    let model = read_model(&session_dir(path).join(&reference))?;
    load_session(&text, |_: &str| Ok::<_, std::convert::Infallible>(model))
        .map_err(|e| Failure::domain(format!("error {} {}: {e}", e.code(), path.display())))
}

fn relative_model_ref(model_path: &Path, session_path: &Path) -> Result<String, Failure> {
    let abs = |p: &Path| std::path::absolute(p).map_err(|e| Failure::io(p, &e));
    let model_abs = abs(model_path)?;
    let dir_abs = abs(&session_dir(session_path))?;
    let rel = pathdiff::diff_paths(&model_abs, &dir_abs).unwrap_or(model_abs);
    Ok(rel.to_string_lossy().replace('\\', "/"))
}

fn write_output(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Outcome {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, &e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(Path::new("<stdout>"), &e)),
    }
}

fn validate(path: &Path, stderr: &mut dyn Write) -> Outcome {
    let bytes = read(path)?;
    let text = match std::str::from_utf8(&bytes) {
        Ok(t) => t,
        Err(_) => return Err(diagnostics_failure(&parse_model_bytes(&bytes).unwrap_err())),
    };
    let located = parse_model_located(text).map_err(|d| diagnostics_failure(&d))?;
    for warning in validate_with_source(&located.model, Some(&located.source_map)) {
        let _ = writeln!(stderr, "{warning}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn elicit(
    model_path: &Path,
    session_path: &Path,
    answers: Option<&Path>,
    interactive_mode: bool,
    taxonomy_path: Option<&Path>,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Outcome {
    let model = read_model(model_path)?;
    let taxonomy = read_taxonomy(taxonomy_path)?;
    let exists = session_path.exists();
    let mut session = if exists {
        let existing = read_session(session_path)?;
        if existing.model() != &model {
            return Err(Failure::domain(format!(
                "error model-mismatch {}: session was started on a different model",
                session_path.display()
            )));
        }
        if let Some(t) = &taxonomy {
            if t != existing.taxonomy() {
                return Err(Failure::domain(format!(
                    "error taxonomy-mismatch {}: session uses a different taxonomy",
                    session_path.display()
                )));
            }
        }
        existing
    } else {
        start_session(model, taxonomy).map_err(|e| Failure::domain(format!("error {} {e}", e.code())))?
    };
    let model_ref = relative_model_ref(model_path, session_path)?;

    if let Some(path) = answers {
        session = apply_batch(session, path)?;
    }
    if interactive_mode {
        session = interactive::run(session, stdin, stdout).map_err(|e| Failure::io(Path::new("<terminal>"), &e))?;
    }

    write_atomic(session_path, save_session(&session, &model_ref).as_bytes())
        .map_err(|e| Failure::io(session_path, &e))?;
    let _ = writeln!(
        stderr,
        "{} answered, {} pending",
        session.answers().len(),
        session.pending_questions().len()
    );
    Ok(())
}

/// Applies every row or none: the first bad row aborts the whole batch.
fn apply_batch(mut session: Session, path: &Path) -> Result<Session, Failure> {
    let bytes = read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(bytes.as_slice());
    let bad_file = |msg: String| Failure::domain(format!("error bad-answers-file {}: {msg}", path.display()));
    let headers = reader.headers().map_err(|e| bad_file(e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(q_col), Some(a_col), Some(c_col)) = (column("question"), column("answer"), column("category")) else {
        return Err(bad_file("header must name question, answer and category columns".into()));
    };
    let actor_col = column("actor");
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| bad_file(format!("row {row}: {e}")))?;
        let field = |c: usize| record.get(c).unwrap_or("").to_string();
        let actor = actor_col.map(field).filter(|a| !a.trim().is_empty());
        let draft = AnswerDraft {
            question: field(q_col),
            answer: field(a_col),
            category: field(c_col),
            actor,
        };
        session = session
            .record_answer(&draft)
            .map_err(|e| Failure::domain(format!("error {} row {row}: {e}", e.code())))?;
    }
    Ok(session)
}

fn report(kind: ReportArg, session_path: &Path, format: FormatArg, output: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    let session = read_session(session_path)?;
    let kind = match kind {
        ReportArg::Table => ReportKind::Table,
        ReportArg::Checklist => ReportKind::Checklist,
        ReportArg::Coverage => ReportKind::Coverage,
    };
    let format = match format {
        FormatArg::Md => Format::Markdown,
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    write_output(output, &render_report(&session, kind, format), stdout)
}

fn diagram(
    model_path: &Path,
    session_path: Option<&Path>,
    view: ViewArg,
    rankdir: RankDirArg,
    hide_unanswered: bool,
    output: Option<&Path>,
    stdout: &mut dyn Write,
) -> Outcome {
    let view = match view {
        ViewArg::Questions => View::Questions,
        ViewArg::Categorized => View::Categorized,
    };
    if view == View::Categorized && session_path.is_none() {
        return Err(Failure::usage(
            "error usage: the categorized view needs --session <file>",
        ));
    }
    let model = read_model(model_path)?;
    let session = session_path.map(read_session).transpose()?;
    if let Some(s) = &session {
        if s.model() != &model {
            return Err(Failure::domain(
                "error model-mismatch: the session was started on a different model",
            ));
        }
    }
    let options = DiagramOptions {
        view,
        include_unanswered: !hide_unanswered,
        rankdir: match rankdir {
            RankDirArg::Lr => RankDir::LeftRight,
            RankDirArg::Tb => RankDir::TopBottom,
        },
    };
    let dot = export_diagram(&model, session.as_ref(), &options).map_err(|e| Failure::usage(format!("error usage: {e}")))?;
    write_output(output, &dot, stdout)
}

fn serve(port: u16, data: Option<PathBuf>) -> Outcome {
    let data_dir = nfr_service::resolve_data_dir(data);
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::io(Path::new("<runtime>"), &e))?;
    runtime
        .block_on(nfr_service::serve(addr, data_dir.clone()))
        .map_err(|e| Failure::io(&data_dir, &e))
}
