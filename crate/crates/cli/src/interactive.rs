//! Terminal prompts for `elicit --interactive`.

use std::io::{self, BufRead, Write};

use nfr_core::engine::{AnswerDraft, Session};
use nfr_core::suggest_category;

fn read_line(input: &mut dyn BufRead) -> io::Result<Option<String>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim_end_matches(['\r', '\n']).to_string()))
}

/// Walks the pending questions in order. A blank answer skips a question,
/// end of input stops early and keeps what was recorded so far.
pub fn run(mut session: Session, input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<Session> {
    let pending: Vec<_> = session.pending_questions().into_iter().cloned().collect();
    if pending.is_empty() {
        writeln!(out, "no pending questions")?;
        return Ok(session);
    }
    for q in pending {
        writeln!(out, "[{}] {}: {}", q.id, q.use_case, q.text)?;
        write!(out, "answer (blank to skip): ")?;
        out.flush()?;
        let Some(answer) = read_line(input)? else { break };
        if answer.trim().is_empty() {
            continue;
        }
        let ranked = suggest_category(&answer, session.taxonomy());
        for (i, s) in ranked.iter().enumerate() {
            let marker = if i == 0 && s.score > 0.0 { "  (suggested)" } else { "" };
            writeln!(out, "  {}. {}{marker}", i + 1, s.category)?;
        }
        let category = loop {
            write!(out, "category [1-{}]: ", ranked.len())?;
            out.flush()?;
            let Some(choice) = read_line(input)? else { return Ok(session) };
            match choice.trim().parse::<usize>() {
                Ok(n) if (1..=ranked.len()).contains(&n) => break ranked[n - 1].category.clone(),
                _ => writeln!(out, "enter a number between 1 and {}", ranked.len())?,
            }
        };
        match session.record_answer(&AnswerDraft::new(q.id.to_string(), answer, category)) {
            Ok(next) => session = next,
            Err(e) => writeln!(out, "error {}: {e}", e.code())?,
        }
    }
    Ok(session)
}
