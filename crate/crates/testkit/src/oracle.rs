use nfr_core::Session;

/// Checklist by direct scan: for every (use case, category) cell, look
/// through all answers for one whose question sits on that use case.
pub fn checklist(session: &Session) -> Vec<Vec<bool>> {
    let model = session.model();
    model
        .use_cases
        .iter()
        .map(|uc| {
            session
                .taxonomy()
                .categories()
                .iter()
                .map(|cat| {
                    session.answers().iter().any(|a| {
                        a.category == *cat
                            && model
                                .questions
                                .iter()
                                .any(|q| q.id == a.question_id && q.use_case == *uc)
                    })
                })
                .collect()
        })
        .collect()
}

pub fn checked(cells: &[Vec<bool>]) -> usize {
    cells.iter().flatten().filter(|&&c| c).count()
}

/// Cells that differ between two grids of the same shape, as (row, column).
pub fn changed_cells(before: &[Vec<bool>], after: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, (a, b)) in before.iter().zip(after).enumerate() {
        for (c, (x, y)) in a.iter().zip(b).enumerate() {
            if x != y {
                out.push((r, c));
            }
        }
    }
    out
}
