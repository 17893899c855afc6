use nfr_core::report::{checklist_matrix, coverage_report, elicitation_table, render_report, Format, ReportKind};
use nfr_core::{load_session, parse_model, parse_model_bytes, save_session, serialize_model, Severity};
use nfr_testkit::gen::{self, ModelLimits};
use nfr_testkit::oracle;
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

proptest! {
    #![proptest_config(cases(500))]

    #[test]
    fn parse_of_serialize_is_identity(model in gen::model(ModelLimits::default())) {
        let text = serialize_model(&model);
        let parsed = parse_model(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
        prop_assert_eq!(&parsed, &model);
        prop_assert_eq!(serialize_model(&parsed), text);
    }

    #[test]
    fn crlf_and_comments_do_not_change_the_model(model in gen::model(ModelLimits::default())) {
        let text = serialize_model(&model)
            .lines()
            .flat_map(|l| ["# note".to_string(), format!("  {l}\t")])
            .collect::<Vec<_>>()
            .join("\r\n");
        prop_assert_eq!(parse_model(&text).unwrap(), model);
    }

    #[test]
    fn load_of_save_is_identity(session in gen::session(ModelLimits::default(), 60)) {
        let text = save_session(&session, "model.ucm");
        let loaded = load_session(&text, |r: &str| {
            assert_eq!(r, "model.ucm");
            Ok::<_, String>(session.model().clone())
        })
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&loaded, &session);
        prop_assert_eq!(save_session(&loaded, "model.ucm"), text);
    }
}

proptest! {
    #![proptest_config(cases(1000))]

    #[test]
    fn checklist_matches_scan_oracle_and_moves_monotonically(
        (model, taxonomy, ops) in gen::script(ModelLimits::default(), 60)
    ) {
        let states = gen::run_script(model, taxonomy, &ops);
        for pair in states.windows(2) {
            let (before, after) = (&pair[0], &pair[1]);
            let (old, new) = (oracle::checklist(before), oracle::checklist(after));
            prop_assert_eq!(&checklist_matrix(after).cells, &new);

            let grew = after.answers().len() > before.answers().len();
            let shrank = after.answers().len() < before.answers().len();
            let changed = oracle::changed_cells(&old, &new);
            if grew {
                // a record only ever sets cells, and at most one
                prop_assert!(changed.len() <= 1);
                prop_assert!(changed.iter().all(|&(r, c)| new[r][c]));
            } else if shrank {
                prop_assert!(changed.len() <= 1);
                prop_assert!(changed.iter().all(|&(r, c)| !new[r][c]));
            } else {
                // a revision touches only the revised question's row
                prop_assert!(changed.len() <= 2);
                let rows: std::collections::BTreeSet<_> = changed.iter().map(|&(r, _)| r).collect();
                prop_assert!(rows.len() <= 1);
            }
        }
    }

    #[test]
    fn pending_plus_answered_is_all_questions(
        (model, taxonomy, ops) in gen::script(ModelLimits::default(), 60)
    ) {
        for s in gen::run_script(model, taxonomy, &ops) {
            prop_assert_eq!(s.pending_questions().len() + s.answers().len(), s.model().questions.len());
            for q in s.pending_questions() {
                prop_assert!(s.answer(q.id).is_none());
            }
        }
    }
}

proptest! {
    #![proptest_config(cases(300))]

    #[test]
    fn row_and_column_counts_agree(session in gen::session(ModelLimits::default(), 60)) {
        let matrix = checklist_matrix(&session);
        let coverage = coverage_report(&session);
        prop_assert_eq!(matrix.rows.len(), session.model().use_cases.len());
        prop_assert_eq!(matrix.columns.len(), session.taxonomy().len());
        for (r, uc) in matrix.rows.iter().enumerate() {
            let row = matrix.cells[r].iter().filter(|&&b| b).count();
            prop_assert_eq!(row, coverage.per_fr_category_count[uc]);
            prop_assert_eq!(row, matrix.checked_in_row(uc).len());
        }
        for (c, cat) in matrix.columns.iter().enumerate() {
            let column = matrix.cells.iter().filter(|row| row[c]).count();
            let mut ucs: Vec<&str> = session
                .answers()
                .iter()
                .filter(|a| a.category == *cat)
                .map(|a| session.model().question(a.question_id).unwrap().use_case.as_str())
                .collect();
            ucs.sort_unstable();
            ucs.dedup();
            prop_assert_eq!(column, ucs.len());
            prop_assert_eq!(coverage.unused_categories.contains(cat), ucs.is_empty());
        }
        prop_assert_eq!(matrix.checked_count(), oracle::checked(&matrix.cells));
    }

    #[test]
    fn table_rows_follow_question_numbers(session in gen::session(ModelLimits::default(), 60)) {
        let rows = elicitation_table(&session);
        prop_assert_eq!(rows.len(), session.answers().len());
        let numbers: Vec<u32> = rows.iter().map(|r| r.question_no[4..].parse().unwrap()).collect();
        prop_assert!(numbers.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn csv_reports_parse_back(session in gen::session(ModelLimits::default(), 60)) {
        let table = render_report(&session, ReportKind::Table, Format::Csv);
        let mut reader = csv::Reader::from_reader(table.as_bytes());
        prop_assert_eq!(
            reader.headers().unwrap().iter().collect::<Vec<_>>(),
            vec!["actor", "use_case", "question_no", "question", "answer", "category"]
        );
        let parsed: Vec<Vec<String>> = reader
            .records()
            .map(|r| r.unwrap().iter().map(str::to_string).collect())
            .collect();
        let expected: Vec<Vec<String>> = elicitation_table(&session)
            .into_iter()
            .map(|r| vec![r.actor, r.use_case, r.question_no, r.question, r.answer, r.category])
            .collect();
        prop_assert_eq!(parsed, expected);

        let checklist = render_report(&session, ReportKind::Checklist, Format::Csv);
        let mut reader = csv::Reader::from_reader(checklist.as_bytes());
        let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
        prop_assert_eq!(&header[1..], session.taxonomy().categories());
        let grid: Vec<(String, Vec<bool>)> = reader
            .records()
            .map(|r| {
                let r = r.unwrap();
                (r[0].to_string(), r.iter().skip(1).map(|c| c == "x").collect())
            })
            .collect();
        let expected: Vec<(String, Vec<bool>)> = session
            .model()
            .use_cases
            .iter()
            .cloned()
            .zip(oracle::checklist(&session))
            .collect();
        prop_assert_eq!(grid, expected);
    }

    #[test]
    fn json_reports_are_valid_json(session in gen::session(ModelLimits::default(), 30)) {
        for kind in [ReportKind::Table, ReportKind::Checklist, ReportKind::Coverage] {
            let text = render_report(&session, kind, Format::Json);
            prop_assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(cases(2000))]

    #[test]
    fn parser_is_total_on_arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
        if let Err(diags) = parse_model_bytes(&bytes) {
            prop_assert!(!diags.is_empty());
            prop_assert!(diags.iter().any(|d| d.severity == Severity::Error));
        }
    }

    #[test]
    fn parser_is_total_on_near_miss_text(
        lines in proptest::collection::vec(
            prop_oneof![
                Just("model \"M\"".to_string()),
                Just("actor \"A\"".to_string()),
                Just("usecase \"U\"".to_string()),
                Just("assoc \"A\" -> \"U\"".to_string()),
                Just("question NFRQ? on \"U\": \"q\"".to_string()),
                "[a-z \"\\\\:>#?NFRQ0-9-]{0,30}",
            ],
            0..12,
        )
    ) {
        let text = lines.join("\n");
        match parse_model(&text) {
            Ok(model) => prop_assert!(model.check().is_empty()),
            Err(diags) => prop_assert!(diags.iter().any(|d| d.severity == Severity::Error)),
        }
    }
}
