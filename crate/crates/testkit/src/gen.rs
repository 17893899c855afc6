use chrono::{DateTime, Duration, TimeZone, Utc};
use nfr_core::{start_session, AnswerDraft, NfrQuestion, QuestionId, Session, Taxonomy, UseCaseModel};
use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::sample::{subsequence, Index};

/// Names may hold anything but line breaks; quotes, backslashes and DSL
/// punctuation are included on purpose.
pub fn name() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 _#:>\"\\\\é-]{1,12}"
}

fn text() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 ?,.:#\"\\\\-]{0,40}"
}

fn distinct_names(range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<String>> {
    btree_set(name(), range)
        .prop_map(|set| set.into_iter().collect::<Vec<_>>())
        .prop_shuffle()
}

#[derive(Debug, Clone, Copy)]
pub struct ModelLimits {
    pub max_actors: usize,
    pub max_use_cases: usize,
    pub max_questions: usize,
}

impl Default for ModelLimits {
    fn default() -> Self {
        Self {
            max_actors: 6,
            max_use_cases: 15,
            max_questions: 40,
        }
    }
}

/// Valid models with numbered questions. Ids are distinct but neither
/// contiguous nor in order. Most use cases get at least one actor.
pub fn model(limits: ModelLimits) -> impl Strategy<Value = UseCaseModel> {
    (
        name(),
        distinct_names(1..=limits.max_actors),
        distinct_names(1..=limits.max_use_cases),
    )
        .prop_flat_map(move |(model_name, actors, use_cases)| {
            let (na, nu) = (actors.len(), use_cases.len());
            let assoc = vec(any::<bool>(), na * nu);
            let primary = vec(proptest::option::weighted(0.9, 0..na), nu);
            let questions = vec((0..nu, text()), 0..=limits.max_questions);
            let ids = subsequence((1..=120u32).collect::<Vec<_>>(), limits.max_questions).prop_shuffle();
            (Just(model_name), Just(actors), Just(use_cases), assoc, primary, questions, ids)
        })
        .prop_map(|(name, actors, use_cases, assoc, primary, questions, ids)| {
            let nu = use_cases.len();
            let mut associations = Vec::new();
            for (u, uc) in use_cases.iter().enumerate() {
                for (a, actor) in actors.iter().enumerate() {
                    if primary[u] == Some(a) || (assoc[a * nu + u] && primary[u].is_some()) {
                        associations.push((actor.clone(), uc.clone()));
                    }
                }
            }
            let questions = questions
                .into_iter()
                .zip(ids)
                .map(|((u, text), id)| NfrQuestion {
                    id: QuestionId::Numbered(id),
                    use_case: use_cases[u].clone(),
                    text,
                })
                .collect();
            UseCaseModel {
                name,
                actors,
                use_cases,
                associations,
                questions,
            }
        })
}

const CATEGORY_POOL: &[&str] = &[
    "Performance",
    "Reliability",
    "Cost",
    "Safety",
    "Usability",
    "Legal, issue",
    "Avail \"ability\"",
    "Portability",
    "Scalability",
];

/// The default taxonomy half the time, otherwise a custom one whose names
/// contain CSV and Markdown metacharacters.
pub fn taxonomy() -> impl Strategy<Value = Taxonomy> {
    prop_oneof![
        Just(Taxonomy::default()),
        subsequence(CATEGORY_POOL.to_vec(), 1..=CATEGORY_POOL.len())
            .prop_shuffle()
            .prop_map(|names| Taxonomy::new(names).expect("pool names are distinct")),
    ]
}

#[derive(Debug, Clone)]
pub enum Op {
    Record { question: Index, category: Index, actor: Option<Index>, answer: String },
    Revise { question: Index, category: Index, answer: String },
    Retract { question: Index },
    /// A draft naming a question id the model does not have.
    Stray { id: u32 },
}

pub fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        6 => (any::<Index>(), any::<Index>(), proptest::option::weighted(0.3, any::<Index>()), text())
            .prop_map(|(question, category, actor, answer)| Op::Record { question, category, actor, answer }),
        2 => (any::<Index>(), any::<Index>(), text())
            .prop_map(|(question, category, answer)| Op::Revise { question, category, answer }),
        2 => any::<Index>().prop_map(|question| Op::Retract { question }),
        1 => (121u32..200).prop_map(|id| Op::Stray { id }),
    ]
}

pub fn clock(step: usize) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2013, 1, 7, 9, 0, 0).unwrap() + Duration::seconds(step as i64 * 61)
}

/// Applies one operation. `Err` carries the engine's refusal; the caller
/// still holds the unchanged session.
pub fn apply(session: &Session, op: &Op, step: usize) -> Result<Session, nfr_core::EngineError> {
    let model = session.model();
    let categories = session.taxonomy().categories();
    let pick_q = |i: &Index| {
        if model.questions.is_empty() {
            "NFRQ1".to_string()
        } else {
            i.get(&model.questions).id.to_string()
        }
    };
    match op {
        Op::Record { question, category, actor, answer } => {
            let mut draft = AnswerDraft::new(pick_q(question), answer.clone(), category.get(categories).clone());
            if let Some(a) = actor {
                draft = draft.by(a.get(&model.actors).clone());
            }
            session.record_answer_at(&draft, clock(step))
        }
        Op::Revise { question, category, answer } => {
            let draft = AnswerDraft::new(pick_q(question), answer.clone(), category.get(categories).clone());
            session.revise_answer_at(&draft, clock(step))
        }
        Op::Retract { question } => session.retract_answer(&pick_q(question)),
        Op::Stray { id } => session.record_answer_at(&AnswerDraft::new(format!("NFRQ{id}"), "x", categories[0].clone()), clock(step)),
    }
}

/// A model, a taxonomy and an operation script to run against a fresh session.
pub fn script(limits: ModelLimits, max_ops: usize) -> impl Strategy<Value = (UseCaseModel, Taxonomy, Vec<Op>)> {
    (model(limits), taxonomy(), vec(op(), 0..=max_ops))
}

/// Every state reached while running `ops`, starting with the empty session.
pub fn run_script(model: UseCaseModel, taxonomy: Taxonomy, ops: &[Op]) -> Vec<Session> {
    let mut states = vec![start_session(model, Some(taxonomy)).expect("generated models are valid")];
    for (step, op) in ops.iter().enumerate() {
        let current = states.last().unwrap();
        if let Ok(next) = apply(current, op, step) {
            states.push(next);
        }
    }
    states
}

/// Sessions in some reachable state.
pub fn session(limits: ModelLimits, max_ops: usize) -> impl Strategy<Value = Session> {
    script(limits, max_ops).prop_map(|(m, t, ops)| run_script(m, t, &ops).pop().unwrap())
}
