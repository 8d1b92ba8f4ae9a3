use std::collections::HashMap;
use std::sync::{Arc, Barrier, Mutex};
use std::thread;
use std::time::Duration;

use puzzlers_core::{
    bundled_puzzle_set, Color, EditAction, Grid, Puzzle, PuzzleSet, Selection, VerdictStatus,
};
use puzzlers_llm::prompt::{BEFORE_LABEL, HINT_LABEL, PROPOSED_ANSWER_LABEL};
use puzzlers_llm::{
    serialize_grid, ChatRequest, MockProvider, ModelId, ParseFailureReason, Provider,
    ProviderError, ProviderReply,
};
use puzzlers_service::*;

fn color(i: u8) -> Color {
    Color::new(i).unwrap()
}

fn service_with(provider: Arc<dyn Provider>) -> SessionService {
    SessionService::new(bundled_puzzle_set(), provider, EventLog::in_memory())
}

fn first_puzzle(svc: &SessionService) -> Puzzle {
    let id = svc.list_puzzles()[0].id.clone();
    svc.get_puzzle(&id).unwrap()
}

fn three_train_puzzle(svc: &SessionService) -> Puzzle {
    let id = svc
        .list_puzzles()
        .into_iter()
        .find(|p| p.train_count == 3)
        .unwrap()
        .id;
    svc.get_puzzle(&id).unwrap()
}

#[test]
fn create_session_defaults() {
    let svc = service_with(Arc::new(MockProvider::echo()));
    let puzzle = first_puzzle(&svc);
    let s = svc.create_session(&puzzle.id, 0).unwrap();
    assert_eq!(s.mode, Mode::Manual);
    assert!(s.attempts.is_empty());
    assert_eq!(s.after.dims(), puzzle.test[0].input.dims());
    assert!(s.after.cells().iter().all(|c| *c == Color::BACKGROUND));
    assert_eq!(s.config.num_examples, puzzle.train.len());
    assert_eq!(s.config.hint, None);
    assert_eq!(s.config.model.as_str(), "gpt-4o");

    let other = svc.create_session(&puzzle.id, 0).unwrap();
    assert_ne!(s.id, other.id);
    assert_eq!(
        svc.create_session("nope", 0).unwrap_err(),
        ServiceError::UnknownPuzzle("nope".into())
    );
    assert_eq!(svc.create_session(&puzzle.id, 9).unwrap_err().code(), "index_out_of_range");
}

#[test]
fn fixed_after_grid_setting() {
    let svc = SessionService::with_settings(
        bundled_puzzle_set(),
        Arc::new(MockProvider::echo()),
        EventLog::in_memory(),
        ServiceSettings {
            after_default: puzzlers_core::AfterGridDefault::Fixed { rows: 2, cols: 5 },
            strict_models: true,
        },
    );
    let puzzle = first_puzzle(&svc);
    assert_eq!(svc.create_session(&puzzle.id, 0).unwrap().after.dims(), (2, 5));
}

#[test]
fn mode_switches_preserve_state() {
    let svc = service_with(Arc::new(MockProvider::script(["[[1]]"]).unwrap()));
    let puzzle = first_puzzle(&svc);
    let s = svc.create_session(&puzzle.id, 0).unwrap();
    svc.apply_edit(&s.id, EditAction::Clone).unwrap();
    svc.switch_mode(&s.id, Mode::Ai).unwrap();
    svc.ai_solve(&s.id).unwrap();
    let baseline = svc.get_session(&s.id).unwrap();

    for mode in [Mode::Assist, Mode::Manual, Mode::Ai, Mode::Ai, Mode::Assist, Mode::Manual] {
        let after = svc.switch_mode(&s.id, mode).unwrap();
        assert_eq!(after.mode, mode);
        assert_eq!(after.after, baseline.after);
        assert_eq!(after.attempts, baseline.attempts);
        assert_eq!(after.config, baseline.config);
    }
}

#[test]
fn switching_to_current_mode_is_a_noop() {
    let svc = service_with(Arc::new(MockProvider::echo()));
    let s = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    let before = svc.read_events(&s.id).unwrap().len();
    let same = svc.switch_mode(&s.id, Mode::Manual).unwrap();
    assert_eq!(same, s);
    assert_eq!(svc.read_events(&s.id).unwrap().len(), before);
    assert!(matches!(
        svc.switch_mode("ghost", Mode::Ai),
        Err(ServiceError::UnknownSession(_))
    ));
}

#[test]
fn edits_and_atomicity() {
    let svc = service_with(Arc::new(MockProvider::echo()));
    let puzzle = first_puzzle(&svc);
    let s = svc.create_session(&puzzle.id, 0).unwrap();

    let cloned = svc.apply_edit(&s.id, EditAction::Clone).unwrap();
    assert_eq!(cloned.after, puzzle.test[0].input);

    let events_before = svc.read_events(&s.id).unwrap().len();
    let err = svc
        .apply_edit(
            &s.id,
            EditAction::SetCell {
                row: 99,
                col: 0,
                color: color(1),
            },
        )
        .unwrap_err();
    assert_eq!(err.code(), "out_of_bounds");
    assert_eq!(err.status(), 422);
    assert_eq!(svc.get_session(&s.id).unwrap(), cloned);
    assert_eq!(svc.read_events(&s.id).unwrap().len(), events_before);

    let reset = svc.apply_edit(&s.id, EditAction::Reset).unwrap();
    assert_eq!(reset.after, Grid::blank(cloned.after.rows(), cloned.after.cols()).unwrap());
}

#[test]
fn check_human_and_ai() {
    let svc = service_with(Arc::new(
        MockProvider::script(["no grid here", "[[1, 2], [3, 4]]"]).unwrap(),
    ));
    let puzzle = first_puzzle(&svc);
    let expected = puzzle.test[0].output.clone();
    let s = svc.create_session(&puzzle.id, 0).unwrap();

    assert_eq!(
        svc.check(&s.id, CheckSource::LastAiAttempt).unwrap_err(),
        ServiceError::NoAttempt
    );

    // paint the expected output cell by cell
    svc.apply_edit(&s.id, EditAction::Resize { rows: expected.rows(), cols: expected.cols() })
        .unwrap();
    for r in 0..expected.rows() {
        for c in 0..expected.cols() {
            let color = expected.get(r, c).unwrap();
            svc.apply_edit(&s.id, EditAction::SetCell { row: r, col: c, color })
                .unwrap();
        }
    }
    assert_eq!(
        svc.check(&s.id, CheckSource::Human).unwrap().status,
        VerdictStatus::Correct
    );

    svc.switch_mode(&s.id, Mode::Ai).unwrap();
    let failed = svc.ai_solve(&s.id).unwrap();
    assert_eq!(
        failed.parsed.failure().unwrap().reason,
        ParseFailureReason::NoGridFound
    );
    assert_eq!(
        svc.check(&s.id, CheckSource::LastAiAttempt).unwrap_err(),
        ServiceError::UnparsedAttempt
    );

    svc.ai_solve(&s.id).unwrap();
    let verdict = svc.check(&s.id, CheckSource::LastAiAttempt).unwrap();
    assert_eq!(verdict.status, VerdictStatus::Incorrect);
    let session = svc.get_session(&s.id).unwrap();
    assert_eq!(session.attempts[1].verdict, Some(verdict));
    assert_eq!(session.attempts[0].verdict, None);
    // the AI's grid never lands in the player's grid
    assert_eq!(session.after, expected);
}

#[test]
fn mode_gating_matrix() {
    let svc = service_with(Arc::new(MockProvider::script(["[[1]]"]).unwrap()));
    let puzzle = first_puzzle(&svc);
    type Op = fn(&SessionService, &str) -> Result<(), ServiceError>;
    let ops: [(&str, &[Mode], Op); 5] = [
        ("ai_solve", &[Mode::Ai, Mode::Assist], |svc, id| svc.ai_solve(id).map(drop)),
        ("ai_explain", &[Mode::Ai, Mode::Assist], |svc, id| svc.ai_explain(id).map(drop)),
        ("set_hint", &[Mode::Assist], |svc, id| svc.set_hint(id, "look closer").map(drop)),
        ("set_config", &[Mode::Assist], |svc, id| {
            svc.set_config(
                id,
                ConfigUpdate {
                    model: Some(ModelId::new("gpt-4o-mini").unwrap()),
                    num_examples: Some(1),
                },
            )
            .map(drop)
        }),
        ("add_random_puzzle", &[Mode::Assist], |svc, id| {
            svc.add_random_puzzle(&RandomPuzzleRequest {
                session_id: id.to_string(),
                rows: 3,
                cols: 3,
                num_train: 2,
                seed: 1,
            })
            .map(drop)
        }),
    ];
    for mode in Mode::ALL {
        for (name, allowed, op) in &ops {
            let s = svc.create_session(&puzzle.id, 0).unwrap();
            svc.switch_mode(&s.id, mode).unwrap();
            let result = op(&svc, &s.id);
            if allowed.contains(&mode) {
                assert!(result.is_ok(), "{name} in {mode:?}: {result:?}");
            } else {
                assert!(
                    matches!(result, Err(ServiceError::WrongMode { .. })),
                    "{name} in {mode:?}: {result:?}"
                );
            }
        }
    }
}

#[test]
fn hints_and_config() {
    let mock = Arc::new(MockProvider::script(["[[1]]"]).unwrap());
    let svc = service_with(mock.clone());
    let puzzle = three_train_puzzle(&svc);
    let s = svc.create_session(&puzzle.id, 0).unwrap();
    svc.switch_mode(&s.id, Mode::Assist).unwrap();

    let hint = "make a pattern of the colors and gray alternating";
    assert_eq!(svc.set_hint(&s.id, hint).unwrap().config.hint.as_deref(), Some(hint));
    assert_eq!(svc.set_hint(&s.id, "").unwrap().config.hint, None);
    svc.set_hint(&s.id, hint).unwrap();

    let err = svc
        .set_config(&s.id, ConfigUpdate { model: None, num_examples: Some(0) })
        .unwrap_err();
    assert_eq!(err.code(), "no_examples");
    let err = svc
        .set_config(&s.id, ConfigUpdate { model: None, num_examples: Some(4) })
        .unwrap_err();
    assert_eq!(err.code(), "too_few_examples");
    let err = svc
        .set_config(
            &s.id,
            ConfigUpdate {
                model: Some(ModelId::new("made-up").unwrap()),
                num_examples: None,
            },
        )
        .unwrap_err();
    assert_eq!(err, ServiceError::UnknownModel("made-up".into()));

    svc.set_config(
        &s.id,
        ConfigUpdate {
            model: Some(ModelId::new("gpt-3.5-turbo").unwrap()),
            num_examples: Some(1),
        },
    )
    .unwrap();
    let attempt = svc.ai_solve(&s.id).unwrap();
    assert_eq!(attempt.raw.model.as_str(), "gpt-3.5-turbo");
    let req = mock.last_request().unwrap();
    assert_eq!(req.user.matches(BEFORE_LABEL).count(), 1);
    assert_eq!(req.user.matches(hint).count(), 1);

    // AI mode keeps the config but leaves the hint out
    svc.switch_mode(&s.id, Mode::Ai).unwrap();
    svc.ai_solve(&s.id).unwrap();
    let req = mock.last_request().unwrap();
    assert!(!req.user.contains(HINT_LABEL));
    assert_eq!(req.model.as_str(), "gpt-3.5-turbo");
}

#[test]
fn lenient_models_when_not_strict() {
    let svc = SessionService::with_settings(
        bundled_puzzle_set(),
        Arc::new(MockProvider::echo()),
        EventLog::in_memory(),
        ServiceSettings {
            strict_models: false,
            ..ServiceSettings::default()
        },
    );
    let s = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    svc.switch_mode(&s.id, Mode::Assist).unwrap();
    let updated = svc
        .set_config(
            &s.id,
            ConfigUpdate {
                model: Some(ModelId::new("my-gateway/llama").unwrap()),
                num_examples: None,
            },
        )
        .unwrap();
    assert_eq!(updated.config.model.as_str(), "my-gateway/llama");
}

#[test]
fn explain_uses_latest_parsed_attempt() {
    let mock = Arc::new(MockProvider::script(["[[4, 4], [4, 4]]", "1. I copied it.", "oops"]).unwrap());
    let svc = service_with(mock.clone());
    let s = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    assert!(matches!(svc.ai_explain(&s.id), Err(ServiceError::WrongMode { .. })));
    svc.switch_mode(&s.id, Mode::Ai).unwrap();

    svc.ai_solve(&s.id).unwrap();
    assert_eq!(svc.ai_explain(&s.id).unwrap(), "1. I copied it.");
    let req = mock.last_request().unwrap();
    assert!(req.user.contains(&format!("{PROPOSED_ANSWER_LABEL} [[4, 4], [4, 4]]")));
    let session = svc.get_session(&s.id).unwrap();
    assert_eq!(session.attempts[0].explanation.as_deref(), Some("1. I copied it."));
}

#[test]
fn explain_without_attempt_has_no_answer_line() {
    let mock = Arc::new(MockProvider::script(["why"]).unwrap());
    let svc = service_with(mock.clone());
    let s = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    svc.switch_mode(&s.id, Mode::Ai).unwrap();
    assert_eq!(svc.ai_explain(&s.id).unwrap(), "why");
    assert!(!mock.last_request().unwrap().user.contains(PROPOSED_ANSWER_LABEL));
}

#[test]
fn random_puzzles() {
    let svc = service_with(Arc::new(MockProvider::echo()));
    let s = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    svc.switch_mode(&s.id, Mode::Assist).unwrap();
    let req = RandomPuzzleRequest {
        session_id: s.id.clone(),
        rows: 4,
        cols: 5,
        num_train: 2,
        seed: 77,
    };
    let a = svc.add_random_puzzle(&req).unwrap();
    let b = svc.add_random_puzzle(&req).unwrap();
    assert_ne!(a.id, b.id);
    assert_eq!(a.train, b.train);
    assert_eq!(a.test, b.test);
    assert!(a.ruleless);

    let listing = svc.list_puzzles();
    assert_eq!(listing.len(), 14);
    assert!(listing.iter().any(|p| p.id == a.id && p.ruleless));
    assert_eq!(svc.get_puzzle(&a.id).unwrap(), a);

    let rs = svc.create_session(&a.id, 0).unwrap();
    assert_eq!(
        svc.check(&rs.id, CheckSource::Human).unwrap().status,
        VerdictStatus::NoGroundTruth
    );

    let bad = RandomPuzzleRequest { rows: 0, ..req };
    assert_eq!(svc.add_random_puzzle(&bad).unwrap_err().code(), "dims_out_of_range");
}

#[test]
fn events_and_replay() {
    let svc = service_with(Arc::new(MockProvider::script(["[[1]]", "because"]).unwrap()));
    let puzzle = three_train_puzzle(&svc);
    let s = svc.create_session(&puzzle.id, 0).unwrap();
    svc.apply_edit(&s.id, EditAction::Clone).unwrap();
    svc.apply_edit(
        &s.id,
        EditAction::FloodFill {
            row: 0,
            col: 0,
            color: color(6),
        },
    )
    .unwrap();
    svc.apply_edit(
        &s.id,
        EditAction::BatchSet {
            selection: Selection::new(0, 0, 1, 1).unwrap(),
            color: color(2),
        },
    )
    .unwrap();
    svc.check(&s.id, CheckSource::Human).unwrap();
    svc.switch_mode(&s.id, Mode::Assist).unwrap();
    svc.ai_solve(&s.id).unwrap();
    svc.ai_explain(&s.id).unwrap();
    svc.set_hint(&s.id, "count the squares").unwrap();
    svc.set_config(
        &s.id,
        ConfigUpdate {
            model: Some(ModelId::new("gpt-4o-mini").unwrap()),
            num_examples: Some(2),
        },
    )
    .unwrap();
    svc.apply_edit(&s.id, EditAction::Resize { rows: 2, cols: 2 }).unwrap();

    let events = svc.read_events(&s.id).unwrap();
    let kinds: Vec<_> = events.iter().map(|e| e.payload.kind()).collect();
    assert_eq!(
        kinds,
        [
            "SessionCreated",
            "Edit",
            "Edit",
            "Edit",
            "Check",
            "ModeSwitched",
            "AISolve",
            "AIExplain",
            "HintSet",
            "ConfigChanged",
            "Edit"
        ]
    );
    for w in events.windows(2) {
        assert!(w[0].timestamp < w[1].timestamp);
        assert!(w[0].seq < w[1].seq);
    }

    let final_state = svc.get_session(&s.id).unwrap();
    let replayed = replay(&events, &svc.puzzle_set()).unwrap();
    assert_eq!(replayed.after, final_state.after);
    assert_eq!(replayed.config, final_state.config);
    assert_eq!(replayed.mode, final_state.mode);

    assert!(matches!(svc.read_events("ghost"), Err(ServiceError::UnknownSession(_))));
}

#[test]
fn event_log_file_is_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    let svc = SessionService::new(
        bundled_puzzle_set(),
        Arc::new(MockProvider::echo()),
        EventLog::with_file(&path).unwrap(),
    );
    let a = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    let b = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    svc.apply_edit(&a.id, EditAction::Clone).unwrap();
    svc.switch_mode(&b.id, Mode::Ai).unwrap();
    svc.ai_solve(&b.id).unwrap();

    let on_disk = read_jsonl(&path).unwrap();
    assert_eq!(on_disk.len(), 5);
    let for_a: Vec<_> = on_disk.iter().filter(|e| e.session_id == a.id).cloned().collect();
    assert_eq!(for_a, svc.read_events(&a.id).unwrap());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains("sk-"));
}

#[test]
fn empty_puzzle_set_is_allowed() {
    let svc = SessionService::new(
        PuzzleSet::default(),
        Arc::new(MockProvider::echo()),
        EventLog::in_memory(),
    );
    assert!(svc.list_puzzles().is_empty());
    assert!(matches!(svc.create_session("x", 0), Err(ServiceError::UnknownPuzzle(_))));
}

#[test]
fn transport_errors_surface_and_release_the_session() {
    struct Flaky;
    impl Provider for Flaky {
        fn name(&self) -> &str {
            "flaky"
        }
        fn send(&self, _: &ChatRequest) -> Result<ProviderReply, ProviderError> {
            Err(ProviderError::Timeout(Duration::from_secs(60)))
        }
    }
    let svc = service_with(Arc::new(Flaky));
    let s = svc.create_session(&first_puzzle(&svc).id, 0).unwrap();
    svc.switch_mode(&s.id, Mode::Ai).unwrap();
    let err = svc.ai_solve(&s.id).unwrap_err();
    assert_eq!(err.status(), 504);
    // the in-flight flag was cleared, so the next call is not Busy
    assert_eq!(svc.ai_solve(&s.id).unwrap_err().code(), "provider_timeout");
    assert!(svc.get_session(&s.id).unwrap().attempts.is_empty());
}

/// Wraps a slow mock and records, per session tag, how many calls overlap.
struct Probe {
    inner: MockProvider,
    in_flight: Mutex<HashMap<String, usize>>,
    max_overlap: Mutex<HashMap<String, usize>>,
    calls: Mutex<HashMap<String, usize>>,
}

impl Probe {
    fn tag(request: &ChatRequest) -> String {
        request
            .user
            .lines()
            .find_map(|l| l.strip_prefix(HINT_LABEL))
            .map(|t| t.trim().to_string())
            .unwrap_or_default()
    }
}

impl Provider for Probe {
    fn name(&self) -> &str {
        "probe"
    }

    fn send(&self, request: &ChatRequest) -> Result<ProviderReply, ProviderError> {
        let tag = Probe::tag(request);
        {
            let mut in_flight = self.in_flight.lock().unwrap();
            let n = in_flight.entry(tag.clone()).or_default();
            *n += 1;
            let mut max = self.max_overlap.lock().unwrap();
            let m = max.entry(tag.clone()).or_default();
            *m = (*m).max(*n);
        }
        *self.calls.lock().unwrap().entry(tag.clone()).or_default() += 1;
        let reply = self.inner.send(request);
        *self.in_flight.lock().unwrap().get_mut(&tag).unwrap() -= 1;
        reply
    }
}

#[test]
fn concurrent_sessions_single_flight() {
    const SESSIONS: usize = 20;
    let probe = Arc::new(Probe {
        inner: MockProvider::echo().with_delay(Duration::from_millis(40)),
        in_flight: Mutex::default(),
        max_overlap: Mutex::default(),
        calls: Mutex::default(),
    });
    let svc = Arc::new(service_with(probe.clone()));
    let puzzles = svc.list_puzzles();

    let sessions: Vec<_> = (0..SESSIONS)
        .map(|i| {
            let puzzle_id = &puzzles[i % puzzles.len()].id;
            let s = svc.create_session(puzzle_id, 0).unwrap();
            svc.apply_edit(&s.id, EditAction::Clone).unwrap();
            svc.switch_mode(&s.id, Mode::Assist).unwrap();
            svc.set_hint(&s.id, &format!("session-{i}")).unwrap();
            svc.get_session(&s.id).unwrap()
        })
        .collect();

    // Two threads per session fire at once, three rounds each.
    let barrier = Arc::new(Barrier::new(SESSIONS * 2));
    let handles: Vec<_> = sessions
        .iter()
        .flat_map(|s| [s.id.clone(), s.id.clone()])
        .map(|id| {
            let svc = svc.clone();
            let barrier = barrier.clone();
            thread::spawn(move || {
                let mut ok = 0;
                let mut busy = 0;
                for _ in 0..3 {
                    barrier.wait();
                    match svc.ai_solve(&id) {
                        Ok(_) => ok += 1,
                        Err(ServiceError::Busy) => busy += 1,
                        Err(e) => panic!("unexpected {e}"),
                    }
                }
                (id, ok, busy)
            })
        })
        .collect();

    let mut ok_per_session: HashMap<String, usize> = HashMap::new();
    let mut total_busy = 0;
    for h in handles {
        let (id, ok, busy) = h.join().unwrap();
        *ok_per_session.entry(id).or_default() += ok;
        total_busy += busy;
    }
    assert!(total_busy >= 1, "expected at least one Busy rejection");

    let max_overlap = probe.max_overlap.lock().unwrap();
    let calls = probe.calls.lock().unwrap();
    for (i, s) in sessions.iter().enumerate() {
        let tag = format!("session-{i}");
        assert_eq!(max_overlap[&tag], 1, "{tag} had overlapping provider calls");
        assert_eq!(calls[&tag], ok_per_session[&s.id], "{tag} call count");

        let now = svc.get_session(&s.id).unwrap();
        assert_eq!(now.after, s.after, "{tag} after grid changed");
        assert_eq!(now.attempts.len(), ok_per_session[&s.id]);
        let puzzle = svc.get_puzzle(&s.puzzle_id).unwrap();
        for attempt in &now.attempts {
            assert_eq!(attempt.config.hint.as_deref(), Some(tag.as_str()));
            assert_eq!(attempt.raw.text, serialize_grid(&puzzle.test[0].input));
        }
        let solves = svc
            .read_events(&s.id)
            .unwrap()
            .iter()
            .filter(|e| e.payload.kind() == "AISolve")
            .count();
        assert_eq!(solves, now.attempts.len());
    }
}
