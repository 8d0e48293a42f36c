//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any criterion fails.
//!
//! Every run uses the bundled tournaments document, the in-process service on
//! a loopback port, document order inside categories and a fixed seed.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use petit_core::apostl::eval::{evaluate, EvalContext};
use petit_core::datagen::{parse_regex, regex::sample};
use petit_core::engine::{render_report, Outcome};
use petit_core::http::join_url;
use petit_core::spec::PathSegment;
use petit_core::{
    check_restrictions, load_spec, parse_formula, ApiResult, ApiSpec, HttpTransport, Method, OrderStrategy,
    SpecError, SpyTransport, TestOptions, TestRun, Transport, Violation,
};
use petit_fixture::{spec_with_base_url, Fault, FaultFlags, FixtureServer, Player};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20;
const REGEX_SAMPLES: usize = 10_000;
const ORACLE_STATES: usize = 100;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Env {
    server: FixtureServer,
    spec: ApiSpec,
    transport: HttpTransport,
}

impl Env {
    fn new() -> Env {
        let server = FixtureServer::start(0, FaultFlags::default()).expect("fixture starts");
        let spec = load_spec(&spec_with_base_url(&server.base_url())).expect("bundled spec loads");
        Env { server, spec, transport: HttpTransport::new().expect("client") }
    }

    fn run(&self, strategy: OrderStrategy, faults: FaultFlags, transport: &dyn Transport) -> TestRun {
        self.server.reset();
        self.server.set_faults(faults);
        let options = TestOptions { randomize_apis: false, seed: Some(SEED), stable_order: true };
        petit_core::test_specification(&self.spec, strategy, &options, transport)
    }
}

fn counts(r: &ApiResult) -> (usize, usize, usize) {
    (r.ok, r.not_ok, r.inconclusive)
}

fn api<'a>(run: &'a TestRun, name: &str) -> Result<&'a ApiResult, String> {
    run.api(name).ok_or_else(|| format!("no results for the {name} API"))
}

// 1

const ACCEPTED: &[&str] = &[
    "response_code(GET /players/{playerNIF}) == 200",
    "response_code(GET /players/{playerNIF}) == 404",
    "response_body(this) == previous(response_body(GET /players/{playerNIF}))",
    "response_body(this) == \n      previous(response_body(GET /players/{playerNIF}))",
    "response_body(this) == request_body(this)",
    "for t in response_body(GET /tournaments) :- \n    response_body(GET /tournaments/{t.tournamentId}/enrollments).length \n    <= response_body(GET /tournaments/{t.tournamentId}/capacity)",
    "T",
];

const NESTED_QUANTIFIER: &str = "for t in response_body(GET /tournaments) :- \n  for p in response_body(GET /tournaments/{t.tournamentId}/players) :- \n    response_code(/tournaments/{tournamentId}/enrollments/{p.playerNIF} == 200";

const MULTI_VARIABLE: &str = "for t in response_body(GET /tournaments), \n  p in response_body(GET /tournaments/{t.tournamentId}/players) :- \n    response_code(/tournaments/{tournamentId}/enrollments/{p.playerNIF} == 200";

const DEPTH_TWO: &str = "for p in request_body(GET /players) :-\n  response_code(GET /players/{p.playerNIF.tournaments}) == 200";

fn grammar() -> Check {
    for text in ACCEPTED {
        let formula = parse_formula(text).map_err(|e| format!("rejected {text:?}: {e}"))?;
        let violations = check_restrictions(&formula);
        ensure!(violations.is_empty(), "{text:?} violates {violations:?}");
    }
    for (name, text) in [("nested quantifier", NESTED_QUANTIFIER), ("multi-variable quantifier", MULTI_VARIABLE)] {
        ensure!(parse_formula(text).is_err(), "{name} was accepted");
    }
    let formula = parse_formula(DEPTH_TWO).map_err(|e| format!("depth-two formula should parse: {e}"))?;
    let violations = check_restrictions(&formula);
    ensure!(
        violations.iter().any(|v| matches!(v, Violation::DepthTwoBlockParameter { .. })),
        "depth-two block parameter not reported: {violations:?}"
    );
    let doc = serde_json::json!({
        "openapi": "3.0.3",
        "servers": [{"url": "http://localhost:1"}],
        "paths": {"/players": {"get": {"x-ensures": [DEPTH_TWO]}}}
    });
    match load_spec(&doc.to_string()) {
        Err(SpecError::RestrictionViolation { .. }) => {}
        other => return Err(format!("loading the depth-two contract gave {other:?}")),
    }
    Ok(format!("{} accepted, 3 rejected", ACCEPTED.len()))
}

// 2

fn verdict_table() -> Check {
    use Outcome::*;
    // (code, pre, post, prev) -> outcome, written out row by row.
    let table = [
        (200, true, true, true, Ok),
        (200, true, true, false, NotOk),
        (200, true, false, true, NotOk),
        (200, true, false, false, NotOk),
        (200, false, true, true, NotOk),
        (200, false, true, false, NotOk),
        (200, false, false, true, NotOk),
        (200, false, false, false, NotOk),
        (404, true, true, true, Inconclusive),
        (404, true, true, false, Inconclusive),
        (404, true, false, true, Inconclusive),
        (404, true, false, false, Inconclusive),
        (404, false, true, true, FailedAsExpected),
        (404, false, true, false, FailedAsExpected),
        (404, false, false, true, FailedAsExpected),
        (404, false, false, false, FailedAsExpected),
    ];
    for (code, pre, post, prev, expected) in table {
        let got = Outcome::classify(code == 200, pre, post && prev);
        ensure!(got == expected, "({code}, {pre}, {post}, {prev}) gave {got:?}, expected {expected:?}");
    }
    let verdict = |outcome| petit_core::engine::OperationVerdict {
        method: Method::Get,
        path: "/x".into(),
        outcome,
        trace: vec![],
    };
    let tally = ApiResult::new("x", vec![verdict(FailedAsExpected), verdict(Ok)]);
    ensure!(counts(&tally) == (2, 0, 0), "failed-as-expected not tallied as OK: {:?}", counts(&tally));
    Result::Ok("16/16 cases".into())
}

// 3, 8, 9 share one spied COM run.

const ENROLLMENT_OPS: [(Method, &str); 3] = [
    (Method::Post, "/tournaments/{tournamentId}/enrollments"),
    (Method::Get, "/tournaments/{tournamentId}/enrollments/{playerNIF}"),
    (Method::Delete, "/tournaments/{tournamentId}/enrollments/{playerNIF}"),
];

fn com_run(run: &TestRun) -> Check {
    let players = counts(api(run, "players")?);
    let tournaments = counts(api(run, "tournaments")?);
    ensure!(players == (6, 0, 0), "players API {players:?}, expected (6, 0, 0)");
    ensure!(tournaments == (10, 0, 0), "tournaments API {tournaments:?}, expected (10, 0, 0)");
    let results = api(run, "tournaments")?;
    for (method, path) in ENROLLMENT_OPS {
        let v = results.verdict(method, path).ok_or_else(|| format!("{method} {path} not tested"))?;
        ensure!(v.outcome == Outcome::FailedAsExpected, "{method} {path} was {:?}", v.outcome);
        let text = petit_core::engine::render_operation(v, false, 0);
        ensure!(text.contains("FAILED (as expected)"), "{method} {path} trace lacks FAILED (as expected)");
    }
    Ok(format!("players {players:?}, tournaments {tournaments:?}"))
}

fn purity(run: &TestRun, spy: &SpyTransport<HttpTransport>) -> Check {
    let log = spy.requests();
    let mut expected: Vec<(Method, String)> = Vec::new();
    let mut tested = 0;
    for result in &run.results {
        for v in &result.verdicts {
            let request = v.request().ok_or_else(|| format!("{} has no request", v.label()))?;
            tested += 1;
            if request.method != Method::Get {
                expected.push((request.method, request.url.clone()));
            }
        }
    }
    let tested_non_get = expected.len();
    expected.extend(run.reversal.requests.iter().map(|r| (Method::Delete, r.url.clone())));
    let actual: Vec<(Method, String)> =
        log.iter().filter(|r| r.method != Method::Get).map(|r| (r.method, r.url.clone())).collect();
    ensure!(
        actual == expected,
        "non-GET requests {actual:?} differ from tested operations plus reversal {expected:?}"
    );
    Ok(format!(
        "{} requests, {} non-GET = {tested_non_get} operations + {} reversal DELETEs, {tested} operations tested",
        log.len(),
        actual.len(),
        run.reversal.requests.len()
    ))
}

fn reversal(env: &Env, run: &TestRun) -> Check {
    ensure!(run.reversal.ok(), "reversal reported failures: {:?}", run.reversal);
    ensure!(!run.pool.is_empty(), "nothing was pooled");
    let mut checked = 0;
    for (schema, object) in run.pool.iter() {
        let id_name = &env.spec.schema(schema).ok_or_else(|| format!("unknown schema {schema}"))?.id_property;
        let id = object
            .get(id_name)
            .and_then(|v| v.to_url_text())
            .ok_or_else(|| format!("pooled {schema} lacks {id_name}"))?;
        let getter = env
            .spec
            .operations()
            .find(|op| op.method == Method::Get && op.path_params().eq([id_name.as_str()]) && op.path_template.len() == 2)
            .ok_or_else(|| format!("no GET for {schema}"))?;
        let segments: Vec<String> = getter
            .path_template
            .iter()
            .map(|s| match s {
                PathSegment::Literal(l) => l.clone(),
                PathSegment::Param(_) => id.clone(),
            })
            .collect();
        let url = join_url(&env.spec.base_url, &segments);
        let code = env.transport.send(Method::Get, &url, None).map_err(|e| e.to_string())?.code;
        ensure!(code == 404, "{url} answered {code} after reversal");
        checked += 1;
    }
    Ok(format!("{checked} pooled objects gone"))
}

// 4

fn cmo_run(env: &Env) -> Check {
    let run = env.run(OrderStrategy::Cmo, FaultFlags::default(), &env.transport);
    let players = api(&run, "players")?;
    ensure!(players.not_ok == 0, "players API has {} NOT OK", players.not_ok);
    let tournaments = api(&run, "tournaments")?;
    let inconclusive: Vec<String> = tournaments
        .verdicts
        .iter()
        .filter(|v| v.outcome == Outcome::Inconclusive)
        .map(|v| v.label())
        .collect();
    ensure!(
        inconclusive == ["GET /tournaments/{tournamentId}"],
        "inconclusive operations {inconclusive:?}\n{}",
        render_report(&run, false, 0)
    );
    Ok(format!("tournaments {:?}, inconclusive: {}", counts(tournaments), inconclusive[0]))
}

// 5

fn fault_matrix(env: &Env) -> Check {
    let insertions: BTreeSet<Fault> =
        [Fault::PlayerInsertNotStored, Fault::TournamentInsertMissingFields].into_iter().collect();
    let all: BTreeSet<Fault> = Fault::ALL.into_iter().collect();
    let strategies = [
        (OrderStrategy::Cmo, Some(&all)),
        (OrderStrategy::Com, Some(&all)),
        (OrderStrategy::Mco, Some(&insertions)),
        (OrderStrategy::Moc, Some(&insertions)),
        (OrderStrategy::Ocm, None),
        (OrderStrategy::Omc, None),
    ];
    let mut cells = Vec::new();
    let mut errors = Vec::new();
    for (strategy, expected) in strategies {
        let mut detected = BTreeSet::new();
        for fault in Fault::ALL {
            let run = env.run(strategy, FaultFlags::only(fault), &env.transport);
            let (method, path) = fault.operation();
            let hit = run
                .results
                .iter()
                .flat_map(|r| &r.verdicts)
                .any(|v| v.method.to_string() == method && v.path == path && v.outcome == Outcome::NotOk);
            if hit {
                detected.insert(fault);
            }
        }
        let ok = match expected {
            Some(expected) => &detected == expected,
            None => detected.is_superset(&insertions),
        };
        if !ok {
            errors.push(format!("{strategy} detected {detected:?}"));
        }
        cells.push(format!("{strategy} {}/6", detected.len()));
    }
    ensure!(errors.is_empty(), "{}", errors.join("; "));
    Ok(cells.join(", "))
}

// 6

fn quantified_oracle(env: &Env) -> Check {
    let invariant = env
        .spec
        .apis
        .iter()
        .find(|a| a.name == "tournaments")
        .and_then(|a| a.invariants.first())
        .ok_or("tournaments API has no invariant")?
        .clone();
    let mask = env.spec.generated_properties();
    let ctx = EvalContext::new(&env.spec.base_url, &env.transport, &mask);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut held, mut broken) = (0, 0);
    env.server.set_faults(FaultFlags::default());
    for state in 0..ORACLE_STATES {
        let tournaments = [0, 1, 3][rng.random_range(0..3)];
        // Odd states shrink capacities so that some states break the invariant.
        let layout: Vec<(i64, usize)> = (0..tournaments)
            .map(|_| {
                let capacity = if state % 2 == 0 { 3 } else { rng.random_range(1..=3) };
                (capacity, rng.random_range(0..=3))
            })
            .collect();
        let oracle = env.server.with_store(|store| {
            store.reset();
            for nif in ["100000001", "100000002", "100000003"] {
                store.insert_player(Player::new(nif));
            }
            for (i, (capacity, enrolled)) in layout.iter().enumerate() {
                let id = store.insert_tournament(&format!("t{i}"), *capacity);
                for nif in ["100000001", "100000002", "100000003"].iter().take(*enrolled) {
                    store.enroll(id, nif);
                }
            }
            // Materialize everything and check each element, no early exit.
            let verdicts: Vec<bool> =
                store.tournaments().map(|t| store.enrolled(t.id).len() as i64 <= t.capacity).collect();
            verdicts.iter().fold(true, |acc, ok| acc & ok)
        });
        let evaluated = evaluate(&invariant, &ctx).map_err(|e| format!("state {state}: {e}"))?;
        ensure!(evaluated == oracle, "state {state} {layout:?}: evaluator {evaluated}, oracle {oracle}");
        if oracle {
            held += 1;
        } else {
            broken += 1;
        }
    }
    env.server.reset();
    Ok(format!("{ORACLE_STATES} states agree ({held} hold, {broken} violate)"))
}

// 7

fn regex_samples() -> Check {
    let corpus = [
        "(1|2)[0-9]{8}",
        "[0-9]{2,4}",
        "a(b|c)*d",
        "[a-z][a-z0-9_.]{2,9}@[a-z]{3,8}\\.(com|org|pt)",
        "9[1236][0-9]{7}",
    ];
    for pattern in corpus {
        let node = parse_regex(pattern).map_err(|e| format!("{pattern}: {e}"))?;
        let matcher = regex::Regex::new(&format!("^(?:{pattern})$")).expect("valid regex");
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut again = ChaCha8Rng::seed_from_u64(SEED);
        for i in 0..REGEX_SAMPLES {
            let s = sample(&node, &mut rng);
            ensure!(matcher.is_match(&s), "{pattern}: sample {i} {s:?} does not match");
            ensure!(s == sample(&node, &mut again), "{pattern}: sample {i} differs under the same seed");
        }
    }
    Ok(format!("{} patterns x {REGEX_SAMPLES} samples", corpus.len()))
}

fn main() -> ExitCode {
    let env = Env::new();
    let spy = SpyTransport::new(HttpTransport::new().expect("client"));
    let com = env.run(OrderStrategy::Com, FaultFlags::default(), &spy);

    let criteria: Vec<Criterion<'_>> = vec![
        ("grammar conformance", Box::new(grammar)),
        ("verdict table", Box::new(verdict_table)),
        ("correct COM run", Box::new(|| com_run(&com))),
        ("correct CMO run", Box::new(|| cmo_run(&env))),
        ("fault detection matrix", Box::new(|| fault_matrix(&env))),
        ("quantified formula oracle", Box::new(|| quantified_oracle(&env))),
        ("regex generation", Box::new(regex_samples)),
        ("purity audit", Box::new(|| purity(&com, &spy))),
        ("effect reversal", Box::new(|| reversal(&env, &com))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let reason = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {reason}"))
        });
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
