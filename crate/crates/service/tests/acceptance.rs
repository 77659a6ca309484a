//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so each criterion reports its
//! own measurement. Exits non-zero if any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod oracle;
mod support;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::http::{Method, StatusCode};
use guifusion_core::app_model::parse_app_model;
use guifusion_core::flow::{steps_from_events, START};
use guifusion_core::maintenance::sequence_similarity;
use guifusion_core::reporting::{CrawlOptions, ReplayOutcome, SECTION_TITLES};
use guifusion_core::reporting::MatchLevel;
use guifusion_core::{
    crawl_for_crashes, detect_duplicates, fixtures, render_report, replay_report, report_similarity, rip,
    suggest_next, to_canonical_json, train_ngram, AppDatabase, BugReport, CrawlStrategy, EventToken, OwnershipMap,
    ReportFormat, SimilarityConfig,
};
use guifusion_service::Store;
use serde_json::json;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn toks(s: &[&str]) -> Vec<EventToken> {
    s.iter().map(|t| t.parse().unwrap()).collect()
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn ripper_oracle_equivalence() -> Check {
    let mut slowest = Duration::ZERO;
    for (name, src) in fixtures::ALL {
        let model = parse_app_model(src).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let out = rip(&model, &oracle::unbounded());
        let took = t.elapsed();
        slowest = slowest.max(took);
        let expected = oracle::bfs(&model);
        let got = oracle::project(&out.graph);
        ensure!(got.screens == expected.screens, "{name}: states {:?} != {:?}", got.screens, expected.screens);
        ensure!(got.edges == expected.edges, "{name}: edge sets differ");
        ensure!(out.graph.states.len() == expected.screens.len(), "{name}: duplicate states");
        ensure!(took < Duration::from_secs(1), "{name}: took {}", ms(took));
    }
    Ok(format!("{} fixtures exact, slowest {}", fixtures::ALL.len(), ms(slowest)))
}

fn round_trip_reproduction() -> Check {
    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let t = Instant::now();
    let reach = oracle::bfs(&db.model);
    let paths = oracle::paths(&db.model, &reach, 5);
    let mut crash_paths = 0;
    for (i, path) in paths.iter().enumerate() {
        let report = oracle::report_for(&db, &format!("p{i}"), path);
        let result = replay_report(&report, &db.model);
        let expected = if report.crash.is_some() {
            crash_paths += 1;
            ReplayOutcome::CrashReproduced
        } else {
            ReplayOutcome::Reproduced
        };
        ensure!(result.outcome == expected, "{path:?}: {:?}", result.outcome);
    }
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(5), "took {}", ms(took));
    Ok(format!(
        "{}/{} paths of length <= 5 ({} ending in the crash), {}",
        paths.len(),
        paths.len(),
        crash_paths,
        ms(took)
    ))
}

fn suggestion_soundness() -> Check {
    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let t = Instant::now();
    let reach = oracle::bfs(&db.model);
    let histories = oracle::histories(&db.model, &reach, 4);
    for (history, screen) in &histories {
        let s = suggest_next(&steps_from_events(history), &db.graph, &db.universe, &db.ngram)
            .map_err(|e| format!("{history:?}: {e}"))?;
        let got: BTreeSet<String> = s.pairs().map(|t| t.to_string()).collect();
        ensure!(got == reach.outgoing(screen), "{history:?}: {got:?}");
    }
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(5), "took {}", ms(took));
    Ok(format!("{} histories of length <= 4 exact, {}", histories.len(), ms(took)))
}

fn ngram_correctness() -> Check {
    let mut contexts = 0;
    let mut worst: f64 = 0.0;
    for src in [fixtures::NOTEAPP_V1, fixtures::SETTINGSAPP, fixtures::SHOPCART] {
        let db = AppDatabase::from_fixture(src);
        for order in [2, 3, 4] {
            let m = train_ngram(&db.trace, db.graph.tokens(), order, 1.0).map_err(|e| e.to_string())?;
            for context in m.counts.keys() {
                let sum: f64 = m
                    .vocabulary
                    .iter()
                    .map(|t| m.probability(context, t).unwrap())
                    .sum();
                worst = worst.max((sum - 1.0).abs());
                contexts += 1;
            }
        }
    }
    ensure!(worst <= 1e-9, "max |sum - 1| = {worst:e}");

    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let trace = toks(&["tap@btn_new", "type@txt_title", "tap@btn_save"]);
    let m = train_ngram(&trace, db.graph.tokens(), 2, 1.0).map_err(|e| e.to_string())?;
    ensure!(m.vocabulary.len() == 7, "|V| = {}", m.vocabulary.len());
    ensure!(!m.vocabulary.iter().any(|t| t.to_string() == START), "START in vocabulary");
    let p = guifusion_core::ngram_score(&m, &trace[..1], &trace[1]).map_err(|e| e.to_string())?;
    ensure!(p == 0.25, "P = {p}");
    Ok(format!("{contexts} contexts, max |sum - 1| = {worst:.1e}; P(type@txt_title | tap@btn_new) = {p}"))
}

fn crash_crawling() -> Check {
    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let opts = CrawlOptions::default();
    let reports = crawl_for_crashes(&db, &CrawlStrategy::DfsComplete, &opts);
    ensure!(reports.len() == 1, "{} reports", reports.len());
    ensure!(
        reports[0].crash.as_deref() == Some("NullPointerException"),
        "crash {:?}",
        reports[0].crash
    );
    let reach = oracle::bfs(&db.model);
    let shortest = oracle::shortest_crash(&db.model, &reach);
    ensure!(shortest == Some(2), "oracle shortest {shortest:?}");
    ensure!(Some(reports[0].steps.len()) == shortest, "dfs path length {}", reports[0].steps.len());

    let mut runs = 0;
    for src in [fixtures::NOTEAPP_V1, fixtures::SETTINGSAPP, fixtures::SHOPCART] {
        let db = AppDatabase::from_fixture(src);
        for seed in [0, 1, 42] {
            for strategy in [
                CrawlStrategy::UniformRandom { seed, budget: 800 },
                CrawlStrategy::NgramWeighted { seed, budget: 800 },
            ] {
                let a = to_canonical_json(&crawl_for_crashes(&db, &strategy, &opts));
                let b = to_canonical_json(&crawl_for_crashes(&db, &strategy, &opts));
                ensure!(a == b, "{} seed {seed} differs between runs", strategy.name());
                runs += 1;
            }
        }
    }
    Ok(format!("dfs path length 2 = oracle; {runs} seeded crawls deterministic"))
}

fn adaptive_replay() -> Check {
    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let report = oracle::report_for(&db, "back", &toks(&["tap@btn_new", "type@txt_title", "tap@btn_back"]));
    let v2 = parse_app_model(fixtures::NOTEAPP_V2).map_err(|e| e.to_string())?;
    let r = replay_report(&report, &v2);
    ensure!(r.outcome == ReplayOutcome::Reproduced, "v2 outcome {:?}", r.outcome);
    ensure!(r.steps[2].match_level == MatchLevel::KindLabel, "v2 step 3 {:?}", r.steps[2].match_level);

    let redesign = parse_app_model(fixtures::NOTEAPP_V2_REDESIGN).map_err(|e| e.to_string())?;
    let r = replay_report(&report, &redesign);
    ensure!(r.outcome == ReplayOutcome::Diverged, "redesign outcome {:?}", r.outcome);
    ensure!(r.divergence_ordinal == Some(3), "diverged at {:?}", r.divergence_ordinal);
    Ok("2.0: reproduced, step 3 via kind+label; 2.1: diverged at step 3".to_owned())
}

fn dedup_properties() -> Check {
    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let cfg = SimilarityConfig::default();
    let reach = oracle::bfs(&db.model);
    let corpus: Vec<BugReport> = oracle::paths(&db.model, &reach, 3)
        .iter()
        .enumerate()
        .map(|(i, p)| oracle::report_for(&db, &format!("p{i:02}"), p))
        .collect();
    let mut pairs = 0;
    for a in &corpus {
        let self_score = report_similarity(a, a, &cfg).map_err(|e| e.to_string())?;
        ensure!(self_score == 1.0, "{}: self similarity {self_score}", a.report_id);
        for b in &corpus {
            let (ab, ba) = (
                report_similarity(a, b, &cfg).unwrap(),
                report_similarity(b, a, &cfg).unwrap(),
            );
            ensure!(ab == ba, "{} / {}: {ab} vs {ba}", a.report_id, b.report_id);
            pairs += 1;
        }
    }

    let a = oracle::report_for(&db, "a", &toks(&["tap@btn_new", "type@txt_title", "tap@btn_save"]));
    let b = oracle::report_for(&db, "b", &toks(&["tap@btn_new", "tap@btn_save"]));
    let score = sequence_similarity(&a.tokens(), &b.tokens(), &cfg);
    ensure!((score - 0.4).abs() < 1e-9, "worked pair {score}");
    let pair = [a, b];
    let strict = detect_duplicates(&pair, &cfg).map_err(|e| e.to_string())?;
    ensure!(strict.pairs.is_empty(), "tau 0.8 flagged the pair");
    let loose = detect_duplicates(&pair, &SimilarityConfig { tau: 0.3, ..cfg }).map_err(|e| e.to_string())?;
    ensure!(loose.pairs.len() == 1, "tau 0.3 did not flag the pair");
    Ok(format!("{pairs} ordered pairs symmetric, self = 1.0; worked pair {score}; tau 0.8 excludes, 0.3 includes"))
}

fn determinism() -> Check {
    let mut files = 0;
    for (name, src) in fixtures::ALL {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        AppDatabase::from_fixture(src).write(a.path()).map_err(|e| e.to_string())?;
        AppDatabase::from_fixture(src).write(b.path()).map_err(|e| e.to_string())?;
        let (sa, sb) = (oracle::snapshot(a.path()), oracle::snapshot(b.path()));
        ensure!(sa == sb, "{name}: database directories differ");
        files += sa.len();
    }
    let db = AppDatabase::from_fixture(fixtures::NOTEAPP_V1);
    let reach = oracle::bfs(&db.model);
    let mut docs = 0;
    for (i, p) in oracle::paths(&db.model, &reach, 3).iter().enumerate() {
        let r = oracle::report_for(&db, &format!("p{i}"), p);
        for f in [ReportFormat::Markdown, ReportFormat::Html, ReportFormat::Json] {
            ensure!(render_report(&r, f) == render_report(&r, f), "render differs for {p:?}");
            docs += 1;
        }
    }
    Ok(format!("{files} database files identical across runs; {docs} renders identical"))
}

/// Cells of the markdown step-table rows.
fn markdown_rows(doc: &str) -> Vec<Vec<String>> {
    doc.lines()
        .filter(|l| l.starts_with("| ") && l.as_bytes().get(2).is_some_and(u8::is_ascii_digit))
        .map(|l| l.trim_matches('|').split(" | ").map(|c| c.trim().to_owned()).collect())
        .collect()
}

fn html_rows(doc: &str) -> Vec<Vec<String>> {
    doc.lines()
        .filter(|l| l.starts_with("<tr><td>"))
        .map(|l| {
            l.trim_start_matches("<tr><td>")
                .trim_end_matches("</td></tr>")
                .split("</td><td>")
                .map(str::to_owned)
                .collect()
        })
        .collect()
}

fn report_structure() -> Check {
    let mut checked = 0;
    for src in [fixtures::NOTEAPP_V1, fixtures::SETTINGSAPP, fixtures::SHOPCART] {
        let db = AppDatabase::from_fixture(src);
        let reach = oracle::bfs(&db.model);
        for (i, p) in oracle::paths(&db.model, &reach, 3).iter().enumerate() {
            let r = oracle::report_for(&db, &format!("p{i}"), p);
            let shot_ok = |cell: &str| {
                db.screenshots
                    .keys()
                    .any(|id| cell.contains(&format!("screens/{id}.svg")))
            };

            let md = render_report(&r, ReportFormat::Markdown);
            let headings: Vec<&str> = md.lines().filter_map(|l| l.strip_prefix("# ")).collect();
            ensure!(headings == SECTION_TITLES, "markdown sections {headings:?}");
            let html = render_report(&r, ReportFormat::Html);
            ensure!(html.matches("<section").count() == 3, "html section count");
            for title in SECTION_TITLES {
                ensure!(html.contains(&format!("<h1>{title}</h1>")), "html missing {title}");
            }
            for (fmt, rows) in [("md", markdown_rows(&md)), ("html", html_rows(&html))] {
                ensure!(rows.len() == r.steps.len(), "{fmt}: {} rows for {} steps", rows.len(), r.steps.len());
                for (row, step) in rows.iter().zip(&r.steps) {
                    let rec = step.component.as_ref().ok_or("step without component record")?;
                    ensure!(row[1] == step.event.action.as_str(), "{fmt}: action {}", row[1]);
                    ensure!(row[2] == rec.kind.as_str(), "{fmt}: component type {}", row[2]);
                    ensure!(row[3] == rec.relative_location.to_string(), "{fmt}: location {}", row[3]);
                    ensure!(row[4] == rec.activity, "{fmt}: activity {}", row[4]);
                    ensure!(shot_ok(&row[5]), "{fmt}: screenshot {}", row[5]);
                }
            }
            let js: serde_json::Value =
                serde_json::from_str(&render_report(&r, ReportFormat::Json)).map_err(|e| e.to_string())?;
            let keys: Vec<&String> = js.as_object().ok_or("json not an object")?.keys().collect();
            ensure!(keys == ["preliminary", "screenshots", "steps"], "json sections {keys:?}");
            for row in js["steps"].as_array().ok_or("json steps")? {
                for field in ["action", "component_type", "relative_location", "activity", "component_screenshot"] {
                    ensure!(row[field].is_string(), "json step missing {field}");
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} reports x 3 formats: 3 sections, 5 step fields each"))
}

fn service_fidelity() -> Check {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let (dir, store) = support::noteapp_store();
        let db = store.database("noteapp", "1.0").map_err(|e| e.to_string())?;

        // suggestions along a history, step by step
        let session = support::new_session(&store, "1.0").await;
        let events = ["tap@btn_new", "type@txt_title", "tap@btn_back", "tap@btn_list", "tap@btn_home"];
        let fresh = support::get(&store, &format!("/api/sessions/{session}/suggestions")).await.json();
        let core = suggest_next(&[], &db.graph, &db.universe, &db.ngram).unwrap();
        ensure!(fresh["suggestion"] == serde_json::to_value(&core).unwrap(), "fresh suggestion differs");
        for (i, ev) in events.iter().enumerate() {
            let t: EventToken = ev.parse().unwrap();
            let mut body = json!({"action": t.action, "component_id": t.component});
            if t.action == guifusion_core::Action::Type {
                body["input_text"] = json!("");
            }
            let r = support::step(&store, &session, body).await;
            ensure!(r.status == StatusCode::OK, "step {ev}: {}", r.text);
            let core = suggest_next(&steps_from_events(&toks(&events[..=i])), &db.graph, &db.universe, &db.ngram)
                .unwrap();
            ensure!(r.json()["suggestion"] == serde_json::to_value(&core).unwrap(), "suggestion after {ev}");
        }
        let r = support::post(
            &store,
            &format!("/api/sessions/{session}/finalize"),
            json!({"title": "t", "device": "d", "created_at": "2024-01-01T00:00:00Z"}),
        )
        .await;
        ensure!(r.status == StatusCode::CREATED, "finalize: {}", r.text);
        let id = r.json()["report_id"].as_str().unwrap().to_owned();
        let report = store.report(&id).unwrap();

        // a second report for the dedup corpus
        let other = support::new_session(&store, "1.0").await;
        support::step(&store, &other, json!({"action": "tap", "component_id": "btn_list"})).await;
        support::post(&store, &format!("/api/sessions/{other}/finalize"), json!({"title": "u", "device": "d"})).await;

        for version in ["1.0", "2.0", "2.1"] {
            let r = support::post(&store, &format!("/api/reports/{id}/replay"), json!({"version": version})).await;
            let v = store.database("noteapp", version).unwrap();
            let core = replay_report(&report, &v.model);
            ensure!(r.json() == serde_json::to_value(&core).unwrap(), "replay on {version} differs");
        }

        let corpus: Vec<BugReport> = store.reports().iter().map(|r| (**r).clone()).collect();
        for tau in ["0.8", "0.3"] {
            let cfg = SimilarityConfig { tau: tau.parse().unwrap(), ..Default::default() };
            let core = detect_duplicates(&corpus, &cfg).unwrap();
            let r = support::get(&store, &format!("/api/reports/{id}/duplicates?tau={tau}")).await.json();
            let pairs: Vec<_> = core.involving(&id).cloned().collect();
            ensure!(r["pairs"] == serde_json::to_value(&pairs).unwrap(), "dedup pairs at tau {tau}");
            ensure!(r["cluster"] == serde_json::to_value(core.cluster_of(&id)).unwrap(), "dedup cluster at tau {tau}");
        }

        let owners: OwnershipMap = serde_json::from_value(json!({
            "alice": {"EditorActivity": 5, "MainActivity": 1},
            "bob": {"ListActivity": 3},
            "carol": {"ListActivity": 1, "MainActivity": 2}
        }))
        .unwrap();
        store.set_owners(&owners).map_err(|e| e.to_string())?;
        let r = support::get(&store, &format!("/api/reports/{id}/triage")).await.json();
        let core = guifusion_core::triage_report(&report, &owners).unwrap();
        ensure!(r["ranking"] == serde_json::to_value(&core).unwrap(), "triage differs");

        // restart: reopen the same directory and re-persist everything
        let open = support::new_session(&store, "2.0").await;
        support::step(&store, &open, json!({"action": "tap", "component_id": "btn_new"})).await;
        let before = oracle::snapshot(dir.path());
        let before_api = support::get(&store, &format!("/api/sessions/{open}/suggestions")).await.text;
        drop(store);
        let reopened = Arc::new(Store::open(dir.path()).map_err(|e| e.to_string())?);
        reopened.flush().map_err(|e| e.to_string())?;
        ensure!(oracle::snapshot(dir.path()) == before, "store bytes changed across restart");
        let after_api = support::get(&reopened, &format!("/api/sessions/{open}/suggestions")).await.text;
        ensure!(after_api == before_api, "session suggestions changed across restart");
        let gone = support::call(&reopened, Method::GET, "/api/sessions/s-999999/suggestions", None).await;
        ensure!(gone.status == StatusCode::NOT_FOUND, "unknown session status {}", gone.status);

        Ok(format!(
            "suggest/replay/dedup/triage payloads equal core; {} store files byte-identical after restart",
            before.len()
        ))
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("ripper oracle equivalence", ripper_oracle_equivalence),
        ("round-trip reproduction", round_trip_reproduction),
        ("suggestion soundness/completeness", suggestion_soundness),
        ("n-gram correctness", ngram_correctness),
        ("crash crawling", crash_crawling),
        ("adaptive replay", adaptive_replay),
        ("dedup properties", dedup_properties),
        ("determinism", determinism),
        ("report structure", report_structure),
        ("service fidelity", service_fidelity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
