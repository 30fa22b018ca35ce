use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use sbr_core::store::{load_catalog, Verdict};

fn sbr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbr")).args(args).output().unwrap()
}

fn demo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn build_demo(dir: &Path) -> PathBuf {
    let out = dir.join("catalog.sbr");
    let o = sbr(&["build", "--manifest", arg(&demo().join("manifest.json")), "--output", arg(&out), "--workers", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn validate_exit_codes() {
    let ok = sbr(&["validate", arg(&demo().join("ontology.jsonl"))]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("70 topics"));

    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cycle.jsonl");
    std::fs::write(
        &cyclic,
        concat!(
            "{\"rec\":\"topic\",\"id\":\"A\",\"label\":\"a\"}\n",
            "{\"rec\":\"topic\",\"id\":\"B\",\"label\":\"b\"}\n",
            "{\"rec\":\"edge\",\"kind\":\"broaderGeneric\",\"src\":\"A\",\"dst\":\"B\"}\n",
            "{\"rec\":\"edge\",\"kind\":\"broaderGeneric\",\"src\":\"B\",\"dst\":\"A\"}\n",
        ),
    )
    .unwrap();
    let bad = sbr(&["validate", arg(&cyclic)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("cycle") && stderr(&bad).contains('A'), "{}", stderr(&bad));

    let missing = sbr(&["validate", arg(&dir.path().join("absent.jsonl"))]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(sbr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(sbr(&["build"]).status.code(), Some(1));
    assert_eq!(sbr(&["build", "--manifest", arg(&demo().join("manifest.json")), "--jaccard-threshold", "1.5"]).status.code(), Some(1));
    assert_eq!(sbr(&["--help"]).status.code(), Some(0));
}

fn oracle_records() -> BTreeMap<(String, String), f64> {
    std::fs::read_to_string(demo().join("expected_scores.tsv"))
        .unwrap()
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            ((f[0].to_owned(), f[1].to_owned()), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn build_matches_oracle_and_writes_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("catalog.sbr");
    let tsv = dir.path().join("scores.tsv");
    let ann = dir.path().join("annotations.jsonl");
    let o = sbr(&[
        "build",
        "--manifest",
        arg(&demo().join("manifest.json")),
        "--output",
        arg(&out),
        "--scores-tsv",
        arg(&tsv),
        "--annotations",
        arg(&ann),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("candidate_pairs=288"));

    let catalog = load_catalog(&out).unwrap();
    let got: BTreeMap<_, _> =
        catalog.scores.values().flatten().map(|r| ((r.conference_id.clone(), r.product_id.clone()), r.score)).collect();
    let want = oracle_records();
    assert_eq!(got.keys().collect::<Vec<_>>(), want.keys().collect::<Vec<_>>());
    for (k, w) in &want {
        assert!((got[k] - w).abs() <= 1e-9, "{k:?}");
    }
    assert_eq!(std::fs::read_to_string(&tsv).unwrap().lines().count(), want.len());
    assert_eq!(std::fs::read_to_string(&ann).unwrap().lines().count(), catalog.products.len());
}

#[test]
fn build_from_flags_without_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("strict.sbr");
    let o = sbr(&[
        "build",
        "--ontology",
        arg(&demo().join("ontology.jsonl")),
        "--metadata",
        arg(&demo().join("metadata.jsonl")),
        "--reference-year",
        "2018",
        "--jaccard-threshold",
        "1.0",
        "--cosine-threshold",
        "1.0",
        "--inclusive-cosine",
        "--output",
        arg(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let catalog = load_catalog(&out).unwrap();
    for r in catalog.scores.values().flatten() {
        let (c, p) = (&catalog.products[&r.conference_id], &catalog.products[&r.product_id]);
        assert_eq!(c.weights.keys().collect::<Vec<_>>(), p.weights.keys().collect::<Vec<_>>());
        assert!((r.score - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn build_without_conferences_warns() {
    let dir = tempfile::tempdir().unwrap();
    let books: String = std::fs::read_to_string(demo().join("metadata.jsonl"))
        .unwrap()
        .lines()
        .filter(|l| !l.contains("\"proceedings\""))
        .map(|l| format!("{l}\n"))
        .collect();
    let meta = dir.path().join("books.jsonl");
    std::fs::write(&meta, books).unwrap();
    let out = dir.path().join("c.sbr");
    let o = sbr(&[
        "build",
        "--ontology",
        arg(&demo().join("ontology.jsonl")),
        "--metadata",
        arg(&meta),
        "--reference-year",
        "2018",
        "--output",
        arg(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("no conference series"));
    assert_eq!(load_catalog(&out).unwrap().record_count(), 0);
}

#[test]
fn build_reports_missing_input_as_io() {
    let dir = tempfile::tempdir().unwrap();
    let o = sbr(&[
        "build",
        "--ontology",
        arg(&demo().join("ontology.jsonl")),
        "--metadata",
        arg(&dir.path().join("absent.jsonl")),
        "--reference-year",
        "2018",
        "--output",
        arg(&dir.path().join("c.sbr")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("absent.jsonl"));
}

#[test]
fn recommend_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = build_demo(dir.path());
    let c = arg(&catalog);

    let o = sbr(&["recommend", "--catalog", c, "--conference", "conf:iswc", "--current-year", "2018", "--limit", "5"]);
    assert!(o.status.success());
    let rows = stdout(&o).lines().filter(|l| l.trim_start().chars().next().is_some_and(|ch| ch.is_ascii_digit())).count();
    assert!(rows > 0 && rows <= 5);

    let o = sbr(&["recommend", "--catalog", c, "--conference", "conf:iswc", "--current-year", "2018", "--kinds", "book", "--format", "json"]);
    assert!(o.status.success());
    let cards: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!cards.is_empty());
    assert!(cards.iter().all(|c| c["kind"] == "book"));

    let o = sbr(&["recommend", "--catalog", c, "--conference", "conf:nowhere"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("conf:nowhere"));

    let o = sbr(&["recommend", "--catalog", c, "--conference", "conf:iswc", "--from", "2019", "--to", "2010"]);
    assert_eq!(o.status.code(), Some(1));

    let csv_path = dir.path().join("out.csv");
    let o = sbr(&["export", "--catalog", c, "--conference", "conf:iswc", "--current-year", "2018", "--limit", "2", "-o", arg(&csv_path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.matches("\r\n").count(), 3);

    let o = sbr(&["export", "--catalog", c, "--conference", "conf:iswc", "--current-year", "2018", "--format", "json"]);
    let exported: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    let o = sbr(&["recommend", "--catalog", c, "--conference", "conf:iswc", "--current-year", "2018", "--format", "json"]);
    let shown: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(exported, shown);
}

#[test]
fn rebuild_keeps_feedback() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = build_demo(dir.path());
    let line = r#"{"conference_id":"conf:iswc","product_id":"book:10.1007/978-3-319-01026","verdict":"positive","timestamp":1}
{"conference_id":"conf:iswc","product_id":"book:gone","verdict":"negative","timestamp":2}
"#;
    std::fs::write(sbr_core::store::feedback_path(&catalog), line).unwrap();
    let before = std::fs::read(&catalog).unwrap();
    build_demo(dir.path());
    assert_eq!(std::fs::read(&catalog).unwrap(), before);
    let reloaded = load_catalog(&catalog).unwrap();
    assert_eq!(reloaded.feedback.len(), 1);
    assert_eq!(reloaded.latest_feedback("conf:iswc", "book:10.1007/978-3-319-01026"), Some(Verdict::Positive));
}

fn http(addr: &str, request: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    s.write_all(request.as_bytes()).unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[cfg(unix)]
#[test]
fn serve_answers_and_stops_on_sigterm() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = build_demo(dir.path());
    let mut child = Command::new(env!("CARGO_BIN_EXE_sbr"))
        .args(["serve", "--catalog", arg(&catalog), "--bind", "127.0.0.1:0", "--current-year", "2018"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut logs = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    let addr = loop {
        line.clear();
        assert!(logs.read_line(&mut line).unwrap() > 0, "server exited before listening");
        if let Some(rest) = line.split("addr=").nth(1) {
            break rest.split_whitespace().next().unwrap().to_owned();
        }
    };

    let resp = http(&addr, "GET /conferences?q=ISWC HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("conf:iswc"));

    let body = r#"{"conference_id":"conf:iswc","product_id":"book:10.1007/978-3-319-01026","verdict":"negative"}"#;
    let resp = http(
        &addr,
        &format!(
            "POST /feedback HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        ),
    );
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");

    let status = Command::new("kill").args(["-TERM", &child.id().to_string()]).status().unwrap();
    assert!(status.success());
    assert!(child.wait().unwrap().success());
    let mut rest = String::new();
    logs.read_to_string(&mut rest).unwrap();
    assert!(rest.contains("/conferences"), "request not logged: {rest}");

    let reloaded = load_catalog(&catalog).unwrap();
    assert_eq!(reloaded.latest_feedback("conf:iswc", "book:10.1007/978-3-319-01026"), Some(Verdict::Negative));
}

#[test]
fn serve_rejects_corrupt_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sbr");
    std::fs::write(&path, "not a catalog\n").unwrap();
    let o = sbr(&["serve", "--catalog", arg(&path), "--bind", "127.0.0.1:0"]);
    assert_eq!(o.status.code(), Some(2));
}
