mod common;

use std::sync::Arc;
use std::time::Duration;

use common::*;
use ml_workbench::server::{serve, serve_on};
use ml_workbench::session::{run_session, ScriptedIo};
use serde_json::Value;

fn seeded_fixture() -> (tempfile::TempDir, ml_workbench::session::WorkbenchConfig) {
    let (dir, config) = fixture();
    write_ledger(&config.ledger, &synthetic_records(60, 9, &config.energy));
    (dir, config)
}

struct Client {
    http: reqwest::Client,
    base: String,
}

impl Client {
    async fn start() -> (tempfile::TempDir, Client) {
        let (dir, config) = seeded_fixture();
        let wb = Arc::new(workbench(config));
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        tokio::spawn(serve_on(listener, wb));
        (dir, Client { http: reqwest::Client::new(), base })
    }

    async fn open(&self) -> String {
        let r = self.http.post(format!("{}/sessions", self.base)).send().await.unwrap();
        assert_eq!(r.status(), 201);
        r.json::<Value>().await.unwrap()["session_id"].as_str().unwrap().to_string()
    }

    async fn say(&self, id: &str, text: &str) -> reqwest::StatusCode {
        let url = format!("{}/sessions/{id}/messages", self.base);
        self.http.post(url).json(&serde_json::json!({ "text": text })).send().await.unwrap().status()
    }

    async fn page(&self, id: &str, after: usize, wait_ms: u64) -> Value {
        let url = format!("{}/sessions/{id}/events?after={after}&wait_ms={wait_ms}", self.base);
        self.http.get(url).send().await.unwrap().json().await.unwrap()
    }

    /// Polls from `from` until an event of `kind`; returns the events up to it and the next index.
    async fn until(&self, id: &str, from: usize, kind: &str) -> (Vec<Value>, usize) {
        let mut seen = Vec::new();
        for _ in 0..100 {
            let page = self.page(id, from + seen.len(), 5_000).await;
            for e in page["events"].as_array().unwrap() {
                seen.push(e.clone());
                if e["kind"] == kind {
                    let next = from + seen.len();
                    return (seen, next);
                }
            }
            assert!(page["closed"] == false, "session closed before {kind}: {seen:?}");
        }
        panic!("no {kind} event: {seen:?}");
    }

    async fn get(&self, path: &str) -> reqwest::Response {
        self.http.get(format!("{}{path}", self.base)).send().await.unwrap()
    }
}

async fn preprocessed(c: &Client, id: &str) -> usize {
    let (_, at) = c.until(id, 0, "prompt").await;
    c.say(id, IRIS_PREPROCESS).await;
    for a in iris_answers() {
        assert_eq!(c.say(id, &a).await, 202);
    }
    let (_, at) = c.until(id, at, "result").await;
    c.until(id, at, "prompt").await.1
}

#[tokio::test(flavor = "multi_thread")]
async fn request_through_the_api() {
    let (_dir, c) = Client::start().await;
    assert_eq!(c.get("/health").await.text().await.unwrap(), "ok");
    let id = c.open().await;
    let at = preprocessed(&c, &id).await;

    c.say(&id, CASE2).await;
    let (seen, at) = c.until(&id, at, "confirm").await;
    let kinds: Vec<&str> = seen.iter().map(|e| e["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["estimate", "confirm"]);
    assert!(seen[0]["payload"]["text"].as_str().unwrap().starts_with("Predicted execution time (in sec): "));
    c.say(&id, "y").await;
    let (seen, _) = c.until(&id, at, "result").await;
    let result = &seen.last().unwrap()["payload"];
    assert_eq!(result["kind"], "dimensionality");
    assert_eq!(result["frame"]["bindings"]["NB_CMPS"]["value"], "3");
    let rid = result["request_id"].as_str().unwrap();

    let bundle: Value = c.get(&format!("/bundles/{rid}")).await.json().await.unwrap();
    assert_eq!(bundle["request_id"], rid);
    let svg = bundle["plots"][0]["file"].as_str().unwrap().to_string();
    let r = c.get(&format!("/bundles/{rid}/{svg}")).await;
    assert_eq!(r.status(), 200);
    assert_eq!(r.headers()["content-type"], "image/svg+xml");
    assert!(r.text().await.unwrap().starts_with("<svg"));

    assert_eq!(c.get(&format!("/bundles/{rid}/..%2F..%2Fledger.jsonl")).await.status(), 400);
    assert_eq!(c.get("/bundles/_1999-01-01_00-00-00").await.status(), 404);
    assert_eq!(c.get("/bundles/not-a-request").await.status(), 404);
    assert_eq!(c.get("/sessions/s999/events").await.status(), 404);

    let r = c.http.delete(format!("{}/sessions/{id}", c.base)).send().await.unwrap();
    assert_eq!(r.status(), 204);
    assert_eq!(c.say(&id, "hello").await, 404);
}

#[tokio::test(flavor = "multi_thread")]
async fn declined_request_has_no_result() {
    let (dir, c) = Client::start().await;
    let id = c.open().await;
    let at = preprocessed(&c, &id).await;
    c.say(&id, CASE1).await;
    c.say(&id, "n").await;
    let (seen, _) = c.until(&id, at, "prompt").await;
    let kinds: Vec<&str> = seen.iter().map(|e| e["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["estimate", "confirm", "info", "prompt"]);
    assert_eq!(seen[2]["payload"]["text"], "The request was not launched.");
    assert!(!dir.path().join("out").exists() || dir.path().join("out").read_dir().unwrap().count() == 0);
}

#[tokio::test(flavor = "multi_thread")]
async fn stream_delivers_events() {
    let (_dir, c) = Client::start().await;
    let id = c.open().await;
    c.say(&id, "quit").await;
    let body = tokio::time::timeout(Duration::from_secs(10), c.get(&format!("/sessions/{id}/stream")))
        .await
        .unwrap()
        .text()
        .await
        .unwrap();
    assert!(body.contains("event: prompt"), "{body}");
    assert!(body.contains("id: 0"), "{body}");
    assert_eq!(c.say(&id, "again").await, 410);
}

fn normalized(mut e: Value) -> Value {
    let obj = e.as_object_mut().unwrap();
    obj.remove("seq");
    if let Some(p) = obj.get_mut("payload").and_then(Value::as_object_mut) {
        p.remove("bundle");
        p.remove("files");
    }
    e
}

#[tokio::test(flavor = "multi_thread")]
async fn api_and_scripted_sessions_agree() {
    let script = full_script();

    let (_d1, config) = seeded_fixture();
    let wb = workbench(config);
    let mut io = ScriptedIo::new(script.clone());
    let local = tokio::task::spawn_blocking(move || {
        run_session(&wb, &mut io);
        io.events
    })
    .await
    .unwrap();
    let local: Vec<Value> = local.into_iter().map(|e| normalized(serde_json::to_value(e).unwrap())).collect();

    let (_d2, c) = Client::start().await;
    let id = c.open().await;
    for line in &script {
        c.say(&id, line).await;
    }
    c.say(&id, "quit").await;
    let mut remote = Vec::new();
    loop {
        let page = c.page(&id, remote.len(), 5_000).await;
        remote.extend(page["events"].as_array().unwrap().iter().cloned().map(normalized));
        if page["closed"] == true && page["events"].as_array().unwrap().is_empty() {
            break;
        }
    }
    assert_eq!(remote.len(), local.len());
    for (r, l) in remote.iter().zip(&local) {
        assert_eq!(r, l);
    }
}

#[tokio::test]
async fn busy_port_is_a_startup_error() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let (_dir, mut config) = fixture();
    config.port = taken.local_addr().unwrap().port();
    let err = serve(config).await.unwrap_err();
    assert!(err.to_string().contains("cannot listen on"), "{err}");
}
