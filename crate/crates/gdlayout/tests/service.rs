use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use gdlayout::service::{router, router_with, ServiceOptions};
use gdlayout_core::{
    random_layout, run, CriterionId, Family, Graph, Optimizer, OptimizerConfig, WeightSchedule, Weights,
};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const WAIT: Duration = Duration::from_secs(60);

async fn send(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Router, body: Value) -> String {
    let (status, v) = send(app, Method::POST, "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

async fn post(app: &Router, uri: &str) -> Value {
    let (status, v) = send(app, Method::POST, uri, None).await;
    assert_eq!(status, StatusCode::OK, "{uri}: {v}");
    v
}

async fn get(app: &Router, uri: &str) -> Value {
    let (status, v) = send(app, Method::GET, uri, None).await;
    assert_eq!(status, StatusCode::OK, "{uri}: {v}");
    v
}

struct Events {
    body: Body,
    buf: Vec<u8>,
}

impl Events {
    async fn open(app: &Router, uri: &str) -> Events {
        let req = Request::builder().uri(uri).body(Body::empty()).unwrap();
        let res = app.clone().oneshot(req).await.unwrap();
        assert_eq!(res.status(), StatusCode::OK);
        Events { body: res.into_body(), buf: Vec::new() }
    }

    async fn next(&mut self) -> Option<Value> {
        loop {
            if let Some(end) = self.buf.iter().position(|&b| b == b'\n') {
                let line: Vec<u8> = self.buf.drain(..=end).collect();
                return Some(serde_json::from_slice(&line).unwrap());
            }
            let frame = tokio::time::timeout(WAIT, self.body.frame()).await.expect("stream stalled")?;
            if let Ok(data) = frame.unwrap().into_data() {
                self.buf.extend_from_slice(&data);
            }
        }
    }

    /// Every remaining event, up to and including the terminal one.
    async fn drain(&mut self) -> Vec<Value> {
        let mut out = Vec::new();
        while let Some(e) = self.next().await {
            out.push(e);
        }
        out
    }
}

fn snapshots(events: &[Value]) -> Vec<&Value> {
    events.iter().filter(|e| e["event"] == "snapshot").collect()
}

fn positions(v: &Value) -> Vec<[f64; 2]> {
    serde_json::from_value(v["positions"].clone()).unwrap()
}

#[tokio::test(flavor = "multi_thread")]
async fn create_and_describe() {
    let app = router();
    let a = create(&app, json!({ "family": { "name": "cycle", "n": 10 } })).await;
    let b = create(&app, json!({ "family": { "name": "cycle", "n": 10 } })).await;
    assert_ne!(a, b);
    let v = get(&app, &format!("/sessions/{a}")).await;
    assert_eq!(v["status"], "paused");
    assert_eq!(v["iteration"], 0);
    assert_eq!(positions(&v).len(), 10);
    assert_eq!(v["weights"], json!({ "ST": 1.0 }));

    let split = json!({ "graph": { "nodes": ["a", "b", "c"], "edges": [["a", "b"]] } });
    assert_eq!(send(&app, Method::POST, "/sessions", Some(split)).await.0, StatusCode::BAD_REQUEST);
    let both = json!({ "family": { "name": "cube" }, "graph": { "nodes": ["a"], "edges": [] } });
    assert_eq!(send(&app, Method::POST, "/sessions", Some(both)).await.0, StatusCode::BAD_REQUEST);
    let bad_family = json!({ "family": { "name": "petersen" } });
    assert_eq!(send(&app, Method::POST, "/sessions", Some(bad_family)).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(send(&app, Method::GET, "/sessions/nope", None).await.0, StatusCode::NOT_FOUND);
    let typo = json!({ "family": { "name": "cube" }, "iterations": 10 });
    assert!(send(&app, Method::POST, "/sessions", Some(typo)).await.0.is_client_error());
}

#[tokio::test(flavor = "multi_thread")]
async fn snapshots_follow_cadence_and_stream_ends() {
    let app = router();
    let id = create(&app, json!({ "family": { "name": "cycle", "n": 10 }, "iters": 95, "cadence": 10 })).await;
    let mut events = Events::open(&app, &format!("/sessions/{id}/stream?qualities=true")).await;
    let first = events.next().await.unwrap();
    assert_eq!((first["event"].as_str(), first["status"].as_str()), (Some("status"), Some("paused")));
    post(&app, &format!("/sessions/{id}/resume")).await;
    let rest = events.drain().await;
    let snaps = snapshots(&rest);
    let iterations: Vec<u64> = snaps.iter().map(|s| s["iteration"].as_u64().unwrap()).collect();
    assert_eq!(iterations, (1..=9).map(|k| 10 * k).collect::<Vec<_>>());
    for s in &snaps {
        assert_eq!(positions(s).len(), 10);
        assert!(s["losses"]["ST"].is_number());
        assert!(s["qualities"]["CN"].is_number());
    }
    let last = rest.last().unwrap();
    assert_eq!((last["event"].as_str(), last["status"].as_str()), (Some("status"), Some("finished")));
    assert_eq!(last["iteration"], 95);
    assert_eq!(send(&app, Method::POST, &format!("/sessions/{id}/resume"), None).await.0, StatusCode::CONFLICT);
}

#[tokio::test(flavor = "multi_thread")]
async fn pause_resume_and_heartbeat() {
    let app = router_with(ServiceOptions { heartbeat: Duration::from_millis(30) });
    let id = create(&app, json!({ "family": { "name": "grid", "w": 10, "h": 10 }, "iters": 100000, "lr": 0.01 })).await;
    let uri = format!("/sessions/{id}");
    let mut events = Events::open(&app, &format!("{uri}/stream")).await;
    assert_eq!(events.next().await.unwrap()["status"], "paused");
    for _ in 0..2 {
        let e = events.next().await.unwrap();
        assert_eq!((e["event"].as_str(), e["iteration"].as_u64()), (Some("heartbeat"), Some(0)));
    }
    assert_eq!(post(&app, &format!("{uri}/pause")).await["status"], "paused");

    post(&app, &format!("{uri}/resume")).await;
    tokio::time::sleep(Duration::from_millis(20)).await;
    let paused = post(&app, &format!("{uri}/pause")).await;
    let k = paused["iteration"].as_u64().unwrap();
    assert_eq!(post(&app, &format!("{uri}/pause")).await["iteration"], k);
    let before = get(&app, &uri).await;
    tokio::time::sleep(Duration::from_millis(100)).await;
    let after = get(&app, &uri).await;
    assert_eq!(before["iteration"], k);
    assert_eq!(after["iteration"], k);
    assert_eq!(before["positions"], after["positions"]);

    // Snapshots continue in cadence steps across the pause: nothing restarts.
    post(&app, &format!("{uri}/resume")).await;
    let mut expected = 10;
    while expected <= k + 30 {
        let e = events.next().await.unwrap();
        if e["event"] == "snapshot" {
            assert_eq!(e["iteration"], expected);
            expected += 10;
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn weight_changes_apply_at_the_next_iteration() {
    let app = router();
    let id = create(
        &app,
        json!({ "family": { "name": "grid", "w": 10, "h": 10 }, "iters": 100000, "lr": 0.01, "cadence": 5 }),
    )
    .await;
    let uri = format!("/sessions/{id}");
    let mut events = Events::open(&app, &format!("{uri}/stream")).await;
    post(&app, &format!("{uri}/resume")).await;
    let (status, ack) =
        send(&app, Method::PATCH, &format!("{uri}/weights"), Some(json!({ "ST": 1, "CAM": 0.3 }))).await;
    assert_eq!(status, StatusCode::OK);
    let at = ack["applies_at"].as_u64().unwrap();
    let mut seen_after = 0;
    while seen_after < 3 {
        let e = events.next().await.unwrap();
        if e["event"] != "snapshot" {
            continue;
        }
        let it = e["iteration"].as_u64().unwrap();
        if it > at {
            assert!(e["losses"]["CAM"].is_number(), "{e}");
            seen_after += 1;
        } else if it + 5 <= at {
            assert!(e["losses"].get("CAM").is_none(), "{e}");
        }
    }
    assert_eq!(
        send(&app, Method::PATCH, &format!("{uri}/weights"), Some(json!({ "ST": -1 }))).await.0,
        StatusCode::BAD_REQUEST
    );
    assert_eq!(
        send(&app, Method::PATCH, &format!("{uri}/weights"), Some(json!({ "XY": 1 }))).await.0,
        StatusCode::BAD_REQUEST
    );
    assert_eq!(
        send(&app, Method::PATCH, "/sessions/nope/weights", Some(json!({ "ST": 1 }))).await.0,
        StatusCode::NOT_FOUND
    );

    send(&app, Method::PATCH, &format!("{uri}/weights"), Some(json!({ "ST": 0 }))).await;
    tokio::time::sleep(Duration::from_millis(20)).await;
    let before = get(&app, &uri).await;
    tokio::time::sleep(Duration::from_millis(100)).await;
    let after = get(&app, &uri).await;
    assert_eq!(after["status"], "running");
    assert_eq!(before["iteration"], after["iteration"]);
    assert_eq!(before["positions"], after["positions"]);
}

#[tokio::test(flavor = "multi_thread")]
async fn weight_change_replays_exactly() {
    let app = router();
    let id = create(&app, json!({ "family": { "name": "dodecahedron" }, "seed": 3, "iters": 20000, "lr": 0.01 })).await;
    let uri = format!("/sessions/{id}");
    let mut events = Events::open(&app, &format!("{uri}/stream")).await;
    post(&app, &format!("{uri}/resume")).await;
    let k = post(&app, &format!("{uri}/pause")).await["iteration"].as_u64().unwrap() as usize;
    let (_, ack) = send(&app, Method::PATCH, &format!("{uri}/weights"), Some(json!({ "ST": 1, "VR": 0.5 }))).await;
    assert_eq!(ack["applies_at"], k);
    post(&app, &format!("{uri}/resume")).await;
    let last = events.drain().await.pop().unwrap();
    assert_eq!(last["status"], "finished");
    let served = positions(&get(&app, &uri).await);

    let g = Graph::generate(Family::Dodecahedron).unwrap();
    let schedule = WeightSchedule::constant(Weights::single(CriterionId::Stress, 1.0));
    let config = OptimizerConfig { seed: 3, iters: 20000, lr: 0.01, ..OptimizerConfig::default() };
    let mut opt = Optimizer::new(g, random_layout(20, 3), schedule, config).unwrap();
    for _ in 0..k {
        opt.step().unwrap();
    }
    let mut w = Weights::single(CriterionId::Stress, 1.0);
    w.set(CriterionId::VertexResolution, 0.5);
    opt.set_weights(w).unwrap();
    while opt.stop_reason().is_none() {
        opt.step().unwrap();
    }
    let replayed: Vec<[f64; 2]> = opt.layout().positions().iter().map(|&p| p.into()).collect();
    assert_eq!(served, replayed);
    assert_eq!(last["iteration"].as_u64().unwrap() as usize, opt.iteration());
}

#[tokio::test(flavor = "multi_thread")]
async fn drag_moves_and_pins() {
    let app = router();
    let id = create(&app, json!({ "family": { "name": "cycle", "n": 10 }, "iters": 300, "cadence": 1 })).await;
    let uri = format!("/sessions/{id}");
    let (status, ack) = send(
        &app,
        Method::POST,
        &format!("{uri}/drag"),
        Some(json!({ "node": 3, "position": [9.0, 9.0], "hold": 50 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ack["applies_at"], 0);
    assert_eq!(positions(&get(&app, &uri).await)[3], [9.0, 9.0]);

    let bad =
        send(&app, Method::POST, &format!("{uri}/drag"), Some(json!({ "node": 10, "position": [0.0, 0.0] }))).await;
    assert_eq!(bad.0, StatusCode::BAD_REQUEST);
    let req = Request::builder()
        .method(Method::POST)
        .uri(format!("{uri}/drag"))
        .header("content-type", "application/json")
        .body(Body::from(r#"{"node": 1, "position": [NaN, 0]}"#))
        .unwrap();
    assert!(app.clone().oneshot(req).await.unwrap().status().is_client_error());
    let huge =
        send(&app, Method::POST, &format!("{uri}/drag"), Some(json!({ "node": 1, "position": [0.0, 1e308] }))).await;
    assert_eq!(huge.0, StatusCode::OK);
    send(&app, Method::POST, &format!("{uri}/drag"), Some(json!({ "node": 1, "position": [0.5, 0.5] }))).await;

    let mut events = Events::open(&app, &format!("{uri}/stream")).await;
    post(&app, &format!("{uri}/resume")).await;
    let all = events.drain().await;
    let snaps = snapshots(&all);
    assert_eq!(snaps.len(), 300);
    for s in &snaps {
        let it = s["iteration"].as_u64().unwrap();
        let p = positions(s)[3];
        if it <= 50 {
            assert_eq!(p, [9.0, 9.0], "iteration {it}");
        } else if it == 51 {
            assert_ne!(p, [9.0, 9.0]);
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn delete_forgets_session() {
    let app = router();
    let id = create(&app, json!({ "family": { "name": "cube" } })).await;
    let uri = format!("/sessions/{id}");
    let mut events = Events::open(&app, &format!("{uri}/stream")).await;
    events.next().await.unwrap();
    assert_eq!(send(&app, Method::DELETE, &uri, None).await.0, StatusCode::NO_CONTENT);
    let last = events.drain().await.pop().unwrap();
    assert_eq!(last["status"], "deleted");
    assert_eq!(send(&app, Method::GET, &uri, None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(send(&app, Method::DELETE, &uri, None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(send(&app, Method::POST, &format!("{uri}/pause"), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread")]
async fn uninterrupted_session_matches_run() {
    let app = router();
    let body = json!({ "family": { "name": "grid", "w": 4, "h": 4 }, "seed": 5, "iters": 600, "weights": { "ST": 1, "CN": 2 } });
    let id = create(&app, body).await;
    let uri = format!("/sessions/{id}");
    let mut events = Events::open(&app, &format!("{uri}/stream")).await;
    post(&app, &format!("{uri}/resume")).await;
    events.drain().await;
    let req = Request::builder().uri(format!("{uri}/layout")).body(Body::empty()).unwrap();
    let served = app.clone().oneshot(req).await.unwrap().into_body().collect().await.unwrap().to_bytes();

    let g = Graph::generate(Family::Grid { w: 4, h: 4 }).unwrap();
    let mut w = Weights::single(CriterionId::Stress, 1.0);
    w.set(CriterionId::Crossings, 2.0);
    let schedule = WeightSchedule::constant(w);
    let config = OptimizerConfig { seed: 5, iters: 600, ..OptimizerConfig::default() };
    let out = run(&g, &random_layout(16, 5), &schedule, &config).unwrap();
    let meta = gdlayout::io::LayoutMeta::new(5, out.iterations, &schedule);
    assert_eq!(served.as_ref(), gdlayout::io::write_layout(&out.layout, Some(&meta)).as_slice());
}
