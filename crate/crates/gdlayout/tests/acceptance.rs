//! Acceptance suite: one PASS/FAIL line per headline requirement.
//!
//! Runs without the libtest harness so the lines come out in order and
//! unbuffered. A failing check is reported, not hidden; the process exits
//! non-zero on failure only when `GDLAYOUT_ACCEPTANCE_STRICT=1`.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use gdlayout_core::criteria::{quality, NpConfig};
use gdlayout_core::geometry::detect_crossings;
use gdlayout_core::graph::shortest_paths;
use gdlayout_core::{
    random_layout, run, CriterionId, Family, Graph, Hyper, Layout, OptimizerConfig, Vec2, WeightSchedule, Weights,
};
use gdlayout_testkit::{brute_force_crossings, gradients, random_graph, random_points, rng, smacof};
use http_body_util::BodyExt;
use rand::Rng;
use serde_json::json;
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 7] = [
        ("gradient correctness", gradient_correctness),
        ("crossing elimination", crossing_elimination),
        ("stress-only convergence", stress_convergence),
        ("improvement rate", improvement_rate),
        ("quality-metric properties", quality_properties),
        ("single-criterion targets", single_criterion_targets),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.1} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 && std::env::var("GDLAYOUT_ACCEPTANCE_STRICT").as_deref() == Ok("1") {
        std::process::exit(1);
    }
}

fn stress_only() -> WeightSchedule {
    WeightSchedule::constant(Weights::single(CriterionId::Stress, 1.0))
}

fn q(c: CriterionId, g: &Graph, x: &Layout, np: NpConfig) -> f64 {
    let d = shortest_paths(g).unwrap();
    quality(c, g, &d, x, np, &Hyper::default()).unwrap()
}

fn gradient_correctness() -> Outcome {
    const CONFIGS: u64 = 20;
    let start = Instant::now();
    for c in CriterionId::ALL {
        gradients::check_criterion(c, CONFIGS)?;
    }
    let took = start.elapsed();
    let detail = format!("9 criteria x {CONFIGS} configurations within rel 1e-4 / abs 1e-8 in {took:.2?}");
    if took > Duration::from_secs(30) {
        return Err(format!("{detail}, over the 30 s budget"));
    }
    Ok(detail)
}

fn crossing_elimination() -> Outcome {
    let schedule = WeightSchedule::new()
        .with_track(CriterionId::Stress, vec![(0, 1.0)])
        .and_then(|s| s.with_track(CriterionId::Crossings, vec![(999, 0.0), (1000, 100.0)]))
        .unwrap();
    let config = OptimizerConfig { iters: 3000, ..OptimizerConfig::default() };
    let mut report = Vec::new();
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, fam) in [
        ("grid(5,5)", Family::Grid { w: 5, h: 5 }),
        ("balanced tree", Family::BalancedTree { branch: 2, depth: 4 }),
        ("cycle(10)", Family::Cycle(10)),
    ] {
        let g = Graph::generate(fam).unwrap();
        let (mut before, mut after) = (0, 0);
        for seed in 0..5 {
            let x0 = random_layout(g.node_count(), seed);
            let start = Instant::now();
            let layout = match run(&g, &x0, &schedule, &OptimizerConfig { seed, ..config.clone() }) {
                Ok(out) => out.layout,
                Err(f) => {
                    bad.push(format!("{name} seed {seed}: {}", f.error));
                    continue;
                }
            };
            slowest = slowest.max(start.elapsed());
            let left = brute_force_crossings(&g, &layout).len();
            before += brute_force_crossings(&g, &x0).len();
            after += left;
            if left > 0 {
                bad.push(format!("{name} seed {seed}: {left} crossings left"));
            }
        }
        report.push(format!("{name} {:.1} -> {:.1}", before as f64 / 5.0, after as f64 / 5.0));
    }
    if slowest > Duration::from_secs(60) {
        bad.push(format!("slowest run {slowest:.2?} over 60 s"));
    }
    let detail = format!("mean crossings {}; slowest run {slowest:.2?}", report.join(", "));
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn stress_convergence() -> Outcome {
    let config = OptimizerConfig::default();
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for (name, fam) in
        [("cycle(10)", Family::Cycle(10)), ("grid(5,5)", Family::Grid { w: 5, h: 5 }), ("cube", Family::Cube)]
    {
        let g = Graph::generate(fam).unwrap();
        let d = shortest_paths(&g).unwrap();
        let n = g.node_count();
        let dm: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| d.get(i, j)).collect()).collect();
        for seed in 0..5 {
            let x0 = random_layout(n, seed);
            let layout = match run(&g, &x0, &stress_only(), &OptimizerConfig { seed, ..config.clone() }) {
                Ok(out) => out.layout,
                Err(f) => {
                    bad.push(format!("{name} seed {seed}: {}", f.error));
                    continue;
                }
            };
            let ours = smacof::stress(&dm, layout.positions());
            let reference = smacof::stress(&dm, &smacof::smacof(&dm, x0.positions(), 100_000, 1e-12));
            let excess = (ours - reference) / reference;
            worst = worst.max(excess);
            if excess > 0.05 {
                // Majorization restarted from our layout tells a local minimum from a stall.
                let polished = smacof::stress(&dm, &smacof::smacof(&dm, layout.positions(), 100_000, 1e-12));
                bad.push(format!(
                    "{name} seed {seed}: {ours:.4} vs {reference:.4} (majorization from our layout: {polished:.4})"
                ));
            }
        }
    }
    let detail = format!("worst excess over the majorization optimum {:+.2}% (limit 5%)", 100.0 * worst);
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn improvement_rate() -> Outcome {
    let families = [
        ("cycle(10)", Family::Cycle(10)),
        ("path(10)", Family::Path(10)),
        ("grid(5,5)", Family::Grid { w: 5, h: 5 }),
        ("balanced tree", Family::BalancedTree { branch: 2, depth: 4 }),
        ("K8", Family::Complete(8)),
        ("K4,5", Family::CompleteBipartite(4, 5)),
        ("cube", Family::Cube),
        ("dodecahedron", Family::Dodecahedron),
    ];
    let config = OptimizerConfig::default();
    let (mut improved, mut total) = (0, 0);
    let mut misses = Vec::new();
    for (name, fam) in families {
        let g = Graph::generate(fam).unwrap();
        let x0 = random_layout(g.node_count(), 0);
        for c in CriterionId::ALL {
            total += 1;
            let q0 = q(c, &g, &x0, NpConfig::default());
            let schedule = WeightSchedule::constant(Weights::single(c, 1.0));
            let (layout, failed) = match run(&g, &x0, &schedule, &config) {
                Ok(out) => (out.layout, false),
                Err(f) => (f.layout, true),
            };
            let q1 = q(c, &g, &layout, NpConfig::default());
            let better = if c.higher_is_better() { q1 > q0 } else { q1 < q0 };
            if better && !failed {
                improved += 1;
            } else {
                let how = if failed { " (run failed)" } else { "" };
                misses.push(format!("{name}/{}: {q0:.3} -> {q1:.3}{how}", c.code()));
            }
        }
    }
    let rate = improved as f64 / total as f64;
    let detail = format!("{improved}/{total} cells improved ({:.1}%, need 90%)", 100.0 * rate);
    if rate >= 0.9 {
        Ok(detail)
    } else {
        Err(format!("{detail}; not improved: {}", misses.join(", ")))
    }
}

fn quality_properties() -> Outcome {
    let bounded = [
        CriterionId::NeighborhoodPreservation,
        CriterionId::AspectRatio,
        CriterionId::AngularResolution,
        CriterionId::VertexResolution,
        CriterionId::Gabriel,
        CriterionId::CrossingAngle,
    ];
    let mut r = rng(7);
    for i in 0..200 {
        let n = r.random_range(4..16);
        let extra = r.random_range(0..2 * n);
        let g = random_graph(&mut r, n, extra);
        let side = 1.0 + 9.0 * r.random::<f64>();
        let x = random_points(&mut r, n, side);
        for c in bounded {
            let v = q(c, &g, &x, NpConfig::default());
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("layout {i}: Q_{} = {v} outside [0, 1]", c.code()));
            }
        }
        let cn = q(CriterionId::Crossings, &g, &x, NpConfig::default());
        let brute = brute_force_crossings(&g, &x).len();
        if cn != brute as f64 || detect_crossings(&g, &x).len() != brute {
            return Err(format!("layout {i}: Q_CN = {cn}, brute force {brute}"));
        }
    }

    let g = Graph::generate(Family::Cycle(10)).unwrap();
    let polygon = Layout::new(
        (0..10)
            .map(|k| {
                let (s, c) = (std::f64::consts::TAU * k as f64 / 10.0).sin_cos();
                Vec2::new(c, s)
            })
            .collect(),
    )
    .unwrap();
    let np = q(CriterionId::NeighborhoodPreservation, &g, &polygon, NpConfig::fixed(2));
    let cn = q(CriterionId::Crossings, &g, &polygon, NpConfig::default());
    if np != 1.0 || cn != 0.0 {
        return Err(format!("regular 10-gon: Q_NP = {np}, Q_CN = {cn}"));
    }
    Ok("200 random layouts in range, Q_CN equals brute force, regular 10-gon Q_NP = 1 and Q_CN = 0".into())
}

fn single_criterion_targets() -> Outcome {
    let config = OptimizerConfig::default();
    let finals = |c: CriterionId, g: &Graph| -> Vec<f64> {
        (0..5)
            .map(|seed| {
                let x0 = random_layout(g.node_count(), seed);
                let schedule = WeightSchedule::constant(Weights::single(c, 1.0));
                let layout = match run(g, &x0, &schedule, &OptimizerConfig { seed, ..config.clone() }) {
                    Ok(out) => out.layout,
                    Err(f) => f.layout,
                };
                q(c, g, &layout, NpConfig::default())
            })
            .collect()
    };
    let ar = finals(CriterionId::AspectRatio, &Graph::generate(Family::Dodecahedron).unwrap());
    let vr = finals(CriterionId::VertexResolution, &Graph::generate(Family::Grid { w: 5, h: 5 }).unwrap());
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let show = |v: &[f64]| v.iter().map(|q| format!("{q:.3}")).collect::<Vec<_>>().join(" ");
    let detail = format!(
        "Q_AR on random 20-node layouts [{}] (need >= 0.95); Q_VR on grid(5,5) [{}] (need >= 0.85)",
        show(&ar),
        show(&vr)
    );
    if min(&ar) >= 0.95 && min(&vr) >= 0.85 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gdlayout")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("gdlayout {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let read = |path: &str| std::fs::read(Path::new(path)).map_err(|e| e.to_string());
    cli(&["generate", "--family", "grid", "--w", "4", "--h", "4", "--out", &p("g.json")])?;
    for mode in ["full", "stochastic"] {
        let layout = |out: &str| {
            cli(&[
                "layout",
                "--graph",
                &p("g.json"),
                "--seed",
                "5",
                "--iters",
                "600",
                "--weights",
                "ST=1,CN=2",
                "--mode",
                mode,
                "--out",
                &p(out),
            ])
        };
        layout("a.json")?;
        layout("b.json")?;
        if read(&p("a.json"))? != read(&p("b.json"))? {
            return Err(format!("{mode} CLI runs differ"));
        }
    }
    cli(&[
        "layout",
        "--graph",
        &p("g.json"),
        "--seed",
        "5",
        "--iters",
        "600",
        "--weights",
        "ST=1,CN=2",
        "--out",
        &p("cli.json"),
    ])?;
    let served = serve_once()?;
    if served != read(&p("cli.json"))? {
        return Err("service layout differs from the CLI layout".into());
    }
    Ok("repeated CLI runs byte-identical (full and stochastic); uninterrupted service run equals the CLI file".into())
}

/// Runs the CLI's configuration as a session and returns the final layout file.
fn serve_once() -> Result<Vec<u8>, String> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let app = gdlayout::service::router();
        let call = |method: Method, uri: String, body: Option<serde_json::Value>| {
            let app = app.clone();
            async move {
                let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
                let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
                let res = app.oneshot(req).await.unwrap();
                let status = res.status();
                (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
            }
        };
        let body = json!({ "family": { "name": "grid", "w": 4, "h": 4 }, "seed": 5, "iters": 600, "weights": { "ST": 1, "CN": 2 } });
        let (status, bytes) = call(Method::POST, "/sessions".into(), Some(body)).await;
        if status != StatusCode::CREATED {
            return Err(format!("create: {status} {}", String::from_utf8_lossy(&bytes)));
        }
        let v: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        let uri = format!("/sessions/{}", v["id"].as_str().unwrap_or_default());
        call(Method::POST, format!("{uri}/resume"), None).await;
        let deadline = Instant::now() + Duration::from_secs(60);
        loop {
            let (_, bytes) = call(Method::GET, uri.clone(), None).await;
            let v: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
            match v["status"].as_str() {
                Some("finished") => break,
                Some("failed") => return Err(format!("session failed: {v}")),
                _ if Instant::now() > deadline => return Err("session did not finish in 60 s".into()),
                _ => tokio::time::sleep(Duration::from_millis(20)).await,
            }
        }
        let (status, bytes) = call(Method::GET, format!("{uri}/layout"), None).await;
        if status != StatusCode::OK {
            return Err(format!("layout: {status}"));
        }
        Ok(bytes)
    })
}
