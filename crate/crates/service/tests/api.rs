#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use shadowlayout_core::record::{to_record, write_corpus, HeatmapRecord};
use shadowlayout_core::{compute_heatmap, ElementCategory, HeatmapMode, SlideLayout};
use shadowlayout_service::api::{RetrieveResponse, StatsResponse};
use shadowlayout_service::{router, AppState, ServiceConfig};
use support::*;
use tower::ServiceExt;

struct Fixture {
    _dir: tempfile::TempDir,
    state: Arc<AppState>,
    corpus: Vec<Layout>,
}

fn fixture(corpus: Vec<Layout>) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    write_corpus(std::fs::File::create(&corpus_path).unwrap(), &corpus).unwrap();
    let mut cfg = ServiceConfig::new(&corpus_path);
    cfg.images = Some(images);
    let state = Arc::new(AppState::load(cfg).unwrap());
    Fixture { _dir: dir, state, corpus }
}

fn seeded() -> Fixture {
    let mut corpus = slide_corpus(3, 40);
    corpus[7].image_ref = Some("slide-0007.png".into());
    corpus[8].image_ref = Some("slide-0008.ppm".into());
    let f = fixture(corpus);
    let images = f.state.config().images.clone().unwrap();
    image::RgbImage::from_fn(32, 18, |x, y| image::Rgb([x as u8 * 8, y as u8 * 14, 90]))
        .save(images.join("slide-0007.png"))
        .unwrap();
    image::RgbImage::from_fn(20, 10, |x, _| image::Rgb([x as u8 * 12, 0, 0]))
        .save(images.join("slide-0008.ppm"))
        .unwrap();
    f
}

async fn call(state: &Arc<AppState>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>, String) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req.header("content-type", "application/json").body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = router(Arc::clone(state)).oneshot(req).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes, ctype)
}

async fn call_json(state: &Arc<AppState>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes, ctype) = call(state, method, uri, body).await;
    assert_eq!(ctype, "application/json", "{uri}");
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn elements_of(layout: &Layout) -> Value {
    serde_json::to_value(to_record(layout).elements).unwrap()
}

#[tokio::test]
async fn retrieve_self_through_the_wire() {
    let f = seeded();
    let target = &f.corpus[7];
    let (status, body) = call_json(&f.state, "POST", "/api/retrieve", Some(json!({"elements": elements_of(target), "k": 3}))).await;
    assert_eq!(status, StatusCode::OK);
    let resp: RetrieveResponse = serde_json::from_value(body).unwrap();
    assert_eq!(resp.revision, 1);
    assert_eq!(resp.results.len(), 3);
    // Identical layouts may exist in a jittered corpus; the top score is exact.
    assert_eq!(resp.results[0].score, 1.0);
    assert!(resp.results.iter().any(|h| h.id == target.id));
    let hit = resp.results.iter().find(|h| h.id == target.id).unwrap();
    assert_eq!(hit.image_url.as_deref(), Some("/api/slides/slide-0007/image"));
    assert!(resp.results.windows(2).all(|w| w[0].score >= w[1].score));
    for h in &resp.results {
        assert_eq!(h.score, (h.score * 1e6).round() / 1e6);
    }
}

#[tokio::test]
async fn retrieve_default_k_and_errors() {
    let f = seeded();
    let draft = json!({"elements": [{"category": "Figure", "bbox": [0.1, 0.2, 0.8, 0.75]}]});
    let (status, body) = call_json(&f.state, "POST", "/api/retrieve", Some(draft)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["results"].as_array().unwrap().len(), 8);
    assert!(body["results"][1]["image_url"].is_null() || body["results"][1]["image_url"].is_string());

    let (status, body) = call_json(&f.state, "POST", "/api/retrieve", Some(json!({"elements": []}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "empty_query");
    assert!(body["message"].is_string());

    for (req, code) in [
        (json!({"elements": [{"category": "banner", "bbox": [0, 0, 1, 1]}]}), "invalid_element"),
        (json!({"elements": [{"category": "text", "bbox": [0, 0, 0, 1]}]}), "invalid_element"),
        (json!({"elements": [{"category": "text", "bbox": [0, 0, 1, 1]}], "k": 0}), "invalid_k"),
        (json!({"boxes": []}), "malformed_body"),
    ] {
        let (status, body) = call_json(&f.state, "POST", "/api/retrieve", Some(req)).await;
        assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::BAD_REQUEST, code));
    }
    let (status, _, _) = call(&f.state, "POST", "/api/retrieve", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn retrieve_is_byte_stable() {
    let f = seeded();
    let body = json!({"elements": elements_of(&f.corpus[3]), "k": 10});
    let (_, a, _) = call(&f.state, "POST", "/api/retrieve", Some(body.clone())).await;
    let (_, b, _) = call(&f.state, "POST", "/api/retrieve", Some(body)).await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn heatmap_modes() {
    let f = seeded();
    let mut raws = Vec::new();
    for mode in ["title", "text", "figure", "all"] {
        let (status, body) = call_json(&f.state, "GET", &format!("/api/heatmap?mode={mode}"), None).await;
        assert_eq!(status, StatusCode::OK);
        let rec: HeatmapRecord = serde_json::from_value(body).unwrap();
        assert_eq!((rec.g, rec.cells.len(), rec.mode.as_str()), (32, 32, mode));
        let max = rec.cells.iter().flatten().cloned().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        let (_, raw) = call_json(&f.state, "GET", &format!("/api/heatmap?mode={mode}&raw=1"), None).await;
        raws.push(serde_json::from_value::<HeatmapRecord>(raw).unwrap());
    }
    for r in 0..32 {
        for c in 0..32 {
            let sum = raws[0].cells[r][c] + raws[1].cells[r][c] + raws[2].cells[r][c];
            assert!((raws[3].cells[r][c] - sum).abs() <= 1e-12);
        }
    }
    let expect = compute_heatmap(&f.corpus, HeatmapMode::Figure, 32).unwrap();
    let (_, body) = call_json(&f.state, "GET", "/api/heatmap?mode=figure", None).await;
    assert_eq!(serde_json::from_value::<HeatmapRecord>(body).unwrap(), HeatmapRecord::normalized(&expect));

    let (status, body) = call_json(&f.state, "GET", "/api/heatmap?mode=banner", None).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "unknown_mode"));
    let (status, _) = call_json(&f.state, "GET", "/api/heatmap", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn overlay_endpoint() {
    let f = fixture(vec![SlideLayout::new("a", vec![element(ElementCategory::Title, [0.0, 0.0, 0.5, 0.25])])]);
    let (_, base) = call_json(&f.state, "GET", "/api/heatmap?mode=title", None).await;
    let (status, same) = call_json(&f.state, "POST", "/api/heatmap/overlay", Some(json!({"mode": "title", "elements": []}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(same, base);

    let draft = json!({"mode": "title", "elements": [{"category": "title", "bbox": [0.6, 0.6, 0.3, 0.3]}]});
    let (_, over) = call_json(&f.state, "POST", "/api/heatmap/overlay", Some(draft)).await;
    assert_eq!(base["cells"][25][25], 0.0);
    assert!(over["cells"][25][25].as_f64().unwrap() > 0.0);

    let mut all = f.corpus.clone();
    all.push(SlideLayout::new("draft", vec![element(ElementCategory::Title, [0.6, 0.6, 0.3, 0.3])]));
    let scratch = HeatmapRecord::normalized(&compute_heatmap(&all, HeatmapMode::Title, 32).unwrap());
    let over: HeatmapRecord = serde_json::from_value(over).unwrap();
    for (a, b) in over.cells.iter().flatten().zip(scratch.cells.iter().flatten()) {
        assert!((a - b).abs() <= 1e-12);
    }

    let (status, body) = call_json(&f.state, "POST", "/api/heatmap/overlay", Some(json!({"mode": "x", "elements": []}))).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "unknown_mode"));
    let (status, body) = call_json(&f.state, "POST", "/api/heatmap/overlay", Some(json!({"elements": []}))).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::BAD_REQUEST, "malformed_body"));
}

#[tokio::test]
async fn slides_and_images() {
    let f = seeded();
    let (status, body) = call_json(&f.state, "GET", "/api/slides/slide-0007", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["elements"], elements_of(&f.corpus[7]));
    assert_eq!(body["image_url"], "/api/slides/slide-0007/image");

    let (status, body) = call_json(&f.state, "GET", "/api/slides/nope", None).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::NOT_FOUND, "not_found"));

    for id in ["slide-0007", "slide-0008"] {
        let (status, bytes, ctype) = call(&f.state, "GET", &format!("/api/slides/{id}/image"), None).await;
        assert_eq!((status, ctype.as_str()), (StatusCode::OK, "image/png"));
        let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png).unwrap();
        assert!(img.width() >= 20);
    }
    let (status, body) = call_json(&f.state, "GET", "/api/slides/slide-0001/image", None).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::NOT_FOUND, "no_image"));
}

#[tokio::test]
async fn stats_and_reload() {
    let f = seeded();
    let (_, body) = call_json(&f.state, "GET", "/api/stats", None).await;
    let stats: StatsResponse = serde_json::from_value(body).unwrap();
    assert_eq!(stats, StatsResponse { slides: 40, revision: 1, descriptor_g: 16, heatmap_g: 32 });

    let mut grown = f.corpus.clone();
    grown.push(SlideLayout::new("zz-new", vec![element(ElementCategory::Text, [0.3, 0.3, 0.2, 0.2])]));
    write_corpus(std::fs::File::create(&f.state.config().corpus).unwrap(), &grown).unwrap();
    let (status, body) = call_json(&f.state, "POST", "/api/reload", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((body["revision"].as_u64(), body["slides"].as_u64()), (Some(2), Some(41)));
    let (_, body) = call_json(&f.state, "GET", "/api/stats", None).await;
    assert_eq!(body["revision"], 2);

    std::fs::write(&f.state.config().corpus, "{broken\n").unwrap();
    let (status, body) = call_json(&f.state, "POST", "/api/reload", None).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::UNPROCESSABLE_ENTITY, "reload_failed"));
    let (_, body) = call_json(&f.state, "GET", "/api/stats", None).await;
    assert_eq!((body["revision"].as_u64(), body["slides"].as_u64()), (Some(2), Some(41)));

    let snap = f.state.upsert(SlideLayout::new("zz-new", vec![element(ElementCategory::Figure, [0.0, 0.0, 1.0, 1.0])])).unwrap();
    assert_eq!((snap.revision(), snap.index.len()), (3, 41));
}

#[tokio::test]
async fn empty_corpus_is_unavailable() {
    let f = fixture(vec![]);
    let (_, body) = call_json(&f.state, "GET", "/api/stats", None).await;
    assert_eq!(body["slides"], 0);
    let draft = json!({"elements": [{"category": "text", "bbox": [0, 0, 1, 1]}]});
    let (status, body) = call_json(&f.state, "POST", "/api/retrieve", Some(draft)).await;
    assert_eq!((status, body["error"].as_str().unwrap()), (StatusCode::SERVICE_UNAVAILABLE, "empty_corpus"));
    let (status, _) = call_json(&f.state, "GET", "/api/heatmap?mode=all", None).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn cors_header_when_configured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    write_corpus(std::fs::File::create(&path).unwrap(), &slide_corpus(1, 3)).unwrap();
    let mut cfg = ServiceConfig::new(&path);
    cfg.cors_allow_origin = Some("http://localhost:5173".into());
    let state = Arc::new(AppState::load(cfg).unwrap());
    let req = Request::get("/api/stats").header("origin", "http://localhost:5173").body(Body::empty()).unwrap();
    let resp = router(state).oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
}
