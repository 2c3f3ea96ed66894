//! Routes and wire records.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use shadowlayout_core::record::{element_record, validate_elements, ElementRecord, HeatmapRecord};
use shadowlayout_core::{overlay_heatmap, HeatmapMode, SlideLayout64};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::state::{AppState, Snapshot};
use crate::ServiceError;

/// `{"error": code, "message": text}` with an HTTP status.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: &'a str,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    fn empty_corpus() -> Self {
        Self::new(StatusCode::SERVICE_UNAVAILABLE, "empty_corpus", "the corpus has no indexed slides")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, Deserialize)]
pub struct RetrieveRequest {
    pub elements: Vec<ElementRecord>,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrieveHit {
    pub id: String,
    pub score: f64,
    pub elements: Vec<ElementRecord>,
    pub image_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrieveResponse {
    pub revision: u64,
    pub results: Vec<RetrieveHit>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OverlayRequest {
    pub mode: String,
    #[serde(default)]
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideResponse {
    pub id: String,
    pub source: String,
    pub image: Option<String>,
    pub image_url: Option<String>,
    pub elements: Vec<ElementRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsResponse {
    pub slides: usize,
    pub revision: u64,
    pub descriptor_g: usize,
    pub heatmap_g: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReloadResponse {
    pub revision: u64,
    pub slides: usize,
    pub skipped: usize,
}

/// Scores travel with six decimals; ranking uses full precision.
pub fn transport_score(score: f64) -> f64 {
    (score * 1e6).round() / 1e6
}

/// Everything but RFC 3986 unreserved characters.
const PATH_SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

pub fn image_url(layout: &SlideLayout64) -> Option<String> {
    layout
        .image_ref
        .as_ref()
        .map(|_| format!("/api/slides/{}/image", utf8_percent_encode(&layout.id, PATH_SEGMENT)))
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformed_body", e.to_string()))
}

fn parse_mode(mode: Option<&str>) -> ApiResult<HeatmapMode> {
    let mode = mode.ok_or_else(|| ApiError::bad_request("unknown_mode", "missing mode"))?;
    mode.parse().map_err(|e: shadowlayout_core::heatmap::UnknownMode| ApiError::bad_request("unknown_mode", e.to_string()))
}

fn draft_from(elements: &[ElementRecord]) -> ApiResult<SlideLayout64> {
    validate_elements(elements)
        .map(SlideLayout64::draft)
        .map_err(|e| ApiError::bad_request("invalid_element", e.to_string()))
}

/// Pure retrieval against one snapshot, shared by the route and tests.
pub fn retrieve(snapshot: &Snapshot, request: &RetrieveRequest, default_k: usize) -> ApiResult<RetrieveResponse> {
    if request.elements.is_empty() {
        return Err(ApiError::bad_request("empty_query", "draw at least one box to search"));
    }
    let k = request.k.unwrap_or(default_k);
    if k == 0 {
        return Err(ApiError::bad_request("invalid_k", "k must be at least 1"));
    }
    let draft = draft_from(&request.elements)?;
    let result = snapshot.index.query(&draft, k).map_err(|e| match e {
        shadowlayout_core::Error::EmptyCorpus => ApiError::empty_corpus(),
        other => ApiError::bad_request("invalid_query", other.to_string()),
    })?;
    Ok(RetrieveResponse {
        revision: result.revision,
        results: result
            .hits
            .iter()
            .map(|h| RetrieveHit {
                id: h.id.clone(),
                score: transport_score(h.score),
                elements: h.layout.elements.iter().map(element_record).collect(),
                image_url: image_url(&h.layout),
            })
            .collect(),
    })
}

async fn retrieve_route(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<RetrieveResponse>> {
    let request: RetrieveRequest = parse_body(&body)?;
    let snapshot = state.snapshot();
    retrieve(&snapshot, &request, state.config().default_k).map(Json)
}

async fn heatmap_route(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<HeatmapRecord>> {
    let mode = parse_mode(params.get("mode").map(String::as_str))?;
    let raw = params.get("raw").is_some_and(|v| v == "1" || v.eq_ignore_ascii_case("true"));
    let snapshot = state.snapshot();
    let grid = snapshot.heatmap(mode).ok_or_else(ApiError::empty_corpus)?;
    Ok(Json(if raw {
        HeatmapRecord::raw(grid)
    } else {
        HeatmapRecord::normalized(grid)
    }))
}

async fn overlay_route(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<HeatmapRecord>> {
    let request: OverlayRequest = parse_body(&body)?;
    let mode = parse_mode(Some(&request.mode))?;
    let draft = draft_from(&request.elements)?;
    let snapshot = state.snapshot();
    let grid = snapshot.heatmap(mode).ok_or_else(ApiError::empty_corpus)?;
    Ok(Json(HeatmapRecord::normalized(&overlay_heatmap(grid, &draft))))
}

fn find_slide(snapshot: &Snapshot, id: &str) -> ApiResult<Arc<SlideLayout64>> {
    snapshot
        .slides
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("not_found", format!("no slide {id:?}")))
}

async fn slide_route(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SlideResponse>> {
    let layout = find_slide(&state.snapshot(), &id)?;
    Ok(Json(SlideResponse {
        id: layout.id.clone(),
        source: layout.source.clone(),
        image: layout.image_ref.clone(),
        image_url: image_url(&layout),
        elements: layout.elements.iter().map(element_record).collect(),
    }))
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

async fn slide_image_route(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let layout = find_slide(&state.snapshot(), &id)?;
    let no_image = || ApiError::not_found("no_image", format!("slide {id:?} has no stored image"));
    let image_ref = layout.image_ref.as_deref().ok_or_else(no_image)?;
    let path = match &state.config().images {
        Some(dir) => dir.join(image_ref),
        None => std::path::PathBuf::from(image_ref),
    };
    let bytes = tokio::fs::read(&path).await.map_err(|_| no_image())?;
    let png = if bytes.starts_with(PNG_MAGIC) {
        bytes
    } else {
        tokio::task::spawn_blocking(move || reencode_png(&bytes))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "bad_image", e.to_string()))?
    };
    Ok(([(header::CONTENT_TYPE, "image/png")], Body::from(png)).into_response())
}

fn reencode_png(bytes: &[u8]) -> Result<Vec<u8>, image::ImageError> {
    let img = image::load_from_memory(bytes)?;
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)?;
    Ok(out.into_inner())
}

async fn stats_route(State(state): State<Arc<AppState>>) -> Json<StatsResponse> {
    let snapshot = state.snapshot();
    Json(StatsResponse {
        slides: snapshot.index.len(),
        revision: snapshot.revision(),
        descriptor_g: state.config().descriptor_g,
        heatmap_g: state.config().heatmap_g,
    })
}

async fn reload_route(State(state): State<Arc<AppState>>) -> ApiResult<Json<ReloadResponse>> {
    let result = tokio::task::spawn_blocking(move || state.reload())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    let snapshot = result.map_err(|e: ServiceError| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "reload_failed", e.to_string())
    })?;
    Ok(Json(ReloadResponse {
        revision: snapshot.revision(),
        slides: snapshot.index.len(),
        skipped: snapshot.skipped,
    }))
}

async fn log_request(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_string();
    let started = Instant::now();
    let response = next.run(request).await;
    tracing::info!(
        "{} {} {} {:.1}ms",
        method,
        path,
        response.status().as_u16(),
        started.elapsed().as_secs_f64() * 1e3
    );
    response
}

fn cors(origin: &str) -> Option<CorsLayer> {
    let allow = if origin == "*" {
        AllowOrigin::any()
    } else {
        AllowOrigin::exact(HeaderValue::from_str(origin).ok()?)
    };
    Some(
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST])
            .allow_headers([header::CONTENT_TYPE]),
    )
}

pub fn router(state: Arc<AppState>) -> Router {
    let origin = state.config().cors_allow_origin.clone();
    let mut app = Router::new()
        .route("/api/retrieve", post(retrieve_route))
        .route("/api/heatmap", get(heatmap_route))
        .route("/api/heatmap/overlay", post(overlay_route))
        .route("/api/slides/{id}", get(slide_route))
        .route("/api/slides/{id}/image", get(slide_image_route))
        .route("/api/stats", get(stats_route))
        .route("/api/reload", post(reload_route))
        .with_state(state);
    if let Some(layer) = origin.as_deref().and_then(cors) {
        app = app.layer(layer);
    }
    app.layer(middleware::from_fn(log_request))
}
