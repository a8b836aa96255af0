//! Stateless HTTP/JSON facade: every request ships its context (and layout)
//! and is answered by a pure computation.

use std::convert::Infallible;
use std::net::SocketAddr;

use axum::body::{Body, Bytes};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use latflux_core::context::ContextJson;
use latflux_core::diagram::{validate_line_diagram, LayoutJson};
use latflux_core::lattice::LatticeJson;
use latflux_core::pipeline::run_with_progress;
use latflux_core::{AdditiveBasis, Algorithm, ConceptLattice, FormalContext, PipelineConfig, RepresentationKind};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

pub const DEFAULT_PORT: u16 = 7878;

/// Largest projection residual accepted for layouts sent to `/drag`.
pub const DRAG_ADDITIVE_TOL: f64 = 1e-6;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self { status: StatusCode::INTERNAL_SERVER_ERROR, message: message.into() }
    }
}

impl From<latflux_core::Error> for ApiError {
    fn from(e: latflux_core::Error) -> Self {
        Self::bad_request(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    if body.is_empty() {
        return Err(ApiError::bad_request("empty request body"));
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

fn lattice_of(ctx: ContextJson) -> ApiResult<ConceptLattice> {
    Ok(ConceptLattice::from_context(&FormalContext::from_json(ctx)?))
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))?
}

async fn lattice(body: Bytes) -> ApiResult<Json<LatticeJson>> {
    let ctx: ContextJson = parse_body(&body)?;
    blocking(move || Ok(Json(LatticeJson::from_lattice(&lattice_of(ctx)?)))).await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DrawRequest {
    pub context: ContextJson,
    pub algo: String,
    #[serde(default)]
    pub config: PipelineConfig,
    /// Stream newline-delimited progress records before the result.
    #[serde(default)]
    pub progress: bool,
}

async fn draw(body: Bytes) -> ApiResult<Response> {
    let req: DrawRequest = parse_body(&body)?;
    let algo: Algorithm = req.algo.parse()?;
    req.config.validate()?;
    let lat = lattice_of(req.context)?;
    let cfg = req.config;
    if !req.progress {
        let result = blocking(move || Ok(run_with_progress(&lat, algo, &cfg, &mut |_| {})?)).await?;
        return Ok(Json(result).into_response());
    }
    let (tx, rx) = tokio::sync::mpsc::unbounded_channel::<String>();
    tokio::task::spawn_blocking(move || {
        let progress_tx = tx.clone();
        let mut progress = |row: &latflux_core::forces::TraceRow| {
            let line = serde_json::json!({ "progress": row });
            let _ = progress_tx.send(format!("{line}\n"));
        };
        let last = match run_with_progress(&lat, algo, &cfg, &mut progress) {
            Ok(result) => serde_json::json!({ "result": result }),
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        };
        let _ = tx.send(format!("{last}\n"));
    });
    let stream = futures::stream::unfold(rx, |mut rx| async move {
        rx.recv().await.map(|line| (Ok::<_, Infallible>(line), rx))
    });
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], Body::from_stream(stream)).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DragRequest {
    pub context: ContextJson,
    pub layout: LayoutJson,
    pub concept: usize,
    pub new_position: [f64; 2],
}

#[derive(Serialize, Deserialize)]
pub struct DragResponse {
    pub layout: LayoutJson,
    pub accepted: bool,
}

fn drag_step(req: DragRequest) -> ApiResult<DragResponse> {
    let lat = lattice_of(req.context)?;
    let layout = req.layout.to_layout(&lat)?;
    if req.concept >= lat.len() {
        return Err(ApiError::bad_request(format!("concept {} out of range (lattice has {})", req.concept, lat.len())));
    }
    if !req.new_position.iter().all(|v| v.is_finite()) {
        return Err(ApiError::bad_request("new position must be finite"));
    }
    let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
    let check = basis.is_additive(&layout, DRAG_ADDITIVE_TOL)?;
    if !check.additive {
        return Err(ApiError::bad_request(format!("layout is not additive (residual {:.3e})", check.residual)));
    }
    if layout.points[req.concept] == req.new_position {
        return Ok(DragResponse { layout: LayoutJson::from_layout(&lat, &layout), accepted: true });
    }
    let mut moved = layout.clone();
    moved.points[req.concept] = req.new_position;
    let rises = |l: &latflux_core::Layout| -> ApiResult<bool> {
        Ok(l.is_finite() && validate_line_diagram(&lat, l, 0.0, 0.0)?.order_violations.is_empty())
    };
    // the movement is refused once it leaves the cone, before or after projection
    let projected = basis.project_framed(&moved)?;
    let accepted = rises(&moved)? && rises(&projected)?;
    let out = if accepted { projected } else { layout };
    Ok(DragResponse { layout: LayoutJson::from_layout(&lat, &out), accepted })
}

async fn drag(body: Bytes) -> ApiResult<Json<DragResponse>> {
    let req: DragRequest = parse_body(&body)?;
    blocking(move || drag_step(req).map(Json)).await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SnapRequest {
    pub context: ContextJson,
    pub layout: LayoutJson,
    pub grid_step: f64,
    /// Smallest node/node and node/edge distance counted as valid.
    #[serde(default = "default_min_gap")]
    pub min_gap: f64,
}

fn default_min_gap() -> f64 {
    PipelineConfig::default().min_gap
}

#[derive(Serialize, Deserialize)]
pub struct SnapResponse {
    pub layout: LayoutJson,
    pub valid: bool,
}

fn snap_step(req: SnapRequest) -> ApiResult<SnapResponse> {
    let lat = lattice_of(req.context)?;
    let layout = req.layout.to_layout(&lat)?;
    let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
    let (snapped, _) = basis.snap_to_grid(&layout, req.grid_step)?;
    let valid = validate_line_diagram(&lat, &snapped, 0.0, req.min_gap)?.valid;
    Ok(SnapResponse { layout: LayoutJson::from_layout(&lat, &snapped), valid })
}

async fn snap(body: Bytes) -> ApiResult<Json<SnapResponse>> {
    let req: SnapRequest = parse_body(&body)?;
    blocking(move || snap_step(req).map(Json)).await
}

/// The service router with CORS enabled for browser editors.
pub fn app() -> Router {
    Router::new()
        .route("/lattice", post(lattice))
        .route("/draw", post(draw))
        .route("/drag", post(drag))
        .route("/snap", post(snap))
        .layer(CorsLayer::permissive())
}

/// Serves [`app`] on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app()).await
}
