use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use latflux_core::context::ContextJson;
use latflux_core::diagram::LayoutJson;
use latflux_core::{examples, AdditiveBasis, ConceptLattice, FormalContext, Layout, RepresentationKind};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn dwarf() -> FormalContext {
    FormalContext::parse_cxt(&std::fs::read_to_string(fixture("dwarf_planets.cxt")).unwrap()).unwrap()
}

fn figure(lat: &ConceptLattice, name: &str) -> Layout {
    let text = std::fs::read_to_string(fixture(&format!("{name}.json"))).unwrap();
    serde_json::from_str::<LayoutJson>(&text).unwrap().to_layout(lat).unwrap()
}

/// The projected reference layout, exactly additive.
fn fig3_additive(lat: &ConceptLattice) -> Layout {
    let basis = AdditiveBasis::build(lat, RepresentationKind::DoublyAdditive);
    basis.project_framed(&figure(lat, "fig3")).unwrap()
}

async fn post_raw(path: &str, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
    let req = Request::post(path).header("content-type", "application/json").body(Body::from(body)).unwrap();
    let res = latflux_service::app().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = axum::body::to_bytes(res.into_body(), usize::MAX).await.unwrap();
    (status, bytes.to_vec())
}

async fn post(path: &str, body: &Value) -> (StatusCode, Value) {
    let (status, bytes) = post_raw(path, serde_json::to_vec(body).unwrap()).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn ctx_json(ctx: &FormalContext) -> ContextJson {
    ctx.to_json()
}

fn layout_of(lat: &ConceptLattice, v: &Value) -> Layout {
    serde_json::from_value::<LayoutJson>(v.clone()).unwrap().to_layout(lat).unwrap()
}

#[tokio::test]
async fn lattice_of_dwarf_planets_has_eleven_concepts() {
    let (status, body) = post("/lattice", &json!(ctx_json(&dwarf()))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["concepts"].as_array().unwrap().len(), 11);
    assert_eq!(body["covers"].as_array().unwrap().len(), 17);
}

#[tokio::test]
async fn lattice_rejects_empty_and_malformed_bodies() {
    assert_eq!(post_raw("/lattice", Vec::new()).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(post_raw("/lattice", b"{\"objects\": 3}".to_vec()).await.0, StatusCode::BAD_REQUEST);
    let ragged = json!({"objects": ["a"], "attributes": ["m"], "incidence": [[true, false]]});
    assert_eq!(post("/lattice", &ragged).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn one_by_one_context_without_cross_has_two_concepts() {
    let ctx = json!({"objects": ["g"], "attributes": ["m"], "incidence": [[false]]});
    let (status, body) = post("/lattice", &ctx).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["concepts"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn draw_dimflux_returns_valid_refined_layout() {
    let (status, body) = post("/draw", &json!({"context": ctx_json(&dwarf()), "algo": "dimflux"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["validity"]["valid"], json!(true));
    for stage in ["embedded", "projected", "refined"] {
        assert!(body["stages"][stage].is_object(), "missing stage {stage}");
    }
    assert!(body["additive_residual"].as_f64().unwrap() <= 1e-6);
}

#[tokio::test]
async fn draw_rejects_unknown_algorithm() {
    let (status, body) = post("/draw", &json!({"context": ctx_json(&dwarf()), "algo": "spring"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("spring"));
}

#[tokio::test]
async fn draw_with_small_budget_returns_flagged_partial_result() {
    let body = json!({
        "context": ctx_json(&examples::fm3()),
        "algo": "dimdraw",
        "config": {"extension": {"max_conflicts": 1}}
    });
    let (status, body) = post("/draw", &body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["extension_minimal"], json!(false));
    assert!(body["stages"]["embedded"].is_object());
}

#[tokio::test]
async fn draw_streams_progress_lines() {
    let body = json!({"context": ctx_json(&dwarf()), "algo": "doubly-fdp", "progress": true});
    let (status, bytes) = post_raw("/draw", serde_json::to_vec(&body).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let lines: Vec<Value> = String::from_utf8(bytes).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() > 1);
    assert!(lines[..lines.len() - 1].iter().all(|l| l["progress"]["iteration"].is_u64()));
    assert_eq!(lines.last().unwrap()["result"]["validity"]["valid"], json!(true));
}

fn drag_body(ctx: &FormalContext, lat: &ConceptLattice, layout: &Layout, concept: usize, to: [f64; 2]) -> Value {
    json!({
        "context": ctx_json(ctx),
        "layout": LayoutJson::from_layout(lat, layout),
        "concept": concept,
        "newPosition": to,
    })
}

#[tokio::test]
async fn dragging_the_middle_atom_moves_the_whole_diagram() {
    let ctx = dwarf();
    let lat = ConceptLattice::from_context(&ctx);
    let atom = lat.index_of_intent(&ctx.attribute_set(["Non-Spherical", "Atmosphere"]).unwrap()).unwrap();
    let mut layout = fig3_additive(&lat);
    for step in 1..=3 {
        let p = layout.points[atom];
        let (status, body) = post("/drag", &drag_body(&ctx, &lat, &layout, atom, [p[0] + 1.092, p[1]])).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body["accepted"], json!(true));
        let next = layout_of(&lat, &body["layout"]);
        let others_moved = (0..lat.len()).filter(|&i| i != atom && next.points[i] != layout.points[i]).count();
        assert!(others_moved > 0);
        layout = next;
        assert!(layout.max_abs_diff(&figure(&lat, &format!("fig4_step{step}"))) <= 1e-3);
    }
}

#[tokio::test]
async fn zero_displacement_drag_is_a_fixed_point() {
    let ctx = dwarf();
    let lat = ConceptLattice::from_context(&ctx);
    let layout = fig3_additive(&lat);
    let node = 4;
    let (status, body) = post("/drag", &drag_body(&ctx, &lat, &layout, node, layout.points[node])).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["accepted"], json!(true));
    assert!(layout_of(&lat, &body["layout"]).max_abs_diff(&layout) <= 1e-9);
}

#[tokio::test]
async fn dragging_bottom_above_top_is_rejected() {
    let ctx = dwarf();
    let lat = ConceptLattice::from_context(&ctx);
    let layout = fig3_additive(&lat);
    let top = layout.points[lat.top()];
    let (status, body) = post("/drag", &drag_body(&ctx, &lat, &layout, lat.bottom(), [top[0], top[1] + 50.0])).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["accepted"], json!(false));
    assert_eq!(layout_of(&lat, &body["layout"]), layout);
}

#[tokio::test]
async fn drag_requires_an_additive_layout() {
    let ctx = dwarf();
    let lat = ConceptLattice::from_context(&ctx);
    let layout = figure(&lat, "fig1");
    let (status, _) = post("/drag", &drag_body(&ctx, &lat, &layout, 9, [0.0, 0.0])).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

fn snap_body(ctx: &FormalContext, lat: &ConceptLattice, layout: &Layout, step: f64) -> Value {
    json!({"context": ctx_json(ctx), "layout": LayoutJson::from_layout(lat, layout), "gridStep": step})
}

#[tokio::test]
async fn snapping_lands_on_the_grid_and_is_idempotent() {
    let ctx = dwarf();
    let lat = ConceptLattice::from_context(&ctx);
    let (status, body) = post("/snap", &snap_body(&ctx, &lat, &figure(&lat, "fig3"), 0.5)).await;
    assert_eq!(status, StatusCode::OK);
    let snapped = layout_of(&lat, &body["layout"]);
    for p in &snapped.points {
        for v in p {
            assert!((v * 2.0 - (v * 2.0).round()).abs() < 1e-9, "{v} is off the grid");
        }
    }
    let (_, again) = post("/snap", &snap_body(&ctx, &lat, &snapped, 0.5)).await;
    assert!(layout_of(&lat, &again["layout"]).max_abs_diff(&snapped) < 1e-9);
}

#[tokio::test]
async fn collapsing_snap_is_reported_invalid() {
    let ctx = dwarf();
    let lat = ConceptLattice::from_context(&ctx);
    let (status, body) = post("/snap", &snap_body(&ctx, &lat, &fig3_additive(&lat), 100.0)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["valid"], json!(false));
}

#[tokio::test]
async fn identical_requests_give_identical_responses() {
    let body = serde_json::to_vec(&json!({"context": ctx_json(&examples::n5()), "algo": "attr-fdp"})).unwrap();
    let a = post_raw("/draw", body.clone()).await;
    let b = post_raw("/draw", body).await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn cors_preflight_is_answered() {
    let req = Request::options("/draw")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let res = latflux_service::app().oneshot(req).await.unwrap();
    assert!(res.headers().contains_key("access-control-allow-origin"));
}
