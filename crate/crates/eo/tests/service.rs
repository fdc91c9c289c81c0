use axum::body::Body;
use axum::http::{Request, StatusCode};
use eo::core::scenarios::WINTER_FEAST;
use eo::core::{Engine, Value};
use eo::service::{router, Shared};
use http_body_util::BodyExt;
use serde_json::{json, Value as Json};
use tower::ServiceExt;

fn state() -> eo::service::AppState {
    let mut e = Engine::new(7);
    e.load(WINTER_FEAST).unwrap();
    Shared::new(e)
}

async fn call(state: &eo::service::AppState, method: &str, uri: &str, body: Option<Json>) -> (StatusCode, Json) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json = serde_json::from_slice(&bytes).unwrap_or(Json::Null);
    (status, json)
}

fn enabled(view: &Json) -> Vec<String> {
    view["controls"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["enabled"] == true)
        .map(|c| c["property"].as_str().unwrap().to_string())
        .collect()
}

#[tokio::test]
async fn view_lists_rows_and_controls() {
    let s = state();
    let (status, view) = call(&s, "GET", "/api/views/View%20Survivor", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["individual"], "John Doe");
    assert_eq!(view["mode"], "showcase");
    assert!(!view["controls"].as_array().unwrap().is_empty());
    assert!(enabled(&view).is_empty());
    let (status, _) = call(&s, "GET", "/api/views/Nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn edits_and_actions_map_to_status_codes() {
    let s = state();
    let (status, _) = call(&s, "POST", "/api/individuals/John%20Doe/actions/action_hunt", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&s, "POST", "/api/individuals/Nobody/actions/action_hunt", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(
        &s,
        "POST",
        "/api/individuals/John%20Doe/properties/warmthLow",
        Some(json!({"value": 1})),
    )
    .await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    let (status, _) = call(&s, "POST", "/api/individuals/John%20Doe/properties/energy", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = call(
        &s,
        "POST",
        "/api/individuals/John%20Doe/properties/energy",
        Some(json!({"value": 20})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(enabled(&body["view"]), ["action_hunt"]);

    let (status, body) = call(&s, "POST", "/api/individuals/John%20Doe/actions/action_hunt", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["result"]["status"], "Quiescent");
    assert!(enabled(&body["view"]).is_empty());
    assert_eq!(
        s.engine().current_value("John Doe", "hasRawMeat").unwrap(),
        Value::Number(1.0)
    );
}

#[tokio::test]
async fn trace_analysis_and_load() {
    let s = state();
    let (_, body) = call(
        &s,
        "POST",
        "/api/individuals/John%20Doe/properties/energy",
        Some(json!({"value": 20})),
    )
    .await;
    let low = body["result"]["events"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["type"] == "energyLow")
        .unwrap()["id"]
        .as_str()
        .unwrap()
        .to_string();
    let (status, trace) = call(&s, "GET", &format!("/api/trace/{low}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(trace["root"], low.as_str());
    assert!(trace["nodes"].as_array().unwrap().len() >= 2);
    let (status, _) = call(&s, "GET", "/api/trace/zz", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, report) = call(&s, "GET", "/api/analysis", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["errors"], json!([]));

    let req = Request::post("/api/load")
        .body(Body::from("Survivor: Individual: Jane\n: SetModel: Model Survivor\n: energy: 10\n: warmth: 50\n"))
        .unwrap();
    let resp = router(s.clone()).oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(
        s.engine().current_value("Jane", "energyLow").unwrap(),
        Value::Number(1.0)
    );
    let req = Request::post("/api/load").body(Body::from("Survivor: Model:")).unwrap();
    let resp = router(s.clone()).oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn event_stream_replays_backlog_from_cursor() {
    let s = state();
    let total = s.engine().graph().len();
    let last = s.engine().graph().events()[total - 3].id;
    let req = Request::get(format!("/api/events?since={last}")).body(Body::empty()).unwrap();
    let resp = router(s.clone()).oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let mut body = resp.into_body();
    let mut text = String::new();
    while text.matches("data:").count() < 2 {
        let frame = body.frame().await.unwrap().unwrap();
        if let Ok(data) = frame.into_data() {
            text.push_str(std::str::from_utf8(&data).unwrap());
        }
    }
    let expected: Vec<String> = s.engine().graph().events()[total - 2..]
        .iter()
        .map(|e| e.id.to_string())
        .collect();
    for id in &expected {
        assert!(text.contains(&format!("id: {id}")), "{text}");
    }
}

#[tokio::test]
async fn event_stream_follows_new_appends() {
    use futures::StreamExt;
    let s = state();
    let start = s.engine().graph().len();
    let mut stream = Box::pin(eo::service::event_stream(s.clone(), start));
    let (status, _) = call(
        &s,
        "POST",
        "/api/individuals/John%20Doe/properties/energy",
        Some(json!({"value": 20})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let first = stream.next().await.unwrap();
    assert_eq!(first.kind, "energy");
    let second = stream.next().await.unwrap();
    assert_eq!(second.cause[0], first.id);
}
