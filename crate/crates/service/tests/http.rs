use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use calisson_service::{router, Config};

async fn call(config: Config, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>, axum::http::HeaderMap) {
    let mut req = Request::builder().method(method).uri(uri).header("origin", "http://localhost:5173");
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = router(config).oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes, headers)
}

async fn solve(body: Value) -> (StatusCode, Value) {
    let (s, b, _) = call(Config::default(), Method::POST, "/api/solve", Some(body)).await;
    (s, serde_json::from_slice(&b).unwrap())
}

fn hex1(x2: Value) -> Value {
    json!({"region": {"type": "hexagon", "n": 1}, "x2": x2})
}

#[tokio::test]
async fn solves_the_unique_hexagon() {
    let (s, v) = solve(json!({"instance": hex1(json!([[0,0,0,"Z"]])), "algo": "bf"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "tiled");
    assert_eq!(v["lozenges"].as_array().unwrap().len(), 3);
    assert!(v.get("svg").is_none());
}

#[tokio::test]
async fn infeasible_is_still_ok() {
    let (s, v) = solve(json!({"instance": hex1(json!([[0,0,0,"Z"],[1,1,0,"Z"]])), "algo": "advancing"})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "infeasible");
    assert!(!v["cycle"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn svg_on_request() {
    let (s, v) = solve(json!({"instance": hex1(json!([[0,0,0,"Z"]])), "includeSvg": true})).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["svg"].as_str().unwrap().matches("<polygon ").count(), 3);
}

#[tokio::test]
async fn infinite_with_window() {
    let body = json!({
        "instance": {"region": {"type": "infinite"}, "x2": [[0,0,0,"Z"]]},
        "algo": "infinite",
        "window": {"center": [0,0,0], "radius": 4}
    });
    let (s, v) = solve(body).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "tiled");
    assert_eq!(v["window"]["radius"], 4);
}

#[tokio::test]
async fn validation_errors() {
    let (s, v) = solve(json!({})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["violations"][0]["code"], "missing-region");

    let (s, v) = solve(json!({"instance": hex1(json!([[5,0,0,"Z"]]))})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["violations"][0]["code"], "edge-not-in-region");

    let (s, v) = solve(json!({"instance": hex1(json!([])), "algo": "infinite"})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["violations"][0]["code"], "unsupported");

    let (s, _) = solve(json!({"instance": hex1(json!([])), "algo": "quantum"})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (s, b, _) = call(Config::default(), Method::POST, "/api/solve", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&b).unwrap();
    assert_eq!(v["violations"][0]["code"], "invalid-argument");
}

#[tokio::test]
async fn size_cap() {
    let (s, v) = solve(json!({"instance": {"region": {"type": "hexagon", "n": 201}}})).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(v["violations"][0]["code"], "too-large");

    let small = Config { max_triangles: 20, ..Config::default() };
    let body = json!({"instance": {"region": {"type": "hexagon", "n": 2}}});
    let (s, _, _) = call(small, Method::POST, "/api/solve", Some(body)).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn health_and_not_found() {
    let (s, b, _) = call(Config::default(), Method::GET, "/healthz", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(b, b"ok");
    let (s, _, _) = call(Config::default(), Method::HEAD, "/healthz", None).await;
    assert_eq!(s, StatusCode::OK);
    let (s, _, _) = call(Config::default(), Method::GET, "/nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn cors_origin_from_config() {
    let cfg = Config { cors_origin: Some("http://localhost:5173".into()), ..Config::default() };
    let (_, _, h) = call(cfg, Method::GET, "/healthz", None).await;
    assert_eq!(h["access-control-allow-origin"], "http://localhost:5173");
    let (_, _, h) = call(Config::default(), Method::GET, "/healthz", None).await;
    assert!(h.get("access-control-allow-origin").is_none());
}

#[tokio::test]
async fn identical_requests_identical_answers() {
    let body = json!({"instance": hex1(json!([[0,0,0,"Z"]]))});
    let (_, mut a) = solve(body.clone()).await;
    let (_, mut b) = solve(body).await;
    a["stats"]["elapsed_ms"] = json!(0);
    b["stats"]["elapsed_ms"] = json!(0);
    assert_eq!(a, b);
}

#[test]
fn config_from_lookup() {
    let env = |k: &str| match k {
        "CALISSON_PORT" => Some("9000".to_string()),
        "CALISSON_MAX_TRIANGLES" => Some("oops".to_string()),
        "CALISSON_CORS_ORIGIN" => Some("*".to_string()),
        _ => None,
    };
    let c = Config::from_lookup(env);
    assert_eq!(c.port, 9000);
    assert_eq!(c.max_triangles, calisson_service::DEFAULT_MAX_TRIANGLES);
    assert_eq!(c.cors_origin.as_deref(), Some("*"));
}
