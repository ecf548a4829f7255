//! HTTP front end: `POST /api/solve` and `GET /healthz`.
//!
//! Infeasible instances are answered with 200 and `"status":"infeasible"`;
//! only malformed or oversized requests are errors.

use std::sync::Arc;

use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use calisson::infinite::{solve_infinite, Window};
use calisson::instance::{instance_from_value, InstanceError, Violation, ViolationCode};
use calisson::render::{render, RenderOptions};
use calisson::solvers::{solve, Algorithm, SolveError};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_MAX_TRIANGLES: usize = 250_000;
pub const MAX_HEXAGON: u64 = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub port: u16,
    pub max_triangles: usize,
    /// Allowed browser origin; `*` allows any.
    pub cors_origin: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config { port: DEFAULT_PORT, max_triangles: DEFAULT_MAX_TRIANGLES, cors_origin: None }
    }
}

impl Config {
    /// Read `CALISSON_PORT`, `CALISSON_MAX_TRIANGLES` and `CALISSON_CORS_ORIGIN`.
    pub fn from_env() -> Self {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Self {
        let d = Config::default();
        fn parse<T: std::str::FromStr>(get: &impl Fn(&str) -> Option<String>, key: &str) -> Option<T> {
            let v = get(key)?;
            let p = v.trim().parse().ok();
            if p.is_none() {
                log::warn!("ignoring unparsable {key}={v:?}");
            }
            p
        }
        Config {
            port: parse(&get, "CALISSON_PORT").unwrap_or(d.port),
            max_triangles: parse(&get, "CALISSON_MAX_TRIANGLES").unwrap_or(d.max_triangles),
            cors_origin: get("CALISSON_CORS_ORIGIN").filter(|s| !s.is_empty()),
        }
    }
}

pub fn router(config: Config) -> Router {
    let cors = config.cors_origin.as_deref().map(|origin| {
        let allow = if origin == "*" {
            AllowOrigin::from(Any)
        } else {
            match HeaderValue::from_str(origin) {
                Ok(v) => AllowOrigin::exact(v),
                Err(_) => {
                    log::warn!("invalid CALISSON_CORS_ORIGIN {origin:?}, CORS disabled");
                    AllowOrigin::list([])
                }
            }
        };
        CorsLayer::new()
            .allow_origin(allow)
            .allow_methods([Method::GET, Method::POST, Method::HEAD])
            .allow_headers([header::CONTENT_TYPE])
    });
    let app = Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/solve", post(solve_handler))
        .with_state(Arc::new(config));
    match cors {
        Some(layer) => app.layer(layer),
        None => app,
    }
}

fn violations_response(status: StatusCode, violations: &[Violation]) -> Response {
    (status, Json(json!({ "violations": violations }))).into_response()
}

fn bad_request(code: ViolationCode, message: impl Into<String>) -> Response {
    violations_response(StatusCode::BAD_REQUEST, &[Violation::new(code, message)])
}

/// Reject regions above the cap before building them.
fn size_check(instance: &Value, max_triangles: usize) -> Result<(), Violation> {
    let region = &instance["region"];
    let too_large = |what: String| Violation::new(ViolationCode::TooLarge, what);
    match region["type"].as_str() {
        Some("hexagon") => {
            if let Some(n) = region["n"].as_u64() {
                if n > MAX_HEXAGON {
                    return Err(too_large(format!("hexagon size {n} exceeds {MAX_HEXAGON}")));
                }
                if 6 * n * n > max_triangles as u64 {
                    return Err(too_large(format!("{} triangles exceed {max_triangles}", 6 * n * n)));
                }
            }
        }
        Some("triangles") => {
            let len = region["triangles"].as_array().map_or(0, Vec::len);
            if len > max_triangles {
                return Err(too_large(format!("{len} triangles exceed {max_triangles}")));
            }
        }
        _ => {}
    }
    Ok(())
}

async fn solve_handler(State(config): State<Arc<Config>>, body: String) -> Response {
    let body: Value = match serde_json::from_str(&body) {
        Ok(v) => v,
        Err(e) => return bad_request(ViolationCode::InvalidArgument, format!("malformed JSON: {e}")),
    };
    // The instance may be wrapped in a request object or sent bare.
    let instance_value = body.get("instance").cloned().unwrap_or_else(|| body.clone());
    if let Err(v) = size_check(&instance_value, config.max_triangles) {
        return violations_response(StatusCode::PAYLOAD_TOO_LARGE, &[v]);
    }
    let algo: Algorithm = match body.get("algo").and_then(Value::as_str).unwrap_or("bf").parse() {
        Ok(a) => a,
        Err(e) => return bad_request(ViolationCode::InvalidArgument, e),
    };
    let window: Option<Window> = match body.get("window") {
        None | Some(Value::Null) => None,
        Some(w) => match serde_json::from_value(w.clone()) {
            Ok(w) => Some(w),
            Err(e) => return bad_request(ViolationCode::InvalidArgument, format!("window: {e}")),
        },
    };
    let include_svg = body.get("includeSvg").and_then(Value::as_bool).unwrap_or(false);

    let instance = match instance_from_value(&instance_value) {
        Ok(i) => i,
        Err(e @ InstanceError::Syntax { .. }) => return bad_request(ViolationCode::InvalidArgument, e.to_string()),
        Err(InstanceError::Invalid(v)) => return violations_response(StatusCode::BAD_REQUEST, &v),
    };
    if instance.region().is_bounded() && instance.region().triangles().len() > config.max_triangles {
        return violations_response(
            StatusCode::PAYLOAD_TOO_LARGE,
            &[Violation::new(ViolationCode::TooLarge, "region exceeds the triangle cap")],
        );
    }
    let bounded = instance.region().is_bounded();
    if (algo == Algorithm::Infinite) == bounded {
        let msg = if bounded {
            "algo infinite requires a region of type \"infinite\""
        } else {
            "an infinite region requires algo infinite"
        };
        return bad_request(ViolationCode::Unsupported, msg);
    }
    if window.is_some() && bounded {
        return bad_request(ViolationCode::Unsupported, "window applies to algo infinite only");
    }

    let work = tokio::task::spawn_blocking(move || {
        let out = if algo == Algorithm::Infinite { solve_infinite(&instance, window) } else { solve(&instance, algo) }?;
        let svg = if include_svg { Some(render(&instance, Some(&out), &RenderOptions::default())?) } else { None };
        Ok::<_, SolveError>((out, svg))
    })
    .await;
    match work {
        Ok(Ok((out, svg))) => {
            let mut doc = serde_json::to_value(out.to_doc()).expect("outcome serializes");
            if let Some(svg) = svg {
                doc["svg"] = Value::String(svg);
            }
            (StatusCode::OK, Json(doc)).into_response()
        }
        Ok(Err(SolveError::Invalid(v))) => violations_response(StatusCode::BAD_REQUEST, &v),
        Ok(Err(e)) => {
            log::error!("solve failed: {e}");
            (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({"error": e.to_string()}))).into_response()
        }
        Err(e) => {
            log::error!("solver task failed: {e}");
            (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({"error": "solver task failed"}))).into_response()
        }
    }
}
