//! Read-only JSON API over a directory of run artifacts.
//!
//! Every request reads from disk; nothing is cached and nothing is written.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use adaptopt_core::cobot::ActionMetrics;
use adaptopt_core::workflow::parse_workflow;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifact::{FrontDocument, CONFIG_FILE, FRONT_FILE, ORACLE_FRONT_FILE, STATS_FILE};
use crate::config::is_valid_run_id;
use crate::CliError;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Serialize)]
struct RunListing {
    run_id: String,
    /// `"optimization"` or `"oracle"`.
    kind: &'static str,
    algorithm: Option<String>,
    objectives: Vec<crate::artifact::ObjectiveInfo>,
    solution_count: usize,
}

#[derive(Debug, Serialize)]
struct AssignmentRow {
    action_id: String,
    name: String,
    /// `"cobot"` or `"human"`.
    executor: &'static str,
    duration_s: f64,
    ergonomic_penalty: i64,
    execution_time_human: f64,
    execution_time_cobot: f64,
    ergonomic_penalty_human: i64,
}

#[derive(Debug, Serialize)]
struct Totals {
    duration_s: f64,
    ergonomic_penalty: i64,
}

#[derive(Debug, Serialize)]
struct SolutionDetail {
    run_id: String,
    index: usize,
    genotype: std::collections::BTreeMap<String, Value>,
    objectives: Vec<NamedObjective>,
    workflow_file: String,
    assignment: Vec<AssignmentRow>,
    /// Sums over `assignment`, recomputed from the stored workflow.
    totals: Totals,
}

#[derive(Debug, Serialize)]
struct NamedObjective {
    name: String,
    direction: String,
    value: f64,
}

pub fn router(runs_dir: impl Into<PathBuf>) -> Router {
    let state = Arc::new(runs_dir.into());
    Router::new()
        .route("/api/runs", get(list_runs))
        .route("/api/runs/{id}/front", get(front))
        .route("/api/runs/{id}/stats", get(stats))
        .route("/api/runs/{id}/solutions/{k}", get(solution))
        .route("/api/runs/{id}/solutions/{k}/workflow.xml", get(solution_xml))
        .fallback(|| async { ApiError::not_found("no such resource") })
        .with_state(state)
}

/// Binds `host:port` and serves until Ctrl-C.
pub async fn serve(runs_dir: PathBuf, host: &str, port: u16) -> Result<(), CliError> {
    if !runs_dir.is_dir() {
        return Err(CliError::Usage(format!("runs directory '{}' does not exist", runs_dir.display())));
    }
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| CliError::Usage(format!("bad listen address '{host}:{port}': {e}")))?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| CliError::Server(format!("cannot bind {addr}: {e}")))?;
    log::info!("serving {} on http://{addr}", runs_dir.display());
    axum::serve(listener, router(runs_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::Server(e.to_string()))
}

type Dir = State<Arc<PathBuf>>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

async fn list_runs(State(dir): Dir) -> ApiResult<Json<Vec<RunListing>>> {
    blocking(move || list_runs_sync(&dir)).await.map(Json)
}

async fn front(State(dir): Dir, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    blocking(move || {
        let (path, _) = front_path(&dir, &id)?;
        let body = read(&path)?;
        Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
    })
    .await
}

async fn stats(State(dir): Dir, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    blocking(move || {
        let run = run_dir(&dir, &id)?;
        let path = run.join(STATS_FILE);
        if !path.is_file() {
            return Err(ApiError::not_found(format!("run '{id}' has no stats")));
        }
        let body = read(&path)?;
        Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
    })
    .await
}

async fn solution(State(dir): Dir, UrlPath((id, k)): UrlPath<(String, String)>) -> ApiResult<Json<Value>> {
    blocking(move || {
        let detail = solution_detail(&dir, &id, &k)?;
        serde_json::to_value(detail)
            .map(Json)
            .map_err(|e| ApiError::internal(e.to_string()))
    })
    .await
}

async fn solution_xml(State(dir): Dir, UrlPath((id, k)): UrlPath<(String, String)>) -> ApiResult<Response> {
    blocking(move || {
        let (doc, run) = load_front(&dir, &id)?;
        let record = find_solution(&doc, &id, &k)?;
        let body = read(&run.join(&record.workflow_file))?;
        Ok(([(header::CONTENT_TYPE, "application/xml")], body).into_response())
    })
    .await
}

fn read(path: &Path) -> ApiResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| ApiError::internal(format!("cannot read {}: {e}", path.display())))
}

fn run_dir(root: &Path, id: &str) -> ApiResult<PathBuf> {
    let dir = root.join(id);
    if !is_valid_run_id(id) || !dir.is_dir() {
        return Err(ApiError::not_found(format!("unknown run '{id}'")));
    }
    Ok(dir)
}

/// Path of the front document and whether it is an oracle front.
fn front_path(root: &Path, id: &str) -> ApiResult<(PathBuf, bool)> {
    let dir = run_dir(root, id)?;
    for (name, oracle) in [(FRONT_FILE, false), (ORACLE_FRONT_FILE, true)] {
        let p = dir.join(name);
        if p.is_file() {
            return Ok((p, oracle));
        }
    }
    Err(ApiError::not_found(format!("unknown run '{id}'")))
}

fn load_front(root: &Path, id: &str) -> ApiResult<(FrontDocument, PathBuf)> {
    let (path, _) = front_path(root, id)?;
    let doc = FrontDocument::read(&path).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((doc, root.join(id)))
}

fn find_solution<'a>(doc: &'a FrontDocument, id: &str, k: &str) -> ApiResult<&'a crate::artifact::SolutionRecord> {
    k.parse::<usize>()
        .ok()
        .and_then(|k| doc.solution(k))
        .ok_or_else(|| ApiError::not_found(format!("run '{id}' has no solution '{k}'")))
}

fn list_runs_sync(root: &Path) -> ApiResult<Vec<RunListing>> {
    let entries = std::fs::read_dir(root).map_err(|e| ApiError::internal(format!("cannot list runs: {e}")))?;
    let mut ids: Vec<String> = entries
        .filter_map(Result::ok)
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|id| is_valid_run_id(id))
        .collect();
    ids.sort();
    let mut out = Vec::new();
    for id in ids {
        let Ok((path, oracle)) = front_path(root, &id) else {
            continue;
        };
        let doc = FrontDocument::read(&path).map_err(|e| ApiError::internal(e.to_string()))?;
        let algorithm = if oracle {
            Some("exhaustive".to_owned())
        } else {
            std::fs::read_to_string(root.join(&id).join(CONFIG_FILE))
                .ok()
                .and_then(|t| serde_json::from_str::<Value>(&t).ok())
                .and_then(|v| v["algorithm"]["algorithm"].as_str().map(str::to_owned))
        };
        out.push(RunListing {
            run_id: id,
            kind: if oracle { "oracle" } else { "optimization" },
            algorithm,
            objectives: doc.objectives,
            solution_count: doc.solutions.len(),
        });
    }
    Ok(out)
}

fn solution_detail(root: &Path, id: &str, k: &str) -> ApiResult<SolutionDetail> {
    let (doc, run) = load_front(root, id)?;
    let record = find_solution(&doc, id, k)?;
    let path = run.join(&record.workflow_file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ApiError::internal(format!("cannot read {}: {e}", path.display())))?;
    let workflow = parse_workflow(&text).map_err(|e| ApiError::internal(format!("{}: {e}", path.display())))?;

    let mut assignment = Vec::new();
    for action in workflow.leaf_actions() {
        let m = ActionMetrics::from_action(action).map_err(|e| ApiError::internal(e.to_string()))?;
        assignment.push(AssignmentRow {
            action_id: action.id.clone(),
            name: action.name.clone(),
            executor: if m.is_cobot_utilized { "cobot" } else { "human" },
            duration_s: m.duration(),
            ergonomic_penalty: m.penalty(),
            execution_time_human: m.execution_time_human,
            execution_time_cobot: m.execution_time_cobot,
            ergonomic_penalty_human: m.ergonomic_penalty_human,
        });
    }
    let totals = Totals {
        duration_s: assignment.iter().map(|r| r.duration_s).sum(),
        ergonomic_penalty: assignment.iter().map(|r| r.ergonomic_penalty).sum(),
    };
    Ok(SolutionDetail {
        run_id: doc.run_id.clone(),
        index: record.index,
        genotype: record.genotype.clone(),
        objectives: doc
            .objectives
            .iter()
            .zip(&record.objectives)
            .map(|(o, &value)| NamedObjective {
                name: o.name.clone(),
                direction: o.direction.clone(),
                value,
            })
            .collect(),
        workflow_file: record.workflow_file.clone(),
        assignment,
        totals,
    })
}
