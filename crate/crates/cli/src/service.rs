//! HTTP API over a single in-memory session.
//!
//! Readers grab the current [`Snapshot`] and never block each other.
//! Mutations are serialized: each one copies the inputs, applies the edit,
//! re-runs the whole analysis and publishes a new snapshot with the
//! revision bumped by one.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use sheetrace::io::{cell_content, intervals_document, workbook_document, CellSpec};
use sheetrace::report::report_from;
use sheetrace::{
    parse_address, Analysis, AnalysisReport, AnalysisTraceError, CellAddress, ExpectedSheet,
    Interval, Workbook,
};

use crate::timestamp_now;

pub const REVISION_HEADER: &str = "x-revision";

/// Inputs plus everything derived from them. Never mutated once built.
#[derive(Debug)]
pub struct Snapshot {
    pub revision: u64,
    pub workbook: Workbook,
    pub expected: ExpectedSheet,
    pub analysis: Analysis,
    pub report: AnalysisReport,
}

impl Snapshot {
    fn derive(revision: u64, workbook: Workbook, expected: ExpectedSheet) -> Self {
        let analysis = Analysis::run(&workbook, &expected);
        let report = report_from(&workbook, &expected, &analysis).stamped(timestamp_now());
        Snapshot {
            revision,
            workbook,
            expected,
            analysis,
            report,
        }
    }
}

#[derive(Debug)]
pub struct Session {
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
}

impl Session {
    pub fn new(workbook: Workbook, expected: ExpectedSheet) -> Self {
        Session {
            current: RwLock::new(Arc::new(Snapshot::derive(0, workbook, expected))),
            writer: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock").clone()
    }

    /// Apply `edit` to copies of the current inputs. On success the
    /// re-derived snapshot replaces the current one; on error nothing
    /// changes.
    pub fn mutate<F>(&self, edit: F) -> Result<Arc<Snapshot>, ApiError>
    where
        F: FnOnce(&mut Workbook, &mut ExpectedSheet) -> Result<(), ApiError>,
    {
        let _guard = self.writer.lock().expect("writer lock");
        let cur = self.snapshot();
        let mut wb = cur.workbook.clone();
        let mut expected = cur.expected.clone();
        edit(&mut wb, &mut expected)?;
        let next = Arc::new(Snapshot::derive(cur.revision + 1, wb, expected));
        *self.current.write().expect("snapshot lock") = next.clone();
        Ok(next)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub error: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellAddress>,
}

impl ApiError {
    fn new(
        status: StatusCode,
        code: &str,
        detail: impl Into<String>,
        cell: Option<CellAddress>,
    ) -> Self {
        ApiError {
            status: status.as_u16(),
            error: code.into(),
            detail: detail.into(),
            cell,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

/// Body of `PUT /api/cell/{addr}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CellEdit {
    Formula(String),
    Number(f64),
    Text(String),
    Clear(bool),
}

fn address(raw: &str) -> Result<CellAddress, ApiError> {
    parse_address(raw).map(|a| a.relative()).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "MalformedAddress",
            e.to_string(),
            None,
        )
    })
}

fn body<T: for<'de> Deserialize<'de>>(bytes: &[u8], cell: CellAddress) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "FormatError",
            e.to_string(),
            Some(cell),
        )
    })
}

fn with_revision<T: Serialize>(revision: u64, value: &T) -> Response {
    let mut resp = Json(value).into_response();
    resp.headers_mut()
        .insert(REVISION_HEADER, HeaderValue::from(revision));
    resp
}

type Shared = State<Arc<Session>>;

async fn get_report(State(s): Shared) -> Response {
    let snap = s.snapshot();
    with_revision(snap.revision, &snap.report)
}

async fn get_workbook(State(s): Shared) -> Response {
    let snap = s.snapshot();
    with_revision(snap.revision, &workbook_document(&snap.workbook))
}

async fn get_intervals(State(s): Shared) -> Response {
    let snap = s.snapshot();
    with_revision(snap.revision, &intervals_document(&snap.expected))
}

async fn get_trace(State(s): Shared, Path(raw): Path<String>) -> Result<Response, ApiError> {
    let cell = address(&raw)?;
    let snap = s.snapshot();
    if snap.report.cell(cell).is_none() {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "UnknownCell",
            format!("{cell} is not part of the workbook"),
            Some(cell),
        ));
    }
    match snap.analysis.trace(cell) {
        Ok(result) => Ok(with_revision(snap.revision, &result)),
        Err(AnalysisTraceError::Trace(e)) => Err(ApiError::new(
            StatusCode::CONFLICT,
            "QueryNotFaulty",
            e.to_string(),
            Some(cell),
        )),
        Err(AnalysisTraceError::Circular(c)) => Err(ApiError::new(
            StatusCode::CONFLICT,
            "CircularReference",
            c.to_string(),
            c.cycle.first().copied(),
        )),
    }
}

async fn put_cell(
    State(s): Shared,
    Path(raw): Path<String>,
    bytes: Bytes,
) -> Result<Response, ApiError> {
    let cell = address(&raw)?;
    let edit: CellEdit = body(&bytes, cell)?;
    let spec = match edit {
        CellEdit::Clear(true) => None,
        CellEdit::Clear(false) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "FormatError",
                "clear must be true",
                Some(cell),
            ))
        }
        CellEdit::Formula(f) => Some(CellSpec::Formula(f)),
        CellEdit::Number(n) => Some(CellSpec::Number(n)),
        CellEdit::Text(t) => Some(CellSpec::Text(t)),
    };
    let content = spec
        .map(|spec| cell_content(&spec))
        .transpose()
        .map_err(|detail| {
            ApiError::new(StatusCode::BAD_REQUEST, "FormatError", detail, Some(cell))
        })?;
    let snap = s.mutate(|wb, _| {
        match content {
            Some(c) => wb.set(cell, c).map_err(|e| {
                ApiError::new(
                    StatusCode::BAD_REQUEST,
                    "FormatError",
                    e.to_string(),
                    Some(cell),
                )
            })?,
            None => wb.clear(cell),
        }
        Ok(())
    })?;
    Ok(with_revision(snap.revision, &snap.report))
}

async fn put_interval(
    State(s): Shared,
    Path(raw): Path<String>,
    bytes: Bytes,
) -> Result<Response, ApiError> {
    let cell = address(&raw)?;
    let [lo, hi]: [f64; 2] = body(&bytes, cell)?;
    let iv = Interval::new(lo, hi).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "InvalidInterval",
            e.to_string(),
            Some(cell),
        )
    })?;
    let snap = s.mutate(|_, expected| {
        expected.insert(cell, iv);
        Ok(())
    })?;
    Ok(with_revision(snap.revision, &snap.report))
}

async fn delete_interval(State(s): Shared, Path(raw): Path<String>) -> Result<Response, ApiError> {
    let cell = address(&raw)?;
    let snap = s.mutate(|_, expected| {
        expected.remove(cell);
        Ok(())
    })?;
    Ok(with_revision(snap.revision, &snap.report))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such endpoint", None)
}

pub fn router(session: Session) -> Router {
    Router::new()
        .route("/api/report", get(get_report))
        .route("/api/workbook", get(get_workbook))
        .route("/api/intervals", get(get_intervals))
        .route("/api/trace/{addr}", get(get_trace))
        .route("/api/cell/{addr}", put(put_cell))
        .route(
            "/api/interval/{addr}",
            put(put_interval).delete(delete_interval),
        )
        .fallback(not_found)
        .with_state(Arc::new(session))
}

/// Bind and serve until ctrl-c.
pub async fn serve(session: Session, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(session))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
