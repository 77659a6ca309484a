use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use guifusion_core::{DatabaseError, FlowError, MaintenanceError, ReportError};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no analysis database for {app_id} {version}")]
    UnknownApp { app_id: String, version: String },
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error("no report `{0}`")]
    UnknownReport(String),
    #[error("no screenshot `{0}`")]
    UnknownScreenshot(String),
    #[error("no endpoint {0}")]
    UnknownEndpoint(String),
    #[error("session `{0}` is {1}")]
    SessionClosed(String, &'static str),
    #[error("{0}")]
    InvalidStep(String),
    #[error("session `{0}` has no steps")]
    EmptyHistory(String),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Maintenance(#[from] MaintenanceError),
    #[error(transparent)]
    Database(#[from] DatabaseError),
    #[error("{0}")]
    Internal(String),
}

impl ServiceError {
    /// Stable machine-readable name used in error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownApp { .. } => "UnknownApp",
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::UnknownReport(_) => "UnknownReport",
            ServiceError::UnknownScreenshot(_) => "UnknownScreenshot",
            ServiceError::UnknownEndpoint(_) => "NotFound",
            ServiceError::SessionClosed(..) => "SessionClosed",
            ServiceError::InvalidStep(_) => "InvalidStep",
            ServiceError::EmptyHistory(_) => "EmptyHistory",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Flow(FlowError::HistoryHitsCrash { .. }) => "HistoryHitsCrash",
            ServiceError::Flow(_) => "FlowError",
            ServiceError::Report(_) => "ReportError",
            ServiceError::Maintenance(MaintenanceError::EmptyOwnershipMap) => "EmptyOwnershipMap",
            ServiceError::Maintenance(MaintenanceError::AppMismatch { .. }) => "AppMismatch",
            ServiceError::Maintenance(MaintenanceError::InvalidConfig(_)) => "InvalidConfig",
            ServiceError::Database(_) | ServiceError::Internal(_) => "Internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownApp { .. }
            | ServiceError::UnknownSession(_)
            | ServiceError::UnknownReport(_)
            | ServiceError::UnknownScreenshot(_)
            | ServiceError::UnknownEndpoint(_) => StatusCode::NOT_FOUND,
            ServiceError::SessionClosed(..) | ServiceError::Flow(FlowError::HistoryHitsCrash { .. }) => {
                StatusCode::CONFLICT
            }
            ServiceError::Maintenance(MaintenanceError::EmptyOwnershipMap) => StatusCode::CONFLICT,
            ServiceError::InvalidStep(_)
            | ServiceError::EmptyHistory(_)
            | ServiceError::BadRequest(_)
            | ServiceError::Flow(_)
            | ServiceError::Report(_)
            | ServiceError::Maintenance(_) => StatusCode::BAD_REQUEST,
            ServiceError::Database(DatabaseError::Missing { .. }) => StatusCode::NOT_FOUND,
            ServiceError::Database(_) | ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!("{self}");
        }
        let body = ErrorBody {
            error: self.code(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}
