#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use guifusion_core::{fixtures, AppDatabase};
use guifusion_service::{router, Store};
use http_body_util::BodyExt;
use serde_json::Value;
use tempfile::TempDir;
use tower::ServiceExt;

/// A store holding the noteapp 1.0, 2.0 and 2.1 databases.
pub fn noteapp_store() -> (TempDir, Arc<Store>) {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    for src in [fixtures::NOTEAPP_V1, fixtures::NOTEAPP_V2, fixtures::NOTEAPP_V2_REDESIGN] {
        store.install_database(AppDatabase::from_fixture(src)).unwrap();
    }
    (dir, Arc::new(store))
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }
}

pub async fn call(store: &Arc<Store>, method: Method, uri: &str, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = router(store.clone()).oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_owned())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        text: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

pub async fn get(store: &Arc<Store>, uri: &str) -> Reply {
    call(store, Method::GET, uri, None).await
}

pub async fn post(store: &Arc<Store>, uri: &str, body: Value) -> Reply {
    call(store, Method::POST, uri, Some(body)).await
}

pub async fn new_session(store: &Arc<Store>, version: &str) -> String {
    let r = post(store, "/api/sessions", serde_json::json!({"app_id": "noteapp", "version": version})).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text);
    r.json()["session_id"].as_str().unwrap().to_owned()
}

pub async fn step(store: &Arc<Store>, session: &str, body: Value) -> Reply {
    post(store, &format!("/api/sessions/{session}/steps"), body).await
}

/// Relative path → bytes for every file under `root`.
pub fn snapshot(root: &std::path::Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    fn walk(base: &std::path::Path, dir: &std::path::Path, out: &mut std::collections::BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap().flatten() {
            let path = entry.path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = std::collections::BTreeMap::new();
    walk(root, root, &mut out);
    out
}
