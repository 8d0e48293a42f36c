use std::io;
use std::net::{SocketAddr, TcpListener};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::JoinHandle;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use tokio::sync::oneshot;

use crate::store::{ApiError, ApiResult, Store};
use crate::FaultFlags;

type Shared = Arc<Mutex<Store>>;

/// A running service bound to a loopback port. Dropping it stops the server.
pub struct FixtureServer {
    addr: SocketAddr,
    store: Shared,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<io::Result<()>>>,
}

impl FixtureServer {
    /// Serves on `127.0.0.1:port`; port 0 picks a free one.
    pub fn start(port: u16, faults: FaultFlags) -> io::Result<Self> {
        let listener = TcpListener::bind(("127.0.0.1", port))?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let store: Shared = Arc::new(Mutex::new(Store::new(faults)));
        let app = router(store.clone());
        let (tx, rx) = oneshot::channel::<()>();
        let thread = std::thread::Builder::new().name(format!("fixture-{}", addr.port())).spawn(move || {
            let runtime = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener)?;
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
            })
        })?;
        Ok(FixtureServer { addr, store, shutdown: Some(tx), thread: Some(thread) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn reset(&self) {
        self.lock().reset();
    }

    pub fn set_faults(&self, faults: FaultFlags) {
        self.lock().faults = faults;
    }

    pub fn faults(&self) -> FaultFlags {
        self.lock().faults
    }

    /// Runs `f` with exclusive access to the state.
    pub fn with_store<R>(&self, f: impl FnOnce(&mut Store) -> R) -> R {
        f(&mut self.lock())
    }

    /// Blocks until the server stops.
    pub fn wait(mut self) -> io::Result<()> {
        match self.thread.take() {
            Some(thread) => thread.join().unwrap_or_else(|_| Err(io::Error::other("server thread panicked"))),
            None => Ok(()),
        }
    }

    fn lock(&self) -> MutexGuard<'_, Store> {
        lock(&self.store)
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

fn lock(store: &Shared) -> MutexGuard<'_, Store> {
    store.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn reply(result: ApiResult) -> Response {
    match result {
        Ok(body) => (StatusCode::OK, Json(body)).into_response(),
        Err(ApiError { status, message }) => {
            let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            (status, Json(json!({ "message": message }))).into_response()
        }
    }
}

fn parse_body(body: &str) -> Result<Value, ApiError> {
    serde_json::from_str(body).map_err(|e| ApiError { status: 400, message: format!("Malformed JSON body: {e}.") })
}

/// Handler over the locked store.
fn with<F>(store: &Shared, f: F) -> Response
where
    F: FnOnce(&mut Store) -> ApiResult,
{
    reply(f(&mut lock(store)))
}

fn with_body<F>(store: &Shared, body: &str, f: F) -> Response
where
    F: FnOnce(&mut Store, &Value) -> ApiResult,
{
    reply(parse_body(body).and_then(|value| f(&mut lock(store), &value)))
}

fn router(store: Shared) -> Router {
    Router::new()
        .route(
            "/players",
            get(|State(s): State<Shared>| async move { with(&s, |st| st.list_players()) })
                .post(|State(s): State<Shared>, body: String| async move {
                    with_body(&s, &body, |st, v| st.create_player(v))
                }),
        )
        .route(
            "/players/{nif}",
            get(|State(s): State<Shared>, Path(nif): Path<String>| async move { with(&s, |st| st.get_player(&nif)) })
                .put(|State(s): State<Shared>, Path(nif): Path<String>, body: String| async move {
                    with_body(&s, &body, |st, v| st.update_player(&nif, v))
                })
                .delete(|State(s): State<Shared>, Path(nif): Path<String>| async move {
                    with(&s, |st| st.delete_player(&nif))
                }),
        )
        .route(
            "/players/{nif}/enrollments",
            get(|State(s): State<Shared>, Path(nif): Path<String>| async move {
                with(&s, |st| st.player_enrollments(&nif))
            }),
        )
        .route(
            "/tournaments",
            get(|State(s): State<Shared>| async move { with(&s, |st| st.list_tournaments()) })
                .post(|State(s): State<Shared>, body: String| async move {
                    with_body(&s, &body, |st, v| st.create_tournament(v))
                }),
        )
        .route(
            "/tournaments/{id}",
            get(|State(s): State<Shared>, Path(id): Path<String>| async move { with(&s, |st| st.get_tournament(&id)) })
                .put(|State(s): State<Shared>, Path(id): Path<String>, body: String| async move {
                    with_body(&s, &body, |st, v| st.update_tournament(&id, v))
                })
                .delete(|State(s): State<Shared>, Path(id): Path<String>| async move {
                    with(&s, |st| st.delete_tournament(&id))
                }),
        )
        .route(
            "/tournaments/{id}/capacity",
            get(|State(s): State<Shared>, Path(id): Path<String>| async move { with(&s, |st| st.capacity(&id)) }),
        )
        .route(
            "/tournaments/{id}/enrollments",
            get(|State(s): State<Shared>, Path(id): Path<String>| async move {
                with(&s, |st| st.tournament_enrollments(&id))
            })
            .post(|State(s): State<Shared>, Path(id): Path<String>, body: String| async move {
                with_body(&s, &body, |st, v| st.enroll_player(&id, v))
            }),
        )
        .route(
            "/tournaments/{id}/enrollments/{nif}",
            get(|State(s): State<Shared>, Path((id, nif)): Path<(String, String)>| async move {
                with(&s, |st| st.get_enrollment(&id, &nif))
            })
            .delete(|State(s): State<Shared>, Path((id, nif)): Path<(String, String)>| async move {
                with(&s, |st| st.delete_enrollment(&id, &nif))
            }),
        )
        .route(
            "/_admin/faults",
            get(|State(s): State<Shared>| async move { Json(json!(lock(&s).faults)) })
                .post(|State(s): State<Shared>, body: String| async move { set_faults(&s, &body) }),
        )
        .route(
            "/_admin/reset",
            post(|State(s): State<Shared>| async move {
                lock(&s).reset();
                Json(json!({}))
            }),
        )
        .with_state(store)
}

/// Overlays a partial `{flag: bool}` map on the current flags.
fn set_faults(store: &Shared, body: &str) -> Response {
    let mut st = lock(store);
    let merged = parse_body(body).and_then(|patch| {
        let Value::Object(patch) = patch else {
            return Err(ApiError { status: 400, message: "Expected an object of flags.".into() });
        };
        let mut current = json!(st.faults);
        for (key, value) in patch {
            current[key] = value;
        }
        serde_json::from_value::<FaultFlags>(current).map_err(|e| ApiError { status: 400, message: e.to_string() })
    });
    match merged {
        Ok(flags) => {
            st.faults = flags;
            reply(Ok(json!(flags)))
        }
        Err(e) => reply(Err(e)),
    }
}
