//! HTTP access to the service under test.

use std::sync::Mutex;
use std::time::Duration;

use reqwest::header::{ACCEPT, CONTENT_TYPE};
use thiserror::Error;
use url::Url;

use crate::apostl::Method;
use crate::json::JsonValue;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const MAX_REDIRECTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct HttpResponse {
    pub code: u16,
    /// Parsed body; `None` when the payload is not JSON.
    pub body: Option<JsonValue>,
    pub raw_text: String,
    /// Top-level `"message"` of an error body.
    pub message: Option<String>,
}

impl HttpResponse {
    pub fn new(code: u16, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let body = serde_json::from_str::<serde_json::Value>(&raw_text).ok().map(JsonValue::from);
        let message = if code == 200 {
            None
        } else {
            body.as_ref().and_then(|b| b.get("message")).and_then(JsonValue::as_str).map(str::to_string)
        };
        HttpResponse { code, body, raw_text, message }
    }

    pub fn is_success(&self) -> bool {
        self.code == 200
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transport error: {reason}")]
pub struct TransportError {
    pub reason: String,
}

impl TransportError {
    pub fn new(reason: impl Into<String>) -> Self {
        TransportError { reason: reason.into() }
    }
}

pub trait Transport {
    fn send(&self, method: Method, url: &Url, body: Option<&JsonValue>) -> Result<HttpResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for &T {
    fn send(&self, method: Method, url: &Url, body: Option<&JsonValue>) -> Result<HttpResponse, TransportError> {
        (**self).send(method, url, body)
    }
}

/// Blocking HTTP/1.1 client.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new() -> Result<Self, TransportError> {
        Self::with_timeout(DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(timeout: Duration) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .redirect(reqwest::redirect::Policy::limited(MAX_REDIRECTS))
            .build()
            .map_err(|e| TransportError::new(e.to_string()))?;
        Ok(HttpTransport { client })
    }
}

impl Transport for HttpTransport {
    fn send(&self, method: Method, url: &Url, body: Option<&JsonValue>) -> Result<HttpResponse, TransportError> {
        let verb = match method {
            Method::Get => reqwest::Method::GET,
            Method::Post => reqwest::Method::POST,
            Method::Put => reqwest::Method::PUT,
            Method::Delete => reqwest::Method::DELETE,
        };
        let mut request = self.client.request(verb, url.as_str()).header(ACCEPT, "application/json");
        if let Some(body) = body {
            request = request.header(CONTENT_TYPE, "application/json").body(body.to_json_string());
        }
        let response = request.send().map_err(|e| TransportError::new(e.to_string()))?;
        let code = response.status().as_u16();
        let text = response.text().map_err(|e| TransportError::new(e.to_string()))?;
        Ok(HttpResponse::new(code, text))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordedRequest {
    pub method: Method,
    pub url: String,
    pub body: Option<JsonValue>,
}

/// Wraps another transport and records every request passed through it.
pub struct SpyTransport<T> {
    inner: T,
    log: Mutex<Vec<RecordedRequest>>,
}

impl<T: Transport> SpyTransport<T> {
    pub fn new(inner: T) -> Self {
        SpyTransport { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.log.lock().map(|log| log.clone()).unwrap_or_default()
    }

    pub fn clear(&self) {
        if let Ok(mut log) = self.log.lock() {
            log.clear();
        }
    }
}

impl<T: Transport> Transport for SpyTransport<T> {
    fn send(&self, method: Method, url: &Url, body: Option<&JsonValue>) -> Result<HttpResponse, TransportError> {
        if let Ok(mut log) = self.log.lock() {
            log.push(RecordedRequest { method, url: url.to_string(), body: body.cloned() });
        }
        self.inner.send(method, url, body)
    }
}

/// Appends path segments to `base`, percent-encoding each one.
pub fn join_url(base: &Url, segments: &[String]) -> Url {
    let mut url = base.clone();
    if let Ok(mut path) = url.path_segments_mut() {
        path.pop_if_empty();
        for segment in segments {
            path.push(segment);
        }
    }
    url
}
