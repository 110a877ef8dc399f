//! Minimal blocking JSON-over-HTTP client shared by the external parser and
//! completion generator bindings.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Request timeout for every external call.
pub const EXTERNAL_TIMEOUT: Duration = Duration::from_secs(2);

#[derive(Debug, Clone)]
pub struct JsonClient {
    agent: ureq::Agent,
    url: String,
}

impl JsonClient {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        JsonClient {
            agent,
            url: url.into(),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn post<Req: Serialize, Resp: DeserializeOwned>(&self, body: &Req) -> Result<Resp, String> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(body)
            .map_err(|e| e.to_string())?;
        resp.body_mut()
            .read_json::<Resp>()
            .map_err(|e| e.to_string())
    }
}
