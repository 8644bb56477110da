//! Line-delimited JSON bridge to a model living in a child process.
//!
//! ```text
//! → {"op":"info"}                     ← {"kind":"continuous"|"probabilistic","n_features":p,"n_classes":2}
//! → {"op":"predict","x":[[...]]}       ← {"y":[...]}
//! → {"op":"predict_proba","x":[[...]]} ← {"p":[[...],[...]]}
//!                                      ← {"error":"message"}
//! ```
//! A malformed reply ends the session; later calls fail immediately.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{check_width, ModelKind, SpectralModel};
use crate::error::{Result, SmxError};

/// Requests above this size are split by rows.
pub const MAX_REQUEST_BYTES: usize = 32 * 1024 * 1024;

#[derive(Debug, Deserialize)]
struct InfoReply {
    kind: ModelKind,
    n_features: usize,
    #[serde(default = "two")]
    n_classes: usize,
}

fn two() -> usize {
    2
}

#[derive(Serialize)]
struct Request<'a> {
    op: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Vec<Vec<f64>>>,
}

#[derive(Debug)]
struct Session {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    alive: bool,
}

impl Session {
    fn exchange(&mut self, line: &str) -> Result<Value> {
        if !self.alive {
            return Err(SmxError::Model("external model session already terminated".into()));
        }
        let res = self.exchange_inner(line);
        if res.is_err() {
            self.terminate();
        }
        res
    }

    fn exchange_inner(&mut self, line: &str) -> Result<Value> {
        let io = |e: std::io::Error| SmxError::Model(format!("external model pipe: {e}"));
        self.stdin.write_all(line.as_bytes()).map_err(io)?;
        self.stdin.write_all(b"\n").map_err(io)?;
        self.stdin.flush().map_err(io)?;
        let mut reply = String::new();
        let read = self.stdout.read_line(&mut reply).map_err(io)?;
        if read == 0 {
            let status = self
                .child
                .try_wait()
                .ok()
                .flatten()
                .map(|s| s.to_string())
                .unwrap_or_else(|| "still running".into());
            return Err(SmxError::Model(format!(
                "external model closed its output ({status})"
            )));
        }
        let value: Value = serde_json::from_str(reply.trim_end())
            .map_err(|e| SmxError::Model(format!("malformed reply from external model: {e}")))?;
        if let Some(msg) = value.get("error") {
            return Err(SmxError::Model(format!(
                "external model error: {}",
                msg.as_str().unwrap_or(&msg.to_string())
            )));
        }
        Ok(value)
    }

    fn terminate(&mut self) {
        if self.alive {
            self.alive = false;
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// A model served by a child process. Requests are serialised through a
/// mutex, so one request is in flight at a time.
#[derive(Debug)]
pub struct ExternalModel {
    session: Mutex<Session>,
    kind: ModelKind,
    n_features: usize,
    command: Vec<String>,
}

impl ExternalModel {
    /// Launches `command` and performs the `info` handshake.
    pub fn spawn(command: &[String]) -> Result<Self> {
        let (prog, args) = command
            .split_first()
            .ok_or_else(|| SmxError::Config("external model command is empty".into()))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| SmxError::Model(format!("cannot launch external model '{prog}': {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut session = Session {
            child,
            stdin,
            stdout,
            alive: true,
        };
        let reply = session.exchange(r#"{"op":"info"}"#)?;
        let info: InfoReply = serde_json::from_value(reply).map_err(|e| {
            session.terminate();
            SmxError::Model(format!("malformed info reply: {e}"))
        })?;
        if info.n_classes != 2 {
            session.terminate();
            return Err(SmxError::Model(format!(
                "external model reports {} classes; only binary models are supported",
                info.n_classes
            )));
        }
        Ok(ExternalModel {
            session: Mutex::new(session),
            kind: info.kind,
            n_features: info.n_features,
            command: command.to_vec(),
        })
    }

    pub fn command(&self) -> &[String] {
        &self.command
    }

    fn request(&self, op: &str, x: ArrayView2<f64>) -> Result<Vec<Value>> {
        let rows: Vec<Vec<f64>> = x.outer_iter().map(|r| r.to_vec()).collect();
        let mut replies = Vec::new();
        self.request_rows(op, &rows, &mut replies)?;
        Ok(replies)
    }

    fn request_rows(&self, op: &str, rows: &[Vec<f64>], out: &mut Vec<Value>) -> Result<()> {
        let line = serde_json::to_string(&Request {
            op,
            x: Some(rows.to_vec()),
        })?;
        if line.len() > MAX_REQUEST_BYTES && rows.len() > 1 {
            let mid = rows.len() / 2;
            self.request_rows(op, &rows[..mid], out)?;
            return self.request_rows(op, &rows[mid..], out);
        }
        let mut session = self
            .session
            .lock()
            .map_err(|_| SmxError::Model("external model session poisoned".into()))?;
        out.push(session.exchange(&line)?);
        Ok(())
    }

    fn malformed(&self, what: &str) -> SmxError {
        if let Ok(mut s) = self.session.lock() {
            s.terminate();
        }
        SmxError::Model(format!("malformed reply from external model: {what}"))
    }
}

impl Drop for ExternalModel {
    fn drop(&mut self) {
        if let Ok(mut s) = self.session.lock() {
            s.terminate();
        }
    }
}

impl SpectralModel for ExternalModel {
    fn kind(&self) -> ModelKind {
        self.kind
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if self.kind != ModelKind::Continuous {
            return Err(SmxError::Model("external model is probabilistic; use predict_proba".into()));
        }
        check_width(self.n_features, x)?;
        if x.nrows() == 0 {
            return Ok(Vec::new());
        }
        let mut y = Vec::with_capacity(x.nrows());
        for reply in self.request("predict", x)? {
            let part: Vec<f64> = reply
                .get("y")
                .cloned()
                .and_then(|v| serde_json::from_value(v).ok())
                .ok_or_else(|| self.malformed("missing numeric 'y'"))?;
            y.extend(part);
        }
        if y.len() != x.nrows() || y.iter().any(|v| !v.is_finite()) {
            return Err(self.malformed("'y' has wrong length or non-finite values"));
        }
        Ok(y)
    }

    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if self.kind != ModelKind::Probabilistic {
            return Err(SmxError::Model("external model is continuous; use predict".into()));
        }
        check_width(self.n_features, x)?;
        if x.nrows() == 0 {
            return Ok(Array2::zeros((0, 2)));
        }
        let mut flat = Vec::with_capacity(2 * x.nrows());
        for reply in self.request("predict_proba", x)? {
            let part: Vec<Vec<f64>> = reply
                .get("p")
                .cloned()
                .and_then(|v| serde_json::from_value(v).ok())
                .ok_or_else(|| self.malformed("missing numeric 'p'"))?;
            for row in part {
                if row.len() != 2 {
                    return Err(self.malformed("probability rows must have 2 entries"));
                }
                flat.extend(row);
            }
        }
        if flat.len() != 2 * x.nrows() {
            return Err(self.malformed("'p' has wrong number of rows"));
        }
        let p = Array2::from_shape_vec((x.nrows(), 2), flat).expect("checked length");
        for row in p.outer_iter() {
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) || (row.sum() - 1.0).abs() > 1e-9 {
                return Err(self.malformed("probability rows must lie in [0,1] and sum to 1"));
            }
        }
        Ok(p)
    }
}
