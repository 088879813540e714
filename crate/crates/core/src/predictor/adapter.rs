//! Line-delimited JSON bridge to an external completion process.
//!
//! Each request is `{"id","prompt"}` on the child's stdin; each response is
//! `{"id","completion"}` on its stdout. Ids are request sequence numbers.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterConfig {
    pub command: Vec<String>,
    pub timeout_secs: f64,
    pub max_parallel: usize,
}

impl AdapterConfig {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            timeout_secs: 60.0,
            max_parallel: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("adapter config: {0}")]
    Config(String),
    #[error("cannot start adapter `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("adapter gave no response within {0:?}")]
    Timeout(Duration),
    #[error("adapter protocol error: {0}")]
    Protocol(String),
    #[error("adapter exited with status {0}")]
    Exit(String),
}

#[derive(Serialize)]
struct Request<'a> {
    id: String,
    prompt: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: String,
    completion: String,
}

enum Event {
    Line(String),
    ReadFailed(String),
    Closed,
}

fn spawn_reader(stdout: impl std::io::Read + Send + 'static, tx: Sender<Event>) {
    thread::spawn(move || {
        let reader = BufReader::new(stdout);
        for line in reader.lines() {
            let event = match line {
                Ok(l) => Event::Line(l),
                Err(e) => Event::ReadFailed(e.to_string()),
            };
            if tx.send(event).is_err() {
                return;
            }
        }
        let _ = tx.send(Event::Closed);
    });
}

// Writes happen off the main thread so a child that stops reading cannot block the timeout.
fn spawn_writer(mut stdin: ChildStdin, rx: Receiver<String>) {
    thread::spawn(move || {
        for line in rx {
            if stdin.write_all(line.as_bytes()).is_err() || stdin.flush().is_err() {
                return;
            }
        }
    });
}

struct Session {
    child: Child,
    writer: Option<Sender<String>>,
    events: Receiver<Event>,
}

impl Session {
    fn start(config: &AdapterConfig) -> Result<Self, AdapterError> {
        let (program, args) = config
            .command
            .split_first()
            .ok_or_else(|| AdapterError::Config("empty command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| AdapterError::Spawn {
                command: config.command.join(" "),
                source,
            })?;
        let (event_tx, events) = mpsc::channel();
        spawn_reader(child.stdout.take().expect("piped stdout"), event_tx);
        let (line_tx, line_rx) = mpsc::channel();
        spawn_writer(child.stdin.take().expect("piped stdin"), line_rx);
        Ok(Self {
            child,
            writer: Some(line_tx),
            events,
        })
    }

    fn send(&self, line: String) {
        if let Some(w) = &self.writer {
            // a dead writer shows up as a closed stdout or a nonzero exit
            let _ = w.send(line);
        }
    }

    fn exit_error(&mut self, timeout: Duration) -> AdapterError {
        match self.wait(timeout) {
            Some(status) if !status.success() => AdapterError::Exit(status.to_string()),
            _ => AdapterError::Protocol("adapter closed its output early".into()),
        }
    }

    fn wait(&mut self, timeout: Duration) -> Option<std::process::ExitStatus> {
        let deadline = Instant::now() + timeout;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) => return Some(status),
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
                _ => return None,
            }
        }
    }

    fn finish(mut self, timeout: Duration) -> Result<(), AdapterError> {
        self.writer.take();
        match self.wait(timeout) {
            Some(status) if status.success() => Ok(()),
            Some(status) => Err(AdapterError::Exit(status.to_string())),
            None => Err(AdapterError::Timeout(timeout)),
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if let Ok(None) = self.child.try_wait() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// Sends every prompt to the adapter and returns completions in prompt order.
///
/// At most `max_parallel` requests are outstanding at once. The timeout bounds each
/// wait for the next response and the final wait for the process to exit.
pub fn adapter_predict(
    prompts: &[String],
    config: &AdapterConfig,
) -> Result<Vec<String>, AdapterError> {
    if config.timeout_secs.is_nan() || config.timeout_secs <= 0.0 {
        return Err(AdapterError::Config("timeout must be positive".into()));
    }
    if config.max_parallel == 0 {
        return Err(AdapterError::Config(
            "max_parallel must be at least 1".into(),
        ));
    }
    let timeout = Duration::from_secs_f64(config.timeout_secs);
    let mut session = Session::start(config)?;

    let mut results: Vec<Option<String>> = vec![None; prompts.len()];
    let mut in_flight: HashMap<String, usize> = HashMap::new();
    let mut next = 0;
    let mut done = 0;

    while done < prompts.len() {
        while next < prompts.len() && in_flight.len() < config.max_parallel {
            let id = next.to_string();
            let mut line = serde_json::to_string(&Request {
                id: id.clone(),
                prompt: &prompts[next],
            })
            .expect("request serializes");
            line.push('\n');
            session.send(line);
            in_flight.insert(id, next);
            next += 1;
        }

        let line = match session.events.recv_timeout(timeout) {
            Ok(Event::Line(l)) => l,
            Ok(Event::ReadFailed(msg)) => return Err(AdapterError::Protocol(msg)),
            Ok(Event::Closed) | Err(RecvTimeoutError::Disconnected) => {
                return Err(session.exit_error(timeout))
            }
            Err(RecvTimeoutError::Timeout) => return Err(AdapterError::Timeout(timeout)),
        };
        if line.trim().is_empty() {
            continue;
        }
        let resp: Response = serde_json::from_str(&line)
            .map_err(|e| AdapterError::Protocol(format!("malformed response {line:?}: {e}")))?;
        let slot = in_flight
            .remove(&resp.id)
            .ok_or_else(|| AdapterError::Protocol(format!("unknown response id `{}`", resp.id)))?;
        results[slot] = Some(resp.completion);
        done += 1;
    }

    session.finish(timeout)?;
    Ok(results
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect())
}
