//! Adapter that delegates classical queries to an external reasoner process.
//!
//! One process is spawned per query and spoken to over its standard streams:
//!
//! ```text
//! QUERY
//! <canonical KB serialization>
//! ASK <C> [= <D>
//! END
//! ```
//!
//! The child must reply with exactly one line, `yes` or `no`. Satisfiability
//! goals are phrased as `ASK <C> [= BOT` and the reply negated. Calls on one
//! endpoint are serialized.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;

use crate::kb::{serialize_kb, ConceptExpr};

use super::{query_to_kb, OracleGoal, OracleQuery};

/// Default waiting time for an external verdict.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum ExternalOracleError {
    #[error("failed to spawn `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o towards the oracle process failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("protocol violation: expected `yes` or `no`, got {0:?}")]
    Protocol(String),
    #[error("oracle did not answer within {0:?}")]
    Timeout(Duration),
}

/// A runnable command answering entailment queries over the line protocol.
pub struct ExternalOracle {
    command: String,
    timeout: Duration,
    lock: Mutex<()>,
}

impl ExternalOracle {
    pub fn new(command: impl Into<String>, timeout: Duration) -> Self {
        ExternalOracle { command: command.into(), timeout, lock: Mutex::new(()) }
    }

    pub(crate) fn decide(&self, query: &OracleQuery) -> Result<bool, ExternalOracleError> {
        let (lhs, rhs, negate) = match &query.goal {
            OracleGoal::Subsumption { lhs, rhs } => (lhs.clone(), rhs.clone(), false),
            OracleGoal::ConceptSatisfiable(c) => (c.clone(), ConceptExpr::Bottom, true),
        };
        let kb_text = serialize_kb(&query_to_kb(query));
        let answer = self.ask(&kb_text, &lhs, &rhs)?;
        Ok(if negate { !answer } else { answer })
    }

    fn ask(&self, kb_text: &str, lhs: &ConceptExpr, rhs: &ConceptExpr) -> Result<bool, ExternalOracleError> {
        let _guard = self.lock.lock().unwrap();
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| ExternalOracleError::Spawn { command: self.command.clone(), source })?;

        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            write!(stdin, "QUERY\n{kb_text}ASK {lhs} [= {rhs}\nEND\n")?;
            // dropping stdin closes the stream so line-unaware children see EOF
        }

        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut line = String::new();
            let res = BufReader::new(stdout).read_line(&mut line).map(|_| line);
            let _ = tx.send(res);
        });

        match rx.recv_timeout(self.timeout) {
            Ok(Ok(line)) => {
                reap(&mut child);
                match line.trim() {
                    "yes" => Ok(true),
                    "no" => Ok(false),
                    other => Err(ExternalOracleError::Protocol(other.to_string())),
                }
            }
            Ok(Err(e)) => {
                reap(&mut child);
                Err(ExternalOracleError::Io(e))
            }
            Err(mpsc::RecvTimeoutError::Timeout | mpsc::RecvTimeoutError::Disconnected) => {
                let _ = child.kill();
                let _ = child.wait();
                Err(ExternalOracleError::Timeout(self.timeout))
            }
        }
    }
}

fn reap(child: &mut Child) {
    let _ = child.kill();
    let _ = child.wait();
}
