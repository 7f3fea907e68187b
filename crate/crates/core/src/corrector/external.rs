//! Client for an external corrector speaking a line protocol over stdio:
//! one UTF-8 sentence per line in, one corrected line out, EOF to finish.
//!
//! Lines are sent in lockstep (write, flush, wait for the answer), so an
//! adapter that flushes per line can never deadlock against us.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

pub const DEFAULT_LINE_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error("external corrector command is empty")]
    EmptyCommand,
    #[error("failed to launch `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corrector answered {received} of {sent} lines before closing its output")]
    CountMismatch { sent: usize, received: usize },
    #[error("no answer for line {line} within {timeout:?}: `{text}`")]
    Timeout {
        line: usize,
        text: String,
        timeout: Duration,
    },
    #[error("input line {0} contains a newline")]
    EmbeddedNewline(usize),
    #[error("corrector exited with {0}")]
    ExitStatus(std::process::ExitStatus),
    #[error("i/o error talking to corrector: {0}")]
    Io(#[from] std::io::Error),
}

enum Reply {
    Line(String),
    Eof,
    Failed(std::io::Error),
}

/// A running adapter process.
pub struct ExternalCorrector {
    child: Child,
    stdin: Option<ChildStdin>,
    replies: Receiver<Reply>,
    timeout: Duration,
    sent: usize,
}

impl ExternalCorrector {
    /// Launches `argv[0]` with the remaining arguments.
    pub fn spawn<S: AsRef<str>>(argv: &[S], timeout: Duration) -> Result<Self, ExternalError> {
        let (program, args) = argv.split_first().ok_or(ExternalError::EmptyCommand)?;
        let mut child = Command::new(program.as_ref())
            .args(args.iter().map(AsRef::as_ref))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| ExternalError::Spawn {
                program: program.as_ref().to_string(),
                source,
            })?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                let msg = match reader.read_line(&mut line) {
                    Ok(0) => Reply::Eof,
                    Ok(_) => {
                        let trimmed = line.trim_end_matches(['\n', '\r']).len();
                        line.truncate(trimmed);
                        Reply::Line(line)
                    }
                    Err(e) => Reply::Failed(e),
                };
                let done = !matches!(msg, Reply::Line(_));
                if tx.send(msg).is_err() || done {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            replies: rx,
            timeout,
            sent: 0,
        })
    }

    /// Sends one sentence and waits for its correction.
    pub fn correct_line(&mut self, sentence: &str) -> Result<String, ExternalError> {
        let line_no = self.sent + 1;
        if sentence.contains('\n') {
            return Err(ExternalError::EmbeddedNewline(line_no));
        }
        let stdin = self.stdin.as_mut().expect("stdin open until finish");
        let written = stdin
            .write_all(sentence.as_bytes())
            .and_then(|_| stdin.write_all(b"\n"))
            .and_then(|_| stdin.flush());
        self.sent += 1;
        if let Err(e) = written {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(e.into());
            }
            // The process is gone; fall through and read what is left.
        }
        match self.replies.recv_timeout(self.timeout) {
            Ok(Reply::Line(l)) => Ok(l),
            Ok(Reply::Eof) | Err(RecvTimeoutError::Disconnected) => {
                Err(ExternalError::CountMismatch {
                    sent: self.sent,
                    received: self.sent - 1,
                })
            }
            Ok(Reply::Failed(e)) => Err(e.into()),
            Err(RecvTimeoutError::Timeout) => Err(ExternalError::Timeout {
                line: line_no,
                text: sentence.to_string(),
                timeout: self.timeout,
            }),
        }
    }

    /// Closes stdin and waits for a clean exit.
    pub fn finish(mut self) -> Result<(), ExternalError> {
        drop(self.stdin.take());
        let status = self.child.wait()?;
        if status.success() {
            Ok(())
        } else {
            Err(ExternalError::ExitStatus(status))
        }
    }
}

impl Drop for ExternalCorrector {
    fn drop(&mut self) {
        if self.stdin.is_some() {
            drop(self.stdin.take());
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

/// Streams `sentences` through the adapter, preserving order.
pub fn external_correct<S, I>(
    argv: &[S],
    sentences: I,
    timeout: Duration,
) -> Result<Vec<String>, ExternalError>
where
    S: AsRef<str>,
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut proc = ExternalCorrector::spawn(argv, timeout)?;
    let mut out = Vec::new();
    for s in sentences {
        out.push(proc.correct_line(s.as_ref())?);
    }
    proc.finish()?;
    Ok(out)
}
