//! Minimal in-process HTTP server speaking the remote solver protocol.
//! Useful for exercising [`remote_hybrid`](super::remote_hybrid) offline.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use serde_json::json;

use super::{tabu_search, SampleSet, TabuConfig};
use crate::qubo::QuboProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubRequest {
    pub method: String,
    pub path: String,
    pub authorization: Option<String>,
    pub body: String,
}

type Responder = dyn Fn(&StubRequest) -> (u16, String) + Send + Sync;

pub struct StubServer {
    addr: SocketAddr,
    requests: Arc<Mutex<Vec<StubRequest>>>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Serves on an ephemeral localhost port; `respond` maps each request
    /// to a status code and body.
    pub fn spawn<F>(respond: F) -> io::Result<Self>
    where
        F: Fn(&StubRequest) -> (u16, String) + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let requests = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));
        let respond: Box<Responder> = Box::new(respond);
        let handle = {
            let requests = Arc::clone(&requests);
            let stop = Arc::clone(&stop);
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    if let Err(e) = handle(stream, &respond, &requests) {
                        log::debug!("stub connection failed: {e}");
                    }
                }
            })
        };
        Ok(Self {
            addr,
            requests,
            stop,
            handle: Some(handle),
        })
    }

    /// Answers every well-formed problem with a default tabu search.
    pub fn solver() -> io::Result<Self> {
        Self::spawn(|req| match QuboProblem::from_json(&req.body) {
            Ok(problem) => match tabu_search(&problem, &TabuConfig::default()) {
                Ok(set) => (200, records_json(&set)),
                Err(e) => (500, e.to_string()),
            },
            Err(e) => (400, e.to_string()),
        })
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests(&self) -> Vec<StubRequest> {
        self.requests.lock().map(|r| r.clone()).unwrap_or_default()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// Wire form of a sample set.
pub fn records_json(set: &SampleSet) -> String {
    let records: Vec<_> = set
        .records()
        .iter()
        .map(|r| {
            json!({
                "bits": r.assignment.to_string(),
                "energy": r.energy,
                "occurrences": r.occurrences,
            })
        })
        .collect();
    json!({ "records": records }).to_string()
}

fn handle(
    stream: TcpStream,
    respond: &Responder,
    requests: &Mutex<Vec<StubRequest>>,
) -> io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let mut parts = line.split_whitespace();
    let method = parts.next().unwrap_or_default().to_string();
    let path = parts.next().unwrap_or_default().to_string();
    let mut length = 0usize;
    let mut authorization = None;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        let header = line.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some((name, value)) = header.split_once(':') {
            let value = value.trim();
            if name.eq_ignore_ascii_case("content-length") {
                length = value.parse().unwrap_or(0);
            } else if name.eq_ignore_ascii_case("authorization") {
                authorization = Some(value.to_string());
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body)?;
    let request = StubRequest {
        method,
        path,
        authorization,
        body: String::from_utf8_lossy(&body).into_owned(),
    };
    let (status, reply) = respond(&request);
    if let Ok(mut r) = requests.lock() {
        r.push(request);
    }
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        if status < 400 { "OK" } else { "Error" },
        reply.len()
    )?;
    stream.flush()
}
