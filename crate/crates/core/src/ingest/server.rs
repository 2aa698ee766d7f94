//! Newline-delimited TCP ingestion service.
//!
//! Commands (UTF-8, one per line, fields separated by tabs):
//!
//! | request                  | reply                              |
//! |--------------------------|------------------------------------|
//! | `OBS<TAB>parent<TAB>child` | `OK<TAB><total observations>`    |
//! | `REPORT`                 | one line of report JSON            |
//! | `SAVE`                   | `OK` once the state file is written |
//! | `QUIT`                   | connection closed                  |
//!
//! Anything else is answered with `ERR<TAB><message>` and the connection
//! stays open. Connections are served concurrently but every observation is
//! applied under one lock, so all connections share a single total order.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

use log::{debug, warn};

use crate::assemble::assemble;
use crate::chain::{ChainSnapshot, ChainStore};
use crate::concept::ObservationPair;
use crate::ingest::state::write_state_file;
use crate::report::ReportJson;
use crate::rules::{classify_all, RuleConfig};

struct Shared {
    store: Mutex<ChainStore>,
    state_path: Option<PathBuf>,
    rules: RuleConfig,
    stopping: AtomicBool,
}

impl Shared {
    fn snapshot(&self) -> ChainSnapshot {
        self.store.lock().expect("store lock poisoned").snapshot()
    }

    /// Reply for one command line, or `None` to close the connection.
    fn handle(&self, line: &str) -> Option<String> {
        let mut fields = line.split('\t');
        let reply = match fields.next().unwrap_or("") {
            "OBS" => {
                let rest: Vec<&str> = fields.collect();
                match rest.as_slice() {
                    [parent, child] => match ObservationPair::parse(parent, child) {
                        Ok(pair) => {
                            let total = self.store.lock().expect("store lock poisoned").observe(&pair);
                            format!("OK\t{total}")
                        }
                        Err(e) => format!("ERR\t{e}"),
                    },
                    _ => "ERR\texpected OBS<TAB>parent<TAB>child".to_string(),
                }
            }
            "REPORT" => {
                let report = classify_all(&self.snapshot(), &self.rules);
                let (_, notes) = assemble(&report);
                ReportJson::new(&report, &notes).to_line()
            }
            "SAVE" => match &self.state_path {
                Some(path) => match write_state_file(path, &self.snapshot()) {
                    Ok(()) => "OK".to_string(),
                    Err(e) => format!("ERR\t{e}"),
                },
                None => "ERR\tno state file configured".to_string(),
            },
            "QUIT" => return None,
            "" => "ERR\tempty command".to_string(),
            other => format!("ERR\tunknown command {other}"),
        };
        Some(reply)
    }
}

fn serve_connection(shared: Arc<Shared>, stream: TcpStream) -> io::Result<()> {
    let peer = stream.peer_addr().ok();
    debug!("connection from {peer:?}");
    stream.set_nodelay(true)?;
    let mut writer = stream.try_clone()?;
    for line in BufReader::new(stream).lines() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        match shared.handle(line) {
            Some(mut reply) => {
                reply.push('\n');
                writer.write_all(reply.as_bytes())?;
            }
            None => break,
        }
    }
    debug!("connection from {peer:?} closed");
    Ok(())
}

pub struct Server {
    listener: TcpListener,
    shared: Arc<Shared>,
}

impl Server {
    pub fn bind(
        addr: impl ToSocketAddrs,
        store: ChainStore,
        state_path: Option<PathBuf>,
        rules: RuleConfig,
    ) -> io::Result<Server> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            shared: Arc::new(Shared {
                store: Mutex::new(store),
                state_path,
                rules,
                stopping: AtomicBool::new(false),
            }),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until [`ServerHandle::shutdown`] is called.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            if self.shared.stopping.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    warn!("accept failed: {e}");
                    continue;
                }
            };
            let shared = Arc::clone(&self.shared);
            thread::spawn(move || {
                if let Err(e) = serve_connection(shared, stream) {
                    warn!("connection error: {e}");
                }
            });
        }
        Ok(())
    }

    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let shared = Arc::clone(&self.shared);
        let join = thread::spawn(move || self.run());
        Ok(ServerHandle { addr, shared, join })
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    join: JoinHandle<io::Result<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn snapshot(&self) -> ChainSnapshot {
        self.shared.snapshot()
    }

    /// Stops accepting connections and returns the final counter state.
    /// Open connections are not waited for.
    pub fn shutdown(self) -> io::Result<ChainSnapshot> {
        self.shared.stopping.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let _ = TcpStream::connect(self.addr);
        self.join
            .join()
            .map_err(|_| io::Error::other("server thread panicked"))??;
        Ok(self.shared.snapshot())
    }
}
