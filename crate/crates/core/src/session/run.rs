//! Run lifecycle: a worker thread interprets the program while a watchdog
//! thread enforces the wall-clock budget and kill requests.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU8, Ordering};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread;
use std::time::{Duration, Instant};

use tokio::sync::mpsc;

use super::events::{RunMode, SessionEvent, SourceFile, VizCommand};
use super::interp;
use crate::limits::{Interrupt, LimitKind, ResourceLimits};

/// How long a cancelled worker gets to stop on its own before the watchdog
/// closes the event stream for it.
const GRACE: Duration = Duration::from_millis(300);

pub(crate) enum Wait {
    Line,
    Click,
}

pub(crate) struct RunState {
    closed: bool,
    output_bytes: u64,
    lines: VecDeque<String>,
    clicks: VecDeque<(u32, u32)>,
    grid: Option<(u32, u32)>,
    pending_viz: Vec<VizCommand>,
    started: Instant,
    paused: Duration,
    pause_started: Option<Instant>,
}

impl RunState {
    fn running_time(&self, now: Instant) -> Duration {
        let current = self.pause_started.map_or(Duration::ZERO, |p| now - p);
        (now - self.started).saturating_sub(self.paused + current)
    }
}

pub(crate) struct RunShared {
    state: Mutex<RunState>,
    cond: Condvar,
    /// 0 while running, otherwise the first [`LimitKind`] that stopped it.
    cancel: AtomicU8,
    tx: mpsc::UnboundedSender<SessionEvent>,
    pub(crate) limits: ResourceLimits,
}

fn limit_code(kind: LimitKind) -> u8 {
    match kind {
        LimitKind::Wall => 1,
        LimitKind::Output => 2,
        LimitKind::Killed => 3,
        LimitKind::GroundAtoms => 4,
        LimitKind::Decisions => 5,
    }
}

fn limit_from_code(code: u8) -> Option<LimitKind> {
    Some(match code {
        1 => LimitKind::Wall,
        2 => LimitKind::Output,
        3 => LimitKind::Killed,
        4 => LimitKind::GroundAtoms,
        5 => LimitKind::Decisions,
        _ => return None,
    })
}

/// Why the worker must stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Limit(LimitKind),
    /// The stream was already closed by the watchdog.
    Closed,
}

impl Interrupt for RunShared {
    fn poll(&self) -> Option<LimitKind> {
        limit_from_code(self.cancel.load(Ordering::Acquire))
    }
}

impl RunShared {
    fn lock(&self) -> MutexGuard<'_, RunState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Record a stop reason; the first one wins.
    pub(crate) fn cancel(&self, kind: LimitKind) {
        let _ = self
            .cancel
            .compare_exchange(0, limit_code(kind), Ordering::AcqRel, Ordering::Acquire);
        self.cond.notify_all();
    }

    pub(crate) fn check(&self) -> Result<(), Stop> {
        match self.poll() {
            Some(kind) => Err(Stop::Limit(kind)),
            None => Ok(()),
        }
    }

    fn flush_viz(&self, st: &mut RunState) {
        if !st.pending_viz.is_empty() {
            let commands = std::mem::take(&mut st.pending_viz);
            let _ = self.tx.send(SessionEvent::Viz { commands });
        }
    }

    fn charge(&self, st: &mut RunState, bytes: u64) -> Result<(), Stop> {
        if st.output_bytes + bytes > self.limits.output_bytes_max {
            self.cancel(LimitKind::Output);
            return Err(Stop::Limit(LimitKind::Output));
        }
        st.output_bytes += bytes;
        Ok(())
    }

    /// Emit stdout/stderr/ask. Output beyond the budget is dropped and stops
    /// the run.
    pub(crate) fn emit(&self, event: SessionEvent) -> Result<(), Stop> {
        let mut st = self.lock();
        if st.closed {
            return Err(Stop::Closed);
        }
        let bytes = match &event {
            SessionEvent::Stdout { data } | SessionEvent::Stderr { data } => data.len() as u64,
            _ => 0,
        };
        self.charge(&mut st, bytes)?;
        self.flush_viz(&mut st);
        let _ = self.tx.send(event);
        Ok(())
    }

    pub(crate) fn viz(&self, cmd: VizCommand) -> Result<(), Stop> {
        let mut st = self.lock();
        if st.closed {
            return Err(Stop::Closed);
        }
        self.charge(&mut st, cmd.cost())?;
        if let VizCommand::Grid { width, height } = cmd {
            st.grid = Some((width, height));
            st.clicks.clear();
        }
        st.pending_viz.push(cmd);
        Ok(())
    }

    pub(crate) fn grid(&self) -> Option<(u32, u32)> {
        self.lock().grid
    }

    /// Block until an input line or click arrives. Time spent here does not
    /// count against the wall budget.
    pub(crate) fn wait_for(&self, wait: Wait) -> Result<WaitResult, Stop> {
        let mut st = self.lock();
        if st.closed {
            return Err(Stop::Closed);
        }
        self.flush_viz(&mut st);
        st.pause_started = Some(Instant::now());
        let result = loop {
            if let Err(e) = self.check() {
                break Err(e);
            }
            if st.closed {
                break Err(Stop::Closed);
            }
            match wait {
                Wait::Line => {
                    if let Some(l) = st.lines.pop_front() {
                        break Ok(WaitResult::Line(l));
                    }
                }
                Wait::Click => {
                    if let Some((x, y)) = st.clicks.pop_front() {
                        break Ok(WaitResult::Click(x, y));
                    }
                }
            }
            st = self.cond.wait(st).unwrap_or_else(|e| e.into_inner());
        };
        if let Some(p) = st.pause_started.take() {
            st.paused += p.elapsed();
        }
        self.cond.notify_all();
        result
    }

    pub(crate) fn finish(&self, code: i32) {
        self.close(None, code);
    }

    pub(crate) fn finish_with_limit(&self, kind: LimitKind) {
        self.close(Some(kind), 2);
    }

    fn close(&self, limit: Option<LimitKind>, code: i32) {
        let mut st = self.lock();
        if st.closed {
            return;
        }
        self.flush_viz(&mut st);
        if let Some(kind) = limit {
            let _ = self.tx.send(SessionEvent::Limit { kind });
        }
        let _ = self.tx.send(SessionEvent::Exit { code });
        st.closed = true;
        self.cond.notify_all();
    }

    fn is_closed(&self) -> bool {
        self.lock().closed
    }
}

pub(crate) enum WaitResult {
    Line(String),
    Click(u32, u32),
}

/// Client-side handle for an active run. Cheap to clone.
#[derive(Clone)]
pub struct RunControl {
    shared: Arc<RunShared>,
}

impl RunControl {
    /// Answer the oldest pending `ask`, or queue the line for a later one.
    pub fn send_input(&self, line: impl Into<String>) {
        let mut st = self.shared.lock();
        if !st.closed {
            st.lines.push_back(line.into());
            self.shared.cond.notify_all();
        }
    }

    /// Deliver a click. Clicks with no grid or outside it are dropped with a
    /// warning on stderr.
    pub fn send_click(&self, x: u32, y: u32) {
        let mut st = self.shared.lock();
        if st.closed {
            return;
        }
        let warning = match st.grid {
            None => Some(format!("click ({x}, {y}) ignored: no grid is drawn\n")),
            Some((w, h)) if x >= w || y >= h => Some(format!("click ({x}, {y}) ignored: outside the {w}x{h} grid\n")),
            Some(_) => None,
        };
        match warning {
            Some(data) => {
                let _ = self.shared.tx.send(SessionEvent::Stderr { data });
            }
            None => {
                st.clicks.push_back((x, y));
                self.shared.cond.notify_all();
            }
        }
    }

    /// Stop the run; it ends with `limit(killed)` and `exit(2)` shortly after.
    pub fn kill(&self) {
        self.shared.cancel(LimitKind::Killed);
    }

    pub fn is_finished(&self) -> bool {
        self.shared.is_closed()
    }
}

/// Receiving end of a run plus its control handle.
pub struct RunHandle {
    pub events: mpsc::UnboundedReceiver<SessionEvent>,
    pub control: RunControl,
}

impl RunHandle {
    /// Drain all events, blocking the current thread. Must not be called
    /// from inside an async runtime.
    pub fn collect_blocking(mut self) -> Vec<SessionEvent> {
        let mut out = Vec::new();
        while let Some(e) = self.events.blocking_recv() {
            let done = e.is_exit();
            out.push(e);
            if done {
                break;
            }
        }
        out
    }
}

/// Start a run on its own worker thread.
pub fn spawn_run(files: Vec<SourceFile>, mode: RunMode, entry: Option<String>, limits: ResourceLimits) -> RunHandle {
    let (tx, rx) = mpsc::unbounded_channel();
    let shared = Arc::new(RunShared {
        state: Mutex::new(RunState {
            closed: false,
            output_bytes: 0,
            lines: VecDeque::new(),
            clicks: VecDeque::new(),
            grid: None,
            pending_viz: Vec::new(),
            started: Instant::now(),
            paused: Duration::ZERO,
            pause_started: None,
        }),
        cond: Condvar::new(),
        cancel: AtomicU8::new(0),
        tx,
        limits,
    });

    let worker = shared.clone();
    thread::Builder::new()
        .name("kb-run".into())
        .spawn(move || {
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                interp::run(&worker, &files, mode, entry.as_deref())
            }));
            if outcome.is_err() {
                let _ = worker.emit(SessionEvent::Stderr {
                    data: "internal error: the run crashed\n".into(),
                });
                worker.finish(1);
            }
        })
        .expect("spawn run worker");

    let watched = shared.clone();
    thread::Builder::new()
        .name("kb-watchdog".into())
        .spawn(move || watchdog(&watched))
        .expect("spawn run watchdog");

    RunHandle {
        events: rx,
        control: RunControl { shared },
    }
}

fn watchdog(shared: &RunShared) {
    let wall = Duration::from_millis(shared.limits.wall_ms);
    let mut st = shared.lock();
    let reason = loop {
        if st.closed {
            return;
        }
        if let Some(kind) = shared.poll() {
            break kind;
        }
        let used = st.running_time(Instant::now());
        if used >= wall {
            shared.cancel(LimitKind::Wall);
            continue;
        }
        // while paused the budget does not move; poll again later
        let timeout = if st.pause_started.is_some() {
            Duration::from_millis(250)
        } else {
            (wall - used).min(Duration::from_secs(3600))
        };
        st = shared
            .cond
            .wait_timeout(st, timeout)
            .unwrap_or_else(|e| e.into_inner())
            .0;
    };
    let deadline = Instant::now() + GRACE;
    while !st.closed {
        let now = Instant::now();
        if now >= deadline {
            drop(st);
            shared.finish_with_limit(reason);
            return;
        }
        st = shared
            .cond
            .wait_timeout(st, deadline - now)
            .unwrap_or_else(|e| e.into_inner())
            .0;
    }
}
