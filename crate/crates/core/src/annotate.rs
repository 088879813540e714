//! Annotation sessions: queueing samples to annotators, collecting up to three
//! ranked selections per sample, and appending finished annotations to disk.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{jsonl, Annotation, MethodSample, Selection, MAX_SELECTIONS};
use crate::java_stmt::{extract, MethodCode, StatementCategory};

pub const DEFAULT_SESSION_LIMIT: Duration = Duration::from_secs(90 * 60);

pub trait Clock: Send + Sync {
    fn now(&self) -> SystemTime;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> SystemTime {
        SystemTime::now()
    }
}

/// Clock that only moves when told to.
pub struct ManualClock(Mutex<SystemTime>);

impl ManualClock {
    pub fn new(start: SystemTime) -> Self {
        Self(Mutex::new(start))
    }

    pub fn advance(&self, by: Duration) {
        *self.0.lock().unwrap() += by;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> SystemTime {
        *self.0.lock().unwrap()
    }
}

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("no session `{0}`")]
    SessionNotFound(String),
    #[error("session has expired")]
    SessionExpired,
    #[error("no samples left for this annotator")]
    QueueEmpty,
    #[error("no sample is in progress; fetch the current sample first")]
    NoCurrentSample,
    #[error("sample `{0}` is not the current sample")]
    NotCurrent(String),
    #[error("sample `{0}` is already complete")]
    AlreadyComplete(String),
    #[error("statement {0} is already selected")]
    DuplicateSelection(usize),
    #[error("statement index {index} out of range ({count} statements)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("a rationale is required for the first selection")]
    RationaleRequired,
    #[error("annotation log {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid double-annotation quota {0}")]
    InvalidQuota(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub session_limit_secs: u64,
    pub seed: u64,
    /// Share of samples meant to receive a second annotator.
    pub double_quota: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            session_limit_secs: DEFAULT_SESSION_LIMIT.as_secs(),
            seed: 0,
            double_quota: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Highlight {
    Red,
    Blue,
}

impl Highlight {
    pub fn for_order(order: u8) -> Option<Self> {
        match order {
            1 => Some(Self::Red),
            2 => Some(Self::Blue),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelView {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementView {
    pub index: usize,
    pub text: String,
    pub line_start: usize,
    pub line_end: usize,
    pub category: StatementCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionView {
    pub order: u8,
    pub statement_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlight: Option<Highlight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleView {
    pub session_id: String,
    pub sample_id: String,
    pub label: LabelView,
    pub code: String,
    pub statements: Vec<StatementView>,
    pub selections: Vec<SelectionView>,
    pub finalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub session_id: String,
    pub annotator_id: String,
    pub completed: usize,
    pub remaining: usize,
    pub seconds_left: u64,
    pub expired: bool,
}

struct Item {
    sample: MethodSample,
    method: MethodCode,
}

struct InProgress {
    sample_id: String,
    selections: Vec<Selection>,
}

struct Session {
    id: String,
    annotator_id: String,
    queue: Vec<String>,
    current: Option<InProgress>,
    finished: HashSet<String>,
    deadline: SystemTime,
    expired: bool,
}

/// Who has seen what, shared across sessions.
#[derive(Default)]
struct Allocation {
    annotated: HashMap<String, usize>,
    claimed: HashMap<String, usize>,
    served: HashMap<String, HashSet<String>>,
}

impl Allocation {
    fn eligible(&self, annotator: &str, sample: &str, capacity: usize) -> bool {
        let taken = self.annotated.get(sample).copied().unwrap_or(0)
            + self.claimed.get(sample).copied().unwrap_or(0);
        taken < capacity
            && !self
                .served
                .get(annotator)
                .is_some_and(|s| s.contains(sample))
    }

    fn release(&mut self, sample: &str) {
        if let Some(n) = self.claimed.get_mut(sample) {
            *n = n.saturating_sub(1);
        }
    }
}

struct AnnotationLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl AnnotationLog {
    fn append(&self, a: &Annotation) -> Result<(), AnnotateError> {
        let line = jsonl::to_line(a);
        let mut f = self.file.lock().unwrap();
        f.write_all(line.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|source| AnnotateError::Io {
                path: self.path.clone(),
                source,
            })
    }
}

pub struct AnnotationService {
    items: Vec<Item>,
    by_id: HashMap<String, usize>,
    doubles: HashSet<String>,
    config: ServiceConfig,
    clock: Arc<dyn Clock>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    allocation: Mutex<Allocation>,
    log: AnnotationLog,
    skipped: Vec<String>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

impl AnnotationService {
    /// Builds the service over `samples`, resuming from any annotations already in `log_path`.
    ///
    /// Samples whose code cannot be segmented are left out and listed by `skipped`.
    pub fn new(
        samples: Vec<MethodSample>,
        log_path: impl AsRef<Path>,
        config: ServiceConfig,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, AnnotateError> {
        if !(0.0..=1.0).contains(&config.double_quota) {
            return Err(AnnotateError::InvalidQuota(config.double_quota));
        }
        let log_path = log_path.as_ref().to_path_buf();
        let io_err = |source| AnnotateError::Io {
            path: log_path.clone(),
            source,
        };

        let mut items = Vec::new();
        let mut skipped = Vec::new();
        for s in samples {
            match extract(&s.id, &s.code) {
                Ok(method) => items.push(Item { sample: s, method }),
                Err(_) => skipped.push(s.id),
            }
        }
        let by_id: HashMap<String, usize> = items
            .iter()
            .enumerate()
            .map(|(i, it)| (it.sample.id.clone(), i))
            .collect();

        let mut order: Vec<&str> = items.iter().map(|it| it.sample.id.as_str()).collect();
        order.sort_unstable();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
        let n_doubles = (config.double_quota * order.len() as f64).round() as usize;
        let doubles = order[..n_doubles].iter().map(|s| s.to_string()).collect();

        let mut allocation = Allocation::default();
        if log_path.exists() {
            let previous: Vec<Annotation> =
                jsonl::read(&log_path).map_err(|e| AnnotateError::Io {
                    path: log_path.clone(),
                    source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
                })?;
            for a in previous {
                *allocation.annotated.entry(a.sample_id.clone()).or_default() += 1;
                allocation
                    .served
                    .entry(a.annotator_id)
                    .or_default()
                    .insert(a.sample_id);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(io_err)?;

        Ok(Self {
            items,
            by_id,
            doubles,
            config,
            clock,
            sessions: Mutex::new(HashMap::new()),
            allocation: Mutex::new(allocation),
            log: AnnotationLog {
                path: log_path,
                file: Mutex::new(file),
            },
            skipped,
        })
    }

    pub fn skipped(&self) -> &[String] {
        &self.skipped
    }

    fn capacity(&self, sample_id: &str) -> usize {
        if self.doubles.contains(sample_id) {
            2
        } else {
            1
        }
    }

    pub fn start_session(&self, annotator_id: &str) -> String {
        let mut queue: Vec<String> = self.items.iter().map(|it| it.sample.id.clone()).collect();
        queue.sort_unstable();
        let seed = self.config.seed ^ fnv1a(annotator_id.as_bytes());
        queue.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

        let id = uuid::Uuid::new_v4().to_string();
        let session = Session {
            id: id.clone(),
            annotator_id: annotator_id.to_string(),
            queue,
            current: None,
            finished: HashSet::new(),
            deadline: self.clock.now() + Duration::from_secs(self.config.session_limit_secs),
            expired: false,
        };
        self.sessions
            .lock()
            .unwrap()
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, AnnotateError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| AnnotateError::SessionNotFound(id.to_string()))
    }

    /// Expires the session if its deadline passed, abandoning any in-progress sample.
    fn check_deadline(&self, s: &mut Session) -> Result<(), AnnotateError> {
        if !s.expired && self.clock.now() >= s.deadline {
            s.expired = true;
            if let Some(cur) = s.current.take() {
                self.allocation.lock().unwrap().release(&cur.sample_id);
            }
        }
        if s.expired {
            Err(AnnotateError::SessionExpired)
        } else {
            Ok(())
        }
    }

    fn view(
        &self,
        s: &Session,
        sample_id: &str,
        selections: &[Selection],
        finalized: bool,
    ) -> SampleView {
        let item = &self.items[self.by_id[sample_id]];
        SampleView {
            session_id: s.id.clone(),
            sample_id: sample_id.to_string(),
            label: LabelView {
                name: item.sample.label.name().to_string(),
                description: item.sample.label.description().to_string(),
            },
            code: item.sample.code.clone(),
            statements: item
                .method
                .statements
                .iter()
                .map(|st| StatementView {
                    index: st.index,
                    text: st.text.clone(),
                    line_start: st.line_start,
                    line_end: st.line_end,
                    category: st.category,
                })
                .collect(),
            selections: selections
                .iter()
                .map(|sel| SelectionView {
                    order: sel.order,
                    statement_index: sel.statement_index,
                    rationale: sel.rationale.clone(),
                    highlight: Highlight::for_order(sel.order),
                })
                .collect(),
            finalized,
        }
    }

    /// The sample in progress, claiming the next eligible queued sample if none is.
    pub fn current(&self, session_id: &str) -> Result<SampleView, AnnotateError> {
        let handle = self.session(session_id)?;
        let mut s = handle.lock().unwrap();
        self.check_deadline(&mut s)?;
        if s.current.is_none() {
            let mut alloc = self.allocation.lock().unwrap();
            let next = s
                .queue
                .iter()
                .find(|id| alloc.eligible(&s.annotator_id, id, self.capacity(id)))
                .cloned()
                .ok_or(AnnotateError::QueueEmpty)?;
            *alloc.claimed.entry(next.clone()).or_default() += 1;
            alloc
                .served
                .entry(s.annotator_id.clone())
                .or_default()
                .insert(next.clone());
            s.current = Some(InProgress {
                sample_id: next,
                selections: Vec::new(),
            });
        }
        let cur = s.current.as_ref().expect("just set");
        Ok(self.view(&s, &cur.sample_id, &cur.selections, false))
    }

    fn current_for<'a>(
        s: &'a mut Session,
        sample_id: &str,
    ) -> Result<&'a mut InProgress, AnnotateError> {
        if s.finished.contains(sample_id) {
            return Err(AnnotateError::AlreadyComplete(sample_id.to_string()));
        }
        match s.current.as_mut() {
            Some(cur) if cur.sample_id == sample_id => Ok(cur),
            Some(_) => Err(AnnotateError::NotCurrent(sample_id.to_string())),
            None => Err(AnnotateError::NoCurrentSample),
        }
    }

    fn finalize(&self, s: &mut Session, none_relevant: bool) -> Result<SampleView, AnnotateError> {
        let cur = s.current.take().expect("caller checked current");
        let annotation = Annotation {
            sample_id: cur.sample_id.clone(),
            annotator_id: s.annotator_id.clone(),
            none_relevant,
            selections: cur.selections.clone(),
        };
        {
            let mut alloc = self.allocation.lock().unwrap();
            if let Err(e) = self.log.append(&annotation) {
                s.current = Some(cur);
                return Err(e);
            }
            alloc.release(&cur.sample_id);
            *alloc.annotated.entry(cur.sample_id.clone()).or_default() += 1;
        }
        s.finished.insert(cur.sample_id.clone());
        Ok(self.view(s, &cur.sample_id, &cur.selections, true))
    }

    /// Records the next-ranked selection; the third one completes the sample.
    pub fn select(
        &self,
        session_id: &str,
        sample_id: &str,
        statement_index: usize,
        rationale: Option<String>,
    ) -> Result<SampleView, AnnotateError> {
        let handle = self.session(session_id)?;
        let mut s = handle.lock().unwrap();
        self.check_deadline(&mut s)?;
        let count = self.items[*self
            .by_id
            .get(sample_id)
            .ok_or_else(|| AnnotateError::NotCurrent(sample_id.to_string()))?]
        .method
        .statements
        .len();
        let cur = Self::current_for(&mut s, sample_id)?;
        if statement_index >= count {
            return Err(AnnotateError::IndexOutOfRange {
                index: statement_index,
                count,
            });
        }
        if cur
            .selections
            .iter()
            .any(|x| x.statement_index == statement_index)
        {
            return Err(AnnotateError::DuplicateSelection(statement_index));
        }
        let rationale = rationale
            .map(|r| r.trim().to_string())
            .filter(|r| !r.is_empty());
        if cur.selections.is_empty() && rationale.is_none() {
            return Err(AnnotateError::RationaleRequired);
        }
        cur.selections.push(Selection {
            order: cur.selections.len() as u8 + 1,
            statement_index,
            rationale,
        });
        if cur.selections.len() == MAX_SELECTIONS {
            return self.finalize(&mut s, false);
        }
        let cur = s.current.as_ref().expect("still current");
        Ok(self.view(&s, &cur.sample_id, &cur.selections, false))
    }

    /// Ends the current sample early. Without confirmation nothing changes.
    pub fn none_relevant(
        &self,
        session_id: &str,
        sample_id: &str,
        confirmed: bool,
    ) -> Result<SampleView, AnnotateError> {
        let handle = self.session(session_id)?;
        let mut s = handle.lock().unwrap();
        self.check_deadline(&mut s)?;
        let cur = Self::current_for(&mut s, sample_id)?;
        if !confirmed {
            let selections = cur.selections.clone();
            return Ok(self.view(&s, sample_id, &selections, false));
        }
        let none = cur.selections.is_empty();
        self.finalize(&mut s, none)
    }

    /// Id of the sample in progress, without claiming a new one.
    pub fn in_progress(&self, session_id: &str) -> Result<Option<String>, AnnotateError> {
        let handle = self.session(session_id)?;
        let mut s = handle.lock().unwrap();
        self.check_deadline(&mut s)?;
        Ok(s.current.as_ref().map(|c| c.sample_id.clone()))
    }

    pub fn progress(&self, session_id: &str) -> Result<Progress, AnnotateError> {
        let handle = self.session(session_id)?;
        let mut s = handle.lock().unwrap();
        let expired = self.check_deadline(&mut s).is_err();
        let alloc = self.allocation.lock().unwrap();
        let remaining = s
            .queue
            .iter()
            .filter(|id| alloc.eligible(&s.annotator_id, id, self.capacity(id)))
            .count()
            + usize::from(s.current.is_some());
        let seconds_left = s
            .deadline
            .duration_since(self.clock.now())
            .unwrap_or_default()
            .as_secs();
        Ok(Progress {
            session_id: s.id.clone(),
            annotator_id: s.annotator_id.clone(),
            completed: s.finished.len(),
            remaining,
            seconds_left,
            expired,
        })
    }
}

/// Seconds since the epoch, for reports.
pub fn unix_seconds(t: SystemTime) -> u64 {
    t.duration_since(UNIX_EPOCH).unwrap_or_default().as_secs()
}
