//! Interaction event streams: validation, CSV ingestion and count aggregation.
//!
//! Files use 1-based node ids with a `time,sender,receiver` header. Internally
//! nodes are 0-based. Undirected streams store every event with
//! `sender < receiver`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};

/// A single interaction `(t, i, j)` with 0-based node indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub sender: usize,
    pub receiver: usize,
}

/// Optional metadata pinned by a JSON sidecar or by the caller.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamMeta {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default, rename = "T")]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub directed: Option<bool>,
}

impl StreamMeta {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Observed events on `[0, T)` among `n` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStream {
    n: usize,
    horizon: f64,
    directed: bool,
    events: Vec<Event>,
}

impl EventStream {
    /// Validates and canonicalizes `events`. Events are stably sorted by time.
    pub fn new(n: usize, horizon: f64, directed: bool, mut events: Vec<Event>) -> Result<Self> {
        if n < 2 {
            return Err(PpsbmError::InvalidStream(format!("need at least 2 nodes, got {n}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(PpsbmError::InvalidStream(format!("horizon must be positive, got {horizon}")));
        }
        for (idx, ev) in events.iter_mut().enumerate() {
            if ev.sender >= n || ev.receiver >= n {
                return Err(PpsbmError::InvalidStream(format!(
                    "event {idx} references node outside 0..{n}"
                )));
            }
            if ev.sender == ev.receiver {
                return Err(PpsbmError::SelfLoop { line: idx + 1, node: ev.sender + 1 });
            }
            if !(ev.time >= 0.0 && ev.time < horizon) {
                return Err(PpsbmError::TimeOutOfRange { line: idx + 1, time: ev.time, horizon });
            }
            if !directed && ev.sender > ev.receiver {
                std::mem::swap(&mut ev.sender, &mut ev.receiver);
            }
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        Ok(Self { n, horizon, directed, events })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Number of dyads `r`: `n(n-1)` when directed, `n(n-1)/2` otherwise.
    pub fn num_dyads(&self) -> usize {
        num_dyads(self.n, self.directed)
    }

    /// Dense index of dyad `(i, j)`. Undirected dyads must satisfy `i < j`.
    pub fn dyad_index(&self, i: usize, j: usize) -> usize {
        dyad_index(self.n, self.directed, i, j)
    }

    /// All dyads in index order.
    pub fn dyads(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        dyads(self.n, self.directed)
    }

    /// Total event count `N_ij(T)` per dyad, indexed by [`Self::dyad_index`].
    pub fn dyad_totals(&self) -> Vec<u32> {
        let mut totals = vec![0u32; self.num_dyads()];
        for ev in &self.events {
            totals[self.dyad_index(ev.sender, ev.receiver)] += 1;
        }
        totals
    }

    /// Dyadic cell of `time` at `depth`; cells are half-open `[a, b)`.
    pub fn cell_of(&self, time: f64, depth: u32) -> usize {
        cell_index(time, self.horizon, depth)
    }

    /// Per-dyad event counts on the `2^depth` regular cells of `[0, T)`.
    pub fn aggregate_counts(&self, depth: u32) -> AggregatedCounts {
        assert!(depth <= 30, "aggregation depth {depth} exceeds 30");
        let mut counts = BTreeMap::new();
        for ev in &self.events {
            let dyad = self.dyad_index(ev.sender, ev.receiver);
            let cell = self.cell_of(ev.time, depth);
            *counts.entry((dyad, cell)).or_insert(0u64) += 1;
        }
        AggregatedCounts { depth, num_dyads: self.num_dyads(), counts }
    }

    /// Serializes to the `time,sender,receiver` format with 1-based ids.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,sender,receiver\n");
        for ev in &self.events {
            out.push_str(&format!("{},{},{}\n", ev.time, ev.sender + 1, ev.receiver + 1));
        }
        out
    }

    pub fn meta(&self) -> StreamMeta {
        StreamMeta { n: Some(self.n), horizon: Some(self.horizon), directed: Some(self.directed) }
    }
}

pub fn num_dyads(n: usize, directed: bool) -> usize {
    if directed {
        n * (n - 1)
    } else {
        n * (n - 1) / 2
    }
}

pub fn dyad_index(n: usize, directed: bool, i: usize, j: usize) -> usize {
    if directed {
        i * (n - 1) + if j < i { j } else { j - 1 }
    } else {
        debug_assert!(i < j);
        // rows 0..i contribute (n-1) + (n-2) + ... + (n-i) entries
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }
}

pub fn dyads(n: usize, directed: bool) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| {
        let start = if directed { 0 } else { i + 1 };
        (start..n).filter(move |&j| j != i).map(move |j| (i, j))
    })
}

pub fn cell_index(time: f64, horizon: f64, depth: u32) -> usize {
    let cells = 1usize << depth;
    let idx = (time / horizon * cells as f64).floor();
    if idx <= 0.0 {
        0
    } else {
        (idx as usize).min(cells - 1)
    }
}

/// Sparse per-dyad, per-cell event counts.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedCounts {
    pub depth: u32,
    pub num_dyads: usize,
    counts: BTreeMap<(usize, usize), u64>,
}

impl AggregatedCounts {
    pub fn cells(&self) -> usize {
        1 << self.depth
    }

    pub fn get(&self, dyad: usize, cell: usize) -> u64 {
        self.counts.get(&(dyad, cell)).copied().unwrap_or(0)
    }

    /// Dense count vector over cells for one dyad.
    pub fn dyad_vector(&self, dyad: usize) -> Vec<u64> {
        let mut out = vec![0; self.cells()];
        for (&(_, cell), &c) in self.counts.range((dyad, 0)..(dyad + 1, 0)) {
            out[cell] = c;
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Nonzero entries as `((dyad, cell), count)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }
}

/// Parses the event CSV format.
///
/// `n` and `T` are taken from `meta` when given; otherwise `n` is the largest
/// node id and `T` is the smallest float strictly above the largest time, so
/// that every event lies in the half-open window.
pub fn parse_event_csv(text: &str, directed: bool, meta: StreamMeta) -> Result<EventStream> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(PpsbmError::EmptyInput)?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns != ["time", "sender", "receiver"] {
        return Err(PpsbmError::MalformedRow {
            line: 1,
            message: format!("expected header `time,sender,receiver`, found `{header}`"),
        });
    }

    let mut raw = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(PpsbmError::MalformedRow {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let time: f64 = fields[0].parse().map_err(|_| PpsbmError::MalformedRow {
            line: line_no,
            message: format!("invalid time `{}`", fields[0]),
        })?;
        if !(time >= 0.0 && time.is_finite()) {
            return Err(PpsbmError::MalformedRow {
                line: line_no,
                message: format!("time must be a finite value >= 0, got {time}"),
            });
        }
        let node = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(PpsbmError::MalformedRow {
                    line: line_no,
                    message: format!("invalid node id `{s}` (expected positive integer)"),
                }),
            }
        };
        let sender = node(fields[1])?;
        let receiver = node(fields[2])?;
        if sender == receiver {
            return Err(PpsbmError::SelfLoop { line: line_no, node: sender });
        }
        if let Some(horizon) = meta.horizon {
            if time >= horizon {
                return Err(PpsbmError::TimeOutOfRange { line: line_no, time, horizon });
            }
        }
        raw.push((line_no, time, sender, receiver));
    }
    if raw.is_empty() {
        return Err(PpsbmError::EmptyInput);
    }

    let max_id = raw.iter().map(|r| r.2.max(r.3)).max().unwrap_or(0);
    let n = match meta.n {
        Some(n) if n < max_id => {
            return Err(PpsbmError::InvalidStream(format!(
                "node id {max_id} exceeds declared node count {n}"
            )))
        }
        Some(n) => n,
        None => max_id,
    };
    let horizon = meta.horizon.unwrap_or_else(|| {
        let max_time = raw.iter().map(|r| r.1).fold(0.0f64, f64::max);
        if max_time > 0.0 {
            max_time.next_up()
        } else {
            1.0
        }
    });
    let events = raw
        .into_iter()
        .map(|(_, time, s, r)| Event { time, sender: s - 1, receiver: r - 1 })
        .collect();
    EventStream::new(n, horizon, directed, events)
}
