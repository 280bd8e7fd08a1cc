//! Exact eavesdropper observations and rank-based leakage.
//!
//! For a linear scheme with uniform independent messages and keys,
//! `I(M; Obs) = rank([A | B]) - rank(B)` where `A` holds the observation's
//! message coefficients and `B` its key coefficients. All quantities are in
//! symbols (units of `log p`).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{FieldMatrix, FieldModulus};
use crate::system::{RepairSymbolId, StoredSymbol, System};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EavesdropperSpec {
    /// Type I nodes: stored content is observed.
    pub e1: BTreeSet<usize>,
    /// Type II nodes: every inbound repair symbol is observed.
    pub e2: BTreeSet<usize>,
}

impl EavesdropperSpec {
    pub fn new(e1: impl IntoIterator<Item = usize>, e2: impl IntoIterator<Item = usize>) -> Self {
        EavesdropperSpec {
            e1: e1.into_iter().collect(),
            e2: e2.into_iter().collect(),
        }
    }

    /// Whether the set sizes match the system's `(l1, l2)`.
    pub fn is_compliant(&self, system: &System) -> bool {
        self.e1.len() == system.params().l1 && self.e2.len() == system.params().l2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RowSource {
    Stored(StoredSymbol),
    Repair {
        id: RepairSymbolId,
        /// The repair group the helper belongs to for this download.
        group: Vec<usize>,
    },
    Message { level: usize, index: usize },
    Key { column: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ColumnKind {
    Message,
    Key,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnTag {
    pub level: usize,
    pub kind: ColumnKind,
}

/// A set of linear functionals over `[message columns | key columns]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationSystem {
    modulus: FieldModulus,
    column_tags: Vec<ColumnTag>,
    rows: Vec<Vec<u32>>,
    sources: Vec<RowSource>,
}

impl ObservationSystem {
    /// An observation with no rows over the columns of `system`.
    pub fn empty(system: &System) -> Self {
        let cols = system.columns();
        let mut column_tags = vec![
            ColumnTag {
                level: 0,
                kind: ColumnKind::Message,
            };
            cols.total()
        ];
        for (&j, code) in system.codes() {
            let m0 = cols.message_offsets[&j];
            for t in &mut column_tags[m0..m0 + code.message_len()] {
                t.level = j;
            }
            let k0 = cols.key_offsets[&j];
            for t in &mut column_tags[k0..k0 + code.key_count() * code.stripes()] {
                *t = ColumnTag {
                    level: j,
                    kind: ColumnKind::Key,
                };
            }
        }
        ObservationSystem {
            modulus: system.modulus(),
            column_tags,
            rows: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn push(&mut self, source: RowSource, row: Vec<u32>) {
        debug_assert_eq!(row.len(), self.column_tags.len());
        self.rows.push(row);
        self.sources.push(source);
    }

    /// Adds every symbol stored at `node`.
    pub fn push_stored(&mut self, system: &System, node: usize) {
        for (id, row) in system.stored_rows(node) {
            self.push(RowSource::Stored(id), row);
        }
    }

    /// Adds every symbol `target` can download: one batch per repair group
    /// not containing `target`, one row set per helper of that group.
    pub fn push_inbound(&mut self, system: &System, target: usize) {
        let others: Vec<usize> = (1..=system.n()).filter(|&i| i != target).collect();
        for group in combinations(&others, system.d()) {
            for &helper in &group {
                for (id, row) in system.repair_rows(helper, target) {
                    self.push(
                        RowSource::Repair {
                            id,
                            group: group.clone(),
                        },
                        row,
                    );
                }
            }
        }
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn sources(&self) -> &[RowSource] {
        &self.sources
    }

    pub fn column_tags(&self) -> &[ColumnTag] {
        &self.column_tags
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.column_tags.len()
    }

    pub fn matrix(&self) -> FieldMatrix {
        self.restricted(|_| true, |_| true)
    }

    fn restricted(&self, row_ok: impl Fn(usize) -> bool, col_ok: impl Fn(&ColumnTag) -> bool) -> FieldMatrix {
        let cols: Vec<usize> = (0..self.column_tags.len())
            .filter(|&c| col_ok(&self.column_tags[c]))
            .collect();
        let rows: Vec<usize> = (0..self.rows.len()).filter(|&r| row_ok(r)).collect();
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in &rows {
            entries.extend(cols.iter().map(|&c| self.rows[r][c]));
        }
        FieldMatrix::from_entries(rows.len(), cols.len(), entries, self.modulus)
            .expect("rows are built from reduced coefficients")
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }

    /// Same rows, with every key column relabelled as a message column. The
    /// observation then trivially leaks; used as a negative control.
    pub fn reclassify_keys_as_messages(&self) -> Self {
        let mut out = self.clone();
        for t in &mut out.column_tags {
            t.kind = ColumnKind::Message;
        }
        out
    }

    pub fn leakage(&self) -> LeakageReport {
        let h_obs = self.rank();
        let h_given = self.restricted(|_| true, |t| t.kind == ColumnKind::Key).rank();
        LeakageReport::new(h_obs, h_given)
    }

    /// Leakage about level `level` alone, computed on that level's columns
    /// and the rows supported on them.
    pub fn level_leakage(&self, level: usize) -> LeakageReport {
        let on_level: Vec<bool> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.column_tags)
                    .any(|(&v, t)| v != 0 && t.level == level)
            })
            .collect();
        let all = self.restricted(|r| on_level[r], |t| t.level == level).rank();
        let keys = self
            .restricted(|r| on_level[r], |t| t.level == level && t.kind == ColumnKind::Key)
            .rank();
        LeakageReport::new(all, keys)
    }

    /// Levels present among the columns, ascending.
    pub fn levels(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.column_tags.iter().map(|t| t.level).collect();
        set.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Secure,
    Insecure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeakageReport {
    pub leakage_rank: usize,
    pub h_obs: usize,
    pub h_obs_given_messages: usize,
    pub verdict: Verdict,
}

impl LeakageReport {
    fn new(h_obs: usize, h_obs_given_messages: usize) -> Self {
        let leakage_rank = h_obs - h_obs_given_messages;
        LeakageReport {
            leakage_rank,
            h_obs,
            h_obs_given_messages,
            verdict: if leakage_rank == 0 {
                Verdict::Secure
            } else {
                Verdict::Insecure
            },
        }
    }
}

/// Stored rows of every `E1` node and all inbound repair rows of every `E2` node.
pub fn observation_of(system: &System, spec: &EavesdropperSpec) -> Result<ObservationSystem> {
    let n = system.n();
    for &node in spec.e1.iter().chain(&spec.e2) {
        if node == 0 || node > n {
            return Err(Error::NodeOutOfRange { node, n });
        }
    }
    if let Some(&node) = spec.e1.intersection(&spec.e2).next() {
        return Err(Error::OverlappingSets(node));
    }
    let mut obs = ObservationSystem::empty(system);
    for &i in &spec.e1 {
        obs.push_stored(system, i);
    }
    for &i in &spec.e2 {
        obs.push_inbound(system, i);
    }
    Ok(obs)
}

pub fn leakage(obs: &ObservationSystem) -> LeakageReport {
    obs.leakage()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub spec: EavesdropperSpec,
    pub report: LeakageReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditSummary {
    pub e1_size: usize,
    pub e2_size: usize,
    /// True when the sizes match the system's `(l1, l2)`.
    pub compliant: bool,
    pub entries: Vec<AuditEntry>,
    pub verdict: Verdict,
}

impl AuditSummary {
    pub fn is_secure(&self) -> bool {
        self.verdict == Verdict::Secure
    }

    pub fn max_leakage(&self) -> usize {
        self.entries.iter().map(|e| e.report.leakage_rank).max().unwrap_or(0)
    }
}

/// Every disjoint `(E1, E2)` with `|E1| = l1`, `|E2| = l2`.
pub fn audit_all(system: &System) -> Result<AuditSummary> {
    audit_with_sizes(system, system.params().l1, system.params().l2)
}

/// Every disjoint `(E1, E2)` with the given sizes. Sizes other than the
/// system's `(l1, l2)` are reported with `compliant = false`.
pub fn audit_with_sizes(system: &System, e1_size: usize, e2_size: usize) -> Result<AuditSummary> {
    let nodes: Vec<usize> = (1..=system.n()).collect();
    if e1_size + e2_size > nodes.len() {
        return Err(Error::BadParameters(format!(
            "cannot pick {e1_size} + {e2_size} disjoint nodes out of {}",
            nodes.len()
        )));
    }
    let mut specs = Vec::new();
    for e1 in combinations(&nodes, e1_size) {
        let rest: Vec<usize> = nodes.iter().copied().filter(|i| !e1.contains(i)).collect();
        for e2 in combinations(&rest, e2_size) {
            specs.push(EavesdropperSpec::new(e1.clone(), e2));
        }
    }
    let reports = evaluate_parallel(system, &specs)?;
    let entries: Vec<AuditEntry> = specs
        .into_iter()
        .zip(reports)
        .map(|(spec, report)| AuditEntry { spec, report })
        .collect();
    let secure = entries.iter().all(|e| e.report.verdict == Verdict::Secure);
    Ok(AuditSummary {
        e1_size,
        e2_size,
        compliant: e1_size == system.params().l1 && e2_size == system.params().l2,
        entries,
        verdict: if secure {
            Verdict::Secure
        } else {
            Verdict::Insecure
        },
    })
}

/// All splits `(a, l - a)` of the system's total `l`.
pub fn audit_all_splits(system: &System) -> Result<Vec<AuditSummary>> {
    let l = system.l();
    (0..=l).map(|a| audit_with_sizes(system, a, l - a)).collect()
}

fn evaluate_parallel(system: &System, specs: &[EavesdropperSpec]) -> Result<Vec<LeakageReport>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(specs.len().max(1));
    let chunk = specs.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|s| observation_of(system, s).map(|o| o.leakage()))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(specs.len());
        for h in handles {
            out.extend(h.join().expect("audit worker panicked")?);
        }
        Ok(out)
    })
}

/// Rank of what `node` stores and rank of what it can download. Equal for
/// this construction, which is why type I and type II observations coincide.
pub fn type_ranks(system: &System, node: usize) -> Result<(usize, usize)> {
    let stored = observation_of(system, &EavesdropperSpec::new([node], []))?;
    let inbound = observation_of(system, &EavesdropperSpec::new([], [node]))?;
    Ok((stored.rank(), inbound.rank()))
}

pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}
