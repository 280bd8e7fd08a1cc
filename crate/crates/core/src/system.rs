//! Separate coding across levels: one secure MBR code per level `j`, with
//! each node storing the concatenation of its per-level rows.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{level_capacity, mbr_point, NormalizedRates, TradeoffPoint};
use crate::error::{Error, Result};
use crate::galois::FieldModulus;
use crate::mbr_code::{LevelCode, NodeVector, RepairSymbol};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n: usize,
    pub d: usize,
    pub l1: usize,
    pub l2: usize,
    pub p: FieldModulus,
    /// File size `B_j` in symbols, keyed by level. Missing levels are empty.
    pub file_sizes: BTreeMap<usize, usize>,
}

impl SystemParams {
    pub fn l(&self) -> usize {
        self.l1 + self.l2
    }

    /// Levels that may carry data, `l+1..=d`.
    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.l() + 1..=self.d
    }
}

/// Stored content of one node: one segment per nonempty level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeShare {
    pub node_id: usize,
    pub segments: BTreeMap<usize, Vec<u32>>,
}

impl NodeShare {
    /// All symbols, level-major.
    pub fn symbols(&self) -> Vec<u32> {
        self.segments.values().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.segments.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn segment(&self, level: usize) -> NodeVector {
        NodeVector {
            node_id: self.node_id,
            symbols: self.segments.get(&level).cloned().unwrap_or_default(),
        }
    }
}

/// Everything one helper sends to one newcomer: `β` symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairPacketBundle {
    pub helper: usize,
    pub target: usize,
    pub packets: BTreeMap<usize, Vec<RepairSymbol>>,
}

impl RepairPacketBundle {
    pub fn len(&self) -> usize {
        self.packets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Where each level's message and key symbols sit among the columns of a
/// linear observation: all message columns first (level, stripe, cell), then
/// all key columns in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnLayout {
    pub message_offsets: BTreeMap<usize, usize>,
    pub key_offsets: BTreeMap<usize, usize>,
    pub message_columns: usize,
    pub key_columns: usize,
}

impl ColumnLayout {
    pub fn total(&self) -> usize {
        self.message_columns + self.key_columns
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    params: SystemParams,
    codes: BTreeMap<usize, LevelCode>,
    stripe_plan: BTreeMap<usize, usize>,
    columns: ColumnLayout,
}

impl System {
    pub fn new(params: SystemParams) -> Result<Self> {
        let SystemParams { n, d, .. } = params;
        let l = params.l();
        if l >= d {
            return Err(Error::BadParameters(format!("violates l1 + l2 < d (l={l}, d={d})")));
        }
        if d >= n {
            return Err(Error::BadParameters(format!("violates d < n (d={d}, n={n})")));
        }
        if n + 1 > params.p.get() as usize {
            return Err(Error::BadParameters(format!(
                "violates p >= n + 1 (n={n}, p={})",
                params.p.get()
            )));
        }
        if let Some(&j) = params.file_sizes.keys().find(|j| !params.levels().contains(j)) {
            if params.file_sizes[&j] > 0 {
                return Err(Error::BadParameters(format!(
                    "level {j} outside {}..={d} cannot carry data",
                    l + 1
                )));
            }
        }
        let mut codes = BTreeMap::new();
        let mut stripe_plan = BTreeMap::new();
        for j in params.levels() {
            let size = params.file_sizes.get(&j).copied().unwrap_or(0);
            let capacity = level_capacity(d, j, l)?;
            if size % capacity != 0 {
                return Err(Error::IndivisibleFileSize {
                    level: j,
                    size,
                    capacity,
                });
            }
            let stripes = size / capacity;
            stripe_plan.insert(j, stripes);
            if stripes > 0 {
                codes.insert(j, LevelCode::new(n, j, d, l, params.p, stripes)?);
            }
        }
        let columns = Self::layout_columns(&codes);
        Ok(System {
            params,
            codes,
            stripe_plan,
            columns,
        })
    }

    fn layout_columns(codes: &BTreeMap<usize, LevelCode>) -> ColumnLayout {
        let mut message_offsets = BTreeMap::new();
        let mut key_offsets = BTreeMap::new();
        let mut m = 0;
        for (&j, c) in codes {
            message_offsets.insert(j, m);
            m += c.message_len();
        }
        let mut k = m;
        for (&j, c) in codes {
            key_offsets.insert(j, k);
            k += c.key_count() * c.stripes();
        }
        ColumnLayout {
            message_offsets,
            key_offsets,
            message_columns: m,
            key_columns: k - m,
        }
    }

    /// A copy in which node `node` has an all-zero evaluation row at every
    /// level. Only meaningful as a negative control for symmetry checks.
    pub fn with_zeroed_evaluation(&self, node: usize) -> Result<Self> {
        let mut out = self.clone();
        for code in out.codes.values_mut() {
            *code = code.with_zeroed_evaluation(node)?;
        }
        Ok(out)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn l(&self) -> usize {
        self.params.l()
    }

    pub fn modulus(&self) -> FieldModulus {
        self.params.p
    }

    /// Stripe count per level in `l+1..=d`, zero for empty levels.
    pub fn stripe_plan(&self) -> &BTreeMap<usize, usize> {
        &self.stripe_plan
    }

    pub fn codes(&self) -> &BTreeMap<usize, LevelCode> {
        &self.codes
    }

    pub fn code(&self, level: usize) -> Option<&LevelCode> {
        self.codes.get(&level)
    }

    pub fn columns(&self) -> &ColumnLayout {
        &self.columns
    }

    pub fn file_size(&self, level: usize) -> usize {
        self.codes.get(&level).map_or(0, LevelCode::message_len)
    }

    pub fn total_file_size(&self) -> usize {
        self.codes.values().map(LevelCode::message_len).sum()
    }

    /// Repair bandwidth per helper, in symbols.
    pub fn beta(&self) -> usize {
        self.stripe_plan.values().sum()
    }

    /// Storage per node, in symbols.
    pub fn alpha(&self) -> usize {
        self.params.d * self.beta()
    }

    /// Symbol offset of each nonempty level inside a node share.
    pub fn level_offsets(&self) -> BTreeMap<usize, usize> {
        let mut off = 0;
        self.codes
            .iter()
            .map(|(&j, c)| {
                let o = off;
                off += c.node_size();
                (j, o)
            })
            .collect()
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node == 0 || node > self.params.n {
            return Err(Error::NodeOutOfRange {
                node,
                n: self.params.n,
            });
        }
        Ok(())
    }

    /// Key stream for one level: ChaCha8 seeded with `seed`, stream number `level`.
    pub fn level_rng(seed: u64, level: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(level as u64);
        rng
    }

    pub fn encode(&self, messages: &BTreeMap<usize, Vec<u32>>, seed: u64) -> Result<Vec<NodeShare>> {
        for (&j, m) in messages {
            if !self.codes.contains_key(&j) && !m.is_empty() {
                return Err(Error::LengthMismatch {
                    level: Some(j),
                    expected: 0,
                    actual: m.len(),
                });
            }
        }
        let mut shares: Vec<NodeShare> = (1..=self.params.n)
            .map(|i| NodeShare {
                node_id: i,
                segments: BTreeMap::new(),
            })
            .collect();
        for (&j, code) in &self.codes {
            let msg = messages.get(&j).ok_or(Error::LengthMismatch {
                level: Some(j),
                expected: code.message_len(),
                actual: 0,
            })?;
            if msg.len() != code.message_len() {
                return Err(Error::LengthMismatch {
                    level: Some(j),
                    expected: code.message_len(),
                    actual: msg.len(),
                });
            }
            let keys = code.draw_keys_from(&mut Self::level_rng(seed, j));
            for v in code.encode_with_keys(msg, &keys)? {
                shares[v.node_id - 1].segments.insert(j, v.symbols);
            }
        }
        Ok(shares)
    }

    fn check_share(&self, share: &NodeShare) -> Result<()> {
        self.check_node(share.node_id)?;
        for (&j, code) in &self.codes {
            let len = share.segments.get(&j).map_or(0, Vec::len);
            if len != code.node_size() {
                return Err(Error::LengthMismatch {
                    level: Some(j),
                    expected: code.node_size(),
                    actual: len,
                });
            }
        }
        Ok(())
    }

    /// Recovers level `level` from any `level` distinct shares.
    pub fn recover_file(&self, level: usize, shares: &[NodeShare]) -> Result<Vec<u32>> {
        if !self.params.levels().contains(&level) {
            return Err(Error::UnknownLevel(level));
        }
        let ids: BTreeSet<usize> = shares.iter().map(|s| s.node_id).collect();
        if ids.len() != level || shares.len() != level {
            return Err(Error::WrongShareCount {
                expected: level,
                actual: ids.len(),
            });
        }
        for s in shares {
            self.check_share(s)?;
        }
        match self.codes.get(&level) {
            None => Ok(Vec::new()),
            Some(code) => {
                let segs: Vec<NodeVector> = shares.iter().map(|s| s.segment(level)).collect();
                code.collect(&segs)
            }
        }
    }

    /// What `helper` sends to rebuild `target`.
    pub fn helper_bundle(&self, helper: &NodeShare, target: usize) -> Result<RepairPacketBundle> {
        self.check_share(helper)?;
        self.check_node(target)?;
        let mut packets = BTreeMap::new();
        for (&j, code) in &self.codes {
            packets.insert(j, code.repair_symbols(&helper.segment(j), target)?);
        }
        Ok(RepairPacketBundle {
            helper: helper.node_id,
            target,
            packets,
        })
    }

    /// Rebuilds `target` from bundles sent by `d` distinct helpers.
    pub fn regenerate(&self, bundles: &[RepairPacketBundle], target: usize) -> Result<NodeShare> {
        self.check_node(target)?;
        let helpers: BTreeSet<usize> = bundles.iter().map(|b| b.helper).collect();
        if helpers.len() != self.params.d || bundles.len() != self.params.d {
            return Err(Error::WrongHelperCount {
                expected: self.params.d,
                actual: helpers.len(),
            });
        }
        let mut segments = BTreeMap::new();
        for (&j, code) in &self.codes {
            let packets: Vec<RepairSymbol> = bundles
                .iter()
                .flat_map(|b| b.packets.get(&j).cloned().unwrap_or_default())
                .collect();
            segments.insert(j, code.regenerate(&packets, target)?.symbols);
        }
        Ok(NodeShare {
            node_id: target,
            segments,
        })
    }

    /// Repairs `target` from the given helper shares (exactly `d`, distinct,
    /// none equal to the target).
    pub fn repair_node(&self, target: usize, helpers: &[NodeShare]) -> Result<NodeShare> {
        self.check_node(target)?;
        let ids: BTreeSet<usize> = helpers.iter().map(|s| s.node_id).collect();
        if ids.len() != self.params.d || helpers.len() != self.params.d {
            return Err(Error::WrongHelperCount {
                expected: self.params.d,
                actual: ids.len(),
            });
        }
        if ids.contains(&target) {
            return Err(Error::SelfRepair(target));
        }
        let bundles = helpers
            .iter()
            .map(|h| self.helper_bundle(h, target))
            .collect::<Result<Vec<_>>>()?;
        self.regenerate(&bundles, target)
    }

    /// The default repair group: the `d` lowest-indexed survivors.
    pub fn default_helpers(&self, target: usize, available: &[usize]) -> Result<Vec<usize>> {
        let mut ids: Vec<usize> = available.iter().copied().filter(|&i| i != target).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() < self.params.d {
            return Err(Error::WrongHelperCount {
                expected: self.params.d,
                actual: ids.len(),
            });
        }
        ids.truncate(self.params.d);
        Ok(ids)
    }

    pub fn normalized_rates(&self) -> Result<NormalizedRates> {
        let total = self.total_file_size();
        if total == 0 {
            return Err(Error::EmptySystem);
        }
        let rates = self
            .params
            .levels()
            .map(|j| Rational::from(self.file_size(j)) / Rational::from(total))
            .collect();
        NormalizedRates::new(self.params.d, self.params.l1, self.params.l2, rates)
    }

    /// `(α/ΣB, β/ΣB)` for this system, with its rate vector.
    pub fn achieved_point(&self) -> Result<(TradeoffPoint, NormalizedRates)> {
        let rates = self.normalized_rates()?;
        let total = Rational::from(self.total_file_size());
        let point = TradeoffPoint {
            alpha: Rational::from(self.alpha()) / total,
            beta: Rational::from(self.beta()) / total,
        };
        debug_assert_eq!(point, mbr_point(&rates));
        Ok((point, rates))
    }

    /// Global column of cell `cell` of `stripe` at `level`.
    fn cell_column(&self, level: usize, stripe: usize, cell: usize) -> usize {
        let code = &self.codes[&level];
        let kc = code.key_count();
        if cell < kc {
            self.columns.key_offsets[&level] + stripe * kc + cell
        } else {
            self.columns.message_offsets[&level] + stripe * code.message_count() + (cell - kc)
        }
    }

    fn lift(&self, level: usize, stripe: usize, local: &[u32]) -> Vec<u32> {
        let mut row = vec![0; self.columns.total()];
        for (cell, &v) in local.iter().enumerate() {
            if v != 0 {
                row[self.cell_column(level, stripe, cell)] = v;
            }
        }
        row
    }

    /// Linear functionals (over the global columns) of every symbol stored at
    /// `node`, in share order.
    pub fn stored_rows(&self, node: usize) -> Vec<(StoredSymbol, Vec<u32>)> {
        let mut out = Vec::new();
        for (&j, code) in &self.codes {
            let locals: Vec<Vec<u32>> =
                (0..code.d()).map(|pos| code.stored_functional(node, pos)).collect();
            for stripe in 0..code.stripes() {
                for (position, f) in locals.iter().enumerate() {
                    out.push((
                        StoredSymbol {
                            node,
                            level: j,
                            stripe,
                            position,
                        },
                        self.lift(j, stripe, f),
                    ));
                }
            }
        }
        out
    }

    /// Linear functionals of the `β` symbols `helper` sends to `target`.
    pub fn repair_rows(&self, helper: usize, target: usize) -> Vec<(RepairSymbolId, Vec<u32>)> {
        let mut out = Vec::new();
        for (&j, code) in &self.codes {
            let f = code.repair_functional(helper, target);
            for stripe in 0..code.stripes() {
                out.push((
                    RepairSymbolId {
                        helper,
                        target,
                        level: j,
                        stripe,
                    },
                    self.lift(j, stripe, &f),
                ));
            }
        }
        out
    }

    /// Unit rows selecting the message columns of `level` (empty if the level
    /// carries no data).
    pub fn message_rows(&self, level: usize) -> Vec<Vec<u32>> {
        let Some(code) = self.codes.get(&level) else {
            return Vec::new();
        };
        let off = self.columns.message_offsets[&level];
        (0..code.message_len())
            .map(|i| {
                let mut row = vec![0; self.columns.total()];
                row[off + i] = 1;
                row
            })
            .collect()
    }

    /// Unit rows selecting every key column.
    pub fn key_rows(&self) -> Vec<Vec<u32>> {
        (self.columns.message_columns..self.columns.total())
            .map(|c| {
                let mut row = vec![0; self.columns.total()];
                row[c] = 1;
                row
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StoredSymbol {
    pub node: usize,
    pub level: usize,
    pub stripe: usize,
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepairSymbolId {
    pub helper: usize,
    pub target: usize,
    pub level: usize,
    pub stripe: usize,
}
