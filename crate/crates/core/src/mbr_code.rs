//! A secure product-matrix MBR code for one level.
//!
//! Each stripe fills a symmetric `d x d` matrix `M` whose bottom-right
//! `(d-k) x (d-k)` block is zero. The remaining upper-triangle cells are
//! enumerated row by row; cells in rows `0..l` hold uniform keys and the rest
//! hold message symbols. Node `i` stores `ψ_i^T M` where `ψ_i` is the
//! Vandermonde row of evaluation point `i`, and a helper `h` repairing node
//! `i` sends the single symbol `ψ_h^T M ψ_i`.
//!
//! Keys come from ChaCha8 seeded with the caller's 64-bit seed, drawn with
//! `gen_range(0..p)` stripe by stripe in cell order.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{FieldMatrix, FieldModulus};

/// Upper-triangle cells of the message matrix that are not forced to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageMatrixLayout {
    d: usize,
    k: usize,
    cells: Vec<(usize, usize)>,
    key_count: usize,
}

impl MessageMatrixLayout {
    pub fn new(d: usize, k: usize, l: usize) -> Self {
        let mut cells = Vec::new();
        for r in 0..d {
            for c in r..d {
                if r < k || c < k {
                    cells.push((r, c));
                }
            }
        }
        let key_count = cells.iter().filter(|&&(r, _)| r < l).count();
        MessageMatrixLayout {
            d,
            k,
            cells,
            key_count,
        }
    }

    /// All free cells in row-major order; keys first.
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn key_cells(&self) -> &[(usize, usize)] {
        &self.cells[..self.key_count]
    }

    pub fn message_cells(&self) -> &[(usize, usize)] {
        &self.cells[self.key_count..]
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn message_count(&self) -> usize {
        self.cells.len() - self.key_count
    }

    /// Index of the free cell holding `M[r][c]`, if any.
    pub fn cell_index(&self, r: usize, c: usize) -> Option<usize> {
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        if r >= self.k && c >= self.k {
            return None;
        }
        // Row r contributes d - r cells while r < k.
        let before: usize = (0..r.min(self.k)).map(|t| self.d - t).sum();
        Some(before + (c - r))
    }
}

/// Stored content of one node at one level, stripe-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeVector {
    pub node_id: usize,
    pub symbols: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSymbol {
    pub helper: usize,
    pub target: usize,
    pub stripe: usize,
    pub value: u32,
}

/// One `(n, k, d, l)` secure MBR code striped `stripes` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCode {
    n: usize,
    k: usize,
    d: usize,
    l: usize,
    modulus: FieldModulus,
    stripes: usize,
    eval_points: Vec<u32>,
    psi: FieldMatrix,
    layout: MessageMatrixLayout,
}

impl LevelCode {
    pub fn new(
        n: usize,
        k: usize,
        d: usize,
        l: usize,
        modulus: FieldModulus,
        stripes: usize,
    ) -> Result<Self> {
        let p = modulus.get() as usize;
        let violated = if l >= k {
            Some(format!("l < k (l={l}, k={k})"))
        } else if k > d {
            Some(format!("k <= d (k={k}, d={d})"))
        } else if d >= n {
            Some(format!("d < n (d={d}, n={n})"))
        } else if n > p - 1 {
            Some(format!("n <= p - 1 (n={n}, p={p})"))
        } else if stripes == 0 {
            Some("stripes >= 1".to_string())
        } else {
            None
        };
        if let Some(v) = violated {
            return Err(Error::BadParameters(format!("violates {v}")));
        }
        let eval_points: Vec<u32> = (1..=n as u32).collect();
        let psi = FieldMatrix::vandermonde(&eval_points, d, modulus)?;
        Ok(LevelCode {
            n,
            k,
            d,
            l,
            modulus,
            stripes,
            eval_points,
            psi,
            layout: MessageMatrixLayout::new(d, k, l),
        })
    }

    /// A copy whose evaluation row for `node` is all zeros. The result is not
    /// a valid code; it exists to exercise the symmetry checks.
    pub fn with_zeroed_evaluation(&self, node: usize) -> Result<Self> {
        self.check_node(node)?;
        let mut out = self.clone();
        for c in 0..self.d {
            out.psi.set(node - 1, c, 0);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn stripes(&self) -> usize {
        self.stripes
    }

    pub fn eval_points(&self) -> &[u32] {
        &self.eval_points
    }

    pub fn layout(&self) -> &MessageMatrixLayout {
        &self.layout
    }

    /// Message symbols per stripe, `T(d, k, l)`.
    pub fn message_count(&self) -> usize {
        self.layout.message_count()
    }

    /// Key symbols per stripe, `T(d, k, 0) - T(d, k, l)`.
    pub fn key_count(&self) -> usize {
        self.layout.key_count()
    }

    pub fn cell_count(&self) -> usize {
        self.layout.cells.len()
    }

    /// Stored symbols per node, `α = d · stripes`.
    pub fn node_size(&self) -> usize {
        self.d * self.stripes
    }

    pub fn message_len(&self) -> usize {
        self.message_count() * self.stripes
    }

    pub fn psi_row(&self, node: usize) -> &[u32] {
        self.psi.row(node - 1)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node == 0 || node > self.n {
            return Err(Error::NodeOutOfRange { node, n: self.n });
        }
        Ok(())
    }

    /// Draws the keys for every stripe from `seed`.
    pub fn draw_keys(&self, seed: u64) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.draw_keys_from(&mut rng)
    }

    pub(crate) fn draw_keys_from(&self, rng: &mut impl Rng) -> Vec<u32> {
        let p = self.modulus.get();
        (0..self.key_count() * self.stripes)
            .map(|_| rng.gen_range(0..p))
            .collect()
    }

    pub fn encode(&self, message: &[u32], seed: u64) -> Result<Vec<NodeVector>> {
        let keys = self.draw_keys(seed);
        self.encode_with_keys(message, &keys)
    }

    /// Encodes with explicit key symbols (`key_count · stripes` of them).
    pub fn encode_with_keys(&self, message: &[u32], keys: &[u32]) -> Result<Vec<NodeVector>> {
        if message.len() != self.message_len() {
            return Err(Error::LengthMismatch {
                level: Some(self.k),
                expected: self.message_len(),
                actual: message.len(),
            });
        }
        if keys.len() != self.key_count() * self.stripes {
            return Err(Error::LengthMismatch {
                level: Some(self.k),
                expected: self.key_count() * self.stripes,
                actual: keys.len(),
            });
        }
        for &s in message.iter().chain(keys) {
            self.modulus.check(s)?;
        }
        let mut nodes: Vec<NodeVector> = (1..=self.n)
            .map(|i| NodeVector {
                node_id: i,
                symbols: Vec::with_capacity(self.node_size()),
            })
            .collect();
        let (mc, kc) = (self.message_count(), self.key_count());
        for s in 0..self.stripes {
            let mut cells = keys[s * kc..(s + 1) * kc].to_vec();
            cells.extend_from_slice(&message[s * mc..(s + 1) * mc]);
            let m = self.message_matrix(&cells);
            let stored = self.psi.mul(&m)?;
            for (i, node) in nodes.iter_mut().enumerate() {
                node.symbols.extend_from_slice(stored.row(i));
            }
        }
        Ok(nodes)
    }

    /// Symmetric matrix from free-cell values in layout order.
    pub fn message_matrix(&self, cells: &[u32]) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.d, self.d, self.modulus);
        for (&(r, c), &v) in self.layout.cells.iter().zip(cells) {
            m.set(r, c, v);
            m.set(c, r, v);
        }
        m
    }

    /// One symbol per stripe: `<helper row, ψ_target>`.
    pub fn repair_symbols(&self, helper: &NodeVector, target: usize) -> Result<Vec<RepairSymbol>> {
        self.check_node(helper.node_id)?;
        self.check_node(target)?;
        if helper.node_id == target {
            return Err(Error::SelfRepair(target));
        }
        self.check_share(helper)?;
        let p = self.modulus;
        let psi = self.psi_row(target);
        Ok(helper
            .symbols
            .chunks(self.d)
            .enumerate()
            .map(|(stripe, row)| RepairSymbol {
                helper: helper.node_id,
                target,
                stripe,
                value: row
                    .iter()
                    .zip(psi)
                    .fold(0, |acc, (&a, &b)| p.add(acc, p.mul(a, b))),
            })
            .collect())
    }

    /// Rebuilds `target` from one symbol per stripe from each of `d` helpers.
    pub fn regenerate(&self, packets: &[RepairSymbol], target: usize) -> Result<NodeVector> {
        self.check_node(target)?;
        let helpers: BTreeSet<usize> = packets.iter().map(|s| s.helper).collect();
        if helpers.len() != self.d {
            return Err(Error::WrongHelperCount {
                expected: self.d,
                actual: helpers.len(),
            });
        }
        if helpers.contains(&target) {
            return Err(Error::SelfRepair(target));
        }
        let helpers: Vec<usize> = helpers.into_iter().collect();
        let mut rhs = FieldMatrix::zeros(self.d, self.stripes, self.modulus);
        let mut seen = vec![false; self.d * self.stripes];
        for s in packets {
            self.check_node(s.helper)?;
            if s.target != target || s.stripe >= self.stripes {
                return Err(Error::BadParameters(format!(
                    "packet {}->{} stripe {} does not belong to this repair",
                    s.helper, s.target, s.stripe
                )));
            }
            let row = helpers.binary_search(&s.helper).expect("helper collected above");
            seen[row * self.stripes + s.stripe] = true;
            rhs.set(row, s.stripe, self.modulus.check(s.value)?);
        }
        if seen.iter().any(|&x| !x) || packets.len() != self.d * self.stripes {
            return Err(Error::WrongHelperCount {
                expected: self.d,
                actual: packets.len() / self.stripes.max(1),
            });
        }
        let rows: Vec<usize> = helpers.iter().map(|h| h - 1).collect();
        // Column s of the solution is M_s ψ_target, which by symmetry is the
        // stored row of the target.
        let solved = self.psi.select_rows(&rows).solve(&rhs)?;
        Ok(NodeVector {
            node_id: target,
            symbols: solved.transpose().entries().to_vec(),
        })
    }

    /// Recovers every free cell (keys then message, per stripe) from `k` shares.
    pub fn collect_cells(&self, shares: &[NodeVector]) -> Result<Vec<Vec<u32>>> {
        let ids: BTreeSet<usize> = shares.iter().map(|s| s.node_id).collect();
        if ids.len() != self.k || shares.len() != self.k {
            return Err(Error::WrongShareCount {
                expected: self.k,
                actual: ids.len(),
            });
        }
        for s in shares {
            self.check_node(s.node_id)?;
            self.check_share(s)?;
        }
        let (k, d) = (self.k, self.d);
        let rows: Vec<usize> = shares.iter().map(|s| s.node_id - 1).collect();
        let dc = self.psi.select_rows(&rows);
        let phi = dc.select_cols(&(0..k).collect::<Vec<_>>());
        let delta = dc.select_cols(&(k..d).collect::<Vec<_>>());
        let p = self.modulus;
        let mut out = Vec::with_capacity(self.stripes);
        for stripe in 0..self.stripes {
            let mut y = FieldMatrix::zeros(k, d, p);
            for (r, s) in shares.iter().enumerate() {
                for c in 0..d {
                    y.set(r, c, s.symbols[stripe * d + c]);
                }
            }
            let y_left = y.select_cols(&(0..k).collect::<Vec<_>>());
            let y_right = y.select_cols(&(k..d).collect::<Vec<_>>());
            // Ψ M = [Φ S + Δ Tᵀ | Φ T]
            let t = phi.solve(&y_right)?;
            let dt = delta.mul(&t.transpose())?;
            let mut resid = y_left.clone();
            for r in 0..k {
                for c in 0..k {
                    resid.set(r, c, p.sub(y_left.get(r, c), dt.get(r, c)));
                }
            }
            let s_block = phi.solve(&resid)?;
            let cells = self
                .layout
                .cells
                .iter()
                .map(|&(r, c)| if c < k { s_block.get(r, c) } else { t.get(r, c - k) })
                .collect();
            out.push(cells);
        }
        Ok(out)
    }

    /// Recovers the message from any `k` shares; keys are discarded.
    pub fn collect(&self, shares: &[NodeVector]) -> Result<Vec<u32>> {
        let kc = self.key_count();
        Ok(self
            .collect_cells(shares)?
            .into_iter()
            .flat_map(|cells| cells.into_iter().skip(kc))
            .collect())
    }

    fn check_share(&self, share: &NodeVector) -> Result<()> {
        if share.symbols.len() != self.node_size() {
            return Err(Error::LengthMismatch {
                level: Some(self.k),
                expected: self.node_size(),
                actual: share.symbols.len(),
            });
        }
        Ok(())
    }

    /// Coefficients of stored symbol `position` of `node` over the free cells
    /// of one stripe: `M[r][position]` contributes `ψ_node[r]`.
    pub fn stored_functional(&self, node: usize, position: usize) -> Vec<u32> {
        let psi = self.psi_row(node);
        let mut f = vec![0; self.cell_count()];
        for (r, &coef) in psi.iter().enumerate() {
            if let Some(idx) = self.layout.cell_index(r, position) {
                f[idx] = self.modulus.add(f[idx], coef);
            }
        }
        f
    }

    /// Coefficients of `ψ_helper^T M ψ_target` over the free cells of one stripe.
    pub fn repair_functional(&self, helper: usize, target: usize) -> Vec<u32> {
        let p = self.modulus;
        let (a, b) = (self.psi_row(helper), self.psi_row(target));
        let mut f = vec![0; self.cell_count()];
        for r in 0..self.d {
            for c in 0..self.d {
                if let Some(idx) = self.layout.cell_index(r, c) {
                    f[idx] = p.add(f[idx], p.mul(a[r], b[c]));
                }
            }
        }
        f
    }
}
