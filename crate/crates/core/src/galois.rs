//! Prime-field arithmetic and dense linear algebra over GF(p).
//!
//! Elements are plain `u32` values in `[0, p)`. Every reduction is eager, and
//! elimination always picks the first nonzero entry of a column as its pivot,
//! so echelon forms are reproducible bit for bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulus used when a configuration does not name one.
pub const DEFAULT_MODULUS: u32 = 257;

/// A prime `p` with `2 < p < 2^16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldModulus(u32);

impl FieldModulus {
    pub fn new(p: u32) -> Result<Self> {
        if p <= 2 || p >= 1 << 16 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldModulus(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn reduce(self, x: u64) -> u32 {
        (x % self.0 as u64) as u32
    }

    pub fn check(self, a: u32) -> Result<u32> {
        if a < self.0 {
            Ok(a)
        } else {
            Err(Error::UnreducedElement {
                value: a,
                modulus: self.0,
            })
        }
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.0) {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.0 as i64, (a % self.0) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(t0.rem_euclid(self.0 as i64) as u32)
    }
}

impl TryFrom<u32> for FieldModulus {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        FieldModulus::new(p)
    }
}

impl From<FieldModulus> for u32 {
    fn from(p: FieldModulus) -> u32 {
        p.0
    }
}

impl Default for FieldModulus {
    fn default() -> Self {
        FieldModulus(DEFAULT_MODULUS)
    }
}

impl fmt::Display for FieldModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u32;
    while q * q <= p {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

pub fn field_add(a: u32, b: u32, p: FieldModulus) -> u32 {
    p.add(a, b)
}

pub fn field_inv(a: u32, p: FieldModulus) -> Result<u32> {
    p.inv(a)
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
    modulus: FieldModulus,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: FieldModulus) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
            modulus,
        }
    }

    pub fn identity(size: usize, modulus: FieldModulus) -> Self {
        let mut m = Self::zeros(size, size, modulus);
        for i in 0..size {
            m.entries[i * size + i] = 1;
        }
        m
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<u32>,
        modulus: FieldModulus,
    ) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for &e in &entries {
            modulus.check(e)?;
        }
        Ok(FieldMatrix {
            rows,
            cols,
            entries,
            modulus,
        })
    }

    /// Builds a matrix from explicit rows. An empty row list gives a 0x`cols`
    /// matrix only through [`FieldMatrix::zeros`]; here it yields 0x0.
    pub fn from_rows(rows: &[Vec<u32>], modulus: FieldModulus) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_entries(rows.len(), cols, rows.concat(), modulus)
    }

    /// Row `i` is `(1, x_i, x_i^2, ..., x_i^(width-1))`.
    pub fn vandermonde(points: &[u32], width: usize, modulus: FieldModulus) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DimensionMismatch("no evaluation points".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &x in points {
            modulus.check(x)?;
            if x == 0 {
                return Err(Error::ZeroPoint);
            }
            if !seen.insert(x) {
                return Err(Error::DuplicatePoint(x));
            }
        }
        let mut m = Self::zeros(points.len(), width, modulus);
        for (i, &x) in points.iter().enumerate() {
            let mut acc = 1;
            for c in 0..width {
                m.entries[i * width + c] = acc;
                acc = modulus.mul(acc, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.cols + c] = self.modulus.reduce(v as u64);
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.modulus;
        let mut out = Self::zeros(self.rows, other.cols, p);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.entries[idx] = p.add(out.entries[idx], p.mul(a, other.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    /// Keeps the listed rows, in the listed order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            entries.extend_from_slice(self.row(r));
        }
        FieldMatrix {
            rows: rows.len(),
            cols: self.cols,
            entries,
            modulus: self.modulus,
        }
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            let row = self.row(r);
            entries.extend(cols.iter().map(|&c| row[c]));
        }
        FieldMatrix {
            rows: self.rows,
            cols: cols.len(),
            entries,
            modulus: self.modulus,
        }
    }

    pub fn vstack(&self, other: &FieldMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns on {}",
                other.cols, self.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(FieldMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
            modulus: self.modulus,
        })
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let p = self.modulus;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(piv) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(piv, lead);
            let inv = p.inv(m.get(lead, c)).expect("pivot is nonzero");
            m.scale_row(lead, inv);
            for r in 0..m.rows {
                if r != lead {
                    let f = m.get(r, c);
                    if f != 0 {
                        m.sub_scaled_row(r, lead, f);
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        // Forward elimination only; no back-substitution needed for rank.
        let p = self.modulus;
        let mut m = self.clone();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(piv) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(piv, lead);
            let inv = p.inv(m.get(lead, c)).expect("pivot is nonzero");
            m.scale_row(lead, inv);
            for r in lead + 1..m.rows {
                let f = m.get(r, c);
                if f != 0 {
                    m.sub_scaled_row(r, lead, f);
                }
            }
            lead += 1;
        }
        lead
    }

    /// Solves `self * x = rhs` for square invertible `self`.
    pub fn solve(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve needs a square system with matching right-hand side, got {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, n + rhs.cols, self.modulus);
        for r in 0..n {
            aug.entries[r * (n + rhs.cols)..r * (n + rhs.cols) + n].copy_from_slice(self.row(r));
            aug.entries[r * (n + rhs.cols) + n..(r + 1) * (n + rhs.cols)]
                .copy_from_slice(rhs.row(r));
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        let cols: Vec<usize> = (n..n + rhs.cols).collect();
        Ok(red.select_cols(&cols))
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        self.solve(&Self::identity(self.rows, self.modulus))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: u32) {
        let p = self.modulus;
        for v in &mut self.entries[r * self.cols..(r + 1) * self.cols] {
            *v = p.mul(*v, f);
        }
    }

    /// row[target] -= f * row[source]
    fn sub_scaled_row(&mut self, target: usize, source: usize, f: u32) {
        let p = self.modulus;
        for c in 0..self.cols {
            let s = self.entries[source * self.cols + c];
            if s != 0 {
                let t = &mut self.entries[target * self.cols + c];
                *t = p.sub(*t, p.mul(f, s));
            }
        }
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}
