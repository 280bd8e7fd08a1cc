//! On-disk formats: JSON config, binary share files and raw message files.
//!
//! Share file layout:
//!
//! ```text
//! "MDCS" | 0x01 | header length (u32 LE) | JSON header | payload
//! ```
//!
//! The header is `{node_id, params, stripe_plan, level_offsets}`; the payload
//! is `α` symbols as u16 LE, level-major, then stripe-major, then position.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::FieldModulus;
use crate::system::{NodeShare, System, SystemParams};

pub const MAGIC: &[u8; 4] = b"MDCS";
pub const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: usize,
    pub d: usize,
    pub l1: usize,
    pub l2: usize,
    #[serde(default)]
    pub p: FieldModulus,
    #[serde(default)]
    pub files: BTreeMap<usize, usize>,
    #[serde(default)]
    pub seed: u64,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            n: self.n,
            d: self.d,
            l1: self.l1,
            l2: self.l2,
            p: self.p,
            file_sizes: self.files.clone(),
        }
    }

    pub fn system(&self) -> Result<System> {
        System::new(self.params())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareHeader {
    pub node_id: usize,
    pub params: SystemParams,
    pub stripe_plan: BTreeMap<usize, usize>,
    pub level_offsets: BTreeMap<usize, usize>,
}

pub fn share_file_name(node: usize) -> String {
    format!("node_{node}.mdcs")
}

pub fn share_path(dir: &Path, node: usize) -> PathBuf {
    dir.join(share_file_name(node))
}

pub fn encode_share_file(system: &System, share: &NodeShare) -> Result<Vec<u8>> {
    let header = ShareHeader {
        node_id: share.node_id,
        params: system.params().clone(),
        stripe_plan: system.stripe_plan().clone(),
        level_offsets: system.level_offsets(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::ShareFormat(e.to_string()))?;
    let symbols = share.symbols();
    if symbols.len() != system.alpha() {
        return Err(Error::LengthMismatch {
            level: None,
            expected: system.alpha(),
            actual: symbols.len(),
        });
    }
    let mut out = Vec::with_capacity(9 + json.len() + 2 * symbols.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&symbols_to_le_bytes(&symbols));
    Ok(out)
}

/// Parses a share file and rebuilds the system it belongs to.
pub fn decode_share_file(bytes: &[u8]) -> Result<(System, NodeShare)> {
    let bad = |m: &str| Error::ShareFormat(m.to_string());
    if bytes.len() < 9 || &bytes[..4] != MAGIC {
        return Err(bad("missing MDCS magic"));
    }
    if bytes[4] != VERSION {
        return Err(Error::ShareFormat(format!("unsupported version {}", bytes[4])));
    }
    let hlen = u32::from_le_bytes(bytes[5..9].try_into().expect("4 bytes")) as usize;
    let body = &bytes[9..];
    if body.len() < hlen {
        return Err(bad("truncated header"));
    }
    let header: ShareHeader =
        serde_json::from_slice(&body[..hlen]).map_err(|e| Error::ShareFormat(format!("header: {e}")))?;
    let system = System::new(header.params.clone())?;
    if &header.stripe_plan != system.stripe_plan() || header.level_offsets != system.level_offsets() {
        return Err(bad("stripe plan or level offsets disagree with params"));
    }
    let payload = &body[hlen..];
    if payload.len() != 2 * system.alpha() {
        return Err(Error::ShareFormat(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            2 * system.alpha()
        )));
    }
    let symbols = symbols_from_le_bytes(payload, system.modulus())?;
    let mut segments = BTreeMap::new();
    for (&j, &off) in &system.level_offsets() {
        let len = system.codes()[&j].node_size();
        segments.insert(j, symbols[off..off + len].to_vec());
    }
    Ok((
        system,
        NodeShare {
            node_id: header.node_id,
            segments,
        },
    ))
}

pub fn symbols_to_le_bytes(symbols: &[u32]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|&s| (s as u16).to_le_bytes())
        .collect()
}

/// Reads 2-byte LE symbols; values `>= p` are rejected rather than reduced.
pub fn symbols_from_le_bytes(bytes: &[u8], p: FieldModulus) -> Result<Vec<u32>> {
    if !bytes.len().is_multiple_of(2) {
        return Err(Error::ShareFormat(format!(
            "odd byte count {}; symbols are 2 bytes each",
            bytes.len()
        )));
    }
    bytes
        .chunks_exact(2)
        .map(|c| p.check(u16::from_le_bytes([c[0], c[1]]) as u32))
        .collect()
}
