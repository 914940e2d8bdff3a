//! Versioned binary container for indexed hierarchies, plus a text dump.
//!
//! Layout (little endian):
//!
//! ```text
//! "SWSH" | version: u32 | n_leaves: u64 | n_edges: u64
//! leaf areas:  n_leaves × u64
//! tree edges in merge order: n_edges × (tree index: u64, a: u64, b: u64, weight: f64)
//! altitudes in merge order:  n_edges × f64
//! provenance: u32 byte length, UTF-8 bytes
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::graph::Edge;
use super::hierarchy::IndexedHierarchy;
use super::mst::Mst;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SWSH";
pub const FORMAT_VERSION: u32 = 1;

pub fn hierarchy_to_bytes(h: &IndexedHierarchy) -> Vec<u8> {
    let n = h.n_leaves();
    let m = h.merges().len();
    let mut out = Vec::with_capacity(32 + 8 * n + 40 * m + h.provenance().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    for &a in h.leaf_areas() {
        out.extend_from_slice(&a.to_le_bytes());
    }
    for merge in h.merges() {
        let e = h.mst().edges()[merge.edge];
        out.extend_from_slice(&(merge.edge as u64).to_le_bytes());
        out.extend_from_slice(&(e.a as u64).to_le_bytes());
        out.extend_from_slice(&(e.b as u64).to_le_bytes());
        out.extend_from_slice(&e.weight.to_le_bytes());
    }
    for merge in h.merges() {
        out.extend_from_slice(&merge.altitude.to_le_bytes());
    }
    out.extend_from_slice(&(h.provenance().len() as u32).to_le_bytes());
    out.extend_from_slice(h.provenance().as_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.buf.len())
            .ok_or_else(|| Error::Format("hierarchy file is truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("count overflows usize".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn hierarchy_from_bytes(buf: &[u8]) -> Result<IndexedHierarchy> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("not a hierarchy file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported hierarchy format version {version}"
        )));
    }
    let n = r.usize()?;
    let m = r.usize()?;
    if n == 0 || m + 1 != n || buf.len() < 24 + 8 * n + 40 * m + 4 {
        return Err(Error::Format(format!(
            "inconsistent sizes: {n} leaves, {m} edges"
        )));
    }
    let areas = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    let mut slots: Vec<Option<Edge>> = vec![None; m];
    let mut merge_edges = Vec::with_capacity(m);
    for _ in 0..m {
        let idx = r.usize()?;
        let (a, b, w) = (r.usize()?, r.usize()?, r.f64()?);
        let slot = slots
            .get_mut(idx)
            .filter(|s| s.is_none())
            .ok_or_else(|| Error::Format(format!("bad tree edge index {idx}")))?;
        *slot = Some(Edge::new(a, b, w));
        merge_edges.push(idx);
    }
    let altitudes = (0..m).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let len = r.u32()? as usize;
    let provenance = std::str::from_utf8(r.take(len)?)
        .map_err(|_| Error::Format("provenance is not UTF-8".into()))?
        .to_string();
    if r.pos != buf.len() {
        return Err(Error::Format("trailing bytes after hierarchy".into()));
    }

    let edges: Vec<Edge> = slots.into_iter().map(|e| e.unwrap()).collect();
    let mst = Mst::from_tree(n, edges).map_err(|e| Error::Format(e.to_string()))?;
    let mut h = IndexedHierarchy::build(mst, areas)?;
    let consistent = h
        .merges()
        .iter()
        .zip(merge_edges.iter().zip(&altitudes))
        .all(|(mg, (&e, &alt))| mg.edge == e && mg.altitude.to_bits() == alt.to_bits());
    if !consistent {
        return Err(Error::Format(
            "stored merge order or altitudes disagree with the tree".into(),
        ));
    }
    h.set_provenance(provenance);
    Ok(h)
}

pub fn save_hierarchy(h: &IndexedHierarchy, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, hierarchy_to_bytes(h)).map_err(|e| Error::io(path, e))
}

pub fn load_hierarchy(path: impl AsRef<Path>) -> Result<IndexedHierarchy> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    hierarchy_from_bytes(&bytes)
}

/// Human-readable dump: one line per internal node.
pub fn hierarchy_to_text(h: &IndexedHierarchy) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# hierarchy {}", h.provenance());
    let _ = writeln!(s, "leaves {}", h.n_leaves());
    let _ = writeln!(s, "# node left right edge a b altitude area");
    for (k, m) in h.merges().iter().enumerate() {
        let e = h.mst().edges()[m.edge];
        let node = h.n_leaves() + k;
        let _ = writeln!(
            s,
            "{node} {} {} {} {} {} {:e} {}",
            m.left,
            m.right,
            m.edge,
            e.a,
            e.b,
            m.altitude,
            h.area(node)
        );
    }
    s
}
