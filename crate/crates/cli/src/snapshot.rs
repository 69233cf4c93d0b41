//! Binary snapshot archive for field trajectories.
//!
//! ```text
//! bytes 0..8    magic "MAXSNAP\0"
//! bytes 8..12   format version, u32 little-endian
//! bytes 12..16  header length L, u32 little-endian
//! bytes 16..16+L  UTF-8 JSON header (see `Header`)
//! rest          f64 little-endian values
//! ```
//!
//! Values are stored field by field in header order, then node by node,
//! then component x, y, z, each component in index order `(i*ny + j)*nz + k`
//! over its own extents.

use std::path::Path;

use majorant_core::field::extents;
use majorant_core::{FieldKind, FieldTrajectory, GridSpec, SolveOutput, StaggeredField};
use serde::{Deserialize, Serialize};

use crate::config::GridBlock;
use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 8] = b"MAXSNAP\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub grid: GridBlock,
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
    pub fields: Vec<FieldEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    /// One of `E`, `E_t`, `H`, `H_t`.
    pub name: String,
    /// `edge` or `face`.
    pub kind: String,
    pub nodes: usize,
    /// Per-component array extents.
    pub extents: [[usize; 3]; 3],
}

const LAYOUT: &str = "field-major, then node, then component x,y,z; index (i*ny+j)*nz+k per component";

fn kind_key(kind: FieldKind) -> &'static str {
    match kind {
        FieldKind::Edge => "edge",
        FieldKind::Face => "face",
    }
}

fn named(out: &SolveOutput<f64>) -> Vec<(&'static str, &FieldTrajectory<f64>)> {
    let mut v = vec![("E", &out.e)];
    for (name, t) in [("E_t", &out.e_t), ("H", &out.h), ("H_t", &out.h_t)] {
        if let Some(t) = t {
            v.push((name, t));
        }
    }
    v
}

pub fn encode(out: &SolveOutput<f64>) -> Vec<u8> {
    let g = *out.grid();
    let cells = g.cells();
    let fields = named(out);
    let header = Header {
        grid: GridBlock { nx: g.nx, ny: g.ny, nz: g.nz, lx: g.lx, ly: g.ly, lz: g.lz, nt: g.nt, t_final: g.t_final },
        dtype: "f64".into(),
        byte_order: "little".into(),
        layout: LAYOUT.into(),
        fields: fields
            .iter()
            .map(|(name, t)| FieldEntry {
                name: (*name).into(),
                kind: kind_key(t.kind()).into(),
                nodes: t.len(),
                extents: [0, 1, 2].map(|c| extents(t.kind(), c, cells)),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut bytes = Vec::with_capacity(16 + json.len() + 8 * fields.iter().map(|(_, t)| t.len() * t.first().len()).sum::<usize>());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(json.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&json);
    for (_, t) in &fields {
        for s in t.samples() {
            for v in s.values() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    bytes
}

pub fn decode(bytes: &[u8]) -> Result<SolveOutput<f64>, String> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err("not a snapshot archive (bad magic)".into());
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let version = word(8);
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let hlen = word(12) as usize;
    let body = bytes.get(16..16 + hlen).ok_or("truncated header")?;
    let header: Header = serde_json::from_slice(body).map_err(|e| format!("header: {e}"))?;
    if header.dtype != "f64" || header.byte_order != "little" {
        return Err("only little-endian f64 data is supported".into());
    }
    let g = header.grid;
    let grid = GridSpec::new(g.nx, g.ny, g.nz, g.lx, g.ly, g.lz, g.nt, g.t_final).map_err(|e| e.to_string())?;
    let cells = grid.cells();
    let mut data = bytes[16 + hlen..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    if !(bytes.len() - 16 - hlen).is_multiple_of(8) {
        return Err("data length is not a multiple of 8".into());
    }
    let mut out: [Option<FieldTrajectory<f64>>; 4] = Default::default();
    for entry in &header.fields {
        let (slot, kind) = match entry.name.as_str() {
            "E" => (0, FieldKind::Edge),
            "E_t" => (1, FieldKind::Edge),
            "H" => (2, FieldKind::Face),
            "H_t" => (3, FieldKind::Face),
            other => return Err(format!("unknown field `{other}`")),
        };
        if entry.kind != kind_key(kind) {
            return Err(format!("field {} must be of kind {}", entry.name, kind_key(kind)));
        }
        if entry.nodes != grid.nt {
            return Err(format!("field {} has {} nodes, grid has {}", entry.name, entry.nodes, grid.nt));
        }
        let want = [0, 1, 2].map(|c| extents(kind, c, cells));
        if entry.extents != want {
            return Err(format!("field {} extents disagree with the grid", entry.name));
        }
        let mut samples = Vec::with_capacity(entry.nodes);
        for _ in 0..entry.nodes {
            let comps = want.map(|e| data.by_ref().take(e[0] * e[1] * e[2]).collect::<Vec<_>>());
            let field = StaggeredField::from_components(kind, cells, comps).map_err(|_| "truncated data".to_string())?;
            samples.push(field);
        }
        if out[slot].is_some() {
            return Err(format!("duplicate field {}", entry.name));
        }
        out[slot] = Some(FieldTrajectory::new(grid, samples).map_err(|e| e.to_string())?);
    }
    if data.next().is_some() {
        return Err("trailing data after the last field".into());
    }
    let [e, e_t, h, h_t] = out;
    let e = e.ok_or("archive has no E field")?;
    let snap = SolveOutput { e, e_t, h, h_t, energy: None };
    snap.validate().map_err(|e| e.to_string())?;
    Ok(snap)
}

pub fn write(path: &Path, out: &SolveOutput<f64>) -> CliResult<()> {
    std::fs::write(path, encode(out)).map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> CliResult<SolveOutput<f64>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Snapshot { path: path.into(), msg: e.to_string() })?;
    decode(&bytes).map_err(|msg| CliError::Snapshot { path: path.into(), msg })
}
