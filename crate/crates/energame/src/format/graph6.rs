//! graph6 for graphs with at most 62 vertices.
//!
//! Byte 0 is `n + 63`. The strict upper triangle is packed column by column,
//! `x(0,1), x(0,2), x(1,2), x(0,3), …`, six bits per byte, most significant
//! bit first, each byte offset by 63, with the final byte zero-padded.

use energame_core::enumerate::pair_order;
use energame_core::graph::{Graph, MAX_VERTICES};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("byte {value} at position {position} is outside the printable range 63..=126")]
    BadByte { position: usize, value: u8 },
    #[error("size byte {0} encodes more than {MAX_VERTICES} vertices (multi-byte sizes are not supported)")]
    BadSize(u8),
    #[error("expected {expected} bytes for n = {n}, found {found}")]
    WrongLength { n: usize, expected: usize, found: usize },
    #[error("padding bits in the final byte are not zero")]
    NonzeroPadding,
}

fn data_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

/// Parses one graph6 line. Surrounding whitespace (including a trailing
/// newline) is ignored.
pub fn parse_graph6(line: &str) -> Result<Graph, Graph6Error> {
    let bytes = line.trim().as_bytes();
    if bytes.is_empty() {
        return Err(Graph6Error::Empty);
    }
    if let Some((position, &value)) = bytes.iter().enumerate().find(|(_, b)| !(63..=126).contains(*b)) {
        return Err(Graph6Error::BadByte { position, value });
    }
    let n = (bytes[0] - 63) as usize;
    if n > MAX_VERTICES {
        return Err(Graph6Error::BadSize(bytes[0]));
    }
    let expected = 1 + data_len(n);
    if bytes.len() != expected {
        return Err(Graph6Error::WrongLength { n, expected, found: bytes.len() });
    }
    let pairs = pair_order(n);
    let data = &bytes[1..];
    let bit = |k: usize| (data[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    if let Some(last) = data.last() {
        let used = pairs.len() - 6 * (data.len() - 1);
        let pad_mask = (1u8 << (6 - used)) - 1;
        if (last - 63) & pad_mask != 0 {
            return Err(Graph6Error::NonzeroPadding);
        }
    }
    let edges = pairs.iter().enumerate().filter(|&(k, _)| bit(k)).map(|(_, &e)| e);
    Ok(Graph::from_edges(n, edges).expect("pairs are valid"))
}

pub fn encode_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut data = vec![0u8; data_len(n)];
    for (k, (i, j)) in pair_order(n).into_iter().enumerate() {
        if g.has_edge(i, j) {
            data[k / 6] |= 1 << (5 - k % 6);
        }
    }
    let mut out = String::with_capacity(1 + data.len());
    out.push((n as u8 + 63) as char);
    out.extend(data.into_iter().map(|b| (b + 63) as char));
    out
}
