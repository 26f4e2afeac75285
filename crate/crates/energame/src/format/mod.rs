//! Text formats for graphs: a line-oriented edge list for humans and graph6
//! for corpora.

pub mod edge_list;
pub mod graph6;

pub use edge_list::{parse_edge_list, write_edge_list};
pub use graph6::{encode_graph6, parse_graph6};
