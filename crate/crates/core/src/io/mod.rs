pub mod edgelist;
pub mod export;
pub mod gml;
pub mod svg;

pub use edgelist::{parse_edge_list, read_edge_list, write_edge_list};
pub use gml::{parse_gml, read_gml, GmlGraph};
