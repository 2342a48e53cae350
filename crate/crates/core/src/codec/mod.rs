//! Range coding of graphs and trees under their generative models.

mod container;
mod models;
mod range;

pub use container::{fnv1a64, read_container, write_container, MAGIC};
pub use models::{
    decode_graph, decode_tree, encode_graph, encode_tree, quantize, GraphCoder, TreeCoder, TREE_DECODE_CAP,
};
pub use range::{BitString, Decoder, Encoder, FreqTable, TOTAL, TOTAL_BITS};
