//! Reusable distributed building blocks.

pub mod bellman_ford;
pub mod broadcast;

pub use bellman_ford::{full_sssp, hhop_sssp, HopTree, TreeNode};
pub use broadcast::{all_to_all_broadcast, bfs_tree, pipelined_broadcast, BfsTree, Dissemination, Tagged};
