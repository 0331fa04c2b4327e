//! Relative growth rates, Perron-Frobenius data of relative train track maps,
//! and Lipschitz displacement for automorphisms of free products
//! `G₁ ∗ … ∗ G_k ∗ F_r` with finite factors.

pub mod document;
pub mod dynamics;
pub mod error;
pub mod free_product;
pub mod graph_map;
pub mod graph_of_groups;
pub mod legality;
pub mod library;

pub use error::{Diagnostic, Error, Result, Severity};

#[cfg(test)]
pub(crate) mod testing;
