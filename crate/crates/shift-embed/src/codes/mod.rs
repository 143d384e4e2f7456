//! Sliding block codes: application, composition, recoding, images, preimages and
//! injectivity decisions.

mod block_map;
mod lift;
mod pair_graph;
mod recode;

pub use block_map::{BlockMap, BlockMapDoc, WindowDoc};
pub use lift::{lift_orbit, lift_word};
pub use pair_graph::{check_finite_to_one, check_injective, CollisionWitness, InjectivityReport, PairGraph};
pub use recode::{image, preimage_sft, recode_one_block};
pub(crate) use recode::require_one_block;

#[cfg(test)]
pub(crate) mod tests {
    pub use crate::instances::{even_labeling, ti_channel};
}
