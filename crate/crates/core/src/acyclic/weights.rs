use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

/// Which copy of a vertex a weight belongs to: the forest copy or the
/// marker copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    F,
    P,
}

/// Weights `w : V × {F, P} -> {1..6n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightAssignment {
    pub seed: u64,
    pub forest: Vec<u32>,
    pub marker: Vec<u32>,
}

impl WeightAssignment {
    pub fn n(&self) -> usize {
        self.forest.len()
    }

    /// Upper end of the weight range, `6n`.
    pub fn max_weight(&self) -> u32 {
        6 * self.n() as u32
    }

    #[inline]
    pub fn get(&self, v: Vertex, tag: Tag) -> u32 {
        match tag {
            Tag::F => self.forest[v as usize],
            Tag::P => self.marker[v as usize],
        }
    }
}

/// Draws `2n` independent uniform weights from `1..=6n`.
pub fn sample_weights(n: usize, seed: u64) -> WeightAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (6 * n).max(1) as u32;
    let mut draw = |_| rng.gen_range(1..=top);
    let forest = (0..n).map(&mut draw).collect();
    let marker = (0..n).map(&mut draw).collect();
    WeightAssignment { seed, forest, marker }
}
