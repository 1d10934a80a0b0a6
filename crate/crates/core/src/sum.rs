//! Pairwise summation with a fixed tree shape.
//!
//! Values are combined as in a binary counter: two partial sums are merged
//! whenever they cover blocks of the same size, and the leftover blocks are
//! folded right to left by [`PairwiseSum::finish`]. The tree depends only on
//! the number of inputs, so any chunking aligned to a power of two reproduces
//! the serial result bit for bit.

#[derive(Debug, Default)]
pub(crate) struct PairwiseSum {
    stack: Vec<(u32, f64)>,
}

impl PairwiseSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, value: f64) {
        self.push_block(0, value);
    }

    /// Pushes the sum of a complete block of `2^level` inputs.
    pub(crate) fn push_block(&mut self, level: u32, value: f64) {
        let mut level = level;
        let mut value = value;
        while let Some(&(top_level, top)) = self.stack.last() {
            if top_level != level {
                break;
            }
            self.stack.pop();
            value += top;
            level += 1;
        }
        self.stack.push((level, value));
    }

    pub(crate) fn finish(mut self) -> f64 {
        let Some((_, mut acc)) = self.stack.pop() else {
            return 0.0;
        };
        while let Some((_, left)) = self.stack.pop() {
            acc += left;
        }
        acc
    }
}

pub(crate) fn pairwise_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = PairwiseSum::new();
    for v in values {
        acc.add(v);
    }
    acc.finish()
}
