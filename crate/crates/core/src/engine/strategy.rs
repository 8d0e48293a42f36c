use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::spec::{Category, OperationSpec};

pub const INVALID_STRATEGY_MESSAGE: &str = "Invalid operation order strategy.
A valid strategy is composed of three characters meaning the following:
  > C: constructors (POST)
  > M: Mutators (PUT, DELETE)
  > O: Observers (GET)
  > RND (random)
A valid strategy would be, e.g., CMO";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", INVALID_STRATEGY_MESSAGE)]
pub struct InvalidStrategy {
    pub input: String,
}

/// Order in which operation categories are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderStrategy {
    Cmo,
    Com,
    Mco,
    Moc,
    Ocm,
    Omc,
    Rnd,
}

impl OrderStrategy {
    pub const ALL: [OrderStrategy; 7] = [
        OrderStrategy::Cmo,
        OrderStrategy::Com,
        OrderStrategy::Mco,
        OrderStrategy::Moc,
        OrderStrategy::Ocm,
        OrderStrategy::Omc,
        OrderStrategy::Rnd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderStrategy::Cmo => "CMO",
            OrderStrategy::Com => "COM",
            OrderStrategy::Mco => "MCO",
            OrderStrategy::Moc => "MOC",
            OrderStrategy::Ocm => "OCM",
            OrderStrategy::Omc => "OMC",
            OrderStrategy::Rnd => "RND",
        }
    }

    /// Category blocks in test order; `None` for the random strategy.
    pub fn categories(self) -> Option<[Category; 3]> {
        use Category::{Constructor as C, Mutator as M, Observer as O};
        Some(match self {
            OrderStrategy::Cmo => [C, M, O],
            OrderStrategy::Com => [C, O, M],
            OrderStrategy::Mco => [M, C, O],
            OrderStrategy::Moc => [M, O, C],
            OrderStrategy::Ocm => [O, C, M],
            OrderStrategy::Omc => [O, M, C],
            OrderStrategy::Rnd => return None,
        })
    }
}

impl FromStr for OrderStrategy {
    type Err = InvalidStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        OrderStrategy::ALL
            .into_iter()
            .find(|st| st.as_str() == upper)
            .ok_or_else(|| InvalidStrategy { input: s.to_string() })
    }
}

impl fmt::Display for OrderStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Orders `ops` by category blocks. Within a block the order is a shuffle
/// drawn from `rng`, or document order when `stable` is set. The random
/// strategy always shuffles the whole list.
pub fn reorganize<'a, R: Rng + ?Sized>(
    ops: &'a [OperationSpec],
    strategy: OrderStrategy,
    stable: bool,
    rng: &mut R,
) -> Vec<&'a OperationSpec> {
    let Some(blocks) = strategy.categories() else {
        let mut all: Vec<_> = ops.iter().collect();
        all.shuffle(rng);
        return all;
    };
    let mut out = Vec::with_capacity(ops.len());
    for category in blocks {
        let mut block: Vec<_> = ops.iter().filter(|op| op.category == category).collect();
        if !stable {
            block.shuffle(rng);
        }
        out.extend(block);
    }
    out
}
