//! Exhaustive search over every feasible vertex sequence. Used to check the
//! dynamic program on small instances.

use std::cmp::Ordering;

use super::{HopPath, MovementGraph};
use crate::error::{Error, Result};

/// Largest number of candidate sequences the oracle will enumerate.
pub const ORACLE_LIMIT: f64 = 1e7;

/// Minimum-cost `hops`-edge path from the start vertex to the terminal.
///
/// Costs are accumulated front to back like the dynamic program, and ties
/// go to the sequence that is lexicographically smallest when read from the
/// last grid vertex backwards.
pub fn brute_force_oracle(mg: &MovementGraph, hops: usize) -> Result<HopPath> {
    if hops == 0 {
        return Err(Error::InvalidGraph("hops must be >= 1".into()));
    }
    let branching = (2 * mg.d_max() + 1) as f64;
    let paths = branching.powi(hops as i32 - 1);
    if paths > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            paths,
            limit: ORACLE_LIMIT,
        });
    }

    let mut search = Search {
        mg,
        len: hops,
        current: Vec::with_capacity(hops),
        best: None,
    };
    search.current.push(mg.start_index());
    search.extend(0.0);

    let (mut vertices, total_cost) = search.best.ok_or(Error::NoFeasiblePath { hops })?;
    vertices.push(mg.terminal());
    Ok(HopPath {
        vertices,
        total_cost,
    })
}

struct Search<'a> {
    mg: &'a MovementGraph,
    /// Number of grid vertices in a complete sequence.
    len: usize,
    current: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl Search<'_> {
    fn extend(&mut self, cost_so_far: f64) {
        let last = *self.current.last().unwrap();
        let cost = cost_so_far + self.mg.weight(last);
        if self.current.len() == self.len {
            self.offer(cost);
            return;
        }
        let n = self.mg.num_grids();
        let lo = last.saturating_sub(self.mg.d_max()).max(1);
        let hi = (last + self.mg.d_max()).min(n);
        for next in lo..=hi {
            self.current.push(next);
            self.extend(cost);
            self.current.pop();
        }
    }

    fn offer(&mut self, cost: f64) {
        let better = match &self.best {
            None => true,
            Some((seq, best)) => match cost.partial_cmp(best) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => self.current.iter().rev().lt(seq.iter().rev()),
                _ => false,
            },
        };
        if better {
            self.best = Some((self.current.clone(), cost));
        }
    }
}
