use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::SearchError;

/// What one top-level branch produced.
pub(crate) enum Branch<T> {
    Found { value: T, nodes: u64 },
    Exhausted { nodes: u64 },
    /// Stopped because an earlier branch already succeeded; never merged.
    Aborted,
}

/// Handle a branch uses to count nodes and notice it is no longer needed.
pub(crate) struct Ctl<'a> {
    index: usize,
    best: &'a AtomicUsize,
    cap: u64,
    pub nodes: u64,
}

impl Ctl<'_> {
    /// Counts one node; false means the branch must stop (budget reached or
    /// an earlier branch has already found something).
    #[inline]
    pub fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.cap {
            return false;
        }
        // the atomic is only consulted every 4096 nodes
        self.nodes & 0xfff != 0 || self.best.load(Ordering::Relaxed) > self.index
    }

    pub fn over_budget(&self) -> bool {
        self.nodes > self.cap
    }

    pub fn superseded(&self) -> bool {
        self.best.load(Ordering::Relaxed) < self.index
    }

    /// Converts a branch-local search result into a [`Branch`].
    pub fn finish<T>(&self, found: Option<T>) -> Branch<T> {
        match found {
            Some(value) if !self.over_budget() => Branch::Found {
                value,
                nodes: self.nodes,
            },
            _ if self.over_budget() => Branch::Exhausted { nodes: self.nodes },
            _ if self.superseded() => Branch::Aborted,
            _ => Branch::Exhausted { nodes: self.nodes },
        }
    }
}

/// Runs `f` on each branch and returns the first success in branch order,
/// with the total node count a sequential left-to-right search would have
/// spent. `base_nodes` are nodes already spent before branching.
pub(crate) fn first_in_order<B, T, F>(
    branches: &[B],
    workers: usize,
    budget: u64,
    base_nodes: u64,
    f: F,
) -> Result<(Option<T>, u64), SearchError>
where
    B: Sync,
    T: Send,
    F: Fn(&B, &mut Ctl<'_>) -> Option<T> + Sync,
{
    let best = AtomicUsize::new(usize::MAX);
    let cap = budget.saturating_sub(base_nodes);
    let run = |index: usize, branch: &B| -> Branch<T> {
        if best.load(Ordering::Relaxed) < index {
            return Branch::Aborted;
        }
        let mut ctl = Ctl {
            index,
            best: &best,
            cap,
            nodes: 0,
        };
        let found = f(branch, &mut ctl);
        let out = ctl.finish(found);
        if matches!(out, Branch::Found { .. }) {
            best.fetch_min(index, Ordering::Relaxed);
        }
        out
    };

    let mut total = base_nodes;
    let exhausted = |nodes: u64| SearchError::BudgetExhausted { budget, nodes };
    if base_nodes > budget {
        return Err(exhausted(base_nodes));
    }

    if workers <= 1 {
        for (i, b) in branches.iter().enumerate() {
            match run(i, b) {
                Branch::Found { value, nodes } => {
                    total += nodes;
                    return if total > budget { Err(exhausted(total)) } else { Ok((Some(value), total)) };
                }
                Branch::Exhausted { nodes } => {
                    total += nodes;
                    if total > budget {
                        return Err(exhausted(total));
                    }
                }
                Branch::Aborted => unreachable!("sequential runs are never superseded"),
            }
        }
        return Ok((None, total));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SearchError::InvalidInput(format!("thread pool: {e}")))?;
    let results: Vec<Branch<T>> = pool.install(|| {
        branches
            .par_iter()
            .enumerate()
            .map(|(i, b)| run(i, b))
            .collect()
    });
    for r in results {
        match r {
            Branch::Found { value, nodes } => {
                total += nodes;
                return if total > budget { Err(exhausted(total)) } else { Ok((Some(value), total)) };
            }
            Branch::Exhausted { nodes } => {
                total += nodes;
                if total > budget {
                    return Err(exhausted(total));
                }
            }
            Branch::Aborted => unreachable!("branches after a success are never merged"),
        }
    }
    Ok((None, total))
}
