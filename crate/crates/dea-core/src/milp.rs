//! Branch-and-bound over binary variables.
//!
//! Depth-first search branching on the most fractional binary with the `b = 1`
//! child explored first. Small instances only: every node solves its LP
//! relaxation from scratch.

use crate::lp::{solve_lp, LinearProgram, LpStatus, Sense, SolveError, ToleranceConfig};
use thiserror::Error;

/// Default node budget; exceeding it is an error rather than a silent
/// degradation.
pub const DEFAULT_NODE_LIMIT: usize = 100_000;

/// A linear program plus a set of variables restricted to {0, 1}.
#[derive(Clone, Debug)]
pub struct MilpProgram {
    pub base: LinearProgram,
    pub binaries: Vec<usize>,
}

impl MilpProgram {
    /// Wrap `base`, constraining `binaries` to {0, 1}. Sorts and deduplicates
    /// the index list.
    pub fn new(base: LinearProgram, mut binaries: Vec<usize>) -> Result<Self, MilpError> {
        binaries.sort_unstable();
        binaries.dedup();
        if let Some(&bad) = binaries.iter().find(|&&j| j >= base.num_vars()) {
            return Err(MilpError::BadProgram(format!(
                "binary index {bad} out of range for {} variables",
                base.num_vars()
            )));
        }
        for &j in &binaries {
            let (lo, hi) = base.bounds(j);
            if lo < -1e-12 || hi > 1.0 + 1e-12 {
                return Err(MilpError::BadProgram(format!(
                    "binary variable {j} has bounds [{lo}, {hi}] outside [0, 1]"
                )));
            }
        }
        Ok(MilpProgram { base, binaries })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub node_count: usize,
    /// Objective of the root LP relaxation, when it was solvable.
    pub root_relaxation: Option<f64>,
}

#[derive(Clone, Debug, Error)]
pub enum MilpError {
    #[error("node limit exceeded after {node_count} nodes (incumbent {})",
            .incumbent.as_ref().map(|s| s.objective.to_string()).unwrap_or_else(|| "none".into()))]
    NodeLimit {
        node_count: usize,
        /// Best integral solution found so far, not proven optimal.
        incumbent: Option<Box<MilpSolution>>,
    },
    #[error("relaxation unbounded; cannot bound the search")]
    UnboundedRelaxation,
    #[error("relaxation failed: {0}")]
    Relaxation(#[from] SolveError),
    #[error("malformed program: {0}")]
    BadProgram(String),
}

struct Search<'a> {
    program: &'a MilpProgram,
    tol: &'a ToleranceConfig,
    node_limit: usize,
    node_count: usize,
    incumbent: Option<(f64, Vec<f64>)>,
    root_relaxation: Option<f64>,
}

// Fixings are per binary-list position: None = free, Some(0|1) = pinned.
type Fixings = Vec<Option<u8>>;

impl<'a> Search<'a> {
    fn better(&self, a: f64, b: f64) -> bool {
        match self.program.base.sense() {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }

    fn relaxation(&self, fixings: &Fixings) -> Result<crate::lp::LpSolution, MilpError> {
        let mut lp = self.program.base.clone();
        for (pos, fix) in fixings.iter().enumerate() {
            if let Some(v) = fix {
                let j = self.program.binaries[pos];
                lp.set_bounds(j, f64::from(*v), f64::from(*v));
            }
        }
        solve_lp(&lp, self.tol).map_err(MilpError::Relaxation)
    }

    fn run(&mut self) -> Result<MilpSolution, MilpError> {
        let nbin = self.program.binaries.len();
        let mut stack: Vec<Fixings> = vec![vec![None; nbin]];

        while let Some(fixings) = stack.pop() {
            self.node_count += 1;
            if self.node_count > self.node_limit {
                return Err(MilpError::NodeLimit {
                    node_count: self.node_count,
                    incumbent: self.incumbent.as_ref().map(|(obj, x)| {
                        Box::new(MilpSolution {
                            status: MilpStatus::Optimal,
                            objective: *obj,
                            primal: x.clone(),
                            node_count: self.node_count,
                            root_relaxation: self.root_relaxation,
                        })
                    }),
                });
            }
            let is_root = self.node_count == 1;

            let relax = self.relaxation(&fixings)?;
            match relax.status {
                LpStatus::Infeasible => continue,
                LpStatus::Unbounded => return Err(MilpError::UnboundedRelaxation),
                LpStatus::Optimal => {}
            }
            if is_root {
                self.root_relaxation = Some(relax.objective);
            }
            if let Some((best, _)) = &self.incumbent {
                if prune(self.program.base.sense(), relax.objective, *best) {
                    continue;
                }
            }

            // Most fractional binary, ties to the lowest index.
            let mut branch: Option<(usize, f64)> = None;
            for (pos, &j) in self.program.binaries.iter().enumerate() {
                if fixings[pos].is_some() {
                    continue;
                }
                let v = relax.primal[j];
                let frac = (v - v.round()).abs();
                if frac > self.tol.integrality && branch.is_none_or(|(_, bf)| frac > bf + 1e-15) {
                    branch = Some((pos, frac));
                }
            }

            match branch {
                None => {
                    // Integral within tolerance. Pin the binaries exactly and
                    // re-solve unless they are already exact, so the incumbent
                    // reproduces under fixing.
                    let exact = self
                        .program
                        .binaries
                        .iter()
                        .all(|&j| relax.primal[j] == relax.primal[j].round());
                    let (obj, primal) = if exact {
                        (relax.objective, relax.primal)
                    } else {
                        let mut pinned = fixings.clone();
                        for (pos, &j) in self.program.binaries.iter().enumerate() {
                            pinned[pos] = Some(relax.primal[j].round() as u8);
                        }
                        let fixed = self.relaxation(&pinned)?;
                        if fixed.status != LpStatus::Optimal {
                            // A binary within tolerance of an integer can still
                            // leak big-M-sized slack through the switch rows,
                            // making the rounded point infeasible. Split the
                            // worst offender exactly instead of dropping the
                            // node, or the search loses feasible leaves.
                            let mut worst: Option<(usize, f64)> = None;
                            for (pos, &j) in self.program.binaries.iter().enumerate() {
                                if fixings[pos].is_some() {
                                    continue;
                                }
                                let v = relax.primal[j];
                                let frac = (v - v.round()).abs();
                                if frac > 0.0 && worst.is_none_or(|(_, wf)| frac > wf) {
                                    worst = Some((pos, frac));
                                }
                            }
                            if let Some((pos, _)) = worst {
                                push_children(&mut stack, fixings, pos);
                            }
                            continue;
                        }
                        (fixed.objective, fixed.primal)
                    };
                    let accept = match &self.incumbent {
                        None => true,
                        Some((best, _)) => self.better(obj, *best),
                    };
                    if accept {
                        self.incumbent = Some((obj, primal));
                    }
                }
                Some((pos, _)) => {
                    push_children(&mut stack, fixings, pos);
                }
            }
        }

        match self.incumbent.take() {
            Some((objective, primal)) => Ok(MilpSolution {
                status: MilpStatus::Optimal,
                objective,
                primal,
                node_count: self.node_count,
                root_relaxation: self.root_relaxation,
            }),
            None => Ok(MilpSolution {
                status: MilpStatus::Infeasible,
                objective: f64::NAN,
                primal: Vec::new(),
                node_count: self.node_count,
                root_relaxation: self.root_relaxation,
            }),
        }
    }
}

// The `one` child is pushed last so depth-first search explores it first.
fn push_children(stack: &mut Vec<Fixings>, fixings: Fixings, pos: usize) {
    let mut zero = fixings.clone();
    zero[pos] = Some(0);
    let mut one = fixings;
    one[pos] = Some(1);
    stack.push(zero);
    stack.push(one);
}

// Discard a node whose relaxation cannot improve on the incumbent by more
// than the proof tolerance.
fn prune(sense: Sense, relaxation: f64, incumbent: f64) -> bool {
    match sense {
        Sense::Minimize => relaxation >= incumbent - 1e-9,
        Sense::Maximize => relaxation <= incumbent + 1e-9,
    }
}

/// Solve a mixed-binary program by exhaustive branch-and-bound.
pub fn solve_milp(
    p: &MilpProgram,
    tol: &ToleranceConfig,
    node_limit: usize,
) -> Result<MilpSolution, MilpError> {
    let mut search = Search {
        program: p,
        tol,
        node_limit,
        node_count: 0,
        incumbent: None,
        root_relaxation: None,
    };
    search.run()
}
