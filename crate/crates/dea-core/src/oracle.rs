//! Brute-force oracles for desk-scale instances.
//!
//! These enumerate facets of the efficient cone instead of trusting the
//! mixed-binary machinery, so any alternate implementation can check itself
//! against them. They are guarded to the exhaustive regime (m + s <= 4,
//! n <= 12).

use crate::dataset::DmuDataset;
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense, ToleranceConfig};
use crate::models::{classify_all, efficient_indices, pareto_with_candidates, ModelError};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("exhaustive regime exceeded: m + s = {ms} (max 4), n = {n} (max 12)")]
    RegimeExceeded { ms: usize, n: usize },
    #[error("point is not Pareto-efficient")]
    NotParetoEfficient,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Closest target found by enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleProjection {
    pub objective: f64,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

fn check_regime(ds: &DmuDataset) -> Result<(), OracleError> {
    let ms = ds.num_inputs() + ds.num_outputs();
    let n = ds.num_dmus();
    if ms > 4 || n > 12 {
        return Err(OracleError::RegimeExceeded { ms, n });
    }
    Ok(())
}

fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(
        items: &[usize],
        size: usize,
        start: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if acc.len() == size {
            out.push(acc.clone());
            return;
        }
        for i in start..items.len() {
            acc.push(items[i]);
            rec(items, size, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, size, 0, &mut Vec::new(), &mut out);
    out
}

// Does some hyperplane with weights >= 1 vanish on `subset` while staying
// nonnegative (in deficit form v.x - u.y) on every efficient DMU?
fn facet_certificate_exists(
    ds: &DmuDataset,
    efficient: &[usize],
    subset: &[usize],
    tol: &ToleranceConfig,
) -> Result<bool, OracleError> {
    let m = ds.num_inputs();
    let s = ds.num_outputs();
    let mut lp = LinearProgram::new(Sense::Minimize, m + s);
    for j in 0..m + s {
        lp.set_lower(j, 1.0);
    }
    for &j in efficient {
        let mut row = vec![0.0; m + s];
        for i in 0..m {
            row[i] = ds.input(i, j);
        }
        for r in 0..s {
            row[m + r] = -ds.output(r, j);
        }
        let relation = if subset.contains(&j) {
            Relation::Eq
        } else {
            Relation::Ge
        };
        lp.add_row(row, relation, 0.0);
    }
    let sol = solve_lp(&lp, tol).map_err(ModelError::from)?;
    Ok(sol.status == LpStatus::Optimal)
}

// Minimum total slack representing DMU `o` using only `subset` columns.
fn min_slack_over(
    ds: &DmuDataset,
    subset: &[usize],
    o: usize,
    tol: &ToleranceConfig,
) -> Result<Option<OracleProjection>, OracleError> {
    let k = subset.len();
    let m = ds.num_inputs();
    let s = ds.num_outputs();
    let ncols = k + m + s;
    let mut lp = LinearProgram::new(Sense::Minimize, ncols);
    let mut objective = vec![0.0; ncols];
    for slot in objective.iter_mut().skip(k) {
        *slot = 1.0;
    }
    lp.set_objective(objective);
    let x_o = ds.input_column(o);
    let y_o = ds.output_column(o);
    for i in 0..m {
        let mut row = vec![0.0; ncols];
        for (c, &j) in subset.iter().enumerate() {
            row[c] = ds.input(i, j);
        }
        row[k + i] = 1.0;
        lp.add_row(row, Relation::Eq, x_o[i]);
    }
    for r in 0..s {
        let mut row = vec![0.0; ncols];
        for (c, &j) in subset.iter().enumerate() {
            row[c] = ds.output(r, j);
        }
        row[k + m + r] = -1.0;
        lp.add_row(row, Relation::Eq, y_o[r]);
    }
    let sol = solve_lp(&lp, tol).map_err(ModelError::from)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let inputs: Vec<f64> = (0..m)
        .map(|i| (x_o[i] - sol.primal[k + i]).max(0.0))
        .collect();
    let outputs: Vec<f64> = (0..s)
        .map(|r| y_o[r] + sol.primal[k + m + r].max(0.0))
        .collect();
    Ok(Some(OracleProjection {
        objective: sol.objective,
        inputs,
        outputs,
    }))
}

/// Exhaustive closest-target search: over every subset of efficient DMUs of
/// size at most m + s - 1 that lies on a common supporting hyperplane, take
/// the minimum-slack representation of `o` and return the global minimum.
pub fn oracle_closest(
    ds: &DmuDataset,
    o: usize,
    tol: &ToleranceConfig,
) -> Result<OracleProjection, OracleError> {
    check_regime(ds)?;
    if o >= ds.num_dmus() {
        return Err(OracleError::Model(ModelError::IndexOutOfRange(o)));
    }
    let statuses = classify_all(ds, tol)?;
    let efficient = efficient_indices(&statuses);
    let max_size = (ds.num_inputs() + ds.num_outputs() - 1).max(1);

    let mut best: Option<OracleProjection> = None;
    for size in 1..=max_size.min(efficient.len()) {
        for subset in combinations(&efficient, size) {
            if !facet_certificate_exists(ds, &efficient, &subset, tol)? {
                continue;
            }
            if let Some(candidate) = min_slack_over(ds, &subset, o, tol)? {
                let improves = best
                    .as_ref()
                    .is_none_or(|b| candidate.objective < b.objective);
                if improves {
                    best = Some(candidate);
                }
            }
        }
    }
    best.ok_or(OracleError::Model(ModelError::UnexpectedStatus {
        context: "oracle found no representable facet",
        status: LpStatus::Infeasible,
    }))
}

/// Exhaustive maximal-set search: an efficient DMU belongs to the maximal set
/// of a Pareto-efficient point exactly when its weight can be made positive in
/// some exact representation of the point.
pub fn oracle_maximal_set(
    ds: &DmuDataset,
    inputs: &[f64],
    outputs: &[f64],
    tol: &ToleranceConfig,
) -> Result<Vec<usize>, OracleError> {
    check_regime(ds)?;
    let statuses = classify_all(ds, tol)?;
    let efficient = efficient_indices(&statuses);
    if !pareto_with_candidates(ds, &efficient, inputs, outputs, tol)? {
        return Err(OracleError::NotParetoEfficient);
    }

    let k = efficient.len();
    let m = ds.num_inputs();
    let s = ds.num_outputs();
    let mut members = Vec::new();
    for (target, &j_target) in efficient.iter().enumerate() {
        // Bounded without caps: every DMU has a strictly positive input, so
        // the representation rows pin each weight.
        let mut lp = LinearProgram::new(Sense::Maximize, k);
        lp.objective_coeff(target, 1.0);
        for i in 0..m {
            let mut row = vec![0.0; k];
            for (c, &j) in efficient.iter().enumerate() {
                row[c] = ds.input(i, j);
            }
            lp.add_row(row, Relation::Eq, inputs[i]);
        }
        for r in 0..s {
            let mut row = vec![0.0; k];
            for (c, &j) in efficient.iter().enumerate() {
                row[c] = ds.output(r, j);
            }
            lp.add_row(row, Relation::Eq, outputs[r]);
        }
        let sol = solve_lp(&lp, tol).map_err(ModelError::from)?;
        if sol.status == LpStatus::Optimal && sol.objective > tol.membership {
            members.push(j_target);
        }
    }
    Ok(members)
}
