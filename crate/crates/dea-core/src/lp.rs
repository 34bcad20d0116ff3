//! Dense two-phase simplex solver.
//!
//! Problems in this crate are small (tens of variables), so the solver keeps a
//! full tableau, recovers row duals from the final basis, and trades speed for
//! reproducibility: Dantzig pricing with fixed tie-breaking, ratio-test ties
//! broken by lowest variable index, and Bland's rule once pivots stall on a
//! degenerate vertex. Identical inputs produce bit-identical solutions.

use thiserror::Error;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Row relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// A linear program over variables with finite lower bounds (default 0) and
/// optional finite upper bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    rows: Vec<Row>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// Create a program with `num_vars` variables, zero objective and bounds `[0, +inf)`.
    pub fn new(sense: Sense, num_vars: usize) -> Self {
        LinearProgram {
            sense,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Set the whole objective vector. Panics if the length is wrong.
    pub fn set_objective(&mut self, coeffs: Vec<f64>) {
        assert_eq!(
            coeffs.len(),
            self.objective.len(),
            "objective length mismatch"
        );
        self.objective = coeffs;
    }

    pub fn objective_coeff(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    /// Append a constraint row. Panics if the coefficient vector length is wrong.
    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> usize {
        assert_eq!(coeffs.len(), self.objective.len(), "row length mismatch");
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn set_lower(&mut self, var: usize, lo: f64) {
        self.lower[var] = lo;
    }

    pub fn set_upper(&mut self, var: usize, hi: f64) {
        self.upper[var] = hi;
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.lower[var] = lo;
        self.upper[var] = hi;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    fn validate(&self) -> Result<(), SolveError> {
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(SolveError::BadProgram(format!(
                    "objective[{j}] is not finite"
                )));
            }
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() {
                return Err(SolveError::BadProgram(format!(
                    "variable {j} has non-finite lower bound"
                )));
            }
            if hi.is_nan() || hi < lo {
                return Err(SolveError::BadProgram(format!(
                    "variable {j} has bounds [{lo}, {hi}]"
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(SolveError::BadProgram(format!(
                    "row {i} has non-finite data"
                )));
            }
        }
        Ok(())
    }
}

/// Solver tolerances, shared by the LP, MILP and model layers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    /// Smallest acceptable pivot magnitude.
    pub pivot: f64,
    /// Feasibility tolerance for constraint residuals and phase-1 termination.
    pub feasibility: f64,
    /// Distance from an integer at which a binary is considered integral.
    pub integrality: f64,
    /// Positivity cutoff for intensity-weight membership, relative to max(1, max weight).
    pub membership: f64,
    /// Simplex iteration limit per solve.
    pub iteration_limit: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            pivot: 1e-9,
            feasibility: 1e-7,
            integrality: 1e-6,
            membership: 1e-6,
            iteration_limit: 20_000,
        }
    }
}

/// Outcome classification of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of a linear program.
///
/// `duals` holds one multiplier per constraint row and `reduced_costs` one
/// entry per variable, both with respect to the original row/variable order.
/// Sign convention: for a minimization, `reduced_cost[j] = c[j] - sum_i duals[i] * a[i][j]`
/// and the dual objective is `sum_i duals[i] * b[i]` plus the bound terms
/// `reduced_cost[j] * lower[j]` (positive reduced costs) or
/// `reduced_cost[j] * upper[j]` (negative ones). For a maximization all three
/// vectors are reported so that the same identities hold with the original
/// (un-negated) objective.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn non_optimal(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            objective: f64::NAN,
            primal: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            iterations,
        }
    }
}

/// Failures distinct from infeasibility/unboundedness, which are statuses.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("simplex iteration limit of {0} exceeded")]
    IterationLimit(usize),
    #[error("malformed linear program: {0}")]
    BadProgram(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Solve `p` to optimality, or report infeasibility/unboundedness.
pub fn solve_lp(p: &LinearProgram, tol: &ToleranceConfig) -> Result<LpSolution, SolveError> {
    p.validate()?;
    Simplex::standardize(p, tol)?.run(p)
}

// A standardized row: coefficients over shifted structural variables plus
// slack/surplus/artificial columns, with nonnegative right-hand side.
struct Simplex<'a> {
    tol: &'a ToleranceConfig,
    num_structural: usize,
    num_cols: usize,
    // tableau: one Vec per row, current (basis-reduced) coefficients
    tab: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    // pristine standardized matrix, kept for dual recovery
    pristine: Vec<Vec<f64>>,
    basis: Vec<usize>,
    artificial: Vec<bool>, // per column
    // map from standardized row to original row index (None for bound rows),
    // along with whether the row was negated during standardization
    row_origin: Vec<(Option<usize>, bool)>,
    shift: Vec<f64>,
    min_objective: Vec<f64>, // structural objective in min form, over shifted vars
    // an empty row contradicted its right-hand side during standardization
    trivially_infeasible: bool,
    // largest |rhs| among rows that start with a basic artificial
    artificial_rhs_scale: f64,
    iterations: usize,
}

impl<'a> Simplex<'a> {
    fn standardize(p: &LinearProgram, tol: &'a ToleranceConfig) -> Result<Self, SolveError> {
        let n = p.num_vars();
        let shift = p.lower.clone();
        let min_objective: Vec<f64> = match p.sense {
            Sense::Minimize => p.objective.clone(),
            Sense::Maximize => p.objective.iter().map(|c| -c).collect(),
        };

        // Gather rows: original constraints first, then upper-bound rows.
        let mut trivially_infeasible = false;
        let mut rows: Vec<(Vec<f64>, Relation, f64, Option<usize>)> = Vec::new();
        for (i, row) in p.rows.iter().enumerate() {
            let shifted_rhs = row.rhs
                - row
                    .coeffs
                    .iter()
                    .zip(&shift)
                    .map(|(c, l)| c * l)
                    .sum::<f64>();
            if row.coeffs.iter().all(|c| *c == 0.0) {
                // Empty row: either already satisfied (drop it) or the whole
                // program is infeasible.
                let ok = match row.relation {
                    Relation::Le => shifted_rhs >= -tol.feasibility,
                    Relation::Ge => shifted_rhs <= tol.feasibility,
                    Relation::Eq => shifted_rhs.abs() <= tol.feasibility,
                };
                if !ok {
                    trivially_infeasible = true;
                }
                continue;
            }
            rows.push((row.coeffs.clone(), row.relation, shifted_rhs, Some(i)));
        }
        for j in 0..n {
            if p.upper[j].is_finite() {
                let mut coeffs = vec![0.0; n];
                coeffs[j] = 1.0;
                rows.push((coeffs, Relation::Le, p.upper[j] - p.lower[j], None));
            }
        }

        let m = rows.len();
        let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut row_origin = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for (coeffs, relation, b, origin) in rows {
            let negate = b < 0.0;
            let coeffs: Vec<f64> = if negate {
                coeffs.iter().map(|c| -c).collect()
            } else {
                coeffs
            };
            let relation = if negate {
                match relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                }
            } else {
                relation
            };
            tab.push(coeffs);
            rhs.push(if negate { -b } else { b });
            row_origin.push((origin, negate));
            relations.push(relation);
        }

        // Column layout: structural | slack/surplus | artificial.
        let mut num_cols = n;
        let mut slack_col = vec![None; m];
        for (i, rel) in relations.iter().enumerate() {
            if matches!(rel, Relation::Le | Relation::Ge) {
                slack_col[i] = Some(num_cols);
                num_cols += 1;
            }
        }
        let mut art_col = vec![None; m];
        for (i, rel) in relations.iter().enumerate() {
            if matches!(rel, Relation::Ge | Relation::Eq) {
                art_col[i] = Some(num_cols);
                num_cols += 1;
            }
        }

        for row in tab.iter_mut() {
            row.resize(num_cols, 0.0);
        }
        let mut artificial = vec![false; num_cols];
        let mut basis = vec![usize::MAX; m];
        // The infeasibility gate must be scaled by the rows that carry
        // artificials, not by the largest right-hand side overall: big-M rows
        // are slack-only and their huge rhs would wash out real residues.
        let mut artificial_rhs_scale = 1.0f64;
        for i in 0..m {
            match relations[i] {
                Relation::Le => {
                    let s = slack_col[i].unwrap();
                    tab[i][s] = 1.0;
                    basis[i] = s;
                }
                Relation::Ge => {
                    let s = slack_col[i].unwrap();
                    let a = art_col[i].unwrap();
                    tab[i][s] = -1.0;
                    tab[i][a] = 1.0;
                    artificial[a] = true;
                    basis[i] = a;
                    artificial_rhs_scale = artificial_rhs_scale.max(rhs[i].abs());
                }
                Relation::Eq => {
                    let a = art_col[i].unwrap();
                    tab[i][a] = 1.0;
                    artificial[a] = true;
                    basis[i] = a;
                    artificial_rhs_scale = artificial_rhs_scale.max(rhs[i].abs());
                }
            }
        }

        Ok(Simplex {
            tol,
            num_structural: n,
            num_cols,
            pristine: tab.clone(),
            tab,
            rhs,
            basis,
            artificial,
            row_origin,
            shift,
            min_objective,
            trivially_infeasible,
            artificial_rhs_scale,
            iterations: 0,
        })
    }

    fn column_cost(&self, costs: &[f64], col: usize) -> f64 {
        costs.get(col).copied().unwrap_or(0.0)
    }

    // Reduced-cost row for the given cost vector (indexed by column; missing
    // entries cost zero), computed from scratch against the current basis.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let m = self.tab.len();
        let mut reduced = Vec::with_capacity(self.num_cols);
        for j in 0..self.num_cols {
            let mut r = self.column_cost(costs, j);
            for i in 0..m {
                let cb = self.column_cost(costs, self.basis[i]);
                if cb != 0.0 {
                    r -= cb * self.tab[i][j];
                }
            }
            reduced.push(r);
        }
        reduced
    }

    fn pivot(&mut self, row: usize, col: usize, reduced: &mut [f64]) {
        let m = self.tab.len();
        let piv = self.tab[row][col];
        let inv = 1.0 / piv;
        for j in 0..self.num_cols {
            self.tab[row][j] *= inv;
        }
        self.rhs[row] *= inv;
        // exact unit column for the entering variable
        self.tab[row][col] = 1.0;
        for i in 0..m {
            if i == row {
                continue;
            }
            let factor = self.tab[i][col];
            if factor != 0.0 {
                for j in 0..self.num_cols {
                    self.tab[i][j] -= factor * self.tab[row][j];
                }
                self.tab[i][col] = 0.0;
                self.rhs[i] -= factor * self.rhs[row];
            }
        }
        let rfactor = reduced[col];
        if rfactor != 0.0 {
            for j in 0..self.num_cols {
                reduced[j] -= rfactor * self.tab[row][j];
            }
            reduced[col] = 0.0;
        }
        self.basis[row] = col;
    }

    // Run pivots until the phase objective is optimal. `allow_artificial`
    // permits artificial columns to enter (phase 1 only). Returns false if the
    // phase objective is unbounded below.
    fn iterate(
        &mut self,
        reduced: &mut [f64],
        allow_artificial: bool,
        guard_artificials: bool,
    ) -> Result<bool, SolveError> {
        let m = self.tab.len();
        let mut bland = false;
        let mut stalled = 0usize;
        let stall_limit = 2 * (m + self.num_cols);
        loop {
            self.iterations += 1;
            if self.iterations > self.tol.iteration_limit {
                return Err(SolveError::IterationLimit(self.tol.iteration_limit));
            }

            let entering = if bland {
                (0..self.num_cols).find(|&j| {
                    (allow_artificial || !self.artificial[j]) && reduced[j] < -self.tol.pivot
                })
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..self.num_cols {
                    if !allow_artificial && self.artificial[j] {
                        continue;
                    }
                    let r = reduced[j];
                    if r < -self.tol.pivot && best.is_none_or(|(_, b)| r < b) {
                        best = Some((j, r));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(col) = entering else {
                return Ok(true);
            };

            // Basic artificials sit at zero after phase 1; force them to leave
            // before any pivot could move them off zero.
            let mut leave: Option<(usize, f64)> = None;
            if guard_artificials {
                for i in 0..m {
                    if self.artificial[self.basis[i]] && self.tab[i][col].abs() > self.tol.pivot {
                        leave = Some((i, 0.0));
                        break;
                    }
                }
            }
            if leave.is_none() {
                let mut best: Option<(usize, f64)> = None;
                for i in 0..m {
                    let a = self.tab[i][col];
                    if a > self.tol.pivot {
                        let ratio = self.rhs[i] / a;
                        match best {
                            None => best = Some((i, ratio)),
                            Some((bi, br)) => {
                                if ratio < br - 1e-12
                                    || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                                {
                                    best = Some((i, ratio));
                                }
                            }
                        }
                    }
                }
                leave = best;
            }
            let Some((row, ratio)) = leave else {
                return Ok(false); // unbounded phase objective
            };

            if ratio.abs() <= 1e-12 {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
                bland = false;
            }
            self.pivot(row, col, reduced);
        }
    }

    fn run(mut self, p: &LinearProgram) -> Result<LpSolution, SolveError> {
        let m = self.tab.len();

        if self.trivially_infeasible {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, 0));
        }

        // Phase 1: minimize the sum of artificials.
        let mut phase1_costs = vec![0.0; self.num_cols];
        for j in 0..self.num_cols {
            if self.artificial[j] {
                phase1_costs[j] = 1.0;
            }
        }
        if self.artificial.iter().any(|&a| a) {
            let mut reduced = self.reduced_costs(&phase1_costs);
            let bounded = self.iterate(&mut reduced, true, false)?;
            if !bounded {
                return Err(SolveError::Numerical(
                    "phase-1 objective reported unbounded".into(),
                ));
            }
            let infeas: f64 = (0..m)
                .filter(|&i| self.artificial[self.basis[i]])
                .map(|i| self.rhs[i])
                .sum();
            if infeas > self.tol.feasibility * self.artificial_rhs_scale {
                return Ok(LpSolution::non_optimal(
                    LpStatus::Infeasible,
                    self.iterations,
                ));
            }
        }

        // Phase 2: the real objective over structural columns.
        let mut phase2_costs = vec![0.0; self.num_cols];
        phase2_costs[..self.num_structural].copy_from_slice(&self.min_objective);
        let mut reduced = self.reduced_costs(&phase2_costs);
        let bounded = self.iterate(&mut reduced, false, true)?;
        if !bounded {
            return Ok(LpSolution::non_optimal(
                LpStatus::Unbounded,
                self.iterations,
            ));
        }

        // Extract the primal point in original coordinates.
        let mut shifted = vec![0.0; self.num_cols];
        for i in 0..m {
            shifted[self.basis[i]] = self.rhs[i];
        }
        let mut primal = Vec::with_capacity(self.num_structural);
        for j in 0..self.num_structural {
            let mut v = shifted[j];
            if v < 0.0 && v >= -self.tol.feasibility {
                v = 0.0;
            }
            primal.push(self.shift[j] + v);
        }

        // Audit the point against the original rows and bounds; pivoting
        // drift must surface as an error, never as a silently wrong optimum.
        for (i, row) in p.rows.iter().enumerate() {
            let lhs: f64 = row.coeffs.iter().zip(&primal).map(|(c, x)| c * x).sum();
            let scale = 1.0f64.max(lhs.abs()).max(row.rhs.abs());
            let violation = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            if violation > self.tol.feasibility * scale {
                return Err(SolveError::Numerical(format!(
                    "row {i} violated by {violation:.3e} in the final basis"
                )));
            }
        }
        for (j, x) in primal.iter().enumerate() {
            let (lo, hi) = p.bounds(j);
            let scale = 1.0f64.max(x.abs());
            if *x < lo - self.tol.feasibility * scale || *x > hi + self.tol.feasibility * scale {
                return Err(SolveError::Numerical(format!(
                    "variable {j} = {x} escaped its bounds [{lo}, {hi}]"
                )));
            }
        }

        let objective: f64 = p.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();

        let (duals, reduced_costs) = self.recover_duals(p, &phase2_costs)?;

        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective,
            primal,
            duals,
            reduced_costs,
            iterations: self.iterations,
        })
    }

    // Solve B^T y = c_B against the pristine standardized matrix, then map the
    // multipliers back to original rows and compute original-space reduced costs.
    fn recover_duals(
        &self,
        p: &LinearProgram,
        costs: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>), SolveError> {
        let m = self.tab.len();
        let mut bt = vec![vec![0.0; m + 1]; m];
        for (i, &b) in self.basis.iter().enumerate() {
            // row i of B^T is column `basis[i]` of the pristine matrix
            for r in 0..m {
                bt[i][r] = self.pristine[r][b];
            }
            bt[i][m] = self.column_cost(costs, b);
        }
        let y_std = gauss_solve(&mut bt)
            .ok_or_else(|| SolveError::Numerical("singular basis while recovering duals".into()))?;

        let mut duals = vec![0.0; p.num_rows()];
        for (std_row, &(origin, negated)) in self.row_origin.iter().enumerate() {
            if let Some(orig) = origin {
                duals[orig] = if negated {
                    -y_std[std_row]
                } else {
                    y_std[std_row]
                };
            }
        }
        let mut reduced_costs = Vec::with_capacity(p.num_vars());
        for j in 0..p.num_vars() {
            let mut r = match p.sense {
                Sense::Minimize => p.objective[j],
                Sense::Maximize => -p.objective[j],
            };
            for (i, row) in p.rows.iter().enumerate() {
                if row.coeffs[j] != 0.0 {
                    r -= duals[i] * row.coeffs[j];
                }
            }
            reduced_costs.push(r);
        }
        if p.sense == Sense::Maximize {
            for d in duals.iter_mut() {
                *d = -*d;
            }
            for r in reduced_costs.iter_mut() {
                *r = -*r;
            }
        }
        Ok((duals, reduced_costs))
    }
}

// Gaussian elimination with partial pivoting on an augmented system; each row
// is `[coefficients..., rhs]`. Returns None on a (numerically) singular matrix.
fn gauss_solve(aug: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = aug.len();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = aug[col][col].abs();
        for r in col + 1..n {
            let mag = aug[r][col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < 1e-12 {
            return None;
        }
        aug.swap(col, pivot_row);
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = aug[r][col] / aug[col][col];
            if factor != 0.0 {
                for c in col..=n {
                    let v = aug[col][c];
                    aug[r][c] -= factor * v;
                }
            }
        }
    }
    Some((0..n).map(|i| aug[i][n] / aug[i][i]).collect())
}
