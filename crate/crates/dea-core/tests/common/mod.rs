//! Shared fixtures for the integration suites: seeded dataset and program
//! generators so every suite exercises identical instances.

use dea_core::lp::{LinearProgram, Relation, Sense};
use dea_core::milp::MilpProgram;
use dea_core::DmuDataset;

/// Seeds for the randomized dataset suite (m = 2, s = 1, n <= 8).
pub const DATASET_SEEDS: [u64; 20] = [
    101, 102, 103, 104, 105, 106, 107, 108, 109, 110, 111, 112, 113, 114, 115, 116, 117, 118, 119,
    120,
];

/// Seeds for the randomized mixed-binary programs.
pub const MILP_SEEDS: [u64; 10] = [901, 902, 903, 904, 905, 906, 907, 908, 909, 910];

/// splitmix64; fixed algorithm so the instances never drift across platforms.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Two inputs, one output, 4..=8 DMUs, values uniform in [1, 10].
pub fn random_dataset(seed: u64) -> DmuDataset {
    let mut rng = Rng::new(seed);
    let n = 4 + rng.below(5);
    let names = (1..=n).map(|k| format!("D{k}")).collect();
    let mut inputs = vec![Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut outputs = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        inputs[0].push(rng.range(1.0, 10.0));
        inputs[1].push(rng.range(1.0, 10.0));
        outputs[0].push(rng.range(1.0, 10.0));
    }
    DmuDataset::new(
        names,
        vec!["x1".into(), "x2".into()],
        vec!["y".into()],
        inputs,
        outputs,
    )
    .expect("generated dataset is valid")
}

/// Feasible mixed-binary minimization with 4..=8 variables, 3..=8 of them
/// binary, and nonnegative right-hand sides (so the origin is feasible).
pub fn random_milp(seed: u64) -> MilpProgram {
    let mut rng = Rng::new(seed);
    let nvars = 4 + rng.below(5);
    let nbin = (3 + rng.below(6)).min(nvars);
    let nrows = 3 + rng.below(4);

    let mut lp = LinearProgram::new(Sense::Minimize, nvars);
    let mut objective = Vec::with_capacity(nvars);
    for _ in 0..nvars {
        objective.push(rng.range(-10.0, 10.0));
    }
    lp.set_objective(objective);
    for j in 0..nvars {
        if j < nbin {
            lp.set_bounds(j, 0.0, 1.0);
        } else {
            lp.set_bounds(j, 0.0, rng.range(1.0, 5.0));
        }
    }
    for _ in 0..nrows {
        let coeffs: Vec<f64> = (0..nvars).map(|_| rng.range(-5.0, 5.0)).collect();
        lp.add_row(coeffs, Relation::Le, rng.range(1.0, 10.0));
    }
    MilpProgram::new(lp, (0..nbin).collect()).expect("generated program is valid")
}
