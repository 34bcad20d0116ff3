//! Bundled example data.

use crate::dataset::DmuDataset;

const CLASSIC_INPUTS: [[f64; 9]; 2] = [
    [1.0, 2.0, 4.0, 6.0, 3.0, 3.0, 7.0, 5.0, 9.0],
    [7.0, 5.0, 3.0, 2.0, 4.0, 8.0, 4.0, 3.0, 3.0],
];
const CLASSIC_OUTPUTS: [[f64; 9]; 1] = [[1.0; 9]];

/// The nine-DMU, two-input, one-output example dataset bundled with the
/// toolkit (also shipped as `data/example.csv`).
pub fn classic_nine() -> DmuDataset {
    DmuDataset::new(
        (1..=9).map(|k| format!("DMU{k}")).collect(),
        vec!["x1".into(), "x2".into()],
        vec!["y".into()],
        CLASSIC_INPUTS.iter().map(|r| r.to_vec()).collect(),
        CLASSIC_OUTPUTS.iter().map(|r| r.to_vec()).collect(),
    )
    .expect("bundled dataset is valid")
}

/// True when `ds` carries exactly the bundled nine-DMU values (names and
/// labels ignored). Used to attach dataset-specific report notes.
pub fn matches_classic_nine(ds: &DmuDataset) -> bool {
    if ds.num_dmus() != 9 || ds.num_inputs() != 2 || ds.num_outputs() != 1 {
        return false;
    }
    for j in 0..9 {
        if ds.input(0, j) != CLASSIC_INPUTS[0][j]
            || ds.input(1, j) != CLASSIC_INPUTS[1][j]
            || ds.output(0, j) != CLASSIC_OUTPUTS[0][j]
        {
            return false;
        }
    }
    true
}
