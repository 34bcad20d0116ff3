//! Decision-making-unit data: names plus input/output matrices, immutable
//! after construction.
//!
//! The CSV interchange format is one header row `dmu,in:<label>,...,out:<label>,...`
//! followed by one row per DMU. Lines starting with `#` and blank lines are
//! skipped. Values must be finite and nonnegative; plain and scientific
//! decimal notation are accepted.

use std::collections::BTreeSet;
use std::io::Read;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("missing header row")]
    MissingHeader,
    #[error("first column must be named `dmu`, found `{0}`")]
    FirstColumnNotDmu(String),
    #[error("column header `{0}` must start with `in:` or `out:`")]
    UnknownColumnKind(String),
    #[error("no `in:` columns in header")]
    NoInputColumns,
    #[error("no `out:` columns in header")]
    NoOutputColumns,
    #[error("no DMU rows")]
    Empty,
    #[error("row {row} has {got} fields, expected {expected}")]
    WrongFieldCount {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("empty DMU name at row {row}")]
    EmptyName { row: usize },
    #[error("duplicate DMU name `{name}` at row {row}")]
    DuplicateName { name: String, row: usize },
    #[error("non-numeric value `{value}` at row {row}, column {column}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("negative value at row {row}, column {column}")]
    Negative { row: usize, column: String },
    #[error("DMU `{name}` has no strictly positive input")]
    AllZeroInputs { name: String },
    #[error("DMU `{name}` has no strictly positive output")]
    AllZeroOutputs { name: String },
    #[error("matrix shape does not match labels: {0}")]
    Shape(String),
    #[error("unknown DMU name `{0}`")]
    UnknownDmu(String),
}

/// Immutable dataset: `m` input rows and `s` output rows over `n` DMU columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DmuDataset {
    names: Vec<String>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    inputs: Vec<Vec<f64>>,  // m rows, each of length n
    outputs: Vec<Vec<f64>>, // s rows, each of length n
}

impl DmuDataset {
    /// Build and validate a dataset. Labels are metadata; all model math is
    /// positional.
    pub fn new(
        names: Vec<String>,
        input_labels: Vec<String>,
        output_labels: Vec<String>,
        inputs: Vec<Vec<f64>>,
        outputs: Vec<Vec<f64>>,
    ) -> Result<Self, DatasetError> {
        let n = names.len();
        if n == 0 {
            return Err(DatasetError::Empty);
        }
        if input_labels.is_empty() {
            return Err(DatasetError::NoInputColumns);
        }
        if output_labels.is_empty() {
            return Err(DatasetError::NoOutputColumns);
        }
        if inputs.len() != input_labels.len() {
            return Err(DatasetError::Shape(format!(
                "{} input rows for {} input labels",
                inputs.len(),
                input_labels.len()
            )));
        }
        if outputs.len() != output_labels.len() {
            return Err(DatasetError::Shape(format!(
                "{} output rows for {} output labels",
                outputs.len(),
                output_labels.len()
            )));
        }
        for (kind, rows) in [("input", &inputs), ("output", &outputs)] {
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(DatasetError::Shape(format!(
                        "{kind} row {i} has {} values for {n} DMUs",
                        row.len()
                    )));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (j, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(DatasetError::EmptyName { row: j + 1 });
            }
            if !seen.insert(name.clone()) {
                return Err(DatasetError::DuplicateName {
                    name: name.clone(),
                    row: j + 1,
                });
            }
        }
        let check_cells = |rows: &[Vec<f64>], labels: &[String]| -> Result<(), DatasetError> {
            for (i, row) in rows.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(DatasetError::NonNumeric {
                            row: j + 1,
                            column: labels[i].clone(),
                            value: v.to_string(),
                        });
                    }
                    if v < 0.0 {
                        return Err(DatasetError::Negative {
                            row: j + 1,
                            column: labels[i].clone(),
                        });
                    }
                }
            }
            Ok(())
        };
        let in_labels: Vec<String> = input_labels.iter().map(|l| format!("in:{l}")).collect();
        let out_labels: Vec<String> = output_labels.iter().map(|l| format!("out:{l}")).collect();
        check_cells(&inputs, &in_labels)?;
        check_cells(&outputs, &out_labels)?;
        for j in 0..n {
            if !inputs.iter().any(|row| row[j] > 0.0) {
                return Err(DatasetError::AllZeroInputs {
                    name: names[j].clone(),
                });
            }
            if !outputs.iter().any(|row| row[j] > 0.0) {
                return Err(DatasetError::AllZeroOutputs {
                    name: names[j].clone(),
                });
            }
        }
        Ok(DmuDataset {
            names,
            input_labels,
            output_labels,
            inputs,
            outputs,
        })
    }

    pub fn num_dmus(&self) -> usize {
        self.names.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn input(&self, i: usize, j: usize) -> f64 {
        self.inputs[i][j]
    }

    pub fn output(&self, r: usize, j: usize) -> f64 {
        self.outputs[r][j]
    }

    /// Input column x_j of one DMU.
    pub fn input_column(&self, j: usize) -> Vec<f64> {
        self.inputs.iter().map(|row| row[j]).collect()
    }

    /// Output column y_j of one DMU.
    pub fn output_column(&self, j: usize) -> Vec<f64> {
        self.outputs.iter().map(|row| row[j]).collect()
    }

    /// Largest absolute value in either matrix.
    pub fn max_abs_value(&self) -> f64 {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Serialize back to the CSV interchange format with full-precision
    /// values, so a reload reproduces the dataset bit for bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dmu");
        for l in &self.input_labels {
            out.push_str(&format!(",in:{l}"));
        }
        for l in &self.output_labels {
            out.push_str(&format!(",out:{l}"));
        }
        out.push('\n');
        for j in 0..self.num_dmus() {
            out.push_str(&self.names[j]);
            for row in &self.inputs {
                out.push_str(&format!(",{}", row[j]));
            }
            for row in &self.outputs {
                out.push_str(&format!(",{}", row[j]));
            }
            out.push('\n');
        }
        out
    }
}

enum ColumnKind {
    Input(usize),
    Output(usize),
}

/// Parse and validate a dataset from CSV text.
pub fn load_dataset(mut source: impl Read) -> Result<DmuDataset, DatasetError> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|_| DatasetError::NotUtf8)?;
    let text = String::from_utf8(bytes).map_err(|_| DatasetError::NotUtf8)?;
    load_dataset_str(&text)
}

/// [`load_dataset`] over an in-memory string.
pub fn load_dataset_str(text: &str) -> Result<DmuDataset, DatasetError> {
    let mut lines = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let header = lines.next().ok_or(DatasetError::MissingHeader)?;
    let header_fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if header_fields.is_empty() || header_fields[0] != "dmu" {
        return Err(DatasetError::FirstColumnNotDmu(
            header_fields.first().copied().unwrap_or("").to_string(),
        ));
    }

    let mut kinds = Vec::new();
    let mut input_labels = Vec::new();
    let mut output_labels = Vec::new();
    for field in &header_fields[1..] {
        if let Some(label) = field.strip_prefix("in:") {
            kinds.push(ColumnKind::Input(input_labels.len()));
            input_labels.push(label.to_string());
        } else if let Some(label) = field.strip_prefix("out:") {
            kinds.push(ColumnKind::Output(output_labels.len()));
            output_labels.push(label.to_string());
        } else {
            return Err(DatasetError::UnknownColumnKind((*field).to_string()));
        }
    }
    if input_labels.is_empty() {
        return Err(DatasetError::NoInputColumns);
    }
    if output_labels.is_empty() {
        return Err(DatasetError::NoOutputColumns);
    }

    let mut names: Vec<String> = Vec::new();
    let mut inputs: Vec<Vec<f64>> = vec![Vec::new(); input_labels.len()];
    let mut outputs: Vec<Vec<f64>> = vec![Vec::new(); output_labels.len()];
    for (row_idx, line) in lines.enumerate() {
        let row = row_idx + 1; // 1-based over data rows
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header_fields.len() {
            return Err(DatasetError::WrongFieldCount {
                row,
                expected: header_fields.len(),
                got: fields.len(),
            });
        }
        let name = fields[0];
        if name.is_empty() {
            return Err(DatasetError::EmptyName { row });
        }
        if names.iter().any(|n| n == name) {
            return Err(DatasetError::DuplicateName {
                name: name.to_string(),
                row,
            });
        }
        names.push(name.to_string());
        for (pos, (kind, field)) in kinds.iter().zip(&fields[1..]).enumerate() {
            let column = header_fields[1 + pos].to_string();
            let value: f64 = field.parse().map_err(|_| DatasetError::NonNumeric {
                row,
                column: column.clone(),
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::NonNumeric {
                    row,
                    column,
                    value: field.to_string(),
                });
            }
            if value < 0.0 {
                return Err(DatasetError::Negative { row, column });
            }
            match kind {
                ColumnKind::Input(i) => inputs[*i].push(value),
                ColumnKind::Output(r) => outputs[*r].push(value),
            }
        }
    }

    DmuDataset::new(names, input_labels, output_labels, inputs, outputs)
}

/// Input and output column of the named DMU.
pub fn dmu_column(ds: &DmuDataset, name: &str) -> Result<(Vec<f64>, Vec<f64>), DatasetError> {
    let j = ds
        .index_of(name)
        .ok_or_else(|| DatasetError::UnknownDmu(name.to_string()))?;
    Ok((ds.input_column(j), ds.output_column(j)))
}
