//! Report serialization: the JSON schema, plus CSV and fixed-width table
//! renderings of an analysis report.

use dea_core::pipeline::{AnalysisMode, AnalysisReport, CandidatesPolicy};
use dea_core::{DmuDataset, EfficiencyStatus};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub config: ConfigDto,
    pub dataset_digest: String,
    pub notes: Vec<String>,
    pub dmus: Vec<DmuDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigDto {
    pub mode: String,
    pub big_m: f64,
    pub big_m_policy: String,
    pub candidates: String,
    pub node_limit: usize,
    pub tolerances: TolerancesDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancesDto {
    pub pivot: f64,
    pub feasibility: f64,
    pub integrality: f64,
    pub membership: f64,
    pub iteration_limit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmuDto {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub furthest: Option<FurthestDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closest: Option<ClosestDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FurthestDto {
    /// Projection point, inputs then outputs.
    pub point: Vec<f64>,
    pub objective: f64,
    pub maximal_frs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosestDto {
    pub point: Vec<f64>,
    pub objective: f64,
    pub mcrs: Vec<String>,
    pub eta: f64,
    pub hyperplane: HyperplaneDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneDto {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

pub fn status_str(status: EfficiencyStatus) -> &'static str {
    match status {
        EfficiencyStatus::ExtremeEfficient => "extreme-efficient",
        EfficiencyStatus::EfficientNonExtreme => "efficient",
        EfficiencyStatus::Inefficient => "inefficient",
    }
}

fn mode_str(mode: AnalysisMode) -> &'static str {
    match mode {
        AnalysisMode::Closest => "closest",
        AnalysisMode::Furthest => "furthest",
        AnalysisMode::Both => "both",
    }
}

fn candidates_str(policy: CandidatesPolicy) -> &'static str {
    match policy {
        CandidatesPolicy::Support => "support",
        CandidatesPolicy::AllEfficient => "all-efficient",
    }
}

fn names(ds: &DmuDataset, indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&j| ds.name(j).to_string()).collect()
}

/// Build the serializable report, restricted to the given DMU indices.
pub fn build_dto(ds: &DmuDataset, report: &AnalysisReport, keep: &[usize]) -> ReportDto {
    let config = ConfigDto {
        mode: mode_str(report.config.mode).to_string(),
        big_m: report.config.big_m,
        big_m_policy: if report.config.big_m_auto {
            "auto".into()
        } else {
            "fixed".into()
        },
        candidates: candidates_str(report.config.candidates).to_string(),
        node_limit: report.config.node_limit,
        tolerances: TolerancesDto {
            pivot: report.config.tol.pivot,
            feasibility: report.config.tol.feasibility,
            integrality: report.config.tol.integrality,
            membership: report.config.tol.membership,
            iteration_limit: report.config.tol.iteration_limit,
        },
    };
    let mut dmus = Vec::new();
    for &o in keep {
        let dto = match &report.records[o] {
            Ok(rec) => {
                let furthest = rec.furthest.as_ref().map(|f| FurthestDto {
                    point: f
                        .projection
                        .inputs
                        .iter()
                        .chain(&f.projection.outputs)
                        .copied()
                        .collect(),
                    objective: f.projection.objective,
                    maximal_frs: names(ds, &f.maximal_set),
                });
                let closest = rec.closest.as_ref().map(|c| ClosestDto {
                    point: c
                        .projection
                        .inputs
                        .iter()
                        .chain(&c.projection.outputs)
                        .copied()
                        .collect(),
                    objective: c.projection.objective,
                    mcrs: names(ds, &c.reference.members),
                    eta: c.reference.eta,
                    hyperplane: HyperplaneDto {
                        u: c.reference.hyperplane.output_weights.clone(),
                        v: c.reference.hyperplane.input_weights.clone(),
                    },
                });
                DmuDto {
                    name: ds.name(o).to_string(),
                    status: status_str(rec.status).to_string(),
                    furthest,
                    closest,
                    error: None,
                }
            }
            Err(e) => DmuDto {
                name: ds.name(o).to_string(),
                status: "unknown".to_string(),
                furthest: None,
                closest: None,
                error: Some(e.to_string()),
            },
        };
        dmus.push(dto);
    }
    ReportDto {
        config,
        dataset_digest: report.digest.clone(),
        notes: report.notes.clone(),
        dmus,
    }
}

/// `value` to 6 significant digits for table output.
pub fn fmt_sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

fn fmt_point(point: &[f64]) -> String {
    let parts: Vec<String> = point.iter().map(|v| fmt_sig6(*v)).collect();
    format!("({})", parts.join(", "))
}

fn fmt_set(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

/// Fixed-width table mirroring the furthest/closest report layout.
pub fn render_table(dto: &ReportDto) -> String {
    let wants_furthest = dto.config.mode != "closest";
    let wants_closest = dto.config.mode != "furthest";

    let mut header = vec!["dmu".to_string(), "status".to_string()];
    if wants_furthest {
        header.extend([
            "furthest target".into(),
            "slack".into(),
            "maximal FRS".into(),
        ]);
    }
    if wants_closest {
        header.extend([
            "closest target".into(),
            "slack".into(),
            "MCRS".into(),
            "eta".into(),
        ]);
    }

    let mut rows = vec![header];
    for dmu in &dto.dmus {
        let mut row = vec![dmu.name.clone(), dmu.status.clone()];
        if let Some(err) = &dmu.error {
            row.push(format!("error: {err}"));
            rows.push(row);
            continue;
        }
        if wants_furthest {
            match &dmu.furthest {
                Some(f) => row.extend([
                    fmt_point(&f.point),
                    fmt_sig6(f.objective),
                    fmt_set(&f.maximal_frs),
                ]),
                None => row.extend(["-".into(), "-".into(), "-".into()]),
            }
        }
        if wants_closest {
            match &dmu.closest {
                Some(c) => row.extend([
                    fmt_point(&c.point),
                    fmt_sig6(c.objective),
                    fmt_set(&c.mcrs),
                    fmt_sig6(c.eta),
                ]),
                None => row.extend(["-".into(), "-".into(), "-".into(), "-".into()]),
            }
        }
        rows.push(row);
    }

    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; ncols];
    for row in &rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            if c + 1 < row.len() {
                for _ in cell.len()..widths[c] {
                    line.push(' ');
                }
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for note in &dto.notes {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

/// CSV rendering; list-valued cells are joined with `;` so the row stays flat.
pub fn render_csv(dto: &ReportDto) -> String {
    let wants_furthest = dto.config.mode != "closest";
    let wants_closest = dto.config.mode != "furthest";
    let mut out = String::from("dmu,status");
    if wants_furthest {
        out.push_str(",furthest_objective,furthest_point,maximal_frs");
    }
    if wants_closest {
        out.push_str(",closest_objective,closest_point,mcrs,eta");
    }
    out.push_str(",error\n");
    let join_nums = |v: &[f64]| -> String {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    for dmu in &dto.dmus {
        out.push_str(&dmu.name);
        out.push(',');
        out.push_str(&dmu.status);
        if wants_furthest {
            match &dmu.furthest {
                Some(f) => out.push_str(&format!(
                    ",{},{},{}",
                    f.objective,
                    join_nums(&f.point),
                    f.maximal_frs.join(";")
                )),
                None => out.push_str(",,,"),
            }
        }
        if wants_closest {
            match &dmu.closest {
                Some(c) => out.push_str(&format!(
                    ",{},{},{},{}",
                    c.objective,
                    join_nums(&c.point),
                    c.mcrs.join(";"),
                    c.eta
                )),
                None => out.push_str(",,,,"),
            }
        }
        match &dmu.error {
            Some(e) => out.push_str(&format!(",{}", e.replace(',', ";"))),
            None => out.push(','),
        }
        out.push('\n');
    }
    out
}
