//! Output payloads and emission. JSON uses stable struct field order; text
//! mode renders the same payload as indented key/value lines. All floats are
//! rounded to 12 significant digits before serialization.

use serde::Serialize;

use magickit::bounds::Table1Report;
use magickit::error::MagicError;
use magickit::interconvert::ConvexHull3;
use magickit::io::{matrix_to_json, round_sig, JsonComplex};
use magickit::monotones::{MonotoneReport, Optimizer};
use magickit::simulate::SimEstimate;
use magickit::stabilizer::StabMembership;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit<T: Serialize>(format: Format, value: &T) -> Result<(), MagicError> {
    match format {
        // serialize the struct directly so declared field order survives
        Format::Json => {
            let text = serde_json::to_string(value)
                .map_err(|e| MagicError::InvalidInput(format!("serialization: {e}")))?;
            println!("{text}");
        }
        Format::Text => {
            let json = serde_json::to_value(value)
                .map_err(|e| MagicError::InvalidInput(format!("serialization: {e}")))?;
            print!("{}", render_text(&json, 0));
        }
    }
    Ok(())
}

fn render_text(v: &serde_json::Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            let mut out = String::new();
            for (k, val) in map {
                match val {
                    serde_json::Value::Object(_) | serde_json::Value::Array(_)
                        if !is_short(val) =>
                    {
                        out.push_str(&format!("{pad}{k}:\n"));
                        out.push_str(&render_text(val, indent + 1));
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}", inline(val))),
                }
            }
            out
        }
        serde_json::Value::Array(items) => {
            let mut out = String::new();
            for item in items {
                if is_short(item) {
                    out.push_str(&format!("{pad}- {}", inline(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    out.push_str(&render_text(item, indent + 1));
                }
            }
            out
        }
        other => format!("{pad}{}", inline(other)),
    }
}

fn is_short(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Array(a) => {
            a.len() <= 8 && a.iter().all(|x| !x.is_object() && !x.is_array())
        }
        serde_json::Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &serde_json::Value) -> String {
    format!("{v}\n")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EnumerateOut {
    pub n: usize,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entangled: Option<usize>,
    pub source: &'static str,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessOut {
    pub matrix: Vec<Vec<JsonComplex>>,
    pub violation: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipOut {
    pub inside: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
}

pub fn membership_out(m: &StabMembership, tol: f64) -> MembershipOut {
    let weights = m.outcome.solution.as_ref().map(|w| {
        w.iter()
            .map(|x| round_sig(*x, 12))
            .map(|x| if x.abs() < tol { 0.0 } else { x })
            .collect()
    });
    let witness = m.witness.as_ref().map(|w| WitnessOut {
        matrix: matrix_to_json(&w.operator),
        violation: round_sig(w.violation, 12),
    });
    MembershipOut {
        inside: m.inside(),
        weights,
        witness,
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ViolationOut {
    pub condition: String,
    pub deviation: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuperchannelOut {
    pub valid: bool,
    pub violations: Vec<ViolationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete: Option<MembershipOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preserving: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Vec<JsonComplex>>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MonotoneOut {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_hc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<std::collections::BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer_weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer_state_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer_matrix: Option<Vec<Vec<JsonComplex>>>,
}

pub fn monotone_out(rep: &MonotoneReport, extra: &[(&str, f64)]) -> MonotoneOut {
    let (r, r_hc) = match rep.convention {
        Some(c) => (Some(round_sig(c.r, 12)), Some(round_sig(c.r_hc, 12))),
        None => (None, None),
    };
    let extra_map = if extra.is_empty() {
        None
    } else {
        Some(
            extra
                .iter()
                .map(|(k, v)| (k.to_string(), round_sig(*v, 12)))
                .collect(),
        )
    };
    let mut out = MonotoneOut {
        name: rep.name.to_string(),
        value: round_sig(rep.value, 12),
        r,
        r_hc,
        extra: extra_map,
        optimizer_weights: None,
        optimizer_state_index: None,
        optimizer_matrix: None,
    };
    match &rep.optimizer {
        Optimizer::Weights(w) | Optimizer::SignedWeights(w) => {
            out.optimizer_weights = Some(w.iter().map(|x| round_sig(*x, 12)).collect());
        }
        Optimizer::StateIndex(i) => out.optimizer_state_index = Some(*i),
        Optimizer::Matrix(m) => out.optimizer_matrix = Some(matrix_to_json(m)),
        Optimizer::None => {}
    }
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BracketOut {
    pub name: &'static str,
    pub lower: f64,
    pub upper_estimate: f64,
    pub upper_certified: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolytopeOut {
    pub vertices: Vec<[f64; 3]>,
    pub facets: Vec<[usize; 3]>,
}

pub fn polytope_out(hull: &ConvexHull3) -> PolytopeOut {
    let vertices = hull
        .input_points()
        .iter()
        .map(|p| {
            [
                round_sig(p[0], 12),
                round_sig(p[1], 12),
                round_sig(p[2], 12),
            ]
        })
        .collect();
    let facets = hull.facet_planes().iter().map(|(v, _, _)| *v).collect();
    PolytopeOut { vertices, facets }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvertOut {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<f64>>,
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeOut>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistanceOut {
    pub distance: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CostBoundsOut {
    pub cost_upper: f64,
    pub cost_lower: f64,
    pub lr_channel: f64,
    pub lrg_channel: f64,
    pub dmin_resource: f64,
    pub lrg_resource: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistillBoundsOut {
    pub distill_upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distill_upper_note: Option<String>,
    pub distill_lower: f64,
    pub bracket_lower: f64,
    pub bracket_upper_estimate: f64,
    pub dmin_eps_choi: f64,
    pub lr_resource: f64,
    pub epsilon: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimOut {
    pub estimate: f64,
    pub error_bound: f64,
    pub sample_count: u64,
    pub replaced_indices: Vec<usize>,
    pub lambda_prime: f64,
}

pub fn sim_out(est: &SimEstimate) -> SimOut {
    SimOut {
        estimate: round_sig(est.estimate, 12),
        error_bound: round_sig(est.error_bound, 12),
        sample_count: est.sample_count,
        replaced_indices: est.replaced_indices.iter().copied().collect(),
        lambda_prime: round_sig(est.lambda_prime, 12),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Table1RowOut {
    state: String,
    qubits: usize,
    r_hc: f64,
    lr_channel: f64,
    computed: f64,
    computed_state_convention: f64,
    paper: u32,
    howard_campbell: u32,
    matches_paper: bool,
    flagged: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Table1Out {
    dmin_t: f64,
    rows: Vec<Table1RowOut>,
}

pub fn emit_table1(format: Format, report: &Table1Report) -> Result<(), MagicError> {
    let out = Table1Out {
        dmin_t: round_sig(report.dmin_t, 12),
        rows: report
            .rows
            .iter()
            .map(|r| Table1RowOut {
                state: r.state.to_string(),
                qubits: r.qubits,
                r_hc: r.r_hc,
                lr_channel: r.lr_channel,
                computed: r.computed,
                computed_state_convention: r.computed_state_convention,
                paper: r.paper_value,
                howard_campbell: r.howard_campbell_value,
                matches_paper: r.matches_paper,
                flagged: r.flagged,
            })
            .collect(),
    };
    match format {
        Format::Json => emit(Format::Json, &out),
        Format::Text => {
            println!(
                "{:<14} {:>3} {:>12} {:>10} {:>9} {:>7} {:>5} {:>7}",
                "state", "n", "R_HC", "LR(N)", "computed", "paper", "HC", "match"
            );
            for r in &out.rows {
                println!(
                    "{:<14} {:>3} {:>12.6} {:>10.6} {:>9} {:>7} {:>5} {:>7}",
                    r.state,
                    r.qubits,
                    r.r_hc,
                    r.lr_channel,
                    r.computed,
                    r.paper,
                    r.howard_campbell,
                    if r.matches_paper { "yes" } else { "NO" }
                );
            }
            println!("dmin_T = {:.6}", out.dmin_t);
            Ok(())
        }
    }
}
