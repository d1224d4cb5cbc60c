//! Single-shot cost and distillation bounds, and the magic-cost comparison
//! table.
//!
//! All ratios are in bits over bits, so they are base-invariant; ceilings and
//! floors carry a 1e-9 relative guard band so values within rounding noise of
//! an integer do not spill over.

use crate::channels::ChoiOperator;
use crate::error::{MagicError, Result};
use crate::io::round_sig;
use crate::monotones::{dmin_state, robustness_state};
use crate::numerics::matrix::ComplexMatrix;
use crate::stabilizer::StabilizerSet;

const GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    CostUpper,
    CostLower,
    DistillUpper,
    DistillLower,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    /// Monotone inputs that produced the bound, for traceability.
    pub inputs: Vec<(&'static str, f64)>,
    pub note: Option<&'static str>,
}

fn guarded_ceil(x: f64) -> f64 {
    (x - GUARD * x.abs().max(1.0)).ceil().max(0.0)
}

fn guarded_floor(x: f64) -> f64 {
    (x + GUARD * x.abs().max(1.0)).floor().max(0.0)
}

/// Magic-cost upper bound ⌈LR(N) / D_min(ψ)⌉ for a single-qubit resource ψ.
pub fn cost_upper_bound(lr_channel: f64, dmin_psi: f64) -> Result<BoundReport> {
    if dmin_psi <= 1e-12 {
        return Err(MagicError::FreeResourceState);
    }
    let value = if lr_channel <= 0.0 {
        0.0
    } else {
        guarded_ceil(lr_channel / dmin_psi)
    };
    Ok(BoundReport {
        kind: BoundKind::CostUpper,
        value,
        inputs: vec![("LR(N)", lr_channel), ("Dmin(psi)", dmin_psi)],
        note: None,
    })
}

/// Magic-cost lower bound LR_g(N) / LR_g(ψ).
pub fn cost_lower_bound(lrg_channel: f64, lrg_psi: f64) -> Result<BoundReport> {
    if lrg_psi <= 1e-12 {
        return Err(MagicError::FreeResourceState);
    }
    Ok(BoundReport {
        kind: BoundKind::CostLower,
        value: (lrg_channel / lrg_psi).max(0.0),
        inputs: vec![("LRg(N)", lrg_channel), ("LRg(psi)", lrg_psi)],
        note: None,
    })
}

/// Distillation upper bound D_min^CSPO(N) / D_min(ψ). Fed with the certified
/// lower end of the channel bracket this is a bound on a bound, and the
/// report says so.
pub fn distill_upper_bound(
    dmin_channel: f64,
    dmin_psi: f64,
    from_bracket_lower: bool,
) -> Result<BoundReport> {
    if dmin_psi <= 1e-12 {
        return Err(MagicError::FreeResourceState);
    }
    Ok(BoundReport {
        kind: BoundKind::DistillUpper,
        value: (dmin_channel / dmin_psi).max(0.0),
        inputs: vec![("Dmin(N)", dmin_channel), ("Dmin(psi)", dmin_psi)],
        note: from_bracket_lower.then_some("bound-on-bound"),
    })
}

/// Distillation lower bound ⌊D_min^ε(J̃^N) / LR(ψ)⌋.
pub fn distill_lower_bound(dmin_eps_choi: f64, lr_psi: f64) -> Result<BoundReport> {
    if lr_psi <= 1e-12 {
        return Err(MagicError::FreeResourceState);
    }
    Ok(BoundReport {
        kind: BoundKind::DistillLower,
        value: guarded_floor(dmin_eps_choi / lr_psi),
        inputs: vec![("DminEps(Choi)", dmin_eps_choi), ("LR(psi)", lr_psi)],
        note: None,
    })
}

/// Existence form of the dimension bound: a system with max-D_min at least
/// LR(N) suffices.
pub fn cost_dimension_sufficient(lr_channel: f64, dmin_max_for_dim: f64) -> bool {
    dmin_max_for_dim >= lr_channel - GUARD
}

/// One row of the magic-cost comparison table.
#[derive(Debug, Clone)]
pub struct Table1Row {
    pub state: &'static str,
    pub qubits: usize,
    /// ℓ1 robustness of the row state.
    pub r_hc: f64,
    /// log₂(1 + R) of the qubit-input replacement channel preparing the row
    /// state; its channel robustness equals the state robustness exactly.
    pub lr_channel: f64,
    /// Chosen-convention bound: ⌈LR(replacement channel) / D_min(|T⟩)⌉.
    pub computed: f64,
    /// Rejected candidate convention ⌈log₂ R_HC / D_min(|T⟩)⌉, reported so
    /// divergences are never silent.
    pub computed_state_convention: f64,
    pub paper_value: u32,
    pub howard_campbell_value: u32,
    pub matches_paper: bool,
    /// Set when |computed − paper| > 1.
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct Table1Report {
    pub dmin_t: f64,
    pub rows: Vec<Table1Row>,
}

/// Reference columns: the comparison table's published values.
const TABLE1_REFERENCE: [(&str, usize, u32, u32); 9] = [
    ("H", 1, 2, 2),
    ("CS_1,2", 2, 3, 3),
    ("T_1,2,3", 3, 4, 3),
    ("chi", 2, 4, 4),
    ("CCZ", 3, 4, 4),
    ("CS_12,13", 3, 4, 4),
    ("T1_CS_2,3", 3, 5, 4),
    ("T1_CS_12,13", 3, 5, 5),
    ("Hoggar", 3, 6, 6),
];

/// Build the comparison table with |T⟩ as the resource state.
///
/// Every row state ψ is prepared by the replacement channel ρ ↦ ψ, whose
/// channel robustness equals the state robustness (tensoring with I/2 is
/// free and partial trace is a CSPO), so LR(N_ψ) = log₂((1 + R_HC(ψ))/2).
/// Three-qubit rows need the n = 3 stabilizer set and are skipped when
/// `include_three_qubit` is false.
pub fn table1_report(
    set1: &StabilizerSet,
    set2: &StabilizerSet,
    set3: Option<&StabilizerSet>,
    include_three_qubit: bool,
) -> Result<Table1Report> {
    let t_state = crate::io::resolve_state(&crate::io::JsonState {
        name: Some("T".into()),
        ..Default::default()
    })?;
    let dmin_t = dmin_state(&t_state, set1)?.value;

    let mut rows = Vec::new();
    for (name, qubits, paper, hc) in TABLE1_REFERENCE {
        if qubits == 3 && (!include_three_qubit || set3.is_none()) {
            continue;
        }
        let rho = table1_state(name)?;
        let set = match qubits {
            1 => set1,
            2 => set2,
            3 => set3.expect("checked above"),
            _ => unreachable!(),
        };
        let r_hc = robustness_state(&rho, set)?
            .convention
            .expect("robustness reports carry conventions")
            .r_hc;
        let lr_channel = ((1.0 + r_hc) / 2.0).log2().max(0.0);
        let computed = guarded_ceil(lr_channel / dmin_t);
        let state_conv = guarded_ceil(r_hc.log2().max(0.0) / dmin_t);
        let matches_paper = computed == paper as f64;
        rows.push(Table1Row {
            state: name,
            qubits,
            r_hc: round_sig(r_hc, 12),
            lr_channel: round_sig(lr_channel, 12),
            computed,
            computed_state_convention: state_conv,
            paper_value: paper,
            howard_campbell_value: hc,
            matches_paper,
            flagged: (computed - paper as f64).abs() > 1.0,
        });
    }
    Ok(Table1Report { dmin_t, rows })
}

fn table1_state(name: &str) -> Result<ComplexMatrix> {
    use crate::io::{resolve_state, JsonState};
    let named = |n: &str| {
        resolve_state(&JsonState {
            name: Some(n.into()),
            ..Default::default()
        })
    };
    match name {
        "H" => named("H"),
        "chi" => named("chi"),
        "Hoggar" => named("hoggar"),
        "CS_1,2" => Ok(gate_on_plus(&cs_matrix(), 2)),
        "T_1,2,3" => {
            let t = named("T")?;
            Ok(t.kron(&t).kron(&t))
        }
        "CCZ" => Ok(gate_on_plus(&ccz_matrix(), 3)),
        "CS_12,13" => Ok(gate_on_plus(&cs12_cs13_matrix(), 3)),
        "T1_CS_2,3" => Ok(gate_on_plus(&t1_cs23_matrix(), 3)),
        "T1_CS_12,13" => Ok(gate_on_plus(&t1_cs12_cs13_matrix(), 3)),
        other => Err(MagicError::MissingFixture(other.to_string())),
    }
}

fn gate_on_plus(u: &ComplexMatrix, n: usize) -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    let dim = 1 << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let plus: Vec<C64> = vec![C64::new(amp, 0.0); dim];
    let v = u.matvec(&plus);
    ComplexMatrix::projector(&v)
}

fn diagonal_gate(n: usize, phase: impl Fn(usize) -> crate::numerics::matrix::C64) -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    let dim = 1 << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = phase(i);
    }
    let _ = C64::new(0.0, 0.0);
    m
}

fn cs_matrix() -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    diagonal_gate(2, |i| {
        if i == 3 {
            C64::new(0.0, 1.0)
        } else {
            C64::new(1.0, 0.0)
        }
    })
}

fn ccz_matrix() -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    diagonal_gate(3, |i| {
        if i == 7 {
            C64::new(-1.0, 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    })
}

fn cs12_cs13_matrix() -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    diagonal_gate(3, |i| {
        let (q1, q2, q3) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        let mut z = C64::new(1.0, 0.0);
        if q1 == 1 && q2 == 1 {
            z *= C64::new(0.0, 1.0);
        }
        if q1 == 1 && q3 == 1 {
            z *= C64::new(0.0, 1.0);
        }
        z
    })
}

fn t1_cs23_matrix() -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    let e4 = C64::new(
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    );
    diagonal_gate(3, |i| {
        let (q1, q2, q3) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        let mut z = C64::new(1.0, 0.0);
        if q1 == 1 {
            z *= e4;
        }
        if q2 == 1 && q3 == 1 {
            z *= C64::new(0.0, 1.0);
        }
        z
    })
}

fn t1_cs12_cs13_matrix() -> ComplexMatrix {
    use crate::numerics::matrix::C64;
    let e4 = C64::new(
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    );
    diagonal_gate(3, |i| {
        let (q1, q2, q3) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        let mut z = C64::new(1.0, 0.0);
        if q1 == 1 {
            z *= e4;
        }
        if q1 == 1 && q2 == 1 {
            z *= C64::new(0.0, 1.0);
        }
        if q1 == 1 && q3 == 1 {
            z *= C64::new(0.0, 1.0);
        }
        z
    })
}

/// Robustness of the replacement channel preparing ψ equals the state
/// robustness; exposed for the cross-check tests.
pub fn replacement_channel_for(rho: &ComplexMatrix) -> Result<ChoiOperator> {
    ChoiOperator::replacement(rho, 2)
}
