//! Dense two-phase simplex with dual extraction and Farkas certificates.
//!
//! The problems here are small (at most ~100 rows by ~2300 columns for the
//! three-qubit robustness program), so a tableau method with Bland-style
//! anti-cycling is accurate, deterministic, and fast enough. Interior-point
//! methods would not give the exact vertex certificates the tests pin down.

use crate::error::{MagicError, Result};

/// Feasibility tolerance on constraint residuals.
pub const FEAS_TOL: f64 = 1e-9;
/// Pivot rejection threshold.
const PIVOT_TOL: f64 = 1e-10;
/// Reduced-cost threshold for optimality.
const COST_TOL: f64 = 1e-11;
const MAX_ITERS: usize = 1_000_000;
/// Streak of (near-)degenerate pivots after which entering selection switches
/// to Bland. Pivots with step below DEGENERATE_RATIO count toward the streak;
/// otherwise sub-1e-9 crawls never trigger anti-cycling.
const BLAND_TRIGGER: usize = 500;
const DEGENERATE_RATIO: f64 = 1e-9;

/// Linear program `min c·x  s.t.  A_eq x = b_eq, A_ub x ≤ b_ub, x ≥ lb`.
///
/// Lower bounds default to zero; `f64::NEG_INFINITY` marks a free variable.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ub_matrix: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
    pub lower_bounds: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            lower_bounds: vec![0.0; n],
            ..Default::default()
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if n == 0 {
            return Err(MagicError::InvalidInput("LP with zero variables".into()));
        }
        for row in self.eq_matrix.iter().chain(&self.ub_matrix) {
            if row.len() != n {
                return Err(MagicError::InvalidInput(
                    "constraint row length does not match variable count".into(),
                ));
            }
        }
        if self.eq_matrix.len() != self.eq_rhs.len()
            || self.ub_matrix.len() != self.ub_rhs.len()
            || self.lower_bounds.len() != n
        {
            return Err(MagicError::InvalidInput("LP shape mismatch".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// Multipliers of the equality rows: at optimality
    /// `value = eq_duals·b_eq + ub_duals·b_ub (+ bound shifts)`.
    pub eq_duals: Vec<f64>,
    /// Multipliers of the ≤ rows (≤ 0 in this sign convention).
    pub ub_duals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// Certificate over the original rows: `A_eqᵀ y_eq + A_ubᵀ y_ub ≥ 0`
    /// entrywise (on the x ≥ lb cone) with `b_eq·y_eq + b_ub·y_ub < 0`.
    Infeasible {
        farkas_eq: Vec<f64>,
        farkas_ub: Vec<f64>,
    },
    Unbounded,
}

/// Universal answer shape for membership and convertibility questions:
/// either a nonnegative solution of `Ax = b` or a Farkas separation vector.
#[derive(Debug, Clone)]
pub struct FeasibilityOutcome {
    pub feasible: bool,
    pub solution: Option<Vec<f64>>,
    pub certificate: Option<Vec<f64>>,
}

/// Decide `∃ x ≥ 0 : Ax = b`, returning a witness either way.
///
/// The certificate `y` satisfies `Aᵀy ≥ -1e-9` entrywise and `b·y ≤ -1e-9`,
/// normalized to unit max-norm. Deterministic for identical inputs.
pub fn lp_feasibility_with_certificate(a: &[Vec<f64>], b: &[f64]) -> Result<FeasibilityOutcome> {
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    if n == 0 {
        return Err(MagicError::InvalidInput("empty system".into()));
    }
    let problem = LpProblem {
        objective: vec![0.0; n],
        eq_matrix: a.to_vec(),
        eq_rhs: b.to_vec(),
        ub_matrix: vec![],
        ub_rhs: vec![],
        lower_bounds: vec![0.0; n],
    };
    match solve_lp(&problem)? {
        LpOutcome::Optimal(sol) => Ok(FeasibilityOutcome {
            feasible: true,
            solution: Some(sol.x),
            certificate: None,
        }),
        LpOutcome::Infeasible { farkas_eq, .. } => {
            let scale = farkas_eq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let y: Vec<f64> = farkas_eq.iter().map(|v| v / scale.max(1e-300)).collect();
            Ok(FeasibilityOutcome {
                feasible: false,
                solution: None,
                certificate: Some(y),
            })
        }
        LpOutcome::Unbounded => unreachable!("feasibility LP has constant objective"),
    }
}

struct Tableau {
    /// (m + 2) x (width + 1); row m is the phase-2 objective, row m+1 phase 1.
    t: Vec<f64>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.width + 1) + c]
    }
    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.t[r * (self.width + 1) + c]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width + 1;
        let piv = self.at(row, col);
        let inv = 1.0 / piv;
        for c in 0..w {
            *self.at_mut(row, c) *= inv;
        }
        *self.at_mut(row, col) = 1.0;
        for r in 0..self.m + 2 {
            if r == row {
                continue;
            }
            let factor = self.at(r, col);
            if factor == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.at(row, c);
                if v != 0.0 {
                    *self.at_mut(r, c) -= factor * v;
                }
            }
            *self.at_mut(r, col) = 0.0;
        }
        self.basis[row] = col;
    }
}

/// Solve an [`LpProblem`] to optimality with certificates and duals.
pub fn solve_lp(problem: &LpProblem) -> Result<LpOutcome> {
    problem.validate()?;
    let n_orig = problem.n_vars();
    let m_eq = problem.eq_matrix.len();
    let m_ub = problem.ub_matrix.len();
    let m = m_eq + m_ub;

    // Variable substitution: finite lower bound l gives x = z + l; a free
    // variable splits into z+ - z-.
    let mut col_map: Vec<(usize, f64)> = Vec::new(); // (orig var, sign)
    let mut shift = vec![0.0; n_orig];
    for (j, &lb) in problem.lower_bounds.iter().enumerate() {
        if lb == f64::NEG_INFINITY {
            col_map.push((j, 1.0));
            col_map.push((j, -1.0));
        } else {
            shift[j] = lb;
            col_map.push((j, 1.0));
        }
    }
    let n_struct = col_map.len() + m_ub; // slacks appended after structurals
    let width = n_struct + m; // + artificials
    let mut obj_const = 0.0;
    for j in 0..n_orig {
        if shift[j] != 0.0 {
            obj_const += problem.objective[j] * shift[j];
        }
    }

    let mut tab = Tableau {
        t: vec![0.0; (m + 2) * (width + 1)],
        m,
        width,
        basis: (0..m).map(|i| n_struct + i).collect(),
    };

    // Assemble rows; flip signs so every rhs is nonnegative.
    let mut flip = vec![1.0f64; m];
    for i in 0..m {
        let (row_src, rhs_src): (&[f64], f64) = if i < m_eq {
            (&problem.eq_matrix[i], problem.eq_rhs[i])
        } else {
            (&problem.ub_matrix[i - m_eq], problem.ub_rhs[i - m_eq])
        };
        let mut rhs = rhs_src;
        for j in 0..n_orig {
            if shift[j] != 0.0 {
                rhs -= row_src[j] * shift[j];
            }
        }
        if rhs < 0.0 {
            flip[i] = -1.0;
        }
        for (k, &(j, sign)) in col_map.iter().enumerate() {
            *tab.at_mut(i, k) = flip[i] * sign * row_src[j];
        }
        if i >= m_eq {
            *tab.at_mut(i, col_map.len() + (i - m_eq)) = flip[i]; // slack
        }
        *tab.at_mut(i, n_struct + i) = 1.0; // artificial
        *tab.at_mut(i, width) = flip[i] * rhs;
    }

    // Phase-2 objective row.
    for (k, &(j, sign)) in col_map.iter().enumerate() {
        *tab.at_mut(m, k) = sign * problem.objective[j];
    }
    // Phase-1 objective row: reduced costs with the artificial basis.
    for c in 0..=width {
        let mut s = 0.0;
        for r in 0..m {
            s += tab.at(r, c);
        }
        *tab.at_mut(m + 1, c) = -s;
    }
    for i in 0..m {
        *tab.at_mut(m + 1, n_struct + i) = 0.0;
    }

    let b_scale = (0..m).fold(1.0f64, |acc, i| acc.max(tab.at(i, width).abs()));

    // Phase 1: minimize sum of artificials. Feasible instances may stop as
    // soon as the artificial mass is below tolerance; grinding the highly
    // degenerate endgame to reduced-cost optimality can take forever on the
    // polytope-membership systems.
    run_simplex(
        &mut tab,
        m + 1,
        n_struct,
        MAX_ITERS,
        Some(0.5 * FEAS_TOL * b_scale),
    )?;
    let phase1 = -tab.at(m + 1, width);
    if phase1 > FEAS_TOL * b_scale {
        // Farkas vector from the phase-1 duals: y_i = -(1 - r_art_i) with the
        // row flips folded back, which satisfies Aᵀy ≥ 0 and b·y < 0.
        let mut farkas = vec![0.0; m];
        for i in 0..m {
            let r_art = tab.at(m + 1, n_struct + i);
            farkas[i] = -flip[i] * (1.0 - r_art);
        }
        let farkas_eq = farkas[..m_eq].to_vec();
        // ≤ rows enter the certificate through their slack columns; their
        // multipliers must be ≤ 0 there, which the phase-1 duals guarantee.
        let farkas_ub = farkas[m_eq..].to_vec();
        return Ok(LpOutcome::Infeasible {
            farkas_eq,
            farkas_ub,
        });
    }

    // Drive any leftover basic artificials out, dropping redundant rows.
    let mut active = vec![true; m];
    for r in 0..m {
        if tab.basis[r] < n_struct {
            continue;
        }
        let mut entered = false;
        for c in 0..n_struct {
            if tab.at(r, c).abs() > PIVOT_TOL {
                tab.pivot(r, c);
                entered = true;
                break;
            }
        }
        if !entered {
            active[r] = false; // redundant constraint
        }
    }

    // Phase 2 on the structural columns only.
    match run_simplex_active(&mut tab, m, n_struct, &active, MAX_ITERS)? {
        SimplexEnd::Optimal => {}
        SimplexEnd::Unbounded => return Ok(LpOutcome::Unbounded),
    }

    // Recover x in original variables.
    let mut z = vec![0.0; width];
    for r in 0..m {
        if active[r] && tab.basis[r] < width {
            z[tab.basis[r]] = tab.at(r, width);
        }
    }
    let mut x = shift;
    for (k, &(j, sign)) in col_map.iter().enumerate() {
        x[j] += sign * z[k];
    }
    // The objective row's rhs cell accumulates -(c·z) as pivots apply.
    let value = -tab.at(m, width) + obj_const;

    // Duals y = c_B B⁻¹ read from the artificial columns of the phase-2
    // objective row (reduced cost there is -y_i), with row flips folded back.
    let mut eq_duals = vec![0.0; m_eq];
    let mut ub_duals = vec![0.0; m_ub];
    for i in 0..m {
        let y = -flip[i] * tab.at(m, n_struct + i);
        if i < m_eq {
            eq_duals[i] = y;
        } else {
            ub_duals[i - m_eq] = y;
        }
    }

    Ok(LpOutcome::Optimal(LpSolution {
        value,
        x,
        eq_duals,
        ub_duals,
    }))
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

fn run_simplex(
    tab: &mut Tableau,
    obj_row: usize,
    n_eligible: usize,
    cap: usize,
    stop_below: Option<f64>,
) -> Result<()> {
    let active = vec![true; tab.m];
    match run_simplex_inner(tab, obj_row, n_eligible, &active, cap, stop_below)? {
        SimplexEnd::Optimal => Ok(()),
        // Phase 1 is bounded below by zero; an unbounded report is numerical.
        SimplexEnd::Unbounded => Err(MagicError::NumericalFailure(
            "phase-1 simplex reported unbounded".into(),
        )),
    }
}

fn run_simplex_active(
    tab: &mut Tableau,
    obj_row: usize,
    n_eligible: usize,
    active: &[bool],
    cap: usize,
) -> Result<SimplexEnd> {
    run_simplex_inner(tab, obj_row, n_eligible, active, cap, None)
}

fn run_simplex_inner(
    tab: &mut Tableau,
    obj_row: usize,
    n_eligible: usize,
    active: &[bool],
    cap: usize,
    stop_below: Option<f64>,
) -> Result<SimplexEnd> {
    let mut degenerate_streak = 0usize;
    // Once anti-cycling engages it stays on: resetting to Dantzig after a
    // nominal-progress pivot lets sub-resolution crawls loop forever.
    let mut bland_latched = false;
    let mut checkpoint_value = f64::INFINITY;
    for iter in 0..cap {
        if let Some(threshold) = stop_below {
            if -tab.at(obj_row, tab.width) <= threshold {
                return Ok(SimplexEnd::Optimal);
            }
        }
        if degenerate_streak > BLAND_TRIGGER {
            bland_latched = true;
        }
        if iter % 1000 == 0 {
            let value = -tab.at(obj_row, tab.width);
            if value > checkpoint_value - 1e-12 * (1.0 + value.abs()) {
                bland_latched = true; // objective stalled across a full block
            }
            checkpoint_value = value;
        }
        let bland = bland_latched;
        // Entering column: most negative reduced cost (Dantzig), smallest
        // index under Bland or on ties.
        let mut enter: Option<usize> = None;
        let mut best = -COST_TOL;
        for c in 0..n_eligible {
            let r = tab.at(obj_row, c);
            if r < best {
                enter = Some(c);
                if bland {
                    break;
                }
                best = r;
            }
        }
        let Some(col) = enter else {
            return Ok(SimplexEnd::Optimal);
        };

        // Ratio test. Among rows within an absolute 1e-9 band of the best
        // ratio, prefer the largest pivot magnitude (stability and fewer
        // degenerate stalls); under Bland, the smallest basis index instead.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..tab.m {
            if !active[r] {
                continue;
            }
            let a = tab.at(r, col);
            if a > PIVOT_TOL {
                let ratio = tab.at(r, tab.width) / a;
                if ratio < best_ratio {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(mut row) = leave else {
            return Ok(SimplexEnd::Unbounded);
        };
        for r in 0..tab.m {
            if !active[r] || r == row {
                continue;
            }
            let a = tab.at(r, col);
            if a > PIVOT_TOL {
                let ratio = tab.at(r, tab.width) / a;
                if ratio <= best_ratio + 1e-9 {
                    let better = if bland {
                        tab.basis[r] < tab.basis[row]
                    } else {
                        a > tab.at(row, col)
                    };
                    if better {
                        row = r;
                    }
                }
            }
        }
        if best_ratio.abs() < DEGENERATE_RATIO {
            degenerate_streak += 1;
        } else {
            degenerate_streak = 0;
        }
        tab.pivot(row, col);
    }
    Err(MagicError::NumericalFailure(format!(
        "simplex iteration cap {MAX_ITERS} exceeded"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_objective() {
        // min x1+x2 s.t. x1+x2 = 1, x >= 0  ->  1
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.eq_matrix = vec![vec![1.0, 1.0]];
        p.eq_rhs = vec![1.0];
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert!((sol.value - 1.0).abs() < 1e-9);
                assert!((sol.x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!((sol.eq_duals[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn identity_system_feasible() {
        let a = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let out = lp_feasibility_with_certificate(&a, &[1.0, 1.0, 1.0]).unwrap();
        assert!(out.feasible);
        let x = out.solution.unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_obstruction_certificate() {
        // x = -1 with x >= 0 is infeasible; y = (-1) separates.
        let out = lp_feasibility_with_certificate(&[vec![1.0]], &[-1.0]).unwrap();
        assert!(!out.feasible);
        let y = out.certificate.unwrap();
        assert!(y[0] >= -1.0 - 1e-12);
        assert!(1.0 * y[0] >= -1e-9); // A^T y >= 0
        assert!(-y[0] <= -1e-9); // b·y < 0
    }

    #[test]
    fn ub_rows_and_duals() {
        // min -x s.t. x <= 3, x >= 0  ->  -3 with dual -1 on the ub row.
        let mut p = LpProblem::new(vec![-1.0]);
        p.ub_matrix = vec![vec![1.0]];
        p.ub_rhs = vec![3.0];
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert!((sol.value + 3.0).abs() < 1e-9);
                assert!((sol.x[0] - 3.0).abs() < 1e-9);
                assert!((sol.ub_duals[0] + 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn free_variable_split() {
        // min x s.t. x >= -5 free below? lower bound -inf, x + s = ... use
        // min x s.t. x = -2 (free var) -> -2.
        let mut p = LpProblem::new(vec![1.0]);
        p.eq_matrix = vec![vec![1.0]];
        p.eq_rhs = vec![-2.0];
        p.lower_bounds = vec![f64::NEG_INFINITY];
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert!((sol.value + 2.0).abs() < 1e-9);
                assert!((sol.x[0] + 2.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn finite_lower_bounds_shift() {
        // min x1 + x2 s.t. x1 + x2 >= has eq x1 - x2 = 0, x >= 1 -> value 2.
        let mut p = LpProblem::new(vec![1.0, 1.0]);
        p.eq_matrix = vec![vec![1.0, -1.0]];
        p.eq_rhs = vec![0.0];
        p.lower_bounds = vec![1.0, 1.0];
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert!((sol.value - 2.0).abs() < 1e-9, "value {}", sol.value);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let p = LpProblem::new(vec![-1.0]);
        assert!(matches!(solve_lp(&p).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_rows_tolerated() {
        // Duplicate equality rows must not break phase 2.
        let mut p = LpProblem::new(vec![1.0, 2.0]);
        p.eq_matrix = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        p.eq_rhs = vec![1.0, 1.0, 2.0];
        match solve_lp(&p).unwrap() {
            LpOutcome::Optimal(sol) => {
                assert!((sol.value - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn farkas_exclusivity_random_instances() {
        let mut rng = crate::simulate::rng::SplitMix64::new(11);
        for trial in 0..1000 {
            let m = 2 + rng.next_index(3);
            let n = 1 + rng.next_index(4);
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.next_gaussian()).collect())
                .collect();
            let b: Vec<f64> = (0..m).map(|_| rng.next_gaussian()).collect();
            let out = lp_feasibility_with_certificate(&a, &b).unwrap();
            assert!(out.solution.is_some() != out.certificate.is_some());
            if let Some(x) = &out.solution {
                for (i, row) in a.iter().enumerate() {
                    let r: f64 = row.iter().zip(x).map(|(c, v)| c * v).sum();
                    assert!((r - b[i]).abs() <= 1e-8, "trial {trial} residual");
                }
                assert!(x.iter().all(|&v| v >= -1e-12));
            }
            if let Some(y) = &out.certificate {
                for j in 0..n {
                    let col: f64 = (0..m).map(|i| a[i][j] * y[i]).sum();
                    assert!(col >= -1e-9, "trial {trial} col {j}: {col}");
                }
                let by: f64 = b.iter().zip(y).map(|(v, w)| v * w).sum();
                assert!(by <= -1e-9, "trial {trial} b·y = {by}");
            }
        }
    }
}
