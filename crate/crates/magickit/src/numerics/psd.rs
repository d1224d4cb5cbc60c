//! Linear minimization over mixture weights under a PSD-dominance constraint,
//! solved by stabilized cutting planes.
//!
//! The problem is
//!
//!   min  obj·d   s.t.  Σ dᵢ φᵢ − C ⪰ 0,  E d = f,  d ≥ 0
//!
//! Eigenvector cuts v†(Σ dᵢ φᵢ − C)v ≥ 0 build an outer approximation whose
//! LP value is a certified lower bound. Pure Kelley iteration stalls at
//! O(1/k) on smooth boundaries, so candidates come from a trust-region LP
//! around the incumbent, and every candidate is lifted to a feasible point by
//! adding the smallest multiple of the identity that restores positivity
//! (the identity is the uniform mixture of the enumerated states, so the
//! lift stays inside the cone and leaves the marginal equalities alone).
//! Termination: upper and lower bounds within 1e-7, or an exactly PSD
//! candidate (λ_min ≥ −1e-9).

use crate::error::{MagicError, Result};
use crate::numerics::lp::{solve_lp, LpOutcome, LpProblem, LpSolution};
use crate::numerics::matrix::{ComplexMatrix, C64};

/// Eigenvalue threshold below which a candidate still counts as feasible.
pub const PSD_CUT_TOL: f64 = 1e-9;
/// Relative gap at which the bounds bracket tightly enough to stop.
const GAP_TOL: f64 = 1e-7;
/// Cut budget; problems here have at most 16×16 PSD blocks.
pub const MAX_CUTS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct PsdMinProblem {
    /// Mixture components φᵢ (Hermitian, same dimension as the target).
    pub components: Vec<ComplexMatrix>,
    /// Dominated matrix C.
    pub target: ComplexMatrix,
    /// Objective coefficients over the weights.
    pub objective: Vec<f64>,
    /// Linear equality rows over the weights.
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PsdMinSolution {
    /// Certified value: within GAP_TOL of the optimum from above.
    pub value: f64,
    /// Feasible weights achieving `value` (λ_min of Σ dᵢ φᵢ − C ≥ −1e-12).
    pub weights: Vec<f64>,
    /// Cut directions with their multipliers from the final global LP; the
    /// dual PSD certificate is α = Σ yₖ vₖvₖ†.
    pub cuts: Vec<(Vec<C64>, f64)>,
    /// Equality multipliers from the final global LP.
    pub eq_duals: Vec<f64>,
    /// Minimum eigenvalue of the returned (lifted) combination.
    pub final_eig_min: f64,
    /// Certified lower bound from the cut outer-approximation.
    pub lower_bound: f64,
}

impl PsdMinSolution {
    /// Dual PSD matrix α = Σ yₖ vₖvₖ† assembled from the active cuts.
    pub fn dual_alpha(&self, dim: usize) -> ComplexMatrix {
        let mut alpha = ComplexMatrix::zeros(dim, dim);
        for (v, y) in &self.cuts {
            if *y == 0.0 {
                continue;
            }
            let p = ComplexMatrix::projector(v).scale_re(*y);
            alpha = alpha.add(&p);
        }
        alpha
    }
}

/// Negative eigenpairs of a candidate combination.
type NegativePairs = Vec<(f64, Vec<C64>)>;

struct CutPool {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    dirs: Vec<Vec<C64>>,
}

impl CutPool {
    fn add(&mut self, problem: &PsdMinProblem, v: Vec<C64>) {
        let row: Vec<f64> = problem
            .components
            .iter()
            .map(|phi| {
                let pv = phi.matvec(&v);
                -v.iter()
                    .zip(&pv)
                    .map(|(a, b)| (a.conj() * b).re)
                    .sum::<f64>()
            })
            .collect();
        let cv = problem.target.matvec(&v);
        let rhs = -v
            .iter()
            .zip(&cv)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        self.rows.push(row);
        self.rhs.push(rhs);
        self.dirs.push(v);
    }
}

pub fn minimize_over_psd_cone(problem: &PsdMinProblem) -> Result<PsdMinSolution> {
    let k = problem.components.len();
    if k == 0 || problem.objective.len() != k {
        return Err(MagicError::InvalidInput(
            "psd minimization needs components matching the objective".into(),
        ));
    }
    let dim = problem.target.rows();
    for phi in &problem.components {
        if phi.rows() != dim || phi.cols() != dim {
            return Err(MagicError::DimensionMismatch(
                "component dimension differs from target".into(),
            ));
        }
    }

    // Identity lift: s·I = s·(dim/m)·Σφᵢ when the enumeration is symmetric.
    // If the component family does not average to the identity, or an
    // equality row sees the lift, the lift is disabled and only the exact
    // λ_min ≥ −tol termination applies.
    let mut avg = ComplexMatrix::zeros(dim, dim);
    for phi in &problem.components {
        avg = avg.add(phi);
    }
    // one unit of identity adds lift_weight to every component weight
    let lift_weight = dim as f64 / k as f64;
    let lift_ok = avg
        .scale_re(lift_weight)
        .max_abs_diff(&ComplexMatrix::identity(dim))
        < 1e-10
        && problem
            .eq_matrix
            .iter()
            .all(|row| row.iter().sum::<f64>().abs() * lift_weight < 1e-10);
    let lift_cost: f64 = problem.objective.iter().sum::<f64>() * lift_weight;

    let mut pool = CutPool {
        rows: Vec::new(),
        rhs: Vec::new(),
        dirs: Vec::new(),
    };

    let eig = |d: &[f64]| -> Result<(f64, NegativePairs)> {
        let mut combo = problem.target.scale_re(-1.0);
        for (i, phi) in problem.components.iter().enumerate() {
            if d[i] != 0.0 {
                combo = combo.add(&phi.scale_re(d[i]));
            }
        }
        let (vals, vecs) = combo.eigh()?;
        let negatives = vals
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < -1e-12)
            .map(|(j, &l)| {
                let v: Vec<C64> = (0..dim).map(|i| vecs[(i, j)]).collect();
                (l, v)
            })
            .collect();
        Ok((vals[0], negatives))
    };

    let solve_global = |pool: &CutPool| -> Result<LpSolution> {
        let mut lp = LpProblem::new(problem.objective.clone());
        lp.eq_matrix = problem.eq_matrix.clone();
        lp.eq_rhs = problem.eq_rhs.clone();
        lp.ub_matrix = pool.rows.clone();
        lp.ub_rhs = pool.rhs.clone();
        let solved = match solve_lp(&lp) {
            Ok(s) => Ok(s),
            Err(MagicError::NumericalFailure(_)) => {
                // break degenerate ties with a graded sub-tolerance relaxation
                let mut relaxed = lp.clone();
                for (i, r) in relaxed.ub_rhs.iter_mut().enumerate() {
                    *r += 1e-10 * (i + 1) as f64;
                }
                solve_lp(&relaxed)
            }
            Err(e) => Err(e),
        };
        match solved? {
            LpOutcome::Optimal(s) => Ok(s),
            LpOutcome::Infeasible { .. } => Err(MagicError::NumericalFailure(
                "psd cutting-plane relaxation became infeasible".into(),
            )),
            LpOutcome::Unbounded => Err(MagicError::NumericalFailure(
                "psd cutting-plane relaxation is unbounded".into(),
            )),
        }
    };

    // incumbent (feasible) and bounds
    let mut best_value = f64::INFINITY;
    let mut best_weights: Vec<f64> = vec![0.0; k];
    let mut best_eig = 0.0f64;
    let mut lower = f64::NEG_INFINITY;
    let mut center: Option<Vec<f64>> = None;
    let mut radius = 1.0f64;

    while pool.dirs.len() < MAX_CUTS {
        // Global LP: lower bound and a candidate.
        let global = solve_global(&pool)?;
        lower = lower.max(global.value);
        let (lam_g, negs_g) = eig(&global.x)?;
        let mut improved = false;

        // Adding s·I = s·(dim/m)·Σφᵢ raises every weight by s·dim/m and the
        // objective by s·(dim/m)·Σᵢ obj_i.
        let mut consider = |d: &[f64], lam: f64| {
            let base: f64 = d.iter().zip(&problem.objective).map(|(x, c)| x * c).sum();
            if lam >= -PSD_CUT_TOL {
                if base < best_value {
                    best_value = base;
                    best_weights = d.to_vec();
                    best_eig = lam;
                    return true;
                }
            } else if lift_ok {
                let s = -lam;
                let cost = base + s * lift_cost;
                if cost < best_value {
                    let add = s * lift_weight;
                    best_weights = d.iter().map(|x| x + add).collect();
                    best_value = cost;
                    best_eig = 0.0; // exact by construction, re-verified below
                    return true;
                }
            }
            false
        };

        improved |= consider(&global.x, lam_g);
        for (_, v) in &negs_g {
            pool.add(problem, v.clone());
        }

        // Trust-region candidate around the incumbent center.
        if let Some(c) = &center {
            let mut lp = LpProblem::new(problem.objective.clone());
            lp.eq_matrix = problem.eq_matrix.clone();
            lp.eq_rhs = problem.eq_rhs.clone();
            lp.ub_matrix = pool.rows.clone();
            lp.ub_rhs = pool.rhs.clone();
            // box: d_i ≤ c_i + r, d_i ≥ max(0, c_i − r)
            for i in 0..k {
                let mut row = vec![0.0; k];
                row[i] = 1.0;
                lp.ub_matrix.push(row);
                lp.ub_rhs.push(c[i] + radius);
            }
            lp.lower_bounds = c.iter().map(|x| (x - radius).max(0.0)).collect();
            if let Ok(LpOutcome::Optimal(boxed)) = solve_lp(&lp) {
                let (lam_b, negs_b) = eig(&boxed.x)?;
                let was_better = consider(&boxed.x, lam_b);
                improved |= was_better;
                if was_better {
                    center = Some(boxed.x.clone());
                    radius = (radius * 1.6).min(4.0);
                } else {
                    radius = (radius * 0.5).max(1e-9);
                }
                for (_, v) in &negs_b {
                    pool.add(problem, v.clone());
                }
            } else {
                radius = (radius * 0.5).max(1e-9);
            }
        } else {
            center = Some(global.x.clone());
        }
        if improved {
            center = Some(best_weights.clone());
        }

        let scale = best_value.abs().max(1.0);
        let done_by_gap = best_value.is_finite() && best_value - lower <= GAP_TOL * scale;
        let done_exact = lam_g >= -PSD_CUT_TOL && best_value.is_finite();
        if done_by_gap || done_exact {
            // re-verify the returned point
            let (final_eig, _) = eig(&best_weights)?;
            if final_eig < -PSD_CUT_TOL {
                return Err(MagicError::NumericalFailure(format!(
                    "psd lift failed to restore positivity (λ_min = {final_eig:.3e})"
                )));
            }
            let cuts = pool
                .dirs
                .into_iter()
                .zip(global.ub_duals.iter().map(|y| -y)) // y ≤ 0 on ≤ rows
                .collect();
            return Ok(PsdMinSolution {
                value: best_value,
                weights: best_weights,
                cuts,
                eq_duals: global.eq_duals,
                final_eig_min: final_eig,
                lower_bound: lower,
            });
        }
    }
    Err(MagicError::NumericalFailure(format!(
        "cutting-plane cap {MAX_CUTS} reached with gap {:.3e}",
        best_value - lower
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_mixture_dominates_negative_target() {
        // C ⪯ 0 with no equalities: d = 0 is optimal.
        let comp = vec![ComplexMatrix::identity(2)];
        let problem = PsdMinProblem {
            components: comp,
            target: ComplexMatrix::identity(2).scale_re(-1.0),
            objective: vec![1.0],
            eq_matrix: vec![],
            eq_rhs: vec![],
        };
        let sol = minimize_over_psd_cone(&problem).unwrap();
        assert!(sol.value.abs() < 1e-7);
        assert!(sol.final_eig_min >= -PSD_CUT_TOL);
    }

    #[test]
    fn identity_target_needs_unit_weight() {
        // min d s.t. d·I ⪰ I  ->  d = 1.
        let problem = PsdMinProblem {
            components: vec![ComplexMatrix::identity(3)],
            target: ComplexMatrix::identity(3),
            objective: vec![1.0],
            eq_matrix: vec![],
            eq_rhs: vec![],
        };
        let sol = minimize_over_psd_cone(&problem).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6, "value {}", sol.value);
        assert!(sol.value >= sol.lower_bound - 1e-12);
    }

    #[test]
    fn rank_one_target_mixture() {
        // Components |0⟩⟨0|, |1⟩⟨1|, target diag(0.3, 0.7).
        let e0 = ComplexMatrix::projector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e1 = ComplexMatrix::projector(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let target = e0.scale_re(0.3).add(&e1.scale_re(0.7));
        let problem = PsdMinProblem {
            components: vec![e0, e1],
            target,
            objective: vec![1.0, 1.0],
            eq_matrix: vec![],
            eq_rhs: vec![],
        };
        let sol = minimize_over_psd_cone(&problem).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6);
        assert!((sol.weights[0] - 0.3).abs() < 1e-5);
        assert!((sol.weights[1] - 0.7).abs() < 1e-5);
    }
}
