//! Magic measures for states and channels: robustness, generalized
//! robustness (primal and dual), min-relative entropy, hypothesis-testing
//! relative entropy, the geometric measure, and the quasiprobability channel
//! decomposition they induce.
//!
//! Conventions: all logarithms are base 2 (bits). Robustness reports carry
//! both R (zero on free objects) and R_HC = 1 + 2R = ‖c‖₁ (the ℓ1-norm
//! convention quoted in the older literature) to prevent silent
//! off-by-one-convention errors.

use crate::channels::{is_cspo, ChoiOperator};
use crate::error::{MagicError, Result};
use crate::numerics::check_state;
#[cfg(test)]
use crate::numerics::fidelity;
use crate::numerics::lp::{solve_lp, LpOutcome, LpProblem};
use crate::numerics::matrix::{hermitian_basis, vech_real, ComplexMatrix, C64};
use crate::numerics::psd::{minimize_over_psd_cone, PsdMinProblem};
use crate::simulate::rng::SplitMix64;
use crate::stabilizer::{is_stabilizer_mixed, support_projector, StabilizerSet};

/// How well an optimizer is pinned down.
#[derive(Debug, Clone)]
pub enum Optimizer {
    None,
    /// Nonnegative mixture weights over the enumerated stabilizer states.
    Weights(Vec<f64>),
    /// Signed decomposition coefficients.
    SignedWeights(Vec<f64>),
    /// A matrix witness (dual solution, POVM element, or closest state).
    Matrix(ComplexMatrix),
    /// Index of the best enumerated pure stabilizer state.
    StateIndex(usize),
}

/// R is zero on free objects; R_HC = 1 + 2R is the ℓ1 form.
#[derive(Debug, Clone, Copy)]
pub struct RobustnessConvention {
    pub r: f64,
    pub r_hc: f64,
}

#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub name: &'static str,
    /// Bits for logarithmic quantities, plain magnitude otherwise.
    pub value: f64,
    pub convention: Option<RobustnessConvention>,
    pub optimizer: Optimizer,
}

/// Robustness of magic of a state via the ℓ1 linear program: the minimum of
/// ‖c‖₁ over signed stabilizer decompositions Σ cᵢ φᵢ = ρ gives
/// R = (‖c‖₁ − 1)/2.
pub fn robustness_state(rho: &ComplexMatrix, set: &StabilizerSet) -> Result<MonotoneReport> {
    check_state(rho)?;
    if rho.rows() != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "state does not match the stabilizer set".into(),
        ));
    }
    let m = set.len();
    let d = set.dim();
    let cols: Vec<Vec<f64>> = set.densities().iter().map(vech_real).collect();
    let b = vech_real(rho);
    // c = p - m with p, m >= 0; minimize Σ(p + m).
    let mut lp = LpProblem::new(vec![1.0; 2 * m]);
    lp.eq_matrix = (0..d * d)
        .map(|r| {
            let mut row = Vec::with_capacity(2 * m);
            for item in cols.iter() {
                row.push(item[r]);
            }
            for item in cols.iter() {
                row.push(-item[r]);
            }
            row
        })
        .collect();
    lp.eq_rhs = b;
    match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => {
            let l1 = sol.value;
            let signed: Vec<f64> = (0..m).map(|i| sol.x[i] - sol.x[m + i]).collect();
            let r = ((l1 - 1.0) / 2.0).max(0.0);
            Ok(MonotoneReport {
                name: "robustness",
                value: r,
                convention: Some(RobustnessConvention { r, r_hc: l1 }),
                optimizer: Optimizer::SignedWeights(signed),
            })
        }
        _ => Err(MagicError::NumericalFailure(
            "robustness LP did not reach optimality".into(),
        )),
    }
}

/// Channel robustness with its signed CSPO decomposition.
#[derive(Debug, Clone)]
pub struct ChannelRobustness {
    pub report: MonotoneReport,
    pub r: f64,
    /// log₂(1 + R) in bits.
    pub lr: f64,
    /// Free channel E₊ with J^N = (1+R)·J⁺ − R·J⁻.
    pub plus: ChoiOperator,
    /// Free channel E₋ (present when R > 0).
    pub minus: Option<ChoiOperator>,
}

/// Channel robustness of magic: minimize Σaᵢ/|A₀| over
/// J^N + Σaᵢφᵢ = Σbᵢφᵢ with identity-A₀-marginal constraints on both
/// mixtures.
pub fn robustness_channel(
    channel: &ChoiOperator,
    set: &StabilizerSet,
) -> Result<ChannelRobustness> {
    let d = channel.dim_in() * channel.dim_out();
    if d != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "channel does not match the stabilizer set".into(),
        ));
    }
    let m = set.len();
    let d_in = channel.dim_in();
    let phis = set.densities();
    let cols: Vec<Vec<f64>> = phis.iter().map(vech_real).collect();
    let j_vec = vech_real(channel.matrix());

    // Marginal rows: vech over A₀ of Tr_{A₁}[φᵢ] − I/|A₀|.
    let marg_cols: Vec<Vec<f64>> = phis
        .iter()
        .map(|phi| {
            let marg = phi.partial_trace(&[d_in, channel.dim_out()], &[true, false]);
            let target = ComplexMatrix::identity(d_in).scale_re(1.0 / d_in as f64);
            vech_real(&marg.sub(&target))
        })
        .collect();

    let n_vars = 2 * m; // a then b
    let mut obj = vec![0.0; n_vars];
    for item in obj.iter_mut().take(m) {
        *item = 1.0 / d_in as f64;
    }
    let mut lp = LpProblem::new(obj);
    // J + Σ a φ = Σ b φ  (d² rows)
    for r in 0..d * d {
        let mut row = vec![0.0; n_vars];
        for i in 0..m {
            row[i] = cols[i][r];
            row[m + i] = -cols[i][r];
        }
        lp.eq_matrix.push(row);
        lp.eq_rhs.push(-j_vec[r]);
    }
    // marginal conditions on both mixtures
    let d0sq = d_in * d_in;
    for r in 0..d0sq {
        let mut row_a = vec![0.0; n_vars];
        let mut row_b = vec![0.0; n_vars];
        for i in 0..m {
            row_a[i] = marg_cols[i][r];
            row_b[m + i] = marg_cols[i][r];
        }
        lp.eq_matrix.push(row_a);
        lp.eq_rhs.push(0.0);
        lp.eq_matrix.push(row_b);
        lp.eq_rhs.push(0.0);
    }

    match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => {
            let r = sol.value.max(0.0);
            let a = &sol.x[..m];
            let b = &sol.x[m..];
            let mut plus_j = channel.matrix().clone();
            let mut minus_j = ComplexMatrix::zeros(d, d);
            for i in 0..m {
                if a[i] > 0.0 {
                    plus_j = plus_j.add(&phis[i].scale_re(a[i]));
                    minus_j = minus_j.add(&phis[i].scale_re(a[i]));
                }
            }
            let _ = b;
            let plus = ChoiOperator::from_parts_unchecked(
                plus_j.scale_re(1.0 / (1.0 + r)),
                channel.dim_in(),
                channel.dim_out(),
            );
            let minus = if r > 1e-12 {
                Some(ChoiOperator::from_parts_unchecked(
                    minus_j.scale_re(1.0 / r),
                    channel.dim_in(),
                    channel.dim_out(),
                ))
            } else {
                None
            };
            let lr = (1.0 + r).log2();
            Ok(ChannelRobustness {
                report: MonotoneReport {
                    name: "channel-robustness",
                    value: r,
                    convention: Some(RobustnessConvention {
                        r,
                        r_hc: 1.0 + 2.0 * r,
                    }),
                    optimizer: Optimizer::SignedWeights(sol.x.clone()),
                },
                r,
                lr,
                plus,
                minus,
            })
        }
        _ => Err(MagicError::NumericalFailure(
            "channel robustness LP did not reach optimality".into(),
        )),
    }
}

/// Generalized robustness of a state: the least t with tσ ⪰ ρ for σ in the
/// stabilizer polytope, via cutting planes. Reported value is LR_g = log₂ t.
pub fn generalized_robustness_state(
    rho: &ComplexMatrix,
    set: &StabilizerSet,
) -> Result<MonotoneReport> {
    check_state(rho)?;
    if rho.rows() != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "state does not match the stabilizer set".into(),
        ));
    }
    let problem = PsdMinProblem {
        components: set.densities().to_vec(),
        target: rho.clone(),
        objective: vec![1.0; set.len()],
        eq_matrix: vec![],
        eq_rhs: vec![],
    };
    let sol = minimize_over_psd_cone(&problem)?;
    let t = sol.value.max(1.0);
    Ok(MonotoneReport {
        name: "generalized-robustness",
        value: t.log2(),
        convention: Some(RobustnessConvention {
            r: t - 1.0,
            r_hc: t,
        }),
        optimizer: Optimizer::Weights(sol.weights),
    })
}

/// Generalized robustness of a channel with the dual certificate evaluated on
/// the primal's multipliers.
#[derive(Debug, Clone)]
pub struct ChannelGenRobustness {
    pub report: MonotoneReport,
    /// λ = 2^{LR_g} ≥ 1.
    pub lambda: f64,
    /// ω = Σ dᵢ φᵢ weights of the primal optimizer.
    pub omega_weights: Vec<f64>,
    /// Dual variables (α ⪰ 0 on A, β Hermitian on A₀).
    pub dual_alpha: ComplexMatrix,
    pub dual_beta: ComplexMatrix,
    /// Dual objective Tr[α J^N]; |λ − dual_value| bounds the gap.
    pub dual_value: f64,
    /// Worst violation of the dual feasibility constraints (≤ 0 when exactly
    /// feasible).
    pub dual_feasibility: f64,
}

/// Log generalized robustness of a channel: minimize Tr[ω]/|A₀| subject to
/// ω ⪰ J^N, ω_{A₀} ∝ I, ω in the stabilizer cone.
pub fn log_generalized_robustness_channel(
    channel: &ChoiOperator,
    set: &StabilizerSet,
) -> Result<ChannelGenRobustness> {
    let d = channel.dim_in() * channel.dim_out();
    if d != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "channel does not match the stabilizer set".into(),
        ));
    }
    let d_in = channel.dim_in();
    let d_out = channel.dim_out();
    let phis = set.densities();
    let m = phis.len();

    // Equality rows: ⟨E_p, Tr_{A₁}ω − Tr[ω] I/|A₀|⟩ = 0 over the orthonormal
    // Hermitian basis of A₀.
    let basis = hermitian_basis(d_in);
    let mut eq_matrix = Vec::with_capacity(basis.len());
    for e_p in &basis {
        let mut row = Vec::with_capacity(m);
        let scaled_tr = e_p.trace().re / d_in as f64;
        for phi in phis {
            let marg = phi.partial_trace(&[d_in, d_out], &[true, false]);
            row.push(e_p.trace_product(&marg).re - scaled_tr);
        }
        eq_matrix.push(row);
    }
    let eq_rhs = vec![0.0; basis.len()];

    let problem = PsdMinProblem {
        components: phis.to_vec(),
        target: channel.matrix().clone(),
        objective: vec![1.0 / d_in as f64; m],
        eq_matrix,
        eq_rhs,
    };
    let sol = minimize_over_psd_cone(&problem)?;
    let lambda = sol.value.max(1.0);

    // Dual reconstruction: α from the cut multipliers, β from the equality
    // multipliers in the same Hermitian basis.
    let mut dual_alpha = sol.dual_alpha(d);
    let mut dual_beta = ComplexMatrix::zeros(d_in, d_in);
    for (p, e_p) in basis.iter().enumerate() {
        if sol.eq_duals[p] != 0.0 {
            dual_beta = dual_beta.add(&e_p.scale_re(sol.eq_duals[p]));
        }
    }

    // Feasibility requires Tr[φᵢ(α + β⊗I − Tr[β] I/|A₀|)] ≤ 1/|A₀| for every
    // enumerated φᵢ. Simplex roundoff can leave a ~1e-7 violation; the
    // constraint is linear in (α, β), so scaling both by
    // (1/|A₀|)/(1/|A₀| + v) restores exact feasibility and costs O(v) in the
    // certified dual value.
    let feasibility_worst = |alpha: &ComplexMatrix, beta: &ComplexMatrix| -> f64 {
        let witness = alpha
            .add(&beta.kron(&ComplexMatrix::identity(d_out)))
            .sub(&ComplexMatrix::identity(d).scale_re(beta.trace().re / d_in as f64));
        phis.iter()
            .map(|phi| witness.trace_product(phi).re - 1.0 / d_in as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut worst = feasibility_worst(&dual_alpha, &dual_beta);
    if worst > 0.0 {
        let bound = 1.0 / d_in as f64;
        let scale = bound / (bound + worst);
        dual_alpha = dual_alpha.scale_re(scale);
        dual_beta = dual_beta.scale_re(scale);
        worst = feasibility_worst(&dual_alpha, &dual_beta);
    }
    let dual_value = dual_alpha.trace_product(channel.matrix()).re;

    Ok(ChannelGenRobustness {
        report: MonotoneReport {
            name: "log-generalized-robustness-channel",
            value: lambda.log2(),
            convention: Some(RobustnessConvention {
                r: lambda - 1.0,
                r_hc: lambda,
            }),
            optimizer: Optimizer::Weights(sol.weights.clone()),
        },
        lambda,
        omega_weights: sol.weights,
        dual_alpha,
        dual_beta,
        dual_value,
        dual_feasibility: worst,
    })
}

/// Min-relative entropy of magic: −log₂ of the best overlap between the
/// support projector and a pure stabilizer state.
pub fn dmin_state(rho: &ComplexMatrix, set: &StabilizerSet) -> Result<MonotoneReport> {
    check_state(rho)?;
    if rho.rows() != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "state does not match the stabilizer set".into(),
        ));
    }
    let p = support_projector(rho)?;
    let (best_idx, best) = set
        .densities()
        .iter()
        .enumerate()
        .map(|(i, phi)| (i, p.trace_product(phi).re))
        .fold((0, f64::NEG_INFINITY), |acc, cur| {
            if cur.1 > acc.1 {
                cur
            } else {
                acc
            }
        });
    let value = (-best.min(1.0).log2()).max(0.0);
    Ok(MonotoneReport {
        name: "dmin",
        value,
        convention: None,
        optimizer: Optimizer::StateIndex(best_idx),
    })
}

/// Hypothesis-testing (operator smoothed) min-relative entropy of magic.
///
/// Solves min t s.t. Tr[Eφᵢ] ≤ t for every enumerated φᵢ, 0 ⪯ E ⪯ I and
/// Tr[Eρ] ≥ 1−ε, by bisection on t with a Dykstra projection feasibility
/// step. Returns −log₂ t and the optimal POVM element.
pub fn dmin_eps_state(
    rho: &ComplexMatrix,
    set: &StabilizerSet,
    eps: f64,
) -> Result<MonotoneReport> {
    check_state(rho)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(MagicError::InvalidInput(format!(
            "epsilon must lie in [0, 1), got {eps}"
        )));
    }
    if rho.rows() != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "state does not match the stabilizer set".into(),
        ));
    }

    let p_rho = support_projector(rho)?;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64; // E = I is always feasible at t = 1
    let mut best_e = ComplexMatrix::identity(rho.rows());
    let mut steps = 0usize;
    while hi - lo > 1e-7 {
        steps += 1;
        if steps > 1000 {
            return Err(MagicError::NoConvergence(1000));
        }
        let mid = 0.5 * (lo + hi);
        match dykstra_feasible(rho, set, eps, mid, &p_rho)? {
            Some(e) => {
                hi = mid;
                best_e = e;
            }
            None => lo = mid,
        }
    }
    Ok(MonotoneReport {
        name: "dmin-eps",
        value: (-hi.log2()).max(0.0),
        convention: None,
        optimizer: Optimizer::Matrix(best_e),
    })
}

/// Dykstra alternating projections onto {0 ⪯ E ⪯ I} ∩ {Tr[Eρ] ≥ 1−ε} ∩
/// {Tr[Eφᵢ] ≤ t}; returns a feasible point or None.
fn dykstra_feasible(
    rho: &ComplexMatrix,
    set: &StabilizerSet,
    eps: f64,
    t: f64,
    start: &ComplexMatrix,
) -> Result<Option<ComplexMatrix>> {
    const TOL: f64 = 1e-7;
    const MAX_CYCLES: usize = 600;
    let d = rho.rows();
    let phis = set.densities();
    let n_sets = 2 + phis.len();
    let mut x = start.clone();
    let mut corrections: Vec<ComplexMatrix> = vec![ComplexMatrix::zeros(d, d); n_sets];

    let rho_norm2 = rho.trace_product(rho).re;
    let phi_norm2 = 1.0; // pure states have unit Frobenius norm

    for _cycle in 0..MAX_CYCLES {
        let mut moved: f64 = 0.0;
        for k in 0..n_sets {
            let y = x.add(&corrections[k]);
            let projected = match k {
                0 => {
                    // spectral box 0 ⪯ E ⪯ I
                    let (vals, vecs) = y.eigh()?;
                    let mut out = ComplexMatrix::zeros(d, d);
                    for j in 0..d {
                        let l = vals[j].clamp(0.0, 1.0);
                        if l == 0.0 {
                            continue;
                        }
                        let v: Vec<C64> = (0..d).map(|i| vecs[(i, j)]).collect();
                        out = out.add(&ComplexMatrix::projector(&v).scale_re(l));
                    }
                    out
                }
                1 => {
                    // Tr[Eρ] ≥ 1−ε
                    let val = y.trace_product(rho).re;
                    if val >= 1.0 - eps {
                        y.clone()
                    } else {
                        y.add(&rho.scale_re((1.0 - eps - val) / rho_norm2))
                    }
                }
                _ => {
                    // Tr[Eφ] ≤ t
                    let phi = &phis[k - 2];
                    let val = y.trace_product(phi).re;
                    if val <= t {
                        y.clone()
                    } else {
                        y.sub(&phi.scale_re((val - t) / phi_norm2))
                    }
                }
            };
            corrections[k] = y.sub(&projected);
            moved = moved.max(projected.max_abs_diff(&x));
            x = projected;
        }
        if moved < 1e-9 {
            break;
        }
    }

    // Accept when every constraint holds within tolerance.
    let (lmin, _) = x.eig_min()?;
    if lmin < -TOL {
        return Ok(None);
    }
    let (vals, _) = x.eigh()?;
    if vals[d - 1] > 1.0 + TOL {
        return Ok(None);
    }
    if x.trace_product(rho).re < 1.0 - eps - TOL {
        return Ok(None);
    }
    for phi in phis {
        if x.trace_product(phi).re > t + TOL {
            return Ok(None);
        }
    }
    Ok(Some(x))
}

/// Certified lower bound and heuristic upper estimate of the channel
/// min-relative entropy of magic.
#[derive(Debug, Clone)]
pub struct DminChannelBracket {
    /// −log₂ max over the CSPO Choi hull of Tr[P_{J̃} J̃^E]; certified since
    /// the channel quantity takes a supremum over inputs.
    pub lower: f64,
    /// Alternating local search over inputs for the hull-optimal free
    /// channel; not certified.
    pub upper_estimate: f64,
}

pub fn dmin_channel_bracket(
    channel: &ChoiOperator,
    set: &StabilizerSet,
    seed: u64,
) -> Result<DminChannelBracket> {
    let d = channel.dim_in() * channel.dim_out();
    if d != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "channel does not match the stabilizer set".into(),
        ));
    }
    // Free channels have the bracket collapse to zero.
    if is_cspo(channel, set)?.inside() {
        return Ok(DminChannelBracket {
            lower: 0.0,
            upper_estimate: 0.0,
        });
    }

    let d_in = channel.dim_in();
    let d_out = channel.dim_out();
    let phis = set.densities();
    let m = phis.len();
    let jn_norm = channel.normalized();
    let p = support_projector(&jn_norm)?;

    // LP: maximize Σ cᵢ Tr[Pφᵢ] over {c ≥ 0, Σcᵢ Tr_{A₁}φᵢ = I/|A₀|}.
    let mut lp = LpProblem::new(phis.iter().map(|phi| -p.trace_product(phi).re).collect());
    let target = ComplexMatrix::identity(d_in).scale_re(1.0 / d_in as f64);
    for r in 0..d_in * d_in {
        let mut row = Vec::with_capacity(m);
        for phi in phis {
            let marg = phi.partial_trace(&[d_in, d_out], &[true, false]);
            row.push(vech_real(&marg)[r]);
        }
        lp.eq_matrix.push(row);
        lp.eq_rhs.push(vech_real(&target)[r]);
    }
    let (best_overlap, weights) = match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => ((-sol.value).clamp(0.0, 1.0), sol.x),
        _ => {
            return Err(MagicError::NumericalFailure(
                "channel dmin hull LP did not reach optimality".into(),
            ))
        }
    };
    let lower = (-best_overlap.max(1e-300).log2()).max(0.0);

    // Heuristic upper estimate: fix the hull-optimal free channel E* and
    // locally maximize D_min(N(ψ)‖E*(ψ)) over pure inputs ψ on R₀A₀ with
    // |R₀| = |A₀|, starting from the maximally entangled input.
    let mut estar_j = ComplexMatrix::zeros(d, d);
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            estar_j = estar_j.add(&phis[i].scale_re(*w * d_in as f64));
        }
    }
    let estar = ChoiOperator::from_parts_unchecked(estar_j, d_in, d_out);

    let eval = |psi: &[C64]| -> Result<f64> {
        let input = ComplexMatrix::projector(psi);
        let n_out = apply_on_second_leg(&input, d_in, channel)?;
        let e_out = apply_on_second_leg(&input, d_in, &estar)?;
        let p_out = support_projector(&n_out)?;
        let overlap = p_out.trace_product(&e_out).re.clamp(1e-300, 1.0);
        Ok(-overlap.log2())
    };

    let dim_ref = d_in * d_in;
    let mut best = {
        // maximally entangled start
        let mut v = vec![C64::new(0.0, 0.0); dim_ref];
        let s = 1.0 / (d_in as f64).sqrt();
        for i in 0..d_in {
            v[i * d_in + i] = C64::new(s, 0.0);
        }
        eval(&v)?
    };
    let mut rng = SplitMix64::new(seed);
    for _start in 0..20 {
        let mut v: Vec<C64> = (0..dim_ref)
            .map(|_| C64::new(rng.next_gaussian(), rng.next_gaussian()))
            .collect();
        normalize(&mut v);
        let mut current = eval(&v)?;
        let mut scale = 0.5;
        for _step in 0..60 {
            let mut cand = v.clone();
            for z in cand.iter_mut() {
                *z += C64::new(rng.next_gaussian(), rng.next_gaussian()) * scale;
            }
            normalize(&mut cand);
            let val = eval(&cand)?;
            if val > current {
                current = val;
                v = cand;
            } else {
                scale *= 0.9;
            }
        }
        best = best.max(current);
    }

    Ok(DminChannelBracket {
        lower,
        upper_estimate: best.max(lower),
    })
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// (id ⊗ N)(X) for X on R₀ ⊗ A₀ with |R₀| = dims given by X.
fn apply_on_second_leg(
    x: &ComplexMatrix,
    d_in: usize,
    channel: &ChoiOperator,
) -> Result<ComplexMatrix> {
    let d_ref = x.rows() / d_in;
    let d_out = channel.dim_out();
    let xt = x
        .partial_transpose(&[d_ref, d_in], &[false, true])
        .kron(&ComplexMatrix::identity(d_out));
    let z = ComplexMatrix::identity(d_ref).kron(channel.matrix());
    Ok(z.matmul(&xt)
        .partial_trace(&[d_ref, d_in, d_out], &[true, false, true]))
}

/// Geometric measure of magic: 1 − max over the stabilizer polytope of the
/// squared fidelity.
///
/// Pure inputs reduce to enumeration. Free inputs short-circuit to zero via
/// polytope membership. Mixed qubit states use the closed-form qubit
/// fidelity over the octahedron (projected concave ascent), which is what
/// the monotonicity suite's 1e-6 slack requires; larger mixed states run
/// Frank-Wolfe with the enumerated-state linear oracle (tolerance 1e-5, cap
/// 10⁴ iterations).
pub fn geometric_measure(rho: &ComplexMatrix, set: &StabilizerSet) -> Result<MonotoneReport> {
    check_state(rho)?;
    if rho.rows() != set.dim() {
        return Err(MagicError::DimensionMismatch(
            "state does not match the stabilizer set".into(),
        ));
    }
    let (vals, _) = rho.eigh()?;
    let is_pure = vals[rho.rows() - 1] > 1.0 - 1e-9;
    if is_pure {
        let (best_idx, best) = set
            .densities()
            .iter()
            .enumerate()
            .map(|(i, phi)| (i, rho.trace_product(phi).re))
            .fold((0, f64::NEG_INFINITY), |acc, cur| {
                if cur.1 > acc.1 {
                    cur
                } else {
                    acc
                }
            });
        return Ok(MonotoneReport {
            name: "geometric",
            value: (1.0 - best).max(0.0),
            convention: None,
            optimizer: Optimizer::StateIndex(best_idx),
        });
    }
    if is_stabilizer_mixed(rho, set)?.inside() {
        return Ok(MonotoneReport {
            name: "geometric",
            value: 0.0,
            convention: None,
            optimizer: Optimizer::Matrix(rho.clone()),
        });
    }
    if rho.rows() == 2 {
        let (value, sigma) = geometric_qubit_mixed(rho)?;
        return Ok(MonotoneReport {
            name: "geometric",
            value,
            convention: None,
            optimizer: Optimizer::Matrix(sigma),
        });
    }
    geometric_frank_wolfe(rho, set)
}

/// Qubit closed form: F²(ρ, σ) = Tr[ρσ] + 2√(det ρ det σ), maximized over the
/// octahedron by projected gradient ascent (the objective is concave and the
/// optimum is interior to the Bloch ball whenever det ρ > 0).
fn geometric_qubit_mixed(rho: &ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let r = crate::stabilizer::bloch_vector(rho)?;
    let det_rho = ((1.0 - (r[0] * r[0] + r[1] * r[1] + r[2] * r[2])) / 4.0).max(0.0);

    let f2 = |s: &[f64; 3]| -> f64 {
        let dot = r[0] * s[0] + r[1] * s[1] + r[2] * s[2];
        let det_sigma = ((1.0 - (s[0] * s[0] + s[1] * s[1] + s[2] * s[2])) / 4.0).max(0.0);
        (1.0 + dot) / 2.0 + 2.0 * (det_rho * det_sigma).sqrt()
    };

    let mut s = project_l1_ball(&[r[0], r[1], r[2]]);
    let mut best = f2(&s);
    let mut step = 0.25;
    for _ in 0..10_000 {
        let norm2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
        let root = (det_rho * (1.0 - norm2).max(1e-300) / 4.0).sqrt();
        let coeff = if root > 0.0 {
            det_rho / (2.0 * root)
        } else {
            0.0
        };
        let grad = [
            r[0] / 2.0 - coeff * s[0],
            r[1] / 2.0 - coeff * s[1],
            r[2] / 2.0 - coeff * s[2],
        ];
        let cand = project_l1_ball(&[
            s[0] + step * grad[0],
            s[1] + step * grad[1],
            s[2] + step * grad[2],
        ]);
        let val = f2(&cand);
        if val > best + 1e-15 {
            let moved = (cand[0] - s[0]).abs() + (cand[1] - s[1]).abs() + (cand[2] - s[2]).abs();
            s = cand;
            best = val;
            if moved < 1e-12 && step < 1e-6 {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    let sigma = crate::stabilizer::from_bloch(s)?;
    Ok(((1.0 - best).max(0.0), sigma))
}

/// Euclidean projection onto the unit ℓ1 ball.
fn project_l1_ball(v: &[f64; 3]) -> [f64; 3] {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= 1.0 {
        return *v;
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        acc += m;
        let candidate = (acc - 1.0) / (k + 1) as f64;
        if m > candidate {
            theta = candidate;
        }
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = v[i].signum() * (v[i].abs() - theta).max(0.0);
    }
    out
}

fn geometric_frank_wolfe(rho: &ComplexMatrix, set: &StabilizerSet) -> Result<MonotoneReport> {
    const TOL: f64 = 1e-5;
    const MAX_ITERS: usize = 10_000;
    let d = rho.rows();
    let sqrt_rho = rho.sqrt_psd()?;
    let mut sigma = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);

    let fidelity_grad = |sigma: &ComplexMatrix| -> Result<(f64, ComplexMatrix)> {
        // F(σ) = Tr√(√ρ σ √ρ); ∇F = ½ √ρ M^{-1/2} √ρ on the support of M.
        let m = sqrt_rho.matmul(sigma).matmul(&sqrt_rho);
        let (vals, vecs) = m.eigh()?;
        let top = vals.iter().fold(0.0f64, |a, v| a.max(*v));
        let floor = (1e-13 * top).max(1e-300);
        let mut f = 0.0;
        let mut inv_sqrt = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            if vals[k] > floor {
                f += vals[k].sqrt();
                let v: Vec<C64> = (0..d).map(|i| vecs[(i, k)]).collect();
                inv_sqrt =
                    inv_sqrt.add(&ComplexMatrix::projector(&v).scale_re(1.0 / vals[k].sqrt()));
            }
        }
        let grad = sqrt_rho.matmul(&inv_sqrt).matmul(&sqrt_rho).scale_re(0.5);
        Ok((f, grad))
    };

    let mut f_value = 0.0;
    let mut converged = false;
    for _iter in 0..MAX_ITERS {
        let (f, grad) = fidelity_grad(&sigma)?;
        f_value = f;
        // linear minimization oracle: best pure stabilizer state against the
        // fidelity gradient
        let (mut best_idx, mut best_score) = (0usize, f64::NEG_INFINITY);
        for (i, phi) in set.densities().iter().enumerate() {
            let s = grad.trace_product(phi).re;
            if s > best_score {
                best_score = s;
                best_idx = i;
            }
        }
        let gap = best_score - grad.trace_product(&sigma).re;
        if gap <= TOL {
            converged = true;
            break;
        }
        let phi = &set.densities()[best_idx];
        // golden-section line search on γ ∈ [0, 1]
        let eval = |gamma: f64| -> Result<f64> {
            let cand = sigma.scale_re(1.0 - gamma).add(&phi.scale_re(gamma));
            let m = sqrt_rho.matmul(&cand).matmul(&sqrt_rho);
            let (vals, _) = m.eigh()?;
            let top = vals.iter().fold(0.0f64, |a, v| a.max(*v));
            let floor = 1e-13 * top;
            Ok(vals.iter().filter(|&&v| v > floor).map(|v| v.sqrt()).sum())
        };
        let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut c1 = b - inv_phi * (b - a);
        let mut c2 = a + inv_phi * (b - a);
        let mut f1 = eval(c1)?;
        let mut f2v = eval(c2)?;
        for _ in 0..40 {
            if f1 < f2v {
                a = c1;
                c1 = c2;
                f1 = f2v;
                c2 = a + inv_phi * (b - a);
                f2v = eval(c2)?;
            } else {
                b = c2;
                c2 = c1;
                f2v = f1;
                c1 = b - inv_phi * (b - a);
                f1 = eval(c1)?;
            }
        }
        let gamma = 0.5 * (a + b);
        sigma = sigma.scale_re(1.0 - gamma).add(&phi.scale_re(gamma));
    }
    if !converged {
        return Err(MagicError::NoConvergence(MAX_ITERS));
    }
    Ok(MonotoneReport {
        name: "geometric",
        value: (1.0 - f_value * f_value).max(0.0),
        convention: None,
        optimizer: Optimizer::Matrix(sigma),
    })
}

/// Signed mixture of free objects reconstructing a channel:
/// N = λ·positive − (λ−1)·negative with positive a CSPO and negative CPTP.
#[derive(Debug, Clone)]
pub struct QuasiDecomposition {
    pub lambda: f64,
    pub positive: ChoiOperator,
    pub negative: ChoiOperator,
    /// ℓ1 weight 2λ − 1 of the signed mixture.
    pub l1: f64,
}

const DECOMP_TOL: f64 = 1e-7;

/// Quasiprobability decomposition from the generalized-robustness optimizer.
pub fn quasi_decompose_channel(
    channel: &ChoiOperator,
    set: &StabilizerSet,
) -> Result<QuasiDecomposition> {
    let gen = log_generalized_robustness_channel(channel, set)?;
    let lambda = gen.lambda;
    if lambda <= 1.0 + 1e-9 {
        return Ok(QuasiDecomposition {
            lambda: 1.0,
            positive: channel.clone(),
            negative: channel.clone(),
            l1: 1.0,
        });
    }
    let d = channel.dim_in() * channel.dim_out();
    let phis = set.densities();
    let mut omega = ComplexMatrix::zeros(d, d);
    for (i, w) in gen.omega_weights.iter().enumerate() {
        if *w > 0.0 {
            omega = omega.add(&phis[i].scale_re(*w));
        }
    }
    // positive = ω/λ (trace |A₀|, TP, stabilizer Choi by construction)
    let positive_j = omega.scale_re(1.0 / lambda);
    let negative_j = positive_j
        .scale_re(lambda)
        .sub(channel.matrix())
        .scale_re(1.0 / (lambda - 1.0));

    // The negative part must be CPTP within tolerance.
    let scale = negative_j.max_abs().max(1.0);
    let (lmin, _) = negative_j.eig_min()?;
    if lmin < -DECOMP_TOL * scale {
        return Err(MagicError::NotCptpResidual(-lmin));
    }
    let marg = negative_j.partial_trace(&[channel.dim_in(), channel.dim_out()], &[true, false]);
    let tp_dev = marg.max_abs_diff(&ComplexMatrix::identity(channel.dim_in()));
    if tp_dev > DECOMP_TOL {
        return Err(MagicError::NotCptpResidual(tp_dev));
    }
    // reconstruction residual
    let recon = positive_j
        .scale_re(lambda)
        .sub(&negative_j.scale_re(lambda - 1.0));
    let residual = recon.max_abs_diff(channel.matrix());
    if residual > DECOMP_TOL {
        return Err(MagicError::NotCptpResidual(residual));
    }

    Ok(QuasiDecomposition {
        lambda,
        positive: ChoiOperator::from_parts_unchecked(
            positive_j,
            channel.dim_in(),
            channel.dim_out(),
        ),
        negative: ChoiOperator::from_parts_unchecked(
            negative_j,
            channel.dim_in(),
            channel.dim_out(),
        ),
        l1: 2.0 * lambda - 1.0,
    })
}
