//! Dense complex linear algebra and the two convex-solver primitives (LP with
//! certificates, PSD-constrained minimization by cutting planes) that every
//! other module consumes.

pub mod lp;
pub mod matrix;
pub mod psd;

pub use lp::{
    lp_feasibility_with_certificate, solve_lp, FeasibilityOutcome, LpOutcome, LpProblem, LpSolution,
};
pub use matrix::{hermitian_basis, vech_real, vech_real_inverse, ComplexMatrix, C64};
pub use psd::{minimize_over_psd_cone, PsdMinProblem, PsdMinSolution};

use crate::error::{MagicError, Result};

/// Minimum eigenpair of a Hermitian matrix; errs on non-Hermitian input.
pub fn eig_min(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    m.eig_min()
}

/// Uhlmann fidelity F(ρ, σ) = Tr√(√σ ρ √σ) of two density operators.
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    check_state(rho)?;
    check_state(sigma)?;
    if rho.rows() != sigma.rows() {
        return Err(MagicError::DimensionMismatch(
            "fidelity of states with different dimensions".into(),
        ));
    }
    let sqrt_sigma = sigma.sqrt_psd()?;
    let inner = sqrt_sigma.matmul(rho).matmul(&sqrt_sigma);
    let (vals, _) = inner.eigh()?;
    // Eigenvalues at rounding-noise level would contribute √noise ≈ 1e-8
    // after the square root; clamp them relative to the spectral radius.
    let top = vals.iter().fold(0.0f64, |m, v| m.max(*v));
    let floor = 1e-13 * top;
    Ok(vals
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .sum::<f64>()
        .min(1.0))
}

/// Validate unit trace and positive semidefiniteness of a density operator.
pub fn check_state(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(MagicError::NotAState("not square".into()));
    }
    rho.check_hermitian(1e-8)
        .map_err(|_| MagicError::NotAState("not Hermitian".into()))?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(MagicError::NotAState(format!("trace {tr}")));
    }
    let (vals, _) = rho.eigh()?;
    if vals[0] < -1e-9 {
        return Err(MagicError::NotAState(format!(
            "negative eigenvalue {:.3e}",
            vals[0]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pure(v: &[C64]) -> ComplexMatrix {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n: Vec<C64> = v.iter().map(|z| z / norm).collect();
        ComplexMatrix::projector(&n)
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let rho = pure(&[c(1.0, 0.0), c(0.3, 0.4)]);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_of_orthogonal_states_is_zero() {
        let zero = pure(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let one = pure(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(fidelity(&zero, &one).unwrap() < 1e-9);
    }

    #[test]
    fn fidelity_pure_vs_maximally_mixed() {
        // F(ψ, I/2) = √(⟨ψ|I/2|ψ⟩) = 1/√2, here with ψ = |T⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = pure(&[c(1.0, 0.0), c(s, 0.0) * c(s, s)]);
        let mixed = ComplexMatrix::identity(2).scale_re(0.5);
        let f = fidelity(&t, &mixed).unwrap();
        assert!((f - s).abs() < 1e-9);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut rng = crate::simulate::rng::SplitMix64::new(5);
        for _ in 0..10 {
            let d = 2;
            let mut g = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    g[(i, j)] = c(rng.next_gaussian(), rng.next_gaussian());
                }
            }
            let rho = {
                let m = g.matmul(&g.dagger());
                m.scale_re(1.0 / m.trace().re)
            };
            let psi = pure(&[
                c(rng.next_gaussian(), 0.0),
                c(rng.next_gaussian(), rng.next_gaussian()),
            ]);
            let f1 = fidelity(&rho, &psi).unwrap();
            let f2 = fidelity(&psi, &rho).unwrap();
            assert!((f1 - f2).abs() < 1e-9);
        }
    }

    #[test]
    fn eig_min_of_pure_state_difference() {
        // For pure ψ, φ the eigenvalues of ψ − φ are ±√(1 − |⟨ψ|φ⟩|²).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t_vec = [c(s, 0.0), c(0.5, 0.5)];
        // |H⟩ with Bloch (1,1,1)/√3.
        let a = 1.0 / 3.0f64.sqrt();
        let rho_h = ComplexMatrix::from_rows(vec![
            vec![c((1.0 + a) / 2.0, 0.0), c(a / 2.0, -a / 2.0)],
            vec![c(a / 2.0, a / 2.0), c((1.0 - a) / 2.0, 0.0)],
        ]);
        let rho_t = ComplexMatrix::projector(&t_vec);
        let diff = rho_t.sub(&rho_h);
        let (lam, v) = eig_min(&diff).unwrap();
        let overlap = rho_t.trace_product(&rho_h).re;
        let expected = -(1.0 - overlap).sqrt();
        assert!((lam - expected).abs() < 1e-10, "{lam} vs {expected}");
        // residual of the eigenpair
        let mv = diff.matvec(&v);
        let res: f64 = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-9);
    }
}
