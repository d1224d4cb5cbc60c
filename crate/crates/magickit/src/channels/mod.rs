//! Choi-matrix representation of channels, CSPO membership, and the prepared
//! library of free qubit channels.
//!
//! Subsystem ordering is fixed as A₀ ⊗ A₁ for channels (input ⊗ output) and
//! A₀ ⊗ A₁ ⊗ B₀ ⊗ B₁ for superchannels, little-endian qubit indexing within
//! each factor. One documented convention prevents transpose bugs.

pub mod superchannel;

use crate::error::{MagicError, Result};
use crate::numerics::matrix::{ComplexMatrix, C64};
use crate::stabilizer::{
    clifford_unitaries_single_qubit, is_stabilizer_mixed, PauliLetter, StabMembership,
    StabilizerSet,
};

pub use superchannel::SuperchannelChoi;

/// PSD slack tolerated on a Choi matrix.
pub const CHOI_PSD_TOL: f64 = 1e-9;
/// Deviation tolerated on the trace-preserving marginal.
pub const CHOI_TP_TOL: f64 = 1e-8;

/// Choi matrix of a channel with explicit input/output dimensions.
///
/// `J = Σᵢ (I⊗Kᵢ) Φ⁺ (I⊗Kᵢ)†` with Φ⁺ unnormalized, so `Tr J = |A₀|` and the
/// partial trace over the output factor equals the identity on the input.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    j: ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
}

impl ChoiOperator {
    /// Wrap a raw Choi matrix, checking complete positivity and trace
    /// preservation.
    pub fn from_choi_matrix(j: ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if j.rows() != dim_in * dim_out || !j.is_square() {
            return Err(MagicError::DimensionMismatch(format!(
                "Choi matrix of size {} does not match dims {dim_in}x{dim_out}",
                j.rows()
            )));
        }
        j.check_hermitian(1e-8)?;
        let scale = j.max_abs().max(1.0);
        let (lmin, _) = j.eig_min()?;
        if lmin < -CHOI_PSD_TOL * scale {
            return Err(MagicError::NotAState(format!(
                "Choi matrix has negative eigenvalue {lmin:.3e}"
            )));
        }
        let marginal = j.partial_trace(&[dim_in, dim_out], &[true, false]);
        let dev = marginal.max_abs_diff(&ComplexMatrix::identity(dim_in));
        if dev > CHOI_TP_TOL {
            return Err(MagicError::NotTracePreserving(dev));
        }
        Ok(Self { j, dim_in, dim_out })
    }

    /// Construct without validation (internal use where invariants are known).
    pub(crate) fn from_parts_unchecked(j: ComplexMatrix, dim_in: usize, dim_out: usize) -> Self {
        Self { j, dim_in, dim_out }
    }

    pub fn from_kraus(kraus: &[ComplexMatrix], dim_in: usize, dim_out: usize) -> Result<Self> {
        if kraus.is_empty() {
            return Err(MagicError::InvalidInput("no Kraus operators".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
        for k in kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(MagicError::DimensionMismatch(
                    "Kraus operator shape mismatch".into(),
                ));
            }
            sum = sum.add(&k.dagger().matmul(k));
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim_in));
        if dev > CHOI_TP_TOL {
            return Err(MagicError::NotTracePreserving(dev));
        }
        let mut j = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for k in kraus {
            // |v⟩ = Σ_i |i⟩ ⊗ K|i⟩
            let mut v = vec![C64::new(0.0, 0.0); dim_in * dim_out];
            for i in 0..dim_in {
                for o in 0..dim_out {
                    v[i * dim_out + o] = k[(o, i)];
                }
            }
            j = j.add(&ComplexMatrix::projector(&v));
        }
        Ok(Self { j, dim_in, dim_out })
    }

    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        Self::from_kraus(std::slice::from_ref(u), d, d)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_unitary(&ComplexMatrix::identity(dim)).expect("identity is CPTP")
    }

    /// Channel ρ ↦ Tr[ρ]·σ replacing every input with a fixed state.
    pub fn replacement(sigma: &ComplexMatrix, dim_in: usize) -> Result<Self> {
        crate::numerics::check_state(sigma)?;
        let j = ComplexMatrix::identity(dim_in).kron(sigma);
        Ok(Self {
            j,
            dim_in,
            dim_out: sigma.rows(),
        })
    }

    /// Choi of an arbitrary linear map given by its action on matrix units.
    pub fn from_map(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut j = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for i in 0..dim_in {
            for k in 0..dim_in {
                let mut unit = ComplexMatrix::zeros(dim_in, dim_in);
                unit[(i, k)] = C64::new(1.0, 0.0);
                let img = f(&unit);
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        j[(i * dim_out + a, k * dim_out + b)] += img[(a, b)];
                    }
                }
            }
        }
        Self::from_choi_matrix(j, dim_in, dim_out)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Normalized Choi matrix J/|A₀| (a state when the channel is CPTP).
    pub fn normalized(&self) -> ComplexMatrix {
        self.j.scale_re(1.0 / self.dim_in as f64)
    }

    /// Apply the channel: E(ρ) = Tr_{A₀}[J (ρᵀ ⊗ I)].
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(MagicError::DimensionMismatch(format!(
                "state dim {} vs channel input {}",
                rho.rows(),
                self.dim_in
            )));
        }
        let contraction = self
            .j
            .matmul(&rho.transpose().kron(&ComplexMatrix::identity(self.dim_out)));
        Ok(contraction.partial_trace(&[self.dim_in, self.dim_out], &[false, true]))
    }

    /// Composition `then ∘ self` via the link product.
    pub fn compose(&self, then: &ChoiOperator) -> Result<ChoiOperator> {
        if then.dim_in != self.dim_out {
            return Err(MagicError::DimensionMismatch(format!(
                "composition needs inner dims to agree ({} vs {})",
                self.dim_out, then.dim_in
            )));
        }
        let (a0, a1, a2) = (self.dim_in, self.dim_out, then.dim_out);
        let x = self
            .j
            .partial_transpose(&[a0, a1], &[false, true])
            .kron(&ComplexMatrix::identity(a2));
        let z = ComplexMatrix::identity(a0).kron(&then.j);
        let prod = z.matmul(&x);
        let j = prod.partial_trace(&[a0, a1, a2], &[true, false, true]);
        Ok(ChoiOperator {
            j,
            dim_in: a0,
            dim_out: a2,
        })
    }

    /// Tensor product N₁ ⊗ N₂ with inputs and outputs grouped.
    pub fn tensor(&self, other: &ChoiOperator) -> ChoiOperator {
        let dims = [self.dim_in, self.dim_out, other.dim_in, other.dim_out];
        let j = self.j.kron(&other.j).permute_systems(&dims, &[0, 2, 1, 3]);
        ChoiOperator {
            j,
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
        }
    }

    /// Convex mixture of channels with matching dimensions.
    pub fn mixture(parts: &[(f64, &ChoiOperator)]) -> Result<ChoiOperator> {
        let first = parts
            .first()
            .ok_or_else(|| MagicError::InvalidInput("empty mixture".into()))?;
        let (di, do_) = (first.1.dim_in, first.1.dim_out);
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 || parts.iter().any(|(w, _)| *w < -1e-12) {
            return Err(MagicError::InvalidInput(
                "mixture weights must be a probability vector".into(),
            ));
        }
        let mut j = ComplexMatrix::zeros(di * do_, di * do_);
        for (w, c) in parts {
            if c.dim_in != di || c.dim_out != do_ {
                return Err(MagicError::DimensionMismatch("mixture dims".into()));
            }
            j = j.add(&c.j.scale_re(*w));
        }
        Ok(ChoiOperator {
            j,
            dim_in: di,
            dim_out: do_,
        })
    }
}

/// CSPO membership: J/|A₀| inside the stabilizer polytope of the joint
/// input-output system. An infeasible answer carries a stabilizer witness.
pub fn is_cspo(channel: &ChoiOperator, set: &StabilizerSet) -> Result<StabMembership> {
    let d = channel.dim_in * channel.dim_out;
    if d != set.dim() {
        return Err(MagicError::DimensionMismatch(format!(
            "channel joint dimension {d} does not match the {}-qubit set",
            set.n()
        )));
    }
    is_stabilizer_mixed(&channel.normalized(), set)
}

/// Named qubit channels whose normalized Chois are stabilizer states: the 24
/// Clifford unitaries plus the measure-and-prepare family built from Pauli
/// measurements and stabilizer preparations.
pub struct PreparedChannelLibrary {
    entries: Vec<(String, ChoiOperator)>,
}

impl PreparedChannelLibrary {
    pub fn qubit() -> Self {
        let mut entries = Vec::new();
        for (word, u) in clifford_unitaries_single_qubit() {
            let c = ChoiOperator::from_unitary(&u).expect("Clifford is CPTP");
            entries.push((format!("U:{word}"), c));
        }
        let set1 = StabilizerSet::enumerate(1).expect("n=1 enumeration");
        let preps: Vec<ComplexMatrix> = set1.densities().to_vec();
        for (basis_name, basis) in [
            ("Z", PauliLetter::Z),
            ("X", PauliLetter::X),
            ("Y", PauliLetter::Y),
        ] {
            let pauli = basis.matrix();
            let id = ComplexMatrix::identity(2);
            let p_plus = id.add(&pauli).scale_re(0.5);
            let p_minus = id.sub(&pauli).scale_re(0.5);
            for (i, prep_plus) in preps.iter().enumerate() {
                for (k, prep_minus) in preps.iter().enumerate() {
                    let c = ChoiOperator::from_map(2, 2, |rho| {
                        let w_plus = p_plus.trace_product(rho);
                        let w_minus = p_minus.trace_product(rho);
                        prep_plus.scale(w_plus).add(&prep_minus.scale(w_minus))
                    })
                    .expect("measure-and-prepare is CPTP");
                    entries.push((format!("MP:{basis_name}:{i}:{k}"), c));
                }
            }
        }
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, ChoiOperator)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&ChoiOperator> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// Random convex mixture of library members; CSPO by polytope convexity.
    pub fn sample_cspo(&self, rng: &mut crate::simulate::rng::SplitMix64) -> ChoiOperator {
        let k = 1 + rng.next_index(4);
        let mut picks = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        let mut total = 0.0;
        for _ in 0..k {
            picks.push(&self.entries[rng.next_index(self.entries.len())].1);
            let w = rng.next_f64() + 1e-3;
            total += w;
            weights.push(w);
        }
        let parts: Vec<(f64, &ChoiOperator)> =
            weights.iter().map(|w| w / total).zip(picks).collect();
        ChoiOperator::mixture(&parts).expect("mixture of matching channels")
    }
}

/// Vertices of the qubit CSPO polytope: basic feasible solutions of
/// `{c ≥ 0 : Σ cᵢ Tr_{A₁}[φᵢ] = I/2}` over the 60 two-qubit stabilizer
/// states, mapped to Choi matrices J = 2 Σ cᵢ φᵢ.
pub fn qubit_cspo_vertices(set: &StabilizerSet) -> Result<Vec<ChoiOperator>> {
    if set.n() != 2 {
        return Err(MagicError::UnsupportedDimension(
            "CSPO vertex enumeration needs the two-qubit set".into(),
        ));
    }
    let phis = set.densities();
    let m = phis.len();
    // 4 real rows: vech of the input marginal.
    let cols: Vec<[f64; 4]> = phis
        .iter()
        .map(|phi| {
            let marg = phi.partial_trace(&[2, 2], &[true, false]);
            let v = crate::numerics::vech_real(&marg);
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    let rhs = [0.5, 0.5, 0.0, 0.0];

    let combos = combinations_4(m);
    let solve_one = |idx: &[usize; 4]| -> Option<Vec<(usize, f64)>> {
        let mut a = [[0.0f64; 5]; 4];
        for r in 0..4 {
            for (c, &col) in idx.iter().enumerate() {
                a[r][c] = cols[col][r];
            }
            a[r][4] = rhs[r];
        }
        // Gaussian elimination with partial pivoting on the 4×4 block.
        for p in 0..4 {
            let mut best = p;
            for r in (p + 1)..4 {
                if a[r][p].abs() > a[best][p].abs() {
                    best = r;
                }
            }
            if a[best][p].abs() < 1e-10 {
                return None; // singular basis
            }
            a.swap(p, best);
            for r in 0..4 {
                if r == p {
                    continue;
                }
                let f = a[r][p] / a[p][p];
                if f != 0.0 {
                    for c in p..5 {
                        a[r][c] -= f * a[p][c];
                    }
                }
            }
        }
        let mut sol = Vec::with_capacity(4);
        for r in 0..4 {
            let v = a[r][4] / a[r][r];
            if v < -1e-9 {
                return None;
            }
            sol.push((idx[r], v.max(0.0)));
        }
        Some(sol)
    };

    #[cfg(feature = "parallel")]
    let raw: Vec<Vec<(usize, f64)>> = {
        use rayon::prelude::*;
        combos.par_iter().filter_map(solve_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let raw: Vec<Vec<(usize, f64)>> = combos.iter().filter_map(solve_one).collect();

    // Deduplicate in weight space, then in Choi space.
    let mut seen = std::collections::HashSet::new();
    let mut chois: Vec<ChoiOperator> = Vec::new();
    let mut choi_keys = std::collections::HashSet::new();
    for sol in raw {
        let key: Vec<(usize, i64)> = sol
            .iter()
            .filter(|(_, v)| *v > 1e-9)
            .map(|(i, v)| (*i, (v * 1e9).round() as i64))
            .collect();
        if !seen.insert(key) {
            continue;
        }
        let mut j = ComplexMatrix::zeros(4, 4);
        for (i, v) in &sol {
            if *v > 0.0 {
                j = j.add(&phis[*i].scale_re(2.0 * v));
            }
        }
        let ckey: Vec<(i64, i64)> = j
            .data()
            .iter()
            .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
            .collect();
        if !choi_keys.insert(ckey) {
            continue;
        }
        chois.push(ChoiOperator::from_choi_matrix(j, 2, 2)?);
    }
    Ok(chois)
}

fn combinations_4(m: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            for c in (b + 1)..m {
                for d in (c + 1)..m {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::from_bloch;

    fn t_gate() -> ComplexMatrix {
        let a = std::f64::consts::FRAC_PI_4;
        ComplexMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(a.cos(), a.sin())],
        ])
    }

    #[test]
    fn identity_choi_is_unnormalized_bell() {
        let c = ChoiOperator::identity(2);
        assert!((c.matrix().trace().re - 2.0).abs() < 1e-12);
        let (vals, _) = c.matrix().eigh().unwrap();
        assert!(vals[..3].iter().all(|v| v.abs() < 1e-12));
        assert!((vals[3] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn replacement_channel_choi_and_apply() {
        let zero = from_bloch([0.0, 0.0, 1.0]).unwrap();
        let c = ChoiOperator::replacement(&zero, 2).unwrap();
        let expected = ComplexMatrix::identity(2).kron(&zero);
        assert!(c.matrix().max_abs_diff(&expected) < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = from_bloch([s, s, 0.0]).unwrap();
        assert!(c.apply(&t).unwrap().max_abs_diff(&zero) < 1e-12);
    }

    #[test]
    fn t_gate_choi_outside_stabilizer_polytope() {
        let set = StabilizerSet::enumerate(2).unwrap();
        let c = ChoiOperator::from_unitary(&t_gate()).unwrap();
        let m = is_cspo(&c, &set).unwrap();
        assert!(!m.inside());
        let w = m.witness.unwrap();
        assert!(w.violation < -1e-9);
        for phi in set.densities() {
            assert!(w.operator.trace_product(phi).re >= -1e-9);
        }
    }

    #[test]
    fn clifford_channels_are_cspo() {
        let set = StabilizerSet::enumerate(2).unwrap();
        for (word, u) in clifford_unitaries_single_qubit() {
            let c = ChoiOperator::from_unitary(&u).unwrap();
            assert!(is_cspo(&c, &set).unwrap().inside(), "{word}");
        }
    }

    #[test]
    fn t_gate_on_plus_gives_t_state() {
        let plus = from_bloch([1.0, 0.0, 0.0]).unwrap();
        let c = ChoiOperator::from_unitary(&t_gate()).unwrap();
        let out = c.apply(&plus).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = from_bloch([s, s, 0.0]).unwrap();
        assert!(out.max_abs_diff(&t) < 1e-12);
    }

    #[test]
    fn kraus_round_trip_random_channels() {
        let mut rng = crate::simulate::rng::SplitMix64::new(31);
        for _ in 0..20 {
            // Random CPTP channel via normalized random Kraus pair.
            let mut k1 = ComplexMatrix::zeros(2, 2);
            let mut k2 = ComplexMatrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    k1[(i, j)] = C64::new(rng.next_gaussian(), rng.next_gaussian());
                    k2[(i, j)] = C64::new(rng.next_gaussian(), rng.next_gaussian());
                }
            }
            let s = k1.dagger().matmul(&k1).add(&k2.dagger().matmul(&k2));
            // s^{-1/2} via eigendecomposition
            let (vals, vecs) = s.eigh().unwrap();
            let mut inv_sqrt = ComplexMatrix::zeros(2, 2);
            for k in 0..2 {
                let l = 1.0 / vals[k].sqrt();
                for i in 0..2 {
                    for j in 0..2 {
                        inv_sqrt[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj() * l;
                    }
                }
            }
            let k1 = k1.matmul(&inv_sqrt);
            let k2 = k2.matmul(&inv_sqrt);
            let c = ChoiOperator::from_kraus(&[k1.clone(), k2.clone()], 2, 2).unwrap();

            // random state
            let mut g = ComplexMatrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    g[(i, j)] = C64::new(rng.next_gaussian(), rng.next_gaussian());
                }
            }
            let rho = {
                let m = g.matmul(&g.dagger());
                m.scale_re(1.0 / m.trace().re)
            };
            let via_choi = c.apply(&rho).unwrap();
            let direct = k1
                .matmul(&rho)
                .matmul(&k1.dagger())
                .add(&k2.matmul(&rho).matmul(&k2.dagger()));
            assert!(via_choi.max_abs_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn compose_matches_sequential_apply() {
        let h = crate::stabilizer::hadamard();
        let ch = ChoiOperator::from_unitary(&h).unwrap();
        let ct = ChoiOperator::from_unitary(&t_gate()).unwrap();
        let composed = ct.compose(&ch).unwrap(); // H after T
        let th = h.matmul(&t_gate());
        let direct = ChoiOperator::from_unitary(&th).unwrap();
        assert!(composed.matrix().max_abs_diff(direct.matrix()) < 1e-12);
    }

    #[test]
    fn tensor_of_preparations_is_cspo_stable() {
        // Stabilizer preparations tensor to a stabilizer preparation:
        // prep(φ₁) ⊗ prep(φ₂) with trivial inputs is the 2-qubit state φ₁⊗φ₂.
        let set2 = StabilizerSet::enumerate(2).unwrap();
        let zero = from_bloch([0.0, 0.0, 1.0]).unwrap();
        let plus = from_bloch([1.0, 0.0, 0.0]).unwrap();
        let p1 = ChoiOperator::replacement(&zero, 1).unwrap();
        let p2 = ChoiOperator::replacement(&plus, 1).unwrap();
        let both = p1.tensor(&p2);
        assert_eq!(both.dim_in(), 1);
        assert_eq!(both.dim_out(), 4);
        let m = is_stabilizer_mixed(&both.normalized(), &set2).unwrap();
        assert!(m.inside());
    }

    #[test]
    fn measure_prepare_channels_are_cspo() {
        let set = StabilizerSet::enumerate(2).unwrap();
        let lib = PreparedChannelLibrary::qubit();
        assert_eq!(lib.len(), 24 + 108);
        // spot-check a few members rather than all 132
        let mut rng = crate::simulate::rng::SplitMix64::new(5);
        for _ in 0..6 {
            let (name, c) = &lib.entries()[rng.next_index(lib.len())];
            assert!(is_cspo(c, &set).unwrap().inside(), "{name}");
        }
        for _ in 0..4 {
            let c = lib.sample_cspo(&mut rng);
            assert!(is_cspo(&c, &set).unwrap().inside());
        }
    }
}
