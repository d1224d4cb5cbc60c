//! Pauli/Clifford machinery, exact enumeration of pure stabilizer states for
//! one to three qubits, and stabilizer-polytope membership with witnesses.

pub mod pauli;

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MagicError, Result};
use crate::numerics::lp::{lp_feasibility_with_certificate, FeasibilityOutcome};
use crate::numerics::matrix::{vech_real, vech_real_inverse, ComplexMatrix, C64};
pub use pauli::{PauliLetter, PauliString, Phase};

/// Overlap-modulus tolerance for deduplication up to global phase.
pub const DEDUP_TOL: f64 = 1e-9;
/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "MAGICKIT_CACHE";
/// Default cache directory.
pub const CACHE_DIR_DEFAULT: &str = ".magicache";
const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabSource {
    Computed,
    Cache,
}

/// The enumerated pure stabilizer states of an n-qubit system.
#[derive(Debug, Clone)]
pub struct StabilizerSet {
    n: usize,
    states: Vec<Vec<C64>>,
    densities: Vec<ComplexMatrix>,
    source: StabSource,
}

/// |states| = 2ⁿ·∏_{k=1..n}(2ᵏ+1): 6, 60, 1080 for n = 1, 2, 3.
pub fn expected_state_count(n: usize) -> usize {
    (1usize << n) * (1..=n).map(|k| (1usize << k) + 1).product::<usize>()
}

impl StabilizerSet {
    /// Breadth-first closure of |0…0⟩ under the generating Cliffords
    /// {H_i, S_i, CNOT_ij}, deduplicating by overlap modulus.
    pub fn enumerate(n: usize) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(MagicError::UnsupportedDimension(format!(
                "stabilizer enumeration is capped at 3 qubits (got {n})"
            )));
        }
        let dim = 1usize << n;
        let gates = generating_cliffords(n);

        let mut states: Vec<Vec<C64>> = Vec::with_capacity(expected_state_count(n));
        // support-bitmask buckets cut the overlap scans
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();

        let mut zero = vec![C64::new(0.0, 0.0); dim];
        zero[0] = C64::new(1.0, 0.0);
        push_state(&mut states, &mut buckets, zero);

        let mut frontier = vec![0usize];
        while let Some(idx) = frontier.pop() {
            let current = states[idx].clone();
            for gate in &gates {
                let next = gate.matvec(&current);
                if let Some(new_idx) = push_state(&mut states, &mut buckets, next) {
                    frontier.push(new_idx);
                }
            }
        }

        let expected = expected_state_count(n);
        if states.len() != expected {
            return Err(MagicError::NumericalFailure(format!(
                "enumeration found {} states for n={n}, expected {expected}",
                states.len()
            )));
        }
        Ok(Self::from_states(n, states, StabSource::Computed))
    }

    /// Load from the cache directory, enumerating and writing the cache on a
    /// miss. The directory defaults to `./.magicache/` and can be overridden
    /// with `MAGICKIT_CACHE`.
    pub fn load_or_enumerate(n: usize) -> Result<Self> {
        Self::load_or_enumerate_in(n, &cache_dir())
    }

    pub fn load_or_enumerate_in(n: usize, dir: &Path) -> Result<Self> {
        let path = dir.join(format!("stab_n{n}.bin"));
        if let Ok(set) = Self::read_cache(n, &path) {
            return Ok(set);
        }
        let set = Self::enumerate(n)?;
        // Cache write failures are not fatal; the set is already in memory.
        let _ = set.write_cache(&path);
        Ok(set)
    }

    fn from_states(n: usize, states: Vec<Vec<C64>>, source: StabSource) -> Self {
        let densities = states.iter().map(|v| ComplexMatrix::projector(v)).collect();
        Self {
            n,
            states,
            densities,
            source,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn source(&self) -> StabSource {
        self.source
    }

    pub fn state_vectors(&self) -> &[Vec<C64>] {
        &self.states
    }

    /// Projectors |φ⟩⟨φ| of the enumerated states.
    pub fn densities(&self) -> &[ComplexMatrix] {
        &self.densities
    }

    /// Indices of the entangled states (n = 2 only): second Schmidt
    /// coefficient above 1e-9.
    pub fn entangled_indices(&self) -> Result<Vec<usize>> {
        if self.n != 2 {
            return Err(MagicError::UnsupportedDimension(
                "entanglement flags are defined for n = 2".into(),
            ));
        }
        let mut out = Vec::new();
        for (i, v) in self.states.iter().enumerate() {
            // Reshape amplitudes to 2×2 and look at the singular spectrum.
            let m = ComplexMatrix::from_rows(vec![vec![v[0], v[1]], vec![v[2], v[3]]]);
            let gram = m.dagger().matmul(&m);
            let (vals, _) = gram.eigh()?;
            if vals[0].max(0.0).sqrt() > 1e-9 {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Verify that every enumerated state is fixed by an abelian group of
    /// exactly 2ⁿ signed Pauli strings.
    pub fn verify_stabilizer_groups(&self) -> Result<()> {
        let n = self.n;
        for (i, v) in self.states.iter().enumerate() {
            let count = count_stabilizers(n, v);
            if count != 1 << n {
                return Err(MagicError::NumericalFailure(format!(
                    "state {i} has {count} stabilizers, expected {}",
                    1 << n
                )));
            }
        }
        Ok(())
    }

    fn read_cache(n: usize, path: &Path) -> Result<Self> {
        let mut file = std::fs::File::open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let newline = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| MagicError::InvalidInput("cache header missing".into()))?;
        let header: CacheHeader = serde_json::from_slice(&bytes[..newline])
            .map_err(|e| MagicError::InvalidInput(format!("cache header: {e}")))?;
        if header.version != CACHE_VERSION || header.n != n {
            return Err(MagicError::InvalidInput("cache version mismatch".into()));
        }
        let dim = 1usize << n;
        let body = &bytes[newline + 1..];
        let needed = header.count * dim * 16;
        if body.len() != needed {
            return Err(MagicError::InvalidInput("cache body truncated".into()));
        }
        let mut states = Vec::with_capacity(header.count);
        let mut off = 0;
        for _ in 0..header.count {
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                let re = f64::from_le_bytes(body[off..off + 8].try_into().unwrap());
                let im = f64::from_le_bytes(body[off + 8..off + 16].try_into().unwrap());
                off += 16;
                v.push(C64::new(re, im));
            }
            states.push(v);
        }
        if states.len() != expected_state_count(n) {
            return Err(MagicError::InvalidInput("cache count mismatch".into()));
        }
        Ok(Self::from_states(n, states, StabSource::Cache))
    }

    fn write_cache(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let header = CacheHeader {
            version: CACHE_VERSION,
            n: self.n,
            count: self.states.len(),
            tolerance: DEDUP_TOL,
        };
        let tmp = path.with_extension("bin.tmp");
        {
            let mut f = std::fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, &header)
                .map_err(|e| MagicError::InvalidInput(format!("cache header: {e}")))?;
            f.write_all(b"\n")?;
            for v in &self.states {
                for z in v {
                    f.write_all(&z.re.to_le_bytes())?;
                    f.write_all(&z.im.to_le_bytes())?;
                }
            }
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    version: u32,
    n: usize,
    count: usize,
    tolerance: f64,
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(CACHE_DIR_DEFAULT))
}

fn support_mask(v: &[C64]) -> u64 {
    let mut mask = 0u64;
    for (i, z) in v.iter().enumerate() {
        if z.norm_sqr() > 1e-12 {
            mask |= 1 << i;
        }
    }
    mask
}

/// Insert if new (up to global phase); returns the new index when inserted.
fn push_state(
    states: &mut Vec<Vec<C64>>,
    buckets: &mut HashMap<u64, Vec<usize>>,
    mut v: Vec<C64>,
) -> Option<usize> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    let mask = support_mask(&v);
    let bucket = buckets.entry(mask).or_default();
    for &idx in bucket.iter() {
        let overlap: C64 = states[idx].iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        if overlap.norm() >= 1.0 - DEDUP_TOL {
            return None;
        }
    }
    let idx = states.len();
    states.push(v);
    bucket.push(idx);
    Some(idx)
}

/// Generating gate set {H_i, S_i, CNOT_ij (i≠j)} as dense matrices.
fn generating_cliffords(n: usize) -> Vec<ComplexMatrix> {
    let mut gates = Vec::new();
    for i in 0..n {
        gates.push(embed_single(hadamard(), i, n));
        gates.push(embed_single(phase_gate(), i, n));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                gates.push(cnot(i, j, n));
            }
        }
    }
    gates
}

pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_rows(vec![
        vec![C64::new(s, 0.0), C64::new(s, 0.0)],
        vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
    ])
}

pub fn phase_gate() -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
    ])
}

fn embed_single(gate: ComplexMatrix, qubit: usize, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(1);
    for q in 0..n {
        let factor = if q == qubit {
            gate.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        m = m.kron(&factor);
    }
    m
}

fn cnot(control: usize, target: usize, n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let cbit = (idx >> (n - 1 - control)) & 1;
        let out = if cbit == 1 {
            idx ^ (1 << (n - 1 - target))
        } else {
            idx
        };
        m[(out, idx)] = C64::new(1.0, 0.0);
    }
    m
}

/// Count signed Pauli strings (phases ±1) fixing the state.
fn count_stabilizers(n: usize, v: &[C64]) -> usize {
    let letters = [
        PauliLetter::I,
        PauliLetter::X,
        PauliLetter::Y,
        PauliLetter::Z,
    ];
    let mut count = 0;
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let mut ls = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            ls.push(letters[c % 4]);
            c /= 4;
        }
        for phase in [Phase::PlusOne, Phase::MinusOne] {
            let p = PauliString::new(ls.clone(), phase);
            let pv = p.apply(v);
            let diff: f64 = pv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if diff < 1e-10 {
                count += 1;
            }
        }
    }
    count
}

/// A Hermitian operator nonnegative on every pure stabilizer state of its
/// dimension and strictly negative on the queried operator.
#[derive(Debug, Clone)]
pub struct StabWitness {
    pub operator: ComplexMatrix,
    pub violation: f64,
}

/// Result of a stabilizer-polytope membership query.
#[derive(Debug, Clone)]
pub struct StabMembership {
    pub outcome: FeasibilityOutcome,
    pub witness: Option<StabWitness>,
}

impl StabMembership {
    pub fn inside(&self) -> bool {
        self.outcome.feasible
    }
}

/// Decide whether ρ is a convex combination of the enumerated pure stabilizer
/// states; an infeasible answer carries the Farkas certificate converted into
/// a stabilizer witness.
pub fn is_stabilizer_mixed(rho: &ComplexMatrix, set: &StabilizerSet) -> Result<StabMembership> {
    if rho.rows() != set.dim() {
        return Err(MagicError::DimensionMismatch(format!(
            "state dimension {} does not match the {}-qubit set",
            rho.rows(),
            set.n()
        )));
    }
    let d = set.dim();
    let m = set.len();
    let b = vech_real(rho);
    // Columns are vech(φ_i); rows are the d² real coordinates.
    let cols: Vec<Vec<f64>> = set.densities().iter().map(vech_real).collect();
    let a: Vec<Vec<f64>> = (0..d * d)
        .map(|r| (0..m).map(|c| cols[c][r]).collect())
        .collect();
    let outcome = lp_feasibility_with_certificate(&a, &b)?;
    let witness = if outcome.feasible {
        None
    } else {
        let y = outcome.certificate.as_ref().expect("certificate present");
        let w = vech_real_inverse(y, d);
        let violation = w.trace_product(rho).re;
        Some(StabWitness {
            operator: w,
            violation,
        })
    };
    Ok(StabMembership { outcome, witness })
}

/// The 24 single-qubit Clifford unitaries of the completely stabilizer
/// preserving unitary table, as matrix products of {I, X, Y, Z, H, S}.
pub fn clifford_unitaries_single_qubit() -> Vec<(String, ComplexMatrix)> {
    CLIFFORD_WORDS
        .iter()
        .map(|w| (w.to_string(), clifford_word_matrix(w)))
        .collect()
}

/// Gate words in tabulated order; a word multiplies left-to-right, so the
/// rightmost letter acts first.
pub const CLIFFORD_WORDS: [&str; 24] = [
    "I", "X", "Z", "XZ", "H", "HX", "HZ", "HXZ", "S", "XS", "ZS", "XZS", "HS", "HSZ", "HXS",
    "HXSZ", "SH", "SHZ", "SHX", "SHXZ", "SHS", "SHSZ", "SHSX", "SHSXZ",
];

pub fn clifford_word_matrix(word: &str) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2);
    for ch in word.chars() {
        let g = match ch {
            'I' => ComplexMatrix::identity(2),
            'X' => PauliLetter::X.matrix(),
            'Y' => PauliLetter::Y.matrix(),
            'Z' => PauliLetter::Z.matrix(),
            'H' => hadamard(),
            'S' => phase_gate(),
            other => panic!("unknown gate letter {other}"),
        };
        m = m.matmul(&g);
    }
    m
}

/// Bloch coordinates rᵢ = Tr[ρ σᵢ] of a qubit state.
pub fn bloch_vector(rho: &ComplexMatrix) -> Result<[f64; 3]> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(MagicError::NotAState("bloch_vector needs a qubit".into()));
    }
    crate::numerics::check_state(rho)?;
    let r = [
        2.0 * rho[(0, 1)].re,
        -2.0 * rho[(0, 1)].im,
        rho[(0, 0)].re - rho[(1, 1)].re,
    ];
    Ok(r)
}

/// Qubit state (I + r·σ)/2 from Bloch coordinates.
pub fn from_bloch(r: [f64; 3]) -> Result<ComplexMatrix> {
    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if norm > 1.0 + 1e-9 {
        return Err(MagicError::NotAState(format!(
            "Bloch vector norm {norm} exceeds 1"
        )));
    }
    Ok(ComplexMatrix::from_rows(vec![
        vec![
            C64::new((1.0 + r[2]) / 2.0, 0.0),
            C64::new(r[0] / 2.0, -r[1] / 2.0),
        ],
        vec![
            C64::new(r[0] / 2.0, r[1] / 2.0),
            C64::new((1.0 - r[2]) / 2.0, 0.0),
        ],
    ]))
}

/// Projector onto the eigenspaces of ρ with eigenvalue above 1e-9.
pub fn support_projector(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = rho.eigh()?;
    let d = rho.rows();
    let mut p = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        if vals[k] > 1e-9 {
            let v: Vec<C64> = (0..d).map(|i| vecs[(i, k)]).collect();
            p = p.add(&ComplexMatrix::projector(&v));
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_count_and_groups() {
        let set = StabilizerSet::enumerate(1).unwrap();
        assert_eq!(set.len(), 6);
        set.verify_stabilizer_groups().unwrap();
    }

    #[test]
    fn two_qubit_count_and_entanglement() {
        let set = StabilizerSet::enumerate(2).unwrap();
        assert_eq!(set.len(), 60);
        assert_eq!(set.entangled_indices().unwrap().len(), 24);
    }

    #[test]
    fn enumeration_rejects_large_n() {
        assert!(matches!(
            StabilizerSet::enumerate(4),
            Err(MagicError::UnsupportedDimension(_))
        ));
    }

    #[test]
    fn maximally_mixed_is_inside() {
        let set = StabilizerSet::enumerate(1).unwrap();
        let rho = ComplexMatrix::identity(2).scale_re(0.5);
        let m = is_stabilizer_mixed(&rho, &set).unwrap();
        assert!(m.inside());
    }

    #[test]
    fn t_state_is_outside_with_valid_witness() {
        let set = StabilizerSet::enumerate(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = from_bloch([s, s, 0.0]).unwrap();
        let m = is_stabilizer_mixed(&rho, &set).unwrap();
        assert!(!m.inside());
        let w = m.witness.unwrap();
        assert!(w.violation < -1e-9);
        for phi in set.densities() {
            assert!(w.operator.trace_product(phi).re >= -1e-9);
        }
    }

    #[test]
    fn octahedron_criterion_matches_membership() {
        let set = StabilizerSet::enumerate(1).unwrap();
        let mut rng = crate::simulate::rng::SplitMix64::new(21);
        for _ in 0..200 {
            let mut r = [0.0f64; 3];
            loop {
                for v in r.iter_mut() {
                    *v = 2.0 * rng.next_f64() - 1.0;
                }
                if (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt() <= 1.0 {
                    break;
                }
            }
            let rho = from_bloch(r).unwrap();
            let inside = is_stabilizer_mixed(&rho, &set).unwrap().inside();
            let l1 = r[0].abs() + r[1].abs() + r[2].abs();
            assert_eq!(inside, l1 <= 1.0 + 1e-8, "bloch {r:?} l1={l1}");
        }
    }

    #[test]
    fn clifford_unitaries_permute_paulis_and_are_distinct() {
        let us = clifford_unitaries_single_qubit();
        assert_eq!(us.len(), 24);
        let paulis: Vec<ComplexMatrix> = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z]
            .iter()
            .map(|l| l.matrix())
            .collect();
        for (word, u) in &us {
            // unitary
            let uu = u.dagger().matmul(u);
            assert!(
                uu.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12,
                "{word}"
            );
            // each conjugated Pauli lands on ± another Pauli
            for p in &paulis {
                let c = u.matmul(p).matmul(&u.dagger());
                let mut matched = false;
                for q in &paulis {
                    if c.max_abs_diff(q) < 1e-10 || c.max_abs_diff(&q.scale_re(-1.0)) < 1e-10 {
                        matched = true;
                        break;
                    }
                }
                assert!(matched, "{word} does not preserve the Pauli set");
            }
        }
        // pairwise distinct up to global phase: compare |Tr[U†V]| < 2
        for i in 0..us.len() {
            for j in (i + 1)..us.len() {
                let t = us[i].1.dagger().matmul(&us[j].1).trace().norm();
                assert!(t < 2.0 - 1e-9, "{} vs {}", us[i].0, us[j].0);
            }
        }
    }

    #[test]
    fn defining_clifford_relations() {
        let h = hadamard();
        let s = phase_gate();
        let x = PauliLetter::X.matrix();
        let y = PauliLetter::Y.matrix();
        let z = PauliLetter::Z.matrix();
        assert!(h.matmul(&x).matmul(&h.dagger()).max_abs_diff(&z) < 1e-12);
        assert!(s.matmul(&x).matmul(&s.dagger()).max_abs_diff(&y) < 1e-12);
    }

    #[test]
    fn sh_choi_vector_matches_table() {
        // Choi vector of SH is |0,+i⟩ + |1,−i⟩ up to normalization.
        let u = clifford_word_matrix("SH");
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Σ_i |i⟩ ⊗ U|i⟩ with U|0⟩ = |+i⟩, U|1⟩ = |−i⟩
        let u0 = u.matvec(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let u1 = u.matvec(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let plus_i = [C64::new(s, 0.0), C64::new(0.0, s)];
        let minus_i = [C64::new(s, 0.0), C64::new(0.0, -s)];
        let ip0: C64 = plus_i.iter().zip(&u0).map(|(a, b)| a.conj() * b).sum();
        let ip1: C64 = minus_i.iter().zip(&u1).map(|(a, b)| a.conj() * b).sum();
        assert!((ip0.norm() - 1.0).abs() < 1e-12);
        assert!((ip1.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_round_trip_and_named_states() {
        let zero = from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(bloch_vector(&zero).unwrap(), [0.0, 0.0, 1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = from_bloch([s, s, 0.0]).unwrap();
        let r = bloch_vector(&t).unwrap();
        assert!((r[0] - s).abs() < 1e-12 && (r[1] - s).abs() < 1e-12 && r[2].abs() < 1e-12);
        let a = 1.0 / 3.0f64.sqrt();
        let h = from_bloch([a, a, a]).unwrap();
        let r = bloch_vector(&h).unwrap();
        for v in r {
            assert!((v - a).abs() < 1e-12);
        }
    }

    #[test]
    fn support_projector_cases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = from_bloch([s, s, 0.0]).unwrap();
        let p = support_projector(&t).unwrap();
        assert!(p.max_abs_diff(&t) < 1e-9);
        let mixed = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(
            support_projector(&mixed)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-9
        );
        let near_pure = from_bloch([0.0, 0.0, 0.998]).unwrap();
        assert!(
            support_projector(&near_pure)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-9
        );
        // idempotent
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("magicache-test-{}", std::process::id()));
        let set = StabilizerSet::load_or_enumerate_in(1, &dir).unwrap();
        assert_eq!(set.source(), StabSource::Computed);
        let set2 = StabilizerSet::load_or_enumerate_in(1, &dir).unwrap();
        assert_eq!(set2.source(), StabSource::Cache);
        assert_eq!(set2.len(), 6);
        for (a, b) in set.state_vectors().iter().zip(set2.state_vectors()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).norm() < 1e-15);
            }
        }
        let _ = std::fs::remove_dir_all(&dir);
    }
}
