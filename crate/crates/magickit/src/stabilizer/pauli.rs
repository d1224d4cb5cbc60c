//! Pauli strings with phases.

use std::fmt;
use std::str::FromStr;

use crate::error::{MagicError, Result};
use crate::numerics::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn matrix(self) -> ComplexMatrix {
        let c = C64::new;
        let rows = match self {
            PauliLetter::I => vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
            PauliLetter::X => vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ],
            PauliLetter::Y => vec![
                vec![c(0.0, 0.0), c(0.0, -1.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0)],
            ],
            PauliLetter::Z => vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(-1.0, 0.0)],
            ],
        };
        ComplexMatrix::from_rows(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub fn value(self) -> C64 {
        match self {
            Phase::PlusOne => C64::new(1.0, 0.0),
            Phase::MinusOne => C64::new(-1.0, 0.0),
            Phase::PlusI => C64::new(0.0, 1.0),
            Phase::MinusI => C64::new(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

/// A phased n-qubit Pauli operator, e.g. `-Y` or `XZ` or `+iXY`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub letters: Vec<PauliLetter>,
    pub phase: Phase,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>, phase: Phase) -> Self {
        Self { letters, phase }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![PauliLetter::I; n], Phase::PlusOne)
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    /// Dense matrix realization: phase · (⊗ letter matrices).
    pub fn matrix(&self) -> ComplexMatrix {
        assert!(!self.letters.is_empty());
        let mut m = self.letters[0].matrix();
        for l in &self.letters[1..] {
            m = m.kron(&l.matrix());
        }
        m.scale(self.phase.value())
    }

    /// Hermitian exactly when the phase is ±1.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Apply to a state vector without building the matrix. Qubit 0 is the
    /// most significant bit of the basis index, matching the Kronecker order
    /// used everywhere in this crate.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.letters.len();
        assert_eq!(v.len(), 1 << n);
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (idx, amp) in v.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut target = idx;
            let mut factor = self.phase.value();
            for (q, letter) in self.letters.iter().enumerate() {
                let bit = (idx >> (n - 1 - q)) & 1;
                match letter {
                    PauliLetter::I => {}
                    PauliLetter::X => target ^= 1 << (n - 1 - q),
                    PauliLetter::Y => {
                        target ^= 1 << (n - 1 - q);
                        // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
                        factor *= if bit == 0 {
                            C64::new(0.0, 1.0)
                        } else {
                            C64::new(0.0, -1.0)
                        };
                    }
                    PauliLetter::Z => {
                        if bit == 1 {
                            factor = -factor;
                        }
                    }
                }
            }
            out[target] += factor * amp;
        }
        out
    }
}

impl FromStr for PauliString {
    type Err = MagicError;

    /// Parse strings like `"XZ"`, `"-Y"`, `"+iXY"`, `"-iZZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let mut phase = Phase::PlusOne;
        for (prefix, p) in [
            ("+i", Phase::PlusI),
            ("-i", Phase::MinusI),
            ("+", Phase::PlusOne),
            ("-", Phase::MinusOne),
        ] {
            if let Some(r) = rest.strip_prefix(prefix) {
                phase = p;
                rest = r;
                break;
            }
        }
        if rest.is_empty() {
            return Err(MagicError::InvalidInput("empty Pauli string".into()));
        }
        let letters = rest
            .chars()
            .map(|ch| match ch {
                'I' => Ok(PauliLetter::I),
                'X' => Ok(PauliLetter::X),
                'Y' => Ok(PauliLetter::Y),
                'Z' => Ok(PauliLetter::Z),
                other => Err(MagicError::InvalidInput(format!(
                    "invalid Pauli letter '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(letters, phase))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            Phase::PlusOne => {}
            Phase::MinusOne => write!(f, "-")?,
            Phase::PlusI => write!(f, "+i")?,
            Phase::MinusI => write!(f, "-i")?,
        }
        for l in &self.letters {
            write!(
                f,
                "{}",
                match l {
                    PauliLetter::I => 'I',
                    PauliLetter::X => 'X',
                    PauliLetter::Y => 'Y',
                    PauliLetter::Z => 'Z',
                }
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_matrix_is_diagonal() {
        let p: PauliString = "Z".parse().unwrap();
        let m = p.matrix();
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(-1.0, 0.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn two_qubit_tensor_order() {
        let p: PauliString = "XZ".parse().unwrap();
        let x = PauliLetter::X.matrix();
        let z = PauliLetter::Z.matrix();
        assert!(p.matrix().max_abs_diff(&x.kron(&z)) < 1e-15);
    }

    #[test]
    fn signed_y_stabilizes_minus_i() {
        // -Y|-i⟩ = |-i⟩ with |-i⟩ = (|0⟩ - i|1⟩)/√2, and +Y|+i⟩ = |+i⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus_i = vec![C64::new(s, 0.0), C64::new(0.0, -s)];
        let plus_i = vec![C64::new(s, 0.0), C64::new(0.0, s)];
        let neg_y: PauliString = "-Y".parse().unwrap();
        let pos_y: PauliString = "Y".parse().unwrap();
        let out = neg_y.apply(&minus_i);
        for (a, b) in out.iter().zip(&minus_i) {
            assert!((a - b).norm() < 1e-15);
        }
        let out = pos_y.apply(&plus_i);
        for (a, b) in out.iter().zip(&plus_i) {
            assert!((a - b).norm() < 1e-15);
        }
        // matrix and vector paths agree
        let m = neg_y.matrix();
        let mv = m.matvec(&minus_i);
        for (a, b) in mv.iter().zip(&minus_i) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_matches_matrix_on_random_vectors() {
        let mut rng = crate::simulate::rng::SplitMix64::new(9);
        for s in ["XYZ", "-ZIX", "+iYY", "-iIXZ"] {
            let p: PauliString = s.parse().unwrap();
            let dim = 1 << p.n_qubits();
            let v: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.next_gaussian(), rng.next_gaussian()))
                .collect();
            let fast = p.apply(&v);
            let slow = p.matrix().matvec(&v);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
