//! Circuit containers for the simulators.

use crate::channels::ChoiOperator;
use crate::error::{MagicError, Result};
use crate::numerics::matrix::{ComplexMatrix, C64};
use crate::stabilizer::PauliString;

/// A circuit: |0…0⟩ through an ordered sequence of channels, ending with the
/// measurement of a Pauli observable.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub elements: Vec<ChoiOperator>,
    pub observable: PauliString,
}

impl Circuit {
    pub fn new(elements: Vec<ChoiOperator>, observable: PauliString) -> Result<Self> {
        if !observable.is_hermitian() {
            return Err(MagicError::InvalidInput(
                "observable must have a real phase so its eigenvalues are ±1".into(),
            ));
        }
        let mut dim = match elements.first() {
            Some(e) => e.dim_in(),
            None => 1 << observable.n_qubits(),
        };
        for (i, e) in elements.iter().enumerate() {
            if e.dim_in() != dim {
                return Err(MagicError::DimensionMismatch(format!(
                    "element {i} expects input dimension {}, got {dim}",
                    e.dim_in()
                )));
            }
            dim = e.dim_out();
        }
        if dim != 1 << observable.n_qubits() {
            return Err(MagicError::DimensionMismatch(format!(
                "observable acts on dimension {}, circuit ends with {dim}",
                1 << observable.n_qubits()
            )));
        }
        Ok(Self {
            elements,
            observable,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.elements
            .first()
            .map(|e| e.dim_in())
            .unwrap_or(1 << self.observable.n_qubits())
    }

    /// The fixed initial state |0…0⟩⟨0…0|.
    pub fn initial_state(&self) -> ComplexMatrix {
        let d = self.input_dim();
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[0] = C64::new(1.0, 0.0);
        ComplexMatrix::projector(&v)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Exact expectation Tr[E N(|0…0⟩⟨0…0|)] by dense Choi contraction; the
/// ground truth for every simulator test.
pub fn expectation_exact(circuit: &Circuit) -> Result<f64> {
    if circuit.input_dim() > 8 {
        return Err(MagicError::UnsupportedDimension(
            "exact contraction is capped at 3 qubits".into(),
        ));
    }
    let mut rho = circuit.initial_state();
    for e in &circuit.elements {
        rho = e.apply(&rho)?;
    }
    Ok(circuit.observable.matrix().trace_product(&rho).re)
}
