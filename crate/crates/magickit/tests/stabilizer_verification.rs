//! Full stabilizer-group verification of the enumerated sets: every state
//! must be fixed by an abelian group of exactly 2ⁿ signed Pauli strings.

use magickit::stabilizer::StabilizerSet;

#[test]
fn one_and_two_qubit_groups() {
    for n in [1, 2] {
        let set = StabilizerSet::enumerate(n).unwrap();
        set.verify_stabilizer_groups().unwrap();
    }
}

#[test]
fn three_qubit_groups() {
    let set = StabilizerSet::enumerate(3).unwrap();
    set.verify_stabilizer_groups().unwrap();
}
