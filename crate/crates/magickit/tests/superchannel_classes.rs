//! Property suite for the two free superchannel classes: every completely
//! CSPO preserving instance must also pass the (weaker) CSPO-preserving
//! vertex check, and the vertex check must catch magic-injecting
//! superchannels.

use magickit::channels::{
    is_cspo, qubit_cspo_vertices, ChoiOperator, PreparedChannelLibrary, SuperchannelChoi,
};
use magickit::numerics::matrix::{ComplexMatrix, C64};
use magickit::simulate::rng::SplitMix64;
use magickit::stabilizer::StabilizerSet;

fn t_gate_choi() -> ChoiOperator {
    let a = std::f64::consts::FRAC_PI_4;
    let u = ComplexMatrix::from_rows(vec![
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(a.cos(), a.sin())],
    ]);
    ChoiOperator::from_unitary(&u).unwrap()
}

#[test]
fn completely_preserving_members_pass_the_preserving_check() {
    let set2 = StabilizerSet::enumerate(2).unwrap();
    let vertices = qubit_cspo_vertices(&set2).unwrap();
    let lib = PreparedChannelLibrary::qubit();
    let mut rng = SplitMix64::new(777);

    // Constructed members of the completely-preserving class: sandwiches of
    // free channels are completely CSPO preserving by realization, and convex
    // mixtures of them stay in the class.
    for trial in 0..100 {
        let mut members = Vec::new();
        for _ in 0..(1 + rng.next_index(2)) {
            let pre = lib.sample_cspo(&mut rng);
            let post = lib.sample_cspo(&mut rng);
            members.push(SuperchannelChoi::sandwich(&pre, &post).unwrap());
        }
        let j = if members.len() == 1 {
            members[0].matrix().clone()
        } else {
            let w = 0.3 + 0.4 * rng.next_f64();
            members[0]
                .matrix()
                .scale_re(w)
                .add(&members[1].matrix().scale_re(1.0 - w))
        };
        let sc = SuperchannelChoi::from_choi_matrix(j, members[0].dims()).unwrap();
        assert!(
            sc.validate().is_empty(),
            "trial {trial}: invalid superchannel"
        );
        let (preserving, counterexample) =
            sc.is_cspo_preserving_qubit_with(&set2, &vertices).unwrap();
        assert!(
            preserving,
            "trial {trial}: completely preserving member failed the vertex check \
             (counterexample exists: {})",
            counterexample.is_some()
        );
    }
}

#[test]
fn post_composing_t_gate_is_not_preserving() {
    let set2 = StabilizerSet::enumerate(2).unwrap();
    let pre = ChoiOperator::identity(2);
    let sc = SuperchannelChoi::sandwich(&pre, &t_gate_choi()).unwrap();
    assert!(sc.validate().is_empty());
    let (preserving, counterexample) = sc.is_cspo_preserving_qubit(&set2).unwrap();
    assert!(!preserving);
    let vertex = counterexample.expect("violating vertex channel");
    // the violating vertex itself is free, its image is not
    assert!(is_cspo(&vertex, &set2).unwrap().inside());
    let image = sc.apply(&vertex).unwrap();
    assert!(!is_cspo(&image, &set2).unwrap().inside());
}

#[test]
fn replacement_superchannel_is_preserving() {
    // Θ[N] = fixed Clifford channel regardless of the input: discard the
    // input channel by feeding it a fixed stabilizer state and tracing its
    // output, then emit the Clifford's action. Realized as pre/post with a
    // memory leg carrying B₀ through.
    let set2 = StabilizerSet::enumerate(2).unwrap();
    let zero = magickit::stabilizer::from_bloch([0.0, 0.0, 1.0]).unwrap();
    let prep = ChoiOperator::replacement(&zero, 1).unwrap(); // 1 -> 2
    let pre = ChoiOperator::identity(2).tensor(&prep); // B0=2 -> E1=2 ⊗ A0=2
    let sh = magickit::stabilizer::clifford_word_matrix("SH");
    let post = ChoiOperator::from_map(4, 2, |rho| {
        // input legs [E1, A1]: discard A1, apply SH to E1
        let kept = rho.partial_trace(&[2, 2], &[true, false]);
        sh.matmul(&kept).matmul(&sh.dagger())
    })
    .unwrap();
    let dims = magickit::channels::superchannel::SuperchannelDims {
        a0: 2,
        a1: 2,
        b0: 2,
        b1: 2,
    };
    let sc = SuperchannelChoi::from_pre_post(&pre, &post, dims, 2).unwrap();
    assert!(sc.validate().is_empty());
    let (preserving, _) = sc.is_cspo_preserving_qubit(&set2).unwrap();
    assert!(preserving);
    // and its action is the constant Clifford channel
    let out = sc.apply(&t_gate_choi()).unwrap();
    let expected = ChoiOperator::from_unitary(&sh).unwrap();
    assert!(out.matrix().max_abs_diff(expected.matrix()) < 1e-9);
}
