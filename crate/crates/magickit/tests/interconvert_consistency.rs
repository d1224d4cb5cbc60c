//! Cross-module consistency of the interconversion decision: monotone
//! ordering along feasible conversions, and distance/feasibility agreement.

use magickit::interconvert::{interconversion_distance, qubit_convertible};
use magickit::monotones::{dmin_state, robustness_state};
use magickit::numerics::matrix::{ComplexMatrix, C64};
use magickit::simulate::rng::SplitMix64;
use magickit::stabilizer::StabilizerSet;

fn random_qubit_state(rng: &mut SplitMix64) -> ComplexMatrix {
    if rng.next_f64() < 0.5 {
        let v = [
            C64::new(rng.next_gaussian(), rng.next_gaussian()),
            C64::new(rng.next_gaussian(), rng.next_gaussian()),
        ];
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv: Vec<C64> = v.iter().map(|z| z / norm).collect();
        ComplexMatrix::projector(&nv)
    } else {
        let mut g = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                g[(i, j)] = C64::new(rng.next_gaussian(), rng.next_gaussian());
            }
        }
        let m = g.matmul(&g.dagger());
        m.scale_re(1.0 / m.trace().re)
    }
}

#[test]
fn convertibility_respects_monotones() {
    let set = StabilizerSet::enumerate(1).unwrap();
    let mut rng = SplitMix64::new(55);
    let mut feasible_seen = 0;
    for _ in 0..300 {
        let rho = random_qubit_state(&mut rng);
        let sigma = random_qubit_state(&mut rng);
        if !qubit_convertible(&rho, &sigma).unwrap().feasible {
            continue;
        }
        feasible_seen += 1;
        let r_from = robustness_state(&rho, &set)
            .unwrap()
            .convention
            .unwrap()
            .r_hc;
        let r_to = robustness_state(&sigma, &set)
            .unwrap()
            .convention
            .unwrap()
            .r_hc;
        assert!(r_to <= r_from + 1e-7, "R_HC grew: {r_from} -> {r_to}");
        let d_from = dmin_state(&rho, &set).unwrap().value;
        let d_to = dmin_state(&sigma, &set).unwrap().value;
        assert!(d_to <= d_from + 1e-7, "Dmin grew: {d_from} -> {d_to}");
    }
    assert!(
        feasible_seen > 20,
        "sampling produced too few feasible pairs"
    );
}

#[test]
fn distance_zero_iff_convertible() {
    let mut rng = SplitMix64::new(66);
    for _ in 0..200 {
        let rho = random_qubit_state(&mut rng);
        let sigma = random_qubit_state(&mut rng);
        let feasible = qubit_convertible(&rho, &sigma).unwrap().feasible;
        let d = interconversion_distance(&rho, &sigma).unwrap();
        if feasible {
            assert!(d <= 1e-7, "feasible pair at distance {d}");
        } else {
            assert!(d > 1e-7, "infeasible pair at distance {d}");
        }
    }
}
