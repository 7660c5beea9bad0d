use std::f64::consts::TAU;

use ballistic::bloch::{BranchOptions, BranchSolver};
use ballistic::dynamics::Propagator;
use ballistic::potentials::{
    sample_potential, Alpha, FourierPotential, LimitPeriodicPotential, PeriodicLayer,
};
use ballistic::scenario::random_field;
use ballistic::transform::{analyze, parseval_defect, PacketBasis, WaveField};
use ballistic::{DualWindow, Fft2, Grid2};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn one_layer(g: f64) -> FourierPotential {
    let layer = PeriodicLayer::new(1, [1.0, 1.0])
        .with_real_pair([1, 0], Complex64::new(0.5, 0.0))
        .with_real_pair([0, 1], Complex64::new(0.5, 0.0))
        .with_real_pair([1, 1], Complex64::new(0.0, 0.3));
    LimitPeriodicPotential::new(vec![layer], 1.0, 0.5).with_coupling(g).fourier()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_potential_branch_is_even(r in 4.0f64..8.0, phi in 0.0f64..TAU, g in 0.0f64..0.05) {
        let solver = BranchSolver::new(one_layer(g), BranchOptions::default(), 9.0).unwrap();
        let k = [r * phi.cos(), r * phi.sin()];
        if let (Some(a), Some(b)) = (solver.nonresonant(k).unwrap(), solver.nonresonant([-k[0], -k[1]]).unwrap()) {
            prop_assert!((a.lambda - b.lambda).abs() <= 1e-10 * r * r);
        }
    }

    #[test]
    fn branch_ignores_translation(r in 4.0f64..8.0, phi in 0.0f64..TAU, sx in -1.0f64..1.0, sy in -1.0f64..1.0) {
        let v = one_layer(0.05);
        let a = BranchSolver::new(v.clone(), BranchOptions::default(), 9.0).unwrap();
        let b = BranchSolver::new(v.translated([sx, sy]), BranchOptions::default(), 9.0).unwrap();
        let k = [r * phi.cos(), r * phi.sin()];
        if let (Some(p), Some(q)) = (a.nonresonant(k).unwrap(), b.nonresonant(k).unwrap()) {
            prop_assert!((p.lambda - q.lambda).abs() <= 1e-10 * r * r);
        }
    }

    #[test]
    fn propagation_is_unitary(dt in 1e-3f64..0.1, g in 0.0f64..2.0, seed in any::<u64>()) {
        let grid = Grid2::centered([4.0, 4.0], [32, 32]).unwrap();
        let field = sample_potential(&one_layer(g), &grid).unwrap();
        let mut f = random_field(&grid, &mut ChaCha8Rng::seed_from_u64(seed));
        let n0 = f.norm();
        Propagator::new(&grid, Some(&field), dt).unwrap().advance(&mut f, 50).unwrap();
        prop_assert!((f.norm() - n0).abs() < 1e-12 * n0);
    }

    #[test]
    fn free_transform_is_isometric_on_its_window(seed in any::<u64>(), lo in -16i64..0, hi in 1i64..16) {
        let grid = Grid2::centered([16.0, 16.0], [32, 32]).unwrap();
        let free = BranchSolver::new(
            FourierPotential::zero(ballistic::potentials::FrequencyModule::Lattice { step: [TAU; 2] }),
            BranchOptions::default(),
            20.0,
        )
        .unwrap();
        let window = DualWindow::new(grid.clone(), [lo, -16], [(hi - lo) as usize, 32]).unwrap();
        let basis = PacketBasis::compute(&free, window, None).unwrap();
        let f: WaveField = random_field(&grid, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut fft = Fft2::new(grid.n);
        prop_assert!(parseval_defect(&basis, &f, &mut fft).unwrap() < 1e-10);
        prop_assert!(analyze(&basis, &f, &mut fft).unwrap().norm_sqr().sqrt() <= f.norm() * (1.0 + 1e-12));
    }
}

#[test]
fn golden_convergents_are_best_approximations() {
    let alpha = Alpha::golden();
    for (p, q) in alpha.convergents(20).into_iter().skip(1) {
        let (p, q) = (p.to_f64().unwrap(), q.to_f64().unwrap());
        assert!((alpha.value - p / q).abs() < 1.0 / (q * q));
    }
}
