//! Property tests for the log-determinant information measures.

use gaussent::infomeasures::{homodyne_limit_im, im_indices, im_xp_decompose, logdet_entropy, DEFAULT_SCHEDULE};
use gaussent::linalg::{embed, min_eigenvalue, set_principal, principal, symmetrize, trace_norm_sym};
use gaussent::model::{Partition, Qcm, Split};
use gaussent::random::{random_gl_symplectic, random_psd, random_pure_qcm, random_qcm, random_symmetric, random_symplectic};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random bipartite QCM with an `A` block of `ka` modes; returns it with its index sets.
fn bipartite(seed: u64, pure: bool) -> (DMatrix<f64>, Vec<usize>, Vec<usize>, usize, usize) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let m = r.random_range(2..=3);
    let ka = r.random_range(1..m);
    let v = if pure { random_pure_qcm(&mut r, m, 0.5) } else { random_qcm(&mut r, m, 2.0) };
    let ia: Vec<usize> = (0..ka).chain(m..m + ka).collect();
    let ib: Vec<usize> = (ka..m).chain(m + ka..2 * m).collect();
    (v, ia, ib, ka, m - ka)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_symplectic_invariance(seed in any::<u64>()) {
        let (v, ia, ib, ka, kb) = bipartite(seed, false);
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let l = embed(v.nrows(), &[(&ia, &random_symplectic(&mut r, ka, 0.4)), (&ib, &random_symplectic(&mut r, kb, 0.4))]);
        let a = im_indices(&v, &ia, &ib).unwrap();
        let b = im_indices(&symmetrize(&(&l * &v * l.transpose())), &ia, &ib).unwrap();
        prop_assert!((a - b).abs() < 1e-8 * a.max(1.0));
    }

    #[test]
    fn rescaling_and_inversion(seed in any::<u64>(), t in 0.05f64..20.0) {
        let (v, ia, ib, _, _) = bipartite(seed, false);
        let a = im_indices(&v, &ia, &ib).unwrap();
        prop_assert!((im_indices(&(&v * t), &ia, &ib).unwrap() - a).abs() < 1e-8 * a.max(1.0));
        let inv = symmetrize(&v.clone().try_inverse().unwrap());
        prop_assert!((im_indices(&inv, &ia, &ib).unwrap() - a).abs() < 1e-8 * a.max(1.0));
    }

    #[test]
    fn data_processing(seed in any::<u64>(), w in 0.0f64..10.0) {
        let (v, ia, ib, ka, _) = bipartite(seed, false);
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let mut noisy = v.clone();
        set_principal(&mut noisy, &ia, &(principal(&v, &ia) + random_psd(&mut r, 2 * ka, 2 * ka) * w));
        prop_assert!(im_indices(&noisy, &ia, &ib).unwrap() <= im_indices(&v, &ia, &ib).unwrap() + 1e-9);
    }

    #[test]
    fn uniform_continuity(seed in any::<u64>(), eps in 1e-4f64..0.3) {
        let (v, ia, ib, _, _) = bipartite(seed, false);
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let d = random_symmetric(&mut r, v.nrows()) * eps;
        let w = &v + &d;
        let lo = min_eigenvalue(&v).min(min_eigenvalue(&w));
        prop_assume!(lo > 0.0);
        let gap = (im_indices(&v, &ia, &ib).unwrap() - im_indices(&w, &ia, &ib).unwrap()).abs();
        prop_assert!(gap <= std::f64::consts::LOG2_E * trace_norm_sym(&d) / lo + 1e-9);
    }

    #[test]
    fn pure_state_identities(seed in any::<u64>()) {
        let (g, ia, ib, _, _) = bipartite(seed, true);
        let ma = logdet_entropy(&principal(&g, &ia)).unwrap();
        prop_assert!((im_indices(&g, &ia, &ib).unwrap() - 2.0 * ma).abs() < 1e-8 * ma.max(1.0));
    }

    #[test]
    fn xp_form_decomposition_and_homodyne_limit(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let m = r.random_range(2..=3);
        let ka = r.random_range(1..m);
        let s = random_gl_symplectic(&mut r, m, 0.4);
        let v = Qcm::new_unchecked(symmetrize(&(&s * s.transpose())), Partition::from_pairs(&[("A", ka), ("B", m - ka)]).unwrap());
        let (ix, ip) = im_xp_decompose(&v, &Split::ab()).unwrap();
        let total = gaussent::infomeasures::im_mutual(&v, &Split::ab()).unwrap();
        let ma = logdet_entropy(&v.block(&["A"]).unwrap()).unwrap();
        prop_assert!((ix + ip - total).abs() < 1e-8 * total.max(1.0));
        prop_assert!((ix - ip).abs() < 1e-8 * total.max(1.0));
        let h = homodyne_limit_im(&v, &Split::ab(), &DEFAULT_SCHEDULE).unwrap();
        prop_assert!((h.value - ma).abs() < 1e-4, "{} vs {}", h.value, ma);
    }
}
