//! Property tests for the symplectic, Schur-complement and state-model layers.

use gaussent::linalg::{max_abs, min_eigenvalue, principal, symmetrize};
use gaussent::model::{bona_fide_margin, pure_loss_channel, purify, GaussianChannel, Partition, Qcm};
use gaussent::random::{gaussian_matrix, random_pd, random_psd, random_pure_qcm, random_qcm, random_symplectic};
use gaussent::schur::schur_complement;
use gaussent::symplectic::{
    is_pure_qcm, omega_xp, reorder, symplectic_eigenvalues, williamson, Ordering, PURE_TOL,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn williamson_invariants(seed in any::<u64>(), m in 1usize..=4, pd in any::<bool>()) {
        let mut r = rng(seed);
        let v = if pd { random_pd(&mut r, 2 * m) } else { random_qcm(&mut r, m, 3.0) };
        let w = williamson(&v).unwrap();
        let om = omega_xp(m);
        let scale = max_abs(&w.s).max(1.0).powi(2);
        prop_assert!(max_abs(&(&w.s * &om * w.s.transpose() - &om)) < 1e-10 * scale);
        prop_assert!(max_abs(&(w.reconstruct() - &v)) < 1e-8 * max_abs(&v));
        prop_assert!(w.nu.windows(2).all(|p| p[0] >= p[1]));
        let prod: f64 = w.nu.iter().map(|x| x * x).product();
        prop_assert!(rel_close(prod, v.determinant(), 1e-8));
    }

    #[test]
    fn spectrum_is_congruence_invariant(seed in any::<u64>(), m in 1usize..=4) {
        let mut r = rng(seed);
        let v = random_qcm(&mut r, m, 3.0);
        let s = random_symplectic(&mut r, m, 0.4);
        let a = symplectic_eigenvalues(&v).unwrap();
        let b = symplectic_eigenvalues(&symmetrize(&(&s * &v * s.transpose()))).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn modewise_round_trip_keeps_spectrum(seed in any::<u64>(), m in 1usize..=4) {
        let mut r = rng(seed);
        let v = random_qcm(&mut r, m, 3.0);
        let mw = reorder(&v, Ordering::XpBlock, Ordering::ModeWise).unwrap();
        let q = Qcm::from_modewise(mw, Partition::single("S", m)).unwrap();
        prop_assert_eq!(q.matrix(), &v);
        prop_assert_eq!(symplectic_eigenvalues(q.matrix()).unwrap(), symplectic_eigenvalues(&v).unwrap());
    }

    #[test]
    fn purity_iff_unit_determinant(seed in any::<u64>(), m in 1usize..=4, pure in any::<bool>()) {
        let mut r = rng(seed);
        let v = if pure { random_pure_qcm(&mut r, m, 0.5) } else { random_qcm(&mut r, m, 2.0) };
        prop_assert_eq!(is_pure_qcm(&v, PURE_TOL), (v.determinant() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn schur_determinant_and_positivity(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let k = r.random_range(1..n);
        let block: Vec<usize> = (0..k).collect();
        let m = random_pd(&mut r, n);
        let c = schur_complement(&m, &block).unwrap();
        prop_assert!(rel_close(m.determinant(), principal(&m, &block).determinant() * c.determinant(), 1e-8));
        prop_assert!(min_eigenvalue(&c) > 0.0);
        let bigger = &m + random_psd(&mut r, n, 1);
        let d = schur_complement(&bigger, &block).unwrap() - c;
        prop_assert!(min_eigenvalue(&symmetrize(&d)) > -1e-9);
    }

    #[test]
    fn purification_restricts_to_the_state(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let names: Vec<String> = (0..m).map(|i| format!("S{i}")).collect();
        let pairs: Vec<(&str, usize)> = names.iter().map(|n| (n.as_str(), 1)).collect();
        let v = Qcm::new(random_qcm(&mut r, m, 2.0), Partition::from_pairs(&pairs).unwrap()).unwrap();
        let p = purify(&v).unwrap();
        prop_assert!(is_pure_qcm(p.matrix(), 1e-7));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let back = p.block(&refs).unwrap();
        prop_assert!(max_abs(&(back - v.matrix())) < 1e-9 * max_abs(v.matrix()));
    }

    #[test]
    fn cp_channels_preserve_bona_fide(seed in any::<u64>()) {
        let mut r = rng(seed);
        // Y saturating complete positivity for X, plus PSD noise.
        let x = gaussian_matrix(&mut r, 2, 2);
        let d = (1.0 - x.determinant()).abs();
        let y = DMatrix::identity(2, 2) * d + random_psd(&mut r, 2, 1) * r.random::<f64>();
        let ch = GaussianChannel::new(x, y).unwrap();
        let v = Qcm::new(random_qcm(&mut r, 2, 2.0), Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap()).unwrap();
        let out = ch.apply(&v, &["B"]).unwrap();
        prop_assert!(bona_fide_margin(out.matrix()) > -1e-9);
    }

    #[test]
    fn loss_channels_compose(l1 in 0.0f64..=1.0, l2 in 0.0f64..=1.0) {
        let c = pure_loss_channel(l1).unwrap().compose(&pure_loss_channel(l2).unwrap()).unwrap();
        let direct = pure_loss_channel(l1 * l2).unwrap();
        prop_assert!(max_abs(&(&c.x - &direct.x)) < 1e-12);
        prop_assert!(max_abs(&(&c.y - &direct.y)) < 1e-12);
    }
}
