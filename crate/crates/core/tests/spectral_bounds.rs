use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use wavebound::bumps::rng_from_seed;
use wavebound::eigen::{ground_state, lambda1, rayleigh_quotient, RadialField, RadialMesh};

/// Lowest eigenvalue of `-((1 + x²) u')' = λ u` on `(-1, 1)` with Dirichlet ends,
/// by a dense three-point discretization on `m` intervals.
fn dense_interval_lambda(m: usize) -> f64 {
    let h = 2.0 / m as f64;
    let k = m - 1;
    let w = |x: f64| 1.0 + x * x;
    let mut a = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        let x = -1.0 + (j + 1) as f64 * h;
        let (wl, wr) = (w(x - 0.5 * h), w(x + 0.5 * h));
        a[(j, j)] = (wl + wr) / (h * h);
        if j + 1 < k {
            a[(j, j + 1)] = -wr / (h * h);
            a[(j + 1, j)] = -wr / (h * h);
        }
    }
    SymmetricEigen::new(a).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn quotient_of_parabola_in_the_disk_tends_to_ten() {
    // ∫(1 + r²) 4r² r dr = 5/3 and ∫(1 - r²)² r dr = 1/6.
    let mut errors = Vec::new();
    for n in [256, 512, 1024] {
        let f = RadialField::from_fn(RadialMesh::new(2, n).unwrap(), |r| 1.0 - r * r);
        errors.push((rayleigh_quotient(&f).unwrap() - 10.0).abs());
    }
    assert!(errors[2] < 1e-4, "{errors:?}");
    let order = (errors[1] / errors[2]).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order}");
}

#[test]
fn quotient_is_scale_invariant() {
    let mesh = RadialMesh::new(3, 128).unwrap();
    let f = RadialField::from_fn(mesh, |r| (1.0 - r) * (1.0 + r * r));
    let g = RadialField { mesh, values: f.values.iter().map(|v| 2.0 * v).collect() };
    let (a, b) = (rayleigh_quotient(&f).unwrap(), rayleigh_quotient(&g).unwrap());
    assert!((a - b).abs() < 1e-13 * a);
}

#[test]
fn seeded_trial_functions_respect_the_bound() {
    let mut rng = rng_from_seed(11);
    for d in [2usize, 3] {
        let mesh = RadialMesh::new(d, 256).unwrap();
        for _ in 0..50 {
            let c: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = RadialField::from_fn(mesh, |r| {
                (1.0 - r * r) * c.iter().enumerate().map(|(k, a)| a * r.powi(2 * k as i32)).sum::<f64>()
            });
            if let Ok(q) = rayleigh_quotient(&f) {
                assert!(q >= (d - 1) as f64, "d = {d}: {q}");
            }
        }
    }
}

#[test]
fn lowest_eigenvalues_clear_the_bound() {
    for d in [2usize, 3] {
        let l = lambda1(d, 256).unwrap();
        let bound = (d - 1) as f64;
        assert!(l.coarse.lambda >= bound - 1e-3);
        assert!(l.fine.lambda >= bound - 1e-3);
        assert!(l.extrapolated >= bound - 1e-3);
        assert!(l.resolution_shift() < 1e-4, "shift {}", l.resolution_shift());
        assert!(!l.fine.state.changes_sign());
        let q = rayleigh_quotient(&l.fine.state).unwrap();
        assert!((q - l.fine.lambda).abs() < 1e-8 * l.fine.lambda);
    }
}

#[test]
fn extrapolation_is_stable_across_resolutions() {
    for d in [2usize, 3] {
        let a = lambda1(d, 256).unwrap().extrapolated;
        let b = lambda1(d, 512).unwrap().extrapolated;
        assert!((a - b).abs() < 1e-4 * b, "d = {d}: {a} vs {b}");
    }
}

#[test]
fn one_dimensional_value_matches_dense_interval_oracle() {
    let l = lambda1(1, 256).unwrap();
    assert!(l.extrapolated >= 0.0);
    let (c, f) = (dense_interval_lambda(400), dense_interval_lambda(800));
    let oracle = (4.0 * f - c) / 3.0;
    assert!((l.extrapolated - oracle).abs() < 1e-4 * oracle, "{} vs {oracle}", l.extrapolated);
}

#[test]
fn ground_state_is_normalized_and_positive() {
    let g = ground_state(RadialMesh::new(2, 128).unwrap()).unwrap();
    assert!((g.state.mass() - 1.0).abs() < 1e-12);
    assert!(g.state.values.iter().all(|&v| v > 0.0));
}
