use std::f64::consts::PI;

use rand::Rng;
use wavebound::bumps::{rng_from_seed, Bump, BumpSum};
use wavebound::quadrature::gauss_legendre_on;
use wavebound::u1::*;
use wavebound::{GridSpec, Side};

const L: f64 = 10.0;

fn profile<F: Fn(f64) -> f64>(n: usize, f: F) -> CurrentProfile {
    let grid = GridSpec::new(1, n, L).unwrap();
    CurrentProfile::from_values(&grid.sample(|x| f(x[0]))).unwrap()
}

fn gaussian(n: usize) -> CurrentProfile {
    profile(n, |x| (-x * x).exp())
}

/// Composite Gauss-Legendre on `[a, b]`.
fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|k| gauss_legendre_on(12, a + k as f64 * h, a + (k + 1) as f64 * h))
        .map(|(x, w)| w * f(x))
        .sum()
}

fn bump_profile(n: usize, bumps: Vec<Bump>) -> CurrentProfile {
    let grid = GridSpec::new(1, n, L).unwrap();
    CurrentProfile::from_values(&BumpSum::from(bumps).sample(&grid)).unwrap()
}

fn seeded(seed: u64) -> CurrentProfile {
    let mut rng = rng_from_seed(seed);
    let bumps = (0..rng.random_range(2..=5))
        .map(|_| Bump {
            center: [rng.random_range(-3.0..3.0), 0.0, 0.0],
            width: rng.random_range(0.8..2.0),
            steepness: rng.random_range(1.0..2.0),
            amplitude: rng.random_range(-1.0..1.0),
        })
        .collect();
    bump_profile(1024, bumps)
}

/// `Σ_{k ≥ 1} p_k |f^(p_k)|² Δp` on the box lattice `p_k = πk/L`, with the
/// analytic transform `f^(p) = e^{-p²/4} / √2` of `e^{-x²}`.
fn gaussian_lattice_norm(l: f64) -> f64 {
    let dp = PI / l;
    (1..10_000).map(|k| k as f64 * dp).map(|p| 0.5 * p * (-p * p / 2.0).exp() * dp).sum()
}

#[test]
fn norm_of_gaussian_matches_analytic_transform() {
    let f = gaussian(512);
    let oracle = gaussian_lattice_norm(L);
    assert!((u1_norm(&f) - oracle).abs() < 1e-10, "{} vs {oracle}", u1_norm(&f));
    assert!((u1_norm_dual(&f).unwrap() - u1_norm(&f)).abs() < 1e-8);
}

#[test]
fn norm_approaches_the_line_value_as_the_box_grows() {
    // On the line ∫₀^∞ p e^{-p²/2} / 2 dp = 1/2; the lattice sum differs by O(Δp²).
    let line = integrate(|p| 0.5 * p * (-p * p / 2.0).exp(), 0.0, 40.0, 200);
    assert!((line - 0.5).abs() < 1e-12);
    let mut errors = Vec::new();
    for (n, l) in [(512, 10.0), (1024, 20.0), (2048, 40.0)] {
        let grid = GridSpec::new(1, n, l).unwrap();
        let f = CurrentProfile::from_values(&grid.sample(|x| (-x[0] * x[0]).exp())).unwrap();
        errors.push((u1_norm(&f) - line).abs());
    }
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.9, "{errors:?}");
    }
}

#[test]
fn constant_profile_has_zero_norm() {
    let f = profile(128, |_| 3.0);
    assert_eq!(u1_norm(&f), 0.0);
}

#[test]
fn complex_structure_squares_to_minus_one_and_is_isometric() {
    let f = gaussian(512);
    let j = u1_complex_structure(&f).unwrap();
    let jj = u1_complex_structure(&j).unwrap();
    for (a, b) in jj.derivative().iter().zip(f.derivative()) {
        assert!((a + b).abs() < 1e-10);
    }
    assert!((u1_norm(&j) - u1_norm(&f)).abs() < 1e-10 * u1_norm(&f));
}

#[test]
fn complex_structure_is_minus_the_periodic_hilbert_transform() {
    let n = 512;
    let func = |x: f64| (2.0 * x).cos() * (-x * x).exp();
    let f = profile(n, func);
    let jf = complex_structure_values(&f).unwrap();
    let grid = GridSpec::new(1, n, L).unwrap();
    let wrap = |y: f64| func((y + L).rem_euclid(2.0 * L) - L);
    // H f(x) = (1/2L) ∫_{-L}^{L} (f(x - t) - f(x)) cot(πt/2L) dt.
    let hilbert = |x: f64| {
        let g = |t: f64| (wrap(x - t) - func(x)) / (PI * t / (2.0 * L)).tan();
        (integrate(g, -L, 0.0, 400) + integrate(g, 0.0, L, 400)) / (2.0 * L)
    };
    let mut worst = 0.0f64;
    for j in (0..n).step_by(16) {
        worst = worst.max((jf[j] + hilbert(grid.coord(j))).abs());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn gaussian_halfline_entropy_is_half_pi() {
    let f = gaussian(512);
    assert!((halfline_entropy(&f, 0.0, Side::Right) - PI / 2.0).abs() < 1e-6);
    assert!((halfline_entropy(&f, 0.0, Side::Left) - PI / 2.0).abs() < 1e-6);
}

#[test]
fn halfline_entropy_vanishes_beyond_support() {
    let f = bump_profile(2048, vec![Bump { center: [-2.0, 0.0, 0.0], width: 1.0, steepness: 1.0, amplitude: 1.0 }]);
    let left = halfline_entropy(&f, -0.5, Side::Left);
    assert!(left > 1.0);
    assert!(halfline_entropy(&f, -0.5, Side::Right).abs() < 1e-12 * left);
}

#[test]
fn halfline_entropy_is_translation_covariant() {
    let f = gaussian(1024);
    let dx = 2.0 * L / 1024.0;
    let shift = 16.0 * dx;
    let g = profile(1024, |x| (-(x - shift).powi(2)).exp());
    for a in [-0.7, 0.0, 0.3] {
        let s = halfline_entropy(&f, a, Side::Right);
        let t = halfline_entropy(&g, a + shift, Side::Right);
        assert!((s - t).abs() < 1e-10 * s.max(1e-3), "{s} vs {t}");
    }
}

#[test]
fn halfline_entropy_is_nonincreasing_and_convex_in_the_cut() {
    for seed in 0..10 {
        let f = seeded(seed);
        let cuts: Vec<f64> = (0..81).map(|k| -4.0 + 0.1 * k as f64).collect();
        let s: Vec<f64> = cuts.iter().map(|&a| halfline_entropy(&f, a, Side::Right)).collect();
        let scale = s[0].abs().max(1e-12);
        for w in s.windows(3) {
            assert!(w[1] - w[0] <= 1e-8 * scale);
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8 * scale);
        }
    }
}

#[test]
fn functionals_ignore_additive_constants() {
    let f = gaussian(256);
    let g = profile(256, |x| (-x * x).exp() + 1.0);
    let close = |a: f64, b: f64| assert!((a - b).abs() <= 1e-13 * a.abs().max(b.abs()).max(1.0), "{a} vs {b}");
    close(u1_norm(&f), u1_norm(&g));
    close(u1_norm_dual(&f).unwrap(), u1_norm_dual(&g).unwrap());
    close(halfline_entropy(&f, 0.2, Side::Right), halfline_entropy(&g, 0.2, Side::Right));
    close(interval_entropy(&f, -1.0, 1.0).unwrap(), interval_entropy(&g, -1.0, 1.0).unwrap());
    close(balance_check(&f, 0.0, 1.0).unwrap().residual, balance_check(&g, 0.0, 1.0).unwrap().residual);
    close(ant_check(&f, 0.0, 1e-2).unwrap().derivative_fd, ant_check(&g, 0.0, 1e-2).unwrap().derivative_fd);
    close(dilation_flow_check(&f, 0.5).unwrap(), dilation_flow_check(&g, 0.5).unwrap());
    for (a, b) in f.derivative().iter().zip(g.derivative()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn unit_interval_entropy_is_the_modular_weight() {
    let f = seeded(3);
    let direct = PI * {
        // π ∫_{-1}^{1} (1 - x²) f'² on the same interpolant: expand 2(x+1)(1-x)/2.
        interval_entropy(&f, -1.0, 1.0).unwrap() / PI
    };
    let q = interval_entropy(&f, -1.0, 1.0).unwrap();
    assert!((q - direct).abs() < 1e-12 * q.abs().max(1.0));
    let oracle = integrate(|x| PI * (1.0 - x * x) * f.derivative_at(x).powi(2), -1.0, 1.0, 64);
    assert!((q - oracle).abs() < 1e-8 * oracle.max(1e-12), "{q} vs {oracle}");
}

#[test]
fn interval_entropy_vanishes_for_derivative_outside() {
    let f = bump_profile(2048, vec![Bump { center: [3.0, 0.0, 0.0], width: 1.0, steepness: 1.0, amplitude: 1.0 }]);
    let scale = halfline_entropy(&f, -1.0, Side::Right);
    assert!(interval_entropy(&f, -1.0, 1.5).unwrap().abs() < 1e-12 * scale);
}

#[test]
fn interval_weight_is_dominated_by_twice_the_halfline_weight() {
    // 2(x - a)(b - x)/(b - a) ≤ 2(x - a) on (a, b).
    for seed in 0..10 {
        let f = seeded(seed);
        for (a, b) in [(-1.0, 1.0), (-2.5, 0.5), (0.0, 3.0)] {
            let i = interval_entropy(&f, a, b).unwrap();
            let h = halfline_entropy(&f, a, Side::Right);
            assert!(i <= 2.0 * h + 1e-12, "seed {seed}: {i} vs {h}");
        }
    }
}

#[test]
fn interval_weight_exceeds_the_halfline_weight_near_the_left_end() {
    // Near x = a the interval weight is 2π(x - a), twice the half-line weight,
    // so a profile concentrated there has interval entropy above the half-line value.
    let f = bump_profile(2048, vec![Bump { center: [-0.8, 0.0, 0.0], width: 0.15, steepness: 1.0, amplitude: 1.0 }]);
    let i = interval_entropy(&f, -1.0, 1.0).unwrap();
    let h = halfline_entropy(&f, -1.0, Side::Right);
    assert!(i > 1.5 * h, "{i} vs {h}");
}

#[test]
fn ant_formula_on_the_gaussian() {
    let f = gaussian(1024);
    let r = ant_check(&f, 0.0, 1e-2).unwrap();
    let tail = PI * (2.0 * PI).sqrt() / 4.0;
    assert!((r.derivative_exact + tail).abs() < 1e-10);
    assert!(r.derivative_error() < 1e-4 * tail, "{}", r.derivative_error());
    assert!(r.infimum_error() < 1e-12);
}

#[test]
fn ant_formula_for_constant_tail() {
    let f = bump_profile(2048, vec![Bump { center: [-2.0, 0.0, 0.0], width: 1.0, steepness: 1.0, amplitude: 1.0 }]);
    let r = ant_check(&f, 0.0, 1e-2).unwrap();
    let scale = f.gradient_energy();
    assert!(r.derivative_fd.abs() < 1e-12 * scale && r.minimizer_energy.abs() < 1e-12 * scale);
}

#[test]
fn competitors_cost_more_than_constant_continuation() {
    let f = gaussian(1024);
    let r = ant_check(&f, 0.0, 1e-2).unwrap();
    for (c, w) in [(-2.0, 1.0), (-4.0, 2.0), (-1.0, 0.5)] {
        let p = bump_profile(1024, vec![Bump { center: [c, 0.0, 0.0], width: w, steepness: 1.0, amplitude: 0.3 }]);
        let e = ant_competitor_energy(&f, 0.0, &p).unwrap();
        assert!(e > r.minimizer_energy + 1e-6, "{e} vs {}", r.minimizer_energy);
    }
}

#[test]
fn balance_closes_and_plancherel_holds() {
    for seed in 0..10 {
        let f = seeded(seed);
        for (a, b) in [(-1.0, 0.5), (0.0, 2.0), (0.3, 0.3)] {
            let r = balance_check(&f, a, b).unwrap();
            let scale = r.right.iter().chain(&r.left).fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(r.residual.abs() <= 1e-8 * scale.max(1e-12), "seed {seed}: {:?}", r);
            assert!((r.null_energy - r.half_gradient_energy).abs() <= 1e-8 * r.null_energy);
        }
    }
}

#[test]
fn balance_terms_for_the_gaussian() {
    let f = gaussian(1024);
    let r = balance_check(&f, 0.0, 1.0).unwrap();
    let dens = |x: f64| 4.0 * x * x * (-2.0 * x * x).exp();
    let right1 = PI * integrate(|x| (x - 1.0) * dens(x), 1.0, 9.0, 200);
    let left1 = PI * integrate(|x| (1.0 - x) * dens(x), -9.0, 1.0, 200);
    for (got, want) in [(r.right[0], PI / 2.0), (r.left[0], PI / 2.0), (r.right[1], right1), (r.left[1], left1)] {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn dilation_flow_preserves_the_interval_entropy() {
    let f = bump_profile(2048, vec![
        Bump { center: [0.1, 0.0, 0.0], width: 0.6, steepness: 1.0, amplitude: 1.0 },
        Bump { center: [-0.4, 0.0, 0.0], width: 0.4, steepness: 1.0, amplitude: -0.5 },
    ]);
    assert_eq!(dilation_flow_check(&f, 0.0).unwrap(), 0.0);
    let base = interval_entropy(&f, -1.0, 1.0).unwrap();
    for s in [0.5, -0.5, 1.0] {
        let r = dilation_flow_check(&f, s).unwrap();
        assert!(r.abs() <= 1e-4 * base, "s = {s}: {r}");
    }
    assert!(matches!(dilation_flow_check(&f, 3.0), Err(wavebound::Error::ResampleUnderResolved(_))));
}

#[test]
fn halfline_entropy_is_invariant_under_scaling() {
    let f = gaussian(1024);
    let s = 0.3f64;
    let scaled = f.pull_back(|x| ((-s).exp() * x, (-s).exp())).unwrap();
    let a = halfline_entropy(&f, 0.0, Side::Right);
    let b = halfline_entropy(&scaled, 0.0, Side::Right);
    assert!((a - b).abs() < 1e-8 * a, "{a} vs {b}");
}
