use proptest::prelude::*;
use std::f64::consts::PI;
use wavebound::bumps::{rng_from_seed, Bump, BumpSampler, BumpSum, Container};
use wavebound::spectral::gradient;
use wavebound::{inner_product, norm_pm, CauchyData, GridSpec, Sign, SpectralField};

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // Split first so that narrow peaks are not missed by the initial estimate.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            simpson(&f, x0, x1, f0, fm, f1, h / 6.0 * (f0 + 4.0 * fm + f1), tol / pieces as f64, 40)
        })
        .sum()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Transform of `e^{-α(x - c)²}` with the unitary convention: modulus and phase shift.
fn gaussian_hat(alpha: f64, p: f64) -> f64 {
    (2.0 * alpha).sqrt().recip() * (-p * p / (4.0 * alpha)).exp()
}

fn seeded(dim: usize, n: usize, l: f64, mass: f64, seed: u64) -> (CauchyData, BumpSum, BumpSum) {
    seeded_with_threshold(dim, n, l, mass, seed, 1e-8)
}

/// Coarse grids resolve the steepest bumps only to a looser decay threshold.
fn seeded_with_threshold(dim: usize, n: usize, l: f64, mass: f64, seed: u64, threshold: f64) -> (CauchyData, BumpSum, BumpSum) {
    let grid = GridSpec::new(dim, n, l).unwrap();
    let c = Container::Box { lo: [-0.45 * l; 3], hi: [0.45 * l; 3] };
    let s = BumpSampler::new(dim, c, (0.3 * l, 0.4 * l));
    let mut rng = rng_from_seed(seed);
    let (bf, bg) = (s.draw(&mut rng), s.draw(&mut rng));
    let data = CauchyData::with_decay_threshold(bf.sample(&grid), bg.sample(&grid), mass, threshold).unwrap();
    (data, bf, bg)
}

#[test]
fn gaussian_norms_match_the_analytic_transform() {
    // The lattice sum in p converges like e^{-2π/Δp} because μ^{±1} has branch
    // points at p = ±i; L = 20 puts that below 10⁻¹⁶.
    let grid = GridSpec::new(1, 512, 20.0).unwrap();
    let f = grid.sample(|x| (-x[0] * x[0]).exp());
    for (sign, power) in [(Sign::Plus, 0.5), (Sign::Minus, -0.5)] {
        let oracle = adaptive(|p| (p * p + 1.0).powf(power) * gaussian_hat(1.0, p).powi(2), -40.0, 40.0, 1e-14);
        let got = norm_pm(&f, 1.0, sign).unwrap();
        assert!(relative(got, oracle) < 1e-10, "{sign:?}: {got} vs {oracle}");
    }
}

#[test]
fn real_part_of_the_pairing_matches_the_analytic_transform() {
    let grid = GridSpec::new(1, 512, 20.0).unwrap();
    let gauss = |a: f64, c: f64| grid.sample(move |x| (-a * (x[0] - c).powi(2)).exp());
    let a = CauchyData::new(gauss(1.0, 0.0), gauss(2.0, 0.0), 1.0).unwrap();
    let b = CauchyData::new(gauss(1.0, 0.5), gauss(1.0, -0.3), 1.0).unwrap();
    let mu = |p: f64| (p * p + 1.0).sqrt();
    // Re(û v̂*) for centres c₁, c₂ is |û||v̂| cos(p (c₁ - c₂)).
    let plus = adaptive(|p| mu(p) * gaussian_hat(1.0, p).powi(2) * (0.5 * p).cos(), -40.0, 40.0, 1e-14);
    let minus = adaptive(|p| gaussian_hat(2.0, p) * gaussian_hat(1.0, p) * (0.3 * p).cos() / mu(p), -40.0, 40.0, 1e-14);
    let z = inner_product(&a, &b).unwrap();
    assert!(relative(z.re, plus + minus) < 1e-10, "{} vs {}", z.re, plus + minus);
    let zr = inner_product(&b, &a).unwrap();
    assert!((z.re - zr.re).abs() < 1e-14 && (z.im + zr.im).abs() < 1e-14);
}

#[test]
fn complex_structure_of_a_bump_matches_quadrature() {
    let grid = GridSpec::new(1, 512, 8.0).unwrap();
    let bump = Bump { center: [0.4, 0.0, 0.0], width: 3.0, steepness: 1.0, amplitude: 1.0 };
    let a = CauchyData::new(grid.sample(|x| bump.value(x)), grid.zeros(), 1.0).unwrap();
    let ia = a.apply_complex_structure().unwrap();
    assert!(ia.f().max_abs() < 1e-14);

    // f̂(p) by the trapezoid rule over the support, then -μf at a few points by
    // Gauss-Legendre in p. The bump is even about its centre, so f̂ e^{ipc} is real.
    let ys: Vec<f64> = (0..=6000).map(|i| -2.6 + 6.0 * i as f64 / 6000.0).collect();
    let dy = 6.0 / 6000.0;
    let fhat = |p: f64| -> f64 {
        ys.iter().map(|&y| bump.value([y, 0.0, 0.0]) * (p * (y - 0.4)).cos()).sum::<f64>() * dy / (2.0 * PI).sqrt()
    };
    let (nodes, weights) = gauss_legendre_16();
    let panels = 600;
    let pmax = 150.0;
    let mut samples = Vec::new();
    for k in 0..panels {
        let (p0, p1) = (-pmax + 2.0 * pmax * k as f64 / panels as f64, -pmax + 2.0 * pmax * (k + 1) as f64 / panels as f64);
        for (t, w) in nodes.iter().zip(&weights) {
            let p = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * t;
            samples.push((p, 0.5 * (p1 - p0) * w, fhat(p)));
        }
    }
    let scale = ia.g().max_abs();
    for x in [-2.0, -0.5, 0.4, 1.3, 3.0] {
        let oracle: f64 = -samples
            .iter()
            .map(|&(p, w, fh)| w * (p * p + 1.0).sqrt() * fh * (p * (x - 0.4)).cos())
            .sum::<f64>()
            / (2.0 * PI).sqrt();
        let got = ia.g().interpolate([x, 0.0, 0.0]);
        assert!((got - oracle).abs() < 1e-6 * scale, "x = {x}: {got} vs {oracle}");
    }
}

fn gauss_legendre_16() -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P₁₆ from the Chebyshev guesses.
    let n = 16;
    let mut x = Vec::new();
    let mut w = Vec::new();
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x.push(t);
        w.push(2.0 / ((1.0 - t * t) * dp * dp));
    }
    (x, w)
}

#[test]
fn massless_packet_moves_left_at_unit_speed() {
    let grid = GridSpec::new(2, 128, 16.0).unwrap();
    let profile = |x: [f64; 3]| (-(x[0] - 2.0).powi(2)).exp() * (-x[1] * x[1] / 16.0).exp();
    let f = grid.sample(profile);
    // f(x₁ + t, x₂) to leading order: g = ∂₁f.
    let g = gradient(&f).remove(0);
    let a = CauchyData::new(f.clone(), g, 0.0).unwrap();
    let t = 3.0;
    let b = a.evolve_with_threshold(t, 1e-6).unwrap();
    let n = grid.n();
    let values = b.f().values();
    let mut best = (0, f64::MIN);
    for shift in 0..n {
        let c: f64 = (0..grid.len())
            .map(|i| {
                let [j, k, _] = grid.unflatten(i);
                values[i] * f.values()[grid.flatten([(j + shift) % n, k, 0])]
            })
            .sum();
        if c > best.1 {
            best = (shift, c);
        }
    }
    let moved = best.0 as f64 * grid.dx();
    assert!((moved - t).abs() <= grid.dx() + 1e-12, "moved {moved}");
}

#[test]
fn seeded_energy_matches_trapezoid_oracle() {
    for seed in 0..5 {
        let (a, bf, bg) = seeded(1, 256, 6.0, 1.0, seed);
        let fine = 8 * 256;
        let dx = 12.0 / fine as f64;
        let oracle: f64 = (0..fine)
            .map(|i| {
                let x = [-6.0 + i as f64 * dx, 0.0, 0.0];
                let (f, df, g) = (bf.value(x), bf.gradient(x)[0], bg.value(x));
                0.5 * (df * df + f * f + g * g) * dx
            })
            .sum();
        let e = a.total_energy();
        assert!(relative(e, oracle) < 1e-8, "seed {seed}: {e} vs {oracle}");
        assert!(relative(a.energy_expectation(), e) < 1e-8);
    }
}

#[test]
fn stress_energy_examples() {
    let grid = GridSpec::new(2, 128, 4.0).unwrap();
    let zero = CauchyData::zeros(&grid, 0.5).unwrap();
    assert_eq!(zero.total_energy(), 0.0);
    let (a, _, _) = seeded(2, 128, 4.0, 0.0, 3);
    let e = a.stress_energy();
    let (s, si) = (e.t00.integral(), e.t00i.integral());
    assert!((s - si).abs() <= 1e-8 * s);
}

#[test]
fn evolution_at_time_zero_is_the_identity() {
    let (a, _, _) = seeded(2, 128, 4.0, 1.0, 9);
    let b = a.evolve(0.0).unwrap();
    assert_eq!(b.f(), a.f());
    assert_eq!(b.g(), a.g());
}

#[test]
fn boundary_mass_is_rejected() {
    let grid = GridSpec::new(1, 128, 4.0).unwrap();
    let f = grid.sample(|x| (-x[0] * x[0] / 4.0).exp());
    assert!(matches!(CauchyData::new(f, grid.zeros(), 1.0), Err(wavebound::Error::DecayViolated { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn seeded_data_satisfy_the_structural_identities(seed in any::<u64>(), dim in 1usize..=3, t in 0.1f64..1.0) {
        let n = if dim == 3 { 32 } else { 64 };
        let mass = if dim == 1 { 1.0 } else { 0.5 };
        let (a, _, _) = seeded_with_threshold(dim, n, 8.0, mass, seed, 1e-2);
        prop_assert!(a.t00().values().iter().all(|&v| v >= 0.0));

        let s = SpectralField::forward(a.f());
        let spectral = s.weighted_mass(|_| 1.0);
        prop_assert!(relative(spectral, a.f().l2_squared()) < 1e-12);

        let norm = inner_product(&a, &a).unwrap().re;
        let ia = a.apply_complex_structure().unwrap();
        prop_assert!(relative(inner_product(&ia, &ia).unwrap().re, norm) < 1e-10);
        prop_assert!(inner_product(&a, &a).unwrap().im.abs() < 1e-12 * norm);

        let b = a.evolve_with_threshold(t, 1.0).unwrap();
        prop_assert!(relative(inner_product(&b, &b).unwrap().re, norm) < 1e-10);
        prop_assert!(relative(b.energy_expectation(), a.energy_expectation()) < 1e-10);
    }
}
