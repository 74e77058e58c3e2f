use std::f64::consts::PI;
use wavebound::bekenstein::{
    check_localized, check_nonlocalized, local_energy, massless_modular_m, modular_bound_margins, modular_g_entropy,
    Correction, Surrogate, Verdict,
};
use wavebound::bumps::{rng_from_seed, BumpSampler, BumpSum, Container};
use wavebound::entropy::ball_entropy_massless;
use wavebound::gamma::{gamma_correction, CorrectionSettings};
use wavebound::{CauchyData, Field, GridSpec, Region};

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn draw(dim: usize, container: Container, widths: (f64, f64), seed: u64) -> (BumpSum, BumpSum) {
    let s = BumpSampler::new(dim, container, widths);
    let mut rng = rng_from_seed(seed);
    (s.draw(&mut rng), s.draw(&mut rng))
}

fn in_ball(dim: usize, n: usize, l: f64, mass: f64, seed: u64) -> CauchyData {
    let grid = GridSpec::new(dim, n, l).unwrap();
    let (f, g) = draw(dim, Container::Ball { center: [0.0; 3], radius: 1.0 }, (0.4, 0.7), seed);
    CauchyData::new(f.sample(&grid), g.sample(&grid), mass).unwrap()
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
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
            (t, 2.0 / ((1.0 - t * t) * dp * dp))
        })
        .collect()
}

#[test]
fn local_energy_of_crossing_data_matches_polar_quadrature() {
    // The energy density is evaluated from the closed-form bumps and integrated
    // in polar coordinates: Gauss-Legendre panels in r, the trapezoid rule in θ.
    let mass = 0.7;
    let grid = GridSpec::new(2, 256, 4.0).unwrap();
    let nodes = gauss_legendre(12);
    for seed in 0..3 {
        let (f, g) = draw(2, Container::Ball { center: [0.3, 0.0, 0.0], radius: 2.2 }, (0.8, 1.2), seed);
        let data = CauchyData::new(f.sample(&grid), g.sample(&grid), mass).unwrap();
        let t00 = |x: [f64; 3]| {
            let (v, d, w) = (f.value(x), f.gradient(x), g.value(x));
            0.5 * (d[0] * d[0] + d[1] * d[1] + mass * mass * v * v + w * w)
        };
        let (panels, angles) = (200, 2048);
        let mut oracle = 0.0;
        for k in 0..panels {
            let (r0, r1) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
            for &(t, w) in &nodes {
                let r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * t;
                let ring: f64 = (0..angles)
                    .map(|j| {
                        let th = 2.0 * PI * j as f64 / angles as f64;
                        t00([r * th.cos(), r * th.sin(), 0.0])
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI
                    / angles as f64;
                oracle += 0.5 * (r1 - r0) * w * r * ring;
            }
        }
        let got = local_energy(&data, &Region::ball([0.0; 3], 1.0)).unwrap();
        assert!(relative(got, oracle) < 1e-4, "seed {seed}: {got} vs {oracle}");
    }
}

#[test]
fn localized_bound_holds_across_dimensions_masses_and_shapes() {
    for dim in 1..=3 {
        let n = if dim == 3 { 128 } else { 256 };
        let masses: &[f64] = if dim == 1 { &[0.5, 1.0, 2.0] } else { &[0.0, 0.5, 1.0, 2.0] };
        for &mass in masses {
            for seed in 0..3 {
                let data = in_ball(dim, n, 1.5, mass, seed);
                for region in [Region::ball([0.0; 3], 1.0), Region::cube([0.0; 3], 1.0)] {
                    let r = check_localized(&data, &region).unwrap();
                    assert!(r.passed(), "d {dim} m {mass} seed {seed}: {r:?}");
                    let exact = mass == 0.0 && dim >= 2 && matches!(region, Region::Ball { .. });
                    assert_eq!(r.surrogate == Surrogate::ExactBall, exact);
                    assert!((r.halfspace_mean - r.bound).abs() <= 1e-10 * r.bound);
                }
            }
        }
    }
}

#[test]
fn report_values_are_euclidean_covariant() {
    // Quarter turns and whole-cell translations map the grid to itself.
    let grid = GridSpec::new(2, 256, 3.0).unwrap();
    let (f, g) = draw(2, Container::Ball { center: [0.25, -0.125, 0.0], radius: 1.0 }, (0.4, 0.7), 8);
    let base = CauchyData::new(f.sample(&grid), g.sample(&grid), 0.0).unwrap();
    let ball = Region::ball([0.25, -0.125, 0.0], 1.0);
    let rotate = |field: &Field| {
        let mut out = grid.zeros();
        let n = grid.n();
        for (i, v) in field.values().iter().enumerate() {
            let [j, k, _] = grid.unflatten(i);
            // (x, y) ↦ (-y, x) about the origin node.
            let (j2, k2) = ((n - k) % n, j);
            out.values_mut()[grid.flatten([j2, k2, 0])] = *v;
        }
        out
    };
    let rotated = CauchyData::new(rotate(base.f()), rotate(base.g()), 0.0).unwrap();
    let rball = Region::ball([0.125, 0.25, 0.0], 1.0);
    let (a, b) = (check_localized(&base, &ball).unwrap(), check_localized(&rotated, &rball).unwrap());
    assert!(relative(a.entropy, b.entropy) < 1e-8 && relative(a.energy, b.energy) < 1e-8);

    // Massive data in a box: translation by whole cells.
    let shift = 8;
    let translate = |field: &Field| {
        let mut out = grid.zeros();
        let n = grid.n();
        for (i, v) in field.values().iter().enumerate() {
            let [j, k, _] = grid.unflatten(i);
            out.values_mut()[grid.flatten([(j + shift) % n, k, 0])] = *v;
        }
        out
    };
    let massive = CauchyData::new(base.f().clone(), base.g().clone(), 1.0).unwrap();
    let moved = CauchyData::new(translate(base.f()), translate(base.g()), 1.0).unwrap();
    let dx = shift as f64 * grid.dx();
    let cube = Region::cube([0.25, -0.125, 0.0], 1.0);
    let mcube = Region::cube([0.25 + dx, -0.125, 0.0], 1.0);
    let (a, b) = (check_localized(&massive, &cube).unwrap(), check_localized(&moved, &mcube).unwrap());
    for (x, y) in [(a.entropy, b.entropy), (a.energy, b.energy), (a.halfspace_right, b.halfspace_right)] {
        assert!(relative(x, y) < 1e-8, "{x} {y}");
    }
}

#[test]
fn massless_ball_entropy_grows_with_the_ball() {
    let data = in_ball(2, 256, 2.5, 0.0, 4);
    let mut last = 0.0;
    for r in [1.0, 1.1, 1.25, 1.5, 2.0] {
        let s = ball_entropy_massless(&data, &Region::ball([0.0; 3], r)).unwrap();
        assert!(s >= last, "R = {r}");
        last = s;
    }
}

#[test]
fn modular_profile_and_entropy_consistency() {
    let m = massless_modular_m(1.0, 101).unwrap();
    assert_eq!(m.values[0], 0.5);
    assert_eq!(*m.values.last().unwrap(), 0.0);
    assert!(m.values.iter().all(|&v| (0.0..=1.0).contains(&v)));

    let data = in_ball(2, 256, 1.5, 0.0, 6);
    let ball = Region::ball([0.0; 3], 1.0);
    let g_only = CauchyData::new(data.grid().zeros(), data.g().clone(), 0.0).unwrap();
    let s = ball_entropy_massless(&g_only, &ball).unwrap();
    assert!(relative(modular_g_entropy(data.g(), &ball).unwrap(), s) < 1e-6);
}

#[test]
fn massless_g_margin_matches_closed_forms() {
    let data = in_ball(2, 256, 1.5, 0.0, 12);
    let grid = *data.grid();
    let (mut g2, mut weighted) = (0.0, 0.0);
    for (i, v) in data.g().values().iter().enumerate() {
        let x = grid.point(i);
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 < 1.0 {
            g2 += v * v;
            weighted += (1.0 - r2) * v * v;
        }
    }
    let oracle = (PI * g2 - 0.5 * PI * weighted) * grid.cell_volume();
    let (gm, fm) = modular_bound_margins(&data, &Region::ball([0.0; 3], 1.0)).unwrap();
    assert!(gm > 0.0 && fm > 0.0);
    assert!(relative(gm, oracle) < 1e-10, "{gm} vs {oracle}");
}

#[test]
fn massive_interval_margins_are_nonnegative() {
    let interval = Region::ball([0.0; 3], 1.0);
    for seed in 0..100 {
        let data = in_ball(1, 256, 1.5, 1.0, 500 + seed);
        let (gm, fm) = modular_bound_margins(&data, &interval).unwrap();
        let scale = data.total_energy();
        assert!(gm >= -1e-8 * scale && fm >= -1e-8 * scale, "seed {seed}: {gm} {fm}");
    }
}

fn smooth_step(t: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    psi(1.0 - t) / (psi(1.0 - t) + psi(t))
}

#[test]
fn constant_data_violate_the_localized_bound_but_not_the_corrected_one() {
    let grid = GridSpec::new(2, 256, 4.0).unwrap();
    let f = grid.sample(|x| smooth_step(((x[0] * x[0] + x[1] * x[1]).sqrt() - 1.3) / 1.5));
    let data = CauchyData::new(f, grid.zeros(), 0.0).unwrap();
    let ball = Region::ball([0.0; 3], 1.0);

    let plain = check_nonlocalized(&data, &ball, Correction::NONE).unwrap();
    assert_eq!(plain.verdict, Verdict::Fail);
    // f ≡ 1 on the ball: T₀₀ vanishes there and S = π D |B| = π²/2.
    assert!(plain.energy.abs() < 1e-10);
    assert!(relative(plain.entropy, 0.5 * PI * PI) < 1e-8, "{}", plain.entropy);

    let c = gamma_correction(&data, &ball, CorrectionSettings::default()).unwrap();
    let corrected = check_nonlocalized(&data, &ball, c.correction).unwrap();
    assert!(corrected.passed(), "{corrected:?}");
    assert!(corrected.uncorrected_margin < 0.0);
}

#[test]
fn zero_trace_needs_no_correction() {
    let data = in_ball(2, 256, 1.5, 0.0, 2);
    let ball = Region::ball([0.0; 3], 1.0);
    let c = gamma_correction(&data, &ball, CorrectionSettings { resolution: 64, ..Default::default() }).unwrap();
    assert!(c.correction.value.abs() < 1e-20);
    let a = check_nonlocalized(&data, &ball, Correction::NONE).unwrap();
    let b = check_localized(&data, &ball).unwrap();
    assert!(relative(a.entropy, b.entropy) < 1e-8);
}

#[test]
fn corrected_bound_holds_on_seeded_crossing_data() {
    let ball = Region::ball([0.0; 3], 1.0);
    for (dim, mass) in [(2, 0.0), (2, 1.0), (1, 1.0)] {
        let n = if dim == 1 { 512 } else { 256 };
        let grid = GridSpec::new(dim, n, 4.0).unwrap();
        for seed in 0..3 {
            let (f, g) = draw(dim, Container::Ball { center: [0.0; 3], radius: 2.2 }, (0.8, 1.2), 70 + seed);
            let data = CauchyData::new(f.sample(&grid), g.sample(&grid), mass).unwrap();
            let settings = CorrectionSettings { resolution: 64, ..Default::default() };
            let c = gamma_correction(&data, &ball, settings).unwrap();
            let r = check_nonlocalized(&data, &ball, c.correction).unwrap();
            // The massive surrogate only bounds the entropy from above, so it can
            // exceed the bound without contradicting it.
            match r.surrogate {
                Surrogate::ExactBall => assert!(r.passed(), "d {dim} m {mass} seed {seed}: {r:?}"),
                Surrogate::HalfSpace => assert_ne!(r.verdict, Verdict::Fail),
            }
        }
    }
}
