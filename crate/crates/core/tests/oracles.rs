//! The Newton iterations and the analytic derivatives checked against
//! derivative-free searches and finite differences.

use bsopt_core::cost::{Objective, Restriction};
use bsopt_core::feasibility::{max_slot_compression, min_active_slots, y_min};
use bsopt_core::newton::{newton_1d, newton_2d};
use bsopt_core::{Configuration, DomainPoint, Scenario, ScenarioConfig, SolverConfig, TdSavings};
use nalgebra::{Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scenarios(seed: u64, count: u64) -> Vec<(Configuration, TdSavings, Scenario)> {
    let mut loads = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let preset = Configuration::ALL[(i % 3) as usize];
            let sav = if i % 2 == 0 { TdSavings::Off } else { TdSavings::On };
            let load = 1.0 - loads.random::<f64>();
            let s = ScenarioConfig::from_preset(preset, 100)
                .with_seed(seed)
                .draw(i)
                .unwrap()
                .at_load(load)
                .unwrap();
            (preset, sav, s)
        })
        .collect()
}

/// Zooming grid search: a coarse log-spaced pass, then repeated local
/// refinement around the best cell down to a pitch of 1e-4.
fn grid_minimum(obj: &Objective) -> (f64, f64) {
    let (k, m) = (obj.k(), obj.m());
    let mut best = (f64::INFINITY, 1.0, m);
    for i in 0..400 {
        let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 399.0);
        for j in 1..400 {
            let y = k + (4.0 * m - k) * (j as f64 / 400.0).powi(2);
            let v = obj.value(x, y);
            if v < best.0 {
                best = (v, x, y);
            }
        }
    }
    let (mut hx, mut hy) = (best.1 * 0.05, (best.2 - k).max(1e-3) * 0.05);
    while hx > 1e-4 || hy > 1e-4 {
        let (_, cx, cy) = best;
        for i in -20..=20 {
            for j in -20..=20 {
                let (x, y) = (cx + i as f64 * hx, cy + j as f64 * hy);
                let v = obj.value(x, y);
                if v < best.0 {
                    best = (v, x, y);
                }
            }
        }
        hx *= 0.25;
        hy *= 0.25;
    }
    (best.1, best.2)
}

#[test]
fn newton_2d_matches_grid_search() {
    let stop = SolverConfig::default().stopping();
    for (preset, sav, s) in scenarios(21, 24) {
        let obj = Objective::new(&s, &preset.consumption_params(sav));
        let start = DomainPoint::new(
            (s.n as f64 / min_active_slots(&s).unwrap() as f64).max(1.0),
            0.5 * (s.k + s.m) as f64,
        );
        let out = newton_2d(&obj, start, &stop).unwrap();
        let (gx, gy) = grid_minimum(&obj);
        assert!(
            (out.point.x - gx).abs() < 1e-2 && (out.point.y - gy).abs() < 1e-2,
            "{preset}/{sav}: newton ({}, {}) vs grid ({gx}, {gy})",
            out.point.x,
            out.point.y
        );
        assert!(out.value <= obj.value(gx, gy) * (1.0 + 1e-12));
    }
}

/// A restriction, its interval and an independent evaluation of it.
type Edge<'a> = (Restriction, f64, f64, Box<dyn Fn(f64) -> f64 + 'a>);

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    while b - a > 1e-12 * b.abs().max(1.0) {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

#[test]
fn newton_1d_matches_golden_section() {
    let stop = SolverConfig::default().stopping();
    let mut checked = 0;
    for (preset, sav, s) in scenarios(22, 30) {
        let obj = Objective::new(&s, &preset.consumption_params(sav));
        let m = s.m as f64;
        let x_max = max_slot_compression(&s).unwrap();
        let y_lo = y_min(1.0, &s).min(m);
        let cases: [Edge; 3] = [
            (Restriction::FixX1, y_lo, m, Box::new(|t| obj.value(1.0, t))),
            (Restriction::FixYM, 1.0, x_max, Box::new(|t| obj.value(t, m))),
            (
                Restriction::OnCurve,
                1.0,
                x_max,
                Box::new(|t| obj.value(t, y_min(t, &s))),
            ),
        ];
        for (which, lo, hi, f) in cases {
            if hi - lo < 1e-9 {
                continue;
            }
            let out = newton_1d(&obj, which, lo, hi, 0.5 * (lo + hi), &stop).unwrap();
            let gs = golden_section(&f, lo, hi);
            assert!(
                out.value <= f(gs) * (1.0 + 1e-12),
                "{which:?}: {} vs {}",
                out.value,
                f(gs)
            );
            assert!(
                (out.t - gs).abs() <= 1e-6 * gs.abs().max(1.0),
                "{which:?} on {preset}/{sav}: {} vs {gs}",
                out.t
            );
            checked += 1;
        }
    }
    assert!(checked >= 60);
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut checked = 0;
    for (preset, sav, s) in scenarios(23, 1000) {
        let obj = Objective::new(&s, &preset.consumption_params(sav));
        let (k, m) = (s.k as f64, s.m as f64);
        let x = 1.0 + 19.0 * rng.random::<f64>();
        let y = m - (m - k) * rng.random::<f64>();
        let d = obj.derivatives(x, y);
        if !d.value.is_finite() {
            continue;
        }
        let (hx, hy) = (1e-5 * x, 1e-5 * (y - k).min(1.0));
        let gx = (obj.value(x + hx, y) - obj.value(x - hx, y)) / (2.0 * hx);
        let gy = (obj.value(x, y + hy) - obj.value(x, y - hy)) / (2.0 * hy);
        let scale = d.gradient[0].abs().max(d.gradient[1].abs());
        for (fd, an) in [(gx, d.gradient[0]), (gy, d.gradient[1])] {
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(1e-3 * scale),
                "{fd} vs {an} at ({x}, {y})"
            );
        }
        checked += 1;
    }
    assert!(checked > 900);
}

fn eigen_min(h: [[f64; 2]; 2]) -> f64 {
    let e = SymmetricEigen::new(Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1]));
    e.eigenvalues.min()
}

#[test]
fn hessian_is_psd_without_slot_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for (preset, _, s) in scenarios(24, 2000) {
        let mut cp = preset.consumption_params(TdSavings::Off);
        cp.alpha = 0.5 + 0.5 * rng.random::<f64>();
        let obj = Objective::new(&s, &cp);
        let (k, m) = (s.k as f64, s.m as f64);
        let (x, y) = (1.0 + 19.0 * rng.random::<f64>(), m - (m - k) * rng.random::<f64>());
        let d = obj.derivatives(x, y);
        if !d.value.is_finite() {
            continue;
        }
        let trace = d.hessian[0][0] + d.hessian[1][1];
        assert!(eigen_min(d.hessian) >= -1e-8 * trace, "indefinite at ({x}, {y})");
    }
}

/// The `P0 y / x` term has Hessian determinant `-1/x^4`, so a large enough
/// `P0` makes `f` indefinite somewhere.
#[test]
fn slot_power_can_break_joint_convexity() {
    let s = Scenario::new(4, 100, 40.0, vec![1e-12; 2], vec![6.36e-13; 2], vec![0.05; 2]).unwrap();
    let cp = Configuration::Rru4T4R.consumption_params(TdSavings::On);
    let obj = Objective::new(&s, &cp);
    let found = (0..200)
        .flat_map(|i| (0..50).map(move |j| (1.0 + i as f64 * 0.1, 2.0 + 2.0 * (j as f64 + 0.5) / 50.0)))
        .any(|(x, y)| {
            let d = obj.derivatives(x, y);
            eigen_min(d.hessian) < -1e-8 * (d.hessian[0][0] + d.hessian[1][1])
        });
    assert!(found);
}
