mod common;

use common::printed::{neutral, printed_density, printed_form_factor};
use effcharge::config::select_ground_configuration;
use effcharge::exact::{int, ratio, to_f64};
use effcharge::greens::hydrogen_u;
use effcharge::observables::*;
use effcharge::pt2::Pt2Options;
use effcharge::quad::{GridSpec, RadialGrid};
use num_rational::BigRational;

#[test]
fn printed_densities_are_reproduced_exactly() {
    for z in [2, 6, 8, 10, 54] {
        assert_eq!(neutral(z).printed_terms(), printed_density(z), "Z={z}");
    }
}

#[test]
fn printed_form_factors_are_reproduced_exactly() {
    // equality at more points than the degree proves the rational identity
    // C and O as printed are the transforms for q along the quantisation axis
    let points: Vec<BigRational> = (0..24).map(|i| ratio(i, 4)).collect();
    let axis = int(1);
    for z in [2, 6, 8, 10] {
        let d = neutral(z);
        for q in &points {
            assert_eq!(form_factor_exact(&d, q, Some(&axis)), printed_form_factor(z, q), "Z={z} q={q}");
        }
    }
    for z in [2, 10] {
        let ff = form_factor_average_rational(&neutral(z));
        for q in &points {
            assert_eq!(ff.eval_exact(q), printed_form_factor(z, q), "Z={z} q={q}");
        }
    }
}

#[test]
fn open_shell_average_differs_from_axial_transform() {
    let d = neutral(6);
    let q = ratio(3, 2);
    let avg = form_factor_average_rational(&d).eval_exact(&q);
    assert_eq!(form_factor_exact(&d, &q, None), avg);
    assert_ne!(form_factor_exact(&d, &q, Some(&int(1))), avg);
    // cos(theta_q)^2 = 1/3 zeroes P_2
    let f = form_factor_oriented(&d, 1.5, Some((1.0f64 / 3.0).sqrt()));
    assert!((f - to_f64(&avg)).abs() < 1e-12);
}

#[test]
fn spherical_requires_symmetric_configuration() {
    let (cfg, sol) = select_ground_configuration(6, 6).unwrap();
    assert!(form_factor_spherical(&cfg, &sol, 1.0).is_err());
    let (cfg, sol) = select_ground_configuration(10, 10).unwrap();
    assert!((form_factor_spherical(&cfg, &sol, 0.0).unwrap() - 10.0).abs() < 1e-13);
}

#[test]
fn normalization_and_forward_scattering_up_to_xenon() {
    for z in 1..=54u32 {
        let d = neutral(z);
        assert_eq!(d.electron_count(), int(i64::from(z)), "Z={z}");
        let ff = form_factor_average_rational(&d);
        assert_eq!(ff.eval_exact(&int(0)), int(i64::from(z)), "Z={z}");
        assert!((form_factor_numeric(&d, 0.0) - f64::from(z)).abs() < 1e-9);
        let grid = RadialGrid::new(GridSpec::new(400.0 / d.zstar, 0.25 / d.zstar));
        let n = grid.integrate(&grid.sample(|r| d.radial_density(r)));
        assert!((n - f64::from(z)).abs() < 1e-9, "Z={z}: {n}");
    }
}

#[test]
fn density_is_non_negative() {
    for z in [5, 6, 8, 26, 54] {
        let d = neutral(z);
        for i in 0..400 {
            let r = 0.02 * f64::from(i);
            for j in 0..=12 {
                let c = -1.0 + f64::from(j) / 6.0;
                assert!(d.eval(r, c) >= -1e-14, "Z={z} r={r} cos={c}");
            }
        }
    }
}

/// Independent Hankel transform: hydrogen functions from the Laguerre
/// recurrence, Gauss-Legendre panels.
fn hankel_oracle(z: u32, q: f64) -> f64 {
    let (cfg, sol) = select_ground_configuration(z, z as usize).unwrap();
    let zs = sol.zstar;
    let r_max = 60.0 * 49.0 / zs;
    let grid = RadialGrid::new(GridSpec::new(r_max, 0.05));
    let f = grid.sample(|r| {
        let rho: f64 = cfg.orbitals().iter().map(|o| hydrogen_u(o.n, o.l, zs * r).powi(2) * zs).sum();
        let x = q * r;
        let j0 = if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        rho * j0
    });
    grid.integrate(&f)
}

#[test]
fn spherical_form_factor_matches_hankel_oracle() {
    let qs = [0.0, 0.1, 0.3, 0.7, 1.0, 2.0, 3.5, 5.0, 8.0, 12.0];
    for z in [2, 10, 18, 20, 29] {
        let (cfg, sol) = select_ground_configuration(z, z as usize).unwrap();
        for &q in &qs {
            let f = form_factor_spherical(&cfg, &sol, q).unwrap();
            let o = hankel_oracle(z, q);
            assert!((f - o).abs() < 1e-8, "Z={z} q={q}: {f} vs {o}");
        }
    }
}

#[test]
fn numeric_transform_agrees_with_rational_form() {
    let (cfg, sol) = select_ground_configuration(10, 10).unwrap();
    let d = density_zeroth(&cfg, &sol).unwrap();
    for i in 0..40 {
        let q = 0.25 * f64::from(i);
        let a = form_factor_numeric(&d, q);
        let b = form_factor_spherical(&cfg, &sol, q).unwrap();
        assert!((a - b).abs() < 1e-10, "q={q}");
    }
}

#[test]
fn oriented_form_factor_averages_to_spherical_part() {
    let d = neutral(6);
    // P_2 averages to zero over the sphere: Gauss-Legendre in cos(theta_q)
    let (x, w) = effcharge::quad::gauss_legendre(8);
    for q in [0.05, 0.7, 2.0] {
        let avg: f64 = x.iter().zip(&w).map(|(c, w)| 0.5 * w * form_factor_oriented(&d, q, Some(*c))).sum();
        assert!((avg - form_factor_numeric(&d, q)).abs() < 1e-12, "q={q}");
    }
    // the small-q series branch against exact arithmetic
    for q in [ratio(1, 100), ratio(1, 20), ratio(1, 8)] {
        let exact = to_f64(&form_factor_exact(&d, &q, Some(&int(1))));
        let f = form_factor_oriented(&d, to_f64(&q), Some(1.0));
        assert!((f - exact).abs() < 1e-12, "q={q}: {f} vs {exact}");
    }
}

#[test]
fn oriented_form_factor_matches_direct_quadrature() {
    let d = neutral(6);
    let q = 1.3;
    let grid = RadialGrid::new(GridSpec::new(80.0, 0.1));
    let (x, w) = effcharge::quad::gauss_legendre(24);
    // q along z: e^{i q r cos} integrated over cos, real part
    let f: f64 = grid
        .r
        .iter()
        .zip(&grid.w)
        .map(|(&r, &wr)| {
            let ang: f64 = x.iter().zip(&w).map(|(&c, &wc)| wc * d.eval(r, c) * (q * r * c).cos()).sum();
            2.0 * std::f64::consts::PI * r * r * wr * ang
        })
        .sum();
    assert!((f - form_factor_oriented(&d, q, Some(1.0))).abs() < 1e-10);
}

#[test]
fn s_q_conversion() {
    assert_eq!(s_to_q(0.0), 0.0);
    let q = s_to_q(1.0);
    assert!((6.6498..6.6499).contains(&q), "{q}");
    for s in [0.1, 0.5, 1.7] {
        assert!((q_to_s(s_to_q(s)) - s).abs() < 1e-15);
    }
}

#[test]
fn first_order_correction_conserves_charge() {
    for z in [2, 3, 10, 18] {
        let (cfg, sol) = select_ground_configuration(z, z as usize).unwrap();
        let d = density_first_order(&cfg, &sol, &Pt2Options::default()).unwrap();
        let n0 = d.integrate(&d.zeroth);
        let dn = d.integrate(&d.correction);
        assert!((n0 - f64::from(z)).abs() < 1e-9);
        assert!(dn.abs() < 1e-6, "Z={z}: {dn}");
        assert!(d.correction.iter().any(|c| c.abs() > 1e-4));
    }
}
