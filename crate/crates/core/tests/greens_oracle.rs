mod common;

use effcharge::greens::{green_radial, reduced_green_radial, GreenEnergy, RadialGreenKernel};

const RS: [f64; 5] = [0.5, 1.0, 1.8, 3.0, 5.0];
const RPS: [f64; 5] = [0.8, 2.0, 2.6, 4.0, 6.0];

/// Deviations are measured against the largest kernel value on the grid.
fn block_scale(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
}

#[test]
fn closed_form_matches_spectral_sum() {
    let mut worst = 0.0f64;
    for l in 0..3 {
        for e in [-2.0, -0.3, -0.05] {
            let oracle = common::spectral_green(l, e, &RS, &RPS, &[]);
            let ge = GreenEnergy::from_energy(e).unwrap();
            let scale = block_scale(&oracle);
            for (i, &r) in RS.iter().enumerate() {
                for (j, &rp) in RPS.iter().enumerate() {
                    let g = green_radial(l, ge, r, rp).unwrap();
                    let err = (g - oracle[i][j]).abs() / scale;
                    worst = worst.max(err);
                    assert!(err < 1e-5, "l={l} E={e} r={r} r'={rp}: {g} vs {}", oracle[i][j]);
                }
            }
        }
    }
    println!("worst relative deviation {worst:.2e}");
}

#[test]
fn reduced_kernel_matches_oracle_at_subtracted_levels() {
    // He-like: 1s removed at E_1s; Li-like: 1s and 2s removed at E_2s
    for (n, skip) in [(1u32, vec![1u32]), (2, vec![1, 2])] {
        let ge = GreenEnergy::from_nu(f64::from(n)).unwrap();
        let k = RadialGreenKernel::new(0, ge, skip.clone()).unwrap();
        let oracle = common::spectral_green(0, ge.energy, &RS, &RPS, &skip);
        let scale = block_scale(&oracle);
        for (i, &r) in RS.iter().enumerate() {
            for (j, &rp) in RPS.iter().enumerate() {
                let g = reduced_green_radial(&k, r, rp).unwrap();
                assert!(g.is_finite());
                let err = (g - oracle[i][j]).abs() / scale;
                assert!(err < 1e-5, "n={n} r={r} r'={rp}: {g} vs {}", oracle[i][j]);
            }
        }
    }
}
