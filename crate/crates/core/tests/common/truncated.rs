//! He ground state in a bound-only space `n <= 4`: the explicit sum over
//! excited determinants and the Green-function pipeline run against the
//! identically truncated spectral kernel.

use effcharge::angular::gaunt_ck;
use effcharge::config::select_ground_configuration;
use effcharge::exact::to_f64;
use effcharge::greens::TruncatedSpectral;
use effcharge::pt2::{delta_e2_multi, delta_e2_single, grid_for, IntermediateSpace, PerturbationPotentials, Pt2Options};
use effcharge::radial::{multipole_double_integral, radial_wavefunction, RadialOrbital};
use std::collections::HashMap;

pub const N_MAX: u32 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Spatial {
    n: u32,
    l: u32,
    m: i32,
}

fn energy(o: Spatial) -> f64 {
    -0.5 / f64::from(o.n * o.n)
}

struct Integrals {
    orbitals: HashMap<(u32, u32), RadialOrbital>,
    screening: f64,
}

impl Integrals {
    fn radial(&self, o: Spatial) -> &RadialOrbital {
        &self.orbitals[&(o.n, o.l)]
    }

    /// `<a| -s/r |c>`.
    fn one_body(&self, a: Spatial, c: Spatial) -> f64 {
        if a.l != c.l || a.m != c.m {
            return 0.0;
        }
        let (ra, rc) = (self.radial(a), self.radial(c));
        let raw = ra.poly.mul(&rc.poly).shift(1).integral();
        -self.screening * (to_f64(&ra.norm_sq) * to_f64(&rc.norm_sq)).sqrt() * to_f64(&raw)
    }

    /// `<a b | 1/r12 | c d>` for spatial orbitals.
    fn two_body(&self, a: Spatial, b: Spatial, c: Spatial, d: Spatial) -> f64 {
        if a.m + b.m != c.m + d.m {
            return 0.0;
        }
        let (ra, rb, rc, rd) = (self.radial(a), self.radial(b), self.radial(c), self.radial(d));
        let p = ra.poly.mul(&rc.poly);
        let q = rb.poly.mul(&rd.poly);
        let norm = (to_f64(&ra.norm_sq) * to_f64(&rb.norm_sq) * to_f64(&rc.norm_sq) * to_f64(&rd.norm_sq)).sqrt();
        let kmin = a.l.abs_diff(c.l).max(b.l.abs_diff(d.l));
        let kmax = (a.l + c.l).min(b.l + d.l);
        let mut s = 0.0;
        for k in (kmin..=kmax).filter(|k| (a.l + c.l + k) % 2 == 0) {
            let ang = gaunt_ck(k as i32, a.l as i32, a.m, c.l as i32, c.m) * gaunt_ck(k as i32, d.l as i32, d.m, b.l as i32, b.m);
            if ang == 0.0 {
                continue;
            }
            s += ang * to_f64(&multipole_double_integral(&p, &q, k as usize).unwrap());
        }
        s * norm
    }
}

pub struct Comparison {
    pub singles: f64,
    pub doubles: f64,
    pub pipeline_singles: f64,
    pub pipeline_doubles: f64,
}

pub fn helium_truncated() -> Comparison {
    let (cfg, sol) = select_ground_configuration(2, 2).unwrap();
    let mut orbitals = HashMap::new();
    let mut space = Vec::new();
    for n in 1..=N_MAX {
        for l in 0..n {
            orbitals.insert((n, l), radial_wavefunction(n, l).unwrap());
            for m in -(l as i32)..=l as i32 {
                space.push(Spatial { n, l, m });
            }
        }
    }
    let ints = Integrals { orbitals, screening: 2.0 - sol.zstar };
    let s1 = Spatial { n: 1, l: 0, m: 0 };

    // 1s(up) -> a(up); the 1s(down) spectator only contributes its Coulomb field
    let mut singles = 0.0;
    for &a in space.iter().filter(|&&a| a != s1) {
        let w = ints.one_body(a, s1) + ints.two_body(a, s1, s1, s1);
        singles -= w * w / (energy(a) - energy(s1));
    }
    singles *= 2.0;

    // 1s(up) 1s(down) -> a(up) b(down); opposite spins leave no exchange
    let mut doubles = 0.0;
    for &a in space.iter().filter(|&&a| a != s1) {
        for &b in space.iter().filter(|&&b| b != s1) {
            let w = ints.two_body(a, b, s1, s1);
            doubles -= w * w / (energy(a) + energy(b) - 2.0 * energy(s1));
        }
    }

    let opts = Pt2Options::default();
    let pots = PerturbationPotentials::new(&cfg, &sol, grid_for(&cfg, opts.max_panel));
    let res = TruncatedSpectral { n_max: N_MAX };
    let space = IntermediateSpace { n_max: N_MAX, l_max: N_MAX - 1, continuum: None, extrapolate: false };
    let g_singles: f64 = delta_e2_single(&cfg, &pots, &res, &opts).unwrap().iter().map(|s| s.delta).sum();
    let g_pairs: f64 = delta_e2_multi(&cfg, &pots, &res, &space, &opts).unwrap().iter().map(|p| p.total.total()).sum();

        Comparison { singles, doubles, pipeline_singles: g_singles, pipeline_doubles: g_pairs }
}
