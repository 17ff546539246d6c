//! Closed forms of the zeroth-order densities and form factors, typed in
//! by hand from the printed expressions.

use effcharge::config::select_ground_configuration;
use effcharge::exact::{int, pow, ratio};
use effcharge::observables::{density_zeroth, AngularFactor, DensityExpansion};
use num_rational::BigRational;
use std::collections::BTreeMap;

pub type Printed = BTreeMap<(BigRational, u32, AngularFactor), BigRational>;

pub fn neutral(z: u32) -> DensityExpansion {
    let (cfg, sol) = select_ground_configuration(z, z as usize).unwrap();
    density_zeroth(&cfg, &sol).unwrap()
}

/// `scale * e^{-decay u} * sum coeffs[k] u^k` in units of `Z*^3/pi`.
pub fn block(out: &mut Printed, scale: BigRational, decay: BigRational, coeffs: &[i64], factor: AngularFactor) {
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            *out.entry((decay.clone(), k as u32, factor)).or_insert_with(|| int(0)) += &scale * int(c);
        }
    }
}

/// Printed density of He, C, O, Ne or Xe in the layout of `printed_terms`.
pub fn printed_density(z: u32) -> Printed {
    let mut want = Printed::new();
    block(&mut want, int(2), int(2), &[1], AngularFactor::One);
    if z == 2 {
        return want;
    }
    match z {
        6 | 8 => {
            let (iso, aniso) = if z == 6 { (ratio(11, 32), ratio(1, 256)) } else { (ratio(13, 32), ratio(-1, 256)) };
            block(&mut want, ratio(1, 4), int(1), &[1, -1], AngularFactor::One);
            *want.entry((int(1), 2, AngularFactor::One)).or_insert_with(|| int(0)) += ratio(1, 4) * iso;
            *want.entry((int(1), 2, AngularFactor::Cos2Theta)).or_insert_with(|| int(0)) += int(2) * aniso;
        }
        10 => {
            block(&mut want, ratio(1, 4), int(1), &[1, -1], AngularFactor::One);
            *want.entry((int(1), 2, AngularFactor::One)).or_insert_with(|| int(0)) += ratio(1, 8);
        }
        54 => {
            block(&mut want, ratio(1, 8), int(1), &[2, -2, 1], AngularFactor::One);
            block(&mut want, ratio(2, 6561), ratio(2, 3), &[243, -324, 216, -48, 4], AngularFactor::One);
            block(
                &mut want,
                ratio(1, 5898240),
                ratio(1, 2),
                &[184320, -276480, 207360, -65280, 10080, -720, 19],
                AngularFactor::One,
            );
            block(
                &mut want,
                ratio(2, 10986328125),
                ratio(2, 5),
                &[87890625, -140625000, 112500000, -41250000, 7668750, -765000, 41200, -1120, 12],
                AngularFactor::One,
            );
        }
        _ => panic!("no printed density for Z={z}"),
    }
    want
}

/// Printed form factor of He, C, O or Ne. For C and O it is the transform
/// with q along the quantisation axis.
pub fn printed_form_factor(z: u32, q: &BigRational) -> BigRational {
    let (_, sol) = select_ground_configuration(z, z as usize).unwrap();
    let zs = sol.zstar_exact;
    let q2 = q * q;
    let z2 = &zs * &zs;
    let z4 = &z2 * &z2;
    let den = pow(&(&q2 + &z2), 4) * pow(&(&q2 + int(4) * &z2), 2);
    let poly = |c: &[i64]| -> BigRational {
        // sum c_i q^{2(4-i)} Z*^{2i}
        c.iter().enumerate().map(|(i, &v)| int(v) * pow(&q2, 4 - i) * pow(&z2, i)).fold(int(0), |a, b| a + b)
    };
    match z {
        2 => int(32) * &z4 / pow(&(&q2 + int(4) * &z2), 2),
        6 => int(6) * &z4 * poly(&[6, 25, 30, 0, 16]) / den,
        8 => int(2) * &z4 * poly(&[18, 76, 99, 24, 64]) / den,
        10 => int(4) * &z4 * poly(&[9, 37, 42, 0, 40]) / den,
        _ => unreachable!(),
    }
}

