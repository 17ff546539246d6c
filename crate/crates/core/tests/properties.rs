use effcharge::angular::{three_j, HalfInt};
use effcharge::config::select_ground_configuration;
use effcharge::exact::int;
use effcharge::observables::{density_zeroth, form_factor_average_rational, form_factor_numeric};
use effcharge::radial::{direct_integral_i, exchange_integral_l};
use effcharge::refdata::{compare, ComputedValue, Provenance, RecordKey, ReferenceRecord, Tolerance};
use proptest::prelude::*;

/// `(j1, j2, j3)` in twice-units satisfying the triangle rule.
fn triad() -> impl Strategy<Value = (i32, i32, i32)> {
    (0..=7i32, 0..=7i32).prop_flat_map(|(a, b)| {
        let lo = (a - b).abs();
        let count = ((a + b - lo) / 2 + 1) as usize;
        (Just(a), Just(b), (0..count).prop_map(move |k| lo + 2 * k as i32))
    })
}

fn shell() -> impl Strategy<Value = (u32, u32)> {
    (1..=6u32).prop_flat_map(|n| (Just(n), 0..n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_j_normalization((j1, j2, j3) in triad(), pick in 0usize..64) {
        let ms: Vec<i32> = (-j3..=j3).step_by(2).collect();
        let m3 = ms[pick % ms.len()];
        let h = HalfInt;
        let mut s = int(0);
        for m1 in (-j1..=j1).step_by(2) {
            let m2 = -m1 - m3;
            if m2.abs() <= j2 {
                let a = three_j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3));
                s += a.mul(&a).to_rational().unwrap();
            }
        }
        prop_assert_eq!(s * int(i64::from(j3 + 1)), int(1));
    }

    #[test]
    fn three_j_odd_permutation_sign((j1, j2, j3) in triad(), m1i in 0i32..8, m2i in 0i32..8) {
        let m1 = -j1 + 2 * (m1i % (j1 + 1));
        let m2 = -j2 + 2 * (m2i % (j2 + 1));
        let m3 = -m1 - m2;
        let h = HalfInt;
        let a = three_j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3));
        let b = three_j(h(j2), h(j1), h(j3), h(m2), h(m1), h(m3));
        let sign = if ((j1 + j2 + j3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a.to_f64() - sign * b.to_f64()).abs() < 1e-14);
    }

    #[test]
    fn radial_integrals_are_symmetric((n, l) in shell(), (n1, l1) in shell(), k in 0u32..4) {
        let j = 2 * (k % (l.min(l1) + 1));
        prop_assert_eq!(direct_integral_i(n, l, n1, l1, j).unwrap(), direct_integral_i(n1, l1, n, l, j).unwrap());
        let je = l.abs_diff(l1) + 2 * (k % ((l + l1 - l.abs_diff(l1)) / 2 + 1));
        prop_assert_eq!(exchange_integral_l(n, l, n1, l1, je).unwrap(), exchange_integral_l(n1, l1, n, l, je).unwrap());
    }

    #[test]
    fn first_order_energy_vanishes(z in 1u32..=100, extra in 0usize..3, less in 0usize..3) {
        let n = (z as usize + extra).saturating_sub(less).max(1);
        let (_, sol) = select_ground_configuration(z, n).unwrap();
        prop_assert_eq!(sol.first_order_energy(), int(0));
    }

    #[test]
    fn form_factor_bounded_by_electron_count(z in 1u32..=54, q in 0.0f64..30.0) {
        let (cfg, sol) = select_ground_configuration(z, z as usize).unwrap();
        let d = density_zeroth(&cfg, &sol).unwrap();
        prop_assert_eq!(form_factor_average_rational(&d).eval_exact(&int(0)), int(i64::from(z)));
        let f = form_factor_numeric(&d, q);
        prop_assert!(f <= f64::from(z) + 1e-12 && f >= -f64::from(z));
    }

    #[test]
    fn density_non_negative(z in 1u32..=54, r in 0.0f64..20.0, c in -1.0f64..=1.0) {
        let (cfg, sol) = select_ground_configuration(z, z as usize).unwrap();
        let d = density_zeroth(&cfg, &sol).unwrap();
        prop_assert!(d.eval(r, c) >= -1e-14 * d.eval(0.0, 1.0));
    }

    #[test]
    fn identical_values_compare_clean(values in prop::collection::vec(-1e4f64..1e4, 1..20)) {
        let records: Vec<ReferenceRecord> = values.iter().enumerate().map(|(i, &v)| ReferenceRecord {
            key: RecordKey::ground(i as u32 + 1, i as u32 + 1),
            quantities: vec![("E0".into(), v)],
            provenance: Provenance::PublishedTable,
            source: "test".into(),
        }).collect();
        let computed: Vec<ComputedValue> = records.iter().map(|r| ComputedValue::new(r.key.clone(), "E0", r.quantities[0].1)).collect();
        let rep = compare(&computed, &records, Tolerance::absolute(0.0));
        prop_assert!(rep.summary.all_pass);
        prop_assert_eq!(rep.summary.compared, values.len());
        prop_assert_eq!(rep.summary.max_abs_delta, 0.0);
    }
}
