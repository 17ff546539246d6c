//! Success paths only: building a `JsError` needs a JavaScript host.

use effcharge_wasm::{form_factor, radial_density, solve};

#[test]
fn solve_reports_reference_row() {
    let v: serde_json::Value = serde_json::from_str(&solve(26, 26, "").unwrap()).unwrap();
    assert_eq!(v["symbol"], "Fe");
    assert_eq!(v["reference"]["Zstar"], 20.4882);
    assert!((v["Zstar"].as_f64().unwrap() - 20.4882).abs() < 5e-4);
    let ion: serde_json::Value = serde_json::from_str(&solve(26, 24, "").unwrap()).unwrap();
    assert!(ion["reference"].is_null());
}

#[test]
fn curves_integrate_to_electron_count() {
    let points = 20001;
    let rho = radial_density(10, 10, "", 20.0, points).unwrap();
    let h = 20.0 / f64::from(points - 1);
    // Simpson
    let n: f64 = rho.iter().enumerate().map(|(i, v)| {
        let w = if i == 0 || i == rho.len() - 1 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        w * v
    }).sum::<f64>() * h / 3.0;
    assert!((n - 10.0).abs() < 1e-8, "{n}");
    let f = form_factor(6, 6, "", 2.0, 21).unwrap();
    assert_eq!(f.len(), 21);
    assert!((f[0] - 6.0).abs() < 1e-12);
    assert!(f.windows(2).all(|w| w[1] < w[0]));
}
