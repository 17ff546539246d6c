use crate::output::{emit, json_text, num, opt, Format, Table};
use crate::{CompareArgs, DensityArgs, FormFactorArgs, Out, Space, SolveArgs, State, Table1Args, Table2Args, TableId, Target};
use effcharge::config::{
    configuration_from_string, element_symbol, format_with_core, select_ground_configuration, Configuration,
};
use effcharge::observables::{density_first_order, density_zeroth, form_factor_numeric, s_to_q};
use effcharge::pt2::{
    degenerate_he_excited, e2_single, e2_total, DegeneratePolicy, ExcludedLevel, HeliumState, IntermediateSpace,
    Pt2Options, SecondOrderBreakdown,
};
use effcharge::refdata::{
    compare as compare_values, formfactor_fit, load_hf_density, load_reference, ComparisonReport, ComputedValue,
    Dataset, RecordKey, Tolerance,
};
use effcharge::scf0::{solve_zeroth_order, ZerothOrderSolution};
use effcharge::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::process::ExitCode;

pub fn fail(e: &Error) -> ExitCode {
    let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{v}");
    ExitCode::from(2)
}

fn write(out: &Out, table: &Table, value: Value) -> Result<()> {
    let text = match out.format {
        Format::Csv => table.render(),
        Format::Json => json_text(value),
    };
    Ok(emit(&text, out.output.as_deref())?)
}

pub fn atom_label(z: u32, n: usize) -> String {
    let sym = element_symbol(z).map_or_else(|| format!("Z{z}"), str::to_owned);
    match i64::from(z) - n as i64 {
        0 => sym,
        1 => format!("{sym}+"),
        -1 => format!("{sym}-"),
        q if q > 0 => format!("{sym}{q}+"),
        q => format!("{sym}{}-", -q),
    }
}

struct Resolved {
    label: String,
    cfg: Configuration,
    sol: ZerothOrderSolution,
    overridden: bool,
}

impl Resolved {
    fn configuration(&self) -> String {
        format_with_core(&self.cfg.occupancy())
    }

    fn is_neutral_ground(&self) -> bool {
        !self.overridden && self.cfg.n_electrons() == self.cfg.z() as usize
    }
}

fn resolve(t: &Target) -> Result<Resolved> {
    let (cfg, sol, overridden) = match &t.config {
        Some(text) => {
            let cfg = configuration_from_string(t.z, text)?;
            if let Some(n) = t.n {
                if n != cfg.n_electrons() {
                    return Err(Error::domain(format!("--N {n} disagrees with {} electrons in {text:?}", cfg.n_electrons())));
                }
            }
            let sol = solve_zeroth_order(&cfg)?;
            (cfg, sol, true)
        }
        None => {
            let (cfg, sol) = select_ground_configuration(t.z, t.n.unwrap_or(t.z as usize))?;
            (cfg, sol, false)
        }
    };
    Ok(Resolved { label: atom_label(t.z, cfg.n_electrons()), cfg, sol, overridden })
}

fn space_of(s: &Space) -> IntermediateSpace {
    IntermediateSpace { n_max: s.n_max, l_max: s.l_max, ..Default::default() }
}

fn pt2_options(strict: bool) -> Pt2Options {
    let degenerate = if strict { DegeneratePolicy::Reject } else { DegeneratePolicy::Exclude };
    Pt2Options { degenerate, ..Default::default() }
}

fn excluded_json(b: &SecondOrderBreakdown) -> Value {
    let mut v: Vec<Value> = Vec::new();
    for s in &b.singles {
        for e in &s.excluded {
            v.push(json!({ "from": s.orbital.subshell().to_string(), "n": e.n, "l": e.l, "m": e.m, "coupling": e.coupling }));
        }
    }
    for p in &b.pairs {
        v.extend(p.excluded.iter().map(level_json));
    }
    Value::Array(v)
}

fn level_json(e: &ExcludedLevel) -> Value {
    json!({ "n": e.n, "l": e.l, "m": e.m, "coupling": e.coupling })
}

pub fn solve(a: &SolveArgs) -> Result<bool> {
    let order2 = a.order == "2";
    if a.pairs && !order2 {
        return Err(Error::domain("--pairs needs --order 2"));
    }
    let columns = ["atom", "Z", "N", "state", "configuration", "A", "B", "Zstar", "E0", "E2_single", "E2"];
    let mut table = Table::new(&columns);
    if a.state != State::Ground {
        let t = &a.target;
        if t.z != 2 || t.n.unwrap_or(2) != 2 || t.config.is_some() {
            return Err(Error::domain("excited states are available for neutral He only"));
        }
        if !order2 {
            return Err(Error::domain("excited states are computed at --order 2"));
        }
        let state = if a.state == State::Triplet2S { HeliumState::Triplet2S } else { HeliumState::Singlet2S };
        let r = degenerate_he_excited(state, &space_of(&a.space), &pt2_options(a.strict))?;
        let b = effcharge::exact::to_f64(&state.b_exact()?);
        table.rows.push(vec![
            "He".into(),
            "2".into(),
            "2".into(),
            state.label().into(),
            "1s1 2s1".into(),
            num(0.625),
            num(b),
            num(r.zstar),
            num(r.e0),
            String::new(),
            num(r.e2),
        ]);
        let v = json!({
            "command": "solve", "atom": "He", "Z": 2, "N": 2, "state": state.label(),
            "configuration": "1s1 2s1", "A": 0.625, "B": b, "Zstar": r.zstar, "E0": r.e0, "order": 2,
            "dE2": r.de2, "E2": r.e2, "excluded_levels": r.excluded.iter().map(level_json).collect::<Vec<_>>(),
        });
        write(&a.out, &table, v)?;
        return Ok(true);
    }

    let res = resolve(&a.target)?;
    let (cfg, sol) = (&res.cfg, &res.sol);
    let b = if !order2 {
        None
    } else if a.pairs {
        Some(e2_total(cfg, sol, &space_of(&a.space), &pt2_options(a.strict))?)
    } else {
        Some(e2_single(cfg, sol, &pt2_options(a.strict))?)
    };
    let e2 = b.as_ref().filter(|_| a.pairs).map(|b| b.e2_total);
    table.rows.push(vec![
        res.label.clone(),
        cfg.z().to_string(),
        cfg.n_electrons().to_string(),
        "ground".into(),
        res.configuration(),
        num(sol.a_f64()),
        num(sol.b_f64()),
        num(sol.zstar),
        num(sol.e0),
        opt(b.as_ref().map(|b| b.e2_single)),
        opt(e2),
    ]);
    let v = json!({
        "command": "solve", "atom": res.label, "Z": cfg.z(), "N": cfg.n_electrons(), "state": "ground",
        "configuration": res.configuration(), "A": sol.a_f64(), "B": sol.b_f64(), "Zstar": sol.zstar, "E0": sol.e0,
        "order": if order2 { 2 } else { 0 },
        "dE_single": b.as_ref().map(|b| b.de_single),
        "E2_single": b.as_ref().map(|b| b.e2_single),
        "dE_pairs": b.as_ref().filter(|_| a.pairs).map(|b| b.de_multi),
        "E2": e2,
        "excluded_levels": b.as_ref().map(excluded_json).unwrap_or(Value::Array(vec![])),
    });
    write(&a.out, &table, v)?;
    Ok(true)
}

pub fn parse_range(text: &str) -> Result<(u32, u32)> {
    let bad = || Error::domain(format!("bad Z range {text:?}; expected e.g. 1..20"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

struct Row2 {
    z: u32,
    label: String,
    configuration: String,
    zstar: f64,
    e0: f64,
    e2_single: Option<f64>,
}

pub fn table2(a: &Table2Args) -> Result<bool> {
    let (lo, hi) = parse_range(&a.range)?;
    let order2 = a.order == "2";
    let opts = pt2_options(false);
    let rows: Vec<Row2> = (lo..=hi)
        .into_par_iter()
        .map(|z| {
            let (cfg, sol) = select_ground_configuration(z, z as usize)?;
            let e2_single = if order2 { Some(e2_single(&cfg, &sol, &opts)?.e2_single) } else { None };
            Ok(Row2 {
                z,
                label: atom_label(z, z as usize),
                configuration: format_with_core(&cfg.occupancy()),
                zstar: sol.zstar,
                e0: sol.e0,
                e2_single,
            })
        })
        .collect::<Result<_>>()?;

    let mut columns = vec!["Z", "atom", "configuration", "Zstar", "E0", "E2_single"];
    let mut all_pass = true;
    let mut comparison = Value::Null;
    let mut per_row: Vec<Vec<String>> = vec![Vec::new(); rows.len()];
    if a.compare {
        let reference = load_reference(Dataset::Table2)?;
        let key = |z: u32| RecordKey::ground(z, z);
        let cv = |q: &str, f: &dyn Fn(&Row2) -> Option<f64>| -> Vec<ComputedValue> {
            rows.iter().filter_map(|r| Some(ComputedValue::new(key(r.z), q, f(r)?))).collect()
        };
        let zs = compare_values(&cv("Zstar", &|r| Some(r.zstar)), &reference, Tolerance::absolute(a.zstar_tol));
        let e0 = compare_values(&cv("E0", &|r| Some(r.e0)), &reference, Tolerance::relative(a.e0_tol));
        let e2 = compare_values(&cv("E2_single", &|r| r.e2_single), &reference, Tolerance::relative(a.e2_tol));
        let best = |r: &Row2| ComputedValue::against(key(r.z), "E", "E_HF", r.e2_single.unwrap_or(r.e0));
        let hf = compare_values(&rows.iter().map(best).collect::<Vec<_>>(), &reference, Tolerance::default());
        let find = |rep: &ComparisonReport, z: u32| rep.entries.iter().find(|e| e.key == key(z)).cloned();
        columns.extend(["Zstar_ref", "E0_ref", "E2_single_ref", "E_HF", "dZstar", "rel_E0", "rel_E2_single", "rel_vs_HF", "pass"]);
        for (r, extra) in rows.iter().zip(per_row.iter_mut()) {
            let (z_e, e0_e, e2_e, hf_e) = (find(&zs, r.z), find(&e0, r.z), find(&e2, r.z), find(&hf, r.z));
            let pass = [&z_e, &e0_e, &e2_e].iter().all(|e| e.as_ref().is_none_or(|e| e.pass));
            *extra = vec![
                opt(z_e.as_ref().map(|e| e.reference)),
                opt(e0_e.as_ref().map(|e| e.reference)),
                opt(e2_e.as_ref().map(|e| e.reference)),
                opt(hf_e.as_ref().map(|e| e.reference)),
                opt(z_e.as_ref().map(|e| e.abs_delta)),
                opt(e0_e.as_ref().map(|e| e.rel_delta)),
                opt(e2_e.as_ref().map(|e| e.rel_delta)),
                opt(hf_e.as_ref().map(|e| e.rel_delta)),
                pass.to_string(),
            ];
        }
        all_pass = zs.summary.all_pass && e0.summary.all_pass && e2.summary.all_pass;
        comparison = json!({
            "all_pass": all_pass,
            "Zstar": zs, "E0": e0, "E2_single": e2,
            "vs_HF": { "max_rel_delta": hf.summary.max_rel_delta, "entries": hf.entries },
        });
    }

    let mut table = Table::new(&columns);
    table.meta("order", &a.order);
    for (r, extra) in rows.iter().zip(per_row) {
        let mut row =
            vec![r.z.to_string(), r.label.clone(), r.configuration.clone(), num(r.zstar), num(r.e0), opt(r.e2_single)];
        row.extend(extra);
        table.rows.push(row);
    }
    let v = json!({
        "command": "table2",
        "order": if order2 { 2 } else { 0 },
        "range": [lo, hi],
        "rows": rows.iter().map(|r| json!({
            "Z": r.z, "atom": r.label, "configuration": r.configuration,
            "Zstar": r.zstar, "E0": r.e0, "E2_single": r.e2_single,
        })).collect::<Vec<_>>(),
        "comparison": comparison,
    });
    write(&a.out, &table, v)?;
    Ok(all_pass)
}

struct Row1 {
    species: &'static str,
    key: RecordKey,
    zstar: f64,
    e0: f64,
    e2: f64,
    excited: bool,
}

pub fn table1(a: &Table1Args) -> Result<bool> {
    let space = space_of(&a.space);
    let opts = pt2_options(false);
    let jobs: [(&str, u32, usize, Option<HeliumState>); 5] = [
        ("H-", 1, 2, None),
        ("He", 2, 2, None),
        ("Li", 3, 3, None),
        ("He 2 3S", 2, 2, Some(HeliumState::Triplet2S)),
        ("He 2 1S", 2, 2, Some(HeliumState::Singlet2S)),
    ];
    let rows: Vec<Row1> = jobs
        .par_iter()
        .map(|&(species, z, n, state)| {
            let key = effcharge::refdata::table1_key(species).expect("known species");
            match state {
                Some(s) => {
                    let r = degenerate_he_excited(s, &space, &opts)?;
                    Ok(Row1 { species, key, zstar: r.zstar, e0: r.e0, e2: r.e2, excited: true })
                }
                None => {
                    let (cfg, sol) = select_ground_configuration(z, n)?;
                    let b = e2_total(&cfg, &sol, &space, &opts)?;
                    Ok(Row1 { species, key, zstar: sol.zstar, e0: sol.e0, e2: b.e2_total, excited: false })
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut columns = vec!["species", "Zstar", "E0", "E2"];
    let mut all_pass = true;
    let mut comparison = Value::Null;
    let mut extra: Vec<Vec<String>> = vec![Vec::new(); rows.len()];
    if a.compare {
        let reference = load_reference(Dataset::Table1)?;
        let cv = |excited: bool| -> Vec<ComputedValue> {
            rows.iter().filter(|r| r.excited == excited).map(|r| ComputedValue::new(r.key.clone(), "E2", r.e2)).collect()
        };
        let ground = compare_values(&cv(false), &reference, Tolerance::relative(a.ground_tol));
        let excited = compare_values(&cv(true), &reference, Tolerance::relative(a.excited_tol));
        let triplet = rows.iter().find(|r| r.species == "He 2 3S").map(|r| r.e2);
        let singlet = rows.iter().find(|r| r.species == "He 2 1S").map(|r| r.e2);
        let ordered = matches!((triplet, singlet), (Some(t), Some(s)) if t < s);
        columns.extend(["E2_ref", "E_var", "E_MCHF", "E_HF", "rel_E2", "pass"]);
        for (r, x) in rows.iter().zip(extra.iter_mut()) {
            let rec = reference.iter().find(|rec| rec.key == r.key);
            let e = ground.entries.iter().chain(&excited.entries).find(|e| e.key == r.key);
            *x = vec![
                opt(rec.and_then(|c| c.get("E2"))),
                opt(rec.and_then(|c| c.get("E_var"))),
                opt(rec.and_then(|c| c.get("E_MCHF"))),
                opt(rec.and_then(|c| c.get("E_HF"))),
                opt(e.map(|e| e.rel_delta)),
                e.is_none_or(|e| e.pass).to_string(),
            ];
        }
        all_pass = ground.summary.all_pass && excited.summary.all_pass && ordered;
        comparison = json!({
            "all_pass": all_pass,
            "ground": ground,
            "excited": excited,
            "triplet_below_singlet": ordered,
        });
    }

    let mut table = Table::new(&columns);
    table.meta("n_max", space.n_max);
    table.meta("l_max", space.l_max);
    for (r, x) in rows.iter().zip(extra) {
        let mut row = vec![r.species.to_owned(), num(r.zstar), num(r.e0), num(r.e2)];
        row.extend(x);
        table.rows.push(row);
    }
    let v = json!({
        "command": "table1",
        "space": { "n_max": space.n_max, "l_max": space.l_max },
        "rows": rows.iter().map(|r| json!({
            "species": r.species, "Z": r.key.z, "N": r.key.n, "state": r.key.state,
            "Zstar": r.zstar, "E0": r.e0, "E2": r.e2,
        })).collect::<Vec<_>>(),
        "comparison": comparison,
    });
    write(&a.out, &table, v)?;
    Ok(all_pass)
}

fn uniform(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && max >= 0.0 && max / step <= 1e7) {
        return Err(Error::domain("need step > 0 and 0 <= max <= 1e7 * step"));
    }
    let n = (max / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

fn describe(table: &mut Table, res: &Resolved) {
    table.meta("atom", &res.label);
    table.meta("Z", res.cfg.z());
    table.meta("N", res.cfg.n_electrons());
    table.meta("configuration", res.configuration());
    table.meta("Zstar", num(res.sol.zstar));
}

pub fn density(a: &DensityArgs) -> Result<bool> {
    let res = resolve(&a.target)?;
    let rs = uniform(a.r_max, a.step)?;
    let d0 = density_zeroth(&res.cfg, &res.sol)?;
    let first = if a.zeroth_only { None } else { Some(density_first_order(&res.cfg, &res.sol, &Pt2Options::default())?) };
    let hf = if res.is_neutral_ground() && Dataset::hf_density(res.cfg.z()).is_some() {
        Some(load_hf_density(res.cfg.z())?)
    } else {
        None
    };
    let zeroth: Vec<f64> = rs.iter().map(|&r| d0.radial_density(r)).collect();
    let corrected: Option<Vec<f64>> = first.as_ref().map(|f| {
        let total = f.total();
        rs.iter().map(|&r| f.interpolate(&total, r)).collect()
    });
    let reference: Option<Vec<f64>> = hf.as_ref().map(|h| rs.iter().map(|&r| h.interpolate(r)).collect());

    let mut table = Table::new(&["r", "zeroth", "first_order", "hf"]);
    describe(&mut table, &res);
    if let Some(h) = &hf {
        table.meta("hf_source", &h.source);
    }
    for (i, &r) in rs.iter().enumerate() {
        table.rows.push(vec![
            num(r),
            num(zeroth[i]),
            opt(corrected.as_ref().map(|c| c[i])),
            opt(reference.as_ref().map(|c| c[i])),
        ]);
    }
    let v = json!({
        "command": "density", "atom": res.label, "Z": res.cfg.z(), "N": res.cfg.n_electrons(),
        "configuration": res.configuration(), "Zstar": res.sol.zstar,
        "r": rs, "zeroth": zeroth, "first_order": corrected, "hf": reference,
        "hf_source": hf.as_ref().map(|h| h.source.clone()),
    });
    write(&a.out, &table, v)?;
    Ok(true)
}

pub fn formfactor(a: &FormFactorArgs) -> Result<bool> {
    let res = resolve(&a.target)?;
    let ss = uniform(a.s_max, a.step)?;
    let d = density_zeroth(&res.cfg, &res.sol)?;
    let fit = if res.is_neutral_ground() { formfactor_fit(res.cfg.z()).ok() } else { None };
    let qs: Vec<f64> = ss.iter().map(|&s| s_to_q(s)).collect();
    let f0: Vec<f64> = qs.iter().map(|&q| form_factor_numeric(&d, q)).collect();
    let fitted: Option<Vec<f64>> = fit.as_ref().map(|g| ss.iter().map(|&s| g.eval(s)).collect());

    let mut table = Table::new(&["s", "q", "f0", "fit"]);
    describe(&mut table, &res);
    table.meta("orientation", "average");
    if let Some(g) = &fit {
        table.meta("fit_source", &g.source);
    }
    for i in 0..ss.len() {
        table.rows.push(vec![num(ss[i]), num(qs[i]), num(f0[i]), opt(fitted.as_ref().map(|f| f[i]))]);
    }
    let v = json!({
        "command": "formfactor", "atom": res.label, "Z": res.cfg.z(), "N": res.cfg.n_electrons(),
        "configuration": res.configuration(), "Zstar": res.sol.zstar, "orientation": "average",
        "s": ss, "q": qs, "f0": f0, "fit": fitted,
        "fit_source": fit.as_ref().map(|g| g.source.clone()),
    });
    write(&a.out, &table, v)?;
    Ok(true)
}

fn read_computed(path: &std::path::Path) -> Result<Vec<ComputedValue>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    let headers = rd.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| col(name).ok_or_else(|| parse_err(1, format!("missing column {name}")));
    let (cz, cn, cs, cq, cv) = (need("Z")?, need("N")?, need("state")?, need("quantity")?, need("value")?);
    let cr = col("reference");
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let z = field(cz).parse().map_err(|_| parse_err(line, format!("bad Z {:?}", field(cz))))?;
        let n = field(cn).parse().map_err(|_| parse_err(line, format!("bad N {:?}", field(cn))))?;
        let value = field(cv).parse().map_err(|_| parse_err(line, format!("bad value {:?}", field(cv))))?;
        let quantity = field(cq);
        let reference = cr.map(field).filter(|s| !s.is_empty()).unwrap_or(quantity);
        out.push(ComputedValue::against(RecordKey { z, n, state: field(cs).to_owned() }, quantity, reference, value));
    }
    Ok(out)
}

pub fn compare(a: &CompareArgs) -> Result<bool> {
    if a.rel_tol.is_none() && a.abs_tol.is_none() {
        return Err(Error::domain("give --rel-tol and/or --abs-tol"));
    }
    let dataset = match a.dataset {
        TableId::Table1 => Dataset::Table1,
        TableId::Table2 => Dataset::Table2,
    };
    let computed = read_computed(&a.input)?;
    let reference = load_reference(dataset)?;
    let report = compare_values(&computed, &reference, Tolerance { relative: a.rel_tol, absolute: a.abs_tol });

    let mut table =
        Table::new(&["Z", "N", "state", "quantity", "reference_quantity", "computed", "reference", "abs_delta", "rel_delta", "pass"]);
    table.meta("dataset", dataset.file_name());
    for e in &report.entries {
        table.rows.push(vec![
            e.key.z.to_string(),
            e.key.n.to_string(),
            e.key.state.clone(),
            e.quantity.clone(),
            e.reference_quantity.clone(),
            num(e.computed),
            num(e.reference),
            num(e.abs_delta),
            num(e.rel_delta),
            e.pass.to_string(),
        ]);
    }
    for u in &report.uncovered {
        let (z, n) = (u.key.z.to_string(), u.key.n.to_string());
        table.rows.push(vec![z, n, u.key.state.clone(), u.quantity.clone(), String::new(), String::new(), String::new(), String::new(), String::new(), "uncovered".into()]);
    }
    let all_pass = report.summary.all_pass;
    let mut v = serde_json::to_value(&report).map_err(|e| Error::domain(e.to_string()))?;
    v["command"] = json!("compare");
    v["dataset"] = json!(dataset.file_name());
    write(&a.out, &table, v)?;
    Ok(all_pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..20").unwrap(), (1, 20));
        assert_eq!(parse_range("3..=5").unwrap(), (3, 5));
        assert_eq!(parse_range("26").unwrap(), (26, 26));
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn ion_labels() {
        assert_eq!(atom_label(19, 19), "K");
        assert_eq!(atom_label(2, 1), "He+");
        assert_eq!(atom_label(1, 2), "H-");
        assert_eq!(atom_label(8, 10), "O2-");
        assert_eq!(atom_label(26, 23), "Fe3+");
    }
}
