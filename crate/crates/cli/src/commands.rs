use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use annulus::continuum::{rocha_caridi, z_one_boundary, z_potts, z_two_boundary};
use annulus::diagram::Boundary;
use annulus::par::Execution;
use annulus::params::{central_charge, kac_h, ParamBlock};
use annulus::percolation::{crossing_report, p_crossing, p_crossing_theta};
use annulus::spectra::{compare_spectra, fss_weights, fss_window, free_energies, SpinChainParams};
use annulus::{CgParams, LoopWeights, QSeries, Rat};
use serde_json::{json, Value};

use crate::config::Config;
use crate::{BoundaryArg, CliError, Command, ParamArgs, SeriesArgs};

/// Coefficient tolerance of the `--check` series comparisons.
pub const SERIES_TOL: f64 = 1e-9;
pub const SPECTRUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: String,
    pub pass: bool,
    pub delta: f64,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, delta: f64, tol: f64) -> Self {
        Self { name: name.into(), pass: delta <= tol, delta }
    }
}

#[derive(Debug, Default)]
pub enum CsvOut {
    #[default]
    None,
    Single(String),
    /// One file per entry, written into a directory.
    Files(Vec<(String, String)>),
}

#[derive(Debug)]
pub struct Outcome {
    pub command: String,
    pub params: Value,
    pub order: Option<u32>,
    pub results: Value,
    pub tail_bounds: Value,
    pub checks: Vec<CheckRow>,
    pub csv: CsvOut,
    /// Tabular commands print their CSV to stdout when no path is given.
    pub csv_primary: bool,
}

impl Outcome {
    fn new(command: &str, params: Value, order: Option<u32>) -> Self {
        Self {
            command: command.to_string(),
            params,
            order,
            results: json!({}),
            tail_bounds: json!({}),
            checks: Vec::new(),
            csv: CsvOut::None,
            csv_primary: false,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> =
            self.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "delta": c.delta})).collect();
        json!({
            "command": self.command,
            "params": self.params,
            "order": self.order,
            "results": self.results,
            "tail_bounds": self.tail_bounds,
            "checks": checks,
        })
    }

    pub fn write(&self, json_path: Option<&Path>, csv_path: Option<&Path>) -> Result<(), CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Invalid(format!("{}: {e}", p.display()));
        let text = serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n";
        match json_path {
            Some(p) => fs::write(p, &text).map_err(|e| io(p, e))?,
            None if !self.csv_primary => print!("{text}"),
            None => {}
        }
        match (&self.csv, csv_path) {
            (CsvOut::None, Some(_)) => eprintln!("note: {} has no CSV output", self.command),
            (CsvOut::None, None) => {}
            (CsvOut::Single(body), Some(p)) => fs::write(p, body).map_err(|e| io(p, e))?,
            (CsvOut::Single(body), None) if self.csv_primary => print!("{body}"),
            (CsvOut::Files(files), Some(dir)) => {
                fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
                for (name, body) in files {
                    let p = dir.join(format!("{name}.csv"));
                    fs::write(&p, body).map_err(|e| io(&p, e))?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}

pub fn dispatch(cmd: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    match cmd {
        Command::Params(p) => params(p, cfg),
        Command::Ztwo { params, series } => ztwo(params, series, cfg),
        Command::Zone { m, r1, u1, chi, series } => zone([*m, *r1, *u1, *chi], series, cfg),
        Command::Zpotts { q, q1, q2, q12, series } => zpotts([*q, *q1, *q2, *q12], series, cfg),
        Command::Perco { tau, order } => perco(*tau, *order, cfg),
        Command::Crossing { tau, order } => crossing(*tau, *order, cfg),
        Command::Fss { m, r1, r2, r12, nmin, nmax, boundary } => {
            fss([*m, *r1, *r2, *r12], *nmin, *nmax, *boundary, cfg)
        }
        Command::Spectrum { n, m, gamma, r1, r2, s1, s2, phi1, phi2 } => {
            spectrum(*n, *m, *gamma, [*r1, *r2, *s1, *s2, *phi1, *phi2], cfg)
        }
        Command::Verify { suite, opts } => crate::verify::run(*suite, opts, cfg),
        Command::VerifyTrace { opts } => crate::verify::run(crate::Suite::Trace, opts, cfg),
    }
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn param_block(p: &ParamArgs, cfg: &Config) -> Result<ParamBlock, CliError> {
    let flags = [
        ("n", p.n),
        ("n1", p.n1),
        ("n2", p.n2),
        ("n12", p.n12),
        ("l", p.l),
        ("l1", p.l1),
        ("l2", p.l2),
        ("m", p.m),
        ("r1", p.r1),
        ("r2", p.r2),
        ("r12", p.r12),
        ("chi", p.chi),
        ("u1", p.u1),
        ("u2", p.u2),
    ];
    let mut map = BTreeMap::new();
    for (k, v) in flags {
        if let Some(x) = cfg.pick(k, v).map_err(usage)? {
            map.insert(k.to_string(), x);
        }
    }
    Ok(ParamBlock::from_map(&map)?)
}

fn order_of(flag: Option<u32>, cfg: &Config, default: u32) -> Result<u32, CliError> {
    let o = cfg.pick_or("order", flag, default).map_err(usage)?;
    if o == 0 {
        return Err(CliError::Invalid("order must be >= 1".into()));
    }
    Ok(o)
}

fn tau_of(flag: Option<f64>, cfg: &Config) -> Result<f64, CliError> {
    let t = cfg.pick_or("tau", flag, 1.0).map_err(usage)?;
    if !(t > 0.0) {
        return Err(CliError::Invalid(format!("tau must be positive, got {t}")));
    }
    Ok(t)
}

fn rat(o: u32) -> Rat {
    Rat::from_integer(o as i128)
}

/// `rocha:1,3` or `rocha:1,3+3,3`.
fn parse_rocha(spec: &str) -> Result<Vec<(i64, i64)>, CliError> {
    let bad = || usage(format!("bad --check {spec:?}; expected rocha:r,s[+r,s...]"));
    let body = spec.strip_prefix("rocha:").ok_or_else(bad)?;
    body.split('+')
        .map(|pair| {
            let (r, s) = pair.split_once(',').ok_or_else(bad)?;
            Ok((r.trim().parse().map_err(|_| bad())?, s.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn series_checks(series: &QSeries, checks: &[String], m: f64, order: u32) -> Result<Vec<CheckRow>, CliError> {
    let o = rat(order);
    let mut rows = Vec::new();
    for spec in checks {
        let mut want = QSeries::zero(o);
        for (r, s) in parse_rocha(spec)? {
            want = want.add(&rocha_caridi(r, s, m, o)?);
        }
        rows.push(CheckRow::new(spec.clone(), series.max_abs_diff(&want, o), SERIES_TOL));
    }
    Ok(rows)
}

fn with_series(mut out: Outcome, s: &QSeries, tau: f64) -> Outcome {
    let ev = s.evaluate(tau);
    out.results = json!({"tau": ev.tau, "value": ev.value, "terms": s.len()});
    out.tail_bounds = json!({"value": ev.tail_bound});
    out.csv = CsvOut::Single(s.to_csv());
    out
}

fn params(p: &ParamArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let block = param_block(p, cfg)?;
    let w = block.weights();
    let cg = block.cg()?;
    let back = cg.to_weights();
    let mut out = Outcome::new("params", json!({"weights": w, "cg": cg}), None);
    out.results = json!({
        "weights": w,
        "cg": cg,
        "central_charge": central_charge(cg.m),
        "h_r12_r12": kac_h(cg.r12, cg.r12, cg.m),
    });
    out.checks.push(CheckRow::new("weights -> parameters -> weights", weight_diff(&w, &back), 1e-10));
    Ok(out)
}

fn weight_diff(a: &LoopWeights, b: &LoopWeights) -> f64 {
    [
        a.n - b.n,
        a.n1 - b.n1,
        a.n2 - b.n2,
        a.n12 - b.n12,
        a.l - b.l,
        a.l1 - b.l1,
        a.l2 - b.l2,
    ]
    .iter()
    .fold(0.0f64, |acc, d| acc.max(d.abs()))
}

fn ztwo(p: &ParamArgs, s: &SeriesArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let cg = param_block(p, cfg)?.cg()?;
    let order = order_of(s.order, cfg, 12)?;
    let tau = tau_of(s.tau, cfg)?;
    let z = z_two_boundary(&cg, rat(order))?;
    let mut out = with_series(Outcome::new("ztwo", json!({"cg": cg, "weights": cg.to_weights()}), Some(order)), &z, tau);
    out.checks = series_checks(&z, &s.check, cg.m, order)?;
    Ok(out)
}

fn zone(v: [Option<f64>; 4], s: &SeriesArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let [m, r1, u1, chi] = v;
    let m = cfg.require("m", m).map_err(usage)?;
    let r1 = cfg.require("r1", r1).map_err(usage)?;
    let u1 = cfg.require("u1", u1).map_err(usage)?;
    let chi = cfg.require("chi", chi).map_err(usage)?;
    let order = order_of(s.order, cfg, 12)?;
    let tau = tau_of(s.tau, cfg)?;
    let z = z_one_boundary(r1, u1, chi, m, rat(order))?;
    let params = json!({"m": m, "r1": r1, "u1": u1, "chi": chi});
    let mut out = with_series(Outcome::new("zone", params, Some(order)), &z, tau);
    out.checks = series_checks(&z, &s.check, m, order)?;
    Ok(out)
}

fn zpotts(v: [Option<f64>; 4], s: &SeriesArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let [q, q1, q2, q12] = v;
    let q = cfg.require("Q", q).map_err(usage)?;
    let q1 = cfg.require("Q1", q1).map_err(usage)?;
    let q2 = cfg.require("Q2", q2).map_err(usage)?;
    let q12 = cfg.require("Q12", q12).map_err(usage)?;
    let order = order_of(s.order, cfg, 12)?;
    let tau = tau_of(s.tau, cfg)?;
    let z = z_potts(q, q1, q2, q12, rat(order))?;
    let params = json!({"Q": q, "Q1": q1, "Q2": q2, "Q12": q12, "weights": z.weights, "cg": z.params});
    let mut out = with_series(Outcome::new("zpotts", params, Some(order)), &z.series, tau);
    if let Some(w) = &z.warning {
        out.results["warning"] = json!(w);
    }
    out.checks = series_checks(&z.series, &s.check, z.params.m, order)?;
    Ok(out)
}

fn perco(tau: Option<f64>, order: Option<u32>, cfg: &Config) -> Result<Outcome, CliError> {
    let order = order_of(order, cfg, 40)?;
    let tau = tau_of(tau, cfg)?;
    let rep = crossing_report(tau, rat(order))?;
    let mut out = Outcome::new("perco", json!({"m": 2, "r1": 1, "r2": 1, "r12": 1, "tau": tau}), Some(order));
    let mut results = serde_json::Map::new();
    let mut bounds = serde_json::Map::new();
    let mut put = |k: String, e: annulus::percolation::Entry| {
        results.insert(k.clone(), json!(e.value));
        bounds.insert(k, json!(e.tail_bound));
    };
    put("P0".into(), rep.p0);
    for row in &rep.table {
        let j = row.j;
        put(format!("P{j}"), row.sum);
        put(format!("P{j}_bb"), row.bb);
        put(format!("P{j}_ub"), row.ub);
        put(format!("P{j}_bu"), row.bu);
        put(format!("P{j}_uu"), row.uu);
    }
    put("P_crossing".into(), rep.p_crossing);
    results.insert("tau".into(), json!(tau));
    results.insert("table".into(), serde_json::to_value(&rep.table).expect("table serializes"));
    out.results = Value::Object(results);
    out.tail_bounds = Value::Object(bounds);
    out.checks = rep.checks.iter().map(|c| CheckRow { name: c.name.clone(), pass: c.pass, delta: c.delta }).collect();
    out.csv = CsvOut::Files(rep.series.iter().map(|(k, s)| (k.clone(), s.to_csv())).collect());
    Ok(out)
}

fn crossing(tau: Option<f64>, order: Option<u32>, cfg: &Config) -> Result<Outcome, CliError> {
    let order = order_of(order, cfg, 40)?;
    let tau = tau_of(tau, cfg)?;
    let o = rat(order);
    let pc = p_crossing(o)?;
    let theta = p_crossing_theta(o)?;
    let w = LoopWeights { n12: 0.0, ..LoopWeights::percolation() };
    let z0 = z_two_boundary(&CgParams::from_weights(&w)?, o)?;
    let mut out = with_series(Outcome::new("crossing", json!({"m": 2, "tau": tau}), Some(order)), &pc, tau);
    out.checks.push(CheckRow::new("K0(1) - K0(3) = theta series", pc.max_abs_diff(&theta, o), 1e-12));
    out.checks.push(CheckRow::new("Z(n12=0) + P_crossing = 1", z0.add(&pc).max_abs_diff(&QSeries::one(o), o), 1e-12));
    Ok(out)
}

fn fss(
    v: [Option<f64>; 4],
    nmin: Option<usize>,
    nmax: Option<usize>,
    boundary: Option<BoundaryArg>,
    cfg: &Config,
) -> Result<Outcome, CliError> {
    let [m, r1, r2, r12] = v;
    let boundary = match boundary {
        Some(b) => b,
        None => match cfg.get::<String>("boundary").map_err(usage)?.as_deref() {
            None | Some("two") => BoundaryArg::Two,
            Some("free") => BoundaryArg::Free,
            Some(other) => return Err(usage(format!("boundary must be two or free, got {other:?}"))),
        },
    };
    let m = cfg.require("m", m).map_err(usage)?;
    let (w, r1, r2, r12) = match boundary {
        BoundaryArg::Two => {
            let r1 = cfg.require("r1", r1).map_err(usage)?;
            let r2 = cfg.pick_or("r2", r2, r1).map_err(usage)?;
            let r12 = cfg.require("r12", r12).map_err(usage)?;
            (fss_weights(m, r1, r2, r12), Some(r1), Some(r2), Some(r12))
        }
        BoundaryArg::Free => {
            let n = 2.0 * (PI / (m + 1.0)).cos();
            (LoopWeights::free(n, n), None, None, None)
        }
    };
    let nmin = cfg.pick_or("nmin", nmin, 6).map_err(usage)?;
    let nmax = cfg.pick_or("nmax", nmax, 14).map_err(usage)?;
    let sizes: Vec<usize> = (nmin..=nmax).filter(|n| n % 2 == 0 && *n >= 2).collect();
    if sizes.len() < 3 {
        return Err(CliError::Invalid(format!("need at least three even sizes in [{nmin}, {nmax}]")));
    }
    let b = match boundary {
        BoundaryArg::Two => Boundary::TwoBoundary,
        BoundaryArg::Free => Boundary::Free,
    };
    let f = free_energies(&sizes, &w, b, Execution::Parallel)?;
    let mut windows = Vec::new();
    for last in 3..=sizes.len() {
        let win = fss_window(&sizes[..last], &f[..last], m)?;
        windows.push(json!({
            "sizes": win.fit.sizes,
            "terms": win.fit.coefficients.len(),
            "h": win.fit.h,
            "phi": win.fit.phi,
            "phi_error": win.phi_error,
        }));
    }
    let fin = fss_window(&sizes, &f, m)?;
    let params = json!({
        "m": m, "r1": r1, "r2": r2, "r12": r12, "weights": w,
        "boundary": format!("{boundary:?}").to_lowercase(),
    });
    let mut out = Outcome::new("fss", params, None);
    out.results = json!({
        "sizes": sizes,
        "f": f,
        "fit": fin.fit,
        "phi": fin.fit.phi,
        "phi_error": fin.phi_error,
        "windows": windows,
    });
    out.tail_bounds = json!({"phi": fin.phi_error});
    let mut csv = String::from("N,f\n");
    for (n, x) in sizes.iter().zip(&f) {
        csv.push_str(&format!("{n},{x:.17e}\n"));
    }
    out.csv = CsvOut::Single(csv);
    Ok(out)
}

fn spectrum(
    n: Option<usize>,
    m: Option<f64>,
    gamma: Option<f64>,
    v: [Option<f64>; 6],
    cfg: &Config,
) -> Result<Outcome, CliError> {
    let [r1, r2, s1, s2, phi1, phi2] = v;
    let n = cfg.require("n", n).map_err(usage)?;
    let gamma = match cfg.pick("gamma", gamma).map_err(usage)? {
        Some(g) => g,
        None => PI / (cfg.pick_or("m", m, 3.0).map_err(usage)? + 1.0),
    };
    let r1 = cfg.pick_or("r1", r1, 1.5).map_err(usage)?;
    let r2 = cfg.pick_or("r2", r2, r1).map_err(usage)?;
    let s1 = cfg.pick_or("s1", s1, 0.0).map_err(usage)?;
    let s2 = cfg.pick_or("s2", s2, 2.5).map_err(usage)?;
    let phi1 = cfg.pick_or("phi1", phi1, 0.6).map_err(usage)?;
    let phi2 = cfg.pick_or("phi2", phi2, phi1).map_err(usage)?;
    let p = SpinChainParams::new(n, gamma, r1, r2, s1, s2, phi1, phi2)?;
    if !(p.lambda1 > 0.0 && p.lambda2 > 0.0) {
        return Err(CliError::Invalid(format!(
            "boundary couplings must be positive, got lambda1 = {}, lambda2 = {}",
            p.lambda1, p.lambda2
        )));
    }
    let cmp = compare_spectra(&p, Execution::Parallel)?;
    let mut out = Outcome::new("spectrum", json!({"chain": p, "weights": p.loop_weights()}), None);
    out.results = json!({
        "sites": n,
        "dim": cmp.diagram.len(),
        "max_deviation": cmp.max_deviation,
        "relation_residual": cmp.relation_residual,
        "ground_state": {"diagram": cmp.diagram[0], "spin": cmp.spin[0]},
    });
    out.checks.push(CheckRow::new("diagram and spin spectra agree", cmp.max_deviation, SPECTRUM_TOL));
    let mut csv = String::from("index,diagram_re,diagram_im,spin_re,spin_im\n");
    for (k, (a, b)) in cmp.diagram.iter().zip(&cmp.spin).enumerate() {
        csv.push_str(&format!("{k},{:.17e},{:.17e},{:.17e},{:.17e}\n", a.0, a.1, b.0, b.1));
    }
    out.csv = CsvOut::Single(csv);
    Ok(out)
}
