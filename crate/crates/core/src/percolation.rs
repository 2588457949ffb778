//! Refined crossing probabilities of critical percolation on the annulus.
//!
//! Percolation has every loop weight equal to one, so `m = 2` and
//! `r1 = r2 = r12 = 1`. The probabilities are Taylor coefficients of the
//! loop partition function `Z(l, l1, l2)` around `l = l1 = l2 = 0`
//! (`chi = pi/2`). Because the q-dependence sits entirely in the
//! characters, they are read off [`z_polynomial`] exactly.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::continuum::{character_k0, z_polynomial, LoopSeriesPoly};
use crate::error::{Error, Result};
use crate::qseries::{rat_to_f64, Evaluation, QSeries, Rat};
use crate::reps::Status;
use crate::trace::amplitude;

pub const M: f64 = 2.0;

/// `Z(l, l1, l2)` at the percolation point.
pub fn loop_polynomial(order: Rat) -> Result<LoopSeriesPoly> {
    z_polynomial(M, 1.0, 1.0, 1.0, order)
}

/// Probability that no cluster wraps the periodic direction.
pub fn p0(order: Rat) -> Result<QSeries> {
    Ok(loop_polynomial(order)?.coefficient(0, 0, 0))
}

/// Series of the entries in row `j`.
#[derive(Debug, Clone)]
pub struct SectorSeries {
    pub j: usize,
    pub sum: QSeries,
    pub bb: QSeries,
    pub ub: QSeries,
    pub bu: QSeries,
    pub uu: QSeries,
}

fn sector_from(z: &LoopSeriesPoly, j: usize) -> SectorSeries {
    let sum = z.diagonal_coefficient(2 * j);
    let bb = z.coefficient(2 * j - 2, 1, 1);
    let uu = z.coefficient(2 * j, 0, 0);
    let mixed = sum.sub(&bb).sub(&uu).scale(0.5);
    SectorSeries { j, sum, bb, ub: mixed.clone(), bu: mixed, uu }
}

/// Probability of exactly `j` wrapping clusters, the leftmost touching
/// (`b`) or avoiding (`u`) the left rim and likewise on the right.
pub fn p_sector(j: usize, alpha: Status, beta: Status, order: Rat) -> Result<QSeries> {
    if j == 0 {
        return Err(Error::Invalid("sector probabilities start at j = 1".into()));
    }
    let s = sector_from(&loop_polynomial(order)?, j);
    Ok(match (alpha, beta) {
        (Status::Blobbed, Status::Blobbed) => s.bb,
        (Status::Unblobbed, Status::Unblobbed) => s.uu,
        (Status::Unblobbed, Status::Blobbed) => s.ub,
        (Status::Blobbed, Status::Unblobbed) => s.bu,
    })
}

/// Probability that some cluster connects the two rims:
/// `1 - Z(n12 = 0) = K_0(r12 = 1) - K_0(r12 = 3)`.
pub fn p_crossing(order: Rat) -> Result<QSeries> {
    Ok(character_k0(1.0, M, order)?.sub(&character_k0(3.0, M, order)?))
}

/// Theta-function form of the crossing probability,
/// `sum_k (q^{6k^2+k} + q^{6k^2+5k+1} - 2 q^{6k^2+3k+1/3}) / P(q)`.
pub fn p_crossing_theta(order: Rat) -> Result<QSeries> {
    let span = order + Rat::from_integer(1);
    let kmax = (rat_to_f64(span) / 6.0).sqrt().ceil() as i128 + 2;
    let mut num = QSeries::zero(span);
    for k in -kmax..=kmax {
        num.add_term(Rat::from_integer(6 * k * k + k), 1.0);
        num.add_term(Rat::from_integer(6 * k * k + 5 * k + 1), 1.0);
        num.add_term(Rat::new(18 * k * k + 9 * k + 1, 3), -2.0);
    }
    Ok(QSeries::euler_inverse(span).mul(&num)?.truncate(order))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Entry {
    pub value: f64,
    pub tail_bound: f64,
}

impl From<Evaluation> for Entry {
    fn from(e: Evaluation) -> Self {
        Self { value: e.value, tail_bound: e.tail_bound }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub j: usize,
    pub sum: Entry,
    pub bb: Entry,
    pub ub: Entry,
    pub bu: Entry,
    pub uu: Entry,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub tau: f64,
    pub order: f64,
    pub p0: Entry,
    pub table: Vec<Row>,
    pub p_crossing: Entry,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub series: BTreeMap<String, QSeries>,
}

pub const REPORT_JMAX: usize = 3;

pub fn crossing_report(tau: f64, order: Rat) -> Result<CrossingReport> {
    if !(tau > 0.0) {
        return Err(Error::OutOfRange { name: "tau", value: tau, range: "(0, inf)" });
    }
    let z = loop_polynomial(order)?;
    let p0s = z.coefficient(0, 0, 0);
    let mut series = BTreeMap::new();
    series.insert("P0".to_string(), p0s.clone());
    let mut table = Vec::new();
    let mut checks = Vec::new();
    let mut total = p0s.clone();
    let mut j = 1;
    loop {
        let s = sector_from(&z, j);
        if s.sum.is_empty() && j > REPORT_JMAX {
            break;
        }
        total = total.add(&s.sum);
        if j <= REPORT_JMAX {
            let ev = |x: &QSeries| Entry::from(x.evaluate(tau));
            table.push(Row { j, sum: ev(&s.sum), bb: ev(&s.bb), ub: ev(&s.ub), bu: ev(&s.bu), uu: ev(&s.uu) });
            let direct = z.coefficient(2 * j - 1, 0, 1);
            let d = s.ub.max_abs_diff(&direct, order).max(s.bu.max_abs_diff(&z.coefficient(2 * j - 1, 1, 0), order));
            checks.push(Check { name: format!("P{j}^ub = P{j}^bu (series)"), pass: d < 1e-9, delta: d });
            let next = z.coefficient(2 * j, 1, 1);
            let d = next.max_abs_diff(&s.uu, order);
            checks.push(Check { name: format!("P{}^bb = P{j}^uu (series)", j + 1), pass: d < 1e-9, delta: d });
            for (name, x) in [("sum", &s.sum), ("bb", &s.bb), ("ub", &s.ub), ("bu", &s.bu), ("uu", &s.uu)] {
                series.insert(format!("P{j}_{name}"), x.clone());
            }
        }
        j += 1;
    }
    let d = total.max_abs_diff(&QSeries::one(order), order);
    checks.push(Check { name: "P0 + sum_j P_j = 1 (series)".into(), pass: d < 1e-9, delta: d });
    let numeric: f64 = table.iter().map(|r| r.sum.value).sum::<f64>() + p0s.evaluate(tau).value;
    let bound: f64 = table.iter().map(|r| r.sum.tail_bound).sum::<f64>() + p0s.tail_bound(tau);
    let dropped = total.sub(&p0s).evaluate(tau).value - table.iter().map(|r| r.sum.value).sum::<f64>();
    let d = (numeric - 1.0).abs();
    checks.push(Check {
        name: format!("P0 + sum_(j<={REPORT_JMAX}) P_j = 1 (numeric)"),
        pass: d <= bound + dropped.abs() + 1e-12,
        delta: d,
    });
    let pc = p_crossing(order)?;
    series.insert("P_crossing".into(), pc.clone());
    Ok(CrossingReport {
        tau,
        order: crate::qseries::rat_to_f64(order),
        p0: p0s.evaluate(tau).into(),
        table,
        p_crossing: pc.evaluate(tau).into(),
        checks,
        series,
    })
}

/// Trigonometric amplitude with `l = 2 cos chi` continued to complex `l`.
fn amplitude_complex(j: usize, l: Complex64) -> Complex64 {
    // u1 = u2 = 1: D^{bb}_{2j} = sin((2j+1) chi) / sin chi.
    let chi = (l / 2.0).acos();
    ((2 * j + 1) as f64 * chi).sin() / chi.sin()
}

/// Taylor coefficient `[l^k]` of `D^{bb}_{2j}` at `u1 = u2 = 1`, taken from
/// the trigonometric form by a discrete Cauchy integral on `|l| = 1`.
pub fn amplitude_taylor_coefficient(j: usize, k: usize) -> f64 {
    let points = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..points {
        let theta = 2.0 * std::f64::consts::PI * p as f64 / points as f64;
        let z = Complex64::from_polar(1.0, theta);
        acc += amplitude_complex(j, z) * Complex64::from_polar(1.0, -(k as f64) * theta);
    }
    (acc / points as f64).re
}

/// `d_{u1} d_{u2} D / (d_{u1} l1 d_{u2} l2)` at `u1 = u2 = 1` from the
/// trigonometric amplitude, by central differences with Richardson
/// extrapolation (base step 1e-3, three levels).
pub fn mixed_u_derivative(j: usize, alpha: Status, beta: Status, chi: f64) -> Result<f64> {
    let d = |u1: f64, u2: f64| amplitude(j, alpha, beta, chi, u1, u2);
    let lw = |u: f64| ((u + 1.0) * chi).sin() / (u * chi).sin();
    let second = |h: f64| -> Result<f64> {
        Ok((d(1.0 + h, 1.0 + h)? - d(1.0 + h, 1.0 - h)? - d(1.0 - h, 1.0 + h)? + d(1.0 - h, 1.0 - h)?) / (4.0 * h * h))
    };
    let first = |h: f64| (lw(1.0 + h) - lw(1.0 - h)) / (2.0 * h);
    let richardson = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let h = 1e-3;
        // Steps h, 2h, 4h: going outward keeps the roundoff of the second
        // difference near eps / h^2.
        let mut t: Vec<f64> = (0..3).map(|k| f(h * 2f64.powi(k))).collect::<Result<_>>()?;
        for level in 1..3 {
            let factor = 4f64.powi(level);
            t = t.windows(2).map(|w| (factor * w[0] - w[1]) / (factor - 1.0)).collect();
        }
        Ok(t[0])
    };
    let num = richardson(&second)?;
    let dl = richardson(&|h| Ok(first(h)))?;
    Ok(num / (dl * dl))
}
