//! Continuum limit: characters, the annulus partition functions and the
//! Potts mapping, as q-series with exact exponents.
//!
//! Every character carries the prefactor `q^{-c/24} / P(q)`. Kac weights
//! are written through `x = (m+1) r - m s`, so that
//! `h = (x^2 - 1) / (4 m (m+1))`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{central_charge_exact, CgParams, LoopWeights};
use crate::qseries::{int, snap_rational, QSeries, Rat};
use crate::reps::{Sector, Status};
use crate::trace::{amplitude_poly, sector_amplitude};

/// Exponent bookkeeping shared by all characters at fixed `m` and order.
#[derive(Debug, Clone, Copy)]
struct Frame {
    m: Rat,
    c24: Rat,
    order: Rat,
    /// Numerator exponents below this survive the prefactor.
    bound: Rat,
    /// `x^2` must stay below this.
    x2max: Rat,
}

impl Frame {
    fn new(m: f64, order: Rat) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::OutOfRange { name: "m", value: m, range: "(0, inf)" });
        }
        if order < Rat::zero() {
            return Err(Error::Truncation(order.to_f64().unwrap_or(f64::NAN)));
        }
        let m = snap_rational(m);
        let c24 = central_charge_exact(m) / int(24);
        let bound = order + c24;
        let x2max = int(4) * m * (m + Rat::one()) * bound + Rat::one();
        Ok(Self { m, c24, order, bound, x2max })
    }

    fn h(&self, x: Rat) -> Rat {
        (x * x - Rat::one()) / (int(4) * self.m * (self.m + Rat::one()))
    }

    fn keeps(&self, x: Rat) -> bool {
        x * x < self.x2max
    }

    /// Integers `k >= kmin` (all of Z if `None`) with `x = a + b k` kept.
    fn indices(&self, a: Rat, b: Rat, kmin: Option<i64>) -> Vec<i64> {
        let xmax = self.x2max.to_f64().unwrap().max(0.0).sqrt();
        let (af, bf) = (a.to_f64().unwrap(), b.to_f64().unwrap());
        let (k1, k2) = ((-xmax - af) / bf, (xmax - af) / bf);
        let lo = (k1.min(k2).floor() as i64 - 1).max(kmin.unwrap_or(i64::MIN));
        let hi = k1.max(k2).ceil() as i64 + 1;
        (lo..=hi).filter(|k| self.keeps(a + b * int(*k as i128))).collect()
    }

    /// `q^{-c/24} / P(q)` times the numerator, trusted below `order`.
    fn finish(&self, numer: &[(Rat, f64)]) -> Result<QSeries> {
        let num = QSeries::from_terms(numer.iter().copied(), self.bound);
        let Some(hmin) = num.min_exponent() else {
            return Ok(QSeries::zero(self.order));
        };
        let pre = QSeries::euler_inverse(self.order - hmin + self.c24).shift(-self.c24);
        Ok(pre.mul(&num)?.truncate(self.order))
    }
}

/// Rational exponents of the continuum parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactParams {
    pub r1: Rat,
    pub r2: Rat,
    pub r12: Rat,
}

impl ExactParams {
    pub fn from_cg(p: &CgParams) -> Self {
        Self { r1: snap_rational(p.r1), r2: snap_rational(p.r2), r12: snap_rational(p.r12) }
    }
}

fn sign(s: Status) -> Rat {
    match s {
        Status::Blobbed => Rat::one(),
        Status::Unblobbed => -Rat::one(),
    }
}

/// `K_0 = q^{-c/24}/P sum_{n in Z} q^{h_{r12-2n, r12}}`.
pub fn character_k0(r12: f64, m: f64, order: Rat) -> Result<QSeries> {
    let f = Frame::new(m, order)?;
    k0_in(&f, snap_rational(r12))
}

fn k0_in(f: &Frame, r12: Rat) -> Result<QSeries> {
    let (a, b) = (r12, -int(2) * (f.m + Rat::one()));
    let terms: Vec<(Rat, f64)> = f.indices(a, b, None).into_iter().map(|n| (f.h(a + b * int(n as i128)), 1.0)).collect();
    f.finish(&terms)
}

/// `K^{ab}_{2j} = q^{-c/24}/P sum_{n>=0} q^{h_{R-2n, R+2j}}` with
/// `R = ±r1 ± r2 - 1`, minus signs for unblobbed rims.
pub fn character_k2j(j: usize, alpha: Status, beta: Status, r1: f64, r2: f64, m: f64, order: Rat) -> Result<QSeries> {
    let f = Frame::new(m, order)?;
    f.finish(&k2j_numerator(&f, j, alpha, beta, snap_rational(r1), snap_rational(r2)))
}

fn k2j_numerator(f: &Frame, j: usize, alpha: Status, beta: Status, r1: Rat, r2: Rat) -> Vec<(Rat, f64)> {
    let r = sign(alpha) * r1 + sign(beta) * r2 - Rat::one();
    let a = r - int(2 * j as i128) * f.m;
    let b = -int(2) * (f.m + Rat::one());
    f.indices(a, b, Some(0)).into_iter().map(|n| (f.h(a + b * int(n as i128)), 1.0)).collect()
}

/// Largest `j` whose characters can reach below the order: past it even
/// the `n = 0` term has `x <= -xmax`.
fn sector_is_empty(f: &Frame, j: usize, r1: Rat, r2: Rat) -> bool {
    // The largest R over the four sign choices gives the largest x.
    let r = r1.abs() + r2.abs() - Rat::one();
    let x0 = r - int(2 * j as i128) * f.m;
    x0 < Rat::zero() && !f.keeps(x0)
}

/// Series-valued polynomial in `(l, l1, l2)`, linear in `l1` and `l2`.
/// Keys are `(power of l, power of l1, power of l2)`.
#[derive(Debug, Clone)]
pub struct LoopSeriesPoly {
    pub order: Rat,
    pub terms: BTreeMap<(usize, usize, usize), QSeries>,
}

impl LoopSeriesPoly {
    fn add_to(&mut self, key: (usize, usize, usize), s: &QSeries, k: f64) {
        let slot = self.terms.entry(key).or_insert_with(|| QSeries::zero(self.order));
        *slot = slot.add(&s.scale(k));
    }

    pub fn coefficient(&self, lpow: usize, l1pow: usize, l2pow: usize) -> QSeries {
        self.terms.get(&(lpow, l1pow, l2pow)).cloned().unwrap_or_else(|| QSeries::zero(self.order))
    }

    /// Coefficient of `l^p` after setting `l1 = l2 = l`.
    pub fn diagonal_coefficient(&self, p: usize) -> QSeries {
        self.terms
            .iter()
            .filter(|((k, a, b), _)| k + a + b == p)
            .fold(QSeries::zero(self.order), |acc, (_, s)| acc.add(s))
    }

    pub fn evaluate(&self, l: f64, l1: f64, l2: f64) -> QSeries {
        self.terms.iter().fold(QSeries::zero(self.order), |acc, ((k, a, b), s)| {
            acc.add(&s.scale(l.powi(*k as i32) * l1.powi(*a as i32) * l2.powi(*b as i32)))
        })
    }
}

/// `Z(l, l1, l2) = K_0 + sum_{j,a,b} D^{ab}_{2j}(l, l1, l2) K^{ab}_{2j}` with
/// the amplitudes kept symbolic.
pub fn z_polynomial(m: f64, r1: f64, r2: f64, r12: f64, order: Rat) -> Result<LoopSeriesPoly> {
    let f = Frame::new(m, order)?;
    let (r1, r2, r12) = (snap_rational(r1), snap_rational(r2), snap_rational(r12));
    let mut out = LoopSeriesPoly { order, terms: BTreeMap::new() };
    out.add_to((0, 0, 0), &k0_in(&f, r12)?, 1.0);
    let mut j = 1;
    while !sector_is_empty(&f, j, r1, r2) {
        for alpha in Status::ALL {
            for beta in Status::ALL {
                let k = f.finish(&k2j_numerator(&f, j, alpha, beta, r1, r2))?;
                let d = amplitude_poly(j, alpha, beta);
                for (coef, a, b) in [(&d.c00, 0, 0), (&d.c10, 1, 0), (&d.c01, 0, 1), (&d.c11, 1, 1)] {
                    for (p, c) in coef.iter().enumerate().filter(|(_, c)| **c != 0) {
                        out.add_to((p, a, b), &k, *c as f64);
                    }
                }
            }
        }
        j += 1;
    }
    Ok(out)
}

/// The seven-parameter annulus partition function. All numerators are
/// combined before the common prefactor is applied, so cancellations
/// between sectors happen on O(1) coefficients.
pub fn z_two_boundary(p: &CgParams, order: Rat) -> Result<QSeries> {
    p.validate()?;
    let f = Frame::new(p.m, order)?;
    let e = ExactParams::from_cg(p);
    let w = p.to_weights();
    let (a, b) = (e.r12, -int(2) * (f.m + Rat::one()));
    let mut terms: Vec<(Rat, f64)> = f.indices(a, b, None).into_iter().map(|n| (f.h(a + b * int(n as i128)), 1.0)).collect();
    let mut j = 1;
    while !sector_is_empty(&f, j, e.r1, e.r2) {
        for alpha in Status::ALL {
            for beta in Status::ALL {
                let d = sector_amplitude(Sector::strings(j, alpha, beta), &w);
                terms.extend(k2j_numerator(&f, j, alpha, beta, e.r1, e.r2).into_iter().map(|(h, c)| (h, c * d)));
            }
        }
        j += 1;
    }
    f.finish(&terms)
}

/// One-boundary annulus:
/// `q^{-c/24}/P { sum_{j>=0} sin((u1+2j)chi)/sin(u1 chi) q^{h_{r1,r1+2j}}
///  + sum_{j>=1} sin((-u1+2j)chi)/sin(-u1 chi) q^{h_{-r1,-r1+2j}} }`.
pub fn z_one_boundary(r1: f64, u1: f64, chi: f64, m: f64, order: Rat) -> Result<QSeries> {
    let den = (u1 * chi).sin();
    if den.abs() < 1e-12 {
        return Err(Error::Pole);
    }
    let f = Frame::new(m, order)?;
    let r = snap_rational(r1);
    let b = -int(2) * f.m;
    let mut terms = Vec::new();
    for (a, u, jmin) in [(r, u1, 0i64), (-r, -u1, 1)] {
        for j in f.indices(a, b, Some(jmin)) {
            let amp = ((u + 2.0 * j as f64) * chi).sin() / (u * chi).sin();
            terms.push((f.h(a + b * int(j as i128)), amp));
        }
    }
    f.finish(&terms)
}

/// Rocha-Caridi character
/// `q^{-c/24}/P sum_{k in Z} (q^{h_{r, s+2k(m+1)}} - q^{h_{r, -s+2k(m+1)}})`.
pub fn rocha_caridi(r: i64, s: i64, m: f64, order: Rat) -> Result<QSeries> {
    let f = Frame::new(m, order)?;
    let (r, s) = (int(r as i128), int(s as i128));
    let b = -int(2) * f.m * (f.m + Rat::one());
    let mut terms = Vec::new();
    for (sign, a) in [(1.0, (f.m + Rat::one()) * r - f.m * s), (-1.0, (f.m + Rat::one()) * r + f.m * s)] {
        for k in f.indices(a, b, None) {
            terms.push((f.h(a + b * int(k as i128)), sign));
        }
    }
    f.finish(&terms)
}

/// `Z_{l1 l2} = q^{-c/24}/P sum_{j>=1} (-1)^{j-1} (K^bb - K^ub - K^bu + K^uu)`.
pub fn z_l1l2(r1: f64, r2: f64, m: f64, order: Rat) -> Result<QSeries> {
    let f = Frame::new(m, order)?;
    let (r1, r2) = (snap_rational(r1), snap_rational(r2));
    let mut terms = Vec::new();
    let mut j = 1;
    while !sector_is_empty(&f, j, r1, r2) {
        let parity = if j % 2 == 1 { 1.0 } else { -1.0 };
        for alpha in Status::ALL {
            for beta in Status::ALL {
                let s = if alpha == beta { parity } else { -parity };
                terms.extend(k2j_numerator(&f, j, alpha, beta, r1, r2).into_iter().map(|(e, c)| (e, c * s)));
            }
        }
        j += 1;
    }
    f.finish(&terms)
}

#[derive(Debug, Clone, Serialize)]
pub struct PottsSeries {
    #[serde(skip)]
    pub series: QSeries,
    pub weights: LoopWeights,
    pub params: CgParams,
    pub warning: Option<String>,
}

/// Loop weights of the Potts model with boundary spins restricted to `Q1`,
/// `Q2` values sharing `Q12` of them.
pub fn potts_weights(q: f64, q1: f64, q2: f64, q12: f64) -> Result<LoopWeights> {
    if !(q > 0.0 && q <= 4.0) {
        return Err(Error::OutOfRange { name: "Q", value: q, range: "(0, 4]" });
    }
    if !(q1 <= q && q2 <= q && q1 >= 0.0 && q2 >= 0.0) {
        return Err(Error::Invalid("need 0 <= Q1, Q2 <= Q".into()));
    }
    if !(q12 >= 0.0 && q12 <= q1.min(q2)) {
        return Err(Error::OutOfRange { name: "Q12", value: q12, range: "[0, min(Q1, Q2)]" });
    }
    let s = q.sqrt();
    Ok(LoopWeights::plain(s, q1 / s, q2 / s, q12 / s))
}

/// `Z_Potts = Z_loop + (Q12 - l1 l2) Z_{l1 l2}` with `l = n`, `l_i = n_i`.
pub fn z_potts(q: f64, q1: f64, q2: f64, q12: f64, order: Rat) -> Result<PottsSeries> {
    let w = potts_weights(q, q1, q2, q12)?;
    let p = CgParams::from_weights(&w)?;
    let zloop = z_two_boundary(&p, order)?;
    let corr = z_l1l2(p.r1, p.r2, p.m, order)?;
    let series = zloop.add(&corr.scale(q12 - w.l1 * w.l2));
    let warning = (q.fract() != 0.0 || q1.fract() != 0.0 || q2.fract() != 0.0 || q12.fract() != 0.0)
        .then(|| "non-integer Q: random-cluster interpretation only".to_string());
    Ok(PottsSeries { series, weights: w, params: p, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::kac_h_exact;
    use crate::qseries::rat;
    use crate::trace::chebyshev_u;
    use std::f64::consts::PI;

    const B: Status = Status::Blobbed;
    const U: Status = Status::Unblobbed;

    /// Strips the prefactor: `q^{c/24} P(q) s`.
    fn numerator(s: &QSeries, m: f64) -> QSeries {
        let c24 = central_charge_exact(snap_rational(m)) / int(24);
        let p = QSeries::euler_product(s.order() + c24 + int(1));
        p.mul(&s.shift(c24)).unwrap()
    }

    fn close(a: &QSeries, b: &QSeries, up_to: Rat, tol: f64) {
        let d = a.max_abs_diff(b, up_to);
        assert!(d < tol, "series differ by {d}\n{a}\nvs\n{b}");
    }

    #[test]
    fn k0_percolation_exponents() {
        let k = character_k0(1.0, 2.0, int(30)).unwrap();
        let num = numerator(&k, 2.0);
        let mut want: Vec<i128> = (-5i128..=5).flat_map(|k| [6 * k * k + k, 6 * k * k + 5 * k + 1]).filter(|e| *e < 30).collect();
        want.sort();
        want.dedup();
        assert_eq!(&want[..6], &[0, 1, 2, 5, 7, 12]);
        let got: Vec<Rat> = num.truncate(int(30)).terms().map(|(e, _)| e).collect();
        assert_eq!(got, want.iter().map(|e| int(*e)).collect::<Vec<_>>());
        assert!(num.truncate(int(30)).terms().all(|(_, c)| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn k0_r12_three() {
        let num = numerator(&character_k0(3.0, 2.0, int(12)).unwrap(), 2.0).truncate(int(12));
        let terms: Vec<(Rat, f64)> = num.terms().collect();
        assert_eq!(terms, vec![(rat(1, 3), 2.0), (rat(10, 3), 2.0), (rat(28, 3), 2.0)]);
    }

    #[test]
    fn k0_symmetries() {
        for (r12, m) in [(0.7, 2.0), (1.25, 3.0), (2.0, 5.0)] {
            let a = character_k0(r12, m, int(12)).unwrap();
            close(&a, &character_k0(-r12, m, int(12)).unwrap(), int(12), 1e-12);
            close(&a, &character_k0(r12 + 2.0 * (m + 1.0), m, int(12)).unwrap(), int(12), 1e-12);
        }
    }

    #[test]
    fn k2j_leading_exponents() {
        let (m, r1, r2) = (3.0, 2.0, 2.0);
        let k = character_k2j(1, B, B, r1, r2, m, int(10)).unwrap();
        let c24 = central_charge_exact(int(3)) / int(24);
        assert_eq!(k.min_exponent(), Some(kac_h_exact(int(3), int(5), int(3)) - c24));
        let (r1, r2) = (0.6, 1.3);
        let k = character_k2j(1, B, B, r1, r2, 2.5, int(10)).unwrap();
        let c24 = central_charge_exact(rat(5, 2)) / int(24);
        let r = snap_rational(r1) + snap_rational(r2) - int(1);
        assert_eq!(k.min_exponent(), Some(kac_h_exact(r, r + int(2), rat(5, 2)) - c24));
        let uu = character_k2j(2, U, U, r1, r2, 2.5, int(10)).unwrap();
        let flipped = character_k2j(2, B, B, -r1, -r2, 2.5, int(10)).unwrap();
        close(&uu, &flipped, int(10), 0.0 + 1e-15);
    }

    fn percolation() -> CgParams {
        CgParams::from_weights(&LoopWeights::percolation()).unwrap()
    }

    #[test]
    fn percolation_partition_function_is_one() {
        let p = percolation();
        assert!((p.m - 2.0).abs() < 1e-12 && (p.r12 - 1.0).abs() < 1e-9);
        let z = z_two_boundary(&p, int(12)).unwrap();
        close(&z, &QSeries::one(int(12)), int(12), 1e-12);
        let z1 = z_one_boundary(1.0, 1.0, PI / 3.0, 2.0, int(12)).unwrap();
        close(&z1, &QSeries::one(int(12)), int(12), 1e-12);
    }

    #[test]
    fn truncation_is_sound() {
        let p = CgParams::new(2.7, 0.8, 1.9, 1.1, 0.9, 0.45, 1.6).unwrap();
        let a = z_two_boundary(&p, int(8)).unwrap();
        let b = z_two_boundary(&p, int(16)).unwrap();
        close(&a, &b.truncate(int(8)), int(8), 1e-12);
        assert_eq!(a.order(), int(8));
    }

    #[test]
    fn two_boundary_reduces_to_one_boundary() {
        for (m, r1, chi, u1) in [(2.7, 0.8, 0.9, 0.45), (3.0, 2.0, PI / 4.0, 2.0), (4.5, 1.3, 1.2, 0.7)] {
            let p = CgParams::new(m, r1, 1.0, r1, chi, u1, 1.0).unwrap();
            let two = z_two_boundary(&p, int(10)).unwrap();
            let one = z_one_boundary(r1, u1, chi, m, int(10)).unwrap();
            close(&two, &one, int(10), 1e-10);
            let c24 = central_charge_exact(snap_rational(m)) / int(24);
            let r = snap_rational(r1);
            assert_eq!(one.min_exponent(), Some(kac_h_exact(r, r, snap_rational(m)) - c24));
        }
    }

    #[test]
    fn free_one_boundary_is_chebyshev_sum() {
        let (m, chi) = (3.5, 0.8);
        let one = z_one_boundary(1.0, 1.0, chi, m, int(10)).unwrap();
        let mr = snap_rational(m);
        let c24 = central_charge_exact(mr) / int(24);
        let mut want = QSeries::zero(int(10));
        for j in 0..12i64 {
            let amp: f64 = chebyshev_u(2 * j).iter().rev().fold(0.0, |a, c| a * 2.0 * chi.cos() + *c as f64);
            let s = int(1 + 2 * j as i128);
            let num = QSeries::from_terms(
                [(kac_h_exact(int(1), s, mr), 1.0), (kac_h_exact(int(1), -s, mr), -1.0)],
                int(11),
            );
            let k = QSeries::euler_inverse(int(12)).shift(-c24).mul(&num).unwrap();
            want = want.add(&k.scale(amp).truncate(int(10)));
        }
        close(&one, &want, int(10), 1e-10);
    }

    #[test]
    fn n12_enters_only_through_k0() {
        let base = CgParams::new(2.7, 0.8, 1.9, 1.1, 0.9, 0.45, 1.6).unwrap();
        let moved = CgParams { r12: 2.3, ..base };
        let a = z_two_boundary(&base, int(10)).unwrap();
        let b = z_two_boundary(&moved, int(10)).unwrap();
        let dk = character_k0(2.3, 2.7, int(10)).unwrap().sub(&character_k0(1.1, 2.7, int(10)).unwrap());
        close(&b, &a.add(&dk), int(10), 1e-12);
    }

    #[test]
    fn polynomial_form_matches_evaluation() {
        let p = CgParams::new(2.7, 0.8, 1.9, 1.1, 0.9, 0.45, 1.6).unwrap();
        let w = p.to_weights();
        let poly = z_polynomial(p.m, p.r1, p.r2, p.r12, int(10)).unwrap();
        close(&poly.evaluate(w.l, w.l1, w.l2), &z_two_boundary(&p, int(10)).unwrap(), int(10), 1e-10);
    }

    #[test]
    fn ising_vacuum_character() {
        let chi = rocha_caridi(1, 1, 3.0, int(12)).unwrap();
        let want = [1.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 5.0, 5.0, 7.0, 8.0];
        let shift = rat(-1, 48);
        for (k, c) in want.iter().enumerate() {
            assert_eq!(chi.coeff(int(k as i128) + shift), *c, "q^{k}");
        }
        let c13 = rocha_caridi(1, 3, 3.0, int(12)).unwrap();
        assert_eq!(c13.min_exponent(), Some(rat(1, 2) - rat(1, 48)));
        for (r, s) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
            let a = rocha_caridi(r, s, 3.0, int(12)).unwrap();
            let b = rocha_caridi(3 - r, 4 - s, 3.0, int(12)).unwrap();
            close(&a, &b, int(12), 1e-12);
        }
    }

    #[test]
    fn ising_boundary_conditions() {
        let pm = z_potts(2.0, 1.0, 1.0, 0.0, int(12)).unwrap();
        assert!(pm.warning.is_none());
        close(&pm.series, &rocha_caridi(1, 3, 3.0, int(12)).unwrap(), int(12), 1e-9);
        let pp = z_potts(2.0, 1.0, 1.0, 1.0, int(12)).unwrap();
        close(&pp.series, &rocha_caridi(1, 1, 3.0, int(12)).unwrap(), int(12), 1e-9);
    }

    #[test]
    fn three_state_potts() {
        let z = z_potts(3.0, 2.0, 2.0, 1.0, int(12)).unwrap();
        let want = rocha_caridi(1, 3, 5.0, int(12)).unwrap().add(&rocha_caridi(3, 3, 5.0, int(12)).unwrap());
        close(&z.series, &want, int(12), 1e-9);
    }

    #[test]
    fn potts_validation() {
        assert!(z_potts(2.5, 1.0, 1.0, 0.5, int(6)).unwrap().warning.is_some());
        assert!(potts_weights(5.0, 1.0, 1.0, 0.0).is_err());
        assert!(potts_weights(3.0, 1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn z_l1l2_leading_block() {
        let (r1, r2, m) = (0.8, 1.9, 2.7);
        let z = z_l1l2(r1, r2, m, int(6)).unwrap();
        let mut want = QSeries::zero(int(6));
        for j in 1..=6 {
            let k = |a, b| character_k2j(j, a, b, r1, r2, m, int(6)).unwrap();
            let block = k(B, B).sub(&k(U, B)).sub(&k(B, U)).add(&k(U, U));
            want = want.add(&block.scale(if j % 2 == 1 { 1.0 } else { -1.0 }));
        }
        assert!(character_k2j(6, B, B, r1, r2, m, int(6)).unwrap().is_empty());
        close(&z, &want, int(6), 1e-12);
        // (-1)^(j-1) is the constant term of U_{2j-2}.
        for j in 1..6i64 {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            assert_eq!(chebyshev_u(2 * j - 2)[0], sign);
        }
    }
}
