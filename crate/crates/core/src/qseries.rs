//! Truncated formal power series in `q` with exact rational exponents.
//!
//! A [`QSeries`] stores `sum_e c_e q^e` for all exponents strictly below its
//! `order`; every coefficient below `order` is trusted, nothing above it is
//! known. Products track the order as
//! `min(a.order + b.min_exp, b.order + a.min_exp)`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact rational exponent.
pub type Rat = Ratio<i128>;

/// Coefficients smaller than this are dropped.
pub const PRUNE: f64 = 1e-14;

/// Tolerance within which a float parameter is identified with a rational.
pub const SNAP_TOLERANCE: f64 = 1e-9;

/// Continued-fraction snap of `x` to the simplest rational within
/// [`SNAP_TOLERANCE`] (relative for large `x`).
pub fn snap_rational(x: f64) -> Rat {
    assert!(x.is_finite(), "cannot snap non-finite value {x}");
    let tol = SNAP_TOLERANCE * x.abs().max(1.0);
    // Convergents h/k of the continued fraction of x.
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol {
            break;
        }
        let frac = rest - a;
        if frac.abs() < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    Rat::new(h1, k1)
}

pub fn rat_to_f64(r: Rat) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

pub fn rat(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

pub fn int(n: i128) -> Rat {
    Rat::from_integer(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    terms: BTreeMap<Rat, f64>,
    order: Rat,
}

/// Numeric value of a series at `q = exp(-pi tau)` with a tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub tau: f64,
    pub value: f64,
    pub tail_bound: f64,
}

impl QSeries {
    /// The zero series, known up to `order`.
    pub fn zero(order: Rat) -> Self {
        Self { terms: BTreeMap::new(), order }
    }

    pub fn one(order: Rat) -> Self {
        Self::monomial(Rat::zero(), 1.0, order)
    }

    pub fn monomial(exp: Rat, coeff: f64, order: Rat) -> Self {
        let mut s = Self::zero(order);
        s.add_term(exp, coeff);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Rat, f64)>>(terms: I, order: Rat) -> Self {
        let mut s = Self::zero(order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c q^e`; terms at or beyond the order are discarded.
    pub fn add_term(&mut self, exp: Rat, coeff: f64) {
        if exp >= self.order {
            return;
        }
        let slot = self.terms.entry(exp).or_insert(0.0);
        *slot += coeff;
        if slot.abs() < PRUNE {
            self.terms.remove(&exp);
        }
    }

    pub fn order(&self) -> Rat {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Rat, f64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    /// Coefficient of `q^exp`; panics if `exp` is beyond the trusted order.
    pub fn coeff(&self, exp: Rat) -> f64 {
        assert!(exp < self.order, "exponent {exp} is beyond the trusted order {}", self.order);
        self.terms.get(&exp).copied().unwrap_or(0.0)
    }

    pub fn min_exponent(&self) -> Option<Rat> {
        self.terms.keys().next().copied()
    }

    fn min_exp_or_order(&self) -> Rat {
        self.min_exponent().unwrap_or(self.order)
    }

    pub fn truncate(&self, order: Rat) -> Self {
        let order = order.min(self.order);
        Self {
            terms: self.terms.range(..order).map(|(e, c)| (*e, *c)).collect(),
            order,
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * k)), self.order)
    }

    /// Multiplies by `q^exp`; the trusted order moves with the terms.
    pub fn shift(&self, exp: Rat) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e + exp, *c)).collect(),
            order: self.order + exp,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(self.order.min(other.order));
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Cauchy product with order tracking.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = (self.order + other.min_exp_or_order())
            .min(other.order + self.min_exp_or_order());
        if order.is_negative() {
            return Err(Error::Truncation(rat_to_f64(order)));
        }
        let mut out = Self::zero(order);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms.range(..order - ea) {
                out.add_term(ea + *eb, ca * cb);
            }
        }
        Ok(out)
    }

    /// `P(q) = prod_{k>=1} (1 - q^k)` from Euler's pentagonal identity:
    /// `sum_k (-1)^k q^{k(3k-1)/2}` over all integers `k`.
    pub fn euler_product(order: Rat) -> Self {
        let mut s = Self::zero(order);
        s.add_term(Rat::zero(), 1.0);
        let mut k: i128 = 1;
        loop {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let a = int(k * (3 * k - 1) / 2);
            let b = int(k * (3 * k + 1) / 2);
            if a >= order {
                break;
            }
            s.add_term(a, sign);
            s.add_term(b, sign);
            k += 1;
        }
        s
    }

    /// `1/P(q) = sum_n p(n) q^n`, built as the product of the geometric
    /// series `1/(1 - q^k)`.
    pub fn euler_inverse(order: Rat) -> Self {
        let top = if order <= Rat::zero() {
            0
        } else {
            (order.ceil().to_integer()) as usize
        };
        let mut p = vec![0.0f64; top.max(1)];
        p[0] = 1.0;
        for k in 1..top {
            for n in k..top {
                p[n] += p[n - k];
            }
        }
        Self::from_terms(p.into_iter().enumerate().map(|(n, c)| (int(n as i128), c)), order)
    }

    pub fn evaluate(&self, tau: f64) -> Evaluation {
        assert!(tau > 0.0, "tau must be positive");
        let lnq = -std::f64::consts::PI * tau;
        let value = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| c * (lnq * rat_to_f64(*e)).exp())
            .sum();
        Evaluation { tau, value, tail_bound: self.tail_bound(tau) }
    }

    /// Heuristic bound on the omitted tail: the largest coefficient over the
    /// last ten units of exponent, extrapolated with the observed growth rate
    /// (doubled for safety) and summed geometrically from `q^order`.
    pub fn tail_bound(&self, tau: f64) -> f64 {
        let q = (-std::f64::consts::PI * tau).exp();
        let from = self.order - int(10);
        let decade: Vec<(f64, f64)> = self
            .terms
            .range(from..)
            .map(|(e, c)| (rat_to_f64(*e), c.abs()))
            .collect();
        let cmax = decade.iter().map(|t| t.1).fold(0.0, f64::max).max(1.0);
        // Per-unit growth of the coefficients, extrapolated up to the order.
        let growth = decade
            .windows(2)
            .filter(|w| w[0].1 >= 1e-3 * cmax)
            .map(|w| (w[1].1 / w[0].1).powf(1.0 / (w[1].0 - w[0].0)))
            .fold(1.0, f64::max);
        let last = decade.last().map_or(rat_to_f64(self.order), |t| t.0);
        let cext = cmax * growth.powf(rat_to_f64(self.order) - last);
        let step = self
            .terms
            .keys()
            .zip(self.terms.keys().skip(1))
            .map(|(a, b)| *b - *a)
            .min()
            .unwrap_or(Rat::from_integer(1))
            .min(Rat::from_integer(1));
        let ratio = (2.0 * growth * q).powf(rat_to_f64(step));
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        cext * q.powf(rat_to_f64(self.order)) / (1.0 - ratio)
    }

    /// Largest coefficient difference over exponents below `up_to`.
    pub fn max_abs_diff(&self, other: &Self, up_to: Rat) -> f64 {
        assert!(up_to <= self.order && up_to <= other.order, "comparison beyond trusted order");
        let mut keys: Vec<Rat> = self.terms.range(..up_to).map(|(e, _)| *e).collect();
        keys.extend(other.terms.range(..up_to).map(|(e, _)| *e));
        keys.into_iter()
            .map(|e| (self.coeff(e) - other.coeff(e)).abs())
            .fold(0.0, f64::max)
    }

    /// `exponent_num,exponent_den,coefficient` rows sorted by exponent.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("exponent_num,exponent_den,coefficient\n");
        for (e, c) in self.terms() {
            out.push_str(&format!("{},{},{:.17e}\n", e.numer(), e.denom(), c));
        }
        out
    }

    pub fn from_csv(text: &str, order: Rat) -> Result<Self> {
        let mut s = Self::zero(order);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("exponent")) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let bad = || Error::Invalid(format!("bad series row {}: {line:?}", i + 1));
            if cols.len() != 3 {
                return Err(bad());
            }
            let num: i128 = cols[0].trim().parse().map_err(|_| bad())?;
            let den: i128 = cols[1].trim().parse().map_err(|_| bad())?;
            let c: f64 = cols[2].trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            s.add_term(Rat::new(num, den), c);
        }
        Ok(s)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let sign = if c < 0.0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{sign}")?;
            if !first {
                write!(f, " ")?;
            }
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else {
                if (mag - 1.0).abs() > 1e-12 {
                    write!(f, "{mag}")?;
                }
                write!(f, "q^{e}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn partition_numbers() {
        let inv = QSeries::euler_inverse(int(8));
        let expected = [1.0, 1.0, 2.0, 3.0, 5.0, 7.0, 11.0, 15.0];
        for (n, want) in expected.iter().enumerate() {
            assert_eq!(inv.coeff(int(n as i128)), *want);
        }
    }

    #[test]
    fn pentagonal_matches_direct_product() {
        let order = int(30);
        let mut direct = QSeries::one(order);
        for k in 1..30 {
            let factor = QSeries::from_terms([(int(0), 1.0), (int(k), -1.0)], order);
            direct = direct.mul(&factor).unwrap().truncate(order);
        }
        let pent = QSeries::euler_product(order);
        assert_eq!(direct.max_abs_diff(&pent, order), 0.0);
        // The pentagonal exponents carry signs (-1)^k.
        assert_eq!(pent.coeff(int(1)), -1.0);
        assert_eq!(pent.coeff(int(5)), 1.0);
        assert_eq!(pent.coeff(int(12)), -1.0);
        assert_eq!(pent.coeff(int(22)), 1.0);
        assert_eq!(pent.coeff(int(4)), 0.0);
    }

    #[test]
    fn euler_product_times_inverse_is_one() {
        let order = int(25);
        let prod = QSeries::euler_product(order).mul(&QSeries::euler_inverse(order)).unwrap();
        assert_eq!(prod.order(), order);
        assert_eq!(prod.max_abs_diff(&QSeries::one(order), order), 0.0);
    }

    #[test]
    fn small_identities() {
        let o = int(10);
        let a = QSeries::from_terms([(int(0), 1.0), (int(1), 1.0)], o);
        let b = QSeries::from_terms([(int(0), 1.0), (int(1), -1.0)], o);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.max_abs_diff(&QSeries::from_terms([(int(0), 1.0), (int(2), -1.0)], o), o), 0.0);
        assert!(a.sub(&a).is_empty());
        let prefactor = QSeries::euler_inverse(o).shift(rat(-1, 48));
        assert_eq!(prefactor.min_exponent(), Some(rat(-1, 48)));
        assert_eq!(prefactor.order(), o - rat(1, 48));
    }

    #[test]
    fn evaluate_inverse_euler_at_tau_one() {
        let q = (-std::f64::consts::PI).exp();
        assert!((q - 0.0432139).abs() < 1e-7);
        // Independent: 1/prod_{k<200}(1 - q^k).
        let direct: f64 = 1.0 / (1..200).map(|k| 1.0 - q.powi(k)).product::<f64>();
        let ev = QSeries::euler_inverse(int(14)).evaluate(1.0);
        assert!((ev.value - direct).abs() < 1e-14, "{} vs {direct}", ev.value);
        assert!(ev.tail_bound < 1e-14);
        let coarse = QSeries::euler_inverse(int(6)).evaluate(1.0);
        assert!((coarse.value - direct).abs() <= coarse.tail_bound);
        assert!((QSeries::one(int(5)).evaluate(3.7).value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mul_rejects_negative_order() {
        let a = QSeries::monomial(int(-3), 1.0, int(1));
        let b = QSeries::monomial(int(0), 1.0, int(1));
        assert!(matches!(a.mul(&b), Err(Error::Truncation(_))));
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(1.9999999999999), int(2));
        assert_eq!(snap_rational(1.37), rat(137, 100));
        assert_eq!(snap_rational(-1.0 / 3.0), rat(-1, 3));
        assert_eq!(snap_rational(0.0), int(0));
        let x = std::f64::consts::PI;
        assert!((rat_to_f64(snap_rational(x)) - x).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let s = QSeries::euler_inverse(int(6)).shift(rat(1, 3)).scale(-0.25);
        let back = QSeries::from_csv(&s.to_csv(), s.order()).unwrap();
        assert_eq!(back, s);
        assert!(QSeries::from_csv("1,0,3.0\n", int(2)).is_err());
    }

    fn arb_series() -> impl Strategy<Value = QSeries> {
        proptest::collection::vec((0i128..24, 1i128..4, -3.0f64..3.0), 0..8).prop_map(|v| {
            QSeries::from_terms(v.into_iter().map(|(n, d, c)| (Rat::new(n, d), c)), int(9))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let o = int(9);
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            let up = l.order().min(r.order());
            prop_assert!(l.max_abs_diff(&r, up) < 1e-12);
            let l = a.mul(&b.add(&c)).unwrap();
            let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap());
            let up = l.order().min(r.order()).min(o);
            prop_assert!(l.max_abs_diff(&r, up) < 1e-12);
            let comm = a.mul(&b).unwrap().max_abs_diff(&b.mul(&a).unwrap(), a.mul(&b).unwrap().order());
            prop_assert!(comm < 1e-12);
        }

        #[test]
        fn order_tracking_is_sound(lo in 3i128..12, extra in 1i128..10) {
            // Recomputing at a higher order never changes trusted coefficients.
            let small = QSeries::euler_inverse(int(lo)).shift(rat(1, 3))
                .mul(&QSeries::euler_product(int(lo))).unwrap();
            let big = QSeries::euler_inverse(int(lo + extra)).shift(rat(1, 3))
                .mul(&QSeries::euler_product(int(lo + extra))).unwrap();
            prop_assert!(small.max_abs_diff(&big.truncate(small.order()), small.order()) == 0.0);
        }
    }
}
