//! Loop weights, Coulomb-gas parameters and the Kac table.
//!
//! The seven Boltzmann weights of the model and the seven angles/charges that
//! parametrize them:
//!
//! | weight | parametrization |
//! |--------|-----------------|
//! | `n`    | `2 cos(gamma)`, `gamma = pi/(m+1)` |
//! | `n1`   | `sin((r1+1) gamma) / sin(r1 gamma)` |
//! | `n2`   | `sin((r2+1) gamma) / sin(r2 gamma)` |
//! | `n12`  | `sin((r1+r2+1-r12) gamma/2) sin((r1+r2+1+r12) gamma/2) / (sin(r1 gamma) sin(r2 gamma))` |
//! | `l`    | `2 cos(chi)` |
//! | `l1`   | `sin((u1+1) chi) / sin(u1 chi)` |
//! | `l2`   | `sin((u2+1) chi) / sin(u2 chi)` |

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::Rat;

/// Number of subintervals scanned for sign changes before bisecting.
pub const ROOT_SCAN_INTERVALS: usize = 1024;
/// Absolute tolerance of the bisection on the principal interval.
pub const ROOT_TOLERANCE: f64 = 1e-13;

/// Boltzmann weights of the seven loop classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopWeights {
    /// Contractible bulk loops.
    pub n: f64,
    /// Contractible loops touching rim 1 only.
    pub n1: f64,
    /// Contractible loops touching rim 2 only.
    pub n2: f64,
    /// Contractible loops touching both rims.
    pub n12: f64,
    /// Non-contractible bulk loops.
    pub l: f64,
    /// Non-contractible loops touching rim 1.
    pub l1: f64,
    /// Non-contractible loops touching rim 2.
    pub l2: f64,
}

impl LoopWeights {
    pub fn uniform(w: f64) -> Self {
        Self { n: w, n1: w, n2: w, n12: w, l: w, l1: w, l2: w }
    }

    /// Critical percolation: every loop has weight one.
    pub fn percolation() -> Self {
        Self::uniform(1.0)
    }

    /// Free/free boundaries: boundary loops weigh the same as bulk ones.
    pub fn free(n: f64, l: f64) -> Self {
        Self { n, n1: n, n2: n, n12: n, l, l1: l, l2: l }
    }

    /// The ordinary (unmodified) Markov trace: non-contractible loops weigh
    /// like their contractible counterparts.
    pub fn plain(n: f64, n1: f64, n2: f64, n12: f64) -> Self {
        Self { n, n1, n2, n12, l: n, l1: n1, l2: n2 }
    }

    /// Mirror image: rim 1 and rim 2 exchanged.
    pub fn mirrored(&self) -> Self {
        Self { n1: self.n2, n2: self.n1, l1: self.l2, l2: self.l1, ..*self }
    }

    pub fn is_finite(&self) -> bool {
        [self.n, self.n1, self.n2, self.n12, self.l, self.l1, self.l2]
            .iter()
            .all(|w| w.is_finite())
    }
}

/// Bulk angle `gamma` together with `m = pi/gamma - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkAngle {
    pub gamma: f64,
    pub m: f64,
}

/// Inverts `n = 2 cos(gamma)` on `gamma in [0, pi)`.
pub fn gamma_from_n(n: f64) -> Result<BulkAngle> {
    if !(n > -2.0 && n <= 2.0) {
        return Err(Error::OutOfRange { name: "n", value: n, range: "(-2, 2]" });
    }
    let gamma = (n / 2.0).acos();
    let m = if gamma == 0.0 { f64::INFINITY } else { PI / gamma - 1.0 };
    Ok(BulkAngle { gamma, m })
}

/// `sin((r+1) a) / sin(r a)`, the common form of the boundary weights.
pub fn sine_ratio(r: f64, angle: f64) -> f64 {
    ((r + 1.0) * angle).sin() / (r * angle).sin()
}

/// Solves `sin((r+1) a) / sin(r a) = target` for `r in (0, pi/a)`.
///
/// The interval is scanned for sign changes of `sin((r+1)a) - target sin(ra)`
/// (which has no poles inside it) and the bracketed root is bisected to
/// within [`ROOT_TOLERANCE`] or better.
pub fn invert_sine_ratio(target: f64, angle: f64) -> Result<f64> {
    if !(angle > 0.0 && angle < PI) {
        return Err(Error::OutOfRange { name: "angle", value: angle, range: "(0, pi)" });
    }
    if !target.is_finite() {
        return Err(Error::NoRoot { target });
    }
    let g = |r: f64| ((r + 1.0) * angle).sin() - target * (r * angle).sin();
    let upper = PI / angle;
    let step = upper / ROOT_SCAN_INTERVALS as f64;
    let mut brackets = Vec::new();
    let mut prev = g(0.0);
    for k in 1..=ROOT_SCAN_INTERVALS {
        let hi = if k == ROOT_SCAN_INTERVALS { upper } else { k as f64 * step };
        let cur = g(hi);
        if cur == 0.0 && k < ROOT_SCAN_INTERVALS {
            brackets.push((hi, hi));
        } else if prev != 0.0 && prev.signum() != cur.signum() {
            brackets.push(((k - 1) as f64 * step, hi));
        }
        prev = cur;
    }
    match brackets.len() {
        0 => Err(Error::NoRoot { target }),
        1 => {
            let (mut lo, mut hi) = brackets[0];
            let g_lo = g(lo);
            // Run to floating-point resolution; ROOT_TOLERANCE is only the
            // guaranteed bound.
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    return Ok(mid);
                }
                if gm.signum() == g_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
        count => Err(Error::MultipleRoots { target, count }),
    }
}

/// `r` with `n1 = sin((r+1) gamma)/sin(r gamma)` on `(0, m+1)`.
pub fn r_from_boundary_weight(n1: f64, gamma: f64) -> Result<f64> {
    invert_sine_ratio(n1, gamma)
}

/// `u` with `l1 = sin((u+1) chi)/sin(u chi)` on `(0, pi/chi)`.
pub fn u_from_noncontractible_weight(l1: f64, chi: f64) -> Result<f64> {
    invert_sine_ratio(l1, chi)
}

/// Weight of contractible loops touching both rims.
pub fn n12_from_r12(r1: f64, r2: f64, r12: f64, gamma: f64) -> f64 {
    let half = gamma / 2.0;
    ((r1 + r2 + 1.0 - r12) * half).sin() * ((r1 + r2 + 1.0 + r12) * half).sin()
        / ((r1 * gamma).sin() * (r2 * gamma).sin())
}

/// Inverts [`n12_from_r12`] on the real principal branch `r12 in [0, m+1]`.
///
/// Uses `sin(X - Y) sin(X + Y) = sin^2 X - sin^2 Y` with
/// `X = (r1+r2+1) gamma/2`, `Y = r12 gamma/2`.
pub fn r12_from_n12(n12: f64, r1: f64, r2: f64, gamma: f64) -> Result<f64> {
    let x = (r1 + r2 + 1.0) * gamma / 2.0;
    let s = x.sin().powi(2) - n12 * (r1 * gamma).sin() * (r2 * gamma).sin();
    const SLACK: f64 = 1e-14;
    if !(s >= -SLACK && s <= 1.0 + SLACK) {
        return Err(Error::PrincipalBranch { s });
    }
    let s = s.clamp(0.0, 1.0);
    Ok(2.0 / gamma * s.sqrt().asin())
}

/// Kac weight `h_{r,s} = ([(m+1) r - m s]^2 - 1) / (4 m (m+1))`.
pub fn kac_h(r: f64, s: f64, m: f64) -> f64 {
    let x = (m + 1.0) * r - m * s;
    (x * x - 1.0) / (4.0 * m * (m + 1.0))
}

/// Exact-rational Kac weight.
pub fn kac_h_exact(r: Rat, s: Rat, m: Rat) -> Rat {
    let one = Rat::one();
    let x = (m + one) * r - m * s;
    (x * x - one) / (Rat::from_integer(4) * m * (m + one))
}

/// Central charge `c = 1 - 6/(m(m+1))`.
pub fn central_charge(m: f64) -> f64 {
    if m.is_infinite() {
        return 1.0;
    }
    1.0 - 6.0 / (m * (m + 1.0))
}

pub fn central_charge_exact(m: Rat) -> Rat {
    assert!(m > Rat::zero(), "central charge needs m > 0");
    Rat::one() - Rat::from_integer(6) / (m * (m + Rat::one()))
}

/// A Kac-table entry with its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacWeight {
    pub r: f64,
    pub s: f64,
    pub h: f64,
}

impl KacWeight {
    pub fn new(r: f64, s: f64, m: f64) -> Self {
        Self { r, s, h: kac_h(r, s, m) }
    }
}

/// Coulomb-gas parameters of the seven weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgParams {
    pub m: f64,
    pub gamma: f64,
    pub chi: f64,
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
    pub u1: f64,
    pub u2: f64,
}

impl CgParams {
    /// Builds the parameter set from `m` (so `gamma = pi/(m+1)`) and the rest.
    pub fn new(m: f64, r1: f64, r2: f64, r12: f64, chi: f64, u1: f64, u2: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::OutOfRange { name: "m", value: m, range: "(0, inf)" });
        }
        let gamma = PI / (m + 1.0);
        let p = Self { m, gamma, chi, r1, r2, r12, u1, u2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let top = self.m + 1.0;
        for (name, v) in [("r1", self.r1), ("r2", self.r2)] {
            if !(v > 0.0 && v < top) {
                return Err(Error::OutOfRange { name, value: v, range: "(0, m+1)" });
            }
        }
        if !(self.r12 >= 0.0 && self.r12 <= top) {
            return Err(Error::OutOfRange { name: "r12", value: self.r12, range: "[0, m+1]" });
        }
        for (name, u) in [("u1", self.u1), ("u2", self.u2)] {
            if (u * self.chi).sin().abs() < 1e-12 {
                let _ = name;
                return Err(Error::Pole);
            }
        }
        Ok(())
    }

    /// Coupling `g = m/(m+1)`, carried for reference only.
    pub fn g(&self) -> f64 {
        self.m / (self.m + 1.0)
    }

    pub fn central_charge(&self) -> f64 {
        central_charge(self.m)
    }

    /// Inverts every parametrization on its principal branch.
    pub fn from_weights(w: &LoopWeights) -> Result<Self> {
        let BulkAngle { gamma, m } = gamma_from_n(w.n)?;
        if gamma == 0.0 {
            return Err(Error::OutOfRange { name: "n", value: w.n, range: "(-2, 2)" });
        }
        if !(w.l > -2.0 && w.l < 2.0) {
            return Err(Error::OutOfRange { name: "l", value: w.l, range: "(-2, 2)" });
        }
        let chi = (w.l / 2.0).acos();
        let r1 = r_from_boundary_weight(w.n1, gamma)?;
        let r2 = r_from_boundary_weight(w.n2, gamma)?;
        let r12 = r12_from_n12(w.n12, r1, r2, gamma)?;
        let u1 = u_from_noncontractible_weight(w.l1, chi)?;
        let u2 = u_from_noncontractible_weight(w.l2, chi)?;
        Ok(Self { m, gamma, chi, r1, r2, r12, u1, u2 })
    }

    pub fn to_weights(&self) -> LoopWeights {
        LoopWeights {
            n: 2.0 * self.gamma.cos(),
            n1: sine_ratio(self.r1, self.gamma),
            n2: sine_ratio(self.r2, self.gamma),
            n12: n12_from_r12(self.r1, self.r2, self.r12, self.gamma),
            l: 2.0 * self.chi.cos(),
            l1: sine_ratio(self.u1, self.chi),
            l2: sine_ratio(self.u2, self.chi),
        }
    }
}

/// One of the two accepted parameter families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamBlock {
    Weights(LoopWeights),
    Cg(CgParams),
}

const WEIGHT_KEYS: [&str; 7] = ["n", "n1", "n2", "n12", "l", "l1", "l2"];
const CG_KEYS: [&str; 7] = ["m", "r1", "r2", "r12", "chi", "u1", "u2"];

impl ParamBlock {
    /// Reads exactly one complete family from key/value pairs. Keys that
    /// belong to neither family are ignored.
    pub fn from_map(map: &BTreeMap<String, f64>) -> Result<Self> {
        let has = |keys: &[&str]| keys.iter().filter(|k| map.contains_key(**k)).count();
        let (w, c) = (has(&WEIGHT_KEYS), has(&CG_KEYS));
        // "r1"/"r2" etc. are not shared between families, so any overlap is a mix.
        match (w, c) {
            (7, 0) => {
                let g = |k: &str| map[k];
                Ok(ParamBlock::Weights(LoopWeights {
                    n: g("n"),
                    n1: g("n1"),
                    n2: g("n2"),
                    n12: g("n12"),
                    l: g("l"),
                    l1: g("l1"),
                    l2: g("l2"),
                }))
            }
            (0, 7) => {
                let g = |k: &str| map[k];
                Ok(ParamBlock::Cg(CgParams::new(
                    g("m"),
                    g("r1"),
                    g("r2"),
                    g("r12"),
                    g("chi"),
                    g("u1"),
                    g("u2"),
                )?))
            }
            _ => Err(Error::Invalid(format!(
                "give exactly one complete family: weights {WEIGHT_KEYS:?} or parameters {CG_KEYS:?} \
                 (found {w} weight keys, {c} parameter keys)"
            ))),
        }
    }

    pub fn weights(&self) -> LoopWeights {
        match self {
            ParamBlock::Weights(w) => *w,
            ParamBlock::Cg(p) => p.to_weights(),
        }
    }

    pub fn cg(&self) -> Result<CgParams> {
        match self {
            ParamBlock::Weights(w) => CgParams::from_weights(w),
            ParamBlock::Cg(p) => Ok(*p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_examples() {
        let a = gamma_from_n(1.0).unwrap();
        assert!((a.gamma - PI / 3.0).abs() < 1e-15);
        assert!((a.m - 2.0).abs() < 1e-12);
        let a = gamma_from_n(2f64.sqrt()).unwrap();
        assert!((a.gamma - PI / 4.0).abs() < 1e-15);
        assert!((a.m - 3.0).abs() < 1e-12);
        let a = gamma_from_n(3f64.sqrt()).unwrap();
        assert!((a.m - 5.0).abs() < 1e-12);
        assert!(gamma_from_n(-2.0).is_err());
        assert!(gamma_from_n(2.5).is_err());
        assert_eq!(gamma_from_n(2.0).unwrap().gamma, 0.0);
    }

    #[test]
    fn bisection_matches_closed_form() {
        // tan(r a) = sin a / (t - cos a) on the principal branch.
        for (t, a) in [(0.3, 0.7), (1.0, PI / 3.0), (-0.8, 1.9), (2.5, 0.4), (0.05, 2.8)] {
            let exact = a.sin().atan2(t - a.cos()) / a;
            let r = invert_sine_ratio(t, a).unwrap();
            assert!((r - exact).abs() < 1e-14 * exact.max(1.0), "{t} {a}: {r} vs {exact}");
        }
    }

    #[test]
    fn boundary_weight_examples() {
        for gamma in [0.3, 1.0, PI / 3.0, 2.5] {
            let r = r_from_boundary_weight(2.0 * gamma.cos(), gamma).unwrap();
            assert!((r - 1.0).abs() < 1e-12, "gamma {gamma}: r = {r}");
        }
        let r = r_from_boundary_weight(1.0 / 2f64.sqrt(), PI / 4.0).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        assert!(((2.0 * PI / 3.0).sin() / (PI / 3.0).sin() - 1.0).abs() < 1e-15);
        let r = r_from_boundary_weight(1.0, PI / 3.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);

        let u = u_from_noncontractible_weight(2.0 * 0.7f64.cos(), 0.7).unwrap();
        assert!((u - 1.0).abs() < 1e-12);
        let u = u_from_noncontractible_weight(1.0, PI / 3.0).unwrap();
        assert!((u - 1.0).abs() < 1e-12);
        let u = u_from_noncontractible_weight(1.0 / 2f64.sqrt(), PI / 4.0).unwrap();
        assert!((u - 2.0).abs() < 1e-12);
    }

    #[test]
    fn r12_examples() {
        let r12 = r12_from_n12(0.0, 2.0, 2.0, PI / 4.0).unwrap();
        assert!((r12 - 3.0).abs() < 1e-12);
        // r2 = 1 (n2 = n) and n12 = n1 gives r12 = r1.
        let gamma = 0.6;
        let r1 = 1.37;
        let r12 = r12_from_n12(sine_ratio(r1, gamma), r1, 1.0, gamma).unwrap();
        assert!((r12 - r1).abs() < 1e-12);
        let r12 = r12_from_n12(1.0, 1.0, 1.0, PI / 3.0).unwrap();
        assert!((r12 - 1.0).abs() < 1e-12);
        assert!(matches!(
            r12_from_n12(-50.0, 1.0, 1.0, PI / 3.0),
            Err(Error::PrincipalBranch { .. })
        ));
    }

    #[test]
    fn kac_and_central_charge() {
        for m in [0.5, 2.0, 3.0, 7.3] {
            assert!(kac_h(1.0, 1.0, m).abs() < 1e-15);
        }
        let r = |a: i128, b: i128| Rat::new(a, b);
        assert_eq!(kac_h_exact(r(1, 1), r(3, 1), r(2, 1)), r(1, 3));
        assert_eq!(kac_h_exact(r(1, 1), r(3, 1), r(3, 1)), r(1, 2));
        assert_eq!(central_charge_exact(r(2, 1)), r(0, 1));
        assert_eq!(central_charge_exact(r(3, 1)), r(1, 2));
        assert!((central_charge(1e9) - 1.0).abs() < 1e-15);
        assert_eq!(central_charge(f64::INFINITY), 1.0);
    }

    #[test]
    fn kac_periodicity_used_for_ising() {
        // m = 3: h_{3,3+8k} = h_{3,5-8k}
        let m = Rat::from_integer(3);
        for k in -6i128..=6 {
            let a = kac_h_exact(Rat::from_integer(3), Rat::from_integer(3 + 8 * k), m);
            let b = kac_h_exact(Rat::from_integer(3), Rat::from_integer(5 - 8 * k), m);
            assert_eq!(a, b, "k = {k}");
        }
    }

    #[test]
    fn param_block_requires_one_family() {
        let mut map = BTreeMap::new();
        for (k, v) in WEIGHT_KEYS.iter().zip([1.0; 7]) {
            map.insert(k.to_string(), v);
        }
        assert!(matches!(ParamBlock::from_map(&map), Ok(ParamBlock::Weights(_))));
        map.insert("m".into(), 2.0);
        assert!(ParamBlock::from_map(&map).is_err());
        let mut map = BTreeMap::new();
        for (k, v) in CG_KEYS.iter().zip([2.0, 1.0, 1.0, 1.0, PI / 3.0, 1.0, 1.0]) {
            map.insert(k.to_string(), v);
        }
        let block = ParamBlock::from_map(&map).unwrap();
        let w = block.weights();
        assert!((w.n - 1.0).abs() < 1e-12 && (w.n12 - 1.0).abs() < 1e-12);
        map.remove("u2");
        assert!(ParamBlock::from_map(&map).is_err());
    }

    proptest! {
        #[test]
        fn weights_round_trip(
            m in 0.6f64..8.0,
            r1f in 0.05f64..0.95,
            r2f in 0.05f64..0.95,
            r12f in 0.0f64..1.0,
            chi in 0.2f64..2.9,
            u1f in 0.05f64..0.95,
            u2f in 0.05f64..0.95,
        ) {
            let top = m + 1.0;
            let (r1, r2) = (r1f * top, r2f * top);
            // r12 ranges over the part of [0, m+1] where the branch is real.
            let r12 = r12f * top;
            let uu = PI / chi;
            let p = CgParams::new(m, r1, r2, r12, chi, u1f * uu, u2f * uu).unwrap();
            let w = p.to_weights();
            prop_assume!(w.is_finite());
            let back = CgParams::from_weights(&w);
            prop_assume!(back.is_ok());
            let back = back.unwrap();
            let w2 = back.to_weights();
            for (a, b) in [(w.n, w2.n), (w.n1, w2.n1), (w.n2, w2.n2), (w.n12, w2.n12),
                           (w.l, w2.l), (w.l1, w2.l1), (w.l2, w2.l2)] {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
            }
            for (a, b) in [(p.r1, back.r1), (p.r2, back.r2), (p.u1, back.u1), (p.u2, back.u2)] {
                prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }

        #[test]
        fn kac_even_under_joint_sign_flip(r in -20i64..20, s in -20i64..20, mn in 1i64..12, md in 1i64..5) {
            let m = Rat::new(mn as i128, md as i128);
            let (r, s) = (Rat::from_integer(r as i128), Rat::from_integer(s as i128));
            prop_assert_eq!(kac_h_exact(r, s, m), kac_h_exact(-r, -s, m));
        }

        #[test]
        fn k0_exponent_set_symmetries(r12n in 0i64..40, k in -5i64..5) {
            // {h_{r12-2n, r12}} is invariant under r12 -> -r12 and r12 -> r12 + 2(m+1).
            let m = Rat::from_integer(3);
            let r12 = Rat::new(r12n as i128, 10);
            let set = |r: Rat| {
                let mut v: Vec<Rat> = (-60i128..=60)
                    .map(|n| kac_h_exact(r - Rat::from_integer(2 * n), r, m))
                    .filter(|h| *h < Rat::from_integer(40))
                    .collect();
                v.sort();
                v
            };
            let base = set(r12);
            prop_assert_eq!(&base, &set(-r12));
            let shifted = r12 + Rat::from_integer(2 * k as i128) * (m + Rat::one());
            prop_assert_eq!(&base, &set(shifted));
        }
    }
}
