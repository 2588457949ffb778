//! Markov traces on the annulus and lattice partition functions.
//!
//! Closing a diagram on the annulus glues top node `i` to bottom node `i`.
//! A closed loop is non-contractible when it winds around the annulus,
//! i.e. when the through-lines it uses upward and downward do not cancel.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::diagram::{AlgebraElement, Blobs, Boundary, Diagram};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::params::LoopWeights;
use crate::reps::{Module, Sector, Status};
use crate::sparse::CsrMatrix;

/// Closed loops sorted by class. Indices are the mark bits:
/// none, rim 1, rim 2, both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LoopCensus {
    pub contractible: [usize; 4],
    pub non_contractible: [usize; 3],
}

impl LoopCensus {
    pub fn add(&mut self, marks: Blobs, winding: i64) -> Result<()> {
        if winding == 0 {
            self.contractible[marks.bits() as usize] += 1;
        } else if marks == Blobs::BOTH {
            return Err(Error::DoubleFlaggedNonContractible);
        } else {
            self.non_contractible[marks.bits() as usize] += 1;
        }
        Ok(())
    }

    pub fn non_contractible_total(&self) -> usize {
        self.non_contractible.iter().sum()
    }

    pub fn weight(&self, w: &LoopWeights) -> f64 {
        let c = [w.n, w.n1, w.n2, w.n12];
        let nc = [w.l, w.l1, w.l2];
        let mut out = 1.0;
        for (k, count) in self.contractible.iter().enumerate() {
            out *= c[k].powi(*count as i32);
        }
        for (k, count) in self.non_contractible.iter().enumerate() {
            out *= nc[k].powi(*count as i32);
        }
        out
    }
}

/// Loops of the annulus closure of a single diagram.
pub fn closure_census(d: &Diagram) -> Result<LoopCensus> {
    let n = d.strands();
    let (partner, blobs) = d.partner_table();
    let glue = |x: usize| if x < n { x + n } else { x - n };
    let mut seen = vec![false; 2 * n];
    let mut census = LoopCensus::default();
    for start in 0..2 * n {
        if seen[start] {
            continue;
        }
        let mut marks = Blobs::NONE;
        let mut winding = 0i64;
        let mut x = start;
        loop {
            let y = partner[x];
            seen[x] = true;
            seen[y] = true;
            marks = marks.union(blobs[x]);
            match (x < n, y < n) {
                (true, false) => winding += 1,
                (false, true) => winding -= 1,
                _ => {}
            }
            x = glue(y);
            if x == start {
                break;
            }
        }
        census.add(marks, winding)?;
    }
    debug_assert_eq!(census.non_contractible_total() % 2, 0);
    Ok(census)
}

/// Modified Markov trace evaluated by closing every diagram directly.
pub fn markov_trace_direct(x: &AlgebraElement) -> Result<f64> {
    let w = x.weights();
    let mut total = 0.0;
    for (d, c) in x.terms() {
        total += c * closure_census(d)?.weight(w);
    }
    Ok(total)
}

/// Polynomial in `l` with integer coefficients, lowest degree first.
pub type LPoly = Vec<i64>;

fn padd(a: &[i64], b: &[i64]) -> LPoly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[i] += v;
    }
    trim(out)
}

fn pscale(a: &[i64], k: i64) -> LPoly {
    trim(a.iter().map(|v| v * k).collect())
}

fn pshift(a: &[i64]) -> LPoly {
    let mut out = vec![0];
    out.extend_from_slice(a);
    trim(out)
}

fn trim(mut a: LPoly) -> LPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn peval(a: &[i64], l: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * l + *c as f64)
}

/// `U_k(l/2)` as a polynomial in `l`, with `U_{-1} = 0` and `U_{-2} = -1`.
pub fn chebyshev_u(k: i64) -> LPoly {
    if k == -2 {
        return vec![-1];
    }
    if k < -2 {
        // U_{-k-2} = -U_k
        return pscale(&chebyshev_u(-k - 2), -1);
    }
    let (mut prev, mut cur): (LPoly, LPoly) = (vec![], vec![1]);
    if k == -1 {
        return prev;
    }
    for _ in 0..k {
        let next = padd(&pshift(&cur), &pscale(&prev, -1));
        prev = cur;
        cur = next;
    }
    cur
}

/// Multilinear polynomial in `(l1, l2)` with coefficients in `Z[l]`:
/// `c00 + c10 l1 + c01 l2 + c11 l1 l2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmplitudePoly {
    pub c00: LPoly,
    pub c10: LPoly,
    pub c01: LPoly,
    pub c11: LPoly,
}

impl AmplitudePoly {
    pub fn eval(&self, l: f64, l1: f64, l2: f64) -> f64 {
        peval(&self.c00, l) + l1 * peval(&self.c10, l) + l2 * peval(&self.c01, l) + l1 * l2 * peval(&self.c11, l)
    }

    /// `l1 -> l - l1`.
    pub fn complement_l1(&self) -> Self {
        Self {
            c00: padd(&self.c00, &pshift(&self.c10)),
            c10: pscale(&self.c10, -1),
            c01: padd(&self.c01, &pshift(&self.c11)),
            c11: pscale(&self.c11, -1),
        }
    }

    /// `l2 -> l - l2`.
    pub fn complement_l2(&self) -> Self {
        Self {
            c00: padd(&self.c00, &pshift(&self.c01)),
            c01: pscale(&self.c01, -1),
            c10: padd(&self.c10, &pshift(&self.c11)),
            c11: pscale(&self.c11, -1),
        }
    }
}

impl fmt::Display for AmplitudePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (coef, mono) in [(&self.c11, "l1 l2"), (&self.c10, "l1"), (&self.c01, "l2"), (&self.c00, "")] {
            for (k, c) in coef.iter().enumerate().rev().filter(|(_, c)| **c != 0) {
                let lp = match k {
                    0 => String::new(),
                    1 => "l".to_string(),
                    _ => format!("l^{k}"),
                };
                let body = [lp.as_str(), mono].iter().filter(|s| !s.is_empty()).copied().collect::<Vec<_>>().join(" ");
                parts.push(match (c, body.is_empty()) {
                    (_, true) => format!("{c}"),
                    (1, false) => body,
                    (-1, false) => format!("-{body}"),
                    _ => format!("{c} {body}"),
                });
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Chebyshev form of `D^{ab}_{2j}`.
pub fn amplitude_poly(j: usize, alpha: Status, beta: Status) -> AmplitudePoly {
    let j = j as i64;
    let bb = AmplitudePoly {
        c11: chebyshev_u(2 * j - 2),
        c10: pscale(&chebyshev_u(2 * j - 3), -1),
        c01: pscale(&chebyshev_u(2 * j - 3), -1),
        c00: chebyshev_u(2 * j - 4),
    };
    let a = if alpha == Status::Unblobbed { bb.complement_l1() } else { bb };
    if beta == Status::Unblobbed {
        a.complement_l2()
    } else {
        a
    }
}

/// Trigonometric form `sin((±u1±u2-1+2j)chi) sin(chi) / (sin(±u1 chi) sin(±u2 chi))`,
/// minus signs for unblobbed rims.
pub fn amplitude(j: usize, alpha: Status, beta: Status, chi: f64, u1: f64, u2: f64) -> Result<f64> {
    let s1 = if alpha == Status::Blobbed { u1 } else { -u1 };
    let s2 = if beta == Status::Blobbed { u2 } else { -u2 };
    let den = (s1 * chi).sin() * (s2 * chi).sin();
    if den.abs() < 1e-300 {
        return Err(Error::Pole);
    }
    Ok(((s1 + s2 - 1.0 + 2.0 * j as f64) * chi).sin() * chi.sin() / den)
}

/// Amplitude of a sector at the given weights; `V_0` has amplitude one.
pub fn sector_amplitude(sector: Sector, w: &LoopWeights) -> f64 {
    match sector {
        Sector::Vacuum => 1.0,
        Sector::Strings { j, alpha, beta } => amplitude_poly(j, alpha, beta).eval(w.l, w.l1, w.l2),
        Sector::Tl { j } => peval(&chebyshev_u(2 * j as i64), w.l),
    }
}

/// `tr_{V_0} x + sum_{j,a,b} D^{ab}_{2j} tr_{V^{ab}_{2j}} x`.
pub fn markov_trace_decomposed(x: &AlgebraElement) -> Result<f64> {
    let mut total = 0.0;
    for sector in Sector::two_boundary(x.strands()) {
        let m = Module::new(x.strands(), sector)?;
        let tr = m.element_matrix(x, Execution::Sequential)?.trace();
        total += sector_amplitude(sector, x.weights()) * tr;
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorTerm {
    pub sector: String,
    pub dim: usize,
    pub amplitude: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticePartition {
    pub strands: usize,
    pub rows: usize,
    pub total: f64,
    pub sectors: Vec<SectorTerm>,
}

fn trace_of_power(m: &CsrMatrix, power: usize) -> f64 {
    let d: DMatrix<f64> = m.to_dense();
    let mut acc = DMatrix::identity(d.nrows(), d.ncols());
    let mut base = d;
    let mut k = power;
    while k > 0 {
        if k & 1 == 1 {
            acc = &acc * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    acc.trace()
}

/// `Z = Tr T^L` through the sector decomposition. Free boundaries use the
/// plain Temperley-Lieb modules with amplitudes `U_{2j}(l/2)`.
pub fn lattice_partition(
    strands: usize,
    rows: usize,
    w: &LoopWeights,
    boundary: Boundary,
    exec: Execution,
) -> Result<LatticePartition> {
    crate::diagram::check_strands(strands)?;
    if rows == 0 {
        return Err(Error::Invalid("the lattice needs at least one row".into()));
    }
    let sectors = match boundary {
        Boundary::TwoBoundary => Sector::two_boundary(strands),
        Boundary::Free => (0..=strands / 2).map(|j| Sector::Tl { j }).collect(),
    };
    let terms = par::map_indexed(exec, sectors.len(), |k| -> Result<SectorTerm> {
        let sector = sectors[k];
        let t = crate::reps::transfer_matrix(strands, sector, w, boundary, Execution::Sequential)?;
        Ok(SectorTerm {
            sector: sector.to_string(),
            dim: t.dim(),
            amplitude: sector_amplitude(sector, w),
            trace: trace_of_power(&t.matrix, rows),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let total = terms.iter().map(|t| t.amplitude * t.trace).sum();
    Ok(LatticePartition { strands, rows, total, sectors: terms })
}

pub const BRUTE_FORCE_CAP: usize = 26;

/// Sum over all `2^((N-1)L)` face configurations of the annulus lattice,
/// tracing every loop explicitly. Row `r` occupies layers `2r` (even
/// faces) and `2r+1` (odd faces); the rim marks sit at even heights.
pub fn brute_force_partition(
    strands: usize,
    rows: usize,
    w: &LoopWeights,
    boundary: Boundary,
    exec: Execution,
) -> Result<f64> {
    crate::diagram::check_strands(strands)?;
    let faces = (strands - 1) * rows;
    if faces > BRUTE_FORCE_CAP {
        return Err(Error::SizeCap { faces, cap: BRUTE_FORCE_CAP });
    }
    if rows == 0 {
        return Err(Error::Invalid("the lattice needs at least one row".into()));
    }
    let lattice = Lattice::new(strands, rows, boundary);
    let total: u64 = 1 << faces;
    let chunks = total.min(1024);
    let per = total / chunks;
    let partial = par::map_indexed(exec, chunks as usize, |c| -> Result<f64> {
        let mut sum = 0.0;
        let mut buf = Scratch::new(&lattice);
        for config in c as u64 * per..(c as u64 + 1) * per {
            sum += lattice.census(config, &mut buf)?.weight(w);
        }
        Ok(sum)
    });
    partial.into_iter().sum()
}

struct Lattice {
    n: usize,
    heights: usize,
    /// Per layer: for each site, `Some((partner, face_bit))` if it belongs
    /// to a face in that layer.
    layers: Vec<Vec<Option<(usize, usize)>>>,
    marks: bool,
}

struct Scratch {
    seen: Vec<bool>,
}

impl Scratch {
    fn new(l: &Lattice) -> Self {
        Self { seen: vec![false; l.heights * l.n] }
    }
}

impl Lattice {
    fn new(n: usize, rows: usize, boundary: Boundary) -> Self {
        let mut layers = Vec::with_capacity(2 * rows);
        let mut bit = 0;
        for _ in 0..rows {
            for first in [1usize, 0] {
                let mut layer = vec![None; n];
                let mut a = first;
                while a + 1 < n {
                    layer[a] = Some((a + 1, bit));
                    layer[a + 1] = Some((a, bit));
                    bit += 1;
                    a += 2;
                }
                layers.push(layer);
            }
        }
        Self { n, heights: 2 * rows, layers, marks: boundary == Boundary::TwoBoundary }
    }

    fn node_marks(&self, h: usize, i: usize) -> Blobs {
        if !self.marks || h % 2 != 0 {
            return Blobs::NONE;
        }
        let mut m = Blobs::NONE;
        if i == 0 {
            m = m.union(Blobs::LEFT);
        }
        if i == self.n - 1 {
            m = m.union(Blobs::RIGHT);
        }
        m
    }

    fn turns(&self, layer: usize, i: usize, config: u64) -> Option<usize> {
        self.layers[layer][i].filter(|(_, bit)| config >> bit & 1 == 1).map(|(p, _)| p)
    }

    fn census(&self, config: u64, buf: &mut Scratch) -> Result<LoopCensus> {
        let (n, hs) = (self.n, self.heights);
        buf.seen.iter_mut().for_each(|s| *s = false);
        let mut census = LoopCensus::default();
        for start in 0..hs * n {
            if buf.seen[start] {
                continue;
            }
            let (mut h, mut i) = (start / n, start % n);
            // Leave through the upper edge first.
            let mut upward = true;
            let mut marks = Blobs::NONE;
            let mut climb = 0i64;
            loop {
                buf.seen[h * n + i] = true;
                marks = marks.union(self.node_marks(h, i));
                if upward {
                    match self.turns(h, i, config) {
                        Some(j) => {
                            i = j;
                            upward = false;
                        }
                        None => {
                            h = (h + 1) % hs;
                            climb += 1;
                        }
                    }
                } else {
                    let below = (h + hs - 1) % hs;
                    match self.turns(below, i, config) {
                        Some(j) => {
                            i = j;
                            upward = true;
                        }
                        None => {
                            h = below;
                            climb -= 1;
                        }
                    }
                }
                if h * n + i == start && upward {
                    break;
                }
            }
            census.add(marks, climb / hs as i64)?;
        }
        Ok(census)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{word_eval, Generator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SEQ: Execution = Execution::Sequential;
    const B: Status = Status::Blobbed;
    const U: Status = Status::Unblobbed;

    fn plain(n: f64, n1: f64, n2: f64, n12: f64) -> LoopWeights {
        LoopWeights::plain(n, n1, n2, n12)
    }

    fn random_weights(rng: &mut ChaCha8Rng) -> LoopWeights {
        let mut g = || rng.gen_range(-1.5..1.5);
        LoopWeights { n: g(), n1: g(), n2: g(), n12: g(), l: g(), l1: g(), l2: g() }
    }

    #[test]
    fn direct_trace_examples() {
        let w = plain(1.3, 0.4, 0.8, 0.2);
        let t = markov_trace_direct(&word_eval("e1 e2", 4, w).unwrap()).unwrap();
        assert!((t - w.n * w.n).abs() < 1e-14);
        let w = LoopWeights { l: 0.6, ..w };
        let t = markov_trace_direct(&word_eval("e3", 4, w).unwrap()).unwrap();
        assert!((t - w.l * w.l * w.n).abs() < 1e-14);
        let t = markov_trace_direct(&word_eval("", 2, w).unwrap()).unwrap();
        assert!((t - w.l * w.l).abs() < 1e-14);
        let z = markov_trace_direct(&AlgebraElement::transfer(2, w, Boundary::TwoBoundary).unwrap()).unwrap();
        assert!((z - (w.l1 * w.l2 + w.n12)).abs() < 1e-14);
    }

    #[test]
    fn winding_decides_contractibility() {
        // Through-lines b1->t3, b2->t4 with a top cup at 1,2 and a bottom cap
        // at 3,4: one closed loop that goes up and comes back down.
        let d = crate::diagram::Diagram::from_partners(4, &[6, 7, 3, 2, 5, 4, 0, 1], &[Blobs::NONE; 8]);
        let c = closure_census(&d).unwrap();
        assert_eq!(c.contractible, [1, 0, 0, 0]);
        assert_eq!(c.non_contractible_total(), 0);
    }

    #[test]
    fn chebyshev_table() {
        assert_eq!(chebyshev_u(-2), vec![-1]);
        assert!(chebyshev_u(-1).is_empty());
        assert_eq!(chebyshev_u(0), vec![1]);
        assert_eq!(chebyshev_u(2), vec![-1, 0, 1]);
        assert_eq!(chebyshev_u(3), vec![0, -2, 0, 1]);
        for k in 0..8 {
            let chi: f64 = 0.37;
            let want = ((k as f64 + 1.0) * chi).sin() / chi.sin();
            assert!((peval(&chebyshev_u(k), 2.0 * chi.cos()) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn amplitude_examples() {
        let bb = amplitude_poly(1, B, B);
        assert_eq!(bb, AmplitudePoly { c00: vec![-1], c10: vec![], c01: vec![], c11: vec![1] });
        assert_eq!(bb.to_string(), "l1 l2 - 1");
        let pi = std::f64::consts::PI;
        let d = amplitude(1, B, B, pi / 4.0, 1.0, 1.0).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        let s2 = 2f64.sqrt();
        assert!((bb.eval(s2, s2, s2) - 1.0).abs() < 1e-14);
        assert!(amplitude(1, B, B, pi / 3.0, 1.0, 1.0).unwrap().abs() < 1e-14);
        assert!(bb.eval(1.0, 1.0, 1.0).abs() < 1e-14);
        assert!(matches!(amplitude(1, U, B, pi / 3.0, 0.0, 1.0), Err(Error::Pole)));
    }

    fn nc_weight(u: f64, chi: f64) -> f64 {
        ((u + 1.0) * chi).sin() / (u * chi).sin()
    }

    #[test]
    fn trig_and_chebyshev_agree_on_grid() {
        let mut checked = 0;
        for a in 0..20 {
            for b in 0..20 {
                for c in 0..20 {
                    let chi = 0.05 + 3.0 * a as f64 / 20.0;
                    let u1 = -2.3 + 4.9 * b as f64 / 20.0;
                    let u2 = -1.9 + 4.3 * c as f64 / 20.0;
                    let (s, s1, s2) = (chi.sin(), (u1 * chi).sin(), (u2 * chi).sin());
                    if s.abs() < 1e-6 || s1.abs() < 1e-6 || s2.abs() < 1e-6 {
                        continue;
                    }
                    let (l, l1, l2) = (2.0 * chi.cos(), nc_weight(u1, chi), nc_weight(u2, chi));
                    for j in 1..4 {
                        for alpha in Status::ALL {
                            for beta in Status::ALL {
                                let t = amplitude(j, alpha, beta, chi, u1, u2).unwrap();
                                let p = amplitude_poly(j, alpha, beta).eval(l, l1, l2);
                                let scale = 1.0 + t.abs();
                                assert!((t - p).abs() < 1e-10 * scale, "j={j} {chi} {u1} {u2}: {t} vs {p}");
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 50_000);
    }

    #[test]
    fn complements_are_involutions() {
        for j in 1..5 {
            let bb = amplitude_poly(j, B, B);
            assert_eq!(bb.complement_l1().complement_l1(), bb);
            assert_eq!(bb.complement_l1(), amplitude_poly(j, U, B));
            assert_eq!(bb.complement_l2(), amplitude_poly(j, B, U));
            assert_eq!(bb.complement_l1().complement_l2(), amplitude_poly(j, U, U));
            // Both rims trivial: the plain Temperley-Lieb amplitude U_{2j}.
            for l in [0.3, 1.1, 1.9] {
                assert!((bb.eval(l, l, l) - peval(&chebyshev_u(2 * j as i64), l)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decomposition_matches_direct_trace_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for k in 0..200 {
            let n = [2usize, 4, 6][k % 3];
            let w = random_weights(&mut rng);
            let len = rng.gen_range(0..=8);
            let word: Vec<String> = (0..len)
                .map(|_| match rng.gen_range(0..=n) {
                    0 => Generator::B1,
                    i if i == n => Generator::B2,
                    i => Generator::E(i),
                })
                .map(|g| g.to_string())
                .collect();
            let x = word_eval(&word.join(" "), n, w).unwrap();
            let direct = markov_trace_direct(&x).unwrap();
            let dec = markov_trace_decomposed(&x).unwrap();
            assert!(
                (direct - dec).abs() <= 1e-10 * direct.abs().max(1.0),
                "N={n} word {:?}: {direct} vs {dec}",
                word.join(" ")
            );
        }
    }

    #[test]
    fn decomposition_of_identity() {
        let w = LoopWeights { l: 0.7, l1: 0.2, l2: 1.3, ..LoopWeights::uniform(1.0) };
        let id = AlgebraElement::identity(2, w).unwrap();
        assert!((markov_trace_decomposed(&id).unwrap() - 0.49).abs() < 1e-14);
    }

    #[test]
    fn all_ones_counts_configurations() {
        let ones = LoopWeights::uniform(1.0);
        for n in [2usize, 4, 6] {
            for rows in 1..=3 {
                let expect = 2f64.powi(((n - 1) * rows) as i32);
                let z = lattice_partition(n, rows, &ones, Boundary::TwoBoundary, SEQ).unwrap();
                assert!((z.total - expect).abs() < 1e-9 * expect);
                assert_eq!(brute_force_partition(n, rows, &ones, Boundary::TwoBoundary, SEQ).unwrap(), expect);
            }
        }
    }

    #[test]
    fn brute_force_agrees_with_sectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 6] {
            for rows in 1..=3 {
                for _ in 0..20 {
                    let w = random_weights(&mut rng);
                    let z = lattice_partition(n, rows, &w, Boundary::TwoBoundary, SEQ).unwrap().total;
                    let bf = brute_force_partition(n, rows, &w, Boundary::TwoBoundary, Execution::Parallel).unwrap();
                    assert!((z - bf).abs() <= 1e-10 * bf.abs().max(1.0), "N={n} L={rows}: {z} vs {bf}");
                }
                let w = random_weights(&mut rng);
                let z = lattice_partition(n, rows, &w, Boundary::Free, SEQ).unwrap().total;
                let bf = brute_force_partition(n, rows, &w, Boundary::Free, SEQ).unwrap();
                assert!((z - bf).abs() <= 1e-10 * bf.abs().max(1.0), "free N={n} L={rows}: {z} vs {bf}");
            }
        }
    }

    #[test]
    fn transfer_element_trace_matches_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_weights(&mut rng);
        let t = AlgebraElement::transfer(4, w, Boundary::TwoBoundary).unwrap();
        let t2 = t.compose(&t).unwrap();
        let direct = markov_trace_direct(&t2).unwrap();
        let z = lattice_partition(4, 2, &w, Boundary::TwoBoundary, SEQ).unwrap().total;
        assert!((direct - z).abs() <= 1e-10 * z.abs().max(1.0));
    }

    #[test]
    fn n12_zero_excludes_double_rim_loops() {
        let w = LoopWeights { n12: 0.0, ..LoopWeights::uniform(1.0) };
        let lattice = Lattice::new(4, 2, Boundary::TwoBoundary);
        let mut buf = Scratch::new(&lattice);
        let allowed = (0..1u64 << 6)
            .filter(|c| lattice.census(*c, &mut buf).unwrap().contractible[3] == 0)
            .count() as f64;
        assert_eq!(brute_force_partition(4, 2, &w, Boundary::TwoBoundary, SEQ).unwrap(), allowed);
        assert!(allowed < 64.0);
    }

    #[test]
    fn mirror_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in [2usize, 4, 6] {
            let w = random_weights(&mut rng);
            let a = lattice_partition(n, 3, &w, Boundary::TwoBoundary, SEQ).unwrap().total;
            let b = lattice_partition(n, 3, &w.mirrored(), Boundary::TwoBoundary, SEQ).unwrap().total;
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn size_cap() {
        let w = LoopWeights::uniform(1.0);
        assert!(matches!(
            brute_force_partition(10, 3, &w, Boundary::TwoBoundary, SEQ),
            Err(Error::SizeCap { faces: 27, cap: 26 })
        ));
    }
}
