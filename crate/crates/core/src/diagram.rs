//! The two-boundary Temperley-Lieb algebra as decorated planar diagrams.
//!
//! A [`Diagram`] on `N` strands is a non-crossing perfect matching of `2N`
//! nodes: bottom nodes `0..N` and top nodes `N..2N`, both numbered left to
//! right. Every link carries a [`Blobs`] set recording whether the component
//! has touched rim 1 (`b1`, left) and/or rim 2 (`b2`, right).
//!
//! Products read like operators: in `a * b` the diagram `b` sits below `a`,
//! so `(a * b) v = a (b v)` on modules.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::params::LoopWeights;

/// Set of boundary marks on a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Blobs(u8);

impl Blobs {
    pub const NONE: Blobs = Blobs(0);
    pub const LEFT: Blobs = Blobs(1);
    pub const RIGHT: Blobs = Blobs(2);
    pub const BOTH: Blobs = Blobs(3);

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_bits(bits: u8) -> Blobs {
        Blobs(bits & 3)
    }

    pub fn union(self, other: Blobs) -> Blobs {
        Blobs(self.0 | other.0)
    }

    pub fn has_left(self) -> bool {
        self.0 & 1 != 0
    }

    pub fn has_right(self) -> bool {
        self.0 & 2 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Blobs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Blobs::NONE => write!(f, ""),
            Blobs::LEFT => write!(f, "[b1]"),
            Blobs::RIGHT => write!(f, "[b2]"),
            _ => write!(f, "[b1 b2]"),
        }
    }
}

impl LoopWeights {
    /// Weight of a closed contractible loop carrying `blobs`.
    pub fn contractible(&self, blobs: Blobs) -> f64 {
        match blobs {
            Blobs::NONE => self.n,
            Blobs::LEFT => self.n1,
            Blobs::RIGHT => self.n2,
            _ => self.n12,
        }
    }

    /// Weight of a closed non-contractible loop, `None` for both marks.
    pub fn non_contractible(&self, blobs: Blobs) -> Option<f64> {
        match blobs {
            Blobs::NONE => Some(self.l),
            Blobs::LEFT => Some(self.l1),
            Blobs::RIGHT => Some(self.l2),
            _ => None,
        }
    }
}

/// Generators `e_i` (1-based, `1 <= i <= N-1`), `b1` and `b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    E(usize),
    B1,
    B2,
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b1" => Ok(Generator::B1),
            "b2" => Ok(Generator::B2),
            _ => s
                .strip_prefix('e')
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|i| *i >= 1)
                .map(Generator::E)
                .ok_or_else(|| Error::BadLabel(s.to_string())),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::E(i) => write!(f, "e{i}"),
            Generator::B1 => write!(f, "b1"),
            Generator::B2 => write!(f, "b2"),
        }
    }
}

/// Parses a whitespace separated word such as `"e1 e2 b1"`.
pub fn parse_word(word: &str) -> Result<Vec<Generator>> {
    word.split_whitespace().map(str::parse).collect()
}

pub fn check_strands(strands: usize) -> Result<()> {
    if strands == 0 || strands % 2 != 0 {
        return Err(Error::OddStrands(strands));
    }
    Ok(())
}

impl Generator {
    pub fn check(self, strands: usize) -> Result<()> {
        match self {
            Generator::E(i) if i == 0 || i >= strands => {
                Err(Error::GeneratorIndex { index: i, strands })
            }
            _ => Ok(()),
        }
    }
}

/// A link between two nodes, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub a: u16,
    pub b: u16,
    pub blobs: Blobs,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    strands: usize,
    /// Sorted by first node.
    links: Vec<Link>,
}

impl Diagram {
    pub fn identity(strands: usize) -> Result<Self> {
        check_strands(strands)?;
        Ok(Self::identity_unchecked(strands))
    }

    fn identity_unchecked(strands: usize) -> Self {
        let links = (0..strands)
            .map(|i| Link { a: i as u16, b: (strands + i) as u16, blobs: Blobs::NONE })
            .collect();
        Self { strands, links }
    }

    pub fn generator(g: Generator, strands: usize) -> Result<Self> {
        check_strands(strands)?;
        g.check(strands)?;
        let mut d = Self::identity_unchecked(strands);
        match g {
            Generator::E(i) => {
                let (l, r) = (i - 1, i);
                let mut links: Vec<Link> = d
                    .links
                    .into_iter()
                    .filter(|k| k.a as usize != l && k.a as usize != r)
                    .collect();
                links.push(Link { a: l as u16, b: r as u16, blobs: Blobs::NONE });
                links.push(Link {
                    a: (strands + l) as u16,
                    b: (strands + r) as u16,
                    blobs: Blobs::NONE,
                });
                links.sort();
                d.links = links;
            }
            Generator::B1 => d.links[0].blobs = Blobs::LEFT,
            Generator::B2 => d.links[strands - 1].blobs = Blobs::RIGHT,
        }
        Ok(d)
    }

    /// Builds a diagram from a partner table and per-node marks. Both ends of
    /// a link must carry the same marks.
    pub fn from_partners(strands: usize, partner: &[usize], blobs: &[Blobs]) -> Self {
        debug_assert_eq!(partner.len(), 2 * strands);
        let links = (0..2 * strands)
            .filter(|&x| x < partner[x])
            .map(|x| Link { a: x as u16, b: partner[x] as u16, blobs: blobs[x] })
            .collect();
        let d = Self { strands, links };
        debug_assert!(d.is_planar(), "non-planar diagram {d}");
        debug_assert!(d.blobs_exposed(), "blob on an unexposed component in {d}");
        d
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Partner of every node and the marks of the link through it.
    pub fn partner_table(&self) -> (Vec<usize>, Vec<Blobs>) {
        let mut partner = vec![0; 2 * self.strands];
        let mut blobs = vec![Blobs::NONE; 2 * self.strands];
        for l in &self.links {
            partner[l.a as usize] = l.b as usize;
            partner[l.b as usize] = l.a as usize;
            blobs[l.a as usize] = l.blobs;
            blobs[l.b as usize] = l.blobs;
        }
        (partner, blobs)
    }

    pub fn is_top(&self, node: usize) -> bool {
        node >= self.strands
    }

    pub fn through_lines(&self) -> usize {
        self.links
            .iter()
            .filter(|l| (l.a as usize) < self.strands && (l.b as usize) >= self.strands)
            .count()
    }

    /// Position of a node on the boundary circle of the rectangle:
    /// bottom left to right, right wall, top right to left, left wall.
    fn circle_pos(&self, node: usize) -> usize {
        if node < self.strands {
            node
        } else {
            3 * self.strands - node
        }
    }

    fn right_wall(&self) -> usize {
        self.strands
    }

    fn left_wall(&self) -> usize {
        2 * self.strands + 1
    }

    fn chord(&self, l: &Link) -> (usize, usize) {
        let (p, q) = (self.circle_pos(l.a as usize), self.circle_pos(l.b as usize));
        (p.min(q), p.max(q))
    }

    fn exposed_to(&self, idx: usize, wall: usize) -> bool {
        let x = self.chord(&self.links[idx]).0;
        self.links.iter().enumerate().all(|(k, other)| {
            if k == idx {
                return true;
            }
            let (p, q) = self.chord(other);
            let inside = |y: usize| p < y && y < q;
            inside(x) == inside(wall)
        })
    }

    pub fn is_left_exposed(&self, idx: usize) -> bool {
        self.exposed_to(idx, self.left_wall())
    }

    pub fn is_right_exposed(&self, idx: usize) -> bool {
        self.exposed_to(idx, self.right_wall())
    }

    pub fn is_planar(&self) -> bool {
        let chords: Vec<_> = self.links.iter().map(|l| self.chord(l)).collect();
        chords.iter().enumerate().all(|(i, &(p, q))| {
            chords[i + 1..]
                .iter()
                .all(|&(r, s)| !((p < r && r < q && q < s) || (r < p && p < s && s < q)))
        })
    }

    /// Every `b1` mark sits on a left-exposed link, every `b2` mark on a
    /// right-exposed one.
    pub fn blobs_exposed(&self) -> bool {
        self.links.iter().enumerate().all(|(i, l)| {
            (!l.blobs.has_left() || self.is_left_exposed(i))
                && (!l.blobs.has_right() || self.is_right_exposed(i))
        })
    }

    /// Stacks `self` on top of `below`. Returns the reduced diagram and the
    /// product of the weights of the closed loops that were removed.
    pub fn compose(&self, below: &Diagram, w: &LoopWeights) -> (Diagram, f64) {
        let n = self.strands;
        debug_assert_eq!(n, below.strands);
        let (pa, ba) = self.partner_table();
        let (pb, bb) = below.partner_table();
        let mut partner = vec![usize::MAX; 2 * n];
        let mut blobs = vec![Blobs::NONE; 2 * n];
        let mut middle_seen = vec![false; n];

        // Walk from an outer node to the outer node at the other end.
        // `in_below` tells which diagram the walk is about to traverse.
        let walk = |start: usize, mut in_below: bool, seen: &mut [bool]| -> (usize, Blobs) {
            let mut node = start;
            let mut marks = Blobs::NONE;
            loop {
                if in_below {
                    let next = pb[node];
                    marks = marks.union(bb[node]);
                    if next < n {
                        return (next, marks);
                    }
                    let k = next - n;
                    seen[k] = true;
                    node = k;
                    in_below = false;
                } else {
                    let next = pa[node];
                    marks = marks.union(ba[node]);
                    if next >= n {
                        return (next, marks);
                    }
                    seen[next] = true;
                    node = n + next;
                    in_below = true;
                }
            }
        };

        for start in 0..2 * n {
            if partner[start] != usize::MAX {
                continue;
            }
            let (end, marks) = if start < n {
                walk(start, true, &mut middle_seen)
            } else {
                walk(start, false, &mut middle_seen)
            };
            partner[start] = end;
            partner[end] = start;
            blobs[start] = marks;
            blobs[end] = marks;
        }

        let mut weight = 1.0;
        for k0 in 0..n {
            if middle_seen[k0] {
                continue;
            }
            let mut marks = Blobs::NONE;
            let mut k = k0;
            loop {
                middle_seen[k] = true;
                // Upward through `self` (bottom node k), back down through `below`.
                let kk = pa[k];
                marks = marks.union(ba[k]);
                debug_assert!(kk < n);
                middle_seen[kk] = true;
                let back = pb[n + kk];
                marks = marks.union(bb[n + kk]);
                debug_assert!(back >= n);
                k = back - n;
                if k == k0 {
                    break;
                }
            }
            weight *= w.contractible(marks);
        }
        (Diagram::from_partners(n, &partner, &blobs), weight)
    }

    /// One line per link, e.g. `b1 -- t3 [b1]`.
    pub fn ascii(&self) -> String {
        let name = |x: u16| {
            let x = x as usize;
            if x < self.strands {
                format!("b{}", x + 1)
            } else {
                format!("t{}", x - self.strands + 1)
            }
        };
        self.links
            .iter()
            .map(|l| format!("{} -- {} {}", name(l.a), name(l.b), l.blobs).trim_end().to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ascii().replace('\n', "; "))
    }
}

/// A formal linear combination of diagrams over a fixed set of loop weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    strands: usize,
    weights: LoopWeights,
    terms: BTreeMap<Diagram, f64>,
}

/// Free boundaries or the blobbed two-boundary transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Free,
    TwoBoundary,
}

impl AlgebraElement {
    pub fn zero(strands: usize, weights: LoopWeights) -> Result<Self> {
        check_strands(strands)?;
        Ok(Self { strands, weights, terms: BTreeMap::new() })
    }

    pub fn identity(strands: usize, weights: LoopWeights) -> Result<Self> {
        Ok(Self::from_diagram(Diagram::identity(strands)?, 1.0, weights))
    }

    pub fn generator(g: Generator, strands: usize, weights: LoopWeights) -> Result<Self> {
        Ok(Self::from_diagram(Diagram::generator(g, strands)?, 1.0, weights))
    }

    pub fn from_diagram(d: Diagram, coeff: f64, weights: LoopWeights) -> Self {
        let strands = d.strands;
        let mut terms = BTreeMap::new();
        if coeff != 0.0 {
            terms.insert(d, coeff);
        }
        Self { strands, weights, terms }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn weights(&self) -> &LoopWeights {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, f64)> {
        self.terms.iter().map(|(d, c)| (d, *c))
    }

    pub fn coeff(&self, d: &Diagram) -> f64 {
        self.terms.get(d).copied().unwrap_or(0.0)
    }

    fn add_term(&mut self, d: Diagram, c: f64) {
        let slot = self.terms.entry(d).or_insert(0.0);
        *slot += c;
    }

    /// Drops zero coefficients. Diagrams are always stored reduced.
    pub fn canonicalize(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(d, c)| (d.clone(), *c))
            .collect();
        Self { strands: self.strands, weights: self.weights, terms }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch(self.strands, other.strands));
        }
        if self.weights != other.weights {
            return Err(Error::WeightMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (d, c) in other.terms() {
            out.add_term(d.clone(), c);
        }
        Ok(out.canonicalize())
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= k);
        out.canonicalize()
    }

    /// `self * below`: `below` is stacked underneath.
    pub fn compose(&self, below: &Self) -> Result<Self> {
        self.compose_with(below, Execution::Sequential)
    }

    pub fn compose_with(&self, below: &Self, exec: Execution) -> Result<Self> {
        self.check_compatible(below)?;
        let upper: Vec<(&Diagram, f64)> = self.terms().collect();
        let lower: Vec<(&Diagram, f64)> = below.terms().collect();
        let w = self.weights;
        let partial = par::map_indexed(exec, upper.len(), |i| {
            let (da, ca) = upper[i];
            lower
                .iter()
                .map(|(db, cb)| {
                    let (d, wt) = da.compose(db, &w);
                    (d, ca * cb * wt)
                })
                .collect::<Vec<_>>()
        });
        let mut out = Self { strands: self.strands, weights: w, terms: BTreeMap::new() };
        for chunk in partial {
            for (d, c) in chunk {
                out.add_term(d, c);
            }
        }
        Ok(out.canonicalize())
    }

    /// Left-to-right product of a word; the empty word is the identity.
    pub fn word(word: &[Generator], strands: usize, weights: LoopWeights) -> Result<Self> {
        let mut acc = Self::identity(strands, weights)?;
        for g in word {
            acc = acc.compose(&Self::generator(*g, strands, weights)?)?;
        }
        Ok(acc)
    }

    /// Two-row transfer element `b1 b2 prod_odd (1 + e_i) prod_even (1 + e_i)`
    /// (without the blobs for [`Boundary::Free`]), fully expanded.
    pub fn transfer(strands: usize, weights: LoopWeights, boundary: Boundary) -> Result<Self> {
        let one = Self::identity(strands, weights)?;
        let mut acc = match boundary {
            Boundary::Free => one.clone(),
            Boundary::TwoBoundary => Self::word(&[Generator::B1, Generator::B2], strands, weights)?,
        };
        let odd = (1..strands).step_by(2);
        let even = (2..strands).step_by(2);
        for i in odd.chain(even) {
            let factor = one.add(&Self::generator(Generator::E(i), strands, weights)?)?;
            acc = acc.compose(&factor)?;
        }
        Ok(acc)
    }

    /// Largest coefficient difference, for approximate comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&Diagram> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.into_iter()
            .map(|d| (self.coeff(d) - other.coeff(d)).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, c) in self.terms() {
            writeln!(f, "{c:+} x {{{d}}}")?;
        }
        Ok(())
    }
}

/// Evaluates a word given as text, e.g. `"e1 e2 e1"`.
pub fn word_eval(word: &str, strands: usize, weights: LoopWeights) -> Result<AlgebraElement> {
    let word = parse_word(word)?;
    for g in &word {
        g.check(strands)?;
    }
    AlgebraElement::word(&word, strands, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w() -> LoopWeights {
        LoopWeights { n: 1.3, n1: 0.7, n2: -0.4, n12: 0.55, l: 0.9, l1: 1.1, l2: -0.2 }
    }

    fn el(word: &str, n: usize) -> AlgebraElement {
        word_eval(word, n, w()).unwrap()
    }

    fn assert_close(a: &AlgebraElement, b: &AlgebraElement) {
        let d = a.max_abs_diff(b);
        assert!(d < 1e-12, "difference {d}\n{a}\nvs\n{b}");
    }

    #[test]
    fn generator_pictures() {
        let b1 = Diagram::generator(Generator::B1, 2).unwrap();
        assert_eq!(b1.links()[0], Link { a: 0, b: 2, blobs: Blobs::LEFT });
        assert_eq!(b1.links()[1].blobs, Blobs::NONE);
        let e1 = Diagram::generator(Generator::E(1), 2).unwrap();
        assert_eq!(e1.ascii(), "b1 -- b2\nt1 -- t2");
        let b2 = Diagram::generator(Generator::B2, 4).unwrap();
        assert_eq!(b2.through_lines(), 4);
        assert_eq!(b2.links()[3], Link { a: 3, b: 7, blobs: Blobs::RIGHT });
        assert!(Diagram::generator(Generator::E(4), 4).is_err());
        assert!(Diagram::generator(Generator::E(0), 4).is_err());
        assert!(Diagram::identity(3).is_err());
        assert!("x1".parse::<Generator>().is_err());
        assert!("e0".parse::<Generator>().is_err());
    }

    #[test]
    fn defining_relations() {
        for n in [2usize, 4, 6, 8] {
            let wt = w();
            for i in 1..n {
                let e = el(&format!("e{i}"), n);
                assert_close(&el(&format!("e{i} e{i}"), n), &e.scale(wt.n));
                if i + 1 < n {
                    assert_close(&el(&format!("e{i} e{} e{i}", i + 1), n), &e);
                    assert_close(&el(&format!("e{} e{i} e{}", i + 1, i + 1), n), &el(&format!("e{}", i + 1), n));
                }
                for j in 1..n {
                    if i.abs_diff(j) >= 2 {
                        assert_close(&el(&format!("e{i} e{j}"), n), &el(&format!("e{j} e{i}"), n));
                    }
                }
                if i >= 2 {
                    assert_close(&el(&format!("b1 e{i}"), n), &el(&format!("e{i} b1"), n));
                }
                if i <= n - 2 {
                    assert_close(&el(&format!("b2 e{i}"), n), &el(&format!("e{i} b2"), n));
                }
            }
            assert_close(&el("b1 b1", n), &el("b1", n));
            assert_close(&el("b2 b2", n), &el("b2", n));
            assert_close(&el("e1 b1 e1", n), &el("e1", n).scale(wt.n1));
            let last = n - 1;
            assert_close(&el(&format!("e{last} b2 e{last}"), n), &el(&format!("e{last}"), n).scale(wt.n2));
            if n >= 4 {
                assert_close(&el("b1 b2", n), &el("b2 b1", n));
            }
            // Loop touching both rims: (prod odd) b1 b2 (prod even) (prod odd).
            let odd: Vec<String> = (1..n).step_by(2).map(|i| format!("e{i}")).collect();
            let even: Vec<String> = (2..n).step_by(2).map(|i| format!("e{i}")).collect();
            let odd = odd.join(" ");
            let word = format!("{odd} b1 b2 {} {odd}", even.join(" "));
            assert_close(&el(&word, n), &el(&odd, n).scale(wt.n12));
        }
    }

    #[test]
    fn word_examples() {
        assert_close(&el("e1 e2 e1", 4), &el("e1", 4));
        assert_close(&el("", 4), &AlgebraElement::identity(4, w()).unwrap());
        assert_close(&el("e1 e3 b1 b2 e2 e1 e3", 4), &el("e1 e3", 4).scale(w().n12));
        assert!(word_eval("e5", 4, w()).is_err());
    }

    #[test]
    fn transfer_elements() {
        let t2 = AlgebraElement::transfer(2, w(), Boundary::TwoBoundary).unwrap();
        assert_eq!(t2.len(), 2);
        assert_close(&t2, &el("b1 b2", 2).add(&el("b1 b2 e1", 2)).unwrap());
        let free4 = AlgebraElement::transfer(4, w(), Boundary::Free).unwrap();
        assert_eq!(free4.len(), 8);
        for n in [4usize, 6] {
            let t = AlgebraElement::transfer(n, LoopWeights::uniform(1.0), Boundary::Free).unwrap();
            let id = Diagram::identity(n).unwrap();
            assert_eq!(t.coeff(&id), 1.0);
            // All weights one: the coefficients count the 2^(N-1) face choices.
            let total: f64 = t.terms().map(|(_, c)| c).sum();
            assert_eq!(total, 2f64.powi(n as i32 - 1));
        }
    }

    #[test]
    fn mismatched_operands() {
        let a = el("e1", 4);
        let b = el("e1", 2);
        assert!(matches!(a.compose(&b), Err(Error::StrandMismatch(4, 2))));
        let c = AlgebraElement::identity(4, LoopWeights::uniform(1.0)).unwrap();
        assert!(matches!(a.compose(&c), Err(Error::WeightMismatch)));
    }

    fn arb_word(n: usize) -> impl Strategy<Value = Vec<Generator>> {
        proptest::collection::vec(0..n + 1, 0..=6).prop_map(move |v| {
            v.into_iter()
                .map(|k| match k {
                    0 => Generator::B1,
                    k if k == n => Generator::B2,
                    k => Generator::E(k),
                })
                .collect()
        })
    }

    fn arb_case() -> impl Strategy<Value = (usize, Vec<Vec<Generator>>)> {
        prop::sample::select(vec![2usize, 4, 6])
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(arb_word(n), 6)))
    }

    proptest! {
        #[test]
        fn associativity((n, words) in arb_case()) {
            let word = |k: usize| AlgebraElement::word(&words[k], n, w()).unwrap();
            // Sums of two words, so products mix several diagrams.
            let x: Vec<AlgebraElement> = (0..3)
                .map(|k| word(2 * k).add(&word(2 * k + 1).scale(0.5)).unwrap())
                .collect();
            let l = x[0].compose(&x[1]).unwrap().compose(&x[2]).unwrap();
            let r = x[0].compose(&x[1].compose(&x[2]).unwrap()).unwrap();
            prop_assert!(l.max_abs_diff(&r) < 1e-12);
            prop_assert_eq!(l.canonicalize(), l.canonicalize().canonicalize());
            for (d, _) in l.terms() {
                prop_assert!(d.is_planar() && d.blobs_exposed(), "{}", d);
            }
            let id = AlgebraElement::identity(n, w()).unwrap();
            prop_assert!(id.compose(&x[0]).unwrap().max_abs_diff(&x[0]) == 0.0);
            let par = x[0].compose_with(&x[1], Execution::Parallel).unwrap();
            prop_assert!(par.max_abs_diff(&x[0].compose(&x[1]).unwrap()) == 0.0);
        }
    }
}
