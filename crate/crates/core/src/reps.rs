//! Standard modules of the two-boundary Temperley-Lieb algebra.
//!
//! A [`LinkState`] is the top half of a diagram: every site is either the
//! end of an arc or a string going down. The vacuum module `V_0` has no
//! strings and its top-level arcs may carry any marks, as long as no arc
//! marked by rim 2 sits left of an arc marked by rim 1. The modules
//! `V_2j^{ab}` have `2j` strings that are never covered by arcs; only
//! top-level arcs left of the first string can carry `b1` and only those
//! right of the last string can carry `b2`. The leftmost string is
//! blobbed (`b1` acts as 1) or unblobbed (`b1` acts as 0), likewise the
//! rightmost string for `b2`.
//!
//! The plain Temperley-Lieb standard modules ([`Sector::Tl`]) are included
//! for the free-boundary transfer matrix.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagram::{check_strands, AlgebraElement, Blobs, Boundary, Diagram, Generator};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::params::LoopWeights;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Status {
    Blobbed,
    Unblobbed,
}

impl Status {
    pub fn letter(self) -> char {
        match self {
            Status::Blobbed => 'b',
            Status::Unblobbed => 'u',
        }
    }

    fn from_letter(c: char) -> Option<Status> {
        match c {
            'b' => Some(Status::Blobbed),
            'u' => Some(Status::Unblobbed),
            _ => None,
        }
    }

    pub const ALL: [Status; 2] = [Status::Blobbed, Status::Unblobbed];
}

/// Label of a standard module. Written `0`, `1bb`, `2ub`, ... and `tl0`,
/// `tl1`, ... for the plain Temperley-Lieb modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Vacuum,
    Strings { j: usize, alpha: Status, beta: Status },
    Tl { j: usize },
}

impl Sector {
    pub fn strings(j: usize, alpha: Status, beta: Status) -> Self {
        Sector::Strings { j, alpha, beta }
    }

    /// Number of string pairs.
    pub fn j(self) -> usize {
        match self {
            Sector::Vacuum => 0,
            Sector::Strings { j, .. } | Sector::Tl { j } => j,
        }
    }

    /// `V_0` followed by every `V_2j^{ab}`, `1 <= j <= N/2`, in the order
    /// bb, bu, ub, uu.
    pub fn two_boundary(strands: usize) -> Vec<Sector> {
        let mut out = vec![Sector::Vacuum];
        for j in 1..=strands / 2 {
            for alpha in Status::ALL {
                for beta in Status::ALL {
                    out.push(Sector::strings(j, alpha, beta));
                }
            }
        }
        out
    }

    pub fn check(self, strands: usize) -> Result<()> {
        check_strands(strands)?;
        let j = self.j();
        if j > strands / 2 || matches!(self, Sector::Strings { j: 0, .. }) {
            return Err(Error::Invalid(format!("sector {self} does not exist for N = {strands}")));
        }
        Ok(())
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Vacuum => write!(f, "0"),
            Sector::Strings { j, alpha, beta } => write!(f, "{j}{}{}", alpha.letter(), beta.letter()),
            Sector::Tl { j } => write!(f, "tl{j}"),
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse sector label {s:?}"));
        if s == "0" {
            return Ok(Sector::Vacuum);
        }
        if let Some(j) = s.strip_prefix("tl") {
            return j.parse().map(|j| Sector::Tl { j }).map_err(|_| bad());
        }
        let mut chars: Vec<char> = s.chars().collect();
        if chars.len() < 3 {
            return Err(bad());
        }
        let beta = Status::from_letter(chars.pop().unwrap()).ok_or_else(bad)?;
        let alpha = Status::from_letter(chars.pop().unwrap()).ok_or_else(bad)?;
        let j: usize = chars.into_iter().collect::<String>().parse().map_err(|_| bad())?;
        if j == 0 {
            return Err(bad());
        }
        Ok(Sector::strings(j, alpha, beta))
    }
}

const STRING: u8 = 0;
const CLOSE: u8 = 5;

fn open(blobs: Blobs) -> u8 {
    1 + blobs.bits()
}

/// Site codes: `0` string, `1 + marks` arc opening, `5` arc closing.
/// States sort lexicographically on these codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkState {
    codes: Vec<u8>,
}

impl LinkState {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    /// Arc partner of every site, `None` for strings, and the marks of the
    /// arc through each site.
    pub fn partners(&self) -> (Vec<Option<usize>>, Vec<Blobs>) {
        let n = self.codes.len();
        let mut partner = vec![None; n];
        let mut blobs = vec![Blobs::NONE; n];
        let mut stack = Vec::new();
        for (i, &c) in self.codes.iter().enumerate() {
            match c {
                STRING => {}
                CLOSE => {
                    let o: usize = stack.pop().expect("unbalanced link state");
                    partner[o] = Some(i);
                    partner[i] = Some(o);
                    blobs[i] = blobs[o];
                }
                c => {
                    blobs[i] = Blobs::from_bits(c - 1);
                    stack.push(i);
                }
            }
        }
        (partner, blobs)
    }

    pub fn string_count(&self) -> usize {
        self.codes.iter().filter(|c| **c == STRING).count()
    }

    fn from_partners(partner: &[Option<usize>], blobs: &[Blobs]) -> Self {
        let codes = partner
            .iter()
            .enumerate()
            .map(|(i, p)| match p {
                None => STRING,
                Some(p) if *p > i => open(blobs[i]),
                Some(_) => CLOSE,
            })
            .collect();
        Self { codes }
    }
}

/// `|` string, `(` plain arc, `<` arc marked by rim 1, `{` by rim 2,
/// `[` by both; every arc closes with `)`.
impl fmt::Display for LinkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.codes {
            let ch = match c {
                STRING => '|',
                CLOSE => ')',
                1 => '(',
                2 => '<',
                3 => '{',
                _ => '[',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// All states of a sector in lexicographic order.
pub fn enumerate_basis(strands: usize, sector: Sector) -> Result<Vec<LinkState>> {
    sector.check(strands)?;
    let mut out = Vec::new();
    let mut codes = Vec::with_capacity(strands);
    let total_strings = 2 * sector.j();
    grow(strands, sector, total_strings, 0, false, &mut codes, &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    strands: usize,
    sector: Sector,
    total_strings: usize,
    strings: usize,
    seen_right: bool,
    codes: &mut Vec<u8>,
    stack: &mut Vec<usize>,
    out: &mut Vec<LinkState>,
) {
    let pos = codes.len();
    let depth = stack.len();
    if pos == strands {
        if depth == 0 && strings == total_strings {
            out.push(LinkState { codes: codes.clone() });
        }
        return;
    }
    let remaining = strands - pos;
    if depth + (total_strings - strings) > remaining {
        return;
    }
    if depth == 0 && strings < total_strings {
        codes.push(STRING);
        grow(strands, sector, total_strings, strings + 1, seen_right, codes, stack, out);
        codes.pop();
    }
    if depth > 0 {
        let o = stack.pop().unwrap();
        codes.push(CLOSE);
        grow(strands, sector, total_strings, strings, seen_right, codes, stack, out);
        codes.pop();
        stack.push(o);
    }
    let marks: &[Blobs] = if depth > 0 {
        &[Blobs::NONE]
    } else {
        match sector {
            Sector::Tl { .. } => &[Blobs::NONE],
            Sector::Vacuum if seen_right => &[Blobs::NONE, Blobs::RIGHT],
            Sector::Vacuum => &[Blobs::NONE, Blobs::LEFT, Blobs::RIGHT, Blobs::BOTH],
            Sector::Strings { .. } if strings == 0 => &[Blobs::NONE, Blobs::LEFT],
            Sector::Strings { .. } if strings == total_strings => &[Blobs::NONE, Blobs::RIGHT],
            Sector::Strings { .. } => &[Blobs::NONE],
        }
    };
    for &m in marks {
        codes.push(open(m));
        stack.push(pos);
        grow(strands, sector, total_strings, strings, seen_right || m.has_right(), codes, stack, out);
        stack.pop();
        codes.pop();
    }
}

/// A standard module with its ordered basis.
#[derive(Debug, Clone)]
pub struct Module {
    strands: usize,
    sector: Sector,
    basis: Vec<LinkState>,
    index: HashMap<LinkState, usize>,
}

impl Module {
    pub fn new(strands: usize, sector: Sector) -> Result<Self> {
        let basis = enumerate_basis(strands, sector)?;
        let index = basis.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { strands, sector, basis, index })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LinkState] {
        &self.basis
    }

    pub fn index_of(&self, s: &LinkState) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn check_diagram(&self, d: &Diagram) -> Result<()> {
        if d.strands() != self.strands {
            return Err(Error::StrandMismatch(d.strands(), self.strands));
        }
        if matches!(self.sector, Sector::Tl { .. }) && d.links().iter().any(|l| !l.blobs.is_empty()) {
            return Err(Error::Invalid("blob generators do not act on Temperley-Lieb modules".into()));
        }
        Ok(())
    }

    /// Factor picked up by a string whose path collected `marks`.
    fn string_factor(&self, marks: Blobs) -> f64 {
        let Sector::Strings { alpha, beta, .. } = self.sector else {
            return 1.0;
        };
        let keep = (!marks.has_left() || alpha == Status::Blobbed)
            && (!marks.has_right() || beta == Status::Blobbed);
        if keep {
            1.0
        } else {
            0.0
        }
    }

    /// Image of `s` under the diagram `d` placed on top of it, or `None`
    /// when it vanishes.
    pub fn act_diagram(&self, d: &Diagram, s: &LinkState, w: &LoopWeights) -> Option<(LinkState, f64)> {
        let n = self.strands;
        let (pd, bd) = d.partner_table();
        let (sp, sb) = s.partners();
        let mut rp: Vec<Option<usize>> = vec![None; n];
        let mut rb = vec![Blobs::NONE; n];
        let mut done = vec![false; n];
        let mut seen = vec![false; n];
        let mut weight = 1.0;
        let mut strings = 0;
        for t in 0..n {
            if done[t] {
                continue;
            }
            let mut marks = bd[n + t];
            let mut p = pd[n + t];
            loop {
                if p >= n {
                    let u = p - n;
                    rp[t] = Some(u);
                    rp[u] = Some(t);
                    rb[t] = marks;
                    rb[u] = marks;
                    done[u] = true;
                    break;
                }
                seen[p] = true;
                match sp[p] {
                    None => {
                        strings += 1;
                        weight *= self.string_factor(marks);
                        if weight == 0.0 {
                            return None;
                        }
                        break;
                    }
                    Some(k) => {
                        marks = marks.union(sb[p]);
                        seen[k] = true;
                        marks = marks.union(bd[k]);
                        p = pd[k];
                    }
                }
            }
            done[t] = true;
        }
        if strings < s.string_count() {
            return None;
        }
        for k0 in 0..n {
            if seen[k0] {
                continue;
            }
            let mut marks = Blobs::NONE;
            let mut k = k0;
            loop {
                seen[k] = true;
                let other = sp[k].expect("closed loop through a string");
                marks = marks.union(sb[k]).union(bd[other]);
                seen[other] = true;
                k = pd[other];
                if k == k0 {
                    break;
                }
            }
            weight *= w.contractible(marks);
        }
        Some((LinkState::from_partners(&rp, &rb), weight))
    }

    /// Generator action on a single state: at most one image.
    pub fn act(&self, g: Generator, s: &LinkState, w: &LoopWeights) -> Result<Vec<(LinkState, f64)>> {
        let d = Diagram::generator(g, self.strands)?;
        self.check_diagram(&d)?;
        Ok(self.act_diagram(&d, s, w).into_iter().filter(|(_, c)| *c != 0.0).collect())
    }

    pub fn diagram_matrix(&self, d: &Diagram, w: &LoopWeights, exec: Execution) -> Result<CsrMatrix> {
        self.check_diagram(d)?;
        let images = par::map_indexed(exec, self.dim(), |col| {
            self.act_diagram(d, &self.basis[col], w).map(|(img, c)| {
                let row = self
                    .index_of(&img)
                    .unwrap_or_else(|| panic!("image {img} of {} lies outside sector {}", self.basis[col], self.sector));
                (row, col, c)
            })
        });
        Ok(CsrMatrix::from_triplets(self.dim(), self.dim(), images.into_iter().flatten()))
    }

    pub fn generator_matrix(&self, g: Generator, w: &LoopWeights, exec: Execution) -> Result<CsrMatrix> {
        self.diagram_matrix(&Diagram::generator(g, self.strands)?, w, exec)
    }

    /// Matrix of a linear combination of diagrams.
    pub fn element_matrix(&self, x: &AlgebraElement, exec: Execution) -> Result<CsrMatrix> {
        if x.strands() != self.strands {
            return Err(Error::StrandMismatch(x.strands(), self.strands));
        }
        let mut acc = CsrMatrix::zeros(self.dim(), self.dim());
        for (d, c) in x.terms() {
            acc = acc.add_scaled(&self.diagram_matrix(d, x.weights(), exec)?, c);
        }
        Ok(acc)
    }

    /// Sparse factors of the transfer matrix, leftmost first:
    /// `b1, b2, (1+e_1), (1+e_3), ..., (1+e_2), (1+e_4), ...`.
    pub fn transfer_factors(&self, w: &LoopWeights, boundary: Boundary, exec: Execution) -> Result<Vec<CsrMatrix>> {
        let n = self.strands;
        let mut factors = Vec::with_capacity(n + 1);
        if boundary == Boundary::TwoBoundary {
            factors.push(self.generator_matrix(Generator::B1, w, exec)?);
            factors.push(self.generator_matrix(Generator::B2, w, exec)?);
        }
        let id = CsrMatrix::identity(self.dim());
        for i in (1..n).step_by(2).chain((2..n).step_by(2)) {
            factors.push(id.add_scaled(&self.generator_matrix(Generator::E(i), w, exec)?, 1.0));
        }
        Ok(factors)
    }
}

/// A sector operator together with the basis it acts on.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub sector: Sector,
    pub basis: Vec<LinkState>,
    pub matrix: CsrMatrix,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Product of the sparse factors, applied row by row from the right.
pub fn transfer_matrix(
    strands: usize,
    sector: Sector,
    w: &LoopWeights,
    boundary: Boundary,
    exec: Execution,
) -> Result<SectorMatrix> {
    let module = Module::new(strands, sector)?;
    let factors = module.transfer_factors(w, boundary, exec)?;
    let mut acc = CsrMatrix::identity(module.dim());
    for f in factors.iter().rev() {
        acc = f.matmul(&acc)?;
    }
    Ok(SectorMatrix { sector, basis: module.basis, matrix: acc })
}

/// `H = -lambda1 b1 - lambda2 b2 - sum_i e_i`.
pub fn hamiltonian_matrix(
    strands: usize,
    sector: Sector,
    lambda1: f64,
    lambda2: f64,
    w: &LoopWeights,
    exec: Execution,
) -> Result<SectorMatrix> {
    if !(lambda1 > 0.0) {
        return Err(Error::OutOfRange { name: "lambda1", value: lambda1, range: "(0, inf)" });
    }
    if !(lambda2 > 0.0) {
        return Err(Error::OutOfRange { name: "lambda2", value: lambda2, range: "(0, inf)" });
    }
    let module = Module::new(strands, sector)?;
    let mut h = CsrMatrix::zeros(module.dim(), module.dim());
    if !matches!(sector, Sector::Tl { .. }) {
        h = h.add_scaled(&module.generator_matrix(Generator::B1, w, exec)?, -lambda1);
        h = h.add_scaled(&module.generator_matrix(Generator::B2, w, exec)?, -lambda2);
    }
    for i in 1..strands {
        h = h.add_scaled(&module.generator_matrix(Generator::E(i), w, exec)?, -1.0);
    }
    Ok(SectorMatrix { sector, basis: module.basis, matrix: h })
}
