//! Seeded verification suites. Identical seed and options give
//! byte-identical output.

use annulus::diagram::{AlgebraElement, Boundary, Generator};
use annulus::par::{self, Execution};
use annulus::spectra::{build_spin_generators, SpinChainParams};
use annulus::trace::{brute_force_partition, lattice_partition, markov_trace_decomposed, markov_trace_direct};
use annulus::LoopWeights;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands::{CheckRow, CsvOut, Outcome};
use crate::config::Config;
use crate::{CliError, Suite, VerifyArgs};

pub const TRACE_TOL: f64 = 1e-10;
pub const LATTICE_TOL: f64 = 1e-10;
pub const RELATION_TOL: f64 = 1e-11;

const LATTICE_CASES: [(usize, usize); 6] = [(2, 1), (2, 2), (4, 1), (4, 2), (4, 3), (6, 2)];

pub fn random_weights(rng: &mut ChaCha8Rng) -> LoopWeights {
    let mut g = || rng.gen_range(-1.5..1.5);
    LoopWeights { n: g(), n1: g(), n2: g(), n12: g(), l: g(), l1: g(), l2: g() }
}

pub fn random_word(rng: &mut ChaCha8Rng, strands: usize, max_len: usize) -> Vec<Generator> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..=strands) {
            0 => Generator::B1,
            i if i == strands => Generator::B2,
            i => Generator::E(i),
        })
        .collect()
}

fn sizes(n: Option<usize>, default: &[usize]) -> Result<Vec<usize>, CliError> {
    match n {
        Some(n) if n >= 2 && n % 2 == 0 => Ok(vec![n]),
        Some(n) => Err(CliError::Invalid(format!("strand count must be even and >= 2, got {n}"))),
        None => Ok(default.to_vec()),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn run(suite: Suite, opts: &VerifyArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let seed: u64 = cfg
        .pick("seed", opts.seed)
        .map_err(CliError::Usage)?
        .ok_or_else(|| CliError::Usage("randomized suites need --seed".into()))?;
    let n = cfg.pick("n", opts.n).map_err(CliError::Usage)?;
    let (name, default_count) = match suite {
        Suite::Trace => ("trace", 200),
        Suite::Lattice => ("lattice", 20),
        Suite::Relations => ("relations", 10),
    };
    let count = cfg.pick_or("count", opts.count, default_count).map_err(CliError::Usage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (header, rows) = match suite {
        Suite::Trace => trace(&mut rng, &sizes(n, &[2, 4, 6])?, count)?,
        Suite::Lattice => lattice(&mut rng, n, count)?,
        Suite::Relations => relations(&mut rng, &sizes(n, &[2, 4, 6])?, count)?,
    };
    let failed = rows.iter().filter(|r| !r.1).count();
    let mut out = Outcome {
        command: format!("verify-{name}"),
        params: json!({"suite": name, "seed": seed, "n": n, "count": count}),
        order: None,
        results: json!({"cases": rows.len(), "failed": failed}),
        tail_bounds: json!({}),
        checks: Vec::new(),
        csv: CsvOut::None,
        csv_primary: true,
    };
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    out.checks.push(CheckRow { name: format!("{name}: all {} cases", rows.len()), pass: failed == 0, delta: worst });
    let mut csv = header.to_string();
    for (line, _, _) in rows {
        csv.push_str(&line);
    }
    out.csv = CsvOut::Single(csv);
    Ok(out)
}

type Rows = (&'static str, Vec<(String, bool, f64)>);

fn trace(rng: &mut ChaCha8Rng, sizes: &[usize], count: usize) -> Result<Rows, CliError> {
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let n = sizes[k % sizes.len()];
        let w = random_weights(rng);
        let word = random_word(rng, n, 8);
        let x = AlgebraElement::word(&word, n, w)?;
        let direct = markov_trace_direct(&x)?;
        let dec = markov_trace_decomposed(&x)?;
        let d = rel(direct, dec);
        let text: Vec<String> = word.iter().map(|g| g.to_string()).collect();
        let pass = d <= TRACE_TOL;
        rows.push((format!("{k},{n},{},{direct:.16e},{dec:.16e},{d:.3e},{pass}\n", text.join(" ")), pass, d));
    }
    Ok(("case,n,word,direct,decomposed,delta,pass\n", rows))
}

fn lattice(rng: &mut ChaCha8Rng, n: Option<usize>, count: usize) -> Result<Rows, CliError> {
    let cases: Vec<(usize, usize)> = LATTICE_CASES.iter().copied().filter(|c| n.is_none_or(|n| c.0 == n)).collect();
    if cases.is_empty() {
        return Err(CliError::Invalid(format!("no lattice cases with N = {}", n.unwrap_or(0))));
    }
    let mut jobs = Vec::new();
    for &(n, l) in &cases {
        jobs.push((n, l, 0, LoopWeights::uniform(1.0)));
        for draw in 1..=count {
            jobs.push((n, l, draw, random_weights(rng)));
        }
    }
    let results = par::map_indexed(Execution::Parallel, jobs.len(), |i| -> annulus::Result<(f64, f64)> {
        let (n, l, _, w) = jobs[i];
        let a = brute_force_partition(n, l, &w, Boundary::TwoBoundary, Execution::Sequential)?;
        let b = lattice_partition(n, l, &w, Boundary::TwoBoundary, Execution::Sequential)?.total;
        Ok((a, b))
    });
    let mut rows = Vec::with_capacity(jobs.len());
    for ((n, l, draw, _), r) in jobs.iter().zip(results) {
        let (a, b) = r?;
        let mut d = rel(a, b);
        if *draw == 0 {
            d = d.max(rel(a, 2f64.powi(((n - 1) * l) as i32)));
        }
        let pass = d <= LATTICE_TOL;
        rows.push((format!("{n},{l},{draw},{a:.16e},{b:.16e},{d:.3e},{pass}\n"), pass, d));
    }
    Ok(("n,rows,draw,brute_force,sectors,delta,pass\n", rows))
}

fn relations(rng: &mut ChaCha8Rng, sizes: &[usize], count: usize) -> Result<Rows, CliError> {
    let mut rows = Vec::new();
    for &n in sizes {
        let mut draw = 0;
        while draw < count {
            let gamma: f64 = rng.gen_range(0.3..1.3);
            let r1: f64 = rng.gen_range(0.3..1.8);
            let r2: f64 = rng.gen_range(0.3..1.8);
            let s1 = rng.gen_range(-1.0..1.0);
            let s2 = rng.gen_range(-1.0..2.0);
            if (r1 * gamma).sin().abs() < 0.05 || (r2 * gamma).sin().abs() < 0.05 {
                continue;
            }
            let p = SpinChainParams::new(n, gamma, r1, r2, s1, s2, 0.5, 0.5)?;
            let res = match build_spin_generators(&p) {
                Ok(g) => g.max_residual,
                Err(annulus::Error::RelationViolated { residual, .. }) => residual,
                Err(e) => return Err(e.into()),
            };
            let pass = res <= RELATION_TOL;
            rows.push((format!("{n},{draw},{gamma:.6},{r1:.6},{r2:.6},{s1:.6},{s2:.6},{res:.3e},{pass}\n"), pass, res));
            draw += 1;
        }
    }
    Ok(("n,draw,gamma,r1,r2,s1,s2,residual,pass\n", rows))
}
