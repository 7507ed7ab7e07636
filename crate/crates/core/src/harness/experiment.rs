//! Batch suites over generated inputs, one record per instance and check.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomposition::{decompose, enumerate_simple, is_k_decomposable};
use crate::error::{invalid, Result};
use crate::gadgets::{find_gadget_violations, GadgetMode};
use crate::generators::{gen_avoiding, gen_k_decomposable, gen_perturbed_grid, gen_preorder, gen_sequential, rng};
use crate::geometry::is_satisfied_set;
use crate::greedy::{run_greedy, run_greedy_sided, Side};
use crate::invariants::check_hidden;
use crate::opt::{decomposition_lower_bound_check, hardness_survey, merge_sequence, split_satisfied_construction, split_sequence, OptLimits};
use crate::patterns::{alt, cap, contains, inc, perm_contains, PatternMatrix};
use crate::perm::{all_permutations, format_list};
use crate::rgreedy::decomposition_bound;
use crate::sequence::AccessSequence;
use crate::tree::InitialTree;

pub const SUITES: &[&str] = &[
    "preorder-bound",
    "sequential",
    "decomp-theorem",
    "input-revealing",
    "gadget-capture",
    "opt-decomp",
    "split",
    "k-decomp-simple",
    "perturbed",
    "hidden",
    "hardness",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub suite: String,
    pub alg: String,
    pub class: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub cost: f64,
    pub rhs: Option<f64>,
    pub pass: bool,
    pub ms: f64,
}

impl Record {
    fn key(&self) -> (&str, &str, &str, usize, usize, u64) {
        (&self.suite, &self.alg, &self.class, self.n, self.k, self.seed)
    }
}

/// Empty lists mean the suite's own defaults.
#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    /// Instances per `(n, k)` for sampled suites.
    pub seeds: Option<u64>,
    pub base_seed: u64,
    pub node_cap: u64,
    pub time_cap: Option<Duration>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            ns: Vec::new(),
            ks: Vec::new(),
            seeds: None,
            base_seed: 0,
            node_cap: crate::gadgets::DEFAULT_NODE_CAP,
            time_cap: None,
        }
    }
}

impl SuiteParams {
    fn ns(&self, default: &[usize]) -> Vec<usize> {
        if self.ns.is_empty() { default.to_vec() } else { self.ns.clone() }
    }
    fn ks(&self, default: &[usize]) -> Vec<usize> {
        if self.ks.is_empty() { default.to_vec() } else { self.ks.clone() }
    }
    fn seeds(&self, default: u64) -> u64 {
        self.seeds.unwrap_or(default)
    }
    fn opt_limits(&self) -> OptLimits {
        OptLimits { node_cap: self.node_cap, time_cap: self.time_cap, ..Default::default() }
    }
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<Record>> + Send + Sync + 'a>;

struct Rec<'a> {
    suite: &'a str,
    start: Instant,
}

impl Rec<'_> {
    #[allow(clippy::too_many_arguments)]
    fn make(&self, alg: &str, class: &str, n: usize, k: usize, seed: u64, cost: f64, rhs: Option<f64>, pass: bool) -> Record {
        Record {
            suite: self.suite.into(),
            alg: alg.into(),
            class: class.into(),
            n,
            k,
            seed,
            cost,
            rhs,
            pass,
            ms: self.start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

fn timer(suite: &str) -> Rec<'_> {
    Rec { suite, start: Instant::now() }
}

fn instance_seed(base: u64, n: usize, k: usize, i: u64) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (n as u64).wrapping_mul(1_000_003)
        ^ (k as u64).wrapping_mul(7919)
        ^ i
}

fn jobs_for<'a>(suite: &'a str, p: &'a SuiteParams) -> Result<Vec<Job<'a>>> {
    let mut jobs: Vec<Job<'a>> = Vec::new();
    match suite {
        "preorder-bound" => {
            for n in p.ns(&[16, 64, 256, 1024]) {
                for i in 0..p.seeds(500) {
                    let seed = instance_seed(p.base_seed, n, 0, i);
                    jobs.push(Box::new(move || {
                        let r = timer(suite);
                        let (x, _) = gen_preorder(n, seed)?;
                        let c = run_greedy(&x, None)?.cost();
                        let rhs = 4 * n;
                        Ok(vec![r.make("greedy", "preorder", n, 0, seed, c as f64, Some(rhs as f64), c <= rhs)])
                    }));
                }
            }
        }
        "sequential" => {
            let ns = if p.ns.is_empty() { (1..=4096).collect() } else { p.ns.clone() };
            for n in ns {
                jobs.push(Box::new(move || {
                    let r = timer(suite);
                    let c = run_greedy(&gen_sequential(n), None)?.cost();
                    let rhs = 2 * n - 1;
                    Ok(vec![r.make("greedy", "sequential", n, 0, 0, c as f64, Some(rhs as f64), c == rhs)])
                }));
            }
        }
        "decomp-theorem" => {
            for n in p.ns(&[256, 1024, 4096]) {
                for k in p.ks(&[2, 3, 4]) {
                    for i in 0..p.seeds(50) {
                        let seed = instance_seed(p.base_seed, n, k, i);
                        jobs.push(Box::new(move || {
                            let r = timer(suite);
                            let (x, tree) = gen_k_decomposable(n, k, seed)?;
                            let (b, trace) = decomposition_bound(&x, &tree)?;
                            let bound = r.make("rgreedy", "k-decomposable", n, k, seed, b.lhs as f64, Some(b.rhs as f64), b.holds());
                            let r = timer(suite);
                            let sat = is_satisfied_set(&trace.touch_grid());
                            let feasible = r.make("rgreedy-verify", "k-decomposable", n, k, seed, b.lhs as f64, None, sat);
                            Ok(vec![bound, feasible])
                        }));
                    }
                }
            }
        }
        "input-revealing" => {
            let ns = p.ns(&[24]);
            let max_n = ns.iter().copied().max().unwrap_or(24).max(3);
            for pat in all_permutations(3) {
                for i in 0..p.seeds(100) {
                    let pat = pat.clone();
                    let seed = instance_seed(p.base_seed, 3, 0, i) ^ (pat[0] * 10 + pat[1]) as u64;
                    jobs.push(Box::new(move || input_revealing(suite, &pat, max_n, seed, p.node_cap)));
                }
            }
        }
        "gadget-capture" => {
            let ns = p.ns(&[32]);
            let max_n = ns.iter().copied().max().unwrap_or(32).max(4);
            let kmax = p.ks(&[3]).into_iter().max().unwrap_or(3);
            for i in 0..p.seeds(100) {
                let seed = instance_seed(p.base_seed, max_n, kmax, i);
                jobs.push(Box::new(move || gadget_random(suite, max_n, kmax, seed, p.node_cap)));
            }
            for i in 0..p.seeds(100).div_ceil(2) {
                let seed = instance_seed(p.base_seed, 16, 2, i);
                jobs.push(Box::new(move || {
                    let r = timer(suite);
                    let n = rng(seed).gen_range(6..=16);
                    let (x, _) = gen_k_decomposable(n, 2, seed)?;
                    let trace = run_greedy(&x, None)?;
                    let g = PatternMatrix::from_perm(&alt(6))?;
                    let v = find_gadget_violations(&trace, &g, GadgetMode::Capture, p.node_cap)?;
                    Ok(vec![r.make("greedy", "alt:6/capture", n, 2, seed, v.len() as f64, None, v.is_empty())])
                }));
            }
        }
        "opt-decomp" => {
            for n in p.ns(&[5]) {
                for (i, perm) in all_permutations(n).into_iter().enumerate() {
                    let limits = p.opt_limits();
                    jobs.push(Box::new(move || {
                        let r = timer(suite);
                        let tree = decompose(&perm)?;
                        let (whole, rhs) = decomposition_lower_bound_check(&perm, &tree, &limits)?;
                        Ok(vec![r.make("opt", "all", n, 0, i as u64, whole as f64, Some(rhs as f64), whole as i64 >= rhs)])
                    }));
                }
            }
        }
        "split" => {
            for i in 0..p.seeds(200) {
                let seed = instance_seed(p.base_seed, 8, 12, i);
                jobs.push(Box::new(move || {
                    let r = timer(suite);
                    let mut g = rng(seed);
                    let n = g.gen_range(1..=8);
                    let (x, m) = loop {
                        let m = g.gen_range(2..=12);
                        let keys: Vec<usize> = (0..m).map(|_| g.gen_range(1..=n)).collect();
                        let x = AccessSequence::new(n, keys)?;
                        if !x.is_permutation() {
                            break (x, m);
                        }
                    };
                    let (sp, map) = split_sequence(&x);
                    let round = merge_sequence(&sp, &map, n)? == x;
                    let y = run_greedy(&x, None)?.touch_grid();
                    let s = split_satisfied_construction(&x, &y)?;
                    let rhs = 2 * y.weight() + 2 * m;
                    let w = s.grid.weight();
                    let ok = round && is_satisfied_set(&s.grid) && w <= rhs;
                    Ok(vec![r.make("split", "repeats", n, m, seed, w as f64, Some(rhs as f64), ok)])
                }));
            }
        }
        "k-decomp-simple" => {
            for n in p.ns(&[6]) {
                for k in p.ks(&[2, 3, 4]) {
                    jobs.push(Box::new(move || {
                        let r = timer(suite);
                        let mut simples = enumerate_simple(k + 1)?;
                        simples.extend(enumerate_simple(k + 2)?);
                        let mut mismatches = 0usize;
                        for perm in all_permutations(n) {
                            let dec = is_k_decomposable(&perm, k)?;
                            let avoids = simples.iter().all(|s| !perm_contains(&perm, s));
                            mismatches += usize::from(dec != avoids);
                        }
                        Ok(vec![r.make("decompose", "all", n, k, 0, mismatches as f64, None, mismatches == 0)])
                    }));
                }
            }
        }
        "perturbed" => {
            jobs.push(Box::new(move || {
                let r = timer(suite);
                let x = gen_perturbed_grid(3)?;
                let touch = run_greedy(&x, None)?.touch_grid();
                let found = all_permutations(3)
                    .iter()
                    .filter(|q| contains(&touch, &PatternMatrix::from_perm(q).expect("perm")))
                    .count();
                Ok(vec![r.make("greedy", "perturbed-s3", 9, 3, 0, found as f64, Some(6.0), found == 6)])
            }));
            for l in p.ns(&[8, 16, 32]) {
                jobs.push(Box::new(move || {
                    let r = timer(suite);
                    let x = gen_perturbed_grid(l)?;
                    let n = l * l;
                    let c = run_greedy(&x, None)?.cost();
                    Ok(vec![r.make("greedy", "perturbed", n, l, 0, c as f64, Some(6.0 * n as f64), c <= 6 * n)])
                }));
            }
        }
        "hidden" => {
            for n in p.ns(&[1, 2, 3, 4, 5, 6, 7]) {
                jobs.push(Box::new(move || {
                    let r = timer(suite);
                    let mut bad = 0usize;
                    for perm in all_permutations(n) {
                        bad += usize::from(hidden_fails(&perm, None)?);
                    }
                    Ok(vec![r.make("greedy", "empty", n, 0, 0, bad as f64, None, bad == 0)])
                }));
                if n <= 5 {
                    jobs.push(Box::new(move || {
                        let r = timer(suite);
                        let mut bad = 0usize;
                        let shapes = InitialTree::all_shapes(n);
                        for perm in all_permutations(n) {
                            for t in &shapes {
                                bad += usize::from(hidden_fails(&perm, Some(t))?);
                            }
                        }
                        Ok(vec![r.make("greedy", "all-trees", n, 0, 0, bad as f64, None, bad == 0)])
                    }));
                }
            }
        }
        "hardness" => {
            for n in p.ns(&[512]) {
                let samples = p.seeds(100) as usize;
                let limits = p.opt_limits();
                jobs.push(Box::new(move || {
                    let r = timer(suite);
                    let s = hardness_survey(n, samples, p.base_seed, &limits)?;
                    let ok = s.mean > 0.0 && s.max <= 5.0;
                    Ok(vec![r.make("sgreedy", "random", n, 0, p.base_seed, s.mean, Some(5.0), ok)])
                }));
            }
        }
        other => return invalid(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", "))),
    }
    Ok(jobs)
}

fn hidden_fails(perm: &[usize], t: Option<&InitialTree>) -> Result<bool> {
    let x = AccessSequence::from_perm(perm.to_vec())?;
    Ok(check_hidden(&run_greedy(&x, t)?, Side::Both).is_err())
}

fn input_revealing(suite: &str, pat: &[usize], max_n: usize, seed: u64, node_cap: u64) -> Result<Vec<Record>> {
    let mut g = rng(seed);
    let n = g.gen_range(3..=max_n);
    let x = gen_avoiding(pat, n, seed)?;
    let tree = InitialTree::random(n, &mut g)?;
    let class = format!("avoid-{}", format_list(pat).replace(',', ""));
    let p = PatternMatrix::from_perm(pat)?;
    let checks = [
        (Side::Both, "greedy", p.tensor(&cap())),
        (Side::Right, "greedy-right", p.tensor(&PatternMatrix::from_perm(&[1, 2])?)),
        (Side::Left, "greedy-left", p.tensor(&PatternMatrix::from_perm(&[2, 1])?)),
    ];
    let mut out = Vec::new();
    for (side, alg, needle) in checks {
        let r = timer(suite);
        let trace = run_greedy_sided(&x, Some(&tree), side)?;
        let hay = trace.touch_grid();
        let mut hit = false;
        let mut e = crate::patterns::Embedder::new(&hay, &needle);
        e.node_cap = node_cap;
        let _ = e.run(&mut |_: &[crate::geometry::Point]| {
            hit = true;
            std::ops::ControlFlow::Break(())
        })?;
        out.push(r.make(alg, &class, n, 0, seed, trace.cost() as f64, None, !hit));
    }
    Ok(out)
}

fn gadget_random(suite: &str, max_n: usize, kmax: usize, seed: u64, node_cap: u64) -> Result<Vec<Record>> {
    let mut g = rng(seed);
    let n = g.gen_range(4..=max_n);
    let x = AccessSequence::from_perm(crate::generators::gen_random_permutation(n, seed).keys().to_vec())?;
    let tree = InitialTree::random(n, &mut g)?;
    let mut gadgets: Vec<(String, PatternMatrix, GadgetMode)> = vec![("cap/capture".into(), cap(), GadgetMode::Capture)];
    for k in 1..=kmax {
        gadgets.push((format!("inc:{}/increasing:{k}", k + 1), PatternMatrix::from_perm(&inc(k + 1))?, GadgetMode::Increasing(k)));
    }
    let mut out = Vec::new();
    for (alg, t) in [("greedy", None), ("greedy-tree", Some(&tree))] {
        let trace = run_greedy(&x, t)?;
        for (class, gadget, mode) in &gadgets {
            let r = timer(suite);
            let v = find_gadget_violations(&trace, gadget, *mode, node_cap)?;
            out.push(r.make(alg, class, n, 0, seed, v.len() as f64, None, v.is_empty()));
        }
    }
    Ok(out)
}

/// Runs a suite with independent instances spread over the rayon pool.
/// Records come back sorted by `(suite, alg, class, n, k, seed)`.
pub fn run_suite(suite: &str, params: &SuiteParams) -> Result<Vec<Record>> {
    let jobs = jobs_for(suite, params)?;
    let batches: Vec<Vec<Record>> = jobs.par_iter().map(|j| j()).collect::<Result<_>>()?;
    let mut records: Vec<Record> = batches.into_iter().flatten().collect();
    records.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(records)
}

pub const CSV_HEADER: &str = "suite,alg,class,n,k,seed,cost,rhs,pass,ms";

fn num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 { format!("{}", v as i64) } else { format!("{v:.6}") }
}

pub fn to_csv(records: &[Record]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{:.3}\n",
            r.suite,
            r.alg,
            r.class,
            r.n,
            r.k,
            r.seed,
            num(r.cost),
            r.rhs.map(num).unwrap_or_default(),
            r.pass,
            r.ms
        ));
    }
    s
}

pub fn to_json_lines(records: &[Record]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("plain record") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let p = SuiteParams { ns: vec![16], seeds: Some(3), ..Default::default() };
        let recs = run_suite("preorder-bound", &p).unwrap();
        assert_eq!(recs.len(), 3);
        let csv = to_csv(&recs);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
        assert!(recs.iter().all(|r| r.pass));
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &SuiteParams::default()).is_err());
    }
}
