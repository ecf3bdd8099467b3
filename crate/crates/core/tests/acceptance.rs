//! The ten acceptance criteria, one pass/fail line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use endocalc_core::harness::corpus::{self, FieldExpectation};
use endocalc_core::harness::{emit_report, run_suite};
use endocalc_core::{Caps, FgAbGroup, Int, Subgroup, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Gcd of all `k × k` minors.
fn divisor(rows: &[Vec<i128>], k: usize) -> i128 {
    let cols = rows[0].len();
    let mut g = 0;
    for rs in subsets(rows.len(), k) {
        for cs in subsets(cols, k) {
            let m: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| rows[r][c]).collect()).collect();
            g = gcd(g, det(&m));
        }
    }
    g
}

fn rank(rows: &[Vec<i128>]) -> usize {
    let bound = rows.len().min(rows[0].len());
    (1..=bound).rev().find(|&k| divisor(rows, k) != 0).unwrap_or(0)
}

/// Coefficients of the linear form `v ↦ det` of the minor on rows `rs`
/// (with `v` appended as the last row) and columns `cs`.
fn linear_minor(rows: &[Vec<i128>], rs: &[usize], cs: &[usize], n: usize) -> Vec<i128> {
    let k = cs.len();
    let mut coeffs = vec![0; n];
    for (j, &c) in cs.iter().enumerate() {
        let m: Vec<Vec<i128>> =
            rs.iter().map(|&r| cs.iter().filter(|&&x| x != c).map(|&x| rows[r][x]).collect()).collect();
        let sign = if (k - 1 + j).is_multiple_of(2) { 1 } else { -1 };
        coeffs[c] = sign * det(&m);
    }
    coeffs
}

/// `v` lies in the row lattice exactly when adding it keeps the rank and the
/// gcd of the maximal minors. Minors through `v` are linear in `v`, so both
/// conditions become linear forms.
struct Oracle {
    /// Forms that vanish exactly on the rational span.
    span: Vec<Vec<i128>>,
    /// Forms whose values must be divisible by `divisor`.
    lattice: Vec<Vec<i128>>,
    divisor: i128,
}

impl Oracle {
    fn new(rows: Vec<Vec<i128>>) -> Oracle {
        let n = rows[0].len();
        let rank = rank(&rows);
        let divisor = if rank == 0 { 1 } else { divisor(&rows, rank) };
        let forms = |k: usize| -> Vec<Vec<i128>> {
            if k > n {
                return Vec::new();
            }
            subsets(rows.len(), k - 1)
                .iter()
                .flat_map(|rs| subsets(n, k).into_iter().map(|cs| linear_minor(&rows, rs, &cs, n)).collect::<Vec<_>>())
                .collect()
        };
        let span = forms(rank + 1);
        let lattice = if rank == 0 { Vec::new() } else { forms(rank) };
        Oracle { span, lattice, divisor }
    }

    fn contains(&self, v: &[i128]) -> bool {
        let eval = |f: &Vec<i128>| f.iter().zip(v).map(|(a, b)| a * b).sum::<i128>();
        self.span.iter().all(|f| eval(f) == 0) && self.lattice.iter().all(|f| eval(f) % self.divisor == 0)
    }
}

fn normal_form_oracle() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut points = 0u64;
    for trial in 0..1000 {
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=3);
        let raw: Vec<Vec<i128>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect()).collect();
        let to_vec = |row: &[i128]| -> Vector { row.iter().map(|&x| Int::from(x)).collect() };
        let a = FgAbGroup::free(n);
        let b = Subgroup::generated(&a, &raw.iter().map(|row| to_vec(row)).collect::<Vec<_>>()).unwrap();
        let oracle = Oracle::new(raw.clone());
        let side = 33usize;
        for code in 0..side.pow(n as u32) {
            let mut c = code;
            let v: Vec<i128> = (0..n)
                .map(|_| {
                    let x = (c % side) as i128 - 16;
                    c /= side;
                    x
                })
                .collect();
            points += 1;
            if b.contains(&to_vec(&v)) != oracle.contains(&v) {
                return (false, format!("matrix {trial} {raw:?} disagrees at {v:?}"));
            }
        }
        // A unimodular change of generators must give the same canonical form.
        let mut mixed = raw.clone();
        if r >= 2 {
            let k = rng.gen_range(-3..=3);
            for j in 0..n {
                mixed[0][j] += k * raw[1][j];
            }
            mixed.swap(0, 1);
        }
        let again = Subgroup::generated(&a, &mixed.iter().map(|row| to_vec(row)).collect::<Vec<_>>()).unwrap();
        if again != b {
            return (false, format!("matrix {trial} {raw:?} changes form under row operations"));
        }
    }
    (true, format!("1000 matrices, {points} box points"))
}

fn suite(name: &str, trials: usize) -> (bool, String) {
    match run_suite(name, SEED, trials, &Caps::default()) {
        Ok(r) => {
            let ok = r.as_expected();
            let head = r.failures.first().map(|f| format!(" first: {}", f.claim)).unwrap_or_default();
            (ok, format!("{name}: {} checks, {} failures{head}", r.checks, r.failures.len()))
        }
        Err(e) => (false, format!("{name}: {e}")),
    }
}

fn all(parts: Vec<(bool, String)>) -> (bool, String) {
    let ok = parts.iter().all(|(ok, _)| *ok);
    (ok, parts.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join("; "))
}

fn stored_counterexample_reproduces() -> (bool, String) {
    let caps = Caps::default();
    let a = run_suite("L1-right-distributivity-equality", SEED, 20, &caps).unwrap();
    let b = run_suite("L1-right-distributivity-equality", SEED, 20, &caps).unwrap();
    let stored = a.failures.iter().any(|f| f.trial.is_none());
    let same = emit_report(&a) == emit_report(&b);
    (stored && same && a.as_expected(), format!("stored equality failure reproduced: {stored}, byte-identical rerun: {same}"))
}

fn curated_quotients_cover_both_verdicts() -> (bool, String) {
    let cases = corpus::quotient_cases();
    let accepted = cases.iter().filter(|c| c.accepted).count();
    let ok = accepted > 0 && accepted < cases.len();
    (ok, format!("{accepted} accepted and {} rejected curated quotients", cases.len() - accepted))
}

fn curated_projection_count() -> (bool, String) {
    let n = corpus::projection_cases().len();
    (n >= 10, format!("{n} curated decomposition instances"))
}

fn curated_fields() -> (bool, String) {
    let orders: Vec<usize> = corpus::field_cases()
        .iter()
        .filter_map(|c| match c.expected {
            FieldExpectation::Order(n) => Some(n),
            FieldExpectation::NotMinimal => None,
        })
        .collect();
    let ok = orders.contains(&4) && orders.contains(&25);
    (ok, format!("field orders expected: {orders:?}"))
}

struct Criterion {
    id: usize,
    text: &'static str,
    limit: Option<Duration>,
    run: fn() -> (bool, String),
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, text: "normal-form oracle", limit: Some(Duration::from_secs(30)), run: normal_form_oracle },
        Criterion {
            id: 2,
            text: "left and right distributivity",
            limit: Some(Duration::from_secs(60)),
            run: || all(vec![suite("L1-distributivity", 300), stored_counterexample_reproduces()]),
        },
        Criterion {
            id: 3,
            text: "congruence and sharp commutant closure",
            limit: None,
            run: || all(vec![suite("L2-ring", 200), suite("L3-csharp", 200)]),
        },
        Criterion {
            id: 4,
            text: "propagation, restriction, katakernels",
            limit: None,
            run: || {
                all(vec![suite("L4-propagation", 100), suite("L5/6-restriction-kat", 100), suite("L14/15-global", 100)])
            },
        },
        Criterion { id: 5, text: "rank additivity", limit: None, run: || suite("L7-rank", 500) },
        Criterion {
            id: 6,
            text: "near-ring laws and flat commutant closure",
            limit: None,
            run: || all(vec![suite("Q6-nearring", 200), suite("L13-cflat", 200)]),
        },
        Criterion {
            id: 7,
            text: "quotient action",
            limit: None,
            run: || all(vec![suite("L19-quotient", 100), curated_quotients_cover_both_verdicts()]),
        },
        Criterion {
            id: 8,
            text: "quasi-projections and line decompositions",
            limit: Some(Duration::from_secs(120)),
            run: || all(vec![curated_projection_count(), suite("L10-projection", 0)]),
        },
        Criterion {
            id: 9,
            text: "field reconstruction",
            limit: Some(Duration::from_secs(5)),
            run: || all(vec![curated_fields(), suite("Z11-field", 0)]),
        },
        Criterion {
            id: 10,
            text: "perturbation rank identity and common multiples",
            limit: None,
            run: || all(vec![suite("S9-perturbation", 200), suite("A3-ore", 0)]),
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let (ok, detail) = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed < l);
        let limit = c.limit.map(|l| format!(" < {}s", l.as_secs())).unwrap_or_default();
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {} ({:.2}s{limit}) {detail}", c.id, c.text, elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
