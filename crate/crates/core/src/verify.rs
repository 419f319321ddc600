//! Named invariant suites.
//!
//! Each suite is a list of independent checks. Checks run under the chosen
//! [`Exec`] policy but are always reported in their canonical order. Exact
//! checks pass only with a zero residual; numeric checks compare the
//! largest absolute deviation against the configured tolerance.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grouping::{continuous_oracle, discrete_oracle, joint_discrete_oracle, DensityOracle, JointLatticeDist, LatticeDist};
use crate::multivariate::{correct_mv, uncorrect_mv, AxisSpecs, MomentTensor};
use crate::scalar::{binomial_table, format_rational, integer, rational, Rational};
use crate::umbral::{
    bernoulli_numbers, bernoulli_polynomial, centered_uniform_moments, convolve, integrate_01,
    inverse_bernoulli_moments, multiplication_theorem_residual, sheppard_coeffs, shift, MomentSeq,
};
use crate::univariate::{
    correct, correct_continuous, correction_matrix, is_identity, uncorrect, uncorrect_continuous, Direction,
    GroupingSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Bernoulli,
    Identities,
    RoundTrip,
    Sheppard,
    OracleDiscrete,
    OracleContinuous,
    Limit,
    Multivariate,
    All,
}

impl Suite {
    pub const NAMED: [Suite; 8] = [
        Suite::Bernoulli,
        Suite::Identities,
        Suite::RoundTrip,
        Suite::Sheppard,
        Suite::OracleDiscrete,
        Suite::OracleContinuous,
        Suite::Limit,
        Suite::Multivariate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bernoulli => "bernoulli",
            Suite::Identities => "identities",
            Suite::RoundTrip => "roundtrip",
            Suite::Sheppard => "sheppard",
            Suite::OracleDiscrete => "oracle-discrete",
            Suite::OracleContinuous => "oracle-continuous",
            Suite::Limit => "limit",
            Suite::Multivariate => "multivariate",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::NAMED
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    /// Largest absolute exact deviation.
    Exact(Rational),
    /// Largest absolute float deviation.
    Numeric(f64),
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(r) => write!(f, "exact {}", format_rational(r)),
            Residual::Numeric(x) => write!(f, "numeric {x:.3e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub residual: Residual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {}/{}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.residual
            ));
        }
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            self.failures()
        ));
        out
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let residual = match &c.residual {
                    Residual::Exact(r) => json!({ "kind": "exact", "value": format_rational(r) }),
                    Residual::Numeric(x) => json!({ "kind": "numeric", "value": x }),
                };
                json!({ "suite": c.suite, "name": c.name, "passed": c.passed, "residual": residual })
            })
            .collect();
        json!({ "passed": self.passed(), "failures": self.failures(), "checks": checks })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Tolerance for numeric (quadrature) checks.
    pub tol: f64,
    pub exec: Exec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, tol: 1e-8, exec: Exec::default() }
    }
}

type CheckFn = Box<dyn Fn(&VerifyConfig) -> Check + Send + Sync>;

fn exact(suite: &'static str, name: impl Into<String>, residual: Rational) -> Check {
    Check { suite, name: name.into(), passed: residual.is_zero(), residual: Residual::Exact(residual) }
}

fn numeric(suite: &'static str, name: impl Into<String>, residual: f64, tol: f64) -> Check {
    Check { suite, name: name.into(), passed: residual <= tol, residual: Residual::Numeric(residual) }
}

fn max_abs_diff(a: &[Rational], b: &[Rational]) -> Rational {
    let len_gap = if a.len() == b.len() { Rational::zero() } else { Rational::one() };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(len_gap, |acc, d| if d > acc { d } else { acc })
}

fn max_abs_diff_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(values: impl IntoIterator<Item = Rational>) -> Rational {
    values.into_iter().map(|v| v.abs()).fold(Rational::zero(), |acc, d| if d > acc { d } else { acc })
}

/// Random rational `p/q` with `|p| ≤ 50`, `1 ≤ q ≤ 20`.
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    rational(rng.random_range(-50..=50), rng.random_range(1..=20))
}

/// Random positive rational in `(0, 10]`.
pub fn random_width(rng: &mut impl Rng) -> Rational {
    rational(rng.random_range(1..=200), rng.random_range(1..=20))
}

pub fn random_sequence(rng: &mut impl Rng, max_order: usize) -> MomentSeq {
    let mut v = vec![Rational::one()];
    v.extend((0..max_order).map(|_| random_rational(rng)));
    MomentSeq::new(v).expect("unital")
}

/// Random lattice distribution with up to `max_points` distinct support
/// points in `-6..=6` and positive rational weights.
pub fn random_lattice(rng: &mut impl Rng, h: Rational, m: u32, max_points: usize) -> LatticeDist {
    let k = rng.random_range(1..=max_points);
    let mut support: Vec<i64> = Vec::with_capacity(k);
    while support.len() < k {
        let s = rng.random_range(-6..=6);
        if !support.contains(&s) {
            support.push(s);
        }
    }
    let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    let probs = weights.iter().map(|&w| rational(w, total)).collect();
    LatticeDist::new(h, m, support, probs).expect("valid lattice")
}

/// Random correlated joint table on a `rows × cols` grid.
pub fn random_joint_table(rng: &mut impl Rng, axes: Vec<(Rational, u32)>, rows: usize, cols: usize) -> JointLatticeDist {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let w: i64 = rng.random_range(0..=9);
            if w > 0 || (i == 0 && j == 0) {
                points.push(vec![i as i64 - (rows / 2) as i64, j as i64 - (cols / 2) as i64]);
                weights.push(w.max(1));
            }
        }
    }
    let total: i64 = weights.iter().sum();
    JointLatticeDist::new(axes, points, weights.iter().map(|&w| rational(w, total)).collect()).expect("valid table")
}

fn bernoulli_checks() -> Vec<CheckFn> {
    const S: &str = "bernoulli";
    vec![
        Box::new(|_| {
            let b = bernoulli_numbers(20);
            let binom = binomial_table(21);
            let res = max_abs((1..=20).map(|k| (0..=k).map(|i| &binom[k + 1][i] * &b[i]).sum()));
            exact(S, "recurrence B0..B20", res)
        }),
        Box::new(|_| {
            let b = bernoulli_numbers(20);
            exact(S, "odd B3..B19 vanish", max_abs((1..10).map(|n| b[2 * n + 1].clone())))
        }),
        Box::new(|_| exact(S, "B12 = -691/2730", (&bernoulli_numbers(12)[12] - rational(-691, 2730)).abs())),
        Box::new(|_| {
            exact(S, "unit-interval mean of B1(x)..B20(x)", max_abs((1..=20).map(|n| integrate_01(&bernoulli_polynomial(n)))))
        }),
    ]
}

fn identity_checks() -> Vec<CheckFn> {
    const S: &str = "identities";
    vec![
        Box::new(|_| {
            let lhs = shift(&bernoulli_numbers(20), &rational(1, 2));
            exact(S, "moments of iota + 1/2", max_abs_diff(lhs.values(), sheppard_coeffs(20).values()))
        }),
        Box::new(|_| {
            let lhs = shift(&inverse_bernoulli_moments(20), &rational(-1, 2));
            exact(S, "moments of -1.iota - 1/2", max_abs_diff(lhs.values(), centered_uniform_moments(20).values()))
        }),
        Box::new(|_| {
            let c = convolve(&bernoulli_numbers(20), &inverse_bernoulli_moments(20));
            exact(S, "iota + (-1.iota) = epsilon", max_abs_diff(c.values(), MomentSeq::augmentation(20).values()))
        }),
        Box::new(|_| {
            let c = convolve(&sheppard_coeffs(20), &centered_uniform_moments(20));
            exact(S, "(iota + 1/2) + (-1.iota - 1/2) = epsilon", max_abs_diff(c.values(), MomentSeq::augmentation(20).values()))
        }),
        Box::new(|_| {
            let res = max_abs((0..=8).flat_map(|n| {
                (1..=4).flat_map(move |m| multiplication_theorem_residual(n, m).coefficients().to_vec())
            }));
            exact(S, "multiplication theorem n<=8, m<=4", res)
        }),
    ]
}

fn round_trip_checks() -> Vec<CheckFn> {
    const S: &str = "roundtrip";
    let mut checks: Vec<CheckFn> = Vec::new();
    let modes: [Option<u32>; 6] = [None, Some(1), Some(2), Some(3), Some(5), Some(8)];
    for (slot, mode) in modes.into_iter().enumerate() {
        checks.push(Box::new(move |cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(slot as u64);
            let mut worst = Rational::zero();
            for _ in 0..200 {
                let a = random_sequence(&mut rng, 12);
                let h = random_width(&mut rng);
                let spec = match mode {
                    None => GroupingSpec::continuous(h),
                    Some(m) => GroupingSpec::discrete(h, m),
                }
                .expect("valid spec");
                let back = correct(&uncorrect(&a, &spec), &spec);
                let fwd = uncorrect(&correct(&a, &spec), &spec);
                worst = worst.max(max_abs_diff(back.values(), a.values())).max(max_abs_diff(fwd.values(), a.values()));
            }
            let name = match mode {
                None => "200 random sequences, continuous".to_owned(),
                Some(m) => format!("200 random sequences, discrete m={m}"),
            };
            exact(S, name, worst)
        }));
    }
    checks.push(Box::new(|cfg| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(99);
        let mut ok = true;
        for mode in [None, Some(2), Some(5)] {
            let h = random_width(&mut rng);
            let spec = match mode {
                None => GroupingSpec::continuous(h),
                Some(m) => GroupingSpec::discrete(h, m),
            }
            .expect("valid spec");
            let to_raw = correction_matrix(&spec, 12, Direction::ToRaw);
            let to_grouped = correction_matrix(&spec, 12, Direction::ToGrouped);
            ok &= is_identity(&to_raw.product(&to_grouped)) && is_identity(&to_grouped.product(&to_raw));
        }
        exact(S, "ToRaw x ToGrouped = I (N=12)", if ok { Rational::zero() } else { Rational::one() })
    }));
    checks
}

fn sheppard_checks() -> Vec<CheckFn> {
    const S: &str = "sheppard";
    vec![
        Box::new(|_| {
            let l = correction_matrix(&GroupingSpec::continuous(integer(1)).expect("h > 0"), 4, Direction::ToRaw);
            let expected = [
                (2, 0, rational(-1, 12)),
                (2, 1, Rational::zero()),
                (4, 2, rational(-1, 2)),
                (4, 0, rational(7, 240)),
                (4, 1, Rational::zero()),
                (4, 3, Rational::zero()),
            ];
            let res = max_abs(expected.iter().map(|(n, k, v)| l.entry(*n, *k) - v));
            exact(S, "coefficients -1/12, -1/2, 7/240", res)
        }),
        Box::new(|cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let a = random_sequence(&mut rng, 6);
            let h = random_width(&mut rng);
            let raw = correct_continuous(&a, &h).expect("h > 0");
            let grouped = uncorrect_continuous(&a, &h).expect("h > 0");
            exact(S, "mean is preserved", (&raw[1] - &a[1]).abs() + (&grouped[1] - &a[1]).abs())
        }),
    ]
}

fn discrete_oracle_checks() -> Vec<CheckFn> {
    const S: &str = "oracle-discrete";
    let mut checks: Vec<CheckFn> = Vec::new();
    for m in [1u32, 2, 3, 5] {
        checks.push(Box::new(move |cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(u64::from(m));
            let mut worst = Rational::zero();
            for _ in 0..12 {
                let h = random_width(&mut rng);
                let dist = random_lattice(&mut rng, h.clone(), m, 7);
                let (raw, grouped) = discrete_oracle(&dist, 8);
                let spec = dist.spec();
                worst = worst
                    .max(max_abs_diff(correct(&grouped, &spec).values(), raw.values()))
                    .max(max_abs_diff(uncorrect(&raw, &spec).values(), grouped.values()));
                if m == 1 {
                    worst = worst.max(max_abs_diff(raw.values(), grouped.values()));
                }
            }
            exact(S, format!("12 lattice distributions, m={m}, n<=8"), worst)
        }));
    }
    checks
}

fn continuous_oracle_checks() -> Vec<CheckFn> {
    const S: &str = "oracle-continuous";
    let densities: [(&str, fn() -> Result<DensityOracle>); 3] = [
        ("uniform(-1, 2)", || DensityOracle::uniform(-1.0, 2.0)),
        ("triangular(-1, 0.5, 2)", || DensityOracle::triangular(-1.0, 0.5, 2.0)),
        ("truncated normal(0.3, 1; -2, 2.5)", || DensityOracle::truncated_normal(0.3, 1.0, -2.0, 2.5)),
    ];
    let mut checks: Vec<CheckFn> = Vec::new();
    for (label, make) in densities {
        for h in [rational(1, 10), rational(1, 2), integer(1)] {
            checks.push(Box::new(move |cfg| {
                let name = format!("{label}, h={}", format_rational(&h));
                let density = match make() {
                    Ok(d) => d,
                    Err(_) => return numeric(S, name, f64::INFINITY, cfg.tol),
                };
                match continuous_oracle(&density, crate::scalar::Scalar::to_f64(&h), 6) {
                    Ok(out) => {
                        let predicted = uncorrect_continuous(&out.raw, &h).expect("h > 0");
                        let recovered = correct_continuous(&out.grouped, &h).expect("h > 0");
                        let res = max_abs_diff_f64(predicted.values(), out.grouped.values())
                            .max(max_abs_diff_f64(recovered.values(), out.raw.values()));
                        numeric(S, name, res, cfg.tol)
                    }
                    Err(_) => numeric(S, name, f64::INFINITY, cfg.tol),
                }
            }));
        }
    }
    checks
}

/// Deviation `L_discrete(m)[n][k] − L_continuous[n][k]` for every entry
/// with `n ≤ max_order`.
pub fn limit_deviations(h: &Rational, m: u32, max_order: usize) -> Vec<Vec<Rational>> {
    let cont = correction_matrix(&GroupingSpec::continuous(h.clone()).expect("h > 0"), max_order, Direction::ToRaw);
    let disc = correction_matrix(&GroupingSpec::discrete(h.clone(), m).expect("valid"), max_order, Direction::ToRaw);
    (0..=max_order)
        .map(|n| (0..=n).map(|k| disc.entry(n, k) - cont.entry(n, k)).collect())
        .collect()
}

fn limit_checks() -> Vec<CheckFn> {
    const S: &str = "limit";
    vec![Box::new(|_| {
        // for even gaps n-k >= 2 the deviation is c/m² + O(1/m⁴); otherwise 0
        let h = rational(3, 2);
        let devs: Vec<_> = [10u32, 100, 1000].iter().map(|&m| limit_deviations(&h, m, 8)).collect();
        let lo = integer(99);
        let hi = integer(101);
        let mut worst = Rational::zero();
        for n in 0..=8 {
            for k in 0..=n {
                let gap = n - k;
                for w in devs.windows(2) {
                    let (a, b) = (&w[0][n][k], &w[1][n][k]);
                    if gap < 2 || gap % 2 == 1 {
                        worst = worst.max(a.abs()).max(b.abs());
                    } else if b.is_zero() {
                        worst = worst.max(Rational::one());
                    } else {
                        let ratio = a / b;
                        if ratio < lo {
                            worst = worst.max(&lo - &ratio);
                        } else if ratio > hi {
                            worst = worst.max(&ratio - &hi);
                        }
                    }
                }
            }
        }
        exact(S, "deviation shrinks 100x per decade of m (10, 100, 1000)", worst)
    })]
}

fn multivariate_checks() -> Vec<CheckFn> {
    const S: &str = "multivariate";
    vec![
        Box::new(|cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(7);
            let mut worst = Rational::zero();
            for m1 in 1..=3u32 {
                for m2 in 1..=3u32 {
                    let rows = rng.random_range(1..=7);
                    let cols = rng.random_range(1..=7);
                    let axes = vec![(random_width(&mut rng), m1), (random_width(&mut rng), m2)];
                    let table = random_joint_table(&mut rng, axes, rows, cols);
                    let (raw, grouped) = joint_discrete_oracle(&table, &[4, 4]).expect("2 axes");
                    let specs = table.axis_specs();
                    let fixed = correct_mv(&grouped, &specs).expect("dims match");
                    let back = uncorrect_mv(&raw, &specs).expect("dims match");
                    worst = worst
                        .max(max_abs_diff(fixed.values(), raw.values()))
                        .max(max_abs_diff(back.values(), grouped.values()));
                }
            }
            exact(S, "joint lattice tables up to 7x7, m in 1..=3, orders (4,4)", worst)
        }),
        Box::new(|cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(8);
            let mut worst = Rational::zero();
            for dims in [2usize, 3] {
                for _ in 0..5 {
                    let len = 5usize.pow(dims as u32);
                    let mut values = vec![Rational::one()];
                    values.extend((1..len).map(|_| random_rational(&mut rng)));
                    let t = MomentTensor::new(vec![4; dims], values).expect("unital");
                    let specs = AxisSpecs::new(
                        (0..dims)
                            .map(|k| {
                                let h = random_width(&mut rng);
                                if k % 2 == 0 {
                                    GroupingSpec::continuous(h)
                                } else {
                                    GroupingSpec::discrete(h, rng.random_range(1..=5))
                                }
                                .expect("valid")
                            })
                            .collect(),
                    )
                    .expect("nonempty");
                    let back = correct_mv(&uncorrect_mv(&t, &specs).expect("dims"), &specs).expect("dims");
                    worst = worst.max(max_abs_diff(back.values(), t.values()));
                }
            }
            exact(S, "round trips for j in {2, 3}, mixed axes", worst)
        }),
        Box::new(|cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(9);
            let seqs: Vec<MomentSeq> = (0..3).map(|_| random_sequence(&mut rng, 4)).collect();
            let specs: Vec<GroupingSpec> = vec![
                GroupingSpec::continuous(random_width(&mut rng)).expect("valid"),
                GroupingSpec::discrete(random_width(&mut rng), 3).expect("valid"),
                GroupingSpec::continuous(random_width(&mut rng)).expect("valid"),
            ];
            let t = MomentTensor::outer_product(&seqs).expect("unital");
            let fixed = correct_mv(&t, &AxisSpecs::new(specs.clone()).expect("nonempty")).expect("dims");
            let per_axis: Vec<MomentSeq> = seqs.iter().zip(&specs).map(|(s, sp)| correct(s, sp)).collect();
            let expected = MomentTensor::outer_product(&per_axis).expect("unital");
            exact(S, "independent axes factorize", max_abs_diff(fixed.values(), expected.values()))
        }),
    ]
}

fn checks_for(suite: Suite) -> Vec<CheckFn> {
    match suite {
        Suite::Bernoulli => bernoulli_checks(),
        Suite::Identities => identity_checks(),
        Suite::RoundTrip => round_trip_checks(),
        Suite::Sheppard => sheppard_checks(),
        Suite::OracleDiscrete => discrete_oracle_checks(),
        Suite::OracleContinuous => continuous_oracle_checks(),
        Suite::Limit => limit_checks(),
        Suite::Multivariate => multivariate_checks(),
        Suite::All => Suite::NAMED.into_iter().flat_map(checks_for).collect(),
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Report {
    let checks = checks_for(suite);
    let results = config.exec.map_slice(&checks, |check| check(config));
    Report { checks: results }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::NAMED.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fast_suites_pass() {
        let cfg = VerifyConfig::default();
        for s in [Suite::Bernoulli, Suite::Identities, Suite::Sheppard, Suite::Limit] {
            let r = run_suite(s, &cfg);
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn report_rendering() {
        let r = Report {
            checks: vec![
                exact("s", "a", Rational::zero()),
                numeric("s", "b", 1.0, 1e-8),
            ],
        };
        assert!(!r.passed());
        assert_eq!(r.failures(), 1);
        let text = r.to_text();
        assert!(text.contains("PASS s/a: exact 0/1"));
        assert!(text.contains("FAIL s/b"));
        assert_eq!(r.to_json()["failures"], 1);
    }
}
