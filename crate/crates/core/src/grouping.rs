//! Moments from data, and brute-force oracles for grouped moments.
//!
//! The oracles compute raw and grouped moments straight from their
//! definitions (finite enumeration for lattice parents, quadrature for
//! densities). They share no code path with the correction transforms,
//! which makes them usable as independent checks.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::multivariate::{AxisSpecs, MomentTensor};
use crate::scalar::{integer, Rational, Scalar};
use crate::umbral::MomentSeq;
use crate::univariate::GroupingSpec;

/// Default relative tolerance on histogram midpoint spacing.
pub const DEFAULT_SPACING_TOL: f64 = 1e-9;
/// Default tolerance on `Σ frequencies = 1` for float histograms.
pub const DEFAULT_NORM_TOL: f64 = 1e-9;

fn float_moments(samples: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut sums = vec![0.0; n + 1];
    let mut count = 0usize;
    for x in samples {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            *s += p;
            p *= x;
        }
        count += 1;
    }
    let len = count as f64;
    sums.iter().map(|s| s / len).collect()
}

/// `aₙ = (1/len)·Σ xᵢⁿ` for `n = 0..=max_order`.
pub fn raw_moments_from_samples<T: Scalar>(samples: &[T], max_order: usize) -> Result<MomentSeq<T>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sums = vec![T::zero(); max_order + 1];
    for x in samples {
        let mut p = T::one();
        for s in sums.iter_mut() {
            *s = s.clone() + p.clone();
            p = p * x.clone();
        }
    }
    let len = T::from_rational(&integer(samples.len() as i64));
    MomentSeq::new(sums.into_iter().map(|s| s / len.clone()).collect())
}

/// Equally spaced class midpoints with relative frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram<T = f64> {
    midpoints: Vec<T>,
    rel_freqs: Vec<T>,
    width: T,
}

impl<T: Scalar> Histogram<T> {
    pub fn new(midpoints: Vec<T>, rel_freqs: Vec<T>) -> Result<Self> {
        Self::with_tolerances(midpoints, rel_freqs, DEFAULT_SPACING_TOL, DEFAULT_NORM_TOL)
    }

    /// Tolerances apply to float histograms; exact ones must be exactly
    /// equally spaced and normalized.
    pub fn with_tolerances(midpoints: Vec<T>, rel_freqs: Vec<T>, spacing_tol: f64, norm_tol: f64) -> Result<Self> {
        if midpoints.len() != rel_freqs.len() {
            return Err(Error::LengthMismatch {
                what: "frequencies",
                left: rel_freqs.len(),
                right: midpoints.len(),
            });
        }
        let k = midpoints.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        let steps = T::from_rational(&integer(k as i64 - 1));
        let width = (midpoints[k - 1].clone() - midpoints[0].clone()) / steps;
        for (i, pair) in midpoints.windows(2).enumerate() {
            let spacing = pair[1].clone() - pair[0].clone();
            if !(spacing > T::zero()) || !spacing.within(&width, spacing_tol) {
                return Err(Error::UnequalSpacing {
                    index: i + 1,
                    found: format!("{spacing:?}"),
                    expected: format!("{width:?}"),
                });
            }
        }
        if let Some(f) = rel_freqs.iter().find(|f| f.is_negative()) {
            return Err(Error::NegativeFrequency(format!("{f:?}")));
        }
        let total = rel_freqs.iter().fold(T::zero(), |acc, f| acc + f.clone());
        let normalized = if T::is_exact() {
            total.is_one()
        } else {
            (total.to_f64() - 1.0).abs() <= norm_tol
        };
        if !normalized {
            return Err(Error::NotNormalized(format!("{total:?}")));
        }
        Ok(Self { midpoints, rel_freqs, width })
    }

    /// Histogram from absolute counts (or any unnormalized weights).
    pub fn from_counts(midpoints: Vec<T>, counts: Vec<T>) -> Result<Self> {
        if let Some(f) = counts.iter().find(|f| f.is_negative()) {
            return Err(Error::NegativeFrequency(format!("{f:?}")));
        }
        let total = counts.iter().fold(T::zero(), |acc, f| acc + f.clone());
        if total.is_zero() {
            return Err(Error::NotNormalized(format!("{total:?}")));
        }
        let rel = counts.into_iter().map(|c| c / total.clone()).collect();
        Self::new(midpoints, rel)
    }

    pub fn midpoints(&self) -> &[T] {
        &self.midpoints
    }

    pub fn rel_freqs(&self) -> &[T] {
        &self.rel_freqs
    }

    /// Class width inferred from the midpoints.
    pub fn width(&self) -> &T {
        &self.width
    }
}

/// Grouped moments `Σᵢ ξᵢⁿ·(Nᵢ/N)` of a histogram, with its inferred width.
pub fn grouped_moments_from_histogram<T: Scalar>(hist: &Histogram<T>, max_order: usize) -> (MomentSeq<T>, T) {
    let mut sums = vec![T::zero(); max_order + 1];
    for (xi, f) in hist.midpoints.iter().zip(&hist.rel_freqs) {
        let mut p = f.clone();
        for s in sums.iter_mut() {
            *s = s.clone() + p.clone();
            p = p * xi.clone();
        }
    }
    // Σ f = 1 within tolerance; pin a₀ so float round-off does not leak in
    sums[0] = T::one();
    (MomentSeq::from_values_unchecked(sums), hist.width.clone())
}

/// Finite discrete distribution on the lattice `s·h/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeDist {
    h: Rational,
    m: u32,
    support: Vec<i64>,
    probs: Vec<Rational>,
}

impl LatticeDist {
    /// `probs[i] = P(X = support[i]·h/m)`; must be non-negative and sum to 1.
    pub fn new(h: Rational, m: u32, support: Vec<i64>, probs: Vec<Rational>) -> Result<Self> {
        GroupingSpec::discrete(h.clone(), m)?;
        validate_probs(&probs, support.len())?;
        let distinct: HashSet<_> = support.iter().collect();
        if distinct.len() != support.len() {
            return Err(Error::InvalidSupport("duplicate lattice points".into()));
        }
        Ok(Self { h, m, support, probs })
    }

    pub fn h(&self) -> &Rational {
        &self.h
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn spec(&self) -> GroupingSpec {
        GroupingSpec::discrete(self.h.clone(), self.m).expect("validated on construction")
    }
}

fn validate_probs(probs: &[Rational], expected_len: usize) -> Result<()> {
    if probs.len() != expected_len {
        return Err(Error::LengthMismatch { what: "probabilities", left: probs.len(), right: expected_len });
    }
    if expected_len == 0 {
        return Err(Error::InvalidSupport("empty support".into()));
    }
    if let Some(p) = probs.iter().find(|p| p.is_negative()) {
        return Err(Error::NegativeFrequency(p.to_string()));
    }
    let total: Rational = probs.iter().sum();
    if !total.is_one() {
        return Err(Error::NotNormalized(total.to_string()));
    }
    Ok(())
}

/// Offsets `(m−1−2j)·h/(2m)` for `j = 0..m`, the class midpoint minus the
/// lattice value under each of the `m` groupings.
fn lattice_offsets(h: &Rational, m: u32) -> Vec<Rational> {
    let two_m = integer(2 * i64::from(m));
    (0..m)
        .map(|j| integer(i64::from(m) - 1 - 2 * i64::from(j)) * h / &two_m)
        .collect()
}

/// `[x^t]` and `[(1/m)·Σⱼ (x − offsetⱼ)^t]` for `t = 0..=max_order`,
/// by repeated multiplication.
fn point_powers(x: &Rational, offsets: &[Rational], max_order: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut raw = Vec::with_capacity(max_order + 1);
    let mut p = Rational::one();
    for _ in 0..=max_order {
        raw.push(p.clone());
        p *= x;
    }
    let mut grouped = vec![Rational::zero(); max_order + 1];
    for off in offsets {
        let y = x - off;
        let mut p = Rational::one();
        for g in grouped.iter_mut() {
            *g += &p;
            p *= &y;
        }
    }
    let m = integer(offsets.len() as i64);
    for g in grouped.iter_mut() {
        *g /= &m;
    }
    (raw, grouped)
}

/// Raw and grouped moments of a lattice distribution by direct enumeration:
/// `aₙ = Σ_s P(s)·(sh/m)ⁿ` and
/// `ãₙ = (1/m)·Σ_{j<m} Σ_s P(s)·(sh/m − (m−1−2j)h/(2m))ⁿ`.
pub fn discrete_oracle(dist: &LatticeDist, max_order: usize) -> (MomentSeq, MomentSeq) {
    let offsets = lattice_offsets(&dist.h, dist.m);
    let step = &dist.h / integer(i64::from(dist.m));
    let mut raw = vec![Rational::zero(); max_order + 1];
    let mut grouped = vec![Rational::zero(); max_order + 1];
    for (s, p) in dist.support.iter().zip(&dist.probs) {
        let x = integer(*s) * &step;
        let (r, g) = point_powers(&x, &offsets, max_order);
        for n in 0..=max_order {
            raw[n] += p * &r[n];
            grouped[n] += p * &g[n];
        }
    }
    (MomentSeq::from_values_unchecked(raw), MomentSeq::from_values_unchecked(grouped))
}

/// Finite joint distribution on a product lattice, one `(h_k, m_k)` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct JointLatticeDist {
    axes: Vec<(Rational, u32)>,
    points: Vec<Vec<i64>>,
    probs: Vec<Rational>,
}

impl JointLatticeDist {
    pub fn new(axes: Vec<(Rational, u32)>, points: Vec<Vec<i64>>, probs: Vec<Rational>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (h, m) in &axes {
            GroupingSpec::discrete(h.clone(), *m)?;
        }
        if let Some(p) = points.iter().find(|p| p.len() != axes.len()) {
            return Err(Error::DimensionMismatch { expected: axes.len(), found: p.len() });
        }
        validate_probs(&probs, points.len())?;
        let distinct: HashSet<_> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::InvalidSupport("duplicate lattice points".into()));
        }
        Ok(Self { axes, points, probs })
    }

    /// Product of independent univariate lattice distributions.
    pub fn product(marginals: &[LatticeDist]) -> Result<Self> {
        let axes = marginals.iter().map(|d| (d.h.clone(), d.m)).collect();
        let mut points: Vec<Vec<i64>> = vec![Vec::new()];
        let mut probs = vec![Rational::one()];
        for d in marginals {
            let mut np = Vec::new();
            let mut pp = Vec::new();
            for (pt, p) in points.iter().zip(&probs) {
                for (s, q) in d.support.iter().zip(&d.probs) {
                    let mut v = pt.clone();
                    v.push(*s);
                    np.push(v);
                    pp.push(p * q);
                }
            }
            points = np;
            probs = pp;
        }
        Self::new(axes, points, probs)
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn axis_specs(&self) -> AxisSpecs {
        AxisSpecs::new(
            self.axes
                .iter()
                .map(|(h, m)| GroupingSpec::discrete(h.clone(), *m).expect("validated on construction"))
                .collect(),
        )
        .expect("at least one axis")
    }
}

/// Joint raw and grouped moment tensors of a lattice distribution by
/// direct enumeration. Each axis averages over its own `m_k` groupings
/// independently.
pub fn joint_discrete_oracle(dist: &JointLatticeDist, max_orders: &[usize]) -> Result<(MomentTensor, MomentTensor)> {
    if max_orders.len() != dist.dims() {
        return Err(Error::DimensionMismatch { expected: dist.dims(), found: max_orders.len() });
    }
    let offsets: Vec<Vec<Rational>> = dist.axes.iter().map(|(h, m)| lattice_offsets(h, *m)).collect();
    let steps: Vec<Rational> = dist.axes.iter().map(|(h, m)| h / integer(i64::from(*m))).collect();
    let per_point: Vec<(Vec<Vec<Rational>>, Vec<Vec<Rational>>)> = dist
        .points
        .iter()
        .map(|pt| {
            pt.iter()
                .enumerate()
                .map(|(k, s)| point_powers(&(integer(*s) * &steps[k]), &offsets[k], max_orders[k]))
                .unzip()
        })
        .collect();
    let moment = |idx: &[usize], grouped: bool| -> Rational {
        per_point
            .iter()
            .zip(&dist.probs)
            .map(|((raw, grp), p)| {
                let table = if grouped { grp } else { raw };
                idx.iter().enumerate().fold(p.clone(), |acc, (k, &t)| acc * &table[k][t])
            })
            .sum()
    };
    let raw = MomentTensor::from_fn(max_orders.to_vec(), |idx| moment(idx, false))?;
    let grouped = MomentTensor::from_fn(max_orders.to_vec(), |idx| moment(idx, true))?;
    Ok((raw, grouped))
}

/// Bivariate case of [`joint_discrete_oracle`].
pub fn bivariate_discrete_oracle(
    dist: &JointLatticeDist,
    max_orders: [usize; 2],
) -> Result<(MomentTensor, MomentTensor)> {
    joint_discrete_oracle(dist, &max_orders)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

/// Quadrature settings for [`continuous_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Target absolute error of each moment integral.
    pub abs_tol: f64,
    /// An infinite tail is cut once a step of width `tail_step` carries
    /// less than this much of `(1 + |t|)^{N+1}·f(t)`.
    pub tail_mass: f64,
    pub tail_step: f64,
    pub max_tail_steps: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, tail_mass: 1e-12, tail_step: 0.5, max_tail_steps: 10_000 }
    }
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Probability density on `(lower, upper)` with optional interior
/// breakpoints where it is not smooth.
#[derive(Clone)]
pub struct DensityOracle {
    density: DensityFn,
    lower: Bound,
    upper: Bound,
    breakpoints: Vec<f64>,
    config: QuadratureConfig,
}

impl fmt::Debug for DensityOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityOracle")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("breakpoints", &self.breakpoints)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl DensityOracle {
    pub fn new(density: impl Fn(f64) -> f64 + Send + Sync + 'static, lower: Bound, upper: Bound) -> Result<Self> {
        if let (Bound::Finite(a), Bound::Finite(b)) = (lower, upper) {
            if !(a < b) {
                return Err(Error::InvalidSupport(format!("({a}, {b})")));
            }
        }
        Ok(Self {
            density: Arc::new(density),
            lower,
            upper,
            breakpoints: Vec::new(),
            config: QuadratureConfig::default(),
        })
    }

    pub fn with_breakpoints(mut self, mut breakpoints: Vec<f64>) -> Self {
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        self.breakpoints = breakpoints;
        self
    }

    pub fn with_config(mut self, config: QuadratureConfig) -> Self {
        self.config = config;
        self
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    pub fn density(&self, t: f64) -> f64 {
        (self.density)(t)
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let c = 1.0 / (b - a);
        Self::new(move |_| c, Bound::Finite(a), Bound::Finite(b))
    }

    /// Triangular density on `(a, b)` with mode `c`.
    pub fn triangular(a: f64, c: f64, b: f64) -> Result<Self> {
        if !(a <= c && c <= b) {
            return Err(Error::InvalidSupport(format!("mode {c} outside ({a}, {b})")));
        }
        let f = move |t: f64| {
            if t < c {
                2.0 * (t - a) / ((b - a) * (c - a))
            } else {
                2.0 * (b - t) / ((b - a) * (b - c))
            }
        };
        Ok(Self::new(f, Bound::Finite(a), Bound::Finite(b))?.with_breakpoints(vec![c]))
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        let c = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
        Ok(Self::new(
            move |t| c * (-0.5 * ((t - mean) / sd).powi(2)).exp(),
            Bound::Infinite,
            Bound::Infinite,
        )?
        .with_breakpoints(vec![mean]))
    }

    /// Normal density restricted to `(a, b)`, normalized by quadrature.
    pub fn truncated_normal(mean: f64, sd: f64, a: f64, b: f64) -> Result<Self> {
        let shape = move |t: f64| (-0.5 * ((t - mean) / sd).powi(2)).exp();
        let mut bps = Vec::new();
        if a < mean && mean < b {
            bps.push(mean);
        }
        Self::new(shape, Bound::Finite(a), Bound::Finite(b))?
            .with_breakpoints(bps)
            .normalized()
    }

    /// Rescales the density to unit mass.
    pub fn normalized(self) -> Result<Self> {
        let segments = self.segments(0)?;
        let (mass, _) = integrate_segments(&segments, |t| (self.density)(t), self.config.abs_tol)?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::NotNormalized(mass.to_string()));
        }
        let inner = self.density.clone();
        Ok(Self { density: Arc::new(move |t| inner(t) / mass), ..self })
    }

    /// Finite integration segments covering the support, with infinite
    /// tails truncated once `(1 + |t|)^{order+1}·f(t)` is negligible.
    fn segments(&self, order: usize) -> Result<Vec<(f64, f64)>> {
        let mut anchors: Vec<f64> = self.breakpoints.clone();
        if let Bound::Finite(a) = self.lower {
            anchors.retain(|&x| x > a);
            anchors.insert(0, a);
        }
        if let Bound::Finite(b) = self.upper {
            anchors.retain(|&x| x < b);
            anchors.push(b);
        }
        if anchors.is_empty() {
            anchors.push(0.0);
        }
        let weight = |t: f64| (1.0 + t.abs()).powi(order as i32 + 1) * (self.density)(t);
        let cfg = &self.config;
        let tail = |start: f64, dir: f64| -> Result<f64> {
            let mut edge = start;
            let mut step = cfg.tail_step;
            for _ in 0..cfg.max_tail_steps {
                let next = edge + dir * step;
                let piece = quadrature::integrate(weight, edge.min(next), edge.max(next), cfg.tail_mass * 1e-2);
                edge = next;
                if piece.integral.abs() < cfg.tail_mass {
                    return Ok(edge);
                }
                step *= 1.1;
            }
            Err(Error::TailNotConverged(cfg.max_tail_steps))
        };
        if self.lower == Bound::Infinite {
            let lo = tail(anchors[0], -1.0)?;
            anchors.insert(0, lo);
        }
        if self.upper == Bound::Infinite {
            let hi = tail(*anchors.last().expect("nonempty"), 1.0)?;
            anchors.push(hi);
        }
        Ok(anchors.windows(2).map(|w| (w[0], w[1])).collect())
    }
}

fn integrate_segments(segments: &[(f64, f64)], f: impl Fn(f64) -> f64 + Copy, abs_tol: f64) -> Result<(f64, f64)> {
    let per_segment = abs_tol / segments.len() as f64;
    let mut total = 0.0;
    let mut error = 0.0;
    for &(a, b) in segments {
        let out = quadrature::integrate(f, a, b, per_segment);
        total += out.integral;
        error += out.error_estimate;
    }
    if !total.is_finite() || !(error <= abs_tol) {
        return Err(Error::QuadratureFailed { estimate: error, tolerance: abs_tol });
    }
    Ok((total, error))
}

/// Raw and grouped moments of a continuous density by quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousMoments {
    pub raw: MomentSeq<f64>,
    pub grouped: MomentSeq<f64>,
    /// Largest quadrature error estimate over all integrals.
    pub error_estimate: f64,
}

/// `aₙ = ∫ tⁿ f(t) dt` and `ãₙ = (1/h)∫ tⁿ ∫_{−h/2}^{h/2} f(t+x) dx dt`.
///
/// After substituting `u = t + x` the grouped moment becomes
/// `∫ f(u)·[(u + h/2)^{n+1} − (u − h/2)^{n+1}] / ((n+1)h) du`, so both
/// families need only one quadrature per order.
pub fn continuous_oracle(density: &DensityOracle, h: f64, max_order: usize) -> Result<ContinuousMoments> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveWidth(h.to_string()));
    }
    let segments = density.segments(max_order)?;
    let tol = density.config.abs_tol;
    let f = |t: f64| (density.density)(t);
    let (mass, mass_err) = integrate_segments(&segments, f, tol)?;
    if (mass - 1.0).abs() > 1e3 * tol.max(1e-12) {
        return Err(Error::NotNormalized(mass.to_string()));
    }

    let mut raw = vec![1.0; max_order + 1];
    let mut grouped = vec![1.0; max_order + 1];
    let mut worst = mass_err;
    for n in 1..=max_order {
        let (r, e1) = integrate_segments(&segments, |t| t.powi(n as i32) * f(t), tol)?;
        let half = 0.5 * h;
        let k = (n + 1) as i32;
        let window = |u: f64| ((u + half).powi(k) - (u - half).powi(k)) / (k as f64 * h);
        let (g, e2) = integrate_segments(&segments, |u| window(u) * f(u), tol)?;
        raw[n] = r / mass;
        grouped[n] = g / mass;
        worst = worst.max(e1).max(e2);
    }
    Ok(ContinuousMoments {
        raw: MomentSeq::from_values_unchecked(raw),
        grouped: MomentSeq::from_values_unchecked(grouped),
        error_estimate: worst,
    })
}

/// Grouped moments of a sample after rounding every value to the nearest
/// midpoint of the lattice `offset + h·ℤ`.
pub fn grouped_moments_with_offset(samples: &[f64], h: f64, offset: f64, max_order: usize) -> Result<MomentSeq<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(h > 0.0) {
        return Err(Error::NonPositiveWidth(h.to_string()));
    }
    let rounded = samples.iter().map(|&x| offset + h * ((x - offset) / h).round());
    Ok(MomentSeq::from_values_unchecked(float_moments(rounded, max_order)))
}

/// Monte Carlo estimate of lattice-averaged grouped moments.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloMoments {
    pub moments: MomentSeq<f64>,
    /// Standard error of each moment estimate; zero for a single trial.
    pub std_error: Vec<f64>,
    pub trials: usize,
}

/// Averages the grouped moments of `samples` over `trials` lattices shifted
/// by `U ~ Uniform(−h/2, h/2)`. Trial `i` draws from its own ChaCha stream
/// `i` under `seed`, so the result does not depend on scheduling.
pub fn randomized_lattice_mean(
    samples: &[f64],
    h: f64,
    max_order: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloMoments> {
    randomized_lattice_mean_with(samples, h, max_order, trials, seed, Exec::default())
}

pub fn randomized_lattice_mean_with(
    samples: &[f64],
    h: f64,
    max_order: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<MonteCarloMoments> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(h > 0.0) {
        return Err(Error::NonPositiveWidth(h.to_string()));
    }
    let per_trial = exec.map_range(trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let u = rng.random_range(-0.5 * h..0.5 * h);
        grouped_moments_with_offset(samples, h, u, max_order).map(MomentSeq::into_values)
    });
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;

    let t = trials as f64;
    let mean: Vec<f64> = (0..=max_order)
        .map(|n| per_trial.iter().map(|v| v[n]).sum::<f64>() / t)
        .collect();
    let std_error = (0..=max_order)
        .map(|n| {
            if trials < 2 {
                return 0.0;
            }
            let var = per_trial.iter().map(|v| (v[n] - mean[n]).powi(2)).sum::<f64>() / (t - 1.0);
            (var / t).sqrt()
        })
        .collect();
    Ok(MonteCarloMoments { moments: MomentSeq::from_values_unchecked(mean), std_error, trials })
}
