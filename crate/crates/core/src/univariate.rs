//! Grouping corrections for univariate parents.
//!
//! With `α` the parent, `α̃` the grouped umbra and `ι` the Bernoulli umbra:
//!
//! | parent     | grouped → raw                                  | raw → grouped                                  |
//! |------------|------------------------------------------------|------------------------------------------------|
//! | continuous | `α ≡ α̃ + h(ι + ½)`                             | `α̃ ≡ α + h(−1.ι − ½)`                          |
//! | discrete   | `α ≡ α̃ + h(ι + ½) + (h/m)(−1.ι − ½)`           | `α̃ ≡ α + h(−1.ι − ½) + (h/m)(ι + ½)`           |
//!
//! Each transform is lower triangular and unipotent. The `correct_*` and
//! `uncorrect_*` functions evaluate the closed-form sums directly; the
//! [`CorrectionMatrix`] is built from the umbral kernel by convolution.
//! The two routes are checked against each other in tests.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{binomial_table, powers, rational, Rational, Scalar};
use crate::umbral::{centered_uniform_moments, convolve, scale, sheppard_coeffs, MomentSeq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupingMode {
    Continuous,
    /// `m` consecutive lattice values of spacing `h/m` merged into one class.
    Discrete { m: u32 },
}

/// Class width `h > 0` together with the grouping mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupingSpec {
    h: Rational,
    mode: GroupingMode,
}

impl GroupingSpec {
    pub fn continuous(h: Rational) -> Result<Self> {
        Self::new(h, GroupingMode::Continuous)
    }

    pub fn discrete(h: Rational, m: u32) -> Result<Self> {
        Self::new(h, GroupingMode::Discrete { m })
    }

    pub fn new(h: Rational, mode: GroupingMode) -> Result<Self> {
        if h <= Rational::zero() {
            return Err(Error::NonPositiveWidth(h.to_string()));
        }
        if let GroupingMode::Discrete { m: 0 } = mode {
            return Err(Error::InvalidDivisor(0));
        }
        Ok(Self { h, mode })
    }

    pub fn h(&self) -> &Rational {
        &self.h
    }

    pub fn mode(&self) -> GroupingMode {
        self.mode
    }

    /// Lattice divisor, `None` for a continuous parent.
    pub fn divisor(&self) -> Option<u32> {
        match self.mode {
            GroupingMode::Continuous => None,
            GroupingMode::Discrete { m } => Some(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Grouped moments to raw moments of the parent.
    ToRaw,
    /// Raw moments to expected grouped moments.
    ToGrouped,
}

impl Direction {
    pub fn inverse(self) -> Self {
        match self {
            Direction::ToRaw => Direction::ToGrouped,
            Direction::ToGrouped => Direction::ToRaw,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::ToRaw => "to_raw",
            Direction::ToGrouped => "to_grouped",
        }
    }
}

/// Short name of the closed form applied by a univariate transform.
pub fn formula_id(mode: GroupingMode, direction: Direction) -> &'static str {
    match (mode, direction) {
        (GroupingMode::Continuous, Direction::ToRaw) => "Sh1",
        (GroupingMode::Continuous, Direction::ToGrouped) => "Sh3",
        (GroupingMode::Discrete { .. }, Direction::ToRaw) => "grdis",
        (GroupingMode::Discrete { .. }, Direction::ToGrouped) => "shcdis",
    }
}

/// Moment sequence of the umbra added to the input by a transform, e.g.
/// `h(ι + ½)` for continuous [`Direction::ToRaw`].
pub fn transform_kernel(spec: &GroupingSpec, direction: Direction, max_order: usize) -> MomentSeq {
    let h = spec.h();
    let bernoulli_half = |w: &Rational| scale(&sheppard_coeffs(max_order), w);
    let uniform = |w: &Rational| scale(&centered_uniform_moments(max_order), w);
    match (spec.mode(), direction) {
        (GroupingMode::Continuous, Direction::ToRaw) => bernoulli_half(h),
        (GroupingMode::Continuous, Direction::ToGrouped) => uniform(h),
        (GroupingMode::Discrete { m }, Direction::ToRaw) => {
            let fine = h / Rational::from_integer(m.into());
            convolve(&bernoulli_half(h), &uniform(&fine))
        }
        (GroupingMode::Discrete { m }, Direction::ToGrouped) => {
            let fine = h / Rational::from_integer(m.into());
            convolve(&uniform(h), &bernoulli_half(&fine))
        }
    }
}

/// Coefficients of row `n` from the closed-form sums: entry `k` multiplies
/// input moment `k`.
pub fn explicit_row(spec: &GroupingSpec, direction: Direction, n: usize) -> Vec<Rational> {
    explicit_rows(spec, direction, n).pop().expect("at least one row")
}

fn explicit_rows(spec: &GroupingSpec, direction: Direction, max_order: usize) -> Vec<Vec<Rational>> {
    let binom = binomial_table(max_order);
    let shep = sheppard_coeffs(max_order);
    let h = spec.h();
    let h_pow = powers(h, max_order);
    let m = spec.divisor().unwrap_or(1);
    let fine = h / Rational::from_integer(m.into());
    let half = rational(1, 2);
    // (w/2)^i/(i+1), used at even i only
    let uniform_terms = |w: &Rational| -> Vec<Rational> {
        powers(&(w * &half), max_order)
            .into_iter()
            .enumerate()
            .map(|(i, p)| p / Rational::from_integer((i as i64 + 1).into()))
            .collect()
    };
    let coarse_u = uniform_terms(h);
    let fine_u = uniform_terms(&fine);
    let fine_pow = powers(&fine, max_order);
    // h^j(2^{1−j} − 1)B_j, zero at odd j
    let coarse_b: Vec<Rational> = shep.values().iter().zip(&h_pow).map(|(b, p)| b * p).collect();

    // continuous rows; the discrete sums are weighted sums of them
    let even_row = |n: usize, coeffs: &[Rational]| {
        let mut row = vec![Rational::zero(); n + 1];
        for j in (0..=n).step_by(2) {
            row[n - j] = &binom[n][j] * &coeffs[j];
        }
        row
    };
    let sh1: Vec<Vec<Rational>> = (0..=max_order).map(|n| even_row(n, &coarse_b)).collect();
    let sh3: Vec<Vec<Rational>> = (0..=max_order).map(|n| even_row(n, &coarse_u)).collect();
    let combine = |inner: &[Vec<Rational>], weight: &dyn Fn(usize, usize) -> Rational| {
        (0..=max_order)
            .map(|n| {
                let mut row = vec![Rational::zero(); n + 1];
                for k in (0..=n).step_by(2) {
                    let w = weight(n, k);
                    for (i, c) in inner[n - k].iter().enumerate() {
                        row[i] += &w * c;
                    }
                }
                row
            })
            .collect()
    };
    match (spec.mode(), direction) {
        (GroupingMode::Continuous, Direction::ToRaw) => sh1,
        (GroupingMode::Continuous, Direction::ToGrouped) => sh3,
        (GroupingMode::Discrete { .. }, Direction::ToRaw) => combine(&sh1, &|n, k| &binom[n][k] * &fine_u[k]),
        (GroupingMode::Discrete { .. }, Direction::ToGrouped) => {
            combine(&sh3, &|n, k| &binom[n][k] * &shep[k] * &fine_pow[k])
        }
    }
}

fn apply_rows<T: Scalar>(rows: &[Vec<Rational>], input: &MomentSeq<T>) -> MomentSeq<T> {
    let values = rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(input.values())
                .fold(T::zero(), |acc, (c, x)| acc + T::from_rational(c) * x.clone())
        })
        .collect();
    MomentSeq::from_values_unchecked(values)
}

fn transform<T: Scalar>(input: &MomentSeq<T>, spec: &GroupingSpec, direction: Direction) -> MomentSeq<T> {
    apply_rows(&explicit_rows(spec, direction, input.max_order()), input)
}

/// Grouped moments to raw moments of a continuous parent:
/// `aₙ = Σⱼ C(n,j)(2^{1−j} − 1)Bⱼ hʲ ã_{n−j}`.
pub fn correct_continuous<T: Scalar>(grouped: &MomentSeq<T>, h: &Rational) -> Result<MomentSeq<T>> {
    let spec = GroupingSpec::continuous(h.clone())?;
    Ok(transform(grouped, &spec, Direction::ToRaw))
}

/// Raw moments of a continuous parent to grouped moments:
/// `ãₙ = Σ_{2j≤n} C(n,2j)(h/2)^{2j} a_{n−2j}/(2j+1)`.
pub fn uncorrect_continuous<T: Scalar>(raw: &MomentSeq<T>, h: &Rational) -> Result<MomentSeq<T>> {
    let spec = GroupingSpec::continuous(h.clone())?;
    Ok(transform(raw, &spec, Direction::ToGrouped))
}

/// Grouped moments to raw moments of a lattice parent with divisor `m`.
pub fn correct_discrete<T: Scalar>(grouped: &MomentSeq<T>, h: &Rational, m: u32) -> Result<MomentSeq<T>> {
    let spec = GroupingSpec::discrete(h.clone(), m)?;
    Ok(transform(grouped, &spec, Direction::ToRaw))
}

/// Raw moments of a lattice parent with divisor `m` to grouped moments.
pub fn uncorrect_discrete<T: Scalar>(raw: &MomentSeq<T>, h: &Rational, m: u32) -> Result<MomentSeq<T>> {
    let spec = GroupingSpec::discrete(h.clone(), m)?;
    Ok(transform(raw, &spec, Direction::ToGrouped))
}

/// Grouped → raw for any [`GroupingSpec`].
pub fn correct<T: Scalar>(grouped: &MomentSeq<T>, spec: &GroupingSpec) -> MomentSeq<T> {
    transform(grouped, spec, Direction::ToRaw)
}

/// Raw → grouped for any [`GroupingSpec`].
pub fn uncorrect<T: Scalar>(raw: &MomentSeq<T>, spec: &GroupingSpec) -> MomentSeq<T> {
    transform(raw, spec, Direction::ToGrouped)
}

/// Lower-triangular matrix form of one transform, rows `0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionMatrix {
    spec: GroupingSpec,
    direction: Direction,
    rows: Vec<Vec<Rational>>,
}

/// Builds the matrix `L[n][k] = C(n,k)·c_{n−k}` from the kernel sequence `c`
/// of [`transform_kernel`].
pub fn correction_matrix(spec: &GroupingSpec, max_order: usize, direction: Direction) -> CorrectionMatrix {
    correction_matrix_with(spec, max_order, direction, Exec::default())
}

pub fn correction_matrix_with(
    spec: &GroupingSpec,
    max_order: usize,
    direction: Direction,
    exec: Exec,
) -> CorrectionMatrix {
    let kernel = transform_kernel(spec, direction, max_order);
    let binom = binomial_table(max_order);
    let rows = exec.map_range(max_order + 1, |n| {
        (0..=n).map(|k| &binom[n][k] * &kernel[n - k]).collect()
    });
    CorrectionMatrix { spec: spec.clone(), direction, rows }
}

impl CorrectionMatrix {
    pub fn spec(&self) -> &GroupingSpec {
        &self.spec
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Entry `(n, k)`; zero above the diagonal.
    pub fn entry(&self, n: usize, k: usize) -> Rational {
        self.rows[n].get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()
    }

    /// Applies the matrix to a sequence of order at most [`Self::max_order`].
    pub fn apply<T: Scalar>(&self, input: &MomentSeq<T>) -> Result<MomentSeq<T>> {
        if input.max_order() > self.max_order() {
            return Err(Error::OrderTooHigh { requested: input.max_order(), available: self.max_order() });
        }
        Ok(apply_rows(&self.rows[..input.len()], input))
    }

    /// Matrix product `self · other` (dense, lower triangular).
    pub fn product(&self, other: &CorrectionMatrix) -> Vec<Vec<Rational>> {
        let n = self.max_order().min(other.max_order());
        (0..=n)
            .map(|i| {
                (0..=i)
                    .map(|j| (j..=i).map(|k| self.entry(i, k) * other.entry(k, j)).sum())
                    .collect()
            })
            .collect()
    }
}

/// Whether a lower-triangular row list is the identity.
pub fn is_identity(rows: &[Vec<Rational>]) -> bool {
    rows.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::integer;

    fn grouped(values: &[Rational]) -> MomentSeq {
        MomentSeq::new(values.to_vec()).unwrap()
    }

    #[test]
    fn mean_is_not_corrected() {
        let g = grouped(&[integer(1), rational(3, 7)]);
        let raw = correct_continuous(&g, &rational(5, 2)).unwrap();
        assert_eq!(raw[1], rational(3, 7));
    }

    #[test]
    fn classic_second_and_fourth_order() {
        let h = rational(3, 2);
        let h2 = &h * &h;
        let g = grouped(&[integer(1), Rational::zero(), rational(2, 1)]);
        let raw = correct_continuous(&g, &h).unwrap();
        assert_eq!(raw[2], integer(2) - &h2 / integer(12));

        let row = explicit_row(&GroupingSpec::continuous(h.clone()).unwrap(), Direction::ToRaw, 4);
        assert_eq!(row[0], rational(7, 240) * &h2 * &h2);
        assert_eq!(row[1], Rational::zero());
        assert_eq!(row[2], rational(-1, 2) * &h2);
        assert_eq!(row[3], Rational::zero());
        assert_eq!(row[4], integer(1));
    }

    #[test]
    fn uncorrect_continuous_low_orders() {
        let h = integer(1);
        let raw = grouped(&[integer(1), rational(1, 3), rational(1, 6)]);
        let g = uncorrect_continuous(&raw, &h).unwrap();
        assert_eq!(g[1], rational(1, 3));
        assert_eq!(g[2], rational(1, 6) + rational(1, 12));
    }

    #[test]
    fn discrete_with_unit_divisor_is_identity() {
        let a = grouped(&[integer(1), rational(1, 2), rational(-3, 5), rational(7, 4)]);
        let h = rational(2, 3);
        assert_eq!(correct_discrete(&a, &h, 1).unwrap(), a);
        assert_eq!(uncorrect_discrete(&a, &h, 1).unwrap(), a);
    }

    #[test]
    fn discrete_second_order_gap_to_continuous() {
        let h = rational(5, 3);
        for m in [2u32, 3, 7] {
            let spec_d = GroupingSpec::discrete(h.clone(), m).unwrap();
            let spec_c = GroupingSpec::continuous(h.clone()).unwrap();
            let d = explicit_row(&spec_d, Direction::ToRaw, 2);
            let c = explicit_row(&spec_c, Direction::ToRaw, 2);
            let m2 = integer(i64::from(m * m));
            assert_eq!(&d[0] - &c[0], &h * &h / (integer(12) * m2));
        }
    }

    #[test]
    fn explicit_and_kernel_routes_agree() {
        let h = rational(7, 5);
        let specs = [
            GroupingSpec::continuous(h.clone()).unwrap(),
            GroupingSpec::discrete(h.clone(), 1).unwrap(),
            GroupingSpec::discrete(h.clone(), 3).unwrap(),
        ];
        for spec in &specs {
            for dir in [Direction::ToRaw, Direction::ToGrouped] {
                let matrix = correction_matrix(spec, 12, dir);
                for n in 0..=12 {
                    assert_eq!(explicit_row(spec, dir, n), matrix.rows()[n], "{spec:?} {dir:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn matrix_examples() {
        let spec = GroupingSpec::continuous(rational(1, 2)).unwrap();
        assert_eq!(correction_matrix(&spec, 0, Direction::ToRaw).rows(), &[vec![integer(1)]]);
        let l = correction_matrix(&spec, 2, Direction::ToRaw);
        assert_eq!(l.rows()[2], vec![rational(-1, 48), Rational::zero(), integer(1)]);
        let inv = correction_matrix(&spec, 2, Direction::ToGrouped);
        assert!(is_identity(&l.product(&inv)));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let a = grouped(&[integer(1), integer(0)]);
        assert!(matches!(correct_continuous(&a, &Rational::zero()), Err(Error::NonPositiveWidth(_))));
        assert!(matches!(uncorrect_continuous(&a, &integer(-1)), Err(Error::NonPositiveWidth(_))));
        assert_eq!(correct_discrete(&a, &integer(1), 0), Err(Error::InvalidDivisor(0)));
    }

    #[test]
    fn matrix_rejects_longer_input() {
        let spec = GroupingSpec::continuous(integer(1)).unwrap();
        let l = correction_matrix(&spec, 2, Direction::ToRaw);
        let a = MomentSeq::<Rational>::unity(3);
        assert!(matches!(l.apply(&a), Err(Error::OrderTooHigh { .. })));
        assert_eq!(l.apply(&MomentSeq::<Rational>::unity(1)).unwrap().max_order(), 1);
    }

    #[test]
    fn float_mode_uses_exact_coefficients() {
        let a = MomentSeq::new(vec![1.0, 0.0, 1.0]).unwrap();
        let raw = correct_continuous(&a, &integer(1)).unwrap();
        assert!((raw[2] - 11.0 / 12.0).abs() < 1e-15);
    }
}
