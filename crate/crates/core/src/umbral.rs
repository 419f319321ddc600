//! Moment sequences of umbrae and the exact Bernoulli kernel.
//!
//! A [`MomentSeq`] `1, a₁, …, a_N` stands for an umbra `α` with `E[αⁿ] = aₙ`.
//! Adding two uncorrelated umbrae is binomial convolution of their
//! sequences ([`convolve`]); multiplying an umbra by a constant scales the
//! n-th moment by `hⁿ` ([`scale`]). The auxiliary sequences below are the
//! moments of `ι` (Bernoulli), `−1.ι` (its inverse), `ι + 1/2` and
//! `−1.ι − 1/2`, from which every grouping correction is assembled.

use std::ops::Index;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial_table, pow, powers, rational, Rational, Scalar};

/// Finite moment sequence `a₀ = 1, a₁, …, a_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSeq<T = Rational> {
    values: Vec<T>,
}

impl<T: Scalar> MomentSeq<T> {
    /// Fails on an empty list or when `values[0]` is not 1.
    pub fn new(values: Vec<T>) -> Result<Self> {
        match values.first() {
            None => Err(Error::EmptySequence),
            Some(a0) if !a0.is_unit() => Err(Error::NotUnital(format!("{a0:?}"))),
            Some(_) => Ok(Self { values }),
        }
    }

    /// Sequence of the augmentation umbra `ε`: `1, 0, 0, …`.
    pub fn augmentation(max_order: usize) -> Self {
        let mut values = vec![T::zero(); max_order + 1];
        values[0] = T::one();
        Self { values }
    }

    /// Sequence of the unity umbra `u`: `1, 1, 1, …`.
    pub fn unity(max_order: usize) -> Self {
        Self { values: vec![T::one(); max_order + 1] }
    }

    /// Moments `cⁿ` of a deterministic umbra.
    pub fn constant(c: &T, max_order: usize) -> Self {
        Self { values: powers(c, max_order) }
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, n: usize) -> Option<&T> {
        self.values.get(n)
    }

    /// Keeps orders `0..=max_order`.
    pub fn truncated(&self, max_order: usize) -> Result<Self> {
        if max_order > self.max_order() {
            return Err(Error::OrderTooHigh { requested: max_order, available: self.max_order() });
        }
        Ok(Self { values: self.values[..=max_order].to_vec() })
    }

    pub(crate) fn from_values_unchecked(values: Vec<T>) -> Self {
        debug_assert!(!values.is_empty());
        Self { values }
    }
}

impl MomentSeq<Rational> {
    pub fn to_f64(&self) -> MomentSeq<f64> {
        MomentSeq { values: self.values.iter().map(Scalar::to_f64).collect() }
    }
}

impl<T> Index<usize> for MomentSeq<T> {
    type Output = T;

    fn index(&self, n: usize) -> &T {
        &self.values[n]
    }
}

/// Dense univariate polynomial with exact coefficients in ascending degree.
/// The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<Rational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self { coefficients: Vec::new() }
    }

    pub fn monomial(coefficient: Rational, degree: usize) -> Self {
        let mut c = vec![Rational::zero(); degree + 1];
        c[degree] = coefficient;
        Self::new(c)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coefficients.len().max(other.coefficients.len());
        let zero = Rational::zero();
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coefficients.get(k).unwrap_or(&zero) + other.coefficients.get(k).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> Polynomial {
        Polynomial::new(self.coefficients.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `p(x + c)`, by Horner's scheme in the linear polynomial `x + c`.
    pub fn shifted(&self, c: &Rational) -> Polynomial {
        let linear = Polynomial::new(vec![c.clone(), Rational::one()]);
        self.coefficients.iter().rev().fold(Polynomial::zero(), |acc, a| {
            acc.mul(&linear).add(&Polynomial::new(vec![a.clone()]))
        })
    }
}

/// `B₀, …, B_n` from `Σ_{i=0}^{k} C(k+1, i)·Bᵢ = 0` for `k ≥ 1`, `B₀ = 1`.
pub fn bernoulli_numbers(n: usize) -> MomentSeq {
    let binom = binomial_table(n + 1);
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for k in 1..=n {
        let partial: Rational = (0..k).map(|i| &binom[k + 1][i] * &b[i]).sum();
        b.push(-partial / &binom[k + 1][k]);
    }
    MomentSeq::from_values_unchecked(b)
}

/// `Bₙ(x) = Σ_k C(n,k)·B_k·x^{n−k}`.
pub fn bernoulli_polynomial(n: usize) -> Polynomial {
    let b = bernoulli_numbers(n);
    let binom = binomial_table(n);
    let mut coefficients = vec![Rational::zero(); n + 1];
    for k in 0..=n {
        coefficients[n - k] = &binom[n][k] * &b[k];
    }
    Polynomial::new(coefficients)
}

/// Moments of the sum of two uncorrelated umbrae:
/// `cₙ = Σ_k C(n,k)·a_k·b_{n−k}`, truncated to the shorter input.
pub fn convolve<T: Scalar>(a: &MomentSeq<T>, b: &MomentSeq<T>) -> MomentSeq<T> {
    let n = a.max_order().min(b.max_order());
    let binom = binomial_table(n);
    let values = (0..=n)
        .map(|order| {
            (0..=order).fold(T::zero(), |acc, k| {
                acc + T::from_rational(&binom[order][k]) * a[k].clone() * b[order - k].clone()
            })
        })
        .collect();
    MomentSeq::from_values_unchecked(values)
}

/// Moments of `α + c`.
pub fn shift<T: Scalar>(a: &MomentSeq<T>, c: &Rational) -> MomentSeq<T> {
    convolve(a, &MomentSeq::constant(&T::from_rational(c), a.max_order()))
}

/// Moments of `h·α`: `hⁿ·aₙ`.
pub fn scale<T: Scalar>(a: &MomentSeq<T>, h: &Rational) -> MomentSeq<T> {
    let hp = powers(&T::from_rational(h), a.max_order());
    MomentSeq::from_values_unchecked(a.values.iter().zip(hp).map(|(v, p)| v.clone() * p).collect())
}

/// Moments of the inverse Bernoulli umbra `−1.ι`: `E[(−1.ι)ᵏ] = 1/(k+1)`,
/// the moments of a uniform variable on `[0, 1]`.
pub fn inverse_bernoulli_moments(n: usize) -> MomentSeq {
    MomentSeq::from_values_unchecked((0..=n).map(|k| rational(1, k as i64 + 1)).collect())
}

/// Moments of `ι + 1/2`: `(2^{1−j} − 1)·Bⱼ`.
pub fn sheppard_coeffs(n: usize) -> MomentSeq {
    let b = bernoulli_numbers(n);
    let two = Rational::from_integer(2.into());
    let values = (0..=n)
        .map(|j| {
            let factor = if j == 0 { two.clone() } else { Rational::one() / pow(&two, j - 1) };
            (factor - Rational::one()) * &b[j]
        })
        .collect();
    MomentSeq::from_values_unchecked(values)
}

/// Moments of `−1.ι − 1/2`, a uniform variable on `(−1/2, 1/2)`:
/// zero for odd `j`, `(1/2)ʲ/(j+1)` for even `j`.
pub fn centered_uniform_moments(n: usize) -> MomentSeq {
    let values = (0..=n)
        .map(|j| {
            if j % 2 == 1 {
                Rational::zero()
            } else {
                rational(1, j as i64 + 1) / pow(&Rational::from_integer(2.into()), j)
            }
        })
        .collect();
    MomentSeq::from_values_unchecked(values)
}

/// `∫₀¹ p(x) dx`.
pub fn integrate_01(p: &Polynomial) -> Rational {
    p.coefficients()
        .iter()
        .enumerate()
        .map(|(k, c)| c * rational(1, k as i64 + 1))
        .sum()
}

/// Left side minus right side of the multiplication theorem
/// `(x + ι/m)ⁿ ≃ (1/m)·Σ_{k<m} (x + k/m + ι)ⁿ`, both sides evaluated to
/// polynomials in `x`. The result is the zero polynomial.
///
/// The left side is expanded binomially with `B_k/m^k`; the right side
/// shifts `Bₙ(x)` by `k/m` with Horner's scheme.
pub fn multiplication_theorem_residual(n: usize, m: u32) -> Polynomial {
    assert!(m >= 1, "multiplication theorem needs m >= 1");
    let b = bernoulli_numbers(n);
    let binom = binomial_table(n);
    let m_r = Rational::from_integer(m.into());
    let mut lhs = vec![Rational::zero(); n + 1];
    for k in 0..=n {
        lhs[n - k] = &binom[n][k] * &b[k] / pow(&m_r, k);
    }
    let lhs = Polynomial::new(lhs);

    let bn = bernoulli_polynomial(n);
    let rhs = (0..m)
        .map(|k| bn.shifted(&rational(k as i64, m as i64)))
        .fold(Polynomial::zero(), |acc, p| acc.add(&p))
        .scaled(&(Rational::one() / m_r));
    lhs.sub(&rhs)
}
