//! Corrections for multivariate moments.
//!
//! A moment `m_{t₁…t_j}` is addressed by its multiplicity vector
//! `(t₁, …, t_j)`. Grouping acts on each coordinate through its own
//! uncorrelated Bernoulli umbra, so the correction of a moment tensor is
//! the tensor product of the univariate correction matrices. It is applied
//! as `j` successive mode products, one axis at a time.
//!
//! Axes may mix continuous and discrete grouping; the factorized form puts
//! no coupling between axes.

use std::cmp::Reverse;
use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::scalar::{Rational, Scalar};
use crate::umbral::MomentSeq;
use crate::univariate::{correction_matrix, explicit_row, Direction, GroupingMode, GroupingSpec};

/// Multiplicities `(t₁, …, t_j)` of a multivariate moment, `j ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(Self(orders))
    }

    pub fn orders(&self) -> &[usize] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(orders: &[usize]) -> Self {
        Self(orders.to_vec())
    }
}

/// Per-axis grouping, one [`GroupingSpec`] per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisSpecs(Vec<GroupingSpec>);

impl AxisSpecs {
    pub fn new(specs: Vec<GroupingSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(Self(specs))
    }

    pub fn specs(&self) -> &[GroupingSpec] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn all_continuous(&self) -> bool {
        self.0.iter().all(|s| s.mode() == GroupingMode::Continuous)
    }

    /// Short name of the closed form used for a tensor transform.
    pub fn formula_id(&self, direction: Direction) -> &'static str {
        match (self.all_continuous(), direction) {
            (true, Direction::ToRaw) => "shcmul2",
            (true, Direction::ToGrouped) => "shcmul",
            (false, Direction::ToRaw) => "iv",
            (false, Direction::ToGrouped) => "v",
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(perm.iter().map(|&p| self.0[p].clone()).collect())
    }
}

/// Dense, downward-closed table of moments `m_t` for every `t ≤ T`
/// componentwise. Stored row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTensor<T = Rational> {
    max_orders: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<T>,
}

fn strides_for(max_orders: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; max_orders.len()];
    for k in (0..max_orders.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * (max_orders[k + 1] + 1);
    }
    strides
}

impl<T: Scalar> MomentTensor<T> {
    /// Builds a tensor from row-major values. The zero index must hold 1.
    pub fn new(max_orders: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if max_orders.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let len: usize = max_orders.iter().map(|t| t + 1).product();
        if values.len() != len {
            return Err(Error::LengthMismatch { what: "tensor values", left: values.len(), right: len });
        }
        if !values[0].is_unit() {
            return Err(Error::NotUnital(format!("{:?}", values[0])));
        }
        let strides = strides_for(&max_orders);
        Ok(Self { max_orders, strides, values })
    }

    pub fn from_fn(max_orders: Vec<usize>, f: impl Fn(&[usize]) -> T) -> Result<Self> {
        let strides = strides_for(&max_orders);
        let len: usize = max_orders.iter().map(|t| t + 1).product();
        let values = (0..len).map(|flat| f(&unravel(flat, &strides, &max_orders))).collect();
        Self::new(max_orders, values)
    }

    /// Builds a tensor from `(index, value)` pairs, which must cover every
    /// index `≤ max_orders` exactly once.
    pub fn from_entries(max_orders: Vec<usize>, entries: Vec<(MultiIndex, T)>) -> Result<Self> {
        let mut table: HashMap<Vec<usize>, T> = HashMap::with_capacity(entries.len());
        for (idx, v) in entries {
            let ok = idx.dims() == max_orders.len()
                && idx.orders().iter().zip(&max_orders).all(|(t, m)| t <= m);
            if !ok || table.insert(idx.0.clone(), v).is_some() {
                return Err(Error::UnexpectedIndex(idx.0));
            }
        }
        let strides = strides_for(&max_orders);
        let len: usize = max_orders.iter().map(|t| t + 1).product();
        let mut values = Vec::with_capacity(len);
        for flat in 0..len {
            let idx = unravel(flat, &strides, &max_orders);
            match table.remove(&idx) {
                Some(v) => values.push(v),
                None => return Err(Error::MissingIndex(idx)),
            }
        }
        Self::new(max_orders, values)
    }

    /// Tensor of an independent-axes parent: `m_t = ∏_k a^{(k)}_{t_k}`.
    pub fn outer_product(seqs: &[MomentSeq<T>]) -> Result<Self> {
        let max_orders = seqs.iter().map(MomentSeq::max_order).collect();
        Self::from_fn(max_orders, |idx| {
            idx.iter()
                .zip(seqs)
                .fold(T::one(), |acc, (&t, s)| acc * s[t].clone())
        })
    }

    pub fn dims(&self) -> usize {
        self.max_orders.len()
    }

    pub fn max_orders(&self) -> &[usize] {
        &self.max_orders
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

    pub fn get(&self, idx: &[usize]) -> Option<&T> {
        self.flat_index(idx).map(|i| &self.values[i])
    }

    fn flat_index(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.dims() || idx.iter().zip(&self.max_orders).any(|(t, m)| t > m) {
            return None;
        }
        Some(idx.iter().zip(&self.strides).map(|(t, s)| t * s).sum())
    }

    /// Row-major iterator over `(index, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (MultiIndex, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(flat, v)| (MultiIndex(unravel(flat, &self.strides, &self.max_orders)), v))
    }

    /// The sequence along `axis` with every other order zero.
    pub fn marginal(&self, axis: usize) -> MomentSeq<T> {
        let values = (0..=self.max_orders[axis])
            .map(|t| self.values[t * self.strides[axis]].clone())
            .collect();
        MomentSeq::from_values_unchecked(values)
    }

    /// Reorders axes so that new axis `i` is old axis `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), found: perm.len() });
        }
        let max_orders = perm.iter().map(|&p| self.max_orders[p]).collect();
        Self::from_fn(max_orders, |idx| {
            let mut old = vec![0; idx.len()];
            for (i, &p) in perm.iter().enumerate() {
                old[p] = idx[i];
            }
            self.get(&old).expect("permuted index in range").clone()
        })
    }

    /// Applies a lower-triangular matrix along one axis.
    fn mode_product(&self, axis: usize, rows: &[Vec<T>], exec: Exec) -> Self {
        let stride = self.strides[axis];
        let values = exec.map_range(self.values.len(), |flat| {
            let t = (flat / stride) % (self.max_orders[axis] + 1);
            let base = flat - t * stride;
            rows[t]
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (s, c)| acc + c.clone() * self.values[base + s * stride].clone())
        });
        Self { max_orders: self.max_orders.clone(), strides: self.strides.clone(), values }
    }
}

impl MomentTensor<Rational> {
    pub fn to_f64(&self) -> MomentTensor<f64> {
        MomentTensor {
            max_orders: self.max_orders.clone(),
            strides: self.strides.clone(),
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }
}

fn unravel(mut flat: usize, strides: &[usize], max_orders: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; strides.len()];
    for k in 0..strides.len() {
        idx[k] = flat / strides[k];
        flat %= strides[k];
        debug_assert!(idx[k] <= max_orders[k]);
    }
    idx
}

fn transform<T: Scalar>(
    tensor: &MomentTensor<T>,
    specs: &AxisSpecs,
    direction: Direction,
    exec: Exec,
) -> Result<MomentTensor<T>> {
    if specs.dims() != tensor.dims() {
        return Err(Error::DimensionMismatch { expected: tensor.dims(), found: specs.dims() });
    }
    let mut out = tensor.clone();
    for (axis, spec) in specs.specs().iter().enumerate() {
        let matrix = correction_matrix(spec, tensor.max_orders[axis], direction);
        let rows: Vec<Vec<T>> = matrix
            .rows()
            .iter()
            .map(|r| r.iter().map(T::from_rational).collect())
            .collect();
        out = out.mode_product(axis, &rows, exec);
    }
    Ok(out)
}

/// Grouped moment tensor to raw moment tensor.
pub fn correct_mv<T: Scalar>(grouped: &MomentTensor<T>, specs: &AxisSpecs) -> Result<MomentTensor<T>> {
    transform(grouped, specs, Direction::ToRaw, Exec::default())
}

/// Raw moment tensor to grouped moment tensor.
pub fn uncorrect_mv<T: Scalar>(raw: &MomentTensor<T>, specs: &AxisSpecs) -> Result<MomentTensor<T>> {
    transform(raw, specs, Direction::ToGrouped, Exec::default())
}

pub fn correct_mv_with<T: Scalar>(
    grouped: &MomentTensor<T>,
    specs: &AxisSpecs,
    exec: Exec,
) -> Result<MomentTensor<T>> {
    transform(grouped, specs, Direction::ToRaw, exec)
}

pub fn uncorrect_mv_with<T: Scalar>(
    raw: &MomentTensor<T>,
    specs: &AxisSpecs,
    exec: Exec,
) -> Result<MomentTensor<T>> {
    transform(raw, specs, Direction::ToGrouped, exec)
}

/// Raw moment at `index` as an explicit combination of grouped moments.
///
/// Multiplies out `∏_k (μ̃_k + h_k(ι_k + ½) [+ (h_k/m_k)(−1.ι_k − ½)])^{t_k}`
/// from the closed-form univariate rows and drops zero terms. Terms are in
/// descending lexicographic order of their index.
pub fn expand_correction_polynomial(index: &MultiIndex, specs: &AxisSpecs) -> Result<Vec<(MultiIndex, Rational)>> {
    if index.dims() != specs.dims() {
        return Err(Error::DimensionMismatch { expected: specs.dims(), found: index.dims() });
    }
    let rows: Vec<Vec<Rational>> = index
        .orders()
        .iter()
        .zip(specs.specs())
        .map(|(&t, spec)| explicit_row(spec, Direction::ToRaw, t))
        .collect();

    let mut terms: Vec<(Vec<usize>, Rational)> = vec![(Vec::new(), Rational::from_integer(1.into()))];
    for row in &rows {
        let mut next = Vec::with_capacity(terms.len() * row.len());
        for (prefix, coeff) in &terms {
            for (s, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut idx = prefix.clone();
                idx.push(s);
                next.push((idx, coeff * c));
            }
        }
        terms = next;
    }
    terms.sort_by(|a, b| Reverse(&a.0).cmp(&Reverse(&b.0)));
    Ok(terms.into_iter().map(|(idx, c)| (MultiIndex(idx), c)).collect())
}
