//! Oracles written independently of the library's transforms. Everything
//! here works from first principles: the Akiyama–Tanigawa algorithm,
//! literal rounding to class midpoints, and exact integration of
//! piecewise-polynomial densities.
#![allow(dead_code)]

use num_traits::{One, Zero};
use sheppard_core::Rational;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn pow(x: &Rational, n: usize) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * x)
}

/// `B_0..=B_n` with `B_1 = −1/2`.
pub fn akiyama_tanigawa(n: usize) -> Vec<Rational> {
    let mut a = vec![Rational::zero(); n + 1];
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a[m] = Rational::one() / qi(m as i64 + 1);
        for j in (1..=m).rev() {
            a[j - 1] = qi(j as i64) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    if n >= 1 {
        out[1] = -out[1].clone();
    }
    out
}

/// Midpoint of the class containing `x` when classes of width `h` start at
/// `origin + k·h`.
pub fn round_to_midpoint(x: &Rational, h: &Rational, origin: &Rational) -> Rational {
    let k = ((x - origin) / h).floor();
    origin + (k + q(1, 2)) * h
}

/// Raw and grouped moments of a distribution on `s·h/m`. The grouped ones
/// round every point to its class midpoint and average over the `m` class
/// origins that keep boundaries between lattice points.
pub fn lattice_rounding_oracle(
    h: &Rational,
    m: u32,
    support: &[i64],
    probs: &[Rational],
    max_order: usize,
) -> (Vec<Rational>, Vec<Rational>) {
    let step = h / qi(i64::from(m));
    let mut raw = vec![Rational::zero(); max_order + 1];
    let mut grouped = vec![Rational::zero(); max_order + 1];
    for (s, p) in support.iter().zip(probs) {
        let x = qi(*s) * &step;
        for n in 0..=max_order {
            raw[n] += p * pow(&x, n);
        }
        for j in 0..m {
            let origin = (qi(i64::from(j)) + q(1, 2)) * &step;
            let mid = round_to_midpoint(&x, h, &origin);
            for n in 0..=max_order {
                grouped[n] += p * pow(&mid, n) / qi(i64::from(m));
            }
        }
    }
    (raw, grouped)
}

/// Joint version: each axis is rounded with its own class origin, and the
/// average runs over all origin combinations. Entries are keyed by
/// row-major multi-index over `0..=orders[k]`.
pub fn joint_rounding_oracle(
    axes: &[(Rational, u32)],
    points: &[Vec<i64>],
    probs: &[Rational],
    orders: &[usize],
) -> (Vec<Rational>, Vec<Rational>) {
    let indices = multi_indices(orders);
    let mut raw = vec![Rational::zero(); indices.len()];
    let mut grouped = vec![Rational::zero(); indices.len()];
    let origin_sets = multi_indices(&axes.iter().map(|(_, m)| *m as usize - 1).collect::<Vec<_>>());
    let weight = Rational::one() / qi(origin_sets.len() as i64);
    for (pt, p) in points.iter().zip(probs) {
        let xs: Vec<Rational> = pt
            .iter()
            .zip(axes)
            .map(|(s, (h, m))| qi(*s) * h / qi(i64::from(*m)))
            .collect();
        for (e, idx) in indices.iter().enumerate() {
            raw[e] += p * idx.iter().zip(&xs).map(|(&n, x)| pow(x, n)).product::<Rational>();
        }
        for origins in &origin_sets {
            let mids: Vec<Rational> = xs
                .iter()
                .zip(axes)
                .zip(origins)
                .map(|((x, (h, m)), &j)| {
                    let origin = (qi(j as i64) + q(1, 2)) * h / qi(i64::from(*m));
                    round_to_midpoint(x, h, &origin)
                })
                .collect();
            for (e, idx) in indices.iter().enumerate() {
                grouped[e] += p * &weight * idx.iter().zip(&mids).map(|(&n, x)| pow(x, n)).product::<Rational>();
            }
        }
    }
    (raw, grouped)
}

/// All multi-indices with `idx[k] ≤ bounds[k]`, row-major.
pub fn multi_indices(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=b).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// Polynomials as ascending coefficient vectors.
pub fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(c + u)^n` expanded in `u`.
pub fn poly_shifted_power(c: &Rational, n: usize) -> Vec<Rational> {
    (0..n).fold(vec![Rational::one()], |acc, _| poly_mul(&acc, &[c.clone(), Rational::one()]))
}

pub fn poly_integrate(p: &[Rational], a: &Rational, b: &Rational) -> Rational {
    p.iter()
        .enumerate()
        .map(|(i, c)| c * (pow(b, i + 1) - pow(a, i + 1)) / qi(i as i64 + 1))
        .sum()
}

/// A density piece: polynomial `density` on `[a, b]`.
pub struct Piece {
    pub a: Rational,
    pub b: Rational,
    pub density: Vec<Rational>,
}

pub fn uniform(a: Rational, b: Rational) -> Vec<Piece> {
    let d = Rational::one() / (&b - &a);
    vec![Piece { a, b, density: vec![d] }]
}

pub fn triangular(a: Rational, c: Rational, b: Rational) -> Vec<Piece> {
    let left = qi(2) / ((&b - &a) * (&c - &a));
    let right = qi(2) / ((&b - &a) * (&b - &c));
    vec![
        Piece { a: a.clone(), b: c.clone(), density: vec![-&left * &a, left] },
        Piece { a: c, b: b.clone(), density: vec![&right * &b, -right] },
    ]
}

/// Exact raw moments `∫ uⁿ f(u) du` and grouped moments
/// `∫ f(u) (1/h)∫_{u−h/2}^{u+h/2} tⁿ dt du` of a piecewise-polynomial density.
pub fn piecewise_oracle(pieces: &[Piece], h: &Rational, max_order: usize) -> (Vec<Rational>, Vec<Rational>) {
    let half = h / qi(2);
    let mut raw = vec![Rational::zero(); max_order + 1];
    let mut grouped = vec![Rational::zero(); max_order + 1];
    for piece in pieces {
        for n in 0..=max_order {
            let mut monomial = vec![Rational::zero(); n + 1];
            monomial[n] = Rational::one();
            raw[n] += poly_integrate(&poly_mul(&monomial, &piece.density), &piece.a, &piece.b);

            let up = poly_shifted_power(&half, n + 1);
            let down = poly_shifted_power(&-half.clone(), n + 1);
            let scale = Rational::one() / (qi(n as i64 + 1) * h);
            let window: Vec<Rational> = up.iter().zip(&down).map(|(u, d)| (u - d) * &scale).collect();
            grouped[n] += poly_integrate(&poly_mul(&window, &piece.density), &piece.a, &piece.b);
        }
    }
    (raw, grouped)
}
