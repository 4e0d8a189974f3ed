//! Real polynomials in one variable with `f64` coefficients.

use std::ops::{Add, Mul, Neg, Sub};

/// `coeffs[k]` is the coefficient of `τ^k`. Trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Poly {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Poly {
        Poly::new(vec![c])
    }

    pub fn zero() -> Poly {
        Poly::new(Vec::new())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial at 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// The antiderivative with constant term `c`.
    pub fn integral(&self, c: f64) -> Poly {
        let mut out = vec![c];
        out.extend(self.coeffs.iter().enumerate().map(|(k, a)| a / (k as f64 + 1.0)));
        Poly::new(out)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Real roots in the open interval `(lo, hi)`, sorted, for degree up to
    /// two. `None` for higher degrees.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        let mut roots = match self.coeffs.as_slice() {
            [] | [_] => Vec::new(),
            [c, b] => vec![-c / b],
            [c, b, a] => {
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    Vec::new()
                } else {
                    // Citardauq form for the root that cancels badly.
                    let sign = if *b >= 0.0 { 1.0 } else { -1.0 };
                    let q = -0.5 * (b + sign * disc.sqrt());
                    let mut r = Vec::new();
                    if q != 0.0 {
                        r.push(q / a);
                        r.push(c / q);
                    } else {
                        r.push(0.0);
                    }
                    r
                }
            }
            _ => return None,
        };
        roots.retain(|r| r.is_finite() && *r > lo && *r < hi);
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        Some(roots)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + o.coeffs.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_integration() {
        let p = Poly::new(vec![1.0, 2.0]);
        let q = &p * &p;
        assert_eq!(q.coeffs(), [1.0, 4.0, 4.0]);
        assert_eq!((&q - &q).degree(), 0);
        assert_eq!(p.integral(3.0).coeffs(), [3.0, 1.0, 1.0]);
        assert_eq!(q.eval(2.0), 25.0);
    }

    #[test]
    fn roots() {
        assert_eq!(Poly::new(vec![30.0, -5.0]).roots_in(0.0, 10.0), Some(vec![6.0]));
        assert_eq!(Poly::new(vec![-4.0, 0.0, 1.0]).roots_in(-5.0, 5.0), Some(vec![-2.0, 2.0]));
        assert_eq!(Poly::new(vec![1.0, 0.0, 1.0]).roots_in(-5.0, 5.0), Some(vec![]));
        assert_eq!(Poly::new(vec![0.0, 0.0, 0.0, 1.0]).roots_in(-1.0, 1.0), None);
        let r = Poly::new(vec![2.0, -3.0, 1.0]).roots_in(0.0, 5.0).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }
}
