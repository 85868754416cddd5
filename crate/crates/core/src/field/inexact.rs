use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{FieldError, FieldOracle, Oracle};
use crate::geometry::Norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// `g~(x) = g(x) + eta(x)` with `||eta(x)||_* <= delta_u`. Uses
    /// `delta_c = 0` and the exact field's Lipschitz constant.
    AdditiveBoundedDual,
}

/// Inexact field oracle with a controllable error `delta_c` and an
/// uncontrollable error `delta_u`.
///
/// The noise at `x` is a deterministic function of `(noise_seed, x)`: a
/// Gaussian direction normalized to unit dual norm, scaled by `delta_u * u`
/// with `u ~ U[0, 1)`.
#[derive(Debug, Clone)]
pub struct InexactOracle {
    pub inner: FieldOracle,
    pub delta_c: f64,
    pub delta_u: f64,
    pub noise_seed: u64,
    pub model: NoiseModel,
    norm: Norm,
}

impl InexactOracle {
    /// `norm` is the primal norm of the geometry; noise is bounded in its dual.
    pub fn new(inner: FieldOracle, norm: Norm, delta_u: f64, noise_seed: u64) -> Self {
        assert!(delta_u >= 0.0 && delta_u.is_finite(), "delta_u must be a finite non-negative number");
        assert_eq!(inner.dim(), norm.dim(), "norm dimension");
        InexactOracle {
            inner,
            delta_c: 0.0,
            delta_u,
            noise_seed,
            model: NoiseModel::AdditiveBoundedDual,
            norm,
        }
    }

    pub fn with_delta_c(mut self, delta_c: f64) -> Self {
        self.delta_c = delta_c;
        self
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn eval_inexact(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        let mut g = self.inner.eval(x)?;
        if self.delta_u > 0.0 {
            for (gi, ei) in g.iter_mut().zip(self.noise(x)) {
                *gi += ei;
            }
        }
        Ok(g)
    }

    /// The perturbation `eta(x)`.
    pub fn noise(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if self.delta_u == 0.0 {
            return vec![0.0; n];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(point_hash(self.noise_seed, x));
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = self.norm.dual(&dir);
        if len == 0.0 {
            return vec![0.0; n];
        }
        let scale = self.delta_u * rng.random::<f64>() / len;
        let mut eta: Vec<f64> = dir.iter().map(|d| d * scale).collect();
        // rounding in the scaling must not push eta out of the ball
        let actual = self.norm.dual(&eta);
        if actual > self.delta_u {
            let shrink = self.delta_u / actual;
            eta.iter_mut().for_each(|e| *e *= shrink);
        }
        eta
    }
}

impl Oracle for InexactOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn query(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.eval_inexact(x)
    }

    fn calls(&self) -> u64 {
        self.inner.calls()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn point_hash(seed: u64, x: &[f64]) -> u64 {
    x.iter().fold(splitmix64(seed), |h, v| splitmix64(h ^ v.to_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::AffineField;
    use crate::geometry::FeasibleSet;
    use nalgebra::{DMatrix, DVector};
    use rand_chacha::ChaCha8Rng;

    fn affine(n: usize) -> FieldOracle {
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.1 * (i as f64 - j as f64) });
        FieldOracle::new(AffineField::new(m, DVector::from_element(n, 0.3)))
    }

    #[test]
    fn zero_noise_is_exact() {
        let o = InexactOracle::new(affine(3), Norm::L2(3), 0.0, 4);
        let x = [0.1, -0.2, 0.7];
        assert_eq!(o.eval_inexact(&x).unwrap(), o.inner.eval(&x).unwrap());
    }

    #[test]
    fn noise_is_deterministic() {
        let o = InexactOracle::new(affine(3), Norm::L1(3), 0.1, 4);
        let x = [0.2, 0.3, 0.5];
        assert_eq!(o.eval_inexact(&x).unwrap(), o.eval_inexact(&x).unwrap());
        let other = InexactOracle::new(affine(3), Norm::L1(3), 0.1, 5);
        assert_ne!(o.eval_inexact(&x).unwrap(), other.eval_inexact(&x).unwrap());
    }

    #[test]
    fn noise_respects_dual_bound() {
        let set = FeasibleSet::simplex(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for norm in [Norm::L1(6), Norm::L2(6), Norm::Product(vec![Norm::L1(2), Norm::L1(4)])] {
            let o = InexactOracle::new(affine(6), norm.clone(), 0.1, 77);
            let mut largest: f64 = 0.0;
            for _ in 0..1000 {
                let x = set.sample(&mut rng);
                let eta = o.noise(&x);
                assert!(norm.dual(&eta) <= 0.1);
                let diff: Vec<f64> = o
                    .eval_inexact(&x)
                    .unwrap()
                    .iter()
                    .zip(o.inner.eval(&x).unwrap())
                    .map(|(a, b)| a - b)
                    .collect();
                // the subtraction g~ - g itself rounds at the 1e-16 level
                assert!(norm.dual(&diff) <= 0.1 + 1e-12);
                largest = largest.max(norm.dual(&eta));
            }
            // the bound is actually approached
            assert!(largest > 0.09);
        }
    }

    #[test]
    fn calls_go_through_inner_counter() {
        let o = InexactOracle::new(affine(2), Norm::L2(2), 0.5, 0);
        o.eval_inexact(&[0.0, 0.0]).unwrap();
        o.query(&[1.0, 0.0]).unwrap();
        assert_eq!(Oracle::calls(&o), 2);
    }
}
