use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_dim, dot, norm2, project_onto_simplex, GeometryError};

/// A convex compact feasible set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    /// The probability simplex in `R^dim`.
    Simplex { dim: usize },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    EuclideanBall { center: Vec<f64>, radius: f64 },
    /// Cartesian product; coordinates are laid out block after block.
    Product(Vec<FeasibleSet>),
}

impl FeasibleSet {
    pub fn simplex(dim: usize) -> Result<Self, GeometryError> {
        let s = FeasibleSet::Simplex { dim };
        s.validate()?;
        Ok(s)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        let s = FeasibleSet::Box { lower, upper };
        s.validate()?;
        Ok(s)
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, GeometryError> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        let s = FeasibleSet::EuclideanBall { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn product(blocks: Vec<FeasibleSet>) -> Result<Self, GeometryError> {
        let s = FeasibleSet::Product(blocks);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            FeasibleSet::Simplex { dim } => {
                if *dim == 0 {
                    return Err(GeometryError::InvalidSet("simplex of dimension 0".into()));
                }
            }
            FeasibleSet::Box { lower, upper } => {
                check_dim(lower.len(), upper.len())?;
                if lower.is_empty() {
                    return Err(GeometryError::InvalidSet("box of dimension 0".into()));
                }
                for (i, (l, u)) in lower.iter().zip(upper).enumerate() {
                    if !(l.is_finite() && u.is_finite() && l <= u) {
                        return Err(GeometryError::InvalidSet(format!(
                            "box bounds [{l}, {u}] at coordinate {i}"
                        )));
                    }
                }
            }
            FeasibleSet::EuclideanBall { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return Err(GeometryError::InvalidSet("ball center".into()));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(GeometryError::InvalidSet(format!("ball radius {radius}")));
                }
            }
            FeasibleSet::Product(blocks) => {
                if blocks.is_empty() {
                    return Err(GeometryError::InvalidSet("empty product".into()));
                }
                for b in blocks {
                    b.validate()?;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Simplex { dim } => *dim,
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::EuclideanBall { center, .. } => center.len(),
            FeasibleSet::Product(blocks) => blocks.iter().map(FeasibleSet::dim).sum(),
        }
    }

    /// Splits `x` into per-block slices, for product sets.
    pub(crate) fn for_each_block<'a>(
        blocks: &'a [FeasibleSet],
        x: &'a [f64],
    ) -> impl Iterator<Item = (&'a FeasibleSet, &'a [f64])> + 'a {
        let mut offset = 0;
        blocks.iter().map(move |b| {
            let d = b.dim();
            let part = &x[offset..offset + d];
            offset += d;
            (b, part)
        })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            FeasibleSet::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            FeasibleSet::EuclideanBall { center, radius } => {
                let d: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d.sqrt() <= radius + tol
            }
            FeasibleSet::Product(blocks) => {
                Self::for_each_block(blocks, x).all(|(b, part)| b.contains(part, tol))
            }
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::Simplex { .. } => project_onto_simplex(v),
            FeasibleSet::Box { lower, upper } => v
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&x, (&l, &u))| x.clamp(l, u))
                .collect(),
            FeasibleSet::EuclideanBall { center, radius } => {
                let diff: Vec<f64> = v.iter().zip(center).map(|(a, c)| a - c).collect();
                let dist = norm2(&diff);
                if dist <= *radius {
                    v.to_vec()
                } else {
                    let s = radius / dist;
                    center.iter().zip(&diff).map(|(c, d)| c + s * d).collect()
                }
            }
            FeasibleSet::Product(blocks) => Self::for_each_block(blocks, v)
                .flat_map(|(b, part)| b.project(part))
                .collect(),
        }
    }

    /// Exact maximum of the linear functional `<c, x>` over the set, with a
    /// maximizer. Simplex: best vertex (lowest index on ties). Box:
    /// coordinatewise. Ball: `<c, center> + r ||c||`. Product: blockwise.
    pub fn support(&self, c: &[f64]) -> (f64, Vec<f64>) {
        match self {
            FeasibleSet::Simplex { dim } => {
                let mut best = 0;
                for i in 1..*dim {
                    if c[i] > c[best] {
                        best = i;
                    }
                }
                let mut x = vec![0.0; *dim];
                x[best] = 1.0;
                (c[best], x)
            }
            FeasibleSet::Box { lower, upper } => {
                let x: Vec<f64> = c
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&ci, (&l, &u))| if ci > 0.0 { u } else { l })
                    .collect();
                (dot(c, &x), x)
            }
            FeasibleSet::EuclideanBall { center, radius } => {
                let nc = norm2(c);
                let x: Vec<f64> = if nc > 0.0 {
                    center.iter().zip(c).map(|(o, ci)| o + radius * ci / nc).collect()
                } else {
                    center.clone()
                };
                (dot(c, center) + radius * nc, x)
            }
            FeasibleSet::Product(blocks) => {
                let mut total = 0.0;
                let mut x = Vec::with_capacity(self.dim());
                for (b, part) in Self::for_each_block(blocks, c) {
                    let (v, xb) = b.support(part);
                    total += v;
                    x.extend(xb);
                }
                (total, x)
            }
        }
    }

    /// Random feasible point. Simplex points are uniform (normalized
    /// exponentials), so they lie in the relative interior almost surely.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeasibleSet::Simplex { dim } => {
                let e: Vec<f64> = (0..*dim).map(|_| Exp1.sample(rng)).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|v| v / s).collect()
            }
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| l + (u - l) * rng.random::<f64>())
                .collect(),
            FeasibleSet::EuclideanBall { center, radius } => {
                let n = center.len();
                let dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
                let nd = norm2(&dir).max(f64::MIN_POSITIVE);
                let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
                center.iter().zip(&dir).map(|(c, d)| c + r * d / nd).collect()
            }
            FeasibleSet::Product(blocks) => blocks.iter().flat_map(|b| b.sample(rng)).collect(),
        }
    }

    /// Test points for certificate checks: all vertices when there are at
    /// most `vertex_limit` of them, followed by `random` seeded samples.
    pub fn probe_points(&self, vertex_limit: usize, random: usize, seed: u64) -> Vec<Vec<f64>> {
        use rand::SeedableRng;
        let mut probes = self.vertices(vertex_limit).unwrap_or_default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        probes.extend((0..random).map(|_| self.sample(&mut rng)));
        probes
    }

    /// Extreme points of a polytope, if there are at most `limit` of them.
    /// Balls have no finite vertex set.
    pub fn vertices(&self, limit: usize) -> Option<Vec<Vec<f64>>> {
        match self {
            FeasibleSet::Simplex { dim } => {
                if *dim > limit {
                    return None;
                }
                Some(
                    (0..*dim)
                        .map(|i| {
                            let mut v = vec![0.0; *dim];
                            v[i] = 1.0;
                            v
                        })
                        .collect(),
                )
            }
            FeasibleSet::Box { lower, upper } => {
                let n = lower.len();
                if n >= usize::BITS as usize || (1usize << n) > limit {
                    return None;
                }
                Some(
                    (0..1usize << n)
                        .map(|mask| {
                            (0..n)
                                .map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                                .collect()
                        })
                        .collect(),
                )
            }
            FeasibleSet::EuclideanBall { .. } => None,
            FeasibleSet::Product(blocks) => {
                let mut acc: Vec<Vec<f64>> = vec![Vec::new()];
                for b in blocks {
                    let vs = b.vertices(limit)?;
                    if acc.len().saturating_mul(vs.len()) > limit {
                        return None;
                    }
                    acc = acc
                        .iter()
                        .flat_map(|head| {
                            vs.iter().map(move |v| {
                                let mut h = head.clone();
                                h.extend_from_slice(v);
                                h
                            })
                        })
                        .collect();
                }
                Some(acc)
            }
        }
    }
}
