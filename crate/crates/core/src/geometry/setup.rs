use serde::{Deserialize, Serialize};

use super::{check_dim, dot, sub, FeasibleSet, GeometryError, Norm};

/// Default lower bound kept on entropy iterates after each multiplicative
/// update. Keeps `ln x` finite on every visited point.
pub const DEFAULT_INTERIOR_FLOOR: f64 = 1e-12;

/// A Bregman geometry over a feasible set: distance-generating function `d`,
/// the norm in which `d` is 1-strongly convex, and the prox-mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProxSetup {
    /// `d(x) = ||x||^2 / 2` with the L2 norm over a non-product set.
    Euclidean { set: FeasibleSet },
    /// `d(x) = sum x_i ln x_i` on the simplex, L1 norm.
    Entropy { dim: usize, floor: f64 },
    /// Sum of block geometries with the product norm.
    Product(Vec<ProxSetup>),
}

impl ProxSetup {
    /// Squared-Euclidean geometry. Product sets become products of
    /// Euclidean blocks, which is the same geometry.
    pub fn euclidean(set: FeasibleSet) -> Result<Self, GeometryError> {
        set.validate()?;
        Ok(match set {
            FeasibleSet::Product(blocks) => ProxSetup::Product(
                blocks.into_iter().map(Self::euclidean).collect::<Result<_, _>>()?,
            ),
            set => ProxSetup::Euclidean { set },
        })
    }

    pub fn entropy(dim: usize) -> Result<Self, GeometryError> {
        Self::entropy_with_floor(dim, DEFAULT_INTERIOR_FLOOR)
    }

    pub fn entropy_with_floor(dim: usize, floor: f64) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidSet("simplex of dimension 0".into()));
        }
        if !(floor >= 0.0 && floor * (dim as f64) < 1.0) {
            return Err(GeometryError::Input(format!("interior floor {floor}")));
        }
        Ok(ProxSetup::Entropy { dim, floor })
    }

    pub fn product(blocks: Vec<ProxSetup>) -> Result<Self, GeometryError> {
        if blocks.is_empty() {
            return Err(GeometryError::InvalidSet("empty product".into()));
        }
        Ok(ProxSetup::Product(blocks))
    }

    pub fn dim(&self) -> usize {
        match self {
            ProxSetup::Euclidean { set } => set.dim(),
            ProxSetup::Entropy { dim, .. } => *dim,
            ProxSetup::Product(blocks) => blocks.iter().map(ProxSetup::dim).sum(),
        }
    }

    pub fn set(&self) -> FeasibleSet {
        match self {
            ProxSetup::Euclidean { set } => set.clone(),
            ProxSetup::Entropy { dim, .. } => FeasibleSet::Simplex { dim: *dim },
            ProxSetup::Product(blocks) => {
                FeasibleSet::Product(blocks.iter().map(ProxSetup::set).collect())
            }
        }
    }

    pub fn norm(&self) -> Norm {
        match self {
            ProxSetup::Euclidean { set } => Norm::L2(set.dim()),
            ProxSetup::Entropy { dim, .. } => Norm::L1(*dim),
            ProxSetup::Product(blocks) => Norm::Product(blocks.iter().map(ProxSetup::norm).collect()),
        }
    }

    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        self.norm().dual(v)
    }

    pub fn primal_norm(&self, v: &[f64]) -> f64 {
        self.norm().primal(v)
    }

    fn blocks<'a>(
        blocks: &'a [ProxSetup],
        x: &'a [f64],
    ) -> impl Iterator<Item = (&'a ProxSetup, &'a [f64])> + 'a {
        let mut offset = 0;
        blocks.iter().map(move |b| {
            let d = b.dim();
            let part = &x[offset..offset + d];
            offset += d;
            (b, part)
        })
    }

    /// Value of the distance-generating function.
    pub fn d(&self, x: &[f64]) -> Result<f64, GeometryError> {
        check_dim(self.dim(), x.len())?;
        match self {
            ProxSetup::Euclidean { .. } => Ok(0.5 * dot(x, x)),
            ProxSetup::Entropy { .. } => {
                let mut s = 0.0;
                for (i, &v) in x.iter().enumerate() {
                    if v < 0.0 {
                        return Err(GeometryError::Domain { index: i, value: v });
                    }
                    if v > 0.0 {
                        s += v * v.ln();
                    }
                }
                Ok(s)
            }
            ProxSetup::Product(blocks) => {
                Self::blocks(blocks, x).map(|(b, part)| b.d(part)).sum()
            }
        }
    }

    /// Gradient of the distance-generating function.
    pub fn grad_d(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.dim(), x.len())?;
        match self {
            ProxSetup::Euclidean { .. } => Ok(x.to_vec()),
            ProxSetup::Entropy { .. } => x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v > 0.0 {
                        Ok(v.ln() + 1.0)
                    } else {
                        Err(GeometryError::Domain { index: i, value: v })
                    }
                })
                .collect(),
            ProxSetup::Product(blocks) => {
                let mut out = Vec::with_capacity(x.len());
                for (b, part) in Self::blocks(blocks, x) {
                    out.extend(b.grad_d(part)?);
                }
                Ok(out)
            }
        }
    }

    /// Bregman divergence `V(x, y) = d(x) - d(y) - <grad d(y), x - y>`.
    ///
    /// Euclidean: `||x - y||^2 / 2`. Entropy: `sum x_i ln(x_i / y_i) + sum (y_i - x_i)`,
    /// which is the KL divergence on the simplex, with `0 ln 0 = 0`.
    pub fn bregman(&self, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        match self {
            ProxSetup::Euclidean { .. } => {
                Ok(0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            }
            ProxSetup::Entropy { .. } => {
                let mut v = 0.0;
                for (i, (&xi, &yi)) in x.iter().zip(y).enumerate() {
                    if !(yi > 0.0) {
                        return Err(GeometryError::Domain { index: i, value: yi });
                    }
                    if xi < 0.0 {
                        return Err(GeometryError::Domain { index: i, value: xi });
                    }
                    if xi > 0.0 {
                        v += xi * (xi / yi).ln();
                    }
                    v += yi - xi;
                }
                // rounding can leave tiny negatives
                Ok(v.max(0.0))
            }
            ProxSetup::Product(blocks) => {
                let mut total = 0.0;
                for ((b, xp), (_, yp)) in Self::blocks(blocks, x).zip(Self::blocks(blocks, y)) {
                    total += b.bregman(xp, yp)?;
                }
                Ok(total)
            }
        }
    }

    /// `argmin_{x in Q} <g, x - anchor> + l * V(x, anchor)`.
    pub fn prox_map(&self, g: &[f64], anchor: &[f64], l: f64) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.dim(), g.len())?;
        check_dim(self.dim(), anchor.len())?;
        if !(l > 0.0 && l.is_finite()) {
            return Err(GeometryError::Input(format!("prox constant must be positive, got {l}")));
        }
        if let Some(i) = g.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::Input(format!("non-finite dual vector entry at {i}")));
        }
        self.prox_unchecked(g, anchor, l)
    }

    fn prox_unchecked(&self, g: &[f64], anchor: &[f64], l: f64) -> Result<Vec<f64>, GeometryError> {
        match self {
            ProxSetup::Euclidean { set } => {
                let step: Vec<f64> = anchor.iter().zip(g).map(|(a, gi)| a - gi / l).collect();
                Ok(set.project(&step))
            }
            ProxSetup::Entropy { floor, .. } => {
                // x_i ∝ anchor_i exp(-g_i / l), evaluated in log space
                let mut w = Vec::with_capacity(anchor.len());
                for (i, (&a, &gi)) in anchor.iter().zip(g).enumerate() {
                    if !(a > 0.0) {
                        return Err(GeometryError::Domain { index: i, value: a });
                    }
                    w.push(a.ln() - gi / l);
                }
                let top = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut z: Vec<f64> = w.iter().map(|v| (v - top).exp()).collect();
                normalize(&mut z);
                if *floor > 0.0 && z.iter().any(|&v| v < *floor) {
                    z.iter_mut().for_each(|v| *v = v.max(*floor));
                    normalize(&mut z);
                }
                Ok(z)
            }
            ProxSetup::Product(blocks) => {
                let mut out = Vec::with_capacity(anchor.len());
                for ((b, gp), (_, ap)) in Self::blocks(blocks, g).zip(Self::blocks(blocks, anchor)) {
                    out.extend(b.prox_unchecked(gp, ap, l)?);
                }
                Ok(out)
            }
        }
    }

    /// `x0 = argmin_{x in Q} d(x)`.
    pub fn prox_center(&self) -> Vec<f64> {
        match self {
            ProxSetup::Euclidean { set } => set.project(&vec![0.0; set.dim()]),
            ProxSetup::Entropy { dim, .. } => vec![1.0 / *dim as f64; *dim],
            ProxSetup::Product(blocks) => blocks.iter().flat_map(ProxSetup::prox_center).collect(),
        }
    }

    /// `R^2 = max_{x in Q} V(x, x0)`. Exact for every supported geometry:
    /// the maximum of a convex function over a polytope sits at a vertex,
    /// and balls have a radial closed form.
    pub fn prox_radius_sq(&self) -> f64 {
        match self {
            ProxSetup::Euclidean { set } => {
                let x0 = self.prox_center();
                match set {
                    FeasibleSet::Box { lower, upper } => lower
                        .iter()
                        .zip(upper)
                        .zip(&x0)
                        .map(|((l, u), c)| 0.5 * ((l - c) * (l - c)).max((u - c) * (u - c)))
                        .sum(),
                    FeasibleSet::EuclideanBall { center, radius } => {
                        let off = super::norm2(&sub(center, &x0));
                        0.5 * (off + radius) * (off + radius)
                    }
                    FeasibleSet::Simplex { dim } => (0..*dim)
                        .map(|i| {
                            let mut s = 0.0;
                            for (j, c) in x0.iter().enumerate() {
                                let e = if i == j { 1.0 } else { 0.0 };
                                s += (e - c) * (e - c);
                            }
                            0.5 * s
                        })
                        .fold(0.0, f64::max),
                    FeasibleSet::Product(_) => unreachable!("euclidean setups hold non-product sets"),
                }
            }
            ProxSetup::Entropy { dim, .. } => (*dim as f64).ln(),
            ProxSetup::Product(blocks) => blocks.iter().map(ProxSetup::prox_radius_sq).sum(),
        }
    }

    /// `max_{x, y in Q} V(x, y)`, or `None` when unbounded (entropy on a
    /// simplex with more than one point).
    pub fn bregman_diameter_sq(&self) -> Option<f64> {
        match self {
            ProxSetup::Euclidean { set } => Some(match set {
                FeasibleSet::Box { lower, upper } => {
                    0.5 * lower.iter().zip(upper).map(|(l, u)| (u - l) * (u - l)).sum::<f64>()
                }
                FeasibleSet::EuclideanBall { radius, .. } => 2.0 * radius * radius,
                FeasibleSet::Simplex { dim } => {
                    if *dim > 1 {
                        1.0
                    } else {
                        0.0
                    }
                }
                FeasibleSet::Product(_) => unreachable!("euclidean setups hold non-product sets"),
            }),
            ProxSetup::Entropy { dim, .. } => (*dim == 1).then_some(0.0),
            ProxSetup::Product(blocks) => blocks.iter().map(ProxSetup::bregman_diameter_sq).sum(),
        }
    }
}

fn normalize(z: &mut [f64]) {
    let s: f64 = z.iter().sum();
    z.iter_mut().for_each(|v| *v /= s);
}
