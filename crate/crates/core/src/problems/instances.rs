use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ProblemError;
use crate::field::{AffineField, BilinearField, FieldOracle, HolderConstant, HolderField};
use crate::geometry::{FeasibleSet, Norm, ProxSetup};

/// Structure kept alongside the oracle, for structure-specific diagnostics
/// such as the saddle gap.
#[derive(Debug, Clone)]
pub enum Structure {
    Bilinear { a: DMatrix<f64> },
    Affine { matrix: DMatrix<f64>, offset: DVector<f64> },
    Holder { center: Vec<f64>, nu: f64 },
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub oracle: FieldOracle,
    pub setup: ProxSetup,
    pub known_l: Option<f64>,
    pub known_solution: Option<Vec<f64>>,
    pub rng_seed: u64,
    pub structure: Structure,
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.setup.dim()
    }
}

/// Matrix game `min_x max_y x^T A y` over `Simplex(m) x Simplex(n)` with
/// entropy on each block, `A_ij ~ U[-scale, scale]`.
pub fn make_bilinear_saddle(m: usize, n: usize, entry_scale: f64, seed: u64) -> Result<ProblemInstance, ProblemError> {
    if m == 0 || n == 0 {
        return Err(ProblemError::Parameter(format!("game dimensions must be positive, got {m}x{n}")));
    }
    if !(entry_scale >= 0.0 && entry_scale.is_finite()) {
        return Err(ProblemError::Parameter(format!("entry scale {entry_scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(m, n, |_, _| {
        if entry_scale == 0.0 {
            0.0
        } else {
            rng.random_range(-entry_scale..=entry_scale)
        }
    });
    let mut inst = bilinear_from_matrix(a)?;
    inst.name = format!("bilinear-{m}x{n}-s{seed}");
    inst.rng_seed = seed;
    Ok(inst)
}

/// Bilinear instance for a given payoff matrix. Under the block norm
/// `||(x, y)||^2 = ||x||_1^2 + ||y||_1^2` the field is `max |A_ij|`-Lipschitz.
pub fn bilinear_from_matrix(a: DMatrix<f64>) -> Result<ProblemInstance, ProblemError> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(ProblemError::Parameter("empty payoff matrix".into()));
    }
    let known_l = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let setup = ProxSetup::product(vec![ProxSetup::entropy(m)?, ProxSetup::entropy(n)?])?;
    let oracle = FieldOracle::new(BilinearField::new(a.clone())).monotone(true).with_lipschitz(known_l);
    Ok(ProblemInstance {
        name: format!("bilinear-{m}x{n}"),
        oracle,
        setup,
        known_l: Some(known_l),
        known_solution: None,
        rng_seed: 0,
        structure: Structure::Bilinear { a },
    })
}

/// `g(x) = M x + b` over the given geometry. The field is flagged monotone
/// when the symmetric part of `M` is positive semidefinite.
pub fn make_affine_vi(matrix: DMatrix<f64>, offset: DVector<f64>, setup: ProxSetup) -> Result<ProblemInstance, ProblemError> {
    let n = setup.dim();
    if !matrix.is_square() || matrix.nrows() != n || offset.len() != n {
        return Err(ProblemError::Dimension(format!(
            "matrix {}x{} and offset {} against a set of dimension {n}",
            matrix.nrows(),
            matrix.ncols(),
            offset.len()
        )));
    }
    let sym = (&matrix + matrix.transpose()) * 0.5;
    let monotone = sym.symmetric_eigenvalues().min() >= -1e-12;
    let known_l = operator_norm(&matrix, &setup.norm());
    let oracle = FieldOracle::new(AffineField::new(matrix.clone(), offset.clone()))
        .monotone(monotone)
        .with_lipschitz(known_l);
    Ok(ProblemInstance {
        name: format!("affine-{n}"),
        oracle,
        setup,
        known_l: Some(known_l),
        known_solution: None,
        rng_seed: 0,
        structure: Structure::Affine { matrix, offset },
    })
}

/// Random monotone affine VI: `M = G^T G / n + (K - K^T) / 2`, entries of
/// `G`, `K` and `b` uniform in `[-1, 1]`.
pub fn random_affine_vi(n: usize, seed: u64, setup: ProxSetup) -> Result<ProblemInstance, ProblemError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
    let k = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
    let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    let m = g.transpose() * &g / n as f64 + (&k - k.transpose()) * 0.5;
    let mut inst = make_affine_vi(m, b, setup)?;
    inst.name = format!("affine-{n}-s{seed}");
    inst.rng_seed = seed;
    Ok(inst)
}

/// Operator norm of `M` from the primal norm to its dual. Exact for `L2`
/// (largest singular value) and `L1` (largest absolute entry). For product
/// norms it returns the upper bound `sqrt(sum_ij ||M_ij||^2)` over blocks.
pub fn operator_norm(matrix: &DMatrix<f64>, norm: &Norm) -> f64 {
    let leaves = flatten(norm);
    if leaves.len() == 1 {
        return leaf_operator_norm(matrix, leaves[0], leaves[0]);
    }
    let mut offsets = Vec::with_capacity(leaves.len());
    let mut off = 0;
    for l in &leaves {
        offsets.push(off);
        off += l.dim();
    }
    let mut total = 0.0;
    for (i, row_norm) in leaves.iter().enumerate() {
        for (j, col_norm) in leaves.iter().enumerate() {
            let block = matrix.view((offsets[i], offsets[j]), (row_norm.dim(), col_norm.dim())).into_owned();
            let b = leaf_operator_norm(&block, col_norm, row_norm);
            total += b * b;
        }
    }
    total.sqrt()
}

fn flatten(norm: &Norm) -> Vec<&Norm> {
    match norm {
        Norm::Product(blocks) => blocks.iter().flat_map(flatten).collect(),
        leaf => vec![leaf],
    }
}

/// `sup ||M v||_{dual of out} / ||v||_in` for leaf norms.
fn leaf_operator_norm(m: &DMatrix<f64>, input: &Norm, output: &Norm) -> f64 {
    match (input, output) {
        (Norm::L2(_), Norm::L2(_)) => m.clone().singular_values().max(),
        (Norm::L1(_), Norm::L1(_)) => m.amax(),
        // L1 -> L2: largest column 2-norm
        (Norm::L1(_), Norm::L2(_)) => m.column_iter().map(|c| c.norm()).fold(0.0, f64::max),
        // L2 -> Linf: largest row 2-norm
        (Norm::L2(_), Norm::L1(_)) => m.row_iter().map(|r| r.norm()).fold(0.0, f64::max),
        _ => unreachable!("leaf norms only"),
    }
}

/// Interior reference point used as the zero of the Hölder field: box
/// coordinates are staggered at `l + (u - l)(i + 1)/(n + 1)`, balls use the
/// center and simplices the barycenter.
pub fn holder_center(set: &FeasibleSet) -> Vec<f64> {
    match set {
        FeasibleSet::Box { lower, upper } => {
            let n = lower.len() as f64;
            lower
                .iter()
                .zip(upper)
                .enumerate()
                .map(|(i, (l, u))| l + (u - l) * (i as f64 + 1.0) / (n + 1.0))
                .collect()
        }
        FeasibleSet::EuclideanBall { center, .. } => center.clone(),
        FeasibleSet::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
        FeasibleSet::Product(blocks) => blocks.iter().flat_map(holder_center).collect(),
    }
}

/// Hölder constant of the signed-power field in L2 on `R^n`:
/// `2^(1-nu) n^((1-nu)/2)`. The `2^(1-nu)` factor covers pairs on opposite
/// sides of the center.
pub fn holder_constant_l2(n: usize, nu: f64) -> f64 {
    2f64.powf(1.0 - nu) * (n as f64).powf((1.0 - nu) / 2.0)
}

/// Signed-power field `g_i(x) = sign(x_i - c_i)|x_i - c_i|^nu` over `set`
/// with Euclidean geometry. The center is the known solution.
pub fn make_holder_field(n: usize, nu: f64, set: FeasibleSet) -> Result<ProblemInstance, ProblemError> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(ProblemError::Parameter(format!("Hölder exponent {nu} outside [0, 1]")));
    }
    if set.dim() != n {
        return Err(ProblemError::Dimension(format!("n = {n} but the set has dimension {}", set.dim())));
    }
    let center = holder_center(&set);
    let setup = ProxSetup::euclidean(set.clone())?;
    let mut params = vec![HolderConstant { nu, constant: holder_constant_l2(n, nu) }];
    if nu > 0.0 {
        // bounded field: ||g(x) - g(y)|| <= 2 sup ||g||
        let mut sup_sq = 0.0;
        for (i, c) in center.iter().enumerate() {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let hi = set.support(&e).0;
            e[i] = -1.0;
            let lo = -set.support(&e).0;
            sup_sq += (hi - c).abs().max((c - lo).abs()).powf(2.0 * nu);
        }
        params.push(HolderConstant { nu: 0.0, constant: 2.0 * sup_sq.sqrt() });
    }
    let mut oracle = FieldOracle::new(HolderField { center: center.clone(), nu })
        .monotone(true)
        .with_holder(params);
    let known_l = (nu == 1.0).then_some(1.0);
    if let Some(l) = known_l {
        oracle = oracle.with_lipschitz(l);
    }
    Ok(ProblemInstance {
        name: format!("holder-{n}-nu{nu}"),
        oracle,
        setup,
        known_l,
        known_solution: Some(center.clone()),
        rng_seed: 0,
        structure: Structure::Holder { center, nu },
    })
}
