use serde::{Deserialize, Serialize};

use super::norm2;

/// Primal norm attached to a geometry, with its dual.
///
/// `Product` composes block norms as `||(x_1, .., x_k)||^2 = sum ||x_i||^2`,
/// whose dual is `sqrt(sum ||u_i||_*^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Norm {
    L2(usize),
    L1(usize),
    Product(Vec<Norm>),
}

impl Norm {
    pub fn dim(&self) -> usize {
        match self {
            Norm::L2(n) | Norm::L1(n) => *n,
            Norm::Product(blocks) => blocks.iter().map(Norm::dim).sum(),
        }
    }

    pub fn primal(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L2(_) => norm2(v),
            Norm::L1(_) => v.iter().map(|x| x.abs()).sum(),
            Norm::Product(blocks) => self.combine(blocks, v, Norm::primal),
        }
    }

    pub fn dual(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L2(_) => norm2(v),
            Norm::L1(_) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::Product(blocks) => self.combine(blocks, v, Norm::dual),
        }
    }

    fn combine(&self, blocks: &[Norm], v: &[f64], f: fn(&Norm, &[f64]) -> f64) -> f64 {
        let mut offset = 0;
        let mut acc = 0.0;
        for b in blocks {
            let d = b.dim();
            let part = f(b, &v[offset..offset + d]);
            acc += part * part;
            offset += d;
        }
        acc.sqrt()
    }
}
