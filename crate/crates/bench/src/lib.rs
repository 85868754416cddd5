//! Seeded fixtures shared by the benchmarks.

use adaprox::geometry::{FeasibleSet, ProxSetup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A prox subproblem `argmin <g, x> + L V(x, anchor)`.
pub struct ProxCase {
    pub setup: ProxSetup,
    pub g: Vec<f64>,
    pub anchor: Vec<f64>,
    pub l: f64,
}

pub fn prox_case(setup: ProxSetup, seed: u64) -> ProxCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = setup.dim();
    let anchor = setup.set().sample(&mut rng);
    // entropy needs a strictly positive anchor
    let anchor = match setup {
        ProxSetup::Entropy { .. } => {
            let a: Vec<f64> = anchor.iter().map(|v| v + 1e-3).collect();
            let s: f64 = a.iter().sum();
            a.into_iter().map(|v| v / s).collect()
        }
        _ => anchor,
    };
    let g = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ProxCase { setup, g, anchor, l: 0.5 }
}

pub fn geometries(n: usize) -> Vec<(&'static str, ProxSetup)> {
    vec![
        ("entropy", ProxSetup::entropy(n).unwrap()),
        ("simplex", ProxSetup::euclidean(FeasibleSet::simplex(n).unwrap()).unwrap()),
        ("box", ProxSetup::euclidean(FeasibleSet::cube(n, -1.0, 1.0).unwrap()).unwrap()),
        ("ball", ProxSetup::euclidean(FeasibleSet::ball(vec![0.0; n], 1.0).unwrap()).unwrap()),
    ]
}
