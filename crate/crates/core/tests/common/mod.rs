#![allow(dead_code)]

use aninorm_core::linalg::{self, Mat};
use aninorm_core::CtStateSpace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

/// Random realization whose spectral abscissa is `-margin`.
pub fn random_stable(seed: u64, n: usize, m: usize, p: usize, margin: f64) -> CtStateSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = random_matrix(&mut rng, n, n);
    if n > 0 {
        let shift = linalg::spectral_abscissa(&a) + margin;
        a -= Mat::identity(n, n) * shift;
    }
    let b = random_matrix(&mut rng, n, m);
    let c = random_matrix(&mut rng, p, n);
    let d = random_matrix(&mut rng, p, m);
    CtStateSpace::new(a, b, c, d).unwrap()
}

pub fn rel_diff(x: &Mat, y: &Mat) -> f64 {
    (x - y).norm() / (1.0 + y.norm())
}
