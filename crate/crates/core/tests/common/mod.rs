#![allow(dead_code)]

use nalgebra::DVector;
use num_complex::Complex64;
use torsionworks::algebra::{Representation, Target};
use torsionworks::linalg::{c64, CMatrix};

/// `g ↦ diag(λ, λ⁻¹)` for every generator in `lambdas`.
pub fn diagonal_rep(lambdas: &[Complex64]) -> Representation {
    let images = lambdas
        .iter()
        .map(|&l| CMatrix::from_diagonal(&DVector::from_vec(vec![l, l.inv()])))
        .collect();
    Representation::new(Target::Sl, 2, images).unwrap()
}

pub fn real(l: f64) -> Complex64 {
    c64(l, 0.0)
}

/// `1 + i`; `diag(λ, λ⁻¹)` lies in SL₂ for every λ ≠ 0.
pub fn one_plus_i() -> Complex64 {
    c64(1.0, 1.0)
}

/// Random element of SL₂(ℂ).
pub fn random_sl2<R: rand::Rng + ?Sized>(rng: &mut R) -> CMatrix {
    loop {
        let g = torsionworks::linalg::random_gaussian(rng, 2, 2);
        let d = torsionworks::linalg::det(&g);
        if d.norm() > 1e-2 {
            return g / d.sqrt();
        }
    }
}
