//! Seeded samplers. Everything random in the crate goes through a
//! `ChaCha8Rng` built from an explicit `u64` seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cstar::AlgebraElement;
use crate::hilbert::ModuleVector;
use crate::{CMatrix, Complex64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed for sample `index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian: real and imaginary parts are `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Unit-norm complex Gaussian coefficient sequence.
pub fn unit_sequence<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn algebra_element<R: Rng + ?Sized>(rng: &mut R, d: usize) -> AlgebraElement {
    AlgebraElement::from_matrix(gaussian_matrix(rng, d, d)).expect("square by construction")
}

pub fn module_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> ModuleVector {
    ModuleVector::from_matrix(n, d, gaussian_matrix(rng, d, n * d)).expect("shape by construction")
}

/// Random vector with module norm one.
pub fn unit_module_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> ModuleVector {
    loop {
        let f = module_vector(rng, n, d);
        let norm = f.norm();
        if norm > 1e-300 {
            return f.scaled(1.0 / norm);
        }
    }
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, size: usize) -> CMatrix {
    let g = gaussian_matrix(rng, size, size);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..size {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..size {
            q[(row, k)] *= phase;
        }
    }
    q
}
