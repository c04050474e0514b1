#![allow(dead_code)]

use conal::{linalg, LaurentPolynomial, ScalarRationalSpectrum, Spectrum, StateSpace, TransferFunction};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

/// Random stable `p x m` system of order `n` with spectral radius in `[0.1, radius]`.
pub fn random_stable(rng: &mut ChaCha8Rng, n: usize, p: usize, m: usize, radius: f64) -> StateSpace {
    let mut a = normal(rng, n, n);
    if n > 0 {
        let rho = linalg::spectral_radius(&a).unwrap().max(1e-3);
        let target = rng.gen_range(0.1..radius);
        a *= target / rho;
    }
    let b = normal(rng, n, m) * 0.7;
    let c = normal(rng, p, n) * 0.7;
    let mut d = normal(rng, p, m) * 0.3;
    for i in 0..p.min(m) {
        d[(i, i)] += 1.5;
    }
    StateSpace::new(a, b, c, d).unwrap()
}

/// Real polynomial in `z^{-1}` (leading 1) with random roots of modulus below `radius`.
pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize, radius: f64) -> Vec<f64> {
    let mut p = vec![1.0];
    let mut left = degree;
    while left > 0 {
        let r = rng.gen_range(0.05..radius);
        if left >= 2 && rng.gen_bool(0.6) {
            let w = rng.gen_range(0.0..std::f64::consts::PI);
            p = conal::poly::convolve(&p, &[1.0, -2.0 * r * w.cos(), r * r]);
            left -= 2;
        } else {
            let s = if rng.gen_bool(0.5) { r } else { -r };
            p = conal::poly::convolve(&p, &[1.0, -s]);
            left -= 1;
        }
    }
    p
}

pub fn random_tf(rng: &mut ChaCha8Rng, nb: usize, na: usize) -> TransferFunction {
    let gain = rng.gen_range(0.3..3.0);
    let b: Vec<f64> = random_poly(rng, nb, 0.85).iter().map(|x| x * gain).collect();
    TransferFunction::new(b, random_poly(rng, na, 0.85)).unwrap()
}

pub fn random_scalar(rng: &mut ChaCha8Rng) -> Spectrum {
    let nb = rng.gen_range(0..=2);
    let na = rng.gen_range(1..=3);
    Spectrum::Scalar(random_tf(rng, nb, na).spectrum())
}

/// Random square factor spectrum of size `p`.
pub fn random_factor(rng: &mut ChaCha8Rng, p: usize) -> Spectrum {
    let n = rng.gen_range(1..=4);
    Spectrum::Factor(random_stable(rng, n, p, p, 0.8))
}

pub fn scalar(num: &[f64], den: &[f64]) -> Spectrum {
    Spectrum::Scalar(
        ScalarRationalSpectrum::new(
            LaurentPolynomial::new(num.to_vec()).unwrap(),
            LaurentPolynomial::new(den.to_vec()).unwrap(),
        )
        .unwrap(),
    )
}

/// `4 / (5 - 4 cos)` and `9 / (10 + 6 cos)`.
pub fn example_pair() -> (Spectrum, Spectrum) {
    (scalar(&[4.0], &[-2.0, 5.0, -2.0]), scalar(&[9.0], &[3.0, 10.0, 3.0]))
}

/// Pulse train through an all-pole filter plus a little noise.
pub fn synthetic_vowel(rng: &mut ChaCha8Rng, a: &[f64], pitch: f64, fs: u32, seconds: f64) -> Vec<f64> {
    let n = (seconds * fs as f64).round() as usize;
    let period = (fs as f64 / pitch).round() as usize;
    let mut y = vec![0.0; n];
    for t in 0..n {
        let mut v = if t % period == 0 { 1.0 } else { 0.0 };
        let e: f64 = StandardNormal.sample(rng);
        v += 1e-3 * e;
        for (j, aj) in a.iter().enumerate().skip(1) {
            if t >= j {
                v -= aj * y[t - j];
            }
        }
        y[t] = v;
    }
    let peak = y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    y.iter().map(|x| 0.5 * x / peak).collect()
}

/// AR polynomial with resonances at the given (Hz, radius) pairs.
pub fn formants(fs: u32, peaks: &[(f64, f64)]) -> Vec<f64> {
    peaks.iter().fold(vec![1.0], |p, &(f, r)| {
        let w = 2.0 * std::f64::consts::PI * f / fs as f64;
        conal::poly::convolve(&p, &[1.0, -2.0 * r * w.cos(), r * r])
    })
}
