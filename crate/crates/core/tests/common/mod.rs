#![allow(dead_code)]

use fusionlab::fuchsian::MatrixSeries;
use fusionlab::mat::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_mat(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Mat<Complex64> {
    Mat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
}

/// Random Fuchsian system whose residue has two planted resonances:
/// eigenvalues `λ1, λ1 + 1, λ2, λ2 + 2`.
pub fn resonant_system(rng: &mut ChaCha8Rng, order: usize) -> MatrixSeries<Complex64> {
    let l1 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let l2 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let d = Mat::diag(&[l1, l1 + 1.0, l2, l2 + 2.0]);
    let p = &Mat::identity(4) + &random_mat(rng, 4, 0.4);
    let a0 = &(&p * &d) * &p.inverse().unwrap();
    let mut coeffs = vec![a0];
    for k in 1..=order {
        coeffs.push(random_mat(rng, 4, 0.5f64.powi(k as i32)));
    }
    MatrixSeries::new(coeffs, c(0.0, 0.0), 2.0).unwrap()
}

pub fn eigenvalues(m: &Mat<Complex64>) -> Vec<Complex64> {
    let n = m.rows();
    let d = DMatrix::<Complex64>::from_fn(n, n, |i, j| m[(i, j)]);
    d.schur().eigenvalues().unwrap().iter().copied().collect()
}

/// Greedy multiset matching; returns the worst pairing distance.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub mod testbed {
    use fusionlab::heisenberg::{partitions, FockModule, FourPoint, Partition};
    use fusionlab::rewriter::{fock_modules, Quadruple, Reducer};
    use fusionlab::scalar::Q;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn random_partition(rng: &mut ChaCha8Rng, max_grade: u32) -> Partition {
        let g = rng.gen_range(0..=max_grade);
        let all = partitions(g);
        all[rng.gen_range(0..all.len())].clone()
    }

    pub fn reducer(momenta: &[Q; 3], cutoff: u32, n: u32) -> Reducer<FockModule> {
        Reducer::new(fock_modules(momenta, cutoff), n)
    }

    pub fn random_quadruple(
        rng: &mut ChaCha8Rng,
        red: &Reducer<FockModule>,
        theta_max: u32,
        slot_max: u32,
    ) -> Quadruple<Partition> {
        red.quadruple(
            random_partition(rng, theta_max),
            random_partition(rng, slot_max),
            random_partition(rng, slot_max),
            random_partition(rng, slot_max),
        )
    }

    pub fn four_point(momenta: &[Q; 3]) -> FourPoint {
        FourPoint::new(momenta[0].clone(), momenta[1].clone(), momenta[2].clone())
    }
}
