//! Streaming, mergeable mean and Hermitian covariance estimators for
//! complex vectors of fixed length `D`.

use num_complex::Complex64;
#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct MeanAccumulator<const D: usize> {
    count: u64,
    mean: [Complex64; D],
    m2: [f64; D],
}

/// Finalized mean with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate<const D: usize> {
    pub value: [Complex64; D],
    pub std_error: [f64; D],
    pub count: u64,
}

impl<const D: usize> Default for MeanAccumulator<D> {
    fn default() -> Self {
        Self::new()
    }
}

impl<const D: usize> MeanAccumulator<D> {
    pub const fn new() -> Self {
        Self { count: 0, mean: [ZERO; D], m2: [0.0; D] }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn update(&mut self, x: &[Complex64; D]) {
        self.count += 1;
        let n = self.count as f64;
        let f = (n - 1.0) / n;
        for c in 0..D {
            let d = x[c] - self.mean[c];
            self.mean[c] += d / n;
            self.m2[c] += f * d.norm_sqr();
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            self.clone_from(other);
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for c in 0..D {
            let d = other.mean[c] - self.mean[c];
            self.mean[c] += d * (nb / n);
            self.m2[c] += other.m2[c] + d.norm_sqr() * (na * nb / n);
        }
        self.count += other.count;
    }

    pub fn finalize(&self) -> Result<MeanEstimate<D>> {
        if self.count == 0 {
            return Err(Error::EmptyAccumulator);
        }
        let n = self.count as f64;
        Ok(MeanEstimate {
            value: self.mean,
            std_error: self.m2.map(|m2| (m2 / n / n).sqrt()),
            count: self.count,
        })
    }
}

/// Running estimate of `C[u, v] = E[(u − Eu) conj(v − Ev)]`, componentwise.
///
/// Besides the co-moment it tracks both second moments and the
/// pseudo-co-moment `Σ(u − ū)(v − v̄)`, which give a Gaussian standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceAccumulator<const D: usize> {
    count: u64,
    mean_u: [Complex64; D],
    mean_v: [Complex64; D],
    co: [Complex64; D],
    pco: [Complex64; D],
    m2_u: [f64; D],
    m2_v: [f64; D],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceEstimate<const D: usize> {
    /// Population covariance (divisor `count`).
    pub value: [Complex64; D],
    pub std_error: [f64; D],
    pub count: u64,
    /// Set when a single sample made the estimate trivially zero.
    pub degenerate: bool,
}

impl<const D: usize> Default for CovarianceAccumulator<D> {
    fn default() -> Self {
        Self::new()
    }
}

impl<const D: usize> CovarianceAccumulator<D> {
    pub const fn new() -> Self {
        Self {
            count: 0,
            mean_u: [ZERO; D],
            mean_v: [ZERO; D],
            co: [ZERO; D],
            pco: [ZERO; D],
            m2_u: [0.0; D],
            m2_v: [0.0; D],
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn update(&mut self, u: &[Complex64; D], v: &[Complex64; D]) {
        self.count += 1;
        let n = self.count as f64;
        let f = (n - 1.0) / n;
        for c in 0..D {
            let du = u[c] - self.mean_u[c];
            let dv = v[c] - self.mean_v[c];
            self.co[c] += du * dv.conj() * f;
            self.pco[c] += du * dv * f;
            self.m2_u[c] += f * du.norm_sqr();
            self.m2_v[c] += f * dv.norm_sqr();
            self.mean_u[c] += du / n;
            self.mean_v[c] += dv / n;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            self.clone_from(other);
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let w = na * nb / n;
        for c in 0..D {
            let du = other.mean_u[c] - self.mean_u[c];
            let dv = other.mean_v[c] - self.mean_v[c];
            self.co[c] = self.co[c] + other.co[c] + du * dv.conj() * w;
            self.pco[c] = self.pco[c] + other.pco[c] + du * dv * w;
            self.m2_u[c] += other.m2_u[c] + du.norm_sqr() * w;
            self.m2_v[c] += other.m2_v[c] + dv.norm_sqr() * w;
            self.mean_u[c] += du * (nb / n);
            self.mean_v[c] += dv * (nb / n);
        }
        self.count += other.count;
    }

    pub fn finalize(&self) -> Result<CovarianceEstimate<D>> {
        match self.count {
            0 => Err(Error::EmptyAccumulator),
            1 => Ok(CovarianceEstimate { value: [ZERO; D], std_error: [0.0; D], count: 1, degenerate: true }),
            count => {
                let n = count as f64;
                let mut std_error = [0.0; D];
                for (c, se) in std_error.iter_mut().enumerate() {
                    let var = (self.m2_u[c] / n) * (self.m2_v[c] / n) + (self.pco[c] / n).norm_sqr();
                    *se = (var / n).sqrt();
                }
                Ok(CovarianceEstimate { value: self.co.map(|c| c / n), std_error, count, degenerate: false })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> [Complex64; 1] {
        [Complex64::new(re, im)]
    }

    fn stream(n: usize, seed: u64) -> Vec<([Complex64; 2], [Complex64; 2])> {
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 1.0
        };
        (0..n)
            .map(|_| {
                let u = [Complex64::new(next(), next()), Complex64::new(3.0 + next(), next())];
                let v = [Complex64::new(next() + u[0].re, next()), Complex64::new(next(), -1.0 + next())];
                (u, v)
            })
            .collect()
    }

    /// Two-pass reference values.
    fn batch(samples: &[([Complex64; 2], [Complex64; 2])]) -> ([Complex64; 2], [Complex64; 2]) {
        let n = samples.len() as f64;
        let mut mu = [ZERO; 2];
        let mut mv = [ZERO; 2];
        for (u, v) in samples {
            for k in 0..2 {
                mu[k] += u[k] / n;
                mv[k] += v[k] / n;
            }
        }
        let mut cov = [ZERO; 2];
        for (u, v) in samples {
            for k in 0..2 {
                cov[k] += (u[k] - mu[k]) * (v[k] - mv[k]).conj() / n;
            }
        }
        (mu, cov)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn covariance_examples() {
        let mut acc = CovarianceAccumulator::<1>::new();
        for x in [1.0, -1.0, 1.0, -1.0] {
            acc.update(&c(x, 0.0), &c(x, 0.0));
        }
        assert_eq!(acc.finalize().unwrap().value[0], Complex64::new(1.0, 0.0));

        let mut acc = CovarianceAccumulator::<1>::new();
        for _ in 0..10 {
            acc.update(&c(0.3, -2.0), &c(0.3, -2.0));
        }
        assert_eq!(acc.finalize().unwrap().value[0], ZERO);

        let mut acc = CovarianceAccumulator::<1>::new();
        for z in [0.5, 2.0, -1.5, 3.25] {
            acc.update(&c(0.0, z), &c(0.0, z));
        }
        let v = acc.finalize().unwrap().value[0];
        assert_eq!(v.im, 0.0);
        assert!(v.re > 0.0);
    }

    #[test]
    fn empty_and_single_sample() {
        assert_eq!(CovarianceAccumulator::<1>::new().finalize(), Err(Error::EmptyAccumulator));
        assert_eq!(MeanAccumulator::<2>::new().finalize(), Err(Error::EmptyAccumulator));
        let mut acc = CovarianceAccumulator::<1>::new();
        acc.update(&c(1.0, 2.0), &c(3.0, 4.0));
        let e = acc.finalize().unwrap();
        assert!(e.degenerate);
        assert_eq!(e.value[0], ZERO);
    }

    #[test]
    fn merge_empty_is_identity() {
        let samples = stream(37, 5);
        let mut a = CovarianceAccumulator::<2>::new();
        let mut m = MeanAccumulator::<2>::new();
        for (u, v) in &samples {
            a.update(u, v);
            m.update(u);
        }
        let mut e = CovarianceAccumulator::<2>::new();
        e.merge(&a);
        assert_eq!(e, a);
        let mut em = MeanAccumulator::<2>::new();
        em.merge(&m);
        assert_eq!(em, m);
        let before = a.clone();
        a.merge(&CovarianceAccumulator::new());
        assert_eq!(a, before);
    }

    #[test]
    fn split_merge_matches_single_pass() {
        let samples = stream(1000, 42);
        let (mu, cov) = batch(&samples);
        let (mut left, mut right, mut single) =
            (CovarianceAccumulator::<2>::new(), CovarianceAccumulator::<2>::new(), CovarianceAccumulator::<2>::new());
        let (mut ml, mut mr) = (MeanAccumulator::<2>::new(), MeanAccumulator::<2>::new());
        for (i, (u, v)) in samples.iter().enumerate() {
            single.update(u, v);
            if i < 600 {
                left.update(u, v);
                ml.update(u);
            } else {
                right.update(u, v);
                mr.update(u);
            }
        }
        left.merge(&right);
        ml.merge(&mr);
        let merged = left.finalize().unwrap();
        let one = single.finalize().unwrap();
        let means = ml.finalize().unwrap();
        for k in 0..2 {
            assert!(rel(merged.value[k], one.value[k]) <= 1e-10);
            assert!(rel(merged.value[k], cov[k]) <= 1e-10);
            assert!(rel(means.value[k], mu[k]) <= 1e-12);
            assert!((merged.std_error[k] - one.std_error[k]).abs() <= 1e-10 * one.std_error[k]);
        }
    }

    #[test]
    fn merge_is_associative() {
        let samples = stream(900, 7);
        let acc = |range: core::ops::Range<usize>| {
            let mut a = CovarianceAccumulator::<2>::new();
            for (u, v) in &samples[range] {
                a.update(u, v);
            }
            a
        };
        let (a, b, c) = (acc(0..250), acc(250..700), acc(700..900));
        let mut left = a.clone();
        left.merge(&b);
        left.merge(&c);
        let mut bc = b.clone();
        bc.merge(&c);
        let mut right = a.clone();
        right.merge(&bc);
        let (l, r) = (left.finalize().unwrap(), right.finalize().unwrap());
        for k in 0..2 {
            assert!(rel(l.value[k], r.value[k]) <= 1e-10);
        }
    }

    #[test]
    fn standard_error_tracks_spread() {
        let samples = stream(4000, 3);
        let mut m = MeanAccumulator::<2>::new();
        for (u, _) in &samples {
            m.update(u);
        }
        let e = m.finalize().unwrap();
        // uniform re and im on [-1, 3) relative to centre: variance 4/3 each
        let expected = (8.0 / 3.0 / 4000.0f64).sqrt();
        assert!((e.std_error[0] - expected).abs() <= 0.05 * expected);
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(values in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 2..60), split in 0usize..60) {
            let mut uv = CovarianceAccumulator::<1>::new();
            let mut vu = CovarianceAccumulator::<1>::new();
            let mut uu = CovarianceAccumulator::<1>::new();
            let (mut uv2, mut vu2, mut uu2) = (CovarianceAccumulator::<1>::new(), CovarianceAccumulator::<1>::new(), CovarianceAccumulator::<1>::new());
            for (i, &(a, b, x, y)) in values.iter().enumerate() {
                let (u, v) = (c(a, b), c(x, y));
                if i < split {
                    uv.update(&u, &v);
                    vu.update(&v, &u);
                    uu.update(&u, &u);
                } else {
                    uv2.update(&u, &v);
                    vu2.update(&v, &u);
                    uu2.update(&u, &u);
                }
            }
            uv.merge(&uv2);
            vu.merge(&vu2);
            uu.merge(&uu2);
            let (a, b) = (uv.finalize().unwrap().value[0], vu.finalize().unwrap().value[0]);
            prop_assert_eq!(a, b.conj());
            let s = uu.finalize().unwrap().value[0];
            prop_assert!(s.re >= 0.0);
            prop_assert!(s.im.abs() <= 1e-12 * s.re.abs());
        }
    }
}
