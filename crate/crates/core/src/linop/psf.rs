use crate::error::{Error, Result};

/// Square, odd-sized blur kernel normalized to unit sum.
///
/// Taps are stored row-major; tap `(a, b)` weights the pixel at offset
/// `(a - c, b - c)` from the output pixel, with `c = (size - 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psf {
    size: usize,
    taps: Vec<f64>,
    /// `(column, row)` factors with `tap(a, b) = column[a] * row[b]`, when the kernel has rank one.
    factors: Option<(Vec<f64>, Vec<f64>)>,
}

/// Rank-one factorization through the largest tap, if it reproduces every tap.
fn rank_one(size: usize, taps: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (pivot, &peak) = taps.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
    if peak == 0.0 {
        return None;
    }
    let (pr, pc) = (pivot / size, pivot % size);
    let column: Vec<f64> = (0..size).map(|a| taps[a * size + pc]).collect();
    let row: Vec<f64> = (0..size).map(|b| taps[pr * size + b] / peak).collect();
    let tol = 1e-13 * peak.abs();
    let exact = (0..size).all(|a| (0..size).all(|b| (taps[a * size + b] - column[a] * row[b]).abs() <= tol));
    exact.then_some((column, row))
}

impl Psf {
    /// Builds a kernel from raw taps and rescales them to sum to one.
    pub fn new(size: usize, taps: Vec<f64>) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::invalid(format!("psf size must be odd, got {size}")));
        }
        if taps.len() != size * size {
            return Err(Error::invalid(format!(
                "psf of size {size} needs {} taps, got {}",
                size * size,
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("psf taps must be finite"));
        }
        let sum: f64 = taps.iter().sum();
        if sum <= 0.0 {
            return Err(Error::invalid(format!(
                "psf taps must have a positive sum, got {sum}"
            )));
        }
        let taps: Vec<f64> = taps.into_iter().map(|t| t / sum).collect();
        let factors = rank_one(size, &taps);
        Ok(Self { size, taps, factors })
    }

    /// Isotropic Gaussian sampled on the integer grid and normalized.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "gaussian sigma must be positive, got {sigma}"
            )));
        }
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::invalid(format!("psf size must be odd, got {size}")));
        }
        let c = (size / 2) as f64;
        let denom = 2.0 * sigma * sigma;
        let mut taps = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                let (di, dj) = (i as f64 - c, j as f64 - c);
                taps.push((-(di * di + dj * dj) / denom).exp());
            }
        }
        Self::new(size, taps)
    }

    /// The identity blur.
    pub fn delta() -> Self {
        Self {
            size: 1,
            taps: vec![1.0],
            factors: Some((vec![1.0], vec![1.0])),
        }
    }

    pub fn box_blur(size: usize) -> Result<Self> {
        Self::new(size, vec![1.0; size * size])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Half-width `(size - 1) / 2`.
    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Column and row factors of a rank-one kernel.
    pub fn factors(&self) -> Option<(&[f64], &[f64])> {
        self.factors.as_ref().map(|(c, r)| (c.as_slice(), r.as_slice()))
    }

    pub fn tap(&self, row: usize, col: usize) -> f64 {
        self.taps[row * self.size + col]
    }

    /// Symmetric under both the vertical and horizontal flip. This is the
    /// condition for the DCT to diagonalize the reflexive-boundary blur.
    pub fn is_doubly_symmetric(&self) -> bool {
        let k = self.size;
        let tol = 1e-14 * self.taps.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (0..k).all(|a| {
            (0..k).all(|b| {
                let t = self.tap(a, b);
                (t - self.tap(k - 1 - a, b)).abs() <= tol && (t - self.tap(a, k - 1 - b)).abs() <= tol
            })
        })
    }

    /// Kernel rotated by 180 degrees.
    pub fn flipped(&self) -> Psf {
        let rev = |v: &Vec<f64>| v.iter().rev().copied().collect::<Vec<_>>();
        Psf {
            size: self.size,
            taps: self.taps.iter().rev().copied().collect(),
            factors: self.factors.as_ref().map(|(c, r)| (rev(c), rev(r))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussians_factor_and_skewed_kernels_do_not() {
        let g = Psf::gaussian(7, 4.0).unwrap();
        let (col, row) = g.factors().unwrap();
        for a in 0..7 {
            for b in 0..7 {
                assert!((g.tap(a, b) - col[a] * row[b]).abs() <= 1e-16);
            }
        }
        let f = g.flipped();
        let (fc, fr) = f.factors().unwrap();
        assert!((f.tap(0, 1) - fc[0] * fr[1]).abs() <= 1e-16);
        let skew = Psf::new(3, vec![0.05, 0.1, 0.0, 0.2, 0.3, 0.05, 0.0, 0.15, 0.15]).unwrap();
        assert!(skew.factors().is_none());
        assert!(Psf::box_blur(3).unwrap().factors().is_some());
    }

    #[test]
    fn gaussian_rejects_bad_arguments() {
        assert!(Psf::gaussian(4, 1.0).is_err());
        assert!(Psf::gaussian(0, 1.0).is_err());
        assert!(Psf::gaussian(3, 0.0).is_err());
        assert!(Psf::gaussian(3, -2.0).is_err());
    }

    #[test]
    fn single_tap_is_identity() {
        let p = Psf::gaussian(1, 3.0).unwrap();
        assert_eq!(p.taps(), &[1.0]);
        assert_eq!(p, Psf::delta());
    }

    #[test]
    fn gaussian_3x3_matches_direct_summation() {
        // Nine samples exp(-(i^2+j^2)/2) summed by hand: center, edge, corner.
        let p = Psf::gaussian(3, 1.0).unwrap();
        assert!((p.tap(1, 1) - 0.20417995557165805).abs() < 1e-15);
        assert!((p.tap(0, 1) - 0.12384140315297394).abs() < 1e-15);
        assert!((p.tap(0, 0) - 0.0751136079541115).abs() < 1e-15);
    }

    #[test]
    fn gaussian_is_normalized_and_symmetric() {
        let p = Psf::gaussian(7, 4.0).unwrap();
        let sum: f64 = p.taps().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        for a in 0..7 {
            for b in 0..7 {
                let t = p.tap(a, b);
                assert_eq!(t, p.tap(6 - a, b));
                assert_eq!(t, p.tap(a, 6 - b));
                assert_eq!(t, p.tap(b, a));
            }
        }
        assert!(p.is_doubly_symmetric());
    }

    #[test]
    fn asymmetric_kernel_detected() {
        let p = Psf::new(3, vec![0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(!p.is_doubly_symmetric());
        assert!(Psf::new(3, vec![0.0; 9]).is_err());
    }
}
