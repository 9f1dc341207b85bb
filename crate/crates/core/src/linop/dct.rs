//! Orthonormal 2D DCT-II and its inverse.

use std::fmt;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

use crate::image::Image;

/// Planned orthonormal DCT-II / DCT-III pair for one image size.
#[derive(Clone)]
pub struct Dct2d {
    width: usize,
    height: usize,
    rows: Arc<dyn TransformType2And3<f64>>,
    cols: Arc<dyn TransformType2And3<f64>>,
}

impl fmt::Debug for Dct2d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dct2d")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn transform_rows(
    data: &mut [f64],
    len: usize,
    plan: &Arc<dyn TransformType2And3<f64>>,
    dir: Direction,
    scratch: &mut Vec<f64>,
) {
    let dc = (1.0 / len as f64).sqrt();
    let ac = (2.0 / len as f64).sqrt();
    scratch.resize(plan.get_scratch_len(), 0.0);
    for row in data.chunks_mut(len) {
        match dir {
            Direction::Forward => {
                plan.process_dct2_with_scratch(row, scratch);
                row[0] *= dc;
                row[1..].iter_mut().for_each(|v| *v *= ac);
            }
            Direction::Inverse => {
                // DCT-III computes x_n = X_0 / 2 + sum_k X_k cos(..).
                row[0] *= 2.0 * dc;
                row[1..].iter_mut().for_each(|v| *v *= ac);
                plan.process_dct3_with_scratch(row, scratch);
            }
        }
    }
}

impl Dct2d {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = DctPlanner::new();
        Self {
            width,
            height,
            rows: planner.plan_dct2(width),
            cols: planner.plan_dct2(height),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn run(&self, x: &Image, dir: Direction) -> Image {
        assert_eq!(x.dims(), self.dims(), "dct plan size mismatch");
        let mut scratch = Vec::new();
        let mut data = x.as_slice().to_vec();
        transform_rows(&mut data, self.width, &self.rows, dir, &mut scratch);
        let mut t = Image::from_raw(self.width, self.height, data).transpose();
        transform_rows(t.as_mut_slice(), self.height, &self.cols, dir, &mut scratch);
        t.transpose()
    }

    /// Forward transform left in transposed layout (`height` x `width` rows
    /// swapped), skipping the final transpose.
    pub fn forward_transposed(&self, x: &Image) -> Image {
        assert_eq!(x.dims(), self.dims(), "dct plan size mismatch");
        let mut scratch = Vec::new();
        let mut data = x.as_slice().to_vec();
        transform_rows(&mut data, self.width, &self.rows, Direction::Forward, &mut scratch);
        let mut t = Image::from_raw(self.width, self.height, data).transpose();
        transform_rows(t.as_mut_slice(), self.height, &self.cols, Direction::Forward, &mut scratch);
        t
    }

    /// Inverse of [`Dct2d::forward_transposed`].
    pub fn inverse_transposed(&self, mut c: Image) -> Image {
        assert_eq!(c.dims(), (self.height, self.width), "dct plan size mismatch");
        let mut scratch = Vec::new();
        transform_rows(c.as_mut_slice(), self.height, &self.cols, Direction::Inverse, &mut scratch);
        let mut x = c.transpose();
        transform_rows(x.as_mut_slice(), self.width, &self.rows, Direction::Inverse, &mut scratch);
        x
    }

    pub fn forward(&self, x: &Image) -> Image {
        self.run(x, Direction::Forward)
    }

    pub fn inverse(&self, c: &Image) -> Image {
        self.run(c, Direction::Inverse)
    }
}

/// Orthonormal 2D DCT-II.
pub fn dct2(x: &Image) -> Image {
    Dct2d::new(x.width(), x.height()).forward(x)
}

/// Inverse of [`dct2`].
pub fn idct2(c: &Image) -> Image {
    Dct2d::new(c.width(), c.height()).inverse(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_image;
    use std::f64::consts::PI;

    fn naive_dct2(x: &Image) -> Image {
        let (w, h) = x.dims();
        let scale = |k: usize, n: usize| if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        Image::from_fn(w, h, |k1, k2| {
            let mut acc = 0.0;
            for i in 0..h {
                for j in 0..w {
                    acc += x.get(i, j)
                        * (PI * k1 as f64 * (i as f64 + 0.5) / h as f64).cos()
                        * (PI * k2 as f64 * (j as f64 + 0.5) / w as f64).cos();
                }
            }
            acc * scale(k1, h) * scale(k2, w)
        })
    }

    #[test]
    fn transposed_layout_round_trips() {
        let x = random_image(12, 7, 4);
        let plan = Dct2d::new(12, 7);
        let t = plan.forward_transposed(&x);
        assert_eq!(t, plan.forward(&x).transpose());
        assert!(plan.inverse_transposed(t).sub(&x).norm_sq().sqrt() < 1e-12);
    }

    #[test]
    fn matches_naive_cosine_sum() {
        let x = random_image(6, 5, 3);
        assert!(dct2(&x).max_abs_diff(&naive_dct2(&x)) <= 1e-12);
    }

    #[test]
    fn constant_image_is_pure_dc() {
        let c = dct2(&Image::filled(8, 8, 1.0));
        assert!((c.get(0, 0) - 8.0).abs() <= 1e-12);
        let rest = c.as_slice()[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(rest <= 1e-12);
    }

    #[test]
    fn round_trip_and_parseval() {
        let x = random_image(32, 32, 9);
        let c = dct2(&x);
        assert!(idct2(&c).max_abs_diff(&x) <= 1e-12);
        assert!((c.norm() - x.norm()).abs() <= 1e-12 * x.norm());
    }

    #[test]
    fn non_square_round_trip() {
        let x = random_image(12, 20, 4);
        assert!(idct2(&dct2(&x)).max_abs_diff(&x) <= 1e-12);
    }
}
