use std::env;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::read_pgm;
use crate::error::Result;
use crate::image::Image;

/// Environment variable naming an extra directory of `<name>.pgm` test images.
pub const IMAGE_DIR_ENV: &str = "EFISTA_IMAGE_DIR";

/// The five standard images of the benchmark table.
pub const STANDARD_IMAGES: [&str; 5] = ["cameraman", "lena", "barbara", "pirate", "peppers"];

/// Files tried, in order, for an image name.
fn candidates(name: &str) -> Vec<&str> {
    match name {
        // camera.pgm is a freely licensed photograph of a similar scene.
        "cameraman" => vec!["cameraman", "camera"],
        _ => vec![name],
    }
}

/// Search directories: `$EFISTA_IMAGE_DIR`, then the repository `images/`.
pub fn image_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(d) = env::var_os(IMAGE_DIR_ENV) {
        dirs.push(PathBuf::from(d));
    }
    dirs.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../images"));
    dirs
}

/// Where a test image came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ImageOrigin {
    File(PathBuf),
    Synthetic { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct TestImage {
    pub id: String,
    pub image: Image,
    pub origin: ImageOrigin,
}

impl TestImage {
    /// True when the pixels are the genuine named image rather than a stand-in.
    pub fn is_genuine(&self) -> bool {
        match &self.origin {
            ImageOrigin::File(p) => p.file_stem().and_then(|s| s.to_str()) == Some(self.id.as_str()),
            ImageOrigin::Synthetic { .. } => false,
        }
    }

    pub fn describe(&self) -> String {
        match &self.origin {
            ImageOrigin::File(p) => format!("{} ({})", self.id, p.display()),
            ImageOrigin::Synthetic { seed } => format!("{} (synthetic, seed {seed})", self.id),
        }
    }
}

/// Finds `<name>.pgm` (or a listed substitute) in the search directories.
pub fn find_image(name: &str) -> Option<PathBuf> {
    for file in candidates(name) {
        for dir in image_dirs() {
            let p = dir.join(format!("{file}.pgm"));
            if p.is_file() {
                return Some(p);
            }
        }
    }
    None
}

fn name_seed(name: &str) -> u64 {
    // FNV-1a, stable across platforms and releases.
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Loads a named image at `size` x `size`, block-averaging larger square
/// files, or falls back to a synthetic image seeded by the name.
pub fn load_test_image(name: &str, size: usize) -> Result<TestImage> {
    match find_image(name) {
        Some(path) => {
            let image = fit(read_pgm(&path)?, size)?;
            Ok(TestImage {
                id: name.to_string(),
                image,
                origin: ImageOrigin::File(path),
            })
        }
        None => {
            let seed = name_seed(name);
            Ok(TestImage {
                id: name.to_string(),
                image: synthetic_image(size, size, seed),
                origin: ImageOrigin::Synthetic { seed },
            })
        }
    }
}

/// Loads an explicit file, failing with the path when it is missing.
pub fn load_image_file(path: &Path, size: Option<usize>) -> Result<TestImage> {
    let img = read_pgm(path)?;
    let image = match size {
        Some(s) => fit(img, s)?,
        None => img,
    };
    let id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("image")
        .to_string();
    Ok(TestImage {
        id,
        image,
        origin: ImageOrigin::File(path.to_path_buf()),
    })
}

fn fit(img: Image, size: usize) -> Result<Image> {
    let (w, h) = img.dims();
    if w == size && h == size {
        return Ok(img);
    }
    if w == h && w > size && w % size == 0 {
        return img.downsample(w / size);
    }
    Err(crate::error::Error::invalid(format!(
        "{w}x{h} image cannot be reduced to {size}x{size}"
    )))
}

/// Piecewise-smooth test scene: a shaded background, bright and dark
/// shapes with sharp edges, and a striped texture patch, quantized to 8 bits.
pub fn synthetic_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wf, hf) = (width as f64, height as f64);
    let gx = rng.random_range(-0.3..0.3);
    let gy = rng.random_range(-0.3..0.3);
    let base = rng.random_range(0.35..0.55);

    struct Disk {
        cx: f64,
        cy: f64,
        r: f64,
        v: f64,
    }
    let disks: Vec<Disk> = (0..4)
        .map(|_| Disk {
            cx: rng.random_range(0.15..0.85) * wf,
            cy: rng.random_range(0.15..0.85) * hf,
            r: rng.random_range(0.05..0.18) * wf.min(hf),
            v: rng.random_range(-0.35..0.35),
        })
        .collect();
    let rect = (
        rng.random_range(0.05..0.45) * wf,
        rng.random_range(0.05..0.45) * hf,
        rng.random_range(0.2..0.45) * wf,
        rng.random_range(0.2..0.45) * hf,
        rng.random_range(-0.3..0.3),
    );
    let tex = (
        rng.random_range(0.5..0.75) * wf,
        rng.random_range(0.5..0.75) * hf,
        rng.random_range(0.15..0.22) * wf.min(hf),
        rng.random_range(3.0..6.0),
        rng.random_range(0.0..PI),
    );

    Image::from_fn(width, height, |r, c| {
        let (x, y) = (c as f64, r as f64);
        let mut v = base + gx * (x / wf - 0.5) + gy * (y / hf - 0.5);
        if x >= rect.0 && x < rect.0 + rect.2 && y >= rect.1 && y < rect.1 + rect.3 {
            v += rect.4;
        }
        for d in &disks {
            if (x - d.cx).powi(2) + (y - d.cy).powi(2) <= d.r * d.r {
                v += d.v;
            }
        }
        if (x - tex.0).abs() < tex.2 && (y - tex.1).abs() < tex.2 {
            let phase = 2.0 * PI * (x * tex.4.cos() + y * tex.4.sin()) / tex.3;
            v += 0.15 * phase.sin();
        }
        (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
    })
}
