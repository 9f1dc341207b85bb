//! `key = value` run configuration files.
//!
//! Blank lines and `#` comments are ignored. Relative paths are resolved
//! against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::{ImageSpec, PsfSpec, Scenario, STANDARD_IMAGES};
use crate::solvers::Variant;

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "image",
    "size",
    "psf_size",
    "psf_sigma",
    "noise_sigma",
    "variant",
    "n",
    "p",
    "eta",
    "lambda",
    "iterations",
    "trials",
    "seed",
    "levels",
    "timing",
    "out",
    "variants",
    "n_values",
    "p_min",
    "p_max",
    "p_step",
    "probe_iter",
    "images",
    "sigmas",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub image: ImageSpec,
    pub size: usize,
    pub psf: PsfSpec,
    pub noise_sigma: f64,
    pub variant: Variant,
    pub n: usize,
    /// `None` means `lambda_max(W_n)`.
    pub p: Option<f64>,
    pub eta: f64,
    /// `None` means `10 sigma^2`.
    pub lambda: Option<f64>,
    /// `None` means the command's default.
    pub iterations: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub levels: usize,
    pub timing: bool,
    pub out: PathBuf,
    pub variants: Vec<Variant>,
    pub n_values: Vec<usize>,
    pub p_min: f64,
    pub p_max: f64,
    pub p_step: f64,
    pub probe_iter: usize,
    pub images: Vec<ImageSpec>,
    pub sigmas: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            image: ImageSpec::named("cameraman"),
            size: 256,
            psf: PsfSpec::STANDARD,
            noise_sigma: 1e-2,
            variant: Variant::Efista,
            n: 8,
            p: None,
            eta: 1.0,
            lambda: None,
            iterations: None,
            trials: None,
            seed: 0,
            levels: 8,
            timing: true,
            out: PathBuf::from("efista-out"),
            variants: vec![Variant::Fista, Variant::Ifista, Variant::Efista],
            n_values: vec![8],
            p_min: 1.0,
            p_max: 8.0,
            p_step: 0.2,
            probe_iter: 15,
            images: STANDARD_IMAGES.iter().map(|s| ImageSpec::named(s)).collect(),
            sigmas: vec![1e-2, 1e-3],
        }
    }
}

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse '{v}'"))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on/off, got '{v}'")),
    }
}

fn parse_list<T>(v: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

/// `auto` or a number.
fn parse_auto(v: &str) -> std::result::Result<Option<f64>, String> {
    if v.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse_num(v).map(Some)
    }
}

fn parse_image(v: &str, base: &Path) -> std::result::Result<ImageSpec, String> {
    if let Some(seed) = v.strip_prefix("synthetic") {
        return match seed.strip_prefix(':') {
            Some(s) => parse_num(s).map(|seed| ImageSpec::Synthetic { seed }),
            None if seed.is_empty() => Ok(ImageSpec::Synthetic { seed: 0 }),
            None => Err(format!("expected synthetic or synthetic:SEED, got '{v}'")),
        };
    }
    if v.contains('/') || v.contains('\\') || v.ends_with(".pgm") {
        return Ok(ImageSpec::File(base.join(v)));
    }
    Ok(ImageSpec::Named(v.to_string()))
}

impl RunConfig {
    /// Parses config text; `base` resolves relative paths and `origin` names errors.
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let fail = |message: String| Error::Config {
                path: origin.to_path_buf(),
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&key) = KEYS.iter().find(|k| **k == key) else {
                return Err(fail(format!("unknown key '{key}'")));
            };
            if seen.contains(&key) {
                return Err(fail(format!("duplicate key '{key}'")));
            }
            seen.push(key);
            cfg.set(key, value, base).map_err(|m| fail(format!("{key}: {m}")))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str, base: &Path) -> std::result::Result<(), String> {
        match key {
            "image" => self.image = parse_image(v, base)?,
            "size" => self.size = parse_num(v)?,
            "psf_size" => self.psf.size = parse_num(v)?,
            "psf_sigma" => self.psf.sigma = parse_num(v)?,
            "noise_sigma" => self.noise_sigma = parse_num(v)?,
            "variant" => self.variant = v.parse().map_err(|e: Error| e.to_string())?,
            "n" => self.n = parse_num(v)?,
            "p" => self.p = parse_auto(v)?,
            "eta" => self.eta = parse_num(v)?,
            "lambda" => self.lambda = parse_auto(v)?,
            "iterations" => self.iterations = Some(parse_num(v)?),
            "trials" => self.trials = Some(parse_num(v)?),
            "seed" => self.seed = parse_num(v)?,
            "levels" => self.levels = parse_num(v)?,
            "timing" => self.timing = parse_bool(v)?,
            "out" => self.out = base.join(v),
            "variants" => self.variants = parse_list(v, |s| s.parse().map_err(|e: Error| e.to_string()))?,
            "n_values" => self.n_values = parse_list(v, parse_num)?,
            "p_min" => self.p_min = parse_num(v)?,
            "p_max" => self.p_max = parse_num(v)?,
            "p_step" => self.p_step = parse_num(v)?,
            "probe_iter" => self.probe_iter = parse_num(v)?,
            "images" => self.images = parse_list(v, |s| parse_image(s, base))?,
            "sigmas" => self.sigmas = parse_list(v, parse_num)?,
            _ => unreachable!("key list and setter disagree on '{key}'"),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, path)
    }

    /// Fails on any input file that does not exist, before work starts.
    pub fn check_paths(&self) -> Result<()> {
        let files = std::iter::once(&self.image).chain(&self.images);
        for spec in files {
            if let ImageSpec::File(p) = spec {
                if !p.is_file() {
                    return Err(Error::io(
                        p,
                        std::io::Error::new(std::io::ErrorKind::NotFound, "image file not found"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Scenario for `image` at `sigma`, with command defaults filled in.
    pub fn scenario(&self, image: &ImageSpec, sigma: f64, iterations: usize, trials: usize) -> Scenario {
        let mut s = Scenario::new(image.clone(), sigma);
        s.size = self.size;
        s.psf = self.psf;
        s.lambda_override = self.lambda;
        s.iterations = iterations;
        s.trials = trials;
        s.seed = self.seed;
        s.eta = self.eta;
        s.n = self.n;
        s.p = self.p;
        s.wavelet_levels = self.levels;
        s.record_time = self.timing;
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("/base"), Path::new("test.cfg"))
    }

    #[test]
    fn full_config() {
        let cfg = parse(
            "# standard setting\n\
             image = lena\n\
             noise_sigma = 1e-3   # low noise\n\
             variant = IFISTA\n\
             p = auto\n\
             lambda = 0.5\n\
             iterations = 180\n\
             timing = off\n\
             variants = ista, efista\n\
             n_values = 4,8\n\
             images = cameraman, data/x.pgm, synthetic:4\n\
             sigmas = 0.01\n\
             out = results\n",
        )
        .unwrap();
        assert_eq!(cfg.image, ImageSpec::named("lena"));
        assert_eq!(cfg.noise_sigma, 1e-3);
        assert_eq!(cfg.variant, Variant::Ifista);
        assert_eq!((cfg.p, cfg.lambda, cfg.iterations), (None, Some(0.5), Some(180)));
        assert!(!cfg.timing);
        assert_eq!(cfg.variants, [Variant::Ista, Variant::Efista]);
        assert_eq!(cfg.n_values, [4, 8]);
        assert_eq!(
            cfg.images,
            [
                ImageSpec::named("cameraman"),
                ImageSpec::File(PathBuf::from("/base/data/x.pgm")),
                ImageSpec::Synthetic { seed: 4 }
            ]
        );
        assert_eq!(cfg.out, PathBuf::from("/base/results"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("size = 64\nbogus = 1\n", 2, "unknown key"),
            ("\n\nn = eight\n", 3, "cannot parse"),
            ("seed = 1\nseed = 2\n", 2, "duplicate"),
            ("variant = mfista\n", 1, "unknown variant"),
            ("just text\n", 1, "key = value"),
        ];
        for (text, line, needle) in cases {
            match parse(text) {
                Err(Error::Config { line: l, message, .. }) => {
                    assert_eq!(l, line, "{text}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("expected config error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn empty_lists_and_missing_files() {
        let cfg = parse("images =\n").unwrap();
        assert!(cfg.images.is_empty());
        let cfg = parse("image = missing/file.pgm\n").unwrap();
        let err = cfg.check_paths().unwrap_err();
        assert!(err.to_string().contains("/base/missing/file.pgm"));
        assert!(parse("image = synthetic:x\n").is_err());
        assert_eq!(parse("image = synthetic\n").unwrap().image, ImageSpec::Synthetic { seed: 0 });
    }
}
