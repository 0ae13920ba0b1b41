//! Colour adaptation: palettes from k-means, sliced partial transport of the
//! source palette towards the target palette, and per-pixel reconstruction.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::rng;
use crate::sliced::{sample_directions, sopt_slice_displacement, PointCloud};
use crate::types::CostSpec;

pub type Rgb = [f64; 3];

/// RGB image with channels in `[0, 1]`, pixels in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                got: pixels.len(),
            });
        }
        if let Some(i) = pixels
            .iter()
            .position(|p| p.iter().any(|c| !(0.0..=1.0).contains(c)))
        {
            return Err(Error::InvalidArgument(format!(
                "pixel {i} = {:?} has a channel outside [0, 1]",
                pixels[i]
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, colour: Rgb) -> Result<Self> {
        Self::new(width, height, vec![colour; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Largest absolute per-channel difference.
    pub fn max_channel_diff(&self, other: &Image) -> f64 {
        self.pixels
            .iter()
            .zip(&other.pixels)
            .flat_map(|(a, b)| (0..3).map(move |c| (a[c] - b[c]).abs()))
            .fold(0.0, f64::max)
    }

    /// Reads a binary (P6) PPM with 8-bit samples.
    pub fn read_ppm<R: Read>(reader: R) -> Result<Self> {
        let mut r = BufReader::new(reader);
        let magic = header_token(&mut r)?;
        if magic != "P6" {
            return Err(ppm_error(format!("expected magic P6, found {magic:?}")));
        }
        let width = header_number(&mut r, "width")?;
        let height = header_number(&mut r, "height")?;
        let maxval = header_number(&mut r, "maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(ppm_error(format!("maxval {maxval} is not an 8-bit range")));
        }
        let count = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(3))
            .ok_or_else(|| ppm_error("image dimensions overflow".into()))?;
        let mut data = vec![0u8; count];
        r.read_exact(&mut data)
            .map_err(|e| ppm_error(format!("pixel data truncated: {e}")))?;
        let scale = maxval as f64;
        let pixels = data
            .chunks_exact(3)
            .map(|c| {
                let ch = |v: u8| (v as f64 / scale).min(1.0);
                [ch(c[0]), ch(c[1]), ch(c[2])]
            })
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn read_ppm_file(path: &std::path::Path) -> Result<Self> {
        Self::read_ppm(std::fs::File::open(path)?)
    }

    /// Writes a P6 PPM with maxval 255; channels are rounded to the nearest
    /// level, so images read from 8-bit files round-trip bit-exactly.
    pub fn write_ppm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self
            .pixels
            .iter()
            .flat_map(|p| p.iter().map(|&c| (c.clamp(0.0, 1.0) * 255.0).round() as u8))
            .collect();
        w.write_all(&bytes)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_ppm_file(&self, path: &std::path::Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_ppm(f)
    }
}

fn ppm_error(msg: String) -> Error {
    Error::Format { format: "PPM", msg }
}

/// Next whitespace-delimited header token, skipping `#` comments. Consumes
/// exactly one whitespace byte after the token, as the format requires.
fn header_token<R: BufRead>(r: &mut R) -> Result<String> {
    let mut token = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            if token.is_empty() {
                return Err(ppm_error("unexpected end of header".into()));
            }
            break;
        }
        let b = byte[0];
        if b == b'#' && token.is_empty() {
            let mut skip = Vec::new();
            r.read_until(b'\n', &mut skip)?;
            continue;
        }
        if b.is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            break;
        }
        token.push(b);
    }
    String::from_utf8(token).map_err(|_| ppm_error("header is not ASCII".into()))
}

fn header_number<R: BufRead>(r: &mut R, what: &str) -> Result<usize> {
    let t = header_token(r)?;
    t.parse()
        .map_err(|_| ppm_error(format!("invalid {what} {t:?} in header")))
}

fn dist2(a: &Rgb, b: &Rgb) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn nearest(p: &Rgb, centroids: &[Rgb]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, q) in centroids.iter().enumerate() {
        let d = dist2(p, q);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Palette {
    pub centroids: Vec<Rgb>,
    /// Centroid index of every pixel.
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squares after each assignment step.
    pub sse_history: Vec<f64>,
}

impl Palette {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn cloud(&self) -> PointCloud {
        PointCloud::from_points(3, &self.centroids).expect("centroids are finite")
    }
}

/// Lloyd's algorithm from `k` randomly chosen pixels (distinct colours where
/// the image has enough of them). Stops early once assignments are stable.
pub fn kmeans_palette(img: &Image, k: usize, seed: u64, iters: usize) -> Result<Palette> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "palette size must be positive".into(),
        ));
    }
    if k > img.len() {
        return Err(Error::InvalidArgument(format!(
            "palette size {k} exceeds the pixel count {}",
            img.len()
        )));
    }
    let pixels = img.pixels();
    let mut order: Vec<usize> = (0..pixels.len()).collect();
    order.shuffle(&mut rng(seed));
    let mut seen = HashSet::new();
    let mut centroids: Vec<Rgb> = Vec::with_capacity(k);
    for &i in &order {
        if seen.insert(pixels[i].map(f64::to_bits)) {
            centroids.push(pixels[i]);
            if centroids.len() == k {
                break;
            }
        }
    }
    // Fewer distinct colours than k: pad with repeated pixels.
    let mut fill = order.iter();
    while centroids.len() < k {
        centroids.push(pixels[*fill.next().expect("k <= pixel count")]);
    }

    let mut assignment = vec![usize::MAX; pixels.len()];
    let mut sse_history = Vec::new();
    for _ in 0..iters.max(1) {
        let next: Vec<(usize, f64)> = pixels.par_iter().map(|p| nearest(p, &centroids)).collect();
        let sse: f64 = next.iter().map(|&(_, d)| d).sum();
        sse_history.push(sse);
        let changed = next.iter().zip(&assignment).any(|(&(c, _), &a)| c != a);
        for (a, (c, _)) in assignment.iter_mut().zip(next) {
            *a = c;
        }
        if !changed {
            break;
        }
        let mut sums = vec![[0.0f64; 3]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in pixels.iter().zip(&assignment) {
            for c in 0..3 {
                sums[a][c] += p[c];
            }
            counts[a] += 1;
        }
        for ((cent, sum), &count) in centroids.iter_mut().zip(&sums).zip(&counts) {
            if count > 0 {
                *cent = sum.map(|s| (s / count as f64).clamp(0.0, 1.0));
            }
        }
    }
    Ok(Palette {
        centroids,
        assignment,
        sse_history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaletteTransfer {
    /// Transported centroids, clamped to the unit cube.
    pub centroids: Vec<Rgb>,
    /// Number of matched source centroids on each slice.
    pub matched: Vec<usize>,
}

/// Moves the source centroids towards the target palette over `iterations`
/// random slices; unmatched centroids stay put on that slice.
pub fn transfer_palette(
    src: &[Rgb],
    tgt: &[Rgb],
    lambda: f64,
    iterations: usize,
    seed: u64,
    cost: CostSpec,
) -> Result<PaletteTransfer> {
    let mut cur = PointCloud::from_points(3, src)?;
    let target = PointCloud::from_points(3, tgt)?;
    let dirs = sample_directions(3, iterations, seed)?;
    let mut matched = Vec::with_capacity(iterations);
    for theta in dirs.iter() {
        let disp = sopt_slice_displacement(&cur, &target, theta, lambda, cost)?;
        disp.apply(&mut cur);
        matched.push(disp.matches.len());
    }
    let centroids = cur
        .points()
        .map(|p| [p[0], p[1], p[2]].map(|c| c.clamp(0.0, 1.0)))
        .collect();
    Ok(PaletteTransfer { centroids, matched })
}

/// Shifts every pixel by its centroid's displacement, then clamps.
pub fn reconstruct(img: &Image, palette: &Palette, transported: &[Rgb]) -> Result<Image> {
    if palette.assignment.len() != img.len() {
        return Err(Error::DimensionMismatch {
            expected: img.len(),
            got: palette.assignment.len(),
        });
    }
    if transported.len() != palette.len() {
        return Err(Error::DimensionMismatch {
            expected: palette.len(),
            got: transported.len(),
        });
    }
    let shifts: Vec<Rgb> = palette
        .centroids
        .iter()
        .zip(transported)
        .map(|(a, b)| [b[0] - a[0], b[1] - a[1], b[2] - a[2]])
        .collect();
    let pixels = img
        .pixels()
        .par_iter()
        .zip(&palette.assignment)
        .map(|(p, &a)| {
            let s = shifts.get(a).ok_or_else(|| {
                Error::InvalidArgument(format!("pixel assigned to missing centroid {a}"))
            })?;
            Ok([0, 1, 2].map(|c| (p[c] + s[c]).clamp(0.0, 1.0)))
        })
        .collect::<Result<Vec<Rgb>>>()?;
    Image::new(img.width(), img.height(), pixels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorConfig {
    pub lambda: f64,
    pub source_k: usize,
    pub target_k: usize,
    /// Sliced transport iterations.
    pub iterations: usize,
    pub kmeans_iters: usize,
    pub seed: u64,
    pub cost: CostSpec,
}

impl ColorConfig {
    pub fn new(lambda: f64, seed: u64) -> Self {
        Self {
            lambda,
            source_k: 500,
            target_k: 500,
            iterations: 300,
            kmeans_iters: 20,
            seed,
            cost: CostSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorResult {
    pub image: Image,
    pub source_palette: Palette,
    pub target_palette: Palette,
    pub transfer: PaletteTransfer,
}

/// Full pipeline. Both palettes use the same k-means seed, so identical
/// images with equal palette sizes produce identical palettes.
pub fn color_transfer(src: &Image, tgt: &Image, config: &ColorConfig) -> Result<ColorResult> {
    let source_palette = kmeans_palette(
        src,
        config.source_k.min(src.len()),
        config.seed,
        config.kmeans_iters,
    )?;
    let target_palette = kmeans_palette(
        tgt,
        config.target_k.min(tgt.len()),
        config.seed,
        config.kmeans_iters,
    )?;
    let transfer = transfer_palette(
        &source_palette.centroids,
        &target_palette.centroids,
        config.lambda,
        config.iterations,
        config.seed,
        config.cost,
    )?;
    let image = reconstruct(src, &source_palette, &transfer.centroids)?;
    Ok(ColorResult {
        image,
        source_palette,
        target_palette,
        transfer,
    })
}

/// Deterministic smooth test image with a few colour regions.
pub fn synthetic_image(width: usize, height: usize, seed: u64) -> Image {
    use rand::Rng;
    let mut r = rng(seed);
    let base: Vec<Rgb> = (0..4)
        .map(|_| [r.random::<f64>(), r.random::<f64>(), r.random::<f64>()])
        .collect();
    let mut pixels = Vec::with_capacity(width * height);
    for yy in 0..height {
        for xx in 0..width {
            let u = xx as f64 / width.max(1) as f64;
            let v = yy as f64 / height.max(1) as f64;
            let b = &base[(u >= 0.5) as usize + 2 * (v >= 0.5) as usize];
            let noise = 0.05 * (r.random::<f64>() - 0.5);
            pixels.push([0, 1, 2].map(|c| (b[c] * (0.7 + 0.3 * u) + noise).clamp(0.0, 1.0)));
        }
    }
    Image::new(width, height, pixels).expect("channels clamped")
}
