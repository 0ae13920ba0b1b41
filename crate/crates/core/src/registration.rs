//! Similarity registration of point clouds driven by sliced partial transport.
//!
//! Each iteration projects the current estimate `sRX + β` and the target on
//! one random direction, solves the 1-D partial problem, moves the matched
//! points onto their targets along that direction, and refits `(R, s, β)` in
//! closed form from the moved points. `λ` is steered so that the number of
//! matched points tracks the known count of clean source points.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::generate::rng;
use crate::sliced::{sample_directions, sopt_slice_displacement, PointCloud};
use crate::types::CostSpec;

/// `T(x) = s R x + β` with `R` a proper rotation and `s > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub rotation: DMatrix<f64>,
    pub scale: f64,
    pub translation: DVector<f64>,
}

impl Transform {
    pub fn identity(dim: usize) -> Self {
        Self {
            rotation: DMatrix::identity(dim, dim),
            scale: 1.0,
            translation: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply_point(&self, p: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(p);
        let out = &self.rotation * v * self.scale + &self.translation;
        out.as_slice().to_vec()
    }

    pub fn apply(&self, cloud: &PointCloud) -> PointCloud {
        let d = self.dim();
        let sr = &self.rotation * self.scale;
        let mut coords = Vec::with_capacity(cloud.coords().len());
        for p in cloud.points() {
            for r in 0..d {
                let mut acc = self.translation[r];
                for c in 0..d {
                    acc += sr[(r, c)] * p[c];
                }
                coords.push(acc);
            }
        }
        PointCloud::new(d, coords).expect("transform preserves dimension")
    }

    /// The `d × (d+1)` matrix `[sR | β]`.
    pub fn augmented(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d + 1);
        m.view_mut((0, 0), (d, d))
            .copy_from(&(&self.rotation * self.scale));
        m.set_column(d, &self.translation);
        m
    }

    /// Largest deviation of `RᵀR` from `I` and of `det R` from 1.
    pub fn rotation_defect(&self) -> f64 {
        let d = self.dim();
        let gram = self.rotation.transpose() * &self.rotation - DMatrix::<f64>::identity(d, d);
        gram.amax().max((self.rotation.determinant() - 1.0).abs())
    }

    /// Rotation rows, flattened row-major.
    pub fn rotation_row_major(&self) -> Vec<f64> {
        self.rotation.transpose().as_slice().to_vec()
    }

    pub fn from_parts(rotation_row_major: &[f64], scale: f64, translation: &[f64]) -> Result<Self> {
        let d = translation.len();
        if rotation_row_major.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: rotation_row_major.len(),
            });
        }
        Ok(Self {
            rotation: DMatrix::from_row_slice(d, d, rotation_row_major),
            scale,
            translation: DVector::from_column_slice(translation),
        })
    }
}

impl Serialize for Transform {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Transform", 3)?;
        st.serialize_field("R", &self.rotation_row_major())?;
        st.serialize_field("s", &self.scale)?;
        st.serialize_field("beta", self.translation.as_slice())?;
        st.end()
    }
}

/// Frobenius norm of `[ŝR̂ | β̂] − [sR | β]`.
pub fn transform_error(estimate: &Transform, truth: &Transform) -> f64 {
    (estimate.augmented() - truth.augmented()).norm()
}

fn centered(cloud: &PointCloud) -> (DVector<f64>, DMatrix<f64>) {
    let d = cloud.dim();
    let mean = DVector::from_vec(cloud.centroid());
    let mut m = DMatrix::zeros(d, cloud.len());
    for (k, p) in cloud.points().enumerate() {
        for r in 0..d {
            m[(r, k)] = p[r] - mean[r];
        }
    }
    (mean, m)
}

/// Closed-form least-squares similarity transform mapping `source` onto
/// `target` (point `i` corresponds to point `i`).
///
/// With centred data, `Σ = (1/k) Σ (y − ȳ)(x − x̄)ᵀ = U D Vᵀ`,
/// `S = diag(1, …, 1, sign(det U · det V))`, `R = U S Vᵀ`,
/// `s = tr(D S) / σ_x²` and `β = ȳ − s R x̄`.
pub fn umeyama_fit(source: &PointCloud, target: &PointCloud) -> Result<Transform> {
    let d = source.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: target.dim(),
        });
    }
    let k = source.len();
    if target.len() != k {
        return Err(Error::InvalidArgument(format!(
            "correspondence counts differ: {k} sources, {} targets",
            target.len()
        )));
    }
    if k < d + 1 {
        return Err(Error::Degenerate(format!(
            "need at least {} correspondences in dimension {d}, got {k}",
            d + 1
        )));
    }
    let (mx, cx) = centered(source);
    let (my, cy) = centered(target);
    let kf = k as f64;
    let var_x = cx.norm_squared() / kf;
    let cov_x = &cx * cx.transpose() / kf;
    let sv_x = cov_x.singular_values();
    let top = sv_x.max();
    let rank_x = sv_x
        .iter()
        .filter(|&&s| s > 1e-12 * top.max(1e-300))
        .count();
    if var_x <= 1e-300 || rank_x + 1 < d {
        return Err(Error::Degenerate(format!(
            "source covariance has rank {rank_x} (variance {var_x:e}) in dimension {d}"
        )));
    }

    let sigma = &cy * cx.transpose() / kf;
    let svd = sigma.svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Degenerate("SVD did not return U".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Degenerate("SVD did not return Vᵀ".into()))?;
    let mut s_diag = DVector::from_element(d, 1.0);
    if u.determinant() * v_t.determinant() < 0.0 {
        s_diag[d - 1] = -1.0;
    }
    let rotation = &u * DMatrix::from_diagonal(&s_diag) * &v_t;
    let trace_ds: f64 = svd
        .singular_values
        .iter()
        .zip(s_diag.iter())
        .map(|(a, b)| a * b)
        .sum();
    let scale = trace_ds / var_x;
    let translation = &my - &rotation * &mx * scale;
    Ok(Transform {
        rotation,
        scale,
        translation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegistrationConfig {
    /// Number of clean source points `n0` (prior knowledge).
    pub clean_count: usize,
    /// Iterations, one random direction each.
    pub iterations: usize,
    /// Starting `λ`; `None` uses the squared projected diameter of the target.
    pub lambda0: Option<f64>,
    /// Multiplier applied when more than `n0` points were matched.
    pub decrease: f64,
    /// Multiplier applied otherwise.
    pub increase: f64,
    pub seed: u64,
    pub cost: CostSpec,
}

impl RegistrationConfig {
    pub fn new(clean_count: usize, iterations: usize, seed: u64) -> Self {
        Self {
            clean_count,
            iterations,
            lambda0: None,
            decrease: 0.98,
            increase: 1.02,
            seed,
            cost: CostSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// `λ` used for this iteration's slice.
    pub lambda: f64,
    pub matched: usize,
    pub fitted: bool,
    /// [`Transform::rotation_defect`] of the estimate after this iteration.
    pub rotation_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Registration {
    pub transform: Transform,
    pub trace: Vec<TraceEntry>,
    pub warnings: Vec<String>,
}

fn squared_projected_diameter(cloud: &PointCloud, dirs: &crate::sliced::DirectionSet) -> f64 {
    dirs.iter()
        .map(|t| {
            let p = cloud.dot(t);
            let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (hi - lo) * (hi - lo)
        })
        .fold(0.0, f64::max)
}

/// Estimates `T` with `T(X) ≈ Y` on the clean part of both clouds.
pub fn register(
    x: &PointCloud,
    y: &PointCloud,
    config: &RegistrationConfig,
) -> Result<Registration> {
    let d = x.dim();
    if y.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: y.dim(),
        });
    }
    if config.clean_count == 0 || config.clean_count > x.len() {
        return Err(Error::InvalidArgument(format!(
            "clean count must be in 1..={}, got {}",
            x.len(),
            config.clean_count
        )));
    }
    if !(config.decrease > 0.0 && config.decrease < 1.0 && config.increase > 1.0) {
        return Err(Error::InvalidArgument(
            "λ factors must satisfy 0 < decrease < 1 < increase".into(),
        ));
    }
    if config.iterations == 0 || y.is_empty() {
        return Err(Error::InvalidArgument(
            "registration needs at least one iteration and a non-empty target".into(),
        ));
    }
    let dirs = sample_directions(d, config.iterations, config.seed)?;

    let cx = DVector::from_vec(x.centroid());
    let cy = DVector::from_vec(y.centroid());
    let mut transform = Transform {
        rotation: DMatrix::identity(d, d),
        scale: 1.0,
        translation: cy - cx,
    };
    let mut lambda = match config.lambda0 {
        Some(l) => l,
        None => squared_projected_diameter(y, &dirs),
    };
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidPenalty(format!(
            "initial λ must be > 0, got {lambda}"
        )));
    }

    let mut trace = Vec::with_capacity(config.iterations);
    let mut warnings = Vec::new();
    for (l, theta) in dirs.iter().enumerate() {
        let mut moved = transform.apply(x);
        let disp = sopt_slice_displacement(&moved, y, theta, lambda, config.cost)?;
        disp.apply(&mut moved);
        let domain = disp.domain();
        let matched = domain.len();

        let mut fitted = false;
        if matched > d {
            match umeyama_fit(&x.select(&domain), &moved.select(&domain)) {
                Ok(t) => {
                    transform = t;
                    fitted = true;
                }
                Err(e) => warnings.push(format!("iteration {l}: fit skipped ({e})")),
            }
        } else {
            warnings.push(format!(
                "iteration {l}: only {matched} matches, fit skipped"
            ));
        }
        trace.push(TraceEntry {
            iteration: l,
            lambda,
            matched,
            fitted,
            rotation_defect: transform.rotation_defect(),
        });
        if matched > config.clean_count {
            lambda *= config.decrease;
        } else {
            lambda *= config.increase;
        }
    }
    Ok(Registration {
        transform,
        trace,
        warnings,
    })
}

/// Rotation from Euler angles (`z·y·x` order in 3-D, a single angle in 2-D).
pub fn rotation_from_angles(angles: &[f64]) -> Result<DMatrix<f64>> {
    match angles {
        [a] => {
            let (s, c) = a.sin_cos();
            Ok(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
        }
        [az, ay, ax] => {
            let r = nalgebra::Rotation3::from_euler_angles(*ax, *ay, *az);
            Ok(DMatrix::from_column_slice(3, 3, r.matrix().as_slice()))
        }
        _ => Err(Error::InvalidArgument(format!(
            "expected 1 (2-D) or 3 (3-D) angles, got {}",
            angles.len()
        ))),
    }
}

/// Overall standard deviation `sqrt(mean ‖x − x̄‖² / d)`.
pub fn cloud_std(cloud: &PointCloud) -> f64 {
    let (_, c) = centered(cloud);
    (c.norm_squared() / (cloud.len().max(1) * cloud.dim()) as f64).sqrt()
}

/// Random ground-truth transform: angles uniform in `[−π/3, π/3]`, scale
/// uniform in `scale_range`, translation uniform in `[−2·std, 2·std]` per axis.
pub fn sample_transform(
    dim: usize,
    std: f64,
    scale_range: (f64, f64),
    seed: u64,
) -> Result<Transform> {
    let n_angles = match dim {
        2 => 1,
        3 => 3,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "transforms are sampled in 2-D or 3-D, got {dim}"
            )))
        }
    };
    let (lo, hi) = scale_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!(
            "scale range ({lo}, {hi}) must be positive"
        )));
    }
    let mut r = rng(seed);
    let third = std::f64::consts::FRAC_PI_3;
    let angles: Vec<f64> = (0..n_angles)
        .map(|_| r.random_range(-third..=third))
        .collect();
    let scale = r.random_range(lo..=hi);
    let translation: Vec<f64> = (0..dim)
        .map(|_| r.random_range(-2.0 * std..=2.0 * std))
        .collect();
    Ok(Transform {
        rotation: rotation_from_angles(&angles)?,
        scale,
        translation: DVector::from_vec(translation),
    })
}

/// Appends `ceil(fraction · n)` points uniform in `[−M, M]^d`, where `M` is
/// the largest point norm of `cloud`.
pub fn with_uniform_noise(cloud: &PointCloud, fraction: f64, seed: u64) -> PointCloud {
    let d = cloud.dim();
    let count = (fraction * cloud.len() as f64).ceil() as usize;
    let bound = cloud
        .points()
        .map(|p| p.iter().map(|a| a * a).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut r = rng(seed);
    let coords: Vec<f64> = (0..count * d)
        .map(|_| r.random_range(-bound..=bound))
        .collect();
    cloud
        .concat(&PointCloud::new(d, coords).expect("finite noise"))
        .expect("same dimension")
}

/// Asymmetric synthetic 3-D shape: an ellipsoidal body, an offset head, and
/// two elongated ears, each sampled on its surface with slight jitter.
pub fn synthetic_shape(n: usize, seed: u64) -> PointCloud {
    // (centre, radii, share of points)
    let parts: [([f64; 3], [f64; 3], f64); 4] = [
        ([0.0, 0.0, 0.0], [1.0, 0.7, 0.6], 0.6),
        ([0.95, 0.45, 0.3], [0.4, 0.35, 0.33], 0.2),
        ([1.1, 0.75, 0.85], [0.1, 0.12, 0.45], 0.1),
        ([0.8, 0.6, 0.9], [0.09, 0.1, 0.4], 0.1),
    ];
    let mut r = rng(seed);
    let mut coords = Vec::with_capacity(3 * n);
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        let mut acc = 0.0;
        let mut part = parts[0];
        for p in parts {
            acc += p.2;
            part = p;
            if u < acc {
                break;
            }
        }
        let (centre, radii, _) = part;
        let mut v = [0.0f64; 3];
        let norm = loop {
            for a in v.iter_mut() {
                *a = r.sample(rand_distr::StandardNormal);
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-9 {
                break norm;
            }
        };
        let jitter = 1.0 + 0.02 * r.random_range(-1.0..1.0);
        for k in 0..3 {
            coords.push(centre[k] + radii[k] * v[k] / norm * jitter);
        }
    }
    PointCloud::new(3, coords).expect("finite shape")
}
