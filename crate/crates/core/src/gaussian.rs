//! Maps from `[0,1)^d` to standard-Gaussian points on `R^d`.
//!
//! Two maps: componentwise inverse normal CDF, and Box-Muller applied to
//! consecutive coordinate pairs. Inputs are clamped to
//! `[2^-53, 1 - 2^-53]` so the outputs stay finite; the clamp perturbs at
//! most the last ulp of the uniform input.

use thiserror::Error;

use crate::matrix::Matrix;
use crate::qmc::PointSet;

/// Smallest uniform input passed to the quantile or to `ln` in Box-Muller.
pub const UNIFORM_CLAMP: f64 = f64::EPSILON / 2.0; // 2^-53

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("Box-Muller needs an even dimension, got d={0}")]
    OddDimension(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Inverse,
    BoxMuller,
}

impl std::fmt::Display for MapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapKind::Inverse => f.write_str("inverse"),
            MapKind::BoxMuller => f.write_str("box-muller"),
        }
    }
}

impl std::str::FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inverse" => Ok(MapKind::Inverse),
            "box-muller" | "box_muller" => Ok(MapKind::BoxMuller),
            other => Err(format!(
                "unknown map kind `{other}` (expected inverse|box-muller)"
            )),
        }
    }
}

/// Standard-Gaussian point block produced by one of the two maps.
#[derive(Debug, Clone)]
pub struct GaussianPoints {
    pub map_kind: MapKind,
    values: Matrix,
}

impl GaussianPoints {
    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn d(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }
}

/// Componentwise inverse normal CDF.
pub fn inv_cdf_map(points: &PointSet) -> GaussianPoints {
    let mut values = Matrix::zeros(points.n(), points.d());
    for i in 0..points.n() {
        let src = points.row(i);
        let dst = values.row_mut(i);
        for (out, &u) in dst.iter_mut().zip(src) {
            *out = norm_quantile(u.clamp(UNIFORM_CLAMP, 1.0 - UNIFORM_CLAMP));
        }
    }
    GaussianPoints {
        map_kind: MapKind::Inverse,
        values,
    }
}

/// Box-Muller on consecutive coordinate pairs: `(u1, u2)` maps to
/// `(r cos(2*pi*u2), r sin(2*pi*u2))` with `r = sqrt(-2 ln u1)`.
pub fn box_muller_map(points: &PointSet) -> Result<GaussianPoints, GaussianError> {
    let d = points.d();
    if d % 2 != 0 {
        return Err(GaussianError::OddDimension(d));
    }
    let mut values = Matrix::zeros(points.n(), d);
    for i in 0..points.n() {
        let src = points.row(i);
        let dst = values.row_mut(i);
        for p in 0..d / 2 {
            let u1 = src[2 * p].max(UNIFORM_CLAMP);
            let u2 = src[2 * p + 1];
            let r = (-2.0 * u1.ln()).sqrt();
            let theta = 2.0 * std::f64::consts::PI * u2;
            dst[2 * p] = r * theta.cos();
            dst[2 * p + 1] = r * theta.sin();
        }
    }
    Ok(GaussianPoints {
        map_kind: MapKind::BoxMuller,
        values,
    })
}

/// Apply the chosen map.
pub fn gaussian_map(points: &PointSet, kind: MapKind) -> Result<GaussianPoints, GaussianError> {
    match kind {
        MapKind::Inverse => Ok(inv_cdf_map(points)),
        MapKind::BoxMuller => box_muller_map(points),
    }
}

/// Inverse CDF of the standard normal (the PPND16 rational approximations
/// of Wichura's algorithm AS 241), with a central branch and two tail
/// branches. Absolute error is far below 1e-9 over `(0, 1)`.
pub fn norm_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0, "norm_quantile needs p in (0,1), got {p}");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly7(&CENTRAL_NUM, r) / poly7(&CENTRAL_DEN, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut t = (-r.ln()).sqrt();
    let x = if t <= 5.0 {
        t -= 1.6;
        poly7(&TAIL_NUM, t) / poly7(&TAIL_DEN, t)
    } else {
        t -= 5.0;
        poly7(&FAR_TAIL_NUM, t) / poly7(&FAR_TAIL_DEN, t)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn poly7(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

const CENTRAL_NUM: [f64; 8] = [
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
];
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
];
const TAIL_NUM: [f64; 8] = [
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
];
const TAIL_DEN: [f64; 8] = [
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
];
const FAR_TAIL_NUM: [f64; 8] = [
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
];
const FAR_TAIL_DEN: [f64; 8] = [
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
];
