use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::integrate_piecewise;

/// Samples used to estimate `g_max` when it is not supplied.
pub const G_MAX_SAMPLES: usize = 10_000;

const MEAN_TOL: f64 = 1e-12;

/// Shape of the coupling modulation over one cycle, argument `ζ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum SwitchingShape {
    Constant { value: f64 },
    /// `amplitude · sin²(πζ)`.
    SinSquared { amplitude: f64 },
    /// `height` on `[start, end)`, zero elsewhere.
    SquarePulse { height: f64, start: f64, end: f64 },
    /// Linear interpolation through `(knots[k], values[k])`; knots span `[0, 1]`.
    Table { knots: Vec<f64>, values: Vec<f64> },
}

/// The switching function `g` with its cached mean `ḡ` and bound `g_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingFunction {
    shape: SwitchingShape,
    mean: f64,
    g_max: f64,
}

impl SwitchingFunction {
    pub fn new(shape: SwitchingShape) -> Result<Self> {
        validate(&shape)?;
        let mut g = Self {
            shape,
            mean: 0.0,
            g_max: 0.0,
        };
        g.mean = g.integral(0.0, 1.0)?;
        g.g_max = g.sampled_max();
        Ok(g)
    }

    pub fn constant(value: f64) -> Self {
        Self::new(SwitchingShape::Constant { value }).expect("constant switching is always valid")
    }

    pub fn sin_squared(amplitude: f64) -> Self {
        Self::new(SwitchingShape::SinSquared { amplitude })
            .expect("sin² switching is always valid")
    }

    pub fn square_pulse(height: f64, start: f64, end: f64) -> Result<Self> {
        Self::new(SwitchingShape::SquarePulse { height, start, end })
    }

    pub fn table(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(SwitchingShape::Table { knots, values })
    }

    /// Overrides the sampled `g_max`.
    pub fn with_g_max(mut self, g_max: f64) -> Self {
        self.g_max = g_max;
        self
    }

    pub fn shape(&self) -> &SwitchingShape {
        &self.shape
    }

    /// `ḡ = ∫₀¹ g(ζ) dζ`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Largest `|g|` over a cycle.
    pub fn g_max(&self) -> f64 {
        self.g_max
    }

    /// `g(ζ)`, with `ζ` clamped into `[0, 1]`.
    pub fn evaluate(&self, zeta: f64) -> f64 {
        let z = zeta.clamp(0.0, 1.0);
        match &self.shape {
            SwitchingShape::Constant { value } => *value,
            SwitchingShape::SinSquared { amplitude } => {
                let s = libm::sin(PI * z);
                amplitude * s * s
            }
            SwitchingShape::SquarePulse { height, start, end } => {
                if z >= *start && (z < *end || (*end >= 1.0 && z <= 1.0)) {
                    *height
                } else {
                    0.0
                }
            }
            SwitchingShape::Table { knots, values } => interpolate(knots, values, z),
        }
    }

    /// Points in `[0, 1]` where `g` or its derivative may jump, including
    /// both endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = alloc::vec![0.0, 1.0];
        match &self.shape {
            SwitchingShape::SquarePulse { start, end, .. } => {
                pts.push(*start);
                pts.push(*end);
            }
            SwitchingShape::Table { knots, .. } => pts.extend_from_slice(knots),
            _ => {}
        }
        pts.retain(|p| (0.0..=1.0).contains(p));
        pts.sort_by(|a, b| a.partial_cmp(b).expect("breakpoints are finite"));
        pts.dedup();
        pts
    }

    /// `∫_a^b g(ζ) dζ` for `0 ≤ a ≤ b ≤ 1`, split at breakpoints.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.weighted_integral(a, b, |_| 1.0)
    }

    /// `∫_a^b g(ζ) w(ζ) dζ` for a smooth weight `w`.
    pub fn weighted_integral<W: Fn(f64) -> f64>(&self, a: f64, b: f64, w: W) -> Result<f64> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(Error::InvalidArgument(format!(
                "integration range [{a}, {b}] is not inside [0, 1]"
            )));
        }
        let mut pts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .filter(|&p| p > a && p < b)
            .collect();
        pts.insert(0, a);
        pts.push(b);
        integrate_piecewise(|z| self.evaluate(z) * w(z), &pts, MEAN_TOL)
    }

    /// Sign flips of `g` somewhere in the cycle.
    pub fn takes_negative_values(&self) -> bool {
        let n = G_MAX_SAMPLES;
        (0..=n).any(|k| self.evaluate(k as f64 / n as f64) < 0.0)
            || self.breakpoints().iter().any(|&p| self.evaluate(p) < 0.0)
    }

    fn sampled_max(&self) -> f64 {
        let n = G_MAX_SAMPLES;
        let grid = (0..=n).map(|k| k as f64 / n as f64);
        grid.chain(self.breakpoints())
            .map(|z| self.evaluate(z).abs())
            .fold(0.0, f64::max)
    }
}

fn validate(shape: &SwitchingShape) -> Result<()> {
    match shape {
        SwitchingShape::Constant { value } => finite(*value, "constant value"),
        SwitchingShape::SinSquared { amplitude } => finite(*amplitude, "sin² amplitude"),
        SwitchingShape::SquarePulse { height, start, end } => {
            finite(*height, "pulse height")?;
            if !(0.0 <= *start && start < end && *end <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "square pulse window [{start}, {end}) must satisfy 0 <= start < end <= 1"
                )));
            }
            Ok(())
        }
        SwitchingShape::Table { knots, values } => {
            if knots.len() < 2 || knots.len() != values.len() {
                return Err(Error::InvalidArgument(
                    "switching table needs at least two knots and one value per knot".into(),
                ));
            }
            if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
                return Err(Error::InvalidArgument(
                    "switching table knots must start at 0 and end at 1".into(),
                ));
            }
            if knots.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidArgument(
                    "switching table knots must be strictly increasing".into(),
                ));
            }
            values.iter().try_for_each(|v| finite(*v, "table value"))
        }
    }
}

fn finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite")))
    }
}

fn interpolate(knots: &[f64], values: &[f64], z: f64) -> f64 {
    let k = match knots.iter().position(|&x| x > z) {
        Some(0) => return values[0],
        Some(k) => k,
        None => return values[values.len() - 1],
    };
    let (x0, x1) = (knots[k - 1], knots[k]);
    let (y0, y1) = (values[k - 1], values[k]);
    y0 + (y1 - y0) * (z - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_mean() {
        let g = SwitchingFunction::constant(1.7);
        assert!((g.mean() - 1.7).abs() < 1e-12);
        assert_eq!(g.g_max(), 1.7);
    }

    #[test]
    fn sin_squared_mean_is_half_amplitude() {
        let nu = 1.3;
        let g = SwitchingFunction::sin_squared(2.0 * nu);
        assert!((g.mean() - nu).abs() < 1e-10);
        assert!((g.g_max() - 2.0 * nu).abs() < 1e-12);
    }

    #[test]
    fn square_pulse_area() {
        let g = SwitchingFunction::square_pulse(3.0, 0.0, 0.5).unwrap();
        assert!((g.mean() - 1.5).abs() < 1e-10);
        assert_eq!(g.evaluate(0.25), 3.0);
        assert_eq!(g.evaluate(0.75), 0.0);
        assert_eq!(g.breakpoints(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn table_interpolates_linearly() {
        let g = SwitchingFunction::table(vec![0.0, 0.5, 1.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert!((g.evaluate(0.25) - 1.0).abs() < 1e-15);
        assert!((g.mean() - 1.0).abs() < 1e-12);
        assert_eq!(g.breakpoints(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(SwitchingFunction::square_pulse(1.0, 0.6, 0.2).is_err());
        assert!(SwitchingFunction::table(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SwitchingFunction::table(vec![0.1, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SwitchingFunction::new(SwitchingShape::Constant { value: f64::NAN }).is_err());
    }

    #[test]
    fn partial_integral_of_sin_squared() {
        let nu = 1.0;
        let g = SwitchingFunction::sin_squared(2.0 * nu);
        // antiderivative 2ν(ζ/2 − sin(2πζ)/(4π))
        let want = nu / 4.0 - nu / (2.0 * PI);
        assert!((g.integral(0.0, 0.25).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn g_max_override_and_sign_detection() {
        let g = SwitchingFunction::constant(-1.0).with_g_max(5.0);
        assert_eq!(g.g_max(), 5.0);
        assert!(g.takes_negative_values());
        assert!(!SwitchingFunction::sin_squared(1.0).takes_negative_values());
    }
}
