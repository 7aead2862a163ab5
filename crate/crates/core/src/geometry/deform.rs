use std::f64::consts::PI;

/// Maps reference spatial coordinates `x0` to deformed coordinates at time `t`.
/// For one-dimensional meshes only the first component is used.
pub trait Deformation: Send + Sync {
    fn apply(&self, t: f64, x0: [f64; 2]) -> [f64; 2];
}

impl<F> Deformation for F
where
    F: Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync,
{
    fn apply(&self, t: f64, x0: [f64; 2]) -> [f64; 2] {
        self(t, x0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Deformation for Identity {
    fn apply(&self, _t: f64, x0: [f64; 2]) -> [f64; 2] {
        x0
    }
}

/// Sinusoidal deformation of the square `[-1/2, 1/2]^2`:
///
/// `x_i = x_i^0 + A (1/2 - x_i^0) sin(2π (1/2 - x_i^* + t))` with
/// `(x_1^*, x_2^*) = (x_2^0, x_1^0)`.
///
/// The right and top edges stay fixed; the left and bottom edges oscillate.
#[derive(Debug, Clone, Copy)]
pub struct PulseDeformation {
    pub amplitude: f64,
}

impl PulseDeformation {
    pub fn new(amplitude: f64) -> Self {
        PulseDeformation { amplitude }
    }
}

impl Deformation for PulseDeformation {
    fn apply(&self, t: f64, x0: [f64; 2]) -> [f64; 2] {
        let a = self.amplitude;
        let x1 = x0[0] + a * (0.5 - x0[0]) * (2.0 * PI * (0.5 - x0[1] + t)).sin();
        let x2 = x0[1] + a * (0.5 - x0[1]) * (2.0 * PI * (0.5 - x0[0] + t)).sin();
        [x1, x2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_deformation_fixes_origin_at_t0() {
        let d = PulseDeformation::new(0.1);
        let x = d.apply(0.0, [0.0, 0.0]);
        // sin(π) is not exactly zero in floating point
        assert!(x[0].abs() < 1e-16 && x[1].abs() < 1e-16);
    }

    #[test]
    fn pulse_deformation_fixes_right_and_top_edges() {
        let d = PulseDeformation::new(0.1);
        for &t in &[0.0, 0.13, 0.5, 0.77] {
            for &s in &[-0.5, -0.2, 0.1, 0.5] {
                assert_eq!(d.apply(t, [0.5, s])[0], 0.5);
                assert_eq!(d.apply(t, [s, 0.5])[1], 0.5);
            }
        }
    }

    #[test]
    fn pulse_deformation_spot_value() {
        let d = PulseDeformation::new(0.1);
        let x = d.apply(0.25, [-0.5, 0.0]);
        // x_1 = -0.5 + 0.1 * 1 * sin(2π * 0.75) = -0.6
        assert!((x[0] + 0.6).abs() < 1e-15);
    }
}
