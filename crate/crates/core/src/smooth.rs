//! Scalar functions of time used as frame parameters and control signals.

use std::fmt;
use std::sync::Arc;

/// A real time signal (envelope, detuning, rate).
pub type Signal = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn constant_signal(c: f64) -> Signal {
    Arc::new(move |_| c)
}

/// A real function of time together with its analytic derivative.
#[derive(Clone)]
pub struct SmoothFn {
    value: Signal,
    derivative: Signal,
}

impl SmoothFn {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0)
    }

    /// `v(t) = offset + slope·(t − t_ref)`.
    pub fn affine(t_ref: f64, offset: f64, slope: f64) -> Self {
        Self::new(move |t| offset + slope * (t - t_ref), move |_| slope)
    }

    /// `v(t) = amplitude·sin(omega·t + phase)`.
    pub fn sine(amplitude: f64, omega: f64, phase: f64) -> Self {
        Self::new(
            move |t| amplitude * (omega * t + phase).sin(),
            move |t| amplitude * omega * (omega * t + phase).cos(),
        )
    }

    /// `v(t) = amplitude·cos(omega·t + phase)`.
    pub fn cosine(amplitude: f64, omega: f64, phase: f64) -> Self {
        Self::new(
            move |t| amplitude * (omega * t + phase).cos(),
            move |t| -amplitude * omega * (omega * t + phase).sin(),
        )
    }

    /// Adds a constant offset.
    pub fn shifted(&self, offset: f64) -> Self {
        let v = self.value.clone();
        let d = self.derivative.clone();
        Self::new(move |t| v(t) + offset, move |t| d(t))
    }

    /// Multiplies value and derivative by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let v = self.value.clone();
        let d = self.derivative.clone();
        Self::new(move |t| s * v(t), move |t| s * d(t))
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }

    pub fn as_signal(&self) -> Signal {
        self.value.clone()
    }

    pub fn derivative_signal(&self) -> Signal {
        self.derivative.clone()
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SmoothFn(..)")
    }
}
