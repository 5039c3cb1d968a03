use super::three_level::ThreeLevelControls;
use super::two_level::TwoLevelControls;
use super::guarded_product;
use crate::dynamics::{TimeDependentOperator, TimeGrid};
use crate::error::{Error, Result};
use crate::frame::{rotated_hamiltonian, three_level_frame, two_level_frame, Passage, ThreeLevelFrameParams, TwoLevelFrameParams};
use crate::linalg::C64;

/// Accumulated complex passage phase `f(t) = f_real + i·f_imag` on a grid.
/// The passage state is `e^{−i f(t)}|μ(t)⟩`, so its norm is `e^{f_imag(t)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunctional {
    pub times: Vec<f64>,
    pub f_real: Vec<f64>,
    pub f_imag: Vec<f64>,
}

impl PhaseFunctional {
    /// Integrates `rate` from `grid.t0()` with Simpson's rule on each step
    /// (grid point, midpoint, grid point).
    pub fn from_rate(grid: &TimeGrid, mut rate: impl FnMut(f64) -> C64) -> Result<Self> {
        let n = grid.len();
        let mut times = Vec::with_capacity(n);
        let mut f_real = Vec::with_capacity(n);
        let mut f_imag = Vec::with_capacity(n);
        let mut acc = C64::new(0.0, 0.0);
        let mut left = rate(grid.t0());
        for i in 0..n {
            let t = grid.time(i);
            if i > 0 {
                let prev = grid.time(i - 1);
                let mid = rate(0.5 * (prev + t));
                let right = rate(t);
                acc += (t - prev) / 6.0 * (left + 4.0 * mid + right);
                left = right;
            }
            if !(acc.re.is_finite() && acc.im.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            times.push(t);
            f_real.push(acc.re);
            f_imag.push(acc.im);
        }
        Ok(Self { times, f_real, f_imag })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn value(&self, i: usize) -> C64 {
        C64::new(self.f_real[i], self.f_imag[i])
    }

    pub fn last(&self) -> C64 {
        self.value(self.len() - 1)
    }

    /// `|e^{−i f}| = e^{f_imag}` at grid index `i`.
    pub fn norm_factor(&self, i: usize) -> f64 {
        self.f_imag[i].exp()
    }

    /// Adds a constant to every sample.
    pub fn offset(&self, by: C64) -> Self {
        Self {
            times: self.times.clone(),
            f_real: self.f_real.iter().map(|v| v + by.re).collect(),
            f_imag: self.f_imag.iter().map(|v| v + by.im).collect(),
        }
    }

    /// Chains per-stage phases into one cumulative record. Each part is
    /// shifted by the running total and the duplicated boundary sample is
    /// dropped.
    pub fn concat(parts: &[PhaseFunctional]) -> Self {
        let mut out = Self {
            times: Vec::new(),
            f_real: Vec::new(),
            f_imag: Vec::new(),
        };
        for part in parts {
            let shift = if out.is_empty() { C64::new(0.0, 0.0) } else { out.last() };
            let shifted = part.offset(shift);
            let skip = usize::from(!out.is_empty());
            out.times.extend_from_slice(&shifted.times[skip..]);
            out.f_real.extend_from_slice(&shifted.f_real[skip..]);
            out.f_imag.extend_from_slice(&shifted.f_imag[skip..]);
        }
        out
    }
}

/// Closed-form ket-passage rate of the two-level frame:
/// `ḟ22 = Δcos²θ + ½Ω sin2θ cos(φ+α) − ½α̇ cos2θ + ½(γ0 e^{iξ0} sin²θ + γ1 e^{iξ1} cos²θ)`.
pub(crate) fn two_level_rate(c: &TwoLevelControls, frame: &TwoLevelFrameParams, t: f64) -> C64 {
    pair_rate(
        (c.delta)(t),
        (c.omega)(t),
        c.varphi,
        frame.theta.value(t),
        frame.alpha.value(t),
        frame.alpha.derivative(t),
        [(c.gamma0)(t), (c.gamma1)(t)],
        [c.xi0, c.xi1],
    )
}

#[allow(clippy::too_many_arguments)]
fn pair_rate(
    delta: f64,
    omega: f64,
    varphi: f64,
    theta: f64,
    alpha: f64,
    alpha_dot: f64,
    gammas: [f64; 2],
    xis: [f64; 2],
) -> C64 {
    let (s, c) = theta.sin_cos();
    let real = delta * c * c + 0.5 * omega * (2.0 * theta).sin() * (varphi + alpha).cos()
        - 0.5 * alpha_dot * (2.0 * theta).cos();
    let rates = C64::from_polar(gammas[0], xis[0]) * (s * s) + C64::from_polar(gammas[1], xis[1]) * (c * c);
    C64::new(real, 0.0) + 0.5 * rates
}

/// Closed-form ket-passage rate of the three-level frame (`μ_3`):
///
/// ```text
/// ḟ33 = Δe cos²φ + (Δ1 cos²θ + Δ0 sin²θ) sin²φ
///     + ½Ω_a sin²φ sin2θ cos(φ_a+α) + ½Ω sin2φ cos(φ_d+β)
///     − ½(α̇ sin²φ cos2θ + β̇ cos2φ)
///     + ½(γ0 e^{iξ0} sin²φ sin²θ + γ1 e^{iξ1} sin²φ cos²θ + γe e^{iξe} cos²φ)
/// ```
pub(crate) fn three_level_rate(c: &ThreeLevelControls, frame: &ThreeLevelFrameParams, t: f64) -> C64 {
    let (th, al, ph, be) = (
        frame.theta.value(t),
        frame.alpha.value(t),
        frame.phi_mix.value(t),
        frame.beta.value(t),
    );
    let (st2, ct2) = (th.sin().powi(2), th.cos().powi(2));
    let (sp2, cp2) = (ph.sin().powi(2), ph.cos().powi(2));
    let real = (c.delta_e)(t) * cp2
        + ((c.delta1)(t) * ct2 + (c.delta0)(t) * st2) * sp2
        + guarded_product((c.varphi_a + al).cos(), || 0.5 * (c.omega_a)(t) * sp2 * (2.0 * th).sin())
        + guarded_product((c.varphi + be).cos(), || 0.5 * (c.omega)(t) * (2.0 * ph).sin())
        - 0.5 * (frame.alpha.derivative(t) * sp2 * (2.0 * th).cos() + frame.beta.derivative(t) * (2.0 * ph).cos());
    let rates = C64::from_polar((c.gamma0)(t), c.xi0) * (sp2 * st2)
        + C64::from_polar((c.gamma1)(t), c.xi1) * (sp2 * ct2)
        + C64::from_polar((c.gamma_e)(t), c.xi_e) * cp2;
    C64::new(real, 0.0) + 0.5 * rates
}

/// Ket-passage phase `f_22` of the two-level frame.
pub fn phase_two_level(c: &TwoLevelControls, frame: &TwoLevelFrameParams, grid: &TimeGrid) -> Result<PhaseFunctional> {
    PhaseFunctional::from_rate(grid, |t| two_level_rate(c, frame, t))
}

/// Ket-passage phase `f_33` of the three-level frame.
pub fn phase_three_level(
    c: &ThreeLevelControls,
    frame: &ThreeLevelFrameParams,
    grid: &TimeGrid,
) -> Result<PhaseFunctional> {
    PhaseFunctional::from_rate(grid, |t| three_level_rate(c, frame, t))
}

/// Bra-passage phase of the two-level frame, `conj(ḟ11) = Δ − conj(ḟ22)`.
pub fn bra_phase_two_level(
    c: &TwoLevelControls,
    frame: &TwoLevelFrameParams,
    grid: &TimeGrid,
) -> Result<PhaseFunctional> {
    PhaseFunctional::from_rate(grid, |t| C64::new((c.delta)(t), 0.0) - two_level_rate(c, frame, t).conj())
}

/// Bra-passage phase of the three-level frame,
/// `conj(ḟ11) = Δ0 cos²θ + Δ1 − conj(ḟ22')`.
pub fn bra_phase_three_level(
    c: &ThreeLevelControls,
    frame: &ThreeLevelFrameParams,
    grid: &TimeGrid,
) -> Result<PhaseFunctional> {
    PhaseFunctional::from_rate(grid, |t| three_level_bra_rate(c, frame, t))
}

fn three_level_bra_rate(c: &ThreeLevelControls, frame: &ThreeLevelFrameParams, t: f64) -> C64 {
    let th = frame.theta.value(t);
    let pair = pair_rate(
        (c.delta1)(t),
        (c.omega_a)(t),
        c.varphi_a,
        th,
        frame.alpha.value(t),
        frame.alpha.derivative(t),
        [(c.gamma0)(t), (c.gamma1)(t)],
        [c.xi0, c.xi1],
    );
    C64::new((c.delta0)(t) * th.cos().powi(2) + (c.delta1)(t), 0.0) - pair.conj()
}

/// Passage phase taken numerically from the diagonal of the rotated
/// Hamiltonian of any frame.
pub fn rotated_phase(
    h: &TimeDependentOperator,
    frame: &crate::frame::AncillaryFrame,
    grid: &TimeGrid,
    passage: Passage,
) -> Result<PhaseFunctional> {
    let mut failure = None;
    let phase = PhaseFunctional::from_rate(grid, |t| match rotated_hamiltonian(h, frame, t) {
        Ok(m) => passage.phase_rate(&m),
        Err(e) => {
            failure.get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(phase),
    }
}

/// `max_t |conj(ḟ11) − (Δ − conj(ḟ22))|`, with `ḟ11` read from the rotated
/// Hamiltonian and `ḟ22` from its closed form. The relation assumes
/// `γ0 e^{iξ0} + γ1 e^{iξ1} = 0`.
pub fn bra_phase_relation_two_level(
    c: &TwoLevelControls,
    frame: &TwoLevelFrameParams,
    grid: &TimeGrid,
) -> Result<f64> {
    let h = c.hamiltonian();
    let f = two_level_frame(frame);
    let mut worst: f64 = 0.0;
    for t in grid.times() {
        let f11 = rotated_hamiltonian(&h, &f, t)?[(0, 0)];
        let f22 = two_level_rate(c, frame, t);
        let residual = f11.conj() - (C64::new((c.delta)(t), 0.0) - f22.conj());
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

/// Three-level analog: `conj(ḟ11) = Δ0 cos²θ + Δ1 − conj(ḟ22')`, where `ḟ22'`
/// is the two-level closed form for the `{|0⟩, |1⟩}` pair driven by
/// `Ω_a, φ_a` with detuning `Δ1`. Like the two-level relation it assumes
/// `γ0 e^{iξ0} + γ1 e^{iξ1} = 0`.
pub fn bra_phase_relation_three_level(
    c: &ThreeLevelControls,
    frame: &ThreeLevelFrameParams,
    grid: &TimeGrid,
) -> Result<f64> {
    let h = c.hamiltonian();
    let f = three_level_frame(frame);
    let mut worst: f64 = 0.0;
    for t in grid.times() {
        let f11 = rotated_hamiltonian(&h, &f, t)?[(0, 0)];
        worst = worst.max((f11.conj() - three_level_bra_rate(c, frame, t)).norm());
    }
    Ok(worst)
}
