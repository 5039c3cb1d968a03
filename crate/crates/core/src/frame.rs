//! Ancillary frames `|μ_k(t)⟩`, the gauge potential they generate, and the
//! residual checks that certify a passage.
//!
//! Ordering convention: `basis_at(t)[0]` is `μ_1`, the bra-space passage, and
//! the last vector is `μ_K`, the ket-space passage. "Lower triangular" refers
//! to this ordering: every entry of the rotated Hamiltonian above the diagonal
//! must vanish.

use std::fmt;
use std::sync::Arc;

use crate::dynamics::{TimeDependentOperator, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, StateVector, C64, I, ZERO};
use crate::smooth::SmoothFn;

type BasisFn = Arc<dyn Fn(f64) -> Vec<StateVector> + Send + Sync>;

/// Default finite-difference step for frames without analytic derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Clone)]
pub struct AncillaryFrame {
    dim: usize,
    basis: BasisFn,
    derivative: Option<BasisFn>,
    fd_step: f64,
}

impl AncillaryFrame {
    /// User-supplied frame; derivatives fall back to central differences.
    pub fn from_basis(dim: usize, basis: impl Fn(f64) -> Vec<StateVector> + Send + Sync + 'static) -> Self {
        Self {
            dim,
            basis: Arc::new(basis),
            derivative: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> Vec<StateVector> + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Central-difference step; pick ~1e-6 of the protocol time scale.
    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn basis_at(&self, t: f64) -> Vec<StateVector> {
        (self.basis)(t)
    }

    pub fn basis_derivative_at(&self, t: f64) -> Vec<StateVector> {
        match &self.derivative {
            Some(d) => d(t),
            None => self.finite_difference_derivative_at(t),
        }
    }

    pub fn finite_difference_derivative_at(&self, t: f64) -> Vec<StateVector> {
        let h = self.fd_step;
        let plus = self.basis_at(t + h);
        let minus = self.basis_at(t - h);
        plus.iter()
            .zip(&minus)
            .map(|(p, m)| p.axpy(C64::new(-1.0, 0.0), m).scale(C64::new(0.5 / h, 0.0)))
            .collect()
    }

    /// Matrix with columns `μ_k(t)`.
    pub fn basis_matrix(&self, t: f64) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.basis_at(t))
    }

    fn derivative_matrix(&self, t: f64) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.basis_derivative_at(t))
    }

    /// `G_km = ⟨μ_k|μ_m⟩`.
    pub fn gram(&self, t: f64) -> ComplexMatrix {
        let m = self.basis_matrix(t);
        &m.adjoint() * &m
    }

    /// Ket-space passage `μ_K(t)`.
    pub fn ket_passage(&self, t: f64) -> StateVector {
        self.basis_at(t).pop().expect("frame is never empty")
    }

    /// Bra-space passage `μ_1(t)`.
    pub fn bra_passage(&self, t: f64) -> StateVector {
        self.basis_at(t).swap_remove(0)
    }

    /// `Π_k(t) = |μ_k⟩⟨μ_k|`.
    pub fn projector(&self, k: usize, t: f64) -> ComplexMatrix {
        let b = self.basis_at(t);
        ComplexMatrix::outer(&b[k], &b[k])
    }
}

impl fmt::Debug for AncillaryFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AncillaryFrame")
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Which frame vector carries an exact passage: the last one under `H`
/// (ket space) or the first one under `H†` (bra space).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Passage {
    Ket,
    Bra,
}

impl Passage {
    pub fn vector(self, frame: &AncillaryFrame, t: f64) -> StateVector {
        match self {
            Passage::Ket => frame.ket_passage(t),
            Passage::Bra => frame.bra_passage(t),
        }
    }

    /// Generator that propagates this passage: `H` or `H†`.
    pub fn generator(self, h: &TimeDependentOperator) -> TimeDependentOperator {
        match self {
            Passage::Ket => h.clone(),
            Passage::Bra => h.adjoint(),
        }
    }

    /// Passage phase rate read off the rotated Hamiltonian:
    /// `[H_rot]_KK` for kets, `conj([H_rot]_11)` for bras.
    pub fn phase_rate(self, rotated: &ComplexMatrix) -> C64 {
        match self {
            Passage::Ket => {
                let k = rotated.dim() - 1;
                rotated[(k, k)]
            }
            Passage::Bra => rotated[(0, 0)].conj(),
        }
    }
}

/// `θ(t)` (population angle) and `α(t)` (local phase) of the two-level frame.
#[derive(Clone, Debug)]
pub struct TwoLevelFrameParams {
    pub theta: SmoothFn,
    pub alpha: SmoothFn,
}

/// Three-level frame: `θ, α` for the `{|0⟩, |1⟩}` pair and the mixing angle
/// `φ` plus phase `β` between the bright state `|b⟩` and `|e⟩`.
#[derive(Clone, Debug)]
pub struct ThreeLevelFrameParams {
    pub theta: SmoothFn,
    pub alpha: SmoothFn,
    pub phi_mix: SmoothFn,
    pub beta: SmoothFn,
}

/// `a·e^{i p}` and its time derivative.
fn phased(a: f64, a_dot: f64, p: f64, p_dot: f64) -> (C64, C64) {
    let e = C64::from_polar(1.0, p);
    (e * a, e * C64::new(a_dot, a * p_dot))
}

/// Components of `μ_1` and the bright state `|b⟩` over `{|0⟩, |1⟩}`, with
/// derivatives: `μ_1 = (cosθ e^{iα/2}, −sinθ e^{−iα/2})`,
/// `b = (sinθ e^{iα/2}, cosθ e^{−iα/2})`.
fn pair_vectors(theta: &SmoothFn, alpha: &SmoothFn, t: f64) -> [([C64; 2], [C64; 2]); 2] {
    let (th, thd) = (theta.value(t), theta.derivative(t));
    let (a, ad) = (alpha.value(t) / 2.0, alpha.derivative(t) / 2.0);
    let (s, c) = th.sin_cos();
    let (m0, dm0) = phased(c, -s * thd, a, ad);
    let (m1, dm1) = phased(-s, -c * thd, -a, -ad);
    let (b0, db0) = phased(s, c * thd, a, ad);
    let (b1, db1) = phased(c, -s * thd, -a, -ad);
    [([m0, m1], [dm0, dm1]), ([b0, b1], [db0, db1])]
}

pub fn two_level_frame(p: &TwoLevelFrameParams) -> AncillaryFrame {
    let (th, al) = (p.theta.clone(), p.alpha.clone());
    let (th_d, al_d) = (p.theta.clone(), p.alpha.clone());
    AncillaryFrame::from_basis(2, move |t| {
        let [(m, _), (b, _)] = pair_vectors(&th, &al, t);
        vec![StateVector::new(m.to_vec()), StateVector::new(b.to_vec())]
    })
    .with_derivative(move |t| {
        let [(_, dm), (_, db)] = pair_vectors(&th_d, &al_d, t);
        vec![StateVector::new(dm.to_vec()), StateVector::new(db.to_vec())]
    })
}

/// Three-level frame in the level order `(|0⟩, |1⟩, |e⟩)`.
fn three_level_vectors(p: &ThreeLevelFrameParams, t: f64) -> (Vec<StateVector>, Vec<StateVector>) {
    let [(m, dm), (b, db)] = pair_vectors(&p.theta, &p.alpha, t);
    let (ph, phd) = (p.phi_mix.value(t), p.phi_mix.derivative(t));
    let (be, bed) = (p.beta.value(t) / 2.0, p.beta.derivative(t) / 2.0);
    let (sp, cp) = ph.sin_cos();

    // μ2 = cosφ e^{iβ/2} b − sinφ e^{−iβ/2} e ;  μ3 = sinφ e^{iβ/2} b + cosφ e^{−iβ/2} e
    let (c2b, dc2b) = phased(cp, -sp * phd, be, bed);
    let (c2e, dc2e) = phased(-sp, -cp * phd, -be, -bed);
    let (c3b, dc3b) = phased(sp, cp * phd, be, bed);
    let (c3e, dc3e) = phased(cp, -sp * phd, -be, -bed);

    let mix = |cb: C64, ce: C64| StateVector::new(vec![cb * b[0], cb * b[1], ce]);
    let mix_dot = |cb: C64, dcb: C64, dce: C64| {
        StateVector::new(vec![dcb * b[0] + cb * db[0], dcb * b[1] + cb * db[1], dce])
    };

    let basis = vec![
        StateVector::new(vec![m[0], m[1], ZERO]),
        mix(c2b, c2e),
        mix(c3b, c3e),
    ];
    let derivs = vec![
        StateVector::new(vec![dm[0], dm[1], ZERO]),
        mix_dot(c2b, dc2b, dc2e),
        mix_dot(c3b, dc3b, dc3e),
    ];
    (basis, derivs)
}

pub fn three_level_frame(p: &ThreeLevelFrameParams) -> AncillaryFrame {
    let pb = p.clone();
    let pd = p.clone();
    AncillaryFrame::from_basis(3, move |t| three_level_vectors(&pb, t).0)
        .with_derivative(move |t| three_level_vectors(&pd, t).1)
}

/// `𝒱(t) = Σ_k |μ_k(t)⟩⟨μ_k(t0)|`, with analytic derivative when the frame
/// has one.
pub fn frame_unitary(frame: &AncillaryFrame, t0: f64) -> TimeDependentOperator {
    let w0_dag = frame.basis_matrix(t0).adjoint();
    let f = frame.clone();
    let w = w0_dag.clone();
    let fd = frame.clone();
    TimeDependentOperator::new(frame.dim(), move |t| &f.basis_matrix(t) * &w)
        .with_derivative(move |t| &fd.derivative_matrix(t) * &w0_dag)
}

/// `𝒜_km(t) = i⟨μ_k(t)|μ̇_m(t)⟩`.
pub fn gauge_potential(frame: &AncillaryFrame, t: f64) -> ComplexMatrix {
    let m = frame.basis_matrix(t);
    let d = frame.derivative_matrix(t);
    (&m.adjoint() * &d).scale(I)
}

/// `Σ_km 𝒜_km |μ_k⟩⟨μ_m|` in the computational basis.
pub fn gauge_operator(frame: &AncillaryFrame, t: f64) -> ComplexMatrix {
    let m = frame.basis_matrix(t);
    &(&m * &gauge_potential(frame, t)) * &m.adjoint()
}

/// `max_k ‖𝒜|μ_k⟩ − i d|μ_k⟩/dt‖`.
pub fn constraint_residual(frame: &AncillaryFrame, t: f64) -> f64 {
    let a = gauge_operator(frame, t);
    frame
        .basis_at(t)
        .iter()
        .zip(frame.basis_derivative_at(t))
        .map(|(mu, dmu)| a.apply(mu).axpy(-I, &dmu).norm())
        .fold(0.0, f64::max)
}

fn check_dims(h: &TimeDependentOperator, frame: &AncillaryFrame) -> Result<()> {
    if h.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            got: h.dim(),
        });
    }
    Ok(())
}

/// Coefficients `𝓗_km − 𝒜_km` of the rotated Hamiltonian in the frozen basis
/// `|μ_k(t0)⟩`, with `𝓗_km = ⟨μ_k|H|μ_m⟩`.
pub fn rotated_hamiltonian(h: &TimeDependentOperator, frame: &AncillaryFrame, t: f64) -> Result<ComplexMatrix> {
    check_dims(h, frame)?;
    let m = frame.basis_matrix(t);
    let dynamical = &(&m.adjoint() * &h.checked_value_at(t)?) * &m;
    Ok(&dynamical - &gauge_potential(frame, t))
}

/// Same coefficients through `𝒱†H𝒱 − i𝒱†d𝒱/dt`, projected on `|μ_k(t0)⟩`.
pub fn rotated_hamiltonian_via_unitary(
    h: &TimeDependentOperator,
    frame: &AncillaryFrame,
    t0: f64,
    t: f64,
) -> Result<ComplexMatrix> {
    check_dims(h, frame)?;
    let v = frame_unitary(frame, t0);
    let vt = v.value_at(t);
    let vdot = v.derivative_at(t).expect("frame unitary carries a derivative");
    let vd = vt.adjoint();
    let rot = &(&(&vd * &h.checked_value_at(t)?) * &vt) - &(&vd * &vdot).scale(I);
    let w0 = frame.basis_matrix(t0);
    Ok(&(&w0.adjoint() * &rot) * &w0)
}

/// Largest upper-triangular modulus of the rotated Hamiltonian over the grid.
pub fn triangularization_residual(
    h: &TimeDependentOperator,
    frame: &AncillaryFrame,
    grid: &TimeGrid,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in grid.times() {
        worst = worst.max(rotated_hamiltonian(h, frame, t)?.max_upper());
    }
    Ok(worst)
}

/// Tolerance on `‖H − H†‖_max` for [`von_neumann_residual`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// `max_{t,k} ‖dΠ_k/dt + i[H, Π_k]‖_max` for Hermitian `H`.
pub fn von_neumann_residual(h: &TimeDependentOperator, frame: &AncillaryFrame, grid: &TimeGrid) -> Result<f64> {
    check_dims(h, frame)?;
    let mut worst: f64 = 0.0;
    for t in grid.times() {
        let ht = h.checked_value_at(t)?;
        let herm = ht.hermiticity_residual();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { t, residual: herm });
        }
        let basis = frame.basis_at(t);
        let derivs = frame.basis_derivative_at(t);
        for (mu, dmu) in basis.iter().zip(&derivs) {
            let proj = ComplexMatrix::outer(mu, mu);
            let dproj = &ComplexMatrix::outer(dmu, mu) + &ComplexMatrix::outer(mu, dmu);
            let res = &dproj + &ht.commutator(&proj).scale(I);
            worst = worst.max(res.max_abs());
        }
    }
    Ok(worst)
}

/// Static frame equal to the computational basis.
pub fn identity_frame(dim: usize) -> AncillaryFrame {
    AncillaryFrame::from_basis(dim, move |_| (0..dim).map(|k| StateVector::basis(dim, k)).collect())
        .with_derivative(move |_| vec![StateVector::zeros(dim); dim])
}

/// Frame parameters that leave `μ_2 = |1⟩, μ_1 = |0⟩` at all times.
pub fn static_two_level_params() -> TwoLevelFrameParams {
    TwoLevelFrameParams {
        theta: SmoothFn::constant(0.0),
        alpha: SmoothFn::constant(0.0),
    }
}
