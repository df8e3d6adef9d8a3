//! Emden-Fowler and dimension-`M` changes of variables.
//!
//! With `t = -ln r` and `φ(t) = r^{κ₁} u(r)` the radial Euler-Lagrange
//! equation becomes the autonomous ODE
//!
//! ```text
//! φ'''' - K₂ φ'' + K₀ φ = |φ|^{p-2} φ
//! ```
//!
//! solved by `𝒞 cosh(νt)^m`. With `v(s) = r^a u(r)`, `r = s^q`, the weighted
//! radial quotient becomes the unweighted radial biharmonic quotient in the
//! (generally fractional) dimension `M`.

use crate::error::{CknError, Result};
use crate::numerics::{integrate, stencil_derivative, LogGrid, RadialProfile, TAIL_LIMIT};
use crate::params::CknParams;
use crate::scalar::{lit, Real};

/// Samples of `φ` on a uniform grid in `t = -ln r`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmdenFowlerProfile<T: Real> {
    grid: LogGrid<T>,
    phi: Vec<T>,
    params: CknParams<T>,
}

impl<T: Real> EmdenFowlerProfile<T> {
    pub fn new(grid: LogGrid<T>, phi: Vec<T>, params: &CknParams<T>) -> Result<Self> {
        if phi.len() != grid.n() {
            return Err(CknError::LengthMismatch { expected: grid.n(), got: phi.len() });
        }
        Ok(Self { grid, phi, params: params.clone() })
    }

    /// Samples `g(t)` on `grid`.
    pub fn from_fn(grid: &LogGrid<T>, params: &CknParams<T>, g: impl Fn(T) -> T) -> Self {
        let phi = grid.t().iter().map(|&t| g(t)).collect();
        Self { grid: grid.clone(), phi, params: params.clone() }
    }

    /// The cosh extremal on `grid`.
    pub fn extremal(grid: &LogGrid<T>, params: &CknParams<T>) -> Result<Self> {
        params.require_interior()?;
        Ok(Self::from_fn(grid, params, |t| crate::closedform::extremal_phi(params, t)))
    }

    pub fn grid(&self) -> &LogGrid<T> {
        &self.grid
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn params(&self) -> &CknParams<T> {
        &self.params
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { phi: self.phi.iter().map(|&v| c * v).collect(), ..self.clone() }
    }
}

fn flipped<T: Real>(grid: &LogGrid<T>) -> Result<LogGrid<T>> {
    LogGrid::new(-grid.t_max(), -grid.t_min(), grid.n())
}

/// `φ(t) = r^{κ₁} u(r)` at `r = e^{-t}`.
pub fn to_emden_fowler<T: Real>(u: &RadialProfile<T>, params: &CknParams<T>) -> Result<EmdenFowlerProfile<T>> {
    let g = u.grid();
    let n = g.n();
    let phi = (0..n)
        .map(|j| {
            let i = n - 1 - j;
            (params.kappa1 * g.t()[i]).exp() * u.values()[i]
        })
        .collect();
    EmdenFowlerProfile::new(flipped(g)?, phi, params)
}

/// Inverse of [`to_emden_fowler`].
pub fn from_emden_fowler<T: Real>(ef: &EmdenFowlerProfile<T>) -> Result<RadialProfile<T>> {
    let g = flipped(&ef.grid)?;
    let n = g.n();
    let values = (0..n)
        .map(|i| {
            let j = n - 1 - i;
            (-ef.params.kappa1 * g.t()[i]).exp() * ef.phi[j]
        })
        .collect();
    RadialProfile::new(g, values)
}

/// Normalized sup residual of the autonomous fourth-order ODE over the
/// interior nodes. The fourth derivative is the second-derivative stencil
/// applied twice; the six nodes nearest each end are skipped.
pub fn ode_residual<T: Real>(ef: &EmdenFowlerProfile<T>) -> Result<T> {
    let n = ef.grid.n();
    if n < 201 {
        return Err(CknError::GridTooSmall { n, need: 201 });
    }
    let h = ef.grid.h();
    let p = &ef.params;
    let d2 = stencil_derivative(&ef.phi, h, 2)?;
    let d4 = stencil_derivative(&d2, h, 2)?;
    let pm1 = p.p - T::one();
    let worst = (6..n - 6)
        .map(|i| {
            let f = ef.phi[i];
            let nl = f.abs().powf(pm1);
            let r = d4[i] - p.k2 * d2[i] + p.k0 * f - nl * f.signum();
            r.abs() / (T::one() + nl)
        })
        .fold(T::zero(), |m, r| if r > m || r.is_nan() { r } else { m });
    Ok(worst)
}

/// Raw residuals of the three coefficient balances of the cosh ansatz with
/// their largest term, for arbitrary `(m, ν, 𝒞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshResiduals<T: Real> {
    pub raw: [T; 3],
    pub scale: [T; 3],
}

impl<T: Real> CoshResiduals<T> {
    pub fn normalized(&self) -> [T; 3] {
        [0, 1, 2].map(|i| self.raw[i].abs() / self.scale[i])
    }
}

/// Balances of the `cosh^m`, `cosh^{m-2}` and `cosh^{m-4}` coefficients when
/// `𝒞 cosh(νt)^m` is substituted into the ODE.
pub fn cosh_residuals<T: Real>(params: &CknParams<T>, m: T, nu: T, amp: T) -> CoshResiduals<T> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let mn2 = m * m * nu * nu;
    let t1 = [mn2 * mn2, params.k2 * mn2, params.k0];
    let lhs2 = (m * m + (m - two) * (m - two)) * nu * nu;
    let mm = m * (m - one) * (m - two) * (m - lit(3.0)) * nu.powi(4);
    let ampp = amp.abs().powf(params.p - two);
    CoshResiduals {
        raw: [t1[0] - t1[1] + t1[2], lhs2 - params.k2, ampp - mm],
        scale: [t1[0].max(t1[1]).max(t1[2]), lhs2.max(params.k2), ampp.max(mm.abs())],
    }
}

/// Normalized balances at the derived `(m, ν, 𝒞)`.
pub fn cosh_ansatz_check<T: Real>(params: &CknParams<T>) -> Result<[T; 3]> {
    params.require_interior()?;
    Ok(cosh_residuals(params, params.m_exp, params.nu, params.cosh_amp).normalized())
}

/// `v(s) = r^a u(r)` with `r = s^q`; since `q < 0` the grid is reversed
/// and relabelled ascending in `ln s = ln r / q`.
pub fn to_dimension_m<T: Real>(u: &RadialProfile<T>, params: &CknParams<T>) -> Result<RadialProfile<T>> {
    params.require_interior()?;
    let g = u.grid();
    let n = g.n();
    let sg = g.rescaled_reversed(params.q_pow)?;
    let values = (0..n)
        .map(|i| {
            let j = n - 1 - i;
            (params.a_shift * g.t()[j]).exp() * u.values()[j]
        })
        .collect();
    RadialProfile::new(sg, values)
}

/// Inverse of [`to_dimension_m`].
pub fn from_dimension_m<T: Real>(v: &RadialProfile<T>, params: &CknParams<T>) -> Result<RadialProfile<T>> {
    params.require_interior()?;
    let sg = v.grid();
    let n = sg.n();
    let g = LogGrid::new(sg.t_max() * params.q_pow, sg.t_min() * params.q_pow, n)?;
    let values = (0..n)
        .map(|j| {
            let i = n - 1 - j;
            (-params.a_shift * g.t()[j]).exp() * v.values()[i]
        })
        .collect();
    RadialProfile::new(g, values)
}

/// Radial biharmonic Rayleigh quotient in dimension `M`, without the sphere
/// factor.
pub fn rayleigh_m<T: Real>(v: &RadialProfile<T>, m: T) -> Result<T> {
    let four = lit::<T>(4.0);
    if !(m > four) {
        return Err(CknError::MOutOfRange(crate::scalar::to_f64(m)));
    }
    let g = v.grid();
    let d1 = v.derivative(1)?;
    let d2 = v.derivative(2)?;
    let two = lit::<T>(2.0);
    // s² Δ_M v = v_tt + (M-2) v_t
    let op: Vec<T> = d2.iter().zip(&d1).map(|(&a, &b)| {
        let w = a + (m - two) * b;
        w * w
    }).collect();
    let crit = two * m / (m - four);
    let pw: Vec<T> = v.values().iter().map(|x| x.abs().powf(crit)).collect();
    let num = integrate(&op, g, m - lit(5.0)).checked(TAIL_LIMIT)?;
    let den = integrate(&pw, g, m - T::one()).checked(TAIL_LIMIT)?;
    Ok(num / den.powf((m - four) / m))
}
