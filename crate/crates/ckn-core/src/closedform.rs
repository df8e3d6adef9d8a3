//! Explicit extremals, linearized kernels and best constants.

use crate::error::{CknError, Result};
use crate::numerics::{integrate, ln_gamma, LogGrid, Quadrature};
use crate::params::CknParams;
use crate::scalar::{from_u32, lit, ln_cosh, softplus, to_f64, Real};

/// Scaled and rescaled extremal `c·λ^{κ₁} U(λ r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSpec<T: Real> {
    pub params: CknParams<T>,
    pub lambda: T,
    pub amplitude: T,
}

impl<T: Real> ExtremalSpec<T> {
    /// `λ = 1` with the amplitude that makes `U` solve the Euler-Lagrange
    /// equation exactly.
    pub fn new(params: &CknParams<T>) -> Result<Self> {
        params.require_interior()?;
        Ok(Self { params: params.clone(), lambda: T::one(), amplitude: params.c_amp })
    }

    pub fn with_lambda(mut self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(CknError::NonPositiveArgument(to_f64(lambda)));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn with_amplitude(mut self, amplitude: T) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// `ln(U/amplitude)` at `τ = ln r`.
    fn ln_shape(&self, tau: T) -> T {
        let p = &self.params;
        let d = p.gap();
        let x = lit::<T>(2.0) * p.kappa2;
        let z = tau + self.lambda.ln();
        p.kappa1 * self.lambda.ln() - d * z - x / d * softplus(d * z)
    }
}

/// `U` at radius `r`, evaluated in logarithms so that neither end of a wide
/// grid overflows.
pub fn extremal_u<T: Real>(spec: &ExtremalSpec<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(CknError::NonPositiveRadius(to_f64(r)));
    }
    Ok(spec.amplitude * spec.ln_shape(r.ln()).exp())
}

/// `U` at `r = e^τ`.
pub fn extremal_u_log<T: Real>(spec: &ExtremalSpec<T>, tau: T) -> T {
    spec.amplitude * spec.ln_shape(tau).exp()
}

/// `r · dU/dr` at `r = e^τ`.
pub fn extremal_u_dlog<T: Real>(spec: &ExtremalSpec<T>, tau: T) -> T {
    let p = &spec.params;
    let d = p.gap();
    let x = lit::<T>(2.0) * p.kappa2;
    let z = d * (tau + spec.lambda.ln());
    // r^d/(1+r^d) = logistic(d ln(λr))
    let sig = T::one() / (T::one() + (-z).exp());
    extremal_u_log(spec, tau) * (-d - x * sig)
}

/// `Φ(τ) = 𝒞 cosh(ντ)^m`, the extremal in the Emden-Fowler variable.
pub fn extremal_phi<T: Real>(params: &CknParams<T>, tau: T) -> T {
    params.cosh_amp * (params.m_exp * ln_cosh(params.nu * tau)).exp()
}

/// `dΦ/dτ = mν tanh(ντ) Φ`.
pub fn extremal_phi_d1<T: Real>(params: &CknParams<T>, tau: T) -> T {
    params.m_exp * params.nu * (params.nu * tau).tanh() * extremal_phi(params, tau)
}

/// Sharp constant of the unweighted second-order Sobolev inequality in `R^N`.
pub fn sobolev_s0<T: Real>(n: u32) -> T {
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let lg = ln_gamma(nf / two).expect("N/2 > 0") - ln_gamma(nf).expect("N > 0");
    T::PI() * T::PI() * nf * (nf - four) * (nf * nf - four) * (four / nf * lg).exp()
}

/// Best constant of the radial biharmonic inequality in dimension `M`,
/// normalized without the sphere factor.
pub fn b_of_m<T: Real>(m: T) -> Result<T> {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    if !(m > four) {
        return Err(CknError::MOutOfRange(to_f64(m)));
    }
    let lg = two * ln_gamma(m / two)? - T::LN_2() - ln_gamma(m)?;
    Ok((m - four) * (m - two) * m * (m + two) * (four / m * lg).exp())
}

/// Best constant among radial functions.
pub fn radial_constant_sr<T: Real>(params: &CknParams<T>) -> Result<T> {
    params.require_interior()?;
    let two = lit::<T>(2.0);
    let d = params.gap();
    let e = two * d / (two * params.kappa1);
    let b = b_of_m(params.m_dim)?;
    Ok(((e - lit(4.0)) * (two / d).ln() + e * params.omega.ln()).exp() * b)
}

fn rellich_q<T: Real>(n: u32, alpha: T) -> T {
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let c = (two + alpha) / two;
    c * (nf - two + alpha - c)
}

fn check_alpha<T: Real>(n: u32, alpha: T) -> Result<()> {
    let bound = lit::<T>(2.0) - from_u32::<T>(n);
    if alpha > bound && alpha.is_finite() {
        Ok(())
    } else {
        Err(CknError::AlphaOutOfRange { alpha: to_f64(alpha), bound: to_f64(bound) })
    }
}

/// Constant of the weighted Rellich inequality on the boundary `β = α - 2`.
pub fn rellich_constant<T: Real>(n: u32, alpha: T) -> Result<T> {
    check_alpha(n, alpha)?;
    Ok(rellich_candidates(n, alpha)?.0)
}

/// The two candidate constants `(S₁, S₂)` obtained by absorbing the gradient
/// term directly and by way of the sharp Hardy-Rellich bound. They coincide.
pub fn rellich_candidates<T: Real>(n: u32, alpha: T) -> Result<(T, T)> {
    check_alpha(n, alpha)?;
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let q = rellich_q(n, alpha);
    let lead = (nf * (nf - four) / four).powi(2);
    let half = (nf - four) / two;
    let s1 = lead + two * (q - nf + two) * half * half + q * q;
    let frac = four * (q - nf + two) / (nf * nf - four * nf + lit(8.0));
    let s2 = lead * (T::one() + frac) + half.powi(4) * frac + q * q;
    Ok((s1, s2))
}

/// Sharp constant on the lower boundary for `2 - N < α < 0`.
pub fn critical_constant<T: Real>(n: u32, alpha: T) -> Result<T> {
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    if !(alpha > two - nf && alpha < T::zero()) {
        return Err(CknError::AlphaOutOfRange { alpha: to_f64(alpha), bound: to_f64(two - nf) });
    }
    let four = lit::<T>(4.0);
    let e = four - four / nf;
    Ok((e * (T::one() + alpha / (nf - two)).ln()).exp() * sobolev_s0(n))
}

/// The two radial kernels of the linearized equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// Scaling direction, radial.
    Z0,
    /// Radial factor of the translation-type directions, mode 1.
    Z1,
}

/// `Z₀(r)` or the radial factor of `Zᵢ(r)`.
pub fn linearized_mode<T: Real>(params: &CknParams<T>, which: Kernel, r: T) -> Result<T> {
    params.require_interior()?;
    if !(r > T::zero()) {
        return Err(CknError::NonPositiveRadius(to_f64(r)));
    }
    Ok(linearized_mode_log(params, which, r.ln()))
}

/// As [`linearized_mode`] with `r = e^τ`.
pub fn linearized_mode_log<T: Real>(params: &CknParams<T>, which: Kernel, tau: T) -> T {
    let d = params.gap();
    let env = -(params.a_shift / d) * softplus(d * tau);
    match which {
        // 1 - r^{-d}, kept as sign·exp(log) for very negative τ
        Kernel::Z0 => {
            let z = d * tau;
            if z >= T::zero() {
                -(-z).exp_m1() * env.exp()
            } else {
                -(-z + env).exp() * (-z.exp_m1())
            }
        }
        Kernel::Z1 => (-d / lit(2.0) * tau + env).exp(),
    }
}

/// `X₀(s)` or `X₁(s)`, the kernels in the dimension-`M` variable.
pub fn x_mode<T: Real>(m: T, which: Kernel, s: T) -> T {
    let two = lit::<T>(2.0);
    let env = -(m - two) / two * (s * s).ln_1p();
    match which {
        Kernel::Z0 => (T::one() - s * s) * env.exp(),
        Kernel::Z1 => s * env.exp(),
    }
}

/// `X₁'(s) = (1 - (M-3)s²)(1+s²)^{-M/2}`.
pub fn x1_prime<T: Real>(m: T, s: T) -> T {
    let two = lit::<T>(2.0);
    (T::one() - (m - lit(3.0)) * s * s) * (-(m / two) * (s * s).ln_1p()).exp()
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, `1 - S(r-1)` between with
/// `S(x) = 10x³ - 15x⁴ + 6x⁵`. Returns `(g, g', g'')`.
pub fn rellich_cutoff<T: Real>(r: T) -> (T, T, T) {
    let x = r - T::one();
    if x <= T::zero() {
        return (T::one(), T::zero(), T::zero());
    }
    if x >= T::one() {
        return (T::zero(), T::zero(), T::zero());
    }
    let c = |v: f64| lit::<T>(v);
    let s = x * x * x * (c(10.0) + x * (c(-15.0) + c(6.0) * x));
    let s1 = x * x * (c(30.0) + x * (c(-60.0) + c(30.0) * x));
    let s2 = x * (c(60.0) + x * (c(-180.0) + c(120.0) * x));
    (T::one() - s, -s1, -s2)
}

/// Rellich quotient of `u_ε = r^{-(N-4)/2+ε} g(r)` with the cutoff of
/// [`rellich_cutoff`]. The part of both integrals below the first grid node,
/// where `u_ε` is a pure power, is added in closed form.
pub fn rellich_test_quotient<T: Real>(n: u32, eps: T, grid: &LogGrid<T>) -> Result<T> {
    let half = lit::<T>(0.5);
    if !(eps > T::zero() && eps < half) {
        return Err(CknError::EpsOutOfRange(to_f64(eps)));
    }
    if grid.t_min() > T::zero() || grid.t_max() < T::LN_2() {
        return Err(CknError::BadGridSpec("grid must cover [e^t_min, 2] with t_min <= 0".into()));
    }
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let c = (nf - lit(4.0)) / two;
    let sigma = eps - c;
    let mut num = Vec::with_capacity(grid.n());
    let mut den = Vec::with_capacity(grid.n());
    for &r in grid.nodes() {
        let (g, g1, g2) = rellich_cutoff(r);
        let pw = r.powf(sigma);
        let u = pw * g;
        let u1 = pw * (sigma / r * g + g1);
        let u2 = pw * (sigma * (sigma - T::one()) / (r * r) * g + two * sigma / r * g1 + g2);
        let op = u2 + (nf - lit(3.0)) / r * u1;
        num.push(op * op);
        den.push(u * u / r.powi(4));
    }
    let w = nf - T::one();
    let r0 = grid.nodes()[0];
    let tail = r0.powf(two * eps) / (two * eps);
    let lead = (eps * eps - c * c).powi(2);
    let Quadrature { value: a, .. } = integrate(&num, grid, w);
    let Quadrature { value: b, .. } = integrate(&den, grid, w);
    Ok((a + lead * tail) / (b + tail))
}
