//! Discrete weighted energies, the radial quotient and its minimization, and
//! the quotient along single-mode perturbations of the extremal.
//!
//! Everything is evaluated in the Emden-Fowler variable `φ = r^{κ₁} f`,
//! `τ = ln r`, where the mode-`k` energy density is
//! `(φ'' + 2𝒜φ' - (ℬ + λ_k)φ)²` with no power weight and the critical term
//! is `|φ|^p`.

use crate::banded::{Banded, BandedLu};
use crate::closedform::extremal_phi;
use crate::error::{CknError, Result};
use crate::numerics::{
    central_weights, gauss_legendre, integrate, sphere_area, stencil_derivative, LogGrid,
    RadialProfile, TAIL_LIMIT,
};
use crate::params::CknParams;
use crate::scalar::{from_u32, lit, Real};

/// Spherical-harmonic mode data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec<T: Real> {
    pub k: u32,
    /// `k(N-2+k)`, eigenvalue of `-Δ` on the sphere.
    pub lambda_k: T,
    /// `k(M-2+k)`, the same in dimension `M`.
    pub varpi_k: T,
    pub q2lambda_k: T,
    /// Dimension of the degree-`k` harmonics.
    pub multiplicity: u64,
}

impl<T: Real> ModeSpec<T> {
    pub fn new(params: &CknParams<T>, k: u32) -> Self {
        let kf: T = from_u32(k);
        let two = lit::<T>(2.0);
        let lambda_k = kf * (params.nf() - two + kf);
        Self {
            k,
            lambda_k,
            varpi_k: kf * (params.m_dim - two + kf),
            q2lambda_k: params.q_pow * params.q_pow * lambda_k,
            multiplicity: harmonic_dimension(params.n, k),
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(N+k-1, k) - C(N+k-3, k-2)`.
pub fn harmonic_dimension(n: u32, k: u32) -> u64 {
    let (n, k) = (n as u64, k as u64);
    let lead = binomial(n + k - 1, k);
    if k >= 2 {
        lead - binomial(n + k - 3, k - 2)
    } else {
        lead
    }
}

/// `φ = e^{κ₁τ} f` at the nodes.
pub(crate) fn ef_samples<T: Real>(f: &RadialProfile<T>, params: &CknParams<T>) -> Vec<T> {
    f.grid().t().iter().zip(f.values()).map(|(&t, &v)| (params.kappa1 * t).exp() * v).collect()
}

/// `φ'' + 2𝒜φ' - (ℬ+λ)φ` by the stencils of the numerics module.
pub(crate) fn ef_operator<T: Real>(phi: &[T], h: T, params: &CknParams<T>, lambda: T) -> Result<Vec<T>> {
    let d1 = stencil_derivative(phi, h, 1)?;
    let d2 = stencil_derivative(phi, h, 2)?;
    let two = lit::<T>(2.0);
    let c0 = params.cal_b + lambda;
    Ok((0..phi.len()).map(|i| d2[i] + two * params.cal_a * d1[i] - c0 * phi[i]).collect())
}

fn ef_energy<T: Real>(phi: &[T], grid: &LogGrid<T>, params: &CknParams<T>, lambda: T) -> Result<T> {
    let op = ef_operator(phi, grid.h(), params, lambda)?;
    let sq: Vec<T> = op.iter().map(|&v| v * v).collect();
    integrate(&sq, grid, -T::one()).checked(TAIL_LIMIT)
}

fn ef_star<T: Real>(phi: &[T], grid: &LogGrid<T>, p: T) -> Result<T> {
    let pw: Vec<T> = phi.iter().map(|v| v.abs().powf(p)).collect();
    integrate(&pw, grid, -T::one()).checked(TAIL_LIMIT)
}

/// `∫₀^∞ [f'' + (N-1+α)f'/r - λ_k f/r²]² r^{N+2α-β-1} dr`, no sphere factor.
pub fn mode_energy<T: Real>(f: &RadialProfile<T>, params: &CknParams<T>, mode: &ModeSpec<T>) -> Result<T> {
    ef_energy(&ef_samples(f, params), f.grid(), params, mode.lambda_k)
}

/// `∫ |x|^{-β} |div(|x|^α ∇u)|² dx` for radial `u`.
pub fn radial_energy<T: Real>(u: &RadialProfile<T>, params: &CknParams<T>) -> Result<T> {
    Ok(params.omega * mode_energy(u, params, &ModeSpec::new(params, 0))?)
}

/// `∫ |x|^γ |u|^p dx` for radial `u`.
pub fn star_norm_p<T: Real>(u: &RadialProfile<T>, params: &CknParams<T>) -> Result<T> {
    Ok(params.omega * ef_star(&ef_samples(u, params), u.grid(), params.p)?)
}

/// Weighted quotient `energy / (∫|x|^γ|u|^p)^{2/p}` of a radial function.
pub fn weighted_quotient<T: Real>(u: &RadialProfile<T>, params: &CknParams<T>) -> Result<T> {
    let e = radial_energy(u, params)?;
    let d = star_norm_p(u, params)?;
    if d == T::zero() {
        return Err(CknError::ZeroProfile);
    }
    Ok(e / d.powf(lit::<T>(2.0) / params.p))
}

/// The quadratic form `h Σ (L_k φ)²` on the nodes `2..n-3`, with `φ`
/// clamped to zero on the two outermost nodes at each end.
#[derive(Debug, Clone)]
pub(crate) struct ModeForm<T: Real> {
    pub a: Banded<T>,
    pub h: T,
    pub grid: LogGrid<T>,
}

impl<T: Real> ModeForm<T> {
    pub fn new(grid: &LogGrid<T>, params: &CknParams<T>, lambda: T) -> Result<Self> {
        let n = grid.n();
        if n < 9 {
            return Err(CknError::GridTooSmall { n, need: 9 });
        }
        let h = grid.h();
        let two = lit::<T>(2.0);
        let (w2, w1, w0) = central_weights(h, T::one(), two * params.cal_a, -(params.cal_b + lambda));
        let m = n - 4;
        let mut l = Banded::zeros(m, 2, 2);
        for r in 0..m {
            for j in 0..5 {
                // row r is node r+2; column node r+j, unknown r+j-2
                if let Some(c) = (r + j).checked_sub(2) {
                    if c < m {
                        l.add(r, c, w2[j] + w1[j] + w0[j]);
                    }
                }
            }
        }
        let w = vec![h; m];
        Ok(Self { a: Banded::gram(&l, &w), h, grid: grid.clone() })
    }

    /// Interior samples, dropping the clamped nodes.
    pub fn restrict(&self, full: &[T]) -> Vec<T> {
        full[2..full.len() - 2].to_vec()
    }

    pub fn extend(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); x.len() + 4];
        out[2..x.len() + 2].copy_from_slice(x);
        out
    }

    pub fn quad(&self, x: &[T]) -> T {
        dot(x, &self.a.matvec(x))
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Outcome of [`minimize_radial`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimized<T: Real> {
    pub value: T,
    /// Minimizer in the radial variable, normalized to `∫|x|^γ|u|^p = 1`.
    pub profile: RadialProfile<T>,
    pub iters: usize,
    /// Energy-norm gradient relative to the energy of the iterate.
    pub grad_norm: T,
    /// False when the line search stalled before reaching `tol`.
    pub converged: bool,
}

const ARMIJO: f64 = 1e-4;
const STEP_SEED: f64 = 1e-2;
const STEP_CAP: f64 = 0.5;
const MAX_RISES: usize = 10;

struct Flow<'a, T: Real> {
    form: &'a ModeForm<T>,
    lu: BandedLu<T>,
    p: T,
    omega: T,
}

impl<T: Real> Flow<'_, T> {
    fn star(&self, x: &[T]) -> T {
        self.form.h * x.iter().map(|v| v.abs().powf(self.p)).sum::<T>()
    }

    /// Rescales to `ω·star = 1`.
    fn normalize(&self, x: &mut [T]) -> Result<()> {
        let d = self.omega * self.star(x);
        if !(d > T::zero()) {
            return Err(CknError::ZeroProfile);
        }
        let c = d.powf(-T::one() / self.p);
        x.iter_mut().for_each(|v| *v = *v * c);
        Ok(())
    }

    fn value(&self, x: &[T]) -> T {
        self.omega * self.form.quad(x)
    }

    /// Tangent energy-metric gradient (up to the factor ω).
    fn gradient(&self, x: &[T]) -> Vec<T> {
        let two = lit::<T>(2.0);
        let pm2 = self.p - two;
        let gd: Vec<T> = x.iter().map(|&v| self.form.h * self.p * v.abs().powf(pm2) * v).collect();
        let y = self.lu.solve(&gd);
        let mu = two * self.p * self.star(x) / dot(&gd, &y);
        x.iter().zip(&y).map(|(&a, &b)| two * a - mu * b).collect()
    }
}

/// Projected steepest descent on the discrete radial quotient in the energy
/// metric, with Armijo backtracking. Iterates stay on `∫|x|^γ|u|^p = 1`.
pub fn minimize_radial<T: Real>(
    params: &CknParams<T>,
    init: &RadialProfile<T>,
    max_iters: usize,
    tol: T,
) -> Result<Minimized<T>> {
    params.require_interior()?;
    let grid = init.grid();
    let phi0 = ef_samples(init, params);
    if phi0.iter().all(|&v| v == T::zero()) {
        return Err(CknError::ZeroProfile);
    }
    ef_star(&phi0, grid, params.p)?;
    let form = ModeForm::new(grid, params, T::zero())?;
    let flow = Flow { lu: form.a.lu()?, form: &form, p: params.p, omega: params.omega };
    let mut x = form.restrict(&phi0);
    flow.normalize(&mut x)?;
    let mut q = flow.value(&x);
    let mut step = lit::<T>(STEP_SEED);
    let mut rises = 0;
    let mut grad_norm = T::infinity();
    let armijo = lit::<T>(ARMIJO);
    for iter in 0..=max_iters {
        let g = flow.gradient(&x);
        let ga = form.quad(&g);
        grad_norm = (ga / form.quad(&x)).sqrt();
        if grad_norm < tol {
            return Ok(finish(params, &form, &x, q, iter, grad_norm, true));
        }
        if iter == max_iters {
            break;
        }
        let accepted = loop {
            let mut trial: Vec<T> = x.iter().zip(&g).map(|(&a, &b)| a - step * b).collect();
            flow.normalize(&mut trial)?;
            let qn = flow.value(&trial);
            if qn <= q - armijo * step * params.omega * ga {
                step = (step + step).min(lit(STEP_CAP));
                break Some((trial, qn));
            }
            step = step / lit(2.0);
            if step < T::epsilon() {
                break None;
            }
        };
        match accepted {
            // Progress below rounding level: the flow has reached the floor
            // set by the grid and clamping.
            Some((_, qn)) if q - qn <= lit::<T>(8.0) * T::epsilon() * q.abs() && qn <= q => {
                return Ok(finish(params, &form, &x, q, iter, grad_norm, false));
            }
            Some((trial, qn)) => {
                rises = if qn > q { rises + 1 } else { 0 };
                if rises >= MAX_RISES {
                    return Err(CknError::Diverged(rises));
                }
                x = trial;
                q = qn;
            }
            None => return Ok(finish(params, &form, &x, q, iter, grad_norm, false)),
        }
    }
    Err(CknError::MaxIters {
        iters: max_iters,
        value: crate::scalar::to_f64(q),
        grad: crate::scalar::to_f64(grad_norm),
    })
}

fn finish<T: Real>(
    params: &CknParams<T>,
    form: &ModeForm<T>,
    x: &[T],
    value: T,
    iters: usize,
    grad_norm: T,
    converged: bool,
) -> Minimized<T> {
    let phi = form.extend(x);
    let values = form.grid.t().iter().zip(&phi).map(|(&t, &v)| (-params.kappa1 * t).exp() * v).collect();
    let profile = RadialProfile::new(form.grid.clone(), values).expect("lengths match");
    Minimized { value, profile, iters, grad_norm, converged }
}

const POLAR_NODES: usize = 64;

/// Quotient of `U + t·f·Ψ_k` for `k ∈ {0, 1}` (`Ψ₁ = x₁/|x|`), with `f`
/// rescaled so that `f Ψ_k` has the energy of `U`.
pub fn perturbed_quotient<T: Real>(
    params: &CknParams<T>,
    t_amp: T,
    mode: &ModeSpec<T>,
    direction: &RadialProfile<T>,
) -> Result<T> {
    params.require_interior()?;
    if t_amp.abs() > lit(0.2) {
        return Err(CknError::AmplitudeTooLarge(crate::scalar::to_f64(t_amp)));
    }
    if mode.k > 1 {
        return Err(CknError::InvalidMode { k: mode.k, reason: "only modes 0 and 1 are supported" });
    }
    let grid = direction.grid();
    let nf = params.nf();
    let big_phi: Vec<T> = grid.t().iter().map(|&t| extremal_phi(params, t)).collect();
    let e0 = ef_energy(&big_phi, grid, params, T::zero())?;
    let mut f = ef_samples(direction, params);
    let ef = ef_energy(&f, grid, params, mode.lambda_k)?;
    if ef == T::zero() {
        return Err(CknError::ZeroProfile);
    }
    let sphere_share = if mode.k == 1 { T::one() / nf } else { T::one() };
    let c = (e0 / (ef * sphere_share)).sqrt();
    f.iter_mut().for_each(|v| *v = *v * c);
    let p = params.p;
    let two = lit::<T>(2.0);
    let (num, den) = if mode.k == 0 {
        let sum: Vec<T> = big_phi.iter().zip(&f).map(|(&a, &b)| a + t_amp * b).collect();
        let e = ef_energy(&sum, grid, params, T::zero())?;
        (params.omega * e, params.omega * ef_star(&sum, grid, p)?)
    } else {
        // Mixed term vanishes: ∫ Ψ₁ over the sphere is zero.
        let num = params.omega * (e0 + t_amp * t_amp * c * c * ef * sphere_share);
        let (xs, ws) = gauss_legendre::<T>(POLAR_NODES);
        let half_pi = T::FRAC_PI_2();
        let polar: Vec<(T, T)> = xs
            .iter()
            .zip(&ws)
            .map(|(&x, &w)| {
                let theta = half_pi * (x + T::one());
                (theta.cos(), half_pi * w * theta.sin().powf(nf - two))
            })
            .collect();
        let row: Vec<T> = big_phi
            .iter()
            .zip(&f)
            .map(|(&a, &b)| polar.iter().map(|&(ct, w)| w * (a + t_amp * b * ct).abs().powf(p)).sum())
            .collect();
        let d = integrate(&row, grid, -T::one()).checked(TAIL_LIMIT)?;
        (num, sphere_area(nf - two) * d)
    };
    Ok(num / den.powf(two / p))
}
