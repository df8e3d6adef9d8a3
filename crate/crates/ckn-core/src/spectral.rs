//! Linearized eigenproblems around the extremal, mode by mode.
//!
//! For mode `k` the pencil is `(E_k, D)` with `E_k` the mode energy and
//! `D(f) = ∫ U^{p-2} f² r^{γ+N-1} dr`. In Emden-Fowler variables both are
//! unweighted: `D` becomes `∫ Φ^{p-2} φ² dτ`. The scaling direction gives
//! `ν = 1` (eigenfunction `U`) and `ν = p - 1` (eigenfunction `κ₁U + rU'`)
//! for `k = 0`; mode 1 reaches `p - 1` exactly on the Felli-Schneider curve.

use crate::banded::BandedLu;
use crate::closedform::{extremal_phi, x1_prime, x_mode, Kernel};
use crate::error::{CknError, Result};
use crate::numerics::{integrate, stencil_derivative, LogGrid, RadialProfile};
use crate::params::{derive, lower_beta, upper_beta, CknParams, RegionClass};
use crate::scalar::{from_u32, lit, to_f64, Real};
use crate::variational::{dot, ModeForm, ModeSpec};

/// Which eigenpair of a mode: the lowest or, for `k = 0`, the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenIndex {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult<T: Real> {
    pub eigenvalue: T,
    /// Eigenfunction in the radial variable, `∫U^{p-2}f²r^{γ+N-1}dr = 1`.
    pub profile: RadialProfile<T>,
    /// The same in the Emden-Fowler variable, clamped nodes included.
    pub phi: Vec<T>,
    /// `‖Ax - νBx‖_{A⁻¹} / ‖x‖_A`.
    pub residual: T,
    pub iters: usize,
}

const MAX_ITERS: usize = 500;
const RESIDUAL_TOL: f64 = 1e-10;
const STALL_TOL: f64 = 1e-8;
const SIGN_FLOOR: f64 = 1e-3;

struct Pencil<T: Real> {
    form: ModeForm<T>,
    b: Vec<T>,
    a_lu: BandedLu<T>,
}

impl<T: Real> Pencil<T> {
    fn new(params: &CknParams<T>, lambda: T, grid: &LogGrid<T>) -> Result<Self> {
        let form = ModeForm::new(grid, params, lambda)?;
        let pm2 = params.p - lit(2.0);
        let full: Vec<T> = grid.t().iter().map(|&t| form.h * extremal_phi(params, t).powf(pm2)).collect();
        let b = form.restrict(&full);
        let a_lu = form.a.lu()?;
        Ok(Self { form, b, a_lu })
    }

    fn bdot(&self, x: &[T], y: &[T]) -> T {
        x.iter().zip(y).zip(&self.b).map(|((&u, &v), &w)| u * v * w).sum()
    }

    fn bnormalize(&self, x: &mut [T]) {
        let c = self.bdot(x, x).sqrt();
        x.iter_mut().for_each(|v| *v = *v / c);
    }

    /// Rayleigh quotient and relative dual-norm residual of `x`.
    fn assess(&self, x: &[T]) -> (T, T) {
        let ax = self.form.a.matvec(x);
        let xa = dot(x, &ax);
        let nu = xa / self.bdot(x, x);
        let r: Vec<T> = ax.iter().zip(x).zip(&self.b).map(|((&a, &v), &w)| a - nu * w * v).collect();
        let z = self.a_lu.solve(&r);
        (nu, (dot(&r, &z).abs() / xa).sqrt())
    }

    /// Shifted inverse iteration, optionally B-orthogonal to `deflate`.
    fn solve(&self, shift: T, deflate: Option<&[T]>, start: Vec<T>) -> Result<(T, Vec<T>, T, usize)> {
        let lu = self.form.a.shifted(-shift, &self.b).lu()?;
        let mut x = start;
        let project = |y: &mut Vec<T>| {
            if let Some(v) = deflate {
                let c = self.bdot(v, y);
                y.iter_mut().zip(v).for_each(|(a, &b)| *a = *a - c * b);
            }
        };
        project(&mut x);
        self.bnormalize(&mut x);
        let mut residual = T::infinity();
        let mut prev_res = T::infinity();
        for it in 1..=MAX_ITERS {
            let bx: Vec<T> = x.iter().zip(&self.b).map(|(&v, &w)| v * w).collect();
            let mut y = lu.solve(&bx);
            project(&mut y);
            self.bnormalize(&mut y);
            x = y;
            let (nu, res) = self.assess(&x);
            residual = res;
            // Rounding in `Ax` puts a floor near 1e-9 under the residual; once
            // it stops shrinking below the stall level the pair is converged.
            let stalled = res < lit(STALL_TOL) && res > lit::<T>(0.7) * prev_res;
            if res < lit(RESIDUAL_TOL) || stalled {
                return Ok((nu, x, res, it));
            }
            prev_res = res;
        }
        Err(CknError::NoConvergence { iters: MAX_ITERS, residual: to_f64(residual) })
    }
}

fn start_vector<T: Real>(form: &ModeForm<T>) -> Vec<T> {
    let full: Vec<T> = form
        .grid
        .t()
        .iter()
        .map(|&t| (-t * t / lit(8.0)).exp() * (T::one() + lit::<T>(0.3) * t))
        .collect();
    form.restrict(&full)
}

fn fix_sign<T: Real>(x: &mut [T]) {
    let peak = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let floor = lit::<T>(SIGN_FLOOR) * peak;
    if let Some(first) = x.iter().find(|v| v.abs() > floor) {
        if *first < T::zero() {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Lowest (or for `k = 0` second) eigenpair of the mode-`k` pencil on
/// `grid`, by banded factorization and shifted inverse iteration.
pub fn mode_eigenvalue<T: Real>(
    params: &CknParams<T>,
    mode: &ModeSpec<T>,
    index: EigenIndex,
    grid: &LogGrid<T>,
) -> Result<SpectralResult<T>> {
    params.require_interior()?;
    if index == EigenIndex::Second && mode.k != 0 {
        return Err(CknError::InvalidMode { k: mode.k, reason: "second eigenpair only for mode 0" });
    }
    let pencil = Pencil::new(params, mode.lambda_k, grid)?;
    let start = start_vector(&pencil.form);
    let (nu, mut x, residual, iters) = match index {
        EigenIndex::First => pencil.solve(lit(0.9), None, start)?,
        EigenIndex::Second => {
            let (_, first, _, it1) = pencil.solve(lit(0.9), None, start.clone())?;
            let shift = params.p - T::one() - lit(0.1);
            let (nu, x, res, it2) = pencil.solve(shift, Some(&first), start)?;
            (nu, x, res, it1 + it2)
        }
    };
    fix_sign(&mut x);
    let phi = pencil.form.extend(&x);
    let values = grid.t().iter().zip(&phi).map(|(&t, &v)| (-params.kappa1 * t).exp() * v).collect();
    Ok(SpectralResult { eigenvalue: nu, profile: RadialProfile::new(grid.clone(), values)?, phi, residual, iters })
}

/// Euclidean cosine between two sample vectors.
pub fn cosine_similarity<T: Real>(a: &[T], b: &[T]) -> T {
    dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt())
}

/// Pieces of the second variation of the quotient along the mode-1 kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondVariation<T: Real> {
    pub value: T,
    /// `q²(N-1)`.
    pub chi: T,
    /// `M - 1`.
    pub varpi1: T,
    /// `2I₁ + ((2M-5)+χ)I₂`, always positive.
    pub bracket: T,
}

const SV_NODES: usize = 4001;

/// `(ω/N)(d/2)³ [χ - (M-1)] {2I₁ + ((2M-5)+χ)I₂}` with
/// `I₁ = ∫X₁'² s^{M-4} ds` and `I₂ = ∫X₁² s^{M-5} ds` by quadrature.
pub fn second_variation_z1<T: Real>(params: &CknParams<T>) -> Result<SecondVariation<T>> {
    params.require_interior()?;
    let m = params.m_dim;
    let three = lit::<T>(3.0);
    let span = lit::<T>(14.0).max(lit::<T>(40.0) / (m - three));
    let grid = LogGrid::symmetric(span, SV_NODES)?;
    let d1: Vec<T> = grid.nodes().iter().map(|&s| x1_prime(m, s).powi(2)).collect();
    let d0: Vec<T> = grid.nodes().iter().map(|&s| x_mode(m, Kernel::Z1, s).powi(2)).collect();
    let i1 = integrate(&d1, &grid, m - lit(4.0)).value;
    let i2 = integrate(&d0, &grid, m - lit(5.0)).value;
    let nf = params.nf();
    let chi = params.q_pow * params.q_pow * (nf - T::one());
    let varpi1 = m - T::one();
    let two = lit::<T>(2.0);
    let bracket = two * i1 + (two * m - lit(5.0) + chi) * i2;
    let half_gap = params.gap() / two;
    let value = params.omega / nf * half_gap.powi(3) * (chi - varpi1) * bracket;
    Ok(SecondVariation { value, chi, varpi1, bracket })
}

/// Normalized sup residual of `X₀` (mode 0) or `X₁` (mode 1) in the reduced
/// fourth-order linearized equation in the dimension-`M` variable, on `grid`
/// read as a grid in `ln s`.
pub fn linearized_residual<T: Real>(params: &CknParams<T>, which: Kernel, grid: &LogGrid<T>) -> Result<T> {
    params.require_interior()?;
    let n = grid.n();
    if n < 201 {
        return Err(CknError::GridTooSmall { n, need: 201 });
    }
    let m = params.m_dim;
    let k = match which {
        Kernel::Z0 => 0,
        Kernel::Z1 => 1,
    };
    let mode = ModeSpec::new(params, k);
    let (varpi, ql) = (mode.varpi_k, mode.q2lambda_k);
    let h = grid.h();
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let x: Vec<T> = grid.nodes().iter().map(|&s| x_mode(m, which, s)).collect();
    let x1 = stencil_derivative(&x, h, 1)?;
    let x2 = stencil_derivative(&x, h, 2)?;
    let px: Vec<T> = (0..n).map(|i| x2[i] + (m - two) * x1[i] - varpi * x[i]).collect();
    let p1 = stencil_derivative(&px, h, 1)?;
    let p2 = stencil_derivative(&px, h, 2)?;
    let gamma_m = (m - four) * (m - two) * m * (m + two);
    let pm1 = params.p - T::one();
    let mut worst = T::zero();
    let mut scale = T::zero();
    for i in 6..n - 6 {
        let s = grid.nodes()[i];
        let pp = p2[i] + (m - lit(6.0)) * p1[i] + (lit::<T>(8.0) - two * m - varpi) * px[i];
        let gap_term = (ql - varpi)
            * (two * x2[i] + two * (m - four) * x1[i] - (two * (m - four) + ql + varpi) * x[i]);
        let s2 = s * s;
        let pot = pm1 * gamma_m * (s2 * s2) * (-four * s2.ln_1p()).exp() * x[i];
        worst = worst.max((pp - gap_term - pot).abs());
        scale = scale.max(pot.abs());
    }
    Ok(worst / scale)
}

/// Both sides of `(2M/(M-4) - 1) Γ_M ≤ Γ_{M+2k}`,
/// `Γ_M = (M-4)(M-2)M(M+2)`; equality is allowed only for `k = 1`.
pub fn gamma_comparison<T: Real>(m: T, k: u32) -> Result<(T, T, bool)> {
    let four = lit::<T>(4.0);
    if !(m > four) {
        return Err(CknError::MOutOfRange(to_f64(m)));
    }
    if k == 0 {
        return Err(CknError::InvalidMode { k, reason: "comparison starts at mode 1" });
    }
    let two = lit::<T>(2.0);
    let g = |x: T| (x - four) * (x - two) * x * (x + two);
    let lhs = (two * m / (m - four) - T::one()) * g(m);
    let rhs = g(m + two * from_u32::<T>(k));
    // At k = 1 the two sides are the same polynomial.
    let holds = if k == 1 { lhs <= rhs * (T::one() + lit::<T>(8.0) * T::epsilon()) } else { lhs < rhs };
    Ok((lhs, rhs, holds))
}

/// Mode-wise lowest eigenvalues above mode 0 and their minimum, a
/// grid-dependent stand-in for the third eigenvalue of the full problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<T: Real> {
    pub per_mode: Vec<(u32, T)>,
    pub min: T,
    /// `min - (p - 1)`.
    pub margin: T,
}

pub const GAP_MODES: [u32; 3] = [1, 2, 3];

/// Spectral-gap surrogate on the critical boundary with `α < 0`.
pub fn spectral_gap<T: Real>(params: &CknParams<T>, grid: &LogGrid<T>) -> Result<GapReport<T>> {
    if params.region != RegionClass::CriticalUpperAlphaNeg {
        return Err(CknError::WrongRegion(params.region));
    }
    let per_mode = GAP_MODES
        .iter()
        .map(|&k| {
            let r = mode_eigenvalue(params, &ModeSpec::new(params, k), EigenIndex::First, grid)?;
            Ok((k, r.eigenvalue))
        })
        .collect::<Result<Vec<_>>>()?;
    let min = per_mode.iter().fold(T::infinity(), |m, &(_, v)| m.min(v));
    Ok(GapReport { margin: min - (params.p - T::one()), per_mode, min })
}

/// `β` where the lowest mode-1 eigenvalue crosses `p - 1`, by bisection on
/// the sign of the difference. The bracket is a fixed fraction of the
/// admissible interval; `tol` bounds the final bracket width.
pub fn stability_crossing<T: Real>(n: u32, alpha: T, grid: &LogGrid<T>, tol: T) -> Result<T> {
    let lo = lower_beta(n, alpha);
    let w = upper_beta(alpha) - lo;
    let f = |b: T| -> Result<T> {
        let p = derive(n, alpha, b)?;
        let r = mode_eigenvalue(&p, &ModeSpec::new(&p, 1), EigenIndex::First, grid)?;
        Ok(r.eigenvalue - (p.p - T::one()))
    };
    let (mut a, mut b) = (lo + lit::<T>(0.1) * w, lo + lit::<T>(0.75) * w);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(CknError::NoConvergence { iters: 0, residual: to_f64(fa.min(fb)) });
    }
    while b - a > tol {
        let c = (a + b) / lit(2.0);
        if f(c)?.signum() == fa.signum() {
            a = c;
        } else {
            b = c;
        }
    }
    Ok((a + b) / lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{extremal_phi_d1, linearized_mode_log};
    use crate::params::felli_schneider;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn mode_zero_pairs() {
        let g = LogGrid::<f64>::default_grid();
        let p = derive::<f64>(5, 1.0, -2.0).unwrap();
        let m0 = ModeSpec::new(&p, 0);
        let r1 = mode_eigenvalue(&p, &m0, EigenIndex::First, &g).unwrap();
        assert!((r1.eigenvalue - 1.0).abs() < 1e-3, "{}", r1.eigenvalue);
        assert!(r1.residual < 1e-8 * r1.eigenvalue);
        let phi: Vec<f64> = g.t().iter().map(|&t| extremal_phi(&p, t)).collect();
        assert!(cosine_similarity(&r1.phi, &phi) > 0.999);
        let r2 = mode_eigenvalue(&p, &m0, EigenIndex::Second, &g).unwrap();
        assert!((r2.eigenvalue - (p.p - 1.0)).abs() < 1e-3, "{}", r2.eigenvalue);
        let dphi: Vec<f64> = g.t().iter().map(|&t| extremal_phi_d1(&p, t)).collect();
        assert!(cosine_similarity(&r2.phi, &dphi).abs() > 0.999);
        // B-normalization.
        let w: Vec<f64> =
            r1.phi.iter().zip(&phi).map(|(&f, &u)| u.powf(p.p - 2.0) * f * f).collect();
        assert!(rel(integrate(&w, &g, -1.0).value, 1.0) < 1e-6);
        assert!(mode_eigenvalue(&p, &ModeSpec::new(&p, 1), EigenIndex::Second, &g).is_err());
    }

    #[test]
    fn mode_one_on_the_curve() {
        let g = LogGrid::<f64>::default_grid();
        let p = derive::<f64>(5, 1.0, felli_schneider(5, 1.0)).unwrap();
        let r = mode_eigenvalue(&p, &ModeSpec::new(&p, 1), EigenIndex::First, &g).unwrap();
        assert!((r.eigenvalue - (p.p - 1.0)).abs() < 2e-3, "{}", r.eigenvalue);
        let z1: Vec<f64> = g
            .t()
            .iter()
            .map(|&t| (p.kappa1 * t).exp() * linearized_mode_log(&p, Kernel::Z1, t))
            .collect();
        assert!(cosine_similarity(&r.phi, &z1) > 0.999);
    }

    #[test]
    fn refinement_and_domain_stability() {
        let p = derive::<f64>(6, 0.5, -2.5).unwrap();
        let m1 = ModeSpec::new(&p, 1);
        let a = mode_eigenvalue(&p, &m1, EigenIndex::First, &LogGrid::default_grid()).unwrap();
        let b = mode_eigenvalue(&p, &m1, EigenIndex::First, &LogGrid::symmetric(14.0, 8001).unwrap()).unwrap();
        let c = mode_eigenvalue(&p, &m1, EigenIndex::First, &LogGrid::symmetric(18.0, 5143).unwrap()).unwrap();
        assert!(rel(a.eigenvalue, b.eigenvalue) < 1e-3);
        assert!(rel(a.eigenvalue, c.eigenvalue) < 1e-6);
    }

    #[test]
    fn second_variation_oracle() {
        let sv = second_variation_z1(&derive::<f64>(5, 1.0, -3.0).unwrap()).unwrap();
        assert!(rel(sv.value, -5.8586824854314582195) < 1e-9, "{}", sv.value);
        let sv = second_variation_z1(&derive::<f64>(5, 1.0, -2.0).unwrap()).unwrap();
        assert!(rel(sv.value, 0.79253885338193293128) < 1e-9, "{}", sv.value);
        let fs = derive::<f64>(5, 1.0, felli_schneider(5, 1.0)).unwrap();
        let sv = second_variation_z1(&fs).unwrap();
        assert!(sv.value.abs() < 1e-10 * sv.bracket, "{sv:?}");
    }

    #[test]
    fn linearized_residuals() {
        let g = LogGrid::<f64>::default_grid();
        let p = derive::<f64>(5, 1.0, -2.0).unwrap();
        let r0 = linearized_residual(&p, Kernel::Z0, &g).unwrap();
        assert!(r0 < 1e-7, "{r0}");
        let fs = derive::<f64>(5, 1.0, felli_schneider(5, 1.0)).unwrap();
        let r1 = linearized_residual(&fs, Kernel::Z1, &g).unwrap();
        assert!(r1 < 1e-7, "{r1}");
        let off = derive::<f64>(5, 1.0, felli_schneider(5, 1.0) + 0.3).unwrap();
        let r2 = linearized_residual(&off, Kernel::Z1, &g).unwrap();
        assert!(r2 > 1e-3, "{r2}");
    }

    #[test]
    fn gamma_comparison_cases() {
        let (l, r, h) = gamma_comparison(10.0, 1).unwrap();
        assert!(rel(l, 13440.0) < 1e-14 && r == 13440.0 && h);
        let (l, r, h) = gamma_comparison(10.0, 2).unwrap();
        assert!(rel(l, 13440.0) < 1e-14 && r == 26880.0 && h);
        let (l, r, h) = gamma_comparison(5.0, 1).unwrap();
        assert!(rel(l, 9.0 * 105.0) < 1e-14 && rel(r, 3.0 * 5.0 * 7.0 * 9.0) < 1e-14 && h);
        assert!(gamma_comparison(4.0, 1).is_err());
    }

    #[test]
    fn gap_requires_region() {
        let g = LogGrid::<f64>::new(-6.0, 6.0, 401).unwrap();
        let p = derive::<f64>(5, 1.0, -2.0).unwrap();
        assert_eq!(spectral_gap(&p, &g), Err(CknError::WrongRegion(RegionClass::ConjecturedSymmetry)));
    }
}
