//! Algebraic and integral identities, checked mode by mode.
//!
//! Every integral check reduces to one dimension: on the spherical mode `k`
//! the Laplacian is `r^{-2}(f_tt + (N-2)f_t - λ_k f)` with `t = ln r`.

use crate::closedform::rellich_candidates;
use crate::error::{CknError, Result};
use crate::numerics::{integrate, RadialProfile, TAIL_LIMIT};
use crate::params::CknParams;
use crate::scalar::{from_u32, lit, to_f64, Real};

/// Both sides of an identity and their relative mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck<T: Real> {
    pub lhs: T,
    pub rhs: T,
    pub relerr: T,
}

impl<T: Real> IdentityCheck<T> {
    fn new(lhs: T, rhs: T) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let relerr = if scale == T::zero() { T::zero() } else { (lhs - rhs).abs() / scale };
        Self { lhs, rhs, relerr }
    }
}

fn lambda<T: Real>(n: u32, k: u32) -> T {
    from_u32::<T>(k) * from_u32::<T>(n - 2 + k)
}

/// Samples of `f_tt + c f_t - λ f`.
fn drift_operator<T: Real>(f: &RadialProfile<T>, c: T, lam: T) -> Result<Vec<T>> {
    let d1 = f.derivative(1)?;
    let d2 = f.derivative(2)?;
    Ok(f.values().iter().zip(&d1).zip(&d2).map(|((&v, &a), &b)| b + c * a - lam * v).collect())
}

fn check_dim(n: u32) -> Result<()> {
    if n < 5 {
        Err(CknError::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// `∫|x|⁴|Δu|² = ∫|Δv|²` for `u = |x|^{-2}v`, on mode `k`. The left side
/// differentiates the sampled `u` itself.
pub fn verify_iid<T: Real>(v: &RadialProfile<T>, k: u32, n: u32) -> Result<IdentityCheck<T>> {
    check_dim(n)?;
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let lam = lambda::<T>(n, k);
    let u = v.map(|r, x| x / (r * r));
    let lu: Vec<T> = drift_operator(&u, nf - two, lam)?.into_iter().map(|w| w * w).collect();
    let lv: Vec<T> = drift_operator(v, nf - two, lam)?.into_iter().map(|w| w * w).collect();
    // r⁴ · r^{-4}(Lu)² · r^{N-1}  and  r^{-4}(Lv)² · r^{N-1}
    let lhs = integrate(&lu, v.grid(), nf - T::one()).checked(TAIL_LIMIT)?;
    let rhs = integrate(&lv, v.grid(), nf - lit(5.0)).checked(TAIL_LIMIT)?;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// `(N-2)∫|∇w|² = 2∫Δw (x·∇w)` on mode `k`.
pub fn verify_hardy_identity<T: Real>(w: &RadialProfile<T>, k: u32, n: u32) -> Result<IdentityCheck<T>> {
    check_dim(n)?;
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let lam = lambda::<T>(n, k);
    let d1 = w.derivative(1)?;
    let lw = drift_operator(w, nf - two, lam)?;
    let grad: Vec<T> = w.values().iter().zip(&d1).map(|(&v, &a)| a * a + lam * v * v).collect();
    let cross: Vec<T> = lw.iter().zip(&d1).map(|(&l, &a)| l * a).collect();
    let g = w.grid();
    let lhs = (nf - two) * integrate(&grad, g, nf - lit(3.0)).checked(TAIL_LIMIT)?;
    let rhs = two * integrate(&cross, g, nf - lit(3.0)).checked(TAIL_LIMIT)?;
    Ok(IdentityCheck::new(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Real>(x: T) -> Self {
        if x > T::zero() {
            Sign::Positive
        } else if x < T::zero() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// The quantity `ξ` whose sign decides whether the radial constant is the
/// sharp one, with its sign (that of `α`).
pub fn xi_sign<T: Real>(n: u32, alpha: T) -> Result<(T, Sign)> {
    check_dim(n)?;
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    if !(alpha > two - nf) {
        return Err(CknError::AlphaOutOfRange { alpha: to_f64(alpha), bound: to_f64(two - nf) });
    }
    let nm2 = nf - two;
    let a = -(nf * alpha / (two * nm2)) * ((nf - four) * alpha / (two * nm2) + nm2);
    let b = -two * alpha / nm2;
    let xi = (b * nf - two * a + b * b - four * b) * nf * nf / four + a * (a - (b - two) * nf);
    Ok((xi, Sign::of(xi)))
}

/// `(lhs1, rhs1, lhs2, rhs2)` for the two coefficient identities behind the
/// critical-boundary constant: `lhs1 = -C_{μ,1}` and `lhs2 = C_{μ,2}`.
pub fn rellich_coeff_identities<T: Real>(n: u32, alpha: T) -> Result<(T, T, T, T)> {
    check_dim(n)?;
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    if !(alpha > two - nf && alpha < T::zero()) {
        return Err(CknError::AlphaOutOfRange { alpha: to_f64(alpha), bound: to_f64(two - nf) });
    }
    let nm2 = nf - two;
    let nm4 = nf - four;
    let eta = -two - nf * alpha / (two * nm2);
    let mu = -nm4 * alpha / nm2;
    let s = nf + alpha + eta - two;
    let lhs1 = (two * eta + alpha) * (nf + two * eta + alpha) - two * eta * s;
    let lhs2 = eta * eta * s * s - nm4 * eta * s * (two * eta + alpha + two);
    let inner = mu * (two * nm4 - mu);
    let c1 = (nf * nf - four * nf + lit(8.0)) / (two * nm4 * nm4) * inner;
    let c2 = nf * nf / (lit::<T>(16.0) * nm4 * nm4) * inner * inner - nm2 / two * inner;
    Ok((lhs1, -c1, lhs2, c2))
}

/// `S₁ - S₂` for the two closed forms of the boundary Rellich constant.
pub fn rellich_forms_gap<T: Real>(n: u32, alpha: T) -> Result<T> {
    let (s1, s2) = rellich_candidates(n, alpha)?;
    Ok(s1 - s2)
}

/// Sharp constant `D` in `∫|x|^{s-2}|∇u|² ≤ D ∫|x|^s|Δu|²` on mode `k`,
/// read off the Mellin symbol: with `c = -(s+N-4)/2` and frequency `ξ`,
/// the ratio is `(x+A)/((B-x)²+Cx)` at `x = ξ²`.
pub fn hardy_rellich_constant<T: Real>(n: u32, s: T, k: u32) -> T {
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let lam = lambda::<T>(n, k);
    let c = -(s + nf - lit(4.0)) / two;
    let a = c * c + lam;
    let b = c * (c + nf - two) - lam;
    let cc = (two * c + nf - two).powi(2);
    let ratio = |x: T| {
        let den = (b - x).powi(2) + cc * x;
        if den > T::zero() {
            (x + a) / den
        } else {
            T::infinity()
        }
    };
    let mut best = ratio(T::zero());
    let disc = (a + b).powi(2) - cc * a;
    if disc >= T::zero() {
        let xs = -a + disc.sqrt();
        if xs > T::zero() {
            best = best.max(ratio(xs));
        }
    }
    // A zero of the denominator at some x > 0 leaves the ratio unbounded.
    if cc == T::zero() && b > T::zero() {
        best = T::infinity();
    }
    best
}

/// Two-sided constant `𝔠` bounding the ratio of the two fourth-order
/// energies: the larger of the two branch constants.
pub fn equivalence_bracket<T: Real>(params: &CknParams<T>, k: u32) -> T {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let nf = params.nf();
    let (alpha, beta) = (params.alpha, params.beta);
    let y = nf + two * alpha - beta - four;
    let e = if params.gap() > T::zero() { four / (nf + beta).powi(2) } else { four / (y * y) };
    let d = hardy_rellich_constant(params.n, two * alpha - beta, k);
    let abs = alpha.abs();
    let branch = |c: T| T::one() + abs * (T::one() + c) + c * alpha * alpha;
    branch(d).max(branch(e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence<T: Real> {
    pub ratio: T,
    pub bracket: T,
    pub inside: bool,
}

/// `∫|x|^{2α-β}|Δu|² / ∫|x|^{-β}|div(|x|^α∇u)|²` on mode `k`, with the
/// containment test `1/𝔠 ≤ R ≤ 𝔠`.
pub fn equivalence_ratio<T: Real>(u: &RadialProfile<T>, k: u32, params: &CknParams<T>) -> Result<Equivalence<T>> {
    let nf = params.nf();
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let (alpha, beta) = (params.alpha, params.beta);
    let upper = nf - four + two * alpha;
    if !(beta > -nf && beta < upper) {
        return Err(CknError::BetaOutOfRange { beta: to_f64(beta), lower: to_f64(-nf), upper: to_f64(upper) });
    }
    let lam = lambda::<T>(params.n, k);
    let w = nf + two * alpha - beta - lit(5.0);
    let energy = |drift: T| -> Result<T> {
        let sq: Vec<T> = drift_operator(u, drift, lam)?.into_iter().map(|v| v * v).collect();
        integrate(&sq, u.grid(), w).checked(TAIL_LIMIT)
    };
    let ratio = energy(nf - two)? / energy(nf - two + alpha)?;
    let bracket = equivalence_bracket(params, k);
    let inside = ratio <= bracket && ratio * bracket >= T::one();
    Ok(Equivalence { ratio, bracket, inside })
}

/// Both sides of `∫|x|^{-2a-2}u² ≤ (2/(N-2a-2))² ∫|x|^{-2a}|∇u|²` on mode `k`.
pub fn weighted_hardy_check<T: Real>(u: &RadialProfile<T>, k: u32, n: u32, a_w: T) -> Result<(T, T)> {
    check_dim(n)?;
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let bound = (nf - two) / two;
    if !(a_w < bound) {
        return Err(CknError::WeightOutOfRange { a: to_f64(a_w), bound: to_f64(bound) });
    }
    let lam = lambda::<T>(n, k);
    let d1 = u.derivative(1)?;
    let sq: Vec<T> = u.values().iter().map(|&v| v * v).collect();
    let grad: Vec<T> = u.values().iter().zip(&d1).map(|(&v, &a)| a * a + lam * v * v).collect();
    let w = nf - lit(3.0) - two * a_w;
    let lhs = integrate(&sq, u.grid(), w).checked(TAIL_LIMIT)?;
    let c = (two / (nf - two * a_w - two)).powi(2);
    let rhs = c * integrate(&grad, u.grid(), w).checked(TAIL_LIMIT)?;
    Ok((lhs, rhs))
}
