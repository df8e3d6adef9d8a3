//! Admissible parameters `(N, α, β)` and every scalar derived from them.

use crate::error::{CknError, Result};
use crate::numerics::sphere_area;
use crate::scalar::{from_u32, lit, to_f64, Real};

/// Location of `(α, β)` in the parameter plane for a fixed `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    /// `β = α - 2`, where the exponent degenerates to `p = 2`.
    RellichBoundary,
    /// Lower boundary `β = (N-4)α/(N-2) - 4` with `α > 0`.
    CriticalUpperAlphaPos,
    /// Lower boundary with `α < 0`.
    CriticalUpperAlphaNeg,
    /// `α = 0, β = -4`.
    CriticalUpperAlphaZero,
    /// `α > 0` and `β` strictly between the lower boundary and `β_FS(α)`.
    SymmetryBreaking,
    /// `β = β_FS(α)` with `α ≥ 0`.
    FSCurve,
    /// Every other admissible point; symmetry there is conjectural.
    ConjecturedSymmetry,
    /// Outside the admissible set.
    Invalid,
}

impl RegionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RellichBoundary => "RellichBoundary",
            Self::CriticalUpperAlphaPos => "CriticalUpperAlphaPos",
            Self::CriticalUpperAlphaNeg => "CriticalUpperAlphaNeg",
            Self::CriticalUpperAlphaZero => "CriticalUpperAlphaZero",
            Self::SymmetryBreaking => "SymmetryBreaking",
            Self::FSCurve => "FSCurve",
            Self::ConjecturedSymmetry => "ConjecturedSymmetry",
            Self::Invalid => "Invalid",
        }
    }

    /// Classifies an arbitrary point, returning `Invalid` off the admissible set.
    pub fn locate<T: Real>(n: u32, alpha: T, beta: T) -> Self {
        match derive(n, alpha, beta) {
            Ok(p) => p.region,
            Err(_) => Self::Invalid,
        }
    }
}

impl std::fmt::Display for RegionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Validated parameters with their derived scalars.
///
/// Built only through [`derive`]. On the Rellich boundary `β = α - 2` the
/// fields `m_exp`, `nu`, `q_pow`, `m_dim`, `c_amp` and `cosh_amp` are not
/// finite and the operations needing them return `RellichBoundary`.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub struct CknParams<T: Real = f64> {
    pub n: u32,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub p: T,
    pub kappa1: T,
    pub kappa2: T,
    pub cal_a: T,
    pub cal_b: T,
    pub k2: T,
    pub k0: T,
    pub m_exp: T,
    pub nu: T,
    /// Amplitude `C_{N,α,β}` of the extremal in the radial variable.
    pub c_amp: T,
    /// Amplitude of the extremal in the Emden-Fowler variable.
    pub cosh_amp: T,
    pub a_shift: T,
    pub q_pow: T,
    pub m_dim: T,
    pub beta_fs: T,
    /// `|S^{N-1}|`.
    pub omega: T,
    pub region: RegionClass,
}

/// `β_FS(α) = N + 2α - 4 - √((N-2+α)² + 4(N-1))`.
pub fn felli_schneider<T: Real>(n: u32, alpha: T) -> T {
    let nf: T = from_u32(n);
    let four = lit::<T>(4.0);
    let s = nf - lit(2.0) + alpha;
    nf + lit::<T>(2.0) * alpha - four - (s * s + four * (nf - T::one())).sqrt()
}

/// Lower end `(N-4)α/(N-2) - 4` of the admissible β interval.
pub fn lower_beta<T: Real>(n: u32, alpha: T) -> T {
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    ((nf - lit(4.0)) * alpha - lit::<T>(4.0) * (nf - two)) / (nf - two)
}

/// Upper end `α - 2` of the admissible β interval.
pub fn upper_beta<T: Real>(alpha: T) -> T {
    alpha - lit(2.0)
}

fn snap<T: Real>(beta: T, target: T) -> T {
    let tol = lit::<T>(4.0) * T::epsilon() * target.abs().max(T::one());
    if (beta - target).abs() <= tol {
        target
    } else {
        beta
    }
}

/// Validates `(N, α, β)` and fills in every derived field.
///
/// A β within a few ulps of either interval end is moved onto it, so that
/// values such as `-13.0/3.0` land on the boundary they denote.
pub fn derive<T: Real>(n: u32, alpha: T, beta: T) -> Result<CknParams<T>> {
    if n < 5 {
        return Err(CknError::InvalidDimension(n));
    }
    let nf: T = from_u32(n);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    if !(alpha > two - nf) || !alpha.is_finite() {
        return Err(CknError::AlphaOutOfRange { alpha: to_f64(alpha), bound: to_f64(two - nf) });
    }
    let lower = lower_beta(n, alpha);
    let upper = upper_beta(alpha);
    let beta = snap(snap(beta, lower), upper);
    if !(beta >= lower && beta <= upper) {
        return Err(CknError::BetaOutOfRange {
            beta: to_f64(beta),
            lower: to_f64(lower),
            upper: to_f64(upper),
        });
    }
    let x = nf + beta;
    let y = nf + two * alpha - beta - four;
    let d = alpha - beta - two;
    let gamma = y * y / x - nf;
    let p = two * y / x;
    let kappa1 = y / two;
    let kappa2 = x / two;
    let cal_a = (beta + two - alpha) / two;
    let cal_b = kappa1 * kappa2;
    let a_shift = nf + alpha - two;
    let k2 = (a_shift * a_shift + cal_a * cal_a * four) / two;
    let k0 = cal_b * cal_b;
    let m_exp = x / (beta + two - alpha);
    let nu = d / two;
    let q_pow = two / (two + beta - alpha);
    let m_dim = two * y / d;
    let prod = x * a_shift * y * (y + d);
    let c_amp = (x / (four * d) * prod.ln()).exp();
    let mm = m_exp * (m_exp - T::one()) * (m_exp - two) * (m_exp - lit(3.0));
    let cosh_amp = ((mm * nu.powi(4)).ln() / (p - two)).exp();
    let beta_fs = felli_schneider(n, alpha);
    let region = classify_parts(alpha, beta, lower, upper, beta_fs);
    Ok(CknParams {
        n,
        alpha,
        beta,
        gamma,
        p,
        kappa1,
        kappa2,
        cal_a,
        cal_b,
        k2,
        k0,
        m_exp,
        nu,
        c_amp,
        cosh_amp,
        a_shift,
        q_pow,
        m_dim,
        beta_fs,
        omega: sphere_area(nf - T::one()),
        region,
    })
}

fn classify_parts<T: Real>(alpha: T, beta: T, lower: T, upper: T, beta_fs: T) -> RegionClass {
    let zero = T::zero();
    if beta == upper {
        RegionClass::RellichBoundary
    } else if beta == lower {
        if alpha > zero {
            RegionClass::CriticalUpperAlphaPos
        } else if alpha < zero {
            RegionClass::CriticalUpperAlphaNeg
        } else {
            RegionClass::CriticalUpperAlphaZero
        }
    } else if alpha >= zero && beta == beta_fs {
        RegionClass::FSCurve
    } else if alpha > zero && beta < beta_fs {
        RegionClass::SymmetryBreaking
    } else {
        RegionClass::ConjecturedSymmetry
    }
}

/// Region of already validated parameters.
pub fn classify<T: Real>(params: &CknParams<T>) -> RegionClass {
    params.region
}

impl<T: Real> CknParams<T> {
    pub fn is_rellich_boundary(&self) -> bool {
        self.region == RegionClass::RellichBoundary
    }

    /// Errors on the Rellich boundary, where the extremal does not exist.
    pub fn require_interior(&self) -> Result<()> {
        if self.is_rellich_boundary() {
            Err(CknError::RellichBoundary)
        } else {
            Ok(())
        }
    }

    /// `α - β - 2`, positive off the Rellich boundary.
    pub fn gap(&self) -> T {
        self.alpha - self.beta - lit(2.0)
    }

    pub fn nf(&self) -> T {
        from_u32(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn example_5_1_m2() {
        let p = derive(5, 1.0, -2.0).unwrap();
        assert!(close(p.gamma, 10.0 / 3.0, 1e-14));
        assert!(close(p.p, 10.0 / 3.0, 1e-14));
        assert!(close(p.m_dim, 10.0, 1e-14));
        assert!(close(p.m_exp, -3.0, 1e-14));
        assert!(close(p.nu, 0.5, 1e-14));
        assert!(close(p.q_pow, -2.0, 1e-14));
        assert!(close(p.a_shift, 4.0, 1e-14));
        assert!(close(p.c_amp, 360f64.powf(0.75), 1e-13));
        assert_eq!(p.region, RegionClass::ConjecturedSymmetry);
    }

    #[test]
    fn alpha_zero_lower_boundary() {
        for n in 5..=10u32 {
            let p = derive(n, 0.0, -4.0).unwrap();
            let nf = n as f64;
            assert!(close(p.gamma, 4.0 * nf / (nf - 4.0), 1e-13));
            assert!(close(p.p, 2.0 * nf / (nf - 4.0), 1e-13));
            assert_eq!(p.region, RegionClass::CriticalUpperAlphaZero);
        }
    }

    #[test]
    fn rellich_boundary_point() {
        let p = derive(5, 1.0f64, -1.0).unwrap();
        assert_eq!(p.p, 2.0);
        assert_eq!(p.region, RegionClass::RellichBoundary);
        assert_eq!(p.require_interior(), Err(CknError::RellichBoundary));
        assert!(!p.m_dim.is_finite());
    }

    #[test]
    fn felli_schneider_values() {
        for n in 5..=10u32 {
            assert!((felli_schneider(n, 0.0f64) + 4.0).abs() < 1e-12);
        }
        assert!(close(felli_schneider(5, 1.0), -2.6568542494923801952, 1e-15));
        assert!(close(felli_schneider(6, 2.0), 6.0 - 56f64.sqrt(), 1e-15));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(derive(5, 1.0, -3.0).unwrap().region, RegionClass::SymmetryBreaking);
        let p = derive(5, -1.0, -13.0 / 3.0).unwrap();
        assert_eq!(p.region, RegionClass::CriticalUpperAlphaNeg);
        let b = lower_beta(5, 2.0f64);
        assert_eq!(derive(5, 2.0, b).unwrap().region, RegionClass::CriticalUpperAlphaPos);
        let fs = felli_schneider(5, 1.0f64);
        assert_eq!(derive(5, 1.0, fs).unwrap().region, RegionClass::FSCurve);
        assert_eq!(derive(5, -1.0, -3.5).unwrap().region, RegionClass::ConjecturedSymmetry);
        assert_eq!(RegionClass::locate(5, 1.0f64, 0.0), RegionClass::Invalid);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(derive(4, 0.0f64, -4.0).unwrap_err().kind(), "InvalidDimension");
        assert_eq!(derive(5, -3.0f64, -6.0).unwrap_err().kind(), "AlphaOutOfRange");
        assert_eq!(derive(5, 1.0f64, 0.0).unwrap_err().kind(), "BetaOutOfRange");
        assert_eq!(derive(5, 1.0f64, -4.0).unwrap_err().kind(), "BetaOutOfRange");
    }

    #[test]
    fn f32_parameters() {
        let p = derive(5, 1.0f32, -2.0).unwrap();
        assert!((p.m_dim - 10.0).abs() < 1e-5);
        assert!((p.p - 10.0 / 3.0).abs() < 1e-6);
    }
}
