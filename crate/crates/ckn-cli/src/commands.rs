use ckn_core::closedform::{
    b_of_m, critical_constant, linearized_mode_log, radial_constant_sr, rellich_candidates, rellich_constant,
    rellich_test_quotient, sobolev_s0, Kernel,
};
use ckn_core::identities::{
    equivalence_ratio, rellich_coeff_identities, verify_hardy_identity, verify_iid, xi_sign, Sign,
};
use ckn_core::numerics::{LogGrid, RadialProfile};
use ckn_core::params::{derive, felli_schneider, lower_beta, upper_beta, CknParams, RegionClass};
use ckn_core::spectral::{gamma_comparison, linearized_residual, mode_eigenvalue, second_variation_z1, EigenIndex};
use ckn_core::transforms::{cosh_ansatz_check, ode_residual, EmdenFowlerProfile};
use ckn_core::variational::{minimize_radial, perturbed_quotient, ModeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::{MinimizeArgs, Point, RegionArgs, Suite, VerifyArgs};
use crate::config::{read, Settings};
use crate::error::CliError;
use crate::output::{Report, Table, Val};

type P = CknParams<f64>;

fn params(pt: &Point) -> Result<P, CliError> {
    Ok(derive(pt.n, pt.alpha, pt.beta)?)
}

fn point_meta(r: &mut Report, p: &P) {
    r.set("N", p.n).set("alpha", p.alpha).set("beta", p.beta).set("region", p.region.as_str());
}

/// Finite values only; the Rellich boundary leaves several fields infinite.
fn finite(x: f64) -> Val {
    if x.is_finite() {
        Val::Float(x)
    } else {
        Val::Null
    }
}

pub fn constants(pt: &Point) -> Result<Report, CliError> {
    let p = params(pt)?;
    let mut r = Report::default();
    point_meta(&mut r, &p);
    r.set("gamma", p.gamma)
        .set("p", p.p)
        .set("kappa1", p.kappa1)
        .set("kappa2", p.kappa2)
        .set("A", p.cal_a)
        .set("B", p.cal_b)
        .set("K2", p.k2)
        .set("K0", p.k0)
        .set("m", finite(p.m_exp))
        .set("nu", finite(p.nu))
        .set("a", p.a_shift)
        .set("q", finite(p.q_pow))
        .set("M", finite(p.m_dim))
        .set("C", finite(p.c_amp))
        .set("cosh_amp", finite(p.cosh_amp))
        .set("beta_fs", p.beta_fs)
        .set("omega", p.omega)
        .set("S0", sobolev_s0::<f64>(p.n))
        .set("S_r", radial_constant_sr(&p).ok())
        .set("B_M", b_of_m(p.m_dim).ok())
        .set("rellich_constant", rellich_constant(p.n, p.alpha).ok())
        .set("critical_constant", critical_constant(p.n, p.alpha).ok());
    Ok(r)
}

struct Check {
    name: String,
    measured: Val,
    tolerance: Val,
    pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self { name: name.into(), measured: measured.into(), tolerance: tol.into(), pass: measured < tol }
    }

    fn flag(name: impl Into<String>, measured: impl Into<Val>, pass: bool) -> Self {
        Self { name: name.into(), measured: measured.into(), tolerance: Val::Null, pass }
    }
}

/// Sums of one to three Gaussians in `ln r`, drawn from `seed`.
pub fn random_profiles(seed: u64, count: usize, g: &LogGrid<f64>) -> Vec<RadialProfile<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=3))
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.4..1.0)))
                .collect();
            RadialProfile::gaussian_mix(g, &bumps)
        })
        .collect()
}

const PROFILES: usize = 20;

fn need(v: Option<f64>, flag: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Input(format!("this suite needs {flag}")))
}

fn suite_ode(p: &P, s: &Settings) -> Result<Vec<Check>, CliError> {
    let mut out: Vec<Check> = cosh_ansatz_check(p)?
        .iter()
        .enumerate()
        .map(|(i, &v)| Check::below(format!("cosh_z{}", i + 1), v, 1e-10))
        .collect();
    let coarse = ode_residual(&EmdenFowlerProfile::extremal(&s.grid()?, p)?)?;
    let fine_grid = LogGrid::symmetric(s.span, 2 * s.nodes - 1)?;
    let fine = ode_residual(&EmdenFowlerProfile::extremal(&fine_grid, p)?)?;
    out.push(Check::below("ode_residual", coarse, 1e-7));
    let order = (coarse / fine).log2();
    out.push(Check { name: "refinement_order".into(), measured: order.into(), tolerance: 3.0.into(), pass: order >= 3.0 });
    Ok(out)
}

fn suite_identities(a: &VerifyArgs, s: &Settings) -> Result<Vec<Check>, CliError> {
    let alpha = need(a.alpha, "-a")?;
    let n = a.n;
    let g = s.grid()?;
    let profiles = random_profiles(s.seed, PROFILES, &g);
    let worst = profiles
        .par_iter()
        .map(|v| {
            let mut w = (0.0f64, 0.0f64);
            for k in 0..=3 {
                w.0 = w.0.max(verify_iid(v, k, n)?.relerr);
                w.1 = w.1.max(verify_hardy_identity(v, k, n)?.relerr);
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, ckn_core::CknError>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let mut out = vec![Check::below("iid_max_relerr", worst.0, 1e-5), Check::below("hardy_max_relerr", worst.1, 1e-5)];
    let (xi, sign) = xi_sign(n, alpha)?;
    out.push(Check::flag("xi_sign", xi, sign == Sign::of(alpha)));
    if alpha < 0.0 {
        let (l1, r1, l2, r2) = rellich_coeff_identities(n, alpha)?;
        let rel = |l: f64, r: f64| if r == 0.0 { (l - r).abs() } else { ((l - r) / r).abs() };
        out.push(Check::below("coeff_identity_1", rel(l1, r1), 1e-10));
        out.push(Check::below("coeff_identity_2", rel(l2, r2), 1e-10));
    }
    let (s1, s2) = rellich_candidates(n, alpha)?;
    out.push(Check::below("rellich_forms", (s1 - s2).abs() / s1.abs().max(1.0), 1e-10));
    Ok(out)
}

fn suite_linearized(p: &P, which: u32, s: &Settings) -> Result<Vec<Check>, CliError> {
    let kernel = match which {
        0 => Kernel::Z0,
        1 => Kernel::Z1,
        _ => return Err(CliError::Input(format!("--which must be 0 or 1, got {which}"))),
    };
    let mut out = vec![Check::below(format!("residual_x{which}"), linearized_residual(p, kernel, &s.grid()?)?, 1e-7)];
    for k in 1..=3 {
        let (lhs, rhs, holds) = gamma_comparison(p.m_dim, k)?;
        out.push(Check { name: format!("gamma_comparison_k{k}"), measured: lhs.into(), tolerance: rhs.into(), pass: holds });
    }
    Ok(out)
}

fn suite_equivalence(p: &P, s: &Settings) -> Result<Vec<Check>, CliError> {
    let profiles = random_profiles(s.seed, PROFILES, &s.grid()?);
    let results = profiles
        .par_iter()
        .enumerate()
        .map(|(i, u)| equivalence_ratio(u, (i % 4) as u32, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(results
        .into_iter()
        .enumerate()
        .map(|(i, e)| Check {
            name: format!("profile_{i:02}_k{}", i % 4),
            measured: e.ratio.into(),
            tolerance: e.bracket.into(),
            pass: e.inside,
        })
        .collect())
}

fn suite_rellich(a: &VerifyArgs, s: &Settings) -> Result<Vec<Check>, CliError> {
    if a.eps.is_empty() {
        return Err(CliError::Input("--eps needs at least one value".into()));
    }
    let g = s.grid()?;
    let limit = ((a.n as f64 - 4.0) / 2.0).powi(4);
    let qs = a.eps.par_iter().map(|&e| rellich_test_quotient(a.n, e, &g)).collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<Check> = a
        .eps
        .iter()
        .zip(&qs)
        .map(|(e, &q)| Check { name: format!("quotient_eps_{e}"), measured: q.into(), tolerance: limit.into(), pass: q > limit })
        .collect();
    let mut order: Vec<(f64, f64)> = a.eps.iter().copied().zip(qs.iter().copied()).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    let monotone = order.windows(2).all(|w| w[1].1 < w[0].1);
    out.push(Check::flag("decreasing_in_eps", monotone, monotone));
    let closed = rellich_constant(a.n, -2.0)?;
    out.push(Check { name: "closed_form".into(), measured: closed.into(), tolerance: limit.into(), pass: closed == limit });
    Ok(out)
}

pub fn verify(a: &VerifyArgs, s: &Settings) -> Result<(Report, bool), CliError> {
    let point = || -> Result<P, CliError> { Ok(derive(a.n, need(a.alpha, "-a")?, need(a.beta, "-b")?)?) };
    let checks = match a.suite {
        Suite::Ode => suite_ode(&point()?, s)?,
        Suite::Identities => suite_identities(a, s)?,
        Suite::Linearized => suite_linearized(&point()?, a.which, s)?,
        Suite::Equivalence => suite_equivalence(&point()?, s)?,
        Suite::RellichLimit => suite_rellich(a, s)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    let mut r = Report::default();
    let suite = <Suite as clap::ValueEnum>::to_possible_value(&a.suite).expect("named").get_name().to_owned();
    r.set("suite", suite)
        .set("N", a.n)
        .set("alpha", a.alpha)
        .set("beta", a.beta)
        .set("seed", s.seed)
        .set("nodes", s.nodes)
        .set("span", s.span)
        .set("pass", pass);
    r.table = Some(Table {
        name: "checks",
        columns: vec!["check", "measured", "tolerance", "pass"],
        rows: checks.into_iter().map(|c| vec![c.name.into(), c.measured, c.tolerance, c.pass.into()]).collect(),
    });
    Ok((r, pass))
}

pub fn spectrum(pt: &Point, kmax: u32, s: &Settings) -> Result<Report, CliError> {
    let p = params(pt)?;
    let g = s.grid()?;
    let mut jobs: Vec<(u32, EigenIndex)> = vec![(0, EigenIndex::First), (0, EigenIndex::Second)];
    jobs.extend((1..=kmax).map(|k| (k, EigenIndex::First)));
    let rows = jobs
        .par_iter()
        .map(|&(k, idx)| {
            let mode = ModeSpec::new(&p, k);
            let e = mode_eigenvalue(&p, &mode, idx, &g)?;
            let name = if idx == EigenIndex::First { "first" } else { "second" };
            Ok(vec![k.into(), name.into(), e.eigenvalue.into(), e.residual.into(), e.iters.into(), mode.multiplicity.into()])
        })
        .collect::<Result<Vec<_>, ckn_core::CknError>>()?;
    let mut r = Report::default();
    point_meta(&mut r, &p);
    r.set("p_minus_1", p.p - 1.0).set("nodes", s.nodes).set("span", s.span);
    r.table = Some(Table {
        name: "modes",
        columns: vec!["k", "index", "eigenvalue", "residual", "iters", "multiplicity"],
        rows,
    });
    Ok(r)
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Region of a lattice cell. Boundaries and the Felli-Schneider curve are
/// matched by lattice index, so a curve shows up in the cell it rounds to.
pub fn classify_cell(n: u32, alpha: f64, beta: f64, beta0: f64, step: f64) -> RegionClass {
    if step <= 0.0 {
        return RegionClass::locate(n, alpha, beta);
    }
    if alpha <= 2.0 - n as f64 {
        return RegionClass::Invalid;
    }
    let idx = |b: f64| ((b - beta0) / step).round() as i64;
    let j = idx(beta);
    let (lo, up) = (lower_beta(n, alpha), upper_beta(alpha));
    if j == idx(lo) {
        return match alpha.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => RegionClass::CriticalUpperAlphaPos,
            Some(std::cmp::Ordering::Less) => RegionClass::CriticalUpperAlphaNeg,
            _ => RegionClass::CriticalUpperAlphaZero,
        };
    }
    if j == idx(up) {
        return RegionClass::RellichBoundary;
    }
    if beta < lo || beta > up {
        return RegionClass::Invalid;
    }
    if alpha >= 0.0 && j == idx(felli_schneider(n, alpha)) {
        return RegionClass::FSCurve;
    }
    match RegionClass::locate(n, alpha, beta) {
        RegionClass::FSCurve if alpha > 0.0 => RegionClass::FSCurve,
        other => other,
    }
}

pub fn region_map(a: &RegionArgs, _s: &Settings) -> Result<Report, CliError> {
    if a.resolution == 0 {
        return Err(CliError::Input("resolution must be at least 1".into()));
    }
    let bad = |lo: f64, hi: f64| !(lo.is_finite() && hi.is_finite()) || hi < lo || (hi == lo && a.resolution > 1);
    if bad(a.alpha_min, a.alpha_max) || bad(a.beta_min, a.beta_max) {
        return Err(CliError::Input("ranges must be finite, non-empty and increasing".into()));
    }
    if a.n < 5 {
        return Err(ckn_core::CknError::InvalidDimension(a.n).into());
    }
    let alphas = axis(a.alpha_min, a.alpha_max, a.resolution);
    let betas = axis(a.beta_min, a.beta_max, a.resolution);
    let step = if a.resolution > 1 { betas[1] - betas[0] } else { 0.0 };
    let cells: Vec<(f64, f64)> = alphas.iter().flat_map(|&x| betas.iter().map(move |&y| (x, y))).collect();
    let rows = cells
        .par_iter()
        .map(|&(alpha, beta)| {
            let region = classify_cell(a.n, alpha, beta, a.beta_min, step);
            let sign = derive(a.n, alpha, beta)
                .ok()
                .filter(|p| p.region != RegionClass::RellichBoundary)
                .and_then(|p| second_variation_z1(&p).ok())
                .map(|sv| match Sign::of(sv.value) {
                    Sign::Positive => "+",
                    Sign::Negative => "-",
                    Sign::Zero => "0",
                });
            let fs = if alpha > 2.0 - a.n as f64 { Val::Float(felli_schneider(a.n, alpha)) } else { Val::Null };
            vec![alpha.into(), beta.into(), region.as_str().into(), fs, sign.into()]
        })
        .collect();
    let mut r = Report::default();
    r.set("N", a.n).set("resolution", a.resolution);
    r.table = Some(Table {
        name: "cells",
        columns: vec!["alpha", "beta", "region", "beta_fs", "second_variation_sign"],
        rows,
    });
    Ok(r)
}

/// Reads `r value` lines and interpolates linearly in `ln r`; zero outside.
pub fn load_profile(text: &str, g: &LogGrid<f64>) -> Result<RadialProfile<f64>, CliError> {
    let mut pts = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CliError::Input(format!("init line {}: expected `r value`", i + 1));
        let mut it = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
        let r: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let v: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if it.next().is_some() || !(r > 0.0) || !r.is_finite() || !v.is_finite() {
            return Err(bad());
        }
        pts.push((r.ln(), v));
    }
    if pts.len() < 2 {
        return Err(CliError::Input("init file needs at least two points".into()));
    }
    if pts.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(CliError::Input("init radii must increase strictly".into()));
    }
    Ok(RadialProfile::from_log_fn(g, |t| {
        let k = pts.partition_point(|&(x, _)| x <= t);
        if k == 0 || k == pts.len() {
            // Exactly on the last point counts as inside.
            return if k == pts.len() && t == pts[k - 1].0 { pts[k - 1].1 } else { 0.0 };
        }
        let ((x0, y0), (x1, y1)) = (pts[k - 1], pts[k]);
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }))
}

pub fn minimize(a: &MinimizeArgs, s: &Settings) -> Result<Report, CliError> {
    let p = params(&a.point)?;
    let g = s.grid()?;
    let init = match &a.init {
        Some(path) => load_profile(&read(path)?, &g)?,
        None => RadialProfile::gaussian_mix(&g, &[(1.0, 0.0, 1.0)]),
    };
    let max_iters = a.max_iters.unwrap_or(s.max_iters);
    let tol = a.tol.unwrap_or(s.tol);
    let sr = radial_constant_sr(&p)?;
    let m = minimize_radial(&p, &init, max_iters, tol)?;
    let mut r = Report::default();
    point_meta(&mut r, &p);
    r.set("value", m.value)
        .set("S_r", sr)
        .set("rel_err", (m.value - sr) / sr)
        .set("iters", m.iters)
        .set("grad_norm", m.grad_norm)
        .set("converged", m.converged)
        .set("nodes", s.nodes)
        .set("span", s.span);
    if let Some(t) = a.perturb {
        let z1 = RadialProfile::from_log_fn(&g, |tau| linearized_mode_log(&p, Kernel::Z1, tau));
        let mode = ModeSpec::new(&p, 1);
        let plus = perturbed_quotient(&p, t, &mode, &z1)?;
        let minus = perturbed_quotient(&p, -t, &mode, &z1)?;
        r.set("perturb_t", t)
            .set("perturbed_plus", plus)
            .set("perturbed_minus", minus)
            .set("perturbed_below_S_r", plus < sr && minus < sr);
    }
    Ok(r)
}
