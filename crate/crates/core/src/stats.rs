//! Statistical kernels for the telemetry pipeline: two-state effect size,
//! dose-response OLS on phase means, TOST equivalence, effective sample
//! size, and autocorrelation-time estimation.
//!
//! Regressions run on phase means rather than raw samples, which sidesteps
//! autocorrelation inflation; [`effective_n`] is provided for raw-sample
//! analyses. Cohen's d uses the equal-weight pooled standard deviation
//! `sqrt((s1² + s2²)/2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{student_t_cdf, student_t_quantile};
use crate::real::{cast, Real};

fn mean<R: Real>(xs: &[R]) -> R {
    let n: R = cast(xs.len() as f64);
    xs.iter().fold(R::zero(), |a, &x| a + x) / n
}

/// Sample variance (n − 1 denominator).
fn sample_var<R: Real>(xs: &[R], m: R) -> R {
    let n = xs.len();
    if n < 2 {
        return R::zero();
    }
    let ss = xs.iter().fold(R::zero(), |a, &x| a + (x - m) * (x - m));
    ss / cast((n - 1) as f64)
}

/// Two-state comparison: bare idle versus context-active power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStateResult<R: Real = f64> {
    pub mean_bare_w: R,
    pub mean_ctx_w: R,
    /// `mean_ctx_w - mean_bare_w`.
    pub delta_w: R,
    /// Standardized difference with pooled std `sqrt((s1²+s2²)/2)`;
    /// infinite when both groups are exact constants with distinct values.
    pub cohens_d: R,
    /// Two-sided Welch p-value.
    pub welch_p: R,
    pub n_bare: usize,
    pub n_ctx: usize,
}

/// Welch two-sample test plus Cohen's d for the two power states.
pub fn two_state_stats<R: Real>(bare: &[R], ctx: &[R]) -> Result<TwoStateResult<R>> {
    if bare.len() < 2 || ctx.len() < 2 {
        return Err(Error::domain(
            "two-state comparison needs at least 2 samples per group",
        ));
    }
    let (m1, m2) = (mean(bare), mean(ctx));
    let (v1, v2) = (sample_var(bare, m1), sample_var(ctx, m2));
    let (n1, n2): (R, R) = (cast(bare.len() as f64), cast(ctx.len() as f64));
    let delta = m2 - m1;
    let two: R = cast(2.0);

    let pooled = ((v1 + v2) / two).sqrt();
    let cohens_d = if pooled > R::zero() {
        delta / pooled
    } else if delta == R::zero() {
        R::zero()
    } else {
        // zero-variance groups with distinct constants: overflow sentinel
        R::infinity() * delta.signum()
    };

    let se2 = v1 / n1 + v2 / n2;
    let welch_p = if se2 > R::zero() {
        let t = delta / se2.sqrt();
        let df = se2 * se2
            / ((v1 / n1) * (v1 / n1) / (n1 - R::one())
                + (v2 / n2) * (v2 / n2) / (n2 - R::one()));
        two * (R::one() - student_t_cdf(t.abs(), df))
    } else if delta == R::zero() {
        R::one()
    } else {
        R::zero()
    };

    Ok(TwoStateResult {
        mean_bare_w: m1,
        mean_ctx_w: m2,
        delta_w: delta,
        cohens_d,
        welch_p,
        n_bare: bare.len(),
        n_ctx: ctx.len(),
    })
}

/// One VRAM treatment phase: the allocation level and the power samples
/// recorded while it was held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord<R: Real = f64> {
    pub vram_gb: R,
    #[serde(skip)]
    pub power_samples_w: Vec<R>,
    pub mean_w: R,
    pub std_w: R,
    pub n_samples: usize,
}

impl<R: Real> PhaseRecord<R> {
    /// Builds a phase record, computing the sample mean and std.
    pub fn new(vram_gb: R, power_samples_w: Vec<R>) -> Result<Self> {
        if power_samples_w.is_empty() {
            return Err(Error::domain("phase record needs at least one sample"));
        }
        let m = mean(&power_samples_w);
        let s = sample_var(&power_samples_w, m).sqrt();
        Ok(PhaseRecord {
            vram_gb,
            n_samples: power_samples_w.len(),
            mean_w: m,
            std_w: s,
            power_samples_w,
        })
    }
}

/// OLS slope inference for phase-mean power against VRAM.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult<R: Real = f64> {
    pub slope_w_per_gb: R,
    pub intercept_w: R,
    pub se_slope: R,
    pub ci95_lo: R,
    pub ci95_hi: R,
    pub t_stat: R,
    pub p_two_sided: R,
    pub r_squared: R,
    pub n_phases: usize,
}

/// OLS of phase-mean power on VRAM with t-based inference (n − 2 df).
pub fn dose_response<R: Real>(phases: &[PhaseRecord<R>]) -> Result<RegressionResult<R>> {
    let n = phases.len();
    if n < 3 {
        return Err(Error::domain("dose-response needs at least 3 phases"));
    }
    let xs: Vec<R> = phases.iter().map(|p| p.vram_gb).collect();
    let ys: Vec<R> = phases.iter().map(|p| p.mean_w).collect();
    let xbar = mean(&xs);
    let ybar = mean(&ys);
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    let mut syy = R::zero();
    for i in 0..n {
        let dx = xs[i] - xbar;
        let dy = ys[i] - ybar;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if !(sxx > R::zero()) {
        return Err(Error::domain(
            "dose-response needs phases at distinct VRAM levels",
        ));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let df: R = cast((n - 2) as f64);
    let mut sse = R::zero();
    for i in 0..n {
        let resid = ys[i] - (intercept + slope * xs[i]);
        sse = sse + resid * resid;
    }
    let se_slope = (sse / df / sxx).sqrt();
    let r_squared = if syy > R::zero() {
        R::one() - sse / syy
    } else {
        R::one() // flat data fit exactly by a flat line
    };

    let (t_stat, p_two_sided) = if se_slope > R::zero() {
        let t = slope / se_slope;
        (t, cast::<R>(2.0) * (R::one() - student_t_cdf(t.abs(), df)))
    } else if slope == R::zero() {
        (R::zero(), R::one())
    } else {
        (R::infinity() * slope.signum(), R::zero())
    };

    let t_crit = student_t_quantile(cast(0.975), df);
    Ok(RegressionResult {
        slope_w_per_gb: slope,
        intercept_w: intercept,
        se_slope,
        ci95_lo: slope - t_crit * se_slope,
        ci95_hi: slope + t_crit * se_slope,
        t_stat,
        p_two_sided,
        r_squared,
        n_phases: n,
    })
}

/// TOST equivalence verdict for a regression slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceResult<R: Real = f64> {
    pub bound_w_per_gb: R,
    /// Max of the two one-sided p-values.
    pub p_tost: R,
    /// `p_tost < 0.05`.
    pub equivalent: bool,
}

/// Two one-sided tests that the slope lies inside `(-bound, +bound)`.
///
/// Rejecting both one-sided hypotheses (slope <= -bound, slope >= +bound)
/// establishes equivalence; `p_tost` is the larger of the two p-values.
pub fn tost<R: Real>(reg: &RegressionResult<R>, bound_w_per_gb: R) -> Result<EquivalenceResult<R>> {
    if !(bound_w_per_gb > R::zero()) {
        return Err(Error::domain("equivalence bound must be positive"));
    }
    if reg.n_phases < 3 {
        return Err(Error::domain("TOST needs a regression with n >= 3"));
    }
    let df: R = cast((reg.n_phases - 2) as f64);
    let b = reg.slope_w_per_gb;
    let se = reg.se_slope;
    let (p_lower, p_upper) = if se > R::zero() {
        // H0: slope <= -bound, rejected for large t1
        let t1 = (b + bound_w_per_gb) / se;
        // H0: slope >= +bound, rejected for small t2
        let t2 = (b - bound_w_per_gb) / se;
        (R::one() - student_t_cdf(t1, df), student_t_cdf(t2, df))
    } else {
        let inside_lo = if b > -bound_w_per_gb { R::zero() } else { R::one() };
        let inside_hi = if b < bound_w_per_gb { R::zero() } else { R::one() };
        (inside_lo, inside_hi)
    };
    let p_tost = p_lower.max(p_upper);
    Ok(EquivalenceResult {
        bound_w_per_gb,
        p_tost,
        equivalent: p_tost < cast(0.05),
    })
}

/// Autocorrelation-corrected sample count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EffSampleSize {
    pub n_raw: usize,
    pub tau_samples: usize,
    pub n_eff: usize,
}

/// `n_eff = round(n_raw / (2·tau + 1))`.
pub fn effective_n(n_raw: usize, tau_samples: usize) -> EffSampleSize {
    let n_eff = (n_raw as f64 / (2.0 * tau_samples as f64 + 1.0)).round() as usize;
    EffSampleSize { n_raw, tau_samples, n_eff: n_eff.min(n_raw) }
}

/// Estimates the correlation time of a series as the smallest lag at which
/// the sample autocorrelation drops below 1/e, capped at n/4. A constant
/// series has no correlation structure and returns 0.
pub fn estimate_tau<R: Real>(series: &[R]) -> Result<usize> {
    let n = series.len();
    if n < 10 {
        return Err(Error::domain("tau estimation needs at least 10 samples"));
    }
    let m = mean(series);
    let c0 = series.iter().fold(R::zero(), |a, &x| a + (x - m) * (x - m));
    if !(c0 > R::zero()) {
        return Ok(0);
    }
    let cap = n / 4;
    let threshold: R = cast((-1.0f64).exp());
    for k in 1..=cap {
        let mut ck = R::zero();
        for i in 0..n - k {
            ck = ck + (series[i] - m) * (series[i + k] - m);
        }
        if ck / c0 < threshold {
            return Ok(k);
        }
    }
    Ok(cap)
}
