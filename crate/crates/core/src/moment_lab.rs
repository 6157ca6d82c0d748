//! Monte Carlo moments and the diagnostics built on them: growth-rate fits,
//! the Laplace functional `Λ(θ)`, common-noise convergence in `β`, the
//! continuity modulus and a bisection scan for the growth transition in `λ`.
//!
//! Replica `r` always draws its noise from stream `r` of the run seed, so
//! every estimate is a deterministic function of `(model, grid, R, seed)`.
//! Replicas that hit the blow-up guard are excluded and counted.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::noise_and_sde::{project_mode1, sample_noise, GridSpec, ModelSpec, SimError, Simulator, SolutionPath};
use crate::quad::{integrate, QuadTol};
use crate::real::{pairwise_sum, Real};
use crate::special_fn::{EvalPolicy, FracOrder, MittagLeffler, SpecialFnError};
use crate::spectral_kernel::{DomainSpec, InitialCondition, KernelError, SpectralBasis};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("fit needs at least {need} positive points in the window, found {found}")]
    Fit { need: usize, found: usize },
    #[error("degenerate regression: largest moment {max_moment:e} is below the noise floor")]
    Degenerate { max_moment: f64 },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

pub type Result<T> = std::result::Result<T, MomentError>;

/// Moments at or below this value are treated as exactly zero in log fits.
pub const NOISE_FLOOR: f64 = 1e-30;

/// Second-moment estimates on the time grid.
///
/// `sup_x[m] = max_i mean_r u_{t_m}(x_i)²` and `mode1[m] = mean_r ⟨u_{t_m}, φ_1⟩²`,
/// with jackknife standard errors. When every replica aborts the estimates are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries<R> {
    pub times: Vec<R>,
    pub sup_x: Vec<R>,
    pub sup_x_se: Vec<R>,
    pub mode1: Vec<R>,
    pub mode1_se: Vec<R>,
    pub replicas_used: usize,
    pub aborted: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    SupX,
    Mode1,
}

impl<R: Real> MomentSeries<R> {
    pub fn values(&self, which: Which) -> &[R] {
        match which {
            Which::SupX => &self.sup_x,
            Which::Mode1 => &self.mode1,
        }
    }

    pub fn errors(&self, which: Which) -> &[R] {
        match which {
            Which::SupX => &self.sup_x_se,
            Which::Mode1 => &self.mode1_se,
        }
    }

    /// `[T/2, T]`.
    pub fn late_window(&self) -> (R, R) {
        let t = *self.times.last().expect("nonempty series");
        (t * R::lit(0.5), t)
    }
}

/// `1..=8` evenly spaced step indices `round(qM/8)`, deduplicated.
pub fn probe_steps(steps: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=8).map(|q| (q * steps + 4) / 8).filter(|&m| m > 0).collect();
    out.dedup();
    out
}

/// Mean of column `k` over `n` samples, maximised over `k`, with its
/// leave-one-out jackknife standard error.
fn jackknife_max<R: Real>(n: usize, k: usize, get: impl Fn(usize, usize) -> R + Sync) -> (R, R) {
    if n == 0 {
        return (R::nan(), R::nan());
    }
    let sums: Vec<R> = (0..k)
        .map(|c| {
            let col: Vec<R> = (0..n).map(|r| get(r, c)).collect();
            pairwise_sum(&col)
        })
        .collect();
    let nf = R::from_usize_lossy(n);
    let full = sums.iter().fold(R::neg_infinity(), |m, &s| m.max(s / nf));
    if n < 2 {
        return (full, R::zero());
    }
    let n1 = R::from_usize_lossy(n - 1);
    let loo: Vec<R> = (0..n)
        .map(|r| {
            (0..k).fold(R::neg_infinity(), |m, c| m.max((sums[c] - get(r, c)) / n1))
        })
        .collect();
    // Shifted by the first value so identical replicas give exactly zero.
    let shifted: Vec<R> = loo.iter().map(|&v| v - loo[0]).collect();
    let mean_shift = pairwise_sum(&shifted) / nf;
    let dev: Vec<R> = shifted.iter().map(|&v| (v - mean_shift) * (v - mean_shift)).collect();
    let se = (pairwise_sum(&dev) * n1 / nf).sqrt();
    (full, se)
}

enum Outcome<T> {
    Done(T),
    Aborted,
}

fn run_replicas<T, F>(replicas: usize, f: F) -> Result<(Vec<T>, usize)>
where
    T: Send,
    F: Fn(u64) -> std::result::Result<T, SimError> + Sync,
{
    let outcomes: Vec<std::result::Result<Outcome<T>, SimError>> = (0..replicas)
        .into_par_iter()
        .map(|r| match f(r as u64) {
            Ok(v) => Ok(Outcome::Done(v)),
            Err(SimError::BlowUp { .. }) => Ok(Outcome::Aborted),
            Err(e) => Err(e),
        })
        .collect();
    let mut done = Vec::with_capacity(replicas);
    let mut aborted = 0;
    for o in outcomes {
        match o? {
            Outcome::Done(v) => done.push(v),
            Outcome::Aborted => aborted += 1,
        }
    }
    Ok((done, aborted))
}

/// Second moments over `replicas` independent noise streams of `seed`.
pub fn mc_moments<R: Real>(model: &ModelSpec<R>, grid: &GridSpec<R>, replicas: usize, seed: u64) -> Result<MomentSeries<R>> {
    if replicas < 2 {
        return Err(MomentError::Invalid(format!("need at least 2 replicas, got {replicas}")));
    }
    let sim = Simulator::new(model.clone(), *grid)?;
    mc_moments_with(&sim, replicas, seed)
}

/// As [`mc_moments`] with prebuilt kernel tables.
pub fn mc_moments_with<R: Real>(sim: &Simulator<R>, replicas: usize, seed: u64) -> Result<MomentSeries<R>> {
    let grid = *sim.grid();
    let length = sim.model().length;
    let steps = grid.steps();
    let nodes = grid.cells + 1;
    let (paths, aborted) = run_replicas(replicas, |r| {
        let noise = sample_noise(&grid, length, seed, r)?;
        let path = sim.run(&noise)?;
        let mode1: Vec<R> = project_mode1(&path).into_iter().map(|v| v * v).collect();
        Ok((path, mode1))
    })?;
    let n = paths.len();
    let mut series = MomentSeries {
        times: (0..=steps).map(|m| grid.time(m)).collect(),
        sup_x: Vec::with_capacity(steps + 1),
        sup_x_se: Vec::with_capacity(steps + 1),
        mode1: Vec::with_capacity(steps + 1),
        mode1_se: Vec::with_capacity(steps + 1),
        replicas_used: n,
        aborted,
    };
    for m in 0..=steps {
        let (s, se) = jackknife_max(n, nodes, |r, i| {
            let v = paths[r].0.value(m, i);
            v * v
        });
        series.sup_x.push(s);
        series.sup_x_se.push(se);
        let (s, se) = jackknife_max(n, 1, |r, _| paths[r].1[m]);
        series.mode1.push(s);
        series.mode1_se.push(se);
    }
    Ok(series)
}

/// Second moments of the scheme from its exact moment recursion (linear `σ`);
/// standard errors are zero and no replicas are drawn.
///
/// Sample means of a few hundred replicas underestimate strongly intermittent
/// moments, whose mass sits on rare paths; the recursion has no such bias.
pub fn exact_moments<R: Real>(model: &ModelSpec<R>, grid: &GridSpec<R>) -> Result<MomentSeries<R>> {
    let sim = Simulator::new(model.clone(), *grid)?;
    let (nodes, mode1) = sim.second_moments();
    let steps = grid.steps();
    let width = grid.cells + 1;
    let sup_x = (0..=steps)
        .map(|m| nodes[m * width..(m + 1) * width].iter().fold(R::zero(), |a, &b| a.max(b)))
        .collect();
    Ok(MomentSeries {
        times: (0..=steps).map(|m| grid.time(m)).collect(),
        sup_x,
        sup_x_se: vec![R::zero(); steps + 1],
        mode1,
        mode1_se: vec![R::zero(); steps + 1],
        replicas_used: 0,
        aborted: 0,
    })
}

/// `E_β(-λ_1 t^β)² ⟨u_0, φ_1⟩²`: the noise-free part of the mode-1 second moment.
pub fn mode1_floor<R: Real>(model: &ModelSpec<R>, times: &[R]) -> Result<Vec<R>> {
    let basis = SpectralBasis::new(DomainSpec::new(model.length, 1), model.policy).map_err(SimError::from)?;
    let c = basis.project(&model.u0).coefficients[0];
    let ml = MittagLeffler::new(model.beta, model.policy)?;
    let l1 = basis.eigenvalue(1);
    times
        .iter()
        .map(|&t| {
            let e = ml.eval(l1 * t.powf(model.beta.get()))?;
            Ok(e * e * c * c)
        })
        .collect()
}

/// Ordinary least squares line with a 95% Student-t interval on the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<R> {
    pub slope: R,
    pub intercept: R,
    pub ci_halfwidth: R,
    pub points: usize,
}

pub fn fit_line<R: Real>(x: &[R], y: &[R]) -> Result<LineFit<R>> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(MomentError::Fit { need: 3, found: n.min(y.len()) });
    }
    let nf = R::from_usize_lossy(n);
    let mx = pairwise_sum(x) / nf;
    let my = pairwise_sum(y) / nf;
    let sxx: Vec<R> = x.iter().map(|&v| (v - mx) * (v - mx)).collect();
    let sxy: Vec<R> = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).collect();
    let sxx = pairwise_sum(&sxx);
    if !(sxx > R::zero()) {
        return Err(MomentError::Invalid("regressor has zero spread".into()));
    }
    let slope = pairwise_sum(&sxy) / sxx;
    let intercept = my - slope * mx;
    let res: Vec<R> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .collect();
    let dof = n - 2;
    let s2 = pairwise_sum(&res) / R::from_usize_lossy(dof);
    let t = StudentsT::new(0.0, 1.0, dof as f64)
        .map_err(|e| MomentError::Invalid(e.to_string()))?
        .inverse_cdf(0.975);
    let ci_halfwidth = R::lit(t) * (s2 / sxx).sqrt();
    Ok(LineFit {
        slope,
        intercept,
        ci_halfwidth,
        points: n,
    })
}

/// Least-squares rate of `log(estimate)` against `t` on a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit<R> {
    pub slope: R,
    pub intercept: R,
    pub ci_halfwidth: R,
    pub window: (R, R),
    pub points: usize,
}

impl<R: Real> GrowthFit<R> {
    /// Slope positive with the 95% interval excluding zero.
    pub fn grows(&self) -> bool {
        self.slope - self.ci_halfwidth > R::zero()
    }
}

/// Fits `log y` against `t` for points with `t` in `window`; needs 5 of them.
pub fn fit_log_linear<R: Real>(times: &[R], values: &[R], window: (R, R)) -> Result<GrowthFit<R>> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut in_window = 0;
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        in_window += 1;
        if !(v > R::zero() && v.is_finite()) {
            return Err(MomentError::Invalid(format!("nonpositive estimate {v} at t = {t} inside the fit window")));
        }
        x.push(t);
        y.push(v.ln());
    }
    if in_window < 5 {
        return Err(MomentError::Fit { need: 5, found: in_window });
    }
    let f = fit_line(&x, &y)?;
    Ok(GrowthFit {
        slope: f.slope,
        intercept: f.intercept,
        ci_halfwidth: f.ci_halfwidth,
        window,
        points: f.points,
    })
}

pub fn growth_fit<R: Real>(series: &MomentSeries<R>, which: Which, window: (R, R)) -> Result<GrowthFit<R>> {
    fit_log_linear(&series.times, series.values(which), window)
}

/// `Λ(θ) = ∫_0^∞ e^{-θt} E_β(-λ_1 t^β)² dt` by adaptive quadrature.
pub fn lambda_profile<R: Real>(beta: FracOrder<R>, lambda1: R, theta: R) -> Result<R> {
    lambda_profile_with(beta, lambda1, theta, &EvalPolicy::default())
}

pub fn lambda_profile_with<R: Real>(beta: FracOrder<R>, lambda1: R, theta: R, policy: &EvalPolicy<R>) -> Result<R> {
    if !(theta > R::zero() && theta.is_finite()) {
        return Err(MomentError::Invalid(format!("theta must be positive, got {theta}")));
    }
    if !(lambda1 > R::zero() && lambda1.is_finite()) {
        return Err(MomentError::Invalid(format!("lambda1 must be positive, got {lambda1}")));
    }
    let ml = MittagLeffler::new(beta, *policy)?;
    let b = beta.get();
    let end = R::lit(60.0) / theta;
    let mut breaks = vec![R::zero()];
    let mut p = R::lit(1e-3) / lambda1.powf(R::one() / b);
    while p < end {
        breaks.push(p);
        p *= R::lit(10.0);
    }
    breaks.push(end);
    breaks.push(R::infinity());
    let mut failure = None;
    let tol = QuadTol::new(R::min_positive_value(), R::lit(1e-11).max(R::epsilon() * R::lit(256.0)));
    let est = integrate(
        |t| {
            if t == R::zero() {
                return R::one();
            }
            match ml.eval(lambda1 * t.powf(b)) {
                Ok(e) => (-theta * t).exp() * e * e,
                Err(err) => {
                    failure.get_or_insert(err);
                    R::zero()
                }
            }
        },
        &breaks,
        &tol,
    )
    .map_err(SpecialFnError::from)?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(est.value)
}

/// `sup` over probe points of `E|u_t - u_t^{(β)}|^p` for each `β`, with
/// `u` the classical path driven by the same noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<R> {
    pub beta_values: Vec<R>,
    pub sup_moment_gap: Vec<R>,
    pub gap_se: Vec<R>,
    pub p: u32,
    pub common_seed: u64,
    pub replicas_used: usize,
    pub aborted: usize,
}

fn check_even(p: u32) -> Result<()> {
    if p < 2 || p % 2 != 0 {
        return Err(MomentError::Invalid(format!("p must be an even integer >= 2, got {p}")));
    }
    Ok(())
}

/// Common-noise comparison against `β = 1`. A replica that aborts for any
/// order is dropped for all of them.
pub fn beta_convergence<R: Real>(
    template: &ModelSpec<R>,
    betas: &[R],
    grid: &GridSpec<R>,
    p: u32,
    replicas: usize,
    seed: u64,
) -> Result<ConvergenceReport<R>> {
    check_even(p)?;
    if replicas < 1 {
        return Err(MomentError::Invalid("need at least 1 replica".into()));
    }
    let make = |b: FracOrder<R>| {
        let mut m = template.clone();
        m.beta = b;
        Simulator::new(m, *grid)
    };
    let reference = make(FracOrder::classical())?;
    let sims: Vec<Simulator<R>> = betas
        .iter()
        .map(|&b| make(FracOrder::new(b).map_err(KernelError::from)?))
        .collect::<std::result::Result<_, SimError>>()?;
    let probes = probe_steps(grid.steps());
    let nodes = grid.cells + 1;
    let length = template.length;
    let (samples, aborted) = run_replicas(replicas, |r| {
        let noise = sample_noise(grid, length, seed, r)?;
        let base = reference.run(&noise)?;
        sims.iter()
            .map(|sim| {
                let path = sim.run(&noise)?;
                let mut v = Vec::with_capacity(probes.len() * nodes);
                for &m in &probes {
                    for i in 0..nodes {
                        v.push((base.value(m, i) - path.value(m, i)).abs().powi(p as i32));
                    }
                }
                Ok(v)
            })
            .collect::<std::result::Result<Vec<Vec<R>>, SimError>>()
    })?;
    let n = samples.len();
    let k = probes.len() * nodes;
    let mut gaps = Vec::with_capacity(betas.len());
    let mut ses = Vec::with_capacity(betas.len());
    for b in 0..betas.len() {
        let (g, se) = jackknife_max(n, k, |r, c| samples[r][b][c]);
        gaps.push(g);
        ses.push(se);
    }
    Ok(ConvergenceReport {
        beta_values: betas.to_vec(),
        sup_moment_gap: gaps,
        gap_se: ses,
        p,
        common_seed: seed,
        replicas_used: n,
        aborted,
    })
}

/// Fitted Hölder-type modulus `E|u_t(y) - u_s(x)|^p <= K(|y - x|^{ap} + |t - s|^{bp})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityFit<R> {
    pub a: R,
    pub b: R,
    pub k: R,
    pub p: u32,
    /// `(lag, sup moment)` pairs used in each regression.
    pub spatial: Vec<(R, R)>,
    pub temporal: Vec<(R, R)>,
    pub spatial_fit: LineFit<R>,
    pub temporal_fit: LineFit<R>,
    pub replicas_used: usize,
    pub aborted: usize,
}

/// Dyadic lags `1, 2, 4, ...` not exceeding `limit`.
fn dyadic(limit: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |s| Some(s * 2)).take_while(|&s| s <= limit).collect()
}

/// Regresses log increment moments on log lag, separately in space (`s = t`)
/// and time (`x = y`), over dyadic lags up to a quarter of the domain and horizon.
/// `a` and `b` are the slopes divided by `p`; `K` is the larger fitted prefactor.
pub fn continuity_modulus<R: Real>(
    model: &ModelSpec<R>,
    grid: &GridSpec<R>,
    replicas: usize,
    p: u32,
    seed: u64,
) -> Result<ContinuityFit<R>> {
    check_even(p)?;
    if replicas < 2 {
        return Err(MomentError::Invalid(format!("need at least 2 replicas, got {replicas}")));
    }
    let sim = Simulator::new(model.clone(), *grid)?;
    let steps = grid.steps();
    let cells = grid.cells;
    let space_lags = dyadic(cells / 4);
    let time_lags = dyadic(steps / 4);
    if space_lags.len() < 3 || time_lags.len() < 3 {
        return Err(MomentError::Invalid("grid too coarse for three dyadic lags in space and time".into()));
    }
    let probes = probe_steps(steps);
    let pw = |d: R| d.abs().powi(p as i32);
    let collect = |path: &SolutionPath<R>| -> (Vec<Vec<R>>, Vec<Vec<R>>) {
        let space = space_lags
            .iter()
            .map(|&s| {
                let mut v = Vec::new();
                for &m in &probes {
                    for i in 0..=cells - s {
                        v.push(pw(path.value(m, i + s) - path.value(m, i)));
                    }
                }
                v
            })
            .collect();
        let time = time_lags
            .iter()
            .map(|&s| {
                let mut v = Vec::new();
                for &m in probes.iter().filter(|&&m| m >= s) {
                    for i in 0..=cells {
                        v.push(pw(path.value(m, i) - path.value(m - s, i)));
                    }
                }
                v
            })
            .collect();
        (space, time)
    };
    let length = model.length;
    let (samples, aborted) = run_replicas(replicas, |r| {
        let noise = sample_noise(grid, length, seed, r)?;
        Ok(collect(&sim.run(&noise)?))
    })?;
    let n = samples.len();
    if n < 2 {
        return Err(MomentError::Invalid(format!("only {n} replicas completed")));
    }
    let dx = grid.dx(length);
    let sup = |lag_idx: usize, spatial: bool| -> R {
        let width = if spatial { samples[0].0[lag_idx].len() } else { samples[0].1[lag_idx].len() };
        jackknife_max(n, width, |r, c| if spatial { samples[r].0[lag_idx][c] } else { samples[r].1[lag_idx][c] }).0
    };
    let spatial: Vec<(R, R)> = space_lags
        .iter()
        .enumerate()
        .map(|(k, &s)| (dx * R::from_usize_lossy(s), sup(k, true)))
        .collect();
    let temporal: Vec<(R, R)> = time_lags
        .iter()
        .enumerate()
        .map(|(k, &s)| (grid.dt * R::from_usize_lossy(s), sup(k, false)))
        .collect();
    let max_moment = spatial.iter().chain(&temporal).fold(R::zero(), |m, &(_, v)| m.max(v));
    if spatial.iter().chain(&temporal).any(|&(_, v)| !(v > R::lit(NOISE_FLOOR))) {
        return Err(MomentError::Degenerate {
            max_moment: max_moment.as_f64(),
        });
    }
    let line = |pts: &[(R, R)]| {
        let x: Vec<R> = pts.iter().map(|(l, _)| l.ln()).collect();
        let y: Vec<R> = pts.iter().map(|(_, v)| v.ln()).collect();
        fit_line(&x, &y)
    };
    let sf = line(&spatial)?;
    let tf = line(&temporal)?;
    let pf = R::from_usize_lossy(p as usize);
    Ok(ContinuityFit {
        a: sf.slope / pf,
        b: tf.slope / pf,
        k: sf.intercept.exp().max(tf.intercept.exp()),
        p,
        spatial,
        temporal,
        spatial_fit: sf,
        temporal_fit: tf,
        replicas_used: n,
        aborted,
    })
}

/// One `λ` evaluated by [`transition_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint<R> {
    pub lambda: R,
    pub slope: R,
    pub ci_halfwidth: R,
    pub replicas_used: usize,
    pub aborted: usize,
    pub grows: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionScan<R> {
    /// Largest `λ` classified as not growing.
    pub lower: R,
    /// Smallest `λ` classified as growing.
    pub upper: R,
    /// Whether the initial endpoints straddled the transition.
    pub bracketed: bool,
    pub points: Vec<ScanPoint<R>>,
}

/// Growth of `sup_x E u²` on `[T/2, T]`. Fewer than two completed replicas
/// means the moment ran past the blow-up guard, which is classified as growth.
pub fn classify<R: Real>(series: &MomentSeries<R>, lambda: R) -> Result<ScanPoint<R>> {
    if series.replicas_used < 2 {
        return Ok(ScanPoint {
            lambda,
            slope: R::infinity(),
            ci_halfwidth: R::zero(),
            replicas_used: series.replicas_used,
            aborted: series.aborted,
            grows: true,
        });
    }
    let fit = growth_fit(series, Which::SupX, series.late_window())?;
    Ok(ScanPoint {
        lambda,
        slope: fit.slope,
        ci_halfwidth: fit.ci_halfwidth,
        replicas_used: series.replicas_used,
        aborted: series.aborted,
        grows: fit.grows(),
    })
}

/// How a scan point estimates its second moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    MonteCarlo { replicas: usize, seed: u64 },
    /// [`exact_moments`]; linear `σ` only.
    Exact,
}

impl Estimator {
    pub fn moments<R: Real>(&self, model: &ModelSpec<R>, grid: &GridSpec<R>) -> Result<MomentSeries<R>> {
        match *self {
            Self::MonteCarlo { replicas, seed } => mc_moments(model, grid, replicas, seed),
            Self::Exact => exact_moments(model, grid),
        }
    }
}

/// Bisection in `log λ` between `lo` and `hi` for `iterations` rounds.
pub fn transition_scan<R: Real>(
    template: &ModelSpec<R>,
    grid: &GridSpec<R>,
    estimator: Estimator,
    lo: R,
    hi: R,
    iterations: usize,
) -> Result<TransitionScan<R>> {
    if !(lo > R::zero() && hi > lo) {
        return Err(MomentError::Invalid(format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    let eval = |lambda: R| -> Result<ScanPoint<R>> {
        let mut m = template.clone();
        m.lambda = lambda;
        let series = estimator.moments(&m, grid)?;
        if let Estimator::Exact = estimator {
            // Every value is exact; an overflowing moment is growth.
            if series.sup_x.iter().any(|v| !v.is_finite()) {
                return Ok(ScanPoint {
                    lambda,
                    slope: R::infinity(),
                    ci_halfwidth: R::zero(),
                    replicas_used: 0,
                    aborted: 0,
                    grows: true,
                });
            }
            let fit = growth_fit(&series, Which::SupX, series.late_window())?;
            return Ok(ScanPoint {
                lambda,
                slope: fit.slope,
                ci_halfwidth: fit.ci_halfwidth,
                replicas_used: 0,
                aborted: 0,
                grows: fit.grows(),
            });
        }
        classify(&series, lambda)
    };
    let mut points = vec![eval(lo)?, eval(hi)?];
    let bracketed = !points[0].grows && points[1].grows;
    let (mut a, mut b) = (lo, hi);
    if bracketed {
        for _ in 0..iterations {
            let mid = (a.ln() * R::lit(0.5) + b.ln() * R::lit(0.5)).exp();
            let pt = eval(mid)?;
            if pt.grows {
                b = mid;
            } else {
                a = mid;
            }
            points.push(pt);
        }
    }
    Ok(TransitionScan {
        lower: a,
        upper: b,
        bracketed,
        points,
    })
}

/// Sampled `u_0` on the nodes, for reports.
pub fn initial_row<R: Real>(u0: &InitialCondition<R>, length: R, cells: usize) -> Vec<R> {
    (0..=cells)
        .map(|i| u0.eval(length, length * R::from_usize_lossy(i) / R::from_usize_lossy(cells)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_log_linear_fits() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|&t| 2.0 * (0.3 * t).exp()).collect();
        let f = fit_log_linear(&t, &y, (0.0, 10.0)).unwrap();
        assert!((f.slope - 0.3).abs() < 1e-9);
        assert!(f.ci_halfwidth < 1e-9);
        let c = vec![4.0f64; t.len()];
        let f = fit_log_linear(&t, &c, (0.0, 10.0)).unwrap();
        assert!(f.slope.abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_short_or_nonpositive_windows() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let y = vec![1.0f64; 10];
        assert!(matches!(fit_log_linear(&t, &y, (0.0, 3.0)), Err(MomentError::Fit { .. })));
        let mut z = y.clone();
        z[5] = 0.0;
        assert!(fit_log_linear(&t, &z, (0.0, 9.0)).is_err());
    }

    #[test]
    fn probe_steps_are_even() {
        assert_eq!(probe_steps(400), vec![50, 100, 150, 200, 250, 300, 350, 400]);
        assert_eq!(probe_steps(4), vec![1, 2, 3, 4]);
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let xs = [1.0f64, 2.0, 4.0, 7.0];
        let (m, se) = jackknife_max(4, 1, |r, _| xs[r]);
        assert!((m - 3.5).abs() < 1e-15);
        let var = xs.iter().map(|x| (x - 3.5f64).powi(2)).sum::<f64>() / 3.0;
        assert!((se - (var / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn classical_lambda_profile() {
        let v: f64 = lambda_profile(FracOrder::classical(), 1.0, 1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_agrees_with_moment_recursion() {
        let model = ModelSpec::new(FracOrder::new(0.6).unwrap(), 0.7, PI);
        let grid = GridSpec::new(8, 0.1, 1.0);
        let mc = mc_moments(&model, &grid, 4000, 5).unwrap();
        let ex = exact_moments(&model, &grid).unwrap();
        for m in [3usize, 6, 10] {
            let z = (mc.mode1[m] - ex.mode1[m]) / mc.mode1_se[m];
            assert!(z.abs() < 4.0, "m={m} mc={} exact={} z={z}", mc.mode1[m], ex.mode1[m]);
        }
        assert_eq!(ex.sup_x[0], mc.sup_x[0]);
    }

    #[test]
    fn noise_free_moments_are_exact() {
        let beta = FracOrder::new(0.5).unwrap();
        let model = ModelSpec::new(beta, 0.0, PI);
        let grid = GridSpec::new(16, 0.1, 1.0);
        let s = mc_moments(&model, &grid, 3, 1).unwrap();
        let floor = mode1_floor(&model, &s.times).unwrap();
        for m in 0..s.times.len() {
            assert_eq!(s.mode1_se[m], 0.0);
            assert!((s.mode1[m] - floor[m]).abs() < 1e-12);
        }
        let phi_max = 2.0 / PI;
        assert!((s.sup_x[0] - phi_max).abs() < 1e-12);
    }
}
