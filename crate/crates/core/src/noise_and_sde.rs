//! Discretised space-time white noise and the full-history mild-solution scheme.
//!
//! The grid has nodes `x_i = iΔx` (`i = 0..=J`) and cell midpoints
//! `y_k = (k + ½)Δx`. Both lie on the half-grid `z_q = qΔx/2`, on which
//! `φ_n(z_q)` depends only on `n mod 4J` up to sign. Every kernel value the
//! scheme needs is therefore `Σ_ρ S_ρ(τ) ψ_ρ(q) ψ_ρ(q')` with `2J - 1` folded
//! modes `ψ_ρ` and folded weights `S_ρ(τ) = Σ_{n ≡ ±ρ} w_n(τ)`. The folded
//! tables are exact rearrangements of the truncated kernel series.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::real::{CompensatedSum, Real};
use crate::special_fn::{sin_pi, EvalPolicy, FracOrder};
use crate::spectral_kernel::{DomainSpec, InitialCondition, KernelError, KernelKind, SpectralBasis};

/// Values above this magnitude abort a replica.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("noise array is {got_steps}x{got_cells}, grid needs {steps}x{cells}")]
    Shape {
        steps: usize,
        cells: usize,
        got_steps: usize,
        got_cells: usize,
    },
    #[error("blow-up at step {m}, node {i}: |u| = {value:e}")]
    BlowUp { m: usize, i: usize, value: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Space-time grid: `J` cells of width `L/J`, step `dt`, horizon `t_final`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<R> {
    pub cells: usize,
    pub dt: R,
    pub t_final: R,
}

impl<R: Real> GridSpec<R> {
    pub fn new(cells: usize, dt: R, t_final: R) -> Self {
        Self { cells, dt, t_final }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 2 {
            return Err(SimError::InvalidSpec(format!("grid.cells must be >= 2, got {}", self.cells)));
        }
        if !(self.dt > R::zero() && self.dt.is_finite()) {
            return Err(SimError::InvalidSpec(format!("grid.dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > R::zero() && self.t_final.is_finite()) {
            return Err(SimError::InvalidSpec(format!("grid.t_final must be positive, got {}", self.t_final)));
        }
        let ratio = self.t_final / self.dt;
        if (ratio - ratio.round()).abs() > R::lit(1e-9) * ratio.max(R::one()) {
            return Err(SimError::InvalidSpec(format!(
                "grid.t_final / grid.dt = {ratio} is not an integer"
            )));
        }
        Ok(())
    }

    /// Number of time steps `M`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().to_usize().unwrap_or(0)
    }

    pub fn dx(&self, length: R) -> R {
        length / R::from_usize_lossy(self.cells)
    }

    pub fn time(&self, m: usize) -> R {
        self.dt * R::from_usize_lossy(m)
    }

    /// Same horizon with `dt` multiplied by `factor`.
    pub fn coarsened(&self, factor: usize) -> Self {
        Self {
            dt: self.dt * R::from_usize_lossy(factor),
            ..*self
        }
    }
}

/// Diffusion coefficient `σ`, with `l_σ |x| <= |σ(x)| <= L_σ |x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSpec<R> {
    /// `σ(x) = c x`
    Linear { c: R },
}

impl<R: Real> SigmaSpec<R> {
    #[inline]
    pub fn eval(&self, x: R) -> R {
        match self {
            Self::Linear { c } => *c * x,
        }
    }

    pub fn lipschitz_upper(&self) -> R {
        match self {
            Self::Linear { c } => c.abs(),
        }
    }

    pub fn lower(&self) -> R {
        match self {
            Self::Linear { c } => c.abs(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Linear { c } if c.is_finite() && *c != R::zero() => Ok(()),
            Self::Linear { c } => Err(SimError::InvalidSpec(format!("sigma.c must be finite and nonzero, got {c}"))),
        }
    }
}

/// Number of retained eigenmodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeBudget {
    /// Smallest count whose tail bound meets the tolerance at the smallest
    /// kernel time of the grid (never below `2J`).
    Auto,
    /// Exactly this many; the run fails if the tail bound is not met.
    Fixed(usize),
}

/// The full problem statement: order, noise level, domain, `σ`, `u_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec<R> {
    pub beta: FracOrder<R>,
    pub lambda: R,
    pub length: R,
    pub modes: ModeBudget,
    pub tail_tol: R,
    pub sigma: SigmaSpec<R>,
    pub u0: InitialCondition<R>,
    pub policy: EvalPolicy<R>,
}

impl<R: Real> ModelSpec<R> {
    /// `σ(x) = x`, `u_0 = φ_1`, automatic mode budget, tail tolerance `1e-3`.
    pub fn new(beta: FracOrder<R>, lambda: R, length: R) -> Self {
        Self {
            beta,
            lambda,
            length,
            modes: ModeBudget::Auto,
            tail_tol: R::lit(1e-3),
            sigma: SigmaSpec::Linear { c: R::one() },
            u0: InitialCondition::mode(1),
            policy: EvalPolicy::default(),
        }
    }

    pub fn kind(&self) -> KernelKind<R> {
        KernelKind::from_order(self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= R::zero() && self.lambda.is_finite()) {
            return Err(SimError::InvalidSpec(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.tail_tol > R::zero()) {
            return Err(SimError::InvalidSpec("tail_tol must be positive".into()));
        }
        if let ModeBudget::Fixed(0) = self.modes {
            return Err(SimError::InvalidSpec("mode budget must be >= 1".into()));
        }
        DomainSpec::new(self.length, 1).validate()?;
        self.sigma.validate()?;
        self.u0.validate(self.length)?;
        self.policy.validate().map_err(KernelError::from)?;
        Ok(())
    }

    /// Mode count used on `grid`.
    pub fn n_modes(&self, grid: &GridSpec<R>) -> usize {
        match self.modes {
            ModeBudget::Fixed(n) => n,
            ModeBudget::Auto => {
                let tau = grid.dt * R::lit(0.5);
                SpectralBasis::required_modes(self.length, self.kind(), tau, self.tail_tol).max(2 * grid.cells)
            }
        }
    }
}

/// `M x J` white-noise cell increments, row `j` covering `[t_j, t_{j+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseArray<R> {
    steps: usize,
    cells: usize,
    increments: Vec<R>,
    pub seed: u64,
    pub stream_id: u64,
    /// Number of fine steps summed into each row.
    pub coarsening: usize,
}

impl<R: Real> NoiseArray<R> {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn increments(&self) -> &[R] {
        &self.increments
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[R] {
        &self.increments[j * self.cells..(j + 1) * self.cells]
    }

    /// Antithetic copy `-ξ`.
    pub fn negated(&self) -> Self {
        Self {
            increments: self.increments.iter().map(|v| -*v).collect(),
            ..self.clone()
        }
    }

    /// Sums consecutive blocks of `factor` rows, giving the increments of the
    /// same realisation on a grid with `dt * factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.steps % factor != 0 {
            return Err(SimError::InvalidSpec(format!(
                "cannot coarsen {} steps by a factor of {factor}",
                self.steps
            )));
        }
        let steps = self.steps / factor;
        let mut increments = vec![R::zero(); steps * self.cells];
        for j in 0..steps {
            for f in 0..factor {
                let src = self.row(j * factor + f);
                for (d, s) in increments[j * self.cells..(j + 1) * self.cells].iter_mut().zip(src) {
                    *d += *s;
                }
            }
        }
        Ok(Self {
            steps,
            cells: self.cells,
            increments,
            seed: self.seed,
            stream_id: self.stream_id,
            coarsening: self.coarsening * factor,
        })
    }
}

/// iid `Normal(0, dt·Δx)` increments from ChaCha8 keyed by `seed`, on stream `stream_id`.
pub fn sample_noise<R: Real>(grid: &GridSpec<R>, length: R, seed: u64, stream_id: u64) -> Result<NoiseArray<R>> {
    grid.validate()?;
    let steps = grid.steps();
    let cells = grid.cells;
    let scale = (grid.dt * grid.dx(length)).sqrt().as_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    let increments = (0..steps * cells)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            R::lit(z * scale)
        })
        .collect();
    Ok(NoiseArray {
        steps,
        cells,
        increments,
        seed,
        stream_id,
        coarsening: 1,
    })
}

/// Field values at the grid nodes, `(M + 1) x (J + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPath<R> {
    pub steps: usize,
    pub cells: usize,
    pub dt: R,
    pub length: R,
    values: Vec<R>,
}

impl<R: Real> SolutionPath<R> {
    /// Builds a path from explicit rows; mostly useful for diagnostics.
    pub fn from_rows(rows: &[Vec<R>], dt: R, length: R) -> Self {
        let cells = rows[0].len() - 1;
        Self {
            steps: rows.len() - 1,
            cells,
            dt,
            length,
            values: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    #[inline]
    pub fn value(&self, m: usize, i: usize) -> R {
        self.values[m * (self.cells + 1) + i]
    }

    #[inline]
    pub fn row(&self, m: usize) -> &[R] {
        &self.values[m * (self.cells + 1)..(m + 1) * (self.cells + 1)]
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn time(&self, m: usize) -> R {
        self.dt * R::from_usize_lossy(m)
    }

    pub fn x(&self, i: usize) -> R {
        self.length * R::from_usize_lossy(i) / R::from_usize_lossy(self.cells)
    }
}

/// `⟨u_{t_m}, φ_1⟩` for every row by the trapezoidal rule on the nodes.
pub fn project_mode1<R: Real>(path: &SolutionPath<R>) -> Vec<R> {
    let j = path.cells;
    let dx = path.length / R::from_usize_lossy(j);
    let norm = (R::lit(2.0) / path.length).sqrt();
    let phi: Vec<R> = (0..=j)
        .map(|i| norm * sin_pi(R::from_usize_lossy(i) / R::from_usize_lossy(j)))
        .collect();
    (0..=path.steps)
        .map(|m| {
            let row = path.row(m);
            let mut acc = CompensatedSum::new();
            acc.add(R::lit(0.5) * (row[0] * phi[0] + row[j] * phi[j]));
            for i in 1..j {
                acc.add(row[i] * phi[i]);
            }
            acc.value() * dx
        })
        .collect()
}

/// Precomputed folded tables for one `(model, grid)`, shared read-only by
/// every replica.
#[derive(Debug, Clone)]
pub struct Simulator<R> {
    model: ModelSpec<R>,
    grid: GridSpec<R>,
    steps: usize,
    cells: usize,
    n_modes: usize,
    /// `ψ_ρ(q)`, row-major `[q][ρ]`, `q = 0..=2J`.
    psi: Vec<R>,
    /// `S_ρ(τ_l)` for `τ_l = (l - ½)dt`, `[l - 1][ρ]`.
    kernel: Vec<R>,
    /// Folded deterministic coefficients `[m][ρ]` for `m = 1..=M` (row 0 unused).
    det: Vec<R>,
    /// `u_0` on the half-grid.
    initial: Vec<R>,
}

struct Fold {
    period: usize,
    half: usize,
}

impl Fold {
    fn new(cells: usize) -> Self {
        Self {
            period: 4 * cells,
            half: 2 * cells,
        }
    }

    /// Folded index `ρ - 1` and sign for mode `n`, or `None` if `φ_n` vanishes on the half-grid.
    #[inline]
    fn map(&self, n: usize) -> Option<(usize, bool)> {
        let r = n % self.period;
        if r == 0 || r == self.half {
            None
        } else if r < self.half {
            Some((r - 1, true))
        } else {
            Some((self.period - r - 1, false))
        }
    }
}

impl<R: Real> Simulator<R> {
    pub fn new(model: ModelSpec<R>, grid: GridSpec<R>) -> Result<Self> {
        model.validate()?;
        grid.validate()?;
        let steps = grid.steps();
        let cells = grid.cells;
        let n_modes = model.n_modes(&grid);
        let kind = model.kind();
        let basis = SpectralBasis::new(
            DomainSpec::new(model.length, n_modes).with_tail_tol(model.tail_tol),
            model.policy,
        )?;
        let half_dt = grid.dt * R::lit(0.5);
        basis.check_truncation(kind, half_dt)?;

        let p = 2 * cells - 1;
        let fold = Fold::new(cells);
        let norm = (R::lit(2.0) / model.length).sqrt();
        let two_j = R::from_usize_lossy(2 * cells);
        let mut psi = vec![R::zero(); (2 * cells + 1) * p];
        for q in 0..=2 * cells {
            for rho in 1..=p {
                // Reduce the argument mod 4J first so sin_pi sees a small exact value.
                let arg = (rho * q) % fold.period;
                psi[q * p + rho - 1] = norm * sin_pi(R::from_usize_lossy(arg) / two_j);
            }
        }

        let folded = |t: R| -> std::result::Result<Vec<R>, KernelError> {
            let w = basis.mode_weights(kind, t)?;
            let mut acc = vec![CompensatedSum::new(); p];
            for (n, wn) in w.into_iter().enumerate() {
                if let Some((idx, _)) = fold.map(n + 1) {
                    acc[idx].add(wn);
                }
            }
            Ok(acc.iter().map(|a| a.value()).collect())
        };
        let kernel_rows: Vec<Vec<R>> = (1..=steps)
            .into_par_iter()
            .map(|l| folded(grid.dt * (R::from_usize_lossy(l) - R::lit(0.5))))
            .collect::<std::result::Result<_, _>>()?;
        let kernel = kernel_rows.concat();

        let proj = basis.project(&model.u0);
        let det_tail = basis.initial_tail_bound(kind, &proj, grid.dt);
        if det_tail > model.tail_tol {
            return Err(KernelError::Truncation {
                t: grid.dt.as_f64(),
                tail: det_tail.as_f64(),
                tol: model.tail_tol.as_f64(),
                n_modes,
                required: n_modes * 2,
            }
            .into());
        }
        let nonzero: Vec<(usize, R)> = proj
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != R::zero())
            .map(|(n, c)| (n, *c))
            .collect();
        let det_rows: Vec<Vec<R>> = (0..=steps)
            .into_par_iter()
            .map(|m| {
                let mut acc = vec![CompensatedSum::new(); p];
                if m > 0 && !nonzero.is_empty() {
                    let w = basis.mode_weights(kind, grid.time(m))?;
                    for &(n, c) in &nonzero {
                        if let Some((idx, plus)) = fold.map(n + 1) {
                            let v = c * w[n];
                            acc[idx].add(if plus { v } else { -v });
                        }
                    }
                }
                Ok(acc.iter().map(|a| a.value()).collect())
            })
            .collect::<std::result::Result<_, KernelError>>()?;
        let det = det_rows.concat();

        let dz = model.length / two_j;
        let initial = (0..=2 * cells)
            .map(|q| {
                if q == 0 || q == 2 * cells {
                    R::zero()
                } else {
                    model.u0.eval(model.length, dz * R::from_usize_lossy(q))
                }
            })
            .collect();

        Ok(Self {
            model,
            grid,
            steps,
            cells,
            n_modes,
            psi,
            kernel,
            det,
            initial,
        })
    }

    pub fn model(&self) -> &ModelSpec<R> {
        &self.model
    }

    pub fn grid(&self) -> &GridSpec<R> {
        &self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Folded kernel `K((l - ½)dt, z_q, z_q')` from the tables.
    pub fn kernel_value(&self, l: usize, q: usize, q2: usize) -> R {
        let p = 2 * self.cells - 1;
        let s = &self.kernel[(l - 1) * p..l * p];
        let a = &self.psi[q * p..(q + 1) * p];
        let b = &self.psi[q2 * p..(q2 + 1) * p];
        let mut acc = CompensatedSum::new();
        for r in 0..p {
            acc.add(s[r] * a[r] * b[r]);
        }
        acc.value()
    }

    /// Exact second moments of the scheme for linear `σ`.
    ///
    /// Noise increments are independent of the state they multiply, so
    /// `E u_m(z)² = d_m(z)² + λ²c²ΔtΔx Σ_{j<m} Σ_k K_{m-j}(z, y_k)² E u_j(y_k)²`
    /// with `d` the noise-free part. Returns `E u_{t_m}(x_i)²` on the nodes,
    /// row-major, and `E⟨u_{t_m}, φ_1⟩²` with the trapezoidal projection.
    pub fn second_moments(&self) -> (Vec<R>, Vec<R>) {
        let (m_steps, j) = (self.steps, self.cells);
        let p = 2 * j - 1;
        let nq = 2 * j + 1;
        let SigmaSpec::Linear { c: sc } = self.model.sigma;
        let dx = self.grid.dx(self.model.length);
        let coupling = self.model.lambda * self.model.lambda * sc * sc * self.grid.dt * dx;
        let det = |m: usize, q: usize| -> R {
            if m == 0 {
                return self.initial[q];
            }
            if q == 0 || q == nq - 1 {
                return R::zero();
            }
            let row = &self.psi[q * p..(q + 1) * p];
            let d = &self.det[m * p..(m + 1) * p];
            let mut acc = R::zero();
            for r in 0..p {
                acc += row[r] * d[r];
            }
            acc
        };
        let norm = (R::lit(2.0) / self.model.length).sqrt();
        let w: Vec<R> = (0..=j)
            .map(|i| dx * norm * sin_pi(R::from_usize_lossy(i) / R::from_usize_lossy(j)))
            .collect();
        // Squared kernels K_l(z_q, y_k)² for every node and midpoint, and the
        // squared mode-1 weights (Σ_i w_i K_l(x_i, y_k))².
        let mut k2 = vec![R::zero(); m_steps * nq * j];
        let mut a2 = vec![R::zero(); m_steps * j];
        k2.par_chunks_mut(nq * j)
            .zip(a2.par_chunks_mut(j))
            .enumerate()
            .for_each(|(l0, (kl, al))| {
                let mut a = vec![R::zero(); j];
                for q in 0..nq {
                    for k in 0..j {
                        let v = self.kernel_value(l0 + 1, q, 2 * k + 1);
                        kl[q * j + k] = v * v;
                        if q % 2 == 0 {
                            a[k] += w[q / 2] * v;
                        }
                    }
                }
                for k in 0..j {
                    al[k] = a[k] * a[k];
                }
            });
        let mut mid = vec![R::zero(); (m_steps + 1) * j];
        let mut nodes = vec![R::zero(); (m_steps + 1) * (j + 1)];
        let mut mode1 = vec![R::zero(); m_steps + 1];
        for m in 0..=m_steps {
            let conv = |q: usize| -> R {
                let mut acc = CompensatedSum::new();
                for jj in 0..m {
                    let l = m - jj;
                    let kl = &k2[((l - 1) * nq + q) * j..((l - 1) * nq + q + 1) * j];
                    let v = &mid[jj * j..(jj + 1) * j];
                    let mut s = R::zero();
                    for k in 0..j {
                        s += kl[k] * v[k];
                    }
                    acc.add(s);
                }
                acc.value()
            };
            let row: Vec<R> = (0..j)
                .map(|k| {
                    let d = det(m, 2 * k + 1);
                    d * d + coupling * conv(2 * k + 1)
                })
                .collect();
            let node_row: Vec<R> = (0..=j)
                .map(|i| {
                    let d = det(m, 2 * i);
                    d * d + coupling * conv(2 * i)
                })
                .collect();
            let mut d1 = R::zero();
            for i in 0..=j {
                d1 += w[i] * det(m, 2 * i);
            }
            let mut acc = CompensatedSum::new();
            for jj in 0..m {
                let l = m - jj;
                let al = &a2[(l - 1) * j..l * j];
                let v = &mid[jj * j..(jj + 1) * j];
                let mut s = R::zero();
                for k in 0..j {
                    s += al[k] * v[k];
                }
                acc.add(s);
            }
            mode1[m] = d1 * d1 + coupling * acc.value();
            mid[m * j..(m + 1) * j].copy_from_slice(&row);
            nodes[m * (j + 1)..(m + 1) * (j + 1)].copy_from_slice(&node_row);
        }
        (nodes, mode1)
    }

    /// Advances one replica on `noise`.
    pub fn run(&self, noise: &NoiseArray<R>) -> Result<SolutionPath<R>> {
        let (m_steps, j) = (self.steps, self.cells);
        if noise.steps() != m_steps || noise.cells() != j {
            return Err(SimError::Shape {
                steps: m_steps,
                cells: j,
                got_steps: noise.steps(),
                got_cells: noise.cells(),
            });
        }
        let p = 2 * j - 1;
        let nq = 2 * j + 1;
        let lambda = self.model.lambda;
        let noisy = lambda != R::zero();
        let threshold = R::lit(BLOW_UP_THRESHOLD);

        let mut values = vec![R::zero(); (m_steps + 1) * (j + 1)];
        for i in 0..=j {
            values[i] = self.initial[2 * i];
        }
        let mut current = self.initial.clone();
        let mut history = vec![R::zero(); if noisy { m_steps * p } else { 0 }];
        let mut coef = vec![R::zero(); p];
        let mut v = vec![R::zero(); j];
        let mut conv = vec![R::zero(); p];

        for m in 1..=m_steps {
            coef.copy_from_slice(&self.det[m * p..(m + 1) * p]);
            if noisy {
                let xi = noise.row(m - 1);
                for k in 0..j {
                    v[k] = self.model.sigma.eval(current[2 * k + 1]) * xi[k];
                }
                let b = &mut history[(m - 1) * p..m * p];
                for k in 0..j {
                    if v[k] == R::zero() {
                        continue;
                    }
                    let row = &self.psi[(2 * k + 1) * p..(2 * k + 2) * p];
                    for r in 0..p {
                        b[r] += row[r] * v[k];
                    }
                }
                conv.iter_mut().for_each(|c| *c = R::zero());
                for jj in 0..m {
                    let l = m - jj;
                    let s = &self.kernel[(l - 1) * p..l * p];
                    let bj = &history[jj * p..(jj + 1) * p];
                    for r in 0..p {
                        conv[r] += s[r] * bj[r];
                    }
                }
                for r in 0..p {
                    coef[r] += lambda * conv[r];
                }
            }
            current[0] = R::zero();
            current[nq - 1] = R::zero();
            for q in 1..nq - 1 {
                let row = &self.psi[q * p..(q + 1) * p];
                let mut acc = R::zero();
                for r in 0..p {
                    acc += row[r] * coef[r];
                }
                if !(acc.abs() <= threshold) {
                    return Err(SimError::BlowUp {
                        m,
                        i: q / 2,
                        value: acc.abs().as_f64(),
                    });
                }
                current[q] = acc;
            }
            let out = &mut values[m * (j + 1)..(m + 1) * (j + 1)];
            for i in 0..=j {
                out[i] = current[2 * i];
            }
        }
        Ok(SolutionPath {
            steps: m_steps,
            cells: j,
            dt: self.grid.dt,
            length: self.model.length,
            values,
        })
    }
}

/// One-shot convenience wrapper around [`Simulator`].
pub fn simulate<R: Real>(model: &ModelSpec<R>, grid: &GridSpec<R>, noise: &NoiseArray<R>) -> Result<SolutionPath<R>> {
    Simulator::new(model.clone(), *grid)?.run(noise)
}
