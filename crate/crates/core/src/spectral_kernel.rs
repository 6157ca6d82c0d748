//! Dirichlet eigenbasis on `(0, L)` and the kernel series built on it.
//!
//! Eigenpairs are `λ_n = (nπ/L)²`, `φ_n(x) = sqrt(2/L) sin(nπx/L)`. The
//! classical kernel is `p_D = Σ e^{-λ_n t} φ_n φ_n`, the fractional one
//! `G_D = Σ E_β(-λ_n t^β) φ_n φ_n`. Every series is truncated at `N` modes and
//! evaluation fails unless an analytic bound on the dropped tail is below the
//! basis tolerance.

use thiserror::Error;

use crate::quad::{gauss_legendre, integrate, QuadTol};
use crate::real::{CompensatedSum, Real};
use crate::special_fn::{gamma, ml_dt_with, sin_pi, EvalPolicy, FracOrder, MittagLeffler, SpecialFnError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("invalid domain: {0}")]
    InvalidSpec(String),
    #[error("truncation at {n_modes} modes leaves tail bound {tail:e} > {tol:e} at t = {t}; need {required} modes")]
    Truncation {
        t: f64,
        tail: f64,
        tol: f64,
        n_modes: usize,
        required: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

pub type Result<T> = std::result::Result<T, KernelError>;

/// Interval length, number of retained modes and the tail tolerance every
/// truncated series must meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec<R> {
    pub length: R,
    pub n_modes: usize,
    pub tail_tol: R,
}

impl<R: Real> DomainSpec<R> {
    pub fn new(length: R, n_modes: usize) -> Self {
        Self {
            length,
            n_modes,
            tail_tol: R::lit(1e-3),
        }
    }

    pub fn with_tail_tol(mut self, tol: R) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > R::zero() && self.length.is_finite()) {
            return Err(KernelError::InvalidSpec(format!("length must be positive, got {}", self.length)));
        }
        if self.n_modes == 0 {
            return Err(KernelError::InvalidSpec("n_modes must be at least 1".into()));
        }
        if !(self.tail_tol > R::zero()) {
            return Err(KernelError::InvalidSpec("tail_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Which time kernel multiplies the spectral modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind<R> {
    /// `e^{-λ_n t}`
    Classical,
    /// `E_β(-λ_n t^β)`
    Fractional(FracOrder<R>),
}

impl<R: Real> KernelKind<R> {
    /// `β = 1` maps to [`KernelKind::Classical`].
    pub fn from_order(beta: FracOrder<R>) -> Self {
        if beta.is_classical() {
            Self::Classical
        } else {
            Self::Fractional(beta)
        }
    }

    pub fn order(&self) -> FracOrder<R> {
        match self {
            Self::Classical => FracOrder::classical(),
            Self::Fractional(b) => *b,
        }
    }
}

/// Nonnegative bounded initial datum supported in `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition<R> {
    /// `amplitude · φ_k`
    Mode { k: usize, amplitude: R },
    /// `height · exp(1 - 1/(1 - r²))` with `r = (x - center)/half_width`.
    Bump { center: R, half_width: R, height: R },
    /// Values on `n + 1` equispaced points of `[0, L]`, linearly interpolated.
    Tabulated { values: Vec<R> },
}

impl<R: Real> InitialCondition<R> {
    pub fn mode(k: usize) -> Self {
        Self::Mode { k, amplitude: R::one() }
    }

    pub fn zero() -> Self {
        Self::Mode {
            k: 1,
            amplitude: R::zero(),
        }
    }

    pub fn validate(&self, length: R) -> Result<()> {
        match self {
            Self::Mode { k, amplitude } => {
                if *k != 1 {
                    return Err(KernelError::InvalidSpec(format!(
                        "mode initial condition must use k = 1 to stay nonnegative, got k = {k}"
                    )));
                }
                if !(*amplitude >= R::zero() && amplitude.is_finite()) {
                    return Err(KernelError::InvalidSpec("mode amplitude must be finite and >= 0".into()));
                }
            }
            Self::Bump {
                center,
                half_width,
                height,
            } => {
                if !(*half_width > R::zero() && *center - *half_width >= R::zero() && *center + *half_width <= length) {
                    return Err(KernelError::InvalidSpec("bump support must lie inside [0, L]".into()));
                }
                if !(*height >= R::zero() && height.is_finite()) {
                    return Err(KernelError::InvalidSpec("bump height must be finite and >= 0".into()));
                }
            }
            Self::Tabulated { values } => {
                if values.len() < 2 {
                    return Err(KernelError::InvalidSpec("tabulated initial condition needs >= 2 values".into()));
                }
                if values.iter().any(|v| !(*v >= R::zero() && v.is_finite())) {
                    return Err(KernelError::InvalidSpec("tabulated values must be finite and >= 0".into()));
                }
                if values[0] != R::zero() || values[values.len() - 1] != R::zero() {
                    return Err(KernelError::InvalidSpec("tabulated values must vanish at both ends".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, length: R, x: R) -> R {
        match self {
            Self::Mode { k, amplitude } => {
                *amplitude * (R::lit(2.0) / length).sqrt() * sin_pi(R::from_usize_lossy(*k) * x / length)
            }
            Self::Bump {
                center,
                half_width,
                height,
            } => {
                let r = (x - *center) / *half_width;
                let r2 = r * r;
                if r2 >= R::one() {
                    R::zero()
                } else {
                    *height * (R::one() - R::one() / (R::one() - r2)).exp()
                }
            }
            Self::Tabulated { values } => {
                let n = values.len() - 1;
                if x <= R::zero() || x >= length {
                    return R::zero();
                }
                let pos = x / length * R::from_usize_lossy(n);
                let i = pos.floor().to_usize().unwrap_or(0).min(n - 1);
                let frac = pos - R::from_usize_lossy(i);
                values[i] * (R::one() - frac) + values[i + 1] * frac
            }
        }
    }

    /// Points where the datum is not smooth; quadrature panels are aligned to them.
    fn kinks(&self, length: R) -> Vec<R> {
        match self {
            Self::Mode { .. } => Vec::new(),
            Self::Bump { center, half_width, .. } => vec![*center - *half_width, *center + *half_width],
            Self::Tabulated { values } => {
                let n = values.len() - 1;
                (1..n)
                    .map(|i| length * R::from_usize_lossy(i) / R::from_usize_lossy(n))
                    .collect()
            }
        }
    }
}

/// Spectral coefficients `⟨u_0, φ_n⟩` together with `‖u_0‖₂`, which feeds
/// the Cauchy–Schwarz tail bound of the deterministic term.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<R> {
    pub coefficients: Vec<R>,
    pub l2_norm: R,
    /// Exact projections (single mode) have no truncation tail.
    pub exact: bool,
}

/// Immutable eigenbasis; every evaluation is a pure function of its inputs.
#[derive(Debug, Clone)]
pub struct SpectralBasis<R> {
    length: R,
    n_modes: usize,
    tail_tol: R,
    norm: R,
    eigenvalues: Vec<R>,
    policy: EvalPolicy<R>,
}

pub fn build_basis<R: Real>(spec: DomainSpec<R>) -> Result<SpectralBasis<R>> {
    SpectralBasis::new(spec, EvalPolicy::default())
}

impl<R: Real> SpectralBasis<R> {
    pub fn new(spec: DomainSpec<R>, policy: EvalPolicy<R>) -> Result<Self> {
        spec.validate()?;
        policy.validate()?;
        let eigenvalues = (1..=spec.n_modes)
            .map(|n| {
                let k = R::from_usize_lossy(n) * R::PI() / spec.length;
                k * k
            })
            .collect();
        Ok(Self {
            length: spec.length,
            n_modes: spec.n_modes,
            tail_tol: spec.tail_tol,
            norm: (R::lit(2.0) / spec.length).sqrt(),
            eigenvalues,
            policy,
        })
    }

    pub fn length(&self) -> R {
        self.length
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn tail_tol(&self) -> R {
        self.tail_tol
    }

    pub fn policy(&self) -> &EvalPolicy<R> {
        &self.policy
    }

    pub fn eigenvalues(&self) -> &[R] {
        &self.eigenvalues
    }

    /// `λ_n`, 1-based.
    pub fn eigenvalue(&self, n: usize) -> R {
        self.eigenvalues[n - 1]
    }

    /// `φ_n(x)`, 1-based; exactly zero at `x = 0` and `x = L`.
    pub fn phi(&self, n: usize, x: R) -> R {
        self.norm * sin_pi(R::from_usize_lossy(n) * x / self.length)
    }

    /// `φ_1(x) .. φ_N(x)` by the three-term sine recurrence.
    pub fn phi_all(&self, x: R) -> Vec<R> {
        let theta = R::PI() * x / self.length;
        let two_cos = R::lit(2.0) * theta.cos();
        let mut out = Vec::with_capacity(self.n_modes);
        let (mut prev, mut cur) = (R::zero(), theta.sin());
        if x == R::zero() || x == self.length {
            cur = R::zero();
        }
        for _ in 0..self.n_modes {
            out.push(self.norm * cur);
            let next = two_cos * cur - prev;
            prev = cur;
            cur = next;
        }
        out
    }

    fn ml(&self, kind: KernelKind<R>) -> Result<MittagLeffler<R>> {
        Ok(MittagLeffler::new(kind.order(), self.policy)?)
    }

    /// Time factors `e^{-λ_n t}` or `E_β(-λ_n t^β)` for `n = 1..=N`.
    pub fn mode_weights(&self, kind: KernelKind<R>, t: R) -> Result<Vec<R>> {
        if !(t >= R::zero()) {
            return Err(KernelError::Precondition(format!("t must be >= 0, got {t}")));
        }
        match kind {
            KernelKind::Classical => Ok(self.eigenvalues.iter().map(|&l| (-l * t).exp()).collect()),
            KernelKind::Fractional(b) => {
                let ml = self.ml(kind)?;
                let tb = t.powf(b.get());
                self.eigenvalues.iter().map(|&l| Ok(ml.eval(l * tb)?)).collect()
            }
        }
    }

    /// Upper bound on `sup_{x,y} |Σ_{n>N} w_n(t) φ_n(x) φ_n(y)|`.
    ///
    /// Classical: `Σ_{n>N} e^{-a n²} <= e^{-aN(N+1)} / (1 - e^{-aN})` with
    /// `a = (π/L)² t`. Fractional: `E_β(-x) <= Γ(1+β)/x` gives `Σ_{n>N} n^{-2} <= 1/N`.
    pub fn tail_bound(&self, kind: KernelKind<R>, t: R) -> R {
        Self::tail_bound_for(self.length, self.n_modes, kind, t)
    }

    pub fn tail_bound_for(length: R, n: usize, kind: KernelKind<R>, t: R) -> R {
        let two_over_l = R::lit(2.0) / length;
        let nf = R::from_usize_lossy(n);
        let a = (R::PI() / length).powi(2) * t;
        match kind {
            KernelKind::Classical => {
                let denom = R::one() - (-a * nf).exp();
                if denom <= R::zero() {
                    return R::infinity();
                }
                two_over_l * (-a * nf * (nf + R::one())).exp() / denom
            }
            KernelKind::Fractional(b) => {
                let b = b.get();
                two_over_l * gamma(R::one() + b) / (a.powf(b) * nf)
            }
        }
    }

    /// Smallest `N` whose tail bound at time `t` is below `tol`.
    pub fn required_modes(length: R, kind: KernelKind<R>, t: R, tol: R) -> usize {
        match kind {
            KernelKind::Fractional(b) => {
                let b = b.get();
                let a = (R::PI() / length).powi(2) * t;
                let n = R::lit(2.0) / length * gamma(R::one() + b) / (a.powf(b) * tol);
                n.ceil().to_usize().unwrap_or(usize::MAX).max(1)
            }
            KernelKind::Classical => {
                let mut n = 1usize;
                while Self::tail_bound_for(length, n, kind, t) > tol {
                    n = if n < 64 { n + 1 } else { n + n / 8 };
                }
                n
            }
        }
    }

    pub fn check_truncation(&self, kind: KernelKind<R>, t: R) -> Result<()> {
        let tail = self.tail_bound(kind, t);
        if tail > self.tail_tol {
            return Err(KernelError::Truncation {
                t: t.as_f64(),
                tail: tail.as_f64(),
                tol: self.tail_tol.as_f64(),
                n_modes: self.n_modes,
                required: Self::required_modes(self.length, kind, t, self.tail_tol),
            });
        }
        Ok(())
    }

    fn check_point(&self, name: &str, x: R) -> Result<()> {
        if !(x >= R::zero() && x <= self.length) {
            return Err(KernelError::Precondition(format!("{name} = {x} outside [0, {}]", self.length)));
        }
        Ok(())
    }

    fn check_time(&self, t: R) -> Result<()> {
        if !(t > R::zero() && t.is_finite()) {
            return Err(KernelError::Precondition(format!("t must be positive, got {t}")));
        }
        Ok(())
    }

    fn contract(&self, weights: &[R], x: R, y: R) -> R {
        let px = self.phi_all(x);
        let py = self.phi_all(y);
        let mut acc = CompensatedSum::new();
        for n in 0..self.n_modes {
            acc.add(weights[n] * px[n] * py[n]);
        }
        acc.value()
    }

    /// Kernel value `Σ_{n<=N} w_n(t) φ_n(x) φ_n(y)`.
    pub fn kernel(&self, kind: KernelKind<R>, t: R, x: R, y: R) -> Result<R> {
        self.check_time(t)?;
        self.check_point("x", x)?;
        self.check_point("y", y)?;
        self.check_truncation(kind, t)?;
        let w = self.mode_weights(kind, t)?;
        // Symmetric by construction: the product is formed in a fixed order.
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Ok(self.contract(&w, a, b))
    }

    /// Classical Dirichlet heat kernel `p_D(t, x, y)`.
    pub fn p_d(&self, t: R, x: R, y: R) -> Result<R> {
        self.kernel(KernelKind::Classical, t, x, y)
    }

    /// Fractional kernel `G_D(t, x, y)`; equals `p_D` when `β = 1`.
    pub fn g_d(&self, beta: FracOrder<R>, t: R, x: R, y: R) -> Result<R> {
        self.kernel(KernelKind::from_order(beta), t, x, y)
    }

    /// Coefficients `⟨u_0, φ_n⟩` by composite Gauss–Legendre quadrature with at
    /// least four nodes per wavelength of the highest retained mode.
    pub fn project(&self, u0: &InitialCondition<R>) -> Projection<R> {
        if let InitialCondition::Mode { k, amplitude } = u0 {
            let mut coefficients = vec![R::zero(); self.n_modes];
            if *k >= 1 && *k <= self.n_modes {
                coefficients[*k - 1] = *amplitude;
            }
            return Projection {
                coefficients,
                l2_norm: amplitude.abs(),
                exact: *k <= self.n_modes,
            };
        }
        const ORDER: usize = 8;
        let (gx, gw) = gauss_legendre::<R>(ORDER);
        let min_panels = (self.n_modes / 2).max(32);
        let mut edges = vec![R::zero()];
        edges.extend(u0.kinks(self.length).into_iter().filter(|&k| k > R::zero() && k < self.length));
        edges.push(self.length);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        let max_width = self.length / R::from_usize_lossy(min_panels);
        let mut acc: Vec<CompensatedSum<R>> = vec![CompensatedSum::new(); self.n_modes];
        let mut norm_sq = CompensatedSum::new();
        for seg in edges.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let pieces = ((b - a) / max_width).ceil().to_usize().unwrap_or(1).max(1);
            let h = (b - a) / R::from_usize_lossy(pieces);
            for p in 0..pieces {
                let lo = a + h * R::from_usize_lossy(p);
                let half = h * R::lit(0.5);
                let mid = lo + half;
                for (xi, wi) in gx.iter().zip(&gw) {
                    let x = mid + half * *xi;
                    let w = half * *wi;
                    let v = u0.eval(self.length, x);
                    if v == R::zero() {
                        continue;
                    }
                    norm_sq.add(w * v * v);
                    for (n, phi) in self.phi_all(x).into_iter().enumerate() {
                        acc[n].add(w * v * phi);
                    }
                }
            }
        }
        Projection {
            coefficients: acc.iter().map(|a| a.value()).collect(),
            l2_norm: norm_sq.value().max(R::zero()).sqrt(),
            exact: false,
        }
    }

    /// Bound on `|Σ_{n>N} c_n w_n(t) φ_n(x)| <= sqrt(2/L) ‖u_0‖₂ (Σ_{n>N} w_n²)^{1/2}`.
    pub fn initial_tail_bound(&self, kind: KernelKind<R>, proj: &Projection<R>, t: R) -> R {
        if proj.exact {
            return R::zero();
        }
        let nf = R::from_usize_lossy(self.n_modes);
        let a = (R::PI() / self.length).powi(2) * t;
        let sum_sq = match kind {
            KernelKind::Classical => {
                let denom = R::one() - (-R::lit(2.0) * a * nf).exp();
                if denom <= R::zero() {
                    R::infinity()
                } else {
                    (-R::lit(2.0) * a * nf * (nf + R::one())).exp() / denom
                }
            }
            KernelKind::Fractional(b) => {
                let c = gamma(R::one() + b.get()) / a.powf(b.get());
                c * c / (R::lit(3.0) * nf * nf * nf)
            }
        };
        self.norm * proj.l2_norm * sum_sq.sqrt()
    }

    /// `(P_D u_0)_t(x)` or `(G_D u_0)_t(x)` from precomputed coefficients.
    pub fn apply_projected(&self, kind: KernelKind<R>, proj: &Projection<R>, t: R, x: R) -> Result<R> {
        self.check_time(t)?;
        self.check_point("x", x)?;
        let tail = self.initial_tail_bound(kind, proj, t);
        if tail > self.tail_tol {
            return Err(KernelError::Truncation {
                t: t.as_f64(),
                tail: tail.as_f64(),
                tol: self.tail_tol.as_f64(),
                n_modes: self.n_modes,
                required: self.n_modes * 2,
            });
        }
        let w = self.mode_weights(kind, t)?;
        let px = self.phi_all(x);
        let mut acc = CompensatedSum::new();
        for n in 0..self.n_modes {
            if proj.coefficients[n] != R::zero() {
                acc.add(proj.coefficients[n] * w[n] * px[n]);
            }
        }
        Ok(acc.value())
    }

    pub fn apply_initial(&self, kind: KernelKind<R>, u0: &InitialCondition<R>, t: R, x: R) -> Result<R> {
        let proj = self.project(u0);
        self.apply_projected(kind, &proj, t, x)
    }

    /// `∂_t` of the kernel, `Σ_{n<=N} ∂_t w_n(t) φ_n(x) φ_n(y)`.
    ///
    /// Tail: complete monotonicity gives `|∂_t w(t)| <= (2/(e t)) w(t/2)`.
    pub fn kernel_dt(&self, kind: KernelKind<R>, t: R, x: R, y: R) -> Result<R> {
        self.check_time(t)?;
        self.check_point("x", x)?;
        self.check_point("y", y)?;
        let tail = R::lit(2.0) / (R::E() * t) * self.tail_bound(kind, t * R::lit(0.5));
        if tail > self.tail_tol {
            return Err(KernelError::Truncation {
                t: t.as_f64(),
                tail: tail.as_f64(),
                tol: self.tail_tol.as_f64(),
                n_modes: self.n_modes,
                required: Self::required_modes(self.length, kind, t * R::lit(0.5), self.tail_tol * R::E() * t / R::lit(2.0)),
            });
        }
        let ml = self.ml(kind)?;
        let w: Vec<R> = self
            .eigenvalues
            .iter()
            .map(|&l| ml_dt_with(&ml, l, t))
            .collect::<std::result::Result<_, _>>()?;
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Ok(self.contract(&w, a, b))
    }

    /// Squared L² increments of the fractional kernel over `[0, t] × [0, L]`:
    ///
    /// * space: `∫_0^t ∫_0^L [G_D(s, x+k, y) - G_D(s, x, y)]² dy ds`
    /// * time:  `∫_0^t ∫_0^L [G_D(s+h, x, y) - G_D(s, x, y)]² dy ds`
    ///
    /// Parseval in `y` reduces both to per-mode time integrals. `eta` is the
    /// Hölder exponent the caller intends to test; it only enters the
    /// preconditions `0 < η < 1` and `η < 1 - β/2`.
    pub fn increment_norms(&self, beta: FracOrder<R>, t: R, x: R, k: R, h: R, eta: R) -> Result<(R, R)> {
        self.check_time(t)?;
        self.check_point("x", x)?;
        self.check_point("x + k", x + k)?;
        if !(h >= R::zero()) {
            return Err(KernelError::Precondition(format!("time shift must be >= 0, got {h}")));
        }
        if !(eta > R::zero() && eta < R::one()) {
            return Err(KernelError::Precondition(format!("eta must lie in (0, 1), got {eta}")));
        }
        let b = beta.get();
        if !(eta < R::one() - b * R::lit(0.5)) {
            return Err(KernelError::Precondition(format!(
                "time increments need eta < 1 - beta/2 = {}, got {eta}",
                R::one() - b * R::lit(0.5)
            )));
        }
        let ml = self.ml(KernelKind::from_order(beta))?;
        let tol = QuadTol::new(R::min_positive_value(), R::lit(1e-9).max(R::epsilon() * R::lit(256.0)));
        let mut space = CompensatedSum::new();
        let mut time = CompensatedSum::new();
        let eval = |l: R, s: R| -> std::result::Result<R, SpecialFnError> {
            if s <= R::zero() {
                return Ok(R::one());
            }
            ml.eval(l * s.powf(b))
        };
        for n in 1..=self.n_modes {
            let l = self.eigenvalue(n);
            let s_star = l.powf(-R::one() / b);
            let mut breaks = vec![R::zero()];
            for f in [R::lit(0.1), R::one(), R::lit(10.0)] {
                let p = s_star * f;
                if p < t {
                    breaks.push(p);
                }
            }
            breaks.push(t);
            let mut err = None;
            if k != R::zero() {
                let d = self.phi(n, x + k) - self.phi(n, x);
                if d != R::zero() {
                    let est = integrate(
                        |s| match eval(l, s) {
                            Ok(v) => v * v,
                            Err(e) => {
                                err.get_or_insert(e);
                                R::zero()
                            }
                        },
                        &breaks,
                        &tol,
                    )
                    .map_err(SpecialFnError::from)?;
                    space.add(d * d * est.value);
                }
            }
            if let Some(e) = err.take() {
                return Err(e.into());
            }
            if h != R::zero() {
                let p = self.phi(n, x);
                if p != R::zero() {
                    let est = integrate(
                        |s| match (eval(l, s + h), eval(l, s)) {
                            (Ok(a), Ok(c)) => (a - c) * (a - c),
                            (Err(e), _) | (_, Err(e)) => {
                                err.get_or_insert(e);
                                R::zero()
                            }
                        },
                        &breaks,
                        &tol,
                    )
                    .map_err(SpecialFnError::from)?;
                    time.add(p * p * est.value);
                }
            }
            if let Some(e) = err {
                return Err(e.into());
            }
        }
        Ok((space.value(), time.value()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn basis(l: f64, n: usize) -> SpectralBasis<f64> {
        build_basis(DomainSpec::new(l, n)).unwrap()
    }

    #[test]
    fn eigenpairs() {
        let b = basis(PI, 3);
        assert!((b.eigenvalue(1) - 1.0).abs() < 1e-15);
        assert!((b.phi(1, PI / 2.0) - (2.0 / PI).sqrt()).abs() < 1e-15);
        let b = basis(1.0, 2);
        assert!((b.eigenvalue(2) - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(b.phi(2, 0.0), 0.0);
        assert_eq!(b.phi(2, 1.0), 0.0);
        assert!(b.eigenvalues().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn phi_all_matches_direct() {
        let b = basis(2.5, 200);
        for &x in &[0.0, 0.3, 1.25, 2.4, 2.5] {
            let all = b.phi_all(x);
            for n in 1..=200 {
                assert!((all[n - 1] - b.phi(n, x)).abs() < 1e-11, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(build_basis(DomainSpec::new(0.0f64, 4)).is_err());
        assert!(build_basis(DomainSpec::new(1.0f64, 0)).is_err());
    }

    #[test]
    fn truncation_error_reports_required_modes() {
        let b = build_basis(DomainSpec::new(PI, 10).with_tail_tol(1e-6)).unwrap();
        let kind = KernelKind::Fractional(FracOrder::new(0.5).unwrap());
        match b.kernel(kind, 1.0, 1.0, 1.0) {
            Err(KernelError::Truncation { required, .. }) => {
                assert!(required > 10);
                let b2 = build_basis(DomainSpec::new(PI, required).with_tail_tol(1e-6)).unwrap();
                assert!(b2.kernel(kind, 1.0, 1.0, 1.0).is_ok());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn classical_required_modes_is_minimal() {
        let kind = KernelKind::<f64>::Classical;
        let n = SpectralBasis::required_modes(PI, kind, 0.01, 1e-10);
        assert!(SpectralBasis::tail_bound_for(PI, n, kind, 0.01) <= 1e-10);
    }

    #[test]
    fn kernels_are_symmetric_and_vanish_on_boundary() {
        let b = build_basis(DomainSpec::new(PI, 4000)).unwrap();
        let beta = FracOrder::new(0.6).unwrap();
        for &(x, y) in &[(0.3, 2.0), (1.0, 1.7), (2.9, 0.1)] {
            assert_eq!(b.g_d(beta, 0.5, x, y).unwrap(), b.g_d(beta, 0.5, y, x).unwrap());
            assert_eq!(b.p_d(0.5, x, y).unwrap(), b.p_d(0.5, y, x).unwrap());
        }
        assert_eq!(b.g_d(beta, 0.5, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(b.p_d(0.5, PI, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn apply_initial_single_mode() {
        let b = basis(PI, 50);
        let u0 = InitialCondition::mode(1);
        let v = b.apply_initial(KernelKind::Classical, &u0, 1.0, PI / 2.0).unwrap();
        assert!((v - (-1.0f64).exp() * (2.0 / PI).sqrt()).abs() < 1e-14);
        let zero = InitialCondition::zero();
        assert_eq!(b.apply_initial(KernelKind::Classical, &zero, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn projection_of_bump_reconstructs_it() {
        let b = basis(PI, 256);
        let u0 = InitialCondition::Bump {
            center: 1.5,
            half_width: 1.0,
            height: 2.0,
        };
        let p = b.project(&u0);
        for &x in &[0.7, 1.5, 2.2] {
            let rec: f64 = (1..=256).map(|n| p.coefficients[n - 1] * b.phi(n, x)).sum();
            assert!((rec - u0.eval(PI, x)).abs() < 1e-6, "x={x} err={}", rec - u0.eval(PI, x));
        }
    }

    #[test]
    fn initial_condition_validation() {
        let l = PI;
        assert!(InitialCondition::<f64>::mode(1).validate(l).is_ok());
        assert!(InitialCondition::<f64>::mode(2).validate(l).is_err());
        let bad = InitialCondition::Bump {
            center: 0.2,
            half_width: 0.5,
            height: 1.0,
        };
        assert!(bad.validate(l).is_err());
        let tab = InitialCondition::Tabulated {
            values: vec![0.0, 1.0, -0.5, 0.0],
        };
        assert!(tab.validate(l).is_err());
    }

    #[test]
    fn increment_norms_vanish_for_zero_shift() {
        let b = basis(PI, 20);
        let beta = FracOrder::new(0.5).unwrap();
        let (s, t) = b.increment_norms(beta, 1.0, PI / 2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(s, 0.0);
        assert_eq!(t, 0.0);
        assert!(b.increment_norms(beta, 1.0, PI / 2.0, 0.1, 0.1, 0.8).is_err());
        assert!(b.increment_norms(beta, 1.0, PI, 0.1, 0.0, 0.5).is_err());
    }
}
