//! Mittag-Leffler function on the negative real axis, stable subordinator
//! densities and the Laplace identities that tie them together.
//!
//! `E_β(-x)` is evaluated in three regimes:
//!
//! * alternating power series `Σ (-x)^k / Γ(1+βk)` while `x^{1/β}` is small,
//! * the real-axis integral obtained by collapsing the Hankel contour of the
//!   Laplace inversion onto the negative real axis,
//!   `E_β(-x) = sin(βπ)/(πβ) ∫_0^∞ exp(-(xw)^{1/β}) / (w² + 2w cos βπ + 1) dw`,
//! * the asymptotic series `Σ_{k≥1} (-1)^{k+1} x^{-k} / Γ(1-βk)` for large `x`.

use thiserror::Error;

use crate::quad::{integrate, QuadFailure, QuadTol};
use crate::real::{CompensatedSum, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("{name} = {value} outside admissible domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("invalid evaluation policy: {0}")]
    Policy(String),
    #[error(transparent)]
    Quadrature(#[from] QuadFailure),
}

pub type Result<T> = std::result::Result<T, SpecialFnError>;

fn domain<R: Real>(name: &'static str, value: R, domain: &'static str) -> SpecialFnError {
    SpecialFnError::Domain {
        name,
        value: value.as_f64(),
        domain,
    }
}

/// Fractional order `β ∈ (0, 1]`; `β = 1` is the classical heat equation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder<R>(R);

impl<R: Real> FracOrder<R> {
    pub fn new(beta: R) -> Result<Self> {
        if beta > R::zero() && beta <= R::one() {
            Ok(Self(beta))
        } else {
            Err(domain("beta", beta, "(0, 1]"))
        }
    }

    pub fn classical() -> Self {
        Self(R::one())
    }

    #[inline]
    pub fn get(self) -> R {
        self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == R::one()
    }
}

/// Regime switches and tolerances for the special-function evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPolicy<R> {
    /// The power series is used while `x^{1/β} <= series_cutoff`.
    pub series_cutoff: R,
    /// The asymptotic series is used for `x >= asymptotic_cutoff`.
    pub asymptotic_cutoff: R,
    pub series_terms_max: usize,
    pub quadrature_abs_tol: R,
    pub quadrature_rel_tol: R,
}

impl<R: Real> Default for EvalPolicy<R> {
    fn default() -> Self {
        Self {
            series_cutoff: R::lit(5.0),
            asymptotic_cutoff: R::lit(50.0),
            series_terms_max: 600,
            quadrature_abs_tol: R::lit(1e-30),
            // 1e-13 in double precision, a few hundred ulps in single.
            quadrature_rel_tol: R::lit(1e-13).max(R::epsilon() * R::lit(256.0)),
        }
    }
}

impl<R: Real> EvalPolicy<R> {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_cutoff > R::zero() && self.series_cutoff < self.asymptotic_cutoff) {
            return Err(SpecialFnError::Policy(format!(
                "need 0 < series_cutoff ({}) < asymptotic_cutoff ({})",
                self.series_cutoff, self.asymptotic_cutoff
            )));
        }
        if !(self.quadrature_abs_tol > R::zero() && self.quadrature_rel_tol > R::zero()) {
            return Err(SpecialFnError::Policy("quadrature tolerances must be positive".into()));
        }
        if self.series_terms_max < 2 {
            return Err(SpecialFnError::Policy("series_terms_max must be at least 2".into()));
        }
        Ok(())
    }

    pub(crate) fn quad_tol(&self) -> QuadTol<R> {
        QuadTol::new(self.quadrature_abs_tol, self.quadrature_rel_tol)
    }
}

// ---------------------------------------------------------------------------
// Gamma function

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi<R: Real>(x: R) -> R {
    let two = R::lit(2.0);
    let mut r = x - two * (x / two).floor();
    // r in [0, 2)
    let mut sign = R::one();
    if r >= R::one() {
        r -= R::one();
        sign = -sign;
    }
    if r == R::zero() {
        return R::zero();
    }
    if r > R::lit(0.5) {
        r = R::one() - r;
    }
    sign * (R::PI() * r).sin()
}

fn lanczos_positive<R: Real>(x: R) -> R {
    // valid for x >= 0.5
    let xm1 = x - R::one();
    let mut a = R::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += R::lit(c) / (xm1 + R::from_usize_lossy(i));
    }
    let t = xm1 + R::lit(LANCZOS_G + 0.5);
    let half_pow = (xm1 + R::lit(0.5)) * R::lit(0.5);
    let p = t.powf(half_pow);
    (R::TAU()).sqrt() * p * (-t).exp() * p * a
}

/// Euler gamma function (Lanczos approximation with reflection).
pub fn gamma<R: Real>(x: R) -> R {
    if x.is_nan() {
        return x;
    }
    if x <= R::zero() && x == x.floor() {
        return R::nan();
    }
    if x < R::lit(0.5) {
        R::PI() / (sin_pi(x) * lanczos_positive(R::one() - x))
    } else {
        lanczos_positive(x)
    }
}

/// `1/Γ(x)`, an entire function: exact zeros at `0, -1, -2, ...`.
pub fn recip_gamma<R: Real>(x: R) -> R {
    if x <= R::zero() && x == x.floor() {
        return R::zero();
    }
    if x < R::lit(0.5) {
        sin_pi(x) * lanczos_positive(R::one() - x) / R::PI()
    } else {
        let g = lanczos_positive(x);
        if g.is_infinite() {
            R::zero()
        } else {
            R::one() / g
        }
    }
}

// ---------------------------------------------------------------------------
// Mittag-Leffler

/// Reusable evaluator for `E_β(-x)` at a fixed order; coefficient tables are
/// built once and never mutated.
#[derive(Debug, Clone)]
pub struct MittagLeffler<R> {
    beta: R,
    policy: EvalPolicy<R>,
    series_limit: R,
    series_coef: Vec<R>,
    asym_coef: Vec<R>,
    prefactor: R,
    cos_bp: R,
}

impl<R: Real> MittagLeffler<R> {
    pub fn new(beta: FracOrder<R>, policy: EvalPolicy<R>) -> Result<Self> {
        policy.validate()?;
        let b = beta.get();
        let n = policy.series_terms_max;
        let series_coef = (0..n)
            .map(|k| recip_gamma(R::one() + b * R::from_usize_lossy(k)))
            .collect();
        let asym_coef = (1..=n)
            .map(|k| recip_gamma(R::one() - b * R::from_usize_lossy(k)))
            .collect();
        // The alternating series loses about x^{1/β}/ln 10 digits.
        let series_limit = policy.series_cutoff.powf(b).min(policy.series_cutoff);
        Ok(Self {
            beta: b,
            policy,
            series_limit,
            series_coef,
            asym_coef,
            prefactor: (b * R::PI()).sin() / (R::PI() * b),
            cos_bp: (b * R::PI()).cos(),
        })
    }

    pub fn beta(&self) -> R {
        self.beta
    }

    pub fn policy(&self) -> &EvalPolicy<R> {
        &self.policy
    }

    /// `E_β(-x)` for `x >= 0`.
    pub fn eval(&self, x: R) -> Result<R> {
        if !(x >= R::zero()) {
            return Err(domain("x", x, "[0, inf)"));
        }
        if self.beta == R::one() {
            return Ok((-x).exp());
        }
        if x == R::zero() {
            return Ok(R::one());
        }
        if x <= self.series_limit {
            Ok(self.series(x))
        } else if x >= self.policy.asymptotic_cutoff {
            Ok(self.asymptotic(x))
        } else {
            self.contour(x)
        }
    }

    /// `d/dx E_β(-x)` for `x >= 0` (a nonpositive number).
    pub fn eval_deriv(&self, x: R) -> Result<R> {
        if !(x >= R::zero()) {
            return Err(domain("x", x, "[0, inf)"));
        }
        if self.beta == R::one() {
            return Ok(-(-x).exp());
        }
        if x == R::zero() {
            return Ok(-self.series_coef[1]);
        }
        if x <= self.series_limit {
            Ok(self.series_deriv(x))
        } else if x >= self.policy.asymptotic_cutoff {
            Ok(self.asymptotic_deriv(x))
        } else {
            self.contour_deriv(x)
        }
    }

    pub(crate) fn series(&self, x: R) -> R {
        let mut acc = CompensatedSum::new();
        let mut pow = R::one();
        let mut prev = R::infinity();
        for (k, &c) in self.series_coef.iter().enumerate() {
            let term = if k % 2 == 0 { pow * c } else { -pow * c };
            acc.add(term);
            let mag = term.abs();
            if k > 2 && mag < prev && mag <= R::epsilon() * R::lit(1e-3) * acc.value().abs() {
                break;
            }
            prev = mag;
            pow *= x;
        }
        acc.value()
    }

    fn series_deriv(&self, x: R) -> R {
        let mut acc = CompensatedSum::new();
        let mut pow = R::one();
        let mut prev = R::infinity();
        for k in 1..self.series_coef.len() {
            let kk = R::from_usize_lossy(k);
            let mag_term = kk * pow * self.series_coef[k];
            let term = if k % 2 == 1 { -mag_term } else { mag_term };
            acc.add(term);
            let mag = term.abs();
            if k > 3 && mag < prev && mag <= R::epsilon() * R::lit(1e-3) * acc.value().abs() {
                break;
            }
            prev = mag;
            pow *= x;
        }
        acc.value()
    }

    /// Optimally truncated asymptotic expansion: stop at machine precision or
    /// once the (nonzero) terms start growing.
    pub(crate) fn asymptotic(&self, x: R) -> R {
        let inv = R::one() / x;
        let mut acc = CompensatedSum::new();
        let mut pow = inv;
        let mut prev = R::infinity();
        for (i, &c) in self.asym_coef.iter().enumerate() {
            let k = i + 1;
            let term = if k % 2 == 1 { pow * c } else { -pow * c };
            let mag = term.abs();
            if mag != R::zero() {
                if mag > prev {
                    break;
                }
                acc.add(term);
                if mag <= R::epsilon() * R::lit(1e-3) * acc.value().abs() {
                    break;
                }
                prev = mag;
            }
            pow *= inv;
            if pow == R::zero() {
                break;
            }
        }
        acc.value()
    }

    fn asymptotic_deriv(&self, x: R) -> R {
        let inv = R::one() / x;
        let mut acc = CompensatedSum::new();
        let mut pow = inv * inv;
        let mut prev = R::infinity();
        for (i, &c) in self.asym_coef.iter().enumerate() {
            let k = i + 1;
            let mag_term = R::from_usize_lossy(k) * pow * c;
            let term = if k % 2 == 1 { -mag_term } else { mag_term };
            let mag = term.abs();
            if mag != R::zero() {
                if mag > prev {
                    break;
                }
                acc.add(term);
                if mag <= R::epsilon() * R::lit(1e-3) * acc.value().abs() {
                    break;
                }
                prev = mag;
            }
            pow *= inv;
            if pow == R::zero() {
                break;
            }
        }
        acc.value()
    }

    fn contour_breaks(&self, x: R) -> Vec<R> {
        let inv_beta = R::one() / self.beta;
        // exp(-(xw)^{1/β}) falls below e^{-45} for w beyond this point
        let w_cut = R::lit(45.0).powf(self.beta) / x;
        let mut br = vec![R::zero(), R::one() / x, w_cut, R::one()];
        let _ = inv_beta;
        br.sort_by(|a, b| a.partial_cmp(b).unwrap());
        br.dedup();
        br.push(R::infinity());
        br
    }

    pub(crate) fn contour(&self, x: R) -> Result<R> {
        let inv_beta = R::one() / self.beta;
        let two_cos = R::lit(2.0) * self.cos_bp;
        let f = |w: R| {
            let e = (-(x * w).powf(inv_beta)).exp();
            if e == R::zero() {
                R::zero()
            } else {
                e / (w * w + two_cos * w + R::one())
            }
        };
        let est = integrate(f, &self.contour_breaks(x), &self.policy.quad_tol())?;
        Ok(self.prefactor * est.value)
    }

    fn contour_deriv(&self, x: R) -> Result<R> {
        let inv_beta = R::one() / self.beta;
        let two_cos = R::lit(2.0) * self.cos_bp;
        let f = |w: R| {
            let s = (x * w).powf(inv_beta);
            let e = (-s).exp();
            if e == R::zero() {
                R::zero()
            } else {
                // w^{1/β} x^{1/β - 1} = s / x
                s * e / (w * w + two_cos * w + R::one())
            }
        };
        let est = integrate(f, &self.contour_breaks(x), &self.policy.quad_tol())?;
        Ok(-self.prefactor * inv_beta * est.value / x)
    }
}

/// `E_β(-x)` with the default policy.
pub fn ml_neg<R: Real>(beta: FracOrder<R>, x: R) -> Result<R> {
    ml_neg_with(beta, x, &EvalPolicy::default())
}

pub fn ml_neg_with<R: Real>(beta: FracOrder<R>, x: R, policy: &EvalPolicy<R>) -> Result<R> {
    MittagLeffler::new(beta, *policy)?.eval(x)
}

/// `d/dt E_β(-λ t^β)`.
pub fn ml_dt<R: Real>(beta: FracOrder<R>, lam: R, t: R) -> Result<R> {
    ml_dt_with(&MittagLeffler::new(beta, EvalPolicy::default())?, lam, t)
}

pub fn ml_dt_with<R: Real>(ml: &MittagLeffler<R>, lam: R, t: R) -> Result<R> {
    if !(t > R::zero()) {
        return Err(domain("t", t, "(0, inf)"));
    }
    if !(lam >= R::zero()) {
        return Err(domain("lambda", lam, "[0, inf)"));
    }
    if lam == R::zero() {
        return Ok(R::zero());
    }
    let b = ml.beta();
    let tb = t.powf(b);
    Ok(ml.eval_deriv(lam * tb)? * lam * b * tb / t)
}

/// Laplace transform `∫_0^∞ e^{-θt} E_β(-λ t^β) dt = θ^{β-1} / (θ^β + λ)`.
pub fn laplace_ml<R: Real>(beta: FracOrder<R>, lam: R, theta: R) -> Result<R> {
    if !(theta > R::zero()) {
        return Err(domain("theta", theta, "(0, inf)"));
    }
    if !(lam >= R::zero()) {
        return Err(domain("lambda", lam, "[0, inf)"));
    }
    let b = beta.get();
    Ok(theta.powf(b - R::one()) / (theta.powf(b) + lam))
}

/// `ln(sin x / x)` for `0 <= x < π`.
fn ln_sinc<R: Real>(x: R) -> R {
    if x < R::lit(0.5) {
        // (sin x - x) / x by its Taylor series, then ln1p.
        let x2 = x * x;
        let mut term = -x2 / R::lit(6.0);
        let mut acc = term;
        let mut k = 1usize;
        while term.abs() > R::epsilon() * acc.abs() * R::lit(0.01) && k < 30 {
            let a = R::from_usize_lossy(2 * k + 2);
            let b = R::from_usize_lossy(2 * k + 3);
            term = -term * x2 / (a * b);
            acc += term;
            k += 1;
        }
        acc.ln_1p()
    } else {
        (x.sin() / x).ln()
    }
}

// ---------------------------------------------------------------------------
// Stable subordinator

/// Density of the one-sided β-stable law with Laplace transform `exp(-s^β)`,
/// via Zolotarev's integral representation
/// `g(u) = β/(1-β) u^{-1/(1-β)} π^{-1} ∫_0^π A(φ) exp(-u^{-β/(1-β)} A(φ)) dφ`
/// with `A(φ) = [sin(βφ)^β sin((1-β)φ)^{1-β} / sin φ]^{1/(1-β)}`.
#[derive(Debug, Clone)]
pub struct StableSubordinator<R> {
    beta: R,
    policy: EvalPolicy<R>,
    ln_a_min: R,
}

impl<R: Real> StableSubordinator<R> {
    pub fn new(beta: FracOrder<R>, policy: EvalPolicy<R>) -> Result<Self> {
        policy.validate()?;
        let b = beta.get();
        if b >= R::one() {
            return Err(domain("beta", b, "(0, 1)"));
        }
        let one_m = R::one() - b;
        let ln_a_min = b / one_m * b.ln() + one_m.ln();
        Ok(Self {
            beta: b,
            policy,
            ln_a_min,
        })
    }

    pub fn beta(&self) -> R {
        self.beta
    }

    /// `ln A(φ) - ln A(0)` in the reflected variable `ψ = π - φ`. Written
    /// through `ln(sin x / x)` so it keeps full relative accuracy as `φ → 0`,
    /// where the small-`u` integrand concentrates.
    fn ln_a_rel(&self, psi: R) -> R {
        self.ln_a_rel2(R::PI() - psi, psi)
    }

    /// Same, from both `φ` and `ψ = π - φ` so neither end loses digits.
    fn ln_a_rel2(&self, phi: R, psi: R) -> R {
        let b = self.beta;
        let one_m = R::one() - b;
        // sin φ = sin ψ; evaluate at the smaller argument.
        let ln_sinc_phi = if phi <= psi {
            ln_sinc(phi)
        } else {
            (psi.sin() / phi).ln()
        };
        (b * ln_sinc(b * phi) + one_m * ln_sinc(one_m * phi) - ln_sinc_phi) / one_m
    }

    fn ln_a(&self, psi: R) -> R {
        self.ln_a_min + self.ln_a_rel(psi)
    }

    /// `ln g_β(u)`; `-inf` where the density underflows.
    pub fn ln_density(&self, u: R) -> Result<R> {
        if !(u > R::zero()) {
            return Err(domain("u", u, "(0, inf)"));
        }
        let b = self.beta;
        let one_m = R::one() - b;
        let ln_u = u.ln();
        let ln_eps = -b / one_m * ln_u;
        let eps = ln_eps.exp();

        let (shift, psi_star) = if ln_eps + self.ln_a_min >= R::zero() {
            (self.ln_a_min - (self.ln_a_min + ln_eps).exp(), None)
        } else {
            // A is decreasing in ψ; bisect ln A(ψ) = -ln ε in log ψ.
            let target = -ln_eps;
            let mut lo = R::lit(1e-300).max(R::min_positive_value()).ln();
            let mut hi = R::PI().ln();
            for _ in 0..200 {
                let mid = R::lit(0.5) * (lo + hi);
                if self.ln_a(mid.exp()) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < R::epsilon() {
                    break;
                }
            }
            (target - R::one(), Some((R::lit(0.5) * (lo + hi)).exp()))
        };

        let c = (ln_eps + self.ln_a_min).exp();
        let integrand = |psi: R| {
            let expo = if psi_star.is_none() {
                // Variable is φ here. Relative to the maximum at φ = 0: d - ε A(0) (e^d - 1).
                let d = self.ln_a_rel2(psi, R::PI() - psi);
                d - c * d.exp_m1()
            } else {
                let la = self.ln_a(psi);
                la - eps * la.exp() - shift
            };
            if expo < R::lit(-745.0) {
                R::zero()
            } else {
                expo.exp()
            }
        };
        let mut breaks = vec![R::zero()];
        if let Some(ps) = psi_star {
            let mut p = ps / R::lit(8.0);
            while p < R::PI() {
                breaks.push(p);
                p = p * R::lit(2.0);
            }
        }
        if psi_star.is_none() {
            // Peak at φ = 0 of width ~ (ε A_min)^{-1/2}.
            let mut w = c.sqrt().recip();
            while w < R::PI() {
                breaks.push(w);
                w = w * R::lit(4.0);
            }
        }
        breaks.push(R::PI());
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let tol = QuadTol::new(R::min_positive_value(), self.policy.quadrature_rel_tol);
        let est = integrate(integrand, &breaks, &tol)?;
        if est.value <= R::zero() {
            return Ok(R::neg_infinity());
        }
        Ok((b / one_m).ln() - ln_u / one_m - R::PI().ln() + shift + est.value.ln())
    }

    pub fn density(&self, u: R) -> Result<R> {
        Ok(self.ln_density(u)?.exp())
    }

    /// Density `f_t(s)` of the inverse subordinator `E_t`, obtained from
    /// `f_t(s) = (t/β) s^{-1-1/β} g_β(t s^{-1/β})`.
    pub fn inverse_density(&self, t: R, s: R) -> Result<R> {
        if !(t > R::zero()) {
            return Err(domain("t", t, "(0, inf)"));
        }
        if !(s > R::zero()) {
            return Err(domain("s", s, "(0, inf)"));
        }
        let b = self.beta;
        let inv_b = R::one() / b;
        let ln_s = s.ln();
        let ln_u = t.ln() - inv_b * ln_s;
        let ln_g = self.ln_density(ln_u.exp())?;
        Ok(((t / b).ln() - (R::one() + inv_b) * ln_s + ln_g).exp())
    }
}

/// `g_β(u)`, density at time 1 of the β-stable subordinator (`0 < β < 1`).
pub fn stable_density<R: Real>(beta: FracOrder<R>, u: R) -> Result<R> {
    StableSubordinator::new(beta, EvalPolicy::default())?.density(u)
}

/// `f_t(s)`, density of the inverse β-stable subordinator at time `t`.
pub fn inv_sub_density<R: Real>(beta: FracOrder<R>, t: R, s: R) -> Result<R> {
    StableSubordinator::new(beta, EvalPolicy::default())?.inverse_density(t, s)
}
