//! Reference evaluations written independently of the library internals.
#![allow(dead_code)]

use num_complex::Complex64;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

/// Neumaier summation.
#[derive(Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `Σ (-x)^k / Γ(βk+1)` and its condition number `Σ|term| / |sum|`.
pub fn ml_series(beta: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (1.0, 1.0);
    }
    let mut acc = Neumaier::default();
    let mut abs = 0.0;
    let lx = x.ln();
    let mut peaked = false;
    let mut prev = f64::INFINITY;
    for k in 0..5000usize {
        let mag = (k as f64 * lx - ln_gamma(beta * k as f64 + 1.0)).exp();
        let term = if k % 2 == 0 { mag } else { -mag };
        acc.add(term);
        abs += mag;
        if mag < prev {
            peaked = true;
        }
        prev = mag;
        if peaked && mag < 1e-18 * acc.value().abs().max(1e-300) && k > 5 {
            break;
        }
    }
    let v = acc.value();
    (v, abs / v.abs())
}

/// `e^{x²} erfc(x)` for `x >= 0`.
pub fn erfcx(x: f64) -> f64 {
    if x < 4.0 {
        return (x * x).exp() * erfc(x);
    }
    // Continued fraction erfcx(x) = (1/√π) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    let mut tail = x;
    for k in (1..200).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    1.0 / (std::f64::consts::PI.sqrt() * tail)
}

/// Fixed-Talbot inversion of `F` at `t`.
pub fn talbot(f: impl Fn(Complex64) -> Complex64, t: f64, m: usize) -> f64 {
    let r = 2.0 * m as f64 / (5.0 * t);
    let mut acc = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let th = k as f64 * std::f64::consts::PI / m as f64;
        let cot = th.cos() / th.sin();
        let s = Complex64::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        let w = Complex64::new(1.0, sigma);
        acc += ((s * t).exp() * f(s) * w).re;
    }
    r / m as f64 * acc
}

/// `E_β(-λ t^β)` by inverting `s^{β-1} / (s^β + λ)`.
pub fn ml_talbot(beta: f64, lambda: f64, t: f64) -> f64 {
    talbot(|s| s.powf(beta - 1.0) / (s.powf(beta) + lambda), t, 32)
}

/// Free heat kernel of `∂_t = ∂_xx`.
pub fn heat(t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt()
}

/// Dirichlet heat kernel on `(0, L)` by the method of images.
pub fn p_d_images(length: f64, t: f64, x: f64, y: f64) -> f64 {
    let reach = (40.0 * t).sqrt() / length + 2.0;
    let kmax = reach.ceil() as i64;
    let mut acc = Neumaier::default();
    for k in -kmax..=kmax {
        let shift = 2.0 * k as f64 * length;
        acc.add(heat(t, x - y + shift));
        acc.add(-heat(t, x + y + shift));
    }
    acc.value()
}

/// Composite Simpson on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = Neumaier::default();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

/// Simpson in `ln s` over `[lo, hi]`: `∫ f(s) ds = ∫ f(e^v) e^v dv`.
pub fn simpson_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    simpson(|v| {
        let s = v.exp();
        f(s) * s
    }, lo.ln(), hi.ln(), n)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
