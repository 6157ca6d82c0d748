//! Adaptive Gauss–Kronrod quadrature and Gauss–Legendre rules.
//!
//! The adaptive driver is global: every segment lives in one pool and the
//! segment with the largest error estimate is bisected until the summed
//! error meets `max(abs, rel * |value|)`. A final break at `+inf` maps the
//! last segment onto `[0, 1)` with `x = b + s u / (1 - u)`.

use thiserror::Error;

use crate::real::Real;

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_932_359_846,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule for the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol<R> {
    pub abs: R,
    pub rel: R,
    pub max_subdivisions: usize,
}

impl<R: Real> QuadTol<R> {
    pub fn new(abs: R, rel: R) -> Self {
        Self {
            abs,
            rel,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<R> {
    pub value: R,
    pub abs_err: R,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("adaptive quadrature stopped at {value:e} with error estimate {achieved:e} (requested {requested:e})")]
pub struct QuadFailure {
    pub value: f64,
    pub achieved: f64,
    pub requested: f64,
}

#[derive(Debug, Clone, Copy)]
struct Piece<R> {
    a: R,
    b: R,
    value: R,
    err: R,
    splittable: bool,
    tail: Option<(R, R)>,
}

fn gk21<R: Real, F: FnMut(R) -> R>(f: &mut F, a: R, b: R, tail: Option<(R, R)>) -> (R, R) {
    let half = R::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let mut eval = |u: R| -> R {
        match tail {
            None => f(u),
            Some((origin, scale)) => {
                let one_minus = R::one() - u;
                let x = origin + scale * u / one_minus;
                let jac = scale / (one_minus * one_minus);
                let v = f(x);
                if v == R::zero() {
                    R::zero()
                } else {
                    v * jac
                }
            }
        }
    };
    let fc = eval(center);
    let mut kronrod = fc * R::lit(WGK[10]);
    let mut gauss = R::zero();
    for j in 0..10 {
        let dx = radius * R::lit(XGK[j]);
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        kronrod += R::lit(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            gauss += R::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let value = kronrod * radius;
    let err = ((kronrod - gauss) * radius).abs();
    (value, err)
}

/// Integrates `f` over the union of `[breaks[i], breaks[i+1]]`.
///
/// `breaks` must be nondecreasing with at least two entries; the last one may
/// be `+inf`.
pub fn integrate<R, F>(mut f: F, breaks: &[R], tol: &QuadTol<R>) -> Result<Estimate<R>, QuadFailure>
where
    R: Real,
    F: FnMut(R) -> R,
{
    assert!(breaks.len() >= 2, "need at least one segment");
    let mut pool: Vec<Piece<R>> = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !(hi > lo) {
            continue;
        }
        let tail = if hi.is_infinite() {
            let scale = if lo.abs() > R::one() { lo.abs() } else { R::one() };
            Some((lo, scale))
        } else {
            None
        };
        let (a, b) = if tail.is_some() {
            (R::zero(), R::one())
        } else {
            (lo, hi)
        };
        let (value, err) = gk21(&mut f, a, b, tail);
        pool.push(Piece {
            a,
            b,
            value,
            err,
            splittable: true,
            tail,
        });
    }
    let mut subdivisions = pool.len();
    loop {
        let total: R = pool.iter().map(|p| p.value).sum();
        let err: R = pool.iter().map(|p| p.err).sum();
        let target = tol.abs.max(tol.rel * total.abs());
        if !total.is_finite() || !err.is_finite() {
            return Err(QuadFailure {
                value: total.as_f64(),
                achieved: f64::INFINITY,
                requested: target.as_f64(),
            });
        }
        if err <= target {
            return Ok(Estimate {
                value: total,
                abs_err: err,
                subdivisions,
            });
        }
        let worst = pool
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(idx) = worst else {
            return Err(QuadFailure {
                value: total.as_f64(),
                achieved: err.as_f64(),
                requested: target.as_f64(),
            });
        };
        if subdivisions >= tol.max_subdivisions {
            return Err(QuadFailure {
                value: total.as_f64(),
                achieved: err.as_f64(),
                requested: target.as_f64(),
            });
        }
        let piece = pool.swap_remove(idx);
        let mid = R::lit(0.5) * (piece.a + piece.b);
        let width = piece.b - piece.a;
        if !(mid > piece.a && mid < piece.b) || width <= R::epsilon() * R::lit(64.0) * mid.abs() {
            pool.push(Piece {
                splittable: false,
                ..piece
            });
            continue;
        }
        for (a, b) in [(piece.a, mid), (mid, piece.b)] {
            let (value, err) = gk21(&mut f, a, b, piece.tail);
            pool.push(Piece {
                a,
                b,
                value,
                err,
                splittable: true,
                tail: piece.tail,
            });
        }
        subdivisions += 1;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(R::lit).collect(),
        weights.into_iter().map(R::lit).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_high_degree_polynomials() {
        let tol = QuadTol::new(1e-14, 1e-14);
        let est = integrate(|x: f64| x.powi(30), &[0.0, 1.0], &tol).unwrap();
        assert!((est.value - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite_tail() {
        let tol = QuadTol::new(1e-14, 1e-13);
        let est = integrate(|x: f64| (-x).exp(), &[0.0, 1.0, f64::INFINITY], &tol).unwrap();
        assert!((est.value - 1.0).abs() < 1e-13);
        let est = integrate(|x: f64| 1.0 / (1.0 + x * x), &[0.0, f64::INFINITY], &tol).unwrap();
        assert!((est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let tol = QuadTol::new(1e-12, 1e-12);
        let est = integrate(|x: f64| 1.0 / x.sqrt(), &[0.0, 1.0], &tol).unwrap();
        assert!((est.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reports_failure_with_achieved_error() {
        let tol = QuadTol {
            abs: 1e-14,
            rel: 1e-14,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), &[0.0, 10.0], &tol).unwrap_err();
        assert!(err.achieved > err.requested);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two_and_integrate_exactly() {
        for n in [1usize, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre::<f64>(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n={n}");
        }
    }
}
