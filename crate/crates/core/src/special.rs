//! Special functions and one-dimensional numerics: Bessel functions of the
//! first kind, gamma-type integrals, adaptive quadrature and bracketed roots.

use crate::error::{Error, Result};

pub use libm::erfc;

/// `Gamma(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Upper incomplete gamma `Gamma(s, x)` for `s` a positive multiple of 1/2.
///
/// Built from `Gamma(1/2, x) = sqrt(pi) erfc(sqrt x)`, `Gamma(1, x) = e^{-x}`
/// and the recurrence `Gamma(s + 1, x) = s Gamma(s, x) + x^s e^{-x}`.
pub fn upper_gamma_half_integer(s: f64, x: f64) -> f64 {
    let twice = (2.0 * s).round();
    assert!(
        twice >= 1.0 && (2.0 * s - twice).abs() < 1e-12,
        "s={s} must be a positive half-integer"
    );
    let (mut a, mut g) = if twice as i64 % 2 == 1 {
        (0.5, std::f64::consts::PI.sqrt() * erfc(x.sqrt()))
    } else {
        (1.0, (-x).exp())
    };
    while a + 0.25 < s {
        g = a * g + x.powf(a) * (-x).exp();
        a += 1.0;
    }
    g
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // omega_n = omega_{n-2} * 2 pi / n, omega_0 = 1, omega_1 = 2.
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = 2 + n % 2;
    while k <= n {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn renorm(a: f64, b: f64) -> Self {
        let hi = a + b;
        Self { hi, lo: b - (hi - a) }
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let v = s - self.hi;
        let e = (self.hi - (s - v)) + (o.hi - v);
        Self::renorm(s, e + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + self.hi * o.lo + self.lo * o.hi;
        Self::renorm(p, e)
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = q1 * b;
        let e = q1.mul_add(b, -p);
        let r = ((self.hi - p) - e + self.lo) / b;
        Self::renorm(q1, r)
    }
}

/// `J_m(x)` by its ascending power series, summed in double-double
/// arithmetic so the cancellation between terms for `x` up to ~20 does not
/// reach double precision.
pub fn bessel_j_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let h = DoubleDouble { hi: half, lo: 0.0 };
    let mut term = DoubleDouble { hi: 1.0, lo: 0.0 };
    for k in 1..=m {
        term = term.mul(h).div_f64(k as f64);
    }
    let sq = half * half;
    let q = DoubleDouble {
        hi: -sq,
        lo: -half.mul_add(half, -sq),
    };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term = term.mul(q).div_f64(k * (k + m as f64));
        sum = sum.add(term);
        if term.hi.abs() <= 1e-33 * sum.hi.abs() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum.hi + sum.lo
}

/// `J_0(x), ..., J_{m_max}(x)` for `x >= 0`.
///
/// Small arguments use the ascending series. Otherwise the sequence comes
/// from Miller's backward recurrence, normalized with
/// `J_0 + 2 (J_2 + J_4 + ...) = 1`.
pub fn bessel_j_sequence(m_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0, "x={x} must be non-negative");
    if x == 0.0 {
        let mut out = vec![0.0; m_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x < 1e-3 {
        return (0..=m_max).map(|m| bessel_j_series(m, x)).collect();
    }
    let top = m_max.max(x.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut out = vec![0.0; m_max + 1];
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next; // J_{k-1}
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
        let idx = k - 1;
        if idx <= m_max {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
    }
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// `J_m(x)` for `x >= 0`.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    bessel_j_sequence(m, x)[m]
}

/// `(J_m(x), J_m'(x))`, using `J_m' = J_{m-1} - (m / x) J_m` and `J_0' = -J_1`.
pub fn bessel_j_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let seq = bessel_j_sequence(m + 1, x);
    let jm = seq[m];
    let d = if m == 0 {
        -seq[1]
    } else {
        0.5 * (seq[m - 1] - seq[m + 1])
    };
    (jm, d)
}

/// Root of `f` in `[a, b]` where `f(a)` and `f(b)` differ in sign.
///
/// Illinois-modified secant steps, falling back to bisection whenever the
/// secant point stalls; stops at relative width `rtol`.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput(format!(
            "no sign change on [{a}, {b}]: f = {flo}, {fhi}"
        )));
    }
    let mut side = 0i8;
    for iter in 0..300 {
        if (hi - lo).abs() <= rtol * lo.abs().max(hi.abs()) {
            break;
        }
        let secant = (lo * fhi - hi * flo) / (fhi - flo);
        let mid = 0.5 * (lo + hi);
        let x = if iter % 4 == 3 || !(secant > lo && secant < hi) {
            mid
        } else {
            secant
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]` to `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    let mut stack = vec![(a, b, abs_tol)];
    let mut total = 0.0;
    while let Some((lo, hi, tol)) = stack.pop() {
        let (value, err) = gauss_kronrod_15(&f, lo, hi);
        if err <= tol || (hi - lo).abs() < 1e-14 * (a.abs() + b.abs() + 1.0) {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol));
            stack.push((mid, hi, 0.5 * tol));
        }
    }
    total
}
