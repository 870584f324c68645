//! Real-argument cylinder functions of order 0 and 1.
//!
//! The evaluation strategy is split by argument size:
//!
//! - `x <= 4`: ascending power series (no cancellation worth mentioning there);
//! - `4 < x < 25`: Miller's backward recurrence for `J_n`, normalized by
//!   `J_0 + 2 Σ J_2k = 1`, with `Y_0`, `Y_1` from their Neumann series;
//! - `x >= 25`: Hankel's asymptotic expansion, phases formed from `sin x`, `cos x`
//!   so that no argument reduction of `x - π/4` is needed.
//!
//! The modified functions use the power series for `I` up to 20 and the
//! asymptotic expansion beyond, while `K` uses its logarithmic series up to 2 and
//! Temme's continued fraction beyond.
//!
//! Besides the plain values, the "regular parts" `Ŷ_ν(x) = Y_ν(x) - (2/π) ln(x/2) J_ν(x)`
//! and `K̂_0(x) = K_0(x) + ln(x/2) I_0(x)` are exposed, which is what the kernel
//! splitting needs at small arguments.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::BemError;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 4.0;
const ASYMPTOTIC_MIN: f64 = 25.0;
const I_SERIES_MAX: f64 = 20.0;
const K_SERIES_MAX: f64 = 2.0;

/// `J_0, J_1` and the regular parts of `Y_0, Y_1` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSplit {
    pub j0: f64,
    pub j1: f64,
    /// `Y_0(x) - (2/π) ln(x/2) J_0(x)`
    pub y0_reg: f64,
    /// `Y_1(x) - (2/π) ln(x/2) J_1(x)`; contains the `-2/(πx)` pole.
    pub y1_reg: f64,
}

/// `J_0, J_1, Y_0, Y_1` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

fn check_positive(name: &'static str, x: f64) -> Result<(), BemError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(BemError::Domain { function: name, x })
    }
}

fn check_nonnegative(name: &'static str, x: f64) -> Result<(), BemError> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(BemError::Domain { function: name, x })
    }
}

pub fn bessel_j0(x: f64) -> Result<f64, BemError> {
    check_nonnegative("bessel_j0", x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(cylinder_split(x).j0)
}

pub fn bessel_j1(x: f64) -> Result<f64, BemError> {
    check_nonnegative("bessel_j1", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(cylinder_split(x).j1)
}

pub fn bessel_y0(x: f64) -> Result<f64, BemError> {
    check_positive("bessel_y0", x)?;
    Ok(cylinder(x).y0)
}

pub fn bessel_y1(x: f64) -> Result<f64, BemError> {
    check_positive("bessel_y1", x)?;
    Ok(cylinder(x).y1)
}

/// `H_0^(1)(x) = J_0(x) + i Y_0(x)`.
pub fn hankel1_0(x: f64) -> Result<Complex64, BemError> {
    check_positive("hankel1_0", x)?;
    let c = cylinder(x);
    Ok(Complex64::new(c.j0, c.y0))
}

/// `H_1^(1)(x) = J_1(x) + i Y_1(x)`.
pub fn hankel1_1(x: f64) -> Result<Complex64, BemError> {
    check_positive("hankel1_1", x)?;
    let c = cylinder(x);
    Ok(Complex64::new(c.j1, c.y1))
}

pub fn mod_bessel_i0(x: f64) -> Result<f64, BemError> {
    check_nonnegative("mod_bessel_i0", x)?;
    Ok(modified_i(x).0)
}

pub fn mod_bessel_i1(x: f64) -> Result<f64, BemError> {
    check_nonnegative("mod_bessel_i1", x)?;
    Ok(modified_i(x).1)
}

pub fn mod_bessel_k0(x: f64) -> Result<f64, BemError> {
    check_positive("mod_bessel_k0", x)?;
    Ok(modified_k(x).0)
}

pub fn mod_bessel_k1(x: f64) -> Result<f64, BemError> {
    check_positive("mod_bessel_k1", x)?;
    Ok(modified_k(x).1)
}

/// All four ordinary cylinder functions at `x > 0` (unchecked).
pub fn cylinder(x: f64) -> Cylinder {
    if x >= ASYMPTOTIC_MIN {
        return hankel_asymptotic(x);
    }
    let s = cylinder_split(x);
    let lg = FRAC_2_PI * (0.5 * x).ln();
    Cylinder {
        j0: s.j0,
        j1: s.j1,
        y0: lg * s.j0 + s.y0_reg,
        y1: lg * s.j1 + s.y1_reg,
    }
}

/// `J_0, J_1` and the regular parts of `Y_0, Y_1` at `x > 0` (unchecked).
pub fn cylinder_split(x: f64) -> CylinderSplit {
    if x <= SERIES_MAX {
        cylinder_series(x)
    } else if x < ASYMPTOTIC_MIN {
        cylinder_miller(x)
    } else {
        let c = hankel_asymptotic(x);
        let lg = FRAC_2_PI * (0.5 * x).ln();
        CylinderSplit {
            j0: c.j0,
            j1: c.j1,
            y0_reg: c.y0 - lg * c.j0,
            y1_reg: c.y1 - lg * c.j1,
        }
    }
}

fn cylinder_series(x: f64) -> CylinderSplit {
    let z = 0.25 * x * x;
    // term0 = (-z)^k / (k!)^2, term1 = (-z)^k / (k! (k+1)!)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut j0 = 1.0;
    let mut j1s = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut y0s = 0.0; // Σ_{k>=1} (-1)^{k+1} H_k z^k/(k!)^2
                       // ψ(k+1) + ψ(k+2) = -2γ + H_k + H_{k+1}
    let mut y1s = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term0 *= -z / (kf * kf);
        term1 *= -z / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        j0 += term0;
        j1s += term1;
        y0s -= harmonic * term0;
        y1s += (-2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0)) * term1;
        if term0.abs() < 1e-18 * j0.abs().max(1e-300) && term1.abs() < 1e-18 {
            break;
        }
    }
    let j1 = 0.5 * x * j1s;
    CylinderSplit {
        j0,
        j1,
        y0_reg: FRAC_2_PI * (EULER_GAMMA * j0 + y0s),
        y1_reg: -FRAC_2_PI / x - 0.5 * x / PI * y1s,
    }
}

fn cylinder_miller(x: f64) -> CylinderSplit {
    // Start high enough that J_m(x) is below double precision relative to J_0.
    let mut m = (1.5 * x + 30.0).ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0; // J_{n+1}
    let mut jn = 1e-30; // J_n, unnormalized
    let mut norm = 0.0; // J_0 + 2 Σ J_2k
    let mut y0_sum = 0.0; // Σ (-1)^k J_2k / k
    let mut y1_sum = 0.0; // Σ (-1)^k (2k+1)/(k(k+1)) J_{2k+1}
    let mut j1 = 0.0;
    let mut n = m;
    while n > 0 {
        // sums over the current index n (before stepping down)
        if n.is_multiple_of(2) {
            let k = (n / 2) as f64;
            let sign = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            norm += 2.0 * jn;
            y0_sum += sign * jn / k;
        } else if n >= 3 {
            let k = ((n - 1) / 2) as f64;
            let sign = if ((n - 1) / 2).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            y1_sum += sign * (2.0 * k + 1.0) / (k * (k + 1.0)) * jn;
        }
        let jm1 = (n as f64) * two_over_x * jn - jp1;
        jp1 = jn;
        jn = jm1;
        n -= 1;
        if n == 1 {
            j1 = jn;
        }
    }
    let j0_raw = jn;
    norm += j0_raw;
    let scale = 1.0 / norm;
    let j0 = j0_raw * scale;
    let j1 = j1 * scale;
    let y0_sum = y0_sum * scale;
    let y1_sum = y1_sum * scale;
    CylinderSplit {
        j0,
        j1,
        y0_reg: FRAC_2_PI * (EULER_GAMMA * j0 - 2.0 * y0_sum),
        y1_reg: FRAC_2_PI * (-j0 / x + (EULER_GAMMA - 1.0) * j1 - y1_sum),
    }
}

/// Hankel's expansion `P_ν, Q_ν` for ν ∈ {0, 1}.
fn pq_asymptotic(nu: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (nu * nu) as f64;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    // term_k = a_k(ν) / x^k with alternating sign pattern folded in below
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > prev {
            break;
        }
        prev = mag;
        // k odd contributes to Q, even to P; signs (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if mag < 1e-18 {
            break;
        }
    }
    (p, q)
}

fn hankel_asymptotic(x: f64) -> Cylinder {
    let (s, c) = x.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // χ0 = x - π/4, χ1 = x - 3π/4
    let (cos0, sin0) = (r * (c + s), r * (s - c));
    let (cos1, sin1) = (r * (s - c), -r * (s + c));
    let (p0, q0) = pq_asymptotic(0, x);
    let (p1, q1) = pq_asymptotic(1, x);
    Cylinder {
        j0: amp * (p0 * cos0 - q0 * sin0),
        y0: amp * (p0 * sin0 + q0 * cos0),
        j1: amp * (p1 * cos1 - q1 * sin1),
        y1: amp * (p1 * sin1 + q1 * cos1),
    }
}

/// `(I_0(x), I_1(x))` for `x >= 0`.
pub fn modified_i(x: f64) -> (f64, f64) {
    if x <= I_SERIES_MAX {
        let z = 0.25 * x * x;
        let mut t0 = 1.0;
        let mut t1 = 1.0;
        let mut i0 = 1.0;
        let mut i1 = 1.0;
        for k in 1..120 {
            let kf = k as f64;
            t0 *= z / (kf * kf);
            t1 *= z / (kf * (kf + 1.0));
            i0 += t0;
            i1 += t1;
            if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
                break;
            }
        }
        (i0, 0.5 * x * i1)
    } else {
        let scale = x.exp() / (2.0 * PI * x).sqrt();
        (
            scale * i_asymptotic_sum(0, x),
            scale * i_asymptotic_sum(1, x),
        )
    }
}

fn i_asymptotic_sum(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        // (-1)^k a_k(ν)/x^k
        term *= -(mu - odd * odd) / (8.0 * x * k as f64);
        let mag = term.abs();
        if mag > prev {
            break;
        }
        prev = mag;
        sum += term;
        if mag < 1e-18 {
            break;
        }
    }
    sum
}

/// `(K_0(x), K_1(x))` for `x > 0`.
pub fn modified_k(x: f64) -> (f64, f64) {
    if x <= K_SERIES_MAX {
        let (i0, i1) = modified_i(x);
        let lg = (0.5 * x).ln();
        let z = 0.25 * x * x;
        // K0: Σ H_k z^k/(k!)^2 ; K1: Σ (ψ(k+1)+ψ(k+2)) z^k/(k!(k+1)!)
        let mut t0 = 1.0;
        let mut t1 = 1.0;
        let mut h = 0.0;
        let mut s0 = 0.0;
        let mut s1 = -2.0 * EULER_GAMMA + 1.0;
        for k in 1..60 {
            let kf = k as f64;
            t0 *= z / (kf * kf);
            t1 *= z / (kf * (kf + 1.0));
            h += 1.0 / kf;
            s0 += h * t0;
            s1 += (-2.0 * EULER_GAMMA + 2.0 * h + 1.0 / (kf + 1.0)) * t1;
            if t0 < 1e-18 && t1 < 1e-18 {
                break;
            }
        }
        let k0 = -(lg + EULER_GAMMA) * i0 + s0;
        let k1 = 1.0 / x + lg * i1 - 0.25 * x * s1;
        (k0, k1)
    } else {
        k_continued_fraction(x)
    }
}

/// Temme's method (Steed's algorithm on CF2) for order 0 and 1, `x >= 2`.
fn k_continued_fraction(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// `(I_0(x), K̂_0(x))` with `K_0(x) = -ln(x/2) I_0(x) + K̂_0(x)`, for small `x`.
///
/// Above the series range the regular part is formed by addition, which is
/// only sensible while `I_0(x)` stays moderate.
pub fn modified_k0_split(x: f64) -> (f64, f64) {
    if x <= K_SERIES_MAX {
        let z = 0.25 * x * x;
        let mut t0 = 1.0;
        let mut i0 = 1.0;
        let mut h = 0.0;
        let mut s0 = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            t0 *= z / (kf * kf);
            h += 1.0 / kf;
            i0 += t0;
            s0 += h * t0;
            if t0 < 1e-18 {
                break;
            }
        }
        (i0, -EULER_GAMMA * i0 + s0)
    } else {
        let (i0, _) = modified_i(x);
        let (k0, _) = modified_k(x);
        (i0, k0 + (0.5 * x).ln() * i0)
    }
}

/// Orders `0..=n_max` of `J_n(x)` and `Y_n(x)` for `x > 0`.
///
/// `J_n` comes from Miller's downward recurrence normalized by the Neumann sum, `Y_n`
/// from the upward recurrence seeded with `Y_0, Y_1`. Returns `None` when the
/// upward recurrence overflows.
pub fn integer_orders(x: f64, n_max: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let base = cylinder(x);
    let mut y = vec![0.0; n_max + 1];
    y[0] = base.y0;
    if n_max >= 1 {
        y[1] = base.y1;
    }
    for n in 1..n_max {
        y[n + 1] = 2.0 * n as f64 / x * y[n] - y[n - 1];
        if !y[n + 1].is_finite() {
            return None;
        }
    }
    // downward recurrence from well above max(n_max, x), normalized by
    // J_0 + 2 Σ J_2m = 1
    let start = n_max.max(x as usize) + 40 + (2.0 * x.max(1.0)).sqrt() as usize * 4;
    let mut j = vec![0.0; n_max + 1];
    let mut jp1 = 0.0;
    let mut jn = 1e-300;
    let mut norm = if start.is_multiple_of(2) {
        2.0 * jn
    } else {
        0.0
    };
    let mut n = start;
    while n > 0 {
        let jm1 = 2.0 * n as f64 / x * jn - jp1;
        jp1 = jn;
        jn = jm1;
        n -= 1;
        if n <= n_max {
            j[n] = jn;
        }
        if n.is_multiple_of(2) {
            norm += if n == 0 { jn } else { 2.0 * jn };
        }
        if jn.abs() > 1e250 {
            jn *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in j.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    for v in j.iter_mut() {
        *v /= norm;
    }
    j[0] = base.j0;
    if n_max >= 1 {
        j[1] = base.j1;
    }
    Some((j, y))
}

/// Orders `0..=n_max` of `I_n(x)` and `K_n(x)` for `x > 0`.
///
/// `I_n` comes from Miller's downward recurrence normalized by `I_0`, `K_n`
/// from the upward recurrence seeded with `K_0, K_1`. Returns `None` on
/// overflow.
pub fn modified_integer_orders(x: f64, n_max: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let (i0, _) = modified_i(x);
    let (k0, k1) = modified_k(x);
    let mut kn = vec![0.0; n_max + 1];
    kn[0] = k0;
    if n_max >= 1 {
        kn[1] = k1;
    }
    for n in 1..n_max {
        kn[n + 1] = 2.0 * n as f64 / x * kn[n] + kn[n - 1];
        if !kn[n + 1].is_finite() {
            return None;
        }
    }
    let start = n_max.max(x as usize) + 40 + (2.0 * x.max(1.0)).sqrt() as usize * 4;
    let mut inn = vec![0.0; n_max + 1];
    let mut ip1 = 0.0;
    let mut cur = 1e-300;
    let mut n = start;
    while n > 0 {
        let im1 = 2.0 * n as f64 / x * cur + ip1;
        ip1 = cur;
        cur = im1;
        n -= 1;
        if n <= n_max {
            inn[n] = cur;
        }
        if cur > 1e250 {
            cur *= 1e-250;
            ip1 *= 1e-250;
            for v in inn.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let scale = i0 / inn[0];
    if !scale.is_finite() {
        return None;
    }
    for v in inn.iter_mut() {
        *v *= scale;
    }
    Some((inn, kn))
}
