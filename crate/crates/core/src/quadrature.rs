//! Gauss rules and the panel-pair integration used by Galerkin assembly.
//!
//! Panel pairs come in three flavours. Separated pairs are integrated with a
//! tensor Gauss–Legendre rule on the full kernel. Coincident and adjacent pairs
//! see the `ln r` singularity; there the integrand is written as
//! `c(x, y) ln r + b(x, y)` and the double integral is transformed so that
//! `ln r = ln(singular coordinate) + smooth`, the first term going to the
//! log-weighted Gauss rule and everything else to Gauss–Legendre.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{BemError, Result};
use crate::linalg::eigen::symmetric_tridiagonal_eigen;

pub const MAX_GAUSS_LEGENDRE: usize = 64;
pub const MAX_LOG_GAUSS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Weight 1 on `[-1, 1]`.
    GaussLegendre,
    /// Weight `ln(1/x)` on `[0, 1]`.
    LogGauss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_GAUSS_LEGENDRE {
        return Err(BemError::QuadratureOrder {
            n,
            max: MAX_GAUSS_LEGENDRE,
        });
    }
    Ok(gl_table()[n - 1].clone())
}

/// `n`-point Gauss rule for `∫₀¹ f(x) ln(1/x) dx`, nodes ascending.
pub fn log_gauss(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_LOG_GAUSS {
        return Err(BemError::QuadratureOrder {
            n,
            max: MAX_LOG_GAUSS,
        });
    }
    Ok(log_table()[n - 1].clone())
}

fn gl_table() -> &'static [QuadratureRule] {
    static TABLE: OnceLock<Vec<QuadratureRule>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=MAX_GAUSS_LEGENDRE).map(build_gauss_legendre).collect())
}

fn log_table() -> &'static [QuadratureRule] {
    static TABLE: OnceLock<Vec<QuadratureRule>> = OnceLock::new();
    TABLE.get_or_init(build_log_rules)
}

/// Gauss–Legendre rule mapped to `[0, 1]` as `(nodes, weights)`.
pub(crate) fn unit_gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        gl_table()
            .iter()
            .map(|r| {
                (
                    r.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
                    r.weights.iter().map(|w| 0.5 * w).collect(),
                )
            })
            .collect()
    });
    &table[n.clamp(1, MAX_GAUSS_LEGENDRE) - 1]
}

fn build_gauss_legendre(n: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess for the i-th largest root
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLegendre,
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Builds every log-weighted rule from one Jacobi matrix.
///
/// The weight is discretized on the dyadic intervals `[2^-(m+1), 2^-m]`,
/// `m < 64`, with 64-point Gauss–Legendre on each; on every such interval
/// `ln(1/x)` is analytic well beyond the interval, so the discrete measure
/// reproduces all moments needed here to rounding. Lanczos with full
/// reorthogonalization on `diag(x)` then yields the recurrence coefficients,
/// and Golub–Welsch turns leading blocks into rules.
fn build_log_rules() -> Vec<QuadratureRule> {
    let gl = &gl_table()[63];
    let mut xs = Vec::with_capacity(64 * 64);
    let mut ws = Vec::with_capacity(64 * 64);
    for m in 0..64 {
        let hi = 0.5f64.powi(m);
        let lo = 0.5 * hi;
        let half = 0.5 * (hi - lo);
        for (t, w) in gl.nodes.iter().zip(&gl.weights) {
            let x = lo + half * (1.0 + t);
            xs.push(x);
            ws.push(w * half * (1.0 / x).ln());
        }
    }
    let (alpha, beta) = lanczos_discrete(&xs, &ws, MAX_LOG_GAUSS);
    (1..=MAX_LOG_GAUSS)
        .map(|n| {
            let (vals, vecs) = symmetric_tridiagonal_eigen(&alpha[..n], &beta[..n - 1], true)
                .expect("tridiagonal eigensolver failed on Jacobi matrix");
            let vecs = vecs.unwrap();
            // total mass of the weight is exactly 1
            let weights = (0..n).map(|j| vecs[j] * vecs[j]).collect();
            QuadratureRule {
                nodes: vals,
                weights,
                kind: RuleKind::LogGauss,
            }
        })
        .collect()
}

/// Recurrence coefficients of the orthogonal polynomials of a discrete measure.
fn lanczos_discrete(xs: &[f64], ws: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let len = xs.len();
    let norm: f64 = ws.iter().sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let q0: Vec<f64> = ws.iter().map(|w| w.sqrt() / norm).collect();
    basis.push(q0);
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for j in 0..n {
        let q = &basis[j];
        let mut r: Vec<f64> = (0..len).map(|i| xs[i] * q[i]).collect();
        let a: f64 = r.iter().zip(q).map(|(x, y)| x * y).sum();
        alpha.push(a);
        if j + 1 == n {
            break;
        }
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c: f64 = r.iter().zip(v).map(|(x, y)| x * y).sum();
                for (ri, vi) in r.iter_mut().zip(v) {
                    *ri -= c * vi;
                }
            }
        }
        let b = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        beta.push(b);
        for ri in r.iter_mut() {
            *ri /= b;
        }
        basis.push(r);
    }
    (alpha, beta)
}

/// A straight panel from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl Panel {
    pub fn new(start: [f64; 2], end: [f64; 2]) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        [
            self.start[0] + s * (self.end[0] - self.start[0]),
            self.start[1] + s * (self.end[1] - self.start[1]),
        ]
    }

    fn direction(&self) -> [f64; 2] {
        [self.end[0] - self.start[0], self.end[1] - self.start[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PanelRelation {
    Separated,
    Adjacent,
    Coincident,
}

/// Classifies two panels from shared endpoints (exact comparison).
pub fn panel_relation(x: &Panel, y: &Panel) -> PanelRelation {
    let same_start = x.start == y.start;
    let same_end = x.end == y.end;
    let cross_a = x.end == y.start;
    let cross_b = x.start == y.end;
    if same_start && same_end {
        PanelRelation::Coincident
    } else if [same_start, same_end, cross_a, cross_b]
        .iter()
        .filter(|&&b| b)
        .count()
        >= 1
    {
        PanelRelation::Adjacent
    } else {
        PanelRelation::Separated
    }
}

/// Minimum distance between two segments.
pub fn panel_distance(x: &Panel, y: &Panel) -> f64 {
    fn point_segment(p: [f64; 2], s: &Panel) -> f64 {
        let d = s.direction();
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = (((p[0] - s.start[0]) * d[0] + (p[1] - s.start[1]) * d[1]) / len2).clamp(0.0, 1.0);
        let q = s.point(t);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }
    fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    }
    let d1 = cross(x.start, x.end, y.start);
    let d2 = cross(x.start, x.end, y.end);
    let d3 = cross(y.start, y.end, x.start);
    let d4 = cross(y.start, y.end, x.end);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment(x.start, y)
        .min(point_segment(x.end, y))
        .min(point_segment(y.start, x))
        .min(point_segment(y.end, x))
}

/// One node of a singular panel-pair rule.
///
/// Reference coordinates `sigma` on the first panel and `tau` on the second run
/// from start to end. `d = x - y` and `r = |d|` are formed from the relative
/// coordinates so that they keep full precision near the singularity. The pair
/// integral of `c ln r + b` is `Σ w_log c + w_reg (c ell + b)`; arclength
/// Jacobians are folded into the weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub sigma: f64,
    pub tau: f64,
    pub d: [f64; 2],
    pub r: f64,
    pub w_log: f64,
    pub w_reg: f64,
    pub ell: f64,
}

/// Rule for `x` and `y` on the same panel.
pub fn coincident_points(p: &Panel, order: usize) -> Result<Vec<SingularPoint>> {
    let lg = log_gauss(order.min(MAX_LOG_GAUSS))?;
    let (gn, gw) = unit_gauss_legendre(order);
    let len = p.length();
    let t = p.direction();
    let unit = [t[0] / len, t[1] / len];
    let area = len * len;
    let ln_len = len.ln();
    let mut pts = Vec::with_capacity(2 * (lg.len() + gn.len()) * gn.len());
    // u = |sigma - tau|, the smaller coordinate = (1 - u) v
    let mut push = |u: f64, v: f64, w_log: f64, w_reg: f64, ell: f64| {
        let lo = (1.0 - u) * v;
        let hi = lo + u;
        let d = [u * len * unit[0], u * len * unit[1]];
        // sigma > tau: x - y = +u L t
        pts.push(SingularPoint {
            sigma: hi,
            tau: lo,
            d,
            r: u * len,
            w_log,
            w_reg,
            ell,
        });
        pts.push(SingularPoint {
            sigma: lo,
            tau: hi,
            d: [-d[0], -d[1]],
            r: u * len,
            w_log,
            w_reg,
            ell,
        });
    };
    for (&u, &wu) in lg.nodes.iter().zip(&lg.weights) {
        for (&v, &wv) in gn.iter().zip(gw) {
            push(u, v, -wu * wv * (1.0 - u) * area, 0.0, 0.0);
        }
    }
    for (&u, &wu) in gn.iter().zip(gw) {
        for (&v, &wv) in gn.iter().zip(gw) {
            push(u, v, 0.0, wu * wv * (1.0 - u) * area, ln_len);
        }
    }
    Ok(pts)
}

/// Rule for panels sharing one node, `p.end == q.start`.
///
/// With `a = 1 - sigma` and `b = tau` the distance is
/// `r = |a L_p t_p + b L_q t_q|`; the square is cut along its diagonal and on
/// each half the larger coordinate becomes the singular variable.
pub fn adjacent_points(p: &Panel, q: &Panel, order: usize) -> Result<Vec<SingularPoint>> {
    let lg = log_gauss(order.min(MAX_LOG_GAUSS))?;
    let (gn, gw) = unit_gauss_legendre(order);
    let tp = p.direction();
    let tq = q.direction();
    let scale = p.length() * q.length();
    let mut pts = Vec::with_capacity(2 * (lg.len() + gn.len()) * gn.len());
    for half in 0..2 {
        for (&w, &ww) in gn.iter().zip(gw) {
            // offset per unit of the singular coordinate
            let e = if half == 0 {
                [tp[0] + w * tq[0], tp[1] + w * tq[1]]
            } else {
                [w * tp[0] + tq[0], w * tp[1] + tq[1]]
            };
            let rho = e[0].hypot(e[1]);
            let ell = rho.ln();
            let mut push = |s: f64, w_log: f64, w_reg: f64, ell: f64| {
                let (a, b) = if half == 0 { (s, s * w) } else { (s * w, s) };
                pts.push(SingularPoint {
                    sigma: 1.0 - a,
                    tau: b,
                    d: [-s * e[0], -s * e[1]],
                    r: s * rho,
                    w_log,
                    w_reg,
                    ell,
                });
            };
            for (&s, &ws) in lg.nodes.iter().zip(&lg.weights) {
                push(s, -ws * ww * s * scale, 0.0, 0.0);
            }
            for (&s, &ws) in gn.iter().zip(gw) {
                push(s, 0.0, ws * ww * s * scale, ell);
            }
        }
    }
    Ok(pts)
}

/// Rule for panels sharing one node, `p.start == q.end`: the mirror image of
/// [`adjacent_points`] with the roles of the panels exchanged.
pub fn adjacent_points_reversed(p: &Panel, q: &Panel, order: usize) -> Result<Vec<SingularPoint>> {
    let mut pts = adjacent_points(q, p, order)?;
    for pt in pts.iter_mut() {
        std::mem::swap(&mut pt.sigma, &mut pt.tau);
        pt.d = [-pt.d[0], -pt.d[1]];
    }
    Ok(pts)
}

/// `∫_X ∫_Y [f_log(x, y) ln|x - y| + f_smooth(x, y)] ds(y) ds(x)`.
///
/// `relation` must agree with the shared-node topology of the two panels.
/// Separated pairs use an `order × order` tensor Gauss–Legendre rule on the
/// combined integrand; singular pairs use the transformed rules above.
pub fn panel_pair_integrate<FL, FS>(
    f_log: FL,
    f_smooth: FS,
    x: &Panel,
    y: &Panel,
    relation: PanelRelation,
    order: usize,
) -> Result<Complex64>
where
    FL: Fn([f64; 2], [f64; 2]) -> Complex64,
    FS: Fn([f64; 2], [f64; 2]) -> Complex64,
{
    let actual = panel_relation(x, y);
    if actual != relation {
        return Err(BemError::Topology(format!(
            "panels declared {relation:?} but share nodes as {actual:?}"
        )));
    }
    if order == 0 || order > MAX_GAUSS_LEGENDRE {
        return Err(BemError::QuadratureOrder {
            n: order,
            max: MAX_GAUSS_LEGENDRE,
        });
    }
    let eval_singular = |pts: Vec<SingularPoint>| {
        pts.iter()
            .map(|pt| {
                let px = x.point(pt.sigma);
                let py = y.point(pt.tau);
                let c = f_log(px, py);
                if pt.w_log != 0.0 {
                    c * pt.w_log
                } else {
                    (c * pt.ell + f_smooth(px, py)) * pt.w_reg
                }
            })
            .sum::<Complex64>()
    };
    match relation {
        PanelRelation::Separated => {
            let (gn, gw) = unit_gauss_legendre(order);
            let scale = x.length() * y.length();
            let mut acc = Complex64::new(0.0, 0.0);
            for (&s, &ws) in gn.iter().zip(gw) {
                let px = x.point(s);
                for (&t, &wt) in gn.iter().zip(gw) {
                    let py = y.point(t);
                    let r = (px[0] - py[0]).hypot(px[1] - py[1]);
                    acc += (f_log(px, py) * r.ln() + f_smooth(px, py)) * (ws * wt);
                }
            }
            Ok(acc * scale)
        }
        PanelRelation::Coincident => Ok(eval_singular(coincident_points(x, order)?)),
        PanelRelation::Adjacent => {
            let pts = if x.end == y.start {
                adjacent_points(x, y, order)?
            } else if x.start == y.end {
                adjacent_points_reversed(x, y, order)?
            } else {
                return Err(BemError::Topology(
                    "adjacent panels must meet end to start".into(),
                ));
            };
            Ok(eval_singular(pts))
        }
    }
}
