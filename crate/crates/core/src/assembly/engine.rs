//! Panel-pair loop shared by all boundary integral operators.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{BoundaryMesh, Point};
use crate::quadrature::{
    adjacent_points, adjacent_points_reversed, coincident_points, panel_distance,
    unit_gauss_legendre, SingularPoint,
};

use super::QuadratureOrders;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Integrals `∫∫ f_c(x, y) ψ_a(x) ψ_b(y)` of each kernel channel `c` against
/// the two linear shape functions of each panel (`ψ_0` at the start node).
pub(crate) type Block<const N: usize> = [[[Complex64; 2]; 2]; N];

/// Kernel channels evaluated at one quadrature point.
///
/// Arguments are `r = |x - y|`, `d = x - y`, and the normals of the panels
/// carrying `x` and `y`.
pub(crate) trait PairKernel<const N: usize>: Sync {
    fn total(&self, r: f64, d: Point, n_x: Point, n_y: Point) -> [Complex64; N];
    /// `(log coefficients, smooth parts)`
    fn split(&self, r: f64, d: Point, n_x: Point, n_y: Point) -> ([Complex64; N], [Complex64; N]);
    /// Channels that vanish identically when `x` and `y` share a flat panel.
    fn zero_on_self(&self) -> [bool; N];
    /// Channel of the `(P, Q)` block that, transposed, gives channel `c` of
    /// the `(Q, P)` block.
    fn mirror(&self) -> [usize; N];
}

fn shape_products(sigma: f64, tau: f64) -> [[f64; 2]; 2] {
    let p = [1.0 - sigma, sigma];
    let q = [1.0 - tau, tau];
    [[p[0] * q[0], p[0] * q[1]], [p[1] * q[0], p[1] * q[1]]]
}

#[inline]
fn accumulate<const N: usize>(
    blk: &mut Block<N>,
    vals: &[Complex64; N],
    w: f64,
    sigma: f64,
    tau: f64,
) {
    let sp = shape_products(sigma, tau);
    for c in 0..N {
        let v = vals[c] * w;
        for a in 0..2 {
            for b in 0..2 {
                blk[c][a][b] += v * sp[a][b];
            }
        }
    }
}

fn singular_block<const N: usize, K: PairKernel<N>>(
    kernel: &K,
    pts: &[SingularPoint],
    n_x: Point,
    n_y: Point,
) -> Block<N> {
    let mut blk = [[[ZERO; 2]; 2]; N];
    for pt in pts {
        let (c, b) = kernel.split(pt.r, pt.d, n_x, n_y);
        let mut vals = [ZERO; N];
        for ch in 0..N {
            vals[ch] = if pt.w_log != 0.0 {
                c[ch] * pt.w_log
            } else {
                (c[ch] * pt.ell + b[ch]) * pt.w_reg
            };
        }
        accumulate(&mut blk, &vals, 1.0, pt.sigma, pt.tau);
    }
    blk
}

#[allow(clippy::too_many_arguments)]
fn regular_block<const N: usize, K: PairKernel<N>>(
    kernel: &K,
    x0: Point,
    x1: Point,
    y0: Point,
    y1: Point,
    scale: f64,
    order: usize,
    n_x: Point,
    n_y: Point,
) -> Block<N> {
    let (nodes, weights) = unit_gauss_legendre(order);
    let mut blk = [[[ZERO; 2]; 2]; N];
    for (&s, &ws) in nodes.iter().zip(weights) {
        let x = [x0[0] + s * (x1[0] - x0[0]), x0[1] + s * (x1[1] - x0[1])];
        for (&t, &wt) in nodes.iter().zip(weights) {
            let y = [y0[0] + t * (y1[0] - y0[0]), y0[1] + t * (y1[1] - y0[1])];
            let d = [x[0] - y[0], x[1] - y[1]];
            let r = d[0].hypot(d[1]);
            let vals = kernel.total(r, d, n_x, n_y);
            accumulate(&mut blk, &vals, ws * wt * scale, s, t);
        }
    }
    blk
}

/// Computes the block of panel pair `(p, q)`.
pub(crate) fn pair_block<const N: usize, K: PairKernel<N>>(
    mesh: &BoundaryMesh,
    kernel: &K,
    orders: &QuadratureOrders,
    p: usize,
    q: usize,
) -> Result<Block<N>> {
    let n = mesh.n_dof;
    let pp = mesh.panel(p);
    let pq = mesh.panel(q);
    let n_x = mesh.outward_normal[p];
    let n_y = mesh.outward_normal[q];
    if p == q {
        let pts = coincident_points(&pp, orders.singular)?;
        let mut blk = singular_block(kernel, &pts, n_x, n_y);
        for (c, zero) in kernel.zero_on_self().iter().enumerate() {
            if *zero {
                blk[c] = [[ZERO; 2]; 2];
            }
        }
        return Ok(blk);
    }
    if q == (p + 1) % n {
        let pts = adjacent_points(&pp, &pq, orders.singular)?;
        return Ok(singular_block(kernel, &pts, n_x, n_y));
    }
    if p == (q + 1) % n {
        let pts = adjacent_points_reversed(&pp, &pq, orders.singular)?;
        return Ok(singular_block(kernel, &pts, n_x, n_y));
    }
    let lp = mesh.panel_length[p];
    let lq = mesh.panel_length[q];
    let order = if panel_distance(&pp, &pq) < lp.max(lq) {
        orders.near
    } else {
        orders.separated
    };
    Ok(regular_block(
        kernel,
        pp.start,
        pp.end,
        pq.start,
        pq.end,
        lp * lq,
        order,
        n_x,
        n_y,
    ))
}

pub(crate) fn mirror_block<const N: usize>(blk: &Block<N>, mirror: &[usize; N]) -> Block<N> {
    let mut out = [[[ZERO; 2]; 2]; N];
    for c in 0..N {
        let src = &blk[mirror[c]];
        for a in 0..2 {
            for b in 0..2 {
                out[c][b][a] = src[a][b];
            }
        }
    }
    out
}

/// Visits every ordered panel pair with its block, in a fixed order.
///
/// Blocks for `q >= p` are computed (in parallel over `p`) and the `(q, p)`
/// block is derived from the `(p, q)` one by the kernel's mirror relation.
/// `sink` runs on the calling thread, in row order of `p`, so accumulation into
/// global matrices is deterministic regardless of the thread count.
pub(crate) fn for_each_pair<const N: usize, K, F>(
    mesh: &BoundaryMesh,
    kernel: &K,
    orders: &QuadratureOrders,
    mut sink: F,
) -> Result<()>
where
    K: PairKernel<N>,
    F: FnMut(usize, usize, &Block<N>),
{
    let n = mesh.n_dof;
    let mirror = kernel.mirror();
    let chunk = 8 * rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let rows: Vec<Result<Vec<Block<N>>>> = (start..end)
            .into_par_iter()
            .map(|p| {
                (p..n)
                    .map(|q| pair_block(mesh, kernel, orders, p, q))
                    .collect()
            })
            .collect();
        for (p, row) in (start..end).zip(rows) {
            let row = row?;
            for (q, blk) in (p..n).zip(&row) {
                sink(p, q, blk);
                if q != p {
                    sink(q, p, &mirror_block(blk, &mirror));
                }
            }
        }
        start = end;
    }
    Ok(())
}
