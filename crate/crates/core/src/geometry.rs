//! Benchmark boundary curves and wavelength-resolved meshes on them.
//!
//! A curve is a cyclic chain of analytic pieces. Its global parameter is the
//! concatenation of the pieces' own parameter ranges: arcs keep their angle
//! parameter (so the circle at `t` is `(cos t, sin t)`), straight segments run
//! over a unit interval. All curves are counterclockwise, so the outward normal
//! is the unit tangent rotated by `-π/2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::quadrature::unit_gauss_legendre;

pub type Point = [f64; 2];

const CLOSURE_TOL: f64 = 1e-12;
const DERIVATIVE_FLOOR: f64 = 1e-10;
const SIMPLICITY_TOL: f64 = 1e-8;
const SAMPLES_PER_PIECE: usize = 64;
const ARCLENGTH_TOL: f64 = 1e-10;
pub const DEFAULT_DOF_CAP: usize = 40_000;
pub const MIN_PANELS_PER_PIECE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryId {
    Circle,
    Ellipse,
    Kite,
    Square,
    Moon,
    EllipticCavity,
}

impl GeometryId {
    pub const ALL: [GeometryId; 6] = [
        GeometryId::Circle,
        GeometryId::Ellipse,
        GeometryId::Kite,
        GeometryId::Square,
        GeometryId::Moon,
        GeometryId::EllipticCavity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeometryId::Circle => "circle",
            GeometryId::Ellipse => "ellipse",
            GeometryId::Kite => "kite",
            GeometryId::Square => "square",
            GeometryId::Moon => "moon",
            GeometryId::EllipticCavity => "elliptic_cavity",
        }
    }
}

impl fmt::Display for GeometryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryId {
    type Err = BemError;

    fn from_str(s: &str) -> Result<Self> {
        GeometryId::ALL
            .iter()
            .copied()
            .find(|g| g.name() == s)
            .ok_or_else(|| BemError::UnknownGeometry(s.to_string()))
    }
}

/// Geometric class of a boundary, used as metadata for the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Smooth with strictly positive curvature.
    SmoothCurved,
    Smooth,
    PiecewiseSmooth,
    PiecewiseCurved,
    Trapping,
}

/// Optional shape overrides. Only the ones meaningful for a geometry may be set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryParams {
    /// Circle radius.
    pub radius: Option<f64>,
    /// Ellipse semiaxis along x.
    pub semi_x: Option<f64>,
    /// Ellipse semiaxis along y.
    pub semi_y: Option<f64>,
    /// Square side length.
    pub side: Option<f64>,
}

/// One analytic piece of a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceShape {
    /// `(cx + ax cos t, cy + ay sin t)`
    Ellipse { cx: f64, cy: f64, ax: f64, ay: f64 },
    /// `(cos t - 0.65 cos 2t - 0.65, 1.5 sin t)`
    Kite,
    /// `a + t (b - a)`
    Segment { a: Point, b: Point },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub shape: PieceShape,
    /// Native parameter at the start of the piece.
    pub t_start: f64,
    /// Native parameter at the end; may be below `t_start`.
    pub t_end: f64,
}

impl Piece {
    fn arc(shape: PieceShape, t_start: f64, t_end: f64) -> Self {
        Self {
            shape,
            t_start,
            t_end,
        }
    }

    fn segment(a: Point, b: Point) -> Self {
        Self {
            shape: PieceShape::Segment { a, b },
            t_start: 0.0,
            t_end: 1.0,
        }
    }

    pub fn span(&self) -> f64 {
        (self.t_end - self.t_start).abs()
    }

    fn direction(&self) -> f64 {
        if self.t_end >= self.t_start {
            1.0
        } else {
            -1.0
        }
    }

    fn native(&self, local: f64) -> f64 {
        self.t_start + self.direction() * local
    }

    /// Point at local parameter `local ∈ [0, span]`.
    pub fn point(&self, local: f64) -> Point {
        let t = self.native(local);
        match self.shape {
            PieceShape::Ellipse { cx, cy, ax, ay } => [cx + ax * t.cos(), cy + ay * t.sin()],
            PieceShape::Kite => [t.cos() - 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin()],
            PieceShape::Segment { a, b } => [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
        }
    }

    /// Derivative with respect to the local parameter.
    pub fn derivative(&self, local: f64) -> Point {
        let t = self.native(local);
        let s = self.direction();
        let d = match self.shape {
            PieceShape::Ellipse { ax, ay, .. } => [-ax * t.sin(), ay * t.cos()],
            PieceShape::Kite => [-t.sin() + 1.3 * (2.0 * t).sin(), 1.5 * t.cos()],
            PieceShape::Segment { a, b } => [b[0] - a[0], b[1] - a[1]],
        };
        [s * d[0], s * d[1]]
    }

    /// Exact endpoints; segments return their defining points bit-for-bit.
    fn start_point(&self) -> Point {
        match self.shape {
            PieceShape::Segment { a, .. } => a,
            _ => self.point(0.0),
        }
    }

    fn end_point(&self) -> Point {
        match self.shape {
            PieceShape::Segment { b, .. } => b,
            _ => self.point(self.span()),
        }
    }

    fn speed(&self, local: f64) -> f64 {
        let d = self.derivative(local);
        d[0].hypot(d[1])
    }
}

/// A closed, counterclockwise, piecewise analytic curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    pub id: GeometryId,
    pub pieces: Vec<Piece>,
    /// Global parameter at the start of each piece (plus the total at the end).
    pub offsets: Vec<f64>,
    /// Global parameters where pieces meet non-smoothly.
    pub corner_params: Vec<f64>,
    pub classification: Classification,
}

pub fn make_geometry(id: GeometryId, params: &GeometryParams) -> Result<ParametricCurve> {
    for (name, v) in [
        ("radius", params.radius),
        ("semi_x", params.semi_x),
        ("semi_y", params.semi_y),
        ("side", params.side),
    ] {
        if let Some(v) = v {
            if !(v > 0.0) || !v.is_finite() {
                return Err(BemError::InvalidGeometry(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
    }
    let reject_overrides = |allowed: &[&str]| -> Result<()> {
        let set = [
            ("radius", params.radius.is_some()),
            ("semi_x", params.semi_x.is_some()),
            ("semi_y", params.semi_y.is_some()),
            ("side", params.side.is_some()),
        ];
        for (name, present) in set {
            if present && !allowed.contains(&name) {
                return Err(BemError::InvalidGeometry(format!(
                    "{id} does not take `{name}`"
                )));
            }
        }
        Ok(())
    };

    let (pieces, corners, class) = match id {
        GeometryId::Circle => {
            reject_overrides(&["radius"])?;
            let r = params.radius.unwrap_or(1.0);
            let e = PieceShape::Ellipse {
                cx: 0.0,
                cy: 0.0,
                ax: r,
                ay: r,
            };
            (
                vec![Piece::arc(e, 0.0, 2.0 * PI)],
                false,
                Classification::SmoothCurved,
            )
        }
        GeometryId::Ellipse => {
            reject_overrides(&["semi_x", "semi_y"])?;
            let e = PieceShape::Ellipse {
                cx: 0.0,
                cy: 0.0,
                ax: params.semi_x.unwrap_or(1.0),
                ay: params.semi_y.unwrap_or(0.5),
            };
            (
                vec![Piece::arc(e, 0.0, 2.0 * PI)],
                false,
                Classification::SmoothCurved,
            )
        }
        GeometryId::Kite => {
            reject_overrides(&[])?;
            (
                vec![Piece::arc(PieceShape::Kite, 0.0, 2.0 * PI)],
                false,
                Classification::Smooth,
            )
        }
        GeometryId::Square => {
            reject_overrides(&["side"])?;
            let h = 0.5 * params.side.unwrap_or(2.0);
            let c = [[h, -h], [h, h], [-h, h], [-h, -h]];
            let pieces = (0..4)
                .map(|i| Piece::segment(c[i], c[(i + 1) % 4]))
                .collect();
            (pieces, true, Classification::PiecewiseSmooth)
        }
        GeometryId::Moon => {
            reject_overrides(&[])?;
            // the circle (x - 1/4)² + y² = 1 and the ellipse 4x² + y² = 1 cross at x = 1/12
            let x: f64 = 1.0 / 12.0;
            let y = (1.0 - 4.0 * x * x).sqrt();
            let outer = PieceShape::Ellipse {
                cx: 0.25,
                cy: 0.0,
                ax: 1.0,
                ay: 1.0,
            };
            let inner = PieceShape::Ellipse {
                cx: 0.0,
                cy: 0.0,
                ax: 0.5,
                ay: 1.0,
            };
            let t_outer = y.atan2(x - 0.25);
            let t_inner = y.atan2(2.0 * x);
            let pieces = vec![
                Piece::arc(outer, -t_outer, t_outer),
                Piece::arc(inner, t_inner, -t_inner),
            ];
            (pieces, true, Classification::PiecewiseCurved)
        }
        GeometryId::EllipticCavity => {
            reject_overrides(&[])?;
            let phi0 = 0.7 * PI;
            let phi1 = (phi0.cos() / 1.3).acos();
            let outer = PieceShape::Ellipse {
                cx: 0.0,
                cy: 0.0,
                ax: 1.3,
                ay: 0.6,
            };
            let inner = PieceShape::Ellipse {
                cx: 0.0,
                cy: 0.0,
                ax: 1.0,
                ay: 0.5,
            };
            let outer_arc = Piece::arc(outer, -phi1, phi1);
            let inner_arc = Piece::arc(inner, phi0, -phi0);
            let pieces = vec![
                outer_arc,
                Piece::segment(outer_arc.end_point(), inner_arc.start_point()),
                inner_arc,
                Piece::segment(inner_arc.end_point(), outer_arc.start_point()),
            ];
            (pieces, true, Classification::Trapping)
        }
    };

    let mut offsets = Vec::with_capacity(pieces.len() + 1);
    let mut acc = 0.0;
    for p in &pieces {
        offsets.push(acc);
        acc += p.span();
    }
    offsets.push(acc);
    let corner_params = if corners {
        offsets[..pieces.len()].to_vec()
    } else {
        Vec::new()
    };
    let curve = ParametricCurve {
        id,
        pieces,
        offsets,
        corner_params,
        classification: class,
    };
    curve.validate()?;
    Ok(curve)
}

impl ParametricCurve {
    pub fn parameter_range(&self) -> (f64, f64) {
        (0.0, *self.offsets.last().unwrap())
    }

    /// Piece index and local parameter of a global parameter.
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (start, end) = self.parameter_range();
        if !(t >= start && t <= end) {
            return Err(BemError::ParameterOutOfRange { t, start, end });
        }
        let i = self.offsets[1..]
            .iter()
            .position(|&o| t < o)
            .unwrap_or(self.pieces.len() - 1);
        Ok((i, (t - self.offsets[i]).min(self.pieces[i].span())))
    }

    pub fn point(&self, t: f64) -> Result<Point> {
        let (i, s) = self.locate(t)?;
        Ok(self.pieces[i].point(s))
    }

    pub fn derivative(&self, t: f64) -> Result<Point> {
        let (i, s) = self.locate(t)?;
        Ok(self.pieces[i].derivative(s))
    }

    fn is_corner(&self, t: f64) -> bool {
        let (_, end) = self.parameter_range();
        self.corner_params
            .iter()
            .any(|&c| (t - c).abs() < 1e-12 || (c == 0.0 && (t - end).abs() < 1e-12))
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.pieces.len();
        for i in 0..m {
            let a = self.pieces[i].end_point();
            let b = self.pieces[(i + 1) % m].start_point();
            let gap = (a[0] - b[0]).hypot(a[1] - b[1]);
            if gap > CLOSURE_TOL {
                return Err(BemError::InvalidGeometry(format!(
                    "gap {gap:e} between piece {i} and piece {}",
                    (i + 1) % m
                )));
            }
        }
        let mut samples: Vec<Vec<Point>> = Vec::with_capacity(m);
        for (i, p) in self.pieces.iter().enumerate() {
            let span = p.span();
            let mut pts = Vec::with_capacity(SAMPLES_PER_PIECE);
            for j in 0..SAMPLES_PER_PIECE {
                let s = span * (j as f64 + 0.5) / SAMPLES_PER_PIECE as f64;
                if p.speed(s) <= DERIVATIVE_FLOOR {
                    return Err(BemError::InvalidGeometry(format!(
                        "vanishing derivative on piece {i} at local parameter {s}"
                    )));
                }
                pts.push(p.point(s));
            }
            samples.push(pts);
        }
        for i in 0..m {
            for j in i + 1..m {
                let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                if adjacent {
                    continue;
                }
                for a in &samples[i] {
                    for b in &samples[j] {
                        if (a[0] - b[0]).hypot(a[1] - b[1]) < SIMPLICITY_TOL {
                            return Err(BemError::InvalidGeometry(format!(
                                "pieces {i} and {j} touch"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Arclength of each piece.
    pub fn piece_lengths(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| ArclengthTable::new(p).total())
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.piece_lengths().iter().sum()
    }
}

/// Point and outward unit normal at global parameter `t`.
pub fn point_and_normal(curve: &ParametricCurve, t: f64) -> Result<(Point, Point)> {
    if curve.is_corner(t) {
        return Err(BemError::CornerParameter { t });
    }
    let (i, s) = curve.locate(t)?;
    let p = &curve.pieces[i];
    let d = p.derivative(s);
    let len = d[0].hypot(d[1]);
    Ok((p.point(s), [d[1] / len, -d[0] / len]))
}

fn gauss_on(a: f64, b: f64, order: usize, f: &impl Fn(f64) -> f64) -> f64 {
    let (nodes, weights) = unit_gauss_legendre(order);
    let h = b - a;
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(a + h * x))
        .sum::<f64>()
        * h
}

fn adaptive_integral(a: f64, b: f64, f: &impl Fn(f64) -> f64, tol: f64, depth: u32) -> f64 {
    let whole = gauss_on(a, b, 10, f);
    let mid = 0.5 * (a + b);
    let halves = gauss_on(a, mid, 10, f) + gauss_on(mid, b, 10, f);
    if (whole - halves).abs() <= tol * halves.abs() || depth >= 30 {
        halves
    } else {
        adaptive_integral(a, mid, f, tol, depth + 1) + adaptive_integral(mid, b, f, tol, depth + 1)
    }
}

/// Cumulative arclength of a piece on a fixed parameter grid, with inversion.
struct ArclengthTable<'a> {
    piece: &'a Piece,
    params: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<'a> ArclengthTable<'a> {
    const CELLS: usize = 64;

    fn new(piece: &'a Piece) -> Self {
        let span = piece.span();
        let speed = |s: f64| piece.speed(s);
        let mut params = Vec::with_capacity(Self::CELLS + 1);
        let mut cumulative = Vec::with_capacity(Self::CELLS + 1);
        params.push(0.0);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..Self::CELLS {
            let a = span * i as f64 / Self::CELLS as f64;
            let b = span * (i + 1) as f64 / Self::CELLS as f64;
            acc += adaptive_integral(a, b, &speed, ARCLENGTH_TOL, 0);
            params.push(b);
            cumulative.push(acc);
        }
        Self {
            piece,
            params,
            cumulative,
        }
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Local parameter at which the arclength from the piece start equals `s`.
    fn invert(&self, s: f64) -> f64 {
        let i = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => return self.params[i],
            Err(i) => i.clamp(1, Self::CELLS) - 1,
        };
        let (t0, t1) = (self.params[i], self.params[i + 1]);
        let (s0, s1) = (self.cumulative[i], self.cumulative[i + 1]);
        let speed = |u: f64| self.piece.speed(u);
        let mut t = t0 + (t1 - t0) * (s - s0) / (s1 - s0);
        for _ in 0..50 {
            let f = s0 + gauss_on(t0, t, 16, &speed) - s;
            let dt = f / speed(t);
            t = (t - dt).clamp(t0, t1);
            if dt.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        t
    }
}

/// Straight-panel mesh on a curve; node `j` and node `j + 1 (mod n)` bound panel `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    pub geometry: GeometryId,
    pub nodes: Vec<Point>,
    /// Global curve parameter of every node.
    pub node_params: Vec<f64>,
    /// Indices of nodes sitting on corners.
    pub corner_nodes: Vec<usize>,
    pub panel_length: Vec<f64>,
    pub outward_normal: Vec<Point>,
    pub h_max: f64,
    pub n_dof: usize,
    /// Number of panels on each piece of the curve.
    pub panels_per_piece: Vec<usize>,
}

/// Meshes `curve` so that every panel is at most `(2π/k)/ppw` long.
pub fn build_mesh(curve: &ParametricCurve, k: f64, ppw: f64) -> Result<BoundaryMesh> {
    build_mesh_capped(curve, k, ppw, DEFAULT_DOF_CAP)
}

pub fn build_mesh_capped(
    curve: &ParametricCurve,
    k: f64,
    ppw: f64,
    dof_cap: usize,
) -> Result<BoundaryMesh> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    if !(ppw >= 2.0) || !ppw.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "points per wavelength must be at least 2, got {ppw}"
        )));
    }
    let h = 2.0 * PI / k / ppw;
    let tables: Vec<ArclengthTable> = curve.pieces.iter().map(ArclengthTable::new).collect();
    let counts: Vec<usize> = tables
        .iter()
        .map(|tab| {
            // the small shave keeps exact multiples of h from rounding up
            let m = (tab.total() / h * (1.0 - 1e-10)).ceil();
            (m as usize).max(MIN_PANELS_PER_PIECE)
        })
        .collect();
    let needed: usize = counts.iter().sum();
    if needed > dof_cap {
        return Err(BemError::DofCap {
            needed,
            cap: dof_cap,
        });
    }
    mesh_with_counts(curve, &tables, &counts)
}

/// Meshes with an explicit panel count per piece.
pub fn build_mesh_with_counts(curve: &ParametricCurve, counts: &[usize]) -> Result<BoundaryMesh> {
    if counts.len() != curve.pieces.len() || counts.contains(&0) {
        return Err(BemError::InvalidArgument(
            "need a positive panel count for every piece".into(),
        ));
    }
    if counts.iter().sum::<usize>() < 3 {
        return Err(BemError::InvalidMesh(
            "a closed mesh needs at least 3 panels".into(),
        ));
    }
    let tables: Vec<ArclengthTable> = curve.pieces.iter().map(ArclengthTable::new).collect();
    mesh_with_counts(curve, &tables, counts)
}

fn mesh_with_counts(
    curve: &ParametricCurve,
    tables: &[ArclengthTable],
    counts: &[usize],
) -> Result<BoundaryMesh> {
    let n: usize = counts.iter().sum();
    let mut nodes = Vec::with_capacity(n);
    let mut node_params = Vec::with_capacity(n);
    let mut corner_nodes = Vec::new();
    for (i, (piece, tab)) in curve.pieces.iter().zip(tables).enumerate() {
        let m = counts[i];
        let total = tab.total();
        if !curve.corner_params.is_empty() {
            corner_nodes.push(nodes.len());
        }
        for j in 0..m {
            let (s, p) = if j == 0 {
                (0.0, piece.start_point())
            } else {
                let s = tab.invert(total * j as f64 / m as f64);
                (s, piece.point(s))
            };
            nodes.push(p);
            node_params.push(curve.offsets[i] + s);
        }
    }
    let mut panel_length = Vec::with_capacity(n);
    let mut outward_normal = Vec::with_capacity(n);
    for j in 0..n {
        let a = nodes[j];
        let b = nodes[(j + 1) % n];
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = d[0].hypot(d[1]);
        if !(len > 0.0) {
            return Err(BemError::InvalidMesh(format!("panel {j} has zero length")));
        }
        panel_length.push(len);
        outward_normal.push([d[1] / len, -d[0] / len]);
    }
    let h_max = panel_length.iter().copied().fold(0.0, f64::max);
    Ok(BoundaryMesh {
        geometry: curve.id,
        nodes,
        node_params,
        corner_nodes,
        panel_length,
        outward_normal,
        h_max,
        n_dof: n,
        panels_per_piece: counts.to_vec(),
    })
}

impl BoundaryMesh {
    pub fn panel(&self, j: usize) -> crate::quadrature::Panel {
        crate::quadrature::Panel::new(self.nodes[j], self.nodes[(j + 1) % self.n_dof])
    }

    pub fn perimeter(&self) -> f64 {
        self.panel_length.iter().sum()
    }

    pub fn h_min(&self) -> f64 {
        self.panel_length
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// FNV-1a hash of the node coordinates, identifying the mesh in dumps.
    pub fn mesh_id(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for p in &self.nodes {
            for c in p {
                for byte in c.to_le_bytes() {
                    h ^= byte as u64;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        h
    }
}
