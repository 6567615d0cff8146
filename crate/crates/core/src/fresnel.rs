//! Fresnel-zone coordinates on the RIS plane and the reflective intensity.
//!
//! The zone with semi-major axis `a` is the set of plane points whose route
//! length BS -> point -> UE equals `2a`. In a frame translated to the midpoint
//! of the projected foci and rotated so the BS projects to `(-u, 0)` and the
//! UE to `(+u, 0)`, that set is the ellipse
//!
//! ```text
//! (x' - x0)^2 / (a eta0)^2 + y'^2 / (b eta0)^2 = 1,   b = sqrt(a^2 - u^2)
//! x0    = u (z_bs^2 - z_ue^2) / (4 b^2)
//! eta0^2 = 1 + (z_ue^2 - z_bs^2)^2 / (16 b^4) - (z_bs^2 + z_ue^2) / (2 b^2)
//! ```
//!
//! parameterised by `x' = a eta0 cos(theta) + x0`, `y' = b eta0 sin(theta)`.
//! The area element is `J(a, theta) da dtheta` with
//! `J = c0 + c1 cos(theta) + c2 cos(2 theta)`, so the intensity of a zone is a
//! closed-form sum over the arcs that fall inside the aperture.

use alloc::vec::Vec;

use crate::math::{self, acos, atan2, cos, hypot, sin, sqrt, TAU};
use crate::quad::{self, UniformGrid};
use crate::scenario::{ElementGrid, Placement, Point3, SystemConfig};
use crate::{channel, Error, Result, SPEED_OF_LIGHT};

/// Below this projected half focus distance the frame is treated as circular.
const DEGENERATE_U: f64 = 1e-12;
/// Breakpoints closer than this are merged.
const ANGLE_DEDUP: f64 = 1e-12;

/// Translated and rotated frame in which the foci project to `(-u, 0)` and
/// `(+u, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelFrame {
    pub xc: f64,
    pub yc: f64,
    pub alpha: f64,
    pub u: f64,
    pub z_bs: f64,
    pub z_ue: f64,
}

/// `alpha` is the direction of the projected BS -> UE vector, so the BS lands
/// on the negative `x'` axis. Coincident projections give `u = 0`, `alpha = 0`.
pub fn build_frame(p: &Placement) -> FresnelFrame {
    let dx = p.ue.x - p.bs.x;
    let dy = p.ue.y - p.bs.y;
    let u = hypot(dx, dy) / 2.0;
    let (alpha, u) = if u <= DEGENERATE_U * (1.0 + p.bs.norm() + p.ue.norm()) {
        (0.0, 0.0)
    } else {
        (atan2(dy, dx), u)
    };
    FresnelFrame {
        xc: (p.bs.x + p.ue.x) / 2.0,
        yc: (p.bs.y + p.ue.y) / 2.0,
        alpha,
        u,
        z_bs: p.bs.z,
        z_ue: p.ue.z,
    }
}

impl FresnelFrame {
    /// RIS-plane `(x, y)` into frame coordinates.
    pub fn to_frame(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = math::sin_cos(self.alpha);
        let (dx, dy) = (x - self.xc, y - self.yc);
        (dx * c + dy * s, -dx * s + dy * c)
    }

    /// Frame coordinates back to the RIS plane.
    pub fn from_frame(&self, xp: f64, yp: f64) -> (f64, f64) {
        let (s, c) = math::sin_cos(self.alpha);
        (self.xc + xp * c - yp * s, self.yc + xp * s + yp * c)
    }

    pub fn bs_in_frame(&self) -> Point3 {
        Point3::new(-self.u, 0.0, self.z_bs)
    }

    pub fn ue_in_frame(&self) -> Point3 {
        Point3::new(self.u, 0.0, self.z_ue)
    }
}

/// Ellipse of one zone in the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub eta0: f64,
}

pub fn ellipse_params(frame: &FresnelFrame, a: f64) -> Result<EllipseParams> {
    let u = frame.u;
    if !(a > u) {
        return Err(Error::ZoneOutOfDomain { a, u });
    }
    let b2 = a * a - u * u;
    let zb2 = frame.z_bs * frame.z_bs;
    let zu2 = frame.z_ue * frame.z_ue;
    let diff = zu2 - zb2;
    // eta0^2 vanishes at b = |z_ue - z_bs|/2 and b = (z_bs + z_ue)/2. Only the
    // upper branch reaches the plane; below the lower root the squared route
    // equation has a spurious solution.
    let half_sum = (frame.z_bs + frame.z_ue) / 2.0;
    if b2 < half_sum * half_sum * (1.0 - 1e-12) {
        return Err(Error::ZoneBelowPlane { a });
    }
    let eta2 = (1.0 + diff * diff / (16.0 * b2 * b2) - (zb2 + zu2) / (2.0 * b2)).max(0.0);
    Ok(EllipseParams {
        a,
        b: sqrt(b2),
        x0: u * (zb2 - zu2) / (4.0 * b2),
        eta0: sqrt(eta2),
    })
}

/// Zone coordinates `(a, theta)` to RIS-plane `(x, y)`.
pub fn fz_to_cartesian(frame: &FresnelFrame, a: f64, theta: f64) -> Result<(f64, f64)> {
    let e = ellipse_params(frame, a)?;
    let (s, c) = math::sin_cos(theta);
    Ok(frame.from_frame(a * e.eta0 * c + e.x0, e.b * e.eta0 * s))
}

/// Half the BS -> point -> UE route length of a RIS-plane point.
pub fn a_of_point(frame: &FresnelFrame, x: f64, y: f64) -> f64 {
    let (xp, yp) = frame.to_frame(x, y);
    let r = Point3::new(xp, yp, 0.0);
    (r.distance(frame.bs_in_frame()) + r.distance(frame.ue_in_frame())) / 2.0
}

/// `J(a, theta) = c0 + c1 cos(theta) + c2 cos(2 theta)` for one zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianTerms {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl JacobianTerms {
    pub fn new(frame: &FresnelFrame, e: &EllipseParams) -> Self {
        let (a, b, u, eta) = (e.a, e.b, frame.u, e.eta0);
        let zb2 = frame.z_bs * frame.z_bs;
        let zu2 = frame.z_ue * frame.z_ue;
        let diff = zu2 - zb2;
        let b3 = b * b * b;
        let b5 = b3 * b * b;
        Self {
            c0: a * a / 2.0 * ((zb2 + zu2) / b3 - diff * diff / (4.0 * b5))
                + eta * eta * (b * b + u * u / 2.0) / b,
            c1: a * u * diff * eta / (2.0 * b3),
            c2: -eta * eta * u * u / (2.0 * b),
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.c0 + self.c1 * cos(theta) + self.c2 * cos(2.0 * theta)
    }

    /// Antiderivative in `theta`.
    pub fn primitive(&self, theta: f64) -> f64 {
        self.c0 * theta + self.c1 * sin(theta) + 0.5 * self.c2 * sin(2.0 * theta)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.primitive(hi) - self.primitive(lo)
    }
}

/// `|det d(x, y) / d(a, theta)|`.
pub fn jacobian(frame: &FresnelFrame, a: f64, theta: f64) -> Result<f64> {
    let e = ellipse_params(frame, a)?;
    Ok(JacobianTerms::new(frame, &e).value(theta).abs())
}

/// Rectangular RIS footprint centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    pub half_x: f64,
    pub half_y: f64,
}

impl Aperture {
    pub fn square(side: f64) -> Self {
        Self {
            half_x: side / 2.0,
            half_y: side / 2.0,
        }
    }

    /// The area tiled by the element cells of a configuration.
    pub fn of_config(config: &SystemConfig) -> Self {
        Self {
            half_x: config.n1 as f64 * config.spacing_m / 2.0,
            half_y: config.n2 as f64 * config.spacing_m / 2.0,
        }
    }

    pub fn of_grid(grid: &ElementGrid) -> Self {
        let (half_x, half_y) = grid.half_extent();
        Self { half_x, half_y }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_x * self.half_y
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.abs() <= self.half_x && y.abs() <= self.half_y
    }
}

/// A `theta` interval; `end` may exceed `2 pi` when the arc wraps through 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = math::wrap_phase(theta);
        (t >= self.start && t <= self.end) || (t + TAU >= self.start && t + TAU <= self.end)
    }
}

/// `k0 + kc cos(theta) + ks sin(theta)` for one coordinate of the zone.
#[derive(Debug, Clone, Copy)]
struct Harmonic {
    k0: f64,
    kc: f64,
    ks: f64,
}

impl Harmonic {
    fn eval(&self, theta: f64) -> f64 {
        let (s, c) = math::sin_cos(theta);
        self.k0 + self.kc * c + self.ks * s
    }

    /// Angles in `[0, 2 pi)` where the harmonic equals `level`.
    fn crossings(&self, level: f64, out: &mut Vec<f64>) {
        let r = hypot(self.kc, self.ks);
        if r == 0.0 {
            return;
        }
        let ratio = (level - self.k0) / r;
        if ratio.abs() > 1.0 {
            return;
        }
        let phi = atan2(self.ks, self.kc);
        let half = acos(ratio);
        out.push(math::wrap_phase(phi + half));
        out.push(math::wrap_phase(phi - half));
    }
}

fn zone_harmonics(frame: &FresnelFrame, e: &EllipseParams) -> (Harmonic, Harmonic) {
    let (s, c) = math::sin_cos(frame.alpha);
    let major = e.a * e.eta0;
    let minor = e.b * e.eta0;
    let x = Harmonic {
        k0: frame.xc + e.x0 * c,
        kc: major * c,
        ks: -minor * s,
    };
    let y = Harmonic {
        k0: frame.yc + e.x0 * s,
        kc: major * s,
        ks: minor * c,
    };
    (x, y)
}

fn arcs_for(frame: &FresnelFrame, e: &EllipseParams, aperture: &Aperture) -> Vec<Arc> {
    let (hx, hy) = zone_harmonics(frame, e);
    let mut cuts = Vec::with_capacity(10);
    hx.crossings(aperture.half_x, &mut cuts);
    hx.crossings(-aperture.half_x, &mut cuts);
    hy.crossings(aperture.half_y, &mut cuts);
    hy.crossings(-aperture.half_y, &mut cuts);
    cuts.push(0.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    cuts.dedup_by(|b, a| (*b - *a).abs() <= ANGLE_DEDUP);
    if TAU - cuts[cuts.len() - 1] <= ANGLE_DEDUP && cuts.len() > 1 {
        cuts.pop();
    }

    let inside = |theta: f64| {
        let tol = 1e-12 * (1.0 + aperture.half_x.max(aperture.half_y));
        hx.eval(theta).abs() <= aperture.half_x + tol && hy.eval(theta).abs() <= aperture.half_y + tol
    };

    let mut arcs: Vec<Arc> = Vec::new();
    for i in 0..cuts.len() {
        let start = cuts[i];
        let end = if i + 1 < cuts.len() { cuts[i + 1] } else { TAU };
        if end - start <= 0.0 || !inside(0.5 * (start + end)) {
            continue;
        }
        match arcs.last_mut() {
            Some(last) if (last.end - start).abs() <= ANGLE_DEDUP => last.end = end,
            _ => arcs.push(Arc { start, end }),
        }
    }
    // Join the piece ending at 2 pi with the one starting at 0.
    if arcs.len() > 1 {
        let first = arcs[0];
        let last = arcs[arcs.len() - 1];
        if first.start <= ANGLE_DEDUP && (TAU - last.end) <= ANGLE_DEDUP {
            arcs.remove(0);
            let n = arcs.len();
            arcs[n - 1].end = TAU + first.end;
        }
    }
    arcs
}

/// Maximal `theta` intervals of zone `a` that lie inside the aperture.
pub fn visible_arcs(frame: &FresnelFrame, a: f64, aperture: &Aperture) -> Result<Vec<Arc>> {
    let e = ellipse_params(frame, a)?;
    Ok(arcs_for(frame, &e, aperture))
}

/// `integral over visible arcs of J(a, theta) dtheta`; zero for zones that
/// do not reach the plane.
pub fn zone_measure(frame: &FresnelFrame, a: f64, aperture: &Aperture) -> Result<f64> {
    let e = match ellipse_params(frame, a) {
        Ok(e) => e,
        Err(Error::ZoneBelowPlane { .. }) => return Ok(0.0),
        Err(err) => return Err(err),
    };
    let terms = JacobianTerms::new(frame, &e);
    Ok(arcs_for(frame, &e, aperture)
        .iter()
        .map(|arc| terms.integral(arc.start, arc.end))
        .sum::<f64>()
        .max(0.0))
}

/// Shortest and longest BS -> point -> UE route over the aperture.
pub fn route_extent(p: &Placement, aperture: &Aperture) -> (f64, f64) {
    let (hx, hy) = (aperture.half_x, aperture.half_y);
    let corners = [
        Point3::new(-hx, -hy, 0.0),
        Point3::new(-hx, hy, 0.0),
        Point3::new(hx, -hy, 0.0),
        Point3::new(hx, hy, 0.0),
    ];
    let longest = corners
        .iter()
        .map(|&c| p.route_length(c))
        .fold(f64::NEG_INFINITY, f64::max);

    // Unconstrained minimum: the specular point toward the mirrored UE.
    let s = p.bs.z / (p.bs.z + p.ue.z);
    let sx = p.bs.x + (p.ue.x - p.bs.x) * s;
    let sy = p.bs.y + (p.ue.y - p.bs.y) * s;
    if aperture.contains(sx, sy) {
        return (p.route_length(Point3::new(sx, sy, 0.0)), longest);
    }
    // Otherwise on an edge; each edge is a 1-D two-focus problem whose
    // minimiser follows from the reflection principle.
    let on_line = |along: fn(Point3) -> f64, across: fn(Point3) -> f64, fixed: f64, half: f64| {
        let h1 = hypot(across(p.bs) - fixed, p.bs.z);
        let h2 = hypot(across(p.ue) - fixed, p.ue.z);
        let (s1, s2) = (along(p.bs), along(p.ue));
        let best = if h1 + h2 > 0.0 {
            (s1 * h2 + s2 * h1) / (h1 + h2)
        } else {
            s1
        };
        let t = best.clamp(-half, half);
        hypot(t - s1, h1) + hypot(t - s2, h2)
    };
    let gx = |q: Point3| q.x;
    let gy = |q: Point3| q.y;
    let shortest = [
        on_line(gx, gy, hy, hx),
        on_line(gx, gy, -hy, hx),
        on_line(gy, gx, hx, hy),
        on_line(gy, gx, -hx, hy),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    (shortest, longest)
}

/// Sampled reflective intensity `v(a)` of the Fresnel zones.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityProfile {
    pub a_grid: UniformGrid,
    /// `v(a_i)`; units of `g0 * m`.
    pub v: Vec<f64>,
    pub carrier_hz: f64,
    /// Path-loss constant at the carrier that scales `v`.
    pub g0: f64,
}

impl IntensityProfile {
    pub fn from_samples(a_grid: UniformGrid, v: Vec<f64>, carrier_hz: f64, g0: f64) -> Result<Self> {
        if v.len() != a_grid.len {
            return Err(Error::SizeMismatch {
                expected: a_grid.len,
                found: v.len(),
            });
        }
        Ok(Self {
            a_grid,
            v,
            carrier_hz,
            g0,
        })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Delay grid `t = 2a / c`.
    pub fn t_grid(&self) -> UniformGrid {
        UniformGrid {
            start: 2.0 * self.a_grid.start / SPEED_OF_LIGHT,
            step: 2.0 * self.a_grid.step / SPEED_OF_LIGHT,
            len: self.a_grid.len,
        }
    }

    /// `v_t(t) = (c/2) v(tc/2)` on [`Self::t_grid`].
    pub fn v_t(&self) -> Vec<f64> {
        self.v.iter().map(|v| v * SPEED_OF_LIGHT / 2.0).collect()
    }

    pub fn t_min(&self) -> f64 {
        self.t_grid().start
    }

    pub fn t_max(&self) -> f64 {
        self.t_grid().end()
    }

    pub fn delay_spread(&self) -> f64 {
        self.t_max() - self.t_min()
    }

    /// `E_g = integral of v_t^2 dt`.
    pub fn energy(&self) -> f64 {
        let vt = self.v_t();
        let sq: Vec<f64> = vt.iter().map(|v| v * v).collect();
        quad::trapezoid(&sq, self.t_grid().step)
    }

    /// `integral of v da`, the aperture area times `g0`.
    pub fn aperture_weight(&self) -> f64 {
        quad::trapezoid(&self.v, self.a_grid.step)
    }
}

/// Largest a-grid step: half an element spacing, and fine enough that the
/// top-of-band carrier phase advances by less than pi per sample.
pub fn max_zone_step(config: &SystemConfig) -> f64 {
    let nyquist = SPEED_OF_LIGHT / (4.0 * (config.carrier_hz + config.bandwidth_hz / 2.0));
    (config.spacing_m / 2.0).min(nyquist)
}

pub fn intensity_profile(frame: &FresnelFrame, config: &SystemConfig, p: &Placement) -> Result<IntensityProfile> {
    intensity_profile_over(frame, config, p, &Aperture::of_config(config))
}

/// Intensity over an explicit aperture.
pub fn intensity_profile_over(
    frame: &FresnelFrame,
    config: &SystemConfig,
    p: &Placement,
    aperture: &Aperture,
) -> Result<IntensityProfile> {
    let (l_min, l_max) = route_extent(p, aperture);
    let (a_min, a_max) = (l_min / 2.0, l_max / 2.0);
    let step = max_zone_step(config);
    let range = a_max - a_min;
    let len = if range > 0.0 {
        math::floor(range / step) as usize + 2
    } else {
        1
    };
    let a_grid = UniformGrid::spanning(a_min, a_max, len);
    let g0 = channel::path_gain_constant(config, p, config.carrier_hz);
    let mut v = Vec::with_capacity(len);
    for i in 0..len {
        v.push(g0 * zone_measure(frame, a_grid.at(i), aperture)?);
    }
    IntensityProfile::from_samples(a_grid, v, config.carrier_hz, g0)
}
