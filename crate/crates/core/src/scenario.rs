//! System configuration, RIS element geometry and BS/UE placement.
//!
//! The RIS lies in the `z = 0` plane, centred at the origin with its edges
//! along the axes. Both the BS and the UE sit on the reflective side
//! (`z > 0`).

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{self, sqrt};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// A point or vector in the RIS frame, metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point3 {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Half-wavelength spacing at `carrier_hz`.
pub fn half_wavelength(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / (2.0 * carrier_hz)
}

/// Elements per axis that fit in `side` at `spacing`: `floor(side / spacing)`.
pub fn elements_per_side(side: f64, spacing: f64) -> usize {
    // The epsilon keeps exact multiples (1.0 / 0.005) from rounding down.
    let n = math::floor(side / spacing * (1.0 + 1e-12));
    if n < 1.0 {
        1
    } else {
        n as usize
    }
}

/// Band plan, aperture and link budget of one RIS link.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
    /// Side length `D` of the square RIS.
    pub side_length_m: f64,
    /// Element spacing `d`.
    pub spacing_m: f64,
    pub n1: usize,
    pub n2: usize,
    pub bs_antennas: usize,
    pub noise_psd_dbm_hz: f64,
    pub tx_power_dbm: f64,
    /// Phase-shifter resolution; `None` is continuous phase.
    pub phase_bits: Option<u32>,
}

/// Default subcarrier count for sweeps.
pub const DEFAULT_SUBCARRIERS: usize = 128;
/// Default transmit power.
pub const DEFAULT_TX_POWER_DBM: f64 = 10.0;

impl Default for SystemConfig {
    /// 30 GHz carrier, 1.5 GHz band, 1 m RIS at half-wavelength spacing,
    /// -170 dBm/Hz noise, single BS antenna.
    fn default() -> Self {
        let carrier_hz = 30e9;
        let spacing_m = half_wavelength(carrier_hz);
        let side_length_m = 1.0;
        let n = elements_per_side(side_length_m, spacing_m);
        Self {
            carrier_hz,
            bandwidth_hz: 1.5e9,
            subcarriers: DEFAULT_SUBCARRIERS,
            side_length_m,
            spacing_m,
            n1: n,
            n2: n,
            bs_antennas: 1,
            noise_psd_dbm_hz: -170.0,
            tx_power_dbm: DEFAULT_TX_POWER_DBM,
            phase_bits: None,
        }
    }
}

impl SystemConfig {
    /// Resize the aperture, recomputing the element counts from the spacing.
    pub fn with_side_length(mut self, side_length_m: f64) -> Self {
        self.side_length_m = side_length_m;
        let n = elements_per_side(side_length_m, self.spacing_m);
        self.n1 = n;
        self.n2 = n;
        self
    }

    pub fn with_bandwidth(mut self, bandwidth_hz: f64) -> Self {
        self.bandwidth_hz = bandwidth_hz;
        self
    }

    pub fn element_count(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn band(&self) -> Band {
        Band::new(self.carrier_hz, self.bandwidth_hz)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return bad(format!("bandwidth must be positive, got {}", self.bandwidth_hz));
        }
        if !(self.carrier_hz > self.bandwidth_hz / 2.0) || !self.carrier_hz.is_finite() {
            return bad(format!(
                "carrier {} Hz must exceed half the bandwidth {} Hz",
                self.carrier_hz, self.bandwidth_hz
            ));
        }
        if !(self.spacing_m > 0.0 && self.spacing_m.is_finite()) {
            return bad(format!("element spacing must be positive, got {}", self.spacing_m));
        }
        if !(self.side_length_m > 0.0 && self.side_length_m.is_finite()) {
            return bad(format!("side length must be positive, got {}", self.side_length_m));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return bad(format!("element counts must be positive, got {}x{}", self.n1, self.n2));
        }
        let limit = (self.side_length_m + self.spacing_m) * (1.0 + 1e-12);
        if self.n1 as f64 * self.spacing_m > limit || self.n2 as f64 * self.spacing_m > limit {
            return bad(format!(
                "{}x{} elements at {} m do not fit a {} m aperture",
                self.n1, self.n2, self.spacing_m, self.side_length_m
            ));
        }
        if self.subcarriers == 0 {
            return bad("subcarrier count must be at least 1".into());
        }
        if self.bs_antennas == 0 {
            return bad("BS antenna count must be at least 1".into());
        }
        if self.phase_bits == Some(0) {
            return bad("phase resolution must be at least 1 bit".into());
        }
        if !self.noise_psd_dbm_hz.is_finite() || !self.tx_power_dbm.is_finite() {
            return bad("link budget values must be finite".into());
        }
        Ok(())
    }
}

/// A frequency band `[center - width/2, center + width/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub center_hz: f64,
    pub width_hz: f64,
}

impl Band {
    pub const fn new(center_hz: f64, width_hz: f64) -> Self {
        Self { center_hz, width_hz }
    }

    pub fn low(&self) -> f64 {
        self.center_hz - self.width_hz / 2.0
    }

    pub fn high(&self) -> f64 {
        self.center_hz + self.width_hz / 2.0
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.low() && f <= self.high()
    }

    /// Subcarrier centres `f_k = fc + B((2k-1)/(2K) - 1/2)`, `k = 1..=K`.
    pub fn subcarriers(&self, count: usize) -> Vec<f64> {
        let k_total = count as f64;
        (1..=count)
            .map(|k| {
                self.center_hz + self.width_hz * ((2 * k - 1) as f64 / (2.0 * k_total) - 0.5)
            })
            .collect()
    }
}

/// BS and UE positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub bs: Point3,
    pub ue: Point3,
}

impl Placement {
    pub fn new(bs: Point3, ue: Point3) -> Result<Self> {
        if !bs.is_finite() || !ue.is_finite() {
            return Err(Error::InvalidPlacement("coordinates must be finite"));
        }
        if bs.z <= 0.0 {
            return Err(Error::InvalidPlacement("BS must be above the RIS plane (z > 0)"));
        }
        if ue.z <= 0.0 {
            return Err(Error::InvalidPlacement("UE must be above the RIS plane (z > 0)"));
        }
        Ok(Self { bs, ue })
    }

    /// TX at (6.4, 5, 14.4) m and RX at (-4.8, 5, 6.4) m.
    pub fn reference() -> Self {
        Self {
            bs: Point3::new(6.4, 5.0, 14.4),
            ue: Point3::new(-4.8, 5.0, 6.4),
        }
    }

    /// BS-to-RIS-centre distance `R^{B-R}`.
    pub fn bs_distance(&self) -> f64 {
        self.bs.norm()
    }

    /// RIS-centre-to-UE distance `R^{R-U}`.
    pub fn ue_distance(&self) -> f64 {
        self.ue.norm()
    }

    pub fn swapped(&self) -> Self {
        Self { bs: self.ue, ue: self.bs }
    }

    /// Route length `|r - bs| + |r - ue|` through point `r`.
    pub fn route_length(&self, r: Point3) -> f64 {
        r.distance(self.bs) + r.distance(self.ue)
    }
}

/// A closed distance interval used for random placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRange {
    pub min: f64,
    pub max: f64,
}

impl DistanceRange {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    /// The 7 m to 13 m range used for the Monte Carlo studies.
    pub const fn reference() -> Self {
        Self::new(7.0, 13.0)
    }

    fn check(&self) -> Result<()> {
        if !(self.min > 0.0) || !(self.min <= self.max) || !self.max.is_finite() {
            return Err(Error::EmptyRange { lo: self.min, hi: self.max });
        }
        Ok(())
    }
}

fn sample_on_hemisphere(rng: &mut ChaCha8Rng, range: DistanceRange) -> Point3 {
    // cos(polar) uniform in (0, 1] gives a uniform direction on the upper
    // hemisphere and keeps z strictly positive.
    let cos_polar = 1.0 - rng.gen::<f64>();
    let sin_polar = sqrt((1.0 - cos_polar * cos_polar).max(0.0));
    let azimuth = rng.gen::<f64>() * math::TAU;
    let radius = if range.max > range.min {
        range.min + (range.max - range.min) * rng.gen::<f64>()
    } else {
        range.min
    };
    let (s, c) = math::sin_cos(azimuth);
    Point3::new(radius * sin_polar * c, radius * sin_polar * s, radius * cos_polar)
}

/// Random BS/UE placement: directions uniform on the upper hemisphere,
/// radii uniform in the given ranges. Deterministic for a fixed seed.
pub fn sample_placement(seed: u64, bs_range: DistanceRange, ue_range: DistanceRange) -> Result<Placement> {
    bs_range.check()?;
    ue_range.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bs = sample_on_hemisphere(&mut rng, bs_range);
    let ue = sample_on_hemisphere(&mut rng, ue_range);
    Placement::new(bs, ue)
}

/// RIS element positions, row-major in `(n1, n2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementGrid {
    pub n1: usize,
    pub n2: usize,
    pub spacing: f64,
    pub positions: Vec<Point3>,
}

impl ElementGrid {
    /// Flat index of element `(i1, i2)`, both zero-based.
    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n2 + i2
    }

    /// Zero-based `(i1, i2)` of flat index `n`.
    #[inline]
    pub fn coords(&self, n: usize) -> (usize, usize) {
        (n / self.n2, n % self.n2)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Half-widths of the area tiled by the element cells.
    pub fn half_extent(&self) -> (f64, f64) {
        (self.n1 as f64 * self.spacing / 2.0, self.n2 as f64 * self.spacing / 2.0)
    }
}

/// Element `(n1, n2)` sits at `((n1 - (N1+1)/2) d, (n2 - (N2+1)/2) d, 0)`.
pub fn build_ris_grid(config: &SystemConfig) -> ElementGrid {
    let d = config.spacing_m;
    let c1 = (config.n1 as f64 + 1.0) / 2.0;
    let c2 = (config.n2 as f64 + 1.0) / 2.0;
    let mut positions = Vec::with_capacity(config.n1 * config.n2);
    for i1 in 1..=config.n1 {
        for i2 in 1..=config.n2 {
            positions.push(Point3::new((i1 as f64 - c1) * d, (i2 as f64 - c2) * d, 0.0));
        }
    }
    ElementGrid {
        n1: config.n1,
        n2: config.n2,
        spacing: d,
        positions,
    }
}

/// Extremes of the BS-RIS-UE propagation delay over the elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayExtent {
    pub t_min: f64,
    pub t_max: f64,
    pub spread: f64,
}

pub fn delay_extent(grid: &ElementGrid, p: &Placement) -> DelayExtent {
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    for &r in &grid.positions {
        let t = p.route_length(r) / SPEED_OF_LIGHT;
        t_min = t_min.min(t);
        t_max = t_max.max(t);
    }
    DelayExtent {
        t_min,
        t_max,
        spread: (t_max - t_min).max(0.0),
    }
}

/// A planar BS array centred on the BS position.
///
/// Antenna `(m1, m2)` sits at `r_bs + o1 * u1 + o2 * u2` with
/// `o_i = (m_i - (N_i + 1)/2) * spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsArray {
    pub u1: Point3,
    pub u2: Point3,
    pub n1: usize,
    pub n2: usize,
    pub spacing: f64,
}

impl BsArray {
    pub fn new(u1: Point3, u2: Point3, n1: usize, n2: usize, spacing: f64) -> Result<Self> {
        let unit = |v: Point3| (v.norm() - 1.0).abs() < 1e-9;
        if !unit(u1) || !unit(u2) || u1.dot(u2).abs() > 1e-9 {
            return Err(Error::InvalidConfig("BS array axes must be orthonormal".into()));
        }
        if n1 == 0 || n2 == 0 || !(spacing >= 0.0) {
            return Err(Error::InvalidConfig("BS array needs positive counts and spacing >= 0".into()));
        }
        Ok(Self { u1, u2, n1, n2, spacing })
    }

    /// An array whose broadside points from `bs` at the RIS centre.
    pub fn facing_origin(bs: Point3, n1: usize, n2: usize, spacing: f64) -> Result<Self> {
        let boresight = (Point3::ORIGIN - bs).normalized();
        let helper = if boresight.z.abs() < 0.9 {
            Point3::new(0.0, 0.0, 1.0)
        } else {
            Point3::new(1.0, 0.0, 0.0)
        };
        let u1 = boresight.cross(helper).normalized();
        let u2 = boresight.cross(u1).normalized();
        Self::new(u1, u2, n1, n2, spacing)
    }

    /// Near-square factorisation `n1 * n2 = count` with `n1 <= n2`.
    pub fn square_counts(count: usize) -> (usize, usize) {
        let mut n1 = (sqrt(count as f64) as usize).max(1);
        while n1 > 1 && !count.is_multiple_of(n1) {
            n1 -= 1;
        }
        (n1, count / n1.max(1))
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Antenna offsets from the array centre.
    pub fn offsets(&self) -> Vec<Point3> {
        let c1 = (self.n1 as f64 + 1.0) / 2.0;
        let c2 = (self.n2 as f64 + 1.0) / 2.0;
        let mut out = Vec::with_capacity(self.len());
        for m1 in 1..=self.n1 {
            for m2 in 1..=self.n2 {
                out.push(
                    self.u1 * ((m1 as f64 - c1) * self.spacing)
                        + self.u2 * ((m2 as f64 - c2) * self.spacing),
                );
            }
        }
        out
    }

    /// Direction cosines `(xi1, xi2)` of the RIS centre seen from the BS.
    pub fn aod_cosines(&self, bs: Point3) -> (f64, f64) {
        let dir = (Point3::ORIGIN - bs).normalized();
        (self.u1.dot(dir), self.u2.dot(dir))
    }
}
