// Thin wrappers so the rest of the crate reads like std float code.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = libm::fmod(x, m);
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

pub const TAU: f64 = core::f64::consts::TAU;
pub const PI: f64 = core::f64::consts::PI;

/// Wrap an angle into `[0, 2pi)`.
#[inline]
pub fn wrap_phase(x: f64) -> f64 {
    let r = rem_euclid(x, TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wrap an angle into `(-pi, pi]`.
#[inline]
pub fn wrap_signed(x: f64) -> f64 {
    let r = wrap_phase(x + PI) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    powf(10.0, (dbm - 30.0) / 10.0)
}

/// SplitMix64 finaliser, used for per-trial seed derivation.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
