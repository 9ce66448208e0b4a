//! Float helpers routed through `libm` so results do not depend on the `std` feature.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `(cos θ, sin θ)` for `θ = 2π·num/den`, reducing the fraction first.
pub(crate) fn unit_root(num: usize, den: usize) -> (f64, f64) {
    let num = num % den;
    let theta = 2.0 * core::f64::consts::PI * (num as f64) / (den as f64);
    (libm::cos(theta), libm::sin(theta))
}
