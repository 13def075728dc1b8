use crate::Scalar;

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// 0 degrees Celsius in Kelvin.
pub const CELSIUS_OFFSET_K: f64 = 273.15;

#[inline]
pub fn speed_of_light<F: Scalar>() -> F {
    F::lit(SPEED_OF_LIGHT_M_PER_S)
}

#[inline]
pub fn two_pi<F: Scalar>() -> F {
    F::PI() + F::PI()
}

/// Angular frequency of a vacuum wavelength, omega = 2 pi c / lambda [rad/s].
#[inline]
pub fn angular_frequency<F: Scalar>(wavelength_m: F) -> F {
    two_pi::<F>() * speed_of_light::<F>() / wavelength_m
}

/// Vacuum wavelength of an angular frequency [m]. Inverse of
/// [`angular_frequency`].
#[inline]
pub fn vacuum_wavelength<F: Scalar>(omega_rad_per_s: F) -> F {
    two_pi::<F>() * speed_of_light::<F>() / omega_rad_per_s
}

#[inline]
pub fn kelvin_to_celsius<F: Scalar>(t_k: F) -> F {
    t_k - F::lit(CELSIUS_OFFSET_K)
}
