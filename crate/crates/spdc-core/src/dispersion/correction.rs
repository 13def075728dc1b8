use crate::Scalar;

/// Additive index correction around an anchor point, meant to absorb what a
/// bulk Sellmeier set cannot know about a particular waveguide:
///
/// ```text
/// corr(lam, T) = sum_k a_k (lam_um - lam0)^k  +  sum_j b_j (T - T0)^j
/// ```
///
/// `a_k` live in `wavelength_poly` (powers start at 0, units per um^k),
/// `b_j` in `temperature_poly` (powers start at 1, units per K^j); the pure
/// temperature part has no constant term so the anchor temperature is where
/// the wavelength polynomial alone describes the correction.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideCorrection<F> {
    pub wavelength_anchor_um: F,
    pub temperature_anchor_k: F,
    pub wavelength_poly: Vec<F>,
    pub temperature_poly: Vec<F>,
}

impl<F: Scalar> WaveguideCorrection<F> {
    /// The zero correction: bulk dispersion only.
    pub fn zero() -> Self {
        WaveguideCorrection {
            wavelength_anchor_um: F::zero(),
            temperature_anchor_k: F::zero(),
            wavelength_poly: Vec::new(),
            temperature_poly: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.wavelength_poly.iter().all(|c| c.is_zero())
            && self.temperature_poly.iter().all(|c| c.is_zero())
    }

    pub fn evaluate(&self, wavelength_m: F, temperature_k: F) -> F {
        let mut acc = F::zero();
        if !self.wavelength_poly.is_empty() {
            let dlam = wavelength_m * F::lit(1e6) - self.wavelength_anchor_um;
            acc = acc + horner(&self.wavelength_poly, dlam);
        }
        if !self.temperature_poly.is_empty() {
            let dt = temperature_k - self.temperature_anchor_k;
            acc = acc + dt * horner(&self.temperature_poly, dt);
        }
        acc
    }
}

fn horner<F: Scalar>(coeffs: &[F], x: F) -> F {
    coeffs
        .iter()
        .rev()
        .fold(F::zero(), |acc, &c| acc * x + c)
}
