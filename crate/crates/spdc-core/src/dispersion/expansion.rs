use crate::{Error, Result, Scalar};

/// Relative thermal expansion of macroscopic lengths (poling period, chip
/// length), pinned to zero at a reference temperature and held exactly
/// constant below `freeze_below_k`, where expansion data typically stops and
/// the material is effectively rigid.
///
/// The underlying curve is a polynomial in `(T - pivot_k)` with powers
/// starting at 1; the relative expansion is the difference of that curve
/// between the requested and the reference temperature, so
/// `epsilon(reference) = 0` holds exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionModel<F> {
    reference_temperature_k: F,
    freeze_below_k: F,
    pivot_k: F,
    poly: Vec<F>,
}

impl<F: Scalar> ExpansionModel<F> {
    pub fn new(
        reference_temperature_k: F,
        freeze_below_k: F,
        pivot_k: F,
        poly: Vec<F>,
    ) -> Result<Self> {
        for &v in [reference_temperature_k, freeze_below_k, pivot_k]
            .iter()
            .chain(poly.iter())
        {
            if !v.is_finite() {
                return Err(Error::invalid("expansion model parameters must be finite"));
            }
        }
        if reference_temperature_k < F::zero() || freeze_below_k < F::zero() {
            return Err(Error::invalid(
                "expansion model temperatures must be non-negative",
            ));
        }
        if freeze_below_k > reference_temperature_k {
            return Err(Error::invalid(
                "expansion freeze_below must not exceed the reference temperature",
            ));
        }
        Ok(ExpansionModel {
            reference_temperature_k,
            freeze_below_k,
            pivot_k,
            poly,
        })
    }

    /// A model with no temperature dependence at all, for toy configurations.
    pub fn rigid() -> Self {
        ExpansionModel {
            reference_temperature_k: F::lit(295.0),
            freeze_below_k: F::zero(),
            pivot_k: F::lit(295.0),
            poly: Vec::new(),
        }
    }

    pub fn reference_temperature_k(&self) -> F {
        self.reference_temperature_k
    }

    pub fn freeze_below_k(&self) -> F {
        self.freeze_below_k
    }

    fn raw(&self, t_k: F) -> F {
        let x = t_k - self.pivot_k;
        let mut acc = F::zero();
        for &c in self.poly.iter().rev() {
            acc = (acc + c) * x;
        }
        acc
    }

    /// Relative expansion `epsilon(T)`, dimensionless.
    pub fn epsilon(&self, temperature_k: F) -> Result<F> {
        if !temperature_k.is_finite() || temperature_k < F::zero() {
            return Err(Error::invalid(format!(
                "temperature {temperature_k} K must be finite and non-negative"
            )));
        }
        let t_eff = temperature_k.max(self.freeze_below_k);
        Ok(self.raw(t_eff) - self.raw(self.reference_temperature_k))
    }

    /// Length at temperature: `reference_length * (1 + epsilon(T))`.
    pub fn scaled_length(&self, reference_length_m: F, temperature_k: F) -> Result<F> {
        if !(reference_length_m > F::zero()) {
            return Err(Error::invalid("reference length must be positive"));
        }
        Ok(reference_length_m * (F::one() + self.epsilon(temperature_k)?))
    }

    /// Inverse of [`scaled_length`]: the reference-temperature length that
    /// would expand to `length_at_t_m` at the given temperature.
    pub fn reference_length(&self, length_at_t_m: F, temperature_k: F) -> Result<F> {
        if !(length_at_t_m > F::zero()) {
            return Err(Error::invalid("length must be positive"));
        }
        Ok(length_at_t_m / (F::one() + self.epsilon(temperature_k)?))
    }
}
