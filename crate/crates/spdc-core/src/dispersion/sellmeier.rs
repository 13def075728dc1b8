use crate::{Error, Result, Scalar};

/// One resonance of the thermal pole series. `strength_t` and `position_t`
/// multiply the thermal factor f of the parent series.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole<F> {
    pub strength: F,
    pub strength_t: F,
    pub position: F,
    pub position_t: F,
}

/// Temperature-dependent Sellmeier series in the shape
///
/// ```text
/// n^2(lam, T) = c0 + c1 f - c2 lam^2
///             + sum_k (p_k + q_k f) / (lam^2 - (r_k + s_k f)^2)
/// f = (T - t_a) (T + t_b)
/// ```
///
/// with `lam` in micrometers and `T` in degrees Celsius. The published
/// lithium niobate forms supported by [`SellmeierSeries::from_named`] all
/// lower onto this shape; evaluating the lowered series reproduces the
/// published formula term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalPoleSeries<F> {
    pub constant: F,
    pub constant_t: F,
    pub quadratic: F,
    pub poles: Vec<Pole<F>>,
    pub t_a: F,
    pub t_b: F,
}

impl<F: Scalar> ThermalPoleSeries<F> {
    pub fn n_squared(&self, lam_um: F, t_celsius: F) -> F {
        let f = (t_celsius - self.t_a) * (t_celsius + self.t_b);
        let l2 = lam_um * lam_um;
        let mut acc = self.constant + self.constant_t * f - self.quadratic * l2;
        for pole in &self.poles {
            let position = pole.position + pole.position_t * f;
            acc = acc + (pole.strength + pole.strength_t * f) / (l2 - position * position);
        }
        acc
    }
}

/// Bulk index model: either a thermal pole series or a constant index used
/// by toy and test configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum SellmeierSeries<F> {
    Pole(ThermalPoleSeries<F>),
    Constant(F),
}

impl<F: Scalar> SellmeierSeries<F> {
    /// Bulk refractive index at `lam_um` micrometers and `t_celsius`.
    pub fn evaluate(&self, lam_um: F, t_celsius: F) -> F {
        match self {
            SellmeierSeries::Constant(n) => *n,
            SellmeierSeries::Pole(series) => series.n_squared(lam_um, t_celsius).sqrt(),
        }
    }

    /// Build a series from a named published functional form and its ordered
    /// coefficient list.
    ///
    /// Supported forms:
    /// * `"edwards_lawrence_1984"`, coefficients `[A1, A2, A3, A4, B1, B2,
    ///   B3, T0]` of n^2 = A1 + (A2 + B1 F)/(lam^2 - (A3 + B2 F)^2) + B3 F
    ///   - A4 lam^2 with F = (T - T0)(T + T0 + 546).
    /// * `"jundt_1997"`, coefficients `[a1..a6, b1..b4]` of n^2 = a1 + b1 f
    ///   + (a2 + b2 f)/(lam^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(lam^2 - a5^2)
    ///   - a6 lam^2 with f = (T - 24.5)(T + 570.82).
    /// * `"thermal_pole_series"`, raw coefficients `[c0, c1, c2, t_a, t_b,
    ///   then p, q, r, s per pole]`.
    /// * `"constant"`, coefficients `[n0]`.
    pub fn from_named(form: &str, c: &[F]) -> Result<Self> {
        match form {
            "edwards_lawrence_1984" => {
                expect_len(form, c, 8)?;
                let t0 = c[7];
                Ok(SellmeierSeries::Pole(ThermalPoleSeries {
                    constant: c[0],
                    constant_t: c[6],
                    quadratic: c[3],
                    poles: vec![Pole {
                        strength: c[1],
                        strength_t: c[4],
                        position: c[2],
                        position_t: c[5],
                    }],
                    t_a: t0,
                    t_b: t0 + F::lit(546.0),
                }))
            }
            "jundt_1997" => {
                expect_len(form, c, 10)?;
                Ok(SellmeierSeries::Pole(ThermalPoleSeries {
                    constant: c[0],
                    constant_t: c[6],
                    quadratic: c[5],
                    poles: vec![
                        Pole {
                            strength: c[1],
                            strength_t: c[7],
                            position: c[2],
                            position_t: c[8],
                        },
                        Pole {
                            strength: c[3],
                            strength_t: c[9],
                            position: c[4],
                            position_t: F::zero(),
                        },
                    ],
                    t_a: F::lit(24.5),
                    t_b: F::lit(570.82),
                }))
            }
            "thermal_pole_series" => {
                if c.len() < 5 || (c.len() - 5) % 4 != 0 {
                    return Err(Error::Config(format!(
                        "form '{form}' expects 5 + 4k coefficients, got {}",
                        c.len()
                    )));
                }
                let poles = c[5..]
                    .chunks(4)
                    .map(|p| Pole {
                        strength: p[0],
                        strength_t: p[1],
                        position: p[2],
                        position_t: p[3],
                    })
                    .collect();
                Ok(SellmeierSeries::Pole(ThermalPoleSeries {
                    constant: c[0],
                    constant_t: c[1],
                    quadratic: c[2],
                    poles,
                    t_a: c[3],
                    t_b: c[4],
                }))
            }
            "constant" => {
                expect_len(form, c, 1)?;
                Ok(SellmeierSeries::Constant(c[0]))
            }
            other => Err(Error::Config(format!(
                "unknown Sellmeier form '{other}'; known forms: edwards_lawrence_1984, jundt_1997, thermal_pole_series, constant"
            ))),
        }
    }
}

fn expect_len<F>(form: &str, c: &[F], n: usize) -> Result<()> {
    if c.len() != n {
        return Err(Error::Config(format!(
            "form '{form}' expects {n} coefficients, got {}",
            c.len()
        )));
    }
    Ok(())
}
