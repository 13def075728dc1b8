//! Weighted Gaussian peak fit on a 1-D spectrum.
//!
//! The model is A exp(-(x - c)^2 / (2 s^2)) with zero baseline, minimized in
//! the chi-square sense with per-point weights 1/err^2. The solver is a
//! small Levenberg-Marquardt loop on internally rescaled coordinates
//! (x shifted to the initial center and measured in units of the initial
//! width), which keeps the normal equations well conditioned for
//! nanometer-scale spectra stored in meters.

use super::fwhm_sigma_ratio;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFitResult<F> {
    pub center_m: F,
    pub fwhm_m: F,
    pub amplitude: F,
    pub center_uncertainty_m: F,
    pub fwhm_uncertainty_m: F,
    /// Root-mean-square residual of the fit, on data rescaled so the peak
    /// sample is 1.
    pub residual_rms: F,
    pub iterations: usize,
}

/// Solve a symmetric 3x3 system by Gaussian elimination with partial
/// pivoting. Returns None when the pivot collapses.
fn solve3<F: Scalar>(mut m: [[F; 3]; 3], mut rhs: [F; 3]) -> Option<[F; 3]> {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col].abs() <= F::zero() {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] = m[row][k] - factor * m[col][k];
            }
            rhs[row] = rhs[row] - factor * rhs[col];
        }
    }
    let mut x = [F::zero(); 3];
    for col in (0..3).rev() {
        let mut acc = rhs[col];
        for k in col + 1..3 {
            acc = acc - m[col][k] * x[k];
        }
        if !m[col][col].is_finite() || m[col][col].is_zero() {
            return None;
        }
        x[col] = acc / m[col][col];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Invert a symmetric positive 3x3 matrix column by column.
fn invert3<F: Scalar>(m: [[F; 3]; 3]) -> Option<[[F; 3]; 3]> {
    let mut inv = [[F::zero(); 3]; 3];
    for col in 0..3 {
        let mut e = [F::zero(); 3];
        e[col] = F::one();
        let x = solve3(m, e)?;
        for row in 0..3 {
            inv[row][col] = x[row];
        }
    }
    Some(inv)
}

struct Workspace<F> {
    x: Vec<F>,
    y: Vec<F>,
    w: Vec<F>,
}

fn chi_square<F: Scalar>(ws: &Workspace<F>, p: [F; 3]) -> F {
    let [a, c, s] = p;
    let mut acc = F::zero();
    for k in 0..ws.x.len() {
        let d = ws.x[k] - c;
        let model = a * (-(d * d) / (F::lit(2.0) * s * s)).exp();
        let r = ws.y[k] - model;
        acc = acc + ws.w[k] * r * r;
    }
    acc
}

/// Normal-equation pieces at the current parameters: J^T W J and J^T W r.
fn normal_equations<F: Scalar>(ws: &Workspace<F>, p: [F; 3]) -> ([[F; 3]; 3], [F; 3]) {
    let [a, c, s] = p;
    let mut h = [[F::zero(); 3]; 3];
    let mut g = [F::zero(); 3];
    for k in 0..ws.x.len() {
        let d = ws.x[k] - c;
        let e = (-(d * d) / (F::lit(2.0) * s * s)).exp();
        let model = a * e;
        let j = [e, model * d / (s * s), model * d * d / (s * s * s)];
        let r = ws.y[k] - model;
        let wk = ws.w[k];
        for u in 0..3 {
            g[u] = g[u] + wk * j[u] * r;
            for v in u..3 {
                h[u][v] = h[u][v] + wk * j[u] * j[v];
            }
        }
    }
    for u in 0..3 {
        for v in 0..u {
            h[u][v] = h[v][u];
        }
    }
    (h, g)
}

fn failure<F: Scalar>(reason: &str, iterations: usize, p: [F; 3], ws: &Workspace<F>) -> Error {
    let n = F::from_usize(ws.x.len().max(1)).unwrap();
    let rms = (chi_square(ws, p) / n).sqrt();
    Error::FitFailure {
        reason: reason.to_string(),
        iterations,
        center_m: p[1].as_f64(),
        fwhm_m: (fwhm_sigma_ratio::<F>() * p[2].abs()).as_f64(),
        amplitude: p[0].as_f64(),
        residual_rms: rms.as_f64(),
    }
}

/// Fit a zero-baseline Gaussian to (wavelength, intensity, count_error)
/// samples. Weights are 1/err^2; non-positive or non-finite errors are
/// replaced by the smallest positive error present (or 1 when there is
/// none), which keeps empty-bin tails from dominating Poisson-counted data.
pub fn fit_gaussian<F: Scalar>(spectrum: &[(F, F, F)]) -> Result<GaussianFitResult<F>> {
    if spectrum.len() < 5 {
        return Err(Error::invalid(format!(
            "gaussian fit needs at least 5 points, got {}",
            spectrum.len()
        )));
    }
    for (x, y, _) in spectrum {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid("spectrum contains non-finite samples"));
        }
        if *y < F::zero() {
            return Err(Error::invalid("spectrum intensities must be non-negative"));
        }
    }

    let mut smallest_err: Option<F> = None;
    for (_, _, e) in spectrum {
        if e.is_finite() && *e > F::zero() {
            smallest_err = Some(match smallest_err {
                Some(cur) if cur <= *e => cur,
                _ => *e,
            });
        }
    }
    let fallback = smallest_err.unwrap_or_else(F::one);

    let mut peak = 0usize;
    for (k, p) in spectrum.iter().enumerate() {
        if p.1 > spectrum[peak].1 {
            peak = k;
        }
    }
    let y_max = spectrum[peak].1;
    if !(y_max > F::zero()) {
        let ws = Workspace {
            x: spectrum.iter().map(|p| p.0).collect(),
            y: spectrum.iter().map(|p| p.1).collect(),
            w: vec![F::one(); spectrum.len()],
        };
        return Err(failure(
            "spectrum has no positive intensity",
            0,
            [F::zero(), spectrum[peak].0, F::one()],
            &ws,
        ));
    }

    // Moment-based width seed; falls back to a quarter of the span when the
    // second moment degenerates.
    let x0 = spectrum[peak].0;
    let mut wsum = F::zero();
    let mut var = F::zero();
    for (x, y, _) in spectrum {
        wsum = wsum + *y;
        var = var + *y * (*x - x0) * (*x - x0);
    }
    let span = (spectrum[spectrum.len() - 1].0 - spectrum[0].0).abs();
    let mut sigma0 = (var / wsum).sqrt();
    if !(sigma0 > F::zero() && sigma0.is_finite()) {
        sigma0 = span * F::lit(0.25);
    }
    if !(sigma0 > F::zero() && sigma0.is_finite()) {
        return Err(Error::invalid("spectrum has no usable wavelength spread"));
    }

    // Internal coordinates: x' = (x - x0) / sigma0 so all three parameters
    // are order one.
    let ws = Workspace {
        x: spectrum.iter().map(|p| (p.0 - x0) / sigma0).collect(),
        y: spectrum.iter().map(|p| p.1).collect(),
        w: spectrum
            .iter()
            .map(|p| {
                let e = if p.2.is_finite() && p.2 > F::zero() {
                    p.2
                } else {
                    fallback
                };
                F::one() / (e * e)
            })
            .collect(),
    };

    let mut p = [y_max, F::zero(), F::one()];
    let mut chi = chi_square(&ws, p);
    let mut lambda = F::lit(1e-3);
    let mut iterations = 0usize;
    let mut converged = false;
    'outer: for iter in 0..200 {
        iterations = iter + 1;
        let (h, g) = normal_equations(&ws, p);
        loop {
            let mut damped = h;
            for u in 0..3 {
                let d = h[u][u] * lambda;
                damped[u][u] = h[u][u] + if d.is_zero() { lambda } else { d };
            }
            let Some(step) = solve3(damped, g) else {
                return Err(failure("singular normal equations", iterations, scale_back(p, x0, sigma0), &ws));
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let chi_trial = chi_square(&ws, trial);
            if chi_trial.is_finite() && chi_trial <= chi {
                let drop = chi - chi_trial;
                p = trial;
                let step_norm =
                    (step[0] / (p[0].abs() + F::one())).abs().max(step[1].abs()).max(step[2].abs());
                chi = chi_trial;
                lambda = (lambda * F::lit(0.1)).max(F::lit(1e-15));
                if drop <= F::lit(1e-14) * (chi + F::lit(1e-30)) || step_norm <= F::lit(1e-13) {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda = lambda * F::lit(10.0);
            if lambda > F::lit(1e14) {
                // Cannot improve from here; treat a tiny gradient as done.
                let gnorm = g[0].abs().max(g[1].abs()).max(g[2].abs());
                if gnorm <= F::lit(1e-10) * (chi + F::one()) {
                    converged = true;
                }
                break 'outer;
            }
        }
    }

    if !converged {
        return Err(failure(
            "no convergence within the iteration budget",
            iterations,
            scale_back(p, x0, sigma0),
            &ws,
        ));
    }

    let (h, _) = normal_equations(&ws, p);
    let cov = invert3(h);
    let (center_err_scaled, sigma_err_scaled) = match cov {
        Some(c) => {
            let cc = if c[1][1] > F::zero() { c[1][1].sqrt() } else { F::zero() };
            let cs = if c[2][2] > F::zero() { c[2][2].sqrt() } else { F::zero() };
            (cc, cs)
        }
        None => (F::zero(), F::zero()),
    };

    let n = F::from_usize(ws.x.len()).unwrap();
    let mut rss = F::zero();
    for k in 0..ws.x.len() {
        let d = ws.x[k] - p[1];
        let model = p[0] * (-(d * d) / (F::lit(2.0) * p[2] * p[2])).exp();
        let r = (ws.y[k] - model) / y_max;
        rss = rss + r * r;
    }

    let [amplitude, center, sigma] = scale_back(p, x0, sigma0);
    Ok(GaussianFitResult {
        center_m: center,
        fwhm_m: fwhm_sigma_ratio::<F>() * sigma,
        amplitude,
        center_uncertainty_m: center_err_scaled * sigma0,
        fwhm_uncertainty_m: fwhm_sigma_ratio::<F>() * sigma_err_scaled * sigma0,
        residual_rms: (rss / n).sqrt(),
        iterations,
    })
}

/// Map internal parameters back to wavelength units, folding the sign of
/// the width into its magnitude (the model is even in sigma).
fn scale_back<F: Scalar>(p: [F; 3], x0: F, sigma0: F) -> [F; 3] {
    [p[0], x0 + p[1] * sigma0, (p[2] * sigma0).abs()]
}
