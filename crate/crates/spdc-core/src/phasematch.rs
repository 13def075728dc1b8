//! Quasi-phase-matching momentum balance and its solvers.
//!
//! Conventions: the pump and signal propagate in the TE model, the idler in
//! the TM model. The poling grating contributes with a minus sign, so the
//! mismatch reads
//!
//! ```text
//! dk'(lp, ls, li, T) = 2 pi [ nTE(lp,T)/lp - nTE(ls,T)/ls - nTM(li,T)/li - 1/Lambda(T) ]
//! ```
//!
//! in rad/m, with the poling period thermally scaled through the crystal's
//! expansion model. The idler is always eliminated through energy
//! conservation `1/li = 1/lp - 1/ls`.

use crate::constants::two_pi;
use crate::dispersion::{DispersionModel, ExpansionModel};
use crate::{Error, Result, Scalar};

/// Crystal and waveguide geometry at the reference temperature, together
/// with the dispersion models needed to evaluate the momentum balance.
#[derive(Debug, Clone)]
pub struct CrystalSpec<F> {
    pub poling_period_ref_m: F,
    pub length_ref_m: F,
    pub expansion: ExpansionModel<F>,
    pub te: DispersionModel<F>,
    pub tm: DispersionModel<F>,
}

impl<F: Scalar> CrystalSpec<F> {
    pub fn new(
        poling_period_ref_m: F,
        length_ref_m: F,
        expansion: ExpansionModel<F>,
        te: DispersionModel<F>,
        tm: DispersionModel<F>,
    ) -> Result<Self> {
        if !(poling_period_ref_m > F::zero() && poling_period_ref_m.is_finite()) {
            return Err(Error::invalid("poling period must be positive and finite"));
        }
        if !(length_ref_m > F::zero() && length_ref_m.is_finite()) {
            return Err(Error::invalid("crystal length must be positive and finite"));
        }
        Ok(CrystalSpec {
            poling_period_ref_m,
            length_ref_m,
            expansion,
            te,
            tm,
        })
    }

    /// Poling period at temperature [m].
    pub fn grating_period_m(&self, temperature_k: F) -> Result<F> {
        self.expansion
            .scaled_length(self.poling_period_ref_m, temperature_k)
    }
}

/// A solved signal/idler pair. `multiple_roots` flags that other roots were
/// present in the search window and a branch rule picked this one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasematchSolution<F> {
    pub signal_wavelength_m: F,
    pub idler_wavelength_m: F,
    pub temperature_k: F,
    pub residual_mismatch_rad_per_m: F,
    pub multiple_roots: bool,
}

/// Which root to report when the search window contains several.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchRule<F> {
    /// Prefer the root with the signal on the long side of degeneracy
    /// (`ls > 2 lp`); falls back to the largest root otherwise.
    SignalLong,
    /// Pick the root closest to a previous signal wavelength. Used by
    /// [`temperature_sweep`] to keep branches continuous.
    NearestTo(F),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<F> {
    /// Signal-wavelength search window [m].
    pub window_m: (F, F),
    /// Coarse scan step [m] used to bracket sign changes.
    pub coarse_step_m: F,
    /// Acceptable residual mismatch [rad/m].
    pub tolerance_rad_per_m: F,
    pub branch: BranchRule<F>,
}

impl<F: Scalar> Default for SolverOptions<F> {
    fn default() -> Self {
        SolverOptions {
            window_m: (F::lit(1200e-9), F::lit(1900e-9)),
            coarse_step_m: F::lit(0.5e-9),
            tolerance_rad_per_m: F::lit(1e-4),
            branch: BranchRule::SignalLong,
        }
    }
}

/// Idler wavelength from energy conservation, `1/li = 1/lp - 1/ls`.
pub fn idler_for<F: Scalar>(pump_m: F, signal_m: F) -> Result<F> {
    if !(pump_m > F::zero() && signal_m > F::zero()) {
        return Err(Error::invalid("wavelengths must be positive"));
    }
    if signal_m <= pump_m {
        return Err(Error::invalid(
            "signal wavelength must exceed the pump wavelength",
        ));
    }
    Ok(F::one() / (F::one() / pump_m - F::one() / signal_m))
}

/// Shared final step of the mismatch so that every code path rounds
/// identically: 2 pi (pump_term - signal_term - idler_term - 1/Lambda).
#[inline]
pub(crate) fn mismatch_from_terms<F: Scalar>(
    pump_term: F,
    signal_term: F,
    idler_term: F,
    inverse_grating: F,
) -> F {
    two_pi::<F>() * (pump_term - signal_term - idler_term - inverse_grating)
}

/// Momentum mismatch dk' [rad/m] for an explicit wavelength triple.
pub fn phase_mismatch<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump_m: F,
    signal_m: F,
    idler_m: F,
    temperature_k: F,
) -> Result<F> {
    if !(pump_m > F::zero() && signal_m > F::zero() && idler_m > F::zero()) {
        return Err(Error::invalid("wavelengths must be positive"));
    }
    let grating = crystal.grating_period_m(temperature_k)?;
    let pump_term = crystal.te.refractive_index(pump_m, temperature_k)? / pump_m;
    let signal_term = crystal.te.refractive_index(signal_m, temperature_k)? / signal_m;
    let idler_term = crystal.tm.refractive_index(idler_m, temperature_k)? / idler_m;
    Ok(mismatch_from_terms(
        pump_term,
        signal_term,
        idler_term,
        F::one() / grating,
    ))
}

/// Mismatch as a function of the signal wavelength alone, with the idler
/// eliminated through energy conservation.
fn mismatch_of_signal<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump_m: F,
    signal_m: F,
    temperature_k: F,
) -> Result<F> {
    let idler_m = idler_for(pump_m, signal_m)?;
    phase_mismatch(crystal, pump_m, signal_m, idler_m, temperature_k)
}

/// Find the phase-matched signal/idler pair at one temperature.
///
/// Scans the configured window for sign changes of the mismatch, refines
/// each bracket by bisection, then applies the branch rule. Points where the
/// dispersion models cannot be evaluated (validity windows) are skipped
/// rather than treated as failures.
pub fn solve_phasematch<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump_m: F,
    temperature_k: F,
    opts: &SolverOptions<F>,
) -> Result<PhasematchSolution<F>> {
    let (lo, hi) = opts.window_m;
    if !(lo > F::zero() && hi > lo && opts.coarse_step_m > F::zero()) {
        return Err(Error::invalid(
            "solver window must satisfy 0 < min < max with a positive coarse step",
        ));
    }
    let span = hi - lo;
    let n_steps = (span / opts.coarse_step_m)
        .ceil()
        .to_usize()
        .ok_or_else(|| Error::invalid("solver window resolves to too many scan points"))?;
    let n_points = n_steps + 1;

    let mut evaluated = 0usize;
    let mut prev: Option<(F, F)> = None;
    let mut roots: Vec<F> = Vec::new();
    for k in 0..n_points {
        let x = if k == n_steps {
            hi
        } else {
            lo + opts.coarse_step_m * F::from_usize(k).unwrap()
        };
        let f = match mismatch_of_signal(crystal, pump_m, x, temperature_k) {
            Ok(v) if v.is_finite() => v,
            _ => {
                prev = None;
                continue;
            }
        };
        evaluated += 1;
        if f.is_zero() {
            roots.push(x);
            prev = Some((x, f));
            continue;
        }
        if let Some((xa, fa)) = prev {
            if (fa > F::zero()) != (f > F::zero()) {
                roots.push(refine_root(crystal, pump_m, temperature_k, xa, fa, x, opts));
            }
        }
        prev = Some((x, f));
    }

    if roots.is_empty() {
        let edge = |x: F| match mismatch_of_signal(crystal, pump_m, x, temperature_k) {
            Ok(v) => format!("{:e}", v.as_f64()),
            Err(_) => "unevaluable".to_string(),
        };
        return Err(Error::NoPhasematch(format!(
            "no sign change of the mismatch for pump {:e} m at {} K across [{:e}, {:e}] m ({} of {} scan points evaluable; mismatch {} rad/m at the lower edge, {} at the upper)",
            pump_m.as_f64(),
            temperature_k,
            lo.as_f64(),
            hi.as_f64(),
            evaluated,
            n_points,
            edge(lo),
            edge(hi),
        )));
    }

    let multiple = roots.len() > 1;
    let signal = select_branch(&roots, pump_m, &opts.branch);
    let idler = idler_for(pump_m, signal)?;
    let residual = phase_mismatch(crystal, pump_m, signal, idler, temperature_k)?;
    Ok(PhasematchSolution {
        signal_wavelength_m: signal,
        idler_wavelength_m: idler,
        temperature_k,
        residual_mismatch_rad_per_m: residual,
        multiple_roots: multiple,
    })
}

fn refine_root<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump_m: F,
    temperature_k: F,
    mut a: F,
    mut fa: F,
    mut b: F,
    opts: &SolverOptions<F>,
) -> F {
    let half = F::lit(0.5);
    let stop = opts.tolerance_rad_per_m * half;
    let mut mid = (a + b) * half;
    for _ in 0..200 {
        mid = (a + b) * half;
        if mid <= a || mid >= b {
            break;
        }
        let fm = match mismatch_of_signal(crystal, pump_m, mid, temperature_k) {
            Ok(v) => v,
            Err(_) => break,
        };
        if fm.abs() <= stop {
            return mid;
        }
        if (fa > F::zero()) != (fm > F::zero()) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    mid
}

fn select_branch<F: Scalar>(roots: &[F], pump_m: F, rule: &BranchRule<F>) -> F {
    match rule {
        BranchRule::SignalLong => {
            let degeneracy = pump_m + pump_m;
            let lower = degeneracy * (F::one() - F::lit(1e-12));
            roots
                .iter()
                .copied()
                .filter(|&r| r >= lower)
                .fold(None, |best: Option<F>, r| match best {
                    Some(b) if b <= r => Some(b),
                    _ => Some(r),
                })
                .unwrap_or_else(|| {
                    roots
                        .iter()
                        .copied()
                        .fold(roots[0], |best, r| if r > best { r } else { best })
                })
        }
        BranchRule::NearestTo(target) => roots
            .iter()
            .copied()
            .fold(roots[0], |best, r| {
                if (r - *target).abs() < (best - *target).abs() {
                    r
                } else {
                    best
                }
            }),
    }
}

/// One sweep point: gaps hold the temperature with no solution, which lets
/// callers keep grids aligned instead of failing the whole sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<F> {
    pub temperature_k: F,
    pub solution: Option<PhasematchSolution<F>>,
}

/// Solve on an inclusive, evenly spaced temperature grid, keeping the branch
/// continuous from point to point. Per-point failures become gaps.
pub fn temperature_sweep<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump_m: F,
    t_min_k: F,
    t_max_k: F,
    steps: usize,
    opts: &SolverOptions<F>,
) -> Result<Vec<SweepPoint<F>>> {
    if !(t_min_k < t_max_k) {
        return Err(Error::invalid(
            "sweep requires t_min strictly below t_max; the bounds are not reordered",
        ));
    }
    if steps < 2 {
        return Err(Error::invalid("sweep requires at least 2 steps"));
    }
    let denom = F::from_usize(steps - 1).unwrap();
    let mut out = Vec::with_capacity(steps);
    let mut last_signal: Option<F> = None;
    for k in 0..steps {
        let frac = F::from_usize(k).unwrap() / denom;
        let t = if k == steps - 1 {
            t_max_k
        } else {
            t_min_k + (t_max_k - t_min_k) * frac
        };
        let point_opts = SolverOptions {
            branch: match last_signal {
                Some(prev) => BranchRule::NearestTo(prev),
                None => opts.branch,
            },
            ..opts.clone()
        };
        let solution = solve_phasematch(crystal, pump_m, t, &point_opts).ok();
        if let Some(sol) = &solution {
            last_signal = Some(sol.signal_wavelength_m);
        }
        out.push(SweepPoint {
            temperature_k: t,
            solution,
        });
    }
    Ok(out)
}

/// Poling period that phase-matches the requested signal at the given
/// temperature. The poling period stored in `crystal` is ignored; its
/// dispersion and expansion models are used. Returns the period at the
/// expansion model's reference temperature.
pub fn design_poling_period<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump_m: F,
    signal_m: F,
    temperature_k: F,
) -> Result<F> {
    let idler_m = idler_for(pump_m, signal_m)?;
    let pump_term = crystal.te.refractive_index(pump_m, temperature_k)? / pump_m;
    let signal_term = crystal.te.refractive_index(signal_m, temperature_k)? / signal_m;
    let idler_term = crystal.tm.refractive_index(idler_m, temperature_k)? / idler_m;
    let term = pump_term - signal_term - idler_term;
    // Guards the division: a term this small means the dispersive parts
    // cancel and no finite grating can phase-match the triple.
    if term <= F::lit(1e-2) {
        return Err(Error::NotQuasiPhasematchable {
            term_per_m: term.as_f64(),
        });
    }
    let period_at_t = F::one() / term;
    crystal.expansion.reference_length(period_at_t, temperature_k)
}
