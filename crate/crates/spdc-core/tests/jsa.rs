//! Joint spectral intensity pipeline: envelope convention, factorization,
//! normalization contracts and the bandwidth numbers for the shipped chip,
//! all pinned against an independent implementation.

mod common;

use common::{assert_abs, assert_rel, crystal, linspace, pump, solver};
use spdc_core::constants::SPEED_OF_LIGHT_M_PER_S;
use spdc_core::jsa::{
    marginal_spectrum, phasematching_function, pump_envelope, sampled_fwhm, simulate_jsi, sinc,
    JsiGrid, MarginalAxis, Normalization,
};
use spdc_core::phasematch::solve_phasematch;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

fn omega(wavelength_m: f64) -> f64 {
    TWO_PI * SPEED_OF_LIGHT_M_PER_S / wavelength_m
}

#[test]
fn sinc_basics() {
    assert_eq!(sinc(0.0f64), 1.0);
    for m in 1..=20 {
        let x = m as f64 * PI;
        assert!(sinc(x).abs() < 1e-15, "sinc({m} pi) = {:e}", sinc(x));
    }
    for x in [1e-8f64, 0.3, 1.0, 2.2, 14.7, 300.0] {
        assert!((sinc(x) - sinc(-x)).abs() <= f64::EPSILON, "sinc not even at {x}");
        assert!(sinc(x).abs() <= 1.0);
    }
    // Half-power point of the squared kernel, |sinc(x)|^2 = 1/2.
    let x_half = 1.39155737825151f64;
    assert_abs(sinc(x_half).powi(2), 0.5, 1e-12, "sinc^2 half-power point");
}

/// The envelope is Gaussian in the summed frequency with sigma defined so
/// the pump's intensity FWHM in wavelength maps onto the frequency axis:
/// at a detuning of half the frequency FWHM the envelope is exactly 1/2.
#[test]
fn pump_envelope_convention() {
    let p = pump();
    let w_p = omega(778e-9);
    // Frequency-domain FWHM of the pump from the wavelength bandwidth.
    let dw = TWO_PI * SPEED_OF_LIGHT_M_PER_S * 3.2e-9 / (778e-9 * 778e-9);

    assert_eq!(pump_envelope(&p, w_p / 2.0, w_p / 2.0).unwrap(), 1.0);
    let half_up = pump_envelope(&p, w_p / 2.0, w_p / 2.0 + dw / 2.0).unwrap();
    let half_dn = pump_envelope(&p, w_p / 2.0, w_p / 2.0 - dw / 2.0).unwrap();
    assert_rel(half_up, 0.5, 1e-12, "envelope at +FWHM/2");
    assert_rel(half_dn, 0.5, 1e-12, "envelope at -FWHM/2");

    // One standard deviation out: exp(-1/2).
    let sigma = dw / (2.0 * (2.0 * 2.0f64.ln()).sqrt());
    let one_sigma = pump_envelope(&p, w_p / 2.0, w_p / 2.0 + sigma).unwrap();
    assert_rel(one_sigma, 0.60653065971263342, 1e-12, "envelope at 1 sigma");
}

/// A raw-counts grid is the elementwise product of the two factors.
#[test]
fn jsi_factorizes_into_envelope_and_phasematching() {
    let c = crystal();
    let p = pump();
    let signal = linspace(1571e-9, 1601e-9, 21);
    let idler = linspace(1512e-9, 1542e-9, 17);
    let grid = simulate_jsi(&c, &p, 7.3e-3, 295.0, &signal, &idler, Normalization::RawCounts)
        .unwrap();
    for (i, ls) in signal.iter().enumerate() {
        for (j, li) in idler.iter().enumerate() {
            let ws = omega(*ls);
            let wi = omega(*li);
            let alpha = pump_envelope(&p, ws, wi).unwrap();
            let phi = phasematching_function(&c, 7.3e-3, ws, wi, 295.0).unwrap();
            let expect = (alpha * phi) * (alpha * phi);
            assert_rel(
                grid.value(i, j),
                expect,
                1e-12,
                &format!("cell ({i}, {j})"),
            );
        }
    }
}

#[test]
fn normalization_postconditions() {
    let c = crystal();
    let p = pump();
    let signal = linspace(1571e-9, 1601e-9, 31);
    let idler = linspace(1512e-9, 1542e-9, 25);

    let peak = simulate_jsi(&c, &p, 7.3e-3, 295.0, &signal, &idler, Normalization::PeakOne)
        .unwrap();
    let max = peak.intensities().iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(max, 1.0, "peak_one maximum must be exactly 1");

    let sum_grid = simulate_jsi(&c, &p, 7.3e-3, 295.0, &signal, &idler, Normalization::SumOne)
        .unwrap();
    let sum: f64 = sum_grid.intensities().iter().sum();
    assert_abs(sum, 1.0, 1e-12, "sum_one total");

    let raw = simulate_jsi(&c, &p, 7.3e-3, 295.0, &signal, &idler, Normalization::RawCounts)
        .unwrap();
    assert!(raw.intensities().iter().all(|v| *v >= 0.0 && v.is_finite()));

    assert_eq!(Normalization::parse("peak_one").unwrap(), Normalization::PeakOne);
    assert_eq!(Normalization::parse("sum_one").unwrap(), Normalization::SumOne);
    assert_eq!(Normalization::parse("raw_counts").unwrap(), Normalization::RawCounts);
    assert!(Normalization::parse("bogus").is_err());
}

/// Reference grid for the room-temperature chip: peak cell location, the
/// energy-conservation ridge and both marginal widths.
#[test]
fn room_temperature_grid_matches_reference() {
    let c = crystal();
    let p = pump();
    let signal = linspace(1526e-9, 1646e-9, 481);
    let idler = linspace(1487e-9, 1567e-9, 321);
    let grid = simulate_jsi(&c, &p, 7.3e-3, 295.0, &signal, &idler, Normalization::PeakOne)
        .unwrap();

    let (pi_s, pi_i) = grid.peak_index();
    let peak_s = grid.signal_axis_m()[pi_s];
    let peak_i = grid.idler_axis_m()[pi_i];
    assert_abs(peak_s, 1586.5e-9, 1e-15, "peak cell signal wavelength");
    assert_abs(peak_i, 1526.75e-9, 1e-15, "peak cell idler wavelength");

    // The maximum sits on the energy-conservation ridge to within one cell.
    let conj = spdc_core::phasematch::idler_for(778e-9, peak_s).unwrap();
    let idler_step = idler[1] - idler[0];
    assert!(
        (peak_i - conj).abs() <= idler_step,
        "peak cell {peak_i:e} more than one cell from the ridge {conj:e}"
    );

    let ms = marginal_spectrum(&grid, MarginalAxis::Signal);
    let mi = marginal_spectrum(&grid, MarginalAxis::Idler);
    let fs = sampled_fwhm(&ms).unwrap() * 1e9;
    let fi = sampled_fwhm(&mi).unwrap() * 1e9;
    assert_abs(fs, 28.939951192, 1e-4, "signal marginal FWHM [nm]");
    assert_abs(fi, 18.184524988, 1e-4, "idler marginal FWHM [nm]");
    // Published bandwidths for this configuration, with measurement slack.
    assert!((24.06..=40.10).contains(&fs));
    assert!((12.95..=21.59).contains(&fi));
}

/// Cut across the phase-matching ridge at fixed signal wavelength: halving
/// the interaction length roughly doubles the width. Reference numbers from
/// an independent evaluation on the same 5601-point axis.
#[test]
fn halving_length_doubles_ridge_cut() {
    let c = crystal();
    let p = pump();
    let sol = solve_phasematch(&c, 778e-9, 4.7, &solver()).unwrap();
    let ws = omega(sol.signal_wavelength_m);
    let idler_axis = linspace(1560e-9, 1700e-9, 5601);

    let cut = |length_m: f64| -> f64 {
        let pts: Vec<(f64, f64)> = idler_axis
            .iter()
            .map(|li| {
                let wi = omega(*li);
                let a = pump_envelope(&p, ws, wi).unwrap();
                let f = phasematching_function(&c, length_m, ws, wi, 4.7).unwrap();
                (*li, (a * f) * (a * f))
            })
            .collect();
        sampled_fwhm(&pts).unwrap() * 1e9
    };

    let w_full = cut(7.3e-3);
    let w_half = cut(3.65e-3);
    assert_abs(w_full, 1.919587467, 1e-4, "cut FWHM at 7.3 mm [nm]");
    assert_abs(w_half, 3.648587110, 1e-4, "cut FWHM at 3.65 mm [nm]");
    assert_abs(w_half / w_full, 1.900714175, 1e-5, "width ratio");
}

/// In the mismatch coordinate the width scaling is exact: the squared
/// kernel's FWHM doubles when the length halves.
#[test]
fn mismatch_space_reciprocity_is_exact() {
    // Upper half-power crossing of sinc(dk L / 2)^2 found by bisection.
    let half_crossing = |length_m: f64| -> f64 {
        let f = |dk: f64| sinc(dk * length_m / 2.0).powi(2) - 0.5;
        let mut lo = 0.0f64;
        let mut hi = TWO_PI / length_m; // first zero; f < 0 there
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo + hi
    };
    let l = 7.3e-3;
    let fwhm_full = half_crossing(l); // symmetric kernel: 2 * crossing / 2
    let fwhm_half = half_crossing(l / 2.0);
    assert_rel(fwhm_half / fwhm_full, 2.0, 1e-6, "mismatch-space FWHM ratio");
}

#[test]
fn separable_grid_marginals_factor() {
    let u = [1.0, 2.0, 3.0, 0.5];
    let v = [0.25, 1.0, 0.5];
    let signal: Vec<f64> = (0..u.len()).map(|i| 1500e-9 + i as f64 * 1e-9).collect();
    let idler: Vec<f64> = (0..v.len()).map(|j| 1500e-9 + j as f64 * 1e-9).collect();
    let mut intensity = Vec::new();
    for ui in u {
        for vj in v {
            intensity.push(ui * vj);
        }
    }
    let grid = JsiGrid::new(signal, idler, intensity, Normalization::RawCounts).unwrap();
    let sum_v: f64 = v.iter().sum();
    let sum_u: f64 = u.iter().sum();
    for (i, (_, y)) in marginal_spectrum(&grid, MarginalAxis::Signal).iter().enumerate() {
        assert_rel(*y, u[i] * sum_v, 1e-12, "signal marginal");
    }
    for (j, (_, y)) in marginal_spectrum(&grid, MarginalAxis::Idler).iter().enumerate() {
        assert_rel(*y, v[j] * sum_u, 1e-12, "idler marginal");
    }
}

#[test]
fn symmetric_grid_marginals_mirror() {
    let n = 7;
    let axis: Vec<f64> = (0..n).map(|i| 1550e-9 + i as f64 * 1e-9).collect();
    let mut intensity = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            intensity[i * n + j] = ((i + 1) * (j + 1)) as f64 + (i * j) as f64 * 0.25;
        }
    }
    let grid = JsiGrid::new(axis.clone(), axis, intensity, Normalization::RawCounts).unwrap();
    let ms = marginal_spectrum(&grid, MarginalAxis::Signal);
    let mi = marginal_spectrum(&grid, MarginalAxis::Idler);
    for (a, b) in ms.iter().zip(mi.iter()) {
        assert_eq!(a.0, b.0);
        assert_rel(a.1, b.1, 1e-12, "mirrored marginal");
    }
}

#[test]
fn grid_validation_rejects_malformed_input() {
    // Single-point axis.
    assert!(JsiGrid::new(
        vec![1550e-9],
        vec![1550e-9, 1551e-9],
        vec![1.0, 1.0],
        Normalization::RawCounts
    )
    .is_err());
    // Non-monotone axis.
    assert!(JsiGrid::new(
        vec![1550e-9, 1550e-9],
        vec![1550e-9, 1551e-9],
        vec![1.0, 1.0, 1.0, 1.0],
        Normalization::RawCounts
    )
    .is_err());
    // Length mismatch.
    assert!(JsiGrid::new(
        vec![1550e-9, 1551e-9],
        vec![1550e-9, 1551e-9],
        vec![1.0, 1.0, 1.0],
        Normalization::RawCounts
    )
    .is_err());
    // Negative intensity.
    assert!(JsiGrid::new(
        vec![1550e-9, 1551e-9],
        vec![1550e-9, 1551e-9],
        vec![1.0, -1.0, 1.0, 1.0],
        Normalization::RawCounts
    )
    .is_err());
    // Claimed peak_one without an exact unit peak.
    assert!(JsiGrid::new(
        vec![1550e-9, 1551e-9],
        vec![1550e-9, 1551e-9],
        vec![0.5, 0.25, 0.1, 0.9],
        Normalization::PeakOne
    )
    .is_err());
    // Empty axes through the simulation entry point.
    let c = crystal();
    let p = pump();
    assert!(simulate_jsi(&c, &p, 7.3e-3, 295.0, &[], &[], Normalization::RawCounts).is_err());
}

#[test]
fn sampled_fwhm_interpolates_linearly() {
    let tri = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)];
    assert_abs(sampled_fwhm(&tri).unwrap(), 1.0, 1e-15, "triangle FWHM");
    // No half-maximum crossing on one side.
    let ramp = [(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)];
    assert!(sampled_fwhm(&ramp).is_err());
}
