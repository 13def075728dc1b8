//! Momentum-balance solver, tuning sweep and inverse design checked against
//! independently computed operating points for the shipped configuration.

mod common;

use common::{assert_abs, assert_rel, crystal, energy_defect, pump, solver};
use proptest::prelude::*;
use spdc_core::phasematch::{
    design_poling_period, idler_for, phase_mismatch, solve_phasematch, temperature_sweep,
    SolverOptions,
};

const PUMP_M: f64 = 778e-9;

#[test]
fn room_temperature_operating_point() {
    let c = crystal();
    let sol = solve_phasematch(&c, PUMP_M, 295.0, &solver()).unwrap();
    assert_rel(
        sol.signal_wavelength_m,
        1586.1408681869507e-9,
        1e-12,
        "signal at 295 K",
    );
    assert_rel(
        sol.idler_wavelength_m,
        1526.9832822809017e-9,
        1e-12,
        "idler at 295 K",
    );
    assert!(sol.residual_mismatch_rad_per_m.abs() <= 1e-4);
    assert!(!sol.multiple_roots);
    assert!(energy_defect(PUMP_M, sol.signal_wavelength_m, sol.idler_wavelength_m) < 1e-12);
}

#[test]
fn cryogenic_operating_point_and_shift() {
    let c = crystal();
    let warm = solve_phasematch(&c, PUMP_M, 295.0, &solver()).unwrap();
    let cold = solve_phasematch(&c, PUMP_M, 4.7, &solver()).unwrap();
    assert_rel(
        cold.signal_wavelength_m,
        1494.4506306648252e-9,
        1e-12,
        "signal at 4.7 K",
    );
    assert_rel(
        cold.idler_wavelength_m,
        1622.8369979636013e-9,
        1e-12,
        "idler at 4.7 K",
    );
    // Cooling pulls the signal to shorter and the idler to longer
    // wavelengths; the split is roughly 92 nm for this chip.
    assert!(cold.signal_wavelength_m < warm.signal_wavelength_m);
    assert!(cold.idler_wavelength_m > warm.idler_wavelength_m);
    let shift_nm = (warm.signal_wavelength_m - cold.signal_wavelength_m) * 1e9;
    assert_abs(shift_nm, 91.6902375221255, 1e-6, "signal shift 295 K -> 4.7 K");
    assert!((70.0..=110.0).contains(&shift_nm));
}

#[test]
fn degeneracy_design_round_trip() {
    let c = crystal();
    let target = 1556e-9;
    let period = design_poling_period(&c, PUMP_M, target, 295.0).unwrap();
    assert_rel(period, 9.033635707430969e-6, 1e-12, "degenerate poling period");

    let designed = spdc_core::phasematch::CrystalSpec {
        poling_period_ref_m: period,
        ..c
    };
    let sol = solve_phasematch(&designed, PUMP_M, 295.0, &solver()).unwrap();
    assert_abs(
        sol.signal_wavelength_m * 1e9,
        1556.0,
        1e-3,
        "designed signal wavelength [nm]",
    );
    assert_abs(
        sol.idler_wavelength_m * 1e9,
        1556.0,
        1e-3,
        "designed idler wavelength [nm]",
    );
}

#[test]
fn sweep_is_monotone_and_energy_conserving() {
    let c = crystal();
    let points = temperature_sweep(&c, PUMP_M, 4.7, 295.0, 31, &solver()).unwrap();
    assert_eq!(points.len(), 31);
    assert_eq!(points[0].temperature_k, 4.7);
    assert_eq!(points[30].temperature_k, 295.0);
    let mut last_signal = 0.0;
    let mut last_idler = f64::INFINITY;
    for p in &points {
        let sol = p
            .solution
            .as_ref()
            .unwrap_or_else(|| panic!("no root at {} K", p.temperature_k));
        assert!(sol.signal_wavelength_m > last_signal, "signal not increasing");
        assert!(sol.idler_wavelength_m < last_idler, "idler not decreasing");
        assert!(sol.residual_mismatch_rad_per_m.abs() <= 1e-4);
        assert!(
            energy_defect(PUMP_M, sol.signal_wavelength_m, sol.idler_wavelength_m) < 1e-12
        );
        last_signal = sol.signal_wavelength_m;
        last_idler = sol.idler_wavelength_m;
    }
}

#[test]
fn sweep_reports_gaps_when_window_excludes_the_branch() {
    let c = crystal();
    // The long-signal branch sits above 1556 nm for this chip; a window
    // capped below that has no admissible root.
    let opts = SolverOptions {
        window_m: (1200e-9, 1300e-9),
        ..solver()
    };
    let points = temperature_sweep(&c, PUMP_M, 100.0, 300.0, 9, &opts).unwrap();
    assert_eq!(points.len(), 9);
    assert!(points.iter().all(|p| p.solution.is_none()));
}

/// Fixed synthetic indices pin the full momentum balance to one number:
/// n_te(pump) = 2.25, n_te(signal) = 2.20, n_tm(idler) = 2.15 with a 9 um
/// grating. Reference value computed by hand from
/// 2 pi (n_p/l_p - n_s/l_s - n_i/l_i - 1/Lambda).
#[test]
fn fixed_index_mismatch_pin() {
    let toml = r#"
[material]
name = "fixed index toy"

[[material.models]]
label = "te_ramp"
polarization = "TE"
form = "constant"
coefficients = [2.25]
validity_window_um = [0.1, 5.0]
correction = { wavelength_anchor_um = 0.778, temperature_anchor_k = 295.0, wavelength_poly = [0.0, -0.06188118811881188], temperature_poly = [] }

[[material.models]]
label = "tm_flat"
polarization = "TM"
form = "constant"
coefficients = [2.15]
validity_window_um = [0.1, 5.0]

[expansion]
reference_temperature_k = 295.0
freeze_below_k = 60.0
pivot_k = 298.15
polynomial = []
"#;
    let m = spdc_core::config::MaterialFile::parse(toml)
        .unwrap()
        .build()
        .unwrap();
    let c = spdc_core::phasematch::CrystalSpec::new(
        9e-6,
        24.4e-3,
        m.expansion.clone(),
        m.te.clone(),
        m.tm.clone(),
    )
    .unwrap();
    // The ramp hits 2.20 at the signal wavelength: slope -0.05 / 0.808 per um.
    assert_rel(m.te.refractive_index(0.778e-6, 295.0).unwrap(), 2.25, 1e-15, "n_te(pump)");
    assert_rel(m.te.refractive_index(1.586e-6, 295.0).unwrap(), 2.20, 1e-12, "n_te(signal)");

    let signal = 1.586e-6;
    let idler = idler_for(PUMP_M, signal).unwrap();
    let dk = phase_mismatch(&c, PUMP_M, signal, idler, 295.0).unwrap();
    assert_rel(dk, -8.8607099879841770e4, 1e-12, "fixed-index mismatch");
}

/// With a uniform index the chromatic terms cancel exactly through energy
/// conservation and only the grating term survives.
#[test]
fn uniform_index_reduces_to_grating_term() {
    let toml = r#"
[material]
name = "uniform toy"

[[material.models]]
label = "n2_te"
polarization = "TE"
form = "constant"
coefficients = [2.0]
validity_window_um = [0.1, 5.0]

[[material.models]]
label = "n2_tm"
polarization = "TM"
form = "constant"
coefficients = [2.0]
validity_window_um = [0.1, 5.0]

[expansion]
reference_temperature_k = 295.0
freeze_below_k = 60.0
pivot_k = 298.15
polynomial = []
"#;
    let m = spdc_core::config::MaterialFile::parse(toml)
        .unwrap()
        .build()
        .unwrap();
    let c = spdc_core::phasematch::CrystalSpec::new(
        9e-6,
        24.4e-3,
        m.expansion.clone(),
        m.te.clone(),
        m.tm.clone(),
    )
    .unwrap();
    let grating = 2.0 * std::f64::consts::PI / 9e-6;
    for signal in [1.4e-6, 1.55e-6, 1.7e-6] {
        let idler = idler_for(PUMP_M, signal).unwrap();
        let dk = phase_mismatch(&c, PUMP_M, signal, idler, 295.0).unwrap();
        assert_abs(dk, -grating, 1e-6, "uniform-index mismatch");
    }

    // No temperature or wavelength dependence is left to build a grating
    // from, so the design problem has no positive-period solution.
    assert!(design_poling_period(&c, PUMP_M, 1.556e-6, 295.0).is_err());
}

#[test]
fn solve_rejects_pump_outside_validity() {
    let c = crystal();
    assert!(solve_phasematch(&c, 0.2e-6, 295.0, &solver()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The tuning curve has no jumps: a millikelvin step moves the signal
    /// root by well under a picometer.
    #[test]
    fn sweep_is_continuous_in_temperature(t in 10.0f64..290.0) {
        let c = crystal();
        let opts = solver();
        let a = solve_phasematch(&c, PUMP_M, t, &opts).unwrap();
        let b = solve_phasematch(&c, PUMP_M, t + 1e-3, &opts).unwrap();
        let dl = (b.signal_wavelength_m - a.signal_wavelength_m).abs();
        prop_assert!(dl < 5e-12, "signal moved {} m over 1 mK at {} K", dl, t);
        prop_assert!(b.signal_wavelength_m > a.signal_wavelength_m);
    }

    /// Energy conservation holds pointwise for every solver output.
    #[test]
    fn solver_outputs_conserve_energy(t in 4.7f64..300.0) {
        let c = crystal();
        let sol = solve_phasematch(&c, PUMP_M, t, &solver()).unwrap();
        prop_assert!(
            energy_defect(PUMP_M, sol.signal_wavelength_m, sol.idler_wavelength_m) < 1e-12
        );
    }

    /// idler_for is the exact conjugate map: applying it twice returns the
    /// starting wavelength to rounding.
    #[test]
    fn idler_map_is_involutive(signal_nm in 1300.0f64..1540.0) {
        let signal = signal_nm * 1e-9;
        let idler = idler_for(PUMP_M, signal).unwrap();
        let back = idler_for(PUMP_M, idler).unwrap();
        prop_assert!((back - signal).abs() < 1e-20);
    }
}
