//! Index and expansion models evaluated against independently computed
//! reference values for the shipped lithium niobate data set.

mod common;

use common::{assert_rel, material};
use proptest::prelude::*;
use spdc_core::config::MaterialFile;
use spdc_core::Error;

/// Waveguide-corrected indices for the shipped titanium-indiffused models.
/// Reference values computed with an independent implementation of the same
/// coefficient tables.
#[test]
fn shipped_indices_match_reference() {
    let m = material();
    // (wavelength um, temperature K, n_te, n_tm)
    let table = [
        (0.778, 295.0, 2.262674547358788, 2.193780048437234),
        (1.586, 295.0, 2.214506085967544, 2.136137650539383),
        (1.527, 295.0, 2.216501225216016, 2.139007512189042),
        (0.778, 4.7, 2.261585368380410, 2.187063369129504),
        (1.494, 4.7, 2.217029184051486, 2.134876231603993),
        (1.623, 4.7, 2.212693980328196, 2.128660078056590),
        (1.556, 150.0, 2.215067782601016, 2.133402684507655),
    ];
    for (lam_um, t_k, n_te, n_tm) in table {
        let lam_m = lam_um * 1e-6;
        let te = m.te.refractive_index(lam_m, t_k).unwrap();
        let tm = m.tm.refractive_index(lam_m, t_k).unwrap();
        assert_rel(te, n_te, 1e-12, &format!("n_te({lam_um} um, {t_k} K)"));
        assert_rel(tm, n_tm, 1e-12, &format!("n_tm({lam_um} um, {t_k} K)"));
    }
}

/// Same coefficient tables with the waveguide corrections stripped, pinned
/// against the published bulk fits they reproduce.
#[test]
fn bulk_sellmeier_forms_match_published_fits() {
    let toml = r#"
[material]
name = "bulk congruent lithium niobate"

[[material.models]]
label = "bulk_no"
polarization = "TE"
form = "edwards_lawrence_1984"
coefficients = [4.9048, 0.11775, 0.21802, 0.027153, 2.2314e-8, -2.9671e-8, 2.1429e-8, 24.5]
validity_window_um = [0.4, 3.1]

[[material.models]]
label = "bulk_ne"
polarization = "TM"
form = "jundt_1997"
coefficients = [5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2, 4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5]
validity_window_um = [0.4, 5.0]

[expansion]
reference_temperature_k = 295.0
freeze_below_k = 60.0
pivot_k = 298.15
polynomial = [1.54e-5, 5.3e-9]
"#;
    let m = MaterialFile::parse(toml).unwrap().build().unwrap();
    let no_155 = m.te.refractive_index(1.55e-6, 295.0).unwrap();
    let no_778 = m.te.refractive_index(0.778e-6, 295.0).unwrap();
    let ne_155 = m.tm.refractive_index(1.55e-6, 295.0).unwrap();
    assert_rel(no_155, 2.211225346275621, 1e-12, "bulk n_o(1.55 um, 295 K)");
    assert_rel(no_778, 2.258183247358788, 1e-12, "bulk n_o(0.778 um, 295 K)");
    assert_rel(ne_155, 2.137762570679718, 1e-12, "bulk n_e(1.55 um, 295 K)");
}

/// The TM correction polynomials are anchored at 1.556 um and 295 K, so at
/// that exact point the corrected model must coincide with the bulk fit.
#[test]
fn corrections_vanish_at_their_anchor() {
    let shipped = material();
    let bulk_toml = r#"
[material]
name = "bulk"

[[material.models]]
label = "bulk_no"
polarization = "TE"
form = "edwards_lawrence_1984"
coefficients = [4.9048, 0.11775, 0.21802, 0.027153, 2.2314e-8, -2.9671e-8, 2.1429e-8, 24.5]
validity_window_um = [0.4, 3.1]

[[material.models]]
label = "bulk_ne"
polarization = "TM"
form = "jundt_1997"
coefficients = [5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2, 4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5]
validity_window_um = [0.4, 5.0]

[expansion]
reference_temperature_k = 295.0
freeze_below_k = 60.0
pivot_k = 298.15
polynomial = [1.54e-5, 5.3e-9]
"#;
    let bulk = MaterialFile::parse(bulk_toml).unwrap().build().unwrap();
    let lam = 1.556e-6;
    let tm_shipped = shipped.tm.refractive_index(lam, 295.0).unwrap();
    let tm_bulk = bulk.tm.refractive_index(lam, 295.0).unwrap();
    // Both polynomials are zero at the anchor, so the sum is bit-identical.
    assert_eq!(tm_shipped, tm_bulk, "TM correction nonzero at its anchor");

    // The TE correction is a constant ridge offset and never vanishes.
    let te_shipped = shipped.te.refractive_index(lam, 295.0).unwrap();
    let te_bulk = bulk.te.refractive_index(lam, 295.0).unwrap();
    assert_rel(
        te_shipped - te_bulk,
        4.4913e-3,
        1e-12,
        "constant TE ridge offset",
    );
}

#[test]
fn expansion_reference_point_and_cryo_value() {
    let m = material();
    // Exactly zero at the reference temperature by construction.
    assert_eq!(m.expansion.epsilon(295.0).unwrap(), 0.0);
    // Below the freeze point the strain is held at its 60 K value.
    let eps47 = m.expansion.epsilon(4.7).unwrap();
    assert_eq!(eps47, m.expansion.epsilon(60.0).unwrap());
    assert_eq!(eps47, m.expansion.epsilon(20.0).unwrap());
    assert_rel(eps47, -3.3184608500000006e-3, 1e-12, "epsilon(4.7 K)");
}

#[test]
fn cryogenic_grating_period_contracts() {
    let crystal = common::crystal();
    // Identity at the reference temperature.
    assert_eq!(
        crystal.grating_period_m(295.0).unwrap(),
        crystal.poling_period_ref_m
    );
    let cold = crystal.grating_period_m(4.7).unwrap();
    assert_rel(cold, 8.950200221567e-6, 1e-12, "grating period at 4.7 K");
    assert!(cold < crystal.poling_period_ref_m);
}

#[test]
fn validity_window_and_temperature_range_enforced() {
    let m = material();
    assert!(matches!(
        m.te.refractive_index(0.3e-6, 295.0),
        Err(Error::WavelengthOutOfWindow { .. })
    ));
    assert!(matches!(
        m.te.refractive_index(3.2e-6, 295.0),
        Err(Error::WavelengthOutOfWindow { .. })
    ));
    assert!(matches!(
        m.tm.refractive_index(5.1e-6, 295.0),
        Err(Error::WavelengthOutOfWindow { .. })
    ));
    assert!(m.te.refractive_index(1.5e-6, -1.0).is_err());
    assert!(m.te.refractive_index(1.5e-6, 401.0).is_err());
    assert!(m.te.refractive_index(f64::NAN, 295.0).is_err());
}

#[test]
fn non_physical_index_is_rejected() {
    let toml = r#"
[material]
name = "degenerate toy"

[[material.models]]
label = "sinking"
polarization = "TE"
form = "constant"
coefficients = [0.1]
validity_window_um = [0.1, 5.0]
correction = { wavelength_anchor_um = 0.0, temperature_anchor_k = 295.0, wavelength_poly = [0.0, -1.0], temperature_poly = [] }

[[material.models]]
label = "flat"
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
    let m = MaterialFile::parse(toml).unwrap().build().unwrap();
    // n = 0.1 - lambda_um goes negative past 0.1 um.
    let err = m.te.refractive_index(1.55e-6, 295.0).unwrap_err();
    assert!(
        err.to_string().contains("non-physical"),
        "unexpected error: {err}"
    );
    // The TM model stays fine.
    assert_eq!(m.tm.refractive_index(1.55e-6, 295.0).unwrap(), 2.0);
}

/// A clamped bulk extrapolation holds the Sellmeier part constant below the
/// cutoff while the analytic policy keeps moving.
#[test]
fn bulk_clamp_policy_freezes_low_temperature_tail() {
    let clamped_toml = r#"
[material]
name = "clamped variant"

[[material.models]]
label = "clamped_no"
polarization = "TE"
form = "edwards_lawrence_1984"
coefficients = [4.9048, 0.11775, 0.21802, 0.027153, 2.2314e-8, -2.9671e-8, 2.1429e-8, 24.5]
validity_window_um = [0.4, 3.1]
clamp_bulk_below_k = 100.0

[[material.models]]
label = "flat"
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
    let clamped = MaterialFile::parse(clamped_toml).unwrap().build().unwrap();
    let lam = 1.55e-6;
    let at_100 = clamped.te.refractive_index(lam, 100.0).unwrap();
    assert_eq!(clamped.te.refractive_index(lam, 50.0).unwrap(), at_100);
    assert_eq!(clamped.te.refractive_index(lam, 4.7).unwrap(), at_100);

    // The shipped set extrapolates analytically, so it keeps a slope.
    let shipped = material();
    let a = shipped.te.refractive_index(lam, 50.0).unwrap();
    let b = shipped.te.refractive_index(lam, 100.0).unwrap();
    assert!(a != b, "analytic extrapolation should not be flat");
}

/// Thermo-optic slope sanity for the shipped set: indices move smoothly and
/// by small amounts over the cryogenic span.
#[test]
fn index_shift_from_room_to_cryo_is_small() {
    let m = material();
    for lam_um in [0.778, 1.45, 1.556, 1.65] {
        let lam = lam_um * 1e-6;
        let warm = m.te.refractive_index(lam, 295.0).unwrap();
        let cold = m.te.refractive_index(lam, 4.7).unwrap();
        let d = warm - cold;
        assert!(
            d > 0.0 && d < 0.02,
            "TE index shift {d} at {lam_um} um out of expected range"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Expansion strain is constant below the freeze temperature.
    #[test]
    fn expansion_frozen_below_cutoff(t in 0.0f64..59.999) {
        let m = material();
        prop_assert_eq!(m.expansion.epsilon(t).unwrap(), m.expansion.epsilon(60.0).unwrap());
    }

    /// Strain grows monotonically with temperature above the freeze point
    /// for the shipped positive expansion polynomial.
    #[test]
    fn expansion_monotone_above_cutoff(t in 60.0f64..294.0) {
        let m = material();
        let e1 = m.expansion.epsilon(t).unwrap();
        let e2 = m.expansion.epsilon(t + 1.0).unwrap();
        prop_assert!(e2 > e1);
    }

    /// Indices from the shipped models are finite and inside a physically
    /// plausible band over the full operating envelope.
    #[test]
    fn shipped_indices_plausible(lam_um in 0.45f64..3.0, t in 4.0f64..300.0) {
        let m = material();
        let n = m.te.refractive_index(lam_um * 1e-6, t).unwrap();
        prop_assert!(n > 2.0 && n < 2.5, "n_te = {} at {} um, {} K", n, lam_um, t);
    }
}
