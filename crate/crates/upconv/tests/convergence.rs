//! Slow convergence studies: the sampled-grid route to the fidelity against
//! the adaptive one, and the large-segment-count limits pinned from the
//! first computed decay curves.

use upconv::conversion::optimal_conditions;
use upconv::kernel::SecondOrderKernel;
use upconv::poling::{commuting_limit_check, f2_of_n};
use upconv::quad::{GridState, QuadratureSpec};
use upconv::series::fidelity_f2;
use upconv::spectral::{CrystalConfig, DispersionProfile};

fn paper_profile() -> DispersionProfile {
    DispersionProfile::extended_phase_matched(5.6e-9, 5.2e-9).unwrap()
}

#[test]
fn grid_fidelity_at_512_matches_adaptive_within_1e3() {
    let profile = paper_profile();
    let sigma = 1e9;
    let (length, _, _) = optimal_conditions(&profile, sigma).unwrap();
    let kern = SecondOrderKernel::new(profile, length, sigma);
    let amp_spec = QuadratureSpec { rel_tol: 1e-9, ..Default::default() };

    let taylor = GridState::sample(sigma, 6.0, 512, |ns, ni| {
        kern.reduce(ns, ni).unwrap().plane_integral().unwrap()
    });
    let dyson = GridState::sample(sigma, 6.0, 512, |ns, ni| {
        kern.reduce(ns, ni).unwrap().ordered_erf_form(&amp_spec).unwrap()
    });
    let overlap = taylor.inner_product(&dyson).unwrap();
    let f2_grid = overlap.norm_sqr() / (taylor.norm_sqr() * dyson.norm_sqr());

    let crystal = CrystalConfig::new(length, 1, 1.0, 0.0, sigma).unwrap();
    let f2_adaptive = fidelity_f2(
        &profile,
        &crystal,
        6.0,
        &QuadratureSpec::default().with_rel_tol(1e-6),
    )
    .unwrap()
    .f2;
    assert!(
        (f2_grid - f2_adaptive).abs() < 1e-3,
        "grid {f2_grid} vs adaptive {f2_adaptive}"
    );
}

#[test]
fn wide_grid_captures_the_state_to_boundary_tolerance() {
    // the boundary-capture invariant needs ±11σ for these Gaussian tails
    let profile = paper_profile();
    let sigma = 1e9;
    let (length, _, _) = optimal_conditions(&profile, sigma).unwrap();
    let kern = SecondOrderKernel::new(profile, length, sigma);
    let taylor = GridState::sample(sigma, 11.0, 128, |ns, ni| {
        kern.reduce(ns, ni).unwrap().plane_integral().unwrap()
    });
    assert!(taylor.norm_sqr().is_finite());
    let ratio = taylor.boundary_to_peak_ratio();
    assert!(ratio < 1e-12, "boundary/peak = {ratio:.2e}");
}

#[test]
fn fidelity_approaches_unity_by_fifty_segments() {
    let profile = paper_profile();
    let spec = QuadratureSpec::default().with_rel_tol(2e-4);
    let f2 = f2_of_n(50, &profile, 1e9, 6.0, &spec).unwrap().f2;
    // measured 0.999984 on the first run
    assert!(f2 > 0.999, "f2(50) = {f2}");
    assert!(f2 <= 1.0 + 1e-9);
}

#[test]
fn ordering_deviation_pins_at_large_segment_counts() {
    let profile = paper_profile();
    let spec = QuadratureSpec { rel_tol: 1e-7, ..Default::default() };
    // measured decay: 0.7317 (1), 0.1590 (2), 0.0283 (10), 0.0141 (20),
    // 0.0056 (50); the curve crosses 1e-2 near N = 28
    let d20 = commuting_limit_check(20, &profile, 1e9, &spec).unwrap();
    let d50 = commuting_limit_check(50, &profile, 1e9, &spec).unwrap();
    assert!((d20 - 0.0141).abs() < 5e-4, "dev(20) = {d20}");
    assert!(d20 < 2e-2);
    assert!((d50 - 0.0056).abs() < 5e-4, "dev(50) = {d50}");
    assert!(d50 < 1e-2);
    assert!(d50 < d20);
}
