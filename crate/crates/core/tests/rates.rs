use ati_core::kinematics::{derive_params, Atom, LaserField};
use ati_core::rates::*;
use ati_core::spectra::Mode;
use ati_core::Error;
use proptest::prelude::*;

fn hydrogen() -> Atom {
    Atom::hydrogenic(1).unwrap()
}

fn desk() -> LaserField {
    LaserField::circular(0.01, 1.0).unwrap()
}

#[test]
fn field_off_rate_is_zero() {
    for f in [LaserField::circular(0.01, 0.0).unwrap(), LaserField::linear(0.01, 0.0).unwrap()] {
        let r = rate_direct(&f, &hydrogen(), &DirectGrid::default(), Mode::On).unwrap();
        assert_eq!(r.w_total, 0.0);
    }
}

#[test]
fn node_doubling_stays_within_estimate() {
    let g1 = DirectGrid { theta_panels: 8, ..DirectGrid::default() };
    let g2 = DirectGrid { theta_panels: 16, ..DirectGrid::default() };
    let a = rate_direct(&desk(), &hydrogen(), &g1, Mode::On).unwrap();
    let b = rate_direct(&desk(), &hydrogen(), &g2, Mode::On).unwrap();
    let est = a.grid_report.unwrap().error_estimate;
    assert!((a.w_total - b.w_total).abs() <= est, "{} {} {est}", a.w_total, b.w_total);
    assert!(a.w_total > 0.0 && a.warnings.is_empty());
}

#[test]
fn error_estimates_shrink_by_at_least_two() {
    let est = |panels| {
        let g = DirectGrid { theta_panels: panels, nodes_per_panel: 2, ..DirectGrid::default() };
        let r = rate_direct(&desk(), &hydrogen(), &g, Mode::On).unwrap();
        r.grid_report.unwrap().error_estimate / r.w_total
    };
    let (e1, e2, e3) = (est(2), est(4), est(8));
    assert!(e1 / e2 >= 2.0, "{e1} {e2}");
    assert!(e2 / e3 >= 2.0 || e3 < 1e-12, "{e2} {e3}");
}

#[test]
fn linear_direct_rate_reports_phi_panels() {
    let f = LaserField::linear(0.02, 0.5).unwrap();
    let g = DirectGrid { theta_panels: 4, phi_panels: 8, ..DirectGrid::default() };
    let r = rate_direct(&f, &hydrogen(), &g, Mode::Off).unwrap();
    assert!(r.w_total > 0.0);
    assert_eq!(r.grid_report.unwrap().phi_panels, 16);
}

#[test]
fn rescattering_raises_rate_by_at_most_nine() {
    let g = DirectGrid { theta_panels: 8, ..DirectGrid::default() };
    let on = rate_direct(&desk(), &hydrogen(), &g, Mode::On).unwrap().w_total;
    let off = rate_direct(&desk(), &hydrogen(), &g, Mode::Off).unwrap().w_total;
    let q = on / off;
    assert!((1.0..=9.0).contains(&q), "{q}");
}

#[test]
fn channel_cap_is_enforced() {
    let g = DirectGrid { channel_cap: 10, ..DirectGrid::default() };
    assert!(matches!(rate_direct(&desk(), &hydrogen(), &g, Mode::On), Err(Error::ChannelExplosion { .. })));
}

#[test]
fn halving_omega_doubles_peak_and_narrows_it() {
    let a = saddle_point(&desk(), &hydrogen()).unwrap();
    let b = saddle_point(&LaserField::circular(0.005, 1.0).unwrap(), &hydrogen()).unwrap();
    assert!((b.n_m / a.n_m - 2.0).abs() < 1e-3);
    assert!((b.delta_n / a.delta_n - 2f64.powf(2.0 / 3.0)).abs() < 1e-3);
    assert!((a.delta_theta / b.delta_theta - 2f64.cbrt()).abs() < 1e-3);
    assert!(b.delta_n / b.n_m < a.delta_n / a.n_m);
}

#[test]
fn airy_integrand_peaks_at_saddle() {
    let f = LaserField::circular(0.005, 1.0).unwrap();
    let s = saddle_point(&f, &hydrogen()).unwrap();
    let (mut best, mut at) = (0.0, (0.0, 0.0));
    for i in -256..=256 {
        let n = s.n_m + s.delta_n * i as f64 / 64.0;
        for j in -64..=64 {
            let t = s.theta_m + s.delta_theta * j as f64 / 32.0;
            let v = airy_integrand(&f, &hydrogen(), n, t);
            if v > best {
                best = v;
                at = (n, t);
            }
        }
    }
    assert!((at.0 - s.n_m).abs() <= s.delta_n, "{at:?} vs {} {}", s.n_m, s.theta_m);
    assert!((at.1 - s.theta_m).abs() <= s.delta_theta);
}

#[test]
fn airy_rate_needs_circular_and_large_peak() {
    assert!(matches!(
        rate_airy(&LaserField::linear(0.005, 1.0).unwrap(), &hydrogen()),
        Err(Error::AsymptoticsInvalid(_))
    ));
    assert!(matches!(
        rate_airy(&LaserField::circular(0.05, 1.0).unwrap(), &hydrogen()),
        Err(Error::AsymptoticsInvalid(_))
    ));
}

#[test]
fn degenerate_saddle_below_threshold() {
    let f = LaserField::circular(0.01, 1e-3).unwrap();
    assert!(matches!(saddle_point(&f, &hydrogen()), Err(Error::DegenerateSaddle { .. })));
}

#[test]
fn peak_angle_tracks_mean_velocity() {
    let tiny = Atom::with_binding_energy(1, 1e-9).unwrap();
    for xi in [0.3, 1.0, 3.0] {
        let f = LaserField::circular(0.01, xi).unwrap();
        let s = saddle_point(&f, &tiny).unwrap();
        let v = derive_params(&f, &tiny).unwrap().v_mean;
        assert!((s.theta_m.cos() - v).abs() < 1e-6, "xi={xi}");

        let h = hydrogen();
        let s = saddle_point(&f, &h).unwrap();
        let p = derive_params(&f, &h).unwrap();
        let bound = 2.0 * h.e_b / (xi * p.m_star);
        assert!((s.theta_m.cos() - p.v_mean).abs() < bound, "xi={xi}");
    }
}

#[test]
fn exact_and_asymptotic_peak_channel_agree_to_binding_order() {
    let s = saddle_point(&desk(), &hydrogen()).unwrap();
    let rel = s.n_m / s.n_m_asymptotic - 1.0;
    // first order in E_B: (1 + 2 E_B/(m*^2 - 1)) (1 + E_B)
    let e = hydrogen().e_b;
    let first = e * (1.0 + 2.0 / (desk().m_star_sq() - 1.0));
    assert!((rel / first - 1.0).abs() < 1e-3, "{rel} {first}");
}

#[test]
fn y_is_stationary_at_located_minimum() {
    for (w, xi) in [(0.01, 1.0), (0.005, 1.0), (0.01, 2.0), (1e-4, 0.3)] {
        let f = LaserField::circular(w, xi).unwrap();
        let s = saddle_point(&f, &hydrogen()).unwrap();
        let st = s.stationary.unwrap();
        let y = |n, t| airy_argument(&f, &hydrogen(), n, t).unwrap();
        // derivatives per peak width, fourth-order central differences
        let eps = 1e-3;
        let d =
            |g: &dyn Fn(f64) -> f64| (g(-2.0 * eps) - 8.0 * g(-eps) + 8.0 * g(eps) - g(2.0 * eps)).abs() / (12.0 * eps);
        let dn = d(&|u| y(st.n + u * s.delta_n, st.theta));
        let dt = d(&|u| y(st.n, st.theta + u * s.delta_theta));
        assert!(dn <= 1e-6 * s.y_m && dt <= 1e-6 * s.y_m, "w={w} xi={xi}: {dn} {dt} {}", s.y_m);
        assert!(st.y <= s.y_at_peak);
    }
}

#[test]
fn laplace_matches_strongfield_closed_form() {
    let f = desk();
    let s = saddle_point(&f, &hydrogen()).unwrap();
    assert!(s.y_m <= 0.05);
    let lap = rate_laplace(&f, &hydrogen()).unwrap();
    let closed = rate_closed(&f, &hydrogen(), None).unwrap();
    assert_eq!(closed.method, Method::StrongfieldClosed);
    assert!((lap / closed.w_total - 1.0).abs() < 0.25);
}

#[test]
fn strongfield_doubling_field_scales_as_power() {
    let a = rate_closed(&desk(), &hydrogen(), None).unwrap().w_total;
    let b = rate_closed(&LaserField::circular(0.01, 2.0).unwrap(), &hydrogen(), Some(Regime::MultiphotonStrongfield))
        .unwrap()
        .w_total;
    assert!((b / a / 2f64.powf(-11.0 / 3.0) - 1.0).abs() < 1e-12);
}

#[test]
fn tunneling_closed_form_slope() {
    let (w, e_b, f_at) = (1e-4, hydrogen().e_b, 1.0e-2);
    let f0 = 5e-4;
    let h = 1e-6 * f0;
    let lw = |f: f64| w_tunneling(w, e_b, f, f_at).ln();
    let slope = (lw(f0 + h) - lw(f0 - h)) / (1.0 / (f0 + h) - 1.0 / (f0 - h));
    let want = -2.0 / 3.0 * f_at + 3.0 * f0;
    assert!((slope / want - 1.0).abs() < 1e-6, "{slope} {want}");
}

#[test]
fn closed_form_records_regime() {
    let f = LaserField::circular(3.6137e-8, 0.0601).unwrap();
    let r = rate_closed(&f, &hydrogen(), None).unwrap();
    assert_eq!(r.method, Method::TunnelingClosed);
    assert_eq!(r.regime, Some(Regime::Tunneling));
    assert!(r.w_total > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ym_identity_for_hydrogenic(w in 1e-3f64..0.02, xi in 0.3f64..3.0, z_a in 1u32..3) {
        let a = Atom::hydrogenic(z_a).unwrap();
        let f = LaserField::circular(w, xi).unwrap();
        let s = saddle_point(&f, &a).unwrap();
        let p = derive_params(&f, &a).unwrap();
        let dual = (p.f_at / (2.0 * p.f0)).powf(2.0 / 3.0);
        prop_assert!((s.y_m / dual - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rates_are_nonnegative(w in 1e-3f64..0.05, xi in 0.2f64..3.0) {
        let f = LaserField::circular(w, xi).unwrap();
        if let Ok(r) = rate_closed(&f, &hydrogen(), None) {
            prop_assert!(r.w_total >= 0.0);
        }
        if let Ok(l) = rate_laplace(&f, &hydrogen()) {
            prop_assert!(l >= 0.0);
        }
    }
}
