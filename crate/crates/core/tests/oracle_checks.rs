//! Cross-checks of closed forms and quadratures against adaptive integration.

use approx::assert_relative_eq;
use ghquad::{
    adaptive_integrate, cdf_by_integration, gh_cdf, gh_density, gh_quantile, gig_density,
    gig_moment, ig_density, mixture_cdf_bruteforce, normal_cdf, normal_pdf,
    quantile_by_integration, GHParams, GIGParams, IGParams, PRESETS,
};

fn sets() -> Vec<GHParams> {
    PRESETS.iter().map(|p| p.gh_params().unwrap()).collect()
}

#[test]
fn densities_integrate_to_one() {
    let ig = IGParams::new(1.0, 1.0).unwrap();
    let r = adaptive_integrate(
        |x| ig_density(&ig, x).unwrap_or(0.0),
        0.0,
        f64::INFINITY,
        1e-12,
    )
    .unwrap();
    assert!((r.value - 1.0).abs() <= 1e-12);

    let gig = GIGParams::new(1.0, 1.0, 1.0).unwrap();
    let r = adaptive_integrate(
        |x| gig_density(&gig, x).unwrap_or(0.0),
        0.0,
        f64::INFINITY,
        1e-12,
    )
    .unwrap();
    assert!((r.value - 1.0).abs() <= 1e-10);

    for params in sets() {
        let mixing = params.mixing();
        let r = adaptive_integrate(
            |x| gig_density(&mixing, x).unwrap_or(0.0),
            0.0,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() <= 1e-10, "{params:?}: {}", r.value);
        let r = adaptive_integrate(
            |y| gh_density(&params, y).unwrap_or(0.0),
            f64::NEG_INFINITY,
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() <= 1e-10, "{params:?}: {}", r.value);
    }
}

#[test]
fn moments_match_integration() {
    for params in sets() {
        let g = params.mixing();
        // integrate in unit scale where the density is O(1)
        let unit = GIGParams::new(g.sigma(), g.sigma(), g.p).unwrap();
        for r in [-2.0, -1.0, 1.0, 2.0, 3.0] {
            let numeric = adaptive_integrate(
                |x| x.powf(r) * gig_density(&unit, x).unwrap_or(0.0),
                0.0,
                f64::INFINITY,
                1e-13,
            )
            .unwrap()
            .value
                * g.scale().powf(r);
            let closed = gig_moment(&g, r).unwrap();
            assert_relative_eq!(numeric, closed, max_relative = 1e-9);
        }
    }
}

#[test]
fn density_matches_mixture_integral() {
    let s1 = sets()[0];
    let ig = IGParams::new(1.0, 1.0).unwrap();
    let mixed = adaptive_integrate(
        |x| {
            let sd = x.sqrt();
            normal_pdf((0.0 - s1.beta * x) / sd) / sd * ig_density(&ig, x).unwrap_or(0.0)
        },
        0.0,
        f64::INFINITY,
        1e-13,
    )
    .unwrap();
    assert_relative_eq!(
        gh_density(&s1, 0.0).unwrap(),
        mixed.value,
        max_relative = 1e-10
    );
}

#[test]
fn mapping_identity_links_ig_and_normal() {
    // f_IG(x | sigma, sigma) (1 + x) / 2 = n(phi(x)) phi'(x)
    for sigma in [0.5, 1.0, 2.0] {
        let ig = IGParams::new(sigma, sigma).unwrap();
        let s = ghquad::Sigma::new(sigma).unwrap();
        for x in [0.05, 0.5, 1.0, 3.0, 12.0] {
            let lhs = ig_density(&ig, x).unwrap() * (1.0 + x) / 2.0;
            let rhs =
                normal_pdf(ghquad::phi(s, x).unwrap()) * ghquad::jacobian_weight(s, x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }
    // the IG CDF is then the normal CDF of phi with a correction term
    let ig = IGParams::new(1.0, 1.0).unwrap();
    let r = adaptive_integrate(|x| ig_density(&ig, x).unwrap_or(0.0), 0.0, 1.0, 1e-13).unwrap();
    let exact = normal_cdf(0.0) + (2.0f64).exp() * normal_cdf(-2.0);
    assert_relative_eq!(r.value, exact, max_relative = 1e-12);
}

#[test]
fn quadrature_quantile_agrees_with_oracle() {
    let s2 = sets()[1];
    let y = gh_quantile(&s2, 0.01, 50).unwrap();
    let f = cdf_by_integration(&s2, y, 1e-14).unwrap();
    assert!((f - 0.01).abs() <= 1e-8, "{f}");
    let y_ref = quantile_by_integration(&s2, 0.01, 1e-14).unwrap();
    assert!((cdf_by_integration(&s2, y_ref, 1e-14).unwrap() - 0.01).abs() <= 1e-12);
}

#[test]
fn fine_quadrature_agrees_with_oracle() {
    for params in &sets()[..3] {
        for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let y = quantile_by_integration(params, q, 1e-12).unwrap();
            let quad = gh_cdf(params, y, 150).unwrap();
            assert!((quad - cdf_by_integration(params, y, 1e-14).unwrap()).abs() <= 1e-8);
        }
    }
}

#[test]
fn routes_agree_off_center() {
    for params in sets() {
        let sd = ghquad::gh_summary_stats(&params).unwrap().variance.sqrt();
        for k in [-3.0, -1.5, 0.7, 2.5] {
            let y = params.mu + k * sd;
            let a = cdf_by_integration(&params, y, 1e-14).unwrap();
            let b = mixture_cdf_bruteforce(&params, y, 1e-14).unwrap();
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn gig_reduces_to_ig_in_oracle() {
    let s2 = sets()[1];
    assert_eq!(s2.p, -0.5);
    let mixing = s2.mixing();
    let ig = mixing.ig();
    let a = adaptive_integrate(
        |x| gig_density(&mixing, x).unwrap_or(0.0),
        0.0,
        mixing.scale(),
        1e-13,
    )
    .unwrap();
    let b = adaptive_integrate(
        |x| ig_density(&ig, x).unwrap_or(0.0),
        0.0,
        mixing.scale(),
        1e-13,
    )
    .unwrap();
    assert_relative_eq!(a.value, b.value, max_relative = 1e-12);
}
