//! End-to-end use of the public API on small radial and 2D grids.

use kquant_core::functionals::{bk_geodesic, l_sigma_k, modified_k_energy, z_along, z_sigma_k, GroupSpec};
use kquant_core::geometry::{build_grid, GridMode, Potential, Twist};
use kquant_core::io::{emit_hermform, emit_monomial, parse_hermform, parse_potential};
use kquant_core::quantization::{bergman, fs, hilb};

const BUMP: [f64; 5] = [0.0, 0.05, -0.04, 0.03, -0.02];

#[test]
fn fs_hilb_matches_bergman_log_on_both_grids() {
    for (mode, res) in [(GridMode::Radial, 128), (GridMode::Full2d, 24)] {
        let g = build_grid(mode, res).unwrap();
        let phi = Potential::monomial(&g, &BUMP);
        for k in [2, 5, 9] {
            let lhs = fs(&hilb(&phi, k).unwrap(), &g).unwrap();
            let rho = bergman(&phi, k).unwrap();
            for i in 0..g.len() {
                let rhs = phi.values()[i] + (rho.values[i] / (k + 1) as f64).ln() / k as f64;
                assert!((lhs.values()[i] - rhs).abs() < 1e-10, "{mode:?} k={k}");
            }
        }
    }
}

#[test]
fn file_formats_feed_the_pipeline() {
    let g = build_grid(GridMode::Radial, 64).unwrap();
    let phi = parse_potential(&emit_monomial(&BUMP)).unwrap().realize(&g).unwrap();
    assert_eq!(phi.values(), Potential::monomial(&g, &BUMP).values());

    let h = hilb(&phi, 6).unwrap();
    let back = parse_hermform(&emit_hermform(&h)).unwrap();
    let tw = Twist::identity();
    let (a, b) = (z_sigma_k(&h, &g, &tw).unwrap(), z_sigma_k(&back, &g, &tw).unwrap());
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn quantized_functionals_are_consistent() {
    let g = build_grid(GridMode::Radial, 256).unwrap();
    let phi = Potential::monomial(&g, &BUMP);
    let zero = Potential::zero(&g);
    let tw = Twist::identity();
    let k = 16;

    // L and Z∘Hilb agree to o(k).
    let l = l_sigma_k(&phi, k, &tw).unwrap();
    let z = z_sigma_k(&hilb(&phi, k).unwrap(), &g, &tw).unwrap();
    assert!((l - z).abs() / (k as f64) < 1e-4);

    // Z is convex along the geodesic from Hilb(0) to Hilb(φ).
    let geo = bk_geodesic(&hilb(&zero, k).unwrap(), &hilb(&phi, k).unwrap()).unwrap();
    let zs: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|&s| z_along(&geo, s, &g, &tw).unwrap()).collect();
    assert!(zs[0] + zs[2] - 2.0 * zs[1] > -1e-10);

    // The round metric minimizes the K-energy.
    let e = modified_k_energy(&phi, &GroupSpec::Trivial).unwrap();
    let e0 = modified_k_energy(&zero, &GroupSpec::Trivial).unwrap();
    assert!(e - e0 > 0.0);
}
