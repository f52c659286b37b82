use homotomo::pattern::Representation;
use homotomo::Error;
use homotomo::reconstruct::{
    density_from_moments, density_from_tomogram, moment_set_from_tomogram, FockReconstructor, QuadratureSpec,
};
use homotomo::states::{DensityMatrix, FockSource, GaussianState, MomentSet, Tomogram, TomogramGrid};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn fock_state_survives_file_round_trip_and_reconstruction() {
    let rho = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.8)]).unwrap();
    let src = FockSource::new(rho.clone(), 1.0).unwrap();
    let t = Tomogram::from_source(&src, &TomogramGrid::default_for(&src)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    t.write_pair(&path).unwrap();
    let back = Tomogram::read(&path).unwrap();
    assert_eq!(back, t);
    let d = density_from_tomogram(&back, 4, Representation::Canonical, &QuadratureSpec::default()).unwrap();
    for m in 0..=4 {
        for n in 0..=4 {
            let want = if m < 3 && n < 3 { rho.get(m, n) } else { c(0.0, 0.0) };
            assert!((d.density.get(m, n) - want).norm() < 1e-6, "({m},{n})");
        }
    }
    assert!((d.trace - 1.0).abs() < 1e-6);
    assert!(d.hermiticity_defect <= 1e-8);
}

#[test]
fn squeezed_state_routes_agree() {
    let g = GaussianState::new(0.4, -0.3, c(0.2, 0.1), 1.0).unwrap();
    let narrow = Tomogram::from_source(&g, &TomogramGrid::default_for(&g)).unwrap();
    let spec = QuadratureSpec::default();
    // Order-32 Hermite weights need data well past the default window.
    assert!(matches!(moment_set_from_tomogram(&narrow, 32, &spec), Err(Error::Window(_))));
    let base = TomogramGrid::default_for(&g);
    let grid = TomogramGrid { n_q: 2049, q_max: 2.0 * base.q_max, ..base };
    let t = Tomogram::from_source(&g, &grid).unwrap();
    let rec = FockReconstructor::new(&t, &spec).unwrap();
    let ms = moment_set_from_tomogram(&t, 32, &spec).unwrap();
    let md = density_from_moments(&ms, 4, 24).unwrap();
    for m in 0..4 {
        for n in 0..4 {
            let a = rec.element(m, n, Representation::Canonical).unwrap().value;
            assert!((a - md.entries[(m, n)]).norm() <= 1e-4, "({m},{n})");
            let b = rec.element(m, n, Representation::Symmetrized).unwrap().value;
            assert!((a - b).norm() <= 1e-8);
        }
    }
}

#[test]
fn coherent_moments_give_coherent_density() {
    let alpha = c(0.4, 0.0);
    let md = density_from_moments(&MomentSet::coherent(alpha, 48), 5, 20).unwrap();
    let want = DensityMatrix::coherent(alpha, 4);
    for m in 0..5 {
        for n in 0..5 {
            assert!((md.entries[(m, n)] - want.get(m, n)).norm() <= 1e-8);
        }
    }
    assert!(md.warnings.is_empty());
}

#[test]
fn hbar_scaling_is_consistent() {
    let alpha = c(0.3, -0.2);
    let mut ref_elems = Vec::new();
    for hbar in [1.0, 0.25, 3.0] {
        let g = GaussianState::coherent(alpha, hbar);
        let t = Tomogram::from_source(&g, &TomogramGrid::default_for(&g)).unwrap();
        let rec = FockReconstructor::new(&t, &QuadratureSpec::default()).unwrap();
        let e: Vec<Complex64> = [(0, 0), (1, 0), (2, 1)]
            .iter()
            .map(|&(m, n)| rec.element(m, n, Representation::Canonical).unwrap().value)
            .collect();
        if ref_elems.is_empty() {
            ref_elems = e;
        } else {
            for (a, b) in e.iter().zip(&ref_elems) {
                assert!((a - b).norm() < 1e-8, "ħ={hbar}");
            }
        }
    }
}
