use itlab_core::eig::{cluster_eigenvalues, conjugate_closure_defect, filter_converged, solve_quadratic, DEFAULT_CLUSTER_TOL};
use itlab_core::oracle::{disk_dispersion, interval_dispersion, oracle_eigenvalues, real_axis_zeros, DispersionDomain, DispersionProblem};
use itlab_core::pencil::{assemble_disk_mode, assemble_interval, assemble_interval_with, IntervalBasis};
use itlab_core::regions::{left_halfplane_bound, region_report, ParabolicRegion};
use itlab_core::symbols::Rect;
use itlab_core::{c64, RefractiveProfile};
use num_complex::Complex64;

fn stable_spectrum(coarse: &itlab_core::pencil::DiscretePencil, fine: &itlab_core::pencil::DiscretePencil) -> Vec<Complex64> {
    let rc = cluster_eigenvalues(&solve_quadratic(coarse, 1e-10).unwrap(), DEFAULT_CLUSTER_TOL);
    let rf = cluster_eigenvalues(&solve_quadratic(fine, 1e-10).unwrap(), DEFAULT_CLUSTER_TOL);
    filter_converged(&rc, &rf, 1e-6).into_iter().filter(|r| r.stable).map(|r| r.lambda).collect()
}

fn nearest(set: &[Complex64], z: Complex64) -> f64 {
    set.iter().map(|w| (w - z).norm() / z.norm()).fold(f64::INFINITY, f64::min)
}

#[test]
fn touching_interval_zeros_match_real_pencil_eigenvalues() {
    let f = |k: f64| Ok(interval_dispersion(c64(k, 0.0), 2.0, 1.0)?.re);
    let zeros = real_axis_zeros(&f, 0.5, 20.0, 4000).unwrap();
    let expected = [2.0, 4.0, 6.0].map(|j| j * std::f64::consts::PI);
    assert_eq!(zeros.len(), 3, "{zeros:?}");
    for (z, e) in zeros.iter().zip(expected) {
        assert!((z - e).abs() < 1e-6, "{z} vs {e}");
    }
    let p = RefractiveProfile::constant(3.0, 0.0, 1.0).unwrap();
    let spec = stable_spectrum(&assemble_interval(&p, 40, 0.0, 1.0).unwrap(), &assemble_interval(&p, 80, 0.0, 1.0).unwrap());
    for z in &zeros[..2] {
        let k = spec
            .iter()
            .filter(|l| l.im.abs() < 1e-6 * l.norm())
            .map(|l| l.re.sqrt())
            .min_by(|a, b| (a - z).abs().total_cmp(&(b - z).abs()))
            .unwrap();
        assert!((k - z).abs() < 1e-6 * z, "{k} vs {z}");
    }
}

#[test]
fn disk_sign_changes_agree_with_argument_principle() {
    for l in [0u32, 2] {
        let f = |k: f64| Ok(disk_dispersion(c64(k, 0.0), 2.0, 1.0, l)?.re);
        let real = real_axis_zeros(&f, 0.5, 12.0, 3000).unwrap();
        let prob = DispersionProblem::new(DispersionDomain::Disk { radius: 1.0, l }, 2.0).unwrap();
        let found = oracle_eigenvalues(&prob, &Rect::new(0.5, 12.0, -0.25, 0.27), 40).unwrap();
        let on_axis: Vec<f64> = found.iter().filter(|z| z.k.im.abs() < 1e-9).map(|z| z.k.re).collect();
        assert_eq!(real.len(), on_axis.len(), "l = {l}: {real:?} vs {on_axis:?}");
        for (a, b) in real.iter().zip(&on_axis) {
            assert!((a - b).abs() < 1e-8 * b, "l = {l}: {a} vs {b}");
        }
    }
}

#[test]
fn hermite_elements_converge_to_the_spectral_spectrum() {
    let p = RefractiveProfile::gaussian(0.4, 0.25, 0.5, 0.3, 0.0, 1.0).unwrap();
    let mut reference = stable_spectrum(
        &assemble_interval_with(&p, 60, 0.0, 1.0, IntervalBasis::Spectral).unwrap(),
        &assemble_interval_with(&p, 120, 0.0, 1.0, IntervalBasis::Spectral).unwrap(),
    );
    reference.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let errors = |n: usize| -> Vec<f64> {
        let pen = assemble_interval_with(&p, n, 0.0, 1.0, IntervalBasis::Hermite).unwrap();
        let got: Vec<Complex64> = solve_quadratic(&pen, 1e-10).unwrap().iter().map(|r| r.lambda).collect();
        reference[..6].iter().map(|z| nearest(&got, *z)).collect()
    };
    let (e80, e160) = (errors(80), errors(160));
    for (a, b) in e80.iter().zip(&e160) {
        assert!(*b < 1e-5, "{e160:?}");
        assert!((a / b).log2() > 3.5, "order {} from {a:e} -> {b:e}", (a / b).log2());
    }
}

#[test]
fn disk_mode_matches_oracle() {
    let p = RefractiveProfile::constant(3.0, 0.0, 1.0).unwrap();
    let spec = stable_spectrum(&assemble_disk_mode(&p, 1, 30, 1.0).unwrap(), &assemble_disk_mode(&p, 1, 60, 1.0).unwrap());
    let prob = DispersionProblem::from_m(DispersionDomain::Disk { radius: 1.0, l: 1 }, 3.0).unwrap();
    let oracle = oracle_eigenvalues(&prob, &Rect::new(0.5, 8.0, -3.0, 3.0), 40).unwrap();
    assert!(oracle.len() >= 3);
    for z in oracle.iter().take(3) {
        assert!(nearest(&spec, z.lambda) < 1e-4, "{}", z.lambda);
    }
}

#[test]
fn structural_invariants_of_assembled_pencils() {
    let profiles = [
        RefractiveProfile::constant(3.0, 0.0, 1.0).unwrap(),
        RefractiveProfile::gaussian(0.4, 0.25, 0.5, 0.3, 0.0, 1.0).unwrap(),
    ];
    for p in &profiles {
        let pencils = vec![assemble_interval(p, 30, 0.0, 1.0).unwrap(), assemble_disk_mode(p, 0, 20, 1.0).unwrap()];
        for pen in &pencils {
            assert!(pen.t0_min_eigenvalue() > 0.0);
            assert!(pen.hermitian_residual() < 1e-12);
            let recs = solve_quadratic(pen, 1e-10).unwrap();
            assert_eq!(recs.len(), 2 * pen.n);
            let lambdas: Vec<Complex64> = recs.iter().map(|r| r.lambda).collect();
            assert!(conjugate_closure_defect(&lambdas) < 1e-8);
        }
        let bound = left_halfplane_bound(p);
        let coarse = cluster_eigenvalues(&solve_quadratic(&pencils[0], 1e-10).unwrap(), DEFAULT_CLUSTER_TOL);
        let report = region_report(&coarse, &ParabolicRegion::default(), p);
        assert_eq!(report.left_bound, bound);
        assert!(report.left_violations.is_empty());
    }
}
