use kgo_core::oracle::{asymmetry_check, fd_eigenvalues, fd_spectrum, FdGrid};
use kgo_core::rayleigh_ritz::ritz_values;
use kgo_core::{ExtendedProblem, ReducedRadialProblem};

fn problem(gamma: f64, delta: f64) -> ReducedRadialProblem {
    ReducedRadialProblem::new(gamma, delta).unwrap()
}

#[test]
fn second_order_convergence() {
    let base = FdGrid::new(1e-4, 12.0, 500).unwrap();
    for p in [problem(1.0, 6f64.sqrt()), problem(1.0, -6f64.sqrt()), problem(2.0, 1.0), problem(0.7, 1.5)] {
        let w1 = fd_eigenvalues(&p, &base, 3).unwrap();
        let w2 = fd_eigenvalues(&p, &base.halved(), 3).unwrap();
        let w4 = fd_eigenvalues(&p, &base.halved().halved(), 3).unwrap();
        for k in 0..3 {
            let ratio = (w1[k] - w2[k]) / (w2[k] - w4[k]);
            println!("{:?} ν={k}: ratio {ratio:.4}", (p.gamma(), p.delta()));
            assert!((ratio - 4.0).abs() < 0.8, "ν={k}: ratio {ratio}");
        }
    }
}

#[test]
fn outer_boundary_is_irrelevant() {
    // same spacing, twice the box
    let x0 = 1e-4;
    let near = FdGrid::new(x0, 12.0 + x0, 3999).unwrap();
    let far = FdGrid::new(x0, 24.0 + x0, 7999).unwrap();
    assert!((near.spacing() - far.spacing()).abs() < 1e-15);
    for p in [problem(1.0, 6f64.sqrt()), problem(1.0, -6f64.sqrt())] {
        let a = fd_eigenvalues(&p, &near, 3).unwrap();
        let b = fd_eigenvalues(&p, &far, 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn agrees_with_variational_values() {
    for delta in [6f64.sqrt(), -6f64.sqrt()] {
        let fd = fd_spectrum(&problem(1.0, delta), &FdGrid::default(), 3).unwrap();
        let rr = ritz_values(&ExtendedProblem::from_f64(1.0, delta, 200).unwrap(), 30).unwrap();
        for (level, want) in fd.levels.iter().zip(rr.values()) {
            assert!((level.w() - want).abs() < 1e-5, "{} vs {want}", level.w());
            assert!(level.estimate < 1e-3);
        }
    }
}

#[test]
fn printed_levels_cross_checked() {
    let plus = fd_spectrum(&problem(1.0, 6f64.sqrt()), &FdGrid::default(), 3).unwrap().values();
    let minus = fd_spectrum(&problem(1.0, -6f64.sqrt()), &FdGrid::default(), 3).unwrap().values();
    for (got, want) in plus.iter().zip([6.0, 9.80578, 13.6693]) {
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }
    for (got, want) in minus.iter().zip([1.60036, 6.0, 10.2107]) {
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }
}

#[test]
fn reflection_breaks_the_ground_level() {
    let rows = asymmetry_check(1.0, 6f64.sqrt(), 1).unwrap();
    assert!((rows[0].difference - 4.399642846).abs() < 1e-5, "{:?}", rows[0]);

    let rows = asymmetry_check(2.0, 1.0, 3).unwrap();
    let plus = ritz_values(&ExtendedProblem::from_f64(2.0, 1.0, 200).unwrap(), 30).unwrap().values();
    let minus = ritz_values(&ExtendedProblem::from_f64(2.0, -1.0, 200).unwrap(), 30).unwrap().values();
    for r in &rows {
        assert!(r.difference.abs() > 0.1);
        assert!((r.plus - plus[r.nu]).abs() < 1e-5 && (r.minus - minus[r.nu]).abs() < 1e-5, "{r:?}");
    }

    let tiny = asymmetry_check(1.0, 1e-6, 3).unwrap();
    assert!(tiny.iter().all(|r| r.difference.abs() < 1e-5));
}
