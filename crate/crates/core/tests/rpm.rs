use kgo_core::precision::sqrt_of;
use kgo_core::rpm::{hankel_at, riccati_coefficients, rpm_spectrum, HankelSpec, RpmOptions};
use kgo_core::ExtendedProblem;
use proptest::prelude::*;
use rug::Float;

const P: u32 = 200;

fn sqrt6_problem(sign: i32) -> ExtendedProblem {
    ExtendedProblem::new(Float::with_val(P, 1), sqrt_of(P, 6.0) * sign).unwrap()
}

const CASES: [(i32, (f64, f64), [f64; 3]); 2] = [
    (1, (1.0, 16.0), [6.0, 9.805784090, 13.66928892]),
    (-1, (1.0, 12.0), [1.600357154, 6.0, 10.21072810]),
];

#[test]
fn printed_triples_reproduced() {
    for (sign, interval, expected) in CASES {
        let out = rpm_spectrum(&sqrt6_problem(sign), interval, &RpmOptions::default()).unwrap();
        let got = out.spectrum.values();
        for want in expected {
            assert!(got.iter().any(|g| (g - want).abs() < 5e-9), "{want} missing from {got:?}");
        }
    }
}

/// Movement between successive dimensions shrinks once above roundoff.
#[test]
fn root_sequences_settle() {
    const FLOOR: f64 = 1e-10;
    for (sign, interval, _) in CASES {
        let out = rpm_spectrum(&sqrt6_problem(sign), interval, &RpmOptions::default()).unwrap();
        for level in &out.spectrum.levels {
            let chain = out.track(&level.value, 1e-3);
            assert!(chain.len() >= 3, "short chain for {}", level.w());
            let moves: Vec<f64> = chain
                .windows(2)
                .map(|w| Float::with_val(P, &w[1].1 - &w[0].1).abs().to_f64())
                .collect();
            for pair in moves.windows(2) {
                assert!(pair[1] < pair[0] || pair[0].max(pair[1]) < FLOOR, "{}: {moves:?}", level.w());
            }
        }
    }
}

#[test]
fn determinant_vanishes_at_truncation_point() {
    let p = sqrt6_problem(1);
    let six = Float::with_val(P, 6);
    for dim in 3..=8 {
        let h = hankel_at(&p, &six, HankelSpec::new(dim, 0).unwrap()).unwrap();
        assert!(h.is_zero() || h.to_f64().abs() < 1e-30, "D={dim}: {h}");
    }
    // away from the family point the same determinants are far from zero
    let off = Float::with_val(P, 7);
    let h = hankel_at(&p, &off, HankelSpec::new(3, 0).unwrap()).unwrap();
    assert!(h.to_f64().abs() > 1e-10);
}

#[test]
fn oscillator_level() {
    let p = ExtendedProblem::new(Float::with_val(P, 1), Float::new(P)).unwrap();
    let opts = RpmOptions { max_dimension: 4, tol: 1e-10, ..RpmOptions::default() };
    let out = rpm_spectrum(&p, (3.0, 5.0), &opts).unwrap();
    let got = out.spectrum.values();
    assert_eq!(got.len(), 1);
    assert!((got[0] - 4.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leading_sign_opposes_delta(gamma in 0.1f64..5.0, delta in -8.0f64..8.0, w in 0.0f64..20.0) {
        prop_assume!(delta != 0.0);
        let p = ExtendedProblem::from_f64(gamma, delta, P).unwrap();
        let s = riccati_coefficients(&p, &Float::with_val(P, w), 2).unwrap();
        prop_assert_eq!(s.coeffs[0].is_sign_negative(), delta > 0.0);
        prop_assert!((s.coeffs[0].to_f64() + delta / (2.0 * gamma + 1.0)).abs() < 1e-14 * (1.0 + delta.abs()));
    }
}
