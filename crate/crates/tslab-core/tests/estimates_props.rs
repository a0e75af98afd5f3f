//! Certifier-level properties: maximal supports suffice, witnesses are
//! valid and reproducible, the p = 1 closed form, and seeded determinism.

use proptest::prelude::*;

use tslab_core::caps::Caps;
use tslab_core::estimates::{window_constant, CertifyOptions, SearchMode, VectorFamily};
use tslab_core::ordinal::Ordinal;
use tslab_core::rational::{rat, Exponent, Rat};
use tslab_core::schreier::{is_member_oracle, members_within};
use tslab_core::spaces::{lp_norm, norm, SpaceDescriptor};
use tslab_core::vector::FinVec;

fn caps() -> Caps {
    Caps::default()
}

fn opts(seed: u64, restarts: u32) -> CertifyOptions {
    CertifyOptions {
        restarts,
        seed,
        mode: None,
        caps: caps(),
    }
}

fn rational() -> impl Strategy<Value = Rat> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn family(space: SpaceDescriptor, k: usize) -> impl Strategy<Value = VectorFamily> {
    proptest::collection::vec(
        proptest::collection::btree_map(1u32..=6, rational(), 1..3),
        k..=k,
    )
    .prop_map(move |vs| {
        VectorFamily::flat(
            space.clone(),
            vs.into_iter()
                .map(|m| FinVec::from_entries(m).unwrap())
                .collect(),
        )
        .unwrap()
    })
}

/// Brute-force window constant for p = inf: every member support (not just
/// maximal ones) and every sign pattern.
fn brute_force_sup(family: &VectorFamily, xi: &Ordinal) -> f64 {
    let k = family.len() as u32;
    let members = members_within(xi, k, &caps()).unwrap();
    let mut best = 0.0_f64;
    for support in &members {
        let elems = support.elements();
        for mask in 0..(1u64 << elems.len()) {
            let alpha = FinVec::from_entries(elems.iter().enumerate().map(|(i, &pos)| {
                let sign = if mask >> i & 1 == 0 { 1 } else { -1 };
                (pos, rat(sign, 1))
            }))
            .unwrap();
            let v = norm(&family.space, &family.combine(&alpha), &caps())
                .unwrap()
                .as_f64();
            best = best.max(v);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn maximal_supports_suffice(
        f in family(SpaceDescriptor::xm(Exponent::two(), 2), 8),
    ) {
        for xi in ["1", "2"] {
            let xi: Ordinal = xi.parse().unwrap();
            let report = window_constant(&f, &xi, &Exponent::Infinity, &opts(3, 4)).unwrap();
            let brute = brute_force_sup(&f, &xi);
            prop_assert!(
                (report.constant.as_f64() - brute).abs() <= 1e-9,
                "maximal-support search {} vs exhaustive {}",
                report.constant.as_f64(),
                brute
            );
        }
    }

    #[test]
    fn witnesses_are_valid_and_reproduce(
        f in family(SpaceDescriptor::lp(Exponent::two()), 5),
        heuristic in proptest::bool::ANY,
    ) {
        let xi: Ordinal = "1".parse().unwrap();
        let p = if heuristic { Exponent::two() } else { Exponent::Infinity };
        let report = window_constant(&f, &xi, &p, &opts(7, 4)).unwrap();

        prop_assert!(is_member_oracle(&report.witness_support, &xi));
        prop_assert!(report
            .witness_coeffs
            .support()
            .is_subset_of(&report.witness_support));

        let num = norm(&f.space, &f.combine(&report.witness_coeffs), &caps()).unwrap();
        let den = lp_norm(&report.witness_coeffs, &p);
        let ratio = num.as_f64() / den.as_f64();
        prop_assert!(
            (ratio - report.constant.as_f64()).abs()
                <= 1e-9 + report.constant.tolerance(),
            "witness ratio {ratio} does not reproduce constant {}",
            report.constant.as_f64()
        );
    }

    #[test]
    fn p1_closed_form_for_every_family(
        f in family(SpaceDescriptor::lp(Exponent::one()), 5),
    ) {
        for xi in ["1", "w", "w1"] {
            let xi: Ordinal = xi.parse().unwrap();
            let report = window_constant(&f, &xi, &Exponent::one(), &opts(0, 4)).unwrap();
            let expected = f
                .vectors
                .iter()
                .map(|v| norm(&f.space, v, &caps()).unwrap().as_exact().unwrap().clone())
                .max()
                .unwrap();
            prop_assert_eq!(report.constant.as_exact().unwrap(), &expected);
            prop_assert_eq!(report.mode, SearchMode::Exact);
        }
    }
}

#[test]
fn identical_seeds_give_identical_reports() {
    let vectors: Vec<FinVec> = (1..=5)
        .map(|k| {
            FinVec::from_entries([(k, rat(k as i64, 2)), (k + 1, rat(1, 3))]).unwrap()
        })
        .collect();
    let f = VectorFamily::flat(SpaceDescriptor::xm(Exponent::two(), 2), vectors).unwrap();
    let xi: Ordinal = "1".parse().unwrap();
    let a = window_constant(&f, &xi, &Exponent::two(), &opts(42, 8)).unwrap();
    let b = window_constant(&f, &xi, &Exponent::two(), &opts(42, 8)).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = window_constant(&f, &xi, &Exponent::two(), &opts(43, 8)).unwrap();
    // Same constant region, but the seed is recorded in the report.
    assert_ne!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&c).unwrap()
    );
}

#[test]
fn omega1_uses_the_full_window() {
    let f = VectorFamily::flat(
        SpaceDescriptor::lp(Exponent::one()),
        (1..=4).map(FinVec::unit).collect(),
    )
    .unwrap();
    let report = window_constant(
        &f,
        &Ordinal::omega1(),
        &Exponent::Infinity,
        &opts(0, 4),
    )
    .unwrap();
    // All four units with aligned signs: the l1 norm of the sum is 4.
    assert_eq!(report.constant.as_exact(), Some(&rat(4, 1)));
    assert_eq!(report.witness_support.elements(), &[1, 2, 3, 4]);
}
