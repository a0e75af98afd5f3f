//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Every tolerance is pinned here in code. Exact assertions compare
//! rationals; floating-point assertions carry the stated slack.

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tslab_core::caps::Caps;
use tslab_core::estimates::{
    mono_harness, separation_demo, sum_bound_harness, verify_block_estimate, verify_xm_bound,
    window_constant, BlockEstimateOptions, CertifyOptions, VectorFamily,
};
use tslab_core::ordinal::Ordinal;
use tslab_core::rational::{rat, rat_int, Exponent, Rat};
use tslab_core::schreier::{is_member, is_member_oracle, FinSet};
use tslab_core::simplex;
use tslab_core::spaces::SpaceDescriptor;
use tslab_core::tsirelson::{
    dual_norm, dual_norm_bracket, fixed_point_residual, functional_set, t_norm,
    t_norm_via_convexification, TsirelsonParams,
};
use tslab_core::vector::FinVec;

fn caps() -> Caps {
    Caps::default()
}

fn criterion(id: &str, description: &str, pass: bool) {
    println!(
        "[{id}] {description}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{id} failed: {description}");
}

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    let mut numer = 0i64;
    while numer == 0 {
        numer = rng.random_range(-5..=5);
    }
    rat(numer, rng.random_range(1..=4))
}

fn random_vec(rng: &mut ChaCha8Rng, window: u32, max_len: usize) -> FinVec {
    let len = rng.random_range(1..=max_len);
    let mut pool: Vec<u32> = (1..=window).collect();
    for i in 0..len.min(pool.len()) {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    FinVec::from_entries(
        pool[..len.min(window as usize)]
            .iter()
            .map(|&idx| (idx, random_rat(rng))),
    )
    .unwrap()
}

const A1_WINDOW: u32 = 12;

fn mask_set(mask: u32) -> FinSet {
    FinSet::new(
        (0..A1_WINDOW)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| i + 1)
            .collect(),
    )
    .unwrap()
}

/// All size-preserving rightward spreads of the member, within the window.
fn dominating_masks(elements: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut chosen: Vec<u32> = Vec::with_capacity(elements.len());
    fn go(elements: &[u32], i: usize, prev: u32, chosen: &mut Vec<u32>, out: &mut Vec<u32>) {
        if i == elements.len() {
            out.push(chosen.iter().map(|&v| 1u32 << (v - 1)).sum());
            return;
        }
        let lo = elements[i].max(prev + 1);
        let slots_needed = (elements.len() - i - 1) as u32;
        for v in lo..=(A1_WINDOW - slots_needed) {
            chosen.push(v);
            go(elements, i + 1, v, chosen, out);
            chosen.pop();
        }
    }
    go(elements, 0, 0, &mut chosen, &mut out);
    out
}

#[test]
fn a1_schreier_soundness() {
    let started = Instant::now();
    let ordinals = ["0", "1", "2", "3", "w", "w+1", "w*2", "w^2"];
    let total = 1u32 << A1_WINDOW;
    let mut tables: HashMap<&str, Vec<bool>> = HashMap::new();

    let mut agree = true;
    for name in ordinals {
        let xi = ord(name);
        let mut table = vec![false; total as usize];
        for mask in 0..total {
            let set = mask_set(mask);
            let fast = is_member(&set, &xi);
            let oracle = is_member_oracle(&set, &xi);
            agree &= fast == oracle;
            table[mask as usize] = fast;
        }
        tables.insert(name, table);
    }
    criterion("A1", "fast membership equals backtracking oracle on 2^12 x 8", agree);

    let mut hereditary = true;
    let mut spreading = true;
    for name in ordinals {
        let table = &tables[name];
        for mask in 0..total {
            if !table[mask as usize] {
                continue;
            }
            for i in 0..A1_WINDOW {
                if mask >> i & 1 == 1 {
                    hereditary &= table[(mask & !(1 << i)) as usize];
                }
            }
            let elements: Vec<u32> = (0..A1_WINDOW)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect();
            if !elements.is_empty() {
                for shifted in dominating_masks(&elements) {
                    spreading &= table[shifted as usize];
                }
            }
        }
    }
    criterion("A1", "hereditary closure holds exhaustively", hereditary);
    criterion("A1", "spreading closure holds exhaustively", spreading);

    let s1 = &tables["1"];
    let mut contains_s1 = true;
    for name in ordinals.iter().filter(|n| **n != "0") {
        let table = &tables[*name];
        for mask in 0..total {
            if s1[mask as usize] {
                contains_s1 &= table[mask as usize];
            }
        }
    }
    criterion("A1", "S_1 is contained in every tested family", contains_s1);

    let elapsed = started.elapsed().as_secs_f64();
    criterion(
        "A1",
        &format!("runtime {elapsed:.1}s below 30s target"),
        elapsed < 30.0,
    );
}

#[test]
fn a2_tsirelson_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let mut residual_zero = true;
    let mut sandwich = true;
    for xi_name in ["1", "2"] {
        let params = TsirelsonParams::standard(ord(xi_name));
        for _ in 0..200 {
            let x = random_vec(&mut rng, 8, 8);
            let n = t_norm(&x, &params, &caps()).unwrap();
            let r = fixed_point_residual(&x, &params, &n, &caps()).unwrap();
            residual_zero &= r.as_exact().is_some_and(Rat::is_zero);
            let value = n.as_exact().unwrap();
            sandwich &= &x.sup_abs() <= value && value <= &x.sum_abs();
        }
    }
    criterion("A2", "fixed-point residual is exactly zero on 200 vectors per ordinal", residual_zero);
    criterion("A2", "sup norm <= T-norm <= l1 norm exactly", sandwich);

    let params = TsirelsonParams::standard(ord("1"));
    let pair = FinVec::unit(2).add(&FinVec::unit(3));
    let anchor1 = t_norm(&pair, &params, &caps()).unwrap();
    criterion(
        "A2",
        "||e_2 + e_3||_T = 1",
        anchor1.as_exact() == Some(&Rat::one()),
    );
    let ones = FinVec::from_entries((9..=16).map(|n| (n, Rat::one()))).unwrap();
    let anchor4 = t_norm(&ones, &params, &caps()).unwrap();
    criterion(
        "A2",
        "||ones on 9..16||_T = 4",
        anchor4.as_exact() == Some(&rat_int(4)),
    );
}

#[test]
fn a3_convexification_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let params = TsirelsonParams::with_q(ord("1"), Exponent::two()).unwrap();
    let mut consistent = true;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = random_vec(&mut rng, 6, 6);
        let direct = t_norm(&x, &params, &caps()).unwrap().as_f64();
        let conv = t_norm_via_convexification(&x, &params, &caps())
            .unwrap()
            .as_f64();
        let gap = (direct - conv).abs();
        worst = worst.max(gap);
        consistent &= gap <= 1e-9;
    }
    criterion(
        "A3",
        &format!("direct and convexified norms agree within 1e-9 (worst {worst:.2e})"),
        consistent,
    );
}

/// Eigen route for the dual anchors: a single LP over the generated
/// functional set, with witness feasibility verified by the norm recursion.
fn dual_via_functional_set(xstar: &FinVec, window: u32, params: &TsirelsonParams) -> Rat {
    let set = functional_set(window, params, &caps()).unwrap();
    let support = xstar.support_indices();
    let objective: Vec<Rat> = support.iter().map(|&i| xstar.coeff(i).abs()).collect();
    let mut rows: Vec<Vec<Rat>> = set
        .functionals
        .iter()
        .map(|f| support.iter().map(|&i| f.coeff(i)).collect())
        .collect();
    rows.retain(|row: &Vec<Rat>| row.iter().any(|c| !c.is_zero()));
    let rhs = vec![Rat::one(); rows.len()];
    let solution = simplex::maximize(&objective, &rows, &rhs).unwrap();
    // Witness verification: feasible point reproducing the optimum.
    let witness = FinVec::from_entries(
        support
            .iter()
            .zip(&solution.point)
            .map(|(&i, v)| (i, v.clone())),
    )
    .unwrap();
    let wnorm = t_norm(&witness, params, &caps()).unwrap();
    assert!(wnorm.as_exact().unwrap() <= &Rat::one());
    assert_eq!(
        witness.dot(&FinVec::from_entries(support.iter().map(|&i| (i, xstar.coeff(i).abs()))).unwrap()),
        solution.value
    );
    solution.value
}

#[test]
fn a4_dual_exactness_and_brackets() {
    let params = TsirelsonParams::standard(ord("1"));
    let mut rng = ChaCha8Rng::seed_from_u64(0xA4);
    let mut contained = true;
    let mut lower_estimate = true;
    for trial in 0..40 {
        let x = random_vec(&mut rng, 10, 10);
        let exact = dual_norm(&x, &params, &caps()).unwrap();
        let value = exact.value.as_exact().unwrap().clone();
        let bracket = dual_norm_bracket(&x, &params, 6, 0xA4 ^ trial, &caps()).unwrap();
        contained &= bracket.lower.as_exact().unwrap() <= &value
            && &value <= bracket.upper.as_exact().unwrap();
        // Conjugate exponent of q = 1 is inf: the sup norm is a lower bound,
        // exactly.
        lower_estimate &= x.sup_abs() <= value;
    }
    criterion("A4", "LP dual norm lies inside its bracket on 40 samples", contained);
    criterion("A4", "conjugate-lp lower estimate holds exactly", lower_estimate);

    let pair = FinVec::unit(2).add(&FinVec::unit(3));
    let lp_pair = dual_norm(&pair, &params, &caps()).unwrap();
    let oracle_pair = dual_via_functional_set(&pair, 3, &params);
    criterion(
        "A4",
        "||e_2* + e_3*||_(T*) = 2 exactly, cutting planes and functional-set LP",
        lp_pair.value.as_exact() == Some(&rat_int(2)) && oracle_pair == rat_int(2),
    );

    let ones = FinVec::from_entries((1..=3).map(|n| (n, Rat::one()))).unwrap();
    let lp_ones = dual_norm(&ones, &params, &caps()).unwrap();
    let oracle_ones = dual_via_functional_set(&ones, 3, &params);
    criterion(
        "A4",
        "||ones* on 1..3||_(T*) = 3 exactly, cutting planes and functional-set LP",
        lp_ones.value.as_exact() == Some(&rat_int(3)) && oracle_ones == rat_int(3),
    );
}

#[test]
fn a5_block_estimate() {
    let params = TsirelsonParams::standard(ord("1"));
    let report = verify_block_estimate(
        &params,
        &BlockEstimateOptions {
            trials: 50,
            seed: 7,
            window: 14,
            max_support_points: 8,
            max_blocks: 4,
            slack: 1e-6,
        },
        &caps(),
    )
    .unwrap();
    criterion(
        "A5",
        "50 random q=1 block families stay below 2 exactly, pair attains it",
        report.pass,
    );

    let q2 = TsirelsonParams::with_q(ord("1"), Exponent::two()).unwrap();
    let report = verify_block_estimate(
        &q2,
        &BlockEstimateOptions {
            trials: 50,
            seed: 7,
            window: 14,
            max_support_points: 8,
            max_blocks: 3,
            slack: 1e-6,
        },
        &caps(),
    )
    .unwrap();
    criterion(
        "A5",
        "50 random q=2 block families stay below 2^(1/2) within 1e-6",
        report.pass,
    );
}

#[test]
fn a6_xm_witness_bound() {
    // The explicit ratio: || sum over {5..8} of e_k ||_m / ||alpha||_2 with
    // m = 4 is 4 / 2 = 2 = 4^(1 - 1/2), bit-exactly in double precision.
    let space = SpaceDescriptor::xm(Exponent::two(), 4);
    let family = VectorFamily::flat(space.clone(), (1..=16).map(FinVec::unit).collect()).unwrap();
    let alpha = FinVec::from_entries((5..=8).map(|k| (k, Rat::one()))).unwrap();
    let num = tslab_core::spaces::norm(&space, &family.combine(&alpha), &caps()).unwrap();
    let den = tslab_core::spaces::lp_norm(&alpha, &Exponent::two());
    let ratio = num.as_f64() / den.as_f64();
    criterion("A6", "explicit witness ratio equals 2 exactly", ratio == 2.0);

    let report = verify_xm_bound(&Exponent::two(), 4, &ord("1"), 16, 20, 7, 1e-6, &caps()).unwrap();
    criterion(
        "A6",
        "certifier reaches 2 - 1e-9 and sampled functional ratios stay below 2",
        report.pass,
    );
}

#[test]
fn a7_monotonicity_subadditivity_scaling_decay() {
    let report = mono_harness(50, 7, 1e-6, &caps()).unwrap();
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    criterion(
        "A7",
        &format!(
            "exponent monotonicity, subadditivity, scaling, decay bound on 50 families{}",
            if failed.is_empty() {
                String::new()
            } else {
                format!(" (failed: {failed:?})")
            }
        ),
        report.pass,
    );
}

#[test]
fn a8_direct_sum_bound() {
    let report = sum_bound_harness(20, 7, 1e-6, &caps()).unwrap();
    criterion(
        "A8",
        "20 random weighted direct sums respect the lq-combined bound within 1e-6",
        report.pass,
    );
}

#[test]
fn a9_schreier_vs_unrestricted_separation() {
    let params = TsirelsonParams::standard(ord("1"));
    let space = SpaceDescriptor::TsirelsonDual(params.clone());
    let family = VectorFamily::flat(space, (1..=3).map(FinVec::unit).collect()).unwrap();
    let opts = CertifyOptions {
        caps: caps(),
        ..CertifyOptions::seeded(7)
    };
    let restricted = window_constant(&family, &ord("1"), &Exponent::Infinity, &opts).unwrap();
    criterion(
        "A9",
        "restricted constant at K=3 is exactly 2",
        restricted.constant.as_exact() == Some(&rat_int(2)),
    );
    let full = window_constant(&family, &Ordinal::omega1(), &Exponent::Infinity, &opts).unwrap();
    let all_ones = FinVec::from_entries((1..=3).map(|k| (k, Rat::one()))).unwrap();
    criterion(
        "A9",
        "unrestricted constant at K=3 reaches 3 with the all-ones witness",
        full.constant.as_exact() == Some(&rat_int(3))
            && full.witness_coeffs == all_ones
            && full.witness_support.elements() == [1, 2, 3],
    );

    let report = separation_demo(&params, 8, 20, 7, 1e-6, &caps()).unwrap();
    let strict = report
        .checks
        .iter()
        .find(|c| c.name == "unrestricted_exceeds_restricted")
        .map(|c| c.pass)
        .unwrap_or(false);
    criterion(
        "A9",
        "at K=8 the unrestricted constant strictly exceeds the restricted one",
        strict && report.pass,
    );
}

#[test]
fn a10_determinism_and_runtime() {
    let started = Instant::now();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_tslab"))
            .args(["verify", "all", "--seed", "7", "--json"])
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    let elapsed = started.elapsed().as_secs_f64();
    criterion(
        "A10",
        "verify all --seed 7 exits 0 twice",
        first.status.code() == Some(0) && second.status.code() == Some(0),
    );
    criterion(
        "A10",
        "the two reports are byte-identical",
        first.stdout == second.stdout,
    );
    criterion(
        "A10",
        &format!("two verify-all runs took {elapsed:.0}s, within the 5-minute suite target"),
        elapsed < 240.0,
    );
}
