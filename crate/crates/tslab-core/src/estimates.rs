//! Finite-window upper-`l_p` estimate certification, and the verification
//! suite built on it.
//!
//! For a fixed family `(y_1, .., y_K)` the window constant is
//!
//! ```text
//! C_win = max over supports F in S_xi within {1..K}
//!         sup over alpha supported on F, alpha != 0
//!         || sum_k alpha_k y_k || / ||alpha||_p
//! ```
//!
//! Hereditariness makes the maximal members of `S_xi` within the window
//! sufficient. Per support the sup is computed exactly for p = 1 (extreme
//! points of the `l_1` ball are the signed units) and p = inf (a convex
//! function attains its maximum at the vertices of the cube; signs are
//! enumerated), and by seeded multi-start coordinate ascent for interior p,
//! where the reported value is a certified lower bound and the report is
//! flagged heuristic.
//!
//! The window constant is a finite-window quantity for the fixed family:
//! no subsequence passing happens here, so for operator-image families it is
//! a lower bound on any subsequence-uniform constant with the same
//! parameters, never an estimate of it.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::caps::tolerances::VERIFY_SLACK;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::rational::{rat, rat_from_f64, rat_to_f64, Exponent, Rat};
use crate::schreier::{maximal_members, FinSet};
use crate::spaces::{
    aggregate_lq, dual_functional_norm_bound, lp_norm, norm, SpaceDescriptor, SumPart,
};
use crate::tsirelson::{dual_norm, dual_norm_bracket, TsirelsonParams};
use crate::value::NormValue;
use crate::vector::{AnyVec, FinVec, SumVec};

/// An ordered family of vectors living in one space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorFamily {
    pub vectors: Vec<AnyVec>,
    pub space: SpaceDescriptor,
}

impl VectorFamily {
    pub fn new(space: SpaceDescriptor, vectors: Vec<AnyVec>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyValues);
        }
        let wants_sum = space.wants_sum_vec();
        for v in &vectors {
            match (wants_sum, v) {
                (true, AnyVec::Sum(_)) | (false, AnyVec::Flat(_)) => {}
                _ => {
                    return Err(Error::ShapeMismatch(
                        "family vectors do not match the space shape".into(),
                    ))
                }
            }
        }
        Ok(VectorFamily { vectors, space })
    }

    pub fn flat(space: SpaceDescriptor, vectors: Vec<FinVec>) -> Result<Self> {
        VectorFamily::new(space, vectors.into_iter().map(AnyVec::Flat).collect())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `sum_k alpha_k y_k` over the 1-based positions of `alpha`.
    pub fn combine(&self, alpha: &FinVec) -> AnyVec {
        let mut acc: Option<AnyVec> = None;
        for (k, coeff) in alpha.iter() {
            let term = self.vectors[(k - 1) as usize].scale(coeff);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap_or_else(|| match &self.vectors[0] {
            AnyVec::Flat(_) => AnyVec::Flat(FinVec::zero()),
            AnyVec::Sum(sv) => AnyVec::Sum(SumVec::new(vec![
                FinVec::zero();
                sv.components.len()
            ])),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub restarts: u32,
    pub seed: u64,
    /// Requested mode; `Exact` errors when interior p makes it unattainable.
    pub mode: Option<SearchMode>,
    pub caps: Caps,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            restarts: 32,
            seed: 0,
            mode: None,
            caps: Caps::default(),
        }
    }
}

impl CertifyOptions {
    pub fn seeded(seed: u64) -> Self {
        CertifyOptions {
            seed,
            ..CertifyOptions::default()
        }
    }

    pub fn with_restarts(mut self, restarts: u32) -> Self {
        self.restarts = restarts;
        self
    }
}

/// Certified finite-window constant with its witness.
#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    pub constant: NormValue,
    pub witness_support: FinSet,
    pub witness_coeffs: FinVec,
    pub mode: SearchMode,
    pub p: Exponent,
    pub xi: Ordinal,
    pub window: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The window constant of a family over `S_xi`-supported coefficients.
///
/// Mode resolution: p = 1 and p = inf always run the exact search (it
/// dominates any heuristic); requesting exact mode for interior p is an
/// error, as is heuristic mode with zero restarts. Per-support searches are
/// seeded from the support itself, so results do not depend on the order
/// supports are visited in.
pub fn window_constant(
    family: &VectorFamily,
    xi: &Ordinal,
    p: &Exponent,
    opts: &CertifyOptions,
) -> Result<WindowReport> {
    if family.is_empty() {
        return Err(Error::EmptyValues);
    }
    let k = family.len() as u32;
    opts.caps.check_window(k)?;

    let effective = match p {
        Exponent::Infinity => SearchMode::Exact,
        Exponent::Finite(pr) if pr.is_one() => SearchMode::Exact,
        _ => SearchMode::Heuristic,
    };
    if opts.mode == Some(SearchMode::Exact) && effective == SearchMode::Heuristic {
        return Err(Error::Unsupported(
            "exact mode needs p = 1 or p = inf; interior p is heuristic".into(),
        ));
    }
    if effective == SearchMode::Heuristic && opts.restarts == 0 {
        return Err(Error::Precondition(
            "heuristic mode needs at least one restart".into(),
        ));
    }

    let report = match effective {
        SearchMode::Exact if p.is_infinite() => sup_mode(family, xi, p, opts, k)?,
        SearchMode::Exact => p1_mode(family, xi, p, opts, k)?,
        SearchMode::Heuristic => heuristic_mode(family, xi, p, opts, k)?,
    };
    Ok(report)
}

/// p = 1: the extreme points of the `l_1` ball are signed units, so the
/// constant is the largest vector norm; singletons lie in every family.
fn p1_mode(
    family: &VectorFamily,
    xi: &Ordinal,
    p: &Exponent,
    opts: &CertifyOptions,
    k: u32,
) -> Result<WindowReport> {
    let mut best: Option<(NormValue, u32)> = None;
    for (i, v) in family.vectors.iter().enumerate() {
        let n = norm(&family.space, v, &opts.caps)?;
        let replace = match &best {
            None => true,
            Some((b, _)) => n.definitely_gt(b),
        };
        if replace {
            best = Some((n, i as u32 + 1));
        }
    }
    let (constant, index) = best.expect("nonempty family");
    Ok(WindowReport {
        constant,
        witness_support: FinSet::new(vec![index])?,
        witness_coeffs: FinVec::unit(index),
        mode: SearchMode::Exact,
        p: p.clone(),
        xi: xi.clone(),
        window: k,
        restarts: None,
        seed: None,
    })
}

fn supports_for(xi: &Ordinal, k: u32, caps: &Caps) -> Result<Vec<FinSet>> {
    if xi.is_omega1() {
        Ok(vec![FinSet::new((1..=k).collect())?])
    } else {
        maximal_members(xi, k, caps)
    }
}

/// p = inf: exact enumeration of sign patterns (half of them, by symmetry)
/// over each maximal support.
fn sup_mode(
    family: &VectorFamily,
    xi: &Ordinal,
    p: &Exponent,
    opts: &CertifyOptions,
    k: u32,
) -> Result<WindowReport> {
    let supports = supports_for(xi, k, &opts.caps)?;
    let one = Rat::one();
    let mut best: Option<(NormValue, FinSet, FinVec)> = None;
    for support in &supports {
        let elems = support.elements();
        let s = elems.len();
        for mask in 0..(1u64 << (s.saturating_sub(1))) {
            let coeffs = FinVec::from_entries(elems.iter().enumerate().map(|(i, &pos)| {
                let sign = if i == 0 || (mask >> (i - 1)) & 1 == 0 {
                    one.clone()
                } else {
                    -one.clone()
                };
                (pos, sign)
            }))?;
            let value = norm(&family.space, &family.combine(&coeffs), &opts.caps)?;
            let replace = match &best {
                None => true,
                Some((b, _, _)) => value.definitely_gt(b),
            };
            if replace {
                best = Some((value, support.clone(), coeffs));
            }
        }
    }
    let (constant, witness_support, witness_coeffs) = best.expect("nonempty supports");
    Ok(WindowReport {
        constant,
        witness_support,
        witness_coeffs,
        mode: SearchMode::Exact,
        p: p.clone(),
        xi: xi.clone(),
        window: k,
        restarts: None,
        seed: None,
    })
}

fn support_seed(seed: u64, support: &FinSet) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for &v in support.elements() {
        h ^= u64::from(v);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

/// Interior p: multi-start projected coordinate ascent on the ratio. The
/// returned constant is the re-evaluated ratio at the snapped witness, hence
/// a certified lower bound for the support supremum.
/// Float images of the family for fast ratio evaluation inside the search;
/// `None` when the space norm has no closed-form f64 path.
enum FloatFamily {
    Flat(Vec<Vec<(u32, f64)>>),
    Sum(Vec<Vec<Vec<(u32, f64)>>>),
}

fn float_family(family: &VectorFamily) -> Option<FloatFamily> {
    let to_f64 = |v: &FinVec| -> Vec<(u32, f64)> {
        v.iter().map(|(idx, c)| (idx, rat_to_f64(c))).collect()
    };
    match &family.vectors[0] {
        AnyVec::Flat(_) => {
            crate::spaces::norm_f64_flat(&family.space, &[])?;
            Some(FloatFamily::Flat(
                family
                    .vectors
                    .iter()
                    .map(|v| to_f64(v.as_flat().expect("flat family")))
                    .collect(),
            ))
        }
        AnyVec::Sum(first) => {
            crate::spaces::norm_f64_sum(
                &family.space,
                &vec![Vec::new(); first.components.len()],
            )?;
            let mut out = Vec::with_capacity(family.vectors.len());
            for v in &family.vectors {
                let AnyVec::Sum(sv) = v else { return None };
                out.push(sv.components.iter().map(&to_f64).collect());
            }
            Some(FloatFamily::Sum(out))
        }
    }
}

fn accumulate(target: &mut Vec<(u32, f64)>, source: &[(u32, f64)], scale: f64) {
    for &(idx, v) in source {
        match target.iter_mut().find(|(i, _)| *i == idx) {
            Some((_, slot)) => *slot += scale * v,
            None => target.push((idx, scale * v)),
        }
    }
}

fn heuristic_mode(
    family: &VectorFamily,
    xi: &Ordinal,
    p: &Exponent,
    opts: &CertifyOptions,
    k: u32,
) -> Result<WindowReport> {
    let supports = supports_for(xi, k, &opts.caps)?;
    let pf = p.as_f64();
    let floats = float_family(family);
    let mut best: Option<(NormValue, FinSet, FinVec)> = None;

    for support in &supports {
        let elems: Vec<u32> = support.elements().to_vec();
        let s = elems.len();
        let mut rng = ChaCha8Rng::seed_from_u64(support_seed(opts.seed, support));

        let ratio_of = |coords: &[f64]| -> f64 {
            let den = coords
                .iter()
                .map(|c| c.abs().powf(pf))
                .sum::<f64>()
                .powf(1.0 / pf);
            if den <= 1e-12 {
                return 0.0;
            }
            let num = match &floats {
                Some(FloatFamily::Flat(vectors)) => {
                    let mut combo: Vec<(u32, f64)> = Vec::new();
                    for (&pos, &c) in elems.iter().zip(coords) {
                        if c != 0.0 {
                            accumulate(&mut combo, &vectors[(pos - 1) as usize], c);
                        }
                    }
                    crate::spaces::norm_f64_flat(&family.space, &combo).expect("float path")
                }
                Some(FloatFamily::Sum(vectors)) => {
                    let parts = vectors[0].len();
                    let mut combo: Vec<Vec<(u32, f64)>> = vec![Vec::new(); parts];
                    for (&pos, &c) in elems.iter().zip(coords) {
                        if c != 0.0 {
                            for (j, comp) in vectors[(pos - 1) as usize].iter().enumerate() {
                                accumulate(&mut combo[j], comp, c);
                            }
                        }
                    }
                    crate::spaces::norm_f64_sum(&family.space, &combo).expect("float path")
                }
                None => {
                    let alpha = match coords_to_vec(&elems, coords) {
                        Ok(a) => a,
                        Err(_) => return 0.0,
                    };
                    if alpha.is_zero() {
                        return 0.0;
                    }
                    match norm(&family.space, &family.combine(&alpha), &opts.caps) {
                        Ok(n) => n.as_f64(),
                        Err(_) => return 0.0,
                    }
                }
            };
            num / den
        };

        // Starts: the uniform direction, every vertex, and seeded random
        // points with mixed signs.
        let mut starts: Vec<Vec<f64>> = vec![vec![1.0; s]];
        for i in 0..s {
            let mut v = vec![0.0; s];
            v[i] = 1.0;
            starts.push(v);
        }
        for _ in 0..opts.restarts {
            starts.push(
                (0..s)
                    .map(|_| {
                        let x: f64 = rng.random_range(-1.0..1.0);
                        x
                    })
                    .collect(),
            );
        }

        let mut support_best: Option<(f64, Vec<f64>)> = None;
        for start in &starts {
            let mut coords = start.clone();
            let mut current = ratio_of(&coords);
            for _sweep in 0..3 {
                let mut improved = false;
                for i in 0..s {
                    let saved = coords[i];
                    let scale = coords.iter().fold(1.0_f64, |a, &c| a.max(c.abs()));
                    let (t, v) = crate::search::grid_golden_max(
                        |t| {
                            let mut c = coords.clone();
                            c[i] = t;
                            ratio_of(&c)
                        },
                        -4.0 * scale,
                        4.0 * scale,
                        9,
                        20,
                    );
                    if v > current + 1e-12 {
                        coords[i] = t;
                        current = v;
                        improved = true;
                    } else {
                        coords[i] = saved;
                    }
                }
                if !improved {
                    break;
                }
            }
            let replace = match &support_best {
                None => true,
                Some((b, _)) => current > *b,
            };
            if replace {
                support_best = Some((current, coords));
            }
        }

        if let Some((_, coords)) = support_best {
            let alpha = coords_to_vec(&elems, &coords)?;
            if alpha.is_zero() {
                continue;
            }
            // Re-evaluate at the snapped witness so the report reproduces.
            let num = norm(&family.space, &family.combine(&alpha), &opts.caps)?;
            let den = lp_norm(&alpha, p);
            let value = NormValue::approx_with_tol(
                num.as_f64() / den.as_f64(),
                (num.tolerance() / den.as_f64().max(1e-12))
                    .max(crate::caps::tolerances::COMPARISON_TOL),
            );
            let replace = match &best {
                None => true,
                Some((b, _, _)) => value.definitely_gt(b),
            };
            if replace {
                best = Some((value, support.clone(), alpha));
            }
        }
    }

    let (constant, witness_support, witness_coeffs) =
        best.ok_or_else(|| Error::Unsupported("no admissible support produced a ratio".into()))?;
    Ok(WindowReport {
        constant,
        witness_support,
        witness_coeffs,
        mode: SearchMode::Heuristic,
        p: p.clone(),
        xi: xi.clone(),
        window: k,
        restarts: Some(opts.restarts),
        seed: Some(opts.seed),
    })
}

fn coords_to_vec(positions: &[u32], coords: &[f64]) -> Result<FinVec> {
    FinVec::from_entries(
        positions
            .iter()
            .zip(coords)
            .filter(|(_, c)| c.abs() >= 1e-12)
            .map(|(&pos, &c)| (pos, rat_from_f64(c).expect("finite coordinate"))),
    )
}

/// One named check inside a verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<CheckLine>,
}

impl VerifyReport {
    pub fn new(name: &str) -> Self {
        VerifyReport {
            name: name.to_string(),
            pass: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, details: serde_json::Value) {
        self.pass &= pass;
        self.checks.push(CheckLine {
            name: name.into(),
            pass,
            details,
        });
    }
}

fn norm_value_json(v: &NormValue) -> serde_json::Value {
    serde_json::to_value(v).expect("norm value serializes")
}

/// theta^(-1/q): the block-estimate bound. Exact rational for q = 1.
fn block_bound(params: &TsirelsonParams) -> NormValue {
    if params.q.is_one() {
        NormValue::exact(Rat::one() / params.theta.clone())
    } else {
        let qf = params.q.as_f64();
        NormValue::approx((1.0 / rat_to_f64(&params.theta)).powf(1.0 / qf))
    }
}

#[derive(Clone, Debug)]
pub struct BlockEstimateOptions {
    pub trials: u32,
    pub seed: u64,
    /// Index range the random block supports live in.
    pub window: u32,
    /// Cap on the union of block supports (the dual LP support cap binds).
    pub max_support_points: usize,
    pub max_blocks: u32,
    /// Additive slack for the non-exact comparisons.
    pub slack: f64,
}

impl Default for BlockEstimateOptions {
    fn default() -> Self {
        BlockEstimateOptions {
            trials: 50,
            seed: 0,
            window: 14,
            max_support_points: 8,
            max_blocks: 4,
            slack: VERIFY_SLACK,
        }
    }
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    let mut numer = 0i64;
    while numer == 0 {
        numer = rng.random_range(-4..=4);
    }
    let denom = rng.random_range(1..=4);
    rat(numer, denom)
}

/// Random normalized block families `(u_k)` in `T_q*`, checked against the
/// block estimate `|| sum alpha_k u_k || <= theta^(-1/q) ||alpha||_p`.
///
/// Blocks are successive, so `min supp u_k >= k` and coefficient supports in
/// `S_xi` transfer to admissible set families. For q = 1 normalization is the
/// exact LP dual norm and the comparison is exact; for q > 1 blocks are
/// normalized by the bracket upper bound (so their true norm is at most one
/// and the estimate stays sound) and the comparison carries the verification
/// slack.
pub fn verify_block_estimate(
    params: &TsirelsonParams,
    opts: &BlockEstimateOptions,
    caps: &Caps,
) -> Result<VerifyReport> {
    params.validate()?;
    let mut report = VerifyReport::new("block");
    let p = params.q.conjugate();
    let bound = block_bound(params);
    let space = SpaceDescriptor::TsirelsonDual(params.clone());

    // Anchor: (e_1*, e_2*, e_3*). The pair at positions {2,3} attains the
    // bound when theta = 1/2 and q = 1.
    if params.q.is_one() && params.theta == rat(1, 2) {
        let family = VectorFamily::flat(
            space.clone(),
            vec![FinVec::unit(1), FinVec::unit(2), FinVec::unit(3)],
        )?;
        let certify = CertifyOptions {
            caps: caps.clone(),
            ..CertifyOptions::seeded(opts.seed)
        };
        let wc = window_constant(&family, &params.xi, &p, &certify)?;
        let attained = wc.constant.approx_eq(&bound, 0.0);
        report.push(
            "anchor_pair_attains_bound",
            attained,
            json!({
                "constant": norm_value_json(&wc.constant),
                "bound": norm_value_json(&bound),
                "witness_support": wc.witness_support,
                "witness_coeffs": wc.witness_coeffs,
            }),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_seen = NormValue::zero();
    let mut violations = Vec::new();
    for trial in 0..opts.trials {
        let blocks = random_block_supports(&mut rng, opts);
        let mut vectors = Vec::with_capacity(blocks.len());
        let mut ok = true;
        for block in &blocks {
            let raw = FinVec::from_entries(
                block.iter().map(|&idx| (idx, random_rat(&mut rng))),
            )?;
            let normalized = if params.q.is_one() {
                let d = dual_norm(&raw, params, caps)?;
                let v = d.value.as_exact().expect("exact dual norm").clone();
                raw.scale(&(Rat::one() / v))
            } else {
                let b = dual_norm_bracket(&raw, params, 4, opts.seed ^ u64::from(trial), caps)?;
                let upper = rat_from_f64(b.upper.as_f64())?;
                if upper.is_zero() {
                    ok = false;
                    raw
                } else {
                    raw.scale(&(Rat::one() / upper))
                }
            };
            vectors.push(normalized);
        }
        if !ok {
            continue;
        }
        let family = VectorFamily::flat(space.clone(), vectors)?;
        let certify = CertifyOptions {
            caps: caps.clone(),
            restarts: 4,
            ..CertifyOptions::seeded(opts.seed.wrapping_add(u64::from(trial)))
        };
        let wc = window_constant(&family, &params.xi, &p, &certify)?;
        let slack = if params.q.is_one() { 0.0 } else { opts.slack };
        if !wc.constant.le_with_slack(&bound, slack) {
            violations.push(json!({
                "trial": trial,
                "constant": norm_value_json(&wc.constant),
                "witness_support": wc.witness_support,
                "witness_coeffs": wc.witness_coeffs,
            }));
        }
        if wc.constant.definitely_gt(&max_seen) {
            max_seen = wc.constant.clone();
        }
    }
    report.push(
        "all_trials_within_bound",
        violations.is_empty(),
        json!({
            "trials": opts.trials,
            "bound": norm_value_json(&bound),
            "max_observed": norm_value_json(&max_seen),
            "violations": violations,
        }),
    );
    Ok(report)
}

fn random_block_supports(rng: &mut ChaCha8Rng, opts: &BlockEstimateOptions) -> Vec<Vec<u32>> {
    let blocks = rng.random_range(2..=opts.max_blocks.max(2)) as usize;
    let max_points = opts
        .max_support_points
        .min(opts.window as usize)
        .max(blocks);
    let total = rng.random_range(blocks..=max_points);
    // `total` distinct sorted points from {1..window}.
    let mut pool: Vec<u32> = (1..=opts.window).collect();
    for i in 0..total {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut points: Vec<u32> = pool[..total].to_vec();
    points.sort_unstable();
    // Split into `blocks` nonempty consecutive runs.
    let mut cuts: Vec<usize> = (1..total).collect();
    for i in 0..blocks - 1 {
        let j = rng.random_range(i..cuts.len());
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts[..blocks - 1].to_vec();
    cuts.sort_unstable();
    cuts.push(total);
    let mut out = Vec::with_capacity(blocks);
    let mut start = 0;
    for cut in cuts {
        out.push(points[start..cut].to_vec());
        start = cut;
    }
    out
}

/// The `X_m` lower-bound demonstration: unit vectors in `X_m` carry a window
/// constant of at least `m^(1-1/p)`, attained by the indicator of
/// `{m+1, .., 2m}`, while every size-m coordinate-sum functional respects the
/// same bound on sampled ratios.
#[allow(clippy::too_many_arguments)]
pub fn verify_xm_bound(
    p: &Exponent,
    m: u32,
    xi: &Ordinal,
    window: u32,
    trials: u32,
    seed: u64,
    slack: f64,
    caps: &Caps,
) -> Result<VerifyReport> {
    if window < 2 * m {
        return Err(Error::Precondition(format!(
            "window {window} must be at least 2m = {}",
            2 * m
        )));
    }
    let mut report = VerifyReport::new("xm");
    let bound = dual_functional_norm_bound(m, p);
    let space = SpaceDescriptor::xm(p.clone(), m);
    let family = VectorFamily::flat(
        space.clone(),
        (1..=window).map(FinVec::unit).collect(),
    )?;

    // (a) the explicit witness: alpha = indicator of {m+1..2m}.
    let alpha = FinVec::from_entries((m + 1..=2 * m).map(|k| (k, Rat::one())))?;
    let combined = family.combine(&alpha);
    let num = norm(&space, &combined, caps)?;
    let den = lp_norm(&alpha, p);
    let ratio = NormValue::approx_with_tol(
        num.as_f64() / den.as_f64(),
        num.tolerance().max(crate::caps::tolerances::COMPARISON_TOL),
    );
    let ratio = if num.is_exact() && den.is_exact() {
        NormValue::exact(
            num.as_exact().expect("exact").clone() / den.as_exact().expect("exact").clone(),
        )
    } else {
        ratio
    };
    report.push(
        "explicit_witness_attains_bound",
        ratio.ge_with_slack(&bound, 1e-9),
        json!({
            "ratio": norm_value_json(&ratio),
            "bound": norm_value_json(&bound),
            "alpha": alpha,
        }),
    );

    // (b) the certifier finds at least the bound.
    let certify = CertifyOptions {
        caps: caps.clone(),
        restarts: 4,
        ..CertifyOptions::seeded(seed)
    };
    let wc = window_constant(&family, xi, p, &certify)?;
    report.push(
        "window_constant_reaches_bound",
        wc.constant.ge_with_slack(&bound, 1e-9),
        json!({
            "constant": norm_value_json(&wc.constant),
            "bound": norm_value_json(&bound),
            "witness_support": wc.witness_support,
            "witness_coeffs": wc.witness_coeffs,
        }),
    );

    // (c) sampled functional ratios stay below the operator-norm bound.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut all_ok = true;
    for _ in 0..trials {
        let size = rng.random_range(1..=window.min(8)) as usize;
        let mut pool: Vec<u32> = (1..=window).collect();
        for i in 0..size {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        let x = FinVec::from_entries(
            pool[..size]
                .iter()
                .map(|&idx| (idx, random_rat(&mut rng))),
        )?;
        if x.is_zero() {
            continue;
        }
        // A random E of size m overlapping the support.
        let mut epool: Vec<u32> = (1..=2 * window).collect();
        for i in 0..m as usize {
            let j = rng.random_range(i..epool.len());
            epool.swap(i, j);
        }
        let e = FinSet::new(epool[..m as usize].to_vec())?;
        let f_e_value: Rat = e.elements().iter().map(|&idx| x.coeff(idx)).sum();
        let ratio = rat_to_f64(&f_e_value).abs() / lp_norm(&x, p).as_f64().max(1e-300);
        worst = worst.max(ratio);
        if ratio > bound.as_f64() + slack {
            all_ok = false;
        }
    }
    report.push(
        "sampled_functional_ratios_bounded",
        all_ok,
        json!({
            "trials": trials,
            "worst_ratio": worst,
            "bound": norm_value_json(&bound),
        }),
    );
    Ok(report)
}

/// The direct-sum estimate: a family whose vectors each live in exactly one
/// weighted summand has window constant at most `|| (w_j C_j) ||_q`, where
/// `C_j` is the j-th component family's window constant computed at its
/// global placement (same window, same `xi` and `p`).
pub fn verify_sum_bound(
    components: &[(Rat, WindowReport)],
    q: &Exponent,
    family: &VectorFamily,
    xi: &Ordinal,
    p: &Exponent,
    slack: f64,
    opts: &CertifyOptions,
) -> Result<VerifyReport> {
    let SpaceDescriptor::WeightedSum { parts, .. } = &family.space else {
        return Err(Error::ShapeMismatch(
            "sum bound needs a weighted-sum family".into(),
        ));
    };
    if parts.len() != components.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} component reports for {} summands",
            components.len(),
            parts.len()
        )));
    }
    for (part, (w, _)) in parts.iter().zip(components) {
        if &part.weight != w {
            return Err(Error::Precondition(
                "component weights disagree with the space descriptor".into(),
            ));
        }
    }
    for v in &family.vectors {
        let AnyVec::Sum(sv) = v else {
            return Err(Error::ShapeMismatch("family vector is not sum-shaped".into()));
        };
        let nonzero = sv.components.iter().filter(|c| !c.is_zero()).count();
        if nonzero > 1 {
            return Err(Error::ShapeMismatch(
                "family vector spans multiple components".into(),
            ));
        }
    }

    let mut report = VerifyReport::new("sum");
    let wc = window_constant(family, xi, p, opts)?;
    let weighted: Vec<NormValue> = components
        .iter()
        .map(|(w, r)| r.constant.scale(w))
        .collect();
    let bound = aggregate_lq(&weighted, q);
    report.push(
        "window_constant_below_weighted_lq_bound",
        wc.constant.le_with_slack(&bound, slack),
        json!({
            "constant": norm_value_json(&wc.constant),
            "bound": norm_value_json(&bound),
            "component_constants": components
                .iter()
                .map(|(w, r)| json!({
                    "weight": crate::rational::format_rat(w),
                    "constant": norm_value_json(&r.constant),
                }))
                .collect::<Vec<_>>(),
            "witness_support": wc.witness_support,
            "witness_coeffs": wc.witness_coeffs,
        }),
    );
    Ok(report)
}

/// Random direct-sum configurations for [`verify_sum_bound`].
pub fn sum_bound_harness(configs: u32, seed: u64, slack: f64, caps: &Caps) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("sum");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let component_pool: [SpaceDescriptor; 4] = [
        SpaceDescriptor::lp(Exponent::two()),
        SpaceDescriptor::lp(Exponent::one()),
        SpaceDescriptor::C0,
        SpaceDescriptor::xm(Exponent::two(), 3),
    ];
    for config in 0..configs {
        let parts_count = rng.random_range(1..=3usize);
        let sizes: Vec<usize> = (0..parts_count).map(|_| rng.random_range(1..=3)).collect();
        let total: usize = sizes.iter().sum();
        let q = if rng.random_bool(0.5) {
            Exponent::one()
        } else {
            Exponent::two()
        };
        let p = match rng.random_range(0..3) {
            0 => Exponent::one(),
            1 => Exponent::Infinity,
            _ => Exponent::two(),
        };
        let xi: Ordinal = "1".parse().expect("ordinal");

        let mut parts = Vec::with_capacity(parts_count);
        let mut component_vectors: Vec<Vec<FinVec>> = Vec::with_capacity(parts_count);
        for (j, &size) in sizes.iter().enumerate() {
            let space = component_pool[rng.random_range(0..component_pool.len())].clone();
            let weight = rat(1, 1 << (j + 1));
            parts.push(SumPart {
                weight,
                space: space.clone(),
            });
            let vectors: Vec<FinVec> = (0..size)
                .map(|_| {
                    let support = rng.random_range(1..=3usize);
                    FinVec::from_entries(
                        (1..=support as u32).map(|idx| (idx, random_rat(&mut rng))),
                    )
                    .expect("valid vector")
                })
                .collect();
            component_vectors.push(vectors);
        }

        let opts = CertifyOptions {
            caps: caps.clone(),
            restarts: 6,
            ..CertifyOptions::seeded(seed.wrapping_add(u64::from(config)))
        };

        // Component reports at global placement: zero-padded to the full
        // window so S_xi supports mean the same thing on both sides.
        let mut components = Vec::with_capacity(parts_count);
        let mut offset = 0usize;
        for (part, vectors_j) in parts.iter().zip(&component_vectors) {
            let mut padded: Vec<FinVec> = vec![FinVec::zero(); total];
            for (i, v) in vectors_j.iter().enumerate() {
                padded[offset + i] = v.clone();
            }
            let family = VectorFamily::flat(part.space.clone(), padded)?;
            let wc = window_constant(&family, &xi, &p, &opts)?;
            components.push((part.weight.clone(), wc));
            offset += vectors_j.len();
        }

        // The concatenated single-component family.
        let mut vectors = Vec::with_capacity(total);
        for (j, vs) in component_vectors.iter().enumerate() {
            for v in vs {
                let mut sum_components = vec![FinVec::zero(); parts_count];
                sum_components[j] = v.clone();
                vectors.push(AnyVec::Sum(SumVec::new(sum_components)));
            }
        }
        let family = VectorFamily::new(
            SpaceDescriptor::WeightedSum {
                q: q.clone(),
                parts: parts.clone(),
            },
            vectors,
        )?;

        let sub = verify_sum_bound(&components, &q, &family, &xi, &p, slack, &opts)?;
        for check in sub.checks {
            report.push(
                format!("config_{config}_{}", check.name),
                check.pass,
                check.details,
            );
        }
    }
    Ok(report)
}

/// A pair of families over the same space and window, for subadditivity.
#[derive(Clone, Debug)]
pub struct MonoCase {
    pub y: VectorFamily,
    pub z: VectorFamily,
}

/// Monotonicity in p, subadditivity, and exact scaling of window constants.
pub fn verify_monotonicity_and_subadditivity(
    cases: &[MonoCase],
    xi: &Ordinal,
    exponent_pairs: &[(Exponent, Exponent)],
    slack: f64,
    opts: &CertifyOptions,
) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("mono");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (idx, case) in cases.iter().enumerate() {
        if case.y.len() != case.z.len() {
            return Err(Error::Precondition(
                "subadditivity needs families over the same window".into(),
            ));
        }
        // (a) q <= p implies C_q <= C_p (the lp norms shrink as p grows).
        for (lo, hi) in exponent_pairs {
            let c_lo = window_constant(&case.y, xi, lo, opts)?.constant;
            let c_hi = window_constant(&case.y, xi, hi, opts)?.constant;
            report.push(
                format!("case_{idx}_monotone_{lo}_le_{hi}"),
                c_lo.le_with_slack(&c_hi, slack),
                json!({
                    "lower_exponent": lo.to_string(),
                    "upper_exponent": hi.to_string(),
                    "constant_lower": norm_value_json(&c_lo),
                    "constant_upper": norm_value_json(&c_hi),
                }),
            );
        }

        // (b) subadditivity at each exponent appearing in the pairs.
        let mut exponents: Vec<&Exponent> = Vec::new();
        for (lo, hi) in exponent_pairs {
            if !exponents.contains(&lo) {
                exponents.push(lo);
            }
            if !exponents.contains(&hi) {
                exponents.push(hi);
            }
        }
        let sum_family = VectorFamily::new(
            case.y.space.clone(),
            case.y
                .vectors
                .iter()
                .zip(&case.z.vectors)
                .map(|(a, b)| a.add(b))
                .collect(),
        )?;
        for e in &exponents {
            let c_sum = window_constant(&sum_family, xi, e, opts)?.constant;
            let c_y = window_constant(&case.y, xi, e, opts)?.constant;
            let c_z = window_constant(&case.z, xi, e, opts)?.constant;
            let rhs = c_y.add(&c_z);
            report.push(
                format!("case_{idx}_subadditive_p_{e}"),
                c_sum.le_with_slack(&rhs, slack),
                json!({
                    "exponent": e.to_string(),
                    "constant_sum": norm_value_json(&c_sum),
                    "constant_y": norm_value_json(&c_y),
                    "constant_z": norm_value_json(&c_z),
                }),
            );
        }

        // (c) absolute homogeneity under a random rational scalar.
        let c = random_rat(&mut rng);
        let scaled = VectorFamily::new(
            case.y.space.clone(),
            case.y.vectors.iter().map(|v| v.scale(&c)).collect(),
        )?;
        for e in &exponents {
            let c_scaled = window_constant(&scaled, xi, e, opts)?.constant;
            let c_base = window_constant(&case.y, xi, e, opts)?.constant;
            let expected = c_base.scale(&c.abs());
            let pass = if c_scaled.is_exact() && expected.is_exact() {
                c_scaled.as_exact() == expected.as_exact()
            } else {
                c_scaled.approx_eq(&expected, slack)
            };
            report.push(
                format!("case_{idx}_scaling_p_{e}"),
                pass,
                json!({
                    "scalar": crate::rational::format_rat(&c),
                    "exponent": e.to_string(),
                    "constant_scaled": norm_value_json(&c_scaled),
                    "expected": norm_value_json(&expected),
                }),
            );
        }
    }
    Ok(report)
}

/// The geometric-decay bound: when `||y_k|| <= eps * 2^(-k)` the window
/// constant is at most `eps * ||(2^(-k))_(k<=K)||_(q')` with `q'` conjugate
/// to `p` (Hoelder).
pub fn norm_null_check(
    space: &SpaceDescriptor,
    xi: &Ordinal,
    p: &Exponent,
    eps: &Rat,
    window: u32,
    slack: f64,
    opts: &CertifyOptions,
) -> Result<CheckLine> {
    let vectors: Vec<FinVec> = (1..=window)
        .map(|k| FinVec::unit(k).scale(&(eps * rat(1, 1i64 << k))))
        .collect();
    let family = VectorFamily::flat(space.clone(), vectors)?;
    let wc = window_constant(&family, xi, p, opts)?;
    let qprime = p.conjugate();
    let decays: Vec<NormValue> = (1..=window)
        .map(|k| NormValue::exact(rat(1, 1i64 << k)))
        .collect();
    let bound = aggregate_lq(&decays, &qprime).scale(eps);
    Ok(CheckLine {
        name: "norm_null_decay_bound".into(),
        pass: wc.constant.le_with_slack(&bound, slack),
        details: json!({
            "constant": norm_value_json(&wc.constant),
            "bound": norm_value_json(&bound),
            "eps": crate::rational::format_rat(eps),
        }),
    })
}

/// Random-family harness covering monotonicity, subadditivity, scaling, and
/// the geometric-decay bound.
pub fn mono_harness(families: u32, seed: u64, slack: f64, caps: &Caps) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi: Ordinal = "1".parse().expect("ordinal");
    let pairs = vec![
        (Exponent::one(), Exponent::two()),
        (Exponent::two(), Exponent::Infinity),
        (Exponent::one(), Exponent::Infinity),
    ];
    let pool: [SpaceDescriptor; 3] = [
        SpaceDescriptor::lp(Exponent::two()),
        SpaceDescriptor::lp(Exponent::one()),
        SpaceDescriptor::xm(Exponent::two(), 2),
    ];
    let mut cases = Vec::with_capacity(families as usize);
    for _ in 0..families {
        let space = pool[rng.random_range(0..pool.len())].clone();
        let k = rng.random_range(2..=4usize);
        let make_family = |rng: &mut ChaCha8Rng| -> Result<VectorFamily> {
            let vectors: Vec<FinVec> = (0..k)
                .map(|_| {
                    let support = rng.random_range(1..=3usize);
                    FinVec::from_entries(
                        (0..support).map(|i| (1 + i as u32 * 2, random_rat(rng))),
                    )
                    .expect("valid vector")
                })
                .collect();
            VectorFamily::flat(space.clone(), vectors)
        };
        let y = make_family(&mut rng)?;
        let z = make_family(&mut rng)?;
        cases.push(MonoCase { y, z });
    }
    let opts = CertifyOptions {
        caps: caps.clone(),
        restarts: 6,
        ..CertifyOptions::seeded(seed)
    };
    let mut report = verify_monotonicity_and_subadditivity(&cases, &xi, &pairs, slack, &opts)?;

    // y = z degenerate subadditivity, plus the decay bound.
    if let Some(first) = cases.first() {
        let doubled = MonoCase {
            y: first.y.clone(),
            z: first.y.clone(),
        };
        let sub =
            verify_monotonicity_and_subadditivity(&[doubled], &xi, &pairs[..1], slack, &opts)?;
        for check in sub.checks {
            report.push(format!("degenerate_{}", check.name), check.pass, check.details);
        }
    }
    for (i, p) in [Exponent::Infinity, Exponent::two()].iter().enumerate() {
        let check = norm_null_check(
            &SpaceDescriptor::lp(Exponent::two()),
            &xi,
            p,
            &rat(3, 2),
            6,
            slack,
            &opts,
        )?;
        report.push(format!("decay_{i}_p_{p}"), check.pass, check.details);
    }
    Ok(report)
}

/// Restricted versus unrestricted window constants for the unit functionals
/// of `T_q*`: over `S_xi` supports the constant stays below `theta^(-1/q)`,
/// while over unrestricted supports it grows with the window.
pub fn separation_demo(
    params: &TsirelsonParams,
    window: u32,
    samples: u32,
    seed: u64,
    slack: f64,
    caps: &Caps,
) -> Result<VerifyReport> {
    params.validate()?;
    let mut report = VerifyReport::new("sep");
    let p = params.q.conjugate();
    let space = SpaceDescriptor::TsirelsonDual(params.clone());
    let family = VectorFamily::flat(
        space.clone(),
        (1..=window).map(FinVec::unit).collect(),
    )?;
    let opts = CertifyOptions {
        caps: caps.clone(),
        restarts: 8,
        ..CertifyOptions::seeded(seed)
    };
    let exactish = params.q.is_one();
    let slack = if exactish { 0.0 } else { slack };

    let restricted = window_constant(&family, &params.xi, &p, &opts)?;
    let bound = block_bound(params);
    report.push(
        "restricted_constant_below_block_bound",
        restricted.constant.le_with_slack(&bound, slack),
        json!({
            "constant": norm_value_json(&restricted.constant),
            "bound": norm_value_json(&bound),
            "witness_support": restricted.witness_support,
            "witness_coeffs": restricted.witness_coeffs,
        }),
    );

    let full = window_constant(&family, &Ordinal::omega1(), &p, &opts)?;
    let all_ones = FinVec::from_entries((1..=window).map(|k| (k, Rat::one())))?;
    let numerator = norm(&space, &family.combine(&all_ones), caps)?;
    let denominator = lp_norm(&all_ones, &p);
    let witness_ratio = if numerator.is_exact() && denominator.is_exact() {
        NormValue::exact(
            numerator.as_exact().expect("exact").clone()
                / denominator.as_exact().expect("exact").clone(),
        )
    } else {
        NormValue::approx(numerator.as_f64() / denominator.as_f64())
    };
    report.push(
        "unrestricted_constant_reaches_all_ones_ratio",
        full.constant.ge_with_slack(&witness_ratio, slack),
        json!({
            "constant": norm_value_json(&full.constant),
            "all_ones_ratio": norm_value_json(&witness_ratio),
        }),
    );

    if window >= 2 {
        report.push(
            "unrestricted_exceeds_restricted",
            full.constant.definitely_gt(&restricted.constant),
            json!({
                "restricted": norm_value_json(&restricted.constant),
                "unrestricted": norm_value_json(&full.constant),
            }),
        );
    }

    // Sampled lower estimate: every ratio dominates the conjugate lp norm.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_ok = true;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..samples {
        let size = rng.random_range(1..=window as usize);
        let mut pool: Vec<u32> = (1..=window).collect();
        for i in 0..size {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        let alpha = FinVec::from_entries(
            pool[..size].iter().map(|&k| (k, random_rat(&mut rng))),
        )?;
        if alpha.is_zero() {
            continue;
        }
        let value = norm(&space, &family.combine(&alpha), caps)?;
        let floor = lp_norm(&alpha, &p);
        if !value.ge_with_slack(&floor, crate::caps::tolerances::VERIFY_SLACK.max(slack)) {
            all_ok = false;
        }
        worst_margin = worst_margin.min(value.as_f64() - floor.as_f64());
    }
    report.push(
        "sampled_ratios_dominate_conjugate_lp",
        all_ok,
        json!({
            "samples": samples,
            "worst_margin": if worst_margin.is_finite() { worst_margin } else { 0.0 },
        }),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn opts() -> CertifyOptions {
        CertifyOptions {
            caps: caps(),
            ..CertifyOptions::seeded(11)
        }
    }

    fn xi1() -> Ordinal {
        "1".parse().unwrap()
    }

    #[test]
    fn orthonormal_family_has_constant_one() {
        let family = VectorFamily::flat(
            SpaceDescriptor::lp(Exponent::two()),
            (1..=8).map(FinVec::unit).collect(),
        )
        .unwrap();
        let o = CertifyOptions {
            restarts: 4,
            ..opts()
        };
        let wc = window_constant(&family, &xi1(), &Exponent::two(), &o).unwrap();
        assert!((wc.constant.as_f64() - 1.0).abs() < 1e-7);
        assert_eq!(wc.mode, SearchMode::Heuristic);
    }

    #[test]
    fn p1_closed_form() {
        let family = VectorFamily::flat(
            SpaceDescriptor::lp(Exponent::one()),
            vec![
                FinVec::unit(1).scale(&rat(3, 1)),
                FinVec::unit(2),
                FinVec::unit(3).scale(&rat(-5, 2)),
            ],
        )
        .unwrap();
        let wc = window_constant(&family, &xi1(), &Exponent::one(), &opts()).unwrap();
        assert_eq!(wc.constant.as_exact(), Some(&rat(3, 1)));
        assert_eq!(wc.witness_support.elements(), &[1]);
        assert_eq!(wc.mode, SearchMode::Exact);
    }

    #[test]
    fn xm_family_reaches_the_bound() {
        // m = 2: the indicator of {3,4} gives ratio 2^(1/2).
        let family = VectorFamily::flat(
            SpaceDescriptor::xm(Exponent::two(), 2),
            (1..=8).map(FinVec::unit).collect(),
        )
        .unwrap();
        let o = CertifyOptions {
            restarts: 4,
            ..opts()
        };
        let wc = window_constant(&family, &xi1(), &Exponent::two(), &o).unwrap();
        assert!(wc.constant.as_f64() >= 2f64.sqrt() - 1e-9);
    }

    #[test]
    fn exact_mode_rejects_interior_p() {
        let family = VectorFamily::flat(
            SpaceDescriptor::lp(Exponent::two()),
            vec![FinVec::unit(1)],
        )
        .unwrap();
        let mut o = opts();
        o.mode = Some(SearchMode::Exact);
        assert!(window_constant(&family, &xi1(), &Exponent::two(), &o).is_err());
        o.mode = None;
        o.restarts = 0;
        assert!(window_constant(&family, &xi1(), &Exponent::two(), &o).is_err());
    }

    #[test]
    fn tsirelson_dual_restricted_and_full() {
        let params = TsirelsonParams::standard(xi1());
        let family = VectorFamily::flat(
            SpaceDescriptor::TsirelsonDual(params.clone()),
            (1..=3).map(FinVec::unit).collect(),
        )
        .unwrap();
        let restricted =
            window_constant(&family, &xi1(), &Exponent::Infinity, &opts()).unwrap();
        assert_eq!(restricted.constant.as_exact(), Some(&rat(2, 1)));
        let full =
            window_constant(&family, &Ordinal::omega1(), &Exponent::Infinity, &opts()).unwrap();
        assert_eq!(full.constant.as_exact(), Some(&rat(3, 1)));
    }

    #[test]
    fn block_estimate_pair_anchor() {
        let params = TsirelsonParams::standard(xi1());
        let report = verify_block_estimate(
            &params,
            &BlockEstimateOptions {
                trials: 3,
                seed: 5,
                ..BlockEstimateOptions::default()
            },
            &caps(),
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn xm_verification() {
        let report = verify_xm_bound(&Exponent::two(), 4, &xi1(), 16, 10, 3, 1e-6, &caps()).unwrap();
        assert!(report.pass, "{report:?}");
        let report = verify_xm_bound(&Exponent::one(), 5, &xi1(), 10, 5, 3, 1e-6, &caps()).unwrap();
        assert!(report.pass, "{report:?}");
        let report =
            verify_xm_bound(&Exponent::Infinity, 3, &xi1(), 8, 5, 3, 1e-6, &caps()).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(verify_xm_bound(&Exponent::two(), 5, &xi1(), 8, 5, 3, 1e-6, &caps()).is_err());
    }

    #[test]
    fn separation_k1_both_one() {
        let params = TsirelsonParams::standard(xi1());
        let report = separation_demo(&params, 1, 3, 7, 1e-6, &caps()).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn single_block_stays_below_the_bound() {
        let params = TsirelsonParams::standard(xi1());
        let family = VectorFamily::flat(
            SpaceDescriptor::TsirelsonDual(params.clone()),
            vec![FinVec::unit(5)],
        )
        .unwrap();
        let wc = window_constant(&family, &xi1(), &Exponent::Infinity, &opts()).unwrap();
        assert_eq!(wc.constant.as_exact(), Some(&rat(1, 1)));
    }

    #[test]
    fn two_weighted_orthonormal_copies() {
        // Weights 1/2 and 1/4 over two orthonormal l2 families: the combined
        // bound is ||(1/2, 1/4)||_2 = sqrt(5)/4 and the observed constant is
        // the best single-component ratio, 1/2.
        let parts = vec![
            SumPart {
                weight: rat(1, 2),
                space: SpaceDescriptor::lp(Exponent::two()),
            },
            SumPart {
                weight: rat(1, 4),
                space: SpaceDescriptor::lp(Exponent::two()),
            },
        ];
        let total = 4usize;
        let mut components = Vec::new();
        for j in 0..2 {
            let mut padded = vec![FinVec::zero(); total];
            for i in 0..2 {
                padded[j * 2 + i] = FinVec::unit(i as u32 + 1);
            }
            let flat = VectorFamily::flat(parts[j].space.clone(), padded).unwrap();
            let wc = window_constant(&flat, &xi1(), &Exponent::two(), &opts()).unwrap();
            components.push((parts[j].weight.clone(), wc));
        }
        let vectors: Vec<AnyVec> = (0..total)
            .map(|k| {
                let mut comps = vec![FinVec::zero(); 2];
                comps[k / 2] = FinVec::unit((k % 2) as u32 + 1);
                AnyVec::Sum(SumVec::new(comps))
            })
            .collect();
        let family = VectorFamily::new(
            SpaceDescriptor::WeightedSum {
                q: Exponent::two(),
                parts,
            },
            vectors,
        )
        .unwrap();
        let report = verify_sum_bound(
            &components,
            &Exponent::two(),
            &family,
            &xi1(),
            &Exponent::two(),
            1e-6,
            &opts(),
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
        let bound = report.checks[0].details["bound"]["value"].as_f64().unwrap();
        assert!((bound - 5f64.sqrt() / 4.0).abs() < 1e-9);
        let observed = report.checks[0].details["constant"]["value"]
            .as_f64()
            .unwrap();
        assert!((observed - 0.5).abs() < 1e-6);
    }

    #[test]
    fn sum_single_component_reduces() {
        let part_space = SpaceDescriptor::lp(Exponent::two());
        let parts = vec![SumPart {
            weight: Rat::one(),
            space: part_space.clone(),
        }];
        let vectors: Vec<AnyVec> = (1..=3)
            .map(|k| AnyVec::Sum(SumVec::new(vec![FinVec::unit(k)])))
            .collect();
        let family = VectorFamily::new(
            SpaceDescriptor::WeightedSum {
                q: Exponent::two(),
                parts,
            },
            vectors,
        )
        .unwrap();
        let flat = VectorFamily::flat(part_space, (1..=3).map(FinVec::unit).collect()).unwrap();
        let component = window_constant(&flat, &xi1(), &Exponent::Infinity, &opts()).unwrap();
        let report = verify_sum_bound(
            &[(Rat::one(), component)],
            &Exponent::two(),
            &family,
            &xi1(),
            &Exponent::Infinity,
            1e-6,
            &opts(),
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
    }
}
