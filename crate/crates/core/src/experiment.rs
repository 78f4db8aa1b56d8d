//! Seeded experiments over admissible systems, with JSON reports.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factors::{restriction, transport};
use crate::farey::{matrix_of_out, translation_length_estimate, FareyVertex};
use crate::freegroup::{GroupMap, Nielsen};
use crate::projections::{
    behrstock_min, factor_order_from, intervals_and_order, nielsen_factorization, project_factor,
    project_tree, projection_distance, union_diameter, MarkedGraph, OrderInputs, Target, TreePath,
};
use crate::raag::{clique_number, normalize, syllable_order, RaagWord};
use crate::systems::{AdmissibleSystem, LoadedFixture};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    BehrstockScan,
    OrderAudit,
    Theorem9Check,
    IntervalCheck,
    QieSandwich,
    FareyCrosscheck,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::schema("mode", format!("unknown mode `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub fixture: Option<String>,
    pub samples: usize,
    pub seed: u64,
    /// Longest random Nielsen word used to sample trees.
    pub nielsen_max: usize,
    pub syllables_max: usize,
    pub exponent_max: i64,
    /// Starting power; defaults to the fixture's.
    pub power: Option<u32>,
    pub power_cap: u32,
    pub m_emp: Option<u32>,
    pub l_path: Option<u32>,
    pub k: Option<u32>,
    /// Longest word any intermediate map or label may reach.
    pub letter_budget: usize,
    /// Coordinate bound for `farey-crosscheck`.
    pub farey_bound: i64,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, samples: usize, seed: u64) -> Self {
        ExperimentConfig {
            mode,
            fixture: None,
            samples,
            seed,
            nielsen_max: 12,
            syllables_max: 6,
            exponent_max: 3,
            power: None,
            power_cap: 1 << 10,
            m_emp: None,
            l_path: None,
            k: None,
            letter_budget: 1 << 21,
            farey_bound: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub sample: usize,
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Constants {
    pub m_emp: Option<u32>,
    /// Scan maximum over the first half of the samples.
    pub m_emp_half: Option<u32>,
    pub l_path: Option<u32>,
    pub d_max: Option<u32>,
    pub k: Option<u32>,
    pub power: Option<u32>,
    pub s: Option<usize>,
    pub translation: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub constants: Constants,
    pub path_model: &'static str,
    pub records: Vec<Value>,
    /// Samples whose preconditions held.
    pub evaluated: usize,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

impl Report {
    fn finish(
        config: &ExperimentConfig,
        constants: Constants,
        records: Vec<Value>,
        evaluated: usize,
        violations: Vec<Violation>,
    ) -> Report {
        Report {
            config: config.clone(),
            constants,
            path_model: "Nielsen factorization path from the rose; per-step displacement measured",
            records,
            evaluated,
            pass: violations.is_empty(),
            violations,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Generator for sample `index`; streams are independent of the number of samples.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random word of length `1..=max_len` in the fixed Nielsen generators.
pub fn random_nielsen_word(rng: &mut impl Rng, rank: usize, max_len: usize) -> Vec<Nielsen> {
    let gens = Nielsen::generators(rank);
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len)
        .map(|_| gens[rng.gen_range(0..gens.len())])
        .collect()
}

/// The rose transformed by a random Nielsen word.
pub fn random_tree(
    rng: &mut impl Rng,
    fixture: &LoadedFixture,
    max_len: usize,
) -> Result<MarkedGraph> {
    let al = &fixture.alphabet;
    let word = random_nielsen_word(rng, al.rank(), max_len);
    let mut f = GroupMap::identity(al);
    for mv in word {
        f = f.compose(&mv.to_map(al))?;
    }
    MarkedGraph::rose(al).transform(&f)
}

/// Random normalized element with at most `max_syl` syllables and `|e| <= max_exp`.
pub fn random_element(
    rng: &mut impl Rng,
    fixture: &LoadedFixture,
    max_syl: usize,
    max_exp: i64,
) -> Result<RaagWord> {
    let g = &fixture.gamma;
    let len = rng.gen_range(1..=max_syl.max(1));
    let pairs: Vec<(usize, i64)> = (0..len)
        .map(|_| {
            let e = rng.gen_range(1..=max_exp.max(1));
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            (rng.gen_range(0..g.len()), sign * e)
        })
        .collect();
    normalize(g, &RaagWord::from_pairs(g, &pairs)?)
}

fn overlapping_pairs(fixture: &LoadedFixture) -> Vec<(usize, usize)> {
    let m = fixture.factors.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if !fixture.gamma.adjacent(i, j)
                && crate::factors::overlap_check(&fixture.factors[i], &fixture.factors[j]).is_some()
            {
                out.push((i, j));
            }
        }
    }
    out
}

fn violation(sample: usize, kind: &str, detail: impl Into<String>) -> Violation {
    Violation {
        sample,
        kind: kind.into(),
        detail: detail.into(),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ResourceLimit(_) => "resource",
        Error::ProjectionDiameter(_) => "projection-diameter",
        Error::ThresholdViolated(_) => "threshold",
        _ => "error",
    }
}

/// Run one experiment. `fixture` is required for all modes but `farey-crosscheck`.
pub fn run_experiment(
    config: &ExperimentConfig,
    fixture: Option<&LoadedFixture>,
) -> Result<Report> {
    if config.mode == Mode::FareyCrosscheck {
        return Ok(farey_crosscheck(config));
    }
    let fx = fixture.ok_or_else(|| Error::schema("fixture", "this mode needs a system fixture"))?;
    match config.mode {
        Mode::BehrstockScan => behrstock_scan(config, fx),
        Mode::OrderAudit => order_audit(config, fx),
        Mode::Theorem9Check | Mode::IntervalCheck | Mode::QieSandwich => syllable_modes(config, fx),
        Mode::FareyCrosscheck => unreachable!(),
    }
}

#[derive(Serialize)]
struct ScanRecord {
    sample: usize,
    tree_size: usize,
    max_min: Option<u32>,
    per_pair: Vec<(usize, usize, u32)>,
}

fn scan_sample(
    config: &ExperimentConfig,
    fx: &LoadedFixture,
    pairs: &[(usize, usize)],
    idx: usize,
) -> Result<ScanRecord> {
    let mut rng = sample_rng(config.seed, idx);
    let t = random_tree(&mut rng, fx, config.nielsen_max)?;
    let mut per_pair = Vec::new();
    for &(i, j) in pairs {
        let d = behrstock_min(&fx.factors[i], &fx.factors[j], &t)?;
        per_pair.push((i, j, d));
    }
    Ok(ScanRecord {
        sample: idx,
        tree_size: t.size(),
        max_min: per_pair.iter().map(|p| p.2).max(),
        per_pair,
    })
}

/// `M_emp` over the samples and over their first half.
pub fn scan_m(
    config: &ExperimentConfig,
    fx: &LoadedFixture,
) -> (Option<u32>, Option<u32>, Vec<Value>, Vec<Violation>) {
    let pairs = overlapping_pairs(fx);
    let results: Vec<Result<ScanRecord>> = (0..config.samples)
        .into_par_iter()
        .map(|idx| scan_sample(config, fx, &pairs, idx))
        .collect();
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut m = None::<u32>;
    let mut m_half = None::<u32>;
    let half = config.samples / 2;
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => {
                if let Some(v) = rec.max_min {
                    m = Some(m.map_or(v, |x| x.max(v)));
                    if idx < half {
                        m_half = Some(m_half.map_or(v, |x| x.max(v)));
                    }
                }
                records.push(serde_json::to_value(rec).expect("record serializes"));
            }
            Err(e) => violations.push(violation(idx, error_kind(&e), e.to_string())),
        }
    }
    (m, m_half, records, violations)
}

fn behrstock_scan(config: &ExperimentConfig, fx: &LoadedFixture) -> Result<Report> {
    let (m, m_half, records, mut violations) = scan_m(config, fx);
    if m.is_none() {
        violations.push(violation(
            0,
            "no-samples",
            "no overlapping pair was evaluated",
        ));
    }
    let evaluated = records.len();
    let constants = Constants {
        m_emp: m,
        m_emp_half: m_half,
        ..Constants::default()
    };
    Ok(Report::finish(
        config, constants, records, evaluated, violations,
    ))
}

fn m_constant(config: &ExperimentConfig, fx: &LoadedFixture) -> Result<u32> {
    match config.m_emp {
        Some(m) => Ok(m),
        None => {
            let (m, _, _, v) = scan_m(config, fx);
            if let Some(v) = v.first() {
                return Err(Error::ThresholdViolated(format!(
                    "scan failed: {}",
                    v.detail
                )));
            }
            m.ok_or_else(|| Error::ThresholdViolated("scan found no overlapping pairs".into()))
        }
    }
}

#[derive(Serialize)]
struct OrderRecord {
    sample: usize,
    pair: (usize, usize),
    shift: String,
    d_a: u32,
    d_b: u32,
    in_omega: bool,
    verdict: Option<crate::projections::OrderVerdict>,
    quantities: Option<[u32; 4]>,
    consistent: Option<bool>,
    swap_reversed: Option<bool>,
}

fn order_sample(
    config: &ExperimentConfig,
    fx: &LoadedFixture,
    system: &AdmissibleSystem,
    pairs: &[(usize, usize)],
    m: u32,
    idx: usize,
) -> Result<OrderRecord> {
    let mut rng = sample_rng(config.seed, idx);
    let (i, j) = pairs[rng.gen_range(0..pairs.len())];
    // From a base tree T0: T = f_i^-e T0 and T' = f_j^f T0. By equivariance this is the
    // pair (A_i, f_i^e A_j) seen from T0 and φ(x_i^e x_j^f) T0, the two active factors of
    // that word. |e|, |f| are at least K since a generator moves its factor by about one
    // per unit of exponent.
    let k = 2 * m + 1;
    let lo = i64::from(k);
    let mut draw = || {
        rng.gen_range(lo..=lo + config.exponent_max.max(0)) * if rng.gen_bool(0.5) { 1 } else { -1 }
    };
    let (e, f) = (draw(), draw());
    let t0 = random_tree(&mut rng, fx, config.nielsen_max)?;
    let t = t0.transform_bounded(
        &system.generator_power(i, -e, config.letter_budget)?,
        config.letter_budget,
    )?;
    let t2 = t0.transform_bounded(
        &system.generator_power(j, f, config.letter_budget)?,
        config.letter_budget,
    )?;
    let shift = format!("T = f{i}^{} T0, T' = f{j}^{f} T0", -e);
    // Present the pair in either order so both verdicts occur.
    let (i, j) = if rng.gen_bool(0.5) { (j, i) } else { (i, j) };
    let (a, b) = (&fx.factors[i], &fx.factors[j]);
    let a_of_t = project_tree(a, &t)?;
    let a_of_t2 = project_tree(a, &t2)?;
    let b_of_t = project_tree(b, &t)?;
    let b_of_t2 = project_tree(b, &t2)?;
    let a_of_b = project_factor(a, b)?;
    let b_of_a = project_factor(b, a)?;
    let d_a = union_diameter(&a_of_t, &a_of_t2);
    let d_b = union_diameter(&b_of_t, &b_of_t2);
    let mut rec = OrderRecord {
        sample: idx,
        pair: (i, j),
        shift: shift.clone(),
        d_a,
        d_b,
        in_omega: d_a >= k && d_b >= k,
        verdict: None,
        quantities: None,
        consistent: None,
        swap_reversed: None,
    };
    if rec.in_omega {
        let fwd = factor_order_from(
            &OrderInputs {
                a_of_t: &a_of_t,
                a_of_t2: &a_of_t2,
                a_of_b: &a_of_b,
                b_of_t: &b_of_t,
                b_of_t2: &b_of_t2,
                b_of_a: &b_of_a,
            },
            m,
        )?;
        let back = factor_order_from(
            &OrderInputs {
                a_of_t: &b_of_t,
                a_of_t2: &b_of_t2,
                a_of_b: &b_of_a,
                b_of_t: &a_of_t,
                b_of_t2: &a_of_t2,
                b_of_a: &a_of_b,
            },
            m,
        )?;
        rec.verdict = Some(fwd.verdict);
        rec.quantities = Some([fwd.a_t_b, fwd.b_t_a, fwd.b_t2_a, fwd.a_t2_b]);
        rec.consistent = Some(fwd.consistent && back.consistent);
        rec.swap_reversed = Some(fwd.verdict != back.verdict);
    }
    Ok(rec)
}

fn order_audit(config: &ExperimentConfig, fx: &LoadedFixture) -> Result<Report> {
    let m = m_constant(config, fx)?;
    let power = config.power.unwrap_or(fx.power);
    let system = fx.system(power, config.letter_budget)?;
    let pairs = overlapping_pairs(fx);
    if pairs.is_empty() {
        return Err(Error::NotOverlapping);
    }
    let results: Vec<Result<OrderRecord>> = (0..config.samples)
        .into_par_iter()
        .map(|idx| order_sample(config, fx, &system, &pairs, m, idx))
        .collect();
    let mut records = Vec::new();
    let mut violations = Vec::new();
    let mut evaluated = 0;
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => {
                if rec.in_omega {
                    evaluated += 1;
                    if rec.consistent != Some(true) {
                        violations.push(violation(
                            idx,
                            "equivalence",
                            format!("{:?}", rec.quantities),
                        ));
                    }
                    if rec.swap_reversed != Some(true) {
                        violations.push(violation(idx, "swap", "swapped verdict not reversed"));
                    }
                }
                records.push(serde_json::to_value(rec).expect("record serializes"));
            }
            Err(e) => violations.push(violation(idx, error_kind(&e), e.to_string())),
        }
    }
    if evaluated == 0 {
        violations.push(violation(
            0,
            "no-samples",
            "no sample met the Omega precondition",
        ));
    }
    let constants = Constants {
        m_emp: Some(m),
        k: Some(2 * m + 1),
        power: Some(power),
        ..Constants::default()
    };
    Ok(Report::finish(
        config, constants, records, evaluated, violations,
    ))
}

/// Largest per-step displacement over random Nielsen paths from the rose, for every factor.
pub fn measure_l_path(config: &ExperimentConfig, fx: &LoadedFixture) -> Result<u32> {
    let al = &fx.alphabet;
    let steps: Vec<Result<u32>> = (0..config.samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = sample_rng(config.seed ^ 0x004c_5041_5448, idx);
            let word = random_nielsen_word(&mut rng, al.rank(), config.nielsen_max);
            let path = TreePath::from_moves(&MarkedGraph::rose(al), &word, config.letter_budget)?;
            let mut best = 0;
            for a in &fx.factors {
                best = best.max(path.step_bound(a)?);
            }
            Ok(best)
        })
        .collect();
    let mut l = 0;
    for s in steps {
        l = l.max(s?);
    }
    Ok(l)
}

/// Constants of the syllable modes: `M`, `L`, `D`, `K`, the power and `s`.
pub fn derive_constants(config: &ExperimentConfig, fx: &LoadedFixture) -> Result<Constants> {
    let m = m_constant(config, fx)?;
    let l = match config.l_path {
        Some(l) => l,
        None => measure_l_path(config, fx)?,
    };
    let rose = MarkedGraph::rose(&fx.alphabet);
    let mut d_max = 0;
    for &(i, j) in &overlapping_pairs(fx) {
        for (x, y) in [(i, j), (j, i)] {
            let d = projection_distance(
                &fx.factors[x],
                Target::Tree(&rose),
                Target::Factor(&fx.factors[y]),
            )?;
            d_max = d_max.max(d);
        }
    }
    let k = config.k.unwrap_or(5 * m + 3 * l + 2 * d_max);
    // Stable lengths of the unpowered generators on their factors.
    let mut translation = Vec::new();
    for (f, a) in fx.generators.iter().zip(&fx.factors) {
        let r = restriction(f, a).ok_or_else(|| {
            Error::SupportViolation("generator does not stabilize its factor".into())
        })?;
        translation.push(translation_length_estimate(matrix_of_out(&r)?, 16)?.slope);
    }
    // Double the power until every generator translates its factor by at least 2K.
    let mut power = config.power.unwrap_or(fx.power).max(1);
    let min_l = translation.iter().copied().fold(f64::INFINITY, f64::min);
    while (power as f64) * min_l < 2.0 * k as f64 && power < config.power_cap {
        power = (power * 2).min(config.power_cap);
    }
    let s = clique_number(&fx.gamma)?;
    Ok(Constants {
        m_emp: Some(m),
        m_emp_half: None,
        l_path: Some(l),
        d_max: Some(d_max),
        k: Some(k),
        power: Some(power),
        s: Some(s),
        translation,
    })
}

#[derive(Serialize, Default)]
struct SyllableRecord {
    sample: usize,
    word: String,
    length: u64,
    distances: Vec<(usize, i64, u32)>,
    path_length: Option<u64>,
    intervals: Option<Vec<(usize, usize, usize)>>,
    ordered: Option<bool>,
    sum: Option<u64>,
    sum_bound: Option<u64>,
    step_max: Option<u32>,
    sandwich_rhs: Option<f64>,
}

fn factorizations(system: &AdmissibleSystem) -> Result<Vec<(Vec<Nielsen>, Vec<Nielsen>)>> {
    system
        .base()
        .iter()
        .map(|f| {
            let fwd = nielsen_factorization(f)?;
            let back: Vec<Nielsen> = fwd.iter().rev().map(|n| n.inverse()).collect();
            Ok((fwd, back))
        })
        .collect()
}

/// Moves of `φ(g)`, concatenating per-syllable factorizations of `f_i^{±p}`.
fn phi_moves(
    g: &RaagWord,
    facts: &[(Vec<Nielsen>, Vec<Nielsen>)],
    power: u32,
    budget: usize,
) -> Result<Vec<Nielsen>> {
    let mut out = Vec::new();
    for s in g.syllables() {
        let (fwd, back) = &facts[s.gen];
        let one = if s.exp > 0 { fwd } else { back };
        let reps = s.exp.unsigned_abs() * u64::from(power);
        if (out.len() as u64).saturating_add(reps.saturating_mul(one.len() as u64)) > budget as u64
        {
            return Err(Error::ResourceLimit(format!(
                "path longer than {budget} steps"
            )));
        }
        for _ in 0..reps {
            out.extend_from_slice(one);
        }
    }
    Ok(out)
}

fn path_length(g: &RaagWord, facts: &[(Vec<Nielsen>, Vec<Nielsen>)], power: u32) -> u64 {
    g.syllables()
        .iter()
        .map(|s| s.exp.unsigned_abs() * u64::from(power) * facts[s.gen].0.len() as u64)
        .sum()
}

fn syllable_sample(
    config: &ExperimentConfig,
    fx: &LoadedFixture,
    system: &AdmissibleSystem,
    facts: &[(Vec<Nielsen>, Vec<Nielsen>)],
    c: &Constants,
    idx: usize,
) -> (SyllableRecord, Vec<Violation>) {
    let mut rng = sample_rng(config.seed, idx);
    let mut rec = SyllableRecord {
        sample: idx,
        ..SyllableRecord::default()
    };
    let mut vs = Vec::new();
    let g = match random_element(&mut rng, fx, config.syllables_max, config.exponent_max) {
        Ok(g) => g,
        Err(e) => return (rec, vec![violation(idx, error_kind(&e), e.to_string())]),
    };
    rec.word = fx.gamma.format_word(&g);
    rec.length = g.word_length();
    let (m, l, k, s) = (
        c.m_emp.unwrap_or(0),
        c.l_path.unwrap_or(0),
        c.k.unwrap_or(0),
        c.s.unwrap_or(1) as u64,
    );
    let power = c.power.unwrap_or(system.power());
    let n = path_length(&g, facts, power);
    rec.path_length = Some(n);
    if config.mode == Mode::QieSandwich {
        let rhs = 5.0 * s as f64 * l as f64 / k.max(1) as f64 * n as f64;
        rec.sandwich_rhs = Some(rhs);
        if rec.length as f64 > rhs {
            vs.push(violation(
                idx,
                "sandwich",
                format!("|g| = {} > {rhs}", rec.length),
            ));
        }
        return (rec, vs);
    }
    let mut run = || -> Result<()> {
        let t = MarkedGraph::rose(&fx.alphabet);
        let phi = system.apply_phi_bounded(&g, config.letter_budget)?;
        let t2 = t.transform_bounded(&phi, config.letter_budget)?;
        let mut actives = Vec::new();
        for (kk, syl) in g.syllables().iter().enumerate() {
            let prefix = system.prefix_map(&g, kk, config.letter_budget)?;
            let a = transport(&prefix, &fx.factors[syl.gen]);
            let d = projection_distance(&a, Target::Tree(&t), Target::Tree(&t2))?;
            rec.distances.push((kk, syl.exp, d));
            if config.mode == Mode::Theorem9Check
                && u64::from(d) < u64::from(k) * syl.exp.unsigned_abs()
            {
                vs.push(violation(
                    idx,
                    "theorem9",
                    format!(
                        "syllable {kk}: d = {d} < K|e| = {}",
                        u64::from(k) * syl.exp.unsigned_abs()
                    ),
                ));
            }
            actives.push(a);
        }
        if config.mode == Mode::IntervalCheck {
            let moves = phi_moves(&g, facts, power, config.letter_budget)?;
            let path = TreePath::from_moves(&t, &moves, config.letter_budget)?;
            let order = syllable_order(&fx.gamma, &g)?;
            let pairs: Vec<(usize, usize)> = order.prec.iter().copied().collect();
            let rep = intervals_and_order(&path, &actives, &pairs, m, l, s)?;
            rec.intervals = Some(rep.records.iter().map(|r| (r.factor, r.a, r.b)).collect());
            rec.ordered = Some(rep.ordered());
            rec.sum = Some(rep.sum);
            rec.sum_bound = Some(rep.bound);
            let step = rep.records.iter().map(|r| r.step).max().unwrap_or(0);
            rec.step_max = Some(step);
            if step > l {
                vs.push(violation(
                    idx,
                    "step-bound",
                    format!("step {step} > L = {l}"),
                ));
            }
            for p in rep.pairs.iter().filter(|p| !p.ordered) {
                vs.push(violation(
                    idx,
                    "interval-order",
                    format!("I_{} not before I_{}", p.before, p.after),
                ));
            }
            if !rep.sum_ok() {
                vs.push(violation(
                    idx,
                    "sum-bound",
                    format!("{} > {}", rep.sum, rep.bound),
                ));
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        vs.push(violation(idx, error_kind(&e), format!("{}: {e}", rec.word)));
    }
    (rec, vs)
}

fn syllable_modes(config: &ExperimentConfig, fx: &LoadedFixture) -> Result<Report> {
    let constants = derive_constants(config, fx)?;
    let power = constants.power.unwrap_or(1);
    let k = constants.k.unwrap_or(0);
    let mut violations = Vec::new();
    let reached = constants
        .translation
        .iter()
        .all(|&t| power as f64 * t >= 2.0 * k as f64);
    if !reached {
        violations.push(violation(
            0,
            "power",
            format!(
                "power cap {} does not reach translation 2K = {}",
                config.power_cap,
                2 * k
            ),
        ));
    }
    // The sandwich needs only path lengths, read off the base factorizations. Support,
    // commutation and hyperbolicity pass from the base maps to their powers, so certify at 1.
    let certified_power = if config.mode == Mode::QieSandwich {
        1
    } else {
        power
    };
    let system = match fx.system(certified_power, config.letter_budget) {
        Ok(s) => s,
        Err(e) => {
            violations.push(violation(
                0,
                error_kind(&e),
                format!("system at power {power}: {e}"),
            ));
            return Ok(Report::finish(config, constants, Vec::new(), 0, violations));
        }
    };
    let facts = factorizations(&system)?;
    let results: Vec<(SyllableRecord, Vec<Violation>)> = (0..config.samples)
        .into_par_iter()
        .map(|idx| syllable_sample(config, fx, &system, &facts, &constants, idx))
        .collect();
    let mut records = Vec::new();
    let mut evaluated = 0;
    for (rec, vs) in results {
        if vs.iter().all(|v| v.kind != "resource" && v.kind != "error") {
            evaluated += 1;
        }
        violations.extend(vs);
        records.push(serde_json::to_value(rec).expect("record serializes"));
    }
    Ok(Report::finish(
        config, constants, records, evaluated, violations,
    ))
}

/// Farey graph distances by breadth-first search inside the box `|p|, |q| <= bound`.
pub fn farey_bfs_from(base: FareyVertex, bound: i64) -> BTreeMap<FareyVertex, u32> {
    let mut verts = BTreeSet::new();
    for q in -bound..=bound {
        for p in -bound..=bound {
            if let Ok(v) = FareyVertex::new(p, q) {
                verts.insert(v);
            }
        }
    }
    let mut dist = BTreeMap::new();
    dist.insert(base, 0u32);
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for &v in &verts {
            if !dist.contains_key(&v) && u.adjacent(v) {
                dist.insert(v, du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn farey_crosscheck(config: &ExperimentConfig) -> Report {
    let mut violations = Vec::new();
    let mut records = Vec::new();
    let box_bound = 40.min(config.farey_bound);
    let bfs = farey_bfs_from(FareyVertex::INFINITY, box_bound);
    let mut exhaustive = 0;
    for (v, d) in &bfs {
        exhaustive += 1;
        let cf = FareyVertex::INFINITY.distance(*v);
        if cf != *d {
            violations.push(violation(
                0,
                "bfs",
                format!("{v}: continued fraction {cf}, BFS {d}"),
            ));
        }
    }
    records.push(json!({ "exhaustive_box": box_bound, "vertices": exhaustive }));
    let b = config.farey_bound;
    let results: Vec<Vec<Violation>> = (0..config.samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = sample_rng(config.seed, idx);
            let mut draw = || loop {
                let p = rng.gen_range(-b..=b);
                let q = rng.gen_range(-b..=b);
                if let Ok(v) = FareyVertex::new(p, q) {
                    return v;
                }
            };
            let (u, v, w) = (draw(), draw(), draw());
            let mut vs = Vec::new();
            let (duv, dvu) = (u.distance(v), v.distance(u));
            if duv != dvu {
                vs.push(violation(
                    idx,
                    "symmetry",
                    format!("d({u},{v}) = {duv}, d({v},{u}) = {dvu}"),
                ));
            }
            if (duv == 0) != (u == v) {
                vs.push(violation(idx, "identity", format!("d({u},{v}) = {duv}")));
            }
            if (duv == 1) != u.adjacent(v) {
                vs.push(violation(idx, "adjacency", format!("d({u},{v}) = {duv}")));
            }
            let (duw, dwv) = (u.distance(w), w.distance(v));
            if duv > duw + dwv {
                vs.push(violation(
                    idx,
                    "triangle",
                    format!("{u} {v} {w}: {duv} > {duw} + {dwv}"),
                ));
            }
            vs
        })
        .collect();
    for vs in results {
        violations.extend(vs);
    }
    Report::finish(
        config,
        Constants::default(),
        records,
        config.samples,
        violations,
    )
}
