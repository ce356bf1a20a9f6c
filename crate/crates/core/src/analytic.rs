//! Closed-form blocking probabilities and contamination expectations for
//! tracker-mediated dissemination with Byzantine nodes.
//!
//! The model: n_s seed nodes hold the file, n_r receiver-side nodes want it,
//! and both sets are uniform subsets of n_total nodes. Every node is
//! Byzantine independently with probability p_b. Receivers outside the seed
//! set activate one per time slot and fetch from d distinct informed nodes
//! chosen by a tracker — either from the seeds only (static list) or from
//! everyone informed so far (evolving list). A node ends up contaminated if
//! it is Byzantine itself or any fetched parent is contaminated; the
//! transfer is blocked if any receiver-set node ends up contaminated.
//!
//! All binomial coefficients are computed exactly in arbitrary precision
//! and converted to floating point once, so small-parameter evaluations are
//! accurate to a few ulps and the p_b = 0 / p_b = 1 anchors are exact.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Errors from model-parameter validation and pmf preconditions.
#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    /// Receivers fetch from d >= 2 parents so rank can accumulate.
    #[error("tracker list size d must be at least 2, got {0}")]
    ListTooSmall(u64),
    /// d distinct parents must exist among the seeds alone.
    #[error("tracker list size d = {d} must be smaller than the seed count n_s = {n_s}")]
    ListNotBelowSeeds { d: u64, n_s: u64 },
    /// Level sizes must nest: n_s <= n_r <= n_total.
    #[error("need 1 <= n_s <= n_r <= n_total, got n_s = {n_s}, n_r = {n_r}, n_total = {n_total}")]
    BadLevelSizes { n_s: u64, n_r: u64, n_total: u64 },
    #[error("probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("overlap y = {y} cannot exceed min(n_s, n_r) = {limit}")]
    OverlapTooLarge { y: u64, limit: u64 },
    #[error("depth t = {t} exceeds the downloader count n_r - y = {limit}")]
    DepthTooLarge { t: u64, limit: u64 },
    #[error("contaminated count i = {i} cannot exceed the seed count n_s = {n_s}")]
    ContaminatedTooLarge { i: u64, n_s: u64 },
    #[error("hypergeometric marked count {marked} exceeds the population {population}")]
    MarkedExceedsPopulation { marked: u64, population: u64 },
    #[error("hypergeometric draw count {draws} exceeds the population {population}")]
    DrawsExceedPopulation { draws: u64, population: u64 },
    #[error("binomial success count {successes} exceeds the trial count {trials}")]
    SuccessesExceedTrials { successes: u64, trials: u64 },
}

/// Validated topology and adversary parameters shared by every formula.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    n_total: u64,
    n_s: u64,
    n_r: u64,
    d: u64,
    p_b: f64,
}

impl ModelParams {
    pub fn new(n_total: u64, n_s: u64, n_r: u64, d: u64, p_b: f64) -> Result<Self, AnalyticError> {
        if n_s < 1 || n_s > n_r || n_r > n_total {
            return Err(AnalyticError::BadLevelSizes { n_s, n_r, n_total });
        }
        if d < 2 {
            return Err(AnalyticError::ListTooSmall(d));
        }
        if d >= n_s {
            return Err(AnalyticError::ListNotBelowSeeds { d, n_s });
        }
        if !(0.0..=1.0).contains(&p_b) {
            return Err(AnalyticError::ProbabilityOutOfRange(p_b));
        }
        Ok(ModelParams {
            n_total,
            n_s,
            n_r,
            d,
            p_b,
        })
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn n_s(&self) -> u64 {
        self.n_s
    }

    pub fn n_r(&self) -> u64 {
        self.n_r
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    /// Same topology with a different Byzantine probability.
    pub fn with_p_b(&self, p_b: f64) -> Result<Self, AnalyticError> {
        ModelParams::new(self.n_total, self.n_s, self.n_r, self.d, p_b)
    }
}

/// One state of the contamination chain: how many informed nodes are
/// contaminated vs. clean. At depth t the two counts sum to n_s + t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkovState {
    pub contaminated: u64,
    pub uncontaminated: u64,
}

/// Exact binomial coefficient, converted to f64 once at the end.
fn choose(n: u64, k: u64) -> f64 {
    binomial(BigUint::from(n), BigUint::from(k))
        .to_f64()
        .expect("binomial coefficient converts to f64")
}

/// Hypergeometric pmf h(k; N, K, n): probability of k marked items in an
/// n-item draw without replacement from a population of N with K marked.
/// Out-of-support k yields 0.
pub fn hypergeom_pmf(
    k: u64,
    population: u64,
    marked: u64,
    draws: u64,
) -> Result<f64, AnalyticError> {
    if marked > population {
        return Err(AnalyticError::MarkedExceedsPopulation { marked, population });
    }
    if draws > population {
        return Err(AnalyticError::DrawsExceedPopulation { draws, population });
    }
    if k > marked || k > draws || draws - k > population - marked {
        return Ok(0.0);
    }
    let numerator = binomial(BigUint::from(marked), BigUint::from(k))
        * binomial(BigUint::from(population - marked), BigUint::from(draws - k));
    let denominator = binomial(BigUint::from(population), BigUint::from(draws));
    Ok(numerator.to_f64().expect("numerator converts")
        / denominator.to_f64().expect("denominator converts"))
}

/// Binomial pmf: C(n, i) p^i (1-p)^(n-i).
pub fn binom_pmf(successes: u64, trials: u64, p: f64) -> Result<f64, AnalyticError> {
    if successes > trials {
        return Err(AnalyticError::SuccessesExceedTrials { successes, trials });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(AnalyticError::ProbabilityOutOfRange(p));
    }
    Ok(choose(trials, successes)
        * p.powi(successes as i32)
        * (1.0 - p).powi((trials - successes) as i32))
}

/// P(no contaminated parent) for one fetch of d distinct parents from a
/// pool of `pool` informed nodes of which `contaminated` are bad.
fn clean_fetch(pool: u64, contaminated: u64, d: u64) -> f64 {
    hypergeom_pmf(0, pool, contaminated, d).expect("d <= n_s <= pool by construction")
}

/// P(none of the y overlap nodes is Byzantine | i Byzantine seeds). The
/// overlap N_s intersect N_r is a uniformly random y-subset of the n_s
/// seeds, so the joint probability is the hypergeometric mass
/// h(0; n_s, i, y) — the per-node factor (1 - i/n_s)^y holds only for
/// y <= 1 because the draws are without replacement.
fn overlap_clean(n_s: u64, i: u64, y: u64) -> f64 {
    hypergeom_pmf(0, n_s, i, y).expect("y <= n_s by construction")
}

/// Blocking probability under the static tracker list: every downloader
/// fetches d parents from the n_s seeds. Mixing over the overlap Y and the
/// Byzantine seed count i:
///
///   psi = 1 - sum_y h(y; N, n_s, n_r) sum_i binom(i; n_s, p_b)
///             h(0; n_s, i, y) [(1-p_b) h(0; n_s, i, d)]^(n_r - y)
pub fn blocking_static(params: &ModelParams) -> f64 {
    blocking(params, false)
}

/// Blocking probability under the evolving tracker list: the t-th
/// downloader fetches from the n_s + t - 1 nodes informed so far. On the
/// unblocked path the contaminated count stays at i, giving the product
///
///   f(i, y) = h(0; n_s, i, y) prod_t (1-p_b) h(0; n_s+t-1, i, d).
pub fn blocking_evolving(params: &ModelParams) -> f64 {
    blocking(params, true)
}

fn blocking(params: &ModelParams, evolving: bool) -> f64 {
    let (n, n_s, n_r, d, p_b) = (params.n_total, params.n_s, params.n_r, params.d, params.p_b);
    // Common-denominator mixture over y: weights C(n_s,y) C(n-n_s, n_r-y)
    // summed against a single division by C(n, n_r) keep the p_b = 0 anchor
    // exactly 0 (the weights and their sum are integers exact in f64 at
    // these scales).
    let mut acc = 0.0;
    for y in 0..=n_s.min(n_r) {
        if n_r - y > n - n_s {
            continue;
        }
        let weight = choose(n_s, y) * choose(n - n_s, n_r - y);
        if weight == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for i in 0..=n_s {
            let mass = binom_pmf(i, n_s, p_b).expect("i <= n_s, p_b validated");
            if mass == 0.0 {
                continue;
            }
            let survive = if evolving {
                (1..=n_r - y)
                    .map(|t| (1.0 - p_b) * clean_fetch(n_s + t - 1, i, d))
                    .product::<f64>()
            } else {
                ((1.0 - p_b) * clean_fetch(n_s, i, d)).powi((n_r - y) as i32)
            };
            inner += mass * overlap_clean(n_s, i, y) * survive;
        }
        acc += weight * inner;
    }
    (1.0 - acc / choose(n, n_r)).clamp(0.0, 1.0)
}

/// Distribution of the contamination chain after t downloader slots,
/// starting from i contaminated among the n_s seeds. The slot-t' transition
/// (pool size n_s + t' - 1, x contaminated) adds a contaminated node with
/// probability 1 - (1-p_b) h(0; n_s+t'-1, x, d) and a clean one otherwise.
/// y and n_r only bound the depth: t <= n_r - y downloaders exist.
pub fn markov_state_distribution(
    n_s: u64,
    i: u64,
    y: u64,
    n_r: u64,
    d: u64,
    p_b: f64,
    t: u64,
) -> Result<BTreeMap<MarkovState, f64>, AnalyticError> {
    if i > n_s {
        return Err(AnalyticError::ContaminatedTooLarge { i, n_s });
    }
    let limit = n_s.min(n_r);
    if y > limit {
        return Err(AnalyticError::OverlapTooLarge { y, limit });
    }
    if t > n_r - y {
        return Err(AnalyticError::DepthTooLarge { t, limit: n_r - y });
    }
    if d < 2 {
        return Err(AnalyticError::ListTooSmall(d));
    }
    if d >= n_s {
        return Err(AnalyticError::ListNotBelowSeeds { d, n_s });
    }
    if !(0.0..=1.0).contains(&p_b) {
        return Err(AnalyticError::ProbabilityOutOfRange(p_b));
    }

    // dist[j] = P(contaminated = i + j) after the slots processed so far.
    let mut dist = vec![1.0f64];
    for slot in 1..=t {
        let pool = n_s + slot - 1;
        let mut next = vec![0.0f64; dist.len() + 1];
        for (j, mass) in dist.iter().enumerate() {
            if *mass == 0.0 {
                continue;
            }
            let x = i + j as u64;
            let p_clean = (1.0 - p_b) * clean_fetch(pool, x, d);
            next[j] += mass * p_clean;
            next[j + 1] += mass * (1.0 - p_clean);
        }
        dist = next;
    }
    Ok(dist
        .into_iter()
        .enumerate()
        .map(|(j, mass)| {
            let contaminated = i + j as u64;
            (
                MarkovState {
                    contaminated,
                    uncontaminated: n_s + t - contaminated,
                },
                mass,
            )
        })
        .collect())
}

/// E[C(t) | Y = y] under the static list: each of the t downloaders so far
/// became contaminated independently with probability
/// 1 - (1-p_b) h(0; n_s, i, d), so the expectation is affine in t.
pub fn expected_contaminated_static(
    params: &ModelParams,
    y: u64,
    t: u64,
) -> Result<f64, AnalyticError> {
    check_depth(params, y, t)?;
    let (n_s, d, p_b) = (params.n_s, params.d, params.p_b);
    let mut acc = 0.0;
    for i in 0..=n_s {
        let mass = binom_pmf(i, n_s, p_b)?;
        let p_contam = 1.0 - (1.0 - p_b) * clean_fetch(n_s, i, d);
        acc += mass * (i as f64 + t as f64 * p_contam);
    }
    Ok(acc)
}

/// E[C(t) | Y = y] under the evolving list: the mean of the contamination
/// chain at depth t, mixed over the Byzantine seed count.
pub fn expected_contaminated_evolving(
    params: &ModelParams,
    y: u64,
    t: u64,
) -> Result<f64, AnalyticError> {
    check_depth(params, y, t)?;
    let (n_s, n_r, d, p_b) = (params.n_s, params.n_r, params.d, params.p_b);
    let mut acc = 0.0;
    for i in 0..=n_s {
        let mass = binom_pmf(i, n_s, p_b)?;
        if mass == 0.0 {
            continue;
        }
        let dist = markov_state_distribution(n_s, i, y, n_r, d, p_b, t)?;
        let mean: f64 = dist
            .iter()
            .map(|(state, p)| state.contaminated as f64 * p)
            .sum();
        acc += mass * mean;
    }
    Ok(acc)
}

fn check_depth(params: &ModelParams, y: u64, t: u64) -> Result<(), AnalyticError> {
    let limit = params.n_s.min(params.n_r);
    if y > limit {
        return Err(AnalyticError::OverlapTooLarge { y, limit });
    }
    if t > params.n_r - y {
        return Err(AnalyticError::DepthTooLarge {
            t,
            limit: params.n_r - y,
        });
    }
    Ok(())
}

/// CSV of both blocking curves over a p_b grid: `p_b,psi_static,psi_evolving`.
pub fn blocking_curve_csv(params: &ModelParams, p_b_grid: &[f64]) -> Result<String, AnalyticError> {
    let mut out = String::from("p_b,psi_static,psi_evolving\n");
    for &p_b in p_b_grid {
        let at = params.with_p_b(p_b)?;
        out.push_str(&format!(
            "{},{},{}\n",
            p_b,
            blocking_static(&at),
            blocking_evolving(&at)
        ));
    }
    Ok(out)
}

/// CSV of both E[C(t) | Y = y] curves for t = 0..=n_r - y:
/// `t,e_c_static,e_c_evolving`.
pub fn contamination_curve_csv(params: &ModelParams, y: u64) -> Result<String, AnalyticError> {
    let mut out = String::from("t,e_c_static,e_c_evolving\n");
    for t in 0..=(params.n_r - y.min(params.n_r)) {
        out.push_str(&format!(
            "{},{},{}\n",
            t,
            expected_contaminated_static(params, y, t)?,
            expected_contaminated_evolving(params, y, t)?
        ));
    }
    Ok(out)
}
