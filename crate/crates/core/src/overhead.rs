//! Bandwidth-overhead models for three contamination defenses, expressed as
//! the expected overhead fraction of all data received.
//!
//! Schemes compared, with p_n the per-node probability that an arriving
//! packet is contaminated:
//!
//! * packet signatures — every packet carries a signature costing
//!   o_p = op_rate * (m + l) symbols, and contaminated packets are dropped
//!   on arrival: cost = max{0, op_rate - p_n};
//! * end-to-end detection — contaminated data is only discovered and
//!   re-fetched at the receiver: cost = p_n;
//! * generation hashing — each generation of G packets carries hashes
//!   costing o_g = og_rate * (m + l) * G, and one contaminated packet drops
//!   the whole generation (probability p_g = 1 - (1 - p_n)^G):
//!   cost = max{0, og_rate + p_g (1 - p_n) - p_n}.
//!
//! The max{0, .} clamps are applied exactly as modeled; the pre-clamp
//! values (negative means net bandwidth savings) are also exposed and
//! emitted as diagnostic CSV columns. Note that the generation cost can
//! slightly exceed 1 for large G at small p_n (bounded by 1 + og_rate):
//! the re-fetch accounting spends more than one useful packet's bandwidth
//! per delivered packet there.

use thiserror::Error;

/// Default packet-signature overhead rate per symbol (6%).
pub const DEFAULT_OP_RATE: f64 = 0.06;
/// Default generation hash overhead rate per symbol (2%).
pub const DEFAULT_OG_RATE: f64 = 0.02;

/// Errors from cost-model parameter validation.
#[derive(Debug, Error, PartialEq)]
pub enum OverheadError {
    #[error("{name} must be at least 1")]
    ZeroDimension { name: &'static str },
    #[error("overhead rate must lie in [0, 1), got {0}")]
    RateOutOfRange(f64),
    #[error("probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("grid step must lie in (0, 0.1], got {0}")]
    InvalidGridStep(f64),
}

/// Shared inputs of the cost formulas. The absolute packet count per slot
/// cancels in every ratio and is deliberately not a field.
#[derive(Debug, Clone, PartialEq)]
pub struct CostModelParams {
    m: u64,
    l: u64,
    g: u64,
    p_n: f64,
    op_rate: f64,
    og_rate: f64,
}

impl CostModelParams {
    pub fn new(
        m: u64,
        l: u64,
        g: u64,
        p_n: f64,
        op_rate: f64,
        og_rate: f64,
    ) -> Result<Self, OverheadError> {
        for (name, value) in [("m", m), ("l", l), ("G", g)] {
            if value == 0 {
                return Err(OverheadError::ZeroDimension { name });
            }
        }
        if !(0.0..=1.0).contains(&p_n) {
            return Err(OverheadError::ProbabilityOutOfRange(p_n));
        }
        for rate in [op_rate, og_rate] {
            if !(0.0..1.0).contains(&rate) {
                return Err(OverheadError::RateOutOfRange(rate));
            }
        }
        Ok(CostModelParams {
            m,
            l,
            g,
            p_n,
            op_rate,
            og_rate,
        })
    }

    /// Default 6% signature and 2% hash rates.
    pub fn with_default_rates(m: u64, l: u64, g: u64, p_n: f64) -> Result<Self, OverheadError> {
        CostModelParams::new(m, l, g, p_n, DEFAULT_OP_RATE, DEFAULT_OG_RATE)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn generation_size(&self) -> u64 {
        self.g
    }

    pub fn p_n(&self) -> f64 {
        self.p_n
    }

    pub fn op_rate(&self) -> f64 {
        self.op_rate
    }

    pub fn og_rate(&self) -> f64 {
        self.og_rate
    }

    pub fn with_p_n(&self, p_n: f64) -> Result<Self, OverheadError> {
        CostModelParams::new(self.m, self.l, self.g, p_n, self.op_rate, self.og_rate)
    }

    pub fn with_generation_size(&self, g: u64) -> Result<Self, OverheadError> {
        CostModelParams::new(self.m, self.l, g, self.p_n, self.op_rate, self.og_rate)
    }
}

/// The three defense schemes the model compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Packet,
    E2e,
    Generation,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Packet => "packet",
            Scheme::E2e => "e2e",
            Scheme::Generation => "generation",
        })
    }
}

/// Packet-signature cost fraction: signatures cost o_p = op_rate * (m + l)
/// per packet, contaminated arrivals are dropped immediately, and the
/// (m + l) packet size cancels: max{0, op_rate - p_n}.
pub fn packet_scheme_cost(params: &CostModelParams) -> f64 {
    packet_scheme_cost_raw(params).max(0.0)
}

/// Pre-clamp packet-signature value; negative means the signatures cost
/// less bandwidth than the contaminated traffic they stop.
pub fn packet_scheme_cost_raw(params: &CostModelParams) -> f64 {
    params.op_rate - params.p_n
}

/// End-to-end correction cost fraction: contaminated data rides all the
/// way to the receiver and is re-fetched, so the fraction is p_n itself.
pub fn e2e_cost(p_n: f64) -> f64 {
    p_n
}

/// Probability that a generation of G packets contains at least one
/// contaminated packet: 1 - (1 - p_n)^G.
pub fn generation_drop_prob(p_n: f64, g: u64) -> f64 {
    1.0 - (1.0 - p_n).powi(g as i32)
}

/// Generation-hash cost fraction: hashes cost o_g = og_rate * (m + l) * G,
/// a contaminated generation (probability p_g) forces re-fetching its
/// (1 - p_n)(m + l)G clean packets, and contaminated packets themselves are
/// not useful data; the (m + l)G size cancels:
/// max{0, og_rate + p_g (1 - p_n) - p_n}.
pub fn generation_scheme_cost(params: &CostModelParams) -> f64 {
    generation_scheme_cost_raw(params).max(0.0)
}

/// Pre-clamp generation-hash value.
pub fn generation_scheme_cost_raw(params: &CostModelParams) -> f64 {
    let p_g = generation_drop_prob(params.p_n, params.g);
    params.og_rate + p_g * (1.0 - params.p_n) - params.p_n
}

/// Stated large-G limit of the generation cost: max{0, 1 - 2 p_n}. The
/// cost formula itself converges to max{0, og_rate + 1 - 2 p_n}, a
/// constant og_rate above this below the crossover.
pub fn generation_cost_limit(p_n: f64) -> f64 {
    (1.0 - 2.0 * p_n).max(0.0)
}

/// Size of the public key relative to the file it certifies:
/// (m + l) q_bits / (8 file_bytes), with l = ceil(8 file_bytes / (m p_bits))
/// symbols per packet. Can exceed 1 for files smaller than one key.
pub fn pubkey_overhead(
    file_bytes: u64,
    m: u64,
    p_bits: u32,
    q_bits: u32,
) -> Result<f64, OverheadError> {
    if file_bytes == 0 {
        return Err(OverheadError::ZeroDimension { name: "file_bytes" });
    }
    if m == 0 {
        return Err(OverheadError::ZeroDimension { name: "m" });
    }
    if p_bits == 0 {
        return Err(OverheadError::ZeroDimension { name: "p_bits" });
    }
    if q_bits == 0 {
        return Err(OverheadError::ZeroDimension { name: "q_bits" });
    }
    let file_bits = 8u128 * u128::from(file_bytes);
    let per_packet = u128::from(m) * u128::from(p_bits);
    let l = file_bits.div_ceil(per_packet);
    let key_bits = (u128::from(m) + l) * u128::from(q_bits);
    Ok(key_bits as f64 / file_bits as f64)
}

fn cost_at(scheme: Scheme, params: &CostModelParams, p_n: f64) -> Result<f64, OverheadError> {
    let at = params.with_p_n(p_n)?;
    Ok(match scheme {
        Scheme::Packet => packet_scheme_cost(&at),
        Scheme::E2e => e2e_cost(p_n),
        Scheme::Generation => generation_scheme_cost(&at),
    })
}

/// Scans p_n over a grid of the given step and returns the closed intervals
/// (as grid-point pairs) where scheme `a` costs no more than scheme `b`.
pub fn crossover(
    a: Scheme,
    b: Scheme,
    params: &CostModelParams,
    grid_step: f64,
) -> Result<Vec<(f64, f64)>, OverheadError> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(OverheadError::InvalidGridStep(grid_step));
    }
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    let steps = (1.0 / grid_step).ceil() as u64;
    for i in 0..=steps {
        let p_n = (i as f64 * grid_step).min(1.0);
        let a_wins = cost_at(a, params, p_n)? <= cost_at(b, params, p_n)?;
        open = match (open, a_wins) {
            (None, true) => Some((p_n, p_n)),
            (Some((start, _)), true) => Some((start, p_n)),
            (Some(interval), false) => {
                intervals.push(interval);
                None
            }
            (None, false) => None,
        };
    }
    if let Some(interval) = open {
        intervals.push(interval);
    }
    Ok(intervals)
}

/// Cost curves as CSV over a p_n grid: the pinned columns
/// `p_n,cost_packet,cost_e2e,cost_generation_G<value>` (one per requested
/// G), followed by pre-clamp diagnostic columns.
pub fn cost_curves_csv(
    params: &CostModelParams,
    g_values: &[u64],
    grid: &[f64],
) -> Result<String, OverheadError> {
    let mut header = String::from("p_n,cost_packet,cost_e2e");
    for g in g_values {
        header.push_str(&format!(",cost_generation_G{g}"));
    }
    header.push_str(",raw_packet");
    for g in g_values {
        header.push_str(&format!(",raw_generation_G{g}"));
    }
    let mut out = header;
    out.push('\n');
    for &p_n in grid {
        let at = params.with_p_n(p_n)?;
        let mut row = format!("{},{},{}", p_n, packet_scheme_cost(&at), e2e_cost(p_n));
        for &g in g_values {
            row.push_str(&format!(
                ",{}",
                generation_scheme_cost(&at.with_generation_size(g)?)
            ));
        }
        row.push_str(&format!(",{}", packet_scheme_cost_raw(&at)));
        for &g in g_values {
            row.push_str(&format!(
                ",{}",
                generation_scheme_cost_raw(&at.with_generation_size(g)?)
            ));
        }
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}
