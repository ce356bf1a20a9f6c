//! Monte Carlo simulator of tracker-mediated dissemination with Byzantine
//! nodes — the generative process the closed forms in [`crate::analytic`]
//! summarize.
//!
//! Each trial realizes the full process: a uniform seed set N_s, iid
//! Byzantine marks, a uniform receiver set N_r, and one uninformed receiver
//! activating per time slot in uniformly random order, fetching from d
//! distinct informed nodes chosen by the tracker (seeds only under the
//! static list, everyone informed under the evolving list). Boolean mode
//! tracks contamination as a flag per node; full-coded mode moves real
//! network-coded packets, lets Byzantine nodes inject random wire-valid
//! packets, and optionally verifies every fetched packet with the
//! homomorphic signature.
//!
//! Reproducibility contract: trial k draws from a ChaCha stream derived
//! from (seed, k), and all aggregation is integer-exact, so results are
//! byte-identical regardless of how trials are scheduled across threads.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{AnalyticError, ModelParams};
use crate::modmath::{parse_biguint, GroupParams, ModMathError};
use crate::rlnc::{augment, decode, random_recombine, CodedPacket, FilePayload, RlncError};
use crate::sigscheme::{keygen, sign_file, verify_packet, FileSignature, PublicKey, SigError};

/// Stream index reserved for run-level setup (file, keys, signature);
/// trials use their own index as the stream.
const SETUP_STREAM: u64 = u64::MAX;

/// Errors from simulation configuration and execution.
#[derive(Debug, Error)]
pub enum EpidemicError {
    #[error(transparent)]
    Model(#[from] AnalyticError),
    #[error(transparent)]
    ModMath(#[from] ModMathError),
    #[error(transparent)]
    Rlnc(#[from] RlncError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error("trial count must be positive")]
    ZeroTrials,
    /// Rejection sampling for the requested overlap accepted nothing.
    #[error("conditioning on overlap y = {y} accepted none of the {trials} trials")]
    ConditioningStarved { y: usize, trials: u64 },
    #[error("overlap condition y = {y} cannot exceed the seed count n_s = {n_s}")]
    ConditionTooLarge { y: usize, n_s: usize },
    #[error("this operation needs a full-coded configuration")]
    MissingCodedConfig,
    #[error("config text line {line}: {reason}")]
    BadConfigText { line: usize, reason: String },
}

/// Which nodes the tracker hands out as parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListMode {
    /// Only the original seed set.
    Static,
    /// Every node informed so far.
    Evolving,
}

impl fmt::Display for ListMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ListMode::Static => "static",
            ListMode::Evolving => "evolving",
        })
    }
}

impl FromStr for ListMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "static" => Ok(ListMode::Static),
            "evolving" => Ok(ListMode::Evolving),
            other => Err(format!(
                "unknown list mode `{other}` (expected static|evolving)"
            )),
        }
    }
}

/// Packet-level behaviour for the full-coded mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedConfig {
    pub m: usize,
    pub l: usize,
    pub group: GroupParams,
    pub verify_enabled: bool,
}

/// Validated simulation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    n_total: usize,
    n_s: usize,
    n_r: usize,
    d: usize,
    p_b: f64,
    list_mode: ListMode,
    trials: u64,
    seed: u64,
    coded: Option<CodedConfig>,
}

impl SimConfig {
    /// Boolean-contamination simulation.
    #[allow(clippy::too_many_arguments)]
    pub fn boolean(
        n_total: usize,
        n_s: usize,
        n_r: usize,
        d: usize,
        p_b: f64,
        list_mode: ListMode,
        trials: u64,
        seed: u64,
    ) -> Result<Self, EpidemicError> {
        // The topology invariants are shared with the closed-form model.
        ModelParams::new(n_total as u64, n_s as u64, n_r as u64, d as u64, p_b)?;
        if trials == 0 {
            return Err(EpidemicError::ZeroTrials);
        }
        Ok(SimConfig {
            n_total,
            n_s,
            n_r,
            d,
            p_b,
            list_mode,
            trials,
            seed,
            coded: None,
        })
    }

    /// Full-coded simulation moving real packets.
    #[allow(clippy::too_many_arguments)]
    pub fn full_coded(
        n_total: usize,
        n_s: usize,
        n_r: usize,
        d: usize,
        p_b: f64,
        list_mode: ListMode,
        trials: u64,
        seed: u64,
        coded: CodedConfig,
    ) -> Result<Self, EpidemicError> {
        coded.group.validate()?;
        if coded.m == 0 || coded.l == 0 {
            return Err(EpidemicError::Rlnc(RlncError::EmptyShape {
                m: coded.m,
                l: coded.l,
            }));
        }
        let mut config = SimConfig::boolean(n_total, n_s, n_r, d, p_b, list_mode, trials, seed)?;
        config.coded = Some(coded);
        Ok(config)
    }

    /// Parses a key = value document (one pair per line, `#` comments).
    /// Boolean keys: n_total, n_s, n_r, d, p_b, list_mode, trials, seed,
    /// mode; full-coded adds m, l, p, q, g, verify_enabled.
    pub fn from_kv_text(text: &str) -> Result<Self, EpidemicError> {
        let mut fields: HashMap<&str, (usize, &str)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(EpidemicError::BadConfigText {
                line: idx + 1,
                reason: "expected key = value".into(),
            })?;
            fields.insert(key.trim(), (idx + 1, value.trim()));
        }
        let take = |key: &str| -> Result<(usize, &str), EpidemicError> {
            fields
                .get(key)
                .copied()
                .ok_or(EpidemicError::BadConfigText {
                    line: 0,
                    reason: format!("missing required key `{key}`"),
                })
        };
        fn parse<T: FromStr>(entry: (usize, &str), key: &str) -> Result<T, EpidemicError> {
            entry.1.parse().map_err(|_| EpidemicError::BadConfigText {
                line: entry.0,
                reason: format!("invalid value `{}` for `{key}`", entry.1),
            })
        }

        let n_total: usize = parse(take("n_total")?, "n_total")?;
        let n_s: usize = parse(take("n_s")?, "n_s")?;
        let n_r: usize = parse(take("n_r")?, "n_r")?;
        let d: usize = parse(take("d")?, "d")?;
        let p_b: f64 = parse(take("p_b")?, "p_b")?;
        let list_mode: ListMode = parse(take("list_mode")?, "list_mode")?;
        let trials: u64 = parse(take("trials")?, "trials")?;
        let seed: u64 = parse(take("seed")?, "seed")?;
        let mode = fields.get("mode").map(|&(_, v)| v).unwrap_or("boolean");
        match mode {
            "boolean" => SimConfig::boolean(n_total, n_s, n_r, d, p_b, list_mode, trials, seed),
            "full-coded" | "full_coded" => {
                let m: usize = parse(take("m")?, "m")?;
                let l: usize = parse(take("l")?, "l")?;
                let big = |key: &str| -> Result<BigUint, EpidemicError> {
                    let entry = take(key)?;
                    parse_biguint(entry.1).map_err(|e| EpidemicError::BadConfigText {
                        line: entry.0,
                        reason: e.to_string(),
                    })
                };
                let group = GroupParams {
                    p: big("p")?,
                    q: big("q")?,
                    g: big("g")?,
                };
                let verify_enabled = match fields.get("verify_enabled") {
                    Some(&entry) => parse(entry, "verify_enabled")?,
                    None => true,
                };
                SimConfig::full_coded(
                    n_total,
                    n_s,
                    n_r,
                    d,
                    p_b,
                    list_mode,
                    trials,
                    seed,
                    CodedConfig {
                        m,
                        l,
                        group,
                        verify_enabled,
                    },
                )
            }
            other => Err(EpidemicError::BadConfigText {
                line: 0,
                reason: format!("unknown mode `{other}` (expected boolean|full-coded)"),
            }),
        }
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    pub fn list_mode(&self) -> ListMode {
        self.list_mode
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn coded(&self) -> Option<&CodedConfig> {
        self.coded.as_ref()
    }

    /// The matching closed-form model parameters.
    pub fn model_params(&self) -> ModelParams {
        ModelParams::new(
            self.n_total as u64,
            self.n_s as u64,
            self.n_r as u64,
            self.d as u64,
            self.p_b,
        )
        .expect("SimConfig invariants imply ModelParams invariants")
    }

    /// Same run with a different Byzantine probability.
    pub fn with_p_b(&self, p_b: f64) -> Result<Self, EpidemicError> {
        ModelParams::new(
            self.n_total as u64,
            self.n_s as u64,
            self.n_r as u64,
            self.d as u64,
            p_b,
        )?;
        let mut config = self.clone();
        config.p_b = p_b;
        Ok(config)
    }

    /// The independent random stream for one trial.
    fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    fn setup_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(SETUP_STREAM);
        rng
    }
}

/// Tallies specific to a full-coded trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedOutcome {
    /// Packets failing signature verification at storage nodes.
    pub detected_count: u64,
    /// Packets failing signature verification at the receiver's collection.
    pub dropped_count: u64,
    /// Honest nodes that ended up storing an out-of-span packet.
    pub honest_contaminated: u64,
    /// Coding-prefix rank the receiver achieved after filtering.
    pub receiver_rank: usize,
    /// Whether the receiver decoded the exact source payload.
    pub decode_ok: bool,
}

/// Result of one simulated dissemination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// At least one receiver-set node ended contaminated.
    pub blocked: bool,
    /// Overlap |N_s intersect N_r|.
    pub y: usize,
    /// Byzantine seeds at process start.
    pub n_b: u64,
    /// C(t) for t = 0..=(n_r - y): contaminated informed nodes per slot.
    pub contaminated_series: Vec<u64>,
    /// Present only for full-coded trials.
    pub coded: Option<CodedOutcome>,
}

/// One boolean-contamination trial, realizing the process exactly as
/// modeled. The rng is consumed in a fixed order: seed set, Byzantine
/// marks, receiver set, activation order, then d parents per slot.
pub fn run_trial<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> TrialOutcome {
    let topology = Topology::sample(config, rng);
    let mut contaminated: Vec<Option<bool>> = vec![None; config.n_total];
    // Informed pool in join order; seeds first.
    let mut pool: Vec<usize> = topology.seeds.clone();
    for &s in &topology.seeds {
        contaminated[s] = Some(topology.byzantine[s]);
    }
    let n_b = topology
        .seeds
        .iter()
        .filter(|&&s| topology.byzantine[s])
        .count() as u64;

    let mut series = Vec::with_capacity(topology.downloaders.len() + 1);
    let mut count = n_b;
    series.push(count);
    for &node in &topology.downloaders {
        let parent_pool = match config.list_mode {
            ListMode::Static => &pool[..config.n_s],
            ListMode::Evolving => &pool[..],
        };
        let parents = index::sample(rng, parent_pool.len(), config.d);
        let hit = parents
            .iter()
            .any(|j| contaminated[parent_pool[j]].expect("parents are informed"));
        let bad = topology.byzantine[node] || hit;
        contaminated[node] = Some(bad);
        pool.push(node);
        count += u64::from(bad);
        series.push(count);
    }

    let blocked = topology
        .receivers
        .iter()
        .any(|&v| contaminated[v].unwrap_or(false));
    TrialOutcome {
        blocked,
        y: topology.y,
        n_b,
        contaminated_series: series,
        coded: None,
    }
}

/// The per-run artifacts of full-coded mode: one payload, its signature,
/// and the key material every honest node verifies against.
#[derive(Debug, Clone)]
pub struct FullCodedContext {
    payload: FilePayload,
    sources: Vec<CodedPacket>,
    public: PublicKey,
    signature: FileSignature,
}

impl FullCodedContext {
    /// Generates the file, keys, and signature from the run's setup stream.
    pub fn prepare(config: &SimConfig) -> Result<Self, EpidemicError> {
        let coded = config
            .coded
            .as_ref()
            .ok_or(EpidemicError::MissingCodedConfig)?;
        let mut rng = config.setup_rng();
        let payload = FilePayload::random(&coded.group.p, coded.m, coded.l, &mut rng)?;
        let sources = augment(&payload);
        let (private, public) = keygen(&coded.group, coded.m + coded.l, &mut rng)?;
        let signature = sign_file(&private, &sources, &mut rng)?;
        Ok(FullCodedContext {
            payload,
            sources,
            public,
            signature,
        })
    }

    pub fn payload(&self) -> &FilePayload {
        &self.payload
    }

    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    pub fn signature(&self) -> &FileSignature {
        &self.signature
    }
}

/// One full-coded trial: identical topology process, real packets moved.
/// Byzantine nodes store uniformly random wire-valid packets; honest
/// downloaders recombine what they fetched (minus signature rejects when
/// verification is on; fetching nothing acceptable means the node stores
/// nothing and stays uninformed). The receiver collects from every storing
/// receiver-set node, optionally verifies, then decodes and compares
/// bit-exactly against the source payload.
pub fn run_full_coded_trial<R: Rng + ?Sized>(
    config: &SimConfig,
    context: &FullCodedContext,
    rng: &mut R,
) -> Result<TrialOutcome, EpidemicError> {
    let coded = config
        .coded
        .as_ref()
        .ok_or(EpidemicError::MissingCodedConfig)?;
    let p = &coded.group.p;
    let topology = Topology::sample(config, rng);

    let mut stored: Vec<Option<CodedPacket>> = vec![None; config.n_total];
    let mut contaminated: Vec<Option<bool>> = vec![None; config.n_total];
    let mut detected_count = 0u64;
    let mut honest_contaminated = 0u64;

    let record = |node: usize,
                  packet: CodedPacket,
                  stored: &mut Vec<Option<CodedPacket>>,
                  contaminated: &mut Vec<Option<bool>>,
                  honest_contaminated: &mut u64,
                  byzantine: bool| {
        let bad = !context.payload.spans(&packet);
        if bad && !byzantine {
            *honest_contaminated += 1;
        }
        stored[node] = Some(packet);
        contaminated[node] = Some(bad);
    };

    // Seeds: honest ones store a random combination of the source packets,
    // Byzantine ones inject random content.
    let mut pool: Vec<usize> = Vec::with_capacity(config.n_s + topology.downloaders.len());
    for &s in &topology.seeds {
        let packet = if topology.byzantine[s] {
            CodedPacket::random(p, coded.m, coded.l, rng)?
        } else {
            random_recombine(&context.sources, rng)?
        };
        record(
            s,
            packet,
            &mut stored,
            &mut contaminated,
            &mut honest_contaminated,
            topology.byzantine[s],
        );
        pool.push(s);
    }
    let n_b = topology
        .seeds
        .iter()
        .filter(|&&s| topology.byzantine[s])
        .count() as u64;
    let c0 = pool
        .iter()
        .filter(|&&v| contaminated[v].unwrap_or(false))
        .count() as u64;

    let mut series = Vec::with_capacity(topology.downloaders.len() + 1);
    let mut count = c0;
    series.push(count);
    for &node in &topology.downloaders {
        let parent_count = match config.list_mode {
            ListMode::Static => config.n_s,
            ListMode::Evolving => pool.len(),
        };
        let parents = index::sample(rng, parent_count, config.d);
        if topology.byzantine[node] {
            let packet = CodedPacket::random(p, coded.m, coded.l, rng)?;
            record(
                node,
                packet,
                &mut stored,
                &mut contaminated,
                &mut honest_contaminated,
                true,
            );
            pool.push(node);
            count += 1;
            series.push(count);
            continue;
        }
        let mut accepted = Vec::with_capacity(config.d);
        for j in parents {
            let packet = stored[pool[j]].as_ref().expect("pool nodes store packets");
            if coded.verify_enabled && !verify_packet(&context.public, &context.signature, packet)?
            {
                detected_count += 1;
                continue;
            }
            accepted.push(packet.clone());
        }
        if accepted.is_empty() {
            // Nothing verifiable fetched: the node stores nothing, stays
            // uninformed, and the tracker never offers it.
            series.push(count);
            continue;
        }
        let packet = random_recombine(&accepted, rng)?;
        let bad = !context.payload.spans(&packet);
        record(
            node,
            packet,
            &mut stored,
            &mut contaminated,
            &mut honest_contaminated,
            false,
        );
        pool.push(node);
        count += u64::from(bad);
        series.push(count);
    }

    // Receiver: gather every stored packet in the receiver set.
    let mut dropped_count = 0u64;
    let mut collection = Vec::new();
    for &v in &topology.receivers {
        let Some(packet) = stored[v].as_ref() else {
            continue;
        };
        if coded.verify_enabled && !verify_packet(&context.public, &context.signature, packet)? {
            dropped_count += 1;
            continue;
        }
        collection.push(packet.clone());
    }
    let (receiver_rank, decode_ok) = if collection.is_empty() {
        (0, false)
    } else {
        match decode(&collection) {
            Ok(payload) => (coded.m, payload == context.payload),
            Err(RlncError::InsufficientRank { rank, .. }) => (rank, false),
            // Full prefix rank but contradictory data: a contaminated
            // packet reached the receiver.
            Err(RlncError::InconsistentPackets) => (coded.m, false),
            Err(e) => return Err(e.into()),
        }
    };

    let blocked = topology
        .receivers
        .iter()
        .any(|&v| contaminated[v].unwrap_or(false));
    Ok(TrialOutcome {
        blocked,
        y: topology.y,
        n_b,
        contaminated_series: series,
        coded: Some(CodedOutcome {
            detected_count,
            dropped_count,
            honest_contaminated,
            receiver_rank,
            decode_ok,
        }),
    })
}

/// Seed set, Byzantine marks, receiver set, and activation order for one
/// trial, drawn in that fixed order.
struct Topology {
    seeds: Vec<usize>,
    byzantine: Vec<bool>,
    receivers: Vec<usize>,
    downloaders: Vec<usize>,
    y: usize,
}

impl Topology {
    fn sample<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Topology {
        let seeds: Vec<usize> = index::sample(rng, config.n_total, config.n_s).into_vec();
        let byzantine: Vec<bool> = (0..config.n_total)
            .map(|_| rng.gen_bool(config.p_b))
            .collect();
        let receivers: Vec<usize> = index::sample(rng, config.n_total, config.n_r).into_vec();
        let mut is_seed = vec![false; config.n_total];
        for &s in &seeds {
            is_seed[s] = true;
        }
        let mut downloaders: Vec<usize> =
            receivers.iter().copied().filter(|&v| !is_seed[v]).collect();
        downloaders.shuffle(rng);
        let y = config.n_r - downloaders.len();
        Topology {
            seeds,
            byzantine,
            receivers,
            downloaders,
            y,
        }
    }
}

/// Blocking estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockingEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Per-slot mean of C(t) with standard errors; `counts[t]` is how many
/// (accepted) trials ran at least t slots.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEstimate {
    pub accepted_trials: u64,
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Aggregate counters over a full-coded run.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CodedAggregate {
    pub trials: u64,
    pub blocked_count: u64,
    pub decode_failure_count: u64,
    pub detected_total: u64,
    pub dropped_total: u64,
    pub honest_contaminated_total: u64,
    pub rank_sufficient_count: u64,
    pub rank_sufficient_decode_ok: u64,
}

/// Integer-exact reduction state; u64 sums keep aggregation independent of
/// the order trials are combined in.
#[derive(Debug, Clone, Default)]
struct Accumulator {
    accepted: u64,
    blocked: u64,
    sums: Vec<u64>,
    sumsqs: Vec<u64>,
    counts: Vec<u64>,
    detected: u64,
    dropped: u64,
    honest_contaminated: u64,
    decode_failures: u64,
    rank_sufficient: u64,
    rank_sufficient_decode_ok: u64,
}

impl Accumulator {
    fn sized(len: usize) -> Accumulator {
        Accumulator {
            sums: vec![0; len],
            sumsqs: vec![0; len],
            counts: vec![0; len],
            ..Accumulator::default()
        }
    }

    fn absorb(&mut self, outcome: &TrialOutcome, m: usize) {
        self.accepted += 1;
        self.blocked += u64::from(outcome.blocked);
        for (t, &c) in outcome.contaminated_series.iter().enumerate() {
            self.sums[t] += c;
            self.sumsqs[t] += c * c;
            self.counts[t] += 1;
        }
        if let Some(coded) = &outcome.coded {
            self.detected += coded.detected_count;
            self.dropped += coded.dropped_count;
            self.honest_contaminated += coded.honest_contaminated;
            self.decode_failures += u64::from(!coded.decode_ok);
            if coded.receiver_rank >= m {
                self.rank_sufficient += 1;
                self.rank_sufficient_decode_ok += u64::from(coded.decode_ok);
            }
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.accepted += other.accepted;
        self.blocked += other.blocked;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.sumsqs.iter_mut().zip(&other.sumsqs) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.detected += other.detected;
        self.dropped += other.dropped;
        self.honest_contaminated += other.honest_contaminated;
        self.decode_failures += other.decode_failures;
        self.rank_sufficient += other.rank_sufficient;
        self.rank_sufficient_decode_ok += other.rank_sufficient_decode_ok;
        self
    }
}

fn aggregate(config: &SimConfig, condition_y: Option<usize>) -> Result<Accumulator, EpidemicError> {
    if let Some(y) = condition_y {
        if y > config.n_s {
            return Err(EpidemicError::ConditionTooLarge { y, n_s: config.n_s });
        }
    }
    let series_len = config.n_r + 1;
    let context = match &config.coded {
        Some(_) => Some(FullCodedContext::prepare(config)?),
        None => None,
    };
    let context = context.as_ref();
    (0..config.trials)
        .into_par_iter()
        .try_fold(
            || Accumulator::sized(series_len),
            |mut acc, trial| {
                let mut rng = config.trial_rng(trial);
                let outcome = match context {
                    Some(ctx) => run_full_coded_trial(config, ctx, &mut rng)?,
                    None => run_trial(config, &mut rng),
                };
                if condition_y.is_none_or(|y| outcome.y == y) {
                    acc.absorb(&outcome, config.coded.as_ref().map_or(0, |c| c.m));
                }
                Ok(acc)
            },
        )
        .try_reduce(|| Accumulator::sized(series_len), |a, b| Ok(a.merge(b)))
}

/// Mean blocking frequency and its binomial standard error over all
/// trials. Deterministic for a fixed seed regardless of thread count.
pub fn estimate_blocking(config: &SimConfig) -> Result<BlockingEstimate, EpidemicError> {
    let acc = aggregate(config, None)?;
    let n = acc.accepted as f64;
    let mean = acc.blocked as f64 / n;
    let std_error = (mean * (1.0 - mean) / n).sqrt();
    Ok(BlockingEstimate {
        mean,
        std_error,
        trials: acc.accepted,
    })
}

/// Mean contaminated-count series, optionally conditioned on the overlap
/// Y = y by rejection sampling (non-matching trials are discarded; the
/// trial count is the attempt budget).
pub fn contamination_series(
    config: &SimConfig,
    condition_y: Option<usize>,
) -> Result<SeriesEstimate, EpidemicError> {
    let acc = aggregate(config, condition_y)?;
    if acc.accepted == 0 {
        let y = condition_y.expect("unconditioned runs accept every trial");
        return Err(EpidemicError::ConditioningStarved {
            y,
            trials: config.trials,
        });
    }
    let live = acc.counts.iter().take_while(|&&c| c > 0).count();
    let mut means = Vec::with_capacity(live);
    let mut std_errors = Vec::with_capacity(live);
    for t in 0..live {
        let n = acc.counts[t] as f64;
        let mean = acc.sums[t] as f64 / n;
        let variance = if acc.counts[t] > 1 {
            (acc.sumsqs[t] as f64 - acc.sums[t] as f64 * mean) / (n - 1.0)
        } else {
            0.0
        };
        means.push(mean);
        std_errors.push((variance.max(0.0) / n).sqrt());
    }
    Ok(SeriesEstimate {
        accepted_trials: acc.accepted,
        means,
        std_errors,
        counts: acc.counts[..live].to_vec(),
    })
}

/// Runs a full-coded configuration and returns its aggregate counters.
pub fn run_full_coded(config: &SimConfig) -> Result<CodedAggregate, EpidemicError> {
    if config.coded.is_none() {
        return Err(EpidemicError::MissingCodedConfig);
    }
    let acc = aggregate(config, None)?;
    Ok(CodedAggregate {
        trials: acc.accepted,
        blocked_count: acc.blocked,
        decode_failure_count: acc.decode_failures,
        detected_total: acc.detected,
        dropped_total: acc.dropped,
        honest_contaminated_total: acc.honest_contaminated,
        rank_sufficient_count: acc.rank_sufficient,
        rank_sufficient_decode_ok: acc.rank_sufficient_decode_ok,
    })
}

/// Header for blocking-estimate CSV rows.
pub const BLOCKING_CSV_HEADER: &str = "p_b,mode,list_mode,trials,blocked_mean,blocked_se";

/// One CSV row matching [`BLOCKING_CSV_HEADER`].
pub fn blocking_csv_line(config: &SimConfig, estimate: &BlockingEstimate) -> String {
    let mode = if config.coded.is_some() {
        "full-coded"
    } else {
        "boolean"
    };
    format!(
        "{},{},{},{},{},{}",
        config.p_b, mode, config.list_mode, estimate.trials, estimate.mean, estimate.std_error
    )
}

/// Header for contamination-series CSV rows.
pub const SERIES_CSV_HEADER: &str = "t,c_mean,c_se";

/// Full series CSV including the header line.
pub fn series_csv(series: &SeriesEstimate) -> String {
    let mut out = String::from(SERIES_CSV_HEADER);
    out.push('\n');
    for (t, (mean, se)) in series.means.iter().zip(&series.std_errors).enumerate() {
        out.push_str(&format!("{t},{mean},{se}\n"));
    }
    out
}
