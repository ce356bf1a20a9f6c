//! Modular arithmetic over a prime-order subgroup of Z_q^*.
//!
//! The signature scheme works in a cyclic subgroup of order p inside the
//! multiplicative group modulo q, where p and q are primes with p | q - 1.
//! This module provides the number-theoretic plumbing: Miller-Rabin
//! primality testing, a deterministic seeded parameter search in the DSA
//! style (pick p, then search q = k*p + 1), subgroup generator selection,
//! and modular exponentiation / inversion / multi-exponentiation on
//! arbitrary-precision integers.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on candidate attempts examined by [`generate_params`] before
/// the search gives up.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

/// Miller-Rabin rounds used for candidates above the deterministic 64-bit
/// witness range. 64 rounds bound the accept-a-composite probability by
/// 4^-64 = 2^-128.
const MR_ROUNDS_LARGE: usize = 64;

/// Deterministic Miller-Rabin witness set covering every n < 2^64.
const MR_WITNESSES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Small primes for cheap trial division ahead of Miller-Rabin.
const SMALL_PRIMES: [u64; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Errors from modular arithmetic and group-parameter generation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModMathError {
    /// Modular operations require a modulus of at least 2.
    #[error("modulus must be at least 2")]
    ModulusTooSmall,
    /// The element reduces to zero and therefore has no inverse.
    #[error("no inverse: element reduces to zero modulo the prime")]
    NoInverse,
    /// Parameter generation requires 2 <= p_bits < q_bits.
    #[error("invalid bit sizes: need 2 <= p_bits < q_bits, got p_bits={p_bits}, q_bits={q_bits}")]
    InvalidBitSizes { p_bits: u32, q_bits: u32 },
    /// The bounded candidate search found no suitable prime pair.
    #[error("parameter search exhausted after {attempts} candidate attempts")]
    SearchExhausted { attempts: u64 },
    /// A subgroup of order p exists only when p divides q - 1.
    #[error("subgroup order {p} does not divide {q} - 1")]
    NotSubgroupOrder { p: BigUint, q: BigUint },
    /// Multi-exponentiation needs exactly one exponent per base.
    #[error("length mismatch: {bases} bases vs {exponents} exponents")]
    LengthMismatch { bases: usize, exponents: usize },
    /// A structural invariant of [`GroupParams`] does not hold.
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    /// The string is neither a decimal nor a 0x-prefixed hex integer.
    #[error("cannot parse big integer from {0:?}")]
    ParseBigInt(String),
}

/// Public parameters of the prime-order subgroup: field prime `p`, modulus
/// prime `q` with p | q - 1, and `g` generating the order-p subgroup of
/// Z_q^*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    /// Prime order of the subgroup; also the RLNC field prime.
    pub p: BigUint,
    /// Prime modulus of the ambient group Z_q^*.
    pub q: BigUint,
    /// Generator of the subgroup of order exactly `p`.
    pub g: BigUint,
}

impl GroupParams {
    /// Checks every structural invariant: p and q prime, p | q - 1, and g of
    /// order exactly p in Z_q^* (g^p = 1 with g != 1).
    pub fn validate(&self) -> Result<(), ModMathError> {
        if !is_prime(&self.p) {
            return Err(ModMathError::InvalidParams("p is not prime".into()));
        }
        if !is_prime(&self.q) {
            return Err(ModMathError::InvalidParams("q is not prime".into()));
        }
        if (&self.q - 1u32) % &self.p != BigUint::zero() {
            return Err(ModMathError::InvalidParams(
                "p does not divide q - 1".into(),
            ));
        }
        if self.g <= BigUint::one() || self.g >= self.q {
            return Err(ModMathError::InvalidParams(
                "g must lie strictly between 1 and q".into(),
            ));
        }
        if !self.g.modpow(&self.p, &self.q).is_one() {
            return Err(ModMathError::InvalidParams("g^p mod q != 1".into()));
        }
        Ok(())
    }
}

/// Miller-Rabin primality test.
///
/// Uses the deterministic witness set {2, 3, ..., 37} for n < 2^64 (proven
/// exact on that range) and 64 pseudo-random rounds above it, keeping the
/// error probability below 2^-128. The rounds above 2^64 derive their bases
/// from the candidate itself, so the result is a pure function of `n`.
pub fn is_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    // Decompose n - 1 = 2^s * d with d odd.
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 2 here");
    let d = &n_minus_1 >> s;

    if n.bits() <= 64 {
        return MR_WITNESSES_U64
            .iter()
            .all(|&a| mr_round(n, &n_minus_1, &d, s, &BigUint::from(a)));
    }

    // Derive the witness stream deterministically from the candidate so the
    // test stays a pure function while keeping the bases unpredictable
    // enough for the 4^-rounds error bound.
    let digits = n.to_u64_digits();
    let seed = digits.iter().fold(0xa076_1d64_78bd_642fu64, |acc, &d| {
        (acc ^ d).wrapping_mul(0xe703_7ed1_a0b4_28db)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low = BigUint::from(2u32);
    let high = n_minus_1.clone();
    (0..MR_ROUNDS_LARGE).all(|_| {
        let a = rng.gen_biguint_range(&low, &high);
        mr_round(n, &n_minus_1, &d, s, &a)
    })
}

/// One Miller-Rabin round; `true` means "probably prime" for this base.
fn mr_round(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let a = a % n;
    if a.is_zero() || a.is_one() || a == *n_minus_1 {
        return true;
    }
    let mut x = a.modpow(d, n);
    if x.is_one() || x == *n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == *n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Modular exponentiation `base^exp mod modulus` by square-and-multiply,
/// with the conventions 0^0 = 1 (empty product) and results reduced into
/// [0, modulus).
pub fn mod_exp(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> Result<BigUint, ModMathError> {
    if *modulus < BigUint::from(2u32) {
        return Err(ModMathError::ModulusTooSmall);
    }
    if exp.is_zero() {
        return Ok(BigUint::one());
    }
    Ok(base.modpow(exp, modulus))
}

/// Inverse of `a` modulo the prime `p`, via Fermat's little theorem
/// (a^(p-2) mod p). Errors when `a` reduces to zero; callers must supply a
/// prime modulus.
pub fn mod_inverse(a: &BigUint, p: &BigUint) -> Result<BigUint, ModMathError> {
    if *p < BigUint::from(2u32) {
        return Err(ModMathError::ModulusTooSmall);
    }
    let a = a % p;
    if a.is_zero() {
        return Err(ModMathError::NoInverse);
    }
    Ok(a.modpow(&(p - 2u32), p))
}

/// Product of `bases[i]^exps[i] mod modulus` over all i, computed with a
/// single interleaved square-and-multiply chain (one squaring per shared bit
/// position instead of one chain per base). An empty input is the empty
/// product, 1.
pub fn multi_exp(
    bases: &[BigUint],
    exps: &[BigUint],
    modulus: &BigUint,
) -> Result<BigUint, ModMathError> {
    if *modulus < BigUint::from(2u32) {
        return Err(ModMathError::ModulusTooSmall);
    }
    if bases.len() != exps.len() {
        return Err(ModMathError::LengthMismatch {
            bases: bases.len(),
            exponents: exps.len(),
        });
    }
    let reduced: Vec<BigUint> = bases.iter().map(|b| b % modulus).collect();
    let max_bits = exps.iter().map(|e| e.bits()).max().unwrap_or(0);
    let mut acc = BigUint::one();
    for bit in (0..max_bits).rev() {
        acc = (&acc * &acc) % modulus;
        for (base, exp) in reduced.iter().zip(exps.iter()) {
            if exp.bit(bit) {
                acc = (&acc * base) % modulus;
            }
        }
    }
    Ok(acc)
}

/// Draws a random generator of the order-p subgroup of Z_q^*: picks h
/// uniformly and returns g = h^((q-1)/p) mod q, retrying while g = 1.
/// Requires p | q - 1 (checked) and p, q prime (caller's contract).
pub fn find_subgroup_generator<R: Rng + ?Sized>(
    p: &BigUint,
    q: &BigUint,
    rng: &mut R,
) -> Result<BigUint, ModMathError> {
    let q_minus_1 = q - 1u32;
    if (&q_minus_1 % p) != BigUint::zero() {
        return Err(ModMathError::NotSubgroupOrder {
            p: p.clone(),
            q: q.clone(),
        });
    }
    if q_minus_1 == BigUint::from(2u32) {
        // q = 3 leaves only h = 2; its cofactor power is 2 itself.
        return Ok(BigUint::from(2u32));
    }
    let exp = &q_minus_1 / p;
    let low = BigUint::from(2u32);
    // Each draw fails with probability 1/p, so this bound is unreachable in
    // practice even for p = 2.
    for _ in 0..512 {
        let h = rng.gen_biguint_range(&low, &q_minus_1);
        let g = h.modpow(&exp, q);
        if !g.is_one() {
            return Ok(g);
        }
    }
    Err(ModMathError::SearchExhausted { attempts: 512 })
}

/// Deterministic DSA-style parameter search: draws a random `p_bits` prime
/// p, then searches q = k*p + 1 over random k (even k when p is odd, so q
/// stays odd) until q is a `q_bits` prime, re-drawing p when a batch of k
/// candidates fails. The whole search is a pure function of the seed.
pub fn generate_params(p_bits: u32, q_bits: u32, seed: u64) -> Result<GroupParams, ModMathError> {
    generate_params_bounded(p_bits, q_bits, seed, DEFAULT_MAX_ATTEMPTS)
}

/// [`generate_params`] with an explicit bound on candidate attempts; the
/// search signals exhaustion rather than looping forever on infeasible
/// size combinations.
pub fn generate_params_bounded(
    p_bits: u32,
    q_bits: u32,
    seed: u64,
    max_attempts: u64,
) -> Result<GroupParams, ModMathError> {
    if p_bits < 2 || p_bits >= q_bits {
        return Err(ModMathError::InvalidBitSizes { p_bits, q_bits });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut attempts = 0u64;
    // Expected primes near 2^q_bits appear about once every q_bits * ln 2 / 2
    // odd candidates, so a batch several times that size almost always finds
    // q for a workable p.
    let k_tries_per_p = 8 * u64::from(q_bits.max(8));
    let one = BigUint::one();
    let q_low = &one << (q_bits - 1) as usize; // smallest q_bits integer
    let q_high = (&one << q_bits as usize) - &one; // largest q_bits integer

    loop {
        let p = random_prime(p_bits, &mut rng, &mut attempts, max_attempts)?;
        // k range keeping q = k*p + 1 exactly q_bits wide.
        let k_min = {
            let k = (&q_low - &one + &p - &one) / &p; // ceil((q_low - 1) / p)
            if k.is_zero() {
                one.clone()
            } else {
                k
            }
        };
        let k_max = (&q_high - &one) / &p;
        if k_min > k_max {
            continue;
        }
        let p_is_odd = p.bit(0);
        for _ in 0..k_tries_per_p {
            attempts += 1;
            if attempts > max_attempts {
                return Err(ModMathError::SearchExhausted {
                    attempts: max_attempts,
                });
            }
            let mut k = rng.gen_biguint_range(&k_min, &(&k_max + &one));
            if p_is_odd && k.bit(0) {
                // Odd k with odd p would make q even; nudge to the next even k.
                k += &one;
                if k > k_max {
                    continue;
                }
            }
            let q = &k * &p + &one;
            if q.bits() != u64::from(q_bits) {
                continue;
            }
            if is_prime(&q) {
                let g = find_subgroup_generator(&p, &q, &mut rng)?;
                return Ok(GroupParams { p, q, g });
            }
        }
    }
}

/// Draws random `bits`-wide integers (top bit set, odd when bits > 2) until
/// one is prime, charging each candidate against the shared attempt budget.
fn random_prime<R: Rng + ?Sized>(
    bits: u32,
    rng: &mut R,
    attempts: &mut u64,
    max_attempts: u64,
) -> Result<BigUint, ModMathError> {
    loop {
        *attempts += 1;
        if *attempts > max_attempts {
            return Err(ModMathError::SearchExhausted {
                attempts: max_attempts,
            });
        }
        let mut candidate = rng.gen_biguint(u64::from(bits));
        candidate.set_bit(u64::from(bits) - 1, true);
        if bits > 2 {
            candidate.set_bit(0, true);
        }
        if is_prime(&candidate) {
            return Ok(candidate);
        }
    }
}

/// Parses a big integer from decimal or 0x-prefixed hexadecimal text.
pub fn parse_biguint(s: &str) -> Result<BigUint, ModMathError> {
    let t = s.trim();
    let (digits, radix) = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => (hex, 16),
        None => (t, 10),
    };
    if digits.is_empty() {
        return Err(ModMathError::ParseBigInt(s.to_string()));
    }
    BigUint::parse_bytes(digits.as_bytes(), radix)
        .ok_or_else(|| ModMathError::ParseBigInt(s.to_string()))
}

/// Group-parameter document: p, q, g as decimal or hex strings plus the
/// seed that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub p: String,
    pub q: String,
    pub g: String,
    pub seed: u64,
}

impl ParamsFile {
    /// Renders parameters with decimal digits.
    pub fn from_params(params: &GroupParams, seed: u64) -> Self {
        ParamsFile {
            p: params.p.to_string(),
            q: params.q.to_string(),
            g: params.g.to_string(),
            seed,
        }
    }

    /// Parses the stored strings back into validated group parameters.
    pub fn to_params(&self) -> Result<GroupParams, ModMathError> {
        let params = GroupParams {
            p: parse_biguint(&self.p)?,
            q: parse_biguint(&self.q)?,
            g: parse_biguint(&self.g)?,
        };
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn mod_exp_worked_examples() {
        assert_eq!(mod_exp(&big(3), &big(5), &big(11)).unwrap(), big(1));
        assert_eq!(mod_exp(&big(3), &big(4), &big(11)).unwrap(), big(4));
        assert_eq!(mod_exp(&big(2), &big(10), &big(1000)).unwrap(), big(24));
    }

    #[test]
    fn mod_exp_zero_exponent_is_one() {
        for x in [0u64, 1, 2, 7, 100] {
            assert_eq!(mod_exp(&big(x), &big(0), &big(7)).unwrap(), big(1));
            assert_eq!(mod_exp(&big(x), &big(0), &big(2)).unwrap(), big(1));
        }
    }

    #[test]
    fn mod_exp_rejects_tiny_modulus() {
        assert_eq!(
            mod_exp(&big(3), &big(4), &big(1)),
            Err(ModMathError::ModulusTooSmall)
        );
        assert_eq!(
            mod_exp(&big(3), &big(4), &big(0)),
            Err(ModMathError::ModulusTooSmall)
        );
    }

    /// Dual-route check: square-and-multiply against naive repeated
    /// multiplication over an exhaustive small grid.
    #[test]
    fn mod_exp_matches_naive_repeated_multiplication() {
        let moduli = [big(2), big(3), big(97), big((1u64 << 61) - 1)];
        for modulus in &moduli {
            for base in 0u64..=50 {
                let base = big(base);
                let mut naive = BigUint::one() % modulus;
                for exp in 0u64..=50 {
                    let got = mod_exp(&base, &big(exp), modulus).unwrap();
                    assert_eq!(
                        got, naive,
                        "mismatch at base {base}, exp {exp}, modulus {modulus}"
                    );
                    naive = (&naive * &base) % modulus;
                }
            }
        }
    }

    #[test]
    fn mod_inverse_exhaustive_small_primes() {
        for p in [2u64, 3, 5, 97, 1009] {
            let p = big(p);
            let mut a = BigUint::one();
            while a < p {
                let inv = mod_inverse(&a, &p).unwrap();
                assert!(inv < p);
                assert_eq!((&a * &inv) % &p, BigUint::one(), "a={a}, p={p}");
                a += 1u32;
            }
        }
    }

    #[test]
    fn mod_inverse_of_zero_fails() {
        assert_eq!(mod_inverse(&big(0), &big(5)), Err(ModMathError::NoInverse));
        assert_eq!(mod_inverse(&big(10), &big(5)), Err(ModMathError::NoInverse));
    }

    #[test]
    fn mod_inverse_reduces_first() {
        // 7 = 2 mod 5, and 2 * 3 = 6 = 1 mod 5.
        assert_eq!(mod_inverse(&big(7), &big(5)).unwrap(), big(3));
    }

    #[test]
    fn is_prime_known_values() {
        let primes = [2u64, 3, 5, 7, 97, 257, 1009, 1_000_000_007, (1 << 61) - 1];
        for p in primes {
            assert!(is_prime(&big(p)), "{p} should be prime");
        }
        let composites = [0u64, 1, 4, 255, 561, 1001, 1 << 61, u64::MAX];
        for c in composites {
            assert!(!is_prime(&big(c)), "{c} should be composite");
        }
        // Square of a large prime, beyond the deterministic witness range.
        let m61 = big((1 << 61) - 1);
        assert!(!is_prime(&(&m61 * &m61)));
    }

    #[test]
    fn multi_exp_matches_separate_exponentiations() {
        let mut rng = StdRng::seed_from_u64(42);
        for modulus in [big(11), big(97), big(1_000_000_007)] {
            for n in [0usize, 1, 3, 8] {
                let bases: Vec<BigUint> = (0..n).map(|_| rng.gen_biguint_below(&modulus)).collect();
                let exps: Vec<BigUint> = (0..n).map(|_| big(rng.gen_range(0..500))).collect();
                let expected = bases.iter().zip(&exps).fold(BigUint::one(), |acc, (b, e)| {
                    acc * b.modpow(e, &modulus) % &modulus
                });
                let got = multi_exp(&bases, &exps, &modulus).unwrap();
                assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn multi_exp_empty_input_is_one() {
        assert_eq!(multi_exp(&[], &[], &big(11)).unwrap(), BigUint::one());
    }

    #[test]
    fn multi_exp_rejects_mismatched_lengths() {
        assert_eq!(
            multi_exp(&[big(2)], &[], &big(11)),
            Err(ModMathError::LengthMismatch {
                bases: 1,
                exponents: 0
            })
        );
    }

    #[test]
    fn subgroup_generator_small_groups() {
        let mut rng = StdRng::seed_from_u64(7);
        // Elements of order 5 modulo 11.
        for _ in 0..50 {
            let g = find_subgroup_generator(&big(5), &big(11), &mut rng).unwrap();
            assert!([big(3), big(4), big(5), big(9)].contains(&g), "got {g}");
        }
        // Only element of order 2 modulo 7 is 6.
        for _ in 0..20 {
            let g = find_subgroup_generator(&big(2), &big(7), &mut rng).unwrap();
            assert_eq!(g, big(6));
        }
        // p = q - 1 edge: order-3 elements modulo 7 are 2 and 4.
        for _ in 0..20 {
            let g = find_subgroup_generator(&big(3), &big(7), &mut rng).unwrap();
            assert!([big(2), big(4)].contains(&g), "got {g}");
        }
    }

    #[test]
    fn subgroup_generator_rejects_non_divisor() {
        let mut rng = StdRng::seed_from_u64(1);
        let err = find_subgroup_generator(&big(3), &big(11), &mut rng).unwrap_err();
        assert!(matches!(err, ModMathError::NotSubgroupOrder { .. }));
    }

    #[test]
    fn generate_params_tiny_sizes() {
        // With p_bits = 3 and q_bits = 4 the only solution is p = 5, q = 11,
        // whose order-5 elements are {3, 4, 5, 9}.
        for seed in 0..10u64 {
            let params = generate_params(3, 4, seed).unwrap();
            assert_eq!(params.p, big(5));
            assert_eq!(params.q, big(11));
            assert!([big(3), big(4), big(5), big(9)].contains(&params.g));
            params.validate().unwrap();
        }
    }

    #[test]
    fn generate_params_is_deterministic_per_seed() {
        let a = generate_params(16, 24, 99).unwrap();
        let b = generate_params(16, 24, 99).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        assert_eq!(a.p.bits(), 16);
        assert_eq!(a.q.bits(), 24);
    }

    #[test]
    fn generate_params_rejects_inverted_sizes() {
        assert_eq!(
            generate_params(8, 4, 0),
            Err(ModMathError::InvalidBitSizes {
                p_bits: 8,
                q_bits: 4
            })
        );
        assert_eq!(
            generate_params(1, 4, 0),
            Err(ModMathError::InvalidBitSizes {
                p_bits: 1,
                q_bits: 4
            })
        );
    }

    #[test]
    fn generate_params_exhausts_on_tight_budget() {
        // A one-candidate budget cannot cover both the p draw and a k probe,
        // so the bounded search must surface exhaustion rather than spin.
        let err = generate_params_bounded(20, 40, 3, 1).unwrap_err();
        assert!(matches!(err, ModMathError::SearchExhausted { .. }));
    }

    #[test]
    fn generate_params_production_sizes() {
        let params = generate_params(160, 1024, 2024).unwrap();
        assert_eq!(params.p.bits(), 160);
        assert_eq!(params.q.bits(), 1024);
        params.validate().unwrap();
        // Order is exactly p: g != 1 and g^p = 1 (validate covers both).
        assert!(!params.g.is_one());
    }

    #[test]
    fn generate_params_small_order_check_is_exhaustive() {
        // For small p, confirm order exactly p by walking all lower powers.
        let params = generate_params(8, 16, 5).unwrap();
        params.validate().unwrap();
        let mut power = BigUint::one();
        let mut k = BigUint::zero();
        while k < params.p {
            if k > BigUint::zero() {
                assert!(!power.is_one(), "g has order {k} < p");
            }
            power = &power * &params.g % &params.q;
            k += 1u32;
        }
        assert!(power.is_one());
    }

    #[test]
    fn params_file_round_trip() {
        let params = generate_params(3, 4, 1).unwrap();
        let file = ParamsFile::from_params(&params, 1);
        let json = serde_json::to_string(&file).unwrap();
        let back: ParamsFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_params().unwrap(), params);
    }

    #[test]
    fn params_file_accepts_hex_strings() {
        let file = ParamsFile {
            p: "0x5".into(),
            q: "11".into(),
            g: "0x3".into(),
            seed: 0,
        };
        let params = file.to_params().unwrap();
        assert_eq!(params.p, big(5));
        assert_eq!(params.g, big(3));
    }

    #[test]
    fn params_file_rejects_garbage() {
        assert!(parse_biguint("").is_err());
        assert!(parse_biguint("0x").is_err());
        assert!(parse_biguint("12z").is_err());
        let file = ParamsFile {
            p: "6".into(), // composite
            q: "11".into(),
            g: "3".into(),
            seed: 0,
        };
        assert!(file.to_params().is_err());
    }

    #[test]
    fn validate_rejects_tampered_params() {
        let good = generate_params(3, 4, 1).unwrap();
        let mut bad = good.clone();
        bad.g = BigUint::one();
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.q = big(12);
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.g = big(2); // order 10 mod 11, not 5
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.p = big(3); // 3 does not divide 10
        assert!(bad.validate().is_err());
    }
}
