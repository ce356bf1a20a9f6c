//! Exact-arithmetic reference oracle for the blocking models.
//!
//! Everything here is enumerated mechanically in rational arithmetic:
//! every receiver set, every Byzantine marking of the seeds, every
//! downloader branch, and every d-subset of parents is walked in full.
//! No closed-form shortcut from the library under test is reused, so a
//! match within floating-point tolerance is independent evidence.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// All k-element index subsets of {0, .., n-1} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn extend(
        start: usize,
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            extend(i + 1, n, k, current, out);
            current.pop();
        }
    }
    extend(0, n, k, &mut current, &mut out);
    out
}

/// Counts of d-subsets of a pool whose first `contam` members are
/// contaminated, split into (all-clean subsets, total subsets). Counted by
/// explicit enumeration and memoized, since the same pool shapes recur.
#[derive(Default)]
struct DrawCounts {
    memo: HashMap<(usize, usize, usize), (u64, u64)>,
}

impl DrawCounts {
    fn counts(&mut self, pool: usize, contam: usize, d: usize) -> (u64, u64) {
        *self.memo.entry((pool, contam, d)).or_insert_with(|| {
            let mut clean = 0u64;
            let mut total = 0u64;
            for subset in combinations(pool, d) {
                total += 1;
                if subset.iter().all(|&idx| idx >= contam) {
                    clean += 1;
                }
            }
            (clean, total)
        })
    }
}

struct Walk<'a> {
    n_s: usize,
    d: usize,
    p_b: &'a BigRational,
    evolving: bool,
    seed_contam: usize,
    draws: DrawCounts,
}

impl Walk<'_> {
    /// Probability that no receiver-set member is contaminated once the
    /// remaining downloaders have fetched, given the informed pool holds
    /// `pool_contam` contaminated nodes out of `pool_size`.
    fn unblocked(
        &mut self,
        pool_size: usize,
        pool_contam: usize,
        remaining: usize,
        blocked: bool,
    ) -> BigRational {
        if remaining == 0 {
            return if blocked {
                BigRational::zero()
            } else {
                BigRational::one()
            };
        }
        let honest = BigRational::one() - self.p_b;
        let mut acc = BigRational::zero();

        // Branch 1: the downloader is itself Byzantine and stores junk.
        if !self.p_b.is_zero() {
            acc += self.p_b * self.unblocked(pool_size + 1, pool_contam + 1, remaining - 1, true);
        }

        // Branch 2: honest; enumerate every d-subset of its parent pool.
        if !honest.is_zero() {
            let (draw_pool, draw_contam) = if self.evolving {
                (pool_size, pool_contam)
            } else {
                (self.n_s, self.seed_contam)
            };
            let (clean, total) = self.draws.counts(draw_pool, draw_contam, self.d);
            let total_r = BigRational::from(BigInt::from(total));
            if clean > 0 {
                let weight = &honest * BigRational::from(BigInt::from(clean)) / &total_r;
                acc += weight * self.unblocked(pool_size + 1, pool_contam, remaining - 1, blocked);
            }
            if clean < total {
                let weight = &honest * BigRational::from(BigInt::from(total - clean)) / &total_r;
                acc += weight * self.unblocked(pool_size + 1, pool_contam + 1, remaining - 1, true);
            }
        }
        acc
    }
}

/// Exact blocking probability by full enumeration. Seeds are nodes
/// 0..n_s; receiver sets range over every n_r-subset of the n_total
/// nodes; Byzantine markings range over every subset of the seeds, and
/// each downloader's own Byzantine draw and parent subset are branched
/// explicitly.
pub fn blocking_oracle(
    n_total: usize,
    n_s: usize,
    n_r: usize,
    d: usize,
    p_b: &BigRational,
    evolving: bool,
) -> BigRational {
    let receiver_sets = combinations(n_total, n_r);
    let set_count = BigRational::from(BigInt::from(receiver_sets.len()));
    let honest = BigRational::one() - p_b;
    let mut unblocked_total = BigRational::zero();

    for receivers in &receiver_sets {
        for mask in 0u32..(1 << n_s) {
            let byz = mask.count_ones() as usize;
            let weight = pow(p_b, byz) * pow(&honest, n_s - byz);
            if weight.is_zero() {
                continue;
            }
            let seed_blocked = receivers.iter().any(|&v| v < n_s && mask >> v & 1 == 1);
            let downloaders = receivers.iter().filter(|&&v| v >= n_s).count();
            let mut walk = Walk {
                n_s,
                d,
                p_b,
                evolving,
                seed_contam: byz,
                draws: DrawCounts::default(),
            };
            unblocked_total += weight * walk.unblocked(n_s, byz, downloaders, seed_blocked);
        }
    }
    BigRational::one() - unblocked_total / set_count
}

fn pow(base: &BigRational, exp: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}
