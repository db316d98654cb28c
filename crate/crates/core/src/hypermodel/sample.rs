use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{Hypergraph, ModelParams, RegimeCheck};
use crate::rng::{stream_rng, HYPERGRAPH_STREAM, INITIAL_SET_STREAM};
use crate::{Error, Result};

/// Default cap on the expected number of edges `C(n, k) p` of a sample.
pub const DEFAULT_EDGE_BUDGET: f64 = 3.0e7;

/// How the number of edges was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeCountDraw {
    /// Exact `Binomial(C(n, k), p)`.
    Binomial,
    /// `Poisson(C(n, k) p)`, used when `C(n, k)` does not fit in 64 bits.
    PoissonApprox,
}

#[derive(Debug, Clone)]
pub struct SampledHypergraph {
    pub graph: Hypergraph,
    pub edge_count_draw: EdgeCountDraw,
    pub regime: RegimeCheck,
}

/// Sparse sampler for the binomial random hypergraph `H_k(n, p)`.
///
/// The edge count `m` is drawn first; then `m` distinct k-sets are drawn
/// uniformly by rejection. Conditioned on `m`, a uniform `m`-subset of all
/// k-sets is exactly the binomial model.
#[derive(Debug, Clone, Copy)]
pub struct HypergraphSampler {
    pub edge_budget: f64,
}

impl Default for HypergraphSampler {
    fn default() -> Self {
        Self { edge_budget: DEFAULT_EDGE_BUDGET }
    }
}

impl HypergraphSampler {
    pub fn new(edge_budget: f64) -> Self {
        Self { edge_budget }
    }

    pub fn sample(&self, params: &ModelParams, seed: u64) -> Result<SampledHypergraph> {
        params.validate()?;
        let ModelParams { n, k, p, .. } = *params;
        let regime = params.regime();
        let expected = ln_binomial(n as u64, k as u64).exp() * p;
        if expected > self.edge_budget {
            return Err(Error::MemoryBudget { expected, budget: self.edge_budget });
        }
        let mut rng = stream_rng(seed, HYPERGRAPH_STREAM);

        let total = binomial_u128(n as u128, k as u128);
        let (m, edge_count_draw) = match total.and_then(|t| u64::try_from(t).ok()) {
            Some(t) => {
                let m = if p == 0.0 || t == 0 {
                    0
                } else {
                    Binomial::new(t, p).expect("p validated").sample(&mut rng)
                };
                (m, EdgeCountDraw::Binomial)
            }
            None => {
                let m = if expected > 0.0 {
                    Poisson::new(expected).expect("positive mean").sample(&mut rng) as u64
                } else {
                    0
                };
                (m, EdgeCountDraw::PoissonApprox)
            }
        };

        let edges = if fits::<u64>(n, k) {
            draw_edge_set::<u64, _>(&mut rng, n, k, m, total)
        } else if fits::<u128>(n, k) {
            draw_edge_set::<u128, _>(&mut rng, n, k, m, total)
        } else if m == 0 {
            Vec::new()
        } else {
            return Err(Error::KeySpaceTooLarge { n, k });
        };

        Ok(SampledHypergraph {
            graph: Hypergraph::from_canonical(n, k, edges),
            edge_count_draw,
            regime,
        })
    }
}

/// Samples `H_k(n, p)` with the default memory budget. Deterministic in
/// `(params, seed)`.
pub fn sample_hypergraph(params: &ModelParams, seed: u64) -> Result<SampledHypergraph> {
    HypergraphSampler::default().sample(params, seed)
}

/// A uniformly random `a`-subset of `0..n`, sorted ascending.
pub fn sample_initial_set(n: u32, a: u64, seed: u64) -> Result<Vec<u32>> {
    if a > n as u64 {
        return Err(Error::InitialSetTooLarge { a, n });
    }
    let mut rng = stream_rng(seed, INITIAL_SET_STREAM);
    let mut perm: Vec<u32> = (0..n).collect();
    for i in 0..a as usize {
        let j = rng.random_range(i..n as usize);
        perm.swap(i, j);
    }
    perm.truncate(a as usize);
    perm.sort_unstable();
    Ok(perm)
}

/// Canonical k-set key: the sorted tuple read as a base-`n` number, so key
/// order is lexicographic tuple order.
trait EdgeKey: Copy + Ord {
    fn encode(tuple: &[u32], n: u32) -> Self;
    fn digit(self, shift: u32) -> usize;
    fn decode(self, n: u32, out: &mut [u32]);
    fn max_value() -> u128;
}

macro_rules! edge_key {
    ($t:ty) => {
        impl EdgeKey for $t {
            fn encode(tuple: &[u32], n: u32) -> Self {
                tuple.iter().fold(0, |acc, &v| acc * n as $t + v as $t)
            }

            fn digit(self, shift: u32) -> usize {
                ((self >> shift) & (RADIX_BUCKETS as $t - 1)) as usize
            }

            fn decode(mut self, n: u32, out: &mut [u32]) {
                for slot in out.iter_mut().rev() {
                    *slot = (self % n as $t) as u32;
                    self /= n as $t;
                }
            }

            fn max_value() -> u128 {
                <$t>::MAX as u128
            }
        }
    };
}

edge_key!(u64);
edge_key!(u128);

const RADIX_BITS: u32 = 12;
const RADIX_BUCKETS: usize = 1 << RADIX_BITS;

/// LSD radix sort over the low `key_bits` bits, skipping constant digits.
fn radix_sort<K: EdgeKey>(keys: &mut Vec<K>, key_bits: u32) {
    if keys.len() < 2 {
        return;
    }
    let mut buf = keys.clone();
    let mut counts = vec![0usize; RADIX_BUCKETS];
    let mut shift = 0;
    while shift < key_bits {
        counts.iter_mut().for_each(|c| *c = 0);
        for &key in keys.iter() {
            counts[key.digit(shift)] += 1;
        }
        if !counts.contains(&keys.len()) {
            let mut offset = 0;
            for c in counts.iter_mut() {
                let len = *c;
                *c = offset;
                offset += len;
            }
            for &key in keys.iter() {
                let d = key.digit(shift);
                buf[counts[d]] = key;
                counts[d] += 1;
            }
            std::mem::swap(keys, &mut buf);
        }
        shift += RADIX_BITS;
    }
}

fn key_bits(n: u32, k: u32) -> u32 {
    let space = (n as u128).pow(k);
    128 - (space - 1).leading_zeros()
}

fn fits<K: EdgeKey>(n: u32, k: u32) -> bool {
    match (n as u128).checked_pow(k) {
        Some(space) => space - 1 <= K::max_value(),
        None => false,
    }
}

/// `m` distinct uniformly random k-sets, flattened in canonical order.
fn draw_edge_set<K: EdgeKey, R: Rng>(
    rng: &mut R,
    n: u32,
    k: u32,
    m: u64,
    total: Option<u128>,
) -> Vec<u32> {
    let ku = k as usize;
    let keys: Vec<K> = match total {
        // Dense: reject the complement instead, then enumerate what is left.
        Some(total) if m as u128 * 2 > total => {
            let excluded = draw_distinct_keys::<K, R>(rng, n, k, (total - m as u128) as u64);
            let mut keys = Vec::with_capacity(m as usize);
            let mut tuple: Vec<u32> = (0..k).collect();
            let mut skip = excluded.iter().peekable();
            loop {
                let key = K::encode(&tuple, n);
                if skip.peek() == Some(&&key) {
                    skip.next();
                } else {
                    keys.push(key);
                }
                if !next_combination(&mut tuple, n) {
                    break;
                }
            }
            keys
        }
        _ => draw_distinct_keys::<K, R>(rng, n, k, m),
    };
    let mut flat = vec![0u32; keys.len() * ku];
    for (key, slot) in keys.into_iter().zip(flat.chunks_exact_mut(ku)) {
        key.decode(n, slot);
    }
    flat
}

/// Rejection sampling of `m` distinct k-set keys, returned sorted.
///
/// The first `m` draws are deduplicated in bulk; the shortfall is then drawn
/// one at a time, rejecting keys already present. This consumes the same
/// i.i.d. stream as one-at-a-time rejection and yields the same set.
fn draw_distinct_keys<K: EdgeKey, R: Rng>(rng: &mut R, n: u32, k: u32, m: u64) -> Vec<K> {
    let bits = key_bits(n, k);
    let mut buf = vec![0u32; k as usize];
    let mut keys: Vec<K> = (0..m).map(|_| K::encode(random_kset(rng, n, &mut buf), n)).collect();
    radix_sort(&mut keys, bits);
    keys.dedup();
    if (keys.len() as u64) < m {
        let mut extra = BTreeSet::new();
        while ((keys.len() + extra.len()) as u64) < m {
            let key = K::encode(random_kset(rng, n, &mut buf), n);
            if keys.binary_search(&key).is_err() {
                extra.insert(key);
            }
        }
        keys = merge_sorted(&keys, extra.into_iter());
    }
    keys
}

fn merge_sorted<K: EdgeKey>(base: &[K], extra: impl Iterator<Item = K>) -> Vec<K> {
    let mut out = Vec::with_capacity(base.len() + 16);
    let mut rest = base;
    for key in extra {
        let split = rest.partition_point(|&x| x < key);
        out.extend_from_slice(&rest[..split]);
        out.push(key);
        rest = &rest[split..];
    }
    out.extend_from_slice(rest);
    out
}

/// Uniform k-subset of `0..n` (`k = buf.len()`), sorted, written into `buf`.
fn random_kset<'a, R: Rng>(rng: &mut R, n: u32, buf: &'a mut [u32]) -> &'a [u32] {
    for i in 0..buf.len() {
        // Index among the n - i vertices not yet chosen, mapped past the chosen ones.
        let mut v = rng.random_range(0..n - i as u32);
        let mut pos = 0;
        while pos < i && v >= buf[pos] {
            v += 1;
            pos += 1;
        }
        buf.copy_within(pos..i, pos + 1);
        buf[pos] = v;
    }
    buf
}

/// Advances `tuple` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(tuple: &mut [u32], n: u32) -> bool {
    let k = tuple.len();
    for i in (0..k).rev() {
        if tuple[i] < n - (k - i) as u32 {
            tuple[i] += 1;
            for j in i + 1..k {
                tuple[j] = tuple[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact `C(n, k)`, or `None` on overflow.
fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul(n - i)? / (i + 1);
    }
    Some(c)
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}
