//! Permutation-test oracle for lag transition counts, independent of the
//! residual-based test.
//!
//! The p-value is the smaller attained tail: with `T` the lag-`k` count of
//! `given -> target` under a uniformly random rearrangement of the sequence,
//! `p = min(P(T >= t_obs), P(T <= t_obs))`. Both directions of departure are
//! detectable; callers comparing against a two-sided level should use
//! `alpha / 2`. When the number of distinct rearrangements is at most
//! 10 000 the distribution is enumerated exactly; otherwise it is sampled
//! with a seeded generator.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CategorySequence, SeqError};

const EXACT_LIMIT: u128 = 10_000;

/// Permutation p-value of the observed `given -> target` count at lag `k`.
/// `iterations` and `seed` only apply in sampled mode.
pub fn permutation_pvalue(
    seq: &CategorySequence,
    given: &str,
    target: &str,
    k: usize,
    iterations: usize,
    seed: u64,
) -> Result<f64, SeqError> {
    if k == 0 || k >= seq.len() {
        return Err(SeqError::LagTooLarge {
            lag: k,
            len: seq.len(),
        });
    }
    let a = seq.index_of(given)?;
    let b = seq.index_of(target)?;
    let symbols = seq.symbols();
    let observed = count_pairs(symbols, a, b, k);

    let mut class_counts = vec![0usize; seq.alphabet().len()];
    for &s in symbols {
        class_counts[s] += 1;
    }

    match multiset_permutations(&class_counts) {
        Some(total) if total <= EXACT_LIMIT => {
            let (at_or_above, at_or_below, total) = exact_tails(&class_counts, a, b, k, observed);
            debug_assert!(total > 0);
            Ok((at_or_above.min(at_or_below)) as f64 / total as f64)
        }
        _ => {
            let iterations = iterations.max(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = symbols.to_vec();
            let mut ge = 0usize;
            let mut le = 0usize;
            for _ in 0..iterations {
                shuffled.shuffle(&mut rng);
                let t = count_pairs(&shuffled, a, b, k);
                if t >= observed {
                    ge += 1;
                }
                if t <= observed {
                    le += 1;
                }
            }
            let p_ge = (ge + 1) as f64 / (iterations + 1) as f64;
            let p_le = (le + 1) as f64 / (iterations + 1) as f64;
            Ok(p_ge.min(p_le).min(1.0))
        }
    }
}

fn count_pairs(symbols: &[usize], a: usize, b: usize, k: usize) -> u64 {
    (0..symbols.len() - k)
        .filter(|&i| symbols[i] == a && symbols[i + k] == b)
        .count() as u64
}

/// Number of distinct arrangements of the multiset, or `None` on overflow
/// past the exact-mode limit.
fn multiset_permutations(class_counts: &[usize]) -> Option<u128> {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for &count in class_counts {
        for i in 1..=count as u128 {
            placed += 1;
            total = total.checked_mul(placed)?;
            total /= i; // binomial product stays integral
            if total > EXACT_LIMIT * 1_000 {
                return None;
            }
        }
    }
    Some(total)
}

/// Enumerates every distinct arrangement and tallies both tails.
fn exact_tails(
    class_counts: &[usize],
    a: usize,
    b: usize,
    k: usize,
    observed: u64,
) -> (u64, u64, u64) {
    let n: usize = class_counts.iter().sum();
    let mut counts = class_counts.to_vec();
    let mut prefix = Vec::with_capacity(n);
    let mut tallies = (0u64, 0u64, 0u64);
    recurse(&mut counts, &mut prefix, n, a, b, k, observed, &mut tallies);
    tallies
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    counts: &mut Vec<usize>,
    prefix: &mut Vec<usize>,
    n: usize,
    a: usize,
    b: usize,
    k: usize,
    observed: u64,
    tallies: &mut (u64, u64, u64),
) {
    if prefix.len() == n {
        let t = count_pairs(prefix, a, b, k);
        if t >= observed {
            tallies.0 += 1;
        }
        if t <= observed {
            tallies.1 += 1;
        }
        tallies.2 += 1;
        return;
    }
    for s in 0..counts.len() {
        if counts[s] == 0 {
            continue;
        }
        counts[s] -= 1;
        prefix.push(s);
        recurse(counts, prefix, n, a, b, k, observed, tallies);
        prefix.pop();
        counts[s] += 1;
    }
}
