use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{big_ratio, common_denominator, scaled, Probability, Rational};

/// Values `(W_2, ..., W_n)` of one realisation of the random length sequence.
pub type LengthSequence = Vec<Rational>;

/// Equality condition used by [`LengthDistribution::conditional`].
///
/// Coordinates are indexed like the sequence itself: `k` ranges over
/// `1..=n`, with `W_1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `W_k = value`
    Equals { k: usize, value: Rational },
    /// `W_k - W_j = value`
    Difference { k: usize, j: usize, value: Rational },
}

/// Exact law of a random length sequence.
///
/// Support points are stored as integers over a common denominator `scale`,
/// which keeps lexicographic order and makes hashing exact. Each point
/// carries a count; the counts sum to `total` (`n!` for an unmarked tree,
/// `(n-1)!` for a marked one, a multiple of these for mixtures).
#[derive(Clone, Debug)]
pub struct LengthDistribution {
    n: usize,
    scale: i64,
    entries: BTreeMap<Box<[i64]>, u128>,
    total: u128,
}

impl LengthDistribution {
    pub(crate) fn from_scaled(
        n: usize,
        scale: i64,
        entries: BTreeMap<Box<[i64]>, u128>,
        total: u128,
    ) -> Self {
        let mut g = scale;
        for key in entries.keys() {
            for &x in key.iter() {
                g = g.gcd(&x);
                if g == 1 {
                    break;
                }
            }
        }
        let entries = if g > 1 {
            entries
                .into_iter()
                .map(|(k, c)| (k.iter().map(|x| x / g).collect::<Box<[i64]>>(), c))
                .collect()
        } else {
            entries
        };
        LengthDistribution {
            n,
            scale: scale / g.max(1),
            entries,
            total,
        }
    }

    /// Builds a distribution from explicit support points and counts.
    ///
    /// Every sequence must have `n - 1` entries, counts must be positive and
    /// sum to `total`.
    pub fn from_entries(
        n: usize,
        total: u128,
        entries: impl IntoIterator<Item = (LengthSequence, u128)>,
    ) -> Result<Self> {
        let raw: Vec<(LengthSequence, u128)> = entries.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::Precondition("distribution has an empty support".into()));
        }
        if n < 2 {
            return Err(Error::Precondition("distribution needs n >= 2".into()));
        }
        let scale = common_denominator(raw.iter().flat_map(|(s, _)| s.iter()));
        let mut map = BTreeMap::new();
        let mut sum: u128 = 0;
        for (seq, count) in raw {
            if seq.len() != n - 1 {
                return Err(Error::Precondition(format!(
                    "sequence of length {} in a distribution with n = {n}",
                    seq.len()
                )));
            }
            if count == 0 {
                return Err(Error::Precondition("zero count in distribution".into()));
            }
            let key: Box<[i64]> = seq.iter().map(|r| scaled(r, scale)).collect();
            *map.entry(key).or_insert(0) += count;
            sum = sum
                .checked_add(count)
                .ok_or_else(|| Error::Infeasible("count overflow".into()))?;
        }
        if sum != total {
            return Err(Error::Precondition(format!(
                "counts sum to {sum}, header total is {total}"
            )));
        }
        Ok(Self::from_scaled(n, scale, map, total))
    }

    /// Number of leaves.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// Number of distinct support points.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    fn decode(&self, key: &[i64]) -> LengthSequence {
        key.iter().map(|&x| Rational::new(x, self.scale)).collect()
    }

    fn encode(&self, seq: &[Rational]) -> Option<Box<[i64]>> {
        seq.iter()
            .map(|r| (self.scale % r.denom() == 0).then(|| scaled(r, self.scale)))
            .collect()
    }

    /// Support points with counts, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (LengthSequence, u128)> + '_ {
        self.entries.iter().map(|(k, &c)| (self.decode(k), c))
    }

    pub fn count(&self, seq: &[Rational]) -> u128 {
        if seq.len() + 1 != self.n {
            return 0;
        }
        self.encode(seq)
            .and_then(|k| self.entries.get(&k).copied())
            .unwrap_or(0)
    }

    pub fn probability(&self, seq: &[Rational]) -> Probability {
        big_ratio(self.count(seq), self.total)
    }

    /// `P{ pred(W) }`.
    pub fn probability_where(&self, mut pred: impl FnMut(&[Rational]) -> bool) -> Probability {
        let hits: u128 = self
            .entries
            .iter()
            .filter(|(k, _)| pred(&self.decode(k)))
            .map(|(_, &c)| c)
            .sum();
        big_ratio(hits, self.total)
    }

    /// Law of `f(W)`.
    pub fn pushforward<T: Ord>(
        &self,
        mut f: impl FnMut(&[Rational]) -> T,
    ) -> BTreeMap<T, Probability> {
        let mut counts: BTreeMap<T, u128> = BTreeMap::new();
        for (k, &c) in &self.entries {
            *counts.entry(f(&self.decode(k))).or_insert(0) += c;
        }
        counts
            .into_iter()
            .map(|(t, c)| (t, big_ratio(c, self.total)))
            .collect()
    }

    /// `W_k` for a sequence of this distribution (`W_1 = 0`).
    pub fn coordinate(seq: &[Rational], k: usize) -> Rational {
        if k <= 1 {
            Rational::zero()
        } else {
            seq[k - 2]
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(Error::Precondition(format!(
                "coordinate {k} outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// Law of `W_k`.
    pub fn marginal(&self, k: usize) -> Result<BTreeMap<Rational, Probability>> {
        self.check_index(k)?;
        Ok(self.pushforward(|s| Self::coordinate(s, k)))
    }

    /// Law of `W_n - W_{n-1}`, the length of a uniformly chosen pendant edge.
    pub fn pendant_increment_law(&self) -> BTreeMap<Rational, Probability> {
        let n = self.n;
        self.pushforward(|s| Self::coordinate(s, n) - Self::coordinate(s, n - 1))
    }

    /// Restriction to the event defined by all `constraints`.
    pub fn conditional(&self, constraints: &[Constraint]) -> Result<Self> {
        for c in constraints {
            match *c {
                Constraint::Equals { k, .. } => self.check_index(k)?,
                Constraint::Difference { k, j, .. } => {
                    self.check_index(k)?;
                    self.check_index(j)?;
                }
            }
        }
        let holds = |s: &[Rational]| {
            constraints.iter().all(|c| match *c {
                Constraint::Equals { k, value } => Self::coordinate(s, k) == value,
                Constraint::Difference { k, j, value } => {
                    Self::coordinate(s, k) - Self::coordinate(s, j) == value
                }
            })
        };
        let entries: BTreeMap<Box<[i64]>, u128> = self
            .entries
            .iter()
            .filter(|(k, _)| holds(&self.decode(k)))
            .map(|(k, &c)| (k.clone(), c))
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyEvent);
        }
        let total = entries.values().sum();
        Ok(Self::from_scaled(self.n, self.scale, entries, total))
    }

    /// Lexicographically smallest support point.
    pub fn min_lex(&self) -> LengthSequence {
        let key = self
            .entries
            .keys()
            .next()
            .expect("distributions have non-empty support");
        self.decode(key)
    }

    /// Lexicographically largest support point.
    pub fn max_lex(&self) -> LengthSequence {
        let key = self
            .entries
            .keys()
            .next_back()
            .expect("distributions have non-empty support");
        self.decode(key)
    }

    /// True when both describe the same probability law.
    pub fn same_law(&self, other: &Self) -> bool {
        if self.n != other.n || self.entries.len() != other.entries.len() {
            return false;
        }
        if self.scale == other.scale && self.total == other.total {
            return self.entries == other.entries;
        }
        self.iter().zip(other.iter()).all(|((sa, ca), (sb, cb))| {
            sa == sb && big_ratio(ca, self.total) == big_ratio(cb, other.total)
        })
    }

    /// Mixture `sum_i p_i * law_i` with exact rational weights.
    ///
    /// The result's total is `Q * L`, where `Q` is the common denominator of
    /// the weights and `L` the least common multiple of the parts' totals.
    pub fn mix(parts: &[(Probability, &LengthDistribution)]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::Precondition("empty mixture".into()));
        };
        let n = first.1.n;
        if parts.iter().any(|(_, d)| d.n != n) {
            return Err(Error::Precondition("mixture parts differ in n".into()));
        }
        if parts.iter().any(|(p, _)| p < &Probability::zero()) {
            return Err(Error::Precondition("negative mixture weight".into()));
        }
        let sum: Probability = parts.iter().map(|(p, _)| p.clone()).sum();
        if sum != Probability::from_integer(1.into()) {
            return Err(Error::Precondition(format!("mixture weights sum to {sum}")));
        }
        let to_u128 = |x: &num_bigint::BigInt| -> Result<u128> {
            u128::try_from(x).map_err(|_| Error::Infeasible("mixture denominator too large".into()))
        };
        let mut q: u128 = 1;
        for (p, _) in parts {
            q = q.lcm(&to_u128(p.denom())?);
        }
        let l = parts.iter().fold(1u128, |acc, (_, d)| acc.lcm(&d.total));
        let scale = parts.iter().fold(1i64, |acc, (_, d)| acc.lcm(&d.scale));
        let mut entries: BTreeMap<Box<[i64]>, u128> = BTreeMap::new();
        let overflow = || Error::Infeasible("mixture counts overflow".into());
        for (p, d) in parts {
            if p.is_zero() {
                continue;
            }
            let a = to_u128(p.numer())? * (q / to_u128(p.denom())?);
            let factor = a.checked_mul(l / d.total).ok_or_else(overflow)?;
            let mul = scale / d.scale;
            for (k, &c) in &d.entries {
                let key: Box<[i64]> = k.iter().map(|x| x * mul).collect();
                let add = c.checked_mul(factor).ok_or_else(overflow)?;
                let slot = entries.entry(key).or_insert(0);
                *slot = slot.checked_add(add).ok_or_else(overflow)?;
            }
        }
        let total = q.checked_mul(l).ok_or_else(overflow)?;
        Ok(Self::from_scaled(n, scale, entries, total))
    }
}

impl PartialEq for LengthDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.same_law(other)
    }
}
