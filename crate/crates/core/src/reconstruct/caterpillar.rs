//! Caterpillars through the ticket model.
//!
//! Put `n_r` tickets labelled `r` in a box for each spine position `r` and
//! draw them all without replacement; with `K_j` the range of the first `j`
//! labels, `(W_2, ..., W_n)` has the law of `(K_2 + 2, ..., K_n + n)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lengthseq::LengthDistribution;
use crate::rational::{Probability, Rational};

/// Search nodes allowed when matching constraints to compositions.
pub const DEFAULT_CATERPILLAR_SEARCH_CAP: u64 = 50_000_000;

/// Statistics of `(K_2, K_3, ...)` that pin down a caterpillar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaterpillarStatistics {
    pub n: usize,
    /// `P{K_2 = k}` for `k = 0..=ell`; its last entry is positive.
    pub pair_law: Vec<Probability>,
    /// `P{K_2 = r, K_3 = ell}` for `r = 1..=ell/2` (empty when `n < 3`).
    pub span_probs: Vec<Probability>,
    /// `P{K_2 = ... = K_k = 0, K_{k+1} = ell}` for `k = 1, 2, ...` while
    /// positive; its length is `max(n_0, n_ell)` (empty when `ell = 0`).
    pub end_run: Vec<Probability>,
}

impl CaterpillarStatistics {
    pub fn ell(&self) -> usize {
        self.pair_law.len() - 1
    }
}

fn falling(x: usize, k: usize) -> BigInt {
    (0..k)
        .map(|i| BigInt::from(x as i64 - i as i64))
        .product()
}

fn ratio(num: BigInt, den: BigInt) -> Probability {
    if den.is_zero() {
        Probability::zero()
    } else {
        Probability::new(num, den)
    }
}

fn check_composition(c: &[usize]) -> Result<usize> {
    let n: usize = c.iter().sum();
    if c.is_empty() || c[0] == 0 || c[c.len() - 1] == 0 || n < 2 {
        return Err(Error::Precondition(format!("invalid caterpillar composition {c:?}")));
    }
    Ok(n)
}

/// Closed-form statistics of the caterpillar with composition `c`.
pub fn caterpillar_statistics(c: &[usize]) -> Result<CaterpillarStatistics> {
    let n = check_composition(c)?;
    let ell = c.len() - 1;
    let big = |x: usize| BigInt::from(x);
    let nn1 = big(n) * big(n - 1);
    let mut pair_law = Vec::with_capacity(ell + 1);
    let squares: usize = c.iter().map(|x| x * x).sum();
    pair_law.push(ratio(big(squares - n), nn1.clone()));
    for k in 1..=ell {
        let auto: usize = (0..=ell - k).map(|r| c[r] * c[r + k]).sum();
        pair_law.push(ratio(big(2 * auto), nn1.clone()));
    }
    let mut span_probs = Vec::new();
    if n >= 3 {
        let den = falling(n, 3);
        for r in 1..=ell / 2 {
            let num = if 2 * r == ell {
                big(4 * c[0] * c[r] * c[ell])
            } else {
                big(2 * c[0] * (c[r] + c[ell - r]) * c[ell])
            };
            span_probs.push(ratio(num, den.clone()));
        }
    }
    let mut end_run = Vec::new();
    if ell > 0 {
        for k in 1..n {
            let num = falling(c[0], k) * big(c[ell]) + falling(c[ell], k) * big(c[0]);
            let p = ratio(num, falling(n, k + 1));
            if p.is_zero() {
                break;
            }
            end_run.push(p);
        }
    }
    Ok(CaterpillarStatistics {
        n,
        pair_law,
        span_probs,
        end_run,
    })
}

fn integer_values(dist: &LengthDistribution) -> bool {
    dist.iter().all(|(s, _)| s.iter().all(|x| x.is_integer()))
}

/// `Some(ell)` when the law is that of a caterpillar with an `ell`-edge
/// spine: `max { k : P{W_2 = k + 2} > 0 } = ell` and `W_n = ell + n` a.s.
pub fn detect_caterpillar(dist: &LengthDistribution) -> Option<usize> {
    let n = dist.n();
    if !integer_values(dist) {
        return None;
    }
    let total = dist.marginal(n).ok()?;
    if total.len() != 1 {
        return None;
    }
    let wn = total.keys().next()?.to_integer();
    let max_w2 = dist.marginal(2).ok()?.keys().next_back()?.to_integer();
    let ell = max_w2 - 2;
    (ell >= 0 && wn == ell + n as i64).then_some(ell as usize)
}

/// The statistics read off a caterpillar's length-sequence law.
pub fn caterpillar_statistics_from(dist: &LengthDistribution) -> Result<CaterpillarStatistics> {
    let ell = detect_caterpillar(dist)
        .ok_or_else(|| Error::class("caterpillar-detect", "law is not that of a caterpillar"))?;
    let n = dist.n();
    let w = |x: usize| Rational::from_integer(x as i64);
    let w2 = dist.marginal(2)?;
    let pair_law = (0..=ell)
        .map(|k| w2.get(&w(k + 2)).cloned().unwrap_or_else(Probability::zero))
        .collect();
    let mut span_probs = Vec::new();
    if n >= 3 {
        for r in 1..=ell / 2 {
            span_probs.push(dist.probability_where(|s| s[0] == w(r + 2) && s[1] == w(ell + 3)));
        }
    }
    let mut end_run = Vec::new();
    if ell > 0 {
        for k in 1..n {
            let p = dist.probability_where(|s| {
                (2..=k).all(|j| s[j - 2] == w(j)) && s[k - 1] == w(ell + k + 1)
            });
            if p.is_zero() {
                break;
            }
            end_run.push(p);
        }
    }
    Ok(CaterpillarStatistics {
        n,
        pair_law,
        span_probs,
        end_run,
    })
}

fn to_count(p: Probability, what: &str) -> Result<usize> {
    if !p.is_integer() {
        return Err(Error::Inconsistent(format!("{what} = {p} is not an integer")));
    }
    p.to_integer()
        .to_usize()
        .ok_or_else(|| Error::Inconsistent(format!("{what} is negative or too large")))
}

/// Every composition (up to reversal) satisfying the statistics, found by
/// exhaustive search, with its two orientations merged into the
/// lexicographically smaller one.
fn solutions(stats: &CaterpillarStatistics, cap: u64) -> Result<BTreeSet<Vec<usize>>> {
    let n = stats.n;
    let ell = stats.ell();
    let big_n = |x: usize| Probability::from_integer(BigInt::from(x));
    let nn1 = big_n(n) * big_n(n - 1);
    if ell == 0 {
        return Ok(BTreeSet::from([vec![n]]));
    }
    let mut auto = Vec::with_capacity(ell + 1);
    auto.push(to_count(stats.pair_law[0].clone() * nn1.clone() + big_n(n), "sum of squares")?);
    for k in 1..=ell {
        auto.push(to_count(
            stats.pair_law[k].clone() * nn1.clone() / big_n(2),
            "autocorrelation",
        )?);
    }
    let ends = auto[ell];
    let big_end = stats.end_run.len();
    if big_end == 0 || ends % big_end != 0 {
        return Err(Error::Inconsistent("end counts do not factor".into()));
    }
    let small_end = ends / big_end;
    let mut pair_sums = vec![None; ell + 1];
    if n >= 3 {
        let den = big_n(n) * big_n(n - 1) * big_n(n - 2);
        for (i, p) in stats.span_probs.iter().enumerate() {
            let r = i + 1;
            let coeff = if 2 * r == ell { 4 } else { 2 };
            let s = to_count(
                p.clone() * den.clone() / big_n(coeff * ends),
                "pair sum",
            )?;
            pair_sums[r] = Some(s);
        }
    }
    let mut found = BTreeSet::new();
    let mut c = vec![0usize; ell + 1];
    c[0] = big_end;
    c[ell] = small_end;
    let Some(budget) = n.checked_sub(big_end + small_end) else {
        return Ok(found);
    };
    let mut nodes = 0u64;
    search(&mut c, 1, budget, &pair_sums, &auto, &mut found, &mut nodes, cap)?;
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn search(
    c: &mut Vec<usize>,
    r: usize,
    budget: usize,
    pair_sums: &[Option<usize>],
    auto: &[usize],
    found: &mut BTreeSet<Vec<usize>>,
    nodes: &mut u64,
    cap: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > cap {
        return Err(Error::Infeasible("caterpillar search exceeded its node budget".into()));
    }
    let ell = c.len() - 1;
    let mirror = ell - r;
    if r > mirror {
        if budget == 0 && matches_autocorrelation(c, auto) {
            let rev: Vec<usize> = c.iter().rev().copied().collect();
            found.insert(c.clone().min(rev));
        }
        return Ok(());
    }
    if r == mirror {
        let choices: Vec<usize> = match pair_sums[r] {
            Some(s) => vec![s],
            None => (0..=budget).collect(),
        };
        for x in choices.into_iter().filter(|&x| x <= budget) {
            c[r] = x;
            search(c, r + 1, budget - x, pair_sums, auto, found, nodes, cap)?;
        }
        c[r] = 0;
        return Ok(());
    }
    match pair_sums[r] {
        Some(s) => {
            if s > budget {
                return Ok(());
            }
            for x in 0..=s {
                c[r] = x;
                c[mirror] = s - x;
                search(c, r + 1, budget - s, pair_sums, auto, found, nodes, cap)?;
            }
        }
        None => {
            for x in 0..=budget {
                for y in 0..=budget - x {
                    c[r] = x;
                    c[mirror] = y;
                    search(c, r + 1, budget - x - y, pair_sums, auto, found, nodes, cap)?;
                }
            }
        }
    }
    c[r] = 0;
    c[mirror] = 0;
    Ok(())
}

fn matches_autocorrelation(c: &[usize], auto: &[usize]) -> bool {
    let ell = c.len() - 1;
    (0..=ell).all(|k| (0..=ell - k).map(|r| c[r] * c[r + k]).sum::<usize>() == auto[k])
}

/// The composition (lexicographically smaller orientation) determined by
/// the statistics. Zero or several reversal classes are reported as
/// [`Error::Inconsistent`].
pub fn solve_caterpillar(stats: &CaterpillarStatistics, cap: u64) -> Result<Vec<usize>> {
    let found = solutions(stats, cap)?;
    let mut it = found.into_iter();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        (None, _) => Err(Error::Inconsistent("no composition fits the statistics".into())),
        (Some(a), Some(b)) => Err(Error::Inconsistent(format!(
            "several compositions fit the statistics, e.g. {a:?} and {b:?}"
        ))),
    }
}

/// Composition of the caterpillar whose law is `dist`, up to reversal.
pub fn reconstruct_caterpillar(dist: &LengthDistribution) -> Result<Vec<usize>> {
    solve_caterpillar(&caterpillar_statistics_from(dist)?, DEFAULT_CATERPILLAR_SEARCH_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengthseq::exact_distribution;
    use crate::rational::big_ratio;
    use crate::tree::{caterpillar, is_caterpillar_structural, parse_tree};

    /// All compositions with `n` leaves and an `ell`-edge spine.
    fn compositions(n: usize, ell: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut c = vec![0; ell + 1];
        fill(&mut c, 0, n, &mut out);
        out.retain(|c| c[0] > 0 && c[ell] > 0);
        out
    }

    fn fill(c: &mut Vec<usize>, i: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if i + 1 == c.len() {
            c[i] = left;
            out.push(c.clone());
            return;
        }
        for x in 0..=left {
            c[i] = x;
            fill(c, i + 1, left - x, out);
        }
    }

    #[test]
    fn twenty_five_leaf_statistics() {
        let s = caterpillar_statistics(&[2, 11, 12]).unwrap();
        assert_eq!(s.pair_law[2], big_ratio(48, 600));
        let s = caterpillar_statistics(&[1, 1]).unwrap();
        assert_eq!(s.pair_law, vec![big_ratio(0, 1), big_ratio(1, 1)]);
        assert!(caterpillar_statistics(&[0, 2]).is_err());
    }

    #[test]
    fn large_example_is_recovered_from_statistics() {
        for c in [vec![2, 11, 12], vec![3, 14, 8], vec![12, 11, 2]] {
            let s = caterpillar_statistics(&c).unwrap();
            let got = solve_caterpillar(&s, DEFAULT_CATERPILLAR_SEARCH_CAP).unwrap();
            let rev: Vec<usize> = c.iter().rev().copied().collect();
            assert_eq!(got, c.clone().min(rev));
        }
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for n in 2..=7 {
            for ell in 0..=(9 - n).min(5) {
                for c in compositions(n, ell) {
                    let t = caterpillar(&c).unwrap();
                    let d = exact_distribution(&t).unwrap();
                    let from_dist = caterpillar_statistics_from(&d).unwrap();
                    assert_eq!(from_dist, caterpillar_statistics(&c).unwrap(), "{c:?}");
                }
            }
        }
    }

    #[test]
    fn exhaustive_round_trip() {
        for n in 2..=8 {
            for ell in 0..=9 - n {
                for c in compositions(n, ell) {
                    let t = caterpillar(&c).unwrap();
                    let d = exact_distribution(&t).unwrap();
                    assert_eq!(detect_caterpillar(&d), Some(ell));
                    let rev: Vec<usize> = c.iter().rev().copied().collect();
                    assert_eq!(reconstruct_caterpillar(&d).unwrap(), c.clone().min(rev));
                }
            }
        }
    }

    #[test]
    fn detection_examples() {
        let d = exact_distribution(&caterpillar(&[1, 2, 1]).unwrap()).unwrap();
        assert_eq!(d.marginal(2).unwrap().keys().next_back(), Some(&Rational::from(4)));
        assert_eq!(detect_caterpillar(&d), Some(2));
        let q = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap();
        assert!(is_caterpillar_structural(&q).is_some());
        assert_eq!(detect_caterpillar(&exact_distribution(&q).unwrap()), Some(1));
        let balanced = parse_tree("((a:1,b:1):1,(c:1,d:1):1,(e:1,f:1):1);").unwrap();
        assert_eq!(detect_caterpillar(&exact_distribution(&balanced).unwrap()), None);
        let err = reconstruct_caterpillar(&exact_distribution(&balanced).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ClassViolation { .. }));
    }
}
