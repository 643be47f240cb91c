//! Exhaustive difference-set search, pruned to unions of multiplier orbits.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::multiplier_orbits;
use crate::arith::{gcd, prime_power};
use crate::dset::{self, Params};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::resources::Resources;
use crate::singer::{singer_construct_streamed, verifies_as};

/// Largest group the orbit search accepts.
pub const SEARCH_LIMIT: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub group: AbelianGroup,
    pub params: Params,
    /// Search only among unions of orbits of `x ↦ m x`; `1` disables pruning.
    pub multiplier: u64,
    /// Node budget for the whole search (split evenly across subtrees).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_results: Option<usize>,
}

impl SearchSpec {
    /// Refuses parameters that fail `λ(v-1) = k(k-1)` or do not match the group.
    pub fn new(group: AbelianGroup, k: u64, lambda: u64, multiplier: u64) -> Result<Self> {
        let params = Params::new(group.order(), k, lambda)?;
        Ok(SearchSpec {
            group,
            params,
            multiplier,
            budget: None,
            max_results: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub spec: SearchSpec,
    /// Number of classes up to translation and numerical multipliers.
    pub classes: usize,
    /// Canonical form of each class, sorted.
    pub representatives: Vec<Vec<u64>>,
    /// Every set found, sorted lexicographically.
    pub sets: Vec<Vec<u64>>,
    pub nodes: u64,
    /// False when the budget ran out before the tree was exhausted.
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

/// Lexicographically least sorted rank list among all `u D + t`, `u` a unit.
pub fn canonical_form(group: &AbelianGroup, set: &[u64]) -> Vec<u64> {
    let v = group.order();
    let exp = group.exponent();
    let mut best: Option<Vec<u64>> = None;
    for u in (1..=exp).filter(|&u| gcd(u, v) == 1) {
        let image: Vec<u64> = set.iter().map(|&x| group.scale(x, u)).collect();
        // The least translate always contains 0, so only shifts by -x matter.
        for &x in &image {
            let mut t: Vec<u64> = image.iter().map(|&y| group.sub(y, x)).collect();
            t.sort_unstable();
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
    }
    best.unwrap_or_default()
}

fn finish(
    spec: &SearchSpec,
    mut sets: Vec<Vec<u64>>,
    nodes: u64,
    complete: bool,
    start: Instant,
) -> Result<SearchResult> {
    sets.sort();
    sets.dedup();
    if let Some(cap) = spec.max_results {
        sets.truncate(cap);
    }
    for s in &sets {
        let rep = dset::verify(&spec.group, s, 1)?;
        if !rep.verified {
            return Err(Error::ParamsMismatch(format!(
                "search emitted a non-difference set {s:?}"
            )));
        }
    }
    let representatives: BTreeSet<Vec<u64>> = sets
        .iter()
        .map(|s| canonical_form(&spec.group, s))
        .collect();
    Ok(SearchResult {
        spec: spec.clone(),
        classes: representatives.len(),
        representatives: representatives.into_iter().collect(),
        sets,
        nodes,
        complete,
        seconds: Some(start.elapsed().as_secs_f64()),
    })
}

/// Backtracking state for one subtree.
struct Searcher<'a> {
    group: &'a AbelianGroup,
    orbits: &'a [Vec<u64>],
    /// `reachable[i]` has bit `t` set when orbits `i..` can contribute exactly `t` elements.
    reachable: &'a [Vec<bool>],
    k: usize,
    lambda: u32,
    counts: Vec<u32>,
    chosen: Vec<u64>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    cap: usize,
    found: Vec<Vec<u64>>,
}

impl Searcher<'_> {
    /// Adds an orbit; on a count above `λ`, rolls back and returns false.
    fn push(&mut self, orbit: &[u64]) -> bool {
        let base = self.chosen.len();
        for &x in orbit {
            let mut ok = true;
            for i in 0..self.chosen.len() {
                let y = self.chosen[i];
                for d in [self.group.sub(x, y), self.group.sub(y, x)] {
                    let c = &mut self.counts[d as usize];
                    *c += 1;
                    ok &= *c <= self.lambda;
                }
            }
            self.chosen.push(x);
            if !ok {
                self.truncate(base);
                return false;
            }
        }
        true
    }

    fn truncate(&mut self, len: usize) {
        while self.chosen.len() > len {
            let x = self.chosen.pop().expect("non-empty");
            for &y in &self.chosen {
                self.counts[self.group.sub(x, y) as usize] -= 1;
                self.counts[self.group.sub(y, x) as usize] -= 1;
            }
        }
    }

    fn run(&mut self, i: usize) {
        if self.exhausted || self.found.len() >= self.cap {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let need = self.k - self.chosen.len();
        if need == 0 {
            // Every count is at most λ and they sum to λ(v-1): all equal λ.
            let mut s = self.chosen.clone();
            s.sort_unstable();
            self.found.push(s);
            return;
        }
        if i == self.orbits.len() || !self.reachable[i][need] {
            return;
        }
        let len = self.orbits[i].len();
        if len <= need {
            let base = self.chosen.len();
            if self.push(&self.orbits[i].clone()) {
                self.run(i + 1);
                self.truncate(base);
            }
        }
        self.run(i + 1);
    }
}

/// All `m`-fixed difference sets with the given parameters, as unions of orbits.
pub fn orbit_union_search(spec: &SearchSpec, workers: usize) -> Result<SearchResult> {
    let start = Instant::now();
    let g = &spec.group;
    let Params { v, k, lambda, .. } = spec.params;
    if v != g.order() || !spec.params.satisfies_fundamental_equation() {
        return Err(Error::InfeasibleParams(format!("{} in {}", spec.params, g)));
    }
    if v > SEARCH_LIMIT {
        return Err(Error::CeilingExceeded {
            what: "search group order",
            size: v as u128,
            ceiling: SEARCH_LIMIT,
        });
    }
    let orbits = multiplier_orbits(g, spec.multiplier)?.orbits;
    let k = k as usize;
    let mut reachable = vec![vec![false; k + 1]; orbits.len() + 1];
    reachable[orbits.len()][0] = true;
    for i in (0..orbits.len()).rev() {
        let len = orbits[i].len();
        for t in 0..=k {
            reachable[i][t] = reachable[i + 1][t] || (t >= len && reachable[i + 1][t - len]);
        }
    }

    // Fixed split at depth 2: subtree `b` includes orbit `j < depth` iff bit `j` of `b` is set.
    let depth = orbits.len().min(2);
    let subtrees = 1usize << depth;
    let per_tree = spec
        .budget
        .map_or(u64::MAX, |b| (b / subtrees as u64).max(1));
    let cap = spec.max_results.unwrap_or(usize::MAX);
    let run_subtree = |b: usize| -> (Vec<Vec<u64>>, u64, bool) {
        let mut s = Searcher {
            group: g,
            orbits: &orbits,
            reachable: &reachable,
            k,
            lambda: lambda as u32,
            counts: vec![0; v as usize],
            chosen: Vec::with_capacity(k),
            nodes: 0,
            budget: per_tree,
            exhausted: false,
            cap,
            found: Vec::new(),
        };
        let mut size = 0;
        for (j, orbit) in orbits.iter().enumerate().take(depth) {
            if b >> j & 1 == 1 {
                size += orbit.len();
                if size > k || !s.push(orbit) {
                    return (Vec::new(), 0, true);
                }
            }
        }
        s.run(depth);
        (s.found, s.nodes, !s.exhausted)
    };

    let workers = workers.clamp(1, subtrees);
    let mut outcomes: Vec<(usize, SubtreeOutcome)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run_subtree = &run_subtree;
                scope.spawn(move || {
                    (w..subtrees)
                        .step_by(workers)
                        .map(|b| (b, run_subtree(b)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    outcomes.sort_by_key(|(b, _)| *b);
    let nodes = outcomes.iter().map(|(_, o)| o.1).sum();
    let complete = outcomes.iter().all(|(_, o)| o.2);
    let sets = outcomes.into_iter().flat_map(|(_, o)| o.0).collect();
    finish(spec, sets, nodes, complete, start)
}

/// Sets found, nodes visited, and whether the subtree finished.
type SubtreeOutcome = (Vec<Vec<u64>>, u64, bool);

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Tests every `k`-subset; refuses when `C(v, k)` exceeds the budget.
pub fn brute_force_search(
    group: &AbelianGroup,
    k: u64,
    lambda: u64,
    budget: u64,
) -> Result<SearchResult> {
    let start = Instant::now();
    let spec = SearchSpec {
        budget: Some(budget),
        ..SearchSpec::new(group.clone(), k, lambda, 1)?
    };
    let v = group.order();
    let total = binomial(v, k);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "C({v}, {k}) = {total} subsets exceed budget {budget}"
        )));
    }
    let k = k as usize;
    let mut found = Vec::new();
    let mut idx: Vec<u64> = (0..k as u64).collect();
    let mut counts = vec![0u64; v as usize];
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        for &a in &idx {
            for &b in &idx {
                if a != b {
                    counts[group.sub(a, b) as usize] += 1;
                }
            }
        }
        if counts.iter().skip(1).all(|&c| c == lambda) {
            found.push(idx.clone());
        }
        // Next combination in lexicographic order.
        let Some(i) = (0..k).rev().find(|&i| idx[i] < v - (k - i) as u64) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    finish(&spec, found, total as u64, true, start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStatus {
    Embedded,
    NotFound,
    Error,
}

impl ScanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanStatus::Embedded => "embedded",
            ScanStatus::NotFound => "not-found",
            ScanStatus::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub q: u64,
    pub s: u32,
    pub v: u64,
    pub status: ScanStatus,
    /// The base `q'` of the minimal set found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_order: Option<u64>,
    /// `D ∩ S` in ranks of the parent group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedded: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// For each `s`, looks for a subgroup `S` with `D ∩ S` a difference set with
/// parameters `((q'+1)(q'²+1), q'²+q'+1, q'+1)`, `q' = p^{2^i}`.
pub fn conjecture_scan(q: u64, s_list: &[u32], res: &Resources) -> Result<Vec<ScanRow>> {
    let (p, _) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    Ok(s_list.iter().map(|&s| scan_one(q, p, s, res)).collect())
}

fn scan_one(q: u64, p: u64, s: u32, res: &Resources) -> ScanRow {
    let mut row = ScanRow {
        q,
        s,
        v: 0,
        status: ScanStatus::NotFound,
        minimal_q: None,
        subgroup_order: None,
        embedded: None,
        message: None,
    };
    let built = match singer_construct_streamed(q, s, res) {
        Ok(b) => b,
        Err(e) => {
            row.status = ScanStatus::Error;
            row.message = Some(e.to_string());
            return row;
        }
    };
    let d = built.set;
    let g = d.group();
    row.v = g.order();
    let mut qp = p;
    while let Ok(target) = Params::classical(qp, 4) {
        if target.v > row.v {
            break;
        }
        if row.v.is_multiple_of(target.v) {
            let subs = match g.subgroups_of_order(target.v) {
                Ok(subs) => subs,
                Err(e) => {
                    row.status = ScanStatus::Error;
                    row.message = Some(e.to_string());
                    return row;
                }
            };
            for sub in subs {
                let r = d.restrict(&sub);
                if verifies_as(&r.group, &r.elements, target, res.workers) {
                    row.status = ScanStatus::Embedded;
                    row.minimal_q = Some(qp);
                    row.subgroup_order = Some(target.v);
                    row.embedded = Some(r.parent_elements);
                    return row;
                }
            }
        }
        match qp.checked_mul(qp) {
            Some(next) => qp = next,
            None => break,
        }
    }
    row
}
