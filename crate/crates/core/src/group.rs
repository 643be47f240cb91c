//! Finite abelian groups given as direct products of cyclic factors.
//!
//! The group law is written additively: coordinates add modulo their factor.
//! Elements are usually handled through their mixed-radix rank (first factor
//! most significant), which is a bijection onto `[0, v)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::arith::{divisors, factorize, gcd, lcm, valuation};
use crate::error::{Error, Result};

/// Largest group order the crate will materialize element by element.
pub const MATERIALIZE_LIMIT: u64 = 1 << 24;

/// Non-cyclic subgroup enumeration is only offered up to this order.
pub const ENUMERATION_LIMIT: u64 = 100_000;

/// Serialized as its descriptor, e.g. `"Z_3 x Z_5"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct AbelianGroup {
    factors: Vec<u64>,
    order: u64,
    /// Place values of the mixed-radix rank.
    weights: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

impl AbelianGroup {
    /// Direct product `Z_{d1} x ... x Z_{dt}`. The factors need not form an
    /// invariant-factor chain; see [`AbelianGroup::invariant_factors`].
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::InvalidArgument(
                "group factors must be positive".into(),
            ));
        }
        let mut order = 1u64;
        for &d in &factors {
            order = order
                .checked_mul(d)
                .filter(|&o| o <= 1 << 40)
                .ok_or_else(|| Error::InvalidArgument("group order too large".into()))?;
        }
        let mut weights = vec![1u64; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            weights[i] = weights[i + 1] * factors[i + 1];
        }
        Ok(AbelianGroup {
            factors,
            order,
            weights,
        })
    }

    pub fn cyclic(v: u64) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Presented as a single cyclic factor, so ranks are residues.
    pub fn is_single_factor(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &d| lcm(acc, d))
    }

    /// Invariant factors `d1 | d2 | ... | dt`, ascending; `[1]` for the trivial group.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let mut per_prime: Vec<Vec<u64>> = Vec::new();
        let mut primes: BTreeSet<u64> = BTreeSet::new();
        for &d in &self.factors {
            primes.extend(factorize(d).into_iter().map(|(p, _)| p));
        }
        for p in primes {
            let mut parts: Vec<u64> = self
                .factors
                .iter()
                .map(|&d| p.pow(valuation(d, p)))
                .filter(|&x| x > 1)
                .collect();
            parts.sort_unstable_by(|a, b| b.cmp(a));
            per_prime.push(parts);
        }
        let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
        if len == 0 {
            return vec![1];
        }
        let mut out: Vec<u64> = (0..len)
            .map(|t| {
                per_prime
                    .iter()
                    .map(|parts| parts.get(t).copied().unwrap_or(1))
                    .product()
            })
            .collect();
        out.reverse();
        out
    }

    /// Abstractly cyclic (at most one invariant factor).
    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors().len() == 1
    }

    /// Descriptor `Z_{d1} x Z_{d2} x ...`.
    pub fn descriptor(&self) -> String {
        self.factors
            .iter()
            .map(|d| format!("Z_{d}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }

    pub fn rank(&self, x: &GroupElement) -> Result<u64> {
        if x.coords.len() != self.factors.len() {
            return Err(Error::OutOfRange(format!(
                "element has {} coordinates, group has {} factors",
                x.coords.len(),
                self.factors.len()
            )));
        }
        let mut r = 0;
        for ((&c, &d), &w) in x.coords.iter().zip(&self.factors).zip(&self.weights) {
            if c >= d {
                return Err(Error::OutOfRange(format!("coordinate {c} not below {d}")));
            }
            r += c * w;
        }
        Ok(r)
    }

    pub fn unrank(&self, r: u64) -> GroupElement {
        GroupElement {
            coords: self.coords(r),
        }
    }

    pub fn coords(&self, r: u64) -> Vec<u64> {
        self.factors
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| (r / w) % d)
            .collect()
    }

    fn rank_of_coords(&self, coords: &[u64]) -> u64 {
        coords.iter().zip(&self.weights).map(|(&c, &w)| c * w).sum()
    }

    pub fn identity(&self) -> u64 {
        0
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.is_single_factor() {
            let s = a + b;
            return if s >= self.order { s - self.order } else { s };
        }
        let mut r = 0;
        for (&d, &w) in self.factors.iter().zip(&self.weights) {
            let s = ((a / w) % d + (b / w) % d) % d;
            r += s * w;
        }
        r
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.is_single_factor() {
            return (self.order - a) % self.order;
        }
        let mut r = 0;
        for (&d, &w) in self.factors.iter().zip(&self.weights) {
            r += ((d - (a / w) % d) % d) * w;
        }
        r
    }

    /// `m * a`, i.e. the power map `x -> x^m` in multiplicative language.
    pub fn scale(&self, a: u64, m: u64) -> u64 {
        let mut r = 0;
        for (&d, &w) in self.factors.iter().zip(&self.weights) {
            let c = (a / w) % d;
            r += ((c as u128 * m as u128) % d as u128) as u64 * w;
        }
        r
    }

    pub fn element_order(&self, a: u64) -> u64 {
        self.factors
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| d / gcd((a / w) % d, d))
            .fold(1, lcm)
    }

    /// Coordinatewise sum of a list of ranks.
    pub fn sum(&self, elements: &[u64]) -> u64 {
        elements.iter().fold(0, |acc, &x| self.add(acc, x))
    }

    /// `{x : m x = 0}`; for `m = 0` the whole group.
    pub fn torsion_subgroup(&self, m: u64) -> Subgroup {
        let steps: Vec<(u64, u64)> = self
            .factors
            .iter()
            .map(|&d| {
                let size = gcd(m, d);
                (d / size, size)
            })
            .collect();
        self.product_subgroup(&steps)
    }

    /// Subgroup that is a product of cyclic pieces `<step_i>` of the given sizes.
    fn product_subgroup(&self, steps: &[(u64, u64)]) -> Subgroup {
        let total: u64 = steps.iter().map(|&(_, size)| size).product();
        let mut elements = Vec::with_capacity(total as usize);
        let mut counter = vec![0u64; steps.len()];
        for _ in 0..total {
            let coords: Vec<u64> = counter
                .iter()
                .zip(steps)
                .map(|(&c, &(step, _))| c * step)
                .collect();
            elements.push(self.rank_of_coords(&coords));
            for i in (0..steps.len()).rev() {
                counter[i] += 1;
                if counter[i] < steps[i].1 {
                    break;
                }
                counter[i] = 0;
            }
        }
        elements.sort_unstable();
        Subgroup {
            parent: self.clone(),
            elements,
        }
    }

    /// Smallest subgroup containing the given elements.
    pub fn subgroup_generated(&self, gens: &[u64]) -> Subgroup {
        let mut seen = BTreeSet::from([0u64]);
        let mut stack = vec![0u64];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        Subgroup {
            parent: self.clone(),
            elements: seen.into_iter().collect(),
        }
    }

    /// All subgroups of order `m`, sorted by element list.
    pub fn subgroups_of_order(&self, m: u64) -> Result<Vec<Subgroup>> {
        if m == 0 || !self.order.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n: self.order });
        }
        if self.is_cyclic() {
            return Ok(vec![self.torsion_subgroup(m)]);
        }
        if self.order > ENUMERATION_LIMIT {
            return Err(Error::CeilingExceeded {
                what: "non-cyclic subgroup enumeration order",
                size: self.order as u128,
                ceiling: ENUMERATION_LIMIT,
            });
        }
        // Subgroups split over the Sylow subgroups; enumerate p-parts level by level.
        let mut per_prime: Vec<Vec<Vec<u64>>> = Vec::new();
        for (p, b) in factorize(m) {
            let sylow = self.sylow(p).subgroup.elements;
            let mut level: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0u64]]);
            for _ in 0..b {
                let mut next = BTreeSet::new();
                for h in &level {
                    for &x in &sylow {
                        if h.binary_search(&x).is_ok()
                            || h.binary_search(&self.scale(x, p)).is_err()
                        {
                            continue;
                        }
                        let mut ext: Vec<u64> = Vec::with_capacity(h.len() * p as usize);
                        let mut shift = 0u64;
                        for _ in 0..p {
                            ext.extend(h.iter().map(|&y| self.add(y, shift)));
                            shift = self.add(shift, x);
                        }
                        ext.sort_unstable();
                        next.insert(ext);
                    }
                }
                level = next;
            }
            per_prime.push(level.into_iter().collect());
        }
        let mut combined: Vec<Vec<u64>> = vec![vec![0]];
        for parts in per_prime {
            let mut next = Vec::new();
            for acc in &combined {
                for part in &parts {
                    let mut els: Vec<u64> = acc
                        .iter()
                        .flat_map(|&a| part.iter().map(move |&b| (a, b)))
                        .map(|(a, b)| self.add(a, b))
                        .collect();
                    els.sort_unstable();
                    next.push(els);
                }
            }
            combined = next;
        }
        combined.sort();
        Ok(combined
            .into_iter()
            .map(|elements| Subgroup {
                parent: self.clone(),
                elements,
            })
            .collect())
    }

    /// The unique subgroup of order `m`, if there is exactly one.
    pub fn unique_subgroup_of_order(&self, m: u64) -> Result<Option<Subgroup>> {
        let mut subs = self.subgroups_of_order(m)?;
        Ok(if subs.len() == 1 { subs.pop() } else { None })
    }

    /// Coset decomposition with minimal-rank representatives, ascending.
    pub fn cosets(&self, h: &Subgroup) -> CosetDecomposition {
        let m = h.order();
        if self.is_single_factor() {
            let step = self.order / m;
            return CosetDecomposition {
                subgroup: h.clone(),
                representatives: (0..step).collect(),
                index: CosetIndex::Modulo(step),
            };
        }
        let mut table = vec![u32::MAX; self.order as usize];
        let mut reps = Vec::with_capacity((self.order / m) as usize);
        for x in 0..self.order {
            if table[x as usize] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(x);
            for &y in &h.elements {
                table[self.add(x, y) as usize] = idx;
            }
        }
        CosetDecomposition {
            subgroup: h.clone(),
            representatives: reps,
            index: CosetIndex::Table(table),
        }
    }

    /// Least `e >= 1` with `e x` in `u` for every `x`.
    pub fn quotient_exponent(&self, u: &Subgroup) -> u64 {
        let exp = self.exponent();
        let unit_vectors: Vec<u64> = self.weights.clone();
        divisors(exp)
            .into_iter()
            .find(|&e| unit_vectors.iter().all(|&b| u.contains(self.scale(b, e))))
            .unwrap_or(exp)
    }

    /// The Sylow `p`-subgroup, whether it is cyclic, and a generator when it is.
    pub fn sylow(&self, p: u64) -> Sylow {
        let steps: Vec<(u64, u64)> = self
            .factors
            .iter()
            .map(|&d| {
                let size = p.pow(valuation(d, p));
                (d / size, size)
            })
            .collect();
        let nontrivial: Vec<usize> = (0..steps.len()).filter(|&i| steps[i].1 > 1).collect();
        let cyclic = nontrivial.len() <= 1;
        let generator = cyclic.then(|| {
            nontrivial
                .first()
                .map_or(0, |&i| steps[i].0 * self.weights[i])
        });
        Sylow {
            subgroup: self.product_subgroup(&steps),
            cyclic,
            generator,
        }
    }

    /// Fixed points of `x -> m x`: `{x : (m - 1) x = 0}`.
    pub fn fixed_subgroup(&self, m: u64) -> Result<Subgroup> {
        if gcd(m, self.order) != 1 {
            return Err(Error::NotUnit { m, v: self.order });
        }
        Ok(self.torsion_subgroup(m - 1))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl From<AbelianGroup> for String {
    fn from(g: AbelianGroup) -> String {
        g.descriptor()
    }
}

impl TryFrom<String> for AbelianGroup {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;

    /// Parses `Z_3 x Z_15`, `Z_3xZ_15`, `Z_{3} x Z_{15}` or `Z15`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse {
            line: 1,
            column: 1,
            message: msg,
        };
        let mut factors = Vec::new();
        for part in s.split(['x', '×']) {
            let t = part.trim();
            let body = t
                .strip_prefix('Z')
                .ok_or_else(|| bad(format!("expected Z_<d>, found {t:?}")))?;
            let body = body.strip_prefix('_').unwrap_or(body);
            let body = body.trim_start_matches('{').trim_end_matches('}');
            let d: u64 = body
                .parse()
                .map_err(|_| bad(format!("bad cyclic factor {t:?}")))?;
            factors.push(d);
        }
        AbelianGroup::new(factors)
    }
}

/// A subgroup as the sorted list of its element ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent: AbelianGroup,
    elements: Vec<u64>,
}

impl Subgroup {
    pub fn parent(&self) -> &AbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// Re-coordinatizes the subgroup into its own invariant-factor presentation.
    pub fn presentation(&self) -> Presentation {
        let g = &self.parent;
        let order = self.order();
        if order == 1 {
            return Presentation {
                group: AbelianGroup::cyclic(1).expect("trivial group"),
                basis: vec![0],
                lookup: vec![(0, 0)],
            };
        }
        // Greedy basis: repeatedly adjoin an element of maximal order modulo the
        // current span, corrected so its order equals its order in the quotient.
        let exp = self
            .elements
            .iter()
            .map(|&x| g.element_order(x))
            .fold(1, lcm);
        let exp_divisors = divisors(exp);
        let mut local: Vec<(u64, u64)> = vec![(0, 0)]; // (parent rank, local index), sorted
        let mut basis: Vec<(u64, u64)> = Vec::new(); // (parent rank, order)
        let in_span = |local: &[(u64, u64)], x: u64| -> Option<u64> {
            local
                .binary_search_by_key(&x, |&(r, _)| r)
                .ok()
                .map(|i| local[i].1)
        };
        while (local.len() as u64) < order {
            let mut best = (0u64, 0u64);
            for &x in &self.elements {
                let mu = exp_divisors
                    .iter()
                    .copied()
                    .find(|&e| in_span(&local, g.scale(x, e)).is_some())
                    .unwrap_or(exp);
                if mu > best.1 {
                    best = (x, mu);
                }
            }
            let (x, mu) = best;
            let idx = in_span(&local, g.scale(x, mu)).expect("mu x lies in the span");
            let mut corrected = x;
            let mut rem = idx;
            for &(b, e) in &basis {
                let c = rem % e;
                rem /= e;
                debug_assert_eq!(c % mu, 0);
                corrected = g.sub(corrected, g.scale(b, c / mu));
            }
            let weight: u64 = basis.iter().map(|&(_, e)| e).product();
            let mut next = Vec::with_capacity(local.len() * mu as usize);
            let mut shift = 0u64;
            for c in 0..mu {
                next.extend(
                    local
                        .iter()
                        .map(|&(r, i)| (g.add(r, shift), i + c * weight)),
                );
                shift = g.add(shift, corrected);
            }
            next.sort_unstable();
            local = next;
            basis.push((corrected, mu));
        }
        let factors: Vec<u64> = basis.iter().rev().map(|&(_, e)| e).collect();
        Presentation {
            group: AbelianGroup::new(factors).expect("valid factors"),
            basis: basis.iter().rev().map(|&(b, _)| b).collect(),
            lookup: local,
        }
    }
}

/// An isomorphism from a subgroup onto its invariant-factor presentation.
#[derive(Clone, Debug)]
pub struct Presentation {
    /// The subgroup as a group in its own right.
    pub group: AbelianGroup,
    /// Parent ranks of the images of the presentation's unit vectors.
    pub basis: Vec<u64>,
    lookup: Vec<(u64, u64)>,
}

impl Presentation {
    /// Local rank of a parent element, if it lies in the subgroup.
    pub fn to_local(&self, parent_rank: u64) -> Option<u64> {
        self.lookup
            .binary_search_by_key(&parent_rank, |&(r, _)| r)
            .ok()
            .map(|i| self.lookup[i].1)
    }
}

#[derive(Clone, Debug)]
pub struct Sylow {
    pub subgroup: Subgroup,
    pub cyclic: bool,
    pub generator: Option<u64>,
}

#[derive(Clone, Debug)]
enum CosetIndex {
    Modulo(u64),
    Table(Vec<u32>),
}

#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    subgroup: Subgroup,
    representatives: Vec<u64>,
    index: CosetIndex,
}

impl CosetDecomposition {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn representatives(&self) -> &[u64] {
        &self.representatives
    }

    /// Number of cosets.
    pub fn index(&self) -> u64 {
        self.representatives.len() as u64
    }

    /// Position (in `representatives`) of the coset containing `x`.
    pub fn coset_of(&self, x: u64) -> usize {
        match &self.index {
            CosetIndex::Modulo(step) => (x % step) as usize,
            CosetIndex::Table(t) => t[x as usize] as usize,
        }
    }

    /// Elements of the coset with the given position.
    pub fn coset_elements(&self, i: usize) -> Vec<u64> {
        let g = self.subgroup.parent();
        let rep = self.representatives[i];
        let mut out: Vec<u64> = self
            .subgroup
            .elements
            .iter()
            .map(|&h| g.add(rep, h))
            .collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: u64) -> AbelianGroup {
        AbelianGroup::cyclic(v).unwrap()
    }

    /// Brute force: subsets closed under addition, found by generating from pairs.
    fn brute_subgroups(g: &AbelianGroup, m: u64) -> BTreeSet<Vec<u64>> {
        let mut out = BTreeSet::new();
        for a in 0..g.order() {
            for b in 0..g.order() {
                let s = g.subgroup_generated(&[a, b]);
                if s.order() == m {
                    out.insert(s.elements().to_vec());
                }
            }
        }
        out
    }

    #[test]
    fn ranks() {
        let g = AbelianGroup::new(vec![3, 15]).unwrap();
        assert_eq!(g.rank(&GroupElement { coords: vec![1, 4] }).unwrap(), 19);
        assert_eq!(g.rank(&GroupElement { coords: vec![0, 0] }).unwrap(), 0);
        assert_eq!(g.unrank(19).coords, vec![1, 4]);
        assert!(g.rank(&GroupElement { coords: vec![3, 0] }).is_err());
        assert_eq!(z(15).rank(&GroupElement { coords: vec![7] }).unwrap(), 7);
    }

    #[test]
    fn descriptor_round_trip() {
        let g: AbelianGroup = "Z_3 x Z_15".parse().unwrap();
        assert_eq!(g.factors(), &[3, 15]);
        assert_eq!(g.descriptor(), "Z_3 x Z_15");
        assert_eq!(
            "Z_{3}xZ_{5}".parse::<AbelianGroup>().unwrap().factors(),
            &[3, 5]
        );
        assert!("Q_3".parse::<AbelianGroup>().is_err());
    }

    #[test]
    fn invariant_factor_form() {
        assert_eq!(
            AbelianGroup::new(vec![3, 5]).unwrap().invariant_factors(),
            vec![15]
        );
        assert_eq!(
            AbelianGroup::new(vec![2, 4]).unwrap().invariant_factors(),
            vec![2, 4]
        );
        assert_eq!(
            AbelianGroup::new(vec![6, 4]).unwrap().invariant_factors(),
            vec![2, 12]
        );
        assert_eq!(z(1).invariant_factors(), vec![1]);
        assert!(AbelianGroup::new(vec![3, 5]).unwrap().is_cyclic());
        assert!(!AbelianGroup::new(vec![3, 3]).unwrap().is_cyclic());
    }

    #[test]
    fn cyclic_subgroups() {
        let subs = z(15).subgroups_of_order(5).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].elements(), &[0, 3, 6, 9, 12]);
        let whole = z(15).subgroups_of_order(15).unwrap();
        assert_eq!(whole[0].order(), 15);
        assert!(matches!(
            z(15).subgroups_of_order(4),
            Err(Error::NotDivisor { .. })
        ));
        for d in divisors(60) {
            assert_eq!(z(60).subgroups_of_order(d).unwrap().len(), 1);
        }
    }

    #[test]
    fn noncyclic_subgroup_enumeration_matches_brute_force() {
        let g = AbelianGroup::new(vec![3, 3]).unwrap();
        assert_eq!(g.subgroups_of_order(3).unwrap().len(), 4);
        for factors in [
            vec![3, 3],
            vec![2, 4],
            vec![2, 2, 2],
            vec![2, 6],
            vec![4, 4],
        ] {
            let g = AbelianGroup::new(factors).unwrap();
            for m in divisors(g.order()) {
                let ours: BTreeSet<Vec<u64>> = g
                    .subgroups_of_order(m)
                    .unwrap()
                    .into_iter()
                    .map(|s| s.elements().to_vec())
                    .collect();
                // Every group here has rank at most 3, but order-m subgroups need at
                // most 2 generators except the whole of Z_2^3.
                if g.factors() == [2, 2, 2] && m == 8 {
                    assert_eq!(ours.len(), 1);
                    continue;
                }
                assert_eq!(ours, brute_subgroups(&g, m), "{g} order {m}");
            }
        }
    }

    #[test]
    fn coset_representatives() {
        let g = z(15);
        let h = g.subgroups_of_order(5).unwrap().remove(0);
        let c = g.cosets(&h);
        assert_eq!(c.representatives(), &[0, 1, 2]);
        let h3 = g.subgroups_of_order(3).unwrap().remove(0);
        assert_eq!(g.cosets(&h3).index(), 5);
        let whole = g.subgroups_of_order(15).unwrap().remove(0);
        assert_eq!(g.cosets(&whole).representatives(), &[0]);
        // Table path agrees with the minimal-rank rule.
        let g2 = AbelianGroup::new(vec![3, 5]).unwrap();
        let h2 = g2.subgroups_of_order(5).unwrap().remove(0);
        let c2 = g2.cosets(&h2);
        assert_eq!(c2.representatives(), &[0, 5, 10]);
        let mut seen = [0u32; 15];
        for i in 0..c2.representatives().len() {
            for x in c2.coset_elements(i) {
                assert_eq!(c2.coset_of(x), i);
                seen[x as usize] += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
    }

    #[test]
    fn quotient_exponents() {
        let g = z(40);
        let u = g.subgroups_of_order(10).unwrap().remove(0);
        assert_eq!(g.quotient_exponent(&u), 4);
        let whole = g.subgroups_of_order(40).unwrap().remove(0);
        assert_eq!(g.quotient_exponent(&whole), 1);
        let g15 = z(15);
        assert_eq!(
            g15.quotient_exponent(&g15.subgroups_of_order(5).unwrap()[0]),
            3
        );
        let g33 = AbelianGroup::new(vec![3, 9]).unwrap();
        let trivial = g33.subgroups_of_order(1).unwrap().remove(0);
        assert_eq!(g33.quotient_exponent(&trivial), 9);
    }

    #[test]
    fn sylow_subgroups() {
        let s = z(15).sylow(2);
        assert_eq!(s.subgroup.order(), 1);
        assert!(s.cyclic);
        let s = z(40).sylow(2);
        assert_eq!(s.subgroup.elements(), &[0, 5, 10, 15, 20, 25, 30, 35]);
        assert!(s.cyclic);
        assert_eq!(s.generator, Some(5));
        let s = AbelianGroup::new(vec![2, 4]).unwrap().sylow(2);
        assert_eq!(s.subgroup.order(), 8);
        assert!(!s.cyclic);
        assert_eq!(s.generator, None);
    }

    #[test]
    fn fixed_subgroups() {
        assert_eq!(z(15).fixed_subgroup(1).unwrap().order(), 15);
        assert_eq!(z(585).fixed_subgroup(16).unwrap().order(), 15);
        assert_eq!(z(15).fixed_subgroup(2).unwrap().elements(), &[0]);
        assert!(matches!(
            z(15).fixed_subgroup(3),
            Err(Error::NotUnit { .. })
        ));
        let g = AbelianGroup::new(vec![4, 12]).unwrap();
        let f = g.fixed_subgroup(7).unwrap();
        assert_eq!(f.order(), gcd(6, 4) * gcd(6, 12));
        for &a in f.elements() {
            for &b in f.elements() {
                assert!(f.contains(g.add(a, b)));
            }
            assert_eq!(g.scale(a, 7), a);
        }
    }

    #[test]
    fn presentations_are_isomorphisms() {
        for (factors, m) in [
            (vec![15], 15u64),
            (vec![585], 15),
            (vec![3, 5], 15),
            (vec![4, 12], 16),
            (vec![3, 9], 9),
            (vec![2, 2, 4], 8),
        ] {
            let g = AbelianGroup::new(factors).unwrap();
            for sub in g.subgroups_of_order(m).unwrap() {
                let pres = sub.presentation();
                assert_eq!(pres.group.order(), m);
                assert_eq!(
                    pres.group.factors(),
                    pres.group.invariant_factors().as_slice()
                );
                let mut hit = vec![false; m as usize];
                for &x in sub.elements() {
                    let lx = pres.to_local(x).unwrap();
                    hit[lx as usize] = true;
                    for &y in sub.elements() {
                        let ly = pres.to_local(y).unwrap();
                        assert_eq!(pres.to_local(g.add(x, y)).unwrap(), pres.group.add(lx, ly));
                    }
                }
                assert!(hit.iter().all(|&h| h));
            }
        }
    }

    #[test]
    fn element_orders_and_arith() {
        let g = AbelianGroup::new(vec![3, 5]).unwrap();
        assert_eq!(
            g.element_order(g.rank(&GroupElement { coords: vec![1, 1] }).unwrap()),
            15
        );
        assert_eq!(g.element_order(0), 1);
        for a in 0..15 {
            assert_eq!(g.add(a, g.neg(a)), 0);
            assert_eq!(g.scale(a, 15), 0);
        }
    }
}
