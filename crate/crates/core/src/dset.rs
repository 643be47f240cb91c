//! Difference sets, their verification, and coset intersection data.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, inv_mod, prime_power};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Subgroup};

/// Full verification keeps one `u32` counter per group element and worker.
pub const FULL_VERIFY_LIMIT: u64 = 1 << 26;

/// `(v, k, λ)` with order `n = k - λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub n: u64,
}

impl Params {
    /// Checks `λ(v - 1) = k(k - 1)`.
    pub fn new(v: u64, k: u64, lambda: u64) -> Result<Self> {
        if k > v || lambda > k || v == 0 {
            return Err(Error::InfeasibleParams(format!("({v}, {k}, {lambda})")));
        }
        let p = Params {
            v,
            k,
            lambda,
            n: k - lambda,
        };
        if !p.satisfies_fundamental_equation() {
            return Err(Error::InfeasibleParams(format!(
                "({v}, {k}, {lambda}): λ(v-1) = {} but k(k-1) = {}",
                lambda as u128 * (v as u128 - 1),
                k as u128 * (k as u128).saturating_sub(1)
            )));
        }
        Ok(p)
    }

    /// The parameters a `k`-subset of a group of order `v` would need.
    pub fn for_size(v: u64, k: u64) -> Result<Self> {
        if v == 1 {
            return Params::new(1, k, k);
        }
        let num = k as u128 * (k as u128).saturating_sub(1);
        let den = v as u128 - 1;
        if !num.is_multiple_of(den) {
            return Err(Error::InfeasibleParams(format!(
                "no integral λ for v = {v}, k = {k}"
            )));
        }
        Params::new(v, k, (num / den) as u64)
    }

    /// `((q^d-1)/(q-1), (q^{d-1}-1)/(q-1), (q^{d-2}-1)/(q-1))`.
    pub fn classical(q: u64, d: u32) -> Result<Self> {
        if prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q));
        }
        if d < 3 {
            return Err(Error::InvalidArgument(format!(
                "dimension d = {d} must be at least 3"
            )));
        }
        let theta = |e: u32| -> Result<u64> {
            let qe = q
                .checked_pow(e)
                .ok_or_else(|| Error::InvalidArgument(format!("{q}^{e} overflows")))?;
            Ok((qe - 1) / (q - 1))
        };
        Params::new(theta(d)?, theta(d - 1)?, theta(d - 2)?)
    }

    /// `λ v = k² - n`, in 128-bit arithmetic.
    pub fn satisfies_fundamental_equation(&self) -> bool {
        let (v, k, l, n) = (
            self.v as u128,
            self.k as u128,
            self.lambda as u128,
            self.n as u128,
        );
        l * v + n == k * k
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.v, self.k, self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetStatus {
    Verified,
    Candidate,
}

/// The group-ring element `D D^(-1)`, indexed by rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingVector {
    pub coefficients: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub v: u64,
    pub k: u64,
    pub identity_coefficient: u64,
    /// The common non-identity coefficient, when there is one.
    pub lambda_observed: Option<u64>,
    /// Number of non-identity elements whose coefficient differs from the
    /// most frequent one.
    pub mismatches: u64,
    pub fundamental_equation: bool,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSet {
    group: AbelianGroup,
    elements: Vec<u64>,
    params: Params,
    status: SetStatus,
}

fn check_elements(group: &AbelianGroup, mut elements: Vec<u64>) -> Result<Vec<u64>> {
    elements.sort_unstable();
    if let Some(&x) = elements.iter().find(|&&x| x >= group.order()) {
        return Err(Error::OutOfRange(format!(
            "element rank {x} not below {}",
            group.order()
        )));
    }
    if elements.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("duplicate elements".into()));
    }
    if elements.is_empty() {
        return Err(Error::InvalidArgument("empty set".into()));
    }
    Ok(elements)
}

impl DifferenceSet {
    /// An unverified set; its parameters are those forced by `v` and `k`.
    pub fn candidate(group: AbelianGroup, elements: Vec<u64>) -> Result<Self> {
        let elements = check_elements(&group, elements)?;
        let params = Params::for_size(group.order(), elements.len() as u64)?;
        Ok(DifferenceSet {
            group,
            elements,
            params,
            status: SetStatus::Candidate,
        })
    }

    /// Builds and fully verifies; fails if the set is not a difference set.
    pub fn verified(group: AbelianGroup, elements: Vec<u64>, workers: usize) -> Result<Self> {
        let mut d = Self::candidate(group, elements)?;
        let report = d.verify(workers)?;
        if !report.verified {
            return Err(Error::ParamsMismatch(format!(
                "set of size {} in {} is not a difference set",
                d.elements.len(),
                d.group
            )));
        }
        d.status = SetStatus::Verified;
        Ok(d)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn status(&self) -> SetStatus {
        self.status
    }

    pub fn is_verified(&self) -> bool {
        self.status == SetStatus::Verified
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Full verification; promotes the set to verified on success.
    pub fn verify(&mut self, workers: usize) -> Result<VerificationReport> {
        let report = verify(&self.group, &self.elements, workers)?;
        if report.verified {
            self.status = SetStatus::Verified;
        }
        Ok(report)
    }

    /// Coordinate sum of the elements (the product of `D` in multiplicative terms).
    pub fn element_sum(&self) -> u64 {
        self.group.sum(&self.elements)
    }

    pub fn is_normalized(&self) -> bool {
        self.element_sum() == 0
    }

    /// The unique translate with element sum zero.
    pub fn normalize(&self) -> Result<Self> {
        let (v, k) = (self.params.v, self.params.k);
        if gcd(v, k) != 1 {
            return Err(Error::NotCoprime { v, k });
        }
        let g = &self.group;
        let total = g.coords(self.element_sum());
        let shift: Vec<u64> = g
            .factors()
            .iter()
            .zip(total)
            .map(|(&d, s)| {
                let kinv = inv_mod(k % d, d).expect("gcd(k, d) = 1");
                ((d - s % d) % d) as u128 * kinv as u128 % d as u128
            })
            .map(|x| x as u64)
            .collect();
        let x = g.rank(&crate::group::GroupElement { coords: shift })?;
        Ok(self.translate(x))
    }

    /// `D + x`.
    pub fn translate(&self, x: u64) -> Self {
        let mut elements: Vec<u64> = self
            .elements
            .iter()
            .map(|&d| self.group.add(d, x))
            .collect();
        elements.sort_unstable();
        DifferenceSet {
            elements,
            ..self.clone()
        }
    }

    /// The numerical-multiplier image `{m d : d in D}`.
    pub fn apply_power_map(&self, m: u64) -> Result<Vec<u64>> {
        if gcd(m, self.params.v) != 1 {
            return Err(Error::NotUnit {
                m,
                v: self.params.v,
            });
        }
        let mut out: Vec<u64> = self
            .elements
            .iter()
            .map(|&d| self.group.scale(d, m))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The image under a unit multiplier as a difference set with the same status.
    pub fn power_image(&self, m: u64) -> Result<Self> {
        let elements = self.apply_power_map(m)?;
        Ok(DifferenceSet {
            elements,
            ..self.clone()
        })
    }

    /// `D^(-1)`.
    pub fn inverse_set(&self) -> Self {
        let mut elements: Vec<u64> = self.elements.iter().map(|&d| self.group.neg(d)).collect();
        elements.sort_unstable();
        DifferenceSet {
            elements,
            ..self.clone()
        }
    }

    pub fn intersection_profile(&self, h: &Subgroup) -> IntersectionProfile {
        let cosets = self.group.cosets(h);
        let mut counts = vec![0u64; cosets.index() as usize];
        for &d in &self.elements {
            counts[cosets.coset_of(d)] += 1;
        }
        let entries: Vec<(u64, u64)> = cosets
            .representatives()
            .iter()
            .copied()
            .zip(counts.iter().copied())
            .collect();
        let sum: u64 = counts.iter().sum();
        let sum_sq: u128 = counts.iter().map(|&s| s as u128 * s as u128).sum();
        let p = self.params;
        IntersectionProfile {
            subgroup_order: h.order(),
            index: cosets.index(),
            sum,
            sum_of_squares: sum_sq,
            sum_ok: sum == p.k,
            sum_of_squares_ok: sum_sq == p.lambda as u128 * h.order() as u128 + p.n as u128,
            entries,
        }
    }

    /// Checks `|s - k/r| <= sqrt(n) (r-1)/r` on every coset, as
    /// `(r s - k)^2 <= n (r-1)^2` in integers.
    pub fn distribution_bound_check(&self, h: &Subgroup) -> DistributionBound {
        let profile = self.intersection_profile(h);
        let r = profile.index as i128;
        let k = self.params.k as i128;
        let rhs = self.params.n as i128 * (r - 1) * (r - 1);
        let mut violations = Vec::new();
        let mut attained = Vec::new();
        for &(rep, s) in &profile.entries {
            let lhs = (r * s as i128 - k).pow(2);
            if lhs > rhs {
                violations.push(rep);
            } else if lhs == rhs && r > 1 {
                attained.push(rep);
            }
        }
        DistributionBound {
            subgroup_order: h.order(),
            index: profile.index,
            ok: violations.is_empty(),
            violations,
            attained,
        }
    }

    /// `D ∩ M`, re-coordinatized into `M`'s invariant-factor presentation.
    pub fn restrict(&self, m: &Subgroup) -> Restriction {
        let pres = m.presentation();
        let parent_elements: Vec<u64> = self
            .elements
            .iter()
            .copied()
            .filter(|&d| m.contains(d))
            .collect();
        let mut local: Vec<u64> = parent_elements
            .iter()
            .map(|&d| pres.to_local(d).expect("element of M"))
            .collect();
        local.sort_unstable();
        Restriction {
            group: pres.group,
            basis: pres.basis,
            parent_elements,
            elements: local,
        }
    }
}

/// Counts every difference `a - b` with `a, b` in `D`.
pub fn difference_function(
    group: &AbelianGroup,
    elements: &[u64],
    workers: usize,
) -> Result<GroupRingVector> {
    let v = group.order();
    if v > FULL_VERIFY_LIMIT {
        return Err(Error::CeilingExceeded {
            what: "group order for full verification",
            size: v as u128,
            ceiling: FULL_VERIFY_LIMIT,
        });
    }
    let workers = workers.max(1).min(elements.len().max(1));
    let chunk = elements.len().div_ceil(workers);
    let count_chunk = |part: &[u64]| -> Vec<u32> {
        let mut counts = vec![0u32; v as usize];
        if group.is_single_factor() {
            for &a in part {
                for &b in elements {
                    let idx = if a >= b { a - b } else { a + v - b };
                    counts[idx as usize] += 1;
                }
            }
        } else {
            let negs: Vec<u64> = elements.iter().map(|&b| group.neg(b)).collect();
            for &a in part {
                for &nb in &negs {
                    counts[group.add(a, nb) as usize] += 1;
                }
            }
        }
        counts
    };
    let mut partials: Vec<Vec<u32>> = if workers == 1 {
        vec![count_chunk(elements)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = elements
                .chunks(chunk)
                .map(|part| scope.spawn(move || count_chunk(part)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let mut total = partials.pop().unwrap_or_else(|| vec![0; v as usize]);
    for part in partials {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    Ok(GroupRingVector {
        coefficients: total,
    })
}

/// Checks `D D^(-1) = λ G + n 1`.
pub fn verify(
    group: &AbelianGroup,
    elements: &[u64],
    workers: usize,
) -> Result<VerificationReport> {
    let v = group.order();
    let k = elements.len() as u64;
    let coeffs = difference_function(group, elements, workers)?.coefficients;
    let identity = coeffs[0] as u64;
    let lambda = if v == 1 {
        Some(k)
    } else {
        // Most frequent non-identity coefficient; ties resolve to the smaller value.
        let mut freq = std::collections::BTreeMap::new();
        for &c in &coeffs[1..] {
            *freq.entry(c as u64).or_insert(0u64) += 1;
        }
        freq.into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c)
    };
    let mismatches = match lambda {
        Some(l) => coeffs[1..].iter().filter(|&&c| c as u64 != l).count() as u64,
        None => 0,
    };
    let lambda_observed = (mismatches == 0).then_some(lambda).flatten();
    let fundamental_equation = lambda_observed
        .map(|l| l as u128 * (v as u128 - 1) == k as u128 * (k as u128 - 1))
        .unwrap_or(false);
    let verified = identity == k && lambda_observed.is_some() && fundamental_equation;
    Ok(VerificationReport {
        v,
        k,
        identity_coefficient: identity,
        lambda_observed,
        mismatches,
        fundamental_equation,
        verified,
    })
}

/// Coefficients of `D D^(-1)` at selected elements only.
pub fn verify_sampled(group: &AbelianGroup, elements: &[u64], targets: &[u64]) -> Vec<(u64, u64)> {
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    targets
        .iter()
        .map(|&t| {
            let c = sorted
                .iter()
                .filter(|&&b| sorted.binary_search(&group.add(b, t)).is_ok())
                .count() as u64;
            (t, c)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionProfile {
    pub subgroup_order: u64,
    pub index: u64,
    /// `(coset representative, |D ∩ coset|)` in representative order.
    pub entries: Vec<(u64, u64)>,
    pub sum: u64,
    pub sum_of_squares: u128,
    /// `Σ s_i = k`.
    pub sum_ok: bool,
    /// `Σ s_i² = λ|H| + n`.
    pub sum_of_squares_ok: bool,
}

impl IntersectionProfile {
    /// Sorted multiset of intersection numbers.
    pub fn multiset(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.entries.iter().map(|&(_, s)| s).collect();
        s.sort_unstable();
        s
    }

    pub fn count_of(&self, rep: u64) -> Option<u64> {
        self.entries
            .iter()
            .find(|&&(r, _)| r == rep)
            .map(|&(_, s)| s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionBound {
    pub subgroup_order: u64,
    pub index: u64,
    pub ok: bool,
    /// Representatives of cosets breaking the bound.
    pub violations: Vec<u64>,
    /// Representatives of cosets meeting the bound with equality.
    pub attained: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    /// `M` in its own presentation.
    pub group: AbelianGroup,
    /// Parent ranks of `M`'s presentation generators.
    pub basis: Vec<u64>,
    /// `D ∩ M` in parent ranks.
    pub parent_elements: Vec<u64>,
    /// `D ∩ M` in `M`'s ranks, sorted.
    pub elements: Vec<u64>,
}

impl Restriction {
    /// The restriction as a candidate difference set in `M`.
    pub fn to_candidate(&self) -> Result<DifferenceSet> {
        DifferenceSet::candidate(self.group.clone(), self.elements.clone())
    }
}
