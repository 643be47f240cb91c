//! Numerical multipliers, the Mann test, and one checker per structural
//! theorem about classical-parameter difference sets.
//!
//! Every checker evaluates its hypotheses first and returns without
//! conclusions when one fails, so a failed hypothesis never reads as a
//! refutation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{
    gcd, inv_mod, is_prime, multiplicative_order, pow_mod, prime_divisors, prime_power, valuation,
};
use crate::dset::{DifferenceSet, Params};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupElement, Subgroup, MATERIALIZE_LIMIT};
use crate::report::{set_string, TheoremReport};
use crate::resources::Resources;
use crate::singer::verifies_as;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub m: u64,
    pub is_multiplier: bool,
    /// `g` with `m D = D + g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<u64>,
    /// `m D = D` exactly.
    pub fixes_setwise: bool,
}

/// Solves `k x = y`, coordinate by coordinate, when `k` is a unit on every factor.
fn divide_by(g: &AbelianGroup, y: u64, k: u64) -> Option<u64> {
    let coords = g
        .factors()
        .iter()
        .zip(g.coords(y))
        .map(|(&d, c)| inv_mod(k % d, d).map(|kinv| (c as u128 * kinv as u128 % d as u128) as u64))
        .collect::<Option<Vec<u64>>>()?;
    g.rank(&GroupElement { coords }).ok()
}

/// Whether `x ↦ m x` maps `D` onto a translate of itself.
pub fn is_multiplier(d: &DifferenceSet, m: u64) -> Result<MultiplierReport> {
    let image = d.apply_power_map(m)?;
    let g = d.group();
    let k = d.params().k;
    let matches = |t: u64| d.translate(t).elements() == image.as_slice();
    let translate = if gcd(k, g.order()) == 1 {
        // Summing m D = D + t gives k t = Σ mD - Σ D.
        divide_by(g, g.sub(g.sum(&image), d.element_sum()), k).filter(|&t| matches(t))
    } else {
        d.elements()
            .iter()
            .map(|&x| g.sub(image[0], x))
            .find(|&t| matches(t))
    };
    Ok(MultiplierReport {
        m,
        is_multiplier: translate.is_some(),
        translate,
        fixes_setwise: image.as_slice() == d.elements(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    pub m: u64,
    /// Each orbit starts at its least rank and follows `x ↦ m x`.
    pub orbits: Vec<Vec<u64>>,
    pub length_histogram: BTreeMap<u64, u64>,
}

fn check_unit(g: &AbelianGroup, m: u64) -> Result<()> {
    if gcd(m, g.order()) != 1 {
        return Err(Error::NotUnit { m, v: g.order() });
    }
    Ok(())
}

fn guard_materialize(g: &AbelianGroup) -> Result<()> {
    if g.order() > MATERIALIZE_LIMIT {
        return Err(Error::CeilingExceeded {
            what: "group order",
            size: g.order() as u128,
            ceiling: MATERIALIZE_LIMIT,
        });
    }
    Ok(())
}

/// Orbits of `x ↦ m x`, ordered by least element.
pub fn multiplier_orbits(g: &AbelianGroup, m: u64) -> Result<OrbitDecomposition> {
    check_unit(g, m)?;
    guard_materialize(g)?;
    let mut seen = vec![false; g.order() as usize];
    let mut orbits = Vec::new();
    let mut length_histogram = BTreeMap::new();
    for x in 0..g.order() {
        if seen[x as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut y = x;
        while !seen[y as usize] {
            seen[y as usize] = true;
            orbit.push(y);
            y = g.scale(y, m);
        }
        *length_histogram.entry(orbit.len() as u64).or_insert(0) += 1;
        orbits.push(orbit);
    }
    Ok(OrbitDecomposition {
        m,
        orbits,
        length_histogram,
    })
}

/// Orbit-length histogram of `x ↦ m x` without storing the orbits.
pub fn orbit_length_histogram(g: &AbelianGroup, m: u64) -> Result<BTreeMap<u64, u64>> {
    check_unit(g, m)?;
    guard_materialize(g)?;
    let mut seen = vec![false; g.order() as usize];
    let mut hist = BTreeMap::new();
    for x in 0..g.order() {
        let mut len = 0;
        let mut y = x;
        while !seen[y as usize] {
            seen[y as usize] = true;
            len += 1;
            y = g.scale(y, m);
        }
        if len > 0 {
            *hist.entry(len).or_insert(0) += 1;
        }
    }
    Ok(hist)
}

fn histogram_string(h: &BTreeMap<u64, u64>) -> String {
    let parts: Vec<String> = h
        .iter()
        .map(|(len, count)| format!("{len}:{count}"))
        .collect();
    parts.join(" ")
}

fn input_tag(d: &DifferenceSet) -> &'static str {
    if d.is_verified() {
        "verified"
    } else {
        "candidate"
    }
}

fn base_report(id: &str, d: &DifferenceSet) -> TheoremReport {
    let p = d.params();
    let mut r = TheoremReport::new(id)
        .with("v", p.v)
        .with("k", p.k)
        .with("lambda", p.lambda)
        .with("input", input_tag(d));
    if !d.group().is_single_factor() {
        r.set("group", d.group().descriptor());
    }
    r
}

/// Hall's multiplier theorem on one instance.
pub fn hall_check(d: &DifferenceSet) -> Result<TheoremReport> {
    let params = d.params();
    let mut r = base_report("hall", d);
    r.set("n", params.n);
    let Some((p, _)) = prime_power(params.n) else {
        r.hypothesis("n is a prime power", false);
        return Ok(r);
    };
    r.set("p", p);
    r.hypothesis("n is a prime power", true);
    if !r.hypothesis("gcd(p, v) = 1", gcd(p, params.v) == 1) {
        return Ok(r);
    }
    let mult = is_multiplier(d, p)?;
    r.conclusion(
        "x ↦ p x is a multiplier",
        mult.is_multiplier,
        mult.translate.map(|t| format!("translate {t}")),
    );
    if gcd(params.v, params.k) == 1 {
        let normalized = d.normalize()?;
        let fixed = is_multiplier(&normalized, p)?.fixes_setwise;
        r.conclusion("x ↦ p x fixes the normalized translate", fixed, None);
    } else {
        r.note("gcd(v, k) > 1: no normalized translate to test");
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MannWitness {
    pub subgroup_order: u64,
    pub u_star: u64,
    pub p: u64,
    pub f: u64,
    pub j: u32,
    pub n_prime: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MannReport {
    pub subgroup_order: u64,
    pub u_star: u64,
    pub n: u64,
    /// `None` when no prime divisor of `n` qualifies.
    pub witness: Option<MannWitness>,
    /// Sorted intersection numbers relative to `U`.
    pub intersections: Vec<u64>,
    /// The exponent of `p` in `n` is even.
    pub even_exponent: bool,
    /// All intersection numbers agree modulo `p^j`.
    pub congruent: bool,
    /// `p^j <= |U|`.
    pub bound_ok: bool,
    /// `u* = 1`: every prime qualifies vacuously.
    pub degenerate: bool,
}

/// Searches primes `p | n` in increasing order for one with `p ∤ u*` and
/// `-1 ∈ <p> mod u*`, then checks the test's conclusions for it.
pub fn mann_test(d: &DifferenceSet, u: &Subgroup) -> Result<MannReport> {
    let g = d.group();
    let n = d.params().n;
    let u_star = g.quotient_exponent(u);
    let intersections = d.intersection_profile(u).multiset();
    let mut report = MannReport {
        subgroup_order: u.order(),
        u_star,
        n,
        witness: None,
        intersections,
        even_exponent: false,
        congruent: false,
        bound_ok: false,
        degenerate: u_star == 1,
    };
    let found = prime_divisors(n)
        .into_iter()
        .filter(|&p| gcd(p, u_star) == 1)
        .find_map(|p| {
            if u_star == 1 {
                return Some((p, 1));
            }
            let ord = multiplicative_order(p % u_star, u_star);
            (1..=ord)
                .find(|&f| pow_mod(p, f, u_star) == u_star - 1)
                .map(|f| (p, f))
        });
    let Some((p, f)) = found else {
        return Ok(report);
    };
    let e = valuation(n, p);
    let j = e / 2;
    let pj = p.pow(j);
    let n_prime = n / pj / pj;
    report.even_exponent = e.is_multiple_of(2);
    let first = report.intersections.first().copied().unwrap_or(0) % pj;
    report.congruent = report.intersections.iter().all(|&s| s % pj == first);
    report.bound_ok = pj <= u.order();
    report.witness = Some(MannWitness {
        subgroup_order: u.order(),
        u_star,
        p,
        f,
        j,
        n_prime,
    });
    Ok(report)
}

impl MannReport {
    pub fn to_theorem_report(&self, d: &DifferenceSet) -> TheoremReport {
        let mut r = base_report("mann", d);
        r.set("subgroup_order", self.subgroup_order);
        r.set("u_star", self.u_star);
        r.set("n", self.n);
        r.set("intersections", set_string(&self.intersections));
        let Some(w) = &self.witness else {
            r.hypothesis("prime p | n with p ∤ u* and p^f ≡ -1 (mod u*)", false);
            r.note("no applicable prime");
            return r;
        };
        r.set("p", w.p);
        r.set("f", w.f);
        r.set("j", w.j);
        r.set("n_prime", w.n_prime);
        r.hypothesis("prime p | n with p ∤ u* and p^f ≡ -1 (mod u*)", true);
        if self.degenerate {
            r.note("u* = 1: the evenness of the exponent of p in n is not asserted");
        } else {
            r.conclusion("n = p^{2j} n' with p ∤ n'", self.even_exponent, None);
        }
        r.conclusion(
            "intersection numbers congruent mod p^j",
            self.congruent,
            None,
        );
        r.conclusion("p^j <= |U|", self.bound_ok, None);
        r
    }
}

fn tower_params(q: u64, s: u32) -> Result<Params> {
    let big_q = q
        .checked_pow(s)
        .ok_or_else(|| Error::InvalidArgument(format!("{q}^{s} overflows")))?;
    Params::classical(big_q, 4)
}

fn require_params(d: &DifferenceSet, target: Params) -> Result<()> {
    if d.params() != target {
        return Err(Error::ParamsMismatch(format!(
            "expected {target}, set has {}",
            d.params()
        )));
    }
    Ok(())
}

/// Intersection numbers of `D` with the coset containing `x` and with all others.
fn coset_split(d: &DifferenceSet, h: &Subgroup, x: u64) -> (u64, Vec<u64>) {
    let cosets = d.group().cosets(h);
    let mut counts = vec![0u64; cosets.index() as usize];
    for &e in d.elements() {
        counts[cosets.coset_of(e)] += 1;
    }
    let i = cosets.coset_of(x);
    let here = counts[i];
    counts.remove(i);
    (here, counts)
}

fn subgroup_or_fail(
    r: &mut TheoremReport,
    g: &AbelianGroup,
    order: u64,
    label: &str,
) -> Result<Option<Subgroup>> {
    let subs = if g.order().is_multiple_of(order) {
        g.subgroups_of_order(order)?
    } else {
        Vec::new()
    };
    r.conclusion(
        format!("{label} is the unique subgroup of order {order}"),
        subs.len() == 1,
        Some(format!("{} subgroup(s)", subs.len())),
    );
    Ok(subs.into_iter().next())
}

/// Coset structure relative to the subgroups of order `q^s+1` and the Sylow 2-subgroup.
pub fn check_thm_classical_profile(d: &DifferenceSet, q: u64, s: u32) -> Result<TheoremReport> {
    let target = tower_params(q, s)?;
    require_params(d, target)?;
    let mut r = base_report("thm2.2", d).with("q", q).with("s", s);
    if !r.hypothesis("D normalized", d.is_normalized()) {
        return Ok(r);
    }
    let g = d.group();
    let big_q = q.pow(s);
    let Some(h) = subgroup_or_fail(&mut r, g, big_q + 1, "H")? else {
        return Ok(r);
    };
    let syl = g.sylow(2);
    r.conclusion(
        "Syl_2(G) cyclic",
        syl.cyclic,
        syl.generator.map(|z| format!("z = {z}")),
    );
    if q % 2 == 1 {
        let Some(z) = syl.generator else {
            return Ok(r);
        };
        let (inside, others) = coset_split(d, &h, z);
        r.conclusion(
            "H + z ⊆ D",
            inside == h.order(),
            Some(format!("|D ∩ (H + z)| = {inside}")),
        );
        r.conclusion(
            "|D ∩ (H + x)| = 1 on every other coset",
            others.iter().all(|&c| c == 1),
            None,
        );
    } else {
        let (inside, others) = coset_split(d, &h, 0);
        r.conclusion(
            "H ⊆ D",
            inside == h.order(),
            Some(format!("H = {}", set_string(h.elements()))),
        );
        r.conclusion(
            "|D ∩ (H + x)| = 1 on every other coset",
            others.iter().all(|&c| c == 1),
            None,
        );
    }
    Ok(r)
}

/// Primes `r | b c` whose Sylow subgroup is not cyclic, with `b = gcd(q+1, s)`,
/// `c = gcd(q²+1, s)`.
fn side_condition_failures(g: &AbelianGroup, q: u64, s: u32) -> (u64, u64, Vec<u64>) {
    let b = gcd(q + 1, s as u64);
    let c = gcd(q * q + 1, s as u64);
    let bad = prime_divisors(b * c)
        .into_iter()
        .filter(|&p| !g.sylow(p).cyclic)
        .collect();
    (b, c, bad)
}

/// The subgroup of order `(q+1)(q²+1)` against the fixed points of `x ↦ q⁴ x`.
pub fn check_lemma_mfix(g: &AbelianGroup, q: u64, s: u32) -> Result<TheoremReport> {
    let target = tower_params(q, s)?;
    let mut r = TheoremReport::new("lem4.1")
        .with("q", q)
        .with("s", s)
        .with("v", g.order());
    if !g.is_single_factor() {
        r.set("group", g.descriptor());
    }
    let h1 = r.hypothesis("|G| = (q^s+1)(q^{2s}+1)", g.order() == target.v);
    let h2 = r.hypothesis("s odd", s % 2 == 1);
    if !(h1 && h2) {
        return Ok(r);
    }
    let m_order = (q + 1) * (q * q + 1);
    let subs = g.subgroups_of_order(m_order)?;
    if subs.is_empty() {
        return Err(Error::NoSubgroup(m_order));
    }
    let tau = pow_mod(q, 4, g.order());
    let fixed = g.fixed_subgroup(tau)?;
    r.set("fixed_order", fixed.order());
    let (b, c, bad) = side_condition_failures(g, q, s);
    r.set("b", b);
    r.set("c", c);
    r.set("side_conditions", bad.is_empty());
    for m in &subs {
        r.conclusion(
            "M ≤ G^τ",
            m.is_subgroup_of(&fixed),
            Some(format!("|M| = {}", m.order())),
        );
        if bad.is_empty() {
            r.conclusion(
                "M = G^τ",
                m.is_subgroup_of(&fixed) && m.order() == fixed.order(),
                None,
            );
        }
    }
    if !bad.is_empty() {
        r.note(format!(
            "Sylow subgroups not cyclic for primes {}: equality not asserted",
            set_string(&bad)
        ));
    }
    Ok(r)
}

/// `|D ∩ M| = q²+q+1` for the subgroup `M` of order `(q+1)(q²+1)`.
pub fn check_lemma_size(d: &DifferenceSet, q: u64, s: u32) -> Result<TheoremReport> {
    let target = tower_params(q, s)?;
    let g = d.group();
    let mut r = base_report("lem4.2", d).with("q", q).with("s", s);
    let (b, c, bad) = side_condition_failures(g, q, s);
    r.set("b", b);
    r.set("c", c);
    r.note("c is taken as gcd(q²+1, s); the statement as printed reads gcd(q²+1, c)");
    let hyps = [
        r.hypothesis(
            "parameters are classical over GF(q^s) with d = 4",
            d.params() == target,
        ),
        r.hypothesis("s odd", s % 2 == 1),
        r.hypothesis("D normalized", d.is_normalized()),
        r.hypothesis("Syl_r(G) cyclic for every prime r | bc", bad.is_empty()),
    ];
    if hyps.contains(&false) {
        return Ok(r);
    }
    let m_order = (q + 1) * (q * q + 1);
    let subs = g.subgroups_of_order(m_order)?;
    r.conclusion(
        format!("a subgroup M of order {m_order} exists"),
        !subs.is_empty(),
        None,
    );
    for m in &subs {
        let count = d.elements().iter().filter(|&&x| m.contains(x)).count() as u64;
        r.conclusion(
            "|D ∩ M| = q²+q+1",
            count == q * q + q + 1,
            Some(format!("|D ∩ M| = {count}")),
        );
    }
    Ok(r)
}

/// `D ∩ M` is a normalized classical difference set over `GF(q)` in `M`.
pub fn check_main(d: &DifferenceSet, q: u64, s: u32, res: &Resources) -> Result<TheoremReport> {
    let target = tower_params(q, s)?;
    let inner = Params::classical(q, 4)?;
    let g = d.group();
    let mut r = base_report("thm4.3", d).with("q", q).with("s", s);
    let s64 = s as u64;
    let hyps = [
        r.hypothesis("s an odd prime", s % 2 == 1 && is_prime(s64)),
        r.hypothesis("s ≥ q", s64 >= q),
        r.hypothesis("s ∤ q²+1", !(q * q + 1).is_multiple_of(s64)),
        r.hypothesis(
            "parameters are classical over GF(q^s) with d = 4",
            d.params() == target,
        ),
        r.hypothesis("D normalized", d.is_normalized()),
    ];
    if hyps.contains(&false) {
        return Ok(r);
    }
    r.conclusion(
        "λ = q^s+1 ≡ q+1 (mod s)",
        target.lambda % s64 == (q + 1) % s64,
        Some(format!(
            "{} mod {s} = {}",
            target.lambda,
            target.lambda % s64
        )),
    );
    let hist = orbit_length_histogram(g, pow_mod(q, 4, g.order()))?;
    r.conclusion(
        "orbits of τ: x ↦ q⁴ x have length 1 or s",
        hist.keys().all(|&len| len == 1 || len == s64),
        Some(histogram_string(&hist)),
    );
    let m_order = inner.v;
    let subs = g.subgroups_of_order(m_order)?;
    r.conclusion(
        format!("a subgroup M of order {m_order} exists"),
        !subs.is_empty(),
        None,
    );
    for m in &subs {
        let restriction = d.restrict(m);
        r.conclusion(
            format!("D ∩ M verifies as {inner}"),
            verifies_as(
                &restriction.group,
                &restriction.elements,
                inner,
                res.workers,
            ),
            Some(set_string(&restriction.parent_elements)),
        );
        r.conclusion(
            "D ∩ M normalized in M",
            g.sum(&restriction.parent_elements) == 0,
            None,
        );
    }
    Ok(r)
}

/// Cosets of the subgroup `K` of order `q²+1` in a group of order `(q+1)(q²+1)`.
pub fn check_dintk(d: &DifferenceSet, q: u64) -> Result<TheoremReport> {
    let target = Params::classical(q, 4)?;
    let g = d.group();
    let mut r = base_report("thm5.1", d).with("q", q);
    let h1 = r.hypothesis(
        "parameters are classical over GF(q) with d = 4",
        d.params() == target,
    );
    let h2 = r.hypothesis("D normalized", d.is_normalized());
    if !(h1 && h2) {
        return Ok(r);
    }
    let Some(k) = subgroup_or_fail(&mut r, g, q * q + 1, "K")? else {
        return Ok(r);
    };
    let cosets = g.cosets(&k);
    let profile = d.intersection_profile(&k);
    let mut expected = vec![q + 1; q as usize];
    expected.insert(0, 1);
    r.conclusion(
        "one coset meets D once, q cosets meet D q+1 times",
        profile.multiset() == expected,
        Some(set_string(&profile.multiset())),
    );
    let singles: Vec<u64> = profile
        .entries
        .iter()
        .filter(|&&(_, c)| c == 1)
        .map(|&(rep, _)| rep)
        .collect();
    let [rep] = singles[..] else {
        return Ok(r);
    };
    r.set("distinguished_representative", rep);
    let home = cosets.coset_of(rep);
    let in_k = home == cosets.coset_of(0);
    let d_cap: Vec<u64> = d
        .elements()
        .iter()
        .copied()
        .filter(|&x| cosets.coset_of(x) == home)
        .collect();
    if q.is_multiple_of(2) {
        r.conclusion(
            "the distinguished coset is K",
            in_k,
            Some(format!("D ∩ K = {}", set_string(&d_cap))),
        );
    } else {
        let w = cosets
            .coset_elements(home)
            .into_iter()
            .find(|&x| g.element_order(x) == 4 && k.contains(g.scale(x, 2)));
        let witness = match (in_k, w) {
            (true, _) => "distinguished coset is K".to_string(),
            (false, Some(w)) => format!("distinguished coset is K + {w}, w of order 4"),
            (false, None) => format!("no order-4 w with 2w ∈ K in coset of {rep}"),
        };
        r.conclusion(
            "the distinguished coset is K or K + w with w of order 4 and 2w ∈ K",
            in_k || w.is_some(),
            Some(witness),
        );
    }
    Ok(r)
}

/// The even-characteristic split `G = H ⊕ K` and its intersection pattern.
pub fn check_hk(d: &DifferenceSet, q: u64, s: u32) -> Result<TheoremReport> {
    let target = tower_params(q, s)?;
    let g = d.group();
    let mut r = base_report("cor5.2", d).with("q", q).with("s", s);
    let hyps = [
        r.hypothesis("q even", q.is_multiple_of(2)),
        r.hypothesis(
            "parameters are classical over GF(q^s) with d = 4",
            d.params() == target,
        ),
        r.hypothesis("D normalized", d.is_normalized()),
    ];
    if hyps.contains(&false) {
        return Ok(r);
    }
    let big_q = q.pow(s);
    let Some(h) = subgroup_or_fail(&mut r, g, big_q + 1, "H")? else {
        return Ok(r);
    };
    let Some(k) = subgroup_or_fail(&mut r, g, big_q * big_q + 1, "K")? else {
        return Ok(r);
    };
    let meet = h.elements().iter().filter(|&&x| k.contains(x)).count();
    r.conclusion("H ∩ K = {0}", meet == 1, None);
    let (inside, others) = coset_split(d, &h, 0);
    r.conclusion(
        "H ⊆ D",
        inside == h.order(),
        Some(format!("H = {}", set_string(h.elements()))),
    );
    r.conclusion(
        "|D ∩ (H + x)| = 1 on every other coset",
        others.iter().all(|&c| c == 1),
        None,
    );
    let d_cap_k: Vec<u64> = d
        .elements()
        .iter()
        .copied()
        .filter(|&x| k.contains(x))
        .collect();
    r.conclusion("D ∩ K = {0}", d_cap_k == [0], Some(set_string(&d_cap_k)));
    let (_, others) = coset_split(d, &k, 0);
    r.conclusion(
        "|D ∩ (K + x)| = q^s+1 on every other coset",
        others.iter().all(|&c| c == big_q + 1),
        None,
    );
    Ok(r)
}

/// Recovers `s` from a group order `(2^s+1)(2^{2s}+1)`.
fn binary_tower_exponent(v: u64) -> Option<u32> {
    (1..=20u32).find(|&s| ((1u64 << s) + 1) * ((1u64 << (2 * s)) + 1) == v)
}

/// Locates the order-15 subgroup `M` from the element of `D` in `H + k`
/// (`k` of order 5 in `K`) and checks `D ∩ M` as a (15,7,3) set.
pub fn check_minimal_embedding(d: &DifferenceSet, res: &Resources) -> Result<TheoremReport> {
    let params = d.params();
    let s = binary_tower_exponent(params.v).ok_or_else(|| {
        Error::ParamsMismatch(format!("{} is not of the form (2^s+1)(2^{{2s}}+1)", params))
    })?;
    require_params(d, tower_params(2, s)?)?;
    let g = d.group();
    let mut r = base_report("thm6.1", d).with("q", 2).with("s", s);
    let h1 = r.hypothesis("s odd", s % 2 == 1);
    let h2 = r.hypothesis("D normalized", d.is_normalized());
    if !(h1 && h2) {
        return Ok(r);
    }
    let big_q = 1u64 << s;
    let Some(h_sub) = subgroup_or_fail(&mut r, g, big_q + 1, "H")? else {
        return Ok(r);
    };
    let Some(k_sub) = subgroup_or_fail(&mut r, g, big_q * big_q + 1, "K")? else {
        return Ok(r);
    };
    let Some(k) = k_sub
        .elements()
        .iter()
        .copied()
        .find(|&x| g.element_order(x) == 5)
    else {
        r.conclusion("K has an element of order 5", false, None);
        return Ok(r);
    };
    let hits: Vec<u64> = h_sub
        .elements()
        .iter()
        .map(|&x| g.add(x, k))
        .filter(|&x| d.contains(x))
        .collect();
    if !r.conclusion(
        "|D ∩ (H + k)| = 1",
        hits.len() == 1,
        Some(format!("k = {k}, hits {}", set_string(&hits))),
    ) {
        return Ok(r);
    }
    let h = g.sub(hits[0], k);
    r.set("h", h);
    r.set("k_element", k);
    if !r.conclusion(
        "h ∈ H has order 3",
        h_sub.contains(h) && g.element_order(h) == 3,
        Some(format!("h = {h}")),
    ) {
        return Ok(r);
    }
    let m = g.subgroup_generated(&[g.add(h, k)]);
    if !r.conclusion(
        "M = <h + k> has order 15",
        m.order() == 15,
        Some(set_string(m.elements())),
    ) {
        return Ok(r);
    }
    let restriction = d.restrict(&m);
    let target = Params::new(15, 7, 3)?;
    r.conclusion(
        format!("D ∩ M verifies as {target}"),
        verifies_as(
            &restriction.group,
            &restriction.elements,
            target,
            res.workers,
        ),
        Some(set_string(&restriction.parent_elements)),
    );
    let combo = |a: u64, b: u64| g.add(g.scale(h, a), g.scale(k, b));
    let mut expected = vec![
        0,
        combo(1, 0),
        combo(2, 0),
        combo(1, 1),
        combo(2, 2),
        combo(1, 4),
        combo(2, 3),
    ];
    expected.sort_unstable();
    r.conclusion(
        "D ∩ M = {0, h, 2h, h+k, 2h+2k, h+4k, 2h+3k}",
        expected == restriction.parent_elements,
        Some(set_string(&expected)),
    );
    Ok(r)
}

fn require_planar(d: &DifferenceSet) -> Result<()> {
    if d.params().lambda != 1 {
        return Err(Error::ParamsMismatch(format!(
            "{} is not planar (λ ≠ 1)",
            d.params()
        )));
    }
    Ok(())
}

/// Restriction of a planar set of square order `m²` to the subgroup of order `m²+m+1`.
pub fn check_planar_subset(d: &DifferenceSet, m: u64, res: &Resources) -> Result<TheoremReport> {
    require_planar(d)?;
    let g = d.group();
    let mut r = base_report("jv", d).with("m", m);
    let h1 = r.hypothesis("order n = m²", d.params().n == m * m);
    let h2 = r.hypothesis("D normalized", d.is_normalized());
    if !(h1 && h2) {
        return Ok(r);
    }
    let target = Params::new(m * m + m + 1, m + 1, 1)?;
    let Some(h) = subgroup_or_fail(&mut r, g, target.v, "H")? else {
        return Ok(r);
    };
    let restriction = d.restrict(&h);
    r.conclusion(
        format!("D ∩ H verifies as {target}"),
        verifies_as(
            &restriction.group,
            &restriction.elements,
            target,
            res.workers,
        ),
        Some(set_string(&restriction.parent_elements)),
    );
    r.conclusion(
        "D ∩ H normalized in H",
        g.sum(&restriction.parent_elements) == 0,
        None,
    );
    Ok(r)
}

/// Whether `D ∩ H` contains a planar set of order `m` in the subgroup of order
/// `m²+m+1`, compared against the criterion `3 ∤ s`.
pub fn check_ho(d: &DifferenceSet, m: u64, s: u32, res: &Resources) -> Result<TheoremReport> {
    require_planar(d)?;
    let g = d.group();
    let mut r = base_report("ho", d).with("m", m).with("s", s);
    let order_ok = m.checked_pow(s).is_some_and(|ms| ms == d.params().n);
    let h1 = r.hypothesis("order n = m^s", order_ok);
    let h2 = r.hypothesis("G cyclic", g.is_cyclic());
    let h_order = m * m + m + 1;
    let present = g.order().is_multiple_of(h_order);
    let h3 = r.hypothesis(format!("a subgroup of order {h_order} exists"), present);
    if !present {
        r.note("subgroup-absent");
    }
    if !(h1 && h2 && h3) {
        return Ok(r);
    }
    let h = g
        .unique_subgroup_of_order(h_order)?
        .ok_or(Error::NoSubgroup(h_order))?;
    let restriction = d.restrict(&h);
    let target = Params::new(h_order, m + 1, 1)?;
    let found = first_subset(&restriction.elements, (m + 1) as usize, |sub| {
        verifies_as(&restriction.group, sub, target, res.workers)
    });
    let witness = found.as_ref().map(|local| {
        let parent: Vec<u64> = restriction
            .elements
            .iter()
            .zip(&restriction.parent_elements)
            .filter(|(l, _)| local.contains(l))
            .map(|(_, &p)| p)
            .collect();
        set_string(&parent)
    });
    r.set("contains_planar_subset", found.is_some());
    r.conclusion(
        format!("contains a planar set of order {m} ⇔ 3 ∤ s"),
        found.is_some() == !s.is_multiple_of(3),
        witness.or(Some(format!(
            "D ∩ H = {}",
            set_string(&restriction.parent_elements)
        ))),
    );
    Ok(r)
}

/// First `size`-subset (lexicographic) of `items` accepted by `accept`.
fn first_subset(
    items: &[u64],
    size: usize,
    mut accept: impl FnMut(&[u64]) -> bool,
) -> Option<Vec<u64>> {
    fn rec(
        items: &[u64],
        size: usize,
        start: usize,
        cur: &mut Vec<u64>,
        accept: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if cur.len() == size {
            return accept(cur);
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            if rec(items, size, i + 1, cur, accept) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::with_capacity(size);
    rec(items, size, 0, &mut cur, &mut accept).then_some(cur)
}
