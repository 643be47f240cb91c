//! Text interchange format for difference sets, and the per-set report.
//!
//! ```text
//! group Z_15
//! 15 7 3
//! 0
//! 5
//! ...
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::divisors;
use crate::dset::{DifferenceSet, Params, VerificationReport};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, ENUMERATION_LIMIT};
use crate::report::set_string;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFile {
    pub group: AbelianGroup,
    pub params: Params,
    pub elements: Vec<u64>,
}

impl SetFile {
    pub fn from_set(d: &DifferenceSet) -> Self {
        SetFile {
            group: d.group().clone(),
            params: d.params(),
            elements: d.elements().to_vec(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "group {}\n{} {} {}\n",
            self.group, self.params.v, self.params.k, self.params.lambda
        );
        for x in &self.elements {
            let _ = writeln!(out, "{x}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, column: usize, message: String| Error::Parse {
            line,
            column,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (ln, header) = lines.next().ok_or_else(|| err(1, 1, "empty file".into()))?;
        let descriptor = header
            .strip_prefix("group")
            .filter(|rest| rest.starts_with(char::is_whitespace))
            .ok_or_else(|| err(ln, 1, "expected `group Z_<d> x ...`".into()))?;
        let group: AbelianGroup = descriptor.trim().parse().map_err(|e| match e {
            Error::Parse { message, .. } => err(ln, 7, message),
            other => err(ln, 7, other.to_string()),
        })?;

        let (ln, plist) = lines
            .next()
            .ok_or_else(|| err(2, 1, "missing `v k lambda` line".into()))?;
        let mut nums = Vec::new();
        for (col, tok) in tokens(plist) {
            let n: u64 = tok
                .parse()
                .map_err(|_| err(ln, col, format!("expected an integer, found {tok:?}")))?;
            nums.push(n);
        }
        let [v, k, lambda] = nums[..] else {
            return Err(err(
                ln,
                1,
                format!("expected 3 integers, found {}", nums.len()),
            ));
        };
        if v != group.order() {
            return Err(err(
                ln,
                1,
                format!("v = {v} but the group has order {}", group.order()),
            ));
        }
        let params = Params::new(v, k, lambda).map_err(|e| err(ln, 1, e.to_string()))?;

        let mut elements: Vec<u64> = Vec::new();
        let mut last_line = ln;
        for (ln, line) in lines {
            let Some((col, tok)) = tokens(line).next() else {
                continue;
            };
            last_line = ln;
            let x: u64 = tok
                .parse()
                .map_err(|_| err(ln, col, format!("expected an element rank, found {tok:?}")))?;
            if x >= v {
                return Err(err(ln, col, format!("rank {x} is not below v = {v}")));
            }
            if elements.last().is_some_and(|&prev| prev >= x) {
                return Err(err(ln, col, "ranks must be strictly increasing".into()));
            }
            if let Some((c, extra)) = tokens(line).nth(1) {
                return Err(err(ln, c, format!("unexpected {extra:?} after rank")));
            }
            elements.push(x);
        }
        if elements.len() as u64 != k {
            return Err(err(
                last_line,
                1,
                format!("expected {k} elements, found {}", elements.len()),
            ));
        }
        Ok(SetFile {
            group,
            params,
            elements,
        })
    }

    /// The set as an unverified difference set with the stated parameters.
    pub fn to_candidate(&self) -> Result<DifferenceSet> {
        let d = DifferenceSet::candidate(self.group.clone(), self.elements.clone())?;
        if d.params() != self.params {
            return Err(Error::ParamsMismatch(format!(
                "file states {} but the size forces {}",
                self.params,
                d.params()
            )));
        }
        Ok(d)
    }
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |t| {
        let offset = t.as_ptr() as usize - line.as_ptr() as usize;
        (line[..offset].chars().count() + 1, t)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCheck {
    pub subgroup_order: u64,
    pub index: u64,
    /// Sorted intersection numbers.
    pub profile: Vec<u64>,
    /// `Σ s_i = k`.
    pub sum_ok: bool,
    /// `Σ s_i² = λ|H| + n`.
    pub sum_of_squares_ok: bool,
    /// `(r s_i - k)² <= n (r-1)²` on every coset.
    pub bound_ok: bool,
    /// Cosets meeting that bound with equality.
    pub bound_attained: usize,
}

impl ProfileCheck {
    pub fn ok(&self) -> bool {
        self.sum_ok && self.sum_of_squares_ok && self.bound_ok
    }
}

pub fn profile_check(d: &DifferenceSet, h: &crate::group::Subgroup) -> ProfileCheck {
    let profile = d.intersection_profile(h);
    let bound = d.distribution_bound_check(h);
    ProfileCheck {
        subgroup_order: h.order(),
        index: profile.index,
        profile: profile.multiset(),
        sum_ok: profile.sum_ok,
        sum_of_squares_ok: profile.sum_of_squares_ok,
        bound_ok: bound.ok,
        bound_attained: bound.attained.len(),
    }
}

/// Profile checks against every subgroup, or `None` when the group is too
/// large to enumerate them.
pub fn profile_checks_all(d: &DifferenceSet) -> Result<Option<Vec<ProfileCheck>>> {
    let g = d.group();
    if g.order() > ENUMERATION_LIMIT {
        return Ok(None);
    }
    let mut out = Vec::new();
    for m in divisors(g.order()) {
        for h in g.subgroups_of_order(m)? {
            out.push(profile_check(d, &h));
        }
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetReport {
    pub params: Params,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_observed: Option<u64>,
    pub normalized: bool,
    pub profile_checks: Vec<ProfileCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_descriptor: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SetReport {
    pub fn new(d: &DifferenceSet, verification: Option<&VerificationReport>) -> Self {
        SetReport {
            params: d.params(),
            verified: verification.is_some_and(|r| r.verified),
            lambda_observed: verification.and_then(|r| r.lambda_observed),
            normalized: d.is_normalized(),
            profile_checks: Vec::new(),
            field_descriptor: None,
            notes: Vec::new(),
        }
    }

    pub fn render_text(&self) -> String {
        let p = self.params;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "params: v={} k={} lambda={} n={}",
            p.v, p.k, p.lambda, p.n
        );
        let _ = writeln!(out, "verified: {}", self.verified);
        if let Some(l) = self.lambda_observed {
            let _ = writeln!(out, "lambda_observed: {l}");
        }
        let _ = writeln!(out, "normalized: {}", self.normalized);
        if let Some(fd) = &self.field_descriptor {
            let _ = writeln!(out, "field: {fd}");
        }
        for c in &self.profile_checks {
            let _ = writeln!(
                out,
                "profile: order={} index={} counts={} sum_ok={} sum_of_squares_ok={} bound_ok={} bound_attained={}",
                c.subgroup_order,
                c.index,
                set_string(&c.profile),
                c.sum_ok,
                c.sum_of_squares_ok,
                c.bound_ok,
                c.bound_attained
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FANO: &str = "group Z_7\n7 3 1\n1\n2\n4\n";

    #[test]
    fn round_trip() {
        let f = SetFile::parse(FANO).unwrap();
        assert_eq!(f.elements, vec![1, 2, 4]);
        assert_eq!(f.render(), FANO);
        let d = f.to_candidate().unwrap();
        assert_eq!(SetFile::from_set(&d), f);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let cases = [
            ("grp Z_7\n", 1, 1),
            ("group Z_7\n7 3 x\n", 2, 5),
            ("group Z_7\n8 3 1\n", 2, 1),
            ("group Z_7\n7 3 2\n", 2, 1),
            ("group Z_7\n7 3 1\n1\n  9\n4\n", 4, 3),
            ("group Z_7\n7 3 1\n2\n1\n4\n", 4, 1),
            ("group Z_7\n7 3 1\n1\n2\n", 4, 1),
            ("group Z_7\n7 3 1\n1 2\n", 3, 3),
        ];
        for (text, line, column) in cases {
            match SetFile::parse(text) {
                Err(Error::Parse {
                    line: l, column: c, ..
                }) => {
                    assert_eq!((l, c), (line, column), "{text:?}")
                }
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn all_profiles_on_fano() {
        let d = SetFile::parse(FANO).unwrap().to_candidate().unwrap();
        let checks = profile_checks_all(&d).unwrap().unwrap();
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(ProfileCheck::ok));
    }
}
