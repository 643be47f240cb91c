//! Exact arithmetic in GF(p^n).
//!
//! Elements are dense coefficient vectors in the power basis of a fixed
//! primitive modulus, so the residue of the polynomial variable is a
//! generator of the multiplicative group. The modulus is the
//! lexicographically smallest primitive monic polynomial of degree `n`,
//! comparing coefficient vectors `(c0, c1, ..., c_{n-1})` from the constant
//! term upwards. That choice makes every field bit-reproducible from `(p, n)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_divisors};
use crate::error::{Error, Result};

/// Largest field order accepted by [`FiniteField::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 48;

/// Field orders up to this size use a full discrete-log table; larger ones
/// fall back to baby-step giant-step.
pub const LOG_TABLE_LIMIT: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    /// Coefficients in the power basis, constant term first.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// GF(p^n) together with its primitive modulus.
#[derive(Debug)]
pub struct FiniteField {
    p: u32,
    n: u32,
    order: u64,
    /// Monic modulus, constant term first, length `n + 1`.
    modulus: Vec<u32>,
    log_table: OnceLock<Vec<u32>>,
}

impl Clone for FiniteField {
    fn clone(&self) -> Self {
        FiniteField {
            p: self.p,
            n: self.n,
            order: self.order,
            modulus: self.modulus.clone(),
            log_table: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// Builds GF(p^n) with the lexicographically smallest primitive modulus.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidArgument(
                "field degree must be at least 1".into(),
            ));
        }
        let order = (p as u128).pow(n);
        if order > MAX_FIELD_ORDER as u128 {
            return Err(Error::FieldTooLarge {
                p,
                n,
                order,
                ceiling: MAX_FIELD_ORDER,
            });
        }
        let p32 = p as u32;
        let modulus = smallest_primitive_modulus(p32, n, order as u64);
        Ok(FiniteField {
            p: p32,
            n,
            order: order as u64,
            modulus,
            log_table: OnceLock::new(),
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements, `p^n`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// One-line descriptor `p n c0 c1 ... cn`.
    pub fn descriptor(&self) -> String {
        let mut s = format!("{} {}", self.p, self.n);
        for c in &self.modulus {
            s.push(' ');
            s.push_str(&c.to_string());
        }
        s
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.n as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.n as usize];
        coeffs[0] = 1;
        FieldElement { coeffs }
    }

    /// The primitive element: the residue of the polynomial variable.
    pub fn generator(&self) -> FieldElement {
        if self.n == 1 {
            // x = -c0 modulo a linear modulus.
            return FieldElement {
                coeffs: vec![(self.p - self.modulus[0]) % self.p],
            };
        }
        let mut coeffs = vec![0; self.n as usize];
        coeffs[1] = 1;
        FieldElement { coeffs }
    }

    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.n as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::OutOfRange(format!(
                "coefficient {c} not reduced modulo {}",
                self.p
            )));
        }
        Ok(FieldElement {
            coeffs: coeffs.to_vec(),
        })
    }

    /// Element whose base-`p` digits (least significant first) are its coefficients.
    pub fn from_index(&self, mut index: u64) -> FieldElement {
        let p = self.p as u64;
        let coeffs = (0..self.n)
            .map(|_| {
                let c = (index % p) as u32;
                index /= p;
                c
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn to_index(&self, x: &FieldElement) -> u64 {
        let p = self.p as u64;
        x.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + c as u64)
    }

    /// Iterates over all `p^n` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |i| self.from_index(i))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + p - y) % p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| (p - x) % p).collect(),
        }
    }

    /// Multiplication by an element of the prime field.
    pub fn scale(&self, a: &FieldElement, c: u64) -> FieldElement {
        let p = self.p as u64;
        let c = c % p;
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .map(|&x| ((x as u64 * c) % p) as u32)
                .collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: poly_mul_mod(&a.coeffs, &b.coeffs, &self.modulus, self.p),
        }
    }

    /// Square-and-multiply exponentiation.
    pub fn pow(&self, a: &FieldElement, e: u64) -> FieldElement {
        FieldElement {
            coeffs: poly_pow_mod(&a.coeffs, e, &self.modulus, self.p),
        }
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order - 2))
    }

    /// The Z_p-linear map `x -> x^(p^e)` as a precomputed matrix.
    pub fn frobenius(&self, e: u32) -> LinearMap {
        let n = self.n as usize;
        let e = e % self.n;
        let q = (self.p as u64).pow(e);
        let x = self.generator_variable();
        // Image of the basis vector x^j is (x^q)^j.
        let xq = self.pow(&x, q);
        let mut rows = vec![vec![0u32; n]; n];
        let mut col = self.one();
        for j in 0..n {
            for (row, &c) in rows.iter_mut().zip(&col.coeffs) {
                row[j] = c;
            }
            col = self.mul(&col, &xq);
        }
        LinearMap { p: self.p, rows }
    }

    /// The relative trace to the degree-`m` subfield as a linear map.
    pub fn trace_map(&self, m: u32) -> Result<LinearMap> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::NotDivisor {
                m: m as u64,
                n: self.n as u64,
            });
        }
        let frob = self.frobenius(m);
        let mut power = LinearMap::identity(self.p, self.n as usize);
        let mut total = LinearMap::zero(self.p, self.n as usize);
        for _ in 0..self.n / m {
            total = total.add(&power);
            power = frob.compose(&power);
        }
        Ok(total)
    }

    /// `Tr_{F/M}(x)` where `M` is the subfield of degree `m` over the prime field.
    pub fn rel_trace(&self, m: u32, x: &FieldElement) -> Result<FieldElement> {
        Ok(self.trace_map(m)?.apply(x))
    }

    /// Sum of `count` successive images of `x` under `x -> x^(p^step)`.
    ///
    /// For `x` in the subfield of degree `step * count` this is the trace of that
    /// subfield down to the subfield of degree `step`.
    pub fn conjugate_sum(&self, x: &FieldElement, step: u32, count: u32) -> FieldElement {
        let frob = self.frobenius(step);
        let mut acc = self.zero();
        let mut cur = x.clone();
        for _ in 0..count {
            acc = self.add(&acc, &cur);
            cur = frob.apply(&cur);
        }
        acc
    }

    /// True iff `x` lies in the subfield of degree `m` (`m | n`).
    pub fn in_subfield(&self, m: u32, x: &FieldElement) -> bool {
        let q = (self.p as u64).pow(m);
        self.pow(x, q) == *x
    }

    /// All elements of the degree-`m` subfield, zero first, then powers of its generator.
    pub fn subfield_elements(&self, m: u32) -> Result<Vec<FieldElement>> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::NotDivisor {
                m: m as u64,
                n: self.n as u64,
            });
        }
        let sub_order = (self.p as u64).pow(m);
        let step = (self.order - 1) / (sub_order - 1);
        let h = self.pow(&self.generator(), step);
        let mut out = Vec::with_capacity(sub_order as usize);
        out.push(self.zero());
        let mut cur = self.one();
        for _ in 0..sub_order - 1 {
            out.push(cur.clone());
            cur = self.mul(&cur, &h);
        }
        Ok(out)
    }

    /// Returns `i` in `[0, p^n - 1)` with `g^i = x`.
    pub fn discrete_log(&self, x: &FieldElement) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::ZeroLog);
        }
        if self.order <= LOG_TABLE_LIMIT {
            let table = self.log_table.get_or_init(|| self.build_log_table());
            return Ok(table[self.to_index(x) as usize] as u64);
        }
        Ok(self.bsgs(x))
    }

    /// Streams `g^0, g^1, g^2, ...` with one multiplication per step.
    pub fn powers(&self) -> Powers<'_> {
        Powers {
            field: self,
            current: self.one(),
            g: self.generator(),
        }
    }

    fn generator_variable(&self) -> FieldElement {
        // The polynomial variable itself, reduced modulo the modulus.
        if self.n == 1 {
            self.generator()
        } else {
            let mut coeffs = vec![0; self.n as usize];
            coeffs[1] = 1;
            FieldElement { coeffs }
        }
    }

    fn build_log_table(&self) -> Vec<u32> {
        let mut table = vec![0u32; self.order as usize];
        for (i, x) in self.powers().take((self.order - 1) as usize).enumerate() {
            table[self.to_index(&x) as usize] = i as u32;
        }
        table
    }

    fn bsgs(&self, x: &FieldElement) -> u64 {
        let group = self.order - 1;
        let m = (group as f64).sqrt().ceil() as u64;
        let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
        for (j, y) in self.powers().take(m as usize).enumerate() {
            baby.entry(self.to_index(&y)).or_insert(j as u64);
        }
        let g_inv_m = self.pow(&self.generator(), group - (m % group));
        let mut gamma = x.clone();
        for i in 0..=m {
            if let Some(&j) = baby.get(&self.to_index(&gamma)) {
                return (i * m + j) % group;
            }
            gamma = self.mul(&gamma, &g_inv_m);
        }
        unreachable!("generator is primitive, every nonzero element has a logarithm")
    }
}

pub struct Powers<'a> {
    field: &'a FiniteField,
    current: FieldElement,
    g: FieldElement,
}

impl Iterator for Powers<'_> {
    type Item = FieldElement;

    fn next(&mut self) -> Option<FieldElement> {
        let next = self.field.mul(&self.current, &self.g);
        Some(std::mem::replace(&mut self.current, next))
    }
}

/// A Z_p-linear map on coefficient vectors, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    p: u32,
    rows: Vec<Vec<u32>>,
}

impl LinearMap {
    pub fn identity(p: u32, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        LinearMap { p, rows }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        LinearMap {
            p,
            rows: vec![vec![0; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: self.apply_slice(&x.coeffs),
        }
    }

    pub fn apply_slice(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        self.rows
            .iter()
            .map(|row| {
                let s: u64 = row.iter().zip(x).map(|(&a, &b)| a as u64 * b as u64).sum();
                (s % p) as u32
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let n = self.dim();
        let p = self.p as u64;
        let mut rows = vec![vec![0u32; n]; n];
        for (out, lhs) in rows.iter_mut().zip(&self.rows) {
            for (j, entry) in out.iter_mut().enumerate() {
                let s: u64 = lhs
                    .iter()
                    .zip(&other.rows)
                    .map(|(&a, row)| a as u64 * row[j] as u64)
                    .sum();
                *entry = (s % p) as u32;
            }
        }
        LinearMap { p: self.p, rows }
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        let p = self.p;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (x + y) % p).collect())
            .collect();
        LinearMap { p, rows }
    }

    pub fn is_identity(&self) -> bool {
        *self == LinearMap::identity(self.p, self.dim())
    }
}

fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = a.len();
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * n - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    for i in (n..2 * n - 1).rev() {
        let t = prod[i];
        if t == 0 {
            continue;
        }
        // x^n = -(c0 + ... + c_{n-1} x^{n-1})
        for j in 0..n {
            let sub = t * modulus[j] as u64 % p64;
            prod[i - n + j] = (prod[i - n + j] + p64 - sub) % p64;
        }
        prod[i] = 0;
    }
    prod.truncate(n);
    prod.into_iter().map(|c| c as u32).collect()
}

fn poly_pow_mod(a: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let n = a.len();
    let mut acc = vec![0u32; n];
    acc[0] = 1;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &base, modulus, p);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mul_mod(&base, &base, modulus, p);
        }
    }
    acc
}

/// `x` has order exactly `p^n - 1` modulo `modulus`. This forces the quotient
/// ring to have `p^n - 1` units, so the modulus is also irreducible.
fn is_primitive(modulus: &[u32], p: u32, n: u32, order: u64, group_primes: &[u64]) -> bool {
    if modulus[0] == 0 {
        return false;
    }
    let nn = n as usize;
    let x: Vec<u32> = if nn == 1 {
        vec![(p - modulus[0]) % p]
    } else {
        let mut v = vec![0; nn];
        v[1] = 1;
        v
    };
    let mut one = vec![0u32; nn];
    one[0] = 1;
    let group = order - 1;
    if poly_pow_mod(&x, group, &modulus[..nn], p) != one {
        return false;
    }
    group_primes
        .iter()
        .all(|&r| poly_pow_mod(&x, group / r, &modulus[..nn], p) != one)
}

fn smallest_primitive_modulus(p: u32, n: u32, order: u64) -> Vec<u32> {
    let nn = n as usize;
    let group_primes = prime_divisors(order - 1);
    // Odometer over (c0, ..., c_{n-1}) with c0 the most significant digit.
    let mut digits = vec![0u32; nn];
    loop {
        if is_primitive(&digits, p, n, order, &group_primes) {
            let mut modulus = digits.clone();
            modulus.push(1);
            return modulus;
        }
        let mut i = nn;
        loop {
            // A primitive polynomial of every degree exists, so this never underflows.
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}
