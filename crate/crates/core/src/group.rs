//! Mixed-radix number system and the truncated group `Z_{m_0} × … × Z_{m_{N-1}}`.
//!
//! Natural numbers `n < M_N` and group points (cells) share one expansion,
//! least significant coordinate first: `n = Σ n_j M_j`, `t = Σ x_j M_j`.

use std::fmt;
use std::str::FromStr;

use crate::error::{out_of_range, Error, Result};
use crate::Rational;

/// Radices `m_0..m_{N-1}` of a bounded Vilenkin group truncated at depth `N`,
/// together with the products `M_0 = 1, M_{k+1} = m_k M_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadixSystem {
    radices: Vec<u32>,
    products: Vec<u64>,
}

impl RadixSystem {
    /// Builds the system from an explicit radix list; its length is the depth.
    pub fn new(radices: &[u32]) -> Result<Self> {
        if radices.is_empty() {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let mut products = Vec::with_capacity(radices.len() + 1);
        products.push(1u64);
        for (level, &m) in radices.iter().enumerate() {
            if m < 2 {
                return Err(Error::InvalidRadix {
                    level,
                    radix: m as u64,
                });
            }
            let next = products[level]
                .checked_mul(m as u64)
                .ok_or(Error::DepthTooLarge {
                    depth: radices.len(),
                })?;
            products.push(next);
        }
        Ok(Self {
            radices: radices.to_vec(),
            products,
        })
    }

    /// Repeats `pattern` periodically (or truncates it) to `depth` levels.
    pub fn periodic(pattern: &[u32], depth: usize) -> Result<Self> {
        if pattern.is_empty() || depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let radices: Vec<u32> = pattern.iter().copied().cycle().take(depth).collect();
        Self::new(&radices)
    }

    pub fn constant(radix: u32, depth: usize) -> Result<Self> {
        Self::periodic(&[radix], depth)
    }

    /// The Walsh–Paley case `m ≡ 2`.
    pub fn dyadic(depth: usize) -> Result<Self> {
        Self::constant(2, depth)
    }

    /// Parses `"2,3,4"` (explicit list) or `"2^10"` (constant radix 2, depth 10).
    /// A given `depth` overrides the depth implied by the string; explicit lists
    /// are then repeated periodically.
    pub fn parse(spec: &str, depth: Option<usize>) -> Result<Self> {
        let bad = |reason: &str| Error::RadixSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let s = spec.trim();
        if s.is_empty() {
            return Err(bad("empty"));
        }
        if let Some((base, exp)) = s.split_once('^') {
            let radix: u32 = base
                .trim()
                .parse()
                .map_err(|_| bad("bad radix before '^'"))?;
            let implied: usize = exp.trim().parse().map_err(|_| bad("bad depth after '^'"))?;
            return Self::constant(radix, depth.unwrap_or(implied));
        }
        let s = s.trim_start_matches('(').trim_end_matches(')');
        let pattern = s
            .split(',')
            .map(|tok| tok.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("expected comma-separated integers"))?;
        let depth = depth.unwrap_or(pattern.len());
        Self::periodic(&pattern, depth)
    }

    /// The string form accepted by [`RadixSystem::parse`].
    pub fn spec_string(&self) -> String {
        let first = self.radices[0];
        if self.radices.iter().all(|&m| m == first) {
            format!("{first}^{}", self.depth())
        } else {
            self.radices
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn depth(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn radix(&self, level: usize) -> u32 {
        self.radices[level]
    }

    /// `M_0..=M_N`.
    pub fn products(&self) -> &[u64] {
        &self.products
    }

    /// `M_k` for `k ≤ N`.
    pub fn product(&self, k: usize) -> u64 {
        self.products[k]
    }

    /// `M_N`, the number of rank-`N` cells.
    pub fn order(&self) -> u64 {
        self.products[self.depth()]
    }

    /// `M_N` as a length.
    pub fn len(&self) -> usize {
        self.order() as usize
    }

    /// Never true; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `λ = max m_k`.
    pub fn lambda(&self) -> u32 {
        self.radices.iter().copied().max().unwrap_or(2)
    }

    pub fn is_dyadic(&self) -> bool {
        self.radices.iter().all(|&m| m == 2)
    }

    /// The same radices cut at a smaller depth.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth() {
            return Err(out_of_range("depth", depth as u64, self.depth() as u64));
        }
        Ok(Self {
            radices: self.radices[..depth].to_vec(),
            products: self.products[..=depth].to_vec(),
        })
    }

    /// Digit `n_j` of `n` (no range check on `n`).
    #[inline]
    pub fn digit(&self, n: u64, j: usize) -> u32 {
        ((n / self.products[j]) % self.radices[j] as u64) as u32
    }

    /// Writes the digits of `n` into `out` (length `N`); `n` is reduced mod `M_N`.
    #[inline]
    pub fn digits_into(&self, mut n: u64, out: &mut [u32]) {
        for (d, &m) in out.iter_mut().zip(&self.radices) {
            *d = (n % m as u64) as u32;
            n /= m as u64;
        }
    }

    pub fn decompose(&self, n: u64) -> Result<VilenkinIndex> {
        if n >= self.order() {
            return Err(out_of_range("n", n, self.order()));
        }
        let mut digits = vec![0u32; self.depth()];
        self.digits_into(n, &mut digits);
        let order = digits.iter().rposition(|&d| d != 0);
        Ok(VilenkinIndex {
            value: n,
            digits,
            order,
        })
    }

    /// Inverse of [`RadixSystem::decompose`].
    pub fn compose(&self, digits: &[u32]) -> Result<u64> {
        self.check_coords(digits)?;
        Ok(digits
            .iter()
            .zip(&self.products)
            .map(|(&d, &p)| d as u64 * p)
            .sum())
    }

    pub fn cell(&self, t: u64) -> Result<CellIndex> {
        if t >= self.order() {
            return Err(out_of_range("cell", t, self.order()));
        }
        let mut coords = vec![0u32; self.depth()];
        self.digits_into(t, &mut coords);
        Ok(CellIndex { t, coords })
    }

    pub fn cell_from_coords(&self, coords: &[u32]) -> Result<CellIndex> {
        let t = self.compose(coords)?;
        Ok(CellIndex {
            t,
            coords: coords.to_vec(),
        })
    }

    fn check_coords(&self, coords: &[u32]) -> Result<()> {
        if coords.len() != self.depth() || coords.iter().zip(&self.radices).any(|(&x, &m)| x >= m) {
            return Err(Error::SystemMismatch);
        }
        Ok(())
    }

    /// `x ⊕ y`: coordinatewise addition mod `m_j`.
    pub fn add(&self, x: &CellIndex, y: &CellIndex) -> Result<CellIndex> {
        self.check_coords(&x.coords)?;
        self.check_coords(&y.coords)?;
        let coords: Vec<u32> = x
            .coords
            .iter()
            .zip(&y.coords)
            .zip(&self.radices)
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect();
        self.cell_from_coords(&coords)
    }

    /// `⊖x`: coordinatewise `(m_j − x_j) mod m_j`.
    pub fn neg(&self, x: &CellIndex) -> Result<CellIndex> {
        self.check_coords(&x.coords)?;
        let coords: Vec<u32> = x
            .coords
            .iter()
            .zip(&self.radices)
            .map(|(&a, &m)| (m - a) % m)
            .collect();
        self.cell_from_coords(&coords)
    }

    /// Haar measure `1/M_n` of a rank-`n` cylinder `I_n(x)`.
    pub fn cell_measure(&self, rank: usize) -> Result<Rational> {
        if rank > self.depth() {
            return Err(out_of_range("rank", rank as u64, self.depth() as u64));
        }
        Ok(Rational::new(1, self.products[rank]))
    }
}

impl FromStr for RadixSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None)
    }
}

impl fmt::Display for RadixSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

/// A natural number together with its mixed-radix digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VilenkinIndex {
    value: u64,
    digits: Vec<u32>,
    order: Option<usize>,
}

impl VilenkinIndex {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn digit(&self, j: usize) -> u32 {
        self.digits[j]
    }

    /// `|n| = max{j : n_j ≠ 0}`; `None` for `n = 0`.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// `|n|` with the `-1` sentinel for `n = 0`.
    pub fn signed_order(&self) -> i64 {
        self.order.map_or(-1, |o| o as i64)
    }
}

/// A rank-`N` cell, i.e. a point of the truncated group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellIndex {
    t: u64,
    coords: Vec<u32>,
}

impl CellIndex {
    pub fn index(&self) -> u64 {
        self.t
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> u32 {
        self.coords[j]
    }
}
