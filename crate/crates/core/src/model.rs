//! Linear systems `L(d; m_1, ..., m_r)` of degree-`d` surfaces in P^3 with
//! fat points, and the dimension arithmetic attached to them.
//!
//! A system is stored as a degree plus a multiplicity histogram. Everything
//! here is exact `u64`/`i64` arithmetic; all values that occur for `d <= 40`
//! are far below overflow.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact binomial coefficient; `k > n` gives 0.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial coefficient exceeds u64")
}

/// Number of linear conditions imposed by a point of multiplicity `m`,
/// `C(m + 2, 3)`.
pub fn conditions_count(m: u32) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    Ok(point_conditions(m))
}

#[inline]
pub(crate) fn point_conditions(m: u32) -> u64 {
    binomial(u64::from(m) + 2, 3)
}

/// Dimension of the space of degree-`d` forms in four variables, `C(d + 3, 3)`.
pub fn monomial_count(d: u32) -> u64 {
    binomial(u64::from(d) + 3, 3)
}

/// The system `L(d; m_1^c_1, ..., m_k^c_k)`.
///
/// Multiplicities are kept in a sorted map without zero counts, so two specs
/// describing the same multiset compare and hash equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemSpec {
    degree: u32,
    multiplicities: BTreeMap<u32, u32>,
}

impl SystemSpec {
    pub fn new(degree: u32) -> Self {
        SystemSpec {
            degree,
            multiplicities: BTreeMap::new(),
        }
    }

    /// Builds a spec from `(multiplicity, count)` pairs; repeated
    /// multiplicities are summed.
    pub fn from_counts<I>(degree: u32, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut spec = SystemSpec::new(degree);
        for (m, c) in counts {
            spec.add_points(m, c)?;
        }
        Ok(spec)
    }

    /// Builder form of [`SystemSpec::add_points`] for literal specs.
    ///
    /// Panics on multiplicity 0.
    pub fn with(mut self, m: u32, count: u32) -> Self {
        self.add_points(m, count).expect("multiplicity must be positive");
        self
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn add_points(&mut self, m: u32, count: u32) -> Result<()> {
        if m == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        if count > 0 {
            *self.multiplicities.entry(m).or_insert(0) += count;
        }
        Ok(())
    }

    /// Removes `count` points of multiplicity `m`. Returns `false` and leaves
    /// the spec untouched if there are not enough of them.
    pub fn remove_points(&mut self, m: u32, count: u32) -> bool {
        if count == 0 {
            return true;
        }
        match self.multiplicities.get_mut(&m) {
            Some(c) if *c >= count => {
                *c -= count;
                if *c == 0 {
                    self.multiplicities.remove(&m);
                }
                true
            }
            _ => false,
        }
    }

    pub fn count(&self, m: u32) -> u32 {
        self.multiplicities.get(&m).copied().unwrap_or(0)
    }

    /// `(multiplicity, count)` pairs, largest multiplicity first.
    pub fn counts(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.multiplicities.iter().rev().map(|(&m, &c)| (m, c))
    }

    /// One multiplicity per point, largest first. This is the canonical point
    /// order used when sampling coordinates.
    pub fn points(&self) -> impl Iterator<Item = u32> + '_ {
        self.counts()
            .flat_map(|(m, c)| std::iter::repeat(m).take(c as usize))
    }

    pub fn total_points(&self) -> u64 {
        self.multiplicities.values().map(|&c| u64::from(c)).sum()
    }

    pub fn max_multiplicity(&self) -> Option<u32> {
        self.multiplicities.keys().next_back().copied()
    }

    /// `N = C(d + 3, 3)`.
    pub fn monomials(&self) -> u64 {
        monomial_count(self.degree)
    }

    /// `S = sum_j C(m_j + 2, 3)`.
    pub fn conditions(&self) -> u64 {
        self.counts()
            .map(|(m, c)| u64::from(c) * point_conditions(m))
            .sum()
    }

    pub fn vdim(&self) -> i64 {
        self.monomials() as i64 - self.conditions() as i64 - 1
    }

    pub fn edim(&self) -> i64 {
        self.vdim().max(-1)
    }

    /// True when every multiplicity lies in `allowed`.
    pub fn multiplicities_within(&self, allowed: &[u32]) -> bool {
        self.multiplicities.keys().all(|m| allowed.contains(m))
    }
}

pub fn vdim(spec: &SystemSpec) -> i64 {
    spec.vdim()
}

pub fn edim(spec: &SystemSpec) -> i64 {
    spec.edim()
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.degree)?;
        for (i, (m, c)) in self.counts().enumerate() {
            let sep = if i == 0 { " " } else { "," };
            write!(f, "{sep}{m}^{c}")?;
        }
        Ok(())
    }
}

/// Parses a comma-separated list of `m^c` or `mxc` terms (a bare `m` means
/// one point). An empty string or `-` means no points.
pub fn parse_multiplicities(input: &str) -> Result<Vec<(u32, u32)>> {
    let trimmed = input.trim();
    if trimmed.is_empty() || trimmed == "-" {
        return Ok(Vec::new());
    }
    let err = |reason: String| Error::Parse {
        input: input.to_string(),
        reason,
    };
    let mut out = Vec::new();
    for term in trimmed.split(',') {
        let term = term.trim();
        if term.is_empty() {
            return Err(err("empty term".into()));
        }
        let (m, c) = match term.split_once(['^', 'x', 'X']) {
            Some((m, c)) => (m.trim(), c.trim()),
            None => (term, "1"),
        };
        let m: u32 = m
            .parse()
            .map_err(|_| err(format!("bad multiplicity `{m}`")))?;
        let c: u32 = c.parse().map_err(|_| err(format!("bad count `{c}`")))?;
        if m == 0 {
            return Err(err("multiplicity 0".into()));
        }
        out.push((m, c));
    }
    Ok(out)
}

impl FromStr for SystemSpec {
    type Err = Error;

    /// Parses `"d; m1^c1,m2^c2,..."`.
    fn from_str(s: &str) -> Result<Self> {
        let (d, rest) = s.split_once(';').ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: "missing `;` after the degree".into(),
        })?;
        let degree: u32 = d.trim().parse().map_err(|_| Error::Parse {
            input: s.to_string(),
            reason: format!("bad degree `{}`", d.trim()),
        })?;
        SystemSpec::from_counts(degree, parse_multiplicities(rest)?)
    }
}

impl Serialize for SystemSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Counts of 10-, 4-, 3- and 2-points for one enumerated case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CaseSignature {
    pub degree: u32,
    pub q: u32,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl CaseSignature {
    pub fn new(degree: u32, q: u32, x: u32, y: u32, z: u32) -> Self {
        CaseSignature { degree, q, x, y, z }
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec::new(self.degree)
            .with(10, self.q)
            .with(4, self.x)
            .with(3, self.y)
            .with(2, self.z)
    }

    /// Inverse of [`CaseSignature::to_spec`]; `None` if the spec has other
    /// multiplicities.
    pub fn from_spec(spec: &SystemSpec) -> Option<Self> {
        if !spec.multiplicities_within(&[10, 4, 3, 2]) {
            return None;
        }
        Some(CaseSignature {
            degree: spec.degree(),
            q: spec.count(10),
            x: spec.count(4),
            y: spec.count(3),
            z: spec.count(2),
        })
    }

    /// `220 q + 20 x + 10 y + 4 z`.
    pub fn conditions(&self) -> u64 {
        220 * u64::from(self.q) + 20 * u64::from(self.x) + 10 * u64::from(self.y)
            + 4 * u64::from(self.z)
    }

    pub fn monomials(&self) -> u64 {
        monomial_count(self.degree)
    }

    pub fn vdim(&self) -> i64 {
        self.monomials() as i64 - self.conditions() as i64 - 1
    }
}

impl fmt::Display for CaseSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={} q={} x={} y={} z={}",
            self.degree, self.q, self.x, self.y, self.z
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportVerdict {
    NonSpecial,
    SpecialSuspected,
    Inconclusive,
    NotChecked,
}

impl fmt::Display for ReportVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportVerdict::NonSpecial => "non_special",
            ReportVerdict::SpecialSuspected => "special_suspected",
            ReportVerdict::Inconclusive => "inconclusive",
            ReportVerdict::NotChecked => "not_checked",
        })
    }
}

/// Formula dimensions of a system, optionally completed by a computed rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub vdim: i64,
    pub edim: i64,
    pub rank: Option<u64>,
    pub dim: Option<i64>,
    pub verdict: ReportVerdict,
}

impl DimensionReport {
    pub fn formula(spec: &SystemSpec) -> Self {
        DimensionReport {
            n: spec.monomials(),
            s: spec.conditions(),
            vdim: spec.vdim(),
            edim: spec.edim(),
            rank: None,
            dim: None,
            verdict: ReportVerdict::NotChecked,
        }
    }

    /// Attaches a rank of the full `S x N` interpolation matrix. The verdict
    /// is `non_special` at maximal rank and `special_suspected` otherwise; a
    /// deficit at sampled points is evidence, not proof.
    pub fn with_rank(mut self, rank: u64) -> Self {
        assert!(rank <= self.n.min(self.s), "rank exceeds matrix shape");
        let dim = self.n as i64 - 1 - rank as i64;
        self.rank = Some(rank);
        self.dim = Some(dim);
        self.verdict = if rank == self.n.min(self.s) {
            ReportVerdict::NonSpecial
        } else {
            ReportVerdict::SpecialSuspected
        };
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(17, 3), 680);
        assert_eq!(binomial(43, 3), 12341);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn condition_counts() {
        assert_eq!(conditions_count(1).unwrap(), 1);
        assert_eq!(conditions_count(2).unwrap(), 4);
        assert_eq!(conditions_count(3).unwrap(), 10);
        assert_eq!(conditions_count(4).unwrap(), 20);
        assert_eq!(conditions_count(10).unwrap(), 220);
        assert!(matches!(conditions_count(0), Err(Error::ZeroMultiplicity)));
    }

    #[test]
    fn condition_count_matches_enumeration() {
        // Multi-indices in 4 variables, |b| <= m - 1, last coordinate 0.
        for m in 1..=10u32 {
            let mut n = 0u64;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        if a + b + c <= m - 1 {
                            n += 1;
                        }
                    }
                }
            }
            assert_eq!(n, conditions_count(m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn vdim_examples() {
        assert_eq!(SystemSpec::new(3).with(2, 5).vdim(), -1);
        for a in 0..=11 {
            let spec = SystemSpec::new(9).with(4, a).with(3, 22 - 2 * a);
            assert_eq!(spec.vdim(), -1, "a = {a}");
        }
        let empty = SystemSpec::new(14);
        assert_eq!(empty.vdim(), 679);
        assert_eq!(empty.edim(), 679);
    }

    #[test]
    fn edim_clamps() {
        let over = SystemSpec::new(1).with(2, 2);
        assert_eq!(over.vdim(), -5);
        assert_eq!(over.edim(), -1);
        assert_eq!(SystemSpec::new(3).with(2, 5).edim(), -1);
        let spec = SystemSpec::new(1).with(1, 3).with(1, 0);
        assert_eq!(spec.vdim(), 0);
        let seven = SystemSpec::new(2).with(1, 2);
        assert_eq!(seven.edim(), 7);
    }

    #[test]
    fn text_form() {
        let spec: SystemSpec = "14; 10^1,4^20,3^5,2^2".parse().unwrap();
        assert_eq!(spec.count(4), 20);
        assert_eq!(spec.to_string(), "14; 10^1,4^20,3^5,2^2");
        let shuffled: SystemSpec = "14; 2x2, 3^5 ,10, 4^20".parse().unwrap();
        assert_eq!(shuffled, spec);
        assert_eq!("5;".parse::<SystemSpec>().unwrap().to_string(), "5;");
        assert_eq!("3; 2^0".parse::<SystemSpec>().unwrap(), SystemSpec::new(3));
        assert!("14 10^1".parse::<SystemSpec>().is_err());
        assert!("14; 0^3".parse::<SystemSpec>().is_err());
        assert!("14; 4^".parse::<SystemSpec>().is_err());
    }

    #[test]
    fn point_order_is_descending() {
        let spec = SystemSpec::new(9).with(2, 2).with(4, 1).with(3, 1);
        assert_eq!(spec.points().collect::<Vec<_>>(), vec![4, 3, 2, 2]);
    }

    #[test]
    fn signature_round_trip() {
        let sig = CaseSignature::new(14, 1, 20, 5, 2);
        let spec = sig.to_spec();
        assert_eq!(CaseSignature::from_spec(&spec), Some(sig));
        assert_eq!(sig.conditions(), spec.conditions());
        assert_eq!(CaseSignature::from_spec(&SystemSpec::new(4).with(5, 1)), None);
    }

    #[test]
    fn report_with_rank() {
        let spec = SystemSpec::new(2).with(2, 2);
        let report = DimensionReport::formula(&spec).with_rank(7);
        assert_eq!(report.dim, Some(2));
        assert_eq!(report.edim, 1);
        assert_eq!(report.verdict, ReportVerdict::SpecialSuspected);
        let full = DimensionReport::formula(&spec).with_rank(8);
        assert_eq!(full.dim, Some(full.edim));
        assert_eq!(full.verdict, ReportVerdict::NonSpecial);
    }

    fn arb_spec() -> impl Strategy<Value = SystemSpec> {
        (0u32..=40, prop::collection::vec((1u32..=12, 0u32..=30), 0..5)).prop_map(
            |(d, counts)| SystemSpec::from_counts(d, counts).unwrap(),
        )
    }

    proptest! {
        #[test]
        fn edim_bounds(spec in arb_spec()) {
            prop_assert!(spec.edim() >= -1);
            prop_assert!(spec.edim() >= spec.vdim());
            prop_assert_eq!(spec.edim() == spec.vdim(), spec.vdim() >= -1);
        }

        #[test]
        fn removal_raises_vdim(spec in arb_spec()) {
            for (m, _) in spec.counts() {
                let mut smaller = spec.clone();
                prop_assert!(smaller.remove_points(m, 1));
                prop_assert_eq!(
                    smaller.vdim() - spec.vdim(),
                    conditions_count(m).unwrap() as i64
                );
            }
        }

        #[test]
        fn text_round_trip(spec in arb_spec()) {
            let back: SystemSpec = spec.to_string().parse().unwrap();
            prop_assert_eq!(back, spec);
        }
    }
}
