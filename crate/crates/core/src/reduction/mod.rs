//! Glueing: replacing a collection of points by one point of higher
//! multiplicity without changing the virtual dimension.
//!
//! Gluing `s` points into one `(k + 1)`-point is allowed when the base
//! system `L(k; glued points)` is non-special of virtual dimension `-1`.
//! Then non-specialty of the glued system implies non-specialty of the
//! original one. The catalogue holds the six rules used here; each consumes
//! exactly `C(k + 3, 3)` conditions.

mod deduce;
mod known;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumeration::{QPolicy, FREE_Q_DEGREE, MAX_DEGREE, MIN_DEGREE};
use crate::error::{Error, Result};
use crate::model::{point_conditions, SystemSpec};

pub use deduce::{closure_audit, deduce, AuditReport, CertificateStore, Gap, ProofChain, ProofStep};
pub use known::KnownResults;

/// Points consumed by a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GluePattern {
    /// `count` double points.
    Doubles { count: u32 },
    /// `a` 4-points and `b` 3-points with `2a + b = total`.
    FourThree { total: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlueRule {
    /// Degree `k` of the base system.
    pub base_degree: u32,
    pub pattern: GluePattern,
    /// Multiplicity `k + 1` of the produced point.
    pub target: u32,
}

impl GlueRule {
    /// Rejects rules whose consumed conditions differ from those of the
    /// produced point.
    pub fn new(base_degree: u32, pattern: GluePattern) -> Result<Self> {
        let rule = GlueRule {
            base_degree,
            pattern,
            target: base_degree + 1,
        };
        let produced = point_conditions(rule.target);
        if rule.consumed_conditions() != produced {
            return Err(Error::InvalidGlueRule(format!(
                "{rule} consumes {} conditions but a {}-point imposes {produced}",
                rule.consumed_conditions(),
                rule.target
            )));
        }
        Ok(rule)
    }

    pub fn consumed_conditions(&self) -> u64 {
        match self.pattern {
            GluePattern::Doubles { count } => 4 * u64::from(count),
            GluePattern::FourThree { total } => 10 * u64::from(total),
        }
    }

    /// The six rules: `2^5 -> 4` and `4^a 3^b -> k + 1` with
    /// `2a + b = 22, 56, 68, 114, 154` over base degrees 9, 13, 14, 17, 19.
    pub fn catalogue() -> Vec<GlueRule> {
        let mut rules = vec![GlueRule::new(3, GluePattern::Doubles { count: 5 })];
        for (k, total) in [(9, 22), (13, 56), (14, 68), (17, 114), (19, 154)] {
            rules.push(GlueRule::new(k, GluePattern::FourThree { total }));
        }
        rules
            .into_iter()
            .map(|r| r.expect("catalogue rules preserve vdim"))
            .collect()
    }

    /// Every base system `L(k; pattern)` the rule depends on.
    pub fn base_family(&self) -> Vec<SystemSpec> {
        let k = self.base_degree;
        match self.pattern {
            GluePattern::Doubles { count } => vec![SystemSpec::new(k).with(2, count)],
            GluePattern::FourThree { total } => (0..=total / 2)
                .map(|a| SystemSpec::new(k).with(4, a).with(3, total - 2 * a))
                .collect(),
        }
    }

    /// Points this rule would consume from `spec`, preferring 4-points.
    fn consumption(&self, spec: &SystemSpec) -> Option<Vec<(u32, u32)>> {
        match self.pattern {
            GluePattern::Doubles { count } => (spec.count(2) >= count).then(|| vec![(2, count)]),
            GluePattern::FourThree { total } => {
                let a = spec.count(4).min(total / 2);
                let b = total - 2 * a;
                (spec.count(3) >= b).then(|| vec![(4, a), (3, b)])
            }
        }
    }
}

impl fmt::Display for GlueRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pattern {
            GluePattern::Doubles { count } => write!(f, "2^{count}->{}", self.target),
            GluePattern::FourThree { total } => {
                write!(f, "4^a3^b->{} (2a+b={total})", self.target)
            }
        }
    }
}

/// True iff every base system is known non-special with `vdim = -1`. The
/// ordering condition of the glueing theorem holds automatically because
/// the rules preserve `vdim`.
pub fn validate_glue_rule(rule: &GlueRule, known: &KnownResults) -> bool {
    rule.base_family()
        .iter()
        .all(|base| base.vdim() == -1 && known.knows(base))
}

/// Largest number of produced points of each multiplicity that glueing may
/// create in one system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueLimits {
    limits: Vec<(u32, u32)>,
}

impl GlueLimits {
    /// Only 2-point glueing.
    pub fn none() -> Self {
        GlueLimits { limits: Vec::new() }
    }

    /// 10-points as in the case lists: the fixed count below degree 22 and
    /// no limit from there on. Higher aggregates are not created.
    pub fn for_degree(d: u32) -> Self {
        let tens = if d >= FREE_Q_DEGREE {
            u32::MAX
        } else if (MIN_DEGREE..=MAX_DEGREE).contains(&d) {
            match QPolicy::for_degree(d) {
                Ok(QPolicy::Fixed(q)) => q,
                _ => 0,
            }
        } else {
            0
        };
        GlueLimits::none().with(10, tens)
    }

    pub fn with(mut self, multiplicity: u32, max: u32) -> Self {
        self.limits.retain(|&(m, _)| m != multiplicity);
        self.limits.push((multiplicity, max));
        self
    }

    /// 2-points are produced into 4-points without limit.
    pub fn max(&self, multiplicity: u32) -> u32 {
        if multiplicity == 4 {
            return u32::MAX;
        }
        self.limits
            .iter()
            .find(|&&(m, _)| m == multiplicity)
            .map_or(0, |&(_, c)| c)
    }
}

/// One application of a rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueStep {
    pub rule: String,
    /// `(multiplicity, count)` removed.
    pub consumed: Vec<(u32, u32)>,
    pub produced: u32,
}

/// Applies `2^5 -> 4` while at least five 2-points remain, then each
/// 4/3 rule in the given order while the produced count stays within the
/// limits. Rules other than these two shapes are ignored.
pub fn glue_reduce(spec: &SystemSpec, rules: &[GlueRule], limits: &GlueLimits) -> SystemSpec {
    glue_reduce_traced(spec, rules, limits).0
}

pub fn glue_reduce_traced(
    spec: &SystemSpec,
    rules: &[GlueRule],
    limits: &GlueLimits,
) -> (SystemSpec, Vec<GlueStep>) {
    let mut out = spec.clone();
    let mut steps = Vec::new();
    let doubles = rules
        .iter()
        .filter(|r| matches!(r.pattern, GluePattern::Doubles { .. }));
    let aggregates = rules
        .iter()
        .filter(|r| matches!(r.pattern, GluePattern::FourThree { .. }));
    for rule in doubles.chain(aggregates) {
        if rule.target > out.degree() {
            continue;
        }
        while out.count(rule.target) < limits.max(rule.target) {
            let Some(consumed) = rule.consumption(&out) else {
                break;
            };
            for &(m, c) in &consumed {
                out.remove_points(m, c);
            }
            out.add_points(rule.target, 1).expect("target is positive");
            steps.push(GlueStep {
                rule: rule.to_string(),
                consumed: consumed.into_iter().filter(|&(_, c)| c > 0).collect(),
                produced: rule.target,
            });
        }
    }
    (out, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::oracle::rational_oracle;
    use crate::model::binomial;
    use proptest::prelude::*;

    #[test]
    fn catalogue_is_exact() {
        let rules = GlueRule::catalogue();
        assert_eq!(rules.len(), 6);
        let names: Vec<String> = rules.iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            [
                "2^5->4",
                "4^a3^b->10 (2a+b=22)",
                "4^a3^b->14 (2a+b=56)",
                "4^a3^b->15 (2a+b=68)",
                "4^a3^b->18 (2a+b=114)",
                "4^a3^b->20 (2a+b=154)",
            ]
        );
        for (total, n) in [(22, 12), (56, 16), (68, 17), (114, 20), (154, 22)] {
            assert_eq!(10 * total, binomial(n, 3));
        }
        for r in &rules {
            assert_eq!(r.consumed_conditions(), point_conditions(r.target));
            for base in r.base_family() {
                assert_eq!(base.vdim(), -1, "{base}");
            }
        }
        assert!(GlueRule::new(9, GluePattern::FourThree { total: 21 }).is_err());
        assert!(GlueRule::new(3, GluePattern::Doubles { count: 4 }).is_err());
    }

    #[test]
    fn validation_follows_known_results() {
        let rules = GlueRule::catalogue();
        let mut known = KnownResults::cited();
        let valid: Vec<bool> = rules.iter().map(|r| validate_glue_rule(r, &known)).collect();
        assert_eq!(valid, [true, true, true, false, false, false]);
        known.complete_degree(14);
        assert!(validate_glue_rule(&rules[3], &known));
        known.complete_degree(17);
        known.complete_degree(19);
        assert!(rules.iter().all(|r| validate_glue_rule(r, &known)));
        assert!(!validate_glue_rule(&rules[0], &KnownResults::empty()));
    }

    #[test]
    fn glue_examples() {
        let rules = GlueRule::catalogue();
        let limits = GlueLimits::for_degree(30);
        let got = glue_reduce(&SystemSpec::new(30).with(2, 9), &rules, &limits);
        assert_eq!(got, SystemSpec::new(30).with(4, 1).with(2, 4));
        let got = glue_reduce(&SystemSpec::new(22).with(4, 11), &rules, &limits);
        assert_eq!(got, SystemSpec::new(22).with(10, 1));
        // Fixed q = 1 at degree 14.
        let got = glue_reduce(&SystemSpec::new(14).with(4, 30), &rules, &GlueLimits::for_degree(14));
        assert_eq!(got, SystemSpec::new(14).with(10, 1).with(4, 19));
        // 4-points are consumed before 3-points.
        let (got, steps) =
            glue_reduce_traced(&SystemSpec::new(25).with(4, 5).with(3, 20), &rules, &limits);
        assert_eq!(got, SystemSpec::new(25).with(10, 1).with(3, 8));
        assert_eq!(steps[0].consumed, vec![(4, 5), (3, 12)]);
        // No gluing beyond the degree.
        let got = glue_reduce(&SystemSpec::new(3).with(2, 5), &rules, &limits);
        assert_eq!(got, SystemSpec::new(3).with(2, 5));
    }

    #[test]
    fn glued_cases_are_within_bounds() {
        let rules = GlueRule::catalogue();
        for d in 22..=40 {
            let limits = GlueLimits::for_degree(d);
            for (x, y, z) in [(0, 0, 100), (40, 13, 7), (3, 200, 0), (10, 1, 4)] {
                let spec = SystemSpec::new(d).with(4, x).with(3, y).with(2, z);
                let g = glue_reduce(&spec, &rules, &limits);
                assert!(g.count(2) <= 4 && 2 * g.count(4) + g.count(3) <= 21, "{g}");
            }
        }
    }

    #[test]
    fn empty_systems_stay_empty_under_additions() {
        // If L(d; C) is empty, so is every system whose points dominate C.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for d in 1..=4u32 {
            for _ in 0..6 {
                let c = SystemSpec::new(d)
                    .with(3, rng.gen_range(0..2))
                    .with(2, rng.gen_range(0..5))
                    .with(1, rng.gen_range(0..6));
                if c.conditions() > 40 || rational_oracle(&c, 1).unwrap() != -1 {
                    continue;
                }
                let mut bigger = c.clone();
                bigger.add_points(2, 1).unwrap();
                let mut raised = c.clone();
                if raised.remove_points(1, 1) {
                    raised.add_points(3, 1).unwrap();
                }
                for g in [bigger, raised] {
                    if g.conditions() <= 60 {
                        assert_eq!(rational_oracle(&g, 2).unwrap(), -1, "{c} < {g}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn glueing_preserves_vdim(d in 9u32..45, x in 0u32..80, y in 0u32..80, z in 0u32..300) {
            let spec = SystemSpec::new(d).with(4, x).with(3, y).with(2, z);
            let rules = GlueRule::catalogue();
            let limits = GlueLimits::for_degree(d).with(14, 2).with(20, 1);
            let g = glue_reduce(&spec, &rules, &limits);
            prop_assert_eq!(g.vdim(), spec.vdim());
            prop_assert_eq!(g.monomials(), spec.monomials());
        }
    }
}
