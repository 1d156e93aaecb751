use std::collections::BTreeSet;

use crate::model::SystemSpec;

/// Systems known to be non-special without a certificate in the store.
///
/// Seeded with the cited theorems (every `L(d; 4^x, 3^y, 2^z)` for
/// `9 <= d <= 13` and for `d >= 41`) and with `L(3; 2^5)`. A degree whose
/// campaign finished with every case non-special is added as a whole.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnownResults {
    cited: bool,
    systems: BTreeSet<String>,
    degrees: BTreeSet<u32>,
}

impl KnownResults {
    pub fn empty() -> Self {
        KnownResults::default()
    }

    pub fn cited() -> Self {
        let mut known = KnownResults {
            cited: true,
            ..KnownResults::default()
        };
        known.add_system(&SystemSpec::new(3).with(2, 5));
        known
    }

    pub fn add_system(&mut self, spec: &SystemSpec) {
        self.systems.insert(spec.to_string());
    }

    pub fn complete_degree(&mut self, d: u32) {
        self.degrees.insert(d);
    }

    pub fn completed_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.degrees.iter().copied()
    }

    /// Cited source for `spec`, if a theorem covers it.
    pub fn citation(&self, spec: &SystemSpec) -> Option<&'static str> {
        if !self.cited || !spec.multiplicities_within(&[4, 3, 2]) {
            return None;
        }
        match spec.degree() {
            9..=13 => Some("cited theorem: 4/3/2-point systems for 9 <= d <= 13"),
            d if d >= 41 => Some("cited theorem: 4/3/2-point systems for d >= 41"),
            _ => None,
        }
    }

    pub fn knows(&self, spec: &SystemSpec) -> bool {
        self.citation(spec).is_some()
            || self.systems.contains(&spec.to_string())
            || (self.degrees.contains(&spec.degree()) && spec.multiplicities_within(&[4, 3, 2]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_results() {
        let known = KnownResults::cited();
        assert!(known.knows(&SystemSpec::new(3).with(2, 5)));
        assert!(!known.knows(&SystemSpec::new(3).with(2, 4)));
        assert!(known.knows(&SystemSpec::new(9).with(4, 11)));
        assert!(known.knows(&SystemSpec::new(13).with(4, 3).with(3, 50)));
        assert!(known.knows(&SystemSpec::new(41).with(2, 1000)));
        assert!(!known.knows(&SystemSpec::new(14).with(4, 34)));
        assert!(!known.knows(&SystemSpec::new(12).with(10, 1)));
        let mut known = known;
        known.complete_degree(14);
        assert!(known.knows(&SystemSpec::new(14).with(4, 34)));
        assert!(!KnownResults::empty().knows(&SystemSpec::new(9).with(4, 11)));
    }
}
