//! Enumeration limits. Exceeding one is always a hard error.

use crate::error::{Error, Result};

pub const CAPS_ENV: &str = "ENDOCALC_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest torsion subgroup whose elements may be listed.
    pub torsion_order: u64,
    /// Largest number of subgroups a subgroup lattice may hold.
    pub subgroup_count: u64,
    /// Largest word bound accepted by slice enumeration.
    pub word_bound: usize,
    /// Largest number of distinct elements in an enumeration slice.
    pub slice_elements: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { torsion_order: 10_000, subgroup_count: 100_000, word_bound: 5, slice_elements: 100_000 }
    }
}

impl Caps {
    /// Parses overrides such as `torsion=20000,subgroups=5000,word_bound=6,elements=1000`.
    pub fn parse(spec: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Precondition(format!("malformed cap override `{item}`")))?;
            let parsed: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Precondition(format!("cap `{key}` needs an unsigned integer")))?;
            match key.trim() {
                "torsion" => caps.torsion_order = parsed,
                "subgroups" => caps.subgroup_count = parsed,
                "word_bound" => caps.word_bound = parsed as usize,
                "elements" => caps.slice_elements = parsed,
                other => return Err(Error::Precondition(format!("unknown cap `{other}`"))),
            }
        }
        Ok(caps)
    }

    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::parse(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_only_named_caps() {
        let caps = Caps::parse("torsion=64, word_bound=3").unwrap();
        assert_eq!(caps.torsion_order, 64);
        assert_eq!(caps.word_bound, 3);
        assert_eq!(caps.subgroup_count, Caps::default().subgroup_count);
        assert!(Caps::parse("depth=3").is_err());
    }
}
