//! Presets, parameter files and sample instances shipped with the crate.

const FILES: &[(&str, &str)] = &[
    ("canonical.inst", include_str!("../data/canonical.inst")),
    ("cellsim.scenario", include_str!("../data/cellsim.scenario")),
    ("fig3.preset", include_str!("../data/fig3.preset")),
    ("fig12.preset", include_str!("../data/fig12.preset")),
    ("fig14.preset", include_str!("../data/fig14.preset")),
    ("fig16.preset", include_str!("../data/fig16.preset")),
    ("fixedwing.params", include_str!("../data/fixedwing.params")),
    ("ground_terminals.csv", include_str!("../data/ground_terminals.csv")),
    ("placement.preset", include_str!("../data/placement.preset")),
    ("plan.preset", include_str!("../data/plan.preset")),
    ("rotary_illustrative.params", include_str!("../data/rotary_illustrative.params")),
    ("tgpp_rma.preset", include_str!("../data/tgpp_rma.preset")),
    ("tgpp_uma.preset", include_str!("../data/tgpp_uma.preset")),
    ("tgpp_umi.preset", include_str!("../data/tgpp_umi.preset")),
    ("ula8.preset", include_str!("../data/ula8.preset")),
    ("ura8x4.preset", include_str!("../data/ura8x4.preset")),
    ("waypoints.csv", include_str!("../data/waypoints.csv")),
];

/// Contents of a built-in file by name.
pub fn builtin(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kv::KvFile;

    #[test]
    fn presets_parse() {
        for name in builtin_names().filter(|n| !n.ends_with(".csv")) {
            KvFile::parse(builtin(name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(builtin("missing.preset").is_none());
    }
}
