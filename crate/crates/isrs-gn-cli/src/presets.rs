//! Built-in example configurations, one per shipped experiment. The JSON
//! files are the source of truth; they parse through the same schema as user
//! configs.

pub const PRESETS: &[(&str, &str)] = &[
    ("pair-scan", include_str!("../presets/pair-scan.json")),
    ("span-spectrum", include_str!("../presets/span-spectrum.json")),
    ("multi-span", include_str!("../presets/multi-span.json")),
    ("network-scenario", include_str!("../presets/network-scenario.json")),
    ("tilted-launch", include_str!("../presets/tilted-launch.json")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
