//! Surface files shipped with the binary.

use std::path::Path;

pub const BUNDLED: &[(&str, &str)] = &[
    ("p2", include_str!("../fixtures/p2.surface")),
    ("p1xp1", include_str!("../fixtures/p1xp1.surface")),
    ("p1xe", include_str!("../fixtures/p1xe.surface")),
    ("f1", include_str!("../fixtures/f1.surface")),
    ("exe", include_str!("../fixtures/exe.surface")),
    ("k3_s1", include_str!("../fixtures/k3_s1.surface")),
    ("k3_s2", include_str!("../fixtures/k3_s2.surface")),
];

/// Bundled source for `name`, with or without the `.surface` suffix.
pub fn bundled(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".surface").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, s)| *s)
}

/// Reads `arg` from disk if such a file exists, otherwise falls back to the
/// bundled fixture of that name.
pub fn read_source(arg: &str) -> std::io::Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path);
    }
    match bundled(arg) {
        Some(s) => Ok(s.to_string()),
        None => std::fs::read_to_string(path),
    }
}
