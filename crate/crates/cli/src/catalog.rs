//! Example scenes shipped inside the binary.

macro_rules! scenes {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenes/", $name, ".toml")))),*]
    };
}

/// `(name, source)` in listing order.
pub const EXAMPLES: &[(&str, &str)] = scenes![
    "pn-xid",
    "pn-J2",
    "lnb-tangent-xid",
    "lnb-holomorphic-J2",
    "lnb-pi0-J2",
    "bialgebra-aff2",
    "bialgebra-aff2-perturbed",
    "algebroid-jacobi-defect",
    "kosmann-roundtrip",
    "mm1-random",
    "hierarchy-xid",
    "lifts",
    "builders",
];

pub fn get(name: &str) -> Option<&'static str> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    EXAMPLES.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    #[test]
    fn every_example_parses() {
        for (name, src) in EXAMPLES {
            parse_scene(src, lnlab_core::Limits::default())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn required_names_are_present() {
        for n in [
            "pn-xid",
            "pn-J2",
            "lnb-tangent-xid",
            "lnb-holomorphic-J2",
            "bialgebra-aff2",
            "kosmann-roundtrip",
            "mm1-random",
            "hierarchy-xid",
        ] {
            assert!(get(n).is_some(), "{n}");
        }
        assert!(get("nope").is_none());
    }
}
