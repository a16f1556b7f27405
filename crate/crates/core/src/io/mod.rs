//! Scene files, expression parsers and standard complexes.

pub mod builders;
pub mod expr;
pub mod scene;

pub use expr::{parse_group_ring, parse_word, ExprError};
pub use scene::{parse_scene, print_scene, Scene, SceneError};

/// Replays the fuzz-target invariants over the checked-in corpus.
#[cfg(test)]
mod corpus_tests {
    use std::path::PathBuf;

    use super::*;

    fn corpus(target: &str) -> Vec<(String, String)> {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("fuzz/corpus")
            .join(target);
        let mut out: Vec<_> = std::fs::read_dir(&dir)
            .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
            .map(|e| {
                let p = e.unwrap().path();
                (
                    p.display().to_string(),
                    std::fs::read_to_string(&p).unwrap(),
                )
            })
            .collect();
        out.sort();
        assert!(!out.is_empty());
        out
    }

    #[test]
    fn word_seeds() {
        let mut ok = 0;
        for (_, text) in corpus("parse_word") {
            if let Ok(w) = parse_word(&text, &['a', 'b', 'c']) {
                let s = w.syllables();
                assert!(s.iter().all(|&(_, e)| e != 0));
                assert!(s.windows(2).all(|p| p[0].0 != p[1].0));
                ok += 1;
            }
        }
        assert!(ok >= 5);
    }

    #[test]
    fn group_ring_seeds() {
        let parsed = corpus("parse_group_ring")
            .iter()
            .filter(|(_, t)| parse_group_ring(t, &['g', 'h']).is_ok())
            .count();
        assert!(parsed >= 4);
    }

    #[test]
    fn scene_seeds_round_trip() {
        for (path, text) in corpus("parse_scene") {
            let scene = parse_scene(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
            let again = parse_scene(&print_scene(&scene)).unwrap();
            assert!(again.complex.same_structure(&scene.complex), "{path}");
            assert_eq!(again.representation, scene.representation, "{path}");
        }
    }
}
