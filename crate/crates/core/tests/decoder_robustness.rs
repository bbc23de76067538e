//! Runs every text decoder over the checked-in fuzz corpus and over
//! arbitrary strings; decoders must return errors rather than panic, and
//! anything they accept must survive a re-encode.

use std::path::PathBuf;

use proptest::prelude::*;
use zeta_gram::io::{decode_divisor_table, decode_resonator, encode_divisor_table, encode_resonator, GramCache};
use zeta_gram::verify::RunConfig;

fn exercise(target: &str, text: &str) -> bool {
    match target {
        "config" => RunConfig::from_config_text(text).map(|c| c.hash().len() == 64).is_ok(),
        "gram_cache" => GramCache::decode(text).map(|c| assert_eq!(GramCache::decode(&c.encode()).unwrap(), c)).is_ok(),
        "divisor_table" => decode_divisor_table(text)
            .map(|t| assert_eq!(decode_divisor_table(&encode_divisor_table(&t)).unwrap(), t))
            .is_ok(),
        "resonator_dump" => decode_resonator(text)
            .map(|r| assert_eq!(decode_resonator(&encode_resonator(&r)).unwrap().support, r.support))
            .is_ok(),
        _ => unreachable!(),
    }
}

#[test]
fn corpus_seeds_decode_as_expected() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let rejected = ["duplicate", "gap", "short", "not_squarefree"];
    let mut seen = 0;
    for target in ["config", "gram_cache", "divisor_table", "resonator_dump"] {
        for entry in std::fs::read_dir(root.join(target)).unwrap() {
            let path = entry.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            let name = path.file_name().unwrap().to_str().unwrap();
            assert_eq!(exercise(target, &text), !rejected.contains(&name), "{target}/{name}");
            seen += 1;
        }
    }
    assert!(seen >= 12);
}

proptest! {
    #[test]
    fn decoders_never_panic(text in "(# [a-zA-Z_]{1,8}=[0-9.e-]{0,6}\n){0,4}(n,[a-z]\n)?([0-9-]{1,4},[0-9.e+-]{0,8}\n){0,8}") {
        for target in ["config", "gram_cache", "divisor_table", "resonator_dump"] {
            exercise(target, &text);
        }
    }

    #[test]
    fn decoders_never_panic_on_noise(text in "\\PC{0,200}") {
        for target in ["config", "gram_cache", "divisor_table", "resonator_dump"] {
            exercise(target, &text);
        }
    }
}
