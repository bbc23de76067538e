#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_gram::io::GramCache;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cache) = GramCache::decode(text) {
            let again = GramCache::decode(&cache.encode()).expect("encoded cache decodes");
            assert_eq!(again.points.len(), cache.points.len());
        }
    }
});
