#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_gram::io::{decode_resonator, encode_resonator};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(res) = decode_resonator(text) {
            let _ = res.sum_f_squared();
            let _ = res.support_violations();
            let again = decode_resonator(&encode_resonator(&res)).expect("encoded dump decodes");
            assert_eq!(again.support, res.support);
        }
    }
});
