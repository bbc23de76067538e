#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_gram::io::{decode_divisor_table, encode_divisor_table};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(table) = decode_divisor_table(text) {
            assert_eq!(decode_divisor_table(&encode_divisor_table(&table)).unwrap(), table);
        }
    }
});
