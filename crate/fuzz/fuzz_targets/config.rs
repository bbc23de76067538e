#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_gram::verify::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::from_config_text(text) {
            let _ = cfg.validate();
            let _ = cfg.hash();
        }
    }
});
