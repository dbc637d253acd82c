#![no_main]

use libfuzzer_sys::fuzz_target;
use pgonal::cli::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = text.parse::<Config>() {
        assert_ne!(cfg.budget, Some(0));
        assert_ne!(cfg.workers, Some(0));
    }
});
