#![no_main]

use libfuzzer_sys::fuzz_target;
use pgonal::nec::NecSignature;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(sig) = text.parse::<NecSignature>() else { return };
    let printed = sig.to_string();
    let again: NecSignature = printed.parse().expect("printed signature parses");
    assert_eq!(again.to_string(), printed);
    if sig.is_valid() {
        let _ = sig.normalized_area();
        let _ = sig.genus_of_surface_kernel(12);
    }
});
