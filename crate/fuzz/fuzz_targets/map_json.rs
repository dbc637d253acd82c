#![no_main]

use libfuzzer_sys::fuzz_target;
use pgonal::actions::{check, SurfaceKernelMap};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(map) = SurfaceKernelMap::from_json(text) else { return };
    let again = SurfaceKernelMap::from_json(&map.to_json()).expect("printed map parses");
    assert_eq!(again, map);
    if map.group.order() <= 256 {
        let _ = check(&map);
    }
});
