#![no_main]

use libfuzzer_sys::fuzz_target;
use pgonal::groups::GroupSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = text.parse::<GroupSpec>() else { return };
    let again: GroupSpec = spec.to_string().parse().expect("printed spec parses");
    assert_eq!(again, spec);
    if spec.order() <= 64 {
        let elems = spec.elements();
        assert_eq!(elems.len(), spec.order());
        let a = &elems[elems.len() / 2];
        let b = &elems[elems.len() - 1];
        let ab = spec.mul(a, b).unwrap();
        assert_eq!(spec.mul(&ab, &spec.inv(b).unwrap()).unwrap(), *a);
    }
});
