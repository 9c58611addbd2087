#![no_main]

use flatfront::spec::CurveSpec;
use flatfront::C64;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 2048 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = CurveSpec::from_json(text) else { return };
    let _ = spec.to_json();
    if let Ok(built) = spec.build() {
        let _ = built.sample(C64::new(1.3, 0.4));
    }
});
