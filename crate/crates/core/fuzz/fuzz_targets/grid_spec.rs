#![no_main]

use flatfront::front::GridSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(g) = data.parse::<GridSpec>() {
        let _ = g.validate();
    }
});
