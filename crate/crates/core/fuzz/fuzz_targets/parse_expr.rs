#![no_main]

use flatfront::expr::{eval_principal, parse_expr, ParseError};
use flatfront::C64;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if data.len() > 512 {
        return;
    }
    let Ok(e) = parse_expr(data) else { return };
    let z = C64::new(0.7, -0.3);
    let v = eval_principal(&e, z);
    let _ = eval_principal(&e.derivative(), z);
    // printing must reparse to the same function; only the nesting limit may refuse it
    match parse_expr(&e.to_string()) {
        Ok(back) => {
            if let (Ok(a), Ok(b)) = (v, eval_principal(&back, z)) {
                if a.is_finite() && a.norm() < 1e100 {
                    assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0), "{} vs {}", a, b);
                }
            }
        }
        Err(ParseError::TooDeep { .. }) => {}
        Err(err) => panic!("Display output does not reparse: {}", err),
    }
});
