#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_scenario::csv::read_wigner_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = read_wigner_csv(text);
    }
});
