#![no_main]

use libfuzzer_sys::fuzz_target;
use zeno_scenario::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        for cfg in [ScenarioConfig::from_toml_str(text), ScenarioConfig::from_json_str(text)]
            .into_iter()
            .flatten()
        {
            // resolution validates every field; it must reject, not panic
            let _ = cfg.resolve();
        }
    }
});
