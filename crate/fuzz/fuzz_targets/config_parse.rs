//! Fuzzes the TOML config pipeline: parse then resolve. Any input must
//! either produce a resolved experiment or a structured error; panics and
//! hangs are bugs.

#![no_main]

use libfuzzer_sys::fuzz_target;

use kicksim::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_str(text) {
        let _ = cfg.resolve();
    }
});
