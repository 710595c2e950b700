#![no_main]

use libfuzzer_sys::fuzz_target;
use raylab::config::{Config, GameSection};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::from_toml_str(text) {
        let _ = cfg.game_config(&GameSection::default());
        let again = Config::from_toml_str(&cfg.to_toml_string()).expect("serialized config parses");
        assert_eq!(again.file, cfg.file);
    }
});
