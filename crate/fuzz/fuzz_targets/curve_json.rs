#![no_main]

use libfuzzer_sys::fuzz_target;
use raylab::curves::CurveFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = CurveFile::from_json_str(text) else { return };
    if let Ok(curve) = file.build() {
        let _ = curve.eval(curve.start());
        let _ = curve.eval(curve.end());
    }
});
