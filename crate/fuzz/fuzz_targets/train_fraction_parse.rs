#![no_main]

use libfuzzer_sys::fuzz_target;
use wordseg::TrainFraction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = text.parse::<TrainFraction>() {
        assert!(f.as_f64() >= 0.0 && f.as_f64() <= 1.0);
        let again: TrainFraction = f.to_string().parse().expect("rendered fraction reparses");
        assert_eq!(again, f);
        assert!(f.of(10_000) <= 10_000);
    }
});
