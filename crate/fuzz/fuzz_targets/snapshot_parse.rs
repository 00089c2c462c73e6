#![no_main]

use libfuzzer_sys::fuzz_target;
use wordseg::{LanguageModel, PhonemeInventory};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let inv = PhonemeInventory::english();
    if let Ok(model) = LanguageModel::from_snapshot(text, &inv) {
        let rendered = model.to_snapshot(&inv);
        let again = LanguageModel::from_snapshot(&rendered, &inv).expect("rendered snapshot reparses");
        assert_eq!(again.to_snapshot(&inv), rendered);
    }
});
