#![no_main]

use libfuzzer_sys::fuzz_target;
use wordseg::PhonemeInventory;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inv) = PhonemeInventory::parse(text) {
        let again = PhonemeInventory::parse(&inv.to_text()).expect("rendered inventory reparses");
        assert_eq!(again, inv);
        assert_eq!(inv.sentinel() as usize, inv.len());
    }
});
