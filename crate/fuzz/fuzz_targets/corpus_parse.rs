#![no_main]

use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use wordseg::{Corpus, PhonemeInventory};

fuzz_target!(|data: &[u8]| {
    let inventory = Arc::new(PhonemeInventory::english());
    if let Ok(corpus) = Corpus::parse(data, inventory.clone()) {
        // Whatever parses must survive a print/parse round trip.
        let text = corpus.to_text();
        let again = Corpus::parse(text.as_bytes(), inventory).expect("rendered corpus reparses");
        assert_eq!(again.utterances(), corpus.utterances());
        let _ = corpus.stats();
    }
});
