use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use texo_core::bpe::{parse_merges, parse_vocab, METASPACE};
use texo_core::BaseTokenizer;
use texo_testkit::{data_dir, gen, oracle};

fn tokenizer(vocab: &[String], merges: &[(String, String)]) -> BaseTokenizer {
    let entries = vocab.iter().cloned().zip(0..);
    BaseTokenizer::new(entries, merges.to_vec(), METASPACE).unwrap()
}

fn strings(tok: &BaseTokenizer, ids: &[u32]) -> Vec<String> {
    ids.iter()
        .map(|&id| tok.token(id).unwrap().to_owned())
        .collect()
}

#[test]
fn exhaustive_against_reference_on_three_letters() {
    let alphabet = ['a', 'b', 'c'];
    let words = gen::all_strings(&alphabet, 6);
    assert_eq!(words.len(), 1093);
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (vocab, merges) = gen::merge_table(&mut rng, &alphabet, 12);
        let tok = tokenizer(&vocab, &merges);
        for w in &words {
            let got = strings(&tok, &tok.encode(w).unwrap());
            assert_eq!(
                got,
                oracle::naive_bpe(w, &merges),
                "table {seed}, word {w:?}"
            );
        }
    }
}

proptest! {
    #[test]
    fn matches_reference_on_random_tables(seed in any::<u64>(), word in "[abcd]{0,12}", n in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (vocab, merges) = gen::merge_table(&mut rng, &['a', 'b', 'c', 'd'], n);
        let tok = tokenizer(&vocab, &merges);
        let ids = tok.encode(&word).unwrap();
        prop_assert_eq!(strings(&tok, &ids), oracle::naive_bpe(&word, &merges));
        prop_assert_eq!(tok.decode(&ids).unwrap(), word);
    }

    #[test]
    fn marker_words_concatenate(seed in any::<u64>(), words in prop::collection::vec("[ab]{1,5}", 0..5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut vocab, merges) = gen::merge_table(&mut rng, &['a', 'b'], 6);
        vocab.push(METASPACE.to_owned());
        let tok = tokenizer(&vocab, &merges);
        let text = words.join(" ");
        let mut expected = Vec::new();
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                expected.push(METASPACE.to_owned());
            }
            expected.extend(oracle::naive_bpe(w, &merges));
        }
        let got = strings(&tok, &tok.encode_text(&text).unwrap());
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn parses_published_files() {
    let dir = data_dir().join("gpt2");
    let tok =
        BaseTokenizer::load(dir.join("vocab.json"), dir.join("merges.txt"), "\u{120}").unwrap();
    assert_eq!(tok.len(), 50_257);
    assert_eq!(tok.merges().len(), 50_000);

    let ids = tok.encode("\\leftarrow").unwrap();
    assert!(ids.len() >= 2, "{ids:?}");
    assert_eq!(tok.decode(&ids).unwrap(), "\\leftarrow");
    assert_eq!(
        tok.encode_text("x y").unwrap(),
        [tok.id("x").unwrap(), tok.id("\u{120}y").unwrap()]
    );
}

#[test]
fn vocab_formats_agree() {
    let json = parse_vocab(r#"{"a": 0, "b": 1, "ab": 2}"#).unwrap();
    let tsv = parse_vocab("a\t0\nb\t1\nab\t2\n").unwrap();
    let mut j = json.clone();
    j.sort();
    let mut t = tsv.clone();
    t.sort();
    assert_eq!(j, t);
    assert_eq!(
        parse_merges("#version: 0.2\na b\n\n").unwrap(),
        [("a".to_string(), "b".to_string())]
    );
    assert!(parse_merges("a b c\n").is_err());
}
