//! Cleaning, root reduction and padded index encoding of raw tweets.

use offenseval::preprocess::{clean, stem_porter, Preprocessor, RootMode, VerbLemmatizer, Vocabulary};

fn main() {
    let tweets = [
        "@USER she is a FOOL!! 💩 #Angry123",
        "@USER @USER Liberals are running the ponies into the ground URL",
        "Good morning everyone, have a great day",
    ];
    for t in &tweets {
        println!("{t:?}\n  -> {:?}", clean(t));
    }

    let lemma = VerbLemmatizer::default();
    for w in ["running", "ponies", "cries", "went", "hopping"] {
        println!("{w:>8}: stem {:<8} lemma {}", stem_porter(w), lemma.lemmatize(w));
    }

    for mode in [RootMode::None, RootMode::Stem, RootMode::Lemma] {
        println!("{mode:>5}: {:?}", Preprocessor::new(mode).tokens(tweets[1]));
    }

    // Index 0 pads, index 1 stands for any unknown word.
    let p = Preprocessor::new(RootMode::Stem);
    let corpus: Vec<Vec<String>> = tweets.iter().map(|t| p.tokens(t)).collect();
    let vocab = Vocabulary::build(&corpus);
    let seq = vocab.encode(&p.tokens("the fool is running again"), 8);
    println!("vocabulary of {} words", vocab.len());
    println!("{:?} (true length {})", seq.indices(), seq.true_length());
    println!("{:?}", vocab.decode(&seq));
}
