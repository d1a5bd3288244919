//! Smooth TF-IDF: idf = ln(n / (df + 1)), raw counts as term frequency.

use offenseval::features::fit_tfidf;

fn main() -> offenseval::Result<()> {
    let corpus = vec![
        vec!["you", "are", "a", "fool"],
        vec!["fool", "fool", "again"],
        vec!["have", "a", "nice", "day"],
        vec!["what", "a", "day"],
    ];
    let model = fit_tfidf(&corpus)?;
    println!("{:<6} {:>3} {:>9}", "term", "df", "idf");
    for ((t, df), idf) in model.terms().iter().zip(model.df()).zip(model.idf()) {
        println!("{t:<6} {df:>3} {idf:>9.5}");
    }

    // Zero products are dropped from the sparse row; unseen words are ignored.
    for doc in [vec!["fool", "fool", "day"], vec!["a", "brand", "new"]] {
        let v = model.transform(&doc);
        let named: Vec<String> = v.pairs().iter().map(|&(c, x)| format!("{}={x:.4}", model.terms()[c])).collect();
        println!("{doc:?} -> {{{}}}", named.join(", "));
    }
    Ok(())
}
