//! Compare backpropagated gradients with central finite differences.

use offenseval::neural::{grad_check, NeuralKind, TinyConfig};

fn main() -> offenseval::Result<()> {
    let config = TinyConfig::default();
    println!(
        "vocab {} embed {} hidden {} filters {} x {:?}, sequence {}/{}",
        config.vocab_rows,
        config.embed_dim,
        config.hidden_size,
        config.n_filters,
        config.kernel_sizes,
        config.true_length,
        config.seq_len
    );
    for kind in NeuralKind::ALL {
        let errors = (0..5).map(|seed| grad_check(kind, &config, seed)).collect::<offenseval::Result<Vec<_>>>()?;
        let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
        println!("{:>4}: max relative error per seed {}", kind.as_str(), shown.join(" "));
    }
    Ok(())
}
