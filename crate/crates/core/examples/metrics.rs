//! Confusion counts, per-class F1 and macro-F1.

use offenseval::corpus::Label::{Not, Off};
use offenseval::corpus::Task;
use offenseval::evaluation::{confusion, EvalReport};

fn main() -> offenseval::Result<()> {
    let truth = [Off, Not, Off, Not];
    let predicted = [Off, Off, Off, Not];
    let c = confusion(&truth, &predicted, Task::A.classes())?;
    for (label, counts) in c.classes().iter().zip(c.counts()) {
        println!(
            "{label}: tp={} fp={} fn={} precision={:.4} recall={:.4} f1={:.4}",
            counts.tp,
            counts.fp,
            counts.fn_,
            counts.precision(),
            counts.recall(),
            counts.f1()
        );
    }
    let report = EvalReport::from_confusion(&c);
    println!("{report}");
    for (k, v) in report.key_values("") {
        println!("{k} = {v}");
    }

    // A class absent from both truth and predictions still counts, with F1 0.
    let c = confusion(&[Off, Off], &[Off, Off], Task::A.classes())?;
    println!("all OFF, predicted OFF: macro-F1 {:.2}", c.macro_f1());
    Ok(())
}
