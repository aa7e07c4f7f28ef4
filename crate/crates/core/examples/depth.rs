//! Minimal tour: build a function, measure its spectrum, solve for depth.

use pdtlab::{solver, spectral, Family};

fn main() -> pdtlab::Result<()> {
    let f = Family::parse("maj:5")?.build()?;
    let s = spectral::wht(&f);
    assert_eq!(s.granularity(), 3); // 5 - popcount(5)
    let report = solver::exact_depth(&f, &Default::default());
    assert_eq!(report.exact(), Some(4)); // granularity + 1
    println!(
        "maj:5  spar={} gran={} depth={:?}",
        s.sparsity(),
        s.granularity(),
        report.exact()
    );
    Ok(())
}
