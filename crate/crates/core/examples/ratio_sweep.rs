//! Improved-to-classical cost ratios over a batch of random instances.
//! Instances without liftable multiple roots should sit around 0.45 to 0.67
//! once u is in the hundreds.
//!
//! ```bash
//! cargo run --release --example ratio_sweep
//! ```

use nfs_sieve::experiments::{ratio_sweep, SweepConfig};

fn main() -> nfs_sieve::Result<()> {
    let configs: Vec<SweepConfig> = (0..8)
        .map(|i| SweepConfig { degree: 2 + (i % 3) as usize, m: 25, u: 500, y: 100, seed: i })
        .collect();
    for r in ratio_sweep(&configs)? {
        println!(
            "{:>2} f={:<24} classical {:>8} improved {:>8} ratio {:.4} correction {:>4}{}",
            r.instance,
            r.poly,
            r.classical_total,
            r.improved_total,
            r.ratio,
            r.correction_total,
            if r.outside_expected_band { "  outside band" } else { "" }
        );
    }
    Ok(())
}
