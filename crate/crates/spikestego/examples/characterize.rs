//! Sweeps the stimulation current until all ten spike-count levels
//! resolve, then prints the level table and the per-digit spike patterns.
//!
//!     cargo run --example characterize

use spikestego::lif::{self, LifParams, SweepConfig};

fn main() -> spikestego::Result<()> {
    let params = LifParams::default();
    let sweep = SweepConfig::default();

    println!(
        "sweeping from {} pA in {} pA steps (tau_m {} ms, refractory {} ms)",
        sweep.i_start_pa, sweep.di_pa, params.tau_m_ms, params.t_ref_ms
    );
    let result = lif::characterize(&params, &sweep)?;
    println!("simulated {} currents\n", result.swept.len());

    println!("{:>6}  {:>10}", "spikes", "current");
    for level in &result.levels {
        println!("{:>6}  {:>7.1} pA", level.spike_count, level.current_pa);
    }

    // Re-simulate each level current and quantize spike times to grid
    // milliseconds: these integer patterns drive the codebook.
    let patterns = lif::digit_patterns(&params, &result.levels)?;
    println!("\ndigit  spike pattern (ms)");
    for (digit, pattern) in patterns.iter().enumerate() {
        println!("{digit:>5}  {pattern:?}");
    }
    Ok(())
}
