//! Leaky integrate-and-fire neuron with closed-form updates on a sampling grid.
//!
//! Between consecutive grid points the membrane relaxes exponentially toward
//! `e_l + R*i_dc` with time constant `tau_m`, where `R = tau_m / c_m`; with
//! capacitance in pF, time in ms and current in pA the drive `R*i_dc` comes
//! out directly in mV. Threshold crossings are observed at grid points only:
//! when the freshly integrated potential reaches `v_th` the step counts as a
//! spike, the potential resets to `v_reset` on that same point and stays
//! pinned there through the last grid point before `t_ref` has elapsed. The
//! earliest possible inter-spike interval is therefore `t_ref + dt`.

use crate::error::{Error, Result};

/// Membrane constants and stimulation protocol.
///
/// `tau_syn_ex_ms`/`tau_syn_in_ms` are carried for completeness but do not
/// enter the dynamics: stimulation is a constant current, not synaptic input.
#[derive(Debug, Clone, PartialEq)]
pub struct LifParams {
    pub c_m_pf: f64,
    pub tau_m_ms: f64,
    pub t_ref_ms: f64,
    pub e_l_mv: f64,
    pub v_th_mv: f64,
    pub v_reset_mv: f64,
    /// Potential at t = 0.
    pub v_m0_mv: f64,
    pub t_sim_ms: f64,
    pub dt_ms: f64,
    pub tau_syn_ex_ms: f64,
    pub tau_syn_in_ms: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        LifParams {
            c_m_pf: 250.0,
            tau_m_ms: 10.0,
            t_ref_ms: 2.0,
            e_l_mv: 0.0,
            v_th_mv: 20.0,
            v_reset_mv: 10.0,
            v_m0_mv: -70.0,
            t_sim_ms: 60.0,
            dt_ms: 0.1,
            tau_syn_ex_ms: 0.5,
            tau_syn_in_ms: 0.5,
        }
    }
}

impl LifParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.c_m_pf,
            self.tau_m_ms,
            self.t_ref_ms,
            self.e_l_mv,
            self.v_th_mv,
            self.v_reset_mv,
            self.v_m0_mv,
            self.t_sim_ms,
            self.dt_ms,
            self.tau_syn_ex_ms,
            self.tau_syn_in_ms,
        ];
        if fields.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.dt_ms <= 0.0 {
            return Err(Error::InvalidParams("dt must be positive".into()));
        }
        if self.t_sim_ms < self.dt_ms {
            return Err(Error::InvalidParams(
                "t_sim must cover at least one step".into(),
            ));
        }
        if self.tau_m_ms <= 0.0 {
            return Err(Error::InvalidParams("tau_m must be positive".into()));
        }
        if self.c_m_pf <= 0.0 {
            return Err(Error::InvalidParams("c_m must be positive".into()));
        }
        if self.t_ref_ms < 0.0 {
            return Err(Error::InvalidParams("t_ref cannot be negative".into()));
        }
        if self.v_th_mv <= self.v_reset_mv {
            return Err(Error::InvalidParams("v_th must exceed v_reset".into()));
        }
        Ok(())
    }

    /// Integration steps after t = 0.
    pub fn n_steps(&self) -> u32 {
        (self.t_sim_ms / self.dt_ms + 1e-9).floor() as u32
    }

    /// Grid points the potential stays pinned after a spike. The small bias
    /// keeps `t_ref/dt` ratios that are integers up to rounding from gaining
    /// an extra step.
    pub fn ref_steps(&self) -> u32 {
        (self.t_ref_ms / self.dt_ms - 1e-9).ceil().max(0.0) as u32
    }

    /// Membrane resistance in GOhm.
    pub fn resistance(&self) -> f64 {
        self.tau_m_ms / self.c_m_pf
    }
}

/// Spikes produced by one constant-current run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    /// Grid step of each spike, 1-based; step k sits at `k * dt`.
    pub steps: Vec<u32>,
    /// Spike times in ms, derived from the step index.
    pub times_ms: Vec<f64>,
    /// Potential at every grid point after reset handling; entry 0 is `v_m0`.
    pub potentials: Vec<f64>,
}

impl SpikeTrain {
    pub fn count(&self) -> u32 {
        self.steps.len() as u32
    }
}

/// Integrates the membrane under a constant current of `i_dc_pa` picoamperes.
pub fn simulate(params: &LifParams, i_dc_pa: f64) -> Result<SpikeTrain> {
    params.validate()?;
    if !i_dc_pa.is_finite() || i_dc_pa < 0.0 {
        return Err(Error::InvalidParams(
            "stimulation current must be finite and non-negative".into(),
        ));
    }
    let n_steps = params.n_steps();
    let ref_steps = params.ref_steps();
    let v_inf = params.e_l_mv + params.resistance() * i_dc_pa;
    let decay = (-params.dt_ms / params.tau_m_ms).exp();

    let mut v = params.v_m0_mv;
    let mut pinned_until = 0u32;
    let mut steps = Vec::new();
    let mut potentials = Vec::with_capacity(n_steps as usize + 1);
    potentials.push(v);
    for k in 1..=n_steps {
        if k <= pinned_until {
            potentials.push(v);
            continue;
        }
        v = v_inf + (v - v_inf) * decay;
        if v >= params.v_th_mv {
            steps.push(k);
            v = params.v_reset_mv;
            pinned_until = k.saturating_add(ref_steps);
        }
        potentials.push(v);
    }
    // k * t_sim / n is exact whenever the true product is; summing dt is not.
    let times_ms = steps
        .iter()
        .map(|&k| f64::from(k) * params.t_sim_ms / f64::from(n_steps))
        .collect();
    Ok(SpikeTrain {
        steps,
        times_ms,
        potentials,
    })
}

/// One resolved stimulation level: the weakest current observed to produce
/// `spike_count` spikes, except for zero where the strongest silent current
/// is kept.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Level {
    pub current_pa: f64,
    pub spike_count: u32,
}

/// Linear current sweep controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub i_start_pa: f64,
    pub di_pa: f64,
    /// Distinct spike counts to resolve, the silent level included.
    pub target_levels: usize,
    /// Upper bound on simulated currents before giving up.
    pub max_steps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            i_start_pa: 370.0,
            di_pa: 1.0,
            target_levels: 10,
            max_steps: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationResult {
    /// One entry per spike count 0..target, currents strictly increasing.
    pub levels: Vec<Level>,
    /// Full (current, count) trace in sweep order.
    pub swept: Vec<Level>,
    /// False when the sweep never saw a silent current; the zero level is
    /// then backfilled with `i_start - di` and deserves a warning upstream.
    pub zero_level_observed: bool,
}

/// Sweeps the stimulation current upward until every spike count in
/// `0..target_levels` has been resolved.
///
/// The level list is seeded with a zero-spike entry whose current is raised
/// to the strongest silent current seen so far; each nonzero count keeps the
/// first current that produced it. A sweep step coarse enough to jump over a
/// count can never complete the level set (counts are monotone in current)
/// and runs into the step cap instead.
pub fn characterize(params: &LifParams, sweep: &SweepConfig) -> Result<CharacterizationResult> {
    params.validate()?;
    if !sweep.di_pa.is_finite() || sweep.di_pa <= 0.0 {
        return Err(Error::InvalidParams("sweep step must be positive".into()));
    }
    if !sweep.i_start_pa.is_finite() {
        return Err(Error::InvalidParams("sweep start must be finite".into()));
    }
    if sweep.target_levels == 0 {
        return Err(Error::InvalidParams(
            "target_levels must be at least 1".into(),
        ));
    }

    // The zero level is pre-seeded, so only counts 1..target gate completion.
    let mut zero_current: Option<f64> = None;
    let mut firsts: Vec<Option<f64>> = vec![None; sweep.target_levels];
    let mut trace: Vec<Level> = Vec::new();
    while firsts[1..].iter().any(Option::is_none) {
        if trace.len() >= sweep.max_steps {
            let seen = 1 + firsts[1..].iter().filter(|f| f.is_some()).count();
            return Err(Error::NonConvergence {
                target: sweep.target_levels,
                seen,
                max_steps: sweep.max_steps,
                last_current_pa: trace.last().map_or(sweep.i_start_pa, |l| l.current_pa),
            });
        }
        let current = sweep.i_start_pa + trace.len() as f64 * sweep.di_pa;
        let count = simulate(params, current)?.count();
        trace.push(Level {
            current_pa: current,
            spike_count: count,
        });
        if count == 0 {
            zero_current = Some(current);
        } else if let Some(slot) = firsts.get_mut(count as usize) {
            slot.get_or_insert(current);
        }
    }
    let zero_level_observed = zero_current.is_some();
    let levels = std::iter::once(Level {
        current_pa: zero_current.unwrap_or(sweep.i_start_pa - sweep.di_pa),
        spike_count: 0,
    })
    .chain(firsts.iter().enumerate().skip(1).map(|(count, first)| Level {
        current_pa: first.expect("completion checked"),
        spike_count: count as u32,
    }))
    .collect();
    Ok(CharacterizationResult {
        levels,
        swept: trace,
        zero_level_observed,
    })
}

/// Simulates each digit's driving current and quantizes its spikes to whole
/// milliseconds. Index = digit = spike count; digit 0 maps to no spikes.
pub fn digit_patterns(params: &LifParams, levels: &[Level]) -> Result<[Vec<u8>; 10]> {
    let mut patterns: [Vec<u8>; 10] = Default::default();
    for digit in 0u8..10 {
        let level = levels
            .iter()
            .find(|l| l.spike_count == u32::from(digit))
            .ok_or(Error::IncompleteCharacterization {
                needed: 10,
                have: levels.len(),
            })?;
        let train = simulate(params, level.current_pa)?;
        if train.count() != u32::from(digit) {
            return Err(Error::InvalidParams(format!(
                "current {} pA no longer yields {} spikes",
                level.current_pa, digit
            )));
        }
        let mut pattern = Vec::with_capacity(digit as usize);
        for &t in &train.times_ms {
            let ms = (t + 1e-9).floor();
            if !(0.0..=255.0).contains(&ms) {
                return Err(Error::InvalidParams(format!(
                    "spike at {t} ms does not fit the timestamp range"
                )));
            }
            let ms = ms as u8;
            if pattern.last() == Some(&ms) {
                return Err(Error::QuantizationCollision {
                    digit,
                    millisecond: ms,
                });
            }
            pattern.push(ms);
        }
        patterns[digit as usize] = pattern;
    }
    Ok(patterns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// First grid step at or past the analytic threshold crossing, if the
    /// asymptote clears the threshold at all.
    fn analytic_first_step(params: &LifParams, i_dc: f64) -> Option<u32> {
        let v_inf = params.e_l_mv + params.resistance() * i_dc;
        if v_inf <= params.v_th_mv {
            return None;
        }
        let t_cross =
            params.tau_m_ms * ((params.v_m0_mv - v_inf) / (params.v_th_mv - v_inf)).ln();
        let step = (t_cross / params.dt_ms).ceil() as u32;
        (step <= params.n_steps()).then_some(step.max(1))
    }

    #[test]
    fn default_sweep_resolves_ten_levels() {
        let result = characterize(&LifParams::default(), &SweepConfig::default()).unwrap();
        let got: Vec<(u32, u32)> = result
            .levels
            .iter()
            .map(|l| (l.current_pa as u32, l.spike_count))
            .collect();
        assert_eq!(
            got,
            vec![
                (505, 0),
                (506, 1),
                (546, 2),
                (604, 3),
                (669, 4),
                (742, 5),
                (819, 6),
                (906, 7),
                (994, 8),
                (1097, 9),
            ]
        );
        assert_eq!(result.swept.len(), 728);
        assert!(result.zero_level_observed);
        for pair in result.swept.windows(2) {
            assert!(
                pair[1].spike_count >= pair[0].spike_count,
                "count dropped between {} and {} pA",
                pair[0].current_pa,
                pair[1].current_pa
            );
        }
    }

    #[test]
    fn silent_at_rheobase_and_below() {
        let params = LifParams::default();
        // R*I = 20 mV at 500 pA: the asymptote only touches the threshold.
        for i in [0.0, 250.0, 500.0, 505.0] {
            assert_eq!(simulate(&params, i).unwrap().count(), 0, "{i} pA");
        }
        let first = simulate(&params, 506.0).unwrap();
        assert_eq!(first.steps, vec![593]);
    }

    #[test]
    fn first_spikes_match_analytic_crossing() {
        let params = LifParams::default();
        for i in [506.0, 546.0, 604.0, 742.0, 906.0, 1097.0, 1500.0, 2500.0] {
            let train = simulate(&params, i).unwrap();
            assert_eq!(train.steps.first().copied(), analytic_first_step(&params, i));
        }
    }

    #[test]
    fn refractory_enforces_minimum_gap() {
        let params = LifParams::default();
        let train = simulate(&params, 2500.0).unwrap();
        assert!(train.count() > 5);
        let min_gap = params.ref_steps() + 1;
        for pair in train.steps.windows(2) {
            assert!(pair[1] - pair[0] >= min_gap);
        }
    }

    #[test]
    fn potentials_trace_reset_and_pin() {
        let params = LifParams::default();
        let train = simulate(&params, 906.0).unwrap();
        assert_eq!(train.potentials.len(), params.n_steps() as usize + 1);
        let spike = train.steps[0] as usize;
        for k in spike..=spike + params.ref_steps() as usize {
            assert_eq!(train.potentials[k], params.v_reset_mv);
        }
        assert!(train.potentials[spike + params.ref_steps() as usize + 1] > params.v_reset_mv);
    }

    #[test]
    fn degenerate_sweep_start_backfills_silent_level() {
        // 510 pA already fires once, so no silent current is ever observed.
        let sweep = SweepConfig {
            i_start_pa: 510.0,
            ..SweepConfig::default()
        };
        let result = characterize(&LifParams::default(), &sweep).unwrap();
        assert!(!result.zero_level_observed);
        assert_eq!(result.levels[0].current_pa, 509.0);
        assert_eq!(result.levels[0].spike_count, 0);
        assert_eq!(result.levels[1].current_pa, 510.0);
        assert_eq!(result.levels[9].current_pa, 1097.0);
    }

    #[test]
    fn start_past_missing_levels_never_converges() {
        // From 600 pA upward every current fires at least twice, so the
        // one-spike level cannot be resolved and the cap is the only exit.
        let sweep = SweepConfig {
            i_start_pa: 600.0,
            max_steps: 600,
            ..SweepConfig::default()
        };
        match characterize(&LifParams::default(), &sweep) {
            Err(Error::NonConvergence { seen, .. }) => assert_eq!(seen, 9),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn coarse_sweep_step_never_converges() {
        // 500 pA jumps straddle several spike counts; the skipped counts can
        // never appear later because counts are monotone in current.
        let sweep = SweepConfig {
            di_pa: 500.0,
            max_steps: 4,
            ..SweepConfig::default()
        };
        match characterize(&LifParams::default(), &sweep) {
            Err(Error::NonConvergence { seen, .. }) => assert_eq!(seen, 2),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn sweep_budget_exhaustion_is_an_error() {
        let sweep = SweepConfig {
            max_steps: 5,
            ..SweepConfig::default()
        };
        match characterize(&LifParams::default(), &sweep) {
            Err(Error::NonConvergence { seen, max_steps, .. }) => {
                assert_eq!(seen, 1);
                assert_eq!(max_steps, 5);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn patterns_match_builtin_table() {
        let params = LifParams::default();
        let result = characterize(&params, &SweepConfig::default()).unwrap();
        let patterns = digit_patterns(&params, &result.levels).unwrap();
        for (digit, pattern) in patterns.iter().enumerate() {
            assert_eq!(
                pattern.as_slice(),
                crate::codebook::CANONICAL_PATTERNS[digit],
                "digit {digit}"
            );
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad_dt = LifParams {
            dt_ms: 0.0,
            ..LifParams::default()
        };
        assert!(matches!(
            simulate(&bad_dt, 600.0),
            Err(Error::InvalidParams(_))
        ));
        let inverted = LifParams {
            v_th_mv: 5.0,
            ..LifParams::default()
        };
        assert!(matches!(
            simulate(&inverted, 600.0),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            simulate(&LifParams::default(), f64::NAN),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            simulate(&LifParams::default(), -1.0),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn ref_steps_is_robust_to_ratio_rounding() {
        let params = LifParams::default();
        assert_eq!(params.ref_steps(), 20);
        assert_eq!(params.n_steps(), 600);
        let odd = LifParams {
            t_ref_ms: 0.25,
            ..LifParams::default()
        };
        assert_eq!(odd.ref_steps(), 3);
        let none = LifParams {
            t_ref_ms: 0.0,
            ..LifParams::default()
        };
        assert_eq!(none.ref_steps(), 0);
    }

    proptest! {
        #[test]
        fn spike_count_is_monotone_in_current(a in 0.0..3000.0f64, b in 0.0..3000.0f64) {
            let params = LifParams::default();
            let lo = a.min(b);
            let hi = a.max(b);
            let n_lo = simulate(&params, lo).unwrap().count();
            let n_hi = simulate(&params, hi).unwrap().count();
            prop_assert!(n_lo <= n_hi, "{lo} pA -> {n_lo}, {hi} pA -> {n_hi}");
        }

        #[test]
        fn gaps_and_potentials_respect_the_model(i in 0.0..5000.0f64) {
            let params = LifParams::default();
            let train = simulate(&params, i).unwrap();
            let min_gap = params.ref_steps() + 1;
            for pair in train.steps.windows(2) {
                prop_assert!(pair[1] - pair[0] >= min_gap);
            }
            for &v in &train.potentials {
                prop_assert!(v < params.v_th_mv);
            }
        }
    }
}
