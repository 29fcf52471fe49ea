//! Quantized lookup tables for the neuron model.
//!
//! All per-spike arithmetic runs on integer codes. The potential axis maps
//! the firing threshold to code 4096 on a 13-bit scale; time is counted in
//! ticks, with one full recharge spanning `period_ticks` (4096 by default,
//! so the membrane table's 13-bit address covers the whole period).
//!
//! * `membrane[dt]`  — remaining ticks until firing -> potential code;
//! * `inverse[p]`    — potential code -> remaining ticks until firing;
//! * `weight[|df|]`  — absolute pixel difference -> weight code.

use crate::params::{ModelError, NeuronParams, WeightForm};

/// Potential code of the firing threshold.
pub const POTENTIAL_CODE_MAX: u16 = 4096;
/// Membrane table length: a full 13-bit remaining-time address space.
pub const MEMBRANE_TABLE_LEN: usize = 1 << 13;
/// Largest representable weight code (9 bits).
pub const WEIGHT_CODE_MAX: u16 = 511;

#[derive(Clone, Debug)]
pub struct ModelTables {
    membrane: Vec<u16>,
    inverse: Vec<u16>,
    weight: Vec<u16>,
    /// Ticks in one full recharge period.
    pub period_ticks: u64,
    pub tick_seconds: f64,
    /// The oscillator period in seconds: time from reset to threshold.
    pub t_period_seconds: f64,
}

impl ModelTables {
    /// Build with the default time base: one period spans 4096 ticks.
    pub fn build(params: &NeuronParams, weight_form: WeightForm) -> Result<Self, ModelError> {
        params.validate()?;
        let t_period = charge_time(params, params.p_theta);
        Self::build_with_tick(params, weight_form, t_period / 4096.0)
    }

    /// Build with an explicit tick length. The period must still fit the
    /// 13-bit membrane table.
    pub fn build_with_tick(
        params: &NeuronParams,
        weight_form: WeightForm,
        tick_seconds: f64,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        if !tick_seconds.is_finite() || tick_seconds <= 0.0 {
            return Err(ModelError::BadParam("tick_seconds must be positive"));
        }
        let t_period = charge_time(params, params.p_theta);
        let period_ticks = (t_period / tick_seconds).round() as u64;
        if period_ticks == 0 || period_ticks >= MEMBRANE_TABLE_LEN as u64 {
            return Err(ModelError::BadTick {
                period_ticks,
                max: MEMBRANE_TABLE_LEN as u64 - 1,
            });
        }

        let code_of = |p: f64| -> u16 {
            let code = (p / params.p_theta * POTENTIAL_CODE_MAX as f64).round();
            (code.max(0.0) as u64).min(POTENTIAL_CODE_MAX as u64) as u16
        };

        let mut membrane = vec![0u16; MEMBRANE_TABLE_LEN];
        for (dt, slot) in membrane.iter_mut().enumerate() {
            let dt = dt as u64;
            if dt >= period_ticks {
                continue; // charged for no time yet: potential 0
            }
            let t = (period_ticks - dt) as f64 * tick_seconds;
            *slot = code_of(potential_at(params, t));
        }

        let mut inverse = vec![0u16; POTENTIAL_CODE_MAX as usize + 1];
        for (code, slot) in inverse.iter_mut().enumerate() {
            let p = code as f64 / POTENTIAL_CODE_MAX as f64 * params.p_theta;
            let remaining = t_period - charge_time(params, p);
            let ticks = (remaining / tick_seconds).round();
            *slot = (ticks.max(0.0) as u64).min(period_ticks) as u16;
        }

        let mut weight = vec![0u16; 256];
        for (diff, slot) in weight.iter_mut().enumerate() {
            let x = match weight_form {
                WeightForm::Thresholded => params.alpha * (diff as f64 - params.delta),
                WeightForm::Literal => params.alpha * (diff as f64 + params.delta),
            };
            let w = if x > 500.0 {
                0.0
            } else if x < -500.0 {
                params.w_max
            } else {
                params.w_max / (1.0 + x.exp())
            };
            let code = (w / params.p_theta * POTENTIAL_CODE_MAX as f64).round() as u64;
            if code > WEIGHT_CODE_MAX as u64 {
                return Err(ModelError::WeightCodeOverflow { code });
            }
            *slot = code as u16;
        }

        Ok(ModelTables {
            membrane,
            inverse,
            weight,
            period_ticks,
            tick_seconds,
            t_period_seconds: t_period,
        })
    }

    /// Potential code for a remaining time of `dt` ticks. Addresses past
    /// the table end clamp to the last entry (potential 0) and are flagged.
    pub fn potential_of_dt(&self, dt: u64) -> (u16, bool) {
        if dt < self.membrane.len() as u64 {
            (self.membrane[dt as usize], false)
        } else {
            (*self.membrane.last().unwrap(), true)
        }
    }

    /// Remaining ticks until firing for a potential code.
    pub fn remaining_ticks(&self, code: u16) -> u64 {
        self.inverse[code.min(POTENTIAL_CODE_MAX) as usize] as u64
    }

    /// Weight code for an absolute pixel difference.
    pub fn weight_code(&self, pixel_diff: u8) -> u16 {
        self.weight[pixel_diff as usize]
    }

    pub fn membrane_table(&self) -> &[u16] {
        &self.membrane
    }

    pub fn inverse_table(&self) -> &[u16] {
        &self.inverse
    }

    pub fn weight_table(&self) -> &[u16] {
        &self.weight
    }
}

/// Side effects of one spike application, for statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpikeEffects {
    /// The potential sum hit the threshold ceiling.
    pub clamped: bool,
    /// The remaining-time lookup was past the table range.
    pub dt_clamped: bool,
}

/// Apply one incoming spike to a neuron known by its firing time.
///
/// The firing time is translated to a potential, the weight added (or the
/// threshold subtracted for the pre-synaptic reset), the result clamped
/// into `[0, 4096]`, and translated back. A sum clamped at the threshold
/// yields a zero remaining time: the neuron fires at `now`.
pub fn apply_spike(
    tables: &ModelTables,
    now: u64,
    firing_time: u64,
    weight: u16,
    is_reset: bool,
) -> (u64, SpikeEffects) {
    let dt = firing_time.saturating_sub(now);
    let (potential, dt_clamped) = tables.potential_of_dt(dt);
    let mut effects = SpikeEffects { clamped: false, dt_clamped };
    let new_potential = if is_reset {
        potential.saturating_sub(POTENTIAL_CODE_MAX)
    } else {
        let sum = potential as u32 + weight as u32;
        if sum > POTENTIAL_CODE_MAX as u32 {
            effects.clamped = true;
            POTENTIAL_CODE_MAX
        } else {
            sum as u16
        }
    };
    debug_assert!(new_potential <= POTENTIAL_CODE_MAX);
    (now + tables.remaining_ticks(new_potential), effects)
}

/// Membrane potential of an isolated neuron `t` seconds after reset.
pub fn potential_at(params: &NeuronParams, t: f64) -> f64 {
    params.i0 / params.tau * (1.0 - (-t / params.tau).exp())
}

/// Seconds for a neuron starting at potential zero to reach `p`.
pub fn charge_time(params: &NeuronParams, p: f64) -> f64 {
    -params.tau * (1.0 - p * params.tau / params.i0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables() -> ModelTables {
        ModelTables::build(&NeuronParams::default(), WeightForm::Thresholded).unwrap()
    }

    #[test]
    fn period_matches_direct_evaluation() {
        let params = NeuronParams::default();
        let t = tables();
        let direct = -params.tau * (1.0 - params.p_theta * params.tau / params.i0).ln();
        assert!((t.t_period_seconds - direct).abs() < 1e-15);
        assert_eq!(t.period_ticks, 4096);
    }

    #[test]
    fn membrane_boundaries() {
        let t = tables();
        assert_eq!(t.membrane_table()[0], POTENTIAL_CODE_MAX);
        assert_eq!(t.membrane_table()[4096], 0);
        assert_eq!(t.membrane_table()[8191], 0);
        let (p, clamped) = t.potential_of_dt(10_000);
        assert_eq!(p, 0);
        assert!(clamped);
    }

    #[test]
    fn membrane_midpoint_matches_closed_form() {
        // dt = half a period of remaining time: the neuron has charged for
        // T/2 seconds. Direct evaluation gives code 2059.
        let t = tables();
        let params = NeuronParams::default();
        let p = potential_at(&params, t.t_period_seconds / 2.0);
        let expected = (p / params.p_theta * 4096.0).round() as u16;
        assert_eq!(expected, 2059);
        assert_eq!(t.membrane_table()[2048], expected);
    }

    #[test]
    fn inverse_boundaries() {
        let t = tables();
        assert_eq!(t.remaining_ticks(POTENTIAL_CODE_MAX), 0);
        assert_eq!(t.remaining_ticks(0), 4096);
    }

    #[test]
    fn tables_are_monotone() {
        let t = tables();
        for w in t.membrane_table().windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in t.inverse_table().windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in t.weight_table().windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn round_trip_error_within_one_code() {
        let t = tables();
        for dt in 0..=t.period_ticks {
            let (p, _) = t.potential_of_dt(dt);
            let back = t.remaining_ticks(p);
            assert!(
                back.abs_diff(dt) <= 1,
                "dt {dt} -> code {p} -> {back}"
            );
        }
        for code in 0..=POTENTIAL_CODE_MAX {
            let dt = t.remaining_ticks(code);
            let (back, _) = t.potential_of_dt(dt);
            assert!(
                back.abs_diff(code) <= 1,
                "code {code} -> dt {dt} -> {back}"
            );
        }
    }

    #[test]
    fn membrane_slope_sign_matches_model_gradient() {
        // Potential rises as remaining time shrinks, matching the strictly
        // positive charging gradient of the closed-form membrane.
        let t = tables();
        let table = t.membrane_table();
        let mut strict = 0;
        for dt in 0..4096usize {
            assert!(table[dt] >= table[dt + 1]);
            if table[dt] > table[dt + 1] {
                strict += 1;
            }
        }
        assert!(strict > 4000, "membrane table nearly flat: {strict} strict steps");
    }

    #[test]
    fn weight_codes_for_reference_parameters() {
        let t = tables();
        assert_eq!(t.weight_code(0), 133); // round(0.0325 * 4096)
        assert_eq!(t.weight_code(5), 133);
        assert_eq!(t.weight_code(6), 67); // half of w_max
        assert_eq!(t.weight_code(7), 0);
        assert_eq!(t.weight_code(255), 0);
    }

    #[test]
    fn literal_weight_form_zeroes_everything() {
        let t =
            ModelTables::build(&NeuronParams::default(), WeightForm::Literal).unwrap();
        assert!(t.weight_table().iter().all(|&w| w == 0));
    }

    #[test]
    fn weight_code_overflow_detected() {
        let params = NeuronParams { w_max: 0.2, ..NeuronParams::default() };
        // 0.2 * 4096 = 819 codes, past the 9-bit limit.
        assert!(matches!(
            ModelTables::build(&params, WeightForm::Thresholded),
            Err(ModelError::WeightCodeOverflow { .. })
        ));
    }

    #[test]
    fn spike_reset_at_threshold_recharges_fully() {
        let t = tables();
        // Firing right now: potential at the threshold, reset to zero.
        let (ft, effects) = apply_spike(&t, 500, 500, 133, true);
        assert_eq!(ft, 500 + 4096);
        assert!(!effects.clamped);
    }

    #[test]
    fn spike_with_zero_weight_is_identity_up_to_one_tick() {
        let t = tables();
        for dt in [0u64, 1, 97, 2048, 4000, 4096] {
            let (ft, _) = apply_spike(&t, 1000, 1000 + dt, 0, false);
            assert!(ft.abs_diff(1000 + dt) <= 1, "dt {dt} -> {}", ft as i64 - 1000);
        }
    }

    #[test]
    fn spike_near_threshold_clamps_and_fires_now() {
        let t = tables();
        // A record whose potential reads ~4000 codes: one full-strength
        // spike pushes the sum past the threshold.
        let dt = t.remaining_ticks(4000);
        let (p, _) = t.potential_of_dt(dt);
        assert!(p as u32 + 133 > 4096);
        let (ft, effects) = apply_spike(&t, 70, 70 + dt, 133, false);
        assert_eq!(ft, 70, "clamped spike schedules the neuron immediately");
        assert!(effects.clamped);
    }

    #[test]
    fn larger_weights_never_fire_later() {
        let t = tables();
        for dt in (0..=4096u64).step_by(97) {
            let mut previous = u64::MAX;
            for weight in [0u16, 1, 67, 133, 300, 511] {
                let (ft, _) = apply_spike(&t, 0, dt, weight, false);
                assert!(ft <= previous, "dt {dt} weight {weight}");
                previous = ft;
            }
        }
    }

    #[test]
    fn custom_tick_scales_period() {
        let params = NeuronParams::default();
        let t_period = charge_time(&params, params.p_theta);
        let t = ModelTables::build_with_tick(
            &params,
            WeightForm::Thresholded,
            t_period / 2048.0,
        )
        .unwrap();
        assert_eq!(t.period_ticks, 2048);
        assert_eq!(t.remaining_ticks(0), 2048);
        assert!(ModelTables::build_with_tick(
            &params,
            WeightForm::Thresholded,
            t_period / 10_000.0
        )
        .is_err());
    }
}
