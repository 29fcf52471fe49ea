use std::error::Error;
use std::fmt;

/// Leaky integrate-and-fire oscillator and coupling parameters.
///
/// The membrane of an isolated neuron charges as
/// `p(t) = (i0 / tau) * (1 - exp(-t / tau))` from zero toward `i0 / tau`,
/// fires when it reaches `p_theta`, and resets by subtracting `p_theta`.
/// Periodic firing therefore requires `p_theta < i0 / tau`.
///
/// Synaptic weights derive from pixel similarity: `w_max` at zero pixel
/// difference, rolling off around `delta` with steepness `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronParams {
    /// Input current (model units).
    pub i0: f64,
    /// Membrane time constant (seconds).
    pub tau: f64,
    /// Firing threshold (model units).
    pub p_theta: f64,
    /// Maximum synaptic weight (model units).
    pub w_max: f64,
    /// Weight-sigmoid steepness (per feature unit).
    pub alpha: f64,
    /// Weight-sigmoid offset (feature units).
    pub delta: f64,
}

impl Default for NeuronParams {
    /// The segmentation-experiment parameter set.
    fn default() -> Self {
        NeuronParams {
            i0: 6.918,
            tau: 0.1447,
            p_theta: 1.0,
            w_max: 0.0325,
            alpha: 100.0,
            delta: 6.0,
        }
    }
}

impl NeuronParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(ModelError::BadParam("tau must be positive"));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(ModelError::BadParam("alpha must be positive"));
        }
        if !self.w_max.is_finite() || self.w_max < 0.0 {
            return Err(ModelError::BadParam("w_max must be non-negative"));
        }
        if !self.p_theta.is_finite() || self.p_theta <= 0.0 {
            return Err(ModelError::BadParam("p_theta must be positive"));
        }
        if self.p_theta >= self.i0 / self.tau {
            return Err(ModelError::NonPeriodic {
                p_theta: self.p_theta,
                asymptote: self.i0 / self.tau,
            });
        }
        Ok(())
    }
}

/// Which printed form of the weight sigmoid to use. The thresholded form
/// treats `delta` as a similarity cutoff: near-`w_max` coupling below it,
/// near-zero above. The literal form adds `delta` to the pixel difference
/// inside the exponential, which drives every weight to zero at the
/// default steepness; it is kept selectable for comparison runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WeightForm {
    #[default]
    Thresholded,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelError {
    /// Threshold at or above the membrane asymptote: the neuron never fires.
    NonPeriodic { p_theta: f64, asymptote: f64 },
    BadParam(&'static str),
    /// The maximum weight does not fit the 9-bit weight code.
    WeightCodeOverflow { code: u64 },
    EmptyImage,
    /// Requested tick does not divide the period into a representable range.
    BadTick { period_ticks: u64, max: u64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelError::NonPeriodic { p_theta, asymptote } => write!(
                f,
                "threshold {p_theta} is not below the membrane asymptote {asymptote}; \
                 the neuron would never fire"
            ),
            ModelError::BadParam(msg) => write!(f, "invalid parameter: {msg}"),
            ModelError::WeightCodeOverflow { code } => {
                write!(f, "maximum weight quantizes to code {code}, above the 9-bit limit")
            }
            ModelError::EmptyImage => write!(f, "image has no pixels"),
            ModelError::BadTick { period_ticks, max } => {
                write!(f, "period spans {period_ticks} ticks, above the table limit {max}")
            }
        }
    }
}

impl Error for ModelError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_are_valid() {
        NeuronParams::default().validate().unwrap();
    }

    #[test]
    fn threshold_above_asymptote_rejected() {
        let params = NeuronParams { p_theta: 50.0, ..NeuronParams::default() };
        assert!(matches!(params.validate(), Err(ModelError::NonPeriodic { .. })));
    }

    #[test]
    fn bad_tau_rejected() {
        let params = NeuronParams { tau: 0.0, ..NeuronParams::default() };
        assert!(params.validate().is_err());
    }
}
