use std::f64::consts::PI;

use super::{AmpConfig, ModelError, OpAmpModel, Waveform};

/// Upper bound on `ωc·h` for one integration substep.
const MAX_POLE_STEP: f64 = 0.1;
const MAX_SUBSTEPS: usize = 64;
/// Substeps allowed for keeping a full-slew substep within the output range.
const MAX_SLEW_SUBSTEPS: usize = 4096;

/// Nonlinear transient response of the closed-loop amplifier.
///
/// The state is the output voltage `y`, relaxing toward the ideal
/// closed-loop target `G·x` with the closed-loop pole `ωc = 2π·GBWP/N`.
/// Each substep advances the linear part exactly (the input is treated as
/// piecewise linear between samples), limits the change to `±SR·h`, then
/// clamps the state to the output swing. Output sample `i` is the state at
/// the time of input sample `i`, starting from rest at 0 V.
///
/// The sample interval is split into substeps so that `ωc·h <= 0.1`
/// (capped at 64 substeps) and so that `SR·h` never exceeds the output
/// range. The linear update is unconditionally stable, so the pole cap only
/// costs accuracy inside slewing transitions. An interval that would need
/// more than 4096 substeps to satisfy the slew condition is rejected.
pub fn simulate_transient(
    model: &OpAmpModel,
    cfg: &AmpConfig,
    input: &Waveform,
) -> Result<Waveform, ModelError> {
    model.check_config(cfg)?;
    if input.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let dt = input.dt_s();
    let range = model.vom_pos_v - model.vom_neg_v;
    let step_v = dt * model.sr_v_per_s;
    let slew_substeps = (step_v / range).ceil();
    if !(slew_substeps <= MAX_SLEW_SUBSTEPS as f64) {
        return Err(ModelError::StepTooCoarse {
            dt_s: dt,
            step_v,
            range_v: range,
        });
    }

    let wc = 2.0 * PI * model.gbwp_hz / cfg.noise_gain();
    let gain = cfg.signed_gain();
    let substeps = ((wc * dt / MAX_POLE_STEP).ceil() as usize)
        .clamp(1, MAX_SUBSTEPS)
        .max(slew_substeps as usize);
    let h = dt / substeps as f64;
    let a = wc * h;
    let decay = (-a).exp();
    // (1 - e^-a) / a
    let ramp_weight = -(-a).exp_m1() / a;
    let max_step = model.sr_v_per_s * h;

    let x = input.samples();
    let mut out = Vec::with_capacity(x.len());
    let mut y = 0.0f64.clamp(model.vom_neg_v, model.vom_pos_v);
    out.push(y);
    for pair in x.windows(2) {
        let (xa, xb) = (pair[0], pair[1]);
        for j in 0..substeps {
            let ua = gain * (xa + (xb - xa) * j as f64 / substeps as f64);
            let ub = gain * (xa + (xb - xa) * (j + 1) as f64 / substeps as f64);
            let linear = ub + (y - ua) * decay - (ub - ua) * ramp_weight;
            let next = linear.clamp(y - max_step, y + max_step);
            y = next.clamp(model.vom_neg_v, model.vom_pos_v);
        }
        out.push(y);
    }
    input.with_samples(out)
}
