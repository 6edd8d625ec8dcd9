use opamp_screen::analysis::{
    bode_from_pairs, extract_f3db, extract_slew_rate, extract_vom, fit_single_pole,
    ramp_distortion_score,
};
use opamp_screen::dataio::{
    log_frequencies, synth_capture, synth_capture_pairs, Stimulus, SynthSpec,
};
use opamp_screen::model::{closed_loop_gain, wrap_degrees, AmpConfig, OpAmpModel};

#[test]
fn genuine_bode_from_transient_captures() {
    let m = OpAmpModel::genuine_tl074();
    let cfg = AmpConfig::inverting(20.0);
    let freqs = log_frequencies(10.0, 6e6, 20).unwrap();
    // 0.5 Vp-p keeps the genuine part out of slewing across the whole sweep
    let base = SynthSpec {
        settle_cycles: 40,
        ..SynthSpec::new(Stimulus::Sine {
            freq_hz: 1.0,
            vpp: 0.5,
        })
    };
    let pairs = synth_capture_pairs(&m, &cfg, &freqs, 0.5, &base).unwrap();
    let curve = bode_from_pairs(&pairs).unwrap();
    assert_eq!(curve.len(), freqs.len());
    for p in curve.points() {
        let (g, ph) = closed_loop_gain(&m, &cfg, p.f_hz).unwrap();
        assert!(
            (p.gain_db - g).abs() < 0.05,
            "{} Hz: {} vs {g} dB",
            p.f_hz,
            p.gain_db
        );
        let dphi = wrap_degrees(p.phase_deg - ph);
        assert!(
            dphi.abs() < 0.5,
            "{} Hz: {} vs {ph} deg",
            p.f_hz,
            p.phase_deg
        );
    }
    let f3 = extract_f3db(&curve).unwrap();
    assert!((f3.f3db_hz / 247_619.0 - 1.0).abs() < 0.02);
    let fit = fit_single_pole(&curve, cfg.noise_gain()).unwrap();
    assert!((fit.gbwp_hz / 5.2e6 - 1.0).abs() < 0.02);
}

fn square_response(sr: f64, per_cycle: usize) -> opamp_screen::Waveform {
    let m = OpAmpModel {
        sr_v_per_s: sr,
        ..OpAmpModel::genuine_tl074()
    };
    // half period spans five full-swing transitions
    let f = sr / (10.0 * 27.0);
    let spec = SynthSpec {
        cycles: 3,
        samples_per_cycle: per_cycle,
        ..SynthSpec::new(Stimulus::Square {
            freq_hz: f,
            vpp: 4.0,
        })
    };
    synth_capture(&m, &AmpConfig::noninverting(1e4), &spec)
        .unwrap()
        .output
}

#[test]
fn slew_rate_recovered_across_four_decades() {
    for sr in [0.01e6, 0.0126e6, 0.1e6, 1e6, 13e6] {
        let out = square_response(sr, 1000);
        let got = extract_slew_rate(&out).unwrap();
        assert!(
            (got.combined_v_per_s / sr - 1.0).abs() < 0.05,
            "{sr}: {got:?}"
        );
        assert!(got.rising_edges >= 2 && got.falling_edges >= 2);
        let (p, n) = extract_vom(&out).unwrap();
        assert!((p - 13.5).abs() < 0.05 && (n + 13.5).abs() < 0.05);
    }
}

#[test]
fn slewing_counterfeit_looks_like_a_ramp() {
    let cfg = AmpConfig::inverting(20.0);
    let spec = SynthSpec {
        settle_cycles: 4,
        ..SynthSpec::new(Stimulus::Sine {
            freq_hz: 20e3,
            vpp: 1.0,
        })
    };
    let bad = synth_capture(&OpAmpModel::counterfeit_tl074(), &cfg, &spec).unwrap();
    let good = synth_capture(&OpAmpModel::genuine_tl074(), &cfg, &spec).unwrap();
    assert!(ramp_distortion_score(&bad.output, 20e3).unwrap() > 0.10);
    assert!(ramp_distortion_score(&good.output, 20e3).unwrap() < 0.01);
}
