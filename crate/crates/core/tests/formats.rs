use opamp_screen::analysis::{BodeCurve, BodePoint};
use opamp_screen::dataio::{
    read_component_db, read_sweep_csv, read_waveform_csv, round_sig9, synth_capture,
    write_component_record, write_sweep_csv, write_waveform_csv, ComponentRecord, DataError,
    Stimulus, SynthSpec,
};
use opamp_screen::model::{AmpConfig, OpAmpModel, Waveform};
use opamp_screen::VerdictKind;
use proptest::prelude::*;

fn waveform_round_trip(w: &Waveform) -> Waveform {
    let mut buf = Vec::new();
    write_waveform_csv(w, &mut buf).unwrap();
    read_waveform_csv(buf.as_slice()).unwrap()
}

#[test]
fn counterfeit_capture_round_trips_bit_identically() {
    let spec = SynthSpec {
        cycles: 16,
        noise_vpp: 0.01,
        seed: 7,
        ..SynthSpec::new(Stimulus::Sine {
            freq_hz: 20e3,
            vpp: 1.0,
        })
    };
    let cap = synth_capture(
        &OpAmpModel::counterfeit_tl074(),
        &AmpConfig::inverting(20.0),
        &spec,
    )
    .unwrap();
    assert_eq!(cap.output.len(), 4096);
    let once = waveform_round_trip(&cap.output);
    let twice = waveform_round_trip(&once);
    assert_eq!(once, twice);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_waveform_csv(&once, &mut a).unwrap();
    write_waveform_csv(&twice, &mut b).unwrap();
    assert_eq!(a, b);
    for (x, y) in cap.output.samples().iter().zip(once.samples()) {
        assert!((x - y).abs() <= 1e-8 * x.abs().max(1e-30));
    }
}

#[test]
fn unresolvable_time_axis_is_not_written() {
    let w = Waveform::new(1e-9, 0.5, vec![0.0; 4]).unwrap();
    assert!(matches!(
        write_waveform_csv(&w, Vec::new()),
        Err(DataError::TimeResolution { .. })
    ));
}

#[test]
fn malformed_inputs_name_their_line() {
    let cases: [(&str, usize); 5] = [
        ("time_s,voltage_v\n0,0\n1e-6,1\n1,2,3\n", 4),
        ("time_s,voltage_v\n0,0\n1e-6,x\n", 3),
        ("time,volts\n0,0\n", 1),
        ("time_s,voltage_v\n0,0\n1e-6,1\n0.5e-6,1\n", 4),
        ("time_s,voltage_v\n0,0\n1e-6,1\n2e-6,1\n3.5e-6,1\n", 5),
    ];
    for (text, line) in cases {
        let msg = read_waveform_csv(text.as_bytes()).unwrap_err().to_string();
        assert!(msg.contains(&format!("line {line}")), "{msg}");
    }
    let e = read_sweep_csv("freq_hz,gain_db,phase_deg\n10,1,0\n10,1,0\n".as_bytes()).unwrap_err();
    assert!(matches!(e, DataError::DuplicateFrequency { line: 3, .. }));
}

fn sig9() -> impl Strategy<Value = f64> {
    (-1e3f64..1e3).prop_map(round_sig9)
}

fn curve() -> impl Strategy<Value = BodeCurve> {
    (1usize..40, 1e-3f64..1e3).prop_flat_map(|(n, f0)| {
        (
            prop::collection::vec(1.001f64..3.0, n),
            prop::collection::vec((sig9(), -180f64..=180.0), n),
        )
            .prop_map(move |(ratios, vals)| {
                let mut f = f0;
                let points = ratios
                    .iter()
                    .zip(vals)
                    .map(|(r, (g, p))| {
                        f *= r;
                        BodePoint {
                            f_hz: round_sig9(f),
                            gain_db: g,
                            phase_deg: round_sig9(p),
                        }
                    })
                    .collect();
                BodeCurve::new(points).unwrap()
            })
    })
}

fn opt_pos() -> impl Strategy<Value = Option<f64>> {
    prop::option::of(1e-9f64..1e9)
}

fn record() -> impl Strategy<Value = ComponentRecord> {
    (
        "[a-zA-Z0-9_-]{1,12}",
        "\\PC{0,12}",
        "[0-9]{0,4}",
        (opt_pos(), opt_pos(), opt_pos(), opt_pos(), opt_pos()),
        prop::option::of(-1e3f64..-1e-6),
        prop::option::of(prop::sample::select(VerdictKind::ALL.to_vec())),
    )
        .prop_map(
            |(id, label, date, (q, a, g, s, vp), vn, verdict)| ComponentRecord {
                icc_quiescent_a: q,
                icc_active_a: a,
                gbwp_hz: g,
                sr_v_per_s: s,
                vom_pos_v: vp,
                vom_neg_v: vn,
                verdict,
                ..ComponentRecord::new(id, label, date)
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn waveform_csv_identity(
        dt in (1e-9f64..1e-1).prop_map(round_sig9),
        samples in prop::collection::vec(sig9(), 2..300),
    ) {
        let w = Waveform::new(dt, 0.0, samples).unwrap();
        let once = waveform_round_trip(&w);
        prop_assert_eq!(&once, &w);
    }

    /// With a trigger offset the time column may not pin down every digit
    /// of the interval; the file is still a fixed point of read then write.
    #[test]
    fn offset_waveform_file_is_canonical(
        dt in (1e-9f64..1e-1).prop_map(round_sig9),
        offset in -1e4f64..1e4,
        samples in prop::collection::vec(sig9(), 2..300),
    ) {
        let w = Waveform::new(dt, round_sig9(offset * dt), samples).unwrap();
        let mut first = Vec::new();
        write_waveform_csv(&w, &mut first).unwrap();
        let back = read_waveform_csv(first.as_slice()).unwrap();
        prop_assert_eq!(back.samples(), w.samples());
        prop_assert_eq!(back.t0_s(), w.t0_s());
        prop_assert!((back.dt_s() / dt - 1.0).abs() < 1e-3);
        let mut second = Vec::new();
        write_waveform_csv(&back, &mut second).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(waveform_round_trip(&back), back);
    }

    #[test]
    fn sweep_csv_identity(c in curve()) {
        let mut buf = Vec::new();
        write_sweep_csv(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        prop_assert_eq!(text.lines().count(), c.len() + 1);
        prop_assert!(!text.contains('\r'));
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.points(), c.points());
    }

    #[test]
    fn component_db_identity(recs in prop::collection::vec(record(), 0..20)) {
        let mut seen = std::collections::HashSet::new();
        let recs: Vec<_> = recs.into_iter().filter(|r| seen.insert(r.id.clone())).collect();
        let mut buf = Vec::new();
        for r in &recs {
            write_component_record(r, &mut buf).unwrap();
        }
        prop_assert_eq!(read_component_db(buf.as_slice()).unwrap(), recs);
    }
}
