//! Prints predicted and simulated packet counts for N = 1000, h = 25.

use std::time::Instant;

use annex::analysis::{layout_overlap_profile, predict_expected_packets, predict_from_overlap};
use annex::{CodeParams, Experiment, GenerationLayout, Scheme};

fn main() -> annex::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    for l in [0, 4, 8, 12, 16] {
        let p = CodeParams::new(1000, 25, l);
        let t = Instant::now();
        let pred: f64 = predict_expected_packets(&p)?;
        let dt = t.elapsed();
        let ra = Experiment::new(p, Scheme::RandomAnnex).summarize(trials, 1)?;
        let htt_layout = GenerationLayout::head_to_toe(p)?;
        let htt_prof = layout_overlap_profile::<f64>(&htt_layout)?;
        let htt_pred = predict_from_overlap(p.generation_size(), 256, &htt_prof.omega)?.expected_packets;
        let htt = Experiment::new(p, Scheme::HeadToToe).summarize(trials, 1)?;
        println!(
            "l={l:2} pred={pred:8.2} ({dt:?}) sim={:8.2}±{:.2} rel={:+.4} | htt pred={htt_pred:8.2} sim={:8.2}±{:.2} [{:?}]",
            ra.mean,
            ra.stderr,
            (pred - ra.mean) / ra.mean,
            htt.mean,
            htt.stderr,
            t.elapsed()
        );
    }
    Ok(())
}
