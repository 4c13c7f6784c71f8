use std::process::ExitCode;

use annex::analysis::{layout_overlap_profile, predict_from_overlap, OverlapProfile};
use annex::codec::random_packets;
use annex::simulate::trial_rng;
use annex::{CodeParams, Decoder, Encoder, Experiment, GaloisField, GenerationLayout, Scheme};
use anyhow::Result;

use crate::table::Table;
use crate::RunArgs;

/// Expands the sweep into concrete (scheme, parameters) points. The disjoint
/// scheme contributes a single l = 0 point.
pub fn points(args: &RunArgs) -> Result<Vec<(Scheme, CodeParams)>, String> {
    if args.scheme.is_empty() {
        return Err("at least one scheme is required".into());
    }
    let mut out = Vec::new();
    for &scheme in &args.scheme {
        let annexes: &[usize] = if scheme == Scheme::Disjoint { &[0] } else { &args.annex.0 };
        for &l in annexes {
            let h = match args.g_fixed {
                Some(g) if l >= g => return Err(format!("l = {l} leaves no base packets with --g-fixed {g}")),
                Some(g) => g - l,
                None => args.h,
            };
            let params = CodeParams::new(args.total, h, l).with_field_size(args.q);
            params.validate().map_err(|e| e.to_string())?;
            if scheme == Scheme::HeadToToe && l > h {
                return Err(format!("head-to-toe needs l <= h, got l = {l}, h = {h}"));
            }
            if !out.contains(&(scheme, params)) {
                out.push((scheme, params));
            }
        }
    }
    Ok(out)
}

fn overlap_profile(scheme: Scheme, params: CodeParams) -> Result<OverlapProfile<f64>> {
    Ok(match scheme {
        Scheme::RandomAnnex => OverlapProfile::random_annex(params),
        Scheme::HeadToToe => layout_overlap_profile(&GenerationLayout::head_to_toe(params)?)?,
        Scheme::Disjoint => layout_overlap_profile(&GenerationLayout::disjoint(params)?)?,
    })
}

fn method(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::RandomAnnex => "ensemble-overlap prediction",
        _ => "empirical-profile prediction",
    }
}

fn predicted(scheme: Scheme, params: CodeParams) -> Result<f64> {
    let profile = overlap_profile(scheme, params)?;
    Ok(predict_from_overlap(params.generation_size(), params.field_size, &profile.omega)?.expected_packets)
}

pub fn analyze(_args: &RunArgs, points: &[(Scheme, CodeParams)]) -> Result<Table> {
    let mut t = Table::new(&["N", "h", "l", "q", "scheme", "predicted_expected_packets", "method"]);
    for &(scheme, p) in points {
        let value = predicted(scheme, p)?;
        t.push(vec![p.total.into(), p.base.into(), p.annex.into(), p.field_size.into(), scheme.name().into(), value.into(), method(scheme).into()]);
    }
    Ok(t)
}

pub fn simulate(args: &RunArgs, points: &[(Scheme, CodeParams)]) -> Result<Table> {
    let trials = args.trials as usize;
    let Some(grid) = &args.grid else {
        let mut t = Table::new(&["scheme", "N", "h", "l", "q", "trials", "mean_packets", "stderr", "seed"]);
        for &(scheme, p) in points {
            let s = Experiment::new(p, scheme).summarize(trials, args.seed)?;
            t.push(vec![
                scheme.name().into(),
                p.total.into(),
                p.base.into(),
                p.annex.into(),
                p.field_size.into(),
                s.trials.into(),
                s.mean.into(),
                s.stderr.into(),
                args.seed.into(),
            ]);
        }
        return Ok(t);
    };
    let mut grid = grid.0.clone();
    grid.sort_unstable();
    let mut t = Table::new(&["scheme", "N", "h", "l", "q", "M", "p_fail", "trials", "seed"]);
    for &(scheme, p) in points {
        let c = Experiment::new(p, scheme).failure_curve(&grid, trials, args.seed)?;
        for (&m, &pf) in c.grid.iter().zip(&c.p_fail) {
            t.push(vec![
                scheme.name().into(),
                p.total.into(),
                p.base.into(),
                p.annex.into(),
                p.field_size.into(),
                m.into(),
                pf.into(),
                c.trials.into(),
                args.seed.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn compare(args: &RunArgs, points: &[(Scheme, CodeParams)]) -> Result<Table> {
    let mut t = Table::new(&[
        "scheme", "N", "h", "l", "q", "trials", "predicted", "simulated", "stderr", "rel_error", "seed", "method",
    ]);
    for &(scheme, p) in points {
        let pred = predicted(scheme, p)?;
        let s = Experiment::new(p, scheme).summarize(args.trials as usize, args.seed)?;
        t.push(vec![
            scheme.name().into(),
            p.total.into(),
            p.base.into(),
            p.annex.into(),
            p.field_size.into(),
            s.trials.into(),
            pred.into(),
            s.mean.into(),
            s.stderr.into(),
            ((pred - s.mean) / s.mean).into(),
            args.seed.into(),
            method(scheme).into(),
        ]);
    }
    Ok(t)
}

pub fn overlap(_args: &RunArgs, points: &[(Scheme, CodeParams)]) -> Result<Table> {
    let mut t = Table::new(&["scheme", "N", "h", "l", "s", "omega", "remaining"]);
    for &(scheme, p) in points {
        let profile = overlap_profile(scheme, p)?;
        for (s, (&w, r)) in profile.omega.iter().zip(profile.remaining()).enumerate() {
            t.push(vec![scheme.name().into(), p.total.into(), p.base.into(), p.annex.into(), s.into(), w.into(), r.into()]);
        }
    }
    Ok(t)
}

fn check(name: &str, ok: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
    ok
}

pub fn selftest(seed: u64) -> ExitCode {
    match run_selftest(seed) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run_selftest(seed: u64) -> Result<bool> {
    let mut all = true;

    let field = GaloisField::with_order(256)?;
    let bad = (1..256u16).filter(|&a| field.mul(a, field.inv(a).unwrap()) != 1).count();
    all &= check("GF(256) inverses", bad == 0, format!("{bad} failures"));

    let mut decoded = 0;
    for scheme in Scheme::ALL {
        let params = CodeParams::new(200, 20, 5).with_symbols(16);
        let mut rng = trial_rng(seed, scheme as u64);
        let layout = GenerationLayout::build(params, scheme, &mut rng)?;
        let source = random_packets(params.total, params.symbols, &field, &mut rng);
        let enc = Encoder::new(&field, &layout, &source)?;
        let mut dec = Decoder::new(&field, &layout, params.symbols);
        while !dec.is_complete() {
            dec.ingest(&enc.encode_random(&mut rng))?;
        }
        if dec.recover()? == source {
            decoded += 1;
        }
    }
    all &= check("decode round trip", decoded == 3, format!("{decoded}/3 schemes recovered exactly"));

    let params = CodeParams::new(400, 20, 6);
    let pred = predicted(Scheme::RandomAnnex, params)?;
    let sim = Experiment::new(params, Scheme::RandomAnnex).summarize(300, seed)?;
    let rel = (pred - sim.mean) / sim.mean;
    all &= check(
        "predictor vs simulation",
        rel.abs() <= 0.05,
        format!("N=400 h=20 l=6: predicted {pred:.1}, simulated {:.1} ± {:.1}", sim.mean, sim.stderr),
    );

    let flat = CodeParams::new(400, 20, 0);
    let same = [Scheme::RandomAnnex, Scheme::HeadToToe, Scheme::Disjoint]
        .iter()
        .map(|&s| predicted(s, flat))
        .collect::<Result<Vec<_>>>()?;
    all &= check("l = 0 agrees across schemes", same.windows(2).all(|w| w[0] == w[1]), format!("{same:?}"));

    Ok(all)
}
