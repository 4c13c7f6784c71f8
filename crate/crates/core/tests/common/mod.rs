//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use annex::analysis::CollectorProfile;
use annex::codec::random_packets;
use annex::{CodeParams, CodedPacket, Decoder, Encoder, GaloisField, GenerationLayout, Matrix, Packet, Scheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn partial_exp(m: Option<usize>, x: f64) -> f64 {
    match m {
        None => x.exp(),
        Some(m) => {
            let (mut term, mut acc) = (1.0, 0.0);
            for i in 0..m {
                acc += term;
                term *= x / (i + 1) as f64;
            }
            acc
        }
    }
}

/// The unmet-probability integrand evaluated as the explicit nested sum over
/// `(i_1, ..., i_A)` with `k_j <= i_j <= i_{j+1}`, `i_{A+1} = n`.
pub fn nested_sum_integrand(n: usize, profile: &CollectorProfile, x: f64) -> f64 {
    let k = profile.thresholds();
    let m = profile.requirements();
    let a = k.len();
    // level j uses S_{m_j} - S_{m_{j+1}}, m_0 = ∞, m_{A+1} = 0
    let level = |j: usize| -> Option<usize> {
        match j {
            0 => None,
            j if j <= a => Some(m[j - 1]),
            _ => Some(0),
        }
    };
    let weight = |j: usize| (partial_exp(level(j), x) - partial_exp(level(j + 1), x)) * (-x).exp();
    let weights: Vec<f64> = (0..=a).map(weight).collect();
    // picks i_j given i_{j+1}, for j = a down to 1; i_0 = 0
    fn rec(j: usize, i_next: usize, k: &[usize], w: &[f64]) -> f64 {
        if j == 0 {
            return w[0].powi(i_next as i32);
        }
        (k[j - 1]..=i_next)
            .map(|ij| binom(i_next, ij) * w[j].powi((i_next - ij) as i32) * rec(j - 1, ij, k, w))
            .sum()
    }
    if a == 0 {
        return 0.0;
    }
    1.0 - rec(a, n, k, &weights)
}

/// Expected draws until the profile is met, by first-step analysis on the
/// absorbing chain of per-generation counts (counts capped at `m_1`).
pub fn markov_expected(n: usize, profile: &CollectorProfile) -> f64 {
    let k = profile.thresholds().to_vec();
    let m = profile.requirements().to_vec();
    if k.is_empty() {
        return 0.0;
    }
    let cap = m[0];
    let done = |state: &[usize]| {
        k.iter().zip(&m).all(|(&kj, &mj)| state.iter().filter(|&&c| c >= mj).count() >= kj)
    };
    fn solve(
        state: Vec<usize>,
        n: usize,
        cap: usize,
        done: &dyn Fn(&[usize]) -> bool,
        memo: &mut HashMap<Vec<usize>, f64>,
    ) -> f64 {
        if done(&state) {
            return 0.0;
        }
        if let Some(&v) = memo.get(&state) {
            return v;
        }
        let capped = state.iter().filter(|&&c| c >= cap).count();
        let mut acc = 1.0;
        for i in 0..n {
            if state[i] < cap {
                let mut next = state.clone();
                next[i] += 1;
                next.sort_unstable();
                acc += solve(next, n, cap, done, memo) / n as f64;
            }
        }
        let v = acc / (1.0 - capped as f64 / n as f64);
        memo.insert(state, v);
        v
    }
    solve(vec![0; n], n, cap, &done, &mut HashMap::new())
}

/// All profiles over `n` generations with at most `max_levels` levels and
/// requirements at most `max_req`.
pub fn all_profiles(n: usize, max_levels: usize, max_req: usize) -> Vec<CollectorProfile> {
    fn increasing(from: usize, to: usize, len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in from..=to {
            for mut rest in increasing(first + 1, to, len - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for a in 1..=max_levels {
        for k in increasing(1, n, a) {
            for mut m in increasing(1, max_req, a) {
                m.reverse();
                out.push(CollectorProfile::new(k.clone(), m).unwrap());
            }
        }
    }
    out
}

/// Generations that per-generation elimination can solve from `received`,
/// iterated to a fixpoint: a generation is solvable once its received rows,
/// restricted to its unresolved members, have full column rank.
pub fn batch_decodable(
    field: &GaloisField,
    layout: &GenerationLayout,
    received: &[CodedPacket],
) -> (Vec<bool>, Vec<bool>) {
    let n = layout.generations();
    let mut resolved = vec![false; layout.total_packets()];
    let mut decoded = vec![false; n];
    loop {
        let mut progress = false;
        for j in 0..n {
            if decoded[j] {
                continue;
            }
            let members = layout.members(j);
            let open: Vec<usize> = (0..members.len()).filter(|&c| !resolved[members[c]]).collect();
            let rows: Vec<&CodedPacket> = received.iter().filter(|cp| cp.generation == j).collect();
            let mut entries = Vec::new();
            for cp in &rows {
                entries.extend(open.iter().map(|&c| cp.coding_vector[c]));
            }
            let m = Matrix::from_rows(rows.len(), open.len(), entries).unwrap();
            if m.rank(field) == open.len() {
                decoded[j] = true;
                for &c in &open {
                    resolved[members[c]] = true;
                }
                progress = true;
            }
        }
        if !progress {
            return (decoded, resolved);
        }
    }
}

/// Solves the stacked global system over all `N` packets, if it has full rank.
pub fn global_solve(
    field: &GaloisField,
    layout: &GenerationLayout,
    received: &[CodedPacket],
    symbols: usize,
) -> Option<Vec<Packet>> {
    let total = layout.total_packets();
    // greedily keep independent equations
    let mut kept: Vec<(Vec<u16>, Vec<u16>)> = Vec::new();
    for cp in received {
        let mut row = vec![0u16; total];
        for (c, &p) in layout.members(cp.generation).iter().enumerate() {
            row[p] = cp.coding_vector[c];
        }
        let trial: Vec<u16> = kept.iter().flat_map(|(r, _)| r.clone()).chain(row.clone()).collect();
        let m = Matrix::from_rows(kept.len() + 1, total, trial).unwrap();
        if m.rank(field) == kept.len() + 1 {
            kept.push((row, cp.payload.clone()));
        }
        if kept.len() == total {
            break;
        }
    }
    if kept.len() < total {
        return None;
    }
    let a = Matrix::from_rows(total, total, kept.iter().flat_map(|(r, _)| r.clone()).collect()).unwrap();
    let b = Matrix::from_rows(total, symbols, kept.iter().flat_map(|(_, p)| p.clone()).collect()).unwrap();
    let x = a.solve(field, &b).ok()?;
    Some((0..total).map(|i| x.row(i).to_vec()).collect())
}

pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// Draws uniform vectors over GF(q) until `dim` of them span the space,
/// keeping a reduced basis indexed by pivot column.
pub fn draws_to_full_rank(field: &GaloisField, dim: usize, rng: &mut impl Rng) -> usize {
    let q = field.order() as u32;
    let mut basis: Vec<Option<Vec<u16>>> = vec![None; dim];
    let (mut rank, mut draws) = (0, 0);
    let mut v = vec![0u16; dim];
    while rank < dim {
        draws += 1;
        v.iter_mut().for_each(|x| *x = rng.gen_range(0..q) as u16);
        for c in 0..dim {
            if v[c] == 0 {
                continue;
            }
            match &basis[c] {
                Some(row) => {
                    let coef = v[c];
                    field.axpy(&mut v, coef, row);
                }
                None => {
                    let inv = field.inv(v[c]).unwrap();
                    field.scale(&mut v, inv);
                    basis[c] = Some(v.clone());
                    rank += 1;
                    break;
                }
            }
        }
    }
    draws
}

/// Every small layout up to `max_total` packets, over both overlapping schemes.
pub fn small_cases(max_total: usize) -> Vec<(CodeParams, Scheme)> {
    let mut out = Vec::new();
    for total in 2..=max_total {
        for h in 1..=total {
            for l in 0..=(total - h) {
                let p = CodeParams::new(total, h, l);
                out.push((p, Scheme::RandomAnnex));
                if l > 0 && l <= h {
                    out.push((p, Scheme::HeadToToe));
                }
            }
        }
    }
    out
}

/// Feeds random coded packets into the cascading decoder for every small case
/// and compares its state after each packet with [`batch_decodable`], and the
/// final content with [`global_solve`]. Returns the number of comparisons and
/// a description of each disagreement.
pub fn cascade_disagreements(max_total: usize) -> (usize, Vec<String>) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (case, (params, scheme)) in small_cases(max_total).into_iter().enumerate() {
        for (q, seeds) in [(2u32, 3u64), (4, 2), (256, 1)] {
            let field = GaloisField::with_order(q).unwrap();
            for seed in 0..seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(case as u64 * 1000 + seed * 10 + q as u64);
                let layout = GenerationLayout::build(params, scheme, &mut rng).unwrap();
                let source = random_packets(params.total, 2, &field, &mut rng);
                let enc = Encoder::new(&field, &layout, &source).unwrap();
                let mut dec = Decoder::new(&field, &layout, 2);
                let mut sent: Vec<CodedPacket> = Vec::new();
                let tag = format!("{params:?} {scheme} q={q} seed={seed}");
                for _ in 0..4 * params.total {
                    let cp = enc.encode_random(&mut rng);
                    dec.ingest(&cp).unwrap();
                    sent.push(cp);
                    let (gens, resolved) = batch_decodable(&field, &layout, &sent);
                    checked += 1;
                    if gens.iter().enumerate().any(|(g, &ok)| dec.is_decoded(g) != ok) {
                        bad.push(format!("{tag}: decoded set differs after {} packets", sent.len()));
                    }
                    for (pkt, &ok) in resolved.iter().enumerate() {
                        let agree = match dec.resolved(pkt) {
                            Some(v) => ok && v == source[pkt].as_slice(),
                            None => !ok,
                        };
                        if !agree {
                            bad.push(format!("{tag}: packet {pkt} after {} packets", sent.len()));
                        }
                    }
                    if dec.is_complete() {
                        break;
                    }
                }
                if dec.is_complete() {
                    if global_solve(&field, &layout, &sent, 2).as_ref() != Some(&source) {
                        bad.push(format!("{tag}: global solve disagrees"));
                    }
                    if dec.recover().ok().as_ref() != Some(&source) {
                        bad.push(format!("{tag}: recovered content differs"));
                    }
                }
            }
        }
    }
    (checked, bad)
}
