//! Encoding within a generation and progressive decoding across overlapping
//! generations.
//!
//! Each generation keeps its received equations in reduced row-echelon form
//! over the columns (member packets) that are still unknown. A generation is
//! solved as soon as its rank equals its number of unknown members; the
//! packets it yields are substituted into every other generation that holds
//! them, which can make those solvable in turn.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfield::{FieldElement, GaloisField};
use crate::layout::GenerationLayout;

/// One information packet: `d` field symbols.
pub type Packet = Vec<FieldElement>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedPacket {
    pub generation: usize,
    pub coding_vector: Vec<FieldElement>,
    pub payload: Vec<FieldElement>,
}

pub fn random_packets(count: usize, symbols: usize, field: &GaloisField, rng: &mut impl Rng) -> Vec<Packet> {
    let q = field.order() as u32;
    (0..count).map(|_| (0..symbols).map(|_| rng.gen_range(0..q) as FieldElement).collect()).collect()
}

pub struct Encoder<'a> {
    field: &'a GaloisField,
    layout: &'a GenerationLayout,
    packets: &'a [Packet],
}

impl<'a> Encoder<'a> {
    pub fn new(field: &'a GaloisField, layout: &'a GenerationLayout, packets: &'a [Packet]) -> Result<Self> {
        if packets.len() != layout.total_packets() {
            return Err(Error::Input(format!(
                "{} packets supplied for a layout over {}",
                packets.len(),
                layout.total_packets()
            )));
        }
        let d = packets.first().map_or(0, Vec::len);
        if packets.iter().any(|p| p.len() != d) {
            return Err(Error::Input("packets differ in length".into()));
        }
        Ok(Self { field, layout, packets })
    }

    /// Combination of generation `gen` with i.i.d. uniform coefficients (zero included).
    pub fn encode(&self, gen: usize, rng: &mut impl Rng) -> CodedPacket {
        let q = self.field.order() as u32;
        let coeffs =
            (0..self.layout.members(gen).len()).map(|_| rng.gen_range(0..q) as FieldElement).collect();
        self.encode_with(gen, coeffs)
    }

    /// Picks a generation uniformly, then encodes from it.
    pub fn encode_random(&self, rng: &mut impl Rng) -> CodedPacket {
        let gen = rng.gen_range(0..self.layout.generations());
        self.encode(gen, rng)
    }

    pub fn encode_with(&self, gen: usize, coding_vector: Vec<FieldElement>) -> CodedPacket {
        let members = self.layout.members(gen);
        assert_eq!(coding_vector.len(), members.len(), "coding vector length");
        let d = self.packets.first().map_or(0, Vec::len);
        let mut payload = vec![0; d];
        for (&c, &p) in coding_vector.iter().zip(members) {
            self.field.axpy(&mut payload, c, &self.packets[p]);
        }
        CodedPacket { generation: gen, coding_vector, payload }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecodeReport {
    pub innovative: bool,
    pub newly_decoded: usize,
    pub newly_resolved: usize,
    pub complete: bool,
}

/// Work counters for the decoder.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecoderStats {
    /// scalar multiply-adds spent on elimination and substitution
    pub field_ops: u64,
    /// largest number of stored equations any generation held
    pub max_system_dim: usize,
}

#[derive(Clone, Debug)]
struct Row {
    // coefficients over the generation's members, then the payload
    data: Vec<FieldElement>,
    pivot: usize,
}

#[derive(Clone, Debug)]
struct GenSystem {
    rows: Vec<Row>,
    pivot_row: Vec<Option<usize>>,
    unknown: Vec<bool>,
    unresolved: usize,
    decoded: bool,
}

impl GenSystem {
    fn new(size: usize) -> Self {
        Self { rows: Vec::new(), pivot_row: vec![None; size], unknown: vec![true; size], unresolved: size, decoded: false }
    }

    fn width(&self) -> usize {
        self.unknown.len()
    }
}

/// Receiver-side decoding state for one layout.
pub struct Decoder<'a> {
    field: &'a GaloisField,
    layout: &'a GenerationLayout,
    symbols: usize,
    cascade: bool,
    systems: Vec<GenSystem>,
    values: Vec<FieldElement>,
    known: Vec<bool>,
    resolved_count: usize,
    decoded_count: usize,
    pending: VecDeque<usize>,
    received: Vec<usize>,
    decode_log: Vec<usize>,
    stats: DecoderStats,
}

impl<'a> Decoder<'a> {
    pub fn new(field: &'a GaloisField, layout: &'a GenerationLayout, symbols: usize) -> Self {
        let systems = layout.all_members().iter().map(|g| GenSystem::new(g.len())).collect();
        let total = layout.total_packets();
        Self {
            field,
            layout,
            symbols,
            cascade: true,
            systems,
            values: vec![0; total * symbols],
            known: vec![false; total],
            resolved_count: 0,
            decoded_count: 0,
            pending: VecDeque::new(),
            received: vec![0; layout.generations()],
            decode_log: Vec::new(),
            stats: DecoderStats::default(),
        }
    }

    /// Without cascade, resolved packets are still substituted everywhere, but a
    /// generation is only checked for solvability when one of its own packets arrives.
    pub fn without_cascade(mut self) -> Self {
        self.cascade = false;
        self
    }

    pub fn ingest(&mut self, cp: &CodedPacket) -> Result<DecodeReport> {
        let gen = cp.generation;
        if gen >= self.systems.len() {
            return Err(Error::Input(format!("generation index {gen} out of range")));
        }
        let width = self.systems[gen].width();
        if cp.coding_vector.len() != width {
            return Err(Error::Input(format!(
                "coding vector has {} entries, generation {gen} has {width} members",
                cp.coding_vector.len()
            )));
        }
        if cp.payload.len() != self.symbols {
            return Err(Error::Input(format!("payload has {} symbols, expected {}", cp.payload.len(), self.symbols)));
        }
        let q = self.field.order();
        if cp.coding_vector.iter().chain(&cp.payload).any(|&x| x as usize >= q) {
            return Err(Error::Input(format!("symbol outside GF({q})")));
        }

        self.received[gen] += 1;
        let before = (self.decoded_count, self.resolved_count);
        let innovative = !self.systems[gen].decoded && self.insert(gen, cp);
        if !self.systems[gen].decoded && self.systems[gen].rows.len() == self.systems[gen].unresolved {
            self.decode_generation(gen);
        }
        self.drain_pending();
        Ok(DecodeReport {
            innovative,
            newly_decoded: self.decoded_count - before.0,
            newly_resolved: self.resolved_count - before.1,
            complete: self.is_complete(),
        })
    }

    fn insert(&mut self, gen: usize, cp: &CodedPacket) -> bool {
        let field = self.field;
        let d = self.symbols;
        let members = self.layout.members(gen);
        let sys = &mut self.systems[gen];
        let width = sys.width();
        let mut data = Vec::with_capacity(width + d);
        data.extend_from_slice(&cp.coding_vector);
        data.extend_from_slice(&cp.payload);

        for (pos, &pkt) in members.iter().enumerate() {
            let c = data[pos];
            if c != 0 && !sys.unknown[pos] {
                field.axpy(&mut data[width..], c, &self.values[pkt * d..(pkt + 1) * d]);
                data[pos] = 0;
                self.stats.field_ops += d as u64;
            }
        }
        for row in &sys.rows {
            let c = data[row.pivot];
            if c != 0 {
                field.axpy(&mut data, c, &row.data);
                self.stats.field_ops += (width + d) as u64;
            }
        }
        let Some(pivot) = data[..width].iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = field.inv(data[pivot]).expect("pivot is nonzero");
        field.scale(&mut data, inv);
        for row in sys.rows.iter_mut() {
            let c = row.data[pivot];
            if c != 0 {
                field.axpy(&mut row.data, c, &data);
                self.stats.field_ops += (width + d) as u64;
            }
        }
        sys.pivot_row[pivot] = Some(sys.rows.len());
        sys.rows.push(Row { data, pivot });
        self.stats.max_system_dim = self.stats.max_system_dim.max(sys.rows.len());
        true
    }

    fn decode_generation(&mut self, gen: usize) {
        let d = self.symbols;
        let members = self.layout.members(gen);
        let sys = &mut self.systems[gen];
        debug_assert_eq!(sys.rows.len(), sys.unresolved);
        let width = sys.width();
        for row in sys.rows.drain(..) {
            let pkt = members[row.pivot];
            debug_assert!(row.data[..width].iter().enumerate().all(|(c, &v)| v == u16::from(c == row.pivot)));
            let value = &row.data[width..];
            if self.known[pkt] {
                debug_assert_eq!(&self.values[pkt * d..(pkt + 1) * d], value, "resolved values never change");
                continue;
            }
            self.values[pkt * d..(pkt + 1) * d].copy_from_slice(value);
            self.known[pkt] = true;
            self.resolved_count += 1;
            self.pending.push_back(pkt);
        }
        sys.decoded = true;
        sys.pivot_row.fill(None);
        self.decoded_count += 1;
        self.decode_log.push(gen);
    }

    // breadth-first over newly resolved packets
    fn drain_pending(&mut self) {
        while let Some(pkt) = self.pending.pop_front() {
            for &(gen, pos) in self.layout.containing(pkt) {
                if self.systems[gen].decoded || !self.systems[gen].unknown[pos] {
                    continue;
                }
                self.substitute(gen, pos, pkt);
                let sys = &self.systems[gen];
                if self.cascade && sys.rows.len() == sys.unresolved {
                    self.decode_generation(gen);
                }
            }
        }
    }

    fn substitute(&mut self, gen: usize, pos: usize, pkt: usize) {
        let field = self.field;
        let d = self.symbols;
        let value = &self.values[pkt * d..(pkt + 1) * d];
        let sys = &mut self.systems[gen];
        let width = sys.width();
        sys.unknown[pos] = false;
        sys.unresolved -= 1;
        for row in sys.rows.iter_mut() {
            let c = row.data[pos];
            if c != 0 {
                field.axpy(&mut row.data[width..], c, value);
                row.data[pos] = 0;
                self.stats.field_ops += d as u64;
            }
        }
        let Some(r) = sys.pivot_row[pos].take() else { return };
        // the row lost its pivot; other pivot columns are already zero in it
        match sys.rows[r].data[..width].iter().position(|&c| c != 0) {
            None => {
                sys.rows.swap_remove(r);
                if r < sys.rows.len() {
                    let moved = sys.rows[r].pivot;
                    sys.pivot_row[moved] = Some(r);
                }
            }
            Some(p) => {
                let inv = field.inv(sys.rows[r].data[p]).expect("nonzero");
                field.scale(&mut sys.rows[r].data, inv);
                let pivot_data = sys.rows[r].data.clone();
                for (i, row) in sys.rows.iter_mut().enumerate() {
                    let c = row.data[p];
                    if i != r && c != 0 {
                        field.axpy(&mut row.data, c, &pivot_data);
                        self.stats.field_ops += (width + d) as u64;
                    }
                }
                sys.rows[r].pivot = p;
                sys.pivot_row[p] = Some(r);
            }
        }
    }

    pub fn is_complete(&self) -> bool {
        self.resolved_count == self.known.len()
    }

    pub fn recover(&self) -> Result<Vec<Packet>> {
        if !self.is_complete() {
            return Err(Error::State(format!(
                "only {} of {} packets resolved",
                self.resolved_count,
                self.known.len()
            )));
        }
        Ok(self.values.chunks(self.symbols.max(1)).take(self.known.len()).map(<[_]>::to_vec).collect())
    }

    pub fn resolved(&self, packet: usize) -> Option<&[FieldElement]> {
        self.known[packet].then(|| &self.values[packet * self.symbols..(packet + 1) * self.symbols])
    }

    pub fn resolved_count(&self) -> usize {
        self.resolved_count
    }

    pub fn decoded_generations(&self) -> usize {
        self.decoded_count
    }

    pub fn is_decoded(&self, gen: usize) -> bool {
        self.systems[gen].decoded
    }

    /// Generations in the order they were solved.
    pub fn decode_order(&self) -> &[usize] {
        &self.decode_log
    }

    /// Current rank of a generation's stored system.
    pub fn rank(&self, gen: usize) -> usize {
        self.systems[gen].rows.len()
    }

    pub fn received(&self) -> &[usize] {
        &self.received
    }

    pub fn stats(&self) -> DecoderStats {
        self.stats
    }
}

/// One line of a replay trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub gen_index: usize,
    pub coding_vector: String,
    pub payload: String,
}

fn hex_width(field: &GaloisField) -> usize {
    if field.order() <= 256 {
        2
    } else {
        4
    }
}

fn to_hex(field: &GaloisField, v: &[FieldElement]) -> String {
    let w = hex_width(field);
    v.iter().map(|x| format!("{x:0w$x}")).collect()
}

fn from_hex(field: &GaloisField, s: &str) -> Result<Vec<FieldElement>> {
    let w = hex_width(field);
    if !s.len().is_multiple_of(w) || !s.is_ascii() {
        return Err(Error::Input(format!("hex string of length {} is not a multiple of {w}", s.len())));
    }
    (0..s.len())
        .step_by(w)
        .map(|i| {
            let x = u16::from_str_radix(&s[i..i + w], 16).map_err(|e| Error::Input(e.to_string()))?;
            if field.contains(x as u32) {
                Ok(x)
            } else {
                Err(Error::Input(format!("{x:#x} outside GF({})", field.order())))
            }
        })
        .collect()
}

impl TraceRecord {
    pub fn from_packet(field: &GaloisField, cp: &CodedPacket) -> Self {
        Self {
            gen_index: cp.generation,
            coding_vector: to_hex(field, &cp.coding_vector),
            payload: to_hex(field, &cp.payload),
        }
    }

    pub fn to_packet(&self, field: &GaloisField) -> Result<CodedPacket> {
        Ok(CodedPacket {
            generation: self.gen_index,
            coding_vector: from_hex(field, &self.coding_vector)?,
            payload: from_hex(field, &self.payload)?,
        })
    }
}

/// Writes one JSON record per line.
pub fn write_trace<'p>(
    mut out: impl Write,
    field: &GaloisField,
    packets: impl IntoIterator<Item = &'p CodedPacket>,
) -> Result<()> {
    for cp in packets {
        serde_json::to_writer(&mut out, &TraceRecord::from_packet(field, cp))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace(input: impl BufRead, field: &GaloisField) -> Result<Vec<CodedPacket>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|line| serde_json::from_str::<TraceRecord>(&line?)?.to_packet(field))
        .collect()
}
