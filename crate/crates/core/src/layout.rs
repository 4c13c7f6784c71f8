//! Generation structures: which information packets each generation covers.
//!
//! Packets and generations are indexed from zero. Generation `i` always lists
//! its base block `B_i` first, in order, followed by its annex.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{ln_binomial, ln_factorial, Real};

/// Code dimensions shared by every scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// information packets `N`
    pub total: usize,
    /// base generation size `h`
    pub base: usize,
    /// annex size `l`
    pub annex: usize,
    /// symbols per packet `d`
    pub symbols: usize,
    /// field size `q`
    pub field_size: u32,
}

impl CodeParams {
    pub fn new(total: usize, base: usize, annex: usize) -> Self {
        Self { total, base, annex, symbols: 1, field_size: 256 }
    }

    pub fn with_field_size(mut self, q: u32) -> Self {
        self.field_size = q;
        self
    }

    pub fn with_symbols(mut self, d: usize) -> Self {
        self.symbols = d;
        self
    }

    /// Number of generations, `ceil(N / h)`.
    pub fn generations(&self) -> usize {
        self.total.div_ceil(self.base)
    }

    /// Nominal generation size `g = h + l`.
    pub fn generation_size(&self) -> usize {
        self.base + self.annex
    }

    pub fn divides_evenly(&self) -> bool {
        self.total.is_multiple_of(self.base)
    }

    pub fn base_range(&self, gen: usize) -> std::ops::Range<usize> {
        let start = gen * self.base;
        start..(start + self.base).min(self.total)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base == 0 || self.total == 0 {
            return Err(Error::Param("N and h must be positive".into()));
        }
        if self.base > self.total {
            return Err(Error::Param(format!("h = {} exceeds N = {}", self.base, self.total)));
        }
        if self.annex > self.total - self.base {
            return Err(Error::Param(format!(
                "annex size l = {} exceeds N - h = {}",
                self.annex,
                self.total - self.base
            )));
        }
        if self.symbols == 0 {
            return Err(Error::Param("packets need at least one symbol".into()));
        }
        if self.field_size < 2 || !self.field_size.is_power_of_two() || self.field_size > 1 << 16 {
            return Err(Error::Param(format!("unsupported field size {}", self.field_size)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    RandomAnnex,
    HeadToToe,
    Disjoint,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::RandomAnnex, Scheme::HeadToToe, Scheme::Disjoint];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::RandomAnnex => "random-annex",
            Scheme::HeadToToe => "head-to-toe",
            Scheme::Disjoint => "disjoint",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown scheme {s:?}")))
    }
}

/// Membership map of all generations plus its transpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationLayout {
    params: CodeParams,
    scheme: Scheme,
    members: Vec<Vec<usize>>,
    // packet -> (generation, position within that generation)
    reverse: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct LayoutFile {
    params: CodeParams,
    #[serde(default = "default_scheme")]
    scheme: Scheme,
    members: Vec<Vec<usize>>,
}

fn default_scheme() -> Scheme {
    Scheme::RandomAnnex
}

impl GenerationLayout {
    pub fn build(params: CodeParams, scheme: Scheme, rng: &mut impl Rng) -> Result<Self> {
        match scheme {
            Scheme::RandomAnnex => Self::random_annex(params, rng),
            Scheme::HeadToToe => Self::head_to_toe(params),
            Scheme::Disjoint => Self::disjoint(params),
        }
    }

    /// Each base block gets `l` packets drawn uniformly without replacement
    /// from the packets outside it.
    pub fn random_annex(params: CodeParams, rng: &mut impl Rng) -> Result<Self> {
        params.validate()?;
        let members = (0..params.generations())
            .map(|i| {
                let base = params.base_range(i);
                let mut g: Vec<usize> = base.clone().collect();
                g.extend(sample_annex(params.total, base, params.annex, rng));
                g
            })
            .collect();
        Ok(Self::from_members(params, Scheme::RandomAnnex, members))
    }

    pub fn random_annex_seeded(params: CodeParams, seed: u64) -> Result<Self> {
        Self::random_annex(params, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Generation `i` takes the first `l` packets of base block `i + 1`,
    /// wrapping around from the last block to the first.
    pub fn head_to_toe(params: CodeParams) -> Result<Self> {
        params.validate()?;
        if params.annex > params.base {
            return Err(Error::Param(format!(
                "head-to-toe overlap l = {} exceeds h = {}",
                params.annex, params.base
            )));
        }
        let n = params.generations();
        let members = (0..n)
            .map(|i| {
                let mut g: Vec<usize> = params.base_range(i).collect();
                if n > 1 {
                    let next = params.base_range((i + 1) % n);
                    g.extend(next.take(params.annex));
                }
                g
            })
            .collect();
        Ok(Self::from_members(params, Scheme::HeadToToe, members))
    }

    pub fn disjoint(params: CodeParams) -> Result<Self> {
        let params = CodeParams { annex: 0, ..params };
        params.validate()?;
        let members = (0..params.generations()).map(|i| params.base_range(i).collect()).collect();
        Ok(Self::from_members(params, Scheme::Disjoint, members))
    }

    fn from_members(params: CodeParams, scheme: Scheme, members: Vec<Vec<usize>>) -> Self {
        let mut reverse = vec![Vec::new(); params.total];
        for (gen, g) in members.iter().enumerate() {
            for (pos, &p) in g.iter().enumerate() {
                reverse[p].push((gen, pos));
            }
        }
        Self { params, scheme, members, reverse }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn generations(&self) -> usize {
        self.members.len()
    }

    pub fn total_packets(&self) -> usize {
        self.params.total
    }

    pub fn members(&self, gen: usize) -> &[usize] {
        &self.members[gen]
    }

    pub fn all_members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Generations containing `packet`, with its position in each.
    pub fn containing(&self, packet: usize) -> &[(usize, usize)] {
        &self.reverse[packet]
    }

    pub fn degree(&self, packet: usize) -> usize {
        self.reverse[packet].len()
    }

    pub fn max_generation_size(&self) -> usize {
        self.members.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of packets shared by generations `a` and `b`.
    pub fn overlap(&self, a: usize, b: usize) -> usize {
        self.members[a].iter().filter(|&&p| self.reverse[p].iter().any(|&(g, _)| g == b)).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = LayoutFile { params: self.params, scheme: self.scheme, members: self.members.clone() };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: LayoutFile = serde_json::from_str(s)?;
        let params = file.params;
        params.validate()?;
        if file.members.len() != params.generations() {
            return Err(Error::Input(format!(
                "{} generations listed, parameters imply {}",
                file.members.len(),
                params.generations()
            )));
        }
        for (i, g) in file.members.iter().enumerate() {
            let base = params.base_range(i);
            if !g.iter().copied().take(base.len()).eq(base.clone()) {
                return Err(Error::Input(format!("generation {i} does not start with its base block")));
            }
            let mut seen = std::collections::HashSet::new();
            for &p in g {
                if p >= params.total || !seen.insert(p) {
                    return Err(Error::Input(format!("generation {i} has invalid or repeated packet {p}")));
                }
            }
        }
        Ok(Self::from_members(params, file.scheme, file.members))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `l` distinct packets from `0..total` outside `base`, uniformly without replacement.
pub fn sample_annex(
    total: usize,
    base: std::ops::Range<usize>,
    l: usize,
    rng: &mut impl Rng,
) -> impl Iterator<Item = usize> {
    let outside = total - base.len();
    index::sample(rng, outside, l)
        .into_iter()
        .map(move |k| if k < base.start { k } else { k + base.len() })
}

/// Closed-form structure statistics of the random annex ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LayoutStats<T> {
    /// probability a given packet lies in a given foreign annex
    pub pi: T,
    pub mean_degree: T,
    pub var_degree: T,
    /// expected packets of a generation found in no other generation
    pub expected_unique: T,
    /// probability that two given generations share a packet
    pub overlap_prob: T,
    /// `N - 2h - 2l < 0`: any two annexes must collide
    pub overlap_forced: bool,
}

pub fn layout_statistics<T: Real>(params: &CodeParams) -> Result<LayoutStats<T>> {
    params.validate()?;
    let (total, h, l) = (params.total, params.base, params.annex);
    let n = params.generations();
    let pi = if total == h { T::zero() } else { T::of(l) / T::of(total - h) };
    let pibar = T::one() - pi;
    let others = T::of(n - 1);
    let forced = total < 2 * h + 2 * l;
    let overlap_prob = if n < 2 {
        T::zero()
    } else if forced {
        T::one()
    } else {
        let rest = total - 2 * h;
        let ln_multinomial =
            ln_factorial::<T>(rest) - ln_factorial::<T>(l) * T::lit(2.0) - ln_factorial::<T>(rest - 2 * l);
        T::one() - (ln_multinomial - ln_binomial::<T>(total - h, l) * T::lit(2.0)).exp()
    };
    Ok(LayoutStats {
        pi,
        mean_degree: T::one() + others * pi,
        var_degree: others * pi * pibar,
        expected_unique: T::of(h) * pibar.powi((n - 1) as i32),
        overlap_prob,
        overlap_forced: forced,
    })
}
