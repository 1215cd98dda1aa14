//! Recursive projection-aggregation decoding of RM(m, r).
//!
//! Each iteration projects the current word onto the cosets of every
//! k-dimensional subspace, decodes the projections recursively in
//! RM(m - k, r - k) (first-order projections by FHT maximum likelihood), and
//! flips every coordinate that a strict majority of the decoded projections
//! disagree with. Iteration stops at a fixed point or after `max_iter` rounds.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fht;
use crate::rm::CodeParams;
use crate::subspace::{self, CosetIndexMap};
use crate::word::Word;

/// Below this many projected bits per iteration the projections are decoded
/// sequentially.
const PARALLEL_WORK_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RpaConfig {
    params: CodeParams,
    k: u32,
    max_iter: usize,
}

impl RpaConfig {
    pub fn new(params: CodeParams, k: u32, max_iter: usize) -> Result<RpaConfig> {
        if k == 0 || k > params.m() {
            return Err(Error::InvalidConfig(format!(
                "subspace dimension k={k} must lie in 1..={}",
                params.m()
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if params.r() > 1 && !(params.r() - 1).is_multiple_of(k) {
            return Err(Error::InvalidConfig(format!(
                "k={k} must divide r-1={} so the recursion ends at first-order codes",
                params.r() - 1
            )));
        }
        Ok(RpaConfig { params, k, max_iter })
    }

    /// Configuration with the default iteration cap `max_iter = m`.
    pub fn with_default_iterations(params: CodeParams, k: u32) -> Result<RpaConfig> {
        RpaConfig::new(params, k, params.m() as usize)
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

/// One node of the projection-aggregation tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub level: usize,
    pub code: CodeParams,
    pub per_iteration: Vec<TraceIteration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceIteration {
    /// Bits flipped by this node in this iteration. For a first-order leaf,
    /// the distance between its input and the ML decision.
    pub flip_count: usize,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    /// One line per node, indented by level; children follow their parent
    /// grouped by iteration.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, None);
        out
    }

    fn render_into(&self, out: &mut String, iteration: Option<usize>) {
        let flips: Vec<String> = self
            .per_iteration
            .iter()
            .map(|it| it.flip_count.to_string())
            .collect();
        let _ = write!(out, "{:indent$}level={}", "", self.level, indent = 2 * self.level);
        if let Some(i) = iteration {
            let _ = write!(out, " iteration={i}");
        }
        let _ = writeln!(out, " code={} flips={}", self.code, flips.join(","));
        for (i, it) in self.per_iteration.iter().enumerate() {
            for child in &it.children {
                child.render_into(out, Some(i + 1));
            }
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .per_iteration
            .iter()
            .flat_map(|it| &it.children)
            .map(TraceNode::node_count)
            .sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub estimate: Word,
    /// A fixed point was reached before the iteration cap.
    pub converged: bool,
    pub iterations_used: usize,
    /// Decisions anywhere in the tree settled by a tie-break rule: tied
    /// first-order ML maximizers, or a repetition-code vote split evenly.
    pub ties: usize,
    pub trace: Option<TraceNode>,
}

/// The coset index maps of every k-dimensional subspace of F2^m.
#[derive(Debug)]
pub struct SubspaceFamily {
    pub m: u32,
    pub k: u32,
    pub maps: Vec<CosetIndexMap>,
}

/// Shared, lazily built table of subspace families keyed by `(m, k)`.
pub fn subspace_family(m: u32, k: u32) -> Result<Arc<SubspaceFamily>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<SubspaceFamily>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(&(m, k)) {
        return Ok(Arc::clone(f));
    }
    let maps = subspace::enumerate_subspaces(m, k)?
        .iter()
        .map(CosetIndexMap::new)
        .collect();
    let family = Arc::new(SubspaceFamily { m, k, maps });
    // two threads may race to build the same family; either result is identical
    let mut guard = cache.lock().unwrap();
    Ok(Arc::clone(guard.entry((m, k)).or_insert(family)))
}

/// Per-bit disagreement counts `phi(x)` and the resulting flip mask.
fn flip_mask(len: usize, disagreements: &[Word], maps: &[CosetIndexMap]) -> Word {
    let mut phi = vec![0u32; len];
    for (diff, map) in disagreements.iter().zip(maps) {
        for t in diff.iter_ones() {
            for x in map.coset(t as u32) {
                phi[x as usize] += 1;
            }
        }
    }
    let n = maps.len() as u32;
    Word::from_ones(len, (0..len).filter(|&x| 2 * phi[x] > n))
}

/// One aggregation step: flips bit `x` of `y` when more than half of the
/// decoded projections disagree with the projection of `y` on the coset of `x`.
pub fn aggregate(y: &Word, decoded_projections: &[Word], maps: &[CosetIndexMap]) -> Result<Word> {
    if decoded_projections.len() != maps.len() {
        return Err(Error::LengthMismatch {
            expected: maps.len(),
            actual: decoded_projections.len(),
        });
    }
    let mut disagreements = Vec::with_capacity(maps.len());
    for (decoded, map) in decoded_projections.iter().zip(maps) {
        let mut d = subspace::project(y, map)?;
        if decoded.len() != d.len() {
            return Err(Error::LengthMismatch {
                expected: d.len(),
                actual: decoded.len(),
            });
        }
        d.xor_assign(decoded);
        disagreements.push(d);
    }
    Ok(y.xor(&flip_mask(y.len(), &disagreements, maps)))
}

struct NodeResult {
    estimate: Word,
    converged: bool,
    iterations: usize,
    ties: usize,
    trace: Option<TraceNode>,
}

/// A decoder with the subspace tables for every tree level resolved up front.
#[derive(Debug, Clone)]
pub struct RpaDecoder {
    cfg: RpaConfig,
    families: Vec<Arc<SubspaceFamily>>,
}

impl RpaDecoder {
    pub fn new(cfg: RpaConfig) -> Result<RpaDecoder> {
        let (m, r, k) = (cfg.params.m(), cfg.params.r(), cfg.k);
        let mut families = Vec::new();
        let mut level = 0;
        while r >= 2 && r - k * level >= 2 {
            families.push(subspace_family(m - k * level, k)?);
            level += 1;
        }
        Ok(RpaDecoder { cfg, families })
    }

    pub fn config(&self) -> &RpaConfig {
        &self.cfg
    }

    pub fn decode(&self, y: &Word, trace: bool) -> Result<DecodeOutcome> {
        let n = self.cfg.params.len();
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: y.len(),
            });
        }
        let node = self.decode_node(y.clone(), 0, trace);
        Ok(DecodeOutcome {
            estimate: node.estimate,
            converged: node.converged,
            iterations_used: node.iterations,
            ties: node.ties,
            trace: node.trace,
        })
    }

    fn code_at(&self, level: usize) -> CodeParams {
        let shift = self.cfg.k * level as u32;
        CodeParams::new(self.cfg.params.m() - shift, self.cfg.params.r() - shift)
            .expect("tree levels stay within valid parameters")
    }

    fn decode_node(&self, mut y: Word, level: usize, trace: bool) -> NodeResult {
        let code = self.code_at(level);
        match code.r() {
            0 => {
                let ones = 2 * y.weight();
                let estimate = if ones > y.len() {
                    Word::ones(y.len())
                } else {
                    Word::zeros(y.len())
                };
                NodeResult {
                    trace: trace.then(|| leaf_trace(level, code, y.distance(&estimate))),
                    ties: usize::from(ones == y.len()),
                    estimate,
                    converged: true,
                    iterations: 1,
                }
            }
            1 => {
                let decision = fht::ml_decode_first_order_counted(&y)
                    .expect("first-order nodes have length at least 2");
                let estimate = fht::estimate_to_word(decision.estimate, code.m());
                NodeResult {
                    trace: trace.then(|| leaf_trace(level, code, y.distance(&estimate))),
                    ties: usize::from(decision.is_tie()),
                    estimate,
                    converged: true,
                    iterations: 1,
                }
            }
            _ => self.decode_inner(&mut y, level, code, trace),
        }
    }

    fn decode_inner(&self, y: &mut Word, level: usize, code: CodeParams, trace: bool) -> NodeResult {
        let maps = &self.families[level].maps;
        let child_len = 1usize << (code.m() - self.cfg.k);
        let parallel = maps.len() * child_len >= PARALLEL_WORK_THRESHOLD;
        let mut per_iteration = Vec::new();
        let mut ties = 0;
        let mut converged = false;
        let mut iterations = 0;
        for _ in 0..self.cfg.max_iter {
            iterations += 1;
            let decode_one = |map: &CosetIndexMap| {
                let projection = subspace::project(y, map).expect("lengths match by construction");
                let child = self.decode_node(projection.clone(), level + 1, trace);
                (projection.xor(&child.estimate), child.ties, child.trace)
            };
            let children: Vec<_> = if parallel {
                maps.par_iter().map(decode_one).collect()
            } else {
                maps.iter().map(decode_one).collect()
            };
            let mut disagreements = Vec::with_capacity(children.len());
            let mut child_traces = Vec::new();
            for (diff, child_ties, child_trace) in children {
                disagreements.push(diff);
                ties += child_ties;
                child_traces.extend(child_trace);
            }
            let flips = flip_mask(y.len(), &disagreements, maps);
            if trace {
                per_iteration.push(TraceIteration {
                    flip_count: flips.weight(),
                    children: child_traces,
                });
            }
            if flips.is_zero() {
                converged = true;
                break;
            }
            y.xor_assign(&flips);
        }
        NodeResult {
            estimate: y.clone(),
            converged,
            iterations,
            ties,
            trace: trace.then_some(TraceNode {
                level,
                code,
                per_iteration,
            }),
        }
    }
}

fn leaf_trace(level: usize, code: CodeParams, flip_count: usize) -> TraceNode {
    TraceNode {
        level,
        code,
        per_iteration: vec![TraceIteration {
            flip_count,
            children: Vec::new(),
        }],
    }
}

/// Decodes `y` with the RPA algorithm under `cfg`.
pub fn rpa_decode(y: &Word, cfg: &RpaConfig, trace: bool) -> Result<DecodeOutcome> {
    RpaDecoder::new(*cfg)?.decode(y, trace)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub rpa: DecodeOutcome,
    pub ml: Word,
    pub agree: bool,
}

/// Runs RPA and the exhaustive ML decoder on the same word.
pub fn decode_with_oracle_check(y: &Word, cfg: &RpaConfig) -> Result<OracleCheck> {
    let rpa = rpa_decode(y, cfg, false)?;
    let ml = fht::brute_force_ml(y, cfg.params)?;
    let agree = rpa.estimate == ml;
    Ok(OracleCheck { rpa, ml, agree })
}
