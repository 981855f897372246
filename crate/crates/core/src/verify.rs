//! Hypothesis verification by coincidence counting, and the branch search
//! that turns basis hypotheses into a match decision.
//!
//! Each compatible couple found for an A basis opens a branch. A branch starts
//! with the basis quality as its confidence, probes the most confident A
//! edges one at a time (a miss multiplies the confidence by `miss_factor`)
//! and is abandoned once the confidence drops below `prune_threshold`.
//! Surviving branches are scored by counting coinciding edges.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 has inherent methods once std is linked
use num_traits::Float;

use crate::edge::EdgeSet;
use crate::hypothesis::{enumerate_basis_pairs, find_compatible_pairs, HypothesisConfig, Transform};
use crate::index::SpatialIndex;
use crate::{Error, Result};

/// Refinement rounds applied to a surviving branch's transform.
const REFINE_ROUNDS: usize = 4;

/// A refined transform is dropped if its score falls below this fraction of
/// the unrefined one.
const REFINE_KEEP: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct VerifyConfig {
    /// Position tolerance, A-frame pixels.
    pub eps_pos: f64,
    /// Orientation tolerance, radians.
    pub eps_theta: f64,
    /// Number of A edges probed before full counting.
    pub probe_count: usize,
    /// Confidence multiplier per probe miss, in (0, 1).
    pub miss_factor: f64,
    /// Branches whose confidence falls below this are abandoned.
    pub prune_threshold: f64,
    /// Score at or above which the images are declared similar.
    pub accept_score: f64,
    /// Total number of branches explored.
    pub max_branches: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            eps_pos: 3.0,
            eps_theta: 0.2,
            probe_count: 20,
            miss_factor: 0.9,
            prune_threshold: 0.3,
            accept_score: 0.4,
            max_branches: 300,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_pos > 0.0 && self.eps_theta > 0.0) {
            return Err(Error::InvalidConfig("eps_pos and eps_theta must be positive"));
        }
        if !(self.miss_factor > 0.0 && self.miss_factor < 1.0) {
            return Err(Error::InvalidConfig("miss_factor must lie in (0, 1)"));
        }
        if !(self.prune_threshold >= 0.0 && self.prune_threshold < 1.0) {
            return Err(Error::InvalidConfig("prune_threshold must lie in [0, 1)"));
        }
        if !(self.accept_score > 0.0 && self.accept_score < 1.0) {
            return Err(Error::InvalidConfig("accept_score must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Outcome of counting coinciding edges under one transform.
#[derive(Debug, Clone, PartialEq)]
pub struct Coincidences {
    /// `(A index, N index)`, one-to-one, sorted by A index.
    pub pairs: Vec<(usize, usize)>,
    pub a_count: usize,
    /// N edges whose mapped position falls inside the A frame.
    pub n_visible: usize,
    /// `2 m / (|A| + |N_visible|)`, 0 when both are empty.
    pub score: f64,
}

impl Coincidences {
    #[inline]
    pub fn matched(&self) -> usize {
        self.pairs.len()
    }
}

fn symmetric_score(matched: usize, a: usize, n: usize) -> f64 {
    if a + n == 0 {
        0.0
    } else {
        2.0 * matched as f64 / (a + n) as f64
    }
}

/// Counts edges of `n` that coincide with edges of `a` after mapping by `t`.
///
/// Orientations are compared unchanged (shift + isotropic scale preserves
/// angles). N edges are considered in descending confidence and first take
/// their nearest free admissible A edge; augmenting paths then complete this
/// to a maximum one-to-one matching, so `m` never decreases when a tolerance
/// grows.
pub fn count_coincidences(
    a: &EdgeSet,
    idx_a: &SpatialIndex,
    n: &EdgeSet,
    t: &Transform,
    cfg: &VerifyConfig,
) -> Coincidences {
    let a_edges = a.edges();
    let n_edges = n.edges();

    let mut order: Vec<(usize, f64, f64)> = n_edges
        .iter()
        .enumerate()
        .filter_map(|(k, e)| {
            let (x, y) = t.apply(e.x, e.y);
            a.contains(x, y).then_some((k, x, y))
        })
        .collect();
    order.sort_by(|p, q| n_edges[q.0].confidence.total_cmp(&n_edges[p.0].confidence).then(p.0.cmp(&q.0)));

    // admissible A partners per visible N edge, nearest first
    let adjacency: Vec<Vec<usize>> = order
        .iter()
        .map(|&(k, x, y)| {
            let mut near: Vec<(f64, usize)> = idx_a
                .query_near(a, x, y, cfg.eps_pos, n_edges[k].theta, cfg.eps_theta)
                .into_iter()
                .map(|i| ((a_edges[i].x - x).hypot(a_edges[i].y - y), i))
                .collect();
            near.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
            near.into_iter().map(|(_, i)| i).collect()
        })
        .collect();

    let matching = maximum_matching(&adjacency, a_edges.len());
    let mut pairs: Vec<(usize, usize)> = matching
        .iter()
        .enumerate()
        .filter_map(|(slot, m)| m.map(|i| (i, order[slot].0)))
        .collect();
    pairs.sort_unstable();
    let score = symmetric_score(pairs.len(), a_edges.len(), order.len());
    Coincidences { pairs, a_count: a_edges.len(), n_visible: order.len(), score }
}

/// Greedy start followed by augmenting paths (Kuhn). `adjacency[slot]` lists
/// right-hand vertices in preference order; returns the partner of each slot.
fn maximum_matching(adjacency: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let mut left_match: Vec<Option<usize>> = vec![None; adjacency.len()];
    let mut right_match: Vec<Option<usize>> = vec![None; right];
    for (slot, cands) in adjacency.iter().enumerate() {
        if let Some(&i) = cands.iter().find(|&&i| right_match[i].is_none()) {
            left_match[slot] = Some(i);
            right_match[i] = Some(slot);
        }
    }

    let mut stamp = vec![usize::MAX; right];
    // (left slot on the path, next candidate position); via[k] is the right
    // vertex stack[k] reaches
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut via: Vec<usize> = Vec::new();
    for root in 0..adjacency.len() {
        if left_match[root].is_some() || adjacency[root].is_empty() {
            continue;
        }
        stack.clear();
        via.clear();
        stack.push((root, 0));
        let mut found = false;
        while let Some(top) = stack.last_mut() {
            let (slot, pos) = *top;
            if pos == adjacency[slot].len() {
                stack.pop();
                via.pop();
                continue;
            }
            top.1 += 1;
            let i = adjacency[slot][pos];
            if stamp[i] == root {
                continue;
            }
            stamp[i] = root;
            via.push(i);
            match right_match[i] {
                None => {
                    found = true;
                    break;
                }
                Some(next) => stack.push((next, 0)),
            }
        }
        if found {
            // stack[k].0 is matched to via[k] along the path
            for (k, &(slot, _)) in stack.iter().enumerate() {
                let i = via[k];
                left_match[slot] = Some(i);
                right_match[i] = Some(slot);
            }
        }
    }
    left_match
}

/// Record of a sequential probe run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOutcome {
    pub confidence: f64,
    pub pruned: bool,
    pub hits: usize,
    pub misses: usize,
}

/// A edge indices by descending confidence, ties by index.
fn probe_order(a: &EdgeSet) -> Vec<usize> {
    let e = a.edges();
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by(|&p, &q| e[q].confidence.total_cmp(&e[p].confidence).then(p.cmp(&q)));
    order
}

/// Probes the `probe_count` most confident A edges (skipping `skip` and
/// edges that map outside the N frame) against `n`. Each miss multiplies the
/// confidence by `miss_factor`; the run stops as soon as the confidence falls
/// below `prune_threshold`.
pub fn sequential_verify(
    a: &EdgeSet,
    n: &EdgeSet,
    idx_n: &SpatialIndex,
    t: &Transform,
    initial_confidence: f64,
    skip: &[usize],
    cfg: &VerifyConfig,
) -> ProbeOutcome {
    probe_with_order(a, &probe_order(a), n, idx_n, t, initial_confidence, skip, cfg)
}

#[allow(clippy::too_many_arguments)]
fn probe_with_order(
    a: &EdgeSet,
    order: &[usize],
    n: &EdgeSet,
    idx_n: &SpatialIndex,
    t: &Transform,
    initial_confidence: f64,
    skip: &[usize],
    cfg: &VerifyConfig,
) -> ProbeOutcome {
    let mut out = ProbeOutcome { confidence: initial_confidence, pruned: false, hits: 0, misses: 0 };
    if out.confidence < cfg.prune_threshold {
        out.pruned = true;
        return out;
    }
    let radius = cfg.eps_pos / t.s;
    let edges = a.edges();
    let mut probed = 0;
    for &i in order {
        if probed == cfg.probe_count {
            break;
        }
        if skip.contains(&i) {
            continue;
        }
        let e = &edges[i];
        let (x, y) = t.inverse_apply(e.x, e.y);
        if !n.contains(x, y) {
            continue;
        }
        probed += 1;
        let hit = !idx_n.query_near(n, x, y, radius, e.theta, cfg.eps_theta).is_empty();
        if hit {
            out.hits += 1;
        } else {
            out.misses += 1;
            out.confidence *= cfg.miss_factor;
            if out.confidence < cfg.prune_threshold {
                out.pruned = true;
                break;
            }
        }
    }
    out
}

/// The basis couples behind a reported transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisMatch {
    pub a: (usize, usize),
    pub n: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchCounts {
    pub matched: usize,
    pub a_count: usize,
    pub n_visible: usize,
}

/// Final decision of [`match_edge_sets`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchResult {
    pub decided: bool,
    pub score: f64,
    pub transform: Option<Transform>,
    pub matched_pairs: Vec<(usize, usize)>,
    pub counts: MatchCounts,
    pub branches_tried: usize,
    pub confidence: f64,
    pub basis: Option<BasisMatch>,
}

struct Branch {
    transform: Transform,
    coincidences: Coincidences,
    confidence: f64,
    basis: BasisMatch,
}

/// Least-squares re-estimation of the transform from its own coincidences,
/// kept while the score does not drop.
fn refine(
    a: &EdgeSet,
    idx_a: &SpatialIndex,
    n: &EdgeSet,
    t0: Transform,
    c0: Coincidences,
    hyp: &HypothesisConfig,
    cfg: &VerifyConfig,
) -> (Transform, Coincidences) {
    let (mut t, mut c) = (t0, c0.clone());
    for _ in 0..REFINE_ROUNDS {
        let from: Vec<(f64, f64)> = c.pairs.iter().map(|&(_, k)| n.edges()[k].position()).collect();
        let to: Vec<(f64, f64)> = c.pairs.iter().map(|&(i, _)| a.edges()[i].position()).collect();
        let Some(next) = Transform::fit(&from, &to) else { break };
        if next == t || next.s < hyp.s_min || next.s > hyp.s_max {
            break;
        }
        let recount = count_coincidences(a, idx_a, n, &next, cfg);
        let converged = recount.pairs == c.pairs;
        t = next;
        c = recount;
        if converged {
            break;
        }
    }
    if c.score < REFINE_KEEP * c0.score {
        return (t0, c0);
    }
    (t, c)
}

/// Searches for a shift + scale under which `n` coincides with the reference `a`.
///
/// Basis couples of A are visited best first; every compatible couple in N
/// opens a branch, at most `max_branches` in total. The search stops early
/// once a branch reaches `accept_score`; otherwise the best surviving branch
/// (lowest ordinal on ties) is reported.
pub fn match_edge_sets(a: &EdgeSet, n: &EdgeSet, hyp: &HypothesisConfig, cfg: &VerifyConfig) -> Result<MatchResult> {
    hyp.validate()?;
    cfg.validate()?;
    let idx_a = SpatialIndex::build(a, cfg.eps_pos);
    let idx_n = SpatialIndex::build(n, cfg.eps_pos);
    let order = probe_order(a);

    let mut branches = 0usize;
    let mut best: Option<Branch> = None;
    'bases: for basis in enumerate_basis_pairs(a, hyp) {
        let (a1, a2) = (&a.edges()[basis.i], &a.edges()[basis.j]);
        for pair in find_compatible_pairs(n, &basis, a1, a2, hyp) {
            if branches == cfg.max_branches {
                break 'bases;
            }
            branches += 1;
            let t = pair.transform;
            let probe = probe_with_order(a, &order, n, &idx_n, &t, basis.quality, &[basis.i, basis.j], cfg);
            if probe.pruned {
                continue;
            }
            let counted = count_coincidences(a, &idx_a, n, &t, cfg);
            let (t, counted) = refine(a, &idx_a, n, t, counted, hyp, cfg);
            let score = counted.score;
            let branch = Branch {
                transform: t,
                coincidences: counted,
                confidence: probe.confidence,
                basis: BasisMatch { a: (basis.i, basis.j), n: (pair.n1, pair.n2) },
            };
            if best.as_ref().is_none_or(|b| score > b.coincidences.score) {
                best = Some(branch);
            }
            if score >= cfg.accept_score {
                break 'bases;
            }
        }
    }

    Ok(match best {
        Some(b) => MatchResult {
            decided: b.coincidences.score >= cfg.accept_score,
            score: b.coincidences.score,
            transform: Some(b.transform),
            counts: MatchCounts {
                matched: b.coincidences.matched(),
                a_count: b.coincidences.a_count,
                n_visible: b.coincidences.n_visible,
            },
            matched_pairs: b.coincidences.pairs,
            branches_tried: branches,
            confidence: b.confidence,
            basis: Some(b.basis),
        },
        None => MatchResult {
            decided: false,
            score: 0.0,
            transform: None,
            matched_pairs: Vec::new(),
            counts: MatchCounts { matched: 0, a_count: a.len(), n_visible: 0 },
            branches_tried: branches,
            confidence: 0.0,
            basis: None,
        },
    })
}
