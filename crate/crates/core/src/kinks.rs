//! Kinks of walks on the leafy dual graph and their resolution.
//!
//! Indices follow the usual 1-based convention: a walk has edges
//! `e_1, ..., e_n` and visits `u_0, ..., u_n`; the sign `ε_j` records the
//! turn at `u_j` from `e_j` into `e_{j+1}`.
//!
//! A kink is a segment `(e_j, ..., e_m)` of one of two shapes around a
//! self-folded triangle `v`:
//!
//! * a *curl* (multiplicity 1): a core `(η_{v,i}, η_{v,k})` at positions
//!   `j+r+1, j+r+2`, mirrored flanks `e_{j+t} = e_{m-t}` for `t = 1..r`, with
//!   `r = (m-j-3)/2 ≥ 1`, `e_{j+r} = e_{j+r+3}` not an η edge, and
//!   `ε_j = ε_{j+r+1} = ε_{m-1}`;
//! * a *spiral* (multiplicity `r+1 ≥ 2`): an alternating run
//!   `(η_{v,i} η_{v,k})^{r+1}` at positions `j+1 ..= j+2r+2`, flanked by
//!   `e_j = e_m` not an η edge.
//!
//! For closed walks the kinks are those of every rotation, so segments may
//! wrap around; positions are then read cyclically and `m` may exceed `n`.
//! A closed walk that only winds around one puncture, `(η_{v,i} η_{v,k})^n`
//! with `n ≥ 2`, is reported as a *peripheral* kink of multiplicity `n`.
//!
//! Resolving a curl swaps its two core entries. Resolving a spiral swaps
//! one adjacent pair of its core and reduces; the result does not depend
//! on the pair chosen.

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ribbon::{EdgeId, TurnSign};
use crate::triangulation::LeafyDualGraph;
use crate::walks::{self, ClosedWalkClass, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KinkShape {
    Curl,
    Spiral,
    Peripheral,
}

impl fmt::Display for KinkShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KinkShape::Curl => "curl",
            KinkShape::Spiral => "spiral",
            KinkShape::Peripheral => "peripheral",
        };
        f.write_str(s)
    }
}

/// One occurrence of a kink on a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Kink {
    /// First position of the segment (1-based).
    pub j: usize,
    /// Last position of the segment; may exceed the length for closed walks.
    pub m: usize,
    pub multiplicity: usize,
    pub r: usize,
    /// Index of the self-folded triangle in [`LeafyDualGraph::self_folded`].
    pub cluster: usize,
    /// η indices `(i, k)` of the first two core entries.
    pub eta_order: (u8, u8),
    pub shape: KinkShape,
}

impl Kink {
    /// First and last position of the core.
    pub fn core(&self) -> (usize, usize) {
        match self.shape {
            KinkShape::Curl => (self.j + self.r + 1, self.j + self.r + 2),
            KinkShape::Spiral | KinkShape::Peripheral => (self.j + 1, self.j + 2 * self.r + 2),
        }
    }

    /// Number of edges in the segment.
    pub fn span_len(&self) -> usize {
        self.m + 1 - self.j
    }
}

/// Sum of the multiplicities.
pub fn total_multiplicity(kinks: &[Kink]) -> usize {
    kinks.iter().map(|k| k.multiplicity).sum()
}

/// Read-only access to a walk as a linear or cyclic word with signs.
struct Word<'a> {
    lg: &'a LeafyDualGraph,
    edges: &'a [EdgeId],
    signs: Vec<TurnSign>,
    cyclic: bool,
}

impl<'a> Word<'a> {
    fn new(lg: &'a LeafyDualGraph, w: &'a Walk, cyclic: bool) -> Result<Word<'a>> {
        let g = &lg.graph;
        let s = if cyclic {
            walks::closed_sign_sequence(g, w)?
        } else {
            walks::sign_sequence(g, w)?
        };
        Ok(Word {
            lg,
            edges: &w.edges,
            signs: s.0,
            cyclic,
        })
    }

    fn n(&self) -> usize {
        self.edges.len()
    }

    /// `e_i`, read cyclically for closed words.
    fn e(&self, i: usize) -> EdgeId {
        if self.cyclic {
            self.edges[(i + self.n() - 1) % self.n()]
        } else {
            self.edges[i - 1]
        }
    }

    /// `ε_i`: turn at `u_i` from `e_i` into `e_{i+1}`.
    fn eps(&self, i: usize) -> TurnSign {
        if self.cyclic {
            self.signs[(i + self.n() - 1) % self.n()]
        } else {
            self.signs[i - 1]
        }
    }

    fn eta(&self, i: usize) -> Option<(usize, u8)> {
        self.lg.eta(self.e(i))
    }

    /// Whether `i` is a valid position (linear words only check bounds).
    fn in_range(&self, i: isize) -> bool {
        self.cyclic || (i >= 1 && i as usize <= self.n())
    }

    fn norm(&self, i: isize) -> usize {
        if self.cyclic {
            let n = self.n() as isize;
            (((i - 1) % n + n) % n + 1) as usize
        } else {
            i as usize
        }
    }

    fn scan(&self) -> Vec<Kink> {
        let n = self.n();
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        if self.cyclic && (1..=n).all(|i| self.eta(i).is_some()) {
            if n >= 4 {
                let (c, i) = self.eta(1).unwrap();
                let (_, k) = self.eta(2).unwrap();
                out.push(Kink {
                    j: 0,
                    m: n + 1,
                    multiplicity: n / 2,
                    r: n / 2 - 1,
                    cluster: c,
                    eta_order: (i, k),
                    shape: KinkShape::Peripheral,
                });
            }
            return out;
        }
        self.scan_curls(&mut out);
        self.scan_spirals(&mut out);
        out.sort_by_key(|k| (k.j, k.m));
        out
    }

    fn scan_curls(&self, out: &mut Vec<Kink>) {
        let n = self.n();
        let last = if self.cyclic { n } else { n.saturating_sub(1) };
        for p in 1..=last {
            let (Some((c, i)), Some((c2, k))) = (self.eta(p), self.eta(p + 1)) else {
                continue;
            };
            if c != c2 || i == k {
                continue;
            }
            let pi = p as isize;
            // the segment (e_j .. e_m) has 2r + 4 entries
            let mut r = 1usize;
            loop {
                let j = pi - r as isize - 1;
                let m = pi + r as isize + 2;
                if !(self.in_range(j) && self.in_range(m)) || (self.cyclic && 2 * r + 4 > n) {
                    break;
                }
                let t_ok = self.e(self.norm(pi - r as isize)) == self.e(self.norm(pi + 1 + r as isize));
                if !t_ok {
                    break;
                }
                let flank = self.e(self.norm(pi - 1));
                let flank_ok = flank == self.e(self.norm(pi + 2)) && self.lg.eta(flank).is_none();
                let js = self.norm(j);
                let signs_ok = flank_ok
                    && (skip_sign_condition()
                        || (self.eps(js) == self.eps(p)
                            && self.eps(p) == self.eps(self.norm(m - 1))));
                if signs_ok {
                    out.push(Kink {
                        j: js,
                        m: js + 2 * r + 3,
                        multiplicity: 1,
                        r,
                        cluster: c,
                        eta_order: (i, k),
                        shape: KinkShape::Curl,
                    });
                }
                r += 1;
            }
        }
    }

    fn scan_spirals(&self, out: &mut Vec<Kink>) {
        let n = self.n();
        // maximal runs of η edges; for cyclic words start right after a non-η edge
        let offset = if self.cyclic {
            match (1..=n).find(|&i| self.eta(i).is_none()) {
                Some(i) => i,
                None => return,
            }
        } else {
            0
        };
        let mut i = 1;
        while i <= n {
            let pos = |x: usize| if self.cyclic { self.norm((offset + x) as isize) } else { x };
            if self.eta(pos(i)).is_none() {
                i += 1;
                continue;
            }
            let a = i;
            while i <= n && self.eta(pos(i)).is_some() {
                i += 1;
            }
            let b = i - 1;
            let len = b + 1 - a;
            if len < 4 || len % 2 != 0 {
                continue;
            }
            let (ja, mb) = (a as isize - 1, b as isize + 1);
            if !self.cyclic && (ja < 1 || mb as usize > n) {
                continue;
            }
            if self.cyclic && len + 2 > n {
                continue;
            }
            let ej = self.e(pos(ja as usize));
            let em = self.e(pos(mb as usize));
            if ej != em || self.lg.eta(ej).is_some() {
                continue;
            }
            let (c, ei) = self.eta(pos(a)).unwrap();
            let (_, ek) = self.eta(pos(a + 1)).unwrap();
            let r = len / 2 - 1;
            let j = pos(ja as usize);
            out.push(Kink {
                j,
                m: j + 2 * r + 3,
                multiplicity: r + 1,
                r,
                cluster: c,
                eta_order: (ei, ek),
                shape: KinkShape::Spiral,
            });
        }
    }
}

fn check_open(lg: &LeafyDualGraph, f: &Walk) -> Result<()> {
    if let Some(p) = f.first_backtrack() {
        return Err(Error::NotStandard(p));
    }
    for u in [f.start, f.end] {
        if !lg.is_endpoint(u) {
            return Err(Error::InvalidEndpoint(lg.graph.vertex_label(u).to_string()));
        }
    }
    Ok(())
}

/// All kinks of an open walk in standard form, sorted by `(j, m)`.
pub fn find_kinks(lg: &LeafyDualGraph, f: &Walk) -> Result<Vec<Kink>> {
    check_open(lg, f)?;
    Ok(Word::new(lg, f, false)?.scan())
}

/// Kinks of a plain edge word read as an open walk, without endpoint checks.
pub fn find_kinks_unchecked(lg: &LeafyDualGraph, f: &Walk) -> Result<Vec<Kink>> {
    if let Some(p) = f.first_backtrack() {
        return Err(Error::NotStandard(p));
    }
    Ok(Word::new(lg, f, false)?.scan())
}

/// Kinks of a cyclically reduced closed walk, positions relative to its
/// own starting point.
pub fn find_kinks_cyclic(lg: &LeafyDualGraph, w: &Walk) -> Result<Vec<Kink>> {
    let reduced = walks::cyclic_reduce(&lg.graph, w)?;
    if reduced.edges != w.edges {
        return Err(Error::NotStandard(1));
    }
    Ok(Word::new(lg, w, true)?.scan())
}

/// All kinks of a closed class, positions relative to its canonical representative.
pub fn find_kinks_closed(lg: &LeafyDualGraph, c: &ClosedWalkClass) -> Result<Vec<Kink>> {
    Word::new(lg, c.representative(), true).map(|w| w.scan())
}

fn swap_in(edges: &[EdgeId], s: usize) -> Vec<EdgeId> {
    let mut out = edges.to_vec();
    out.swap(s - 1, s);
    out
}

/// Positions `s` allowed for the swap that resolves `k`.
pub fn swap_positions(k: &Kink) -> std::ops::RangeInclusive<usize> {
    match k.shape {
        KinkShape::Curl => k.j + k.r + 1..=k.j + k.r + 1,
        KinkShape::Spiral | KinkShape::Peripheral => k.j + 1..=k.j + 2 * k.r + 1,
    }
}

/// Resolves a kink of an open walk, swapping at the leftmost core position.
pub fn resolve_kink(lg: &LeafyDualGraph, f: &Walk, k: &Kink) -> Result<Walk> {
    let s = *swap_positions(k).start();
    resolve_kink_at(lg, f, k, s)
}

/// Resolves a kink of an open walk, swapping entries `s` and `s + 1`.
pub fn resolve_kink_at(lg: &LeafyDualGraph, f: &Walk, k: &Kink, s: usize) -> Result<Walk> {
    if !find_kinks(lg, f)?.contains(k) || !swap_positions(k).contains(&s) {
        return Err(Error::NotAKink);
    }
    Ok(apply_swap(f, s))
}

fn apply_swap(f: &Walk, s: usize) -> Walk {
    walks::reduce(Walk {
        start: f.start,
        end: f.end,
        edges: swap_in(&f.edges, s),
    })
}

/// Result of resolving a kink of a closed walk: the resolved walk in the
/// rotation where the kink was resolved, or `None` if it became contractible.
fn resolve_cyclic(lg: &LeafyDualGraph, w: &Walk, k: &Kink, s_offset: usize) -> Result<Option<Walk>> {
    let g = &lg.graph;
    let n = w.len();
    if k.shape == KinkShape::Peripheral {
        if n <= 4 {
            return Ok(None);
        }
        return Ok(Some(Walk {
            start: w.start,
            end: w.start,
            edges: w.edges[..n - 4].to_vec(),
        }));
    }
    // rotate so the kink starts at position 2 (or 1 if it fills the walk)
    let target = if k.span_len() < n { 2 } else { 1 };
    let shift = (k.j + n - target) % n;
    let rot = walks::rotate(g, w, shift);
    let s = swap_positions(k).start() - k.j + target + s_offset;
    let swapped = Walk {
        start: rot.start,
        end: rot.end,
        edges: swap_in(&rot.edges, s),
    };
    match walks::cyclic_reduce(g, &swapped) {
        Ok(x) => Ok(Some(x)),
        Err(Error::Contractible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Resolves a kink of a closed class; `None` means the result is contractible.
pub fn resolve_kink_closed(
    lg: &LeafyDualGraph,
    c: &ClosedWalkClass,
    k: &Kink,
) -> Result<Option<ClosedWalkClass>> {
    resolve_kink_closed_at(lg, c, k, 0)
}

/// As [`resolve_kink_closed`], swapping `offset` positions right of the
/// leftmost allowed pair.
pub fn resolve_kink_closed_at(
    lg: &LeafyDualGraph,
    c: &ClosedWalkClass,
    k: &Kink,
    offset: usize,
) -> Result<Option<ClosedWalkClass>> {
    if !find_kinks_closed(lg, c)?.contains(k) || offset >= swap_positions(k).count() {
        return Err(Error::NotAKink);
    }
    resolve_cyclic(lg, c.representative(), k, offset)?
        .map(|w| ClosedWalkClass::new(&lg.graph, &w))
        .transpose()
}

static SKIP_SIGN_CONDITION: AtomicBool = AtomicBool::new(false);

/// Deliberately breaks curl detection by ignoring the sign condition, so
/// that the self-test harness can demonstrate it catches a faulty detector.
#[doc(hidden)]
pub fn inject_fault_skip_sign_condition(on: bool) {
    SKIP_SIGN_CONDITION.store(on, Ordering::Relaxed);
}

fn skip_sign_condition() -> bool {
    SKIP_SIGN_CONDITION.load(Ordering::Relaxed)
}

fn diverged(steps: usize) -> Error {
    Error::Diverged(format!("walk repeated after {steps} resolutions"))
}

/// How the next kink to resolve is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Among kinks whose segment contains no other kink's segment, take
    /// the leftmost; resolve spirals at their leftmost core pair.
    LeftmostInnermost,
    /// Uniformly random kink and swap position, from a seeded generator.
    Random(u64),
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::LeftmostInnermost
    }
}

enum Chooser {
    Leftmost,
    Random(ChaCha8Rng),
}

impl Chooser {
    fn new(s: Strategy) -> Chooser {
        match s {
            Strategy::LeftmostInnermost => Chooser::Leftmost,
            Strategy::Random(seed) => Chooser::Random(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    /// Picks a kink index and an offset into its allowed swap positions.
    fn choose(&mut self, kinks: &[Kink], n: usize, cyclic: bool) -> (usize, usize) {
        match self {
            Chooser::Leftmost => (innermost_leftmost(kinks, n, cyclic), 0),
            Chooser::Random(rng) => {
                let i = rng.gen_range(0..kinks.len());
                let choices = swap_positions(&kinks[i]).count();
                (i, rng.gen_range(0..choices))
            }
        }
    }
}

fn contains(outer: &Kink, inner: &Kink, n: usize, cyclic: bool) -> bool {
    if cyclic {
        if outer.shape == KinkShape::Peripheral {
            return true;
        }
        let off = (inner.j + n - outer.j) % n;
        off + inner.span_len() <= outer.span_len()
    } else {
        outer.j <= inner.j && inner.m <= outer.m
    }
}

fn innermost_leftmost(kinks: &[Kink], n: usize, cyclic: bool) -> usize {
    (0..kinks.len())
        .filter(|&a| {
            !(0..kinks.len()).any(|b| {
                b != a && kinks[b] != kinks[a] && contains(&kinks[a], &kinks[b], n, cyclic)
            })
        })
        .min_by_key(|&a| (kinks[a].j, kinks[a].m))
        .unwrap_or(0)
}

/// One resolution performed during normalization.
#[derive(Debug, Clone)]
pub struct Step {
    pub kink: Kink,
    /// Swap position used (1-based, relative to the walk before the step).
    pub swap: usize,
    pub length_before: usize,
    pub length_after: usize,
    pub multiplicity_before: usize,
    pub multiplicity_after: usize,
    /// Multiplicity left at the resolved spot: a kink at the same
    /// self-folded triangle whose core contains position `j + 1` after
    /// the step (0 if none).
    pub residual: usize,
    /// The walk after the step (`None`: a closed walk became contractible).
    pub result: Option<Walk>,
}

impl Step {
    /// Checks the length drop and leftover multiplicity expected of a
    /// resolution of this kink's multiplicity.
    pub fn check_drop(&self) -> std::result::Result<(), String> {
        let mu = self.kink.multiplicity;
        let drop = self.length_before as isize - self.length_after as isize;
        let mdrop = mu as isize - self.residual as isize;
        let ok = match mu {
            1 => drop == 0 && self.residual == 0,
            2 => drop >= 4 && self.residual == 0,
            3 => (mdrop == 2 || mdrop == 3) && drop == 4,
            _ => mdrop == 2 && drop == 4,
        };
        if ok {
            Ok(())
        } else {
            Err(format!(
                "multiplicity {mu} {:?} at j={}: length {} -> {}, residual multiplicity {}",
                self.kink.shape, self.kink.j, self.length_before, self.length_after, self.residual
            ))
        }
    }

    /// Checks that the total multiplicity went down.
    pub fn check_decrease(&self) -> std::result::Result<(), String> {
        if self.multiplicity_after < self.multiplicity_before {
            Ok(())
        } else {
            Err(format!(
                "total multiplicity did not decrease: {} -> {}",
                self.multiplicity_before, self.multiplicity_after
            ))
        }
    }

    /// Both step checks.
    pub fn check(&self) -> std::result::Result<(), String> {
        self.check_drop()?;
        self.check_decrease()
    }
}

fn residual(kinks: &[Kink], k: &Kink, n: usize) -> usize {
    // a multiplicity-2 core cancels completely, and the cancellation may
    // cascade and shift unrelated kinks onto the old positions
    if n == 0 || k.multiplicity == 2 {
        return 0;
    }
    let pos = match k.shape {
        KinkShape::Curl => k.j + k.r + 1,
        _ => k.j + 1,
    };
    kinks
        .iter()
        .filter(|x| x.cluster == k.cluster)
        .filter(|x| {
            let (a, b) = x.core();
            if x.shape == KinkShape::Peripheral {
                return true;
            }
            (a..=b).any(|q| (q - 1) % n + 1 == (pos - 1) % n + 1)
        })
        .map(|x| x.multiplicity)
        .max()
        .unwrap_or(0)
}

/// The kink-free normal form of an open walk.
pub fn normalize(lg: &LeafyDualGraph, f: &Walk, strategy: Strategy) -> Result<Walk> {
    normalize_inner(lg, f, strategy, None)
}

/// As [`normalize`], also returning every step performed.
pub fn normalize_traced(
    lg: &LeafyDualGraph,
    f: &Walk,
    strategy: Strategy,
) -> Result<(Walk, Vec<Step>)> {
    let mut steps = Vec::new();
    let w = normalize_inner(lg, f, strategy, Some(&mut steps))?;
    Ok((w, steps))
}

fn normalize_inner(
    lg: &LeafyDualGraph,
    f: &Walk,
    strategy: Strategy,
    mut trace: Option<&mut Vec<Step>>,
) -> Result<Walk> {
    let mut chooser = Chooser::new(strategy);
    let mut cur = f.clone();
    let mut kinks = find_kinks(lg, &cur)?;
    let mut seen = HashSet::from([cur.edges.clone()]);
    let mut steps = 0;
    while !kinks.is_empty() {
        steps += 1;
        let (i, off) = chooser.choose(&kinks, cur.len(), false);
        let k = kinks[i];
        let s = swap_positions(&k).start() + off;
        let next = apply_swap(&cur, s);
        if !seen.insert(next.edges.clone()) {
            return Err(diverged(steps));
        }
        let next_kinks = find_kinks(lg, &next)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(Step {
                kink: k,
                swap: s,
                length_before: cur.len(),
                length_after: next.len(),
                multiplicity_before: total_multiplicity(&kinks),
                multiplicity_after: total_multiplicity(&next_kinks),
                residual: residual(&next_kinks, &k, next.len()),
                result: Some(next.clone()),
            });
        }
        cur = next;
        kinks = next_kinks;
    }
    Ok(cur)
}

/// The kink-free normal form of a closed class; `None` if it is contractible
/// once punctures are treated as order-two points.
pub fn normalize_closed(
    lg: &LeafyDualGraph,
    c: &ClosedWalkClass,
    strategy: Strategy,
) -> Result<Option<ClosedWalkClass>> {
    normalize_closed_inner(lg, c, strategy, None)
}

/// As [`normalize_closed`], also returning every step performed.
pub fn normalize_closed_traced(
    lg: &LeafyDualGraph,
    c: &ClosedWalkClass,
    strategy: Strategy,
) -> Result<(Option<ClosedWalkClass>, Vec<Step>)> {
    let mut steps = Vec::new();
    let w = normalize_closed_inner(lg, c, strategy, Some(&mut steps))?;
    Ok((w, steps))
}

fn normalize_closed_inner(
    lg: &LeafyDualGraph,
    c: &ClosedWalkClass,
    strategy: Strategy,
    mut trace: Option<&mut Vec<Step>>,
) -> Result<Option<ClosedWalkClass>> {
    let g = &lg.graph;
    let mut chooser = Chooser::new(strategy);
    let mut cur = c.clone();
    let mut kinks = find_kinks_closed(lg, &cur)?;
    let mut seen = HashSet::from([cur.representative().edges.clone()]);
    let mut steps = 0;
    while !kinks.is_empty() {
        steps += 1;
        let n = cur.len();
        let (i, off) = chooser.choose(&kinks, n, true);
        let k = kinks[i];
        let resolved = resolve_cyclic(lg, cur.representative(), &k, off)?;
        let (after_len, after_mult, resid) = match &resolved {
            None => (0, 0, 0),
            Some(w) => {
                let local = Word::new(lg, w, true)?.scan();
                let res = match k.shape {
                    KinkShape::Peripheral => local
                        .iter()
                        .filter(|x| x.shape == KinkShape::Peripheral)
                        .map(|x| x.multiplicity)
                        .sum(),
                    _ => {
                        let target = if k.span_len() < n { 2 } else { 1 };
                        let moved = Kink { j: target, ..k };
                        residual(&local, &moved, w.len())
                    }
                };
                (w.len(), total_multiplicity(&local), res)
            }
        };
        let next = match &resolved {
            None => None,
            Some(w) => Some(ClosedWalkClass::new(g, w)?),
        };
        if let Some(t) = trace.as_deref_mut() {
            t.push(Step {
                kink: k,
                swap: swap_positions(&k).start() + off,
                length_before: n,
                length_after: after_len,
                multiplicity_before: total_multiplicity(&kinks),
                multiplicity_after: after_mult,
                residual: resid,
                result: resolved,
            });
        }
        match next {
            None => return Ok(None),
            Some(nc) => {
                if !seen.insert(nc.representative().edges.clone()) {
                    return Err(diverged(steps));
                }
                kinks = find_kinks_closed(lg, &nc)?;
                cur = nc;
            }
        }
    }
    Ok(Some(cur))
}

/// Outcome of checking the confluence key lemma on one instance.
#[derive(Debug, Clone)]
pub struct KeyLemmaReport {
    /// The kink `κ` of `(e_2, ..., e_n)`, indexed as a kink of `f`.
    pub kink: Kink,
    /// `ρ_κ(f)`.
    pub resolved: Walk,
    /// `φ(ρ_κ(f) * h)`.
    pub product: Walk,
    /// The shape `φ(ρ_κ(f) * h)` is expected to have.
    pub expected_product: Vec<EdgeId>,
    /// The multiplicity-2 kink `κ'` of the product, if found.
    pub kink_prime: Option<Kink>,
    /// `φ(f * h) = (u_0, e_1, d_1, w_0)`.
    pub direct: Walk,
    /// `ρ_κ'(φ(ρ_κ(f) * h))`.
    pub via_resolution: Option<Walk>,
    pub pass: bool,
}

/// Checks the key lemma on `f = (u_0, e_1..e_n, v_0)` and
/// `h = (v_0, e_n..e_2, d_1, w_0)`, using the leftmost kink of `(e_2..e_n)`.
pub fn check_key_lemma(lg: &LeafyDualGraph, f: &Walk, h: &Walk) -> Result<KeyLemmaReport> {
    let inner = key_lemma_inner_kinks(lg, f, h)?;
    let k = *inner
        .first()
        .ok_or_else(|| Error::KeyLemmaHypothesis("(e_2, ..., e_n) has no kink".into()))?;
    check_key_lemma_with(lg, f, h, &k)
}

fn key_lemma_inner_kinks(lg: &LeafyDualGraph, f: &Walk, h: &Walk) -> Result<Vec<Kink>> {
    let hyp = |s: &str| Err(Error::KeyLemmaHypothesis(s.to_string()));
    if f.is_identity() || h.is_identity() {
        return hyp("f and h must be non-identity");
    }
    check_open(lg, f)?;
    check_open(lg, h)?;
    let n = f.len();
    if h.start != f.end || h.len() != n {
        return hyp("h must start where f ends and have the same length");
    }
    let back: Vec<EdgeId> = f.edges[1..].iter().rev().copied().collect();
    if h.edges[..n - 1] != back[..] {
        return hyp("h must retrace e_n, ..., e_2");
    }
    if h.edges[n - 1] == f.edges[0] {
        return hyp("e_1 must differ from d_1");
    }
    let g = &lg.graph;
    let u1 = g.other_end(f.edges[0], f.start).expect("consecutive");
    let tail = Walk {
        start: u1,
        end: f.end,
        edges: f.edges[1..].to_vec(),
    };
    Ok(find_kinks_unchecked(lg, &tail)?
        .into_iter()
        .map(|k| Kink {
            j: k.j + 1,
            m: k.m + 1,
            ..k
        })
        .collect())
}

/// As [`check_key_lemma`] for a chosen kink `k` of `(e_2..e_n)` (indexed in `f`).
pub fn check_key_lemma_with(
    lg: &LeafyDualGraph,
    f: &Walk,
    h: &Walk,
    k: &Kink,
) -> Result<KeyLemmaReport> {
    let inner = key_lemma_inner_kinks(lg, f, h)?;
    if !inner.contains(k) {
        return Err(Error::KeyLemmaHypothesis("not a kink of (e_2, ..., e_n)".into()));
    }
    let e = |i: usize| f.edges[i - 1];
    let d1 = *h.edges.last().unwrap();
    let resolved = resolve_kink(lg, f, k)?;
    let product = walks::compose(&resolved, h)?;

    // entries before the six-entry block, the block, and the retraced tail
    let (head_end, block) = match k.shape {
        KinkShape::Curl => {
            let p = k.j + k.r;
            (
                p - 1,
                [e(p), e(p + 2), e(p + 1), e(p + 2), e(p + 1), e(p)],
            )
        }
        _ => {
            let j = k.j;
            (
                j - 1,
                [e(j), e(j + 2), e(j + 1), e(j + 2), e(j + 1), e(j)],
            )
        }
    };
    let mut expected = f.edges[..head_end].to_vec();
    expected.extend_from_slice(&block);
    expected.extend(f.edges[1..head_end].iter().rev().copied());
    expected.push(d1);

    let direct = walks::compose(f, h)?;
    let kink_prime = find_kinks(lg, &product)?
        .into_iter()
        .find(|x| x.multiplicity == 2 && x.j == head_end + 1);
    let via_resolution = match &kink_prime {
        Some(kp) => Some(resolve_kink(lg, &product, kp)?),
        None => None,
    };
    let pass = product.edges == expected
        && direct.edges == vec![f.edges[0], d1]
        && via_resolution.as_ref() == Some(&direct);
    Ok(KeyLemmaReport {
        kink: *k,
        resolved,
        product,
        expected_product: expected,
        kink_prime,
        direct,
        via_resolution,
        pass,
    })
}
