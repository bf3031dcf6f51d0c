//! Seeded property suites over random triangulations and walks.
//!
//! Every case draws from its own ChaCha8 stream (`seed`, stream = case
//! index), so results do not depend on thread scheduling and any failing
//! case can be replayed alone. A failing suite keeps the counterexample
//! with the shortest walk text.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::document::TriangulationDocument;
use crate::error::{Error, Result};
use crate::flips::{find_isomorphism, Flip};
use crate::groupoid;
use crate::kinks::{self, Step, Strategy};
use crate::random::{self, Ends, TriangulationParams};
use crate::ribbon::VertexId;
use crate::triangulation::{LeafyDualGraph, Triangulation};
use crate::walks::{self, format_walk, ClosedWalkClass, Walk};

/// Name of the generator behind every seeded stream.
pub const RNG_NAME: &str = "ChaCha8";

/// A failing case, with enough data to replay it by hand.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub suite: String,
    pub message: String,
    pub triangulation: serde_json::Value,
    pub walks: Vec<String>,
    pub strategy_seeds: Vec<u64>,
    pub case_seed: u64,
    pub case_stream: u64,
}

impl Counterexample {
    fn size(&self) -> usize {
        self.walks.iter().map(|w| w.len()).sum()
    }

    /// The counterexample as one JSON object.
    pub fn dump(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct Report {
    pub suite: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Extra counts, e.g. how many steps of each multiplicity were checked.
    pub note: String,
    pub counterexample: Option<Counterexample>,
    /// Reported but not counted by [`all_gating_passed`].
    pub advisory: bool,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Whether every non-advisory report passed.
pub fn all_gating_passed(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.advisory || r.passed())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} failures",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.cases,
            self.failures
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        if self.advisory {
            write!(f, " [advisory]")?;
        }
        Ok(())
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Everything a failing case reports, collected while the case runs.
struct Case<'a> {
    suite: &'static str,
    seed: u64,
    stream: u64,
    t: &'a Triangulation,
    lg: &'a LeafyDualGraph,
    walks: Vec<String>,
    strategy_seeds: Vec<u64>,
}

impl<'a> Case<'a> {
    fn new(suite: &'static str, seed: u64, stream: u64, t: &'a Triangulation, lg: &'a LeafyDualGraph) -> Self {
        Case {
            suite,
            seed,
            stream,
            t,
            lg,
            walks: Vec::new(),
            strategy_seeds: Vec::new(),
        }
    }

    fn walk(&mut self, w: &Walk) {
        self.walks.push(format_walk(&self.lg.graph, w));
    }

    fn fail(&self, message: impl Into<String>) -> Counterexample {
        let doc = TriangulationDocument::from_triangulation(self.t);
        Counterexample {
            suite: self.suite.to_string(),
            message: message.into(),
            triangulation: serde_json::from_str(&doc.to_json()).expect("valid json"),
            walks: self.walks.clone(),
            strategy_seeds: self.strategy_seeds.clone(),
            case_seed: self.seed,
            case_stream: self.stream,
        }
    }

    fn check(&self, ok: bool, message: impl FnOnce() -> String) -> std::result::Result<(), Counterexample> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(message()))
        }
    }

    fn lift<T>(&self, r: Result<T>) -> std::result::Result<T, Counterexample> {
        r.map_err(|e| self.fail(e.to_string()))
    }
}

type CaseResult<T = ()> = std::result::Result<T, Counterexample>;

fn summarize(suite: &'static str, results: Vec<CaseResult>, note: String) -> Report {
    let cases = results.len();
    let mut failures = 0;
    let mut best: Option<Counterexample> = None;
    for r in results {
        if let Err(c) = r {
            failures += 1;
            if best.as_ref().map_or(true, |b| c.size() < b.size()) {
                best = Some(c);
            }
        }
    }
    Report {
        suite,
        cases,
        failures,
        note,
        counterexample: best,
        advisory: false,
    }
}

/// A pool of random triangulations with their leafy dual graphs, drawn
/// from stream 0. With `punctured`, every member has a self-folded triangle.
pub fn pool(seed: u64, n: usize, punctured: bool) -> Vec<(Triangulation, LeafyDualGraph)> {
    let mut rng = stream(seed, 0);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let t = random::triangulation(&mut rng, TriangulationParams::default());
        if punctured && !t.triangles.iter().any(|x| x.is_self_folded()) {
            continue;
        }
        let lg = t.leafy_dual_graph().expect("generated triangulations are valid");
        out.push((t, lg));
    }
    out
}

/// Counts of the resolution steps checked, by kink multiplicity.
#[derive(Debug, Default, Clone, Copy)]
struct StepCounts {
    by_mult: [usize; 4],
}

impl StepCounts {
    fn add(&mut self, s: &Step) {
        self.by_mult[s.kink.multiplicity.clamp(1, 4) - 1] += 1;
    }

    fn merge(mut self, o: StepCounts) -> StepCounts {
        for i in 0..4 {
            self.by_mult[i] += o.by_mult[i];
        }
        self
    }

    fn total(&self) -> usize {
        self.by_mult.iter().sum()
    }
}

impl fmt::Display for StepCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.by_mult;
        write!(f, "{} steps: mult1 {a}, mult2 {b}, mult3 {c}, mult4+ {d}", self.total())
    }
}

/// Results of the confluence fuzz: agreement of normal forms across
/// strategies, the per-step drop checks and strict decrease.
pub struct FuzzReports {
    pub confluence: Report,
    pub drop_lemmas: Report,
    /// Advisory: resolving one kink can restore an enclosing one, leaving
    /// the total multiplicity unchanged.
    pub strict_decrease: Report,
}

/// Normalizes random open and closed walks under the default strategy and
/// `strategies` random ones, comparing the results and checking every step.
pub fn confluence_fuzz(
    seed: u64,
    triangulations: usize,
    walks_per_triangulation: usize,
    strategies: usize,
    max_len: usize,
    ends: Ends,
) -> FuzzReports {
    let pool = pool(seed, triangulations, false);
    let n = triangulations * walks_per_triangulation;
    let per_case: Vec<(CaseResult, CaseResult, CaseResult, StepCounts)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (t, lg) = &pool[i / walks_per_triangulation.max(1)];
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut case = Case::new("confluence", seed, id, t, lg);
            case.strategy_seeds = (0..strategies).map(|_| rng.gen()).collect();
            let closed = rng.gen_bool(0.2);
            let mut runs: Vec<(Strategy, CaseResult<(String, Vec<Step>)>)> = Vec::new();
            let strategies_used: Vec<Strategy> = std::iter::once(Strategy::LeftmostInnermost)
                .chain(case.strategy_seeds.iter().map(|&s| Strategy::Random(s)))
                .collect();
            if closed {
                let Some(c) = random::closed_walk(&mut rng, lg, max_len) else {
                    return (Ok(()), Ok(()), Ok(()), StepCounts::default());
                };
                case.walk(c.representative());
                for s in strategies_used {
                    let r = kinks::normalize_closed_traced(lg, &c, s).map(|(nf, steps)| {
                        let key = match nf {
                            Some(k) => format_walk(&lg.graph, k.unoriented(&lg.graph).representative()),
                            None => "contractible".to_string(),
                        };
                        (key, steps)
                    });
                    runs.push((s, case.lift(r)));
                }
            } else {
                let w = random::walk(&mut rng, lg, max_len, ends);
                case.walk(&w);
                // Normal forms of order-two loops are compared up to inversion.
                let pair = match w.is_closed() && !w.is_identity() {
                    true => case.lift(groupoid::is_order_two(lg, &w)),
                    false => Ok(false),
                };
                let pair = match pair {
                    Ok(p) => p,
                    Err(c) => return (Err(c.clone()), Ok(()), Err(c), StepCounts::default()),
                };
                for s in strategies_used {
                    let r = kinks::normalize_traced(lg, &w, s).map(|(nf, steps)| {
                        let mut key = format_walk(&lg.graph, &nf);
                        if pair {
                            key = key.min(format_walk(&lg.graph, &walks::invert(&nf)));
                        }
                        (key, steps)
                    });
                    runs.push((s, case.lift(r)));
                }
            }
            let mut counts = StepCounts::default();
            let mut confluent = Ok(());
            let mut drops = Ok(());
            let mut strict = Ok(());
            let mut first: Option<String> = None;
            for (s, run) in runs {
                let (key, steps) = match run {
                    Ok(x) => x,
                    Err(c) => {
                        confluent = Err(c.clone());
                        strict = Err(c);
                        continue;
                    }
                };
                for step in &steps {
                    counts.add(step);
                    if drops.is_ok() {
                        if let Err(m) = step.check_drop() {
                            drops = Err(case.fail(format!("{s:?}: {m}")));
                        }
                    }
                    if strict.is_ok() {
                        if let Err(m) = step.check_decrease() {
                            strict = Err(case.fail(format!("{s:?}: {m}")));
                        }
                    }
                }
                match &first {
                    None => first = Some(key),
                    Some(k) if *k != key => {
                        if confluent.is_ok() {
                            confluent = Err(case.fail(format!(
                                "{s:?} gives `{key}`, leftmost-innermost gives `{k}`"
                            )));
                        }
                    }
                    _ => {}
                }
            }
            (confluent, drops, strict, counts)
        })
        .collect();
    let mut conf = Vec::with_capacity(n);
    let mut drop = Vec::with_capacity(n);
    let mut strict = Vec::with_capacity(n);
    let mut counts = StepCounts::default();
    for (a, b, c, k) in per_case {
        conf.push(a);
        drop.push(b);
        strict.push(c);
        counts = counts.merge(k);
    }
    let note = format!(
        "{triangulations} triangulations, {} strategies per walk",
        strategies + 1
    );
    FuzzReports {
        confluence: summarize("confluence", conf, note),
        drop_lemmas: summarize("drop-lemmas", drop, counts.to_string()),
        strict_decrease: Report {
            advisory: true,
            ..summarize("strict-decrease", strict, format!("{} steps", counts.total()))
        },
    }
}

/// Every normal form reachable from `w` by any sequence of single
/// resolutions (all kinks, all swap positions).
pub fn all_normal_forms(lg: &LeafyDualGraph, w: &Walk, limit: usize) -> Result<HashSet<Walk>> {
    let mut seen: HashSet<Walk> = HashSet::new();
    let mut terminal = HashSet::new();
    let mut stack = vec![w.clone()];
    while let Some(cur) = stack.pop() {
        if !seen.insert(cur.clone()) {
            continue;
        }
        if seen.len() > limit {
            return Err(Error::Diverged(format!("more than {limit} intermediate walks")));
        }
        let ks = kinks::find_kinks(lg, &cur)?;
        if ks.is_empty() {
            terminal.insert(cur);
            continue;
        }
        for k in &ks {
            for s in kinks::swap_positions(k) {
                stack.push(kinks::resolve_kink_at(lg, &cur, k, s)?);
            }
        }
    }
    Ok(terminal)
}

/// Exhaustive search over resolution orders on short walks with several kinks.
pub fn exhaustive_confluence(seed: u64, cases: usize) -> Report {
    let pool = pool(seed, 20, true);
    let results: Vec<(CaseResult, usize)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let (t, lg) = &pool[i % pool.len()];
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut case = Case::new("exhaustive-confluence", seed, id, t, lg);
            let w = random::walk(&mut rng, lg, 40, Ends::Basepoints);
            case.walk(&w);
            let mut forms = match all_normal_forms(lg, &w, 20_000) {
                Ok(f) => f,
                Err(e) => return (Err(case.fail(e.to_string())), 0),
            };
            if w.is_closed() && matches!(groupoid::is_order_two(lg, &w), Ok(true)) {
                forms = forms
                    .into_iter()
                    .map(|f| std::cmp::min_by_key(f.clone(), walks::invert(&f), |x| x.edges.clone()))
                    .collect();
            }
            let many = usize::from(kinks::find_kinks(lg, &w).map_or(0, |k| k.len()) > 1);
            (
                case.check(forms.len() == 1, || format!("{} distinct normal forms", forms.len())),
                many,
            )
        })
        .collect();
    let multi: usize = results.iter().map(|r| r.1).sum();
    summarize(
        "exhaustive-confluence",
        results.into_iter().map(|r| r.0).collect(),
        format!("{multi} walks with several kinks"),
    )
}

fn conjugated_square<R: Rng>(rng: &mut R, lg: &LeafyDualGraph, u: VertexId) -> Result<Walk> {
    let v = rng.gen_range(0..lg.self_folded.len());
    let wander = rng.gen_range(0..12);
    let c = random::path_to_cluster(rng, lg, u, v, wander);
    let [e1, e2] = lg.self_folded[v].eta;
    let sq = Walk::from_word(&lg.graph, lg.self_folded[v].triangle, &[e1, e2, e1, e2])?;
    let x = walks::compose(&walks::compose(&c, &sq)?, &walks::invert(&c))?;
    Ok(if rng.gen_bool(0.5) { walks::invert(&x) } else { x })
}

/// Products of conjugated squares are trivial; kink-free non-identity walks are not.
pub fn k_membership(seed: u64, cases: usize) -> Report {
    let pool = pool(seed, 20, true);
    let results: Vec<CaseResult> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let (t, lg) = &pool[i % pool.len()];
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut case = Case::new("k-membership", seed, id, t, lg);
            let u = *lg.basepoints().choose(&mut rng).expect("has boundary");
            let mut prod = Walk::identity(u);
            for _ in 0..rng.gen_range(1..=5) {
                let x = case.lift(conjugated_square(&mut rng, lg, u))?;
                prod = case.lift(walks::compose(&prod, &x))?;
            }
            case.walk(&prod);
            let nf = case.lift(kinks::normalize(lg, &prod, Strategy::default()))?;
            case.check(nf.is_identity(), || {
                format!("product of squares normalizes to `{}`", format_walk(&lg.graph, &nf))
            })?;

            let free = loop {
                let w = random::walk(&mut rng, lg, 120, Ends::Basepoints);
                let nf = case.lift(kinks::normalize(lg, &w, Strategy::default()))?;
                if !nf.is_identity() {
                    break nf;
                }
            };
            case.walk(&free);
            case.check(case.lift(kinks::find_kinks(lg, &free))?.is_empty(), || "normal form has a kink".into())?;
            let again = case.lift(kinks::normalize(lg, &free, Strategy::Random(rng.gen())))?;
            case.check(again == free && !again.is_identity(), || {
                "kink-free walk normalized to something else".into()
            })
        })
        .collect();
    summarize("k-membership", results, "2 checks per case".into())
}

/// The kink-free section: kink-free, orbifold-equal to its input, idempotent,
/// and unchanged when a conjugated square is spliced into the input.
pub fn section(seed: u64, cases: usize) -> Report {
    let pool = pool(seed, 20, true);
    let results: Vec<(CaseResult, bool)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let (t, lg) = &pool[i % pool.len()];
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut case = Case::new("section", seed, id, t, lg);
            let f = random::walk(&mut rng, lg, 160, Ends::Basepoints);
            case.walk(&f);
            let r = (|| {
                let i = match groupoid::iota(lg, &f) {
                    Err(Error::OrderTwoClass) => {
                        let ok = case.lift(groupoid::is_order_two(lg, &f))?;
                        return case.check(ok, || "refused a class that is not order two".into()).map(|_| true);
                    }
                    r => case.lift(r)?,
                };
                case.check(case.lift(kinks::find_kinks(lg, &i))?.is_empty(), || "iota(f) has a kink".into())?;
                case.check(case.lift(groupoid::orbifold_equal(lg, &i, &f))?, || {
                    "iota(f) is not orbifold-equal to f".into()
                })?;
                case.check(case.lift(groupoid::iota(lg, &i))? == i, || "iota is not idempotent".into())?;
                // splice a conjugated square in at a random vertex of f
                let verts = f.vertex_seq(&lg.graph);
                let cut = rng.gen_range(0..verts.len());
                let x = case.lift(conjugated_square(&mut rng, lg, verts[cut]))?;
                let head = case.lift(Walk::from_word(&lg.graph, f.start, &f.edges[..cut]))?;
                let tail = case.lift(Walk::from_word(&lg.graph, verts[cut], &f.edges[cut..]))?;
                let g = case.lift(walks::compose(&case.lift(walks::compose(&head, &x))?, &tail))?;
                case.check(case.lift(kinks::normalize(lg, &g, Strategy::Random(rng.gen())))? == i, || {
                    format!("splicing a square changes the normal form: `{}`", format_walk(&lg.graph, &g))
                })?;
                Ok(false)
            })();
            match r {
                Ok(skipped) => (Ok(()), skipped),
                Err(e) => (Err(e), false),
            }
        })
        .collect();
    let refused = results.iter().filter(|r| r.1).count();
    summarize(
        "section",
        results.into_iter().map(|r| r.0).collect(),
        format!("{refused} order-two classes refused"),
    )
}

/// Loop generators have order two; random loops are order two exactly when
/// they are non-trivial with a trivial square, checked under a second strategy.
pub fn order_two(seed: u64, cases: usize) -> Report {
    let pool = pool(seed, 20, true);
    let results: Vec<(CaseResult, bool)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let (t, lg) = &pool[i % pool.len()];
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut case = Case::new("order-two", seed, id, t, lg);
            let r = (|| {
                let u = *lg.basepoints().choose(&mut rng).expect("has boundary");
                let v = rng.gen_range(0..lg.self_folded.len());
                let wander = rng.gen_range(0..15);
                let c = random::path_to_cluster(&mut rng, lg, u, v, wander);
                let gen = case.lift(groupoid::loop_generator(lg, u, v, &c))?;
                case.walk(&gen);
                case.check(case.lift(groupoid::is_order_two(lg, &gen))?, || "generator is not order two".into())?;

                // a long loop at u built from kink-free pieces
                let mut lp = Walk::identity(u);
                for _ in 0..rng.gen_range(2..=4) {
                    let w = random::walk(&mut rng, lg, 80, Ends::Any);
                    let here = lp.end;
                    let to = random::path_to(&mut rng, lg, here, |x| x == w.start).expect("connected");
                    let bridge = case.lift(walks::standard_form(&lg.graph, here, &to))?;
                    let piece = case.lift(kinks::normalize(lg, &w, Strategy::default()))?;
                    lp = case.lift(walks::compose(&case.lift(walks::compose(&lp, &bridge))?, &piece))?;
                }
                let back = random::path_to(&mut rng, lg, lp.end, |x| x == u).expect("connected");
                let back = case.lift(walks::standard_form(&lg.graph, lp.end, &back))?;
                lp = case.lift(walks::compose(&lp, &back))?;
                if rng.gen_bool(0.25) {
                    // conjugate a generator so positives also occur here
                    lp = case.lift(walks::compose(
                        &case.lift(walks::compose(&lp, &gen))?,
                        &walks::invert(&lp),
                    ))?;
                }
                case.walk(&lp);
                let claimed = case.lift(groupoid::is_order_two(lg, &lp))?;
                let nf = case.lift(kinks::normalize(lg, &lp, Strategy::default()))?;
                let nf_inv = case.lift(kinks::normalize(lg, &walks::invert(&lp), Strategy::default()))?;
                let square = case.lift(walks::compose(&lp, &lp))?;
                let sq_trivial = case.lift(kinks::normalize(lg, &square, Strategy::Random(rng.gen())))?.is_identity();
                let expected = !nf.is_identity() && sq_trivial;
                let pair = nf_inv == walks::invert(&nf) || nf_inv == nf;
                case.check(claimed == expected && pair, || {
                    format!(
                        "is_order_two = {claimed}, square trivial: {sq_trivial}, \
                         inverse normalizes to the pair: {pair}"
                    )
                })?;
                Ok(claimed)
            })();
            match r {
                Ok(pos) => (Ok(()), pos),
                Err(e) => (Err(e), false),
            }
        })
        .collect();
    let positives = results.iter().filter(|r| r.1).count();
    summarize(
        "order-two",
        results.into_iter().map(|r| r.0).collect(),
        format!("{positives} random loops of order two"),
    )
}

/// Flip and transport: exact round trips, kink presence (of walks and of
/// normal forms) and orbifold equality of pairs are preserved.
pub fn flip_invariance(seed: u64, cases: usize) -> Report {
    let pool: Vec<_> = pool(seed, 40, false);
    let results: Vec<CaseResult> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let (t, lg) = &pool[i % pool.len()];
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut case = Case::new("flip-invariance", seed, id, t, lg);
            let Some(mv) = random::flip_move(&mut rng, t) else {
                return Ok(());
            };
            let flip = case.lift(Flip::new(t, &mv))?;
            let back = case.lift(Flip::new(&flip.after, &flip.inverse))?;
            let iso = find_isomorphism(&back.after, t)
                .ok_or_else(|| case.fail(format!("{mv} followed by its inverse is not isomorphic")))?;
            let ng = flip.new_graph();

            let w = random::walk(&mut rng, lg, 120, Ends::Basepoints);
            case.walk(&w);
            let tw = case.lift(flip.transport(&w))?;
            let home = case.lift(iso.map_walk(back.new_graph(), lg, &case.lift(back.transport(&tw))?))?;
            case.check(home == w, || format!("{mv}: round trip gives `{}`", format_walk(&lg.graph, &home)))?;

            let kinked = !case.lift(kinks::find_kinks(lg, &w))?.is_empty();
            let kinked_after = !case.lift(kinks::find_kinks(ng, &tw))?.is_empty();
            case.check(kinked == kinked_after, || {
                format!("{mv}: kinks before {kinked}, after {kinked_after}: `{}`", format_walk(&ng.graph, &tw))
            })?;

            let nf = case.lift(kinks::normalize(lg, &w, Strategy::default()))?;
            let tnf = case.lift(flip.transport(&nf))?;
            case.check(case.lift(kinks::find_kinks(ng, &tnf))?.is_empty(), || {
                format!("{mv}: transported normal form has a kink: `{}`", format_walk(&ng.graph, &tnf))
            })?;
            let ntw = case.lift(kinks::normalize(ng, &tw, Strategy::default()))?;
            case.check(ntw == tnf, || format!("{mv}: normalizing and transporting do not commute"))?;

            // a second walk with the same ends, equal or not
            let h = if rng.gen_bool(0.5) {
                let verts = w.vertex_seq(&lg.graph);
                let cut = rng.gen_range(0..verts.len());
                if lg.self_folded.is_empty() {
                    w.clone()
                } else {
                    let x = case.lift(conjugated_square(&mut rng, lg, verts[cut]))?;
                    let head = case.lift(Walk::from_word(&lg.graph, w.start, &w.edges[..cut]))?;
                    let tail = case.lift(Walk::from_word(&lg.graph, verts[cut], &w.edges[cut..]))?;
                    case.lift(walks::compose(&case.lift(walks::compose(&head, &x))?, &tail))?
                }
            } else {
                let x = random::walk(&mut rng, lg, 80, Ends::Basepoints);
                let a = random::path_to(&mut rng, lg, w.start, |u| u == x.start).expect("connected");
                let b = random::path_to(&mut rng, lg, x.end, |u| u == w.end).expect("connected");
                let mut word = a;
                word.extend_from_slice(&x.edges);
                word.extend(b);
                case.lift(walks::standard_form(&lg.graph, w.start, &word))?
            };
            case.walk(&h);
            let th = case.lift(flip.transport(&h))?;
            let eq = case.lift(groupoid::orbifold_equal(lg, &w, &h))?;
            let eq_after = case.lift(groupoid::orbifold_equal(ng, &tw, &th))?;
            case.check(eq == eq_after, || format!("{mv}: orbifold equality {eq} before, {eq_after} after"))?;

            if let Some(c) = random::closed_walk(&mut rng, lg, 80) {
                case.walk(c.representative());
                let tc = case.lift(flip.transport_closed(&c))?;
                let k1 = !case.lift(kinks::find_kinks_closed(lg, &c))?.is_empty();
                let k2 = !case.lift(kinks::find_kinks_closed(ng, &tc))?.is_empty();
                case.check(k1 == k2, || format!("{mv}: closed kinks before {k1}, after {k2}"))?;
                let home = case.lift(back.transport_closed(&tc))?;
                let home = case.lift(iso.map_walk(back.new_graph(), lg, home.representative()))?;
                let home = case.lift(ClosedWalkClass::new(&lg.graph, &home))?;
                case.check(home == c, || format!("{mv}: closed round trip changed the class"))?;
            }
            Ok(())
        })
        .collect();
    summarize("flip-invariance", results, String::new())
}

/// Builds one random instance of the key lemma's hypotheses, if the draw
/// allows it: `f = (u0, e1, ..., en)` whose tail has a kink and
/// `h = (v0, e_n, ..., e_2, d1)`.
pub fn key_lemma_instance<R: Rng>(rng: &mut R, lg: &LeafyDualGraph) -> Option<(Walk, Walk)> {
    let g = &lg.graph;
    let u0 = *lg.endpoints().choose(rng)?;
    let e1 = *g.edges_at(u0).choose(rng)?;
    let u1 = g.other_end(e1, u0)?;
    if g.valency(u1).ok()? != 3 {
        return None;
    }
    // e1, then a short wander, an excursion with a kink, more wandering, home
    let v = rng.gen_range(0..lg.self_folded.len());
    let wander = rng.gen_range(0..6);
    let c = random::path_to_cluster(rng, lg, u1, v, wander);
    let [a, b] = lg.self_folded[v].eta;
    let pair = if rng.gen_bool(0.5) { [a, b] } else { [b, a] };
    let mut word = vec![e1];
    word.extend_from_slice(&c.edges);
    for _ in 0..rng.gen_range(1..=4) {
        word.extend_from_slice(&pair);
    }
    word.extend(c.edges.iter().rev());
    let here = walks::standard_form(g, u0, &word).ok()?.end;
    let extra = random::walk(rng, lg, 20, Ends::Any);
    let to = random::path_to(rng, lg, here, |x| x == extra.start)?;
    word.extend(to);
    word.extend_from_slice(&extra.edges);
    let f = walks::standard_form(g, u0, &word).ok()?;
    if f.edges.first() != Some(&e1) || f.len() < 2 {
        return None;
    }
    let e2 = f.edges[1];
    let d1 = g.edges_at(u1).into_iter().find(|&d| d != e1 && d != e2)?;
    let w0 = g.other_end(d1, u1)?;
    if !lg.is_endpoint(w0) {
        return None;
    }
    let mut hw: Vec<_> = f.edges[1..].iter().rev().copied().collect();
    hw.push(d1);
    let h = Walk::from_word(g, f.end, &hw).ok()?;
    if !h.is_backtrack_free() {
        return None;
    }
    Some((f, h))
}

/// Constructed instances of the key lemma pass its check, for every kink
/// of `(e_2, ..., e_n)`.
pub fn key_lemma(seed: u64, cases: usize) -> Report {
    let pool = pool(seed, 20, true);
    let results: Vec<CaseResult<usize>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let id = 1 + i as u64;
            let mut rng = stream(seed, id);
            let mut attempts = 0;
            let (t, lg, f, h, ks) = loop {
                // some triangulations admit no instance at all
                let (t, lg) = &pool[(i + attempts / 500) % pool.len()];
                attempts += 1;
                let Some((f, h)) = key_lemma_instance(&mut rng, lg) else {
                    continue;
                };
                let g = &lg.graph;
                let u1 = g.other_end(f.edges[0], f.start).expect("consecutive");
                let tail = Walk::from_word(g, u1, &f.edges[1..]).expect("tail of a walk");
                match kinks::find_kinks_unchecked(lg, &tail) {
                    Ok(ks) if !ks.is_empty() => break (t, lg, f, h, ks),
                    _ => continue,
                }
            };
            let mut case = Case::new("key-lemma", seed, id, t, lg);
            case.walk(&f);
            case.walk(&h);
            for k in &ks {
                let k = kinks::Kink { j: k.j + 1, m: k.m + 1, ..*k };
                let rep = case.lift(kinks::check_key_lemma_with(lg, &f, &h, &k))?;
                case.check(rep.pass, || format!("kink {k:?}: {rep:?}"))?;
            }
            Ok(ks.len())
        })
        .collect();
    let kinks: usize = results.iter().map(|r| *r.as_ref().unwrap_or(&0)).sum();
    summarize(
        "key-lemma",
        results.into_iter().map(|r| r.map(|_| ())).collect(),
        format!("{kinks} kinks checked"),
    )
}

/// Runs every suite with `cases` cases each (the confluence fuzz spreads
/// them over 20 triangulations). `cases == 0` runs nothing.
pub fn run_all(seed: u64, cases: usize) -> Vec<Report> {
    if cases == 0 {
        return Vec::new();
    }
    let fuzz = confluence_fuzz(seed, 20, cases.div_ceil(20), 10, 200, Ends::Basepoints);
    vec![
        fuzz.confluence,
        fuzz.drop_lemmas,
        fuzz.strict_decrease,
        exhaustive_confluence(seed, cases.min(500)),
        k_membership(seed, cases),
        section(seed, cases),
        order_two(seed, cases),
        flip_invariance(seed, cases),
        key_lemma(seed, cases.div_ceil(10)),
    ]
}
