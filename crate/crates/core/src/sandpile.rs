//! Chip-firing dynamics: stabilization, the burning test for recurrence,
//! exhaustive enumeration of recurrent configurations and the group law
//! `c (+) d = stabilize(c + d)`.
//!
//! This is the independent small-scale oracle of the crate: on tiny graphs
//! the number of recurrent configurations equals the spanning-tree count and
//! the recurrent set under `(+)` realizes the sandpile group, with no linear
//! algebra involved.

use num_bigint::BigInt;

use crate::graph::MultiGraph;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Chip heights on the non-sink vertices. `heights` is indexed by vertex id;
/// the sink's slot is kept at zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    sink: usize,
    heights: Vec<u64>,
}

impl Configuration {
    pub fn new(graph: &MultiGraph, sink: usize, mut heights: Vec<u64>) -> Result<Self> {
        if sink >= graph.vertex_count() {
            return Err(Error::UnknownVertex(format!("sink index {sink}")));
        }
        if heights.len() != graph.vertex_count() {
            return Err(Error::Dimension(format!(
                "expected {} heights, got {}",
                graph.vertex_count(),
                heights.len()
            )));
        }
        heights[sink] = 0;
        Ok(Configuration { sink, heights })
    }

    pub fn zero(graph: &MultiGraph, sink: usize) -> Result<Self> {
        Self::new(graph, sink, vec![0; graph.vertex_count()])
    }

    /// The maximal stable configuration: `degree - 1` chips everywhere.
    pub fn max_stable(graph: &MultiGraph, sink: usize) -> Result<Self> {
        let heights = (0..graph.vertex_count())
            .map(|v| if v == sink { 0 } else { graph.degree(v) - 1 })
            .collect();
        Self::new(graph, sink, heights)
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    pub fn height(&self, v: usize) -> u64 {
        self.heights[v]
    }

    pub fn is_stable(&self, graph: &MultiGraph) -> bool {
        (0..graph.vertex_count()).all(|v| v == self.sink || self.heights[v] < graph.degree(v))
    }
}

/// Neighbor lists with multiplicities, loops dropped. Built once per
/// simulation entry point.
struct Firing {
    sink: usize,
    degree: Vec<u64>,
    neighbors: Vec<Vec<(usize, u64)>>,
}

impl Firing {
    fn new(graph: &MultiGraph, sink: usize) -> Self {
        let n = graph.vertex_count();
        let mut neighbors: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
        for e in graph.edges() {
            if e.tail == e.head {
                continue;
            }
            for (from, to) in [(e.tail, e.head), (e.head, e.tail)] {
                match neighbors[from].iter_mut().find(|(v, _)| *v == to) {
                    Some((_, m)) => *m += 1,
                    None => neighbors[from].push((to, 1)),
                }
            }
        }
        let degree = (0..n).map(|v| graph.degree(v)).collect();
        Firing {
            sink,
            degree,
            neighbors,
        }
    }

    /// Topples `v` as many times as it can in one go; returns how many.
    fn discharge(&self, heights: &mut [u64], v: usize) -> u64 {
        let times = heights[v] / self.degree[v];
        if times == 0 {
            return 0;
        }
        heights[v] -= times * self.degree[v];
        for &(w, multiplicity) in &self.neighbors[v] {
            if w != self.sink {
                heights[w] += times * multiplicity;
            }
        }
        times
    }
}

/// Outcome of a stabilization run: the stable configuration plus how many
/// times each vertex toppled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizeOutcome {
    pub config: Configuration,
    pub topples: Vec<u64>,
    pub total_topples: u64,
}

/// Runs topplings until every non-sink vertex is stable. The result is
/// independent of the toppling order; this entry point uses a deterministic
/// FIFO order.
pub fn stabilize(graph: &MultiGraph, config: &Configuration) -> StabilizeOutcome {
    let firing = Firing::new(graph, config.sink);
    stabilize_with(&firing, config, None)
}

/// Stabilization with a seeded random toppling order, for exercising the
/// abelian property: for every seed the outcome equals [`stabilize`]'s.
pub fn stabilize_shuffled(
    graph: &MultiGraph,
    config: &Configuration,
    seed: u64,
) -> StabilizeOutcome {
    let firing = Firing::new(graph, config.sink);
    stabilize_with(&firing, config, Some(SplitMix64::new(seed)))
}

fn stabilize_with(
    firing: &Firing,
    config: &Configuration,
    mut rng: Option<SplitMix64>,
) -> StabilizeOutcome {
    let mut heights = config.heights.clone();
    let n = heights.len();
    let mut topples = vec![0u64; n];
    let mut pending: Vec<usize> = (0..n)
        .filter(|&v| v != firing.sink && heights[v] >= firing.degree[v])
        .collect();
    let mut queued = vec![false; n];
    for &v in &pending {
        queued[v] = true;
    }
    while !pending.is_empty() {
        let idx = match rng.as_mut() {
            Some(r) => r.below(pending.len() as u64) as usize,
            None => 0,
        };
        let v = pending.swap_remove(idx);
        queued[v] = false;
        let fired = firing.discharge(&mut heights, v);
        topples[v] += fired;
        if fired == 0 {
            continue;
        }
        for &(w, _) in &firing.neighbors[v] {
            if w != firing.sink && !queued[w] && heights[w] >= firing.degree[w] {
                queued[w] = true;
                pending.push(w);
            }
        }
        // A partial discharge cannot happen, but re-queue defensively if the
        // vertex is somehow still unstable.
        if heights[v] >= firing.degree[v] && !queued[v] {
            queued[v] = true;
            pending.push(v);
        }
    }
    let total_topples = topples.iter().sum();
    StabilizeOutcome {
        config: Configuration {
            sink: config.sink,
            heights,
        },
        topples,
        total_topples,
    }
}

/// Dhar's burning test: a stable configuration is recurrent exactly when
/// adding one chip per sink-incident edge makes every non-sink vertex topple
/// exactly once (returning to the start).
pub fn is_recurrent(graph: &MultiGraph, config: &Configuration) -> Result<bool> {
    if !config.is_stable(graph) {
        return Err(Error::UnstableConfiguration(
            "the burning test needs a stable configuration".into(),
        ));
    }
    let mut burned = config.clone();
    for e in graph.edges() {
        if e.tail == e.head {
            continue;
        }
        if e.tail == config.sink && e.head != config.sink {
            burned.heights[e.head] += 1;
        } else if e.head == config.sink && e.tail != config.sink {
            burned.heights[e.tail] += 1;
        }
    }
    let outcome = stabilize(graph, &burned);
    let recurrent = (0..graph.vertex_count()).all(|v| v == config.sink || outcome.topples[v] == 1);
    debug_assert!(!recurrent || outcome.config == *config);
    Ok(recurrent)
}

fn stable_configuration_count(graph: &MultiGraph, sink: usize) -> BigInt {
    (0..graph.vertex_count())
        .filter(|&v| v != sink)
        .map(|v| BigInt::from(graph.degree(v)))
        .product()
}

/// Enumerates every recurrent configuration by scanning all stable ones with
/// the burning test. Refuses (rather than truncates) when the stable count
/// exceeds `budget`.
pub fn enumerate_recurrent(
    graph: &MultiGraph,
    sink: usize,
    budget: u64,
) -> Result<Vec<Configuration>> {
    if sink >= graph.vertex_count() {
        return Err(Error::UnknownVertex(format!("sink index {sink}")));
    }
    let total = stable_configuration_count(graph, sink);
    if total > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            required: total.to_string(),
            budget,
        });
    }
    let non_sink: Vec<usize> = (0..graph.vertex_count()).filter(|&v| v != sink).collect();
    let mut current = Configuration::zero(graph, sink)?;
    let mut recurrent = Vec::new();
    loop {
        if is_recurrent(graph, &current)? {
            recurrent.push(current.clone());
        }
        // Odometer step over stable heights.
        let mut position = 0;
        loop {
            if position == non_sink.len() {
                return Ok(recurrent);
            }
            let v = non_sink[position];
            if current.heights[v] + 1 < graph.degree(v) {
                current.heights[v] += 1;
                break;
            }
            current.heights[v] = 0;
            position += 1;
        }
    }
}

/// The sandpile sum `c (+) d = stabilize(c + d)`. For recurrent inputs the
/// result is recurrent.
pub fn group_op(graph: &MultiGraph, c: &Configuration, d: &Configuration) -> Result<Configuration> {
    if c.sink != d.sink || c.heights.len() != d.heights.len() {
        return Err(Error::Dimension(
            "configurations live on different graphs or sinks".into(),
        ));
    }
    let heights = c
        .heights
        .iter()
        .zip(&d.heights)
        .map(|(x, y)| x + y)
        .collect();
    let summed = Configuration::new(graph, c.sink, heights)?;
    Ok(stabilize(graph, &summed).config)
}

/// Finds the identity of the recurrent group by searching the enumerated
/// recurrent set for the element that fixes every other one.
pub fn find_identity(graph: &MultiGraph, sink: usize, budget: u64) -> Result<Configuration> {
    let recurrent = enumerate_recurrent(graph, sink, budget)?;
    for candidate in &recurrent {
        let mut fixes_all = true;
        for other in &recurrent {
            if &group_op(graph, candidate, other)? != other {
                fixes_all = false;
                break;
            }
        }
        if fixes_all {
            return Ok(candidate.clone());
        }
    }
    Err(Error::Internal(
        "recurrent set has no identity element".into(),
    ))
}
