//! Markov chains over independent sets.
//!
//! Three dynamics are implemented, all with the Gibbs distribution as their
//! stationary distribution:
//!
//! * **clique dynamics**: pick a clique from a cover uniformly, sample a
//!   fresh configuration for that clique from its local Gibbs distribution,
//!   and accept it when compatible with the rest of the state;
//! * **block dynamics**: pick a block uniformly and resample its contents
//!   exactly from the Gibbs distribution conditioned on the outside;
//! * **single-site (Glauber) dynamics**: clique dynamics with the cover of
//!   singleton cliques.
//!
//! Steps are deterministic functions of the chain's seeded generator, and a
//! clique step consumes exactly two uniform draws: one to choose the clique,
//! one to choose the proposed configuration inside it.

mod matrix;

pub use matrix::{
    mixing_time_exact, spectral_gap, stationary_distribution, transition_matrix_exact,
    tv_distance, SpectralGap, TransitionMatrix, MATRIX_STATE_CAP, MIXING_ITER_CAP,
};

use crate::error::{Error, Result};
use crate::hardcore::{
    singleton_cover, validate_block_cover, validate_clique_cover, BlockCover, CliqueCover,
    HardCoreInstance, IndependentSet,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest block size block dynamics will enumerate (2^20 subsets).
pub const BLOCK_ENUM_CAP: usize = 20;

/// Which dynamics to run.
#[derive(Debug, Clone)]
pub enum DynamicsKind {
    Clique(CliqueCover),
    Block(BlockCover),
    Glauber,
}

/// Mutable state of a chain: the current independent set plus the seeded
/// generator that drives it.
#[derive(Debug, Clone)]
pub struct ChainState {
    words: Vec<u64>,
    n: usize,
    rng: ChaCha8Rng,
    steps_taken: u64,
}

impl ChainState {
    /// Empty starting configuration with a generator seeded from `seed`.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
            n,
            rng: ChaCha8Rng::seed_from_u64(seed),
            steps_taken: 0,
        }
    }

    /// Like [`ChainState::new`] but additionally selects an independent
    /// generator stream, so replicate chains can share one master seed
    /// without overlapping randomness.
    pub fn with_stream(n: usize, seed: u64, stream: u64) -> Self {
        let mut state = Self::new(n, seed);
        state.rng.set_stream(stream);
        state
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    pub fn is_occupied(&self, v: u32) -> bool {
        self.words[v as usize / 64] >> (v % 64) & 1 == 1
    }

    fn set(&mut self, v: u32) {
        self.words[v as usize / 64] |= 1 << (v % 64);
    }

    fn clear(&mut self, v: u32) {
        self.words[v as usize / 64] &= !(1 << (v % 64));
    }

    /// The current configuration as a sorted vertex list.
    pub fn current(&self) -> IndependentSet {
        let mut vs = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros();
                vs.push(w as u32 * 64 + b);
                bits &= bits - 1;
            }
        }
        IndependentSet::from_sorted(vs)
    }

    fn draw_f64(&mut self) -> f64 {
        self.rng.random()
    }
}

fn occupied_neighbor(inst: &HardCoreInstance, state: &ChainState, v: u32) -> bool {
    inst.graph().neighbors(v).iter().any(|&w| state.is_occupied(w))
}

/// One step of clique dynamics.
///
/// Draw one: a uniform clique index `i`. Draw two: a configuration for the
/// clique from its local Gibbs distribution, which is empty with probability
/// `1/Z_i` and vertex `v` with probability `lambda_v/Z_i` where
/// `Z_i = 1 + sum of the clique's fugacities`. An empty proposal evicts the
/// clique from the state; a vertex proposal is applied only if compatible
/// with the state outside.
pub fn clique_dynamics_step(
    inst: &HardCoreInstance,
    cover: &CliqueCover,
    state: &mut ChainState,
) -> Result<()> {
    let m = cover.len();
    if m == 0 {
        return Err(Error::Validation("cover has no parts".into()));
    }
    let i = ((state.draw_f64() * m as f64) as usize).min(m - 1);
    let part = &cover.parts()[i];
    let z_i = 1.0 + part.iter().map(|&v| inst.weight(v)).sum::<f64>();
    // scaled in [-1, z_i - 1): negative picks the empty configuration, and
    // otherwise the candidate is found by walking cumulative fugacities.
    let mut scaled = state.draw_f64() * z_i - 1.0;
    state.steps_taken += 1;
    if scaled < 0.0 {
        for &v in part {
            state.clear(v);
        }
        return Ok(());
    }
    let mut chosen = *part.last().expect("nonempty: z_i > 1");
    for &v in part {
        scaled -= inst.weight(v);
        if scaled < 0.0 {
            chosen = v;
            break;
        }
    }
    if !occupied_neighbor(inst, state, chosen) {
        state.set(chosen);
    }
    Ok(())
}

/// One step of block dynamics: pick a block uniformly, then resample its
/// contents from the Gibbs distribution conditioned on the configuration
/// outside the block. Enumerates the block's admissible subsets, so blocks
/// are capped at [`BLOCK_ENUM_CAP`] vertices.
pub fn block_dynamics_step(
    inst: &HardCoreInstance,
    cover: &BlockCover,
    state: &mut ChainState,
) -> Result<()> {
    let m = cover.len();
    if m == 0 {
        return Err(Error::Validation("cover has no parts".into()));
    }
    let i = ((state.draw_f64() * m as f64) as usize).min(m - 1);
    let block = &cover.parts()[i];
    if block.len() > BLOCK_ENUM_CAP {
        return Err(Error::CapExceeded {
            what: "block resampling",
            got: block.len() as u128,
            limit: BLOCK_ENUM_CAP as u128,
        });
    }
    let u = state.draw_f64();
    state.steps_taken += 1;

    // Admissible vertices: not blocked by occupied vertices outside the block.
    let in_block = |w: u32| block.binary_search(&w).is_ok();
    let mut free = Vec::with_capacity(block.len());
    for &v in block {
        let blocked_outside = inst
            .graph()
            .neighbors(v)
            .iter()
            .any(|&w| !in_block(w) && state.is_occupied(w));
        if !blocked_outside {
            free.push(v);
        }
    }

    // Enumerate independent subsets of the free vertices with their weights.
    let mut subsets: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
    let mut total = 1.0;
    let mut stack: Vec<(usize, Vec<u32>, f64)> = vec![(0, Vec::new(), 1.0)];
    while let Some((from, chosen, weight)) = stack.pop() {
        for idx in from..free.len() {
            let v = free[idx];
            if chosen
                .iter()
                .any(|&u| inst.graph().is_edge(u, v))
            {
                continue;
            }
            let mut next = chosen.clone();
            next.push(v);
            let w = weight * inst.weight(v);
            total += w;
            subsets.push((next.clone(), w));
            stack.push((idx + 1, next, w));
        }
    }

    let mut target = u * total;
    let mut pick = subsets.len() - 1;
    for (idx, (_, w)) in subsets.iter().enumerate() {
        target -= w;
        if target < 0.0 {
            pick = idx;
            break;
        }
    }
    for &v in block {
        state.clear(v);
    }
    let (vs, _) = &subsets[pick];
    for &v in vs {
        state.set(v);
    }
    Ok(())
}

/// One step of whichever dynamics `kind` names.
pub fn step(inst: &HardCoreInstance, kind: &DynamicsKind, state: &mut ChainState) -> Result<()> {
    match kind {
        DynamicsKind::Clique(cover) => clique_dynamics_step(inst, cover, state),
        DynamicsKind::Block(cover) => block_dynamics_step(inst, cover, state),
        DynamicsKind::Glauber => {
            let cover = singleton_cover(inst.vertex_count());
            clique_dynamics_step(inst, &cover, state)
        }
    }
}

fn validate_kind(inst: &HardCoreInstance, kind: &DynamicsKind) -> Result<()> {
    match kind {
        DynamicsKind::Clique(cover) => {
            let report = validate_clique_cover(inst, cover);
            if !report.valid() {
                return Err(Error::Validation(format!(
                    "clique cover rejected: {}",
                    report.problems.join("; ")
                )));
            }
        }
        DynamicsKind::Block(cover) => {
            validate_block_cover(inst.graph(), cover)?;
            for part in cover.parts() {
                if part.len() > BLOCK_ENUM_CAP {
                    return Err(Error::CapExceeded {
                        what: "block resampling",
                        got: part.len() as u128,
                        limit: BLOCK_ENUM_CAP as u128,
                    });
                }
            }
        }
        DynamicsKind::Glauber => {}
    }
    Ok(())
}

/// Runs a chain from the empty configuration and records samples.
///
/// After `burn_in` steps, every `thin`-th configuration is recorded until
/// `steps` total steps have been taken. The output is a deterministic
/// function of `(instance, kind, steps, seed, burn_in, thin)`.
pub fn run_chain(
    inst: &HardCoreInstance,
    kind: &DynamicsKind,
    steps: u64,
    seed: u64,
    burn_in: u64,
    thin: u64,
) -> Result<Vec<IndependentSet>> {
    if thin == 0 {
        return Err(Error::Validation("thinning interval must be positive".into()));
    }
    validate_kind(inst, kind)?;
    let glauber_as_cliques;
    let kind = match kind {
        DynamicsKind::Glauber => {
            glauber_as_cliques = DynamicsKind::Clique(singleton_cover(inst.vertex_count()));
            &glauber_as_cliques
        }
        other => other,
    };
    let mut state = ChainState::new(inst.vertex_count(), seed);
    let mut samples = Vec::new();
    for t in 1..=steps {
        step(inst, kind, &mut state)?;
        if t > burn_in && (t - burn_in) % thin == 0 {
            samples.push(state.current());
        }
    }
    Ok(samples)
}
