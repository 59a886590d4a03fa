//! Single constrained random-walk trajectories on a [`ColoredGraph`].
//!
//! A [`Walker`] owns the coverage state of one trajectory and advances it one
//! step at a time under a [`WalkPolicy`]. The policy decides, before every
//! step, which edges are usable ([`StepMode`]); [`step`] then draws the edge.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphgen::{Color, ColoredGraph};
use crate::theory;

const FLIP_SUM_TOL: f64 = 1e-12;

/// How the walker chooses among the colored edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum WalkPolicy {
    /// Uniform over all incident edges at every step.
    Simple,
    /// Uniform over all edges until `budget` red traversals have been made,
    /// then blue edges only, forever.
    Oblivious { budget: u64 },
    /// Each red edge taken with probability `rho_r`, each blue edge with
    /// probability `rho_b`; `r·rho_r + b·rho_b = 1`.
    Flip { rho_r: f64, rho_b: f64 },
    /// Alternating red/blue and blue-only phases of `phase_length` steps,
    /// starting with a red/blue phase. Red/blue time is capped at
    /// `alpha·σ_RB·n·ln n` steps and red traversals at `budget`; once either
    /// runs out the walk stays blue-only.
    Smooth { alpha: f64, phase_length: u64, budget: u64 },
    /// Repeating period of `peak` blue-only steps followed by `off_peak`
    /// steps on all edges.
    Congestion { peak: u64, off_peak: u64 },
}

impl WalkPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            WalkPolicy::Simple => "simple",
            WalkPolicy::Oblivious { .. } => "oblivious",
            WalkPolicy::Flip { .. } => "flip",
            WalkPolicy::Smooth { .. } => "smooth",
            WalkPolicy::Congestion { .. } => "congestion",
        }
    }

    /// Parameters as a JSON object (without the policy tag).
    pub fn params_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("policy serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("policy");
        }
        v.to_string()
    }

    /// Checks the policy's own invariants and that the graph supports it.
    pub fn validate(&self, g: &ColoredGraph) -> Result<()> {
        let needs_blue = match *self {
            WalkPolicy::Simple => false,
            WalkPolicy::Oblivious { .. } => true,
            WalkPolicy::Flip { rho_r, rho_b } => {
                let (r, b) = (g.red_degree() as f64, g.blue_degree() as f64);
                if !(rho_r > 0.0 && rho_b > 0.0 && rho_r.is_finite() && rho_b.is_finite()) {
                    return Err(Error::param("flip probabilities must be positive"));
                }
                let total = r * rho_r + b * rho_b;
                if (total - 1.0).abs() > FLIP_SUM_TOL {
                    return Err(Error::param(format!("r·rho_r + b·rho_b must equal 1 (got {total})")));
                }
                false
            }
            WalkPolicy::Smooth { alpha, phase_length, .. } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::param("smooth walk needs 0 < alpha < 1"));
                }
                if phase_length == 0 {
                    return Err(Error::param("phase_length must be at least 1"));
                }
                true
            }
            WalkPolicy::Congestion { peak, off_peak } => {
                if off_peak == 0 {
                    return Err(Error::param("off-peak period F must be at least 1"));
                }
                peak > 0
            }
        };
        if needs_blue && g.blue_degree() == 0 {
            return Err(Error::param(format!("{} walk needs blue edges", self.name())));
        }
        Ok(())
    }
}

/// Edge set usable on a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    AllEdges,
    BlueOnly,
    Flip { rho_r: f64, rho_b: f64 },
}

/// Takes one step from `v`, returning the next vertex and the color of the
/// edge used.
#[inline]
pub fn step<R: Rng + ?Sized>(g: &ColoredGraph, v: usize, mode: StepMode, rng: &mut R) -> (usize, Color) {
    let (r, b) = (g.red_degree(), g.blue_degree());
    let k = match mode {
        StepMode::AllEdges => rng.random_range(0..r + b),
        StepMode::BlueOnly => r + rng.random_range(0..b),
        StepMode::Flip { rho_r, .. } => {
            if r > 0 && rng.random::<f64>() < r as f64 * rho_r {
                rng.random_range(0..r)
            } else {
                r + rng.random_range(0..b)
            }
        }
    };
    let color = if k < r { Color::Red } else { Color::Blue };
    (g.slot(v, k) as usize, color)
}

/// Default step cap `100·n²`.
pub fn default_step_cap(n: usize) -> u64 {
    (n as u64).saturating_mul(n as u64).saturating_mul(100)
}

/// Default smooth-walk phase length `⌈(ln n)²·ln ln n⌉`, at least 1.
pub fn default_phase_length(n: usize) -> u64 {
    let ln = (n as f64).ln();
    if ln <= 1.0 {
        return 1;
    }
    ((ln * ln * ln.ln()).ceil() as u64).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CoverStatus {
    Covered,
    Failed,
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    /// Step index at which the last vertex was first visited; `None` when
    /// the step cap was reached first.
    pub cover_time: Option<u64>,
    pub red_uses: u64,
    pub steps_taken: u64,
    pub start_vertex: usize,
}

impl CoverResult {
    pub fn status(&self) -> CoverStatus {
        if self.cover_time.is_some() {
            CoverStatus::Covered
        } else {
            CoverStatus::Failed
        }
    }
}

/// Blue component of the walker once it is confined to blue edges for good.
struct Confinement {
    label: Vec<u32>,
    component: u32,
    unvisited_inside: usize,
}

/// Coverage state of a single trajectory.
pub struct Walker<'g> {
    g: &'g ColoredGraph,
    policy: WalkPolicy,
    start: usize,
    pos: usize,
    steps: u64,
    step_cap: u64,
    red_uses: u64,
    visited: Vec<bool>,
    unvisited: usize,
    cover_time: Option<u64>,
    rb_steps: u64,
    rb_cap: u64,
    blue_forever_since: Option<u64>,
    confinement: Option<Confinement>,
    absorb_early: bool,
    absorbed_at: Option<u64>,
}

impl<'g> Walker<'g> {
    pub fn new(g: &'g ColoredGraph, policy: WalkPolicy, start: usize, step_cap: u64) -> Result<Self> {
        if start >= g.n() {
            return Err(Error::param(format!("start vertex {start} outside [0, {})", g.n())));
        }
        if step_cap == 0 {
            return Err(Error::param("step_cap must be at least 1"));
        }
        policy.validate(g)?;
        let rb_cap = match policy {
            WalkPolicy::Smooth { alpha, .. } => {
                let n = g.n() as f64;
                let sigma = theory::sigma_rb(g.red_degree(), g.blue_degree())?;
                (alpha * sigma * n * n.ln()).round() as u64
            }
            _ => 0,
        };
        let mut visited = vec![false; g.n()];
        visited[start] = true;
        let unvisited = g.n() - 1;
        Ok(Walker {
            g,
            policy,
            start,
            pos: start,
            steps: 0,
            step_cap,
            red_uses: 0,
            visited,
            unvisited,
            cover_time: (unvisited == 0).then_some(0),
            rb_steps: 0,
            rb_cap,
            blue_forever_since: None,
            confinement: None,
            absorb_early: true,
            absorbed_at: None,
        })
    }

    /// When enabled (the default), a walk that is confined to a blue
    /// component with nothing left to visit there stops at once and reports
    /// FAILED with `steps_taken = step_cap`, exactly as running on to the cap
    /// would.
    pub fn set_absorb_early(&mut self, on: bool) {
        self.absorb_early = on;
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn red_uses(&self) -> u64 {
        self.red_uses
    }

    pub fn unvisited(&self) -> usize {
        self.unvisited
    }

    pub fn visited(&self) -> &[bool] {
        &self.visited
    }

    /// Step index at which the walk became blue-only for good, if it has.
    pub fn blue_forever_since(&self) -> Option<u64> {
        self.blue_forever_since
    }

    /// Step count at which the walk was found confined with nothing left to
    /// visit in its blue component.
    pub fn absorbed_at(&self) -> Option<u64> {
        self.absorbed_at
    }

    pub fn is_finished(&self) -> bool {
        self.cover_time.is_some() || self.steps >= self.step_cap || self.absorbed_at.is_some()
    }

    pub fn result(&self) -> CoverResult {
        let steps_taken = if self.absorbed_at.is_some() { self.step_cap } else { self.steps };
        CoverResult {
            cover_time: self.cover_time,
            red_uses: self.red_uses,
            steps_taken,
            start_vertex: self.start,
        }
    }

    fn enter_blue_forever(&mut self) {
        self.blue_forever_since = Some(self.steps);
        if !self.absorb_early {
            return;
        }
        let (label, _) = self.g.blue_components();
        let component = label[self.pos];
        let unvisited_inside = label
            .iter()
            .zip(&self.visited)
            .filter(|&(&l, &seen)| l == component && !seen)
            .count();
        self.confinement = Some(Confinement { label, component, unvisited_inside });
        self.check_absorbed();
    }

    fn check_absorbed(&mut self) {
        if let Some(c) = &self.confinement {
            if c.unvisited_inside == 0 && self.unvisited > 0 {
                self.absorbed_at = Some(self.steps);
            }
        }
    }

    /// Edge set for the step about to be taken; updates the regime.
    fn next_mode(&mut self) -> StepMode {
        if self.blue_forever_since.is_some() {
            return StepMode::BlueOnly;
        }
        match self.policy {
            WalkPolicy::Simple => StepMode::AllEdges,
            WalkPolicy::Flip { rho_r, rho_b } => StepMode::Flip { rho_r, rho_b },
            WalkPolicy::Oblivious { budget } => {
                if self.red_uses < budget {
                    StepMode::AllEdges
                } else {
                    self.enter_blue_forever();
                    StepMode::BlueOnly
                }
            }
            WalkPolicy::Smooth { phase_length, budget, .. } => {
                if (self.steps / phase_length) % 2 == 1 {
                    StepMode::BlueOnly
                } else if self.rb_steps < self.rb_cap && self.red_uses < budget {
                    self.rb_steps += 1;
                    StepMode::AllEdges
                } else {
                    self.enter_blue_forever();
                    StepMode::BlueOnly
                }
            }
            WalkPolicy::Congestion { peak, off_peak } => {
                if self.steps % (peak + off_peak) < peak {
                    StepMode::BlueOnly
                } else {
                    StepMode::AllEdges
                }
            }
        }
    }

    /// Takes one step. Returns `false` without moving once the walk is
    /// finished (covered, capped, or absorbed).
    pub fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.is_finished() {
            return false;
        }
        let mode = self.next_mode();
        if self.absorbed_at.is_some() {
            return false;
        }
        let (next, color) = step(self.g, self.pos, mode, rng);
        if color == Color::Red {
            self.red_uses += 1;
        }
        self.steps += 1;
        self.pos = next;
        if !self.visited[next] {
            self.visited[next] = true;
            self.unvisited -= 1;
            if self.unvisited == 0 {
                self.cover_time = Some(self.steps);
            }
            if let Some(c) = &mut self.confinement {
                debug_assert_eq!(c.label[next], c.component);
                c.unvisited_inside -= 1;
                self.check_absorbed();
            }
        }
        true
    }

    /// Runs until finished.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> CoverResult {
        while self.advance(rng) {}
        self.result()
    }

    /// Runs until `t` steps have been taken or the walk finishes.
    pub fn run_until<R: Rng + ?Sized>(&mut self, t: u64, rng: &mut R) {
        while self.steps < t && self.advance(rng) {}
    }
}

fn check_connected(g: &ColoredGraph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Structure("graph is disconnected; cover time is undefined".into()))
    }
}

/// Runs one trajectory from `start` until every vertex is visited or
/// `step_cap` steps elapse.
pub fn run_cover<R: Rng + ?Sized>(
    g: &ColoredGraph,
    policy: &WalkPolicy,
    start: usize,
    rng: &mut R,
    step_cap: u64,
) -> Result<CoverResult> {
    check_connected(g)?;
    Ok(Walker::new(g, policy.clone(), start, step_cap)?.run(rng))
}

/// Like [`run_cover`], also reporting the number of unvisited vertices after
/// each checkpoint step count. `checkpoints` must be sorted.
pub fn run_with_checkpoints<R: Rng + ?Sized>(
    g: &ColoredGraph,
    policy: &WalkPolicy,
    start: usize,
    rng: &mut R,
    step_cap: u64,
    checkpoints: &[u64],
) -> Result<(CoverResult, Vec<usize>)> {
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("checkpoints must be sorted"));
    }
    check_connected(g)?;
    let mut walker = Walker::new(g, policy.clone(), start, step_cap)?;
    let mut counts = Vec::with_capacity(checkpoints.len());
    for &t in checkpoints {
        walker.run_until(t, rng);
        counts.push(walker.unvisited());
    }
    Ok((walker.run(rng), counts))
}
