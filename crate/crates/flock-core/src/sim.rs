//! Simulation state and the synchronous two-phase step.
//!
//! Each step first computes every agent's next heading from the time-`t`
//! snapshot (alignment rule for flock members, controller output for
//! influencers), then moves all agents at once. Neighbor lists are always
//! ordered by agent id, so the result does not depend on storage order.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::agent::{AgentId, AgentKind, AgentState, MultistepPhase, Phase};
use crate::behaviors::{
    act_circle, act_coordinated, act_lookahead, act_offset_momentum, act_polygon, build_probes, latch_goal,
    local_connected, multicircle_step, pair_influencers, BehaviorKind, BehaviorSpec, SecondStage,
};
use crate::geom::Vec2;
use crate::math::{normalize_angle, TAU};
use crate::placement::{init_rv_agents, PlacementError, PlacementSpec};
use crate::rules::{advance_position, rv_next_heading};
use crate::seed::unit_f64;
use crate::spatial::SpatialIndex;
use crate::world::{Setting, WorldSpec};

/// How neighbor queries are answered. Both give identical results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NeighborMode {
    /// Uniform grid with cell size equal to the neighborhood radius.
    #[default]
    Indexed,
    /// Scan every agent for every query.
    BruteForce,
}

impl NeighborMode {
    pub fn build_index(self, positions: &[Vec2], world: &WorldSpec) -> SpatialIndex {
        match self {
            NeighborMode::Indexed => SpatialIndex::build(positions, world, world.neighborhood_radius),
            NeighborMode::BruteForce => SpatialIndex::flat(positions.len()),
        }
    }
}

/// Fixed-radius neighbor lists in compressed form; `of(i)` is sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Neighborhoods {
    offsets: Vec<u32>,
    list: Vec<u32>,
}

impl Neighborhoods {
    pub fn compute(
        agents: &[AgentState],
        positions: &[Vec2],
        world: &WorldSpec,
        index: &SpatialIndex,
        radius: f64,
    ) -> Self {
        let mut offsets = Vec::with_capacity(agents.len() + 1);
        let mut list = Vec::new();
        let mut buf = Vec::new();
        offsets.push(0);
        for (i, &p) in positions.iter().enumerate() {
            buf.clear();
            index.query_into(positions, world, p, radius, Some(i), &mut buf);
            buf.sort_unstable_by_key(|&j| agents[j].id);
            list.extend(buf.iter().map(|&j| j as u32));
            offsets.push(list.len() as u32);
        }
        Neighborhoods { offsets, list }
    }

    #[inline]
    pub fn of(&self, i: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.list[self.offsets[i] as usize..self.offsets[i + 1] as usize].iter().map(|&j| j as usize)
    }

    #[inline]
    pub fn count(&self, i: usize) -> usize {
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub step: u64,
    pub agents: Vec<AgentState>,
    pub world: WorldSpec,
    pub neighbor_mode: NeighborMode,
}

impl SimState {
    /// Wraps `agents` into a state at step 0, giving every influencer the
    /// starting phase of `behavior` and fixing coordinated partners.
    pub fn new(world: WorldSpec, mut agents: Vec<AgentState>, behavior: &BehaviorSpec) -> Self {
        for a in agents.iter_mut() {
            a.heading = normalize_angle(a.heading);
            a.phase = if a.is_influencer() { behavior.initial_phase(a.position) } else { Phase::None };
        }
        let paired = matches!(
            behavior.kind,
            BehaviorKind::Coordinated | BehaviorKind::Multistep(SecondStage::Coordinated)
        );
        if paired {
            let mut infl: Vec<usize> = (0..agents.len()).filter(|&i| agents[i].is_influencer()).collect();
            infl.sort_unstable_by_key(|&i| agents[i].id);
            let points: Vec<Vec2> = infl.iter().map(|&i| agents[i].position).collect();
            let pairing = pair_influencers(&points, &world);
            for (a, b) in pairing.pairs {
                let (ia, ib) = (infl[a], infl[b]);
                let (id_a, id_b) = (agents[ia].id, agents[ib].id);
                set_partner(&mut agents[ia].phase, Some(id_b));
                set_partner(&mut agents[ib].phase, Some(id_a));
            }
        }
        SimState { step: 0, agents, world, neighbor_mode: NeighborMode::Indexed }
    }

    /// Builds the initial state of a trial: `n_rv` flock members (ids
    /// `0..n_rv`) placed per `setting`, then the influencers of `placement`
    /// (ids from `n_rv`) with uniform random headings.
    pub fn seeded<R: RngCore + ?Sized>(
        setting: Setting,
        n_rv: usize,
        placement: Option<&PlacementSpec>,
        behavior: &BehaviorSpec,
        rng: &mut R,
    ) -> Result<Self, PlacementError> {
        let world = setting.world();
        let mut agents = init_rv_agents(setting, n_rv, rng);
        if let Some(spec) = placement {
            let rv_positions: Vec<Vec2> = agents.iter().map(|a| a.position).collect();
            let spots = spec.place(&world, &rv_positions, rng)?;
            for (k, p) in spots.into_iter().enumerate() {
                let id = (n_rv + k) as AgentId;
                agents.push(AgentState::influencer(id, p, TAU * unit_f64(rng)));
            }
        }
        Ok(SimState::new(world, agents, behavior))
    }

    pub fn with_neighbor_mode(mut self, mode: NeighborMode) -> Self {
        self.neighbor_mode = mode;
        self
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.agents.iter().map(|a| a.position).collect()
    }

    pub fn rv_count(&self) -> usize {
        self.agents.iter().filter(|a| a.kind == AgentKind::ReynoldsVicsek).count()
    }

    pub fn influencer_count(&self) -> usize {
        self.agents.len() - self.rv_count()
    }

    /// Advances one synchronous step.
    pub fn step(&mut self, behavior: &BehaviorSpec) {
        let plan = self.plan(behavior);
        for (a, (heading, phase)) in self.agents.iter_mut().zip(plan) {
            a.heading = normalize_angle(heading);
            a.phase = phase;
            a.position = advance_position(a.position, a.heading, &self.world);
        }
        self.step += 1;
    }

    pub fn run(&mut self, behavior: &BehaviorSpec, steps: u64) {
        for _ in 0..steps {
            self.step(behavior);
        }
    }

    /// Next heading and phase of every agent, from the current snapshot.
    fn plan(&self, behavior: &BehaviorSpec) -> Vec<(f64, Phase)> {
        let agents = &self.agents;
        let world = &self.world;
        let positions = self.positions();
        let index = self.neighbor_mode.build_index(&positions, world);
        let nbrs = Neighborhoods::compute(agents, &positions, world, &index, world.neighborhood_radius);
        let follow = |i: usize| rv_next_heading(agents[i].heading, nbrs.of(i).map(|j| agents[j].heading));

        let mut plan: Vec<(f64, Phase)> = agents
            .iter()
            .enumerate()
            .map(|(i, a)| if a.is_influencer() { (a.heading, a.phase) } else { (follow(i), Phase::None) })
            .collect();

        let mut influencers: Vec<usize> = (0..agents.len()).filter(|&i| agents[i].is_influencer()).collect();
        if influencers.is_empty() {
            return plan;
        }
        influencers.sort_unstable_by_key(|&i| agents[i].id);

        let ctx = Ctx { agents, positions: &positions, world, index: &index, behavior };

        match behavior.kind {
            BehaviorKind::Face | BehaviorKind::OffsetMomentum | BehaviorKind::Lookahead | BehaviorKind::Coordinated => {
                let stage = behavior.kind.directional().expect("directional kind");
                ctx.directional(stage, behavior.goal, &influencers, &nbrs, &mut plan);
            }
            BehaviorKind::Multistep(stage) => {
                let latched = influencers.iter().find_map(|&i| match agents[i].phase {
                    Phase::Multistep { phase: MultistepPhase::Influence { goal }, .. } => Some(goal),
                    _ => None,
                });
                let goal = latched.or_else(|| ctx.try_latch(&influencers));
                match goal {
                    None => {
                        for &i in &influencers {
                            plan[i].0 = follow(i);
                        }
                    }
                    Some(goal) => {
                        for &i in &influencers {
                            if let Phase::Multistep { partner, .. } = agents[i].phase {
                                plan[i].1 = Phase::Multistep { phase: MultistepPhase::Influence { goal }, partner };
                            }
                        }
                        ctx.directional(stage, goal, &influencers, &nbrs, &mut plan);
                    }
                }
            }
            BehaviorKind::Circle => {
                for &i in &influencers {
                    let radius = match agents[i].phase {
                        Phase::Circle { radius } => radius,
                        _ => (positions[i] - behavior.origin).norm(),
                    };
                    plan[i].0 = act_circle(positions[i], behavior.origin, radius, world.speed)
                        .unwrap_or(agents[i].heading);
                }
            }
            BehaviorKind::Polygon => {
                for &i in &influencers {
                    let (radius, target) = match agents[i].phase {
                        Phase::Polygon { radius, target } => (radius, target),
                        _ => match behavior.initial_phase(positions[i]) {
                            Phase::Polygon { radius, target } => (radius, target),
                            _ => unreachable!(),
                        },
                    };
                    let (h, target) =
                        act_polygon(positions[i], behavior.origin, radius, behavior.polygon_sides, world.speed, target);
                    plan[i] = (h, Phase::Polygon { radius, target });
                }
            }
            BehaviorKind::Multicircle => {
                for &i in &influencers {
                    let (stage, radius) = match agents[i].phase {
                        Phase::Multicircle { stage, radius } => (stage, radius),
                        _ => match behavior.initial_phase(positions[i]) {
                            Phase::Multicircle { stage, radius } => (stage, radius),
                            _ => unreachable!(),
                        },
                    };
                    let rv_in_range = nbrs.of(i).any(|j| !agents[j].is_influencer());
                    let (h, stage) = multicircle_step(
                        stage,
                        positions[i],
                        behavior.origin,
                        radius,
                        behavior.final_radius,
                        world.speed,
                        rv_in_range,
                        follow(i),
                        agents[i].heading,
                    );
                    plan[i] = (h, Phase::Multicircle { stage, radius });
                }
            }
        }
        plan
    }
}

fn set_partner(phase: &mut Phase, id: Option<AgentId>) {
    match phase {
        Phase::Coordinated { partner } | Phase::Multistep { partner, .. } => *partner = id,
        _ => {}
    }
}

fn partner_of(phase: &Phase) -> Option<AgentId> {
    match *phase {
        Phase::Coordinated { partner } | Phase::Multistep { partner, .. } => partner,
        _ => None,
    }
}

struct Ctx<'a> {
    agents: &'a [AgentState],
    positions: &'a [Vec2],
    world: &'a WorldSpec,
    index: &'a SpatialIndex,
    behavior: &'a BehaviorSpec,
}

impl Ctx<'_> {
    /// Writes the headings of a directional behavior toward `goal` for every
    /// influencer in `influencers` (sorted by id).
    fn directional(
        &self,
        stage: SecondStage,
        goal: f64,
        influencers: &[usize],
        nbrs: &Neighborhoods,
        plan: &mut [(f64, Phase)],
    ) {
        let agents = self.agents;
        let candidates = self.behavior.candidates;
        match stage {
            SecondStage::Face => {
                for &i in influencers {
                    plan[i].0 = goal;
                }
            }
            SecondStage::OffsetMomentum => {
                for &i in influencers {
                    plan[i].0 =
                        act_offset_momentum(nbrs.of(i).map(|j| agents[j].heading), goal, self.world.speed);
                }
            }
            SecondStage::Lookahead => {
                for &i in influencers {
                    let probes = build_probes(agents, self.positions, self.world, self.index, &[i]);
                    plan[i].0 = act_lookahead(&probes, goal, candidates);
                }
            }
            SecondStage::Coordinated => {
                for &i in influencers {
                    let partner = partner_of(&agents[i].phase)
                        .and_then(|pid| influencers.iter().copied().find(|&j| agents[j].id == pid));
                    match partner {
                        // the lower id of each pair decides for both
                        Some(j) if agents[j].id > agents[i].id => {
                            let probes = build_probes(agents, self.positions, self.world, self.index, &[i, j]);
                            let (a, b) = act_coordinated(&probes, goal, candidates);
                            plan[i].0 = a;
                            plan[j].0 = b;
                        }
                        Some(_) => {}
                        None => {
                            let probes = build_probes(agents, self.positions, self.world, self.index, &[i]);
                            plan[i].0 = act_lookahead(&probes, goal, candidates);
                        }
                    }
                }
            }
        }
    }

    /// Multistep reduction: sums the influencers' local connected counts and,
    /// when the sum reaches the threshold, returns the shared goal.
    fn try_latch(&self, influencers: &[usize]) -> Option<f64> {
        let agents = self.agents;
        let locals: Vec<_> = influencers
            .iter()
            .map(|&i| local_connected(agents, self.positions, self.world, self.index, i))
            .collect();
        let total: usize = locals.iter().map(|l| l.count()).sum();
        if total < self.behavior.threshold {
            return None;
        }
        let mut union: Vec<usize> = locals.into_iter().flat_map(|l| l.rv).collect();
        union.sort_unstable_by_key(|&j| agents[j].id);
        union.dedup();
        let own = influencers.iter().map(|&i| agents[i].heading);
        let fallback = agents[influencers[0]].heading;
        let goal = if self.behavior.include_influencer_headings {
            latch_goal(union.iter().map(|&j| agents[j].heading), own, fallback)
        } else {
            latch_goal(union.iter().map(|&j| agents[j].heading), core::iter::empty(), fallback)
        };
        Some(goal)
    }
}
