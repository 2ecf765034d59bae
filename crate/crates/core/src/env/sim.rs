use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::link::{capacity_limit, link_energy, quality_from_rate, rate_from_snr, snr};
use super::state::*;
use crate::aero::{gust_perturb, ground_to_body, required_power, Attitude, GroundVelocity};
use crate::error::{Error, Result};
use crate::orbital::{
    elements_from_tle, elevation_angle, great_circle_distance, orbital_speed, slant_distance,
    subpoint, EarthConstants, GeodeticPosition, KeplerSolver, OrbitalElements,
};

/// Features per device slot: lat, lon, alt, speed, energy fraction, capacity.
pub const SLOT_FEATURES: usize = 6;
/// Leading GS features: lat, lon, own load over ϱ, ξ̄ over ϱ.
pub const GS_FEATURES: usize = 4;

/// One SAGIN episode: owns the scenario, its ground truth and the gust stream.
#[derive(Clone, Debug)]
pub struct Environment {
    cfg: ScenarioConfig,
    constants: EarthConstants,
    solver: KeplerSolver,
    elements: Vec<OrbitalElements>,
    gs_positions: Vec<GeodeticPosition>,
    slots: Vec<Vec<DeviceRef>>,
    state: SaginState,
    rng: ChaCha8Rng,
}

/// Everything [`Environment::step`] reports.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    /// Observations of the next state.
    pub observations: Vec<GsObservation>,
    /// Actions after feasibility projection.
    pub actions: Vec<ScheduleAction>,
    pub rewards: Vec<RewardBreakdown>,
    pub metrics: Vec<StepMetrics>,
    pub done: bool,
}

fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Initial bearing from `a` to `b`, rad clockwise from north.
fn bearing(a: &GeodeticPosition, b: &GeodeticPosition) -> f64 {
    let dl = b.longitude - a.longitude;
    let y = dl.sin() * b.latitude.cos();
    let x = a.latitude.cos() * b.latitude.sin() - a.latitude.sin() * b.latitude.cos() * dl.cos();
    y.atan2(x)
}

/// Point reached after travelling `angle` radians of arc along `heading`.
fn destination(a: &GeodeticPosition, heading: f64, angle: f64) -> Result<GeodeticPosition> {
    let (s1, c1) = a.latitude.sin_cos();
    let (sd, cd) = angle.sin_cos();
    let lat = (s1 * cd + c1 * sd * heading.cos()).clamp(-1.0, 1.0).asin();
    let lon = a.longitude + (heading.sin() * sd * c1).atan2(cd - s1 * lat.sin());
    GeodeticPosition::new(lat, lon, a.altitude)
}

impl Environment {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        Self::with_constants(cfg, EarthConstants::default())
    }

    pub fn with_constants(cfg: ScenarioConfig, constants: EarthConstants) -> Result<Self> {
        cfg.validate()?;
        let elements = cfg
            .tle_records()?
            .iter()
            .map(|r| elements_from_tle(r, &constants))
            .collect::<Result<Vec<_>>>()?;
        let gs_positions = cfg
            .ground_stations
            .iter()
            .map(|g| g.position())
            .collect::<Result<Vec<_>>>()?;
        let slots = cfg
            .ground_stations
            .iter()
            .map(|g| {
                g.cubesats
                    .iter()
                    .map(|&index| DeviceRef { kind: DeviceKind::CubeSat, index })
                    .chain(g.uavs.iter().map(|&index| DeviceRef { kind: DeviceKind::Uav, index }))
                    .collect()
            })
            .collect();
        let mut env = Self {
            cfg,
            constants,
            solver: KeplerSolver::Newton,
            elements,
            gs_positions,
            slots,
            state: SaginState { t: 0, cubesats: vec![], uavs: vec![], gs_limits: vec![] },
            rng: ChaCha8Rng::seed_from_u64(0),
        };
        env.reset(0)?;
        Ok(env)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn constants(&self) -> &EarthConstants {
        &self.constants
    }

    pub fn state(&self) -> &SaginState {
        &self.state
    }

    /// Replaces the ground truth, e.g. to probe a hand-built situation.
    pub fn set_state(&mut self, state: SaginState) -> Result<()> {
        if state.cubesats.len() != self.cfg.n_cubesat()
            || state.uavs.len() != self.cfg.n_uav()
            || state.gs_limits.len() != self.cfg.n_gs()
        {
            return Err(Error::State("state does not match the scenario's device counts".into()));
        }
        if state.t > self.cfg.episode_steps {
            return Err(Error::State(format!("t = {} beyond T", state.t)));
        }
        self.state = state;
        Ok(())
    }

    pub fn n_gs(&self) -> usize {
        self.gs_positions.len()
    }

    pub fn slots(&self, gs: usize) -> &[DeviceRef] {
        &self.slots[gs]
    }

    pub fn gs_position(&self, gs: usize) -> &GeodeticPosition {
        &self.gs_positions[gs]
    }

    pub fn is_done(&self) -> bool {
        self.state.t >= self.cfg.episode_steps
    }

    fn sim_time(&self, t: usize) -> f64 {
        self.cfg.start_offset + t as f64 * self.cfg.dt
    }

    fn cubesat_at(&self, j: usize, time: f64, energy: f64) -> Result<CubeSatState> {
        let sp = subpoint(&self.elements[j], time, &self.constants, self.solver)?;
        let sun = self.cfg.sun_direction;
        let dot: f64 = sp.earth_fixed.iter().zip(sun).map(|(a, b)| a * b).sum();
        Ok(CubeSatState {
            position: sp.position,
            earth_fixed: sp.earth_fixed,
            speed: orbital_speed(&self.elements[j], sp.radius, &self.constants),
            energy,
            sun_side: dot > 0.0,
        })
    }

    fn gust_airspeed(&mut self, l: usize, heading: f64) -> Result<f64> {
        let u = &self.cfg.uavs[l];
        let att = gust_perturb(Attitude::new(heading, 0.0, 0.0), u.gust_sigma, &mut self.rng)?;
        let ground = GroundVelocity {
            u: u.speed * heading.cos(),
            v: u.speed * heading.sin(),
            w: 0.0,
        };
        // Misalignment between track and body axis lowers the axial airspeed.
        Ok(ground_to_body(ground, att).u.abs().max(1.0))
    }

    /// Restarts the episode at step 0 with a fresh gust stream.
    pub fn reset(&mut self, seed: u64) -> Result<Vec<GsObservation>> {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        let time = self.sim_time(0);
        let cubesats = (0..self.cfg.n_cubesat())
            .map(|j| {
                let c = &self.cfg.cubesats[j];
                self.cubesat_at(j, time, c.initial_energy * c.energy_cap)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut uavs = Vec::with_capacity(self.cfg.n_uav());
        for l in 0..self.cfg.n_uav() {
            let u = self.cfg.uavs[l].clone();
            let start = GeodeticPosition::from_degrees(u.waypoints[0][0], u.waypoints[0][1], u.altitude)?;
            let next = 1 % u.waypoints.len();
            let target = GeodeticPosition::from_degrees(u.waypoints[next][0], u.waypoints[next][1], u.altitude)?;
            let heading = if next == 0 { 0.0 } else { bearing(&start, &target) };
            let airspeed = self.gust_airspeed(l, heading)?;
            uavs.push(UavState {
                position: start,
                heading,
                speed: u.speed,
                airspeed,
                energy: u.initial_energy * u.energy_cap,
                waypoint: next,
            });
        }
        let gs_limits = self
            .cfg
            .ground_stations
            .iter()
            .map(|g| capacity_limit(g, 0.0))
            .collect();
        self.state = SaginState { t: 0, cubesats, uavs, gs_limits };
        Ok(self.observations())
    }

    fn device_position(&self, d: DeviceRef) -> &GeodeticPosition {
        match d.kind {
            DeviceKind::CubeSat => &self.state.cubesats[d.index].position,
            DeviceKind::Uav => &self.state.uavs[d.index].position,
        }
    }

    fn device_energy(&self, d: DeviceRef) -> (f64, f64) {
        match d.kind {
            DeviceKind::CubeSat => (self.state.cubesats[d.index].energy, self.cfg.cubesats[d.index].energy_cap),
            DeviceKind::Uav => (self.state.uavs[d.index].energy, self.cfg.uavs[d.index].energy_cap),
        }
    }

    fn device_capacity(&self, d: DeviceRef) -> f64 {
        match d.kind {
            DeviceKind::CubeSat => self.cfg.cubesats[d.index].capacity,
            DeviceKind::Uav => self.cfg.uavs[d.index].capacity,
        }
    }

    /// Per-slot coverage of GS `gs`: elevation above the configured mask.
    pub fn coverage(&self, gs: usize) -> Vec<bool> {
        let mask = self.cfg.coverage_mask();
        let g = &self.gs_positions[gs];
        self.slots[gs]
            .iter()
            .map(|&d| elevation_angle(g, self.device_position(d), &self.constants) > mask)
            .collect()
    }

    /// Covered CubeSat and UAV indices (M^i, L^i).
    pub fn coverage_sets(&self, gs: usize) -> (Vec<usize>, Vec<usize>) {
        let mut m = Vec::new();
        let mut l = Vec::new();
        for (d, covered) in self.slots[gs].iter().zip(self.coverage(gs)) {
            if covered {
                match d.kind {
                    DeviceKind::CubeSat => m.push(d.index),
                    DeviceKind::Uav => l.push(d.index),
                }
            }
        }
        (m, l)
    }

    pub fn link_terms(&self, gs: usize) -> Result<Vec<LinkTerms>> {
        let g = &self.gs_positions[gs];
        let link = &self.cfg.link;
        let coverage = self.coverage(gs);
        self.slots[gs]
            .iter()
            .zip(coverage)
            .map(|(&d, in_coverage)| {
                let distance = slant_distance(g, self.device_position(d), &self.constants);
                let gamma = snr(distance, link)?;
                let rate = rate_from_snr(gamma, link);
                Ok(LinkTerms {
                    distance,
                    snr: gamma,
                    rate,
                    quality: quality_from_rate(rate, link),
                    in_coverage,
                })
            })
            .collect()
    }

    /// Energy a device spends this step, J: idle drain or propulsion, plus
    /// the link energy towards GS `gs` when `selected`.
    pub fn device_step_energy(&self, gs: usize, slot: usize, selected: bool) -> f64 {
        let d = self.slots[gs][slot];
        let base = self.base_energy(d);
        if !selected {
            return base;
        }
        let distance = slant_distance(&self.gs_positions[gs], self.device_position(d), &self.constants);
        base + link_energy(distance, &self.cfg.link, self.cfg.dt)
    }

    fn base_energy(&self, d: DeviceRef) -> f64 {
        match d.kind {
            DeviceKind::CubeSat => self.cfg.cubesats[d.index].idle_power * self.cfg.dt,
            DeviceKind::Uav if self.cfg.propulsion => {
                let spec = &self.cfg.uavs[d.index].spec;
                let v = self.state.uavs[d.index].airspeed;
                required_power(spec, v).map(|p| p.total * self.cfg.dt).unwrap_or(0.0)
            }
            DeviceKind::Uav => 0.0,
        }
    }

    /// Clears bits until the action is feasible for GS `gs`.
    ///
    /// Uncovered devices and devices whose step energy exceeds their
    /// residual are dropped directly. Then, while more than H̄ devices are
    /// selected or the selected capacity plus the GS's own load exceeds ξ̄,
    /// the selected slot with the lowest quality·capacity is cleared, ties
    /// going to the lowest slot index.
    pub fn project_feasible(&self, gs: usize, action: &ScheduleAction) -> Result<ScheduleAction> {
        let slots = &self.slots[gs];
        if action.bits.len() != slots.len() {
            return Err(Error::Shape { expected: slots.len(), actual: action.bits.len() });
        }
        let terms = self.link_terms(gs)?;
        let mut bits = action.bits.clone();
        for (b, bit) in bits.iter_mut().enumerate() {
            if *bit {
                let (residual, _) = self.device_energy(slots[b]);
                if !terms[b].in_coverage || self.device_step_energy(gs, b, true) > residual {
                    *bit = false;
                }
            }
        }
        let g = &self.cfg.ground_stations[gs];
        let limit = self.state.gs_limits[gs];
        let value: Vec<f64> = (0..slots.len())
            .map(|b| terms[b].quality * self.device_capacity(slots[b]))
            .collect();
        loop {
            let selected: Vec<usize> = (0..bits.len()).filter(|&b| bits[b]).collect();
            let load: f64 = g.load + selected.iter().map(|&b| self.device_capacity(slots[b])).sum::<f64>();
            if selected.is_empty() || (selected.len() <= g.max_served && load <= limit) {
                break;
            }
            let worst = selected
                .iter()
                .copied()
                .min_by(|&a, &b| value[a].total_cmp(&value[b]).then(a.cmp(&b)))
                .expect("non-empty");
            bits[worst] = false;
        }
        Ok(ScheduleAction { bits })
    }

    /// Utility, cost and reward of GS `gs` under an already feasible action.
    pub fn reward(&self, gs: usize, action: &ScheduleAction) -> Result<RewardBreakdown> {
        let slots = &self.slots[gs];
        if action.bits.len() != slots.len() {
            return Err(Error::Shape { expected: slots.len(), actual: action.bits.len() });
        }
        let links = self.link_terms(gs)?;
        let mut utility = 0.0;
        let mut residual_cs = Vec::new();
        let mut residual_uav = Vec::new();
        for (b, &d) in slots.iter().enumerate() {
            if action.bits[b] {
                utility += links[b].quality * self.device_capacity(d);
            }
            if links[b].in_coverage {
                let (e, cap) = self.device_energy(d);
                match d.kind {
                    DeviceKind::CubeSat => residual_cs.push(e / cap),
                    DeviceKind::Uav => residual_uav.push(e / cap),
                }
            }
        }
        let sigma_cubesat = population_std(&residual_cs);
        let sigma_uav = population_std(&residual_uav);
        let mut cost = 0.0;
        for (b, &d) in slots.iter().enumerate() {
            if !links[b].in_coverage {
                continue;
            }
            let (_, cap) = self.device_energy(d);
            let spent = self.device_step_energy(gs, b, action.bits[b]) / cap;
            cost += spent
                * match d.kind {
                    DeviceKind::CubeSat => sigma_cubesat,
                    DeviceKind::Uav => sigma_uav,
                };
        }
        Ok(RewardBreakdown {
            utility,
            cost,
            reward: utility - cost,
            links,
            sigma_cubesat,
            sigma_uav,
        })
    }

    /// Largest utility GS `gs` could collect now: the best feasible set of
    /// at most H̄ covered devices whose capacities fit under ξ̄ and whose
    /// step energy they can afford, found by exhaustive search.
    pub fn best_utility(&self, gs: usize) -> Result<f64> {
        let links = self.link_terms(gs)?;
        let g = &self.cfg.ground_stations[gs];
        let budget = self.state.gs_limits[gs] - g.load;
        let candidates: Vec<(f64, f64)> = self.slots[gs]
            .iter()
            .enumerate()
            .filter(|&(b, &d)| links[b].in_coverage && self.device_step_energy(gs, b, true) <= self.device_energy(d).0)
            .map(|(b, &d)| (links[b].quality * self.device_capacity(d), self.device_capacity(d)))
            .collect();

        fn search(c: &[(f64, f64)], picks_left: usize, budget: f64) -> f64 {
            let Some((&(value, load), rest)) = c.split_first() else {
                return 0.0;
            };
            let skip = search(rest, picks_left, budget);
            if picks_left == 0 || load > budget {
                return skip;
            }
            skip.max(value + search(rest, picks_left - 1, budget - load))
        }
        if budget < 0.0 {
            return Ok(0.0);
        }
        Ok(search(&candidates, g.max_served, budget))
    }

    pub fn observe(&self, gs: usize) -> GsObservation {
        let g = &self.cfg.ground_stations[gs];
        let p = &self.gs_positions[gs];
        let coverage = self.coverage(gs);
        let mut features = Vec::with_capacity(GS_FEATURES + SLOT_FEATURES * coverage.len());
        features.extend([p.latitude, p.longitude, g.load / g.rho, self.state.gs_limits[gs] / g.rho]);
        for (&d, &covered) in self.slots[gs].iter().zip(&coverage) {
            if !covered {
                features.extend([0.0; SLOT_FEATURES]);
                continue;
            }
            let pos = self.device_position(d);
            let speed = match d.kind {
                DeviceKind::CubeSat => self.state.cubesats[d.index].speed,
                DeviceKind::Uav => self.state.uavs[d.index].speed,
            };
            let (e, cap) = self.device_energy(d);
            features.extend([pos.latitude, pos.longitude, pos.altitude, speed, e / cap, self.device_capacity(d)]);
        }
        GsObservation { gs, features, coverage }
    }

    pub fn observations(&self) -> Vec<GsObservation> {
        (0..self.n_gs()).map(|i| self.observe(i)).collect()
    }

    fn max_altitude(&self) -> f64 {
        let orbit = self
            .elements
            .iter()
            .map(|e| e.semi_major_axis * (1.0 + e.eccentricity) - self.constants.radius)
            .fold(0.0, f64::max);
        let air = self.cfg.uavs.iter().map(|u| u.altitude).fold(0.0, f64::max);
        orbit.max(air).max(1.0)
    }

    fn max_speed(&self) -> f64 {
        let orbit = self
            .elements
            .iter()
            .map(|e| {
                let rp = e.semi_major_axis * (1.0 - e.eccentricity);
                orbital_speed(e, rp, &self.constants)
            })
            .fold(0.0, f64::max);
        let air = self.cfg.uavs.iter().map(|u| u.speed).fold(0.0, f64::max);
        orbit.max(air).max(1.0)
    }

    fn max_capacity(&self) -> f64 {
        self.cfg
            .cubesats
            .iter()
            .map(|c| c.capacity)
            .chain(self.cfg.uavs.iter().map(|u| u.capacity))
            .fold(0.0, f64::max)
    }

    /// Encoder bounds matching [`Self::observe`] for GS `gs`.
    pub fn observation_bounds(&self, gs: usize) -> Vec<(f64, f64)> {
        let mut b = vec![(-FRAC_PI_2, FRAC_PI_2), (-PI, PI), (0.0, 1.0), (0.0, 1.0)];
        let slot = [
            (-FRAC_PI_2, FRAC_PI_2),
            (-PI, PI),
            (0.0, self.max_altitude()),
            (0.0, self.max_speed()),
            (0.0, 1.0),
            (0.0, self.max_capacity()),
        ];
        for _ in &self.slots[gs] {
            b.extend(slot);
        }
        b
    }

    /// Ground-truth features for the centralized critic: progress t/T,
    /// ξ̄ over ϱ per GS, then lat, lon, energy fraction and sun flag per
    /// CubeSat and lat, lon, energy fraction per UAV.
    pub fn global_features(&self) -> Vec<f64> {
        let s = &self.state;
        let mut f = vec![s.t as f64 / self.cfg.episode_steps as f64];
        for (g, lim) in self.cfg.ground_stations.iter().zip(&s.gs_limits) {
            f.push(lim / g.rho);
        }
        for (c, cfg) in s.cubesats.iter().zip(&self.cfg.cubesats) {
            f.extend([
                c.position.latitude,
                c.position.longitude,
                c.energy / cfg.energy_cap,
                if c.sun_side { 1.0 } else { 0.0 },
            ]);
        }
        for (u, cfg) in s.uavs.iter().zip(&self.cfg.uavs) {
            f.extend([u.position.latitude, u.position.longitude, u.energy / cfg.energy_cap]);
        }
        f
    }

    pub fn global_bounds(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(0.0, 1.0); 1 + self.n_gs()];
        for _ in 0..self.cfg.n_cubesat() {
            b.extend([(-FRAC_PI_2, FRAC_PI_2), (-PI, PI), (0.0, 1.0), (0.0, 1.0)]);
        }
        for _ in 0..self.cfg.n_uav() {
            b.extend([(-FRAC_PI_2, FRAC_PI_2), (-PI, PI), (0.0, 1.0)]);
        }
        b
    }

    /// Adds sun-side charging to every CubeSat, clamped at its cap.
    pub fn solar_charge(&mut self) {
        let gain = self.cfg.charging_power * self.cfg.dt;
        for (c, cfg) in self.state.cubesats.iter_mut().zip(&self.cfg.cubesats) {
            if c.sun_side {
                c.energy = (c.energy + gain).min(cfg.energy_cap);
            }
        }
    }

    fn advance_uav(&mut self, l: usize) -> Result<()> {
        let cfg = &self.cfg.uavs[l];
        let radius = self.constants.radius + cfg.altitude;
        let mut remaining = cfg.speed * self.cfg.dt / radius;
        let mut uav = self.state.uavs[l].clone();
        let n = cfg.waypoints.len();
        // Fly leg by leg so long steps can round several waypoints.
        for _ in 0..=n {
            let w = cfg.waypoints[uav.waypoint];
            let target = GeodeticPosition::from_degrees(w[0], w[1], cfg.altitude)?;
            let gap = great_circle_distance(&uav.position, &target, &self.constants) / self.constants.radius;
            if gap > remaining {
                uav.heading = bearing(&uav.position, &target);
                uav.position = destination(&uav.position, uav.heading, remaining)?;
                break;
            }
            uav.position = target;
            remaining -= gap;
            if n == 1 {
                break;
            }
            uav.waypoint = (uav.waypoint + 1) % n;
        }
        uav.airspeed = self.gust_airspeed(l, uav.heading)?;
        self.state.uavs[l] = uav;
        Ok(())
    }

    /// Projects, scores and applies one joint action, then advances time.
    pub fn step(&mut self, actions: &[ScheduleAction]) -> Result<StepOutcome> {
        if self.is_done() {
            return Err(Error::State("episode already finished; call reset".into()));
        }
        if actions.len() != self.n_gs() {
            return Err(Error::Shape { expected: self.n_gs(), actual: actions.len() });
        }
        let projected = actions
            .iter()
            .enumerate()
            .map(|(i, a)| self.project_feasible(i, a))
            .collect::<Result<Vec<_>>>()?;
        let rewards = projected
            .iter()
            .enumerate()
            .map(|(i, a)| self.reward(i, a))
            .collect::<Result<Vec<_>>>()?;
        let metrics = (0..self.n_gs())
            .map(|i| self.metrics(i, &projected[i], &rewards[i]))
            .collect::<Result<Vec<_>>>()?;

        // Energy bookkeeping: each device pays its base drain once and a
        // link term per GS that scheduled it.
        let mut spend_cs: Vec<f64> = (0..self.cfg.n_cubesat())
            .map(|j| self.base_energy(DeviceRef { kind: DeviceKind::CubeSat, index: j }))
            .collect();
        let mut spend_uav: Vec<f64> = (0..self.cfg.n_uav())
            .map(|l| self.base_energy(DeviceRef { kind: DeviceKind::Uav, index: l }))
            .collect();
        for (i, a) in projected.iter().enumerate() {
            for (b, &d) in self.slots[i].iter().enumerate() {
                if a.bits[b] {
                    let extra = self.device_step_energy(i, b, true) - self.base_energy(d);
                    match d.kind {
                        DeviceKind::CubeSat => spend_cs[d.index] += extra,
                        DeviceKind::Uav => spend_uav[d.index] += extra,
                    }
                }
            }
        }
        for (c, e) in self.state.cubesats.iter_mut().zip(spend_cs) {
            c.energy = (c.energy - e).max(0.0);
        }
        for (u, e) in self.state.uavs.iter_mut().zip(spend_uav) {
            u.energy = (u.energy - e).max(0.0);
        }
        self.solar_charge();

        let t = self.state.t + 1;
        let time = self.sim_time(t);
        for j in 0..self.cfg.n_cubesat() {
            let energy = self.state.cubesats[j].energy;
            self.state.cubesats[j] = self.cubesat_at(j, time, energy)?;
        }
        for l in 0..self.cfg.n_uav() {
            self.advance_uav(l)?;
        }
        self.state.gs_limits = self
            .cfg
            .ground_stations
            .iter()
            .map(|g| capacity_limit(g, t as f64))
            .collect();
        self.state.t = t;

        Ok(StepOutcome {
            observations: self.observations(),
            actions: projected,
            rewards,
            metrics,
            done: self.is_done(),
        })
    }

    fn metrics(&self, gs: usize, action: &ScheduleAction, r: &RewardBreakdown) -> Result<StepMetrics> {
        let slots = &self.slots[gs];
        let mut q_sum = 0.0;
        let mut scheduled = 0.0;
        for (b, &d) in slots.iter().enumerate() {
            if action.bits[b] {
                q_sum += r.links[b].quality;
                scheduled += self.device_capacity(d);
            }
        }
        let n = action.count();
        let best = self.best_utility(gs)?;
        let normalized_reward = if best > 0.0 { (r.reward / best).clamp(0.0, 1.0) } else { 0.0 };
        let limit = self.state.gs_limits[gs];
        let mean_of = |kind: DeviceKind| {
            let v: Vec<f64> = slots
                .iter()
                .filter(|d| d.kind == kind)
                .map(|&d| {
                    let (e, cap) = self.device_energy(d);
                    e / cap
                })
                .collect();
            if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 }
        };
        Ok(StepMetrics {
            gs,
            reward: r.reward,
            utility: r.utility,
            cost: r.cost,
            best_utility: best,
            normalized_reward,
            qos: if n == 0 { 0.0 } else { q_sum / n as f64 },
            capacity: if limit > 0.0 { (scheduled / limit).min(1.0) } else { 0.0 },
            mean_residual_cubesat: mean_of(DeviceKind::CubeSat),
            mean_residual_uav: mean_of(DeviceKind::Uav),
        })
    }
}
