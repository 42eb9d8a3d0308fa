use std::io::Write;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::bilinear::{bilinear_kf_step, BilinearKfState, BilinearParams};
use super::scalar::{scalar_kf_init, ScalarKfState};
use crate::error::{Error, Result};
use crate::seeds;
use crate::topo_map::{heuristic_cost, EdgeId, NodeId, TopologyMap};
use crate::world_sim::ObservationLog;

/// What the planner knows when it asks for the cost of `from -> to`.
#[derive(Clone, Copy, Debug)]
pub struct EdgeQuery<'a> {
    pub from: NodeId,
    pub to: NodeId,
    pub edge: EdgeId,
    /// Traversal depth: one plus the number of predecessors of `from`.
    pub depth: usize,
    /// Estimated cost of the edge leading into `from` (0 at the source).
    pub prev_cost: f64,
    /// Estimated costs along the predecessor chain, source first.
    pub prefix_costs: &'a [f64],
}

pub trait EdgeCostEstimator {
    /// Cost in seconds of traversing `query.edge`; always positive.
    fn estimate(&mut self, map: &TopologyMap, query: &EdgeQuery<'_>) -> Result<f64>;

    /// Runtime feedback: the edge was just traversed in `observed` seconds.
    fn observe(&mut self, _edge: EdgeId, _observed: f64) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Heuristic,
    #[serde(alias = "static_kf")]
    Static,
    #[serde(alias = "dynamic_kf")]
    Dynamic,
}

impl ProviderKind {
    pub const ALL: [ProviderKind; 3] = [ProviderKind::Heuristic, ProviderKind::Static, ProviderKind::Dynamic];

    pub fn name(self) -> &'static str {
        match self {
            ProviderKind::Heuristic => "heuristic",
            ProviderKind::Static => "static",
            ProviderKind::Dynamic => "dynamic",
        }
    }
}

impl std::fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProviderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heuristic" | "eucl" => Ok(ProviderKind::Heuristic),
            "static" | "static_kf" => Ok(ProviderKind::Static),
            "dynamic" | "dynamic_kf" => Ok(ProviderKind::Dynamic),
            other => Err(Error::InvalidConfig(format!("unknown provider '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StaticKfConfig {
    pub p0: f64,
    pub sigma2_omega: f64,
    pub sigma2_eta: f64,
}

impl Default for StaticKfConfig {
    fn default() -> Self {
        StaticKfConfig {
            p0: 1.0,
            sigma2_omega: 0.05,
            sigma2_eta: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicKfConfig {
    pub phi: f64,
    /// Mean and variance of the normal law `b` and `c` are drawn from.
    pub coef_mean: f64,
    pub coef_var: f64,
    /// Mean and variance of the innovation xi.
    pub xi_mean: f64,
    pub xi_var: f64,
    pub q_scale: f64,
    pub r_scale: f64,
    pub p0: f64,
}

impl Default for DynamicKfConfig {
    fn default() -> Self {
        DynamicKfConfig {
            phi: 0.2,
            coef_mean: 0.1,
            coef_var: 0.1,
            xi_mean: 0.1,
            xi_var: 0.1,
            q_scale: 1.0,
            r_scale: 0.1,
            p0: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub estimates: usize,
    /// Dynamic filter answered with the running mean (short prefix).
    pub fallbacks: usize,
    /// Non-positive or non-finite estimates replaced by a fraction of the mean.
    pub clamps: usize,
    /// Bilinear updates that blew up and were reset.
    pub recoveries: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub from: NodeId,
    pub to: NodeId,
    pub k: usize,
    pub prior: f64,
    pub gain_or_norm: f64,
    pub posterior: f64,
    pub observation: f64,
}

/// Writes `edge_from,edge_to,k,prior,gain_or_norm,posterior,observation`.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_from", "edge_to", "k", "prior", "gain_or_norm", "posterior", "observation"])?;
    for r in rows {
        w.write_record([
            r.from.to_string(),
            r.to.to_string(),
            r.k.to_string(),
            r.prior.to_string(),
            r.gain_or_norm.to_string(),
            r.posterior.to_string(),
            r.observation.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Straight-line distance over nominal speed. Stateless.
#[derive(Clone, Debug)]
pub struct HeuristicProvider {
    pub nominal_speed: f64,
}

impl EdgeCostEstimator for HeuristicProvider {
    fn estimate(&mut self, map: &TopologyMap, q: &EdgeQuery<'_>) -> Result<f64> {
        heuristic_cost(map, q.from, q.to, self.nominal_speed)
    }
}

/// A fixed cost per edge, for tests and for replaying cost snapshots.
#[derive(Clone, Debug)]
pub struct FrozenCosts {
    pub costs: Vec<f64>,
}

impl EdgeCostEstimator for FrozenCosts {
    fn estimate(&mut self, _map: &TopologyMap, q: &EdgeQuery<'_>) -> Result<f64> {
        self.costs
            .get(q.edge.0)
            .copied()
            .ok_or(Error::MissingEdge(q.from, q.to))
    }
}

/// One scalar filter per edge, fed at depth `k` with the `k`-th entry of a
/// pre-collected observation table.
#[derive(Clone, Debug)]
pub struct StaticKfProvider {
    table: ObservationLog,
    filters: Vec<Option<ScalarKfState>>,
    config: StaticKfConfig,
    nominal_speed: f64,
    diagnostics: Diagnostics,
    trace: Option<Vec<TraceRow>>,
}

impl StaticKfProvider {
    pub fn new(table: ObservationLog, config: StaticKfConfig, nominal_speed: f64) -> Self {
        StaticKfProvider {
            filters: vec![None; table.edge_count()],
            table,
            config,
            nominal_speed,
            diagnostics: Diagnostics::default(),
            trace: None,
        }
    }

    pub fn filter(&self, edge: EdgeId) -> Option<&ScalarKfState> {
        self.filters.get(edge.0).and_then(Option::as_ref)
    }
}

impl EdgeCostEstimator for StaticKfProvider {
    fn estimate(&mut self, map: &TopologyMap, q: &EdgeQuery<'_>) -> Result<f64> {
        let y = self.table.at(q.edge, q.depth).ok_or(Error::TableExhausted {
            from: q.from,
            to: q.to,
            k: q.depth,
        })?;
        let slot = &mut self.filters[q.edge.0];
        if slot.is_none() {
            let heuristic = heuristic_cost(map, q.from, q.to, self.nominal_speed)?;
            *slot = Some(scalar_kf_init(
                self.table.mean(q.edge),
                heuristic,
                self.config.p0,
                self.config.sigma2_omega,
                self.config.sigma2_eta,
            )?);
        }
        let filter = slot.as_mut().expect("initialized above");
        let step = filter.step(y)?;
        self.diagnostics.estimates += 1;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceRow {
                from: q.from,
                to: q.to,
                k: q.depth,
                prior: step.prior,
                gain_or_norm: step.gain,
                posterior: step.posterior,
                observation: y,
            });
        }
        Ok(step.posterior)
    }
}

#[derive(Clone, Debug)]
struct DynamicEdge {
    cov: DMatrix<f64>,
    xi_history: Vec<f64>,
    sum: f64,
    count: usize,
    latest: Option<f64>,
}

/// Bilinear filter per edge, fed with the edge's latest runtime
/// observation. The X window is the chain of estimated costs leading to
/// the node being expanded, with `X(0) = 0` at the source.
#[derive(Clone, Debug)]
pub struct DynamicKfProvider {
    coefficients: BilinearParams,
    config: DynamicKfConfig,
    edges: Vec<Option<DynamicEdge>>,
    /// Observations recorded before an edge's filter was first queried.
    pending: Vec<Vec<f64>>,
    /// Prior mean per edge from collected data; replaces the heuristic
    /// seed of the running mean.
    legacy_means: Vec<Option<f64>>,
    xi: Normal<f64>,
    rng: ChaCha8Rng,
    nominal_speed: f64,
    diagnostics: Diagnostics,
    trace: Option<Vec<TraceRow>>,
}

impl DynamicKfProvider {
    /// Draws `b` and `c` once from the configured normal law using `seed`.
    pub fn new(edge_count: usize, order: usize, config: DynamicKfConfig, nominal_speed: f64, seed: u64) -> Result<Self> {
        let mut coef_rng = seeds::rng_for(seed, "dynamic.coefficients");
        let coefficients = BilinearParams::sampled(
            order,
            config.phi,
            config.coef_mean,
            config.coef_var,
            config.q_scale,
            config.r_scale,
            &mut coef_rng,
        )?;
        DynamicKfProvider::with_coefficients(edge_count, coefficients, config, nominal_speed, seed)
    }

    pub fn with_coefficients(
        edge_count: usize,
        coefficients: BilinearParams,
        config: DynamicKfConfig,
        nominal_speed: f64,
        seed: u64,
    ) -> Result<Self> {
        let xi = Normal::new(config.xi_mean, config.xi_var.max(0.0).sqrt())
            .map_err(|e| Error::InvalidConfig(format!("innovation distribution: {e}")))?;
        Ok(DynamicKfProvider {
            coefficients,
            config,
            edges: vec![None; edge_count],
            pending: vec![Vec::new(); edge_count],
            legacy_means: vec![None; edge_count],
            xi,
            rng: seeds::rng_for(seed, "dynamic.innovation"),
            nominal_speed,
            diagnostics: Diagnostics::default(),
            trace: None,
        })
    }

    /// Seeds each edge's running mean with the mean of its collected
    /// observations until runtime observations arrive.
    pub fn with_legacy(mut self, table: &ObservationLog) -> Self {
        self.legacy_means = (0..self.edges.len()).map(|i| table.mean(EdgeId(i))).collect();
        self
    }

    pub fn order(&self) -> usize {
        self.coefficients.order
    }

    pub fn coefficients(&self) -> &BilinearParams {
        &self.coefficients
    }

    /// Running mean of the edge's observations, or `None` before the first.
    pub fn running_mean(&self, edge: EdgeId) -> Option<f64> {
        match &self.edges[edge.0] {
            Some(e) if e.count > 0 => Some(e.sum / e.count as f64),
            Some(_) => None,
            None => {
                let p = &self.pending[edge.0];
                (!p.is_empty()).then(|| p.iter().sum::<f64>() / p.len() as f64)
            }
        }
    }

    fn ensure_edge(&mut self, map: &TopologyMap, q: &EdgeQuery<'_>) -> Result<()> {
        if self.edges[q.edge.0].is_none() {
            let r = self.coefficients.order;
            let xi_history = (0..r).map(|_| self.xi.sample(&mut self.rng)).collect();
            let pending = std::mem::take(&mut self.pending[q.edge.0]);
            // legacy or heuristic cost seeds the mean until the first observation
            let (sum, count) = if pending.is_empty() {
                let seed = match self.legacy_means[q.edge.0] {
                    Some(m) => m,
                    None => heuristic_cost(map, q.from, q.to, self.nominal_speed)?,
                };
                (seed, 0)
            } else {
                (pending.iter().sum(), pending.len())
            };
            self.edges[q.edge.0] = Some(DynamicEdge {
                cov: BilinearKfState::initial_covariance(r, self.config.p0),
                xi_history,
                sum,
                count,
                latest: pending.last().copied(),
            });
        }
        Ok(())
    }
}

impl EdgeCostEstimator for DynamicKfProvider {
    fn estimate(&mut self, map: &TopologyMap, q: &EdgeQuery<'_>) -> Result<f64> {
        let r = self.coefficients.order;
        let xi_k = self.xi.sample(&mut self.rng);
        self.ensure_edge(map, q)?;
        let edge = self.edges[q.edge.0].as_mut().expect("initialized above");
        let mu = edge.sum / edge.count.max(1) as f64;
        let y = edge.latest.unwrap_or(mu);
        self.diagnostics.estimates += 1;

        // window X(0) = 0, X(1), ..., X(k-1)
        let have = q.prefix_costs.len() + 1;
        if have < r {
            self.diagnostics.fallbacks += 1;
            if let Some(trace) = &mut self.trace {
                trace.push(TraceRow {
                    from: q.from,
                    to: q.to,
                    k: q.depth,
                    prior: mu,
                    gain_or_norm: 0.0,
                    posterior: mu,
                    observation: y,
                });
            }
            return Ok(mu);
        }
        let mut x_history = Vec::with_capacity(r);
        if have == r {
            x_history.push(0.0);
            x_history.extend_from_slice(q.prefix_costs);
        } else {
            x_history.extend_from_slice(&q.prefix_costs[q.prefix_costs.len() - r..]);
        }

        let mut params = self.coefficients.clone();
        params.mu = mu;
        let mut state = BilinearKfState::new(&edge.xi_history, &x_history, edge.cov.clone())?;
        let step = bilinear_kf_step(&mut state, &params, y, xi_k)?;
        edge.cov = state.p;
        edge.xi_history.remove(0);
        edge.xi_history.push(xi_k);
        if step.recovered {
            self.diagnostics.recoveries += 1;
        }

        let mut x = step.posterior;
        if !(x > 0.0 && x.is_finite()) {
            log::debug!("clamping estimate {x} on edge {}-{}", q.from, q.to);
            self.diagnostics.clamps += 1;
            x = 0.1 * mu;
        }
        if let Some(trace) = &mut self.trace {
            trace.push(TraceRow {
                from: q.from,
                to: q.to,
                k: q.depth,
                prior: step.prior,
                gain_or_norm: step.gain_norm,
                posterior: x,
                observation: y,
            });
        }
        Ok(x)
    }

    fn observe(&mut self, edge: EdgeId, observed: f64) {
        match &mut self.edges[edge.0] {
            Some(e) => {
                if e.count == 0 {
                    e.sum = 0.0;
                }
                e.sum += observed;
                e.count += 1;
                e.latest = Some(observed);
            }
            None => self.pending[edge.0].push(observed),
        }
    }
}

/// The three planners' edge-cost sources behind one type, plus a frozen
/// snapshot for verification.
// one provider per run; boxing the filters would buy nothing
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum CostProvider {
    Heuristic(HeuristicProvider),
    Static(StaticKfProvider),
    Dynamic(DynamicKfProvider),
    Frozen(FrozenCosts),
}

impl CostProvider {
    pub fn heuristic(nominal_speed: f64) -> Self {
        CostProvider::Heuristic(HeuristicProvider { nominal_speed })
    }

    pub fn frozen(costs: Vec<f64>) -> Self {
        CostProvider::Frozen(FrozenCosts { costs })
    }

    pub fn kind(&self) -> Option<ProviderKind> {
        match self {
            CostProvider::Heuristic(_) => Some(ProviderKind::Heuristic),
            CostProvider::Static(_) => Some(ProviderKind::Static),
            CostProvider::Dynamic(_) => Some(ProviderKind::Dynamic),
            CostProvider::Frozen(_) => None,
        }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        match self {
            CostProvider::Static(p) => p.diagnostics.clone(),
            CostProvider::Dynamic(p) => p.diagnostics.clone(),
            _ => Diagnostics::default(),
        }
    }

    /// Starts recording one trace row per filter update.
    pub fn enable_trace(&mut self) {
        match self {
            CostProvider::Static(p) => p.trace = Some(Vec::new()),
            CostProvider::Dynamic(p) => p.trace = Some(Vec::new()),
            _ => {}
        }
    }

    pub fn trace(&self) -> &[TraceRow] {
        let t = match self {
            CostProvider::Static(p) => p.trace.as_deref(),
            CostProvider::Dynamic(p) => p.trace.as_deref(),
            _ => None,
        };
        t.unwrap_or(&[])
    }
}

impl EdgeCostEstimator for CostProvider {
    fn estimate(&mut self, map: &TopologyMap, q: &EdgeQuery<'_>) -> Result<f64> {
        match self {
            CostProvider::Heuristic(p) => p.estimate(map, q),
            CostProvider::Static(p) => p.estimate(map, q),
            CostProvider::Dynamic(p) => p.estimate(map, q),
            CostProvider::Frozen(p) => p.estimate(map, q),
        }
    }

    fn observe(&mut self, edge: EdgeId, observed: f64) {
        match self {
            CostProvider::Static(p) => p.observe(edge, observed),
            CostProvider::Dynamic(p) => p.observe(edge, observed),
            _ => {}
        }
    }
}

/// Stand-alone form of the planner's per-edge cost request.
pub fn estimate_edge_cost(
    provider: &mut impl EdgeCostEstimator,
    map: &TopologyMap,
    u: NodeId,
    v: NodeId,
    k: usize,
    prefix_costs: &[f64],
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidConfig("traversal depth starts at 1".into()));
    }
    let edge = map.edge_between(u, v).ok_or(Error::MissingEdge(u, v))?;
    let query = EdgeQuery {
        from: u,
        to: v,
        edge,
        depth: k,
        prev_cost: prefix_costs.last().copied().unwrap_or(0.0),
        prefix_costs,
    };
    provider.estimate(map, &query)
}
