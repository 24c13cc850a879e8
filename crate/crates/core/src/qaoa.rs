//! QAOA for weighted MaxCut: circuit construction, classical parameter
//! search, and approximation ratios.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::gate::GateKind;
use crate::par::{map_indexed, Exec};
use crate::seed;
use crate::simulate::{exact_distribution, run_exact, sample, Distribution, NoiseModel};

pub const MAX_BRUTE_FORCE_NODES: usize = 24;

/// Grid points per axis when seeding each layer.
pub const GRID_POINTS: usize = 8;

pub const GRAPH_PRESETS: [&str; 4] = ["path3", "triangle", "cycle4", "wheel5"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeJson {
    Plain([usize; 2]),
    Weighted(usize, usize, f64),
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        let edges = j.edges.into_iter().map(|e| match e {
            EdgeJson::Plain([a, b]) => (a, b, 1.0),
            EdgeJson::Weighted(a, b, w) => (a, b, w),
        });
        Graph::new(j.n, edges)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        let edges = g
            .edges
            .into_iter()
            .map(|(a, b, w)| if w == 1.0 { EdgeJson::Plain([a, b]) } else { EdgeJson::Weighted(a, b, w) })
            .collect();
        GraphJson { n: g.n, edges }
    }
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Graph("need at least 2 nodes".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::Graph(format!("self-loop on node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Graph(format!("edge ({a}, {b}) leaves the {n}-node graph")));
            }
            if !w.is_finite() {
                return Err(Error::Graph(format!("edge ({a}, {b}) has weight {w}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Graph(format!("edge ({a}, {b}) listed twice")));
            }
            out.push((a, b, w));
        }
        Ok(Self { n, edges: out })
    }

    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges.iter().map(|&(a, b)| (a, b, 1.0)))
    }

    pub fn preset(name: &str) -> Option<Self> {
        let g = match name {
            "path3" => Self::unweighted(3, &[(0, 1), (1, 2)]),
            "triangle" => Self::unweighted(3, &[(0, 1), (1, 2), (0, 2)]),
            "cycle4" => Self::unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            "wheel5" => Self::unweighted(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4), (4, 1)]),
            _ => return None,
        };
        Some(g.expect("presets are valid"))
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Cut weight of the assignment whose bit `i` is node `i`'s side.
    pub fn cut_of_index(&self, index: usize) -> f64 {
        self.edges
            .iter()
            .filter(|(a, b, _)| ((index >> a) ^ (index >> b)) & 1 == 1)
            .map(|(_, _, w)| w)
            .sum()
    }
}

/// Cut weight of a bitstring; the last character is node 0.
pub fn maxcut_value(g: &Graph, assignment: &str) -> Result<f64> {
    if assignment.len() != g.n || !assignment.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Graph(format!(
            "assignment {assignment:?} is not a {}-bit string",
            g.n
        )));
    }
    let index = usize::from_str_radix(assignment, 2).expect("checked binary");
    Ok(g.cut_of_index(index))
}

/// Exhaustive optimum and the smallest assignment reaching it.
pub fn brute_force_maxcut(g: &Graph) -> Result<(f64, String)> {
    if g.n > MAX_BRUTE_FORCE_NODES {
        return Err(Error::Graph(format!(
            "{} nodes is too many for exhaustive search (max {MAX_BRUTE_FORCE_NODES})",
            g.n
        )));
    }
    let mut best = (f64::NEG_INFINITY, 0usize);
    for i in 0..1usize << g.n {
        let c = g.cut_of_index(i);
        if c > best.0 {
            best = (c, i);
        }
    }
    Ok((best.0, format!("{:0width$b}", best.1, width = g.n)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Invalid(format!(
                "need p >= 1 gammas and betas of equal length, got {} and {}",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }
}

fn push_layers(c: &mut Circuit, g: &Graph, params: &QaoaParams) {
    let gate = |k, theta: f64, q: usize| Instruction::gate(k, [theta], [q]);
    for q in 0..g.n {
        c.push(Instruction::h(q)).expect("node in range");
    }
    for (gamma, beta) in params.gammas.iter().zip(&params.betas) {
        for &(i, j, w) in &g.edges {
            c.push(Instruction::cx(i, j)).expect("edge in range");
            c.push(gate(GateKind::RZ, 2.0 * gamma * w, j)).expect("edge in range");
            c.push(Instruction::cx(i, j)).expect("edge in range");
        }
        for q in 0..g.n {
            c.push(gate(GateKind::RX, 2.0 * beta, q)).expect("node in range");
        }
    }
}

/// One qubit per node, measured into the matching clbit.
pub fn build_qaoa_circuit(g: &Graph, params: &QaoaParams) -> Circuit {
    let mut c = Circuit::new(g.n, g.n);
    push_layers(&mut c, g, params);
    for q in 0..g.n {
        c.push(Instruction::measure(q, q)).expect("node in range");
    }
    c
}

fn cut_table(g: &Graph) -> Vec<f64> {
    (0..1usize << g.n).map(|i| g.cut_of_index(i)).collect()
}

fn expected_cut_with(g: &Graph, table: &[f64], params: &QaoaParams) -> f64 {
    let mut c = Circuit::new(g.n, 0);
    push_layers(&mut c, g, params);
    let sv = run_exact(&c, 0).expect("node count is bounded by the simulator");
    sv.probabilities().iter().zip(table).map(|(p, v)| p * v).sum()
}

/// Noiseless expected cut.
pub fn expected_cut(g: &Graph, params: &QaoaParams) -> f64 {
    expected_cut_with(g, &cut_table(g), params)
}

/// Layer by layer, picks the best point of an 8x8 grid over
/// `[0, pi) x [0, pi/2)` with earlier layers fixed, then refines all angles
/// by coordinate descent with a shrinking step. `budget` caps total
/// evaluations, but the grid always runs in full.
pub fn optimize_params(g: &Graph, p: usize, budget: usize, seed: u64, exec: Exec) -> Result<QaoaParams> {
    if p == 0 {
        return Err(Error::Invalid("p must be at least 1".into()));
    }
    if g.n > crate::simulate::MAX_SIM_QUBITS {
        return Err(Error::Graph(format!("{} nodes exceeds the simulator", g.n)));
    }
    let table = cut_table(g);
    let eval = |prm: &QaoaParams| expected_cut_with(g, &table, prm);
    let mut gammas = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);
    let mut used = 0usize;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..p {
        let cells = GRID_POINTS * GRID_POINTS;
        let scores = map_indexed(exec, cells, |cell| {
            let mut gs = gammas.clone();
            let mut bs = betas.clone();
            gs.push(PI * (cell / GRID_POINTS) as f64 / GRID_POINTS as f64);
            bs.push(FRAC_PI_2 * (cell % GRID_POINTS) as f64 / GRID_POINTS as f64);
            eval(&QaoaParams { gammas: gs, betas: bs })
        });
        used += cells;
        let mut pick = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[pick] {
                pick = i;
            }
        }
        best = scores[pick];
        gammas.push(PI * (pick / GRID_POINTS) as f64 / GRID_POINTS as f64);
        betas.push(FRAC_PI_2 * (pick % GRID_POINTS) as f64 / GRID_POINTS as f64);
    }
    let mut params = QaoaParams { gammas, betas };

    let mut step = PI / (2 * GRID_POINTS) as f64;
    let mut order: Vec<usize> = (0..2 * p).collect();
    let mut pass = 0u64;
    'outer: while step > 1e-6 {
        order.shuffle(&mut seed::rng(seed, "qaoa-descent", pass));
        pass += 1;
        let mut improved = false;
        for &coord in &order {
            for dir in [1.0, -1.0] {
                if used >= budget {
                    break 'outer;
                }
                let mut trial = params.clone();
                let slot = if coord < p { &mut trial.gammas[coord] } else { &mut trial.betas[coord - p] };
                *slot += dir * step;
                used += 1;
                let v = eval(&trial);
                if v > best + 1e-15 {
                    best = v;
                    params = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(params)
}

fn ratio_from(g: &Graph, dist: &Distribution, unflip_mask: Option<&str>) -> Result<f64> {
    let (c_max, _) = brute_force_maxcut(g)?;
    if c_max <= 0.0 {
        return Err(Error::Graph("graph has no positive cut".into()));
    }
    let dist = match unflip_mask {
        Some(m) => dist.flip_bits(m)?,
        None => dist.clone(),
    };
    let nodes: Vec<usize> = (0..g.n).collect();
    let dist = dist.marginalize(&nodes)?;
    let mut total = 0.0;
    for (key, p) in dist.probabilities() {
        total += p * maxcut_value(g, &key)?;
    }
    Ok((total / c_max).clamp(0.0, 1.0))
}

/// Sampled expected cut over the optimum. Qubits beyond the graph's nodes
/// are summed out; `unflip_mask` undoes deliberate output flips first.
pub fn approximation_ratio(
    g: &Graph,
    circuit: &Circuit,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
    unflip_mask: Option<&str>,
    exec: Exec,
) -> Result<f64> {
    let dist = sample(circuit, 0, shots, seed, noise, exec)?;
    ratio_from(g, &dist, unflip_mask)
}

/// Same ratio from exact noiseless probabilities.
pub fn approximation_ratio_exact(g: &Graph, circuit: &Circuit, unflip_mask: Option<&str>) -> Result<f64> {
    ratio_from(g, &exact_distribution(circuit, 0)?, unflip_mask)
}
