use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected connectivity graph of physical qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CouplingJson", into = "CouplingJson")]
pub struct CouplingMap {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct CouplingJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<CouplingJson> for CouplingMap {
    type Error = Error;

    fn try_from(j: CouplingJson) -> Result<Self> {
        CouplingMap::new(j.n, j.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<CouplingMap> for CouplingJson {
    fn from(m: CouplingMap) -> Self {
        CouplingJson {
            n: m.n,
            edges: m.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

pub const PRESET_NAMES: [&str; 4] = ["line5", "t5", "ring7", "grid7"];

impl CouplingMap {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::CouplingMap("no physical qubits".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::CouplingMap(format!("self-loop on {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::CouplingMap(format!("edge ({a},{b}) outside {n} qubits")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs(&adjacency, s)).collect();
        if dist[0].contains(&usize::MAX) {
            return Err(Error::CouplingMap("graph is not connected".into()));
        }
        Ok(Self {
            n,
            edges: set,
            adjacency,
            dist,
        })
    }

    pub fn line(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("line is connected")
    }

    pub fn ring(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("ring is connected")
    }

    /// `line5`, `t5` (0-1, 1-2, 1-3, 3-4), `ring7`, and `grid7`, a 7-qubit
    /// H shape (0-1, 1-2, 1-3, 3-5, 4-5, 5-6).
    pub fn preset(name: &str) -> Option<Self> {
        let m = match name {
            "line5" => Self::line(5),
            "t5" => Self::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).ok()?,
            "ring7" => Self::ring(7),
            "grid7" => Self::new(7, [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]).ok()?,
            _ => return None,
        };
        Some(m)
    }

    pub fn num_physical_qubits(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.dist[a][b]
    }

    /// Lexicographically smallest among the shortest paths from `from` to `to`,
    /// both endpoints included.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let d = self.dist[cur][to];
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&nb| self.dist[nb][to] + 1 == d)
                .expect("connected graph has a next hop");
            path.push(cur);
        }
        path
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
