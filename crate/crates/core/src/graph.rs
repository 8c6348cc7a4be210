//! Network topologies: generators, connectivity, coloring and the node-arc
//! incidence matrix.
//!
//! Nodes are indexed `0..P` internally. The edge-list text format is
//! 1-indexed.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Number of regeneration attempts for random models before giving up.
pub const CONNECTIVITY_ATTEMPTS: usize = 100;

const DENSITY_NUDGE: f64 = 1.05;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{model}: no connected graph after {attempts} attempts")]
    Disconnected { model: &'static str, attempts: usize },
    #[error("invalid edge {0}-{1}")]
    InvalidEdge(usize, usize),
    #[error("malformed edge list: {0}")]
    Parse(String),
}

/// Undirected simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from undirected edges. Orientation and order of the
    /// input do not matter; self-loops and duplicates are rejected.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == j || i >= node_count || j >= node_count {
                return Err(GraphError::InvalidEdge(i, j));
            }
            normalized.push((i.min(j), i.max(j)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::InvalidEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(i, j) in &normalized {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { adjacency, edges: normalized })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, sorted ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `p`.
    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adjacency[p]
    }

    pub fn degree(&self, p: usize) -> usize {
        self.adjacency[p].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency
            .get(i)
            .is_some_and(|list| list.binary_search(&j).is_ok())
    }

    /// Position of edge `{i, j}` in [`Graph::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self)
    }

    /// Writes the edge-list text format: `"P E"` then one 1-indexed `"i j"`
    /// pair per line, ascending.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.node_count(), self.edge_count());
        for &(i, j) in &self.edges {
            out.push_str(&format!("{} {}\n", i + 1, j + 1));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("empty input".into()))?;
        let (p, e) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(e);
        for line in lines {
            let (i, j) = parse_pair(line)?;
            if i == 0 || j == 0 {
                return Err(GraphError::Parse(format!("node index 0 in '{line}'")));
            }
            edges.push((i - 1, j - 1));
        }
        if edges.len() != e {
            return Err(GraphError::Parse(format!(
                "header declares {e} edges, found {}",
                edges.len()
            )));
        }
        Self::from_edges(p, &edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace().map(usize::from_str);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(GraphError::Parse(format!("expected two integers, got '{line}'"))),
    }
}

/// True iff the graph has a single connected component. A graph with no
/// nodes is considered disconnected.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(p) = queue.pop_front() {
        for &j in g.neighbors(p) {
            if !seen[j] {
                seen[j] = true;
                reached += 1;
                queue.push_back(j);
            }
        }
    }
    reached == n
}

fn check_probability(p: f64) -> Result<(), GraphError> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!("probability {p} not in (0, 1]")))
    }
}

/// Erdős–Rényi `G(P, p)`. Disconnected draws are regenerated with
/// `p <- min(1, 1.05 p)`.
pub fn gen_erdos_renyi(nodes: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if nodes < 2 {
        return Err(GraphError::InvalidParameter("need at least 2 nodes".into()));
    }
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prob = p;
    for _ in 0..CONNECTIVITY_ATTEMPTS {
        let mut edges = Vec::new();
        for i in 0..nodes {
            for j in i + 1..nodes {
                if rng.random::<f64>() < prob {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(nodes, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
        prob = (prob * DENSITY_NUDGE).min(1.0);
    }
    Err(GraphError::Disconnected { model: "erdos-renyi", attempts: CONNECTIVITY_ATTEMPTS })
}

/// Watts–Strogatz small world: a ring where every node is joined to its
/// `neighbors` nearest nodes (`neighbors / 2` per side), then every ring
/// edge is rewired with probability `p`. Rewiring keeps one endpoint (fair
/// coin) and reconnects it to a uniformly chosen node that is not itself and
/// not already a neighbor, so the edge count is preserved.
///
/// Disconnected draws are retried with a fresh seed and, after every failed
/// attempt, a rewiring probability shrunk by `1/1.05`.
pub fn gen_watts_strogatz(
    nodes: usize,
    neighbors: usize,
    p: f64,
    seed: u64,
) -> Result<Graph, GraphError> {
    if neighbors < 2 || neighbors % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "neighbor count {neighbors} must be even and >= 2"
        )));
    }
    if nodes <= neighbors {
        return Err(GraphError::InvalidParameter(format!(
            "need more than {neighbors} nodes, got {nodes}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!("probability {p} not in [0, 1]")));
    }
    let mut prob = p;
    for attempt in 0..CONNECTIVITY_ATTEMPTS as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let g = watts_strogatz_once(nodes, neighbors / 2, prob, &mut rng);
        if g.is_connected() {
            return Ok(g);
        }
        prob /= DENSITY_NUDGE;
    }
    Err(GraphError::Disconnected { model: "watts-strogatz", attempts: CONNECTIVITY_ATTEMPTS })
}

fn watts_strogatz_once(nodes: usize, half: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut ring = Vec::with_capacity(nodes * half);
    for i in 0..nodes {
        for k in 1..=half {
            let j = (i + k) % nodes;
            ring.push((i, j));
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    for &(i, j) in &ring {
        if rng.random::<f64>() >= p {
            continue;
        }
        let (keep, drop) = if rng.random::<bool>() { (i, j) } else { (j, i) };
        // Candidates exclude `keep` itself and its current neighbors; `drop`
        // is still a neighbor at this point.
        let candidates: Vec<usize> = (0..nodes)
            .filter(|&w| w != keep && !adjacency[keep].contains(&w))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let target = candidates[rng.random_range(0..candidates.len())];
        adjacency[keep].retain(|&w| w != drop);
        adjacency[drop].retain(|&w| w != keep);
        adjacency[keep].push(target);
        adjacency[target].push(keep);
    }
    let edges: Vec<(usize, usize)> = adjacency
        .iter()
        .enumerate()
        .flat_map(|(i, list)| list.iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
        .collect();
    Graph::from_edges(nodes, &edges).expect("rewiring keeps the graph simple")
}

/// Barabási–Albert preferential attachment with two links per arriving
/// node. Nodes 0 and 1 start joined by an edge; each later node attaches to
/// two distinct existing nodes sampled proportionally to degree.
pub fn gen_barabasi_albert(nodes: usize, seed: u64) -> Result<Graph, GraphError> {
    if nodes < 3 {
        return Err(GraphError::InvalidParameter("need at least 3 nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree = vec![0usize; nodes];
    let mut edges = vec![(0, 1)];
    degree[0] = 1;
    degree[1] = 1;
    for new in 2..nodes {
        let first = sample_by_degree(&degree[..new], None, &mut rng);
        let second = sample_by_degree(&degree[..new], Some(first), &mut rng);
        for target in [first, second] {
            edges.push((target, new));
            degree[target] += 1;
            degree[new] += 1;
        }
    }
    Graph::from_edges(nodes, &edges)
}

fn sample_by_degree(degree: &[usize], exclude: Option<usize>, rng: &mut ChaCha8Rng) -> usize {
    let weight = |p: usize| if Some(p) == exclude { 0 } else { degree[p] };
    let total: usize = (0..degree.len()).map(weight).sum();
    let mut ticket = rng.random_range(0..total);
    for p in 0..degree.len() {
        let w = weight(p);
        if ticket < w {
            return p;
        }
        ticket -= w;
    }
    unreachable!("ticket below total weight")
}

/// Random geometric graph on the unit square: an edge joins two points whose
/// Euclidean distance is strictly below `radius`. Disconnected draws are
/// regenerated with `radius <- 1.05 radius`.
pub fn gen_geometric(nodes: usize, radius: f64, seed: u64) -> Result<Graph, GraphError> {
    if nodes < 2 {
        return Err(GraphError::InvalidParameter("need at least 2 nodes".into()));
    }
    if !(radius > 0.0) {
        return Err(GraphError::InvalidParameter(format!("radius {radius} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = radius;
    for _ in 0..CONNECTIVITY_ATTEMPTS {
        let points: Vec<(f64, f64)> = (0..nodes).map(|_| (rng.random(), rng.random())).collect();
        let g = geometric_from_points(&points, d);
        if g.is_connected() {
            return Ok(g);
        }
        d *= DENSITY_NUDGE;
    }
    Err(GraphError::Disconnected { model: "geometric", attempts: CONNECTIVITY_ATTEMPTS })
}

/// Graph joining points closer than `radius`.
pub fn geometric_from_points(points: &[(f64, f64)], radius: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            if dx.hypot(dy) < radius {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(points.len(), &edges).expect("pairs are distinct")
}

/// Most-square factorization `rows * cols = nodes` with `rows <= cols`.
pub fn lattice_dims(nodes: usize) -> (usize, usize) {
    let mut rows = (nodes as f64).sqrt() as usize;
    while rows > 1 && nodes % rows != 0 {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, nodes / rows)
}

/// `m x n` grid graph with `m * n = nodes` as square as possible; node
/// `(r, c)` has index `r * n + c`.
pub fn gen_lattice(nodes: usize) -> Result<Graph, GraphError> {
    if nodes < 2 {
        return Err(GraphError::InvalidParameter("need at least 2 nodes".into()));
    }
    let (rows, cols) = lattice_dims(nodes);
    let mut edges = Vec::with_capacity(2 * nodes);
    for r in 0..rows {
        for c in 0..cols {
            let p = r * cols + c;
            if c + 1 < cols {
                edges.push((p, p + 1));
            }
            if r + 1 < rows {
                edges.push((p, p + cols));
            }
        }
    }
    Graph::from_edges(nodes, &edges)
}

/// Proper node coloring with classes indexed `0..C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Coloring {
    /// Builds a coloring from raw color labels, relabeling them to `0..C` in
    /// order of first appearance. Fails if the labels are not proper.
    pub fn from_colors(g: &Graph, raw: &[usize]) -> Result<Self, GraphError> {
        if raw.len() != g.node_count() {
            return Err(GraphError::InvalidParameter(format!(
                "{} colors for {} nodes",
                raw.len(),
                g.node_count()
            )));
        }
        if let Some(&(i, j)) = g.edges().iter().find(|&&(i, j)| raw[i] == raw[j]) {
            return Err(GraphError::InvalidEdge(i, j));
        }
        let mut relabel = std::collections::HashMap::new();
        let colors: Vec<usize> = raw
            .iter()
            .map(|c| {
                let next = relabel.len();
                *relabel.entry(*c).or_insert(next)
            })
            .collect();
        let mut classes = vec![Vec::new(); relabel.len()];
        for (p, &c) in colors.iter().enumerate() {
            classes[c].push(p);
        }
        Ok(Self { colors, classes })
    }

    pub fn color(&self, p: usize) -> usize {
        self.colors[p]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.classes.len()
    }

    /// Nodes of each color class, in class order.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Nodes listed class by class: the color-sorted ordering.
    pub fn order(&self) -> Vec<usize> {
        self.classes.iter().flatten().copied().collect()
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(i, j)| self.colors[i] != self.colors[j])
    }
}

/// Colors `g`. Bipartite graphs get an exact two-coloring by breadth-first
/// search; everything else is colored greedily in largest-degree-first
/// order (ties by index), each node taking the smallest color unused by its
/// neighbors.
pub fn greedy_color(g: &Graph) -> Coloring {
    if let Some(two) = two_color(g) {
        return Coloring::from_colors(g, &two).expect("bfs two-coloring is proper");
    }
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&p| (std::cmp::Reverse(g.degree(p)), p));
    let mut colors = vec![usize::MAX; n];
    let mut taken = vec![false; g.max_degree() + 2];
    for &p in &order {
        taken.iter_mut().for_each(|t| *t = false);
        for &j in g.neighbors(p) {
            if colors[j] != usize::MAX {
                taken[colors[j]] = true;
            }
        }
        colors[p] = taken.iter().position(|t| !t).expect("degree + 1 colors suffice");
    }
    let mut by_class: Vec<usize> = colors.clone();
    by_class.sort_unstable();
    by_class.dedup();
    // Keep class indices ordered by the greedy color value.
    let remap: Vec<usize> = colors
        .iter()
        .map(|c| by_class.binary_search(c).expect("present"))
        .collect();
    let mut classes = vec![Vec::new(); by_class.len()];
    for (p, &c) in remap.iter().enumerate() {
        classes[c].push(p);
    }
    Coloring { colors: remap, classes }
}

fn two_color(g: &Graph) -> Option<Vec<usize>> {
    let n = g.node_count();
    let mut side = vec![usize::MAX; n];
    for start in 0..n {
        if side[start] != usize::MAX {
            continue;
        }
        side[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for &j in g.neighbors(p) {
                if side[j] == usize::MAX {
                    side[j] = 1 - side[p];
                    queue.push_back(j);
                } else if side[j] == side[p] {
                    return None;
                }
            }
        }
    }
    if n > 0 && g.edge_count() == 0 {
        return None;
    }
    Some(side)
}

/// `P x E` node-arc incidence matrix: column `e` for edge `{i, j}` (`i < j`)
/// holds `+1` in row `i` and `-1` in row `j`. Columns follow [`Graph::edges`].
pub fn incidence_matrix(g: &Graph) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(g.node_count(), g.edge_count());
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        b[(i, e)] = 1.0;
        b[(j, e)] = -1.0;
    }
    b
}

/// Row sub-block of `B` for the given nodes, rows in the given order.
pub fn incidence_rows(b: &DMatrix<f64>, nodes: &[usize]) -> DMatrix<f64> {
    b.select_rows(nodes)
}

/// The seven network models used for benchmarking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetworkModel {
    ErdosRenyi { p: f64 },
    WattsStrogatz { neighbors: usize, p: f64 },
    BarabasiAlbert,
    Geometric { radius: f64 },
    Lattice,
}

impl NetworkModel {
    /// Benchmark network by number `1..=7`.
    pub fn numbered(number: usize) -> Option<Self> {
        Some(match number {
            1 => Self::ErdosRenyi { p: 0.25 },
            2 => Self::ErdosRenyi { p: 0.75 },
            3 => Self::WattsStrogatz { neighbors: 2, p: 0.8 },
            4 => Self::WattsStrogatz { neighbors: 4, p: 0.6 },
            5 => Self::BarabasiAlbert,
            6 => Self::Geometric { radius: 0.2 },
            7 => Self::Lattice,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ErdosRenyi { .. } => "erdos-renyi",
            Self::WattsStrogatz { .. } => "watts-strogatz",
            Self::BarabasiAlbert => "barabasi-albert",
            Self::Geometric { .. } => "geometric",
            Self::Lattice => "lattice",
        }
    }

    pub fn generate(&self, nodes: usize, seed: u64) -> Result<Graph, GraphError> {
        match *self {
            Self::ErdosRenyi { p } => gen_erdos_renyi(nodes, p, seed),
            Self::WattsStrogatz { neighbors, p } => gen_watts_strogatz(nodes, neighbors, p, seed),
            Self::BarabasiAlbert => gen_barabasi_albert(nodes, seed),
            Self::Geometric { radius } => gen_geometric(nodes, radius, seed),
            Self::Lattice => gen_lattice(nodes),
        }
    }
}

impl fmt::Display for NetworkModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ErdosRenyi { p } => write!(f, "erdos-renyi(p={p})"),
            Self::WattsStrogatz { neighbors, p } => write!(f, "watts-strogatz(n={neighbors},p={p})"),
            Self::BarabasiAlbert => write!(f, "barabasi-albert"),
            Self::Geometric { radius } => write!(f, "geometric(d={radius})"),
            Self::Lattice => write!(f, "lattice"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn chromatic_number(g: &Graph) -> usize {
        let n = g.node_count();
        for c in 1..=n {
            let total = c.pow(n as u32);
            for code in 0..total {
                let colors: Vec<usize> = (0..n).map(|p| code / c.pow(p as u32) % c).collect();
                if g.edges().iter().all(|&(i, j)| colors[i] != colors[j]) {
                    return c;
                }
            }
        }
        n
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn degrees_sum_to_twice_edges() {
        let g = gen_barabasi_albert(40, 3).unwrap();
        let total: usize = (0..g.node_count()).map(|p| g.degree(p)).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn erdos_renyi_full_probability() {
        let g = gen_erdos_renyi(2, 1.0, 9).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let g = gen_erdos_renyi(5, 1.0, 1).unwrap();
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn erdos_renyi_small_network_connected() {
        let g = gen_erdos_renyi(10, 0.27, 4).unwrap();
        assert!(g.is_connected());
        assert!(gen_erdos_renyi(1, 0.5, 0).is_err());
        assert!(gen_erdos_renyi(5, 0.0, 0).is_err());
    }

    #[test]
    fn watts_strogatz_without_rewiring_is_a_ring() {
        assert_eq!(gen_watts_strogatz(6, 2, 0.0, 1).unwrap(), cycle(6));
        let g = gen_watts_strogatz(4, 2, 0.0, 1).unwrap();
        assert_eq!(g, cycle(4));
        assert_eq!(greedy_color(&g).num_colors(), 2);
    }

    #[test]
    fn watts_strogatz_preserves_edge_count() {
        let g = gen_watts_strogatz(50, 4, 0.6, 11).unwrap();
        assert_eq!(g.edge_count(), 100);
        assert!(g.is_connected());
        assert!(gen_watts_strogatz(4, 4, 0.1, 0).is_err());
        assert!(gen_watts_strogatz(10, 3, 0.1, 0).is_err());
    }

    #[test]
    fn barabasi_albert_counts() {
        let g = gen_barabasi_albert(3, 5).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 2) && g.has_edge(1, 2));
        let g = gen_barabasi_albert(50, 5).unwrap();
        assert_eq!(g.edge_count(), 2 * 48 + 1);
        assert!(g.is_connected());
        let g = gen_barabasi_albert(200, 5).unwrap();
        assert!((g.average_degree() - 4.0).abs() < 0.1);
    }

    #[test]
    fn geometric_edge_cases() {
        let g = gen_geometric(2, 1.5, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(gen_geometric(10, 0.36, 2).unwrap().is_connected());
        assert!(matches!(
            gen_geometric(3, 1e-9, 0),
            Err(GraphError::Disconnected { .. })
        ));
    }

    #[test]
    fn geometric_distance_is_strict() {
        let g = geometric_from_points(&[(0.0, 0.0), (0.5, 0.0)], 0.5);
        assert_eq!(g.edge_count(), 0);
        let g = geometric_from_points(&[(0.0, 0.0), (0.5, 0.0)], 0.5000001);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn lattice_shapes() {
        assert_eq!(lattice_dims(10), (2, 5));
        let g = gen_lattice(10).unwrap();
        assert_eq!(g.edge_count(), 2 * 4 + 5);
        let square = gen_lattice(4).unwrap();
        assert_eq!(square.edge_count(), 4);
        assert!((0..4).all(|p| square.degree(p) == 2));
        assert_eq!(gen_lattice(7).unwrap(), path(7));
        assert_eq!(lattice_dims(50), (5, 10));
    }

    #[test]
    fn connectivity() {
        assert!(!Graph::from_edges(2, &[]).unwrap().is_connected());
        assert!(gen_lattice(12).unwrap().is_connected());
        // 4-cycle with node 3 isolated
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert!(!is_connected(&g));
    }

    #[test]
    fn coloring_counts() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(greedy_color(&star).num_colors(), 2);
        let triangle = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(chromatic_number(&triangle), 3);
        assert_eq!(greedy_color(&triangle).num_colors(), 3);
        for p in [4, 10, 12, 49, 50] {
            assert_eq!(greedy_color(&gen_lattice(p).unwrap()).num_colors(), 2);
        }
    }

    #[test]
    fn coloring_is_proper_and_bounded() {
        for seed in 0..5 {
            for g in [
                gen_erdos_renyi(30, 0.3, seed).unwrap(),
                gen_barabasi_albert(30, seed).unwrap(),
                gen_geometric(30, 0.3, seed).unwrap(),
                gen_watts_strogatz(30, 4, 0.5, seed).unwrap(),
            ] {
                let col = greedy_color(&g);
                assert!(col.is_proper(&g));
                assert!(col.num_colors() <= g.max_degree() + 1);
                assert!(col.classes().iter().all(|c| !c.is_empty()));
                let mut order = col.order();
                order.sort_unstable();
                assert_eq!(order, (0..30).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn incidence_of_path_and_triangle() {
        let b = incidence_matrix(&path(2));
        assert_eq!(b.as_slice(), &[1.0, -1.0]);
        let triangle = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let b = incidence_matrix(&triangle);
        let laplacian = &b * b.transpose();
        let expected = DMatrix::from_row_slice(3, 3, &[2., -1., -1., -1., 2., -1., -1., -1., 2.]);
        assert_eq!(laplacian, expected);
    }

    #[test]
    fn incidence_class_block_is_degree_diagonal() {
        let g = gen_lattice(4).unwrap();
        let b = incidence_matrix(&g);
        // 2x2 grid: nodes 0 and 3 are opposite corners.
        let bc = incidence_rows(&b, &[0, 3]);
        assert_eq!(&bc * bc.transpose(), DMatrix::from_diagonal_element(2, 2, 2.0));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_geometric(25, 0.4, 8).unwrap();
        let text = g.to_edge_list();
        let back = Graph::from_edge_list(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_edge_list(), text);
        assert!(gen_lattice(10).unwrap().to_edge_list().starts_with("10 13\n1 2\n"));
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(Graph::from_edge_list("").is_err());
        assert!(Graph::from_edge_list("3 2\n1 2\n").is_err());
        assert!(Graph::from_edge_list("3 1\n0 2\n").is_err());
        assert!(Graph::from_edge_list("3 1\n1 x\n").is_err());
    }
}
