//! Exact maximum k-chain unions in a planar dominance order, via
//! node-capacitated min-cost flow with successive shortest augmenting paths.
//!
//! Points are given as y-ranks in x-order; a chain is a subsequence increasing
//! in both positions and ranks. The dominance DAG is sparsified with staircase
//! ("next dominating") edges plus zero-cost bypass arcs through every node,
//! which preserves all reachability. Each augmentation adds one chain, and
//! after j augmentations the covered set is a maximum j-chain union, so the
//! whole profile of maximal sizes comes out of a single run.
//!
//! Expected edge count for random inputs is O(n log n); adversarial inputs can
//! be denser.

const INF_COST: i64 = i64::MAX / 4;

/// Result of a k-chain flow run.
pub(crate) struct FlowOutcome {
    /// Per input index: covered by the extracted union.
    pub covered: Vec<bool>,
    /// Path decomposition: each part is an increasing chain (input indices,
    /// ascending). Parts may be fewer than k when the optimum needs fewer.
    pub parts: Vec<Vec<u32>>,
    /// `prefix_sizes[j]` = maximal size of a union of j chains, for j up to
    /// the number of augmentations performed.
    pub prefix_sizes: Vec<u64>,
}

struct Graph {
    head: Vec<u32>,
    next: Vec<u32>,
    to: Vec<u32>,
    cap: Vec<i32>,
    cost: Vec<i32>,
}

impl Graph {
    fn new(nodes: usize, arc_hint: usize) -> Self {
        Graph {
            head: vec![u32::MAX; nodes],
            next: Vec::with_capacity(arc_hint * 2),
            to: Vec::with_capacity(arc_hint * 2),
            cap: Vec::with_capacity(arc_hint * 2),
            cost: Vec::with_capacity(arc_hint * 2),
        }
    }

    fn add(&mut self, u: u32, v: u32, cap: i32, cost: i32) {
        for (a, b, c, w) in [(u, v, cap, cost), (v, u, 0, -cost)] {
            let id = self.to.len() as u32;
            self.to.push(b);
            self.cap.push(c);
            self.cost.push(w);
            self.next.push(self.head[a as usize]);
            self.head[a as usize] = id;
        }
    }
}

/// Staircase successors: for every i, the minimal j (in dominance order) with
/// larger position and larger rank. Any dominance pair is connected by a path
/// of staircase hops.
fn staircase_edges(ranks: &[u32]) -> Vec<(u32, u32)> {
    let n = ranks.len();
    if n == 0 {
        return Vec::new();
    }
    // Segment tree over rank positions; stores the minimal x-position seen,
    // u32::MAX when empty. Processing right-to-left, the minimal dominators of
    // i are the left-to-right position-minima when scanning ranks above
    // ranks[i] upwards.
    let mut size = 1usize;
    while size < n {
        size <<= 1;
    }
    let mut tree = vec![u32::MAX; 2 * size];
    let mut edges = Vec::new();

    for i in (0..n).rev() {
        let r = ranks[i] as usize;
        let mut lo = r + 1;
        let mut bound = u32::MAX;
        while let Some(pos) = first_below(&tree, size, lo, bound) {
            let j = tree[pos + size];
            edges.push((i as u32, j));
            bound = j;
            lo = pos + 1;
        }
        // insert i at leaf r (each rank occurs once)
        let mut node = r + size;
        tree[node] = i as u32;
        node >>= 1;
        while node >= 1 {
            tree[node] = tree[2 * node].min(tree[2 * node + 1]);
            if node == 1 {
                break;
            }
            node >>= 1;
        }
    }
    edges
}

/// First leaf position `>= lo` whose stored value is `< bound`.
fn first_below(tree: &[u32], size: usize, lo: usize, bound: u32) -> Option<usize> {
    if lo >= size {
        return None;
    }
    let mut node = lo + size;
    loop {
        if tree[node] < bound {
            break;
        }
        // advance to the next canonical subtree to the right
        loop {
            if node == 1 {
                return None;
            }
            if node & 1 == 0 {
                node += 1;
                break;
            }
            node >>= 1;
        }
    }
    // descend to the leftmost qualifying leaf
    while node < size {
        node <<= 1;
        if tree[node] >= bound {
            node += 1;
        }
    }
    Some(node - size)
}

/// Maximum union of up to `k` increasing chains over (position, rank) pairs.
pub(crate) fn max_k_chains(ranks: &[u32], k: usize) -> FlowOutcome {
    let n = ranks.len();
    if n == 0 || k == 0 {
        return FlowOutcome {
            covered: vec![false; n],
            parts: Vec::new(),
            prefix_sizes: vec![0],
        };
    }
    let edges = staircase_edges(ranks);
    let nodes = 2 * n + 2;
    let s = (2 * n) as u32;
    let t = (2 * n + 1) as u32;
    let in_of = |i: u32| 2 * i;
    let out_of = |i: u32| 2 * i + 1;
    let big = k.min(n) as i32;

    let mut g = Graph::new(nodes, edges.len() + 4 * n);
    for i in 0..n as u32 {
        g.add(s, in_of(i), 1, 0);
        g.add(in_of(i), out_of(i), 1, -1);
        g.add(in_of(i), out_of(i), big, 0);
        g.add(out_of(i), t, big, 0);
    }
    for &(i, j) in &edges {
        g.add(out_of(i), in_of(j), big, 0);
    }

    // Initial potentials by one topological relaxation: the graph is a DAG in
    // the order S, in(0), out(0), in(1), out(1), ..., T (staircase arcs only
    // go to larger positions).
    let mut pot = vec![INF_COST; nodes];
    pot[s as usize] = 0;
    let order: Vec<u32> = std::iter::once(s)
        .chain((0..n as u32).flat_map(|i| [in_of(i), out_of(i)]))
        .chain(std::iter::once(t))
        .collect();
    for &u in &order {
        if pot[u as usize] == INF_COST {
            continue;
        }
        let mut e = g.head[u as usize];
        while e != u32::MAX {
            if g.cap[e as usize] > 0 {
                let v = g.to[e as usize];
                let nd = pot[u as usize] + g.cost[e as usize] as i64;
                if nd < pot[v as usize] {
                    pot[v as usize] = nd;
                }
            }
            e = g.next[e as usize];
        }
    }

    let mut prefix_sizes = vec![0u64];
    let mut covered_total = 0u64;
    let mut dist = vec![INF_COST; nodes];
    let mut parent = vec![u32::MAX; nodes];
    let mut heap = std::collections::BinaryHeap::new();

    for _round in 0..k {
        dist.iter_mut().for_each(|d| *d = INF_COST);
        parent.iter_mut().for_each(|p| *p = u32::MAX);
        dist[s as usize] = 0;
        heap.clear();
        heap.push(std::cmp::Reverse((0i64, s)));
        while let Some(std::cmp::Reverse((du, u))) = heap.pop() {
            if du > dist[u as usize] {
                continue;
            }
            let mut e = g.head[u as usize];
            while e != u32::MAX {
                if g.cap[e as usize] > 0 {
                    let v = g.to[e as usize];
                    let rc = g.cost[e as usize] as i64 + pot[u as usize] - pot[v as usize];
                    debug_assert!(rc >= 0, "negative reduced cost");
                    let nd = du + rc;
                    if nd < dist[v as usize] {
                        dist[v as usize] = nd;
                        parent[v as usize] = e;
                        heap.push(std::cmp::Reverse((nd, v)));
                    }
                }
                e = g.next[e as usize];
            }
        }
        if dist[t as usize] == INF_COST {
            break;
        }
        let true_cost = dist[t as usize] + pot[t as usize] - pot[s as usize];
        if true_cost >= 0 {
            break;
        }
        // augment one unit along the parent arcs
        let mut v = t;
        while v != s {
            let e = parent[v as usize] as usize;
            g.cap[e] -= 1;
            g.cap[e ^ 1] += 1;
            v = g.to[e ^ 1];
        }
        covered_total += (-true_cost) as u64;
        prefix_sizes.push(covered_total);
        let dt = dist[t as usize];
        for (p, d) in pot.iter_mut().zip(dist.iter()) {
            *p += (*d).min(dt);
        }
    }

    // Covered points: each point contributes 8 arcs (4 edges, forward +
    // backward); the forward profit arc of i is arc id 8*i + 2.
    let mut covered = vec![false; n];
    for i in 0..n {
        let profit_arc = 8 * i + 2;
        covered[i] = g.cap[profit_arc] == 0;
    }

    // Path decomposition: walk flow-carrying arcs from S, consuming them.
    let mut flow_left: Vec<i32> = (0..g.to.len())
        .map(|e| if e % 2 == 0 { g.cap[e ^ 1] } else { 0 })
        .collect();
    let mut parts = Vec::new();
    loop {
        // find an S-arc with remaining flow
        let mut e = g.head[s as usize];
        let mut start = u32::MAX;
        while e != u32::MAX {
            if e % 2 == 0 && flow_left[e as usize] > 0 {
                start = e;
                break;
            }
            e = g.next[e as usize];
        }
        if start == u32::MAX {
            break;
        }
        let mut chain = Vec::new();
        let mut arc = start;
        loop {
            flow_left[arc as usize] -= 1;
            let v = g.to[arc as usize];
            if v == t {
                break;
            }
            // record a collected point when traversing its profit arc
            if v % 2 == 1 && arc as usize == 8 * (v as usize / 2) + 2 {
                chain.push(v / 2);
            }
            let u = v;
            let mut e = g.head[u as usize];
            arc = u32::MAX;
            while e != u32::MAX {
                if e % 2 == 0 && flow_left[e as usize] > 0 {
                    arc = e;
                    break;
                }
                e = g.next[e as usize];
            }
            debug_assert!(arc != u32::MAX, "flow conservation violated");
            if arc == u32::MAX {
                break;
            }
        }
        if !chain.is_empty() {
            parts.push(chain);
        }
    }

    FlowOutcome {
        covered,
        parts,
        prefix_sizes,
    }
}
