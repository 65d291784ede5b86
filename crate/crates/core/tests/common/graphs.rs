use nestab_core::graph::Graph;

/// Zachary's karate club, 34 members and 78 friendships.
pub fn karate() -> Graph {
    let adj: &[(usize, &[usize])] = &[
        (0, &[1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 17, 19, 21, 31]),
        (1, &[2, 3, 7, 13, 17, 19, 21, 30]),
        (2, &[3, 7, 8, 9, 13, 27, 28, 32]),
        (3, &[7, 12, 13]),
        (4, &[6, 10]),
        (5, &[6, 10, 16]),
        (6, &[16]),
        (8, &[30, 32, 33]),
        (9, &[33]),
        (13, &[33]),
        (14, &[32, 33]),
        (15, &[32, 33]),
        (18, &[32, 33]),
        (19, &[33]),
        (20, &[32, 33]),
        (22, &[32, 33]),
        (23, &[25, 27, 29, 32, 33]),
        (24, &[25, 27, 31]),
        (25, &[31]),
        (26, &[29, 33]),
        (27, &[33]),
        (28, &[31, 33]),
        (29, &[32, 33]),
        (30, &[32, 33]),
        (31, &[32, 33]),
        (32, &[33]),
    ];
    let edges: Vec<(usize, usize)> = adj.iter().flat_map(|&(u, vs)| vs.iter().map(move |&v| (u, v))).collect();
    Graph::from_edges(34, false, &edges)
}

/// Disjoint cliques of the given sizes, numbered consecutively.
pub fn cliques(sizes: &[usize]) -> Graph {
    let mut edges = Vec::new();
    let mut base = 0;
    for &s in sizes {
        for i in 0..s {
            for j in i + 1..s {
                edges.push((base + i, base + j));
            }
        }
        base += s;
    }
    Graph::from_edges(base, false, &edges)
}

/// Two `k`-cliques joined by one edge between node `k - 1` and node `k`.
pub fn barbell(k: usize) -> Graph {
    let g = cliques(&[k, k]);
    let mut edges: Vec<(usize, usize)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    edges.push((k - 1, k));
    Graph::from_edges(2 * k, false, &edges)
}
