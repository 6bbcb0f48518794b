//! Small named graphs used throughout the tests and the CLI examples.

use crate::graph::{Graph, Multiplicity};

/// `u --a--> v`, `v --b--> v`.
pub fn e1() -> Graph {
    Graph::builder()
        .vertices(&["u", "v"])
        .edge("a", "u", "v")
        .edge("b", "v", "v")
        .build()
        .expect("valid fixture")
}

/// The two-cycle `p --c--> q --d--> p`.
pub fn f1() -> Graph {
    Graph::builder()
        .vertices(&["p", "q"])
        .edge("c", "p", "q")
        .edge("d", "q", "p")
        .build()
        .expect("valid fixture")
}

/// Two vertices with all four edges, adjacency matrix `[[1,1],[1,1]]`.
pub fn e2() -> Graph {
    Graph::builder()
        .vertices(&["1", "2"])
        .edge("a11", "1", "1")
        .edge("a12", "1", "2")
        .edge("a21", "2", "1")
        .edge("a22", "2", "2")
        .build()
        .expect("valid fixture")
}

/// Four vertices with adjacency matrix
/// `[[1,1,0,0],[1,1,1,0],[0,1,1,1],[0,0,1,1]]`.
pub fn e2m() -> Graph {
    let names = ["1", "2", "3", "4"];
    let adjacency = [[1, 1, 0, 0], [1, 1, 1, 0], [0, 1, 1, 1], [0, 0, 1, 1]];
    let mut b = Graph::builder().vertices(&names);
    for (i, row) in adjacency.iter().enumerate() {
        for (j, &k) in row.iter().enumerate() {
            if k > 0 {
                let id = format!("e{}{}", names[i], names[j]);
                b = b.edge(&id, names[i], names[j]);
            }
        }
    }
    b.build().expect("valid fixture")
}

/// A single vertex and no edges.
pub fn g0() -> Graph {
    Graph::builder().vertex("v").build().expect("valid fixture")
}

/// A single vertex with one loop `e`.
pub fn floop() -> Graph {
    Graph::builder().vertex("v").edge("e", "v", "v").build().expect("valid fixture")
}

/// `E1` with both edges replaced by infinitely many copies, classes `A` and `B`.
pub fn e1_amplified() -> Graph {
    Graph::builder()
        .vertices(&["u", "v"])
        .edges("A", Multiplicity::Infinite, "u", "v")
        .edges("B", Multiplicity::Infinite, "v", "v")
        .build()
        .expect("valid fixture")
}
