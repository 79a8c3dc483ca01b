//! Knowledge-base sources of adjustable size for the benchmarks.

/// `pigeons` pigeons into `holes` holes, each in exactly one hole and no two
/// sharing. Unsatisfiable when `pigeons > holes`.
pub fn pigeonhole(pigeons: usize, holes: usize) -> String {
    let ps: Vec<String> = (1..=pigeons).map(|i| format!("p{i}")).collect();
    let hs: Vec<String> = (1..=holes).map(|i| format!("h{i}")).collect();
    format!(
        "vocabulary V {{\n    type P\n    type H\n    in(P, H)\n}}\n\
         theory T : V {{\n    !p[P]: ?h[H]: in(p, h).\n    !p[P] q[P] h[H]: in(p, h) & in(q, h) => p = q.\n}}\n\
         structure S : V {{\n    P = {{ {} }}\n    H = {{ {} }}\n}}\n",
        ps.join("; "),
        hs.join("; ")
    )
}

/// Three-colouring of a cycle with `n` nodes.
pub fn cycle_colouring(n: usize) -> String {
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let edges: Vec<String> = (0..n).map(|i| format!("(n{i}, n{})", (i + 1) % n)).collect();
    format!(
        "vocabulary V {{\n    type Node\n    type Colour\n    edge(Node, Node)\n    col(Node, Colour)\n}}\n\
         theory T : V {{\n    !x: ?c: col(x, c).\n    !x c d: col(x, c) & col(x, d) => c = d.\n    \
         !x y c: edge(x, y) & col(x, c) => ~col(y, c).\n}}\n\
         structure S : V {{\n    Node = {{ {} }}\n    Colour = {{ red; green; blue }}\n    edge = {{ {} }}\n}}\n",
        nodes.join("; "),
        edges.join("; ")
    )
}

/// The flightless-bird example with `birds` extra birds that do fly.
pub fn penguin(birds: usize) -> String {
    let mut elems = vec!["penguin".to_string()];
    elems.extend((0..birds).map(|i| format!("b{i}")));
    let fliers: Vec<String> = elems[1..].to_vec();
    format!(
        "vocabulary V {{\n    type Animal\n    fly(Animal)\n}}\n\
         theory T : V {{\n    !x: fly(x).\n}}\n\
         structure S : V {{\n    Animal = {{ {} }}\n    fly = {{ {} }}\n}}\n",
        elems.join("; "),
        fliers.join("; ")
    )
}
