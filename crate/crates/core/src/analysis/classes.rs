use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::instance::Instance;
use crate::numerics::XReal;

/// Walk bound between two pairs of one class, read off a fixed return
/// path `to -> ... -> from`: any walk `from -> to` closes into a cycle with
/// it, so on a cyclically monotone set its alpha-sum is at most
/// `-sum(return_path)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassCertificate {
    pub from: usize,
    pub to: usize,
    pub return_path: Vec<usize>,
    pub bound: XReal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceClasses {
    /// Classes as sorted index lists, ordered by smallest member.
    pub classes: Vec<Vec<usize>>,
    #[serde(skip)]
    pub class_of: Vec<usize>,
    /// Edges `a -> b` between distinct classes of the condensed graph.
    pub condensation: Vec<(usize, usize)>,
    pub certificates: Vec<ClassCertificate>,
}

impl EquivalenceClasses {
    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    pub fn certificate(&self, from: usize, to: usize) -> Option<&ClassCertificate> {
        self.certificates.iter().find(|c| c.from == from && c.to == to)
    }
}

/// Mutual reachability classes of the graph with an edge `i -> j` whenever
/// `c(x_j, y_i) < +inf`, with a bound certificate for every ordered pair
/// inside a class.
pub fn equivalence_classes(inst: &Instance) -> EquivalenceClasses {
    let n = inst.len();
    let mut graph = DiGraph::<usize, ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && inst.has_edge(i, j) {
                graph.add_edge(nodes[i], nodes[j], ());
                adjacency[i].push(j);
            }
        }
    }

    let mut classes: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| {
            let mut members: Vec<usize> = scc.into_iter().map(|v| graph[v]).collect();
            members.sort_unstable();
            members
        })
        .collect();
    classes.sort_unstable_by_key(|c| c[0]);
    let mut class_of = vec![0; n];
    for (k, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = k;
        }
    }

    let condensation: BTreeSet<(usize, usize)> = (0..n)
        .flat_map(|i| adjacency[i].iter().map(move |&j| (i, j)))
        .map(|(i, j)| (class_of[i], class_of[j]))
        .filter(|(a, b)| a != b)
        .collect();

    let mut certificates = Vec::new();
    for members in &classes {
        for &to in members {
            let parents = bfs_parents(&adjacency, to, &class_of);
            for &from in members {
                let mut path = vec![from];
                let mut cur = from;
                while cur != to {
                    cur = parents[cur].expect("class members are mutually reachable");
                    path.push(cur);
                }
                path.reverse();
                let bound = -inst.walk_sum(&path);
                certificates.push(ClassCertificate {
                    from,
                    to,
                    return_path: path,
                    bound,
                });
            }
        }
    }
    certificates.sort_unstable_by_key(|c| (c.from, c.to));

    EquivalenceClasses {
        classes,
        class_of,
        condensation: condensation.into_iter().collect(),
        certificates,
    }
}

/// Breadth-first tree from `root` restricted to its class; neighbors are
/// visited in index order so the tree is deterministic.
fn bfs_parents(adjacency: &[Vec<usize>], root: usize, class_of: &[usize]) -> Vec<Option<usize>> {
    let mut parent = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] && class_of[v] == class_of[root] {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    parent
}
