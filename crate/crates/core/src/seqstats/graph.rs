//! Succession graph over significant findings and its maximal simple chains.

use std::collections::BTreeSet;

use serde::Serialize;

use super::LsaFinding;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternEdge {
    pub given: String,
    pub target: String,
    pub z: f64,
}

/// Directed graph of significant successions. Nodes are every label that
/// appears in a significant finding; edges are the significant pairs with a
/// positive residual (excitatory successions). Chains are all maximal simple
/// paths, in lexicographic order; on a cycle a chain stops before its first
/// repeated node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<PatternEdge>,
    pub chains: Vec<Vec<String>>,
}

pub fn pattern_graph(findings: &[LsaFinding]) -> PatternGraph {
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut edges: Vec<PatternEdge> = Vec::new();
    for finding in findings.iter().filter(|f| f.significant) {
        nodes.insert(finding.given.clone());
        nodes.insert(finding.target.clone());
        let z = finding.z.expect("significant findings carry a residual");
        if z > 0.0 {
            edges.push(PatternEdge {
                given: finding.given.clone(),
                target: finding.target.clone(),
                z,
            });
        }
    }
    edges.sort_by(|a, b| (&a.given, &a.target).cmp(&(&b.given, &b.target)));
    edges.dedup_by(|a, b| a.given == b.given && a.target == b.target);

    let nodes: Vec<String> = nodes.into_iter().collect();
    let chains = maximal_chains(&nodes, &edges);
    PatternGraph {
        nodes,
        edges,
        chains,
    }
}

/// All simple paths that cannot be extended at either end without repeating
/// a node. Alphabets are small, so exhaustive search is fine.
fn maximal_chains(nodes: &[String], edges: &[PatternEdge]) -> Vec<Vec<String>> {
    let succ = |n: &str| -> Vec<&str> {
        edges
            .iter()
            .filter(|e| e.given == n)
            .map(|e| e.target.as_str())
            .collect()
    };
    let pred = |n: &str| -> Vec<&str> {
        edges
            .iter()
            .filter(|e| e.target == n)
            .map(|e| e.given.as_str())
            .collect()
    };

    let mut chains: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut stack: Vec<Vec<&str>> = nodes.iter().map(|n| vec![n.as_str()]).collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        let extensions: Vec<&str> = succ(last)
            .into_iter()
            .filter(|n| !path.contains(n))
            .collect();
        let backward_extensible = pred(path[0]).iter().any(|n| !path.contains(n));
        if extensions.is_empty() {
            if !backward_extensible {
                chains.insert(path.iter().map(|s| s.to_string()).collect());
            }
            continue;
        }
        for next in extensions {
            let mut longer = path.clone();
            longer.push(next);
            stack.push(longer);
        }
    }
    chains.into_iter().collect()
}
