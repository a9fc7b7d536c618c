//! Decomposition of integer arc flows into source-sink paths and cycles.

use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub units: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    /// Unit paths from the source to the sink, as arc ids.
    pub paths: Vec<Vec<usize>>,
    /// Unit cycles left over (or split off paths), as arc ids.
    pub cycles: Vec<Vec<usize>>,
    /// Units that could not be routed because flow was not conserved.
    pub stranded: usize,
}

/// Walks unit flow from `source`, always taking the lowest-id arc with
/// remaining flow. A walk that revisits a node splits the loop off as a
/// cycle. Flow left after all paths are extracted is split into cycles.
pub fn decompose(num_nodes: usize, arcs: &[FlowArc], source: usize, sink: usize) -> Decomposition {
    let mut rem: Vec<usize> = arcs.iter().map(|a| a.units).collect();
    let mut out = vec![Vec::new(); num_nodes];
    for (k, a) in arcs.iter().enumerate() {
        if a.units > 0 {
            out[a.from].push(k);
        }
    }
    let next = |rem: &[usize], v: usize| out[v].iter().copied().find(|&k| rem[k] > 0);
    let mut dec = Decomposition::default();

    // paths from the source
    while next(&rem, source).is_some() {
        let mut nodes = vec![source];
        let mut walk: Vec<usize> = Vec::new();
        let mut pos: HashMap<usize, usize> = HashMap::from([(source, 0)]);
        let mut v = source;
        loop {
            if v == sink {
                for &k in &walk {
                    rem[k] -= 1;
                }
                dec.paths.push(walk);
                break;
            }
            let Some(k) = next(&rem, v) else {
                // conservation violated: drop the partial walk
                dec.stranded += 1;
                if let Some(&k0) = walk.first().or(out[source].iter().find(|&&k| rem[k] > 0)) {
                    rem[k0] -= 1;
                }
                break;
            };
            let w = arcs[k].to;
            if let Some(&i) = pos.get(&w) {
                let mut cycle: Vec<usize> = walk.drain(i..).collect();
                cycle.push(k);
                for &c in &cycle {
                    rem[c] -= 1;
                }
                for x in nodes.drain(i + 1..) {
                    pos.remove(&x);
                }
                dec.cycles.push(cycle);
                v = w;
            } else {
                walk.push(k);
                nodes.push(w);
                pos.insert(w, nodes.len() - 1);
                v = w;
            }
        }
    }

    // residual circulation
    while let Some(k0) = (0..arcs.len()).find(|&k| rem[k] > 0) {
        let start = arcs[k0].from;
        let mut nodes = vec![start];
        let mut walk: Vec<usize> = Vec::new();
        let mut pos: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        let mut v = start;
        loop {
            let Some(k) = next(&rem, v) else {
                dec.stranded += 1;
                rem[k0] -= 1;
                break;
            };
            let w = arcs[k].to;
            if let Some(&i) = pos.get(&w) {
                let mut cycle: Vec<usize> = walk.drain(i..).collect();
                cycle.push(k);
                for &c in &cycle {
                    rem[c] -= 1;
                }
                dec.cycles.push(cycle);
                break;
            }
            walk.push(k);
            nodes.push(w);
            pos.insert(w, nodes.len() - 1);
            v = w;
        }
    }
    dec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(from: usize, to: usize, units: usize) -> FlowArc {
        FlowArc { from, to, units }
    }

    #[test]
    fn two_parallel_paths() {
        // 0 -> 1 -> 3 and 0 -> 2 -> 3
        let arcs = [arc(0, 1, 1), arc(0, 2, 1), arc(1, 3, 1), arc(2, 3, 1)];
        let d = decompose(4, &arcs, 0, 3);
        assert_eq!(d.paths, vec![vec![0, 2], vec![1, 3]]);
        assert!(d.cycles.is_empty());
    }

    #[test]
    fn shared_arc_with_two_units() {
        let arcs = [
            arc(0, 1, 2),
            arc(1, 2, 2),
            arc(2, 3, 1),
            arc(2, 4, 1),
            arc(3, 5, 1),
            arc(4, 5, 1),
        ];
        let d = decompose(6, &arcs, 0, 5);
        assert_eq!(d.paths, vec![vec![0, 1, 2, 4], vec![0, 1, 3, 5]]);
    }

    #[test]
    fn detached_cycle_is_residual() {
        let arcs = [arc(0, 1, 1), arc(1, 4, 1), arc(2, 3, 1), arc(3, 2, 1)];
        let d = decompose(5, &arcs, 0, 4);
        assert_eq!(d.paths, vec![vec![0, 1]]);
        assert_eq!(d.cycles, vec![vec![2, 3]]);
        assert_eq!(d.stranded, 0);
    }

    #[test]
    fn loop_on_path_is_split_off() {
        // 0 -> 1 -> 2 -> 1 -> 3, with the 1 -> 2 arc taken first
        let arcs = [arc(0, 1, 1), arc(1, 2, 1), arc(2, 1, 1), arc(1, 3, 1)];
        let d = decompose(4, &arcs, 0, 3);
        assert_eq!(d.paths, vec![vec![0, 3]]);
        assert_eq!(d.cycles, vec![vec![1, 2]]);
    }

    #[test]
    fn empty_flow() {
        let d = decompose(2, &[arc(0, 1, 0)], 0, 1);
        assert_eq!(d, Decomposition::default());
    }
}
