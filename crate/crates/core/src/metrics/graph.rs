//! Strongly connected components of a directed graph (iterative Tarjan).

/// Component index of every node. Components are numbered in the order
/// Tarjan completes them (reverse topological order of the condensation).
pub fn strongly_connected_components(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut component = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_component = 0;
    // (node, position in its adjacency list)
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        frames.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut edge)) = frames.last_mut() {
            if let Some(&w) = adjacency[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    component[w] = next_component;
                    if w == v {
                        break;
                    }
                }
                next_component += 1;
            }
        }
    }
    component
}

/// Size of the component containing each node.
pub fn component_sizes(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
    let component = strongly_connected_components(n, adjacency);
    let mut counts = vec![0; n];
    for &c in &component {
        counts[c] += 1;
    }
    component.iter().map(|&c| counts[c]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reachability closure; nodes i and j share a component iff each reaches the other.
    fn oracle_sizes(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
            for &j in &adjacency[i] {
                row[j] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        (0..n)
            .map(|i| (0..n).filter(|&j| reach[i][j] && reach[j][i]).count())
            .collect()
    }

    #[test]
    fn fixed_shapes() {
        assert_eq!(component_sizes(2, &[vec![1], vec![]]), [1, 1]);
        assert_eq!(component_sizes(2, &[vec![1], vec![0]]), [2, 2]);
        assert_eq!(component_sizes(3, &[vec![1], vec![2], vec![0]]), [3, 3, 3]);
        assert_eq!(component_sizes(1, &[vec![0]]), [1]);
        assert!(component_sizes(0, &[]).is_empty());
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let n = 100_000;
        let mut adjacency: Vec<Vec<usize>> = (0..n).map(|i| vec![i + 1]).collect();
        adjacency[n - 1] = vec![0];
        assert!(component_sizes(n, &adjacency).iter().all(|&s| s == n));
    }

    proptest! {
        #[test]
        fn agrees_with_reachability_oracle(
            n in 1usize..=8,
            edges in proptest::collection::vec((0usize..8, 0usize..8), 0..24),
        ) {
            let mut adjacency = vec![Vec::new(); n];
            for (a, b) in edges {
                if a < n && b < n {
                    adjacency[a].push(b);
                }
            }
            prop_assert_eq!(component_sizes(n, &adjacency), oracle_sizes(n, &adjacency));
        }
    }
}
