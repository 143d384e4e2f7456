//! Plain directed-graph helpers over vertex indices.

/// Strongly connected components (iterative Tarjan). Returns the component id of
/// every vertex and the number of components; ids are in reverse topological order.
pub fn scc(n: usize, adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
        }
    }
    (comp, ncomp)
}

/// Vertices that lie on a bi-infinite path: iteratively drop sources and sinks.
pub fn essential_vertices(n: usize, edges: &[(usize, usize)]) -> Vec<bool> {
    let mut alive = vec![true; n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        outdeg[a] += 1;
        indeg[b] += 1;
        out[a].push(b);
        inc[b].push(a);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0 || outdeg[v] == 0).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 && alive[w] {
                queue.push(w);
            }
        }
        for &u in &inc[v] {
            outdeg[u] -= 1;
            if outdeg[u] == 0 && alive[u] {
                queue.push(u);
            }
        }
    }
    alive
}

/// Greatest common divisor of cycle lengths inside one strongly connected vertex set.
pub fn period_of(members: &[usize], adj: &[Vec<usize>], comp: &[usize]) -> usize {
    let Some(&start) = members.first() else {
        return 0;
    };
    let c = comp[start];
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    let mut g = 0usize;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if comp[w] != c {
                continue;
            }
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                let d = (level[v] + 1).abs_diff(level[w]);
                g = num_integer::gcd(g, d);
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_on_two_cycles_joined_by_a_bridge() {
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let (comp, n) = scc(4, &adj);
        assert_eq!(n, 2);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[2], comp[3]);
        assert_ne!(comp[0], comp[2]);
    }

    #[test]
    fn trimming_removes_dangling_paths() {
        let alive = essential_vertices(4, &[(0, 0), (0, 1), (1, 2), (3, 0)]);
        assert_eq!(alive, vec![true, false, false, false]);
    }

    #[test]
    fn period_of_a_three_cycle_with_chord() {
        let adj = vec![vec![1], vec![2], vec![0]];
        let (comp, _) = scc(3, &adj);
        assert_eq!(period_of(&[0, 1, 2], &adj, &comp), 3);
        let adj = vec![vec![1], vec![2, 0], vec![0]];
        let (comp, _) = scc(3, &adj);
        assert_eq!(period_of(&[0, 1, 2], &adj, &comp), 1);
    }
}
