const LEAF: usize = 64;

enum Task {
    Split(Vec<usize>),
    Emit(Vec<usize>),
}

struct Bfs {
    mark: Vec<u32>,
    stamp: u32,
    level: Vec<usize>,
    seen: Vec<u32>,
    seen_stamp: u32,
}

impl Bfs {
    fn new(n: usize) -> Self {
        Bfs { mark: vec![0; n], stamp: 0, level: vec![0; n], seen: vec![0; n], seen_stamp: 0 }
    }

    fn select(&mut self, nodes: &[usize]) {
        self.stamp += 1;
        for &v in nodes {
            self.mark[v] = self.stamp;
        }
    }

    /// Level structure rooted at `root` inside the selected set.
    fn levels(&mut self, xadj: &[usize], adj: &[usize], root: usize) -> Vec<Vec<usize>> {
        self.seen_stamp += 1;
        let s = self.seen_stamp;
        let mut out = vec![vec![root]];
        self.seen[root] = s;
        self.level[root] = 0;
        loop {
            let mut next = Vec::new();
            for &v in out.last().unwrap() {
                for &w in &adj[xadj[v]..xadj[v + 1]] {
                    if self.mark[w] == self.stamp && self.seen[w] != s {
                        self.seen[w] = s;
                        self.level[w] = out.len();
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return out;
            }
            out.push(next);
        }
    }
}

/// Fill-reducing elimination order by recursive level-structure bisection.
/// Returns `perm` with `perm[k]` the original index eliminated k-th.
pub fn nested_dissection(xadj: &[usize], adj: &[usize]) -> Vec<usize> {
    let n = xadj.len() - 1;
    let mut order = Vec::with_capacity(n);
    let mut bfs = Bfs::new(n);
    let mut stack = vec![Task::Split((0..n).collect())];
    while let Some(task) = stack.pop() {
        let nodes = match task {
            Task::Emit(v) => {
                order.extend(v);
                continue;
            }
            Task::Split(v) => v,
        };
        if nodes.len() <= LEAF {
            order.extend(nodes);
            continue;
        }
        bfs.select(&nodes);
        let lv = bfs.levels(xadj, adj, nodes[0]);
        let reached: usize = lv.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            let comp: Vec<usize> = lv.into_iter().flatten().collect();
            let s = bfs.seen_stamp;
            let rest: Vec<usize> = nodes.iter().copied().filter(|&v| bfs.seen[v] != s).collect();
            stack.push(Task::Split(rest));
            stack.push(Task::Split(comp));
            continue;
        }
        // pseudo-peripheral root
        let mut lv = lv;
        for _ in 0..4 {
            let last = lv.last().unwrap();
            let cand = *last
                .iter()
                .min_by_key(|&&v| adj[xadj[v]..xadj[v + 1]].iter().filter(|&&w| bfs.mark[w] == bfs.stamp).count())
                .unwrap();
            let trial = bfs.levels(xadj, adj, cand);
            let better = trial.len() > lv.len();
            lv = trial;
            if !better {
                break;
            }
        }
        if lv.len() < 3 {
            order.extend(nodes);
            continue;
        }
        let half = nodes.len() / 2;
        let mut acc = 0;
        let mut cut = 1;
        for (k, l) in lv.iter().enumerate() {
            acc += l.len();
            if acc >= half {
                cut = k.clamp(1, lv.len() - 2);
                break;
            }
        }
        let mut lower: Vec<usize> = lv[..cut].iter().flatten().copied().collect();
        let upper: Vec<usize> = lv[cut + 1..].iter().flatten().copied().collect();
        let mut sep = Vec::new();
        for &v in &lv[cut] {
            let touches_upper = adj[xadj[v]..xadj[v + 1]]
                .iter()
                .any(|&w| bfs.mark[w] == bfs.stamp && bfs.level[w] == cut + 1);
            if touches_upper {
                sep.push(v);
            } else {
                lower.push(v);
            }
        }
        stack.push(Task::Emit(sep));
        stack.push(Task::Split(upper));
        stack.push(Task::Split(lower));
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_of_grid() {
        let s = 20;
        let n = s * s;
        let mut nb: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..s {
            for y in 0..s {
                let v = x * s + y;
                if x + 1 < s {
                    nb[v].push(v + s);
                    nb[v + s].push(v);
                }
                if y + 1 < s {
                    nb[v].push(v + 1);
                    nb[v + 1].push(v);
                }
            }
        }
        let mut xadj = vec![0];
        let mut adj = Vec::new();
        for l in nb {
            adj.extend(l);
            xadj.push(adj.len());
        }
        let mut p = nested_dissection(&xadj, &adj);
        p.sort_unstable();
        assert_eq!(p, (0..n).collect::<Vec<_>>());
    }
}
