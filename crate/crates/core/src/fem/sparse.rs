use std::collections::VecDeque;

use serde::Serialize;

use crate::{Error, Result};

/// Symmetric matrix with both triangles stored row-wise (CSR), columns
/// sorted within each row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSymmetric {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SparseSymmetric {
    /// Sums duplicate (row, col) entries in input order after a stable sort,
    /// so the result does not depend on how the triplets were produced as
    /// long as their order is fixed. Both (i, j) and (j, i) must be supplied.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(Error::Domain(format!("entry ({i}, {j}) outside dimension {n}")));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(triplets.len());
        let mut val: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *val.last_mut().expect("entry present") += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { n, row_ptr, col, val })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    /// All stored entries (row, col, value), both triangles.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col[r.clone()].binary_search(&j) {
            Ok(p) => self.val[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn sum(&self) -> f64 {
        self.val.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.entries().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    /// a·self + b·other on the union pattern.
    pub fn combine(&self, a: f64, other: &SparseSymmetric, b: f64) -> Result<SparseSymmetric> {
        if self.n != other.n {
            return Err(Error::Domain("dimension mismatch".into()));
        }
        let trip = self
            .entries()
            .map(|(i, j, v)| (i, j, a * v))
            .chain(other.entries().map(|(i, j, v)| (i, j, b * v)))
            .collect();
        SparseSymmetric::from_triplets(self.n, trip)
    }

    /// Principal submatrix on the sorted index list `keep`.
    pub fn submatrix(&self, keep: &[usize]) -> SparseSymmetric {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let (mut col, mut val) = (Vec::new(), Vec::new());
        for &old in keep {
            for (j, v) in self.row(old) {
                if map[j] != usize::MAX {
                    col.push(map[j]);
                    val.push(v);
                }
            }
            row_ptr.push(col.len());
        }
        SparseSymmetric { n: keep.len(), row_ptr, col, val }
    }
}

/// Fill-reducing order by recursive graph bisection: a BFS level structure
/// from a pseudo-peripheral node, with the balancing level (trimmed to nodes
/// touching the far side) as separator, numbered last.
pub fn nested_dissection(a: &SparseSymmetric) -> Vec<usize> {
    let n = a.dimension();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect()).collect();
    let mut part = vec![0u32; n];
    let mut next_id = 1u32;
    let mut level = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<(Vec<usize>, Option<Vec<usize>>)> = vec![((0..n).collect(), None)];
    // Each item is a node set; a separator rides along and is emitted after
    // both halves, which are pushed above it.
    while let Some((set, sep)) = stack.pop() {
        if let Some(sep) = sep {
            order.extend(sep);
            if set.is_empty() {
                continue;
            }
        }
        if set.len() <= 48 {
            order.extend(set);
            continue;
        }
        let id = next_id;
        next_id += 1;
        for &v in &set {
            part[v] = id;
        }
        let bfs = |root: usize, level: &mut Vec<usize>, part: &[u32]| -> Vec<usize> {
            let mut seen = vec![root];
            level[root] = 0;
            let mut q = VecDeque::from([root]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v] {
                    if part[w] == id && level[w] == usize::MAX {
                        level[w] = level[v] + 1;
                        seen.push(w);
                        q.push_back(w);
                    }
                }
            }
            seen
        };
        let reset = |seen: &[usize], level: &mut Vec<usize>| seen.iter().for_each(|&v| level[v] = usize::MAX);

        let mut seen = bfs(set[0], &mut level, &part);
        if seen.len() < set.len() {
            // Disconnected: peel off this component, keep the rest.
            reset(&seen, &mut level);
            let comp: std::collections::HashSet<usize> = seen.iter().copied().collect();
            let rest: Vec<usize> = set.iter().copied().filter(|v| !comp.contains(v)).collect();
            seen.sort_unstable();
            for &v in &set {
                part[v] = 0;
            }
            stack.push((rest, None));
            stack.push((seen, None));
            continue;
        }
        let mut root = *seen.last().expect("nonempty");
        let mut depth = 0;
        for _ in 0..3 {
            reset(&seen, &mut level);
            seen = bfs(root, &mut level, &part);
            let far = *seen.last().expect("nonempty");
            if level[far] <= depth {
                break;
            }
            depth = level[far];
            root = far;
        }
        reset(&seen, &mut level);
        seen = bfs(root, &mut level, &part);
        let max_level = level[*seen.last().expect("nonempty")];
        if max_level < 2 {
            reset(&seen, &mut level);
            order.extend(set);
            continue;
        }
        let mut counts = vec![0usize; max_level + 1];
        for &v in &seen {
            counts[level[v]] += 1;
        }
        let mut mid = 1;
        let mut below = counts[0];
        while mid < max_level - 1 && below + counts[mid] < set.len() / 2 {
            below += counts[mid];
            mid += 1;
        }
        let (mut lo, mut hi, mut separator) = (Vec::new(), Vec::new(), Vec::new());
        for &v in &set {
            let l = level[v];
            if l < mid {
                lo.push(v);
            } else if l > mid {
                hi.push(v);
            } else if adj[v].iter().any(|&w| part[w] == id && level[w] == mid + 1) {
                separator.push(v);
            } else {
                lo.push(v);
            }
        }
        reset(&seen, &mut level);
        for &v in &set {
            part[v] = 0;
        }
        stack.push((Vec::new(), Some(separator)));
        stack.push((hi, None));
        stack.push((lo, None));
    }
    order
}

/// Sparse Cholesky factor P A Pᵀ = L Lᵀ, computed row by row along the
/// elimination tree.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SparseSymmetric) -> Result<Self> {
        let perm = nested_dissection(a);
        Self::factor_with(a, perm)
    }

    pub fn factor_with(a: &SparseSymmetric, perm: Vec<usize>) -> Result<Self> {
        let n = a.dimension();
        let mut pinv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            pinv[p] = k;
        }
        // Upper triangle of C = P A Pᵀ by columns.
        let mut cp = vec![0usize; n + 1];
        for (i, j, _) in a.entries() {
            let (r, c) = (pinv[i], pinv[j]);
            if r <= c {
                cp[c + 1] += 1;
            }
        }
        for k in 0..n {
            cp[k + 1] += cp[k];
        }
        let mut fill = cp.clone();
        let mut ci = vec![0usize; cp[n]];
        let mut cx = vec![0.0; cp[n]];
        for (i, j, v) in a.entries() {
            let (r, c) = (pinv[i], pinv[j]);
            if r <= c {
                ci[fill[c]] = r;
                cx[fill[c]] = v;
                fill[c] += 1;
            }
        }

        let mut parent = vec![usize::MAX; n];
        let mut ancestor = vec![usize::MAX; n];
        for k in 0..n {
            for &r in &ci[cp[k]..cp[k + 1]] {
                let mut i = r;
                while i != usize::MAX && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == usize::MAX {
                        parent[i] = k;
                    }
                    i = next;
                }
            }
        }

        let mut mark = vec![usize::MAX; n];
        let mut stack = vec![0usize; n];
        let ereach = |k: usize, mark: &mut Vec<usize>, stack: &mut Vec<usize>| -> usize {
            let mut top = n;
            mark[k] = k;
            for &r in &ci[cp[k]..cp[k + 1]] {
                let mut len = 0;
                let mut i = r;
                while mark[i] != k {
                    stack[len] = i;
                    len += 1;
                    mark[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    stack[top] = stack[len];
                }
            }
            top
        };

        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(k, &mut mark, &mut stack);
            for &j in &stack[top..n] {
                counts[j] += 1;
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + counts[k];
        }
        let mut li = vec![0usize; lp[n]];
        let mut lx = vec![0.0; lp[n]];
        let mut next = lp[..n].to_vec();
        let mut x = vec![0.0; n];
        mark.iter_mut().for_each(|m| *m = usize::MAX);
        for k in 0..n {
            let top = ereach(k, &mut mark, &mut stack);
            for p in cp[k]..cp[k + 1] {
                x[ci[p]] = cx[p];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..n] {
                let lki = x[i] / lx[lp[i]];
                x[i] = 0.0;
                for p in lp[i] + 1..next[i] {
                    x[li[p]] -= lx[p] * lki;
                }
                d -= lki * lki;
                li[next[i]] = k;
                lx[next[i]] = lki;
                next[i] += 1;
            }
            if !(d > 0.0) {
                return Err(Error::Factorization(perm[k]));
            }
            li[next[k]] = k;
            lx[next[k]] = d.sqrt();
            next[k] += 1;
        }
        Ok(Self { n, perm, lp, li, lx })
    }

    pub fn nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            y[j] /= self.lx[self.lp[j]];
            let yj = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p]] -= self.lx[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let mut s = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                s -= self.lx[p] * y[self.li[p]];
            }
            y[j] = s / self.lx[self.lp[j]];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}
