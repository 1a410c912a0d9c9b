//! Finite posets, chains, and down/up-set classification.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    le: Vec<Vec<bool>>,
    below: Vec<Vec<usize>>,
    above: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
}

/// Topological type of a subset of a poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetKind {
    /// Both a down-set and an up-set.
    Clopen,
    /// Down-set.
    Open,
    /// Up-set.
    Closed,
    Neither,
}

impl Poset {
    /// Builds the poset generated by the relations `a ≤ b` (reflexive-transitive closure).
    pub fn from_relations(names: Vec<String>, rels: &[(usize, usize)]) -> Result<Poset> {
        let n = names.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in rels {
            if a >= n || b >= n {
                return Err(Error::Precondition(format!("relation ({a},{b}) out of range")));
            }
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                if le[i][j] && le[j][i] {
                    return Err(Error::Precondition(format!(
                        "relation is not antisymmetric: {} and {}",
                        names[i], names[j]
                    )));
                }
            }
        }
        Ok(Poset::from_matrix(names, le))
    }

    /// Builds from a full order matrix `le[s][t] = s ≤ t` (assumed a partial order).
    pub fn from_matrix(names: Vec<String>, le: Vec<Vec<bool>>) -> Poset {
        let n = names.len();
        let mut below = vec![Vec::new(); n];
        let mut above = vec![Vec::new(); n];
        for s in 0..n {
            for t in 0..n {
                if s != t && le[s][t] {
                    above[s].push(t);
                    below[t].push(s);
                }
            }
        }
        let mut upper_covers = vec![Vec::new(); n];
        for s in 0..n {
            for &t in &above[s] {
                if !above[s].iter().any(|&u| u != t && le[u][t]) {
                    upper_covers[s].push(t);
                }
            }
        }
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Poset { names, index, le, below, above, upper_covers }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn le(&self, s: usize, t: usize) -> bool {
        self.le[s][t]
    }

    pub fn lt(&self, s: usize, t: usize) -> bool {
        s != t && self.le[s][t]
    }

    /// Elements strictly below `t`.
    pub fn below(&self, t: usize) -> &[usize] {
        &self.below[t]
    }

    /// Elements strictly above `s`.
    pub fn above(&self, s: usize) -> &[usize] {
        &self.above[s]
    }

    /// Covering relations `s ⋖ t`.
    pub fn upper_covers(&self, s: usize) -> &[usize] {
        &self.upper_covers[s]
    }

    /// The down-set `{t : t ≤ s}`.
    pub fn down_set(&self, s: usize) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.le[t][s]).collect()
    }

    /// The up-set `{t : t ≥ s}`.
    pub fn up_set(&self, s: usize) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.le[s][t]).collect()
    }

    pub fn mask(&self, set: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &s in set {
            m[s] = true;
        }
        m
    }

    pub fn is_down_set(&self, set: &[usize]) -> bool {
        let m = self.mask(set);
        set.iter().all(|&s| self.below[s].iter().all(|&t| m[t]))
    }

    pub fn is_up_set(&self, set: &[usize]) -> bool {
        let m = self.mask(set);
        set.iter().all(|&s| self.above[s].iter().all(|&t| m[t]))
    }

    pub fn classify(&self, set: &[usize]) -> SubsetKind {
        match (self.is_down_set(set), self.is_up_set(set)) {
            (true, true) => SubsetKind::Clopen,
            (true, false) => SubsetKind::Open,
            (false, true) => SubsetKind::Closed,
            (false, false) => SubsetKind::Neither,
        }
    }

    pub fn complement(&self, set: &[usize]) -> Vec<usize> {
        let m = self.mask(set);
        (0..self.len()).filter(|&s| !m[s]).collect()
    }

    /// Induced subposet on `set` (kept in the given order).
    pub fn induced(&self, set: &[usize]) -> Poset {
        let names = set.iter().map(|&s| self.names[s].clone()).collect();
        let le = set.iter().map(|&a| set.iter().map(|&b| self.le[a][b]).collect()).collect();
        Poset::from_matrix(names, le)
    }

    /// All strictly increasing chains `p0 < … < pk` inside `mask`, grouped by `k`.
    pub fn chains(&self, mask: &[bool]) -> Vec<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        fn rec(p: &Poset, mask: &[bool], stack: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
            let k = stack.len() - 1;
            if out.len() <= k {
                out.push(Vec::new());
            }
            out[k].push(stack.clone());
            let last = *stack.last().unwrap();
            for &t in p.above(last) {
                if mask[t] {
                    stack.push(t);
                    rec(p, mask, stack, out);
                    stack.pop();
                }
            }
        }
        for s in 0..self.len() {
            if mask[s] {
                stack.push(s);
                rec(self, mask, &mut stack, &mut out);
                stack.pop();
            }
        }
        out
    }

    /// Length of the longest chain (number of elements minus one).
    pub fn height(&self) -> usize {
        let all = vec![true; self.len()];
        self.chains(&all).len().saturating_sub(1)
    }

    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|s| self.le[s][m]))
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|s| self.le[m][s]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn closure_and_covers() {
        let p = Poset::from_relations(names(3), &[(0, 1), (1, 2)]).unwrap();
        assert!(p.le(0, 2));
        assert_eq!(p.upper_covers(0), &[1]);
        assert_eq!(p.height(), 2);
        assert_eq!(p.maximum(), Some(2));
    }

    #[test]
    fn cycles_rejected() {
        assert!(Poset::from_relations(names(2), &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn chain_counts() {
        let p = Poset::from_relations(names(3), &[(1, 0), (1, 2)]).unwrap();
        let all = vec![true; 3];
        let ch = p.chains(&all);
        assert_eq!(ch[0].len(), 3);
        assert_eq!(ch[1].len(), 2);
        assert_eq!(ch.len(), 2);
    }
}
