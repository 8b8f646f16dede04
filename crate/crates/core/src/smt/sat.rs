//! Conflict-driven clause learning over two watched literals.
//!
//! Decisions take the first unassigned variable, with its last assigned polarity
//! (initially false). There are no restarts and no clause deletion, so a run is fully
//! determined by the clauses added.

use std::ops::Not;

use crate::limits::{Budget, QeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Lit {
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Default)]
pub struct SatSolver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    phase: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    inconsistent: bool,
    pub conflicts: u64,
    pub decisions: u64,
}

impl SatSolver {
    pub fn new() -> SatSolver {
        SatSolver::default()
    }

    pub fn new_var(&mut self) -> u32 {
        let v = self.assign.len() as u32;
        self.assign.push(None);
        self.level.push(0);
        self.reason.push(None);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        v
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    fn value(&self, l: Lit) -> Option<bool> {
        self.assign[l.var() as usize].map(|b| b == l.is_positive())
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        debug_assert!(self.assign[v].is_none());
        self.assign[v] = Some(l.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for l in self.trail.drain(start..) {
            let v = l.var() as usize;
            self.phase[v] = l.is_positive();
            self.assign[v] = None;
            self.reason[v] = None;
        }
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    /// Adds a clause permanently. Clears any current assignment.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        if self.inconsistent {
            return;
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.value(l) {
                Some(true) => return,
                Some(false) => {}
                None => {
                    if c.contains(&!l) {
                        return;
                    }
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        match c.len() {
            0 => self.inconsistent = true,
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
            }
            _ => {
                self.attach(c);
            }
        }
    }

    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let id = self.clauses.len();
        self.watches[c[0].index()].push(id);
        self.watches[c[1].index()].push(id);
        self.clauses.push(c);
        id
    }

    /// Unit propagation; returns a falsified clause on conflict.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let watching = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = None;
            let mut iter = watching.into_iter();
            for ci in iter.by_ref() {
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.assign[first.var() as usize].map(|b| b == first.is_positive()) == Some(true) {
                    keep.push(ci);
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    if self.assign[l.var() as usize].map(|b| b == l.is_positive()) != Some(false) {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[new_watch.index()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(ci);
                match self.value(first) {
                    Some(false) => {
                        conflict = Some(ci);
                        break;
                    }
                    _ => self.enqueue(first, Some(ci)),
                }
            }
            keep.extend(iter);
            self.watches[false_lit.index()].extend(keep);
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first) and the
    /// backjump level.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut clause = conflict;
        let mut implied: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let start = usize::from(implied.is_some());
            for k in start..self.clauses[clause].len() {
                let q = self.clauses[clause][k];
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] == self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var() as usize] = false;
            pending -= 1;
            implied = Some(p);
            if pending == 0 {
                break;
            }
            clause = self.reason[p.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !implied.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let (pos, lvl) = learnt[1..]
                .iter()
                .enumerate()
                .map(|(i, l)| (i + 1, self.level[l.var() as usize]))
                .max_by_key(|&(_, lvl)| lvl)
                .unwrap();
            learnt.swap(1, pos);
            back = lvl;
        }
        (learnt, back)
    }

    /// Finds a total assignment satisfying every clause and every assumption, or `None`
    /// if none exists. Assumptions are decided first, one per decision level.
    pub fn solve(&mut self, budget: &Budget, assumptions: &[Lit]) -> Result<Option<Vec<bool>>, QeError> {
        if self.inconsistent {
            return Ok(None);
        }
        self.cancel_until(0);
        let mut steps = 0u64;
        let mut cursor = 0usize;
        loop {
            steps += 1;
            if steps.is_multiple_of(256) {
                budget.check_time()?;
            }
            if let Some(conflict) = self.propagate() {
                self.conflicts += 1;
                if self.decision_level() == 0 {
                    self.inconsistent = true;
                    return Ok(None);
                }
                let (learnt, back) = self.analyze(conflict);
                self.cancel_until(back);
                cursor = 0;
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let id = self.attach(learnt);
                    self.enqueue(first, Some(id));
                }
                continue;
            }
            let level = self.decision_level() as usize;
            if level < assumptions.len() {
                let a = assumptions[level];
                match self.value(a) {
                    Some(false) => return Ok(None),
                    Some(true) => self.trail_lim.push(self.trail.len()),
                    None => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(a, None);
                    }
                }
                continue;
            }
            while cursor < self.assign.len() && self.assign[cursor].is_some() {
                cursor += 1;
            }
            if cursor == self.assign.len() {
                return Ok(Some(self.assign.iter().map(|a| a.unwrap()).collect()));
            }
            self.decisions += 1;
            self.trail_lim.push(self.trail.len());
            let l = Lit::new(cursor as u32, self.phase[cursor]);
            self.enqueue(l, None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(s: &[i32]) -> Vec<Lit> {
        s.iter().map(|&x| Lit::new(x.unsigned_abs() - 1, x > 0)).collect()
    }

    fn solver(n: usize, clauses: &[&[i32]]) -> SatSolver {
        let mut s = SatSolver::new();
        for _ in 0..n {
            s.new_var();
        }
        for c in clauses {
            s.add_clause(&lits(c));
        }
        s
    }

    fn satisfies(model: &[bool], clauses: &[&[i32]]) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|&x| model[(x.unsigned_abs() - 1) as usize] == (x > 0)))
    }

    #[test]
    fn simple_sat() {
        let cs: &[&[i32]] = &[&[1, 2], &[-1, 3], &[-3, -2], &[2, 3]];
        let mut s = solver(3, cs);
        let m = s.solve(&Budget::unlimited(), &[]).unwrap().unwrap();
        assert!(satisfies(&m, cs));
    }

    #[test]
    fn pigeonhole_unsat() {
        // 3 pigeons, 2 holes; var p*2+h+1
        let mut cs: Vec<Vec<i32>> = Vec::new();
        for p in 0..3 {
            cs.push(vec![p * 2 + 1, p * 2 + 2]);
        }
        for h in 0..2 {
            for p in 0..3 {
                for r in (p + 1)..3 {
                    cs.push(vec![-(p * 2 + h + 1), -(r * 2 + h + 1)]);
                }
            }
        }
        let refs: Vec<&[i32]> = cs.iter().map(|c| c.as_slice()).collect();
        let mut s = solver(6, &refs);
        assert_eq!(s.solve(&Budget::unlimited(), &[]).unwrap(), None);
    }

    #[test]
    fn blocking_enumerates_all_models() {
        let cs: &[&[i32]] = &[&[1, 2, 3]];
        let mut s = solver(3, cs);
        let mut count = 0;
        while let Some(m) = s.solve(&Budget::unlimited(), &[]).unwrap() {
            count += 1;
            let block: Vec<Lit> = m.iter().enumerate().map(|(v, &b)| Lit::new(v as u32, !b)).collect();
            s.add_clause(&block);
        }
        assert_eq!(count, 7);
    }

    #[test]
    fn assumptions_are_temporary() {
        let cs: &[&[i32]] = &[&[1, 2], &[-1, 3]];
        let mut s = solver(3, cs);
        let b = Budget::unlimited();
        assert_eq!(s.solve(&b, &lits(&[-2, -3])).unwrap(), None);
        let m = s.solve(&b, &lits(&[1])).unwrap().unwrap();
        assert!(m[0] && m[2]);
        let m = s.solve(&b, &lits(&[-1])).unwrap().unwrap();
        assert!(!m[0] && m[1]);
        assert!(s.solve(&b, &[]).unwrap().is_some());
    }

    #[test]
    fn exhaustive_small_cnfs_match_truth_tables() {
        // deterministic pseudo-random 3-variable CNFs
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as i32
        };
        for _ in 0..300 {
            let n_clauses = 1 + (next() % 8) as usize;
            let mut cs: Vec<Vec<i32>> = Vec::new();
            for _ in 0..n_clauses {
                let len = 1 + (next() % 3) as usize;
                cs.push(
                    (0..len)
                        .map(|_| {
                            let v = 1 + next() % 4;
                            if next() % 2 == 0 {
                                v
                            } else {
                                -v
                            }
                        })
                        .collect(),
                );
            }
            let refs: Vec<&[i32]> = cs.iter().map(|c| c.as_slice()).collect();
            let brute = (0..16u32).any(|bits| {
                let m: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
                satisfies(&m, &refs)
            });
            let mut s = solver(4, &refs);
            let got = s.solve(&Budget::unlimited(), &[]).unwrap();
            assert_eq!(got.is_some(), brute, "{cs:?}");
            if let Some(m) = got {
                assert!(satisfies(&m, &refs));
            }
        }
    }
}
