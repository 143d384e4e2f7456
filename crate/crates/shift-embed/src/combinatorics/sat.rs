//! A small conflict-driven clause-learning solver for the marker search.

/// Literal `2v` is variable `v` true, `2v + 1` is `v` false.
pub(crate) type Lit = u32;

pub(crate) fn lit(var: usize, value: bool) -> Lit {
    (2 * var + usize::from(!value)) as Lit
}

fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

const UNSET: i8 = -1;

pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    activity: Vec<f64>,
    phase: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    bump: f64,
    pub(crate) conflicts: u64,
    empty: bool,
}

impl Solver {
    pub(crate) fn new(vars: usize) -> Self {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * vars],
            value: vec![UNSET; vars],
            level: vec![0; vars],
            reason: vec![None; vars],
            activity: vec![0.0; vars],
            phase: vec![false; vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            bump: 1.0,
            conflicts: 0,
            empty: false,
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        match self.value[var(l)] {
            UNSET => UNSET,
            v => v ^ (l & 1) as i8,
        }
    }

    fn assign(&mut self, l: Lit, reason: Option<usize>) {
        let v = var(l);
        self.value[v] = 1 - (l & 1) as i8;
        self.level[v] = self.trail_lim.len();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause at level 0; duplicate literals are removed.
    pub(crate) fn add_clause(&mut self, mut c: Vec<Lit>) {
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|p| p[0] ^ 1 == p[1]) {
            return;
        }
        match c.len() {
            0 => self.empty = true,
            1 => match self.lit_value(c[0]) {
                UNSET => self.assign(c[0], None),
                0 => self.empty = true,
                _ => {}
            },
            _ => {
                let id = self.clauses.len();
                self.watches[(c[0] ^ 1) as usize].push(id);
                self.watches[(c[1] ^ 1) as usize].push(id);
                self.clauses.push(c);
            }
        }
    }

    /// Returns a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[(falsified ^ 1) as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                let c = &mut self.clauses[cid];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.value_of(first) == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[cid].len() {
                    let l = self.clauses[cid][k];
                    if self.value_of(l) != 0 {
                        self.clauses[cid].swap(1, k);
                        self.watches[(l ^ 1) as usize].push(cid);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                if self.value_of(first) == 0 {
                    conflict = Some(cid);
                    break;
                }
                self.assign(first, Some(cid));
            }
            let slot = &mut self.watches[(falsified ^ 1) as usize];
            ws.append(slot);
            *slot = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn value_of(&self, l: Lit) -> i8 {
        self.lit_value(l)
    }

    /// First-UIP clause and the level to return to.
    fn analyze(&mut self, mut conflict: usize) -> (Vec<Lit>, usize) {
        let current = self.trail_lim.len();
        let mut seen = vec![false; self.value.len()];
        let mut learnt = vec![0];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let mut pivot: Option<Lit> = None;
        loop {
            let lits: Vec<Lit> = self.clauses[conflict].clone();
            for &l in lits.iter().filter(|&&l| Some(l) != pivot) {
                let v = var(l);
                if seen[v] || self.level[v] == 0 {
                    continue;
                }
                seen[v] = true;
                self.activity[v] += self.bump;
                if self.level[v] == current {
                    pending += 1;
                } else {
                    learnt.push(l);
                }
            }
            loop {
                idx -= 1;
                if seen[var(self.trail[idx])] {
                    break;
                }
            }
            let p = self.trail[idx];
            seen[var(p)] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = p ^ 1;
                break;
            }
            pivot = Some(p);
            conflict = self.reason[var(p)].expect("implied literal");
        }
        self.bump *= 1.05;
        if self.bump > 1e100 {
            self.activity.iter_mut().for_each(|a| *a *= 1e-100);
            self.bump *= 1e-100;
        }
        let back = if learnt.len() == 1 {
            0
        } else {
            let (k, _) = learnt.iter().enumerate().skip(1).max_by_key(|(_, l)| self.level[var(**l)]).expect("non-empty");
            learnt.swap(1, k);
            self.level[var(learnt[1])]
        };
        (learnt, back)
    }

    fn backtrack(&mut self, to: usize) {
        if self.trail_lim.len() <= to {
            return;
        }
        let keep = self.trail_lim[to];
        for &l in &self.trail[keep..] {
            let v = var(l);
            self.phase[v] = self.value[v] == 1;
            self.value[v] = UNSET;
            self.reason[v] = None;
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(to);
        self.qhead = keep;
    }

    fn decide(&self) -> Option<Lit> {
        let mut best: Option<usize> = None;
        for v in 0..self.value.len() {
            if self.value[v] == UNSET && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best.map(|v| lit(v, self.phase[v]))
    }

    pub(crate) fn solve(&mut self, max_conflicts: u64) -> Outcome {
        if self.empty || self.propagate().is_some() {
            return Outcome::Unsat;
        }
        let mut restart = 1u64;
        let mut until = 64 * luby(restart);
        loop {
            if let Some(conflict) = self.propagate() {
                self.conflicts += 1;
                if self.trail_lim.is_empty() {
                    return Outcome::Unsat;
                }
                let (learnt, back) = self.analyze(conflict);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.assign(learnt[0], None);
                } else {
                    let id = self.clauses.len();
                    self.watches[(learnt[0] ^ 1) as usize].push(id);
                    self.watches[(learnt[1] ^ 1) as usize].push(id);
                    let first = learnt[0];
                    self.clauses.push(learnt);
                    self.assign(first, Some(id));
                }
                if self.conflicts >= max_conflicts {
                    return Outcome::Unknown;
                }
                until -= 1;
                if until == 0 {
                    restart += 1;
                    until = 64 * luby(restart);
                    self.backtrack(0);
                }
                continue;
            }
            match self.decide() {
                None => return Outcome::Sat(self.value.iter().map(|&v| v == 1).collect()),
                Some(l) => {
                    self.trail_lim.push(self.trail.len());
                    self.assign(l, None);
                }
            }
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u64) -> u64 {
    loop {
        let mut k = 1;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}
