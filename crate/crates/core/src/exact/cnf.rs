//! Clause store with the cardinality encodings the layout encoding needs.

#[derive(Clone, Debug, Default)]
pub struct Cnf {
    vars: i32,
    /// Clauses, each terminated by 0.
    lits: Vec<i32>,
    clauses: usize,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self) -> i32 {
        self.vars += 1;
        self.vars
    }

    pub fn var_count(&self) -> i32 {
        self.vars
    }

    pub fn clause_count(&self) -> usize {
        self.clauses
    }

    pub fn clause(&mut self, c: &[i32]) {
        debug_assert!(c.iter().all(|&l| l != 0 && l.abs() <= self.vars));
        self.lits.extend_from_slice(c);
        self.lits.push(0);
        self.clauses += 1;
    }

    pub fn unit(&mut self, l: i32) {
        self.clause(&[l]);
    }

    /// a -> b
    pub fn implies(&mut self, a: i32, b: i32) {
        self.clause(&[-a, b]);
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[i32]> {
        self.lits.split(|&l| l == 0).take(self.clauses)
    }

    /// At most one of `xs`; pairwise for short lists, sequential otherwise.
    pub fn at_most_one(&mut self, xs: &[i32]) {
        if xs.len() <= 5 {
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    self.clause(&[-xs[i], -xs[j]]);
                }
            }
            return;
        }
        // s_i: some of xs[0..=i] is true
        let mut prev = xs[0];
        for (i, &x) in xs.iter().enumerate().skip(1) {
            self.clause(&[-prev, -x]);
            if i + 1 < xs.len() {
                let s = self.var();
                self.implies(prev, s);
                self.implies(x, s);
                prev = s;
            }
        }
    }

    pub fn at_least_one(&mut self, xs: &[i32]) {
        self.clause(xs);
    }

    pub fn exactly_one(&mut self, xs: &[i32]) {
        self.at_least_one(xs);
        self.at_most_one(xs);
    }

    /// At most `k` of `xs` (sequential counter).
    pub fn at_most_k(&mut self, xs: &[i32], k: usize) {
        if xs.len() <= k {
            return;
        }
        if k == 0 {
            for &x in xs {
                self.unit(-x);
            }
            return;
        }
        // r[j]: at least j+1 of the prefix are true
        let mut r: Vec<i32> = (0..k).map(|_| self.var()).collect();
        self.implies(xs[0], r[0]);
        for &x in &xs[1..] {
            let next: Vec<i32> = (0..k).map(|_| self.var()).collect();
            self.implies(x, next[0]);
            for j in 0..k {
                self.implies(r[j], next[j]);
                if j + 1 < k {
                    self.clause(&[-x, -r[j], next[j + 1]]);
                }
            }
            self.clause(&[-x, -r[k - 1]]);
            r = next;
        }
    }

    /// At least `k` of `xs`, as at most `len - k` of the negations.
    pub fn at_least_k(&mut self, xs: &[i32], k: usize) {
        if k > xs.len() {
            self.clause(&[]);
            return;
        }
        let neg: Vec<i32> = xs.iter().map(|&x| -x).collect();
        self.at_most_k(&neg, xs.len() - k);
    }
}
