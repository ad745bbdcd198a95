//! Minimum-cost sheet assignment between neighboring fibers.

use num_complex::Complex64;

use crate::perm::Perm;

/// Best and runner-up assignments of `from` onto `to` by total squared
/// distance.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub perm: Perm,
    pub best: f64,
    pub second: f64,
}

impl Assignment {
    /// The best assignment beats every other by at least `margin`.
    pub fn is_clear(&self, margin: f64) -> bool {
        margin * self.best < self.second
    }
}

struct Search<'a> {
    cost: &'a [Vec<f64>],
    used: Vec<bool>,
    current: Vec<usize>,
    best: f64,
    second: f64,
    best_perm: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, row: usize, acc: f64) {
        let n = self.cost.len();
        if acc >= self.second {
            return;
        }
        if row == n {
            if acc < self.best {
                self.second = self.best;
                self.best = acc;
                self.best_perm = self.current.clone();
            } else {
                self.second = acc;
            }
            return;
        }
        for j in 0..n {
            if !self.used[j] {
                self.used[j] = true;
                self.current[row] = j;
                self.run(row + 1, acc + self.cost[row][j]);
                self.used[j] = false;
            }
        }
    }
}

pub fn assign(from: &[Complex64], to: &[Complex64]) -> Assignment {
    let n = from.len();
    let cost: Vec<Vec<f64>> = from.iter().map(|a| to.iter().map(|b| (a - b).norm_sqr()).collect()).collect();
    let mut s = Search {
        cost: &cost,
        used: vec![false; n],
        current: vec![0; n],
        best: f64::INFINITY,
        second: f64::INFINITY,
        best_perm: (0..n).collect(),
    };
    s.run(0, 0.0);
    Assignment {
        perm: Perm::from_images(s.best_perm).expect("search yields a permutation"),
        best: s.best,
        second: s.second,
    }
}
