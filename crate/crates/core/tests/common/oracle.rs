//! Reference semantics and measures, computed from first principles with no
//! use of the library's interpreter, tables or closed forms.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use qifbound::boolprog::{Formula, Program, Stmt};

pub fn eval(f: &Formula, env: &HashMap<String, bool>) -> bool {
    match f {
        Formula::True => true,
        Formula::Var(v) => env[v],
        Formula::Not(a) => !eval(a, env),
        Formula::And(a, b) => eval(a, env) && eval(b, env),
    }
}

pub fn exec(s: &Stmt, env: &mut HashMap<String, bool>) {
    match s {
        Stmt::Assign { target, value } => {
            let v = eval(value, env);
            env.insert(target.clone(), v);
        }
        Stmt::Seq(a, b) => {
            exec(a, env);
            exec(b, env);
        }
        Stmt::If { guard, then_branch, else_branch } => {
            if eval(guard, env) {
                exec(then_branch, env)
            } else {
                exec(else_branch, env)
            }
        }
    }
}

fn bit(code: u64, width: usize, i: usize) -> bool {
    code >> (width - 1 - i) & 1 == 1
}

/// The initial environment for input codes over the high variables and the
/// low inputs; every other variable starts false.
pub fn initial_env(p: &Program, h: u64, l: u64) -> HashMap<String, bool> {
    let mut env: HashMap<String, bool> = p.all_vars().map(|v| (v.clone(), false)).collect();
    let (hv, lv) = (p.high_vars(), p.low_inputs());
    for (i, v) in hv.iter().enumerate() {
        env.insert(v.clone(), bit(h, hv.len(), i));
    }
    for (i, v) in lv.iter().enumerate() {
        env.insert(v.clone(), bit(l, lv.len(), i));
    }
    env
}

/// Final low values as a code, first low variable most significant.
pub fn run(p: &Program, h: u64, l: u64) -> u64 {
    let mut env = initial_env(p, h, l);
    exec(p.body(), &mut env);
    p.low_vars().iter().fold(0, |acc, v| acc << 1 | u64::from(env[v]))
}

/// `rows[l][h]`: the program's output on every input.
#[derive(Debug, Clone)]
pub struct Semantics {
    pub n_high: usize,
    pub rows: Vec<Vec<u64>>,
}

pub fn semantics(p: &Program) -> Semantics {
    let n_high = 1usize << p.high_vars().len();
    let n_low = 1usize << p.low_inputs().len();
    let rows = (0..n_low as u64).map(|l| (0..n_high as u64).map(|h| run(p, h, l)).collect()).collect();
    Semantics { n_high, rows }
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Semantics {
    pub fn n_low(&self) -> usize {
        self.rows.len()
    }

    pub fn classes(&self, l: usize) -> BTreeMap<u64, u64> {
        let mut m = BTreeMap::new();
        for &o in &self.rows[l] {
            *m.entry(o).or_insert(0) += 1;
        }
        m
    }

    pub fn noninterferent_at(&self, l: usize) -> bool {
        self.classes(l).len() == 1
    }

    pub fn noninterferent(&self) -> bool {
        (0..self.n_low()).all(|l| self.noninterferent_at(l))
    }

    /// `H(O | L)` under the uniform input distribution.
    pub fn se(&self) -> f64 {
        let n = self.n_high as f64;
        let per: f64 = (0..self.n_low())
            .map(|l| self.classes(l).values().map(|&c| c as f64 / n * (n / c as f64).log2()).sum::<f64>())
            .sum();
        per / self.n_low() as f64
    }

    /// `Σ_ℓ |O_ℓ|`.
    pub fn output_pairs(&self) -> u64 {
        (0..self.n_low()).map(|l| self.classes(l).len() as u64).sum()
    }

    /// `log(Σ_ℓ |O_ℓ| / |L|)`: the vulnerability ratio, from its definition
    /// as expected best-guess probability after and before observing.
    pub fn me(&self) -> f64 {
        let n = self.n_high as f64;
        let before = 1.0 / n;
        let after: f64 = (0..self.n_low())
            .map(|l| self.classes(l).keys().map(|_| 1.0 / n).sum::<f64>())
            .sum::<f64>()
            / self.n_low() as f64;
        (after / before).log2()
    }

    /// Expected guesses in column `l`, by summing guess positions directly.
    fn guesses_in(&self, l: usize) -> (BigRational, BigRational) {
        let n = self.n_high as i64;
        let prior: BigRational = (1..=n).map(|i| r(i, n)).sum();
        let posterior: BigRational = self
            .classes(l)
            .values()
            .map(|&c| (1..=c as i64).map(|i| r(i, n)).sum::<BigRational>())
            .sum();
        (prior, posterior)
    }

    pub fn ge_column(&self, l: usize) -> BigRational {
        let (prior, posterior) = self.guesses_in(l);
        prior - posterior
    }

    pub fn ge(&self) -> BigRational {
        let s: BigRational = (0..self.n_low()).map(|l| self.ge_column(l)).sum();
        s / r(self.n_low() as i64, 1)
    }

    pub fn gecc(&self) -> BigRational {
        (0..self.n_low()).map(|l| self.ge_column(l)).max().expect("a column")
    }

    pub fn cc_count(&self) -> u64 {
        (0..self.n_low()).map(|l| self.classes(l).len() as u64).max().expect("a column")
    }

    /// `D(δ_h ‖ U) − D(δ_h ‖ U | o)` for the experiment `(U, h, ℓ)`.
    pub fn be(&self, h: usize, l: usize) -> f64 {
        let n = self.n_high as f64;
        let o = self.rows[l][h];
        let c = self.rows[l].iter().filter(|&&x| x == o).count() as f64;
        let prior_distance = (1.0 / (1.0 / n)).log2();
        let posterior_distance = (1.0 / (1.0 / c)).log2();
        prior_distance - posterior_distance
    }

    /// Guessing-entropy leakage under joint weights `w[l][h]` (any positive
    /// scale), the low input observed.
    pub fn ge_weighted(&self, w: &[Vec<f64>]) -> f64 {
        let total: f64 = w.iter().flatten().sum();
        let guesses = |mut ps: Vec<f64>| {
            ps.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
            ps.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum::<f64>()
        };
        let mut g = 0.0;
        for (l, row) in w.iter().enumerate() {
            let prior = guesses(row.clone());
            let mut by_output: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
            for (h, &p) in row.iter().enumerate() {
                by_output.entry(self.rows[l][h]).or_default().push(p);
            }
            let posterior: f64 = by_output.into_values().map(guesses).sum();
            g += prior - posterior;
        }
        g / total
    }
}

/// Model count by direct evaluation.
pub fn count_models(vars: &[String], f: &Formula) -> u64 {
    let n = vars.len();
    (0..1u64 << n)
        .filter(|&code| {
            let env: HashMap<String, bool> =
                vars.iter().enumerate().map(|(i, v)| (v.clone(), bit(code, n, i))).collect();
            eval(f, &env)
        })
        .count() as u64
}
