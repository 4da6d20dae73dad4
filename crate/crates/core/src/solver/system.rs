//! Reduced Diophantine system of a type and a duality: orbit variables,
//! dimension equations and associativity polynomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use crate::fusion::{AxiomViolation, FusionData};

/// A monomial of degree at most two, as a sorted list of variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(pub Vec<usize>);

impl Mono {
    fn exp(&self, v: usize) -> usize {
        self.0.iter().filter(|&&x| x == v).count()
    }

    /// Degree reverse lexicographic order with `x_0 > x_1 > ...`.
    pub fn degrevlex(&self, o: &Mono) -> Ordering {
        match self.0.len().cmp(&o.0.len()) {
            Ordering::Equal => {}
            c => return c,
        }
        let mut vars: Vec<usize> = self.0.iter().chain(&o.0).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        for &v in vars.iter().rev() {
            match self.exp(v).cmp(&o.exp(v)) {
                Ordering::Equal => {}
                c => return c.reverse(),
            }
        }
        Ordering::Equal
    }
}

/// Polynomial with terms sorted by decreasing degrevlex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(pub Vec<(Mono, i64)>);

impl Poly {
    fn from_map(m: BTreeMap<Mono, i64>) -> Option<Poly> {
        let mut terms: Vec<(Mono, i64)> = m.into_iter().filter(|(_, c)| *c != 0).collect();
        if terms.is_empty() {
            return None;
        }
        terms.sort_by(|a, b| b.0.degrevlex(&a.0));
        Some(Poly(terms))
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .0
            .iter()
            .flat_map(|(m, _)| m.0.iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn eval(&self, x: &[i64]) -> i64 {
        self.0
            .iter()
            .map(|(m, c)| c * m.0.iter().map(|&v| x[v]).product::<i64>())
            .sum()
    }

    /// Normaliz syntax with 1-based `x[i]`.
    pub fn to_normaliz(&self) -> String {
        let mut s = String::new();
        for (idx, (m, c)) in self.0.iter().enumerate() {
            if idx == 0 {
                if *c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if *c < 0 { " - " } else { " + " });
            }
            let a = c.abs();
            let mono = mono_str(m);
            if mono.is_empty() {
                write!(s, "{a}").unwrap();
            } else if a == 1 {
                s.push_str(&mono);
            } else {
                write!(s, "{a}*{mono}").unwrap();
            }
        }
        s
    }
}

fn mono_str(m: &Mono) -> String {
    match m.0.as_slice() {
        [] => String::new(),
        [a] => format!("x[{}]", a + 1),
        [a, b] if a == b => format!("x[{}]^2", a + 1),
        [a, b] => format!("x[{}]*x[{}]", a + 1, b + 1),
        _ => unreachable!("degree above two"),
    }
}

/// `sum_v coef_v x_v = rhs`, coefficients summed per variable.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LinEq {
    pub coefs: Vec<(usize, i64)>,
    pub rhs: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Const(u32),
    Var(usize),
}

#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub dims: Vec<u64>,
    pub dual: Vec<usize>,
    /// One representative triple per variable.
    pub orbit_reps: Vec<(usize, usize, usize)>,
    pub upper: Vec<i64>,
    /// One equation per ordered pair of non-unit indices, duplicates kept.
    pub linear: Vec<LinEq>,
    /// Distinct non-zero associativity polynomials, in order of first occurrence.
    pub polynomials: Vec<Poly>,
    slots: Vec<Slot>,
}

impl ReducedSystem {
    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn num_vars(&self) -> usize {
        self.orbit_reps.len()
    }

    fn slot(&self, i: usize, j: usize, k: usize) -> Slot {
        let r = self.rank();
        self.slots[(i * r + j) * r + k]
    }

    /// Full tensor from an assignment of the orbit variables.
    pub fn expand(&self, sol: &[i64]) -> Result<FusionData, AxiomViolation> {
        let r = self.rank();
        let mut n = Vec::with_capacity(r * r * r);
        for &s in &self.slots {
            n.push(match s {
                Slot::Const(c) => c,
                Slot::Var(v) => u32::try_from(sol[v])
                    .map_err(|_| AxiomViolation::Malformed("negative entry".into()))?,
            });
        }
        let f = FusionData::from_raw(self.dual.clone(), n)?;
        f.check_axioms()?;
        f.check_dims(&self.dims)?;
        Ok(f)
    }

    /// Normaliz input file for this system.
    pub fn to_normaliz(&self) -> String {
        let mut s = String::new();
        let nv = self.num_vars();
        writeln!(s, "amb_space {nv}").unwrap();
        writeln!(s, "inhom_equations {}", self.linear.len()).unwrap();
        for eq in &self.linear {
            let mut row = vec![0i64; nv];
            for &(v, c) in &eq.coefs {
                row[v] += c;
            }
            for c in row {
                write!(s, "{c} ").unwrap();
            }
            writeln!(s, "{} ", -eq.rhs).unwrap();
        }
        s.push_str("LatticePoints\nconvert_equations\nnonnegative\n");
        writeln!(s, "polynomial_equations {}", self.polynomials.len()).unwrap();
        for p in &self.polynomials {
            writeln!(s, "{};", p.to_normaliz()).unwrap();
        }
        s
    }
}

/// Checks that `dual` is an involution fixing 0 and preserving `dims`.
pub fn valid_duality(dims: &[u64], dual: &[usize]) -> bool {
    dual.len() == dims.len()
        && !dual.is_empty()
        && dual[0] == 0
        && dual
            .iter()
            .enumerate()
            .all(|(i, &j)| j < dims.len() && dual[j] == i && dims[j] == dims[i])
}

pub fn build_system(dims: &[u64], dual: &[usize]) -> ReducedSystem {
    assert!(
        valid_duality(dims, dual),
        "invalid duality {dual:?} for type {dims:?}"
    );
    let r = dims.len();
    let d = dual;
    let mut slots = vec![Slot::Const(0); r * r * r];
    let mut orbit_reps = Vec::new();
    let mut upper: Vec<i64> = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let idx = (i * r + j) * r + k;
                if i == 0 || j == 0 || k == 0 {
                    let v = if i == 0 {
                        j == k
                    } else if j == 0 {
                        i == k
                    } else {
                        j == d[i]
                    };
                    slots[idx] = Slot::Const(u32::from(v));
                    continue;
                }
                if matches!(slots[idx], Slot::Var(_)) {
                    continue;
                }
                let v = orbit_reps.len();
                orbit_reps.push((i, j, k));
                let mut ub = i64::MAX;
                let mut stack = vec![(i, j, k)];
                let mut seen = HashSet::new();
                while let Some(t @ (a, b, c)) = stack.pop() {
                    if !seen.insert(t) {
                        continue;
                    }
                    slots[(a * r + b) * r + c] = Slot::Var(v);
                    ub = ub.min((dims[a] * dims[b] / dims[c]) as i64);
                    if dims[a] == 1 {
                        ub = ub.min(if dims[b] == dims[c] { 1 } else { 0 });
                    }
                    stack.extend([
                        (d[a], c, b),
                        (c, d[b], a),
                        (b, d[c], d[a]),
                        (d[b], d[a], d[c]),
                        (d[c], a, d[b]),
                        (c, d[b], a),
                    ]);
                }
                upper.push(ub);
            }
        }
    }
    let mut sys = ReducedSystem {
        dims: dims.to_vec(),
        dual: dual.to_vec(),
        orbit_reps,
        upper,
        linear: Vec::new(),
        polynomials: Vec::new(),
        slots,
    };
    for i in 1..r {
        for j in 1..r {
            let mut coefs: BTreeMap<usize, i64> = BTreeMap::new();
            for k in 1..r {
                if let Slot::Var(v) = sys.slot(i, j, k) {
                    *coefs.entry(v).or_insert(0) += dims[k] as i64;
                }
            }
            let rhs = (dims[i] * dims[j]) as i64 - i64::from(j == d[i]);
            sys.linear.push(LinEq {
                coefs: coefs.into_iter().collect(),
                rhs,
            });
        }
    }
    let mut seen: HashSet<Poly> = HashSet::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for t in 0..r {
                    let mut m: BTreeMap<Mono, i64> = BTreeMap::new();
                    for s in 0..r {
                        add_product(&mut m, sys.slot(j, k, s), sys.slot(i, s, t), 1);
                        add_product(&mut m, sys.slot(i, j, s), sys.slot(s, k, t), -1);
                    }
                    if let Some(p) = Poly::from_map(m) {
                        if seen.insert(p.clone()) {
                            sys.polynomials.push(p);
                        }
                    }
                }
            }
        }
    }
    sys
}

fn add_product(m: &mut BTreeMap<Mono, i64>, a: Slot, b: Slot, sign: i64) {
    let (c, vars) = match (a, b) {
        (Slot::Const(x), Slot::Const(y)) => (x as i64 * y as i64, vec![]),
        (Slot::Const(x), Slot::Var(v)) | (Slot::Var(v), Slot::Const(x)) => (x as i64, vec![v]),
        (Slot::Var(v), Slot::Var(w)) => (1, if v <= w { vec![v, w] } else { vec![w, v] }),
    };
    if c != 0 {
        *m.entry(Mono(vars)).or_insert(0) += sign * c;
    }
}
