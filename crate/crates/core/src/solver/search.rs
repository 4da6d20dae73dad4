//! Depth-first lattice point search for systems of nonnegative linear
//! equations with quadratic polynomial side constraints.
//!
//! Equations are processed in a fixed patch order. Each patch is solved by
//! bounded enumeration of its free variables, and partial assignments are
//! propagated: a linear equation or polynomial with one free variable
//! determines it, and a polynomial is checked as soon as it is fully assigned.

use std::time::Instant;

use rayon::prelude::*;

use super::system::{LinEq, Poly};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct Problem {
    pub upper: Vec<i64>,
    pub linear: Vec<LinEq>,
    pub polynomials: Vec<Poly>,
}

/// Why a search stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exhausted {
    pub found: Vec<Vec<i64>>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub max_nodes: Option<u64>,
    /// Stop after this many solutions (not an error).
    pub max_solutions: Option<usize>,
}

#[derive(Clone)]
struct Compiled {
    upper: Vec<i64>,
    lin_vars: Vec<Vec<(usize, i64)>>,
    lin_rhs: Vec<i64>,
    polys: Vec<Vec<(u32, u32, i64)>>,
    poly_nvars: Vec<usize>,
    var_lins: Vec<Vec<(usize, i64)>>,
    var_polys: Vec<Vec<usize>>,
    order: Vec<usize>,
}

#[derive(Clone, Copy)]
enum Item {
    Lin(usize),
    Poly(usize),
}

#[derive(Clone)]
struct State<'a> {
    p: &'a Compiled,
    val: Vec<i64>,
    set: Vec<bool>,
    lin_sum: Vec<i64>,
    lin_cap: Vec<i64>,
    lin_free: Vec<usize>,
    poly_free: Vec<usize>,
    trail: Vec<usize>,
    queue: Vec<Item>,
    nodes: u64,
    limits: Limits,
    stopped: bool,
    out: Vec<Vec<i64>>,
    split: Option<usize>,
    frontier: Vec<Vec<(usize, i64)>>,
}

impl Problem {
    fn compile(&self) -> Compiled {
        let nv = self.upper.len();
        let mut var_lins = vec![Vec::new(); nv];
        let mut lin_vars = Vec::new();
        let mut lin_rhs = Vec::new();
        for (e, eq) in self.linear.iter().enumerate() {
            let mut vars = eq.coefs.clone();
            vars.retain(|&(_, c)| c != 0);
            let vars = gcd_order(vars);
            for &(v, c) in &vars {
                var_lins[v].push((e, c));
            }
            lin_vars.push(vars);
            lin_rhs.push(eq.rhs);
        }
        let mut var_polys = vec![Vec::new(); nv];
        let mut polys = Vec::new();
        let mut poly_nvars = Vec::new();
        for (i, p) in self.polynomials.iter().enumerate() {
            let vars = p.vars();
            for &v in &vars {
                var_polys[v].push(i);
            }
            poly_nvars.push(vars.len());
            polys.push(
                p.0.iter()
                    .map(|(m, c)| {
                        let a = m.0.first().map_or(NONE, |&v| v as u32);
                        let b = m.0.get(1).map_or(NONE, |&v| v as u32);
                        (a, b, *c)
                    })
                    .collect(),
            );
        }
        let order = patch_order(&lin_vars, &self.polynomials, nv);
        Compiled {
            upper: self.upper.clone(),
            lin_vars,
            lin_rhs,
            polys,
            poly_nvars,
            var_lins,
            var_polys,
            order,
        }
    }

    /// All solutions in lexicographic order, or the partial result if a limit hit.
    pub fn solve(&self, limits: Limits) -> Result<Vec<Vec<i64>>, Exhausted> {
        let c = self.compile();
        let mut root = State::new(&c, limits);
        if !root.init() {
            return Ok(Vec::new());
        }
        // Split the first patches into independent subtrees.
        let mut depth = 0;
        let mut frontier = vec![Vec::new()];
        while depth < c.order.len() && frontier.len() < 64 && limits.max_solutions.is_none() {
            depth += 1;
            let mut s = root.clone();
            s.split = Some(depth);
            s.search(0);
            if s.stopped {
                return Err(Exhausted {
                    found: s.out,
                    nodes: s.nodes,
                });
            }
            if !s.out.is_empty() {
                // Everything was solved before reaching the split depth.
                let mut out = s.out;
                out.sort();
                return Ok(out);
            }
            frontier = s.frontier;
            if frontier.is_empty() {
                return Ok(Vec::new());
            }
        }
        if depth == 0 {
            let mut s = root;
            s.search(0);
            s.out.sort();
            return if s.stopped {
                Err(Exhausted {
                    found: s.out,
                    nodes: s.nodes,
                })
            } else {
                Ok(s.out)
            };
        }
        let results: Vec<(Vec<Vec<i64>>, u64, bool)> = frontier
            .par_iter()
            .map(|assign| {
                let mut s = root.clone();
                for &(v, x) in assign {
                    if !s.set[v] && !(s.assign(v, x) && s.propagate()) {
                        return (Vec::new(), s.nodes, false);
                    }
                }
                s.search(depth);
                (s.out, s.nodes, s.stopped)
            })
            .collect();
        let mut out = Vec::new();
        let mut nodes = 0;
        let mut stopped = false;
        for (o, n, st) in results {
            out.extend(o);
            nodes += n;
            stopped |= st;
        }
        out.sort();
        if stopped {
            Err(Exhausted { found: out, nodes })
        } else {
            Ok(out)
        }
    }
}

/// Orders the variables of one equation so that the coefficients still to
/// be enumerated keep a large gcd, which turns the remainder into a
/// congruence condition. Ties go to the larger coefficient.
fn gcd_order(mut rest: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    rest.sort_by_key(|&(v, c)| (-c, v));
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best = 0;
        let mut best_g = -1;
        for i in 0..rest.len() {
            let g = rest
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(0, |acc, (_, &(_, c))| gcd(acc, c));
            if g > best_g {
                best_g = g;
                best = i;
            }
        }
        out.push(rest.remove(best));
    }
    out
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Inverse of `a` modulo `m`, for coprime `a` and `m > 0`.
fn inv_mod(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m)
}

/// Greedy patch order: fewest new variables, then most polynomials made
/// fully supported, then lowest index. Stops once every variable is covered.
fn patch_order(lin_vars: &[Vec<(usize, i64)>], polys: &[Poly], nv: usize) -> Vec<usize> {
    let mut covered = vec![false; nv];
    let mut n_covered = 0;
    let mut used = vec![false; lin_vars.len()];
    let poly_vars: Vec<Vec<usize>> = polys.iter().map(|p| p.vars()).collect();
    let mut missing: Vec<usize> = poly_vars.iter().map(|v| v.len()).collect();
    let mut var_polys = vec![Vec::new(); nv];
    for (i, vs) in poly_vars.iter().enumerate() {
        for &v in vs {
            var_polys[v].push(i);
        }
    }
    let mut order = Vec::new();
    while n_covered < nv {
        let mut best: Option<(usize, usize, usize)> = None;
        for (e, vars) in lin_vars.iter().enumerate() {
            if used[e] {
                continue;
            }
            let new: Vec<usize> = vars
                .iter()
                .map(|&(v, _)| v)
                .filter(|&v| !covered[v])
                .collect();
            if new.is_empty() {
                continue;
            }
            let mut hits: Vec<usize> = new
                .iter()
                .flat_map(|&v| var_polys[v].iter().copied())
                .collect();
            hits.sort_unstable();
            let mut completed = 0;
            let mut idx = 0;
            while idx < hits.len() {
                let p = hits[idx];
                let mut cnt = 0;
                while idx < hits.len() && hits[idx] == p {
                    cnt += 1;
                    idx += 1;
                }
                if cnt == missing[p] {
                    completed += 1;
                }
            }
            let better = match best {
                None => true,
                Some((bn, bc, _)) => new.len() < bn || (new.len() == bn && completed > bc),
            };
            if better {
                best = Some((new.len(), completed, e));
            }
        }
        let (_, _, e) = best.expect("uncovered variable outside every equation");
        used[e] = true;
        order.push(e);
        for &(v, _) in &lin_vars[e] {
            if !covered[v] {
                covered[v] = true;
                n_covered += 1;
                for &p in &var_polys[v] {
                    missing[p] -= 1;
                }
            }
        }
    }
    order
}

impl<'a> State<'a> {
    fn new(p: &'a Compiled, limits: Limits) -> Self {
        let nv = p.upper.len();
        let lin_cap = p
            .lin_vars
            .iter()
            .map(|vs| vs.iter().map(|&(v, c)| c * p.upper[v]).sum())
            .collect();
        State {
            p,
            val: vec![0; nv],
            set: vec![false; nv],
            lin_sum: vec![0; p.lin_rhs.len()],
            lin_cap,
            lin_free: p.lin_vars.iter().map(|v| v.len()).collect(),
            poly_free: p.poly_nvars.clone(),
            trail: Vec::new(),
            queue: Vec::new(),
            nodes: 0,
            limits,
            stopped: false,
            out: Vec::new(),
            split: None,
            frontier: Vec::new(),
        }
    }

    /// Initial consistency and propagation; false if infeasible.
    fn init(&mut self) -> bool {
        for e in 0..self.p.lin_rhs.len() {
            let rhs = self.p.lin_rhs[e];
            if rhs < 0 || self.lin_cap[e] < rhs {
                return false;
            }
            if self.lin_free[e] <= 1 {
                self.queue.push(Item::Lin(e));
            }
        }
        for (i, &n) in self.p.poly_nvars.iter().enumerate() {
            if n <= 1 {
                self.queue.push(Item::Poly(i));
            }
        }
        // Variables fixed to zero by their bound.
        for v in 0..self.p.upper.len() {
            if self.p.upper[v] == 0 && !self.set[v] && !self.assign(v, 0) {
                return false;
            }
        }
        self.propagate()
    }

    fn assign(&mut self, v: usize, x: i64) -> bool {
        debug_assert!(!self.set[v]);
        self.set[v] = true;
        self.val[v] = x;
        self.trail.push(v);
        let ub = self.p.upper[v];
        let mut ok = x <= ub && x >= 0;
        for &(e, c) in &self.p.var_lins[v] {
            self.lin_sum[e] += c * x;
            self.lin_cap[e] -= c * ub;
            self.lin_free[e] -= 1;
            let rhs = self.p.lin_rhs[e];
            if self.lin_sum[e] > rhs || self.lin_sum[e] + self.lin_cap[e] < rhs {
                ok = false;
            } else if self.lin_free[e] == 1 {
                self.queue.push(Item::Lin(e));
            } else if ok
                && self.lin_free[e] > 1
                && (rhs - self.lin_sum[e]) % self.free_gcd(e, usize::MAX) != 0
            {
                ok = false;
            }
        }
        for &i in &self.p.var_polys[v] {
            self.poly_free[i] -= 1;
            if self.poly_free[i] <= 1 {
                self.queue.push(Item::Poly(i));
            }
        }
        ok
    }

    /// Gcd of the coefficients of the free variables of `e`, except `skip`.
    fn free_gcd(&self, e: usize, skip: usize) -> i64 {
        self.p.lin_vars[e]
            .iter()
            .filter(|&&(v, _)| !self.set[v] && v != skip)
            .fold(0, |acc, &(_, c)| gcd(acc, c))
    }

    /// Largest value of `u` allowed by the remainders of its equations.
    fn dyn_upper(&self, u: usize) -> i64 {
        let mut hi = self.p.upper[u];
        for &(e, c) in &self.p.var_lins[u] {
            hi = hi.min((self.p.lin_rhs[e] - self.lin_sum[e]) / c);
        }
        hi
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let x = self.val[v];
            let ub = self.p.upper[v];
            for &(e, c) in &self.p.var_lins[v] {
                self.lin_sum[e] -= c * x;
                self.lin_cap[e] += c * ub;
                self.lin_free[e] += 1;
            }
            for &i in &self.p.var_polys[v] {
                self.poly_free[i] += 1;
            }
            self.set[v] = false;
        }
        self.queue.clear();
    }

    fn propagate(&mut self) -> bool {
        while let Some(item) = self.queue.pop() {
            let ok = match item {
                Item::Lin(e) => self.propagate_lin(e),
                Item::Poly(i) => self.propagate_poly(i),
            };
            if !ok {
                self.queue.clear();
                return false;
            }
        }
        true
    }

    fn propagate_lin(&mut self, e: usize) -> bool {
        if self.lin_free[e] != 1 {
            return true;
        }
        let &(u, c) = self.p.lin_vars[e]
            .iter()
            .find(|&&(v, _)| !self.set[v])
            .unwrap();
        let rem = self.p.lin_rhs[e] - self.lin_sum[e];
        if rem % c != 0 {
            return false;
        }
        self.assign(u, rem / c)
    }

    fn propagate_poly(&mut self, i: usize) -> bool {
        match self.poly_free[i] {
            0 => self.eval_poly(i) == 0,
            1 => {
                let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
                let mut u = NONE;
                for &(x, y, k) in &self.p.polys[i] {
                    let fx = x != NONE && !self.set[x as usize];
                    let fy = y != NONE && !self.set[y as usize];
                    if fx {
                        u = x;
                    }
                    if fy {
                        u = y;
                    }
                    let vx = if x == NONE || fx {
                        1
                    } else {
                        self.val[x as usize]
                    };
                    let vy = if y == NONE || fy {
                        1
                    } else {
                        self.val[y as usize]
                    };
                    match (fx, fy) {
                        (true, true) => a += k,
                        (true, false) => b += k * vy,
                        (false, true) => b += k * vx,
                        (false, false) => c += k * vx * vy,
                    }
                }
                let u = u as usize;
                let ub = self.p.upper[u];
                let roots = int_roots(a, b, c, ub);
                match roots {
                    Roots::All => true,
                    Roots::Some(rs) if rs.is_empty() => false,
                    Roots::Some(rs) if rs.len() == 1 => self.assign(u, rs[0]),
                    Roots::Some(_) => true,
                }
            }
            _ => true,
        }
    }

    fn eval_poly(&self, i: usize) -> i64 {
        self.p.polys[i]
            .iter()
            .map(|&(x, y, k)| {
                let vx = if x == NONE { 1 } else { self.val[x as usize] };
                let vy = if y == NONE { 1 } else { self.val[y as usize] };
                k * vx * vy
            })
            .sum()
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if let Some(m) = self.limits.max_nodes {
            if self.nodes > m {
                self.stopped = true;
            }
        }
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.limits.deadline {
                if Instant::now() > d {
                    self.stopped = true;
                }
            }
        }
        !self.stopped
    }

    fn done(&self) -> bool {
        self.stopped
            || self
                .limits
                .max_solutions
                .is_some_and(|m| self.out.len() >= m)
    }

    fn search(&mut self, level: usize) {
        if self.done() {
            return;
        }
        if Some(level) == self.split {
            let snapshot = self.trail.iter().map(|&v| (v, self.val[v])).collect();
            self.frontier.push(snapshot);
            return;
        }
        if level == self.p.order.len() {
            self.out.push(self.val.clone());
            return;
        }
        let e = self.p.order[level];
        self.enum_patch(e, 0, level);
    }

    fn enum_patch(&mut self, e: usize, pos: usize, level: usize) {
        let vars = &self.p.lin_vars[e];
        let Some(off) = vars[pos..].iter().position(|&(v, _)| !self.set[v]) else {
            self.search(level + 1);
            return;
        };
        let pos = pos + off;
        let (u, c) = vars[pos];
        let rem = self.p.lin_rhs[e] - self.lin_sum[e];
        let hi = self.dyn_upper(u);
        // rem - c x must be divisible by the gcd of the other free coefficients.
        let g = self.free_gcd(e, u);
        let (start, step) = if g == 0 {
            (0, 1)
        } else {
            let h = gcd(c, g);
            if rem % h != 0 {
                return;
            }
            let m = g / h;
            (((rem / h) % m * inv_mod(c / h, m)).rem_euclid(m), m)
        };
        let mut x = start;
        while x <= hi {
            if !self.tick() || self.done() {
                return;
            }
            let mark = self.trail.len();
            if self.assign(u, x) && self.propagate() {
                self.enum_patch(e, pos + 1, level);
            }
            self.undo_to(mark);
            x += step;
        }
    }
}

enum Roots {
    All,
    Some(Vec<i64>),
}

/// Integer roots in `[0, ub]` of `a x^2 + b x + c`.
fn int_roots(a: i64, b: i64, c: i64, ub: i64) -> Roots {
    let ok = |x: i64| (0..=ub).contains(&x);
    if a == 0 {
        if b == 0 {
            return if c == 0 {
                Roots::All
            } else {
                Roots::Some(vec![])
            };
        }
        if c % b != 0 {
            return Roots::Some(vec![]);
        }
        let x = -c / b;
        return Roots::Some(if ok(x) { vec![x] } else { vec![] });
    }
    let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
    if disc < 0 {
        return Roots::Some(vec![]);
    }
    let s = isqrt128(disc);
    if s * s != disc {
        return Roots::Some(vec![]);
    }
    let mut rs = Vec::new();
    for num in [-(b as i128) + s, -(b as i128) - s] {
        let den = 2 * a as i128;
        if num % den == 0 {
            let x = (num / den) as i64;
            if ok(x) && !rs.contains(&x) {
                rs.push(x);
            }
        }
    }
    Roots::Some(rs)
}

fn isqrt128(n: i128) -> i128 {
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::super::system::Mono;
    use super::*;

    fn limits() -> Limits {
        Limits {
            deadline: None,
            max_nodes: None,
            max_solutions: None,
        }
    }

    #[test]
    fn toy_infeasible() {
        // x + y = 1, x y = 1
        let p = Problem {
            upper: vec![1, 1],
            linear: vec![LinEq {
                coefs: vec![(0, 1), (1, 1)],
                rhs: 1,
            }],
            polynomials: vec![Poly(vec![(Mono(vec![0, 1]), 1), (Mono(vec![]), -1)])],
        };
        assert_eq!(p.solve(limits()).unwrap(), Vec::<Vec<i64>>::new());
    }

    #[test]
    fn toy_counts() {
        // x + 2y + 3z = 6 has 7 solutions.
        let p = Problem {
            upper: vec![6, 3, 2],
            linear: vec![LinEq {
                coefs: vec![(0, 1), (1, 2), (2, 3)],
                rhs: 6,
            }],
            polynomials: vec![],
        };
        let sols = p.solve(limits()).unwrap();
        assert_eq!(sols.len(), 7);
        assert!(sols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn roots() {
        assert!(matches!(int_roots(1, -5, 6, 10), Roots::Some(ref v) if v.len() == 2));
        assert!(matches!(int_roots(1, -5, 6, 2), Roots::Some(ref v) if v == &vec![2]));
        assert!(matches!(int_roots(0, 2, -3, 10), Roots::Some(ref v) if v.is_empty()));
    }
}
