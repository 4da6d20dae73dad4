//! Summary tables and comparison against the published classification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use intmod::fixtures::{self, expected, find_relabeling};
use intmod::fusion::FusionData;
use intmod::modular::ModularDatum;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::pipeline::{ModularRecord, Outputs};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub quantity: String,
    pub rank: usize,
    pub expected: Option<usize>,
    pub actual: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Divergence {
    Count {
        quantity: String,
        rank: usize,
        expected: usize,
        actual: usize,
    },
    /// Published datum with no computed counterpart.
    Missing {
        rank: usize,
        dims: Vec<u64>,
        spins: Vec<String>,
    },
    /// Computed datum with no published counterpart.
    Unexpected {
        rank: usize,
        dims: Vec<u64>,
        spins: Vec<String>,
    },
    /// Same S and T up to relabeling but a different invariant.
    Mismatch {
        rank: usize,
        dims: Vec<u64>,
        field: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub max_rank: usize,
    pub counts: Vec<CountRow>,
    pub divergences: Vec<Divergence>,
    /// Types whose ring search ran out of budget.
    pub budget_exhausted: Vec<Vec<u64>>,
    /// Types on which the local criterion abstained.
    pub local_abstained: Vec<Vec<u64>>,
}

impl SummaryReport {
    pub fn ok(&self) -> bool {
        self.divergences.is_empty() && self.budget_exhausted.is_empty()
    }

    pub fn render(&self) -> String {
        let mut quantities: Vec<&str> = Vec::new();
        for c in &self.counts {
            if !quantities.contains(&c.quantity.as_str()) {
                quantities.push(&c.quantity);
            }
        }
        let mut s = String::new();
        let _ = write!(s, "{:<24}", "rank");
        for r in 1..=self.max_rank {
            let _ = write!(s, "{r:>10}");
        }
        s.push('\n');
        for q in quantities {
            let _ = write!(s, "{q:<24}");
            for r in 1..=self.max_rank {
                let cell = match self.counts.iter().find(|c| c.quantity == q && c.rank == r) {
                    Some(CountRow {
                        expected: Some(e),
                        actual,
                        ..
                    }) if e != actual => format!("{actual}!={e}"),
                    Some(c) => c.actual.to_string(),
                    None => "-".into(),
                };
                let _ = write!(s, "{cell:>10}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "divergences: {}", self.divergences.len());
        for d in &self.divergences {
            let _ = writeln!(s, "  {}", serde_json::to_string(d).unwrap_or_default());
        }
        if !self.budget_exhausted.is_empty() {
            let _ = writeln!(s, "ring search out of budget: {:?}", self.budget_exhausted);
        }
        if !self.local_abstained.is_empty() {
            let _ = writeln!(s, "local criterion abstained: {:?}", self.local_abstained);
        }
        s
    }
}

fn table(q: &str) -> Option<&'static [usize]> {
    Some(match q {
        "types" => &expected::TYPES,
        "perfect_types" => &expected::PERFECT_TYPES,
        "local_excluded" => &expected::LOCAL_EXCLUDED,
        "rings" => &expected::RINGS,
        "noncommutative" => &expected::NONCOMMUTATIVE,
        "self_transposable" => &expected::SELF_TRANSPOSABLE,
        "pointed_modular_data" => &expected::POINTED_MD,
        "nonpointed_modular_data" => &expected::NONPOINTED_MD,
        _ => return None,
    })
}

fn per_rank(max_rank: usize, ranks: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut v = vec![0; max_rank];
    for (r, n) in ranks {
        if (1..=max_rank).contains(&r) {
            v[r - 1] += n;
        }
    }
    v
}

/// Builds per-rank counts from whichever stage outputs are present and
/// compares them, and the modular data, with the published values.
pub fn build_report(max_rank: usize, out: &Outputs) -> SummaryReport {
    let mut counts: Vec<(&str, Vec<usize>)> = Vec::new();
    if let Some(t) = &out.types {
        counts.push(("types", per_rank(max_rank, t.iter().map(|t| (t.rank, 1)))));
        counts.push((
            "perfect_types",
            per_rank(max_rank, t.iter().map(|t| (t.rank, t.perfect as usize))),
        ));
    }
    if let Some(f) = &out.filter {
        counts.push((
            "local_excluded",
            per_rank(
                max_rank,
                f.iter().map(|f| (f.rank, f.local_excluded as usize)),
            ),
        ));
    }
    if let Some(s) = &out.solve {
        counts.push((
            "rings",
            per_rank(max_rank, s.iter().map(|s| (s.rank, s.rings))),
        ));
        counts.push((
            "noncommutative",
            per_rank(max_rank, s.iter().map(|s| (s.rank, s.noncommutative))),
        ));
    }
    if let Some(sm) = &out.smatrices {
        counts.push((
            "self_transposable",
            per_rank(
                max_rank,
                sm.iter()
                    .map(|s| (s.rank, !s.candidates.is_empty() as usize)),
            ),
        ));
    }
    if let Some(m) = &out.modular {
        counts.push((
            "pointed_modular_data",
            per_rank(max_rank, m.iter().map(|m| (m.rank, m.pointed as usize))),
        ));
        counts.push((
            "nonpointed_modular_data",
            per_rank(max_rank, m.iter().map(|m| (m.rank, !m.pointed as usize))),
        ));
    }

    let mut rows = Vec::new();
    let mut divergences = Vec::new();
    for (q, v) in counts {
        let tab = table(q);
        for (i, &actual) in v.iter().enumerate() {
            let expected = tab.and_then(|t| t.get(i).copied());
            if let Some(e) = expected.filter(|&e| e != actual) {
                divergences.push(Divergence::Count {
                    quantity: q.into(),
                    rank: i + 1,
                    expected: e,
                    actual,
                });
            }
            rows.push(CountRow {
                quantity: q.into(),
                rank: i + 1,
                expected,
                actual,
            });
        }
    }
    if let Some(m) = &out.modular {
        divergences.extend(diff_fixtures(m, max_rank));
    }
    let budget_exhausted = out
        .solve
        .iter()
        .flatten()
        .filter(|s| !s.complete)
        .map(|s| s.dims.clone())
        .collect();
    let local_abstained = out
        .filter
        .iter()
        .flatten()
        .filter(|f| f.local_timeouts > 0)
        .map(|f| f.dims.clone())
        .collect();
    SummaryReport {
        max_rank,
        counts: rows,
        divergences,
        budget_exhausted,
        local_abstained,
    }
}

fn spin_strings(s: &[Rational64]) -> Vec<String> {
    s.iter().map(|q| q.to_string()).collect()
}

fn sorted_spins(s: &[Rational64]) -> Vec<Rational64> {
    let mut v = s.to_vec();
    v.sort();
    v
}

fn dims_of(d: &ModularDatum) -> Vec<u64> {
    d.ring.fpdims().unwrap_or_default()
}

/// Compares computed modular data of rank at most `max_rank` with the
/// published lists: pointed data by spin multiset per group, the rest up to
/// simultaneous relabeling of S and T.
pub fn diff_fixtures(data: &[ModularRecord], max_rank: usize) -> Vec<Divergence> {
    let mut out = Vec::new();

    // Pointed: group by ring hash.
    let mut computed: BTreeMap<String, Vec<&ModularDatum>> = BTreeMap::new();
    for r in data.iter().filter(|r| r.pointed && r.rank <= max_rank) {
        computed
            .entry(r.datum.ring_hash.clone())
            .or_default()
            .push(&r.datum);
    }
    for g in fixtures::pointed() {
        let order: usize = g.factors.iter().product();
        if order > max_rank {
            continue;
        }
        let hash = FusionData::abelian_group(&g.factors).canonical_hash();
        let mut pool: Vec<Vec<Rational64>> = computed
            .remove(&hash)
            .unwrap_or_default()
            .iter()
            .map(|d| sorted_spins(&d.spins))
            .collect();
        for spins in &g.spins {
            let key = sorted_spins(spins);
            match pool.iter().position(|p| *p == key) {
                Some(i) => {
                    pool.swap_remove(i);
                }
                None => out.push(Divergence::Missing {
                    rank: order,
                    dims: vec![1; order],
                    spins: spin_strings(spins),
                }),
            }
        }
        for p in pool {
            out.push(Divergence::Unexpected {
                rank: order,
                dims: vec![1; order],
                spins: spin_strings(&p),
            });
        }
    }
    for (_, rest) in computed {
        for d in rest {
            out.push(Divergence::Unexpected {
                rank: d.rank(),
                dims: dims_of(d),
                spins: spin_strings(&d.spins),
            });
        }
    }

    // Non-pointed.
    let mut pool: Vec<&ModularDatum> = data
        .iter()
        .filter(|r| !r.pointed && r.rank <= max_rank)
        .map(|r| &r.datum)
        .collect();
    for p in fixtures::nonpointed()
        .into_iter()
        .filter(|p| p.rank() <= max_rank)
    {
        let hit = pool.iter().enumerate().find_map(|(i, d)| {
            find_relabeling(&d.s, &d.spins, &p.s, &p.spins).map(|perm| (i, perm))
        });
        let Some((i, perm)) = hit else {
            out.push(Divergence::Missing {
                rank: p.rank(),
                dims: p.dims.clone(),
                spins: spin_strings(&p.spins),
            });
            continue;
        };
        let d = pool.swap_remove(i);
        let mut bad = Vec::new();
        if d.central_charge != p.central_charge {
            bad.push("central_charge");
        }
        if d.ord_t != p.ord_t {
            bad.push("ord_t");
        }
        if d.conductor_s != p.conductor_s {
            bad.push("conductor_s");
        }
        if (0..d.rank()).any(|k| d.fs2[k] != p.fs2[perm[k]]) {
            bad.push("fs2");
        }
        for field in bad {
            out.push(Divergence::Mismatch {
                rank: p.rank(),
                dims: p.dims.clone(),
                field: field.into(),
            });
        }
    }
    for d in pool {
        out.push(Divergence::Unexpected {
            rank: d.rank(),
            dims: dims_of(d),
            spins: spin_strings(&d.spins),
        });
    }
    out
}
