//! Invariant suites run over a corpus of diagrams.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Ring;
use crate::burnside;
use crate::complexes::{build_complex, build_with, odd_splitting_check, ses_even_unified_odd, unified_pullback_check, Bigrading, SesVariant};
use crate::corpus;
use crate::cube;
use crate::diagram::OrientedDiagram;
use crate::error::{Error, Result};
use crate::homology::{homology, Coeffs};
use crate::jones::unnormalized_jones;
use crate::linalg::snf::Invariants;
use crate::resolution::Assigned;

pub const SUITES: &[&str] = &["d2", "mod2", "jones", "pullback", "ses", "splitting", "burnside", "invariance"];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub diagrams: usize,
    pub failures: Vec<String>,
    /// Hexagons checked (burnside suite only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hexagons: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub type Table = BTreeMap<Bigrading, Invariants>;

pub fn z_homology(d: &OrientedDiagram, ring: Ring) -> Result<Table> {
    Ok(homology(&build_complex(d, ring)?, Coeffs::Z))
}

fn bp_of(d: &OrientedDiagram) -> Option<u32> {
    d.edges().first().copied().or(d.free_loops().first().copied())
}

/// One diagram through one suite; `Ok(None)` on success, `Ok(Some(msg))` on failure.
pub fn check(suite: &str, d: &OrientedDiagram, seed: u64) -> Result<(Option<String>, usize)> {
    let fail = |ok: bool, what: &str| if ok { None } else { Some(format!("{what}: {d}")) };
    Ok(match suite {
        "d2" => {
            let ok = [Ring::Even, Ring::Odd, Ring::Unified, Ring::Mod2]
                .into_iter()
                .map(|r| build_complex(d, r).map(|c| c.is_chain_complex()))
                .collect::<Result<Vec<_>>>()?;
            (fail(ok.iter().all(|&b| b), "d^2 != 0"), 0)
        }
        "mod2" => {
            let e = build_complex(d, Ring::Even)?;
            let o = build_complex(d, Ring::Odd)?;
            (fail(e.d.mod2() == o.d.mod2(), "mod-2 complexes differ"), 0)
        }
        "jones" => (fail(build_complex(d, Ring::Even)?.euler() == unnormalized_jones(d), "Euler characteristic differs from bracket"), 0),
        "pullback" => (fail(unified_pullback_check(d)?.passed(), "pullback"), 0),
        "ses" => {
            let ok = [SesVariant::EvenUnifiedOdd, SesVariant::OddUnifiedEven]
                .into_iter()
                .map(|v| ses_even_unified_odd(d, v).map(|s| s.report.passed()))
                .collect::<Result<Vec<_>>>()?;
            (fail(ok.iter().all(|&b| b), "short exact sequence"), 0)
        }
        "splitting" => {
            let b = d.with_basepoint(d.basepoint().or(bp_of(d)))?;
            (fail(odd_splitting_check(&b)?.passed(), "odd splitting"), 0)
        }
        "burnside" => {
            let r = burnside::verify(d)?;
            (fail(r.passed(), "burnside"), r.hexagons)
        }
        "invariance" => (invariance(d, seed)?.first().cloned(), 0),
        other => return Err(Error::Internal(format!("unknown suite '{other}'"))),
    })
}

/// Homology under crossing reorder, arrow flips, an alternate edge
/// assignment and a random Reidemeister move; returns the failures.
pub fn invariance(d: &OrientedDiagram, seed: u64) -> Result<Vec<String>> {
    let mut rng = corpus::rng(seed);
    let n = d.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let flips: Vec<bool> = d.arrows().iter().map(|&a| a ^ rng.gen_bool(0.5)).collect();
    let mut order: Vec<usize> = (0..cube::edges(n).len()).collect();
    order.shuffle(&mut rng);
    let moved = corpus::random_reidemeister(d, &mut rng);
    let mut failures = Vec::new();
    for ring in [Ring::Even, Ring::Odd] {
        let base = z_homology(d, ring)?;
        let mut variants = vec![
            ("reorder".to_string(), z_homology(&d.reorder(&perm)?, ring)?),
            ("arrows".to_string(), z_homology(&d.set_crossing_orientations(&flips)?, ring)?),
            ("edge assignment".to_string(), homology(&build_with(d, &Assigned::new(d, Some(&order))?, ring, false)?, Coeffs::Z)),
        ];
        if let Some(m) = &moved {
            variants.push((format!("{m}"), z_homology(&m.apply(d)?, ring)?));
        }
        for (what, h) in variants {
            if h != base {
                failures.push(format!("{ring:?} homology changes under {what}: {d}"));
            }
        }
    }
    Ok(failures)
}

pub fn run_suite(suite: &str, corpus: &[OrientedDiagram], seed: u64) -> Result<SuiteResult> {
    let results: Vec<(Option<String>, usize)> =
        corpus.par_iter().enumerate().map(|(k, d)| check(suite, d, seed.wrapping_add(k as u64))).collect::<Result<_>>()?;
    let failures = results.iter().filter_map(|r| r.0.clone()).collect();
    let hexagons = (suite == "burnside").then(|| results.iter().map(|r| r.1).sum());
    let warning = corpus.is_empty().then(|| "empty corpus; suite passes vacuously".to_string());
    Ok(SuiteResult { suite: suite.to_string(), diagrams: corpus.len(), failures, hexagons, warning })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_on_trefoil() {
        let ds = vec![corpus::named("trefoil_right").unwrap(), corpus::named("hopf").unwrap()];
        for s in SUITES {
            let r = run_suite(s, &ds, 1).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.failures);
        }
        assert!(run_suite("burnside", &ds, 1).unwrap().hexagons.unwrap() > 0);
    }

    #[test]
    fn empty_corpus_is_vacuous() {
        let r = run_suite("d2", &[], 0).unwrap();
        assert!(r.passed() && r.warning.is_some());
    }
}
