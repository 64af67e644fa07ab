use std::collections::{BTreeMap, HashMap};

use oneshot_pir::protocol::{accepts, QueryProtocol, QueryRandomness, RandomnessLayout};
use oneshot_pir::{PirError, Result};
use rayon::prelude::*;

use super::{collusion_sets, subset_label, AuditReport, CheckRow, Status};

/// Largest number of raw randomness states enumerated.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Exact counts of the query tuple seen by one server subset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DistributionTable {
    pub counts: BTreeMap<Vec<u32>, u64>,
    pub total: u64,
}

fn state_count(q: u32, coords: usize) -> Option<u64> {
    let mut n: u64 = 1;
    for _ in 0..coords {
        n = n.checked_mul(q as u64).filter(|&n| n <= ENUMERATION_LIMIT)?;
    }
    Some(n)
}

fn unpack(layout: &RandomnessLayout, q: u32, mut index: u64) -> QueryRandomness {
    let mut digit = || {
        let d = (index % q as u64) as u32;
        index /= q as u64;
        d
    };
    let informative =
        layout.informative_columns.iter().map(|_| (0..layout.informative_dim).map(|_| digit()).collect()).collect();
    let noise = layout
        .noise
        .iter()
        .map(|f| (0..f.count).map(|_| (0..f.dim).map(|_| digit()).collect()).collect())
        .collect();
    QueryRandomness { informative, noise }
}

/// Exact distributions, one per subset in `subsets`, of what those servers
/// receive when retrieving `desired`. Every sampler state in the support is
/// enumerated once; all states are equally likely under the sampler.
pub fn enumerate_tables<P: QueryProtocol + Sync + ?Sized>(
    p: &P,
    subsets: &[Vec<usize>],
    desired: usize,
) -> Result<Vec<DistributionTable>> {
    let layout = p.layout(desired)?;
    let q = p.modulus().q();
    let states = state_count(q, layout.coordinates()).ok_or_else(|| {
        PirError::InfeasibleParameters(format!(
            "enumeration needs {q}^{} states, above the limit of {ENUMERATION_LIMIT}",
            layout.coordinates()
        ))
    })?;
    let empty = || vec![HashMap::<Vec<u32>, u64>::new(); subsets.len()];
    let maps = (0..states)
        .into_par_iter()
        .try_fold(empty, |mut maps, index| -> Result<_> {
            let r = unpack(&layout, q, index);
            if !accepts(p, &layout, &r) {
                return Ok(maps);
            }
            let (batch, _) = p.assemble(desired, &r)?;
            for (map, j) in maps.iter_mut().zip(subsets) {
                let key: Vec<u32> = j.iter().flat_map(|&s| batch.server(s).iter().flat_map(|v| v.as_slice().iter().copied())).collect();
                *map.entry(key).or_insert(0) += 1;
            }
            Ok(maps)
        })
        .try_reduce(empty, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                for (k, c) in y {
                    *x.entry(k).or_insert(0) += c;
                }
            }
            Ok(a)
        })?;
    Ok(maps
        .into_iter()
        .map(|m| {
            let counts: BTreeMap<_, _> = m.into_iter().collect();
            let total = counts.values().sum();
            DistributionTable { counts, total }
        })
        .collect())
}

/// Exact distribution of the queries sent to the servers in `subset`.
pub fn enumerate_query_distribution<P: QueryProtocol + Sync + ?Sized>(
    p: &P,
    subset: &[usize],
    desired: usize,
) -> Result<DistributionTable> {
    Ok(enumerate_tables(p, &[subset.to_vec()], desired)?.remove(0))
}

/// First tuple whose probability differs between the two tables.
fn witness(a: &DistributionTable, b: &DistributionTable) -> Option<Vec<u32>> {
    let differs = |k: &Vec<u32>| {
        let ca = a.counts.get(k).copied().unwrap_or(0) as u128 * b.total as u128;
        let cb = b.counts.get(k).copied().unwrap_or(0) as u128 * a.total as u128;
        ca != cb
    };
    a.counts.keys().chain(b.counts.keys()).find(|k| differs(k)).cloned()
}

/// Compares, for every `t`-subset of servers, the exact query distributions
/// for the two desired indices of `pair`.
pub fn privacy_exact_check<P: QueryProtocol + Sync + ?Sized>(
    p: &P,
    collusion: usize,
    pair: (usize, usize),
) -> Result<AuditReport> {
    let subsets = collusion_sets(p.servers(), collusion);
    let first = enumerate_tables(p, &subsets, pair.0)?;
    let second = enumerate_tables(p, &subsets, pair.1)?;
    let mut report = AuditReport::default();
    for ((j, a), b) in subsets.iter().zip(&first).zip(&second) {
        let w = witness(a, b);
        let detail = match &w {
            None => format!("{} tuples; {} and {} accepted states", a.counts.len(), a.total, b.total),
            Some(t) => format!(
                "witness {:?}: {}/{} vs {}/{}",
                t,
                a.counts.get(t).copied().unwrap_or(0),
                a.total,
                b.counts.get(t).copied().unwrap_or(0),
                b.total
            ),
        };
        report.rows.push(CheckRow {
            check: "privacy_exact".into(),
            scope: format!("J={} m={},{}", subset_label(j), pair.0 + 1, pair.1 + 1),
            status: if w.is_none() { Status::Pass } else { Status::Fail },
            statistic: None,
            p_value: None,
            detail,
        });
    }
    Ok(report)
}
