use oneshot_pir::protocol::{instantiate, NoiseSampler, QueryBatch, QueryProtocol};
use oneshot_pir::rng::{label, substream};
use oneshot_pir::{PirError, Result};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{collusion_sets, subset_label, AuditReport, CheckRow, Status};

/// Smallest expected count per cell for a chi-square test.
const MIN_EXPECTED: f64 = 5.0;
const FINGERPRINT_BUCKETS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatConfig {
    /// Samples per desired index; at least `10^4`.
    pub trials: usize,
    pub significance: f64,
    /// Coordinates kept from each block a slot touches; lowered per slot
    /// until every cell expects at least five samples.
    pub width: usize,
    pub sampler: NoiseSampler,
    pub seed: u64,
    pub pair: (usize, usize),
}

impl Default for StatConfig {
    fn default() -> Self {
        StatConfig { trials: 100_000, significance: 0.01, width: 2, sampler: NoiseSampler::Uniform, seed: 0, pair: (0, 1) }
    }
}

struct SlotShape {
    server: usize,
    index: usize,
    blocks: Vec<usize>,
    width: usize,
}

impl SlotShape {
    fn cells(&self, q: u32) -> u64 {
        (q as u64).pow((self.width * self.blocks.len()) as u32)
    }

    fn cell(&self, v: &[u32], block_len: usize, q: u32) -> u64 {
        self.blocks
            .iter()
            .flat_map(|&b| v[b * block_len..b * block_len + self.width].iter())
            .fold(0u64, |acc, &x| acc * q as u64 + x as u64)
    }
}

fn fingerprint(batch: &QueryBatch, subset: &[usize]) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for &s in subset {
        for v in batch.server(s) {
            for &x in v.as_slice() {
                h = (h ^ x as u64).wrapping_mul(0x0100_0000_01B3);
            }
            h = (h ^ 0xFF).wrapping_mul(0x0100_0000_01B3);
        }
    }
    h ^= h >> 33;
    h = h.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    h ^= h >> 33;
    h % FINGERPRINT_BUCKETS
}

fn chi_square_sf(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).map(|d| d.sf(stat)).unwrap_or(0.0)
}

fn uniformity(counts: &[u64], total: u64) -> (f64, f64) {
    let e = total as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
    (stat, chi_square_sf(stat, counts.len() - 1))
}

fn two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    let mut stat = 0.0;
    let mut used = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        used += 1;
        for (o, row) in [(x as f64, na), (y as f64, nb)] {
            let e = row * col / n;
            stat += (o - e).powi(2) / e;
        }
    }
    (stat, chi_square_sf(stat, used.saturating_sub(1)))
}

/// Per-trial observations: one cell per tested slot, one bucket per subset.
fn observe<P: QueryProtocol + Sync + ?Sized>(
    p: &P,
    cfg: &StatConfig,
    desired: usize,
    shapes: &[SlotShape],
    subsets: &[Vec<usize>],
    block_len: usize,
) -> Result<Vec<(Vec<u64>, Vec<u64>)>> {
    let q = p.modulus().q();
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(cfg.seed, &[label("privacy-stat"), desired as u64, t as u64]);
            let (batch, _) = instantiate(p, desired, cfg.sampler, &mut rng)?;
            let cells = shapes
                .iter()
                .map(|s| s.cell(batch.server(s.server)[s.index].as_slice(), block_len, q))
                .collect();
            let buckets = subsets.iter().map(|j| fingerprint(&batch, j)).collect();
            Ok((cells, buckets))
        })
        .collect()
}

/// Chi-square surrogate for `T`-privacy. Each transmitted slot is tested on
/// a projection of the blocks it touches: for uniformity under both desired
/// indices, and for equality across them. Each `T`-subset is tested for
/// equal fingerprint distributions across the two indices. All p-values are
/// Bonferroni-corrected.
///
/// `supports[s][i]` lists the message blocks slot `i` of server `s` touches.
pub fn privacy_statistical_check<P: QueryProtocol + Sync + ?Sized>(
    p: &P,
    collusion: usize,
    supports: &[Vec<Vec<usize>>],
    cfg: &StatConfig,
) -> Result<AuditReport> {
    if cfg.trials < 10_000 {
        return Err(PirError::Parameter(format!("statistical privacy needs at least 10^4 trials, got {}", cfg.trials)));
    }
    if !(cfg.significance > 0.0 && cfg.significance < 1.0) {
        return Err(PirError::Parameter("significance must lie in (0, 1)".into()));
    }
    let q = p.modulus().q();
    let block_len = p.message_len() / p.generator().dimension();
    let mut report = AuditReport::default();
    let mut shapes = Vec::new();
    for (server, slots) in supports.iter().enumerate() {
        for (index, blocks) in slots.iter().enumerate() {
            let mut width = cfg.width.min(block_len);
            while width > 0 && (cfg.trials as f64) < MIN_EXPECTED * (q as f64).powi((width * blocks.len()) as i32) {
                width -= 1;
            }
            let shape = SlotShape { server, index, blocks: blocks.clone(), width };
            if width == 0 {
                report.rows.push(CheckRow {
                    check: "slot_uniformity".into(),
                    scope: format!("server {} slot {}", server + 1, index),
                    status: Status::Inconclusive,
                    statistic: None,
                    p_value: None,
                    detail: "projection width 0".into(),
                });
            } else {
                shapes.push(shape);
            }
        }
    }
    let subsets = collusion_sets(p.servers(), collusion);
    let runs = [cfg.pair.0, cfg.pair.1]
        .iter()
        .map(|&m| observe(p, cfg, m, &shapes, &subsets, block_len))
        .collect::<Result<Vec<_>>>()?;

    // Rank-conditioned vectors are uniform on nonzero vectors only; the
    // missing mass q^{-L/K} must stay below one expected sample.
    let uniform_ok = (q as f64).powi(block_len as i32) >= cfg.trials as f64;
    let tests = if uniform_ok { 3 } else { 1 } * shapes.len() + subsets.len();
    let threshold = cfg.significance / tests.max(1) as f64;
    let verdict = |pv: f64| if pv >= threshold { Status::Pass } else { Status::Fail };

    let histogram = |run: &Vec<(Vec<u64>, Vec<u64>)>, k: usize, cells: u64| {
        let mut counts = vec![0u64; cells as usize];
        for (c, _) in run {
            counts[c[k] as usize] += 1;
        }
        counts
    };
    for (k, shape) in shapes.iter().enumerate() {
        let scope = format!("server {} slot {}", shape.server + 1, shape.index);
        let hists: Vec<Vec<u64>> = runs.iter().map(|run| histogram(run, k, shape.cells(q))).collect();
        for (m, counts) in [cfg.pair.0, cfg.pair.1].iter().zip(&hists) {
            let (status, statistic, p_value) = if uniform_ok {
                let (stat, pv) = uniformity(counts, cfg.trials as u64);
                (verdict(pv), Some(stat), Some(pv))
            } else {
                (Status::Inconclusive, None, None)
            };
            report.rows.push(CheckRow {
                check: "slot_uniformity".into(),
                scope: format!("{scope} m={}", m + 1),
                status,
                statistic,
                p_value,
                detail: if uniform_ok {
                    format!("{} cells, width {}", counts.len(), shape.width)
                } else {
                    format!("q^(L/K) = {q}^{block_len} is below the trial count")
                },
            });
        }
        let (stat, pv) = two_sample(&hists[0], &hists[1]);
        report.rows.push(CheckRow {
            check: "slot_two_sample".into(),
            scope: format!("{scope} m={},{}", cfg.pair.0 + 1, cfg.pair.1 + 1),
            status: verdict(pv),
            statistic: Some(stat),
            p_value: Some(pv),
            detail: format!("{} cells, width {}", hists[0].len(), shape.width),
        });
    }
    for (k, j) in subsets.iter().enumerate() {
        let hist = |run: &Vec<(Vec<u64>, Vec<u64>)>| {
            let mut h = vec![0u64; FINGERPRINT_BUCKETS as usize];
            for (_, b) in run {
                h[b[k] as usize] += 1;
            }
            h
        };
        let (stat, pv) = two_sample(&hist(&runs[0]), &hist(&runs[1]));
        report.rows.push(CheckRow {
            check: "fingerprint_two_sample".into(),
            scope: format!("J={} m={},{}", subset_label(j), cfg.pair.0 + 1, cfg.pair.1 + 1),
            status: verdict(pv),
            statistic: Some(stat),
            p_value: Some(pv),
            detail: format!("{FINGERPRINT_BUCKETS} buckets, threshold {threshold:.3e}"),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_helpers() {
        let (s, p) = uniformity(&[25, 25, 25, 25], 100);
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = uniformity(&[100, 0, 0, 0], 100);
        assert!(p < 1e-10);
        let (s, _) = two_sample(&[10, 20, 0], &[10, 20, 0]);
        assert_eq!(s, 0.0);
        let (_, p) = two_sample(&[1000, 0], &[0, 1000]);
        assert!(p < 1e-10);
    }
}
