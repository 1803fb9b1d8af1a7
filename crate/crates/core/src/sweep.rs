//! Seeded error-rate sweeps and their CSV renderings.
//!
//! Every trial owns the substream indexed by a global trial counter, so a
//! sweep is a pure function of `(flags, seed)` no matter how many worker
//! threads execute it.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{vnr_to_sigma2, ChannelParams};
use crate::decoder::{build_constellation, run_trial, Constellation};
use crate::lattice::Lattice;
use crate::rng::{StreamId, SubstreamFamily};
use crate::{Error, Result};

/// One Monte Carlo grid point of an error-rate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rotation: String,
    pub dim: usize,
    pub q: u32,
    pub k: f64,
    pub vnr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub error_rate: f64,
    pub stderr: f64,
}

/// Rows of a finished sweep, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// CSV with the VNR-major column order.
    pub fn to_csv_vnr(&self) -> String {
        let mut out = String::from("rotation,dim,q,K,vnr_db,trials,errors,error_rate,stderr\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.rotation, r.dim, r.q, r.k, r.vnr_db, r.trials, r.errors, r.error_rate, r.stderr
            );
        }
        out
    }

    /// CSV with the K-major column order.
    pub fn to_csv_k(&self) -> String {
        let mut out = String::from("rotation,dim,q,vnr_db,K,trials,errors,error_rate,stderr\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.rotation, r.dim, r.q, r.vnr_db, r.k, r.trials, r.errors, r.error_rate, r.stderr
            );
        }
        out
    }
}

/// Counts decode errors over `trials` trials, using substreams
/// `first_index..first_index + trials` of the family.
pub fn count_errors(
    constellation: &Constellation,
    params: &ChannelParams,
    trials: u64,
    family: SubstreamFamily,
    first_index: u64,
) -> Result<u64> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    // Fail fast on bad parameters; worker closures then cannot error.
    run_trial(constellation, params, &mut family.substream(first_index))?;
    let errors = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = family.substream(first_index + i);
            u64::from(!run_trial(constellation, params, &mut rng).expect("parameters validated"))
        })
        .sum();
    Ok(errors)
}

fn rate_row(
    rotation: &str,
    constellation: &Constellation,
    k: f64,
    vnr_db: f64,
    trials: u64,
    family: SubstreamFamily,
    first_index: u64,
) -> Result<SweepRow> {
    let sigma2 = vnr_to_sigma2(vnr_db, constellation.lattice().volume(), constellation.dim())?;
    let params = ChannelParams::new(k, sigma2, constellation.dim())?;
    let errors = count_errors(constellation, &params, trials, family, first_index)?;
    let error_rate = errors as f64 / trials as f64;
    let stderr = (error_rate * (1.0 - error_rate) / trials as f64).sqrt();
    Ok(SweepRow {
        rotation: rotation.to_string(),
        dim: constellation.dim(),
        q: constellation.q(),
        k,
        vnr_db,
        trials,
        errors,
        error_rate,
        stderr,
    })
}

/// Error rate of one rotation across a VNR grid at fixed K.
pub fn sweep_vnr(
    rotation: &str,
    lattice: &Lattice,
    q: u32,
    k: f64,
    vnr_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SweepTable> {
    let constellation = build_constellation(lattice, q)?;
    let family = SubstreamFamily::new(seed, StreamId::SweepTrial);
    let mut rows = Vec::with_capacity(vnr_grid.len());
    for (point, &vnr_db) in vnr_grid.iter().enumerate() {
        rows.push(rate_row(
            rotation,
            &constellation,
            k,
            vnr_db,
            trials,
            family,
            point as u64 * trials,
        )?);
    }
    Ok(SweepTable { rows })
}

/// Error rates of one or more rotations across a K grid at fixed VNR.
pub fn sweep_k(
    rotations: &[(String, Lattice)],
    q: u32,
    vnr_db: f64,
    k_list: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SweepTable> {
    let family = SubstreamFamily::new(seed, StreamId::SweepTrial);
    let mut rows = Vec::new();
    let mut point = 0u64;
    for (name, lattice) in rotations {
        let constellation = build_constellation(lattice, q)?;
        for &k in k_list {
            rows.push(rate_row(
                name,
                &constellation,
                k,
                vnr_db,
                trials,
                family,
                point * trials,
            )?);
            point += 1;
        }
    }
    Ok(SweepTable { rows })
}

/// The inclusive VNR grid `start, start+step, ..` up to `stop`.
pub fn vnr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::InvalidBound(step, "VNR step must be positive"));
    }
    if stop < start {
        return Err(Error::InvalidBound(stop, "VNR stop is below start"));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let v = start + f64::from(i) * step;
        if v > stop + step * 1e-9 {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotations::builtin_lattice;

    #[test]
    fn grid_construction() {
        assert_eq!(vnr_grid(4.0, 10.0, 2.0).unwrap(), vec![4.0, 6.0, 8.0, 10.0]);
        assert_eq!(vnr_grid(5.0, 5.0, 1.0).unwrap(), vec![5.0]);
        assert!(vnr_grid(4.0, 10.0, 0.0).is_err());
        assert!(vnr_grid(10.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn sweep_is_reproducible_across_thread_counts() {
        let lattice = builtin_lattice("hadamard", 2).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                sweep_vnr("hadamard", &lattice, 4, 10.0, &[4.0, 8.0], 4000, 31).unwrap()
            })
        };
        let single = run(1);
        let multi = run(4);
        assert_eq!(single, multi);
        assert_eq!(single.to_csv_vnr(), multi.to_csv_vnr());
    }

    #[test]
    fn error_rate_is_monotone_in_vnr() {
        let lattice = builtin_lattice("hadamard", 2).unwrap();
        let table = sweep_vnr("hadamard", &lattice, 4, 20.0, &[2.0, 6.0, 10.0], 20_000, 7).unwrap();
        for pair in table.rows.windows(2) {
            let allowance = 3.0 * (pair[0].stderr + pair[1].stderr);
            assert!(
                pair[1].error_rate <= pair[0].error_rate + allowance,
                "rate rose from {} to {} between {} and {} dB",
                pair[0].error_rate,
                pair[1].error_rate,
                pair[0].vnr_db,
                pair[1].vnr_db
            );
        }
    }

    #[test]
    fn k_sweep_covers_rotation_grid() {
        let rotations = vec![
            ("identity".to_string(), builtin_lattice("identity", 2).unwrap()),
            ("hadamard".to_string(), builtin_lattice("hadamard", 2).unwrap()),
        ];
        let table = sweep_k(&rotations, 4, 8.0, &[0.0, 20.0], 2000, 5).unwrap();
        assert_eq!(table.rows.len(), 4);
        assert_eq!(table.rows[0].rotation, "identity");
        assert_eq!(table.rows[3].rotation, "hadamard");
        let csv = table.to_csv_k();
        assert!(csv.starts_with("rotation,dim,q,vnr_db,K,trials,errors,error_rate,stderr\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn csv_schema_vnr_major() {
        let lattice = builtin_lattice("identity", 1).unwrap();
        let table = sweep_vnr("identity", &lattice, 2, 1e6, &[0.0], 100, 1).unwrap();
        let csv = table.to_csv_vnr();
        assert!(csv.starts_with("rotation,dim,q,K,vnr_db,trials,errors,error_rate,stderr\n"));
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[0], "identity");
        assert_eq!(fields[1], "1");
        assert_eq!(fields[2], "2");
        assert_eq!(fields[3], "1000000");
        assert_eq!(fields[5], "100");
    }
}
