use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::ApproxError;
use crate::certificate::ValueFunction;
use crate::chain::{trajectory_rng, MarkovChain, Region, Sampler, StateId};

/// Default number of steps between recorded points.
pub const DEFAULT_STRIDE: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub n: usize,
    pub state: StateId,
    pub statistic: f64,
}

/// Recorded statistic along each simulated trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSeries {
    pub seed: u64,
    pub steps: usize,
    pub stride: usize,
    pub statistic: String,
    pub trajectories: Vec<Vec<SeriesPoint>>,
}

impl SimulationSeries {
    /// Statistic at the last recorded time of each trajectory.
    pub fn finals(&self) -> Vec<f64> {
        self.trajectories
            .iter()
            .map(|t| t.last().map_or(f64::NAN, |p| p.statistic))
            .collect()
    }

    /// Mean over trajectories at each recorded time.
    pub fn mean_curve(&self) -> Vec<(usize, f64)> {
        let Some(first) = self.trajectories.first() else {
            return Vec::new();
        };
        let m = self.trajectories.len() as f64;
        (0..first.len())
            .map(|k| {
                let sum: f64 = self.trajectories.iter().map(|t| t[k].statistic).sum();
                (first[k].n, sum / m)
            })
            .collect()
    }

    /// Columns `trajectory,n,state,statistic`.
    pub fn write_csv(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trajectory", "n", "state", "statistic"])?;
        for (i, t) in self.trajectories.iter().enumerate() {
            for p in t {
                w.write_record([i.to_string(), p.n.to_string(), p.state.to_string(), p.statistic.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `trajectories` independent runs of `steps` states each (times
/// `0..steps`) and records `statistic(Φ_n)` every `stride` steps and at the
/// final time.
pub fn simulate_return_probability(
    chain: &MarkovChain,
    statistic: &ValueFunction,
    steps: usize,
    trajectories: usize,
    seed: u64,
    stride: usize,
) -> Result<SimulationSeries, ApproxError> {
    if steps == 0 || stride == 0 {
        return Err(ApproxError::InvalidLength);
    }
    let runs = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            let mut sampler = Sampler::new(chain);
            let mut current = sampler.start(&mut rng);
            let mut points = Vec::with_capacity(steps / stride + 2);
            let mut cache: Vec<Option<f64>> = Vec::new();
            for n in 0..steps {
                if n > 0 {
                    current = sampler.step(current, &mut rng)?;
                }
                if n % stride == 0 || n + 1 == steps {
                    let state = sampler.state(current).clone();
                    if cache.len() <= current {
                        cache.resize(current + 1, None);
                    }
                    let value = match cache[current] {
                        Some(v) => v,
                        None => *cache[current].insert(statistic.eval(&state)?.to_f64()),
                    };
                    points.push(SeriesPoint {
                        n,
                        state,
                        statistic: value,
                    });
                }
            }
            Ok(points)
        })
        .collect::<Result<Vec<_>, ApproxError>>()?;
    Ok(SimulationSeries {
        seed,
        steps,
        stride,
        statistic: statistic.name().to_string(),
        trajectories: runs,
    })
}

/// Fraction of times `0..steps` spent in `region`, per trajectory.
pub fn visit_frequency(
    chain: &MarkovChain,
    region: &Region,
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<f64>, ApproxError> {
    if steps == 0 {
        return Err(ApproxError::InvalidLength);
    }
    (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            let mut sampler = Sampler::new(chain);
            let mut inside: Vec<Option<bool>> = Vec::new();
            let mut current = sampler.start(&mut rng);
            let mut hits = 0usize;
            for n in 0..steps {
                if n > 0 {
                    current = sampler.step(current, &mut rng)?;
                }
                if inside.len() <= current {
                    inside.resize(current + 1, None);
                }
                let member = *inside[current].get_or_insert_with(|| region.contains(sampler.state(current)));
                hits += usize::from(member);
            }
            Ok(hits as f64 / steps as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::casino::v1;
    use crate::families::{fig3, lending_casino};
    use crate::scalar::rat;

    #[test]
    fn single_step_records_initial_state() {
        let c = lending_casino(rat(1, 20)).unwrap();
        let s = simulate_return_probability(&c, &v1(rat(1, 20)), 1, 3, 9, 100).unwrap();
        for t in &s.trajectories {
            assert_eq!(t.len(), 1);
            assert_eq!(t[0].state, StateId::Int(1));
            assert_eq!(t[0].statistic, 1.0);
        }
    }

    #[test]
    fn recorded_times_increase_and_include_final() {
        let c = lending_casino(rat(1, 20)).unwrap();
        let s = simulate_return_probability(&c, &v1(rat(1, 20)), 1001, 2, 3, 100).unwrap();
        let times: Vec<usize> = s.trajectories[0].iter().map(|p| p.n).collect();
        assert_eq!(times.first(), Some(&0));
        assert_eq!(times.last(), Some(&1000));
        assert!(times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn simulation_is_deterministic() {
        let c = lending_casino(rat(1, 20)).unwrap();
        let a = simulate_return_probability(&c, &v1(rat(1, 20)), 5000, 4, 11, 50).unwrap();
        let b = simulate_return_probability(&c, &v1(rat(1, 20)), 5000, 4, 11, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trivial_frequencies() {
        let c = fig3();
        assert!(visit_frequency(&c, &Region::all(), 100, 5, 1).unwrap().iter().all(|&f| f == 1.0));
        assert!(visit_frequency(&c, &Region::empty(), 100, 5, 1).unwrap().iter().all(|&f| f == 0.0));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let c = lending_casino(rat(1, 20)).unwrap();
        let s = simulate_return_probability(&c, &v1(rat(1, 20)), 201, 2, 5, 100).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trajectory,n,state,statistic");
        assert_eq!(lines.len(), 1 + 2 * 3);
    }
}
