//! Dynamic stochastic block model generator.
//!
//! Memberships evolve under either a per-step Bernoulli switching process
//! (one draw from the transition row per node per interval) or a continuous
//! Poisson process on `[0, 1]`. Snapshots are drawn independently per time
//! point with `P(A_ij = 1) = rho * B[m_i][m_j]` for `i != j`.
//!
//! Random streams: memberships of the Bernoulli process use
//! `(seed, STREAM_MEMBERSHIP, t)`, the Poisson process uses
//! `(seed, STREAM_POISSON, node)`, and edges of snapshot `t` use
//! `(seed, STREAM_EDGES, t)`.

use faer::Mat;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MembershipSequence;
use crate::network::{Adjacency, AdjacencySeries};
use crate::rng::{stream, STREAM_EDGES, STREAM_MEMBERSHIP, STREAM_POISSON};

pub type Matrix = Vec<Vec<f64>>;

const ROW_SUM_TOL: f64 = 1e-12;

pub const REFERENCE_B_ODD: [[f64; 3]; 3] = [[0.62, 0.22, 0.46], [0.22, 0.62, 0.46], [0.46, 0.46, 0.85]];
pub const REFERENCE_B_EVEN: [[f64; 3]; 3] = [[0.22, 0.62, 0.46], [0.62, 0.22, 0.46], [0.46, 0.46, 0.85]];
pub const REFERENCE_INITIAL_SIZES: [usize; 3] = [200, 50, 250];

fn to_matrix<const K: usize>(m: &[[f64; K]; K]) -> Matrix {
    m.iter().map(|r| r.to_vec()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Poisson,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    Constant,
    Alternating,
    Explicit,
}

/// Connectivity matrices over the time grid.
///
/// `constant` holds one matrix; `alternating` holds `[odd, even]`, used when
/// the 1-based time index is odd or even; `explicit` holds one per time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivitySchedule {
    pub mode: ScheduleMode,
    pub matrices: Vec<Matrix>,
}

impl ConnectivitySchedule {
    pub fn constant(b: Matrix) -> Self {
        Self { mode: ScheduleMode::Constant, matrices: vec![b] }
    }

    pub fn alternating(odd: Matrix, even: Matrix) -> Self {
        Self { mode: ScheduleMode::Alternating, matrices: vec![odd, even] }
    }

    pub fn explicit(matrices: Vec<Matrix>) -> Self {
        Self { mode: ScheduleMode::Explicit, matrices }
    }

    /// The homophilic/heterophilic alternation of the reference simulation.
    pub fn reference() -> Self {
        Self::alternating(to_matrix(&REFERENCE_B_ODD), to_matrix(&REFERENCE_B_EVEN))
    }

    /// Matrix at 0-based time index `t`.
    pub fn at(&self, t: usize) -> &Matrix {
        match self.mode {
            ScheduleMode::Constant => &self.matrices[0],
            ScheduleMode::Alternating => &self.matrices[if (t + 1) % 2 == 1 { 0 } else { 1 }],
            ScheduleMode::Explicit => &self.matrices[t],
        }
    }

    pub fn validate(&self, k: usize, time_points: usize) -> Result<()> {
        let expected = match self.mode {
            ScheduleMode::Constant => 1,
            ScheduleMode::Alternating => 2,
            ScheduleMode::Explicit => time_points,
        };
        if self.matrices.len() != expected {
            return Err(Error::invalid(format!(
                "{:?} schedule needs {expected} matrices, got {}",
                self.mode,
                self.matrices.len()
            )));
        }
        self.matrices.iter().try_for_each(|b| validate_connectivity(b, k))
    }
}

fn validate_connectivity(b: &Matrix, k: usize) -> Result<()> {
    if b.len() != k || b.iter().any(|r| r.len() != k) {
        return Err(Error::matrix(format!("connectivity matrix must be {k}x{k}")));
    }
    for (i, row) in b.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::matrix(format!("connectivity entry {x} outside [0, 1]")));
            }
            if x != b[j][i] {
                return Err(Error::matrix("connectivity matrix must be symmetric"));
            }
        }
    }
    Ok(())
}

fn validate_transition(m: &Matrix, k: usize) -> Result<()> {
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return Err(Error::matrix(format!("transition matrix must be {k}x{k}")));
    }
    for (i, row) in m.iter().enumerate() {
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::matrix(format!("transition row {i} has entries outside [0, 1]")));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::matrix(format!("transition row {i} sums to {s}, not 1")));
        }
    }
    Ok(())
}

/// Three-community transition matrix whose stationary sizes are proportional
/// to (4, 1, 5): communities 1 and 2 drain into 3 at rate `gamma`, and 3
/// splits its outflow 4:1 between them.
pub fn stationary_markov_transition(gamma: f64) -> Result<Matrix> {
    if !(0.0..=5.0 / 9.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma must lie in [0, 5/9], got {gamma}")));
    }
    Ok(vec![
        vec![1.0 - gamma, 0.0, gamma],
        vec![0.0, 1.0 - gamma, gamma],
        vec![0.8 * gamma, 0.2 * gamma, 1.0 - gamma],
    ])
}

/// Stay with probability `1 - p`, otherwise move to one of the other `K - 1`
/// communities uniformly.
pub fn uniform_switching_transition(k: usize, p: f64) -> Result<Matrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("switching probability must lie in [0, 1], got {p}")));
    }
    if k == 1 {
        return Ok(vec![vec![1.0]]);
    }
    let off = p / (k - 1) as f64;
    Ok((0..k).map(|i| (0..k).map(|j| if i == j { 1.0 - p } else { off }).collect()).collect())
}

/// Connectivity for 1-based time index `t_index`: odd indices get the
/// homophilic matrix, even indices the heterophilic one.
pub fn alternating_connectivity_schedule(t_index: usize, _time_points: usize) -> Matrix {
    if t_index % 2 == 1 {
        to_matrix(&REFERENCE_B_ODD)
    } else {
        to_matrix(&REFERENCE_B_EVEN)
    }
}

/// Everything needed to generate one dynamic SBM instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub time_points: usize,
    pub gamma: f64,
    pub rho: f64,
    pub process: Process,
    /// Row-stochastic destination law. When absent, nodes switch with
    /// probability `gamma / T` per interval (Bernoulli) or at rate `gamma`
    /// (Poisson), moving to another community uniformly at random.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Matrix>,
    pub initial_sizes: Vec<usize>,
    pub connectivity: ConnectivitySchedule,
    pub seed: u64,
}

impl ScenarioConfig {
    /// The reference simulation: n = 500, T = 50, K = 3, initial sizes
    /// (200, 50, 250), the stationary three-community transition matrix and
    /// alternating connectivity.
    pub fn reference(gamma: f64, rho: f64, seed: u64) -> Result<Self> {
        Ok(Self {
            n: 500,
            k: 3,
            time_points: 50,
            gamma,
            rho,
            process: Process::Bernoulli,
            transition: Some(stationary_markov_transition(gamma)?),
            initial_sizes: REFERENCE_INITIAL_SIZES.to_vec(),
            connectivity: ConnectivitySchedule::reference(),
            seed,
        })
    }

    /// Rescales to `n` nodes keeping the initial community proportions.
    pub fn with_nodes(mut self, n: usize) -> Self {
        self.initial_sizes = proportional_sizes(&self.initial_sizes, n);
        self.n = n;
        self
    }

    pub fn transition_matrix(&self) -> Result<Matrix> {
        match &self.transition {
            Some(m) => Ok(m.clone()),
            None => match self.process {
                Process::Bernoulli => {
                    uniform_switching_transition(self.k, self.gamma / self.time_points as f64)
                }
                // only the off-diagonal shape matters for the Poisson process
                Process::Poisson => uniform_switching_transition(self.k, 1.0),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 || self.time_points == 0 {
            return Err(Error::invalid("n, K and T must be positive"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be nonnegative, got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        if self.initial_sizes.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: self.initial_sizes.len() });
        }
        let total: usize = self.initial_sizes.iter().sum();
        if total != self.n {
            return Err(Error::invalid(format!("initial sizes sum to {total}, expected n={}", self.n)));
        }
        let transition = self.transition_matrix()?;
        validate_transition(&transition, self.k)?;
        if self.process == Process::Poisson && self.gamma > 0.0 && self.k > 1 {
            for (i, row) in transition.iter().enumerate() {
                let off: f64 = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p).sum();
                if off <= 0.0 {
                    return Err(Error::matrix(format!(
                        "transition row {i} has no off-diagonal mass for Poisson switches"
                    )));
                }
            }
        }
        self.connectivity.validate(self.k, self.time_points)
    }

    pub fn initial_labels(&self) -> Vec<usize> {
        self.initial_sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &size)| std::iter::repeat_n(c + 1, size))
            .collect()
    }
}

/// Largest-remainder apportionment of `n` in the proportions of `sizes`.
pub fn proportional_sizes(sizes: &[usize], n: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        let mut out = vec![0; sizes.len()];
        if let Some(first) = out.first_mut() {
            *first = n;
        }
        return out;
    }
    let mut out: Vec<usize> = sizes.iter().map(|&s| s * n / total).collect();
    let mut remainders: Vec<(usize, usize)> =
        sizes.iter().enumerate().map(|(i, &s)| ((s * n) % total, i)).collect();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = n - out.iter().sum::<usize>();
    for &(_, i) in remainders.iter().take(missing) {
        out[i] += 1;
    }
    out
}

fn draw_from_row<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for (j, &p) in row.iter().enumerate() {
        if u < p {
            return j;
        }
        u -= p;
    }
    // rounding left a sliver of mass past the last bin; return the last positive entry
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

/// Memberships under per-interval switching: the first time point carries the
/// initial labels, and each later label is drawn from the transition row of
/// the previous one.
pub fn simulate_memberships_bernoulli(config: &ScenarioConfig) -> Result<MembershipSequence> {
    config.validate()?;
    let transition = config.transition_matrix()?;
    let mut labels = vec![config.initial_labels()];
    for t in 1..config.time_points {
        let mut rng = stream(config.seed, &[STREAM_MEMBERSHIP, t as u64]);
        let prev = &labels[t - 1];
        let next: Vec<usize> =
            prev.iter().map(|&l| draw_from_row(&transition[l - 1], &mut rng) + 1).collect();
        labels.push(next);
    }
    MembershipSequence::new(config.k, labels)
}

/// One community switch of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub from: usize,
    pub to: usize,
}

/// Per-node switch times, strictly increasing within each node.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<Vec<SwitchEvent>>,
}

impl EventLog {
    pub fn total(&self) -> usize {
        self.events.iter().map(Vec::len).sum()
    }
}

/// Memberships under a rate-`gamma` Poisson switching process on `[0, 1]`.
///
/// Nodes start from the initial labels at time 0. At each event the node moves
/// to another community drawn from the off-diagonal part of its transition
/// row, renormalized. Labels are recorded at the grid times `1/T, ..., 1`.
pub fn simulate_memberships_poisson(
    config: &ScenarioConfig,
) -> Result<(MembershipSequence, EventLog)> {
    config.validate()?;
    let transition = config.transition_matrix()?;
    let t_count = config.time_points;
    let initial = config.initial_labels();
    let mut labels = vec![vec![0; config.n]; t_count];
    let mut log = EventLog { events: Vec::with_capacity(config.n) };
    let gap = (config.gamma > 0.0).then(|| Exp::new(config.gamma).expect("positive rate"));

    for (node, &start) in initial.iter().enumerate() {
        let mut rng = stream(config.seed, &[STREAM_POISSON, node as u64]);
        let mut events = Vec::new();
        let mut current = start;
        let mut clock = 0.0;
        if let (Some(gap), true) = (&gap, config.k > 1) {
            loop {
                clock += gap.sample(&mut rng);
                if clock > 1.0 {
                    break;
                }
                let mut row = transition[current - 1].clone();
                row[current - 1] = 0.0;
                let mass: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= mass);
                let to = draw_from_row(&row, &mut rng) + 1;
                events.push(SwitchEvent { time: clock, from: current, to });
                current = to;
            }
        }
        let mut label = start;
        let mut next_event = 0;
        for (t, row) in labels.iter_mut().enumerate() {
            let at = (t + 1) as f64 / t_count as f64;
            while next_event < events.len() && events[next_event].time <= at {
                label = events[next_event].to;
                next_event += 1;
            }
            row[node] = label;
        }
        log.events.push(events);
    }
    Ok((MembershipSequence::new(config.k, labels)?, log))
}

pub fn simulate_memberships(config: &ScenarioConfig) -> Result<MembershipSequence> {
    match config.process {
        Process::Bernoulli => simulate_memberships_bernoulli(config),
        Process::Poisson => simulate_memberships_poisson(config).map(|(m, _)| m),
    }
}

fn check_density(b: &Matrix, rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho must lie in [0, 1], got {rho}")));
    }
    validate_connectivity(b, b.len())?;
    if b.iter().flatten().any(|&x| !(0.0..=1.0).contains(&(rho * x))) {
        return Err(Error::matrix("rho * B has entries outside [0, 1]"));
    }
    Ok(())
}

/// `Q = rho * M B M^T` and `P = Q - diag(Q)` for the membership row `labels`.
pub fn build_probability_matrix(labels: &[usize], b: &Matrix, rho: f64) -> Result<(Mat<f64>, Mat<f64>)> {
    check_density(b, rho)?;
    crate::model::validate_labels(labels, b.len())?;
    let n = labels.len();
    let q = Mat::from_fn(n, n, |i, j| rho * b[labels[i] - 1][labels[j] - 1]);
    let p = Mat::from_fn(n, n, |i, j| if i == j { 0.0 } else { q[(i, j)] });
    Ok((q, p))
}

/// Draws `A_ij ~ Bernoulli(prob(i, j))` for `i > j` in row-major order, one
/// uniform per pair, and mirrors.
fn sample_with<R: Rng>(n: usize, rng: &mut R, prob: impl Fn(usize, usize) -> f64) -> Adjacency {
    let mut a = Adjacency::empty(n);
    for i in 1..n {
        for j in 0..i {
            let u: f64 = rng.random();
            if u < prob(i, j) {
                a.add_edge(i, j).expect("in range, off-diagonal");
            }
        }
    }
    a
}

/// Samples a symmetric adjacency matrix from an edge-probability matrix.
pub fn sample_network(p: faer::MatRef<'_, f64>, seed: u64) -> Result<Adjacency> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::matrix("probability matrix must be square"));
    }
    for i in 0..n {
        if p[(i, i)] != 0.0 {
            return Err(Error::matrix("probability matrix must have a zero diagonal"));
        }
        for j in 0..i {
            let x = p[(i, j)];
            if !(0.0..=1.0).contains(&x) || x != p[(j, i)] {
                return Err(Error::matrix(format!("invalid edge probability at ({i}, {j})")));
            }
        }
    }
    let mut rng = stream(seed, &[STREAM_EDGES]);
    Ok(sample_with(n, &mut rng, |i, j| p[(i, j)]))
}

/// Ground truth retained alongside a generated series.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub memberships: MembershipSequence,
    /// Connectivity matrix used at each time point.
    pub connectivity: Vec<Matrix>,
    pub rho: f64,
}

impl GroundTruth {
    /// `(Q, P)` at 0-based time index `t`, rebuilt on demand.
    pub fn probability_matrices(&self, t: usize) -> Result<(Mat<f64>, Mat<f64>)> {
        build_probability_matrix(self.memberships.row(t), &self.connectivity[t], self.rho)
    }
}

/// Memberships, then one independent snapshot per time point.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<(AdjacencySeries, GroundTruth)> {
    let memberships = simulate_memberships(config)?;
    let connectivity: Vec<Matrix> =
        (0..config.time_points).map(|t| config.connectivity.at(t).clone()).collect();
    for b in &connectivity {
        check_density(b, config.rho)?;
    }
    let snapshots = (0..config.time_points)
        .map(|t| {
            let labels = memberships.row(t);
            let b = &connectivity[t];
            let mut rng = stream(config.seed, &[STREAM_EDGES, t as u64]);
            sample_with(config.n, &mut rng, |i, j| config.rho * b[labels[i] - 1][labels[j] - 1])
        })
        .collect();
    let series = AdjacencySeries::new(snapshots)?;
    Ok((series, GroundTruth { memberships, connectivity, rho: config.rho }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(process: Process, gamma: f64) -> ScenarioConfig {
        ScenarioConfig {
            n: 30,
            k: 2,
            time_points: 6,
            gamma,
            rho: 0.5,
            process,
            transition: None,
            initial_sizes: vec![15, 15],
            connectivity: ConnectivitySchedule::constant(vec![vec![0.9, 0.1], vec![0.1, 0.9]]),
            seed: 5,
        }
    }

    #[test]
    fn markov_matrix_values() {
        let m = stationary_markov_transition(0.1).unwrap();
        let expected = [[0.9, 0.0, 0.1], [0.0, 0.9, 0.1], [0.08, 0.02, 0.9]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
        let id = stationary_markov_transition(0.0).unwrap();
        assert!(id.iter().enumerate().all(|(i, r)| r[i] == 1.0));
        assert!(stationary_markov_transition(0.6).is_err());
        assert!(stationary_markov_transition(-0.1).is_err());
    }

    #[test]
    fn markov_flow_balance() {
        let g = 0.2;
        let m = stationary_markov_transition(g).unwrap();
        let sizes = [200.0, 50.0, 250.0];
        for k in 0..3 {
            let next: f64 = (0..3).map(|j| sizes[j] * m[j][k]).sum();
            assert!((next - sizes[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn schedule_alternates() {
        assert_eq!(alternating_connectivity_schedule(1, 50), to_matrix(&REFERENCE_B_ODD));
        assert_eq!(alternating_connectivity_schedule(2, 50), to_matrix(&REFERENCE_B_EVEN));
        let s = ConnectivitySchedule::reference();
        assert_eq!(s.at(0), &to_matrix(&REFERENCE_B_ODD));
        assert_eq!(s.at(1), &to_matrix(&REFERENCE_B_EVEN));
    }

    #[test]
    fn even_matrix_is_indefinite() {
        let (a, b) = (REFERENCE_B_EVEN[0][0], REFERENCE_B_EVEN[0][1]);
        // eigenvalues of [[a, b], [b, a]] are a +- b
        assert!(a - b < 0.0);
        assert!((a - b + 0.4).abs() < 1e-12);
    }

    #[test]
    fn probability_matrix_examples() {
        let b = vec![vec![1.0]];
        let (q, p) = build_probability_matrix(&[1, 1], &b, 0.5).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(q[(i, j)], 0.5);
                assert_eq!(p[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
        let (q, _) = build_probability_matrix(&[1, 1], &b, 0.0).unwrap();
        assert_eq!(q[(0, 1)], 0.0);
        assert!(build_probability_matrix(&[1, 1], &vec![vec![1.5]], 0.5).is_err());
    }

    #[test]
    fn sample_extremes() {
        let zero = Mat::<f64>::zeros(10, 10);
        assert_eq!(sample_network(zero.as_ref(), 1).unwrap().edge_count(), 0);
        let one = Mat::from_fn(10, 10, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(sample_network(one.as_ref(), 1).unwrap(), Adjacency::complete(10));
        let bad = Mat::from_fn(3, 3, |_, _| 0.5);
        assert!(sample_network(bad.as_ref(), 1).is_err());
    }

    #[test]
    fn gamma_zero_is_constant() {
        let mut c = small(Process::Bernoulli, 0.0);
        let m = simulate_memberships_bernoulli(&c).unwrap();
        assert!(m.rows().iter().all(|r| r == m.row(0)));
        c.process = Process::Poisson;
        let (m, log) = simulate_memberships_poisson(&c).unwrap();
        assert_eq!(log.total(), 0);
        assert!(m.rows().iter().all(|r| r == &c.initial_labels()));
    }

    #[test]
    fn poisson_events_are_consistent() {
        let c = small(Process::Poisson, 3.0);
        let (m, log) = simulate_memberships_poisson(&c).unwrap();
        for (node, events) in log.events.iter().enumerate() {
            for w in events.windows(2) {
                assert!(w[0].time < w[1].time);
                assert_eq!(w[0].to, w[1].from);
            }
            for e in events {
                assert_ne!(e.from, e.to);
            }
            let final_label = events.last().map_or(c.initial_labels()[node], |e| e.to);
            assert_eq!(m.row(c.time_points - 1)[node], final_label);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = small(Process::Bernoulli, 0.0);
        c.initial_sizes = vec![10, 10];
        assert!(c.validate().is_err());
        let mut c = small(Process::Bernoulli, 0.0);
        c.transition = Some(vec![vec![0.5, 0.4], vec![0.0, 1.0]]);
        assert!(c.validate().is_err());
        let mut c = small(Process::Bernoulli, 0.0);
        c.connectivity = ConnectivitySchedule::constant(vec![vec![0.9, 0.2], vec![0.1, 0.9]]);
        assert!(c.validate().is_err());
        let mut c = small(Process::Poisson, 1.0);
        c.transition = Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn proportional_sizes_sum() {
        assert_eq!(proportional_sizes(&[200, 50, 250], 200), vec![80, 20, 100]);
        assert_eq!(proportional_sizes(&[200, 50, 250], 301).iter().sum::<usize>(), 301);
    }

    #[test]
    fn scenario_determinism_and_invariants() {
        let c = small(Process::Bernoulli, 1.0);
        let (a, ta) = generate_scenario(&c).unwrap();
        let (b, tb) = generate_scenario(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let mut other = c.clone();
        other.seed += 1;
        assert_ne!(generate_scenario(&other).unwrap().0, a);
        for snap in a.snapshots() {
            let d = snap.to_dense();
            for i in 0..snap.n() {
                assert_eq!(d[(i, i)], 0.0);
                for j in 0..snap.n() {
                    assert_eq!(d[(i, j)], d[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn sbm_sampler_matches_generic_sampler() {
        let c = small(Process::Bernoulli, 0.0);
        let (series, truth) = generate_scenario(&c).unwrap();
        let (_, p) = truth.probability_matrices(2).unwrap();
        let mut rng = stream(c.seed, &[STREAM_EDGES, 2]);
        let again = sample_with(c.n, &mut rng, |i, j| p[(i, j)]);
        assert_eq!(&again, series.snapshot(2));
    }
}
