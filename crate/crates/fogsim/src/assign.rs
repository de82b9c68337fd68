//! Request-to-node assignment for one arrival batch.
//!
//! Each candidate (request, node) pairing gets a cost: for fog nodes the
//! optimized surrogate computation energy plus transfer energy at the
//! chosen frequency, for the cloud the exact total energy. Fog nodes
//! accept at most one request per batch, while the cloud has no practical
//! concurrency limit; the matrix therefore replicates every cloud column
//! once per request so the assignment problem stays one-to-one. Pairings
//! that cannot meet the deadline get a finite penalty cost `big_m`, large
//! enough that any assignment avoiding penalties beats any that does not,
//! so a penalty column in the solution identifies a request to reject.
//!
//! The solver is the O(n^2 m) shortest-augmenting-path form of the
//! Hungarian method. A bitmask brute-force minimizer over small matrices
//! backs it in tests.

use crate::cost;
use crate::freq::{self, ScaParams};
use crate::model::{Fleet, ModelError, NodeRef, Request, ScheduleState};

/// Batch cost matrix. Rows are requests in batch order; columns are the
/// fog nodes followed by the replicated cloud columns, replica `k` of
/// cloud `c` sitting at column `n_fogs + c * rows + k`.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    n_fogs: usize,
    n_clouds: usize,
    costs: Vec<f64>,
    fog_freqs: Vec<f64>,
    big_m: f64,
}

impl CostMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.n_fogs + self.rows * self.n_clouds
    }

    pub fn cost(&self, row: usize, col: usize) -> f64 {
        self.costs[row * self.cols() + col]
    }

    /// Penalty value standing in for an infeasible pairing.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn is_penalty(&self, row: usize, col: usize) -> bool {
        self.cost(row, col) >= self.big_m
    }

    /// Node behind a column, collapsing cloud replicas.
    pub fn column_target(&self, col: usize) -> NodeRef {
        if col < self.n_fogs {
            NodeRef::Fog(col)
        } else {
            NodeRef::Cloud((col - self.n_fogs) / self.rows)
        }
    }

    /// Frequency chosen for a feasible fog pairing, GHz.
    pub fn fog_freq(&self, row: usize, fog: usize) -> Option<f64> {
        assert!(fog < self.n_fogs, "column {fog} is not a fog column");
        let f = self.fog_freqs[row * self.n_fogs + fog];
        if f.is_nan() {
            None
        } else {
            Some(f)
        }
    }
}

/// Evaluate every (request, node) pairing against the current schedule.
///
/// Fog entries carry the converged surrogate computation energy plus
/// transfer energy at the optimized frequency, or the exact energy at
/// `fixed_freq_ghz` when one is pinned; cloud entries carry the exact
/// total energy. The penalty is `rows * max_finite_entry + 2`, which
/// exceeds any total that uses only finite entries.
pub fn build_cost_matrix(
    requests: &[Request],
    fleet: &Fleet,
    state: &ScheduleState,
    t_k: f64,
    params: &ScaParams,
    fixed_freq_ghz: Option<f64>,
) -> Result<CostMatrix, ModelError> {
    let rows = requests.len();
    let n_fogs = fleet.fogs.len();
    let n_clouds = fleet.clouds.len();
    let cols = n_fogs + rows * n_clouds;

    let mut entries: Vec<Option<f64>> = vec![None; rows * cols];
    let mut fog_freqs = vec![f64::NAN; rows * n_fogs];
    for (row, r) in requests.iter().enumerate() {
        for fog in 0..n_fogs {
            let chosen = match fixed_freq_ghz {
                Some(fixed) => freq::delay_min_frequency(r, fog, fleet, state, t_k)?
                    .and_then(|lo| (fixed >= lo).then(|| {
                        (fixed, cost::energy_compute(r, NodeRef::Fog(fog), fleet, fixed))
                    })),
                None => {
                    let sol = freq::optimize_frequency(r, fog, fleet, state, t_k, params)?;
                    sol.feasible
                        .then_some((sol.f_star_ghz, Ok(sol.surrogate_objective_j)))
                }
            };
            if let Some((f_ghz, e_cp)) = chosen {
                let comm = cost::energy_comm(r, NodeRef::Fog(fog), fleet)?;
                entries[row * cols + fog] = Some(e_cp? + comm);
                fog_freqs[row * n_fogs + fog] = f_ghz;
            }
        }
        for cloud in 0..n_clouds {
            let target = NodeRef::Cloud(cloud);
            let bd = cost::total_cost(r, target, fleet, 0.0, state, t_k)?;
            if bd.feasible {
                for k in 0..rows {
                    entries[row * cols + n_fogs + cloud * rows + k] = Some(bd.e_tot_j);
                }
            }
        }
    }

    let max_finite = entries.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let big_m = rows as f64 * max_finite + 2.0;
    let costs = entries.into_iter().map(|e| e.unwrap_or(big_m)).collect();
    Ok(CostMatrix { rows, n_fogs, n_clouds, costs, fog_freqs, big_m })
}

/// Minimum-cost one-to-one assignment of every row to a distinct column,
/// `rows <= cols`. Returns the column picked for each row. Shortest
/// augmenting path formulation with dual potentials; ties break toward
/// the lowest column index.
pub fn hungarian(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    assert!(rows <= cols, "assignment needs at least as many columns as rows");
    if rows == 0 {
        return Vec::new();
    }
    // 1-based with column 0 as the virtual start of each augmenting path
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut matched_row = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // walk the path backwards, flipping matches
        while j0 != 0 {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut result = vec![usize::MAX; rows];
    for (j, &i) in matched_row.iter().enumerate().skip(1) {
        if i != 0 {
            result[i - 1] = j - 1;
        }
    }
    debug_assert!(result.iter().all(|&c| c != usize::MAX));
    result
}

/// Where a solved row landed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AssignedTarget {
    Fog { fog: usize, freq_ghz: f64 },
    Cloud { cloud: usize },
    /// The row was pushed onto a penalty column: no node can serve it.
    Unassignable,
}

/// Map solved columns back to nodes, collapsing cloud replicas and
/// flagging penalty placements.
pub fn extract_allocation(matrix: &CostMatrix, row_to_col: &[usize]) -> Vec<AssignedTarget> {
    assert_eq!(row_to_col.len(), matrix.rows());
    row_to_col
        .iter()
        .enumerate()
        .map(|(row, &col)| {
            if matrix.is_penalty(row, col) {
                return AssignedTarget::Unassignable;
            }
            match matrix.column_target(col) {
                NodeRef::Fog(fog) => {
                    let freq_ghz =
                        matrix.fog_freq(row, fog).expect("feasible fog cell has a frequency");
                    AssignedTarget::Fog { fog, freq_ghz }
                }
                NodeRef::Cloud(cloud) => AssignedTarget::Cloud { cloud },
            }
        })
        .collect()
}

/// Exhaustive minimum assignment for cross-checking; `rows <= 8`,
/// `cols <= 64`. Returns the chosen columns and the total cost.
pub fn brute_force_assign(
    rows: usize,
    cols: usize,
    cost: impl Fn(usize, usize) -> f64 + Copy,
) -> (Vec<usize>, f64) {
    assert!(rows <= 8 && cols <= 64, "brute force is for small instances only");
    assert!(rows <= cols);
    let mut best = (Vec::new(), f64::INFINITY);
    let mut current = vec![0usize; rows];
    struct Search<F> {
        rows: usize,
        cols: usize,
        cost: F,
    }
    impl<F: Fn(usize, usize) -> f64> Search<F> {
        fn descend(
            &self,
            row: usize,
            taken: u64,
            total: f64,
            current: &mut Vec<usize>,
            best: &mut (Vec<usize>, f64),
        ) {
            if total >= best.1 {
                return;
            }
            if row == self.rows {
                *best = (current.clone(), total);
                return;
            }
            for col in 0..self.cols {
                if taken & (1 << col) == 0 {
                    current[row] = col;
                    self.descend(
                        row + 1,
                        taken | (1 << col),
                        total + (self.cost)(row, col),
                        current,
                        best,
                    );
                }
            }
        }
    }
    Search { rows, cols, cost }.descend(0, 0, 0.0, &mut current, &mut best);
    (best.0, best.1)
}
