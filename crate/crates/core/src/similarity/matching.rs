//! One-to-one matchings between two neighbor sets.
//!
//! Every cell of the grid is an eligible pairing (a zero score is still a
//! cell), so every maximal matching has exactly `min(rows, cols)` pairs and
//! the neighborhood score is `total / (rows + cols - min(rows, cols))`.

use serde::Serialize;

/// Neighbor sets at or below this size on their smaller side are matched
/// exactly in [`MatchingMode::Auto`].
pub const AUTO_EXACT_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMode {
    /// Optimal assignment (Hungarian method).
    Exact,
    /// Take the highest remaining non-conflicting cell until saturated.
    Greedy,
    /// Exact up to [`AUTO_EXACT_LIMIT`], greedy above.
    #[default]
    Auto,
}

impl MatchingMode {
    fn resolve(self, rows: usize, cols: usize) -> MatchingMode {
        match self {
            MatchingMode::Auto if rows.min(cols) <= AUTO_EXACT_LIMIT => MatchingMode::Exact,
            MatchingMode::Auto => MatchingMode::Greedy,
            m => m,
        }
    }
}

impl std::str::FromStr for MatchingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "greedy" => Ok(Self::Greedy),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown matching mode {other:?}")),
        }
    }
}

/// Dense row-major score grid between two neighbor sets.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreGrid {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl ScoreGrid {
    pub fn new(rows: usize, cols: usize, cells: Vec<f64>) -> Self {
        assert_eq!(cells.len(), rows * cols, "grid shape mismatch");
        Self { rows, cols, cells }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let cells = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.cols + j]
    }
}

/// Best matched total divided by `|A| + |B| - |M|`.
pub fn max_match_score(grid: &ScoreGrid, mode: MatchingMode) -> f64 {
    let (rows, cols) = (grid.rows, grid.cols);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let total = match mode.resolve(rows, cols) {
        MatchingMode::Greedy => greedy_total(grid),
        _ => exact_total(grid),
    };
    let matched = rows.min(cols);
    total / (rows + cols - matched) as f64
}

/// Sum of the greedily selected cells; ties are broken by position.
pub fn greedy_total(grid: &ScoreGrid) -> f64 {
    let mut cells: Vec<(f64, usize, usize)> = (0..grid.rows)
        .flat_map(|i| (0..grid.cols).map(move |j| (i, j)))
        .map(|(i, j)| (grid.get(i, j), i, j))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut row_used = vec![false; grid.rows];
    let mut col_used = vec![false; grid.cols];
    let want = grid.rows.min(grid.cols);
    let mut taken = 0;
    let mut total = 0.0;
    for (score, i, j) in cells {
        if row_used[i] || col_used[j] {
            continue;
        }
        row_used[i] = true;
        col_used[j] = true;
        total += score;
        taken += 1;
        if taken == want {
            break;
        }
    }
    total
}

/// Maximum total of a one-to-one matching of size `min(rows, cols)`.
pub fn exact_total(grid: &ScoreGrid) -> f64 {
    let assignment = max_weight_assignment(grid);
    assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            if grid.rows <= grid.cols {
                grid.get(i, j)
            } else {
                grid.get(j, i)
            }
        })
        .sum()
}

/// Hungarian method on the orientation with fewer rows. Returns, for each
/// row of that orientation, the assigned column.
fn max_weight_assignment(grid: &ScoreGrid) -> Vec<usize> {
    let transposed = grid.rows > grid.cols;
    let (n, m) = if transposed {
        (grid.cols, grid.rows)
    } else {
        (grid.rows, grid.cols)
    };
    let weight = |i: usize, j: usize| {
        if transposed {
            grid.get(j, i)
        } else {
            grid.get(i, j)
        }
    };

    // Potentials-based shortest augmenting path, minimizing negated weights.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = -weight(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}
