use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::norm2;

/// Uniform cell-centred grid; ghosts copy the edge cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub dx: f64,
    pub m: usize,
}

impl Grid1D {
    pub fn new(x0: f64, dx: f64, m: usize) -> Result<Self> {
        if m < 8 || !(dx > 0.0) || !x0.is_finite() {
            return Err(Error::InvalidInput(format!("grid needs m >= 8 and dx > 0 (m={m}, dx={dx})")));
        }
        Ok(Self { x0, dx, m })
    }

    /// Grid covering `[a, b]` with spacing close to `dx`.
    pub fn covering(a: f64, b: f64, dx: f64) -> Result<Self> {
        let m = ((b - a) / dx).round().max(8.0) as usize;
        Self::new(a, (b - a) / m as f64, m)
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + (j as f64 + 0.5) * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.x(j)).collect()
    }

    pub fn x_end(&self) -> f64 {
        self.x0 + self.m as f64 * self.dx
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.m == other.m
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
            && (self.x0 - other.x0).abs() <= 1e-12 * (1.0 + self.x0.abs())
    }
}

/// Snapshot of `u(t, ·)`: `m` states in `R^n`, stored cell-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid1D,
    pub t: f64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, t: f64, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m * n {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.m * n,
                values.len()
            )));
        }
        Ok(Self { grid, t, n, values })
    }

    pub fn from_fn(grid: Grid1D, t: f64, n: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let mut values = Vec::with_capacity(grid.m * n);
        for j in 0..grid.m {
            let u = f(grid.x(j));
            assert_eq!(u.len(), n);
            values.extend_from_slice(&u);
        }
        Self { grid, t, n, values }
    }

    pub fn constant(grid: Grid1D, t: f64, state: &[f64]) -> Self {
        Self::from_fn(grid, t, state.len(), |_| state.to_vec())
    }

    pub fn state(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    /// State at cell `j`, clamped to the grid (ghost policy).
    pub fn state_clamped(&self, j: isize) -> &[f64] {
        let j = j.clamp(0, self.grid.m as isize - 1) as usize;
        self.state(j)
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        (0..self.grid.m).map(|j| self.values[j * self.n + i]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `Σ_j u_j dx` per component.
    pub fn integral(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for j in 0..self.grid.m {
            for (k, x) in self.state(j).iter().enumerate() {
                s[k] += x * self.grid.dx;
            }
        }
        s
    }

    /// Central first difference per cell, with constant-extrapolation ghosts.
    pub fn dx_central(&self) -> Vec<f64> {
        let n = self.n;
        let h = self.grid.dx;
        let mut out = vec![0.0; self.values.len()];
        for j in 0..self.grid.m as isize {
            let (a, b) = (self.state_clamped(j + 1), self.state_clamped(j - 1));
            for k in 0..n {
                out[j as usize * n + k] = (a[k] - b[k]) / (2.0 * h);
            }
        }
        out
    }

    /// Central second difference per cell.
    pub fn dxx_central(&self) -> Vec<f64> {
        let n = self.n;
        let h2 = self.grid.dx * self.grid.dx;
        let mut out = vec![0.0; self.values.len()];
        for j in 0..self.grid.m as isize {
            let (a, c, b) = (self.state_clamped(j + 1), self.state_clamped(j), self.state_clamped(j - 1));
            for k in 0..n {
                out[j as usize * n + k] = (a[k] - 2.0 * c[k] + b[k]) / h2;
            }
        }
        out
    }

    /// Linear interpolation at `x`, constant outside the grid.
    pub fn sample(&self, x: f64) -> Vec<f64> {
        let s = (x - self.grid.x0) / self.grid.dx - 0.5;
        if s <= 0.0 {
            return self.state(0).to_vec();
        }
        let last = self.grid.m - 1;
        if s >= last as f64 {
            return self.state(last).to_vec();
        }
        let j = s.floor() as usize;
        let w = s - j as f64;
        let (a, b) = (self.state(j), self.state(j + 1));
        a.iter().zip(b).map(|(p, q)| (1.0 - w) * p + w * q).collect()
    }

    /// Copy with values replaced by `values`.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self { grid: self.grid, t: self.t, n: self.n, values }
    }
}

/// Midpoint-rule `∫ |u − v| dx` with the Euclidean norm per cell.
pub fn l1_distance(a: &Field, b: &Field) -> Result<f64> {
    if !a.grid.same_as(&b.grid) || a.n != b.n {
        return Err(Error::GridMismatch("fields live on different grids".into()));
    }
    Ok(l1_distance_values(&a.values, &b.values, a.n) * a.grid.dx)
}

pub(crate) fn l1_distance_values(a: &[f64], b: &[f64], n: usize) -> f64 {
    a.chunks(n)
        .zip(b.chunks(n))
        .map(|(p, q)| {
            let d: Vec<f64> = p.iter().zip(q).map(|(x, y)| x - y).collect();
            norm2(&d)
        })
        .sum()
}

/// `∫ |u| dx` of a flat cell-major array.
pub fn l1_norm(values: &[f64], n: usize, dx: f64) -> f64 {
    values.chunks(n).map(norm2).sum::<f64>() * dx
}

/// `Σ_j |u_{j+1} − u_j|`.
pub fn field_total_variation(f: &Field) -> f64 {
    (1..f.grid.m)
        .map(|j| {
            let d: Vec<f64> = f.state(j).iter().zip(f.state(j - 1)).map(|(a, b)| a - b).collect();
            norm2(&d)
        })
        .sum()
}

/// Snapshots of one evolution, in increasing time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
}

impl Trajectory {
    pub fn first(&self) -> &Field {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory has snapshots")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|f| f.t).collect()
    }

    /// Snapshot whose time is closest to `t`.
    pub fn at(&self, t: f64) -> &Field {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap())
            .expect("trajectory has snapshots")
    }

    /// CSV with header `t,x,u1..un`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let n = self.snapshots.first().map_or(0, |f| f.n);
        let mut header = vec!["t".to_string(), "x".to_string()];
        header.extend((1..=n).map(|k| format!("u{k}")));
        wr.write_record(&header)?;
        for f in &self.snapshots {
            for j in 0..f.grid.m {
                let mut rec = vec![f.t.to_string(), f.grid.x(j).to_string()];
                rec.extend(f.state(j).iter().map(|v| v.to_string()));
                wr.write_record(&rec)?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_small_or_degenerate() {
        assert!(Grid1D::new(0.0, 0.1, 7).is_err());
        assert!(Grid1D::new(0.0, 0.0, 10).is_err());
        let g = Grid1D::covering(-1.0, 1.0, 0.1).unwrap();
        assert_eq!(g.m, 20);
        assert!((g.x(0) + 0.95).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_linear_and_clamped() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        let f = Field::from_fn(g, 0.0, 1, |x| vec![2.0 * x]);
        assert!((f.sample(3.0)[0] - 6.0).abs() < 1e-14);
        assert_eq!(f.sample(-5.0)[0], 1.0);
        assert_eq!(f.sample(50.0)[0], 19.0);
    }

    #[test]
    fn csv_layout() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let t = Trajectory { snapshots: vec![Field::constant(g, 0.5, &[1.0, 2.0])] };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("t,x,u1,u2"));
        assert_eq!(lines.next(), Some("0.5,0.5,1,2"));
        assert_eq!(s.lines().count(), 9);
    }
}
