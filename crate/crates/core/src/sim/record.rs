//! Trajectory records, CSV export and summary diagnostics.

use std::io::{self, Write};

use serde::Serialize;

use crate::liegroup::Vec3;

/// Column names of the CSV export, in order.
pub const CSV_HEADER: &str = "t,w1,w2,w3,th1,th2,th3,thd1,thd2,thd3,x,y,z,R11,R12,R13,R21,R22,R23,R31,R32,R33,g1,g2,g3,u1,u2,u3,H,E_R,pi1,pi2,pi3,rho";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub omega: Vec3,
    pub theta: Vec3,
    pub theta_dot: Vec3,
    pub position: Vec3,
    /// Row-major shell rotation.
    pub rotation: [f64; 9],
    pub gamma: Vec3,
    pub u: Vec3,
    pub h: f64,
    pub e_r: f64,
    pub pi: Vec3,
    /// `H' + k |e_w|^2` from the exact rates.
    pub rho: f64,
    /// Reference contact point.
    pub x_d: Vec3,
    /// `|e_w|^2`.
    pub e_omega_sq: f64,
}

impl Row {
    fn fields(&self) -> [f64; 34] {
        let mut f = [0.0; 34];
        f[0] = self.t;
        f[1..4].copy_from_slice(self.omega.as_slice());
        f[4..7].copy_from_slice(self.theta.as_slice());
        f[7..10].copy_from_slice(self.theta_dot.as_slice());
        f[10..13].copy_from_slice(self.position.as_slice());
        f[13..22].copy_from_slice(&self.rotation);
        f[22..25].copy_from_slice(self.gamma.as_slice());
        f[25..28].copy_from_slice(self.u.as_slice());
        f[28] = self.h;
        f[29] = self.e_r;
        f[30..33].copy_from_slice(self.pi.as_slice());
        f[33] = self.rho;
        f
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryRecord {
    pub rows: Vec<Row>,
}

impl TrajectoryRecord {
    /// Writes the header and one line per row. Values use Rust's shortest
    /// round-trip formatting, so output is reproducible byte for byte.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (k, v) in row.fields().iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:e}"));
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    pub fn diagnostics(&self, transient: f64) -> Diagnostics {
        Diagnostics::from_record(self, transient)
    }
}

/// Summary statistics of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub rows: usize,
    pub max_momentum_drift: f64,
    pub max_gamma_norm_error: f64,
    pub max_height_drift: f64,
    pub max_abs_rho: f64,
    pub mean_abs_rho: f64,
    pub final_e_r: f64,
    pub final_position_error: f64,
    /// Largest planar tracking error after the transient.
    pub max_position_error_after_transient: f64,
    /// Steps after the transient where H rose by more than 1e-9.
    pub h_increases: usize,
    pub max_h_increase: f64,
}

/// Tolerance for a single-step increase of H to count as a violation.
pub const H_STEP_TOL: f64 = 1e-9;

impl Diagnostics {
    pub fn from_record(rec: &TrajectoryRecord, transient: f64) -> Diagnostics {
        let rows = &rec.rows;
        let Some(first) = rows.first() else {
            return Diagnostics::default();
        };
        let last = rows.last().unwrap_or(first);
        let radius = first.position.z;
        let planar_err = |r: &Row| (r.position.xy() - r.x_d.xy()).norm();
        let mut d = Diagnostics {
            rows: rows.len(),
            final_e_r: last.e_r,
            final_position_error: planar_err(last),
            ..Diagnostics::default()
        };
        let mut rho_sum = 0.0;
        for (k, r) in rows.iter().enumerate() {
            d.max_momentum_drift = d.max_momentum_drift.max((r.pi - first.pi).norm());
            d.max_gamma_norm_error = d.max_gamma_norm_error.max((r.gamma.norm() - 1.0).abs());
            d.max_height_drift = d.max_height_drift.max((r.position.z - radius).abs());
            d.max_abs_rho = d.max_abs_rho.max(r.rho.abs());
            rho_sum += r.rho.abs();
            if r.t >= transient {
                d.max_position_error_after_transient = d.max_position_error_after_transient.max(planar_err(r));
                if k > 0 {
                    let rise = r.h - rows[k - 1].h;
                    if rise > H_STEP_TOL {
                        d.h_increases += 1;
                    }
                    d.max_h_increase = d.max_h_increase.max(rise);
                }
            }
        }
        d.mean_abs_rho = rho_sum / rows.len() as f64;
        d
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{k:<36}{v}\n"));
        line("rows", self.rows.to_string());
        line("max inertial momentum drift", format!("{:e}", self.max_momentum_drift));
        line("max |G| - 1", format!("{:e}", self.max_gamma_norm_error));
        line("max height drift", format!("{:e}", self.max_height_drift));
        line("max |rho|", format!("{:e}", self.max_abs_rho));
        line("mean |rho|", format!("{:e}", self.mean_abs_rho));
        line("final E_R", format!("{:e}", self.final_e_r));
        line("final position error", format!("{:e}", self.final_position_error));
        line("max position error after transient", format!("{:e}", self.max_position_error_after_transient));
        line("H increases after transient", self.h_increases.to_string());
        line("max H increase after transient", format!("{:e}", self.max_h_increase));
        s
    }
}
