//! CSV emission for sweep tables and trajectories.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use spinepr_core::{Estimate, Trajectory};

use crate::sweep::{McRow, SweepRow};

pub const SWEEP_HEADER: &str = "Z,mu,nu,p2,gamma_d_add,g_opt,var_inf_z,var_inf_y,xi_inf,xi_g_inf,E_epr_inf,entangled,epr_ab,epr_via_sum,status";

pub const MC_HEADER: &str = "Z,gamma_d_add,m,seed,g_z,g_z_se,g_y,g_y_se,var_inf_z,var_inf_z_se,var_inf_y,var_inf_y_se,xi,xi_se,xi_g,xi_g_se,E_epr_ab,E_epr_ab_se,E_epr_ba,E_epr_ba_se,status";

pub const TRAJECTORY_HEADER: &str = "t,v_az,v_ay,v_bz,v_by,c_zz,c_yy,p2";

const SIG_DIGITS: usize = 9;

/// Formats `x` with nine significant digits in the style of C's `%.9g`:
/// fixed notation for exponents in `[-5, 9)`, scientific otherwise, with
/// trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let mut fields: Vec<String> = [
            r.z,
            r.mu,
            r.nu,
            r.p2,
            r.gamma_d_add,
            r.g_opt,
            r.var_inf_z,
            r.var_inf_y,
            r.xi_inf,
            r.xi_g_inf,
            r.e_epr_inf,
        ]
        .iter()
        .map(|&x| format_number(x))
        .collect();
        fields.extend(
            [r.flags.entangled, r.flags.epr_ab, r.flags.epr_via_sum]
                .iter()
                .map(|b| b.to_string()),
        );
        fields.push(r.status.label());
        push_row(&mut out, &fields);
    }
    out
}

pub fn render_mc_csv(rows: &[McRow]) -> String {
    let mut out = String::new();
    out.push_str(MC_HEADER);
    out.push('\n');
    for r in rows {
        let mut fields = vec![
            format_number(r.z),
            format_number(r.gamma_d_add),
            r.m.to_string(),
            r.seed.to_string(),
        ];
        match &r.estimate {
            Ok(e) => {
                let est: [Estimate; 8] = [
                    e.g_z,
                    e.g_y,
                    e.var_inf_z,
                    e.var_inf_y,
                    e.delta_ent,
                    e.delta_g_ent,
                    e.e_epr_ab,
                    e.e_epr_ba,
                ];
                for x in est {
                    fields.push(format_number(x.value));
                    fields.push(format_number(x.std_error));
                }
                fields.push("ok".into());
            }
            Err(msg) => {
                fields.extend(std::iter::repeat_n("nan".to_string(), 16));
                fields.push(format!("error: {}", msg.replace([',', '\n', '\r'], ";")));
            }
        }
        push_row(&mut out, &fields);
    }
    out
}

pub fn render_trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_number(*t),
            format_number(s.v_az),
            format_number(s.v_ay),
            format_number(s.v_bz),
            format_number(s.v_by),
            format_number(s.c_zz),
            format_number(s.c_yy),
            format_number(s.p2),
        );
    }
    out
}

/// Writes the sweep table to `path`.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> io::Result<()> {
    std::fs::write(path, render_sweep_csv(rows))
}
