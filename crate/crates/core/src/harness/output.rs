use std::io::Write;

use serde::Serialize;

use super::errors::ErrorReport;
use crate::error::Result;

pub const CSV_HEADER: &str =
    "level,h,e_q,ecr_q,e_uhat,ecr_uhat,eps_u,ecr_u,e_plus,ecr_plus,eps_uhat,ecr_uhat2";

fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

/// One row per level; rate columns are empty on the first level.
pub fn write_csv<W: Write>(reports: &[ErrorReport], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        let rate = |f: fn(&super::Rates) -> f64| r.rates.as_ref().map(|x| sci(f(x))).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.level,
            sci(r.h),
            sci(r.e_q),
            rate(|x| x.e_q),
            sci(r.e_uhat),
            rate(|x| x.e_uhat),
            sci(r.eps_u),
            rate(|x| x.eps_u),
            sci(r.e_plus),
            rate(|x| x.e_plus),
            sci(r.eps_uhat),
            rate(|x| x.eps_uhat),
        )?;
    }
    Ok(())
}

/// Pretty-printed JSON of any serializable summary.
pub fn write_json<W: Write, T: Serialize>(value: &T, mut out: W) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| std::io::Error::other(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}
