use std::io::Write;

use super::VortexLine;
use crate::error::Result;

pub const LINE_CSV_HEADER: &str = "s,x,y,z,omega_mag,div_xi,kappa,u_tan,u_norm";

/// One row per sample; positions are written unwrapped so the polyline is
/// continuous across the periodic seam.
pub fn write_line_csv<W: Write>(mut w: W, line: &VortexLine) -> Result<()> {
    writeln!(w, "{LINE_CSV_HEADER}")?;
    for p in &line.samples {
        let vals = [
            p.s,
            p.position[0],
            p.position[1],
            p.position[2],
            p.omega_mag,
            p.div_xi,
            p.kappa,
            p.u_tan,
            p.u_norm,
        ];
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vortex_line::{LineSample, Termination};

    #[test]
    fn round_trips_through_text() {
        let p = LineSample { s: 0.1, position: [1.0 / 3.0, 2.0, 3.0], omega_mag: 7.25, ..Default::default() };
        let line = VortexLine {
            samples: vec![LineSample::default(), p],
            step: 0.1,
            seed: [0.0; 3],
            terminated_reason: Termination::MaxLength,
            length: 0.1,
        };
        let mut out = Vec::new();
        write_line_csv(&mut out, &line).unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], LINE_CSV_HEADER);
        assert_eq!(rows.len(), 3);
        let x: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(x, 1.0 / 3.0);
    }
}
