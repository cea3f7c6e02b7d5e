//! CSV writers for sweep results.

use std::io::Write;

use super::{BerPoint, ExitCurve};

pub const EXIT_HEADER: &str = "decoder,eb_n0_db,i_a,i_e,trials";
pub const BER_HEADER: &str = "eb_n0_db,iteration,bit_errors,total_bits,ber,fer,trials,ci_low,ci_high";

/// One row per grid point; `eb_n0_db` is empty for outer curves.
pub fn write_exit(w: &mut impl Write, curves: &[ExitCurve]) -> std::io::Result<()> {
    writeln!(w, "{EXIT_HEADER}")?;
    for c in curves {
        let db = c.eb_n0_db.map(|v| v.to_string()).unwrap_or_default();
        for &(ia, ie) in &c.points {
            writeln!(w, "{},{},{},{},{}", c.decoder.name(), db, ia, ie, c.trials)?;
        }
    }
    Ok(())
}

pub fn write_ber(w: &mut impl Write, points: &[BerPoint]) -> std::io::Result<()> {
    writeln!(w, "{BER_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{},{:e},{:e}",
            p.eb_n0_db, p.iteration, p.bit_errors, p.total_bits, p.ber, p.fer, p.trials, p.ci_low, p.ci_high
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::DecoderKind;

    #[test]
    fn exit_rows() {
        let c = ExitCurve {
            decoder: DecoderKind::Outer,
            eb_n0_db: None,
            code: "rs(15,7)".into(),
            trials: 4,
            points: vec![(0.0, 0.0), (0.5, 0.25)],
        };
        let mut buf = Vec::new();
        write_exit(&mut buf, &[c]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "decoder,eb_n0_db,i_a,i_e,trials\nouter,,0,0,4\nouter,,0.5,0.25,4\n");
    }

    #[test]
    fn ber_rows() {
        let p = BerPoint::from_frames(3.0, 2, &[1, 0], 10, 1.0);
        let mut buf = Vec::new();
        write_ber(&mut buf, &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("3,2,1,20,5e-2,5e-1,2,"), "{row}");
        assert_eq!(row.split(',').count(), 9);
    }
}
