use std::io::Write;

use super::{check_lambda, PriorCovariance};
use crate::dynamics::steady_operator;
use crate::error::{Error, Result};
use crate::graphkit::OperatedWeights;

/// `e_R` split for a single adversary `m`:
/// collaboration `(sigma_m^2 + d) ||L_m^{-m}||^2` and competition
/// `sum_i sigma_i^2 ||L_i^{-m} - 1/R||^2`, where `L_j^{-m}` is column `j`
/// of `L` restricted to regular rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    pub lambda: f64,
    pub collaboration: f64,
    pub competition: f64,
}

impl Decomposition {
    pub fn total(&self) -> f64 {
        self.collaboration + self.competition
    }
}

pub fn decompose_error(
    w: &OperatedWeights,
    lambda: f64,
    cov: &PriorCovariance,
) -> Result<Decomposition> {
    if w.m() != 1 {
        return Err(Error::UnsupportedDecomposition(w.m()));
    }
    check_lambda(lambda)?;
    let sigma = cov.block_diagonal(w)?;
    let l = steady_operator(w, lambda)?;
    let r = w.r();
    let collaboration = sigma[r] * l.l12().norm_squared();
    let avg = 1.0 / r as f64;
    let competition = l
        .l11()
        .column_iter()
        .zip(&sigma)
        .map(|(col, s)| s * col.iter().map(|v| (v - avg).powi(2)).sum::<f64>())
        .sum();
    Ok(Decomposition {
        lambda,
        collaboration,
        competition,
    })
}

/// Columns `lambda,collaboration,competition,total`.
pub fn write_decomposition_csv(rows: &[Decomposition], mut out: impl Write) -> Result<()> {
    writeln!(out, "lambda,collaboration,competition,total")?;
    for d in rows {
        writeln!(
            out,
            "{},{},{},{}",
            d.lambda,
            d.collaboration,
            d.competition,
            d.total()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::error_closed_form;
    use crate::graphkit::{apply_malicious, gen_regular, uniform_weights, Topology};

    fn c4() -> OperatedWeights {
        apply_malicious(&uniform_weights(&Topology::cycle(4)).unwrap(), &[3]).unwrap()
    }

    #[test]
    fn full_competition() {
        let dec = decompose_error(&c4(), 1.0, &PriorCovariance::unit(10.0)).unwrap();
        assert_eq!(dec.collaboration, 0.0);
        assert!((dec.competition - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sums_to_total() {
        let cov = PriorCovariance::unit(10.0);
        let dec = decompose_error(&c4(), 0.3, &cov).unwrap();
        let total = error_closed_form(&c4(), 0.3, &cov).unwrap();
        assert!((dec.total() - total).abs() < 1e-10);

        let w = apply_malicious(
            &uniform_weights(&gen_regular(24, 3, 3).unwrap()).unwrap(),
            &[5],
        )
        .unwrap();
        let var: Vec<f64> = (0..24).map(|i| 0.5 + (i % 3) as f64).collect();
        let cov = PriorCovariance::new(4.0, var);
        for lambda in [0.05, 0.5, 0.95] {
            let dec = decompose_error(&w, lambda, &cov).unwrap();
            let total = error_closed_form(&w, lambda, &cov).unwrap();
            assert!((dec.total() - total).abs() < 1e-10);
        }
    }

    #[test]
    fn collaboration_decreases_with_lambda() {
        let cov = PriorCovariance::unit(10.0);
        let values: Vec<f64> = (1..100)
            .map(|k| {
                decompose_error(&c4(), k as f64 / 100.0, &cov)
                    .unwrap()
                    .collaboration
            })
            .collect();
        assert!(values.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn needs_one_adversary() {
        let w = apply_malicious(&uniform_weights(&Topology::cycle(6)).unwrap(), &[0, 3]).unwrap();
        assert!(matches!(
            decompose_error(&w, 0.5, &PriorCovariance::unit(1.0)),
            Err(Error::UnsupportedDecomposition(2))
        ));
    }

    #[test]
    fn csv_layout() {
        let rows = [decompose_error(&c4(), 1.0, &PriorCovariance::unit(0.0)).unwrap()];
        let mut buf = Vec::new();
        write_decomposition_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "lambda,collaboration,competition,total");
        assert_eq!(lines[1].split(',').count(), 4);
    }
}
