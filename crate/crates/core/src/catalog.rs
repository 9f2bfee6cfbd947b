//! Stage constructors for common apparatus modules.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{QregError, Result};
use crate::register::{CreationMonomial, NORM_TOLERANCE};
use crate::rewrite::{Stage, TransitionRule};

fn catalog_err(msg: impl Into<String>) -> QregError {
    QregError::Catalog(msg.into())
}

fn distinct(qubits: &[usize], what: &str) -> Result<()> {
    let set: BTreeSet<usize> = qubits.iter().copied().collect();
    if set.len() == qubits.len() {
        Ok(())
    } else {
        Err(catalog_err(format!("{what}: qubits {qubits:?} are not distinct")))
    }
}

fn unimodular(z: Complex64) -> bool {
    (z.norm() - 1.0).abs() <= NORM_TOLERANCE
}

/// Von Neumann test: `A+_src -> Σ amps[i] A+_outs[i]`.
///
/// Stern-Gerlach and Wollaston splitters are the two-outcome case.
pub fn pvm_test(src: usize, outs: &[usize], amps: &[Complex64]) -> Result<Stage> {
    if outs.len() != amps.len() {
        return Err(catalog_err(format!(
            "pvm: {} outcome qubits but {} amplitudes",
            outs.len(),
            amps.len()
        )));
    }
    if outs.is_empty() {
        return Err(catalog_err("pvm: no outcome qubits"));
    }
    let mut all = vec![src];
    all.extend_from_slice(outs);
    distinct(&all, "pvm")?;
    let targets = outs
        .iter()
        .zip(amps)
        .map(|(&q, &a)| Ok((a, CreationMonomial::single(q)?)))
        .collect::<Result<Vec<_>>>()?;
    Stage::new("pvm", vec![TransitionRule::new(src, targets)?])
}

/// Lossless beam splitter with transfer matrix `e^{iη} [[a, b], [-b*, a*]]`:
///
/// ```text
/// A+_in1 -> e^{iη} (a A+_out1 - b* A+_out2)
/// A+_in2 -> e^{iη} (b A+_out1 + a* A+_out2)
/// ```
pub fn beam_splitter(
    in1: usize,
    in2: usize,
    out1: usize,
    out2: usize,
    a: Complex64,
    b: Complex64,
    eta: f64,
) -> Result<Stage> {
    distinct(&[in1, in2, out1, out2], "bs")?;
    let weight = a.norm_sqr() + b.norm_sqr();
    if (weight - 1.0).abs() > NORM_TOLERANCE {
        return Err(catalog_err(format!("bs: |a|^2 + |b|^2 = {weight}, expected 1")));
    }
    let phase = Complex64::from_polar(1.0, eta);
    let o1 = CreationMonomial::single(out1)?;
    let o2 = CreationMonomial::single(out2)?;
    let first = TransitionRule::new(
        in1,
        [(phase * a, o1.clone()), (-phase * b.conj(), o2.clone())],
    )?;
    let second = TransitionRule::new(in2, [(phase * b, o1), (phase * a.conj(), o2)])?;
    Stage::new("bs", vec![first, second])
}

/// Phase shifter, mirror or relay: `A+_src -> factor A+_dst` with `|factor| = 1`.
pub fn single_channel_map(src: usize, dst: usize, factor: Complex64) -> Result<Stage> {
    distinct(&[src, dst], "map")?;
    if !unimodular(factor) {
        return Err(catalog_err(format!("map: |factor| = {}, expected 1", factor.norm())));
    }
    let rule = TransitionRule::new(src, [(factor, CreationMonomial::single(dst)?)])?;
    Stage::new("map", vec![rule])
}

/// Rank-raising source: `A+_src -> Σ coeff A+_qa A+_qb`.
pub fn pair_source(src: usize, pairs: &[(Complex64, (usize, usize))]) -> Result<Stage> {
    if pairs.is_empty() {
        return Err(catalog_err("pair: no pairs"));
    }
    let mut targets = Vec::with_capacity(pairs.len());
    for &(coeff, (qa, qb)) in pairs {
        if qa == src || qb == src {
            return Err(catalog_err(format!("pair: source {src} appears in pair ({qa}, {qb})")));
        }
        if qa == qb {
            return Err(catalog_err(format!("pair: pair ({qa}, {qb}) repeats a qubit")));
        }
        targets.push((coeff, CreationMonomial::new([qa, qb])?));
    }
    let weight: f64 = pairs.iter().map(|(c, _)| c.norm_sqr()).sum();
    if (weight - 1.0).abs() > NORM_TOLERANCE {
        return Err(catalog_err(format!("pair: coefficients have total weight {weight}, expected 1")));
    }
    Stage::new("pair", vec![TransitionRule::new(src, targets)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::register::{BasisIndex, RegisterShape, SparseState};
    use crate::rewrite::{apply_stage, check_isometry};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(q: &[usize]) -> CreationMonomial {
        CreationMonomial::new(q.iter().copied()).unwrap()
    }

    fn close(x: Complex64, y: Complex64) -> bool {
        (x - y).norm() < 1e-15
    }

    #[test]
    fn pvm_shapes() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let sg = pvm_test(0, &[1, 2], &[alpha, beta]).unwrap();
        let rule = &sg.rules()[0];
        assert_eq!(rule.source(), 0);
        assert_eq!(rule.targets(), &[(alpha, mono(&[1])), (beta, mono(&[2]))]);

        let relabel = pvm_test(3, &[5], &[c(1.0, 0.0)]).unwrap();
        assert_eq!(relabel.rules()[0].targets(), &[(c(1.0, 0.0), mono(&[5]))]);

        assert!(pvm_test(0, &[1, 1], &[alpha, beta]).is_err());
        assert!(pvm_test(0, &[0, 1], &[alpha, beta]).is_err());
        assert!(pvm_test(0, &[1, 2], &[alpha]).is_err());
    }

    #[test]
    fn beam_splitter_general_form() {
        let a = c(0.3, 0.4);
        let b = Complex64::from_polar((1.0 - a.norm_sqr()).sqrt(), 1.1);
        let eta = 0.7;
        let e = Complex64::from_polar(1.0, eta);
        let bs = beam_splitter(1, 2, 3, 4, a, b, eta).unwrap();
        let r1 = bs.rule_for(1).unwrap().targets();
        assert!(close(r1[0].0, e * a) && r1[0].1 == mono(&[3]));
        assert!(close(r1[1].0, -e * b.conj()) && r1[1].1 == mono(&[4]));
        let r2 = bs.rule_for(2).unwrap().targets();
        assert!(close(r2[0].0, e * b) && r2[0].1 == mono(&[3]));
        assert!(close(r2[1].0, e * a.conj()) && r2[1].1 == mono(&[4]));

        assert!(beam_splitter(1, 2, 3, 4, c(1.0, 0.0), c(0.5, 0.0), 0.0).is_err());
        assert!(beam_splitter(1, 2, 3, 1, a, b, 0.0).is_err());
    }

    #[test]
    fn beam_splitter_matches_symmetric_interference_splitter() {
        let h = FRAC_1_SQRT_2;
        let bs = beam_splitter(4, 5, 6, 7, c(h, 0.0), c(0.0, -h), FRAC_PI_2).unwrap();
        let r4 = bs.rule_for(4).unwrap().targets();
        assert!(close(r4[0].0, c(0.0, h)) && close(r4[1].0, c(h, 0.0)));
        let r5 = bs.rule_for(5).unwrap().targets();
        assert!(close(r5[0].0, c(h, 0.0)) && close(r5[1].0, c(0.0, h)));
    }

    #[test]
    fn beam_splitter_with_void_port_keeps_rank_one() {
        let s = RegisterShape::new(5).unwrap();
        let bs = beam_splitter(1, 2, 3, 4, c(0.6, 0.0), c(0.8, 0.0), 0.0).unwrap();
        let out = apply_stage(&SparseState::basis(s, BasisIndex(2)).unwrap(), &bs).unwrap();
        assert_eq!(out.state_rank().unwrap().ranks, vec![1]);
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn channel_maps() {
        let phi = 0.4;
        let shift = single_channel_map(2, 3, Complex64::from_polar(1.0, phi)).unwrap();
        assert_eq!(shift.rules()[0].targets()[0].1, mono(&[3]));
        let mirror = single_channel_map(2, 5, c(-1.0, 0.0)).unwrap();
        assert_eq!(mirror.rules()[0].targets(), &[(c(-1.0, 0.0), mono(&[5]))]);
        assert!(single_channel_map(2, 2, c(1.0, 0.0)).is_err());
        assert!(single_channel_map(2, 3, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn pair_sources() {
        let h = FRAC_1_SQRT_2;
        let theta = 0.3;
        let hsz = pair_source(0, &[(c(h, 0.0), (1, 3)), (Complex64::from_polar(h, theta), (2, 4))]).unwrap();
        assert_eq!(hsz.rules()[0].targets()[1].1, mono(&[2, 4]));

        let s = RegisterShape::new(3).unwrap();
        let single = pair_source(0, &[(c(1.0, 0.0), (1, 2))]).unwrap();
        let out = apply_stage(&SparseState::basis(s, BasisIndex(1)).unwrap(), &single).unwrap();
        assert_eq!(out.support(), vec![BasisIndex(6)]);
        assert_eq!(out.state_rank().unwrap().ranks, vec![2]);

        assert!(pair_source(0, &[(c(1.0, 0.0), (0, 2))]).is_err());
        assert!(pair_source(0, &[(c(0.5, 0.0), (1, 2))]).is_err());
        assert!(pair_source(0, &[(c(1.0, 0.0), (1, 1))]).is_err());
    }

    #[test]
    fn constructors_are_isometric_on_natural_domain() {
        let s = RegisterShape::new(6).unwrap();
        let h = FRAC_1_SQRT_2;
        let stages = [
            pvm_test(0, &[1, 2, 3], &[c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)]).unwrap(),
            beam_splitter(0, 1, 2, 3, c(0.6, 0.0), c(0.0, 0.8), 1.3).unwrap(),
            single_channel_map(0, 4, Complex64::from_polar(1.0, 2.2)).unwrap(),
            pair_source(0, &[(c(h, 0.0), (1, 3)), (c(0.0, h), (2, 4))]).unwrap(),
        ];
        for stage in &stages {
            let mut domain = vec![BasisIndex(0)];
            domain.extend(stage.sources().map(|q| BasisIndex::from_qubits([q])));
            let report = check_isometry(stage, s, &domain).unwrap();
            assert!(report.passed, "{}: {report:?}", stage.name());
        }
    }
}
