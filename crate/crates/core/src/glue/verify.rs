use num_complex::Complex64;
use rand::Rng;

use crate::algebra::Representation;
use crate::complex::CwComplexData;
use crate::linalg::{c64, random_gaussian, relative_error, relative_error_up_to_sign, CMatrix};

use super::mv::{
    corrective_term, mv_identity, mv_sequence, GluedComplexes, MvBases, TwistedPiece, MV_DEGREES,
};
use super::transport::{transport_bases, TransportedBases};
use super::GlueError;

/// Relative tolerance for the multiplicativity and identity checks.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MvTrial {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub corrective: Complex64,
    pub relative_error: f64,
    pub signed_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MvReport {
    pub trials: Vec<MvTrial>,
    pub max_relative_error: f64,
    pub max_signed_relative_error: f64,
    pub rank_phi1: usize,
    pub pass: bool,
}

/// Random bases of every homology group involved in the sequence: random
/// invertible recombinations of the canonical classes plus random boundaries.
pub fn random_bases<R: Rng + ?Sized>(g: &GluedComplexes, rng: &mut R) -> MvBases {
    let piece_bases = |piece: &TwistedPiece, rng: &mut R| -> Vec<CMatrix> {
        (0..MV_DEGREES)
            .map(|p| {
                if p > piece.top_degree() {
                    return CMatrix::zeros(0, 0);
                }
                let deg = piece.hd.degree(p);
                let k = deg.betti;
                &deg.h_basis * random_gaussian(rng, k, k)
                    + &deg.boundaries * random_gaussian(rng, deg.boundaries.ncols(), k)
            })
            .collect()
    };
    MvBases {
        total: piece_bases(&g.total, rng),
        disk: piece_bases(&g.disk, rng),
        left: piece_bases(&g.left, rng),
        right: piece_bases(&g.right, rng),
    }
}

/// Checks `T(M₁)T(M₂) = ±T(M)·T(D²)·T(H∗)` for `trials` random basis draws.
pub fn verify_mv<R: Rng + ?Sized>(
    m1: &CwComplexData,
    m2: &CwComplexData,
    psi1: &Representation,
    psi2: &Representation,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<MvReport, GlueError> {
    let g = GluedComplexes::new(m1, m2, psi1, psi2, tol)?;
    let mut out = Vec::with_capacity(trials);
    let mut rank_phi1 = 0;
    for _ in 0..trials {
        let bases = random_bases(&g, rng);
        let seq = mv_sequence(&g, &bases)?;
        rank_phi1 = seq.dimensions.rank_phi1;
        let id = mv_identity(&g, &seq)?;
        out.push(MvTrial {
            lhs: id.lhs,
            rhs: id.rhs,
            corrective: id.corrective,
            relative_error: relative_error_up_to_sign(id.lhs, id.rhs),
            signed_relative_error: relative_error(id.lhs, id.rhs),
        });
    }
    let max = |f: fn(&MvTrial) -> f64| out.iter().map(f).fold(0.0, f64::max);
    let max_relative_error = max(|t| t.relative_error);
    let max_signed_relative_error = max(|t| t.signed_relative_error);
    Ok(MvReport {
        pass: max_relative_error <= VERIFY_TOL,
        trials: out,
        max_relative_error,
        max_signed_relative_error,
        rank_phi1,
    })
}

/// One gluing `M_k = M_{k-1} △ F_k` of the left fold.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub name: String,
    pub total: Complex64,
    pub left: Complex64,
    pub right: Complex64,
    pub disk: Complex64,
    /// Corrective term recomputed with the transported bases.
    pub corrective: Complex64,
    pub transport: TransportedBases,
    /// `T(M_k)` against `T(M_{k-1}) T(F_k) / T(D²)`, up to sign.
    pub relative_error: f64,
    pub signed_relative_error: f64,
    pub corrective_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    pub steps: Vec<StepReport>,
    /// Factor torsions with the transported bases, in input order.
    pub factor_torsions: Vec<Complex64>,
    pub factor_bases: Vec<Vec<CMatrix>>,
    pub total: Complex64,
    pub product: Complex64,
    pub relative_error: f64,
    pub signed_relative_error: f64,
    pub pass: bool,
}

/// Folds the disk sum left to right, transports the bases of the total
/// space down through every step and compares `T(M)` with the product of
/// the factor torsions.
///
/// `h_total` defaults to the canonical bases of `M`; `h_disk` to `φ₀(c₀)`.
pub fn verify_theorem1(
    factors: &[CwComplexData],
    reps: &[Representation],
    h_total: Option<Vec<CMatrix>>,
    h_disk: Option<CMatrix>,
    tol: f64,
) -> Result<Theorem1Report, GlueError> {
    if factors.len() < 2 {
        return Err(GlueError::Invalid(format!(
            "at least two factors are required, got {}",
            factors.len()
        )));
    }
    if reps.len() != factors.len() {
        return Err(GlueError::Invalid(format!(
            "{} representations for {} factors",
            reps.len(),
            factors.len()
        )));
    }

    let mut steps: Vec<GluedComplexes> = Vec::with_capacity(factors.len() - 1);
    let mut acc = factors[0].clone();
    let mut acc_rep = reps[0].clone();
    for k in 1..factors.len() {
        let g = GluedComplexes::new(&acc, &factors[k], &acc_rep, &reps[k], tol)
            .map_err(|e| e.at_step(k))?;
        acc = g.total.cw.clone();
        acc_rep = g.total.rep.clone();
        steps.push(g);
    }

    let last = steps.last().expect("at least one step");
    let mut current = match h_total {
        Some(h) => pad(h),
        None => last.total.canonical_bases(),
    };
    let total = last
        .total
        .torsion(&current)
        .map_err(|e| e.at_step(steps.len()))?
        .value;

    let mut reports = Vec::with_capacity(steps.len());
    let mut factor_bases = vec![Vec::new(); factors.len()];
    for (idx, g) in steps.iter().enumerate().rev() {
        let k = idx + 1;
        let step = |e: GlueError| e.at_step(k);
        let mut bases = g.canonical_bases();
        bases.total = current.clone();
        if let Some(h) = &h_disk {
            bases.disk[0] = h.clone();
        }
        let seq = mv_sequence(g, &bases).map_err(step)?;
        let transport = transport_bases(&seq).map_err(step)?;
        let moved = MvBases {
            left: transport.h_m1.clone(),
            right: transport.h_m2.clone(),
            ..bases
        };
        let seq = mv_sequence(g, &moved).map_err(step)?;
        let corrective = corrective_term(&seq).map_err(step)?.value;
        let t_total = g.total.torsion(&moved.total).map_err(step)?.value;
        let t_left = g.left.torsion(&moved.left).map_err(step)?.value;
        let t_right = g.right.torsion(&moved.right).map_err(step)?.value;
        let t_disk = g.disk.torsion(&moved.disk).map_err(step)?.value;
        let predicted = t_left * t_right / t_disk;
        reports.push(StepReport {
            step: k,
            name: g.total.cw.name().to_string(),
            total: t_total,
            left: t_left,
            right: t_right,
            disk: t_disk,
            corrective,
            transport,
            relative_error: relative_error_up_to_sign(t_total, predicted),
            signed_relative_error: relative_error(t_total, predicted),
            corrective_error: relative_error(corrective, c64(1.0, 0.0)),
        });
        factor_bases[k] = moved.right;
        current = moved.left;
    }
    factor_bases[0] = current;
    reports.reverse();

    let mut factor_torsions = Vec::with_capacity(factors.len());
    for (k, h) in factor_bases.iter().enumerate() {
        let piece = if k == 0 {
            &steps[0].left
        } else {
            &steps[k - 1].right
        };
        factor_torsions.push(piece.torsion(h).map_err(|e| e.at_step(k.max(1)))?.value);
    }
    let product: Complex64 = factor_torsions.iter().product();
    let relative_error = relative_error_up_to_sign(total, product);
    Ok(Theorem1Report {
        steps: reports,
        factor_torsions,
        factor_bases,
        total,
        product,
        relative_error,
        signed_relative_error: crate::linalg::relative_error(total, product),
        pass: relative_error <= VERIFY_TOL,
    })
}

fn pad(mut h: Vec<CMatrix>) -> Vec<CMatrix> {
    while h.len() < MV_DEGREES {
        h.push(CMatrix::zeros(0, 0));
    }
    h
}
