use num_complex::Complex64;

use crate::linalg::{c64, decompose, det, hstack, identity, CMatrix};

use super::mv::{MvSequence, MV_DEGREES, MV_SPACES};
use super::GlueError;

/// A bracket that could not be set to one where it arose.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedResidual {
    pub position: usize,
    pub value: Complex64,
    /// Factor position whose first basis vector absorbed the residual.
    pub absorbed_at: Option<usize>,
}

/// Factor bases chosen so that the sequence has trivial torsion.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedBases {
    pub h_m1: Vec<CMatrix>,
    pub h_m2: Vec<CMatrix>,
    /// Per degree `i`, `A = (H'⁻¹)ᵀ` where `H'` is the frame `[b | s]` of
    /// `H_i(M₁) ⊕ H_i(M₂)` in the reference factor bases.
    pub transport_matrices: Vec<CMatrix>,
    pub det_a: Vec<Complex64>,
    /// `det [b_p | s_p]` at every position after transport.
    pub brackets: Vec<Complex64>,
    pub forced_residuals: Vec<ForcedResidual>,
    /// Per degree, the new factor basis in reference coordinates.
    pub factor_coordinates: Vec<CMatrix>,
}

impl TransportedBases {
    pub fn det_a_product(&self) -> Complex64 {
        self.det_a.iter().product()
    }
}

/// Chooses factor bases for which every bracket of the sequence is one,
/// keeping the bases of `H_*(M)` and `H_0(D²)` stored in `seq`.
///
/// Images are pinned to `∂(e_k)` for given bases `e_k` wherever the next
/// space carries a given basis, so preimages are exact.
pub fn transport_bases(seq: &MvSequence) -> Result<TransportedBases, GlueError> {
    let tol = seq.tol;
    let maps: Vec<CMatrix> = (0..=MV_SPACES).map(|k| seq.map(k)).collect();
    let given = |p: usize| !MvSequence::is_factor_position(p);

    let mut b: Vec<CMatrix> = Vec::with_capacity(MV_SPACES);
    let mut pinned: Vec<Option<CMatrix>> = vec![None; MV_SPACES + 1];
    let mut frames: Vec<CMatrix> = Vec::with_capacity(MV_SPACES);
    let mut bases: Vec<CMatrix> = seq.spaces.iter().map(|&n| identity(n)).collect();
    let mut forced = Vec::new();
    let mut transport_matrices = vec![CMatrix::zeros(0, 0); MV_DEGREES];
    let mut det_a = vec![c64(1.0, 0.0); MV_DEGREES];

    for p in 0..MV_SPACES {
        let n = seq.spaces[p];
        let incoming = &maps[p + 1];
        let dec_in = decompose(incoming, tol)?;
        let mut bp = if dec_in.rank == 0 {
            CMatrix::zeros(n, 0)
        } else if p + 1 < MV_SPACES && given(p + 1) {
            let chosen = greedy_columns(incoming, dec_in.rank, tol)?;
            let e = selection(seq.spaces[p + 1], &chosen);
            let image = incoming * &e;
            pinned[p + 1] = Some(e);
            image
        } else if given(p) && dec_in.rank == n {
            identity(n)
        } else {
            dec_in.image.clone()
        };

        let sp = match p.checked_sub(1) {
            Some(q) if b[q].ncols() > 0 => match pinned[p].take() {
                Some(e) => e,
                None => decompose(&maps[p], tol)?.pseudo_solve(&b[q]),
            },
            _ => CMatrix::zeros(n, 0),
        };

        let mut frame = hstack(&[&bp, &sp]);
        if frame.ncols() != n {
            return Err(GlueError::Transport(format!(
                "position {p}: {} frame vectors in a space of dimension {n}",
                frame.ncols()
            )));
        }
        let delta = det(&frame);
        if delta.norm() < f64::EPSILON {
            return Err(GlueError::Transport(format!(
                "position {p}: singular frame"
            )));
        }
        if given(p) {
            if bp.ncols() > 0 {
                let scale = delta.inv();
                let col = bp.column(0) * scale;
                bp.set_column(0, &col);
                frame.set_column(0, &col);
                if let Some(e) = pinned[p + 1].as_mut() {
                    let pre = e.column(0) * scale;
                    e.set_column(0, &pre);
                }
            } else if n > 0 && (delta - c64(1.0, 0.0)).norm() > 1e-12 {
                forced.push(ForcedResidual {
                    position: p,
                    value: delta,
                    absorbed_at: None,
                });
            }
        } else if n > 0 {
            // New basis = reference with its first vector scaled by det H'.
            bases[p][(0, 0)] = delta;
            let i = p / 3;
            let inv = frame.clone().try_inverse().ok_or_else(|| {
                GlueError::Transport(format!("position {p}: transport matrix is singular"))
            })?;
            transport_matrices[i] = inv.transpose();
            det_a[i] = delta.inv();
        } else {
            transport_matrices[p / 3] = CMatrix::zeros(0, 0);
        }
        b.push(bp);
        frames.push(frame);
    }

    if !forced.is_empty() {
        let residual: Complex64 = forced
            .iter()
            .map(|f| {
                if f.position % 2 == 0 {
                    f.value
                } else {
                    f.value.inv()
                }
            })
            .product();
        let target = (0..MV_SPACES).find(|&q| !given(q) && seq.spaces[q] > 0);
        if let Some(q) = target {
            let kappa = if q % 2 == 0 { residual } else { residual.inv() };
            bases[q][(0, 0)] *= kappa;
            det_a[q / 3] /= kappa;
            for f in &mut forced {
                f.absorbed_at = Some(q);
            }
        }
    }

    let brackets = frames
        .iter()
        .zip(&bases)
        .map(|(f, g)| {
            let inv = g.clone().try_inverse().expect("diagonal basis change");
            det(&(inv * f))
        })
        .collect();

    let mut h_m1 = Vec::with_capacity(MV_DEGREES);
    let mut h_m2 = Vec::with_capacity(MV_DEGREES);
    let mut factor_coordinates = Vec::with_capacity(MV_DEGREES);
    for (i, &(nl, nr)) in seq.factor_split.iter().enumerate() {
        let g = &bases[3 * i + 1];
        let left = &seq.bases.left[i];
        let right = &seq.bases.right[i];
        h_m1.push(if nl == 0 {
            left.clone()
        } else {
            left * g.view((0, 0), (nl, nl))
        });
        h_m2.push(if nr == 0 {
            right.clone()
        } else {
            right * g.view((nl, nl), (nr, nr))
        });
        factor_coordinates.push(g.clone());
    }

    Ok(TransportedBases {
        h_m1,
        h_m2,
        transport_matrices,
        det_a,
        brackets,
        forced_residuals: forced,
        factor_coordinates,
    })
}

/// Indices of a maximal set of columns of `m` with independent images,
/// chosen greedily in index order.
fn greedy_columns(m: &CMatrix, rank: usize, tol: f64) -> Result<Vec<usize>, GlueError> {
    let mut chosen = Vec::with_capacity(rank);
    for k in 0..m.ncols() {
        if chosen.len() == rank {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(k);
        let sub = m.select_columns(&trial);
        if decompose(&sub, tol)?.rank == trial.len() {
            chosen = trial;
        }
    }
    if chosen.len() < rank {
        return Err(GlueError::Transport(
            "could not select independent columns".into(),
        ));
    }
    Ok(chosen)
}

fn selection(n: usize, chosen: &[usize]) -> CMatrix {
    let mut e = CMatrix::zeros(n, chosen.len());
    for (c, &k) in chosen.iter().enumerate() {
        e[(k, c)] = c64(1.0, 0.0);
    }
    e
}
