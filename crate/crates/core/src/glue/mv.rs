use num_complex::Complex64;

use crate::algebra::{orthonormal_sln_basis, LieAlgebraBasis, Representation};
use crate::complex::{
    homology, twist, ChainComplex, CwComplexData, HomologyData, TwistedChainComplex,
};
use crate::io::builders;
use crate::linalg::{
    decompose, hstack, identity, min_norm_solve, spectral_norm, CMatrix, LinalgError,
};
use crate::torsion::{check_homology_basis, torsion_with_bases, TorsionResult};

use super::disk_sum::{disk_sum, free_product_rep, DiskSumResult, Side};
use super::GlueError;

/// Homology degrees covered by the sequence.
pub const MV_DEGREES: usize = 4;

/// Number of spaces `C_0(H∗) .. C_11(H∗)`.
pub const MV_SPACES: usize = 3 * MV_DEGREES;

/// Bound on scaled compositions of consecutive maps.
pub const EXACTNESS_TOL: f64 = 1e-8;

/// A twisted complex together with its homology.
#[derive(Debug, Clone)]
pub struct TwistedPiece {
    pub cw: CwComplexData,
    pub rep: Representation,
    pub tc: TwistedChainComplex,
    pub hd: HomologyData,
}

impl TwistedPiece {
    pub fn new(
        cw: CwComplexData,
        rep: Representation,
        basis: &LieAlgebraBasis,
        tol: f64,
    ) -> Result<Self, GlueError> {
        let tc = twist(&cw, &rep, basis)?;
        let hd = homology(tc.chain(), tol)?;
        Ok(TwistedPiece { cw, rep, tc, hd })
    }

    pub fn chain(&self) -> &ChainComplex {
        self.tc.chain()
    }

    pub fn dim(&self, p: usize) -> usize {
        self.chain().dim(p)
    }

    pub fn betti(&self, p: usize) -> usize {
        self.hd.betti(p)
    }

    pub fn top_degree(&self) -> usize {
        self.chain().top_degree()
    }

    /// Canonical homology basis in degree `p`, empty above the top degree.
    pub fn canonical(&self, p: usize) -> CMatrix {
        if p <= self.top_degree() {
            self.hd.degree(p).h_basis.clone()
        } else {
            CMatrix::zeros(0, 0)
        }
    }

    /// Canonical bases padded to `MV_DEGREES` degrees.
    pub fn canonical_bases(&self) -> Vec<CMatrix> {
        (0..MV_DEGREES).map(|p| self.canonical(p)).collect()
    }

    /// The bases restricted to the degrees of this complex.
    pub fn trim<'a>(&self, bases: &'a [CMatrix]) -> &'a [CMatrix] {
        &bases[..self.top_degree() + 1]
    }

    pub fn torsion(&self, bases: &[CMatrix]) -> Result<TorsionResult, GlueError> {
        Ok(torsion_with_bases(
            self.chain(),
            &self.hd,
            self.trim(bases),
        )?)
    }

    /// Coordinates of the classes of `vectors` in the basis `h` of `H_p`.
    pub fn coords(&self, p: usize, h: &CMatrix, vectors: &CMatrix) -> Result<CMatrix, GlueError> {
        if p > self.top_degree() {
            return Ok(CMatrix::zeros(0, vectors.ncols()));
        }
        Ok(self.hd.class_coordinates(p, h, vectors)?)
    }

    pub fn validate_bases(&self, bases: &[CMatrix]) -> Result<(), GlueError> {
        if bases.len() != MV_DEGREES {
            return Err(GlueError::Invalid(format!(
                "{} homology bases given, expected {MV_DEGREES}",
                bases.len()
            )));
        }
        for (p, h) in bases.iter().enumerate() {
            if p > self.top_degree() {
                if !h.is_empty() {
                    return Err(GlueError::Invalid(format!(
                        "nonempty homology basis in degree {p} of {}",
                        self.cw.name()
                    )));
                }
                continue;
            }
            check_homology_basis(self.chain(), &self.hd, p, h)?;
        }
        Ok(())
    }
}

/// Everything computed for one disk sum `M = M₁ △ M₂`.
#[derive(Debug, Clone)]
pub struct GluedComplexes {
    pub ds: DiskSumResult,
    pub basis: LieAlgebraBasis,
    pub left: TwistedPiece,
    pub right: TwistedPiece,
    pub total: TwistedPiece,
    pub disk: TwistedPiece,
    pub tol: f64,
}

impl GluedComplexes {
    pub fn new(
        m1: &CwComplexData,
        m2: &CwComplexData,
        psi1: &Representation,
        psi2: &Representation,
        tol: f64,
    ) -> Result<Self, GlueError> {
        let ds = disk_sum(m1, m2)?;
        let rep = free_product_rep(psi1, psi2, &ds)?;
        let basis = orthonormal_sln_basis(rep.n());
        let left = TwistedPiece::new(m1.clone(), psi1.clone(), &basis, tol)?;
        let right = TwistedPiece::new(m2.clone(), psi2.clone(), &basis, tol)?;
        let total = TwistedPiece::new(ds.total.clone(), rep.clone(), &basis, tol)?;
        let trivial = Representation::trivial(rep.target(), rep.n(), 0);
        let disk = TwistedPiece::new(builders::disk(), trivial, &basis, tol)?;
        Ok(GluedComplexes {
            ds,
            basis,
            left,
            right,
            total,
            disk,
            tol,
        })
    }

    pub fn lie_dim(&self) -> usize {
        self.basis.dim()
    }

    /// `φ₀(c₀)`: the geometric basis of `H₀(D²) = C₀(D²)`.
    pub fn disk_geometric_bases(&self) -> Vec<CMatrix> {
        let mut out = vec![CMatrix::zeros(0, 0); MV_DEGREES];
        out[0] = identity(self.lie_dim());
        out
    }

    pub fn canonical_bases(&self) -> MvBases {
        MvBases {
            total: self.total.canonical_bases(),
            disk: self.disk_geometric_bases(),
            left: self.left.canonical_bases(),
            right: self.right.canonical_bases(),
        }
    }

    fn inclusion(&self, side: Side, p: usize) -> CMatrix {
        self.ds.inclusion(side, p, self.lie_dim())
    }

    fn disk_inclusion(&self, side: Side, p: usize) -> CMatrix {
        let piece = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        if p == 0 {
            DiskSumResult::disk_inclusion(&piece.cw, self.lie_dim())
        } else {
            CMatrix::zeros(piece.dim(p), 0)
        }
    }
}

/// Per-degree homology bases (cycle vectors) of the four complexes.
#[derive(Debug, Clone, PartialEq)]
pub struct MvBases {
    pub total: Vec<CMatrix>,
    pub disk: Vec<CMatrix>,
    pub left: Vec<CMatrix>,
    pub right: Vec<CMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub position: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub composition_residual: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport {
    pub junctions: Vec<Junction>,
    pub pass: bool,
}

impl ExactnessReport {
    pub fn max_composition_residual(&self) -> f64 {
        self.junctions
            .iter()
            .map(|j| j.composition_residual)
            .fold(0.0, f64::max)
    }
}

/// Dimensions `n_i^X` of the homology groups in the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    pub total: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub disk0: usize,
    /// Rank of the connecting map `H₁(M) → H₀(D²)`.
    pub rank_phi1: usize,
    /// `n_0^{M₁} + n_0^{M₂} = n_0^M + n_0^{D²}`.
    pub degree0_identity: bool,
    /// `n_0^{M₁} + n_0^{M₂} = n_0^M + n_0^{D²} - rank φ₁`.
    pub degree0_identity_corrected: bool,
    /// `n_i^{M₁} + n_i^{M₂} = n_i^M` for `i = 1, 2, 3`.
    pub higher_identities: bool,
    /// `n_1^{M₁} + n_1^{M₂} + rank φ₁ = n_1^M` and the others unchanged.
    pub higher_identities_corrected: bool,
    /// Whether `H_i(M₁) ⊕ H_i(M₂) → H_i(M)` is an isomorphism, `i = 1, 2, 3`.
    pub isomorphisms: Vec<bool>,
}

/// The long exact sequence in homology viewed as an acyclic complex
/// `C_11 → ... → C_0`, written in the coordinates of `bases`.
#[derive(Debug, Clone)]
pub struct MvSequence {
    pub spaces: Vec<usize>,
    /// `maps[k - 1]` is `C_k → C_{k-1}`.
    pub maps: Vec<CMatrix>,
    pub bases: MvBases,
    /// `(n_i^{M₁}, n_i^{M₂})` for each degree `i`.
    pub factor_split: Vec<(usize, usize)>,
    pub exactness: ExactnessReport,
    pub dimensions: DimensionReport,
    pub tol: f64,
}

impl MvSequence {
    pub fn chain(&self) -> ChainComplex {
        ChainComplex::new(self.spaces.clone(), self.maps.clone())
            .expect("shapes checked on assembly")
    }

    /// `C_k → C_{k-1}`, empty for `k = 0` and `k = 12`.
    pub fn map(&self, k: usize) -> CMatrix {
        self.chain().boundary(k)
    }

    /// Positions holding factor homology `H_i(M₁) ⊕ H_i(M₂)`.
    pub fn is_factor_position(p: usize) -> bool {
        p % 3 == 1
    }
}

/// Builds the sequence and checks exactness; fails if any junction is not exact.
pub fn mv_sequence(g: &GluedComplexes, bases: &MvBases) -> Result<MvSequence, GlueError> {
    let seq = assemble(g, bases)?;
    if !seq.exactness.pass {
        let bad = seq
            .exactness
            .junctions
            .iter()
            .find(|j| !j.exact)
            .expect("a failing junction exists");
        return Err(GlueError::NotExact {
            position: bad.position,
            residual: bad.composition_residual,
        });
    }
    Ok(seq)
}

/// Builds the sequence without failing on exactness defects.
pub fn assemble(g: &GluedComplexes, bases: &MvBases) -> Result<MvSequence, GlueError> {
    g.total.validate_bases(&bases.total)?;
    g.left.validate_bases(&bases.left)?;
    g.right.validate_bases(&bases.right)?;
    g.disk.validate_bases(&bases.disk)?;

    let mut spaces = Vec::with_capacity(MV_SPACES);
    let mut factor_split = Vec::with_capacity(MV_DEGREES);
    for i in 0..MV_DEGREES {
        let (nl, nr) = (g.left.betti(i), g.right.betti(i));
        spaces.extend([g.total.betti(i), nl + nr, g.disk.betti(i)]);
        factor_split.push((nl, nr));
    }

    let mut maps = Vec::with_capacity(MV_SPACES - 1);
    for k in 1..MV_SPACES {
        let i = k / 3;
        let m = match k % 3 {
            1 => difference_map(g, bases, i)?,
            2 => disk_map(g, bases, i)?,
            _ => connecting_map(g, bases, i - 1)?,
        };
        debug_assert_eq!(m.shape(), (spaces[k - 1], spaces[k]));
        maps.push(m);
    }

    let exactness = check_exactness(&spaces, &maps, g.tol)?;
    let rank_phi1 = decompose(&maps[2], g.tol)?.rank;
    let dimensions = dimension_report(g, rank_phi1, &maps, g.tol)?;
    Ok(MvSequence {
        spaces,
        maps,
        bases: bases.clone(),
        factor_split,
        exactness,
        dimensions,
        tol: g.tol,
    })
}

/// `(x, y) ↦ J₁x - J₂y` on `H_i`.
fn difference_map(g: &GluedComplexes, b: &MvBases, i: usize) -> Result<CMatrix, GlueError> {
    let left = if i <= g.left.top_degree() {
        &g.inclusion(Side::Left, i) * &b.left[i]
    } else {
        CMatrix::zeros(g.total.dim(i), 0)
    };
    let right = if i <= g.right.top_degree() {
        -(&g.inclusion(Side::Right, i) * &b.right[i])
    } else {
        CMatrix::zeros(g.total.dim(i), 0)
    };
    g.total.coords(i, &b.total[i], &hstack(&[&left, &right]))
}

/// `z ↦ (I₁z, I₂z)` on `H_i`.
fn disk_map(g: &GluedComplexes, b: &MvBases, i: usize) -> Result<CMatrix, GlueError> {
    let nd = g.disk.betti(i);
    let mut parts = Vec::with_capacity(2);
    for (side, piece, h) in [
        (Side::Left, &g.left, &b.left),
        (Side::Right, &g.right, &b.right),
    ] {
        if nd == 0 || i > piece.top_degree() {
            parts.push(CMatrix::zeros(piece.betti(i), nd));
            continue;
        }
        let image = &g.disk_inclusion(side, i) * &b.disk[i];
        parts.push(piece.coords(i, &h[i], &image)?);
    }
    let mut out = CMatrix::zeros(parts[0].nrows() + parts[1].nrows(), nd);
    out.view_mut((0, 0), parts[0].shape()).copy_from(&parts[0]);
    out.view_mut((parts[0].nrows(), 0), parts[1].shape())
        .copy_from(&parts[1]);
    Ok(out)
}

/// The connecting map `H_{i+1}(M) → H_i(D²)`.
fn connecting_map(g: &GluedComplexes, b: &MvBases, i: usize) -> Result<CMatrix, GlueError> {
    let nd = g.disk.betti(i);
    let nm = g.total.betti(i + 1);
    if nd == 0 || nm == 0 {
        return Ok(CMatrix::zeros(nd, nm));
    }
    let tol = g.tol;
    let q = i + 1;
    // Lift z ∈ Z_q(M) to (a, b) with J₁a - J₂b = z.
    let j = hstack(&[&g.inclusion(Side::Left, q), &(-g.inclusion(Side::Right, q))]);
    let ab = min_norm_solve(&j, &b.total[q], tol)?;
    let nl = g.left.dim(q);
    let da = g.left.chain().boundary(q) * ab.rows(0, nl);
    let db = g.right.chain().boundary(q) * ab.rows(nl, ab.nrows() - nl);
    // (∂a, ∂b) = (I₁x, I₂x)
    let inc = vstack(
        &g.disk_inclusion(Side::Left, i),
        &g.disk_inclusion(Side::Right, i),
    );
    let x = min_norm_solve(&inc, &vstack(&da, &db), tol)?;
    g.disk.coords(i, &b.disk[i], &x)
}

fn vstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

fn check_exactness(
    spaces: &[usize],
    maps: &[CMatrix],
    tol: f64,
) -> Result<ExactnessReport, LinalgError> {
    let mut ranks = Vec::with_capacity(maps.len());
    for m in maps {
        ranks.push(decompose(m, tol)?.rank);
    }
    // ranks[k - 1] is the rank of C_k → C_{k-1}
    let rank_of = |k: usize| {
        k.checked_sub(1)
            .and_then(|i| ranks.get(i))
            .cloned()
            .unwrap_or(0)
    };
    let mut junctions = Vec::with_capacity(spaces.len());
    for (p, &dim) in spaces.iter().enumerate() {
        let composition_residual = match (p.checked_sub(1).and_then(|i| maps.get(i)), maps.get(p)) {
            (Some(out), Some(inc)) => {
                let scale = (spectral_norm(out) * spectral_norm(inc)).max(1.0);
                spectral_norm(&(out * inc)) / scale
            }
            _ => 0.0,
        };
        let (rank_in, rank_out) = (rank_of(p + 1), rank_of(p));
        junctions.push(Junction {
            position: p,
            dim,
            rank_in,
            rank_out,
            composition_residual,
            exact: composition_residual <= EXACTNESS_TOL && rank_in + rank_out == dim,
        });
    }
    let pass = junctions.iter().all(|j| j.exact);
    Ok(ExactnessReport { junctions, pass })
}

fn dimension_report(
    g: &GluedComplexes,
    rank_phi1: usize,
    maps: &[CMatrix],
    tol: f64,
) -> Result<DimensionReport, LinalgError> {
    let collect = |p: &TwistedPiece| (0..MV_DEGREES).map(|i| p.betti(i)).collect::<Vec<_>>();
    let (total, left, right) = (collect(&g.total), collect(&g.left), collect(&g.right));
    let disk0 = g.disk.betti(0);
    let degree0_identity = left[0] + right[0] == total[0] + disk0;
    let degree0_identity_corrected = left[0] + right[0] + rank_phi1 == total[0] + disk0;
    let higher_identities = (1..MV_DEGREES).all(|i| left[i] + right[i] == total[i]);
    let higher_identities_corrected = (1..MV_DEGREES).all(|i| {
        let extra = if i == 1 { rank_phi1 } else { 0 };
        left[i] + right[i] + extra == total[i]
    });
    let mut isomorphisms = Vec::with_capacity(MV_DEGREES - 1);
    for i in 1..MV_DEGREES {
        let m = &maps[3 * i];
        let full = m.nrows() == m.ncols() && decompose(m, tol)?.rank == m.nrows();
        isomorphisms.push(full);
    }
    Ok(DimensionReport {
        total,
        left,
        right,
        disk0,
        rank_phi1,
        degree0_identity,
        degree0_identity_corrected,
        higher_identities,
        higher_identities_corrected,
        isomorphisms,
    })
}

/// Torsion of the acyclic complex `H∗` in the coordinates of its bases.
pub fn corrective_term(seq: &MvSequence) -> Result<TorsionResult, GlueError> {
    if !seq.exactness.pass {
        let bad = seq
            .exactness
            .junctions
            .iter()
            .find(|j| !j.exact)
            .expect("failing junction");
        return Err(GlueError::NotExact {
            position: bad.position,
            residual: bad.composition_residual,
        });
    }
    let cc = seq.chain();
    let hd = homology(&cc, seq.tol)?;
    let empty: Vec<CMatrix> = seq.spaces.iter().map(|&n| CMatrix::zeros(n, 0)).collect();
    Ok(torsion_with_bases(&cc, &hd, &empty)?)
}

/// `T(M₁)T(M₂)` and `T(M)T(D²)T(H∗)` for one choice of bases.
#[derive(Debug, Clone, PartialEq)]
pub struct MvIdentity {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub corrective: Complex64,
}

pub fn mv_identity(g: &GluedComplexes, seq: &MvSequence) -> Result<MvIdentity, GlueError> {
    let b = &seq.bases;
    let lhs = g.left.torsion(&b.left)?.value * g.right.torsion(&b.right)?.value;
    let corrective = corrective_term(seq)?.value;
    let rhs = g.total.torsion(&b.total)?.value * g.disk.torsion(&b.disk)?.value * corrective;
    Ok(MvIdentity {
        lhs,
        rhs,
        corrective,
    })
}
