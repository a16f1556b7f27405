//! TOML scene files: a CW complex, a representation, options and optional
//! homology bases. See `docs/scene-format.md` for the grammar.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::algebra::{
    check_representation, GroupPresentation, GroupRingElement, GroupRingMatrix, Representation,
    Target, Word,
};
use crate::complex::{CwComplexData, RELATOR_TOL};
use crate::linalg::{c64, CMatrix};

use super::expr::{
    default_names, parse_group_ring, parse_word, ExprError, NamedElement, NamedWord,
};

/// Upper bound on cells per degree accepted from a file.
pub const MAX_CELLS: usize = 4096;
/// Upper bound on the matrix size `n`.
pub const MAX_N: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad expression at line {line}, column {column}: {message}")]
    Expression {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
}

/// A parsed scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub complex: CwComplexData,
    pub representation: Representation,
    pub generator_names: Vec<char>,
    pub tol: Option<f64>,
    /// Homology bases by degree, as columns of cycle vectors.
    pub h_bases: BTreeMap<usize, CMatrix>,
}

impl Scene {
    /// Wraps a complex and representation with default generator names.
    pub fn new(complex: CwComplexData, representation: Representation) -> Result<Self, SceneError> {
        let count = complex.presentation().generator_count();
        let generator_names = default_names(count)
            .ok_or_else(|| SceneError::Semantic(format!("{count} generators cannot be named")))?;
        Ok(Scene {
            complex,
            representation,
            generator_names,
            tol: None,
            h_bases: BTreeMap::new(),
        })
    }

    /// Lie algebra dimension `n² - 1`.
    pub fn lie_dim(&self) -> usize {
        let n = self.representation.n();
        n * n - 1
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    generators: Vec<Spanned<String>>,
    #[serde(default)]
    relators: Vec<Spanned<String>>,
    cells: Spanned<Vec<usize>>,
    #[serde(default)]
    boundaries: Vec<Spanned<Vec<Vec<Spanned<RawEntry>>>>>,
    #[serde(default)]
    representation: Option<RawRepresentation>,
    #[serde(default)]
    options: Option<RawOptions>,
    #[serde(default)]
    h_bases: Vec<RawHBasis>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawEntry {
    Expr(String),
    Terms(Vec<(i64, String)>),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRepresentation {
    #[serde(default = "default_target")]
    target: Target,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default)]
    images: Vec<Vec<Vec<[f64; 2]>>>,
}

fn default_target() -> Target {
    Target::Sl
}

fn default_n() -> usize {
    2
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawHBasis {
    degree: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

/// Byte offset to one-based line and character column.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn expr_error(&self, span: Range<usize>, e: ExprError, quoted: bool) -> SceneError {
        let (line, column) = line_col(self.text, span.start);
        SceneError::Expression {
            line,
            column: column + usize::from(quoted) + e.column - 1,
            message: e.message,
        }
    }

    fn at(&self, span: Range<usize>, message: impl Into<String>) -> SceneError {
        let (line, column) = line_col(self.text, span.start);
        SceneError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

fn finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<(), SceneError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(SceneError::Semantic(format!(
            "{what} contains a non-finite number"
        )))
    }
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let raw: RawScene = toml::from_str(text).map_err(|e| {
        let (line, column) = line_col(text, e.span().map_or(0, |s| s.start));
        SceneError::Syntax {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    let ctx = Ctx { text };

    let mut names = Vec::with_capacity(raw.generators.len());
    for g in &raw.generators {
        let mut chars = g.get_ref().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() && !names.contains(&c) => names.push(c),
            _ => {
                return Err(ctx.at(
                    g.span(),
                    format!(
                        "generator names must be distinct single lowercase letters, found {:?}",
                        g.get_ref()
                    ),
                ))
            }
        }
    }
    let mut relators = Vec::with_capacity(raw.relators.len());
    for r in &raw.relators {
        let w = parse_word(r.get_ref(), &names).map_err(|e| ctx.expr_error(r.span(), e, true))?;
        relators.push(w);
    }
    let presentation = GroupPresentation::new(names.len(), relators)
        .map_err(|e| SceneError::Semantic(e.to_string()))?;

    let cells = raw.cells.get_ref().clone();
    if cells.is_empty() {
        return Err(ctx.at(raw.cells.span(), "at least one cell count is required"));
    }
    if let Some(&m) = cells.iter().find(|&&m| m > MAX_CELLS) {
        return Err(ctx.at(
            raw.cells.span(),
            format!("{m} cells exceeds the limit {MAX_CELLS}"),
        ));
    }
    if raw.boundaries.len() + 1 != cells.len() {
        return Err(SceneError::Semantic(format!(
            "{} cell counts need {} boundary matrices, found {}",
            cells.len(),
            cells.len() - 1,
            raw.boundaries.len()
        )));
    }
    let mut boundaries = Vec::with_capacity(raw.boundaries.len());
    for (k, m) in raw.boundaries.iter().enumerate() {
        let (rows, cols) = (cells[k], cells[k + 1]);
        if m.get_ref().len() != rows || m.get_ref().iter().any(|r| r.len() != cols) {
            return Err(ctx.at(
                m.span(),
                format!("boundary {} must be {rows} x {cols}", k + 1),
            ));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for entry in m.get_ref().iter().flatten() {
            entries.push(parse_entry(&ctx, entry, &names)?);
        }
        boundaries.push(GroupRingMatrix::from_entries(rows, cols, entries));
    }
    let name = raw.name.unwrap_or_else(|| "scene".to_string());
    let complex = CwComplexData::new(name, presentation, cells, boundaries)
        .map_err(|e| SceneError::Semantic(e.to_string()))?;

    let representation = build_representation(raw.representation, names.len())?;
    let check = check_representation(complex.presentation(), &representation, RELATOR_TOL);
    if !check.ok {
        return Err(SceneError::Semantic(format!(
            "representation does not satisfy the relators (residuals {:?})",
            check.residuals
        )));
    }

    let tol = raw.options.and_then(|o| o.tol);
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(SceneError::Semantic(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }

    let d = representation.n() * representation.n() - 1;
    let mut h_bases = BTreeMap::new();
    for hb in raw.h_bases {
        let p = hb.degree;
        if p > complex.dimension() {
            return Err(SceneError::Semantic(format!(
                "homology basis for degree {p} exceeds the dimension {}",
                complex.dimension()
            )));
        }
        let len = complex.cells()[p] * d;
        if let Some(v) = hb.vectors.iter().find(|v| v.len() != len) {
            return Err(SceneError::Semantic(format!(
                "degree {p} vectors must have {len} entries, found {}",
                v.len()
            )));
        }
        finite(
            hb.vectors.iter().flatten().flatten().cloned(),
            "homology basis",
        )?;
        let m = CMatrix::from_fn(len, hb.vectors.len(), |r, c| {
            let [re, im] = hb.vectors[c][r];
            c64(re, im)
        });
        if h_bases.insert(p, m).is_some() {
            return Err(SceneError::Semantic(format!(
                "duplicate homology basis for degree {p}"
            )));
        }
    }

    Ok(Scene {
        complex,
        representation,
        generator_names: names,
        tol,
        h_bases,
    })
}

fn parse_entry(
    ctx: &Ctx<'_>,
    entry: &Spanned<RawEntry>,
    names: &[char],
) -> Result<GroupRingElement, SceneError> {
    match entry.get_ref() {
        RawEntry::Expr(s) => {
            parse_group_ring(s, names).map_err(|e| ctx.expr_error(entry.span(), e, true))
        }
        RawEntry::Terms(terms) => {
            let mut out = GroupRingElement::zero();
            for (c, w) in terms {
                let w = parse_word(w, names).map_err(|e| ctx.expr_error(entry.span(), e, false))?;
                out.add_term(*c, w);
            }
            Ok(out)
        }
    }
}

fn build_representation(
    raw: Option<RawRepresentation>,
    generators: usize,
) -> Result<Representation, SceneError> {
    let Some(raw) = raw else {
        return Ok(Representation::trivial(Target::Sl, 2, generators));
    };
    if !(2..=MAX_N).contains(&raw.n) {
        return Err(SceneError::Semantic(format!(
            "n must be between 2 and {MAX_N}, got {}",
            raw.n
        )));
    }
    if raw.images.len() != generators {
        return Err(SceneError::Semantic(format!(
            "{} images for {generators} generators",
            raw.images.len()
        )));
    }
    let n = raw.n;
    let mut images = Vec::with_capacity(generators);
    for (g, m) in raw.images.iter().enumerate() {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(SceneError::Semantic(format!("image {g} must be {n} x {n}")));
        }
        finite(m.iter().flatten().flatten().cloned(), "representation")?;
        images.push(CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = m[r][c];
            c64(re, im)
        }));
    }
    Representation::new(raw.target, n, images).map_err(|e| SceneError::Semantic(e.to_string()))
}

#[derive(Serialize)]
struct OutScene {
    name: String,
    generators: Vec<String>,
    relators: Vec<String>,
    cells: Vec<usize>,
    boundaries: Vec<Vec<Vec<String>>>,
    representation: RawRepresentation,
    #[serde(skip_serializing_if = "Option::is_none")]
    options: Option<RawOptions>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    h_bases: Vec<RawHBasis>,
}

fn pair(z: &num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Serializes a scene so that `parse_scene(print_scene(s)) == s`.
pub fn print_scene(scene: &Scene) -> String {
    let names = &scene.generator_names;
    let word = |w: &Word| NamedWord { word: w, names }.to_string();
    let cw = &scene.complex;
    let boundaries = cw
        .boundaries()
        .iter()
        .map(|b| {
            (0..b.rows())
                .map(|r| {
                    (0..b.cols())
                        .map(|c| {
                            NamedElement {
                                element: b.get(r, c),
                                names,
                            }
                            .to_string()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let rep = &scene.representation;
    let out = OutScene {
        name: cw.name().to_string(),
        generators: names.iter().map(|c| c.to_string()).collect(),
        relators: cw.presentation().relators().iter().map(word).collect(),
        cells: cw.cells().to_vec(),
        boundaries,
        representation: RawRepresentation {
            target: rep.target(),
            n: rep.n(),
            images: rep
                .images()
                .iter()
                .map(|m| {
                    (0..m.nrows())
                        .map(|r| (0..m.ncols()).map(|c| pair(&m[(r, c)])).collect())
                        .collect()
                })
                .collect(),
        },
        options: scene.tol.map(|t| RawOptions { tol: Some(t) }),
        h_bases: scene
            .h_bases
            .iter()
            .map(|(&degree, m)| RawHBasis {
                degree,
                vectors: m
                    .column_iter()
                    .map(|col| col.iter().map(pair).collect())
                    .collect(),
            })
            .collect(),
    };
    toml::to_string(&out).expect("scene serializes")
}
