//! Assembly of the truncated determinant blocks and their stable evaluation.
//!
//! For spherical bodies on the z-axis the operator splits into azimuthal
//! blocks `K^(m)`. A block is assembled in renormalized form
//!
//! ```text
//! K~ = G t~_A G^T t~_B,   G = D_B g(a w) D_A
//! ```
//!
//! where `D` are the per-body diagonal scale factors; the determinant of
//! `1 - K` is invariant under this similarity transformation while every
//! stored entry stays of order one. For a symmetric pair (or a sphere facing
//! a mirror at half the separation) the square root `K = K~^2` is assembled
//! instead, with `K~_{ll'} = (-1)^m g~_{ll'} t~_{l'}`.

use nalgebra::DMatrix;

use crate::angular::{
    dirichlet_log_scale, em_channel_count, em_channel_index, em_channel_of, EmCoupling, FieldKind,
    ScalarCoupling, ScaleSpec,
};
use crate::energy::{Configuration, Mode};
use crate::tmatrix::{t_em_conducting, t_scalar_dielectric, t_scalar_dirichlet, Scatterer, TRow};
use crate::{Error, Result};

/// Whether a block holds the full operator or its symmetric square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    FullK,
    KTilde,
}

/// Sign selector for `ln det(1 -+ entries)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetSign {
    /// `ln det(1 - entries)`
    Plus,
    /// `ln det(1 + entries)`
    Minus,
}

/// One truncated azimuthal block at fixed imaginary frequency, in
/// renormalized units. Scalar blocks are ordered by ascending `l` from
/// `|m|`; EM blocks by ascending `j` from `max(1, |m|)` with TE before TM.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    pub m: i32,
    pub omega: f64,
    pub l0: usize,
    pub min_index: usize,
    pub field_kind: FieldKind,
    pub kind: BlockKind,
    pub entries: DMatrix<f64>,
}

impl BlockMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Plain-text dump with a `m omega l0 kind` header line, one matrix row
    /// per following line. Used for debugging and oracle comparisons.
    pub fn dump_text(&self) -> String {
        let kind = match self.kind {
            BlockKind::FullK => "full-K",
            BlockKind::KTilde => "k-tilde",
        };
        let mut out = format!("{} {:.17e} {} {}\n", self.m, self.omega, self.l0, kind);
        for r in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|c| format!("{:.17e}", self.entries[(r, c)]))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Renormalized T-row of a sphere at reduced frequency `omega` (units of the
/// configuration's reference length).
pub(crate) fn sphere_t_row(body: &Scatterer, l0: usize, omega: f64, r_ref: f64) -> Result<TRow> {
    let radius = body
        .radius()
        .ok_or_else(|| Error::Config("T-matrix requested for a non-sphere body".into()))?;
    let x = omega * radius / r_ref;
    match body {
        Scatterer::ScalarDirichletSphere { .. } => t_scalar_dirichlet(l0, x),
        Scatterer::ScalarDielectricSphere { epsilon, .. } => t_scalar_dielectric(l0, x, *epsilon),
        Scatterer::EmConductingSphere { .. } => t_em_conducting(l0, x),
        _ => unreachable!(),
    }
}

fn sphere_log_scale(body: &Scatterer, l0: usize, omega: f64, r_ref: f64) -> Result<Vec<f64>> {
    let radius = body.radius().expect("scale factors need a sphere");
    dirichlet_log_scale(l0, omega * radius / r_ref)
}

/// Slice a full T-row onto the block's index range as a diagonal vector.
fn t_diag(row: &TRow, field: FieldKind, min_index: usize, l0: usize) -> Vec<f64> {
    match field {
        FieldKind::Scalar => (min_index..=l0).map(|l| row.entries[l]).collect(),
        FieldKind::Em => {
            let n = em_channel_count(min_index, l0);
            (0..n)
                .map(|idx| {
                    let (j, pol) = em_channel_of(idx, min_index);
                    row.entries[em_channel_index(j, pol, 1)]
                })
                .collect()
        }
    }
}

/// m-independent coupling coefficients, cached across quadrature nodes.
#[derive(Debug, Clone)]
pub(crate) enum Coupling {
    Scalar(ScalarCoupling),
    Em(EmCoupling),
}

impl Coupling {
    pub fn new(field: FieldKind, m: i32, l0: usize) -> Result<Self> {
        match field {
            FieldKind::Scalar => Ok(Coupling::Scalar(ScalarCoupling::new(m, l0)?)),
            FieldKind::Em => Ok(Coupling::Em(EmCoupling::new(m, l0)?)),
        }
    }

    pub fn min_index(&self) -> usize {
        match self {
            Coupling::Scalar(c) => c.l_min,
            Coupling::Em(c) => c.j_min,
        }
    }

    fn table(&self, x: f64, scaling: &ScaleSpec) -> Result<DMatrix<f64>> {
        match self {
            Coupling::Scalar(c) => Ok(c.table(x, scaling)?.entries),
            Coupling::Em(c) => Ok(c.table(x, scaling)?.entries),
        }
    }
}

/// Assemble the full block from precomputed per-frequency ingredients.
pub(crate) fn assemble_full_from_parts(
    coupling: &Coupling,
    field: FieldKind,
    l0: usize,
    x_sep: f64,
    t_a: &TRow,
    t_b: &TRow,
    lz_a: &[f64],
    lz_b: &[f64],
) -> Result<DMatrix<f64>> {
    let min_index = coupling.min_index();
    let scaling = ScaleSpec::LogZ { row: lz_b.to_vec(), col: lz_a.to_vec() };
    let g = coupling.table(x_sep, &scaling)?;
    let ta = t_diag(t_a, field, min_index, l0);
    let tb = t_diag(t_b, field, min_index, l0);
    // K~ = (G diag(ta)) G^T diag(tb)
    let mut m1 = g.clone();
    for (c, &t) in ta.iter().enumerate() {
        m1.column_mut(c).scale_mut(t);
    }
    let mut k = m1 * g.transpose();
    for (c, &t) in tb.iter().enumerate() {
        k.column_mut(c).scale_mut(t);
    }
    Ok(k)
}

/// Assemble the square-root block `K~_{ll'} = (-1)^m g~_{ll'} t~_{l'}` for a
/// symmetric pair or sphere-mirror geometry. The azimuthal phase is the
/// reflection parity of the image multipoles; its square drops out of the
/// full block but fixes how the determinant splits between the two mirror
/// flavors, and is pinned by the published sphere-mirror energies.
pub(crate) fn assemble_ktilde_from_parts(
    coupling: &Coupling,
    field: FieldKind,
    l0: usize,
    x_sep: f64,
    t: &TRow,
    lz: &[f64],
) -> Result<DMatrix<f64>> {
    let min_index = coupling.min_index();
    let scaling = ScaleSpec::LogZ { row: lz.to_vec(), col: lz.to_vec() };
    let g = coupling.table(x_sep, &scaling)?;
    let td = t_diag(t, field, min_index, l0);
    let mut k = g;
    for (c, &t) in td.iter().enumerate() {
        k.column_mut(c).scale_mut(t);
    }
    let m = coupling_m(coupling);
    if m.rem_euclid(2) == 1 {
        k.neg_mut();
    }
    Ok(k)
}

fn coupling_m(c: &Coupling) -> i32 {
    match c {
        Coupling::Scalar(c) => c.m,
        Coupling::Em(c) => c.m,
    }
}

fn check_block_args(cfg: &Configuration, m: i32, omega: f64, l0: usize) -> Result<usize> {
    cfg.validate()?;
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
    }
    let min_index = match cfg.field {
        FieldKind::Scalar => m.unsigned_abs() as usize,
        FieldKind::Em => (m.unsigned_abs() as usize).max(1),
    };
    if l0 < min_index {
        return Err(Error::Domain(format!("truncation l0={l0} below minimum index {min_index}")));
    }
    Ok(min_index)
}

/// Full renormalized block `K^(m)(i omega)` of a two-body configuration.
pub fn assemble_block(cfg: &Configuration, m: i32, omega: f64, l0: usize) -> Result<BlockMatrix> {
    let min_index = check_block_args(cfg, m, omega, l0)?;
    if cfg.mode != Mode::TwoBody {
        return Err(Error::Config("full blocks are defined for two-body configurations".into()));
    }
    let coupling = Coupling::new(cfg.field, m, l0)?;
    let x_sep = cfg.reduced_separation() * omega;
    let t_a = sphere_t_row(&cfg.body_a, l0, omega, cfg.r_ref)?;
    let t_b = sphere_t_row(&cfg.body_b, l0, omega, cfg.r_ref)?;
    let lz_a = sphere_log_scale(&cfg.body_a, l0, omega, cfg.r_ref)?;
    let lz_b = sphere_log_scale(&cfg.body_b, l0, omega, cfg.r_ref)?;
    let entries =
        assemble_full_from_parts(&coupling, cfg.field, l0, x_sep, &t_a, &t_b, &lz_a, &lz_b)?;
    Ok(BlockMatrix {
        m,
        omega,
        l0,
        min_index,
        field_kind: cfg.field,
        kind: BlockKind::FullK,
        entries,
    })
}

/// Square-root block of a symmetric two-body configuration (equal bodies) or
/// of a sphere-mirror configuration; `K~^2` equals the full block of the
/// corresponding symmetric pair. Unequal pairs are rejected.
pub fn assemble_ktilde(cfg: &Configuration, m: i32, omega: f64, l0: usize) -> Result<BlockMatrix> {
    let min_index = check_block_args(cfg, m, omega, l0)?;
    let sphere = match cfg.mode {
        Mode::TwoBody => {
            if cfg.body_a != cfg.body_b {
                return Err(Error::Config(
                    "square-root split needs equal bodies (or a sphere-mirror geometry)".into(),
                ));
            }
            &cfg.body_a
        }
        Mode::SphereMirror => &cfg.body_a,
    };
    let coupling = Coupling::new(cfg.field, m, l0)?;
    let x_sep = cfg.reduced_separation() * omega;
    let t = sphere_t_row(sphere, l0, omega, cfg.r_ref)?;
    let lz = sphere_log_scale(sphere, l0, omega, cfg.r_ref)?;
    let entries = assemble_ktilde_from_parts(&coupling, cfg.field, l0, x_sep, &t, &lz)?;
    Ok(BlockMatrix {
        m,
        omega,
        l0,
        min_index,
        field_kind: cfg.field,
        kind: BlockKind::KTilde,
        entries,
    })
}

/// `ln det(A)` of a square matrix by pivoted LU, accumulating logs of the
/// absolute pivots with sign tracking. Errors on a collapsed pivot or a
/// non-positive determinant, both impossible for valid physical blocks.
pub(crate) fn logdet_lu(mut a: DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    let mut log_sum = 0.0_f64;
    let mut negative = false;
    for k in 0..n {
        let mut p = k;
        let mut max = a[(k, k)].abs();
        for r in (k + 1)..n {
            let v = a[(r, k)].abs();
            if v > max {
                max = v;
                p = r;
            }
        }
        if max < 1e-300 {
            return Err(Error::SingularPivot { pivot: max, step: k });
        }
        if p != k {
            a.swap_rows(p, k);
            negative = !negative;
        }
        let piv = a[(k, k)];
        if piv < 0.0 {
            negative = !negative;
        }
        log_sum += piv.abs().ln();
        for r in (k + 1)..n {
            let f = a[(r, k)] / piv;
            a[(r, k)] = 0.0;
            for c in (k + 1)..n {
                a[(r, c)] -= f * a[(k, c)];
            }
        }
    }
    if negative {
        return Err(Error::NonPositiveDeterminant { parity: -1 });
    }
    Ok(log_sum)
}

/// `ln det(1 - s K)` of a block with `s = +-1`. For full positive-contrast
/// blocks with `s = +1` the result is non-positive.
pub fn logdet_one_minus(block: &BlockMatrix, sign: DetSign) -> Result<f64> {
    let n = block.dim();
    let mut a = match sign {
        DetSign::Plus => -block.entries.clone(),
        DetSign::Minus => block.entries.clone(),
    };
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    logdet_lu(a)
}

/// Eigenvalue diagnostics of a full block. For positive-contrast bodies all
/// eigenvalues must lie in `[0, 1)`; values outside `[-1e-9, 1)` set the
/// violation flag.
#[derive(Debug, Clone, Copy)]
pub struct SpectralReport {
    pub eig_min: f64,
    pub eig_max: f64,
    /// Largest imaginary part among the computed eigenvalues; the block is
    /// similar to a symmetric matrix, so this is numerical noise only.
    pub max_imag: f64,
    pub violation: bool,
}

pub fn spectral_check(block: &BlockMatrix) -> SpectralReport {
    debug_assert_eq!(block.kind, BlockKind::FullK);
    let eigs = block.entries.clone().complex_eigenvalues();
    let mut eig_min = f64::INFINITY;
    let mut eig_max = f64::NEG_INFINITY;
    let mut max_imag = 0.0_f64;
    for e in eigs.iter() {
        eig_min = eig_min.min(e.re);
        eig_max = eig_max.max(e.re);
        max_imag = max_imag.max(e.im.abs());
    }
    let violation = eig_min < -1e-9 || eig_max >= 1.0 || max_imag > 1e-8;
    SpectralReport { eig_min, eig_max, max_imag, violation }
}
