//! JSON schemas of the on-disk formats.
//!
//! The matrix format is used repo-wide: `{"dim": n, "re": [[...]], "im":
//! [[...]]}`, row-major, with `im` absent for real matrices. Non-square
//! matrices (isometries) carry `rows`/`cols` instead of `dim`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::NonlocalGame;
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::magic::{Povm, QuantumMagicSquare};
use crate::sdp::{SdpConstraint, SdpProblem};
use crate::tensornet::{Mpdo, TiTensor};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn of_complex(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.at(i, j).re).collect())
            .collect();
        let has_im = m.data().iter().any(|z| z.im != 0.0);
        let im = has_im.then(|| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.at(i, j).im).collect())
                .collect()
        });
        if m.is_square() {
            Self { dim: Some(m.rows()), rows: None, cols: None, re, im }
        } else {
            Self { dim: None, rows: Some(m.rows()), cols: Some(m.cols()), re, im }
        }
    }

    pub fn of_hermitian(h: &HermitianMatrix) -> Self {
        Self::of_complex(h.as_matrix())
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        let rows = self
            .dim
            .or(self.rows)
            .ok_or_else(|| Error::InvalidInput("matrix needs dim or rows".into()))?;
        let cols = self.dim.or(self.cols).unwrap_or(rows);
        if self.re.len() != rows || self.re.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("re grid does not match the dimensions".into()));
        }
        if let Some(im) = &self.im {
            if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                return Err(Error::InvalidInput("im grid does not match the dimensions".into()));
            }
        }
        let m = ComplexMatrix::from_fn(rows, cols, |i, j| {
            C64::new(self.re[i][j], self.im.as_ref().map(|im| im[i][j]).unwrap_or(0.0))
        });
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(m)
    }

    /// Hermitian-typed parse: rejects asymmetry beyond the construction
    /// tolerance.
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_complex()?)
    }
}

/// A list of effects: POVM files and joint-measurability inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectsJson {
    pub effects: Vec<MatrixJson>,
}

impl EffectsJson {
    pub fn of_povm(p: &Povm) -> Self {
        Self { effects: p.effects.iter().map(MatrixJson::of_hermitian).collect() }
    }

    pub fn to_hermitian_list(&self) -> Result<Vec<HermitianMatrix>> {
        self.effects.iter().map(|m| m.to_hermitian()).collect()
    }

    pub fn to_povm(&self, tol: f64) -> Result<Povm> {
        Povm::new(self.to_hermitian_list()?, tol)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagicSquareJson {
    pub d: usize,
    pub s: usize,
    pub entries: Vec<Vec<MatrixJson>>,
}

impl MagicSquareJson {
    pub fn of_square(sq: &QuantumMagicSquare) -> Self {
        Self {
            d: sq.side(),
            s: sq.level(),
            entries: sq
                .entries
                .iter()
                .map(|row| row.iter().map(MatrixJson::of_hermitian).collect())
                .collect(),
        }
    }

    pub fn to_square(&self) -> Result<QuantumMagicSquare> {
        if self.entries.len() != self.d {
            return Err(Error::InvalidInput("entry rows do not match d".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|m| m.to_hermitian()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let sq = QuantumMagicSquare::new(entries)?;
        if sq.level() != self.s {
            return Err(Error::InvalidInput("entry size does not match s".into()));
        }
        Ok(sq)
    }
}

/// Game file: `{"qa":2,"qb":2,"aa":2,"ab":2,"pi":[[...]],"w":[[[[...]]]]}`
/// with `w[a][b][x][y]`; `pi` defaults to uniform when omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameJson {
    pub qa: usize,
    pub qb: usize,
    pub aa: usize,
    pub ab: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<Vec<f64>>>,
    pub w: Vec<Vec<Vec<Vec<u8>>>>,
}

impl GameJson {
    pub fn to_game(&self) -> Result<NonlocalGame> {
        let mut winning = Vec::with_capacity(self.qa * self.qb * self.aa * self.ab);
        if self.w.len() != self.qa {
            return Err(Error::InvalidInput("w table first axis must be qa".into()));
        }
        for wa in &self.w {
            if wa.len() != self.qb {
                return Err(Error::InvalidInput("w table second axis must be qb".into()));
            }
            for wb in wa {
                if wb.len() != self.aa {
                    return Err(Error::InvalidInput("w table third axis must be aa".into()));
                }
                for wx in wb {
                    if wx.len() != self.ab {
                        return Err(Error::InvalidInput("w table fourth axis must be ab".into()));
                    }
                    winning.extend_from_slice(wx);
                }
            }
        }
        let pi = match &self.pi {
            None => None,
            Some(rows) => {
                if rows.len() != self.qa || rows.iter().any(|r| r.len() != self.qb) {
                    return Err(Error::InvalidInput("pi must be a qa x qb grid".into()));
                }
                Some(rows.iter().flatten().copied().collect())
            }
        };
        NonlocalGame::new(self.qa, self.qb, self.aa, self.ab, winning, pi)
    }

    pub fn of_game(g: &NonlocalGame) -> Self {
        let w = (0..g.questions_a)
            .map(|a| {
                (0..g.questions_b)
                    .map(|b| {
                        (0..g.answers_a)
                            .map(|x| {
                                (0..g.answers_b)
                                    .map(|y| g.wins(a, b, x, y) as u8)
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let pi = (0..g.questions_a)
            .map(|a| (0..g.questions_b).map(|b| g.pi(a, b)).collect())
            .collect();
        Self {
            qa: g.questions_a,
            qb: g.questions_b,
            aa: g.answers_a,
            ab: g.answers_b,
            pi: Some(pi),
            w,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdpConstraintJson {
    pub coeffs: Vec<MatrixJson>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdpProblemJson {
    pub block_dims: Vec<usize>,
    pub objective: Vec<MatrixJson>,
    pub constraints: Vec<SdpConstraintJson>,
}

impl SdpProblemJson {
    pub fn to_problem(&self) -> Result<SdpProblem> {
        let objective = self
            .objective
            .iter()
            .map(|m| m.to_hermitian())
            .collect::<Result<Vec<_>>>()?;
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                Ok(SdpConstraint {
                    coeffs: c.coeffs.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?,
                    rhs: c.rhs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let p = SdpProblem { block_dims: self.block_dims.clone(), objective, constraints };
        p.validate()?;
        Ok(p)
    }
}

/// MPDO file: `{"n":…, "r":…, "d":[…], "tensors":[site][i][i'] -> matrix}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MpdoJson {
    pub n: usize,
    pub r: usize,
    pub d: Vec<usize>,
    pub tensors: Vec<Vec<Vec<MatrixJson>>>,
}

impl MpdoJson {
    pub fn to_mpdo(&self) -> Result<Mpdo> {
        if self.tensors.len() != self.n || self.d.len() != self.n {
            return Err(Error::InvalidInput("site counts disagree".into()));
        }
        let mut tensors = Vec::with_capacity(self.n);
        for site in &self.tensors {
            if site.len() != self.r || site.iter().any(|row| row.len() != self.r) {
                return Err(Error::InvalidInput("tensor block grid must be r x r".into()));
            }
            let mut flat = Vec::with_capacity(self.r * self.r);
            for row in site {
                for m in row {
                    flat.push(m.to_complex()?);
                }
            }
            tensors.push(flat);
        }
        Mpdo::new(self.r, self.d.clone(), tensors)
    }

    pub fn of_mpdo(m: &Mpdo) -> Self {
        Self {
            n: m.site_count,
            r: m.bond_dim,
            d: m.phys_dims.clone(),
            tensors: (0..m.site_count)
                .map(|site| {
                    (0..m.bond_dim)
                        .map(|i| {
                            (0..m.bond_dim)
                                .map(|j| MatrixJson::of_complex(m.block(site, i, j)))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Translation-invariant tensor file: `{"r":…, "d":…, "blocks":[a][b]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TiTensorJson {
    pub r: usize,
    pub d: usize,
    pub blocks: Vec<Vec<MatrixJson>>,
}

impl TiTensorJson {
    pub fn to_tensor(&self) -> Result<TiTensor> {
        if self.blocks.len() != self.r || self.blocks.iter().any(|row| row.len() != self.r) {
            return Err(Error::InvalidInput("block grid must be r x r".into()));
        }
        let mut flat = Vec::with_capacity(self.r * self.r);
        for row in &self.blocks {
            for m in row {
                flat.push(m.to_complex()?);
            }
        }
        TiTensor::new(self.r, self.d, flat)
    }

    pub fn of_tensor(t: &TiTensor) -> Self {
        Self {
            r: t.bond_dim,
            d: t.phys_dim,
            blocks: (0..t.bond_dim)
                .map(|a| {
                    (0..t.bond_dim)
                        .map(|b| MatrixJson::of_complex(t.block(a, b)))
                        .collect()
                })
                .collect(),
        }
    }
}
