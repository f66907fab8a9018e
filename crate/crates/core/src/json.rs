//! JSON encodings: complex scalars as `[re, im]`, matrices as row-major
//! nested arrays, tuples as arrays of matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::CMatrix;
use crate::pencil::Pencil;
use crate::series::{FreeMap, FreeSeries};
use crate::tuple::MatrixTuple;
use crate::word::Word;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;
pub type TupleJson = Vec<MatrixJson>;

pub fn complex_to_json(z: Complex64) -> ComplexJson {
    [z.re, z.im]
}

pub fn complex_from_json(v: &ComplexJson) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| complex_to_json(m[(r, c)])).collect())
        .collect()
}

pub fn matrix_from_json(v: &MatrixJson) -> Result<CMatrix, Error> {
    let rows = v.len();
    if rows == 0 {
        return Err(Error::Json("empty matrix".into()));
    }
    let cols = v[0].len();
    if cols == 0 || v.iter().any(|r| r.len() != cols) {
        return Err(Error::Json("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| {
        complex_from_json(&v[r][c])
    }))
}

pub fn tuple_to_json(x: &MatrixTuple) -> TupleJson {
    x.entries().iter().map(matrix_to_json).collect()
}

pub fn tuple_from_json(v: &TupleJson) -> Result<MatrixTuple, Error> {
    MatrixTuple::new(
        v.iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>, _>>()?,
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilJson {
    pub g: usize,
    pub d: usize,
    #[serde(rename = "A")]
    pub a: TupleJson,
}

impl PencilJson {
    pub fn from_pencil(p: &Pencil) -> Self {
        PencilJson {
            g: p.g(),
            d: p.d(),
            a: tuple_to_json(p.coefficients()),
        }
    }

    pub fn to_pencil(&self) -> Result<Pencil, Error> {
        let a = tuple_from_json(&self.a)?;
        if a.g() != self.g || a.level() != self.d {
            return Err(Error::Json("pencil g/d fields disagree with A".into()));
        }
        Ok(Pencil::new(a))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XiJson {
    pub g: usize,
    #[serde(rename = "Xi")]
    pub xi: TupleJson,
}

impl XiJson {
    pub fn to_tuple(&self) -> Result<MatrixTuple, Error> {
        let xi = tuple_from_json(&self.xi)?;
        if xi.g() != self.g {
            return Err(Error::Json("Xi g field disagrees with entries".into()));
        }
        Ok(xi)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTermJson {
    pub word: Vec<u8>,
    pub coeff: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub g: usize,
    pub rows: usize,
    pub cols: usize,
    pub max_degree: usize,
    pub terms: Vec<SeriesTermJson>,
}

impl SeriesJson {
    pub fn from_series(s: &FreeSeries) -> Self {
        SeriesJson {
            g: s.g(),
            rows: s.rows(),
            cols: s.cols(),
            max_degree: s.max_degree(),
            terms: s
                .terms()
                .map(|(w, c)| SeriesTermJson {
                    word: w.letters().to_vec(),
                    coeff: matrix_to_json(c),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<FreeSeries, Error> {
        let mut s = FreeSeries::zero(self.g, self.rows, self.cols, self.max_degree);
        for t in &self.terms {
            let w = Word::from_letters(&t.word);
            if !w.fits(self.g) {
                return Err(Error::Json(format!("word {:?} out of range", t.word)));
            }
            let c = matrix_from_json(&t.coeff)?;
            if c.nrows() != self.rows || c.ncols() != self.cols {
                return Err(Error::Json("coefficient shape mismatch".into()));
            }
            s.add_to_coeff(&w, &c);
        }
        Ok(s)
    }
}

pub fn map_to_json(m: &FreeMap) -> Vec<SeriesJson> {
    m.components().iter().map(SeriesJson::from_series).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "A")]
    pub a: PencilJson,
    #[serde(rename = "C")]
    pub c: MatrixJson,
    #[serde(rename = "W0")]
    pub w0: Option<MatrixJson>,
}
