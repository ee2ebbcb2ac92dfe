//! JSON state-space model files.

use aninorm_core::{CtStateSpace, DtStateSpace, Mat};
use serde::{Deserialize, Serialize};

use crate::CliError;

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Rows>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Rows>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Rows>,
    #[serde(rename = "A_T", default, skip_serializing_if = "Option::is_none")]
    pub a_t: Option<Rows>,
    #[serde(rename = "B_T", default, skip_serializing_if = "Option::is_none")]
    pub b_t: Option<Rows>,
    #[serde(rename = "C_T", default, skip_serializing_if = "Option::is_none")]
    pub c_t: Option<Rows>,
    #[serde(rename = "D_T", default, skip_serializing_if = "Option::is_none")]
    pub d_t: Option<Rows>,
}

/// A parsed model in either time domain.
#[derive(Debug, Clone)]
pub enum Model {
    Ct(CtStateSpace),
    Dt(DtStateSpace),
}

pub fn rows_of(m: &Mat) -> Rows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn matrix(name: &str, rows: &Option<Rows>, nr: usize, nc: usize) -> Result<Mat, CliError> {
    let rows = rows.as_ref().ok_or_else(|| CliError::Input(format!("missing field \"{name}\"")))?;
    // An empty list stands for any matrix with a zero dimension.
    if rows.is_empty() && (nr == 0 || nc == 0) {
        return Ok(Mat::zeros(nr, nc));
    }
    if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
        return Err(CliError::Input(format!("\"{name}\" must be {nr}x{nc}")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("\"{name}\" has non-finite entries")));
    }
    Ok(Mat::from_fn(nr, nc, |i, j| rows[i][j]))
}

impl ModelFile {
    pub fn from_ct(sys: &CtStateSpace) -> Self {
        Self {
            n: sys.n(),
            m: sys.m(),
            p: sys.p(),
            a: Some(rows_of(sys.a())),
            b: Some(rows_of(sys.b())),
            c: Some(rows_of(sys.c())),
            d: Some(rows_of(sys.d())),
            a_t: None,
            b_t: None,
            c_t: None,
            d_t: None,
        }
    }

    pub fn from_dt(sys: &DtStateSpace) -> Self {
        Self {
            n: sys.n(),
            m: sys.m(),
            p: sys.p(),
            a: None,
            b: None,
            c: None,
            d: None,
            a_t: Some(rows_of(sys.a())),
            b_t: Some(rows_of(sys.b())),
            c_t: Some(rows_of(sys.c())),
            d_t: Some(rows_of(sys.d())),
        }
    }

    pub fn parse(text: &str) -> Result<Model, CliError> {
        let f: ModelFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("model file: {e}")))?;
        f.into_model()
    }

    pub fn into_model(self) -> Result<Model, CliError> {
        let (n, m, p) = (self.n, self.m, self.p);
        let has_ct = self.a.is_some() || self.b.is_some() || self.c.is_some() || self.d.is_some();
        let has_dt = self.a_t.is_some() || self.b_t.is_some() || self.c_t.is_some() || self.d_t.is_some();
        match (has_ct, has_dt) {
            (true, false) => Ok(Model::Ct(CtStateSpace::new(
                matrix("A", &self.a, n, n)?,
                matrix("B", &self.b, n, m)?,
                matrix("C", &self.c, p, n)?,
                matrix("D", &self.d, p, m)?,
            )?)),
            (false, true) => Ok(Model::Dt(DtStateSpace::new(
                matrix("A_T", &self.a_t, n, n)?,
                matrix("B_T", &self.b_t, n, m)?,
                matrix("C_T", &self.c_t, p, n)?,
                matrix("D_T", &self.d_t, p, m)?,
            )?)),
            (true, true) => Err(CliError::Input("model mixes continuous and discrete fields".into())),
            (false, false) => Err(CliError::Input("model has no matrices".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip() {
        let text = r#"{"n":1,"m":1,"p":1,"A":[[-1]],"B":[[1]],"C":[[1]],"D":[[0]]}"#;
        let Model::Ct(sys) = ModelFile::parse(text).unwrap() else { panic!("expected continuous") };
        assert_eq!(sys.a()[(0, 0)], -1.0);
        let again = serde_json::to_string(&ModelFile::from_ct(&sys)).unwrap();
        let Model::Ct(back) = ModelFile::parse(&again).unwrap() else { panic!() };
        assert_eq!(back, sys);
    }

    #[test]
    fn shape_errors() {
        let bad = r#"{"n":2,"m":1,"p":1,"A":[[-1]],"B":[[1]],"C":[[1]],"D":[[0]]}"#;
        assert!(matches!(ModelFile::parse(bad), Err(CliError::Input(_))));
        let mixed = r#"{"n":1,"m":1,"p":1,"A":[[-1]],"B":[[1]],"C":[[1]],"D":[[0]],"A_T":[[0]]}"#;
        assert!(ModelFile::parse(mixed).is_err());
    }

    #[test]
    fn static_model() {
        let text = r#"{"n":0,"m":2,"p":1,"A":[],"B":[],"C":[[]],"D":[[1,2]]}"#;
        let Model::Ct(sys) = ModelFile::parse(text).unwrap() else { panic!() };
        assert_eq!((sys.n(), sys.m(), sys.p()), (0, 2, 1));
    }
}
