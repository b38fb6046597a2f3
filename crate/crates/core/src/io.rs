//! JSON interchange: `{ "radices": [..], "depth": N, "values": [[re, im], …] }`.
//!
//! The same layout carries step functions (cell values) and spectral vectors
//! (coefficients).

use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::RadixSystem;
use crate::spectral::{SpectralVector, StepFunction};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValuesFile {
    pub radices: Vec<u32>,
    pub depth: usize,
    pub values: Vec<[f64; 2]>,
}

impl ValuesFile {
    fn from_parts<T: Scalar>(sys: &RadixSystem, values: &[Complex<T>]) -> Self {
        Self {
            radices: sys.radices().to_vec(),
            depth: sys.depth(),
            values: values
                .iter()
                .map(|v| [v.re.to_f64_lossy(), v.im.to_f64_lossy()])
                .collect(),
        }
    }

    fn into_parts<T: Scalar>(self) -> Result<(RadixSystem, Vec<Complex<T>>)> {
        if self.radices.len() != self.depth {
            return Err(Error::InvalidArgument(format!(
                "depth {} does not match {} radices",
                self.depth,
                self.radices.len()
            )));
        }
        let sys = RadixSystem::new(&self.radices)?;
        let values = self
            .values
            .into_iter()
            .map(|[re, im]| Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im)))
            .collect();
        Ok((sys, values))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn read(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn write(&self, mut writer: impl Write) -> std::io::Result<()> {
        writer.write_all(self.to_json().as_bytes())?;
        writer.write_all(b"\n")
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl<T: Scalar> StepFunction<T> {
    pub fn to_file(&self) -> ValuesFile {
        ValuesFile::from_parts(self.sys(), self.values())
    }

    pub fn from_file(file: ValuesFile) -> Result<Self> {
        let (sys, values) = file.into_parts()?;
        Self::new(sys, values)
    }

    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(ValuesFile::from_json(text)?)
    }
}

impl<T: Scalar> SpectralVector<T> {
    pub fn to_file(&self) -> ValuesFile {
        ValuesFile::from_parts(self.sys(), self.coeffs())
    }

    pub fn from_file(file: ValuesFile) -> Result<Self> {
        let (sys, values) = file.into_parts()?;
        Self::new(sys, values)
    }

    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(ValuesFile::from_json(text)?)
    }
}
