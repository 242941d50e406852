//! JSON interchange for frames, with a canonical byte-stable encoding.
//!
//! Canonical form: object keys sorted, no whitespace, every float written
//! with 17 significant digits in exponent notation. Parsing canonical bytes
//! and writing them again reproduces the input exactly.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::frame::{FrameElement, GFusionFrame};
use crate::hilbert::{IndexConvention, ModuleOperator, Submodule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDocument {
    pub projection: ModuleOperator,
    pub operator: ModuleOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    pub d: usize,
    pub n: usize,
    pub index_convention: IndexConvention,
    pub elements: Vec<ElementDocument>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl FrameDocument {
    pub fn from_frame(frame: &GFusionFrame, metadata: BTreeMap<String, String>) -> Self {
        let elements = frame
            .elements()
            .iter()
            .map(|e| ElementDocument {
                projection: e.submodule.projection().clone(),
                operator: e.operator.clone(),
            })
            .collect();
        Self {
            d: frame.d(),
            n: frame.n(),
            index_convention: frame.convention(),
            elements,
            metadata,
        }
    }

    /// Validates shapes, projections and range containment.
    pub fn to_frame(&self) -> Result<GFusionFrame> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidDimensions(format!(
                "n = {}, d = {}",
                self.n, self.d
            )));
        }
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(xi, e)| {
                for op in [&e.projection, &e.operator] {
                    if (op.n(), op.d()) != (self.n, self.d) {
                        return Err(Error::DimensionMismatch(format!(
                            "element {xi}: operator over (n={}, d={}), document declares (n={}, d={})",
                            op.n(),
                            op.d(),
                            self.n,
                            self.d
                        )));
                    }
                }
                Ok(FrameElement { submodule: Submodule::from_projection(e.projection.clone())?, operator: e.operator.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        GFusionFrame::new(elements, self.index_convention)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_canonical_json(&self) -> String {
        to_canonical_json(self).expect("frame documents always serialise")
    }
}

/// Float formatting with 17 significant digits.
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Canonical JSON for any serialisable value.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // Routing through `Value` sorts object keys.
    let tree = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    tree.serialize(&mut ser)
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}
