//! File formats: grid and spectrum JSON, rate-experiment CSV, and the
//! JSON sidecars. All writes go through a temp-and-rename so a crashed
//! run never leaves a half-written file, and every float is serialized
//! in decimal with 17 significant digits, enough to round-trip an IEEE
//! double exactly.

use crate::anisotropy::BesovNorm;
use crate::error::{Error, Result};
use crate::experiments::RateReport;
use crate::lattice::{AxisSpec, GridFunction};
use crate::spectral::SpectrumFunction;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

/// 17 significant digits: one before the point, sixteen after.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// serde_json formatter that writes every float with [`fmt_f64`].
struct Digits17 {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::begin_array(&mut self.inner, writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::end_array(&mut self.inner, writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::begin_array_value(&mut self.inner, writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::end_array_value(&mut self.inner, writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::begin_object(&mut self.inner, writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::end_object(&mut self.inner, writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::begin_object_key(&mut self.inner, writer, first)
    }

    fn end_object_key<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::end_object_key(&mut self.inner, writer)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::begin_object_value(&mut self.inner, writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        serde_json::ser::Formatter::end_object_value(&mut self.inner, writer)
    }
}

fn to_json17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let fmt = Digits17 {
        inner: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// Write `bytes` to `path` atomically: a sibling temp file is written,
/// flushed, and renamed over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path.file_name().ok_or_else(|| {
        Error::Parameter(format!("output path {} has no file name", path.display()))
    })?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp.{}", std::process::id()));
    let tmp = match dir {
        Some(d) => d.join(&tmp_name),
        None => tmp_name.clone().into(),
    };
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        Ok(())
    };
    if let Err(e) = write() {
        let _ = std::fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct AxisDoc {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_lambda: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    domain: Option<String>,
    axes: Vec<AxisDoc>,
    layout: String,
    values: Vec<[f64; 2]>,
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_digest: Option<String>,
}

fn axes_from_docs(docs: &[AxisDoc], path: &str, frequency: bool) -> Result<Vec<AxisSpec>> {
    let mut axes = Vec::with_capacity(docs.len());
    for (j, doc) in docs.iter().enumerate() {
        let ax = AxisSpec::new(doc.l, doc.n)?;
        if frequency {
            match doc.delta_lambda {
                None => {
                    return Err(Error::Format {
                        path: path.into(),
                        detail: format!("axis {j} of a spectrum file is missing delta_lambda"),
                    })
                }
                Some(dl) => {
                    let want = ax.delta_lambda();
                    if (dl - want).abs() > 1e-12 * want {
                        return Err(Error::Format {
                            path: path.into(),
                            detail: format!(
                                "axis {j}: delta_lambda {dl} inconsistent with pi/L = {want}"
                            ),
                        });
                    }
                }
            }
        }
        axes.push(ax);
    }
    Ok(axes)
}

fn complex_values(doc: &FieldDoc) -> Vec<Complex64> {
    doc.values
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect()
}

/// Grid file: `{"axes":[{"L":..,"N":..}..],"layout":"row-major",
/// "values":[[re,im]..],"label":..}` plus an optional config digest.
pub fn grid_to_json(f: &GridFunction, config_digest: Option<&str>) -> String {
    let doc = FieldDoc {
        domain: None,
        axes: f
            .axes()
            .iter()
            .map(|ax| AxisDoc {
                l: ax.half_width(),
                n: ax.points(),
                delta_lambda: None,
            })
            .collect(),
        layout: "row-major".into(),
        values: f.values().iter().map(|c| [c.re, c.im]).collect(),
        label: f.label().to_string(),
        config_digest: config_digest.map(str::to_string),
    };
    to_json17(&doc)
}

/// Spectrum file: the grid document with `"domain":"frequency"` and a
/// per-axis `delta_lambda`.
pub fn spectrum_to_json(s: &SpectrumFunction, config_digest: Option<&str>) -> String {
    let doc = FieldDoc {
        domain: Some("frequency".into()),
        axes: s
            .axes()
            .iter()
            .map(|ax| AxisDoc {
                l: ax.half_width(),
                n: ax.points(),
                delta_lambda: Some(ax.delta_lambda()),
            })
            .collect(),
        layout: "row-major".into(),
        values: s.coeffs().iter().map(|c| [c.re, c.im]).collect(),
        label: s.label().to_string(),
        config_digest: config_digest.map(str::to_string),
    };
    to_json17(&doc)
}

fn parse_field(text: &str, path: &str) -> Result<FieldDoc> {
    let doc: FieldDoc = serde_json::from_str(text).map_err(|e| Error::Format {
        path: path.into(),
        detail: e.to_string(),
    })?;
    if doc.layout != "row-major" {
        return Err(Error::Format {
            path: path.into(),
            detail: format!("unsupported layout {:?}", doc.layout),
        });
    }
    Ok(doc)
}

pub fn grid_from_json(text: &str, path: &str) -> Result<GridFunction> {
    let doc = parse_field(text, path)?;
    if let Some(d) = &doc.domain {
        if d == "frequency" {
            return Err(Error::Format {
                path: path.into(),
                detail: "file holds a spectrum, not a grid".into(),
            });
        }
    }
    let axes = axes_from_docs(&doc.axes, path, false)?;
    GridFunction::from_values(axes, complex_values(&doc), doc.label.clone())
}

pub fn spectrum_from_json(text: &str, path: &str) -> Result<SpectrumFunction> {
    let doc = parse_field(text, path)?;
    if doc.domain.as_deref() != Some("frequency") {
        return Err(Error::Format {
            path: path.into(),
            detail: "file lacks \"domain\":\"frequency\"".into(),
        });
    }
    let axes = axes_from_docs(&doc.axes, path, true)?;
    SpectrumFunction::from_coeffs(axes, complex_values(&doc), doc.label.clone())
}

pub fn load_grid(path: &Path) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    grid_from_json(&text, &path.display().to_string())
}

pub fn save_grid(path: &Path, f: &GridFunction, config_digest: Option<&str>) -> Result<()> {
    write_atomic(path, grid_to_json(f, config_digest).as_bytes())
}

pub fn load_spectrum(path: &Path) -> Result<SpectrumFunction> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    spectrum_from_json(&text, &path.display().to_string())
}

pub fn save_spectrum(path: &Path, s: &SpectrumFunction, config_digest: Option<&str>) -> Result<()> {
    write_atomic(path, spectrum_to_json(s, config_digest).as_bytes())
}

/// Plot-ready CSV for a rate experiment. The digest rides in a leading
/// `#` comment so the numeric block stays clean; `predicted_log2` is
/// the theory's slope line anchored at the fitted intercept, so the
/// residuals against column 3 show the deviation from the predicted
/// order.
pub fn rate_to_csv(report: &RateReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# config_digest={}\n", report.config_digest));
    out.push_str("n,error,log2_error,predicted_log2\n");
    for e in &report.entries {
        let predicted = report.fitted_intercept + report.predicted_slope * e.n as f64;
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.n,
            fmt_f64(e.error),
            fmt_f64(e.error.log2()),
            fmt_f64(predicted)
        ));
    }
    out
}

#[derive(Serialize)]
struct RateEntryDoc {
    n: usize,
    error: f64,
}

#[derive(Serialize)]
struct RateReportDoc<'a> {
    r: &'a [f64],
    p: f64,
    theta: String,
    entries: Vec<RateEntryDoc>,
    excluded: &'a [usize],
    fitted_slope: f64,
    fitted_intercept: f64,
    predicted_slope: f64,
    residual_rms: f64,
    config_digest: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

/// JSON sidecar with the full report. The timestamp (seconds since the
/// Unix epoch) is the one field excluded from the config digest.
pub fn rate_to_json(report: &RateReport, timestamp: Option<u64>) -> String {
    let doc = RateReportDoc {
        r: report.sv.r(),
        p: report.p,
        theta: report.theta.to_string(),
        entries: report
            .entries
            .iter()
            .map(|e| RateEntryDoc {
                n: e.n,
                error: e.error,
            })
            .collect(),
        excluded: &report.excluded,
        fitted_slope: report.fitted_slope,
        fitted_intercept: report.fitted_intercept,
        predicted_slope: report.predicted_slope,
        residual_rms: report.residual_rms,
        config_digest: &report.config_digest,
        timestamp,
    };
    to_json17(&doc)
}

#[derive(Serialize)]
struct LayerTermDoc {
    s: usize,
    lp: f64,
    weighted: f64,
}

#[derive(Serialize)]
struct BesovNormDoc<'a> {
    norm: f64,
    terms: Vec<LayerTermDoc>,
    truncation_warning: bool,
    config_digest: &'a str,
}

pub fn besov_norm_to_json(norm: &BesovNorm, config_digest: &str) -> String {
    let doc = BesovNormDoc {
        norm: norm.value,
        terms: norm
            .terms
            .iter()
            .map(|t| LayerTermDoc {
                s: t.s,
                lp: t.lp,
                weighted: t.weighted,
            })
            .collect(),
        truncation_warning: norm.truncation_warning,
        config_digest,
    };
    to_json17(&doc)
}
