//! Radiometric frame formats.
//!
//! * Plain CSV: one image row per line, comma-separated decimal °C.
//! * Binary PGM (`P5`, 16-bit big-endian when maxval > 255) with a sidecar
//!   `<stem>.cal` text file `scale=<float> offset=<float>`; the temperature of
//!   a raw count is `raw * scale + offset`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::imgproc::Grid;
use crate::model::{ThermalFrame, View, TEMP_MAX_C, TEMP_MIN_C};

/// Linear raw-count to °C calibration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub scale: f64,
    pub offset: f64,
}

impl Default for Calibration {
    /// 1 mK per count from 15 °C, covering 15–80.5 °C.
    fn default() -> Self {
        Calibration {
            scale: 0.001,
            offset: 15.0,
        }
    }
}

impl Calibration {
    pub fn to_celsius(&self, raw: u16) -> f64 {
        raw as f64 * self.scale + self.offset
    }

    /// Nearest raw count, nudged by one step when rounding would carry an
    /// in-range temperature outside [15, 45] °C on decoding.
    pub fn to_raw(&self, celsius: f64) -> u16 {
        let raw = ((celsius - self.offset) / self.scale).round().clamp(0.0, u16::MAX as f64) as u16;
        let t = self.to_celsius(raw);
        if t > TEMP_MAX_C && celsius <= TEMP_MAX_C && raw > 0 {
            raw - 1
        } else if t < TEMP_MIN_C && celsius >= TEMP_MIN_C && raw < u16::MAX {
            raw + 1
        } else {
            raw
        }
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut scale = None;
        let mut offset = None;
        for token in text.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::parse(path, format!("expected key=value, got `{token}`")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| Error::parse(path, format!("bad number `{value}` for `{key}`")))?;
            match key {
                "scale" => scale = Some(v),
                "offset" => offset = Some(v),
                _ => return Err(Error::parse(path, format!("unknown calibration key `{key}`"))),
            }
        }
        match (scale, offset) {
            (Some(scale), Some(offset)) if scale.is_finite() && scale > 0.0 && offset.is_finite() => {
                Ok(Calibration { scale, offset })
            }
            _ => Err(Error::parse(path, "calibration needs finite scale > 0 and offset")),
        }
    }

    pub fn render(&self) -> String {
        format!("scale={} offset={}\n", self.scale, self.offset)
    }
}

/// Sidecar calibration path for a PGM file.
pub fn calibration_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("cal")
}

/// Loads a frame, choosing the format by extension. A reference without an
/// extension is tried as `<ref>.pgm`, then `<ref>.csv`.
pub fn load_thermal_frame(path: &Path) -> Result<ThermalFrame> {
    let resolved = resolve_frame_path(path);
    match resolved.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => {
            let text = fs::read_to_string(&resolved).map_err(|e| Error::io(&resolved, e))?;
            parse_csv_frame(&text, &resolved)
        }
        _ => {
            let bytes = fs::read(&resolved).map_err(|e| Error::io(&resolved, e))?;
            let cal_path = calibration_path(&resolved);
            let cal_text = fs::read_to_string(&cal_path).map_err(|e| Error::io(&cal_path, e))?;
            let cal = Calibration::parse(&cal_text, &cal_path)?;
            decode_pgm(&bytes, cal, &resolved)
        }
    }
}

fn resolve_frame_path(path: &Path) -> PathBuf {
    if path.extension().is_some() || path.is_file() {
        return path.to_path_buf();
    }
    for ext in ["pgm", "csv"] {
        let candidate = path.with_extension(ext);
        if candidate.is_file() {
            return candidate;
        }
    }
    path.to_path_buf()
}

pub fn parse_csv_frame(text: &str, path: &Path) -> Result<ThermalFrame> {
    let mut width = None;
    let mut data = Vec::new();
    let mut height = 0;
    for (row, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut n = 0;
        for token in line.split(',') {
            let token = token.trim();
            let v: f64 = token
                .parse()
                .map_err(|_| Error::parse(path, format!("row {}: bad number `{token}`", row + 1)))?;
            data.push(v);
            n += 1;
        }
        match width {
            None => width = Some(n),
            Some(w) if w != n => {
                return Err(Error::DimensionMismatch(format!(
                    "{}: row {} has {n} values, expected {w}",
                    path.display(),
                    row + 1
                )))
            }
            _ => {}
        }
        height += 1;
    }
    let width = width.ok_or_else(|| Error::DimensionMismatch(format!("{}: empty frame", path.display())))?;
    let grid = Grid::from_vec(width, height, data).expect("row lengths checked");
    ThermalFrame::new(grid, View::Frontal)
}

/// Splits the next whitespace-delimited header token, skipping `#` comments.
fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

pub fn decode_pgm(bytes: &[u8], cal: Calibration, path: &Path) -> Result<ThermalFrame> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::BadMagic { path: path.to_path_buf() });
    }
    let mut pos = 2;
    let mut number = |what: &str| -> Result<usize> {
        let tok = header_token(bytes, &mut pos)
            .ok_or_else(|| Error::parse(path, format!("truncated header before {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(path, format!("bad {what} in header")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::DimensionMismatch(format!("{}: zero-sized image", path.display())));
    }
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(Error::parse(path, format!("maxval {maxval} out of range")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
    let expected = width * height * bytes_per_sample;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{}: header says {width}x{height} ({expected} bytes) but raster has {} bytes",
            path.display(),
            raster.len()
        )));
    }
    let data: Vec<f64> = if bytes_per_sample == 2 {
        raster
            .chunks_exact(2)
            .map(|c| cal.to_celsius(u16::from_be_bytes([c[0], c[1]])))
            .collect()
    } else {
        raster.iter().map(|&b| cal.to_celsius(b as u16)).collect()
    };
    let grid = Grid::from_vec(width, height, data).expect("length checked");
    ThermalFrame::new(grid, View::Frontal)
}

pub fn encode_pgm(frame: &ThermalFrame, cal: Calibration) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", frame.width(), frame.height()).into_bytes();
    out.reserve(frame.width() * frame.height() * 2);
    for &t in frame.temps().as_slice() {
        out.extend_from_slice(&cal.to_raw(t).to_be_bytes());
    }
    out
}

pub fn render_csv_frame(frame: &ThermalFrame) -> String {
    let mut out = String::new();
    for row in frame.temps().as_slice().chunks(frame.width()) {
        let cells: Vec<String> = row.iter().map(|t| t.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes a frame in the format implied by the extension (`.csv` or `.pgm`
/// plus its `.cal` sidecar).
pub fn write_thermal_frame(path: &Path, frame: &ThermalFrame, cal: Calibration) -> Result<()> {
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return fs::write(path, render_csv_frame(frame)).map_err(|e| Error::io(path, e));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_pgm(frame, cal)).map_err(|e| Error::io(path, e))?;
    let cal_path = calibration_path(path);
    fs::write(&cal_path, cal.render()).map_err(|e| Error::io(&cal_path, e))
}

/// Writes a binary mask or label map as an 8-bit PGM (debug export).
pub fn write_label_pgm(path: &Path, labels: &Grid<u32>) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", labels.width(), labels.height()).into_bytes();
    out.extend(labels.as_slice().iter().map(|&l| l.min(255) as u8));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("test")
    }

    #[test]
    fn constant_csv() {
        let text = "32.0,32.0,32.0,32.0\n".repeat(4);
        let f = parse_csv_frame(&text, p()).unwrap();
        assert_eq!((f.width(), f.height()), (4, 4));
        assert_eq!(f.min_max(), (32.0, 32.0));
    }

    #[test]
    fn csv_nan_is_rejected() {
        let err = parse_csv_frame("32.0,NaN\n31.0,30.0\n", p()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteTemperature { x: 1, y: 0 }), "{err}");
    }

    #[test]
    fn csv_ragged_rows() {
        assert!(matches!(
            parse_csv_frame("32,32\n32\n", p()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pgm_calibration_arithmetic() {
        let mut bytes = b"P5\n1 1\n65535\n".to_vec();
        bytes.extend_from_slice(&20000u16.to_be_bytes());
        let cal = Calibration {
            scale: 0.001,
            offset: 15.0,
        };
        let f = decode_pgm(&bytes, cal, p()).unwrap();
        assert!((f.at(0, 0) - 35.0).abs() < 1e-12);
    }

    #[test]
    fn pgm_header_comments_and_errors() {
        let mut bytes = b"P5\n# camera X\n2 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0x4e, 0x20, 0x4e, 0x20]);
        assert_eq!(decode_pgm(&bytes, Calibration::default(), p()).unwrap().width(), 2);

        assert!(matches!(
            decode_pgm(b"P2\n1 1\n255\n1", Calibration::default(), p()),
            Err(Error::BadMagic { .. })
        ));
        let mut short = b"P5\n2 2\n65535\n".to_vec();
        short.extend_from_slice(&[0, 1, 0, 1]);
        assert!(matches!(
            decode_pgm(&short, Calibration::default(), p()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn range_limits_survive_quantisation() {
        let cal = Calibration { scale: 0.007, offset: 15.0 };
        let frame = ThermalFrame::new(Grid::from_fn(2, 1, |x, _| if x == 0 { 15.0 } else { 45.0 }), View::Frontal).unwrap();
        let back = decode_pgm(&encode_pgm(&frame, cal), cal, p()).unwrap();
        assert!((back.at(1, 0) - 45.0).abs() <= 0.007);
        assert!((back.at(0, 0) - 15.0).abs() <= 0.007);
    }

    #[test]
    fn calibration_sidecar_parsing() {
        let c = Calibration::parse("scale=0.01 offset=20.5\n", p()).unwrap();
        assert_eq!(c, Calibration { scale: 0.01, offset: 20.5 });
        assert!(Calibration::parse("scale=0 offset=1", p()).is_err());
        assert!(Calibration::parse("offset=1", p()).is_err());
        assert_eq!(Calibration::parse(&c.render(), p()).unwrap(), c);
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let frame = ThermalFrame::new(Grid::from_fn(5, 3, |x, y| 30.0 + 0.37 * x as f64 - 0.11 * y as f64), View::Frontal)
            .unwrap();
        let pgm = dir.path().join("f.pgm");
        write_thermal_frame(&pgm, &frame, Calibration::default()).unwrap();
        let back = load_thermal_frame(&dir.path().join("f")).unwrap();
        for (a, b) in frame.temps().as_slice().iter().zip(back.temps().as_slice()) {
            assert!((a - b).abs() <= 0.0005 + 1e-12);
        }
        let csv = dir.path().join("g.csv");
        write_thermal_frame(&csv, &frame, Calibration::default()).unwrap();
        assert_eq!(load_thermal_frame(&csv).unwrap(), frame);
    }

    proptest! {
        #[test]
        fn pgm_round_trip_within_half_step(
            w in 1usize..6,
            h in 1usize..6,
            seed in proptest::collection::vec(15.01f64..44.99, 36),
            scale in 0.0005f64..0.01,
        ) {
            let frame = ThermalFrame::new(Grid::from_fn(w, h, |x, y| seed[y * 6 + x]), View::Frontal).unwrap();
            let cal = Calibration { scale, offset: 15.0 };
            let back = decode_pgm(&encode_pgm(&frame, cal), cal, p()).unwrap();
            for (a, b) in frame.temps().as_slice().iter().zip(back.temps().as_slice()) {
                prop_assert!((a - b).abs() <= scale / 2.0 + 1e-9);
            }
        }

        #[test]
        fn csv_round_trip_is_exact(seed in proptest::collection::vec(15.0f64..45.0, 12)) {
            let frame = ThermalFrame::new(Grid::from_fn(4, 3, |x, y| seed[y * 4 + x]), View::Frontal).unwrap();
            let back = parse_csv_frame(&render_csv_frame(&frame), p()).unwrap();
            prop_assert_eq!(back, frame);
        }
    }
}
