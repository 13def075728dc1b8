//! Grid and time-tag file formats.
//!
//! Both payload kinds come in a text flavor for inspection and a binary
//! flavor for exact round trips:
//!
//! * grid CSV: `# key: value` header lines, then a
//!   `signal_nm,idler_nm,intensity` table in row-major order;
//! * grid binary: `SPDCGRID` magic, little-endian fields, f64 axes and
//!   intensities bit for bit;
//! * tags CSV: header lines, then `channel,tick` rows, channel-major;
//! * tags binary: `SPDCTAGS` magic, per-channel u64 tick blocks.
//!
//! Floating text values are printed with the shortest representation that
//! parses back to the same number, so CSV grid values survive a round trip
//! exactly and re-validate under the same normalization. Readers sniff the
//! magic, so loaders take either flavor.

use std::io::{BufRead, Read, Write};

use crate::counts::TagStream;
use crate::jsa::{JsiGrid, Normalization};
use crate::{Error, Result};

pub const GRID_MAGIC: &[u8; 8] = b"SPDCGRID";
pub const TAGS_MAGIC: &[u8; 8] = b"SPDCTAGS";
const FORMAT_VERSION: u32 = 1;

/// Identity carried in every output file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FileMeta {
    pub toolkit_version: String,
    pub config_hash: String,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn format_err(what: impl Into<String>) -> Error {
    Error::Format(what.into())
}

// ------------------------------------------------------------- csv helpers

struct HeaderBlock {
    entries: Vec<(String, String)>,
    /// First non-header line (the column row), if any.
    column_row: Option<String>,
}

fn read_header_block(reader: &mut impl BufRead) -> Result<HeaderBlock> {
    let mut entries = Vec::new();
    loop {
        let mut line = String::new();
        let n = reader.read_line(&mut line).map_err(io_err)?;
        if n == 0 {
            return Ok(HeaderBlock {
                entries,
                column_row: None,
            });
        }
        let trimmed = line.trim_end_matches(['\n', '\r']);
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((key, value)) = rest.split_once(':') {
                entries.push((key.trim().to_string(), value.trim().to_string()));
            }
            continue;
        }
        return Ok(HeaderBlock {
            entries,
            column_row: Some(trimmed.to_string()),
        });
    }
}

impl HeaderBlock {
    fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format_err(format!("missing '# {key}:' header line")))
    }

    fn meta(&self) -> FileMeta {
        let lookup = |key: &str| {
            self.entries
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.clone())
                .unwrap_or_default()
        };
        FileMeta {
            toolkit_version: lookup("toolkit_version"),
            config_hash: lookup("config_hash"),
        }
    }
}

fn parse_f64(text: &str, what: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| format_err(format!("{what}: cannot parse '{text}' as a number")))
}

fn parse_usize(text: &str, what: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| format_err(format!("{what}: cannot parse '{text}' as an integer")))
}

// --------------------------------------------------------------- grid csv

pub fn write_grid_csv(out: &mut impl Write, grid: &JsiGrid<f64>, meta: &FileMeta) -> Result<()> {
    let mut w = move |s: String| out.write_all(s.as_bytes()).map_err(io_err);
    w("# spdc grid v1\n".into())?;
    w(format!("# toolkit_version: {}\n", meta.toolkit_version))?;
    w(format!("# config_hash: {}\n", meta.config_hash))?;
    w(format!("# normalization: {}\n", grid.normalization().as_str()))?;
    w(format!("# n_signal: {}\n", grid.n_signal()))?;
    w(format!("# n_idler: {}\n", grid.n_idler()))?;
    w("signal_nm,idler_nm,intensity\n".into())?;
    for (i, &ls) in grid.signal_axis_m().iter().enumerate() {
        for (j, &li) in grid.idler_axis_m().iter().enumerate() {
            w(format!(
                "{},{},{:e}\n",
                ls * 1e9,
                li * 1e9,
                grid.value(i, j)
            ))?;
        }
    }
    Ok(())
}

pub fn read_grid_csv(reader: &mut impl BufRead) -> Result<(JsiGrid<f64>, FileMeta)> {
    let header = read_header_block(reader)?;
    let columns = header
        .column_row
        .as_deref()
        .ok_or_else(|| format_err("grid file ends before the column row"))?;
    if columns != "signal_nm,idler_nm,intensity" {
        return Err(format_err(format!(
            "unexpected grid column row '{columns}'"
        )));
    }
    let normalization = Normalization::parse(header.get("normalization")?)?;
    let n_signal = parse_usize(header.get("n_signal")?, "n_signal")?;
    let n_idler = parse_usize(header.get("n_idler")?, "n_idler")?;
    let expected = n_signal
        .checked_mul(n_idler)
        .ok_or_else(|| format_err("grid dimensions overflow"))?;

    let mut signal_axis = Vec::with_capacity(n_signal);
    let mut idler_axis = Vec::with_capacity(n_idler);
    let mut intensity = Vec::with_capacity(expected);
    for (row, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (Some(a), Some(b), Some(c), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(format_err(format!(
                "grid row {}: expected 3 comma-separated fields",
                row + 1
            )));
        };
        let ls = parse_f64(a, "signal_nm")? * 1e-9;
        let li = parse_f64(b, "idler_nm")? * 1e-9;
        let v = parse_f64(c, "intensity")?;
        let k = intensity.len();
        if k >= expected {
            return Err(format_err(format!(
                "grid has more than {expected} data rows"
            )));
        }
        let (i, j) = (k / n_idler, k % n_idler);
        if j == 0 && i == signal_axis.len() {
            signal_axis.push(ls);
        } else if ls != signal_axis[i] {
            return Err(format_err(format!(
                "grid row {}: signal wavelength breaks row-major order",
                row + 1
            )));
        }
        if i == 0 {
            idler_axis.push(li);
        } else if li != idler_axis[j] {
            return Err(format_err(format!(
                "grid row {}: idler wavelength breaks row-major order",
                row + 1
            )));
        }
        intensity.push(v);
    }
    if intensity.len() != expected {
        return Err(format_err(format!(
            "grid has {} data rows, expected {expected}",
            intensity.len()
        )));
    }
    let grid = JsiGrid::new(signal_axis, idler_axis, intensity, normalization)?;
    Ok((grid, header.meta()))
}

// ------------------------------------------------------------ grid binary

fn write_len_prefixed(out: &mut impl Write, bytes: &[u8]) -> Result<()> {
    let len = u32::try_from(bytes.len())
        .map_err(|_| Error::invalid("string field longer than u32 range"))?;
    out.write_all(&len.to_le_bytes()).map_err(io_err)?;
    out.write_all(bytes).map_err(io_err)
}

fn read_exact_buf(reader: &mut impl Read, n: usize, what: &str) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; n];
    reader
        .read_exact(&mut buf)
        .map_err(|_| format_err(format!("truncated file while reading {what}")))?;
    Ok(buf)
}

fn read_u32(reader: &mut impl Read, what: &str) -> Result<u32> {
    let buf = read_exact_buf(reader, 4, what)?;
    Ok(u32::from_le_bytes(buf.try_into().unwrap()))
}

fn read_u64(reader: &mut impl Read, what: &str) -> Result<u64> {
    let buf = read_exact_buf(reader, 8, what)?;
    Ok(u64::from_le_bytes(buf.try_into().unwrap()))
}

fn read_f64(reader: &mut impl Read, what: &str) -> Result<f64> {
    let buf = read_exact_buf(reader, 8, what)?;
    Ok(f64::from_le_bytes(buf.try_into().unwrap()))
}

fn read_string(reader: &mut impl Read, what: &str) -> Result<String> {
    let len = read_u32(reader, what)? as usize;
    if len > (1 << 20) {
        return Err(format_err(format!("{what} length {len} is implausible")));
    }
    let bytes = read_exact_buf(reader, len, what)?;
    String::from_utf8(bytes).map_err(|_| format_err(format!("{what} is not valid UTF-8")))
}

fn read_count(reader: &mut impl Read, what: &str) -> Result<usize> {
    let n = read_u64(reader, what)?;
    usize::try_from(n).map_err(|_| format_err(format!("{what} {n} exceeds the address space")))
}

fn normalization_code(n: Normalization) -> u8 {
    match n {
        Normalization::PeakOne => 0,
        Normalization::SumOne => 1,
        Normalization::RawCounts => 2,
    }
}

fn normalization_from_code(code: u8) -> Result<Normalization> {
    match code {
        0 => Ok(Normalization::PeakOne),
        1 => Ok(Normalization::SumOne),
        2 => Ok(Normalization::RawCounts),
        other => Err(format_err(format!("unknown normalization code {other}"))),
    }
}

pub fn write_grid_binary(out: &mut impl Write, grid: &JsiGrid<f64>, meta: &FileMeta) -> Result<()> {
    out.write_all(GRID_MAGIC).map_err(io_err)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
    write_len_prefixed(out, meta.toolkit_version.as_bytes())?;
    write_len_prefixed(out, meta.config_hash.as_bytes())?;
    out.write_all(&[normalization_code(grid.normalization())])
        .map_err(io_err)?;
    out.write_all(&(grid.n_signal() as u64).to_le_bytes())
        .map_err(io_err)?;
    out.write_all(&(grid.n_idler() as u64).to_le_bytes())
        .map_err(io_err)?;
    for &v in grid.signal_axis_m() {
        out.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    for &v in grid.idler_axis_m() {
        out.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    for &v in grid.intensities() {
        out.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_grid_binary(reader: &mut impl Read) -> Result<(JsiGrid<f64>, FileMeta)> {
    let magic = read_exact_buf(reader, 8, "magic")?;
    if magic != GRID_MAGIC {
        return Err(format_err("not a grid file (bad magic)"));
    }
    let version = read_u32(reader, "format version")?;
    if version != FORMAT_VERSION {
        return Err(format_err(format!("unsupported grid version {version}")));
    }
    let toolkit_version = read_string(reader, "toolkit version")?;
    let config_hash = read_string(reader, "config hash")?;
    let code = read_exact_buf(reader, 1, "normalization")?[0];
    let normalization = normalization_from_code(code)?;
    let n_signal = read_count(reader, "signal count")?;
    let n_idler = read_count(reader, "idler count")?;
    let cells = n_signal
        .checked_mul(n_idler)
        .ok_or_else(|| format_err("grid dimensions overflow"))?;
    let mut signal_axis = Vec::with_capacity(n_signal);
    for _ in 0..n_signal {
        signal_axis.push(read_f64(reader, "signal axis")?);
    }
    let mut idler_axis = Vec::with_capacity(n_idler);
    for _ in 0..n_idler {
        idler_axis.push(read_f64(reader, "idler axis")?);
    }
    let mut intensity = Vec::with_capacity(cells);
    for _ in 0..cells {
        intensity.push(read_f64(reader, "intensity")?);
    }
    let grid = JsiGrid::new(signal_axis, idler_axis, intensity, normalization)?;
    Ok((
        grid,
        FileMeta {
            toolkit_version,
            config_hash,
        },
    ))
}

// ---------------------------------------------------------------- tags csv

fn check_streams(streams: &[TagStream]) -> Result<(f64, f64)> {
    let first = streams
        .first()
        .ok_or_else(|| Error::invalid("no tag streams to write"))?;
    for s in streams {
        if s.resolution_s() != first.resolution_s() || s.duration_s() != first.duration_s() {
            return Err(Error::invalid(
                "tag streams in one file must share resolution and duration",
            ));
        }
    }
    Ok((first.resolution_s(), first.duration_s()))
}

pub fn write_tags_csv(out: &mut impl Write, streams: &[TagStream], meta: &FileMeta) -> Result<()> {
    let (resolution, duration) = check_streams(streams)?;
    let mut w = move |s: String| out.write_all(s.as_bytes()).map_err(io_err);
    w("# spdc tags v1\n".into())?;
    w(format!("# toolkit_version: {}\n", meta.toolkit_version))?;
    w(format!("# config_hash: {}\n", meta.config_hash))?;
    w(format!("# resolution_s: {resolution:e}\n"))?;
    w(format!("# duration_s: {duration:e}\n"))?;
    w(format!("# n_channels: {}\n", streams.len()))?;
    w("channel,tick\n".into())?;
    for s in streams {
        for &t in s.ticks() {
            w(format!("{},{}\n", s.channel(), t))?;
        }
    }
    Ok(())
}

pub fn read_tags_csv(reader: &mut impl BufRead) -> Result<(Vec<TagStream>, FileMeta)> {
    let header = read_header_block(reader)?;
    let columns = header
        .column_row
        .as_deref()
        .ok_or_else(|| format_err("tag file ends before the column row"))?;
    if columns != "channel,tick" {
        return Err(format_err(format!("unexpected tag column row '{columns}'")));
    }
    let resolution = parse_f64(header.get("resolution_s")?, "resolution_s")?;
    let duration = parse_f64(header.get("duration_s")?, "duration_s")?;
    let n_channels = parse_usize(header.get("n_channels")?, "n_channels")?;

    // Channel-major rows; a channel id returning after another channel
    // started would silently shuffle tags, so reject it.
    let mut per_channel: Vec<(u8, Vec<u64>)> = Vec::new();
    for (row, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (a, b) = trimmed
            .split_once(',')
            .ok_or_else(|| format_err(format!("tag row {}: expected channel,tick", row + 1)))?;
        let channel: u8 = a
            .trim()
            .parse()
            .map_err(|_| format_err(format!("tag row {}: bad channel '{a}'", row + 1)))?;
        let tick: u64 = b
            .trim()
            .parse()
            .map_err(|_| format_err(format!("tag row {}: bad tick '{b}'", row + 1)))?;
        match per_channel.last_mut() {
            Some((c, ticks)) if *c == channel => ticks.push(tick),
            _ => {
                if per_channel.iter().any(|(c, _)| *c == channel) {
                    return Err(format_err(format!(
                        "tag row {}: channel {channel} appears in two blocks",
                        row + 1
                    )));
                }
                per_channel.push((channel, vec![tick]));
            }
        }
    }
    if per_channel.len() != n_channels {
        return Err(format_err(format!(
            "tag file holds {} channels, header says {n_channels}",
            per_channel.len()
        )));
    }
    let streams = per_channel
        .into_iter()
        .map(|(channel, ticks)| TagStream::new(channel, resolution, duration, ticks))
        .collect::<Result<Vec<_>>>()?;
    Ok((streams, header.meta()))
}

// ------------------------------------------------------------- tags binary

pub fn write_tags_binary(
    out: &mut impl Write,
    streams: &[TagStream],
    meta: &FileMeta,
) -> Result<()> {
    let (resolution, duration) = check_streams(streams)?;
    out.write_all(TAGS_MAGIC).map_err(io_err)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
    write_len_prefixed(out, meta.toolkit_version.as_bytes())?;
    write_len_prefixed(out, meta.config_hash.as_bytes())?;
    out.write_all(&resolution.to_le_bytes()).map_err(io_err)?;
    out.write_all(&duration.to_le_bytes()).map_err(io_err)?;
    out.write_all(&(streams.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    for s in streams {
        out.write_all(&[s.channel()]).map_err(io_err)?;
        out.write_all(&(s.len() as u64).to_le_bytes())
            .map_err(io_err)?;
        for &t in s.ticks() {
            out.write_all(&t.to_le_bytes()).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn read_tags_binary(reader: &mut impl Read) -> Result<(Vec<TagStream>, FileMeta)> {
    let magic = read_exact_buf(reader, 8, "magic")?;
    if magic != TAGS_MAGIC {
        return Err(format_err("not a tag file (bad magic)"));
    }
    let version = read_u32(reader, "format version")?;
    if version != FORMAT_VERSION {
        return Err(format_err(format!("unsupported tag version {version}")));
    }
    let toolkit_version = read_string(reader, "toolkit version")?;
    let config_hash = read_string(reader, "config hash")?;
    let resolution = read_f64(reader, "resolution")?;
    let duration = read_f64(reader, "duration")?;
    let n_channels = read_u32(reader, "channel count")? as usize;
    let mut streams = Vec::with_capacity(n_channels);
    for _ in 0..n_channels {
        let channel = read_exact_buf(reader, 1, "channel id")?[0];
        let n = read_count(reader, "tick count")?;
        let mut ticks = Vec::with_capacity(n);
        for _ in 0..n {
            ticks.push(read_u64(reader, "tick")?);
        }
        streams.push(TagStream::new(channel, resolution, duration, ticks)?);
    }
    Ok((
        streams,
        FileMeta {
            toolkit_version,
            config_hash,
        },
    ))
}

// ------------------------------------------------------------- path layer

/// Load a grid from a path, sniffing binary versus CSV by the magic bytes.
pub fn load_grid(path: &std::path::Path) -> Result<(JsiGrid<f64>, FileMeta)> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(GRID_MAGIC) {
        read_grid_binary(&mut bytes.as_slice())
    } else {
        read_grid_csv(&mut bytes.as_slice())
    }
}

/// Load tag streams from a path, sniffing binary versus CSV.
pub fn load_tags(path: &std::path::Path) -> Result<(Vec<TagStream>, FileMeta)> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if bytes.starts_with(TAGS_MAGIC) {
        read_tags_binary(&mut bytes.as_slice())
    } else {
        read_tags_csv(&mut bytes.as_slice())
    }
}

/// Write `bytes` to `path` through a sibling temporary file and an atomic
/// rename, so readers never observe a half-written file.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
