use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LINE_LEN: usize = 69;

/// Decoded two-line element set. Angles stay in degrees as printed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TleRecord {
    pub name: String,
    pub catalog_number: u32,
    /// Seconds since 1970-01-01T00:00:00Z.
    pub epoch: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
    pub mean_motion_rev_per_day: f64,
    pub revolution_number: u32,
    pub line1_checksum: u32,
    pub line2_checksum: u32,
}

/// Modulo-10 checksum over the first 68 columns: digits count their value,
/// minus signs count one, everything else zero.
pub fn checksum(line: &str) -> u32 {
    line.bytes()
        .take(LINE_LEN - 1)
        .map(|b| match b {
            b'0'..=b'9' => u32::from(b - b'0'),
            b'-' => 1,
            _ => 0,
        })
        .sum::<u32>()
        % 10
}

/// Parses one object: an optional name line followed by lines 1 and 2.
pub fn parse_tle(text: &str) -> Result<TleRecord> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches(['\r', '\n']))
        .filter(|l| !l.trim().is_empty())
        .collect();
    match lines.as_slice() {
        [l1, l2] => parse_lines("", l1, l2),
        [name, l1, l2] => parse_lines(name.trim(), l1, l2),
        _ => Err(Error::TleParse {
            line: 0,
            start: 1,
            end: LINE_LEN,
            reason: format!("expected 2 or 3 lines, found {}", lines.len()),
        }),
    }
}

/// Parses a file holding any number of objects, each with an optional name line.
pub fn parse_tle_file(text: &str) -> Result<Vec<TleRecord>> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (name, start) = if lines[i].starts_with("1 ") {
            ("", i)
        } else {
            (lines[i].trim(), i + 1)
        };
        if start + 1 >= lines.len() {
            return Err(Error::TleParse {
                line: 1,
                start: 1,
                end: LINE_LEN,
                reason: format!("incomplete element set after {:?}", lines[i]),
            });
        }
        out.push(parse_lines(name, lines[start], lines[start + 1])?);
        i = start + 2;
    }
    Ok(out)
}

fn parse_lines(name: &str, l1: &str, l2: &str) -> Result<TleRecord> {
    let l1 = validate_line(l1, 1)?;
    let l2 = validate_line(l2, 2)?;

    let sat1: u32 = field(l1, 1, 3, 7)?;
    let sat2: u32 = field(l2, 2, 3, 7)?;
    if sat1 != sat2 {
        return Err(Error::TleParse {
            line: 2,
            start: 3,
            end: 7,
            reason: format!("catalog number {sat2} differs from line 1 ({sat1})"),
        });
    }

    let year2: u32 = field(l1, 1, 19, 20)?;
    let day: f64 = field(l1, 1, 21, 32)?;
    if !(1.0..367.0).contains(&day) {
        return Err(span_err(1, 21, 32, format!("epoch day {day} out of range")));
    }
    let year = if year2 < 57 { 2000 + year2 } else { 1900 + year2 };
    let epoch = days_from_civil(year as i64, 1, 1) as f64 * 86_400.0 + (day - 1.0) * 86_400.0;

    let inclination_deg: f64 = field(l2, 2, 9, 16)?;
    let raan_deg: f64 = field(l2, 2, 18, 25)?;
    let ecc_digits = columns(l2, 27, 33);
    if !ecc_digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(span_err(2, 27, 33, format!("eccentricity {ecc_digits:?} is not 7 digits")));
    }
    let eccentricity: f64 = format!("0.{ecc_digits}").parse().expect("digits");
    let arg_perigee_deg: f64 = field(l2, 2, 35, 42)?;
    let mean_anomaly_deg: f64 = field(l2, 2, 44, 51)?;
    let mean_motion_rev_per_day: f64 = field(l2, 2, 53, 63)?;
    let revolution_number: u32 = field(l2, 2, 64, 68).unwrap_or(0);

    if !(0.0..=180.0).contains(&inclination_deg) {
        return Err(span_err(2, 9, 16, format!("inclination {inclination_deg} outside [0, 180]")));
    }
    if mean_motion_rev_per_day <= 0.0 {
        return Err(span_err(2, 53, 63, "mean motion must be positive".into()));
    }

    Ok(TleRecord {
        name: name.to_string(),
        catalog_number: sat1,
        epoch,
        inclination_deg,
        raan_deg,
        eccentricity,
        arg_perigee_deg,
        mean_anomaly_deg,
        mean_motion_rev_per_day,
        revolution_number,
        line1_checksum: checksum(l1),
        line2_checksum: checksum(l2),
    })
}

fn validate_line(line: &str, number: u8) -> Result<&str> {
    let line = line.trim_end();
    if !line.is_ascii() {
        return Err(span_err(number, 1, LINE_LEN, "non-ASCII characters".into()));
    }
    if line.len() != LINE_LEN {
        return Err(span_err(
            number,
            1,
            LINE_LEN,
            format!("line is {} columns wide, expected {LINE_LEN}", line.len()),
        ));
    }
    let tag = (b'0' + number) as char;
    if !line.starts_with(tag) || line.as_bytes()[1] != b' ' {
        return Err(span_err(number, 1, 2, format!("line must start with \"{tag} \"")));
    }
    let found = match line.as_bytes()[LINE_LEN - 1] {
        b @ b'0'..=b'9' => u32::from(b - b'0'),
        _ => return Err(span_err(number, 69, 69, "checksum column is not a digit".into())),
    };
    let computed = checksum(line);
    if computed != found {
        return Err(Error::Checksum {
            line: number,
            computed,
            found,
        });
    }
    Ok(line)
}

/// 1-based inclusive column span.
fn columns(line: &str, start: usize, end: usize) -> &str {
    &line[start - 1..end]
}

fn field<T: std::str::FromStr>(line: &str, number: u8, start: usize, end: usize) -> Result<T> {
    let raw = columns(line, start, end).trim();
    raw.parse()
        .map_err(|_| span_err(number, start, end, format!("cannot decode {raw:?}")))
}

fn span_err(line: u8, start: usize, end: usize, reason: String) -> Error {
    Error::TleParse {
        line,
        start,
        end,
        reason,
    }
}

// Howard Hinnant's days-from-civil.
fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let doy = (153 * (m + if m > 2 { -3 } else { 9 }) + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

impl TleRecord {
    /// Renders the record as fixed-column text (name line plus lines 1 and 2)
    /// with freshly computed checksums. Drag terms are written as zero.
    pub fn to_text(&self) -> String {
        let days = (self.epoch / 86_400.0).floor() as i64;
        let (year, start_of_year) = year_of_day(days);
        let day = (self.epoch - start_of_year as f64 * 86_400.0) / 86_400.0 + 1.0;
        let mut l1 = String::with_capacity(LINE_LEN);
        write!(
            l1,
            "1 {:05}U 00000A   {:02}{:012.8} +.00000000 +00000-0 +00000-0 0  999",
            self.catalog_number % 100_000,
            year % 100,
            day
        )
        .unwrap();
        let ecc = format!("{:.7}", self.eccentricity);
        let mut l2 = String::with_capacity(LINE_LEN);
        write!(
            l2,
            "2 {:05} {:8.4} {:8.4} {} {:8.4} {:8.4} {:11.8}{:5}",
            self.catalog_number % 100_000,
            self.inclination_deg,
            self.raan_deg,
            &ecc[2..9],
            self.arg_perigee_deg,
            self.mean_anomaly_deg,
            self.mean_motion_rev_per_day,
            self.revolution_number % 100_000
        )
        .unwrap();
        let c1 = checksum(&l1);
        let c2 = checksum(&l2);
        let name = if self.name.is_empty() {
            String::new()
        } else {
            format!("{}\n", self.name)
        };
        format!("{name}{l1}{c1}\n{l2}{c2}\n")
    }
}

fn year_of_day(days: i64) -> (i64, i64) {
    let mut year = 1970 + days.div_euclid(366);
    while days_from_civil(year + 1, 1, 1) <= days {
        year += 1;
    }
    while days_from_civil(year, 1, 1) > days {
        year -= 1;
    }
    (year, days_from_civil(year, 1, 1))
}
