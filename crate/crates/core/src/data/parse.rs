//! Line-oriented ratings logs: `user, item, rating, timestamp`, comma or
//! tab separated, with an optional header row.

use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub user: String,
    pub item: String,
    /// Seconds; never negative.
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParseReport {
    pub interactions: Vec<Interaction>,
    /// Non-blank data lines seen, header excluded.
    pub lines: usize,
    pub malformed: usize,
    pub header: bool,
}

fn split_fields(line: &str) -> Vec<String> {
    let delim = if line.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delim)
        .flexible(true)
        .from_reader(line.as_bytes());
    match reader.records().next() {
        Some(Ok(rec)) => rec.iter().map(|f| f.trim().to_string()).collect(),
        _ => Vec::new(),
    }
}

fn parse_row(fields: &[String]) -> Option<Interaction> {
    if fields.len() < 4 || fields[0].is_empty() || fields[1].is_empty() {
        return None;
    }
    // The rating is validated but not kept.
    fields[2].parse::<f64>().ok()?;
    let timestamp: i64 = fields[3].parse().ok()?;
    (timestamp >= 0).then(|| Interaction {
        user: fields[0].clone(),
        item: fields[1].clone(),
        timestamp,
    })
}

fn looks_like_header(fields: &[String]) -> bool {
    fields.len() >= 4 && fields[2].parse::<f64>().is_err() && fields[3].parse::<i64>().is_err()
}

/// Parses every line, tallying the ones that do not fit the format. More
/// than half malformed is treated as a format mismatch.
pub fn parse_interactions<R: Read>(input: R) -> Result<ParseReport> {
    let mut report = ParseReport::default();
    for (n, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(line);
        if n == 0 && looks_like_header(&fields) {
            report.header = true;
            continue;
        }
        report.lines += 1;
        match parse_row(&fields) {
            Some(row) => report.interactions.push(row),
            None => report.malformed += 1,
        }
    }
    if report.malformed * 2 > report.lines {
        return Err(Error::FormatMismatch {
            malformed: report.malformed,
            total: report.lines,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row() {
        let r = parse_interactions("u1,i1,5.0,100\n".as_bytes()).unwrap();
        assert_eq!(
            r.interactions,
            vec![Interaction {
                user: "u1".into(),
                item: "i1".into(),
                timestamp: 100
            }]
        );
        assert_eq!(r.malformed, 0);
    }

    #[test]
    fn empty_input() {
        let r = parse_interactions("".as_bytes()).unwrap();
        assert!(r.interactions.is_empty());
        assert_eq!(r.malformed, 0);
    }

    #[test]
    fn header_tabs_and_malformed() {
        let text = "user\titem\trating\ttimestamp\n\
                    a\tx\t4\t10\n\
                    b\ty\t3\tnoon\n\
                    c\tz\t1\t12\n";
        let r = parse_interactions(text.as_bytes()).unwrap();
        assert!(r.header);
        assert_eq!(r.lines, 3);
        assert_eq!(r.malformed, 1);
        assert_eq!(r.interactions.len(), 2);
        assert_eq!(r.interactions[1].user, "c");
    }

    #[test]
    fn quoted_fields_and_negative_timestamps() {
        let text = "\"user, one\",i1,5,7\nu2,i2,5,-3\nu3,i3,2.5,9\n";
        let r = parse_interactions(text.as_bytes()).unwrap();
        assert_eq!(r.interactions[0].user, "user, one");
        assert_eq!(r.malformed, 1);
    }

    #[test]
    fn mostly_garbage_is_a_format_error() {
        let text = "hello world\nfoo\nu,i,1,2\n";
        assert!(matches!(
            parse_interactions(text.as_bytes()),
            Err(Error::FormatMismatch {
                malformed: 2,
                total: 3
            })
        ));
    }
}
