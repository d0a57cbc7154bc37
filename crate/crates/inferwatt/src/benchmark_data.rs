//! The TPS benchmark table: parsing, validation, and lookup.
//!
//! The dataset that trains the throughput models ships with the crate as a
//! versioned CSV ([`BUILTIN_CSV`]); callers may substitute any file with the
//! same schema. Fields must not contain commas (none of the shipped ones do).

use crate::error::{Error, Result};

/// Header the CSV must carry, byte for byte.
pub const CSV_HEADER: &str = "model,tp_size,quantization,tps,input_length,output_length,source";

/// The benchmark table shipped with the crate.
pub const BUILTIN_CSV: &str = include_str!("../data/tps_benchmark.csv");

/// One measured (model, L_in, L_out, TPS) observation.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub model_name: String,
    pub tp_size: u32,
    pub quantization: String,
    pub tps: f64,
    pub l_in: f64,
    pub l_out: f64,
    pub source: String,
}

impl BenchmarkRecord {
    fn validate(&self, row: usize) -> Result<()> {
        let check = |ok: bool, field: &str, message: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Parse {
                    row,
                    field: field.to_string(),
                    message: message.to_string(),
                })
            }
        };
        check(!self.model_name.is_empty(), "model", "must be non-empty")?;
        check(self.tp_size >= 1, "tp_size", "must be >= 1")?;
        check(self.tps > 0.0, "tps", "must be > 0")?;
        check(self.l_in >= 1.0, "input_length", "must be >= 1")?;
        check(self.l_out >= 1.0, "output_length", "must be >= 1")?;
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(raw: &str, row: usize, field: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::Parse {
        row,
        field: field.to_string(),
        message: format!("cannot parse `{}`", raw.trim()),
    })
}

/// Parse benchmark CSV text into records, preserving file order.
///
/// Errors name the 1-based row and the offending field. A header-only file
/// yields an empty list; a file without the expected header is an error.
pub fn parse_benchmarks(csv_text: &str) -> Result<Vec<BenchmarkRecord>> {
    let mut lines = csv_text.lines();
    let header = lines.next().ok_or(Error::EmptyInput)?;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::Parse {
            row: 1,
            field: "header".to_string(),
            message: format!("expected `{CSV_HEADER}`"),
        });
    }
    let mut records = Vec::new();
    for (offset, line) in lines.enumerate() {
        let row = offset + 2; // 1-based, after the header
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                row,
                field: "row".to_string(),
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let record = BenchmarkRecord {
            model_name: fields[0].trim().to_string(),
            tp_size: parse_num(fields[1], row, "tp_size")?,
            quantization: fields[2].trim().to_string(),
            tps: parse_num(fields[3], row, "tps")?,
            l_in: parse_num(fields[4], row, "input_length")?,
            l_out: parse_num(fields[5], row, "output_length")?,
            source: fields[6].trim().to_string(),
        };
        record.validate(row)?;
        records.push(record);
    }
    Ok(records)
}

/// Render records back to CSV. `parse(serialize(parse(x)))` is identity on
/// the record values.
pub fn serialize_benchmarks(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.model_name, r.tp_size, r.quantization, r.tps, r.l_in, r.l_out, r.source
        ));
    }
    out
}

/// All records for one model, exact name match, order preserved.
pub fn records_for_model<'a>(
    records: &'a [BenchmarkRecord],
    model_name: &str,
) -> Vec<&'a BenchmarkRecord> {
    records.iter().filter(|r| r.model_name == model_name).collect()
}

/// Model names in first-appearance order.
pub fn model_names(records: &[BenchmarkRecord]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in records {
        if !names.iter().any(|n| n == &r.model_name) {
            names.push(r.model_name.clone());
        }
    }
    names
}

/// Parse the dataset shipped with the crate.
pub fn builtin_records() -> Vec<BenchmarkRecord> {
    parse_benchmarks(BUILTIN_CSV).expect("shipped benchmark CSV must parse")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_rows() {
        let records = builtin_records();
        let r = records
            .iter()
            .find(|r| r.tps == 3661.85)
            .expect("405B row present");
        assert_eq!(r.model_name, "Llama 3.1 405B");
        assert_eq!(r.l_in, 500.0);
        assert_eq!(r.l_out, 2000.0);
        assert_eq!(r.source, "tensorRT-LLM-May2025 v019");

        let r = records.iter().find(|r| r.tps == 886.0).unwrap();
        assert_eq!(r.model_name, "DeepSeek-R1");
        assert_eq!(r.tp_size, 10);
    }

    #[test]
    fn shipped_dataset_row_counts() {
        let records = builtin_records();
        assert_eq!(records.len(), 38);
        let count = |name: &str| records_for_model(&records, name).len();
        assert_eq!(count("Llama 3.1 405B"), 13);
        assert_eq!(count("Llama 3.1 70B"), 11);
        assert_eq!(count("Mixtral 8x22B"), 9);
        assert_eq!(count("DeepSeek-R1"), 3);
        assert_eq!(count("Llama-3.1 Nemotron Ultra 253B"), 2);
    }

    #[test]
    fn duplicate_grid_points_are_retained() {
        // 405B appears twice at (500, 2000) from different sources; both stay.
        let records = builtin_records();
        let dupes: Vec<_> = records
            .iter()
            .filter(|r| r.model_name == "Llama 3.1 405B" && r.l_in == 500.0 && r.l_out == 2000.0)
            .collect();
        assert_eq!(dupes.len(), 2);
        assert!(dupes.iter().any(|r| r.tps == 2050.0));
        assert!(dupes.iter().any(|r| r.tps == 3661.85));
    }

    #[test]
    fn header_only_is_empty_list() {
        let records = parse_benchmarks(&format!("{CSV_HEADER}\n")).unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn empty_input_is_error() {
        assert_eq!(parse_benchmarks(""), Err(Error::EmptyInput));
    }

    #[test]
    fn malformed_row_names_row_and_field() {
        let text = format!("{CSV_HEADER}\nLlama,8,FP8,not-a-number,500,2000,src\n");
        match parse_benchmarks(&text) {
            Err(Error::Parse { row, field, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(field, "tps");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn short_row_is_error() {
        let text = format!("{CSV_HEADER}\nLlama,8,FP8\n");
        assert!(matches!(parse_benchmarks(&text), Err(Error::Parse { row: 2, .. })));
    }

    #[test]
    fn unknown_model_yields_empty() {
        let records = builtin_records();
        assert!(records_for_model(&records, "GPT-7").is_empty());
    }

    #[test]
    fn round_trip_is_identity() {
        let records = builtin_records();
        let reparsed = parse_benchmarks(&serialize_benchmarks(&records)).unwrap();
        assert_eq!(records, reparsed);
    }

    #[test]
    fn model_names_in_first_appearance_order() {
        let names = model_names(&builtin_records());
        assert_eq!(
            names,
            vec![
                "Llama 3.1 405B",
                "Llama 3.1 70B",
                "Mixtral 8x22B",
                "DeepSeek-R1",
                "Llama-3.1 Nemotron Ultra 253B",
            ]
        );
    }
}
