//! CSV ingestion and validation against a column schema.

use std::path::Path;

use nalgebra::DMatrix;

use crate::config::{ColumnKind, ColumnSchema};
use crate::error::{CliError, CliResult};

/// A numeric CSV with its header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Reads a comma-separated file with a header row and numeric cells.
pub fn read_table(path: &Path) -> CliResult<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text, &path.display().to_string())
}

/// Parses CSV text; `source` labels error messages.
pub fn parse_table(text: &str, source: &str) -> CliResult<Table> {
    let parse_err = |row: usize, column: &str, message: String| CliError::Parse {
        path: source.to_string(),
        row,
        column: column.to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, "", e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(parse_err(1, "", "missing header row".into()));
    }
    let mut cells = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, "", e.to_string())
        })?;
        let line = record.position().map_or(rows + 2, |p| p.line() as usize);
        for (value, name) in record.iter().zip(&names) {
            if value.is_empty() {
                return Err(parse_err(line, name, "missing value".into()));
            }
            let x: f64 = value
                .parse()
                .map_err(|_| parse_err(line, name, format!("not a number: {value:?}")))?;
            if !x.is_finite() {
                return Err(parse_err(line, name, format!("non-finite value {value:?}")));
            }
            cells.push(x);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(parse_err(2, "", "no data rows".into()));
    }
    Ok(Table {
        values: DMatrix::from_row_slice(rows, names.len(), &cells),
        names,
    })
}

/// Validated data with one schema entry per column, in file order.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
    pub columns: Vec<ColumnSchema>,
}

impl Dataset {
    pub fn discrete_indices(&self) -> Vec<usize> {
        self.indices_of(ColumnKind::Discrete)
    }

    pub fn continuous_indices(&self) -> Vec<usize> {
        self.indices_of(ColumnKind::Continuous)
    }

    fn indices_of(&self, kind: ColumnKind) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&j| self.columns[j].kind == kind)
            .collect()
    }
}

/// Reads `path` and validates it against `schema` (matched by column name;
/// every column continuous and Gaussian when `schema` is `None`).
pub fn ingest(path: &Path, schema: Option<&[ColumnSchema]>, standardize: bool) -> CliResult<Dataset> {
    let table = read_table(path)?;
    validate(table, schema, standardize)
}

pub fn validate(table: Table, schema: Option<&[ColumnSchema]>, standardize: bool) -> CliResult<Dataset> {
    let Table { names, mut values } = table;
    let columns: Vec<ColumnSchema> = match schema {
        None => names.iter().map(ColumnSchema::continuous).collect(),
        Some(schema) => {
            if schema.is_empty() {
                return Err(CliError::SchemaMismatch("schema lists no columns".into()));
            }
            for (i, c) in schema.iter().enumerate() {
                if schema[..i].iter().any(|d| d.name == c.name) {
                    return Err(CliError::SchemaMismatch(format!("column {:?} listed twice", c.name)));
                }
                if !names.contains(&c.name) {
                    return Err(CliError::SchemaMismatch(format!(
                        "column {:?} is not in the data header",
                        c.name
                    )));
                }
            }
            names
                .iter()
                .map(|n| {
                    schema.iter().find(|c| &c.name == n).cloned().ok_or_else(|| {
                        CliError::SchemaMismatch(format!("data column {n:?} has no schema entry"))
                    })
                })
                .collect::<CliResult<_>>()?
        }
    };
    for (j, c) in columns.iter().enumerate() {
        let col = values.column(j);
        if c.kind == ColumnKind::Discrete {
            if let Some(i) = col.iter().position(|v| v.fract() != 0.0) {
                return Err(CliError::SchemaMismatch(format!(
                    "discrete column {:?} has non-integer value {} in data row {}",
                    c.name,
                    col[i],
                    i + 1
                )));
            }
            if c.mixing.is_some() || c.skew.is_some() {
                return Err(CliError::SchemaMismatch(format!(
                    "discrete column {:?} cannot carry a mixing law or skew",
                    c.name
                )));
            }
        } else if c.centering.is_some() {
            return Err(CliError::SchemaMismatch(format!(
                "continuous column {:?} cannot carry a centering",
                c.name
            )));
        }
        if let Some(m) = &c.mixing {
            m.validate().map_err(|source| CliError::Column {
                name: c.name.clone(),
                source,
            })?;
        }
        if col.iter().all(|&v| v == col[0]) {
            return Err(CliError::ConstantColumn { name: c.name.clone() });
        }
    }
    if standardize {
        for (j, c) in columns.iter().enumerate() {
            if c.kind == ColumnKind::Continuous {
                standardize_column(values.column_mut(j).as_mut_slice());
            }
        }
    }
    Ok(Dataset {
        names,
        values,
        columns,
    })
}

/// Subtracts the mean and divides by the sample standard deviation (n − 1).
pub fn standardize_column(col: &mut [f64]) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    col.iter_mut().for_each(|v| *v -= mean);
    // Second pass removes the rounding left in the first mean.
    let resid = col.iter().sum::<f64>() / n;
    col.iter_mut().for_each(|v| *v -= resid);
    let sd = (col.iter().map(|v| v * v).sum::<f64>() / (n - 1.0)).sqrt();
    col.iter_mut().for_each(|v| *v /= sd);
}
