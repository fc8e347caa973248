use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Header of the Telco churn export, in file order.
pub const CHURN_COLUMNS: [&str; 21] = [
    "customerID",
    "gender",
    "SeniorCitizen",
    "Partner",
    "Dependents",
    "tenure",
    "PhoneService",
    "MultipleLines",
    "InternetService",
    "OnlineSecurity",
    "OnlineBackup",
    "DeviceProtection",
    "TechSupport",
    "StreamingTV",
    "StreamingMovies",
    "Contract",
    "PaperlessBilling",
    "PaymentMethod",
    "MonthlyCharges",
    "TotalCharges",
    "Churn",
];

pub const CHURN_NUMERIC: [&str; 3] = ["tenure", "MonthlyCharges", "TotalCharges"];

/// Numeric columns where a blank cell is a missing value rather than an error.
const BLANK_ALLOWED: [&str; 1] = ["TotalCharges"];

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Text(Vec<String>),
    Numeric(Vec<Option<f64>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Text(v) => v.len(),
            Column::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Column::Numeric(_))
    }
}

/// Column-oriented table of typed cells.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    column_names: Vec<String>,
    columns: Vec<Column>,
    row_count: usize,
}

impl RawTable {
    pub fn new(column_names: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        if column_names.len() != columns.len() {
            return Err(Error::Shape(format!(
                "{} names for {} columns",
                column_names.len(),
                columns.len()
            )));
        }
        let row_count = columns.first().map_or(0, Column::len);
        if columns.iter().any(|c| c.len() != row_count) {
            return Err(Error::Shape("columns have unequal lengths".into()));
        }
        Ok(RawTable {
            column_names,
            columns,
            row_count,
        })
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.column_names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| Error::Schema(name.to_string()))
    }

    pub fn text(&self, name: &str) -> Result<&[String]> {
        match self.column(name)? {
            Column::Text(v) => Ok(v),
            Column::Numeric(_) => Err(Error::Type(format!("column `{name}` is numeric"))),
        }
    }

    pub fn numeric(&self, name: &str) -> Result<&[Option<f64>]> {
        match self.column(name)? {
            Column::Numeric(v) => Ok(v),
            Column::Text(_) => Err(Error::Type(format!("column `{name}` is not numeric"))),
        }
    }

    /// Table without the named columns (unknown names are ignored).
    pub fn without(&self, names: &[&str]) -> RawTable {
        let keep: Vec<usize> = (0..self.columns.len())
            .filter(|&i| !names.contains(&self.column_names[i].as_str()))
            .collect();
        RawTable {
            column_names: keep.iter().map(|&i| self.column_names[i].clone()).collect(),
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            row_count: self.row_count,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> RawTable {
        let columns = self
            .columns
            .iter()
            .map(|c| match c {
                Column::Text(v) => Column::Text(rows.iter().map(|&r| v[r].clone()).collect()),
                Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            })
            .collect();
        RawTable {
            column_names: self.column_names.clone(),
            columns,
            row_count: rows.len(),
        }
    }
}

pub fn load_churn_csv(path: &Path) -> Result<RawTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_churn_csv(file)
}

/// Parses the churn export. `tenure`, `MonthlyCharges` and `TotalCharges`
/// become numeric; a blank `TotalCharges` is kept as missing. Parse errors
/// report 1-based data row numbers.
pub fn read_churn_csv<R: Read>(reader: R) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    for expected in CHURN_COLUMNS {
        if !header.iter().any(|h| h == expected) {
            return Err(Error::Schema(expected.to_string()));
        }
    }
    let numeric: Vec<bool> = header.iter().map(|h| CHURN_NUMERIC.contains(&h.as_str())).collect();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut numbers: Vec<Vec<Option<f64>>> = vec![Vec::new(); header.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        for (j, name) in header.iter().enumerate() {
            let raw = record.get(j).unwrap_or("");
            if numeric[j] {
                let t = raw.trim();
                let value = if t.is_empty() && BLANK_ALLOWED.contains(&name.as_str()) {
                    None
                } else {
                    let v: f64 = t.parse().map_err(|_| Error::Parse {
                        row: row + 1,
                        column: name.clone(),
                        message: format!("`{raw}` is not a number"),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Parse {
                            row: row + 1,
                            column: name.clone(),
                            message: format!("`{raw}` is not finite"),
                        });
                    }
                    Some(v)
                };
                numbers[j].push(value);
            } else {
                cells[j].push(raw.to_string());
            }
        }
    }
    let columns = numeric
        .iter()
        .zip(cells.into_iter().zip(numbers))
        .map(|(is_num, (t, n))| if *is_num { Column::Numeric(n) } else { Column::Text(t) })
        .collect();
    RawTable::new(header, columns)
}
