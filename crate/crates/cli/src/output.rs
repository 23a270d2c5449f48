use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Version of every CSV layout written by this tool, emitted as a leading `# schema=` line.
pub const SCHEMA_VERSION: u32 = 1;

pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p)?))),
    }
}

/// A rectangular table of already formatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Table {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> rctls::Result<()> {
        writeln!(out, "# schema={SCHEMA_VERSION}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_human(&self, out: &mut dyn Write) -> rctls::Result<()> {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| self.rows.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(self.header.clone()))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    pub fn write(&self, format: crate::Format, out: &mut dyn Write) -> rctls::Result<()> {
        match format {
            crate::Format::Csv => self.write_csv(out),
            crate::Format::Human => self.write_human(out),
        }?;
        out.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> rctls::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => rctls::Error::Io(io),
        other => rctls::Error::Io(io::Error::other(format!("{other:?}"))),
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

pub fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}
