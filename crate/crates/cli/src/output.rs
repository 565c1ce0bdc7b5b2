//! CSV and JSON writers over stdout or a file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::rows::Row;

pub enum Sink {
    Stdout,
    File(BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        Ok(match path {
            None => Sink::Stdout,
            Some(p) => Sink::File(BufWriter::new(File::create(p)?)),
        })
    }

    fn into_writer(self) -> Box<dyn Write> {
        match self {
            Sink::Stdout => Box::new(io::stdout().lock()),
            Sink::File(f) => Box::new(f),
        }
    }
}

pub fn write_csv<R: Row>(rows: &[R], sink: Sink) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink.into_writer());
    w.write_record(R::header())?;
    for row in rows {
        w.write_record(row.cells())?;
    }
    w.flush()
}

pub fn write_json<R: serde::Serialize>(rows: &[R], sink: Sink) -> io::Result<()> {
    let mut w = sink.into_writer();
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    w.flush()
}
