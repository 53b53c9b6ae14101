use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Writes result tables into one directory, each as a CSV file and a
/// whitespace-separated `.dat` mirror that gnuplot reads directly.
///
/// Both files start with `# config_hash=<hex>` followed by the column names.
#[derive(Debug, Clone)]
pub struct OutputDir {
    dir: PathBuf,
    hash: String,
}

impl OutputDir {
    pub fn create(dir: &Path, hash: &str) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputDir { dir: dir.to_path_buf(), hash: hash.to_string() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Write `<stem>.csv` and `<stem>.dat`.
    pub fn table(&self, stem: &str, columns: &str, rows: &[String]) -> io::Result<()> {
        let mut csv = format!("# config_hash={}\n{columns}\n", self.hash);
        let mut dat = format!("# config_hash={}\n# {}\n", self.hash, columns.replace(',', " "));
        for row in rows {
            csv.push_str(row);
            csv.push('\n');
            let fields: Vec<&str> = row.split(',').map(|f| if f.is_empty() { "NaN" } else { f }).collect();
            dat.push_str(&fields.join(" "));
            dat.push('\n');
        }
        fs::write(self.dir.join(format!("{stem}.csv")), csv)?;
        fs::write(self.dir.join(format!("{stem}.dat")), dat)
    }

    pub fn effective_config(&self, text: &str) -> io::Result<()> {
        fs::write(self.dir.join("effective_config.txt"), format!("# config_hash={}\n{text}", self.hash))
    }
}
