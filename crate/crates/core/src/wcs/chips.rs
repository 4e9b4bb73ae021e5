use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRID_ROWS: usize = 10;
pub const GRID_COLS: usize = 41;
/// Chips in the full stimulus grid: 8 chromatic rows × 40 hues + 10 achromatic.
pub const WCS_CHIP_COUNT: usize = 330;

/// Position on the 10×41 stimulus grid: rows A–J, columns 0–40.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCode {
    pub row: u8,
    pub col: u8,
}

impl GridCode {
    pub fn new(row: char, col: u8) -> Result<Self> {
        let r = row.to_ascii_uppercase();
        if !('A'..='J').contains(&r) || col as usize >= GRID_COLS {
            return Err(Error::invalid(format!("grid position {row}{col} off the grid")));
        }
        Ok(Self {
            row: r as u8 - b'A',
            col,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        let row = chars
            .next()
            .ok_or_else(|| Error::invalid("empty grid code"))?;
        let col: u8 = chars
            .as_str()
            .parse()
            .map_err(|_| Error::invalid(format!("bad grid code {s:?}")))?;
        Self::new(row, col)
    }

    pub fn row_letter(self) -> char {
        (b'A' + self.row) as char
    }

    pub fn is_achromatic(self) -> bool {
        self.col == 0
    }
}

impl fmt::Display for GridCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row_letter(), self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chip {
    pub id: u32,
    pub grid: GridCode,
    /// CIELAB (L*, a*, b*).
    pub lab: [f64; 3],
}

impl Chip {
    /// CIELAB divided by 100, the network input scale.
    pub fn scaled(&self) -> [f64; 3] {
        [self.lab[0] / 100.0, self.lab[1] / 100.0, self.lab[2] / 100.0]
    }
}

/// Color stimulus set. Chip ids run 1..=len and index position is `id - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipTable {
    chips: Vec<Chip>,
}

impl ChipTable {
    pub fn new(mut chips: Vec<Chip>) -> Result<Self> {
        if chips.is_empty() {
            return Err(Error::Data("chip table is empty".into()));
        }
        chips.sort_by_key(|c| c.id);
        for pair in chips.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Data(format!("duplicate chip id {}", pair[0].id)));
            }
        }
        for (i, c) in chips.iter().enumerate() {
            if c.id as usize != i + 1 {
                return Err(Error::Data(format!(
                    "chip ids must be contiguous from 1; missing id {}",
                    i + 1
                )));
            }
            if !c.lab.iter().all(|v| v.is_finite()) {
                return Err(Error::Data(format!("chip {} has non-finite CIELAB", c.id)));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &chips {
            if !seen.insert(c.grid) {
                return Err(Error::Data(format!(
                    "chip {} repeats grid position {}",
                    c.id, c.grid
                )));
            }
        }
        Ok(Self { chips })
    }

    /// Reads a tab-separated chip table.
    ///
    /// Accepted row layouts: `chip  grid  L  a  b` (e.g. `17  C4  80.5  41.6  16.8`),
    /// or the WCS `cnum-vhcm-lab` layout `chip  V  H  C  MunH  MunV  L  a  b`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut chips = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let (id, grid, lab) = match fields.len() {
                5 => (fields[0], GridCode::parse(fields[1]), &fields[2..5]),
                n if n >= 9 => {
                    let col = fields[2]
                        .parse::<u8>()
                        .map_err(|_| perr(line_no, format!("bad column {:?}", fields[2])));
                    let grid = col.and_then(|c| {
                        let row = fields[1].chars().next().unwrap_or(' ');
                        GridCode::new(row, c).map_err(|e| perr(line_no, e.to_string()))
                    })?;
                    (fields[0], Ok(grid), &fields[6..9])
                }
                n => {
                    return Err(perr(
                        line_no,
                        format!("expected 5 tab-separated fields, found {n}"),
                    ))
                }
            };
            let id: u32 = id
                .parse()
                .map_err(|_| perr(line_no, format!("bad chip number {id:?}")))?;
            let grid = grid.map_err(|e| perr(line_no, e.to_string()))?;
            let mut coords = [0.0; 3];
            for (slot, s) in coords.iter_mut().zip(lab) {
                *slot = s
                    .parse()
                    .map_err(|_| perr(line_no, format!("bad CIELAB value {s:?}")))?;
            }
            chips.push(Chip {
                id,
                grid,
                lab: coords,
            });
        }
        if chips.is_empty() {
            return Err(perr(0, "no chip rows".into()));
        }
        Self::new(chips)
    }

    /// Checks the full 330-chip grid: 10 achromatic chips in column 0 and
    /// 320 chromatic chips on rows B–I.
    pub fn validate_full_grid(&self) -> Result<()> {
        if self.len() != WCS_CHIP_COUNT {
            return Err(Error::Data(format!(
                "expected {WCS_CHIP_COUNT} chips, found {}",
                self.len()
            )));
        }
        let achromatic = self.chips.iter().filter(|c| c.grid.is_achromatic()).count();
        if achromatic != GRID_ROWS {
            return Err(Error::Data(format!(
                "expected {GRID_ROWS} achromatic chips, found {achromatic}"
            )));
        }
        if let Some(c) = self
            .chips
            .iter()
            .find(|c| !c.grid.is_achromatic() && (c.grid.row == 0 || c.grid.row == 9))
        {
            return Err(Error::Data(format!(
                "rows A and J hold only achromatic chips; chip {} at {}",
                c.id, c.grid
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[Chip] {
        &self.chips
    }

    pub fn get(&self, id: u32) -> Option<&Chip> {
        (id as usize)
            .checked_sub(1)
            .and_then(|i| self.chips.get(i))
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.get(id).map(|_| id as usize - 1)
    }

    pub fn labs(&self) -> Vec<[f64; 3]> {
        self.chips.iter().map(|c| c.lab).collect()
    }

    /// Normalized table in the 5-column layout accepted by [`ChipTable::load`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#chip\tgrid\tL\ta\tb\n");
        for c in &self.chips {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                c.id, c.grid, c.lab[0], c.lab[1], c.lab[2]
            ));
        }
        out
    }

    /// Chip table CSV (`chip_id,row,col,L,a,b`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("chip_id,row,col,L,a,b\n");
        for c in &self.chips {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.id,
                c.grid.row_letter(),
                c.grid.col,
                c.lab[0],
                c.lab[1],
                c.lab[2]
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ChipTable> {
        ChipTable::parse(text, Path::new("chips.txt"))
    }

    #[test]
    fn parses_five_column_rows() {
        let t = parse("#chip\tgrid\tL\ta\tb\n1\tA0\t96\t0\t0\n2\tC4\t80.5\t41.6\t16.8\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get(2).unwrap().grid.to_string(), "C4");
        assert_eq!(t.get(2).unwrap().lab, [80.5, 41.6, 16.8]);
        assert!(t.get(0).is_none());
        assert!(t.get(3).is_none());
    }

    #[test]
    fn parses_wcs_lab_layout() {
        let t = parse("#cnum\tV\tH\tC\tMunH\tMunV\tL*\ta*\tb*\n1\tF\t17\t12\t2.5G\t5\t51.57\t-44.26\t18.42\n")
            .unwrap();
        let c = t.get(1).unwrap();
        assert_eq!(c.grid, GridCode::new('F', 17).unwrap());
        assert_eq!(c.lab, [51.57, -44.26, 18.42]);
    }

    #[test]
    fn empty_file_is_parse_error() {
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
        assert!(matches!(parse("# header only\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn malformed_row_names_line() {
        let err = parse("1\tA0\t96\t0\t0\n2\tB1\t80\tx\t1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        let err = parse("1\tA0\t96\t0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn duplicate_chip_is_data_error() {
        let mut text = String::new();
        for id in 1..=8u32 {
            text.push_str(&format!("{id}\tB{id}\t50\t1\t2\n"));
        }
        text.push_str("7\tC3\t40\t1\t2\n");
        assert!(matches!(parse(&text), Err(Error::Data(_))));
    }

    #[test]
    fn gap_in_ids_rejected() {
        assert!(matches!(
            parse("1\tA0\t96\t0\t0\n3\tB1\t80\t1\t1\n"),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn grid_code_bounds() {
        assert!(GridCode::parse("K1").is_err());
        assert!(GridCode::parse("B41").is_err());
        assert!(GridCode::parse("b40").is_ok());
    }

    #[test]
    fn tsv_round_trip() {
        let t = parse("1\tA0\t96.123\t-0.5\t0.25\n2\tB1\t80\t1e-3\t1\n").unwrap();
        assert_eq!(parse(&t.to_tsv()).unwrap(), t);
    }
}
