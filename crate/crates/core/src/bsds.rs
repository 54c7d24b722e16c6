//! Berkeley segmentation ground truth (`.seg`, ASCII variant) and
//! tab-separated dataset manifests.
//!
//! A `.seg` file is a header of `key value` lines terminated by a line
//! reading `data`, followed by runs `label row first_col last_col` (columns
//! inclusive). Runs must cover every pixel exactly once.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::image::Mask;

/// Upper bound on `width × height` accepted from a header.
const MAX_PIXELS: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelGrid {
    pub labels: Grid<u32>,
    pub segment_count: u32,
}

impl LabelGrid {
    pub fn width(&self) -> usize {
        self.labels.width()
    }

    pub fn height(&self) -> usize {
        self.labels.height()
    }
}

fn parse_header_value(value: Option<&str>, key: &str, line: usize) -> Result<usize> {
    value
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| Error::seg(line, format!("invalid value for '{key}'")))
}

pub fn parse_seg(text: &str) -> Result<LabelGrid> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (mut format, mut width, mut height, mut segments) = (None, None, None, None);
    let mut saw_data = false;
    let mut last_line = 0;
    for (no, line) in lines.by_ref() {
        last_line = no;
        if line.is_empty() {
            continue;
        }
        if line == "data" {
            saw_data = true;
            break;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let value = parts.next();
        match key {
            "format" => {
                let v = value.ok_or_else(|| Error::seg(no, "missing value for 'format'"))?;
                if v != "ascii" {
                    return Err(Error::seg(no, format!("unsupported format '{v}'")));
                }
                format = Some(v);
            }
            "width" => width = Some(parse_header_value(value, key, no)?),
            "height" => height = Some(parse_header_value(value, key, no)?),
            "segments" => segments = Some(parse_header_value(value, key, no)?),
            _ => {}
        }
    }
    if !saw_data {
        return Err(Error::seg(last_line + 1, "missing 'data' line"));
    }
    let missing = |k: &str| Error::seg(last_line, format!("missing header key '{k}'"));
    format.ok_or_else(|| missing("format"))?;
    let width = width.ok_or_else(|| missing("width"))?;
    let height = height.ok_or_else(|| missing("height"))?;
    let segments = segments.ok_or_else(|| missing("segments"))?;
    if width == 0 || height == 0 {
        return Err(Error::seg(last_line, "zero dimension"));
    }
    if width.checked_mul(height).is_none_or(|n| n > MAX_PIXELS) {
        return Err(Error::seg(last_line, "image too large"));
    }
    let segment_count = u32::try_from(segments)
        .map_err(|_| Error::seg(last_line, "too many segments"))?;

    let mut cells: Vec<Option<u32>> = vec![None; width * height];
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::seg(no, "expected 4 fields in run"));
        }
        let mut nums = [0usize; 4];
        for (n, f) in nums.iter_mut().zip(&fields) {
            *n = f
                .parse()
                .map_err(|_| Error::seg(no, format!("invalid number '{f}'")))?;
        }
        let [label, row, c1, c2] = nums;
        if label >= segments {
            return Err(Error::seg(no, format!("label {label} >= segments {segments}")));
        }
        if row >= height || c1 > c2 || c2 >= width {
            return Err(Error::seg(no, "run outside image"));
        }
        for cell in &mut cells[row * width + c1..=row * width + c2] {
            if cell.is_some() {
                return Err(Error::seg(no, "overlap"));
            }
            *cell = Some(label as u32);
        }
    }
    let labels = cells
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                Error::seg(
                    last_line,
                    format!("uncovered pixel (row {}, col {})", i / width, i % width),
                )
            })
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(LabelGrid {
        labels: Grid::from_vec(width, height, labels)?,
        segment_count,
    })
}

/// Serializes back to `.seg` text with maximal runs per row.
pub fn to_seg_string(grid: &LabelGrid) -> String {
    let mut out = format!(
        "format ascii cr\nwidth {}\nheight {}\nsegments {}\ndata\n",
        grid.width(),
        grid.height(),
        grid.segment_count
    );
    for y in 0..grid.height() {
        let mut x = 0;
        while x < grid.width() {
            let l = *grid.labels.get(x, y);
            let start = x;
            while x + 1 < grid.width() && *grid.labels.get(x + 1, y) == l {
                x += 1;
            }
            out.push_str(&format!("{l} {y} {start} {x}\n"));
            x += 1;
        }
    }
    out
}

/// Pixels with a 4-neighbor carrying a different label. Both sides of every
/// label change are marked.
pub fn boundary_mask(grid: &LabelGrid) -> Mask {
    let g = &grid.labels;
    let (w, h) = (g.width(), g.height());
    Grid::from_fn(w, h, |x, y| {
        let l = *g.get(x, y);
        (x > 0 && *g.get(x - 1, y) != l)
            || (x + 1 < w && *g.get(x + 1, y) != l)
            || (y > 0 && *g.get(x, y - 1) != l)
            || (y + 1 < h && *g.get(x, y + 1) != l)
    })
}

fn manifest_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Parses `image<TAB>ground_truth` lines; relative paths are resolved
/// against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    manifest_lines(text)
        .map(|(no, fields)| {
            if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::Manifest {
                    line: no,
                    reason: "expected 2 fields".into(),
                });
            }
            Ok((resolve(base, fields[0]), resolve(base, fields[1])))
        })
        .collect()
}

fn manifest_base(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn load_manifest(path: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text, &manifest_base(path))
}

/// Image list for batch detection: the first column of each line, with an
/// optional second (ground-truth) column ignored.
pub fn load_image_list(path: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(path)?;
    let base = manifest_base(path);
    manifest_lines(&text)
        .map(|(no, fields)| {
            if fields.is_empty() || fields.len() > 2 || fields[0].is_empty() {
                return Err(Error::Manifest {
                    line: no,
                    reason: "expected 1 or 2 fields".into(),
                });
            }
            Ok(resolve(&base, fields[0]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const EXAMPLE: &str =
        "format ascii cr\ndate today\nwidth 3\nheight 2\nsegments 2\ndata\n0 0 0 1\n1 0 2 2\n0 1 0 2\n";

    #[test]
    fn worked_example() {
        let g = parse_seg(EXAMPLE).unwrap();
        assert_eq!(g.labels.as_slice(), &[0, 0, 1, 0, 0, 0]);
        assert_eq!(g.segment_count, 2);
        let m = boundary_mask(&g);
        let marked: Vec<(usize, usize)> = (0..2)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .filter(|&(r, c)| *m.get(c, r))
            .collect();
        assert_eq!(marked, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn overlap_reports_line() {
        let text = EXAMPLE.replace("1 0 2 2\n", "1 0 1 2\n");
        let err = parse_seg(&text).unwrap_err();
        assert_eq!(err.to_string(), "seg parse error: overlap at line 8");
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_seg("width 3\nheight 2\nsegments 1\ndata\n"), Err(Error::Seg { .. })));
        let uncovered = EXAMPLE.replace("0 1 0 2\n", "0 1 0 1\n");
        assert!(parse_seg(&uncovered).unwrap_err().to_string().contains("uncovered"));
        let bad_label = EXAMPLE.replace("1 0 2 2", "2 0 2 2");
        assert!(matches!(parse_seg(&bad_label), Err(Error::Seg { line: 8, .. })));
        assert!(parse_seg(&EXAMPLE.replace("\ndata\n", "\n")).is_err());
    }

    #[test]
    fn single_pixel() {
        let g = parse_seg("format ascii cr\nwidth 1\nheight 1\nsegments 1\ndata\n0 0 0 0\n").unwrap();
        assert_eq!(g.labels.as_slice(), &[0]);
        assert!(boundary_mask(&g).iter().all(|&m| !m));
    }

    #[test]
    fn vertical_split() {
        let labels = Grid::from_fn(4, 4, |x, _| u32::from(x >= 2));
        let m = boundary_mask(&LabelGrid { labels, segment_count: 2 });
        for y in 0..4 {
            let row: Vec<bool> = (0..4).map(|x| *m.get(x, y)).collect();
            assert_eq!(row, vec![false, true, true, false]);
        }
    }

    #[test]
    fn manifest_parsing() {
        let base = Path::new("/data");
        let pairs = parse_manifest("# comment\n\na.ppm\ta_gt.pgm\n/abs/b.ppm\tb.seg\n", base).unwrap();
        assert_eq!(
            pairs,
            vec![
                (PathBuf::from("/data/a.ppm"), PathBuf::from("/data/a_gt.pgm")),
                (PathBuf::from("/abs/b.ppm"), PathBuf::from("/data/b.seg")),
            ]
        );
        let err = parse_manifest("a\tb\nx\ty\tz\n", base).unwrap_err();
        assert_eq!(err.to_string(), "manifest error: expected 2 fields, line 2");
    }

    fn label_grid() -> impl Strategy<Value = LabelGrid> {
        (1usize..6, 1usize..6, 1u32..4).prop_flat_map(|(w, h, s)| {
            prop::collection::vec(0..s, w * h).prop_map(move |v| LabelGrid {
                labels: Grid::from_vec(w, h, v).unwrap(),
                segment_count: s,
            })
        })
    }

    proptest! {
        #[test]
        fn seg_roundtrip(g in label_grid()) {
            prop_assert_eq!(parse_seg(&to_seg_string(&g)).unwrap(), g);
        }

        #[test]
        fn boundary_is_symmetric(g in label_grid()) {
            let m = boundary_mask(&g);
            let (w, h) = (g.width(), g.height());
            for y in 0..h {
                for x in 0..w {
                    let l = *g.labels.get(x, y);
                    for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                        if nx < w && ny < h && *g.labels.get(nx, ny) != l {
                            prop_assert!(*m.get(x, y) && *m.get(nx, ny));
                        }
                    }
                }
            }
        }

        #[test]
        fn parser_never_panics(idx in 0usize..70, byte in any::<u8>()) {
            let mut bytes = EXAMPLE.as_bytes().to_vec();
            let i = idx % bytes.len();
            bytes[i] = byte;
            let _ = parse_seg(&String::from_utf8_lossy(&bytes));
        }
    }
}
