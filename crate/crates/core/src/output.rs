//! CSV tables and SVG heatmaps.
//!
//! Numbers are written with 12 significant digits; missing values are empty
//! fields. Files use LF line endings.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::parasitic::ParasiticMaps;
use crate::stiffness::{StiffnessSample, MEASURES};
use crate::sweep::{SweepGrid, WorkspaceSlice};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest decimal text for `x` rounded to 12 significant digits, in
/// exponent form outside `[1e-5, 1e15)`.
///
/// Parsing the output and formatting again yields the same bytes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    let magnitude = rounded.abs();
    if (1e-5..1e15).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// A header plus rows of optional numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(fmt_sig).unwrap_or_default()))?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_bytes()?)?;
        Ok(())
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(reader);
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    if field.is_empty() {
                        Ok(None)
                    } else {
                        field.parse::<f64>().map(Some).map_err(|_| {
                            Error::Io(std::io::Error::new(
                                std::io::ErrorKind::InvalidData,
                                format!("`{field}` is not a number"),
                            ))
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }
}

fn deg(v: f64) -> Option<f64> {
    Some(v.to_degrees())
}

/// `psi_deg,theta_deg,<name>` for one or more fields on the same grid.
pub fn grid_table(fields: &[&SweepGrid]) -> Table {
    let first = fields[0];
    let mut header = vec!["psi_deg", "theta_deg"];
    header.extend(fields.iter().map(|f| f.name.as_str()));
    let mut table = Table::new(&header);
    for (i, &psi) in first.psi_axis.iter().enumerate() {
        for (j, &theta) in first.theta_axis.iter().enumerate() {
            let mut row = vec![deg(psi), deg(theta)];
            row.extend(fields.iter().map(|f| f.get(i, j)));
            table.push(row);
        }
    }
    table
}

/// `psi_deg,theta_deg,x_mm,y_mm,gamma_rad`.
pub fn parasitic_table(maps: &ParasiticMaps) -> Table {
    grid_table(&[&maps.x, &maps.y, &maps.gamma])
}

/// `psi_deg,theta_deg,kappa`.
pub fn condition_table(kappa: &SweepGrid) -> Table {
    let mut t = grid_table(&[kappa]);
    t.header[2] = "kappa".to_string();
    t
}

/// `psi_deg,theta_deg,z_mm,inside`, slices stacked in the given order.
pub fn workspace_table(slices: &[WorkspaceSlice]) -> Table {
    let mut table = Table::new(&["psi_deg", "theta_deg", "z_mm", "inside"]);
    for slice in slices {
        let g = &slice.inside;
        for (i, &psi) in g.psi_axis.iter().enumerate() {
            for (j, &theta) in g.theta_axis.iter().enumerate() {
                table.push(vec![deg(psi), deg(theta), Some(slice.z), g.get(i, j)]);
            }
        }
    }
    table
}

/// `psi_deg,theta_deg,x_par_mm,y_par_mm,kpx,...,kaz`.
///
/// Translational measures are in force per length of the coefficient units,
/// rotational ones in moment per radian (N/mm and N·mm/rad for coefficients
/// in N/mm). Cells whose pose failed are written with empty fields after the
/// tilt columns.
pub fn stiffness_table(spec_cells: &[(f64, f64)], samples: &[Option<StiffnessSample>]) -> Table {
    let mut header = vec!["psi_deg", "theta_deg", "x_par_mm", "y_par_mm"];
    header.extend(MEASURES);
    let mut table = Table::new(&header);
    for (&(psi, theta), sample) in spec_cells.iter().zip(samples) {
        let mut row = vec![deg(psi), deg(theta)];
        match sample {
            Some(s) => {
                row.push(Some(s.x_par));
                row.push(Some(s.y_par));
                row.extend(s.values.iter().map(|&v| Some(v)));
            }
            None => row.extend(std::iter::repeat_n(None, 8)),
        }
        table.push(row);
    }
    table
}

/// Colour scales for [`emit_heatmap_svg`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    /// Perceptually ordered dark-blue to yellow.
    Viridis,
    /// Blue-white-red, centred on zero.
    Diverging,
    /// Two colours for inside/outside masks.
    Binary,
}

impl Palette {
    fn stops(self) -> &'static [[u8; 3]] {
        match self {
            Palette::Viridis => &[
                [0x44, 0x01, 0x54],
                [0x3b, 0x52, 0x8b],
                [0x21, 0x91, 0x8c],
                [0x5e, 0xc9, 0x62],
                [0xfd, 0xe7, 0x25],
            ],
            Palette::Diverging => &[[0x21, 0x66, 0xac], [0xf7, 0xf7, 0xf7], [0xb2, 0x18, 0x2b]],
            Palette::Binary => &[[0xe0, 0xe0, 0xe0], [0x1b, 0x5e, 0x20]],
        }
    }

    /// Colour at `t` in `[0, 1]` as `#rrggbb`.
    pub fn color(self, t: f64) -> String {
        let stops = self.stops();
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
        let x = t * (stops.len() - 1) as f64;
        let k = (x.floor() as usize).min(stops.len() - 2);
        let f = x - k as f64;
        let mix = |c: usize| {
            let a = stops[k][c] as f64;
            let b = stops[k + 1][c] as f64;
            (a + (b - a) * f).round() as u8
        };
        format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
    }

    /// Value range mapped onto the palette ends.
    fn range(self, grid: &SweepGrid) -> Option<(f64, f64)> {
        let (lo, hi) = (grid.min()?, grid.max()?);
        Some(match self {
            Palette::Diverging => {
                let m = lo.abs().max(hi.abs());
                (-m, m)
            }
            Palette::Binary => (0.0, 1.0),
            Palette::Viridis => (lo, hi),
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const PLOT: f64 = 480.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const BAR_X: f64 = LEFT + PLOT + 30.0;
const BAR_W: f64 = 18.0;
const BAR_STEPS: usize = 64;

/// Heatmap document for `grid`: psi on the horizontal axis, theta upwards.
pub fn heatmap_svg(grid: &SweepGrid, palette: Palette) -> Result<String> {
    let (np, nt) = (grid.psi_axis.len(), grid.theta_axis.len());
    if np == 0 || nt == 0 {
        return Err(Error::InvalidParams("cannot draw an empty grid".into()));
    }
    let (cw, ch) = (PLOT / np as f64, PLOT / nt as f64);
    let range = palette.range(grid);
    let width = BAR_X + BAR_W + 90.0;
    let height = TOP + PLOT + 60.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str(
        "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\
<rect width=\"6\" height=\"6\" fill=\"#ffffff\"/><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#808080\" stroke-width=\"2\"/></pattern></defs>\n",
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + PLOT / 2.0,
        escape(&grid.name)
    );
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for i in 0..np {
        for j in 0..nt {
            let x = LEFT + i as f64 * cw;
            let y = TOP + (nt - 1 - j) as f64 * ch;
            let fill = match (grid.get(i, j), range) {
                (Some(v), Some((lo, hi))) => {
                    let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                    palette.color(t)
                }
                _ => "url(#hatch)".to_string(),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{x:.3}" y="{y:.3}" width="{cw:.3}" height="{ch:.3}" fill="{fill}"/>"#
            );
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#000000"/>"##
    );

    // Axis ticks at both ends and the middle of each axis.
    let tick = |axis: &[f64], k: usize| format!("{:.1}", axis[k].to_degrees());
    for k in [0, np / 2, np - 1] {
        let x = LEFT + (k as f64 + 0.5) * cw;
        let _ = writeln!(
            s,
            r#"<text x="{x:.3}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + PLOT + 16.0,
            tick(&grid.psi_axis, k)
        );
    }
    for k in [0, nt / 2, nt - 1] {
        let y = TOP + (nt - 1 - k) as f64 * ch + ch / 2.0 + 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.3}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            tick(&grid.theta_axis, k)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">psi (deg)</text>"#,
        LEFT + PLOT / 2.0,
        TOP + PLOT + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">theta (deg)</text>"#,
        TOP + PLOT / 2.0,
        TOP + PLOT / 2.0
    );

    // Colour bar, low values at the bottom.
    let step_h = PLOT / BAR_STEPS as f64;
    for k in 0..BAR_STEPS {
        let t = (k as f64 + 0.5) / BAR_STEPS as f64;
        let y = TOP + PLOT - (k + 1) as f64 * step_h;
        let _ = writeln!(
            s,
            r#"<rect x="{BAR_X}" y="{y:.3}" width="{BAR_W}" height="{step_h:.3}" fill="{}"/>"#,
            palette.color(t)
        );
    }
    let (lo_label, hi_label) = match range {
        Some((lo, hi)) => (fmt_sig(lo), fmt_sig(hi)),
        None => ("n/a".to_string(), "n/a".to_string()),
    };
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{hi_label}</text>"#, BAR_X + BAR_W + 4.0, TOP + 10.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{lo_label}</text>"#, BAR_X + BAR_W + 4.0, TOP + PLOT);
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_heatmap_svg(grid: &SweepGrid, palette: Palette, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, heatmap_svg(grid, palette)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::GridSpec;
    use proptest::prelude::*;

    fn grid(values: Vec<Option<f64>>) -> SweepGrid {
        SweepGrid::new("f", &GridSpec::square_deg(2, 10.0).unwrap(), values)
    }

    #[test]
    fn fmt_sig_rounds_to_twelve_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.5), "1.5");
        assert_eq!(fmt_sig(2f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_sig(-40.0), "-40");
        assert_eq!(fmt_sig(1e6 / 3.0), "333333.333333");
        assert_eq!(fmt_sig(2.2759572004812e-14), "2.27595720048e-14");
        assert_eq!(fmt_sig(9.375e16), "9.375e16");
    }

    #[test]
    fn csv_uses_lf_and_empty_missing_fields() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Some(1.0), None]);
        let bytes = t.to_csv_bytes().unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b\n1,\n");
    }

    #[test]
    fn two_by_two_maps_extremes_to_palette_ends() {
        let svg = heatmap_svg(&grid(vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]), Palette::Viridis).unwrap();
        let cells: Vec<&str> = svg.lines().filter(|l| l.contains(r#"height="240.000""#)).collect();
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().any(|l| l.contains("fill=\"#440154\"")));
        assert!(cells.iter().any(|l| l.contains("fill=\"#fde725\"")));
        assert!(svg.contains("psi (deg)") && svg.contains("theta (deg)"));
    }

    #[test]
    fn one_missing_cell_is_hatched_once() {
        let svg = heatmap_svg(&grid(vec![Some(1.0), None, Some(3.0), Some(4.0)]), Palette::Viridis).unwrap();
        assert_eq!(svg.matches("fill=\"url(#hatch)\"").count(), 1);
    }

    #[test]
    fn re_emit_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid(vec![Some(0.1), Some(-0.2), None, Some(0.4)]);
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        emit_heatmap_svg(&g, Palette::Diverging, &a).unwrap();
        emit_heatmap_svg(&g, Palette::Diverging, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_byte_stable(values in proptest::collection::vec(
            proptest::option::of(-1e9f64..1e9), 1..40)) {
            let mut t = Table::new(&["v"]);
            for v in &values {
                t.push(vec![*v]);
            }
            let bytes = t.to_csv_bytes().unwrap();
            let back = Table::from_csv_reader(bytes.as_slice()).unwrap();
            for (orig, parsed) in values.iter().zip(&back.rows) {
                match (orig, parsed[0]) {
                    (None, None) => {}
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1e-300)),
                    _ => prop_assert!(false, "missing mask changed"),
                }
            }
            prop_assert_eq!(back.to_csv_bytes().unwrap(), bytes);
        }
    }
}
