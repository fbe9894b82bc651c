//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown or repeated
//! keys are errors, reported with their line number.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{default_stroke, MechanismParams, StiffnessCoeffs, StrokeLimits, Variant};
use crate::parasitic::DEFAULT_STEPS;
use crate::sweep::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Machine used by single-machine commands.
    pub variant: Variant,
    pub r_base: f64,
    pub r_platform: f64,
    pub link_length: f64,
    pub stiffness: StiffnessCoeffs,
    pub stroke_z3: Option<StrokeLimits>,
    pub stroke_a3: Option<StrokeLimits>,
    pub grid_n: usize,
    pub grid_range_deg: f64,
    /// Platform height; the home height when absent.
    pub z: Option<f64>,
    /// Workspace inclusion threshold on `1/kappa`.
    pub kappa_min_inv: f64,
    pub integration_steps: usize,
    /// Heights of the workspace slices, as offsets from `z` (mm).
    pub workspace_dz: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            variant: Variant::Z3Prs,
            r_base: MechanismParams::TABLE_R_BASE,
            r_platform: MechanismParams::TABLE_R_PLATFORM,
            link_length: MechanismParams::TABLE_LINK_LENGTH,
            stiffness: StiffnessCoeffs::default(),
            stroke_z3: None,
            stroke_a3: None,
            grid_n: 121,
            grid_range_deg: 40.0,
            z: None,
            kappa_min_inv: 0.05,
            integration_steps: DEFAULT_STEPS,
            workspace_dz: vec![0.0, -50.0, -100.0],
        }
    }
}

const KEYS: &[&str] = &[
    "variant",
    "r_base_mm",
    "r_platform_mm",
    "link_length_mm",
    "k_carriage",
    "k_revolute",
    "k_limb_body",
    "k_sx",
    "k_sy",
    "k_sz",
    "stroke_z3_min_mm",
    "stroke_z3_max_mm",
    "stroke_a3_min_mm",
    "stroke_a3_max_mm",
    "grid_n",
    "grid_range_deg",
    "z_mm",
    "kappa_min_inv",
    "integration_steps",
    "workspace_dz_mm",
];

fn config_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| config_err(line, key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(config_err(line, key, "value must be finite"));
    }
    Ok(v)
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| config_err(line, key, format!("`{value}` is not a non-negative integer")))
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            config_err(0, "<file>", format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut stroke = [[None::<(usize, f64)>; 2]; 2];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, content, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| config_err(line, key, "unknown key"))?;
            if seen.contains(known) {
                return Err(config_err(line, key, "key given twice"));
            }
            seen.push(known);
            match key {
                "variant" => cfg.variant = value.parse().map_err(|e: String| config_err(line, key, e))?,
                "r_base_mm" => cfg.r_base = parse_f64(line, key, value)?,
                "r_platform_mm" => cfg.r_platform = parse_f64(line, key, value)?,
                "link_length_mm" => cfg.link_length = parse_f64(line, key, value)?,
                "k_carriage" => cfg.stiffness.k_carriage = parse_f64(line, key, value)?,
                "k_revolute" => cfg.stiffness.k_revolute = parse_f64(line, key, value)?,
                "k_limb_body" => cfg.stiffness.k_limb_body = parse_f64(line, key, value)?,
                "k_sx" => cfg.stiffness.k_sx = parse_f64(line, key, value)?,
                "k_sy" => cfg.stiffness.k_sy = parse_f64(line, key, value)?,
                "k_sz" => cfg.stiffness.k_sz = parse_f64(line, key, value)?,
                "stroke_z3_min_mm" => stroke[0][0] = Some((line, parse_f64(line, key, value)?)),
                "stroke_z3_max_mm" => stroke[0][1] = Some((line, parse_f64(line, key, value)?)),
                "stroke_a3_min_mm" => stroke[1][0] = Some((line, parse_f64(line, key, value)?)),
                "stroke_a3_max_mm" => stroke[1][1] = Some((line, parse_f64(line, key, value)?)),
                "grid_n" => {
                    cfg.grid_n = parse_usize(line, key, value)?;
                    if cfg.grid_n == 0 {
                        return Err(config_err(line, key, "grid needs at least one point"));
                    }
                }
                "grid_range_deg" => {
                    cfg.grid_range_deg = parse_f64(line, key, value)?;
                    if !(cfg.grid_range_deg > 0.0 && cfg.grid_range_deg <= 60.0) {
                        return Err(config_err(line, key, "range must lie in (0, 60] degrees"));
                    }
                }
                "z_mm" => cfg.z = Some(parse_f64(line, key, value)?),
                "kappa_min_inv" => {
                    cfg.kappa_min_inv = parse_f64(line, key, value)?;
                    if !(cfg.kappa_min_inv > 0.0 && cfg.kappa_min_inv < 1.0) {
                        return Err(config_err(line, key, "threshold must lie in (0, 1)"));
                    }
                }
                "integration_steps" => {
                    cfg.integration_steps = parse_usize(line, key, value)?;
                    if cfg.integration_steps == 0 {
                        return Err(config_err(line, key, "need at least one step"));
                    }
                }
                "workspace_dz_mm" => {
                    cfg.workspace_dz = value
                        .split(',')
                        .map(|v| parse_f64(line, key, v.trim()))
                        .collect::<Result<_>>()?;
                    if cfg.workspace_dz.is_empty() {
                        return Err(config_err(line, key, "need at least one slice"));
                    }
                }
                _ => unreachable!("key list and match arms agree"),
            }
        }
        for (m, name) in ["z3", "a3"].iter().enumerate() {
            let slot = match m {
                0 => &mut cfg.stroke_z3,
                _ => &mut cfg.stroke_a3,
            };
            match stroke[m] {
                [None, None] => {}
                [Some((lmin, min)), Some((_, max))] => {
                    if min > max {
                        return Err(config_err(lmin, &format!("stroke_{name}_min_mm"), "min exceeds max"));
                    }
                    *slot = Some(StrokeLimits { min, max });
                }
                [Some((line, _)), None] | [None, Some((line, _))] => {
                    return Err(config_err(line, &format!("stroke_{name}_*"), "give both min and max"));
                }
            }
        }
        cfg.params(Variant::Z3Prs)
            .map_err(|e| config_err(0, "geometry", e.to_string()))?;
        Ok(cfg)
    }

    /// Parameters for one machine; both machines share geometry and coefficients.
    pub fn params(&self, variant: Variant) -> Result<MechanismParams> {
        let stroke = match variant {
            Variant::Z3Prs => self.stroke_z3,
            Variant::A3Rps => self.stroke_a3,
        }
        .unwrap_or_else(|| default_stroke(variant, self.link_length));
        let params = MechanismParams::new(variant, self.r_base, self.r_platform, self.link_length, self.stiffness)?
            .with_stroke(stroke);
        params.validate()?;
        Ok(params)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::square_deg(self.grid_n, self.grid_range_deg)
    }

    /// Analysis height: `z_mm` when given, otherwise the home height.
    pub fn height(&self) -> Result<f64> {
        match self.z {
            Some(z) => Ok(z),
            None => Ok(self.params(self.variant)?.home_height()),
        }
    }

    /// Render as a config file that parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let k = &self.stiffness;
        let _ = writeln!(s, "variant = {}", self.variant.short_name());
        let _ = writeln!(s, "r_base_mm = {}", self.r_base);
        let _ = writeln!(s, "r_platform_mm = {}", self.r_platform);
        let _ = writeln!(s, "link_length_mm = {}", self.link_length);
        for (name, v) in [
            ("k_carriage", k.k_carriage),
            ("k_revolute", k.k_revolute),
            ("k_limb_body", k.k_limb_body),
            ("k_sx", k.k_sx),
            ("k_sy", k.k_sy),
            ("k_sz", k.k_sz),
        ] {
            let _ = writeln!(s, "{name} = {v:e}");
        }
        for (name, stroke) in [("z3", self.stroke_z3), ("a3", self.stroke_a3)] {
            if let Some(st) = stroke {
                let _ = writeln!(s, "stroke_{name}_min_mm = {}", st.min);
                let _ = writeln!(s, "stroke_{name}_max_mm = {}", st.max);
            }
        }
        let _ = writeln!(s, "grid_n = {}", self.grid_n);
        let _ = writeln!(s, "grid_range_deg = {}", self.grid_range_deg);
        if let Some(z) = self.z {
            let _ = writeln!(s, "z_mm = {z}");
        }
        let _ = writeln!(s, "kappa_min_inv = {}", self.kappa_min_inv);
        let _ = writeln!(s, "integration_steps = {}", self.integration_steps);
        let dz: Vec<String> = self.workspace_dz.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "workspace_dz_mm = {}", dz.join(", "));
        s
    }
}
