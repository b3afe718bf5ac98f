//! Flat `key = value` configuration with `[section]` headers.
//!
//! ```text
//! [scenario]
//! id = ex3e
//! n = 50
//! order = 2
//!
//! [output]
//! snapshot_every = 707
//! ```
//!
//! `#` and `;` start comments. Keys before the first header live in section
//! `""`. Unknown sections or keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scenarios::{Gaussian, Physics, ScenarioConfig, ScenarioKind};
use crate::scheme::Order;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IniDoc {
    entries: BTreeMap<(String, String), (String, usize)>,
    path: PathBuf,
}

impl IniDoc {
    pub fn parse(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let err = |line: usize, message: String| Error::Parse { path: path.clone(), line, message };
        let mut section = String::new();
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, format!("unterminated section header `{line}`")))?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(err(line_no, "empty key".into()));
            }
            let value = value.trim().trim_matches('"').to_string();
            if entries.insert((section.clone(), key.clone()), (value, line_no)).is_some() {
                return Err(err(line_no, format!("duplicate key `{key}` in [{section}]")));
            }
        }
        Ok(Self { entries, path })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text, path)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(&(section.to_string(), key.to_string())).map(|(v, _)| v.as_str())
    }

    fn typed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        let Some((raw, line)) = self.entries.get(&(section.to_string(), key.to_string())) else {
            return Ok(None);
        };
        raw.parse().map(Some).map_err(|_| Error::Parse {
            path: self.path.clone(),
            line: *line,
            message: format!("cannot parse `{raw}` for [{section}] {key}"),
        })
    }

    fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        let Some((raw, line)) = self.entries.get(&(section.to_string(), key.to_string())) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| Error::Parse {
                    path: self.path.clone(),
                    line: *line,
                    message: format!("cannot parse list item `{s}` for [{section}] {key}"),
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn check_known(&self, known: &[(&str, &[&str])]) -> Result<()> {
        for ((section, key), (_, line)) in &self.entries {
            let ok = known.iter().any(|(s, keys)| s == section && keys.contains(&key.as_str()));
            if !ok {
                return Err(Error::Parse {
                    path: self.path.clone(),
                    line: *line,
                    message: format!("unknown key `{key}` in [{section}]"),
                });
            }
        }
        Ok(())
    }
}

/// Resolved command-line configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    /// Write a VTK snapshot every this many steps (step 0 included).
    pub snapshot_every: Option<usize>,
    pub out_dir: PathBuf,
    pub deterministic: bool,
    pub eoc_ns: Vec<usize>,
    pub eoc_orders: Vec<Order>,
    pub c0_values: Vec<f64>,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("scenario", &["id", "n", "mesh", "order", "c0", "dt", "t_final", "perturbation", "open"]),
    ("physics", &["rho", "mu", "g", "zeta"]),
    ("initial", &["amplitude", "center_x", "center_y", "rate"]),
    ("output", &["out_dir", "snapshot_every"]),
    ("run", &["deterministic", "seed"]),
    ("eoc", &["n_list", "orders"]),
    ("sweep", &["c0_values"]),
];

impl RunConfig {
    pub fn from_doc(doc: &IniDoc) -> Result<Self> {
        doc.check_known(KNOWN)?;
        let id = doc
            .get("scenario", "id")
            .ok_or_else(|| Error::Input("[scenario] id is required".into()))?;
        let mut kind = ScenarioKind::parse(id)?;
        if let Some(open) = doc.list::<u8>("scenario", "open")? {
            let ScenarioKind::Bay { open: ref mut mask, .. } = kind else {
                return Err(Error::Input("[scenario] open applies to bay scenarios only".into()));
            };
            *mask = [false; 3];
            for label in open {
                if !(1..=3).contains(&label) {
                    return Err(Error::Input(format!("open segment {label} outside 1..=3")));
                }
                mask[label as usize - 1] = true;
            }
        }
        let mut sc = ScenarioConfig::new(kind);
        if let Some(n) = doc.typed("scenario", "n")? {
            sc.n = n;
        }
        sc.mesh_path = doc.get("scenario", "mesh").map(PathBuf::from);
        if let Some(k) = doc.typed::<u32>("scenario", "order")? {
            sc.order = Order::from_int(k)?;
        }
        sc.c0 = doc.typed("scenario", "c0")?;
        sc.dt = doc.typed("scenario", "dt")?;
        sc.t_final = doc.typed("scenario", "t_final")?;
        sc.perturbation = doc.typed("scenario", "perturbation")?;
        sc.seed = doc.typed("run", "seed")?.unwrap_or(0);

        let physics = [
            doc.typed("physics", "rho")?,
            doc.typed("physics", "mu")?,
            doc.typed("physics", "g")?,
            doc.typed("physics", "zeta")?,
        ];
        if physics.iter().any(Option::is_some) {
            let [rho, mu, g, zeta] = physics.map(|v| v.unwrap_or(1.0));
            sc.physics = Some(Physics { rho, mu, g, zeta });
        }
        if let Some(amplitude) = doc.typed("initial", "amplitude")? {
            sc.gaussian = Some(Gaussian {
                amplitude,
                center: [
                    doc.typed("initial", "center_x")?.unwrap_or(0.0),
                    doc.typed("initial", "center_y")?.unwrap_or(0.0),
                ],
                rate: doc.typed("initial", "rate")?.unwrap_or(1.0),
            });
        }

        let snapshot_every: Option<usize> = doc.typed("output", "snapshot_every")?;
        if snapshot_every == Some(0) {
            return Err(Error::Input("snapshot_every must be positive".into()));
        }
        let eoc_orders = match doc.list::<u32>("eoc", "orders")? {
            Some(v) => v.into_iter().map(Order::from_int).collect::<Result<_>>()?,
            None => vec![Order::First, Order::Second],
        };
        Ok(Self {
            scenario: sc,
            snapshot_every,
            out_dir: doc.get("output", "out_dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
            deterministic: doc.typed("run", "deterministic")?.unwrap_or(false),
            eoc_ns: doc.list("eoc", "n_list")?.unwrap_or_else(|| vec![8, 16, 32, 64]),
            eoc_orders,
            c0_values: doc
                .list("sweep", "c0_values")?
                .unwrap_or_else(|| vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2]),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_doc(&IniDoc::load(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::DropCase;

    #[test]
    fn sections_and_comments() {
        let doc = IniDoc::parse("top = 1\n[Scenario]\n id = ex3e # trailing\n; note\n n=50\n", "x.ini").unwrap();
        assert_eq!(doc.get("", "top"), Some("1"));
        assert_eq!(doc.get("scenario", "id"), Some("ex3e"));
        assert_eq!(doc.get("scenario", "n"), Some("50"));
    }

    #[test]
    fn parse_errors_carry_line() {
        match IniDoc::parse("[a]\nb\n", "cfg") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(IniDoc::parse("[a\n", "cfg").is_err());
        assert!(IniDoc::parse("[a]\nk=1\nk=2\n", "cfg").is_err());
    }

    #[test]
    fn run_config_defaults_and_overrides() {
        let doc = IniDoc::parse("[scenario]\nid=ex3e\nn=50\norder=1\n[output]\nsnapshot_every=707\n", "c").unwrap();
        let rc = RunConfig::from_doc(&doc).unwrap();
        assert_eq!(rc.scenario.kind, ScenarioKind::Ex3(DropCase::E));
        assert_eq!(rc.scenario.n, 50);
        assert_eq!(rc.scenario.order, Order::First);
        assert_eq!(rc.snapshot_every, Some(707));
        assert!(!rc.deterministic);
        assert_eq!(rc.eoc_ns, vec![8, 16, 32, 64]);
        assert_eq!(rc.c0_values.len(), 8);
    }

    #[test]
    fn bay_open_segments() {
        let doc = IniDoc::parse("[scenario]\nid=bay\nopen=2\n", "c").unwrap();
        let rc = RunConfig::from_doc(&doc).unwrap();
        assert_eq!(rc.scenario.kind, ScenarioKind::Bay { extended: false, open: [false, true, false] });
        let none = IniDoc::parse("[scenario]\nid=bay\nopen=\n", "c").unwrap();
        let rc = RunConfig::from_doc(&none).unwrap();
        assert_eq!(rc.scenario.kind, ScenarioKind::Bay { extended: false, open: [false; 3] });
        let bad = IniDoc::parse("[scenario]\nid=ex1\nopen=1\n", "c").unwrap();
        assert!(RunConfig::from_doc(&bad).is_err());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let unknown = IniDoc::parse("[scenario]\nid=ex1\ncolour=red\n", "c").unwrap();
        assert!(matches!(RunConfig::from_doc(&unknown), Err(Error::Parse { line: 3, .. })));
        let bad = IniDoc::parse("[scenario]\nid=ex1\nn=eight\n", "c").unwrap();
        assert!(matches!(RunConfig::from_doc(&bad), Err(Error::Parse { .. })));
        let missing = IniDoc::parse("[scenario]\nn=8\n", "c").unwrap();
        assert!(matches!(RunConfig::from_doc(&missing), Err(Error::Input(_))));
        let order = IniDoc::parse("[scenario]\nid=ex1\norder=3\n", "c").unwrap();
        assert!(RunConfig::from_doc(&order).is_err());
    }
}
