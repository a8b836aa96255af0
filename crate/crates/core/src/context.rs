//! Formal contexts, derivation operators and the context file formats.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// A formal context `(G, M, I)`.
///
/// Rows are stored both by object (attribute sets) and by attribute (object
/// sets) so that both derivation operators are word-parallel intersections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<BitSet>,
    columns: Vec<BitSet>,
}

/// JSON form of a context: `{objects, attributes, incidence}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContextJson {
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    pub incidence: Vec<Vec<bool>>,
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if incidence.len() != objects.len() {
            return Err(Error::InvalidContext(format!(
                "{} objects but {} incidence rows",
                objects.len(),
                incidence.len()
            )));
        }
        check_distinct(&objects, "object")?;
        check_distinct(&attributes, "attribute")?;
        let m = attributes.len();
        let mut rows = Vec::with_capacity(objects.len());
        let mut columns = vec![BitSet::new(objects.len()); m];
        for (g, row) in incidence.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidContext(format!(
                    "row {g} has {} entries, expected {m}",
                    row.len()
                )));
            }
            let mut bits = BitSet::new(m);
            for (j, &x) in row.iter().enumerate() {
                if x {
                    bits.insert(j);
                    columns[j].insert(g);
                }
            }
            rows.push(bits);
        }
        Ok(Self {
            objects,
            attributes,
            rows,
            columns,
        })
    }

    /// Builds a context from `(object, [attributes])` rows given by name.
    pub fn from_rows<S: AsRef<str>>(attributes: &[S], rows: &[(S, &[S])]) -> Result<Self> {
        let attributes: Vec<String> = attributes.iter().map(|a| a.as_ref().to_owned()).collect();
        let objects = rows.iter().map(|(g, _)| g.as_ref().to_owned()).collect();
        let incidence = rows
            .iter()
            .map(|(_, has)| {
                let has: Vec<&str> = has.iter().map(|s| s.as_ref()).collect();
                for h in &has {
                    if !attributes.iter().any(|a| a == h) {
                        return Err(Error::UnknownElement((*h).to_owned()));
                    }
                }
                Ok(attributes.iter().map(|a| has.contains(&a.as_str())).collect())
            })
            .collect::<Result<Vec<Vec<bool>>>>()?;
        Self::new(objects, attributes, incidence)
    }

    pub fn empty() -> Self {
        Self::new(vec![], vec![], vec![]).expect("empty context is valid")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn incident(&self, g: usize, m: usize) -> bool {
        self.rows[g].contains(m)
    }

    pub fn object_row(&self, g: usize) -> &BitSet {
        &self.rows[g]
    }

    pub fn attribute_column(&self, m: usize) -> &BitSet {
        &self.columns[m]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|g| g == name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|m| m == name)
    }

    pub fn object_set<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<BitSet> {
        let mut s = BitSet::new(self.num_objects());
        for n in names {
            s.insert(
                self.object_index(n)
                    .ok_or_else(|| Error::UnknownElement(n.to_owned()))?,
            );
        }
        Ok(s)
    }

    pub fn attribute_set<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<BitSet> {
        let mut s = BitSet::new(self.num_attributes());
        for n in names {
            s.insert(
                self.attribute_index(n)
                    .ok_or_else(|| Error::UnknownElement(n.to_owned()))?,
            );
        }
        Ok(s)
    }

    /// `A′`: the attributes shared by every object of `objects`.
    pub fn derive_objects(&self, objects: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.num_attributes());
        for g in objects.iter() {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    /// `B′`: the objects having every attribute of `attributes`.
    pub fn derive_attributes(&self, attributes: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.num_objects());
        for m in attributes.iter() {
            out.intersect_with(&self.columns[m]);
        }
        out
    }

    pub fn close_intent(&self, attributes: &BitSet) -> BitSet {
        self.derive_objects(&self.derive_attributes(attributes))
    }

    pub fn close_extent(&self, objects: &BitSet) -> BitSet {
        self.derive_attributes(&self.derive_objects(objects))
    }

    /// The dual context `(M, G, I⁻¹)`.
    pub fn transpose(&self) -> Self {
        let incidence = (0..self.num_attributes())
            .map(|m| (0..self.num_objects()).map(|g| self.incident(g, m)).collect())
            .collect();
        Self::new(self.attributes.clone(), self.objects.clone(), incidence)
            .expect("transpose of a valid context is valid")
    }

    pub fn to_json(&self) -> ContextJson {
        ContextJson {
            objects: self.objects.clone(),
            attributes: self.attributes.clone(),
            incidence: (0..self.num_objects())
                .map(|g| (0..self.num_attributes()).map(|m| self.incident(g, m)).collect())
                .collect(),
        }
    }

    pub fn from_json(json: ContextJson) -> Result<Self> {
        Self::new(json.objects, json.attributes, json.incidence)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        Self::from_json(serde_json::from_str(text)?)
    }

    /// Parses the Burmeister `.cxt` format. Accepts `x`/`X` crosses and CRLF.
    pub fn parse_cxt(text: &str) -> Result<Self> {
        let mut lines = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .enumerate()
            .map(|(i, l)| (i + 1, l));

        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
        };

        let (ln, header) = next("header")?;
        if header.trim() != "B" {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected header `B`, found `{header}`"),
            });
        }
        let mut count = |what: &str| -> Result<usize> {
            loop {
                let (ln, l) = next(what)?;
                if l.trim().is_empty() {
                    continue;
                }
                return l.trim().parse().map_err(|_| Error::Parse {
                    line: ln,
                    message: format!("expected {what}, found `{l}`"),
                });
            }
        };
        let g = count("object count")?;
        let m = count("attribute count")?;

        let mut first = true;
        let mut name = |what: &str| -> Result<String> {
            loop {
                let (_, l) = next(what)?;
                if first && l.trim().is_empty() {
                    continue;
                }
                first = false;
                return Ok(l.to_owned());
            }
        };
        let objects = (0..g).map(|_| name("object name")).collect::<Result<Vec<_>>>()?;
        let attributes = (0..m)
            .map(|_| name("attribute name"))
            .collect::<Result<Vec<_>>>()?;

        let mut incidence = Vec::with_capacity(g);
        for _ in 0..g {
            let (ln, row) = next("incidence row")?;
            let row = row.trim_end();
            if row.chars().count() != m {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("row has {} columns, expected {m}", row.chars().count()),
                });
            }
            let bits = row
                .chars()
                .map(|c| match c {
                    'x' | 'X' => Ok(true),
                    '.' => Ok(false),
                    other => Err(Error::Parse {
                        line: ln,
                        message: format!("unexpected character `{other}` in incidence row"),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            incidence.push(bits);
        }
        Self::new(objects, attributes, incidence)
    }

    /// Writes the Burmeister format: `B`, blank line, counts, names, rows.
    pub fn to_cxt(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "B\n\n{}\n{}\n", self.num_objects(), self.num_attributes());
        for g in &self.objects {
            out.push_str(g);
            out.push('\n');
        }
        for m in &self.attributes {
            out.push_str(m);
            out.push('\n');
        }
        for g in 0..self.num_objects() {
            for m in 0..self.num_attributes() {
                out.push(if self.incident(g, m) { 'X' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses either format, choosing by the first non-blank character.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_cxt(text)
        }
    }
}

fn check_distinct(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if !seen.insert(n) {
            return Err(Error::InvalidContext(format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::dwarf_planets;

    fn names(ctx: &FormalContext, s: &BitSet, objects: bool) -> Vec<String> {
        s.iter()
            .map(|i| {
                if objects {
                    ctx.objects()[i].clone()
                } else {
                    ctx.attributes()[i].clone()
                }
            })
            .collect()
    }

    #[test]
    fn derive_single_object() {
        let ctx = dwarf_planets();
        let a = ctx.object_set(["Ceres"]).unwrap();
        assert_eq!(
            names(&ctx, &ctx.derive_objects(&a), false),
            ["Non-Spherical", "Atmosphere"]
        );
    }

    #[test]
    fn derive_empty_sets() {
        let ctx = dwarf_planets();
        assert_eq!(ctx.derive_objects(&BitSet::new(5)).len(), 4);
        assert_eq!(ctx.derive_attributes(&BitSet::new(4)).len(), 5);
    }

    #[test]
    fn derive_pair_by_row_intersection() {
        let ctx = dwarf_planets();
        let a = ctx.object_set(["Makemake", "Eris"]).unwrap();
        // brute force: attributes m with every chosen object incident
        let expected: Vec<usize> = (0..4)
            .filter(|&m| a.iter().all(|g| ctx.incident(g, m)))
            .collect();
        let got: Vec<usize> = ctx.derive_objects(&a).iter().collect();
        assert_eq!(got, expected);
        assert_eq!(names(&ctx, &ctx.derive_objects(&a), false), ["Trans-Neptunian", "One Moon"]);
    }

    #[test]
    fn derive_attribute_column() {
        let ctx = dwarf_planets();
        let b = ctx.attribute_set(["Trans-Neptunian"]).unwrap();
        assert_eq!(
            names(&ctx, &ctx.derive_attributes(&b), true),
            ["Makemake", "Eris", "Heumea", "Pluto"]
        );
        assert!(ctx.derive_attributes(&BitSet::full(4)).is_empty());
    }

    #[test]
    fn cxt_roundtrip_and_tolerance() {
        let ctx = dwarf_planets();
        let text = ctx.to_cxt();
        assert!(text.starts_with("B\n\n5\n4\nCeres\n"));
        assert_eq!(FormalContext::parse_cxt(&text).unwrap(), ctx);

        let crlf = "B\r\n\r\n2\r\n2\r\n\r\ng1\r\ng2\r\nm1\r\nm2\r\nx.\r\n.X\r\n";
        let parsed = FormalContext::parse_cxt(crlf).unwrap();
        assert!(parsed.incident(0, 0) && parsed.incident(1, 1) && !parsed.incident(0, 1));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FormalContext::parse_cxt("A\n").is_err());
        assert!(FormalContext::parse_cxt("B\n\n1\n1\ng\nm\nxx\n").is_err());
        assert!(FormalContext::parse_cxt("B\n\n1\n1\ng\nm\n?\n").is_err());
        assert!(FormalContext::new(vec!["a".into(), "a".into()], vec![], vec![vec![], vec![]]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let ctx = dwarf_planets();
        let text = serde_json::to_string(&ctx.to_json()).unwrap();
        assert_eq!(FormalContext::parse_any(&text).unwrap(), ctx);
    }
}
