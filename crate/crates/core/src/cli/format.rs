//! On-disk formats: group files and embedding reports. Both are JSON with
//! every rational written as a string (`"-3/2"`) and keys sorted.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::crystal::{CrystalError, CrystalGroupSpec, Generator, Mode, Word};
use crate::embed::EmbeddingResult;
use crate::linalg::{format_rational, parse_rational, Integer, RMatrix, RVector, Rational, SymmetricForm};
use crate::verify::{Check, VerificationReport, VerifyConfig, Witness};

pub const REPORT_FORMAT: &str = "flatcusp-report/1";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Seg {
    Key(&'static str),
    Index(usize),
}

fn render_path(path: &[Seg]) -> String {
    let mut out = String::new();
    for seg in path {
        match seg {
            Seg::Key(k) => {
                if !out.is_empty() {
                    out.push('.');
                }
                out.push_str(k);
            }
            Seg::Index(i) => out.push_str(&format!("[{i}]")),
        }
    }
    if out.is_empty() {
        "(document)".into()
    } else {
        out
    }
}

/// A parse or validation error with its position in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub key: String,
    pub reason: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}: {}",
            self.line, self.column, self.key, self.reason
        )
    }
}

impl std::error::Error for FormatError {}

/// Finds where the value at `path` starts; falls back to the deepest
/// prefix that could be followed.
struct Locator<'a> {
    b: &'a [u8],
    i: usize,
}

impl Locator<'_> {
    fn ws(&mut self) {
        while self.i < self.b.len() && self.b[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn string(&mut self) -> Option<&[u8]> {
        if self.b.get(self.i) != Some(&b'"') {
            return None;
        }
        let start = self.i + 1;
        let mut j = start;
        while j < self.b.len() {
            match self.b[j] {
                b'\\' => j += 2,
                b'"' => {
                    self.i = j + 1;
                    return Some(&self.b[start..j]);
                }
                _ => j += 1,
            }
        }
        None
    }

    fn skip_value(&mut self) -> Option<()> {
        self.ws();
        match *self.b.get(self.i)? {
            b'"' => self.string().map(|_| ()),
            open @ (b'{' | b'[') => {
                let close = if open == b'{' { b'}' } else { b']' };
                self.i += 1;
                loop {
                    self.ws();
                    match *self.b.get(self.i)? {
                        c if c == close => {
                            self.i += 1;
                            return Some(());
                        }
                        b',' | b':' => self.i += 1,
                        _ => self.skip_value()?,
                    }
                }
            }
            _ => {
                while self.i < self.b.len() && !b",]}: \t\r\n".contains(&self.b[self.i]) {
                    self.i += 1;
                }
                Some(())
            }
        }
    }

    fn enter(&mut self, seg: &Seg) -> Option<()> {
        self.ws();
        match seg {
            Seg::Key(k) => {
                if self.b.get(self.i) != Some(&b'{') {
                    return None;
                }
                self.i += 1;
                loop {
                    self.ws();
                    let key = self.string()?.to_vec();
                    self.ws();
                    if self.b.get(self.i) != Some(&b':') {
                        return None;
                    }
                    self.i += 1;
                    self.ws();
                    if key == k.as_bytes() {
                        return Some(());
                    }
                    self.skip_value()?;
                    self.ws();
                    if self.b.get(self.i) != Some(&b',') {
                        return None;
                    }
                    self.i += 1;
                }
            }
            Seg::Index(n) => {
                if self.b.get(self.i) != Some(&b'[') {
                    return None;
                }
                self.i += 1;
                for _ in 0..*n {
                    self.skip_value()?;
                    self.ws();
                    if self.b.get(self.i) != Some(&b',') {
                        return None;
                    }
                    self.i += 1;
                }
                self.ws();
                Some(())
            }
        }
    }
}

fn locate(text: &str, path: &[Seg]) -> (usize, usize) {
    let mut loc = Locator {
        b: text.as_bytes(),
        i: 0,
    };
    let mut good = 0;
    for seg in path {
        if loc.enter(seg).is_none() {
            break;
        }
        good = loc.i;
    }
    let before = &text[..good.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, path: &[Seg], reason: impl Into<String>) -> FormatError {
        let (line, column) = locate(self.text, path);
        FormatError {
            line,
            column,
            key: render_path(path),
            reason: reason.into(),
        }
    }

    fn rational(&self, v: &Value, path: &[Seg]) -> Result<Rational, FormatError> {
        match v {
            Value::String(s) => parse_rational(s).map_err(|e| self.err(path, e.to_string())),
            Value::Number(n) if n.is_i64() || n.is_u64() => {
                parse_rational(&n.to_string()).map_err(|e| self.err(path, e.to_string()))
            }
            Value::Number(_) => Err(self.err(path, "floating-point literals are not exact; write \"p/q\"")),
            _ => Err(self.err(path, "expected a rational literal")),
        }
    }

    fn vector(&self, v: &Value, path: &[Seg]) -> Result<Vec<Rational>, FormatError> {
        let items = v.as_array().ok_or_else(|| self.err(path, "expected an array"))?;
        items
            .iter()
            .enumerate()
            .map(|(i, x)| self.rational(x, &with(path, Seg::Index(i))))
            .collect()
    }

    fn matrix(&self, v: &Value, path: &[Seg]) -> Result<RMatrix, FormatError> {
        let rows = v
            .as_array()
            .ok_or_else(|| self.err(path, "expected an array of rows"))?;
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| self.vector(r, &with(path, Seg::Index(i))))
            .collect::<Result<Vec<_>, _>>()?;
        RMatrix::from_rows(rows).map_err(|e| self.err(path, e.to_string()))
    }

    fn words(
        &self,
        v: Option<&Value>,
        prefix: &[Seg],
        key: &'static str,
        names: &[String],
    ) -> Result<Vec<Word>, FormatError> {
        let path = with(prefix, Seg::Key(key));
        let Some(v) = v else {
            return Err(self.err(prefix, format!("missing key {key:?}")));
        };
        let items = v
            .as_array()
            .ok_or_else(|| self.err(&path, "expected an array of words"))?;
        items
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let p = with(&path, Seg::Index(i));
                let text = w.as_str().ok_or_else(|| self.err(&p, "expected a word string"))?;
                Word::parse(text, names).map_err(|e| self.err(&p, e.to_string()))
            })
            .collect()
    }
}

fn with(path: &[Seg], seg: Seg) -> Vec<Seg> {
    let mut p = path.to_vec();
    p.push(seg);
    p
}

fn syntax_error(e: &serde_json::Error) -> FormatError {
    FormatError {
        line: e.line(),
        column: e.column(),
        key: "(document)".into(),
        reason: format!("malformed JSON: {e}"),
    }
}

pub fn parse_group_file(text: &str) -> Result<CrystalGroupSpec, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| syntax_error(&e))?;
    parse_group_value(&value, text, &[])
}

fn parse_group_value(value: &Value, text: &str, prefix: &[Seg]) -> Result<CrystalGroupSpec, FormatError> {
    let ctx = Ctx { text };
    let at = |seg: Seg| with(prefix, seg);
    let obj = value
        .as_object()
        .ok_or_else(|| ctx.err(prefix, "expected a JSON object"))?;
    const KEYS: [&str; 5] = ["dim", "mode", "generators", "relators", "mu_words"];
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(ctx.err(prefix, format!("unknown key {k:?}")));
    }
    let get = |key: &'static str| {
        obj.get(key)
            .ok_or_else(|| ctx.err(prefix, format!("missing key {key:?}")))
    };

    let dim = get("dim")?
        .as_u64()
        .filter(|&d| d >= 1)
        .ok_or_else(|| ctx.err(&at(Seg::Key("dim")), "expected a positive integer"))? as usize;
    let mode = match get("mode")?.as_str() {
        Some("explicit") => Mode::Explicit,
        Some("abstract") => Mode::Abstract,
        _ => return Err(ctx.err(&at(Seg::Key("mode")), "expected \"explicit\" or \"abstract\"")),
    };

    let gens_path = at(Seg::Key("generators"));
    let raw = get("generators")?
        .as_array()
        .ok_or_else(|| ctx.err(&gens_path, "expected an array"))?;
    let mut generators = Vec::with_capacity(raw.len());
    for (i, g) in raw.iter().enumerate() {
        let gp = with(&gens_path, Seg::Index(i));
        let g = g.as_object().ok_or_else(|| ctx.err(&gp, "expected an object"))?;
        if let Some(k) = g
            .keys()
            .find(|k| !["name", "holonomy", "translation"].contains(&k.as_str()))
        {
            return Err(ctx.err(&gp, format!("unknown key {k:?}")));
        }
        let name = g
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| ctx.err(&with(&gp, Seg::Key("name")), "expected a name string"))?
            .to_string();
        let hp = with(&gp, Seg::Key("holonomy"));
        let holonomy = ctx.matrix(
            g.get("holonomy")
                .ok_or_else(|| ctx.err(&gp, "missing key \"holonomy\""))?,
            &hp,
        )?;
        if holonomy.rows() != dim || holonomy.cols() != dim {
            return Err(ctx.err(
                &hp,
                format!(
                    "dimension mismatch: {}x{} holonomy, dim is {dim}",
                    holonomy.rows(),
                    holonomy.cols()
                ),
            ));
        }
        let tp = with(&gp, Seg::Key("translation"));
        let translation = match g.get("translation") {
            None | Some(Value::Null) => None,
            Some(t) => {
                let t = ctx.vector(t, &tp)?;
                if t.len() != dim {
                    return Err(ctx.err(&tp, format!("dimension mismatch: length {}, dim is {dim}", t.len())));
                }
                Some(RVector::new(t))
            }
        };
        match (mode, &translation) {
            (Mode::Explicit, None) => return Err(ctx.err(&gp, "explicit mode requires a translation")),
            (Mode::Abstract, Some(_)) => return Err(ctx.err(&tp, "abstract mode takes no translations")),
            _ => {}
        }
        generators.push(Generator {
            name,
            holonomy,
            translation,
        });
    }
    let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
    let relators = ctx.words(obj.get("relators"), prefix, "relators", &names)?;
    let mu_words = ctx.words(obj.get("mu_words"), prefix, "mu_words", &names)?;
    CrystalGroupSpec::new(dim, generators, relators, mu_words).map_err(|e| {
        let key = match &e {
            CrystalError::MuWordCount { .. } => at(Seg::Key("mu_words")),
            CrystalError::BadGenerator { generator, .. } | CrystalError::DuplicateGenerator(generator) => {
                match names.iter().position(|n| n == generator) {
                    Some(i) => with(&gens_path, Seg::Index(i)),
                    None => gens_path.clone(),
                }
            }
            _ => prefix.to_vec(),
        };
        ctx.err(&key, e.to_string())
    })
}

fn rationals(v: &RVector) -> Value {
    Value::Array(v.iter().map(|x| Value::String(format_rational(x))).collect())
}

fn grid(m: &RMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| rationals(&m.row(i))).collect())
}

pub fn group_to_value(spec: &CrystalGroupSpec) -> Value {
    let generators: Vec<Value> = spec
        .generators()
        .iter()
        .map(|g| {
            let mut obj = Map::new();
            obj.insert("name".into(), json!(g.name));
            obj.insert("holonomy".into(), grid(&g.holonomy));
            if let Some(t) = &g.translation {
                obj.insert("translation".into(), rationals(t));
            }
            Value::Object(obj)
        })
        .collect();
    let words = |ws: &[Word]| -> Value { ws.iter().map(|w| json!(spec.render_word(w))).collect() };
    json!({
        "dim": spec.dim(),
        "mode": match spec.mode() { Mode::Explicit => "explicit", Mode::Abstract => "abstract" },
        "generators": generators,
        "relators": words(spec.relators()),
        "mu_words": words(spec.mu_words()),
    })
}

pub fn serialize_group_file(spec: &CrystalGroupSpec) -> String {
    pretty(&group_to_value(spec))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// A free-standing matrix file: an array of rows of rational literals.
pub fn parse_matrix_file(text: &str) -> Result<RMatrix, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| syntax_error(&e))?;
    Ctx { text }.matrix(&value, &[])
}

/// A separation recorded in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationRecord {
    pub element: String,
    pub matrix: RMatrix,
    pub p: u64,
    pub outcome: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    format: String,
    group: Value,
    generators: Vec<String>,
    matrices: Vec<RMatrix>,
    form: RMatrix,
    d: RMatrix,
    c: String,
    k: String,
    v1: RVector,
    v2: RVector,
    cusp_columns: Vec<RVector>,
    mu_hat: Vec<RMatrix>,
    signature: String,
    verify_config: VerifyConfig,
    verification: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    separations: Vec<SeparationRecord>,
}

/// Everything `verify` needs, recovered from a report alone.
#[derive(Debug, Clone)]
pub struct LoadedReport {
    pub spec: CrystalGroupSpec,
    pub result: EmbeddingResult,
    pub config: VerifyConfig,
    pub separations: Vec<SeparationRecord>,
}

/// Why a report could not be loaded: either it is not a report at all, or
/// it is well formed but its data is inconsistent (reported as a failed
/// check with a witness).
#[derive(Debug, Clone)]
pub enum ReportError {
    Malformed(FormatError),
    Invalid(Check),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Malformed(e) => write!(f, "{e}"),
            ReportError::Invalid(c) => write!(f, "check {} failed", c.name),
        }
    }
}

fn invalid(name: &str, witness: Witness) -> ReportError {
    ReportError::Invalid(Check {
        name: name.into(),
        passed: false,
        witness: Some(witness),
    })
}

pub fn report_to_value(
    spec: &CrystalGroupSpec,
    result: &EmbeddingResult,
    report: &VerificationReport,
    config: &VerifyConfig,
    separations: &[SeparationRecord],
) -> Value {
    let file = ReportFile {
        format: REPORT_FORMAT.into(),
        group: group_to_value(spec),
        generators: result.generator_names.clone(),
        matrices: result.matrices.clone(),
        form: result.form.matrix().clone(),
        d: result.d.matrix().clone(),
        c: result.c.to_string(),
        k: result.k.to_string(),
        v1: result.v1.clone(),
        v2: result.v2.clone(),
        cusp_columns: result.cusp_columns.clone(),
        mu_hat: result.mu_hat.clone(),
        signature: result.form.signature().to_string(),
        verify_config: config.clone(),
        verification: verification_value(report),
        separations: separations.to_vec(),
    };
    // through Value so that every object's keys come out sorted
    serde_json::to_value(&file).expect("report serializes")
}

pub fn verification_value(report: &VerificationReport) -> Value {
    json!({
        "passed": report.passed(),
        "checks": report.checks,
    })
}

pub fn serialize_report(
    spec: &CrystalGroupSpec,
    result: &EmbeddingResult,
    report: &VerificationReport,
    config: &VerifyConfig,
    separations: &[SeparationRecord],
) -> String {
    pretty(&report_to_value(spec, result, report, config, separations))
}

fn symmetric(m: RMatrix, name: &str) -> Result<SymmetricForm, ReportError> {
    SymmetricForm::new(m.clone()).map_err(|e| {
        invalid(
            "report_structure",
            Witness::Matrix {
                subject: format!("{name}: {e}"),
                matrix: m,
            },
        )
    })
}

fn integer(s: &str, key: &str, text: &str) -> Result<Integer, ReportError> {
    let malformed = |reason: String| {
        let (line, column) = locate(text, &[Seg::Key(if key == "c" { "c" } else { "k" })]);
        ReportError::Malformed(FormatError {
            line,
            column,
            key: key.into(),
            reason,
        })
    };
    let x = parse_rational(s).map_err(|e| malformed(e.to_string()))?;
    if !x.is_integer() || !x.is_positive() {
        return Err(malformed(format!("expected a positive integer, got {s}")));
    }
    Ok(x.to_integer())
}

pub fn parse_report(text: &str) -> Result<LoadedReport, ReportError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ReportError::Malformed(syntax_error(&e)))?;
    let file: ReportFile = serde_json::from_value(value).map_err(|e| {
        ReportError::Malformed(FormatError {
            line: 1,
            column: 1,
            key: "(document)".into(),
            reason: format!("not a report: {e}"),
        })
    })?;
    if file.format != REPORT_FORMAT {
        let (line, column) = locate(text, &[Seg::Key("format")]);
        return Err(ReportError::Malformed(FormatError {
            line,
            column,
            key: "format".into(),
            reason: format!("unsupported format {:?}", file.format),
        }));
    }
    let spec = parse_group_value(&file.group, text, &[Seg::Key("group")])
        .map_err(|e| invalid("report_structure", Witness::Note { message: e.to_string() }))?;
    let c = integer(&file.c, "c", text)?;
    let k = integer(&file.k, "k", text)?;
    let result = EmbeddingResult {
        dim: spec.dim(),
        generator_names: file.generators,
        matrices: file.matrices,
        form: symmetric(file.form, "form")?,
        d: symmetric(file.d, "d")?,
        c,
        k,
        v1: file.v1,
        v2: file.v2,
        mu_hat: file.mu_hat,
        cusp_columns: file.cusp_columns,
    };
    Ok(LoadedReport {
        spec,
        result,
        config: file.verify_config,
        separations: file.separations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    const HW: &str = include_str!("../../data/hantsche_wendt.json");

    #[test]
    fn shipped_file_matches_catalog() {
        assert_eq!(
            parse_group_file(HW).unwrap(),
            catalog::lookup("hantsche-wendt").unwrap()
        );
    }

    #[test]
    fn other_shipped_files() {
        let klein = parse_group_file(include_str!("../../data/klein_bottle_abstract.json")).unwrap();
        assert_eq!(klein, catalog::lookup("klein-bottle").unwrap().to_abstract());
        let line = parse_group_file(include_str!("../../data/reflection_line.json")).unwrap();
        assert_eq!(line, catalog::reflection_line());
    }

    #[test]
    fn catalog_round_trips() {
        for name in catalog::names() {
            let spec = catalog::lookup(name).unwrap();
            let text = serialize_group_file(&spec);
            assert_eq!(parse_group_file(&text).unwrap(), spec, "{name}");
            let abs = spec.to_abstract();
            assert_eq!(parse_group_file(&serialize_group_file(&abs)).unwrap(), abs);
        }
    }

    #[test]
    fn zero_denominator_is_located() {
        let text = HW.replacen("\"1/2\"", "\"1/0\"", 1);
        let err = parse_group_file(&text).unwrap_err();
        assert!(err.reason.contains("zero denominator"), "{err}");
        let line = text.lines().position(|l| l.contains("1/0")).unwrap() + 1;
        assert_eq!(err.line, line);
        assert!(err.key.starts_with("generators[0].translation"), "{}", err.key);
    }

    #[test]
    fn undeclared_generator() {
        let text = HW.replacen("a b b a^-1 b b", "a c b a^-1 b b", 1);
        let err = parse_group_file(&text).unwrap_err();
        assert_eq!(err.key, "relators[0]");
        assert!(err.reason.contains("\"c\""), "{err}");
        let line = text.lines().position(|l| l.contains("a c b")).unwrap() + 1;
        assert_eq!(err.line, line);
    }

    #[test]
    fn structural_errors() {
        let bad_json = parse_group_file("{\"dim\": 3,").unwrap_err();
        assert!(bad_json.reason.contains("malformed JSON"));
        let spec = catalog::lookup("torus-2").unwrap();
        let mut v = group_to_value(&spec);
        v["mu_words"] = json!(["x"]);
        let err = parse_group_file(&pretty(&v)).unwrap_err();
        assert_eq!(err.key, "mu_words");
        let mut v = group_to_value(&spec);
        v["generators"][1]["holonomy"] = json!([["1"]]);
        let err = parse_group_file(&pretty(&v)).unwrap_err();
        assert_eq!(err.key, "generators[1].holonomy");
        assert!(err.reason.contains("dimension mismatch"));
        let mut v = group_to_value(&spec);
        v["generators"][0]["translation"] = json!([0.5, "0"]);
        assert!(parse_group_file(&pretty(&v))
            .unwrap_err()
            .reason
            .contains("floating-point"));
        let mut v = group_to_value(&spec);
        v["extra"] = json!(1);
        assert!(parse_group_file(&pretty(&v))
            .unwrap_err()
            .reason
            .contains("unknown key"));
    }

    #[test]
    fn locate_walks_nested_paths() {
        let text = "{\n  \"a\": [1,\n    {\"b\": \"x\"}]\n}";
        assert_eq!(locate(text, &[Seg::Key("a"), Seg::Index(1), Seg::Key("b")]), (3, 11));
        assert_eq!(locate(text, &[Seg::Key("zzz")]), (1, 1));
    }
}
