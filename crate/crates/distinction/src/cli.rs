//! Command-line front end: configuration, the rep-spec grammar, and the
//! three subcommands with their json, tsv and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::characters::{Bounds, NuHalf, Setting, SmoothCharacter};
use crate::error::{Error, Result};
use crate::gl2::GL2Rep;
use crate::localfield::{ExtType, FieldSpec, FieldTag};
use crate::prasad::{classical_counterexample, dihedral_thetas, sweep, SweepReport};
use crate::scalars::RootOfUnity;
use crate::sl2::{PrinCase, PrinReport};
use crate::weildeligne::{WdClass, WdShape};
use crate::weilrep::KGalois;

const GRAMMAR: &str = "\
Representation specs:
  PS(chi1=C,chi2=C)   principal series of GL2(E)
  St(chi=C)           Steinberg twist (not when q_E = -1 mod ell)
  Sp(chi=C)           special representation (only when q_E = -1 mod ell)
  Cusp(K=i,theta=C)   dihedral supercuspidal induced from K(i)
  I(chi=C)            principal series of SL2(E)

Characters C (on E, or on K(i) inside Cusp):
  triv, nu, nu_half, omega, unram(k/m), quad(i), theta(j), {inline JSON}
  combined with * and integer powers ^n, e.g. omega*nu_half^-1.
  omega is the first extension of the quadratic character of the layer
  below; theta(j) is the j-th dihedral character of K(i) in sweep order.

Config file: one key=value per line, # starts a comment. Keys:
  p (3), f (1), ext (unram | ram | ram-twisted; unram), ell (5), depth (2),
  max_unif_order, max_conductor (from the field), format (text),
  nu_half (even), out.

Exit codes: 0 success, 1 sweep disagreements, 2 invalid input, 3 I/O error.";

#[derive(Parser, Debug)]
#[command(name = "distinction", version, about = "Distinction of mod-ell representations of GL2 and SL2", after_help = GRAMMAR)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// Flat key=value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Field as p,f,ext,ell,depth.
    #[arg(long, global = true, value_name = "p,f,ext,ell,depth")]
    pub field: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Square root of ν used for ν^(1/2).
    #[arg(long = "nu-half", global = true, value_enum)]
    pub nu_half: Option<NuHalfArg>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide distinction of one representation.
    Distinguish {
        #[arg(long, value_name = "SPEC")]
        rep: String,
        /// Also report the restriction to SL2(E).
        #[arg(long)]
        sl2: bool,
    },
    /// Check distinction against parameter lifts over every enumerated representation.
    PrasadSweep {
        /// Run the four standard configurations instead of one.
        #[arg(long)]
        suite: bool,
        /// Run sequentially.
        #[arg(long)]
        seq: bool,
        /// Flip the distinction verdict of this row (detector test).
        #[arg(long, hide = true, value_name = "ROW")]
        flip_verdict: Option<usize>,
    },
    /// Emit the distinction and multiplicity tables.
    Tables {
        #[arg(long, value_enum, default_value_t = TableKind::All)]
        table: TableKind,
        #[arg(long)]
        suite: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Json,
    Tsv,
    #[default]
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NuHalfArg {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Cusp,
    Ps,
    Prin,
    Sl2,
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: FieldSpec,
    pub bounds: Option<Bounds>,
    pub format: Format,
    pub nu_half: NuHalf,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spec: FieldSpec::new(3, 1, ExtType::Unramified, 5, 2),
            bounds: None,
            format: Format::Text,
            nu_half: NuHalf::Even,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn setting(&self) -> Result<Setting> {
        self.spec.validate()?;
        Setting::with_options(self.spec, self.nu_half, self.bounds)
    }

    fn with_spec(&self, spec: FieldSpec) -> RunConfig {
        RunConfig { spec, bounds: None, ..self.clone() }
    }
}

/// The configurations of the acceptance sweep.
pub fn standard_suite() -> [FieldSpec; 4] {
    [
        FieldSpec::new(3, 1, ExtType::Unramified, 5, 2),
        FieldSpec::new(5, 1, ExtType::Ramified { twisted: false }, 3, 2),
        FieldSpec::new(7, 1, ExtType::Unramified, 3, 1),
        FieldSpec::new(3, 1, ExtType::Unramified, 7, 1),
    ]
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn parse_ext(s: &str) -> Option<ExtType> {
    match s {
        "unram" | "unramified" => Some(ExtType::Unramified),
        "ram" | "ramified" => Some(ExtType::Ramified { twisted: false }),
        "ram-twisted" | "ramified-twisted" => Some(ExtType::Ramified { twisted: true }),
        _ => None,
    }
}

fn ext_name(e: ExtType) -> &'static str {
    match e {
        ExtType::Unramified => "unram",
        ExtType::Ramified { twisted: false } => "ram",
        ExtType::Ramified { twisted: true } => "ram-twisted",
    }
}

/// `p,f,ext,ell,depth`; the depth may be omitted.
pub fn parse_field(src: &str) -> Result<FieldSpec> {
    let parts: Vec<&str> = src.split(',').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(parse_err(1, 1, "expected p,f,ext,ell[,depth]"));
    }
    let col = |i: usize| 1 + parts[..i].iter().map(|p| p.len() + 1).sum::<usize>();
    let num = |i: usize| -> Result<u64> {
        parts[i].trim().parse().map_err(|_| parse_err(1, col(i), format!("expected an integer, got {:?}", parts[i])))
    };
    let ext =
        parse_ext(parts[2].trim()).ok_or_else(|| parse_err(1, col(2), format!("unknown extension {:?}", parts[2])))?;
    let depth = if parts.len() == 5 { num(4)? as u32 } else { 1 };
    Ok(FieldSpec::new(num(0)?, num(1)? as u32, ext, num(3)?, depth))
}

/// Applies a flat key=value file on top of `base`.
pub fn parse_config(text: &str, base: RunConfig) -> Result<RunConfig> {
    let mut cfg = base;
    let mut unif = None;
    let mut cond = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(parse_err(line, col, "expected key=value"));
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let vcol = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        let kcol = content.len() - content.trim_start().len() + 1;
        let int = || -> Result<u64> {
            value.parse().map_err(|_| parse_err(line, vcol, format!("expected an integer, got {value:?}")))
        };
        match key {
            "p" => cfg.spec.p = int()?,
            "f" => cfg.spec.f = int()? as u32,
            "ell" => cfg.spec.ell = int()?,
            "depth" => cfg.spec.depth = int()? as u32,
            "ext" => {
                cfg.spec.ext =
                    parse_ext(value).ok_or_else(|| parse_err(line, vcol, format!("unknown extension {value:?}")))?
            }
            "max_unif_order" => unif = Some(int()?),
            "max_conductor" => cond = Some(int()? as u32),
            "format" => {
                cfg.format = Format::from_str(value, true)
                    .map_err(|_| parse_err(line, vcol, format!("unknown format {value:?}")))?
            }
            "nu_half" => {
                cfg.nu_half = match value {
                    "even" => NuHalf::Even,
                    "odd" => NuHalf::Odd,
                    _ => return Err(parse_err(line, vcol, format!("expected even or odd, got {value:?}"))),
                }
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            _ => return Err(parse_err(line, kcol, format!("unknown key {key:?}"))),
        }
    }
    if unif.is_some() || cond.is_some() {
        let d = Bounds::default_for(&cfg.spec);
        cfg.bounds = Some(Bounds {
            max_unif_order: unif.unwrap_or(d.max_unif_order),
            max_conductor: cond.unwrap_or(d.max_conductor),
        });
    }
    Ok(cfg)
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        cfg = parse_config(&text, cfg)?;
    }
    if let Some(f) = &common.field {
        cfg.spec = parse_field(f)?;
        cfg.bounds = None;
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    if let Some(n) = common.nu_half {
        cfg.nu_half = match n {
            NuHalfArg::Even => NuHalf::Even,
            NuHalfArg::Odd => NuHalf::Odd,
        };
    }
    cfg.spec.validate()?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// rep-spec grammar

/// A parsed `--rep` argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepSpec {
    Gl2(GL2Rep),
    /// `I(χ)` for `SL₂(E)`.
    Sl2Principal(SmoothCharacter),
}

#[derive(Clone, Debug)]
enum Atom {
    Name(String),
    Call(String, Vec<i64>, Option<u64>),
    Json(String),
}

#[derive(Clone, Debug)]
struct Factor {
    atom: Atom,
    pos: usize,
    power: i64,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, at: usize, msg: impl Into<String>) -> Error {
        let before = &self.src[..at.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        parse_err(line, col, msg)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(self.pos, format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(start, "expected a name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| self.err(start, "expected an integer"))
    }

    fn json(&mut self) -> Result<String> {
        let start = self.pos;
        let mut depth = 0usize;
        let mut in_str = false;
        let mut escaped = false;
        for (off, c) in self.src[start..].char_indices() {
            if in_str {
                match (escaped, c) {
                    (true, _) => escaped = false,
                    (false, '\\') => escaped = true,
                    (false, '"') => in_str = false,
                    _ => {}
                }
                continue;
            }
            match c {
                '"' => in_str = true,
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos = start + off + 1;
                        return Ok(self.src[start..self.pos].to_string());
                    }
                }
                _ => {}
            }
        }
        Err(self.err(start, "unterminated JSON object"))
    }

    fn atom(&mut self) -> Result<Atom> {
        self.skip_ws();
        if self.peek() == Some('{') {
            return self.json().map(Atom::Json);
        }
        let name = self.ident()?;
        if !self.eat('(') {
            return Ok(Atom::Name(name));
        }
        let k = self.int()?;
        let den = if self.eat('/') { Some(self.int()? as u64) } else { None };
        self.expect(')')?;
        Ok(Atom::Call(name, vec![k], den))
    }

    fn expr(&mut self) -> Result<Vec<Factor>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let pos = self.pos;
            let atom = self.atom()?;
            let power = if self.eat('^') { self.int()? } else { 1 };
            out.push(Factor { atom, pos, power });
            if !self.eat('*') {
                return Ok(out);
            }
        }
    }
}

fn eval_atom(s: &Setting, lx: &Lexer, tag: FieldTag, f: &Factor) -> Result<SmoothCharacter> {
    let at = |m: String| lx.err(f.pos, m);
    let ch = match &f.atom {
        Atom::Name(n) => match n.as_str() {
            "triv" => s.trivial(tag),
            "nu" => s.nu(tag),
            "nu_half" => s.nu_half(tag),
            "omega" => match tag {
                FieldTag::F => s.omega.clone(),
                FieldTag::E => s.extend_to_e(&s.omega)?,
                FieldTag::K(i) => {
                    let kw = s.kweil(i)?;
                    s.extensions_to_k(i, &kw.omega_ke)?.into_iter().next().ok_or(Error::ExtensionNotFound)?
                }
            },
            _ => return Err(at(format!("unknown character {n:?}"))),
        },
        Atom::Call(n, args, den) => match (n.as_str(), den) {
            ("unram", Some(m)) => {
                let z = RootOfUnity::checked(args[0], *m, s.ell).map_err(|e| at(e.to_string()))?;
                let field = s.field(tag);
                SmoothCharacter { unif_value: z, ..SmoothCharacter::trivial(field) }
            }
            ("quad", None) => {
                let q = s.quadratic_characters(tag)?;
                usize::try_from(args[0])
                    .ok()
                    .and_then(|i| q.get(i).cloned())
                    .ok_or_else(|| at(format!("quad index must be below {}", q.len())))?
            }
            ("theta", None) => {
                let FieldTag::K(i) = tag else {
                    return Err(at("theta(j) names a character of K".into()));
                };
                let (thetas, _) = dihedral_thetas(s, i)?;
                usize::try_from(args[0])
                    .ok()
                    .and_then(|j| thetas.get(j).cloned())
                    .ok_or_else(|| at(format!("theta index must be below {}", thetas.len())))?
            }
            _ => return Err(at(format!("unknown constructor {n:?}"))),
        },
        Atom::Json(text) => {
            let c: SmoothCharacter = serde_json::from_str(text).map_err(|e| at(format!("bad character JSON: {e}")))?;
            if c.domain != tag || c.unit_values.len() != s.field(tag).units.gens.len() {
                return Err(at(format!("character must live on {tag:?}")));
            }
            c
        }
    };
    Ok(ch.pow(f.power))
}

fn eval_expr(s: &Setting, lx: &Lexer, tag: FieldTag, fs: &[Factor]) -> Result<SmoothCharacter> {
    let mut acc = s.trivial(tag);
    for f in fs {
        acc = acc.mul(&eval_atom(s, lx, tag, f)?);
    }
    Ok(acc)
}

/// Parses a representation spec against a setting; see the grammar in `--help`.
pub fn parse_rep(s: &Setting, src: &str) -> Result<RepSpec> {
    let mut lx = Lexer { src, pos: 0 };
    lx.skip_ws();
    let head_pos = lx.pos;
    let head = lx.ident()?;
    let wanted: &[&str] = match head.as_str() {
        "PS" => &["chi1", "chi2"],
        "St" | "Sp" | "I" => &["chi"],
        "Cusp" => &["K", "theta"],
        _ => return Err(lx.err(head_pos, format!("unknown representation {head:?}; expected PS, St, Sp, Cusp or I"))),
    };
    lx.expect('(')?;
    let mut args: BTreeMap<String, (usize, Vec<Factor>)> = BTreeMap::new();
    let mut k_index = None;
    loop {
        lx.skip_ws();
        let key_pos = lx.pos;
        let key = lx.ident()?;
        if !wanted.contains(&key.as_str()) || args.contains_key(&key) || (key == "K" && k_index.is_some()) {
            return Err(lx.err(key_pos, format!("unexpected argument {key:?} for {head}")));
        }
        lx.expect('=')?;
        if key == "K" {
            let at = lx.pos;
            let k = lx.int()?;
            if k < 0 || k as usize >= s.sys.ks.len() {
                return Err(lx.err(at, format!("K index must be below {}", s.sys.ks.len())));
            }
            k_index = Some(k as u8);
        } else {
            let e = lx.expr()?;
            args.insert(key, (key_pos, e));
        }
        if !lx.eat(',') {
            break;
        }
    }
    lx.expect(')')?;
    lx.skip_ws();
    if lx.pos != src.len() {
        return Err(lx.err(lx.pos, "trailing input"));
    }
    for w in wanted {
        if *w != "K" && !args.contains_key(*w) || *w == "K" && k_index.is_none() {
            return Err(lx.err(src.len(), format!("missing argument {w:?}")));
        }
    }
    let on_e = |name: &str| eval_expr(s, &lx, FieldTag::E, &args[name].1);
    let rep = match head.as_str() {
        "PS" => GL2Rep::PrincipalSeries { chi1: on_e("chi1")?, chi2: on_e("chi2")? },
        "St" => GL2Rep::Steinberg { chi: on_e("chi")? },
        "Sp" => GL2Rep::Special { chi: on_e("chi")? },
        "I" => return Ok(RepSpec::Sl2Principal(on_e("chi")?)),
        _ => {
            let k = k_index.expect("checked above");
            if matches!(s.kweil(k)?.galois, KGalois::NotGalois) {
                return Err(Error::UnsupportedTower(format!("K({k}) is not Galois over F")));
            }
            GL2Rep::Dihedral { k, theta: eval_expr(s, &lx, FieldTag::K(k), &args["theta"].1)? }
        }
    };
    s.validate_gl2(&rep)?;
    Ok(RepSpec::Gl2(rep))
}

// ---------------------------------------------------------------------------
// documents

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Table {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub config: BTreeMap<String, String>,
    pub summary: BTreeMap<String, String>,
    pub tables: Vec<Table>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Document {
    pub schema: u32,
    pub command: String,
    pub sections: Vec<Section>,
}

fn config_map(s: &Setting) -> BTreeMap<String, String> {
    let sp = s.sys.spec;
    let nh = match s.nu_half {
        NuHalf::Even => "even",
        NuHalf::Odd => "odd",
    };
    [
        ("p", sp.p.to_string()),
        ("f", sp.f.to_string()),
        ("ext", ext_name(sp.ext).to_string()),
        ("ell", sp.ell.to_string()),
        ("depth", sp.depth.to_string()),
        ("nu_half", nh.to_string()),
        ("max_unif_order", s.bounds.max_unif_order.to_string()),
        ("max_conductor", s.bounds.max_conductor.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn render(doc: &Document, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            out = serde_json::to_string_pretty(doc).expect("documents serialize");
            out.push('\n');
        }
        Format::Tsv => {
            let _ = writeln!(out, "#schema\t{}\t{}", doc.schema, doc.command);
            for sec in &doc.sections {
                let kv = |m: &BTreeMap<String, String>| m.iter().map(|(k, v)| format!("\t{k}={v}")).collect::<String>();
                let _ = writeln!(out, "#config{}", kv(&sec.config));
                let _ = writeln!(out, "#summary{}", kv(&sec.summary));
                for t in &sec.tables {
                    let _ = writeln!(out, "#table\t{}", t.name);
                    let _ = writeln!(out, "{}", t.columns.join("\t"));
                    for r in &t.rows {
                        let _ = writeln!(out, "{}", r.join("\t"));
                    }
                }
            }
        }
        Format::Text => {
            for (i, sec) in doc.sections.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let c = &sec.config;
                let _ = writeln!(
                    out,
                    "== {} p={} f={} ext={} ell={} depth={} nu_half={} (bounds {}/{}) ==",
                    doc.command,
                    c["p"],
                    c["f"],
                    c["ext"],
                    c["ell"],
                    c["depth"],
                    c["nu_half"],
                    c["max_unif_order"],
                    c["max_conductor"]
                );
                for (k, v) in &sec.summary {
                    let _ = writeln!(out, "{k}: {v}");
                }
                for t in &sec.tables {
                    let _ = writeln!(out, "\n[{}]", t.name);
                    let mut w: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
                    for r in &t.rows {
                        for (j, cell) in r.iter().enumerate() {
                            w[j] = w[j].max(cell.chars().count());
                        }
                    }
                    let line = |cells: &[String]| {
                        let padded: Vec<String> = cells
                            .iter()
                            .zip(&w)
                            .map(|(c, &n)| format!("{c}{}", " ".repeat(n - c.chars().count())))
                            .collect();
                        padded.join("  ").trim_end().to_string()
                    };
                    let _ = writeln!(out, "{}", line(&t.columns));
                    for r in &t.rows {
                        let _ = writeln!(out, "{}", line(r));
                    }
                }
            }
        }
    }
    out
}

/// `unif|u1,u2,...` with values as exponents `num/den`.
pub fn fmt_char(c: &SmoothCharacter) -> String {
    let units: Vec<String> = c.unit_values.iter().map(|v| v.to_string()).collect();
    format!("{}|{}", c.unif_value, units.join(","))
}

fn fmt_rep(pi: &GL2Rep) -> String {
    match pi {
        GL2Rep::PrincipalSeries { chi1, chi2 } => format!("PS({};{})", fmt_char(chi1), fmt_char(chi2)),
        GL2Rep::Steinberg { chi } => format!("St({})", fmt_char(chi)),
        GL2Rep::Special { chi } => format!("Sp({})", fmt_char(chi)),
        GL2Rep::Dihedral { k, theta } => format!("Cusp(K{k};{})", fmt_char(theta)),
        GL2Rep::Primitive => "Primitive".into(),
    }
}

fn fmt_class(c: &WdClass) -> &'static str {
    match c {
        WdClass::Irreducible { .. } => "irreducible",
        WdClass::Reducible { shape: WdShape::Zero, .. } => "N=0",
        WdClass::Reducible { shape: WdShape::Nilpotent { .. }, .. } => "nilpotent",
        WdClass::Reducible { shape: WdShape::Regular, .. } => "regular",
    }
}

fn snake<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

fn fmt_mult(m: Option<u32>) -> String {
    m.map_or_else(|| "-".into(), |m| m.to_string())
}

/// How a character of `E^×` restricts to `F^×`.
fn restriction_label(s: &Setting, chi: &SmoothCharacter) -> Result<&'static str> {
    let r = s.restrict_to_f(chi)?;
    let nh = s.restrict_to_f(&s.nu_half(FieldTag::E))?;
    Ok(if r.is_trivial() {
        "triv"
    } else if r == s.omega {
        "omega"
    } else if r == nh {
        "nu_half"
    } else if r == s.omega.mul(&nh) {
        "omega*nu_half"
    } else {
        "other"
    })
}

// ---------------------------------------------------------------------------
// commands

pub fn cmd_distinguish(s: &Setting, rep: &str, sl2: bool) -> Result<Section> {
    let spec = parse_rep(s, rep)?;
    let mut summary = BTreeMap::new();
    summary.insert("rep".to_string(), rep.trim().to_string());
    let mut tables = Vec::new();
    match spec {
        RepSpec::Sl2Principal(chi) => {
            let r: PrinReport = s.sl2_principal_distinguished(&chi)?;
            summary.insert("verdict".into(), verdict_word(r.distinguished).into());
            let mut t = Table::new("sl2_principal", &["character", "distinguished", "multiplicity", "case"]);
            t.push(vec![fmt_char(&chi), r.distinguished.to_string(), fmt_prin_mult(&r), snake(&r.case)]);
            tables.push(t);
        }
        RepSpec::Gl2(pi) => {
            let d = s.gl2f_distinction(&pi)?;
            let w = s.omega_distinction(&pi)?;
            summary.insert("verdict".into(), verdict_word(d.distinguished).into());
            summary.insert("omega_verdict".into(), verdict_word(w.distinguished).into());
            summary.insert("dichotomy".into(), snake(&s.dichotomy_check(&pi)?));
            summary.insert("central_character_on_f".into(), restriction_label(s, &s.central_character(&pi)?)?.into());
            let mut t = Table::new("distinction", &["character", "distinguished", "multiplicity", "rationale"]);
            for (name, r) in [("triv", d), ("omega", w)] {
                t.push(vec![name.into(), r.distinguished.to_string(), fmt_mult(r.multiplicity), snake(&r.rationale)]);
            }
            tables.push(t);
            if sl2 {
                if let GL2Rep::Dihedral { .. } = pi {
                    tables.extend(sl2_tables(s, &pi)?);
                } else {
                    summary.insert("restriction_profile".into(), "computed for dihedral supercuspidals only".into());
                }
            }
        }
    }
    Ok(Section { config: config_map(s), summary, tables })
}

fn verdict_word(b: bool) -> &'static str {
    if b {
        "distinguished"
    } else {
        "not distinguished"
    }
}

fn sl2_tables(s: &Setting, pi: &GL2Rep) -> Result<Vec<Table>> {
    let prof = s.restriction_profile(pi)?;
    let x = s.x_set(pi)?;
    let m = match s.sl2_supercuspidal_multiplicity(pi, false) {
        Ok(m) => m.to_string(),
        Err(Error::NotDistinguished) => "0".into(),
        Err(e) => return Err(e),
    };
    let mut t = Table::new("restriction_profile", &["lg", "lg_plus", "S_phi_order", "X_size", "multiplicity"]);
    t.push(vec![prof.lg.to_string(), prof.lg_plus.to_string(), prof.s_phi_order.to_string(), x.len().to_string(), m]);
    let mut y = Table::new("Y", &["character", "trivial_on_f"]);
    for c in &prof.y {
        y.push(vec![fmt_char(c), prof.y_plus.contains(c).to_string()]);
    }
    let mut xt = Table::new("X", &["character"]);
    for c in &x {
        xt.push(vec![fmt_char(c)]);
    }
    Ok(vec![t, y, xt])
}

fn fmt_prin_mult(r: &PrinReport) -> String {
    match (r.multiplicity, r.case) {
        (Some(m), _) => m.to_string(),
        (None, PrinCase::Undetermined) => "unknown".into(),
        (None, _) => "uncovered".into(),
    }
}

pub fn cmd_prasad_sweep(s: &Setting, parallel: bool, flip: Option<usize>) -> Result<(Section, usize)> {
    let mut report: SweepReport = sweep(s, parallel)?;
    if let Some(v) = flip.and_then(|i| report.verdicts.get_mut(i)) {
        v.lhs = !v.lhs;
        v.agree = v.lhs == v.rhs;
    }
    report.disagreements = report.verdicts.iter().filter(|v| !v.consistent()).count();
    let mut summary = BTreeMap::new();
    let mut put = |k: &str, v: String| summary.insert(k.to_string(), v);
    put("total", report.total.to_string());
    put("disagreements", report.disagreements.to_string());
    put("p_is_identity", report.p_is_identity.to_string());
    put("skipped_unrepresentable", report.skipped.unrepresentable.to_string());
    put("skipped_non_galois", report.skipped.non_galois.to_string());
    put("skipped_primitive", report.skipped.primitive.to_string());
    let cex = match classical_counterexample(s) {
        Ok(Some(c)) => format!(
            "{} naive lift {}; omega-distinguished {}",
            fmt_rep(&c.rep),
            c.lift.describe(),
            c.omega_distinguished
        ),
        Ok(None) => "none".into(),
        Err(Error::WrongRegime(_)) => "wrong regime".into(),
        Err(e) => return Err(e),
    };
    put("classical_counterexample", cex);
    let mut t = Table::new("verdicts", &["rep", "lhs", "rhs", "rhs_oracle", "agree", "case", "class", "witness"]);
    for v in &report.verdicts {
        t.push(vec![
            fmt_rep(&v.rep),
            v.lhs.to_string(),
            v.rhs.to_string(),
            v.rhs_oracle.to_string(),
            v.consistent().to_string(),
            snake(&v.case),
            fmt_class(&v.class).into(),
            v.witness.clone().unwrap_or_else(|| "-".into()),
        ]);
    }
    Ok((Section { config: config_map(s), summary, tables: vec![t] }, report.disagreements))
}

/// Groups identical rows and appends their count.
fn grouped(name: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Table {
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for r in rows {
        *counts.entry(r).or_default() += 1;
    }
    let mut cols = columns.to_vec();
    cols.push("count");
    let mut t = Table::new(name, &cols);
    for (mut r, n) in counts {
        r.push(n.to_string());
        t.push(r);
    }
    t
}

/// Steinberg or special twists by every enumerated χ.
pub fn cusp_table(s: &Setting) -> Result<Table> {
    let special = s.q_e_class() == crate::scalars::CongruenceClass::MinusOneMod;
    let mut rows = Vec::new();
    for chi in s.e_characters()? {
        let pi = if special { GL2Rep::Special { chi: chi.clone() } } else { GL2Rep::Steinberg { chi: chi.clone() } };
        let r = s.gl2f_distinction(&pi)?;
        rows.push(vec![
            pi.label().to_string(),
            restriction_label(s, &chi)?.into(),
            r.distinguished.to_string(),
            fmt_mult(r.multiplicity),
            snake(&r.rationale),
        ]);
    }
    Ok(grouped("cusp_dist", &["rep", "chi_on_f", "distinguished", "multiplicity", "rationale"], rows))
}

/// `π(χ, χ)` and `π(χ, (χ^σ)^{-1})` for every enumerated χ.
pub fn ps_table(s: &Setting) -> Result<Table> {
    let mut rows = Vec::new();
    for chi in s.e_characters()? {
        let dual = s.galois_twist(&chi)?.inv();
        for (pair, chi2) in [("chi,chi", chi.clone()), ("chi,chi^-sigma", dual)] {
            let r = s.gl2f_distinction(&GL2Rep::PrincipalSeries { chi1: chi.clone(), chi2: chi2.clone() })?;
            rows.push(vec![
                pair.to_string(),
                restriction_label(s, &chi)?.into(),
                (chi == chi2).to_string(),
                r.distinguished.to_string(),
                fmt_mult(r.multiplicity),
                snake(&r.rationale),
            ]);
        }
    }
    Ok(grouped("ps_dist", &["pair", "chi1_on_f", "chi1_eq_chi2", "distinguished", "multiplicity", "rationale"], rows))
}

pub fn prin_table(s: &Setting) -> Result<Table> {
    let nu = s.nu(FieldTag::E);
    let mut rows = Vec::new();
    for chi in s.e_characters()? {
        let r = s.sl2_principal_distinguished(&chi)?;
        let kind = if chi.is_trivial() {
            "trivial"
        } else if chi == nu || chi == nu.inv() {
            "nu"
        } else if chi.is_quadratic() {
            "quadratic"
        } else {
            "generic"
        };
        rows.push(vec![
            kind.to_string(),
            restriction_label(s, &chi)?.into(),
            s.is_galois_invariant(&chi)?.to_string(),
            r.distinguished.to_string(),
            fmt_prin_mult(&r),
            snake(&r.case),
        ]);
    }
    Ok(grouped("sl2_principal", &["chi", "chi_on_f", "sigma_invariant", "distinguished", "multiplicity", "case"], rows))
}

pub fn sl2_cusp_table(s: &Setting) -> Result<Table> {
    let mut rows = Vec::new();
    for pi in &s.dihedral_family()? {
        let GL2Rep::Dihedral { k, .. } = pi else { continue };
        let prof = s.restriction_profile(pi)?;
        let x = s.x_set(pi)?;
        let m = if x.is_empty() { "-".to_string() } else { s.sl2_supercuspidal_multiplicity(pi, false)?.to_string() };
        rows.push(vec![
            format!("K{k}"),
            prof.lg.to_string(),
            prof.lg_plus.to_string(),
            prof.s_phi_order.to_string(),
            x.len().to_string(),
            s.gl2f_distinction(pi)?.distinguished.to_string(),
            m,
        ]);
    }
    Ok(grouped("sl2_cusp", &["K", "lg", "lg_plus", "S_phi_order", "X_size", "distinguished", "multiplicity"], rows))
}

pub fn cmd_tables(s: &Setting, kind: TableKind) -> Result<Section> {
    let mut tables = Vec::new();
    let all = kind == TableKind::All;
    if all || kind == TableKind::Cusp {
        tables.push(cusp_table(s)?);
    }
    if all || kind == TableKind::Ps {
        tables.push(ps_table(s)?);
    }
    if all || kind == TableKind::Prin {
        tables.push(prin_table(s)?);
    }
    if all || kind == TableKind::Sl2 {
        tables.push(sl2_cusp_table(s)?);
    }
    let mut summary = BTreeMap::new();
    summary.insert("q_e_class".into(), snake(&s.q_e_class()));
    summary.insert("q_f_class".into(), snake(&s.q_f_class()));
    Ok(Section { config: config_map(s), summary, tables })
}

/// Process exit code for a failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn emit(doc: &Document, cfg: &RunConfig) -> Result<()> {
    let text = render(doc, cfg.format);
    match &cfg.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = resolve_config(&cli.common)?;
    let configs = |suite: bool| -> Vec<RunConfig> {
        if suite {
            standard_suite().into_iter().map(|sp| cfg.with_spec(sp)).collect()
        } else {
            vec![cfg.clone()]
        }
    };
    let (name, sections, code) = match &cli.command {
        Command::Distinguish { rep, sl2 } => ("distinguish", vec![cmd_distinguish(&cfg.setting()?, rep, *sl2)?], 0),
        Command::PrasadSweep { suite, seq, flip_verdict } => {
            let mut sections = Vec::new();
            let mut bad = 0;
            for c in configs(*suite) {
                let (sec, d) = cmd_prasad_sweep(&c.setting()?, !*seq, *flip_verdict)?;
                bad += d;
                sections.push(sec);
            }
            ("prasad-sweep", sections, if bad == 0 { 0 } else { 1 })
        }
        Command::Tables { table, suite } => {
            let sections =
                configs(*suite).iter().map(|c| cmd_tables(&c.setting()?, *table)).collect::<Result<Vec<_>>>()?;
            ("tables", sections, 0)
        }
    };
    emit(&Document { schema: 1, command: name.into(), sections }, &cfg)?;
    Ok(code)
}
