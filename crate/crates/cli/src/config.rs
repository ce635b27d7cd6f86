//! Declarative instance configs. Parsing goes through an untyped raw layer
//! that keeps source spans, so that every validation failure can name the
//! line it came from. Nothing is computed until [`Instance::load`] has
//! checked every precondition the core modules impose.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Range, RangeInclusive};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;

use wtp_core::error::Error as CoreError;
use wtp_core::group::{BoxKind, Dim, FolnerSchedule, GroupPoint, Window};
use wtp_core::measures::MeasureSpec;
use wtp_core::potential::Potential;
use wtp_core::pressure::{CylinderScheme, ExponentVector};
use wtp_core::symbolic::{Alphabet, BlockCode, Pattern, Subshift, Symbol, SystemChain, Word, DEFAULT_BUDGET};
use wtp_core::variational::OptimizerConfig;

/// A config problem, located in the source when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config error at line {l}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Maps byte spans to 1-based line numbers.
struct Source<'a>(&'a str);

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl fmt::Display) -> ConfigError {
        ConfigError { line: Some(self.line(span)), message: message.to_string() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    budget: Option<usize>,
    #[serde(default = "one")]
    dim: usize,
    #[serde(default, rename = "system")]
    systems: Vec<Spanned<SystemSpec>>,
    #[serde(default, rename = "code")]
    codes: Vec<Spanned<CodeSpec>>,
    exponents: Option<Vec<Spanned<f64>>>,
    potential: Option<Spanned<PotentialSpec>>,
    schedule: Option<Spanned<ScheduleSpec>>,
    scheme: Option<Spanned<SchemeSpec>>,
    measure: Option<Spanned<MeasureConfig>>,
    optimizer: Option<Spanned<OptimizerConfig>>,
    duality: Option<Spanned<DualitySpec>>,
    report: Option<Spanned<ReportSpec>>,
    output: Option<OutputSpec>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AlphabetSpec {
    Size(usize),
    Names(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Coord {
    Scalar(i64),
    Vector(Vec<i64>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ForbiddenSpec {
    /// A word read left to right from the origin (Z only).
    Word(Vec<String>),
    Placed {
        points: Vec<Coord>,
        symbols: Vec<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSpec {
    alphabet: AlphabetSpec,
    #[serde(default)]
    forbidden: Vec<ForbiddenSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalRule<T> {
    local: Vec<String>,
    #[serde(alias = "value")]
    image: T,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeSpec {
    /// Single-site code: `map[s]` is the image of symbol `s`.
    map: Option<Vec<String>>,
    window: Option<Vec<Coord>>,
    #[serde(default)]
    rules: Vec<LocalRule<String>>,
    default: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSpec {
    #[serde(default = "default_potential_name")]
    name: String,
    /// Single-site values, one per level-0 symbol.
    values: Option<Vec<f64>>,
    window: Option<Vec<Coord>>,
    #[serde(default)]
    rows: Vec<LocalRule<f64>>,
    #[serde(default)]
    default: f64,
}

fn default_potential_name() -> String {
    "f".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSpec {
    #[serde(default = "origin")]
    kind: BoxKind,
    #[serde(default = "one")]
    n_min: usize,
    n_max: usize,
}

fn origin() -> BoxKind {
    BoxKind::Origin
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SchemeSpec {
    refine_min: usize,
    refine_max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum MeasureConfig {
    Uniform,
    Bernoulli { probs: Vec<f64> },
    Markov { transition: Vec<Vec<f64>> },
    Parry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DualitySpec {
    /// The family is `c · 1[x_0 = symbol]` for each coefficient `c`.
    symbol: String,
    coefficients: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportSpec {
    #[serde(default)]
    suites: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    dir: Option<PathBuf>,
}

/// Command-line settings that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub n_max: Option<usize>,
    pub refine_max: Option<usize>,
    pub budget: Option<usize>,
}

/// The chain-dependent part of an instance.
#[derive(Debug, Clone)]
pub struct Model {
    pub chain: SystemChain,
    pub potential: Potential,
    pub exponents: ExponentVector,
    pub schedule: FolnerSchedule,
    pub refinements: RangeInclusive<usize>,
    pub measure: Option<MeasureSpec>,
    /// Present when the config has an `[optimizer]` table.
    pub optimizer: Option<OptimizerConfig>,
    pub duality: Option<Vec<Potential>>,
}

/// A validated config.
#[derive(Debug, Clone)]
pub struct Instance {
    pub model: Option<Model>,
    pub seed: u64,
    pub budget: usize,
    pub out: PathBuf,
    /// Suites run by `report`.
    pub report_suites: Vec<String>,
    /// sha256 over the model; independent of seed, budget and paths.
    pub digest: String,
}

impl Instance {
    pub fn load(path: &Path, o: &Overrides) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { line: None, message: format!("cannot read {}: {e}", path.display()) })?;
        Self::parse(&text, o)
    }

    /// An instance with no model, for runs that only need seed and budget.
    pub fn bare(o: &Overrides) -> Self {
        Instance {
            model: None,
            seed: o.seed.unwrap_or(0),
            budget: o.budget.unwrap_or(DEFAULT_BUDGET),
            out: o.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            report_suites: Vec::new(),
            digest: digest_of(&"no model"),
        }
    }

    pub fn parse(text: &str, o: &Overrides) -> Result<Self, ConfigError> {
        let src = Source(text);
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| src.line(s)),
            message: e.message().trim().to_string(),
        })?;
        let seed = o.seed.or(raw.seed).unwrap_or(0);
        let budget = o.budget.or(raw.budget).unwrap_or(DEFAULT_BUDGET);
        if budget == 0 {
            return Err(ConfigError { line: None, message: "budget must be positive".into() });
        }
        let out = o
            .out
            .clone()
            .or_else(|| raw.output.as_ref().and_then(|x| x.dir.clone()))
            .unwrap_or_else(|| PathBuf::from("out"));
        let report_suites = match &raw.report {
            Some(r) => {
                for s in &r.get_ref().suites {
                    if wtp_core::suites::suite_members(s).is_none() {
                        return Err(src.err(r.span(), format!("unknown suite {s:?}")));
                    }
                }
                r.get_ref().suites.clone()
            }
            None => vec!["all".into()],
        };
        let model = if raw.systems.is_empty() { None } else { Some(build_model(&src, &raw, seed, budget, o)?) };
        let digest = match &model {
            Some(m) => digest_of(&(
                &m.chain,
                &m.potential,
                &m.exponents,
                &m.schedule,
                &m.refinements,
                &m.measure,
                m.optimizer.as_ref().map(|c| OptimizerConfig { seed: 0, ..c.clone() }),
                &m.duality,
            )),
            None => digest_of(&"no model"),
        };
        Ok(Instance { model, seed, budget, out, report_suites, digest })
    }

    pub fn model(&self) -> Result<&Model, ConfigError> {
        self.model
            .as_ref()
            .ok_or_else(|| ConfigError { line: None, message: "this command needs at least one [[system]]".into() })
    }
}

fn digest_of(x: &impl fmt::Debug) -> String {
    hex::encode(Sha256::digest(format!("{x:?}").as_bytes()))
}

fn build_model(src: &Source, raw: &RawConfig, seed: u64, budget: usize, o: &Overrides) -> Result<Model, ConfigError> {
    let dim = Dim::from_rank(raw.dim).map_err(|e| ConfigError { line: None, message: e.to_string() })?;
    let mut systems = Vec::new();
    for s in &raw.systems {
        systems.push(build_system(s.get_ref(), dim).map_err(|m| src.err(s.span(), m))?);
    }
    if raw.codes.len() + 1 != systems.len() {
        let span = raw.codes.last().map_or(raw.systems[0].span(), |c| c.span());
        return Err(src.err(
            span,
            format!("{} systems need {} codes, found {}", systems.len(), systems.len() - 1, raw.codes.len()),
        ));
    }
    let mut codes = Vec::new();
    for (i, c) in raw.codes.iter().enumerate() {
        let code = build_code(c.get_ref(), &systems[i], &systems[i + 1], dim).map_err(|m| src.err(c.span(), m))?;
        codes.push(code);
    }
    let span0 = raw.systems[0].span();
    let chain = SystemChain::new(systems, codes).map_err(|e| src.err(span0.clone(), e))?;
    // Codes must map onto the next system; check on a small cube.
    let side = if dim == Dim::One { 4 } else { 2 };
    chain.spot_check(side, budget).map_err(|e| src.err(raw.codes[0].span(), e))?;
    let s0 = chain.system(0);

    let exponents = match &raw.exponents {
        Some(list) => {
            for x in list {
                let v = *x.get_ref();
                if !(0.0..=1.0).contains(&v) {
                    return Err(src.err(x.span(), format!("exponent outside [0,1]: {v}")));
                }
            }
            let a = ExponentVector::new(list.iter().map(|x| *x.get_ref()).collect())
                .map_err(|e| ConfigError { line: list.first().map(|x| src.line(x.span())), message: e.to_string() })?;
            if a.levels() != chain.levels() {
                let line = list.first().map(|x| src.line(x.span()));
                return Err(ConfigError {
                    line,
                    message: format!("{} exponents for a chain of {} systems", a.len(), chain.levels()),
                });
            }
            a
        }
        None => {
            return Err(ConfigError { line: None, message: "missing `exponents`".into() });
        }
    };

    let potential = match &raw.potential {
        Some(p) => {
            let f = build_potential(p.get_ref(), s0, dim).map_err(|m| src.err(p.span(), m))?;
            f.validate_for(s0).map_err(|e| src.err(p.span(), e))?;
            f
        }
        None => Potential::zero(s0.size(), dim).map_err(|e| src.err(span0.clone(), e))?,
    };

    let schedule = match &raw.schedule {
        Some(s) => {
            let spec = s.get_ref();
            let n_max = o.n_max.unwrap_or(spec.n_max);
            FolnerSchedule::new(spec.kind, dim, spec.n_min, n_max).map_err(|e| src.err(s.span(), e))?
        }
        None => return Err(ConfigError { line: None, message: "missing [schedule]".into() }),
    };

    let scheme = raw.scheme.as_ref().map(|s| (s.get_ref(), Some(s.span())));
    let (refine_min, refine_max, scheme_span) = match scheme {
        Some((s, span)) => (s.refine_min, o.refine_max.unwrap_or(s.refine_max), span),
        None => (0, o.refine_max.unwrap_or(0), None),
    };
    if refine_min > refine_max {
        let msg = format!("refinement range {refine_min}..={refine_max} is empty");
        return Err(match scheme_span {
            Some(sp) => src.err(sp, msg),
            None => ConfigError { line: None, message: msg },
        });
    }
    for k in [refine_min, refine_max] {
        CylinderScheme::standard(&chain, k).map_err(|e| ConfigError { line: None, message: e.to_string() })?;
    }

    let measure = match &raw.measure {
        Some(m) => {
            let spec = build_measure(m.get_ref(), s0).map_err(|e| src.err(m.span(), e))?;
            spec.validate(s0).map_err(|e| src.err(m.span(), e))?;
            Some(spec)
        }
        None => None,
    };

    let optimizer = match &raw.optimizer {
        Some(c) => {
            let cfg = OptimizerConfig { seed, ..c.get_ref().clone() };
            cfg.validate().map_err(|e| src.err(c.span(), e))?;
            cfg.family.check(&chain).map_err(|e| src.err(c.span(), e))?;
            Some(cfg)
        }
        None => None,
    };

    let duality = match &raw.duality {
        Some(d) => {
            let spec = d.get_ref();
            let sym = s0
                .alphabet()
                .symbol(&spec.symbol)
                .ok_or_else(|| src.err(d.span(), format!("unknown symbol {:?}", spec.symbol)))?;
            if measure.is_none() {
                return Err(src.err(d.span(), "[duality] needs a [measure] for the base measure"));
            }
            let family = spec
                .coefficients
                .iter()
                .map(|&c| Potential::indicator(c, sym, s0.size(), dim))
                .collect::<Result<Vec<_>, CoreError>>()
                .map_err(|e| src.err(d.span(), e))?;
            Some(family)
        }
        None => None,
    };

    Ok(Model {
        chain,
        potential,
        exponents,
        schedule,
        refinements: refine_min..=refine_max,
        measure,
        optimizer,
        duality,
    })
}

fn point(c: &Coord, dim: Dim) -> Result<GroupPoint, String> {
    match (c, dim) {
        (Coord::Scalar(x), Dim::One) => Ok(GroupPoint::d1(*x)),
        (Coord::Vector(v), Dim::One) if v.len() == 1 => Ok(GroupPoint::d1(v[0])),
        (Coord::Vector(v), Dim::Two) if v.len() == 2 => Ok(GroupPoint::d2(v[0], v[1])),
        _ => Err(format!("point {c:?} does not lie in Z^{}", dim.rank())),
    }
}

fn window(points: &[Coord], dim: Dim) -> Result<Window, String> {
    let pts = points.iter().map(|c| point(c, dim)).collect::<Result<Vec<_>, _>>()?;
    Window::new(dim, pts).map_err(|e| e.to_string())
}

fn symbols(alphabet: &Alphabet, names: &[String]) -> Result<Word, String> {
    names.iter().map(|n| alphabet.symbol(n).ok_or_else(|| format!("unknown symbol {n:?}"))).collect()
}

fn build_system(spec: &SystemSpec, dim: Dim) -> Result<Subshift, String> {
    let alphabet = match &spec.alphabet {
        AlphabetSpec::Size(q) => Alphabet::numeric(*q),
        AlphabetSpec::Names(n) => Alphabet::new(n.clone()),
    }
    .map_err(|e| e.to_string())?;
    if alphabet.names().iter().any(|n| n.contains([',', '"', '\n'])) {
        return Err("symbol names may not contain commas, quotes or newlines".into());
    }
    let mut forbidden = Vec::new();
    for f in &spec.forbidden {
        let p = match f {
            ForbiddenSpec::Word(w) => {
                if dim != Dim::One {
                    return Err("bare forbidden words need dim = 1; use { points, symbols }".into());
                }
                Pattern::word_at(0, &symbols(&alphabet, w)?)
            }
            ForbiddenSpec::Placed { points, symbols: names } => {
                if points.len() != names.len() {
                    return Err(format!("{} points but {} symbols", points.len(), names.len()));
                }
                // Pattern words follow sorted window order.
                let mut cells: Vec<(GroupPoint, Symbol)> = points
                    .iter()
                    .zip(symbols(&alphabet, names)?)
                    .map(|(c, s)| point(c, dim).map(|p| (p, s)))
                    .collect::<Result<_, _>>()?;
                cells.sort();
                let w = Window::new(dim, cells.iter().map(|c| c.0)).map_err(|e| e.to_string())?;
                if w.len() != cells.len() {
                    return Err("forbidden pattern repeats a point".into());
                }
                Pattern::new(w, cells.into_iter().map(|c| c.1).collect())
            }
        }
        .map_err(|e| e.to_string())?;
        forbidden.push(p);
    }
    Subshift::new(alphabet, dim, forbidden).map_err(|e| e.to_string())
}

fn build_code(spec: &CodeSpec, src: &Subshift, dst: &Subshift, dim: Dim) -> Result<BlockCode, String> {
    let (q, t) = (src.size(), dst.size());
    match (&spec.map, &spec.window) {
        (Some(map), None) => {
            if !spec.rules.is_empty() || spec.default.is_some() {
                return Err("`map` excludes `rules` and `default`".into());
            }
            if map.len() != q {
                return Err(format!("map has {} entries for an alphabet of {q}", map.len()));
            }
            let images = symbols(dst.alphabet(), map)?;
            BlockCode::symbol_map(&images, t, dim).map_err(|e| e.to_string())
        }
        (None, Some(points)) => {
            let w = window(points, dim)?;
            let mut table = BTreeMap::new();
            for r in &spec.rules {
                let local = symbols(src.alphabet(), &r.local)?;
                if local.len() != w.len() {
                    return Err(format!("rule {:?} has {} symbols for a window of {}", r.local, local.len(), w.len()));
                }
                let image = symbols(dst.alphabet(), std::slice::from_ref(&r.image))?[0];
                if table.insert(local, image).is_some() {
                    return Err(format!("duplicate rule for {:?}", r.local));
                }
            }
            let default = match &spec.default {
                Some(d) => Some(symbols(dst.alphabet(), std::slice::from_ref(d))?[0]),
                None => None,
            };
            let total = (q as f64).powi(w.len() as i32);
            if default.is_none() && (table.len() as f64) < total {
                return Err(format!("{} of {total} rules given and no `default`", table.len()));
            }
            let fallback = default.unwrap_or(0);
            BlockCode::from_fn(w, q, t, |local| table.get(local).copied().unwrap_or(fallback))
                .map_err(|e| e.to_string())
        }
        _ => Err("a code needs exactly one of `map` or `window`".into()),
    }
}

fn build_potential(spec: &PotentialSpec, s0: &Subshift, dim: Dim) -> Result<Potential, String> {
    match (&spec.values, &spec.window) {
        (Some(values), None) => {
            if !spec.rows.is_empty() {
                return Err("`values` excludes `rows`".into());
            }
            if values.len() != s0.size() {
                return Err(format!("{} values for an alphabet of {}", values.len(), s0.size()));
            }
            Potential::single_site(spec.name.clone(), values, dim).map_err(|e| e.to_string())
        }
        (None, Some(points)) => {
            let w = window(points, dim)?;
            let q = s0.size();
            let mut table = BTreeMap::new();
            for r in &spec.rows {
                let local = symbols(s0.alphabet(), &r.local)?;
                if local.len() != w.len() {
                    return Err(format!("row {:?} has {} symbols for a window of {}", r.local, local.len(), w.len()));
                }
                if table.insert(local, r.image).is_some() {
                    return Err(format!("duplicate row for {:?}", r.local));
                }
            }
            let n = w.len();
            let total = q.checked_pow(n as u32).filter(|&t| t <= 1 << 20).ok_or("potential window too large")?;
            let rows = (0..total).map(|mut i| {
                let mut local = vec![0 as Symbol; n];
                for slot in local.iter_mut().rev() {
                    *slot = (i % q) as Symbol;
                    i /= q;
                }
                let v = table.get(&local).copied().unwrap_or(spec.default);
                (local, v)
            });
            Potential::new(spec.name.clone(), w, q, rows).map_err(|e| e.to_string())
        }
        (None, None) => Potential::constant(spec.name.clone(), spec.default, s0.size(), dim).map_err(|e| e.to_string()),
        _ => Err("a potential needs at most one of `values` or `window`".into()),
    }
}

fn build_measure(spec: &MeasureConfig, s0: &Subshift) -> Result<MeasureSpec, CoreError> {
    match spec {
        MeasureConfig::Uniform => Ok(MeasureSpec::uniform(s0.size())),
        MeasureConfig::Bernoulli { probs } => MeasureSpec::bernoulli(probs.clone()),
        MeasureConfig::Markov { transition } => {
            if s0.dim() != Dim::One {
                return Err(CoreError::FamilyMismatch("Markov measures live on Z".into()));
            }
            MeasureSpec::markov(transition.clone())
        }
        MeasureConfig::Parry => MeasureSpec::parry(s0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COLLAPSE: &str = r#"
seed = 3
exponents = [0.5]

[[system]]
alphabet = 4

[[system]]
alphabet = ["a", "b"]

[[code]]
map = ["a", "a", "b", "b"]

[schedule]
n_max = 4
"#;

    #[test]
    fn parses_collapse() {
        let inst = Instance::parse(COLLAPSE, &Overrides::default()).unwrap();
        let m = inst.model.as_ref().unwrap();
        assert_eq!(m.chain.levels(), 2);
        assert!(m.potential.is_zero());
        assert_eq!(inst.seed, 3);
        assert_eq!(inst.digest.len(), 64);
    }

    #[test]
    fn digest_ignores_seed() {
        let a = Instance::parse(COLLAPSE, &Overrides::default()).unwrap();
        let b = Instance::parse(COLLAPSE, &Overrides { seed: Some(99), ..Default::default() }).unwrap();
        assert_eq!(a.digest, b.digest);
        let c = Instance::parse(COLLAPSE, &Overrides { n_max: Some(5), ..Default::default() }).unwrap();
        assert_ne!(a.digest, c.digest);
    }

    #[test]
    fn exponent_error_names_line() {
        let text = COLLAPSE.replace("[0.5]", "[1.5]");
        let e = Instance::parse(&text, &Overrides::default()).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("exponent outside [0,1]"));
    }

    #[test]
    fn unknown_symbol_in_code() {
        let text = COLLAPSE.replace(r#""b", "b"]"#, r#""b", "c"]"#);
        let e = Instance::parse(&text, &Overrides::default()).unwrap_err();
        assert!(e.message.contains("unknown symbol"), "{e}");
        assert_eq!(e.line, Some(11));
    }

    #[test]
    fn syntax_error_is_located() {
        let e = Instance::parse("exponents = [0.5\n", &Overrides::default()).unwrap_err();
        assert!(e.line.is_some());
    }

    #[test]
    fn windowed_code_and_potential() {
        let text = r#"
exponents = [1.0]
[[system]]
alphabet = 2
forbidden = [["1", "1"]]
[[system]]
alphabet = 2
forbidden = [["1", "1"]]
[[code]]
window = [0, 1]
rules = [{ local = ["0", "1"], image = "1" }]
default = "0"
[potential]
window = [0, 1]
rows = [{ local = ["1", "0"], value = 1.0 }]
[schedule]
n_max = 3
"#;
        let inst = Instance::parse(text, &Overrides::default()).unwrap();
        let m = inst.model.unwrap();
        assert_eq!(m.chain.code(0).rule(&[0, 1]), Some(1));
        assert_eq!(m.chain.code(0).rule(&[1, 0]), Some(0));
        assert_eq!(m.potential.eval(&[1, 0]), Some(1.0));
        assert_eq!(m.potential.eval(&[0, 0]), Some(0.0));
    }

    #[test]
    fn non_surjective_code_is_rejected() {
        let text = r#"
exponents = [1.0]
[[system]]
alphabet = 2
forbidden = [["1", "1"]]
[[system]]
alphabet = 2
[[code]]
map = ["0", "1"]
[schedule]
n_max = 3
"#;
        let e = Instance::parse(text, &Overrides::default()).unwrap_err();
        assert!(e.message.contains("no preimage"), "{e}");
        assert_eq!(e.line, Some(8));
    }

    #[test]
    fn incomplete_code_needs_default() {
        let text = r#"
exponents = [1.0]
[[system]]
alphabet = 2
[[system]]
alphabet = 2
[[code]]
window = [0, 1]
rules = [{ local = ["0", "1"], image = "1" }]
[schedule]
n_max = 3
"#;
        let e = Instance::parse(text, &Overrides::default()).unwrap_err();
        assert!(e.message.contains("no `default`"));
    }
}
