use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_index::classifier::{self, IndexOptions, IndexVerdict, PointClass};
use harmonic_index::function::{CanonicalForm, FunctionSummary};
use harmonic_index::portrait::{self, Window};
use harmonic_index::verifier::{self, AuditSummary};
use harmonic_index::winding::ClosedCurve;
use harmonic_index::zeros::{self, ExceptionalPoint, SearchRegion};
use harmonic_index::{parse_function, Complex, Error, HarmonicMapping};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INCONSISTENT: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Zeros, Poincaré indices and phase portraits of f(z) = h(z) - conj(z).
#[derive(Parser)]
#[command(name = "harmonic-index", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form, poles, zeros with indices and, for rational h, the global audit.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// List the zeros of f in a region.
    Zeros {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// Poincaré index of f at a zero of f or a pole of h.
    Index {
        #[command(flatten)]
        common: Common,
        /// Point as a complex literal, e.g. `0`, `0.5i`, `1-2i`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Render a phase portrait to a binary PPM file.
    Portrait {
        #[command(flatten)]
        common: Common,
        /// Window as `x0,y0,x1,y1` (lower left and upper right corners).
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Square image size in pixels; overridden by --width/--height.
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Which zeros to mark with black dots.
        #[arg(long, value_enum, default_value_t = Marks::None)]
        mark: Marks,
        /// Extra marker position; may be repeated.
        #[arg(long, allow_hyphen_values = true)]
        marker: Vec<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Argument-principle audit; exits 1 when inconsistent.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
        /// Audit on the circle `center,radius` instead of the global large circle.
        #[arg(long, allow_hyphen_values = true)]
        circle: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// The analytic part h, e.g. `z/(z^2-1)` or `exp(z)-1`.
    #[arg(long = "h", allow_hyphen_values = true)]
    h: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Half width of the band around |h'| = 1 treated as singular.
    #[arg(long, default_value_t = classifier::SINGULAR_TOL)]
    tol_singular: f64,
    /// Largest |f| accepted at a point passed to `index`.
    #[arg(long, default_value_t = classifier::ZERO_TOL)]
    tol_zero: f64,
    /// Taylor order used by the coefficient criteria.
    #[arg(long, default_value_t = harmonic_index::function::DEFAULT_ORDER)]
    order: usize,
}

#[derive(Args)]
struct Search {
    /// Search square as `half_width`, `center,half_width` or `re,im,half_width`.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
    /// Grid points per axis for seeding.
    #[arg(long, default_value_t = zeros::DEFAULT_GRID)]
    grid: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Marks {
    None,
    Zeros,
    Singular,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::BadExponent { .. } | Error::ZeroDenominator => EXIT_PARSE,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<u8, Failure>;

impl Common {
    fn mapping(&self) -> Result<HarmonicMapping, Failure> {
        Ok(HarmonicMapping::parse(&self.h)?)
    }

    fn options(&self) -> IndexOptions {
        IndexOptions {
            singular_tol: self.tol_singular,
            zero_tol: self.tol_zero,
            order: self.order,
            ..IndexOptions::default()
        }
    }
}

fn parse_complex(text: &str) -> Result<Complex, Failure> {
    let bad = || Failure::usage(format!("`{text}` is not a complex literal"));
    let h = parse_function(text).map_err(|_| bad())?;
    match h.canonical() {
        CanonicalForm::Polynomial { coeffs } if coeffs.degree() == 0 || coeffs.is_zero() => {
            Ok(coeffs.coeff(0))
        }
        _ => Err(bad()),
    }
}

fn parse_reals(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::usage(format!("bad {what} `{text}`")))
}

fn parse_region(text: &str, grid: usize) -> Result<SearchRegion, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    let (center, half_width) = match parts.as_slice() {
        [hw] => (Complex::new(0.0, 0.0), *hw),
        [c, hw] => (parse_complex(c)?, *hw),
        [re, im, hw] => {
            let v = parse_reals(&format!("{re},{im}"), "region center")?;
            (Complex::new(v[0], v[1]), *hw)
        }
        _ => return Err(Failure::usage(format!("bad region `{text}`"))),
    };
    let half_width = parse_reals(half_width, "region half width")?[0];
    Ok(SearchRegion::new(center, half_width, grid)?)
}

impl Search {
    fn region(&self, f: &HarmonicMapping) -> Result<SearchRegion, Failure> {
        match &self.region {
            Some(text) => parse_region(text, self.grid),
            None => {
                let r = zeros::default_region(f);
                Ok(SearchRegion::new(r.center, r.half_width, self.grid)?)
            }
        }
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("reports serialize")
        ),
        Format::Text => print!("{}", text()),
    }
}

fn fmt_complex(z: Complex) -> String {
    let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im >= 0.0 {
        format!("{re:.10}+{im:.10}i")
    } else {
        format!("{re:.10}-{:.10}i", -im)
    }
}

fn fmt_value(v: Option<i64>) -> String {
    v.map_or("indeterminate".into(), |v| {
        if v == 0 {
            "0".into()
        } else {
            format!("{v:+}")
        }
    })
}

fn fmt_verdict(v: &IndexVerdict) -> String {
    let mut s = format!("{} ({:?}", fmt_value(v.value), v.method);
    if let Some(n) = v.details.n {
        s += &format!(", n = {n}");
    }
    if let Some(eta) = v.details.eta {
        s += &format!(", eta = {eta:.6}");
    }
    if v.theorem_indeterminate {
        s += ", coefficient criterion silent";
    }
    s + ")"
}

fn fmt_point(p: &ExceptionalPoint) -> String {
    let what = match p.kind {
        zeros::PointKind::Zero { class } => format!("zero  {:?}", class.sense),
        zeros::PointKind::Pole { order } => format!("pole  order {order}"),
    };
    let index = match (&p.verdict, p.isolated) {
        (_, false) => "not isolated".to_string(),
        (Some(v), true) => fmt_verdict(v),
        (None, true) => "unknown".to_string(),
    };
    let oracle = p
        .numeric_index
        .map(|n| format!("  [oracle {n:+}]"))
        .unwrap_or_default();
    format!(
        "  {}  {what}  index {index}{oracle}\n",
        fmt_complex(p.location)
    )
}

fn fmt_audit(a: &AuditSummary) -> String {
    let mut s = format!(
        "winding {}  index sum {}  {}\n",
        a.winding,
        a.index_sum,
        if a.consistent {
            "consistent"
        } else {
            "INCONSISTENT"
        }
    );
    if let Some(e) = a.expected_winding {
        s += &format!("predicted winding {e}\n");
    }
    for p in &a.points {
        s += &format!(
            "  {}  {}  index {}{}\n",
            fmt_complex(p.z),
            p.kind,
            fmt_value(p.index),
            if p.interior { "" } else { "  (outside)" }
        );
    }
    for n in &a.notes {
        s += &format!("note: {n}\n");
    }
    s
}

#[derive(Serialize)]
struct ZerosOutput<'a> {
    region: SearchRegion,
    zeros: &'a [ExceptionalPoint],
    budget_exceeded: bool,
    notes: &'a [String],
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    function: FunctionSummary,
    poles: Vec<ExceptionalPoint>,
    region: SearchRegion,
    zeros: &'a [ExceptionalPoint],
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<AuditSummary>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct IndexOutput {
    at: Complex,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<PointClass>,
    #[serde(flatten)]
    verdict: IndexVerdict,
}

#[derive(Serialize)]
struct PortraitOutput {
    path: PathBuf,
    window: Window,
    degenerate_pixels: usize,
    markers: Vec<Complex>,
}

fn analyze(common: &Common, search: &Search) -> Outcome {
    let f = common.mapping()?;
    let region = search.region(&f)?;
    let opts = common.options();
    let report = zeros::find_zeros_with(&f, &region, &opts)?;
    let poles = if f.h().is_rational() {
        zeros::pole_points(&f)?
    } else {
        Vec::new()
    };
    let mut notes = report.notes.clone();
    let audit = if f.h().is_rational() {
        match verifier::audit_global_with(&f, &region, &opts) {
            Ok(a) => Some(a.summary()),
            Err(e) => {
                notes.push(format!("no global audit: {e}"));
                None
            }
        }
    } else {
        None
    };
    let out = AnalyzeOutput {
        function: FunctionSummary::from(f.h()),
        poles,
        region,
        zeros: &report.zeros,
        audit,
        notes,
    };
    emit(common.format, &out, || {
        let mut s = format!("h(z) = {}\n", f.h().text());
        if let Some(t) = out.function.rational_type {
            s += &format!("rational of type ({}, {})\n", t.numerator, t.denominator);
        }
        s += &format!("poles: {}\n", out.poles.len());
        for p in &out.poles {
            s += &fmt_point(p);
        }
        s += &format!("zeros: {}\n", out.zeros.len());
        for p in out.zeros {
            s += &fmt_point(p);
        }
        if let Some(a) = &out.audit {
            s += &fmt_audit(a);
        }
        for n in &out.notes {
            s += &format!("note: {n}\n");
        }
        s
    });
    Ok(0)
}

fn list_zeros(common: &Common, search: &Search) -> Outcome {
    let f = common.mapping()?;
    let region = search.region(&f)?;
    let report = zeros::find_zeros_with(&f, &region, &common.options())?;
    let out = ZerosOutput {
        region,
        zeros: &report.zeros,
        budget_exceeded: report.budget_exceeded,
        notes: &report.notes,
    };
    emit(common.format, &out, || {
        let mut s = format!("{} zeros\n", report.zeros.len());
        for p in &report.zeros {
            s += &fmt_point(p);
        }
        s
    });
    Ok(0)
}

fn index(common: &Common, at: &str) -> Outcome {
    let f = common.mapping()?;
    let z0 = parse_complex(at)?;
    let opts = common.options();
    let verdict = classifier::index_with(&f, z0, &opts)?;
    let class = classifier::classify_point(&f, z0, opts.singular_tol).ok();
    let out = IndexOutput {
        at: z0,
        class,
        verdict,
    };
    emit(common.format, &out, || {
        format!("index at {}: {}\n", fmt_complex(z0), fmt_verdict(&verdict))
    });
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn render(
    common: &Common,
    window: Option<&str>,
    size: usize,
    width: Option<usize>,
    height: Option<usize>,
    mark: Marks,
    extra: &[String],
    out: &Path,
) -> Outcome {
    let f = common.mapping()?;
    let (w, h) = (width.unwrap_or(size), height.unwrap_or(size));
    let window = match window {
        Some(text) => {
            let v = parse_reals(text, "window")?;
            if v.len() != 4 {
                return Err(Failure::usage(format!(
                    "window needs four numbers, got `{text}`"
                )));
            }
            Window::new(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]), w, h)?
        }
        None => {
            let r = zeros::default_region(&f);
            let d = Complex::new(r.half_width, r.half_width);
            Window::new(r.center - d, r.center + d, w, h)?
        }
    };
    let mut markers: Vec<Complex> = extra
        .iter()
        .map(|m| parse_complex(m))
        .collect::<Result<_, _>>()?;
    if mark != Marks::None {
        let half = (window.upper_right - window.lower_left) / 2.0;
        let region = SearchRegion::new(
            window.lower_left + half,
            half.re.max(half.im),
            zeros::DEFAULT_GRID,
        )?;
        let report = zeros::find_zeros_with(&f, &region, &common.options())?;
        markers.extend(
            report
                .zeros
                .iter()
                .filter(|p| match (mark, p.kind) {
                    (Marks::Singular, zeros::PointKind::Zero { class }) => {
                        class.sense == classifier::Sense::Singular
                    }
                    _ => true,
                })
                .map(|p| p.location),
        );
    }
    let image = portrait::render(&f, &window, &markers);
    image.write_ppm(out).map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: format!("writing {}: {e}", out.display()),
    })?;
    let report = PortraitOutput {
        path: out.to_path_buf(),
        window,
        degenerate_pixels: image.degenerate_pixels,
        markers,
    };
    emit(common.format, &report, || {
        format!(
            "wrote {} ({}x{}, {} degenerate pixels, {} markers)\n",
            out.display(),
            image.width,
            image.height,
            image.degenerate_pixels,
            report.markers.len()
        )
    });
    Ok(0)
}

fn verify(common: &Common, search: &Search, circle: Option<&str>) -> Outcome {
    let f = common.mapping()?;
    let opts = common.options();
    let report = match circle {
        None => {
            let region = search.region(&f)?;
            verifier::audit_global_with(&f, &region, &opts)?
        }
        Some(text) => {
            let parts: Vec<&str> = text.rsplitn(2, ',').collect();
            let [radius, center] = parts.as_slice() else {
                return Err(Failure::usage(format!(
                    "circle needs `center,radius`, got `{text}`"
                )));
            };
            let center = parse_complex(center)?;
            let radius = parse_reals(radius, "circle radius")?[0];
            let curve = ClosedCurve::circle(center, radius)?;
            let region = match &search.region {
                Some(r) => parse_region(r, search.grid)?,
                None => SearchRegion::new(center, 1.25 * radius, search.grid)?,
            };
            let mut points = zeros::find_zeros_with(&f, &region, &opts)?.zeros;
            if f.h().is_rational() {
                points.extend(zeros::pole_points(&f)?);
            }
            verifier::audit_curve(&f, &curve, &points)?
        }
    };
    let summary = report.summary();
    emit(common.format, &summary, || fmt_audit(&summary));
    Ok(if report.consistent {
        0
    } else {
        EXIT_INCONSISTENT
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var("HARMONIC_INDEX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = match &cli.command {
        Command::Analyze { common, search } => analyze(common, search),
        Command::Zeros { common, search } => list_zeros(common, search),
        Command::Index { common, at } => index(common, at),
        Command::Portrait {
            common,
            window,
            size,
            width,
            height,
            mark,
            marker,
            out,
        } => render(
            common,
            window.as_deref(),
            *size,
            *width,
            *height,
            *mark,
            marker,
            out,
        ),
        Command::Verify {
            common,
            search,
            circle,
        } => verify(common, search, circle.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
