//! One function per subcommand. Each returns the document plus the side
//! files it wants written; nothing touches the filesystem here.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pseudounitary::canon2::{canonical_form_2x2, log_2x2, FormKind};
use pseudounitary::logmap::log_from_structure;
use pseudounitary::matcore::expm;
use pseudounitary::metric::{build_metric, classify_group, MetricParams};
use pseudounitary::oscsim::{build_oscillator, classify_oscillator, commutant, conserved_inner_product, sigma3, simulate};
use pseudounitary::pseudospec::{analyze_pseudo_unitary, det_unimodular, is_eta_pseudo_unitary, PseudoUnitaryAnalysis};
use pseudounitary::sympl::{eta_j, is_symplectic};
use pseudounitary::{CMatrix, Error, DEFAULT_TOL};
use serde_json::{json, Value};

use crate::doc::{digest, VerdictDocument};
use crate::error::CliError;
use crate::io::{load, Loaded, MatrixFile};

pub struct Report {
    pub doc: VerdictDocument,
    pub side_files: Vec<(PathBuf, Vec<u8>)>,
}

impl Report {
    fn bare(doc: VerdictDocument) -> Self {
        Self { doc, side_files: Vec::new() }
    }
}

/// `--tol` beats the file's `tol`, which beats the default.
pub fn effective_tol(flag: Option<f64>, file: &MatrixFile) -> f64 {
    flag.or(file.tol).unwrap_or(DEFAULT_TOL)
}

fn rows(m: &CMatrix) -> Value {
    serde_json::to_value(m.rows()).expect("finite entries serialize")
}

/// `‖U†ηU − η‖_F / ‖η‖_F`.
pub fn witness_residual(u: &CMatrix, eta: &CMatrix) -> f64 {
    (&(&(&u.adjoint() * eta) * u) - eta).norm() / eta.norm()
}

/// Analysis, or a negative document when `U` is singular.
fn analyze(command: &str, u: &CMatrix, digest: &str) -> Result<Result<PseudoUnitaryAnalysis, VerdictDocument>, CliError> {
    match analyze_pseudo_unitary(u) {
        Ok(a) => Ok(Ok(a)),
        Err(Error::ZeroEigenvalue(z)) => Ok(Err(VerdictDocument::new(
            command,
            digest.to_string(),
            false,
            json!({ "reason": "singular", "zero_eigenvalue": z }),
        ))),
        Err(Error::Singular { min_modulus }) => Ok(Err(VerdictDocument::new(
            command,
            digest.to_string(),
            false,
            json!({ "reason": "singular", "min_modulus": min_modulus }),
        ))),
        Err(e) => Err(e.into()),
    }
}

fn not_pseudo_unitary(command: &str, digest: &str, a: &PseudoUnitaryAnalysis) -> VerdictDocument {
    VerdictDocument::new(
        command,
        digest.to_string(),
        false,
        json!({
            "reason": "not pseudo-unitary",
            "unpaired": a.pairing.unpaired_eigenvalues(),
            "verdict": a.verdict,
        }),
    )
}

pub fn classify(input: &Loaded, tol_flag: Option<f64>) -> Result<Report, CliError> {
    let tol = effective_tol(tol_flag, &input.file);
    let u = input.file.to_matrix(tol)?;
    let d = digest(&input.bytes);
    let det = det_unimodular(&u);
    let det_value = det.witness[0];
    let doc = match analyze("classify", &u, &d)? {
        Err(neg) => neg,
        Ok(a) => VerdictDocument::new(
            "classify",
            d,
            a.verdict.decision,
            json!({
                "n": u.n(),
                "verdict": a.verdict,
                "pairing": a.pairing,
                "determinant": det_value,
                "det_modulus": det_value.norm(),
                "det_unimodular": det.decision,
            }),
        )
        .residual("pairing_defect", a.pairing.max_defect),
    };
    Ok(Report::bare(doc.residual("det_modulus_gap", det.residual).param("tol", tol)))
}

pub struct MetricArgs {
    pub rho: Vec<f64>,
    pub signs: Vec<i8>,
    pub seed_columns: Vec<Vec<Complex64>>,
    pub eta_out: PathBuf,
    pub eta_inv_out: PathBuf,
}

pub fn metric(input: &Loaded, tol_flag: Option<f64>, args: &MetricArgs) -> Result<Report, CliError> {
    let tol = effective_tol(tol_flag, &input.file);
    let u = input.file.to_matrix(tol)?;
    let d = digest(&input.bytes);
    let params = MetricParams {
        rho: args.rho.clone(),
        signs: args.signs.clone(),
        paired_columns: args.seed_columns.iter().cloned().map(Some).collect(),
    };
    let a = match analyze("metric", &u, &d)? {
        Err(neg) => return Ok(Report::bare(neg.param("tol", tol).param("metric", &params))),
        Ok(a) if !a.verdict.decision => return Ok(Report::bare(not_pseudo_unitary("metric", &d, &a).param("tol", tol).param("metric", &params))),
        Ok(a) => a,
    };
    let m = build_metric(&a.jordan, &a.pairing, &params)?;
    let group = classify_group(&m.eta)?;
    let witness = witness_residual(&u, &m.eta);
    let doc = VerdictDocument::new(
        "metric",
        d,
        true,
        json!({
            "signature": { "negatives": group.negatives, "positives": group.positives },
            "group": group.to_string(),
            "eta": rows(&m.eta),
            "eta_file": args.eta_out.display().to_string(),
            "eta_inverse_file": args.eta_inv_out.display().to_string(),
        }),
    )
    .residual("witness", witness)
    .residual("inverse", m.inverse_residual)
    .residual("witness_reassembled", m.witness_residual)
    .param("tol", tol)
    .param("metric", &params);
    Ok(Report {
        doc,
        side_files: vec![
            (args.eta_out.clone(), MatrixFile::from_matrix(&m.eta, Some(tol)).to_json()),
            (args.eta_inv_out.clone(), MatrixFile::from_matrix(&m.eta_inverse, Some(tol)).to_json()),
        ],
    })
}

pub fn log(input: &Loaded, tol_flag: Option<f64>, h_out: &Path) -> Result<Report, CliError> {
    let tol = effective_tol(tol_flag, &input.file);
    let u = input.file.to_matrix(tol)?;
    let d = digest(&input.bytes);
    let a = match analyze("log", &u, &d)? {
        Err(neg) => return Ok(Report::bare(neg.param("tol", tol))),
        Ok(a) if !a.verdict.decision => return Ok(Report::bare(not_pseudo_unitary("log", &d, &a).param("tol", tol))),
        Ok(a) => a,
    };
    let r = log_from_structure(&u, &a.jordan, &a.pairing)?;
    let spectrum: Vec<Value> = r
        .structure
        .items()
        .iter()
        .map(|it| json!({ "eigenvalue": it.eigenvalue, "jordan_dimensions": it.jordan_dimensions }))
        .collect();
    let doc = VerdictDocument::new(
        "log",
        d,
        true,
        json!({
            "h": rows(&r.h),
            "h_file": h_out.display().to_string(),
            "relocations": r.relocations,
            "spectrum": spectrum,
        }),
    )
    .residual("exp_residual", r.residual)
    .residual("exp_residual_relative", r.residual / u.norm())
    .param("tol", tol);
    Ok(Report { doc, side_files: vec![(h_out.to_path_buf(), MatrixFile::from_matrix(&r.h, Some(tol)).to_json())] })
}

pub fn canon2(input: &Loaded, tol_flag: Option<f64>) -> Result<Report, CliError> {
    let tol = effective_tol(tol_flag, &input.file);
    let u = input.file.to_matrix(tol)?;
    let d = digest(&input.bytes);
    let form = canonical_form_2x2(&u)?;
    if form.kind == FormKind::NotPseudoUnitary {
        let doc = VerdictDocument::new("canon2", d, false, json!({ "kind": form.kind.to_string() }));
        return Ok(Report::bare(doc.param("tol", tol)));
    }
    let dm = form.d()?;
    let h_d = log_2x2(&form)?;
    let h_u = form.log_for_u(&h_d)?;
    let a = form.transformer.as_ref().expect("pseudo-unitary forms carry A");
    let mut payload = json!({
        "kind": form.kind.to_string(),
        "theta": form.theta,
        "d": rows(&dm),
        "transformer": rows(a),
        "metric_family": form.metric_family.map(|f| f.to_string()),
        "proportional_to_identity": form.proportional_to_identity,
        "log_d": rows(&h_d),
        "log_u": rows(&h_u),
    });
    match form.kind {
        FormKind::D1 => payload["phi"] = json!(form.phi),
        FormKind::D2 => payload["r"] = json!(form.r),
        _ => {}
    }
    let exp_residual = expm(&h_u.scale(Complex64::new(0.0, 1.0)))?.rel_distance(&u);
    let doc = VerdictDocument::new("canon2", d, true, payload)
        .residual("reconstruction", form.reconstruct()?.rel_distance(&u))
        .residual("exp_residual_relative", exp_residual)
        .param("tol", tol);
    Ok(Report::bare(doc))
}

pub fn symplectic(input: &Loaded, tol_flag: Option<f64>) -> Result<Report, CliError> {
    let tol = effective_tol(tol_flag, &input.file);
    let s = input.file.to_matrix(tol)?;
    let d = digest(&input.bytes);
    let r = is_symplectic(&s)?;
    let group = classify_group(&eta_j(s.n() / 2))?;
    let det_ok = r.det_check <= r.det_threshold;
    let decision = r.is_real && r.is_symplectic && r.is_eta_j_pseudo_unitary && det_ok && r.quadruples_complete();
    let doc = VerdictDocument::new(
        "symplectic",
        d,
        decision,
        json!({
            "report": r,
            "det_ok": det_ok,
            "quadruples_complete": r.quadruples_complete(),
            "ambient_group": group.to_string(),
        }),
    )
    .residual("symplectic", r.symplectic_residual)
    .residual("eta_j", r.eta_j_residual)
    .residual("imaginary", r.imag_residual)
    .residual("determinant", r.det_check)
    .param("tol", tol);
    Ok(Report::bare(doc))
}

#[derive(Debug, Clone, PartialEq)]
pub enum EtaChoice {
    Sigma3,
    Auto,
    File(PathBuf),
}

impl std::str::FromStr for EtaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "sigma3" => EtaChoice::Sigma3,
            "auto" => EtaChoice::Auto,
            "" => return Err("empty metric choice".into()),
            path => EtaChoice::File(PathBuf::from(path)),
        })
    }
}

pub struct OscillatorArgs {
    pub omega_sq: f64,
    pub lambda: f64,
    pub hbar: f64,
    pub x0: f64,
    pub v0: f64,
    pub t_max: f64,
    pub steps: usize,
    pub eta: EtaChoice,
}

pub fn oscillator(args: &OscillatorArgs, tol_flag: Option<f64>) -> Result<Report, CliError> {
    let tol = tol_flag.unwrap_or(DEFAULT_TOL);
    if !(args.t_max.is_finite() && args.t_max >= 0.0) {
        return Err(CliError::Input(format!("--t-max must be finite and nonnegative, got {}", args.t_max)));
    }
    if args.steps == 0 {
        return Err(CliError::Input("--steps must be positive".into()));
    }
    if !(args.x0.is_finite() && args.v0.is_finite()) {
        return Err(CliError::Input("initial data must be finite".into()));
    }
    let model = build_oscillator(args.omega_sq, args.lambda, args.hbar)?;
    let comm = commutant(&model.h, tol)?;
    let mut digest_input = serde_json::to_vec(&json!({
        "omega_sq": args.omega_sq, "lambda": args.lambda, "hbar": args.hbar,
        "x0": args.x0, "v0": args.v0, "t_max": args.t_max, "steps": args.steps,
    }))
    .expect("parameters serialize");
    let (eta, eta_label) = match &args.eta {
        EtaChoice::Sigma3 => (sigma3(), "sigma3".to_string()),
        EtaChoice::Auto => match comm.positive_definite() {
            Some(e) => (e, "auto: positive definite".to_string()),
            None => (sigma3(), "auto: sigma3".to_string()),
        },
        EtaChoice::File(p) => {
            let loaded = load(p)?;
            digest_input.extend_from_slice(&loaded.bytes);
            let e = loaded.file.to_matrix(effective_tol(tol_flag, &loaded.file))?;
            if e.n() != 2 {
                return Err(CliError::Input(format!("metric file must be 2×2, found {}×{}", e.n(), e.n())));
            }
            (e, format!("file: {}", p.display()))
        }
    };
    let times: Vec<f64> = (0..=args.steps).map(|k| args.t_max * k as f64 / args.steps as f64).collect();
    let states = simulate(&model, args.x0, args.v0, &times)?;
    let cons = conserved_inner_product(&model, &states, &eta)?;
    let regime = classify_oscillator(&model)?;
    let table: Vec<Value> = states
        .iter()
        .zip(&cons.values)
        .map(|(s, v)| json!([s.t, s.x, s.xdot, v.re, v.im]))
        .collect();
    let decision = !cons.warning && cons.is_conserved();
    let doc = VerdictDocument::new(
        "oscillator",
        digest(&digest_input),
        decision,
        json!({
            "regime": regime,
            "eta": rows(&eta),
            "eta_choice": eta_label,
            "warning": cons.warning,
            "commutant": {
                "dimension": comm.basis.len(),
                "admits_positive_definite": comm.admits_positive_definite,
                "admits_indefinite": comm.admits_indefinite,
            },
            "table": { "columns": ["t", "x", "xdot", "eta_inner_re", "eta_inner_im"], "rows": table },
        }),
    )
    .residual("drift", cons.drift)
    .residual("drift_tolerance", cons.drift_tolerance())
    .residual("metric", cons.metric_residual)
    .param("omega_sq", args.omega_sq)
    .param("lambda", args.lambda)
    .param("hbar", args.hbar)
    .param("x0", args.x0)
    .param("v0", args.v0)
    .param("t_max", args.t_max)
    .param("steps", args.steps)
    .param("tol", tol);
    Ok(Report::bare(doc))
}

pub fn verify(matrix: &Loaded, eta: &Loaded, recorded: Option<(f64, &[u8])>, tol_flag: Option<f64>) -> Result<Report, CliError> {
    let tol = effective_tol(tol_flag, &matrix.file);
    let u = matrix.file.to_matrix(tol)?;
    let e = eta.file.to_matrix(tol)?;
    if e.n() != u.n() {
        return Err(CliError::Input(format!("matrix is {0}×{0} but metric is {1}×{1}", u.n(), e.n())));
    }
    let verdict = is_eta_pseudo_unitary(&u, &e)?;
    let residual = witness_residual(&u, &e);
    let mut bytes = matrix.bytes.clone();
    bytes.extend_from_slice(&eta.bytes);
    let (decision, recorded_value) = match recorded {
        Some((r, doc_bytes)) => {
            bytes.extend_from_slice(doc_bytes);
            (residual <= 2.0 * r.max(f64::EPSILON), Some(r))
        }
        None => (verdict.decision, None),
    };
    let doc = VerdictDocument::new(
        "verify",
        digest(&bytes),
        decision,
        json!({
            "eta_pseudo_unitary": verdict.decision,
            "threshold": verdict.threshold,
            "recorded_witness": recorded_value,
        }),
    )
    .residual("witness", residual)
    .param("tol", tol);
    Ok(Report::bare(doc))
}

/// `residuals.witness` of a stored metric document.
pub fn recorded_witness(doc_bytes: &[u8]) -> Result<f64, CliError> {
    let v: Value = serde_json::from_slice(doc_bytes).map_err(|e| CliError::Input(format!("document: {e}")))?;
    v.get("residuals")
        .and_then(|r| r.get("witness"))
        .and_then(Value::as_f64)
        .ok_or_else(|| CliError::Input("document has no residuals.witness".into()))
}
