//! JSON-in, JSON-out verification front end.
//!
//! Exit codes: 0 = pass, 1 = check failed (report still printed),
//! 2 = usage or input error (message on stderr).

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use freespectra::catalog::{self, CatalogParams};
use freespectra::certify::{self, HereditaryPoly};
use freespectra::convexotonic::{self, ConvexotonicTuple};
use freespectra::gallery::{self, PQFamily};
use freespectra::generic;
use freespectra::json::{
    map_to_json, matrix_from_json, matrix_to_json, tuple_to_json, MatrixJson, PencilJson,
    SeriesJson, XiJson,
};
use freespectra::linalg;
use freespectra::pencil::Pencil;
use freespectra::rng;
use freespectra::series::FreeSeries;
use freespectra::tuple::MatrixTuple;
use freespectra::word::Word;

#[derive(Parser)]
#[command(name = "freespectra", version, about = "Free spectrahedra and convexotonic maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a tuple of structure matrices satisfies the convexotonic
    /// relations.
    VerifyXi {
        /// JSON file with fields g and Xi.
        file: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Recover structure matrices from an algebra basis.
    Structure {
        /// JSON tuple file for the basis R.
        #[arg(long = "R")]
        r: String,
        /// Optional spanning tuple E (defaults to R itself).
        #[arg(long = "E")]
        e: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Evaluate the convexotonic map (or its inverse) at a matrix point.
    Eval {
        #[arg(long)]
        xi: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = false)]
        inverse: bool,
    },
    /// Verify that the map and its inverse compose to the identity.
    InverseCheck {
        #[arg(long)]
        xi: String,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance for the composed-series coefficients.
        #[arg(long, default_value_t = 1e-10)]
        series_tol: f64,
        /// Tolerance for sampled round trips.
        #[arg(long, default_value_t = 1e-8)]
        sample_tol: f64,
    },
    /// List the built-in algebras, or print one entry.
    Catalog {
        id: Option<String>,
        /// Parameter for the parametric g = 3 family.
        #[arg(long)]
        alpha: Option<f64>,
        /// Row vector for the ball family, as JSON, e.g. "[[0.4,0],[0,0.3]]".
        #[arg(long)]
        v: Option<String>,
        /// Variable count for the truncated-shift family.
        #[arg(long)]
        size: Option<usize>,
    },
    /// Build and verify a one-term positivity certificate from (A, C, W0).
    Certify {
        #[arg(long = "A")]
        a: String,
        #[arg(long = "C")]
        c: String,
        #[arg(long = "W0")]
        w0: Option<String>,
        #[arg(long, default_value_t = 5)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        fock_order: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        sample_tol: f64,
    },
    /// Search for genericity witnesses of a pencil.
    Generic {
        #[arg(long = "A")]
        a: String,
        /// One of sv, eig, star.
        #[arg(long, default_value = "sv")]
        mode: String,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a spectrahedral pair from a catalog algebra and a random
    /// unitary, then verify it.
    Pair {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// The block two-variable family: map, extraction, and optional
    /// automorphism.
    Pq {
        /// Unimodular parameter, e.g. "-1", "i", or "[0.5,0.866]".
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        gamma: String,
        /// "default" uses P22 = I; "span" uses the automorphic variant.
        #[arg(long, default_value = "default")]
        p22_mode: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha1: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha3: String,
        /// When set, also emit the automorphism s_phi (requires span mode).
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample indefiniteness evidence that a spectrahedron is bounded.
    Bounded {
        #[arg(long = "A")]
        a: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify a hereditary sum-of-squares certificate.
    Hereditary {
        /// Pencil JSON file.
        #[arg(long)]
        pencil: String,
        /// Hereditary polynomial file: {g, nu, terms:[{left,right,coeff}]}.
        #[arg(long = "h")]
        h: String,
        /// JSON array of series for the plain squares.
        #[arg(long)]
        squares: Option<String>,
        /// JSON array of series for the pencil weights.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// Tracks every byte that influences the run, for the report digest.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new() -> Self {
        let mut hasher = Sha256::new();
        for arg in std::env::args() {
            hasher.update(arg.as_bytes());
            hasher.update([0]);
        }
        Inputs { hasher }
    }

    fn load<T: DeserializeOwned>(&mut self, path: &str) -> Result<T, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("{path}: {e}"))?;
        self.hasher.update(&bytes);
        serde_json::from_slice(&bytes).map_err(|e| format!("{path}: {e}"))
    }

    fn digest(self) -> String {
        let out = self.hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize)]
struct Report {
    command: String,
    digest: String,
    seed: u64,
    verdict: String,
    residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<Value>,
}

struct Outcome {
    pass: bool,
    seed: u64,
    residuals: BTreeMap<String, f64>,
    data: Option<Value>,
}

impl Outcome {
    fn new(pass: bool) -> Self {
        Outcome {
            pass,
            seed: 0,
            residuals: BTreeMap::new(),
            data: None,
        }
    }

    fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), value);
        self
    }

    fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    fn data(mut self, v: Value) -> Self {
        self.data = Some(v);
        self
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    match t {
        "i" => return Ok(Complex64::new(0.0, 1.0)),
        "-i" => return Ok(Complex64::new(0.0, -1.0)),
        _ => {}
    }
    if t.starts_with('[') {
        let v: [f64; 2] = serde_json::from_str(t).map_err(|e| format!("bad complex {t:?}: {e}"))?;
        return Ok(Complex64::new(v[0], v[1]));
    }
    t.parse::<f64>()
        .map(|x| Complex64::new(x, 0.0))
        .map_err(|e| format!("bad complex {t:?}: {e}"))
}

fn xi_from_file(inputs: &mut Inputs, path: &str, tol: f64) -> Result<ConvexotonicTuple, String> {
    let j: XiJson = inputs.load(path)?;
    let tuple = j.to_tuple().map_err(|e| e.to_string())?;
    ConvexotonicTuple::validated(tuple, tol).map_err(|e| e.to_string())
}

fn pencil_from_file(inputs: &mut Inputs, path: &str) -> Result<Pencil, String> {
    let j: PencilJson = inputs.load(path)?;
    j.to_pencil().map_err(|e| e.to_string())
}

fn run(cmd: &Command, inputs: &mut Inputs) -> Result<Outcome, String> {
    match cmd {
        Command::VerifyXi { file, tol } => {
            let j: XiJson = inputs.load(file)?;
            let tuple = j.to_tuple().map_err(|e| e.to_string())?;
            let xi = ConvexotonicTuple::new_unchecked(tuple).map_err(|e| e.to_string())?;
            let residual = xi.relation_residual();
            Ok(Outcome::new(residual <= *tol).residual("relation", residual))
        }
        Command::Structure { r, e, tol } => {
            let rj: Vec<MatrixJson> = inputs.load(r)?;
            let r_tuple = freespectra::json::tuple_from_json(&rj).map_err(|e| e.to_string())?;
            let e_tuple = match e {
                Some(path) => {
                    let ej: Vec<MatrixJson> = inputs.load(path)?;
                    freespectra::json::tuple_from_json(&ej).map_err(|e| e.to_string())?
                }
                None => r_tuple.clone(),
            };
            match convexotonic::structure_matrices(&e_tuple, &r_tuple, *tol) {
                Ok(xi) => {
                    let residual = xi.relation_residual();
                    Ok(Outcome::new(true)
                        .residual("relation", residual)
                        .data(json!({ "g": xi.g(), "Xi": tuple_to_json(xi.tuple()) })))
                }
                Err(e) => Ok(Outcome::new(false).data(json!({ "error": e.to_string() }))),
            }
        }
        Command::Eval { xi, point, inverse } => {
            let t = xi_from_file(inputs, xi, 1e-12)?;
            let xj: Vec<MatrixJson> = inputs.load(point)?;
            let x = freespectra::json::tuple_from_json(&xj).map_err(|e| e.to_string())?;
            let y = t.map_eval(&x, *inverse).map_err(|e| e.to_string())?;
            Ok(Outcome::new(true).data(json!({ "value": tuple_to_json(&y) })))
        }
        Command::InverseCheck {
            xi,
            degree,
            samples,
            seed,
            series_tol,
            sample_tol,
        } => {
            let t = xi_from_file(inputs, xi, 1e-12)?;
            let rep = t
                .verify_inverse_pair(*degree, *samples, *seed)
                .map_err(|e| e.to_string())?;
            let pass = rep.series_residual <= *series_tol && rep.sample_residual <= *sample_tol;
            Ok(Outcome::new(pass)
                .seed(*seed)
                .residual("series", rep.series_residual)
                .residual("samples", rep.sample_residual))
        }
        Command::Catalog { id, alpha, v, size } => match id {
            None => {
                let entries: Vec<Value> = catalog::list()
                    .into_iter()
                    .map(|(id, desc)| json!({ "id": id, "description": desc }))
                    .collect();
                Ok(Outcome::new(true).data(json!({ "entries": entries })))
            }
            Some(id) => {
                let mut params = CatalogParams::default();
                params.alpha = *alpha;
                params.size = *size;
                if let Some(vs) = v {
                    let vv: Vec<[f64; 2]> =
                        serde_json::from_str(vs).map_err(|e| format!("bad --v: {e}"))?;
                    params.v = Some(vv.iter().map(|z| Complex64::new(z[0], z[1])).collect());
                }
                let entry = catalog::get(id, &params).map_err(|e| e.to_string())?;
                Ok(Outcome::new(true)
                    .residual("relation", entry.xi.relation_residual())
                    .data(json!({
                        "id": entry.id,
                        "g": entry.g,
                        "relations": entry.relations,
                        "Xi": tuple_to_json(entry.xi.tuple()),
                        "basis": tuple_to_json(&entry.basis),
                        "p": map_to_json(&entry.p),
                        "q": map_to_json(&entry.q),
                    })))
            }
        },
        Command::Certify {
            a,
            c,
            w0,
            degree,
            fock_order,
            samples,
            radius,
            seed,
            tol,
            sample_tol,
        } => {
            let pencil = pencil_from_file(inputs, a)?;
            let cj: MatrixJson = inputs.load(c)?;
            let cmat = matrix_from_json(&cj).map_err(|e| e.to_string())?;
            let w0_mat = match w0 {
                Some(path) => {
                    let wj: MatrixJson = inputs.load(path)?;
                    matrix_from_json(&wj).map_err(|e| e.to_string())?
                }
                None => linalg::identity(pencil.d()),
            };
            let n = (*degree).max(*fock_order);
            let cert = certify::build_certificate(&pencil, &cmat, &w0_mat, n)
                .map_err(|e| e.to_string())?;
            let rel = certify::verify_relations(&cert, *degree);
            let nil = certify::verify_on_nilpotents(&cert, *fock_order)
                .map_err(|e| e.to_string())?;
            let samp = certify::verify_on_samples(&cert, *samples, *radius, *seed);
            let pass = rel.max_residual() <= *tol
                && nil.max_residual() <= *tol
                && samp.max_residual <= *sample_tol;
            Ok(Outcome::new(pass)
                .seed(*seed)
                .residual("quadratic", rel.quadratic)
                .residual("linear", rel.linear)
                .residual("isometry", rel.isometry)
                .residual("w_recursion", rel.w_recursion)
                .residual("g_formula", rel.g_formula)
                .residual("fock", nil.fock_residual)
                .residual("nilpotent_samples", nil.sample_residual)
                .residual("samples", samp.max_residual))
        }
        Command::Generic { a, mode, budget, seed } => {
            let pencil = pencil_from_file(inputs, a)?;
            match mode.as_str() {
                "sv" => {
                    let rep = generic::check_sv_generic(&pencil, *budget, *seed);
                    Ok(Outcome::new(rep.witnessed)
                        .seed(*seed)
                        .residual("min_gap", rep.min_gap.unwrap_or(f64::NAN))
                        .data(json!({
                            "condition": rep.condition,
                            "witnessed": rep.witnessed,
                            "probes_used": rep.probes_used,
                            "accepted_probes": rep.accepted_probes,
                            "hyperbasis_sigma_min": rep.hyperbasis_sigma_min,
                            "basis_sigma_min": rep.basis_sigma_min,
                        })))
                }
                "eig" | "star" => {
                    let count = (*budget).min(16).max(1);
                    let probes: Vec<MatrixTuple> = (0..count as u64)
                        .map(|i| {
                            rng::ginibre_tuple(&mut rng::substream(*seed, i), pencil.g(), 4)
                        })
                        .collect();
                    let rep = generic::check_eig_star_generic(&pencil, &probes)
                        .map_err(|e| e.to_string())?;
                    let chosen = if mode == "eig" { &rep.eig } else { &rep.star };
                    Ok(Outcome::new(chosen.witnessed)
                        .seed(*seed)
                        .data(json!({
                            "condition": chosen.condition,
                            "witnessed": chosen.witnessed,
                            "kernel_dim": rep.kernel_dim,
                            "constructed_probe": rep.constructed_probe,
                            "probes_used": chosen.probes_used,
                        })))
                }
                other => Err(format!("unknown mode {other:?} (expected sv, eig, star)")),
            }
        }
        Command::Pair {
            algebra,
            seed,
            margin,
            tol,
        } => {
            let entry =
                catalog::get(algebra, &CatalogParams::default()).map_err(|e| e.to_string())?;
            let d = entry.basis.level();
            let mut spec = None;
            for attempt in 0..200u64 {
                let cmat = rng::haar_unitary(&mut rng::substream(*seed, attempt), d);
                match gallery::build_pair(&entry.basis, &cmat, None, *margin, algebra) {
                    Ok(p) => {
                        spec = Some(p);
                        break;
                    }
                    Err(_) => continue,
                }
            }
            let spec = spec.ok_or("no unitary with the required margin found")?;
            let cert = certify::build_certificate(
                &spec.a,
                &spec.c,
                &linalg::identity(d),
                5,
            )
            .map_err(|e| e.to_string())?;
            let rel = certify::verify_relations(&cert, 5);
            let nil = certify::verify_on_nilpotents(&cert, 4).map_err(|e| e.to_string())?;
            let pass = rel.max_residual() <= *tol && nil.max_residual() <= *tol;
            Ok(Outcome::new(pass)
                .seed(*seed)
                .residual("relations", rel.max_residual())
                .residual("nilpotents", nil.max_residual())
                .data(json!({
                    "provenance": spec.provenance,
                    "A": tuple_to_json(spec.a.coefficients()),
                    "B": tuple_to_json(spec.b.coefficients()),
                    "C": matrix_to_json(&spec.c),
                    "Xi": tuple_to_json(spec.xi.tuple()),
                })))
        }
        Command::Pq {
            gamma,
            p22_mode,
            alpha1,
            alpha3,
            phi,
            samples,
            seed,
        } => {
            let gamma = parse_complex(gamma)?;
            let fam = match p22_mode.as_str() {
                "default" => PQFamily::example(),
                "span" => PQFamily::example_automorphic(),
                other => return Err(format!("unknown p22 mode {other:?}")),
            };
            let pqm = gallery::pq_map(&fam, gamma).map_err(|e| e.to_string())?;
            let evidence = fam.pencil().boundedness_evidence(*samples, *seed);
            let mut out = Outcome::new(evidence.all_passed())
                .seed(*seed)
                .residual(
                    "bounded_fraction",
                    evidence.passes as f64 / evidence.samples.max(1) as f64,
                );
            let mut data = json!({
                "A": tuple_to_json(fam.pencil().coefficients()),
                "B": tuple_to_json(pqm.b.coefficients()),
                "Xi": tuple_to_json(pqm.xi.tuple()),
                "p": map_to_json(&pqm.p),
            });
            if let Some(phi) = phi {
                if p22_mode != "span" {
                    return Err("--phi requires --p22-mode span".into());
                }
                let phi = parse_complex(phi)?;
                let a1 = parse_complex(alpha1)?;
                let a3 = parse_complex(alpha3)?;
                let s = gallery::pq_automorphism(&fam, phi, a1, a3)
                    .map_err(|e| e.to_string())?;
                data["automorphism"] = json!(map_to_json(&s));
            }
            out = out.data(data);
            Ok(out)
        }
        Command::Bounded { a, samples, seed } => {
            let pencil = pencil_from_file(inputs, a)?;
            let rep = pencil.boundedness_evidence(*samples, *seed);
            Ok(Outcome::new(rep.all_passed())
                .seed(*seed)
                .residual(
                    "bounded_fraction",
                    rep.passes as f64 / rep.samples.max(1) as f64,
                )
                .data(json!({
                    "samples": rep.samples,
                    "passes": rep.passes,
                    "evidence": if rep.all_passed() { "indefinite along all sampled rays" } else { "counterexample found" },
                })))
        }
        Command::Hereditary {
            pencil,
            h,
            squares,
            weights,
            tol,
        } => {
            let l = pencil_from_file(inputs, pencil)?;
            #[derive(serde::Deserialize)]
            struct TermJson {
                left: Vec<u8>,
                right: Vec<u8>,
                coeff: MatrixJson,
            }
            #[derive(serde::Deserialize)]
            struct HJson {
                g: usize,
                nu: usize,
                terms: Vec<TermJson>,
            }
            let hj: HJson = inputs.load(h)?;
            let mut hp = HereditaryPoly::new(hj.g, hj.nu);
            for t in &hj.terms {
                let coeff = matrix_from_json(&t.coeff).map_err(|e| e.to_string())?;
                if coeff.nrows() != hj.nu || coeff.ncols() != hj.nu {
                    return Err("hereditary coefficient shape mismatch".into());
                }
                hp.add_term(
                    Word::from_letters(&t.left),
                    Word::from_letters(&t.right),
                    &coeff,
                );
            }
            let load_series = |inputs: &mut Inputs, path: &Option<String>| -> Result<Vec<FreeSeries>, String> {
                match path {
                    None => Ok(Vec::new()),
                    Some(p) => {
                        let list: Vec<SeriesJson> = inputs.load(p)?;
                        list.iter()
                            .map(|s| s.to_series().map_err(|e| e.to_string()))
                            .collect()
                    }
                }
            };
            let sq = load_series(inputs, squares)?;
            let wt = load_series(inputs, weights)?;
            let rep = certify::verify_hereditary(&l, &hp, &sq, &wt, *tol)
                .map_err(|e| e.to_string())?;
            let mut out = Outcome::new(rep.passes(*tol))
                .residual("max_mismatch", rep.max_mismatch)
                .residual("sample_min_eig", rep.sample_min_eig);
            if let Some((u, v)) = &rep.worst_term {
                out = out.data(json!({
                    "worst_term": {
                        "left": u.letters().to_vec(),
                        "right": v.letters().to_vec(),
                    }
                }));
            }
            Ok(out)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::VerifyXi { .. } => "verify-xi",
        Command::Structure { .. } => "structure",
        Command::Eval { .. } => "eval",
        Command::InverseCheck { .. } => "inverse-check",
        Command::Catalog { .. } => "catalog",
        Command::Certify { .. } => "certify",
        Command::Generic { .. } => "generic",
        Command::Pair { .. } => "pair",
        Command::Pq { .. } => "pq",
        Command::Bounded { .. } => "bounded",
        Command::Hereditary { .. } => "hereditary",
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FREESPECTRA_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let mut inputs = Inputs::new();
    match run(&cli.command, &mut inputs) {
        Ok(outcome) => {
            let report = Report {
                command: command_name(&cli.command).to_string(),
                digest: inputs.digest(),
                seed: outcome.seed,
                verdict: if outcome.pass { "pass".into() } else { "fail".into() },
                residuals: outcome.residuals,
                data: outcome.data,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if outcome.pass {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
