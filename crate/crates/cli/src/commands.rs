use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use triwit_core::choi::{pair, BiLinearMap};
use triwit_core::linalg::{Tolerance, C64};
use triwit_core::schmidt::{construct_state_with_sr, mode_singular_values, schmidt_rank, sigma_contains, PosTriple};
use triwit_core::search::{sample_state, violation_search, SearchOutcome, SeesawConfig};
use triwit_core::tensor::{TriDims, TriOperator};
use triwit_core::witness::{classify, family_choi, Evidence, Grid, QubitWitnessParams};
use triwit_core::Error;

use crate::json::{complex, JsonInput, JsonMatrix, JsonVector};
use crate::{CliError, Cli, Command, Common, FamilyArgs};

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Inputs read so far, hashed into the report digest.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new(args: &[String]) -> Self {
        let mut hasher = Sha256::new();
        for a in args {
            hasher.update(a.as_bytes());
            hasher.update([0u8]);
        }
        Self { hasher }
    }

    fn read(&mut self, path: &Path) -> Result<JsonInput, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.hasher.update(text.as_bytes());
        self.hasher.update([0u8]);
        JsonInput::parse(&text)
    }

    fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

fn tolerance(c: &Common) -> Result<Tolerance, CliError> {
    Tolerance::new(c.tol_rank, c.tol_psd, c.tol_ineq).map_err(input_err)
}

fn tolerance_json(t: &Tolerance) -> Value {
    json!({ "rank_rel": t.rank_rel, "psd_abs": t.psd_abs, "ineq_abs": t.ineq_abs })
}

fn emit(common: &Common, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(name: &str, args: &[String], inputs: Inputs, tol: &Tolerance, results: Value) -> Value {
    json!({
        "command": { "name": name, "args": args },
        "inputs_digest": inputs.digest(),
        "results": results,
        "tolerance": tolerance_json(tol),
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn family_params(f: &FamilyArgs) -> Result<Option<QubitWitnessParams>, CliError> {
    match (f.s, f.t) {
        (None, None) if f.u.is_none() => Ok(None),
        (Some(s), Some(t)) => {
            let u = f.u.unwrap_or([[0.0; 2]; 4]).map(|[re, im]| C64::new(re, im));
            QubitWitnessParams::new(s, t, u).map(Some).map_err(input_err)
        }
        _ => Err(CliError::Input("family parameters need both --s and --t".into())),
    }
}

fn params_json(p: &QubitWitnessParams) -> Value {
    json!({ "s": p.s(), "t": p.t(), "u": p.u().map(complex) })
}

/// The map from a Choi matrix file or from the family flags, exactly one of which must be given.
fn load_map(
    inputs: &mut Inputs,
    path: Option<&Path>,
    family: &FamilyArgs,
    dims: Option<[usize; 3]>,
) -> Result<(BiLinearMap, Value), CliError> {
    match (path, family_params(family)?) {
        (Some(p), None) => {
            let op = inputs.read(p)?.into_operator(dims)?;
            Ok((BiLinearMap::from_choi(op), json!({ "file": p.display().to_string() })))
        }
        (None, Some(params)) => Ok((family_choi(&params), json!({ "family": params_json(&params) }))),
        (Some(_), Some(_)) => Err(CliError::Input("give either a map file or family flags, not both".into())),
        (None, None) => Err(CliError::Input("a map file or --s/--t family flags are required".into())),
    }
}

fn evidence_json(e: &Evidence) -> Value {
    match *e {
        Evidence::AllDiagonalBlocks => json!({ "kind": "all_diagonal_blocks" }),
        Evidence::FailedIndex(i) => json!({ "kind": "failed_index", "index": i }),
        Evidence::PairsHold(pairs) => json!({ "kind": "pairs_hold", "pairs": pairs.map(|(i, j)| [i, j]) }),
        Evidence::FailedPair(i, j) => json!({ "kind": "failed_pair", "pair": [i, j] }),
        Evidence::SufficientCondition => json!({ "kind": "sufficient_condition" }),
        Evidence::DominatedBy(c) => json!({ "kind": "dominated_by", "class": c.to_string() }),
        Evidence::ViolatingAlpha { alpha, slack } => {
            json!({ "kind": "violating_alpha", "alpha": complex(alpha), "slack": slack })
        }
        Evidence::MinimumSlack { alpha, slack } => json!({
            "kind": "minimum_slack",
            "alpha": complex(alpha),
            "slack": slack,
            "note": "no violation on the refined grid; not a proof",
        }),
    }
}

fn triple(t: [usize; 3]) -> Result<PosTriple, CliError> {
    PosTriple::from_array(t).map_err(input_err)
}

pub fn run(cli: &Cli, args: &[String]) -> Result<(), CliError> {
    let tol = tolerance(&cli.common)?;
    let mut inputs = Inputs::new(args);
    let out = match &cli.command {
        Command::Sr { input, dims } => {
            let xi = inputs.read(input)?.into_vector(*dims)?;
            let sr = schmidt_rank(&xi, &tol).map_err(input_err)?;
            let [a, b, c] = mode_singular_values(&xi);
            let results = json!({
                "dims": xi.dims().as_array(),
                "schmidt_rank": sr.as_array(),
                "display": sr.to_string(),
                "mode_singular_values": { "A": a, "B": b, "C": c },
                "in_sigma": sigma_contains(sr.as_array(), xi.dims()),
                "norm": xi.norm(),
            });
            report("sr", args, inputs, &tol, results)
        }
        Command::Classify {
            family,
            grid_radii,
            grid_angles,
        } => {
            let params = family_params(family)?.ok_or_else(|| CliError::Input("--s and --t are required".into()))?;
            let grid = Grid::new(*grid_radii, *grid_angles).map_err(input_err)?;
            let r = classify(&params, grid, &tol);
            let classes: Vec<Value> = r
                .classes
                .iter()
                .map(|c| {
                    json!({
                        "class": c.class.to_string(),
                        "verdict": c.verdict.to_string(),
                        "evidence": evidence_json(&c.evidence),
                    })
                })
                .collect();
            let results = json!({
                "params": params_json(&params),
                "grid": { "radii": grid.radii, "angles": grid.angles },
                "classes": classes,
                "biseparability_witness": r.biseparability_witness,
            });
            report("classify", args, inputs, &tol, results)
        }
        Command::Pair {
            state,
            map,
            family,
            dims,
        } => {
            let rho = inputs.read(state)?.into_operator(*dims)?;
            let (phi, source) = load_map(&mut inputs, map.as_deref(), family, *dims)?;
            let v = pair(&rho, &phi).map_err(input_err)?;
            let results = json!({ "map": source, "real": v.re, "imag": v.im });
            report("pair", args, inputs, &tol, results)
        }
        Command::Search {
            map,
            family,
            dims,
            sr,
            seesaw,
        } => {
            let (phi, source) = load_map(&mut inputs, map.as_deref(), family, *dims)?;
            let t = triple(*sr)?;
            let cfg = SeesawConfig::new(seesaw.restarts, seesaw.sweeps, seesaw.eps, seesaw.seed).map_err(input_err)?;
            let outcome = violation_search(phi.choi(), t, &cfg, &tol).map_err(|e| match e {
                Error::NotHermitian { .. } => CliError::NotHermitian(e.to_string()),
                other => input_err(other),
            })?;
            let mut results = json!({
                "map": source,
                "target": t.as_array(),
                "config": {
                    "restarts": cfg.restarts,
                    "max_sweeps": cfg.max_sweeps,
                    "convergence_eps": cfg.convergence_eps,
                    "seed": cfg.seed,
                },
            });
            let extra = match &outcome {
                SearchOutcome::Violation(cert) => json!({
                    "found": true,
                    "status": "violation",
                    "value": cert.value,
                    "schmidt_rank": schmidt_rank(&cert.xi, &tol).map_err(input_err)?.as_array(),
                    "vector": JsonVector::from_vector(&cert.xi),
                }),
                SearchOutcome::NotFound { best_value, best_xi } => json!({
                    "found": false,
                    "status": "no violation found",
                    "best_value": best_value,
                    "vector": JsonVector::from_vector(best_xi),
                }),
            };
            let obj = results.as_object_mut().expect("object");
            obj.extend(extra.as_object().expect("object").clone());
            report("search", args, inputs, &tol, results)
        }
        Command::Gen {
            sr,
            dims,
            sample,
            terms,
            seed,
        } => {
            let d = TriDims::from_array(dims.unwrap_or(*sr)).map_err(input_err)?;
            if *sample {
                let t = triple(*sr)?;
                if !t.fits(d) {
                    return Err(CliError::Input(format!("bound {t} exceeds dims {d}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let rho: TriOperator = sample_state(d, t, *terms, &mut rng).map_err(input_err)?;
                serde_json::to_value(JsonMatrix::from_operator(&rho)).expect("serializable")
            } else {
                let xi = construct_state_with_sr(*sr, d).map_err(input_err)?;
                serde_json::to_value(JsonVector::from_vector(&xi)).expect("serializable")
            }
        }
    };
    emit(&cli.common, &out)
}
