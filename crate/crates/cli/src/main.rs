use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pseudo3::detection::{analyze_missing, missing_tetrahedra, missing_triangles};
use pseudo3::generators::{generate, GeneratorKind, GeneratorSpec, Generated, SurfaceSpec};
use pseudo3::moves::Move;
use pseudo3::reduction::{decompose, replay, verify_certificate_report, Certificate, Mode, ReductionError};
use pseudo3::rigidity::check_g2_stress;
use pseudo3::surgery::{self, FacetBijection, Split};
use pseudo3::weights::verify_weight_identities;
use pseudo3::{io, is_isomorphic, Complex3, VertexId};

#[derive(Parser)]
#[command(name = "pseudo3", version, about = "Normal 3-pseudomanifolds: moves, surgery, g2 and decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Simplex,
    Chain,
    Handle,
    Sharp1,
    Sharp2,
    Rp2,
    Torus,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated complex (or surface) as a facet file.
    Generate {
        #[arg(long)]
        kind: Kind,
        /// Chain length, handle count (sharp1) or m (sharp2).
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use orientation-reversing pairings (Klein bottle links).
        #[arg(long)]
        non_orientable: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the normal pseudomanifold conditions.
    Validate { input: PathBuf },
    /// Face numbers, g2, singular vertices and missing faces.
    Analyze {
        input: PathBuf,
        /// Print the classification of every missing tetrahedron instead.
        #[arg(long)]
        missing: bool,
        /// Print the edge-weight identity report instead.
        #[arg(long)]
        weights: bool,
        /// Base vertex for the weights (default: distinguished singular vertex).
        #[arg(long)]
        vertex: Option<VertexId>,
    },
    /// Apply one move or surgery and print its record.
    Apply {
        #[arg(long = "move")]
        kind: String,
        /// Comma-separated vertex labels.
        #[arg(long, default_value = "")]
        args: String,
        /// Facet bijection as `a:b,c:d,...`.
        #[arg(long)]
        psi: Option<String>,
        /// Second summand for `sum`.
        #[arg(long)]
        with: Option<PathBuf>,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Second output file for `split`.
        #[arg(long)]
        second: Option<PathBuf>,
    },
    /// Decompose into 4-simplex boundaries and write the certificate.
    Reduce {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Refuse inputs outside the covered profiles or g2 bounds.
        #[arg(long)]
        strict: bool,
    },
    /// Rebuild the complex a certificate describes.
    Replay {
        certificate: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a certificate against a complex.
    Verify { input: PathBuf, certificate: PathBuf },
    /// Compare generic stress dimensions with g2.
    Rigidity {
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        seeds: Vec<u64>,
        input: PathBuf,
    },
    /// Test two complexes for isomorphism.
    Iso { a: PathBuf, b: PathBuf },
}

/// Input problems exit with 2, negative answers with 1.
enum Fail {
    Input(String),
    Negative,
}

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail::Input(e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Complex3, Fail> {
    io::parse_any(&read(path)?).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn print<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn labels(args: &str) -> Result<Vec<VertexId>, Fail> {
    args.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| Fail::Input(format!("bad label {s:?}"))))
        .collect()
}

fn exactly<const N: usize>(v: &[VertexId], kind: &str) -> Result<[VertexId; N], Fail> {
    v.try_into()
        .map_err(|_| Fail::Input(format!("{kind} takes {N} labels, got {}", v.len())))
}

fn parse_psi(text: &str) -> Result<FacetBijection, Fail> {
    let pairs = text
        .split(',')
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| Fail::Input(format!("bad pair {p:?}")))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect::<Result<Vec<(VertexId, VertexId)>, Fail>>()?;
    Ok(FacetBijection::new(&pairs)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Negative) => ExitCode::from(1),
        Err(Fail::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate {
            kind,
            n,
            seed,
            non_orientable,
            output,
        } => {
            let kind = match kind {
                Kind::Simplex => GeneratorKind::Boundary4Simplex,
                Kind::Chain => GeneratorKind::ChainSum { k: n },
                Kind::Handle => GeneratorKind::HandleExample,
                Kind::Sharp1 => GeneratorKind::SharpOneSingularity { n },
                Kind::Sharp2 => GeneratorKind::SharpTwoSingularities { m: n },
                Kind::Rp2 => GeneratorKind::Surface { surface: SurfaceSpec::Rp2_6 },
                Kind::Torus => GeneratorKind::Surface { surface: SurfaceSpec::Torus7 },
            };
            let spec = GeneratorSpec {
                kind,
                seed,
                orientable: !non_orientable,
            };
            let text = match generate(&spec)? {
                Generated::Complex { complex, .. } => io::write_tet(&complex),
                Generated::Surface(s) => s
                    .triangles()
                    .iter()
                    .map(|t| format!("{} {} {}\n", t[0], t[1], t[2]))
                    .collect(),
            };
            match output {
                Some(path) => write(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Validate { input } => {
            let k = load(&input)?;
            let report = k.validate_normal();
            let valid = report.is_valid();
            print(&json!({ "valid": valid, "report": report }));
            if valid {
                Ok(())
            } else {
                Err(Fail::Negative)
            }
        }
        Command::Analyze {
            input,
            missing,
            weights,
            vertex,
        } => {
            let k = load(&input)?;
            if missing {
                print(&analyze_missing(&k)?);
            } else if weights {
                let t = vertex
                    .or_else(|| k.distinguished_singular())
                    .ok_or_else(|| Fail::Input("no singular vertex to base the weights on".into()))?;
                print(&verify_weight_identities(&k, t)?);
            } else {
                let singular: Vec<_> = k
                    .singular_vertices()
                    .into_iter()
                    .map(|(v, ty)| json!({ "vertex": v, "link": ty, "degree": k.degree(v) }))
                    .collect();
                print(&json!({
                    "f_vector": k.f_vector().as_array(),
                    "h_vector": k.g_invariants().h,
                    "g2": k.g2(),
                    "orientable": k.is_orientable(),
                    "singular_vertices": singular,
                    "missing_triangles": missing_triangles(&k),
                    "missing_tetrahedra": missing_tetrahedra(&k),
                }));
            }
            Ok(())
        }
        Command::Apply {
            kind,
            args,
            psi,
            with,
            input,
            output,
            second,
        } => {
            let k = load(&input)?;
            apply(&k, &kind, &labels(&args)?, psi.as_deref(), with.as_deref(), &output, second.as_deref())
        }
        Command::Reduce {
            input,
            output,
            strict,
        } => {
            let k = load(&input)?;
            let mode = if strict { Mode::Strict } else { Mode::BestEffort };
            match decompose(&k, mode) {
                Ok(cert) => {
                    write(&output, &cert.to_json())?;
                    print(&cert.summary);
                    Ok(())
                }
                Err(ReductionError::Internal(e)) => Err(Fail::Input(e.to_string())),
                Err(ReductionError::NonReducible(ob)) => {
                    print(&json!({ "non_reducible": ob }));
                    Err(Fail::Negative)
                }
                Err(refusal) => {
                    print(&json!({ "refused": refusal.to_string() }));
                    Err(Fail::Negative)
                }
            }
        }
        Command::Replay {
            certificate,
            output,
        } => {
            let cert = Certificate::from_json(&read(&certificate)?)?;
            let k = replay(&cert)?;
            write(&output, &io::write_tet(&k))
        }
        Command::Verify { input, certificate } => {
            let k = load(&input)?;
            let cert = Certificate::from_json(&read(&certificate)?)?;
            let report = verify_certificate_report(&k, &cert);
            print(&report);
            if report.valid {
                Ok(())
            } else {
                Err(Fail::Negative)
            }
        }
        Command::Rigidity { seeds, input } => {
            let k = load(&input)?;
            let report = check_g2_stress(&k, &seeds);
            print(&report);
            if report.pass {
                Ok(())
            } else {
                Err(Fail::Negative)
            }
        }
        Command::Iso { a, b } => {
            let (ka, kb) = (load(&a)?, load(&b)?);
            let map = is_isomorphic(&ka, &kb);
            print(&json!({ "isomorphic": map.is_some(), "map": map }));
            if map.is_some() {
                Ok(())
            } else {
                Err(Fail::Negative)
            }
        }
    }
}

fn apply(
    k: &Complex3,
    kind: &str,
    a: &[VertexId],
    psi: Option<&str>,
    with: Option<&Path>,
    output: &Path,
    second: Option<&Path>,
) -> Outcome {
    let need_psi = || -> Result<FacetBijection, Fail> {
        parse_psi(psi.ok_or_else(|| Fail::Input(format!("{kind} needs --psi")))?)
    };
    let surgery_record = |name: &str, out: &Complex3, psi: &FacetBijection, before: i64| {
        json!({ "kind": name, "psi": psi, "g2_before": before, "g2_after": out.g2() })
    };
    let mv = match kind {
        "bistellar2" => {
            let [u, v] = exactly(a, kind)?;
            Move::Bistellar2 { u, v }
        }
        "bistellar1" => {
            let [a, b, c] = exactly(a, kind)?;
            Move::Bistellar1 { a, b, c }
        }
        "contract" => {
            let [u, v, into] = exactly(a, kind)?;
            Move::EdgeContraction { u, v, into }
        }
        "expand" => {
            if a.len() < 6 {
                return Err(Fail::Input("expand takes w,u,v followed by the cycle".into()));
            }
            Move::EdgeExpansion {
                w: a[0],
                u: a[1],
                v: a[2],
                cycle: a[3..].to_vec(),
            }
        }
        "retriangulate" => {
            let [u, v, center] = exactly(a, kind)?;
            Move::CentralRetriangulation { u, v, center }
        }
        "opc" => {
            let [w, a, b, c, x1, x2] = exactly(a, kind)?;
            Move::OpC { w, a, b, c, x1, x2 }
        }
        "opc_prime" => {
            let [u, v, w] = exactly(a, kind)?;
            Move::OpCPrime { u, v, w }
        }
        "opd" => {
            let [u, w, center, t] = exactly(a, kind)?;
            Move::OpD { u, w, center, t }
        }
        "sum" => {
            let other = load(with.ok_or_else(|| Fail::Input("sum needs --with".into()))?)?;
            let psi = need_psi()?;
            let out = surgery::connected_sum(k, &other, &psi)?;
            print(&surgery_record(kind, &out, &psi, k.g2() + other.g2()));
            return write(output, &io::write_tet(&out));
        }
        "handle" | "vfold" | "efold" => {
            let psi = need_psi()?;
            let out = match kind {
                "handle" => surgery::handle_addition(k, &psi)?,
                "vfold" => surgery::vertex_folding(k, &psi)?,
                _ => surgery::edge_folding(k, &psi)?,
            };
            print(&surgery_record(kind, &out, &psi, k.g2()));
            return write(output, &io::write_tet(&out));
        }
        "split" => {
            let sigma = exactly(a, kind)?;
            return match surgery::split_connected_sum(k, sigma)? {
                Split::Sum { left, right, psi } => {
                    let second = second.ok_or_else(|| Fail::Input("split needs --second".into()))?;
                    print(&json!({ "kind": "split", "psi": psi, "g2_left": left.g2(), "g2_right": right.g2() }));
                    write(output, &io::write_tet(&left))?;
                    write(second, &io::write_tet(&right))
                }
                Split::Handle(w) => {
                    print(&json!({ "kind": "handle_unfold", "psi": w.psi, "g2_after": w.unfolded.g2() }));
                    write(output, &io::write_tet(&w.unfolded))
                }
            };
        }
        "vunfold" | "eunfold" => {
            let (out, psi) = if kind == "vunfold" {
                let [s0, s1, s2, s3, apex] = exactly(a, kind)?;
                surgery::vertex_unfolding(k, [s0, s1, s2, s3], apex)?
            } else {
                let [s0, s1, s2, s3, u, v] = exactly(a, kind)?;
                surgery::edge_unfolding(k, [s0, s1, s2, s3], u, v)?
            };
            print(&surgery_record(kind, &out, &psi, k.g2()));
            return write(output, &io::write_tet(&out));
        }
        other => return Err(Fail::Input(format!("unknown move kind {other:?}"))),
    };
    let (out, record) = mv.apply(k)?;
    print(&record);
    write(output, &io::write_tet(&out))
}
