use std::fmt::Write as _;
use std::path::Path;

use qudit_destruction::channels::{
    channels_equal, choi_distance, classify, completeness_defect, is_completely_positive, KrausChannel,
};
use qudit_destruction::destruction::{
    destruction_direct, destruction_kraus, destruction_probabilities, destruction_spec, DestructionSpec,
};
use qudit_destruction::numerics::ComplexMatrix;
use qudit_destruction::state_space::{make_observable, make_space, OmegaSet};
use qudit_destruction::{Error, ToleranceConfig};

use crate::files::{read_channel, read_observable, read_state, write_channel, write_text, ChannelFile, StateFile};
use crate::{display, Cli, CliError, Command, EXIT_INVALID, EXIT_NOT_EQUAL, EXIT_OK};

pub(crate) fn dispatch(cli: &Cli, tol: &ToleranceConfig, out: &mut String) -> Result<i32, CliError> {
    let output = cli.output.as_deref();
    match &cli.command {
        Command::Verify { channel } => verify(channel, tol, out),
        Command::Destroy {
            observable,
            omega,
            state,
            emit_kraus,
        } => destroy(observable, omega, state, *emit_kraus, output, tol, out),
        Command::Compare { a, b } => compare(a, b, tol, out),
        Command::Choi { channel } => choi(channel, tol, out),
        Command::DemoQubit { case } => demo_qubit(case, output, out),
    }
}

pub fn verify(path: &Path, tol: &ToleranceConfig, out: &mut String) -> Result<i32, CliError> {
    let ch = read_channel(path)?;
    let _ = writeln!(out, "label: {}", ch.label());
    let _ = writeln!(out, "qudit_dim: {}", ch.space().qudit_dim());
    let _ = writeln!(out, "elements: {}", ch.len());
    match classify(&ch, tol) {
        Ok(report) => {
            let valid = report.completely_positive;
            let _ = writeln!(out, "valid: {valid}");
            let _ = writeln!(out, "trace_preserving: {}", report.trace_preserving);
            let _ = writeln!(out, "trace_decreasing_strict: {}", report.trace_decreasing_strict);
            let _ = writeln!(out, "completely_positive: {}", report.completely_positive);
            let _ = writeln!(out, "pure: {}", report.pure);
            let _ = writeln!(out, "min_choi_eigenvalue: {:e}", report.min_choi_eigenvalue);
            let _ = writeln!(out, "completeness_defect: {:e}", report.completeness_defect);
            Ok(if valid { EXIT_OK } else { EXIT_INVALID })
        }
        Err(Error::InvalidChannel { excess }) => {
            let (cp, min) = is_completely_positive(&ch, tol)?;
            let _ = writeln!(out, "valid: false");
            let _ = writeln!(out, "reason: sum of E^dagger E exceeds identity by {excess:e}");
            let _ = writeln!(out, "completely_positive: {cp}");
            let _ = writeln!(out, "pure: {}", ch.is_pure());
            let _ = writeln!(out, "min_choi_eigenvalue: {min:e}");
            let _ = writeln!(out, "completeness_defect: {:e}", completeness_defect(&ch)?);
            Ok(EXIT_INVALID)
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_omega(text: &str) -> Result<OmegaSet, CliError> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse omega value {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OmegaSet::new(values)?)
}

pub fn destroy(
    observable: &Path,
    omega: &str,
    state: &Path,
    emit_kraus: bool,
    output: Option<&Path>,
    tol: &ToleranceConfig,
    out: &mut String,
) -> Result<i32, CliError> {
    let omega = parse_omega(omega)?;
    let obs = read_observable(observable, tol)?;
    let rho = read_state(state, tol)?;
    if obs.space() != rho.space() {
        return Err(CliError::DimensionMismatch(format!(
            "observable has qudit_dim {}, state has {}",
            obs.space().qudit_dim(),
            rho.space().qudit_dim()
        )));
    }
    let spec = destruction_spec(&obs, &omega)?;
    let (p_destroyed, p_survived) = destruction_probabilities(&spec, &rho)?;
    let result = destruction_direct(&spec, &rho)?;

    let _ = writeln!(out, "label: {}", spec.label());
    let _ = writeln!(out, "p_destroyed: {p_destroyed}");
    let _ = writeln!(out, "p_survived: {p_survived}");
    let _ = writeln!(out, "output:");
    let _ = writeln!(out, "{}", display::matrix(result.matrix(), "  "));

    if emit_kraus {
        let ch = destruction_kraus(&spec);
        match output {
            Some(path) => {
                write_channel(path, &ch)?;
                let _ = writeln!(out, "kraus_file: {}", path.display());
            }
            None => {
                let _ = writeln!(out, "kraus:");
                out.push_str(&ChannelFile::from_channel(&ch).to_json());
            }
        }
    } else if let Some(path) = output {
        write_text(path, &StateFile::from_state(&result).to_json())?;
        let _ = writeln!(out, "state_file: {}", path.display());
    }
    Ok(EXIT_OK)
}

pub fn compare(a: &Path, b: &Path, tol: &ToleranceConfig, out: &mut String) -> Result<i32, CliError> {
    let first = read_channel(a)?;
    let second = read_channel(b)?;
    if first.space() != second.space() {
        return Err(CliError::DimensionMismatch(format!(
            "qudit_dim {} vs {}",
            first.space().qudit_dim(),
            second.space().qudit_dim()
        )));
    }
    let distance = choi_distance(&first, &second)?;
    let equal = channels_equal(&first, &second, tol)?;
    let _ = writeln!(out, "max_choi_difference: {distance:e}");
    let _ = writeln!(out, "threshold: {:e}", tol.eq_tol * first.space().total_dim() as f64);
    let _ = writeln!(out, "equal: {equal}");
    Ok(if equal { EXIT_OK } else { EXIT_NOT_EQUAL })
}

pub fn choi(path: &Path, tol: &ToleranceConfig, out: &mut String) -> Result<i32, CliError> {
    let ch = read_channel(path)?;
    let j = ch.choi();
    let eig = j.eigenvalues(tol)?;
    let _ = writeln!(out, "choi:");
    let _ = writeln!(out, "{}", display::matrix(j.matrix(), "  "));
    let _ = writeln!(out, "eigenvalues: {}", display::real_list(&eig));
    let _ = writeln!(out, "min_eigenvalue: {:e}", eig.last().copied().unwrap_or(0.0));
    Ok(EXIT_OK)
}

/// The three qubit examples for `Λ̂ = diag(1, −1)`.
pub fn qubit_case(case: &str) -> Result<(Vec<f64>, DestructionSpec), CliError> {
    let omega = match case {
        "i" => vec![1.0],
        "ii" => vec![-1.0],
        "iii" => vec![1.0, -1.0],
        other => return Err(CliError::Usage(format!("unknown case {other:?}; expected i, ii or iii"))),
    };
    let space = make_space(2)?;
    let obs = make_observable(space, &ComplexMatrix::from_real_diagonal(&[1.0, -1.0]))?;
    let spec = destruction_spec(&obs, &OmegaSet::new(omega.clone())?)?;
    Ok((omega, spec))
}

/// Element names follow the index of the basis vector they destroy, with the
/// complement as `E_{d+1}`.
fn element_names(spec: &DestructionSpec, ch: &KrausChannel) -> Vec<String> {
    let space = spec.space();
    let mut names: Vec<String> = spec
        .omega_basis()
        .iter()
        .enumerate()
        .map(|(k, b)| match b.iter().position(|z| z.re == 1.0 && z.im == 0.0) {
            Some(i) if b.iter().filter(|z| z.norm() != 0.0).count() == 1 => format!("E{i}"),
            _ => format!("E(b{k})"),
        })
        .collect();
    names.push(format!("E{}", space.qudit_dim() + 1));
    debug_assert_eq!(names.len(), ch.len());
    names
}

pub fn demo_qubit(case: &str, output: Option<&Path>, out: &mut String) -> Result<i32, CliError> {
    let (omega, spec) = qubit_case(case)?;
    let space = spec.space();
    let ch = destruction_kraus(&spec).with_label(format!("demo-qubit {case}"));
    let symbolic = |m: &ComplexMatrix| display::ket_bra_sum(space, m).unwrap_or_else(|| "(non-diagonal)".into());

    let _ = writeln!(out, "case: {case}");
    let _ = writeln!(out, "omega: {}", display::real_list(&omega));
    let _ = writeln!(out, "projector: {}", symbolic(spec.projector().matrix()));
    let _ = writeln!(out, "{}", display::matrix(spec.projector().matrix(), "  "));
    let _ = writeln!(out, "complement: {}", symbolic(spec.complement().matrix()));
    let _ = writeln!(out, "{}", display::matrix(spec.complement().matrix(), "  "));
    let _ = writeln!(out, "elements: {}", ch.len());
    for (name, e) in element_names(&spec, &ch).iter().zip(ch.elements()) {
        let _ = writeln!(out, "{name} = {}", symbolic(e));
        let _ = writeln!(out, "{}", display::matrix(e, "  "));
    }
    if let Some(path) = output {
        write_channel(path, &ch)?;
        let _ = writeln!(out, "channel_file: {}", path.display());
    }
    Ok(EXIT_OK)
}
