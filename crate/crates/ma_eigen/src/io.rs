//! Number formatting and result emission shared by the file formats.

use crate::solver::{ProblemSpec, SolveResult};

/// 17 significant digits in scientific notation: every `f64` round-trips exactly
/// through this representation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON numbers cannot express NaN or infinities; those become `null`.
fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".to_string()
    }
}

/// Result record of one solve, with the exact key set of the result format.
pub fn result_json(spec: &ProblemSpec, h: f64, result: &SolveResult) -> String {
    format!(
        "{{\n  \"problem\": \"{}\",\n  \"h\": {},\n  \"eps\": {},\n  \"tau\": {},\n  \"gamma\": {},\n  \"C\": {},\n  \"lambda_rayleigh\": {},\n  \"min_u\": {},\n  \"steps\": {},\n  \"final_increment\": {},\n  \"constraint_residual\": {},\n  \"converged\": {}\n}}\n",
        spec.kind.as_str(),
        json_number(h),
        json_number(spec.eps),
        json_number(spec.tau),
        json_number(spec.gamma),
        json_number(spec.c_target),
        json_number(result.lambda_rayleigh),
        json_number(result.min_u),
        result.steps,
        json_number(result.final_increment),
        json_number(result.constraint_residual),
        result.converged
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[
            0.0,
            1.0,
            -0.963_852_107_4,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.18e-2,
            -2.604_3,
            f64::MIN_POSITIVE,
            1e300,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
    }
}
