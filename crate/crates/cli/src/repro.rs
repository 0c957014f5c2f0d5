//! Pinned scenarios with their expected values embedded.

use formal_hs::exactnum::{FpElem, PrimeField};
use formal_hs::fgl::{FormalGroupLaw, Height};
use formal_hs::hsd::{HSDerivation, Window};
use formal_hs::series::LaurentPoly;
use serde_json::{json, Value};

use crate::report::{CliError, Report, Status};

#[derive(Debug, Clone, Copy)]
pub enum Target {
    /// ∂_4(1/t) for the honda(2,2) table and the first P1 failure.
    InverseImage,
    /// The honda(2,2) canonical table at B = 8 and its F_2[3]-iterativity.
    HondaTable,
    /// Additive and multiplicative derivations preserve k[1/t] below order 16.
    ProjectiveLine,
    Heights,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::InverseImage => "example-3.6",
            Target::HondaTable => "example-4.5",
            Target::ProjectiveLine => "theorem-3.1",
            Target::Heights => "heights",
        }
    }
}

const HONDA_TABLE: [&str; 8] = ["t", "1", "t^2", "0", "t^12 + t^6", "0", "t^4", "0"];
const INVERSE_4: &str = "t^10 + t^4 + t + t^-2 + t^-5";

struct Check {
    lines: Vec<String>,
    mismatches: Vec<String>,
    details: Vec<Value>,
}

impl Check {
    fn new() -> Self {
        Check {
            lines: Vec::new(),
            mismatches: Vec::new(),
            details: Vec::new(),
        }
    }

    fn poly(&mut self, label: &str, got: &LaurentPoly<FpElem>, want: &str) {
        let want_poly = LaurentPoly::parse(got.field(), want).expect("embedded value parses");
        let ok = *got == want_poly;
        self.lines.push(format!("{label} = {got}{}", if ok { "" } else { "  (MISMATCH)" }));
        self.details.push(json!({ "label": label, "got": got.to_string(), "expected": want, "match": ok }));
        if !ok {
            self.mismatches.push(format!("{label}: {}", monomial_diff(got, &want_poly)));
        }
    }

    fn flag(&mut self, label: &str, got: String, ok: bool) {
        self.lines.push(format!("{label}: {got}{}", if ok { "" } else { "  (MISMATCH)" }));
        self.details.push(json!({ "label": label, "got": got, "match": ok }));
        if !ok {
            self.mismatches.push(format!("{label}: {got}"));
        }
    }

    fn finish(mut self, target: Target) -> Report {
        let status = Status::from_check(self.mismatches.is_empty());
        if self.mismatches.is_empty() {
            self.lines.push("PASS".into());
        } else {
            self.lines.push("FAIL".into());
            self.lines.extend(self.mismatches.iter().map(|m| format!("  {m}")));
        }
        Report {
            command: format!("repro {}", target.name()),
            params: json!({ "name": target.name() }),
            result: json!({ "checks": self.details, "mismatches": self.mismatches }),
            text: self.lines.join("\n"),
            status,
        }
    }
}

/// "missing t^a, ...; extra t^b, ..." between two polynomials.
fn monomial_diff(got: &LaurentPoly<FpElem>, want: &LaurentPoly<FpElem>) -> String {
    let render = |q: LaurentPoly<FpElem>| if q.is_zero() { "none".to_string() } else { q.to_string() };
    let mut missing = LaurentPoly::zero(got.field());
    let mut extra = LaurentPoly::zero(got.field());
    for (e, c) in want.terms() {
        if got.coeff(e) != *c {
            missing.add_term(e, *c);
        }
    }
    for (e, c) in got.terms() {
        if want.coeff(e) != *c {
            extra.add_term(e, *c);
        }
    }
    format!("missing {}; extra {}", render(missing), render(extra))
}

fn honda_table() -> Result<(FormalGroupLaw<FpElem>, HSDerivation<FpElem>), CliError> {
    let law = FormalGroupLaw::honda(2, 2, 17).map_err(CliError::compute)?;
    let d = HSDerivation::canonical(&law, 8, Window::for_law(law.kind(), 8, 17)).map_err(CliError::compute)?;
    Ok((law, d))
}

pub fn run(target: Target) -> Result<Report, CliError> {
    let mut check = Check::new();
    match target {
        Target::InverseImage => {
            let (_, d) = honda_table()?;
            let t_inv = LaurentPoly::t_pow(d.field(), -1);
            let direct = d.apply(&t_inv, 4).map_err(CliError::compute)?;
            check.poly("∂_4(1/t)", &direct, INVERSE_4);
            let recursion = d.inverse_image(5).map_err(CliError::compute)?;
            check.poly("∂_4(1/t) by recursion", &recursion[4], INVERSE_4);
            let report = d.check_p1_extendable(8).map_err(CliError::compute)?;
            let ok = report.failure.as_ref().is_some_and(|f| f.n == 4 && f.offending == [10, 4, 1]);
            check.flag("k[1/t] preserved", report.to_string(), ok);
        }
        Target::HondaTable => {
            let (law, d) = honda_table()?;
            for (n, want) in HONDA_TABLE.iter().enumerate() {
                check.poly(&format!("∂_{n}(t)"), &d.images()[n], want);
            }
            let f3 = law.truncate(3).map_err(CliError::compute)?;
            let report = d.check_truncated_iterativity(&f3).map_err(CliError::compute)?;
            check.flag("F_2[3]-iterativity", report.to_string(), report.passed());
        }
        Target::ProjectiveLine => {
            for p in [2, 3, 5] {
                let field = PrimeField::new(p).map_err(CliError::compute)?;
                for law in [
                    FormalGroupLaw::<FpElem>::additive(field, 33),
                    FormalGroupLaw::<FpElem>::multiplicative(field, 33),
                ] {
                    let law = law.map_err(CliError::compute)?;
                    let d = HSDerivation::canonical(&law, 16, Window::for_law(law.kind(), 16, 33))
                        .map_err(CliError::compute)?;
                    let report = d.check_p1_extendable(16).map_err(CliError::compute)?;
                    check.flag(&format!("{} over F_{p}", law.kind()), report.to_string(), report.passed());
                }
            }
        }
        Target::Heights => {
            for p in [2, 3, 5] {
                let field = PrimeField::new(p).map_err(CliError::compute)?;
                let mult = FormalGroupLaw::<FpElem>::multiplicative(field, 8).map_err(CliError::compute)?;
                let h = mult.height().map_err(CliError::compute)?;
                let ok = matches!(h, Height::Finite { h: 1, .. });
                check.flag(&format!("multiplicative over F_{p}"), h.to_string(), ok);
                let add = FormalGroupLaw::<FpElem>::additive(field, 8).map_err(CliError::compute)?;
                let h = add.height().map_err(CliError::compute)?;
                let ok = matches!(h, Height::InfiniteAtPrecision(_));
                check.flag(&format!("additive over F_{p}"), h.to_string(), ok);
            }
            for (p, h) in [(2u64, 2u32), (2, 3), (3, 2), (5, 2)] {
                let n = (p as usize).pow(h) + 1;
                let law = FormalGroupLaw::honda(p, h, n).map_err(CliError::compute)?;
                let got = law.height().map_err(CliError::compute)?;
                let ok = matches!(got, Height::Finite { h: g, .. } if g == h);
                check.flag(&format!("honda:{p}:{h} at N={n}"), got.to_string(), ok);
            }
        }
    }
    Ok(check.finish(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_names_missing_and_extra_monomials() {
        let f2 = PrimeField::new(2).unwrap();
        let got = LaurentPoly::parse(f2, "t^4 + t").unwrap();
        let want = LaurentPoly::parse(f2, "t^10 + t^4").unwrap();
        assert_eq!(monomial_diff(&got, &want), "missing t^10; extra t");
        assert_eq!(monomial_diff(&want, &want), "missing none; extra none");
    }

    #[test]
    fn every_target_passes() {
        for t in [Target::InverseImage, Target::HondaTable, Target::ProjectiveLine, Target::Heights] {
            let report = run(t).unwrap();
            assert_eq!(report.status, Status::Pass, "{}", report.text);
        }
    }
}
