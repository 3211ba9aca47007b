//! The five bracketings of a five-point function, each evaluated by
//! composing numeric intertwiners.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{closed_form_5pt, Intertwiner, Partition};
use crate::scalar::{on_branch_cut, Q};

/// `|x| > |y| > |z| > |x-z| > |y-z| > |x-y| > 0` with all six quantities off the cut.
pub fn in_d3(x: Complex64, y: Complex64, z: Complex64) -> Result<()> {
    let chain = [("x", x), ("y", y), ("z", z), ("x-z", x - z), ("y-z", y - z), ("x-y", x - y)];
    for (name, w) in chain {
        if on_branch_cut(w) {
            return Err(Error::Region(format!("{name} = {w} lies on the branch cut")));
        }
    }
    for pair in chain.windows(2) {
        let ((n1, a), (n2, b)) = (pair[0], pair[1]);
        if !(a.norm() > b.norm()) {
            return Err(Error::Region(format!("need |{n1}| > |{n2}| at ({x}, {y}, {z})")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bracketing {
    /// `𝒴(a,x) 𝒴(b,y) 𝒴(c,z) d`
    #[serde(rename = "A(B(CD))")]
    ABcd,
    /// `𝒴(a,x) 𝒴(𝒴(b,y-z)c, z) d`
    #[serde(rename = "A((BC)D)")]
    ABcD,
    /// `𝒴(𝒴(a,x-y)b, y) 𝒴(c,z) d`
    #[serde(rename = "(AB)(CD)")]
    AbCd,
    /// `𝒴(𝒴(𝒴(a,x-y)b, y-z)c, z) d`
    #[serde(rename = "((AB)C)D")]
    AbcD,
    /// `𝒴(𝒴(a,x-z)𝒴(b,y-z)c, z) d`
    #[serde(rename = "(A(BC))D")]
    AbCD,
}

impl Bracketing {
    pub const ALL: [Bracketing; 5] =
        [Bracketing::ABcd, Bracketing::ABcD, Bracketing::AbCd, Bracketing::AbcD, Bracketing::AbCD];

    pub fn name(self) -> &'static str {
        match self {
            Bracketing::ABcd => "A(B(CD))",
            Bracketing::ABcD => "A((BC)D)",
            Bracketing::AbCd => "(AB)(CD)",
            Bracketing::AbcD => "((AB)C)D",
            Bracketing::AbCD => "(A(BC))D",
        }
    }
}

type State = BTreeMap<Partition, Complex64>;

fn hw() -> State {
    State::from([(vec![], Complex64::new(1.0, 0.0))])
}

/// `𝒴(left, z) right`, with `left ∈ F_p`, `right ∈ F_r`, truncated at `grade`.
fn y(p: &Q, r: &Q, left: &State, z: Complex64, right: &State, grade: u32) -> State {
    Intertwiner::new(p.clone(), r.clone()).apply_numeric(left, z, right, grade)
}

/// Vacuum coefficient of one bracketing, with intermediate grades `≤ g`.
pub fn bracketing_value(m: [&Q; 4], which: Bracketing, x: Complex64, yv: Complex64, z: Complex64, g: u32) -> Complex64 {
    let [a, b, c, d] = m;
    let (ab, bc, cd) = (a + b, b + c, c + d);
    let (abc, bcd) = (&ab + c, &bc + d);
    let out = match which {
        Bracketing::ABcd => {
            let r1 = y(c, d, &hw(), z, &hw(), g);
            let r2 = y(b, &cd, &hw(), yv, &r1, g);
            y(a, &bcd, &hw(), x, &r2, 0)
        }
        Bracketing::ABcD => {
            let s = y(b, c, &hw(), yv - z, &hw(), g);
            let r = y(&bc, d, &s, z, &hw(), g);
            y(a, &bcd, &hw(), x, &r, 0)
        }
        Bracketing::AbCd => {
            let s = y(a, b, &hw(), x - yv, &hw(), g);
            let r = y(c, d, &hw(), z, &hw(), g);
            y(&ab, &cd, &s, yv, &r, 0)
        }
        Bracketing::AbcD => {
            let s = y(a, b, &hw(), x - yv, &hw(), g);
            let s2 = y(&ab, c, &s, yv - z, &hw(), g);
            y(&abc, d, &s2, z, &hw(), 0)
        }
        Bracketing::AbCD => {
            let s = y(b, c, &hw(), yv - z, &hw(), g);
            let s2 = y(a, &bc, &hw(), x - z, &s, g);
            y(&abc, d, &s2, z, &hw(), 0)
        }
    };
    out.get(&Vec::new()).copied().unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketValue {
    pub bracketing: Bracketing,
    pub value: Complex64,
    /// `|value(g) - value(g-1)| / |value(g)|`.
    pub tail: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PentagonReport {
    pub momenta: [String; 4],
    pub point: [Complex64; 3],
    pub max_grade: u32,
    pub values: Vec<BracketValue>,
    pub oracle: Complex64,
    pub max_pairwise_deviation: f64,
    pub max_oracle_deviation: f64,
    pub passed: bool,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Evaluate the five bracketings at `(x, y, z) ∈ 𝒟³` with intermediate
/// grades `≤ max_grade`, and compare them with each other and with the
/// closed form.
pub fn check_pentagon(m: &[Q; 4], point: (Complex64, Complex64, Complex64), max_grade: u32, tol: f64) -> Result<PentagonReport> {
    let (x, yv, z) = point;
    in_d3(x, yv, z)?;
    if max_grade == 0 {
        return Err(Error::Invalid("max_grade must be positive".into()));
    }
    let refs = [&m[0], &m[1], &m[2], &m[3]];
    let values: Vec<BracketValue> = std::thread::scope(|s| {
        let handles: Vec<_> = Bracketing::ALL
            .iter()
            .map(|&b| {
                s.spawn(move || {
                    let value = bracketing_value(refs, b, x, yv, z, max_grade);
                    let prev = bracketing_value(refs, b, x, yv, z, max_grade - 1);
                    BracketValue { bracketing: b, value, tail: rel(value, prev) }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bracketing worker panicked")).collect()
    });
    let oracle = closed_form_5pt(refs, x, yv, z)?;
    let mut max_pairwise_deviation: f64 = 0.0;
    for (i, p) in values.iter().enumerate() {
        for q in &values[i + 1..] {
            max_pairwise_deviation = max_pairwise_deviation.max(rel(p.value, q.value));
        }
    }
    let max_oracle_deviation = values.iter().map(|v| rel(v.value, oracle)).fold(0.0, f64::max);
    Ok(PentagonReport {
        momenta: [m[0].to_string(), m[1].to_string(), m[2].to_string(), m[3].to_string()],
        point: [x, yv, z],
        max_grade,
        values,
        oracle,
        max_pairwise_deviation,
        max_oracle_deviation,
        passed: max_pairwise_deviation <= tol && max_oracle_deviation <= tol,
    })
}
