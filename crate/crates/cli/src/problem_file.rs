//! Plain-text problem definitions.
//!
//! ```text
//! # comments and blank lines are ignored
//! dimension 2
//! torus true
//! lambda_min 0.5
//! lambda_max 3
//! epsilon 1e-4
//! seed 7                  # optional
//! prune_budget 5e-5       # optional, total H¹ budget
//! initial_error 1.0       # optional, required off the torus
//! target solve            # optional, rate-study samples the solution
//!
//! [A 1 1]                 # 1-based, only i ≤ j; missing entries are
//! 2 0 0 0                 # 1 on the diagonal and 0 off it
//! 1 1 0 0
//! [c]
//! 1 0 0 0
//! [f fourier]             # or [f] with atom lines
//! 1 0 0.5 0
//! [target]                # optional rate-study target
//! 1 1 1 0
//! ```
//!
//! Atom lines read `a w_1 … w_d b`; Fourier lines read `k_1 … k_d re im`.

use std::collections::BTreeMap;

use barron_core::{
    canonicalize, from_fourier_data, parse_atom_line, parse_fourier_lines, AtomSum,
    EllipticProblem, Error, Result,
};

/// Where the rate-study target comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Atoms(AtomSum),
    /// Sample the final iterate of a solve on this problem.
    Solve,
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub problem: EllipticProblem,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub prune_budget: Option<f64>,
    pub initial_error: Option<f64>,
    pub target: Option<Target>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Block {
    A(usize, usize),
    C,
    F,
    Target,
}

struct Section {
    block: Block,
    fourier: bool,
    header_line: usize,
    body: Vec<(usize, String)>,
}

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse {
        line,
        detail: detail.into(),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| parse_err(line, format!("bad value `{value}` for `{key}`: {e}")))
}

fn parse_header(h: &str, line: usize) -> Result<(Block, bool)> {
    let parts: Vec<&str> = h.split_whitespace().collect();
    let fourier = parts.last() == Some(&"fourier");
    let core = if fourier {
        &parts[..parts.len() - 1]
    } else {
        &parts[..]
    };
    let block = match core {
        ["A", i, j] | ["a", i, j] => {
            let i: usize = parse_value("A row", i, line)?;
            let j: usize = parse_value("A column", j, line)?;
            Block::A(i, j)
        }
        ["c"] => Block::C,
        ["f"] => Block::F,
        ["target"] => Block::Target,
        _ => return Err(parse_err(line, format!("unknown section `[{h}]`"))),
    };
    Ok((block, fourier))
}

fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

impl Section {
    fn to_sum(&self, dim: usize, torus: bool) -> Result<AtomSum> {
        if self.fourier {
            let text: String = self.body.iter().map(|(_, l)| format!("{l}\n")).collect();
            let first = self.body.first().map_or(self.header_line + 1, |b| b.0);
            // body lines are contiguous apart from skipped comments, so map
            // error lines back through the stored numbers
            let coeffs = parse_fourier_lines(&text, dim, 1).map_err(|e| match e {
                Error::Parse { line, detail } => Error::Parse {
                    line: self.body.get(line - 1).map_or(first, |b| b.0),
                    detail,
                },
                other => other,
            })?;
            from_fourier_data(&coeffs, dim, torus)
                .map_err(|e| parse_err(self.header_line, e.to_string()))
        } else {
            let atoms = self
                .body
                .iter()
                .map(|(line, l)| parse_atom_line(l, dim, *line))
                .collect::<Result<Vec<_>>>()?;
            canonicalize(dim, torus, atoms).map_err(|e| parse_err(self.header_line, e.to_string()))
        }
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut scalars: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = strip_comment(raw);
            if l.is_empty() {
                continue;
            }
            if let Some(h) = l.strip_prefix('[') {
                let h = h
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, "unterminated section header"))?;
                let (block, fourier) = parse_header(h.trim(), line)?;
                if sections.iter().any(|s| s.block == block) {
                    return Err(parse_err(
                        line,
                        format!("duplicate section `[{}]`", h.trim()),
                    ));
                }
                sections.push(Section {
                    block,
                    fourier,
                    header_line: line,
                    body: Vec::new(),
                });
            } else if let Some(s) = sections.last_mut() {
                s.body.push((line, l.to_string()));
            } else {
                let mut it = l.splitn(2, char::is_whitespace);
                let key = it.next().unwrap_or("").to_ascii_lowercase();
                let value = it.next().unwrap_or("").trim().to_string();
                if value.is_empty() {
                    return Err(parse_err(line, format!("missing value for `{key}`")));
                }
                if scalars.insert(key.clone(), (line, value)).is_some() {
                    return Err(parse_err(line, format!("duplicate key `{key}`")));
                }
            }
        }

        let take = |key: &str| scalars.get(key).map(|(l, v)| (*l, v.as_str()));
        for (key, (line, _)) in &scalars {
            let known = [
                "dimension",
                "torus",
                "lambda_min",
                "lambda_max",
                "epsilon",
                "seed",
                "prune_budget",
                "initial_error",
                "target",
            ];
            if !known.contains(&key.as_str()) {
                return Err(parse_err(*line, format!("unknown key `{key}`")));
            }
        }
        let required = |key: &str| {
            take(key)
                .ok_or_else(|| parse_err(text.lines().count().max(1), format!("missing `{key}`")))
        };
        let (l, v) = required("dimension")?;
        let dim: usize = parse_value("dimension", v, l)?;
        if dim == 0 {
            return Err(parse_err(l, "dimension must be positive"));
        }
        let torus = match take("torus") {
            Some((l, v)) => parse_value("torus", v, l)?,
            None => true,
        };
        let (l, v) = required("lambda_min")?;
        let lambda_min: f64 = parse_value("lambda_min", v, l)?;
        let (l, v) = required("lambda_max")?;
        let lambda_max: f64 = parse_value("lambda_max", v, l)?;
        let opt_f64 = |key: &str| -> Result<Option<f64>> {
            take(key).map(|(l, v)| parse_value(key, v, l)).transpose()
        };
        let epsilon = opt_f64("epsilon")?;
        let prune_budget = opt_f64("prune_budget")?;
        let initial_error = opt_f64("initial_error")?;
        let seed = take("seed")
            .map(|(l, v)| parse_value("seed", v, l))
            .transpose()?;
        let mut target = match take("target") {
            Some((_, "solve")) => Some(Target::Solve),
            Some((l, v)) => {
                return Err(parse_err(
                    l,
                    format!("`target` accepts only `solve`, got `{v}`"),
                ))
            }
            None => None,
        };

        let mut a: Vec<Vec<AtomSum>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            AtomSum::constant(dim, torus, 1.0)
                        } else {
                            AtomSum::zero(dim, torus)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut c = None;
        let mut f = None;
        for s in &sections {
            let sum = s.to_sum(dim, torus)?;
            match s.block {
                Block::A(i, j) => {
                    if i == 0 || j == 0 || i > dim || j > dim {
                        return Err(parse_err(
                            s.header_line,
                            format!("A index ({i}, {j}) outside 1..={dim}"),
                        ));
                    }
                    if i > j {
                        return Err(parse_err(
                            s.header_line,
                            "only A entries with i ≤ j are stored",
                        ));
                    }
                    a[i - 1][j - 1] = sum.clone();
                    a[j - 1][i - 1] = sum;
                }
                Block::C => c = Some(sum),
                Block::F => f = Some(sum),
                Block::Target => {
                    if target.is_some() {
                        return Err(parse_err(s.header_line, "target given twice"));
                    }
                    target = Some(Target::Atoms(sum));
                }
            }
        }
        let last = text.lines().count().max(1);
        let c = c.ok_or_else(|| parse_err(last, "missing `[c]` section"))?;
        let f = f.ok_or_else(|| parse_err(last, "missing `[f]` section"))?;
        let problem = EllipticProblem::new(a, c, f, lambda_min, lambda_max)
            .map_err(|e| parse_err(last, e.to_string()))?;
        Ok(Self {
            problem,
            epsilon,
            seed,
            prune_budget,
            initial_error,
            target,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BENCH_1D: &str = "dimension 1\nlambda_min 1\nlambda_max 3\nepsilon 1e-4\n[A 1 1]\n2 0 0\n1 1 0\n[c]\n1 0 0\n[f]\n1 1 0\n";

    #[test]
    fn parses_benchmark() {
        let pf = ProblemFile::parse(BENCH_1D).unwrap();
        let expect = barron_core::fixtures::benchmark_1d();
        assert_eq!(pf.problem.a(0, 0), expect.a(0, 0));
        assert_eq!(pf.problem.f(), expect.f());
        assert_eq!(pf.epsilon, Some(1e-4));
        assert!(pf.problem.is_torus());
    }

    #[test]
    fn defaults_and_symmetry() {
        let text = "dimension 2\nlambda_min 0.5\nlambda_max 2\n[A 1 2]\n0.1 0 0 0\n[c]\n1 0 0 0\n[f fourier]\n1 0 0.5 0\n";
        let pf = ProblemFile::parse(text).unwrap();
        assert_eq!(pf.problem.a(0, 0), &AtomSum::constant(2, true, 1.0));
        assert_eq!(pf.problem.a(1, 0), pf.problem.a(0, 1));
        assert_eq!(pf.problem.f().atoms()[0].amplitude, 1.0);
    }

    #[test]
    fn malformed_atom_line_reports_its_line() {
        let text = BENCH_1D.replace("1 1 0\n[c]", "1 x 0\n[c]");
        match ProblemFile::parse(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        let text = BENCH_1D.replace("[A 1 1]", "[A 2 1]");
        assert!(matches!(
            ProblemFile::parse(&text),
            Err(Error::Parse { line: 5, .. })
        ));
        assert!(matches!(
            ProblemFile::parse("lambda_min 1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn targets() {
        let pf = ProblemFile::parse(&format!("{BENCH_1D}[target]\n1 2 0\n")).unwrap();
        assert!(matches!(pf.target, Some(Target::Atoms(_))));
        let pf = ProblemFile::parse(&format!("target solve\n{BENCH_1D}")).unwrap();
        assert_eq!(pf.target, Some(Target::Solve));
    }
}
