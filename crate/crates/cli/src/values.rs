//! Integer list syntax shared by `--l` and `--grid`: `7`, `0,4,8` or
//! `a:b[:step]` (inclusive).

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<usize>);

impl std::str::FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_values(s).map(IntList)
    }
}

pub fn parse_values(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty value list".into());
    }
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a nonnegative integer: {t:?}"));
    let out: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (a, b, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("range must be a:b or a:b:step, got {s:?}")),
        };
        if step == 0 {
            return Err("range step must be positive".into());
        }
        if a > b {
            return Err(format!("empty range {a}:{b}"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    Ok(out)
}
