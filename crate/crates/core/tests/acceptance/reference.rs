//! A character-scanning reimplementation of the numeric parse rules, kept
//! free of regular expressions so it can cross-check the library.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefError {
    NotANumber,
    Ambiguous(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefValue {
    pub magnitude: f64,
    pub percent: bool,
}

struct Literal {
    start: usize,
    end: usize,
    digits: String,
    frac_len: i32,
    exp: i32,
}

const CURRENCY: [char; 3] = ['$', '€', '£'];

fn digit(cs: &[char], i: usize) -> bool {
    cs.get(i).is_some_and(|c| c.is_ascii_digit())
}

fn scan_literal(cs: &[char], start: usize) -> Literal {
    let mut j = start;
    let mut digits = String::new();
    let mut run = 0;
    while digit(cs, j) {
        digits.push(cs[j]);
        j += 1;
        run += 1;
    }
    if (1..=3).contains(&run) {
        while cs.get(j) == Some(&',') && digit(cs, j + 1) && digit(cs, j + 2) && digit(cs, j + 3) {
            digits.extend(&cs[j + 1..j + 4]);
            j += 4;
        }
    }
    let mut frac_len = 0;
    if cs.get(j) == Some(&'.') && digit(cs, j + 1) {
        j += 1;
        while digit(cs, j) {
            digits.push(cs[j]);
            frac_len += 1;
            j += 1;
        }
    }
    let mut exp = 0;
    if matches!(cs.get(j), Some('e') | Some('E')) {
        let mut k = j + 1;
        let negative = cs.get(k) == Some(&'-');
        if matches!(cs.get(k), Some('+') | Some('-')) {
            k += 1;
        }
        if digit(cs, k) {
            let mut e = 0i32;
            while digit(cs, k) {
                e = e.saturating_mul(10).saturating_add(cs[k].to_digit(10).unwrap() as i32);
                k += 1;
            }
            exp = if negative { -e } else { e };
            j = k;
        }
    }
    Literal {
        start,
        end: j,
        digits,
        frac_len,
        exp,
    }
}

fn scale_after(cs: &[char], end: usize) -> (i32, usize) {
    let mut j = end;
    while cs.get(j).is_some_and(|c| c.is_whitespace()) {
        j += 1;
    }
    let mut k = j;
    while cs.get(k).is_some_and(|c| c.is_alphabetic()) {
        k += 1;
    }
    let word: String = cs[j..k].iter().collect::<String>().to_lowercase();
    let word = word.strip_suffix('s').unwrap_or(&word);
    match word {
        "thousand" => (3, k),
        "million" => (6, k),
        "billion" => (9, k),
        _ => (0, end),
    }
}

/// `hint_exp` is the decimal exponent of the document scale hint.
pub fn reference_normalize(raw: &str, hint_exp: Option<i32>) -> Result<RefValue, RefError> {
    let cs: Vec<char> = raw.chars().collect();
    let mut literals = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let starts = cs[i].is_ascii_digit() || (cs[i] == '.' && digit(&cs, i + 1));
        if !starts {
            i += 1;
            continue;
        }
        let lit = scan_literal(&cs, i);
        let glued_before = i > 0 && cs[i - 1].is_alphanumeric();
        let glued_after = cs.get(lit.end).is_some_and(|c| c.is_alphanumeric());
        i = lit.end.max(i + 1);
        if !glued_before && !glued_after {
            literals.push(lit);
        }
    }
    let lit = match literals.len() {
        0 => return Err(RefError::NotANumber),
        1 => literals.pop().unwrap(),
        n => return Err(RefError::Ambiguous(n)),
    };
    let percent = cs.contains(&'%');
    let (inline, after) = scale_after(&cs, lit.end);
    let scale = if inline > 0 {
        inline
    } else if percent {
        0
    } else {
        hint_exp.unwrap_or(0)
    };

    let mut l = lit.start;
    while l > 0 && (cs[l - 1].is_whitespace() || CURRENCY.contains(&cs[l - 1])) {
        l -= 1;
    }
    let mut r = after;
    while r < cs.len() && (cs[r].is_whitespace() || cs[r] == '%') {
        r += 1;
    }
    let parens = l > 0 && cs[l - 1] == '(' && cs.get(r) == Some(&')');
    let mut m = lit.start;
    while m > 0 && CURRENCY.contains(&cs[m - 1]) {
        m -= 1;
    }
    let minus = m > 0 && (cs[m - 1] == '-' || cs[m - 1] == '\u{2212}') && !(m > 1 && cs[m - 2].is_alphanumeric());

    let total_exp = lit.exp - lit.frac_len + scale;
    if total_exp > 30 {
        return Err(RefError::NotANumber);
    }
    let int: u128 = lit.digits.parse().expect("digits");
    let magnitude = if total_exp >= 0 {
        (int * 10u128.pow(total_exp as u32)) as f64
    } else {
        assert!(int < (1u128 << 53) && -total_exp <= 22, "outside the exact range");
        int as f64 / 10f64.powi(-total_exp)
    };
    Ok(RefValue {
        magnitude: if parens || minus { -magnitude } else { magnitude },
        percent,
    })
}
