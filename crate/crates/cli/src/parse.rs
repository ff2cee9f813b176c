//! Text forms of complex numbers: `1.5`, `-2i`, `0.1+0.2i`, `3e-2-i`.

use num_complex::Complex64;

fn real(text: &str) -> Result<f64, String> {
    text.parse::<f64>()
        .map_err(|_| format!("`{text}` is not a number"))
}

/// Coefficient of `i`: an empty or sign-only body stands for ±1.
fn imaginary(text: &str) -> Result<f64, String> {
    match text {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(text),
    }
}

pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err("empty number".into());
    }
    let Some(body) = text.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(real(&text)?, 0.0));
    };
    // the sign separating the parts, skipping exponent signs such as `1e-3`
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let parts = match split {
        Some(p) => real(&body[..p]).and_then(|re| Ok((re, imaginary(&body[p..])?))),
        None => imaginary(body).map(|im| (0.0, im)),
    };
    parts
        .map(|(re, im)| Complex64::new(re, im))
        .map_err(|e| format!("{e} in `{text}`"))
}

pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, String> {
    text.split(',').map(parse_complex).collect()
}

/// Inverse of [`parse_complex`] up to float formatting.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        return format!("{}", z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", z.re, z.im.abs())
}
