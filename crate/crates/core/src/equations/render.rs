//! Text, LaTeX, JSON and CSV output for equations and systems.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{EquationSystem, Form, Label, QuadTerm, QuadraticEquation};
use crate::error::{Error, Result};
use crate::multiindex::{GrassmannParams, IndexStyle, MultiIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
    Csv,
}

const MINUS: &str = "\u{2212}";

fn body_text(terms: &[QuadTerm], style: IndexStyle) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (pos, t) in terms.iter().enumerate() {
        let negative = t.coefficient < 0;
        match (pos, negative) {
            (0, false) => {}
            (0, true) => out.push_str(MINUS),
            (_, false) => out.push_str(" + "),
            (_, true) => {
                out.push(' ');
                out.push_str(MINUS);
                out.push(' ');
            }
        }
        let magnitude = t.coefficient.unsigned_abs();
        if magnitude != 1 {
            out.push_str(&magnitude.to_string());
        }
        out.push_str(&format!(
            "λ_{{{}}}λ_{{{}}}",
            t.left.render(style),
            t.right.render(style)
        ));
    }
    out
}

fn body_latex(terms: &[QuadTerm], style: IndexStyle) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (pos, t) in terms.iter().enumerate() {
        let negative = t.coefficient < 0;
        match (pos, negative) {
            (0, false) => {}
            (0, true) => out.push_str("- "),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        let magnitude = t.coefficient.unsigned_abs();
        if magnitude != 1 {
            out.push_str(&format!("{magnitude} "));
        }
        out.push_str(&format!(
            "{{\\lambda}}_{{{}}} {{\\lambda}}_{{{}}}",
            t.left.render(style),
            t.right.render(style)
        ));
    }
    out
}

/// `(1,12345): λ_{123}λ_{145} − λ_{124}λ_{135} + λ_{125}λ_{134} = 0`
pub fn render_equation_text(eq: &QuadraticEquation, style: IndexStyle) -> String {
    format!(
        "{}: {} = 0",
        eq.label().render(style),
        body_text(eq.terms(), style)
    )
}

/// One longtable row: `7 & (12,1345) & $... = 0$ \\`, or without the label column.
pub fn render_latex_row(
    ordinal: usize,
    eq: &QuadraticEquation,
    labeled: bool,
    style: IndexStyle,
) -> String {
    let body = body_latex(eq.terms(), style);
    if labeled {
        format!(
            "{ordinal} & {} & ${body} = 0$ \\\\",
            eq.label().render(style)
        )
    } else {
        format!("{ordinal} & ${body} = 0$ \\\\")
    }
}

fn caption(system: &EquationSystem, labeled: bool) -> String {
    let params = system.params();
    let kind = match system.half_width() {
        1 => "Pl\\\"ucker equations".to_string(),
        2 => "Pl\\\"ucker-like equations".to_string(),
        m => format!("Generalized equations (m = {m}, experimental)"),
    };
    let suffix = if labeled {
        ""
    } else {
        ", minus trivial or repeated ones"
    };
    format!("{kind} for (n,p) = ({},{}){suffix}", params.n, params.p)
}

/// Writes a whole system. With `labeled = false` the `(j,k)` column is left
/// out of text and LaTeX output, which is how reduced systems are printed.
pub fn render_system<W: Write>(
    out: &mut W,
    system: &EquationSystem,
    format: Format,
    labeled: bool,
) -> Result<()> {
    let style = IndexStyle::for_n(system.params().n);
    match format {
        Format::Text => {
            for (pos, eq) in system.iter().enumerate() {
                if labeled {
                    writeln!(out, "{}", render_equation_text(eq, style))?;
                } else {
                    writeln!(out, "{}: {} = 0", pos + 1, body_text(eq.terms(), style))?;
                }
            }
        }
        Format::Latex => {
            let columns = if labeled { "rll" } else { "rl" };
            writeln!(out, "\\begin{{longtable}}{{{columns}}}")?;
            writeln!(out, "\t\\caption{{{}}} \\\\", caption(system, labeled))?;
            if labeled {
                writeln!(out, "\t\\# & $(j,k)$ & Equation \\\\")?;
            } else {
                writeln!(out, "\t\\# & Equation \\\\")?;
            }
            writeln!(out, "\t\\hline")?;
            for (pos, eq) in system.iter().enumerate() {
                writeln!(out, "\t{}", render_latex_row(pos + 1, eq, labeled, style))?;
            }
            writeln!(out, "\\end{{longtable}}")?;
        }
        Format::Json => {
            serde_json::to_writer(&mut *out, &SystemJson::from(system))?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(out, system, style)?,
    }
    Ok(())
}

/// One row per term. A trivial equation gets a single row with `c = 0` and
/// empty factors so every ordinal appears.
fn write_csv<W: Write>(out: &mut W, system: &EquationSystem, style: IndexStyle) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eq", "j", "k", "c", "left", "right"])?;
    for (pos, eq) in system.iter().enumerate() {
        let ordinal = (pos + 1).to_string();
        let j = eq.label().j.render(style);
        let k = eq.label().k.render(style);
        if eq.terms().is_empty() {
            w.write_record([ordinal.as_str(), &j, &k, "0", "", ""])?;
        }
        for t in eq.terms() {
            w.write_record([
                ordinal.as_str(),
                &j,
                &k,
                &t.coefficient.to_string(),
                &t.left.render(style),
                &t.right.render(style),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    c: i64,
    left: MultiIndex,
    right: MultiIndex,
}

#[derive(Serialize, Deserialize)]
struct EquationJson {
    j: MultiIndex,
    k: MultiIndex,
    #[serde(default = "raw_form")]
    form: Form,
    terms: Vec<TermJson>,
}

fn raw_form() -> Form {
    Form::Raw
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: u32,
    p: u32,
    m: u32,
    equations: Vec<EquationJson>,
}

impl From<&EquationSystem> for SystemJson {
    fn from(system: &EquationSystem) -> Self {
        let params = system.params();
        SystemJson {
            n: params.n,
            p: params.p,
            m: system.half_width(),
            equations: system
                .iter()
                .map(|eq| EquationJson {
                    j: eq.label().j.clone(),
                    k: eq.label().k.clone(),
                    form: eq.form(),
                    terms: eq
                        .terms()
                        .iter()
                        .map(|t| TermJson {
                            c: t.coefficient,
                            left: t.left.clone(),
                            right: t.right.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl EquationSystem {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SystemJson::from(self))?)
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self> {
        let raw: SystemJson = serde_json::from_reader(reader)?;
        Self::try_from(raw)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: SystemJson = serde_json::from_str(s)?;
        Self::try_from(raw)
    }
}

impl TryFrom<SystemJson> for EquationSystem {
    type Error = Error;

    fn try_from(raw: SystemJson) -> Result<Self> {
        let params = GrassmannParams::new(raw.n, raw.p)?;
        super::check_half_width(params, raw.m)?;
        let width = raw.m as usize;
        let p = params.p as usize;
        let equations = raw
            .equations
            .into_iter()
            .map(|e| {
                if e.j.len() != p - width || e.k.len() != p + width {
                    return Err(Error::Parse(format!(
                        "label ({},{}) does not fit m = {}",
                        e.j, e.k, raw.m
                    )));
                }
                let terms = e
                    .terms
                    .into_iter()
                    .map(|t| QuadTerm::new(t.c, t.left, t.right))
                    .collect();
                QuadraticEquation::from_terms(params, Label::new(e.j, e.k), terms, e.form)
            })
            .collect::<Result<Vec<_>>>()?;
        EquationSystem::from_equations(params, raw.m, equations)
    }
}
