//! Exact symbolic codings of rotations, straight lines, billiards and torus
//! flows. All orbit arithmetic happens in one field `Q(√D)`; boundary cases
//! are decided exactly and rejected when degenerate.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::Mutex;

use crate::arith::QuadraticReal;
use crate::error::{invalid, Error, Result};
use crate::word::{Alphabet, FiniteWord, Letter, LetterSource, WordStream};

type Q = QuadraticReal;

fn zero() -> Q {
    Q::integer(0)
}

fn one() -> Q {
    Q::integer(1)
}

fn in_unit_interval(v: &Q) -> Result<bool> {
    Ok(v.compare(&zero())? != Ordering::Less && v.compare(&one())? == Ordering::Less)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationParams {
    pub y: Q,
    pub alpha: Q,
}

impl RotationParams {
    pub fn new(y: Q, alpha: Q) -> Result<Self> {
        if !in_unit_interval(&y)? {
            return Err(invalid(format!("start point {y} outside [0,1)")));
        }
        if alpha.signum() != Ordering::Greater || alpha.compare(&one())? != Ordering::Less {
            return Err(invalid(format!("angle {alpha} outside (0,1)")));
        }
        if alpha.is_rational() {
            return Err(invalid(format!(
                "rational angle {alpha} gives a periodic coding"
            )));
        }
        // Mixed fields are caught here rather than mid-orbit.
        y.checked_add(&alpha)?;
        Ok(RotationParams { y, alpha })
    }
}

struct RotationSource {
    threshold: Q,
    alpha: Q,
    state: Mutex<Q>,
}

impl LetterSource for RotationSource {
    fn extend(&self, buf: &mut Vec<Letter>, len: usize) {
        let mut y = self.state.lock().expect("rotation state poisoned");
        while buf.len() < len {
            let letter = if y.compare(&self.threshold).expect("same field") == Ordering::Less {
                1
            } else {
                2
            };
            buf.push(letter);
            let mut next = &*y + &self.alpha;
            if next.compare(&one()).expect("same field") != Ordering::Less {
                next = &next - &one();
            }
            *y = next;
        }
    }
}

/// Lazy rotation coding: letter `k` is `1` iff `R_α^{k-1}(y) ∈ [0, 1−α)`.
pub fn rotation_stream(p: &RotationParams) -> WordStream {
    WordStream::new(
        RotationSource {
            threshold: &one() - &p.alpha,
            alpha: p.alpha.clone(),
            state: Mutex::new(p.y.clone()),
        },
        Alphabet::numeric(2).expect("binary"),
        format!("rotation(y={}, alpha={})", p.y, p.alpha),
    )
}

pub fn rotation_word(p: &RotationParams, n: usize) -> FiniteWord {
    rotation_stream(p).prefix(n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineParams {
    pub x: (Q, Q),
    pub theta: (Q, Q),
}

impl LineParams {
    /// Validates the start point and direction; the slope may be rational
    /// here (rendering accepts it), the codings reject it.
    pub fn new(x: (Q, Q), theta: (Q, Q)) -> Result<Self> {
        if !in_unit_interval(&x.0)? || !in_unit_interval(&x.1)? {
            return Err(invalid("start point outside [0,1)^2"));
        }
        if theta.0.signum() != Ordering::Greater || theta.1.signum() != Ordering::Greater {
            return Err(invalid("direction components must be positive"));
        }
        x.0.checked_add(&x.1)?
            .checked_add(&theta.0)?
            .checked_add(&theta.1)?;
        Ok(LineParams { x, theta })
    }

    pub fn slope(&self) -> Q {
        &self.theta.1 / &self.theta.0
    }

    fn require_irrational(&self) -> Result<()> {
        if self.slope().is_rational() {
            return Err(invalid(format!(
                "rational slope {} is outside the Sturmian setting",
                self.slope()
            )));
        }
        Ok(())
    }

    /// `α = θ2 / (θ1 + θ2)`.
    pub fn rotation_angle(&self) -> Q {
        &self.theta.1 / &(&self.theta.0 + &self.theta.1)
    }

    /// Start of the equivalent rotation: `α(1 − x1) + (1 − α)x2`.
    /// Both the next-crossing test and the rotation threshold `1 − α`
    /// agree on this value; it reduces to `α` at `x = 0`.
    pub fn projected_start(&self) -> Q {
        let a = self.rotation_angle();
        &(&a * &(&one() - &self.x.0)) + &(&(&one() - &a) * &self.x.1)
    }

    pub fn equivalent_rotation(&self) -> Result<RotationParams> {
        RotationParams::new(self.projected_start(), self.rotation_angle())
    }
}

fn degenerate(what: &str, k: usize) -> Error {
    Error::DegenerateTrajectory(format!("{what} at crossing {}", k + 1))
}

/// Cutting sequence of the half-line `x + tθ`, `t > 0`: `1` for a vertical
/// grid line, `2` for a horizontal one, ordered by global crossing indices.
pub fn cutting_sequence(p: &LineParams, n: usize) -> Result<FiniteWord> {
    p.require_irrational()?;
    let (mut i, mut j) = (1i64, 1i64);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        // t_v = (i − x1)/θ1 vs t_h = (j − x2)/θ2, cross-multiplied.
        let tv = &(&Q::integer(i) - &p.x.0) * &p.theta.1;
        let th = &(&Q::integer(j) - &p.x.1) * &p.theta.0;
        match tv.compare(&th)? {
            Ordering::Less => {
                out.push(1);
                i += 1;
            }
            Ordering::Greater => {
                out.push(2);
                j += 1;
            }
            Ordering::Equal => return Err(degenerate("grid point", out.len())),
        }
    }
    Ok(FiniteWord::new(out))
}

#[derive(Clone, Debug)]
struct Bounce {
    point: (Q, Q),
    letter: Letter,
}

/// Reflecting simulation on `[0,1]²`; yields each wall hit in order.
fn billiard_bounces(p: &LineParams, n: usize) -> Result<Vec<Bounce>> {
    let (mut px, mut py) = p.x.clone();
    let (mut sx, mut sy) = (true, true);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let dx = if sx { &one() - &px } else { px.clone() };
        let dy = if sy { &one() - &py } else { py.clone() };
        let tx = &dx * &p.theta.1;
        let ty = &dy * &p.theta.0;
        let vertical = match tx.compare(&ty)? {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => return Err(degenerate("corner hit", out.len())),
        };
        if vertical {
            let t = &dx / &p.theta.0;
            let step = &t * &p.theta.1;
            py = if sy { &py + &step } else { &py - &step };
            px = if sx { one() } else { zero() };
            sx = !sx;
        } else {
            let t = &dy / &p.theta.1;
            let step = &t * &p.theta.0;
            px = if sx { &px + &step } else { &px - &step };
            py = if sy { one() } else { zero() };
            sy = !sy;
        }
        out.push(Bounce {
            point: (px.clone(), py.clone()),
            letter: if vertical { 1 } else { 2 },
        });
    }
    Ok(out)
}

/// Billiard word: `1` when the ball hits a vertical wall, `2` otherwise.
pub fn billiard_word(p: &LineParams, n: usize) -> Result<FiniteWord> {
    p.require_irrational()?;
    Ok(FiniteWord::new(
        billiard_bounces(p, n)?
            .into_iter()
            .map(|b| b.letter)
            .collect(),
    ))
}

/// Flow word on the torus `[0,1)²`: `1` when the Poincaré section is
/// crossed through its vertical branch.
pub fn flow_word(p: &LineParams, n: usize) -> Result<FiniteWord> {
    p.require_irrational()?;
    let (mut px, mut py) = p.x.clone();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let dx = &one() - &px;
        let dy = &one() - &py;
        match (&dx * &p.theta.1).compare(&(&dy * &p.theta.0))? {
            Ordering::Less => {
                py = (&py + &(&(&dx / &p.theta.0) * &p.theta.1)).fract();
                px = zero();
                out.push(1);
            }
            Ordering::Greater => {
                px = (&px + &(&(&dy / &p.theta.1) * &p.theta.0)).fract();
                py = zero();
                out.push(2);
            }
            Ordering::Equal => return Err(degenerate("torus corner", out.len())),
        }
    }
    Ok(FiniteWord::new(out))
}

const VIEW: f64 = 512.0;
const MARGIN: f64 = 16.0;

fn to_view(v: &Q, flip: bool) -> f64 {
    let s = v.to_f64().clamp(0.0, 1.0);
    let s = if flip { 1.0 - s } else { s };
    MARGIN + s * (VIEW - 2.0 * MARGIN)
}

/// SVG drawing of the first `bounces` segments of the billiard trajectory.
pub fn render_trajectory_svg(p: &LineParams, bounces: usize) -> Result<String> {
    let hits = billiard_bounces(p, bounces)?;
    let mut points = vec![(to_view(&p.x.0, false), to_view(&p.x.1, true))];
    points.extend(
        hits.iter()
            .map(|b| (to_view(&b.point.0, false), to_view(&b.point.1, true))),
    );
    let side = VIEW - 2.0 * MARGIN;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="512" height="512" viewBox="0 0 512 512">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <rect x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}" fill="none" stroke="black" stroke-width="2"/>"#
    )
    .unwrap();
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.3},{y:.3}"))
        .collect();
    writeln!(
        svg,
        r#"  <polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        coords.join(" ")
    )
    .unwrap();
    for (b, (x, y)) in hits.iter().zip(&points[1..]) {
        writeln!(
            svg,
            r#"  <text x="{x:.3}" y="{y:.3}" font-size="12" fill="none" stroke="darkred" stroke-width="0.6">{}</text>"#,
            b.letter
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Number of polyline segments in a document produced above.
pub fn svg_segment_count(svg: &str) -> usize {
    svg.split("points=\"")
        .nth(1)
        .and_then(|s| s.split('"').next())
        .map_or(0, |pts| pts.split_whitespace().count().saturating_sub(1))
}
