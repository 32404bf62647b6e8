//! Polynomial color reduction: a vertex with color `c` reads `c - 1` in base
//! `q` as a polynomial of degree `t` over `GF(q)` and moves to a point on its
//! graph that few neighbors' polynomials pass through.

use std::collections::BTreeMap;

use crate::graph::{
    coloring_defect, validate_coloring, Color, Coloring, Graph, GraphError, VertexId,
};
use crate::math::{ceil_root, prime_at_least};
use crate::sim::{
    Envelope, NodeContext, NodeProgram, Outgoing, Pipeline, ProgramError, Round, Start,
    WakeOutcome, WakeSchedule,
};
use crate::{Error, Result};

/// Largest field size considered; new colors must fit in a `u32`.
pub const PRIME_CAP: u64 = 65_535;

const MAX_POLY_DEGREE: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReduceParams {
    pub q: u64,
    pub t: u32,
}

impl ReduceParams {
    pub fn colors(&self) -> u64 {
        self.q * self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceTarget {
    /// No chosen point may be shared with a neighbor.
    Proper,
    /// Each vertex may add up to this many conflicts.
    Defect(u64),
}

/// Smallest-`q` parameters for a step from `m` colors, with `q >= min_q(t)`.
/// `None` if no step would reduce the color count.
fn best_params(m: u64, min_q: impl Fn(u32) -> u64) -> Result<Option<ReduceParams>> {
    let mut best: Option<ReduceParams> = None;
    for t in 1..=MAX_POLY_DEGREE {
        let floor = min_q(t);
        if best.is_some_and(|b| floor > b.q) {
            break;
        }
        let lower = floor.max(ceil_root(m, t + 1));
        let Some(q) = prime_at_least(lower, PRIME_CAP) else {
            continue;
        };
        if best.is_none_or(|b| q < b.q) {
            best = Some(ReduceParams { q, t });
        }
    }
    let best = best.ok_or_else(|| {
        Error::Invalid(format!("no field size below {PRIME_CAP} fits {m} colors"))
    })?;
    Ok((best.colors() < m).then_some(best))
}

/// Parameters of the next proper reduction step, if one still helps.
pub fn proper_step_params(m: u64, delta: u64) -> Result<Option<ReduceParams>> {
    best_params(m, |t| delta * u64::from(t) + 1)
}

/// Parameters of the next defective step that adds at most `remaining`
/// conflicts per vertex, if one still helps.
pub fn defect_step_params(m: u64, delta: u64, remaining: u64) -> Result<Option<ReduceParams>> {
    best_params(m, |t| delta * u64::from(t) / (remaining + 1) + 1)
}

/// Coefficients of the polynomial of `color`, lowest degree first.
fn coefficients(color: Color, params: ReduceParams) -> Vec<u64> {
    let mut x = u64::from(color) - 1;
    (0..=params.t)
        .map(|_| {
            let digit = x % params.q;
            x /= params.q;
            digit
        })
        .collect()
}

fn evaluate(coeffs: &[u64], x: u64, q: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &a| (acc * x + a) % q)
}

struct ReduceNode {
    color: Color,
    params: ReduceParams,
    target: ReduceTarget,
    delta: u64,
    new_color: Color,
}

impl NodeProgram for ReduceNode {
    type Message = Color;
    type Output = Color;

    fn on_start(&mut self, _ctx: &NodeContext<'_>) -> std::result::Result<Start, ProgramError> {
        Ok(Start {
            schedule: WakeSchedule::from_rounds([1]),
            done: false,
        })
    }

    fn send(&mut self, _round: Round) -> std::result::Result<Vec<Outgoing<Color>>, ProgramError> {
        Ok(vec![Outgoing::Broadcast(self.color)])
    }

    fn on_wake(
        &mut self,
        _round: Round,
        inbox: Vec<Envelope<Color>>,
    ) -> std::result::Result<WakeOutcome, ProgramError> {
        let q = self.params.q;
        let own = coefficients(self.color, self.params);
        let mut same = 0u64;
        let mut others = Vec::new();
        for env in inbox {
            if env.payload == self.color {
                same += 1;
            } else {
                others.push(coefficients(env.payload, self.params));
            }
        }
        let mut best = (u64::MAX, 0, 0);
        for x in 0..q {
            let y = evaluate(&own, x, q);
            let hits = others.iter().filter(|c| evaluate(c, x, q) == y).count() as u64;
            if hits < best.0 {
                best = (hits, x, y);
            }
        }
        let (hits, x, y) = best;
        match self.target {
            ReduceTarget::Proper if hits + same > 0 => {
                return Err(format!("no conflict-free point (q={q}, t={})", self.params.t).into());
            }
            ReduceTarget::Defect(budget)
                if hits > budget.min(self.delta * u64::from(self.params.t) / q) =>
            {
                return Err(format!("{hits} conflicts exceed budget {budget}").into());
            }
            _ => {}
        }
        self.new_color = (x * q + y + 1) as Color;
        Ok(WakeOutcome::done())
    }

    fn into_output(self) -> Color {
        self.new_color
    }
}

/// One all-awake round of polynomial reduction from `c` to at most `q^2` colors.
pub fn polynomial_reduce_step(
    pipeline: &mut Pipeline,
    name: &str,
    g: &Graph,
    c: &Coloring,
    params: ReduceParams,
    target: ReduceTarget,
    delta: u64,
) -> Result<Coloring> {
    let mut programs = BTreeMap::new();
    for v in g.vertices() {
        let color = c.get(v);
        if color == 0 {
            return Err(GraphError::Uncolored(v).into());
        }
        if !crate::math::pow_at_least(params.q, params.t + 1, u64::from(color)) {
            return Err(Error::Invalid(format!(
                "color {color} does not fit q={} t={}",
                params.q, params.t
            )));
        }
        programs.insert(
            v,
            ReduceNode {
                color,
                params,
                target,
                delta,
                new_color: 0,
            },
        );
    }
    let out = pipeline.run(name, g, programs)?;
    Ok(Coloring::from_map(out, params.colors() as Color))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductionLog {
    pub steps: Vec<ReduceParams>,
}

/// Proper coloring with `O(delta^2)` colors, starting from the vertex ids.
pub fn linial_coloring_in(
    pipeline: &mut Pipeline,
    g: &Graph,
    delta: u64,
) -> Result<(Coloring, ReductionLog)> {
    linial_from(pipeline, g, Coloring::from_ids(g), delta)
}

/// Like [`linial_coloring_in`] but starting from any proper coloring.
pub fn linial_from(
    pipeline: &mut Pipeline,
    g: &Graph,
    start: Coloring,
    delta: u64,
) -> Result<(Coloring, ReductionLog)> {
    if !validate_coloring(g, &start, true).proper {
        return Err(GraphError::ImproperColoring(
            validate_coloring(g, &start, true).violations.len(),
        )
        .into());
    }
    let mut c = start;
    let mut log = ReductionLog::default();
    while let Some(params) = proper_step_params(u64::from(c.palette()), delta)? {
        let name = format!("linial-{}", log.steps.len() + 1);
        c = polynomial_reduce_step(pipeline, &name, g, &c, params, ReduceTarget::Proper, delta)?;
        log.steps.push(params);
    }
    Ok((c, log))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectiveColoringResult {
    pub coloring: Coloring,
    pub p: u64,
    /// Promised bound on same-colored neighbors, `ceil(delta / p)`.
    pub defect_bound: u64,
    /// Palette size reached.
    pub colors_bound: u64,
    pub measured_max_defect: u64,
    pub log: ReductionLog,
}

impl DefectiveColoringResult {
    /// Palette size in units of `p^2`.
    pub fn color_factor(&self) -> f64 {
        self.colors_bound as f64 / (self.p * self.p) as f64
    }
}

/// `ceil(delta/p)`-defective coloring: a proper reduction first, then
/// defective steps while the remaining defect budget lets them shrink the
/// palette.
pub fn defective_coloring_in(
    pipeline: &mut Pipeline,
    g: &Graph,
    delta: u64,
    p: u64,
) -> Result<DefectiveColoringResult> {
    if p == 0 {
        return Err(Error::Invalid("p must be positive".into()));
    }
    let budget = delta.div_ceil(p);
    let (coloring, log) = if p == 1 {
        (
            Coloring::from_map(g.vertices().map(|v| (v, 1)).collect(), 1),
            ReductionLog::default(),
        )
    } else {
        let (mut c, mut log) = linial_coloring_in(pipeline, g, delta)?;
        let mut used = 0;
        while let Some(params) = defect_step_params(u64::from(c.palette()), delta, budget - used)? {
            let step = delta * u64::from(params.t) / params.q;
            let name = format!("defective-{}", log.steps.len() + 1);
            c = polynomial_reduce_step(
                pipeline,
                &name,
                g,
                &c,
                params,
                ReduceTarget::Defect(budget - used),
                delta,
            )?;
            log.steps.push(params);
            used += step;
        }
        (c, log)
    };
    let measured = coloring_defect(g, &coloring)?.max_defect as u64;
    Ok(DefectiveColoringResult {
        colors_bound: u64::from(coloring.palette()),
        coloring,
        p,
        defect_bound: budget,
        measured_max_defect: measured,
        log,
    })
}

/// Vertices grouped by color.
pub fn color_classes(c: &Coloring) -> BTreeMap<Color, Vec<VertexId>> {
    let mut classes: BTreeMap<Color, Vec<VertexId>> = BTreeMap::new();
    for (v, color) in c.iter() {
        classes.entry(color).or_default().push(v);
    }
    classes
}
