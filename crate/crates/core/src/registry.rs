//! Named measures computed on a bipartite QCM, selectable by name at run time.

use serde::Serialize;
use serde_json::{json, Value};

use crate::entanglement::{
    coherent_information, detect_pure_loss, gie_numeric, key_bounds, one_way_distillable, reof_closed_form,
    reof_numeric, reof_squashed, GieBudget, OptOptions,
};
use crate::error::{Error, Result};
use crate::infomeasures::{im_mutual, MeasureValue};
use crate::model::{Qcm, Split};

/// Effort settings shared by the measures of one report.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    pub opts: OptOptions,
    pub gie: GieBudget,
}

impl MeasureContext {
    pub fn with_seed(seed: u64) -> Self {
        MeasureContext { opts: OptOptions::default().with_seed(seed), gie: GieBudget::default().with_seed(seed) }
    }
}

pub trait Measure {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn compute(&self, v: &Qcm, split: &Split, ctx: &MeasureContext) -> Result<Value>;
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

pub struct Reof;

impl Measure for Reof {
    fn name(&self) -> &'static str {
        "reof"
    }

    fn describe(&self) -> &'static str {
        "Rényi-2 Gaussian entanglement of formation (bits)"
    }

    fn compute(&self, v: &Qcm, split: &Split, ctx: &MeasureContext) -> Result<Value> {
        if let Some((lambda, s_db)) = detect_pure_loss(v, split) {
            let value = reof_closed_form(lambda, s_db)?;
            let mv = MeasureValue::new(value).with("lambda", lambda).with("s_db", s_db);
            return Ok(json!({ "method": "closed_form", "value": mv.value, "diagnostics": mv.diagnostics }));
        }
        let r = reof_numeric(v, split, &ctx.opts)?;
        let sq = reof_squashed(v, split, &ctx.opts)?;
        let mv = MeasureValue::new(r.value.min(sq.value))
            .with("barrier_value", r.value)
            .with("squashed_value", sq.value)
            .with("feasibility_residual", r.feasibility_residual)
            .with("evaluations", (r.evaluations + sq.evaluations) as f64);
        Ok(json!({
            "method": "optimizer",
            "bound": "upper",
            "value": mv.value,
            "converged": r.converged && sq.converged,
            "restarts": r.restarts,
            "diagnostics": mv.diagnostics,
        }))
    }
}

pub struct Gie;

impl Measure for Gie {
    fn name(&self) -> &'static str {
        "gie"
    }

    fn describe(&self) -> &'static str {
        "Gaussian intrinsic entanglement, lower and upper estimates (bits)"
    }

    fn compute(&self, v: &Qcm, split: &Split, ctx: &MeasureContext) -> Result<Value> {
        Ok(to_value(&gie_numeric(v, split, &ctx.gie)?))
    }
}

pub struct Bounds;

impl Measure for Bounds {
    fn name(&self) -> &'static str {
        "bounds"
    }

    fn describe(&self) -> &'static str {
        "Gaussian secret-key upper bounds (bits)"
    }

    fn compute(&self, v: &Qcm, split: &Split, ctx: &MeasureContext) -> Result<Value> {
        Ok(to_value(&key_bounds(v, split, &ctx.opts, &ctx.gie)?))
    }
}

pub struct Dist;

impl Measure for Dist {
    fn name(&self) -> &'static str {
        "dist"
    }

    fn describe(&self) -> &'static str {
        "One-way distillable entanglement: exact in the loss family, otherwise the coherent-information lower bound (bits)"
    }

    fn compute(&self, v: &Qcm, split: &Split, _ctx: &MeasureContext) -> Result<Value> {
        let ci = coherent_information(v, split)?;
        if let Some((lambda, s_db)) = detect_pure_loss(v, split) {
            let value = one_way_distillable(lambda, s_db)?;
            return Ok(json!({ "method": "closed_form", "value": value, "diagnostics": { "coherent_information": ci } }));
        }
        Ok(json!({ "method": "coherent_information", "bound": "lower", "value": ci.max(0.0), "diagnostics": { "coherent_information": ci } }))
    }
}

pub struct Im;

impl Measure for Im {
    fn name(&self) -> &'static str {
        "im"
    }

    fn describe(&self) -> &'static str {
        "Log-determinant mutual information (bits)"
    }

    fn compute(&self, v: &Qcm, split: &Split, _ctx: &MeasureContext) -> Result<Value> {
        Ok(json!({ "value": im_mutual(v, split)? }))
    }
}

/// Every registered measure, in report order.
pub fn measures() -> Vec<Box<dyn Measure>> {
    vec![Box::new(Reof), Box::new(Gie), Box::new(Bounds), Box::new(Dist), Box::new(Im)]
}

pub fn measure_names() -> Vec<&'static str> {
    measures().iter().map(|m| m.name()).collect()
}

/// Resolves a comma-separated selection such as `reof,gie`, keeping the given order.
pub fn select_measures(list: &str) -> Result<Vec<Box<dyn Measure>>> {
    let mut out: Vec<Box<dyn Measure>> = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if out.iter().any(|m| m.name() == name) {
            continue;
        }
        let m = measures().into_iter().find(|m| m.name() == name).ok_or_else(|| {
            Error::InvalidInput(format!("unknown measure {name:?}; known: {}", measure_names().join(",")))
        })?;
        out.push(m);
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("no measures selected".into()));
    }
    Ok(out)
}

/// Runs the selected measures and collects them under their names.
pub fn measure_report(v: &Qcm, split: &Split, selected: &[Box<dyn Measure>], ctx: &MeasureContext) -> Result<Value> {
    let mut map = serde_json::Map::new();
    for m in selected {
        map.insert(m.name().into(), m.compute(v, split, ctx)?);
    }
    Ok(Value::Object(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pure_loss_state, tmsv};

    #[test]
    fn selection_resolves_names_in_order() {
        let s = select_measures("dist, reof,dist").unwrap();
        assert_eq!(s.iter().map(|m| m.name()).collect::<Vec<_>>(), ["dist", "reof"]);
        assert!(select_measures("reof,nope").is_err());
        assert!(select_measures(" , ").is_err());
    }

    #[test]
    fn loss_family_uses_closed_forms() {
        let v = pure_loss_state(0.5, 10.0).unwrap();
        let ctx = MeasureContext::with_seed(0);
        let r = measure_report(&v, &Split::ab(), &select_measures("reof,dist").unwrap(), &ctx).unwrap();
        assert_eq!(r["reof"]["method"], "closed_form");
        assert!((r["reof"]["value"].as_f64().unwrap() - reof_closed_form(0.5, 10.0).unwrap()).abs() < 1e-12);
        assert!((r["dist"]["value"].as_f64().unwrap() - one_way_distillable(0.5, 10.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tmsv_mutual_information() {
        let v = tmsv(4.0).unwrap();
        let r = measure_report(&v, &Split::ab(), &select_measures("im").unwrap(), &MeasureContext::with_seed(0)).unwrap();
        let c = (2.0 * crate::model::squeezing_parameter(4.0)).cosh();
        assert!((r["im"]["value"].as_f64().unwrap() - 2.0 * c.log2()).abs() < 1e-9);
    }
}
