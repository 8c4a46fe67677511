//! Instance file format: a canonical JSON document with exact rationals.
//!
//! Rationals are written as JSON integers when integral (and small enough
//! for a JSON number) and as lowest-terms `"p/q"` strings otherwise;
//! floating literals are rejected. Serialization is canonical: sorted keys,
//! compact separators, one trailing newline, so identical instances produce
//! byte-identical files.

mod gen;

pub use gen::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{
    GeneralInstance, IndicatorInstance, Instance, VarBounds, XiForm, XiSet, YBounds,
};
use crate::scalar::{format_scalar, parse_scalar, Scalar};
use serde_json::{json, Map, Value};
use std::path::Path;

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, canonical_json(inst))?;
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Schema("top level must be an object".into()))?;
    let kind = get_str(obj, "kind")?;
    let inst = match kind.as_str() {
        "general" => Instance::General(parse_general(obj)?),
        "indicator" => Instance::Indicator(parse_indicator(obj)?),
        other => {
            return Err(Error::Schema(format!(
                "kind: expected \"general\" or \"indicator\", got {other:?}"
            )))
        }
    };
    inst.validate()
        .map_err(|e| Error::Schema(format!("instance fails validation: {e}")))?;
    Ok(inst)
}

/// Canonical serialization: sorted keys, compact JSON, trailing newline.
pub fn canonical_json(inst: &Instance) -> String {
    let value = match inst {
        Instance::General(g) => general_to_value(g),
        Instance::Indicator(i) => indicator_to_value(i),
    };
    let mut out = serde_json::to_string(&value).expect("serializable");
    out.push('\n');
    out
}

struct Dims {
    n1: usize,
    nc2: usize,
    nd2: usize,
    np: usize,
    m: usize,
}

fn parse_dims(obj: &Map<String, Value>) -> Result<Dims> {
    let dims = get_obj(obj, "dims")?;
    Ok(Dims {
        n1: get_usize(dims, "dims.n1", "n1")?,
        nc2: get_usize(dims, "dims.nc2", "nc2")?,
        nd2: get_usize(dims, "dims.nd2", "nd2")?,
        np: get_usize(dims, "dims.np", "np")?,
        m: get_usize(dims, "dims.m", "m")?,
    })
}

fn parse_common(
    obj: &Map<String, Value>,
    d: &Dims,
) -> Result<(
    Vec<Scalar>,
    Matrix,
    Vec<Scalar>,
    Matrix,
    Matrix,
    Matrix,
    Matrix,
    Matrix,
    Vec<Scalar>,
    Vec<Vec<Scalar>>,
    XiSet,
    YBounds,
    Option<VarBounds>,
)> {
    let c0 = get_rat_vec(obj, "c0")?;
    let c_xi = get_rat_mat(obj, "C", d.n1, d.np)?;
    let d0 = get_rat_vec(obj, "d0")?;
    let dc_xi = get_rat_mat(obj, "Dc", d.nc2, d.np)?;
    let dd_xi = get_rat_mat(obj, "Dd", d.nd2, d.np)?;
    let t = get_rat_mat(obj, "T", d.m, d.n1)?;
    let wc = get_rat_mat(obj, "Wc", d.m, d.nc2)?;
    let wd = get_rat_mat(obj, "Wd", d.m, d.nd2)?;
    let h0 = get_rat_vec(obj, "h0")?;
    let x_obj = get_obj(obj, "X")?;
    let x_points = get_points(x_obj, "X.points")?;
    let xi_obj = get_obj(obj, "Xi")?;
    let xi_set = if let Some(v) = xi_obj.get("points") {
        let pts = rat_rows(v, "Xi.points")?;
        let mut bits = Vec::with_capacity(pts.len());
        for (i, p) in pts.iter().enumerate() {
            let mut row = Vec::with_capacity(p.len());
            for (j, s) in p.iter().enumerate() {
                row.push(match () {
                    _ if s == &Scalar::from_integer(0.into()) => false,
                    _ if s == &Scalar::from_integer(1.into()) => true,
                    _ => {
                        return Err(Error::Schema(format!(
                            "Xi.points[{i}][{j}]: expected 0 or 1, got {}",
                            format_scalar(s)
                        )))
                    }
                });
            }
            bits.push(row);
        }
        XiSet::from_points(bits).map_err(|e| Error::Schema(format!("Xi.points: {e}")))?
    } else if xi_obj.contains_key("budget") {
        let k = get_usize(xi_obj, "Xi.budget", "budget")?;
        XiSet::budget(d.np, k)?
    } else {
        return Err(Error::Schema("Xi: expected \"points\" or \"budget\"".into()));
    };
    let y_obj = get_obj(obj, "Y")?;
    let y_bounds = YBounds {
        yc_upper: get_rat_vec(y_obj, "yc_upper").map_err(prefix("Y"))?,
        yd_lower: get_rat_vec(y_obj, "yd_lower").map_err(prefix("Y"))?,
        yd_upper: get_rat_vec(y_obj, "yd_upper").map_err(prefix("Y"))?,
    };
    let var_bounds = match obj.get("bounds") {
        None => None,
        Some(v) => {
            let b = v
                .as_object()
                .ok_or_else(|| Error::Schema("bounds: expected an object".into()))?;
            Some(VarBounds {
                x_lower: get_rat_vec(b, "x_lower").map_err(prefix("bounds"))?,
                x_upper: get_rat_vec(b, "x_upper").map_err(prefix("bounds"))?,
                y_lower: get_rat_vec(b, "y_lower").map_err(prefix("bounds"))?,
                y_upper: get_rat_vec(b, "y_upper").map_err(prefix("bounds"))?,
            })
        }
    };
    Ok((
        c0, c_xi, d0, dc_xi, dd_xi, t, wc, wd, h0, x_points, xi_set, y_bounds, var_bounds,
    ))
}

fn parse_general(obj: &Map<String, Value>) -> Result<GeneralInstance> {
    let d = parse_dims(obj)?;
    let (c0, c_xi, d0, dc_xi, dd_xi, t, wc, wd, h0, x_set, xi_set, y_bounds, var_bounds) =
        parse_common(obj, &d)?;
    let h_xi = get_rat_mat(obj, "H", d.m, d.np)?;
    Ok(GeneralInstance {
        n1: d.n1,
        nc2: d.nc2,
        nd2: d.nd2,
        np: d.np,
        m: d.m,
        c0,
        c_xi,
        d0,
        dc_xi,
        dd_xi,
        t,
        wc,
        wd,
        h0,
        h_xi,
        x_set,
        xi_set,
        y_bounds,
        var_bounds,
    })
}

fn parse_indicator(obj: &Map<String, Value>) -> Result<IndicatorInstance> {
    let d = parse_dims(obj)?;
    let (c0, c_xi, d0, dc_xi, dd_xi, t, wc, wd, h0, x_set, xi_set, y_bounds, var_bounds) =
        parse_common(obj, &d)?;
    let i0 = get_index_sets(obj, "I0")?;
    let i1 = get_index_sets(obj, "I1")?;
    Ok(IndicatorInstance {
        n1: d.n1,
        nc2: d.nc2,
        nd2: d.nd2,
        np: d.np,
        m: d.m,
        c0,
        c_xi,
        d0,
        dc_xi,
        dd_xi,
        t,
        wc,
        wd,
        h0,
        i0,
        i1,
        x_set,
        xi_set,
        y_bounds,
        var_bounds,
    })
}

fn prefix(p: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Schema(format!("{p}.{e}"))
}

fn get_obj<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Map<String, Value>> {
    obj.get(key)
        .ok_or_else(|| Error::Schema(format!("missing field {key:?}")))?
        .as_object()
        .ok_or_else(|| Error::Schema(format!("{key}: expected an object")))
}

fn get_str(obj: &Map<String, Value>, key: &str) -> Result<String> {
    obj.get(key)
        .ok_or_else(|| Error::Schema(format!("missing field {key:?}")))?
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| Error::Schema(format!("{key}: expected a string")))
}

fn get_usize(obj: &Map<String, Value>, path: &str, key: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| Error::Schema(format!("missing field {path:?}")))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::Schema(format!("{path}: expected a nonnegative integer")))
}

fn rat_value(v: &Value, path: &str) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::scalar::rat(i))
            } else {
                Err(Error::Schema(format!(
                    "{path}: floating or oversized literals are not permitted, write \"p/q\""
                )))
            }
        }
        Value::String(s) => {
            parse_scalar(s).map_err(|e| Error::Schema(format!("{path}: {e}")))
        }
        _ => Err(Error::Schema(format!(
            "{path}: expected an integer or a \"p/q\" string"
        ))),
    }
}

fn get_rat_vec(obj: &Map<String, Value>, key: &str) -> Result<Vec<Scalar>> {
    let arr = obj
        .get(key)
        .ok_or_else(|| Error::Schema(format!("missing field {key:?}")))?
        .as_array()
        .ok_or_else(|| Error::Schema(format!("{key}: expected an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| rat_value(v, &format!("{key}[{i}]")))
        .collect()
}

fn rat_rows(v: &Value, path: &str) -> Result<Vec<Vec<Scalar>>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema(format!("{path}: expected an array of rows")))?;
    arr.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Schema(format!("{path}[{i}]: expected an array")))?;
            row.iter()
                .enumerate()
                .map(|(j, v)| rat_value(v, &format!("{path}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

fn get_rat_mat(obj: &Map<String, Value>, key: &str, rows: usize, cols: usize) -> Result<Matrix> {
    let data = rat_rows(
        obj.get(key)
            .ok_or_else(|| Error::Schema(format!("missing field {key:?}")))?,
        key,
    )?;
    if data.len() != rows {
        return Err(Error::Schema(format!(
            "{key}: expected {rows} rows, got {}",
            data.len()
        )));
    }
    if rows == 0 {
        return Ok(Matrix::zeros(0, cols));
    }
    if data[0].len() != cols {
        return Err(Error::Schema(format!(
            "{key}: expected {cols} columns, got {}",
            data[0].len()
        )));
    }
    Matrix::from_rows(data).map_err(|e| Error::Schema(format!("{key}: {e}")))
}

fn get_points(obj: &Map<String, Value>, path: &str) -> Result<Vec<Vec<Scalar>>> {
    let v = obj
        .get("points")
        .ok_or_else(|| Error::Schema(format!("missing field {path:?}")))?;
    rat_rows(v, path)
}

fn get_index_sets(obj: &Map<String, Value>, key: &str) -> Result<Vec<Vec<usize>>> {
    let arr = obj
        .get(key)
        .ok_or_else(|| Error::Schema(format!("missing field {key:?}")))?
        .as_array()
        .ok_or_else(|| Error::Schema(format!("{key}: expected an array")))?;
    arr.iter()
        .enumerate()
        .map(|(j, v)| {
            let rows = v
                .as_array()
                .ok_or_else(|| Error::Schema(format!("{key}[{j}]: expected an array")))?;
            rows.iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_u64().map(|u| u as usize).ok_or_else(|| {
                        Error::Schema(format!("{key}[{j}][{i}]: expected a row index"))
                    })
                })
                .collect()
        })
        .collect()
}

fn rat_to_value(s: &Scalar) -> Value {
    if s.is_integer() {
        if let Ok(i) = i64::try_from(s.numer().clone()) {
            return json!(i);
        }
    }
    Value::String(format_scalar(s))
}

fn vec_to_value(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(rat_to_value).collect())
}

fn mat_to_value(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vec_to_value(m.row(i))).collect())
}

fn xi_to_value(xi: &XiSet) -> Value {
    match xi.form() {
        XiForm::Budget(k) => json!({ "budget": k }),
        XiForm::Points => {
            let rows: Vec<Value> = xi
                .points()
                .iter()
                .map(|p| Value::Array(p.iter().map(|&b| json!(if b { 1 } else { 0 })).collect()))
                .collect();
            json!({ "points": rows })
        }
    }
}

fn common_fields(
    map: &mut Map<String, Value>,
    n1: usize,
    nc2: usize,
    nd2: usize,
    np: usize,
    m: usize,
    c0: &[Scalar],
    c_xi: &Matrix,
    d0: &[Scalar],
    dc_xi: &Matrix,
    dd_xi: &Matrix,
    t: &Matrix,
    wc: &Matrix,
    wd: &Matrix,
    h0: &[Scalar],
    x_set: &[Vec<Scalar>],
    xi_set: &XiSet,
    y: &YBounds,
    bounds: &Option<VarBounds>,
) {
    map.insert(
        "dims".into(),
        json!({ "n1": n1, "nc2": nc2, "nd2": nd2, "np": np, "m": m }),
    );
    map.insert("c0".into(), vec_to_value(c0));
    map.insert("C".into(), mat_to_value(c_xi));
    map.insert("d0".into(), vec_to_value(d0));
    map.insert("Dc".into(), mat_to_value(dc_xi));
    map.insert("Dd".into(), mat_to_value(dd_xi));
    map.insert("T".into(), mat_to_value(t));
    map.insert("Wc".into(), mat_to_value(wc));
    map.insert("Wd".into(), mat_to_value(wd));
    map.insert("h0".into(), vec_to_value(h0));
    map.insert(
        "X".into(),
        json!({ "points": x_set.iter().map(|x| vec_to_value(x)).collect::<Vec<_>>() }),
    );
    map.insert("Xi".into(), xi_to_value(xi_set));
    map.insert(
        "Y".into(),
        json!({
            "yc_upper": vec_to_value(&y.yc_upper),
            "yd_lower": vec_to_value(&y.yd_lower),
            "yd_upper": vec_to_value(&y.yd_upper),
        }),
    );
    if let Some(b) = bounds {
        map.insert(
            "bounds".into(),
            json!({
                "x_lower": vec_to_value(&b.x_lower),
                "x_upper": vec_to_value(&b.x_upper),
                "y_lower": vec_to_value(&b.y_lower),
                "y_upper": vec_to_value(&b.y_upper),
            }),
        );
    }
}

fn general_to_value(g: &GeneralInstance) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), json!("general"));
    common_fields(
        &mut map, g.n1, g.nc2, g.nd2, g.np, g.m, &g.c0, &g.c_xi, &g.d0, &g.dc_xi, &g.dd_xi, &g.t,
        &g.wc, &g.wd, &g.h0, &g.x_set, &g.xi_set, &g.y_bounds, &g.var_bounds,
    );
    map.insert("H".into(), mat_to_value(&g.h_xi));
    Value::Object(map)
}

fn indicator_to_value(i: &IndicatorInstance) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), json!("indicator"));
    common_fields(
        &mut map, i.n1, i.nc2, i.nd2, i.np, i.m, &i.c0, &i.c_xi, &i.d0, &i.dc_xi, &i.dd_xi, &i.t,
        &i.wc, &i.wd, &i.h0, &i.x_set, &i.xi_set, &i.y_bounds, &i.var_bounds,
    );
    map.insert(
        "I0".into(),
        Value::Array(
            i.i0.iter()
                .map(|s| Value::Array(s.iter().map(|&r| json!(r)).collect()))
                .collect(),
        ),
    );
    map.insert(
        "I1".into(),
        Value::Array(
            i.i1.iter()
                .map(|s| Value::Array(s.iter().map(|&r| json!(r)).collect()))
                .collect(),
        ),
    );
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, rat};

    #[test]
    fn counterexample_round_trip_and_fields() {
        let inst = Instance::General(gen_counterexample(rat(1)));
        let text = canonical_json(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(inst, back);
        assert_eq!(canonical_json(&back), text);
        match back {
            Instance::General(g) => {
                assert_eq!(g.n1, 1);
                assert_eq!(g.nd2, 1);
                assert_eq!(g.np, 1);
                assert_eq!(g.h0, vec![frac(-3, 2)]);
                assert_eq!(*g.h_xi.at(0, 0), rat(1));
                assert_eq!(*g.wd.at(0, 0), rat(-1));
                assert_eq!(g.d0, vec![rat(-1)]);
            }
            _ => panic!("expected a general instance"),
        }
    }

    #[test]
    fn budget_form_survives_round_trip() {
        let mut inst = gen_counterexample(rat(1));
        inst.xi_set = XiSet::budget(1, 1).unwrap();
        let wrapped = Instance::General(inst);
        let text = canonical_json(&wrapped);
        assert!(text.contains("\"budget\":1"));
        let back = parse_instance(&text).unwrap();
        assert_eq!(wrapped, back);
    }

    #[test]
    fn indicator_round_trip() {
        let inst = Instance::Indicator(gen_network_design_small(3, 1));
        let text = canonical_json(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn random_generators_round_trip_and_are_deterministic() {
        for seed in [1u64, 2, 3] {
            let a = gen_random_general(&RandomSpec::default(), seed).unwrap();
            let b = gen_random_general(&RandomSpec::default(), seed).unwrap();
            assert_eq!(
                canonical_json(&Instance::General(a.clone())),
                canonical_json(&Instance::General(b))
            );
            let back = parse_instance(&canonical_json(&Instance::General(a.clone()))).unwrap();
            assert_eq!(Instance::General(a), back);

            let ia = gen_random_indicator(&RandomSpec::default(), seed).unwrap();
            let ib = gen_random_indicator(&RandomSpec::default(), seed).unwrap();
            assert_eq!(
                canonical_json(&Instance::Indicator(ia.clone())),
                canonical_json(&Instance::Indicator(ib))
            );
            let back = parse_instance(&canonical_json(&Instance::Indicator(ia.clone()))).unwrap();
            assert_eq!(Instance::Indicator(ia), back);
        }
        let s1 = canonical_json(&Instance::General(
            gen_random_general(&RandomSpec::default(), 10).unwrap(),
        ));
        let s2 = canonical_json(&Instance::General(
            gen_random_general(&RandomSpec::default(), 11).unwrap(),
        ));
        assert_ne!(s1, s2);
    }

    #[test]
    fn truncated_file_is_a_schema_error() {
        let text = canonical_json(&Instance::General(gen_counterexample(rat(1))));
        let truncated = &text[..text.len() / 2];
        assert!(matches!(parse_instance(truncated), Err(Error::Schema(_))));
    }

    #[test]
    fn missing_field_is_located() {
        let mut v: Value =
            serde_json::from_str(&canonical_json(&Instance::General(gen_counterexample(rat(1)))))
                .unwrap();
        v.as_object_mut().unwrap().remove("h0");
        let err = parse_instance(&serde_json::to_string(&v).unwrap()).unwrap_err();
        assert!(err.to_string().contains("h0"), "{err}");
    }

    #[test]
    fn float_literal_rejected() {
        let text = canonical_json(&Instance::General(gen_counterexample(rat(1))));
        let patched = text.replace("\"-3/2\"", "-1.5");
        let err = parse_instance(&patched).unwrap_err();
        assert!(err.to_string().contains("p/q"), "{err}");
    }

    #[test]
    fn empty_x_rejected() {
        let mut v: Value =
            serde_json::from_str(&canonical_json(&Instance::General(gen_counterexample(rat(1)))))
                .unwrap();
        v["X"]["points"] = serde_json::json!([]);
        let err = parse_instance(&serde_json::to_string(&v).unwrap()).unwrap_err();
        assert!(err.to_string().contains("X is empty"), "{err}");
    }

    #[test]
    fn save_and_load_through_a_file() {
        let dir = std::env::temp_dir().join(format!("lagro-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ce.json");
        let inst = Instance::General(gen_counterexample(frac(10, 1)));
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(inst, back);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn generator_outputs_validate() {
        gen_counterexample(rat(7)).validate().unwrap();
        gen_interdiction(3, 5).validate().unwrap();
        gen_network_design_small(4, 2).validate().unwrap();
        gen_random_general(&RandomSpec::default(), 3)
            .unwrap()
            .validate()
            .unwrap();
        gen_random_indicator(&RandomSpec::default(), 3)
            .unwrap()
            .validate()
            .unwrap();
    }
}
