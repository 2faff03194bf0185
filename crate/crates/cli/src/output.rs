use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn render(doc: &Value, fmt: Format) -> String {
    match fmt {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(doc).expect("serializable")),
        Format::Csv => csv(doc),
        Format::Text => text(doc),
    }
}

/// Strings print bare; everything else as compact JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv(doc: &Value) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(reports) = doc["reports"].as_array() {
        w.write_record(["level", "check", "status", "normalization", "informational"]).unwrap();
        for r in reports {
            let info = (r["informational"] == true).to_string();
            w.write_record([cell(&r["level"]), cell(&r["check"]), cell(&r["status"]), cell(&r["normalization"]), info])
                .unwrap();
        }
    } else if doc.get("chain").is_some() {
        w.write_record(["section", "key", "coeff"]).unwrap();
        for (section, key) in [("chain", "g"), ("boundary", "cusp")] {
            for t in doc[section].as_array().into_iter().flatten() {
                w.write_record([section.to_string(), cell(&t[key]), cell(&t["coeff"])]).unwrap();
            }
        }
    } else if let Some(obj) = doc.as_object() {
        w.write_record(obj.keys()).unwrap();
        w.write_record(obj.values().map(cell)).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn exact(v: &Value) -> String {
    // {"order": K, "coeffs": [...]} -> "c0 + c1 z + ... (z = zeta_K)"
    let (Some(k), Some(cs)) = (v["order"].as_u64(), v["coeffs"].as_array()) else {
        return cell(v);
    };
    let terms: Vec<String> = cs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.as_str() != Some("0"))
        .map(|(i, c)| match i {
            0 => cell(c),
            1 => format!("({}) z", cell(c)),
            _ => format!("({}) z^{i}", cell(c)),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else if terms.len() == 1 && !terms[0].contains('z') {
        terms[0].clone()
    } else {
        format!("{} (z = zeta_{k})", terms.join(" + "))
    }
}

fn text(doc: &Value) -> String {
    let mut out = String::new();
    if let Some(reports) = doc["reports"].as_array() {
        for r in reports {
            let st = if r["status"] == "pass" { "PASS" } else { "FAIL" };
            out += &format!("{st}  {}", cell(&r["check"]));
            if let Some(c) = r["normalization"].as_str() {
                out += &format!("  normalization {c}");
            }
            if r["informational"] == true {
                out += "  (alternative reading, not counted)";
            }
            out.push('\n');
        }
        out += &format!("level {}: {}", doc["level"], cell(&doc["status"]));
        if let Some(c) = doc["normalization"].as_str() {
            out += &format!(", normalization {c}");
        }
        out += &format!(" ({} ms)\n", doc["timing_ms"]["total"]);
    } else if doc.get("chain").is_some() {
        out += &format!("E_{} at level {}\n", cell(&doc["point"]), doc["level"]);
        for t in doc["chain"].as_array().into_iter().flatten() {
            out += &format!("  {}  {}\n", cell(&t["g"]), exact(&t["coeff"]));
        }
        out += "boundary\n";
        for t in doc["boundary"].as_array().into_iter().flatten() {
            out += &format!("  {}  {}\n", cell(&t["cusp"]), exact(&t["coeff"]));
        }
    } else if let Some(obj) = doc.as_object() {
        for (k, v) in obj {
            out += &format!("{k}: {}\n", cell(v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exact_rendering() {
        assert_eq!(exact(&json!({"order": 6, "coeffs": ["9/2", "0"]})), "9/2");
        assert_eq!(exact(&json!({"order": 6, "coeffs": ["0", "0"]})), "0");
        assert_eq!(exact(&json!({"order": 6, "coeffs": ["1", "-1/2"]})), "1 + (-1/2) z (z = zeta_6)");
    }

    #[test]
    fn csv_quotes_matrix_keys() {
        let doc =
            json!({"chain": [{"g": [[0, 1], [2, 0]], "coeff": {"order": 6, "coeffs": ["1", "0"]}}], "boundary": []});
        let s = csv(&doc);
        assert!(s.starts_with("section,key,coeff\n"));
        assert!(s.contains("chain,\"[[0,1],[2,0]]\""));
    }
}
