//! Machine-readable result records: single-line JSON on stdout and the
//! benchmark CSV row format.

/// One algorithm run against one scenario.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub scenario: String,
    pub algorithm: &'static str,
    pub depth: usize,
    pub anchors: usize,
    pub epsilon: Option<f64>,
    pub n0: Option<u64>,
    pub seed: u64,
    pub achieved: f64,
    pub oracle: Option<f64>,
    pub ratio: Option<f64>,
    pub wall_ms: u128,
    pub evals: u64,
}

impl RunResult {
    pub fn set_oracle(&mut self, value: f64) {
        self.oracle = Some(value);
        if value > 0.0 {
            let ratio = self.achieved / value;
            debug_assert!((-1e-9..=1.0 + 1e-9).contains(&ratio), "ratio {ratio}");
            self.ratio = Some(ratio);
        }
    }

    pub fn to_json(&self) -> String {
        let opt_num = |v: Option<f64>| match v {
            Some(x) => format!("{x}"),
            None => "null".to_string(),
        };
        let opt_int = |v: Option<u64>| match v {
            Some(x) => x.to_string(),
            None => "null".to_string(),
        };
        format!(
            "{{\"scenario\":{},\"algorithm\":\"{}\",\"depth\":{},\"anchors\":{},\"epsilon\":{},\"n0\":{},\"seed\":{},\"achieved\":{},\"oracle\":{},\"ratio\":{},\"wall_ms\":{},\"evals\":{}}}",
            json_string(&self.scenario),
            self.algorithm,
            self.depth,
            self.anchors,
            opt_num(self.epsilon),
            opt_int(self.n0),
            self.seed,
            self.achieved,
            opt_num(self.oracle),
            opt_num(self.ratio),
            self.wall_ms,
            self.evals,
        )
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub const CSV_HEADER: &str =
    "scenario,algorithm,depth,anchors,epsilon,n0,k,xi,achieved,oracle,ratio,wall_ms,evals";

/// CSV field with minimal quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(result: &RunResult, k: usize, xi: usize) -> String {
    let opt_num = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    let opt_int = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        csv_field(&result.scenario),
        result.algorithm,
        result.depth,
        result.anchors,
        opt_num(result.epsilon),
        opt_int(result.n0),
        k,
        xi,
        result.achieved,
        opt_num(result.oracle),
        opt_num(result.ratio),
        result.wall_ms,
        result.evals,
    )
}
