use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::ops::{execute, Env, OpOptions, Outcome};
use super::{parse_scenario, Object, Operator, Scenario, Step};
use crate::{Error, Result};

/// Largest integer every JSON reader represents exactly.
const MAX_SAFE: u64 = (1 << 53) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Run,
    Homology,
    Minimize,
    Localize,
    Resolve,
    Invariants,
    CheckDeduce,
    CheckBound,
    Patch,
    PatchPair,
    Numerology,
    Selfcheck,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::Run,
        Command::Homology,
        Command::Minimize,
        Command::Localize,
        Command::Resolve,
        Command::Invariants,
        Command::CheckDeduce,
        Command::CheckBound,
        Command::Patch,
        Command::PatchPair,
        Command::Numerology,
        Command::Selfcheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Homology => "homology",
            Command::Minimize => "minimize",
            Command::Localize => "localize",
            Command::Resolve => "resolve",
            Command::Invariants => "invariants",
            Command::CheckDeduce => "check-deduce",
            Command::CheckBound => "check-bound",
            Command::Patch => "patch",
            Command::PatchPair => "patch-pair",
            Command::Numerology => "numerology",
            Command::Selfcheck => "selfcheck",
        }
    }

    pub fn parse(s: &str) -> Result<Command> {
        Command::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| Error::UnknownName(format!("command {s:?}")))
    }

    /// Pipeline operations the command selects.
    pub fn ops(self) -> &'static [&'static str] {
        match self {
            Command::Run | Command::Selfcheck => super::ops::OPS,
            Command::Homology => &["homology"],
            Command::Minimize => &["minimize"],
            Command::Localize => &["localize", "ordinary", "fitting"],
            Command::Resolve => &["resolve", "hilbert"],
            Command::Invariants => &["invariants", "snf"],
            Command::CheckDeduce => &["check-deduce"],
            Command::CheckBound => &["check-bound", "nearly-faithful"],
            Command::Patch => &["patch"],
            Command::PatchPair => &["patch-pair"],
            Command::Numerology => &["numerology"],
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Overrides every tower's `levels`.
    pub levels: Option<u32>,
    pub parallel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo { code: e.code().to_string(), message: e.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub op: String,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub steps: usize,
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
    pub all_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub command: String,
    pub scenario_hash: String,
    pub steps: Vec<StepReport>,
    pub summary: Summary,
}

impl Report {
    /// 0 when everything passes, 2 on verdict failures, 1 on errors.
    pub fn exit_code(&self) -> i32 {
        if self.summary.error > 0 {
            1
        } else if self.summary.fail > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_value(&self) -> Value {
        stringify_big(serde_json::to_value(self).expect("reports serialize"))
    }

    /// Canonical text: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("reports serialize");
        s.push('\n');
        s
    }

    /// One line per step.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let status = match s.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let tail = s.error.as_ref().map(|e| format!("  {} {}", e.code, e.message)).unwrap_or_default();
            out.push_str(&format!("{:>3}  {:<16} {:<5} {}{tail}\n", s.index, s.op, status, s.args.join(" ")));
            if let (Some(Value::Object(r)), "numerology") = (&s.result, s.op.as_str()) {
                for (k, v) in r.iter().filter(|(_, v)| v.is_number() || v.is_boolean()) {
                    out.push_str(&format!("       {k:<20} {v}\n"));
                }
            }
        }
        let m = &self.summary;
        out.push_str(&format!("{} steps: {} pass, {} fail, {} error\n", m.steps, m.pass, m.fail, m.error));
        out
    }
}

/// Integers outside the exactly representable range become decimal strings.
fn stringify_big(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let big = n.as_u64().map(|u| u > MAX_SAFE).or_else(|| n.as_i64().map(|i| i.unsigned_abs() > MAX_SAFE));
            if big == Some(true) {
                Value::String(n.to_string())
            } else {
                Value::Number(n)
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_big).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_big(v))).collect()),
        other => other,
    }
}

fn step(op: &str, args: &[&str]) -> Step {
    Step { op: op.into(), args: args.iter().map(|s| s.to_string()).collect(), out: None, params: Value::Null }
}

/// Default steps for a command whose operations the pipeline never names.
fn synthesize(s: &Scenario, cmd: Command) -> Vec<Step> {
    let mut out = Vec::new();
    for name in &s.order {
        let obj = &s.objects[name];
        let n = name.as_str();
        match (cmd, obj) {
            (Command::Homology, Object::Complex(_)) => out.push(step("homology", &[n])),
            (Command::Minimize, Object::Complex(_)) => out.push(step("minimize", &[n])),
            (Command::Localize, Object::Operator(Operator::Chain { .. })) => out.push(step("ordinary", &[n])),
            (Command::Localize, Object::Operator(Operator::Module { .. })) => out.push(step("fitting", &[n])),
            (Command::Resolve, Object::GradedModule(_)) => out.push(step("resolve", &[n])),
            (Command::Invariants, Object::Matrix(_)) => {
                out.push(step("snf", &[n]));
                out.push(step("invariants", &[n]));
            }
            (Command::CheckDeduce, Object::GradedComplex(_)) => out.push(step("check-deduce", &[n])),
            (Command::CheckBound, Object::GradedModule(m)) => {
                if m.submodule.is_some() {
                    out.push(step("check-bound", &[n]));
                }
                if m.primes.is_some() {
                    out.push(step("nearly-faithful", &[n]));
                }
            }
            (Command::Patch, Object::Tower(_)) => out.push(step("patch", &[n])),
            (Command::PatchPair, Object::Link(_)) => out.push(step("patch-pair", &[n])),
            (Command::Numerology, Object::Numerology(_)) => out.push(step("numerology", &[n])),
            _ => {}
        }
    }
    out
}

/// Pipeline steps for `cmd`, plus the earlier steps producing their inputs.
fn select(s: &Scenario, cmd: Command) -> Vec<Step> {
    if matches!(cmd, Command::Run | Command::Selfcheck) {
        if s.pipeline.is_empty() {
            return Command::ALL.into_iter().flat_map(|c| synthesize(s, c)).collect();
        }
        return s.pipeline.clone();
    }
    let wanted = cmd.ops();
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    let producer: BTreeMap<&str, usize> =
        s.pipeline.iter().enumerate().filter_map(|(i, st)| st.out.as_deref().map(|o| (o, i))).collect();
    let mut stack: Vec<usize> = (0..s.pipeline.len()).filter(|&i| wanted.contains(&s.pipeline[i].op.as_str())).collect();
    if stack.is_empty() {
        return synthesize(s, cmd);
    }
    while let Some(i) = stack.pop() {
        if keep.insert(i) {
            for a in &s.pipeline[i].args {
                if let Some(&j) = producer.get(a.as_str()) {
                    stack.push(j);
                }
            }
        }
    }
    keep.into_iter().map(|i| s.pipeline[i].clone()).collect()
}

fn report_step(index: usize, st: &Step, r: &Result<Outcome>) -> StepReport {
    let (status, result, error) = match r {
        Ok(o) => (if o.pass { Status::Pass } else { Status::Fail }, Some(o.result.clone()), None),
        Err(e) => (Status::Error, None, Some(ErrorInfo::from(e))),
    };
    StepReport { index, op: st.op.clone(), args: st.args.clone(), out: st.out.clone(), status, result, error }
}

/// Dependency depth of each step: independent steps share a wave.
fn waves(steps: &[Step]) -> Vec<usize> {
    let mut level_of: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(steps.len());
    for st in steps {
        let lvl = st.args.iter().filter_map(|a| level_of.get(a.as_str())).map(|l| l + 1).max().unwrap_or(0);
        if let Some(o) = &st.out {
            level_of.insert(o, lvl);
        }
        out.push(lvl);
    }
    out
}

pub fn run(s: &Scenario, cmd: Command, opts: RunOptions) -> Report {
    let steps = select(s, cmd);
    let op_opts = OpOptions { levels: opts.levels, parallel: opts.parallel };
    let mut env: Env = s.objects.clone();
    let mut results: Vec<Option<StepReport>> = vec![None; steps.len()];
    let mut absorb = |env: &mut Env, i: usize, r: Result<Outcome>| {
        results[i] = Some(report_step(i, &steps[i], &r));
        if let (Ok(o), Some(name)) = (r, &steps[i].out) {
            if let Some(obj) = o.object {
                env.insert(name.clone(), obj);
            }
        }
    };
    if opts.parallel {
        let lv = waves(&steps);
        let top = lv.iter().copied().max().unwrap_or(0);
        for w in 0..=top {
            let idx: Vec<usize> = (0..steps.len()).filter(|&i| lv[i] == w).collect();
            let done: Vec<(usize, Result<Outcome>)> =
                idx.par_iter().map(|&i| (i, execute(&env, &steps[i], op_opts))).collect();
            for (i, r) in done {
                absorb(&mut env, i, r);
            }
        }
    } else {
        for i in 0..steps.len() {
            let r = execute(&env, &steps[i], op_opts);
            absorb(&mut env, i, r);
        }
    }
    let steps: Vec<StepReport> = results.into_iter().map(|r| r.expect("every step ran")).collect();
    let count = |st: Status| steps.iter().filter(|r| r.status == st).count();
    let summary = Summary {
        steps: steps.len(),
        pass: count(Status::Pass),
        fail: count(Status::Fail),
        error: count(Status::Error),
        all_pass: steps.iter().all(|r| r.status == Status::Pass),
    };
    Report { version: s.version, command: cmd.as_str().into(), scenario_hash: s.hash.clone(), steps, summary }
}

/// Built-in suite: one small instance of every operation.
pub fn selfcheck(opts: RunOptions) -> Result<Report> {
    let text = selfcheck_scenario().to_string();
    let s = parse_scenario(&text)?;
    Ok(run(&s, Command::Selfcheck, opts))
}

fn selfcheck_scenario() -> Value {
    let f3z3 = json!({"kind": "group-algebra", "p": 3, "m": 1, "q": 1, "N": 1});
    let gm1 = json!({"terms": [[1, [1], []], [-1, [0], []]]});
    json!({
        "version": 1,
        "rings": {
            "Z4": {"kind": "chain", "p": 2, "m": 2},
            "A": f3z3,
            "F3": {"kind": "prime-field", "p": 3},
            "S3": {"kind": "graded-poly-quotient", "p": 3, "q": 3},
            "R3": {"kind": "graded-poly-quotient", "p": 3, "q": 3, "relations": [[[1, [2, 0, 0]]]]},
        },
        "matrices": {
            "twos": {"ring": "Z4", "rows": 2, "cols": 2, "entries": [[2, 2], [2, 2]]},
            "gamma": {"ring": "A", "rows": 1, "cols": 1, "entries": [[{"terms": [[1, [1], []]]}]]},
        },
        "complexes": {
            "aug": {"ring": "A", "ranks": [1, 1], "diffs": [[[gm1]]]},
            "cone": {"ring": "Z4", "ranks": [1, 1], "diffs": [[[1]]]},
        },
        "modules": {"M": {"ring": "Z4", "exps": [2, 1]}},
        "operators": {
            "T": {"module": "M", "matrix": [[1, 0], [0, 0]]},
            "U": {"complex": "aug", "maps": [[[2]], [[2]]]},
        },
        "graded_modules": {
            "N": {
                "ring": "S3",
                "relations": [[[[1, [1, 1, 0]]]]],
                "submodule": [[[[1, [1, 0, 0]]]]],
            },
            "P": {"ring": "R3", "primes": [[[[1, [1, 0, 0]]]]]},
        },
        "graded_complexes": {"K": {"ring": "S3", "koszul": [0, 2]}},
        "towers": {
            "free": {"kind": "free", "p": 3, "m": 1, "q": 1, "j": 0, "l0": 0, "levels": 2},
            "free2": {"kind": "free", "p": 3, "m": 1, "q": 1, "j": 0, "l0": 0, "levels": 2},
            "augt": {"kind": "augmentation", "p": 3, "m": 1, "q": 1, "j": 0, "l0": 1, "levels": 2},
        },
        "links": {"id": {"first": "free", "second": "free2", "eta": [[1]]}},
        "numerology": {"imag_quad": {"n": 2, "r1": 0, "r2": 1}},
        "pipeline": [
            {"op": "snf", "args": ["twos"]},
            {"op": "invariants", "args": ["gamma"]},
            {"op": "minimize", "args": ["cone"], "out": "cone_min"},
            {"op": "homology", "args": ["cone", "cone_min"]},
            {"op": "homology", "args": ["aug"]},
            {"op": "base-change", "args": ["aug", "F3"]},
            {"op": "fitting", "args": ["T"]},
            {"op": "ordinary", "args": ["U"]},
            {"op": "localize", "args": ["M", "T"], "params": {"eta": [1]}},
            {"op": "resolve", "args": ["N"]},
            {"op": "hilbert", "args": ["N"]},
            {"op": "check-deduce", "args": ["K"]},
            {"op": "check-bound", "args": ["N"]},
            {"op": "nearly-faithful", "args": ["P"]},
            {"op": "patch", "args": ["free"]},
            {"op": "patch", "args": ["augt"]},
            {"op": "patch-pair", "args": ["id"]},
            {"op": "numerology", "args": ["imag_quad"]},
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selfcheck_passes() {
        let r = selfcheck(RunOptions::default()).unwrap();
        let bad: Vec<_> = r.steps.iter().filter(|s| s.status != Status::Pass).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn parallel_report_is_identical() {
        let a = selfcheck(RunOptions::default()).unwrap().to_json();
        let b = selfcheck(RunOptions { parallel: true, ..Default::default() }).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn big_integers_become_strings() {
        let v = stringify_big(json!({"a": [9007199254740992u64, 5, -9007199254740993i64]}));
        assert_eq!(v, json!({"a": ["9007199254740992", 5, "-9007199254740993"]}));
    }

    #[test]
    fn commands_synthesize_steps() {
        let text = selfcheck_scenario().to_string();
        let s = parse_scenario(&text).unwrap();
        let r = run(&s, Command::Numerology, RunOptions::default());
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].result.as_ref().unwrap()["l0"], json!(1));
        let mut bare = s.clone();
        bare.pipeline.clear();
        let r = run(&bare, Command::Invariants, RunOptions::default());
        assert_eq!(r.steps.iter().map(|s| s.op.as_str()).collect::<Vec<_>>(), ["snf", "invariants", "snf", "invariants"]);
    }
}
