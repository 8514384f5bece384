use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

/// One cross-check, with the value computed on each side.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub left: Value,
    pub right: Value,
}

impl Check {
    pub fn compare<T: Serialize + PartialEq>(name: impl Into<String>, left: &T, right: &T) -> Self {
        Check::new(name, left == right, left, right)
    }

    pub fn new<A: Serialize, B: Serialize>(
        name: impl Into<String>,
        ok: bool,
        left: &A,
        right: &B,
    ) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            left: serde_json::to_value(left).expect("serializable"),
            right: serde_json::to_value(right).expect("serializable"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value) -> Self {
        RunReport {
            command: command.to_string(),
            inputs,
            outputs: Value::Object(Default::default()),
            checks: Vec::new(),
            csv: None,
        }
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(map) = &mut self.outputs {
            map.insert(
                key.to_string(),
                serde_json::to_value(value).expect("serializable"),
            );
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn render(&self, csv: bool) -> String {
        match (&self.csv, csv) {
            (Some(table), true) => table.clone(),
            _ => serde_json::to_string_pretty(self).expect("serializable") + "\n",
        }
    }
}
