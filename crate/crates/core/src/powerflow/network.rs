//! Bus and branch data with per-unit, consumption-negative injections.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BusType {
    /// Angle reference; joins the slack group when it has a participation weight.
    Reference,
    /// Fixed V and P.
    VoltageControlled,
    /// Fixed P and Q.
    Pq,
    /// Fixed V, active power equal to its share of the slack group.
    DistributedSlackMember,
}

impl fmt::Display for BusType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BusType::Reference => "reference",
            BusType::VoltageControlled => "voltage-controlled",
            BusType::Pq => "pq",
            BusType::DistributedSlackMember => "distributed-slack-member",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: BusType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_set: Option<f64>,
    /// Active injection; loads are negative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_inj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_inj: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participation: Option<f64>,
}

impl Bus {
    pub fn voltage_is_fixed(&self) -> bool {
        self.kind != BusType::Pq
    }

    pub fn active_is_specified(&self) -> bool {
        matches!(self.kind, BusType::Pq | BusType::VoltageControlled)
    }

    pub fn reactive_is_specified(&self) -> bool {
        self.kind == BusType::Pq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub r: f64,
    pub x: f64,
}

impl Branch {
    pub fn connects(&self, a: usize, b: usize) -> bool {
        (self.from == a && self.to == b) || (self.from == b && self.to == a)
    }

    pub fn touches(&self, bus: usize) -> bool {
        self.from == bus || self.to == bus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    NoReference,
    MultipleReference,
    MissingVset,
    MissingInjection,
    MissingParticipation,
    BadParticipation,
    BadBranch,
    BusIdRange,
    DuplicateBus,
    NonFinite,
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkIssue {
    pub code: IssueCode,
    pub message: String,
}

impl fmt::Display for NetworkIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
}

impl Network {
    pub fn n(&self) -> usize {
        self.buses.len()
    }

    /// Bus with identifier `id` (1-based).
    pub fn bus(&self, id: usize) -> Option<&Bus> {
        self.buses.iter().find(|b| b.id == id)
    }

    pub fn reference(&self) -> Option<&Bus> {
        self.buses.iter().find(|b| b.kind == BusType::Reference)
    }

    /// Buses sharing the slack: the members plus a weighted reference bus.
    pub fn slack_group(&self) -> Vec<&Bus> {
        self.buses
            .iter()
            .filter(|b| {
                b.kind == BusType::DistributedSlackMember
                    || (b.kind == BusType::Reference && b.participation.is_some())
            })
            .collect()
    }

    /// Every structural problem, in bus then branch order. Empty when valid.
    pub fn issues(&self) -> Vec<NetworkIssue> {
        let mut issues = Vec::new();
        let mut push = |code, message: String| issues.push(NetworkIssue { code, message });
        let n = self.n();

        let mut seen = vec![false; n];
        for bus in &self.buses {
            if bus.id == 0 || bus.id > n {
                push(IssueCode::BusIdRange, format!("bus id {} outside 1..={n}", bus.id));
            } else if std::mem::replace(&mut seen[bus.id - 1], true) {
                push(IssueCode::DuplicateBus, format!("bus id {} listed twice", bus.id));
            }
        }

        let references = self.buses.iter().filter(|b| b.kind == BusType::Reference).count();
        if references == 0 {
            push(IssueCode::NoReference, "network has no reference bus".into());
        } else if references > 1 {
            push(IssueCode::MultipleReference, format!("network has {references} reference buses"));
        }

        let has_members = self.buses.iter().any(|b| b.kind == BusType::DistributedSlackMember);
        for bus in &self.buses {
            let id = bus.id;
            for (name, value) in [("v_set", bus.v_set), ("p_inj", bus.p_inj), ("q_inj", bus.q_inj), ("participation", bus.participation)] {
                if value.is_some_and(|v| !v.is_finite()) {
                    push(IssueCode::NonFinite, format!("bus {id} {name} is not finite"));
                }
            }
            if bus.voltage_is_fixed() && bus.v_set.is_none_or(|v| v <= 0.0) {
                push(IssueCode::MissingVset, format!("{} bus {id} needs a positive v_set", bus.kind));
            }
            if bus.active_is_specified() && bus.p_inj.is_none() {
                push(IssueCode::MissingInjection, format!("{} bus {id} needs p_inj", bus.kind));
            }
            if bus.reactive_is_specified() && bus.q_inj.is_none() {
                push(IssueCode::MissingInjection, format!("pq bus {id} needs q_inj"));
            }
            let in_group = bus.kind == BusType::DistributedSlackMember
                || (bus.kind == BusType::Reference && (has_members || bus.participation.is_some()));
            match (in_group, bus.participation) {
                (true, None) => push(IssueCode::MissingParticipation, format!("slack group bus {id} needs a participation weight")),
                (true, Some(w)) if w <= 0.0 => push(IssueCode::BadParticipation, format!("bus {id} participation must be positive")),
                (false, Some(_)) => push(IssueCode::BadParticipation, format!("{} bus {id} cannot carry a participation weight", bus.kind)),
                _ => {}
            }
        }

        for (i, br) in self.branches.iter().enumerate() {
            if br.from == 0 || br.from > n || br.to == 0 || br.to > n {
                push(IssueCode::BusIdRange, format!("branch {i} ({}-{}) references a bus outside 1..={n}", br.from, br.to));
            }
            if br.from == br.to {
                push(IssueCode::BadBranch, format!("branch {i} connects bus {} to itself", br.from));
            }
            if !(br.r.is_finite() && br.x.is_finite()) || (br.r == 0.0 && br.x == 0.0) {
                push(IssueCode::BadBranch, format!("branch {i} needs finite, non-zero impedance"));
            }
        }
        issues
    }
}


#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    fn codes(n: &Network) -> Vec<IssueCode> {
        n.issues().into_iter().map(|i| i.code).collect()
    }

    #[test]
    fn examples_are_valid() {
        assert!(three_bus().issues().is_empty());
        assert!(two_bus().issues().is_empty());
        assert_eq!(three_bus().slack_group().len(), 2);
        assert!(two_bus().slack_group().is_empty());
    }

    #[test]
    fn structural_issues() {
        let mut n = three_bus();
        n.buses[0].kind = BusType::Pq;
        n.buses[0].p_inj = Some(0.0);
        n.buses[0].q_inj = Some(0.0);
        n.buses[0].participation = None;
        assert_eq!(codes(&n), vec![IssueCode::NoReference]);

        let mut n = three_bus();
        n.buses[2].p_inj = None;
        assert_eq!(codes(&n), vec![IssueCode::MissingInjection]);

        let mut n = three_bus();
        n.buses[1].v_set = None;
        assert_eq!(codes(&n), vec![IssueCode::MissingVset]);

        let mut n = three_bus();
        n.buses[0].participation = None;
        assert_eq!(codes(&n), vec![IssueCode::MissingParticipation]);

        let mut n = three_bus();
        n.branches.push(Branch { from: 3, to: 3, r: 0.0, x: 0.0 });
        n.branches.push(Branch { from: 1, to: 4, r: 0.0, x: 1.0 });
        assert_eq!(codes(&n), vec![IssueCode::BadBranch, IssueCode::BadBranch, IssueCode::BusIdRange]);

        let mut n = three_bus();
        n.buses[2].id = 1;
        assert_eq!(codes(&n), vec![IssueCode::DuplicateBus]);
    }

    #[test]
    fn json_shape() {
        let text = r#"{"buses":[{"id":1,"type":"reference","v_set":1.0},
            {"id":2,"type":"pq","p_inj":-0.3,"q_inj":-0.1}],
            "branches":[{"from":1,"to":2,"r":0.0,"x":1.0}]}"#;
        let n: Network = serde_json::from_str(text).unwrap();
        assert_eq!(n, two_bus());
        assert_eq!(IssueCode::NoReference.to_string(), "NO_REFERENCE");
    }
}
