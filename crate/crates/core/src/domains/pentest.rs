//! Deterministic network penetration model.
//!
//! A host can be exploited through one of its services when it is reachable:
//! its subnet faces the internet, or its subnet (or an adjacent one) already
//! holds a compromised host. Compromise is permanent.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Deserializer, Serialize};

use super::DomainError;
use crate::model::{Action, ActionId, Predicate, SimulatorProblem, State, Symbols};

/// Accepts either a JSON string or a JSON integer as an identifier.
fn id<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Number(u64),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::Text(s) => s,
        Raw::Number(n) => n.to_string(),
    })
}

fn ids<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    struct Wrapped(#[serde(deserialize_with = "id")] String);
    Ok(Vec::<Wrapped>::deserialize(d)?.into_iter().map(|w| w.0).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subnet {
    #[serde(deserialize_with = "id")]
    pub id: String,
    #[serde(default)]
    pub internet: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Host {
    #[serde(deserialize_with = "id")]
    pub id: String,
    #[serde(deserialize_with = "id")]
    pub subnet: String,
    pub services: Vec<String>,
    #[serde(default)]
    pub sensitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exploit {
    pub service: String,
    pub cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PentestScenario {
    pub subnets: Vec<Subnet>,
    #[serde(default, deserialize_with = "links")]
    pub topology: Vec<(String, String)>,
    pub hosts: Vec<Host>,
    pub exploits: Vec<Exploit>,
}

fn links<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(String, String)>, D::Error> {
    #[derive(Deserialize)]
    struct Pair(#[serde(deserialize_with = "ids")] Vec<String>);
    Vec::<Pair>::deserialize(d)?
        .into_iter()
        .map(|Pair(p)| match <[String; 2]>::try_from(p) {
            Ok([a, b]) => Ok((a, b)),
            Err(_) => Err(serde::de::Error::custom("topology entries are subnet pairs")),
        })
        .collect()
}

impl PentestScenario {
    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let scenario: PentestScenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |m: String| Err(DomainError::ScenarioInvalid(m));
        let subnets: BTreeSet<&str> = self.subnets.iter().map(|s| s.id.as_str()).collect();
        if subnets.len() != self.subnets.len() {
            return bad("duplicate subnet id".into());
        }
        if !self.subnets.iter().any(|s| s.internet) {
            return bad("no internet-facing subnet".into());
        }
        for (a, b) in &self.topology {
            if !subnets.contains(a.as_str()) || !subnets.contains(b.as_str()) {
                return bad(format!("link {a}-{b} names an unknown subnet"));
            }
        }
        let mut hosts = BTreeSet::new();
        for h in &self.hosts {
            if !hosts.insert(h.id.as_str()) {
                return bad(format!("duplicate host {}", h.id));
            }
            if !subnets.contains(h.subnet.as_str()) {
                return bad(format!("host {} sits in unknown subnet {}", h.id, h.subnet));
            }
        }
        if !self.hosts.iter().any(|h| h.sensitive) {
            return bad("no sensitive host".into());
        }
        let mut services = BTreeSet::new();
        for e in &self.exploits {
            if e.cost == 0 {
                return bad(format!("exploit for {} has zero cost", e.service));
            }
            if !services.insert(e.service.as_str()) {
                return bad(format!("two exploits for service {}", e.service));
            }
        }
        let connected = self.connected_subnets();
        for h in self.hosts.iter().filter(|h| h.sensitive) {
            if !connected.contains(h.subnet.as_str()) {
                return bad(format!("sensitive host {} is unreachable from the internet", h.id));
            }
        }
        Ok(())
    }

    fn adjacency(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.subnets.iter().map(|s| (s.id.as_str(), BTreeSet::new())).collect();
        for (a, b) in &self.topology {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }

    /// Subnets connected to an internet-facing subnet.
    fn connected_subnets(&self) -> BTreeSet<&str> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&str> = self
            .subnets
            .iter()
            .filter(|s| s.internet)
            .map(|s| s.id.as_str())
            .collect();
        let mut queue: VecDeque<&str> = seen.iter().copied().collect();
        while let Some(s) = queue.pop_front() {
            for &n in &adj[s] {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }
}

/// Set of compromised hosts, indexed like [`PentestScenario::hosts`].
pub type Compromised = Vec<bool>;

/// [`PentestScenario`] as a [`SimulatorProblem`]. One action per
/// (host, service with a known exploit).
#[derive(Debug, Clone)]
pub struct PentestProblem {
    scenario: PentestScenario,
    symbols: Symbols,
    actions: Vec<Action>,
    action_host: Vec<usize>,
    host_subnet: Vec<usize>,
    internet: Vec<bool>,
    /// Subnet index to the subnets whose compromised hosts make it reachable.
    neighbours: Vec<Vec<usize>>,
    compromised: Vec<Predicate>,
    reachable: Vec<Predicate>,
    goals: Vec<Predicate>,
}

impl PentestProblem {
    pub fn new(scenario: PentestScenario) -> Result<Self, DomainError> {
        scenario.validate()?;
        let subnet_index: BTreeMap<&str, usize> = scenario
            .subnets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect();
        let adj = scenario.adjacency();
        let neighbours = scenario
            .subnets
            .iter()
            .map(|s| {
                std::iter::once(subnet_index[s.id.as_str()])
                    .chain(adj[s.id.as_str()].iter().map(|n| subnet_index[n]))
                    .collect()
            })
            .collect();
        let costs: BTreeMap<&str, u64> = scenario
            .exploits
            .iter()
            .map(|e| (e.service.as_str(), e.cost))
            .collect();

        let mut symbols = Symbols::new();
        let compromised: Vec<Predicate> = scenario
            .hosts
            .iter()
            .map(|h| symbols.intern(format!("compromised-{}", h.id)))
            .collect();
        let reachable = scenario
            .hosts
            .iter()
            .map(|h| symbols.intern(format!("reachable-{}", h.id)))
            .collect();
        let goals = scenario
            .hosts
            .iter()
            .zip(&compromised)
            .filter(|(h, _)| h.sensitive)
            .map(|(_, &p)| p)
            .collect();

        let mut actions = Vec::new();
        let mut action_host = Vec::new();
        for (i, h) in scenario.hosts.iter().enumerate() {
            let services: BTreeSet<&str> = h.services.iter().map(String::as_str).collect();
            for s in services {
                if let Some(&cost) = costs.get(s) {
                    let a = Action::new(format!("exploit-{}-{s}", h.id), cost)
                        .map_err(|e| DomainError::ScenarioInvalid(e.to_string()))?;
                    actions.push(a);
                    action_host.push(i);
                }
            }
        }
        Ok(PentestProblem {
            host_subnet: scenario
                .hosts
                .iter()
                .map(|h| subnet_index[h.subnet.as_str()])
                .collect(),
            internet: scenario.subnets.iter().map(|s| s.internet).collect(),
            scenario,
            symbols,
            actions,
            action_host,
            neighbours,
            compromised,
            reachable,
            goals,
        })
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        Self::new(PentestScenario::parse(text)?)
    }

    pub fn scenario(&self) -> &PentestScenario {
        &self.scenario
    }

    pub fn is_reachable(&self, state: &Compromised, host: usize) -> bool {
        let subnet = self.host_subnet[host];
        self.internet[subnet]
            || self.neighbours[subnet].iter().any(|&n| {
                state
                    .iter()
                    .zip(&self.host_subnet)
                    .any(|(&c, &s)| c && s == n)
            })
    }

    fn exploitable(&self, state: &Compromised, a: ActionId) -> bool {
        let host = self.action_host[a.index()];
        !state[host] && self.is_reachable(state, host)
    }

    /// Applies one exploit, reporting why it is not possible.
    pub fn step(&self, state: &Compromised, action: &str) -> Result<Compromised, DomainError> {
        let a = self
            .action_id(action)
            .ok_or_else(|| DomainError::InapplicableAction(action.to_string()))?;
        self.simulate(state, a)
            .ok_or_else(|| DomainError::InapplicableAction(action.to_string()))
    }
}

impl SimulatorProblem for PentestProblem {
    type World = Compromised;

    fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    fn actions(&self) -> &[Action] {
        &self.actions
    }

    fn initial(&self) -> Compromised {
        vec![false; self.scenario.hosts.len()]
    }

    fn observe(&self, state: &Compromised) -> State {
        let mut out = State::new();
        for (i, &c) in state.iter().enumerate() {
            if c {
                out.insert(self.compromised[i]);
            }
            if self.is_reachable(state, i) {
                out.insert(self.reachable[i]);
            }
        }
        out
    }

    fn applicable(&self, state: &Compromised) -> Vec<ActionId> {
        (0..self.actions.len() as u32)
            .map(ActionId)
            .filter(|&a| self.exploitable(state, a))
            .collect()
    }

    fn simulate(&self, state: &Compromised, a: ActionId) -> Option<Compromised> {
        if a.index() >= self.actions.len() || !self.exploitable(state, a) {
            return None;
        }
        let mut next = state.clone();
        next[self.action_host[a.index()]] = true;
        Some(next)
    }

    fn is_goal(&self, state: &Compromised) -> bool {
        self.scenario
            .hosts
            .iter()
            .zip(state)
            .all(|(h, &c)| !h.sensitive || c)
    }

    fn goal_predicates(&self) -> &[Predicate] {
        &self.goals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{
        "subnets": [{"id": 1, "internet": true}, {"id": 2}, {"id": 3}],
        "topology": [[1, 2], [2, 3]],
        "hosts": [
            {"id": "web", "subnet": 1, "services": ["http"]},
            {"id": "app", "subnet": 2, "services": ["ssh"], "sensitive": true},
            {"id": "db", "subnet": 3, "services": ["sql"], "sensitive": true}
        ],
        "exploits": [{"service": "http", "cost": 1}, {"service": "ssh", "cost": 2}, {"service": "sql", "cost": 3}]
    }"#;

    fn names(p: &PentestProblem, s: &Compromised) -> Vec<String> {
        p.observe(s).names(p.symbols()).map(String::from).collect()
    }

    #[test]
    fn chain_opens_next_subnet() {
        let p = PentestProblem::parse(CHAIN).unwrap();
        let s0 = p.initial();
        assert_eq!(names(&p, &s0), vec!["reachable-web"]);
        let s1 = p.step(&s0, "exploit-web-http").unwrap();
        assert_eq!(
            names(&p, &s1),
            vec!["compromised-web", "reachable-web", "reachable-app"]
        );
        assert_eq!(p.action(p.action_id("exploit-db-sql").unwrap()).cost(), 3);
    }

    #[test]
    fn interior_host_first_is_inapplicable() {
        let p = PentestProblem::parse(CHAIN).unwrap();
        let err = p.step(&p.initial(), "exploit-db-sql").unwrap_err();
        assert!(matches!(err, DomainError::InapplicableAction(_)));
        assert!(p.step(&p.initial(), "exploit-web-ssh").is_err());
    }

    #[test]
    fn all_sensitive_is_goal() {
        let p = PentestProblem::parse(CHAIN).unwrap();
        let mut s = p.initial();
        for a in ["exploit-web-http", "exploit-app-ssh", "exploit-db-sql"] {
            assert!(!p.is_goal(&s));
            s = p.step(&s, a).unwrap();
        }
        assert!(p.is_goal(&s));
        assert!(p.applicable(&s).is_empty());
    }

    #[test]
    fn validation() {
        let no_internet = CHAIN.replace(r#""internet": true"#, r#""internet": false"#);
        assert!(matches!(
            PentestScenario::parse(&no_internet),
            Err(DomainError::ScenarioInvalid(_))
        ));
        let island = CHAIN.replace("[[1, 2], [2, 3]]", "[[1, 2]]");
        assert!(PentestScenario::parse(&island).is_err());
        assert!(matches!(PentestScenario::parse("{"), Err(DomainError::Json(_))));
    }
}
