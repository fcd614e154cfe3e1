use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{KripkeModel, ModelError, PointedModel, StateSet};
use crate::syntax::{PropName, RelLabel};

/// Wire format: `{"states":[..],"relations":{"d":[[a,b]]},"valuation":{"p":[..]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub states: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<RelLabel, Vec<(String, String)>>,
    #[serde(default)]
    pub valuation: BTreeMap<PropName, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointedJson {
    model: ModelJson,
    point: String,
}

impl From<&KripkeModel> for ModelJson {
    fn from(m: &KripkeModel) -> Self {
        let relations = m
            .relations_map()
            .iter()
            .map(|(l, rel)| {
                let pairs = rel
                    .iter()
                    .enumerate()
                    .flat_map(|(i, succ)| {
                        succ.iter()
                            .map(move |j| (m.state_name(i).to_string(), m.state_name(j).to_string()))
                    })
                    .collect();
                (l.clone(), pairs)
            })
            .collect();
        let valuation = m
            .valuation_map()
            .iter()
            .map(|(p, s)| (p.clone(), m.names_of(s)))
            .collect();
        ModelJson {
            states: m.states().to_vec(),
            relations,
            valuation,
        }
    }
}

impl TryFrom<ModelJson> for KripkeModel {
    type Error = ModelError;

    fn try_from(j: ModelJson) -> Result<Self, ModelError> {
        let edges: Vec<(RelLabel, String, String)> = j
            .relations
            .iter()
            .flat_map(|(l, pairs)| pairs.iter().map(move |(a, b)| (l.clone(), a.clone(), b.clone())))
            .collect();
        let val: Vec<(PropName, Vec<String>)> = j.valuation.into_iter().collect();
        let mut m = KripkeModel::new(&j.states, &edges, &val)?;
        for l in j.relations.keys() {
            m.declare_relation(l);
        }
        Ok(m)
    }
}

impl KripkeModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let j: ModelJson = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        KripkeModel::try_from(j)
    }

    /// Canonical JSON: states, pairs and letters in lexicographic order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelJson::from(self)).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson::from(self)).expect("serializable")
    }
}

impl PointedModel {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({ "model": self.model.to_json_value(), "point": self.point })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let j: PointedJson = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let model = KripkeModel::try_from(j.model)?;
        model.index_of(&j.point)?;
        Ok(PointedModel { model, point: j.point })
    }

    pub fn point_index(&self) -> usize {
        self.model.index_of(&self.point).expect("point belongs to the model")
    }
}

impl StateSet {
    pub fn to_names(&self, m: &KripkeModel) -> Vec<String> {
        m.names_of(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_canonical() {
        let text = r#"{"states":["b","a"],"relations":{"d":[["b","a"],["a","b"]]},"valuation":{"p":["b"]}}"#;
        let m = KripkeModel::from_json(text).unwrap();
        let out = m.to_json();
        assert_eq!(
            out,
            r#"{"states":["a","b"],"relations":{"d":[["a","b"],["b","a"]]},"valuation":{"p":["b"]}}"#
        );
        assert_eq!(KripkeModel::from_json(&out).unwrap(), m);
    }

    #[test]
    fn unknown_keys_and_states_are_rejected() {
        assert!(matches!(
            KripkeModel::from_json(r#"{"states":["a"],"extra":1}"#),
            Err(ModelError::Json(_))
        ));
        assert!(matches!(
            KripkeModel::from_json(r#"{"states":["a"],"valuation":{"p":["z"]}}"#),
            Err(ModelError::UnknownState(_))
        ));
    }
}
