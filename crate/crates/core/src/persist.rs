//! Binary model artifacts.
//!
//! Layout: magic `OFNS`, format version (u32 LE), section count (u32 LE),
//! then sections of a 4-byte tag, a u64 LE payload length and the payload.
//!
//! * `CONF`: UTF-8 `key = value` lines (run configuration and model metadata)
//! * `VOCB`: vocabulary words, one per line, index 2 first
//! * `TERM`: TF-IDF terms as `term<TAB>df` lines in column order
//! * `PARM`: named arrays: u32 count, then per array a u32 name length, the
//!   name, a u32 rank, u64 dims and little-endian f64 values

use std::collections::BTreeMap;

use crate::classical::{DecisionTree, ForestModel, LinearKind, LinearModel, Node};
use crate::features::TfidfModel;
use crate::neural::{CnnModel, GruModel, LstmModel, NeuralModel, Tensor};
use crate::pipeline::{Featurizer, FittedPipeline, ModelKind, RunConfig, TrainedModel};
use crate::preprocess::Vocabulary;
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OFNS";
pub const FORMAT_VERSION: u32 = 1;

const LEAF: f64 = -1.0;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn save_model(pipeline: &FittedPipeline) -> Vec<u8> {
    let config = pipeline.config();
    let mut conf = vec![
        ("task".to_string(), config.task.as_str().to_lowercase()),
        ("model".into(), config.model.to_string()),
        ("preprocess".into(), config.preprocess.to_string()),
        ("seed".into(), config.seed.to_string()),
        ("drop_hashtag_body".into(), config.drop_hashtag_body.to_string()),
        ("augment".into(), config.augmentation.enabled.to_string()),
        ("target_ratio".into(), config.augmentation.target_ratio.to_string()),
    ];
    for (k, v) in config.overrides() {
        conf.push((format!("hp.{k}"), v.clone()));
    }
    let mut sections: Vec<([u8; 4], Vec<u8>)> = Vec::new();
    let mut arrays: Vec<(String, Vec<usize>, Vec<f64>)> = Vec::new();

    match pipeline.featurizer() {
        Featurizer::Tfidf(m) => {
            conf.push(("features".into(), "tfidf".into()));
            conf.push(("n_docs".into(), m.n_docs().to_string()));
            let text: String = m.terms().iter().zip(m.df()).map(|(t, d)| format!("{t}\t{d}\n")).collect();
            sections.push((*b"TERM", text.into_bytes()));
        }
        Featurizer::Sequence { vocabulary, max_len } => {
            conf.push(("features".into(), "sequence".into()));
            conf.push(("max_len".into(), max_len.to_string()));
            let text: String = vocabulary.words().iter().map(|w| format!("{w}\n")).collect();
            sections.push((*b"VOCB", text.into_bytes()));
        }
    }
    match pipeline.model() {
        TrainedModel::Linear(m) => {
            conf.push(("linear.n_features".into(), m.n_features.to_string()));
            conf.push(("linear.regularization".into(), m.regularization.to_string()));
            arrays.push(("linear.weights".into(), vec![m.n_rows(), m.n_features], m.weights.clone()));
            arrays.push(("linear.bias".into(), vec![m.bias.len()], m.bias.clone()));
            arrays.push(("linear.loss_history".into(), vec![m.loss_history.len()], m.loss_history.clone()));
        }
        TrainedModel::Forest(f) => {
            conf.push(("forest.features_per_split".into(), f.features_per_split.to_string()));
            conf.push(("forest.seed".into(), f.seed.to_string()));
            conf.push(("forest.n_features".into(), f.trees.first().map_or(0, |t| t.n_features).to_string()));
            for (i, tree) in f.trees.iter().enumerate() {
                let width = 4 + f.n_classes;
                let mut data = Vec::with_capacity(tree.nodes.len() * width);
                for node in &tree.nodes {
                    match node {
                        Node::Split { feature, threshold, left, right } => {
                            data.extend([*feature as f64, *threshold, *left as f64, *right as f64]);
                            data.extend(std::iter::repeat_n(0.0, f.n_classes));
                        }
                        Node::Leaf { counts } => {
                            data.extend([LEAF, 0.0, 0.0, 0.0]);
                            data.extend(counts.iter().map(|&c| c as f64));
                        }
                    }
                }
                arrays.push((format!("tree.{i}"), vec![tree.nodes.len(), width], data));
            }
        }
        TrainedModel::Neural(m) => {
            let e = m.embedding().weights();
            arrays.push(("embedding".into(), e.shape().to_vec(), e.data().to_vec()));
            for (i, (name, t)) in m.parameters().into_iter().enumerate() {
                arrays.push((format!("{i}.{name}"), t.shape().to_vec(), t.data().to_vec()));
            }
        }
    }

    let conf_text: String = conf.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    sections.insert(0, (*b"CONF", conf_text.into_bytes()));
    sections.push((*b"PARM", encode_arrays(&arrays)));

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(sections.len() as u32).to_le_bytes());
    for (tag, payload) in sections {
        out.extend_from_slice(&tag);
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&payload);
    }
    out
}

fn encode_arrays(arrays: &[(String, Vec<usize>, Vec<f64>)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(arrays.len() as u32).to_le_bytes());
    for (name, shape, data) in arrays {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
        for &d in shape {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Bounds-checked little-endian reader.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], what: &'static str) -> Self {
        Reader { bytes, pos: 0, what }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(format_err(format!(
                "{} truncated: needs {n} more bytes at offset {}, {} remain",
                self.what,
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        usize::try_from(n).map_err(|_| format_err(format!("{}: length {n} does not fit in memory", self.what)))
    }
}

struct Sections<'a> {
    map: BTreeMap<[u8; 4], &'a [u8]>,
}

impl<'a> Sections<'a> {
    fn get(&self, tag: &[u8; 4]) -> Result<&'a [u8]> {
        self.map
            .get(tag)
            .copied()
            .ok_or_else(|| format_err(format!("missing {} section", String::from_utf8_lossy(tag))))
    }

    fn text(&self, tag: &[u8; 4]) -> Result<&'a str> {
        std::str::from_utf8(self.get(tag)?)
            .map_err(|_| format_err(format!("{} section is not UTF-8", String::from_utf8_lossy(tag))))
    }
}

fn read_sections(bytes: &[u8]) -> Result<Sections<'_>> {
    let mut r = Reader::new(bytes, "artifact header");
    if r.take(4).map_err(|_| format_err("file too short to be a model artifact"))? != MAGIC {
        return Err(format_err("not a model artifact (bad magic)"));
    }
    let version = r.u32()?;
    if version > FORMAT_VERSION {
        return Err(format_err(format!(
            "artifact format version {version} is newer than the supported version {FORMAT_VERSION}"
        )));
    }
    if version != FORMAT_VERSION {
        return Err(format_err(format!("unsupported artifact format version {version}")));
    }
    let count = r.u32()?;
    let mut map = BTreeMap::new();
    for _ in 0..count {
        r.what = "section header";
        let tag: [u8; 4] = r.take(4)?.try_into().unwrap();
        let len = r.len()?;
        if len > r.remaining() {
            return Err(format_err(format!(
                "section {} truncated: declares {len} bytes but {} remain",
                String::from_utf8_lossy(&tag),
                r.remaining()
            )));
        }
        let payload = r.take(len)?;
        if map.insert(tag, payload).is_some() {
            return Err(format_err(format!("duplicate {} section", String::from_utf8_lossy(&tag))));
        }
    }
    if r.remaining() != 0 {
        return Err(format_err(format!("{} trailing bytes after the last section", r.remaining())));
    }
    Ok(Sections { map })
}

fn read_arrays(bytes: &[u8]) -> Result<Vec<(String, Tensor)>> {
    let mut r = Reader::new(bytes, "PARM section");
    let count = r.u32()?;
    let mut out = Vec::new();
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name =
            std::str::from_utf8(r.take(name_len)?).map_err(|_| format_err("parameter name is not UTF-8"))?.to_string();
        let rank = r.u32()? as usize;
        let mut shape = Vec::with_capacity(rank.min(8));
        for _ in 0..rank {
            shape.push(r.len()?);
        }
        let n = shape
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&n| n.checked_mul(8).is_some_and(|b| b <= r.remaining()))
            .ok_or_else(|| format_err(format!("array `{name}` with shape {shape:?} exceeds the section")))?;
        let data = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        out.push((name, Tensor::from_vec(&shape, data)?));
    }
    if r.remaining() != 0 {
        return Err(format_err("trailing bytes in PARM section"));
    }
    Ok(out)
}

fn parse_conf(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format_err(format!("bad CONF line `{l}`")))
        })
        .collect()
}

struct Conf(Vec<(String, String)>);

impl Conf {
    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format_err(format!("CONF lacks `{key}`")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.parse().map_err(|_| format_err(format!("CONF `{key}` is malformed")))
    }
}

fn as_index(v: f64, what: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < (1u64 << 52) as f64 {
        Ok(v as usize)
    } else {
        Err(format_err(format!("{what} {v} is not a valid index")))
    }
}

pub fn load_model(bytes: &[u8]) -> Result<FittedPipeline> {
    let sections = read_sections(bytes)?;
    let conf = Conf(parse_conf(sections.text(b"CONF")?)?);
    let model_kind: ModelKind = conf.get("model")?.parse().map_err(|e: Error| format_err(e.to_string()))?;
    let task = conf.get("task")?.parse().map_err(|e: Error| format_err(e.to_string()))?;
    let mut config = RunConfig::new(task, model_kind);
    for key in ["preprocess", "seed", "drop_hashtag_body", "augment", "target_ratio"] {
        config.apply(key, conf.get(key)?).map_err(|e| format_err(e.to_string()))?;
    }
    for (k, v) in &conf.0 {
        if let Some(hp) = k.strip_prefix("hp.") {
            config.set(hp, v).map_err(|e| format_err(e.to_string()))?;
        }
    }
    let n_classes = task.n_classes();
    let arrays = read_arrays(sections.get(b"PARM")?)?;

    let featurizer = match conf.get("features")? {
        "tfidf" => {
            let mut terms = Vec::new();
            let mut df = Vec::new();
            for line in sections.text(b"TERM")?.lines() {
                let (t, d) = line.split_once('\t').ok_or_else(|| format_err("bad TERM line"))?;
                terms.push(t.to_string());
                df.push(d.parse().map_err(|_| format_err("bad document frequency"))?);
            }
            Featurizer::Tfidf(
                TfidfModel::from_parts(terms, df, conf.num("n_docs")?).map_err(|e| format_err(e.to_string()))?,
            )
        }
        "sequence" => {
            let words = sections.text(b"VOCB")?.lines();
            let vocabulary = Vocabulary::from_words(words).map_err(|e| format_err(e.to_string()))?;
            Featurizer::Sequence { vocabulary, max_len: conf.num("max_len")? }
        }
        other => return Err(format_err(format!("unknown feature kind `{other}`"))),
    };

    let model = match model_kind {
        ModelKind::LogReg | ModelKind::Svm => {
            let find = |name: &str| {
                arrays
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, t)| t)
                    .ok_or_else(|| format_err(format!("missing `{name}`")))
            };
            let weights = find("linear.weights")?;
            let bias = find("linear.bias")?;
            let n_features: usize = conf.num("linear.n_features")?;
            let kind = if model_kind == ModelKind::LogReg { LinearKind::LogReg } else { LinearKind::Svm };
            let rows = if kind == LinearKind::Svm && n_classes == 2 { 1 } else { n_classes };
            if weights.shape() != [rows, n_features] || bias.shape() != [rows] {
                return Err(format_err("linear weights have the wrong shape"));
            }
            TrainedModel::Linear(LinearModel {
                kind,
                n_classes,
                n_features,
                weights: weights.data().to_vec(),
                bias: bias.data().to_vec(),
                regularization: conf.num("linear.regularization")?,
                loss_history: find("linear.loss_history")?.data().to_vec(),
            })
        }
        ModelKind::Forest => {
            let n_features: usize = conf.num("forest.n_features")?;
            let width = 4 + n_classes;
            let mut trees = Vec::new();
            for (name, t) in &arrays {
                if !name.starts_with("tree.") {
                    continue;
                }
                if t.shape().len() != 2 || t.cols() != width || t.rows() == 0 {
                    return Err(format_err(format!("`{name}` has shape {:?}", t.shape())));
                }
                let n_nodes = t.rows();
                let mut nodes = Vec::with_capacity(n_nodes);
                for i in 0..n_nodes {
                    let row = t.row(i);
                    if row[0] == LEAF {
                        let counts = row[4..].iter().map(|&c| as_index(c, "leaf count")).collect::<Result<_>>()?;
                        nodes.push(Node::Leaf { counts });
                    } else {
                        let feature = as_index(row[0], "feature")?;
                        let (left, right) = (as_index(row[2], "child")?, as_index(row[3], "child")?);
                        if feature >= n_features || left >= n_nodes || right >= n_nodes || left <= i || right <= i {
                            return Err(format_err(format!("`{name}` node {i} is malformed")));
                        }
                        nodes.push(Node::Split { feature, threshold: row[1], left, right });
                    }
                }
                trees.push(DecisionTree { nodes, n_classes, n_features });
            }
            if trees.is_empty() {
                return Err(format_err("forest has no trees"));
            }
            TrainedModel::Forest(ForestModel {
                trees,
                n_classes,
                features_per_split: conf.num("forest.features_per_split")?,
                seed: conf.num("forest.seed")?,
            })
        }
        ModelKind::Cnn | ModelKind::Lstm | ModelKind::Gru => {
            let mut it = arrays.into_iter();
            let (name, embedding) = it.next().ok_or_else(|| format_err("missing embedding"))?;
            if name != "embedding" || embedding.shape().len() != 2 {
                return Err(format_err("first array must be the embedding matrix"));
            }
            let dense: Vec<Tensor> = it.map(|(_, t)| t).collect();
            let params = config.neural_params().map_err(|e| format_err(e.to_string()))?;
            let rows = embedding.rows();
            let net = match model_kind {
                ModelKind::Cnn => {
                    NeuralModel::Cnn(CnnModel::from_parts(params.cnn_config(rows, n_classes), embedding, dense)?)
                }
                ModelKind::Lstm => {
                    NeuralModel::Lstm(LstmModel::from_parts(params.rnn_config(rows, n_classes), embedding, dense)?)
                }
                _ => NeuralModel::Gru(GruModel::from_parts(params.rnn_config(rows, n_classes), embedding, dense)?),
            };
            if let Featurizer::Sequence { vocabulary, .. } = &featurizer {
                if vocabulary.index_space() != rows {
                    return Err(format_err("embedding rows do not match the vocabulary"));
                }
            }
            TrainedModel::Neural(net)
        }
    };
    FittedPipeline::from_parts(config, featurizer, model)
}
