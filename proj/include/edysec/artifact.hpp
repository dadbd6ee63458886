/*
 * Copyright 2026 The edysec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Versioned, checksummed model artifact. The file is a JSON envelope
//   {"format": "edysec-model", "format_version": 1, "checksum": ..., "payload": {...}}
// where checksum is FNV-1a over the compact dump of the payload. Doubles are
// written in shortest round-trip form, so a reload reproduces every bit.

#ifndef EDYSEC_ARTIFACT_HPP_
#define EDYSEC_ARTIFACT_HPP_

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "edysec/common.hpp"
#include "edysec/dataset.hpp"
#include "edysec/neuralnet.hpp"
#include "edysec/preprocess.hpp"
#include "json.hpp"

namespace edysec {

inline constexpr int kArtifactFormatVersion = 1;
inline constexpr const char* kArtifactFormat = "edysec-model";

inline void WriteTextFile(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kWriteFailure, "cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kWriteFailure, "short write to " + path);
}

struct SelectionRecord {
  std::string method;
  std::vector<std::string> selected;  // manifest order
  double score = 0.0;
  double objective = 0.0;
  double alpha = 0.0;
  std::size_t d_total = 0;

  bool operator==(const SelectionRecord&) const = default;
};

struct TrainingFingerprint {
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::string dataset_hash;

  bool operator==(const TrainingFingerprint&) const = default;
};

struct ModelArtifact {
  Preprocessor preprocessor;
  SelectionRecord selection;
  std::string model;  // candidate name, e.g. "mlp"
  NetworkParams network;
  double threshold = kDefaultThreshold;
  TrainingFingerprint fingerprint;
  Matrix background;  // projected training rows used as the explanation background

  bool operator==(const ModelArtifact&) const = default;

  // Indices into the full processed row that survive projection.
  std::vector<std::size_t> SelectedColumns() const {
    const std::set<std::string> wanted(selection.selected.begin(), selection.selected.end());
    const auto map = preprocessor.ColumnMap();
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < map.size(); ++c) {
      if (wanted.count(map[c].feature)) cols.push_back(c);
    }
    return cols;
  }

  FeatureGroups Groups() const {
    const std::set<std::string> wanted(selection.selected.begin(), selection.selected.end());
    std::vector<std::string> names;
    for (const auto& f : preprocessor.manifest.features) {
      if (wanted.count(f.name)) names.push_back(f.name);
    }
    std::vector<ColumnOrigin> projected;
    const auto map = preprocessor.ColumnMap();
    for (std::size_t c : SelectedColumns()) projected.push_back(map[c]);
    return GroupsOf(names, projected);
  }

  void Validate() const {
    preprocessor.manifest.Validate();
    Require(!selection.selected.empty(), "artifact has an empty feature selection",
            ErrorCode::kCorruptArtifact);
    for (const auto& f : selection.selected) {
      if (!preprocessor.manifest.IndexOf(f)) {
        throw Error(ErrorCode::kCorruptArtifact, "selected feature '" + f + "' not in manifest",
                    std::nullopt, f);
      }
    }
    const std::size_t width = SelectedColumns().size();
    Require(network.spec.input_width == width,
            "network width " + std::to_string(network.spec.input_width) +
                " differs from projected width " + std::to_string(width),
            ErrorCode::kCorruptArtifact);
    Require(network.layers.size() == network.spec.hidden.size() + 1,
            "layer count differs from the network spec", ErrorCode::kCorruptArtifact);
    std::size_t in = width;
    for (std::size_t l = 0; l < network.layers.size(); ++l) {
      const auto& layer = network.layers[l];
      const std::size_t out = l < network.spec.hidden.size() ? network.spec.hidden[l].units : 1;
      Require(layer.in == in && layer.out == out && layer.weights.size() == in * out &&
                  layer.bias.size() == out,
              "layer " + std::to_string(l) + " has inconsistent shape",
              ErrorCode::kCorruptArtifact);
      in = out;
    }
    Require(background.rows == 0 || background.cols == width,
            "background width differs from the projected width", ErrorCode::kCorruptArtifact);
  }

  // Full preprocessing followed by projection onto the selected columns.
  std::vector<double> ProcessCells(const std::vector<Cell>& cells) const {
    const auto full = preprocessor.TransformCells(cells);
    std::vector<double> out;
    const auto cols = SelectedColumns();
    out.reserve(cols.size());
    for (std::size_t c : cols) out.push_back(full[c]);
    return out;
  }
};

namespace detail {

using nlohmann::json;

inline json MatrixToJson(const Matrix& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix MatrixFromJson(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.data = j.at("data").get<std::vector<double>>();
  Require(m.data.size() == m.rows * m.cols, "matrix data size mismatch",
          ErrorCode::kCorruptArtifact);
  return m;
}

inline json PreprocessorToJson(const Preprocessor& p) {
  json vecs = json::array();
  for (const auto& v : p.vectorizers) {
    vecs.push_back({{"column", v.column},
                    {"kind", std::string(KindName(v.kind))},
                    {"documents", v.documents},
                    {"vocabulary", v.vocabulary},
                    {"doc_freq", v.doc_freq},
                    {"idf", v.idf}});
  }
  return {{"manifest", ManifestToJson(p.manifest)},
          {"scaler",
           {{"columns", p.scaler.columns}, {"mean", p.scaler.mean}, {"stddev", p.scaler.stddev}}},
          {"vectorizers", std::move(vecs)}};
}

inline Preprocessor PreprocessorFromJson(const json& j) {
  Preprocessor p;
  p.manifest = ManifestFromJson(j.at("manifest"));
  const auto& s = j.at("scaler");
  p.scaler.columns = s.at("columns").get<std::vector<std::string>>();
  p.scaler.mean = s.at("mean").get<std::vector<double>>();
  p.scaler.stddev = s.at("stddev").get<std::vector<double>>();
  Require(p.scaler.mean.size() == p.scaler.columns.size() &&
              p.scaler.stddev.size() == p.scaler.columns.size(),
          "scaler arrays differ in length", ErrorCode::kCorruptArtifact);
  for (const auto& v : j.at("vectorizers")) {
    TextVectorizer t;
    t.column = v.at("column").get<std::string>();
    t.kind = ParseKind(v.at("kind").get<std::string>());
    t.documents = v.at("documents").get<std::size_t>();
    t.vocabulary = v.at("vocabulary").get<std::vector<std::string>>();
    t.doc_freq = v.at("doc_freq").get<std::vector<std::size_t>>();
    t.idf = v.at("idf").get<std::vector<double>>();
    Require(t.doc_freq.size() == t.vocabulary.size() && t.idf.size() == t.vocabulary.size(),
            "vectorizer arrays differ in length", ErrorCode::kCorruptArtifact);
    p.vectorizers.push_back(std::move(t));
  }
  return p;
}

inline json NetworkToJson(const NetworkParams& n) {
  json hidden = json::array();
  for (const auto& h : n.spec.hidden) hidden.push_back({{"units", h.units}, {"dropout", h.dropout}});
  json layers = json::array();
  for (const auto& l : n.layers) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"bias", l.bias}});
  }
  return {{"spec", {{"input_width", n.spec.input_width}, {"hidden", std::move(hidden)}}},
          {"layers", std::move(layers)}};
}

inline NetworkParams NetworkFromJson(const json& j) {
  NetworkParams n;
  n.spec.input_width = j.at("spec").at("input_width").get<std::size_t>();
  for (const auto& h : j.at("spec").at("hidden")) {
    n.spec.hidden.push_back({h.at("units").get<std::size_t>(), h.at("dropout").get<double>()});
  }
  for (const auto& l : j.at("layers")) {
    DenseLayer layer;
    layer.in = l.at("in").get<std::size_t>();
    layer.out = l.at("out").get<std::size_t>();
    layer.weights = l.at("weights").get<std::vector<double>>();
    layer.bias = l.at("bias").get<std::vector<double>>();
    n.layers.push_back(std::move(layer));
  }
  return n;
}

}  // namespace detail

inline nlohmann::json ArtifactPayload(const ModelArtifact& a) {
  using nlohmann::json;
  const auto& s = a.selection;
  return {{"preprocessor", detail::PreprocessorToJson(a.preprocessor)},
          {"selection",
           {{"method", s.method},
            {"selected", s.selected},
            {"score", s.score},
            {"objective", s.objective},
            {"alpha", s.alpha},
            {"d_selected", s.selected.size()},
            {"d_total", s.d_total}}},
          {"model", a.model},
          {"network", detail::NetworkToJson(a.network)},
          {"threshold", a.threshold},
          {"fingerprint",
           {{"seed", a.fingerprint.seed},
            {"config", a.fingerprint.config},
            {"dataset_hash", a.fingerprint.dataset_hash}}},
          {"background", detail::MatrixToJson(a.background)}};
}

inline ModelArtifact ArtifactFromPayload(const nlohmann::json& p) {
  ModelArtifact a;
  a.preprocessor = detail::PreprocessorFromJson(p.at("preprocessor"));
  const auto& s = p.at("selection");
  a.selection.method = s.at("method").get<std::string>();
  a.selection.selected = s.at("selected").get<std::vector<std::string>>();
  a.selection.score = s.at("score").get<double>();
  a.selection.objective = s.at("objective").get<double>();
  a.selection.alpha = s.at("alpha").get<double>();
  a.selection.d_total = s.at("d_total").get<std::size_t>();
  a.model = p.at("model").get<std::string>();
  a.network = detail::NetworkFromJson(p.at("network"));
  a.threshold = p.at("threshold").get<double>();
  const auto& f = p.at("fingerprint");
  a.fingerprint.seed = f.at("seed").get<std::uint64_t>();
  a.fingerprint.config = f.at("config");
  a.fingerprint.dataset_hash = f.at("dataset_hash").get<std::string>();
  a.background = detail::MatrixFromJson(p.at("background"));
  return a;
}

// Identifies the exact model: checksum of the serialized payload.
inline std::string ArtifactFingerprint(const ModelArtifact& a) {
  return Hex64(Fnv1a64(ArtifactPayload(a).dump()));
}

inline std::string SerializeArtifact(const ModelArtifact& a) {
  a.Validate();
  const nlohmann::json payload = ArtifactPayload(a);
  const std::string body = payload.dump();
  nlohmann::json envelope = {{"format", kArtifactFormat},
                             {"format_version", kArtifactFormatVersion},
                             {"checksum", Hex64(Fnv1a64(body))},
                             {"payload", payload}};
  return envelope.dump() + "\n";
}

inline ModelArtifact DeserializeArtifact(std::string_view bytes) {
  nlohmann::json envelope;
  try {
    envelope = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptArtifact, std::string("unparsable artifact: ") + e.what());
  }
  try {
    if (!envelope.is_object() || envelope.value("format", std::string()) != kArtifactFormat) {
      throw Error(ErrorCode::kCorruptArtifact, "not an edysec model artifact");
    }
    const int version = envelope.at("format_version").get<int>();
    if (version != kArtifactFormatVersion) {
      throw Error(ErrorCode::kVersionMismatch,
                  "artifact format version " + std::to_string(version) + ", expected " +
                      std::to_string(kArtifactFormatVersion));
    }
    const auto& payload = envelope.at("payload");
    const std::string expected = envelope.at("checksum").get<std::string>();
    if (Hex64(Fnv1a64(payload.dump())) != expected) {
      throw Error(ErrorCode::kCorruptArtifact, "checksum mismatch");
    }
    ModelArtifact a = ArtifactFromPayload(payload);
    a.Validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptArtifact, std::string("malformed artifact: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kVersionMismatch || e.code() == ErrorCode::kCorruptArtifact) throw;
    throw Error(ErrorCode::kCorruptArtifact, e.what());
  }
}

inline void SaveArtifact(const ModelArtifact& a, const std::string& path) {
  WriteTextFile(path, SerializeArtifact(a));
}

inline ModelArtifact LoadArtifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DeserializeArtifact(bytes);
}

}  // namespace edysec

#endif  // EDYSEC_ARTIFACT_HPP_
