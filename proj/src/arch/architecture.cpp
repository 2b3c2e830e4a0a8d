// Copyright 2026 The Treesum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "treesum/arch/architecture.hpp"

#include <fstream>
#include <map>
#include <json.hpp>
#include <set>
#include <sstream>

#include "treesum/error.hpp"

namespace treesum::arch {

namespace detail {
// Generated at configure time from data/arch/*.json.
struct BundledDocument {
  const char* name;
  const char* text;
};
extern const BundledDocument kBundled[];
extern const std::size_t kBundledCount;
}  // namespace detail

using nlohmann::json;

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConvolution: return "convolution";
    case LayerKind::kFullyConnected: return "fully-connected";
    case LayerKind::kPool: return "pool";
    case LayerKind::kOther: return "other";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view name) {
  for (LayerKind k : {LayerKind::kConvolution, LayerKind::kFullyConnected, LayerKind::kPool, LayerKind::kOther}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown layer kind '" + std::string(name) +
                    "' (expected convolution, fully-connected, pool or other)");
}

namespace {

struct Dims {
  std::uint64_t c, h, w;
};

class LayerReader {
 public:
  LayerReader(const json& j, std::string label) : j_(j), label_(std::move(label)) {}

  [[noreturn]] void fail(std::string_view field, const std::string& what) const {
    throw ConfigError(label_ + " field '" + std::string(field) + "': " + what);
  }

  bool has(const char* field) const { return j_.contains(field); }

  std::uint64_t count(const char* field) const {
    const json& v = j_.at(field);
    if (!v.is_number_unsigned()) fail(field, "must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::uint64_t required_positive(const char* field) const {
    if (!has(field)) fail(field, "missing");
    return positive(field);
  }

  std::uint64_t positive(const char* field) const {
    const std::uint64_t v = count(field);
    if (v == 0) fail(field, "must be >= 1");
    return v;
  }

  std::uint64_t optional(const char* field, std::uint64_t fallback) const {
    return has(field) ? count(field) : fallback;
  }

  std::uint64_t optional_positive(const char* field, std::uint64_t fallback) const {
    return has(field) ? positive(field) : fallback;
  }

  void expect(const char* field, std::uint64_t derived, const std::string& why) const {
    if (has(field) && count(field) != derived) {
      fail(field, "is " + std::to_string(count(field)) + " but " + why + " gives " + std::to_string(derived));
    }
  }

 private:
  const json& j_;
  std::string label_;
};

const std::set<std::string> kLayerFields = {"name", "kind", "ch", "numFilt", "filterW", "filterH", "stride",
                                            "pad", "has_bias", "activationW", "activationH", "inputs"};

std::uint64_t window(std::uint64_t in, std::uint64_t filter, std::uint64_t stride, std::uint64_t pad,
                     const LayerReader& r, const char* field) {
  if (in + 2 * pad < filter) {
    r.fail(field, "filter " + std::to_string(filter) + " exceeds padded input " + std::to_string(in + 2 * pad));
  }
  return (in + 2 * pad - filter) / stride + 1;
}

AnalyzerLayer read_layer(const json& j, std::size_t index, const std::map<std::string, Dims>& produced,
                         const Dims& previous) {
  if (!j.is_object()) throw ConfigError("layer " + std::to_string(index) + ": must be an object");
  std::string label = "layer " + std::to_string(index);
  AnalyzerLayer l;
  if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty()) {
    throw ConfigError(label + " field 'name': missing or not a non-empty string");
  }
  l.name = j["name"].get<std::string>();
  label = "layer '" + l.name + "'";
  const LayerReader r(j, label);
  for (const auto& [key, value] : j.items()) {
    if (!kLayerFields.contains(key)) r.fail(key, "unknown field");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) r.fail("kind", "missing or not a string");
  try {
    l.kind = parse_layer_kind(j["kind"].get<std::string>());
  } catch (const ConfigError& e) {
    r.fail("kind", e.what());
  }
  if (j.contains("has_bias")) {
    if (!j["has_bias"].is_boolean()) r.fail("has_bias", "must be true or false");
    l.has_bias = j["has_bias"].get<bool>();
  }

  Dims in = previous;
  if (j.contains("inputs")) {
    const json& inputs = j["inputs"];
    if (!inputs.is_array() || inputs.empty()) r.fail("inputs", "must be a non-empty list of layer names");
    in.c = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!inputs[i].is_string()) r.fail("inputs", "entries must be layer names");
      const std::string src = inputs[i].get<std::string>();
      const auto it = produced.find(src);
      if (it == produced.end()) r.fail("inputs", "'" + src + "' is not an earlier layer");
      if (i > 0 && (it->second.h != in.h || it->second.w != in.w)) {
        r.fail("inputs", "'" + src + "' is " + std::to_string(it->second.h) + "x" + std::to_string(it->second.w) +
                             ", expected " + std::to_string(in.h) + "x" + std::to_string(in.w));
      }
      in.c += it->second.c;
      in.h = it->second.h;
      in.w = it->second.w;
      l.inputs.push_back(src);
    }
  }
  r.expect("ch", in.c, "the input");
  l.ch = in.c;

  switch (l.kind) {
    case LayerKind::kConvolution:
      l.num_filt = r.required_positive("numFilt");
      l.filter_w = r.required_positive("filterW");
      l.filter_h = r.required_positive("filterH");
      l.stride = r.optional_positive("stride", 1);
      l.pad = r.optional("pad", 0);
      l.activation_w = window(in.w, l.filter_w, l.stride, l.pad, r, "filterW");
      l.activation_h = window(in.h, l.filter_h, l.stride, l.pad, r, "filterH");
      break;
    case LayerKind::kFullyConnected:
      l.num_filt = r.required_positive("numFilt");
      r.expect("filterW", in.w, "the input width");
      r.expect("filterH", in.h, "the input height");
      r.expect("stride", 1, "a fully-connected layer");
      r.expect("pad", 0, "a fully-connected layer");
      l.filter_w = in.w;
      l.filter_h = in.h;
      r.expect("activationW", 1, "a fully-connected layer");
      r.expect("activationH", 1, "a fully-connected layer");
      l.activation_w = l.activation_h = 1;
      break;
    case LayerKind::kPool:
      r.expect("numFilt", in.c, "the input channel count");
      l.num_filt = in.c;
      l.filter_w = r.required_positive("filterW");
      l.filter_h = r.required_positive("filterH");
      l.stride = r.optional_positive("stride", 1);
      l.pad = r.optional("pad", 0);
      l.activation_w = window(in.w, l.filter_w, l.stride, l.pad, r, "filterW");
      l.activation_h = window(in.h, l.filter_h, l.stride, l.pad, r, "filterH");
      break;
    case LayerKind::kOther:
      r.expect("numFilt", in.c, "the input channel count");
      l.num_filt = in.c;
      l.filter_w = r.optional_positive("filterW", 1);
      l.filter_h = r.optional_positive("filterH", 1);
      l.stride = r.optional_positive("stride", 1);
      l.pad = r.optional("pad", 0);
      l.activation_w = in.w;
      l.activation_h = in.h;
      break;
  }
  if (l.kind != LayerKind::kFullyConnected) {
    l.activation_w = r.optional_positive("activationW", l.activation_w);
    l.activation_h = r.optional_positive("activationH", l.activation_h);
  }
  return l;
}

}  // namespace

ArchitectureSpec parse_architecture(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("architecture document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("architecture document must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "input" && key != "layers" && key != "notes") {
      throw ConfigError("architecture: unknown field '" + key + "'");
    }
  }
  ArchitectureSpec a;
  if (!doc.contains("name") || !doc["name"].is_string()) throw ConfigError("architecture field 'name': missing");
  a.name = doc["name"].get<std::string>();
  if (doc.contains("notes")) {
    if (!doc["notes"].is_string()) throw ConfigError("architecture field 'notes': must be text");
    a.notes = doc["notes"].get<std::string>();
  }
  if (!doc.contains("input") || !doc["input"].is_object()) {
    throw ConfigError("architecture field 'input': missing {channels, height, width}");
  }
  const LayerReader in(doc["input"], "input");
  a.input = {in.required_positive("channels"), in.required_positive("height"), in.required_positive("width")};
  if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty()) {
    throw ConfigError("architecture field 'layers': missing or empty");
  }
  std::map<std::string, Dims> produced;
  Dims previous{a.input.channels, a.input.height, a.input.width};
  for (std::size_t i = 0; i < doc["layers"].size(); ++i) {
    AnalyzerLayer l = read_layer(doc["layers"][i], i, produced, previous);
    previous = {l.num_filt, l.activation_h, l.activation_w};
    if (!produced.emplace(l.name, previous).second) {
      throw ConfigError("layer '" + l.name + "' field 'name': duplicate layer name");
    }
    a.layers.push_back(std::move(l));
  }
  return a;
}

std::string serialize_architecture(const ArchitectureSpec& a) {
  nlohmann::ordered_json doc;
  doc["name"] = a.name;
  doc["input"] = {{"channels", a.input.channels}, {"height", a.input.height}, {"width", a.input.width}};
  if (!a.notes.empty()) doc["notes"] = a.notes;
  doc["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : a.layers) {
    nlohmann::ordered_json j;
    j["name"] = l.name;
    j["kind"] = std::string(to_string(l.kind));
    if (!l.inputs.empty()) j["inputs"] = l.inputs;
    j["ch"] = l.ch;
    j["numFilt"] = l.num_filt;
    j["filterW"] = l.filter_w;
    j["filterH"] = l.filter_h;
    j["stride"] = l.stride;
    j["pad"] = l.pad;
    j["has_bias"] = l.has_bias;
    j["activationW"] = l.activation_w;
    j["activationH"] = l.activation_h;
    doc["layers"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

ArchitectureSpec load_architecture(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open architecture file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_architecture(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<std::string> bundled_architectures() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kBundledCount; ++i) names.emplace_back(detail::kBundled[i].name);
  return names;
}

bool is_bundled(std::string_view name) {
  for (std::size_t i = 0; i < detail::kBundledCount; ++i) {
    if (name == detail::kBundled[i].name) return true;
  }
  return false;
}

ArchitectureSpec bundled_architecture(std::string_view name) {
  for (std::size_t i = 0; i < detail::kBundledCount; ++i) {
    if (name == detail::kBundled[i].name) {
      try {
        return parse_architecture(detail::kBundled[i].text);
      } catch (const ConfigError& e) {
        throw InvariantError("bundled architecture '" + std::string(name) + "' is invalid: " + e.what());
      }
    }
  }
  std::string known;
  for (const auto& n : bundled_architectures()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("no bundled architecture named '" + std::string(name) + "' (known: " + known + ")");
}

ArchitectureSpec resolve_architecture(const std::string& name_or_path) {
  if (is_bundled(name_or_path)) return bundled_architecture(name_or_path);
  if (name_or_path.find('/') == std::string::npos && name_or_path.find(".json") == std::string::npos) {
    return bundled_architecture(name_or_path);
  }
  return load_architecture(name_or_path);
}

}  // namespace treesum::arch
