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

#include "treesum/train/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "treesum/error.hpp"
#include "treesum/format.hpp"

namespace treesum::train {

void write_metrics(const std::vector<MetricsRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("write_metrics: no rows");
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.iter << ',' << shortest(r.epoch) << ',' << shortest(r.lr) << ',' << shortest(r.train_loss) << ',';
    if (r.test_acc) out << shortest(*r.test_acc);
    out << ',' << shortest(r.comm_s) << ',' << shortest(r.total_s) << ',' << shortest(r.wall_s) << '\n';
  }
}

void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("write_metrics: no rows");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write metrics file '" + path + "'");
  write_metrics(rows, f);
  f.flush();
  if (!f) throw IoError("error writing metrics file '" + path + "'");
}

namespace {

template <typename T>
T parse_field(std::string_view text, const std::string& where) {
  T v{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ConfigError(where + ": cannot parse '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::vector<MetricsRow> read_metrics(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ConfigError(source + ": header must be '" + std::string(kMetricsHeader) + "'");
  }
  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const std::string where = source + ":" + std::to_string(lineno);
    if (f.size() != 8) throw ConfigError(where + ": expected 8 fields, got " + std::to_string(f.size()));
    MetricsRow r;
    r.iter = parse_field<std::size_t>(f[0], where);
    r.epoch = parse_field<double>(f[1], where);
    r.lr = parse_field<double>(f[2], where);
    r.train_loss = parse_field<double>(f[3], where);
    if (!f[4].empty()) r.test_acc = parse_field<double>(f[4], where);
    r.comm_s = parse_field<double>(f[5], where);
    r.total_s = parse_field<double>(f[6], where);
    r.wall_s = parse_field<double>(f[7], where);
    if (!rows.empty() && r.iter <= rows.back().iter) {
      throw ConfigError(where + ": iter " + std::to_string(r.iter) + " does not increase");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open metrics file '" + path + "'");
  return read_metrics(f, path);
}

}  // namespace treesum::train
