// Copyright 2026 The EMMA Authors.
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

#include "emma/dataset_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "emma/error.hpp"
#include "emma/text.hpp"

namespace emma {
namespace {

struct RawRow {
  std::int64_t subject;
  double timestamp;
  std::string label;
  std::vector<double> features;
};

bool all_integers(const std::set<std::string>& labels) {
  return std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
  });
}

}  // namespace

Dataset read_dataset_csv(std::istream& in,
                         const std::optional<std::vector<std::string>>& activities) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset CSV is empty (line 1)");
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() < 4 || header[0] != "subject" || header[1] != "timestamp" ||
      header[2] != "label") {
    throw DataError("line 1: header must start with subject,timestamp,label,f0");
  }
  const std::size_t d = header.size() - 3;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[3 + j] != fmt::format("f{}", j)) {
      throw DataError(fmt::format("line 1: expected column 'f{}', found '{}'", j, header[3 + j]));
    }
  }

  std::vector<RawRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                  header.size(), cells.size()));
    }
    RawRow row;
    row.subject = parse_int(cells[0], "subject", line_no);
    row.timestamp = parse_double(cells[1], "timestamp", line_no);
    if (row.timestamp < 0.0) {
      throw DataError(fmt::format("line {}: timestamp must be >= 0", line_no));
    }
    row.label = cells[2];
    if (row.label.empty()) throw DataError(fmt::format("line {}: empty label", line_no));
    row.features.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
      row.features.push_back(parse_double(cells[3 + j], header[3 + j], line_no));
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::string> names;
  if (activities) {
    names = *activities;
  } else {
    std::set<std::string> distinct;
    for (const auto& r : rows) distinct.insert(r.label);
    names.assign(distinct.begin(), distinct.end());
    if (all_integers(distinct)) {
      std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
        return std::stoll(a) < std::stoll(b);
      });
    }
  }
  ActivityVocabulary vocabulary(std::move(names));

  std::vector<Observation> observations;
  observations.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Observation obs;
    obs.features = std::move(rows[i].features);
    obs.timestamp = rows[i].timestamp;
    obs.subject = rows[i].subject;
    obs.id = static_cast<ObservationId>(i);
    try {
      obs.true_label = vocabulary.index_of(rows[i].label);
    } catch (const DataError&) {
      throw DataError(fmt::format("data row {}: label '{}' is not in the activity vocabulary",
                                  i + 1, rows[i].label));
    }
    observations.push_back(std::move(obs));
  }
  std::stable_sort(observations.begin(), observations.end(),
                   [](const Observation& a, const Observation& b) {
                     return a.timestamp < b.timestamp;
                   });
  return {std::move(vocabulary), Pool(std::move(observations), d)};
}

Dataset load_dataset_csv(const std::string& path,
                         const std::optional<std::vector<std::string>>& activities) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open dataset '{}'", path));
  return read_dataset_csv(in, activities);
}

void write_dataset_csv(std::ostream& out, const Pool& pool,
                       const ActivityVocabulary& vocabulary) {
  out << "subject,timestamp,label";
  for (std::size_t j = 0; j < pool.dimension(); ++j) out << ",f" << j;
  out << '\n';
  for (const auto& obs : pool) {
    out << fmt::format("{},{},{}", obs.subject, obs.timestamp, vocabulary.name(obs.true_label));
    for (double f : obs.features) out << fmt::format(",{}", f);
    out << '\n';
  }
}

std::map<std::int64_t, Pool> pools_by_subject(const Pool& pool) {
  std::map<std::int64_t, std::vector<Observation>> grouped;
  for (const auto& obs : pool) grouped[obs.subject].push_back(obs);
  std::map<std::int64_t, Pool> out;
  for (auto& [subject, observations] : grouped) {
    out.emplace(subject, Pool(std::move(observations), pool.dimension()));
  }
  return out;
}

}  // namespace emma
