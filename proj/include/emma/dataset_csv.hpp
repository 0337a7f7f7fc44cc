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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emma/core_data.hpp"

namespace emma {

/// A loaded dataset: every row, sorted by timestamp (stable), plus the
/// vocabulary the labels index into.
struct Dataset {
  ActivityVocabulary vocabulary;
  Pool pool;
};

/// Reads the dataset CSV (`subject,timestamp,label,f0,...,f{d-1}`).
///
/// Observation ids are 0-based data-row positions in the file. When
/// `activities` is given it fixes the vocabulary and any other label is an
/// error; otherwise the vocabulary is the sorted set of distinct labels
/// (numerically when every label is an integer).
Dataset read_dataset_csv(std::istream& in,
                         const std::optional<std::vector<std::string>>& activities = {});
Dataset load_dataset_csv(const std::string& path,
                         const std::optional<std::vector<std::string>>& activities = {});

/// Writes rows in pool order using the shortest round-trip decimal form.
void write_dataset_csv(std::ostream& out, const Pool& pool,
                       const ActivityVocabulary& vocabulary);

/// Splits a pool by subject. Each per-subject pool keeps timestamp order.
std::map<std::int64_t, Pool> pools_by_subject(const Pool& pool);

}  // namespace emma
