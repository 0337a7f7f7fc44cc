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

#include "emma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "emma/dataset_csv.hpp"
#include "emma/error.hpp"
#include "emma/text.hpp"

namespace emma {

std::vector<RetentionLevel> comparative_retention_levels() {
  return {{"R1", 0.10}, {"R2", 0.25}, {"R3", 0.70}};
}

std::vector<RetentionLevel> five_retention_levels() {
  return {{"R1", 0.10}, {"R2", 0.20}, {"R3", 0.30}, {"R4", 0.50}, {"R5", 0.70}};
}

void ExperimentConfig::validate() const {
  if (dataset_path.has_value() == synthetic.has_value()) {
    throw ConfigError("config must name exactly one data source: 'dataset' or a [synthetic] section");
  }
  if (synthetic) synthetic->validate();
  if (strategies.empty()) throw ConfigError("strategies: at least one strategy is required");
  if (retention_levels.empty()) throw ConfigError("retention_levels: at least one level is required");
  std::set<std::string> names;
  for (const auto& level : retention_levels) {
    level.validate();
    if (!names.insert(level.name).second) {
      throw ConfigError(fmt::format("retention_levels: duplicate level name '{}'", level.name));
    }
  }
  if (budgets.empty()) throw ConfigError("budgets: at least one budget is required");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] == 0) throw ConfigError("budgets: every budget must be positive");
    if (i > 0 && budgets[i] <= budgets[i - 1]) {
      throw ConfigError("budgets: values must be strictly ascending");
    }
  }
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError(fmt::format("test_fraction must lie in (0, 1), got {}", test_fraction));
  }
  if (!(tq_offset >= 0.0) || !std::isfinite(tq_offset)) {
    throw ConfigError(fmt::format("tq_offset must be >= 0, got {}", tq_offset));
  }
  classifier.validate();
}

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : split_csv_line(value)) {
    std::string t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

double number(const std::string& key, const std::string& value) {
  try {
    return parse_double(trim(value), key, 0);
  } catch (const DataError&) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
  }
}

std::uint64_t integer(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  try {
    const std::int64_t v = parse_int(t, key, 0);
    if (v < 0) throw DataError("negative");
    return static_cast<std::uint64_t>(v);
  } catch (const DataError&) {
    throw ConfigError(fmt::format("{}: expected a non-negative integer, got '{}'", key, value));
  }
}

SyntheticSpec parse_synthetic_section(const pt::ptree& section) {
  SyntheticSpec spec;
  for (const auto& [key, node] : section) {
    const std::string full = "synthetic." + key;
    const std::string value = node.data();
    if (key == "n_classes") spec.n_classes = integer(full, value);
    else if (key == "d") spec.d = integer(full, value);
    else if (key == "m") spec.m = integer(full, value);
    else if (key == "class_separation") spec.class_separation = number(full, value);
    else if (key == "noise_sigma") spec.noise_sigma = number(full, value);
    else if (key == "switch_prob") spec.switch_prob = number(full, value);
    else if (key == "dt") spec.dt = number(full, value);
    else if (key == "seed") spec.seed = integer(full, value);
    else throw ConfigError(fmt::format("unknown config key '{}'", full));
  }
  spec.validate();
  return spec;
}

ClassifierParams parse_classifier_section(const pt::ptree& section) {
  ClassifierParams params;
  for (const auto& [key, node] : section) {
    const std::string full = "classifier." + key;
    if (key == "l2_lambda") params.l2_lambda = number(full, node.data());
    else if (key == "learning_rate") params.learning_rate = number(full, node.data());
    else if (key == "epochs") params.epochs = static_cast<int>(integer(full, node.data()));
    else throw ConfigError(fmt::format("unknown config key '{}'", full));
  }
  return params;
}

pt::ptree read_ini(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  return tree;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
  const std::string text(std::istreambuf_iterator<char>(in), {});
  std::istringstream body(text);
  const pt::ptree tree = read_ini(body);
  ExperimentConfig config;
  // The INI reader drops empty sections; a bare [synthetic] still selects the
  // generator with default settings.
  {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      if (trim(strip_cr(line)) == "[synthetic]") config.synthetic = SyntheticSpec{};
    }
  }
  for (const auto& [key, node] : tree) {
    const std::string value = node.data();
    if (!node.empty()) {
      if (key == "synthetic") config.synthetic = parse_synthetic_section(node);
      else if (key == "classifier") config.classifier = parse_classifier_section(node);
      else throw ConfigError(fmt::format("unknown config section '[{}]'", key));
      continue;
    }
    if (key == "dataset") {
      std::filesystem::path p(trim(value));
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      config.dataset_path = p.string();
    } else if (key == "activities") {
      config.activities = split_list(value);
    } else if (key == "strategies") {
      config.strategies.clear();
      for (const auto& name : split_list(value)) config.strategies.push_back(parse_strategy(name));
    } else if (key == "retention_levels") {
      const std::string t = trim(value);
      if (t == "comparative") {
        config.retention_levels = comparative_retention_levels();
      } else if (t == "five") {
        config.retention_levels = five_retention_levels();
      } else {
        config.retention_levels.clear();
        for (const auto& item : split_list(value)) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) {
            throw ConfigError(fmt::format(
                "retention_levels: expected NAME:TARGET_LOW entries, got '{}'", item));
          }
          config.retention_levels.push_back(
              {trim(item.substr(0, colon)),
               number("retention_levels", item.substr(colon + 1))});
        }
      }
    } else if (key == "budgets") {
      config.budgets.clear();
      for (const auto& item : split_list(value)) config.budgets.push_back(integer("budgets", item));
    } else if (key == "repeats") {
      config.repeats = integer(key, value);
    } else if (key == "init_k") {
      config.init_k = integer(key, value);
    } else if (key == "test_fraction") {
      config.test_fraction = number(key, value);
    } else if (key == "base_seed") {
      config.base_seed = integer(key, value);
    } else if (key == "tq_offset") {
      config.tq_offset = number(key, value);
    } else {
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  return parse_config(in, std::filesystem::path(path).parent_path().string());
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open spec '{}'", path));
  const pt::ptree tree = read_ini(in);
  const auto section = tree.get_child_optional("synthetic");
  if (!section || section->empty()) {
    throw ConfigError(fmt::format("'{}' has no [synthetic] section", path));
  }
  return parse_synthetic_section(*section);
}

namespace {

std::uint64_t as_coord(std::int64_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace

SweepPlan plan_sweep(const ExperimentConfig& config) {
  config.validate();
  Dataset dataset = config.dataset_path
                        ? load_dataset_csv(*config.dataset_path, config.activities)
                        : Dataset{ActivityVocabulary::numbered(config.synthetic->n_classes),
                                  generate(*config.synthetic)};
  if (dataset.pool.empty()) throw DataError("dataset has no observations");

  SweepPlan plan{config, std::move(dataset.vocabulary), {}, {}};
  const std::size_t n_classes = plan.vocabulary.size();
  for (const auto& [subject, pool] : pools_by_subject(dataset.pool)) {
    SubjectPlan ctx;
    ctx.subject = subject;
    ctx.query_time = pool.max_timestamp() + config.tq_offset;
    const double max_lag = ctx.query_time - pool.min_timestamp();
    if (!(max_lag > 0.0)) {
      throw DataError(fmt::format(
          "subject {}: all observations share one timestamp; cannot calibrate memory strength",
          subject));
    }
    for (const auto& level : config.retention_levels) {
      ctx.memories.push_back(calibrate_strength(max_lag, level.target_low));
    }
    for (std::size_t r = 0; r < config.repeats; ++r) {
      RngStream split_rng(derive_seed(config.base_seed, {1, as_coord(subject), r}));
      PoolSplit split;
      try {
        split = split_pool(pool, n_classes, config.test_fraction, split_rng);
      } catch (const DataError& e) {
        throw DataError(fmt::format("subject {}: {}", subject, e.what()));
      }
      const FeatureScaler scaler = FeatureScaler::fit(split.train);
      PreparedRepeat prepared{scaler.transform(split.train), scaler.transform(split.test), {}};
      if (config.init_k > prepared.train.size()) {
        throw DataError(fmt::format("subject {}: init_k {} exceeds the training pool size {}",
                                    subject, config.init_k, prepared.train.size()));
      }
      RngStream init_rng(derive_seed(config.base_seed, {2, as_coord(subject), r}));
      prepared.initial = draw_initial_labels(prepared.train, config.init_k, init_rng);
      ctx.repeats.push_back(std::move(prepared));
    }
    plan.subjects.push_back(std::move(ctx));
  }

  for (std::size_t s = 0; s < plan.subjects.size(); ++s) {
    const std::uint64_t subject = as_coord(plan.subjects[s].subject);
    for (std::size_t l = 0; l < config.retention_levels.size(); ++l) {
      for (std::size_t k = 0; k < config.strategies.size(); ++k) {
        const auto kind = static_cast<std::uint64_t>(config.strategies[k]);
        for (std::size_t b = 0; b < config.budgets.size(); ++b) {
          const std::uint64_t budget = config.budgets[b];
          for (std::size_t r = 0; r < config.repeats; ++r) {
            CellPlan cell{s, l, k, b, r, 0, 0, 0};
            cell.cell_seed = derive_seed(config.base_seed, {3, subject, l, kind, budget, r});
            cell.oracle_seed = derive_seed(config.base_seed, {4, subject, l, budget, r});
            cell.selection_seed = derive_seed(cell.cell_seed, {5});
            plan.cells.push_back(cell);
          }
        }
      }
    }
  }
  return plan;
}

SweepResult execute_plan(const SweepPlan& plan, const SweepOptions& options) {
  const ExperimentConfig& config = plan.config;
  const std::size_t last_budget = config.budgets.size() - 1;
  std::vector<ResultRecord> records(plan.cells.size());
  std::vector<std::vector<double>> curves(plan.cells.size());

  auto run_cell = [&](std::size_t t) {
    const CellPlan& cell = plan.cells[t];
    const SubjectPlan& ctx = plan.subjects[cell.subject_index];
    const PreparedRepeat& prepared = ctx.repeats[cell.repeat];
    const MemoryModel& memory = ctx.memories[cell.level];

    SessionOptions session;
    session.kind = config.strategies[cell.strategy];
    session.budget = config.budgets[cell.budget_index];
    session.query_time = ctx.query_time;
    session.classifier = config.classifier;
    session.oracle_seed = cell.oracle_seed;
    session.selection_seed = cell.selection_seed;
    session.record_accuracy_curve = options.collect_curves && cell.budget_index == last_budget;

    const SessionTrace trace = run_session(session, prepared.train, prepared.test,
                                           plan.vocabulary, memory, prepared.initial);
    ResultRecord& rec = records[t];
    rec.strategy = session.kind;
    rec.retention_name = config.retention_levels[cell.level].name;
    rec.strength_s = memory.strength();
    rec.budget = session.budget;
    rec.repeat = cell.repeat;
    rec.subject = ctx.subject;
    rec.final_accuracy = trace.final_accuracy;
    rec.noisy_fraction = trace.noisy_fraction();
    rec.cum_objective = trace.total_objective();
    rec.queries = trace.queries();
    rec.seed = cell.cell_seed;
    if (session.record_accuracy_curve) curves[t] = trace.accuracy_curve;
  };

  const std::size_t total = plan.cells.size();
  unsigned workers = options.jobs != 0 ? options.jobs : std::thread::hardware_concurrency();
  workers = std::max(1u, static_cast<unsigned>(std::min<std::size_t>(workers, total)));
  if (workers == 1) {
    for (std::size_t t = 0; t < total; ++t) run_cell(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    {
      std::vector<std::jthread> threads;
      for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
          for (std::size_t t = next++; t < total && !failed; t = next++) {
            try {
              run_cell(t);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  SweepResult result;
  result.records = std::move(records);
  for (std::size_t t = 0; t < total; ++t) {
    const ResultRecord& rec = result.records[t];
    for (std::size_t q = 0; q < curves[t].size(); ++q) {
      result.curves.push_back(
          {rec.strategy, rec.retention_name, rec.repeat, rec.subject, q + 1, curves[t][q]});
    }
  }
  return result;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  return execute_plan(plan_sweep(config), options);
}

std::vector<AggregateRow> aggregate(std::span<const ResultRecord> records) {
  if (records.empty()) throw DataError("cannot aggregate an empty result set");
  using Key = std::tuple<int, std::string, std::size_t>;
  std::map<Key, std::vector<const ResultRecord*>> groups;
  for (const auto& rec : records) {
    groups[{static_cast<int>(rec.strategy), rec.retention_name, rec.budget}].push_back(&rec);
  }

  std::vector<AggregateRow> rows;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const ResultRecord* a, const ResultRecord* b) {
      return std::tie(a->subject, a->repeat, a->seed) < std::tie(b->subject, b->repeat, b->seed);
    });
    AggregateRow row;
    row.strategy = static_cast<StrategyKind>(std::get<0>(key));
    row.retention_name = std::get<1>(key);
    row.budget = std::get<2>(key);
    row.records = members.size();

    double mean_sum = 0.0;
    double std_sum = 0.0;
    double noisy_sum = 0.0;
    for (std::size_t i = 0; i < members.size();) {
      std::size_t j = i;
      while (j < members.size() && members[j]->subject == members[i]->subject) ++j;
      const double count = static_cast<double>(j - i);
      double acc = 0.0;
      double noisy = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        acc += members[k]->final_accuracy;
        noisy += members[k]->noisy_fraction;
      }
      const double mean = acc / count;
      double var = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        const double dev = members[k]->final_accuracy - mean;
        var += dev * dev;
      }
      mean_sum += mean;
      std_sum += std::sqrt(var / count);
      noisy_sum += noisy / count;
      ++row.subjects;
      i = j;
    }
    const double subjects = static_cast<double>(row.subjects);
    row.mean_accuracy = mean_sum / subjects;
    row.std_accuracy = std_sum / subjects;
    row.mean_noisy_fraction = noisy_sum / subjects;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

constexpr const char* kResultsHeader =
    "strategy,retention,strength_s,budget,repeat,subject,final_accuracy,noisy_fraction,"
    "cum_objective,queries,seed";

}  // namespace

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.strategy),
                       r.retention_name, r.strength_s, r.budget, r.repeat, r.subject,
                       r.final_accuracy, r.noisy_fraction, r.cum_objective, r.queries, r.seed);
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("line 1: results CSV is empty");
  if (strip_cr(line) != kResultsHeader) {
    throw DataError(fmt::format("line 1: expected header '{}'", kResultsHeader));
  }
  std::vector<ResultRecord> records;
  std::size_t line_no = 1;
  auto unsigned_field = [&](const std::string& text, const char* field) {
    const std::int64_t v = parse_int(text, field, line_no);
    if (v < 0) throw DataError(fmt::format("line {}: field '{}' must be >= 0", line_no, field));
    return static_cast<std::size_t>(v);
  };
  auto unit_field = [&](const std::string& text, const char* field) {
    const double v = parse_double(text, field, line_no);
    if (v < 0.0 || v > 1.0) {
      throw DataError(fmt::format("line {}: field '{}' must lie in [0, 1]", line_no, field));
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 11) {
      throw DataError(fmt::format("line {}: expected 11 fields, found {}", line_no, cells.size()));
    }
    ResultRecord r;
    try {
      r.strategy = parse_strategy(cells[0]);
    } catch (const ConfigError& e) {
      throw DataError(fmt::format("line {}: field 'strategy': {}", line_no, e.what()));
    }
    if (cells[1].empty()) throw DataError(fmt::format("line {}: field 'retention' is empty", line_no));
    r.retention_name = cells[1];
    r.strength_s = parse_double(cells[2], "strength_s", line_no);
    r.budget = unsigned_field(cells[3], "budget");
    r.repeat = unsigned_field(cells[4], "repeat");
    r.subject = parse_int(cells[5], "subject", line_no);
    r.final_accuracy = unit_field(cells[6], "final_accuracy");
    r.noisy_fraction = unit_field(cells[7], "noisy_fraction");
    r.cum_objective = parse_double(cells[8], "cum_objective", line_no);
    r.queries = unsigned_field(cells[9], "queries");
    std::uint64_t seed = 0;
    {
      const std::string& s = cells[10];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(fmt::format("line {}: field 'seed' is not an unsigned integer", line_no));
      }
    }
    r.seed = seed;
    if (r.queries > r.budget) {
      throw DataError(fmt::format("line {}: queries exceed budget", line_no));
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_curves_csv(std::ostream& out, std::span<const CurvePoint> curves) {
  out << "strategy,retention,repeat,subject,query_index,accuracy\n";
  for (const auto& c : curves) {
    out << fmt::format("{},{},{},{},{},{}\n", to_string(c.strategy), c.retention_name, c.repeat,
                       c.subject, c.query_index, c.accuracy);
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "strategy,retention,budget,mean_accuracy,std_accuracy,mean_noisy_fraction,subjects,"
         "records\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", to_string(r.strategy), r.retention_name,
                       r.budget, r.mean_accuracy, r.std_accuracy, r.mean_noisy_fraction,
                       r.subjects, r.records);
  }
}

std::string format_summary(std::span<const AggregateRow> rows) {
  std::ostringstream out;
  out << fmt::format("{:<8} {:<10} {:>7} {:>9} {:>8} {:>7}\n", "strategy", "retention", "budget",
                     "mean_acc", "std", "noisy");
  for (const auto& r : rows) {
    out << fmt::format("{:<8} {:<10} {:>7} {:>9.4f} {:>8.4f} {:>7.3f}\n", to_string(r.strategy),
                       r.retention_name, r.budget, r.mean_accuracy, r.std_accuracy,
                       r.mean_noisy_fraction);
  }
  return out.str();
}

}  // namespace emma
