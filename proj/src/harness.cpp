#include "saea/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "saea/error.hpp"
#include "saea/metrics.hpp"
#include "saea/moea.hpp"

namespace saea {

namespace fs = std::filesystem;

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSaeame:
      return "saeame";
    case Algorithm::kNsga2Budget:
      return "nsga2-budget";
    case Algorithm::kRandomSearch:
      return "random-search";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kSaeame, Algorithm::kNsga2Budget, Algorithm::kRandomSearch})
    if (to_string(a) == name) return a;
  raise(ErrorCode::kConfigError, "unknown algorithm '" + std::string(name) + "'");
}

DimSettings ExperimentConfig::settings_for(std::size_t n) const {
  const auto it = per_dim.find(n);
  if (it == per_dim.end()) {
    raise(ErrorCode::kConfigError, "no pop/budget settings for n=" + std::to_string(n) + " (set pop." +
                                       std::to_string(n) + " and budget." + std::to_string(n) + ")");
  }
  DimSettings s = it->second;
  if (budget_override > 0) s.budget = budget_override;
  return s;
}

SaeaConfig ExperimentConfig::saea_for(std::size_t n) const {
  const DimSettings s = settings_for(n);
  SaeaConfig c = saea;
  c.budget = s.budget;
  if (c.inner_pop == 0) c.inner_pop = s.pop_size;
  return c;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    raise(ErrorCode::kConfigError, "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

template <class F>
auto config_guard(std::string_view key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    raise(ErrorCode::kConfigError, "key '" + std::string(key) + "': " + e.what());
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// Shifted by the first value so identical samples give exactly zero.
double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x - v.front();
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - v.front() - mean) * (x - v.front() - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void finish_archive(RunRecord& record) {
  std::vector<ObjectiveVector> objs;
  for (const auto& e : record.log) objs.push_back(e.f);
  record.archive.clear();
  for (std::size_t idx : nondominated_indices(objs)) record.archive.push_back(record.log[idx].fe_index);
}

}  // namespace

void apply_experiment_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  if (key == "problems") {
    c.problems.clear();
    for (const auto& p : split_list(value)) c.problems.push_back(config_guard(key, [&] { return parse_problem_id(p); }));
    if (c.problems.empty()) raise(ErrorCode::kConfigError, "key 'problems' is empty");
  } else if (key == "dims") {
    c.dims.clear();
    for (const auto& d : split_list(value)) c.dims.push_back(static_cast<std::size_t>(to_u64(key, d)));
    if (c.dims.empty()) raise(ErrorCode::kConfigError, "key 'dims' is empty");
  } else if (key == "algorithms") {
    c.algorithms.clear();
    for (const auto& a : split_list(value)) {
      try {
        c.algorithms.push_back(parse_algorithm(a));
      } catch (const Error& e) {
        raise(ErrorCode::kConfigError, "key 'algorithms': " + std::string(e.what()));
      }
    }
    if (c.algorithms.empty()) raise(ErrorCode::kConfigError, "key 'algorithms' is empty");
  } else if (key == "repeats") {
    c.repeats = static_cast<std::size_t>(to_u64(key, value));
    if (c.repeats == 0) raise(ErrorCode::kConfigError, "key 'repeats' must be at least 1");
  } else if (key == "base_seed" || key == "seed") {
    c.base_seed = to_u64(key, value);
  } else if (key == "pf_points") {
    c.pf_points = static_cast<std::size_t>(to_u64(key, value));
    if (c.pf_points < 2) raise(ErrorCode::kConfigError, "key 'pf_points' must be at least 2");
  } else if (key == "budget") {
    c.budget_override = static_cast<std::size_t>(to_u64(key, value));
  } else if (key.rfind("pop.", 0) == 0 || key.rfind("budget.", 0) == 0) {
    const bool is_pop = key[0] == 'p';
    const auto n = static_cast<std::size_t>(to_u64(key, key.substr(is_pop ? 4 : 7)));
    const auto v = static_cast<std::size_t>(to_u64(key, value));
    auto [it, inserted] = c.per_dim.try_emplace(n, DimSettings{0, 0});
    (is_pop ? it->second.pop_size : it->second.budget) = v;
  } else if (!apply_config_value(c.saea, key, value)) {
    raise(ErrorCode::kConfigError, "unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      raise(ErrorCode::kConfigError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_experiment_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (std::size_t n : c.dims) {
    const DimSettings s = c.settings_for(n);
    if (s.pop_size == 0 || s.pop_size % 2 != 0) {
      raise(ErrorCode::kConfigError, "key 'pop." + std::to_string(n) + "' must be a positive even number");
    }
    if (s.budget == 0) raise(ErrorCode::kConfigError, "key 'budget." + std::to_string(n) + "' must be positive");
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoError, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig c = parse_experiment_config(buf.str());
  if (const char* env = std::getenv("SAEA_SEED"); env && *env) c.base_seed = to_u64("SAEA_SEED", env);
  return c;
}

RunRecord random_search_baseline(const Problem& problem, std::size_t budget, std::uint64_t seed) {
  require(budget >= 1, "random search needs a positive budget");
  Rng rng(seed);
  RunRecord r;
  r.problem = std::string(problem.name());
  r.n = problem.num_variables();
  r.m = problem.num_objectives();
  r.algorithm = std::string(to_string(Algorithm::kRandomSearch));
  r.seed = seed;
  r.config = {{"budget", std::to_string(budget)}};
  const Bounds& b = problem.bounds();
  for (std::size_t i = 0; i < budget; ++i) {
    DecisionVector x(r.n);
    for (std::size_t j = 0; j < r.n; ++j) x[j] = rng.uniform(b.lower[j], b.upper[j]);
    ObjectiveVector f = problem.evaluate(x);
    r.log.push_back({0, i, std::move(x), std::move(f)});
  }
  finish_archive(r);
  return r;
}

RunRecord nsga2_budget_baseline(const Problem& problem, std::size_t budget, std::size_t pop_size,
                                std::uint64_t seed) {
  require(budget >= 1, "NSGA-II baseline needs a positive budget");
  Rng rng(seed);
  RunRecord r;
  r.problem = std::string(problem.name());
  r.n = problem.num_variables();
  r.m = problem.num_objectives();
  r.algorithm = std::string(to_string(Algorithm::kNsga2Budget));
  r.seed = seed;
  const std::size_t generations = (budget + pop_size - 1) / pop_size - 1;
  r.config = {{"budget", std::to_string(budget)},
              {"pop_size", std::to_string(pop_size)},
              {"generations", std::to_string(generations)}};

  std::size_t batch = 0;
  const BatchObjective objective = [&](const std::vector<DecisionVector>& xs) {
    std::vector<ObjectiveVector> out;
    for (const auto& x : xs) {
      if (r.log.size() >= budget) {
        out.emplace_back(r.m, std::numeric_limits<double>::infinity());
        continue;
      }
      out.push_back(problem.evaluate(x));
      r.log.push_back({batch, r.log.size(), x, out.back()});
    }
    ++batch;
    return out;
  };
  nsga2_optimize(objective, problem.bounds(), Nsga2Config{pop_size, generations}, rng);
  finish_archive(r);
  return r;
}

RunRecord execute_run(const Problem& problem, Algorithm algorithm, const ExperimentConfig& config,
                      std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = problem.num_variables();
  const DimSettings settings = config.settings_for(n);
  RunRecord record;
  switch (algorithm) {
    case Algorithm::kSaeame:
      record = run_saeame(problem, config.saea_for(n), seed).record;
      break;
    case Algorithm::kNsga2Budget:
      record = nsga2_budget_baseline(problem, settings.budget, settings.pop_size, seed);
      break;
    case Algorithm::kRandomSearch:
      record = random_search_baseline(problem, settings.budget, seed);
      break;
  }
  record.config.emplace_back("pf_points", std::to_string(config.pf_points));
  const auto archive = record.archive_objectives();
  if (!archive.empty()) record.igd = igd(archive, reference_front(problem, config.pf_points));
  record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::string record_filename(std::string_view problem, std::size_t n, std::string_view algorithm, std::size_t repeat) {
  return std::string(problem) + "_n" + std::to_string(n) + "_" + std::string(algorithm) + "_r" +
         std::to_string(repeat) + ".csv";
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const fs::path& out_dir, bool force,
                                 std::size_t workers) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) raise(ErrorCode::kIoError, "cannot create output directory " + out_dir.string());
  {
    const fs::path probe = out_dir / ".write-test";
    std::ofstream out(probe);
    if (!out) raise(ErrorCode::kIoError, "output directory " + out_dir.string() + " is not writable");
    out.close();
    fs::remove(probe, ec);
  }

  struct Job {
    ProblemId problem;
    std::size_t n;
    Algorithm algorithm;
    std::size_t repeat;
    fs::path path;
  };
  std::vector<Job> jobs;
  ExperimentOutcome outcome;
  for (ProblemId p : config.problems) {
    for (std::size_t n : config.dims) {
      config.settings_for(n);
      for (Algorithm a : config.algorithms) {
        for (std::size_t rep = 0; rep < config.repeats; ++rep) {
          fs::path path = out_dir / record_filename(to_string(p), n, to_string(a), rep);
          outcome.records.push_back(path);
          if (!force && fs::exists(path)) {
            ++outcome.skipped;
            continue;
          }
          jobs.push_back({p, n, a, rep, std::move(path)});
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& job = jobs[i];
        const Problem problem(job.problem, job.n);
        const RunRecord record = execute_run(problem, job.algorithm, config, config.base_seed + job.repeat);
        write_record(record, job.path);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  outcome.computed = jobs.size();
  return outcome;
}

std::vector<SummaryRow> summarize_records(const std::vector<RunRecord>& records, std::string_view reference) {
  struct Cell {
    std::string problem;
    std::size_t n;
    std::string algorithm;
    std::vector<double> igds;
  };
  std::vector<Cell> cells;
  for (const auto& r : records) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
      return c.problem == r.problem && c.n == r.n && c.algorithm == r.algorithm;
    });
    if (it == cells.end()) {
      cells.push_back({r.problem, r.n, r.algorithm, {}});
      it = std::prev(cells.end());
    }
    if (r.igd) it->igds.push_back(*r.igd);
  }
  std::sort(cells.begin(), cells.end(), [&](const Cell& a, const Cell& b) {
    if (a.problem != b.problem) return a.problem < b.problem;
    if (a.n != b.n) return a.n < b.n;
    const bool ra = a.algorithm == reference, rb = b.algorithm == reference;
    if (ra != rb) return ra;
    return a.algorithm < b.algorithm;
  });

  std::vector<SummaryRow> rows;
  for (const auto& cell : cells) {
    if (cell.igds.empty()) continue;
    SummaryRow row{cell.problem, cell.n, cell.algorithm, median(cell.igds), sample_std(cell.igds), cell.igds.size(), ""};
    if (cell.algorithm != reference) {
      const auto ref = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
        return c.problem == cell.problem && c.n == cell.n && c.algorithm == reference;
      });
      if (ref != cells.end() && ref->igds.size() >= 5 && cell.igds.size() >= 5) {
        const RankSumResult test = wilcoxon_rank_sum(ref->igds, cell.igds);
        if (test.significant) row.marker = test.direction == ShiftDirection::kALower ? "†" : "‡";
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "problem,n,algorithm,median_igd,std_igd,marker\n";
  for (const auto& r : rows) {
    out << r.problem << ',' << r.n << ',' << r.algorithm << ',' << format_number(r.median_igd) << ','
        << format_number(r.std_igd) << ',' << r.marker << '\n';
  }
  return out.str();
}

std::vector<RunRecord> load_records(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) raise(ErrorCode::kIoError, "no results directory " + results_dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(results_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<RunRecord> records;
  for (const auto& p : paths) {
    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    if (first.rfind("# saea-run-record", 0) != 0) continue;
    records.push_back(read_record(p));
  }
  return records;
}

std::vector<SummaryRow> summarize(const fs::path& results_dir, const fs::path& out_path) {
  const auto records = load_records(results_dir);
  if (records.empty()) raise(ErrorCode::kIoError, "no run records in " + results_dir.string());
  auto rows = summarize_records(records);
  if (rows.empty()) raise(ErrorCode::kIoError, "no completed runs with an IGD value in " + results_dir.string());
  write_file_atomic(out_path, format_summary(rows));
  return rows;
}

void emit_front_csv(const RunRecord& record, const fs::path& out_path, std::size_t pf_points) {
  const auto archive = record.archive_objectives();
  require(!archive.empty(), "run record has an empty archive");
  const Problem problem(parse_problem_id(record.problem), record.n, record.m);
  const auto front = reference_front(problem, pf_points);

  std::ostringstream out;
  out << "label";
  for (std::size_t j = 1; j <= record.m; ++j) out << ",f" << j;
  out << '\n';
  const auto emit = [&](std::string_view label, const ObjectiveVector& f) {
    out << label;
    for (double v : f) out << ',' << format_number(v);
    out << '\n';
  };
  for (const auto& f : archive) emit("archive", f);
  for (const auto& f : front.points) emit("pf", f);
  write_file_atomic(out_path, out.str());
}

}  // namespace saea
