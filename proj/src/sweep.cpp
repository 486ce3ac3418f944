#include "rakelink/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rakelink/hash.hpp"

namespace rakelink {
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Grid

void BoundsGrid::validate() const {
  auto check = [](const std::vector<double>& values, const char* name, bool strictly_positive) {
    if (values.empty()) throw ValidationError(ErrorCode::InvalidGrid, name, std::string(name) + " list is empty");
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double v = values[k];
      if (std::isnan(v) || v < 0.0 || (strictly_positive && v == 0.0))
        throw ValidationError(ErrorCode::InvalidGrid, name, std::string(name) + " contains an invalid value");
      if (k > 0 && !(values[k - 1] < v))
        throw ValidationError(ErrorCode::InvalidGrid, name, std::string(name) + " must be strictly ascending");
    }
  };
  check(w_min_values, "w_min", false);
  check(w_max_values, "w_max", false);
  check(d_max_values, "d_max", false);
  check(v_values, "v_avg_max", true);
}

BoundsGrid BoundsGrid::paper() {
  BoundsGrid g;
  g.w_min_values = {0, 60, 120, 180, 240, 300, kInf};
  for (int w = 360; w <= 3600; w += 60) g.w_max_values.push_back(w);
  g.w_max_values.push_back(kInf);
  g.d_max_values = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 51, kInf};
  g.v_values = {10, 20, 30, 40, 50, 60, kInf};
  return g;
}

json to_json(const BoundsGrid& g) {
  auto list = [](const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(bound_to_json(v));
    return arr;
  };
  return json{{"w_min", list(g.w_min_values)},
              {"w_max", list(g.w_max_values)},
              {"d_max", list(g.d_max_values)},
              {"v_avg_max", list(g.v_values)}};
}

BoundsGrid grid_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "paper") return BoundsGrid::paper();
  if (!j.is_object()) throw ValidationError(ErrorCode::InvalidGrid, "grid", "grid must be an object or \"paper\"");
  auto list = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
      throw ValidationError(ErrorCode::InvalidGrid, key, std::string("grid.") + key + " must be an array");
    std::vector<double> out;
    for (const json& v : j.at(key)) out.push_back(bound_from_json(v, key));
    return out;
  };
  BoundsGrid g{list("w_min"), list("w_max"), list("d_max"), list("v_avg_max")};
  g.validate();
  return g;
}

std::vector<Bounds> generate_grid(const BoundsGrid& g) {
  g.validate();
  std::vector<Bounds> out;
  for (double w_min : g.w_min_values)
    for (double w_max : g.w_max_values) {
      if (!(w_max > w_min)) continue;
      for (double d_max : g.d_max_values)
        for (double v : g.v_values) out.push_back({w_min, w_max, d_max, v});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Records

json to_json(const SweepRecord& r) {
  json out{{"bounds", to_json(r.bounds)}};
  if (r.ok()) {
    out["objectives"] = to_json(*r.objectives);
    out["solution_ref"] = r.solution_ref;
  } else {
    out["error"] = r.error;
  }
  return out;
}

SweepRecord record_from_json(const json& j, std::size_t index) {
  SweepRecord r;
  r.index = index;
  r.bounds = bounds_from_json(j.at("bounds"));
  if (j.contains("objectives")) {
    r.objectives = objectives_from_json(j.at("objectives"));
    r.solution_ref = j.at("solution_ref").get<std::string>();
  } else {
    r.error = j.value("error", std::string("unknown error"));
  }
  return r;
}

std::string manifest_line(const SweepRecord& r) { return to_json(r).dump(); }

std::string sweep_run_id(const Timetable& tt, const Topology& topo, const BoundsGrid& grid) {
  const json identity{{"timetable", to_json(tt)}, {"topology", to_json(topo)}, {"grid", to_json(grid)}};
  return content_hash(identity.dump());
}

std::pair<SweepRecord, std::string> solve_record(const Timetable& tt, const Topology& topo, const Bounds& b,
                                                 std::size_t index) {
  SweepRecord r;
  r.index = index;
  r.bounds = b;
  std::string solution;
  try {
    const CoverSolution sol = min_fleet(tt, topo, b);
    r.objectives = evaluate(sol, tt, topo);
    solution = cover_to_json(sol, tt, /*include_bounds=*/false).dump();
    r.solution_ref = content_hash(solution);
  } catch (const std::exception& e) {
    r.objectives.reset();
    r.error = e.what();
    solution.clear();
  }
  return {std::move(r), std::move(solution)};
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs != 0) return jobs;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace

SweepManifest run_sweep(const Timetable& tt, const Topology& topo, const BoundsGrid& grid,
                        const SweepOptions& options) {
  const std::vector<Bounds> combos = generate_grid(grid);
  const std::size_t total = combos.size();
  if (options.completed.size() > total)
    throw ValidationError(ErrorCode::InvalidGrid, "manifest", "existing manifest is longer than the grid");
  for (std::size_t k = 0; k < options.completed.size(); ++k)
    if (options.completed[k].bounds != combos[k])
      throw ValidationError(ErrorCode::InvalidGrid, "manifest", "existing manifest does not match the grid");

  SweepManifest manifest;
  manifest.run_id = sweep_run_id(tt, topo, grid);
  manifest.created_at = utc_timestamp();
  manifest.records = options.completed;
  manifest.records.reserve(total);

  const std::size_t first = options.completed.size();
  std::vector<std::optional<std::pair<SweepRecord, std::string>>> slots(total - first);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{first};
  const std::size_t workers = std::min(resolve_jobs(options.jobs), std::max<std::size_t>(1, total - first));
  std::size_t active = workers;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = options.stop.stop_requested() ? total : next.fetch_add(1);
      if (i >= total) break;
      auto result = solve_record(tt, topo, combos[i], i);
      {
        std::lock_guard lock(mutex);
        slots[i - first] = std::move(result);
      }
      ready.notify_one();
    }
    {
      std::lock_guard lock(mutex);
      --active;
    }
    ready.notify_one();
  };

  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

    // Single writer: emit strictly in grid order.
    for (std::size_t i = first; i < total; ++i) {
      std::pair<SweepRecord, std::string> result;
      {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return slots[i - first].has_value() || active == 0; });
        if (!slots[i - first]) break;  // stopped early; the written prefix stays contiguous
        result = std::move(*slots[i - first]);
        slots[i - first].reset();
      }
      if (options.on_record) options.on_record(result.first, result.second);
      if (options.keep_solutions && result.first.ok()) manifest.solutions.try_emplace(result.first.solution_ref, std::move(result.second));
      manifest.records.push_back(std::move(result.first));
    }
  }
  return manifest;
}

// ---------------------------------------------------------------------------
// Persistence

std::vector<SweepRecord> load_manifest_prefix(const fs::path& manifest_path, const std::vector<Bounds>& expected) {
  std::vector<SweepRecord> out;
  std::ifstream in(manifest_path);
  if (!in) return out;
  std::string line;
  while (out.size() < expected.size() && std::getline(in, line)) {
    if (line.empty()) break;
    try {
      SweepRecord r = record_from_json(json::parse(line), out.size());
      if (r.bounds != expected[out.size()]) break;
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      break;  // torn final line from an interrupted run
    }
  }
  return out;
}

fs::path run_sweep_to_directory(const Timetable& tt, const Topology& topo, const BoundsGrid& grid,
                                const fs::path& root, std::size_t jobs,
                                const std::function<void(std::size_t, std::size_t)>& progress, std::stop_token stop) {
  const std::vector<Bounds> combos = generate_grid(grid);
  const std::string run_id = sweep_run_id(tt, topo, grid);
  const fs::path dir = root / run_id;
  const fs::path manifest_path = dir / "manifest.jsonl";
  const fs::path solutions_dir = dir / "solutions";
  fs::create_directories(solutions_dir);

  SweepOptions options;
  options.jobs = jobs;
  options.keep_solutions = false;
  options.stop = stop;
  options.completed = load_manifest_prefix(manifest_path, combos);

  json meta{{"run_id", run_id},
            {"created_at", utc_timestamp()},
            {"grid", to_json(grid)},
            {"total", combos.size()},
            {"status", "running"}};
  if (fs::exists(dir / "meta.json")) {
    try {
      meta["created_at"] = json::parse(read_file(dir / "meta.json")).at("created_at");
    } catch (const std::exception&) {
    }
  }
  write_file(dir / "meta.json", meta.dump(2) + "\n");

  // Rewrite the surviving prefix, dropping any torn tail, then append.
  {
    std::string prefix;
    for (const SweepRecord& r : options.completed) prefix += manifest_line(r) + "\n";
    write_file(manifest_path, prefix);
  }
  std::ofstream out(manifest_path, std::ios::app | std::ios::binary);
  std::size_t done = options.completed.size();
  if (progress) progress(done, combos.size());

  options.on_record = [&](const SweepRecord& r, const std::string& solution) {
    if (r.ok()) {
      const fs::path file = solutions_dir / (r.solution_ref + ".json");
      if (!fs::exists(file)) write_file(file, solution);
    }
    out << manifest_line(r) << '\n';
    out.flush();
    ++done;
    if (progress) progress(done, combos.size());
  };
  const SweepManifest result = run_sweep(tt, topo, grid, options);
  out.close();
  if (result.records.size() < combos.size()) return dir;

  meta["status"] = "done";
  write_file(dir / "meta.json", meta.dump(2) + "\n");
  return dir;
}

SweepManifest load_manifest(const fs::path& path) {
  fs::path manifest_path = path;
  if (fs::is_directory(path)) manifest_path = path / "manifest.jsonl";
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path.string() + "'");

  SweepManifest m;
  m.run_id = manifest_path.parent_path().filename().string();
  const fs::path meta = manifest_path.parent_path() / "meta.json";
  if (fs::exists(meta)) {
    try {
      const json j = json::parse(read_file(meta));
      m.run_id = j.value("run_id", m.run_id);
      m.created_at = j.value("created_at", std::string());
    } catch (const json::exception&) {
    }
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      m.records.push_back(record_from_json(json::parse(line), m.records.size()));
    } catch (const json::exception& e) {
      throw ValidationError(ErrorCode::ParseError, "line " + std::to_string(line_no),
                            "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Queries

std::vector<SweepRecord> filter_records(const std::vector<SweepRecord>& records, const RecordPredicate& pred) {
  if (!pred) return records;
  std::vector<SweepRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), pred);
  return out;
}

namespace {

enum class Op { Eq, Ne, Lt, Le, Gt, Ge };

std::optional<double> field_value(const SweepRecord& r, int field) {
  switch (field) {
    case 0: return r.bounds.w_min;
    case 1: return r.bounds.w_max;
    case 2: return r.bounds.d_max;
    case 3: return r.bounds.v_avg_max;
    default:
      if (!r.ok()) return std::nullopt;
      return r.objectives->as_array()[static_cast<std::size_t>(field - 4)];
  }
}

bool compare(double a, Op op, double b) {
  switch (op) {
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
  }
  return false;
}

}  // namespace

RecordPredicate parse_filter(const std::string& expression, const std::vector<SweepRecord>& records) {
  static const std::array<std::string, 9> kFields = {"w_min", "w_max", "d_max", "v_avg_max", "f1",
                                                     "f2",    "f3",    "f4",    "f5"};
  struct Clause {
    int field;
    Op op;
    double value;
  };
  std::vector<Clause> clauses;

  std::stringstream ss(expression);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part.erase(std::remove_if(part.begin(), part.end(), [](char c) { return c == ' ' || c == '\t'; }), part.end());
    if (part.empty()) continue;
    const std::size_t pos = part.find_first_of("=!<>");
    if (pos == std::string::npos || pos == 0)
      throw ValidationError(ErrorCode::ParseError, part, "filter clause '" + part + "' has no operator");
    const std::string name = part.substr(0, pos);
    std::size_t len = 1;
    if (pos + 1 < part.size() && part[pos + 1] == '=') len = 2;
    const std::string op_text = part.substr(pos, len);
    const std::string value_text = part.substr(pos + len);

    auto it = std::find(kFields.begin(), kFields.end(), name);
    if (it == kFields.end())
      throw ValidationError(ErrorCode::ParseError, name, "unknown filter field '" + name + "'");
    const int field = static_cast<int>(it - kFields.begin());

    Op op;
    if (op_text == "=" || op_text == "==") op = Op::Eq;
    else if (op_text == "!=") op = Op::Ne;
    else if (op_text == "<") op = Op::Lt;
    else if (op_text == "<=") op = Op::Le;
    else if (op_text == ">") op = Op::Gt;
    else if (op_text == ">=") op = Op::Ge;
    else throw ValidationError(ErrorCode::ParseError, op_text, "unknown filter operator '" + op_text + "'");

    double value;
    if (value_text == "min" || value_text == "max") {
      std::optional<double> best;
      for (const SweepRecord& r : records) {
        auto v = field_value(r, field);
        if (!v) continue;
        if (!best || (value_text == "min" ? *v < *best : *v > *best)) best = v;
      }
      value = best.value_or(std::nan(""));
    } else {
      value = parse_bound(value_text);
    }
    clauses.push_back({field, op, value});
  }

  return [clauses](const SweepRecord& r) {
    for (const Clause& c : clauses) {
      auto v = field_value(r, c.field);
      if (!v || !compare(*v, c.op, c.value)) return false;
    }
    return true;
  };
}

ImprovementReport improvement_report(const std::vector<SweepRecord>& records, const ObjectiveVector& baseline) {
  ImprovementReport report;
  const auto base = baseline.as_array();
  for (const SweepRecord& r : records) {
    if (!r.ok()) continue;
    const auto v = r.objectives->as_array();
    unsigned better = 0;
    for (unsigned k = 0; k < 5; ++k)
      if (v[k] < base[k]) better |= 1u << k;
    // every subset of the strictly-better set counts this record
    for (unsigned mask = 1; mask < 32; ++mask)
      if ((mask & better) == mask) ++report.counts[mask];
    if (better == 31u) report.dominating.push_back(r.index);
  }
  return report;
}

std::string subset_name(unsigned mask) {
  std::string out;
  for (unsigned k = 0; k < 5; ++k) {
    if (!(mask & (1u << k))) continue;
    if (!out.empty()) out += '+';
    out += "f" + std::to_string(k + 1);
  }
  return out;
}

std::vector<unsigned> subset_order() {
  std::vector<unsigned> masks;
  for (unsigned m = 1; m < 32; ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
  return masks;
}

void write_report_csv(std::ostream& out, const ImprovementReport& report) {
  out << "combo,count\n";
  for (unsigned mask : subset_order()) out << subset_name(mask) << ',' << report.counts[mask] << '\n';
}

}  // namespace rakelink
