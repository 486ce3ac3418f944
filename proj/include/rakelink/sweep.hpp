#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "rakelink/objectives.hpp"

namespace rakelink {

/// Explicit value lists per bound; each strictly ascending, inf allowed only last.
struct BoundsGrid {
  std::vector<double> w_min_values;
  std::vector<double> w_max_values;
  std::vector<double> d_max_values;
  std::vector<double> v_values;

  /// Throws ValidationError(InvalidGrid).
  void validate() const;

  /// The published experiment's value sets, verbatim.
  static BoundsGrid paper();

  bool operator==(const BoundsGrid&) const = default;
};

json to_json(const BoundsGrid& g);
BoundsGrid grid_from_json(const json& j);

/// Cartesian product in (w_min, w_max, d_max, v) lexicographic order, keeping only w_max > w_min.
std::vector<Bounds> generate_grid(const BoundsGrid& g);

struct SweepRecord {
  std::size_t index = 0;  // position in the manifest (the record id)
  Bounds bounds;
  std::optional<ObjectiveVector> objectives;
  std::string solution_ref;
  std::string error;

  bool ok() const noexcept { return objectives.has_value(); }
};

json to_json(const SweepRecord& r);
SweepRecord record_from_json(const json& j, std::size_t index);

struct SweepManifest {
  std::string run_id;
  std::vector<SweepRecord> records;
  std::string created_at;
  /// Content-addressed covers: solution_ref -> canonical cover JSON.
  std::map<std::string, std::string> solutions;
};

/// Identity of a sweep: hash of the canonical timetable, topology and grid.
std::string sweep_run_id(const Timetable& tt, const Topology& topo, const BoundsGrid& grid);

struct SweepOptions {
  /// 0 means std::thread::hardware_concurrency().
  std::size_t jobs = 0;
  /// Records already solved (a valid manifest prefix); they are not recomputed.
  std::vector<SweepRecord> completed;
  /// Called from the calling thread, in grid order, once per newly solved record.
  std::function<void(const SweepRecord&, const std::string& solution_json)> on_record;
  /// Keep every distinct cover in SweepManifest::solutions.
  bool keep_solutions = true;
  /// Stops handing out new combinations; the returned manifest is then a prefix.
  std::stop_token stop;
};

SweepManifest run_sweep(const Timetable& tt, const Topology& topo, const BoundsGrid& grid,
                        const SweepOptions& options = {});

/// Solves one combination into a record plus its canonical cover JSON.
std::pair<SweepRecord, std::string> solve_record(const Timetable& tt, const Topology& topo, const Bounds& b,
                                                 std::size_t index);

// --- persistence -------------------------------------------------------------
//   <root>/<run_id>/manifest.jsonl      one record per line, grid order
//   <root>/<run_id>/solutions/<ref>.json
//   <root>/<run_id>/meta.json           run_id, created_at, grid, status

std::string manifest_line(const SweepRecord& r);

/// Runs (or resumes) a sweep under `root`, streaming records to disk in grid order.
/// Returns the run directory. meta.json says "done" only if every combination was written.
std::filesystem::path run_sweep_to_directory(const Timetable& tt, const Topology& topo, const BoundsGrid& grid,
                                             const std::filesystem::path& root, std::size_t jobs,
                                             const std::function<void(std::size_t, std::size_t)>& progress = {},
                                             std::stop_token stop = {});

/// Accepts a manifest.jsonl path or its run directory.
SweepManifest load_manifest(const std::filesystem::path& path);

/// Reads the longest prefix of `manifest.jsonl` whose bounds agree with `expected`.
std::vector<SweepRecord> load_manifest_prefix(const std::filesystem::path& manifest_path,
                                              const std::vector<Bounds>& expected);

// --- queries -----------------------------------------------------------------

using RecordPredicate = std::function<bool(const SweepRecord&)>;

/// Stable-order subset; an empty predicate keeps everything.
std::vector<SweepRecord> filter_records(const std::vector<SweepRecord>& records, const RecordPredicate& pred);

/**
 * @brief Parses a comma-separated conjunction such as `v_avg_max!=inf,f1<=100`.
 *
 * Fields: w_min, w_max, d_max, v_avg_max, f1..f5. Operators: = != < <= > >=.
 * Values are numbers, `inf`, or `min` / `max` (resolved over `records`).
 * Failed records never match a clause on an objective.
 */
RecordPredicate parse_filter(const std::string& expression, const std::vector<SweepRecord>& records);

struct ImprovementReport {
  /// counts[mask] for mask in 1..31; bit k set means objective f(k+1) is in the subset.
  std::array<std::size_t, 32> counts{};
  /// Records strictly better than the baseline on all five objectives.
  std::vector<std::size_t> dominating;
};

/// For every non-empty objective subset, counts records strictly below the baseline on each member.
ImprovementReport improvement_report(const std::vector<SweepRecord>& records, const ObjectiveVector& baseline);

/// "f1+f3" style name for a subset mask.
std::string subset_name(unsigned mask);
/// Masks 1..31 ordered by subset size, then by mask.
std::vector<unsigned> subset_order();

void write_report_csv(std::ostream& out, const ImprovementReport& report);

}  // namespace rakelink
