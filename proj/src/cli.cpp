#include "rakelink/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rakelink/demo_data.hpp"
#include "rakelink/feasgraph.hpp"
#include "rakelink/io.hpp"
#include "rakelink/pareto.hpp"
#include "rakelink/pathcover.hpp"
#include "rakelink/server.hpp"
#include "rakelink/sweep.hpp"

namespace fs = std::filesystem;

namespace rakelink {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string timetable;
  std::string topology;
  std::string out;
  std::string format = "csv";

  std::string w_min = "0";
  std::string w_max = "inf";
  std::string d_max = "inf";
  std::string v_max = "inf";

  std::string grid = "paper";
  std::size_t jobs = 0;

  std::string manifest;
  std::string filter;
  bool exclude_inf_speed = false;
  std::string eps = "0";
  std::string baseline;

  std::uint64_t seed = 1;
  std::size_t services = 887;
  std::size_t stations = 16;
  bool rle = false;

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir = "rakelink-data";
  std::string static_dir;
  std::size_t max_sweeps = 1;
};

Bounds parse_bounds(const Options& o) {
  auto one = [](const std::string& text, const char* field) {
    try {
      return parse_bound(text);
    } catch (const ValidationError& e) {
      throw ValidationError(e.code(), field, std::string("--") + field + " expects a number or inf, got '" + text + "'");
    }
  };
  Bounds b{one(o.w_min, "w-min"), one(o.w_max, "w-max"), one(o.d_max, "d-max"), one(o.v_max, "v-max")};
  b.check_domain();
  if (!b.admissible())
    throw ValidationError(ErrorCode::InadmissibleBounds, "w-max",
                          "--w-max (" + o.w_max + ") must be greater than --w-min (" + o.w_min + ")");
  return b;
}

/// Writes to --out when given, else to stdout.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
}

std::pair<Timetable, Topology> load_inputs(const Options& o) {
  Timetable tt = load_timetable(o.timetable);
  Topology topo = load_topology(o.topology, tt);
  return {std::move(tt), std::move(topo)};
}

BoundsGrid load_grid(const std::string& spec) {
  if (spec == "paper") return BoundsGrid::paper();
  return grid_from_json(json::parse(read_file(spec)));
}

std::vector<SweepRecord> selected_records(const Options& o, std::ostream& err) {
  SweepManifest m = load_manifest(o.manifest);
  std::vector<SweepRecord> records = std::move(m.records);
  const std::size_t loaded = records.size();
  if (!o.filter.empty()) records = filter_records(records, parse_filter(o.filter, records));
  if (o.exclude_inf_speed)
    records = filter_records(records, [](const SweepRecord& r) { return std::isfinite(r.bounds.v_avg_max); });
  err << "rakelink: " << records.size() << " of " << loaded << " records selected\n";
  return records;
}

ObjectiveVector parse_baseline(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) values.push_back(parse_bound(part));
  if (values.size() != 5)
    throw ValidationError(ErrorCode::ParseError, "baseline", "--baseline needs five values f1,f2,f3,f4,f5");
  for (int k : {0, 1})
    if (!std::isfinite(values[k]) || values[k] != std::floor(values[k]))
      throw ValidationError(ErrorCode::InvalidField, "baseline",
                            "--baseline f" + std::to_string(k + 1) + " must be an integer");
  std::array<double, 5> a{};
  std::copy(values.begin(), values.end(), a.begin());
  return ObjectiveVector::from_array(a);
}

bool json_format(const Options& o) { return o.format == "json"; }

// --- commands ----------------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw UsageError("gen: --out DIR is required");
  GeneratorConfig cfg;
  cfg.seed = o.seed;
  cfg.services_target = o.services;
  cfg.station_count = o.stations;
  const auto [tt, topo] = generate(cfg);
  std::ostringstream tt_csv, topo_csv;
  write_timetable_csv(tt_csv, tt);
  write_topology_csv(topo_csv, topo);
  write_file(fs::path(o.out) / "timetable.csv", tt_csv.str());
  write_file(fs::path(o.out) / "topology.csv", topo_csv.str());
  err << "rakelink: wrote " << tt.size() << " services over " << topo.stations().size() << " stations\n";
  out << (fs::path(o.out) / "timetable.csv").string() << '\n' << (fs::path(o.out) / "topology.csv").string() << '\n';
  return kExitOk;
}

int cmd_graph(const Options& o, std::ostream& out, std::ostream& err) {
  const auto [tt, topo] = load_inputs(o);
  const FeasibilityGraph g = build_graph(tt, topo, parse_bounds(o));
  std::ostringstream text;
  if (json_format(o))
    text << graph_to_json(g, tt).dump(2) << '\n';
  else
    write_graph_csv(text, g, tt);
  emit(o, out, text.str());
  err << "rakelink: " << g.size() << " services, " << g.edges().size() << " feasible links\n";
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto [tt, topo] = load_inputs(o);
  const CoverSolution sol = min_fleet(tt, topo, parse_bounds(o));
  const ObjectiveVector obj = evaluate(sol, tt, topo);
  out << "fleet=" << sol.fleet_size() << '\n';
  err << "rakelink: objectives " << to_json(obj).dump() << '\n';
  if (!o.out.empty()) {
    std::ostringstream text;
    if (json_format(o)) {
      json j = cover_to_json(sol, tt);
      j["objectives"] = to_json(obj);
      text << j.dump(2) << '\n';
    } else {
      write_cover_csv(text, sol, tt);
    }
    write_file(o.out, text.str());
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const auto [tt, topo] = load_inputs(o);
  const BoundsGrid grid = load_grid(o.grid);
  const fs::path root = o.out.empty() ? fs::path("sweeps") : fs::path(o.out);
  std::size_t last_pct = 101;
  auto progress = [&](std::size_t done, std::size_t total) {
    const std::size_t pct = total == 0 ? 100 : done * 100 / total;
    if (pct != last_pct && (pct % 10 == 0 || done == total)) {
      err << "rakelink: sweep " << done << "/" << total << "\n";
      last_pct = pct;
    }
  };
  const fs::path dir = run_sweep_to_directory(tt, topo, grid, root, o.jobs, progress);
  out << (dir / "manifest.jsonl").string() << '\n';
  return kExitOk;
}

json fronts_json(const FrontAssignment& fa, const ObjectiveTable& table,
                 const std::vector<ObjectivePoint>& minima) {
  json fronts = json::array();
  for (std::size_t f = 0; f < fa.fronts.size(); ++f) {
    json ids = json::array();
    for (std::size_t p : fa.fronts[f]) ids.push_back(table.record_ids[p]);
    fronts.push_back(json{{"front", f + 1},
                          {"size", ids.size()},
                          {"minima", to_json(ObjectiveVector::from_array(minima[f]))},
                          {"record_ids", std::move(ids)}});
  }
  return json{{"points", table.points.size()}, {"front_count", fa.front_count()}, {"fronts", std::move(fronts)}};
}

int cmd_pareto(const Options& o, std::ostream& out, std::ostream& err) {
  const auto records = selected_records(o, err);
  const ObjectiveTable table = objective_table(records);
  const FrontAssignment fa = sort_fronts<double, 5>(table.points);
  const auto minima = front_minima<double, 5>(fa, table.points);
  err << "rakelink: " << table.points.size() << " points in " << fa.front_count() << " fronts\n";

  if (json_format(o)) {
    emit(o, out, fronts_json(fa, table, minima).dump(2) + "\n");
  } else if (o.out.empty()) {
    write_front_minima_csv(out, minima);
  } else {
    std::ostringstream fronts_csv, minima_csv;
    write_fronts_csv(fronts_csv, fa, table);
    write_front_minima_csv(minima_csv, minima);
    write_file(fs::path(o.out) / "fronts.csv", fronts_csv.str());
    write_file(fs::path(o.out) / "front_minima.csv", minima_csv.str());
  }
  return kExitOk;
}

int cmd_clusters(const Options& o, std::ostream& out, std::ostream& err) {
  const auto records = selected_records(o, err);
  const ObjectivePoint eps = parse_epsilon(o.eps);
  const ObjectiveTable table = objective_table(records);
  const FrontAssignment fa = sort_fronts<double, 5>(table.points);
  const auto clusters = find_clusters<double, 5>(fa, table.points, eps);
  err << "rakelink: " << clusters.size() << " clusters over " << fa.front_count() << " fronts\n";

  std::ostringstream text;
  if (json_format(o)) {
    json arr = json::array();
    for (const auto& c : clusters) {
      json ids = json::array();
      for (std::size_t p : c.members) ids.push_back(table.record_ids[p]);
      arr.push_back(json{{"front", c.front},
                         {"cluster_id", c.cluster_id},
                         {"representative", to_json(ObjectiveVector::from_array(c.representative))},
                         {"record_ids", std::move(ids)}});
    }
    text << json{{"cluster_count", clusters.size()}, {"clusters", std::move(arr)}}.dump(2) << '\n';
  } else {
    write_clusters_csv(text, clusters, table, records);
  }
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out, std::ostream& err) {
  const Timetable tt = load_timetable(o.timetable);
  const DensityProfile dp = density_profile(tt);
  err << "rakelink: peak density " << peak_density(dp) << '\n';
  std::ostringstream text;
  if (json_format(o))
    text << json{{"day_length", kDayLength}, {"peak", peak_density(dp)}, {"counts", dp.counts}}.dump() << '\n';
  else
    write_density_csv(text, dp, o.rle);
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const ObjectiveVector baseline = parse_baseline(o.baseline);
  const auto records = selected_records(o, err);
  const ImprovementReport report = improvement_report(records, baseline);
  err << "rakelink: " << report.dominating.size() << " records improve on every objective\n";
  std::ostringstream text;
  if (json_format(o)) {
    json counts = json::object();
    for (unsigned mask : subset_order()) counts[subset_name(mask)] = report.counts[mask];
    text << json{{"baseline", to_json(baseline)}, {"counts", counts}, {"dominating", report.dominating}}.dump(2)
         << '\n';
  } else {
    write_report_csv(text, report);
  }
  emit(o, out, text.str());
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream&, std::ostream& err) {
  ServerConfig cfg;
  cfg.data_dir = o.data_dir;
  cfg.host = o.host;
  cfg.static_dir = o.static_dir;
  cfg.max_running_sweeps = o.max_sweeps;
  cfg.sweep_jobs = o.jobs;
  AuditServer server(cfg);
  err << "rakelink: serving " << cfg.data_dir.string() << " on http://" << o.host << ":" << o.port
      << " (no authentication)\n";
  if (!server.run(o.port)) {
    err << "rakelink: cannot listen on " << o.host << ":" << o.port << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

// --- wiring ------------------------------------------------------------------

void add_inputs(CLI::App* cmd, Options& o, bool topology = true) {
  cmd->add_option("--timetable", o.timetable, "Timetable CSV")->required()->check(CLI::ExistingFile);
  if (topology) cmd->add_option("--topology", o.topology, "Station distance CSV")->required()->check(CLI::ExistingFile);
}

void add_bounds(CLI::App* cmd, Options& o) {
  cmd->add_option("--w-min", o.w_min, "Minimum turnaround headway, seconds or inf")->capture_default_str();
  cmd->add_option("--w-max", o.w_max, "Maximum turnaround headway, seconds or inf")->capture_default_str();
  cmd->add_option("--d-max", o.d_max, "Maximum deadhead distance, km or inf")->capture_default_str();
  cmd->add_option("--v-max", o.v_max, "Maximum average deadhead speed, km/h or inf")->capture_default_str();
}

void add_format(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_selection(CLI::App* cmd, Options& o) {
  cmd->add_option("--manifest", o.manifest, "Sweep manifest.jsonl or its run directory")->required();
  cmd->add_option("--filter", o.filter, "Record filter, e.g. 'v_avg_max!=inf,f1<=100'");
  cmd->add_flag("--exclude-inf-speed", o.exclude_inf_speed, "Drop records whose v_avg_max is inf");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Minimum-fleet rake-linking audits over a suburban timetable", "rakelink"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto* gen = app.add_subcommand("gen", "Write a synthetic demo timetable and topology");
  gen->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  gen->add_option("--services", o.services, "Number of services")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--stations", o.stations, "Number of stations")->capture_default_str();
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* graph = app.add_subcommand("graph", "Write the feasible link graph for one bounds tuple");
  add_inputs(graph, o);
  add_bounds(graph, o);
  add_format(graph, o);
  graph->add_option("--out", o.out, "Output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solve the minimum fleet and print fleet=N");
  add_inputs(solve, o);
  add_bounds(solve, o);
  add_format(solve, o);
  solve->add_option("--out", o.out, "Write the rake links to this file");

  auto* sweep = app.add_subcommand("sweep", "Solve every admissible combination of a bounds grid");
  add_inputs(sweep, o);
  sweep->add_option("--grid", o.grid, "Grid JSON file, or 'paper' for the built-in value sets")->capture_default_str();
  sweep->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  sweep->add_option("--out", o.out, "Root directory for runs (default ./sweeps)");

  auto* pareto = app.add_subcommand("pareto", "Sort sweep records into Pareto fronts");
  add_selection(pareto, o);
  add_format(pareto, o);
  pareto->add_option("--out", o.out, "Directory for fronts.csv and front_minima.csv (default: minima to stdout)");

  auto* clusters = app.add_subcommand("clusters", "Group each front's points in objective space");
  add_selection(clusters, o);
  clusters->add_option("--eps", o.eps, "Tolerance: one value or five comma-separated values")->capture_default_str();
  add_format(clusters, o);
  clusters->add_option("--out", o.out, "Output file (default stdout)");

  auto* density = app.add_subcommand("density", "Write the per-second count of running services");
  add_inputs(density, o, false);
  density->add_flag("--rle", o.rle, "Only write the seconds where the count changes");
  add_format(density, o);
  density->add_option("--out", o.out, "Output file (default stdout)");

  auto* report = app.add_subcommand("report", "Count records that improve on a baseline, per objective subset");
  add_selection(report, o);
  report->add_option("--baseline", o.baseline, "Baseline f1,f2,f3,f4,f5 (f1 and f2 integers)")->required();
  add_format(report, o);
  report->add_option("--out", o.out, "Output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP audit service (no authentication)");
  serve->add_option("--port", o.port, "TCP port")->capture_default_str()->check(CLI::Range(1, 65535));
  serve->add_option("--host", o.host, "Listen address")->capture_default_str();
  serve->add_option("--data-dir", o.data_dir, "Directory for datasets and sweeps")->capture_default_str();
  serve->add_option("--static-dir", o.static_dir, "Serve UI assets from this directory")->check(CLI::ExistingDirectory);
  serve->add_option("--max-sweeps", o.max_sweeps, "Sweeps running at once")->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--jobs", o.jobs, "Solver threads per sweep (0 = all cores)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "gen") return cmd_gen(o, out, err);
    if (name == "graph") return cmd_graph(o, out, err);
    if (name == "solve") return cmd_solve(o, out, err);
    if (name == "sweep") return cmd_sweep(o, out, err);
    if (name == "pareto") return cmd_pareto(o, out, err);
    if (name == "clusters") return cmd_clusters(o, out, err);
    if (name == "density") return cmd_density(o, out, err);
    if (name == "report") return cmd_report(o, out, err);
    return cmd_serve(o, out, err);
  } catch (const ValidationError& e) {
    err << "rakelink: " << e.what();
    if (!e.subject().empty()) err << " (" << e.subject() << ")";
    err << '\n';
    return kExitValidation;
  } catch (const UsageError& e) {
    err << "rakelink: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "rakelink: malformed JSON: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "rakelink: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace rakelink
