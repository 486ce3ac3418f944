#include "rakelink/server.hpp"

#include <httplib.h>

#include <charconv>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include "rakelink/hash.hpp"
#include "rakelink/io.hpp"
#include "rakelink/pareto.hpp"
#include "rakelink/pathcover.hpp"
#include "rakelink/sweep.hpp"

namespace fs = std::filesystem;

namespace rakelink {
namespace {

struct HttpError : std::runtime_error {
  HttpError(int status, std::string code, std::string field, const std::string& message)
      : std::runtime_error(message), status(status), code(std::move(code)), field(std::move(field)) {}
  int status;
  std::string code;
  std::string field;
};

HttpError not_found(const std::string& what, const std::string& id) {
  return {404, "NotFound", "id", what + " '" + id + "' does not exist"};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& field,
                const std::string& message, const std::string& subject = {}) {
  json err{{"code", code}, {"field", field}, {"message", message}};
  if (!subject.empty()) err["subject"] = subject;
  send_json(res, status, json{{"error", err}});
}

bool is_content_id(const std::string& id) {
  static const std::regex pattern("[0-9a-f]{16}");
  return std::regex_match(id, pattern);
}

void require_json(const httplib::Request& req) {
  const std::string type = req.get_header_value("Content-Type");
  if (type.rfind("application/json", 0) != 0)
    throw HttpError(415, "UnsupportedMediaType", "Content-Type", "request body must be application/json");
}

json parse_body(const httplib::Request& req) {
  require_json(req);
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw HttpError(400, "ParseError", "body", "request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw HttpError(400, "ParseError", "body", e.what());
  }
}

std::size_t query_size(const httplib::Request& req, const std::string& key, std::size_t fallback,
                       std::size_t ceiling) {
  if (!req.has_param(key)) return fallback;
  const std::string text = req.get_param_value(key);
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value > ceiling)
    throw HttpError(400, "InvalidField", key, key + " must be an integer in [0, " + std::to_string(ceiling) + "]");
  return value;
}

json point_json(const ObjectivePoint& p) { return to_json(ObjectiveVector::from_array(p)); }

struct Dataset {
  std::string id;
  Timetable timetable;
  Topology topology;
  DensityProfile density;
  std::int32_t peak = 0;
};

/// Parsed state of a finished sweep, computed once.
struct SweepResults {
  std::vector<SweepRecord> records;
  ObjectiveTable table;
  FrontAssignment fronts;
};

enum class JobStatus { Pending, Running, Done, Failed };

const char* status_name(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
  }
  return "failed";
}

struct SweepJob {
  std::string id;
  std::string dataset_id;
  BoundsGrid grid;
  std::vector<Bounds> combos;
  JobStatus status = JobStatus::Pending;
  std::size_t done = 0;
  std::string error;
  std::shared_ptr<const SweepResults> results;
};

}  // namespace

struct AuditServer::Impl {
  ServerConfig config;
  httplib::Server http;
  std::thread listener;

  std::mutex datasets_mutex;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets;

  std::mutex jobs_mutex;
  std::condition_variable_any jobs_changed;
  std::map<std::string, SweepJob> jobs;
  std::deque<std::string> queue;
  std::size_t running = 0;
  std::vector<std::jthread> workers;

  explicit Impl(ServerConfig cfg) : config(std::move(cfg)) {
    fs::create_directories(config.data_dir / "datasets");
    fs::create_directories(config.data_dir / "sweeps");
    recover_jobs();
    for (std::size_t w = 0; w < std::max<std::size_t>(1, config.max_running_sweeps); ++w)
      workers.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
    routes();
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    http.stop();
    if (listener.joinable()) listener.join();
    for (auto& w : workers) w.request_stop();
    jobs_changed.notify_all();
    workers.clear();
  }

  fs::path dataset_dir(const std::string& id) const { return config.data_dir / "datasets" / id; }
  fs::path sweeps_root() const { return config.data_dir / "sweeps"; }

  // --- datasets ----------------------------------------------------------------

  std::shared_ptr<const Dataset> dataset(const std::string& id) {
    if (!is_content_id(id)) throw not_found("dataset", id);
    std::lock_guard lock(datasets_mutex);
    if (auto it = datasets.find(id); it != datasets.end()) return it->second;
    const fs::path dir = dataset_dir(id);
    if (!fs::exists(dir / "topology.csv")) throw not_found("dataset", id);
    Timetable tt = load_timetable(dir / "timetable.csv");
    Topology topo = load_topology(dir / "topology.csv", tt);
    return cache_dataset(id, std::move(tt), std::move(topo));
  }

  std::shared_ptr<const Dataset> cache_dataset(const std::string& id, Timetable tt, Topology topo) {
    auto ds = std::make_shared<Dataset>(Dataset{id, std::move(tt), std::move(topo), {}, 0});
    ds->density = density_profile(ds->timetable);
    ds->peak = peak_density(ds->density);
    datasets[id] = ds;
    return ds;
  }

  void upload(const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data())
      throw HttpError(415, "UnsupportedMediaType", "Content-Type",
                      "upload timetable and topology as multipart/form-data");
    for (const char* field : {"timetable", "topology"})
      if (!req.has_file(field))
        throw HttpError(400, "MissingField", field, std::string("multipart field '") + field + "' is required");

    auto parse = [](const std::string& field, auto&& fn) -> decltype(fn()) {
      try {
        return fn();
      } catch (const ValidationError& e) {
        throw HttpError(e.code() == ErrorCode::InadmissibleBounds ? 422 : 400, std::string(to_string(e.code())),
                        field + (e.subject().empty() ? "" : "." + e.subject()), e.what());
      }
    };
    Timetable tt = parse("timetable", [&] {
      std::istringstream in(req.get_file_value("timetable").content);
      return Timetable::validate(read_timetable_csv(in));
    });
    Topology topo = parse("topology", [&] {
      std::istringstream in(req.get_file_value("topology").content);
      const auto records = read_topology_csv(in);
      return Topology::validate(records, tt);
    });

    std::ostringstream tt_csv, topo_csv;
    write_timetable_csv(tt_csv, tt);
    write_topology_csv(topo_csv, topo);
    const std::string id = content_hash(tt_csv.str() + "\x1e" + topo_csv.str());

    std::lock_guard lock(datasets_mutex);
    const fs::path dir = dataset_dir(id);
    if (fs::exists(dir / "topology.csv")) {
      send_json(res, 409, json{{"dataset_id", id},
                               {"error", {{"code", "DuplicateDataset"},
                                          {"field", "timetable"},
                                          {"message", "identical dataset already uploaded"}}}});
      return;
    }
    write_file(dir / "timetable.csv", tt_csv.str());
    write_file(dir / "topology.csv", topo_csv.str());
    cache_dataset(id, std::move(tt), std::move(topo));
    send_json(res, 201, json{{"dataset_id", id}});
  }

  void audit(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string id = req.path_params.at("id");
    if (body.contains("dataset_id") && body["dataset_id"] != id)
      throw HttpError(400, "InvalidField", "dataset_id", "dataset_id does not match the request path");
    const auto ds = dataset(id);
    if (!body.contains("bounds")) throw HttpError(400, "MissingField", "bounds", "bounds is required");
    const Bounds b = bounds_from_json(body["bounds"]);
    if (!b.admissible())
      throw HttpError(422, "InadmissibleBounds", "bounds.w_max", "w_max must be greater than w_min");

    const auto t0 = std::chrono::steady_clock::now();
    const CoverSolution sol = min_fleet(ds->timetable, ds->topology, b);
    const ObjectiveVector obj = evaluate(sol, ds->timetable, ds->topology);
    const auto millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const json cover = cover_to_json(sol, ds->timetable, false);
    send_json(res, 200,
              json{{"dataset_id", id},
                   {"bounds", to_json(b)},
                   {"fleet_size", sol.fleet_size()},
                   {"objectives", to_json(obj)},
                   {"links", cover.at("links")},
                   {"peak_density", ds->peak},
                   {"solve_millis", millis}});
  }

  void density(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    const auto ds = dataset(id);
    json body{{"dataset_id", id}, {"day_length", kDayLength}, {"peak", ds->peak}};
    const std::string format = req.has_param("format") ? req.get_param_value("format") : "dense";
    if (format == "rle") {
      json steps = json::array();
      const auto& c = ds->density.counts;
      for (std::size_t t = 0; t < c.size(); ++t)
        if (t == 0 || c[t] != c[t - 1]) steps.push_back(json::array({t, c[t]}));
      body["steps"] = std::move(steps);
    } else if (format == "dense") {
      body["counts"] = ds->density.counts;
    } else {
      throw HttpError(400, "InvalidField", "format", "format must be 'dense' or 'rle'");
    }
    send_json(res, 200, body);
  }

  void dataset_summary(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    const auto ds = dataset(id);
    send_json(res, 200,
              json{{"dataset_id", id},
                   {"services", ds->timetable.size()},
                   {"stations", ds->topology.stations().size()},
                   {"peak_density", ds->peak}});
  }

  // --- sweeps ------------------------------------------------------------------

  void write_job_file(const SweepJob& job) {
    json j{{"sweep_id", job.id}, {"dataset_id", job.dataset_id}, {"grid", to_json(job.grid)}};
    if (job.status == JobStatus::Failed) j["error"] = job.error;
    write_file(sweeps_root() / job.id / "job.json", j.dump(2) + "\n");
  }

  void recover_jobs() {
    for (const auto& entry : fs::directory_iterator(sweeps_root())) {
      if (!entry.is_directory() || !fs::exists(entry.path() / "job.json")) continue;
      try {
        const json j = json::parse(read_file(entry.path() / "job.json"));
        SweepJob job;
        job.id = j.at("sweep_id").get<std::string>();
        job.dataset_id = j.at("dataset_id").get<std::string>();
        job.grid = grid_from_json(j.at("grid"));
        job.combos = generate_grid(job.grid);
        std::string meta_status;
        if (fs::exists(entry.path() / "meta.json"))
          meta_status = json::parse(read_file(entry.path() / "meta.json")).value("status", "");
        if (j.contains("error")) {
          job.status = JobStatus::Failed;
          job.error = j["error"].get<std::string>();
        } else if (meta_status == "done") {
          job.status = JobStatus::Done;
          job.done = job.combos.size();
        } else {
          job.done = load_manifest_prefix(entry.path() / "manifest.jsonl", job.combos).size();
          queue.push_back(job.id);
          std::clog << "rakelink: resuming sweep " << job.id << " at " << job.done << "/" << job.combos.size()
                    << "\n";
        }
        jobs.emplace(job.id, std::move(job));
      } catch (const std::exception& e) {
        std::clog << "rakelink: skipping unreadable sweep " << entry.path() << ": " << e.what() << "\n";
      }
    }
  }

  void worker_loop(std::stop_token stop) {
    for (;;) {
      std::string id;
      {
        std::unique_lock lock(jobs_mutex);
        if (!jobs_changed.wait(lock, stop, [&] { return !queue.empty(); })) return;
        id = queue.front();
        queue.pop_front();
        jobs.at(id).status = JobStatus::Running;
        ++running;
      }
      run_job(id, stop);
      {
        std::lock_guard lock(jobs_mutex);
        --running;
      }
      jobs_changed.notify_all();
    }
  }

  void run_job(const std::string& id, std::stop_token stop) {
    std::string dataset_id;
    BoundsGrid grid;
    {
      std::lock_guard lock(jobs_mutex);
      dataset_id = jobs.at(id).dataset_id;
      grid = jobs.at(id).grid;
    }
    try {
      const auto ds = dataset(dataset_id);
      auto progress = [&](std::size_t done, std::size_t) {
        std::lock_guard lock(jobs_mutex);
        jobs.at(id).done = done;
      };
      run_sweep_to_directory(ds->timetable, ds->topology, grid, sweeps_root(), config.sweep_jobs, progress, stop);
      std::lock_guard lock(jobs_mutex);
      SweepJob& job = jobs.at(id);
      job.status = job.done == job.combos.size() ? JobStatus::Done : JobStatus::Pending;
    } catch (const std::exception& e) {
      std::lock_guard lock(jobs_mutex);
      SweepJob& job = jobs.at(id);
      job.status = JobStatus::Failed;
      job.error = e.what();
      write_job_file(job);
      std::clog << "rakelink: sweep " << id << " failed: " << e.what() << "\n";
    }
  }

  void create_sweep(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const auto ds = dataset(req.path_params.at("id"));
    if (!body.contains("grid")) throw HttpError(400, "MissingField", "grid", "grid is required");
    const BoundsGrid grid = grid_from_json(body["grid"]);
    grid.validate();
    const std::string id = sweep_run_id(ds->timetable, ds->topology, grid);

    std::unique_lock lock(jobs_mutex);
    auto it = jobs.find(id);
    if (it != jobs.end() && it->second.status != JobStatus::Failed) {
      send_json(res, 200, json{{"sweep_id", id}, {"status", status_name(it->second.status)}});
      return;
    }
    SweepJob job;
    job.id = id;
    job.dataset_id = ds->id;
    job.grid = grid;
    job.combos = generate_grid(grid);
    write_job_file(job);
    jobs[id] = std::move(job);
    queue.push_back(id);
    lock.unlock();
    jobs_changed.notify_all();
    send_json(res, 202, json{{"sweep_id", id}, {"status", "pending"}});
  }

  SweepJob job_snapshot(const std::string& id) {
    if (!is_content_id(id)) throw not_found("sweep", id);
    std::lock_guard lock(jobs_mutex);
    auto it = jobs.find(id);
    if (it == jobs.end()) throw not_found("sweep", id);
    return it->second;
  }

  std::shared_ptr<const SweepResults> results(const std::string& id) {
    SweepJob job = job_snapshot(id);
    if (job.status != JobStatus::Done)
      throw HttpError(409, "SweepNotDone", "id", std::string("sweep is ") + status_name(job.status));
    if (job.results) return job.results;
    auto r = std::make_shared<SweepResults>();
    r->records = load_manifest(sweeps_root() / id).records;
    r->table = objective_table(r->records);
    r->fronts = sort_fronts<double, 5>(r->table.points);
    std::lock_guard lock(jobs_mutex);
    jobs.at(id).results = r;
    return r;
  }

  void sweep_status(const httplib::Request& req, httplib::Response& res) {
    const SweepJob job = job_snapshot(req.path_params.at("id"));
    json body{{"sweep_id", job.id},
              {"dataset_id", job.dataset_id},
              {"status", status_name(job.status)},
              {"progress", {{"done", job.done}, {"total", job.combos.size()}}}};
    if (job.status == JobStatus::Failed) body["error"] = job.error;
    send_json(res, 200, body);
  }

  void sweep_records(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    const SweepJob job = job_snapshot(id);
    std::vector<SweepRecord> records;
    if (job.status == JobStatus::Done)
      records = results(id)->records;
    else
      records = load_manifest_prefix(sweeps_root() / id / "manifest.jsonl", job.combos);

    if (req.has_param("filter")) {
      try {
        records = filter_records(records, parse_filter(req.get_param_value("filter"), records));
      } catch (const ValidationError& e) {
        throw HttpError(400, std::string(to_string(e.code())), "filter", e.what());
      }
    }
    const std::size_t offset = query_size(req, "offset", 0, records.size());
    const std::size_t limit = query_size(req, "limit", 100, 10000);
    json page = json::array();
    for (std::size_t k = offset; k < std::min(records.size(), offset + limit); ++k) {
      json row{{"id", records[k].index}};
      row.update(to_json(records[k]));
      page.push_back(std::move(row));
    }
    send_json(res, 200,
              json{{"sweep_id", id},
                   {"status", status_name(job.status)},
                   {"total", records.size()},
                   {"offset", offset},
                   {"limit", limit},
                   {"records", std::move(page)}});
  }

  void sweep_fronts(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    const auto r = results(id);
    json fronts = json::array();
    for (std::size_t f = 0; f < r->fronts.fronts.size(); ++f) {
      json ids = json::array();
      for (std::size_t p : r->fronts.fronts[f]) ids.push_back(r->table.record_ids[p]);
      fronts.push_back(json{{"front", f + 1}, {"size", ids.size()}, {"record_ids", std::move(ids)}});
    }
    send_json(res, 200,
              json{{"sweep_id", id},
                   {"points", r->table.points.size()},
                   {"front_count", r->fronts.front_count()},
                   {"fronts", std::move(fronts)}});
  }

  void front_minima_route(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    const auto r = results(id);
    const std::string k_text = req.path_params.at("k");
    std::size_t k = 0;
    const auto [end, ec] = std::from_chars(k_text.data(), k_text.data() + k_text.size(), k);
    if (ec != std::errc() || end != k_text.data() + k_text.size() || k == 0 || k > r->fronts.front_count())
      throw HttpError(404, "NotFound", "k",
                      "front " + k_text + " does not exist (1.." + std::to_string(r->fronts.front_count()) + ")");
    const auto minima = front_minima<double, 5>(r->fronts, r->table.points);
    send_json(res, 200,
              json{{"sweep_id", id},
                   {"front", k},
                   {"size", r->fronts.fronts[k - 1].size()},
                   {"minima", point_json(minima[k - 1])}});
  }

  void clusters_route(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    const auto r = results(id);
    ObjectivePoint eps{};
    if (req.has_param("eps")) {
      try {
        eps = parse_epsilon(req.get_param_value("eps"));
      } catch (const ValidationError& e) {
        throw HttpError(400, std::string(to_string(e.code())), "eps", e.what());
      }
    }
    const std::size_t only_front = query_size(req, "front", 0, r->fronts.front_count());
    const auto clusters = find_clusters<double, 5>(r->fronts, r->table.points, eps);
    json out = json::array();
    for (const auto& c : clusters) {
      if (only_front != 0 && c.front != only_front) continue;
      json ids = json::array();
      for (std::size_t p : c.members) ids.push_back(r->table.record_ids[p]);
      out.push_back(json{{"front", c.front},
                         {"cluster_id", c.cluster_id},
                         {"size", c.members.size()},
                         {"representative", point_json(c.representative)},
                         {"representative_record", r->table.record_ids[c.members.front()]},
                         {"record_ids", std::move(ids)}});
    }
    json eps_json = json::array();
    for (double e : eps) eps_json.push_back(e);
    send_json(res, 200,
              json{{"sweep_id", id}, {"eps", eps_json}, {"cluster_count", out.size()}, {"clusters", std::move(out)}});
  }

  void solution(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    job_snapshot(id);
    const std::string ref = req.path_params.at("ref");
    const fs::path file = sweeps_root() / id / "solutions" / (ref + ".json");
    if (!is_content_id(ref) || !fs::exists(file)) throw not_found("solution", ref);
    res.status = 200;
    res.set_content(read_file(file), "application/json");
  }

  // --- wiring ------------------------------------------------------------------

  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        (this->*fn)(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.field, e.what());
      } catch (const ValidationError& e) {
        const int status = e.code() == ErrorCode::InadmissibleBounds ? 422 : 400;
        send_error(res, status, std::string(to_string(e.code())), e.subject(), e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "ParseError", "body", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "InternalError", "", e.what());
      }
    };
  }

  void routes() {
    http.set_payload_max_length(64u << 20);
    http.Post("/datasets", guarded(&Impl::upload));
    http.Get("/datasets/:id", guarded(&Impl::dataset_summary));
    http.Post("/datasets/:id/audit", guarded(&Impl::audit));
    http.Get("/datasets/:id/density", guarded(&Impl::density));
    http.Post("/datasets/:id/sweeps", guarded(&Impl::create_sweep));
    http.Get("/sweeps/:id", guarded(&Impl::sweep_status));
    http.Get("/sweeps/:id/records", guarded(&Impl::sweep_records));
    http.Get("/sweeps/:id/fronts", guarded(&Impl::sweep_fronts));
    http.Get("/sweeps/:id/fronts/:k/minima", guarded(&Impl::front_minima_route));
    http.Get("/sweeps/:id/clusters", guarded(&Impl::clusters_route));
    http.Get("/sweeps/:id/solutions/:ref", guarded(&Impl::solution));
    if (!config.static_dir.empty()) http.set_mount_point("/", config.static_dir.string());
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty() && res.status == 404) send_error(res, 404, "NotFound", "path", "no such route");
    });
  }

  void wait_idle() {
    std::unique_lock lock(jobs_mutex);
    jobs_changed.wait(lock, [&] { return queue.empty() && running == 0; });
  }
};

AuditServer::AuditServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

AuditServer::~AuditServer() = default;

int AuditServer::start(int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(impl_->config.host)
                              : (impl_->http.bind_to_port(impl_->config.host, port) ? port : -1);
  if (bound < 0) return -1;
  impl_->listener = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

bool AuditServer::run(int port) { return impl_->http.listen(impl_->config.host, port); }

void AuditServer::stop() { impl_->shutdown(); }

void AuditServer::wait_idle() { impl_->wait_idle(); }

}  // namespace rakelink
