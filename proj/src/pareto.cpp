#include "rakelink/pareto.hpp"

#include <ostream>
#include <sstream>
#include <unordered_map>

namespace rakelink {

ObjectiveTable objective_table(const std::vector<SweepRecord>& records) {
  ObjectiveTable table;
  for (const SweepRecord& r : records) {
    if (!r.ok()) continue;
    table.points.push_back(r.objectives->as_array());
    table.record_ids.push_back(r.index);
  }
  return table;
}

void write_fronts_csv(std::ostream& out, const FrontAssignment& fa, const ObjectiveTable& table) {
  out << "record_id,front\n";
  for (std::size_t p = 0; p < fa.front_of.size(); ++p) out << table.record_ids[p] << ',' << fa.front_of[p] << '\n';
}

void write_front_minima_csv(std::ostream& out, const std::vector<ObjectivePoint>& minima) {
  out << "front,min_f1,min_f2,min_f3,min_f4,min_f5\n";
  for (std::size_t f = 0; f < minima.size(); ++f) {
    out << f + 1;
    for (double v : minima[f]) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_clusters_csv(std::ostream& out, const std::vector<Cluster<double, 5>>& clusters,
                        const ObjectiveTable& table, const std::vector<SweepRecord>& records) {
  std::unordered_map<std::size_t, const SweepRecord*> by_id;
  for (const SweepRecord& r : records) by_id.emplace(r.index, &r);

  out << "front,cluster_id,record_id,w_min,w_max,d_max,v_avg_max,f1,f2,f3,f4,f5\n";
  for (const auto& c : clusters) {
    for (std::size_t p : c.members) {
      const std::size_t id = table.record_ids[p];
      const SweepRecord& r = *by_id.at(id);
      out << c.front << ',' << c.cluster_id << ',' << id << ',' << format_number(r.bounds.w_min) << ','
          << format_number(r.bounds.w_max) << ',' << format_number(r.bounds.d_max) << ','
          << format_number(r.bounds.v_avg_max);
      for (double v : table.points[p]) out << ',' << format_number(v);
      out << '\n';
    }
  }
}

ObjectivePoint parse_epsilon(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) values.push_back(parse_bound(part));
  ObjectivePoint eps{};
  if (values.size() == 1) {
    eps.fill(values[0]);
  } else if (values.size() == 5) {
    std::copy(values.begin(), values.end(), eps.begin());
  } else {
    throw ValidationError(ErrorCode::ParseError, "eps", "epsilon must be one value or five comma-separated values");
  }
  for (double e : eps)
    if (e < 0.0) throw ValidationError(ErrorCode::InvalidField, "eps", "epsilon components must be >= 0");
  return eps;
}

}  // namespace rakelink
