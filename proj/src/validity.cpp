#include "validity.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace scorelens::validity {

using metrics::MetricVector;

EffectSizeReport effect_size_report(
    const corpus::Corpus& originals, const std::map<std::string, corpus::Essay>& counterfactuals,
    const std::string& kind,
    const std::function<std::optional<MetricVector>(const corpus::Essay&)>& metrics_of) {
  EffectSizeReport report;
  report.kind = kind;

  std::vector<std::array<double, MetricVector::size>> or_vecs, cf_vecs;
  for (const auto& essay : originals.essays) {
    const auto it = counterfactuals.find(essay.id);
    if (it == counterfactuals.end()) {
      report.dropped_pairs.push_back(essay.id + ": no counterfactual");
      continue;
    }
    const auto ov = metrics_of(essay);
    if (!ov) {
      report.dropped_pairs.push_back(essay.id + ": original metrics unavailable");
      continue;
    }
    const auto cv = metrics_of(it->second);
    if (!cv) {
      report.dropped_pairs.push_back(essay.id + ": counterfactual metrics unavailable");
      continue;
    }
    or_vecs.push_back(ov->values());
    cf_vecs.push_back(cv->values());
  }
  for (const auto& [id, essay] : counterfactuals) {
    if (originals.find(id) == nullptr)
      throw ValidationError("counterfactual source id '" + id + "' not found in the corpus");
  }
  if (or_vecs.size() < 2)
    throw ValidationError("effect_size_report: fewer than 2 complete pairs for kind " + kind);

  for (std::size_t m = 0; m < MetricVector::size; ++m) {
    std::vector<double> or_vals, cf_vals;
    or_vals.reserve(or_vecs.size());
    cf_vals.reserve(cf_vecs.size());
    for (const auto& v : or_vecs) or_vals.push_back(v[m]);
    for (const auto& v : cf_vecs) cf_vals.push_back(v[m]);
    EffectSizeRow row;
    row.metric = MetricVector::names()[m];
    row.n_or = or_vals.size();
    row.n_cf = cf_vals.size();
    row.mean_or = stats::mean(or_vals);
    row.mean_cf = stats::mean(cf_vals);
    const double var_or = stats::sample_variance(or_vals);
    const double var_cf = stats::sample_variance(cf_vals);
    const double n_or = static_cast<double>(row.n_or);
    const double n_cf = static_cast<double>(row.n_cf);
    row.pooled_sd =
        std::sqrt(((n_or - 1.0) * var_or + (n_cf - 1.0) * var_cf) / (n_or + n_cf - 2.0));
    row.d = row.pooled_sd == 0.0 ? 0.0 : (row.mean_cf - row.mean_or) / row.pooled_sd;
    report.rows[m] = std::move(row);
  }
  return report;
}

std::string to_csv(const EffectSizeReport& report) {
  std::ostringstream out;
  out << "metric,mean_or,mean_cf,pooled_sd,d\n";
  out.precision(12);
  for (const auto& row : report.rows) {
    out << row.metric << ',' << row.mean_or << ',' << row.mean_cf << ',' << row.pooled_sd << ','
        << row.d << '\n';
  }
  return out.str();
}

std::string to_json(const EffectSizeReport& report) {
  nlohmann::json j;
  j["kind"] = report.kind;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"metric", row.metric},
                    {"mean_or", row.mean_or},
                    {"mean_cf", row.mean_cf},
                    {"pooled_sd", row.pooled_sd},
                    {"d", row.d},
                    {"n_or", row.n_or},
                    {"n_cf", row.n_cf}});
  }
  j["rows"] = std::move(rows);
  j["dropped_pairs"] = report.dropped_pairs;
  return j.dump(2);
}

}  // namespace scorelens::validity
