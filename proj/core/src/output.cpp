#include "d2d/output.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>

namespace d2d {

namespace {

using nlohmann::json;

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json metrics_json(const Metrics& m) {
  json j;
  j["pairs"] = m.pairs;
  j["horizon"] = m.horizon;
  j["x"] = m.x;
  j["served"] = m.served;
  j["utility_sum"] = number(m.utility_sum);
  j["admitted_sum"] = number(m.admitted_sum);
  j["served_sum"] = number(m.served_sum);
  j["mean_q"] = number(m.mean_q);
  j["mean_z"] = number(m.mean_z);
  j["avg_interference"] = number(m.avg_interference);
  j["scheduled_slots"] = m.scheduled_slots;
  j["idle_slots"] = m.idle_slots;
  j["collision_slots"] = m.collision_slots;
  j["scheduled_fraction"] = number(m.scheduled_fraction);
  j["idle_fraction"] = number(m.idle_fraction);
  j["collision_fraction"] = number(m.collision_fraction);
  j["beta_hat"] = optional_number(m.beta_hat);
  j["weight_ratio"] = optional_number(m.weight_ratio);
  j["w_max"] = number(m.w_max);
  return j;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string metrics_to_json(const Metrics& m) { return metrics_json(m).dump(2) + "\n"; }

std::string noniid_to_json(const NoniidResult& r) {
  json j;
  j["average"] = metrics_json(r.average);
  j["runs"] = json::array();
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    json run = metrics_json(r.runs[k]);
    run["direct_means"] = r.direct_means[k];
    run["interference_means"] = r.interference_means[k];
    j["runs"].push_back(std::move(run));
  }
  return j.dump(2) + "\n";
}

std::string error_to_json(std::string_view kind, std::string_view key, std::string_view message) {
  json e;
  e["kind"] = kind;
  if (!key.empty()) e["key"] = key;
  e["message"] = message;
  return json{{"error", e}}.dump() + "\n";
}

std::string sweep_to_csv(std::string_view parameter, std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "parameter,value,valid,seed,utility_sum,served_sum,admitted_sum,mean_q,mean_z,avg_interference,"
         "scheduled_fraction,idle_fraction,collision_fraction,beta_hat,error\n";
  for (const SweepRow& row : rows) {
    const Metrics& m = row.metrics;
    out << parameter << ',' << format_number(row.value) << ',' << (row.valid ? 1 : 0) << ',' << row.seed;
    if (row.valid) {
      for (double v : {m.utility_sum, m.served_sum, m.admitted_sum, m.mean_q, m.mean_z, m.avg_interference,
                       m.scheduled_fraction, m.idle_fraction, m.collision_fraction}) {
        out << ',' << format_number(v);
      }
      out << ',' << (m.beta_hat ? format_number(*m.beta_hat) : "");
    } else {
      out << ",,,,,,,,,,";
    }
    std::string err = row.error;
    for (char& c : err) {
      if (c == '"') c = '\'';
    }
    out << ',' << (err.empty() ? "" : '"' + err + '"') << '\n';
  }
  return out.str();
}

std::string trace_to_csv(const Metrics& m) {
  const std::size_t n = m.pairs;
  std::ostringstream out;
  out << 't';
  for (const char* prefix : {"h", "g", "A"}) {
    for (std::size_t i = 1; i <= n; ++i) out << ',' << prefix << '_' << i;
  }
  out << ",winner,cause";
  for (std::size_t i = 1; i <= n; ++i) out << ",Q_" << i;
  out << ",Z,interference\n";
  for (const TraceRow& row : m.trace) {
    out << row.t;
    for (const auto* v : {&row.h, &row.g, &row.admitted}) {
      for (double x : *v) out << ',' << format_number(x);
    }
    out << ',';
    if (row.winner) out << *row.winner + 1;
    out << ',' << to_string(row.cause);
    for (double q : row.queues) out << ',' << format_number(q);
    out << ',' << format_number(row.z) << ',' << format_number(row.interference) << '\n';
  }
  return out.str();
}

std::string bound_to_csv(const BoundParams& params) {
  const double alpha = alpha_bound(params);
  const double statement = alpha_bound_statement_form(params);
  const auto pk = p_success_sequence(params.n, params.minislots);
  std::ostringstream out;
  out << "N,M,tau,beta,alpha,alpha_statement";
  for (std::size_t k = 1; k <= pk.size(); ++k) out << ",P_" << k;
  out << '\n'
      << params.n << ',' << params.minislots << ',' << format_number(params.tau) << ','
      << format_number(params.beta) << ',' << format_number(alpha) << ',' << format_number(statement);
  for (double p : pk) out << ',' << format_number(p);
  out << '\n';
  return out.str();
}

std::string boundary_to_csv(std::span<const BoundaryPoint> points, std::size_t pairs) {
  std::ostringstream out;
  out << "solver,gamma,target,feasible,converged";
  for (std::size_t j = 1; j <= pairs; ++j) out << ",alpha_" << j;
  for (std::size_t j = 1; j <= pairs; ++j) out << ",rate_" << j;
  out << ",interference";
  for (std::size_t j = 1; j <= pairs; ++j) out << ",lambda_" << j;
  out << ",mu,kkt_residual\n";
  for (const BoundaryPoint& p : points) {
    out << (p.constrained ? "dual" : "unconstrained") << ',' << format_number(p.gamma) << ',' << p.target + 1 << ',' << (p.feasible ? 1 : 0) << ','
        << (p.converged ? 1 : 0);
    // Target pair columns hold its own (unconstrained) entry: empty alpha, lambda 1.
    for (std::size_t j = 0; j < pairs; ++j) {
      out << ',';
      if (j != p.target) out << format_number(p.alpha[j < p.target ? j : j - 1]);
    }
    for (std::size_t j = 0; j < pairs; ++j) {
      out << ',';
      if (p.feasible) out << format_number(p.rates[j]);
    }
    out << ',' << (p.feasible ? format_number(p.interference) : "");
    for (std::size_t j = 0; j < pairs; ++j) {
      out << ',';
      if (p.feasible) out << format_number(p.multipliers.coefficient(j, p.target));
    }
    out << ',' << (p.feasible ? format_number(p.multipliers.mu) : "") << ','
        << (p.feasible ? format_number(p.kkt_residual) : "") << '\n';
  }
  return out.str();
}

}  // namespace d2d
