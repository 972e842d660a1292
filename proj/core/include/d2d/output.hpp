#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "d2d/boundary.hpp"
#include "d2d/bounds.hpp"
#include "d2d/simulation.hpp"

namespace d2d {

// Locale-independent, 9 significant digits, shortest general form.
// Infinities print as inf/-inf, NaN as nan.
std::string format_number(double v);

std::string metrics_to_json(const Metrics& m);
std::string noniid_to_json(const NoniidResult& r);

// {"error": {"kind": ..., "key": ..., "message": ...}}; key omitted when empty.
std::string error_to_json(std::string_view kind, std::string_view key, std::string_view message);

// Long format: one row per sweep value.
std::string sweep_to_csv(std::string_view parameter, std::span<const SweepRow> rows);

// t, h_1..h_N, g_1..g_N, A_1..A_N, winner, cause, Q_1..Q_N, Z, interference.
// winner is 1-based, empty when idle.
std::string trace_to_csv(const Metrics& m);

// N, M, tau, beta, alpha, alpha_statement, P_1..P_M.
std::string bound_to_csv(const BoundParams& params);

// solver (dual or unconstrained), gamma, target, feasible, converged, alpha_*, rate_*, interference,
// lambda_*, mu, kkt_residual. Pair columns are 1-based.
std::string boundary_to_csv(std::span<const BoundaryPoint> points, std::size_t pairs);

}  // namespace d2d
