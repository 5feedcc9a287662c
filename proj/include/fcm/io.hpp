#pragma once

// File formats: weight matrices (JSON or plain CSV), time-series CSV, and
// metric reports (JSON).

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fcm/core.hpp"
#include "fcm/metrics.hpp"

namespace fcm {

using json = nlohmann::json;

// {"n": n, "weights": [[w_00, ..., w_0(n-1)], ...]}; weights[j][i] = w_ji.
json weights_to_json(const WeightMatrix& w);
WeightMatrix weights_from_json(const json& j);

// Headerless n x n CSV, row j holds w_j0 .. w_j(n-1).
std::string weights_to_csv(const WeightMatrix& w);
WeightMatrix weights_from_csv(const std::string& text);

// Picks the format from the extension (.json or .csv).
void save_weights(const std::filesystem::path& path, const WeightMatrix& w);
WeightMatrix load_weights(const std::filesystem::path& path);

// Time series with header `seq,t,c1,...,cn`. Each sequence contributes rows
// t = 0..k; t = 0 is the initial vector.
std::string timeseries_to_csv(const ResponseSet& rs);
ResponseSet timeseries_from_csv(const std::string& text);
void save_timeseries(const std::filesystem::path& path, const ResponseSet& rs);
ResponseSet load_timeseries_csv(const std::filesystem::path& path);

json report_to_json(const MetricsReport& r);
json aggregate_to_json(const AggregateReport& r);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace fcm
