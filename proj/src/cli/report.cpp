// Copyright 2026 The madfold Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "madfold/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace madfold::cli {

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

json matrix_columns_json(const DenseMatrix& m) {
  json out = json::array();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    out.push_back(vector_json(Vector(col.begin(), col.end())));
  }
  return out;
}

json to_json(const LinRegrResult& r) {
  return {
      {"coef", vector_json(r.coef)},
      {"r2", number_or_null(r.r2)},
      {"std_err", vector_json(r.std_err)},
      {"t_stats", vector_json(r.t_stats)},
      {"p_values", vector_json(r.p_values)},
      {"condition_no", number_or_null(r.condition_no)},
  };
}

json to_json(const LogRegrResult& r) {
  return {
      {"coef", vector_json(r.coef)},
      {"log_likelihood", number_or_null(r.log_likelihood)},
      {"num_iterations", r.num_iterations},
      {"converged", r.converged},
      {"monotone", r.monotone},
  };
}

json to_json(const KMeansResult& r) {
  return {
      {"centroids", matrix_columns_json(r.centroids)},
      {"assignments", r.assignments},
      {"objective", number_or_null(r.objective)},
      {"iterations", r.iterations},
      {"frac_reassigned_final", number_or_null(r.frac_reassigned_final)},
      {"converged", r.converged},
      {"seeding_duplicated", r.seeding_duplicated},
  };
}

json to_json(const SgdFit& fit, const Objective& obj) {
  json out;
  out["objective"] = std::string(to_string(obj.kind));
  if (obj.is_factorization()) {
    out["L"] = matrix_columns_json(fit.model.L);
    out["R"] = matrix_columns_json(fit.model.R);
  } else {
    out["x"] = vector_json(fit.model.x);
  }
  out["epochs"] = fit.model.epoch;
  json trace = json::array();
  for (const auto& entry : fit.trace) {
    trace.push_back({{"epoch", entry.epoch},
                     {"objective", number_or_null(entry.objective)},
                     {"step_size", number_or_null(entry.step_size)}});
  }
  out["trace"] = std::move(trace);
  out["final_objective"] =
      fit.trace.empty() ? json(nullptr) : number_or_null(fit.trace.back().objective);
  return out;
}

std::string sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string render_value(const json& v) {
  if (v.is_null()) return "null";
  if (v.is_number_float()) return sig6(v.get<double>());
  if (v.is_array()) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += render_value(v[i]);
    }
    return s + "}";
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string render_text(const json& report) {
  std::ostringstream out;
  std::size_t width = 0;
  const json& result = report.at("result");
  for (auto it = result.begin(); it != result.end(); ++it) {
    width = std::max(width, it.key().size());
  }
  out << "-[ " << report.value("command", std::string("result")) << " ]-\n";
  if (report.contains("dataset")) {
    out << "rows " << report["dataset"]["n"] << ", features " << report["dataset"]["d"]
        << ", partitions " << report.value("partitions", 1) << "\n";
  }
  for (auto it = result.begin(); it != result.end(); ++it) {
    if (it.key() == "trace" || it.key() == "assignments") continue;
    out << it.key() << std::string(width - it.key().size() + 1, ' ') << "| "
        << render_value(it.value()) << "\n";
  }
  return out.str();
}

json without_timing(json report) {
  report.erase("timing");
  return report;
}

}  // namespace madfold::cli
