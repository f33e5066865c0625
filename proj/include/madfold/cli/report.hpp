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

#pragma once

#include <string>

#include "json.hpp"

#include "madfold/kmeans.hpp"
#include "madfold/regress.hpp"
#include "madfold/sgd.hpp"

namespace madfold::cli {

using nlohmann::json;

/// JSON has no infinities or NaN; those become null.
json number_or_null(double v);
json vector_json(const Vector& v);
json matrix_columns_json(const DenseMatrix& m);

json to_json(const LinRegrResult& r);
json to_json(const LogRegrResult& r);
json to_json(const KMeansResult& r);
json to_json(const SgdFit& fit, const Objective& obj);

/// %.6g formatting used by the text renderers.
std::string sig6(double v);

/// Plain-text rendering of a run report's result payload, one field per line.
std::string render_text(const json& report);

/// Copy of a report without its "timing" member.
json without_timing(json report);

}  // namespace madfold::cli
