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

#include "madfold/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "madfold/cli/bench.hpp"
#include "madfold/cli/csv.hpp"
#include "madfold/cli/report.hpp"
#include "madfold/error.hpp"
#include "madfold/fold.hpp"
#include "madfold/kmeans.hpp"
#include "madfold/regress.hpp"
#include "madfold/sgd.hpp"
#include "madfold/sketch.hpp"

namespace madfold::cli {

namespace {

struct GlobalFlags {
  std::string data;
  std::optional<std::string> label;
  std::vector<std::string> features;
  bool intercept = false;
  bool no_header = false;
  std::size_t partitions = 1;
  std::uint64_t seed = 0;
  bool json = false;
};

struct LogRegrFlags {
  double tol = 1e-8;
  std::size_t max_iter = 100;
};

struct KMeansFlags {
  std::size_t k = 2;
  std::string seeding = "kmeanspp";
  std::size_t max_iter = 100;
  double reassign_tol = 0.0;
};

struct SgdFlags {
  std::string objective = "least_squares";
  double alpha0 = 0.01;
  std::size_t epochs = 10;
  double mu = 0.0;
  std::size_t rank = 1;
};

struct SketchFlags {
  std::string kind;
  double eps = kCountMinDefaultEps;
  double delta = kCountMinDefaultDelta;
  std::size_t bitmaps = kFmDefaultBitmaps;
  std::vector<std::string> queries;
  std::string save;
  std::string load;
};

// What a command hands back to be wrapped into the run report.
struct Outcome {
  json result;
  json ledger = nullptr;
  bool converged = true;
  std::size_t n = 0;
  std::size_t d = 0;
};

Dataset load_dataset(const GlobalFlags& g) {
  if (g.data.empty()) throw Error(ErrorKind::kArgument, "--data is required");
  DatasetSpec spec;
  spec.path = g.data;
  spec.has_header = !g.no_header;
  spec.label_column = g.label;
  spec.feature_columns = g.features;
  spec.add_intercept = g.intercept;
  return ingest_csv(spec);
}

template <class State>
json ledger_json(const IterationLedger<State>& ledger) {
  return {{"iterations", ledger.size()},
          {"spilled", ledger.spilled()},
          {"diagnostics", vector_json(ledger.diagnostics())}};
}

void require_labels(const Dataset& data, const char* command) {
  if (!data.has_labels()) {
    throw Error(ErrorKind::kArgument, std::string(command) + " needs --label");
  }
}

Outcome cmd_linregr(const GlobalFlags& g) {
  const Dataset data = load_dataset(g);
  require_labels(data, "linregr");
  Outcome o;
  o.n = data.n_rows();
  o.d = data.n_features();
  o.result = to_json(linregr(data, g.partitions));
  return o;
}

Outcome cmd_logregr(const GlobalFlags& g, const LogRegrFlags& f) {
  const Dataset data = load_dataset(g);
  require_labels(data, "logregr");
  LogRegrOptions options;
  options.tol = f.tol;
  options.max_iter = f.max_iter;
  options.p = g.partitions;
  LogRegrResult fit = logregr_fit(data, options);
  Outcome o;
  o.n = data.n_rows();
  o.d = data.n_features();
  o.result = to_json(fit);
  o.ledger = ledger_json(fit.ledger);
  o.converged = fit.converged;
  return o;
}

Outcome cmd_kmeans(const GlobalFlags& g, const KMeansFlags& f) {
  const Dataset data = load_dataset(g);
  KMeansOptions options;
  options.k = f.k;
  options.seeding = f.seeding == "random" ? Seeding::kRandom : Seeding::kKMeansPlusPlus;
  options.seed = g.seed;
  options.max_iter = f.max_iter;
  options.reassign_tol = f.reassign_tol;
  options.p = g.partitions;
  KMeansResult fit = kmeans_fit(data, options);
  Outcome o;
  o.n = data.n_rows();
  o.d = data.n_features();
  o.result = to_json(fit);
  o.ledger = ledger_json(fit.ledger);
  o.converged = fit.converged;
  return o;
}

// Logistic and hinge losses take labels in {-1, +1}; CSV files usually carry
// {0, 1}.
Dataset to_signed_labels(const Dataset& data) {
  const auto labels = data.labels();
  const bool zero_one = std::all_of(labels.begin(), labels.end(),
                                    [](double y) { return y == 0.0 || y == 1.0; });
  if (!zero_one) return data;
  std::vector<double> signed_labels(labels.size());
  std::transform(labels.begin(), labels.end(), signed_labels.begin(),
                 [](double y) { return y == 1.0 ? 1.0 : -1.0; });
  const auto x = data.feature_data();
  return Dataset(data.n_features(), std::vector<double>(x.begin(), x.end()),
                 std::move(signed_labels), data.feature_names());
}

Outcome cmd_sgd(const GlobalFlags& g, const SgdFlags& f) {
  Dataset data = load_dataset(g);
  require_labels(data, "sgd");
  Objective obj;
  obj.kind = objective_from_string(f.objective);
  obj.mu = f.mu;
  obj.rank = f.rank;
  obj.validate();
  if (obj.kind == ObjectiveKind::kLogistic || obj.kind == ObjectiveKind::kSvmHinge) {
    data = to_signed_labels(data);
  }
  SgdOptions options;
  options.alpha0 = f.alpha0;
  options.epochs = f.epochs;
  options.seed = g.seed;
  options.p = g.partitions;
  const SgdFit fit = sgd_fit(data, obj, options);
  Outcome o;
  o.n = data.n_rows();
  o.d = data.n_features();
  o.result = to_json(fit, obj);
  return o;
}

template <class Sketch>
Sketch load_sketch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return Sketch::load(in);
}

template <class Sketch>
void save_sketch(const Sketch& sketch, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  sketch.save(out);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
}

Outcome cmd_sketch(const GlobalFlags& g, const SketchFlags& f) {
  if (g.data.empty() && f.load.empty()) {
    throw Error(ErrorKind::kArgument, "sketch needs --data or --load");
  }
  ItemColumn items;
  if (!g.data.empty()) {
    std::optional<std::string> column;
    if (!g.features.empty()) column = g.features.front();
    items = ingest_items(g.data, !g.no_header, column);
  }

  Outcome o;
  o.n = items.size();
  o.d = 1;
  if (f.kind == "cm") {
    CountMinSketch sketch;
    if (!f.load.empty()) {
      sketch = load_sketch<CountMinSketch>(f.load);
      if (items.size() > 0) {
        sketch.merge(fold_parallel(CountMinFold{sketch.params()}, items, g.partitions));
      }
    } else {
      const auto params = CountMinParams::from_error(f.eps, f.delta, g.seed);
      sketch = fold_parallel(CountMinFold{params}, items, g.partitions);
    }
    json queries = json::array();
    for (const auto& q : f.queries) {
      queries.push_back({{"item", q}, {"estimate", sketch.estimate(q)}});
    }
    o.result = {{"kind", "cm"},
                {"depth", sketch.params().depth},
                {"width", sketch.params().width},
                {"total", sketch.total()},
                {"queries", std::move(queries)}};
    if (!f.save.empty()) save_sketch(sketch, f.save);
  } else {
    FlajoletMartinSketch sketch;
    if (!f.load.empty()) {
      sketch = load_sketch<FlajoletMartinSketch>(f.load);
      if (items.size() > 0) {
        sketch.merge(fold_parallel(FlajoletMartinFold{sketch.num_bitmaps(), sketch.seed()},
                                   items, g.partitions));
      }
    } else {
      sketch = fold_parallel(FlajoletMartinFold{f.bitmaps, g.seed}, items, g.partitions);
    }
    o.result = {{"kind", "fm"},
                {"bitmaps", sketch.num_bitmaps()},
                {"estimate", number_or_null(sketch.estimate())}};
    if (!f.save.empty()) save_sketch(sketch, f.save);
  }
  return o;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kPerfectSeparation:
    case ErrorKind::kDivergence:
      return kExitNotConverged;
    default:
      return kExitDataError;
  }
}

void emit_error(std::ostream& err, std::string_view kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel fold analytics over CSV data", "madfold"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--data", g.data, "CSV input file");
  app.add_option("--label", g.label, "label column");
  app.add_option("--features", g.features, "feature columns (default: all numeric)")
      ->delimiter(',');
  app.add_flag("--intercept", g.intercept, "prepend a constant-1 feature");
  app.add_flag("--no-header", g.no_header, "the CSV file has no header row");
  app.add_option("--partitions", g.partitions, "worker count")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for every stochastic choice");
  app.add_flag("--json", g.json, "emit JSON instead of text");

  app.add_subcommand("linregr", "ordinary least squares");

  LogRegrFlags lf;
  auto* logregr_cmd = app.add_subcommand("logregr", "logistic regression by IRLS");
  logregr_cmd->add_option("--tol", lf.tol)->check(CLI::PositiveNumber);
  logregr_cmd->add_option("--max-iter", lf.max_iter)->check(CLI::PositiveNumber);

  KMeansFlags kf;
  auto* kmeans_cmd = app.add_subcommand("kmeans", "Lloyd's k-means");
  kmeans_cmd->add_option("--k", kf.k)->check(CLI::PositiveNumber);
  kmeans_cmd->add_option("--seeding", kf.seeding)->check(CLI::IsMember({"kmeanspp", "random"}));
  kmeans_cmd->add_option("--max-iter", kf.max_iter)->check(CLI::PositiveNumber);
  kmeans_cmd->add_option("--reassign-tol", kf.reassign_tol)->check(CLI::Range(0.0, 1.0));

  SgdFlags sf;
  auto* sgd_cmd = app.add_subcommand("sgd", "stochastic gradient descent");
  sgd_cmd->add_option("--objective", sf.objective)
      ->check(CLI::IsMember({"least_squares", "lasso", "logistic", "hinge", "recommendation"}));
  sgd_cmd->add_option("--alpha0", sf.alpha0)->check(CLI::PositiveNumber);
  sgd_cmd->add_option("--epochs", sf.epochs)->check(CLI::PositiveNumber);
  sgd_cmd->add_option("--mu", sf.mu)->check(CLI::NonNegativeNumber);
  sgd_cmd->add_option("--rank", sf.rank)->check(CLI::PositiveNumber);

  SketchFlags kf_sketch;
  auto* sketch_cmd = app.add_subcommand("sketch", "Count-Min or Flajolet-Martin sketch");
  sketch_cmd->add_option("kind", kf_sketch.kind)
      ->required()
      ->check(CLI::IsMember({"cm", "fm"}));
  sketch_cmd->add_option("--eps", kf_sketch.eps)->check(CLI::Range(0.0, 1.0));
  sketch_cmd->add_option("--delta", kf_sketch.delta)->check(CLI::Range(0.0, 1.0));
  sketch_cmd->add_option("--bitmaps", kf_sketch.bitmaps)->check(CLI::PositiveNumber);
  sketch_cmd->add_option("--query", kf_sketch.queries)->allow_extra_args(false);
  sketch_cmd->add_option("--save", kf_sketch.save);
  sketch_cmd->add_option("--load", kf_sketch.load);

  BenchConfig bf;
  auto* bench_cmd = app.add_subcommand("bench", "regression scaling benchmark");
  bench_cmd->add_option("--algo", bf.algo)->check(CLI::IsMember({"linregr"}));
  bench_cmd->add_option("--vars", bf.vars)->delimiter(',');
  bench_cmd->add_option("--rows", bf.rows)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bf.threads)->delimiter(',');
  bench_cmd->add_option("--repeats", bf.repeats)->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, to_string(ErrorKind::kArgument), e.what());
    return kExitDataError;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "bench") {
      bf.seed = g.seed;
      const BenchResult result = run_bench(bf);
      if (g.json) {
        out << to_json(result).dump(2) << "\n";
      } else {
        out << render_table(result);
      }
      return kExitOk;
    }

    Outcome o;
    if (command == "linregr") o = cmd_linregr(g);
    else if (command == "logregr") o = cmd_logregr(g, lf);
    else if (command == "kmeans") o = cmd_kmeans(g, kf);
    else if (command == "sgd") o = cmd_sgd(g, sf);
    else o = cmd_sketch(g, kf_sketch);

    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    json report = {{"command", command},
                   {"args", args},
                   {"dataset", {{"n", o.n}, {"d", o.d}}},
                   {"partitions", g.partitions},
                   {"seed", g.seed},
                   {"converged", o.converged},
                   {"result", std::move(o.result)},
                   {"ledger", std::move(o.ledger)},
                   {"timing", {{"wall_ms", wall_ms}}}};
    if (g.json) {
      out << report.dump(2) << "\n";
    } else {
      out << render_text(report);
      if (!o.converged) out << "(not converged)\n";
    }
    return o.converged ? kExitOk : kExitNotConverged;
  } catch (const Error& e) {
    emit_error(err, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    emit_error(err, "internal_error", e.what());
    return kExitDataError;
  }
}

}  // namespace madfold::cli
