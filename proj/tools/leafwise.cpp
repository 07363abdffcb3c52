// leafwise: rigidity-theory calculations for linear actions on tori from the
// command line. Every subcommand reads JSON (inline or from a file), writes a
// JSON report to stdout and optionally to --out, emits plot-ready CSV
// sidecars next to --out, and records a run manifest with input digests.
//
// Exit codes: 0 solved/pass, 2 mathematical obstruction, 3 divergent or
// inconclusive, 1 usage or schema error.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "leafwise/circle.hpp"
#include "leafwise/cohomeq.hpp"
#include "leafwise/diophantine.hpp"
#include "leafwise/fourier.hpp"
#include "leafwise/json_io.hpp"
#include "leafwise/liealg.hpp"
#include "leafwise/parallel.hpp"
#include "leafwise/refs.hpp"
#include "leafwise/suspension.hpp"

namespace {

using leafwise::io::json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accumulates everything the run manifest needs.
struct RunContext {
  std::string subcommand;
  json config = json::object();
  json inputs = json::object();
  std::string out_path;
  std::string format = "json";
  std::int64_t seed = 0;
  std::chrono::steady_clock::time_point t0 =
      std::chrono::steady_clock::now();
};

std::string trim_front(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// Reads a JSON argument that is either inline text or a path to a file.
// Records a content digest under the given label either way.
json load_json_arg(const std::string& arg, RunContext& ctx,
                   const std::string& label) {
  const std::string lead = trim_front(arg);
  std::string text;
  std::string digest_key;
  if (!lead.empty() && (lead[0] == '{' || lead[0] == '[')) {
    text = arg;
    digest_key = "inline:" + label;
  } else {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw UsageError("cannot open input file: " + arg);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    digest_key = arg;
  }
  ctx.inputs[digest_key] = leafwise::io::fnv1a_hex(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw leafwise::io::SchemaError("$", std::string("invalid JSON: ") +
                                             e.what());
  }
}

// Unwraps report JSON back to the payload it embeds, so that each
// subcommand's output can be fed back in as input.
json unwrap(const json& j, std::initializer_list<const char*> keys) {
  if (j.is_object())
    for (const char* k : keys)
      if (j.contains(k)) return j[k];
  return j;
}

Eigen::MatrixXd read_matrix(const json& j) {
  return leafwise::io::matrix_from_json(unwrap(j, {"matrix", "theta"}), "$");
}

leafwise::FourierSeries read_series(const json& j) {
  return leafwise::io::series_from_json(unwrap(j, {"g", "h"}), "$");
}

leafwise::CircleMap read_circle_map(const json& j) {
  json inner = j;
  if (j.is_object() && !j.contains("drift")) {
    if (j.contains("map"))
      inner = j["map"];
    else if (j.contains("conjugated"))
      inner = j["conjugated"];
  }
  return leafwise::io::circle_map_from_json(inner, "$");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write output file: " + path);
  out << content;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return std::string(buf);
}

std::string freq_table_csv(const std::vector<leafwise::Freq>& modes) {
  std::string out;
  const int dims = modes.empty() ? 0 : static_cast<int>(modes[0].size());
  for (int i = 0; i < dims; ++i) {
    out += "m" + std::to_string(i + 1);
    out += (i + 1 < dims) ? ',' : '\n';
  }
  for (const auto& m : modes) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      out += std::to_string(m(i));
      out += (i + 1 < m.size()) ? ',' : '\n';
    }
  }
  return out;
}

// Writes stdout payload, --out file, CSV sidecars, and the manifest.
void emit(RunContext& ctx, const json& result, const std::string& csv,
          const std::vector<std::pair<std::string, std::string>>& sidecars) {
  const std::string payload = result.dump(2) + "\n";
  if (ctx.format == "csv" && !csv.empty())
    std::cout << csv;
  else
    std::cout << payload;

  if (!ctx.out_path.empty()) {
    write_file(ctx.out_path, payload);
    for (const auto& [suffix, content] : sidecars)
      write_file(ctx.out_path + suffix, content);
  }

  ctx.config["out"] = ctx.out_path;
  ctx.config["format"] = ctx.format;
  ctx.config["seed"] = ctx.seed;
  ctx.config["threads"] = leafwise::max_threads();
  json manifest;
  manifest["subcommand"] = ctx.subcommand;
  manifest["config"] = ctx.config;
  manifest["inputs"] = ctx.inputs;
  manifest["version"] = kVersion;
  manifest["duration_ms"] =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - ctx.t0)
          .count();
  manifest["timestamp"] = utc_timestamp();
  const std::string manifest_path = ctx.out_path.empty()
                                        ? "leafwise-run.manifest.json"
                                        : ctx.out_path + ".manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");
}

void attach_common(CLI::App* sub, RunContext& ctx) {
  sub->add_option("--out", ctx.out_path, "write the JSON report here");
  sub->add_option("--format", ctx.format, "stdout format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", ctx.seed, "recorded in the manifest");
}

int status_exit(leafwise::SolveStatus s) {
  switch (s) {
    case leafwise::SolveStatus::solved:
      return 0;
    case leafwise::SolveStatus::obstructed:
      return 2;
    case leafwise::SolveStatus::divergent:
      return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "leafwise: cohomological equations, Diophantine diagnostics, Lie "
      "algebra cohomology, suspension dimension counts, and circle-map "
      "conjugacy analysis for linear actions on tori"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunContext ctx;
  int exit_code = 0;

  // ---- solve-cohomeq ------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "solve-cohomeq",
        "solve X_v g = f - c over T^N, or the simultaneous system for a "
        "closed leafwise one-form");
    auto field = std::make_shared<std::string>();
    auto matrix = std::make_shared<std::string>();
    auto opts = std::make_shared<leafwise::SolveOptions>();
    sub->add_option("--field", *field,
                    "data: a Fourier series, or a one-form with components")
        ->required();
    sub->add_option("--matrix", *matrix, "generator rows (flow: one row)");
    sub->add_option("--tol", opts->tol, "residual / obstruction floor");
    attach_common(sub, ctx);
    sub->callback([&, field, matrix, opts] {
      ctx.subcommand = "solve-cohomeq";
      ctx.config["field"] = *field;
      ctx.config["matrix"] = *matrix;
      ctx.config["tol"] = opts->tol;
      ctx.config["blowup_factor"] = opts->blowup_factor;
      ctx.config["resonance_scale"] = opts->resonance_scale;

      const json fj = load_json_arg(*field, ctx, "field");
      leafwise::SolveReport report;
      if (fj.is_object() && fj.contains("components")) {
        if (!matrix->empty())
          throw UsageError(
              "--matrix conflicts with a one-form --field; the form carries "
              "its own matrix");
        report = leafwise::solve_action(
            leafwise::io::one_form_from_json(fj, "$"), *opts);
      } else {
        if (matrix->empty())
          throw UsageError("--matrix is required with a series --field");
        const Eigen::MatrixXd v =
            read_matrix(load_json_arg(*matrix, ctx, "matrix"));
        if (v.rows() != 1)
          throw UsageError(
              "flow solve takes a single generator row; pass a one-form "
              "with components for p > 1");
        report = leafwise::solve_flow(read_series(fj), v.row(0), *opts);
      }

      std::vector<std::pair<std::string, std::string>> sidecars;
      const std::string table_csv =
          leafwise::io::residual_table_csv(report.residual_table);
      sidecars.emplace_back(".residuals.csv", table_csv);
      if (!report.obstruction_modes.empty())
        sidecars.emplace_back(".obstructions.csv",
                              freq_table_csv(report.obstruction_modes));
      emit(ctx, leafwise::io::solve_report_to_json(report), table_csv,
           sidecars);
      exit_code = status_exit(report.status);
    });
  }

  // ---- diophantine-scan ---------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "diophantine-scan",
        "small-divisor scan: type estimate, shell minimizers, offenders");
    auto matrix = std::make_shared<std::string>();
    auto radius = std::make_shared<int>(0);
    auto opts = std::make_shared<leafwise::ScanOptions>();
    sub->add_option("--matrix", *matrix, "p x N generator rows")->required();
    sub->add_option("--radius", *radius, "scan box: 0 < ||m||_inf <= radius")
        ->required();
    sub->add_option("--budget", opts->mode_budget, "mode count cap");
    sub->add_option("--offenders", opts->offender_count,
                    "offender table length");
    attach_common(sub, ctx);
    sub->callback([&, matrix, radius, opts] {
      ctx.subcommand = "diophantine-scan";
      ctx.config["matrix"] = *matrix;
      ctx.config["radius"] = *radius;
      ctx.config["budget"] = opts->mode_budget;
      ctx.config["offenders"] = opts->offender_count;
      ctx.config["resonance_scale"] = opts->resonance_scale;

      const leafwise::ActionMatrix am(
          read_matrix(load_json_arg(*matrix, ctx, "matrix")));
      const leafwise::DiophantineReport report =
          leafwise::estimate_type(am, *radius, *opts);

      const std::string csv = leafwise::io::offenders_csv(report);
      emit(ctx, leafwise::io::diophantine_report_to_json(report), csv,
           {{".offenders.csv", csv}});
      if (!report.resonances.empty())
        exit_code = 2;
      else if (!report.numeric_resonances.empty())
        exit_code = 3;
    });
  }

  // ---- lie-cohomology -----------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "lie-cohomology",
        "Chevalley-Eilenberg cohomology dimensions of a finite-dimensional "
        "Lie algebra");
    auto algebra = std::make_shared<std::string>();
    auto rank_tol = std::make_shared<double>(1e-9);
    sub->add_option("--algebra", *algebra, "structure constants JSON")
        ->required();
    sub->add_option("--tol", *rank_tol, "singular-value rank cutoff");
    attach_common(sub, ctx);
    sub->callback([&, algebra, rank_tol] {
      ctx.subcommand = "lie-cohomology";
      ctx.config["algebra"] = *algebra;
      ctx.config["tol"] = *rank_tol;

      const leafwise::LieAlgebra alg = leafwise::io::algebra_from_json(
          load_json_arg(*algebra, ctx, "algebra"), "$");
      const leafwise::AlgebraValidation val = leafwise::validate(alg);
      if (!val.ok)
        throw UsageError(
            "not a Lie algebra: antisymmetry residual " +
            leafwise::io::format_double(val.antisymmetry_residual) +
            ", jacobi residual " +
            leafwise::io::format_double(val.jacobi_residual) +
            ", realization residual " +
            leafwise::io::format_double(val.realization_residual));

      const leafwise::CohomologyDims cd =
          leafwise::cohomology_dims(alg, *rank_tol);
      json out = leafwise::io::cohomology_to_json(cd);
      out["validation"] = {
          {"antisymmetry_residual", val.antisymmetry_residual},
          {"jacobi_residual", val.jacobi_residual},
          {"realization_residual", val.realization_residual},
          {"ok", val.ok}};
      emit(ctx, out, "", {});
      if (!cd.warnings.empty()) exit_code = 3;
    });
  }

  // ---- suspension-h1 ------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "suspension-h1",
        "Mayer-Vietoris dimension count for a suspension foliation");
    auto data = std::make_shared<std::string>();
    auto degree = std::make_shared<int>(1);
    auto rank_tol = std::make_shared<double>(1e-9);
    sub->add_option("--data", *data, "leaf dims and holonomy maps JSON")
        ->required();
    sub->add_option("--degree", *degree, "cohomology degree");
    sub->add_option("--tol", *rank_tol, "singular-value rank cutoff");
    attach_common(sub, ctx);
    sub->callback([&, data, degree, rank_tol] {
      ctx.subcommand = "suspension-h1";
      ctx.config["data"] = *data;
      ctx.config["degree"] = *degree;
      ctx.config["tol"] = *rank_tol;

      const leafwise::SuspensionData s = leafwise::io::suspension_from_json(
          load_json_arg(*data, ctx, "data"), "$");
      const leafwise::MvDimension mv =
          leafwise::mv_dimension(s, *degree, *rank_tol);
      emit(ctx, leafwise::io::mv_to_json(mv), "", {});
    });
  }

  // ---- toral --------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "toral",
        "hyperbolic toral suspension: eigendata and first cohomology");
    auto matrix = std::make_shared<std::string>();
    auto rank_tol = std::make_shared<double>(1e-9);
    sub->add_option("--matrix", *matrix, "2x2 integer matrix, det 1, |tr| > 2")
        ->required();
    sub->add_option("--tol", *rank_tol, "singular-value rank cutoff");
    attach_common(sub, ctx);
    sub->callback([&, matrix, rank_tol] {
      ctx.subcommand = "toral";
      ctx.config["matrix"] = *matrix;
      ctx.config["tol"] = *rank_tol;

      const Eigen::MatrixXd m =
          read_matrix(load_json_arg(*matrix, ctx, "matrix"));
      if (m.rows() != 2 || m.cols() != 2)
        throw leafwise::io::SchemaError("$", "expected a 2x2 matrix");
      Eigen::Matrix2i a;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
          const double v = m(i, k);
          if (v != std::nearbyint(v) || std::abs(v) > 2147483647.0)
            throw leafwise::io::SchemaError(
                "$[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                "expected an integer entry");
          a(i, k) = static_cast<int>(v);
        }
      const leafwise::ToralReport report =
          leafwise::toral_pipeline(a, *rank_tol);
      emit(ctx, leafwise::io::toral_to_json(report), "", {});
    });
  }

  // ---- rotation-number ----------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "rotation-number",
        "rotation number of a circle map with a rigorous enclosure");
    auto map = std::make_shared<std::string>();
    auto iters = std::make_shared<std::int64_t>(1000000);
    sub->add_option("--map", *map, "circle map JSON {drift, periodic}")
        ->required();
    sub->add_option("--iters", *iters, "orbit length");
    attach_common(sub, ctx);
    sub->callback([&, map, iters] {
      ctx.subcommand = "rotation-number";
      ctx.config["map"] = *map;
      ctx.config["iters"] = *iters;

      const leafwise::CircleMap f =
          read_circle_map(load_json_arg(*map, ctx, "map"));
      const leafwise::OrientationReport orient =
          leafwise::check_orientation(f);
      const leafwise::RotationNumberResult r =
          leafwise::rotation_number(f, *iters);
      json out = leafwise::io::rotation_to_json(r);
      out["orientation"] = {{"grid_min_derivative",
                             orient.grid_min_derivative},
                            {"margin", orient.margin},
                            {"certified", orient.certified},
                            {"ok", orient.ok}};
      emit(ctx, out, "", {});
      if (!orient.ok) exit_code = 3;
    });
  }

  // ---- moser-check --------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "moser-check",
        "simultaneous small-divisor bound for a family of rotation numbers");
    auto taus = std::make_shared<std::string>();
    auto radius = std::make_shared<int>(0);
    auto exponent = std::make_shared<double>(1.0);
    auto threshold = std::make_shared<double>(0.0);
    sub->add_option("--taus", *taus, "JSON array of rotation numbers")
        ->required();
    sub->add_option("--radius", *radius, "check 0 < m <= radius")->required();
    sub->add_option("--exp", *exponent, "scaling exponent t in D(m) m^t");
    sub->add_option("--threshold", *threshold,
                    "required lower bound on min D(m) m^t");
    attach_common(sub, ctx);
    sub->callback([&, taus, radius, exponent, threshold] {
      ctx.subcommand = "moser-check";
      ctx.config["taus"] = *taus;
      ctx.config["radius"] = *radius;
      ctx.config["exp"] = *exponent;
      ctx.config["threshold"] = *threshold;

      const json tj = load_json_arg(*taus, ctx, "taus");
      if (!tj.is_array() || tj.empty())
        throw leafwise::io::SchemaError("$",
                                        "expected a non-empty array of "
                                        "numbers");
      Eigen::VectorXd alphas(static_cast<Eigen::Index>(tj.size()));
      for (std::size_t i = 0; i < tj.size(); ++i) {
        if (!tj[i].is_number())
          throw leafwise::io::SchemaError("$[" + std::to_string(i) + "]",
                                          "expected a number");
        alphas(static_cast<Eigen::Index>(i)) = tj[i].get<double>();
      }

      const leafwise::MoserReport report =
          leafwise::check_moser_condition(alphas, *radius, *exponent,
                                          *threshold);
      const std::string csv = leafwise::io::moser_csv(report);
      emit(ctx, leafwise::io::moser_to_json(report), csv,
           {{".divisors.csv", csv}});
      if (!report.holds) exit_code = 2;
    });
  }

  // ---- kam ----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "kam",
        "iterated conjugation of a circle map toward a target rotation");
    auto family = std::make_shared<std::string>();
    auto steps = std::make_shared<int>(3);
    auto alpha = std::make_shared<double>(
        std::numeric_limits<double>::quiet_NaN());
    auto opts = std::make_shared<leafwise::KamOptions>();
    sub->add_option("--family", *family,
                    "JSON {alpha, map} or a circle map with --alpha")
        ->required();
    sub->add_option("--steps", *steps, "conjugation steps");
    sub->add_option("--alpha", *alpha, "target rotation number");
    sub->add_option("--truncation", opts->truncation,
                    "radius cap for conjugacies");
    sub->add_option("--tol", opts->tol, "resonant-mode obstruction floor");
    attach_common(sub, ctx);
    sub->callback([&, family, steps, alpha, opts] {
      ctx.subcommand = "kam";
      ctx.config["family"] = *family;
      ctx.config["steps"] = *steps;
      ctx.config["truncation"] = opts->truncation;
      ctx.config["tol"] = opts->tol;

      const json fj = load_json_arg(*family, ctx, "family");
      double target = *alpha;
      if (std::isnan(target) && fj.is_object() && fj.contains("alpha")) {
        if (!fj["alpha"].is_number())
          throw leafwise::io::SchemaError("$.alpha", "expected a number");
        target = fj["alpha"].get<double>();
      }
      if (std::isnan(target))
        throw UsageError(
            "no target rotation number: pass --alpha or an \"alpha\" field");
      ctx.config["alpha"] = target;

      const leafwise::CircleMap f = read_circle_map(fj);
      opts->max_steps = *steps;
      const leafwise::KamReport report =
          leafwise::kam_iterate(f, target, *opts);
      json out = leafwise::io::kam_to_json(report);
      out["alpha"] = target;

      const std::string csv = leafwise::io::kam_steps_csv(report);
      emit(ctx, out, csv, {{".steps.csv", csv}});
      if (report.converged)
        exit_code = 0;
      else if (report.status == leafwise::SolveStatus::obstructed)
        exit_code = 2;
      else
        exit_code = 3;
    });
  }

  // ---- equivalence --------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "equivalence",
        "decide parameter equivalence V2 = Theta * V1 of linear actions");
    auto v1 = std::make_shared<std::string>();
    auto v2 = std::make_shared<std::string>();
    auto tol = std::make_shared<double>(1e-9);
    sub->add_option("--v1", *v1, "first generator matrix")->required();
    sub->add_option("--v2", *v2, "second generator matrix")->required();
    sub->add_option("--tol", *tol, "relative residual tolerance");
    attach_common(sub, ctx);
    sub->callback([&, v1, v2, tol] {
      ctx.subcommand = "equivalence";
      ctx.config["v1"] = *v1;
      ctx.config["v2"] = *v2;
      ctx.config["tol"] = *tol;

      const leafwise::ActionMatrix a(
          read_matrix(load_json_arg(*v1, ctx, "v1")));
      const leafwise::ActionMatrix b(
          read_matrix(load_json_arg(*v2, ctx, "v2")));
      const leafwise::EquivalenceReport report =
          leafwise::parameter_equivalence(a, b, *tol);
      emit(ctx, leafwise::io::equivalence_to_json(report), "", {});
      if (!report.equivalent) exit_code = 2;
    });
  }

  // ---- obstructions -------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "obstructions",
        "resonant modes of a linear action inside a truncation box");
    auto matrix = std::make_shared<std::string>();
    auto radius = std::make_shared<int>(0);
    auto opts = std::make_shared<leafwise::ScanOptions>();
    sub->add_option("--matrix", *matrix, "p x N generator rows")->required();
    sub->add_option("--radius", *radius, "box: 0 < ||m||_inf <= radius")
        ->required();
    sub->add_option("--budget", opts->mode_budget, "mode count cap");
    attach_common(sub, ctx);
    sub->callback([&, matrix, radius, opts] {
      ctx.subcommand = "obstructions";
      ctx.config["matrix"] = *matrix;
      ctx.config["radius"] = *radius;
      ctx.config["budget"] = opts->mode_budget;

      const leafwise::ActionMatrix am(
          read_matrix(load_json_arg(*matrix, ctx, "matrix")));
      const leafwise::ObstructionSpace space =
          leafwise::obstruction_space(am, *radius, *opts);
      const std::string csv = leafwise::io::obstruction_csv(space);
      emit(ctx, leafwise::io::obstruction_to_json(space), csv,
           {{".modes.csv", csv}});
      if (space.dimension > 0) exit_code = 2;
    });
  }

  // ---- rigidity-report ----------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "rigidity-report",
        "truncated infinitesimal deformation count for a linear action");
    auto matrix = std::make_shared<std::string>();
    auto radius = std::make_shared<int>(0);
    auto opts = std::make_shared<leafwise::ScanOptions>();
    sub->add_option("--matrix", *matrix, "p x N generator rows")->required();
    sub->add_option("--radius", *radius, "box: 0 < ||m||_inf <= radius")
        ->required();
    sub->add_option("--budget", opts->mode_budget, "mode count cap");
    attach_common(sub, ctx);
    sub->callback([&, matrix, radius, opts] {
      ctx.subcommand = "rigidity-report";
      ctx.config["matrix"] = *matrix;
      ctx.config["radius"] = *radius;
      ctx.config["budget"] = opts->mode_budget;

      const leafwise::ActionMatrix am(
          read_matrix(load_json_arg(*matrix, ctx, "matrix")));
      const leafwise::RigidityReport report =
          leafwise::infinitesimal_rigidity_report(am, *radius, *opts);
      emit(ctx, leafwise::io::rigidity_to_json(report), "", {});
      if (!report.infinitesimally_rigid) exit_code = 2;
    });
  }

  // ---- refs ---------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "refs", "registry of known cohomology results (reference only)");
    auto id = std::make_shared<std::string>();
    auto query = std::make_shared<std::string>();
    sub->add_option("--id", *id, "exact entry id");
    sub->add_option("--query", *query, "substring over ids and statements");
    attach_common(sub, ctx);
    sub->callback([&, id, query] {
      ctx.subcommand = "refs";
      ctx.config["id"] = *id;
      ctx.config["query"] = *query;

      if (!id->empty()) {
        const leafwise::ReferenceEntry* entry = leafwise::find_reference(*id);
        if (entry == nullptr)
          throw UsageError("unknown reference id: " + *id);
        emit(ctx, leafwise::io::reference_to_json(*entry), "", {});
        return;
      }
      json out = json::array();
      for (const auto& entry : leafwise::search_references(*query))
        out.push_back(leafwise::io::reference_to_json(entry));
      emit(ctx, out, "", {});
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const leafwise::io::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
