#include "leafwise/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace leafwise {
namespace io {

namespace {

std::string item(const std::string& at, std::size_t i) {
  return at + "[" + std::to_string(i) + "]";
}

const json& need(const json& j, const char* key, const std::string& at) {
  if (!j.is_object()) throw SchemaError(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(at + "." + key, "missing required field");
  return *it;
}

int need_int(const json& j, const char* key, const std::string& at) {
  const json& v = need(j, key, at);
  if (!v.is_number_integer())
    throw SchemaError(at + "." + key, "expected an integer");
  return v.get<int>();
}

double need_number(const json& j, const char* key, const std::string& at) {
  const json& v = need(j, key, at);
  if (!v.is_number()) throw SchemaError(at + "." + key, "expected a number");
  return v.get<double>();
}

bool need_bool(const json& j, const char* key, const std::string& at) {
  const json& v = need(j, key, at);
  if (!v.is_boolean()) throw SchemaError(at + "." + key, "expected a boolean");
  return v.get<bool>();
}

json freq_json(const Freq& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.size(); ++i) a.push_back(m(i));
  return a;
}

json freq_list_json(const std::vector<Freq>& v) {
  json a = json::array();
  for (const Freq& m : v) a.push_back(freq_json(m));
  return a;
}

json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json residual_rows_json(const std::vector<ModeResidual>& rows) {
  json a = json::array();
  for (const auto& r : rows) {
    json e;
    e["m"] = freq_json(r.m);
    e["divisor"] = r.divisor;
    e["amplification"] = finite_or_null(r.amplification);
    a.push_back(e);
  }
  return a;
}

json complex_json(const Complex& c) {
  json e;
  e["re"] = c.real();
  e["im"] = c.imag();
  return e;
}

}  // namespace

json series_to_json(const FourierSeries& f) {
  json j;
  j["dims"] = f.dims();
  j["real"] = f.real_flag();
  json arr = json::array();
  for (const Freq& m : f.sorted_modes()) {
    const Complex c = f.coeff(m);
    if (std::abs(c) < kCoeffWriteEps) continue;
    json e;
    e["m"] = freq_json(m);
    e["re"] = c.real();
    e["im"] = c.imag();
    arr.push_back(e);
  }
  j["coeffs"] = arr;
  return j;
}

FourierSeries series_from_json(const json& j, const std::string& at) {
  const int dims = need_int(j, "dims", at);
  if (dims < 1) throw SchemaError(at + ".dims", "must be >= 1");
  const bool real = need_bool(j, "real", at);
  const json& coeffs = need(j, "coeffs", at);
  if (!coeffs.is_array())
    throw SchemaError(at + ".coeffs", "expected an array");

  FourierSeries out(dims, real);
  for (std::size_t t = 0; t < coeffs.size(); ++t) {
    const std::string here = item(at + ".coeffs", t);
    const json& e = coeffs[t];
    const json& mj = need(e, "m", here);
    if (!mj.is_array() || mj.size() != static_cast<std::size_t>(dims))
      throw SchemaError(here + ".m",
                        "expected an array of " + std::to_string(dims) +
                            " integers");
    Freq m(dims);
    for (std::size_t i = 0; i < mj.size(); ++i) {
      if (!mj[i].is_number_integer())
        throw SchemaError(item(here + ".m", i), "expected an integer");
      m(static_cast<Eigen::Index>(i)) = mj[i].get<int>();
    }
    const double re = need_number(e, "re", here);
    const double im = need_number(e, "im", here);
    out.set(m, Complex{re, im});
  }
  if (real && !out.conjugate_symmetric(1e-12))
    throw SchemaError(at + ".coeffs",
                      "series flagged real lacks conjugate symmetry");
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& at) {
  if (!j.is_array() || j.empty())
    throw SchemaError(at, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].empty())
      throw SchemaError(item(at, i), "expected a non-empty row array");
    if (i == 0)
      cols = j[i].size();
    else if (j[i].size() != cols)
      throw SchemaError(item(at, i), "ragged rows");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw SchemaError(item(item(at, i), k), "expected a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          j[i][k].get<double>();
    }
  return m;
}

json algebra_to_json(const LieAlgebra& alg) {
  json j;
  j["n"] = alg.n;
  json c = json::array();
  for (int i = 0; i < alg.n; ++i)
    for (int k = i + 1; k < alg.n; ++k)
      for (int l = 0; l < alg.n; ++l) {
        const double val = alg.table(i * alg.n + k, l);
        if (val == 0.0) continue;
        json e;
        e["i"] = i + 1;
        e["j"] = k + 1;
        e["k"] = l + 1;
        e["val"] = val;
        c.push_back(e);
      }
  j["c"] = c;
  if (alg.has_rep()) {
    json mats = json::array();
    for (const auto& r : alg.rep) mats.push_back(matrix_to_json(r));
    j["matrices"] = mats;
  }
  return j;
}

LieAlgebra algebra_from_json(const json& j, const std::string& at) {
  const int n = need_int(j, "n", at);
  if (n < 1) throw SchemaError(at + ".n", "must be >= 1");
  const json& c = need(j, "c", at);
  if (!c.is_array()) throw SchemaError(at + ".c", "expected an array");

  LieAlgebra alg;
  alg.n = n;
  alg.table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, n);
  for (std::size_t t = 0; t < c.size(); ++t) {
    const std::string here = item(at + ".c", t);
    const int i = need_int(c[t], "i", here);
    const int jj = need_int(c[t], "j", here);
    const int k = need_int(c[t], "k", here);
    const double val = need_number(c[t], "val", here);
    if (i < 1 || i > n) throw SchemaError(here + ".i", "index out of range");
    if (jj < 1 || jj > n) throw SchemaError(here + ".j", "index out of range");
    if (k < 1 || k > n) throw SchemaError(here + ".k", "index out of range");
    if (i >= jj)
      throw SchemaError(here + ".i",
                        "entries use i < j; the mirror term is implied by "
                        "antisymmetry");
    alg.table((i - 1) * n + (jj - 1), k - 1) = val;
    alg.table((jj - 1) * n + (i - 1), k - 1) = -val;
  }

  if (j.contains("matrices")) {
    const json& mats = j["matrices"];
    if (!mats.is_array() || mats.size() != static_cast<std::size_t>(n))
      throw SchemaError(at + ".matrices",
                        "expected one matrix per basis element");
    alg.rep.reserve(mats.size());
    for (std::size_t t = 0; t < mats.size(); ++t)
      alg.rep.push_back(matrix_from_json(mats[t], item(at + ".matrices", t)));
    const Eigen::Index d = alg.rep[0].rows();
    for (std::size_t t = 0; t < alg.rep.size(); ++t)
      if (alg.rep[t].rows() != d || alg.rep[t].cols() != d)
        throw SchemaError(item(at + ".matrices", t),
                          "realization matrices must be square of one size");
  }
  return alg;
}

json suspension_to_json(const SuspensionData& s) {
  json j;
  j["dims"] = s.dims;
  json maps = json::array();
  for (const auto& m : s.maps) maps.push_back(matrix_to_json(m));
  j["maps"] = maps;
  return j;
}

SuspensionData suspension_from_json(const json& j, const std::string& at) {
  const json& dims = need(j, "dims", at);
  if (!dims.is_array() || dims.empty())
    throw SchemaError(at + ".dims", "expected a non-empty array");
  SuspensionData s;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!dims[k].is_number_integer() || dims[k].get<int>() < 0)
      throw SchemaError(item(at + ".dims", k), "expected an integer >= 0");
    s.dims.push_back(dims[k].get<int>());
  }
  const json& maps = need(j, "maps", at);
  if (!maps.is_array() || maps.size() != dims.size())
    throw SchemaError(at + ".maps", "expected one matrix per degree");
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const std::string here = item(at + ".maps", k);
    if (s.dims[k] == 0) {
      if (!maps[k].is_array() || !maps[k].empty())
        throw SchemaError(here, "degree of dimension 0 takes an empty array");
      s.maps.push_back(Eigen::MatrixXd(0, 0));
      continue;
    }
    Eigen::MatrixXd m = matrix_from_json(maps[k], here);
    if (m.rows() != s.dims[k] || m.cols() != s.dims[k])
      throw SchemaError(here, "matrix size does not match the dimension");
    s.maps.push_back(std::move(m));
  }
  return s;
}

json circle_map_to_json(const CircleMap& f) {
  json j;
  j["drift"] = f.drift;
  j["periodic"] = series_to_json(f.periodic);
  return j;
}

CircleMap circle_map_from_json(const json& j, const std::string& at) {
  const double drift = need_number(j, "drift", at);
  FourierSeries periodic =
      series_from_json(need(j, "periodic", at), at + ".periodic");
  if (periodic.dims() != 1)
    throw SchemaError(at + ".periodic.dims", "circle maps are 1-D");
  if (!periodic.real_flag())
    throw SchemaError(at + ".periodic.real", "circle maps are real");
  return CircleMap(drift, std::move(periodic));
}

json one_form_to_json(const LeafwiseOneForm& w) {
  json j;
  j["matrix"] = matrix_to_json(w.base.rows());
  json comp = json::array();
  for (const auto& f : w.comp) comp.push_back(series_to_json(f));
  j["components"] = comp;
  return j;
}

LeafwiseOneForm one_form_from_json(const json& j, const std::string& at) {
  Eigen::MatrixXd rows = matrix_from_json(need(j, "matrix", at), at + ".matrix");
  LeafwiseOneForm w;
  try {
    w.base = ActionMatrix(rows);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(at + ".matrix", e.what());
  }
  const json& comp = need(j, "components", at);
  if (!comp.is_array() || comp.size() != static_cast<std::size_t>(w.base.p()))
    throw SchemaError(at + ".components",
                      "expected one series per generator row");
  for (std::size_t i = 0; i < comp.size(); ++i) {
    FourierSeries f =
        series_from_json(comp[i], item(at + ".components", i));
    if (f.dims() != w.base.N())
      throw SchemaError(item(at + ".components", i),
                        "series dimension does not match the torus");
    w.comp.push_back(std::move(f));
  }
  return w;
}

json solve_report_to_json(const SolveReport& r) {
  json j;
  j["status"] = to_string(r.status);
  j["g"] = series_to_json(r.g);
  json c = json::array();
  for (Eigen::Index i = 0; i < r.c.size(); ++i) c.push_back(complex_json(r.c(i)));
  j["c"] = c;
  j["residual_sup"] = r.residual_sup;
  j["obstruction_modes"] = freq_list_json(r.obstruction_modes);
  j["decay_in"] = r.decay_in;
  j["decay_out"] = r.decay_out;
  j["amplification"] = finite_or_null(r.amplification);
  j["min_divisor"] = finite_or_null(r.min_divisor);
  j["min_divisor_mode"] = freq_json(r.min_divisor_mode);
  j["residual_table"] = residual_rows_json(r.residual_table);
  j["note"] = r.note;
  return j;
}

json diophantine_report_to_json(const DiophantineReport& r) {
  json j;
  j["radius"] = r.radius;
  j["tau_estimate"] = r.tau_estimate;
  j["c_estimate"] = r.c_estimate;
  j["c_argmin"] = freq_json(r.c_argmin);
  json shells = json::array();
  for (const auto& s : r.shells) {
    json e;
    e["shell"] = s.shell;
    e["m"] = freq_json(s.m);
    e["delta"] = s.delta;
    e["norm"] = s.norm;
    shells.push_back(e);
  }
  j["shells"] = shells;
  json taus = json::array();
  for (const auto& t : r.tau_by_radius) {
    json e;
    e["shell"] = t.shell;
    e["radius"] = t.radius;
    e["tau"] = t.tau;
    taus.push_back(e);
  }
  j["tau_by_radius"] = taus;
  json off = json::array();
  for (const auto& o : r.offenders) {
    json e;
    e["m"] = freq_json(o.m);
    e["delta"] = o.delta;
    off.push_back(e);
  }
  j["offenders"] = off;
  j["resonances"] = freq_list_json(r.resonances);
  j["rational_certified"] = r.rational_certified;
  j["numeric_resonances"] = freq_list_json(r.numeric_resonances);
  j["liouville_like"] = r.liouville_like;
  j["modes_scanned"] = r.modes_scanned;
  j["note"] = r.note;
  return j;
}

json cohomology_to_json(const CohomologyDims& c) {
  json j;
  j["dims"] = c.dims;
  json ranks = json::array();
  for (const auto& r : c.ranks) {
    json e;
    e["degree"] = r.degree;
    e["rank"] = r.rank;
    e["smallest_kept"] = r.smallest_kept;
    e["largest_dropped"] = r.largest_dropped;
    e["spectral_gap"] = finite_or_null(r.spectral_gap);
    e["unstable"] = r.unstable;
    ranks.push_back(e);
  }
  j["ranks"] = ranks;
  j["rank_tol"] = c.rank_tol;
  j["warnings"] = c.warnings;
  return j;
}

json mv_to_json(const MvDimension& m) {
  json j;
  j["degree"] = m.degree;
  j["dim"] = m.dim;
  j["fixed_dim"] = m.fixed_dim;
  j["coinvariant_dim"] = m.coinvariant_dim;
  j["exact_rank"] = m.exact_rank;
  return j;
}

json toral_to_json(const ToralReport& t) {
  json j;
  j["matrix"] = matrix_to_json(t.a);
  j["trace"] = t.trace;
  j["det"] = t.det;
  j["lambda"] = t.lambda;
  j["lambda_inv"] = t.lambda_inv;
  j["char_residual"] = t.char_residual;
  j["stable_vector"] = std::vector<double>{t.stable(0), t.stable(1)};
  j["eigen_residual"] = t.eigen_residual;
  j["slope"] = finite_or_null(t.slope);
  j["slope_quadratic_irrational"] = t.slope_quadratic_irrational;
  j["h1_dim"] = t.h1_dim;
  j["note"] = t.note;
  return j;
}

json equivalence_to_json(const EquivalenceReport& e) {
  json j;
  j["equivalent"] = e.equivalent;
  j["theta"] = matrix_to_json(e.theta);
  j["residual"] = e.residual;
  j["span_defect_angle"] = e.span_defect_angle;
  j["theta_invertible"] = e.theta_invertible;
  j["note"] = e.note;
  return j;
}

json obstruction_to_json(const ObstructionSpace& o) {
  json j;
  j["modes"] = freq_list_json(o.modes);
  j["pairs"] = o.pairs;
  j["dimension"] = o.dimension;
  j["certified"] = o.certified;
  j["note"] = o.note;
  return j;
}

json rigidity_to_json(const RigidityReport& r) {
  json j;
  j["p"] = r.p;
  j["N"] = r.N;
  j["radius"] = r.radius;
  j["obstructions"] = obstruction_to_json(r.obstructions);
  j["constant_dim"] = r.constant_dim;
  j["obstruction_dim"] = r.obstruction_dim;
  j["total_dim"] = r.total_dim;
  j["infinitesimally_rigid"] = r.infinitesimally_rigid;
  j["description"] = r.description;
  return j;
}

json rotation_to_json(const RotationNumberResult& r) {
  json j;
  j["estimate"] = r.estimate;
  j["halfwidth"] = r.halfwidth;
  j["iterations"] = r.iterations;
  j["rational_hint"] = r.rational_hint;
  json n;
  n["num"] = r.nearest.num;
  n["den"] = r.nearest.den;
  j["nearest"] = n;
  return j;
}

json moser_to_json(const MoserReport& m) {
  json j;
  j["radius"] = m.radius;
  j["exponent"] = m.exponent;
  j["threshold"] = m.threshold;
  j["c_estimate"] = m.c_estimate;
  j["argmin_m"] = m.argmin_m;
  j["exact_resonance"] = m.exact_resonance;
  j["resonant_modes"] = m.resonant_modes;
  json worst = json::array();
  for (const auto& w : m.worst) {
    json e;
    e["m"] = w.m;
    e["value"] = w.value;
    e["scaled"] = w.scaled;
    worst.push_back(e);
  }
  j["worst"] = worst;
  j["holds"] = m.holds;
  return j;
}

json kam_to_json(const KamReport& k) {
  json j;
  j["status"] = to_string(k.status);
  j["converged"] = k.converged;
  j["initial_residual"] = k.initial_residual;
  j["final_residual"] = k.final_residual;
  j["conjugated"] = circle_map_to_json(k.conjugated);
  json steps = json::array();
  for (const auto& s : k.steps) {
    json e;
    e["step"] = s.step;
    e["residual_before"] = s.residual_before;
    e["residual_after"] = s.residual_after;
    e["h_sup"] = s.h_sup;
    e["truncation_loss"] = s.truncation_loss;
    steps.push_back(e);
  }
  j["steps"] = steps;
  j["note"] = k.note;
  return j;
}

json linearized_to_json(const LinearizedReport& r) {
  json j;
  j["status"] = to_string(r.status);
  j["h"] = series_to_json(r.h);
  json mc = json::array();
  for (Eigen::Index i = 0; i < r.mean_correction.size(); ++i)
    mc.push_back(r.mean_correction(i));
  j["mean_correction"] = mc;
  j["obstruction_modes"] = r.obstruction_modes;
  j["residual_sup"] = r.residual_sup;
  j["amplification"] = finite_or_null(r.amplification);
  j["min_divisor"] = finite_or_null(r.min_divisor);
  j["min_divisor_mode"] = r.min_divisor_mode;
  j["residual_table"] = residual_rows_json(r.residual_table);
  j["note"] = r.note;
  return j;
}

json gauge_to_json(const GaugeReport& g) {
  json j;
  json parts = json::array();
  const int p = g.omega.base.p();
  for (int k = 0; k < g.omega.algebra.n; ++k) {
    json row = json::array();
    for (int i = 0; i < p; ++i) row.push_back(series_to_json(g.omega.part(k, i)));
    parts.push_back(row);
  }
  j["omega_parts"] = parts;
  j["min_abs_det"] = g.min_abs_det;
  j["inverse_defect"] = g.inverse_defect;
  j["offspan_residual"] = g.offspan_residual;
  j["truncation_loss"] = g.truncation_loss;
  j["theta_hom_residual"] = g.theta_hom_residual;
  j["theta_invertible"] = g.theta_invertible;
  return j;
}

json reference_to_json(const ReferenceEntry& e) {
  json j;
  j["id"] = e.id;
  j["statement"] = e.statement;
  j["value"] = e.value;
  j["source"] = e.source;
  j["note"] = e.note;
  return j;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

namespace {

void freq_header(std::string& out, int dims) {
  for (int i = 0; i < dims; ++i) {
    out += "m" + std::to_string(i + 1);
    out += ',';
  }
}

void freq_row(std::string& out, const Freq& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    out += std::to_string(m(i));
    out += ',';
  }
}

}  // namespace

std::string offenders_csv(const DiophantineReport& r) {
  std::string out;
  const int dims = r.c_argmin.size() > 0 ? static_cast<int>(r.c_argmin.size())
                                         : (r.offenders.empty()
                                                ? 0
                                                : static_cast<int>(
                                                      r.offenders[0].m.size()));
  freq_header(out, dims);
  out += "delta,delta_times_norm_tau\n";
  for (const auto& o : r.offenders) {
    freq_row(out, o.m);
    out += format_double(o.delta);
    out += ',';
    out += format_double(o.delta * std::pow(norm2(o.m), r.tau_estimate));
    out += '\n';
  }
  return out;
}

std::string obstruction_csv(const ObstructionSpace& o) {
  std::string out;
  const int dims = o.modes.empty() ? 0 : static_cast<int>(o.modes[0].size());
  freq_header(out, dims);
  out += "certified\n";
  for (const auto& m : o.modes) {
    freq_row(out, m);
    out += o.certified ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string residual_table_csv(const std::vector<ModeResidual>& rows) {
  std::string out;
  const int dims = rows.empty() ? 0 : static_cast<int>(rows[0].m.size());
  freq_header(out, dims);
  out += "divisor,amplification\n";
  for (const auto& r : rows) {
    freq_row(out, r.m);
    out += format_double(r.divisor);
    out += ',';
    out += format_double(r.amplification);
    out += '\n';
  }
  return out;
}

std::string kam_steps_csv(const KamReport& k) {
  std::string out =
      "step,residual_before,residual_after,h_sup,truncation_loss\n";
  for (const auto& s : k.steps) {
    out += std::to_string(s.step);
    out += ',';
    out += format_double(s.residual_before);
    out += ',';
    out += format_double(s.residual_after);
    out += ',';
    out += format_double(s.h_sup);
    out += ',';
    out += format_double(s.truncation_loss);
    out += '\n';
  }
  return out;
}

std::string moser_csv(const MoserReport& m) {
  std::string out = "m,divisor,scaled\n";
  for (const auto& w : m.worst) {
    out += std::to_string(w.m);
    out += ',';
    out += format_double(w.value);
    out += ',';
    out += format_double(w.scaled);
    out += '\n';
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace io
}  // namespace leafwise
