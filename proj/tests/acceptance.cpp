// End-to-end acceptance checks. Each check exercises one externally visible
// guarantee of the toolkit, prints a single scorecard line
//
//   criterion NN: PASS  (measured detail)
//
// and exits 0 on pass, 1 on fail. Invoke with a criterion number 1..12 or
// with "registry" for the reference-table audit. Tolerances are pinned here
// on purpose; loosening one is a behavior change, not a test fix.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "leafwise/circle.hpp"
#include "leafwise/cohomeq.hpp"
#include "leafwise/diophantine.hpp"
#include "leafwise/json_io.hpp"
#include "leafwise/liealg.hpp"
#include "leafwise/refs.hpp"
#include "leafwise/suspension.hpp"
#include "oracle.hpp"

#include "leafwise/fourier.hpp"

using nlohmann::json;
using namespace leafwise;

namespace {

namespace fs = std::filesystem;

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;
const double kGoldenFrac = kPhi - 1.0;
const double kPi = oracle::kTau / 2.0;

// ---- scratch directory and CLI runner -------------------------------------

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("leafwise-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const fs::path so = work_dir() / "last-stdout.txt";
  const fs::path se = work_dir() / "last-stderr.txt";
  const std::string cmd = "cd " + work_dir().string() + " && " +
                          std::string(LEAFWISE_CLI_PATH) + " " + args + " > " +
                          so.string() + " 2> " + se.string();
  const int status = std::system(cmd.c_str());
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

// ---- small formatting helpers ----------------------------------------------

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::setprecision(digits) << v;
  return ss.str();
}

std::string freq_str(const Freq& m) {
  std::ostringstream ss;
  ss << "(";
  for (Eigen::Index i = 0; i < m.size(); ++i)
    ss << m[i] << (i + 1 < m.size() ? "," : "");
  ss << ")";
  return ss.str();
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- shared constructions ---------------------------------------------------

ActionMatrix torus2_base() {
  Eigen::MatrixXd rows(2, 2);
  rows << 1.0, 0.0, 0.0, 1.0;
  return ActionMatrix(rows);
}

MatrixSeries mat_product(const MatrixSeries& a, const MatrixSeries& b) {
  MatrixSeries out(a.rows, b.cols, a.entries[0].dims());
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < b.cols; ++c) {
      FourierSeries acc = FourierSeries::zero(a.entries[0].dims(), true);
      for (int k = 0; k < a.cols; ++k)
        acc = acc + multiply(a.at(r, k), b.at(k, c));
      out.at(r, c) = acc;
    }
  return out;
}

double max_part_distance(const AlgebraValuedForm& a,
                         const AlgebraValuedForm& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.parts.size(); ++i)
    worst = std::max(worst, coeff_distance(a.parts[i], b.parts[i]));
  return worst;
}

// Random two-step nilpotent algebra: generators bracket into a central slice,
// so the Jacobi identity holds with exact zeros.
LieAlgebra random_nilpotent(int gens, int center, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.2, 1.0);
  std::bernoulli_distribution sign(0.5);
  LieAlgebra alg;
  alg.n = gens + center;
  alg.table = Eigen::MatrixXd::Zero(alg.n * alg.n, alg.n);
  for (int i = 0; i < gens; ++i)
    for (int j = i + 1; j < gens; ++j)
      for (int k = gens; k < alg.n; ++k) {
        const double v = (sign(rng) ? 1.0 : -1.0) * dist(rng);
        alg.table(i * alg.n + j, k) = v;
        alg.table(j * alg.n + i, k) = -v;
      }
  return alg;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

// Deterministic smooth right-hand side: geometric axis ladder out to radius
// 512 plus a few mixed modes, two of which hug the rational approximation
// 100 l = 11.0001 of the truncated-Liouville frequency used in criterion 3.
FourierSeries generic_field() {
  FourierSeries f(2);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> phase(0.0, oracle::kTau);
  for (int k : {1, 2, 4, 8, 16, 32, 64, 128, 256, 512}) {
    const double amp = 0.3 * std::exp(-k / 64.0);
    f.set_pair(make_freq({k, 0}), std::polar(amp, phase(rng)));
    f.set_pair(make_freq({0, k}), std::polar(amp, phase(rng)));
  }
  f.set_pair(make_freq({3, -2}), std::polar(0.3 * std::exp(-5.0 / 64.0), 1.1));
  f.set_pair(make_freq({7, 5}), std::polar(0.3 * std::exp(-12.0 / 64.0), 2.3));
  f.set_pair(make_freq({-11, 100}),
             std::polar(0.3 * std::exp(-111.0 / 64.0), 0.7));
  f.set_pair(make_freq({-22, 200}),
             std::polar(0.3 * std::exp(-222.0 / 64.0), 1.9));
  return f;
}

// ---- criteria ---------------------------------------------------------------

// Golden-direction flow: 25 random band-limited targets are recovered from
// their derivative plus a constant, the constant comes back exactly, and the
// whole batch stays under five seconds.
bool criterion_01(std::string& detail) {
  Eigen::VectorXd v(2);
  v << 1.0, kPhi;
  std::mt19937_64 rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_err = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    FourierSeries target = FourierSeries::random_band_limited(2, 32, 12, rng);
    target.set(make_freq({0, 0}), Complex{0.0, 0.0});  // mean is not recoverable
    const double cstar = 0.25 + 0.01 * trial;
    const FourierSeries data =
        directional_derivative(target, v) + FourierSeries::constant(2, cstar);
    const SolveReport rep = solve_flow(data, v);
    if (rep.status != SolveStatus::solved) {
      detail = "trial " + std::to_string(trial) + " reported " +
               std::string(to_string(rep.status));
      return false;
    }
    if (rep.c.size() != 1 || rep.c(0) != Complex{cstar, 0.0}) {
      detail = "constant term came back inexact on trial " +
               std::to_string(trial);
      return false;
    }
    worst_err = std::max(worst_err, (rep.g - target).l1_norm());
  }
  const double ms = elapsed_ms(t0);
  detail = "worst sup-norm recovery error " + fmt(worst_err, 3) +
           " over 25 solves, constants exact, " + fmt(ms, 4) + " ms";
  return worst_err <= 1e-9 && ms < 5000.0;
}

// Resonant right-hand side for the direction (1,1): the CLI must exit with
// the obstruction code and name exactly the modes +-(1,-1).
bool criterion_02(std::string& detail) {
  FourierSeries f(2);
  f.set_pair(make_freq({1, -1}), Complex{0.15, 0.0});
  f.set_pair(make_freq({2, 1}), Complex{0.05, 0.02});
  spit(work_dir() / "acc2-field.json", io::series_to_json(f).dump());
  const int code = run_cli(
      "solve-cohomeq --field acc2-field.json --matrix '[[1,1]]' "
      "--out acc2.json");
  if (code != 2) {
    detail = "exit code " + std::to_string(code) + ", wanted 2";
    return false;
  }
  const json rep = json::parse(slurp(work_dir() / "acc2.json"));
  const bool status_ok = rep.at("status") == "obstructed";
  const bool modes_ok =
      rep.at("obstruction_modes") == json::parse("[[-1,1],[1,-1]]");
  detail = "exit 2, status " + rep.at("status").get<std::string>() +
           ", modes " + rep.at("obstruction_modes").dump();
  return status_ok && modes_ok;
}

// Liouville-type direction versus the golden one on the same smooth data:
// the ill-conditioned half must be flagged divergent with amplification
// beyond 1e6, the golden half must solve cleanly.
bool criterion_03(std::string& detail) {
  const LiouvilleResult ell = liouville_vector({1, 2, 6, 24, 120, 720});
  Eigen::VectorXd v_ell(2), v_phi(2);
  v_ell << 1.0, ell.value;
  v_phi << 1.0, kPhi;
  const FourierSeries f = generic_field();
  const SolveReport bad = solve_flow(f, v_ell);
  const SolveReport good = solve_flow(f, v_phi);
  std::ostringstream d;
  d << "ell = " << fmt(ell.value, 8) << "; liouville half: status "
    << to_string(bad.status) << ", amplification " << fmt(bad.amplification, 5)
    << ", min divisor " << fmt(bad.min_divisor, 5) << " at "
    << freq_str(bad.min_divisor_mode) << "; golden half: status "
    << to_string(good.status) << ", residual " << fmt(good.residual_sup, 3);
  detail = d.str();
  const bool diverged =
      bad.status == SolveStatus::divergent && bad.amplification > 1e6;
  const bool solved =
      good.status == SolveStatus::solved && good.residual_sup <= 1e-9;
  return diverged && solved;
}

// Diophantine-type estimate for the golden direction over the radius-1e4 box,
// cross-checked against the continued-fraction law q^2 |phi - p/q| -> 1/sqrt 5.
bool criterion_04(std::string& detail) {
  Eigen::MatrixXd row(1, 2);
  row << 1.0, kPhi;
  ScanOptions opts;
  opts.mode_budget = 500'000'000;  // the (2e4+1)^2 box exceeds the default cap
  const auto t0 = std::chrono::steady_clock::now();
  const DiophantineReport rep = estimate_type(ActionMatrix(row), 10000, opts);
  const double ms = elapsed_ms(t0);

  const auto conv = continued_fraction(kPhi, 18);
  bool markov_ok = conv.size() >= 10;
  double last_markov = 0.0;
  if (markov_ok) {
    for (std::size_t i = conv.size() - 5; i < conv.size(); ++i) {
      last_markov = static_cast<double>(conv[i].q) *
                    static_cast<double>(conv[i].q) * std::abs(conv[i].error);
      markov_ok = markov_ok && last_markov >= 0.40 && last_markov <= 0.50;
    }
  }
  detail = "tau " + fmt(rep.tau_estimate, 5) + ", c " +
           fmt(rep.c_estimate, 5) + ", " + std::to_string(rep.modes_scanned) +
           " modes in " + fmt(ms / 1000.0, 3) + " s, convergent constant " +
           fmt(last_markov, 4);
  return rep.c_estimate >= 0.2 && rep.tau_estimate >= 0.8 &&
         rep.tau_estimate <= 1.2 && rep.resonances.empty() && markov_ok &&
         ms < 30000.0;
}

// First cohomology of the named algebras against hand counts and the
// brute-force span oracle, plus d^2 = 0 on fifty random validated algebras.
bool criterion_05(std::string& detail) {
  struct Named {
    LieAlgebra alg;
    int h1;
    const char* label;
  };
  std::vector<Named> named;
  for (int p = 1; p <= 6; ++p)
    named.push_back({LieAlgebra::abelian(p), p, "abelian"});
  named.push_back({LieAlgebra::heisenberg(), 2, "heisenberg"});
  named.push_back({LieAlgebra::ga(), 1, "ga"});
  named.push_back({LieAlgebra::sl2(), 0, "sl2"});
  for (const Named& nm : named) {
    const std::vector<int> dims = cohomology_dims(nm.alg).dims;
    const int span = oracle::h1_from_bracket_span(nm.alg);
    if (dims.size() < 2 || dims[1] != nm.h1 || dims[1] != span) {
      detail = std::string(nm.label) + " H^1 came out " +
               std::to_string(dims.size() < 2 ? -1 : dims[1]) + ", wanted " +
               std::to_string(nm.h1) + " (span oracle " + std::to_string(span) +
               ")";
      return false;
    }
  }

  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int gens = 2 + static_cast<int>(rng() % 3);
    const int center = 1 + static_cast<int>(rng() % 2);
    LieAlgebra alg = random_nilpotent(gens, center, rng);
    if (trial % 2 == 1) alg = alg.change_basis(random_orthogonal(alg.n, rng));
    if (!validate(alg).ok) {
      detail = "random algebra " + std::to_string(trial) + " failed validation";
      return false;
    }
    worst = std::max(worst, d_squared_residual(alg));
  }
  detail = "named H^1 counts match the span oracle; worst d^2 residual " +
           fmt(worst, 3) + " across 50 random algebras";
  return worst <= 1e-12;
}

// Hyperbolic toral pipeline: h1_dim = 1 and eigendata residuals at 1e-12 for
// five integer matrices.
bool criterion_06(std::string& detail) {
  const std::array<std::array<int, 4>, 5> mats = {
      {{2, 1, 1, 1}, {3, 2, 1, 1}, {3, 1, 2, 1}, {5, 2, 2, 1}, {4, 1, 3, 1}}};
  double worst_char = 0.0;
  double worst_eig = 0.0;
  for (const auto& e : mats) {
    Eigen::Matrix2i a;
    a << e[0], e[1], e[2], e[3];
    const ToralReport rep = toral_pipeline(a);
    if (rep.h1_dim != 1 || rep.det != 1 || std::llabs(rep.trace) <= 2) {
      detail = "matrix [[" + std::to_string(e[0]) + "," + std::to_string(e[1]) +
               "],[" + std::to_string(e[2]) + "," + std::to_string(e[3]) +
               "]] gave h1 = " + std::to_string(rep.h1_dim);
      return false;
    }
    worst_char = std::max(worst_char, rep.char_residual);
    worst_eig = std::max(worst_eig, rep.eigen_residual);
  }
  detail = "h1 = 1 for all five automorphisms, worst characteristic residual " +
           fmt(worst_char, 3) + ", worst eigenvector residual " +
           fmt(worst_eig, 3);
  return worst_char <= 1e-12 && worst_eig <= 1e-12;
}

// Iterated identity suspensions: the dimension ladder reproduces the binomial
// table through p = 8 with no closed formula involved.
bool criterion_07(std::string& detail) {
  for (int p = 1; p <= 8; ++p) {
    const std::vector<int> dims = linear_foliation_dims(p);
    if (static_cast<int>(dims.size()) != p + 1) {
      detail = "p = " + std::to_string(p) + " returned " +
               std::to_string(dims.size()) + " degrees";
      return false;
    }
    for (int k = 0; k <= p; ++k)
      if (dims[k] != static_cast<int>(oracle::binomial(p, k))) {
        detail = "dim H^" + std::to_string(k) + " at p = " + std::to_string(p) +
                 " came out " + std::to_string(dims[k]) + ", wanted " +
                 std::to_string(oracle::binomial(p, k));
        return false;
      }
  }
  detail = "dimension ladder matches the binomial table through p = 8";
  return true;
}

// Parameter equivalence: the change of coordinates is recovered to 1e-12 for
// twenty random actions, and a row pushed off the span is rejected.
bool criterion_08(std::string& detail) {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  bool offspan_checked = false;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd v1(2, 4);
    do {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) v1(i, j) = nd(rng);
    } while (v1.jacobiSvd().singularValues()(1) < 0.3);
    Eigen::MatrixXd theta(2, 2);
    do {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) theta(i, j) = nd(rng);
    } while (std::abs(theta.determinant()) < 0.3);

    const EquivalenceReport rep =
        parameter_equivalence(ActionMatrix(v1), ActionMatrix(theta * v1));
    if (!rep.equivalent || !rep.theta_invertible) {
      detail = "trial " + std::to_string(trial) + " reported not equivalent";
      return false;
    }
    worst = std::max(worst, (rep.theta - theta).cwiseAbs().maxCoeff());

    if (trial == 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(v1, Eigen::ComputeFullV);
      const Eigen::VectorXd w = svd.matrixV().col(2);  // orthogonal to rows
      Eigen::MatrixXd v2 = theta * v1;
      v2.row(0) += 0.5 * w.transpose();
      const EquivalenceReport off =
          parameter_equivalence(ActionMatrix(v1), ActionMatrix(v2));
      if (off.equivalent) {
        detail = "a row outside the span was accepted as equivalent";
        return false;
      }
      offspan_checked = true;
    }
  }
  detail = "theta recovered to " + fmt(worst, 3) +
           " across 20 actions; off-span row rejected";
  return worst <= 1e-12 && offspan_checked;
}

// Gauge calculus over the Heisenberg matrix realization: identity gauge is
// an exact identity, two-step and direct transforms agree to 1e-9 at a shared
// truncation, and pure-gauge curvature stays within the recorded loss.
bool criterion_09(std::string& detail) {
  const ActionMatrix base = torus2_base();
  const LieAlgebra alg = LieAlgebra::heisenberg();
  const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);

  AlgebraValuedForm omega = canonical_form(base, alg);
  omega.part(2, 0).set_pair(make_freq({1, 0}), Complex{0.05, -0.02});
  omega.part(0, 1).set_pair(make_freq({0, 1}), Complex{0.04, 0.01});

  const GaugeReport idrep =
      gauge_transform(omega, MatrixSeries::identity(3, 2), id3);
  const double iddist = max_part_distance(idrep.omega, omega);
  if (iddist > 1e-13 || idrep.theta_hom_residual != 0.0 ||
      std::abs(idrep.min_abs_det - 1.0) > 1e-12 ||
      idrep.inverse_defect > 1e-13) {
    detail = "identity gauge moved the form by " + fmt(iddist, 3);
    return false;
  }

  MatrixSeries b1 = MatrixSeries::identity(3, 2);
  b1.at(0, 1) = FourierSeries::cosine(2, make_freq({1, 0}), 0.11);
  b1.at(1, 2) = FourierSeries::sine(2, make_freq({0, 1}), 0.07);
  MatrixSeries b2 = MatrixSeries::identity(3, 2);
  b2.at(0, 1) = FourierSeries::sine(2, make_freq({1, -1}), 0.09);
  b2.at(0, 2) = FourierSeries::cosine(2, make_freq({0, 1}), 0.05);
  GaugeOptions opts;
  opts.truncation = 12;
  const GaugeReport step1 = gauge_transform(omega, b1, id3, opts);
  const GaugeReport step2 = gauge_transform(step1.omega, b2, id3, opts);
  const GaugeReport direct =
      gauge_transform(omega, mat_product(b1, b2), id3, opts);
  const double compdist = max_part_distance(step2.omega, direct.omega);
  if (compdist > 1e-9) {
    detail = "composition defect " + fmt(compdist, 3) + " exceeds 1e-9";
    return false;
  }

  AlgebraValuedForm zero_form(base, alg, 1);
  MatrixSeries b = MatrixSeries::identity(3, 2);
  b.at(0, 1) = FourierSeries::cosine(2, make_freq({1, 0}), 0.2);
  b.at(1, 2) = FourierSeries::cosine(2, make_freq({0, 1}), 0.15);
  b.at(0, 2) = FourierSeries::sine(2, make_freq({1, 1}), 0.1);
  const GaugeReport pure = gauge_transform(zero_form, b, id3);
  const double mc = maurer_cartan_residual(pure.omega);
  if (mc > pure.truncation_loss + 1e-10) {
    detail = "pure-gauge curvature " + fmt(mc, 3) +
             " exceeds the recorded loss " + fmt(pure.truncation_loss, 3);
    return false;
  }

  detail = "identity gauge exact to " + fmt(iddist, 3) +
           ", composition defect " + fmt(compdist, 3) + ", curvature " +
           fmt(mc, 3) + " within recorded loss " +
           fmt(pure.truncation_loss, 3);
  return true;
}

// Rotation numbers: exact value with rigorous enclosure for rigid rotations,
// invariance under fifty random conjugacies, and agreement with an
// independent million-step orbit sum for a standard-family map.
bool criterion_10(std::string& detail) {
  const RotationNumberResult dy =
      rotation_number(CircleMap::rotation(0.375), 2000);
  if (dy.estimate != 0.375 || dy.halfwidth != 1.0 / 2000.0) {
    detail = "dyadic rotation estimate " + fmt(dy.estimate, 17) +
             " is not exact";
    return false;
  }
  const RotationNumberResult gd =
      rotation_number(CircleMap::rotation(kGoldenFrac), 2000);
  if (std::abs(gd.estimate - kGoldenFrac) > gd.halfwidth) {
    detail = "golden rotation left its enclosure";
    return false;
  }

  std::mt19937_64 rng(1010);
  CircleOptions copts;
  copts.truncation = 48;
  double worst_dev = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    FourierSeries h = FourierSeries::random_band_limited(1, 2, 3, rng, 0.004);
    h.set(make_freq({0}), Complex{0.0, 0.0});
    const CircleMap hm(0.0, h);
    const ComposeResult hinv = inverse(hm, copts);
    const ComposeResult inner =
        compose(CircleMap::rotation(kGoldenFrac), hm, copts);
    const ComposeResult conj = compose(hinv.map, inner.map, copts);
    const RotationNumberResult rn = rotation_number(conj.map, 2000);
    worst_dev = std::max(worst_dev, std::abs(rn.estimate - kGoldenFrac));
  }
  if (worst_dev > 2.0 / 2000.0) {
    detail = "conjugated estimate drifted by " + fmt(worst_dev, 3) +
             ", beyond 2/n";
    return false;
  }

  const FourierSeries kick = FourierSeries::sine(1, make_freq({1}), 0.3 / oracle::kTau);
  const CircleMap standard(0.38, kick);
  const RotationNumberResult rn = rotation_number(standard, 1000000);
  const double orbit = oracle::rotation_long_orbit(0.38, kick, 1000000);
  const double dev = std::abs(rn.estimate - orbit);
  detail = "dyadic rotation exact, worst conjugacy deviation " +
           fmt(worst_dev, 3) + " (allowance " + fmt(2.0 / 2000.0, 3) +
           "), long-orbit deviation " + fmt(dev, 3);
  return dev <= 1e-5;
}

// Arithmetic condition screening: the quarter rotation fails exactly at
// m = 4, and the golden rotation clears the unit threshold over the first
// thousand modes, matching a direct minimum scan.
bool criterion_11(std::string& detail) {
  Eigen::VectorXd quarter(1);
  quarter << 0.25;
  const MoserReport q = check_moser_condition(quarter, 10, 1.0, 1.0);
  if (!q.exact_resonance || q.resonant_modes.empty() ||
      q.resonant_modes.front() != 4 || q.c_estimate != 0.0 || q.holds) {
    detail = "quarter rotation was not rejected at m = 4";
    return false;
  }

  Eigen::VectorXd golden(1);
  golden << kGoldenFrac;
  const MoserReport g = check_moser_condition(golden, 1000, 1.0, 1.0);
  double brute = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= 1000; ++m) {
    const double r = m * kGoldenFrac - std::nearbyint(m * kGoldenFrac);
    brute = std::min(brute, 2.0 * std::abs(std::sin(kPi * r)) * m);
  }
  detail = "quarter fails at m = 4; golden bound " + fmt(g.c_estimate, 6) +
           " at m = " + std::to_string(g.argmin_m) + ", direct scan " +
           fmt(brute, 6);
  return g.holds && g.c_estimate >= 1.0 &&
         std::abs(g.c_estimate - brute) <= 1e-12;
}

// Near-rotation conjugation: 1e-3 perturbations of the golden rotation gain
// a tenfold residual reduction within three steps in at least nine of ten
// seeded trials, and a resonant target reports its obstruction cleanly.
bool criterion_12(std::string& detail) {
  std::mt19937_64 rng(1212);
  int successes = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    FourierSeries pert = FourierSeries::random_band_limited(1, 6, 4, rng);
    pert.set(make_freq({0}), Complex{0.0, 0.0});
    if (pert.l1_norm() < 1e-12)
      pert = FourierSeries::cosine(1, make_freq({1}), 1.0);
    pert = (1e-3 / pert.l1_norm()) * pert;
    const KamReport rep =
        kam_iterate(CircleMap(kGoldenFrac, pert), kGoldenFrac);
    const double ratio = rep.initial_residual > 0.0
                             ? rep.final_residual / rep.initial_residual
                             : 1.0;
    worst_ratio = std::max(worst_ratio, ratio);
    if (rep.status == SolveStatus::solved && ratio <= 0.1) ++successes;
  }

  const KamReport res = kam_iterate(
      CircleMap(0.5, FourierSeries::cosine(1, make_freq({2}), 1e-3)), 0.5);
  const bool resonant_ok = res.status == SolveStatus::obstructed;
  detail = std::to_string(successes) +
           "/10 trials reduced the residual tenfold (worst ratio " +
           fmt(worst_ratio, 3) + "); resonant target reported " +
           std::string(to_string(res.status));
  return successes >= 9 && resonant_ok;
}

// Reference registry audit: the stored statements are data, not computation,
// so they are frozen here verbatim and any drift is a failure.
bool registry_check(std::string& detail) {
  struct Frozen {
    const char* id;
    const char* statement;
    const char* value;
    const char* source;
  };
  static const Frozen expected[] = {
      {"weyl-chamber", "H^1(A_p) ≅ R^p, p ≥ 2", "R^p",
       "Katok and Spatzier 1994"},
      {"weyl-chamber-local",
       "The orbit foliation of the Weyl chamber flow is locally rigid for "
       "p ≥ 2",
       "locally rigid", "Katok and Spatzier 1997"},
      {"full-flag",
       "H^1(F_p) ≅ R^p, p ≥ 2, for the orbit foliation of the "
       "upper-triangular subgroup of SL(p+1,R)",
       "R^p", "Katok and Spatzier 1994 (restriction argument)"},
      {"sl2r-parabolic",
       "H^1(F) ≅ R ⊕ H^1(M) for the parabolic subgroup acting on "
       "M = Γ\\SL(2,R)",
       "R ⊕ H^1(M)", "Matsumoto and Mitsumatsu 2003"},
      {"sl2c-parabolic", "H^1(F) ≅ R² ⊕ H^1(M)", "R² ⊕ H^1(M)",
       "Mieczkowski 2007"},
      {"abelian-criterion",
       "A locally free R^p-action on a closed manifold is parameter rigid "
       "iff H^1(F) ≅ R^p",
       "criterion", "Matsumoto and Mitsumatsu 2003"},
      {"heisenberg-rigid",
       "If H^1(F) ≅ H^1(h) then every locally free Heisenberg action with "
       "orbit foliation F is parameter rigid",
       "criterion", "dos Santos 2007; nilpotent generalization by Maruhashi"},
      {"sol-suspension-rigid",
       "The suspension GA-action of a hyperbolic toral automorphism is "
       "parameter rigid, and locally rigid",
       "rigid",
       "Matsumoto and Mitsumatsu 2003; El Kacimi Alaoui and Nicolau 1993"},
      {"ga-deformation",
       "When H^1(M) is non-trivial the standard GA-action on Γ\\SL(2,R) is "
       "not parameter rigid; it admits a complete parameter deformation over "
       "an open subset of H^1(M)",
       "H^1(M)-parametrized deformation", "Asaoka 2009"},
      {"ga-c-rigid",
       "The standard complex GA-action on Γ\\SL(2,C) is locally parameter "
       "rigid",
       "locally rigid", "Asaoka, preprint"},
  };

  const std::vector<ReferenceEntry>& table = reference_table();
  if (table.size() != 10) {
    detail = "table has " + std::to_string(table.size()) +
             " entries, wanted 10";
    return false;
  }
  for (std::size_t i = 0; i < 10; ++i) {
    const ReferenceEntry& e = table[i];
    const Frozen& x = expected[i];
    if (e.id != x.id || e.statement != x.statement || e.value != x.value ||
        e.source != x.source ||
        e.note != "reference only — not computed by this tool") {
      detail = "entry '" + std::string(x.id) + "' drifted from the frozen text";
      return false;
    }
    if (find_reference(e.id) != &e) {
      detail = "lookup for '" + e.id + "' did not return the table entry";
      return false;
    }
  }
  detail = "all 10 reference entries match the frozen statements";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: leafwise_acceptance <1..12|registry>\n");
    return 1;
  }
  const std::string which = argv[1];

  std::string label;
  bool (*check)(std::string&) = nullptr;
  if (which == "registry") {
    label = "registry";
    check = registry_check;
  } else {
    static bool (*const table[12])(std::string&) = {
        criterion_01, criterion_02, criterion_03, criterion_04,
        criterion_05, criterion_06, criterion_07, criterion_08,
        criterion_09, criterion_10, criterion_11, criterion_12};
    const int n = std::atoi(which.c_str());
    if (n < 1 || n > 12) {
      std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
      return 1;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "criterion %02d", n);
    label = buf;
    check = table[n - 1];
  }

  std::string detail;
  bool pass = false;
  try {
    pass = check(detail);
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("unexpected exception: ") + e.what();
  }
  std::printf("%s: %s  (%s)\n", label.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  return pass ? 0 : 1;
}
