// Command-line front end: heights, counts, the area constant, the region
// constants, the residue-class table and boundary samples.

#include <CLI11.hpp>
#include <boost/multiprecision/float128.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "faltings/census.hpp"
#include "faltings/errors.hpp"
#include "faltings/heights.hpp"
#include "faltings/region.hpp"

using namespace faltings;
using Json = nlohmann::ordered_json;
using Float128 = boost::multiprecision::float128;

namespace {

struct CliConfig {
  int precision_bits = 64;
  double tolerance = 1e-3;
  int threads = 1;
  std::string format = "text";
  std::string out;
  double x = 1;
};

template <class Real>
double num(const Real& v) {
  return static_cast<double>(v);
}

template <class F>
void with_precision(int bits, F&& f) {
  switch (bits) {
    case 53:
      f(double{});
      break;
    case 64:
      f(static_cast<long double>(0));
      break;
    case 113:
      f(Float128{});
      break;
    default:
      throw ContractError("precision must be 53, 64 or 113 bits");
  }
}

template <class Real>
std::string text_number(const Real& v) {
  std::ostringstream s;
  s << std::setprecision(std::numeric_limits<Real>::max_digits10) << v;
  return s.str();
}

std::string big(const BigInt& v) { return v.str(); }

// ---------------------------------------------------------------------------

template <class Real>
void cmd_height(std::int64_t A, std::int64_t B, const CliConfig& cfg, std::ostream& out) {
  const HeightReport<Real> r = height_report<Real>(A, B);
  if (r.model.d != 1)
    std::cerr << "note: (" << A << ", " << B << ") is not weakly minimal; reduced by d = " << r.model.d
              << " to (" << r.model.A << ", " << r.model.B << ")\n";
  if (cfg.format == "json") {
    Json j;
    j["input"] = {{"A", A}, {"B", B}};
    j["model"] = {{"A", r.model.A}, {"B", r.model.B}, {"d", r.model.d}};
    j["lambda"] = lambda_label(r.cls.lambda);
    j["discriminant"] = big(r.discriminant);
    j["minimal_discriminant"] = big(r.minimal_discriminant);
    j["naive_height"] = big(r.naive_height);
    j["tau"] = {{"re", num(r.tau.re())}, {"im", num(r.tau.im())}};
    j["HF"] = num(r.height.HF());
    j["hF"] = num(r.height.hF());
    out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    out << "A,B,model_A,model_B,d,lambda,discriminant,minimal_discriminant,naive_height,tau_re,tau_im,HF,hF\n";
    out << A << ',' << B << ',' << r.model.A << ',' << r.model.B << ',' << r.model.d << ','
        << lambda_label(r.cls.lambda) << ',' << big(r.discriminant) << ',' << big(r.minimal_discriminant)
        << ',' << big(r.naive_height) << ',' << text_number(r.tau.re()) << ',' << text_number(r.tau.im())
        << ',' << text_number(r.height.HF()) << ',' << text_number(r.height.hF()) << '\n';
  } else {
    out << "curve          y^2 = x^3 + " << r.model.A << " x + " << r.model.B << '\n';
    if (r.model.d != 1) out << "input          (" << A << ", " << B << "), d = " << r.model.d << '\n';
    out << "lambda         " << lambda_label(r.cls.lambda) << '\n';
    out << "Delta          " << big(r.discriminant) << '\n';
    out << "|Delta_min|    " << big(r.minimal_discriminant) << '\n';
    out << "tau            " << text_number(r.tau.re()) << " + " << text_number(r.tau.im()) << " i\n";
    out << "H_N            " << big(r.naive_height) << '\n';
    out << "H_F            " << text_number(r.height.HF()) << '\n';
    out << "h_F            " << text_number(r.height.hF()) << '\n';
  }
}

void cmd_count(const CliConfig& cfg, bool naive, std::ostream& out) {
  CensusOptions opt;
  opt.threads = cfg.threads;
  opt.precision_bits = cfg.precision_bits;
  CensusReport r = run_census(cfg.x, opt);
  if (naive) {
    const NaiveCount n = count_naive(cfg.x);
    r.naive_count = n.count;
    r.naive_prediction = n.prediction;
  }
  if (cfg.format == "json") {
    write_census_json(out, r);
  } else if (cfg.format == "csv") {
    write_census_csv(out, r);
  } else {
    out << "X              " << text_number(r.X) << '\n';
    for (const Lambda l : kAllLambdas)
      out << "S_X,lambda=" << std::left << std::setw(6) << lambda_label(l) << std::right << r.counts_by_lambda[static_cast<int>(l)]
          << '\n';
    out << "direct         " << r.total_direct << '\n';
    out << "sieve          " << r.total_sieve << '\n';
    out << "prediction     " << text_number(r.prediction) << '\n';
    out << "ratio          " << text_number(static_cast<long double>(r.total_direct) / r.prediction) << '\n';
    if (r.naive_count) {
      out << "naive count    " << *r.naive_count << '\n';
      out << "naive pred.    " << text_number(*r.naive_prediction) << '\n';
    }
    if (r.near_threshold) out << "near threshold " << r.near_threshold << '\n';
  }
}

template <class Real>
void cmd_sigma(const CliConfig& cfg, std::ostream& out) {
  const SigmaResult<Real> r = sigma_area<Real>(Real(cfg.tolerance));
  const Real lead = 12 * r.sigma / Real(zeta10());
  if (cfg.format == "json") {
    Json j;
    j["sigma"] = num(r.sigma);
    j["error"] = num(r.error);
    j["tol"] = cfg.tolerance;
    j["leading_constant"] = num(lead);
    Json pieces = Json::array();
    for (const auto& p : r.pieces)
      pieces.push_back({{"piece", p.name},
                        {"lo", num(p.lo)},
                        {"hi", num(p.hi)},
                        {"estimate", num(p.estimate)},
                        {"err", num(p.error)},
                        {"evaluations", p.evaluations}});
    j["pieces"] = pieces;
    j["cusp_tail"] = num(r.cusp_tail);
    out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    write_sigma_csv(out, r);
  } else {
    out << "sigma          " << text_number(r.sigma) << '\n';
    out << "error          " << text_number(r.error) << '\n';
    out << "12 sigma/z(10) " << text_number(lead) << '\n';
  }
}

template <class Real>
void cmd_constants(const CliConfig& cfg, std::ostream& out) {
  const RegionConstants<Real> k = bound_constants<Real>();
  const std::int64_t cutoff = cusp_cutoff(static_cast<long double>(cfg.x));
  if (cfg.format == "json") {
    Json j;
    j["c"] = num(k.c);
    j["epsilon0"] = num(k.epsilon0);
    j["epsilon0_residual"] = num(k.epsilon0_residual);
    j["C"] = num(k.C);
    j["C_argmax"] = {{"re", num(k.C_argmax_re)}, {"im", num(k.C_argmax_im)}};
    j["M"] = num(k.M);
    j["N"] = num(k.N);
    j["beta"] = num(k.beta);
    j["beta0"] = num(k.beta0);
    j["X"] = cfg.x;
    j["cusp_cutoff"] = cutoff;
    out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    out << "name,value\n";
    out << "c," << text_number(k.c) << "\nepsilon0," << text_number(k.epsilon0) << "\nC," << text_number(k.C)
        << "\nM," << text_number(k.M) << "\nN," << text_number(k.N) << "\nbeta," << text_number(k.beta)
        << "\nbeta0," << text_number(k.beta0) << "\ncusp_cutoff," << cutoff << '\n';
  } else {
    out << "c              " << text_number(k.c) << '\n';
    out << "epsilon0       " << text_number(k.epsilon0) << "  (residual " << text_number(k.epsilon0_residual)
        << ")\n";
    out << "C              " << text_number(k.C) << "  at tau = " << text_number(k.C_argmax_re) << " + "
        << text_number(k.C_argmax_im) << " i\n";
    out << "M              " << text_number(k.M) << '\n';
    out << "N              " << text_number(k.N) << '\n';
    out << "beta           " << text_number(k.beta) << '\n';
    out << "beta0          " << text_number(k.beta0) << '\n';
    out << "|A| cutoff     " << cutoff << "  (X = " << cfg.x << ")\n";
  }
}

void cmd_classes(const CliConfig& cfg, int lifts, std::ostream& out) {
  const ResidueClassCensus c = residue_class_census(lifts);
  if (cfg.format == "json") {
    Json j;
    for (const Lambda l : kAllLambdas) j["Cl_" + lambda_label(l)] = c.class_sizes[static_cast<int>(l)];
    j["not_weakly_minimal"] = c.not_weakly_minimal;
    j["lifts_checked"] = c.lifts_checked;
    j["instabilities"] = c.instabilities;
    out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    out << "lambda,count\n";
    for (const Lambda l : kAllLambdas) out << lambda_label(l) << ',' << c.class_sizes[static_cast<int>(l)] << '\n';
  } else {
    for (const Lambda l : kAllLambdas)
      out << "|Cl_" << std::left << std::setw(6) << lambda_label(l) << std::right << "| "
          << c.class_sizes[static_cast<int>(l)] << '\n';
    out << "not weakly minimal " << c.not_weakly_minimal << '\n';
    out << "lifts checked      " << c.lifts_checked << ", unstable classes " << c.instabilities << '\n';
  }
}

template <class Real>
void cmd_boundary(const CliConfig& cfg, int n, double b_max, std::ostream& out) {
  const BoundarySweep<Real> s = boundary_samples<Real>(Real(cfg.x), n, Real(b_max));
  for (const auto& B : s.skipped_lines) std::cerr << "warning: no boundary bracket on B = " << text_number(B) << '\n';
  if (cfg.format == "json") {
    Json j;
    j["X"] = cfg.x;
    Json pts = Json::array();
    for (const auto& p : s.points) pts.push_back({{"A", num(p.A)}, {"B", num(p.B)}});
    j["points"] = pts;
    Json skipped = Json::array();
    for (const auto& B : s.skipped_lines) skipped.push_back(num(B));
    j["skipped_lines"] = skipped;
    out << j.dump(2) << '\n';
  } else {
    write_boundary_csv(out, s);
  }
}

int exit_code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Faltings heights, the height-bounded region and the census of S_X"};
  app.require_subcommand(1);
  CliConfig cfg;
  app.add_option("--precision", cfg.precision_bits, "working precision in bits: 53, 64 or 113")
      ->envname("FALTINGS_PRECISION")
      ->check(CLI::IsMember({53, 64, 113}));
  app.add_option("--tol", cfg.tolerance, "relative tolerance")->envname("FALTINGS_TOL")->check(CLI::PositiveNumber);
  app.add_option("--threads", cfg.threads, "worker threads")->envname("FALTINGS_THREADS")->check(CLI::Range(1, 1024));
  app.add_option("--format", cfg.format, "json, csv or text")
      ->envname("FALTINGS_FORMAT")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--out", cfg.out, "write output to this path")->envname("FALTINGS_OUT");
  app.add_option("--x", cfg.x, "height bound X")->envname("FALTINGS_X")->check(CLI::PositiveNumber);

  std::int64_t A = 0;
  std::int64_t B = 0;
  auto* height = app.add_subcommand("height", "Faltings height of y^2 = x^3 + Ax + B");
  height->add_option("-A", A, "coefficient A")->required()->allow_extra_args(false);
  height->add_option("-B", B, "coefficient B")->required()->allow_extra_args(false);

  bool naive = false;
  auto* count = app.add_subcommand("count", "count S_X by enumeration and by the Mobius sieve");
  count->add_flag("--naive", naive, "also count by naive height (needs X >= 1)");

  auto* sigma = app.add_subcommand("sigma", "area of R_1");
  auto* constants = app.add_subcommand("constants", "constants bounding the region");

  int lifts = 3;
  auto* classes = app.add_subcommand("classes", "sizes of the residue classes Cl_lambda mod 6^6");
  classes->add_option("--lifts", lifts, "random lifts checked per class")->check(CLI::Range(1, 1000));

  int n = 200;
  double b_max = 1e4;
  auto* boundary = app.add_subcommand("boundary", "points on the boundary of R_X (CSV by default)");
  boundary->add_option("--n", n, "number of points")->check(CLI::Range(2, 10000000));
  boundary->add_option("--bmax", b_max, "sweep |B| up to bmax sqrt(X)")->check(CLI::PositiveNumber);

  for (auto* sub : {height, count, sigma, constants, classes, boundary}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code(ExitCode::contract);
  }

  std::ofstream file;
  std::ostringstream buffer;
  try {
    if (boundary->parsed() && app.get_option("--format")->count() == 0 && std::getenv("FALTINGS_FORMAT") == nullptr)
      cfg.format = "csv";
    if (height->parsed()) {
      with_precision(cfg.precision_bits, [&](auto t) { cmd_height<decltype(t)>(A, B, cfg, buffer); });
    } else if (count->parsed()) {
      cmd_count(cfg, naive, buffer);
    } else if (sigma->parsed()) {
      with_precision(cfg.precision_bits, [&](auto t) { cmd_sigma<decltype(t)>(cfg, buffer); });
    } else if (constants->parsed()) {
      with_precision(cfg.precision_bits, [&](auto t) { cmd_constants<decltype(t)>(cfg, buffer); });
    } else if (classes->parsed()) {
      cmd_classes(cfg, lifts, buffer);
    } else if (boundary->parsed()) {
      with_precision(cfg.precision_bits, [&](auto t) { cmd_boundary<decltype(t)>(cfg, n, b_max, buffer); });
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(ExitCode::contract);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return exit_code(ExitCode::numeric);
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return exit_code(ExitCode::integrity);
  }

  if (cfg.out.empty()) {
    std::cout << buffer.str();
  } else {
    file.open(cfg.out);
    if (!file) {
      std::cerr << "error: cannot open " << cfg.out << '\n';
      return exit_code(ExitCode::contract);
    }
    file << buffer.str();
  }
  return exit_code(ExitCode::ok);
}
