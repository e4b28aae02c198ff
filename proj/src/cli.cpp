#include "landau_ee/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "landau_ee/asymptotics.hpp"
#include "landau_ee/errors.hpp"
#include "landau_ee/landau_kernel.hpp"
#include "landau_ee/parallel.hpp"
#include "landau_ee/spectra.hpp"

namespace landau_ee::cli {

namespace {

using ojson = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// NaN and infinities have no JSON literal.
ojson jnum(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

struct Common {
  std::string out;
  std::string format;
  int threads = default_threads();
  double grid_h = std::numeric_limits<double>::quiet_NaN();
  std::string config;
  std::uint64_t seed = 1;
  std::string calibration;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--out", c.out, "Write output to this file instead of stdout");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Worker threads (default LANDAU_EE_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--grid-h", c.grid_h, "Quadrature mesh width override");
  sub->add_option("--config", c.config, "JSON run configuration; command-line flags take precedence");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--calibration", c.calibration, "Calibration table file");
  sub->add_flag("--timing", c.timing, "Record wall-clock runtime_ms (otherwise 0)");
}

Format format_of(const Common& c) { return c.format == "json" ? Format::Json : Format::Csv; }

// Emits to --out when given, else to the supplied stream.
void emit(const Common& c, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (c.out.empty()) {
    body(out);
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ResourceError("cannot open output file " + c.out);
  body(f);
  if (!f) throw ResourceError("failed writing " + c.out);
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> parse_t_grid(const std::string& text) {
  double a, b, step;
  char c1, c2;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !in.eof())
    throw DomainError("--t-grid expects start:stop:step");
  if (!(step > 0.0) || b < a || a < 0.0) throw DomainError("--t-grid needs 0 <= start <= stop and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = a + step * static_cast<double>(i);
  return t;
}

Domain parse_domain(const std::string& text) {
  if (text == "disk") return Domain::disk({0.0, 0.0}, 1.0);
  if (text == "square") return Domain::unit_square();
  const std::string prefix = "polygon:";
  if (text.rfind(prefix, 0) == 0) {
    std::vector<Point2> v;
    std::istringstream in(text.substr(prefix.size()));
    in.imbue(std::locale::classic());
    std::string vertex;
    while (std::getline(in, vertex, ';')) {
      std::istringstream vin(vertex);
      vin.imbue(std::locale::classic());
      Point2 p;
      char comma;
      if (!(vin >> p.x >> comma >> p.y) || comma != ',') throw DomainError("bad polygon vertex '" + vertex + "'");
      v.push_back(p);
    }
    return Domain::polygon(std::move(v));
  }
  throw DomainError("--domain must be disk, square or polygon:x,y;x,y;...");
}

std::optional<FitSummary> fit_records(const std::vector<std::pair<double, double>>& pts, double predicted) {
  std::vector<double> xs;
  for (const auto& p : pts)
    if (std::find(xs.begin(), xs.end(), p.first) == xs.end()) xs.push_back(p.first);
  if (xs.size() < 3 || xs.size() != pts.size()) return std::nullopt;
  const LogFit f = fit_log_coefficient(pts);
  const double dev = predicted != 0.0 ? std::abs(f.slope - predicted) / std::abs(predicted) : std::abs(f.slope);
  return FitSummary{f.slope, f.intercept, f.r2, predicted, dev};
}

// --config support: JSON keys become flags unless already given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read config file " + path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("config file: ") + e.what());
  }
  if (!cfg.is_object()) throw DomainError("config file must hold a JSON object");
  const auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  const auto scalar = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return num(v.get<double>());
    throw DomainError("config values must be strings, numbers, booleans or arrays");
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      args.push_back(flag);
      args.push_back(joined);
    } else {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
  return args;
}

}  // namespace

void write_scan(std::ostream& os, const std::vector<ScanRecord>& records, const std::optional<FitSummary>& fit,
                Format format) {
  if (format == Format::Csv) {
    os << "K,L,domain_id,f_id,value,predicted,regime,runtime_ms,grid_h\n";
    for (const auto& r : records)
      os << r.K << ',' << num(r.L) << ',' << r.domain_id << ',' << r.f_id << ',' << num(r.value) << ','
         << num(r.predicted) << ',' << r.regime << ',' << r.runtime_ms << ',' << num(r.grid_h) << '\n';
    if (fit) {
      os << "\nfit_slope,fit_intercept,r2,predicted_slope,relative_deviation\n";
      os << num(fit->slope) << ',' << num(fit->intercept) << ',' << num(fit->r2) << ',' << num(fit->predicted_slope)
         << ',' << num(fit->relative_deviation) << '\n';
    }
    return;
  }
  ojson arr = ojson::array();
  for (const auto& r : records) {
    arr.push_back({{"K", r.K},
                   {"L", jnum(r.L)},
                   {"domain_id", r.domain_id},
                   {"f_id", r.f_id},
                   {"value", jnum(r.value)},
                   {"predicted", jnum(r.predicted)},
                   {"regime", r.regime},
                   {"runtime_ms", r.runtime_ms},
                   {"grid_h", jnum(r.grid_h)}});
  }
  if (fit) {
    arr.push_back({{"kind", "fit"},
                   {"fit_slope", jnum(fit->slope)},
                   {"fit_intercept", jnum(fit->intercept)},
                   {"r2", jnum(fit->r2)},
                   {"predicted_slope", jnum(fit->predicted_slope)},
                   {"relative_deviation", jnum(fit->relative_deviation)}});
  }
  os << arr.dump(2) << '\n';
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Landau-level Fermi projection entanglement numerics", "landau_ee"};
  app.require_subcommand(1);
  std::function<int()> action;

  // kernel-eval
  Common ke_c;
  int ke_K = 0;
  std::string ke_grid;
  std::vector<double> ke_points;
  auto* ke = app.add_subcommand("kernel-eval", "Exact and asymptotic G_K on a grid of t");
  ke->add_option("--K", ke_K, "Inverse field strength K")->required()->check(CLI::PositiveNumber);
  auto* ke_grid_opt = ke->add_option("--t-grid", ke_grid, "start:stop:step");
  ke->add_option("--points", ke_points, "Comma-separated t values")->delimiter(',')->excludes(ke_grid_opt);
  add_common(ke, ke_c, "csv");
  ke->callback([&] {
    action = [&] {
      if (ke_grid.empty() && ke_points.empty()) throw DomainError("kernel-eval needs --t-grid or --points");
      const std::vector<double> ts = ke_grid.empty() ? ke_points : parse_t_grid(ke_grid);
      const LandauParams p(ke_K);
      const CalibrationTable table =
          ke_c.calibration.empty() ? CalibrationTable::builtin() : CalibrationTable::load(ke_c.calibration);
      struct Row {
        double t, exact;
        KernelValue a;
      };
      for (double t : ts)
        if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
      std::vector<Row> rows(ts.size());
      parallel_for(ts.size(), ke_c.threads, [&](std::size_t i) {
        rows[i] = {ts[i], g_K_exact(p, ts[i]), g_K_asymptotic(p, ts[i], table)};
      });
      emit(ke_c, out, [&](std::ostream& os) {
        if (format_of(ke_c) == Format::Csv) {
          os << "t,exact,asymptotic,regime,error_estimate,abs_diff\n";
          for (const auto& r : rows)
            os << num(r.t) << ',' << num(r.exact) << ',' << num(r.a.value.real()) << ',' << regime_name(r.a.regime)
               << ',' << num(r.a.error_estimate) << ',' << num(std::abs(r.exact - r.a.value.real())) << '\n';
        } else {
          ojson arr = ojson::array();
          for (const auto& r : rows)
            arr.push_back({{"t", jnum(r.t)},
                           {"exact", jnum(r.exact)},
                           {"asymptotic", jnum(r.a.value.real())},
                           {"regime", std::string(regime_name(r.a.regime))},
                           {"error_estimate", jnum(r.a.error_estimate)},
                           {"abs_diff", jnum(std::abs(r.exact - r.a.value.real()))}});
          os << arr.dump(2) << '\n';
        }
      });
      return 0;
    };
  });

  // fluctuation-scan
  Common fs_c;
  std::string fs_domain = "disk", fs_method = "fast";
  std::vector<int> fs_K;
  std::vector<double> fs_L;
  bool fs_fit = false;
  auto* fs = app.add_subcommand("fluctuation-scan", "tr t(1-t) of the localised Fermi projection over (K, L)");
  fs->add_option("--domain", fs_domain, "disk, square, or polygon:x,y;x,y;...");
  fs->add_option("--K-list", fs_K, "Comma-separated K values")->required()->delimiter(',')->check(CLI::PositiveNumber);
  fs->add_option("--L-list", fs_L, "Comma-separated dilations L")->required()->delimiter(',')->check(CLI::PositiveNumber);
  fs->add_flag("--fit", fs_fit, "Fit value/(L |boundary|) against ln min(K, L)");
  fs->add_option("--method", fs_method, "fast (radial quadrature) or nystrom (2D grid)")
      ->check(CLI::IsMember({"fast", "nystrom"}));
  add_common(fs, fs_c, "csv");
  fs->callback([&] {
    action = [&] {
      const Domain base = parse_domain(fs_domain);
      const double perimeter = boundary_length(base);
      const TestPolynomial f = TestPolynomial::basis(1);
      const double h = fs_method == "fast" ? 0.0 : (std::isnan(fs_c.grid_h) ? 0.1 : fs_c.grid_h);
      if (fs_method == "nystrom" && !(h > 0.0)) throw DomainError("--grid-h must be positive");
      std::vector<ScanRecord> recs;
      for (int K : fs_K)
        for (double L : fs_L) recs.push_back({K, L, base.id(), f.id(), 0.0, 0.0, "", 0, h});
      // Records run in parallel; the Nystrom route parallelises inside instead.
      const int outer = fs_method == "fast" ? fs_c.threads : 1;
      parallel_for(recs.size(), outer, [&](std::size_t i) {
        auto& r = recs[i];
        const auto t0 = std::chrono::steady_clock::now();
        const Domain d = base.with_scale(r.L);
        const LandauParams p(r.K);
        if (fs_method == "fast") {
          r.value = fluctuation_trace_fast(p, d);
        } else {
          const auto grid = quadrature_grid(d, h, kDefaultGridCap, fs_c.threads);
          r.value = landau_trace_quadratic_matrix_free(p, grid, f, fs_c.threads);
        }
        const auto pred = predict_leading(f, base, r.K, r.L);
        r.predicted = pred.leading_value;
        r.regime = branch_name(pred.regime);
        r.runtime_ms = fs_c.timing ? elapsed_ms(t0) : 0;
      });
      std::optional<FitSummary> fit;
      if (fs_fit) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : recs) pts.emplace_back(std::min<double>(r.K, r.L), r.value / (r.L * perimeter));
        fit = fit_records(pts, predict_leading(f, base, 2, 2.0).coefficient);
        if (!fit && fs_K.size() == 1) {
          // One K below every L: the statistic should not grow with L. Fit against ln L
          // with predicted slope 0 and report the relative spread of the plateau.
          std::vector<std::pair<double, double>> plateau;
          double lo = INFINITY, hi = -INFINITY, mean = 0.0;
          for (const auto& r : recs) {
            const double y = r.value / (r.L * perimeter);
            plateau.emplace_back(r.L, y);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
            mean += y / recs.size();
          }
          if (std::all_of(recs.begin(), recs.end(), [](const ScanRecord& r) { return r.regime == "lnK"; }))
            if (auto pf = fit_records(plateau, 0.0)) {
              pf->relative_deviation = (hi - lo) / mean;
              fit = pf;
            }
        }
        if (!fit) err << "fluctuation-scan: fit skipped (needs at least 3 distinct min(K, L) values)\n";
      }
      emit(fs_c, out, [&](std::ostream& os) { write_scan(os, recs, fit, format_of(fs_c)); });
      return 0;
    };
  });

  // mk-scan
  Common mk_c;
  std::vector<int> mk_K;
  int mk_m = 1, mk_pnodes = 0, mk_maxK = 256;
  bool mk_sym = false;
  auto* mk = app.add_subcommand("mk-scan", "Half-line Hermite coefficient (1/sqrt K) M(t(1-t)^m)");
  mk->add_option("--K-list", mk_K, "Comma-separated K values")->required()->delimiter(',')->check(CLI::PositiveNumber);
  mk->add_option("--m", mk_m, "Basis index m")->check(CLI::Range(1, 5));
  mk->add_option("--p-nodes", mk_pnodes, "Trapezoid intervals on (0, P); 0 selects max(8K, 64)")
      ->check(CLI::NonNegativeNumber);
  mk->add_option("--max-K", mk_maxK, "Largest admissible K")->check(CLI::PositiveNumber);
  mk->add_flag("--verify-symmetry", mk_sym, "Check M(f) = M(f(1-.)) without folding");
  add_common(mk, mk_c, "csv");
  mk->callback([&] {
    action = [&] {
      const TestPolynomial f = TestPolynomial::basis(mk_m);
      const double coef = 2.0 * std::sqrt(2.0) / kPi * i_functional(f);
      std::vector<ScanRecord> recs;
      for (int K : mk_K) recs.push_back({K, 0.0, "halfplane", f.id(), 0.0, 0.0, "lnK", 0, 0.0});
      for (const auto& r : recs)
        if (r.K > mk_maxK) throw ResourceError("mk-scan: K = " + std::to_string(r.K) + " above --max-K");
      parallel_for(recs.size(), mk_c.threads, [&](std::size_t i) {
        auto& r = recs[i];
        const auto t0 = std::chrono::steady_clock::now();
        MkOptions opt;
        opt.p_nodes = mk_pnodes;
        opt.max_K = mk_maxK;
        r.value = jm_halfplane(LandauParams(r.K), mk_m, opt);
        r.predicted = coef * std::log(static_cast<double>(r.K));
        const int n = mk_pnodes > 0 ? mk_pnodes : std::max(8 * r.K, 64);
        r.grid_h = 1.5 * std::sqrt(2.0 * r.K + 1.0) / n;
        r.runtime_ms = mk_c.timing ? elapsed_ms(t0) : 0;
      });
      int status = 0;
      if (mk_sym) {
        // t(1-t)^m is its own reflection only for m = 1, so test an asymmetric member.
        const TestPolynomial g = TestPolynomial::basis(std::max(mk_m, 2));
        for (int K : mk_K) {
          MkOptions opt;
          opt.fold = false;
          opt.p_nodes = mk_pnodes;
          opt.max_K = mk_maxK;
          opt.threads = mk_c.threads;
          const double a = mk_coefficient(LandauParams(K), g, opt);
          const double b = mk_coefficient(LandauParams(K), g.reflected(), opt);
          const double rel = std::abs(a - b) / std::abs(a);
          const bool ok = rel <= 1e-6;
          err << "symmetry K=" << K << " f=" << g.id() << " rel_diff=" << num(rel) << (ok ? " pass" : " FAIL")
              << '\n';
          if (!ok) status = 1;
        }
      }
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : recs) pts.emplace_back(r.K, r.value);
      const auto fit = fit_records(pts, coef);
      emit(mk_c, out, [&](std::ostream& os) { write_scan(os, recs, fit, format_of(mk_c)); });
      return status;
    };
  });

  // sine-check
  Common sc_c;
  int sc_K = 0, sc_samples = 500;
  std::string sc_window = "desk";
  auto* sc = app.add_subcommand("sine-check", "Rescaled Hermite kernel against the sine kernel");
  sc->add_option("--K", sc_K, "Inverse field strength K (at least 100)")->required();
  sc->add_option("--samples", sc_samples, "Number of sampled pairs")->check(CLI::NonNegativeNumber);
  sc->add_option("--window", sc_window, "theorem (gap cap K eps^6) or desk (cap max(K eps^6, sqrt K))")
      ->check(CLI::IsMember({"theorem", "desk"}));
  add_common(sc, sc_c, "json");
  sc->callback([&] {
    action = [&] {
      if (sc_K < 100) throw DomainError("sine-check: --K must be at least 100");
      const LandauParams p(sc_K);
      const WindowPolicy pol = sc_window == "theorem" ? WindowPolicy::Theorem : WindowPolicy::DeskScale;
      const SineReport r = sine_window_check(p, sc_samples, sc_c.seed, pol);
      const bool theorem_empty = sine_window(p, WindowPolicy::Theorem).empty();
      emit(sc_c, out, [&](std::ostream& os) {
        if (format_of(sc_c) == Format::Json) {
          ojson j = {{"K", r.K},
                     {"epsilon", jnum(r.epsilon)},
                     {"samples", r.samples},
                     {"max_scaled_residual", jnum(r.max_scaled_residual)},
                     {"fitted_C", jnum(r.fitted_C)},
                     {"window", sc_window},
                     {"empty", r.empty},
                     {"theorem_window_empty", theorem_empty},
                     {"min_gap", jnum(r.window.min_gap)},
                     {"max_gap", jnum(r.window.max_gap)},
                     {"seed", sc_c.seed}};
          os << j.dump(2) << '\n';
        } else {
          os << "K,epsilon,samples,max_scaled_residual,fitted_C,window,empty,theorem_window_empty,min_gap,max_gap,seed\n"
             << r.K << ',' << num(r.epsilon) << ',' << r.samples << ',' << num(r.max_scaled_residual) << ','
             << num(r.fitted_C) << ',' << sc_window << ',' << (r.empty ? "true" : "false") << ','
             << (theorem_empty ? "true" : "false") << ',' << num(r.window.min_gap) << ',' << num(r.window.max_gap)
             << ',' << sc_c.seed << '\n';
        }
      });
      return 0;
    };
  });

  // widom
  Common wd_c;
  std::vector<double> wd_lambda;
  int wd_m = 1;
  double wd_cut = std::numeric_limits<double>::infinity();
  auto* wd = app.add_subcommand("widom", "Sine-kernel trace tr (1_I T 1_{I^c} T 1_I)^m on I = (0, lambda)");
  wd->add_option("--lambda-list", wd_lambda, "Comma-separated interval lengths")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  wd->add_option("--m", wd_m, "Power m")->check(CLI::Range(1, 5));
  wd->add_option("--complement-cutoff", wd_cut, "Truncate the complement to this length on each side");
  add_common(wd, wd_c, "csv");
  wd->callback([&] {
    action = [&] {
      if (wd_lambda.empty()) throw DomainError("widom: --lambda-list is empty");
      WidomOptions opt;
      opt.complement_cutoff = wd_cut;
      if (!std::isnan(wd_c.grid_h)) {
        if (!(wd_c.grid_h > 0.0)) throw DomainError("--grid-h must be positive");
        opt.nodes_per_unit = 1.0 / wd_c.grid_h;
      }
      // int_0^1 (t(1-t))^{m-1} dt = B(m, m)
      const double coef = std::exp(2.0 * std::lgamma(wd_m) - std::lgamma(2.0 * wd_m)) / (kPi * kPi);
      const std::string fid = "[t(1-t)]^" + std::to_string(wd_m);
      std::vector<ScanRecord> recs;
      for (double l : wd_lambda) recs.push_back({0, l, "interval", fid, 0.0, 0.0, "ln_lambda", 0, 1.0 / opt.nodes_per_unit});
      parallel_for(recs.size(), wd_c.threads, [&](std::size_t i) {
        auto& r = recs[i];
        const auto t0 = std::chrono::steady_clock::now();
        r.value = landau_widom_trace(r.L, wd_m, opt);
        r.predicted = coef * std::log(r.L);
        r.runtime_ms = wd_c.timing ? elapsed_ms(t0) : 0;
      });
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : recs) pts.emplace_back(r.L, r.value);
      const auto fit = fit_records(pts, coef);
      emit(wd_c, out, [&](std::ostream& os) { write_scan(os, recs, fit, format_of(wd_c)); });
      return 0;
    };
  });

  // calibrate
  Common cal_c;
  CalibrationGrid grid;
  auto* cal = app.add_subcommand("calibrate", "Fit the G_K bound constants on one K");
  cal->add_option("--K", grid.K, "Calibration K")->check(CLI::PositiveNumber);
  cal->add_option("--dt", grid.dt, "Grid step in t")->check(CLI::PositiveNumber);
  cal->add_option("--t-max-factor", grid.t_max_factor, "Grid spans [0, factor * K]")->check(CLI::PositiveNumber);
  add_common(cal, cal_c, "csv");
  cal->callback([&] {
    action = [&] {
      const CalibrationTable t = calibrate_kernel_bounds(grid);
      emit(cal_c, out, [&](std::ostream& os) { os << t.serialize(); });
      return 0;
    };
  });

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      const auto subs = app.get_subcommands();
      err << (subs.empty() ? app.help() : subs.front()->help());
      return 2;
    }
    return action ? action() : 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace landau_ee::cli
