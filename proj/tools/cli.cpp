#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ginibre/angular.hpp"
#include "ginibre/asymptotics.hpp"
#include "ginibre/dpp.hpp"
#include "ginibre/error.hpp"
#include "ginibre/mc.hpp"
#include "ginibre/parallel.hpp"
#include "ginibre/radial.hpp"
#include "ginibre/specfun.hpp"
#include "report.hpp"
#include "spec.hpp"

namespace ginibre::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxN = 10'000'000;
constexpr int kMaxAngularN = 1 << 20;

using asymptotics::RegimeReport;

void check_n(int n, int max = kMaxN) {
  if (n < 1 || n > max) {
    throw UsageError("N = " + std::to_string(n) + " is outside the supported range 1.." +
                     std::to_string(max));
  }
}

Json complex_json(angular::cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      parts.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("malformed grid '" + text + "' (expected lo:hi:step)");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) {
    throw UsageError("malformed grid '" + text + "' (expected lo:hi:step)");
  }
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (count > 100000) throw UsageError("grid has too many points");
  for (long i = 0; i <= count; ++i) out.push_back(parts[0] + i * parts[2]);
  return out;
}

Ensemble ensemble_of(const std::string& name) {
  try {
    return parse_ensemble(name);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

void fill_regime(Json& row, const RegimeReport& r) {
  row["n"] = r.n;
  row["regime"] = std::string(asymptotics::to_string(r.regime));
  row["width"] = r.width;
  row["scaled_width"] = r.scaled_width;
  row["exact"] = r.exact;
  row["exact_mean"] = r.exact_mean;
  row["var_over_mean"] = r.exact / r.exact_mean;
  row["predicted"] = r.predicted;
  row["ratio"] = r.ratio;
  row["formula"] = r.formula;
  if (r.alternative_prediction) {
    row["alternative_predicted"] = *r.alternative_prediction;
    row["alternative_ratio"] = *r.alternative_ratio;
    row["alternative_formula"] = r.alternative_formula;
  }
}

// Window from --window or --arc-frac, checked against --kind.
StatisticSpec window_spec(const std::string& kind, const std::string& window, double arc_frac) {
  if (!window.empty() && arc_frac > 0) throw UsageError("give either --window or --arc-frac");
  StatisticSpec s;
  if (arc_frac > 0) {
    if (arc_frac > 1) throw UsageError("--arc-frac must lie in (0, 1]");
    const double len = 2 * kPi * arc_frac;
    s = parse_statistic("ind-arg:0,0");
    s.values = {-len / 2, len / 2};
    s.text = "ind-arg:" + std::to_string(-len / 2) + "," + std::to_string(len / 2);
  } else if (!window.empty()) {
    s = parse_statistic(window);
  } else {
    throw UsageError("a window is required (--window or --arc-frac)");
  }
  if (!s.is_window()) throw UsageError("'" + s.text + "' is not a window");
  if (!kind.empty()) {
    const bool radial = kind == "radial";
    if (radial != s.radial()) throw UsageError("window '" + s.text + "' does not match --kind " + kind);
  }
  return s;
}

std::string relation(double a, double b, double c, double d) {
  if (a == c && b == d) return "equal";
  if (a == c || b == d) return "shared-endpoint";
  if (b == c || a == d) return "abutting";
  if ((a > c && b < d) || (c > a && d < b)) return "nested";
  if (b < c || d < a) return "disjoint";
  return "overlapping";
}

// Exact covariance of two counting windows of the same kind, divided by the
// endpoint scale √(N π³) resp. √(N π) and by the variance scale √(N/π³)
// resp. √N.
Json count_cov_row(int n, const StatisticSpec& w1, const StatisticSpec& w2, Ensemble ens) {
  Json row;
  row["n"] = n;
  double cov, endpoint_scale, variance_scale;
  if (w1.radial()) {
    const auto i1 = to_interval(w1), i2 = to_interval(w2);
    cov = radial::radial_count_cov(n, i1, i2, ens);
    endpoint_scale = std::sqrt(n * kPi);
    variance_scale = std::sqrt(static_cast<double>(n));
    row["relation"] = relation(i1.lo, i1.hi, i2.lo, i2.hi);
  } else {
    check_n(n, kMaxAngularN);
    const auto a1 = to_arc(w1), a2 = to_arc(w2);
    cov = angular::angular_count_cov(n, a1, a2);
    endpoint_scale = std::sqrt(n * kPi * kPi * kPi);
    variance_scale = std::sqrt(n / (kPi * kPi * kPi));
    row["relation"] = relation(a1.alpha, a1.beta, a2.alpha, a2.beta);
  }
  row["cov"] = cov;
  row["normalized_endpoint"] = cov / endpoint_scale;
  row["normalized_variance_scale"] = cov / variance_scale;
  return row;
}

// ------------------------------------------------------------------ cov

struct CovOptions {
  int n = 0;
  std::string f, g, ensemble = "complex";
  bool decomposed = false, compare = false;
};

Report cov_radial(const CovOptions& o) {
  check_n(o.n);
  const auto fs = parse_statistic(o.f);
  const auto gs = parse_statistic(o.g.empty() ? o.f : o.g);
  const auto f = to_radial(fs), g = to_radial(gs);
  const Ensemble ens = ensemble_of(o.ensemble);
  Report r;
  r.inputs = {{"n", o.n}, {"f", fs.text}, {"g", gs.text}, {"ensemble", std::string(to_string(ens))}};
  const double value = radial::radial_cov_exact(f, g, o.n, ens);
  r.outputs["value"] = value;
  if (o.compare) {
    const double limit = asymptotics::radial_smooth_limit(f, g);
    r.outputs["limit"] = limit;
    r.outputs["residual"] = value - limit;
    r.outputs["n_times_residual"] = o.n * (value - limit);
  }
  return r;
}

Report cov_angular(const CovOptions& o) {
  check_n(o.n, kMaxAngularN);
  const auto fs = parse_statistic(o.f);
  const auto gs = parse_statistic(o.g.empty() ? o.f : o.g);
  const auto phi = convolve(fs, gs);
  Report r;
  r.inputs = {{"n", o.n}, {"f", fs.text}, {"g", gs.text}};
  const auto value = angular::angular_cov_exact(phi, o.n);
  r.outputs["value"] = complex_json(value);
  if (o.decomposed) {
    const auto d = angular::angular_cov_decomposed(phi, o.n);
    r.outputs["main"] = complex_json(d.main);
    r.outputs["correction"] = complex_json(d.correction);
    r.outputs["total"] = complex_json(d.total());
    const double err = std::abs(d.total() - value);
    r.outputs["identity_abs_error"] = err;
    r.outputs["identity_rel_error"] = err / std::max(std::abs(value), 1e-300);
  }
  if (o.compare) {
    if (fs.is_window() || gs.is_window()) throw UsageError("--compare-asymptotic needs smooth statistics");
    const auto f = to_fourier(fs), g = to_fourier(gs);
    const auto pred = asymptotics::angular_smooth_prediction(f, g, o.n);
    r.outputs["predicted"] = complex_json(pred);
    r.outputs["coefficient"] = complex_json(asymptotics::angular_smooth_coeff(f, g));
    r.outputs["difference"] = complex_json(value - pred);
  }
  return r;
}

// ---------------------------------------------------------------- count

struct CountOptions {
  std::string kind, window, window1, window2, ensemble = "complex";
  int n = 0;
  double arc_frac = 0;
  bool compare = false;
};

Report count_var(const CountOptions& o) {
  if (o.kind != "radial" && o.kind != "angular") throw UsageError("--kind must be radial or angular");
  check_n(o.n, o.kind == "angular" ? kMaxAngularN : kMaxN);
  const auto w = window_spec(o.kind, o.window, o.arc_frac);
  const Ensemble ens = ensemble_of(o.ensemble);
  Report r;
  r.inputs = {{"kind", o.kind}, {"n", o.n}, {"window", w.text}, {"ensemble", std::string(to_string(ens))}};
  double mean, var;
  if (w.radial()) {
    const auto iv = to_interval(w);
    mean = radial::radial_count_mean(o.n, iv.lo, iv.hi, ens);
    var = radial::radial_count_var(o.n, iv.lo, iv.hi, ens);
  } else {
    if (ens != Ensemble::complex) throw UsageError("angular statistics are defined for the complex ensemble");
    const auto arc = to_arc(w);
    mean = angular::angular_count_mean(o.n, arc);
    var = angular::angular_count_var(o.n, arc);
  }
  r.outputs["mean"] = mean;
  r.outputs["variance"] = var;
  r.outputs["var_over_mean"] = var / mean;
  if (o.compare) {
    if (ens != Ensemble::complex) throw UsageError("asymptotic predictions cover the complex ensemble");
    const asymptotics::Window win = w.radial() ? asymptotics::Window{to_interval(w)}
                                               : asymptotics::Window{to_arc(w)};
    Json row;
    fill_regime(row, asymptotics::count_var_prediction(o.n, win));
    for (const auto& [k, v] : row.items()) {
      if (k != "n" && k != "exact") r.outputs[k] = v;
    }
  }
  return r;
}

Report count_cov(const CountOptions& o) {
  if (o.window1.empty() || o.window2.empty()) throw UsageError("--window1 and --window2 are required");
  const auto w1 = window_spec(o.kind, o.window1, 0);
  const auto w2 = window_spec(o.kind, o.window2, 0);
  if (w1.radial() != w2.radial()) throw UsageError("both windows must be of the same kind");
  check_n(o.n);
  const Ensemble ens = ensemble_of(o.ensemble);
  if (!w1.radial() && ens != Ensemble::complex) {
    throw UsageError("angular statistics are defined for the complex ensemble");
  }
  Report r;
  r.inputs = {{"kind", w1.radial() ? "radial" : "angular"}, {"n", o.n}, {"window1", w1.text},
              {"window2", w2.text}, {"ensemble", std::string(to_string(ens))}};
  const Json row = count_cov_row(o.n, w1, w2, ens);
  for (const auto& [k, v] : row.items()) {
    if (k != "n") r.outputs[k] = v;
  }
  return r;
}

// ----------------------------------------------------------- asymptotics

struct TableOptions {
  std::string kind, window, window1, window2, f, g, grid;
  std::vector<int> n_list, m_list{25, 100, 400};
  double arc_frac = 0, scaled_width = 0, center = std::nan("");
};

Report asymptotics_table(const TableOptions& o) {
  Report r;
  r.inputs["kind"] = o.kind;
  auto need_ns = [&]() {
    if (o.n_list.empty()) throw UsageError("--n-list is required for this table");
    for (int n : o.n_list) check_n(n);
    r.inputs["n_list"] = o.n_list;
  };

  if (o.kind == "radial" || o.kind == "angular") {
    need_ns();
    const bool radial = o.kind == "radial";
    std::vector<double> ns, dev;
    for (int n : o.n_list) {
      asymptotics::Window win;
      if (o.scaled_width > 0) {
        const double width = o.scaled_width / std::sqrt(static_cast<double>(n));
        if (radial) {
          const double a = std::isnan(o.center) ? 0.5 : o.center;
          win = radial::ModulusInterval{a, a + width};
        } else {
          win = angular::ArcWindow::centered(std::isnan(o.center) ? 0.0 : o.center, width);
        }
      } else {
        const auto w = window_spec(o.kind, o.window, o.arc_frac);
        win = radial ? asymptotics::Window{to_interval(w)} : asymptotics::Window{to_arc(w)};
      }
      if (!radial) check_n(n, kMaxAngularN);
      Json row;
      const auto rep = asymptotics::count_var_prediction(n, win);
      fill_regime(row, rep);
      r.rows.push_back(row);
      ns.push_back(n);
      dev.push_back(std::abs(rep.ratio - 1.0));
    }
    if (o.scaled_width > 0) {
      r.inputs["scaled_width"] = o.scaled_width;
    } else {
      r.inputs["window"] = window_spec(o.kind, o.window, o.arc_frac).text;
    }
    // Fitted constant of the relative error against log N / √N.
    double c = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) c = std::max(c, dev[i] * std::sqrt(ns[i]) / std::log(ns[i]));
    r.outputs["fitted_log_over_sqrt_constant"] = c;
    r.outputs["last_ratio"] = r.rows.back()["ratio"];
  } else if (o.kind == "radial-smooth") {
    need_ns();
    const auto fs = parse_statistic(o.f.empty() ? "poly:0,0,1" : o.f);
    const auto gs = parse_statistic(o.g.empty() ? fs.text : o.g);
    const auto f = to_radial(fs), g = to_radial(gs);
    const double limit = asymptotics::radial_smooth_limit(f, g);
    r.inputs["f"] = fs.text;
    r.inputs["g"] = gs.text;
    for (int n : o.n_list) {
      const double v = radial::radial_cov_exact(f, g, n);
      r.rows.push_back({{"n", n}, {"exact", v}, {"limit", limit}, {"residual", v - limit},
                        {"n_times_residual", n * (v - limit)}});
    }
    r.outputs["limit"] = limit;
  } else if (o.kind == "angular-smooth") {
    need_ns();
    const auto fs = parse_statistic(o.f.empty() ? "cos:1,2" : o.f);
    const auto gs = parse_statistic(o.g.empty() ? fs.text : o.g);
    const auto f = to_fourier(fs), g = to_fourier(gs);
    r.inputs["f"] = fs.text;
    r.inputs["g"] = gs.text;
    double lo = specfun::kInf, hi = -specfun::kInf;
    for (int n : o.n_list) {
      check_n(n, kMaxAngularN);
      const auto v = angular::angular_cov_exact(f, g, n);
      const auto p = asymptotics::angular_smooth_prediction(f, g, n);
      const double diff = (v - p).real();
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
      r.rows.push_back({{"n", n}, {"exact", v.real()}, {"exact_im", v.imag()},
                        {"predicted", p.real()}, {"difference", diff}});
    }
    r.outputs["coefficient"] = complex_json(asymptotics::angular_smooth_coeff(f, g));
    r.outputs["difference_spread"] = hi - lo;
  } else if (o.kind == "iarg" || o.kind == "imod") {
    const auto grid = parse_grid(o.grid.empty() ? "0:10:0.5" : o.grid);
    r.inputs["grid"] = o.grid.empty() ? "0:10:0.5" : o.grid;
    for (double x : grid) {
      if (o.kind == "iarg") {
        r.rows.push_back({{"beta", x}, {"i_arg", asymptotics::i_arg(x)},
                          {"i_arg_corrected", asymptotics::i_arg_corrected(x)}});
      } else {
        r.rows.push_back({{"c", x}, {"i_mod", asymptotics::i_mod(x)}});
      }
    }
    if (o.kind == "iarg") {
      // 1 − I_arg decays like β^{−1/4}; extrapolate from β and 16β.
      const double at_big = asymptotics::i_arg(1e12), at_bigger = asymptotics::i_arg(1.6e13);
      r.outputs["plateau_i_arg"] = 2.0 * at_bigger - at_big;
      r.outputs["i_arg_at_1e12"] = at_big;
      r.outputs["i_arg_deficit_exponent"] =
          slope({1e8, 1e12}, {1.0 - asymptotics::i_arg(1e8), 1.0 - at_big});
      r.outputs["plateau_i_arg_corrected"] = asymptotics::i_arg_corrected(1e12);
      r.outputs["i_arg_corrected_at_1e4"] = asymptotics::i_arg_corrected(1e4);
      r.outputs["i_arg_at_1e4"] = asymptotics::i_arg(1e4);
    } else {
      r.outputs["plateau_i_mod"] = asymptotics::i_mod(1e4);
    }
  } else if (o.kind == "edgeworth") {
    r.inputs["m_list"] = o.m_list;
    std::vector<double> ms, errs;
    for (int m : o.m_list) {
      if (m < 2 || m > 1'000'000) throw UsageError("M must lie in 2..1e6");
      const double e = asymptotics::edgeworth_sup_error(m);
      r.rows.push_back({{"m", m}, {"sup_error", e}, {"m_times_error", m * e}});
      ms.push_back(m);
      errs.push_back(e);
    }
    r.outputs["loglog_slope"] = slope(ms, errs);
  } else if (o.kind == "count-cov") {
    need_ns();
    const auto w1 = window_spec("", o.window1, 0);
    const auto w2 = window_spec("", o.window2, 0);
    if (w1.radial() != w2.radial()) throw UsageError("both windows must be of the same kind");
    r.inputs["window1"] = w1.text;
    r.inputs["window2"] = w2.text;
    std::vector<double> ns, mags;
    for (int n : o.n_list) {
      const auto row = count_cov_row(n, w1, w2, Ensemble::complex);
      r.rows.push_back(row);
      ns.push_back(n);
      mags.push_back(std::abs(row["normalized_endpoint"].get<double>()));
    }
    r.outputs["relation"] = r.rows.back()["relation"];
    const bool all_positive = std::all_of(mags.begin(), mags.end(), [](double m) { return m > 0; });
    r.outputs["normalized_loglog_slope"] = all_positive ? slope(ns, mags) : std::nan("");
    r.outputs["fitted_constant_per_sqrt_n"] =
        r.rows.back()["cov"].get<double>() / std::sqrt(ns.back());
  } else {
    throw UsageError("unknown table kind '" + o.kind +
                     "' (radial, angular, radial-smooth, angular-smooth, iarg, imod, edgeworth, count-cov)");
  }
  return r;
}

// ------------------------------------------------------------- cumulants

struct CumulantOptions {
  std::string region, window, ensemble = "complex";
  std::vector<double> p;
  int n = 0, order = 4;
  double arc_frac = 0, tolerance = 0.1;
  bool certificate = false;
};

void fill_cumulants(Report& r, const dpp::CumulantSet& cs, bool certificate, double tolerance) {
  r.outputs["traces"] = cs.traces;
  r.outputs["cluster"] = cs.cluster;
  r.outputs["cumulants"] = cs.cumulants;
  if (cs.order >= 2) {
    std::vector<double> normalized;
    for (int k = 3; k <= cs.order; ++k) normalized.push_back(cs.c(k) / std::pow(cs.c(2), 0.5 * k));
    r.outputs["normalized"] = normalized;
  }
  if (certificate) {
    const auto cert = dpp::clt_certificate(cs, tolerance);
    r.outputs["certificate"] = {{"variance", cert.variance},
                                {"normalized", cert.normalized},
                                {"bound_witness", cert.bound_witness},
                                {"tolerance", cert.tolerance},
                                {"clt_consistent", cert.clt_consistent}};
  }
}

Report cumulants(const CumulantOptions& o) {
  Report r;
  r.inputs = {{"region", o.region}, {"order", o.order}};
  if (o.order < 1 || o.order > dpp::kMaxCumulantOrder) {
    throw UsageError("--order must lie in 1.." + std::to_string(dpp::kMaxCumulantOrder));
  }
  if (o.region == "bernoulli") {
    if (o.p.empty()) throw UsageError("--p is required for the bernoulli region");
    r.inputs["p"] = o.p;
    fill_cumulants(r, dpp::cumulants_permanental(o.p, o.order), o.certificate, o.tolerance);
    return r;
  }
  check_n(o.n, o.region == "sector" ? 2048 : kMaxN);
  r.inputs["n"] = o.n;
  const Ensemble ens = ensemble_of(o.ensemble);
  if (o.region == "annulus") {
    const auto w = window_spec("radial", o.window, 0);
    const auto iv = to_interval(w);
    r.inputs["window"] = w.text;
    r.inputs["ensemble"] = std::string(to_string(ens));
    dpp::CumulantSet cs;
    if (ens == Ensemble::complex) {
      cs = dpp::cumulants_from_gram(dpp::gram_annulus(o.n, iv), o.order);
    } else {
      cs = dpp::cumulants_permanental(radial::count_probabilities(o.n, iv, ens), o.order);
    }
    fill_cumulants(r, cs, o.certificate, o.tolerance);
    r.outputs["exact_mean"] = radial::radial_count_mean(o.n, iv.lo, iv.hi, ens);
    r.outputs["exact_variance"] = radial::radial_count_var(o.n, iv.lo, iv.hi, ens);
  } else if (o.region == "sector") {
    if (ens != Ensemble::complex) throw UsageError("sectors are defined for the complex ensemble");
    const auto w = window_spec("angular", o.window, o.arc_frac);
    const auto arc = to_arc(w);
    r.inputs["window"] = w.text;
    const auto cs = dpp::cumulants_from_gram(dpp::gram_sector(o.n, arc), o.order);
    fill_cumulants(r, cs, o.certificate, o.tolerance);
    r.outputs["exact_mean"] = angular::angular_count_mean(o.n, arc);
    r.outputs["exact_variance"] = angular::angular_count_var(o.n, arc);
  } else {
    throw UsageError("--region must be annulus, sector or bernoulli");
  }
  return r;
}

// -------------------------------------------------------------------- mc

struct McOptions {
  int n = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> statistics;
  std::string ensemble = "complex", batch_out, batch_format = "binary";
  bool check_exact = false, matrix = false, keep_eigenvalues = false;
};

struct ExactMoments {
  std::optional<double> mean, var;
};

ExactMoments exact_moments(const StatisticSpec& s, int n, Ensemble ens) {
  ExactMoments m;
  if (s.radial()) {
    const auto f = to_radial(s);
    m.mean = radial::radial_mean_exact(f, n, ens);
    m.var = radial::radial_cov_exact(f, f, n, ens);
    return m;
  }
  if (ens != Ensemble::complex) return m;
  if (s.kind == StatisticSpec::Kind::ind_arg) {
    const auto arc = to_arc(s);
    m.mean = angular::angular_count_mean(n, arc);
    m.var = angular::angular_count_var(n, arc);
  } else {
    const auto f = to_fourier(s);
    m.mean = n * f.coefficient(0).real();
    m.var = angular::angular_var(f, n);
  }
  return m;
}

std::optional<double> exact_cross(const StatisticSpec& a, const StatisticSpec& b, int n, Ensemble ens) {
  if (a.radial() && b.radial()) return radial::radial_cov_exact(to_radial(a), to_radial(b), n, ens);
  if (!a.radial() && !b.radial() && ens == Ensemble::complex) {
    return angular::angular_cov_exact(convolve(a, b), n).real();
  }
  return std::nullopt;
}

Report mc_run(const McOptions& o) {
  if (o.statistics.empty()) throw UsageError("at least one --statistic is required");
  if (o.samples < 2) throw UsageError("--samples must be at least 2");
  const Ensemble ens = ensemble_of(o.ensemble);
  std::vector<StatisticSpec> specs;
  mc::RunConfig cfg;
  cfg.n = o.n;
  cfg.ensemble = ens;
  cfg.replicas = o.samples;
  cfg.seed = o.seed;
  cfg.force_matrix = o.matrix;
  cfg.keep_eigenvalues = o.keep_eigenvalues;
  for (const auto& text : o.statistics) {
    specs.push_back(parse_statistic(text));
    cfg.statistics.push_back(to_point_statistic(specs.back()));
  }
  const bool matrix = o.matrix || o.keep_eigenvalues ||
                      std::any_of(specs.begin(), specs.end(), [](const auto& s) { return !s.radial(); });
  check_n(o.n, matrix ? mc::kMaxEigenDimension : kMaxN);

  Report r;
  r.inputs = {{"n", o.n}, {"samples", o.samples}, {"seed", o.seed}, {"statistics", o.statistics},
              {"ensemble", std::string(to_string(ens))}, {"sampler", matrix ? "matrix" : "gamma"},
              {"generator", mc::RngStream::kGeneratorName}};
  const auto batch = mc::run_replicas(cfg);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto col = batch.column(i);
    const auto mean = mc::estimate_mean(col);
    const auto var = mc::estimate_cov(col, col);
    Json row = {{"statistic", specs[i].text}, {"mean", mean.mean}, {"mean_se", mean.se},
                {"var", var.cov}, {"var_se", var.se}};
    if (o.check_exact) {
      const auto ex = exact_moments(specs[i], o.n, ens);
      if (ex.mean) {
        row["exact_mean"] = *ex.mean;
        row["z_mean"] = (mean.mean - *ex.mean) / mean.se;
      }
      if (ex.var) {
        row["exact_var"] = *ex.var;
        row["z_var"] = (var.cov - *ex.var) / var.se;
      }
    }
    r.rows.push_back(row);
  }
  Json pairs = Json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      const auto c = mc::estimate_cov(batch.column(i), batch.column(j));
      Json p = {{"f", specs[i].text}, {"g", specs[j].text}, {"cov", c.cov}, {"cov_se", c.se}};
      if (o.check_exact) {
        if (const auto ex = exact_cross(specs[i], specs[j], o.n, ens)) {
          p["exact_cov"] = *ex;
          p["z_cov"] = (c.cov - *ex) / c.se;
        }
      }
      pairs.push_back(p);
    }
  }
  if (!pairs.empty()) r.outputs["covariances"] = pairs;
  if (!o.batch_out.empty()) {
    if (o.batch_format == "csv") {
      std::ofstream file(o.batch_out);
      if (!file) throw UsageError("cannot open " + o.batch_out);
      mc::write_batch_csv(batch, file);
    } else if (o.batch_format == "binary") {
      mc::save_batch(batch, o.batch_out);
    } else {
      throw UsageError("--batch-format must be binary or csv");
    }
    r.outputs["batch_file"] = o.batch_out;
  }
  return r;
}

// ------------------------------------------------------------------- clt

struct CltOptions {
  std::string statistic, ensemble = "complex";
  int n = 0, order = 6;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  double tolerance = 0.1;
};

Report clt_test(const CltOptions& o) {
  const auto s = parse_statistic(o.statistic);
  const Ensemble ens = ensemble_of(o.ensemble);
  check_n(o.n, s.radial() ? kMaxN : mc::kMaxEigenDimension);
  if (o.samples < 100) throw UsageError("--samples must be at least 100");
  Report r;
  r.inputs = {{"statistic", s.text}, {"n", o.n}, {"samples", o.samples}, {"seed", o.seed},
              {"ensemble", std::string(to_string(ens))}};
  mc::RunConfig cfg;
  cfg.n = o.n;
  cfg.ensemble = ens;
  cfg.replicas = o.samples;
  cfg.seed = o.seed;
  cfg.statistics.push_back(to_point_statistic(s));
  const auto col = mc::run_replicas(cfg).column(0);
  const auto ks = mc::ks_normal_test(col);
  r.outputs["ks"] = {{"statistic", ks.statistic}, {"threshold", ks.threshold}, {"pass", ks.pass}};
  if (s.is_window()) {
    const auto lattice = mc::ks_normal_test(col, 1.0);
    r.outputs["ks_lattice"] = {{"statistic", lattice.statistic}, {"threshold", lattice.threshold},
                               {"pass", lattice.pass}};
  }
  const auto var = mc::estimate_cov(col, col);
  r.outputs["mc_variance"] = var.cov;
  r.outputs["mc_variance_se"] = var.se;
  const auto ex = exact_moments(s, o.n, ens);
  if (ex.var) {
    r.outputs["exact_variance"] = *ex.var;
    r.outputs["z_exact"] = (var.cov - *ex.var) / var.se;
  }
  if (s.kind == StatisticSpec::Kind::poly && ens == Ensemble::complex) {
    const auto f = to_radial(s);
    const double limit = asymptotics::radial_smooth_limit(f, f);
    r.outputs["limit_variance"] = limit;
    r.outputs["z_limit"] = (var.cov - limit) / var.se;
  }
  if (s.is_window() && ens == Ensemble::complex && o.order >= 2) {
    const auto g = s.radial() ? dpp::gram_annulus(o.n, to_interval(s)) : dpp::gram_sector(o.n, to_arc(s));
    const auto cert = dpp::clt_certificate(dpp::cumulants_from_gram(g, o.order), o.tolerance);
    r.outputs["certificate"] = {{"variance", cert.variance},
                                {"normalized", cert.normalized},
                                {"bound_witness", cert.bound_witness},
                                {"clt_consistent", cert.clt_consistent}};
  }
  return r;
}

// ---------------------------------------------------------------- kernel

struct KernelOptions {
  std::string what = "fourier", apply = "smooth";
  std::vector<int> ell_list{1, 2, 4, 8};
  int theta_points = 65;
};

Report kernel_dump(const KernelOptions& o) {
  Report r;
  r.inputs = {{"what", o.what}, {"ell_list", o.ell_list}};
  for (int ell : o.ell_list) {
    if (ell < 0 || ell > 1'000'000) throw UsageError("ell must lie in 0..1e6");
  }
  if (o.what == "values") {
    if (o.theta_points < 2 || o.theta_points > 100000) throw UsageError("--theta-points out of range");
    r.inputs["theta_points"] = o.theta_points;
    for (int ell : o.ell_list) {
      const auto w = angular::kernel_c_weights(ell);
      for (int i = 0; i < o.theta_points; ++i) {
        const double theta = -kPi + 2 * kPi * i / (o.theta_points - 1);
        r.rows.push_back({{"ell", ell}, {"theta", theta}, {"value", angular::kernel_c_eval(ell, theta)},
                          {"a", w.a}, {"b", w.b}});
      }
    }
  } else if (o.what == "fourier") {
    for (int ell : o.ell_list) {
      if (ell > 100000) throw UsageError("fourier dumps are limited to ell <= 1e5");
      for (long k = 0; k <= 2L * ell + 1; ++k) {
        r.rows.push_back({{"ell", ell}, {"k", k}, {"coefficient", angular::kernel_c_fourier(ell, k)}});
      }
    }
  } else if (o.what == "rate") {
    // (C_ℓ ∗ h)(0) − h(0) for a smooth h (the 2cos pair) or a tent.
    angular::ConvolvedStatistic h = angular::ConvolvedStatistic::tent(1.0);
    if (o.apply == "smooth") {
      h = angular::ConvolvedStatistic::from_pair(angular::FourierStatistic::cosine(1, 2.0),
                                                 angular::FourierStatistic::cosine(1, 1.0));
    } else if (o.apply.rfind("tent:", 0) == 0) {
      double len = 0;
      try {
        len = std::stod(o.apply.substr(5));
      } catch (const std::exception&) {
        throw UsageError("malformed --apply '" + o.apply + "'");
      }
      h = angular::ConvolvedStatistic::tent(len);
    } else {
      const auto s = parse_statistic(o.apply);
      h = convolve(s, s);
    }
    r.inputs["apply"] = o.apply;
    std::vector<double> ls, errs;
    for (int ell : o.ell_list) {
      const auto v = angular::kernel_c_apply(ell, h);
      const double err = std::abs(v - h.at_zero());
      r.rows.push_back({{"ell", ell}, {"value", v.real()}, {"target", h.at_zero().real()}, {"error", err}});
      if (ell > 0 && err > 0) {
        ls.push_back(ell);
        errs.push_back(err);
      }
    }
    r.outputs["loglog_slope"] = slope(ls, errs);
  } else {
    throw UsageError("--what must be values, fourier or rate");
  }
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and simulated fluctuation statistics of Ginibre eigenvalues", "ginibre"};
  app.require_subcommand(1);
  std::string format = "json", out_path;
  std::size_t threads = 0;
  bool no_timing = false;
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "write the report to this file (atomically)");
  app.add_option("--threads", threads, "worker cap (default: GINIBRE_THREADS or all cores)");
  app.add_flag("--no-timing", no_timing, "omit wall-clock timing from the report");

  std::function<Report()> action;

  CovOptions cov;
  auto* cov_cmd = app.add_subcommand("cov", "exact covariance of two linear statistics");
  cov_cmd->require_subcommand(1);
  for (const char* which : {"radial", "angular"}) {
    auto* sub = cov_cmd->add_subcommand(which);
    sub->add_option("--n", cov.n, "matrix size N")->required();
    sub->add_option("--f", cov.f, "first statistic")->required();
    sub->add_option("--g", cov.g, "second statistic (default: f)");
    sub->add_flag("--compare-asymptotic", cov.compare);
    if (std::string(which) == "radial") {
      sub->add_option("--ensemble", cov.ensemble);
      sub->callback([&] { action = [&] { return cov_radial(cov); }; });
    } else {
      sub->add_flag("--decomposed", cov.decomposed);
      sub->callback([&] { action = [&] { return cov_angular(cov); }; });
    }
  }

  CountOptions count;
  auto* count_cmd = app.add_subcommand("count", "counting statistics of windows");
  count_cmd->require_subcommand(1);
  auto* count_var_cmd = count_cmd->add_subcommand("var");
  auto* count_cov_cmd = count_cmd->add_subcommand("cov");
  for (auto* sub : {count_var_cmd, count_cov_cmd}) {
    sub->add_option("--kind", count.kind, "radial or angular");
    sub->add_option("--n", count.n)->required();
    sub->add_option("--ensemble", count.ensemble);
  }
  count_var_cmd->get_option("--kind")->required();
  count_var_cmd->add_option("--window", count.window, "ind-mod:a,b or ind-arg:alpha,beta");
  count_var_cmd->add_option("--arc-frac", count.arc_frac, "symmetric arc covering this fraction of the circle");
  count_var_cmd->add_flag("--compare-asymptotic", count.compare);
  count_var_cmd->callback([&] { action = [&] { return count_var(count); }; });
  count_cov_cmd->add_option("--window1", count.window1)->required();
  count_cov_cmd->add_option("--window2", count.window2)->required();
  count_cov_cmd->callback([&] { action = [&] { return count_cov(count); }; });

  TableOptions table;
  auto* asym_cmd = app.add_subcommand("asymptotics", "asymptotic predictions against exact values");
  asym_cmd->require_subcommand(1);
  auto* table_cmd = asym_cmd->add_subcommand("table");
  table_cmd->add_option("--kind", table.kind,
                        "radial, angular, radial-smooth, angular-smooth, iarg, imod, edgeworth, count-cov")
      ->required();
  table_cmd->add_option("--n-list", table.n_list)->delimiter(',');
  table_cmd->add_option("--m-list", table.m_list)->delimiter(',');
  table_cmd->add_option("--window", table.window);
  table_cmd->add_option("--window1", table.window1);
  table_cmd->add_option("--window2", table.window2);
  table_cmd->add_option("--arc-frac", table.arc_frac);
  table_cmd->add_option("--scaled-width", table.scaled_width, "window width c/√N");
  table_cmd->add_option("--center", table.center, "left end (radial) or centre (angular) of scaled windows");
  table_cmd->add_option("--f", table.f);
  table_cmd->add_option("--g", table.g);
  table_cmd->add_option("--grid", table.grid, "lo:hi:step for iarg/imod");
  table_cmd->callback([&] { action = [&] { return asymptotics_table(table); }; });

  CumulantOptions cum;
  auto* cum_cmd = app.add_subcommand("cumulants", "cumulants of counts from Gram operators");
  cum_cmd->add_option("--region", cum.region, "annulus, sector or bernoulli")->required();
  cum_cmd->add_option("--n", cum.n);
  cum_cmd->add_option("--window", cum.window);
  cum_cmd->add_option("--arc-frac", cum.arc_frac);
  cum_cmd->add_option("--order", cum.order);
  cum_cmd->add_option("--ensemble", cum.ensemble);
  cum_cmd->add_option("--p", cum.p, "Bernoulli probabilities")->delimiter(',');
  cum_cmd->add_flag("--certificate", cum.certificate);
  cum_cmd->add_option("--tolerance", cum.tolerance);
  cum_cmd->callback([&] { action = [&] { return cumulants(cum); }; });

  McOptions mco;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo");
  mc_cmd->require_subcommand(1);
  auto* mc_run_cmd = mc_cmd->add_subcommand("run");
  mc_run_cmd->add_option("--n", mco.n)->required();
  mc_run_cmd->add_option("--samples", mco.samples)->required();
  mc_run_cmd->add_option("--seed", mco.seed)->required();
  mc_run_cmd->add_option("--statistic", mco.statistics)->required();
  mc_run_cmd->add_option("--ensemble", mco.ensemble);
  mc_run_cmd->add_flag("--check-exact", mco.check_exact);
  mc_run_cmd->add_flag("--matrix", mco.matrix, "use the matrix sampler for radial statistics too");
  mc_run_cmd->add_flag("--keep-eigenvalues", mco.keep_eigenvalues);
  mc_run_cmd->add_option("--batch-out", mco.batch_out);
  mc_run_cmd->add_option("--batch-format", mco.batch_format);
  mc_run_cmd->callback([&] { action = [&] { return mc_run(mco); }; });

  CltOptions clt;
  auto* clt_cmd = app.add_subcommand("clt", "central limit checks");
  clt_cmd->require_subcommand(1);
  auto* clt_test_cmd = clt_cmd->add_subcommand("test");
  clt_test_cmd->add_option("--statistic", clt.statistic)->required();
  clt_test_cmd->add_option("--n", clt.n)->required();
  clt_test_cmd->add_option("--samples", clt.samples);
  clt_test_cmd->add_option("--seed", clt.seed);
  clt_test_cmd->add_option("--ensemble", clt.ensemble);
  clt_test_cmd->add_option("--order", clt.order);
  clt_test_cmd->add_option("--tolerance", clt.tolerance);
  clt_test_cmd->callback([&] { action = [&] { return clt_test(clt); }; });

  KernelOptions ker;
  auto* kernel_cmd = app.add_subcommand("kernel", "approximate-identity kernel");
  kernel_cmd->require_subcommand(1);
  auto* dump_cmd = kernel_cmd->add_subcommand("dump");
  dump_cmd->add_option("--what", ker.what, "values, fourier or rate");
  dump_cmd->add_option("--ell-list", ker.ell_list)->delimiter(',');
  dump_cmd->add_option("--theta-points", ker.theta_points);
  dump_cmd->add_option("--apply", ker.apply, "smooth, tent:L or a statistic (rate mode)");
  dump_cmd->callback([&] { action = [&] { return kernel_dump(ker); }; });

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
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const std::size_t saved = thread_count();
    if (threads > 0) set_thread_count(threads);
    const auto start = std::chrono::steady_clock::now();
    Report report = action();
    if (threads > 0) set_thread_count(saved);
    report.command = args;
    if (!no_timing) {
      report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(report, format == "csv" ? Format::csv : Format::json,
         out_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_path), out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace ginibre::cli
