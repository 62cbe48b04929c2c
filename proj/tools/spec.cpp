#include "spec.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "ginibre/error.hpp"

namespace ginibre::cli {

namespace {

double parse_number(std::string_view token, std::string_view context) {
  std::string t(token);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "pi") return std::numbers::pi;
  if (t == "-pi") return -std::numbers::pi;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw UsageError("malformed number '" + t + "' in '" + std::string(context) + "'");
  }
}

std::vector<double> parse_numbers(std::string_view body, std::string_view context) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = body.find(',', start);
    const auto token = body.substr(start, comma == std::string_view::npos ? body.size() - start
                                                                          : comma - start);
    if (token.empty()) throw UsageError("empty field in '" + std::string(context) + "'");
    out.push_back(parse_number(token, context));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int harmonic(const StatisticSpec& s) {
  const double k = s.values.at(0);
  if (k != std::floor(k) || std::abs(k) > angular::FourierStatistic::kMaxBand) {
    throw UsageError("harmonic index must be an integer of size <= " +
                     std::to_string(angular::FourierStatistic::kMaxBand) + " in '" + s.text + "'");
  }
  return static_cast<int>(k);
}

double amplitude(const StatisticSpec& s) { return s.values.size() > 1 ? s.values[1] : 1.0; }

}  // namespace

StatisticSpec parse_statistic(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw UsageError("statistic '" + std::string(text) + "' lacks a 'kind:' prefix");
  }
  const auto head = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  StatisticSpec s;
  s.text = std::string(text);
  if (head == "fourier") {
    if (body.size() < 2 || body[0] != '@') throw UsageError("expected fourier:@path");
    s.kind = StatisticSpec::Kind::fourier;
    s.path = std::string(body.substr(1));
    return s;
  }
  s.values = parse_numbers(body, text);
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (s.values.size() < lo || s.values.size() > hi) {
      throw UsageError("wrong number of fields in '" + s.text + "'");
    }
  };
  if (head == "poly") {
    s.kind = StatisticSpec::Kind::poly;
    need(1, radial::RadialTestFunction::kMaxDegree + 1);
  } else if (head == "ind-mod") {
    s.kind = StatisticSpec::Kind::ind_mod;
    need(2, 2);
  } else if (head == "ind-arg") {
    s.kind = StatisticSpec::Kind::ind_arg;
    need(2, 2);
  } else if (head == "cos") {
    s.kind = StatisticSpec::Kind::cos;
    need(1, 2);
    harmonic(s);
  } else if (head == "sin") {
    s.kind = StatisticSpec::Kind::sin;
    need(1, 2);
    harmonic(s);
  } else {
    throw UsageError("unknown statistic kind '" + std::string(head) + "'");
  }
  return s;
}

radial::RadialTestFunction to_radial(const StatisticSpec& s) {
  switch (s.kind) {
    case StatisticSpec::Kind::poly:
      return radial::RadialTestFunction::polynomial(s.values);
    case StatisticSpec::Kind::ind_mod:
      return radial::RadialTestFunction::indicator(to_interval(s));
    default:
      throw UsageError("'" + s.text + "' is not a radial statistic");
  }
}

radial::ModulusInterval to_interval(const StatisticSpec& s) {
  if (s.kind != StatisticSpec::Kind::ind_mod) {
    throw UsageError("'" + s.text + "' is not a modulus window (ind-mod:a,b)");
  }
  radial::ModulusInterval w{s.values[0], s.values[1]};
  radial::validate(w);
  return w;
}

angular::ArcWindow to_arc(const StatisticSpec& s) {
  if (s.kind != StatisticSpec::Kind::ind_arg) {
    throw UsageError("'" + s.text + "' is not an arc window (ind-arg:alpha,beta)");
  }
  angular::ArcWindow arc{s.values[0], s.values[1]};
  angular::validate(arc);
  return arc;
}

angular::FourierStatistic to_fourier(const StatisticSpec& s, int arc_band) {
  switch (s.kind) {
    case StatisticSpec::Kind::cos:
      return angular::FourierStatistic::cosine(harmonic(s), amplitude(s));
    case StatisticSpec::Kind::sin:
      return angular::FourierStatistic::sine(harmonic(s), amplitude(s));
    case StatisticSpec::Kind::fourier:
      return angular::FourierStatistic::read_file(s.path, false);
    case StatisticSpec::Kind::ind_arg: {
      if (arc_band < 0) throw UsageError("arc indicators need a finite band here");
      const auto arc = to_arc(s);
      std::vector<angular::cplx> c(static_cast<std::size_t>(2 * arc_band + 1));
      for (long k = -arc_band; k <= arc_band; ++k) {
        c[static_cast<std::size_t>(k + arc_band)] = arc.indicator_coefficient(k);
      }
      return angular::FourierStatistic::from_coefficients(std::move(c), true);
    }
    default:
      throw UsageError("'" + s.text + "' is not an angular statistic");
  }
}

angular::ConvolvedStatistic convolve(const StatisticSpec& f, const StatisticSpec& g) {
  if (f.radial() || g.radial()) throw UsageError("angular covariance needs angular statistics");
  const bool fa = f.kind == StatisticSpec::Kind::ind_arg;
  const bool ga = g.kind == StatisticSpec::Kind::ind_arg;
  if (fa && ga) return angular::ConvolvedStatistic::from_arcs(to_arc(f), to_arc(g));
  // φ̂(k) = f̂(k) ĝ(−k) vanishes beyond the finite band, so an arc paired
  // with a band-limited statistic may be truncated there without error.
  if (fa) {
    const auto gs = to_fourier(g);
    return angular::ConvolvedStatistic::from_pair(to_fourier(f, gs.band()), gs);
  }
  if (ga) {
    const auto fs = to_fourier(f);
    return angular::ConvolvedStatistic::from_pair(fs, to_fourier(g, fs.band()));
  }
  return angular::ConvolvedStatistic::from_pair(to_fourier(f), to_fourier(g));
}

mc::Statistic to_point_statistic(const StatisticSpec& s) {
  mc::Statistic out;
  out.name = s.text;
  switch (s.kind) {
    case StatisticSpec::Kind::poly: {
      auto f = to_radial(s);
      out.per_point = [f](angular::cplx z) { return f(std::abs(z)); };
      out.radial = true;
      break;
    }
    case StatisticSpec::Kind::ind_mod: {
      const auto w = to_interval(s);
      out.per_point = [w](angular::cplx z) {
        const double r = std::abs(z);
        return (r >= w.lo && r <= w.hi) ? 1.0 : 0.0;
      };
      out.radial = true;
      break;
    }
    case StatisticSpec::Kind::ind_arg: {
      const auto arc = to_arc(s);
      out.per_point = [arc](angular::cplx z) {
        const double t = std::arg(z);
        return (t >= arc.alpha && t <= arc.beta) ? 1.0 : 0.0;
      };
      break;
    }
    default: {
      auto f = to_fourier(s);
      if (!f.real_valued()) throw UsageError("Monte Carlo needs a real statistic: '" + s.text + "'");
      out.per_point = [f](angular::cplx z) { return f(std::arg(z)).real(); };
      break;
    }
  }
  return out;
}

}  // namespace ginibre::cli
