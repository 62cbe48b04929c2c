#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ginibre/angular.hpp"
#include "ginibre/mc.hpp"
#include "ginibre/radial.hpp"

namespace ginibre::cli {

/// Malformed command line or argument value (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One term of the statistic mini-language:
///   poly:c0,c1,...      Σ c_j r^j
///   ind-mod:a,b         1{a ≤ |z| ≤ b}; b may be "inf"
///   ind-arg:alpha,beta  1{alpha ≤ arg z ≤ beta}, radians
///   cos:k[,amp]  sin:k[,amp]
///   fourier:@path       coefficient file, lines "k re im"
struct StatisticSpec {
  enum class Kind { poly, ind_mod, ind_arg, cos, sin, fourier };

  Kind kind = Kind::poly;
  std::string text;
  std::vector<double> values;
  std::string path;

  bool radial() const { return kind == Kind::poly || kind == Kind::ind_mod; }
  bool is_window() const { return kind == Kind::ind_mod || kind == Kind::ind_arg; }
};

StatisticSpec parse_statistic(std::string_view text);

radial::RadialTestFunction to_radial(const StatisticSpec& s);
radial::ModulusInterval to_interval(const StatisticSpec& s);
angular::ArcWindow to_arc(const StatisticSpec& s);
/// Finite-band Fourier statistic. Arc indicators are truncated at `arc_band`.
angular::FourierStatistic to_fourier(const StatisticSpec& s, int arc_band = 0);
/// Convolved statistic of a pair of angular specs (either may be an arc).
angular::ConvolvedStatistic convolve(const StatisticSpec& f, const StatisticSpec& g);
/// Per-point function for Monte Carlo.
mc::Statistic to_point_statistic(const StatisticSpec& s);

}  // namespace ginibre::cli
