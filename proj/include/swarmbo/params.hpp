// The nine tunable swarm-controller parameters and their search bounds.
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace swarmbo {

inline constexpr std::size_t kNumParams = 9;

using ParamArray = Eigen::Matrix<double, kNumParams, 1>;

class ParamError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct ParamVector {
  double sigma = 1.0;    // swarm interaction spatial scale (points)
  double eta_s = 1.0;    // swarm connections learning rate (1/s)
  double eta_r = 1.0;    // reward connections learning rate (1/s)
  double kappa = 1.0;    // reward interaction spatial scale (points)
  double omega_0 = 0.5;  // baseline oscillatory frequency
  double omega_I = 0.5;  // max increase in oscillatory frequency
  double tau_q = 0.5;    // swarming input time constant (s)
  double tau_r = 0.5;    // reward input time constant (s)
  double tau_c = 0.5;    // sensory-cue input time constant (s)

  static constexpr std::array<std::string_view, kNumParams> kNames = {
      "sigma", "eta_s",   "eta_r", "kappa", "omega_0",
      "omega_I", "tau_q", "tau_r", "tau_c"};
  static constexpr std::array<double, kNumParams> kLower = {
      1e-3, 1e-3, 1e-3, 1e-3, 0.0, 0.0, 0.0, 0.0, 0.0};
  static constexpr std::array<double, kNumParams> kUpper = {
      4.0, 4.0, 4.0, 4.0, 1.0, 1.0, 1.0, 1.0, 1.0};

  static ParamArray lower();
  static ParamArray upper();

  ParamArray to_array() const;
  static ParamVector from_array(const ParamArray &a);

  double &operator[](std::size_t i);
  double operator[](std::size_t i) const;

  bool in_bounds() const;
  /// Throws ParamError naming the first out-of-range parameter.
  void validate() const;
  /// Returns a copy clamped into bounds; names of clamped fields are appended
  /// to `clamped` when given.
  ParamVector clamped(std::vector<std::string> *clamped = nullptr) const;

  /// Map to / from the unit cube spanned by the bounds.
  ParamArray to_unit() const;
  static ParamVector from_unit(const ParamArray &u);

  friend bool operator==(const ParamVector &, const ParamVector &) = default;
};

}  // namespace swarmbo
