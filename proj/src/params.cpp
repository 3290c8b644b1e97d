#include "swarmbo/params.hpp"

#include <algorithm>
#include <cmath>

namespace swarmbo {

ParamArray ParamVector::lower() {
  ParamArray a;
  for (std::size_t i = 0; i < kNumParams; ++i)
    a[i] = kLower[i];
  return a;
}

ParamArray ParamVector::upper() {
  ParamArray a;
  for (std::size_t i = 0; i < kNumParams; ++i)
    a[i] = kUpper[i];
  return a;
}

double &ParamVector::operator[](std::size_t i) {
  switch (i) {
  case 0: return sigma;
  case 1: return eta_s;
  case 2: return eta_r;
  case 3: return kappa;
  case 4: return omega_0;
  case 5: return omega_I;
  case 6: return tau_q;
  case 7: return tau_r;
  case 8: return tau_c;
  default: throw std::out_of_range("ParamVector index");
  }
}

double ParamVector::operator[](std::size_t i) const {
  return const_cast<ParamVector &>(*this)[i];
}

ParamArray ParamVector::to_array() const {
  ParamArray a;
  for (std::size_t i = 0; i < kNumParams; ++i)
    a[i] = (*this)[i];
  return a;
}

ParamVector ParamVector::from_array(const ParamArray &a) {
  ParamVector p;
  for (std::size_t i = 0; i < kNumParams; ++i)
    p[i] = a[i];
  return p;
}

bool ParamVector::in_bounds() const {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double v = (*this)[i];
    if (!std::isfinite(v) || v < kLower[i] || v > kUpper[i])
      return false;
  }
  return true;
}

void ParamVector::validate() const {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double v = (*this)[i];
    if (!std::isfinite(v) || v < kLower[i] || v > kUpper[i])
      throw ParamError(std::string(kNames[i]) + " = " + std::to_string(v) +
                       " outside [" + std::to_string(kLower[i]) + ", " +
                       std::to_string(kUpper[i]) + "]");
  }
}

ParamVector ParamVector::clamped(std::vector<std::string> *clamped) const {
  ParamVector out = *this;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double v = std::clamp((*this)[i], kLower[i], kUpper[i]);
    if (v != (*this)[i] && clamped)
      clamped->emplace_back(kNames[i]);
    out[i] = v;
  }
  return out;
}

ParamArray ParamVector::to_unit() const {
  return ((to_array() - lower()).array() / (upper() - lower()).array())
      .matrix();
}

ParamVector ParamVector::from_unit(const ParamArray &u) {
  ParamArray raw = lower() + (u.array() * (upper() - lower()).array()).matrix();
  // Keep exact bounds despite rounding.
  for (std::size_t i = 0; i < kNumParams; ++i)
    raw[i] = std::clamp(raw[i], kLower[i], kUpper[i]);
  return from_array(raw);
}

}  // namespace swarmbo
