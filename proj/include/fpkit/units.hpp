#pragma once

#include <cmath>
#include <numbers>

namespace fpkit {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

}  // namespace fpkit
