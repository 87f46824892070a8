#pragma once

#include "specreg/types.hpp"

namespace specreg {

inline constexpr std::size_t kDefaultGridSize = 1024;

/// Row m is the AR PSD of (a_m, r_m^e) on nu = q/Q. Rows are evaluated in parallel.
SpectrumSheet renderSheet(const ArCoefficientField& field, std::size_t Q = kDefaultGridSize);

/// Normalized accumulated L^r spectral error, as a fraction (1.0 == 100%).
/// Integrals are Riemann sums over q = 0..Q-1.
double lrDistance(const SpectrumSheet& est, const SpectrumSheet& truth, int r);

/// Riemann-sum integral of one sheet row over [0, 1).
double rowPower(const SpectrumSheet& sheet, std::size_t m);

namespace serial {
SpectrumSheet renderSheet(const ArCoefficientField& field, std::size_t Q = kDefaultGridSize);
}

}  // namespace specreg
