#pragma once

namespace ferrodyn::constants {

// CODATA 2018 exact/recommended values, SI.
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double q_e = 1.602176634e-19;
inline constexpr double k_B = 1.380649e-23;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double m_e = 9.1093837015e-31;
inline constexpr double pi = 3.14159265358979323846;

}  // namespace ferrodyn::constants
