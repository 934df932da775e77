#pragma once

// Numerical tolerances shared by the library and its test suites.
namespace starnoise {

inline constexpr double kHermitianTol = 1e-10;       // max |M - M^dagger| entrywise
inline constexpr double kTraceTol = 1e-10;           // |Tr(rho) - 1|
inline constexpr double kPsdTol = 1e-10;             // eigenvalues >= -kPsdTol
inline constexpr double kUnitVectorTol = 1e-10;      // | |v| - 1 |
inline constexpr double kCompletenessTol = 1e-12;    // POVM sum / Kraus trace preservation
inline constexpr double kRoundTripTol = 1e-12;       // bloch compose/decompose round trip
inline constexpr double kSpectrumTol = 1e-12;        // 3x3 Jacobi eigenvalue target
inline constexpr double kProbabilityFloor = -1e-12;  // clip threshold for tiny negative probabilities
inline constexpr double kDistributionSumTol = 1e-10; // |sum(p) - 1| before renormalization

}  // namespace starnoise
