#pragma once

#include <cstddef>

// Numerical thresholds shared by the library, the verifier and the tests.
namespace nap::tol {

inline constexpr double kHermitian = 1e-12;             // relative, Hermitian-tagged matrices
inline constexpr double kHamiltonianHermitian = 1e-10;  // relative, checked per propagation step
inline constexpr double kGram = 1e-12;
inline constexpr double kUnitary = 1e-11;
inline constexpr double kDarkState = 1e-10;
inline constexpr double kBlockForm = 1e-10;
inline constexpr double kResidual = 1e-8;  // relative to max ||H||_F over the sampled times
inline constexpr double kNormDrift = 1e-9;
inline constexpr double kTraceDrift = 1e-8;
inline constexpr double kTraceDriftFatal = 1e-6;
inline constexpr double kPositivity = 1e-8;
inline constexpr double kSingularSine = 1e-3;
inline constexpr double kStatic = 1e-12;  // derivative magnitude treated as zero
inline constexpr double kReconstruction = 1e-6;
inline constexpr double kPhase = 1e-6;
inline constexpr double kRealizability = 1e-9;
inline constexpr double kMapping = 1e-9;
inline constexpr double kFiniteDifferenceFraction = 1e-6;
inline constexpr std::size_t kDefaultGridSteps = 2000;

}  // namespace nap::tol
