#pragma once

// Repo-wide numerical tolerances. Tests and checkers read these instead of
// spelling literals.
namespace col::tol {

// Exactness for closed-form identities (projection idempotence, B_R(x||x)).
inline constexpr double kExact = 1e-12;

// Agreement with brute-force grid oracles.
inline constexpr double kGrid = 1e-3;

// Entropy iterates are floored here before the mirror map gradient is taken.
inline constexpr double kEntropyFloor = 1e-12;

// Slack allowed on analytic inequalities evaluated in floating point.
inline constexpr double kInequality = 1e-9;

// Default accuracy of inner best-response solves.
inline constexpr double kOracle = 1e-12;

}  // namespace col::tol
