#pragma once

#include <cstdint>
#include <utility>

#include "mumimo/channel.hpp"

namespace mumimo {

enum class PilotKind { orthogonal, upper_bound, lower_bound, uniform, random };

struct PilotDesignSpec {
  PilotKind kind = PilotKind::orthogonal;
  SystemConfig config;
  FadingProfile fading;
  PowerSplit power;
};

inline constexpr std::uint64_t kDefaultPilotSeed = 0x70AD5ULL;

// Orthogonal-row pilot Xp = R_X^{1/2} U with U U^H = I_K, built from the QR
// of a seeded Gaussian. Requires K <= alpha*T.
PilotMatrix pilot_orthogonal(const PilotDesignSpec& spec,
                             std::uint64_t seed = kDefaultPilotSeed);

// Relaxed-optimum pilot for K > alpha*T: reproduces the target diagonal of
// the whitened gain matrix and realizes the minimal majorizing spectrum with
// K - alpha*T forced zeros, then unwinds the whitening map by SVD. Users with
// zero training power, zero data power, or zero fading get all-zero rows.
// Throws std::domain_error when the relaxed optimum is not realizable as a
// finite-power pilot (whitened singular value reaching 1).
PilotMatrix pilot_upper_bound(const PilotDesignSpec& spec);

// Achievable design: orthogonal rows for the strongest min(K, alpha*T) users,
// all-zero rows for the rest (the weakest users, since d is sorted).
PilotMatrix pilot_lower_bound(const PilotDesignSpec& spec,
                              std::uint64_t seed = kDefaultPilotSeed);

// Uniform-fading optimum. K <= alpha*T: scaled orthonormal rows. K > alpha*T:
// alpha*T columns of the scaled K-point unitary DFT matrix, giving orthogonal
// columns of squared norm gamma*P0*K and row powers alpha*gamma*P0*T.
// Requires uniform d and uniform gamma.
PilotMatrix pilot_uniform(const PilotDesignSpec& spec);

// Baseline: i.i.d. CN(0,1) entries, each row rescaled to meet its exact
// training power.
PilotMatrix pilot_random(const PilotDesignSpec& spec, std::uint64_t seed);

// Residuals of the two relaxed-optimum conditions, for verification:
// first  = max relative error of diag(Xt Xt^H D^2 R_Xd) against the target
//          diagonal, second = max relative error of its nonzero spectrum
//          against the minimal majorizing vector.
std::pair<double, double> upper_bound_condition_residuals(
    const PilotMatrix& pilot, const SystemConfig& cfg,
    const FadingProfile& fading, const PowerSplit& power);

}  // namespace mumimo
