#pragma once

#include <span>
#include <vector>

#include "nglm/rng.hpp"

namespace nglm {

// Pólya-gamma PG(b, c): shape b >= 0, tilt c.
struct PGParams {
  double b = 1.0;
  double c = 0.0;
};

// Above this shape the sampler returns a moment-matched Gaussian draw.
inline constexpr double kPGGaussianThreshold = 170.0;
// Gamma terms kept by the truncated series used for fractional shapes; the
// remainder is drawn as a Gaussian with the exact residual mean and variance.
inline constexpr int kPGSeriesTerms = 20;

double pg_mean(const PGParams& params);
double pg_variance(const PGParams& params);

// Exact draw for integer b <= 170 (sum of b Devroye-type PG(1, c) draws).
// A fractional part of b is drawn from the truncated gamma series with a
// moment-matched Gaussian tail.
double sample_pg(const PGParams& params, RngStream& rng);

// Devroye alternating-series sampler for PG(1, c).
double sample_pg1(double c, RngStream& rng);

// Truncated sum-of-gammas representation, used for non-integer shapes and as
// an independent reference in tests.
double sample_pg_series(const PGParams& params, int terms, RngStream& rng);

// Elementwise draws. Element i uses the substream rng.split(i), so results
// do not depend on how the batch is partitioned across threads.
std::vector<double> sample_pg_batch(std::span<const double> bs, std::span<const double> cs,
                                    RngStream& rng, int threads = 1);

}  // namespace nglm
