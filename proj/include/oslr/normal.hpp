#pragma once

namespace oslr {

/// Standard normal distribution function.
double normal_cdf(double z);

/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);

/// Standard normal quantile for p in (0, 1) (Wichura's AS 241, ~1e-16 relative).
double normal_quantile(double p);

}  // namespace oslr
