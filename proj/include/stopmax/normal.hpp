#pragma once

namespace stopmax {

/// Standard normal cdf, accurate to a few ulp in both tails.
double std_normal_cdf(double u);

/// Standard normal density.
double std_normal_pdf(double u);

/// log of the standard normal cdf, finite for every finite u (asymptotic series
/// once Phi(u) would underflow).
double std_normal_log_cdf(double u);

/// exp(a) * Phi(u) evaluated in the log domain when the naive product would
/// overflow or underflow.
double exp_times_cdf(double a, double u);

}  // namespace stopmax
