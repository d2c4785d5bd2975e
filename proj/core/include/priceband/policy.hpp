#ifndef PRICEBAND_POLICY_HPP
#define PRICEBAND_POLICY_HPP

namespace priceband {

/// Threshold (band) policy: let the spread diffuse inside the open band
/// (x_low, x_high); on exit, reset it to x_star.
struct PolicyThresholds {
    double x_low;
    double x_star;
    double x_high;
};

} // namespace priceband

#endif
