#ifndef PRICEBAND_TESTS_REFERENCE_VALUES_HPP
#define PRICEBAND_TESTS_REFERENCE_VALUES_HPP

#include "priceband/model.hpp"

// Frozen reference values, computed once with a 50-digit arbitrary-precision
// evaluation of the closed forms (coefficients, cost thresholds) and of the
// smooth-fit systems (bisection on the half-width equation to 1e-45, Newton
// for the five-equation system warm-started by continuation), then rounded to
// the nearest double. Tests compare the production code against these numbers
// at tolerances far above the rounding level.
namespace refs {

// --- test problem 1: rho 0.03, sigma 0.2, b 0, delta 5, c 2 -----------------
inline priceband::ModelParams problem1() { return {0.03, 0.2, 0.0, 5.0, 2.0, 0.0, 0.0}; }

inline constexpr double p1_exp_rate = 1.2247448713915890;
inline constexpr double p1_quad_coeff = 6.6666666666666667;
inline constexpr double p1_const_coeff = 32.777777777777778;
inline constexpr double p1_exp_coeff_max = 4.4444444444444444;
inline constexpr double p1_c_bar = 16.883714866223115;
inline constexpr double p1_cost_at_width_1 = 0.72480373801188180;
inline constexpr double p1_exp_coeff = 2.9726586000877186;
inline constexpr double p1_half_width = 1.3187150840818812;
inline constexpr double p1_x_low = 1.1812849159181188;
inline constexpr double p1_x_high = 3.8187150840818812;
inline constexpr double p1_cost_at_coeff_2973 = 1.9988984348364839;
inline constexpr double p1_half_width_at_coeff_2973 = 1.3185126394297399;
inline constexpr double p1_cost_near_coeff_max = 1.3344008921972484e-05; // at 0.999 exp_coeff_max
inline constexpr double p1_peak_value = 38.723094977953215;              // V(x_vertex)
inline constexpr double p1_intervention_value = 36.723094977953215;
inline constexpr double p1_coeff_slope = -0.30986508315903215; // d exp_coeff / d cost at c = 2
inline constexpr double p1_band_prefactor = 1.0466351393921056;
inline constexpr double p1_static_value = 41.666666666666667;
inline constexpr double p1_displayed_sensitivity = 2.7216552697590868;
inline constexpr double p1_sensitivity_prefactor = 1.2171612389003691; // 2/(rate^2 C^2)
inline constexpr double p1_half_width_1em6 = 0.033098868840662517;
inline constexpr double p1_exp_coeff_1em6 = 4.4432274165328785;
inline constexpr double p1_ratio_1em6 = 1.0000410799551626;
inline constexpr double p1_half_width_1em8 = 0.010466394388926604;
inline constexpr double p1_exp_coeff_1em8 = 4.4443227296538817;
inline constexpr double p1_ratio_1em8 = 1.0000041079268152;
inline constexpr double p1_peak_value_1em8 = 41.666423237085541;
inline constexpr double p1_scaled_sensitivity_1em6 = -1.2168945902305293; // sqrt(c) dV/dc(x_v)
inline constexpr double p1_mean_exit_time = 43.475236824627077;     // half_width^2 / sigma^2
inline constexpr double p1_mean_exit_discount = 0.38261321496951653; // 1/cosh(rate*half_width)
inline constexpr double p1_static_integral_300 = 41.661524591496388; // y_v/rho (1 - e^{-300 rho})
inline constexpr double p1_tail_bound_300 = 0.0051420751702783146;

// --- test problem 2: rho 0.05, sigma 0.3, b 3, delta 5, c 0.5 ---------------
inline priceband::ModelParams problem2() { return {0.05, 0.3, 3.0, 5.0, 0.5, 0.0, 0.0}; }

inline constexpr double p2_x_vertex = 3.4375;  // 55/16
inline constexpr double p2_y_vertex = 0.78125; // 25/32
inline constexpr double p2_x_zero = 1.875;
inline constexpr double p2_share_at_vertex = 0.3125; // 5/16
inline constexpr double p2_exp_rate = 1.0540925533894598;
inline constexpr double p2_c_bar = 2.7802897404575928;
inline constexpr double p2_exp_coeff = 4.8449981518106975;
inline constexpr double p2_half_width = 0.98314122810175243;
inline constexpr double p2_x_low = 2.4543587718982476;
inline constexpr double p2_x_high = 4.4206412281017524;
inline constexpr double p2_peak_value = 13.794996303621395;

// --- test problem 3: rho 0.03, mu 0.2, sigma 0.25, b 0.4, delta 5, c 1.5 ----
inline priceband::ModelParams problem3() { return {0.03, 0.25, 0.4, 5.0, 1.5, 0.2, 0.0}; }

inline constexpr double p3_root_pos = 6.5466401061363022;
inline constexpr double p3_root_neg = -0.14664010613630219;
inline constexpr double p3_lin_coeff = 134.66666666666667;
inline constexpr double p3_const_shift = 926.11111111111111;
inline constexpr double p3_coeff_grow = 2.0509057977496908e-14;
inline constexpr double p3_coeff_decay = 959.98722955704819;
inline constexpr double p3_x_low = 1.4596213060669152;
inline constexpr double p3_x_star = 3.5039225750178899;
inline constexpr double p3_x_high = 4.7314895383793873;
inline constexpr double p3_peak_value = 31.625560683137021;

// --- test problem 4: rho 0.05, mu 0.1, sigma 0.3, b 0.5, delta 5, c 1, lambda 0.5
inline priceband::ModelParams problem4() { return {0.05, 0.3, 0.5, 5.0, 1.0, 0.1, 0.5}; }

inline constexpr double p4_root_pos = 2.6426720835655802;
inline constexpr double p4_root_neg = -0.42044986134335797;
inline constexpr double p4_coeff_grow = 2.0367241181317777e-05;
inline constexpr double p4_coeff_decay = 126.23964975280977;
inline constexpr double p4_x_low = 1.4829599168469522;
inline constexpr double p4_x_star = 3.1436560587459163;
inline constexpr double p4_x_high = 4.3514969949066230;
inline constexpr double p4_peak_value = 19.919465208616461;
inline constexpr double p4_x_hat = 2.7159090909090909;

} // namespace refs

#endif
