#pragma once

#include <cstddef>

#include "msstab/elliptic.hpp"

namespace msstab {

/// Closed-form eigenvalue of T for the cosine mode cos(n pi x / b) on the flat
/// strip with u = x+1 above and u = -x below: (4b / (n pi)) tanh(n pi a / b).
/// Periodicity restricts n to even values; odd n throws OddMode.
double mode_lambda(int n, double half_height, double period);

/// Largest eigenvalue of T on the flat strip: (2b/pi) tanh(2 pi a / b).
double lambda1_strip(double half_height, double period);

/// Separated jump-source field c * sin(n pi x / b) * sinh(n pi (a - |y|) / b)
/// sampled on the flat grid, symmetric in y. With c = 1 / cosh(n pi a / b) it is
/// v_phi for phi = cos(n pi x / b).
SlitField strip_mode_field(int n, double amplitude, double half_height, double period, const Grid& grid);

/// d/dy of the mode field at y = 0+ : -c (n pi / b) cosh(n pi a / b) sin(n pi x / b).
double strip_mode_neumann_trace(int n, double amplitude, double half_height, double period, double x);

/// Smallest generalized eigenvalue of
///   int phi'^2 - h1 phi(0)^2 - h2 phi(L)^2   against   int phi^2 + int phi'^2
/// on P1 elements with m nodes. Positive iff the segment pair is strictly stable.
double segment_min_eig(double length, double h1, double h2, std::size_t nodes);

}  // namespace msstab
