#pragma once

#include "lightcone/sphere.hpp"

#include <string>
#include <vector>

namespace lightcone::curves {

// Analytic closed plane curves on [0, 2π).
//   circle            (cos x, sin x)
//   circle_speed2     (cos 2x, sin 2x)
//   ellipse           (1.5 cos x, sin x)
//   perturbed_circle  (cos x + 0.1 cos 2x, sin x + 0.05 sin 3x)
//   lissajous         (cos x, sin x + 0.3 sin 2x)
//   figure_eight      (cos x, sin 2x)
SphereCurve sphere(const std::string& name, int n);
std::vector<std::string> names();
std::vector<std::string> calibration_suite();

// Circle plus a fixed band-limited perturbation of the given amplitude.
SphereCurve perturbed_circle(int n, double amplitude);

}  // namespace lightcone::curves
