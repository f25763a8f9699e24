#pragma once

namespace lightcone {

struct Tolerances {
  double group = 1e-10;
  double cone = 1e-9;
  double normalization = 1e-8;
  double pattern = 1e-7;
};

}  // namespace lightcone
