#pragma once

#include <string>
#include <vector>

namespace wgqed {

// Tabulated frequency-domain observable, e.g. |t(delta)|^2 or a
// homodyne intensity scan.
struct Spectrum {
  std::string x_label = "detuning_MHz";
  std::string y_label = "value";
  std::vector<double> x;
  std::vector<double> y;
};

} // namespace wgqed
