#pragma once

#include <string>
#include <vector>

#include "sft/smooth_map.hpp"

namespace sft {

// Natural cubic spline through (t_i, f_i) with t_0 = 0, t_n = 1, f_0 = 0,
// f_n = 1; must be strictly increasing on [0,1]. f''' is piecewise constant.
SmoothMap cubic_spline_map(const std::vector<double>& t, const std::vector<double>& f);

// Whitespace-separated "t f" rows; lines starting with '#' are skipped.
SmoothMap load_spline_map(const std::string& path);

}  // namespace sft
