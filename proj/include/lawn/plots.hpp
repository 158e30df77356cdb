#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lawn/config.hpp"
#include "lawn/result_table.hpp"

namespace lawn {

struct SvgFile {
  std::string name;
  std::string content;
};

/// Selection: sum SE, sensing SINR and WPT energy per method. Delivery: delay
/// distribution per method and success rate. ExtTarget: relative error per
/// seed, plus the contour overlay when `contour` (contour_json) is given.
/// Output depends only on the inputs.
std::vector<SvgFile> render_plots(const ResultTable& table, const Json* contour = nullptr);

/// True contour, estimated contour, reflection points, true and estimated
/// centre; series without data are left out of the legend.
std::string render_contour_svg(const Json& contour);

void write_plots(const std::filesystem::path& dir, const ResultTable& table,
                 const Json* contour = nullptr);

}  // namespace lawn
