#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rpsde::app {

enum class PlotKind { trajectory, rps_path, cauchy, measure, conditions, contraction, estimates };

/// Recognizes a CSV header; throws SchemaError listing the known headers.
PlotKind plot_kind_for(const std::vector<std::string>& header);

/// Gnuplot script for a CSV file of the given kind.
std::string plot_script(PlotKind kind, const std::vector<std::string>& header,
                        const std::string& csv_name);

/// Writes `<csv stem>.gp` next to the CSV and returns its path. Never runs
/// the plotting program.
std::filesystem::path emit_plot(const std::filesystem::path& csv);

}  // namespace rpsde::app
