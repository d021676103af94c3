#include "app/plot.hpp"

#include <fstream>
#include <sstream>

#include "rpsde/csv.hpp"
#include "rpsde/error.hpp"

namespace rpsde::app {

namespace {

bool state_columns(const std::vector<std::string>& header, std::size_t from) {
  if (header.size() <= from) return false;
  for (std::size_t i = from; i < header.size(); ++i) {
    if (header[i] != "x" + std::to_string(i - from + 1)) return false;
  }
  return true;
}

std::string preamble(const std::string& csv_name, const std::string& title) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << "'\n"
      << "data = '" << csv_name << "'\n";
  return out.str();
}

}  // namespace

PlotKind plot_kind_for(const std::vector<std::string>& header) {
  using H = std::vector<std::string>;
  if (!header.empty() && header[0] == "t" && state_columns(header, 1)) return PlotKind::trajectory;
  if (!header.empty() && header[0] == "phase_t" && state_columns(header, 1)) {
    return PlotKind::rps_path;
  }
  if (header == H{"n", "gap"}) return PlotKind::cauchy;
  if (header.size() >= 2 && header[0] == "phase" && header[1] == "sample_index" &&
      state_columns(header, 2)) {
    return PlotKind::measure;
  }
  if (header == H{"t", "beta", "L"}) return PlotKind::conditions;
  if (header == H{"t", "log_gap"}) return PlotKind::contraction;
  if (header == H{"n", "estimate", "se"}) return PlotKind::estimates;
  std::string got;
  for (std::size_t i = 0; i < header.size(); ++i) got += (i ? "," : "") + header[i];
  throw SchemaError("unrecognized CSV header '" + got +
                    "'; expected one of: t,x1..xd | phase_t,x1..xd | n,gap | "
                    "phase,sample_index,x1..xd | t,beta,L | t,log_gap | n,estimate,se");
}

std::string plot_script(PlotKind kind, const std::vector<std::string>& header,
                        const std::string& csv_name) {
  std::ostringstream out;
  switch (kind) {
    case PlotKind::trajectory:
    case PlotKind::rps_path: {
      out << preamble(csv_name, kind == PlotKind::trajectory ? "trajectory" : "random periodic path")
          << "set xlabel '" << header[0] << "'\n"
          << "plot ";
      for (std::size_t i = 1; i < header.size(); ++i) {
        out << (i > 1 ? ", \\\n     " : "") << "data using 1:" << i + 1 << " with lines";
      }
      out << '\n';
      break;
    }
    case PlotKind::cauchy:
      out << preamble(csv_name, "pullback gaps")
          << "set logscale y\n"
          << "set xlabel 'n (periods)'\n"
          << "set ylabel 'sup gap'\n"
          << "plot data using 1:2 with linespoints\n";
      break;
    case PlotKind::measure:
      out << preamble(csv_name, "periodic measure samples")
          << "set xlabel 'x1'\n"
          << "set ylabel 'count'\n"
          << "stats data using 3 nooutput\n"
          << "bins = 60\n"
          << "width = (STATS_max - STATS_min) / bins\n"
          << "width = width > 0 ? width : 1\n"
          << "bin(x) = width * floor((x - STATS_min) / width) + STATS_min + width / 2\n"
          << "set boxwidth width\n"
          << "set style fill solid 0.5\n"
          << "plot data using (bin($3)):(1.0) smooth frequency with boxes\n";
      break;
    case PlotKind::conditions:
      out << preamble(csv_name, "sampled drift conditions")
          << "set xlabel 't'\n"
          << "plot data using 1:2 with lines, \\\n     data using 1:3 with lines\n";
      break;
    case PlotKind::contraction:
      out << preamble(csv_name, "log gap of a shared-noise pair")
          << "set xlabel 't'\n"
          << "set ylabel 'log gap'\n"
          << "plot data using 1:2 with linespoints\n";
      break;
    case PlotKind::estimates:
      out << preamble(csv_name, "estimates with standard errors")
          << "set xlabel 'n'\n"
          << "plot data using 1:2:3 with yerrorbars\n";
      break;
  }
  return out.str();
}

std::filesystem::path emit_plot(const std::filesystem::path& csv) {
  const auto header = read_csv_header(csv);
  const PlotKind kind = plot_kind_for(header);
  auto script = csv;
  script.replace_extension(".gp");
  std::ofstream out(script, std::ios::binary);
  if (!out) throw Error("cannot write plot script '" + script.string() + "'");
  out << plot_script(kind, header, csv.filename().string());
  return script;
}

}  // namespace rpsde::app
