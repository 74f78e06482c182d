#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <robustpr/signal.hpp>

namespace robustpr::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

/// Runs the command line `robustpr <args...>` in-process; args exclude the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// Hardware concurrency, capped by ROBUSTPR_THREADS when set.
unsigned thread_budget();

/// Throws InvalidArgument with guidance when p exceeds the cap.
void check_image_size(Index p, Index cap);

/// Line plot in gnuplot syntax reading columns of a CSV that sits next to
/// the script.
struct PlotSpec {
  std::string csv_file;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  int xcol = 1;
  int ycol = 2;
  bool logx = false;
  bool logy = false;
  std::string yrange;  ///< e.g. "[0:1.05]"; empty = auto
};

std::string gnuplot_script(const PlotSpec& plot);

}  // namespace robustpr::cli
