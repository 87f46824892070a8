#pragma once

#include "specreg/baseline.hpp"
#include "specreg/tuner.hpp"
#include "specreg/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specreg::cli {

enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kBadInput = 2, kMissingPrerequisite = 3 };

/// Raised when a required artifact (e.g. the truth sheet) is absent.
class MissingPrerequisite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { Periodogram, Ls, Als, RegLs };
Method methodFromString(const std::string& name);
std::string toString(Method method);

struct RunConfig {
  Method method = Method::RegLs;
  std::optional<WindowingForm> form;  // method default when unset
  std::optional<std::size_t> P;       // method default when unset
  double k = 1.0;
  std::size_t Q = kDefaultGridSize;
  AlsConfig als{SlidingWindow{20}};
  std::optional<HyperParameters> hp;  // regls: absent means tune first
  std::size_t powerWindow = kDefaultPowerWindow;
  TuneOptions tuning;

  /// Fills method defaults and validates against a dataset of length N.
  void resolve(std::size_t N);
};

/// Parses "lo:hi:n,lo:hi:n" (log10 lambda_s axis, then log10 lambda_d axis).
SweepGrid parseGridSpec(const std::string& text);

int cmdSynth(const std::filesystem::path& scenePath, bool defaultScene, const std::filesystem::path& outPath,
             const std::filesystem::path& writeScenePath, std::ostream& log);

int cmdEstimate(RunConfig config, const std::filesystem::path& datasetPath, const std::filesystem::path& outPath,
                std::ostream& log);

struct TuneCommand {
  WindowingForm form = WindowingForm::NonWindowed;
  std::optional<std::size_t> P;
  double k = 1.0;
  std::size_t powerWindow = kDefaultPowerWindow;
  TuneOptions options;
  bool stubQuadratic = false;  // test mode: (u - 1)^2 + (v + 2)^2 instead of HCLL
};
int cmdTune(const TuneCommand& cmd, const std::filesystem::path& datasetPath, const std::filesystem::path& outPath,
            std::ostream& log);

struct SweepCommand {
  WindowingForm form = WindowingForm::NonWindowed;
  std::optional<std::size_t> P;
  double k = 1.0;
  std::size_t powerWindow = kDefaultPowerWindow;
  std::size_t Q = kDefaultGridSize;
  bool withL2 = true;
};
int cmdSweep(const SweepCommand& cmd, const std::filesystem::path& datasetPath, const std::string& gridSpec,
             const std::filesystem::path& outPath, std::ostream& log);

int cmdEvaluate(const std::vector<std::filesystem::path>& spectraPaths, const std::filesystem::path& datasetPath,
                const std::filesystem::path& outPath, std::ostream& log);

int cmdPlot(const std::filesystem::path& inputPath, const std::filesystem::path& outPath,
            const std::optional<std::filesystem::path>& sweepPath, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Percent with one decimal, as in the comparison table.
std::string formatPercent(double fraction);

}  // namespace specreg::cli
