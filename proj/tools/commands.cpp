#include "commands.hpp"

#include "specreg/io.hpp"
#include "specreg/parallel.hpp"
#include "specreg/scene.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace specreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path sidecarPath(const fs::path& out) {
  auto p = out;
  p.replace_extension(".json");
  return p;
}

fs::path siblingPath(const fs::path& out, const std::string& suffix) {
  auto p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

json complexList(const CVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
  return arr;
}

json indexList(const std::vector<bool>& flags) {
  json arr = json::array();
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) arr.push_back(i);
  }
  return arr;
}

json traceJson(const std::vector<TraceEntry>& trace) {
  json arr = json::array();
  for (const auto& e : trace) {
    arr.push_back({{"log10LambdaS", e.log10S}, {"log10LambdaD", e.log10D}, {"hcll", e.hcll}, {"accepted", e.accepted}});
  }
  return arr;
}

json tuneJson(const TuneResult& r) {
  return {{"lambdaS", r.lambdaS},
          {"lambdaD", r.lambdaD},
          {"log10LambdaS", std::log10(r.lambdaS)},
          {"log10LambdaD", std::log10(r.lambdaD)},
          {"hcll", r.hcll},
          {"sweeps", r.sweeps},
          {"converged", r.converged},
          {"boundaryHit", r.boundaryHit},
          {"trace", traceJson(r.trace)}};
}

std::string gridAxisJson(const std::vector<double>& axis) { return json(axis).dump(); }

std::size_t resolveOrder(const std::optional<std::size_t>& P, std::size_t N) { return P.value_or(N - 1); }

}  // namespace

Method methodFromString(const std::string& name) {
  if (name == "periodogram") return Method::Periodogram;
  if (name == "ls") return Method::Ls;
  if (name == "als") return Method::Als;
  if (name == "regls") return Method::RegLs;
  throw InvalidArgument("unknown method '" + name + "'");
}

std::string toString(Method method) {
  switch (method) {
    case Method::Periodogram:
      return "periodogram";
    case Method::Ls:
      return "ls";
    case Method::Als:
      return "als";
    case Method::RegLs:
      return "regls";
  }
  return "?";
}

void RunConfig::resolve(std::size_t N) {
  switch (method) {
    case Method::Periodogram:
      break;
    case Method::Ls:
    case Method::Als:
      if (!form) form = WindowingForm::PostWindowed;
      if (!P) P = 3;
      break;
    case Method::RegLs:
      if (!form) form = WindowingForm::NonWindowed;
      if (!P) P = N - 1;
      break;
  }
  if (Q < N) throw InvalidArgument("Q must be >= N");
  if (P) rowCount(*form, N, *P);
  if (method == Method::Als) als.validate();
  if (powerWindow < 1 || powerWindow % 2 == 0) throw InvalidArgument("power window must be odd and >= 1");
  if (hp) {
    hp->P = *P;
    hp->k = k;
    hp->validate();
  }
  tuning.box.validate();
}

SweepGrid parseGridSpec(const std::string& text) {
  auto parseAxis = [](const std::string& part, double& lo, double& hi, std::size_t& n) {
    std::istringstream ss(part);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c)) {
      throw InvalidArgument("grid axis must read lo:hi:n, got '" + part + "'");
    }
    lo = io::parseDouble(a);
    hi = io::parseDouble(b);
    const double count = io::parseDouble(c);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(count >= 1.0) || count != std::floor(count)) {
      throw InvalidArgument("bad grid axis '" + part + "'");
    }
    n = static_cast<std::size_t>(count);
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("grid spec must read sLo:sHi:nS,dLo:dHi:nD");
  double sLo, sHi, dLo, dHi;
  std::size_t nS, nD;
  parseAxis(text.substr(0, comma), sLo, sHi, nS);
  parseAxis(text.substr(comma + 1), dLo, dHi, nD);
  return SweepGrid::uniform(sLo, sHi, nS, dLo, dHi, nD);
}

std::string formatPercent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

int cmdSynth(const fs::path& scenePath, bool defaultScene, const fs::path& outPath, const fs::path& writeScenePath,
             std::ostream& log) {
  SceneSpec spec = defaultScene ? fig1LikeScene() : io::sceneFromJson(io::readText(scenePath));
  spec.validate();
  if (!writeScenePath.empty()) io::writeText(writeScenePath, io::sceneToJson(spec));
  if (outPath.empty()) return kOk;
  auto data = sampleScene(spec);
  data.specHash = io::sceneHash(spec);
  io::writeDataset(outPath, data);
  log << "wrote " << outPath.string() << " (M=" << data.M() << ", N=" << data.N() << ")\n";
  return kOk;
}

int cmdEstimate(RunConfig config, const fs::path& datasetPath, const fs::path& outPath, std::ostream& log) {
  const auto data = io::readDataset(datasetPath);
  config.resolve(data.N());
  const auto start = Clock::now();

  json side;
  side["method"] = toString(config.method);
  side["Q"] = config.Q;
  side["powerWindow"] = config.powerWindow;
  side["hp"] = nullptr;
  SpectrumSheet sheet;
  std::optional<ArCoefficientField> field;
  json timings;

  switch (config.method) {
    case Method::Periodogram:
      sheet = periodogram(data, config.Q);
      break;
    case Method::Ls:
      field = lsField(data, *config.P, *config.form);
      break;
    case Method::Als: {
      field = alsField(data, *config.P, *config.form, config.als);
      if (const auto* w = std::get_if<SlidingWindow>(&config.als.mode)) {
        side["als"] = {{"W", w->W}};
      } else {
        side["als"] = {{"lambda", std::get<Forgetting>(config.als.mode).lambda}};
      }
      break;
    }
    case Method::RegLs: {
      const auto pw = powerWeights(data, config.powerWindow);
      if (pw.allZero) side["flags"]["allZeroPowers"] = true;
      HyperParameters hp;
      if (config.hp) {
        hp = *config.hp;
      } else {
        const auto tuneStart = Clock::now();
        const auto tuned = tune(data, *config.form, pw.weights(), *config.P, config.k, config.tuning);
        timings["tune"] = secondsSince(tuneStart);
        hp = {tuned.lambdaS, tuned.lambdaD, config.k, *config.P};
        side["tune"] = tuneJson(tuned);
      }
      const auto smoothStart = Clock::now();
      field = regularizedEstimate(data, hp, *config.form, pw.weights(), config.Q);
      timings["smooth"] = secondsSince(smoothStart);
      side["hp"] = {{"lambdaS", hp.lambdaS}, {"lambdaD", hp.lambdaD}, {"k", hp.k}, {"P", hp.P}};
      break;
    }
  }

  if (field) {
    sheet = renderSheet(*field, config.Q);
    side["form"] = toString(*config.form);
    side["P"] = *config.P;
    json coeffs = json::array();
    for (const auto& a : field->coeffs) coeffs.push_back(complexList(a));
    side["coefficients"] = std::move(coeffs);
    side["errPowers"] = std::vector<double>(field->errPowers.data(), field->errPowers.data() + field->errPowers.size());
    side["flags"]["rankDeficient"] = indexList(field->rankDeficient);
  }
  side["flags"]["poleOnGrid"] = indexList(sheet.poleFlags);
  timings["total"] = secondsSince(start);
  side["timings"] = timings;

  io::writeSheet(outPath, sheet);
  io::writeText(sidecarPath(outPath), side.dump(1) + "\n");
  log << "wrote " << outPath.string() << " (" << toString(config.method) << ")\n";
  return kOk;
}

int cmdTune(const TuneCommand& cmd, const fs::path& datasetPath, const fs::path& outPath, std::ostream& log) {
  TuneResult result;
  json report;
  if (cmd.stubQuadratic) {
    result = tune([](double u, double v) { return (u - 1.0) * (u - 1.0) + (v + 2.0) * (v + 2.0); }, cmd.options);
    report["objective"] = "stub-quadratic";
  } else {
    const auto data = io::readDataset(datasetPath);
    const auto P = resolveOrder(cmd.P, data.N());
    const auto pw = powerWeights(data, cmd.powerWindow);
    result = tune(data, cmd.form, pw.weights(), P, cmd.k, cmd.options);
    report["objective"] = "hcll";
    report["form"] = toString(cmd.form);
    report["P"] = P;
    report["k"] = cmd.k;
    report["powerWindow"] = cmd.powerWindow;
  }
  const auto& box = cmd.options.box;
  report["searchBox"] = {{"log10LambdaS", {box.sLo, box.sHi}}, {"log10LambdaD", {box.dLo, box.dHi}}};
  report["tol"] = cmd.options.tol;
  report.update(tuneJson(result));
  io::writeText(outPath, report.dump(1) + "\n");
  log << "tuned log10 lambda_s = " << std::log10(result.lambdaS) << ", log10 lambda_d = " << std::log10(result.lambdaD)
      << ", HCLL = " << result.hcll << (result.boundaryHit ? " (on search-box boundary)" : "") << "\n";
  return kOk;
}

int cmdSweep(const SweepCommand& cmd, const fs::path& datasetPath, const std::string& gridSpec, const fs::path& outPath,
             std::ostream& log) {
  const auto grid = parseGridSpec(gridSpec);
  const auto data = io::readDataset(datasetPath);
  const auto P = resolveOrder(cmd.P, data.N());
  rowCount(cmd.form, data.N(), P);
  const auto pw = powerWeights(data, cmd.powerWindow);

  const RMatrix hcll = hcllSweep(data, cmd.form, pw.weights(), P, cmd.k, grid);
  io::writeText(outPath, io::sheetToCsv(hcll));

  json side;
  side["kind"] = "sweep";
  side["form"] = toString(cmd.form);
  side["P"] = P;
  side["k"] = cmd.k;
  side["log10LambdaS"] = grid.log10S;
  side["log10LambdaD"] = grid.log10D;
  side["hcll"] = outPath.filename().string();

  auto minJson = [&](const GridMinimum& g) {
    const bool interior = g.row > 0 && g.col > 0 && g.row + 1 < grid.log10S.size() && g.col + 1 < grid.log10D.size();
    return json{{"row", g.row},
                {"col", g.col},
                {"log10LambdaS", grid.log10S[g.row]},
                {"log10LambdaD", grid.log10D[g.col]},
                {"value", g.value},
                {"interior", interior}};
  };
  std::optional<GridMinimum> hMin;
  try {
    hMin = gridMinimum(hcll);
    side["hcllMinimum"] = minJson(*hMin);
  } catch (const InvalidArgument&) {
    side["hcllMinimum"] = nullptr;
  }

  if (cmd.withL2 && data.truth()) {
    const RMatrix l2 = l2Sweep(data, cmd.form, pw.weights(), P, cmd.k, grid, data.truth()->gridSize());
    const auto l2Path = siblingPath(outPath, ".l2.csv");
    io::writeText(l2Path, io::sheetToCsv(l2));
    side["l2"] = l2Path.filename().string();
    try {
      const auto lMin = gridMinimum(l2);
      side["l2Minimum"] = minJson(lMin);
      if (hMin) {
        const auto dr = lMin.row > hMin->row ? lMin.row - hMin->row : hMin->row - lMin.row;
        const auto dc = lMin.col > hMin->col ? lMin.col - hMin->col : hMin->col - lMin.col;
        const auto cells = std::max(dr, dc);
        side["minimaCellDistance"] = cells;
        if (cells > 1) {
          side["discrepancy"] = "HCLL and L2 minima are " + std::to_string(cells) + " cells apart";
        }
      }
    } catch (const InvalidArgument&) {
      side["l2Minimum"] = nullptr;
    }
  }
  io::writeText(sidecarPath(outPath), side.dump(1) + "\n");
  log << "wrote " << outPath.string() << " (" << grid.log10S.size() << "x" << grid.log10D.size() << ")\n";
  return kOk;
}

int cmdEvaluate(const std::vector<fs::path>& spectraPaths, const fs::path& datasetPath, const fs::path& outPath,
                std::ostream& log) {
  const auto data = io::readDataset(datasetPath);
  if (!data.truth()) throw MissingPrerequisite("dataset '" + datasetPath.string() + "' carries no truth sheet");
  const auto& truth = *data.truth();

  std::string table = "Method\tL^2\tL^1\n";
  for (const auto& path : spectraPaths) {
    const auto est = io::readSheet(path);
    std::string label = path.stem().string();
    const auto side = sidecarPath(path);
    if (fs::exists(side)) {
      try {
        const auto j = json::parse(io::readText(side));
        if (j.contains("method") && j["method"].is_string()) label = j["method"].get<std::string>();
      } catch (const json::exception&) {
      }
    }
    table += label + '\t' + formatPercent(lrDistance(est, truth, 2)) + '\t' + formatPercent(lrDistance(est, truth, 1)) +
             '\n';
  }
  io::writeText(outPath, table);
  log << table;
  return kOk;
}

int cmdPlot(const fs::path& inputPath, const fs::path& outPath, const std::optional<fs::path>& sweepPath,
            std::ostream& log) {
  const auto dat = siblingPath(outPath, ".dat");
  const auto png = siblingPath(outPath, ".png");
  const auto script = siblingPath(outPath, ".gp");

  auto writeSweepGrid = [&](const fs::path& csv) {
    const auto side = json::parse(io::readText(sidecarPath(csv)));
    const auto s = side.at("log10LambdaS").get<std::vector<double>>();
    const auto d = side.at("log10LambdaD").get<std::vector<double>>();
    const RMatrix values = io::sheetFromCsv(io::readText(csv));
    if (static_cast<std::size_t>(values.rows()) != s.size() || static_cast<std::size_t>(values.cols()) != d.size()) {
      throw io::IoError("sweep CSV does not match its axes");
    }
    std::string text;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        text += io::formatDouble(d[j]) + ' ' + io::formatDouble(s[i]) + ' ' +
                (std::isnan(values(i, j)) ? std::string("NaN") : io::formatDouble(values(i, j))) + '\n';
      }
      text += '\n';
    }
    io::writeText(dat, text);
    const auto best = gridMinimum(values);
    io::writeText(siblingPath(outPath, ".min.dat"),
                  io::formatDouble(d[best.col]) + ' ' + io::formatDouble(s[best.row]) + '\n');
  };

  std::string gp = "set terminal pngcairo size 900,700\nset output '" + png.filename().string() + "'\n";
  const bool isJson = inputPath.extension() == ".json";
  if (isJson) {
    const auto report = json::parse(io::readText(inputPath));
    if (!report.contains("trace")) throw io::IoError("plot input JSON has no 'trace'");
    std::string text;
    for (const auto& e : report["trace"]) {
      text += io::formatDouble(e["log10LambdaD"].get<double>()) + ' ' + io::formatDouble(e["log10LambdaS"].get<double>()) +
              ' ' + io::formatDouble(e["hcll"].get<double>()) + ' ' + (e["accepted"].get<bool>() ? "1" : "0") + '\n';
    }
    const auto tracePath = siblingPath(outPath, ".trace.dat");
    io::writeText(tracePath, text);
    gp += "set xlabel 'log10 lambda_d'\nset ylabel 'log10 lambda_s'\n";
    if (sweepPath) {
      writeSweepGrid(*sweepPath);
      gp += "set view map\nset contour base\nset cntrparam levels 20\nunset surface\n"
            "set table '" + siblingPath(outPath, ".contour.dat").filename().string() + "'\n"
            "splot '" + dat.filename().string() + "' using 1:2:3 with lines\nunset table\n"
            "plot '" + siblingPath(outPath, ".contour.dat").filename().string() + "' with lines lc 'gray' notitle, \\\n"
            "     '" + tracePath.filename().string() + "' using 1:2 with linespoints lw 2 title 'iterates'\n";
    } else {
      gp += "plot '" + tracePath.filename().string() + "' using 1:2 with linespoints lw 2 title 'iterates'\n";
    }
  } else if (fs::exists(sidecarPath(inputPath)) &&
             json::parse(io::readText(sidecarPath(inputPath))).value("kind", std::string{}) == "sweep") {
    writeSweepGrid(inputPath);
    gp += "set xlabel 'log10 lambda_d'\nset ylabel 'log10 lambda_s'\nset view map\nset contour base\n"
          "set cntrparam levels 20\n"
          "splot '" + dat.filename().string() + "' using 1:2:3 with pm3d notitle, \\\n"
          "      '" + siblingPath(outPath, ".min.dat").filename().string() +
          "' using 1:2:(0) with points pt 3 ps 3 lc 'white' title 'minimum'\n";
  } else {
    const auto sheet = io::readSheet(inputPath);
    std::string text;
    for (Eigen::Index m = 0; m < sheet.values.rows(); ++m) {
      for (Eigen::Index q = 0; q < sheet.values.cols(); ++q) {
        if (q > 0) text += ' ';
        text += io::formatDouble(sheet.values(m, q));
      }
      text += '\n';
    }
    io::writeText(dat, text);
    const auto Q = std::to_string(sheet.gridSize());
    gp += "set xlabel 'normalized frequency'\nset ylabel 'range bin'\nset cblabel 'PSD (dB)'\n"
          "set xrange [0:1]\nset yrange [0:" + std::to_string(sheet.bins()) + "]\n"
          "plot '" + dat.filename().string() + "' matrix using ($1/" + Q +
          "):2:(10*log10($3 > 0 ? $3 : 1e-30)) with image notitle\n";
  }
  io::writeText(script, gp);
  log << "wrote " << script.string() << "\n";
  return kOk;
}

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularized long-AR spectral analysis of multi-bin Doppler signals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "specreg 1.0.0");

  // synth
  auto* synth = app.add_subcommand("synth", "Sample a scene into a dataset file");
  std::string scenePath, synthOut, writeScene;
  bool defaultScene = false;
  synth->add_option("--scene", scenePath, "Scene spec JSON");
  synth->add_flag("--default-scene", defaultScene, "Use the built-in Fig1-like scene");
  synth->add_option("--out,-o", synthOut, "Dataset header path (.json)");
  synth->add_option("--write-scene", writeScene, "Also write the scene spec JSON here");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate a spectrum sheet with one method");
  RunConfig run;
  std::string method = "regls", form, datasetPath, estOut;
  std::size_t P = 0, W = 0;
  double forget = 0.0, lambdaS = 0.0, lambdaD = 0.0;
  estimate->add_option("--method", method, "periodogram | ls | als | regls")->capture_default_str();
  estimate->add_option("--form", form, "non | pre | post | double");
  estimate->add_option("--order,-P", P, "AR order");
  estimate->add_option("--k", run.k, "Smoothness order")->capture_default_str();
  estimate->add_option("--Q", run.Q, "Frequency grid size")->capture_default_str();
  estimate->add_option("--window,-W", W, "ALS sliding window length");
  estimate->add_option("--forgetting", forget, "ALS forgetting factor in (0, 1]");
  estimate->add_option("--lambda-s", lambdaS, "Spectral smoothness weight (regls)");
  estimate->add_option("--lambda-d", lambdaD, "Depth continuity weight (regls)");
  estimate->add_option("--power-window", run.powerWindow, "Power smoothing window (odd)")->capture_default_str();
  estimate->add_option("--dataset,-d", datasetPath, "Dataset header path")->required();
  estimate->add_option("--out,-o", estOut, "Spectrum sheet CSV path")->required();

  auto addBox = [](CLI::App* sub, TuneOptions& opts) {
    sub->add_option("--s-lo", opts.box.sLo, "log10 lambda_s lower bound")->capture_default_str();
    sub->add_option("--s-hi", opts.box.sHi, "log10 lambda_s upper bound")->capture_default_str();
    sub->add_option("--d-lo", opts.box.dLo, "log10 lambda_d lower bound")->capture_default_str();
    sub->add_option("--d-hi", opts.box.dHi, "log10 lambda_d upper bound")->capture_default_str();
    sub->add_option("--tol", opts.tol, "Sweep improvement tolerance")->capture_default_str();
  };
  addBox(estimate, run.tuning);

  // tune
  auto* tuneCmd = app.add_subcommand("tune", "Maximum-likelihood tuning of (lambda_s, lambda_d)");
  TuneCommand tc;
  std::string tuneForm = "non", tuneData, tuneOut;
  std::size_t tuneP = 0;
  std::vector<double> start;
  tuneCmd->add_option("--dataset,-d", tuneData, "Dataset header path");
  tuneCmd->add_option("--out,-o", tuneOut, "Tune report JSON")->required();
  tuneCmd->add_option("--form", tuneForm, "Windowing form")->capture_default_str();
  tuneCmd->add_option("--order,-P", tuneP, "AR order (default N-1)");
  tuneCmd->add_option("--k", tc.k, "Smoothness order")->capture_default_str();
  tuneCmd->add_option("--power-window", tc.powerWindow, "Power smoothing window (odd)")->capture_default_str();
  tuneCmd->add_option("--start", start, "Starting point: log10 lambda_s log10 lambda_d")->expected(2);
  tuneCmd->add_flag("--stub-quadratic", tc.stubQuadratic, "Test mode: minimize (u-1)^2 + (v+2)^2");
  addBox(tuneCmd, tc.options);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "HCLL (and L2) sheets on a log10 grid");
  SweepCommand sc;
  std::string sweepForm = "non", sweepData, sweepOut, gridSpec = "-2:1:100,1:3:100";
  std::size_t sweepP = 0;
  bool noL2 = false;
  sweep->add_option("--dataset,-d", sweepData, "Dataset header path")->required();
  sweep->add_option("--grid", gridSpec, "sLo:sHi:nS,dLo:dHi:nD in log10 units")->capture_default_str();
  sweep->add_option("--out,-o", sweepOut, "HCLL sheet CSV path")->required();
  sweep->add_option("--form", sweepForm, "Windowing form")->capture_default_str();
  sweep->add_option("--order,-P", sweepP, "AR order (default N-1)");
  sweep->add_option("--k", sc.k, "Smoothness order")->capture_default_str();
  sweep->add_option("--power-window", sc.powerWindow, "Power smoothing window (odd)")->capture_default_str();
  sweep->add_flag("--no-l2", noL2, "Skip the L2 sheet even when truth is present");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "L1/L2 comparison table against the truth sheet");
  std::vector<std::string> spectra;
  std::string evalData, evalOut;
  evaluate->add_option("--spectra,-s", spectra, "Spectrum sheet CSVs")->required();
  evaluate->add_option("--dataset,-d", evalData, "Dataset header path")->required();
  evaluate->add_option("--out,-o", evalOut, "Table output path")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "Emit gnuplot data and script");
  std::string plotIn, plotOut, plotSweep;
  plot->add_option("--input,-i", plotIn, "Spectrum sheet CSV, sweep CSV or tune report JSON")->required();
  plot->add_option("--out,-o", plotOut, "Output prefix")->required();
  plot->add_option("--sweep", plotSweep, "Sweep CSV to overlay a tune trace on");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "specreg 1.0.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  applyThreadEnv();
  try {
    if (synth->parsed()) {
      if (!defaultScene && scenePath.empty()) throw InvalidArgument("synth needs --scene or --default-scene");
      if (synthOut.empty() && writeScene.empty()) throw InvalidArgument("synth needs --out or --write-scene");
      return cmdSynth(scenePath, defaultScene, synthOut, writeScene, out);
    }
    if (estimate->parsed()) {
      run.method = methodFromString(method);
      if (!form.empty()) run.form = windowingFromString(form);
      if (P > 0) run.P = P;
      if (W > 0 && forget > 0.0) throw InvalidArgument("choose either --window or --forgetting");
      if (W > 0) run.als.mode = SlidingWindow{W};
      if (forget > 0.0) run.als.mode = Forgetting{forget};
      if ((lambdaS > 0.0) != (lambdaD > 0.0)) throw InvalidArgument("--lambda-s and --lambda-d go together");
      if (lambdaS > 0.0) run.hp = HyperParameters{lambdaS, lambdaD, run.k, 1};
      return cmdEstimate(run, datasetPath, estOut, out);
    }
    if (tuneCmd->parsed()) {
      tc.form = windowingFromString(tuneForm);
      if (tuneP > 0) tc.P = tuneP;
      if (!start.empty()) tc.options.start = std::make_pair(start[0], start[1]);
      if (!tc.stubQuadratic && tuneData.empty()) throw InvalidArgument("tune needs --dataset");
      return cmdTune(tc, tuneData, tuneOut, out);
    }
    if (sweep->parsed()) {
      sc.form = windowingFromString(sweepForm);
      if (sweepP > 0) sc.P = sweepP;
      sc.withL2 = !noL2;
      return cmdSweep(sc, sweepData, gridSpec, sweepOut, out);
    }
    if (evaluate->parsed()) {
      std::vector<fs::path> paths(spectra.begin(), spectra.end());
      return cmdEvaluate(paths, evalData, evalOut, out);
    }
    if (plot->parsed()) {
      std::optional<fs::path> overlay;
      if (!plotSweep.empty()) overlay = plotSweep;
      return cmdPlot(plotIn, plotOut, overlay, out);
    }
  } catch (const MissingPrerequisite& e) {
    err << "error: " << e.what() << "\n";
    return kMissingPrerequisite;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kBadInput;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const SynthesisFailure& e) {
    err << "synthesis failure at bin " << e.bin() << ": " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kBadInput;
}

}  // namespace specreg::cli
