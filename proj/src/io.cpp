#include "specreg/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace specreg::io {

using nlohmann::json;
namespace fs = std::filesystem;

std::string formatDouble(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parseDouble(const std::string& text) {
  auto first = text.data();
  auto last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first == last) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) throw IoError("not a number: '" + text + "'");
  return value;
}

std::string readText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

template <typename T>
T requireField(const json& obj, const char* name) {
  if (!obj.contains(name)) throw InvalidArgument(std::string("scene field '") + name + "' is missing");
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("scene field '") + name + "' has the wrong type");
  }
}

json sceneJson(const SceneSpec& spec) {
  json modes = json::array();
  for (const auto& bin : spec.modes) {
    json list = json::array();
    for (const auto& mode : bin) list.push_back({{"center", mode.center}, {"width", mode.width}, {"power", mode.power}});
    modes.push_back(std::move(list));
  }
  json j;
  j["M"] = spec.M;
  j["N"] = spec.N;
  j["Q"] = spec.Q;
  j["modes"] = std::move(modes);
  j["noiseFloor"] = spec.noiseFloor;
  j["seed"] = spec.seed;
  return j;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

fs::path withSuffix(const fs::path& header, const std::string& suffix) {
  auto p = header;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

SceneSpec sceneFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("scene spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("scene spec must be a JSON object");
  SceneSpec spec;
  const auto M = requireField<long long>(j, "M");
  const auto N = requireField<long long>(j, "N");
  const auto Q = requireField<long long>(j, "Q");
  if (M < 1) throw InvalidArgument("scene field 'M' must be >= 1");
  if (N < 2) throw InvalidArgument("scene field 'N' must be >= 2");
  if (Q < 2) throw InvalidArgument("scene field 'Q' must be >= 2");
  spec.M = static_cast<std::size_t>(M);
  spec.N = static_cast<std::size_t>(N);
  spec.Q = static_cast<std::size_t>(Q);
  spec.noiseFloor = requireField<double>(j, "noiseFloor");
  spec.seed = requireField<std::uint64_t>(j, "seed");
  const auto modes = requireField<json>(j, "modes");
  if (!modes.is_array()) throw InvalidArgument("scene field 'modes' must be an array");
  for (const auto& bin : modes) {
    if (!bin.is_array()) throw InvalidArgument("scene field 'modes' must hold one array per bin");
    std::vector<SpectralMode> list;
    for (const auto& mode : bin) {
      if (!mode.is_object()) throw InvalidArgument("scene field 'modes' entries must be objects");
      list.push_back({requireField<double>(mode, "center"), requireField<double>(mode, "width"),
                      requireField<double>(mode, "power")});
    }
    spec.modes.push_back(std::move(list));
  }
  spec.validate();
  return spec;
}

std::string sceneToJson(const SceneSpec& spec) { return sceneJson(spec).dump(1) + "\n"; }

std::string sceneHash(const SceneSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(sceneJson(spec).dump())));
  return buf;
}

std::string sheetToCsv(const RMatrix& values) {
  std::string out;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out += ',';
      out += formatDouble(values(i, j));
    }
    out += '\n';
  }
  return out;
}

RMatrix sheetFromCsv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : splitCsvLine(line)) row.push_back(parseDouble(cell));
    if (!rows.empty() && row.size() != rows.front().size()) throw IoError("ragged spectrum sheet CSV");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty spectrum sheet CSV");
  RMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

void writeSheet(const fs::path& path, const SpectrumSheet& sheet) { writeText(path, sheetToCsv(sheet.values)); }

SpectrumSheet readSheet(const fs::path& path) {
  SpectrumSheet sheet;
  sheet.values = sheetFromCsv(readText(path));
  if (!sheet.values.allFinite() || (sheet.values.array() < 0.0).any()) {
    throw IoError("spectrum sheet '" + path.string() + "' holds negative or non-finite values");
  }
  sheet.poleFlags.assign(static_cast<std::size_t>(sheet.values.rows()), false);
  return sheet;
}

fs::path samplesPath(const fs::path& header) { return withSuffix(header, ".samples.csv"); }
fs::path truthPath(const fs::path& header) { return withSuffix(header, ".truth.csv"); }

void writeDataset(const fs::path& header, const RangeBinDataset& data) {
  json j;
  j["format"] = "specreg-dataset";
  j["version"] = 1;
  j["M"] = data.M();
  j["N"] = data.N();
  j["seed"] = data.seed;
  j["specHash"] = data.specHash;
  j["samples"] = samplesPath(header).filename().string();
  j["truth"] = data.truth() ? json(truthPath(header).filename().string()) : json(nullptr);

  std::string body = "m,t,re,im\n";
  for (std::size_t m = 0; m < data.M(); ++m) {
    const auto& bin = data.bin(m);
    for (Eigen::Index t = 0; t < bin.size(); ++t) {
      body += std::to_string(m) + ',' + std::to_string(t) + ',' + formatDouble(bin[t].real()) + ',' +
              formatDouble(bin[t].imag()) + '\n';
    }
  }
  writeText(header, j.dump(1) + "\n");
  writeText(samplesPath(header), body);
  if (data.truth()) writeSheet(truthPath(header), *data.truth());
}

RangeBinDataset readDataset(const fs::path& header) {
  json j;
  try {
    j = json::parse(readText(header));
  } catch (const json::parse_error& e) {
    throw IoError("dataset header '" + header.string() + "' is not valid JSON: " + e.what());
  }
  std::size_t M = 0;
  std::size_t N = 0;
  try {
    M = j.at("M").get<std::size_t>();
    N = j.at("N").get<std::size_t>();
  } catch (const json::exception&) {
    throw IoError("dataset header needs integer fields 'M' and 'N'");
  }
  const auto dir = header.parent_path();
  const auto samplesName = j.value("samples", samplesPath(header).filename().string());

  std::vector<CVector> bins(M, CVector::Zero(static_cast<Eigen::Index>(N)));
  std::vector<std::vector<bool>> seen(M, std::vector<bool>(N, false));
  std::istringstream ss(readText(dir / samplesName));
  std::string line;
  std::getline(ss, line);  // column header
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = splitCsvLine(line);
    if (cells.size() != 4) throw IoError("sample row must have 4 cells: '" + line + "'");
    const auto m = static_cast<long long>(parseDouble(cells[0]));
    const auto t = static_cast<long long>(parseDouble(cells[1]));
    if (m < 0 || t < 0 || static_cast<std::size_t>(m) >= M || static_cast<std::size_t>(t) >= N) {
      throw IoError("sample index out of range: '" + line + "'");
    }
    bins[static_cast<std::size_t>(m)][t] = Complex{parseDouble(cells[2]), parseDouble(cells[3])};
    seen[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)] = true;
  }
  for (const auto& row : seen) {
    for (bool s : row) {
      if (!s) throw IoError("dataset samples are incomplete");
    }
  }

  RangeBinDataset data(std::move(bins));
  data.seed = j.value("seed", std::uint64_t{0});
  data.specHash = j.value("specHash", std::string{});
  if (j.contains("truth") && j.at("truth").is_string()) {
    auto truth = readSheet(dir / j.at("truth").get<std::string>());
    if (truth.bins() != M) throw IoError("truth sheet bin count does not match dataset");
    data.setTruth(std::move(truth));
  }
  return data;
}

}  // namespace specreg::io
