#pragma once

#include "specreg/scene.hpp"
#include "specreg/types.hpp"

#include <filesystem>
#include <string>

namespace specreg::io {

/// Unreadable, unwritable or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that parses back to the same double.
std::string formatDouble(double value);
double parseDouble(const std::string& text);

std::string readText(const std::filesystem::path& path);
void writeText(const std::filesystem::path& path, const std::string& text);

// Scene spec: JSON object {M, N, Q, modes: [[{center, width, power}, ...], ...], noiseFloor, seed}.
SceneSpec sceneFromJson(const std::string& text);
std::string sceneToJson(const SceneSpec& spec);
/// FNV-1a of the canonical scene JSON, as 16 hex digits.
std::string sceneHash(const SceneSpec& spec);

// Spectrum sheet: M lines of Q comma-separated values. Empty cells read back as NaN.
std::string sheetToCsv(const RMatrix& values);
RMatrix sheetFromCsv(const std::string& text);
void writeSheet(const std::filesystem::path& path, const SpectrumSheet& sheet);
SpectrumSheet readSheet(const std::filesystem::path& path);

/// Sibling paths of a dataset header `stem.json`: `stem.samples.csv`, `stem.truth.csv`.
std::filesystem::path samplesPath(const std::filesystem::path& header);
std::filesystem::path truthPath(const std::filesystem::path& header);

/// Writes the JSON header, the "m,t,re,im" sample CSV and, if present, the truth sheet CSV.
void writeDataset(const std::filesystem::path& header, const RangeBinDataset& data);
RangeBinDataset readDataset(const std::filesystem::path& header);

}  // namespace specreg::io
