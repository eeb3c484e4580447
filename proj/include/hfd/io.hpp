#pragma once

#include "hfd/diagnostics.hpp"
#include "hfd/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace hfd {

using json = nlohmann::json;

inline constexpr const char* schema_version = "1.0";

struct Dataset
{
  std::vector<std::string> feature_names;
  Matrix X;
  Vector y;
  std::filesystem::path source_path;
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

//! Column name, or index (negative counts from the end).
using ColumnRef = std::variant<std::string, int>;

//! Reads a headered, comma-separated file. `target` selects y; the other
//! columns become X in header order. Rows with missing or non-numeric cells
//! are dropped and counted. Without a target, all columns are features and
//! y is empty.
Dataset ingest_csv(const std::filesystem::path& path, const std::optional<ColumnRef>& target);

//! Writes header + rows with round-trip precision.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Matrix& columns);

//! Writes `content` to a sibling temporary file, then renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

json model_to_json(const DecompositionModel& model);
DecompositionModel model_from_json(const json& doc);

json metrics_to_json(const MetricsReport& report);
json attribution_to_json(const Attribution& a, std::size_t row);

//! Reorders the columns of `data` to the model's feature order; throws
//! SchemaError listing missing and unexpected features.
Matrix align_features(const DecompositionModel& model, const Dataset& data);

struct ExportOptions
{
  std::size_t grid_1d = 200;
  std::size_t grid_2d = 50;
  std::size_t max_rows = 20;
};

//! Plot-data bundle: model, metrics, component grids over the observed raw
//! ranges, and per-row attributions.
json export_bundle(const DecompositionModel& model,
                   const Dataset& data,
                   const ExportOptions& options = {});

//! Throws SchemaError when the document has no or an unsupported major
//! schema_version.
void check_schema_version(const json& doc);

//! Renders a cosine table as aligned text.
std::string format_cosine_table(const std::vector<CosineEntry>& table);

} // namespace hfd
