#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdsliced/classifier.hpp"
#include "spdsliced/measure.hpp"
#include "spdsliced/sliced.hpp"

namespace spdsliced {

using Json = nlohmann::ordered_json;

std::string_view library_version();

inline constexpr double kFileSymmetryTolerance = 1e-8;

/// In-memory form of a dataset file: SPD matrices with optional labels.
struct SpdDataset {
    EmpiricalSpdMeasure measure;
    std::optional<std::vector<int>> labels;

    LabeledSpdDataset labeled() const;
};

/// Parses and validates {format_version, dim, count, labels?, matrices}.
/// Malformed documents throw InvalidData; non-SPD matrices NotPositiveDefinite.
SpdDataset parse_spd_dataset(const Json &doc);
SpdDataset read_spd_dataset(const std::filesystem::path &path);

Json spd_dataset_json(const EmpiricalSpdMeasure &measure, const std::optional<std::vector<int>> &labels);
void write_spd_dataset(const std::filesystem::path &path, const EmpiricalSpdMeasure &measure,
                       const std::optional<std::vector<int>> &labels = std::nullopt);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);
std::string read_file(const std::filesystem::path &path);

/// Machine-readable experiment output. Rows are flat objects of scalars.
struct ExperimentReport {
    std::string experiment;
    Json config = Json::object();
    std::vector<Json> rows;
    Json timing = Json::object();

    Json to_json() const;
    /// Long-format CSV: one line per row, columns are the union of row keys in
    /// first-seen order. Numbers are printed exactly as in the JSON form.
    std::string to_csv() const;
};

Json rng_json(const RngState &rng);
Json discrepancy_row(const DiscrepancyReport &report);

}  // namespace spdsliced
