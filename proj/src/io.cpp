#include "spdsliced/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "spdsliced/parallel.hpp"

#ifndef SPDSLICED_VERSION
#define SPDSLICED_VERSION "0.0.0"
#endif

namespace spdsliced {

std::string_view library_version() { return SPDSLICED_VERSION; }

LabeledSpdDataset SpdDataset::labeled() const {
    if (!labels) throw Error(ErrorCode::MissingLabels, "dataset has no labels");
    return LabeledSpdDataset(measure, *labels);
}

namespace {

[[noreturn]] void invalid(const std::string &msg) { throw Error(ErrorCode::InvalidData, msg); }

Index read_count(const Json &doc, const char *key) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) invalid(std::string("missing integer field '") + key + "'");
    const auto v = doc[key].get<long long>();
    if (v < 1) invalid(std::string("field '") + key + "' must be positive");
    return static_cast<Index>(v);
}

}  // namespace

SpdDataset parse_spd_dataset(const Json &doc) {
    if (!doc.is_object()) invalid("dataset must be a JSON object");
    if (!doc.contains("format_version") || doc["format_version"] != "1") invalid("format_version must be \"1\"");
    const Index d = read_count(doc, "dim");
    const Index n = read_count(doc, "count");
    if (!doc.contains("matrices") || !doc["matrices"].is_array()) invalid("missing 'matrices' array");
    const auto &mats = doc["matrices"];
    if (static_cast<Index>(mats.size()) != n) invalid("'matrices' length differs from count");

    std::vector<Matrix> raw(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const auto &entry = mats[std::size_t(i)];
        if (!entry.is_array() || static_cast<Index>(entry.size()) != d * d) {
            invalid("matrix " + std::to_string(i) + " must have dim*dim entries");
        }
        Matrix m(d, d);
        for (Index r = 0; r < d; ++r)
            for (Index c = 0; c < d; ++c) {
                const auto &x = entry[std::size_t(r * d + c)];
                if (!x.is_number()) invalid("matrix " + std::to_string(i) + " has a non-numeric entry");
                m(r, c) = x.get<double>();
                if (!std::isfinite(m(r, c))) invalid("matrix " + std::to_string(i) + " has a non-finite entry");
            }
        const double tol = kFileSymmetryTolerance * std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) invalid("matrix " + std::to_string(i) + " is not symmetric");
        raw[std::size_t(i)] = std::move(m);
    }

    std::vector<SpdMatrixd> points(raw.size(), SpdMatrixd::identity(d));
    std::vector<std::string> failures(raw.size());
    parallel_for(raw.size(), [&](std::size_t i) {
        try {
            points[i] = SpdMatrixd(raw[i]);
        } catch (const Error &e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (!failures[i].empty()) {
            throw Error(ErrorCode::NotPositiveDefinite, "matrix " + std::to_string(i) + ": " + failures[i]);
        }
    }

    std::optional<std::vector<int>> labels;
    if (doc.contains("labels") && !doc["labels"].is_null()) {
        const auto &l = doc["labels"];
        if (!l.is_array() || static_cast<Index>(l.size()) != n) invalid("'labels' must be an array of length count");
        std::vector<int> out;
        out.reserve(l.size());
        for (const auto &y : l) {
            if (!y.is_number_integer() || y.get<long long>() < 0) invalid("labels must be nonnegative integers");
            out.push_back(y.get<int>());
        }
        labels = std::move(out);
    }
    return {EmpiricalSpdMeasure(std::move(points)), std::move(labels)};
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SpdDataset read_spd_dataset(const std::filesystem::path &path) {
    const std::string text = read_file(path);
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        invalid("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_spd_dataset(doc);
}

Json spd_dataset_json(const EmpiricalSpdMeasure &measure, const std::optional<std::vector<int>> &labels) {
    const Index d = measure.dim();
    Json doc;
    doc["format_version"] = "1";
    doc["dim"] = d;
    doc["count"] = measure.size();
    if (labels) {
        require(static_cast<Index>(labels->size()) == measure.size(), ErrorCode::SizeMismatch,
                "labels must match the number of points");
        doc["labels"] = *labels;
    }
    Json mats = Json::array();
    for (const auto &p : measure.points()) {
        Json row = Json::array();
        for (Index r = 0; r < d; ++r)
            for (Index c = 0; c < d; ++c) row.push_back(p.matrix()(r, c));
        mats.push_back(std::move(row));
    }
    doc["matrices"] = std::move(mats);
    return doc;
}

void write_spd_dataset(const std::filesystem::path &path, const EmpiricalSpdMeasure &measure,
                       const std::optional<std::vector<int>> &labels) {
    write_file_atomic(path, spd_dataset_json(measure, labels).dump() + "\n");
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot move output into '" + path.string() + "'");
    }
}

Json ExperimentReport::to_json() const {
    Json doc;
    doc["experiment"] = experiment;
    doc["config"] = config;
    doc["rows"] = Json(rows);
    doc["timing"] = timing;
    doc["version"] = std::string(library_version());
    return doc;
}

namespace {

std::string csv_cell(const Json &v) {
    if (v.is_null()) return "";
    if (!v.is_string()) return v.dump();
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string ExperimentReport::to_csv() const {
    std::vector<std::string> columns;
    for (const auto &row : rows)
        for (const auto &[key, value] : row.items())
            if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
    std::string out = "experiment";
    for (const auto &c : columns) out += "," + c;
    out += "\n";
    for (const auto &row : rows) {
        out += csv_cell(Json(experiment));
        for (const auto &c : columns) out += "," + (row.contains(c) ? csv_cell(row[c]) : std::string());
        out += "\n";
    }
    return out;
}

Json rng_json(const RngState &rng) { return Json{{"seed", rng.seed}, {"stream", rng.stream_id}}; }

Json discrepancy_row(const DiscrepancyReport &report) {
    Json row;
    row["estimator"] = std::string(to_string(report.estimator));
    row["value"] = report.value;
    row["root"] = report.root();
    row["order_p"] = report.order_p;
    if (report.num_projections) row["num_projections"] = *report.num_projections;
    if (report.seed) row["seed"] = report.seed->seed;
    if (report.sampler) row["sampler"] = std::string(to_string(*report.sampler));
    row["resampled_directions"] = report.resampled_directions;
    return row;
}

}  // namespace spdsliced
