#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gwi/model.hpp"

namespace gwi::report {

// Floats print with 17 significant digits so a written value parses back to
// the identical double. All formatting is locale-independent.
std::string fmt(double v);
std::string fmt(std::uint64_t v);
std::string fmt(std::int64_t v);

// Ordered key-value preamble embedded in every report. Order is insertion
// order and is part of the byte-reproducibility contract.
class Meta {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value);
    void set(const std::string& key, bool value);

    const std::vector<std::pair<std::string, std::string>>& items() const {
        return items_;
    }

    // Standard preamble: suite tag, claim tag, model parameters
    // (alpha, beta, gamma, sigma, rho, radius, family descriptions).
    static Meta standard(const GwiModel& model, const std::string& suite,
                         const std::string& claim);

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

// Rectangular cell table. Cells are preformatted strings so CSV and JSON
// emit byte-identical numerics.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
};

// CSV layout: '#'-prefixed "key = value" preamble lines, one mandatory header
// row, then data rows. Comma separators, '.' decimal point, LF endings.
void write_csv(const std::filesystem::path& path, const Meta& meta, const Table& table);

// Same content as a single JSON object: {"meta": {...}, "columns": [...],
// "rows": [[...]]}. Cells stay strings to keep the two formats bit-for-bit
// consistent with each other.
void write_json(const std::filesystem::path& path, const Meta& meta, const Table& table);

// Timestamps are banned from data files (reports must byte-reproduce), so the
// wall-clock of the run lands in "<data file>.meta.json" instead.
void write_sidecar(const std::filesystem::path& data_path);

} // namespace gwi::report
