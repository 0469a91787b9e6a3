#include "gwi/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gwi/errors.hpp"

namespace gwi::report {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(std::int64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
}

void Meta::set(const std::string& key, const std::string& value) {
    for (auto& kv : items_) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    items_.emplace_back(key, value);
}

void Meta::set(const std::string& key, double value) { set(key, fmt(value)); }
void Meta::set(const std::string& key, std::uint64_t value) { set(key, fmt(value)); }
void Meta::set(const std::string& key, bool value) {
    set(key, std::string(value ? "true" : "false"));
}

Meta Meta::standard(const GwiModel& model, const std::string& suite,
                    const std::string& claim) {
    Meta m;
    m.set("suite", suite);
    m.set("claim", claim);
    m.set("offspring", model.offspring.describe());
    m.set("immigration", model.immigration.describe());
    m.set("alpha", model.alpha);
    m.set("beta", model.beta);
    m.set("gamma", model.gamma);
    m.set("sigma", model.sigma);
    m.set("rho", model.rho);
    m.set("radius", model.radius);
    m.set("conjugate", model.conjugate);
    return m;
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
        throw DomainError("report row width does not match the header");
    rows.push_back(std::move(cells));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw NumericalError("cannot open report file: " + path.string());
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const Meta& meta, const Table& table) {
    std::ofstream out = open_out(path);
    for (const auto& [k, v] : meta.items()) out << "# " << k << " = " << v << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << row[c];
        }
        out << '\n';
    }
    if (!out) throw NumericalError("short write on report file: " + path.string());
}

void write_json(const std::filesystem::path& path, const Meta& meta, const Table& table) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json jm = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.items()) jm[k] = v;
    j["meta"] = std::move(jm);
    j["columns"] = table.columns;
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) jr.push_back(row);
    j["rows"] = std::move(jr);
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
    if (!out) throw NumericalError("short write on report file: " + path.string());
}

void write_sidecar(const std::filesystem::path& data_path) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    nlohmann::ordered_json j;
    j["data_file"] = data_path.filename().string();
    j["written_at"] = stamp;
    std::filesystem::path side = data_path;
    side += ".meta.json";
    std::ofstream out = open_out(side);
    out << j.dump(2) << "\n";
}

} // namespace gwi::report
