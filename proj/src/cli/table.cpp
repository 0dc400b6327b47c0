#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "nep/cli.hpp"

namespace nep::cli {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double convert(double v, int power, bool bits) {
    if (!bits || power == 0) return v;
    return v / std::pow(std::log(2.0), power);
}

} // namespace

std::string render(const Table& t, Format f, bool bits) {
    if (f == Format::csv) {
        std::string out;
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            if (i) out += ',';
            out += t.columns[i].name;
        }
        out += '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                const auto& c = row[i];
                if (const auto* d = std::get_if<double>(&c)) {
                    out += format_double(convert(*d, t.columns[i].nat_power, bits));
                } else if (const auto* k = std::get_if<std::int64_t>(&c)) {
                    out += std::to_string(*k);
                } else if (const auto* s = std::get_if<std::string>(&c)) {
                    out += *s;
                }
            }
            out += '\n';
        }
        return out;
    }

    nlohmann::ordered_json doc;
    doc["command"] = t.command;
    doc["units"] = bits ? "bits" : "nats";
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& name = t.columns[i].name;
            const auto& c = row[i];
            if (const auto* d = std::get_if<double>(&c)) {
                const double v = convert(*d, t.columns[i].nat_power, bits);
                if (std::isfinite(v)) obj[name] = v; else obj[name] = format_double(v);
            } else if (const auto* k = std::get_if<std::int64_t>(&c)) {
                obj[name] = *k;
            } else if (const auto* s = std::get_if<std::string>(&c)) {
                obj[name] = *s;
            } else {
                obj[name] = nullptr;
            }
        }
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    const std::filesystem::path target(path);
    auto tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp.string());
        f << text;
        if (!f.flush()) throw ConfigError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot move output into place: " + ec.message());
    }
}

} // namespace nep::cli
