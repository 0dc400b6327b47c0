#include "sources_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nep/cli.hpp"
#include "nep/numeric.hpp"

namespace nep::cli {

namespace {

double parse_number(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": cannot parse '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(std::string(what) + ": trailing characters in '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t\r");
        const auto e = item.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    for (const auto& part : split(s, ',')) v.push_back(parse_number(part, what));
    if (v.empty()) throw ConfigError(std::string(what) + ": empty list");
    return v;
}

// Rows renormalized to unit mass after a loose 1e-9 check.
std::vector<double> normalized(std::vector<double> v, const char* what) {
    CompensatedSum s;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + ": entries must be >= 0");
        s.add(x);
    }
    if (std::fabs(s.value() - 1.0) > 1e-9) {
        throw ConfigError(std::string(what) + ": probabilities must sum to 1");
    }
    for (double& x : v) x /= s.value();
    return v;
}

} // namespace

std::vector<double> parse_grid(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(parse_number(parts[0], what));
        } else if (parts.size() == 3) {
            const double a = parse_number(parts[0], what);
            const double step = parse_number(parts[1], what);
            const double b = parse_number(parts[2], what);
            if (!(step > 0.0) || b < a) throw ConfigError(std::string(what) + ": range needs start <= stop and step > 0");
            const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
            for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
        } else {
            throw ConfigError(std::string(what) + ": expected a value or start:step:stop");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": grid is empty");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] < out[i - 1]) throw ConfigError(std::string(what) + ": grid must be sorted");
    }
    return out;
}

std::vector<std::int64_t> parse_int_grid(const std::string& text, const char* what) {
    std::vector<std::int64_t> out;
    for (double v : parse_grid(text, what)) {
        if (v < 1.0 || v != std::floor(v)) throw ConfigError(std::string(what) + ": values must be positive integers");
        out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        rows.push_back(parse_list(line, path.c_str()));
        if (rows.back().size() != rows.front().size()) throw ConfigError(path + ": ragged matrix");
    }
    if (rows.empty()) throw ConfigError(path + ": no rows");
    return rows;
}

Source build_source(const SourceFlags& f) {
    const int given = !f.pmf.empty() + !f.joint.empty() + f.bsc.has_value() + f.bigc.has_value() + !f.type.empty();
    if (given != 1) {
        throw ConfigError("exactly one source is required: --pmf, --joint, --bsc, --bigc or --type with --channel");
    }
    if (f.quantity != "conditional" && f.quantity != "mi") {
        throw ConfigError("--quantity must be conditional or mi");
    }
    const bool mi = f.quantity == "mi";

    if (!f.pmf.empty()) {
        DiscreteDistribution p(normalized(parse_list(f.pmf, "--pmf"), "--pmf"));
        return {"pmf", CompositeSpectrum(entropy_spectrum(p)), true, p};
    }
    if (!f.joint.empty()) {
        const auto rows = read_matrix_csv(f.joint);
        std::vector<double> flat;
        for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
        JointDistribution j(rows.size(), rows.front().size(), normalized(flat, f.joint.c_str()));
        return {"joint", CompositeSpectrum(mi ? mi_spectrum(j) : conditional_spectrum(j)), true, std::nullopt};
    }
    if (f.bsc) {
        if (!(*f.bsc > 0.0 && *f.bsc < 1.0)) throw ConfigError("--bsc crossover must lie in (0, 1)");
        const auto j = bsc_joint(*f.bsc);
        return {"bsc", CompositeSpectrum(mi ? mi_spectrum(j) : conditional_spectrum(j)), true, std::nullopt};
    }
    if (f.bigc) {
        if (!(*f.bigc > 0.0)) throw ConfigError("--bigc sigma must be positive");
        if (f.nodes < 16) throw ConfigError("--nodes must be >= 16");
        auto s = mi ? bigc_mi_spectrum(*f.bigc, f.nodes) : bigc_spectrum(*f.bigc, f.nodes);
        return {"bigc", CompositeSpectrum(std::move(s)), false, std::nullopt};
    }
    if (f.channel.empty()) throw ConfigError("--type needs --channel");
    DiscreteDistribution t(normalized(parse_list(f.type, "--type"), "--type"));
    FiniteChannel ch;
    for (auto& r : read_matrix_csv(f.channel)) ch.rows.push_back(normalized(r, f.channel.c_str()));
    return {"divergence", divergence_composite(t, ch), true, std::nullopt};
}

} // namespace nep::cli
