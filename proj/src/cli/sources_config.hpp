#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nep/sources.hpp"
#include "nep/spectrum.hpp"

namespace nep::cli {

/// Raw source flags as given on the command line.
struct SourceFlags {
    std::string pmf;
    std::string joint;
    std::string quantity = "conditional";
    std::optional<double> bsc;
    std::optional<double> bigc;
    int nodes = 128;
    std::string type;
    std::string channel;
};

struct Source {
    std::string label;
    CompositeSpectrum spectrum;
    bool exact_available = true; ///< false for quadrature-discretized laws
    std::optional<DiscreteDistribution> pmf;
};

Source build_source(const SourceFlags& f);

std::vector<double> parse_grid(const std::string& text, const char* what);
std::vector<std::int64_t> parse_int_grid(const std::string& text, const char* what);
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);

} // namespace nep::cli
