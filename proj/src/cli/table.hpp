#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace nep::cli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Column {
    std::string name;
    int nat_power = 0; // quantity scales as nats^power; --bits divides by ln(2)^power
};

struct Table {
    std::string command;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class Format { csv, json };

std::string render(const Table& t, Format f, bool bits);

/// Writes to stdout when `path` is empty, otherwise atomically via a temporary sibling file.
void emit(const std::string& text, const std::string& path);

} // namespace nep::cli
