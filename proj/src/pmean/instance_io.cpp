#include "pmean/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pmean/error.hpp"

namespace pmean {

namespace {

double checked_entry(double v, const char* where) {
    if (std::isnan(v)) fail(Errc::parse, std::string(where) + ": NaN entries are rejected");
    if (!std::isfinite(v)) fail(Errc::parse, std::string(where) + ": non-finite entry");
    if (v < 0.0) fail(Errc::parse, std::string(where) + ": negative entries are rejected");
    return v;
}

} // namespace

Instance parse_instance_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse, std::string("instance JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("goods"))
        fail(Errc::parse, "instance JSON must be an object with 'n' and 'goods'");
    if (!doc["n"].is_number_integer() || doc["n"].get<long>() < 1)
        fail(Errc::parse, "instance JSON: 'n' must be a positive integer");
    const int n = doc["n"].get<int>();
    if (!doc["goods"].is_array()) fail(Errc::parse, "instance JSON: 'goods' must be an array");
    std::vector<double> flat;
    flat.reserve(doc["goods"].size() * static_cast<std::size_t>(n));
    for (const auto& row : doc["goods"]) {
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            fail(Errc::parse, "instance JSON: each good needs exactly n values");
        for (const auto& cell : row) {
            if (!cell.is_number()) fail(Errc::parse, "instance JSON: values must be numbers");
            flat.push_back(checked_entry(cell.get<double>(), "instance JSON"));
        }
    }
    std::string meta;
    if (doc.contains("meta")) {
        if (!doc["meta"].is_string()) fail(Errc::parse, "instance JSON: 'meta' must be a string");
        meta = doc["meta"].get<std::string>();
    }
    return Instance(n, std::move(flat), std::move(meta));
}

std::string instance_to_json(const Instance& instance) {
    nlohmann::ordered_json doc;
    doc["n"] = instance.agents();
    auto goods = nlohmann::ordered_json::array();
    for (long t = 0; t < instance.goods(); ++t) {
        auto row = nlohmann::ordered_json::array();
        for (double v : instance.good(t)) row.push_back(v);
        goods.push_back(std::move(row));
    }
    doc["goods"] = std::move(goods);
    doc["meta"] = instance.meta();
    return doc.dump();
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        std::string_view cell =
            pos == std::string_view::npos ? line.substr(start) : line.substr(start, pos - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

} // namespace

Instance parse_instance_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = pos + 1;
    }
    if (lines.empty()) fail(Errc::parse, "instance CSV: empty input");

    const auto header = split_csv_line(lines[0]);
    const int n = static_cast<int>(header.size());
    for (int i = 0; i < n; ++i) {
        const std::string expected = "agent_" + std::to_string(i + 1);
        if (header[i] != expected)
            fail(Errc::parse, "instance CSV: header must be agent_1..agent_n (got '" + header[i] + "')");
    }

    std::vector<double> flat;
    flat.reserve((lines.size() - 1) * static_cast<std::size_t>(n));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv_line(lines[r]);
        if (static_cast<int>(cells.size()) != n)
            fail(Errc::parse, "instance CSV: row " + std::to_string(r) + " has wrong arity");
        for (const auto& cell : cells) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                fail(Errc::parse, "instance CSV: bad number '" + cell + "'");
            flat.push_back(checked_entry(v, "instance CSV"));
        }
    }
    return Instance(n, std::move(flat));
}

std::string instance_to_csv(const Instance& instance) {
    std::ostringstream out;
    for (int i = 0; i < instance.agents(); ++i) out << (i ? "," : "") << "agent_" << (i + 1);
    out << "\n";
    char buf[32];
    for (long t = 0; t < instance.goods(); ++t) {
        const auto good = instance.good(t);
        for (int i = 0; i < instance.agents(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", good[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    return out.str();
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (has_suffix(path, ".csv")) return parse_instance_csv(text);
    return parse_instance_json(text);
}

void save_instance(const Instance& instance, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io, "cannot write instance file: " + path);
    out << (has_suffix(path, ".csv") ? instance_to_csv(instance) : instance_to_json(instance));
    if (!out) fail(Errc::io, "write failed: " + path);
}

} // namespace pmean
