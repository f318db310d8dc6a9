// SPDX-License-Identifier: MIT
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "wnkpz/error.hpp"
#include "wnkpz/grid.hpp"

namespace wnkpz {

/// 12 significant digits, '.' separator, independent of the global locale.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    if (r.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, r.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    template <class... Cols>
    void header(const Cols&... cols) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cols, first = false), ...);
        os_ << '\n';
    }

    template <class... Vals>
    void row(const Vals&... vals) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(vals), first = false), ...);
        os_ << '\n';
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(const char* s) { return s; }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v) {
        return std::to_string(v);
    }
    std::ostream& os_;
};

/// "t,x,value" with one row per node. Row 0 is labelled with t0 when given.
inline void write_field_csv(std::ostream& os, const Field& f, double t0 = -1.0) {
    CsvWriter w(os);
    w.header("t", "x", "value");
    for (std::size_t k = 0; k < f.rows(); ++k) {
        const double t = (k == 0 && t0 >= 0.0) ? t0 : f.tgrid().t(k);
        for (std::size_t i = 0; i < f.sgrid().size(); ++i) w.row(t, f.sgrid().x(i), f(k, i));
    }
}

inline nlohmann::json field_descriptor(const Field& f) {
    return {{"half_width", f.sgrid().half_width()},
            {"n_points", f.sgrid().size()},
            {"t_start", f.tgrid().t_start()},
            {"t_end", f.tgrid().t_end()},
            {"n_steps", f.tgrid().n_steps()}};
}

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace wnkpz
