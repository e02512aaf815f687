#pragma once

// CSV output with round-trip doubles ("%.16e", 17 significant digits).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include "rburgers/errors.hpp"

namespace rburgers {

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& p, std::initializer_list<const char*> header) : path_(p) {
        out_.open(p, std::ios::binary | std::ios::trunc);
        if (!out_) throw ConfigError("cannot write '" + p.string() + "'");
        bool first = true;
        for (const char* h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& operator<<(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.16e", v);
        return cell(buf);
    }
    CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
    void end_row() {
        out_ << '\n';
        fresh_ = true;
    }
    void close() {
        out_.close();
        if (!out_) throw ConfigError("failed writing '" + path_.string() + "'");
    }

private:
    CsvWriter& cell(const std::string& s) {
        if (!fresh_) out_ << ',';
        out_ << s;
        fresh_ = false;
        return *this;
    }

    std::filesystem::path path_;
    std::ofstream out_;
    bool fresh_ = true;
};

} // namespace rburgers
