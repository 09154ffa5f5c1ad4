// SPDX-License-Identifier: Apache-2.0
//
// raychan - deterministic image-method channel simulator and MIMO analysis toolkit
// Copyright (C) 2026 the raychan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace raychan::csv {

/// Deterministic float formatting; infinities serialize as text sentinels.
inline std::string fmt(double v, int digits = 12)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

inline std::string fmt_exact(double v) { return fmt(v, 17); }

inline double parse(const std::string &s)
{
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    return std::stod(s);
}

class Writer {
  public:
    explicit Writer(const std::string &path) : out_(path, std::ios::binary)
    {
        if (!out_)
            throw std::runtime_error("cannot open '" + path + "' for writing");
    }

    void comment(const std::string &text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string> &cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string &name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return static_cast<int>(i);
        throw std::invalid_argument("csv column '" + name + "' not found");
    }
};

/// Reads one of our own CSV files: '#' comment lines skipped, first
/// remaining line is the header.
inline Table read(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    Table t;
    std::string line;
    auto split = [](const std::string &s) {
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(s);
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        return cells;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

} // namespace raychan::csv
