// Copyright 2026 The roughflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Minimal CSV writer with a fixed header and locale-independent,
// round-trippable number formatting.

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "roughflow/errors.hpp"

namespace roughflow {

/// Shortest representation that reads back to the same double; nan and inf
/// are spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericalError("number formatting failed", v);
  return std::string(buf, end);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header) : path_(path), columns_(header.size()) {
    out_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
    if (!out_) throw InvalidArgument("cannot open '" + path + "' for writing");
    write_cells(header);
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& operator<<(double v) { return add(format_number(v)); }
    Row& operator<<(int v) { return add(std::to_string(v)); }
    Row& operator<<(long v) { return add(std::to_string(v)); }
    Row& operator<<(std::size_t v) { return add(std::to_string(v)); }
    Row& operator<<(bool v) { return add(v ? "true" : "false"); }
    Row& operator<<(const std::string& v) { return add(v); }
    Row& operator<<(const char* v) { return add(v); }
    ~Row() noexcept(false) {
      if (cells_.size() != w_.columns_) throw InvalidArgument("CSV row width does not match the header of " + w_.path_);
      w_.write_cells(cells_);
    }

   private:
    Row& add(std::string s) {
      cells_.push_back(std::move(s));
      return *this;
    }
    CsvWriter& w_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }
  const std::string& path() const { return path_; }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(cells[i]);
    }
    out_ << '\n';
    out_.flush();
  }

  std::string path_;
  std::size_t columns_;
  std::ofstream out_;
};

}  // namespace roughflow
