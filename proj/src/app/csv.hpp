// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
//! \file csv.hpp
//! CSV dialect: comma separator, '.' decimal point, 17 significant digits,
//! empty field for absent values, LF line endings, mandatory header.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cfgdist::app
{
//! Shortest-roundtrip-safe rendering with 17 significant digits.
std::string format_real(double v);

class CsvTable
{
  public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& add(double v);
    CsvTable& add(std::optional<double> v);
    CsvTable& add(long long v);
    CsvTable& add(std::string_view s);
    //! Ends the current row; throws if its width differs from the header.
    void end_row();

    std::vector<std::string> const& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    void write(std::ostream& os) const;
    std::string str() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> current_;
};
}  // namespace cfgdist::app
