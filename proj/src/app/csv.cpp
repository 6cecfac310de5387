// Copyright cfgdist contributors
// SPDX-License-Identifier: Apache-2.0
#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cfgdist/error.hpp"

namespace cfgdist::app
{
std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header))
{
    detail::require(!header_.empty(), "CSV header must not be empty");
}

CsvTable& CsvTable::add(double v)
{
    current_.push_back(format_real(v));
    return *this;
}

CsvTable& CsvTable::add(std::optional<double> v)
{
    current_.push_back(v ? format_real(*v) : std::string{});
    return *this;
}

CsvTable& CsvTable::add(long long v)
{
    current_.push_back(std::to_string(v));
    return *this;
}

CsvTable& CsvTable::add(std::string_view s)
{
    std::string field(s);
    if (field.find_first_of(",\"\n") != std::string::npos)
    {
        std::string quoted = "\"";
        for (char c : field)
        {
            if (c == '"')
                quoted += '"';
            quoted += c == '\n' ? ' ' : c;
        }
        field = quoted + "\"";
    }
    current_.push_back(std::move(field));
    return *this;
}

void CsvTable::end_row()
{
    detail::require(current_.size() == header_.size(), "CSV row width differs from header");
    rows_.push_back(std::move(current_));
    current_.clear();
}

void CsvTable::write(std::ostream& os) const
{
    auto line = [&os](std::vector<std::string> const& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (i)
                os << ',';
            os << fields[i];
        }
        os << '\n';
    };
    line(header_);
    for (auto const& r : rows_)
        line(r);
}

std::string CsvTable::str() const
{
    std::ostringstream os;
    write(os);
    return os.str();
}
}  // namespace cfgdist::app
