#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gtrace {

// Minimal CSV writer: one fixed header, stable column order, deterministic
// number formatting so identical runs produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os, std::vector<std::string> header)
        : os_(os), columns_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) os_ << ",";
            os_ << header[i];
        }
        os_ << "\n";
    }

    template <typename... Fields>
    void row(const Fields&... fields) {
        if (sizeof...(fields) != columns_)
            throw std::logic_error("CsvWriter: wrong field count");
        std::size_t i = 0;
        ((write_field(fields, i++)), ...);
        os_ << "\n";
    }

    static std::string format(double v) {
        std::ostringstream ss;
        ss << std::setprecision(12) << v;
        return ss.str();
    }

private:
    template <typename T>
    void write_field(const T& value, std::size_t index) {
        if (index) os_ << ",";
        if constexpr (std::is_floating_point_v<T>) {
            os_ << format(value);
        } else {
            os_ << value;
        }
    }

    std::ostream& os_;
    std::size_t columns_;
};

}  // namespace gtrace
