#pragma once

// CSV output: header row, LF endings, 12 significant digits, '#' comment lines.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace magkerr {

[[nodiscard]] inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

[[nodiscard]] inline std::string format_number(std::optional<double> v) { return v ? format_number(*v) : std::string(); }

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    Table& row(std::vector<std::string> cells) {
        rows_.push_back(std::move(cells));
        return *this;
    }
    Table& comment(const std::string& text) {
        comments_.push_back(text);
        return *this;
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    void write(std::ostream& os) const {
        line(os, header_);
        for (const auto& r : rows_) line(os, r);
        for (const auto& c : comments_) os << "# " << c << '\n';
    }

private:
    static void line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> comments_;
};

}  // namespace magkerr
