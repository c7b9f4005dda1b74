#include "output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace chaosmm::cli {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return {buf.data(), res.ptr};
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) {
    for (std::string_view h : header) cell(h);
    end_row();
}

void CsvWriter::separator() {
    if (row_open_) buffer_.push_back(',');
    row_open_ = true;
}

CsvWriter& CsvWriter::cell(double value) {
    separator();
    buffer_ += format_number(value);
    return *this;
}

CsvWriter& CsvWriter::cell(std::size_t value) {
    separator();
    buffer_ += std::to_string(value);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    buffer_ += text;
    return *this;
}

void CsvWriter::end_row() {
    buffer_.push_back('\n');
    row_open_ = false;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, buffer_); }

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

namespace {

std::string short_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
    return {buf.data(), res.ptr};
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            default:
                out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_scatter_svg(std::span<const ScatterPoint> points, std::string_view title, std::string_view x_label,
                               std::string_view y_label) {
    constexpr double lo = 60.0;
    constexpr double hi = 940.0;

    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    if (!points.empty()) {
        x_min = x_max = points.front().x;
        y_min = y_max = points.front().y;
        for (const auto& p : points) {
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            y_min = std::min(y_min, p.y);
            y_max = std::max(y_max, p.y);
        }
    }
    const double x_span = x_max > x_min ? x_max - x_min : 1.0;
    const double y_span = y_max > y_min ? y_max - y_min : 1.0;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" height=\"1000\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
    svg += "<text x=\"500\" y=\"30\" text-anchor=\"middle\" font-size=\"20\">" + escape(title) + "</text>\n";
    svg += "<line x1=\"60\" y1=\"940\" x2=\"940\" y2=\"940\" stroke=\"black\"/>\n";
    svg += "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"940\" stroke=\"black\"/>\n";
    svg += "<text x=\"60\" y=\"965\" font-size=\"14\">" + short_number(x_min) + "</text>\n";
    svg += "<text x=\"940\" y=\"965\" text-anchor=\"end\" font-size=\"14\">" + short_number(x_max) + "</text>\n";
    svg += "<text x=\"500\" y=\"985\" text-anchor=\"middle\" font-size=\"16\">" + escape(x_label) + "</text>\n";
    svg += "<text x=\"55\" y=\"940\" text-anchor=\"end\" font-size=\"14\">" + short_number(y_min) + "</text>\n";
    svg += "<text x=\"55\" y=\"70\" text-anchor=\"end\" font-size=\"14\">" + short_number(y_max) + "</text>\n";
    svg += "<text x=\"20\" y=\"500\" font-size=\"16\" transform=\"rotate(-90 20 500)\" text-anchor=\"middle\">" +
           escape(y_label) + "</text>\n";
    svg += "<g fill=\"black\">\n";
    for (const auto& p : points) {
        const double cx = lo + (p.x - x_min) / x_span * (hi - lo);
        const double cy = hi - (p.y - y_min) / y_span * (hi - lo);
        svg += "<circle cx=\"" + short_number(cx) + "\" cy=\"" + short_number(cy) + "\" r=\"1\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace chaosmm::cli
