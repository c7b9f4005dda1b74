#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chaosmm::cli {

/// 17 significant digits via std::to_chars; no locale involvement.
std::string format_number(double value);

/// Buffered CSV with LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<std::string_view> header);

    CsvWriter& cell(double value);
    CsvWriter& cell(std::size_t value);
    CsvWriter& cell(std::string_view text);
    void end_row();

    [[nodiscard]] const std::string& str() const noexcept { return buffer_; }
    void save(const std::filesystem::path& path) const;

private:
    void separator();

    std::string buffer_;
    bool row_open_ = false;
};

struct ScatterPoint {
    double x;
    double y;
};

/// Minimal 1000x1000 scatter plot: one r=1 filled circle per point, axes
/// labelled with the data ranges.
std::string render_scatter_svg(std::span<const ScatterPoint> points, std::string_view title, std::string_view x_label,
                               std::string_view y_label);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace chaosmm::cli
