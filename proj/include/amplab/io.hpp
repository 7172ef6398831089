#pragma once

#include <string>
#include <vector>

namespace amplab {

// RFC-4180-style CSV with LF line endings; numbers are written with
// shortest round-trip formatting so reruns are byte-identical.
class CsvWriter {
  public:
    explicit CsvWriter(std::string path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& fields);

    static std::string num(double v);
    static std::string num(long v);

  private:
    struct Impl;
    Impl* impl_;
};

// Minimal SVG polyline plot, one series per call, fixed 640x400 canvas.
struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    std::string label;
};

void write_svg_lineplot(const std::string& path, const std::string& title,
                        const std::vector<SvgSeries>& series, bool log_x = false,
                        bool log_y = false);

}  // namespace amplab
