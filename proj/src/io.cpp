#include "amplab/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "amplab/errors.hpp"

namespace amplab {

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(std::string path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);  // binary: LF endings everywhere
    if (!impl_->out) throw parse_error("csv: cannot open " + path);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) impl_->out << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            impl_->out << '"';
            for (char c : f) {
                if (c == '"') impl_->out << '"';
                impl_->out << c;
            }
            impl_->out << '"';
        } else {
            impl_->out << f;
        }
    }
    impl_->out << '\n';
}

std::string CsvWriter::num(double v) {
    if (std::isnan(v)) return "";
    // Shortest round-trip representation, locale independent.
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string CsvWriter::num(long v) { return std::to_string(v); }

namespace {

double axis_map(double v, double lo, double hi, double out_lo, double out_hi) {
    if (hi == lo) return 0.5 * (out_lo + out_hi);
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
}

}  // namespace

void write_svg_lineplot(const std::string& path, const std::string& title,
                        const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
    const int W = 640, H = 400, ML = 60, MR = 20, MT = 30, MB = 40;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xlo = std::min(xlo, tx(s.x[i]));
            xhi = std::max(xhi, tx(s.x[i]));
            ylo = std::min(ylo, ty(s.y[i]));
            yhi = std::max(yhi, ty(s.y[i]));
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << (W - ML - MR)
        << "\" height=\"" << (H - MT - MB)
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    int li = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double px = axis_map(tx(s.x[i]), xlo, xhi, ML, W - MR);
            double py = axis_map(ty(s.y[i]), ylo, yhi, H - MB, MT);
            out << CsvWriter::num(px) << ',' << CsvWriter::num(py) << ' ';
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<text x=\"" << (ML + 8) << "\" y=\"" << (MT + 16 + 16 * li)
                << "\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label
                << "</text>\n";
            ++li;
        }
    }
    out << "</svg>\n";
}

}  // namespace amplab
