#pragma once

// Result emission: RFC-4180 CSV with 17-significant-digit numbers, and
// self-contained SVG 1.1 line plots.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace icdisp {

/// Shortest fixed-precision form with 17 significant digits.
inline std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Column-oriented CSV table. Lines end with CRLF; fields are plain
/// (numbers and bare identifiers), so no quoting is required.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values) {
        if (values.size() != header_.size())
            throw std::invalid_argument("CsvTable: row width mismatch");
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += format_number(values[i]);
        }
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) out += ',';
            out += header_[i];
        }
        out += "\r\n";
        for (const auto& r : rows_) {
            out += r;
            out += "\r\n";
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + path + "'");
        f << str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

/// Minimal SVG 1.1 line plot: axes with ticks, one polyline per series.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color = "#1f6fb2") {
        if (x.size() != y.size() || x.empty())
            throw std::invalid_argument("SvgPlot: series size mismatch");
        series_.push_back({x, y, color});
        for (std::size_t i = 0; i < x.size(); ++i) {
            xmin_ = std::min(xmin_, x[i]);
            xmax_ = std::max(xmax_, x[i]);
            ymin_ = std::min(ymin_, y[i]);
            ymax_ = std::max(ymax_, y[i]);
        }
    }

    std::string str() const {
        constexpr double w = 640, h = 480, ml = 70, mr = 20, mt = 40, mb = 55;
        const double xspan = xmax_ > xmin_ ? xmax_ - xmin_ : 1.0;
        const double yspan = ymax_ > ymin_ ? ymax_ - ymin_ : 1.0;
        auto px = [&](double x) { return ml + (x - xmin_) / xspan * (w - ml - mr); };
        auto py = [&](double y) { return h - mb - (y - ymin_) / yspan * (h - mt - mb); };
        auto num = [](double v) {
            char b[32];
            std::snprintf(b, sizeof(b), "%.2f", v);
            return std::string(b);
        };
        auto tick = [](double v) {
            char b[32];
            std::snprintf(b, sizeof(b), "%.4g", v);
            return std::string(b);
        };

        std::string s;
        s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
             "height=\"480\" viewBox=\"0 0 640 480\">\n";
        s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
        s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"15\">" + title_ + "</text>\n";
        // axes
        s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(h - mb) + "\" x2=\"" + num(w - mr) +
             "\" y2=\"" + num(h - mb) + "\" stroke=\"black\"/>\n";
        s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
             "\" y2=\"" + num(h - mb) + "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = xmin_ + xspan * i / 4.0;
            const double fy = ymin_ + yspan * i / 4.0;
            s += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(h - mb) + "\" x2=\"" +
                 num(px(fx)) + "\" y2=\"" + num(h - mb + 5) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(h - mb + 20) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
                 tick(fx) + "</text>\n";
            s += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(py(fy)) + "\" x2=\"" + num(ml) +
                 "\" y2=\"" + num(py(fy)) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(fy) + 4) +
                 "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
                 tick(fy) + "</text>\n";
        }
        s += "<text x=\"" + num((ml + w - mr) / 2) + "\" y=\"" + num(h - 12) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xlabel_ +
             "</text>\n";
        s += "<text x=\"16\" y=\"" + num((mt + h - mb) / 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
             "transform=\"rotate(-90 16 " + num((mt + h - mb) / 2) + ")\">" + ylabel_ +
             "</text>\n";
        for (const auto& ser : series_) {
            s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                if (i) s += ' ';
                s += num(px(ser.x[i])) + "," + num(py(ser.y[i]));
            }
            s += "\"/>\n";
        }
        s += "</svg>\n";
        return s;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + path + "'");
        f << str();
    }

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
    double xmin_ = 1e300, xmax_ = -1e300, ymin_ = 1e300, ymax_ = -1e300;
};

} // namespace icdisp
